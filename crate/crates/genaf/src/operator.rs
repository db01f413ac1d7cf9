//! The semi-discrete right-hand side: upwind point-value updates and
//! weak-form moment updates.
//!
//! Point values evolve by d/dt q_p = -J^{+,x} D^+_x q - J^{-,x} D^-_x q
//! - J^{+,y} D^+_y q - J^{-,y} D^-_y q, where the one-sided derivatives are
//! reconstruction gradients of the adjacent cells. The tangential derivative
//! along an edge is single-valued (shared trace) and is taken from the
//! lower/left cell; the split Jacobians are evaluated at the point's state.
//!
//! Moments evolve by the weak form with edge flux integrals and bulk
//! integrals against the test-monomial gradient, all on Gauss-Legendre
//! rules exact for the polynomial integrands of linear models. Interface
//! fluxes are computed once from the owning cell and shared by both
//! neighbors, so the cell-average update telescopes exactly.

use crate::element::{moment_normalization, DofKind, ElementDef};
use crate::error::GenAfError;
use crate::field::Field;
use crate::mesh::GridSpec;
use crate::models::{Model, MAX_COMPONENTS};
use crate::quadrature::QuadratureRule;
use std::cell::RefCell;

/// A point DOF owned by a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OwnedPoint {
    /// The upper-right corner node.
    Node,
    /// Point `a` on the top edge.
    HEdge(usize),
    /// Point `a` on the right edge.
    VEdge(usize),
}

/// Smallest per-direction Gauss count integrating every moment integrand
/// (degree N + max(k,l)) exactly.
pub fn default_quadrature_points(element: &ElementDef) -> usize {
    let m_max = element
        .moments()
        .iter()
        .map(|&(k, l)| k.max(l))
        .max()
        .unwrap_or(0);
    (element.degree() + m_max + 1).div_ceil(2)
}

struct MomentTabs {
    aref: f64,
    half_k: f64,
    mhalf_k: f64,
    half_l: f64,
    mhalf_l: f64,
    /// w_q eta_q^l: weights for the left/right edge flux integrals.
    ewx: Vec<f64>,
    /// w_q xi_q^k: weights for the bottom/top edge flux integrals.
    ewy: Vec<f64>,
    /// w w k xi^{k-1} eta^l on the tensor grid.
    bwx: Vec<f64>,
    /// w w l xi^k eta^{l-1} on the tensor grid.
    bwy: Vec<f64>,
}

struct Scratch {
    gathered: Vec<f64>,
    vflux: Vec<f64>,
    hflux: Vec<f64>,
    bulk_fx: Vec<f64>,
    bulk_fy: Vec<f64>,
}

pub struct SemiDiscreteOp {
    element: ElementDef,
    grid: GridSpec,
    model: Model,
    n_comp: usize,
    n_dofs: usize,
    n_edge: usize,
    q_points: usize,
    /// Global DOF offsets per cell, element ordering, nx*ny*n_dofs entries.
    gather: Vec<usize>,
    node2_idx: usize,
    top_idx: Vec<usize>,
    right_idx: Vec<usize>,
    // Shape gradients at the owned point locations and their mirrors.
    gx_pp: Vec<f64>,
    gy_pp: Vec<f64>,
    gx_mp: Vec<f64>,
    gy_pm: Vec<f64>,
    gx_h: Vec<f64>,
    gy_h: Vec<f64>,
    gy_h_bot: Vec<f64>,
    gx_v: Vec<f64>,
    gy_v: Vec<f64>,
    gx_v_left: Vec<f64>,
    // Shape values at edge and bulk quadrature points.
    shapes_right: Vec<f64>,
    shapes_top: Vec<f64>,
    shapes_left: Vec<f64>,
    shapes_bottom: Vec<f64>,
    shapes_bulk: Vec<f64>,
    moment_tabs: Vec<MomentTabs>,
    scratch: RefCell<Scratch>,
}

impl SemiDiscreteOp {
    pub fn new(element: &ElementDef, grid: &GridSpec, model: Model) -> Result<Self, GenAfError> {
        let q = default_quadrature_points(element);
        Self::with_quadrature(element, grid, model, q)
    }

    /// Construct with an explicit per-direction quadrature count; used by
    /// over-integration oracles. Must not fall below the default.
    pub fn with_quadrature(
        element: &ElementDef,
        grid: &GridSpec,
        model: Model,
        q_points: usize,
    ) -> Result<Self, GenAfError> {
        let required = default_quadrature_points(element);
        if q_points < required {
            return Err(GenAfError::InvalidConfig(format!(
                "{q_points} quadrature points per direction cannot integrate the moment \
                 integrands; need at least {required}"
            )));
        }
        let n_comp = model.n_components();
        let n_dofs = element.n_dofs();
        let n_edge = element.n_edge_points();
        let template = Field::new(grid.nx, grid.ny, n_comp, element);

        let mut gather = Vec::with_capacity(grid.n_cells() * n_dofs);
        let mut offs = Vec::new();
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                template.cell_dof_offsets(element, i, j, &mut offs);
                gather.extend_from_slice(&offs);
            }
        }

        let pos = |target: DofKind| element.dofs().iter().position(|&d| d == target).unwrap();
        let node2_idx = pos(DofKind::Node(2));
        let top_idx: Vec<usize> = (0..n_edge)
            .map(|a| pos(DofKind::EdgePoint { edge: 2, a }))
            .collect();
        let right_idx: Vec<usize> = (0..n_edge)
            .map(|a| pos(DofKind::EdgePoint { edge: 1, a }))
            .collect();

        let (gx_pp, gy_pp) = element.eval_shape_grads(0.5, 0.5);
        let (gx_mp, _) = element.eval_shape_grads(-0.5, 0.5);
        let (_, gy_pm) = element.eval_shape_grads(0.5, -0.5);
        let mut gx_h = Vec::with_capacity(n_edge * n_dofs);
        let mut gy_h = Vec::with_capacity(n_edge * n_dofs);
        let mut gy_h_bot = Vec::with_capacity(n_edge * n_dofs);
        let mut gx_v = Vec::with_capacity(n_edge * n_dofs);
        let mut gy_v = Vec::with_capacity(n_edge * n_dofs);
        let mut gx_v_left = Vec::with_capacity(n_edge * n_dofs);
        for &xi in element.edge_nodes() {
            let (gx, gy) = element.eval_shape_grads(xi, 0.5);
            gx_h.extend_from_slice(&gx);
            gy_h.extend_from_slice(&gy);
            let (_, gy) = element.eval_shape_grads(xi, -0.5);
            gy_h_bot.extend_from_slice(&gy);
            let (gx, gy) = element.eval_shape_grads(0.5, xi);
            gx_v.extend_from_slice(&gx);
            gy_v.extend_from_slice(&gy);
            let (gx, _) = element.eval_shape_grads(-0.5, xi);
            gx_v_left.extend_from_slice(&gx);
        }

        let rule = QuadratureRule::gauss_legendre(q_points);
        let mut shapes_right = Vec::with_capacity(q_points * n_dofs);
        let mut shapes_top = Vec::with_capacity(q_points * n_dofs);
        let mut shapes_left = Vec::with_capacity(q_points * n_dofs);
        let mut shapes_bottom = Vec::with_capacity(q_points * n_dofs);
        for &t in &rule.points {
            shapes_right.extend_from_slice(&element.eval_shapes(0.5, t));
            shapes_top.extend_from_slice(&element.eval_shapes(t, 0.5));
            shapes_left.extend_from_slice(&element.eval_shapes(-0.5, t));
            shapes_bottom.extend_from_slice(&element.eval_shapes(t, -0.5));
        }
        let mut shapes_bulk = Vec::with_capacity(q_points * q_points * n_dofs);
        for &xi in &rule.points {
            for &eta in &rule.points {
                shapes_bulk.extend_from_slice(&element.eval_shapes(xi, eta));
            }
        }

        let moment_tabs = element
            .moments()
            .iter()
            .map(|&(k, l)| {
                let ki = k as i32;
                let li = l as i32;
                let ewx: Vec<f64> = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&t, &w)| w * t.powi(li))
                    .collect();
                let ewy: Vec<f64> = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&t, &w)| w * t.powi(ki))
                    .collect();
                let mut bwx = Vec::with_capacity(q_points * q_points);
                let mut bwy = Vec::with_capacity(q_points * q_points);
                for (q1, &xi) in rule.points.iter().enumerate() {
                    for (q2, &eta) in rule.points.iter().enumerate() {
                        let ww = rule.weights[q1] * rule.weights[q2];
                        bwx.push(if k == 0 {
                            0.0
                        } else {
                            ww * k as f64 * xi.powi(ki - 1) * eta.powi(li)
                        });
                        bwy.push(if l == 0 {
                            0.0
                        } else {
                            ww * l as f64 * xi.powi(ki) * eta.powi(li - 1)
                        });
                    }
                }
                MomentTabs {
                    aref: moment_normalization(k, l),
                    half_k: (0.5f64).powi(ki),
                    mhalf_k: (-0.5f64).powi(ki),
                    half_l: (0.5f64).powi(li),
                    mhalf_l: (-0.5f64).powi(li),
                    ewx,
                    ewy,
                    bwx,
                    bwy,
                }
            })
            .collect();

        let ncells = grid.n_cells();
        let scratch = Scratch {
            gathered: vec![0.0; ncells * n_dofs * n_comp],
            vflux: vec![0.0; ncells * q_points * n_comp],
            hflux: vec![0.0; ncells * q_points * n_comp],
            bulk_fx: vec![0.0; q_points * q_points * n_comp],
            bulk_fy: vec![0.0; q_points * q_points * n_comp],
        };

        Ok(SemiDiscreteOp {
            element: element.clone(),
            grid: *grid,
            model,
            n_comp,
            n_dofs,
            n_edge,
            q_points,
            gather,
            node2_idx,
            top_idx,
            right_idx,
            gx_pp,
            gy_pp,
            gx_mp,
            gy_pm,
            gx_h,
            gy_h,
            gy_h_bot,
            gx_v,
            gy_v,
            gx_v_left,
            shapes_right,
            shapes_top,
            shapes_left,
            shapes_bottom,
            shapes_bulk,
            moment_tabs,
            scratch: RefCell::new(scratch),
        })
    }

    pub fn element(&self) -> &ElementDef {
        &self.element
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn quadrature_points(&self) -> usize {
        self.q_points
    }

    pub fn new_field(&self) -> Field {
        Field::new(self.grid.nx, self.grid.ny, self.n_comp, &self.element)
    }

    fn check_field(&self, field: &Field) -> Result<(), GenAfError> {
        if field.nx() != self.grid.nx
            || field.ny() != self.grid.ny
            || field.n_comp() != self.n_comp
            || field.dofs_per_cell() != 1 + 2 * self.n_edge + self.element.n_moments()
        {
            return Err(GenAfError::InvalidConfig(
                "field layout does not match the operator's grid and element".into(),
            ));
        }
        Ok(())
    }

    /// Evaluate the full right-hand side, writing every owned DOF once.
    pub fn semidiscrete_rhs(&self, field: &Field) -> Result<Field, GenAfError> {
        self.check_field(field)?;
        let mut out = self.new_field();
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let (nc, nd, nq) = (self.n_comp, self.n_dofs, self.q_points);
        let mut scratch = self.scratch.borrow_mut();
        let Scratch {
            gathered,
            vflux,
            hflux,
            bulk_fx,
            bulk_fy,
        } = &mut *scratch;

        // Pass A: gather every cell's DOF vector and evaluate the owned
        // interface fluxes (right edge f^x, top edge f^y).
        let mut state = [0.0; MAX_COMPONENTS];
        for j in 0..ny {
            for i in 0..nx {
                let c = j * nx + i;
                let g = &mut gathered[c * nd * nc..(c + 1) * nd * nc];
                for r in 0..nd {
                    let off = self.gather[c * nd + r];
                    g[r * nc..(r + 1) * nc].copy_from_slice(&field.data()[off..off + nc]);
                }
                let g = &gathered[c * nd * nc..(c + 1) * nd * nc];
                for q in 0..nq {
                    eval_state(&self.shapes_right[q * nd..(q + 1) * nd], g, nc, &mut state);
                    self.model
                        .check_state(&state[..nc])
                        .map_err(|detail| inadmissible(i, j, "right-edge quadrature", detail))?;
                    let f = &mut vflux[(c * nq + q) * nc..(c * nq + q + 1) * nc];
                    self.model.flux_x(&state[..nc], f);
                    eval_state(&self.shapes_top[q * nd..(q + 1) * nd], g, nc, &mut state);
                    self.model
                        .check_state(&state[..nc])
                        .map_err(|detail| inadmissible(i, j, "top-edge quadrature", detail))?;
                    let f = &mut hflux[(c * nq + q) * nc..(c * nq + q + 1) * nc];
                    self.model.flux_y(&state[..nc], f);
                }
            }
        }

        // Pass B: point and moment updates per cell.
        for j in 0..ny {
            for i in 0..nx {
                let c = j * nx + i;
                let cr = j * nx + (i + 1) % nx;
                let cu = ((j + 1) % ny) * nx + i;
                let cl = j * nx + (i + nx - 1) % nx;
                let cb = ((j + ny - 1) % ny) * nx + i;
                let gc = &gathered[c * nd * nc..(c + 1) * nd * nc];
                let gr = &gathered[cr * nd * nc..(cr + 1) * nd * nc];
                let gu = &gathered[cu * nd * nc..(cu + 1) * nd * nc];

                let node_off = out.node_offset(i, j);
                self.point_update(OwnedPoint::Node, gc, gr, gu, out.at_mut(node_off))
                    .map_err(|(tag, detail)| inadmissible(i, j, tag, detail))?;
                for a in 0..self.n_edge {
                    let off = out.h_edge_offset(i, j, a);
                    self.point_update(OwnedPoint::HEdge(a), gc, gr, gu, out.at_mut(off))
                        .map_err(|(tag, detail)| inadmissible(i, j, tag, detail))?;
                    let off = out.v_edge_offset(i, j, a);
                    self.point_update(OwnedPoint::VEdge(a), gc, gr, gu, out.at_mut(off))
                        .map_err(|(tag, detail)| inadmissible(i, j, tag, detail))?;
                }

                // Bulk fluxes of this cell.
                for qq in 0..nq * nq {
                    eval_state(&self.shapes_bulk[qq * nd..(qq + 1) * nd], gc, nc, &mut state);
                    self.model
                        .check_state(&state[..nc])
                        .map_err(|detail| inadmissible(i, j, "bulk quadrature", detail))?;
                    self.model
                        .flux_x(&state[..nc], &mut bulk_fx[qq * nc..(qq + 1) * nc]);
                    self.model
                        .flux_y(&state[..nc], &mut bulk_fy[qq * nc..(qq + 1) * nc]);
                }

                let fx_r = &vflux[c * nq * nc..(c + 1) * nq * nc];
                let fx_l = &vflux[cl * nq * nc..(cl + 1) * nq * nc];
                let fy_t = &hflux[c * nq * nc..(c + 1) * nq * nc];
                let fy_b = &hflux[cb * nq * nc..(cb + 1) * nq * nc];
                for (m, tab) in self.moment_tabs.iter().enumerate() {
                    let off = out.moment_offset(i, j, m);
                    self.moment_update(tab, fx_r, fx_l, fy_t, fy_b, bulk_fx, bulk_fy, out.at_mut(off));
                }
            }
        }
        Ok(out)
    }

    /// d/dt of one owned point, from pre-gathered cell DOF vectors of the
    /// cell itself, its right neighbor and its upper neighbor.
    fn point_update(
        &self,
        kind: OwnedPoint,
        gc: &[f64],
        gr: &[f64],
        gu: &[f64],
        out: &mut [f64],
    ) -> Result<(), (&'static str, String)> {
        let nc = self.n_comp;
        let nd = self.n_dofs;
        let inv_dx = 1.0 / self.grid.dx;
        let inv_dy = 1.0 / self.grid.dy;
        let mut dpx = [0.0; MAX_COMPONENTS];
        let mut dmx = [0.0; MAX_COMPONENTS];
        let mut dpy = [0.0; MAX_COMPONENTS];
        let mut dmy = [0.0; MAX_COMPONENTS];
        let mut qp = [0.0; MAX_COMPONENTS];
        match kind {
            OwnedPoint::Node => {
                dot_rows(&self.gx_pp, gc, nd, nc, inv_dx, &mut dpx);
                dot_rows(&self.gx_mp, gr, nd, nc, inv_dx, &mut dmx);
                dot_rows(&self.gy_pp, gc, nd, nc, inv_dy, &mut dpy);
                dot_rows(&self.gy_pm, gu, nd, nc, inv_dy, &mut dmy);
                qp[..nc].copy_from_slice(&gc[self.node2_idx * nc..(self.node2_idx + 1) * nc]);
            }
            OwnedPoint::HEdge(a) => {
                // Tangential x-derivative is single-valued; use it on both
                // sides of the split.
                dot_rows(&self.gx_h[a * nd..(a + 1) * nd], gc, nd, nc, inv_dx, &mut dpx);
                dmx[..nc].copy_from_slice(&dpx[..nc]);
                dot_rows(&self.gy_h[a * nd..(a + 1) * nd], gc, nd, nc, inv_dy, &mut dpy);
                dot_rows(&self.gy_h_bot[a * nd..(a + 1) * nd], gu, nd, nc, inv_dy, &mut dmy);
                let r = self.top_idx[a];
                qp[..nc].copy_from_slice(&gc[r * nc..(r + 1) * nc]);
            }
            OwnedPoint::VEdge(a) => {
                dot_rows(&self.gx_v[a * nd..(a + 1) * nd], gc, nd, nc, inv_dx, &mut dpx);
                dot_rows(&self.gx_v_left[a * nd..(a + 1) * nd], gr, nd, nc, inv_dx, &mut dmx);
                dot_rows(&self.gy_v[a * nd..(a + 1) * nd], gc, nd, nc, inv_dy, &mut dpy);
                dmy[..nc].copy_from_slice(&dpy[..nc]);
                let r = self.right_idx[a];
                qp[..nc].copy_from_slice(&gc[r * nc..(r + 1) * nc]);
            }
        }
        self.model
            .check_state(&qp[..nc])
            .map_err(|detail| ("point state", detail))?;
        let mut acc = [0.0; MAX_COMPONENTS];
        self.model
            .accumulate_upwind_x(&qp[..nc], &dpx[..nc], &dmx[..nc], &mut acc[..nc]);
        self.model
            .accumulate_upwind_y(&qp[..nc], &dpy[..nc], &dmy[..nc], &mut acc[..nc]);
        for s in 0..nc {
            out[s] = -acc[s];
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn moment_update(
        &self,
        tab: &MomentTabs,
        fx_r: &[f64],
        fx_l: &[f64],
        fy_t: &[f64],
        fy_b: &[f64],
        bulk_fx: &[f64],
        bulk_fy: &[f64],
        out: &mut [f64],
    ) {
        let nc = self.n_comp;
        let nq = self.q_points;
        let inv_dx = 1.0 / self.grid.dx;
        let inv_dy = 1.0 / self.grid.dy;
        for s in 0..nc {
            let mut ixr = 0.0;
            let mut ixl = 0.0;
            let mut iyt = 0.0;
            let mut iyb = 0.0;
            for q in 0..nq {
                ixr += tab.ewx[q] * fx_r[q * nc + s];
                ixl += tab.ewx[q] * fx_l[q * nc + s];
                iyt += tab.ewy[q] * fy_t[q * nc + s];
                iyb += tab.ewy[q] * fy_b[q * nc + s];
            }
            let mut bx = 0.0;
            let mut by = 0.0;
            for qq in 0..nq * nq {
                bx += tab.bwx[qq] * bulk_fx[qq * nc + s];
                by += tab.bwy[qq] * bulk_fy[qq * nc + s];
            }
            let term_x = tab.half_k * ixr - tab.mhalf_k * ixl - bx;
            let term_y = tab.half_l * iyt - tab.mhalf_l * iyb - by;
            out[s] = -tab.aref * (term_x * inv_dx + term_y * inv_dy);
        }
    }

    /// d/dt of a single owned point DOF of cell (i, j). Test-facing API;
    /// identical arithmetic to the full RHS.
    pub fn point_rhs(
        &self,
        field: &Field,
        i: usize,
        j: usize,
        p: OwnedPoint,
    ) -> Result<Vec<f64>, GenAfError> {
        self.check_field(field)?;
        let gc = self.gather_cell(field, i, j);
        let gr = self.gather_cell(field, (i + 1) % self.grid.nx, j);
        let gu = self.gather_cell(field, i, (j + 1) % self.grid.ny);
        let mut out = vec![0.0; self.n_comp];
        self.point_update(p, &gc, &gr, &gu, &mut out)
            .map_err(|(tag, detail)| inadmissible(i, j, tag, detail))?;
        Ok(out)
    }

    /// d/dt of moment `m` of cell (i, j), with all four edge traces taken
    /// from the cell's own reconstruction (equivalent to the shared-flux
    /// evaluation up to round-off, by global continuity).
    pub fn moment_rhs(
        &self,
        field: &Field,
        i: usize,
        j: usize,
        m: usize,
    ) -> Result<Vec<f64>, GenAfError> {
        self.check_field(field)?;
        let (nc, nd, nq) = (self.n_comp, self.n_dofs, self.q_points);
        let g = self.gather_cell(field, i, j);
        let mut state = [0.0; MAX_COMPONENTS];
        let mut fx_r = vec![0.0; nq * nc];
        let mut fx_l = vec![0.0; nq * nc];
        let mut fy_t = vec![0.0; nq * nc];
        let mut fy_b = vec![0.0; nq * nc];
        for q in 0..nq {
            for (shapes, buf, x_dir) in [
                (&self.shapes_right, &mut fx_r, true),
                (&self.shapes_left, &mut fx_l, true),
                (&self.shapes_top, &mut fy_t, false),
                (&self.shapes_bottom, &mut fy_b, false),
            ] {
                eval_state(&shapes[q * nd..(q + 1) * nd], &g, nc, &mut state);
                self.model
                    .check_state(&state[..nc])
                    .map_err(|detail| inadmissible(i, j, "edge quadrature", detail))?;
                let f = &mut buf[q * nc..(q + 1) * nc];
                if x_dir {
                    self.model.flux_x(&state[..nc], f);
                } else {
                    self.model.flux_y(&state[..nc], f);
                }
            }
        }
        let mut bulk_fx = vec![0.0; nq * nq * nc];
        let mut bulk_fy = vec![0.0; nq * nq * nc];
        for qq in 0..nq * nq {
            eval_state(&self.shapes_bulk[qq * nd..(qq + 1) * nd], &g, nc, &mut state);
            self.model
                .check_state(&state[..nc])
                .map_err(|detail| inadmissible(i, j, "bulk quadrature", detail))?;
            self.model
                .flux_x(&state[..nc], &mut bulk_fx[qq * nc..(qq + 1) * nc]);
            self.model
                .flux_y(&state[..nc], &mut bulk_fy[qq * nc..(qq + 1) * nc]);
        }
        let mut out = vec![0.0; nc];
        self.moment_update(
            &self.moment_tabs[m],
            &fx_r,
            &fx_l,
            &fy_t,
            &fy_b,
            &bulk_fx,
            &bulk_fy,
            &mut out,
        );
        Ok(out)
    }

    fn gather_cell(&self, field: &Field, i: usize, j: usize) -> Vec<f64> {
        let nc = self.n_comp;
        let mut offs = Vec::new();
        field.cell_dof_offsets(&self.element, i, j, &mut offs);
        let mut g = vec![0.0; self.n_dofs * nc];
        for (r, &off) in offs.iter().enumerate() {
            g[r * nc..(r + 1) * nc].copy_from_slice(&field.data()[off..off + nc]);
        }
        g
    }
}

fn inadmissible(i: usize, j: usize, tag: &str, detail: String) -> GenAfError {
    GenAfError::InadmissibleState {
        i,
        j,
        detail: format!("{detail} at {tag}"),
    }
}

/// out[s] = sum_r shapes[r] * g[r*nc + s].
fn eval_state(shapes: &[f64], g: &[f64], nc: usize, out: &mut [f64; MAX_COMPONENTS]) {
    out[..nc].fill(0.0);
    for (r, &w) in shapes.iter().enumerate() {
        for s in 0..nc {
            out[s] += w * g[r * nc + s];
        }
    }
}

/// out[s] = scale * sum_r tab[r] * g[r*nc + s].
fn dot_rows(tab: &[f64], g: &[f64], nd: usize, nc: usize, scale: f64, out: &mut [f64; MAX_COMPONENTS]) {
    out[..nc].fill(0.0);
    for r in 0..nd {
        let w = tab[r];
        for s in 0..nc {
            out[s] += w * g[r * nc + s];
        }
    }
    for s in 0..nc {
        out[s] *= scale;
    }
}
