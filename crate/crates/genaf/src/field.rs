//! Global degree-of-freedom storage.
//!
//! Every cell owns one block of the flat state vector, holding in order its
//! upper-right corner node, its top edge points, its right edge points and
//! its moments; each DOF stores the solution components contiguously. The
//! four nodes and all edge points of a cell's reconstruction are gathered
//! from the owning neighbors, which on the periodic grid always exist.

use crate::element::{DofKind, ElementDef};
use crate::mesh::GridSpec;
use crate::quadrature::QuadratureRule;
use crate::timestepper::StateVector;

#[derive(Debug, Clone)]
pub struct Field {
    nx: usize,
    ny: usize,
    n_comp: usize,
    n_edge: usize,
    n_mom: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn new(nx: usize, ny: usize, n_comp: usize, element: &ElementDef) -> Self {
        Self::with_counts(nx, ny, n_comp, element.n_edge_points(), element.n_moments())
    }

    pub fn with_counts(nx: usize, ny: usize, n_comp: usize, n_edge: usize, n_mom: usize) -> Self {
        let len = nx * ny * (1 + 2 * n_edge + n_mom) * n_comp;
        Field {
            nx,
            ny,
            n_comp,
            n_edge,
            n_mom,
            data: vec![0.0; len],
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn n_comp(&self) -> usize {
        self.n_comp
    }

    /// Owned DOFs per cell.
    pub fn dofs_per_cell(&self) -> usize {
        1 + 2 * self.n_edge + self.n_mom
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    fn cell_base(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        (j * self.nx + i) * self.dofs_per_cell() * self.n_comp
    }

    /// Offset of the node at (x_{i+1/2}, y_{j+1/2}), owned by cell (i, j).
    pub fn node_offset(&self, i: usize, j: usize) -> usize {
        self.cell_base(i, j)
    }

    /// Offset of point `a` on the top edge of cell (i, j).
    pub fn h_edge_offset(&self, i: usize, j: usize, a: usize) -> usize {
        debug_assert!(a < self.n_edge);
        self.cell_base(i, j) + (1 + a) * self.n_comp
    }

    /// Offset of point `a` on the right edge of cell (i, j).
    pub fn v_edge_offset(&self, i: usize, j: usize, a: usize) -> usize {
        debug_assert!(a < self.n_edge);
        self.cell_base(i, j) + (1 + self.n_edge + a) * self.n_comp
    }

    /// Offset of moment `m` of cell (i, j), in the element's moment order
    /// (the cell average is always m = 0).
    pub fn moment_offset(&self, i: usize, j: usize, m: usize) -> usize {
        debug_assert!(m < self.n_mom);
        self.cell_base(i, j) + (1 + 2 * self.n_edge + m) * self.n_comp
    }

    pub fn at(&self, offset: usize) -> &[f64] {
        &self.data[offset..offset + self.n_comp]
    }

    pub fn at_mut(&mut self, offset: usize) -> &mut [f64] {
        let n = self.n_comp;
        &mut self.data[offset..offset + n]
    }

    pub fn node(&self, i: usize, j: usize) -> &[f64] {
        self.at(self.node_offset(i, j))
    }

    pub fn moment(&self, i: usize, j: usize, m: usize) -> &[f64] {
        self.at(self.moment_offset(i, j, m))
    }

    pub fn fill(&mut self, value: f64) {
        self.data.fill(value);
    }

    /// Per-component total mass: sum of cell averages times the cell area.
    pub fn masses(&self, dx: f64, dy: f64) -> Vec<f64> {
        let mut m = vec![0.0; self.n_comp];
        for j in 0..self.ny {
            for i in 0..self.nx {
                let avg = self.moment(i, j, 0);
                for s in 0..self.n_comp {
                    m[s] += avg[s];
                }
            }
        }
        for v in &mut m {
            *v *= dx * dy;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Global offsets of cell (i, j)'s DOFs in the element's ordering,
    /// resolving shared interface DOFs through the periodic owners.
    pub fn cell_dof_offsets(&self, element: &ElementDef, i: usize, j: usize, out: &mut Vec<usize>) {
        let im = (i + self.nx - 1) % self.nx;
        let jm = (j + self.ny - 1) % self.ny;
        out.clear();
        let mut m = 0;
        for &dof in element.dofs() {
            out.push(match dof {
                DofKind::Node(0) => self.node_offset(im, jm),
                DofKind::Node(1) => self.node_offset(i, jm),
                DofKind::Node(2) => self.node_offset(i, j),
                DofKind::Node(3) => self.node_offset(im, j),
                DofKind::Node(_) => unreachable!(),
                DofKind::EdgePoint { edge: 0, a } => self.h_edge_offset(i, jm, a),
                DofKind::EdgePoint { edge: 1, a } => self.v_edge_offset(i, j, a),
                DofKind::EdgePoint { edge: 2, a } => self.h_edge_offset(i, j, a),
                DofKind::EdgePoint { edge: 3, a } => self.v_edge_offset(im, j, a),
                DofKind::EdgePoint { .. } => unreachable!(),
                DofKind::Moment { .. } => {
                    m += 1;
                    self.moment_offset(i, j, m - 1)
                }
            });
        }
    }

    /// Evaluate the reconstruction of cell (i, j) at a reference point.
    pub fn reconstruct(&self, element: &ElementDef, i: usize, j: usize, xi: f64, eta: f64) -> Vec<f64> {
        let mut offs = Vec::new();
        self.cell_dof_offsets(element, i, j, &mut offs);
        let shapes = element.eval_shapes(xi, eta);
        let mut out = vec![0.0; self.n_comp];
        for (r, &off) in offs.iter().enumerate() {
            let q = self.at(off);
            for s in 0..self.n_comp {
                out[s] += shapes[r] * q[s];
            }
        }
        out
    }

    /// Physical-coordinate gradient of the reconstruction of cell (i, j).
    pub fn reconstruct_gradient(
        &self,
        element: &ElementDef,
        grid: &GridSpec,
        i: usize,
        j: usize,
        xi: f64,
        eta: f64,
    ) -> (Vec<f64>, Vec<f64>) {
        let mut offs = Vec::new();
        self.cell_dof_offsets(element, i, j, &mut offs);
        let (gx, gy) = element.eval_shape_grads(xi, eta);
        let mut dx = vec![0.0; self.n_comp];
        let mut dy = vec![0.0; self.n_comp];
        for (r, &off) in offs.iter().enumerate() {
            let q = self.at(off);
            for s in 0..self.n_comp {
                dx[s] += gx[r] * q[s];
                dy[s] += gy[r] * q[s];
            }
        }
        for s in 0..self.n_comp {
            dx[s] /= grid.dx;
            dy[s] /= grid.dy;
        }
        (dx, dy)
    }
}

/// Quadrature points per direction used to initialize moments.
pub fn init_quadrature_points(element: &ElementDef) -> usize {
    element.degree() + 3
}

/// Project an initial condition onto the DOFs: direct evaluation at the
/// owned points, over-integrated tensor quadrature for the moments.
pub fn project(
    grid: &GridSpec,
    element: &ElementDef,
    n_comp: usize,
    f: &dyn Fn(f64, f64, &mut [f64]),
) -> Field {
    let mut field = Field::new(grid.nx, grid.ny, n_comp, element);
    let rule = QuadratureRule::gauss_legendre(init_quadrature_points(element));
    let mut val = vec![0.0; n_comp];
    let nq = rule.points.len();
    let mut fq = vec![0.0; nq * nq * n_comp];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = grid.from_reference(i, j, 0.5, 0.5);
            f(x, y, &mut val);
            let off = field.node_offset(i, j);
            field.at_mut(off).copy_from_slice(&val);
            for (a, &xi) in element.edge_nodes().iter().enumerate() {
                let (x, y) = grid.from_reference(i, j, xi, 0.5);
                f(x, y, &mut val);
                let off = field.h_edge_offset(i, j, a);
                field.at_mut(off).copy_from_slice(&val);
                let (x, y) = grid.from_reference(i, j, 0.5, xi);
                f(x, y, &mut val);
                let off = field.v_edge_offset(i, j, a);
                field.at_mut(off).copy_from_slice(&val);
            }
            for (q1, &xi) in rule.points.iter().enumerate() {
                for (q2, &eta) in rule.points.iter().enumerate() {
                    let (x, y) = grid.from_reference(i, j, xi, eta);
                    f(x, y, &mut fq[(q1 * nq + q2) * n_comp..(q1 * nq + q2 + 1) * n_comp]);
                }
            }
            for (m, &(k, l)) in element.moments().iter().enumerate() {
                let mut acc = vec![0.0; n_comp];
                for (q1, &xi) in rule.points.iter().enumerate() {
                    for (q2, &eta) in rule.points.iter().enumerate() {
                        let w = rule.weights[q1]
                            * rule.weights[q2]
                            * xi.powi(k as i32)
                            * eta.powi(l as i32);
                        let fv = &fq[(q1 * nq + q2) * n_comp..(q1 * nq + q2 + 1) * n_comp];
                        for s in 0..n_comp {
                            acc[s] += w * fv[s];
                        }
                    }
                }
                let norm = crate::element::moment_normalization(k, l);
                let off = field.moment_offset(i, j, m);
                for s in 0..n_comp {
                    field.at_mut(off)[s] = norm * acc[s];
                }
            }
        }
    }
    field
}

impl StateVector for Field {
    fn scale(&mut self, factor: f64) {
        for x in &mut self.data {
            *x *= factor;
        }
    }

    fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
    }
}
