//! The hybrid finite element on the reference cell [-1/2, 1/2]^2.
//!
//! Degrees of freedom are the 4 corner nodes, N-1 points per edge and a set
//! of moments; the reconstruction space is the tensor space P^{N,N} or the
//! minimal serendipity-like space. Shape functions are obtained from one
//! dense generalized Vandermonde solve and cached as monomial coefficients.
//!
//! DOF ordering is fixed: nodes counterclockwise from the lower-left corner,
//! then edges E0 (bottom), E1 (right), E2 (top), E3 (left) with edge points
//! in ascending reference coordinate, then moments in graded lexicographic
//! order. Each cell owns its upper-right node, its top and right edge points
//! and all of its moments.

use crate::error::GenAfError;
use crate::quadrature::{lobatto_interior_nodes, QuadratureRule};
use nalgebra::DMatrix;

/// Which moments accompany the point values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentSet {
    /// Triangle-like: 0 <= k + l <= max(0, N - 4). Minimal DOF count.
    Triangle,
    /// Tensor-like: 0 <= k, l <= N - 2. Pairs with the P^{N,N} space.
    Tensor,
}

impl MomentSet {
    /// Moment multi-indices in graded lexicographic order.
    pub fn indices(self, degree: usize) -> Vec<(usize, usize)> {
        let mut idx = Vec::new();
        match self {
            MomentSet::Triangle => {
                let max_total = degree.saturating_sub(4);
                for k in 0..=max_total {
                    for l in 0..=max_total {
                        if k + l <= max_total {
                            idx.push((k, l));
                        }
                    }
                }
            }
            MomentSet::Tensor => {
                for k in 0..=degree.saturating_sub(2) {
                    for l in 0..=degree.saturating_sub(2) {
                        idx.push((k, l));
                    }
                }
            }
        }
        sort_graded(&mut idx);
        idx
    }
}

/// Edge point distribution. Only Gauss yields a stable semi-discretization
/// for orders above 3; the alternatives exist to reproduce that finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRule {
    Gauss,
    Lobatto,
    Uniform,
}

/// One degree of freedom of the element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    /// Corner node, counterclockwise from lower-left: 0 = (-1/2,-1/2),
    /// 1 = (1/2,-1/2), 2 = (1/2,1/2), 3 = (-1/2,1/2).
    Node(usize),
    /// Point `a` on edge `edge` (0 bottom, 1 right, 2 top, 3 left).
    EdgePoint { edge: usize, a: usize },
    /// Moment against the test monomial x^k y^l.
    Moment { k: usize, l: usize },
}

/// Gauss-Legendre points scaled to (-1/2, 1/2), ascending.
pub fn gauss_edge_nodes(count: usize) -> Vec<f64> {
    QuadratureRule::gauss_legendre(count).points
}

/// Alternative edge point distributions used by the stability study.
pub fn alt_edge_nodes(count: usize, rule: EdgeRule) -> Vec<f64> {
    match rule {
        EdgeRule::Gauss => gauss_edge_nodes(count),
        EdgeRule::Lobatto => lobatto_interior_nodes(count)
            .iter()
            .map(|x| 0.5 * x)
            .collect(),
        EdgeRule::Uniform => {
            // Interior points of a uniform subdivision into N = count + 1
            // intervals.
            let n = (count + 1) as f64;
            (0..count).map(|a| -0.5 + (a as f64 + 1.0) / n).collect()
        }
    }
}

/// Normalization factor A^ref_{k,l} = (k+1) 2^k (l+1) 2^l.
pub fn moment_normalization(k: usize, l: usize) -> f64 {
    (k as f64 + 1.0) * (2.0f64).powi(k as i32) * (l as f64 + 1.0) * (2.0f64).powi(l as i32)
}

/// Closed form of the moment functional applied to a monomial:
/// sigma_{k,l}(x^m y^n) = A^ref_{k,l} int x^{k+m} y^{l+n} over the reference
/// cell, which separates into 1-D monomial integrals.
pub fn moment_functional(k: usize, l: usize, m: usize, n: usize) -> f64 {
    if (k + m) % 2 == 1 || (l + n) % 2 == 1 {
        return 0.0;
    }
    let ix = (0.5f64).powi((k + m) as i32) / (k + m + 1) as f64;
    let iy = (0.5f64).powi((l + n) as i32) / (l + n + 1) as f64;
    moment_normalization(k, l) * ix * iy
}

/// Monomial exponents of the reconstruction space in graded lexicographic
/// order. Triangle: P^N plus x^N y and x y^N, plus x^2 y^2 for N = 2, 3.
/// Tensor: P^{N,N}.
pub fn build_basis(degree: usize, moment_set: MomentSet) -> Vec<(usize, usize)> {
    assert!(degree >= 2, "reconstruction degree must be at least 2");
    let mut basis = Vec::new();
    match moment_set {
        MomentSet::Triangle => {
            for m in 0..=degree {
                for n in 0..=degree {
                    if m + n <= degree {
                        basis.push((m, n));
                    }
                }
            }
            basis.push((degree, 1));
            basis.push((1, degree));
            if degree <= 3 {
                basis.push((2, 2));
            }
        }
        MomentSet::Tensor => {
            for m in 0..=degree {
                for n in 0..=degree {
                    basis.push((m, n));
                }
            }
        }
    }
    sort_graded(&mut basis);
    basis
}

fn sort_graded(v: &mut [(usize, usize)]) {
    v.sort_by_key(|&(m, n)| (m + n, n));
}

/// Condition-number threshold beyond which an element configuration is
/// rejected as non-unisolvent.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Maximum duality residual max |sigma_r(B_s) - delta_rs| accepted after
/// construction.
pub const DUALITY_TOL: f64 = 1e-10;

/// A constructed element: DOF layout, basis and shape-function coefficients.
#[derive(Debug, Clone)]
pub struct ElementDef {
    degree: usize,
    moment_set: MomentSet,
    edge_rule: EdgeRule,
    edge_nodes: Vec<f64>,
    basis: Vec<(usize, usize)>,
    dofs: Vec<DofKind>,
    moments: Vec<(usize, usize)>,
    /// Column r holds the monomial coefficients of shape function B_r.
    shape_coeffs: DMatrix<f64>,
    condition_number: f64,
}

impl ElementDef {
    /// Standard element of the given spatial order (order = N + 1, so
    /// orders 3..=7 correspond to reconstruction degrees 2..=6).
    pub fn new(order: usize, moment_set: MomentSet, edge_rule: EdgeRule) -> Result<Self, GenAfError> {
        if order < 3 {
            return Err(GenAfError::InvalidConfig(format!(
                "spatial order must be at least 3, got {order}"
            )));
        }
        let degree = order - 1;
        let basis = build_basis(degree, moment_set);
        let moments = moment_set.indices(degree);
        let edge_nodes = alt_edge_nodes(degree - 1, edge_rule);
        Self::from_parts(degree, moment_set, edge_rule, edge_nodes, basis, moments)
    }

    /// Build from explicit parts. Used for the standard spaces and for
    /// deliberately broken configurations in unisolvence tests.
    pub fn from_parts(
        degree: usize,
        moment_set: MomentSet,
        edge_rule: EdgeRule,
        edge_nodes: Vec<f64>,
        basis: Vec<(usize, usize)>,
        moments: Vec<(usize, usize)>,
    ) -> Result<Self, GenAfError> {
        if edge_nodes.len() != degree - 1 {
            return Err(GenAfError::InvalidConfig(format!(
                "degree {degree} needs {} edge points per edge, got {}",
                degree - 1,
                edge_nodes.len()
            )));
        }
        let mut dofs = Vec::with_capacity(4 * degree + moments.len());
        for n in 0..4 {
            dofs.push(DofKind::Node(n));
        }
        for edge in 0..4 {
            for a in 0..edge_nodes.len() {
                dofs.push(DofKind::EdgePoint { edge, a });
            }
        }
        for &(k, l) in &moments {
            dofs.push(DofKind::Moment { k, l });
        }
        if dofs.len() != basis.len() {
            return Err(GenAfError::InvalidConfig(format!(
                "{} DOFs against {} basis monomials; unisolvence needs equal counts",
                dofs.len(),
                basis.len()
            )));
        }

        let mut el = ElementDef {
            degree,
            moment_set,
            edge_rule,
            edge_nodes,
            basis,
            dofs,
            moments,
            shape_coeffs: DMatrix::zeros(0, 0),
            condition_number: f64::NAN,
        };
        let v = el.assemble_vandermonde();
        let (coeffs, cond) = solve_shape_coefficients(&v)?;
        el.shape_coeffs = coeffs;
        el.condition_number = cond;
        Ok(el)
    }

    /// Generalized Vandermonde matrix V[r][s] = sigma_r(x^{m_s} y^{n_s}).
    pub fn assemble_vandermonde(&self) -> DMatrix<f64> {
        let n = self.dofs.len();
        let mut v = DMatrix::zeros(n, n);
        for (r, dof) in self.dofs.iter().enumerate() {
            for (s, &(m, mn)) in self.basis.iter().enumerate() {
                v[(r, s)] = match *dof {
                    DofKind::Node(_) | DofKind::EdgePoint { .. } => {
                        let (x, y) = self.dof_location(*dof).unwrap();
                        x.powi(m as i32) * y.powi(mn as i32)
                    }
                    DofKind::Moment { k, l } => moment_functional(k, l, m, mn),
                };
            }
        }
        v
    }

    /// Reference location of a point DOF; None for moments.
    pub fn dof_location(&self, dof: DofKind) -> Option<(f64, f64)> {
        match dof {
            DofKind::Node(0) => Some((-0.5, -0.5)),
            DofKind::Node(1) => Some((0.5, -0.5)),
            DofKind::Node(2) => Some((0.5, 0.5)),
            DofKind::Node(3) => Some((-0.5, 0.5)),
            DofKind::Node(_) => None,
            DofKind::EdgePoint { edge, a } => {
                let xi = self.edge_nodes[a];
                match edge {
                    0 => Some((xi, -0.5)),
                    1 => Some((0.5, xi)),
                    2 => Some((xi, 0.5)),
                    3 => Some((-0.5, xi)),
                    _ => None,
                }
            }
            DofKind::Moment { .. } => None,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Spatial order N + 1.
    pub fn order(&self) -> usize {
        self.degree + 1
    }

    pub fn moment_set(&self) -> MomentSet {
        self.moment_set
    }

    pub fn edge_rule(&self) -> EdgeRule {
        self.edge_rule
    }

    pub fn edge_nodes(&self) -> &[f64] {
        &self.edge_nodes
    }

    /// Points per edge, N - 1.
    pub fn n_edge_points(&self) -> usize {
        self.edge_nodes.len()
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn dofs(&self) -> &[DofKind] {
        &self.dofs
    }

    pub fn moments(&self) -> &[(usize, usize)] {
        &self.moments
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.len()
    }

    pub fn n_moments(&self) -> usize {
        self.moments.len()
    }

    /// DOFs stored per cell under the ownership convention: 1 node,
    /// 2(N-1) edge points, all moments.
    pub fn n_owned_per_cell(&self) -> usize {
        1 + 2 * self.n_edge_points() + self.n_moments()
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn shape_coeffs(&self) -> &DMatrix<f64> {
        &self.shape_coeffs
    }

    /// Values of all shape functions at a reference point.
    pub fn eval_shapes_into(&self, xi: f64, eta: f64, out: &mut [f64]) {
        let n = self.n_dofs();
        debug_assert_eq!(out.len(), n);
        out.fill(0.0);
        for (s, &(m, mn)) in self.basis.iter().enumerate() {
            let mono = xi.powi(m as i32) * eta.powi(mn as i32);
            for r in 0..n {
                out[r] += self.shape_coeffs[(s, r)] * mono;
            }
        }
    }

    pub fn eval_shapes(&self, xi: f64, eta: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_dofs()];
        self.eval_shapes_into(xi, eta, &mut out);
        out
    }

    /// Reference-coordinate gradients of all shape functions.
    pub fn eval_shape_grads_into(&self, xi: f64, eta: f64, gx: &mut [f64], gy: &mut [f64]) {
        let n = self.n_dofs();
        debug_assert_eq!(gx.len(), n);
        debug_assert_eq!(gy.len(), n);
        gx.fill(0.0);
        gy.fill(0.0);
        for (s, &(m, mn)) in self.basis.iter().enumerate() {
            let dmx = if m == 0 {
                0.0
            } else {
                m as f64 * xi.powi(m as i32 - 1) * eta.powi(mn as i32)
            };
            let dmy = if mn == 0 {
                0.0
            } else {
                mn as f64 * xi.powi(m as i32) * eta.powi(mn as i32 - 1)
            };
            for r in 0..n {
                gx[r] += self.shape_coeffs[(s, r)] * dmx;
                gy[r] += self.shape_coeffs[(s, r)] * dmy;
            }
        }
    }

    pub fn eval_shape_grads(&self, xi: f64, eta: f64) -> (Vec<f64>, Vec<f64>) {
        let mut gx = vec![0.0; self.n_dofs()];
        let mut gy = vec![0.0; self.n_dofs()];
        self.eval_shape_grads_into(xi, eta, &mut gx, &mut gy);
        (gx, gy)
    }

    /// DOF functionals of a scalar function on the reference cell: direct
    /// evaluation for points, tensor Gauss quadrature for moments.
    pub fn dof_functionals_of(&self, f: impl Fn(f64, f64) -> f64, quad_points: usize) -> Vec<f64> {
        let rule = QuadratureRule::gauss_legendre(quad_points);
        self.dofs
            .iter()
            .map(|&dof| match dof {
                DofKind::Node(_) | DofKind::EdgePoint { .. } => {
                    let (x, y) = self.dof_location(dof).unwrap();
                    f(x, y)
                }
                DofKind::Moment { k, l } => {
                    let mut acc = 0.0;
                    for (&xp, &wx) in rule.points.iter().zip(&rule.weights) {
                        for (&yp, &wy) in rule.points.iter().zip(&rule.weights) {
                            acc += wx * wy * xp.powi(k as i32) * yp.powi(l as i32) * f(xp, yp);
                        }
                    }
                    moment_normalization(k, l) * acc
                }
            })
            .collect()
    }
}

/// Invert the Vandermonde matrix, with a condition-number gate and one
/// Newton refinement pass so the duality residual meets [`DUALITY_TOL`].
fn solve_shape_coefficients(v: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64), GenAfError> {
    let n = v.nrows();
    let svd = v.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = smax / smin;
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(GenAfError::UnisolvenceFailure(format!(
            "generalized Vandermonde is numerically singular (condition number {cond:.3e})"
        )));
    }
    let mut c = v.clone().lu().try_inverse().ok_or_else(|| {
        GenAfError::UnisolvenceFailure("LU factorization found a zero pivot".into())
    })?;
    for _ in 0..2 {
        let residual = DMatrix::identity(n, n) - v * &c;
        if residual.amax() <= 1e-14 {
            break;
        }
        c = &c + &c * residual;
    }
    let residual = (DMatrix::identity(n, n) - v * &c).amax();
    if residual > DUALITY_TOL {
        return Err(GenAfError::UnisolvenceFailure(format!(
            "duality residual {residual:.3e} exceeds {DUALITY_TOL:.0e}"
        )));
    }
    Ok((c, cond))
}

/// The known non-unisolvent configurations rejected by the construction:
/// P^N with two moments removed for N = 5, 6, and P^4 extended by
/// {x^3 y^2, x^2 y^3} for N = 4.
pub fn pruned_negative_parts(degree: usize) -> Option<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    match degree {
        4 => {
            let mut basis: Vec<(usize, usize)> = Vec::new();
            for m in 0..=4 {
                for n in 0..=4 - m {
                    basis.push((m, n));
                }
            }
            basis.push((3, 2));
            basis.push((2, 3));
            sort_graded(&mut basis);
            Some((basis, MomentSet::Triangle.indices(4)))
        }
        5 | 6 => {
            let mut basis: Vec<(usize, usize)> = Vec::new();
            for m in 0..=degree {
                for n in 0..=degree - m {
                    basis.push((m, n));
                }
            }
            sort_graded(&mut basis);
            let moments = MomentSet::Triangle
                .indices(degree)
                .into_iter()
                .filter(|&(k, l)| (k, l) != (degree - 4, 0) && (k, l) != (0, degree - 4))
                .collect();
            Some((basis, moments))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn all_orders() -> Vec<(usize, MomentSet)> {
        let mut v = Vec::new();
        for order in 3..=7 {
            v.push((order, MomentSet::Triangle));
            v.push((order, MomentSet::Tensor));
        }
        v
    }

    #[test]
    fn gauss_edge_node_values() {
        let one = gauss_edge_nodes(1);
        assert!(one[0].abs() < 1e-15);
        let two = gauss_edge_nodes(2);
        assert!((two[0] + 0.28867513459481287).abs() < 1e-12);
        assert!((two[1] - 0.28867513459481287).abs() < 1e-12);
        let three = gauss_edge_nodes(3);
        assert!((three[0] + 0.3872983346207417).abs() < 1e-12);
        assert!(three[1].abs() < 1e-15);
        assert!((three[2] - 0.3872983346207417).abs() < 1e-12);
    }

    #[test]
    fn alt_edge_node_values() {
        let u = alt_edge_nodes(3, EdgeRule::Uniform);
        assert_eq!(u.len(), 3);
        assert!((u[0] + 0.25).abs() < 1e-15);
        assert!(u[1].abs() < 1e-15);
        assert!((u[2] - 0.25).abs() < 1e-15);
        let u1 = alt_edge_nodes(1, EdgeRule::Uniform);
        assert!(u1[0].abs() < 1e-15);

        // Interior nodes of the 4-point Lobatto rule: +-sqrt(5)/10.
        let l = alt_edge_nodes(2, EdgeRule::Lobatto);
        let expected = 5.0f64.sqrt() / 10.0;
        assert!((l[0] + expected).abs() < 1e-12);
        assert!((l[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn basis_counts_and_n2_contents() {
        let b = build_basis(2, MomentSet::Triangle);
        let expected = vec![
            (0, 0),
            (1, 0),
            (0, 1),
            (2, 0),
            (1, 1),
            (0, 2),
            (2, 1),
            (1, 2),
            (2, 2),
        ];
        assert_eq!(b, expected);
        assert_eq!(build_basis(6, MomentSet::Triangle).len(), 30);
        assert_eq!(build_basis(3, MomentSet::Tensor).len(), 16);
    }

    #[test]
    fn dof_totals_match_table() {
        // order -> total DOFs for the triangle moment set.
        let expected = [(3, 9), (4, 13), (5, 17), (6, 23), (7, 30)];
        for (order, total) in expected {
            let el = ElementDef::new(order, MomentSet::Triangle, EdgeRule::Gauss).unwrap();
            assert_eq!(el.n_dofs(), total);
            assert_eq!(el.n_dofs(), 4 * el.degree() + el.n_moments());
        }
    }

    #[test]
    fn moment_counts() {
        assert_eq!(MomentSet::Triangle.indices(2).len(), 1);
        assert_eq!(MomentSet::Triangle.indices(3).len(), 1);
        assert_eq!(MomentSet::Triangle.indices(4).len(), 1);
        assert_eq!(MomentSet::Triangle.indices(5).len(), 3);
        assert_eq!(MomentSet::Triangle.indices(6).len(), 6);
        for degree in 2..=6 {
            assert_eq!(MomentSet::Tensor.indices(degree).len(), (degree - 1).pow(2));
        }
    }

    #[test]
    fn moment_functional_examples() {
        assert!((moment_functional(0, 0, 0, 0) - 1.0).abs() < 1e-15);
        assert!((moment_functional(1, 0, 1, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(moment_functional(1, 0, 0, 0), 0.0);
        assert_eq!(moment_functional(0, 1, 2, 0), 0.0);
        // Against numerical quadrature.
        let rule = QuadratureRule::gauss_legendre(8);
        for (k, l, m, n) in [(2, 1, 2, 3), (0, 2, 4, 0), (3, 0, 1, 1)] {
            let mut acc = 0.0;
            for (&x, &wx) in rule.points.iter().zip(&rule.weights) {
                for (&y, &wy) in rule.points.iter().zip(&rule.weights) {
                    acc += wx
                        * wy
                        * x.powi((k + m) as i32)
                        * y.powi((l + n) as i32);
                }
            }
            acc *= moment_normalization(k, l);
            assert!((moment_functional(k, l, m, n) - acc).abs() < 1e-14);
        }
    }

    #[test]
    fn duality_and_conditioning_all_orders() {
        for (order, ms) in all_orders() {
            let el = ElementDef::new(order, ms, EdgeRule::Gauss).unwrap();
            let v = el.assemble_vandermonde();
            let residual = (DMatrix::identity(el.n_dofs(), el.n_dofs()) - v * el.shape_coeffs())
                .amax();
            assert!(
                residual <= DUALITY_TOL,
                "order {order} {ms:?}: duality residual {residual:.3e}"
            );
            assert!(el.condition_number() < CONDITION_LIMIT);
        }
    }

    #[test]
    fn vandermonde_node_row_for_constant() {
        let el = ElementDef::new(3, MomentSet::Triangle, EdgeRule::Gauss).unwrap();
        let v = el.assemble_vandermonde();
        // Row of Node(0) against the constant monomial.
        assert!((v[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cell_average_shape_function_n2() {
        let el = ElementDef::new(3, MomentSet::Triangle, EdgeRule::Gauss).unwrap();
        let avg_idx = el
            .dofs()
            .iter()
            .position(|d| matches!(d, DofKind::Moment { k: 0, l: 0 }))
            .unwrap();
        // B_avg vanishes at all 8 point DOF locations and integrates to 1.
        for &dof in el.dofs() {
            if let Some((x, y)) = el.dof_location(dof) {
                let vals = el.eval_shapes(x, y);
                assert!(vals[avg_idx].abs() < 1e-12);
            }
        }
        let rule = QuadratureRule::gauss_legendre(6);
        let mut acc = 0.0;
        for (&x, &wx) in rule.points.iter().zip(&rule.weights) {
            for (&y, &wy) in rule.points.iter().zip(&rule.weights) {
                acc += wx * wy * el.eval_shapes(x, y)[avg_idx];
            }
        }
        assert!((acc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_shapes_are_cardinal() {
        let el = ElementDef::new(5, MomentSet::Triangle, EdgeRule::Gauss).unwrap();
        for (r, &dr) in el.dofs().iter().enumerate() {
            let Some((x, y)) = el.dof_location(dr) else { continue };
            let vals = el.eval_shapes(x, y);
            for (s, &ds) in el.dofs().iter().enumerate() {
                if el.dof_location(ds).is_none() {
                    continue;
                }
                let expected = if r == s { 1.0 } else { 0.0 };
                assert!(
                    (vals[s] - expected).abs() < 1e-10,
                    "B_{s} at location of DOF {r}"
                );
            }
        }
    }

    #[test]
    fn interpolation_exact_on_reconstruction_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (order, ms) in all_orders() {
            let el = ElementDef::new(order, ms, EdgeRule::Gauss).unwrap();
            for _ in 0..10 {
                let coeffs: Vec<f64> =
                    (0..el.n_dofs()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let basis = el.basis().to_vec();
                let v = move |x: f64, y: f64| {
                    basis
                        .iter()
                        .zip(&coeffs)
                        .map(|(&(m, n), c)| c * x.powi(m as i32) * y.powi(n as i32))
                        .sum::<f64>()
                };
                let scale = 1.0 + v(0.3, -0.2).abs();
                let dofs = el.dof_functionals_of(&v, el.degree() + 4);
                for _ in 0..8 {
                    let x = rng.random_range(-0.5..0.5);
                    let y = rng.random_range(-0.5..0.5);
                    let shapes = el.eval_shapes(x, y);
                    let interp: f64 = shapes.iter().zip(&dofs).map(|(p, d)| p * d).sum();
                    assert!(
                        (interp - v(x, y)).abs() < 1e-9 * scale,
                        "order {order} {ms:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn gradient_of_x2y_is_exact() {
        for (order, ms) in all_orders() {
            let el = ElementDef::new(order, ms, EdgeRule::Gauss).unwrap();
            let dofs = el.dof_functionals_of(|x, y| x * x * y, el.degree() + 4);
            let (x, y) = (0.17, -0.31);
            let (gx, gy) = el.eval_shape_grads(x, y);
            let dx: f64 = gx.iter().zip(&dofs).map(|(g, d)| g * d).sum();
            let dy: f64 = gy.iter().zip(&dofs).map(|(g, d)| g * d).sum();
            assert!((dx - 2.0 * x * y).abs() < 1e-10);
            assert!((dy - x * x).abs() < 1e-10);
        }
    }

    #[test]
    fn edge_nodes_symmetric_and_shapes_mirror() {
        let el = ElementDef::new(6, MomentSet::Triangle, EdgeRule::Gauss).unwrap();
        let m = el.n_edge_points();
        for a in 0..m {
            assert!((el.edge_nodes()[a] + el.edge_nodes()[m - 1 - a]).abs() < 1e-14);
        }
        // Mirror x -> -x maps bottom-edge point a to point m-1-a; their shape
        // functions must be reflections of one another.
        let idx = |edge: usize, a: usize| {
            el.dofs()
                .iter()
                .position(|d| matches!(d, DofKind::EdgePoint { edge: e, a: aa } if *e == edge && *aa == a))
                .unwrap()
        };
        for a in 0..m {
            let r = idx(0, a);
            let r_mirror = idx(0, m - 1 - a);
            for &(x, y) in &[(0.21, -0.37), (-0.44, 0.12), (0.05, 0.49)] {
                let v1 = el.eval_shapes(x, y)[r];
                let v2 = el.eval_shapes(-x, y)[r_mirror];
                assert!((v1 - v2).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pruned_configurations_fail_unisolvence() {
        for degree in [4usize, 5, 6] {
            let (basis, moments) = pruned_negative_parts(degree).unwrap();
            let res = ElementDef::from_parts(
                degree,
                MomentSet::Triangle,
                EdgeRule::Gauss,
                gauss_edge_nodes(degree - 1),
                basis,
                moments,
            );
            assert!(
                matches!(res, Err(GenAfError::UnisolvenceFailure(_))),
                "degree {degree} should be rejected"
            );
        }
    }

    #[test]
    fn order_condition_p_n_subset() {
        // Interpolation reproduces every monomial of total degree <= N.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (order, ms) in all_orders() {
            let el = ElementDef::new(order, ms, EdgeRule::Gauss).unwrap();
            let n = el.degree();
            for m in 0..=n {
                for mn in 0..=(n - m) {
                    let f = move |x: f64, y: f64| x.powi(m as i32) * y.powi(mn as i32);
                    let dofs = el.dof_functionals_of(f, n + 4);
                    let x = rng.random_range(-0.5..0.5);
                    let y = rng.random_range(-0.5..0.5);
                    let shapes = el.eval_shapes(x, y);
                    let interp: f64 = shapes.iter().zip(&dofs).map(|(p, d)| p * d).sum();
                    assert!((interp - f(x, y)).abs() < 1e-9);
                }
            }
        }
    }
}
