//! Spectral stability analysis of the linear semi-discrete operator.
//!
//! For scalar advection the RHS is linear, d/dt q = A q, and A is assembled
//! densely by probing every unit DOF vector. The spectrum decides stability
//! of the spatial discretization (Re lambda <= 0 plus semisimplicity of the
//! near-imaginary eigenvalues); combined with the RK3 stability region
//! S = {z : |G(z)| <= 1} it yields maximal time steps and (cfl_x, cfl_y)
//! stability maps.

use crate::element::{EdgeRule, ElementDef, MomentSet};
use crate::error::GenAfError;
use crate::mesh::GridSpec;
use crate::models::Model;
use crate::operator::SemiDiscreteOp;
use crate::timestepper::stability_function;
use ndarray::Array2;
use ndarray_linalg::{Eig, EigVals, SVD};
use num_complex::Complex64;
use std::collections::HashMap;

/// Absolute clustering radius for repeated eigenvalues.
const CLUSTER_RADIUS: f64 = 1e-9;
/// Relative singular-value cutoff below which a cluster's eigenvector block
/// is considered rank-deficient (defective eigenvalue).
const BLOCK_RANK_CUT: f64 = 1e-8;
/// Round-off slack on |G(z)| <= 1 at the region boundary.
const RK3_SLACK: f64 = 1e-12;

/// Dense advection operator with its assembly metadata.
pub struct OperatorMatrix {
    pub matrix: Array2<f64>,
    pub order: usize,
    pub moment_set: MomentSet,
    pub edge_rule: EdgeRule,
    pub nx: usize,
    pub ny: usize,
    pub ax: f64,
    pub ay: f64,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn norm_fro(&self) -> f64 {
        self.matrix.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Eigenvalue diagnostics of an assembled operator.
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub max_real: f64,
    pub matrix_norm: f64,
    /// Absolute half-width of the near-imaginary band that was checked for
    /// semisimplicity.
    pub eps: f64,
    pub near_imaginary: usize,
    pub clusters: usize,
    pub defective_clusters: usize,
    pub semisimple: bool,
    pub eigenvector_rank: usize,
    pub dim: usize,
}

impl SpectrumReport {
    pub fn diagonalizable(&self) -> bool {
        self.eigenvector_rank == self.dim
    }
}

/// Tolerance on Re(lambda) per order, matched to round-off growth of the
/// larger systems.
pub fn default_eps(order: usize) -> f64 {
    match order {
        3..=5 => 5e-13,
        6 => 1e-12,
        _ => 5e-12,
    }
}

/// Time-step scan increment per order.
pub fn default_increment(order: usize) -> f64 {
    if order <= 5 {
        1e-4
    } else {
        5e-5
    }
}

/// Assemble A for advection with a = (cos theta, sin theta).
pub fn assemble_operator(
    element: &ElementDef,
    grid: &GridSpec,
    theta: f64,
) -> Result<OperatorMatrix, GenAfError> {
    assemble_advection(element, grid, theta.cos(), theta.sin())
}

/// Assemble A for advection with an arbitrary velocity, column by column:
/// column k is the RHS of the k-th unit DOF vector.
pub fn assemble_advection(
    element: &ElementDef,
    grid: &GridSpec,
    ax: f64,
    ay: f64,
) -> Result<OperatorMatrix, GenAfError> {
    let op = SemiDiscreteOp::new(element, grid, Model::Advection { ax, ay })?;
    let mut probe = op.new_field();
    let dim = probe.len();
    let mut matrix = Array2::zeros((dim, dim));
    for k in 0..dim {
        probe.data_mut()[k] = 1.0;
        let rhs = op.semidiscrete_rhs(&probe)?;
        for (r, &v) in rhs.data().iter().enumerate() {
            matrix[(r, k)] = v;
        }
        probe.data_mut()[k] = 0.0;
    }
    Ok(OperatorMatrix {
        matrix,
        order: element.order(),
        moment_set: element.moment_set(),
        edge_rule: element.edge_rule(),
        nx: grid.nx,
        ny: grid.ny,
        ax,
        ay,
    })
}

/// Eigenvalues only; cheaper than a full `spectrum` when the eigenvector
/// diagnostics are not needed.
pub fn eigenvalues(a: &OperatorMatrix) -> Result<Vec<Complex64>, GenAfError> {
    let vals = a
        .matrix
        .eigvals()
        .map_err(|e| GenAfError::EigensolverFailure(e.to_string()))?;
    Ok(vals.to_vec())
}

/// Full eigendecomposition with semisimplicity and diagonalizability
/// diagnostics; the near-imaginary band is default_eps(order) scaled by the
/// Frobenius norm.
pub fn spectrum(a: &OperatorMatrix) -> Result<SpectrumReport, GenAfError> {
    let eps = default_eps(a.order) * a.norm_fro().max(1.0);
    spectrum_with_eps(a, eps)
}

pub fn spectrum_with_eps(a: &OperatorMatrix, eps: f64) -> Result<SpectrumReport, GenAfError> {
    let dim = a.dim();
    let (vals, vecs) = a
        .matrix
        .eig()
        .map_err(|e| GenAfError::EigensolverFailure(e.to_string()))?;
    let eigenvalues: Vec<Complex64> = vals.to_vec();
    let max_real = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);

    // Diagonalizability: numerical rank of the full eigenvector matrix.
    let (_, sv, _) = vecs
        .svd(false, false)
        .map_err(|e| GenAfError::EigensolverFailure(e.to_string()))?;
    let rank_tol = dim as f64 * f64::EPSILON * sv[0];
    let eigenvector_rank = sv.iter().filter(|&&s| s > rank_tol).count();

    // Cluster the near-imaginary eigenvalues and compare each cluster's size
    // with the rank of its eigenvector block.
    let near: Vec<usize> = (0..dim)
        .filter(|&i| eigenvalues[i].re.abs() < eps)
        .collect();
    let m = near.len();
    let mut cluster_of = vec![usize::MAX; m];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        if cluster_of[i] != usize::MAX {
            continue;
        }
        let c = clusters.len();
        cluster_of[i] = c;
        let mut members = vec![i];
        let mut stack = vec![i];
        while let Some(p) = stack.pop() {
            for q in 0..m {
                if cluster_of[q] == usize::MAX
                    && (eigenvalues[near[p]] - eigenvalues[near[q]]).norm() <= CLUSTER_RADIUS
                {
                    cluster_of[q] = c;
                    members.push(q);
                    stack.push(q);
                }
            }
        }
        clusters.push(members);
    }
    let mut defective_clusters = 0;
    for members in &clusters {
        if members.len() < 2 {
            continue;
        }
        let mut block = Array2::<Complex64>::zeros((dim, members.len()));
        for (col, &p) in members.iter().enumerate() {
            block.column_mut(col).assign(&vecs.column(near[p]));
        }
        let (_, bs, _) = block
            .svd(false, false)
            .map_err(|e| GenAfError::EigensolverFailure(e.to_string()))?;
        let cut = BLOCK_RANK_CUT * bs[0];
        let rank = bs.iter().filter(|&&s| s > cut).count();
        if rank < members.len() {
            defective_clusters += 1;
        }
    }

    Ok(SpectrumReport {
        max_real,
        matrix_norm: a.norm_fro(),
        eps,
        near_imaginary: m,
        clusters: clusters.len(),
        defective_clusters,
        semisimple: defective_clusters == 0,
        eigenvector_rank,
        dim,
        eigenvalues,
    })
}

/// Whether z lies in the RK3 stability region (with round-off slack).
pub fn rk3_contains(z: Complex64) -> bool {
    stability_function(z).norm() <= 1.0 + RK3_SLACK
}

/// Largest dt on the lattice {increment, 2 increment, ...} with
/// lambda_i dt inside the RK3 region for every eigenvalue. Returns 0 when
/// the first lattice point already fails and infinity for a (numerically)
/// zero spectrum.
pub fn max_stable_dt(eigenvalues: &[Complex64], increment: f64) -> f64 {
    let lam_max = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if lam_max <= 1e-14 {
        return f64::INFINITY;
    }
    // |z| <= 2.5127... everywhere in the RK3 region bounds the scan.
    let kmax = (2.6 / (lam_max * increment)).ceil() as usize + 2;
    let mut stable_steps = 0;
    while stable_steps < kmax {
        let dt = (stable_steps + 1) as f64 * increment;
        if !eigenvalues.iter().all(|&z| rk3_contains(z * dt)) {
            break;
        }
        stable_steps += 1;
    }
    stable_steps as f64 * increment
}

/// One entry of a CFL stability map.
#[derive(Debug, Clone, Copy)]
pub struct CflPoint {
    pub cfl_x: f64,
    pub cfl_y: f64,
    pub stable: bool,
}

/// Classify each (cfl_x, cfl_y) pair: with dt fixed the pair corresponds to
/// the velocity (cfl_x dx, cfl_y dy), and by linearity of A in the velocity
/// only one eigensolve per direction is needed; the magnitude scales the
/// spectrum.
pub fn cfl_region_scan(
    element: &ElementDef,
    grid: &GridSpec,
    pairs: &[(f64, f64)],
) -> Result<Vec<CflPoint>, GenAfError> {
    let mut cache: HashMap<(i64, i64), Vec<Complex64>> = HashMap::new();
    let mut out = Vec::with_capacity(pairs.len());
    for &(cfl_x, cfl_y) in pairs {
        let ax = cfl_x * grid.dx;
        let ay = cfl_y * grid.dy;
        let scale = ax.hypot(ay);
        let stable = if scale <= 1e-15 {
            true
        } else {
            let key = (quantize(ax / scale), quantize(ay / scale));
            if !cache.contains_key(&key) {
                let a = assemble_advection(element, grid, ax / scale, ay / scale)?;
                cache.insert(key, eigenvalues(&a)?);
            }
            cache[&key].iter().all(|&z| rk3_contains(z * scale))
        };
        out.push(CflPoint {
            cfl_x,
            cfl_y,
            stable,
        });
    }
    Ok(out)
}

fn quantize(x: f64) -> i64 {
    (x * 1e12).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn element(order: usize, rule: EdgeRule) -> ElementDef {
        ElementDef::new(order, MomentSet::Triangle, rule).unwrap()
    }

    fn synthetic(matrix: Array2<f64>) -> OperatorMatrix {
        OperatorMatrix {
            matrix,
            order: 3,
            moment_set: MomentSet::Triangle,
            edge_rule: EdgeRule::Gauss,
            nx: 1,
            ny: 1,
            ax: 1.0,
            ay: 0.0,
        }
    }

    /// Greedy multiset matching distance between two spectra.
    fn spectra_mismatch(a: &[Complex64], b: &[Complex64]) -> f64 {
        assert_eq!(a.len(), b.len());
        let mut used = vec![false; b.len()];
        let mut worst = 0.0f64;
        for &za in a {
            let (best, d) = b
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, &zb)| (i, (za - zb).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            used[best] = true;
            worst = worst.max(d);
        }
        worst
    }

    #[test]
    fn dimension_and_constant_kernel() {
        let el = element(3, EdgeRule::Gauss);
        let grid = GridSpec::unit_square(3, 3);
        let a = assemble_operator(&el, &grid, 0.0).unwrap();
        assert_eq!(a.dim(), 36);
        let ones = ndarray::Array1::from_elem(36, 1.0);
        let img = a.matrix.dot(&ones);
        let res = img.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        assert!(res <= 1e-11 * a.norm_fro(), "constant not in kernel: {res}");
    }

    #[test]
    fn probe_columns_reproduce_rhs() {
        let el = element(4, EdgeRule::Gauss);
        let grid = GridSpec::unit_square(3, 3);
        let theta = 0.7f64;
        let a = assemble_operator(&el, &grid, theta).unwrap();
        let op = SemiDiscreteOp::new(
            &el,
            &grid,
            Model::Advection {
                ax: theta.cos(),
                ay: theta.sin(),
            },
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mut v = op.new_field();
            for x in v.data_mut() {
                *x = rng.random_range(-1.0..1.0);
            }
            let direct = op.semidiscrete_rhs(&v).unwrap();
            let via_matrix = a.matrix.dot(&ndarray::ArrayView1::from(v.data()));
            let scale = a.norm_fro() * v.max_abs();
            let diff = via_matrix
                .iter()
                .zip(direct.data())
                .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
            assert!(diff <= 1e-12 * scale, "{diff:.3e} vs scale {scale:.3e}");
        }
    }

    #[test]
    fn theta_symmetry_mirrors_spectrum() {
        let el = element(3, EdgeRule::Gauss);
        let grid = GridSpec::unit_square(3, 3);
        let s1 = eigenvalues(&assemble_operator(&el, &grid, 0.3).unwrap()).unwrap();
        let s2 = eigenvalues(
            &assemble_operator(&el, &grid, std::f64::consts::FRAC_PI_2 - 0.3).unwrap(),
        )
        .unwrap();
        let scale = s1.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        assert!(spectra_mismatch(&s1, &s2) <= 1e-8 * scale);
    }

    #[test]
    fn eigenvalues_scale_inversely_with_h() {
        let el = element(3, EdgeRule::Gauss);
        let coarse = eigenvalues(
            &assemble_operator(&el, &GridSpec::unit_square(3, 3), 0.9).unwrap(),
        )
        .unwrap();
        let fine = eigenvalues(
            &assemble_operator(&el, &GridSpec::unit_square(6, 6), 0.9).unwrap(),
        )
        .unwrap();
        let scale = fine.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        // Halving h doubles every coarse eigenvalue; the coarse modes embed
        // into the refined grid's.
        for &z in &coarse {
            let d = fine
                .iter()
                .map(|&w| (w - 2.0 * z).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(d <= 1e-7 * scale, "2z = {:?} missing ({d:.2e})", 2.0 * z);
        }
    }

    #[test]
    fn gauss_stable_uniform_unstable_order_five() {
        let grid = GridSpec::unit_square(5, 5);
        let gauss = assemble_operator(&element(5, EdgeRule::Gauss), &grid, 0.0).unwrap();
        let su = spectrum(&gauss).unwrap();
        assert!(su.max_real <= 1e-10 * gauss.norm_fro(), "{:.3e}", su.max_real);
        let uni = assemble_operator(&element(5, EdgeRule::Uniform), &grid, 0.0).unwrap();
        let eu = eigenvalues(&uni).unwrap();
        let max_re = eu.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        assert!(max_re > 1e-8, "uniform edges unexpectedly stable: {max_re:.3e}");
    }

    #[test]
    fn real_axis_dt_and_lattice_scaling() {
        let one = [Complex64::new(-1.0, 0.0)];
        let dt = max_stable_dt(&one, 1e-4);
        assert!((dt - 2.5127).abs() < 2e-4, "{dt}");
        let doubled = [Complex64::new(-2.0, 0.0)];
        let dt2 = max_stable_dt(&doubled, 1e-4);
        assert!((dt2 - 0.5 * dt).abs() <= 1e-4);
        assert_eq!(max_stable_dt(&[], 1e-4), f64::INFINITY);
        assert_eq!(max_stable_dt(&[Complex64::new(0.0, 0.0)], 1e-4), f64::INFINITY);
        // Far outside the region at the very first lattice point.
        assert_eq!(max_stable_dt(&[Complex64::new(1e9, 0.0)], 1e-4), 0.0);
    }

    #[test]
    fn jordan_block_reported_defective() {
        let a = synthetic(array![[0.0, 1.0], [0.0, 0.0]]);
        let rep = spectrum_with_eps(&a, 1e-6).unwrap();
        assert_eq!(rep.near_imaginary, 2);
        assert!(!rep.semisimple);
        assert_eq!(rep.defective_clusters, 1);
        assert!(!rep.diagonalizable());
    }

    #[test]
    fn rotation_matrix_semisimple() {
        let a = synthetic(array![[0.0, 1.0], [-1.0, 0.0]]);
        let rep = spectrum_with_eps(&a, 1e-6).unwrap();
        assert_eq!(rep.near_imaginary, 2);
        assert!(rep.semisimple);
        assert!(rep.diagonalizable());
        assert!(rep.max_real.abs() < 1e-12);
    }

    #[test]
    fn zero_operator_stable_with_unbounded_dt() {
        let a = synthetic(Array2::zeros((4, 4)));
        let rep = spectrum(&a).unwrap();
        assert!(rep.semisimple);
        assert!(rep.max_real.abs() < 1e-14);
        assert_eq!(max_stable_dt(&rep.eigenvalues, 1e-4), f64::INFINITY);
    }

    #[test]
    fn cfl_scan_classifies_origin_and_blowup() {
        let el = element(3, EdgeRule::Gauss);
        let grid = GridSpec::unit_square(3, 3);
        let pts = cfl_region_scan(
            &el,
            &grid,
            &[(0.0, 0.0), (0.05, 0.05), (0.05, 0.0), (3.0, 3.0)],
        )
        .unwrap();
        assert!(pts[0].stable);
        assert!(pts[1].stable);
        assert!(pts[2].stable);
        assert!(!pts[3].stable);
    }
}
