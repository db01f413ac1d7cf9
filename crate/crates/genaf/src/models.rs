//! Hyperbolic model equations: linear advection, linear acoustics and the
//! compressible Euler equations.
//!
//! Each system exposes its flux and the upwind-split Jacobians
//! J^{+-} = T diag(lambda^{+-}) T^{-1} consumed by the point updates. The
//! y-direction quantities of acoustics and Euler follow from the x-direction
//! ones by conjugation with the permutation that swaps the two velocity
//! components.

/// Largest number of conserved components over all models.
pub const MAX_COMPONENTS: usize = 4;

type Mat = [[f64; MAX_COMPONENTS]; MAX_COMPONENTS];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// q_t + a . grad q = 0.
    Advection { ax: f64, ay: f64 },
    /// Components (p, vx, vy); symmetric system p_t + c div v = 0,
    /// v_t + c grad p = 0.
    Acoustics { c: f64 },
    /// Conserved components (rho, rho u, rho v, E) with ideal-gas pressure
    /// p = (gamma - 1)(E - rho |v|^2 / 2).
    Euler { gamma: f64 },
}

impl Model {
    pub fn n_components(&self) -> usize {
        match self {
            Model::Advection { .. } => 1,
            Model::Acoustics { .. } => 3,
            Model::Euler { .. } => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Advection { .. } => "advection",
            Model::Acoustics { .. } => "acoustics",
            Model::Euler { .. } => "euler",
        }
    }

    pub fn component_names(&self) -> &'static [&'static str] {
        match self {
            Model::Advection { .. } => &["q"],
            Model::Acoustics { .. } => &["p", "vx", "vy"],
            Model::Euler { .. } => &["rho", "rho_u", "rho_v", "energy"],
        }
    }

    /// Admissibility of a pointwise state; Err carries a description for
    /// the caller to attach cell indices to.
    pub fn check_state(&self, q: &[f64]) -> Result<(), String> {
        if let Model::Euler { gamma } = *self {
            let (rho, _, _, p) = euler_primitives(q, gamma);
            if !(rho > 0.0) {
                return Err(format!("non-positive density {rho:.6e}"));
            }
            if !(p > 0.0) {
                return Err(format!("non-positive pressure {p:.6e}"));
            }
        }
        Ok(())
    }

    pub fn flux_x(&self, q: &[f64], out: &mut [f64]) {
        match *self {
            Model::Advection { ax, .. } => out[0] = ax * q[0],
            Model::Acoustics { c } => {
                out[0] = c * q[1];
                out[1] = c * q[0];
                out[2] = 0.0;
            }
            Model::Euler { gamma } => {
                let (rho, u, v, p) = euler_primitives(q, gamma);
                out[0] = rho * u;
                out[1] = rho * u * u + p;
                out[2] = rho * u * v;
                out[3] = u * (q[3] + p);
            }
        }
    }

    pub fn flux_y(&self, q: &[f64], out: &mut [f64]) {
        match *self {
            Model::Advection { ay, .. } => out[0] = ay * q[0],
            _ => {
                // f^y(q) = P f^x(P q) with P the velocity swap.
                let n = self.n_components();
                let mut qs = [0.0; MAX_COMPONENTS];
                qs[..n].copy_from_slice(q);
                qs.swap(1, 2);
                let mut fs = [0.0; MAX_COMPONENTS];
                self.flux_x(&qs[..n], &mut fs[..n]);
                fs.swap(1, 2);
                out.copy_from_slice(&fs[..n]);
            }
        }
    }

    /// Largest |eigenvalue| of the x-direction Jacobian at q.
    pub fn max_abs_speed_x(&self, q: &[f64]) -> f64 {
        match *self {
            Model::Advection { ax, .. } => ax.abs(),
            Model::Acoustics { c } => c.abs(),
            Model::Euler { gamma } => {
                let (rho, u, _, p) = euler_primitives(q, gamma);
                u.abs() + (gamma * p / rho).sqrt()
            }
        }
    }

    pub fn max_abs_speed_y(&self, q: &[f64]) -> f64 {
        match *self {
            Model::Advection { ay, .. } => ay.abs(),
            Model::Acoustics { c } => c.abs(),
            Model::Euler { gamma } => {
                let (rho, _, v, p) = euler_primitives(q, gamma);
                v.abs() + (gamma * p / rho).sqrt()
            }
        }
    }

    /// out += J^{+,x}(q) d_plus + J^{-,x}(q) d_minus.
    pub fn accumulate_upwind_x(&self, q: &[f64], d_plus: &[f64], d_minus: &[f64], out: &mut [f64]) {
        match *self {
            Model::Advection { ax, .. } => {
                out[0] += ax.max(0.0) * d_plus[0] + ax.min(0.0) * d_minus[0];
            }
            Model::Acoustics { c } => {
                let h = 0.5 * c;
                out[0] += h * (d_plus[0] + d_plus[1]) + h * (d_minus[1] - d_minus[0]);
                out[1] += h * (d_plus[0] + d_plus[1]) + h * (d_minus[0] - d_minus[1]);
            }
            Model::Euler { gamma } => {
                let eig = EulerEig::at(q, gamma);
                let wp = eig.to_characteristic(d_plus);
                let wm = eig.to_characteristic(d_minus);
                let mut w = [0.0; 4];
                for k in 0..4 {
                    w[k] = eig.lam[k].max(0.0) * wp[k] + eig.lam[k].min(0.0) * wm[k];
                }
                eig.from_characteristic_add(&w, out);
            }
        }
    }

    /// out += J^{+,y}(q) d_plus + J^{-,y}(q) d_minus.
    pub fn accumulate_upwind_y(&self, q: &[f64], d_plus: &[f64], d_minus: &[f64], out: &mut [f64]) {
        match *self {
            Model::Advection { ay, .. } => {
                out[0] += ay.max(0.0) * d_plus[0] + ay.min(0.0) * d_minus[0];
            }
            _ => {
                let n = self.n_components();
                let mut qs = [0.0; MAX_COMPONENTS];
                let mut dp = [0.0; MAX_COMPONENTS];
                let mut dm = [0.0; MAX_COMPONENTS];
                qs[..n].copy_from_slice(q);
                dp[..n].copy_from_slice(d_plus);
                dm[..n].copy_from_slice(d_minus);
                qs.swap(1, 2);
                dp.swap(1, 2);
                dm.swap(1, 2);
                let mut tmp = [0.0; MAX_COMPONENTS];
                self.accumulate_upwind_x(&qs[..n], &dp[..n], &dm[..n], &mut tmp[..n]);
                tmp.swap(1, 2);
                for s in 0..n {
                    out[s] += tmp[s];
                }
            }
        }
    }

    /// Explicit split Jacobians in the x direction, row-major.
    pub fn upwind_jacobians_x(&self, q: &[f64]) -> (Mat, Mat) {
        let n = self.n_components();
        let mut plus = [[0.0; MAX_COMPONENTS]; MAX_COMPONENTS];
        let mut minus = [[0.0; MAX_COMPONENTS]; MAX_COMPONENTS];
        let mut e = [0.0; MAX_COMPONENTS];
        let zero = [0.0; MAX_COMPONENTS];
        for j in 0..n {
            e[j] = 1.0;
            let mut col = [0.0; MAX_COMPONENTS];
            self.accumulate_upwind_x(q, &e[..n], &zero[..n], &mut col[..n]);
            for i in 0..n {
                plus[i][j] = col[i];
            }
            let mut col = [0.0; MAX_COMPONENTS];
            self.accumulate_upwind_x(q, &zero[..n], &e[..n], &mut col[..n]);
            for i in 0..n {
                minus[i][j] = col[i];
            }
            e[j] = 0.0;
        }
        (plus, minus)
    }

    pub fn upwind_jacobians_y(&self, q: &[f64]) -> (Mat, Mat) {
        let n = self.n_components();
        let mut plus = [[0.0; MAX_COMPONENTS]; MAX_COMPONENTS];
        let mut minus = [[0.0; MAX_COMPONENTS]; MAX_COMPONENTS];
        let mut e = [0.0; MAX_COMPONENTS];
        let zero = [0.0; MAX_COMPONENTS];
        for j in 0..n {
            e[j] = 1.0;
            let mut col = [0.0; MAX_COMPONENTS];
            self.accumulate_upwind_y(q, &e[..n], &zero[..n], &mut col[..n]);
            for i in 0..n {
                plus[i][j] = col[i];
            }
            let mut col = [0.0; MAX_COMPONENTS];
            self.accumulate_upwind_y(q, &zero[..n], &e[..n], &mut col[..n]);
            for i in 0..n {
                minus[i][j] = col[i];
            }
            e[j] = 0.0;
        }
        (plus, minus)
    }
}

/// Primitive variables (rho, u, v, p) from the conserved state.
pub fn euler_primitives(q: &[f64], gamma: f64) -> (f64, f64, f64, f64) {
    let rho = q[0];
    let u = q[1] / rho;
    let v = q[2] / rho;
    let p = (gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v));
    (rho, u, v, p)
}

/// x-direction eigensystem of the Euler Jacobian at a fixed state.
struct EulerEig {
    lam: [f64; 4],
    u: f64,
    v: f64,
    c: f64,
    h: f64,
    b1: f64,
    b2: f64,
}

impl EulerEig {
    fn at(q: &[f64], gamma: f64) -> Self {
        let (rho, u, v, p) = euler_primitives(q, gamma);
        let c = (gamma * p / rho).sqrt();
        let h = (q[3] + p) / rho;
        let b2 = (gamma - 1.0) / (c * c);
        let b1 = 0.5 * b2 * (u * u + v * v);
        EulerEig {
            lam: [u - c, u, u, u + c],
            u,
            v,
            c,
            h,
            b1,
            b2,
        }
    }

    /// w = L d, rows of L being the left eigenvectors.
    fn to_characteristic(&self, d: &[f64]) -> [f64; 4] {
        let (u, v, c, b1, b2) = (self.u, self.v, self.c, self.b1, self.b2);
        [
            0.5 * ((b1 + u / c) * d[0] - (b2 * u + 1.0 / c) * d[1] - b2 * v * d[2] + b2 * d[3]),
            (1.0 - b1) * d[0] + b2 * u * d[1] + b2 * v * d[2] - b2 * d[3],
            -v * d[0] + d[2],
            0.5 * ((b1 - u / c) * d[0] - (b2 * u - 1.0 / c) * d[1] - b2 * v * d[2] + b2 * d[3]),
        ]
    }

    /// out += R w, columns of R being the right eigenvectors.
    fn from_characteristic_add(&self, w: &[f64; 4], out: &mut [f64]) {
        let (u, v, c, h) = (self.u, self.v, self.c, self.h);
        let ke = 0.5 * (u * u + v * v);
        out[0] += w[0] + w[1] + w[3];
        out[1] += (u - c) * w[0] + u * w[1] + (u + c) * w[3];
        out[2] += v * (w[0] + w[1] + w[3]) + w[2];
        out[3] += (h - u * c) * w[0] + ke * w[1] + v * w[2] + (h + u * c) * w[3];
    }
}
