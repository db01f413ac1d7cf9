//! Third-order strong-stability-preserving Runge-Kutta time integration in
//! Shu-Osher form, generic over the state container.

use num_complex::Complex64;

/// Minimal vector-space interface the integrator needs.
pub trait StateVector: Clone {
    fn scale(&mut self, factor: f64);
    /// self += a * other.
    fn axpy(&mut self, a: f64, other: &Self);
}

impl StateVector for Vec<f64> {
    fn scale(&mut self, factor: f64) {
        for x in self.iter_mut() {
            *x *= factor;
        }
    }

    fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.len(), other.len());
        for (x, y) in self.iter_mut().zip(other) {
            *x += a * y;
        }
    }
}

impl StateVector for Vec<Complex64> {
    fn scale(&mut self, factor: f64) {
        for x in self.iter_mut() {
            *x *= factor;
        }
    }

    fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.len(), other.len());
        for (x, y) in self.iter_mut().zip(other) {
            *x += a * y;
        }
    }
}

/// One SSP-RK3 step of the autonomous system u' = rhs(u):
///   u1 = u + dt L(u)
///   u2 = 3/4 u + 1/4 (u1 + dt L(u1))
///   u  = 1/3 u + 2/3 (u2 + dt L(u2)).
pub fn ssp_rk3_step<S, E>(
    state: &mut S,
    dt: f64,
    rhs: &mut impl FnMut(&S) -> Result<S, E>,
) -> Result<(), E>
where
    S: StateVector,
{
    let k = rhs(state)?;
    let mut stage = state.clone();
    stage.axpy(dt, &k);

    let k = rhs(&stage)?;
    stage.axpy(dt, &k);
    stage.scale(0.25);
    stage.axpy(0.75, state);

    let k = rhs(&stage)?;
    stage.axpy(dt, &k);
    stage.scale(2.0 / 3.0);
    stage.axpy(1.0 / 3.0, state);

    *state = stage;
    Ok(())
}

/// Stability function of the scheme: G(z) = 1 + z + z^2/2 + z^3/6.
pub fn stability_function(z: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) + z + z * z / 2.0 + z * z * z / 6.0
}
