//! Benchmark problems, error norms, the convergence driver and run
//! orchestration.
//!
//! Four standard setups: a diagonally advected cone, a narrow advected
//! Gaussian used for the convergence study, an acoustic standing wave with
//! exact solution, and the stationary Gresho vortex for the Euler
//! equations. The Gresho velocity is the standard vortex about (0.5, 0.5),
//! v = omega(r)/r * (-(y-0.5), x-0.5); transcriptions that drop the
//! parenthesis around (y-0.5) do not describe a vortex and are not used.

use crate::element::ElementDef;
use crate::error::GenAfError;
use crate::field::{init_quadrature_points, project, Field};
use crate::mesh::GridSpec;
use crate::models::Model;
use crate::operator::SemiDiscreteOp;
use crate::quadrature::QuadratureRule;
use crate::timestepper::ssp_rk3_step;
use std::time::Instant;

/// Experiment time-step constants per order (diagonal-advection Courant
/// bounds; the seventh-order runs use 0.085).
pub fn default_cfl(order: usize) -> f64 {
    match order {
        3 => 0.27,
        4 => 0.20,
        5 => 0.17,
        6 => 0.12,
        _ => 0.085,
    }
}

/// The built-in benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    /// Cone of radius 0.2 advected diagonally, a = (1,1), on [0,1]^2.
    Cone,
    /// Narrow Gaussian advected diagonally; the convergence test case.
    Gaussian,
    /// Standing pressure wave, c = 1, on [-1,1]^2; exact solution known.
    Acoustics,
    /// Stationary Gresho vortex, gamma = 1.4, M = 0.1, on [0,1]^2.
    Gresho,
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Cone => "cone",
            Problem::Gaussian => "gaussian",
            Problem::Acoustics => "acoustics",
            Problem::Gresho => "gresho",
        }
    }

    pub fn from_name(name: &str) -> Option<Problem> {
        match name {
            "cone" => Some(Problem::Cone),
            "gaussian" => Some(Problem::Gaussian),
            "acoustics" => Some(Problem::Acoustics),
            "gresho" => Some(Problem::Gresho),
            _ => None,
        }
    }

    pub fn model(&self) -> Model {
        match self {
            Problem::Cone | Problem::Gaussian => Model::Advection { ax: 1.0, ay: 1.0 },
            Problem::Acoustics => Model::Acoustics { c: 1.0 },
            Problem::Gresho => Model::Euler { gamma: 1.4 },
        }
    }

    pub fn grid(&self, nx: usize, ny: usize) -> GridSpec {
        match self {
            Problem::Acoustics => GridSpec::new(nx, ny, -1.0, 1.0, -1.0, 1.0),
            _ => GridSpec::unit_square(nx, ny),
        }
    }

    pub fn default_t_end(&self) -> f64 {
        match self {
            Problem::Cone | Problem::Acoustics => 5.0,
            Problem::Gaussian => 0.1,
            Problem::Gresho => 1.0,
        }
    }

    /// Initial state in conserved variables.
    pub fn initial(&self, x: f64, y: f64, out: &mut [f64]) {
        match self {
            Problem::Cone => out[0] = cone_profile(x, y),
            Problem::Gaussian => out[0] = gaussian_profile(x, y),
            Problem::Acoustics => acoustics_exact(1.0, 0.0, x, y, out),
            Problem::Gresho => gresho_init(x, y, 0.1, 1.4, out),
        }
    }

    /// Exact solution at time t where available (all four problems have
    /// one: advection translates, acoustics oscillates, Gresho is steady).
    pub fn exact(&self, t: f64, x: f64, y: f64, out: &mut [f64]) {
        match self {
            Problem::Cone => out[0] = cone_profile(wrap_unit(x - t), wrap_unit(y - t)),
            Problem::Gaussian => out[0] = gaussian_profile(wrap_unit(x - t), wrap_unit(y - t)),
            Problem::Acoustics => acoustics_exact(1.0, t, x, y, out),
            Problem::Gresho => gresho_init(x, y, 0.1, 1.4, out),
        }
    }

    pub fn project_initial(&self, grid: &GridSpec, element: &ElementDef) -> Field {
        project(grid, element, self.model().n_components(), &|x, y, out| {
            self.initial(x, y, out)
        })
    }
}

fn wrap_unit(x: f64) -> f64 {
    x.rem_euclid(1.0)
}

fn cone_profile(x: f64, y: f64) -> f64 {
    let r = ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt();
    (1.0 - r / 0.2).max(0.0)
}

fn gaussian_profile(x: f64, y: f64) -> f64 {
    0.8 + (-((x - 0.5) / 0.05).powi(2) - ((y - 0.5) / 0.05).powi(2)).exp()
}

/// Standing-wave solution of p_t + c div v = 0, v_t + c grad p = 0 with
/// p(0) = (sin 2 pi x + sin 2 pi y)/c and v(0) = 0.
pub fn acoustics_exact(c: f64, t: f64, x: f64, y: f64, out: &mut [f64]) {
    let wt = 2.0 * std::f64::consts::PI * c * t;
    let sx = (2.0 * std::f64::consts::PI * x).sin();
    let sy = (2.0 * std::f64::consts::PI * y).sin();
    let cx = (2.0 * std::f64::consts::PI * x).cos();
    let cy = (2.0 * std::f64::consts::PI * y).cos();
    out[0] = wt.cos() * (sx + sy) / c;
    out[1] = -wt.sin() * cx / c;
    out[2] = -wt.sin() * cy / c;
}

/// Gresho vortex in conserved variables: rho = 1, angular speed 5r then
/// 2 - 5r then 0, with the matching three-branch pressure.
pub fn gresho_init(x: f64, y: f64, mach: f64, gamma: f64, out: &mut [f64]) {
    let dx = x - 0.5;
    let dy = y - 0.5;
    let r = (dx * dx + dy * dy).sqrt();
    let p0 = 1.0 / (gamma * mach * mach) - 0.5;
    let (vx, vy, p) = if r < 0.2 {
        (-5.0 * dy, 5.0 * dx, p0 + 12.5 * r * r)
    } else if r < 0.4 {
        let s = (2.0 - 5.0 * r) / r;
        (
            -s * dy,
            s * dx,
            p0 + 4.0 * (5.0 * r).ln() + 4.0 - 20.0 * r + 12.5 * r * r,
        )
    } else {
        (0.0, 0.0, p0 + 4.0 * (2.0f64).ln() - 2.0)
    };
    out[0] = 1.0;
    out[1] = vx;
    out[2] = vy;
    out[3] = p / (gamma - 1.0) + 0.5 * (vx * vx + vy * vy);
}

/// cfl * min(dx, dy) / (largest per-axis signal speed over the cell-average
/// states).
pub fn compute_dt(
    model: Model,
    field: &Field,
    grid: &GridSpec,
    cfl: f64,
) -> Result<f64, GenAfError> {
    let mut speed = 0.0f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let avg = field.moment(i, j, 0);
            model
                .check_state(avg)
                .map_err(|detail| GenAfError::InadmissibleState { i, j, detail })?;
            speed = speed
                .max(model.max_abs_speed_x(avg))
                .max(model.max_abs_speed_y(avg));
        }
    }
    if speed <= 1e-300 {
        return Err(GenAfError::ZeroSignalSpeed);
    }
    Ok(cfl * grid.dx.min(grid.dy) / speed)
}

/// Step-size and termination settings for `integrate`.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub cfl: f64,
    pub t_end: f64,
    pub max_steps: usize,
}

/// Per-step record passed to the observer.
pub struct StepInfo {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub masses: Vec<f64>,
    pub max_abs: f64,
}

pub struct RunResult {
    pub field: Field,
    pub steps: usize,
    pub t: f64,
    pub wall_seconds: f64,
}

/// March SSP-RK3 steps until t_end (the last step is clipped), recomputing
/// dt from the current state each step.
pub fn integrate(
    op: &SemiDiscreteOp,
    mut field: Field,
    ctrl: &StepControl,
    mut observer: impl FnMut(&StepInfo),
) -> Result<RunResult, GenAfError> {
    let start = Instant::now();
    let grid = *op.grid();
    let mut t = 0.0;
    let mut step = 0;
    while t < ctrl.t_end * (1.0 - 1e-12) {
        if step >= ctrl.max_steps {
            return Err(GenAfError::InvalidConfig(format!(
                "reached {step} steps at t = {t:.6} before t_end = {}",
                ctrl.t_end
            )));
        }
        let dt = compute_dt(op.model(), &field, &grid, ctrl.cfl)?.min(ctrl.t_end - t);
        ssp_rk3_step(&mut field, dt, &mut |u| op.semidiscrete_rhs(u))?;
        step += 1;
        t += dt;
        if !field.all_finite() {
            return Err(GenAfError::NonFiniteState { t, step });
        }
        observer(&StepInfo {
            step,
            t,
            dt,
            masses: field.masses(grid.dx, grid.dy),
            max_abs: field.max_abs(),
        });
    }
    Ok(RunResult {
        field,
        steps: step,
        t,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Assemble everything for a problem and march to t_end.
#[allow(clippy::too_many_arguments)]
pub fn run_problem(
    problem: Problem,
    element: &ElementDef,
    nx: usize,
    ny: usize,
    cfl: f64,
    t_end: f64,
    max_steps: usize,
    observer: impl FnMut(&StepInfo),
) -> Result<RunResult, GenAfError> {
    let grid = problem.grid(nx, ny);
    let op = SemiDiscreteOp::new(element, &grid, problem.model())?;
    let field = problem.project_initial(&grid, element);
    integrate(
        &op,
        field,
        &StepControl {
            cfl,
            t_end,
            max_steps,
        },
        observer,
    )
}

/// L1 norm of the cell-average error, per component: sum over cells of
/// |avg - exact avg| dx dy, with the exact averages computed by the same
/// quadrature as the initial projection.
pub fn l1_error_cell_averages(
    field: &Field,
    grid: &GridSpec,
    element: &ElementDef,
    exact: &dyn Fn(f64, f64, &mut [f64]),
) -> Vec<f64> {
    let nc = field.n_comp();
    let rule = QuadratureRule::gauss_legendre(init_quadrature_points(element));
    let mut err = vec![0.0; nc];
    let mut avg = vec![0.0; nc];
    let mut val = vec![0.0; nc];
    let area = grid.dx * grid.dy;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            avg.fill(0.0);
            for (q1, &xi) in rule.points.iter().enumerate() {
                for (q2, &eta) in rule.points.iter().enumerate() {
                    let w = rule.weights[q1] * rule.weights[q2];
                    let (x, y) = grid.from_reference(i, j, xi, eta);
                    exact(x, y, &mut val);
                    for s in 0..nc {
                        avg[s] += w * val[s];
                    }
                }
            }
            let num = field.moment(i, j, 0);
            for s in 0..nc {
                err[s] += (num[s] - avg[s]).abs() * area;
            }
        }
    }
    err
}

/// One grid of a convergence study.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub h: f64,
    pub e_l1: f64,
    /// log(e_prev/e) / log(h_prev/h); None on the first row.
    pub eoc: Option<f64>,
}

/// Gaussian-advection convergence to t = 0.1 over a decreasing grid
/// sequence. The time step uses cfl(h) = cfl(h_1) (h/h_1)^{(N-2)/3} so that
/// the RK3 error stays below the spatial one.
pub fn run_convergence(
    element: &ElementDef,
    grids: &[usize],
    base_cfl: f64,
) -> Result<Vec<ConvergenceRow>, GenAfError> {
    let problem = Problem::Gaussian;
    let t_end = problem.default_t_end();
    let exponent = (element.degree() as f64 - 2.0) / 3.0;
    let h1 = 1.0 / grids[0] as f64;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(grids.len());
    for &n in grids {
        let h = 1.0 / n as f64;
        let cfl = base_cfl * (h / h1).powf(exponent);
        let result = run_problem(problem, element, n, n, cfl, t_end, 1_000_000, |_| {})?;
        let grid = problem.grid(n, n);
        let e = l1_error_cell_averages(&result.field, &grid, element, &|x, y, out| {
            problem.exact(t_end, x, y, out)
        })[0];
        let eoc = rows
            .last()
            .map(|prev| (prev.e_l1 / e).ln() / (prev.h / h).ln());
        rows.push(ConvergenceRow { h, e_l1: e, eoc });
    }
    Ok(rows)
}

/// One bin of a radial scatter reduction.
#[derive(Debug, Clone, Copy)]
pub struct RadialBin {
    pub r_mid: f64,
    pub mean: f64,
    pub count: usize,
}

/// Bin the cell-average momentum norm by cell-center radius about
/// (0.5, 0.5). Returns the bin means and the raw scatter.
pub fn radial_profile(
    field: &Field,
    grid: &GridSpec,
    n_bins: usize,
) -> (Vec<RadialBin>, Vec<(f64, f64)>) {
    let mut scatter = Vec::with_capacity(grid.n_cells());
    let mut r_max = 0.0f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = grid.cell_center(i, j);
            let r = ((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt();
            let avg = field.moment(i, j, 0);
            let mom = (avg[1] * avg[1] + avg[2] * avg[2]).sqrt();
            scatter.push((r, mom));
            r_max = r_max.max(r);
        }
    }
    let width = r_max / n_bins as f64;
    let mut bins: Vec<RadialBin> = (0..n_bins)
        .map(|b| RadialBin {
            r_mid: (b as f64 + 0.5) * width,
            mean: 0.0,
            count: 0,
        })
        .collect();
    for &(r, v) in &scatter {
        let b = ((r / width) as usize).min(n_bins - 1);
        bins[b].mean += v;
        bins[b].count += 1;
    }
    for bin in &mut bins {
        if bin.count > 0 {
            bin.mean /= bin.count as f64;
        }
    }
    (bins, scatter)
}
