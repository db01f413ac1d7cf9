//! Command-line driver: single runs, convergence studies, spectra, time-step
//! bounds, CFL maps and element dumps, all emitted as CSV plus a manifest of
//! the resolved parameters.

use clap::{Args, Parser, Subcommand};
use genaf::element::{DofKind, EdgeRule, ElementDef, MomentSet};
use genaf::harness::{
    self, l1_error_cell_averages, radial_profile, run_convergence, run_problem, Problem,
};
use genaf::mesh::GridSpec;
use genaf::stability::{
    assemble_operator, cfl_region_scan, eigenvalues, max_stable_dt, spectrum,
};
use genaf::GenAfError;
use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "genaf", version, about = "High-order active flux solver on periodic 2-D grids")]
struct Cli {
    /// Flat key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation; writes snapshot.csv and steplog.csv.
    Run(RunArgs),
    /// Grid-refinement study; writes converge.csv.
    Converge(ConvergeArgs),
    /// Eigenvalues of the advection operator; writes spectrum.csv.
    Spectrum(SpectrumArgs),
    /// Largest stable RK3 time step for a given advection angle.
    Dtmax(DtmaxArgs),
    /// Stability map over (cfl_x, cfl_y); writes cflmap.csv.
    Cflmap(CflmapArgs),
    /// DOF table and conditioning of the reference element.
    ElementDump(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Spatial order of accuracy (3 to 7).
    #[arg(long)]
    order: Option<usize>,
    /// Moment set: tri | tensor.
    #[arg(long)]
    moments: Option<String>,
    /// Edge point distribution: gauss | lobatto | uniform.
    #[arg(long)]
    edges: Option<String>,
    /// Cells in x.
    #[arg(long)]
    nx: Option<usize>,
    /// Cells in y.
    #[arg(long)]
    ny: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Problem: cone | gaussian | acoustics | gresho.
    #[arg(long)]
    problem: Option<String>,
    /// Courant number; defaults to the per-order experiment value.
    #[arg(long)]
    cfl: Option<f64>,
    /// Final time; defaults to the problem's standard value.
    #[arg(long)]
    t_end: Option<f64>,
    /// Abort threshold on the number of steps.
    #[arg(long)]
    max_steps: Option<usize>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated grid sizes, e.g. 32,64,96.
    #[arg(long)]
    grids: Option<String>,
    /// Courant number on the coarsest grid.
    #[arg(long)]
    cfl: Option<f64>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Advection angle in radians.
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args)]
struct DtmaxArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Advection angle in radians.
    #[arg(long)]
    theta: Option<f64>,
    /// Time-step lattice increment.
    #[arg(long)]
    increment: Option<f64>,
}

#[derive(Args)]
struct CflmapArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Upper end of the scanned cfl range in both directions.
    #[arg(long)]
    cfl_max: Option<f64>,
    /// Lattice spacing of the scan.
    #[arg(long)]
    cfl_step: Option<f64>,
}

enum CliError {
    Solver(GenAfError),
    Io(std::io::Error),
    Config(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Solver(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Config(_) => "config",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<GenAfError> for CliError {
    fn from(e: GenAfError) -> Self {
        CliError::Solver(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io(io),
            other => CliError::Config(format!("csv: {other:?}")),
        }
    }
}

/// Key=value settings from --config, consulted when a flag is absent.
struct Config(HashMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Config, CliError> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::Config(format!(
                        "{}:{}: expected key=value, got {line:?}",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Config(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                CliError::Config(format!("config key {key}: cannot parse {raw:?}"))
            }),
        }
    }
}

/// Flag value, then config value, then default.
fn resolve<T: FromStr>(
    flag: Option<T>,
    cfg: &Config,
    key: &str,
    default: T,
) -> Result<T, CliError> {
    Ok(flag.or(cfg.get(key)?).unwrap_or(default))
}

fn resolve_opt<T: FromStr>(flag: Option<T>, cfg: &Config, key: &str) -> Result<Option<T>, CliError> {
    Ok(flag.or(cfg.get(key)?))
}

struct Setup {
    element: ElementDef,
    order: usize,
    moments: String,
    edges: String,
    nx: usize,
    ny: usize,
    out_dir: PathBuf,
}

fn setup(common: &CommonArgs, cfg: &Config, default_n: usize) -> Result<Setup, CliError> {
    let order = resolve(common.order, cfg, "order", 3)?;
    let moments = resolve(common.moments.clone(), cfg, "moments", "tri".into())?;
    let edges = resolve(common.edges.clone(), cfg, "edges", "gauss".into())?;
    let nx = resolve(common.nx, cfg, "nx", default_n)?;
    let ny = resolve(common.ny, cfg, "ny", nx)?;
    let out_dir = resolve(common.out_dir.clone(), cfg, "out_dir", PathBuf::from("out"))?;
    let moment_set = match moments.as_str() {
        "tri" | "triangle" => MomentSet::Triangle,
        "tensor" => MomentSet::Tensor,
        other => return Err(CliError::Config(format!("unknown moment set {other:?}"))),
    };
    let edge_rule = match edges.as_str() {
        "gauss" => EdgeRule::Gauss,
        "lobatto" => EdgeRule::Lobatto,
        "uniform" => EdgeRule::Uniform,
        other => return Err(CliError::Config(format!("unknown edge rule {other:?}"))),
    };
    let element = ElementDef::new(order, moment_set, edge_rule)?;
    fs::create_dir_all(&out_dir)?;
    Ok(Setup {
        element,
        order,
        moments,
        edges,
        nx,
        ny,
        out_dir,
    })
}

/// Resolved parameters written next to every output.
struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    fn new(command: &str, s: &Setup) -> Manifest {
        let mut m = Manifest { lines: Vec::new() };
        m.put("command", command);
        m.put("build_id", option_env!("GENAF_BUILD_ID").unwrap_or("untracked"));
        m.put("version", env!("CARGO_PKG_VERSION"));
        m.put("order", s.order);
        m.put("moments", &s.moments);
        m.put("edges", &s.edges);
        m.put("nx", s.nx);
        m.put("ny", s.ny);
        m.put("dofs_per_cell", s.element.n_owned_per_cell());
        m.put("condition_number", format!("{:.6e}", s.element.condition_number()));
        m
    }

    fn put(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    fn write(&self, out_dir: &Path) -> Result<(), CliError> {
        let mut text = String::new();
        for (k, v) in &self.lines {
            text.push_str(k);
            text.push('=');
            text.push_str(v);
            text.push('\n');
        }
        fs::write(out_dir.join("manifest.txt"), text)?;
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.kind(), e);
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Run(args) => cmd_run(&args, &cfg),
        Command::Converge(args) => cmd_converge(&args, &cfg),
        Command::Spectrum(args) => cmd_spectrum(&args, &cfg),
        Command::Dtmax(args) => cmd_dtmax(&args, &cfg),
        Command::Cflmap(args) => cmd_cflmap(&args, &cfg),
        Command::ElementDump(args) => cmd_element_dump(&args, &cfg),
    }
}

fn cmd_run(args: &RunArgs, cfg: &Config) -> Result<(), CliError> {
    let s = setup(&args.common, cfg, 32)?;
    let problem_name: String = resolve(args.problem.clone(), cfg, "problem", "cone".into())?;
    let problem = Problem::from_name(&problem_name)
        .ok_or_else(|| CliError::Config(format!("unknown problem {problem_name:?}")))?;
    let cfl = resolve_opt(args.cfl, cfg, "cfl")?.unwrap_or_else(|| harness::default_cfl(s.order));
    let t_end = resolve_opt(args.t_end, cfg, "t_end")?.unwrap_or_else(|| problem.default_t_end());
    let max_steps = resolve(args.max_steps, cfg, "max_steps", 10_000_000)?;

    let mut manifest = Manifest::new("run", &s);
    manifest.put("problem", problem.name());
    manifest.put("cfl", cfl);
    manifest.put("t_end", t_end);

    let mut steplog = csv::Writer::from_path(s.out_dir.join("steplog.csv"))?;
    let model = problem.model();
    let mut header = vec!["step".to_string(), "t".to_string(), "dt".to_string()];
    for name in model.component_names() {
        header.push(format!("mass_{name}"));
    }
    header.push("max_abs".to_string());
    steplog.write_record(&header)?;
    let result = run_problem(
        problem,
        &s.element,
        s.nx,
        s.ny,
        cfl,
        t_end,
        max_steps,
        |info| {
            let mut rec = vec![
                info.step.to_string(),
                format!("{:.12e}", info.t),
                format!("{:.12e}", info.dt),
            ];
            for m in &info.masses {
                rec.push(format!("{m:.15e}"));
            }
            rec.push(format!("{:.6e}", info.max_abs));
            let _ = steplog.write_record(&rec);
        },
    )?;
    steplog.flush()?;

    let grid = problem.grid(s.nx, s.ny);
    let mut snap = csv::Writer::from_path(s.out_dir.join("snapshot.csv"))?;
    let mut header = vec!["i".to_string(), "j".to_string(), "x".to_string(), "y".to_string()];
    for name in model.component_names() {
        header.push(name.to_string());
    }
    snap.write_record(&header)?;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = grid.cell_center(i, j);
            let mut rec = vec![
                i.to_string(),
                j.to_string(),
                format!("{x:.12e}"),
                format!("{y:.12e}"),
            ];
            for v in result.field.moment(i, j, 0) {
                rec.push(format!("{v:.15e}"));
            }
            snap.write_record(&rec)?;
        }
    }
    snap.flush()?;

    let errors = l1_error_cell_averages(&result.field, &grid, &s.element, &|x, y, out| {
        problem.exact(result.t, x, y, out)
    });
    for (name, e) in model.component_names().iter().zip(&errors) {
        manifest.put(&format!("l1_error_{name}"), format!("{e:.6e}"));
    }

    if problem == Problem::Gresho {
        let (bins, scatter) = radial_profile(&result.field, &grid, 50);
        let mut w = csv::Writer::from_path(s.out_dir.join("radial_bins.csv"))?;
        w.write_record(["r", "momentum_mean", "count"])?;
        for b in &bins {
            w.write_record(&[
                format!("{:.8e}", b.r_mid),
                format!("{:.8e}", b.mean),
                b.count.to_string(),
            ])?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(s.out_dir.join("radial_scatter.csv"))?;
        w.write_record(["r", "momentum"])?;
        for (r, v) in &scatter {
            w.write_record(&[format!("{r:.8e}"), format!("{v:.8e}")])?;
        }
        w.flush()?;
    }

    manifest.put("steps", result.steps);
    manifest.put("final_t", format!("{:.12e}", result.t));
    manifest.put("wall_seconds", format!("{:.3}", result.wall_seconds));
    manifest.write(&s.out_dir)?;
    println!(
        "run complete: problem={} order={} grid={}x{} steps={} t={:.6} wall={:.2}s",
        problem.name(),
        s.order,
        s.nx,
        s.ny,
        result.steps,
        result.t,
        result.wall_seconds
    );
    Ok(())
}

fn cmd_converge(args: &ConvergeArgs, cfg: &Config) -> Result<(), CliError> {
    let s = setup(&args.common, cfg, 32)?;
    let grids_raw: String = resolve(args.grids.clone(), cfg, "grids", "32,64,96".into())?;
    let grids: Vec<usize> = grids_raw
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad grid size {t:?}")))
        })
        .collect::<Result<_, _>>()?;
    if grids.is_empty() {
        return Err(CliError::Config("empty grid list".into()));
    }
    let cfl = resolve_opt(args.cfl, cfg, "cfl")?.unwrap_or_else(|| harness::default_cfl(s.order));

    let rows = run_convergence(&s.element, &grids, cfl)?;
    let mut w = csv::Writer::from_path(s.out_dir.join("converge.csv"))?;
    w.write_record(["h", "e_l1", "eoc"])?;
    for row in &rows {
        w.write_record(&[
            format!("{:.10e}", row.h),
            format!("{:.6e}", row.e_l1),
            row.eoc.map(|e| format!("{e:.4}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;

    let mut manifest = Manifest::new("converge", &s);
    manifest.put("grids", &grids_raw);
    manifest.put("cfl", cfl);
    manifest.write(&s.out_dir)?;
    for row in &rows {
        println!(
            "h={:<12.6e} e_l1={:<12.6e} eoc={}",
            row.h,
            row.e_l1,
            row.eoc.map(|e| format!("{e:.3}")).unwrap_or_else(|| "-".into())
        );
    }
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs, cfg: &Config) -> Result<(), CliError> {
    let s = setup(&args.common, cfg, 10)?;
    let theta = resolve(args.theta, cfg, "theta", 0.0)?;
    let grid = GridSpec::unit_square(s.nx, s.ny);
    let a = assemble_operator(&s.element, &grid, theta)?;
    let report = spectrum(&a)?;

    let mut w = csv::Writer::from_path(s.out_dir.join("spectrum.csv"))?;
    w.write_record(["re", "im"])?;
    for z in &report.eigenvalues {
        w.write_record(&[format!("{:.15e}", z.re), format!("{:.15e}", z.im)])?;
    }
    w.flush()?;

    let mut manifest = Manifest::new("spectrum", &s);
    manifest.put("theta", theta);
    manifest.put("dim", report.dim);
    manifest.put("matrix_norm", format!("{:.6e}", report.matrix_norm));
    manifest.put("max_real", format!("{:.6e}", report.max_real));
    manifest.put("eps", format!("{:.3e}", report.eps));
    manifest.put("stable", report.max_real <= report.eps);
    manifest.put("near_imaginary", report.near_imaginary);
    manifest.put("clusters", report.clusters);
    manifest.put("defective_clusters", report.defective_clusters);
    manifest.put("semisimple", report.semisimple);
    manifest.put("eigenvector_rank", report.eigenvector_rank);
    manifest.put("diagonalizable", report.diagonalizable());
    manifest.write(&s.out_dir)?;
    println!(
        "spectrum: dim={} max_real={:.3e} stable={} semisimple={} rank={}/{}",
        report.dim,
        report.max_real,
        report.max_real <= report.eps,
        report.semisimple,
        report.eigenvector_rank,
        report.dim
    );
    Ok(())
}

fn cmd_dtmax(args: &DtmaxArgs, cfg: &Config) -> Result<(), CliError> {
    let s = setup(&args.common, cfg, 10)?;
    let theta = resolve(args.theta, cfg, "theta", std::f64::consts::FRAC_PI_4)?;
    let increment = resolve_opt(args.increment, cfg, "increment")?
        .unwrap_or_else(|| genaf::stability::default_increment(s.order));
    let grid = GridSpec::unit_square(s.nx, s.ny);
    let a = assemble_operator(&s.element, &grid, theta)?;
    let eigs = eigenvalues(&a)?;
    let dt = max_stable_dt(&eigs, increment);
    let cfl_x = theta.cos() * dt / grid.dx;
    let cfl_y = theta.sin() * dt / grid.dy;

    let mut w = csv::Writer::from_path(s.out_dir.join("dtmax.csv"))?;
    w.write_record(["theta", "increment", "dt_max", "cfl_x", "cfl_y"])?;
    w.write_record(&[
        format!("{theta:.10e}"),
        format!("{increment:.3e}"),
        format!("{dt:.10e}"),
        format!("{cfl_x:.6}"),
        format!("{cfl_y:.6}"),
    ])?;
    w.flush()?;

    let mut manifest = Manifest::new("dtmax", &s);
    manifest.put("theta", theta);
    manifest.put("increment", increment);
    manifest.put("dt_max", format!("{dt:.10e}"));
    manifest.put("cfl_x", format!("{cfl_x:.6}"));
    manifest.put("cfl_y", format!("{cfl_y:.6}"));
    manifest.write(&s.out_dir)?;
    println!("dt_max={dt:.6e} (theta={theta:.4}, cfl=({cfl_x:.4}, {cfl_y:.4}))");
    Ok(())
}

fn cmd_cflmap(args: &CflmapArgs, cfg: &Config) -> Result<(), CliError> {
    let s = setup(&args.common, cfg, 5)?;
    let cfl_max = resolve(args.cfl_max, cfg, "cfl_max", 0.5)?;
    let cfl_step = resolve(args.cfl_step, cfg, "cfl_step", 0.05)?;
    if cfl_step <= 0.0 || cfl_max < 0.0 {
        return Err(CliError::Config("cfl_max and cfl_step must be positive".into()));
    }
    let grid = GridSpec::unit_square(s.nx, s.ny);
    let n = (cfl_max / cfl_step).round() as usize;
    let mut pairs = Vec::with_capacity((n + 1) * (n + 1));
    for iy in 0..=n {
        for ix in 0..=n {
            pairs.push((ix as f64 * cfl_step, iy as f64 * cfl_step));
        }
    }
    let points = cfl_region_scan(&s.element, &grid, &pairs)?;

    let mut w = csv::Writer::from_path(s.out_dir.join("cflmap.csv"))?;
    w.write_record(["cfl_x", "cfl_y", "stable"])?;
    for p in &points {
        w.write_record(&[
            format!("{:.6}", p.cfl_x),
            format!("{:.6}", p.cfl_y),
            (p.stable as u8).to_string(),
        ])?;
    }
    w.flush()?;

    let mut manifest = Manifest::new("cflmap", &s);
    manifest.put("cfl_max", cfl_max);
    manifest.put("cfl_step", cfl_step);
    manifest.put("points", points.len());
    manifest.put("stable_points", points.iter().filter(|p| p.stable).count());
    manifest.write(&s.out_dir)?;
    println!(
        "cflmap: {} points, {} stable",
        points.len(),
        points.iter().filter(|p| p.stable).count()
    );
    Ok(())
}

fn cmd_element_dump(args: &CommonArgs, cfg: &Config) -> Result<(), CliError> {
    let s = setup(args, cfg, 10)?;
    let mut w = csv::Writer::from_path(s.out_dir.join("element.csv"))?;
    w.write_record(["dof", "kind", "edge", "a", "k", "l", "xi", "eta"])?;
    for (idx, &dof) in s.element.dofs().iter().enumerate() {
        let loc = s.element.dof_location(dof);
        let (xi, eta) = loc
            .map(|(x, y)| (format!("{x:.10}"), format!("{y:.10}")))
            .unwrap_or_default();
        let rec = match dof {
            DofKind::Node(n) => [
                idx.to_string(),
                "node".into(),
                String::new(),
                n.to_string(),
                String::new(),
                String::new(),
                xi,
                eta,
            ],
            DofKind::EdgePoint { edge, a } => [
                idx.to_string(),
                "edge".into(),
                edge.to_string(),
                a.to_string(),
                String::new(),
                String::new(),
                xi,
                eta,
            ],
            DofKind::Moment { k, l } => [
                idx.to_string(),
                "moment".into(),
                String::new(),
                String::new(),
                k.to_string(),
                l.to_string(),
                xi,
                eta,
            ],
        };
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut manifest = Manifest::new("element-dump", &s);
    manifest.put("n_dofs", s.element.n_dofs());
    manifest.put("n_moments", s.element.n_moments());
    manifest.put("basis_dim", s.element.basis().len());
    manifest.write(&s.out_dir)?;
    println!(
        "element: order={} dofs={} owned/cell={} condition={:.3e}",
        s.order,
        s.element.n_dofs(),
        s.element.n_owned_per_cell(),
        s.element.condition_number()
    );
    Ok(())
}
