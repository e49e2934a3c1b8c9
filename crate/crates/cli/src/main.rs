//! `hbvm` experiment harness.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hbvm::catalog::{dde_problem, ode_problem, DDE_IDS, ODE_IDS};
use hbvm::config::{ExperimentConfig, ExperimentKind, NodeFamily};
use hbvm::convergence::{dde_convergence, ode_convergence, ConvergenceTable, Reference};
use hbvm::dde::{integrate_dde, CommensurableMesh};
use hbvm::experiments::{run_benchmark, BenchmarkSetup, MethodRun};
use hbvm::hamiltonian::ProblemId;
use hbvm::ode::integrate;
use hbvm::output::{format_float, write_convergence_csv, write_energy_csv, write_run_csv, write_samples_csv};
use hbvm::{ButcherTableau, Hbvm, QuadratureRule, RunReport, SolverSettings};

#[derive(Parser)]
#[command(name = "hbvm", version, about = "Legendre-expansion Runge-Kutta experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Butcher tableau (c, b, A) of HBVM(k,s).
    Tableau(Flags),
    /// Integrate a named ODE.
    IntegrateOde(Flags),
    /// Integrate a named constant-delay DDE on a commensurable mesh.
    IntegrateDde(Flags),
    /// Empirical order study on a halving step ladder.
    Convergence(Flags),
    /// Run a delay Hamiltonian benchmark with both of its methods.
    Reproduce(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// `gauss` or a comma-separated list of abscissae in (0, 1).
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    nu: Option<usize>,
    #[arg(long = "K")]
    intervals: Option<usize>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// `fixed-point` or `newton`.
    #[arg(long)]
    scheme: Option<String>,
    /// Output file (directory for `reproduce`); stdout when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    precision: Option<usize>,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<hbvm::Error> for Failure {
    fn from(e: hbvm::Error) -> Self {
        use hbvm::Error as E;
        match e.root() {
            E::Config(_)
            | E::UnknownProblem(_)
            | E::InvalidDegree { .. }
            | E::InvalidAbscissae(_)
            | E::InvalidSettings(_)
            | E::InvalidMesh(_) => Failure::Config(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn config_error<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Config(msg.into()))
}

fn build_config(kind: ExperimentKind, flags: &Flags) -> Outcome<ExperimentConfig> {
    let mut cfg = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    let mut over = ExperimentConfig {
        kind: Some(kind),
        problem: flags.problem.clone(),
        k: flags.k,
        s: flags.s,
        nu: flags.nu,
        intervals: flags.intervals,
        h: flags.h,
        steps: flags.steps,
        t0: flags.t0,
        t_end: flags.t_end,
        rtol: flags.rtol,
        atol: flags.atol,
        max_iter: flags.max_iter,
        out: flags.out.clone(),
        ..Default::default()
    };
    if let Some(n) = &flags.nodes {
        over.set("nodes", n)?;
    }
    if let Some(s) = &flags.scheme {
        over.set("scheme", s)?;
    }
    if let Some(p) = flags.precision {
        over.precision = p;
    }
    if cfg.kind.is_some_and(|k| k != kind) {
        return config_error(format!("config file is for `{}`", cfg.kind.unwrap().as_str()));
    }
    cfg.merge(&over);
    cfg.validate()?;
    Ok(cfg)
}

fn method_of(cfg: &ExperimentConfig, default_s: usize) -> Outcome<Hbvm> {
    let s = cfg.s.unwrap_or(default_s);
    let rule = match &cfg.nodes {
        NodeFamily::Gauss => QuadratureRule::gauss(cfg.k.unwrap_or(s))?,
        NodeFamily::List(v) => QuadratureRule::interpolatory(v)?,
    };
    Ok(Hbvm::new(rule, s)?)
}

fn with_output(out: Option<&str>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Outcome {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
        }
    }
    Ok(())
}

fn cmd_tableau(cfg: &ExperimentConfig) -> Outcome {
    let method = method_of(cfg, cfg.k.unwrap_or(1))?;
    let t: ButcherTableau = method.tableau();
    let d = cfg.precision;
    with_output(cfg.out.as_deref(), |w| {
        writeln!(
            w,
            "# {} quadrature order {}; floats: scientific, {d} significant digits",
            method.label(),
            t.quadrature_order()
        )?;
        let k = t.stages();
        let mut header = vec!["i".to_string(), "c".into(), "b".into()];
        header.extend((1..=k).map(|j| format!("a{j}")));
        writeln!(w, "{}", header.join(","))?;
        for i in 0..k {
            let mut row = vec![(i + 1).to_string(), format_float(t.c()[i], d), format_float(t.b()[i], d)];
            row.extend((0..k).map(|j| format_float(t.a()[(i, j)], d)));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    })
}

/// Resolves `(t0, T, N)` from whichever of `steps`, `h`, `T` are given.
fn ode_mesh(cfg: &ExperimentConfig) -> Outcome<(f64, f64, usize)> {
    let t0 = cfg.t0.unwrap_or(0.0);
    match (cfg.steps, cfg.h, cfg.t_end) {
        (Some(n), Some(h), None) => Ok((t0, t0 + n as f64 * h, n)),
        (Some(n), _, t) => Ok((t0, t.unwrap_or(t0 + 1.0), n)),
        (None, Some(h), t) => {
            let t_end = t.unwrap_or(t0 + 1.0);
            if h.is_nan() || h <= 0.0 {
                return config_error("h must be positive");
            }
            let n = ((t_end - t0) / h).round();
            if (t0 + n * h - t_end).abs() > 1e-9 * (1.0 + t_end.abs()) {
                return config_error(format!("h = {h} does not divide [{t0}, {t_end}]"));
            }
            Ok((t0, t_end, n as usize))
        }
        (None, None, t) => Ok((t0, t.unwrap_or(t0 + 1.0), 100)),
    }
}

fn cmd_integrate_ode(cfg: &ExperimentConfig) -> Outcome {
    let id = cfg.problem.as_deref().unwrap_or("decay");
    let entry = ode_problem(id)?;
    let method = method_of(cfg, 2)?;
    let (t0, t_end, n) = ode_mesh(cfg)?;
    if t_end.is_nan() || t_end <= t0 {
        return config_error("T must exceed t0");
    }
    let mut report = if n == 0 {
        RunReport::empty(t0, 0.0)
    } else {
        integrate(&entry.problem, &method, &entry.y0, t0, t_end, n, &cfg.settings())?
    };
    if let (Some(e), false) = (&entry.energy, report.states.is_empty()) {
        report = report.with_energy(e);
    }
    with_output(cfg.out.as_deref(), |w| write_run_csv(w, &report, &entry.names, cfg.precision))
}

fn dde_mesh(cfg: &ExperimentConfig, tau: f64, defaults: (usize, usize)) -> Outcome<CommensurableMesh> {
    let t0 = cfg.t0.unwrap_or(0.0);
    let nu = match (cfg.nu, cfg.h) {
        (Some(nu), _) => nu,
        (None, Some(h)) => {
            let nu = (tau / h).round();
            if nu < 1.0 || (nu * h - tau).abs() > 1e-12 * tau {
                return config_error(format!("h = {h} is not commensurable with the delay {tau}"));
            }
            nu as usize
        }
        (None, None) => defaults.0,
    };
    let intervals = match (cfg.intervals, cfg.t_end) {
        (Some(k), _) => k,
        (None, Some(t)) => {
            let k = ((t - t0) / tau).round();
            if k < 1.0 || (t0 + k * tau - t).abs() > 1e-9 * (1.0 + t.abs()) {
                return config_error(format!("T = {t} is not t0 plus a whole number of delays"));
            }
            k as usize
        }
        (None, None) => defaults.1,
    };
    Ok(CommensurableMesh::new(t0, tau, nu, intervals)?)
}

fn benchmark_defaults(id: &str) -> (usize, usize) {
    match id.parse::<ProblemId>() {
        Ok(pid) => {
            let b = BenchmarkSetup::for_problem(pid);
            (b.nu, b.intervals)
        }
        Err(_) => (8, 3),
    }
}

fn cmd_integrate_dde(cfg: &ExperimentConfig) -> Outcome {
    let id = cfg.problem.as_deref().unwrap_or("linear-delay");
    let entry = dde_problem(id)?;
    let method = method_of(cfg, 2)?;
    let mesh = dde_mesh(cfg, entry.problem.delay(), benchmark_defaults(id))?;
    let mut report = integrate_dde(&entry.problem, &method, &mesh, &cfg.settings())?;
    if let Some(e) = &entry.energy {
        report = report.with_energy(e);
    }
    with_output(cfg.out.as_deref(), |w| write_run_csv(w, &report, &entry.names, cfg.precision))
}

const LADDER_ROWS: u32 = 6;

fn cmd_convergence(cfg: &ExperimentConfig) -> Outcome {
    let id = cfg.problem.as_deref().unwrap_or("decay");
    let methods: Vec<Hbvm> = if cfg.s.is_some() || cfg.k.is_some() {
        vec![method_of(cfg, cfg.k.unwrap_or(1))?]
    } else {
        [(1, 1), (2, 2), (4, 2), (3, 3)]
            .iter()
            .map(|&(k, s)| Hbvm::gauss(k, s))
            .collect::<hbvm::Result<_>>()?
    };
    let settings = cfg.settings();
    let mut tables: Vec<ConvergenceTable> = Vec::new();
    if ODE_IDS.contains(&id) {
        let entry = ode_problem(id)?;
        let (t0, t_end, _) = ode_mesh(cfg)?;
        let base = cfg.steps.unwrap_or(8).max(1);
        let ladder: Vec<usize> = (0..LADDER_ROWS).map(|i| base << i).collect();
        let results: Vec<hbvm::Result<ConvergenceTable>> = std::thread::scope(|scope| {
            let handles: Vec<_> = methods
                .iter()
                .map(|m| {
                    let entry = &entry;
                    let ladder = &ladder;
                    let settings = &settings;
                    scope.spawn(move || {
                        let reference = match &entry.exact {
                            Some(f) => Reference::Analytic(f),
                            None => Reference::FineStep { factor: 100 },
                        };
                        ode_convergence(&entry.problem, m, &entry.y0, t0, t_end, ladder, reference, settings)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("convergence thread panicked")).collect()
        });
        for r in results {
            tables.push(r?);
        }
    } else if DDE_IDS.contains(&id) {
        let entry = dde_problem(id)?;
        let t0 = cfg.t0.unwrap_or(0.0);
        let intervals = cfg.intervals.unwrap_or(3);
        let base = cfg.nu.unwrap_or(4).max(1);
        let nus: Vec<usize> = (0..LADDER_ROWS).map(|i| base << i).collect();
        for m in &methods {
            let reference = match &entry.exact {
                Some(f) => Reference::Analytic(f),
                None => Reference::FineStep { factor: 100 },
            };
            tables.push(dde_convergence(&entry.problem, m, t0, intervals, &nus, reference, &settings)?);
        }
    } else {
        return Err(hbvm::Error::UnknownProblem(id.to_string()).into());
    }
    for t in &tables {
        let s = t.label.trim_end_matches(')').rsplit(',').next().and_then(|v| v.parse::<usize>().ok());
        let show = |v: Option<f64>| v.map(|p| format!("{p:.2}")).unwrap_or_else(|| "n/a".into());
        eprintln!(
            "{}: mesh order {} (expected {}), dense order {} (expected {})",
            t.label,
            show(t.mesh_order()),
            s.map(|s| (2 * s).to_string()).unwrap_or_default(),
            show(t.uniform_order()),
            s.map(|s| (s + 1).to_string()).unwrap_or_default()
        );
    }
    with_output(cfg.out.as_deref(), |w| write_convergence_csv(w, &tables, cfg.precision))
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Outcome {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn run_summary(run: &MethodRun, skip: usize) -> serde_json::Value {
    let last = run.samples.last().map(|p| p.state.clone());
    let amp = {
        let v = &run.energy.values[skip.min(run.energy.values.len())..];
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    };
    serde_json::json!({
        "method": run.label(),
        "steps": run.report.steps(),
        "total_iterations": run.report.total_iterations(),
        "max_iterations": run.report.max_iterations(),
        "final_state": run.report.last(),
        "post_transient_energy_range": amp,
        "period_samples": run.samples.len(),
        "last_sample": last,
    })
}

fn cmd_reproduce(cfg: &ExperimentConfig) -> Outcome {
    let Some(id) = cfg.problem.as_deref() else {
        return config_error("reproduce needs --problem (problem1, problem2 or problem3)");
    };
    let pid: ProblemId = id.parse()?;
    let setup = BenchmarkSetup::for_problem(pid);
    let mut settings = SolverSettings::round_off();
    let user = cfg.settings();
    if cfg.rtol.is_some() {
        settings.rtol = user.rtol;
    }
    if cfg.atol.is_some() {
        settings.atol = user.atol;
    }
    if cfg.max_iter.is_some() {
        settings.max_iter = user.max_iter;
    }
    if cfg.scheme.is_some() {
        settings.scheme = user.scheme;
    }
    let dir = PathBuf::from(cfg.out.as_deref().unwrap_or("."));
    fs::create_dir_all(&dir)?;
    let runs = run_benchmark(&setup, &settings)?;
    let names = dde_problem(pid.as_str())?.names;
    let d = cfg.precision;
    for run in &runs {
        let stem = format!("{}_hbvm_{}_{}", pid.as_str(), run.k, run.s);
        write_file(&dir.join(format!("{stem}_run.csv")), |w| write_run_csv(w, &run.report, &names, d))?;
        write_file(&dir.join(format!("{stem}_energy.csv")), |w| {
            write_energy_csv(w, &run.report, &run.energy, d)
        })?;
        write_file(&dir.join(format!("{stem}_samples.csv")), |w| {
            write_samples_csv(w, &run.samples, &names, d)
        })?;
    }
    let summary = serde_json::json!({
        "problem": pid.as_str(),
        "h": setup.mesh().h(),
        "T": setup.mesh().t_end(),
        "transient_steps": setup.transient_steps(),
        "period_steps": setup.period_steps,
        "rtol": settings.rtol,
        "atol": settings.atol,
        "runs": runs.iter().map(|r| run_summary(r, setup.transient_steps())).collect::<Vec<_>>(),
    });
    write_file(&dir.join(format!("{}_summary.json", pid.as_str())), |w| {
        serde_json::to_writer_pretty(&mut *w, &summary)?;
        writeln!(w)
    })?;
    for run in &runs {
        if let Some(p) = run.samples.last() {
            eprintln!(
                "{} last period sample: {}",
                run.label(),
                p.state.iter().map(|v| format!("{v:.15}")).collect::<Vec<_>>().join(", ")
            );
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let (kind, flags) = match &cli.command {
        Command::Tableau(f) => (ExperimentKind::Tableau, f),
        Command::IntegrateOde(f) => (ExperimentKind::IntegrateOde, f),
        Command::IntegrateDde(f) => (ExperimentKind::IntegrateDde, f),
        Command::Convergence(f) => (ExperimentKind::Convergence, f),
        Command::Reproduce(f) => (ExperimentKind::Reproduce, f),
    };
    let cfg = build_config(kind, flags)?;
    match kind {
        ExperimentKind::Tableau => cmd_tableau(&cfg),
        ExperimentKind::IntegrateOde => cmd_integrate_ode(&cfg),
        ExperimentKind::IntegrateDde => cmd_integrate_dde(&cfg),
        ExperimentKind::Convergence => cmd_convergence(&cfg),
        ExperimentKind::Reproduce => cmd_reproduce(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
