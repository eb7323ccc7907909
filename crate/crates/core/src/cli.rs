//! Command-line front end: `solve`, `converge`, `stability`, `caputo-test`.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 numerical or
//! output failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::basis::collocation_constants;
use crate::caputo::{discrete_caputo_1, discrete_caputo_2, sample_levels, weights, with_ghost};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::solver::march;
use crate::stability::{check_condition, scan_nu, simulate_growth};
use crate::verify::{convergence_sweep, exact_caputo_power, observed_order};

/// Environment variable capping sweep concurrency (0 = automatic).
pub const THREADS_ENV: &str = "FRACTEL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fractel",
    version,
    about = "Time-fractional telegraph equation solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// March the scheme; writes solution.csv and diagnostics.csv.
    Solve {
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refinement study against the exact solution; writes convergence.csv.
    Converge {
        config: PathBuf,
        /// Number of meshes, each doubling M and N.
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Growth-factor study over a wavenumber scan; writes stability.csv.
    Stability {
        config: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long = "beta-scan")]
        beta_scan: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weight properties and observed orders of the discrete Caputo operators.
    CaputoTest {
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
}

enum Failure {
    Input(Error),
    Numerical(Error),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }

    fn error(&self) -> &Error {
        match self {
            Failure::Input(e) | Failure::Numerical(e) => e,
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn input<T>(r: Result<T>) -> Outcome<T> {
    r.map_err(Failure::Input)
}

fn numerical<T>(r: Result<T>) -> Outcome<T> {
    r.map_err(Failure::Numerical)
}

/// Entry point; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("fractel: {}", f.error());
            f.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Outcome<()> {
    match cmd {
        Command::Solve { config, out } => {
            let cfg = load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            cmd_solve(&cfg, &dir)
        }
        Command::Converge {
            config,
            levels,
            out,
        } => {
            let cfg = load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            let threads = input(thread_cap())?;
            cmd_converge(&cfg, levels.unwrap_or(cfg.levels), threads, &dir)
        }
        Command::Stability {
            config,
            steps,
            beta_scan,
            out,
        } => {
            let cfg = load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            cmd_stability(
                &cfg,
                steps.unwrap_or(cfg.steps),
                beta_scan.unwrap_or(cfg.beta_scan),
                &dir,
            )
        }
        Command::CaputoTest { gamma, levels } => {
            let report = numerical(caputo_report(gamma, levels)).map_err(|f| match f {
                Failure::Numerical(e @ Error::Domain(_)) => Failure::Input(e),
                other => other,
            })?;
            print!("{report}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Outcome<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(Error::Io(format!("{}: {e}", path.display()))))?;
    input(text.parse())
}

/// Concurrency cap from [`THREADS_ENV`].
pub fn thread_cap() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::config(THREADS_ENV, format!("`{v}` is not a nonnegative integer"))),
    }
}

/// Round-trip safe float formatting (17 significant digits).
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(dir: &Path, name: &str, body: &str) -> Outcome<()> {
    let io = |e: std::io::Error| {
        Failure::Numerical(Error::Io(format!("{}: {e}", dir.join(name).display())))
    };
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(name), body).map_err(io)
}

fn cmd_solve(cfg: &RunConfig, dir: &Path) -> Outcome<()> {
    let grid = input(cfg.grid())?;
    let mesh = input(cfg.mesh())?;
    for w in numerical(cfg.problem.compatibility_warnings(&grid))? {
        eprintln!("fractel: warning: incompatible data: {w}");
    }
    let sol = numerical(march(&cfg.problem, &grid, &mesh))?;
    let knots = grid.knots();
    let mut csv = String::from("t,x,u\n");
    for (n, row) in sol.knot_values_per_level.iter().enumerate() {
        let t = fmt_float(mesh.time(n));
        for (x, u) in knots.iter().zip(row) {
            let _ = writeln!(csv, "{t},{},{}", fmt_float(*x), fmt_float(*u));
        }
    }
    write_file(dir, "solution.csv", &csv)?;
    let d = &sol.diagnostics;
    let diag = format!(
        "nu,condition,runtime_ms,nu_min,diagonally_dominant\n{},{},{},{},{}\n",
        fmt_float(d.nu),
        d.condition_met,
        fmt_float(d.wall_time.as_secs_f64() * 1e3),
        fmt_float(d.nu_min),
        d.diagonally_dominant,
    );
    write_file(dir, "diagnostics.csv", &diag)
}

/// Body of `convergence.csv` for a configuration.
pub fn convergence_csv(cfg: &RunConfig, levels: usize, threads: usize) -> Result<String> {
    let mms = cfg.manufactured()?;
    let rows = convergence_sweep(&mms, cfg.m, cfg.n, levels, threads)?;
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    let mut csv = String::from("M,N,h,tau,l_inf,l2,order_inf,order_l2\n");
    for r in rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.report.m,
            r.report.n,
            fmt_float(r.h),
            fmt_float(r.tau),
            fmt_float(r.report.l_inf),
            fmt_float(r.report.l2),
            opt(r.order_inf),
            opt(r.order_l2),
        );
    }
    Ok(csv)
}

fn cmd_converge(cfg: &RunConfig, levels: usize, threads: usize, dir: &Path) -> Outcome<()> {
    input(cfg.manufactured())?;
    if levels == 0 {
        return Err(Failure::Input(Error::config(
            "converge.levels",
            "need at least one level",
        )));
    }
    input(cfg.mesh())?;
    let csv = numerical(convergence_csv(cfg, levels, threads))?;
    write_file(dir, "convergence.csv", &csv)
}

/// Body of `stability.csv`.
pub fn stability_csv(cfg: &RunConfig, steps: usize, beta_scan: usize) -> Result<String> {
    if steps == 0 {
        return Err(Error::config("stability.steps", "need at least one step"));
    }
    if beta_scan == 0 {
        return Err(Error::config(
            "stability.beta_scan",
            "need at least one wavenumber",
        ));
    }
    let grid = cfg.grid()?;
    let mesh = cfg.mesh()?;
    let p = &cfg.problem;
    let s = collocation_constants(grid.h())?;
    let w = weights(p.gamma, steps, mesh.tau())?;
    let scan = scan_nu(p.gamma1, p.gamma2, p.gamma3, &s, &w, grid.h(), beta_scan)?;
    let mut csv = String::from("beta,nu,condition,max_xi_ratio\n");
    for (beta, nu) in scan {
        let nu = cfg.forced_nu.unwrap_or(nu);
        let trace = simulate_growth(nu, p.gamma1, mesh.tau(), &w, steps, cfg.xi0)?.with_beta(beta);
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_float(beta),
            fmt_float(nu),
            check_condition(nu, p.gamma1, mesh.tau()),
            fmt_float(trace.max_ratio()),
        );
    }
    Ok(csv)
}

fn cmd_stability(cfg: &RunConfig, steps: usize, beta_scan: usize, dir: &Path) -> Outcome<()> {
    if steps == 0 {
        return Err(Failure::Input(Error::config(
            "stability.steps",
            "need at least one step",
        )));
    }
    if beta_scan == 0 {
        return Err(Failure::Input(Error::config(
            "stability.beta_scan",
            "need at least one wavenumber",
        )));
    }
    let csv = numerical(stability_csv(cfg, steps, beta_scan))?;
    write_file(dir, "stability.csv", &csv)
}

/// Text report for `caputo-test`.
///
/// Operators are applied on `[0, 1]` with `N = 40·2^k` steps to `t²`
/// (reproduced exactly by the order-γ operator) and `t^{2.5}`.
pub fn caputo_report(gamma_order: f64, levels: usize) -> Result<String> {
    if levels == 0 {
        return Err(Error::domain("need at least one level"));
    }
    let n_weights = 1000;
    let w = weights(gamma_order, n_weights + 1, 1.0)?;
    let b = w.b();
    let positive = b.iter().all(|&v| v > 0.0);
    let decreasing = b.windows(2).all(|p| p[0] > p[1]);
    let telescoped: f64 = (0..=n_weights).map(|k| b[k] - b[k + 1]).sum();
    let mut out = String::new();
    let _ = writeln!(out, "# weights gamma={gamma_order} n={n_weights}");
    let _ = writeln!(
        out,
        "# b0={} positive={positive} decreasing={decreasing}",
        fmt_float(b[0])
    );
    let _ = writeln!(
        out,
        "# telescoping_residual={}",
        fmt_float((telescoped - (1.0 - b[n_weights + 1])).abs())
    );
    let _ = writeln!(out, "N,tau,err2_t2,err2_t2.5,order2_t2.5,err1_t2,order1_t2");
    let exact2_sq = exact_caputo_power(gamma_order, 2.0, 1.0)?;
    let exact2_p = exact_caputo_power(gamma_order, 2.5, 1.0)?;
    let exact1_sq = exact_caputo_power(gamma_order - 1.0, 2.0, 1.0)?;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..levels {
        let n = 40usize << k;
        let tau = 1.0 / n as f64;
        let w = weights(gamma_order, n, tau)?;
        let sq = sample_levels(|t: f64| t * t, tau, n);
        let pw = sample_levels(|t: f64| t.powf(2.5), tau, n);
        let e2_sq = (discrete_caputo_2(&w, &with_ghost(&sq, 0.0, tau)?)? - exact2_sq).abs();
        let e2_p = (discrete_caputo_2(&w, &with_ghost(&pw, 0.0, tau)?)? - exact2_p).abs();
        let e1_sq = (discrete_caputo_1(&w, &sq)? - exact1_sq).abs();
        let (o2, o1) = match prev {
            Some((p2, p1)) => (
                observed_order(p2, e2_p, 2.0)
                    .map(fmt_float)
                    .unwrap_or_default(),
                observed_order(p1, e1_sq, 2.0)
                    .map(fmt_float)
                    .unwrap_or_default(),
            ),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{n},{},{},{},{o2},{},{o1}",
            fmt_float(tau),
            fmt_float(e2_sq),
            fmt_float(e2_p),
            fmt_float(e1_sq)
        );
        prev = Some((e2_p, e1_sq));
    }
    Ok(out)
}
