//! Command-line front end: `run`, `verify`, `extend` and `solve`.
//!
//! Exit codes: 0 success, 1 failure (bounds violated, solver blow-up,
//! non-convergence, failed law suite), 2 hypothesis not met (`K̂ >= √2`;
//! 1 with `--strict`), 64 malformed configuration or usage.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::exhaustion::{run_exhaustion, Certificate, ExhaustionReport};
use crate::extension::{estimate_k, ExtensionMeta, FourierExtension, KEstimate};
use crate::grid::{ball_radius, write_residual_csv, PolarGrid};
use crate::laws::{run_all, LawSummary};
use crate::solver::{distance_field, solve_dirichlet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_CONFIG: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "qcharm",
    version,
    about = "Hyperbolic-harmonic extensions by compact exhaustion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `[output] dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides the configured one).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Treat an unmet quasiconformality hypothesis as failure.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extension, law suites and the full exhaustion; writes report.json.
    Run(Common),
    /// Law suites only; writes verify.json.
    Verify(Common),
    /// Extension on the estimate grid with its distortion; writes grids/phi.csv.
    Extend(Common),
    /// One Dirichlet solve on a single ball; writes solve.json.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Hyperbolic radius (defaults to the last configured radius).
        #[arg(long)]
        radius: Option<f64>,
    },
}

#[derive(Serialize)]
struct RunReport<'a> {
    seed: u64,
    laws: &'a [LawSummary],
    laws_passed: bool,
    exhaustion: &'a ExhaustionReport,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    seed: u64,
    passed: bool,
    laws: &'a [LawSummary],
}

#[derive(Serialize)]
struct ExtendReport {
    extension: ExtensionMeta,
    k_estimate: KEstimate,
    hypothesis_met: bool,
}

#[derive(Serialize)]
struct SolveReport {
    radius: f64,
    grid: PolarGrid,
    sweeps: usize,
    residual: f64,
    converged: bool,
    sup_distance: f64,
    argmax_ring: usize,
    argmax_angle: usize,
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (common, radius) = match &cli.command {
        Command::Run(c) | Command::Verify(c) | Command::Extend(c) => (c, None),
        Command::Solve { common, radius } => (common, *radius),
    };
    let mut cfg = match RunConfig::load(&common.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(seed) = common.seed {
        cfg.set_seed(seed);
    }
    let out = common.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Run(_) => cmd_run(&cfg, &out, common.strict),
        Command::Verify(_) => cmd_verify(&cfg, &out),
        Command::Extend(_) => cmd_extend(&cfg, &out),
        Command::Solve { .. } => cmd_solve(&cfg, &out, radius),
    });
    match result {
        Ok(code) => code,
        Err(Error::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn radius_tag(r: f64) -> String {
    format!("R{r}")
}

fn cmd_run(cfg: &RunConfig, out: &Path, strict: bool) -> Result<i32> {
    let map = cfg.boundary_map()?;
    fs::create_dir_all(out.join("grids"))?;
    fs::create_dir_all(out.join("residuals"))?;
    let laws = run_all(&cfg.verify, cfg.seed)?;
    let run = run_exhaustion(&map, cfg.extension, &cfg.solver, &cfg.exhaustion)?;
    let rep = &run.report;
    for (k, rec) in rep.radii.iter().enumerate() {
        let tag = radius_tag(rec.radius);
        run.phi[k].write_csv(out.join("grids").join(format!("phi_{tag}.csv")))?;
        if let Some(u) = &run.solutions[k] {
            u.write_csv(out.join("grids").join(format!("u_{tag}.csv")))?;
        }
        write_residual_csv(
            out.join("residuals").join(format!("{tag}.csv")),
            &run.residual_histories[k],
        )?;
    }
    let laws_passed = laws.iter().all(|l| l.passed);
    write_json(
        &out.join("report.json"),
        &RunReport {
            seed: cfg.seed,
            laws: &laws,
            laws_passed,
            exhaustion: rep,
        },
    )?;

    println!("K estimate {:.6}", rep.k_estimate.k_hat);
    if let Some(b) = rep.lemma1_bound_factor2 {
        println!("distance bound {b:.6}");
    }
    for rec in &rep.radii {
        match (&rec.error, rec.sup_distance) {
            (Some(e), _) => println!("R = {}: {e}", rec.radius),
            (None, Some(d)) => println!(
                "R = {}: sup d = {d:.4e}, sweeps {}, converged {}",
                rec.radius, rec.sweeps, rec.converged
            ),
            _ => {}
        }
    }
    println!(
        "certificate: {}",
        serde_json::to_string(&rep.certificate)?.trim_matches('"')
    );
    Ok(match rep.certificate {
        Certificate::BoundsHold => EXIT_OK,
        Certificate::HypothesisNotMet if !strict => EXIT_HYPOTHESIS,
        _ => EXIT_FAILURE,
    })
}

fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<i32> {
    fs::create_dir_all(out)?;
    let laws = run_all(&cfg.verify, cfg.seed)?;
    let passed = laws.iter().all(|l| l.passed);
    write_json(
        &out.join("verify.json"),
        &VerifyReport {
            seed: cfg.seed,
            passed,
            laws: &laws,
        },
    )?;
    for l in &laws {
        println!(
            "{} {} max {:e} (tol {:e})",
            if l.passed { "ok  " } else { "FAIL" },
            l.name,
            l.max_residual,
            l.tolerance
        );
    }
    Ok(if passed { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_extend(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let map = cfg.boundary_map()?;
    fs::create_dir_all(out.join("grids"))?;
    let ext = FourierExtension::build(&map, cfg.extension)?;
    let [n_r, n_t] = cfg.exhaustion.k_grid;
    let grid = PolarGrid::new(cfg.extension.rho_eval, n_r, n_t)?;
    let k = estimate_k(&ext, grid)?;
    ext.write_csv(grid, out.join("grids").join("phi.csv"))?;
    let meta = ext.meta();
    write_json(&out.join("grids").join("phi.json"), &meta)?;
    let hypothesis_met = k.k_hat < std::f64::consts::SQRT_2;
    write_json(
        &out.join("extend.json"),
        &ExtendReport {
            extension: meta,
            k_estimate: k,
            hypothesis_met,
        },
    )?;
    println!(
        "K estimate {:.6}, tail bound {:.3e}",
        k.k_hat, meta.tail_bound
    );
    Ok(EXIT_OK)
}

fn cmd_solve(cfg: &RunConfig, out: &Path, radius: Option<f64>) -> Result<i32> {
    let map = cfg.boundary_map()?;
    let radius = radius.unwrap_or(*cfg.exhaustion.radii.last().expect("validated non-empty"));
    let rho = ball_radius(radius).map_err(|e| Error::Config(format!("--radius: {e}")))?;
    if rho > cfg.extension.rho_eval {
        return Err(Error::Config(format!(
            "--radius {radius} lies beyond rho_eval = {}",
            cfg.extension.rho_eval
        )));
    }
    fs::create_dir_all(out.join("grids"))?;
    fs::create_dir_all(out.join("residuals"))?;
    let ext = FourierExtension::build(&map, cfg.extension)?;
    let [n_r, n_t] = cfg.exhaustion.grid;
    let grid = PolarGrid::new(rho, n_r, n_t)?;
    let phi = ext.sample_grid(grid)?;
    let solver = crate::solver::SolverConfig {
        snapshot_every: cfg.output.snapshot_every,
        ..cfg.solver
    };
    let res = match solve_dirichlet(phi.boundary(), grid, &solver, &phi) {
        Ok(r) => r,
        Err(e @ Error::BlowUp { .. }) => {
            eprintln!("error: {e}");
            return Ok(EXIT_FAILURE);
        }
        Err(e) => return Err(e),
    };
    let tag = radius_tag(radius);
    phi.write_csv(out.join("grids").join(format!("phi_{tag}.csv")))?;
    res.field
        .write_csv(out.join("grids").join(format!("u_{tag}.csv")))?;
    for (sweep, snap) in &res.snapshots {
        snap.write_csv(out.join("grids").join(format!("u_{tag}_sweep{sweep}.csv")))?;
    }
    write_residual_csv(
        out.join("residuals").join(format!("{tag}.csv")),
        &res.residual_history,
    )?;
    let d = distance_field(&res.field, &phi)?;
    let report = SolveReport {
        radius,
        grid,
        sweeps: res.sweeps,
        residual: res.final_residual(),
        converged: res.converged,
        sup_distance: d.sup,
        argmax_ring: d.argmax_ring,
        argmax_angle: d.argmax_angle,
    };
    write_json(&out.join("solve.json"), &report)?;
    println!(
        "R = {radius}: sweeps {}, residual {:.3e}, converged {}, sup d = {:.4e}",
        res.sweeps,
        res.final_residual(),
        res.converged,
        d.sup
    );
    Ok(if res.converged { EXIT_OK } else { EXIT_FAILURE })
}
