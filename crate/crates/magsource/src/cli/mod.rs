//! Command-line front end: subcommand dispatch, worker-pool scoping, table
//! writers for the non-field outputs, and the built-in invariant suite.
//!
//! The binary is a thin wrapper around [`run`], which parses arguments (see
//! [`config`]), executes one subcommand and reports a one-line summary
//! (energy, method, orbit cutoff, wall time) on stdout. Exit codes: `0`
//! success, `1` I/O failure, `2` energy on a Landau level, `3` invalid
//! usage or configuration.
//!
//! Field sampling runs on a rayon worker pool. `--threads N` sizes it, the
//! `MAGSOURCE_THREADS` environment variable overrides the flag, and output
//! bytes are identical for every worker count because samples are
//! independent and assembled in index order.

mod config;

use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

pub use config::{quantity_name, CliError, Parsed, RunConfig, Subcommand, USAGE};

use crate::classical::{
    caustic_point, caustic_surface, energy_hat, energy_hat_deriv, find_flight_times,
    interval_solutions, velocity, IntervalOutcome,
};
use crate::fieldmaps::{
    csv_number, encode_diverging, encode_flowmap, encode_grayscale, fnv1a64, sample_map,
    sample_profile, write_csv_preamble, write_map_csv, write_profile_csv, Field2D, GridSpec,
    Quantity,
};
use crate::quantum;
use crate::scaling::ScaledPoint;
use crate::semiclassical::{
    dynamical_phase, orbit_contributions, sc_density, SumMode, SummationPolicy,
};
use crate::specialfn::airy_ai;

/// Half-width of the spectrum's gap band around each Landau level: emitted
/// rows inside it carry a `divergent` flag and no value, producing the
/// visible gaps in the J/J_free curve.
const SPECTRUM_GAP: f64 = 1e-3;

struct RunOutcome {
    summary: String,
    failures: usize,
}

/// Parse `args` (program name already stripped), execute, and return the
/// process exit code. Errors go to stderr, the summary line to stdout.
pub fn run(args: &[String]) -> i32 {
    let cfg = match config::parse_args(args) {
        Ok(Parsed::Help) => {
            print!("{USAGE}");
            return 0;
        }
        Ok(Parsed::Run(cfg)) => cfg,
        Err(e) => {
            eprintln!("magsource: {e}");
            return e.exit_code();
        }
    };
    let start = Instant::now();
    let outcome = match thread_count(&cfg) {
        Ok(None) => execute(&cfg),
        Ok(Some(n)) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("magsource: cannot build a {n}-thread worker pool: {e}");
                    return 3;
                }
            };
            pool.install(|| execute(&cfg))
        }
        Err(e) => {
            eprintln!("magsource: {e}");
            return e.exit_code();
        }
    };
    match outcome {
        Ok(RunOutcome { summary, failures }) => {
            println!("{summary} wall={:.2}s", start.elapsed().as_secs_f64());
            if failures == 0 {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("magsource: {e}");
            e.exit_code()
        }
    }
}

/// Worker count: the `MAGSOURCE_THREADS` environment variable overrides the
/// `--threads` flag; absent both, rayon's default pool is used.
fn thread_count(cfg: &RunConfig) -> Result<Option<usize>, CliError> {
    match std::env::var("MAGSOURCE_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| {
                CliError::Usage(format!(
                    "MAGSOURCE_THREADS must be a positive integer, got `{v}`"
                ))
            })?;
            if n == 0 {
                return Err(CliError::Usage(
                    "MAGSOURCE_THREADS must be a positive integer, got `0`".into(),
                ));
            }
            Ok(Some(n))
        }
        Err(_) => Ok(cfg.threads),
    }
}

fn execute(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    match cfg.subcommand {
        Subcommand::DensityMap | Subcommand::CurrentMap | Subcommand::FlowMap => run_map(cfg),
        Subcommand::Profile => run_profile(cfg),
        Subcommand::Spectrum => run_spectrum(cfg),
        Subcommand::Caustics => run_caustics(cfg),
        Subcommand::Trajectories => run_trajectories(cfg),
        Subcommand::Selfcheck => Ok(run_selfcheck()),
    }
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

fn require_csv(cfg: &RunConfig) -> Result<&PathBuf, CliError> {
    if cfg.out.is_some() {
        return Err(CliError::Usage(format!(
            "{} writes a CSV table only; use --csv, not --out",
            cfg.subcommand.name()
        )));
    }
    cfg.csv.as_ref().ok_or_else(|| {
        CliError::Usage(format!("{} needs --csv PATH", cfg.subcommand.name()))
    })
}

fn policy_for(cfg: &RunConfig) -> SummationPolicy {
    // The mode field is overridden per sample by the chosen method; Uniform
    // here is only the placeholder for the quantum path.
    SummationPolicy::new(cfg.orbits, cfg.ghosts, SumMode::Uniform)
}

fn field_summary(cfg: &RunConfig, eps: f64) -> String {
    format!(
        "{}: epsilon={eps} method={} N={}",
        cfg.subcommand.name(),
        cfg.method.label(),
        cfg.orbits
    )
}

fn run_map(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    if cfg.out.is_none() && cfg.csv.is_none() {
        return Err(CliError::Usage(
            "nothing to write: give --out IMAGE and/or --csv TABLE".into(),
        ));
    }
    let eps = cfg.epsilon_required();
    let grid = GridSpec::new(
        cfg.rho_min,
        cfg.rho_max,
        cfg.z_min,
        cfg.z_max,
        cfg.width,
        cfg.height,
        cfg.supersample,
    )?;
    let quantity = match cfg.subcommand {
        Subcommand::DensityMap => Quantity::Density,
        Subcommand::CurrentMap => Quantity::CurrentZ,
        _ => Quantity::CurrentVector,
    };
    let field = sample_map(quantity, cfg.method, eps, &grid, &policy_for(cfg), cfg.weighting)?;
    if let Some(path) = &cfg.out {
        let bytes = encode_map_image(cfg, &field)?;
        write_file(path, &bytes)?;
    }
    if let Some(path) = &cfg.csv {
        let mut buf = Vec::new();
        write_map_csv(&mut buf, &field, &cfg.echo_meta()).expect("in-memory write");
        write_file(path, &buf)?;
    }
    Ok(RunOutcome {
        summary: field_summary(cfg, eps),
        failures: 0,
    })
}

fn encode_map_image(cfg: &RunConfig, field: &Field2D) -> Result<Vec<u8>, CliError> {
    let bytes = match cfg.subcommand {
        Subcommand::DensityMap => encode_grayscale(field, cfg.gamma, cfg.absolute)?,
        Subcommand::CurrentMap => encode_diverging(field, cfg.absolute)?,
        _ => {
            let jrho = field.component(0)?;
            let jz = field.component(2)?;
            encode_flowmap(&jrho, &jz, cfg.absolute)?
        }
    };
    Ok(bytes)
}

fn run_profile(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let path = require_csv(cfg)?;
    let eps = cfg.epsilon_required();
    let profile = sample_profile(
        cfg.quantity,
        cfg.method,
        eps,
        cfg.z,
        cfg.rho_min,
        cfg.rho_max,
        cfg.samples,
        &policy_for(cfg),
        cfg.weighting,
    )?;
    let mut buf = Vec::new();
    write_profile_csv(&mut buf, &profile, &cfg.echo_meta()).expect("in-memory write");
    write_file(path, &buf)?;
    Ok(RunOutcome {
        summary: field_summary(cfg, eps),
        failures: 0,
    })
}

fn run_spectrum(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let path = require_csv(cfg)?;
    if !cfg.eps_min.is_finite() || !cfg.eps_max.is_finite() || cfg.eps_min >= cfg.eps_max {
        return Err(CliError::Usage(format!(
            "spectrum energy range is degenerate: [{}, {}]",
            cfg.eps_min, cfg.eps_max
        )));
    }
    if !(cfg.eps_min > 0.0) {
        return Err(CliError::Usage(format!(
            "eps_min must be positive, got {}",
            cfg.eps_min
        )));
    }
    if cfg.steps < 2 {
        return Err(CliError::Usage(format!(
            "spectrum needs at least 2 steps, got {}",
            cfg.steps
        )));
    }
    let mut buf = Vec::new();
    write_csv_preamble(&mut buf, &cfg.echo_meta()).expect("in-memory write");
    writeln!(buf, "epsilon,J_over_Jfree,flag").expect("in-memory write");
    let d = (cfg.eps_max - cfg.eps_min) / (cfg.steps - 1) as f64;
    for i in 0..cfg.steps {
        let eps = cfg.eps_min + i as f64 * d;
        // The emitted current diverges at every Landau level; rows inside
        // the gap band are flagged so plots show gaps, not spikes.
        let level = ((eps - 1.0) / 2.0).round().max(0.0);
        let near_threshold = (eps - (2.0 * level + 1.0)).abs() < SPECTRUM_GAP;
        let row = match quantum::total_current(eps) {
            Ok(j) if !near_threshold => format!("{},{},ok", csv_number(eps), csv_number(j)),
            _ => format!("{},{},divergent", csv_number(eps), csv_number(0.0)),
        };
        writeln!(buf, "{row}").expect("in-memory write");
    }
    write_file(path, &buf)?;
    Ok(RunOutcome {
        summary: format!(
            "spectrum: epsilon={}..{} steps={}",
            cfg.eps_min, cfg.eps_max, cfg.steps
        ),
        failures: 0,
    })
}

fn run_caustics(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let path = require_csv(cfg)?;
    let mut buf = Vec::new();
    write_csv_preamble(&mut buf, &cfg.echo_meta()).expect("in-memory write");
    writeln!(buf, "nu,tau,rho_hat,z_hat").expect("in-memory write");
    for nu in 0..=cfg.nu_max {
        let branch = caustic_surface(nu, cfg.samples);
        // Surfaces are mirror-symmetric; emit the +ẑ branch from equator to
        // cusp, then its −ẑ image, so each polyline plots directly.
        for sign in [1.0, -1.0] {
            for pt in &branch {
                writeln!(
                    buf,
                    "{nu},{},{},{}",
                    csv_number(pt.tau),
                    csv_number(pt.rho),
                    csv_number(sign * pt.z)
                )
                .expect("in-memory write");
            }
        }
    }
    write_file(path, &buf)?;
    Ok(RunOutcome {
        summary: format!(
            "caustics: nu_max={} samples={}",
            cfg.nu_max, cfg.samples
        ),
        failures: 0,
    })
}

fn run_trajectories(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let path = require_csv(cfg)?;
    let eps = cfg.epsilon_required();
    let p = ScaledPoint::new(cfg.rho, cfg.z).map_err(|e| CliError::Usage(e.to_string()))?;
    let orbits = orbit_contributions(&p, eps, &policy_for(cfg));
    let mut buf = Vec::new();
    write_csv_preamble(&mut buf, &cfg.echo_meta()).expect("in-memory write");
    writeln!(buf, "nu,kind,tau_re,tau_im,maslov,amplitude,phase").expect("in-memory write");
    for c in &orbits {
        writeln!(
            buf,
            "{},{},{},{},{},{},{}",
            c.nu,
            c.kind.label(),
            csv_number(c.tau.re),
            csv_number(c.tau.im),
            c.maslov,
            // Damped modulus: ghost damping is already applied, so this is
            // the weight the orbit actually carries in the sum.
            csv_number(c.value().norm()),
            csv_number(c.phase.re)
        )
        .expect("in-memory write");
    }
    write_file(path, &buf)?;
    Ok(RunOutcome {
        summary: field_summary(cfg, eps),
        failures: 0,
    })
}

// ---------------------------------------------------------------------------
// Selfcheck
// ---------------------------------------------------------------------------

struct CheckReport {
    failures: usize,
    total: usize,
}

impl CheckReport {
    fn new() -> Self {
        Self {
            failures: 0,
            total: 0,
        }
    }

    fn record(&mut self, name: &str, pass: bool, detail: String) {
        self.total += 1;
        if pass {
            println!("check {name:<48} ok");
        } else {
            self.failures += 1;
            println!("check {name:<48} FAIL: {detail}");
        }
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// The built-in invariant suite: fast cross-checks of every layer, printed
/// one per line. Returns a nonzero failure count (exit code 1) if any
/// invariant is violated.
fn run_selfcheck() -> RunOutcome {
    let mut report = CheckReport::new();

    // Published FNV-1a test vectors guard the output fingerprinting.
    report.record(
        "fnv-1a 64-bit reference vectors",
        fnv1a64(b"") == 0xcbf2_9ce4_8422_2325 && fnv1a64(b"a") == 0xaf63_dc4c_8601_ec8c,
        format!("fnv(\"\") = {:#x}", fnv1a64(b"")),
    );

    // Ai(0) = 3^(-2/3)/Γ(2/3), Ai'(0) = −3^(-1/3)/Γ(1/3).
    match airy_ai(0.0) {
        Ok((ai, aip)) => {
            let pass = (ai - 0.355_028_053_887_817_24).abs() < 1e-14
                && (aip + 0.258_819_403_792_806_8).abs() < 1e-14;
            report.record(
                "airy function at the fold point",
                pass,
                format!("Ai(0) = {ai}, Ai'(0) = {aip}"),
            );
        }
        Err(e) => report.record("airy function at the fold point", false, e.to_string()),
    }

    // Closed forms J(2) = 1/√2, J(4) = 1/√12 + 1/2 in units of J_free.
    let j2 = quantum::total_current(2.0).unwrap_or(f64::NAN);
    let j4 = quantum::total_current(4.0).unwrap_or(f64::NAN);
    report.record(
        "total current closed forms at eps = 2 and 4",
        rel_err(j2, 0.5f64.sqrt()) < 1e-12
            && rel_err(j4, 1.0 / 12.0f64.sqrt() + 0.5) < 1e-12,
        format!("J(2) = {j2}, J(4) = {j4}"),
    );

    // The source-limit current must reproduce the channel sum identically.
    let mut pass = true;
    let mut detail = String::new();
    for eps in [2.0, 50.0, 51.01] {
        let total = quantum::total_current(eps).unwrap_or(f64::NAN);
        let limit = quantum::source_limit_current(eps).unwrap_or(f64::NAN);
        if rel_err(limit, total) >= 1e-12 {
            pass = false;
            detail = format!("eps = {eps}: {limit} vs {total}");
        }
    }
    report.record("source-limit current identity", pass, detail);

    // Analytic Green gradient against central finite differences.
    {
        let eps = 10.5;
        let p = ScaledPoint::new(0.45, 1.7).unwrap();
        let h = 1e-5;
        let at = |rho: f64, z: f64| {
            quantum::green(&ScaledPoint::new(rho, z).unwrap(), eps)
                .expect("off-threshold")
                .g
        };
        let gv = quantum::green(&p, eps).expect("off-threshold");
        let fd_rho = (at(p.rho() + h, p.z()) - at(p.rho() - h, p.z())) / (2.0 * h);
        let fd_z = (at(p.rho(), p.z() + h) - at(p.rho(), p.z() - h)) / (2.0 * h);
        let pass = (gv.dg_drho - fd_rho).norm() < 1e-5 * gv.dg_drho.norm()
            && (gv.dg_dz - fd_z).norm() < 1e-5 * gv.dg_dz.norm();
        report.record(
            "green gradient vs finite differences",
            pass,
            format!("drho {} vs {fd_rho}, dz {} vs {fd_z}", gv.dg_drho, gv.dg_dz),
        );
    }

    // Every Newton flight-time root must satisfy the energy constraint.
    {
        let mut worst = 0.0f64;
        for (rho, z) in [(0.5, 2.0), (0.8, 0.3), (0.3, 5.0)] {
            let p = ScaledPoint::new(rho, z).unwrap();
            for sol in find_flight_times(&p, 20) {
                worst = worst.max((energy_hat(&p, sol.tau) - 1.0).abs());
            }
        }
        report.record(
            "flight-time roots satisfy the energy constraint",
            worst < 1e-9,
            format!("worst residual {worst:.3e}"),
        );
    }

    // Caustic parametrization: ε̂ = 1 and ε̂′ = 0 along every surface.
    {
        let mut worst = 0.0f64;
        for nu in 0..=4u32 {
            for k in 0..11 {
                let x = 0.5 * std::f64::consts::PI * (1.0 + (k as f64 + 0.5) / 11.5);
                let tau = nu as f64 * std::f64::consts::PI + x;
                let pt = caustic_point(nu, tau).expect("x inside the branch");
                let p = ScaledPoint::new(pt.rho, pt.z).unwrap();
                worst = worst
                    .max((energy_hat(&p, tau) - 1.0).abs())
                    .max(energy_hat_deriv(&p, tau).abs());
            }
        }
        report.record(
            "caustic parametrization residuals",
            worst < 1e-10,
            format!("worst residual {worst:.3e}"),
        );
    }

    // The uniform orbit sum must reproduce the exact density off caustics.
    {
        let eps = 50.0;
        let p = ScaledPoint::new(0.45, 3.3).unwrap();
        let policy = SummationPolicy::new(50_000, true, SumMode::Uniform);
        let semi = sc_density(&p, eps, &policy);
        let exact = quantum::density(&p, eps).unwrap_or(f64::NAN);
        report.record(
            "uniform orbit sum matches the green function",
            rel_err(semi, exact) < 0.05,
            format!("semiclassical {semi} vs quantum {exact}"),
        );
    }

    // ∇S = 2ε v: the dynamical phase gradient is the arrival momentum.
    {
        let eps = 3.0;
        let h = 1e-6;
        let s_at = |rho: f64, z: f64| -> f64 {
            let p = ScaledPoint::new(rho, z).unwrap();
            match interval_solutions(&p, 1) {
                IntervalOutcome::Pair { fast, .. } => dynamical_phase(&fast, &p, eps),
                _ => f64::NAN,
            }
        };
        let p = ScaledPoint::new(0.6, 1.0).unwrap();
        let (grad_rho, grad_z) = (
            (s_at(0.6 + h, 1.0) - s_at(0.6 - h, 1.0)) / (2.0 * h),
            (s_at(0.6, 1.0 + h) - s_at(0.6, 1.0 - h)) / (2.0 * h),
        );
        let fast = match interval_solutions(&p, 1) {
            IntervalOutcome::Pair { fast, .. } => fast,
            _ => unreachable!("pair exists at (0.6, 1.0)"),
        };
        let v = velocity(&p, &fast);
        let scale = 2.0 * eps;
        let pass = (grad_rho - scale * v[0]).abs() < 1e-4 * scale
            && (grad_z - scale * v[2]).abs() < 1e-4 * scale;
        report.record(
            "phase gradient equals arrival momentum",
            pass,
            format!(
                "grad S = ({grad_rho}, {grad_z}), 2 eps v = ({}, {})",
                scale * v[0],
                scale * v[2]
            ),
        );
    }

    RunOutcome {
        summary: format!(
            "selfcheck: {} checks, {} failures",
            report.total, report.failures
        ),
        failures: report.failures,
    }
}
