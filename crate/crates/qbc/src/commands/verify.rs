//! `qbc verify`: the invariant suite, one PASS/FAIL line per check.

use std::f64::consts::TAU;
use std::io::{self, Write};

use qbc_core::codes::{self, Bit, BitString, BuiltinCode, LinearCode};
use qbc_core::counterfactual::{self, FbsConfig};
use qbc_core::nogo::{self, CompositeSystem};
use qbc_core::optics::{self, BeamSplitterParams, Convention};
use qbc_core::protocol::{self, BobMode};
use qbc_core::seeding::{master_rng, trial_rng};
use qbc_core::strategies::ResendStrategy;
use rand::Rng;
use serde::Serialize;

use super::R_GRID;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::Sink;

const MASKS_PER_CODE: usize = 5;
const FBS_CYCLES: [usize; 4] = [1, 5, 25, 100];
const PHASES: usize = 100;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances {
    pub tol_determinism: f64,
    pub tol_orthogonality: f64,
    pub tol_invariance: f64,
    pub tol_fbs: f64,
    pub tol_sigma: f64,
    pub tol_phase: f64,
}

impl Tolerances {
    fn from_config(cfg: &Config) -> CliResult<Self> {
        Ok(Self {
            tol_determinism: cfg.f64_or("tol_determinism", 1e-12)?,
            tol_orthogonality: cfg.f64_or("tol_orthogonality", 1e-12)?,
            tol_invariance: cfg.f64_or("tol_invariance", 1e-9)?,
            tol_fbs: cfg.f64_or("tol_fbs", 1e-12)?,
            tol_sigma: cfg.f64_or("tol_sigma", 3.0)?,
            tol_phase: cfg.f64_or("tol_phase", 1e-12)?,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    /// Worst observed value of the checked quantity.
    pub observed: f64,
    pub tolerance: f64,
}

impl Check {
    fn at_most(name: &'static str, observed: f64, tolerance: f64) -> Self {
        Self {
            name,
            pass: observed <= tolerance,
            observed,
            tolerance,
        }
    }
}

#[derive(Debug, Serialize)]
struct VerifyResult {
    convention: Convention,
    tolerances: Tolerances,
    checks: Vec<Check>,
}

#[derive(Debug, Serialize)]
struct CheckRow {
    config_hash: String,
    seed: u64,
    check: &'static str,
    pass: bool,
    observed: f64,
    tolerance: f64,
}

fn convention(cfg: &Config) -> CliResult<Convention> {
    match cfg.str_opt("convention")?.unwrap_or("standard") {
        "standard" => Ok(Convention::Standard),
        "real_reflection" => Ok(Convention::RealReflection),
        other => Err(CliError::Config(format!("key `convention`: unknown convention {other:?}"))),
    }
}

/// Largest mismatch probability of an honest photon over the R grid.
fn mz_determinism(convention: Convention, tol: f64) -> CliResult<Check> {
    let mut worst = 0.0f64;
    for r in R_GRID {
        let beam = BeamSplitterParams::new(r)?;
        for bit in [Bit::Zero, Bit::One] {
            let d = optics::detection_distribution_with(&optics::encode(bit, &beam), &beam, convention)?;
            worst = worst.max(d.mismatch_prob(bit));
        }
    }
    Ok(Check::at_most("mz_determinism", worst, tol))
}

/// `tr(ρ₀^α ρ₁^α)` for every builtin code and a few seeded masks.
fn orthogonality(seed: u64, tol: f64) -> CliResult<Check> {
    let mut rng = master_rng(seed);
    let mut worst = 0.0f64;
    for builtin in BuiltinCode::ALL {
        let code = builtin.code();
        let n = code.n();
        let mut tested = 0;
        while tested < MASKS_PER_CODE {
            let r = BitString::from_word(n, rng.random_range(1..(1u64 << n)))?;
            let split = codes::coset_split(&code, &r)?;
            if split.class(Bit::Zero).is_empty() || split.class(Bit::One).is_empty() {
                continue;
            }
            let rho0 = nogo::rho_alpha(&code, &r, Bit::Zero)?;
            let rho1 = nogo::rho_alpha(&code, &r, Bit::One)?;
            worst = worst.max(nogo::overlap(&rho0, &rho1)?.abs());
            tested += 1;
        }
    }
    Ok(Check::at_most("orthogonality", worst, tol))
}

/// Bob's reduced state under random `β` unitaries for repetition codes of
/// length 1 to 3, with mixed bypass and intercept modes.
fn beta_local_invariance(seed: u64, unitaries: usize, tol: f64) -> CliResult<Check> {
    let mut rng = master_rng(seed);
    let mut worst = 0.0f64;
    for n in 1..=nogo::MAX_COMPOSITE_N {
        let code = LinearCode::from_text_rows(&["1".repeat(n)])?;
        let r = BitString::from_word(n, 1)?;
        let system = CompositeSystem::new(n)?;
        let modes: Vec<BobMode> = (0..n)
            .map(|i| if i % 2 == 0 { BobMode::Intercept } else { BobMode::Bypass })
            .collect();
        let report = nogo::alice_local_invariance(&system, &modes, &code, &r, unitaries, &mut rng)?;
        worst = worst.max(report.max_deviation);
    }
    Ok(Check::at_most("beta_local_invariance", worst, tol))
}

/// Blocked `P(Dd)` against `cos^{2M}(π/2M)` and unblocked `P(Dc)` against 1.
fn fbs_convergence(tol: f64) -> CliResult<Check> {
    let mut worst = 0.0f64;
    for m in FBS_CYCLES {
        let cfg = FbsConfig::new(m, 0.0)?;
        let blocked = counterfactual::fbs_run(&cfg, true).dd;
        worst = worst.max((blocked - counterfactual::blocked_pass_closed_form(m)).abs());
        worst = worst.max((1.0 - counterfactual::fbs_run(&cfg, false).dc).abs());
    }
    Ok(Check::at_most("fbs_convergence", worst, tol))
}

/// Empirical `P(intercept | clean)` at `f = ε = 1/2`, in standard errors
/// from the predicted 1/3.
fn posterior_oracle(seed: u64, positions: u64, sigmas: f64) -> CliResult<Check> {
    let beam = BeamSplitterParams::asymmetric(0.3)?;
    let est = protocol::estimate_intercept_posterior(
        0.5,
        0.5,
        &ResendStrategy::BlindGuessOnTime,
        &beam,
        positions,
        seed,
    )?;
    let p = est.predicted;
    let n = est.intercepted_given_clean.trials as f64;
    let z = (est.intercepted_given_clean.rate - p).abs() / (p * (1.0 - p) / n).sqrt();
    Ok(Check::at_most("posterior_oracle", z, sigmas))
}

/// Honest detection statistics under Bob's random global phase.
fn global_phase(seed: u64, tol: f64) -> CliResult<Check> {
    let mut rng = trial_rng(seed, 1);
    let mut worst = 0.0f64;
    for r in R_GRID {
        let beam = BeamSplitterParams::new(r)?;
        for bit in [Bit::Zero, Bit::One] {
            let plain = optics::detection_distribution(&optics::encode(bit, &beam), &beam)?;
            for _ in 0..PHASES {
                let theta = rng.random::<f64>() * TAU;
                let shifted = counterfactual::defense_honest_invariance(bit, theta, &beam)?;
                worst = worst.max(plain.max_deviation(&shifted));
            }
        }
    }
    Ok(Check::at_most("global_phase", worst, tol))
}

pub fn execute(cfg: &Config, sink: &Sink) -> CliResult<()> {
    let tol = Tolerances::from_config(cfg)?;
    let convention = convention(cfg)?;
    let seed = cfg.seed()?;
    let checks = vec![
        mz_determinism(convention, tol.tol_determinism)?,
        orthogonality(seed, tol.tol_orthogonality)?,
        beta_local_invariance(seed, cfg.usize_or("unitaries", 20)?, tol.tol_invariance)?,
        fbs_convergence(tol.tol_fbs)?,
        posterior_oracle(seed, cfg.trials(20_000)?, tol.tol_sigma)?,
        global_phase(seed, tol.tol_phase)?,
    ];

    let mut out = io::stdout().lock();
    writeln!(out, "config_hash {} seed {}", sink.config_hash, sink.seed)?;
    writeln!(
        out,
        "tolerances tol_determinism={:e} tol_orthogonality={:e} tol_invariance={:e} tol_fbs={:e} tol_sigma={} tol_phase={:e}",
        tol.tol_determinism, tol.tol_orthogonality, tol.tol_invariance, tol.tol_fbs, tol.tol_sigma, tol.tol_phase
    )?;
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        writeln!(out, "{status} {} observed={:e} tolerance={:e}", c.name, c.observed, c.tolerance)?;
    }
    out.flush()?;
    drop(out);

    if sink.to_file() {
        let rows: Vec<CheckRow> = checks
            .iter()
            .map(|c| CheckRow {
                config_hash: sink.config_hash.clone(),
                seed: sink.seed,
                check: c.name,
                pass: c.pass,
                observed: c.observed,
                tolerance: c.tolerance,
            })
            .collect();
        let result = VerifyResult {
            convention,
            tolerances: tol,
            checks,
        };
        sink.emit(&result, &rows)?;
        return fail_on(&result.checks);
    }
    fail_on(&checks)
}

fn fail_on(checks: &[Check]) -> CliResult<()> {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed.join(", ")))
    }
}
