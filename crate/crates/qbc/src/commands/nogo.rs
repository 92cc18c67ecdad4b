//! `qbc nogo`: composite-system checks for codes with n ≤ 3.

use qbc_core::codes::{Bit, BuiltinCode};
use qbc_core::nogo::{self, CompositeSystem, LocalInvarianceReport};
use qbc_core::protocol::BobMode;
use qbc_core::seeding::master_rng;
use serde::Serialize;

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::Sink;

#[derive(Debug, Serialize)]
struct Overlaps {
    /// `tr(ρ₀^α ρ₁^α)`.
    alpha: f64,
    /// Overlap of Bob's two reduced states after `U_B`.
    bob: f64,
    trace_distance: f64,
}

#[derive(Debug, Serialize)]
struct PosteriorRow {
    config_hash: String,
    seed: u64,
    known: usize,
    mean_max_posterior: f64,
}

#[derive(Debug, Serialize)]
struct NogoResult {
    code: String,
    r: String,
    modes: String,
    legitimate: bool,
    invariance: LocalInvarianceReport,
    overlaps: Overlaps,
    posteriors: Vec<PosteriorRow>,
}

pub fn parse_modes(text: &str, n: usize) -> CliResult<Vec<BobMode>> {
    let modes = text
        .chars()
        .map(|c| match c {
            'B' | 'b' => Ok(BobMode::Bypass),
            'I' | 'i' => Ok(BobMode::Intercept),
            other => Err(CliError::Config(format!("key `modes`: unexpected character {other:?}"))),
        })
        .collect::<CliResult<Vec<_>>>()?;
    if modes.len() != n {
        return Err(CliError::Config(format!("key `modes`: need {n} modes, got {}", modes.len())));
    }
    Ok(modes)
}

pub fn execute(cfg: &Config, sink: &Sink) -> CliResult<()> {
    let named = cfg.code(BuiltinCode::Repetition3)?;
    let code = &named.code;
    let system = CompositeSystem::new(code.n())?;
    let r = cfg.mask(code)?;
    let modes_text = match cfg.str_opt("modes")? {
        Some(m) => m.to_string(),
        None => "B".repeat(code.n()),
    };
    let modes = parse_modes(&modes_text, code.n())?;
    let legitimate_only = cfg.bool_or("legitimate_only", false)?;
    let intercepts = modes.iter().filter(|m| **m == BobMode::Intercept).count();
    let legitimate = intercepts < code.n().saturating_sub(code.d());
    if legitimate_only {
        let state = system.committed_state(code, &r, Bit::Zero)?;
        nogo::apply_legitimate_ub(&system, code, &modes, &state)?;
    }

    let unitaries = cfg.usize_or("unitaries", 100)?;
    let mut rng = master_rng(cfg.seed()?);
    let invariance = nogo::alice_local_invariance(&system, &modes, code, &r, unitaries, &mut rng)?;
    let alpha = nogo::overlap(&nogo::rho_alpha(code, &r, Bit::Zero)?, &nogo::rho_alpha(code, &r, Bit::One)?)?;
    let overlaps = Overlaps {
        alpha,
        bob: invariance.overlap,
        trace_distance: invariance.trace_distance,
    };
    let posteriors = (0..=code.n())
        .map(|known| {
            Ok(PosteriorRow {
                config_hash: sink.config_hash.clone(),
                seed: sink.seed,
                known,
                mean_max_posterior: nogo::mean_max_posterior(code, &r, known)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let result = NogoResult {
        code: named.name.clone(),
        r: r.to_string(),
        modes: modes_text,
        legitimate,
        invariance,
        overlaps,
        posteriors,
    };
    sink.emit(&result, &result.posteriors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_strings() {
        assert_eq!(
            parse_modes("BiI", 3).unwrap(),
            [BobMode::Bypass, BobMode::Intercept, BobMode::Intercept]
        );
        assert!(parse_modes("BB", 3).is_err());
        assert!(parse_modes("BXB", 3).is_err());
    }
}
