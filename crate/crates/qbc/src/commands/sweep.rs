//! `qbc sweep`: binding, concealing and efficiency over codes × R × f.

use std::io::Write;

use qbc_core::codes::BuiltinCode;
use qbc_core::protocol::{self, BindingReport, BobPolicy, ConcealingReport};
use serde::Serialize;

use super::par_trials;
use crate::config::{Config, NamedCode};
use crate::error::{CliError, CliResult};
use crate::output::Sink;

const DEFAULT_TRIALS: u64 = 2_000;

/// Column order of the sweep CSV.
#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub config_hash: String,
    pub seed: u64,
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub r: String,
    #[serde(rename = "R")]
    pub reflectivity: f64,
    pub f: f64,
    pub epsilon: f64,
    pub threshold: f64,
    pub p: f64,
    pub trials: u64,
    pub cheat_accept: f64,
    pub cheat_proceed_trials: u64,
    pub cheat_accept_given_proceed: f64,
    pub predicted_given_proceed: f64,
    pub predicted_unconditional: f64,
    pub honest_abort_rate: f64,
    pub bob_posterior_max: f64,
    pub s_over_n: usize,
    pub photons_current: f64,
    pub photons_prior: f64,
    pub photon_ratio: Option<f64>,
    pub duration_ratio: f64,
}

fn codes(cfg: &Config) -> CliResult<Vec<NamedCode>> {
    if cfg.contains("codes") {
        if cfg.contains("code") || cfg.contains("code_file") {
            return Err(CliError::Config("set either `codes` or `code`/`code_file`".into()));
        }
        return cfg
            .str_list_or("codes", Vec::new())?
            .iter()
            .map(|name| NamedCode::builtin(name))
            .collect();
    }
    Ok(vec![cfg.code(BuiltinCode::ExtendedHamming84)?])
}

pub fn execute(cfg: &Config, sink: &Sink) -> CliResult<()> {
    let codes = codes(cfg)?;
    let r_grid = cfg.f64_list_or("R_grid", vec![cfg.f64_or("R", 0.3)?])?;
    let f_grid = cfg.f64_list_or("f_grid", vec![cfg.f64_or("f", 0.5)?])?;
    let trials = cfg.trials(DEFAULT_TRIALS)?;
    let s_over_n = cfg.usize_or("s_over_n", 10)?;

    let mut rows = Vec::new();
    for named in &codes {
        for &reflectivity in &r_grid {
            for &f in &f_grid {
                let params = cfg.params(&named.code, reflectivity, f)?;
                let binding = par_trials(trials, |t| protocol::binding_trial(&params, t))?;
                let binding = BindingReport::aggregate(&params, &binding)?;
                let concealing = par_trials(trials, |t| protocol::concealing_trial(&params, &BobPolicy::Honest, t))?;
                let concealing = ConcealingReport::aggregate(BobPolicy::Honest, &concealing);
                let eff = protocol::efficiency_metrics(params.code().n(), f, s_over_n)?;
                rows.push(SweepRow {
                    config_hash: sink.config_hash.clone(),
                    seed: sink.seed,
                    code: named.name.clone(),
                    n: params.code().n(),
                    k: params.code().k(),
                    d: params.code().d(),
                    r: params.r().to_string(),
                    reflectivity,
                    f,
                    epsilon: params.epsilon(),
                    threshold: params.threshold(),
                    p: binding.p,
                    trials,
                    cheat_accept: binding.accept.rate,
                    cheat_proceed_trials: binding.accept_given_proceed.trials,
                    cheat_accept_given_proceed: binding.accept_given_proceed.rate,
                    predicted_given_proceed: binding.predicted_given_proceed,
                    predicted_unconditional: binding.predicted_unconditional,
                    honest_abort_rate: concealing.abort.rate,
                    bob_posterior_max: concealing.mean_posterior_max,
                    s_over_n,
                    photons_current: eff.photons_current,
                    photons_prior: eff.photons_prior,
                    photon_ratio: eff.photon_ratio,
                    duration_ratio: eff.duration_ratio,
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::Config("grid is empty".into()));
    }
    sink.emit(&rows, &rows)?;
    writeln!(sink.summary(), "sweep: {} grid points", rows.len())?;
    Ok(())
}
