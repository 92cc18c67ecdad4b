//! `qbc counterfactual`: the mode-probing attack and FBS transfer curves.

use std::f64::consts::TAU;

use qbc_core::codes::BuiltinCode;
use qbc_core::counterfactual::{self, AttackReport, FbsConfig, DEFAULT_THETA_GRID};
use qbc_core::seeding::trial_rng;
use serde::Serialize;

use super::par_trials;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::Sink;

const DEFAULT_TRIALS: u64 = 1_000;
const DEFAULT_CYCLES: [usize; 4] = [1, 5, 25, 100];

#[derive(Debug, Serialize)]
struct AttackRow {
    config_hash: String,
    seed: u64,
    #[serde(rename = "M")]
    cycles: usize,
    defense_on: bool,
    trials: u64,
    mode_accuracy: f64,
    cheat_success_rate: f64,
    #[serde(rename = "mean_Dc_bypass")]
    mean_dc_bypass: f64,
    mean_flips: f64,
    flip_budget: f64,
}

#[derive(Debug, Serialize)]
struct TransferRow {
    config_hash: String,
    seed: u64,
    #[serde(rename = "M")]
    cycles: usize,
    theta: f64,
    dc: f64,
    dd: f64,
    absorbed: f64,
}

fn defenses(cfg: &Config) -> CliResult<Vec<bool>> {
    match cfg.str_opt("defense")?.unwrap_or("both") {
        "off" => Ok(vec![false]),
        "on" => Ok(vec![true]),
        "both" => Ok(vec![false, true]),
        other => Err(CliError::Config(format!("key `defense`: expected off, on or both, got {other:?}"))),
    }
}

fn cycles_grid(cfg: &Config) -> CliResult<Vec<usize>> {
    let grid = if cfg.contains("cycles") {
        vec![cfg.usize_or("cycles", 1)?]
    } else {
        cfg.usize_list_or("cycles_grid", DEFAULT_CYCLES.to_vec())?
    };
    if grid.contains(&0) {
        return Err(CliError::Config("cycle counts must be positive".into()));
    }
    Ok(grid)
}

fn attack(cfg: &Config, sink: &Sink) -> CliResult<()> {
    let named = cfg.code(BuiltinCode::ExtendedHamming84)?;
    let params = cfg.params(&named.code, cfg.f64_or("R", 0.3)?, cfg.f64_or("f", 0.5)?)?;
    let trials = cfg.trials(DEFAULT_TRIALS)?;
    let mut reports = Vec::new();
    for cycles in cycles_grid(cfg)? {
        let fbs = FbsConfig::new(cycles, 0.0)?;
        for defense_on in defenses(cfg)? {
            let sessions = par_trials(trials, |t| {
                counterfactual::attack_session(&params, defense_on, &fbs, &mut trial_rng(params.seed(), t))
            })?;
            reports.push(AttackReport::aggregate(&params, defense_on, &fbs, &sessions)?);
        }
    }
    let rows: Vec<AttackRow> = reports
        .iter()
        .map(|r| AttackRow {
            config_hash: sink.config_hash.clone(),
            seed: sink.seed,
            cycles: r.cycles,
            defense_on: r.defense_on,
            trials: r.trials,
            mode_accuracy: r.mode_accuracy,
            cheat_success_rate: r.cheat_success_rate,
            mean_dc_bypass: r.mean_dc_bypass,
            mean_flips: r.mean_flips,
            flip_budget: r.flip_budget,
        })
        .collect();
    sink.emit(&reports, &rows)
}

fn transfer(cfg: &Config, sink: &Sink) -> CliResult<()> {
    let points = cfg.usize_or("theta_points", DEFAULT_THETA_GRID)?;
    if points == 0 {
        return Err(CliError::Config("key `theta_points`: grid is empty".into()));
    }
    let mut rows = Vec::new();
    for cycles in cycles_grid(cfg)? {
        for k in 0..points {
            let theta = TAU * k as f64 / points as f64;
            let out = counterfactual::fbs_run(&FbsConfig::new(cycles, theta)?, false);
            rows.push(TransferRow {
                config_hash: sink.config_hash.clone(),
                seed: sink.seed,
                cycles,
                theta,
                dc: out.dc,
                dd: out.dd,
                absorbed: out.absorbed,
            });
        }
    }
    sink.emit(&rows, &rows)
}

pub fn execute(cfg: &Config, sink: &Sink) -> CliResult<()> {
    match cfg.str_opt("table")?.unwrap_or("attack") {
        "attack" => attack(cfg, sink),
        "transfer" => transfer(cfg, sink),
        other => Err(CliError::Config(format!("key `table`: expected attack or transfer, got {other:?}"))),
    }
}
