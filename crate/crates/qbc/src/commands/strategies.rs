//! `qbc strategies`: detection probabilities of the resend strategies.

use qbc_core::optics::BeamSplitterParams;
use qbc_core::seeding::master_rng;
use qbc_core::strategies::{self, MAX_ANCILLA_DIM};
use serde::Serialize;

use super::R_GRID;
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::Sink;

#[derive(Debug, Serialize)]
struct Row {
    config_hash: String,
    seed: u64,
    strategy: String,
    #[serde(rename = "R")]
    reflectivity: f64,
    /// `0`, `1`, or `mean` for the bit average.
    bit: String,
    detection_prob: f64,
}

#[derive(Debug, Serialize)]
struct SearchRow {
    #[serde(rename = "R")]
    reflectivity: f64,
    ancilla_dim: usize,
    starts: usize,
    best_strategy: String,
    detection_prob: f64,
    causal_best: f64,
    closed_form_best: f64,
}

#[derive(Debug, Serialize)]
struct StrategiesResult {
    table: Vec<strategies::StrategyRow>,
    search: Vec<SearchRow>,
}

pub fn execute(cfg: &Config, sink: &Sink) -> CliResult<()> {
    let grid = cfg.f64_list_or("R_grid", R_GRID.to_vec())?;
    let family = strategies::closed_form_family();
    let table = strategies::strategy_table(&family, &grid)?;

    let mut search = Vec::new();
    if cfg.contains("search_ancilla") {
        let ancilla = cfg.usize_or("search_ancilla", 1)?;
        if !(1..=MAX_ANCILLA_DIM).contains(&ancilla) {
            return Err(CliError::Guard(format!(
                "search_ancilla must lie in 1..={MAX_ANCILLA_DIM}, got {ancilla}"
            )));
        }
        let starts = cfg.usize_or("search_trials", 8)?;
        let mut rng = master_rng(cfg.seed()?);
        for &r in &grid {
            let beam = BeamSplitterParams::new(r)?;
            let out = strategies::search_epsilon(ancilla, starts, &mut rng, &beam)?;
            search.push(SearchRow {
                reflectivity: r,
                ancilla_dim: ancilla,
                starts,
                best_strategy: out.strategy.label(),
                detection_prob: out.detection_prob,
                causal_best: out.causal_best,
                closed_form_best: out.closed_form_best,
            });
        }
    }

    let stamp = |strategy: String, reflectivity: f64, bit: String, detection_prob: f64| Row {
        config_hash: sink.config_hash.clone(),
        seed: sink.seed,
        strategy,
        reflectivity,
        bit,
        detection_prob,
    };
    let mut rows: Vec<Row> = table
        .iter()
        .map(|t| stamp(t.strategy.clone(), t.reflectivity, t.bit.to_string(), t.detection_prob))
        .collect();
    rows.extend(search.iter().map(|s| {
        stamp(
            format!("search_a{}", s.ancilla_dim),
            s.reflectivity,
            "mean".into(),
            s.detection_prob,
        )
    }));
    sink.emit(&StrategiesResult { table, search }, &rows)
}
