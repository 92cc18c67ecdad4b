//! `qbc run`: one commit session and its unveil.

use std::io::Write;

use qbc_core::codes::{self, Bit, BuiltinCode};
use qbc_core::protocol::{
    self, AlicePolicy, AliceVerdict, Announcement, BobPolicy, ProtocolParams, SessionTranscript, UnveilVerdict,
};
use qbc_core::seeding::trial_rng;
use serde::Serialize;

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::Sink;

#[derive(Debug, Serialize)]
struct RunResult {
    code: String,
    n: usize,
    k: usize,
    d: usize,
    r: String,
    #[serde(rename = "R")]
    reflectivity: f64,
    f: f64,
    epsilon: f64,
    threshold: f64,
    alice: AlicePolicy,
    bob: BobPolicy,
    strategy: String,
    transcript: SessionTranscript,
    announcement: Option<Announcement>,
    /// `None` when Alice aborted during commit.
    unveil: Option<UnveilVerdict>,
}

#[derive(Debug, Serialize)]
struct PositionRow {
    config_hash: String,
    seed: u64,
    position: usize,
    sent_bit: u8,
    mode: String,
    intercepted_bit: String,
    alice_event: String,
    mismatch: bool,
}

#[derive(Debug, Serialize)]
struct CodewordRow {
    bits: String,
    parity: u8,
}

fn bit(cfg: &Config) -> CliResult<Bit> {
    let v = cfg.u64_or("bit", 0)?;
    u8::try_from(v)
        .ok()
        .and_then(|v| Bit::from_u8(v).ok())
        .ok_or_else(|| CliError::Config(format!("key `bit`: expected 0 or 1, got {v}")))
}

pub fn alice_policy(cfg: &Config) -> CliResult<AlicePolicy> {
    let b = bit(cfg)?;
    match cfg.str_opt("alice")?.unwrap_or("honest") {
        "honest" => Ok(AlicePolicy::Honest(b)),
        "midpoint" => Ok(AlicePolicy::MidpointCheat),
        other => Err(CliError::Config(format!("key `alice`: unknown policy {other:?}"))),
    }
}

pub fn bob_policy(cfg: &Config) -> CliResult<BobPolicy> {
    match cfg.str_opt("bob")?.unwrap_or("honest") {
        "honest" => Ok(BobPolicy::Honest),
        "full" => Ok(BobPolicy::FullIntercept),
        "partial" => {
            if !cfg.contains("m") {
                return Err(CliError::Config("key `m` is required for bob = \"partial\"".into()));
            }
            Ok(BobPolicy::PartialIntercept(cfg.usize_or("m", 0)?))
        }
        other => Err(CliError::Config(format!("key `bob`: unknown policy {other:?}"))),
    }
}

fn write_codewords(cfg: &Config, params: &ProtocolParams, path: &str) -> CliResult<()> {
    let mut w = csv::Writer::from_path(cfg.resolve_path(path))?;
    for c in params.code().codewords()? {
        w.serialize(CodewordRow {
            bits: c.to_string(),
            parity: codes::parity(&c, params.r())?.as_u8(),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn execute(cfg: &Config, sink: &Sink) -> CliResult<()> {
    let named = cfg.code(BuiltinCode::ExtendedHamming84)?;
    let reflectivity = cfg.f64_or("R", 0.3)?;
    let f = cfg.f64_or("f", 0.1)?;
    let params = cfg.params(&named.code, reflectivity, f)?;
    let alice = alice_policy(cfg)?;
    let bob = bob_policy(cfg)?;
    if let Some(path) = cfg.str_opt("codewords_out")? {
        write_codewords(cfg, &params, path)?;
    }

    let mut rng = trial_rng(params.seed(), 0);
    let transcript = protocol::run_commit(&alice, &bob, &params, &mut rng)?;
    let announcement = match (alice, transcript.alice_verdict) {
        (_, AliceVerdict::AbortCheatingBob) => None,
        (AlicePolicy::MidpointCheat, _) => {
            let b = bit(cfg)?;
            let (c0, c1) = transcript
                .midpoint_pair
                .ok_or_else(|| CliError::Output("midpoint session without a codeword pair".into()))?;
            Some(Announcement {
                b,
                c: if b == Bit::Zero { c0 } else { c1 },
            })
        }
        _ => Some(Announcement::honest(&transcript)),
    };
    let unveil = announcement
        .as_ref()
        .map(|a| protocol::run_unveil(&params, &transcript, a))
        .transpose()?;

    let result = RunResult {
        code: named.name.clone(),
        n: params.code().n(),
        k: params.code().k(),
        d: params.code().d(),
        r: params.r().to_string(),
        reflectivity,
        f,
        epsilon: params.epsilon(),
        threshold: params.threshold(),
        alice,
        bob,
        strategy: params.strategy().label(),
        transcript,
        announcement,
        unveil,
    };
    let t = &result.transcript;
    let rows: Vec<PositionRow> = (0..t.n())
        .map(|i| PositionRow {
            config_hash: sink.config_hash.clone(),
            seed: sink.seed,
            position: i,
            sent_bit: t.codeword.get(i).as_u8(),
            mode: format!("{:?}", t.modes[i]),
            intercepted_bit: t.bob_records[i]
                .as_ref()
                .and_then(|r| r.learned_bit)
                .map(|b| b.to_string())
                .unwrap_or_default(),
            alice_event: format!("{:?}", t.alice_events[i]),
            mismatch: t.alice_events[i].is_mismatch(t.codeword.get(i)),
        })
        .collect();
    sink.emit(&result, &rows)?;
    summarize(&mut sink.summary(), &result)?;
    Ok(())
}

fn summarize(w: &mut dyn Write, r: &RunResult) -> CliResult<()> {
    let t = &r.transcript;
    let unveil = r.unveil.map_or("skipped (aborted)".to_string(), |v| format!("{v:?}"));
    writeln!(w, "code        {} [n={}, k={}, d={}]", r.code, r.n, r.k, r.d)?;
    writeln!(w, "r           {}", r.r)?;
    writeln!(w, "R           {}", r.reflectivity)?;
    writeln!(w, "f           {}", r.f)?;
    writeln!(w, "epsilon     {}", r.epsilon)?;
    writeln!(w, "committed   {}", t.committed_b)?;
    writeln!(w, "codeword    {}", t.codeword)?;
    writeln!(w, "mismatches  n'={}", t.n_mismatch)?;
    writeln!(w, "f_estimate  {:.6} (threshold {:.6})", t.f_estimate, r.threshold)?;
    writeln!(w, "verdict     {:?}", t.alice_verdict)?;
    writeln!(w, "unveil      {unveil}")?;
    Ok(())
}
