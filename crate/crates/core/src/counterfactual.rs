//! Counterfactual mode probing through a chained beam-splitter approximation
//! of the fictitious beam splitter (FBS), and Bob's random-phase defense.
//!
//! The probe photon starts on path `a`. Each of the `M` cycles rotates
//! `(a, b)` by `η = π / 2M`; path `b` runs through Bob's channel. If Bob
//! intercepts, path `b` is blocked and its amplitude is lost every cycle, so
//! the photon ends on `d` (detector `Dd`) with probability `cos^{2M}(η)`. If
//! Bob bypasses, path `b` only picks up his phase `θ` per cycle and, for
//! `θ = 0`, the rotations add up to `π/2` and the photon exits at `Dc`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
// inherent float methods shadow this when std is linked
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{self, Bit};
use crate::optics::{self, BeamSplitterParams, DetectionDistribution, Rail};
use crate::protocol::{self, AlicePolicy, Announcement, BobMode, BobPolicy, ProtocolParams, UnveilVerdict};
use crate::seeding::trial_rng;
use crate::{Error, Result};

/// Tolerance for probability conservation.
pub const CONSERVATION_TOL: f64 = 1e-12;
/// θ grid used for the averaged defense transfer.
pub const DEFAULT_THETA_GRID: usize = 360;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FbsConfig {
    cycles: usize,
    theta_per_cycle: f64,
}

impl FbsConfig {
    pub fn new(cycles: usize, theta_per_cycle: f64) -> Result<Self> {
        if cycles == 0 {
            return Err(Error::InvalidParameter("FBS needs at least one cycle".into()));
        }
        if !theta_per_cycle.is_finite() {
            return Err(Error::InvalidParameter(format!("theta must be finite, got {theta_per_cycle}")));
        }
        Ok(Self {
            cycles,
            theta_per_cycle,
        })
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    pub fn theta_per_cycle(&self) -> f64 {
        self.theta_per_cycle
    }

    pub fn with_theta(self, theta_per_cycle: f64) -> Result<Self> {
        Self::new(self.cycles, theta_per_cycle)
    }

    /// Per-cycle rotation angle `π / 2M`.
    pub fn eta(&self) -> f64 {
        FRAC_PI_2 / self.cycles as f64
    }
}

/// Probe amplitudes on paths `a` and `b`, plus the mass lost to blocking.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeState {
    pub amp_a: Complex64,
    pub amp_b: Complex64,
    pub absorbed: f64,
}

impl ProbeState {
    pub fn injected() -> Self {
        Self {
            amp_a: Complex64::new(1.0, 0.0),
            amp_b: Complex64::new(0.0, 0.0),
            absorbed: 0.0,
        }
    }

    pub fn total_probability(&self) -> f64 {
        self.amp_a.norm_sqr() + self.amp_b.norm_sqr() + self.absorbed
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FbsEvent {
    Dc,
    Dd,
    Absorbed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FbsOutcome {
    pub dc: f64,
    pub dd: f64,
    pub absorbed: f64,
}

impl FbsOutcome {
    pub fn total(&self) -> f64 {
        self.dc + self.dd + self.absorbed
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FbsEvent {
        let u: f64 = rng.random::<f64>() * self.total();
        if u < self.dc {
            FbsEvent::Dc
        } else if u < self.dc + self.dd {
            FbsEvent::Dd
        } else {
            FbsEvent::Absorbed
        }
    }
}

/// Run the probe through `M` cycles.
pub fn fbs_evolve(config: &FbsConfig, blocked: bool) -> ProbeState {
    let (s, c) = config.eta().sin_cos();
    let phase = Complex64::from_polar(1.0, config.theta_per_cycle);
    let mut st = ProbeState::injected();
    for _ in 0..config.cycles {
        let a = st.amp_a * c - st.amp_b * s;
        let b = st.amp_a * s + st.amp_b * c;
        st.amp_a = a;
        if blocked {
            st.absorbed += b.norm_sqr();
            st.amp_b = Complex64::new(0.0, 0.0);
        } else {
            st.amp_b = b * phase;
        }
    }
    st
}

/// Detector probabilities after `M` cycles.
pub fn fbs_run(config: &FbsConfig, blocked: bool) -> FbsOutcome {
    let st = fbs_evolve(config, blocked);
    FbsOutcome {
        dc: st.amp_b.norm_sqr(),
        dd: st.amp_a.norm_sqr(),
        absorbed: st.absorbed,
    }
}

/// `cos^{2M}(π / 2M)`.
pub fn blocked_pass_closed_form(cycles: usize) -> f64 {
    (FRAC_PI_2 / cycles as f64).cos().powi(2 * cycles as i32)
}

/// Largest shortfall from the ideal device: certain `Dc` when unblocked with
/// `θ = 0`, certain `Dd` when blocked.
pub fn fbs_ideal_deviation(cycles: usize) -> Result<f64> {
    let cfg = FbsConfig::new(cycles, 0.0)?;
    let open = fbs_run(&cfg, false);
    let shut = fbs_run(&cfg, true);
    Ok((1.0 - open.dc).max(1.0 - shut.dd))
}

/// `P(Dc)` for an unblocked path averaged over `points` equally spaced
/// phases in `[0, 2π)`.
pub fn mean_dc_over_theta(cycles: usize, points: usize) -> Result<f64> {
    if points == 0 {
        return Err(Error::InvalidParameter("theta grid is empty".into()));
    }
    let mut sum = 0.0;
    for k in 0..points {
        let theta = TAU * k as f64 / points as f64;
        sum += fbs_run(&FbsConfig::new(cycles, theta)?, false).dc;
    }
    Ok(sum / points as f64)
}

/// Honest detection statistics when Bob's defense adds `e^{iθ}` on both rails.
pub fn defense_honest_invariance(bit: Bit, theta: f64, params: &BeamSplitterParams) -> Result<DetectionDistribution> {
    if !(0.0..TAU).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta must lie in [0, 2π), got {theta}")));
    }
    let state = Rail::BOTH
        .into_iter()
        .fold(optics::encode(bit, params), |s, rail| optics::phase_apply(&s, rail, theta));
    optics::detection_distribution(&state, params)
}

/// One session of the probing attack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackSession {
    pub positions: usize,
    pub correct_labels: usize,
    pub labeled_bypass: usize,
    /// Bits Alice changed in her cheating unveil, if she found a candidate.
    pub flips: Option<usize>,
    pub cheat_success: bool,
}

/// Alice commits honestly, probes every position with a parallel FBS photon
/// and labels it bypass iff `Dc` clicks. She then tries to unveil the
/// opposite bit with the nearest codeword that only differs on positions
/// labeled bypass.
pub fn attack_session<R: Rng + ?Sized>(
    params: &ProtocolParams,
    defense_on: bool,
    fbs: &FbsConfig,
    rng: &mut R,
) -> Result<AttackSession> {
    let params = params.clone().with_phase_defense(defense_on);
    let b = Bit::from(rng.random_bool(0.5));
    let transcript = protocol::run_commit(&AlicePolicy::FbsProbe(b), &BobPolicy::Honest, &params, rng)?;

    let mut labels = Vec::with_capacity(transcript.n());
    for mode in &transcript.modes {
        let outcome = match mode {
            BobMode::Intercept => fbs_run(fbs, true),
            BobMode::Bypass if defense_on => fbs_run(&fbs.with_theta(rng.random::<f64>() * TAU)?, false),
            BobMode::Bypass => fbs_run(fbs, false),
        };
        labels.push(match outcome.sample(rng) {
            FbsEvent::Dc => BobMode::Bypass,
            _ => BobMode::Intercept,
        });
    }
    let correct_labels = labels.iter().zip(&transcript.modes).filter(|(a, b)| a == b).count();
    let free_mask = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == BobMode::Bypass)
        .fold(0u64, |m, (i, _)| m | (1 << i));

    let target = b.flip();
    let sent = transcript.codeword;
    let candidate = params
        .split()
        .class(target)
        .iter()
        .filter(|c| (c.word() ^ sent.word()) & !free_mask == 0)
        .min_by_key(|c| (c.word() ^ sent.word()).count_ones())
        .copied();
    let (flips, cheat_success) = match candidate {
        Some(c) => {
            let verdict = protocol::run_unveil(&params, &transcript, &Announcement { b: target, c })?;
            (Some(c.distance(&sent)?), verdict == UnveilVerdict::Accept)
        }
        None => (None, false),
    };
    Ok(AttackSession {
        positions: transcript.n(),
        correct_labels,
        labeled_bypass: labels.iter().filter(|l| **l == BobMode::Bypass).count(),
        flips,
        cheat_success,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    #[serde(rename = "M")]
    pub cycles: usize,
    pub defense_on: bool,
    pub trials: u64,
    pub mode_accuracy: f64,
    pub cheat_success_rate: f64,
    /// Mean `P(Dc)` for a bypassed probe: `θ = 0` without the defense, the
    /// average over the θ grid with it.
    #[serde(rename = "mean_Dc_bypass")]
    pub mean_dc_bypass: f64,
    /// Mean number of bits changed in attempted cheats.
    pub mean_flips: f64,
    /// Half the code distance, the flips a midpoint would need.
    pub flip_budget: f64,
}

impl AttackReport {
    pub fn aggregate(
        params: &ProtocolParams,
        defense_on: bool,
        fbs: &FbsConfig,
        sessions: &[AttackSession],
    ) -> Result<Self> {
        let positions: usize = sessions.iter().map(|s| s.positions).sum();
        let correct: usize = sessions.iter().map(|s| s.correct_labels).sum();
        let flips: Vec<usize> = sessions.iter().filter_map(|s| s.flips).collect();
        let successes = sessions.iter().filter(|s| s.cheat_success).count();
        let ratio = |num: f64, den: usize| if den == 0 { f64::NAN } else { num / den as f64 };
        let mean_dc_bypass = if defense_on {
            mean_dc_over_theta(fbs.cycles, DEFAULT_THETA_GRID)?
        } else {
            fbs_run(&fbs.with_theta(0.0)?, false).dc
        };
        Ok(Self {
            cycles: fbs.cycles,
            defense_on,
            trials: sessions.len() as u64,
            mode_accuracy: ratio(correct as f64, positions),
            cheat_success_rate: ratio(successes as f64, sessions.len()),
            mean_dc_bypass,
            mean_flips: ratio(flips.iter().sum::<usize>() as f64, flips.len()),
            flip_budget: params.code().d() as f64 / 2.0,
        })
    }
}

/// `trials` attack sessions, session `t` on stream `t` of the seed.
pub fn attack_experiment(
    params: &ProtocolParams,
    defense_on: bool,
    fbs: &FbsConfig,
    trials: u64,
) -> Result<AttackReport> {
    let sessions = (0..trials)
        .map(|t| attack_session(params, defense_on, fbs, &mut trial_rng(params.seed(), t)))
        .collect::<Result<Vec<_>>>()?;
    AttackReport::aggregate(params, defense_on, fbs, &sessions)
}

/// Nearest-codeword flips the attack needs at minimum: the code distance.
pub fn min_cheat_flips(params: &ProtocolParams) -> Result<usize> {
    let (a, b) = codes::min_distance_cross_pair(params.code(), params.r())?;
    a.distance(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::BuiltinCode;
    use crate::optics::DetectionEvent;
    use crate::seeding::master_rng;

    #[test]
    fn unblocked_zero_phase_exits_at_dc() {
        for m in [1, 2, 7, 25, 100, 1000] {
            let out = fbs_run(&FbsConfig::new(m, 0.0).unwrap(), false);
            assert!((out.dc - 1.0).abs() < 1e-12, "M = {m}: {out:?}");
            assert!((out.total() - 1.0).abs() < CONSERVATION_TOL);
        }
    }

    #[test]
    fn blocked_matches_closed_form() {
        for m in [1, 5, 25, 100] {
            let out = fbs_run(&FbsConfig::new(m, 0.0).unwrap(), true);
            assert!((out.dd - blocked_pass_closed_form(m)).abs() < 1e-12);
            assert_eq!(out.dc, 0.0);
            assert!((out.total() - 1.0).abs() < CONSERVATION_TOL);
        }
        assert!((blocked_pass_closed_form(25) - 0.906).abs() < 1e-3);
    }

    #[test]
    fn convergence_on_doubling_grid() {
        let mut prev = f64::INFINITY;
        for m in [1, 2, 4, 8, 16, 32, 64, 128, 256] {
            let dev = fbs_ideal_deviation(m).unwrap();
            assert!(dev <= prev + 1e-15);
            prev = dev;
        }
        assert!(fbs_ideal_deviation(100).unwrap() <= 0.05);
        assert!(fbs_ideal_deviation(100_000).unwrap() < 1e-4);
    }

    #[test]
    fn theta_average_suppresses_dc() {
        let mean = mean_dc_over_theta(100, 360).unwrap();
        assert!(mean < 0.9, "{mean}");
        assert!(mean_dc_over_theta(100, 0).is_err());
    }

    #[test]
    fn phase_keeps_total_probability() {
        let out = fbs_run(&FbsConfig::new(40, 1.1).unwrap(), false);
        assert!((out.total() - 1.0).abs() < CONSERVATION_TOL);
        assert_eq!(out.absorbed, 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(FbsConfig::new(0, 0.0).is_err());
        assert!(FbsConfig::new(3, f64::NAN).is_err());
    }

    #[test]
    fn defense_is_invisible_to_honest_alice() {
        let params = BeamSplitterParams::asymmetric(0.3).unwrap();
        let d = defense_honest_invariance(Bit::Zero, 1.234, &params).unwrap();
        assert!((d.prob(DetectionEvent::ClickD0(1)) - 1.0).abs() < 1e-12);
        assert_eq!(d.len(), 1);
        assert!(defense_honest_invariance(Bit::Zero, TAU, &params).is_err());
    }

    fn params(f: f64) -> ProtocolParams {
        ProtocolParams::new(
            BuiltinCode::ExtendedHamming84.code(),
            "10000000".parse().unwrap(),
            0.3,
            f,
            None,
            9,
        )
        .unwrap()
    }

    #[test]
    fn probing_without_defense_identifies_modes() {
        let fbs = FbsConfig::new(400, 0.0).unwrap();
        let rep = attack_experiment(&params(0.1), false, &fbs, 200).unwrap();
        assert!(rep.mode_accuracy >= 0.99, "{rep:?}");
        assert!(rep.cheat_success_rate > 0.0);
        assert_eq!(rep.flip_budget, 2.0);
    }

    #[test]
    fn defense_degrades_probing() {
        let fbs = FbsConfig::new(100, 0.0).unwrap();
        let off = attack_experiment(&params(0.1), false, &fbs, 200).unwrap();
        let on = attack_experiment(&params(0.1), true, &fbs, 200).unwrap();
        assert!(on.mode_accuracy < off.mode_accuracy);
        assert!(on.cheat_success_rate < off.cheat_success_rate);
        assert!(on.mean_dc_bypass < 0.9);
    }

    #[test]
    fn intercepted_probe_never_reaches_dc() {
        let fbs = FbsConfig::new(10, 0.0).unwrap();
        let mut rng = master_rng(1);
        let s = attack_session(&params(1.0), true, &fbs, &mut rng).unwrap();
        assert_eq!(s.labeled_bypass, 0);
        assert!(!s.cheat_success);
        assert_eq!(min_cheat_flips(&params(1.0)).unwrap(), 4);
    }
}
