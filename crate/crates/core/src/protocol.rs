//! Commit and unveil phases, the sender's mismatch estimator, and the
//! binding/concealing experiments.
//!
//! Roles follow the protocol: Alice commits by sending one photon per bit of a
//! codeword and measures what comes back; Bob either lets each photon pass
//! (bypass) or intercepts and resends it. Alice continues only when her
//! estimate of Bob's intercept frequency stays strictly below `1 - d/n`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

// inherent float methods shadow this when std is linked
#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{self, Bit, BitString, CosetSplit, LinearCode};
use crate::nogo::{bob_bit_posterior, Posterior};
use crate::optics::{self, BeamSplitterParams, DetectionEvent, Rail};
use crate::seeding::trial_rng;
use crate::stats::Proportion;
use crate::strategies::{self, InterceptRecord, ResendStrategy};
use crate::{Error, Result};

/// z-value used for the Wilson intervals in reports.
pub const REPORT_Z: f64 = 3.0;

/// Session parameters agreed before the commit phase.
#[derive(Clone, Debug)]
pub struct ProtocolParams {
    code: LinearCode,
    r: BitString,
    split: CosetSplit,
    beam: BeamSplitterParams,
    f: f64,
    epsilon: f64,
    seed: u64,
    strategy: ResendStrategy,
    phase_defense: bool,
}

impl ProtocolParams {
    /// Parameters for the asymmetric protocol configuration. `epsilon`
    /// defaults to the closed-form strategy minimum at this reflectivity.
    pub fn new(
        code: LinearCode,
        r: BitString,
        reflectivity: f64,
        f: f64,
        epsilon: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        let beam = BeamSplitterParams::asymmetric(reflectivity)?;
        Self::build(code, r, beam, f, epsilon, seed)
    }

    /// Like [`ProtocolParams::new`] but also accepts `R = T`, for experiments
    /// that deliberately use a balanced splitter.
    pub fn symmetric_allowed(
        code: LinearCode,
        r: BitString,
        reflectivity: f64,
        f: f64,
        epsilon: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        let beam = BeamSplitterParams::new(reflectivity)?;
        Self::build(code, r, beam, f, epsilon, seed)
    }

    fn build(
        code: LinearCode,
        r: BitString,
        beam: BeamSplitterParams,
        f: f64,
        epsilon: Option<f64>,
        seed: u64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidParameter(format!("f must lie in [0, 1], got {f}")));
        }
        let epsilon = epsilon.unwrap_or_else(|| strategies::default_epsilon(&beam));
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        let split = codes::coset_split(&code, &r)?;
        Ok(Self {
            code,
            r,
            split,
            beam,
            f,
            epsilon,
            seed,
            strategy: ResendStrategy::BlindGuessOnTime,
            phase_defense: false,
        })
    }

    /// Resend strategy Bob uses whenever he intercepts.
    pub fn with_strategy(mut self, strategy: ResendStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    /// Bob adds a secret random common phase to both rails in bypass mode.
    pub fn with_phase_defense(mut self, on: bool) -> Self {
        self.phase_defense = on;
        self
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn r(&self) -> &BitString {
        &self.r
    }

    pub fn split(&self) -> &CosetSplit {
        &self.split
    }

    pub fn beam(&self) -> &BeamSplitterParams {
        &self.beam
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn strategy(&self) -> &ResendStrategy {
        &self.strategy
    }

    pub fn phase_defense(&self) -> bool {
        self.phase_defense
    }

    /// `1 - d/n`.
    pub fn threshold(&self) -> f64 {
        self.code.threshold()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlicePolicy {
    Honest(Bit),
    /// Commit a word half-way between two codewords of opposite parity.
    MidpointCheat,
    /// Honest photons; the mode probe itself lives in
    /// [`crate::counterfactual`].
    FbsProbe(Bit),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BobPolicy {
    /// Intercept each photon independently with probability `f`.
    Honest,
    /// Intercept every photon.
    FullIntercept,
    /// Intercept exactly `m` uniformly chosen positions.
    PartialIntercept(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BobMode {
    Bypass,
    Intercept,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AliceVerdict {
    Continue,
    AbortCheatingBob,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionTranscript {
    /// Parity of the sent word under `r`.
    pub committed_b: Bit,
    /// The word Alice actually encoded; a codeword unless she cheats.
    pub codeword: BitString,
    pub modes: Vec<BobMode>,
    pub bob_records: Vec<Option<InterceptRecord>>,
    pub alice_events: Vec<DetectionEvent>,
    pub n_mismatch: usize,
    pub f_estimate: f64,
    pub alice_verdict: AliceVerdict,
    /// For the midpoint cheat: the two codewords `(parity 0, parity 1)` the
    /// committed word sits between.
    pub midpoint_pair: Option<(BitString, BitString)>,
}

impl SessionTranscript {
    pub fn n(&self) -> usize {
        self.codeword.len()
    }

    /// Positions where Alice saw a mismatch.
    pub fn mismatch_positions(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.alice_events[i].is_mismatch(self.codeword.get(i)))
            .collect()
    }

    /// Positions Bob intercepted together with the bit he learned there.
    pub fn known_to_bob(&self) -> (Vec<usize>, Vec<Bit>) {
        self.bob_records
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().and_then(|r| r.learned_bit).map(|b| (i, b)))
            .unzip()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Announcement {
    pub b: Bit,
    pub c: BitString,
}

impl Announcement {
    pub fn honest(transcript: &SessionTranscript) -> Self {
        Self {
            b: transcript.committed_b,
            c: transcript.codeword,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnveilVerdict {
    Accept,
    RejectParity,
    RejectNotCodeword,
    RejectInterceptMismatch,
}

fn intercept_modes<R: Rng + ?Sized>(
    bob: &BobPolicy,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<Vec<BobMode>> {
    let n = params.code.n();
    Ok(match *bob {
        BobPolicy::Honest => (0..n)
            .map(|_| {
                if rng.random_bool(params.f) {
                    BobMode::Intercept
                } else {
                    BobMode::Bypass
                }
            })
            .collect(),
        BobPolicy::FullIntercept => alloc::vec![BobMode::Intercept; n],
        BobPolicy::PartialIntercept(m) => {
            if m > n {
                return Err(Error::PolicyMismatch(format!(
                    "cannot intercept {m} of {n} positions"
                )));
            }
            let mut modes = alloc::vec![BobMode::Bypass; n];
            for i in index::sample(rng, n, m) {
                modes[i] = BobMode::Intercept;
            }
            modes
        }
    })
}

/// Run the commit phase for one session.
pub fn run_commit<R: Rng + ?Sized>(
    alice: &AlicePolicy,
    bob: &BobPolicy,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<SessionTranscript> {
    let (word, midpoint_pair) = match *alice {
        AlicePolicy::Honest(b) | AlicePolicy::FbsProbe(b) => {
            (codes::sample_codeword(&params.split, b, rng)?, None)
        }
        AlicePolicy::MidpointCheat => {
            let (_, shift) = codes::min_distance_cross_pair(&params.code, &params.r)
                .map_err(|e| Error::PolicyMismatch(format!("midpoint cheat: {e}")))?;
            let base = codes::sample_codeword(&params.split, Bit::Zero, rng)?;
            let partner = base.xor(&shift)?;
            (codes::midpoint_word(&base, &partner)?, Some((base, partner)))
        }
    };
    let committed_b = codes::parity(&word, &params.r)?;
    let modes = intercept_modes(bob, params, rng)?;

    let n = word.len();
    let mut bob_records = Vec::with_capacity(n);
    let mut alice_events = Vec::with_capacity(n);
    for (i, mode) in modes.iter().enumerate() {
        let sent = optics::encode(word.get(i), &params.beam);
        let (returned, record) = match mode {
            BobMode::Bypass if params.phase_defense => {
                let theta = rng.random::<f64>() * TAU;
                let shifted = Rail::BOTH
                    .into_iter()
                    .fold(sent, |s, rail| optics::phase_apply(&s, rail, theta));
                (shifted, None)
            }
            BobMode::Bypass => (sent, None),
            BobMode::Intercept => {
                let rec = strategies::apply_strategy(&params.strategy, &sent, &params.beam, rng)?;
                (rec.resent.clone(), Some(rec))
            }
        };
        alice_events.push(optics::sample_detection(&returned, &params.beam, rng)?);
        bob_records.push(record);
    }

    let n_mismatch = alice_events
        .iter()
        .enumerate()
        .filter(|(i, e)| e.is_mismatch(word.get(*i)))
        .count();
    let f_estimate = n_mismatch as f64 / (params.epsilon * n as f64);
    // strict: equality with the threshold is treated as cheating
    let alice_verdict = if f_estimate < params.threshold() {
        AliceVerdict::Continue
    } else {
        AliceVerdict::AbortCheatingBob
    };
    Ok(SessionTranscript {
        committed_b,
        codeword: word,
        modes,
        bob_records,
        alice_events,
        n_mismatch,
        f_estimate,
        alice_verdict,
        midpoint_pair,
    })
}

/// Bob's checks, in order: membership, parity, agreement with every
/// intercepted bit.
pub fn run_unveil(
    params: &ProtocolParams,
    transcript: &SessionTranscript,
    announcement: &Announcement,
) -> Result<UnveilVerdict> {
    let n = params.code.n();
    for len in [announcement.c.len(), transcript.n()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, actual: len });
        }
    }
    if !params.code.contains(&announcement.c) {
        return Ok(UnveilVerdict::RejectNotCodeword);
    }
    if codes::parity(&announcement.c, &params.r)? != announcement.b {
        return Ok(UnveilVerdict::RejectParity);
    }
    let (positions, values) = transcript.known_to_bob();
    if positions
        .iter()
        .zip(&values)
        .any(|(&i, &v)| announcement.c.get(i) != v)
    {
        return Ok(UnveilVerdict::RejectInterceptMismatch);
    }
    Ok(UnveilVerdict::Accept)
}

/// Probability that a position with no observed mismatch was intercepted:
/// `p = (f - eps f) / (1 - eps f)`.
pub fn intercept_posterior_p(f: f64, epsilon: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) || !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "need f, epsilon in [0, 1], got f = {f}, epsilon = {epsilon}"
        )));
    }
    let seen = epsilon * f;
    if seen >= 1.0 {
        return Err(Error::InvalidParameter("epsilon * f must be below 1".into()));
    }
    Ok((f - seen) / (1.0 - seen))
}

/// Chance that altering `flips` unobserved positions goes unnoticed:
/// `(1 - p)^flips`.
pub fn escape_probability(p: f64, flips: u32) -> f64 {
    (1.0 - p).powi(flips as i32)
}

/// Empirical check of the posterior `p` on independent photons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorEstimate {
    pub positions: u64,
    /// Intercepted among positions without a mismatch.
    pub intercepted_given_clean: Proportion,
    pub predicted: f64,
}

/// Simulate `positions` independent photons with intercept probability `f`
/// and count how often a clean (mismatch-free) position was intercepted.
/// Position `i` uses stream `i` of the seed.
pub fn estimate_intercept_posterior(
    f: f64,
    epsilon: f64,
    strategy: &ResendStrategy,
    beam: &BeamSplitterParams,
    positions: u64,
    seed: u64,
) -> Result<PosteriorEstimate> {
    let predicted = intercept_posterior_p(f, epsilon)?;
    let mut clean = 0u64;
    let mut clean_intercepted = 0u64;
    for i in 0..positions {
        let mut rng = trial_rng(seed, i);
        let bit = Bit::from(rng.random_bool(0.5));
        let sent = optics::encode(bit, beam);
        let intercepted = rng.random_bool(f);
        let returned = if intercepted {
            strategies::apply_strategy(strategy, &sent, beam, &mut rng)?.resent
        } else {
            sent
        };
        let event = optics::sample_detection(&returned, beam, &mut rng)?;
        if !event.is_mismatch(bit) {
            clean += 1;
            clean_intercepted += u64::from(intercepted);
        }
    }
    Ok(PosteriorEstimate {
        positions,
        intercepted_given_clean: Proportion::new(clean_intercepted, clean, REPORT_Z),
        predicted,
    })
}

/// Outcome of one midpoint-cheat session.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingTrial {
    pub flips: u32,
    /// No mismatch was seen on any position Alice has to flip.
    pub proceed: bool,
    pub accepted: bool,
}

pub fn binding_trial(params: &ProtocolParams, trial: u64) -> Result<BindingTrial> {
    let mut rng = trial_rng(params.seed, trial);
    let transcript = run_commit(&AlicePolicy::MidpointCheat, &BobPolicy::Honest, params, &mut rng)?;
    let (zero, one) = transcript.midpoint_pair.expect("midpoint cheat records its pair");
    let target_bit = Bit::from(rng.random_bool(0.5));
    let target = match target_bit {
        Bit::Zero => zero,
        Bit::One => one,
    };
    let flips = transcript.codeword.differing_positions(&target)?;
    let mismatched = transcript.mismatch_positions();
    let proceed = flips.iter().all(|i| !mismatched.contains(i));
    let verdict = run_unveil(
        params,
        &transcript,
        &Announcement {
            b: target_bit,
            c: target,
        },
    )?;
    Ok(BindingTrial {
        flips: flips.len() as u32,
        proceed,
        accepted: verdict == UnveilVerdict::Accept,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingReport {
    pub trials: u64,
    pub accept: Proportion,
    /// Accept rate restricted to sessions with no mismatch on flipped positions.
    pub accept_given_proceed: Proportion,
    pub mean_flips: f64,
    pub p: f64,
    /// `(1 - p)^flips`, averaged over the two unveil targets.
    pub predicted_given_proceed: f64,
    /// `(1 - f)^flips`, averaged over the two unveil targets.
    pub predicted_unconditional: f64,
}

impl BindingReport {
    pub fn aggregate(params: &ProtocolParams, outcomes: &[BindingTrial]) -> Result<Self> {
        let p = intercept_posterior_p(params.f, params.epsilon)?;
        let (zero, one) = codes::min_distance_cross_pair(&params.code, &params.r)?;
        let h = zero.distance(&one)? as u32;
        let sides = [h.div_ceil(2), h / 2];
        let mean = |g: &dyn Fn(u32) -> f64| sides.iter().map(|&k| g(k)).sum::<f64>() / 2.0;
        let trials = outcomes.len() as u64;
        let accepted = outcomes.iter().filter(|o| o.accepted).count() as u64;
        let proceed = outcomes.iter().filter(|o| o.proceed).count() as u64;
        let accepted_proceed = outcomes.iter().filter(|o| o.proceed && o.accepted).count() as u64;
        let mean_flips = if trials == 0 {
            f64::NAN
        } else {
            outcomes.iter().map(|o| o.flips as f64).sum::<f64>() / trials as f64
        };
        Ok(Self {
            trials,
            accept: Proportion::new(accepted, trials, REPORT_Z),
            accept_given_proceed: Proportion::new(accepted_proceed, proceed, REPORT_Z),
            mean_flips,
            p,
            predicted_given_proceed: mean(&|k| escape_probability(p, k)),
            predicted_unconditional: mean(&|k| escape_probability(params.f, k)),
        })
    }
}

/// Midpoint cheat against an honest Bob, `trials` independent sessions.
pub fn run_binding_experiment(params: &ProtocolParams, trials: u64) -> Result<BindingReport> {
    let outcomes = (0..trials)
        .map(|t| binding_trial(params, t))
        .collect::<Result<Vec<_>>>()?;
    BindingReport::aggregate(params, &outcomes)
}

/// Outcome of one session against a partially intercepting Bob.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcealingTrial {
    pub aborted: bool,
    /// Bob's posterior probability of the true committed bit.
    pub posterior_true: f64,
    /// Bob's larger posterior value.
    pub posterior_max: f64,
}

pub fn concealing_trial(params: &ProtocolParams, bob: &BobPolicy, trial: u64) -> Result<ConcealingTrial> {
    let mut rng = trial_rng(params.seed, trial);
    let b = Bit::from(rng.random_bool(0.5));
    let transcript = run_commit(&AlicePolicy::Honest(b), bob, params, &mut rng)?;
    let (positions, values) = transcript.known_to_bob();
    let (p0, p1) = match bob_bit_posterior(&params.code, &params.r, &positions, &values)? {
        Posterior::Distribution { p0, p1 } => (p0, p1),
        Posterior::Impossible => unreachable!("Bob's record is consistent with the sent codeword"),
    };
    Ok(ConcealingTrial {
        aborted: transcript.alice_verdict == AliceVerdict::AbortCheatingBob,
        posterior_true: if b == Bit::Zero { p0 } else { p1 },
        posterior_max: p0.max(p1),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcealingReport {
    pub trials: u64,
    pub bob: BobPolicy,
    pub abort: Proportion,
    pub mean_posterior_true: f64,
    pub mean_posterior_max: f64,
    /// Mean larger posterior over sessions Alice let continue.
    pub mean_posterior_max_continued: f64,
}

impl ConcealingReport {
    pub fn aggregate(bob: BobPolicy, outcomes: &[ConcealingTrial]) -> Self {
        let trials = outcomes.len() as u64;
        let mean = |it: &mut dyn Iterator<Item = f64>| {
            let (s, c) = it.fold((0.0, 0u64), |(s, c), v| (s + v, c + 1));
            if c == 0 {
                f64::NAN
            } else {
                s / c as f64
            }
        };
        Self {
            trials,
            bob,
            abort: Proportion::new(
                outcomes.iter().filter(|o| o.aborted).count() as u64,
                trials,
                REPORT_Z,
            ),
            mean_posterior_true: mean(&mut outcomes.iter().map(|o| o.posterior_true)),
            mean_posterior_max: mean(&mut outcomes.iter().map(|o| o.posterior_max)),
            mean_posterior_max_continued: mean(
                &mut outcomes.iter().filter(|o| !o.aborted).map(|o| o.posterior_max),
            ),
        }
    }
}

/// Honest Alice against a Bob who intercepts `m` positions per session.
pub fn run_concealing_experiment(params: &ProtocolParams, m: usize, trials: u64) -> Result<ConcealingReport> {
    run_concealing_experiment_with(params, BobPolicy::PartialIntercept(m), trials)
}

/// Honest Alice against any Bob policy: abort rate and Bob's posterior.
pub fn run_concealing_experiment_with(
    params: &ProtocolParams,
    bob: BobPolicy,
    trials: u64,
) -> Result<ConcealingReport> {
    let outcomes = (0..trials)
        .map(|t| concealing_trial(params, &bob, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConcealingReport::aggregate(bob, &outcomes))
}

/// Resource comparison with a protocol that needs `s` photon slots.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub n: usize,
    pub s: usize,
    pub f: f64,
    pub photons_current: f64,
    pub photons_prior: f64,
    /// Commit duration in units of the mode-switch time.
    pub duration_current: f64,
    pub duration_prior: f64,
    /// `s f / (n f)`; undefined when `f = 0`.
    pub photon_ratio: Option<f64>,
    pub duration_ratio: f64,
}

/// Resent-photon count `n f` and duration `n` against `s f` and `s`, with
/// `s = s_over_n * n`. The ratios reduce to `s / n`, and are computed that way
/// so that they come out exact.
pub fn efficiency_metrics(n: usize, f: f64, s_over_n: usize) -> Result<EfficiencyReport> {
    if n == 0 || s_over_n == 0 || !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter(format!(
            "need n > 0, s/n > 0, f in [0, 1]; got n = {n}, s/n = {s_over_n}, f = {f}"
        )));
    }
    let s = n * s_over_n;
    let ratio = s as f64 / n as f64;
    Ok(EfficiencyReport {
        n,
        s,
        f,
        photons_current: n as f64 * f,
        photons_prior: s as f64 * f,
        duration_current: n as f64,
        duration_prior: s as f64,
        photon_ratio: (f > 0.0).then_some(ratio),
        duration_ratio: ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::BuiltinCode;
    use crate::seeding::master_rng;

    fn hamming84(f: f64, eps: f64, seed: u64) -> ProtocolParams {
        ProtocolParams::new(
            BuiltinCode::ExtendedHamming84.code(),
            "10000000".parse().unwrap(),
            0.3,
            f,
            Some(eps),
            seed,
        )
        .unwrap()
    }

    #[test]
    fn honest_session_is_clean_and_accepted() {
        let params = hamming84(0.0, 0.5, 1);
        let mut rng = master_rng(1);
        for b in [Bit::Zero, Bit::One] {
            let t = run_commit(&AlicePolicy::Honest(b), &BobPolicy::Honest, &params, &mut rng).unwrap();
            assert_eq!(t.n_mismatch, 0);
            assert_eq!(t.alice_verdict, AliceVerdict::Continue);
            assert_eq!(t.committed_b, b);
            let v = run_unveil(&params, &t, &Announcement::honest(&t)).unwrap();
            assert_eq!(v, UnveilVerdict::Accept);
        }
    }

    #[test]
    fn unveil_rejections() {
        let params = hamming84(0.0, 0.5, 2);
        let mut rng = master_rng(2);
        let t = run_commit(
            &AlicePolicy::Honest(Bit::One),
            &BobPolicy::FullIntercept,
            &params,
            &mut rng,
        )
        .unwrap();
        let honest = Announcement::honest(&t);
        assert_eq!(run_unveil(&params, &t, &honest).unwrap(), UnveilVerdict::Accept);

        let not_codeword = Announcement {
            b: honest.b,
            c: honest.c.with(0, honest.c.get(0).flip()),
        };
        assert_eq!(
            run_unveil(&params, &t, &not_codeword).unwrap(),
            UnveilVerdict::RejectNotCodeword
        );

        let wrong_parity = Announcement {
            b: honest.b.flip(),
            c: honest.c,
        };
        assert_eq!(run_unveil(&params, &t, &wrong_parity).unwrap(), UnveilVerdict::RejectParity);

        // another codeword of the same parity differs at some intercepted position
        let other = params
            .split()
            .class(Bit::One)
            .iter()
            .find(|c| **c != honest.c)
            .copied()
            .unwrap();
        let flipped = Announcement { b: Bit::One, c: other };
        assert_eq!(
            run_unveil(&params, &t, &flipped).unwrap(),
            UnveilVerdict::RejectInterceptMismatch
        );

        let short = Announcement {
            b: Bit::Zero,
            c: "000".parse().unwrap(),
        };
        assert!(run_unveil(&params, &t, &short).is_err());
    }

    #[test]
    fn verdict_boundary_aborts() {
        // n = 8, d = 4, eps = 0.5: two mismatches put f_estimate exactly on 1 - d/n
        let params = hamming84(1.0, 0.5, 3);
        let mut seen_two = false;
        for seed in 0..200 {
            let mut rng = master_rng(seed);
            let t = run_commit(
                &AlicePolicy::Honest(Bit::Zero),
                &BobPolicy::FullIntercept,
                &params,
                &mut rng,
            )
            .unwrap();
            assert_eq!(
                t.alice_verdict == AliceVerdict::Continue,
                t.n_mismatch <= 1,
                "n' = {}",
                t.n_mismatch
            );
            assert!((t.f_estimate - t.n_mismatch as f64 / 4.0).abs() < 1e-15);
            seen_two |= t.n_mismatch == 2;
        }
        assert!(seen_two);
    }

    #[test]
    fn policy_mismatch_errors() {
        let params = hamming84(0.1, 0.5, 4);
        let mut rng = master_rng(4);
        assert!(matches!(
            run_commit(&AlicePolicy::Honest(Bit::Zero), &BobPolicy::PartialIntercept(9), &params, &mut rng),
            Err(Error::PolicyMismatch(_))
        ));
        let rep = ProtocolParams::new(
            BuiltinCode::Repetition3.code(),
            "110".parse().unwrap(),
            0.3,
            0.1,
            None,
            0,
        )
        .unwrap();
        assert!(matches!(
            run_commit(&AlicePolicy::MidpointCheat, &BobPolicy::Honest, &rep, &mut rng),
            Err(Error::PolicyMismatch(_))
        ));
    }

    #[test]
    fn params_validation() {
        let code = BuiltinCode::Hamming74.code();
        let r: BitString = "1000000".parse().unwrap();
        assert!(ProtocolParams::new(code.clone(), "0000000".parse().unwrap(), 0.3, 0.1, None, 0).is_err());
        assert!(ProtocolParams::new(code.clone(), r, 0.5, 0.1, None, 0).is_err());
        assert!(ProtocolParams::symmetric_allowed(code.clone(), r, 0.5, 0.1, None, 0).is_ok());
        assert!(ProtocolParams::new(code.clone(), r, 0.3, 1.5, None, 0).is_err());
        assert!(ProtocolParams::new(code.clone(), r, 0.3, 0.1, Some(0.0), 0).is_err());
        let p = ProtocolParams::new(code, r, 0.3, 0.1, None, 0).unwrap();
        assert!((p.epsilon() - 0.3).abs() < 1e-12);
        assert!((p.threshold() - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_formula() {
        assert!((intercept_posterior_p(0.5, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(intercept_posterior_p(0.3, 0.0).unwrap(), 0.3);
        assert_eq!(intercept_posterior_p(0.0, 0.7).unwrap(), 0.0);
        assert!(intercept_posterior_p(1.0, 1.0).is_err());
        assert!(intercept_posterior_p(-0.1, 0.5).is_err());
    }

    #[test]
    fn escape_formula() {
        assert_eq!(escape_probability(0.4, 0), 1.0);
        assert_eq!(escape_probability(1.0, 3), 0.0);
        assert!((escape_probability(1.0 / 3.0, 2) - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn binding_edge_cases() {
        let never = run_binding_experiment(&hamming84(0.0, 0.5, 5), 200).unwrap();
        assert_eq!(never.accept.rate, 1.0);
        assert_eq!(never.mean_flips, 2.0);

        let always = run_binding_experiment(&hamming84(1.0, 1e-9, 6), 200).unwrap();
        assert_eq!(always.accept.rate, 0.0);
        assert!(always.predicted_given_proceed < 1e-6);
    }

    #[test]
    fn concealing_edge_cases() {
        let params = hamming84(0.0, 0.5, 7);
        let none = run_concealing_experiment(&params, 0, 100).unwrap();
        assert!((none.mean_posterior_max - 0.5).abs() < 1e-15);
        assert_eq!(none.abort.rate, 0.0);
        let all = run_concealing_experiment(&params, 8, 300).unwrap();
        assert_eq!(all.mean_posterior_true, 1.0);
    }

    #[test]
    fn efficiency_examples() {
        let e = efficiency_metrics(8, 0.25, 10).unwrap();
        assert_eq!(e.photons_current, 2.0);
        assert_eq!(e.photons_prior, 20.0);
        assert_eq!(e.photon_ratio, Some(10.0));
        assert_eq!(e.duration_ratio, 10.0);
        let z = efficiency_metrics(8, 0.0, 10).unwrap();
        assert_eq!((z.photons_current, z.photons_prior, z.photon_ratio), (0.0, 0.0, None));
        assert!(efficiency_metrics(0, 0.1, 10).is_err());
    }
}
