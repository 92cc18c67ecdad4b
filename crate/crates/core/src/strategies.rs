//! Receiver-side intercept-resend strategies.
//!
//! In intercept mode the receiver measures the incoming photon with a copy of
//! the sender's interferometer, which decodes the bit with certainty but only
//! once the `Y` packet has arrived at bin 1. Whatever goes back must leave on
//! `X` at bin 0 and on `Y` at bin 1 to arrive on time, so the `X` part is
//! committed before the bit is known.
//!
//! Each strategy is reduced to an exact mixture of single-photon states sent
//! back to the sender; detection probabilities follow from
//! [`optics::detection_distribution`].

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// inherent float methods shadow this when std is linked
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::Bit;
use crate::linalg::{perturb_unitary, random_unitary, CMatrix};
use crate::optics::{self, BeamSplitterParams, Mode, PhotonState, Rail};
use crate::{Error, Result};

/// Largest ancilla the causal search will use.
pub const MAX_ANCILLA_DIM: usize = 4;
const UNITARY_TOL: f64 = 1e-10;
/// Fidelity an incoming state needs to count as an honest encoding.
const ENCODING_FIDELITY: f64 = 1.0 - 1e-9;

/// Which rail a single-channel resend uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RailPolicy {
    /// Pick, per intercepted bit, the rail with the lower mismatch rate.
    OptimalPerBit,
    Fixed(Rail),
}

/// Two-stage unitary model of a causal resend device.
///
/// The device holds one photon to emit and an ancilla of dimension `A`. Its
/// location register has basis `{held, out}`, and joint basis vectors are
/// ordered `location * A + ancilla`.
///
/// * `release` acts on `{held, X-out} x ancilla` at bin 0, before the bit is
///   known. Whatever reaches `X-out` is gone.
/// * Once the bit `b` is known, `idle[b]` evolves the ancilla on the branch
///   where the photon already left, and `route[b]` acts on
///   `{held, Y-out} x ancilla` at bin 1.
///
/// A photon still held after bin 1 is never sent.
#[derive(Clone, Debug, PartialEq)]
pub struct CausalCoupling {
    ancilla_dim: usize,
    release: CMatrix,
    idle: [CMatrix; 2],
    route: [CMatrix; 2],
}

impl CausalCoupling {
    pub fn new(
        ancilla_dim: usize,
        release: CMatrix,
        idle: [CMatrix; 2],
        route: [CMatrix; 2],
    ) -> Result<Self> {
        if ancilla_dim == 0 || ancilla_dim > MAX_ANCILLA_DIM {
            return Err(Error::InvalidParameter(format!(
                "ancilla dimension must be 1..={MAX_ANCILLA_DIM}, got {ancilla_dim}"
            )));
        }
        let a = ancilla_dim;
        let shapes = [(&release, 2 * a)]
            .into_iter()
            .chain(idle.iter().map(|m| (m, a)))
            .chain(route.iter().map(|m| (m, 2 * a)));
        for (m, dim) in shapes {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch(dim, m.rows()));
            }
            let dev = m.unitarity_deviation();
            if dev > UNITARY_TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        Ok(Self {
            ancilla_dim,
            release,
            idle,
            route,
        })
    }

    /// All stages identity: the photon is never released.
    pub fn identity(ancilla_dim: usize) -> Result<Self> {
        let a = ancilla_dim;
        Self::new(
            a,
            CMatrix::identity(2 * a),
            [CMatrix::identity(a), CMatrix::identity(a)],
            [CMatrix::identity(2 * a), CMatrix::identity(2 * a)],
        )
    }

    pub fn random<R: Rng + ?Sized>(ancilla_dim: usize, rng: &mut R) -> Result<Self> {
        let a = ancilla_dim;
        Self::new(
            a,
            random_unitary(2 * a, rng),
            [random_unitary(a, rng), random_unitary(a, rng)],
            [random_unitary(2 * a, rng), random_unitary(2 * a, rng)],
        )
    }

    fn perturbed<R: Rng + ?Sized>(&self, scale: f64, rng: &mut R) -> Self {
        Self {
            ancilla_dim: self.ancilla_dim,
            release: perturb_unitary(&self.release, scale, rng),
            idle: [
                perturb_unitary(&self.idle[0], scale, rng),
                perturb_unitary(&self.idle[1], scale, rng),
            ],
            route: [
                perturb_unitary(&self.route[0], scale, rng),
                perturb_unitary(&self.route[1], scale, rng),
            ],
        }
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn release(&self) -> &CMatrix {
        &self.release
    }

    pub fn idle(&self, bit: Bit) -> &CMatrix {
        &self.idle[bit.as_u8() as usize]
    }

    pub fn route(&self, bit: Bit) -> &CMatrix {
        &self.route[bit.as_u8() as usize]
    }

    /// Unnormalized per-ancilla outputs `(x, y, held)` after both stages.
    fn outputs(&self, bit: Bit) -> Vec<(Complex64, Complex64, Complex64)> {
        let a = self.ancilla_dim;
        let zero = Complex64::new(0.0, 0.0);
        let mut start = vec![zero; 2 * a];
        start[0] = Complex64::new(1.0, 0.0);
        let after_release = self.release.mul_vec(&start).expect("2A");
        let (held, sent_x) = after_release.split_at(a);
        let x = self.idle(bit).mul_vec(sent_x).expect("A");
        let mut held_in = held.to_vec();
        held_in.extend(core::iter::repeat_n(zero, a));
        let routed = self.route(bit).mul_vec(&held_in).expect("2A");
        (0..a).map(|k| (x[k], routed[a + k], routed[k])).collect()
    }

    /// Photon states sent back, one per ancilla basis outcome, each with its
    /// probability.
    pub fn branches(&self, bit: Bit) -> Vec<(f64, PhotonState)> {
        self.outputs(bit)
            .into_iter()
            .filter_map(|(x, y, h)| {
                let w = x.norm_sqr() + y.norm_sqr() + h.norm_sqr();
                if w <= 0.0 {
                    return None;
                }
                let s = w.sqrt();
                let mut amps = [[Complex64::new(0.0, 0.0); optics::MAX_BIN + 1]; 2];
                amps[0][0] = x / s;
                amps[1][1] = y / s;
                Some((w, PhotonState::from_raw(amps, h.norm_sqr() / w)))
            })
            .collect()
    }

    /// Probability that the photon goes out on `X` at bin 0; it cannot depend
    /// on the intercepted bit.
    pub fn x_population(&self) -> f64 {
        self.outputs(Bit::Zero).iter().map(|(x, _, _)| x.norm_sqr()).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ResendStrategy {
    /// Resend a fresh honest encoding of a uniformly guessed bit, on time.
    BlindGuessOnTime,
    /// Wait for the whole photon, then resend a perfect copy one bin late.
    FullMeasureLate,
    /// Send a whole photon on one rail at that rail's on-time bin.
    SingleChannel(RailPolicy),
    GeneralCausal(Box<CausalCoupling>),
}

impl ResendStrategy {
    pub fn label(&self) -> String {
        match self {
            ResendStrategy::BlindGuessOnTime => "blind_guess_on_time".into(),
            ResendStrategy::FullMeasureLate => "full_measure_late".into(),
            ResendStrategy::SingleChannel(RailPolicy::OptimalPerBit) => "single_channel".into(),
            ResendStrategy::SingleChannel(RailPolicy::Fixed(Rail::X)) => "single_channel_x".into(),
            ResendStrategy::SingleChannel(RailPolicy::Fixed(Rail::Y)) => "single_channel_y".into(),
            ResendStrategy::GeneralCausal(c) => format!("general_causal_a{}", c.ancilla_dim()),
        }
    }

    /// Parse the label of one of the closed-form strategies.
    pub fn from_label(label: &str) -> Result<Self> {
        Ok(match label {
            "blind_guess_on_time" => ResendStrategy::BlindGuessOnTime,
            "full_measure_late" => ResendStrategy::FullMeasureLate,
            "single_channel" => ResendStrategy::SingleChannel(RailPolicy::OptimalPerBit),
            "single_channel_x" => ResendStrategy::SingleChannel(RailPolicy::Fixed(Rail::X)),
            "single_channel_y" => ResendStrategy::SingleChannel(RailPolicy::Fixed(Rail::Y)),
            other => {
                return Err(Error::InvalidParameter(format!("unknown strategy {other:?}")));
            }
        })
    }

    /// Whether the receiver ends up knowing the intercepted bit exactly.
    pub fn learns_bit(&self) -> bool {
        true
    }
}

/// The closed-form strategies, in table order.
pub fn closed_form_family() -> Vec<ResendStrategy> {
    vec![
        ResendStrategy::BlindGuessOnTime,
        ResendStrategy::FullMeasureLate,
        ResendStrategy::SingleChannel(RailPolicy::OptimalPerBit),
    ]
}

fn on_time_bin(rail: Rail) -> usize {
    match rail {
        Rail::X => 0,
        Rail::Y => 1,
    }
}

fn single_rail_state(rail: Rail) -> PhotonState {
    PhotonState::single(Mode::new(rail, on_time_bin(rail))).expect("tracked bin")
}

fn single_rail_mismatch(rail: Rail, bit: Bit, params: &BeamSplitterParams) -> f64 {
    optics::detection_distribution(&single_rail_state(rail), params)
        .expect("on-time single packet")
        .mismatch_prob(bit)
}

impl RailPolicy {
    pub fn rail_for(&self, bit: Bit, params: &BeamSplitterParams) -> Rail {
        match *self {
            RailPolicy::Fixed(rail) => rail,
            RailPolicy::OptimalPerBit => {
                if single_rail_mismatch(Rail::X, bit, params) < single_rail_mismatch(Rail::Y, bit, params) {
                    Rail::X
                } else {
                    Rail::Y
                }
            }
        }
    }
}

/// Exact mixture of photon states returned to the sender when the intercepted
/// bit is `bit`, with branch probabilities summing to one.
pub fn resent_branches(
    strategy: &ResendStrategy,
    bit: Bit,
    params: &BeamSplitterParams,
) -> Vec<(f64, PhotonState)> {
    match strategy {
        ResendStrategy::BlindGuessOnTime => vec![
            (0.5, optics::encode(Bit::Zero, params)),
            (0.5, optics::encode(Bit::One, params)),
        ],
        ResendStrategy::FullMeasureLate => {
            let copy = optics::encode(bit, params);
            let late = Rail::BOTH
                .into_iter()
                .try_fold(copy, |s, rail| optics::delay_apply(&s, rail, 1))
                .expect("encodings end at bin 1");
            vec![(1.0, late)]
        }
        ResendStrategy::SingleChannel(policy) => {
            vec![(1.0, single_rail_state(policy.rail_for(bit, params)))]
        }
        ResendStrategy::GeneralCausal(coupling) => coupling.branches(bit),
    }
}

/// Probability that the sender flags an intercepted photon carrying `bit`:
/// wrong detector, wrong bin, or no click.
pub fn detection_prob(strategy: &ResendStrategy, bit: Bit, params: &BeamSplitterParams) -> f64 {
    resent_branches(strategy, bit, params)
        .iter()
        .map(|(w, state)| {
            w * optics::detection_distribution(state, params)
                .expect("resent states stay within tracked bins")
                .mismatch_prob(bit)
        })
        .sum()
}

/// Detection probability averaged over both bit values.
pub fn mean_detection_prob(strategy: &ResendStrategy, params: &BeamSplitterParams) -> f64 {
    0.5 * (detection_prob(strategy, Bit::Zero, params) + detection_prob(strategy, Bit::One, params))
}

/// Minimum over `strategies` of the bit-averaged detection probability.
pub fn epsilon_lower_bound(strategies: &[ResendStrategy], params: &BeamSplitterParams) -> Result<f64> {
    strategies
        .iter()
        .map(|s| mean_detection_prob(s, params))
        .reduce(f64::min)
        .ok_or_else(|| Error::InvalidParameter("empty strategy set".into()))
}

/// The reference detection rate used by the sender's estimator when none is
/// agreed explicitly: the closed-form family minimum.
pub fn default_epsilon(params: &BeamSplitterParams) -> f64 {
    epsilon_lower_bound(&closed_form_family(), params).expect("family is nonempty")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterceptRecord {
    pub learned_bit: Option<Bit>,
    pub resent: PhotonState,
}

fn decode_incoming(incoming: &PhotonState, params: &BeamSplitterParams) -> Result<Bit> {
    [Bit::Zero, Bit::One]
        .into_iter()
        .find(|&b| optics::encode(b, params).inner(incoming).norm_sqr() >= ENCODING_FIDELITY)
        .ok_or(Error::MalformedIncoming)
}

/// Intercept one photon: decode it and draw the resent state from the
/// strategy's mixture.
pub fn apply_strategy<R: Rng + ?Sized>(
    strategy: &ResendStrategy,
    incoming: &PhotonState,
    params: &BeamSplitterParams,
    rng: &mut R,
) -> Result<InterceptRecord> {
    let bit = decode_incoming(incoming, params)?;
    let branches = resent_branches(strategy, bit, params);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut pick = branches.len() - 1;
    for (i, (w, _)) in branches.iter().enumerate() {
        acc += w;
        if u < acc {
            pick = i;
            break;
        }
    }
    let resent = branches.into_iter().nth(pick).expect("nonempty").1;
    Ok(InterceptRecord {
        learned_bit: strategy.learns_bit().then_some(bit),
        resent,
    })
}

/// Outcome of [`search_epsilon`].
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub strategy: ResendStrategy,
    /// Bit-averaged detection probability of `strategy`.
    pub detection_prob: f64,
    /// Best value reached by the causal search alone.
    pub causal_best: f64,
    /// Best closed-form value, included as a candidate.
    pub closed_form_best: f64,
}

const REFINE_STEPS: usize = 400;

/// Randomized search over causal couplings for the smallest bit-averaged
/// detection probability.
///
/// Start 0 is the identity coupling; the remaining `trials - 1` starts are
/// Haar-random. Each start is refined by accepting random nearby unitaries
/// that lower the objective, with a step size shrinking geometrically. The
/// closed-form strategies are candidates too. The result is an upper bound
/// on the true family minimum, never a proof of it.
pub fn search_epsilon<R: Rng + ?Sized>(
    ancilla_dim: usize,
    trials: usize,
    rng: &mut R,
    params: &BeamSplitterParams,
) -> Result<SearchOutcome> {
    if trials == 0 {
        return Err(Error::InvalidParameter("search needs at least one trial".into()));
    }
    let objective = |c: &CausalCoupling| mean_detection_prob(&ResendStrategy::GeneralCausal(Box::new(c.clone())), params);
    let mut best: Option<(f64, CausalCoupling)> = None;
    for start in 0..trials {
        let mut current = if start == 0 {
            CausalCoupling::identity(ancilla_dim)?
        } else {
            CausalCoupling::random(ancilla_dim, rng)?
        };
        let mut value = objective(&current);
        for step in 0..REFINE_STEPS {
            let scale = 0.5 * (1e-4f64 / 0.5).powf(step as f64 / REFINE_STEPS as f64);
            let candidate = current.perturbed(scale, rng);
            let v = objective(&candidate);
            if v < value {
                current = candidate;
                value = v;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, current));
        }
    }
    let (causal_best, coupling) = best.expect("at least one start");

    let (closed_form_best, closed) = closed_form_family()
        .into_iter()
        .map(|s| (mean_detection_prob(&s, params), s))
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("nonempty family");

    let (strategy, detection_prob) = if causal_best < closed_form_best {
        (ResendStrategy::GeneralCausal(Box::new(coupling)), causal_best)
    } else {
        (closed, closed_form_best)
    };
    Ok(SearchOutcome {
        strategy,
        detection_prob,
        causal_best,
        closed_form_best,
    })
}

/// One row of the strategy table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub strategy: String,
    pub reflectivity: f64,
    pub bit: u8,
    pub detection_prob: f64,
}

/// Detection probabilities of the given strategies for every reflectivity and
/// both bits, in (strategy, R, bit) order.
pub fn strategy_table(strategies: &[ResendStrategy], reflectivities: &[f64]) -> Result<Vec<StrategyRow>> {
    let mut rows = Vec::new();
    for s in strategies {
        for &r in reflectivities {
            let params = BeamSplitterParams::new(r)?;
            for bit in [Bit::Zero, Bit::One] {
                rows.push(StrategyRow {
                    strategy: s.label(),
                    reflectivity: r,
                    bit: bit.as_u8(),
                    detection_prob: detection_prob(s, bit, &params),
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{detection_distribution, encode, DetectionEvent};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(r: f64) -> BeamSplitterParams {
        BeamSplitterParams::new(r).unwrap()
    }

    #[test]
    fn blind_guess_matching_guess_returns_incoming() {
        let p = params(0.3);
        let incoming = encode(Bit::One, &p);
        let branches = resent_branches(&ResendStrategy::BlindGuessOnTime, Bit::One, &p);
        assert!(branches.iter().any(|(w, s)| *w == 0.5 && *s == incoming));
    }

    #[test]
    fn late_copy_sits_one_bin_later() {
        let p = params(0.3);
        let branches = resent_branches(&ResendStrategy::FullMeasureLate, Bit::Zero, &p);
        let s = &branches[0].1;
        assert!((s.amp(Mode::new(Rail::X, 1)).norm_sqr() - 0.3).abs() < 1e-12);
        assert!((s.amp(Mode::new(Rail::Y, 2)).norm_sqr() - 0.7).abs() < 1e-12);
        let dist = detection_distribution(s, &p).unwrap();
        assert!((dist.prob(DetectionEvent::ClickD0(2)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_channel_for_zero_uses_y() {
        let p = params(0.3);
        let s = &resent_branches(&ResendStrategy::SingleChannel(RailPolicy::OptimalPerBit), Bit::Zero, &p)[0].1;
        assert_eq!(s.amp(Mode::new(Rail::Y, 1)).norm_sqr(), 1.0);
    }

    #[test]
    fn closed_form_detection_probabilities() {
        for i in 1..10 {
            let r = i as f64 / 10.0;
            let p = params(r);
            for bit in [Bit::Zero, Bit::One] {
                let blind = detection_prob(&ResendStrategy::BlindGuessOnTime, bit, &p);
                assert!((blind - 0.5).abs() < 1e-12);
                let late = detection_prob(&ResendStrategy::FullMeasureLate, bit, &p);
                assert!((late - 1.0).abs() < 1e-12);
                let single = detection_prob(&ResendStrategy::SingleChannel(RailPolicy::OptimalPerBit), bit, &p);
                assert!((single - r.min(1.0 - r)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn epsilon_bounds() {
        let p = params(0.3);
        let blind = [ResendStrategy::BlindGuessOnTime];
        assert!((epsilon_lower_bound(&blind, &p).unwrap() - 0.5).abs() < 1e-12);
        let two = [ResendStrategy::BlindGuessOnTime, ResendStrategy::FullMeasureLate];
        assert!((epsilon_lower_bound(&two, &p).unwrap() - 0.5).abs() < 1e-12);
        let single = [ResendStrategy::SingleChannel(RailPolicy::OptimalPerBit)];
        assert!((epsilon_lower_bound(&single, &p).unwrap() - 0.3).abs() < 1e-12);
        assert!(epsilon_lower_bound(&[], &p).is_err());
        assert!((default_epsilon(&p) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn malformed_incoming_rejected() {
        let p = params(0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let junk = PhotonState::single(Mode::new(Rail::X, 0)).unwrap();
        assert_eq!(
            apply_strategy(&ResendStrategy::BlindGuessOnTime, &junk, &p, &mut rng),
            Err(Error::MalformedIncoming)
        );
        let rec = apply_strategy(&ResendStrategy::FullMeasureLate, &encode(Bit::One, &p), &p, &mut rng).unwrap();
        assert_eq!(rec.learned_bit, Some(Bit::One));
    }

    #[test]
    fn identity_coupling_sends_nothing() {
        let p = params(0.3);
        let c = CausalCoupling::identity(2).unwrap();
        let s = ResendStrategy::GeneralCausal(Box::new(c.clone()));
        assert_eq!(c.x_population(), 0.0);
        for bit in [Bit::Zero, Bit::One] {
            assert!((detection_prob(&s, bit, &p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_unitary_coupling_rejected() {
        let mut m = CMatrix::identity(2);
        m[(0, 0)] = Complex64::new(2.0, 0.0);
        let err = CausalCoupling::new(
            1,
            m,
            [CMatrix::identity(1), CMatrix::identity(1)],
            [CMatrix::identity(2), CMatrix::identity(2)],
        );
        assert!(matches!(err, Err(Error::NotUnitary(_))));
        assert!(CausalCoupling::identity(5).is_err());
    }

    #[test]
    fn causal_couplings_conserve_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for a in 1..=MAX_ANCILLA_DIM {
            let c = CausalCoupling::random(a, &mut rng).unwrap();
            for bit in [Bit::Zero, Bit::One] {
                let branches = c.branches(bit);
                let total: f64 = branches.iter().map(|(w, _)| w).sum();
                assert!((total - 1.0).abs() < 1e-10);
                for (_, s) in &branches {
                    assert!((s.total_probability() - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn x_population_is_bit_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = CausalCoupling::random(3, &mut rng).unwrap();
        let x0: f64 = c.outputs(Bit::Zero).iter().map(|(x, _, _)| x.norm_sqr()).sum();
        let x1: f64 = c.outputs(Bit::One).iter().map(|(x, _, _)| x.norm_sqr()).sum();
        assert!((x0 - x1).abs() < 1e-12);
    }

    #[test]
    fn search_with_one_trial_refines_identity_and_respects_family() {
        let p = params(0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = search_epsilon(2, 1, &mut rng, &p).unwrap();
        assert!(out.detection_prob <= out.closed_form_best + 1e-12);
        assert!((out.closed_form_best - 0.3).abs() < 1e-12);
        assert!(search_epsilon(2, 0, &mut rng, &p).is_err());
    }

    #[test]
    fn search_respects_causal_floor() {
        // the X population is fixed before the bit is known, which bounds the
        // bit-averaged detection probability below by (1 - 2 sqrt(RT)) / 2
        for r in [0.1, 0.3, 0.45] {
            let p = params(r);
            let floor = (1.0 - 2.0 * (r * (1.0 - r)).sqrt()) / 2.0;
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let out = search_epsilon(1, 4, &mut rng, &p).unwrap();
            assert!(out.causal_best >= floor - 1e-9, "R = {r}: {}", out.causal_best);
            assert!(out.causal_best <= floor + 1e-3, "R = {r}: {}", out.causal_best);
            assert!(out.detection_prob > 1e-6);
        }
    }

    #[test]
    fn strategy_table_rows() {
        let rows = strategy_table(&closed_form_family(), &[0.3, 0.6]).unwrap();
        assert_eq!(rows.len(), 3 * 2 * 2);
        assert_eq!(rows[0].strategy, "blind_guess_on_time");
        assert!((rows.last().unwrap().detection_prob - 0.4).abs() < 1e-12);
    }
}
