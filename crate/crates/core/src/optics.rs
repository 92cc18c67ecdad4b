//! Single-photon, time-binned dual-rail optics.
//!
//! A photon lives in a finite set of modes `(rail, bin)` where the rail is one
//! of the two channels `X`, `Y` and the bin counts storage-ring delays `tau`
//! after the nominal send time. Transit time outside the storage rings is
//! zero, so every optical element acts within a single bin.
//!
//! Beam splitters use the convention "transmit with `sqrt(T)`, reflect with
//! `-i sqrt(R)`", which reproduces the sender's output states exactly:
//!
//! ```text
//! |Psi_0> = sqrt(T) |0>_X |1>_Y - i sqrt(R) |1>_X |0>_Y
//! |Psi_1> = sqrt(T) |1>_X |0>_Y - i sqrt(R) |0>_X |1>_Y
//! ```
//!
//! The receiving interferometer delays `X` by one bin, shifts `Y` by `pi`, and
//! recombines on a second identical splitter. Under this convention the
//! encoding of bit 0 leaves entirely through output port `Y` and the encoding
//! of bit 1 through port `X`, so detector `D0` sits on port `Y` and `D1` on
//! port `X`.

use alloc::collections::BTreeMap;
use core::f64::consts::PI;

use num_complex::Complex64;
// inherent float methods shadow this when std is linked
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::Bit;
use crate::{Error, Result};

/// Highest tracked time bin. Every strategy in scope produces clicks in bins
/// 0 through 3.
pub const MAX_BIN: usize = 4;
const BINS: usize = MAX_BIN + 1;

/// Tolerance for the probability-conservation invariant.
pub const NORM_TOL: f64 = 1e-12;

/// Event probabilities at or below this are rounding residue and dropped.
pub const NEGLIGIBLE: f64 = 1e-24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rail {
    X,
    Y,
}

impl Rail {
    pub const BOTH: [Rail; 2] = [Rail::X, Rail::Y];

    fn index(self) -> usize {
        match self {
            Rail::X => 0,
            Rail::Y => 1,
        }
    }

    pub fn other(self) -> Rail {
        match self {
            Rail::X => Rail::Y,
            Rail::Y => Rail::X,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub rail: Rail,
    pub bin: usize,
}

impl Mode {
    pub fn new(rail: Rail, bin: usize) -> Self {
        Self { rail, bin }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterParams {
    reflectivity: f64,
    transmissivity: f64,
}

impl BeamSplitterParams {
    /// Any splitter with `0 < R < 1`, symmetric included.
    pub fn new(reflectivity: f64) -> Result<Self> {
        if !(reflectivity > 0.0 && reflectivity < 1.0) {
            return Err(Error::InvalidReflectivity(reflectivity));
        }
        Ok(Self {
            reflectivity,
            transmissivity: 1.0 - reflectivity,
        })
    }

    /// Splitter for the protocol configuration, which requires `R != T`.
    pub fn asymmetric(reflectivity: f64) -> Result<Self> {
        let params = Self::new(reflectivity)?;
        if params.is_symmetric() {
            return Err(Error::SymmetricBeamSplitter);
        }
        Ok(params)
    }

    pub fn r(&self) -> f64 {
        self.reflectivity
    }

    pub fn t(&self) -> f64 {
        self.transmissivity
    }

    pub fn is_symmetric(&self) -> bool {
        self.reflectivity == self.transmissivity
    }

    /// The 2x2 mixing matrix acting on `(X, Y)` amplitudes, row-major.
    pub fn matrix(&self, convention: Convention) -> [[Complex64; 2]; 2] {
        let t = Complex64::new(self.transmissivity.sqrt(), 0.0);
        let r = self.reflectivity.sqrt();
        match convention {
            Convention::Standard => {
                let refl = Complex64::new(0.0, -r);
                [[t, refl], [refl, t]]
            }
            Convention::RealReflection => {
                let refl = Complex64::new(r, 0.0);
                [[t, refl], [-refl, t]]
            }
        }
    }
}

/// Beam-splitter phase convention.
///
/// Only [`Convention::Standard`] reproduces the sender's states; the other
/// variant is a unitary but wrong convention kept as a negative control for
/// the invariant checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    #[default]
    Standard,
    RealReflection,
}

/// Sub-normalized single-photon amplitudes plus the probability mass lost to
/// blocking or absorption.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonState {
    amps: [[Complex64; BINS]; 2],
    absorbed: f64,
}

impl PhotonState {
    /// Nothing left in flight: all probability absorbed.
    pub fn vacuum() -> Self {
        Self {
            amps: [[Complex64::new(0.0, 0.0); BINS]; 2],
            absorbed: 1.0,
        }
    }

    /// One photon in a single mode.
    pub fn single(mode: Mode) -> Result<Self> {
        Self::from_amplitudes(&[(mode, Complex64::new(1.0, 0.0))], 0.0)
    }

    /// Build a state from explicit amplitudes. The result must conserve total
    /// probability within [`NORM_TOL`].
    pub fn from_amplitudes(amps: &[(Mode, Complex64)], absorbed: f64) -> Result<Self> {
        let mut state = Self {
            amps: [[Complex64::new(0.0, 0.0); BINS]; 2],
            absorbed,
        };
        for &(mode, amp) in amps {
            if mode.bin > MAX_BIN {
                return Err(Error::BinOverflow(mode.bin));
            }
            state.amps[mode.rail.index()][mode.bin] += amp;
        }
        state.validate()?;
        Ok(state)
    }

    pub(crate) fn from_raw(amps: [[Complex64; BINS]; 2], absorbed: f64) -> Self {
        Self { amps, absorbed }
    }

    pub fn amp(&self, mode: Mode) -> Complex64 {
        if mode.bin > MAX_BIN {
            return Complex64::new(0.0, 0.0);
        }
        self.amps[mode.rail.index()][mode.bin]
    }

    pub fn absorbed(&self) -> f64 {
        self.absorbed
    }

    /// Sum of squared amplitude magnitudes, excluding the absorbed mass.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.norm_sqr() + self.absorbed
    }

    pub fn validate(&self) -> Result<()> {
        let total = self.total_probability();
        if self.absorbed.is_nan() || self.absorbed < -NORM_TOL || (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(())
    }

    /// Modes carrying nonzero amplitude, in `(rail, bin)` order.
    pub fn support(&self) -> impl Iterator<Item = (Mode, Complex64)> + '_ {
        Rail::BOTH.into_iter().flat_map(move |rail| {
            (0..BINS).filter_map(move |bin| {
                let a = self.amps[rail.index()][bin];
                (a.norm_sqr() > 0.0).then_some((Mode::new(rail, bin), a))
            })
        })
    }

    /// Inner product `<self|other>` over the photon modes.
    pub fn inner(&self, other: &PhotonState) -> Complex64 {
        self.amps
            .iter()
            .flatten()
            .zip(other.amps.iter().flatten())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Discard everything on `rail`, moving its probability to the absorbed
    /// mass.
    pub fn block(&self, rail: Rail) -> PhotonState {
        let mut out = self.clone();
        let lost: f64 = out.amps[rail.index()].iter().map(|a| a.norm_sqr()).sum();
        out.amps[rail.index()] = [Complex64::new(0.0, 0.0); BINS];
        out.absorbed += lost;
        out
    }
}

/// Mix the amplitudes at `(X, bin)` and `(Y, bin)` on a beam splitter.
pub fn bs_apply(state: &PhotonState, bin: usize, params: &BeamSplitterParams) -> PhotonState {
    bs_apply_with(state, bin, params, Convention::Standard)
}

pub fn bs_apply_with(
    state: &PhotonState,
    bin: usize,
    params: &BeamSplitterParams,
    convention: Convention,
) -> PhotonState {
    if bin > MAX_BIN {
        return state.clone();
    }
    let m = params.matrix(convention);
    let mut out = state.clone();
    let x = state.amps[0][bin];
    let y = state.amps[1][bin];
    out.amps[0][bin] = m[0][0] * x + m[0][1] * y;
    out.amps[1][bin] = m[1][0] * x + m[1][1] * y;
    out
}

/// Multiply every amplitude on `rail` by `e^{i theta}`.
pub fn phase_apply(state: &PhotonState, rail: Rail, theta: f64) -> PhotonState {
    let factor = Complex64::from_polar(1.0, theta);
    let mut out = state.clone();
    for a in out.amps[rail.index()].iter_mut() {
        *a *= factor;
    }
    out
}

/// Shift every mode on `rail` later by `bins` storage-ring delays.
pub fn delay_apply(state: &PhotonState, rail: Rail, bins: usize) -> Result<PhotonState> {
    if bins == 0 {
        return Ok(state.clone());
    }
    let row = &state.amps[rail.index()];
    if let Some(bin) = (BINS.saturating_sub(bins)..BINS).find(|&b| row[b].norm_sqr() > 0.0) {
        return Err(Error::BinOverflow(bin + bins));
    }
    let mut out = state.clone();
    let shifted = &mut out.amps[rail.index()];
    for bin in (0..BINS).rev() {
        shifted[bin] = if bin >= bins {
            row[bin - bins]
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    Ok(out)
}

/// The sender's output for `bit`: both packets leave the first splitter at
/// bin 0 and the `Y` packet is then held one bin in the sender's storage ring.
pub fn encode(bit: Bit, params: &BeamSplitterParams) -> PhotonState {
    let source = match bit {
        Bit::Zero => Rail::Y,
        Bit::One => Rail::X,
    };
    let fresh = PhotonState::single(Mode::new(source, 0)).expect("bin 0 is tracked");
    let split = bs_apply(&fresh, 0, params);
    delay_apply(&split, Rail::Y, 1).expect("bin 0 shifted into bin 1")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DetectionEvent {
    ClickD0(usize),
    ClickD1(usize),
    NoClick,
}

impl DetectionEvent {
    /// The only event an undisturbed encoding of `bit` can produce.
    pub fn expected(bit: Bit) -> Self {
        match bit {
            Bit::Zero => DetectionEvent::ClickD0(1),
            Bit::One => DetectionEvent::ClickD1(1),
        }
    }

    /// Wrong detector, wrong bin, or no click at all.
    pub fn is_mismatch(&self, sent: Bit) -> bool {
        *self != Self::expected(sent)
    }
}

/// Exact outcome distribution of the receiving interferometer. Events with
/// zero probability are omitted.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectionDistribution {
    probs: BTreeMap<DetectionEvent, f64>,
}

impl DetectionDistribution {
    pub fn point(event: DetectionEvent) -> Self {
        let mut probs = BTreeMap::new();
        probs.insert(event, 1.0);
        Self { probs }
    }

    fn add(&mut self, event: DetectionEvent, p: f64) {
        if p > NEGLIGIBLE {
            *self.probs.entry(event).or_insert(0.0) += p;
        }
    }

    pub fn prob(&self, event: DetectionEvent) -> f64 {
        self.probs.get(&event).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (DetectionEvent, f64)> + '_ {
        self.probs.iter().map(|(e, p)| (*e, *p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Probability that the receiver flags a photon that was sent as `sent`.
    pub fn mismatch_prob(&self, sent: Bit) -> f64 {
        (1.0 - self.prob(DetectionEvent::expected(sent))).clamp(0.0, 1.0)
    }

    /// Largest absolute per-event difference between two distributions.
    pub fn max_deviation(&self, other: &DetectionDistribution) -> f64 {
        self.probs
            .keys()
            .chain(other.probs.keys())
            .map(|e| (self.prob(*e) - other.prob(*e)).abs())
            .fold(0.0, f64::max)
    }

    /// Inverse-CDF draw in event order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DetectionEvent {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = DetectionEvent::NoClick;
        for (event, p) in self.iter() {
            acc += p;
            last = event;
            if u < acc {
                return event;
            }
        }
        last
    }
}

/// Run `state` through the receiving interferometer and return the exact,
/// time-resolved click distribution.
pub fn detection_distribution(
    state: &PhotonState,
    params: &BeamSplitterParams,
) -> Result<DetectionDistribution> {
    detection_distribution_with(state, params, Convention::Standard)
}

pub fn detection_distribution_with(
    state: &PhotonState,
    params: &BeamSplitterParams,
    convention: Convention,
) -> Result<DetectionDistribution> {
    let delayed = delay_apply(state, Rail::X, 1)?;
    let shifted = phase_apply(&delayed, Rail::Y, PI);
    let mut out = DetectionDistribution::default();
    for bin in 0..BINS {
        let mixed = bs_apply_with(&shifted, bin, params, convention);
        out.add(DetectionEvent::ClickD0(bin), mixed.amp(Mode::new(Rail::Y, bin)).norm_sqr());
        out.add(DetectionEvent::ClickD1(bin), mixed.amp(Mode::new(Rail::X, bin)).norm_sqr());
    }
    out.add(DetectionEvent::NoClick, state.absorbed());
    Ok(out)
}

pub fn sample_detection<R: Rng + ?Sized>(
    state: &PhotonState,
    params: &BeamSplitterParams,
    rng: &mut R,
) -> Result<DetectionEvent> {
    Ok(detection_distribution(state, params)?.sample(rng))
}
