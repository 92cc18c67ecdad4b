//! Operator model of the commitment at tiny `n`.
//!
//! The composite system holds `n` qubits `β` (Bob's fiducial register), `n`
//! qubits `α` (Alice's photons, in the `{|Ψ0⟩, |Ψ1⟩}` basis) and `n` qutrits
//! `γ` (Bob's measurement records). Basis index is
//! `(β · 2^n + α) · 3^n + γ`, each register read with photon 0 as its most
//! significant digit.
//!
//! Bob's per-photon operation is either `u_byp`, which swaps `β_i` and `α_i`,
//! or `u_int`, which writes `α_i` into `γ_i` via `μ^(b)`. With `μ^(b)`
//! completed as the qutrit permutation `2 <-> b`, both are basis permutations,
//! so `U_B` is applied exactly by relabelling matrix entries.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{self, Bit, BitString, LinearCode};
use crate::linalg::{self, CMatrix};
use crate::protocol::BobMode;
use crate::{Error, Result};

/// Largest `n` for the composite model.
pub const MAX_COMPOSITE_N: usize = 3;
/// Largest `n` for the diagonal `ρ^α`, which stores only its support.
pub const MAX_ALPHA_N: usize = 24;
/// Validation tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;
/// Positive semidefiniteness is checked by diagonalization up to this dimension.
pub const MAX_EIGEN_DIM: usize = 256;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
/// Entries below this magnitude are treated as structural zeros.
const SPARSE_EPS: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Dense(CMatrix),
    /// Sorted `(index, weight)` support of a diagonal matrix.
    Diagonal { dim: usize, support: Vec<(usize, f64)> },
}

/// A density matrix, dense or diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    repr: Repr,
}

impl DensityMatrix {
    /// Validated dense density matrix.
    pub fn from_dense(m: CMatrix) -> Result<Self> {
        let rho = Self { repr: Repr::Dense(m) };
        rho.validate(DENSITY_TOL)?;
        Ok(rho)
    }

    /// Validated diagonal density matrix.
    pub fn from_diagonal(d: Vec<f64>) -> Result<Self> {
        let dim = d.len();
        let support = d.into_iter().enumerate().filter(|(_, v)| *v != 0.0).collect();
        let rho = Self {
            repr: Repr::Diagonal { dim, support },
        };
        rho.validate(DENSITY_TOL)?;
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let dim = psi.len();
        let mut m = CMatrix::zeros(dim, dim);
        for (i, a) in psi.iter().enumerate() {
            for (j, b) in psi.iter().enumerate() {
                m[(i, j)] = a * b.conj();
            }
        }
        Self::from_dense(m)
    }

    fn dense_unchecked(m: CMatrix) -> Self {
        Self { repr: Repr::Dense(m) }
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Dense(m) => m.rows(),
            Repr::Diagonal { dim, .. } => *dim,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.repr, Repr::Diagonal { .. })
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match &self.repr {
            Repr::Dense(m) => m[(i, j)],
            Repr::Diagonal { support, .. } if i == j => support
                .binary_search_by_key(&i, |e| e.0)
                .map_or(ZERO, |k| Complex64::new(support[k].1, 0.0)),
            Repr::Diagonal { .. } => ZERO,
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match &self.repr {
            Repr::Dense(m) => m.clone(),
            Repr::Diagonal { dim, support } => {
                let mut m = CMatrix::zeros(*dim, *dim);
                for &(i, v) in support {
                    m[(i, i)] = Complex64::new(v, 0.0);
                }
                m
            }
        }
    }

    pub fn trace(&self) -> Complex64 {
        match &self.repr {
            Repr::Dense(m) => m.trace(),
            Repr::Diagonal { support, .. } => Complex64::new(support.iter().map(|e| e.1).sum(), 0.0),
        }
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        overlap(self, self).expect("same dimension")
    }

    /// Largest entry of `|ρ - ρ†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        match &self.repr {
            Repr::Dense(m) => linalg::max_abs_diff(m, &m.adjoint()),
            Repr::Diagonal { .. } => 0.0,
        }
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        match &self.repr {
            Repr::Diagonal { dim, support } => {
                let floor = if support.len() < *dim { 0.0 } else { f64::INFINITY };
                Ok(support.iter().map(|e| e.1).fold(floor, f64::min))
            }
            Repr::Dense(m) => Ok(linalg::hermitian_eigenvalues(m)?[0]),
        }
    }

    /// Hermitian, unit trace and, for dimensions up to [`MAX_EIGEN_DIM`],
    /// positive semidefinite, all within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if let Repr::Dense(m) = &self.repr {
            if !m.is_square() {
                return Err(Error::InvalidDensityMatrix("not square".into()));
            }
        }
        let herm = self.hermiticity_deviation();
        if herm > tol {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian: {herm:e}")));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        if self.is_diagonal() || self.dim() <= MAX_EIGEN_DIM {
            let min = self.min_eigenvalue()?;
            if min < -tol {
                return Err(Error::InvalidDensityMatrix(format!("eigenvalue {min:e}")));
            }
        }
        Ok(())
    }

    fn nonzero_entries(&self) -> Vec<(usize, usize, Complex64)> {
        match &self.repr {
            Repr::Dense(m) => {
                let dim = m.rows();
                m.as_slice()
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.norm_sqr() > SPARSE_EPS)
                    .map(|(k, v)| (k / dim, k % dim, *v))
                    .collect()
            }
            Repr::Diagonal { support, .. } => support
                .iter()
                .filter(|(_, v)| v.abs() > SPARSE_EPS)
                .map(|&(i, v)| (i, i, Complex64::new(v, 0.0)))
                .collect(),
        }
    }
}

/// `tr(ρ_a ρ_b)`.
pub fn overlap(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let value = match (&a.repr, &b.repr) {
        (Repr::Diagonal { support, .. }, Repr::Diagonal { .. }) => Complex64::new(
            support.iter().map(|&(i, v)| v * b.entry(i, i).re).sum(),
            0.0,
        ),
        _ => a
            .nonzero_entries()
            .into_iter()
            .map(|(i, j, v)| v * b.entry(j, i))
            .sum(),
    };
    if value.im.abs() > DENSITY_TOL {
        return Err(Error::InvalidDensityMatrix(format!("overlap not real: {value}")));
    }
    Ok(value.re)
}

/// `½ ‖ρ_a - ρ_b‖₁`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    if let (Repr::Diagonal { support: x, .. }, Repr::Diagonal { support: y, .. }) = (&a.repr, &b.repr) {
        let mut diff: BTreeMap<usize, f64> = BTreeMap::new();
        for &(i, v) in x {
            *diff.entry(i).or_default() += v;
        }
        for &(i, v) in y {
            *diff.entry(i).or_default() -= v;
        }
        return Ok(diff.values().map(|v| v.abs()).sum::<f64>() / 2.0);
    }
    let dim = a.dim();
    let mut diff = a.to_dense();
    for i in 0..dim {
        for j in 0..dim {
            diff[(i, j)] -= b.entry(i, j);
        }
    }
    let ev = linalg::hermitian_eigenvalues(&diff)?;
    Ok(ev.iter().map(|v| v.abs()).sum::<f64>() / 2.0)
}

/// Index of `|ψ_c⟩ = ⊗ |Ψ_{c_i}⟩` in the `α` register.
pub fn alpha_index(c: &BitString) -> usize {
    let n = c.len();
    (0..n).fold(0, |acc, i| acc | (usize::from(c.get(i).as_u8()) << (n - 1 - i)))
}

/// Alice's committed state: the uniform mixture of `|ψ_c⟩⟨ψ_c|` over the
/// codewords of parity `b`, diagonal in the codeword basis.
pub fn rho_alpha(code: &LinearCode, r: &BitString, b: Bit) -> Result<DensityMatrix> {
    let n = code.n();
    if n > MAX_ALPHA_N {
        return Err(Error::DimensionGuard { n, max: MAX_ALPHA_N });
    }
    let split = codes::coset_split(code, r)?;
    let class = split.class(b);
    if class.is_empty() {
        return Err(Error::EmptyCoset);
    }
    let w = 1.0 / class.len() as f64;
    // codewords are distinct, so each index appears once
    let mut support: Vec<(usize, f64)> = class.iter().map(|c| (alpha_index(c), w)).collect();
    support.sort_unstable_by_key(|e| e.0);
    Ok(DensityMatrix {
        repr: Repr::Diagonal { dim: 1 << n, support },
    })
}

/// Register layout for `n` photons, with Bob's fiducial `β` state.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeSystem {
    n: usize,
    beta: Vec<Complex64>,
}

impl CompositeSystem {
    /// `β` starts in `|Ψ0⟩` on every qubit.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_COMPOSITE_N {
            return Err(Error::DimensionGuard { n, max: MAX_COMPOSITE_N });
        }
        let mut beta = vec![ZERO; 1 << n];
        beta[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, beta })
    }

    /// Replace the fiducial `β` state with any normalized `2^n` vector.
    pub fn with_beta_state(mut self, beta: Vec<Complex64>) -> Result<Self> {
        if beta.len() != self.beta_dim() {
            return Err(Error::DimensionMismatch(self.beta_dim(), beta.len()));
        }
        let norm: f64 = beta.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotNormalized(norm));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta_dim(&self) -> usize {
        1 << self.n
    }

    pub fn alpha_dim(&self) -> usize {
        1 << self.n
    }

    pub fn gamma_dim(&self) -> usize {
        3usize.pow(self.n as u32)
    }

    /// Dimension of the `α ⊗ γ` part left to Bob after tracing out `β`.
    pub fn reduced_dim(&self) -> usize {
        self.alpha_dim() * self.gamma_dim()
    }

    pub fn dim(&self) -> usize {
        self.beta_dim() * self.reduced_dim()
    }

    pub fn index(&self, beta: usize, alpha: usize, gamma: usize) -> usize {
        (beta * self.alpha_dim() + alpha) * self.gamma_dim() + gamma
    }

    /// Inverse of [`CompositeSystem::index`].
    pub fn split(&self, idx: usize) -> (usize, usize, usize) {
        let g = self.gamma_dim();
        let a = self.alpha_dim();
        (idx / (a * g), (idx / g) % a, idx % g)
    }

    /// `γ` index with every qutrit in `|2⟩`.
    pub fn gamma_ready(&self) -> usize {
        self.gamma_dim() - 1
    }

    /// `ρ^β ⊗ ρ^α ⊗ |2…2⟩⟨2…2|`.
    pub fn initial_state(&self, rho_alpha: &DensityMatrix) -> Result<DensityMatrix> {
        if rho_alpha.dim() != self.alpha_dim() {
            return Err(Error::DimensionMismatch(self.alpha_dim(), rho_alpha.dim()));
        }
        let g = self.gamma_ready();
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (a1, a2, v) in rho_alpha.nonzero_entries() {
            for (b1, x) in self.beta.iter().enumerate() {
                for (b2, y) in self.beta.iter().enumerate() {
                    m[(self.index(b1, a1, g), self.index(b2, a2, g))] = x * y.conj() * v;
                }
            }
        }
        Ok(DensityMatrix::dense_unchecked(m))
    }

    /// Initial composite state with Alice committed to `b`.
    pub fn committed_state(&self, code: &LinearCode, r: &BitString, b: Bit) -> Result<DensityMatrix> {
        if code.n() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, actual: code.n() });
        }
        self.initial_state(&rho_alpha(code, r, b)?)
    }

    fn digits(&self, mut v: usize, base: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for i in (0..self.n).rev() {
            out[i] = v % base;
            v /= base;
        }
        out
    }

    fn undigits(&self, d: &[usize], base: usize) -> usize {
        d.iter().fold(0, |acc, x| acc * base + x)
    }

    /// Image of every basis state under `U_B`.
    pub fn ub_permutation(&self, modes: &[BobMode]) -> Result<Vec<usize>> {
        if modes.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, actual: modes.len() });
        }
        Ok((0..self.dim())
            .map(|idx| {
                let (b, a, g) = self.split(idx);
                let mut bd = self.digits(b, 2);
                let mut ad = self.digits(a, 2);
                let mut gd = self.digits(g, 3);
                for (i, mode) in modes.iter().enumerate() {
                    match mode {
                        BobMode::Bypass => core::mem::swap(&mut bd[i], &mut ad[i]),
                        BobMode::Intercept => gd[i] = mu(ad[i], gd[i]),
                    }
                }
                self.index(
                    self.undigits(&bd, 2),
                    self.undigits(&ad, 2),
                    self.undigits(&gd, 3),
                )
            })
            .collect())
    }

    /// `U_B` as an explicit matrix.
    pub fn ub_matrix(&self, modes: &[BobMode]) -> Result<CMatrix> {
        let perm = self.ub_permutation(modes)?;
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for (from, to) in perm.into_iter().enumerate() {
            m[(to, from)] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }
}

/// `μ^(b)` on one qutrit, completed as the permutation `2 <-> b`.
fn mu(b: usize, g: usize) -> usize {
    if g == 2 {
        b
    } else if g == b {
        2
    } else {
        g
    }
}

/// Single-photon `u_byp` on `β ⊗ α ⊗ γ` (dimension 12).
pub fn u_byp() -> CMatrix {
    CompositeSystem::new(1)
        .and_then(|s| s.ub_matrix(&[BobMode::Bypass]))
        .expect("n = 1 is in range")
}

/// Single-photon `u_int` on `β ⊗ α ⊗ γ` (dimension 12).
pub fn u_int() -> CMatrix {
    CompositeSystem::new(1)
        .and_then(|s| s.ub_matrix(&[BobMode::Intercept]))
        .expect("n = 1 is in range")
}

/// Apply `U_B = u_1 ⊗ … ⊗ u_n`. Every intercepted position must have its
/// `γ` qutrit in `|2⟩`.
pub fn apply_ub(system: &CompositeSystem, modes: &[BobMode], state: &DensityMatrix) -> Result<DensityMatrix> {
    if state.dim() != system.dim() {
        return Err(Error::DimensionMismatch(system.dim(), state.dim()));
    }
    let perm = system.ub_permutation(modes)?;
    let entries = state.nonzero_entries();
    let intercepted: Vec<usize> = (0..system.n)
        .filter(|&i| modes[i] == BobMode::Intercept)
        .collect();
    let ready = |idx: usize| {
        let gd = system.digits(system.split(idx).2, 3);
        intercepted.iter().all(|&i| gd[i] == 2)
    };
    if entries.iter().any(|&(i, j, _)| !ready(i) || !ready(j)) {
        return Err(Error::GammaNotInitialized);
    }
    let mut m = CMatrix::zeros(system.dim(), system.dim());
    for (i, j, v) in entries {
        m[(perm[i], perm[j])] = v;
    }
    Ok(DensityMatrix::dense_unchecked(m))
}

/// [`apply_ub`] for an operation Bob may legitimately perform during commit:
/// fewer than `n - d` intercepts.
pub fn apply_legitimate_ub(
    system: &CompositeSystem,
    code: &LinearCode,
    modes: &[BobMode],
    state: &DensityMatrix,
) -> Result<DensityMatrix> {
    let intercepts = modes.iter().filter(|m| **m == BobMode::Intercept).count();
    let limit = code.n().saturating_sub(code.d());
    if intercepts >= limit {
        return Err(Error::IllegitimateOperation { intercepts, limit });
    }
    apply_ub(system, modes, state)
}

/// Partial trace over `β`, leaving `α ⊗ γ`.
pub fn bob_reduced_state(state: &DensityMatrix, system: &CompositeSystem) -> Result<DensityMatrix> {
    if state.dim() != system.dim() {
        return Err(Error::DimensionMismatch(system.dim(), state.dim()));
    }
    let rd = system.reduced_dim();
    let mut m = CMatrix::zeros(rd, rd);
    for (i, j, v) in state.nonzero_entries() {
        let (b1, r1) = (i / rd, i % rd);
        let (b2, r2) = (j / rd, j % rd);
        if b1 == b2 {
            m[(r1, r2)] += v;
        }
    }
    Ok(DensityMatrix::dense_unchecked(m))
}

/// `(V ⊗ I) ρ (V† ⊗ I)` for a unitary `V` on the `β` register.
pub fn apply_beta_local(system: &CompositeSystem, v: &CMatrix, state: &DensityMatrix) -> Result<DensityMatrix> {
    if v.rows() != system.beta_dim() || !v.is_square() {
        return Err(Error::DimensionMismatch(system.beta_dim(), v.rows()));
    }
    let dev = v.unitarity_deviation();
    if dev > DENSITY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    if state.dim() != system.dim() {
        return Err(Error::DimensionMismatch(system.dim(), state.dim()));
    }
    let rd = system.reduced_dim();
    let bd = system.beta_dim();
    let mut m = CMatrix::zeros(system.dim(), system.dim());
    for (i, j, x) in state.nonzero_entries() {
        let (b1, r1) = (i / rd, i % rd);
        let (b2, r2) = (j / rd, j % rd);
        for p in 0..bd {
            let left = v[(p, b1)] * x;
            for q in 0..bd {
                m[(p * rd + r1, q * rd + r2)] += left * v[(q, b2)].conj();
            }
        }
    }
    Ok(DensityMatrix::dense_unchecked(m))
}

/// Result of the `β`-local invariance experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalInvarianceReport {
    pub n: usize,
    pub modes: Vec<BobMode>,
    pub trials: usize,
    /// Largest entry change of Bob's reduced state under a `β` unitary.
    pub max_deviation: f64,
    /// `tr(Tr_β ρ̃_0 · Tr_β ρ̃_1)` before any `β` unitary.
    pub overlap: f64,
    /// Largest change of that overlap.
    pub max_overlap_deviation: f64,
    /// Trace distance between Bob's two reduced states.
    pub trace_distance: f64,
}

/// Apply `trials` Haar-random unitaries to `β` after `U_B` and measure how
/// much Bob's reduced state moves. The first trial uses the identity.
pub fn alice_local_invariance<R: Rng + ?Sized>(
    system: &CompositeSystem,
    modes: &[BobMode],
    code: &LinearCode,
    r: &BitString,
    trials: usize,
    rng: &mut R,
) -> Result<LocalInvarianceReport> {
    let after = |b| {
        let s = system.committed_state(code, r, b)?;
        apply_ub(system, modes, &s)
    };
    let rho0 = after(Bit::Zero)?;
    let rho1 = after(Bit::One)?;
    let red0 = bob_reduced_state(&rho0, system)?;
    let red1 = bob_reduced_state(&rho1, system)?;
    let base_overlap = overlap(&red0, &red1)?;
    let dense0 = red0.to_dense();

    let mut max_deviation = 0.0f64;
    let mut max_overlap_deviation = 0.0f64;
    for t in 0..trials {
        let v = if t == 0 {
            CMatrix::identity(system.beta_dim())
        } else {
            linalg::random_unitary(system.beta_dim(), rng)
        };
        let moved = bob_reduced_state(&apply_beta_local(system, &v, &rho0)?, system)?;
        max_deviation = max_deviation.max(linalg::max_abs_diff(&moved.to_dense(), &dense0));
        max_overlap_deviation = max_overlap_deviation.max((overlap(&moved, &red1)? - base_overlap).abs());
    }
    Ok(LocalInvarianceReport {
        n: system.n,
        modes: modes.to_vec(),
        trials,
        max_deviation,
        overlap: base_overlap,
        max_overlap_deviation,
        trace_distance: trace_distance(&red0, &red1)?,
    })
}

/// Bob's belief about the committed bit after learning some codeword bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Posterior {
    Distribution { p0: f64, p1: f64 },
    /// No codeword matches the observation.
    Impossible,
}

impl Posterior {
    /// `(p0, p1)`, with `(0, 0)` for an impossible observation.
    pub fn pair(self) -> (f64, f64) {
        match self {
            Posterior::Distribution { p0, p1 } => (p0, p1),
            Posterior::Impossible => (0.0, 0.0),
        }
    }
}

/// Fraction of the consistent codewords in each parity class.
pub fn bob_bit_posterior(
    code: &LinearCode,
    r: &BitString,
    known_positions: &[usize],
    known_values: &[Bit],
) -> Result<Posterior> {
    let consistent = codes::consistent_codewords(code, known_positions, known_values)?;
    if consistent.is_empty() {
        return Ok(Posterior::Impossible);
    }
    let mut ones = 0usize;
    for c in &consistent {
        ones += usize::from(codes::parity(c, r)?.as_u8());
    }
    let total = consistent.len() as f64;
    Ok(Posterior::Distribution {
        p0: (consistent.len() - ones) as f64 / total,
        p1: ones as f64 / total,
    })
}

/// Largest `n` for the exhaustive posterior average.
pub const MAX_POSTERIOR_N: usize = 20;

/// Mean of `max(p0, p1)` over every set of `known` positions and every
/// codeword, with Bob learning the codeword's values there.
pub fn mean_max_posterior(code: &LinearCode, r: &BitString, known: usize) -> Result<f64> {
    let n = code.n();
    if n > MAX_POSTERIOR_N {
        return Err(Error::DimensionGuard { n, max: MAX_POSTERIOR_N });
    }
    if known > n {
        return Err(Error::InvalidParameter(format!("{known} known positions exceed n = {n}")));
    }
    let words: Vec<BitString> = code.codewords()?.collect();
    let mut sum = 0.0;
    let mut count = 0usize;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != known {
            continue;
        }
        let positions: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        for c in &words {
            let values: Vec<Bit> = positions.iter().map(|&i| c.get(i)).collect();
            let (p0, p1) = bob_bit_posterior(code, r, &positions, &values)?.pair();
            sum += p0.max(p1);
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::BuiltinCode;
    use crate::seeding::master_rng;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn repetition_rho_alpha_is_pure() {
        let code = BuiltinCode::Repetition3.code();
        let rho = rho_alpha(&code, &bs("111"), Bit::Zero).unwrap();
        assert_eq!(rho.entry(0, 0), Complex64::new(1.0, 0.0));
        assert!((rho.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hamming_classes_are_orthogonal_mixtures() {
        let code = BuiltinCode::Hamming74.code();
        let r = bs("1000000");
        let r0 = rho_alpha(&code, &r, Bit::Zero).unwrap();
        let r1 = rho_alpha(&code, &r, Bit::One).unwrap();
        assert!(overlap(&r0, &r1).unwrap().abs() < 1e-12);
        assert!((r0.purity() - 1.0 / 8.0).abs() < 1e-15);
        assert!((trace_distance(&r0, &r1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_alpha_guard_and_empty_coset() {
        let long = LinearCode::from_text_rows(&["1".repeat(25)]).unwrap();
        let r = BitString::from_word(25, 1).unwrap();
        assert!(matches!(rho_alpha(&long, &r, Bit::Zero), Err(Error::DimensionGuard { .. })));
        let golay = BuiltinCode::Golay24.code();
        let r = BitString::from_word(24, 1).unwrap();
        let r0 = rho_alpha(&golay, &r, Bit::Zero).unwrap();
        let r1 = rho_alpha(&golay, &r, Bit::One).unwrap();
        assert_eq!(overlap(&r0, &r1).unwrap(), 0.0);
        assert!((r0.purity() - 1.0 / 2048.0).abs() < 1e-15);
        let code = BuiltinCode::Repetition3.code();
        assert!(matches!(rho_alpha(&code, &bs("110"), Bit::One), Err(Error::EmptyCoset)));
    }

    #[test]
    fn overlap_errors_and_dense_path() {
        let a = DensityMatrix::from_diagonal(vec![0.5, 0.5]).unwrap();
        let b = DensityMatrix::from_diagonal(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(overlap(&a, &b).is_err());
        let s = 0.5f64.sqrt();
        let plus = DensityMatrix::pure(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)]).unwrap();
        let minus = DensityMatrix::pure(&[Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]).unwrap();
        assert!(overlap(&plus, &minus).unwrap().abs() < 1e-15);
        assert!((overlap(&plus, &a).unwrap() - 0.5).abs() < 1e-15);
        assert!((trace_distance(&plus, &minus).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        assert!(DensityMatrix::from_diagonal(vec![0.7, 0.7]).is_err());
        assert!(DensityMatrix::from_diagonal(vec![1.5, -0.5]).is_err());
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(0, 1)] = Complex64::new(0.0, 0.3);
        assert!(DensityMatrix::from_dense(m).is_err());
    }

    #[test]
    fn guard_on_composite_size() {
        assert!(matches!(CompositeSystem::new(4), Err(Error::DimensionGuard { n: 4, max: 3 })));
        assert_eq!(CompositeSystem::new(3).unwrap().dim(), 1728);
    }

    #[test]
    fn single_photon_operators() {
        let byp = u_byp();
        let int = u_int();
        assert!(byp.is_unitary(1e-15) && int.is_unitary(1e-15));
        let sq = byp.mul(&byp).unwrap();
        assert!(linalg::max_abs_diff(&sq, &CMatrix::identity(12)) < 1e-15);
        // reachable subspace: gamma = |2>, every (beta, alpha) pair keeps its norm
        let sys = CompositeSystem::new(1).unwrap();
        for b in 0..2 {
            for a in 0..2 {
                let mut v = vec![ZERO; 12];
                v[sys.index(b, a, 2)] = Complex64::new(1.0, 0.0);
                let out = int.mul_vec(&v).unwrap();
                let norm: f64 = out.iter().map(|z| z.norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-10);
                assert_eq!(out[sys.index(b, a, a)], Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn bypass_swaps_beta_and_alpha() {
        let sys = CompositeSystem::new(2).unwrap();
        let code = LinearCode::from_text_rows(&["11"]).unwrap();
        let r = bs("10");
        let before = sys.committed_state(&code, &r, Bit::One).unwrap();
        let after = apply_ub(&sys, &[BobMode::Bypass; 2], &before).unwrap();
        // |β=00, α=11, γ=22> -> |β=11, α=00, γ=22>
        let g = sys.gamma_ready();
        assert_eq!(before.entry(sys.index(0, 3, g), sys.index(0, 3, g)).re, 1.0);
        assert_eq!(after.entry(sys.index(3, 0, g), sys.index(3, 0, g)).re, 1.0);
        let red = bob_reduced_state(&after, &sys).unwrap();
        // Bob's alpha now holds the fiducial |Ψ0 Ψ0>
        assert_eq!(red.entry(g, g).re, 1.0);
        red.validate(1e-12).unwrap();
    }

    #[test]
    fn intercept_records_codeword_in_gamma() {
        let sys = CompositeSystem::new(3).unwrap();
        let code = BuiltinCode::Repetition3.code();
        let r = bs("111");
        let before = sys.committed_state(&code, &r, Bit::One).unwrap();
        let after = apply_ub(&sys, &[BobMode::Intercept; 3], &before).unwrap();
        // c = 111: alpha index 7, gamma |111> = 1*9 + 1*3 + 1 = 13
        assert_eq!(after.entry(sys.index(0, 7, 13), sys.index(0, 7, 13)).re, 1.0);
        assert!(matches!(
            apply_ub(&sys, &[BobMode::Intercept; 3], &after),
            Err(Error::GammaNotInitialized)
        ));
    }

    #[test]
    fn legitimate_intercept_limit() {
        let sys = CompositeSystem::new(3).unwrap();
        let code = BuiltinCode::Repetition3.code();
        let state = sys.committed_state(&code, &bs("111"), Bit::Zero).unwrap();
        let err = apply_legitimate_ub(&sys, &code, &[BobMode::Intercept, BobMode::Bypass, BobMode::Bypass], &state);
        assert_eq!(err, Err(Error::IllegitimateOperation { intercepts: 1, limit: 0 }));
    }

    #[test]
    fn beta_unitary_leaves_bob_untouched() {
        let sys = CompositeSystem::new(2).unwrap();
        let code = LinearCode::from_text_rows(&["10", "01"]).unwrap();
        let modes = [BobMode::Bypass, BobMode::Intercept];
        let mut rng = master_rng(3);
        let rep = alice_local_invariance(&sys, &modes, &code, &bs("11"), 100, &mut rng).unwrap();
        assert!(rep.max_deviation <= 1e-9, "{rep:?}");
        assert!(rep.max_overlap_deviation <= 1e-9);
    }

    #[test]
    fn identity_gives_zero_deviation() {
        let sys = CompositeSystem::new(1).unwrap();
        let code = LinearCode::from_text_rows(&["1"]).unwrap();
        let mut rng = master_rng(4);
        let rep = alice_local_invariance(&sys, &[BobMode::Bypass], &code, &bs("1"), 1, &mut rng).unwrap();
        assert_eq!(rep.max_deviation, 0.0);
    }

    #[test]
    fn intercept_makes_records_distinguishable() {
        let sys = CompositeSystem::new(3).unwrap();
        let code = BuiltinCode::Repetition3.code();
        let modes = [BobMode::Intercept, BobMode::Bypass, BobMode::Bypass];
        let mut rng = master_rng(5);
        let rep = alice_local_invariance(&sys, &modes, &code, &bs("111"), 2, &mut rng).unwrap();
        assert!((rep.trace_distance - 1.0).abs() < 1e-10, "{rep:?}");
        assert!(rep.overlap.abs() < 1e-12);
    }

    #[test]
    fn posterior_cases() {
        let code = BuiltinCode::Hamming74.code();
        let r = bs("1000000");
        assert_eq!(
            bob_bit_posterior(&code, &r, &[], &[]).unwrap(),
            Posterior::Distribution { p0: 0.5, p1: 0.5 }
        );
        let c = code.encode_message(0b1011);
        let all: Vec<usize> = (0..7).collect();
        let vals: Vec<Bit> = c.bits().collect();
        let (p0, p1) = bob_bit_posterior(&code, &r, &all, &vals).unwrap().pair();
        assert_eq!((p0.max(p1), p0.min(p1)), (1.0, 0.0));
        // 1111111 is a codeword; 1111110 is not, and fixing all seven bits to it is impossible
        let bad: Vec<Bit> = bs("1111110").bits().collect();
        assert_eq!(bob_bit_posterior(&code, &r, &all, &bad).unwrap(), Posterior::Impossible);
        let m = mean_max_posterior(&code, &r, 3).unwrap();
        assert!((0.5..=1.0).contains(&m));
        assert_eq!(mean_max_posterior(&code, &r, 0).unwrap(), 0.5);
    }
}
