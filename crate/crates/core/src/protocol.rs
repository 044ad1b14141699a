//! The three-step remote-control protocol.
//!
//! 1. Entangle the target with a control system of the same dimension,
//!    giving the Schmidt-form state `Σ_i a_i |e_i⟩_t |e_i⟩_c`.
//! 2. Apply a unitary `U` to the control only.
//! 3. Measure the control in the computational basis.
//!
//! Outcome `m` leaves the target in `Σ_k U_mk a_k |e_k⟩ / √P_m`, i.e. the
//! target is acted on by the diagonal Kraus operator `Υ_m = diag(U_m·)`.
//! Branch indices are 0-based throughout the library.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, CMatrix};
use crate::qcore::{BipartiteState, DensityMatrix, PureState, UnitaryGate};
use crate::scalar::{cr, to_f64, Real, C};

/// Probability below which a branch is treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Tolerance on `Σ|a_i|² = 1` accepted by [`make_pair`] before renormalizing.
pub const PAIR_NORM_SLACK: f64 = 1e-9;

/// Target (slot A) and control (slot B) in Schmidt form with respect to the
/// computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EntangledPair<T> {
    state: BipartiteState<T>,
    coeffs: Vec<C<T>>,
}

impl<T: Real> EntangledPair<T> {
    pub fn state(&self) -> &BipartiteState<T> {
        &self.state
    }

    /// The Schmidt coefficients `a_i`.
    pub fn coefficients(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }
}

/// Diagonal Kraus operator of one measurement outcome, with the probability
/// of that outcome for the pair it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausBranch<T> {
    pub index: usize,
    diagonal: Vec<C<T>>,
    pub probability: T,
}

impl<T: Real> KrausBranch<T> {
    pub fn diagonal(&self) -> &[C<T>] {
        &self.diagonal
    }

    pub fn operator(&self) -> CMatrix<T> {
        CMatrix::from_diagonal(&self.diagonal)
    }

    /// `Υ_m · v` (unnormalized).
    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        self.diagonal.iter().zip(v).map(|(d, x)| *d * *x).collect()
    }

    /// Normalized `Υ_m |ψ⟩`.
    pub fn branch_state(&self, psi: &[C<T>]) -> Result<PureState<T>> {
        let out = self.apply(psi);
        let p = norm_sqr(&out);
        if p < T::lit(ZERO_PROBABILITY) {
            return Err(Error::ZeroProbabilityBranch {
                branch: self.index,
                probability: to_f64(p),
            });
        }
        PureState::normalized(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome<T> {
    pub branch: usize,
    pub probability: T,
    pub target_state: PureState<T>,
    pub control_state: PureState<T>,
}

/// How [`measure_control`] picks the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeSelection {
    /// Post-select branch `m`.
    Fixed(usize),
    /// Inverse-CDF draw from the outcome distribution with this seed.
    Random(u64),
}

fn check_same(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `|i⟩|j⟩ → |i⟩|(j + i) mod N⟩`.
pub fn generalized_cnot<T: Real>(s: &BipartiteState<T>) -> Result<BipartiteState<T>> {
    let n = s.dim_a();
    check_same(n, s.dim_b())?;
    let mut amps = vec![C::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            amps[i * n + (j + i) % n] = s.amp(i, j);
        }
    }
    BipartiteState::new(n, n, amps)
}

/// Entangles `target` with a control prepared in `|e_0⟩` (any global phase)
/// through [`generalized_cnot`], so that `a_i` equals the target's amplitudes.
pub fn entangle<T: Real>(target: &PureState<T>, control: &PureState<T>) -> Result<EntangledPair<T>> {
    check_same(target.dim(), control.dim())?;
    let b0 = control.amplitudes()[0];
    if (b0.norm() - T::one()).abs() > T::tolerance() {
        return Err(Error::ControlNotReference);
    }
    let state = generalized_cnot(&crate::qcore::tensor(target, control))?;
    let n = target.dim();
    let coeffs = (0..n).map(|i| state.amp(i, i)).collect();
    Ok(EntangledPair { state, coeffs })
}

/// `Σ_i a_i |e_i⟩|e_i⟩` from arbitrary Schmidt coefficients.
pub fn make_pair<T: Real>(coeffs: &[C<T>]) -> Result<EntangledPair<T>> {
    let n = coeffs.len();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let n2 = norm_sqr(coeffs);
    if n2 == T::zero() {
        return Err(Error::ZeroVector);
    }
    if (n2 - T::one()).abs() > T::lit(PAIR_NORM_SLACK).max(T::tolerance()) {
        return Err(Error::NotNormalized(to_f64(n2)));
    }
    let norm = n2.sqrt();
    let coeffs: Vec<C<T>> = coeffs.iter().map(|z| *z / norm).collect();
    let mut amps = vec![C::zero(); n * n];
    for (i, a) in coeffs.iter().enumerate() {
        amps[i * n + i] = *a;
    }
    Ok(EntangledPair {
        state: BipartiteState::new(n, n, amps)?,
        coeffs,
    })
}

/// Real-coefficient convenience for [`make_pair`].
pub fn make_pair_real<T: Real>(coeffs: &[T]) -> Result<EntangledPair<T>> {
    make_pair(&coeffs.iter().map(|&x| cr(x)).collect::<Vec<_>>())
}

/// `Σ_ij U_ji a_i |e_i⟩_t |e_j⟩_c`.
pub fn apply_control_unitary<T: Real>(pair: &EntangledPair<T>, u: &UnitaryGate<T>) -> Result<BipartiteState<T>> {
    check_same(pair.dim(), u.dim())?;
    pair.state.apply_local(None, Some(u))
}

/// `P_m = Σ_i |U_mi|² |a_i|²`.
pub fn outcome_probabilities<T: Real>(pair: &EntangledPair<T>, u: &UnitaryGate<T>) -> Result<Vec<T>> {
    check_same(pair.dim(), u.dim())?;
    Ok(branch_probabilities(u, &pair.coeffs))
}

fn branch_probabilities<T: Real>(u: &UnitaryGate<T>, coeffs: &[C<T>]) -> Vec<T> {
    (0..u.dim())
        .map(|m| {
            u.matrix()
                .row(m)
                .iter()
                .zip(coeffs)
                .fold(T::zero(), |acc, (x, a)| acc + x.norm_sqr() * a.norm_sqr())
        })
        .collect()
}

/// Inverse-CDF index for a uniform draw `u ∈ [0, 1)`. Zero-weight entries
/// are never selected.
pub fn inverse_cdf(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (m, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last = m;
        acc += p;
        if u < acc {
            return m;
        }
    }
    last
}

/// Projective computational-basis measurement of slot B (the control).
pub fn measure_control<T: Real>(
    state: &BipartiteState<T>,
    selection: OutcomeSelection,
) -> Result<MeasurementOutcome<T>> {
    let (nt, nc) = (state.dim_a(), state.dim_b());
    let probs: Vec<T> = (0..nc)
        .map(|m| (0..nt).fold(T::zero(), |acc, k| acc + state.amp(k, m).norm_sqr()))
        .collect();
    let branch = match selection {
        OutcomeSelection::Fixed(m) => {
            if m >= nc {
                return Err(Error::BranchOutOfRange { index: m, dim: nc });
            }
            m
        }
        OutcomeSelection::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p64: Vec<f64> = probs.iter().map(|&p| to_f64(p)).collect();
            inverse_cdf(&p64, rng.random::<f64>())
        }
    };
    let p = probs[branch];
    if p < T::lit(ZERO_PROBABILITY) {
        return Err(Error::ZeroProbabilityBranch {
            branch,
            probability: to_f64(p),
        });
    }
    let scale = p.sqrt();
    let target = (0..nt).map(|k| state.amp(k, branch) / scale).collect();
    Ok(MeasurementOutcome {
        branch,
        probability: p,
        target_state: PureState::new(target)?,
        control_state: PureState::basis(nc, branch)?,
    })
}

/// One diagonal Kraus operator per outcome: `Υ_m = diag(U_m0, …, U_m,N-1)`.
pub fn kraus_branches<T: Real>(u: &UnitaryGate<T>, pair: &EntangledPair<T>) -> Result<Vec<KrausBranch<T>>> {
    check_same(pair.dim(), u.dim())?;
    let probs = branch_probabilities(u, &pair.coeffs);
    Ok(probs
        .into_iter()
        .enumerate()
        .map(|(m, probability)| KrausBranch {
            index: m,
            diagonal: u.matrix().row(m).to_vec(),
            probability,
        })
        .collect())
}

/// `Σ_m Υ_m ρ Υ_m†` (the non-selective channel on the target).
pub fn apply_channel<T: Real>(branches: &[KrausBranch<T>], rho: &DensityMatrix<T>) -> CMatrix<T> {
    let n = rho.dim();
    branches.iter().fold(CMatrix::zeros(n, n), |acc, b| {
        let k = b.operator();
        acc.add(&k.matmul(rho.matrix()).matmul(&k.adjoint()))
    })
}

pub fn apply_target_unitary<T: Real>(state: &PureState<T>, u: &UnitaryGate<T>) -> Result<PureState<T>> {
    u.apply(state)
}

/// The restricted single-qubit family
/// `[[cos θ/2, -sin θ/2 e^{iφ}], [sin θ/2, cos θ/2 e^{iφ}]]`.
pub fn restricted_unitary<T: Real>(theta: T, phi: T) -> UnitaryGate<T> {
    let half = T::lit(0.5);
    let (s, c) = (theta * half).sin_cos();
    let e = C::from_polar(T::one(), phi);
    UnitaryGate::from_trusted(CMatrix::from_rows(&[vec![cr(c), -e * s], vec![cr(s), e * c]]))
}

/// Builds `Σ_i a_i |e_i⟩_ta |e_i⟩_tb` for [`remote_step_on_bipartite_target`].
pub fn schmidt_form_target<T: Real>(coeffs: &[C<T>]) -> Result<BipartiteState<T>> {
    Ok(make_pair(coeffs)?.state)
}

/// Remote control of a bipartite target `(t_a, t_b)`: the control is
/// entangled with `t_a` by the generalized CNOT, steered by `u` and measured.
///
/// Returns the post-measurement `(t_a, t_b)` state and the outcome
/// probability. For a Schmidt-form input `Σ a_i |e_i e_i⟩` the result is
/// `Σ_i a_i U_mi |e_i e_i⟩ / √P_m`.
pub fn remote_step_on_bipartite_target<T: Real>(
    target_pair: &BipartiteState<T>,
    u: &UnitaryGate<T>,
    m: usize,
) -> Result<(BipartiteState<T>, T)> {
    let (na, nb) = (target_pair.dim_a(), target_pair.dim_b());
    check_same(na, u.dim())?;
    if m >= na {
        return Err(Error::BranchOutOfRange { index: m, dim: na });
    }
    // after CNOT the control index equals i; after U, amplitude U_mi on |e_m⟩
    let mut amps = vec![C::zero(); na * nb];
    for i in 0..na {
        let umi = u.get(m, i);
        for k in 0..nb {
            amps[i * nb + k] = umi * target_pair.amp(i, k);
        }
    }
    let p = norm_sqr(&amps);
    if p < T::lit(ZERO_PROBABILITY) {
        return Err(Error::ZeroProbabilityBranch {
            branch: m,
            probability: to_f64(p),
        });
    }
    Ok((BipartiteState::normalized(na, nb, amps)?, p))
}

/// Identity check used by tests and reports: `Σ_m Υ_m†Υ_m`.
pub fn completeness_sum<T: Real>(branches: &[KrausBranch<T>]) -> CMatrix<T> {
    let n = branches.first().map_or(0, |b| b.diagonal.len());
    let mut diag = vec![C::zero(); n];
    for b in branches {
        for (d, k) in diag.iter_mut().zip(&b.diagonal) {
            *d = *d + cr(k.norm_sqr());
        }
    }
    CMatrix::from_diagonal(&diag)
}
