//! Control-side decoherence with an isolated target.
//!
//! The environment is an idealized pointer-basis recorder: after every step
//! each (target, control) index pair is correlated with exactly one
//! environment basis state. Amplitudes are row-major over
//! (target, control, environment).

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, CMatrix};
use crate::protocol::{EntangledPair, ZERO_PROBABILITY};
use crate::qcore::{schmidt_decompose, BipartiteState, DensityMatrix, PureState, UnitaryGate};
use crate::scalar::{fix_global_phase, to_f64, Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteState<T> {
    n: usize,
    env: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> TripartiteState<T> {
    pub fn new(n: usize, env: usize, amps: Vec<C<T>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        if env < n {
            return Err(Error::EnvironmentTooSmall { env, system: n });
        }
        if amps.len() != n * n * env {
            return Err(Error::DimensionMismatch {
                expected: n * n * env,
                found: amps.len(),
            });
        }
        let n2 = norm_sqr(&amps);
        if (n2 - T::one()).abs() > T::tolerance() {
            return Err(Error::NotNormalized(to_f64(n2)));
        }
        Ok(Self { n, env, amps })
    }

    /// System dimension N of target and control.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn env_dim(&self) -> usize {
        self.env
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amp(&self, i: usize, j: usize, e: usize) -> C<T> {
        self.amps[self.idx(i, j, e)]
    }

    fn idx(&self, i: usize, j: usize, e: usize) -> usize {
        (i * self.n + j) * self.env + e
    }

    /// Reduced density matrix of the target.
    pub fn reduced_target(&self) -> DensityMatrix<T> {
        self.reduce(|i, j, e| (i, j * self.env + e))
    }

    /// Reduced density matrix of the control.
    pub fn reduced_control(&self) -> DensityMatrix<T> {
        self.reduce(|i, j, e| (j, i * self.env + e))
    }

    fn reduce(&self, split: impl Fn(usize, usize, usize) -> (usize, usize)) -> DensityMatrix<T> {
        let n = self.n;
        let mut m = CMatrix::zeros(n, n);
        // ρ_kl = Σ_rest ψ(k, rest) ψ*(l, rest)
        let mut by_rest: Vec<Vec<C<T>>> = vec![vec![C::zero(); n]; n * self.env];
        for i in 0..n {
            for j in 0..n {
                for e in 0..self.env {
                    let (keep, rest) = split(i, j, e);
                    by_rest[rest][keep] = self.amp(i, j, e);
                }
            }
        }
        for col in &by_rest {
            for k in 0..n {
                for l in 0..n {
                    m[(k, l)] = m[(k, l)] + col[k] * col[l].conj();
                }
            }
        }
        DensityMatrix::new(m).expect("reduced state of a normalized vector")
    }

    fn check_pointer_form(&self) -> Result<()> {
        let tol = T::tolerance();
        for i in 0..self.n {
            for j in 0..self.n {
                let occupied = (0..self.env).filter(|&e| self.amp(i, j, e).norm() > tol).count();
                if occupied > 1 {
                    return Err(Error::NotPointerForm { target: i, control: j });
                }
            }
        }
        Ok(())
    }
}

/// `Σ_i a_i |e_i⟩_t |e_i⟩_c |ε_i⟩`.
pub fn attach_environment<T: Real>(pair: &EntangledPair<T>, env_dim: usize) -> Result<TripartiteState<T>> {
    let n = pair.dim();
    if env_dim < n {
        return Err(Error::EnvironmentTooSmall {
            env: env_dim,
            system: n,
        });
    }
    let mut amps = vec![C::zero(); n * n * env_dim];
    for (i, a) in pair.coefficients().iter().enumerate() {
        amps[(i * n + i) * env_dim + i] = *a;
    }
    TripartiteState::new(n, env_dim, amps)
}

/// Applies `u` to the control, after which the environment records the new
/// control index: `Σ_ij U_ji a_i |e_i⟩|e_j⟩|ε_j⟩` for a freshly attached
/// environment.
pub fn decohering_control_unitary<T: Real>(s: &TripartiteState<T>, u: &UnitaryGate<T>) -> Result<TripartiteState<T>> {
    let n = s.n;
    if u.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.dim(),
        });
    }
    s.check_pointer_form()?;
    let mut amps = vec![C::zero(); s.amps.len()];
    for i in 0..n {
        for c in 0..n {
            // the single environment component of (i, c)
            let carried = (0..s.env).fold(C::zero(), |acc, e| acc + s.amp(i, c, e));
            if carried.is_zero() {
                continue;
            }
            for j in 0..n {
                let k = s.idx(i, j, j);
                amps[k] = amps[k] + u.get(j, c) * carried;
            }
        }
    }
    TripartiteState::new(n, s.env, amps)
}

/// Projects the control onto `|e_m⟩` and factors out the environment.
/// Returns the target state (phase-normalized) and the outcome probability.
pub fn measure_with_environment<T: Real>(s: &TripartiteState<T>, m: usize) -> Result<(PureState<T>, T)> {
    let n = s.n;
    if m >= n {
        return Err(Error::BranchOutOfRange { index: m, dim: n });
    }
    let block: Vec<C<T>> = (0..n)
        .flat_map(|i| (0..s.env).map(move |e| (i, e)))
        .map(|(i, e)| s.amp(i, m, e))
        .collect();
    let p = norm_sqr(&block);
    if p < T::lit(ZERO_PROBABILITY) {
        return Err(Error::ZeroProbabilityBranch {
            branch: m,
            probability: to_f64(p),
        });
    }
    let sn = p.sqrt();
    let rest = BipartiteState::new(n, s.env, block.iter().map(|z| *z / sn).collect())?;
    let d = schmidt_decompose(&rest);
    if d.coefficients.get(1).is_some_and(|&l| l > T::lit(1e3) * T::tolerance()) {
        return Err(Error::EntangledWithEnvironment);
    }
    let mut target = d.basis_a[0].clone();
    fix_global_phase(&mut target, T::tolerance());
    Ok((PureState::normalized(target)?, p))
}
