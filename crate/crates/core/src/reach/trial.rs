//! Single optimization trials: unitary-only control versus remote control.

use serde::Serialize;

use crate::linalg::{inner, norm_sqr};
use crate::protocol::ZERO_PROBABILITY;
use crate::qcore::PureState;
use crate::reach::gates::{composed_entries, GateFamily};
use crate::reach::search::{maximize, SearchConfig};
use crate::scalar::{Real, C};

/// Default success threshold: reached ⟺ fidelity ≥ 1 − ε.
pub const DEFAULT_EPSILON: f64 = 1e-3;

/// `|⟨a|b⟩|²`, clamped to `[0, 1]`. Panics on mismatched dimensions.
pub fn fidelity<T: Real>(a: &PureState<T>, b: &PureState<T>) -> T {
    assert_eq!(a.dim(), b.dim(), "fidelity of states with different dimensions");
    raw_fidelity(a.amplitudes(), b.amplitudes())
}

fn raw_fidelity<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    inner(a, b).norm_sqr().min(T::one()).max(T::zero())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec<T> {
    pub initial: PureState<T>,
    pub target: PureState<T>,
    pub final_time: T,
    pub epsilon: T,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Unitary,
    Remote,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Unitary => "unitary",
            Protocol::Remote => "remote",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult<T> {
    pub protocol: Protocol,
    pub reached: bool,
    pub best_fidelity: T,
    /// `(ω, g)` of the composed gate.
    pub best_params: (T, T),
    /// 0-based measurement outcome of the reported branch (remote only).
    pub branch: Option<usize>,
    /// Outcome probability of the reported branch; 1 for unitary control.
    pub branch_probability: T,
    /// `branch_probability` when reached, otherwise 0.
    pub net_success_probability: T,
}

fn finish<T: Real>(
    protocol: Protocol,
    fid: T,
    params: (T, T),
    branch: Option<usize>,
    prob: T,
    eps: T,
) -> TrialResult<T> {
    let reached = fid >= T::one() - eps;
    TrialResult {
        protocol,
        reached,
        best_fidelity: fid,
        best_params: params,
        branch,
        branch_probability: prob,
        net_success_probability: if reached { prob } else { T::zero() },
    }
}

/// Best fidelity of `composed_gate(T, ω, g) · initial` with the target.
pub fn optimize_unitary<T: Real>(spec: &TrialSpec<T>, search: &SearchConfig) -> TrialResult<T> {
    let family = GateFamily::nmr();
    let (i, t) = (qubit(&spec.initial), qubit(&spec.target));
    let objective = |w: T, g: T| {
        let u = composed_entries(spec.final_time, w, g);
        let out = [u[0][0] * i[0] + u[0][1] * i[1], u[1][0] * i[0] + u[1][1] * i[1]];
        raw_fidelity(&t, &out)
    };
    let res = maximize(objective, family.ranges, search);
    finish(Protocol::Unitary, res.value, res.params, None, T::one(), spec.epsilon)
}

fn qubit<T: Real>(s: &PureState<T>) -> [C<T>; 2] {
    assert_eq!(s.dim(), 2, "reachability trials are defined for qubits");
    [s.amplitudes()[0], s.amplitudes()[1]]
}

/// `(fidelity, probability)` of each measurement branch when the control
/// gate has entries `u` and the pair has Schmidt coefficients `a`.
fn remote_branches<T: Real>(u: &[[C<T>; 2]; 2], a: &[C<T>; 2], target: &[C<T>; 2]) -> [(T, T); 2] {
    let branch = |m: usize| {
        let v = [u[m][0] * a[0], u[m][1] * a[1]];
        let p = norm_sqr(&v);
        if p < T::lit(ZERO_PROBABILITY) {
            (T::zero(), p)
        } else {
            ((inner(target, &v).norm_sqr() / p).min(T::one()), p)
        }
    };
    [branch(0), branch(1)]
}

/// Remote control: the initial target is entangled with a control in
/// `|e_0⟩` (Schmidt coefficients = initial amplitudes), the control is
/// driven by the composed gate and measured. Success if any branch reaches
/// the target; among successful branches the most probable is reported.
pub fn optimize_remote<T: Real>(spec: &TrialSpec<T>, search: &SearchConfig) -> TrialResult<T> {
    let family = GateFamily::nmr();
    let (a, t) = (qubit(&spec.initial), qubit(&spec.target));
    let objective = |w: T, g: T| {
        let [b0, b1] = remote_branches(&composed_entries(spec.final_time, w, g), &a, &t);
        b0.0.max(b1.0)
    };
    let res = maximize(objective, family.ranges, search);
    let branches = remote_branches(&composed_entries(spec.final_time, res.params.0, res.params.1), &a, &t);
    let threshold = T::one() - spec.epsilon;
    let reaching: Vec<usize> = (0..2).filter(|&m| branches[m].0 >= threshold).collect();
    let m = match reaching.as_slice() {
        [] => usize::from(branches[1].0 > branches[0].0),
        [only] => *only,
        _ => usize::from(branches[1].1 > branches[0].1),
    };
    let (fid, prob) = branches[m];
    finish(Protocol::Remote, fid, res.params, Some(m), prob, spec.epsilon)
}
