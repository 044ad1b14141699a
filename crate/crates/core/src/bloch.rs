//! Coherent-vector (Bloch) geometry of a qubit target and control.
//!
//! Components carry a `2^{-1/2}` factor, `v_k = tr(ρ σ_k)/√2`, so pure
//! states sit on a sphere of radius `1/√2` and `‖v‖² = tr ρ² − 1/2`.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::protocol::{apply_control_unitary, make_pair, measure_control, OutcomeSelection};
use crate::qcore::{partial_trace, DensityMatrix, PureState, Subsystem, UnitaryGate};
use crate::report::fmt_f64;
use crate::scalar::{to_f64, Real, C};

/// Magnitude below which a coherent vector counts as zero.
pub const ZERO_VECTOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentVector<T> {
    pub vx: T,
    pub vy: T,
    pub vz: T,
}

impl<T: Real> CoherentVector<T> {
    pub fn new(vx: T, vy: T, vz: T) -> Self {
        Self { vx, vy, vz }
    }

    pub fn magnitude(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, o: &Self) -> T {
        self.vx * o.vx + self.vy * o.vy + self.vz * o.vz
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self {
            vx: self.vy * o.vz - self.vz * o.vy,
            vy: self.vz * o.vx - self.vx * o.vz,
            vz: self.vx * o.vy - self.vy * o.vx,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.magnitude() < T::lit(ZERO_VECTOR)
    }
}

fn pauli<T: Real>() -> [CMatrix<T>; 3] {
    [
        UnitaryGate::pauli_x().matrix().clone(),
        UnitaryGate::pauli_y().matrix().clone(),
        UnitaryGate::pauli_z().matrix().clone(),
    ]
}

/// `v_k = 2^{-1/2} tr(ρ σ_k)`.
pub fn coherent_vector<T: Real>(rho: &DensityMatrix<T>) -> Result<CoherentVector<T>> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit(rho.dim()));
    }
    let f = T::FRAC_1_SQRT_2();
    let [x, y, z] = pauli::<T>().map(|s| rho.matrix().matmul(&s).trace().re * f);
    Ok(CoherentVector::new(x, y, z))
}

/// Angle in `[0, π]` between two non-zero coherent vectors.
pub fn angle<T: Real>(u: &CoherentVector<T>, w: &CoherentVector<T>) -> Result<T> {
    if u.is_zero() || w.is_zero() {
        return Err(Error::ZeroCoherentVector);
    }
    // atan2 keeps full precision near 0 and π, where arccos does not
    Ok(u.cross(w).magnitude().atan2(u.dot(w)))
}

/// One measurement branch of the geometry report. `label` is the 1-based
/// name used in the angle relations; `outcome` is the 0-based measured index.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryBranch<T> {
    pub label: usize,
    pub outcome: usize,
    pub probability: T,
    pub control: CoherentVector<T>,
    pub target: CoherentVector<T>,
}

/// Angles between the coherent vectors around a single protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryAngles<T> {
    /// ∠(v^c, v^t)
    pub control_target: T,
    /// ∠(v^c, v_1^c)
    pub control_control1: T,
    /// ∠(v^c, v_2^c)
    pub control_control2: T,
    /// ∠(v_1^c, v_1^t)
    pub control1_target1: T,
    /// ∠(v^t, v_1^t)
    pub target_target1: T,
    /// ∠(v_2^c, v_2^t)
    pub control2_target2: T,
    /// ∠(v^t, v_2^t)
    pub target_target2: T,
    /// ∠(v_1^c, v_2^c)
    pub control1_control2: T,
    /// ∠(v_1^t, v_2^t)
    pub target1_target2: T,
}

impl<T: Real> GeometryAngles<T> {
    /// Residuals of the four angle equalities, each `lhs - rhs`.
    pub fn residuals(&self) -> [(&'static str, T, T); 4] {
        let pi = T::PI();
        [
            ("ang(vc,vt) = ang(vc,vc1)", self.control_target, self.control_control1),
            (
                "ang(vc,vt) = pi - ang(vc,vc2)",
                self.control_target,
                pi - self.control_control2,
            ),
            ("ang(vc1,vt1) = ang(vt,vt1)", self.control1_target1, self.target_target1),
            (
                "ang(vc2,vt2) = pi - ang(vt,vt2)",
                self.control2_target2,
                pi - self.target_target2,
            ),
        ]
    }

    pub fn max_residual(&self) -> T {
        self.residuals()
            .iter()
            .fold(T::zero(), |m, (_, l, r)| m.max((*l - *r).abs()))
    }
}

/// Every coherent vector and angle of one qubit protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport<T> {
    pub target_initial: CoherentVector<T>,
    pub control_initial: CoherentVector<T>,
    pub target_entangled: CoherentVector<T>,
    pub control_entangled: CoherentVector<T>,
    /// v^(t) after steering (unchanged by the control unitary).
    pub target: CoherentVector<T>,
    /// v^(c) after steering.
    pub control: CoherentVector<T>,
    pub branches: [GeometryBranch<T>; 2],
    pub angles: GeometryAngles<T>,
}

impl<T: Real> GeometryReport<T> {
    /// Labelled vectors in protocol order, for trajectory dumps.
    pub fn trajectory(&self) -> Vec<(String, CoherentVector<T>)> {
        let mut rows = vec![
            ("target_initial".to_string(), self.target_initial),
            ("control_initial".to_string(), self.control_initial),
            ("target_entangled".to_string(), self.target_entangled),
            ("control_entangled".to_string(), self.control_entangled),
            ("target_steered".to_string(), self.target),
            ("control_steered".to_string(), self.control),
        ];
        for b in &self.branches {
            rows.push((format!("target_branch_{}", b.label), b.target));
            rows.push((format!("control_branch_{}", b.label), b.control));
        }
        rows
    }
}

/// Runs entangle → control unitary → measurement for a qubit pair with
/// Schmidt coefficients `coeffs` and collects the coherent vectors.
///
/// Branch 1 is the outcome whose control pole points along `v^(t)` (the
/// dominant Schmidt weight), branch 2 the other one; with this labelling the
/// four angle equalities hold identically.
pub fn protocol_geometry_report<T: Real>(coeffs: &[C<T>], u: &UnitaryGate<T>) -> Result<GeometryReport<T>> {
    if coeffs.len() != 2 {
        return Err(Error::NotQubit(coeffs.len()));
    }
    let pair = make_pair(coeffs)?;
    let target_initial = coherent_vector(&PureState::new(pair.coefficients().to_vec())?.density())?;
    let control_initial = coherent_vector(&PureState::basis(2, 0)?.density())?;
    let target_entangled = coherent_vector(&partial_trace(pair.state(), Subsystem::A))?;
    let control_entangled = coherent_vector(&partial_trace(pair.state(), Subsystem::B))?;
    if target_entangled.is_zero() {
        return Err(Error::VanishingCoherentVectors);
    }

    let steered = apply_control_unitary(&pair, u)?;
    let target = coherent_vector(&partial_trace(&steered, Subsystem::A))?;
    let control = coherent_vector(&partial_trace(&steered, Subsystem::B))?;

    let first = if target.vz > T::zero() { 0 } else { 1 };
    let mut branches = Vec::with_capacity(2);
    for (label, outcome) in [(1, first), (2, 1 - first)] {
        let o = measure_control(&steered, OutcomeSelection::Fixed(outcome))?;
        if o.probability <= T::lit(1e-12) {
            return Err(Error::ZeroProbabilityBranch {
                branch: outcome,
                probability: to_f64(o.probability),
            });
        }
        branches.push(GeometryBranch {
            label,
            outcome,
            probability: o.probability,
            control: coherent_vector(&o.control_state.density())?,
            target: coherent_vector(&o.target_state.density())?,
        });
    }
    let [b1, b2]: [GeometryBranch<T>; 2] = branches.try_into().expect("two branches");

    let angles = GeometryAngles {
        control_target: angle(&control, &target)?,
        control_control1: angle(&control, &b1.control)?,
        control_control2: angle(&control, &b2.control)?,
        control1_target1: angle(&b1.control, &b1.target)?,
        target_target1: angle(&target, &b1.target)?,
        control2_target2: angle(&b2.control, &b2.target)?,
        target_target2: angle(&target, &b2.target)?,
        control1_control2: angle(&b1.control, &b2.control)?,
        target1_target2: angle(&b1.target, &b2.target)?,
    };

    Ok(GeometryReport {
        target_initial,
        control_initial,
        target_entangled,
        control_entangled,
        target,
        control,
        branches: [b1, b2],
        angles,
    })
}

/// Target-branch coherent vectors for an arbitrary (possibly maximally
/// entangled) qubit pair, in measurement order. Branches with zero
/// probability are `None`.
pub fn branch_target_vectors<T: Real>(coeffs: &[C<T>], u: &UnitaryGate<T>) -> Result<Vec<Option<CoherentVector<T>>>> {
    let pair = make_pair(coeffs)?;
    let steered = apply_control_unitary(&pair, u)?;
    (0..pair.dim())
        .map(|m| match measure_control(&steered, OutcomeSelection::Fixed(m)) {
            Ok(o) => coherent_vector(&o.target_state.density()).map(Some),
            Err(Error::ZeroProbabilityBranch { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

pub const TRAJECTORY_HEADER: &str = "step_label,vx,vy,vz,magnitude";

/// CSV trajectory dump: `step_label,vx,vy,vz,magnitude`, LF line endings.
pub fn trajectory_csv<T: Real>(rows: &[(String, CoherentVector<T>)]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for (label, v) in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            label,
            fmt_f64(to_f64(v.vx)),
            fmt_f64(to_f64(v.vy)),
            fmt_f64(to_f64(v.vz)),
            fmt_f64(to_f64(v.magnitude()))
        ));
    }
    out
}
