//! Two-segment NMR-style gate schedule and the gate families swept by the
//! reachability analyses.

use crate::linalg::CMatrix;
use crate::protocol::restricted_unitary;
use crate::qcore::UnitaryGate;
use crate::scalar::{cr, Real, C};

/// Free precession `diag(e^{-iωt}, e^{iωt})`.
pub fn gate_u0<T: Real>(t: T, omega: T) -> UnitaryGate<T> {
    let a = omega * t;
    UnitaryGate::from_trusted(CMatrix::from_diagonal(&[
        C::from_polar(T::one(), -a),
        C::from_polar(T::one(), a),
    ]))
}

/// Resonant drive `[[cos gt, -i sin gt], [-i sin gt, cos gt]]`.
pub fn gate_u1<T: Real>(t: T, g: T) -> UnitaryGate<T> {
    let (s, c) = (g * t).sin_cos();
    let mis = C::new(T::zero(), -s);
    UnitaryGate::from_trusted(CMatrix::from_rows(&[vec![cr(c), mis], vec![mis, cr(c)]]))
}

/// `U_1(T/2) · U_0(T/2)`: precess for half the time, then drive.
pub fn composed_gate<T: Real>(final_time: T, omega: T, g: T) -> UnitaryGate<T> {
    let half = final_time * T::lit(0.5);
    gate_u1(half, g)
        .then_after(&gate_u0(half, omega))
        .expect("both gates are 2x2")
}

/// Entries of [`composed_gate`] without allocating, `[[u00, u01], [u10, u11]]`.
pub fn composed_entries<T: Real>(final_time: T, omega: T, g: T) -> [[C<T>; 2]; 2] {
    let half = final_time * T::lit(0.5);
    let (s, c) = (g * half).sin_cos();
    let (sa, ca) = (omega * half).sin_cos();
    let em = C::new(ca, -sa);
    let ep = C::new(ca, sa);
    let mis = C::new(T::zero(), -s);
    [[em * c, mis * ep], [mis * em, ep * c]]
}

/// One parameter axis `[lo, hi]` or `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange<T> {
    pub lo: T,
    pub hi: T,
    pub include_hi: bool,
}

impl<T: Real> ParamRange<T> {
    pub fn closed(lo: T, hi: T) -> Self {
        Self {
            lo,
            hi,
            include_hi: true,
        }
    }

    pub fn half_open(lo: T, hi: T) -> Self {
        Self {
            lo,
            hi,
            include_hi: false,
        }
    }

    pub fn clamp(&self, x: T) -> T {
        x.max(self.lo).min(self.hi)
    }

    /// `n` equal intervals; the upper end is included only for closed axes.
    pub fn grid(&self, n: usize) -> Vec<T> {
        let n = n.max(1);
        let step = (self.hi - self.lo) / T::from_usize(n).expect("grid size");
        let last = if self.include_hi { n } else { n - 1 };
        (0..=last)
            .map(|i| self.lo + step * T::from_usize(i).expect("grid index"))
            .collect()
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateFamilyKind {
    /// `U(θ, φ)` with θ ∈ [0, π/2], φ ∈ [0, π).
    Restricted,
    /// `U_1(T/2) U_0(T/2)` with ω, g ∈ [0, 2π].
    Nmr,
}

/// Parametrized gate family with declared parameter ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateFamily<T> {
    pub kind: GateFamilyKind,
    pub ranges: [ParamRange<T>; 2],
}

impl<T: Real> GateFamily<T> {
    pub fn restricted() -> Self {
        Self {
            kind: GateFamilyKind::Restricted,
            ranges: [
                ParamRange::closed(T::zero(), T::FRAC_PI_2()),
                ParamRange::half_open(T::zero(), T::PI()),
            ],
        }
    }

    pub fn nmr() -> Self {
        let tau = T::PI() + T::PI();
        Self {
            kind: GateFamilyKind::Nmr,
            ranges: [ParamRange::closed(T::zero(), tau), ParamRange::closed(T::zero(), tau)],
        }
    }

    /// Same kind with custom ranges.
    pub fn with_ranges(self, ranges: [ParamRange<T>; 2]) -> Self {
        Self { ranges, ..self }
    }

    pub fn clamp(&self, p: (T, T)) -> (T, T) {
        (self.ranges[0].clamp(p.0), self.ranges[1].clamp(p.1))
    }

    /// Gate at clamped parameters. `final_time` is ignored by the
    /// restricted family.
    pub fn gate(&self, p: (T, T), final_time: T) -> UnitaryGate<T> {
        let (a, b) = self.clamp(p);
        match self.kind {
            GateFamilyKind::Restricted => restricted_unitary(a, b),
            GateFamilyKind::Nmr => composed_gate(final_time, a, b),
        }
    }
}
