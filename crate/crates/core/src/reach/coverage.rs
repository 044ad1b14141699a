//! Fraction of the Bloch sphere reachable from a fixed initial state under a
//! gate family, with and without measurement-induced (Kraus) branches.

use crate::linalg::norm_sqr;
use crate::protocol::ZERO_PROBABILITY;
use crate::qcore::PureState;
use crate::reach::gates::GateFamily;
use crate::scalar::{Real, C};

/// Equal-area sphere partition: `bands` uniform bands in `cos(polar)` times
/// `azimuths` uniform azimuth sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereGrid {
    pub bands: usize,
    pub azimuths: usize,
}

impl SphereGrid {
    pub fn new(bands: usize, azimuths: usize) -> Self {
        Self {
            bands: bands.max(1),
            azimuths: azimuths.max(1),
        }
    }

    pub fn cells(&self) -> usize {
        self.bands * self.azimuths
    }

    /// Cell index of the unit vector `(x, y, z)`.
    pub fn cell(&self, x: f64, y: f64, z: f64) -> usize {
        let band = ((1.0 - z) / 2.0 * self.bands as f64).floor();
        let band = (band.max(0.0) as usize).min(self.bands - 1);
        let az = y.atan2(x).rem_euclid(std::f64::consts::TAU);
        let sector = ((az / std::f64::consts::TAU * self.azimuths as f64).floor() as usize).min(self.azimuths - 1);
        band * self.azimuths + sector
    }
}

/// Unit Bloch vector of a (not necessarily normalized, nonzero) qubit vector.
pub fn bloch_point<T: Real>(v: &[C<T>]) -> (f64, f64, f64) {
    let n = norm_sqr(v).to_f64().expect("finite");
    let c = v[0].conj() * v[1];
    let (re, im) = (c.re.to_f64().expect("finite"), c.im.to_f64().expect("finite"));
    let z = (v[0].norm_sqr() - v[1].norm_sqr()).to_f64().expect("finite");
    (2.0 * re / n, 2.0 * im / n, z / n)
}

/// Sweeps the family's parameters on a `sweep`-interval grid per axis and
/// returns the fraction of `grid` cells hit by `U|ψ⟩` or, with `use_kraus`,
/// by the normalized branch states `Υ_m a` (Schmidt coefficients `a = ψ`).
pub fn reachable_set_coverage<T: Real>(
    initial: &PureState<T>,
    family: &GateFamily<T>,
    use_kraus: bool,
    grid: SphereGrid,
    sweep: usize,
) -> f64 {
    assert_eq!(initial.dim(), 2, "coverage is defined for qubits");
    let psi = initial.amplitudes();
    let mut hit = vec![false; grid.cells()];
    let mut mark = |v: &[C<T>]| {
        let (x, y, z) = bloch_point(v);
        hit[grid.cell(x, y, z)] = true;
    };
    for &p in &family.ranges[0].grid(sweep) {
        for &q in &family.ranges[1].grid(sweep) {
            let u = family.gate((p, q), T::one());
            if use_kraus {
                for m in 0..2 {
                    let v: Vec<C<T>> = u.matrix().row(m).iter().zip(psi).map(|(x, y)| *x * *y).collect();
                    if norm_sqr(&v) > T::lit(ZERO_PROBABILITY) {
                        mark(&v);
                    }
                }
            } else {
                mark(&u.matrix().mul_vec(psi));
            }
        }
    }
    hit.iter().filter(|&&h| h).count() as f64 / grid.cells() as f64
}
