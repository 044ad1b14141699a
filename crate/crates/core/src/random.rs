//! Haar-distributed states and unitaries.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{inner, norm_sqr, CMatrix};
use crate::qcore::{PureState, UnitaryGate};
use crate::scalar::{Real, C};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C::new(T::lit(re), T::lit(im))
}

/// Normalized vector of `n` standard complex Gaussians.
pub fn haar_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState<T> {
    let amps = (0..n).map(|_| gaussian(rng)).collect();
    PureState::normalized(amps).expect("Gaussian vector is nonzero")
}

/// Gram-Schmidt (with one reorthogonalization pass) of a complex Ginibre
/// matrix. The implied `R` has a positive diagonal, which makes the result
/// Haar distributed.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryGate<T> {
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C<T>> = (0..n).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let p = inner(q, &v);
                for (x, y) in v.iter_mut().zip(q) {
                    *x = *x - *y * p;
                }
            }
        }
        let nrm = norm_sqr(&v).sqrt();
        if nrm > T::lit(1e-3) {
            cols.push(v.iter().map(|z| *z / nrm).collect());
        }
    }
    let data = (0..n * n).map(|k| cols[k % n][k / n]).collect();
    UnitaryGate::new(CMatrix::from_row_major(n, n, data)).expect("orthonormal columns")
}
