//! States, density matrices and bipartite algebra.
//!
//! Bipartite amplitudes are stored row-major: the amplitude of
//! `|e_i⟩_A |e_j⟩_B` lives at index `i * dim_b + j`. Every module shares
//! this layout.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr, CMatrix};
use crate::scalar::{cr, fix_global_phase, to_f64, Real, C};

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    Ok(())
}

fn check_same(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn normalize_vec<T: Real>(amps: &[C<T>]) -> Result<Vec<C<T>>> {
    let n = norm_sqr(amps).sqrt();
    if n == T::zero() || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(amps.iter().map(|z| *z / n).collect())
}

/// Unit-norm amplitude vector of an N-level system (N >= 2).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    amps: Vec<C<T>>,
}

impl<T: Real> PureState<T> {
    /// Validates an already normalized amplitude vector.
    pub fn new(amps: Vec<C<T>>) -> Result<Self> {
        check_dim(amps.len())?;
        let n2 = norm_sqr(&amps);
        if (n2 - T::one()).abs() > T::tolerance() {
            return Err(Error::NotNormalized(to_f64(n2)));
        }
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: Vec<C<T>>) -> Result<Self> {
        check_dim(amps.len())?;
        Ok(Self {
            amps: normalize_vec(&amps)?,
        })
    }

    /// Builds a state from real amplitudes, renormalizing.
    pub fn from_reals(amps: &[T]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&x| cr(x)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::BranchOutOfRange { index, dim });
        }
        let mut amps = vec![C::zero(); dim];
        amps[index] = C::one();
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        inner(&self.amps, &other.amps)
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.amps)
    }

    /// Representative of the ray with the first non-negligible amplitude
    /// real and positive.
    pub fn phase_normalized(&self) -> Self {
        let mut amps = self.amps.clone();
        fix_global_phase(&mut amps, T::tolerance());
        Self { amps }
    }

    /// Largest entrywise distance between the phase-normalized forms.
    pub fn distance_up_to_phase(&self, other: &Self) -> T {
        let a = self.phase_normalized();
        let b = other.phase_normalized();
        if a.dim() != b.dim() {
            return T::infinity();
        }
        a.amps
            .iter()
            .zip(&b.amps)
            .fold(T::zero(), |m, (x, y)| m.max((x - y).norm()))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix<T> {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix { m }
    }
}

/// Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    m: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        check_dim(m.rows())?;
        let tol = T::tolerance();
        let herm = m.max_hermitian_deviation();
        if herm > tol {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {:e})",
                to_f64(herm)
            )));
        }
        let tr = m.trace();
        if (tr - C::one()).norm() > tol {
            return Err(Error::InvalidDensityMatrix(format!("trace {} != 1", to_f64(tr.re))));
        }
        let min = m.hermitian_eigenvalues()[0];
        if min < -T::psd_floor() {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {:e}",
                to_f64(min)
            )));
        }
        Ok(Self { m })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let inv = cr(T::one() / T::from_usize(dim).expect("small dim"));
        Ok(Self {
            m: CMatrix::identity(dim).scale(inv),
        })
    }

    pub fn from_diagonal(diag: &[T]) -> Result<Self> {
        let d: Vec<C<T>> = diag.iter().map(|&x| cr(x)).collect();
        Self::new(CMatrix::from_diagonal(&d))
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.m[(i, j)]
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &UnitaryGate<T>) -> Result<Self> {
        check_same(self.dim(), u.dim())?;
        let m = u.matrix().matmul(&self.m).matmul(&u.matrix().adjoint());
        Ok(Self { m })
    }

    /// Ascending eigenvalues, with values in `[-psd_floor, 0)` clamped to 0.
    pub fn eigenvalues(&self) -> Vec<T> {
        self.m
            .hermitian_eigenvalues()
            .into_iter()
            .map(|x| {
                if x < T::zero() && x >= -T::psd_floor() {
                    T::zero()
                } else {
                    x
                }
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.m.max_abs_diff(&other.m)
    }
}

/// tr(ρ²).
pub fn purity<T: Real>(rho: &DensityMatrix<T>) -> T {
    // tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ
    rho.m.as_slice().iter().fold(T::zero(), |a, z| a + z.norm_sqr())
}

/// Unit-norm state of a two-party system in the product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState<T> {
    dim_a: usize,
    dim_b: usize,
    amps: Vec<C<T>>,
}

/// Which factor of a bipartite state to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

impl<T: Real> BipartiteState<T> {
    pub fn new(dim_a: usize, dim_b: usize, amps: Vec<C<T>>) -> Result<Self> {
        check_dim(dim_a)?;
        check_dim(dim_b)?;
        check_same(dim_a * dim_b, amps.len())?;
        let n2 = norm_sqr(&amps);
        if (n2 - T::one()).abs() > T::tolerance() {
            return Err(Error::NotNormalized(to_f64(n2)));
        }
        Ok(Self { dim_a, dim_b, amps })
    }

    pub fn normalized(dim_a: usize, dim_b: usize, amps: Vec<C<T>>) -> Result<Self> {
        check_dim(dim_a)?;
        check_dim(dim_b)?;
        check_same(dim_a * dim_b, amps.len())?;
        Ok(Self {
            dim_a,
            dim_b,
            amps: normalize_vec(&amps)?,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amp(&self, i: usize, j: usize) -> C<T> {
        self.amps[i * self.dim_b + j]
    }

    /// Amplitudes as a `dim_a × dim_b` matrix.
    pub fn coefficient_matrix(&self) -> CMatrix<T> {
        CMatrix::from_row_major(self.dim_a, self.dim_b, self.amps.clone())
    }

    /// Largest entrywise distance after fixing the global phase of both.
    pub fn distance_up_to_phase(&self, other: &Self) -> T {
        if (self.dim_a, self.dim_b) != (other.dim_a, other.dim_b) {
            return T::infinity();
        }
        let mut a = self.amps.clone();
        let mut b = other.amps.clone();
        fix_global_phase(&mut a, T::tolerance());
        fix_global_phase(&mut b, T::tolerance());
        a.iter().zip(&b).fold(T::zero(), |m, (x, y)| m.max((x - y).norm()))
    }

    /// Applies `u_a ⊗ u_b`; `None` means identity on that factor.
    pub fn apply_local(&self, u_a: Option<&UnitaryGate<T>>, u_b: Option<&UnitaryGate<T>>) -> Result<Self> {
        let (na, nb) = (self.dim_a, self.dim_b);
        let mut amps = self.amps.clone();
        if let Some(u) = u_a {
            check_same(na, u.dim())?;
            let mut out = vec![C::zero(); na * nb];
            for i in 0..na {
                for k in 0..na {
                    let uik = u.matrix()[(i, k)];
                    for j in 0..nb {
                        out[i * nb + j] = out[i * nb + j] + uik * amps[k * nb + j];
                    }
                }
            }
            amps = out;
        }
        if let Some(u) = u_b {
            check_same(nb, u.dim())?;
            let mut out = vec![C::zero(); na * nb];
            for i in 0..na {
                for j in 0..nb {
                    for l in 0..nb {
                        out[i * nb + j] = out[i * nb + j] + u.matrix()[(j, l)] * amps[i * nb + l];
                    }
                }
            }
            amps = out;
        }
        Ok(Self {
            dim_a: na,
            dim_b: nb,
            amps,
        })
    }
}

/// Square matrix with `U†U = I` within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryGate<T> {
    m: CMatrix<T>,
}

impl<T: Real> UnitaryGate<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        check_dim(m.rows())?;
        let dev = m.unitarity_deviation();
        if dev > T::tolerance() {
            return Err(Error::NotUnitary(to_f64(dev)));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix that is unitary by construction (closed-form gates).
    pub(crate) fn from_trusted(m: CMatrix<T>) -> Self {
        debug_assert!(m.unitarity_deviation() < T::lit(1e3) * T::tolerance());
        Self { m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim),
        }
    }

    pub fn hadamard() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::from_trusted(CMatrix::from_rows(&[vec![cr(h), cr(h)], vec![cr(h), cr(-h)]]))
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (C::zero(), C::one());
        Self::from_trusted(CMatrix::from_rows(&[vec![o, l], vec![l, o]]))
    }

    pub fn pauli_y() -> Self {
        let o = C::zero();
        let i = C::new(T::zero(), T::one());
        Self::from_trusted(CMatrix::from_rows(&[vec![o, -i], vec![i, o]]))
    }

    pub fn pauli_z() -> Self {
        Self::from_trusted(CMatrix::from_diagonal(&[C::one(), -C::<T>::one()]))
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.m[(i, j)]
    }

    /// `self · rhs`.
    pub fn then_after(&self, rhs: &Self) -> Result<Self> {
        check_same(self.dim(), rhs.dim())?;
        Ok(Self {
            m: self.m.matmul(&rhs.m),
        })
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn apply(&self, state: &PureState<T>) -> Result<PureState<T>> {
        check_same(self.dim(), state.dim())?;
        Ok(PureState {
            amps: self.m.mul_vec(state.amplitudes()),
        })
    }
}

/// `|a⟩ ⊗ |b⟩`.
pub fn tensor<T: Real>(a: &PureState<T>, b: &PureState<T>) -> BipartiteState<T> {
    let amps = a
        .amps
        .iter()
        .flat_map(|x| b.amps.iter().map(move |y| *x * *y))
        .collect();
    BipartiteState {
        dim_a: a.dim(),
        dim_b: b.dim(),
        amps,
    }
}

/// Reduced density matrix of the kept factor.
pub fn partial_trace<T: Real>(s: &BipartiteState<T>, keep: Subsystem) -> DensityMatrix<T> {
    let (na, nb) = (s.dim_a, s.dim_b);
    let m = match keep {
        Subsystem::A => {
            let mut m = CMatrix::zeros(na, na);
            for i in 0..na {
                for k in 0..na {
                    let mut acc = C::zero();
                    for j in 0..nb {
                        acc = acc + s.amp(i, j) * s.amp(k, j).conj();
                    }
                    m[(i, k)] = acc;
                }
            }
            m
        }
        Subsystem::B => {
            let mut m = CMatrix::zeros(nb, nb);
            for j in 0..nb {
                for l in 0..nb {
                    let mut acc = C::zero();
                    for i in 0..na {
                        acc = acc + s.amp(i, j) * s.amp(i, l).conj();
                    }
                    m[(j, l)] = acc;
                }
            }
            m
        }
    };
    DensityMatrix { m }
}

/// `Σ_k λ_k |u_k⟩|v_k⟩` with descending non-negative `λ_k`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition<T> {
    pub coefficients: Vec<T>,
    pub basis_a: Vec<Vec<C<T>>>,
    pub basis_b: Vec<Vec<C<T>>>,
}

impl<T: Real> SchmidtDecomposition<T> {
    /// Re-assembles the amplitude vector in row-major order.
    pub fn reconstruct(&self) -> Vec<C<T>> {
        let na = self.basis_a.first().map_or(0, Vec::len);
        let nb = self.basis_b.first().map_or(0, Vec::len);
        let mut out = vec![C::zero(); na * nb];
        for ((l, u), v) in self.coefficients.iter().zip(&self.basis_a).zip(&self.basis_b) {
            for i in 0..na {
                for j in 0..nb {
                    out[i * nb + j] = out[i * nb + j] + u[i] * v[j] * *l;
                }
            }
        }
        out
    }
}

/// Schmidt decomposition via the SVD of the `dim_a × dim_b` coefficient matrix.
pub fn schmidt_decompose<T: Real>(s: &BipartiteState<T>) -> SchmidtDecomposition<T> {
    let svd = s.coefficient_matrix().svd();
    let mut basis_a = svd.u;
    // M = Σ σ U_k V_k†, so the B-side vector is conj(V_k)
    let mut basis_b: Vec<Vec<C<T>>> = svd
        .v
        .into_iter()
        .map(|v| v.into_iter().map(|z| z.conj()).collect())
        .collect();
    for (u, v) in basis_a.iter_mut().zip(basis_b.iter_mut()) {
        let phase = fix_global_phase(u, T::tolerance());
        let back = phase.conj();
        for z in v.iter_mut() {
            *z = *z * back;
        }
    }
    SchmidtDecomposition {
        coefficients: svd.sigma,
        basis_a,
        basis_b,
    }
}

/// Number of Schmidt coefficients strictly above `threshold` (at least 1).
pub fn schmidt_number<T: Real>(s: &BipartiteState<T>, threshold: T) -> usize {
    schmidt_decompose(s)
        .coefficients
        .iter()
        .filter(|&&l| l > threshold)
        .count()
        .max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = PureState<f64>;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn bell() -> BipartiteState<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        BipartiteState::new(2, 2, vec![c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)]).unwrap()
    }

    fn schmidt_form(a: &[f64]) -> BipartiteState<f64> {
        let n = a.len();
        let mut amps = vec![c(0., 0.); n * n];
        for (i, &x) in a.iter().enumerate() {
            amps[i * n + i] = c(x, 0.);
        }
        BipartiteState::new(n, n, amps).unwrap()
    }

    #[test]
    fn tensor_examples() {
        let z0 = S::basis(2, 0).unwrap();
        let z1 = S::basis(2, 1).unwrap();
        let t = tensor(&z0, &z0);
        assert_eq!(t.amplitudes(), &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        let t = tensor(&z0, &z1);
        assert_eq!(t.amplitudes(), &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);

        let a = S::from_reals(&[0.6, 0.8]).unwrap();
        let b = S::from_reals(&[1.0, 1.0]).unwrap();
        let t = tensor(&a, &b);
        // outer product written out by hand
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let want = [0.6 * r, 0.6 * r, 0.8 * r, 0.8 * r];
        for (z, w) in t.amplitudes().iter().zip(want) {
            assert!((z - c(w, 0.)).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_examples() {
        let rho = partial_trace(&bell(), Subsystem::A);
        assert!(rho.max_abs_diff(&DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap()) < 1e-15);

        let prod = tensor(&S::basis(2, 0).unwrap(), &S::basis(2, 1).unwrap());
        let rho = partial_trace(&prod, Subsystem::A);
        assert!(rho.max_abs_diff(&DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap()) < 1e-15);

        // explicit double sum ρ_ik = Σ_j ψ_ij ψ*_kj
        let s = schmidt_form(&[0.6, 0.8]);
        let rho = partial_trace(&s, Subsystem::A);
        assert!((rho.get(0, 0).re - 0.36).abs() < 1e-15);
        assert!((rho.get(1, 1).re - 0.64).abs() < 1e-15);
        assert_eq!(rho.get(0, 1), c(0., 0.));
    }

    #[test]
    fn schmidt_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let d = schmidt_decompose(&bell());
        assert!((d.coefficients[0] - h).abs() < 1e-14 && (d.coefficients[1] - h).abs() < 1e-14);
        assert_eq!(schmidt_number(&bell(), 1e-10), 2);

        let prod = tensor(&S::basis(2, 0).unwrap(), &S::basis(2, 0).unwrap());
        let d = schmidt_decompose(&prod);
        assert!((d.coefficients[0] - 1.0).abs() < 1e-15 && d.coefficients[1].abs() < 1e-15);
        assert_eq!(schmidt_number(&prod, 1e-10), 1);

        let s = schmidt_form(&[0.6, 0.8]);
        let d = schmidt_decompose(&s);
        assert!((d.coefficients[0] - 0.8).abs() < 1e-14);
        assert!((d.coefficients[1] - 0.6).abs() < 1e-14);
        assert_eq!(schmidt_number(&s, 1e-10), 2);
    }

    #[test]
    fn schmidt_reconstruction_with_complex_amplitudes() {
        let s = BipartiteState::normalized(
            2,
            3,
            vec![
                c(0.1, 0.2),
                c(-0.3, 0.0),
                c(0.0, 0.4),
                c(0.5, -0.1),
                c(0.2, 0.2),
                c(-0.1, 0.3),
            ],
        )
        .unwrap();
        let d = schmidt_decompose(&s);
        assert_eq!(d.coefficients.len(), 2);
        let rec = d.reconstruct();
        for (x, y) in rec.iter().zip(s.amplitudes()) {
            assert!((x - y).norm() < 1e-13);
        }
        let sq: f64 = d.coefficients.iter().map(|x| x * x).sum();
        assert!((sq - 1.0).abs() < 1e-13);
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&S::basis(2, 0).unwrap().density()) - 1.0).abs() < 1e-15);
        assert!((purity(&DensityMatrix::<f64>::maximally_mixed(2).unwrap()) - 0.5).abs() < 1e-15);
        let rho = DensityMatrix::<f64>::from_diagonal(&[0.36, 0.64]).unwrap();
        assert!((purity(&rho) - 0.5392).abs() < 1e-15);
    }

    #[test]
    fn constructors_reject_invalid_input() {
        assert_eq!(S::new(vec![c(1., 0.)]).unwrap_err(), Error::DimensionTooSmall(1));
        assert!(matches!(
            S::new(vec![c(1., 0.), c(1., 0.)]),
            Err(Error::NotNormalized(_))
        ));
        assert_eq!(S::normalized(vec![c(0., 0.); 3]).unwrap_err(), Error::ZeroVector);
        assert!(matches!(
            UnitaryGate::new(CMatrix::from_rows(&[
                vec![c(1., 0.), c(1., 0.)],
                vec![c(0., 0.), c(1., 0.)]
            ])),
            Err(Error::NotUnitary(_))
        ));
        assert!(matches!(
            DensityMatrix::from_diagonal(&[1.2, -0.2]),
            Err(Error::InvalidDensityMatrix(_))
        ));
        assert!(matches!(
            BipartiteState::<f64>::new(2, 3, vec![c(1., 0.); 4]),
            Err(Error::DimensionMismatch { expected: 6, found: 4 })
        ));
    }

    #[test]
    fn phase_normalization_identifies_rays() {
        let a = S::from_reals(&[0.6, 0.8]).unwrap();
        let phase = C::from_polar(1.0, 1.234);
        let b = S::new(a.amplitudes().iter().map(|z| z * phase).collect()).unwrap();
        assert!(a.distance_up_to_phase(&b) < 1e-15);
        assert!(b.phase_normalized().amplitudes()[0].im.abs() < 1e-16);
    }

    #[test]
    fn local_unitaries_act_on_their_factor() {
        let prod = tensor(&S::basis(2, 0).unwrap(), &S::basis(2, 0).unwrap());
        let x = UnitaryGate::pauli_x();
        let s = prod.apply_local(Some(&x), None).unwrap();
        assert_eq!(s.amp(1, 0), c(1., 0.));
        let s = prod.apply_local(None, Some(&x)).unwrap();
        assert_eq!(s.amp(0, 1), c(1., 0.));
    }
}
