//! Small dense complex matrices: products, adjoints, Hermitian spectra and
//! the singular-value decomposition used for Schmidt decompositions.
//!
//! Everything here is sized for systems of a handful of levels, so the
//! algorithms favour accuracy and determinism (cyclic Jacobi sweeps) over
//! asymptotic speed.

use std::ops::{Index, IndexMut, Mul};

use num_traits::{One, Zero};

use crate::scalar::{cr, Real, C};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[C<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Wraps row-major data. Panics if the length does not match.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len(), "vector length");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(C::zero(), |acc, (a, b)| acc + *a * *b))
            .collect()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| *x * s).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn trace(&self) -> C<T> {
        self.diagonal().into_iter().fold(C::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    /// `AB - BA`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    /// Kronecker product `self ⊗ rhs` in row-major index order.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn max_hermitian_deviation(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> T {
        assert!(self.is_square());
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows))
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Works on the real symmetric embedding `[[Re, -Im], [Im, Re]]`, whose
    /// spectrum is that of the input with every eigenvalue doubled. Only the
    /// Hermitian part of `self` is used.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        assert!(self.is_square());
        let n = self.rows;
        let half = T::lit(0.5);
        let m = 2 * n;
        let mut s = vec![T::zero(); m * m];
        for i in 0..n {
            for j in 0..n {
                let h = (self[(i, j)] + self[(j, i)].conj()) * half;
                s[i * m + j] = h.re;
                s[(i + n) * m + (j + n)] = h.re;
                s[i * m + (j + n)] = -h.im;
                s[(i + n) * m + j] = h.im;
            }
        }
        let mut ev = symmetric_eigenvalues(&mut s, m);
        ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalue"));
        ev.into_iter().step_by(2).collect()
    }

    /// Thin singular-value decomposition `self = U diag(σ) V†` with
    /// `k = min(rows, cols)` singular triplets sorted by descending σ.
    pub fn svd(&self) -> Svd<T> {
        if self.rows >= self.cols {
            let (u, s, v) = one_sided_jacobi(self);
            Svd { u, sigma: s, v }.sorted()
        } else {
            let (u, s, v) = one_sided_jacobi(&self.adjoint());
            Svd { u: v, sigma: s, v: u }.sorted()
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;

    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

/// Result of [`CMatrix::svd`]. Column vectors are stored as `Vec`s.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Vec<Vec<C<T>>>,
    pub sigma: Vec<T>,
    pub v: Vec<Vec<C<T>>>,
}

impl<T: Real> Svd<T> {
    fn sorted(self) -> Self {
        let mut order: Vec<usize> = (0..self.sigma.len()).collect();
        // stable: equal values keep their relative order
        order.sort_by(|&a, &b| {
            self.sigma[b]
                .partial_cmp(&self.sigma[a])
                .expect("finite singular value")
        });
        Svd {
            u: order.iter().map(|&k| self.u[k].clone()).collect(),
            sigma: order.iter().map(|&k| self.sigma[k]).collect(),
            v: order.iter().map(|&k| self.v[k].clone()).collect(),
        }
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        let rows = self.u.first().map_or(0, Vec::len);
        let cols = self.v.first().map_or(0, Vec::len);
        let mut out = CMatrix::zeros(rows, cols);
        for ((u, s), v) in self.u.iter().zip(&self.sigma).zip(&self.v) {
            for i in 0..rows {
                for j in 0..cols {
                    out[(i, j)] = out[(i, j)] + u[i] * v[j].conj() * *s;
                }
            }
        }
        out
    }
}

pub(crate) fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(C::zero(), |acc, (x, y)| acc + x.conj() * *y)
}

pub(crate) fn norm_sqr<T: Real>(a: &[C<T>]) -> T {
    a.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr())
}

const MAX_SWEEPS: usize = 100;

/// Hestenes one-sided Jacobi on the columns of `a` (rows >= cols).
/// Left singular vectors, singular values, right singular vectors.
type Triplets<T> = (Vec<Vec<C<T>>>, Vec<T>, Vec<Vec<C<T>>>);

fn one_sided_jacobi<T: Real>(a: &CMatrix<T>) -> Triplets<T> {
    let n = a.cols();
    let mut w: Vec<Vec<C<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C<T>>> = (0..n)
        .map(|j| {
            let mut e = vec![C::zero(); n];
            e[j] = C::one();
            e
        })
        .collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norm_sqr(&w[p]);
                let beta = norm_sqr(&w[q]);
                let gamma = inner(&w[p], &w[q]);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (g + g);
                let sign = if zeta < T::zero() { -T::one() } else { T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, p, q, c, s, phase);
                rotate_pair(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<T> = w.iter().map(|col| norm_sqr(col).sqrt()).collect();
    let smax = sigma.iter().copied().fold(T::zero(), T::max);
    let cutoff = smax * eps * T::lit(64.0);
    let mut u: Vec<Option<Vec<C<T>>>> = w
        .into_iter()
        .zip(&sigma)
        .map(|(col, &s)| (s > cutoff).then(|| col.iter().map(|z| *z / s).collect()))
        .collect();
    complete_orthonormal(&mut u, a.rows());
    (u.into_iter().map(Option::unwrap).collect(), sigma, v)
}

fn rotate_pair<T: Real>(cols: &mut [Vec<C<T>>], p: usize, q: usize, c: T, s: T, phase: C<T>) {
    for k in 0..cols[p].len() {
        let xp = cols[p][k];
        let xq = cols[q][k] * phase;
        cols[p][k] = xp * c - xq * s;
        cols[q][k] = xp * s + xq * c;
    }
}

/// Fills `None` slots with unit vectors orthogonal to every other slot,
/// drawing candidates from the standard basis (modified Gram-Schmidt).
pub(crate) fn complete_orthonormal<T: Real>(cols: &mut [Option<Vec<C<T>>>], dim: usize) {
    let half = T::lit(0.5);
    for slot in 0..cols.len() {
        if cols[slot].is_some() {
            continue;
        }
        for e in 0..dim {
            let mut cand = vec![C::zero(); dim];
            cand[e] = C::one();
            for other in cols.iter().flatten() {
                let proj = inner(other, &cand);
                for (x, o) in cand.iter_mut().zip(other) {
                    *x = *x - *o * proj;
                }
            }
            let nrm = norm_sqr(&cand).sqrt();
            if nrm > half {
                cols[slot] = Some(cand.iter().map(|z| *z / nrm).collect());
                break;
            }
        }
    }
}

/// Cyclic Jacobi on a real symmetric `m × m` matrix (row-major, destroyed).
fn symmetric_eigenvalues<T: Real>(s: &mut [T], m: usize) -> Vec<T> {
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..m {
            for j in 0..m {
                let x = s[i * m + j] * s[i * m + j];
                total = total + x;
                if i != j {
                    off = off + x;
                }
            }
        }
        if off <= eps * eps * total || off == T::zero() {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = s[p * m + q];
                if apq == T::zero() {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let theta = (aqq - app) / (apq + apq);
                let sign = if theta < T::zero() { -T::one() } else { T::one() };
                let t = sign / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let skp = s[k * m + p];
                    let skq = s[k * m + q];
                    s[k * m + p] = c * skp - sn * skq;
                    s[k * m + q] = sn * skp + c * skq;
                }
                for k in 0..m {
                    let spk = s[p * m + k];
                    let sqk = s[q * m + k];
                    s[p * m + k] = c * spk - sn * sqk;
                    s[q * m + k] = sn * spk + c * sqk;
                }
            }
        }
    }
    (0..m).map(|i| s[i * m + i]).collect()
}

/// Real-valued complex constant, for building matrices from literals.
pub fn re<T: Real>(x: f64) -> C<T> {
    cr(T::lit(x))
}
