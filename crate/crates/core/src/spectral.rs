//! Dense Hermitian linear algebra.
//!
//! Everything downstream (operator means, the order and orthogonality
//! witnesses) is built on the spectral decomposition exposed here: functions
//! of a matrix are evaluated by `U diag(f(λ)) U*`, spectral projections are
//! indicator functions of intervals, and the Loewner order is decided by the
//! smallest eigenvalue of a difference. The eigensolver itself is nalgebra's
//! Hermitian QR iteration.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Relative tolerance of the Hermitian symmetry check.
pub const HERMIT_TOL: f64 = 1e-10;
/// Relative tolerance for reconstruction, idempotence and commutation checks.
pub const RECON_TOL: f64 = 1e-9;
/// Absolute floor on the smallest eigenvalue of a positive definite matrix.
pub const PD_FLOOR: f64 = 1e-12;
/// Minimum distance between a finite interval endpoint and the spectrum.
pub const EIG_GAP_TOL: f64 = 1e-8;
/// Shift applied to `G G*` when sampling positive definite matrices.
pub const RANDOM_PD_SHIFT: f64 = 1e-3;

/// A dense complex Hermitian matrix.
///
/// Construction validates `a[i][j] = conj(a[j][i])` up to
/// `HERMIT_TOL * max(1, max|a|)` and then stores the exactly symmetrized
/// matrix, so every value of this type is Hermitian to the last bit.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    entries: DMatrix<C64>,
    label: Option<String>,
}

impl HermitianMatrix {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                left: rows,
                right: cols,
            });
        }
        if rows == 0 {
            return Err(Error::invalid("dim", "dimension must be at least 1"));
        }
        let scale = entries.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
        for i in 0..rows {
            for j in i..rows {
                let deviation = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if !(deviation <= HERMIT_TOL * scale) {
                    return Err(Error::NonHermitian {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        Ok(Self::symmetrized(entries))
    }

    /// Builds from a real row-major array; the result is real symmetric.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(
                    format!("re[{i}]"),
                    format!("expected {n} entries, got {}", row.len()),
                ));
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = C64::new(v, 0.0);
            }
        }
        Self::new(m)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Self {
            entries: m,
            label: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        Self::diag(&vec![value; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        Self::scalar(dim, 0.0)
    }

    /// Replaces `m` by `(m + m*) / 2`. Use only for matrices that are
    /// Hermitian in exact arithmetic (sums, congruences, functions of a
    /// Hermitian matrix).
    pub(crate) fn symmetrized(m: DMatrix<C64>) -> Self {
        let adjoint = m.adjoint();
        Self {
            entries: (m + adjoint) * C64::new(0.5, 0.0),
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::symmetrized(&self.entries + &other.entries))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::symmetrized(&self.entries - &other.entries))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::symmetrized(&self.entries * C64::new(factor, 0.0))
    }

    /// `self + t I`.
    pub fn shift(&self, t: f64) -> Self {
        let mut m = self.entries.clone();
        for i in 0..self.dim() {
            m[(i, i)] += C64::new(t, 0.0);
        }
        Self::symmetrized(m)
    }

    /// `X self X` for Hermitian `X`.
    pub fn congruence(&self, x: &Self) -> Result<Self> {
        self.check_dim(x)?;
        Ok(Self::symmetrized(&x.entries * &self.entries * &x.entries))
    }

    /// `U self U*` for a square matrix `U` (unitary in practice).
    pub fn unitary_conjugate(&self, u: &DMatrix<C64>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: u.nrows(),
            });
        }
        Ok(Self::symmetrized(u * &self.entries * u.adjoint()))
    }

    /// Plain matrix product; generally not Hermitian.
    pub fn product(&self, other: &Self) -> Result<DMatrix<C64>> {
        self.check_dim(other)?;
        Ok(&self.entries * &other.entries)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm())))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    pub fn to_json(&self) -> MatrixJson {
        let n = self.dim();
        let re = (0..n)
            .map(|i| (0..n).map(|j| self.entries[(i, j)].re).collect())
            .collect();
        let has_im = self.entries.iter().any(|z| z.im != 0.0);
        let im = has_im.then(|| {
            (0..n)
                .map(|i| (0..n).map(|j| self.entries[(i, j)].im).collect())
                .collect()
        });
        MatrixJson { dim: n, re, im }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        let n = json.dim;
        if n == 0 {
            return Err(Error::invalid("dim", "dimension must be at least 1"));
        }
        check_square(&json.re, n, "re")?;
        if let Some(im) = &json.im {
            check_square(im, n, "im")?;
        }
        let m = DMatrix::from_fn(n, n, |i, j| {
            let im = json.im.as_ref().map_or(0.0, |im| im[i][j]);
            C64::new(json.re[i][j], im)
        });
        Self::new(m)
    }
}

fn check_square(rows: &[Vec<f64>], n: usize, field: &str) -> Result<()> {
    if rows.len() != n {
        return Err(Error::invalid(
            field,
            format!("expected {n} rows, got {}", rows.len()),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::invalid(
                format!("{field}[{i}]"),
                format!("expected {n} entries, got {}", row.len()),
            ));
        }
    }
    Ok(())
}

/// Serialized matrix: `{ "dim": n, "re": [[..]], "im": [[..]] }`, row-major.
/// A missing `im` means the matrix is real symmetric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

/// An interval of the extended real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub lower_open: bool,
    pub upper_open: bool,
}

impl Interval {
    pub fn new(lower: f64, upper: f64, lower_open: bool, upper_open: bool) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::invalid(
                "interval",
                format!("lower {lower} must not exceed upper {upper}"),
            ));
        }
        Ok(Self {
            lower,
            upper,
            lower_open,
            upper_open,
        })
    }

    /// `(lower, +inf)`.
    pub fn above(lower: f64) -> Self {
        Self {
            lower,
            upper: f64::INFINITY,
            lower_open: true,
            upper_open: true,
        }
    }

    /// `(-inf, upper)`.
    pub fn below(upper: f64) -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper,
            lower_open: true,
            upper_open: true,
        }
    }

    pub fn all() -> Self {
        Self::below(f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above_lower = if self.lower_open {
            x > self.lower
        } else {
            x >= self.lower
        };
        let below_upper = if self.upper_open {
            x < self.upper
        } else {
            x <= self.upper
        };
        above_lower && below_upper
    }
}

/// Ascending eigenvalues with an orthonormal eigenvector basis.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        self.eigenvalues.as_slice()
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `max |λ|`.
    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// `U diag(values) U*`.
    fn assemble(&self, values: &[f64]) -> HermitianMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        HermitianMatrix::symmetrized(scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.assemble(self.eigenvalues.as_slice())
    }

    /// `U diag(f(λ)) U*`; fails when `f` is not finite at some eigenvalue.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<HermitianMatrix> {
        let values = self
            .eigenvalues
            .iter()
            .map(|&lambda| {
                let v = f(lambda);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::DomainError { eigenvalue: lambda })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.assemble(&values))
    }

    /// Spectral projection onto the eigenvalues lying in `interval`.
    pub fn projection(&self, interval: &Interval) -> Result<HermitianMatrix> {
        for &lambda in self.eigenvalues.iter() {
            for endpoint in [interval.lower, interval.upper] {
                if endpoint.is_finite() && (lambda - endpoint).abs() <= EIG_GAP_TOL {
                    return Err(Error::AmbiguousBoundary {
                        eigenvalue: lambda,
                        endpoint,
                        gap: EIG_GAP_TOL,
                    });
                }
            }
        }
        let indicator: Vec<f64> = self
            .eigenvalues
            .iter()
            .map(|&lambda| if interval.contains(lambda) { 1.0 } else { 0.0 })
            .collect();
        Ok(self.assemble(&indicator))
    }

    /// Number of eigenvalues inside `interval`.
    pub fn count_in(&self, interval: &Interval) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&l| interval.contains(l))
            .count()
    }
}

/// Eigendecomposition with ascending eigenvalues.
///
/// Degenerate eigenspaces get whatever basis the QR iteration produces,
/// re-orthonormalized by modified Gram-Schmidt; the output is deterministic
/// for a fixed input.
pub fn decompose(a: &HermitianMatrix) -> SpectralDecomposition {
    let eig = SymmetricEigen::new(a.entries.clone());
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    orthonormalize_columns(&mut eigenvectors);
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

fn orthonormalize_columns(m: &mut DMatrix<C64>) {
    for j in 0..m.ncols() {
        for k in 0..j {
            let proj = m.column(k).dotc(&m.column(j));
            let qk = m.column(k).clone_owned();
            m.column_mut(j).axpy(-proj, &qk, C64::new(1.0, 0.0));
        }
        let norm = m.column(j).norm();
        if norm > 0.0 {
            m.column_mut(j).unscale_mut(norm);
        }
    }
}

pub fn functional_calculus<F: Fn(f64) -> f64>(a: &HermitianMatrix, f: F) -> Result<HermitianMatrix> {
    decompose(a).apply(f)
}

pub fn spectral_projection(a: &HermitianMatrix, interval: &Interval) -> Result<HermitianMatrix> {
    decompose(a).projection(interval)
}

/// Operator norm of a Hermitian matrix: the largest eigenvalue modulus.
pub fn op_norm(a: &HermitianMatrix) -> f64 {
    decompose(a).spectral_radius()
}

/// Operator (largest singular value) norm of an arbitrary square matrix.
pub fn matrix_norm(m: &DMatrix<C64>) -> f64 {
    let gram = HermitianMatrix::symmetrized(m.adjoint() * m);
    decompose(&gram).max().max(0.0).sqrt()
}

pub fn min_eigenvalue(a: &HermitianMatrix) -> f64 {
    decompose(a).min()
}

/// `a <= b` in the Loewner order: the smallest eigenvalue of `b - a` is at
/// least `-tol * (1 + ||b - a||)`.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<bool> {
    let diff = decompose(&b.try_sub(a)?);
    Ok(diff.min() >= -tol * (1.0 + diff.spectral_radius()))
}

pub fn is_pd(a: &HermitianMatrix) -> bool {
    decompose(a).min() > PD_FLOOR
}

pub fn is_psd(a: &HermitianMatrix, tol: f64) -> bool {
    let d = decompose(a);
    d.min() >= -tol * (1.0 + d.spectral_radius())
}

pub(crate) fn require_pd(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let d = decompose(a);
    if d.min() > PD_FLOOR {
        Ok(d)
    } else {
        Err(Error::NotPositiveDefinite {
            min_eigenvalue: d.min(),
        })
    }
}

/// `a^{-1}`, computed through the functional calculus.
pub fn inverse(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    require_pd(a)?.apply(|t| 1.0 / t)
}

/// Square root of a PSD matrix. Eigenvalues that are negative only by
/// rounding are clamped to zero.
pub fn psd_sqrt(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = decompose(a);
    let floor = -RECON_TOL * (1.0 + d.spectral_radius());
    d.apply(|t| {
        if t >= floor {
            t.max(0.0).sqrt()
        } else {
            f64::NAN
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomKind {
    /// `G G* + 1e-3 I`.
    PositiveDefinite,
    /// `G G*`, rank deficient with probability 1/2.
    PositiveSemidefinite,
    /// `U diag(0/1) U*` with a random unitary `U`.
    Projection,
}

pub(crate) fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    let scale = 1.0 / (2.0 * rows.max(1) as f64).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

/// Haar-ish random unitary: eigenvectors of a random Hermitian matrix.
pub(crate) fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    let g = gaussian_matrix(rng, dim, dim);
    let h = HermitianMatrix::symmetrized(&g + g.adjoint());
    decompose(&h).eigenvectors
}

pub(crate) fn random_psd_with<R: Rng>(rng: &mut R, dim: usize, kind: RandomKind) -> HermitianMatrix {
    match kind {
        RandomKind::PositiveDefinite => {
            let g = gaussian_matrix(rng, dim, dim);
            HermitianMatrix::symmetrized(&g * g.adjoint()).shift(RANDOM_PD_SHIFT)
        }
        RandomKind::PositiveSemidefinite => {
            let cols = if rng.random_bool(0.5) { dim - 1 } else { dim };
            let g = gaussian_matrix(rng, dim, cols);
            HermitianMatrix::symmetrized(&g * g.adjoint())
        }
        RandomKind::Projection => {
            let u = random_unitary(rng, dim);
            let bits: Vec<f64> = (0..dim)
                .map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 })
                .collect();
            HermitianMatrix::diag(&bits)
                .unitary_conjugate(&u)
                .expect("dimensions agree")
        }
    }
}

/// Seeded random positive matrix; bit-identical for a fixed `(dim, seed, kind)`.
pub fn random_psd(dim: usize, seed: u64, kind: RandomKind) -> Result<HermitianMatrix> {
    if dim == 0 {
        return Err(Error::invalid("dim", "dimension must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_psd_with(&mut rng, dim, kind))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap() -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(2.0, 1.0),
                C64::new(2.0, 1.0),
                C64::new(3.0, 0.0),
            ],
        );
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NonHermitian { row: 0, col: 1, .. })
        ));
        let ok = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(2.0, 1.0),
                C64::new(2.0, -1.0),
                C64::new(3.0, 0.0),
            ],
        );
        assert!(HermitianMatrix::new(ok).is_ok());
    }

    #[test]
    fn decompose_diagonal() {
        let d = decompose(&HermitianMatrix::diag(&[2.0, 1.0]));
        assert_eq!(d.eigenvalues(), &[1.0, 2.0]);
        let u = d.eigenvectors();
        assert!((u[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((u[(0, 1)].norm() - 1.0).abs() < 1e-12);
        assert!(u[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn decompose_identity_and_swap() {
        let d = decompose(&HermitianMatrix::identity(3));
        assert_eq!(d.eigenvalues(), &[1.0, 1.0, 1.0]);
        let d = decompose(&swap());
        assert!((d.eigenvalues()[0] + 1.0).abs() < 1e-12);
        assert!((d.eigenvalues()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn functional_calculus_examples() {
        let a = swap();
        let same = functional_calculus(&a, |t| t).unwrap();
        assert!(same.max_abs_diff(&a).unwrap() < 1e-12);
        let r = functional_calculus(&HermitianMatrix::diag(&[4.0, 9.0]), f64::sqrt).unwrap();
        assert!(r.max_abs_diff(&HermitianMatrix::diag(&[2.0, 3.0])).unwrap() < 1e-12);
        let inv = functional_calculus(&HermitianMatrix::diag(&[2.0, 4.0]), |t| 1.0 / t).unwrap();
        assert!(inv.max_abs_diff(&HermitianMatrix::diag(&[0.5, 0.25])).unwrap() < 1e-12);
        assert!(matches!(
            functional_calculus(&HermitianMatrix::diag(&[0.0, 1.0]), |t| 1.0 / t),
            Err(Error::DomainError { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let p = spectral_projection(&HermitianMatrix::diag(&[1.0, 2.0, 3.0]), &Interval::above(1.5)).unwrap();
        assert!(p.max_abs_diff(&HermitianMatrix::diag(&[0.0, 1.0, 1.0])).unwrap() < 1e-12);

        let a = random_psd(4, 3, RandomKind::PositiveDefinite).unwrap();
        let all = spectral_projection(&a, &Interval::all()).unwrap();
        assert!(all.max_abs_diff(&HermitianMatrix::identity(4)).unwrap() < 1e-9);

        let neg = spectral_projection(&swap(), &Interval::below(0.0)).unwrap();
        let expected = HermitianMatrix::from_real_rows(&[vec![0.5, -0.5], vec![-0.5, 0.5]]).unwrap();
        assert!(neg.max_abs_diff(&expected).unwrap() < 1e-12);

        assert!(matches!(
            spectral_projection(&HermitianMatrix::diag(&[1.0, 2.0]), &Interval::above(1.0 + 1e-9)),
            Err(Error::AmbiguousBoundary { .. })
        ));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(op_norm(&HermitianMatrix::diag(&[1.0, 5.0])), 5.0);
        assert_eq!(op_norm(&HermitianMatrix::zeros(3)), 0.0);
        assert!((op_norm(&swap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn loewner_examples() {
        let i = HermitianMatrix::identity(2);
        assert!(loewner_leq(&i, &i.scale(2.0), 1e-10).unwrap());
        assert!(!loewner_leq(&HermitianMatrix::diag(&[1.0, 0.0]), &HermitianMatrix::diag(&[0.0, 1.0]), 1e-10).unwrap());
        let a = HermitianMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(loewner_leq(&a, &HermitianMatrix::scalar(2, 3.0), 1e-10).unwrap());
        assert!(matches!(
            loewner_leq(&i, &HermitianMatrix::identity(3), 1e-10),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn definiteness_examples() {
        assert!(is_pd(&HermitianMatrix::identity(2)));
        let d = HermitianMatrix::diag(&[1.0, 0.0]);
        assert!(is_psd(&d, 1e-10));
        assert!(!is_pd(&d));
        assert!(!is_psd(&HermitianMatrix::diag(&[1.0, -1e-3]), 1e-10));
    }

    #[test]
    fn random_generators() {
        let a = random_psd(2, 0, RandomKind::PositiveDefinite).unwrap();
        let b = random_psd(2, 0, RandomKind::PositiveDefinite).unwrap();
        assert_eq!(a, b);
        for seed in 0..20 {
            let p = random_psd(3, seed, RandomKind::Projection).unwrap();
            let p2 = HermitianMatrix::symmetrized(p.entries() * p.entries());
            assert!(p2.max_abs_diff(&p).unwrap() < RECON_TOL);
            let pd = random_psd(4, seed, RandomKind::PositiveDefinite).unwrap();
            assert!(min_eigenvalue(&pd) >= RANDOM_PD_SHIFT - 1e-12);
            let psd = random_psd(4, seed, RandomKind::PositiveSemidefinite).unwrap();
            assert!(is_psd(&psd, 1e-10));
        }
        assert!(random_psd(0, 0, RandomKind::Projection).is_err());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let a = random_psd(3, 11, RandomKind::PositiveDefinite).unwrap();
        let json = serde_json::to_string(&a.to_json()).unwrap();
        let back = HermitianMatrix::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        assert!(back.max_abs_diff(&a).unwrap() == 0.0);

        let real: MatrixJson = serde_json::from_str(r#"{"dim":2,"re":[[1,2],[2,1]]}"#).unwrap();
        assert_eq!(HermitianMatrix::from_json(&real).unwrap().get(0, 1), C64::new(2.0, 0.0));
        let bad: MatrixJson = serde_json::from_str(r#"{"dim":2,"re":[[1,2],[2]]}"#).unwrap();
        match HermitianMatrix::from_json(&bad) {
            Err(Error::InvalidInput { field, .. }) => assert_eq!(field, "re[1]"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
