//! The arithmetic, geometric and harmonic means of positive matrices, and
//! the power-mean family on cone functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cones::ConeFunction;
use crate::error::{Error, Result};
use crate::spectral::{decompose, psd_sqrt, require_pd, HermitianMatrix};

/// Which mean to take. `Power(p)` with `p` in `{1, 0, -1}` never exists:
/// [`MeanKind::power`] collapses those to the named variants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Harmonic,
    Power(f64),
}

impl MeanKind {
    pub fn power(p: f64) -> Self {
        if p == 1.0 {
            MeanKind::Arithmetic
        } else if p == 0.0 {
            MeanKind::Geometric
        } else if p == -1.0 {
            MeanKind::Harmonic
        } else {
            MeanKind::Power(p)
        }
    }

    /// The power-mean exponent; 0 stands for the geometric mean.
    pub fn exponent(&self) -> f64 {
        match *self {
            MeanKind::Arithmetic => 1.0,
            MeanKind::Geometric => 0.0,
            MeanKind::Harmonic => -1.0,
            MeanKind::Power(p) => p,
        }
    }

    /// Negative exponents are only defined on strictly positive values.
    pub fn requires_strict(&self) -> bool {
        self.exponent() < 0.0
    }

    fn identity(&self) -> f64 {
        match self {
            MeanKind::Geometric => 1.0,
            _ => 0.0,
        }
    }

    fn fold(&self, acc: f64, value: f64) -> f64 {
        match *self {
            MeanKind::Arithmetic => acc + value,
            MeanKind::Geometric => acc * value,
            MeanKind::Harmonic => acc + 1.0 / value,
            MeanKind::Power(p) => acc + value.powf(p),
        }
    }

    fn finish(&self, acc: f64, count: usize) -> f64 {
        let n = count as f64;
        match *self {
            MeanKind::Arithmetic => acc / n,
            MeanKind::Geometric => {
                if count == 1 {
                    acc
                } else {
                    acc.powf(1.0 / n)
                }
            }
            MeanKind::Harmonic => n / acc,
            MeanKind::Power(p) => (acc / n).powf(1.0 / p),
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanKind::Arithmetic => f.write_str("arithmetic"),
            MeanKind::Geometric => f.write_str("geometric"),
            MeanKind::Harmonic => f.write_str("harmonic"),
            MeanKind::Power(p) => write!(f, "power:{p}"),
        }
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    /// Accepts `arithmetic`, `geometric`, `harmonic` and `power:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "arithmetic" | "am" => Ok(MeanKind::Arithmetic),
            "geometric" | "gm" => Ok(MeanKind::Geometric),
            "harmonic" | "hm" => Ok(MeanKind::Harmonic),
            other => {
                let p = other
                    .strip_prefix("power:")
                    .or_else(|| other.strip_prefix("p="))
                    .and_then(|p| p.parse::<f64>().ok())
                    .filter(|p| p.is_finite())
                    .ok_or_else(|| {
                        Error::invalid("mean", format!("unknown mean `{s}`"))
                    })?;
                Ok(MeanKind::power(p))
            }
        }
    }
}

impl Serialize for MeanKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MeanKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Running accumulation of one mean at every point of a finite space.
///
/// Both sides of a preservation check go through the same accumulator, so
/// equal inputs give bit-identical means.
#[derive(Clone, Debug)]
pub(crate) struct PointwiseAccumulator {
    kind: MeanKind,
    acc: Vec<f64>,
    count: usize,
}

impl PointwiseAccumulator {
    pub(crate) fn new(kind: MeanKind, len: usize) -> Self {
        Self {
            kind,
            acc: vec![kind.identity(); len],
            count: 0,
        }
    }

    pub(crate) fn push(&mut self, values: &[f64]) {
        for (a, &v) in self.acc.iter_mut().zip(values) {
            *a = self.kind.fold(*a, v);
        }
        self.count += 1;
    }

    pub(crate) fn sup_of_mean(&self) -> f64 {
        self.acc
            .iter()
            .map(|&a| self.kind.finish(a, self.count))
            .fold(0.0, f64::max)
    }

    pub(crate) fn mean(&self) -> Vec<f64> {
        self.acc
            .iter()
            .map(|&a| self.kind.finish(a, self.count))
            .collect()
    }
}

/// Mean of a list of nonnegative scalars.
pub fn scalar_mean(kind: MeanKind, values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyCollection);
    }
    if kind.requires_strict() && values.iter().any(|&v| v <= 0.0) {
        return Err(Error::NotStrictlyPositive {
            name: "scalar".into(),
        });
    }
    let acc = values.iter().fold(kind.identity(), |acc, &v| kind.fold(acc, v));
    Ok(kind.finish(acc, values.len()))
}

/// Pointwise power mean of cone functions on a common space.
pub fn n_ary_power_mean(kind: MeanKind, fs: &[ConeFunction]) -> Result<ConeFunction> {
    let first = fs.first().ok_or(Error::EmptyCollection)?;
    let mut acc = PointwiseAccumulator::new(kind, first.len());
    for (i, f) in fs.iter().enumerate() {
        if f.space() != first.space() {
            return Err(Error::invalid(
                format!("fs[{i}]"),
                "functions live on different spaces",
            ));
        }
        if kind.requires_strict() && !f.is_strictly_positive() {
            return Err(Error::NotStrictlyPositive {
                name: format!("fs[{i}]"),
            });
        }
        acc.push(f.values());
    }
    ConeFunction::new(first.space_arc(), acc.mean())
}

/// `(A + B) / 2`.
pub fn arithmetic_mean(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(a.try_add(b)?.scale(0.5))
}

/// `A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}`.
///
/// `A` must be positive definite. A singular PSD `B` is accepted: the inner
/// square root is still defined, although the result then no longer solves
/// `X A^{-1} X = B` with an invertible `X`.
pub fn geometric_mean(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let da = require_pd(a)?;
    let root = da.apply(f64::sqrt)?;
    let inv_root = da.apply(|t| 1.0 / t.sqrt())?;
    let inner = psd_sqrt(&b.congruence(&inv_root)?)?;
    inner.congruence(&root)
}

/// `2 (A^{-1} + B^{-1})^{-1}`.
pub fn harmonic_mean(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let inv_a = require_pd(a)?.apply(|t| 1.0 / t)?;
    let inv_b = require_pd(b)?.apply(|t| 1.0 / t)?;
    let sum = inv_a.try_add(&inv_b)?;
    decompose(&sum).apply(|t| 2.0 / t)
}

/// Matrix mean by kind. Only the three Kubo-Ando means are defined here.
pub fn matrix_mean(kind: MeanKind, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    match kind {
        MeanKind::Arithmetic => arithmetic_mean(a, b),
        MeanKind::Geometric => geometric_mean(a, b),
        MeanKind::Harmonic => harmonic_mean(a, b),
        MeanKind::Power(p) => Err(Error::invalid(
            "mean",
            format!("power mean p={p} is only defined for commuting (function) arguments"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::FiniteSpace;
    use crate::spectral::{inverse, op_norm, random_psd, RandomKind};

    fn close(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> bool {
        a.max_abs_diff(b).unwrap() <= tol
    }

    #[test]
    fn kind_normalization() {
        assert_eq!(MeanKind::power(1.0), MeanKind::Arithmetic);
        assert_eq!(MeanKind::power(-1.0), MeanKind::Harmonic);
        assert_eq!(MeanKind::power(0.0), MeanKind::Geometric);
        assert_eq!(MeanKind::power(2.0), MeanKind::Power(2.0));
        assert_eq!("power:1".parse::<MeanKind>().unwrap(), MeanKind::Arithmetic);
        assert_eq!("Harmonic".parse::<MeanKind>().unwrap(), MeanKind::Harmonic);
        assert_eq!("power:0.5".parse::<MeanKind>().unwrap(), MeanKind::Power(0.5));
        assert!("median".parse::<MeanKind>().is_err());
        let json = serde_json::to_string(&MeanKind::Power(-2.0)).unwrap();
        assert_eq!(json, "\"power:-2\"");
        assert_eq!(serde_json::from_str::<MeanKind>(&json).unwrap(), MeanKind::Power(-2.0));
    }

    #[test]
    fn arithmetic_examples() {
        let i = HermitianMatrix::identity(2);
        assert!(close(&arithmetic_mean(&i, &i.scale(3.0)).unwrap(), &i.scale(2.0), 0.0));
        let a = random_psd(3, 1, RandomKind::PositiveDefinite).unwrap();
        assert!(close(&arithmetic_mean(&a, &a).unwrap(), &a, 1e-15));
        let m = arithmetic_mean(&HermitianMatrix::diag(&[1.0, 4.0]), &HermitianMatrix::diag(&[9.0, 1.0])).unwrap();
        assert!(close(&m, &HermitianMatrix::diag(&[5.0, 2.5]), 0.0));
        assert!(arithmetic_mean(&i, &HermitianMatrix::identity(3)).is_err());
    }

    #[test]
    fn geometric_examples() {
        let a = random_psd(3, 2, RandomKind::PositiveDefinite).unwrap();
        assert!(close(&geometric_mean(&a, &a).unwrap(), &a, 1e-9));
        let g = geometric_mean(&HermitianMatrix::diag(&[1.0, 4.0]), &HermitianMatrix::diag(&[9.0, 1.0])).unwrap();
        assert!(close(&g, &HermitianMatrix::diag(&[3.0, 2.0]), 1e-12));

        // Riccati residual is the oracle for the non-commuting case.
        let a = random_psd(3, 7, RandomKind::PositiveDefinite).unwrap();
        let b = random_psd(3, 7 ^ 0x9e37, RandomKind::PositiveDefinite).unwrap();
        let x = geometric_mean(&a, &b).unwrap();
        let residual = inverse(&a).unwrap().congruence(&x).unwrap();
        assert!(residual.max_abs_diff(&b).unwrap() <= 1e-7 * (1.0 + op_norm(&b)));

        assert!(matches!(
            geometric_mean(&HermitianMatrix::identity(2), &a),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            geometric_mean(&HermitianMatrix::diag(&[1.0, 0.0]), &HermitianMatrix::identity(2)),
            Err(Error::NotPositiveDefinite { .. })
        ));
        // Singular B still evaluates.
        let g = geometric_mean(&HermitianMatrix::identity(2), &HermitianMatrix::diag(&[4.0, 0.0])).unwrap();
        assert!(close(&g, &HermitianMatrix::diag(&[2.0, 0.0]), 1e-12));
    }

    #[test]
    fn harmonic_examples() {
        let a = random_psd(4, 5, RandomKind::PositiveDefinite).unwrap();
        assert!(close(&harmonic_mean(&a, &a).unwrap(), &a, 1e-9));
        let h = harmonic_mean(&HermitianMatrix::diag(&[2.0, 1.0]), &HermitianMatrix::diag(&[2.0, 4.0])).unwrap();
        assert!(close(&h, &HermitianMatrix::diag(&[2.0, 1.6]), 1e-12));
        let p = HermitianMatrix::diag(&[1.0, 0.0]);
        let q = HermitianMatrix::diag(&[0.0, 1.0]);
        let h = harmonic_mean(&p.shift(1.0), &q.shift(1.0)).unwrap();
        assert!(close(&h, &HermitianMatrix::scalar(2, 4.0 / 3.0), 1e-12));
        assert!(matches!(
            harmonic_mean(&p, &q),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn n_ary_examples() {
        let space = FiniteSpace::new(["x"]).unwrap();
        let f = ConeFunction::new(space.clone(), vec![2.0]).unwrap();
        let g = ConeFunction::new(space.clone(), vec![4.0]).unwrap();
        let h = ConeFunction::new(space.clone(), vec![8.0]).unwrap();
        assert_eq!(n_ary_power_mean(MeanKind::Arithmetic, std::slice::from_ref(&f)).unwrap().values(), &[2.0]);
        assert_eq!(
            n_ary_power_mean(MeanKind::Harmonic, &[f.clone(), g.clone()]).unwrap().values(),
            &[8.0 / 3.0]
        );
        assert_eq!(n_ary_power_mean(MeanKind::Geometric, &[f.clone(), h]).unwrap().values(), &[4.0]);
        assert_eq!(
            n_ary_power_mean(MeanKind::power(-1.0), &[f.clone(), g.clone()]).unwrap(),
            n_ary_power_mean(MeanKind::Harmonic, &[f.clone(), g.clone()]).unwrap()
        );
        let p2 = n_ary_power_mean(MeanKind::Power(2.0), &[f.clone(), g.clone()]).unwrap();
        assert!((p2.values()[0] - 10f64.sqrt()).abs() < 1e-15);

        let zero = ConeFunction::new(space.clone(), vec![0.0]).unwrap();
        assert_eq!(n_ary_power_mean(MeanKind::Geometric, &[zero.clone(), g.clone()]).unwrap().values(), &[0.0]);
        assert!(matches!(
            n_ary_power_mean(MeanKind::Harmonic, &[zero.clone(), g.clone()]),
            Err(Error::NotStrictlyPositive { .. })
        ));
        assert!(matches!(
            n_ary_power_mean(MeanKind::Power(-2.0), &[zero, g]),
            Err(Error::NotStrictlyPositive { .. })
        ));
        assert!(matches!(n_ary_power_mean(MeanKind::Arithmetic, &[]), Err(Error::EmptyCollection)));
    }

    #[test]
    fn scalar_mean_matches_closed_forms() {
        assert_eq!(scalar_mean(MeanKind::Arithmetic, &[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(scalar_mean(MeanKind::Harmonic, &[2.0, 4.0]).unwrap(), 8.0 / 3.0);
        assert!((scalar_mean(MeanKind::Power(1e-9), &[2.0, 8.0]).unwrap() - 4.0).abs() < 1e-6);
    }
}
