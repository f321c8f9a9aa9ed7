//! The three limit sequences that recover `max f` over `pk(g0)` from sup
//! norms alone. The arithmetic and harmonic sequences are evaluated in exact
//! rational arithmetic on the binary values of the inputs, so stabilization
//! is an exact equality.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::space::ConeFunction;
use crate::error::{Error, Result};

/// Tolerance defining convergence of the geometric sequence.
pub const GM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct LimitSequence {
    /// Terms for `n = 1..=n_max`.
    pub sequence: Vec<f64>,
    pub target: f64,
    /// First `n` from which every term up to `n_max` is at the target.
    pub stabilized_at: Option<usize>,
    /// The closed-form stabilization index, where one exists.
    pub predicted: Option<usize>,
}

impl LimitSequence {
    pub fn stabilized_as_predicted(&self) -> bool {
        self.predicted.is_some() && self.stabilized_at == self.predicted
    }
}

fn check_pair(g0: &ConeFunction, f: &ConeFunction) -> Result<()> {
    if g0.space() != f.space() {
        return Err(Error::invalid("f", "g0 and f live on different spaces"));
    }
    if g0.is_zero() {
        return Err(Error::ZeroFunction);
    }
    Ok(())
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("cone values are finite")
}

fn exact_values(f: &ConeFunction) -> Vec<BigRational> {
    f.values().iter().map(|&v| exact(v)).collect()
}

fn max_of(values: &[BigRational]) -> BigRational {
    values.iter().cloned().fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

fn ceil_usize(q: &BigRational) -> usize {
    q.ceil().to_integer().to_usize().unwrap_or(usize::MAX)
}

/// The exact target and the indices of the exact peak set of `g0`.
fn exact_target(g: &[BigRational], f: &[BigRational]) -> (BigRational, BigRational, Vec<bool>) {
    let norm = max_of(g);
    let peak: Vec<bool> = g.iter().map(|v| *v == norm).collect();
    let target = f
        .iter()
        .zip(&peak)
        .filter(|(_, &p)| p)
        .map(|(v, _)| v.clone())
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    (norm, target, peak)
}

fn stabilization(terms: &[BigRational], target: &BigRational) -> Option<usize> {
    let tail = terms.iter().rev().take_while(|t| *t == target).count();
    (tail > 0).then(|| terms.len() - tail + 1)
}

/// `s_n = ||n g0 + f|| - n ||g0||`.
pub fn am_limit_sequence(g0: &ConeFunction, f: &ConeFunction, n_max: usize) -> Result<LimitSequence> {
    check_pair(g0, f)?;
    let g = exact_values(g0);
    let fv = exact_values(f);
    let (norm, target, peak) = exact_target(&g, &fv);
    let terms: Vec<BigRational> = (1..=n_max)
        .map(|n| {
            let n = BigRational::from_integer(BigInt::from(n));
            let sup = g
                .iter()
                .zip(&fv)
                .map(|(gx, fx)| &n * gx + fx)
                .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
            sup - &n * &norm
        })
        .collect();
    let mut need = BigRational::one();
    for ((gx, fx), p) in g.iter().zip(&fv).zip(&peak) {
        if !p && *fx > target {
            let n = (fx - &target) / (&norm - gx);
            if n > need {
                need = n;
            }
        }
    }
    Ok(LimitSequence {
        sequence: terms.iter().map(|t| t.to_f64().unwrap_or(f64::NAN)).collect(),
        target: target.to_f64().unwrap_or(f64::NAN),
        stabilized_at: stabilization(&terms, &target),
        predicted: Some(ceil_usize(&need)),
    })
}

/// `r_n = ||g0^n f|| / ||g0||^n`, computed as `max (g0 / ||g0||)^n f`.
pub fn gm_limit_sequence(g0: &ConeFunction, f: &ConeFunction, n_max: usize) -> Result<LimitSequence> {
    check_pair(g0, f)?;
    let norm = g0.sup_norm();
    let target = g0
        .values()
        .iter()
        .zip(f.values())
        .filter(|(&g, _)| g == norm)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max);
    let ratios: Vec<f64> = g0.values().iter().map(|g| g / norm).collect();
    let sequence: Vec<f64> = (1..=n_max)
        .map(|n| {
            ratios
                .iter()
                .zip(f.values())
                .map(|(r, v)| r.powi(n as i32) * v)
                .fold(0.0, f64::max)
        })
        .collect();
    let close = |r: f64| (r - target).abs() <= GM_TOL * (1.0 + target);
    let tail = sequence.iter().rev().take_while(|&&r| close(r)).count();
    Ok(LimitSequence {
        stabilized_at: (tail > 0).then(|| sequence.len() - tail + 1),
        sequence,
        target,
        predicted: None,
    })
}

/// `h_n = (||(n g0^{-1} + f^{-1})^{-1}||^{-1} - n ||g0||^{-1})^{-1}`.
pub fn hm_limit_sequence(g0: &ConeFunction, f: &ConeFunction, n_max: usize) -> Result<LimitSequence> {
    check_pair(g0, f)?;
    for (name, h) in [("g0", g0), ("f", f)] {
        if !h.is_strictly_positive() {
            return Err(Error::NotStrictlyPositive { name: name.into() });
        }
    }
    let g = exact_values(g0);
    let fv = exact_values(f);
    let (norm, target, peak) = exact_target(&g, &fv);
    let inv = |q: &BigRational| q.recip();
    let terms: Vec<BigRational> = (1..=n_max)
        .map(|n| {
            let n = BigRational::from_integer(BigInt::from(n));
            // ||(n/g0 + 1/f)^{-1}||^{-1} is the minimum of n/g0 + 1/f.
            let low = g
                .iter()
                .zip(&fv)
                .map(|(gx, fx)| &n * inv(gx) + inv(fx))
                .reduce(|a, b| if b < a { b } else { a })
                .expect("nonempty space");
            inv(&(low - &n * inv(&norm)))
        })
        .collect();
    let mut need = BigRational::one();
    for ((gx, fx), p) in g.iter().zip(&fv).zip(&peak) {
        if !p && *fx > target {
            let n = (inv(&target) - inv(fx)) / (inv(gx) - inv(&norm));
            if n > need {
                need = n;
            }
        }
    }
    Ok(LimitSequence {
        sequence: terms.iter().map(|t| t.to_f64().unwrap_or(f64::NAN)).collect(),
        target: target.to_f64().unwrap_or(f64::NAN),
        stabilized_at: stabilization(&terms, &target),
        predicted: Some(ceil_usize(&need)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::space::FiniteSpace;

    fn pair(g: [f64; 2], f: [f64; 2]) -> (ConeFunction, ConeFunction) {
        let s = FiniteSpace::new(["1", "2"]).unwrap();
        (
            ConeFunction::new(s.clone(), g.to_vec()).unwrap(),
            ConeFunction::new(s, f.to_vec()).unwrap(),
        )
    }

    #[test]
    fn am_examples() {
        let (g, f) = pair([2.0, 1.0], [5.0, 7.0]);
        let s = am_limit_sequence(&g, &f, 10).unwrap();
        assert_eq!(s.target, 5.0);
        // max(2n + 5, n + 7) - 2n
        assert_eq!(s.sequence[0], 6.0);
        assert!(s.sequence[1..].iter().all(|&v| v == 5.0));
        assert_eq!(s.stabilized_at, Some(2));
        assert!(s.stabilized_as_predicted());

        let (g, z) = pair([2.0, 1.0], [0.0, 0.0]);
        let s = am_limit_sequence(&g, &z, 5).unwrap();
        assert!(s.sequence.iter().all(|&v| v == 0.0));
        assert_eq!(s.stabilized_at, Some(1));

        let (c, f) = pair([3.0, 3.0], [5.0, 7.0]);
        let s = am_limit_sequence(&c, &f, 5).unwrap();
        assert_eq!(s.target, 7.0);
        assert_eq!(s.stabilized_at, Some(1));

        let (z, f) = pair([0.0, 0.0], [1.0, 1.0]);
        assert_eq!(am_limit_sequence(&z, &f, 3).unwrap_err(), Error::ZeroFunction);
    }

    #[test]
    fn gm_examples() {
        let (g, f) = pair([2.0, 1.0], [5.0, 7.0]);
        let s = gm_limit_sequence(&g, &f, 10).unwrap();
        assert_eq!(s.target, 5.0);
        assert!(s.sequence.iter().all(|&v| v == 5.0));
        assert_eq!(s.stabilized_at, Some(1));

        let (g, f) = pair([2.0, 1.0], [0.0, 7.0]);
        let s = gm_limit_sequence(&g, &f, 60).unwrap();
        assert_eq!(s.target, 0.0);
        for (n, v) in s.sequence.iter().enumerate() {
            assert_eq!(*v, 7.0 / 2f64.powi(n as i32 + 1));
        }
        assert!(s.stabilized_at.unwrap() <= 60);

        let (c, f) = pair([1.0, 1.0], [5.0, 7.0]);
        let s = gm_limit_sequence(&c, &f, 3).unwrap();
        assert_eq!(s.sequence[0], 7.0);
    }

    #[test]
    fn hm_examples() {
        let (g, f) = pair([2.0, 1.0], [5.0, 7.0]);
        let s = hm_limit_sequence(&g, &f, 10).unwrap();
        assert_eq!(s.target, 5.0);
        assert!(s.sequence.iter().all(|&v| v == 5.0));
        assert!(s.stabilized_as_predicted());

        let (g, f) = pair([2.0, 1.0], [3.0, 3.0]);
        let s = hm_limit_sequence(&g, &f, 10).unwrap();
        assert!(s.sequence.iter().all(|&v| v == 3.0));

        let (c, f) = pair([1.0, 1.0], [5.0, 7.0]);
        assert_eq!(hm_limit_sequence(&c, &f, 3).unwrap().target, 7.0);

        let (g, f) = pair([2.0, 0.0], [5.0, 7.0]);
        assert!(matches!(hm_limit_sequence(&g, &f, 3), Err(Error::NotStrictlyPositive { .. })));
    }

    #[test]
    fn am_late_stabilization() {
        // Off-peak gap 1/4 and excess 3 give N* = 12.
        let (g, f) = pair([1.0, 0.75], [1.0, 4.0]);
        let s = am_limit_sequence(&g, &f, 30).unwrap();
        assert_eq!(s.predicted, Some(12));
        assert_eq!(s.stabilized_at, Some(12));
        assert!(s.sequence[10] > 1.0);
    }
}
