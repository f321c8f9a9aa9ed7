//! Constructive versions of the order, orthogonality and equality
//! characterizations of positive matrices.
//!
//! Each routine builds the explicit test element used to separate two
//! positive matrices and evaluates the norm inequality on it. The eigenvalue
//! oracle in [`crate::spectral`] is the independent cross-check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::harmonic_mean;
use crate::spectral::{
    decompose, loewner_leq, matrix_norm, op_norm, require_pd, HermitianMatrix, Interval,
    EIG_GAP_TOL, PD_FLOOR,
};

/// Slack on the norm inequalities evaluated by the witnesses.
pub const WITNESS_TOL: f64 = 1e-9;
/// Tolerance of the Loewner comparisons inside [`equality_witness`].
pub const ORDER_TOL: f64 = 1e-8;
/// Shift applied to orthogonality levels that land on an eigenvalue.
pub const LEVEL_NUDGE: f64 = 1e-6;

/// Evaluation of `||A + (tI - B)|| <= t` at `t = ||B|| + 1`.
#[derive(Clone, Debug, Serialize)]
pub struct OrderWitness {
    pub t: f64,
    pub lhs: f64,
    pub holds: bool,
}

pub fn order_leq_witness_detail(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<OrderWitness> {
    let t = op_norm(b) + 1.0;
    let x = b.scale(-1.0).shift(t);
    let lhs = op_norm(&a.try_add(&x)?);
    Ok(OrderWitness {
        t,
        lhs,
        holds: lhs <= t + WITNESS_TOL,
    })
}

/// `A <= B` decided by a single norm comparison against `X = tI - B`.
pub fn order_leq_witness(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<bool> {
    Ok(order_leq_witness_detail(a, b)?.holds)
}

/// Evaluation of `||A ! X|| <= ||B ! X||` at `X = (tB - I)^{-1} B`,
/// `t = 2 / min eig(B)`.
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicOrderWitness {
    pub t: f64,
    pub lhs: f64,
    /// `||B ! X||`, equal to `2 / t` up to rounding.
    pub rhs: f64,
    pub holds: bool,
}

pub fn hm_order_witness_detail(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HarmonicOrderWitness> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    require_pd(a)?;
    let db = require_pd(b)?;
    let t = 2.0 / db.min();
    // (tB - I)^{-1} B is a function of B.
    let x = db.apply(|l| l / (t * l - 1.0))?;
    let lhs = op_norm(&harmonic_mean(a, &x)?);
    let rhs = op_norm(&harmonic_mean(b, &x)?);
    Ok(HarmonicOrderWitness {
        t,
        lhs,
        rhs,
        holds: lhs <= rhs + WITNESS_TOL,
    })
}

/// `A <= B` decided through harmonic means.
pub fn hm_order_witness(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<bool> {
    Ok(hm_order_witness_detail(a, b)?.holds)
}

/// Default level grid for the orthogonality checks.
///
/// Levels are `s / 2^k` with `s = max(||A||, ||B||)`, for `k = 1..=20` and
/// further until the level drops below half the smallest positive eigenvalue
/// of either matrix. A level within `EIG_GAP_TOL` of an eigenvalue is pushed
/// up by `LEVEL_NUDGE` until it clears the spectrum.
pub fn orthogonality_levels(a: &HermitianMatrix, b: &HermitianMatrix) -> Vec<f64> {
    let da = decompose(a);
    let db = decompose(b);
    let spectrum: Vec<f64> = da.eigenvalues().iter().chain(db.eigenvalues()).copied().collect();
    let scale = da.spectral_radius().max(db.spectral_radius());
    if scale <= PD_FLOOR {
        return Vec::new();
    }
    let noise = 1e-10 * (1.0 + scale);
    let min_positive = spectrum
        .iter()
        .copied()
        .filter(|&l| l > noise)
        .fold(f64::INFINITY, f64::min);
    let mut levels = Vec::new();
    let mut level = scale;
    for k in 1..=200 {
        level /= 2.0;
        levels.push(clear_of_spectrum(level, &spectrum));
        if level < min_positive / 2.0 && k >= 20 {
            break;
        }
    }
    levels
}

fn clear_of_spectrum(mut level: f64, spectrum: &[f64]) -> f64 {
    for _ in 0..10_000 {
        if spectrum.iter().all(|&l| (l - level).abs() > EIG_GAP_TOL) {
            break;
        }
        level += LEVEL_NUDGE;
    }
    level
}

/// For every level `a`, checks `||C + D|| = max(||C||, ||D||)` on the
/// dominated pair `C = a E_A(a, inf)`, `D = a E_B(a, inf)`.
pub fn orthogonality_maxnorm_check(a: &HermitianMatrix, b: &HermitianMatrix, levels: &[f64]) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let da = decompose(a);
    let db = decompose(b);
    for &level in levels {
        let c = da.projection(&Interval::above(level))?.scale(level);
        let d = db.projection(&Interval::above(level))?.scale(level);
        let sum = op_norm(&c.try_add(&d)?);
        let max = op_norm(&c).max(op_norm(&d));
        if (sum - max).abs() > WITNESS_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityBoundReport {
    pub t: f64,
    /// `||(tI + U) ! (tI + V)||`.
    pub lhs: f64,
    /// `2t (t + m) / (2t + m)` with `m = max(||U||, ||V||)`.
    pub rhs: f64,
    pub max_norm: f64,
    pub satisfied: bool,
}

impl OrthogonalityBoundReport {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

pub fn hm_orthogonality_bound(t: f64, u: &HermitianMatrix, v: &HermitianMatrix) -> Result<OrthogonalityBoundReport> {
    if !(t > 0.0) {
        return Err(Error::invalid("t", format!("must be positive, got {t}")));
    }
    let lhs = op_norm(&harmonic_mean(&u.shift(t), &v.shift(t))?);
    let max_norm = op_norm(u).max(op_norm(v));
    let rhs = 2.0 * t * (t + max_norm) / (2.0 * t + max_norm);
    Ok(OrthogonalityBoundReport {
        t,
        lhs,
        rhs,
        max_norm,
        satisfied: lhs <= rhs + WITNESS_TOL,
    })
}

/// The projection family `t -> E_X(t, inf)`: the finite-dimensional form of
/// the squeezed spectral family, with `t E <= X E <= X` and
/// `X (I - E) <= t (I - E)`.
pub fn spectral_family_tilde(x: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
    if !(t >= 0.0) {
        return Err(Error::invalid("t", format!("must be nonnegative, got {t}")));
    }
    decompose(x).projection(&Interval::above(t))
}

/// `||E_X(t) E_Y(t)|| <= 1e-9` at every level.
pub fn aw_ortho_check(x: &HermitianMatrix, y: &HermitianMatrix, levels: &[f64]) -> Result<bool> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    let dx = decompose(x);
    let dy = decompose(y);
    for &t in levels {
        let ex = dx.projection(&Interval::above(t))?;
        let ey = dy.projection(&Interval::above(t))?;
        if matrix_norm(&ex.product(&ey)?) > WITNESS_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A positive `X` lying below one of two distinct positive definite
/// matrices but not below the other.
#[derive(Clone, Debug)]
pub struct EqualityWitness {
    /// True when the roles of the inputs were exchanged, i.e. `X <= B`.
    pub swapped: bool,
    pub lambda0: f64,
    /// Gap below `lambda0` free of spectrum: `E_T(-inf, lambda0 - eps]`
    /// equals `E_T(-inf, lambda0)`.
    pub epsilon: f64,
    pub delta: f64,
    pub projection: HermitianMatrix,
    pub violating_x: HermitianMatrix,
    /// `(||E A^{-1} E||, ||E B^{-1} E||)` in the (possibly swapped) order.
    pub side_norms: (f64, f64),
    pub below_first: bool,
    pub below_second: bool,
}

impl EqualityWitness {
    /// `||E B^{-1} E|| - ||E A^{-1} E|| - |lambda0|`; nonnegative up to rounding.
    pub fn gap_excess(&self) -> f64 {
        self.side_norms.1 - self.side_norms.0 - self.lambda0.abs()
    }

    pub fn verified(&self) -> bool {
        self.below_first && !self.below_second && self.gap_excess() >= -ORDER_TOL
    }
}

/// Builds the separating element for `A != B`, or `None` when `A = B`.
///
/// With `T = A^{-1} - B^{-1}` oriented to have its dominant eigenvalue
/// negative, `E = E_T(-inf, lambda0)` at `lambda0 = min eig(T) / 2` and
/// `X = E / ||E A^{-1} E||` satisfies `X <= A` but not `X <= B`.
pub fn equality_witness(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<Option<EqualityWitness>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let inv_a = require_pd(a)?.apply(|t| 1.0 / t)?;
    let inv_b = require_pd(b)?.apply(|t| 1.0 / t)?;
    if op_norm(&a.try_sub(b)?) <= WITNESS_TOL {
        return Ok(None);
    }
    let mut t = decompose(&inv_a.try_sub(&inv_b)?);
    let swapped = -t.min() < t.max();
    let (first, second, inv_first, inv_second) = if swapped {
        t = decompose(&inv_b.try_sub(&inv_a)?);
        (b, a, &inv_b, &inv_a)
    } else {
        (a, b, &inv_a, &inv_b)
    };

    let spectrum = t.eigenvalues();
    let lambda0 = separating_level(spectrum);
    let epsilon = spectrum
        .iter()
        .copied()
        .filter(|&l| l < lambda0)
        .fold(f64::NEG_INFINITY, f64::max);
    let epsilon = (lambda0 - epsilon) / 2.0;

    let e = t.projection(&Interval::below(lambda0))?;
    let first_side = op_norm(&inv_first.congruence(&e)?);
    let second_side = op_norm(&inv_second.congruence(&e)?);
    let delta = if first_side > 0.0 { 1.0 / first_side } else { 1.0 / PD_FLOOR };
    let x = e.scale(delta);
    let below_first = loewner_leq(&x, first, ORDER_TOL)?;
    let below_second = loewner_leq(&x, second, ORDER_TOL)?;
    Ok(Some(EqualityWitness {
        swapped,
        lambda0,
        epsilon,
        delta,
        projection: e,
        violating_x: x,
        side_norms: (first_side, second_side),
        below_first,
        below_second,
    }))
}

/// Half the most negative eigenvalue, moved into a spectral gap when an
/// eigenvalue sits on it.
fn separating_level(ascending: &[f64]) -> f64 {
    let lowest = ascending[0];
    let clear = |level: f64| ascending.iter().all(|&l| (l - level).abs() > EIG_GAP_TOL);
    let half = lowest / 2.0;
    if clear(half) {
        return half;
    }
    ascending
        .windows(2)
        .filter(|w| w[1] <= half + EIG_GAP_TOL && w[1] - w[0] > 2.0 * EIG_GAP_TOL)
        .map(|w| (w[0] + w[1]) / 2.0)
        .next_back()
        .unwrap_or(half)
}

/// `A -> map(A + eps I) - eps I`.
pub struct ShiftConjugate<F> {
    map: F,
    epsilon: f64,
}

pub fn shift_conjugate<F>(map: F, epsilon: f64) -> Result<ShiftConjugate<F>>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    Ok(ShiftConjugate { map, epsilon })
}

impl<F> ShiftConjugate<F>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn apply(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok((self.map)(&a.shift(self.epsilon))?.shift(-self.epsilon))
    }
}
