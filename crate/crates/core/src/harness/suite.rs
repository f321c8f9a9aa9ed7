//! Seeded property suites over the matrix witnesses and the finite cone
//! machinery. Trial `i` of suite `s` at dimension `d` draws from
//! `trial_rng(seed, s, d, i)` only.

use serde_json::Value;

use super::report::{Record, Status, SuiteReport};
use crate::cones::gallery::{build, GalleryId, GalleryOptions};
use crate::cones::{
    am_limit_sequence, check_mean_preservation, gm_limit_sequence, hm_limit_sequence, power_reduce, psupp,
    reconstruct, reduced_kind, supp, PreserverMap,
};
use crate::error::{Error, Result};
use crate::means::{arithmetic_mean, geometric_mean, harmonic_mean, scalar_mean, MeanKind};
use crate::sampling::{
    complementary_projections, composition_instance, inflate_one_image, limit_pair, orthogonal_pair,
    overlapping_projections, pd_pair, separated_pd_pair, trial_rng,
};
use crate::spectral::{
    inverse, loewner_leq, matrix_norm, op_norm, random_psd_with, random_unitary, HermitianMatrix, RandomKind,
};
use crate::witness::{
    aw_ortho_check, equality_witness, hm_order_witness, hm_orthogonality_bound, order_leq_witness,
    orthogonality_levels, orthogonality_maxnorm_check, shift_conjugate, spectral_family_tilde,
};

pub const ORACLE_TOL: f64 = 1e-8;
pub const RICCATI_TOL: f64 = 1e-7;
pub const BOUND_TOL: f64 = 1e-9;
pub const GM_STEPS: usize = 60;
pub const LIMIT_STEPS: usize = 256;
pub const POWER_EXPONENTS: [f64; 4] = [2.0, 0.5, -1.0, -2.0];

/// Counts trials and keeps the first few failure descriptions.
#[derive(Default)]
struct Tally {
    trials: usize,
    failures: usize,
    first: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.first.len() < 5 {
                self.first.push(what());
            }
        }
    }

    fn error(&mut self, e: Error, at: String) {
        self.check(false, || format!("{at}: {e}"));
    }

    fn record(self, name: &str, what: &str) -> Record {
        let detail = if self.failures == 0 {
            format!("{} {what}, no discrepancies", self.trials)
        } else {
            format!("{} of {} {what} failed: {}", self.failures, self.trials, self.first.join("; "))
        };
        Record::new(name, Status::from_bool(self.failures == 0 && self.trials > 0), detail)
            .metric("trials", self.trials)
            .metric("failures", self.failures)
    }
}

/// Order witnesses against the eigenvalue oracle.
pub fn order_witnesses(seed: u64, trials: usize, dims: &[usize]) -> Vec<Record> {
    let mut plain = Tally::default();
    let mut harmonic = Tally::default();
    let mut ordered = 0usize;
    for dim in dims.iter().copied() {
        for i in 0..trials {
            let mut rng = trial_rng(seed, "order", dim, i);
            let (a, b, shape) = pd_pair(&mut rng, dim);
            let oracle = loewner_leq(&a, &b, ORACLE_TOL).expect("same dimension");
            ordered += oracle as usize;
            match order_leq_witness(&a, &b) {
                Ok(w) => plain.check(w == oracle, || format!("dim {dim} trial {i} ({shape:?}): witness {w}, oracle {oracle}")),
                Err(e) => plain.error(e, format!("dim {dim} trial {i}")),
            }
            match hm_order_witness(&a, &b) {
                Ok(w) => harmonic.check(w == oracle, || format!("dim {dim} trial {i} ({shape:?}): witness {w}, oracle {oracle}")),
                Err(e) => harmonic.error(e, format!("dim {dim} trial {i}")),
            }
        }
    }
    vec![
        plain.record("order_witness", "pairs").metric("ordered_pairs", ordered),
        harmonic.record("hm_order_witness", "pairs").metric("ordered_pairs", ordered),
    ]
}

/// Max-norm and spectral-family characterizations of orthogonality.
pub fn orthogonality(seed: u64, trials: usize, dims: &[usize]) -> Vec<Record> {
    let mut maxnorm = Tally::default();
    let mut aw = Tally::default();
    let mut family = Tally::default();
    for dim in dims.iter().copied().filter(|&d| d >= 2) {
        for i in 0..trials {
            let mut rng = trial_rng(seed, "orthogonality", dim, i);
            let (a, b) = orthogonal_pair(&mut rng, dim);
            let (c, d, _) = pd_pair(&mut rng, dim);
            for (x, y, expect, tag) in [(&a, &b, true, "orthogonal"), (&c, &d, false, "positive definite")] {
                let levels = orthogonality_levels(x, y);
                match orthogonality_maxnorm_check(x, y, &levels) {
                    Ok(got) => maxnorm.check(got == expect, || format!("dim {dim} trial {i} {tag} pair: got {got}")),
                    Err(e) => maxnorm.error(e, format!("dim {dim} trial {i}")),
                }
                match aw_ortho_check(x, y, &levels) {
                    Ok(got) => aw.check(got == expect, || format!("dim {dim} trial {i} {tag} pair: got {got}")),
                    Err(e) => aw.error(e, format!("dim {dim} trial {i}")),
                }
            }
            // t E <= X E <= X and X (I - E) <= t (I - E) for E = E_X(t, inf).
            let x = random_psd_with(&mut rng, dim, RandomKind::PositiveSemidefinite);
            for t in orthogonality_levels(&x, &x).into_iter().take(6) {
                let ok = spectral_family_tilde(&x, t).and_then(|e| {
                    let id = HermitianMatrix::identity(dim);
                    let rest = id.try_sub(&e)?;
                    let xe = x.congruence(&e)?;
                    Ok(loewner_leq(&e.scale(t), &xe, ORACLE_TOL)?
                        && loewner_leq(&xe, &x, ORACLE_TOL)?
                        && loewner_leq(&x.congruence(&rest)?, &rest.scale(t), ORACLE_TOL)?
                        && matrix_norm(&(x.product(&e)? - e.product(&x)?)) <= 1e-9)
                });
                match ok {
                    Ok(ok) => family.check(ok, || format!("dim {dim} trial {i} level {t:e}")),
                    Err(e) => family.error(e, format!("dim {dim} trial {i}")),
                }
            }
        }
    }
    if maxnorm.trials == 0 {
        return vec![Record::new("orthogonality_maxnorm", Status::Skip, "needs a dimension of at least 2")];
    }
    vec![
        maxnorm.record("orthogonality_maxnorm", "pairs"),
        aw.record("aw_orthogonality", "pairs"),
        family.record("spectral_family_squeeze", "levels"),
    ]
}

/// Constructive separation of distinct positive definite matrices.
pub fn equality_witnesses(seed: u64, trials: usize, dims: &[usize]) -> Vec<Record> {
    let mut tally = Tally::default();
    let mut min_excess = f64::INFINITY;
    for dim in dims.iter().copied() {
        for i in 0..trials {
            let mut rng = trial_rng(seed, "equality", dim, i);
            let (a, b) = separated_pd_pair(&mut rng, dim, 0.1);
            match equality_witness(&a, &b) {
                Ok(Some(w)) => {
                    min_excess = min_excess.min(w.gap_excess());
                    tally.check(w.verified(), || {
                        format!(
                            "dim {dim} trial {i}: below first {}, below second {}, excess {:e}",
                            w.below_first,
                            w.below_second,
                            w.gap_excess()
                        )
                    })
                }
                Ok(None) => tally.check(false, || format!("dim {dim} trial {i}: no witness for distinct pair")),
                Err(e) => tally.error(e, format!("dim {dim} trial {i}")),
            }
            match equality_witness(&a, &a) {
                Ok(w) => tally.check(w.is_none(), || format!("dim {dim} trial {i}: witness for A = A")),
                Err(e) => tally.error(e, format!("dim {dim} trial {i}")),
            }
        }
    }
    vec![tally
        .record("equality_witness", "cases")
        .metric("min_gap_excess", finite_or_null(min_excess))]
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::Null
    }
}

/// The harmonic-mean bound, with equality exactly on orthogonal projections.
pub fn hm_orthogonality(seed: u64, trials: usize, dims: &[usize]) -> Vec<Record> {
    let mut equal = Tally::default();
    let mut strict = Tally::default();
    let mut worst_equality = 0.0f64;
    let mut min_margin = f64::INFINITY;
    for dim in dims.iter().copied().filter(|&d| d >= 2) {
        for i in 0..trials {
            let mut rng = trial_rng(seed, "hm_orthogonality", dim, i);
            let (p, q) = complementary_projections(&mut rng, dim);
            for t in [0.5, 1.0, 2.0] {
                match hm_orthogonality_bound(t, &p, &q) {
                    Ok(r) => {
                        worst_equality = worst_equality.max(r.margin().abs());
                        equal.check(r.margin().abs() <= BOUND_TOL, || {
                            format!("dim {dim} trial {i} t {t}: |lhs - rhs| = {:e}", r.margin().abs())
                        })
                    }
                    Err(e) => equal.error(e, format!("dim {dim} trial {i}")),
                }
            }
            let (p, q) = overlapping_projections(&mut rng, dim, 0.1);
            match hm_orthogonality_bound(1.0, &p, &q) {
                Ok(r) => {
                    min_margin = min_margin.min(r.margin());
                    strict.check(r.margin() > 0.0, || format!("dim {dim} trial {i}: margin {:e}", r.margin()))
                }
                Err(e) => strict.error(e, format!("dim {dim} trial {i}")),
            }
        }
    }
    if equal.trials == 0 {
        return vec![Record::new("hm_orthogonality_bound", Status::Skip, "needs a dimension of at least 2")];
    }
    vec![
        equal
            .record("hm_orthogonality_bound", "complementary cases")
            .metric("max_abs_margin", worst_equality),
        strict
            .record("hm_orthogonality_strict", "overlapping pairs")
            .metric("min_margin", finite_or_null(min_margin)),
    ]
}

/// `H <= G <= A` and the Riccati identity `X A^{-1} X = B` for `X = A # B`.
pub fn mean_chain(seed: u64, trials: usize, dims: &[usize]) -> Vec<Record> {
    let mut chain = Tally::default();
    let mut riccati = Tally::default();
    let mut scalar = Tally::default();
    let mut worst = 0.0f64;
    for dim in dims.iter().copied() {
        for i in 0..trials {
            let mut rng = trial_rng(seed, "means", dim, i);
            let (a, b, _) = pd_pair(&mut rng, dim);
            let res = (|| -> Result<(bool, f64, Option<bool>)> {
                let am = arithmetic_mean(&a, &b)?;
                let gm = geometric_mean(&a, &b)?;
                let hm = harmonic_mean(&a, &b)?;
                let ordered = loewner_leq(&hm, &gm, ORACLE_TOL)? && loewner_leq(&gm, &am, ORACLE_TOL)?;
                let r = HermitianMatrix::symmetrized(gm.entries() * inverse(&a)?.entries() * gm.entries());
                let rel = op_norm(&r.try_sub(&b)?) / (1.0 + op_norm(&b));
                let scalar_ok = (dim == 1).then(|| {
                    let (x, y) = (a.get(0, 0).re, b.get(0, 0).re);
                    [(MeanKind::Arithmetic, &am), (MeanKind::Geometric, &gm), (MeanKind::Harmonic, &hm)]
                        .iter()
                        .all(|(k, m)| {
                            let s = scalar_mean(*k, &[x, y]).unwrap_or(f64::NAN);
                            (m.get(0, 0).re - s).abs() <= 1e-12 * (1.0 + s)
                        })
                });
                Ok((ordered, rel, scalar_ok))
            })();
            match res {
                Ok((ordered, rel, scalar_ok)) => {
                    worst = worst.max(rel);
                    chain.check(ordered, || format!("dim {dim} trial {i}: chain broken"));
                    riccati.check(rel <= RICCATI_TOL, || format!("dim {dim} trial {i}: residual {rel:e}"));
                    if let Some(ok) = scalar_ok {
                        scalar.check(ok, || format!("trial {i}: scalar formulas differ"));
                    }
                }
                Err(e) => {
                    chain.error(e.clone(), format!("dim {dim} trial {i}"));
                    riccati.error(e, format!("dim {dim} trial {i}"));
                }
            }
        }
    }
    let mut out = vec![
        chain.record("mean_chain", "pairs"),
        riccati.record("riccati", "pairs").metric("max_relative_residual", worst),
    ];
    if scalar.trials > 0 {
        out.push(scalar.record("scalar_means", "pairs"));
    }
    out
}

/// `psi(A) = phi(A + eps I) - eps I` inverts the shift for unitary conjugations.
pub fn shift_conjugates(seed: u64, trials: usize, dims: &[usize]) -> Vec<Record> {
    let mut tally = Tally::default();
    for dim in dims.iter().copied() {
        for i in 0..trials.min(50) {
            let mut rng = trial_rng(seed, "shift", dim, i);
            let a = random_psd_with(&mut rng, dim, RandomKind::PositiveSemidefinite);
            let u = random_unitary(&mut rng, dim);
            let uu = u.clone();
            let res = shift_conjugate(move |m: &HermitianMatrix| m.unitary_conjugate(&uu), 0.5)
                .and_then(|psi| psi.apply(&a))
                .and_then(|got| got.max_abs_diff(&a.unitary_conjugate(&u)?));
            match res {
                Ok(d) => tally.check(d <= 1e-10, || format!("dim {dim} trial {i}: deviation {d:e}")),
                Err(e) => tally.error(e, format!("dim {dim} trial {i}")),
            }
        }
    }
    vec![tally.record("shift_conjugate", "maps")]
}

/// Limit sequences reach `max f` over `pk(g0)`.
pub fn limit_lemmas(seed: u64, trials: usize) -> Vec<Record> {
    let mut am = Tally::default();
    let mut gm = Tally::default();
    let mut hm = Tally::default();
    let mut latest = 0usize;
    for i in 0..trials {
        let mut rng = trial_rng(seed, "limits", 0, i);
        let (g, f) = match limit_pair(&mut rng) {
            Ok(p) => p,
            Err(e) => {
                am.error(e, format!("trial {i}"));
                continue;
            }
        };
        match am_limit_sequence(&g, &f, LIMIT_STEPS) {
            Ok(s) => {
                latest = latest.max(s.stabilized_at.unwrap_or(0));
                am.check(s.stabilized_as_predicted(), || {
                    format!("trial {i}: stabilized {:?}, predicted {:?}", s.stabilized_at, s.predicted)
                })
            }
            Err(e) => am.error(e, format!("trial {i}")),
        }
        match hm_limit_sequence(&g, &f, LIMIT_STEPS) {
            Ok(s) => {
                latest = latest.max(s.stabilized_at.unwrap_or(0));
                hm.check(s.stabilized_as_predicted(), || {
                    format!("trial {i}: stabilized {:?}, predicted {:?}", s.stabilized_at, s.predicted)
                })
            }
            Err(e) => hm.error(e, format!("trial {i}")),
        }
        match gm_limit_sequence(&g, &f, GM_STEPS) {
            Ok(s) => gm.check(s.stabilized_at.is_some(), || format!("trial {i}: not within tolerance by n = {GM_STEPS}")),
            Err(e) => gm.error(e, format!("trial {i}")),
        }
    }
    vec![
        am.record("am_limit", "pairs").metric("latest_stabilization", latest),
        gm.record("gm_limit", "pairs"),
        hm.record("hm_limit", "pairs"),
    ]
}

/// Composition operators with junk points: preservation, supports and
/// reconstruction.
pub fn composition_roundtrip(seed: u64, trials: usize) -> Vec<Record> {
    let mut preserve = Tally::default();
    let mut recover = Tally::default();
    let mut supports = Tally::default();
    for i in 0..trials {
        let mut rng = trial_rng(seed, "composition", 0, i);
        let inst = match composition_instance(&mut rng) {
            Ok(inst) => inst,
            Err(e) => {
                recover.error(e, format!("trial {i}"));
                continue;
            }
        };
        let t = &inst.map;
        for kind in [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Harmonic] {
            match check_mean_preservation(t, kind, 3) {
                Ok(r) => preserve.check(r.preserved(), || format!("trial {i} {kind}: {} violations", r.violation_count)),
                Err(e) => preserve.error(e, format!("trial {i} {kind}")),
            }
        }
        for x in t.source().points() {
            let ok = psupp(t, x).and_then(|p| Ok((p.points, supp(t, x)?)));
            match ok {
                Ok((p, s)) => supports.check(!s.is_empty() && s.iter().all(|y| p.contains(y)), || {
                    format!("trial {i} at {x}: supp {s:?} psupp {p:?}")
                }),
                Err(e) => supports.error(e, format!("trial {i}")),
            }
        }
        match reconstruct(t) {
            Ok(r) => {
                let got: Vec<(usize, usize)> = r.y0.iter().copied().zip(r.tau.iter().copied()).collect();
                recover.check(got == inst.clean && r.residual == 0.0 && r.psupp_disjoint, || {
                    format!("trial {i}: recovered {got:?}, planted {:?}", inst.clean)
                })
            }
            Err(e) => recover.error(e, format!("trial {i}")),
        }
    }
    vec![
        preserve.record("composition_preserves_means", "checks"),
        supports.record("supp_within_psupp", "points"),
        recover.record("composition_reconstruction", "instances"),
    ]
}

/// One verdict of the power-mean equivalence.
#[derive(Clone, Debug, PartialEq)]
pub enum PowerVerdicts {
    Agree(bool),
    Disagree { direct: bool, reduced: bool },
    /// The exponent is negative and the instance is not strictly positive.
    NotStrict,
}

pub fn power_verdicts(t: &PreserverMap, p: f64, max_multiset: usize) -> Result<PowerVerdicts> {
    let direct = match check_mean_preservation(t, MeanKind::power(p), max_multiset) {
        Ok(r) => r.preserved(),
        Err(Error::NotStrictlyPositive { .. }) => return Ok(PowerVerdicts::NotStrict),
        Err(e) => return Err(e),
    };
    let reduced = check_mean_preservation(&power_reduce(t, p)?, reduced_kind(p), max_multiset)?.preserved();
    Ok(if direct == reduced {
        PowerVerdicts::Agree(direct)
    } else {
        PowerVerdicts::Disagree { direct, reduced }
    })
}

/// Instances for the power-mean equivalence: every gallery example, then
/// seeded composition operators, half of them with one inflated image.
pub fn power_instances(seed: u64, seeded: usize) -> Result<Vec<(String, PreserverMap)>> {
    let mut out = Vec::new();
    for id in GalleryId::ALL {
        out.push((id.to_string(), build(id, &GalleryOptions::default())?.map));
    }
    for i in 0..seeded {
        let mut rng = trial_rng(seed, "power", 0, i);
        let inst = composition_instance(&mut rng)?;
        let map = if i % 2 == 1 { inflate_one_image(&mut rng, &inst.map)? } else { inst.map };
        out.push((format!("seeded {i}"), map));
    }
    Ok(out)
}

pub fn power_equivalence(seed: u64, seeded: usize) -> Vec<Record> {
    let mut tally = Tally::default();
    let mut not_strict = 0usize;
    let instances = match power_instances(seed, seeded) {
        Ok(v) => v,
        Err(e) => return vec![Record::new("power_reduce_equivalence", Status::Fail, e.to_string())],
    };
    for (name, t) in &instances {
        for p in POWER_EXPONENTS {
            match power_verdicts(t, p, 3) {
                Ok(PowerVerdicts::Agree(_)) => tally.check(true, String::new),
                Ok(PowerVerdicts::Disagree { direct, reduced }) => {
                    tally.check(false, || format!("{name} p={p}: direct {direct}, reduced {reduced}"))
                }
                Ok(PowerVerdicts::NotStrict) => not_strict += 1,
                Err(e) => tally.error(e, format!("{name} p={p}")),
            }
        }
    }
    vec![tally
        .record("power_reduce_equivalence", "verdict pairs")
        .metric("not_strictly_positive", not_strict)]
}

/// A violation of size `n` stays reported at every larger bound.
pub fn multiset_monotonicity() -> Vec<Record> {
    let res = (|| -> Result<bool> {
        let t = build(GalleryId::TwoNotN, &GalleryOptions::default())?.map;
        let mut ok = !check_mean_preservation(&t, MeanKind::Arithmetic, 2)?.lists(&["1", "2", "3"]);
        for n in 3..=5 {
            ok &= check_mean_preservation(&t, MeanKind::Arithmetic, n)?.lists(&["1", "2", "3"]);
        }
        Ok(ok)
    })();
    let record = match res {
        Ok(ok) => Record::new(
            "multiset_monotonicity",
            Status::from_bool(ok),
            "violating triple reported at every bound from 3 to 5",
        ),
        Err(e) => Record::new("multiset_monotonicity", Status::Fail, e.to_string()),
    };
    vec![record]
}

/// Every lemma suite, for `trials` trials per dimension.
pub fn lemma_suite(seed: u64, trials: usize, dims: &[usize]) -> SuiteReport {
    let mut report = SuiteReport::new("lemmas", Value::Null);
    let groups = [
        order_witnesses(seed, trials, dims),
        orthogonality(seed, trials, dims),
        equality_witnesses(seed, trials, dims),
        hm_orthogonality(seed, trials, dims),
        mean_chain(seed, trials, dims),
        shift_conjugates(seed, trials, dims),
        limit_lemmas(seed, trials),
        composition_roundtrip(seed, trials.min(100)),
        power_equivalence(seed, trials.min(50)),
        multiset_monotonicity(),
    ];
    for r in groups.into_iter().flatten() {
        report.push(r);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_suite_passes() {
        let r = lemma_suite(0, 4, &[2, 3]);
        for rec in &r.records {
            assert_ne!(rec.status, Status::Fail, "{}: {}", rec.name, rec.detail);
        }
    }

    #[test]
    fn scalar_dimension_runs() {
        let r = lemma_suite(0, 1, &[1]);
        assert_eq!(r.record("scalar_means").unwrap().status, Status::Pass);
        assert_eq!(r.record("orthogonality_maxnorm").unwrap().status, Status::Skip);
        assert!(r.all_passed(), "{}", r.to_text());
    }

    #[test]
    fn suite_is_deterministic() {
        let a = lemma_suite(7, 2, &[2]);
        let b = lemma_suite(7, 2, &[2]);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }
}
