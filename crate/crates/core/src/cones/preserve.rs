use serde::Serialize;

use super::space::{FunctionFamily, PreserverMap};
use crate::error::{Error, Result};
use crate::means::{MeanKind, PointwiseAccumulator};

pub const NORM_TOL: f64 = 1e-10;
pub const MULTISET_CAP: usize = 200_000;
const LISTED: usize = 100;

#[derive(Clone, Copy, Debug)]
pub struct PreservationOptions {
    /// Norms match when `|dom - img| <= tol * max(1, dom)`.
    pub tol: f64,
    pub cap: usize,
}

impl Default for PreservationOptions {
    fn default() -> Self {
        Self {
            tol: NORM_TOL,
            cap: MULTISET_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub members: Vec<String>,
    /// Sup norm of the mean on `X`.
    pub domain_norm: f64,
    /// Sup norm of the mean of the images on `Y`.
    pub image_norm: f64,
}

impl Violation {
    pub fn gap(&self) -> f64 {
        (self.domain_norm - self.image_norm).abs()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PreservationReport {
    pub kind: MeanKind,
    pub max_multiset: usize,
    pub tol: f64,
    pub multisets_checked: usize,
    pub violation_count: usize,
    pub max_violation: f64,
    /// The enumeration stopped at the multiset cap.
    pub truncated: bool,
    pub violations: Vec<Violation>,
}

impl PreservationReport {
    pub fn preserved(&self) -> bool {
        self.violation_count == 0
    }

    /// Whether the multiset, given by member names in any order, was reported.
    pub fn lists(&self, members: &[&str]) -> bool {
        let mut want: Vec<&str> = members.to_vec();
        want.sort_unstable();
        self.violations.iter().any(|v| {
            let mut got: Vec<&str> = v.members.iter().map(String::as_str).collect();
            got.sort_unstable();
            got == want
        })
    }
}

pub fn check_mean_preservation(t: &PreserverMap, kind: MeanKind, max_multiset: usize) -> Result<PreservationReport> {
    check_mean_preservation_with(t, kind, max_multiset, PreservationOptions::default())
}

/// Compares `||M(f_1..f_n)||` with `||M(Tf_1..Tf_n)||` over every multiset of
/// members of size `1..=max_multiset`, in lexicographic member order.
pub fn check_mean_preservation_with(
    t: &PreserverMap,
    kind: MeanKind,
    max_multiset: usize,
    opts: PreservationOptions,
) -> Result<PreservationReport> {
    if max_multiset == 0 {
        return Err(Error::invalid("max_multiset", "must be at least 1"));
    }
    if kind.requires_strict() {
        require_strict(t)?;
    }
    let mut walk = Walk {
        t,
        opts,
        chosen: Vec::new(),
        report: PreservationReport {
            kind,
            max_multiset,
            tol: opts.tol,
            multisets_checked: 0,
            violation_count: 0,
            max_violation: 0.0,
            truncated: false,
            violations: Vec::new(),
        },
    };
    for size in 1..=max_multiset {
        let x = PointwiseAccumulator::new(kind, t.source().len());
        let y = PointwiseAccumulator::new(kind, t.target().len());
        walk.descend(0, size, &x, &y);
        if walk.report.truncated {
            break;
        }
    }
    Ok(walk.report)
}

pub(crate) fn require_strict(t: &PreserverMap) -> Result<()> {
    let family = t.domain();
    if !family.is_strict() {
        let name = match family.members().iter().position(|f| !f.is_strictly_positive()) {
            Some(i) => format!("family.{}", family.name(i)),
            None => "family (not declared strict)".into(),
        };
        return Err(Error::NotStrictlyPositive { name });
    }
    if let Some(i) = t.images().iter().position(|g| !g.is_strictly_positive()) {
        return Err(Error::NotStrictlyPositive {
            name: format!("T.{}", t.domain().name(i)),
        });
    }
    Ok(())
}

struct Walk<'a> {
    t: &'a PreserverMap,
    opts: PreservationOptions,
    chosen: Vec<usize>,
    report: PreservationReport,
}

impl Walk<'_> {
    fn descend(&mut self, start: usize, remaining: usize, x: &PointwiseAccumulator, y: &PointwiseAccumulator) {
        if remaining == 0 {
            self.visit(x, y);
            return;
        }
        for m in start..self.t.domain().len() {
            if self.report.truncated {
                return;
            }
            let mut x = x.clone();
            let mut y = y.clone();
            x.push(self.t.domain().member(m).values());
            y.push(self.t.image(m).values());
            self.chosen.push(m);
            self.descend(m, remaining - 1, &x, &y);
            self.chosen.pop();
        }
    }

    fn visit(&mut self, x: &PointwiseAccumulator, y: &PointwiseAccumulator) {
        if self.report.multisets_checked >= self.opts.cap {
            self.report.truncated = true;
            return;
        }
        self.report.multisets_checked += 1;
        let dom = x.sup_of_mean();
        let img = y.sup_of_mean();
        let gap = (dom - img).abs();
        if gap > self.opts.tol * dom.max(1.0) || gap.is_nan() {
            self.report.violation_count += 1;
            self.report.max_violation = self.report.max_violation.max(gap);
            if self.report.violations.len() < LISTED {
                self.report.violations.push(Violation {
                    members: self.chosen.iter().map(|&m| self.t.domain().name(m).to_string()).collect(),
                    domain_norm: dom,
                    image_norm: img,
                });
            }
        }
    }
}

/// The mean a power-reduced map is checked against.
pub fn reduced_kind(p: f64) -> MeanKind {
    if p > 0.0 {
        MeanKind::Arithmetic
    } else {
        MeanKind::Harmonic
    }
}

/// Conjugates `T` by a power so that power-mean preservation becomes
/// arithmetic (`p > 0`) or harmonic (`p < 0`) preservation.
///
/// For `p > 0` the result sends `f^p` to `(Tf)^p`. For `p < 0` it sends
/// `f^{|p|}` to `(Tf)^{|p|}`, since the harmonic mean of the `|p|`-th powers
/// is the `|p|`-th power of the `p`-mean.
pub fn power_reduce(t: &PreserverMap, p: f64) -> Result<PreserverMap> {
    if p == 0.0 || !p.is_finite() {
        return Err(Error::invalid("p", format!("must be finite and nonzero, got {p}")));
    }
    if p < 0.0 {
        require_strict(t)?;
    }
    let q = p.abs();
    let family = t.domain();
    let members = family
        .names()
        .iter()
        .cloned()
        .zip(family.members().iter().map(|f| f.values().iter().map(|v| v.powf(q)).collect()))
        .collect();
    let mut reduced = FunctionFamily::new(family.space_arc(), members)?;
    if !family.is_strict() {
        reduced = reduced.without_strictness();
    }
    let images = t
        .images()
        .iter()
        .map(|g| g.values().iter().map(|v| v.powf(q)).collect())
        .collect();
    Ok(PreserverMap::new(reduced, t.target_arc(), images)?.with_tolerance(t.tolerance()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::gallery::{build, supp_not_psupp_map, GalleryId, GalleryOptions};
    use crate::cones::space::FiniteSpace;

    #[test]
    fn supp_not_psupp_preserves_three_means() {
        let t = supp_not_psupp_map().unwrap();
        for kind in [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Harmonic] {
            let r = check_mean_preservation(&t, kind, 3).unwrap();
            assert!(r.preserved(), "{kind}: {:?}", r.violations);
            // 3 + 6 + 10 multisets of sizes 1, 2, 3 over three members.
            assert_eq!(r.multisets_checked, 19);
        }
    }

    #[test]
    fn two_not_n_triple() {
        let g = build(GalleryId::TwoNotN, &GalleryOptions::default()).unwrap();
        let t = &g.map;
        let pairs = check_mean_preservation_with(
            t,
            MeanKind::Arithmetic,
            2,
            PreservationOptions { tol: 1e-9, ..Default::default() },
        )
        .unwrap();
        assert!(pairs.preserved());
        let triples = check_mean_preservation_with(
            t,
            MeanKind::Arithmetic,
            3,
            PreservationOptions { tol: 1e-9, ..Default::default() },
        )
        .unwrap();
        assert!(triples.lists(&["1", "2", "3"]));
        let v = triples.violations.iter().find(|v| v.members == ["1", "2", "3"]).unwrap();
        assert!((3.0 * v.image_norm - 5.5).abs() < 1e-12);
        assert!((3.0 * v.domain_norm - 6.0).abs() < 1e-12);
    }

    #[test]
    fn identity_preserves_everything() {
        let s = FiniteSpace::new(["a", "b"]).unwrap();
        let fam = FunctionFamily::new(s, vec![("f", vec![1.0, 0.25]), ("g", vec![0.5, 2.0])]).unwrap();
        let t = PreserverMap::identity(fam).unwrap();
        for kind in [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Harmonic, MeanKind::power(2.0)] {
            assert!(check_mean_preservation(&t, kind, 4).unwrap().preserved());
        }
    }

    #[test]
    fn harmonic_needs_strict_positivity() {
        let s = FiniteSpace::new(["a", "b"]).unwrap();
        let fam = FunctionFamily::new(s, vec![("f", vec![1.0, 0.0])]).unwrap();
        let t = PreserverMap::identity(fam).unwrap();
        assert!(matches!(
            check_mean_preservation(&t, MeanKind::Harmonic, 2),
            Err(Error::NotStrictlyPositive { .. })
        ));
        assert!(matches!(power_reduce(&t, -1.0), Err(Error::NotStrictlyPositive { .. })));
    }

    #[test]
    fn truncation_is_flagged() {
        let t = supp_not_psupp_map().unwrap();
        let r = check_mean_preservation_with(
            &t,
            MeanKind::Arithmetic,
            3,
            PreservationOptions { cap: 5, ..Default::default() },
        )
        .unwrap();
        assert!(r.truncated);
        assert_eq!(r.multisets_checked, 5);
    }

    #[test]
    fn power_reduce_examples() {
        let t = supp_not_psupp_map().unwrap();
        let same = power_reduce(&t, 1.0).unwrap();
        assert_eq!(same.images(), t.images());
        assert_eq!(same.domain().members(), t.domain().members());

        let s = FiniteSpace::new(["a", "b"]).unwrap();
        let fam = FunctionFamily::new(s, vec![("f", vec![1.0, 3.0])]).unwrap();
        let id = PreserverMap::identity(fam).unwrap();
        let sq = power_reduce(&id, 2.0).unwrap();
        assert_eq!(sq.domain().member(0).values(), &[1.0, 9.0]);
        assert_eq!(sq.image(0).values(), &[1.0, 9.0]);

        let h = check_mean_preservation(&t, MeanKind::Harmonic, 3).unwrap();
        let r = check_mean_preservation(&power_reduce(&t, -1.0).unwrap(), MeanKind::Harmonic, 3).unwrap();
        assert!(h.preserved() && r.preserved());
        assert!(power_reduce(&t, 0.0).is_err());
    }
}
