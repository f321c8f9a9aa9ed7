use std::collections::HashSet;

use serde::Serialize;

use super::space::{ConeFunction, FunctionFamily, PreserverMap};
use crate::error::Result;

/// Relative slack for peak-set membership.
pub const PEAK_TOL: f64 = 1e-12;

/// Largest space on which [`check_peak_richness`] will enumerate subsets.
pub const MAX_EXHAUSTIVE_POINTS: usize = 20;

/// Points where `f` attains its sup norm. The zero function peaks everywhere.
pub fn pk(f: &ConeFunction) -> Vec<usize> {
    let norm = f.sup_norm();
    let floor = norm - PEAK_TOL * norm;
    (0..f.len()).filter(|&i| f.values()[i] >= floor).collect()
}

/// Members of `family` peaking at `x`.
pub fn pkat(x: &str, family: &FunctionFamily) -> Result<Vec<usize>> {
    let i = family.space().index_of(x)?;
    Ok((0..family.len())
        .filter(|&m| pk(family.member(m)).contains(&i))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Psupp {
    pub points: Vec<usize>,
    /// No nonzero member peaks at `x`; `points` is then all of `Y`.
    pub empty_pkat: bool,
}

/// `psupp_T(x)`: intersection of `pk(Th)` over nonzero `h` peaking at `x`.
pub fn psupp(t: &PreserverMap, x: &str) -> Result<Psupp> {
    let members: Vec<usize> = pkat(x, t.domain())?
        .into_iter()
        .filter(|&m| !t.domain().member(m).is_zero())
        .collect();
    let mut points: Vec<usize> = (0..t.target().len()).collect();
    for &m in &members {
        let peaks = pk(t.image(m));
        points.retain(|y| peaks.contains(y));
    }
    Ok(Psupp {
        points,
        empty_pkat: members.is_empty(),
    })
}

/// `supp_T(x)`: points of `psupp_T(x)` where `Tf(y) = f(x)` for every member.
pub fn supp(t: &PreserverMap, x: &str) -> Result<Vec<usize>> {
    let xi = t.source().index_of(x)?;
    let tol = t.tolerance();
    let mut points = psupp(t, x)?.points;
    points.retain(|&y| {
        t.domain()
            .members()
            .iter()
            .zip(t.images())
            .all(|(f, g)| tol.matches(g.values()[y], f.values()[xi]))
    });
    Ok(points)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RichnessMode {
    /// Every nonempty subset was tested.
    Exhaustive,
    /// Only singletons and level sets of members were tested.
    SingletonsAndLevelSets,
}

#[derive(Clone, Debug, Serialize)]
pub struct RichnessReport {
    pub mode: RichnessMode,
    pub subsets_checked: usize,
    pub unpeaked_count: usize,
    /// The first 100 subsets without a peaking member.
    pub unpeaked: Vec<Vec<String>>,
}

impl RichnessReport {
    pub fn rich(&self) -> bool {
        self.unpeaked_count == 0
    }
}

const LISTED: usize = 100;

/// Does every nonempty subset (or, above `subset_cap` points, every subset
/// the reconstruction relies on) occur as the peak set of a nonzero member?
pub fn check_peak_richness(family: &FunctionFamily, subset_cap: usize) -> RichnessReport {
    let space = family.space();
    let peak_sets: HashSet<Vec<usize>> = family
        .members()
        .iter()
        .filter(|f| !f.is_zero())
        .map(pk)
        .collect();
    let n = space.len();
    let mut report = RichnessReport {
        mode: RichnessMode::Exhaustive,
        subsets_checked: 0,
        unpeaked_count: 0,
        unpeaked: Vec::new(),
    };
    let record = |subset: Vec<usize>, report: &mut RichnessReport| {
        report.subsets_checked += 1;
        if !peak_sets.contains(&subset) {
            report.unpeaked_count += 1;
            if report.unpeaked.len() < LISTED {
                report.unpeaked.push(space.labels_of(&subset));
            }
        }
    };
    if n <= subset_cap.min(MAX_EXHAUSTIVE_POINTS) {
        for mask in 1u64..(1u64 << n) {
            let subset = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            record(subset, &mut report);
        }
    } else {
        report.mode = RichnessMode::SingletonsAndLevelSets;
        let mut wanted: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut seen: HashSet<Vec<usize>> = wanted.iter().cloned().collect();
        for f in family.members() {
            for x0 in 0..n {
                let level = level_set(f, x0);
                if seen.insert(level.clone()) {
                    wanted.push(level);
                }
            }
        }
        for subset in wanted {
            record(subset, &mut report);
        }
    }
    report
}

fn level_set(f: &ConeFunction, x0: usize) -> Vec<usize> {
    let v = f.values()[x0];
    let slack = PEAK_TOL * f.sup_norm();
    (0..f.len()).filter(|&i| (f.values()[i] - v).abs() <= slack).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::gallery::supp_not_psupp_map;
    use crate::cones::space::FiniteSpace;
    use crate::error::Error;

    fn lbl(t: &PreserverMap, idx: &[usize]) -> Vec<String> {
        t.target().labels_of(idx)
    }

    #[test]
    fn pk_examples() {
        let s = FiniteSpace::new(["1", "2", "3"]).unwrap();
        let f = ConeFunction::new(s.clone(), vec![1.0, 1.0, 0.3]).unwrap();
        assert_eq!(pk(&f), vec![0, 1]);
        let c = ConeFunction::new(s.clone(), vec![2.0; 3]).unwrap();
        assert_eq!(pk(&c), vec![0, 1, 2]);
        let z = ConeFunction::new(s.clone(), vec![0.0; 3]).unwrap();
        assert_eq!(pk(&z), vec![0, 1, 2]);
        let s2 = FiniteSpace::new(["1", "2"]).unwrap();
        assert_eq!(pk(&ConeFunction::new(s2, vec![1.0, 0.5]).unwrap()), vec![0]);
    }

    #[test]
    fn pkat_examples() {
        let t = supp_not_psupp_map().unwrap();
        let fam = t.domain();
        let names = |v: Vec<usize>| v.into_iter().map(|i| fam.name(i).to_string()).collect::<Vec<_>>();
        assert_eq!(names(pkat("1", fam).unwrap()), ["f1", "f3"]);
        assert_eq!(names(pkat("2", fam).unwrap()), ["f2", "f3"]);
        assert_eq!(pkat("9", fam), Err(Error::UnknownPoint("9".into())));
        let s = FiniteSpace::new(["a", "b"]).unwrap();
        let one = FunctionFamily::new(s, vec![("c", vec![1.0, 1.0])]).unwrap();
        assert_eq!(pkat("b", &one).unwrap(), vec![0]);
    }

    #[test]
    fn psupp_and_supp_examples() {
        let t = supp_not_psupp_map().unwrap();
        assert_eq!(lbl(&t, &psupp(&t, "1").unwrap().points), ["1", "3"]);
        assert_eq!(lbl(&t, &psupp(&t, "2").unwrap().points), ["2"]);
        assert_eq!(lbl(&t, &supp(&t, "1").unwrap()), ["1"]);
        assert_eq!(lbl(&t, &supp(&t, "2").unwrap()), ["2"]);
        assert!(!psupp(&t, "1").unwrap().empty_pkat);
    }

    #[test]
    fn identity_supports_are_singletons() {
        let s = FiniteSpace::new(["a", "b", "c"]).unwrap();
        let fam = FunctionFamily::new(
            s,
            vec![("a", vec![1.0, 0.5, 0.5]), ("b", vec![0.5, 1.0, 0.5]), ("c", vec![0.5, 0.5, 1.0])],
        )
        .unwrap();
        let t = PreserverMap::identity(fam).unwrap();
        for (i, x) in ["a", "b", "c"].iter().enumerate() {
            assert_eq!(psupp(&t, x).unwrap().points, vec![i]);
            assert_eq!(supp(&t, x).unwrap(), vec![i]);
        }
    }

    #[test]
    fn empty_pkat_gives_everything_with_flag() {
        let s = FiniteSpace::new(["a", "b"]).unwrap();
        let fam = FunctionFamily::new(s, vec![("f", vec![1.0, 0.5])]).unwrap();
        let t = PreserverMap::identity(fam).unwrap();
        let p = psupp(&t, "b").unwrap();
        assert!(p.empty_pkat);
        assert_eq!(p.points, vec![0, 1]);
    }

    #[test]
    fn richness_examples() {
        let t = supp_not_psupp_map().unwrap();
        let r = check_peak_richness(t.domain(), 16);
        assert!(r.rich());
        assert_eq!(r.subsets_checked, 3);

        let s = FiniteSpace::new(["1", "2"]).unwrap();
        let c = FunctionFamily::new(s.clone(), vec![("one", vec![1.0, 1.0])]).unwrap();
        let r = check_peak_richness(&c, 16);
        assert!(!r.rich());
        assert!(r.unpeaked.contains(&vec!["1".to_string()]));

        let s4 = FiniteSpace::new(["a", "b", "c", "d"]).unwrap();
        let members = (1u32..16)
            .map(|m| {
                let v = (0..4).map(|i| if m >> i & 1 == 1 { 1.0 } else { 0.5 }).collect();
                (format!("s{m}"), v)
            })
            .collect();
        let fam = FunctionFamily::new(s4, members).unwrap();
        assert!(check_peak_richness(&fam, 16).rich());
        let partial = check_peak_richness(&fam, 2);
        assert_eq!(partial.mode, RichnessMode::SingletonsAndLevelSets);
        assert!(partial.rich());
    }
}
