//! Worked examples of maps that do or do not preserve norms of means, each
//! tabulated on finite samples together with the verdicts it should produce.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::peak::{psupp, supp};
use super::preserve::{check_mean_preservation_with, PreservationOptions};
use super::reconstruct::{check_homeomorphism_case, reconstruct};
use super::space::{EqualityTolerance, FiniteSpace, FunctionFamily, PreserverMap};
use crate::error::{Error, Result};
use crate::means::MeanKind;

/// Version of the embedded expected verdicts.
pub const FIXTURE_VERSION: u32 = 1;

pub const DEFAULT_SAMPLES: [f64; 8] = [0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0];
pub const DEFAULT_GRID: usize = 101;
pub const DEFAULT_DOMAIN_POINTS: usize = 5;
const MAX_DOMAIN_POINTS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GalleryId {
    #[serde(rename = "2notn")]
    TwoNotN,
    #[serde(rename = "supp_not_psupp")]
    SuppNotPsupp,
    #[serde(rename = "not_full")]
    NotFull,
    #[serde(rename = "am_y0_not_closed")]
    AmY0NotClosed,
    #[serde(rename = "gm_not_co")]
    GmNotCo,
    #[serde(rename = "hm_not_co")]
    HmNotCo,
    #[serde(rename = "hm_nco")]
    HmNco,
}

impl GalleryId {
    pub const ALL: [GalleryId; 7] = [
        GalleryId::TwoNotN,
        GalleryId::SuppNotPsupp,
        GalleryId::NotFull,
        GalleryId::AmY0NotClosed,
        GalleryId::GmNotCo,
        GalleryId::HmNotCo,
        GalleryId::HmNco,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GalleryId::TwoNotN => "2notn",
            GalleryId::SuppNotPsupp => "supp_not_psupp",
            GalleryId::NotFull => "not_full",
            GalleryId::AmY0NotClosed => "am_y0_not_closed",
            GalleryId::GmNotCo => "gm_not_co",
            GalleryId::HmNotCo => "hm_not_co",
            GalleryId::HmNco => "hm_nco",
        }
    }
}

impl fmt::Display for GalleryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GalleryId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GalleryId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct GalleryOptions {
    /// Points of each `[0, 1]` target grid, endpoints included.
    pub grid_size: usize,
    /// Samples of `(0, inf)` for the one-point examples.
    pub domain_samples: Option<Vec<f64>>,
    /// Size of the finite domain for the examples on a multi-point `X`.
    pub domain_points: usize,
}

impl Default for GalleryOptions {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID,
            domain_samples: None,
            domain_points: DEFAULT_DOMAIN_POINTS,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SumWitness {
    pub members: Vec<String>,
    /// `||f_1 + ... + f_n||`.
    pub domain_sum: f64,
    /// `||Tf_1 + ... + Tf_n||`.
    pub image_sum: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectedPreservation {
    pub kind: MeanKind,
    pub max_multiset: usize,
    pub tol: f64,
    pub preserved: bool,
    pub witness: Option<SumWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectedSupport {
    pub x: String,
    pub psupp: Vec<String>,
    pub supp: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedReconstruction {
    Succeeds { y0: Vec<String>, tau: Vec<(String, String)> },
    NotAPreserver,
}

/// `sup |Ta - Tb| >= at_least`.
#[derive(Clone, Debug, Serialize)]
pub struct ExpectedSeparation {
    pub a: String,
    pub b: String,
    pub at_least: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Expected {
    pub preservation: Vec<ExpectedPreservation>,
    pub supports: Vec<ExpectedSupport>,
    pub reconstruction: Option<ExpectedReconstruction>,
    pub image_rich: Option<bool>,
    pub separation: Option<ExpectedSeparation>,
}

#[derive(Clone, Debug)]
pub struct GalleryInstance {
    pub id: GalleryId,
    pub map: PreserverMap,
    pub expected: Expected,
}

#[derive(Clone, Debug, Serialize)]
pub struct GalleryCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn label(v: f64) -> String {
    format!("{v}")
}

fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn unit_grid(opts: &GalleryOptions) -> Result<Vec<f64>> {
    if opts.grid_size < 3 {
        return Err(Error::invalid("grid_size", "must be at least 3"));
    }
    Ok(grid(opts.grid_size, 0.0, 1.0))
}

fn samples(opts: &GalleryOptions, default: &[f64]) -> Result<Vec<f64>> {
    let s = opts.domain_samples.clone().unwrap_or_else(|| default.to_vec());
    if s.is_empty() {
        return Err(Error::invalid("domain_samples", "must be nonempty"));
    }
    if let Some(i) = s.iter().position(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::invalid(format!("domain_samples[{i}]"), "must be a positive number"));
    }
    Ok(s)
}

fn one_point_family(ts: &[f64]) -> Result<FunctionFamily> {
    let x = FiniteSpace::new(["x0"])?;
    FunctionFamily::new(x, ts.iter().map(|&t| (label(t), vec![t])).collect())
}

/// `1` on `S` and `1/2` off `S`, one member per nonempty `S`.
fn indicator_family(x: std::sync::Arc<FiniteSpace>) -> Result<FunctionFamily> {
    let n = x.len();
    let members = (1u32..(1 << n))
        .map(|mask| {
            let name: String = (0..n).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect();
            let values = (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { 0.5 }).collect();
            (format!("s{name}"), values)
        })
        .collect();
    FunctionFamily::new(x, members)
}

fn domain_points(opts: &GalleryOptions) -> Result<usize> {
    if !(1..=MAX_DOMAIN_POINTS).contains(&opts.domain_points) {
        return Err(Error::invalid(
            "domain_points",
            format!("must be between 1 and {MAX_DOMAIN_POINTS}"),
        ));
    }
    Ok(opts.domain_points)
}

/// Piecewise-linear interpolation through three values at `y = 0, 1/2, 1`.
fn hinge(y: f64, v: [f64; 3]) -> f64 {
    if y <= 0.5 {
        (1.0 - 2.0 * y) * v[0] + 2.0 * y * v[1]
    } else {
        (2.0 - 2.0 * y) * v[1] + (2.0 * y - 1.0) * v[2]
    }
}

/// Which of three consecutive intervals `(a0, a1], (a1, a2], (a2, inf)` holds `t`.
fn piece(t: f64, cuts: [f64; 3]) -> Option<usize> {
    if t <= cuts[0] {
        None
    } else if t <= cuts[1] {
        Some(0)
    } else if t <= cuts[2] {
        Some(1)
    } else {
        Some(2)
    }
}

fn covers_all_pieces(ts: impl Iterator<Item = f64>, cuts: [f64; 3]) -> bool {
    let mut hit = [false; 3];
    for t in ts {
        if let Some(i) = piece(t, cuts) {
            hit[i] = true;
        }
    }
    hit.iter().all(|&h| h)
}

fn preservation(kind: MeanKind, max_multiset: usize, tol: f64, preserved: bool) -> ExpectedPreservation {
    ExpectedPreservation {
        kind,
        max_multiset,
        tol,
        preserved,
        witness: None,
    }
}

/// `X = {1, 2}`, `Y = {1, 2, 3}` with `Tf(3) = (4 f(1) - 1) / 3`.
pub fn supp_not_psupp_map() -> Result<PreserverMap> {
    let x = FiniteSpace::new(["1", "2"])?;
    let y = FiniteSpace::new(["1", "2", "3"])?;
    let family = FunctionFamily::new(
        x,
        vec![("f1", vec![1.0, 0.5]), ("f2", vec![0.5, 1.0]), ("f3", vec![1.0, 1.0])],
    )?;
    PreserverMap::from_rule(family, y, |f, y| match y {
        0 => f.values()[0],
        1 => f.values()[1],
        _ => (4.0 * f.values()[0] - 1.0) / 3.0,
    })
}

pub fn build(id: GalleryId, opts: &GalleryOptions) -> Result<GalleryInstance> {
    let mut expected = Expected::default();
    let map = match id {
        GalleryId::TwoNotN => {
            let ts = samples(opts, &[1.0, 2.0, 3.0])?;
            let ys = unit_grid(opts)?;
            let cuts = [0.0, 1.0, 2.0];
            let phi = |t: f64, i: usize| if piece(t, cuts) == Some(i) { t / 2.0 } else { t };
            let target = FiniteSpace::new(ys.iter().map(|&y| label(y)))?;
            let map = PreserverMap::from_rule(one_point_family(&ts)?, target, |f, y| {
                let t = f.values()[0];
                hinge(ys[y], [phi(t, 0), phi(t, 1), phi(t, 2)])
            })?
            .with_tolerance(EqualityTolerance::FORMULA);
            expected.preservation.push(preservation(MeanKind::Arithmetic, 2, 1e-9, true));
            if covers_all_pieces(ts.iter().copied(), cuts) {
                let mut triple = preservation(MeanKind::Arithmetic, 3, 1e-9, false);
                if [1.0, 2.0, 3.0].iter().all(|t| ts.contains(t)) {
                    triple.witness = Some(SumWitness {
                        members: vec!["1".into(), "2".into(), "3".into()],
                        domain_sum: 6.0,
                        image_sum: 5.5,
                    });
                }
                expected.preservation.push(triple);
                expected.reconstruction = Some(ExpectedReconstruction::NotAPreserver);
            }
            map
        }
        GalleryId::SuppNotPsupp => {
            let map = supp_not_psupp_map()?;
            for kind in [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Harmonic] {
                expected.preservation.push(preservation(kind, 3, 1e-12, true));
            }
            let s = |v: &[&str]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
            expected.supports = vec![
                ExpectedSupport {
                    x: "1".into(),
                    psupp: s(&["1", "3"]),
                    supp: s(&["1"]),
                },
                ExpectedSupport {
                    x: "2".into(),
                    psupp: s(&["2"]),
                    supp: s(&["2"]),
                },
            ];
            expected.reconstruction = Some(ExpectedReconstruction::Succeeds {
                y0: s(&["1", "2"]),
                tau: vec![("1".into(), "1".into()), ("2".into(), "2".into())],
            });
            expected.image_rich = Some(false);
            map
        }
        GalleryId::NotFull => {
            let ts = samples(opts, &DEFAULT_SAMPLES)?;
            let ys = unit_grid(opts)?;
            let target = FiniteSpace::new(ys.iter().map(|&y| label(y)))?;
            let map = PreserverMap::from_rule(one_point_family(&ts)?, target, |f, y| {
                let t = f.values()[0];
                if t <= 1.0 {
                    t * (1.0 - ys[y] / 2.0)
                } else {
                    t
                }
            })?;
            expected.preservation.push(preservation(MeanKind::Arithmetic, 4, 1e-12, true));
            if ts.iter().any(|&t| t <= 1.0) {
                expected.reconstruction = Some(ExpectedReconstruction::Succeeds {
                    y0: vec!["0".into()],
                    tau: vec![("0".into(), "x0".into())],
                });
            }
            if ts.contains(&1.0) && ts.contains(&2.0) {
                expected.separation = Some(ExpectedSeparation {
                    a: "2".into(),
                    b: "1".into(),
                    at_least: 1.5,
                });
            }
            map
        }
        GalleryId::AmY0NotClosed => {
            let m = domain_points(opts)?;
            let x = FiniteSpace::new((0..m).map(|i| i.to_string()))?;
            let mut ys: Vec<(String, Option<(usize, f64)>)> = vec![("-inf".into(), None)];
            for s in (1..m).rev() {
                ys.push((format!("-{s}"), Some((s, (-(s as f64)).exp()))));
            }
            for s in 0..m {
                ys.push((s.to_string(), Some((s, 1.0))));
            }
            ys.push(("+inf".into(), None));
            let target = FiniteSpace::new(ys.iter().map(|(l, _)| l.clone()))?;
            let map = PreserverMap::from_rule(indicator_family(x)?, target, |f, y| match ys[y].1 {
                Some((s, w)) => w * f.values()[s],
                None => 0.0,
            })?
            .with_tolerance(EqualityTolerance::FORMULA);
            expected.preservation.push(preservation(MeanKind::Arithmetic, 3, 1e-9, true));
            expected.preservation.push(preservation(MeanKind::Geometric, 3, 1e-9, true));
            expected.reconstruction = Some(ExpectedReconstruction::Succeeds {
                y0: (0..m).map(|s| s.to_string()).collect(),
                tau: (0..m).map(|s| (s.to_string(), s.to_string())).collect(),
            });
            expected.image_rich = Some(false);
            map
        }
        GalleryId::GmNotCo => {
            let ts = samples(opts, &DEFAULT_SAMPLES)?;
            let ys = unit_grid(opts)?;
            let cuts = [1.0, 2.0, 3.0];
            let psi = |t: f64, i: usize| if piece(t, cuts) == Some(i) { t.ln() / 2.0 } else { t.ln() };
            let target = FiniteSpace::new(ys.iter().map(|&y| label(y)))?;
            let map = PreserverMap::from_rule(one_point_family(&ts)?, target, |f, y| {
                let t = f.values()[0];
                if t <= 1.0 {
                    t
                } else {
                    hinge(ys[y], [psi(t, 0), psi(t, 1), psi(t, 2)]).exp()
                }
            })?
            .with_tolerance(EqualityTolerance::FORMULA);
            expected.preservation.push(preservation(MeanKind::Geometric, 2, 1e-9, true));
            if covers_all_pieces(ts.iter().copied(), cuts) {
                expected.preservation.push(preservation(MeanKind::Geometric, 3, 1e-9, false));
                expected.reconstruction = Some(ExpectedReconstruction::NotAPreserver);
            }
            map
        }
        GalleryId::HmNotCo => {
            let ts = samples(opts, &DEFAULT_SAMPLES)?;
            let ys = unit_grid(opts)?;
            let cuts = [0.0, 1.0, 2.0];
            let psi = |s: f64, i: usize| if piece(s, cuts) == Some(i) { 2.0 * s } else { s };
            let target = FiniteSpace::new(ys.iter().map(|&y| label(y)))?;
            let map = PreserverMap::from_rule(one_point_family(&ts)?, target, |f, y| {
                let s = 1.0 / f.values()[0];
                1.0 / hinge(ys[y], [psi(s, 0), psi(s, 1), psi(s, 2)])
            })?
            .with_tolerance(EqualityTolerance::FORMULA);
            expected.preservation.push(preservation(MeanKind::Harmonic, 2, 1e-9, true));
            if covers_all_pieces(ts.iter().map(|t| 1.0 / t), cuts) {
                expected.preservation.push(preservation(MeanKind::Harmonic, 3, 1e-9, false));
                expected.reconstruction = Some(ExpectedReconstruction::NotAPreserver);
            }
            map
        }
        GalleryId::HmNco => {
            let k = domain_points(opts)?;
            let xs = if k == 1 { vec![0.0] } else { grid(k, 0.0, 1.0) };
            let low: Vec<f64> = xs.iter().map(|x| x / 2.0).collect();
            let high = if k == 1 { vec![1.5] } else { grid(k, 1.25, 1.5) };
            let x = FiniteSpace::new(xs.iter().map(|&v| label(v)))?;
            let target = FiniteSpace::new(low.iter().chain(&high).map(|&v| label(v)))?;
            let map = PreserverMap::from_rule(indicator_family(x)?, target, |f, y| {
                if y < k {
                    f.values()[y]
                } else {
                    (2.0 * high[y - k] - 2.0) * f.values()[0]
                }
            })?;
            for kind in [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Harmonic] {
                expected.preservation.push(preservation(kind, 3, 1e-12, true));
            }
            let mut y0: Vec<String> = low.iter().map(|&v| label(v)).collect();
            y0.push(label(1.5));
            let mut tau: Vec<(String, String)> = low.iter().zip(&xs).map(|(&y, &x)| (label(y), label(x))).collect();
            tau.push((label(1.5), label(0.0)));
            expected.reconstruction = Some(ExpectedReconstruction::Succeeds { y0, tau });
            expected.image_rich = Some(false);
            map
        }
    };
    Ok(GalleryInstance { id, map, expected })
}

/// Runs every check the expected verdicts call for.
pub fn verify(instance: &GalleryInstance) -> Vec<GalleryCheck> {
    let t = &instance.map;
    let e = &instance.expected;
    let mut out = Vec::new();
    let mut push = |name: String, passed: bool, detail: String| out.push(GalleryCheck { name, passed, detail });

    for p in &e.preservation {
        let name = format!("{} {} n<={}", instance.id, p.kind, p.max_multiset);
        let opts = PreservationOptions {
            tol: p.tol,
            ..Default::default()
        };
        match check_mean_preservation_with(t, p.kind, p.max_multiset, opts) {
            Ok(r) => {
                let mut passed = r.preserved() == p.preserved && !r.truncated;
                let mut detail = format!(
                    "{} multisets, {} violations (expected {})",
                    r.multisets_checked,
                    r.violation_count,
                    if p.preserved { "none" } else { "some" }
                );
                if let Some(w) = &p.witness {
                    let found = r.violations.iter().find(|v| {
                        let mut a = v.members.clone();
                        let mut b = w.members.clone();
                        a.sort();
                        b.sort();
                        a == b
                    });
                    match found {
                        Some(v) => {
                            let n = w.members.len() as f64;
                            let (dom, img) = (n * v.domain_norm, n * v.image_norm);
                            let ok = (dom - w.domain_sum).abs() <= 1e-9 && (img - w.image_sum).abs() <= 1e-9;
                            passed &= ok;
                            detail += &format!("; sum norms {img} vs {dom} (expected {} vs {})", w.image_sum, w.domain_sum);
                        }
                        None => {
                            passed = false;
                            detail += &format!("; expected violation on {:?} not reported", w.members);
                        }
                    }
                }
                push(name, passed, detail);
            }
            Err(err) => push(name, false, err.to_string()),
        }
    }

    for s in &e.supports {
        let name = format!("{} supports of {}", instance.id, s.x);
        match (psupp(t, &s.x), supp(t, &s.x)) {
            (Ok(p), Ok(q)) => {
                let p = t.target().labels_of(&p.points);
                let q = t.target().labels_of(&q);
                push(
                    name,
                    p == s.psupp && q == s.supp,
                    format!("psupp {p:?} supp {q:?}"),
                );
            }
            (Err(err), _) | (_, Err(err)) => push(name, false, err.to_string()),
        }
    }

    if let Some(rec) = &e.reconstruction {
        let name = format!("{} reconstruction", instance.id);
        match (rec, reconstruct(t)) {
            (ExpectedReconstruction::Succeeds { y0, tau }, Ok(r)) => {
                let json = r.to_json(t);
                let got_tau: Vec<(String, String)> = json.tau.clone().into_iter().collect();
                let passed = &json.y0 == y0 && &got_tau == tau && r.residual <= 1e-12 && r.surjective_tau;
                push(
                    name,
                    passed,
                    format!("Y0 {:?}, residual {:e}", json.y0, r.residual),
                );
            }
            (ExpectedReconstruction::NotAPreserver, Err(Error::NotAPreserver { point })) => {
                push(name, true, format!("no support at {point}"))
            }
            (_, Ok(r)) => push(name, false, format!("unexpected success with {} points in Y0", r.y0.len())),
            (_, Err(err)) => push(name, false, err.to_string()),
        }
    }

    if let Some(rich) = e.image_rich {
        let name = format!("{} image richness", instance.id);
        match check_homeomorphism_case(t, 16) {
            Ok(h) => push(
                name,
                h.image_rich() == rich && h.consistent(),
                format!(
                    "image family rich: {} ({} unpeaked subsets), Y0 = Y: {}",
                    h.image_rich(),
                    h.image_richness.unpeaked_count,
                    h.y0_is_all
                ),
            ),
            Err(err) => push(name, false, err.to_string()),
        }
    }

    if let Some(sep) = &e.separation {
        let name = format!("{} separation", instance.id);
        let dist = t.image_of(&sep.a).and_then(|a| a.sup_distance(t.image_of(&sep.b)?));
        match dist {
            Ok(d) => push(
                name,
                d >= sep.at_least,
                format!("||T{} - T{}|| = {d} (need >= {})", sep.a, sep.b, sep.at_least),
            ),
            Err(err) => push(name, false, err.to_string()),
        }
    }
    out
}
