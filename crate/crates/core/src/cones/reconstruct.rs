use indexmap::IndexMap;
use serde::Serialize;

use super::peak::{check_peak_richness, psupp, supp, RichnessReport};
use super::space::PreserverMap;
use crate::error::{Error, Result};

/// `T` written as `Tf(y) = f(tau(y))` on `Y0`.
#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionResult {
    /// Indices into `Y`, ascending.
    pub y0: Vec<usize>,
    /// `tau[k]` is the `X` index assigned to `y0[k]`.
    pub tau: Vec<usize>,
    pub residual: f64,
    pub surjective_tau: bool,
    pub injective_t: bool,
    pub psupp_disjoint: bool,
    /// `X` points with no nonzero member peaking there.
    pub empty_pkat: Vec<usize>,
}

impl ReconstructionResult {
    pub fn tau_of(&self, y: usize) -> Option<usize> {
        self.y0.iter().position(|&p| p == y).map(|k| self.tau[k])
    }

    pub fn to_json(&self, t: &PreserverMap) -> ReconstructionJson {
        ReconstructionJson {
            y0: t.target().labels_of(&self.y0),
            tau: self
                .y0
                .iter()
                .zip(&self.tau)
                .map(|(&y, &x)| (t.target().label(y).to_string(), t.source().label(x).to_string()))
                .collect(),
            residual: self.residual,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionJson {
    #[serde(rename = "Y0")]
    pub y0: Vec<String>,
    pub tau: IndexMap<String, String>,
    pub residual: f64,
}

pub fn reconstruct(t: &PreserverMap) -> Result<ReconstructionResult> {
    let xs = t.source();
    let mut supports = Vec::with_capacity(xs.len());
    let mut psupports = Vec::with_capacity(xs.len());
    let mut empty_pkat = Vec::new();
    for (i, x) in xs.points().iter().enumerate() {
        let s = supp(t, x)?;
        if s.is_empty() {
            return Err(Error::NotAPreserver { point: x.clone() });
        }
        let p = psupp(t, x)?;
        if p.empty_pkat {
            empty_pkat.push(i);
        }
        supports.push(s);
        psupports.push(p.points);
    }
    let mut owner: Vec<Option<usize>> = vec![None; t.target().len()];
    for (x, s) in supports.iter().enumerate() {
        for &y in s {
            if let Some(prev) = owner[y] {
                return Err(Error::DisjointnessViolation {
                    first: xs.label(prev).to_string(),
                    second: xs.label(x).to_string(),
                });
            }
            owner[y] = Some(x);
        }
    }
    let psupp_disjoint = (0..psupports.len())
        .all(|a| (a + 1..psupports.len()).all(|b| psupports[a].iter().all(|y| !psupports[b].contains(y))));

    let (y0, tau): (Vec<usize>, Vec<usize>) = owner
        .iter()
        .enumerate()
        .filter_map(|(y, x)| x.map(|x| (y, x)))
        .unzip();
    let mut residual: f64 = 0.0;
    for (f, g) in t.domain().members().iter().zip(t.images()) {
        for (&y, &x) in y0.iter().zip(&tau) {
            residual = residual.max((g.values()[y] - f.values()[x]).abs());
        }
    }
    let mut hit = vec![false; xs.len()];
    tau.iter().for_each(|&x| hit[x] = true);
    Ok(ReconstructionResult {
        y0,
        tau,
        residual,
        surjective_tau: hit.into_iter().all(|h| h),
        injective_t: injective(t),
        psupp_disjoint,
        empty_pkat,
    })
}

fn injective(t: &PreserverMap) -> bool {
    let n = t.domain().len();
    (0..n).all(|a| {
        (a + 1..n).all(|b| {
            t.domain().member(a).values() == t.domain().member(b).values()
                || t.image(a).values() != t.image(b).values()
        })
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HomeomorphismReport {
    pub image_richness: RichnessReport,
    pub y0_is_all: bool,
    pub bijective: bool,
}

impl HomeomorphismReport {
    pub fn image_rich(&self) -> bool {
        self.image_richness.rich()
    }

    /// A rich image family forces `Y0 = Y` with `tau` a bijection.
    pub fn consistent(&self) -> bool {
        !self.image_rich() || (self.y0_is_all && self.bijective)
    }
}

pub fn check_homeomorphism_case(t: &PreserverMap, range_richness_cap: usize) -> Result<HomeomorphismReport> {
    let r = reconstruct(t)?;
    let image_richness = check_peak_richness(&t.image_family()?, range_richness_cap);
    let y0_is_all = r.y0.len() == t.target().len();
    let mut seen = vec![false; t.source().len()];
    let mut injective_tau = true;
    for &x in &r.tau {
        injective_tau &= !std::mem::replace(&mut seen[x], true);
    }
    Ok(HomeomorphismReport {
        image_richness,
        y0_is_all,
        bijective: y0_is_all && injective_tau && r.surjective_tau,
    })
}
