//! Seeded generators for the property suites. Every draw is a function of
//! `(seed, suite, dim, trial)` alone, so any failing trial can be replayed.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cones::{ConeFunction, FiniteSpace, FunctionFamily, PreserverMap};
use crate::error::Result;
use crate::spectral::{matrix_norm, op_norm, random_psd_with, random_unitary, HermitianMatrix, RandomKind, C64};

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one trial.
pub fn trial_seed(seed: u64, suite: &str, dim: usize, trial: usize) -> u64 {
    let tag = suite
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    [tag, dim as u64, trial as u64]
        .into_iter()
        .fold(splitmix(seed), |acc, v| splitmix(acc ^ v))
}

pub fn trial_rng(seed: u64, suite: &str, dim: usize, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, suite, dim, trial))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairShape {
    Independent,
    /// `B = A + D` with `D >= 0`.
    Above,
    /// `A = B + D` with `D >= 0`.
    Below,
    Equal,
}

/// Positive definite pair; a quarter of the draws each for the four shapes,
/// so that ordered and equal pairs occur often.
pub fn pd_pair<R: Rng>(rng: &mut R, dim: usize) -> (HermitianMatrix, HermitianMatrix, PairShape) {
    let a = random_psd_with(rng, dim, RandomKind::PositiveDefinite);
    let shape = match rng.random_range(0..4) {
        0 => PairShape::Independent,
        1 => PairShape::Above,
        2 => PairShape::Below,
        _ => PairShape::Equal,
    };
    match shape {
        PairShape::Independent => (a, random_psd_with(rng, dim, RandomKind::PositiveDefinite), shape),
        PairShape::Above => {
            let d = random_psd_with(rng, dim, RandomKind::PositiveSemidefinite);
            let b = a.try_add(&d).expect("same dimension");
            (a, b, shape)
        }
        PairShape::Below => {
            let d = random_psd_with(rng, dim, RandomKind::PositiveSemidefinite);
            let b = a.clone();
            (b.try_add(&d).expect("same dimension"), a, shape)
        }
        PairShape::Equal => (a.clone(), a, shape),
    }
}

/// Independent positive definite pair with `||A - B|| > min_distance`.
pub fn separated_pd_pair<R: Rng>(rng: &mut R, dim: usize, min_distance: f64) -> (HermitianMatrix, HermitianMatrix) {
    loop {
        let a = random_psd_with(rng, dim, RandomKind::PositiveDefinite);
        let b = random_psd_with(rng, dim, RandomKind::PositiveDefinite);
        if op_norm(&a.try_sub(&b).expect("same dimension")) > min_distance {
            return (a, b);
        }
    }
}

fn diag_conjugate(u: &DMatrix<C64>, values: &[f64]) -> HermitianMatrix {
    HermitianMatrix::diag(values).unitary_conjugate(u).expect("same dimension")
}

/// `A, B >= 0` with `AB = 0`, both nonzero. Needs `dim >= 2`.
pub fn orthogonal_pair<R: Rng>(rng: &mut R, dim: usize) -> (HermitianMatrix, HermitianMatrix) {
    let u = random_unitary(rng, dim);
    let split = rng.random_range(1..dim);
    let end = rng.random_range(split + 1..=dim);
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    for v in a.iter_mut().take(split) {
        *v = rng.random_range(0.1..2.0);
    }
    for v in b.iter_mut().take(end).skip(split) {
        *v = rng.random_range(0.1..2.0);
    }
    (diag_conjugate(&u, &a), diag_conjugate(&u, &b))
}

/// Nonzero projections `P, Q` with `PQ = 0`. Needs `dim >= 2`.
pub fn complementary_projections<R: Rng>(rng: &mut R, dim: usize) -> (HermitianMatrix, HermitianMatrix) {
    let u = random_unitary(rng, dim);
    let split = rng.random_range(1..dim);
    let end = rng.random_range(split + 1..=dim);
    let p: Vec<f64> = (0..dim).map(|i| if i < split { 1.0 } else { 0.0 }).collect();
    let q: Vec<f64> = (0..dim).map(|i| if (split..end).contains(&i) { 1.0 } else { 0.0 }).collect();
    (diag_conjugate(&u, &p), diag_conjugate(&u, &q))
}

/// Nonzero projections with `||PQ|| > min_overlap`.
pub fn overlapping_projections<R: Rng>(rng: &mut R, dim: usize, min_overlap: f64) -> (HermitianMatrix, HermitianMatrix) {
    let draw = |rng: &mut R| {
        let u = random_unitary(rng, dim);
        let rank = rng.random_range(1..=dim);
        let bits: Vec<f64> = (0..dim).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
        diag_conjugate(&u, &bits)
    };
    loop {
        let p = draw(rng);
        let q = draw(rng);
        if matrix_norm(&p.product(&q).expect("same dimension")) > min_overlap {
            return (p, q);
        }
    }
}

fn dyadic<R: Rng>(rng: &mut R, lo: u32, hi: u32, denom: f64) -> f64 {
    rng.random_range(lo..=hi) as f64 / denom
}

/// `(g0, f)` on a space of 1 to 12 points with dyadic, strictly positive
/// values. `g0` peaks at value in `[1/8, 4]` and stays below half of it
/// elsewhere; `f` takes values in `(0, 4]`.
pub fn limit_pair<R: Rng>(rng: &mut R) -> Result<(ConeFunction, ConeFunction)> {
    let n = rng.random_range(1..=12);
    let space = FiniteSpace::new((0..n).map(|i| format!("p{i}")))?;
    let peak = dyadic(rng, 1, 32, 8.0);
    let mut on_peak: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
    on_peak[rng.random_range(0..n)] = true;
    let g: Vec<f64> = on_peak
        .iter()
        .map(|&p| if p { peak } else { peak / 2.0 * dyadic(rng, 1, 8, 8.0) })
        .collect();
    let f: Vec<f64> = (0..n).map(|_| dyadic(rng, 1, 64, 16.0)).collect();
    Ok((ConeFunction::new(space.clone(), g)?, ConeFunction::new(space, f)?))
}

/// A composition operator `Tf(y) = f(tau(y))` on `Y0`, padded with junk
/// points where `Tf(y) = c(y, f) f(x_y)` for factors `c` in `[0.3, 0.95]`.
#[derive(Clone, Debug)]
pub struct CompositionInstance {
    pub map: PreserverMap,
    /// `(y, tau(y))` as target and source indices.
    pub clean: Vec<(usize, usize)>,
}

pub fn composition_instance<R: Rng>(rng: &mut R) -> Result<CompositionInstance> {
    let nx = rng.random_range(2..=4);
    let x = FiniteSpace::new((0..nx).map(|i| format!("x{i}")))?;
    let members: Vec<(String, Vec<f64>)> = (1u32..(1 << nx))
        .map(|mask| {
            let top = dyadic(rng, 4, 16, 8.0);
            let values = (0..nx)
                .map(|i| if mask >> i & 1 == 1 { top } else { top * dyadic(rng, 1, 6, 8.0) })
                .collect();
            (format!("m{mask}"), values)
        })
        .collect();
    let family = FunctionFamily::new(x, members)?;

    // (clean, x) per point of Y; junk points sit over x without attaining f(x).
    let n_clean = nx + rng.random_range(0..=2);
    let mut entries: Vec<(bool, usize)> = (0..nx).map(|i| (true, i)).collect();
    entries.extend((nx..n_clean).map(|_| (true, rng.random_range(0..nx))));
    let n_junk = rng.random_range(0..=3);
    entries.extend((0..n_junk).map(|_| (false, rng.random_range(0..nx))));
    entries.shuffle(rng);

    let y = FiniteSpace::new((0..entries.len()).map(|i| format!("y{i}")))?;
    let images: Vec<Vec<f64>> = family
        .members()
        .iter()
        .map(|f| {
            entries
                .iter()
                .map(|&(clean, x)| {
                    let v = f.values()[x];
                    if clean {
                        v
                    } else {
                        v * rng.random_range(0.3..0.95)
                    }
                })
                .collect()
        })
        .collect();
    let clean = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.0)
        .map(|(y, e)| (y, e.1))
        .collect();
    Ok(CompositionInstance {
        map: PreserverMap::new(family, y, images)?,
        clean,
    })
}

/// Multiplies one image by `1.25`, which breaks every norm-of-mean identity
/// on the singleton multiset of that member.
pub fn inflate_one_image<R: Rng>(rng: &mut R, t: &PreserverMap) -> Result<PreserverMap> {
    let k = rng.random_range(0..t.domain().len());
    let images = t
        .images()
        .iter()
        .enumerate()
        .map(|(i, g)| g.values().iter().map(|v| if i == k { v * 1.25 } else { *v }).collect())
        .collect();
    Ok(PreserverMap::new(t.domain().clone(), t.target_arc(), images)?.with_tolerance(t.tolerance()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{check_mean_preservation, check_peak_richness, reconstruct};
    use crate::means::MeanKind;
    use crate::spectral::{loewner_leq, min_eigenvalue};

    #[test]
    fn seeds_differ_by_every_coordinate() {
        let base = trial_seed(0, "a", 2, 0);
        assert_ne!(base, trial_seed(1, "a", 2, 0));
        assert_ne!(base, trial_seed(0, "b", 2, 0));
        assert_ne!(base, trial_seed(0, "a", 3, 0));
        assert_ne!(base, trial_seed(0, "a", 2, 1));
        assert_eq!(base, trial_seed(0, "a", 2, 0));
    }

    #[test]
    fn pair_shapes_hold() {
        let mut rng = trial_rng(3, "shapes", 4, 0);
        for _ in 0..40 {
            let (a, b, shape) = pd_pair(&mut rng, 4);
            assert!(min_eigenvalue(&a) > 0.0 && min_eigenvalue(&b) > 0.0);
            match shape {
                PairShape::Above | PairShape::Equal => assert!(loewner_leq(&a, &b, 1e-10).unwrap()),
                PairShape::Below => assert!(loewner_leq(&b, &a, 1e-10).unwrap()),
                PairShape::Independent => {}
            }
        }
    }

    #[test]
    fn orthogonal_pairs_are_orthogonal() {
        let mut rng = trial_rng(0, "orth", 3, 0);
        for dim in 2..=5 {
            let (a, b) = orthogonal_pair(&mut rng, dim);
            assert!(matrix_norm(&a.product(&b).unwrap()) < 1e-12);
            let (p, q) = complementary_projections(&mut rng, dim);
            assert!(matrix_norm(&p.product(&q).unwrap()) < 1e-12);
            assert!(op_norm(&p) > 0.5 && op_norm(&q) > 0.5);
        }
    }

    #[test]
    fn composition_instances_are_genuine() {
        for trial in 0..10 {
            let mut rng = trial_rng(0, "comp", 0, trial);
            let inst = composition_instance(&mut rng).unwrap();
            assert!(check_peak_richness(inst.map.domain(), 16).rich());
            assert!(check_mean_preservation(&inst.map, MeanKind::Arithmetic, 2).unwrap().preserved());
            let r = reconstruct(&inst.map).unwrap();
            let got: Vec<(usize, usize)> = r.y0.iter().copied().zip(r.tau.iter().copied()).collect();
            assert_eq!(got, inst.clean);
            let bad = inflate_one_image(&mut rng, &inst.map).unwrap();
            assert!(!check_mean_preservation(&bad, MeanKind::Arithmetic, 1).unwrap().preserved());
        }
    }
}
