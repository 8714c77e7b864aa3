//! Random exact bistochastic matrices for tests and experiments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::linalg::BistochasticMatrix;
use crate::perm::Permutation;
use crate::rational::Rational;

pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Permutation::new(images).expect("a shuffle is a bijection")
}

/// Convex combination of `terms` random permutation matrices (repeats
/// allowed) with integer weights drawn from `1..=max_weight`, normalised.
pub fn random_bistochastic<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    terms: usize,
    max_weight: u32,
) -> BistochasticMatrix {
    assert!(n >= 1 && terms >= 1 && max_weight >= 1);
    let picks: Vec<(u32, Permutation)> = (0..terms)
        .map(|_| (rng.gen_range(1..=max_weight), random_permutation(rng, n)))
        .collect();
    let total: i64 = picks.iter().map(|(w, _)| i64::from(*w)).sum();
    let weights: Vec<Rational> = picks.iter().map(|(w, _)| Rational::new(i64::from(*w), total)).collect();
    BistochasticMatrix::convex_combination(weights.iter().zip(picks.iter().map(|(_, p)| p)))
        .expect("weights are positive and sum to 1")
}
