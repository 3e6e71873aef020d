//! Random strategy: a seeded uniform permutation of the eligible apps.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::AppId;

/// Returns the eligible apps in a uniformly random order, deterministic for
/// a given seed. Starting from the sorted id list makes the permutation a
/// pure function of `(eligible, seed)`.
pub fn random_ranking(eligible: &BTreeSet<AppId>, seed: u64) -> Vec<AppId> {
    let mut apps: Vec<AppId> = eligible.iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    apps.shuffle(&mut rng);
    apps
}
