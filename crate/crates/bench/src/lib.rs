//! Fixture builders shared by the benchmark targets, kept out of the bench
//! files so the inputs are constructed identically across runs.

use qichan::capacity::OptimizerConfig;
use qichan::channels::Channel;
use qichan::systems::{Algebra, State};
use qichan::telepo::{weyl_basis, TeleportationScheme};
use qichan::{random, ComplexMatrix};

pub fn seeded_channel(seed: u64, d: usize, rank: usize) -> Channel {
    random::channel(&mut random::rng(seed), d, d, rank)
}

pub fn weyl_scheme(d: usize) -> TeleportationScheme {
    TeleportationScheme::build(weyl_basis(d).expect("d >= 2")).expect("weyl basis verifies")
}

pub fn state_batch(seed: u64, d: usize, count: usize) -> Vec<State> {
    let mut r = random::rng(seed);
    (0..count).map(|_| random::state(&mut r, d, d)).collect()
}

pub fn hermitian(seed: u64, d: usize) -> ComplexMatrix {
    let g = random::ginibre(&mut random::rng(seed), d, d);
    &g + &g.adjoint()
}

pub fn quick_optimizer(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        seed,
        restarts: 2,
        ..OptimizerConfig::default()
    }
}

pub fn qubit_algebra() -> Algebra {
    Algebra::quantum(&[2])
}
