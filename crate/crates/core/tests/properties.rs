//! Randomized structural properties: facts that must hold for every input,
//! checked over generated matrices, states, channels, and outcome tables.

use proptest::prelude::*;

use qichan::capacity::{cb_norm, operator_norm, relative_entropy, von_neumann_entropy, OptimizerConfig};
use qichan::channels::LinearMap;
use qichan::systems::{purify, restrict, schmidt, Algebra, State};
use qichan::{bell, c, cr, random, ComplexMatrix};

fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |entries| {
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            let (re, im) = entries[i * cols + j];
            c(re, im)
        })
    })
}

/// Full-rank density matrix: a squared random matrix plus a small ridge.
fn density(d: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_matrix(d, d).prop_map(move |g| {
        let padded = &(&g * &g.adjoint()) + &ComplexMatrix::identity(d).scale(cr(0.05));
        let t = padded.trace().re;
        padded.scale(cr(1.0 / t))
    })
}

fn unit_vector(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_matrix(n, 1)
        .prop_filter("too close to zero", |v| v.frobenius_norm() > 0.1)
        .prop_map(|v| {
            let n = v.frobenius_norm();
            v.scale(cr(1.0 / n))
        })
}

fn outcome_table() -> impl Strategy<Value = bell::JointOutcomeDistribution> {
    prop::collection::vec(0.0..1.0f64, 16).prop_filter_map("degenerate table", |raw| {
        let mut p = [[[[0.0f64; 2]; 2]; 2]; 2];
        for setting in 0..2 {
            let cells = &raw[setting * 8..(setting + 1) * 8];
            let total: f64 = cells.iter().sum();
            if total < 0.1 {
                return None;
            }
            for (idx, &v) in cells.iter().enumerate() {
                p[setting][idx / 4][(idx / 2) % 2][idx % 2] = v / total;
            }
        }
        bell::JointOutcomeDistribution::new(p).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn restrictions_stay_states((da, db) in (2usize..4, 2usize..4), seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let s = random::state(&mut r, da * db, da * db);
        let joint = State::new(Algebra::quantum(&[da, db]), s.density().clone()).unwrap();
        for keep in [0usize, 1] {
            let part = restrict(&joint, &[keep]).unwrap();
            prop_assert!((part.density().trace().re - 1.0).abs() < 1e-9);
            let (vals, _) = part.density().eigh();
            prop_assert!(vals.iter().all(|&v| v > -1e-9));
        }
    }

    #[test]
    fn schmidt_coefficients_square_to_the_marginal_spectrum(
        (da, db, psi) in ((2usize..4), (2usize..4))
            .prop_flat_map(|(da, db)| (Just(da), Just(db), unit_vector(da * db))),
    ) {
        let dec = schmidt(&psi, da, db).unwrap();
        let squared: Vec<f64> = dec.coefficients.iter().map(|&s| s * s).collect();
        let joint = State::pure(Algebra::quantum(&[da, db]), &psi).unwrap();
        let marginal = restrict(&joint, &[0]).unwrap();
        let (mut spectrum, _) = marginal.density().eigh();
        spectrum.reverse();
        for (k, &sq) in squared.iter().enumerate() {
            prop_assert!((sq - spectrum[k]).abs() < 1e-9, "slot {k}: {sq} vs {}", spectrum[k]);
        }
        for &leftover in &spectrum[squared.len()..] {
            prop_assert!(leftover.abs() < 1e-9);
        }
        prop_assert!((&dec.reconstruct() - &psi).max_abs() < 1e-9);
    }

    #[test]
    fn purification_restricts_back_to_the_state(d in 2usize..5, seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let s = random::state(&mut r, d, 1 + (seed as usize) % d);
        let (psi, env) = purify(&s);
        let joint = State::pure(Algebra::quantum(&[d, env]), &psi).unwrap();
        let back = restrict(&joint, &[0]).unwrap();
        prop_assert!((back.density() - s.density()).max_abs() < 1e-9);
    }

    #[test]
    fn decoding_success_dominates_the_quarter_combination(dist in outcome_table()) {
        let p_ok = bell::telephone_success(&dist);
        let beta = bell::distribution_beta(&dist);
        prop_assert!(p_ok >= beta / 4.0 - 1e-12, "p_ok {p_ok}, beta {beta}");
    }

    #[test]
    fn entropy_is_concave(
        (d, rho, sigma) in (2usize..4)
            .prop_flat_map(|d| (Just(d), density(d), density(d))),
        lambda in 0.05..0.95f64,
    ) {
        let alg = Algebra::quantum(&[d]);
        let state = |m: ComplexMatrix| State::new(alg.clone(), m).unwrap();
        let mixed = state(&rho.scale(cr(lambda)) + &sigma.scale(cr(1.0 - lambda)));
        let lhs = von_neumann_entropy(&mixed);
        let rhs = lambda * von_neumann_entropy(&state(rho.clone()))
            + (1.0 - lambda) * von_neumann_entropy(&state(sigma.clone()));
        prop_assert!(lhs >= rhs - 1e-9, "{lhs} < {rhs}");

        let lhs_div = relative_entropy(&state(rho.clone()), &state(sigma.clone())).unwrap();
        prop_assert!(lhs_div >= -1e-9, "relative entropy went negative: {lhs_div}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn stabilized_norm_brackets_the_plain_norm(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let ch = random::channel(&mut r, 2, 2, 2);
        let map = LinearMap::heisenberg(ch.kraus_map()).sub(&LinearMap::identity(2));
        let opt = OptimizerConfig { seed, restarts: 4, ..OptimizerConfig::default() };
        let plain = operator_norm(&map, &opt).value;
        let stabilized = cb_norm(&map, &opt).value;
        prop_assert!(plain <= stabilized + 1e-6, "plain {plain} > cb {stabilized}");
        prop_assert!(stabilized <= 2.0 * plain + 1e-3, "cb {stabilized} > d * plain {}", 2.0 * plain);
    }
}
