//! Seeded random generators for vectors, unitaries, states and channels.
//! Everything is driven by an explicit ChaCha stream so results are
//! reproducible across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bell;
use crate::channels::Channel;
use crate::matrix::{c, cr, ComplexMatrix, C64};
use crate::systems::{Algebra, State};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    c(gaussian(rng), gaussian(rng))
}

/// Matrix with independent complex Gaussian entries.
pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, complex_gaussian(rng));
        }
    }
    m
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the R diagonal
/// rotated positive.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let g = ginibre(rng, n, n);
    let qr = g.as_dmatrix().clone().qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / cr(rjj.norm())
        } else {
            C64::ONE
        };
        for i in 0..n {
            u.set(i, j, q[(i, j)] * phase);
        }
    }
    u
}

/// Haar-random unit vector.
pub fn state_vector(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    loop {
        let v = ginibre(rng, d, 1);
        let n = v.frobenius_norm();
        if n > 1e-6 {
            return v.scale(cr(1.0 / n));
        }
    }
}

/// Random density matrix of the given rank (Ginibre construction).
pub fn density_matrix(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, rank.max(1).min(d));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    m.scale(cr(1.0 / tr))
}

pub fn state(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> State {
    State::with_tol(Algebra::quantum(&[d]), density_matrix(rng, d, rank), 1e-6)
        .expect("random density matrix is a state")
}

/// Random channel with the given Kraus rank: a Haar-ish isometry
/// `C^in -> C^out (x) C^rank` cut into Kraus blocks.
pub fn channel(rng: &mut ChaCha8Rng, in_dim: usize, out_dim: usize, kraus_rank: usize) -> Channel {
    let l = kraus_rank.max(1);
    let g = ginibre(rng, out_dim * l, in_dim);
    let qr = g.as_dmatrix().clone().qr();
    let q = qr.q();
    let kraus: Vec<ComplexMatrix> = (0..l)
        .map(|j| ComplexMatrix::from_fn(out_dim, in_dim, |i, cidx| q[(i * l + j, cidx)]))
        .collect();
    Channel::with_tol(kraus, 1e-9).expect("isometry blocks form a channel")
}

/// Row-stochastic matrix with strictly positive entries.
pub fn stochastic(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let mut row: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
            row
        })
        .collect()
}

/// Random POVM with `k` outcomes: Ginibre squares renormalized by the inverse
/// square root of their sum.
pub fn povm_effects(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Vec<ComplexMatrix> {
    let gs: Vec<ComplexMatrix> = (0..k)
        .map(|_| {
            let g = ginibre(rng, d, d);
            &g * &g.adjoint()
        })
        .collect();
    let mut sum = ComplexMatrix::zeros(d, d);
    for g in &gs {
        sum = sum + g.clone();
    }
    let (vals, vecs) = sum.eigh();
    let inv_sqrt_vals: Vec<f64> = vals.iter().map(|&v| 1.0 / v.sqrt()).collect();
    let inv_sqrt =
        &(&vecs * &ComplexMatrix::real_diagonal(&inv_sqrt_vals)) * &vecs.adjoint();
    gs.iter().map(|g| &(&inv_sqrt * g) * &inv_sqrt).collect()
}

/// Random pair of outcome tables for the two-setting decoding experiment:
/// each setting gets an independent distribution over the eight outcome
/// triples.
pub fn joint_outcome_distribution(rng: &mut ChaCha8Rng) -> bell::JointOutcomeDistribution {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for table in &mut p {
        let mut total = 0.0;
        for plane in table.iter_mut() {
            for row in plane.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.random::<f64>();
                    total += *v;
                }
            }
        }
        for plane in table.iter_mut() {
            for row in plane.iter_mut() {
                for v in row.iter_mut() {
                    *v /= total;
                }
            }
        }
    }
    bell::JointOutcomeDistribution::new(p).expect("normalized nonnegative table")
}

/// Perturbs a channel towards arbitrary noise while keeping it a channel:
/// mixes the identity with strength `eps` of a random channel.
pub fn near_identity_channel(rng: &mut ChaCha8Rng, d: usize, eps: f64) -> Channel {
    let noise = channel(rng, d, d, d);
    let mut kraus = vec![ComplexMatrix::identity(d).scale(cr((1.0 - eps).sqrt()))];
    for k in noise.kraus() {
        kraus.push(k.scale(cr(eps.sqrt())));
    }
    Channel::with_tol(kraus, 1e-9).expect("mixture of channels is a channel")
}
