//! The correspondence between bipartite states and channels. The Choi matrix
//! used here is trace-normalized: for a channel with Schrodinger input
//! dimension `d` it is the state `(id (x) T_*)|Omega><Omega|` with `Omega`
//! the normalized maximally entangled vector, so its restriction to the
//! first (reference) factor is `1/d`.

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, C64};
use crate::systems::{Algebra, State};
use crate::{EPS_ALG, TAU_RANK};

use super::{Channel, KrausMap};

#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    in_dim: usize,
    out_dim: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(in_dim: usize, out_dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != in_dim * out_dim || matrix.cols() != in_dim * out_dim {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix is {}x{}, expected side {}",
                matrix.rows(),
                matrix.cols(),
                in_dim * out_dim
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            matrix,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Restriction to the reference factor; equals `1/in_dim` for the Choi
    /// matrix of a channel.
    pub fn input_marginal(&self) -> ComplexMatrix {
        let (da, db) = (self.in_dim, self.out_dim);
        ComplexMatrix::from_fn(da, da, |k, l| {
            let mut acc = C64::ZERO;
            for m in 0..db {
                acc += self.matrix[(k * db + m, l * db + m)];
            }
            acc
        })
    }
}

/// Trace-normalized Choi matrix of a Kraus map.
pub fn choi_of(map: &KrausMap) -> ChoiMatrix {
    let (da, db) = (map.in_dim(), map.out_dim());
    let mut c = ComplexMatrix::zeros(da * db, da * db);
    for k in map.kraus() {
        // column vector w with w[(k,m)] = K[m,k]
        let w = k.transpose().vec();
        c = c + (&w * &w.adjoint()).scale(cr(1.0 / da as f64));
    }
    ChoiMatrix {
        in_dim: da,
        out_dim: db,
        matrix: c,
    }
}

/// Minimal Kraus operators of a PSD Choi matrix whose input marginal is
/// maximally mixed: eigenvector reshaping, `K_j = sqrt(d g_j) mat(v_j)`.
fn kraus_from_uniform_choi(c: &ChoiMatrix) -> Vec<ComplexMatrix> {
    let (da, db) = (c.in_dim, c.out_dim);
    let (vals, vecs) = c.matrix.eigh();
    let gmax = vals.last().copied().unwrap_or(0.0);
    let mut kraus = Vec::new();
    for (k, &g) in vals.iter().enumerate().rev() {
        if g <= TAU_RANK * gmax {
            break;
        }
        let v = ComplexMatrix::from_fn(da * db, 1, |i, _| vecs[(i, k)]);
        kraus.push(ComplexMatrix::unvec(&v, da, db).transpose().scale(cr((da as f64 * g).sqrt())));
    }
    kraus
}

/// Reconstructs a channel from its Choi matrix. For a maximally mixed input
/// marginal the reconstruction is the minimal Kraus form in the standard
/// basis; otherwise the marginal's eigenbasis is used and eigenvalues below
/// the rank cutoff are dropped (the recovered channel then acts on the
/// support only).
pub fn channel_from_choi(c: &ChoiMatrix) -> Result<Channel> {
    let herm_dev = (&c.matrix - &c.matrix.adjoint()).max_abs();
    if herm_dev > EPS_ALG {
        return Err(Error::InvalidChannel(format!(
            "Choi matrix deviates from Hermiticity by {herm_dev:.3e}"
        )));
    }
    let min = c.matrix.min_eigenvalue();
    if min < -EPS_ALG {
        return Err(Error::NotCompletelyPositive { eigenvalue: min });
    }
    let tr = c.matrix.trace();
    if (tr.re - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidChannel(format!(
            "Choi matrix has trace {:.9}, expected 1 (trace-normalized convention)",
            tr.re
        )));
    }
    let marginal = c.input_marginal();
    let uniform = ComplexMatrix::identity(c.in_dim).scale(cr(1.0 / c.in_dim as f64));
    if (&marginal - &uniform).max_abs() <= 1e-9 {
        return Channel::with_tol(kraus_from_uniform_choi(c), 1e-7);
    }

    // General bipartite state: diagonalize the marginal, keep its support,
    // and renormalize the Choi matrix in that eigenbasis.
    let (r, e) = marginal.eigh();
    let rmax = r.last().copied().unwrap_or(0.0);
    let kept: Vec<usize> = (0..r.len()).filter(|&k| r[k] > TAU_RANK * rmax).collect();
    let dr = kept.len();
    if dr == 0 {
        return Err(Error::Numerical("input marginal has no support".into()));
    }
    let db = c.out_dim;
    // <e_k (x) nu | C | e_l (x) nu'>
    let project = |k: usize, nu: usize, l: usize, nu2: usize| -> C64 {
        let mut acc = C64::ZERO;
        for a in 0..c.in_dim {
            if e[(a, kept[k])].norm() < 1e-300 {
                continue;
            }
            for b in 0..c.in_dim {
                acc += e[(a, kept[k])].conj() * e[(b, kept[l])] * c.matrix[(a * db + nu, b * db + nu2)];
            }
        }
        acc
    };
    let renorm = ComplexMatrix::from_fn(dr * db, dr * db, |row, col| {
        let (k, nu) = (row / db, row % db);
        let (l, nu2) = (col / db, col % db);
        let rk = r[kept[k]];
        let rl = r[kept[l]];
        project(k, nu, l, nu2) / cr((rk * rl).sqrt() * dr as f64)
    });
    let inner = ChoiMatrix {
        in_dim: dr,
        out_dim: db,
        matrix: renorm,
    };
    Channel::with_tol(kraus_from_uniform_choi(&inner), 1e-6)
}

/// The two pieces of the state-channel correspondence: a purification of the
/// first marginal and the channel acting on its ancilla side. Recombining
/// with [`recombine`] restores the original bipartite state.
#[derive(Clone, Debug)]
pub struct DualityParts {
    /// Purifying vector on `C^{dim_a} (x) C^{rank}`.
    pub psi: ComplexMatrix,
    pub dim_a: usize,
    pub rank: usize,
    /// Channel from states on `C^{rank}` to states on the second factor.
    pub channel: Channel,
}

/// Decomposes a bipartite state into a pure state and a channel.
pub fn state_to_channel(s: &State) -> Result<DualityParts> {
    let dims = s.algebra().factor_dims();
    if dims.len() != 2 || !s.algebra().is_fully_quantum() {
        return Err(Error::DimensionMismatch(
            "state-channel decomposition expects two quantum factors".into(),
        ));
    }
    let (da, db) = (dims[0], dims[1]);
    let choi = ChoiMatrix::new(da, db, s.density().clone())?;
    let marginal = choi.input_marginal();
    let uniform = ComplexMatrix::identity(da).scale(cr(1.0 / da as f64));
    let (rvals, rvecs, rank) = if (&marginal - &uniform).max_abs() <= 1e-9 {
        (vec![1.0 / da as f64; da], ComplexMatrix::identity(da), da)
    } else {
        let (r, e) = marginal.eigh();
        let rmax = r.last().copied().unwrap_or(0.0);
        let kept: Vec<usize> = (0..r.len()).filter(|&k| r[k] > TAU_RANK * rmax).collect();
        let vals: Vec<f64> = kept.iter().map(|&k| r[k]).collect();
        let vecs = ComplexMatrix::from_fn(da, kept.len(), |i, j| e[(i, kept[j])]);
        let n = kept.len();
        (vals, vecs, n)
    };
    let mut psi = ComplexMatrix::zeros(da * rank, 1);
    for (slot, &rk) in rvals.iter().enumerate() {
        let ek = ComplexMatrix::from_fn(da, 1, |i, _| rvecs[(i, slot)]);
        let fk = ComplexMatrix::basis_vector(rank, slot);
        psi = psi + ek.kron(&fk).scale(cr(rk.sqrt()));
    }
    let channel = channel_from_choi(&choi)?;
    Ok(DualityParts {
        psi,
        dim_a: da,
        rank,
        channel,
    })
}

/// Applies `id (x) T_*` to the purifier, reconstructing the bipartite state.
pub fn recombine(parts: &DualityParts) -> Result<State> {
    let da = parts.dim_a;
    let rank = parts.rank;
    if parts.channel.in_dim() != rank {
        return Err(Error::DimensionMismatch(format!(
            "channel input {} does not match purifier ancilla {rank}",
            parts.channel.in_dim()
        )));
    }
    let db = parts.channel.out_dim();
    let sigma = &parts.psi * &parts.psi.adjoint();
    let mut rho = ComplexMatrix::zeros(da * db, da * db);
    for k in parts.channel.kraus() {
        let big = ComplexMatrix::identity(da).kron(k);
        rho = rho + &(&big * &sigma) * &big.adjoint();
    }
    State::with_tol(Algebra::quantum(&[da, db]), rho, 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::LinearMap;
    use crate::random;
    use crate::systems::product_state;

    fn max_entangled(d: usize) -> ComplexMatrix {
        let mut psi = ComplexMatrix::zeros(d * d, 1);
        for k in 0..d {
            psi.set(k * d + k, 0, cr(1.0 / (d as f64).sqrt()));
        }
        psi
    }

    #[test]
    fn choi_of_identity_is_max_entangled_projector() {
        for d in [2, 3] {
            let c = choi_of(Channel::identity(d).kraus_map());
            let psi = max_entangled(d);
            let proj = &psi * &psi.adjoint();
            assert!((c.matrix() - &proj).max_abs() < 1e-14);
        }
    }

    #[test]
    fn choi_agrees_with_transfer_matrix_form() {
        let mut r = random::rng(7);
        let ch = random::channel(&mut r, 3, 2, 4);
        let via_kraus = choi_of(ch.kraus_map());
        let via_transfer = LinearMap::schrodinger(ch.kraus_map()).choi();
        assert!((via_kraus.matrix() - &via_transfer).max_abs() < 1e-12);
    }

    #[test]
    fn channel_choi_has_uniform_input_marginal() {
        let mut r = random::rng(11);
        for (da, db, rank) in [(2, 2, 3), (3, 2, 2), (2, 4, 5)] {
            let ch = random::channel(&mut r, da, db, rank);
            let marginal = choi_of(ch.kraus_map()).input_marginal();
            let uniform = ComplexMatrix::identity(da).scale(cr(1.0 / da as f64));
            assert!((&marginal - &uniform).max_abs() < 1e-12);
        }
    }

    #[test]
    fn kraus_choi_kraus_round_trip() {
        let mut r = random::rng(23);
        for (da, db, rank) in [(2, 2, 1), (2, 2, 4), (3, 3, 2), (2, 3, 3), (4, 2, 6)] {
            let ch = random::channel(&mut r, da, db, rank);
            let back = channel_from_choi(&choi_of(ch.kraus_map())).unwrap();
            assert_eq!(back.in_dim(), da);
            assert_eq!(back.out_dim(), db);
            for _ in 0..3 {
                let rho = random::density_matrix(&mut r, da, da);
                let direct = ch.apply_schrodinger_raw(&rho);
                let recovered = back.apply_schrodinger_raw(&rho);
                assert!((&direct - &recovered).max_abs() < 1e-9);
            }
        }
    }

    #[test]
    fn channel_from_choi_rejects_negative_choi() {
        let swap = ComplexMatrix::from_fn(4, 4, |r, c| {
            let (i, j) = (r / 2, r % 2);
            let (k, l) = (c / 2, c % 2);
            if i == l && j == k { cr(0.5) } else { cr(0.0) }
        });
        let c = ChoiMatrix::new(2, 2, swap).unwrap();
        match channel_from_choi(&c) {
            Err(Error::NotCompletelyPositive { eigenvalue }) => {
                assert!((eigenvalue + 0.5).abs() < 1e-12);
            }
            other => panic!("expected CP failure, got {other:?}"),
        }
    }

    #[test]
    fn max_entangled_state_decomposes_into_identity_channel() {
        let psi = max_entangled(2);
        let s = State::pure(Algebra::quantum(&[2, 2]), &psi).unwrap();
        let parts = state_to_channel(&s).unwrap();
        assert_eq!(parts.rank, 2);
        assert!((&parts.psi - &psi).max_abs() < 1e-12);
        let mut r = random::rng(3);
        for _ in 0..3 {
            let rho = random::density_matrix(&mut r, 2, 2);
            assert!((&parts.channel.apply_schrodinger_raw(&rho) - &rho).max_abs() < 1e-9);
        }
    }

    #[test]
    fn product_state_decomposes_into_replacement_channel() {
        let mut r = random::rng(5);
        let rho1 = State::new(
            Algebra::quantum(&[2]),
            ComplexMatrix::real_diagonal(&[0.7, 0.3]),
        )
        .unwrap();
        let rho2 = random::state(&mut r, 2, 2);
        let s = product_state(&rho1, &rho2);
        let parts = state_to_channel(&s).unwrap();
        assert_eq!(parts.rank, 2);
        for _ in 0..3 {
            let sigma = random::density_matrix(&mut r, 2, 2);
            let out = parts.channel.apply_schrodinger_raw(&sigma);
            assert!((&out - rho2.density()).max_abs() < 1e-9);
        }
    }

    #[test]
    fn recombine_inverts_state_to_channel() {
        let mut r = random::rng(41);
        for (da, db) in [(2, 2), (2, 3), (3, 2)] {
            for rank in [1, da * db] {
                let s = random::state(&mut r, da * db, rank);
                let s = State::new(Algebra::quantum(&[da, db]), s.density().clone()).unwrap();
                let parts = state_to_channel(&s).unwrap();
                let back = recombine(&parts).unwrap();
                assert!((back.density() - s.density()).max_abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rank_deficient_marginal_round_trips() {
        let psi = ComplexMatrix::vector(&[cr(0.9f64.sqrt()), cr(0.0), cr(0.0), cr(0.1f64.sqrt())]);
        let s = State::pure(Algebra::quantum(&[2, 2]), &psi).unwrap();
        let parts = state_to_channel(&s).unwrap();
        assert_eq!(parts.rank, 2);
        let back = recombine(&parts).unwrap();
        assert!((back.density() - s.density()).max_abs() < 1e-9);

        let corner = State::pure(Algebra::quantum(&[2, 2]), &ComplexMatrix::basis_vector(4, 0))
            .unwrap();
        let parts = state_to_channel(&corner).unwrap();
        assert_eq!(parts.rank, 1);
        let back = recombine(&parts).unwrap();
        assert!((back.density() - corner.density()).max_abs() < 1e-9);
    }
}
