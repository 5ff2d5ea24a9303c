//! Operator and completely bounded norms of maps between matrix algebras,
//! computed by multi-restart alternating ascent, plus the norm-based
//! capacity bounds built on them.

use serde::Serialize;

use super::OptimizerConfig;
use crate::channels::{choi_cp_verdict, Channel, LinearMap};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::random;
use crate::EPS_ALG;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    OperatorNorm,
    CbNorm,
}

/// Lower-bound certificate for a norm: the reported value is attained at
/// `maximizer` (an operator of norm one on the possibly stabilized space).
#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: NormKind,
    pub maximizer: ComplexMatrix,
    /// Identity factor tensored on during the maximization; 1 means the
    /// plain operator norm won.
    pub stabilizer_dim: usize,
    pub converged: bool,
}

/// One ascent pass: alternately update the top singular pair of `m(A)` and
/// the unitary `A` maximizing the pairing against it. Each step is
/// nondecreasing in `||m(A)||`.
fn ascend(m: &LinearMap, adj: &LinearMap, start: ComplexMatrix, opt: &OptimizerConfig) -> (f64, ComplexMatrix, bool) {
    let mut a = start;
    let svd = m.apply(&a).svd();
    let mut value = svd.s.first().copied().unwrap_or(0.0);
    let (mut u, mut v) = top_pair(&svd);
    let mut converged = false;
    for _ in 0..opt.max_iter {
        let g = adj.apply(&(&u * &v.adjoint()));
        let gs = g.adjoint().svd();
        let next_a = &gs.vt.adjoint() * &gs.u.adjoint();
        let bs = m.apply(&next_a).svd();
        let next = bs.s.first().copied().unwrap_or(0.0);
        if next <= value + opt.tol {
            if next > value {
                value = next;
                a = next_a;
            }
            converged = true;
            break;
        }
        value = next;
        a = next_a;
        let pair = top_pair(&bs);
        u = pair.0;
        v = pair.1;
    }
    (value, a, converged)
}

fn top_pair(svd: &crate::matrix::Svd) -> (ComplexMatrix, ComplexMatrix) {
    let u = ComplexMatrix::from_fn(svd.u.rows(), 1, |i, _| svd.u[(i, 0)]);
    let v = ComplexMatrix::from_fn(svd.vt.cols(), 1, |i, _| svd.vt[(0, i)].conj());
    (u, v)
}

fn swap_matrix(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        if r / d == c % d && r % d == c / d {
            C64::ONE
        } else {
            C64::ZERO
        }
    })
}

fn best_over_starts(
    m: &LinearMap,
    extra: &[ComplexMatrix],
    opt: &OptimizerConfig,
) -> (f64, ComplexMatrix, bool) {
    let adj = m.hs_adjoint();
    let d = m.dim_in();
    let mut rng = random::rng(opt.seed);
    let mut best = (f64::NEG_INFINITY, ComplexMatrix::identity(d), true);
    let mut all_converged = true;
    let mut starts = vec![ComplexMatrix::identity(d)];
    starts.extend_from_slice(extra);
    for _ in 0..opt.restarts {
        starts.push(random::haar_unitary(&mut rng, d));
    }
    for start in starts {
        let (value, a, converged) = ascend(m, &adj, start, opt);
        all_converged &= converged;
        if value > best.0 {
            best = (value, a, true);
        }
    }
    (best.0, best.1, all_converged)
}

/// `sup { ||m(A)|| : ||A|| <= 1 }`, reported with the maximizing `A`. The
/// supremum is attained on unitaries, which is the family searched.
pub fn operator_norm(m: &LinearMap, opt: &OptimizerConfig) -> NormEstimate {
    let (value, maximizer, converged) = best_over_starts(m, &[], opt);
    NormEstimate {
        value,
        kind: NormKind::OperatorNorm,
        maximizer,
        stabilizer_dim: 1,
        converged,
    }
}

/// Completely bounded norm, evaluated as the larger of the plain operator
/// norm and the operator norm of `m (x) id_n` with `n` the output dimension,
/// where the supremum over ancilla sizes is attained.
pub fn cb_norm(m: &LinearMap, opt: &OptimizerConfig) -> NormEstimate {
    let plain = best_over_starts(m, &[], opt);
    let n = m.dim_out();
    // On the stabilized space the swap unitary is the maximizer for
    // transposition-like maps and a strong generic start, so it joins the
    // identity as a canonical starting point.
    let extra = if m.dim_in() == n {
        vec![swap_matrix(n)]
    } else {
        Vec::new()
    };
    let stabilized = best_over_starts(&m.tensor_id(n), &extra, opt);
    let (value, maximizer, stabilizer_dim, converged) = if stabilized.0 > plain.0 {
        (stabilized.0, stabilized.1, n, stabilized.2)
    } else {
        (plain.0, plain.1, 1, plain.2)
    };
    NormEstimate {
        value,
        kind: NormKind::CbNorm,
        maximizer,
        stabilizer_dim,
        converged,
    }
}

/// Deviation of a classical channel from the identity on its symbols:
/// `max_x sum_y |delta_xy - p(x -> y)|`, exact in the transition matrix.
pub fn classical_deviation_norm(transition: &[Vec<f64>]) -> Result<f64> {
    let n = transition.len();
    let mut worst = 0.0f64;
    for (x, row) in transition.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "row {x} has {} entries, expected {n}",
                row.len()
            )));
        }
        if row.iter().any(|&p| p < -EPS_ALG) {
            return Err(Error::InvalidDistribution("negative transition probability".into()));
        }
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > 1e-7 {
            return Err(Error::InvalidDistribution(format!(
                "row {x} sums to {total}"
            )));
        }
        let mut acc = 0.0;
        for (y, &p) in row.iter().enumerate() {
            let target = if x == y { 1.0 } else { 0.0 };
            acc += (target - p).abs();
        }
        worst = worst.max(acc);
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransposeBoundReport {
    /// Upper bound on the quantum capacity in bits, clamped at zero.
    pub value: f64,
    /// True when composing with the transpose left the map completely
    /// positive, which forces the bound to exactly zero.
    pub cp_shortcut: bool,
    pub norm: Option<NormEstimate>,
}

/// Capacity bound `log2 ||T composed with the transpose||_cb`. The composed
/// map acts on observables as `F -> T(F^t)`; when its Choi matrix stays
/// positive the bound is exactly zero and no optimization is run.
pub fn transpose_bound(t: &Channel, opt: &OptimizerConfig) -> TransposeBoundReport {
    let m = LinearMap::heisenberg(t.kraus_map())
        .compose(&LinearMap::transpose_map(t.out_dim()));
    let verdict = choi_cp_verdict(&m.choi());
    if verdict.cp {
        return TransposeBoundReport {
            value: 0.0,
            cp_shortcut: true,
            norm: None,
        };
    }
    let est = cb_norm(&m, opt);
    TransposeBoundReport {
        value: est.value.log2().max(0.0),
        cp_shortcut: false,
        norm: Some(est),
    }
}

/// `||ideal - decode . t . encode||_cb` for fixed coding channels, the
/// deviation of a coded transmission line from the channel it emulates.
pub fn coded_deviation(
    ideal: &Channel,
    t: &Channel,
    encode: &Channel,
    decode: &Channel,
    opt: &OptimizerConfig,
) -> Result<NormEstimate> {
    let line = Channel::compose(decode, &Channel::compose(t, encode)?)?;
    if line.in_dim() != ideal.in_dim() || line.out_dim() != ideal.out_dim() {
        return Err(Error::DimensionMismatch(format!(
            "coded line is {}->{}, ideal is {}->{}",
            line.in_dim(),
            line.out_dim(),
            ideal.in_dim(),
            ideal.out_dim()
        )));
    }
    let diff = LinearMap::heisenberg(ideal.kraus_map())
        .sub(&LinearMap::heisenberg(line.kraus_map()));
    Ok(cb_norm(&diff, opt))
}

/// Heisenberg-picture deviation of a channel from the identity, as a map.
pub(super) fn identity_deviation(t: &Channel) -> Result<LinearMap> {
    if t.in_dim() != t.out_dim() {
        return Err(Error::DimensionMismatch(format!(
            "deviation from identity needs equal dimensions, got {}->{}",
            t.in_dim(),
            t.out_dim()
        )));
    }
    Ok(LinearMap::heisenberg(t.kraus_map()).sub(&LinearMap::identity(t.in_dim())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::measure_prepare_channel;
    use crate::channels::Povm;
    use crate::matrix::c;
    use crate::systems::State;

    fn quick(seed: u64, restarts: usize) -> OptimizerConfig {
        OptimizerConfig {
            seed,
            restarts,
            max_iter: 80,
            tol: 1e-12,
        }
    }

    #[test]
    fn scaled_identity_map_has_its_scale_as_norm() {
        let m = LinearMap::identity(2).scale(c(-2.0, 0.0));
        let est = operator_norm(&m, &quick(0, 2));
        assert!((est.value - 2.0).abs() < 1e-12);
        assert!(est.converged);
        assert_eq!(est.stabilizer_dim, 1);
        assert!(est.maximizer.is_unitary(1e-9));
    }

    #[test]
    fn unital_channels_have_unit_norm_plain_and_stabilized() {
        let mut r = random::rng(31);
        for d in 2..=3 {
            for _ in 0..3 {
                let t = random::channel(&mut r, d, d, 2);
                let m = LinearMap::heisenberg(t.kraus_map());
                let op = operator_norm(&m, &quick(5, 4));
                let cb = cb_norm(&m, &quick(5, 4));
                assert!((op.value - 1.0).abs() < 1e-6);
                assert!((cb.value - 1.0).abs() < 1e-6);
                assert!(cb.value >= op.value);
            }
        }
    }

    #[test]
    fn transposition_shows_the_gap_between_plain_and_cb_norm() {
        let theta = LinearMap::transpose_map(2);
        let op = operator_norm(&theta, &quick(1, 8));
        let cb = cb_norm(&theta, &quick(1, 8));
        assert!((op.value - 1.0).abs() < 1e-6);
        assert!((cb.value - 2.0).abs() < 1e-2);
        assert_eq!(cb.kind, NormKind::CbNorm);
        assert_eq!(cb.stabilizer_dim, 2);
        // the stabilized maximizer really achieves the reported value
        let big = theta.tensor_id(2);
        assert!((big.apply(&cb.maximizer).operator_norm() - cb.value).abs() < 1e-9);
    }

    #[test]
    fn cb_norm_is_bounded_by_dimension_times_plain_norm() {
        let mut r = random::rng(41);
        for _ in 0..4 {
            let a = random::channel(&mut r, 2, 2, 2);
            let b = random::channel(&mut r, 2, 2, 2);
            let m = LinearMap::heisenberg(a.kraus_map()).sub(&LinearMap::heisenberg(b.kraus_map()));
            let op = operator_norm(&m, &quick(2, 4));
            let cb = cb_norm(&m, &quick(2, 4));
            assert!(cb.value >= op.value - 1e-12);
            assert!(cb.value <= 2.0 * op.value + 1e-3);
        }
    }

    #[test]
    fn classical_deviation_norm_validates_and_computes_exactly() {
        let p = vec![vec![0.875, 0.125], vec![0.25, 0.75]];
        // worst row is the second one: |0 - 0.25| + |1 - 0.75| = 0.5
        assert_eq!(classical_deviation_norm(&p).unwrap(), 0.5);
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(classical_deviation_norm(&id).unwrap(), 0.0);
        assert!(classical_deviation_norm(&[vec![0.9, 0.2], vec![0.2, 0.8]]).is_err());
        assert!(classical_deviation_norm(&[vec![1.2, -0.2], vec![0.2, 0.8]]).is_err());
        assert!(classical_deviation_norm(&[vec![1.0], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn classical_deviation_agrees_with_embedded_cb_norm() {
        let mut r = random::rng(23);
        for n in 2..=3 {
            for _ in 0..3 {
                let p = random::stochastic(&mut r, n);
                let exact = classical_deviation_norm(&p).unwrap();
                let ident: Vec<Vec<f64>> = (0..n)
                    .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect();
                let noisy = Channel::embed_classical(&p).unwrap();
                let clean = Channel::embed_classical(&ident).unwrap();
                let m = LinearMap::heisenberg(noisy.kraus_map())
                    .sub(&LinearMap::heisenberg(clean.kraus_map()));
                let cb = cb_norm(&m, &quick(3, 12));
                assert!(
                    (cb.value - exact).abs() < 1e-12,
                    "n={n}: cb {} vs classical {}",
                    cb.value,
                    exact
                );
            }
        }
    }

    #[test]
    fn transpose_bound_is_positive_for_the_ideal_channel_only_when_coherent()
    {
        let id = transpose_bound(&Channel::identity(2), &quick(4, 8));
        assert!(!id.cp_shortcut);
        assert!((id.value - 1.0).abs() < 2e-2);
        assert!(id.norm.is_some());

        let dep = transpose_bound(&Channel::fully_depolarizing(2), &quick(4, 2));
        assert!(dep.cp_shortcut);
        assert_eq!(dep.value, 0.0);
        assert!(dep.norm.is_none());

        let mut r = random::rng(51);
        let povm = Povm::new(random::povm_effects(&mut r, 2, 3)).unwrap();
        let preps: Vec<State> = (0..3).map(|_| random::state(&mut r, 2, 2)).collect();
        let mp = measure_prepare_channel(&povm, &preps).unwrap();
        let mp_bound = transpose_bound(&mp, &quick(4, 2));
        assert!(mp_bound.cp_shortcut);
        assert_eq!(mp_bound.value, 0.0);

        let bsc = Channel::embed_classical(&[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        assert_eq!(transpose_bound(&bsc, &quick(4, 2)).value, 0.0);
    }

    #[test]
    fn coded_deviation_vanishes_only_for_faithful_lines() {
        let id = Channel::identity(2);
        let perfect = coded_deviation(&id, &id, &id, &id, &quick(6, 2)).unwrap();
        assert!(perfect.value < 1e-12);

        // a dephasing line cannot carry a qubit
        let deph = Channel::embed_classical(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let lossy = coded_deviation(&id, &deph, &id, &id, &quick(6, 4)).unwrap();
        assert!(lossy.value > 0.9);

        let enc = Channel::embed_classical(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let bad_dims = Channel::embed_classical(&[vec![0.5, 0.5, 0.0]]).unwrap();
        assert!(coded_deviation(&id, &deph, &bad_dims, &id, &quick(6, 2)).is_err());
        let _ = enc;
    }
}
