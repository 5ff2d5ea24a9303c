//! Worst-case and off-diagonal channel fidelities, and the chain of
//! norm-fidelity estimates connecting them.

use serde::Serialize;

use super::norms::{cb_norm, identity_deviation, operator_norm};
use super::OptimizerConfig;
use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::matrix::{c, cr, ComplexMatrix, C64};
use crate::random;
use crate::DELTA_OPT;

/// Worst-case fidelity certificate: `value = sum_x |<psi|K_x|psi>|^2` at the
/// reported unit vector.
#[derive(Clone, Debug, Serialize)]
pub struct FidelityEstimate {
    pub value: f64,
    pub witness: ComplexMatrix,
    pub converged: bool,
}

/// Which extremization the off-diagonal fidelity uses. `Infimum` takes the
/// worst vector pair with the relative phase chosen best (the modulus); this
/// is the convention under which the norm-fidelity estimates hold.
/// `Supremum` takes the best pair of the real part instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OffDiagonalConvention {
    Infimum,
    Supremum,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairFidelityEstimate {
    pub value: f64,
    pub phi: ComplexMatrix,
    pub psi: ComplexMatrix,
    pub convention: OffDiagonalConvention,
    pub converged: bool,
}

fn overlaps(kraus: &[ComplexMatrix], psi: &ComplexMatrix) -> Vec<C64> {
    kraus
        .iter()
        .map(|k| (&(&psi.adjoint() * k) * psi)[(0, 0)])
        .collect()
}

fn worst_objective(kraus: &[ComplexMatrix], psi: &ComplexMatrix) -> f64 {
    overlaps(kraus, psi).iter().map(|z| z.norm_sqr()).sum()
}

fn descend(kraus: &[ComplexMatrix], start: ComplexMatrix, opt: &OptimizerConfig) -> (f64, ComplexMatrix, bool) {
    let mut psi = start;
    let mut value = worst_objective(kraus, &psi);
    let mut eta = 0.25;
    let mut converged = false;
    for _ in 0..opt.max_iter {
        let zs = overlaps(kraus, &psi);
        let mut grad = ComplexMatrix::zeros(psi.rows(), 1);
        for (k, z) in kraus.iter().zip(&zs) {
            grad = grad + (k * &psi).scale(z.conj()) + (&k.adjoint() * &psi).scale(*z);
        }
        let inner = (&psi.adjoint() * &grad)[(0, 0)];
        let riem = grad - psi.scale(inner);
        if riem.frobenius_norm() < 1e-11 {
            converged = true;
            break;
        }
        let mut stepped = false;
        while eta > 1e-13 {
            let cand = &psi - &riem.scale(cr(eta));
            let norm = cand.frobenius_norm();
            if norm < 1e-12 {
                eta *= 0.5;
                continue;
            }
            let cand = cand.scale(cr(1.0 / norm));
            let v = worst_objective(kraus, &cand);
            if v < value {
                value = v;
                psi = cand;
                eta = (eta * 1.5).min(1.0);
                stepped = true;
                break;
            }
            eta *= 0.5;
        }
        if !stepped {
            converged = true;
            break;
        }
    }
    (value, psi, converged)
}

/// `inf_psi <psi, T(|psi><psi|) psi>` over unit vectors, the lowest fidelity
/// the channel attains on a pure input.
pub fn fidelity_worst(t: &Channel, opt: &OptimizerConfig) -> Result<FidelityEstimate> {
    if t.in_dim() != t.out_dim() {
        return Err(Error::DimensionMismatch(
            "fidelity needs equal input and output dimensions".into(),
        ));
    }
    let d = t.in_dim();
    let kraus = t.kraus();
    let mut rng = random::rng(opt.seed);
    let mut starts: Vec<ComplexMatrix> = (0..d).map(|k| ComplexMatrix::basis_vector(d, k)).collect();
    starts.push(ComplexMatrix::from_fn(d, 1, |_, _| cr(1.0 / (d as f64).sqrt())));
    for _ in 0..opt.restarts {
        starts.push(random::state_vector(&mut rng, d));
    }

    let mut best = (f64::INFINITY, ComplexMatrix::basis_vector(d, 0), true);
    let mut all_converged = true;
    for start in starts {
        let (value, psi, converged) = descend(kraus, start, opt);
        all_converged &= converged;
        if value < best.0 {
            best = (value, psi, true);
        }
    }
    Ok(FidelityEstimate {
        value: best.0,
        witness: best.1,
        converged: all_converged,
    })
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &m.adjoint()).scale(cr(0.5))
}

fn min_eig_pair(h: &ComplexMatrix) -> (f64, ComplexMatrix) {
    let (vals, vecs) = h.eigh();
    let v = ComplexMatrix::from_fn(h.rows(), 1, |i, _| vecs[(i, 0)]);
    (vals[0], v)
}

fn max_eig_pair(h: &ComplexMatrix) -> (f64, ComplexMatrix) {
    let (vals, vecs) = h.eigh();
    let last = vals.len() - 1;
    let v = ComplexMatrix::from_fn(h.rows(), 1, |i, _| vecs[(i, last)]);
    (*vals.last().unwrap(), v)
}

fn expectation(n: &ComplexMatrix, phi: &ComplexMatrix) -> C64 {
    (&(&phi.adjoint() * n) * phi)[(0, 0)]
}

/// A unit vector nearly minimizing `|<phi|N|phi>|`. The minimum modulus over
/// the numerical range equals `max_theta lambda_min(Re(e^{i theta} N))` when
/// positive; otherwise zero lies in the range and a two-dimensional search
/// between extremal eigenvectors closes in on it.
fn range_min_modulus_witness(n: &ComplexMatrix) -> ComplexMatrix {
    let rotated_min = |theta: f64| {
        let h = hermitian_part(&n.scale(c(theta.cos(), theta.sin())));
        min_eig_pair(&h)
    };

    let grid = 96;
    let mut best_theta = 0.0;
    let mut best_val = f64::NEG_INFINITY;
    for k in 0..grid {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / grid as f64;
        let (val, _) = rotated_min(theta);
        if val > best_val {
            best_val = val;
            best_theta = theta;
        }
    }
    let mut lo = best_theta - 2.0 * std::f64::consts::PI / grid as f64;
    let mut hi = best_theta + 2.0 * std::f64::consts::PI / grid as f64;
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if rotated_min(m1).0 < rotated_min(m2).0 {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let theta = 0.5 * (lo + hi);
    let h = hermitian_part(&n.scale(c(theta.cos(), theta.sin())));
    let (dist, phi_min) = min_eig_pair(&h);
    if dist > 0.0 {
        return phi_min;
    }

    // Zero sits in the numerical range: walk the segment between the two
    // extremal eigenvectors, over a few relative phases, for a vector whose
    // expectation is as close to zero as we can get.
    let (_, phi_max) = max_eig_pair(&h);
    let mut best = phi_min.clone();
    let mut best_mod = expectation(n, &best).norm();
    for alpha_k in 0..4 {
        let alpha = std::f64::consts::FRAC_PI_2 * alpha_k as f64;
        let phase = c(alpha.cos(), alpha.sin());
        let eval = |t: f64| {
            let cand = phi_min.scale(cr(t.cos())) + phi_max.scale(phase.scale(t.sin()));
            let norm = cand.frobenius_norm();
            if norm < 1e-12 {
                return (f64::INFINITY, cand);
            }
            let cand = cand.scale(cr(1.0 / norm));
            (expectation(n, &cand).norm(), cand)
        };
        let (mut lo, mut hi) = (0.0f64, std::f64::consts::FRAC_PI_2);
        for _ in 0..80 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if eval(m1).0 > eval(m2).0 {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        let (val, cand) = eval(0.5 * (lo + hi));
        if val < best_mod {
            best_mod = val;
            best = cand;
        }
    }
    best
}

fn pair_value(kraus: &[ComplexMatrix], phi: &ComplexMatrix, psi: &ComplexMatrix) -> C64 {
    let a = overlaps(kraus, phi);
    let b = overlaps(kraus, psi);
    a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum()
}

fn side_operator(kraus: &[ComplexMatrix], coeff: &[C64], conjugate: bool) -> ComplexMatrix {
    let d = kraus[0].rows();
    let mut n = ComplexMatrix::zeros(d, d);
    for (k, z) in kraus.iter().zip(coeff) {
        if conjugate {
            n = n + k.scale(z.conj());
        } else {
            n = n + k.adjoint().scale(*z);
        }
    }
    n
}

/// Off-diagonal fidelity `<phi, T(|phi><psi|) psi>`, extremized over unit
/// vector pairs under the chosen convention. The default `Infimum` run is
/// seeded with the worst-case fidelity minimizer, which keeps the result at
/// or below `fidelity_worst`.
pub fn fidelity_offdiag(
    t: &Channel,
    opt: &OptimizerConfig,
    convention: OffDiagonalConvention,
) -> Result<PairFidelityEstimate> {
    if t.in_dim() != t.out_dim() {
        return Err(Error::DimensionMismatch(
            "fidelity needs equal input and output dimensions".into(),
        ));
    }
    let d = t.in_dim();
    let kraus = t.kraus();
    let mut rng = random::rng(opt.seed);

    let mut starts: Vec<(ComplexMatrix, ComplexMatrix)> = Vec::new();
    if convention == OffDiagonalConvention::Infimum {
        let worst = fidelity_worst(t, opt)?;
        starts.push((worst.witness.clone(), worst.witness));
    }
    for k in 0..d {
        let e = ComplexMatrix::basis_vector(d, k);
        starts.push((e.clone(), e));
    }
    for _ in 0..opt.restarts {
        starts.push((
            random::state_vector(&mut rng, d),
            random::state_vector(&mut rng, d),
        ));
    }

    let better = |cand: f64, incumbent: f64| match convention {
        OffDiagonalConvention::Infimum => cand < incumbent,
        OffDiagonalConvention::Supremum => cand > incumbent,
    };
    let score = |phi: &ComplexMatrix, psi: &ComplexMatrix| {
        let z = pair_value(kraus, phi, psi);
        match convention {
            OffDiagonalConvention::Infimum => z.norm(),
            OffDiagonalConvention::Supremum => z.re,
        }
    };

    let mut best: Option<(f64, ComplexMatrix, ComplexMatrix)> = None;
    let mut all_converged = true;
    for (mut phi, mut psi) in starts {
        let mut value = score(&phi, &psi);
        let mut converged = false;
        for _ in 0..opt.max_iter {
            let mut improved = false;
            // phi side: the objective is <phi| N |phi> with N built from psi.
            let n = side_operator(kraus, &overlaps(kraus, &psi), false);
            let cand_phi = match convention {
                OffDiagonalConvention::Infimum => range_min_modulus_witness(&n),
                OffDiagonalConvention::Supremum => max_eig_pair(&hermitian_part(&n)).1,
            };
            if better(score(&cand_phi, &psi), value) {
                value = score(&cand_phi, &psi);
                phi = cand_phi;
                improved = true;
            }
            // psi side: <psi| M |psi> with M built from phi.
            let m = side_operator(kraus, &overlaps(kraus, &phi), true);
            let cand_psi = match convention {
                OffDiagonalConvention::Infimum => range_min_modulus_witness(&m),
                OffDiagonalConvention::Supremum => max_eig_pair(&hermitian_part(&m)).1,
            };
            if better(score(&phi, &cand_psi), value) {
                value = score(&phi, &cand_psi);
                psi = cand_psi;
                improved = true;
            }
            if !improved {
                converged = true;
                break;
            }
        }
        all_converged &= converged;
        if best.as_ref().is_none_or(|b| better(value, b.0)) {
            best = Some((value, phi, psi));
        }
    }

    let (value, phi, psi) = best.expect("at least one start");
    Ok(PairFidelityEstimate {
        value,
        phi,
        psi,
        convention,
        converged: all_converged,
    })
}

/// The five quantities of the norm-fidelity estimate chain for a channel,
/// with every inequality checked up to `slack`.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateChainReport {
    pub op_deviation: f64,
    pub cb_deviation: f64,
    pub fidelity_worst: f64,
    pub fidelity_offdiag: f64,
    pub slack: f64,
    pub violations: Vec<String>,
    pub holds: bool,
}

/// Checks, on one channel, that the deviation norms and fidelities satisfy
/// their mutual bounds: the cb deviation dominates the plain one and is
/// itself controlled by `4 sqrt(1 - F)` style expressions.
pub fn estimate_chain_check(t: &Channel, opt: &OptimizerConfig) -> Result<EstimateChainReport> {
    let m = identity_deviation(t)?;
    let op = operator_norm(&m, opt).value;
    let cb = cb_norm(&m, opt).value;
    let fw = fidelity_worst(t, opt)?.value;
    let fo = fidelity_offdiag(t, opt, OffDiagonalConvention::Infimum)?.value;

    let root = |x: f64| 4.0 * x.max(0.0).sqrt();
    let slack = DELTA_OPT;
    let mut violations = Vec::new();
    let mut check = |label: &str, lhs: f64, rhs: f64| {
        if lhs > rhs + slack {
            violations.push(format!("{label}: {lhs:.6e} > {rhs:.6e} + {slack:.1e}"));
        }
    };
    check("op <= cb", op, cb);
    check("cb <= 4 sqrt(1 - offdiag)", cb, root(1.0 - fo));
    check("4 sqrt(1 - offdiag) <= 4 sqrt(op)", root(1.0 - fo), root(op));
    check("op <= 4 sqrt(1 - worst)", op, root(1.0 - fw));
    check(
        "4 sqrt(1 - worst) <= 4 sqrt(1 - offdiag)",
        root(1.0 - fw),
        root(1.0 - fo),
    );

    let holds = violations.is_empty();
    Ok(EstimateChainReport {
        op_deviation: op,
        cb_deviation: cb,
        fidelity_worst: fw,
        fidelity_offdiag: fo,
        slack,
        violations,
        holds,
    })
}
