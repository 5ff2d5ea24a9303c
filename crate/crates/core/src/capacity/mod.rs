//! Entropic quantities, channel norms, fidelities and one-shot capacity
//! optimizers. All logarithms are base 2, so every entropy-like value is in
//! bits.

mod fidelity;
mod norms;

pub use fidelity::{
    estimate_chain_check, fidelity_offdiag, fidelity_worst, EstimateChainReport,
    FidelityEstimate, OffDiagonalConvention, PairFidelityEstimate,
};
pub use norms::{
    cb_norm, classical_deviation_norm, coded_deviation, operator_norm, transpose_bound,
    NormEstimate, NormKind, TransposeBoundReport,
};

use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, C64};
use crate::random;
use crate::systems::{restrict, State};
use crate::{EPS_ALG, RESTARTS_DEFAULT, TAU_RANK};

/// Settings shared by every seeded maximization in this module. Results are
/// deterministic functions of (input, config).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OptimizerConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_restarts() -> usize {
    RESTARTS_DEFAULT
}

fn default_max_iter() -> usize {
    200
}

fn default_tol() -> f64 {
    1e-9
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: default_restarts(),
            max_iter: default_max_iter(),
            tol: default_tol(),
        }
    }
}

fn exactly_diagonal(m: &ComplexMatrix) -> bool {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                let v = m[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Spectrum used for entropies: the diagonal itself when the matrix has no
/// off-diagonal entries at all (keeps clean fixtures exact), eigenvalues
/// otherwise.
fn spectrum_for_entropy(rho: &ComplexMatrix) -> Vec<f64> {
    if exactly_diagonal(rho) {
        (0..rho.rows()).map(|i| rho[(i, i)].re).collect()
    } else {
        rho.eigh().0
    }
}

fn entropy_of(rho: &ComplexMatrix) -> f64 {
    let mut acc = 0.0;
    for p in spectrum_for_entropy(rho) {
        if p > TAU_RANK {
            acc -= p * p.log2();
        }
    }
    acc
}

/// `S(rho) = -tr(rho log2 rho)`, in bits. Eigenvalues below the rank cutoff
/// contribute zero.
pub fn von_neumann_entropy(s: &State) -> f64 {
    entropy_of(s.density())
}

fn rel_entropy_of(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    if exactly_diagonal(rho) && exactly_diagonal(sigma) {
        let mut acc = 0.0;
        for i in 0..rho.rows() {
            let p = rho[(i, i)].re;
            if p <= TAU_RANK {
                continue;
            }
            let q = sigma[(i, i)].re;
            if q <= TAU_RANK {
                return f64::INFINITY;
            }
            acc += p * (p.log2() - q.log2());
        }
        return acc;
    }

    let (pvals, pvecs) = rho.eigh();
    let (qvals, qvecs) = sigma.eigh();
    let d = rho.rows();
    let mut acc = 0.0;
    for &p in &pvals {
        if p > TAU_RANK {
            acc += p * p.log2();
        }
    }
    for (j, &q) in qvals.iter().enumerate() {
        let mut mass = 0.0;
        for (i, &p) in pvals.iter().enumerate() {
            if p <= TAU_RANK {
                continue;
            }
            let mut overlap = C64::ZERO;
            for k in 0..d {
                overlap += pvecs[(k, i)].conj() * qvecs[(k, j)];
            }
            mass += p * overlap.norm_sqr();
        }
        if q <= TAU_RANK {
            if mass > EPS_ALG {
                return f64::INFINITY;
            }
        } else if mass > 0.0 {
            acc -= mass * q.log2();
        }
    }
    acc
}

/// `tr(rho (log2 rho - log2 sigma))`, in bits; `+inf` when the support of
/// `rho` is not contained in the support of `sigma`.
pub fn relative_entropy(rho: &State, sigma: &State) -> Result<f64> {
    if rho.density().rows() != sigma.density().rows() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy of a {}-dim and a {}-dim state",
            rho.density().rows(),
            sigma.density().rows()
        )));
    }
    Ok(rel_entropy_of(rho.density(), sigma.density()))
}

/// Weighted family of input states for the Holevo quantity.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleState {
    weights: Vec<f64>,
    states: Vec<ComplexMatrix>,
}

impl EnsembleState {
    pub fn new(weights: Vec<f64>, states: Vec<ComplexMatrix>) -> Result<Self> {
        if weights.is_empty() || weights.len() != states.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights vs {} states",
                weights.len(),
                states.len()
            )));
        }
        if weights.iter().any(|&w| w < -EPS_ALG) {
            return Err(Error::InvalidState("negative ensemble weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > EPS_ALG {
            return Err(Error::InvalidState(format!(
                "ensemble weights sum to {total}"
            )));
        }
        let d = states[0].rows();
        for rho in &states {
            if rho.rows() != d || rho.cols() != d {
                return Err(Error::DimensionMismatch(
                    "ensemble states on different spaces".into(),
                ));
            }
            if !rho.is_hermitian(1e-7)
                || (rho.trace().re - 1.0).abs() > 1e-7
                || rho.min_eigenvalue() < -1e-7
            {
                return Err(Error::InvalidState(
                    "ensemble member is not a density matrix".into(),
                ));
            }
        }
        Ok(Self { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[ComplexMatrix] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].rows()
    }

    pub fn average(&self) -> ComplexMatrix {
        let mut avg = ComplexMatrix::zeros(self.dim(), self.dim());
        for (w, rho) in self.weights.iter().zip(&self.states) {
            avg = avg + rho.scale(cr(*w));
        }
        avg
    }
}

/// Holevo quantity `chi = S(sum_i p_i T(rho_i)) - sum_i p_i S(T(rho_i))`.
pub fn holevo_chi(ens: &EnsembleState, t: &Channel) -> Result<f64> {
    if ens.dim() != t.in_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ensemble dimension {} vs channel input {}",
            ens.dim(),
            t.in_dim()
        )));
    }
    let outputs: Vec<ComplexMatrix> = ens
        .states
        .iter()
        .map(|rho| t.apply_schrodinger_raw(rho))
        .collect();
    Ok(chi_of(&ens.weights, &outputs))
}

fn chi_of(weights: &[f64], outputs: &[ComplexMatrix]) -> f64 {
    let d = outputs[0].rows();
    let mut avg = ComplexMatrix::zeros(d, d);
    for (w, out) in weights.iter().zip(outputs) {
        avg = avg + out.scale(cr(*w));
    }
    let mut acc = entropy_of(&avg);
    for (w, out) in weights.iter().zip(outputs) {
        if *w > 0.0 {
            acc -= w * entropy_of(out);
        }
    }
    acc
}

/// Result of the ensemble maximization of the Holevo quantity.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalCapacityReport {
    pub value: f64,
    /// Input ensemble achieving the reported value.
    pub ensemble: EnsembleState,
    pub converged: bool,
}

struct HolevoCandidate {
    vectors: Vec<ComplexMatrix>,
    weights: Vec<f64>,
    outputs: Vec<ComplexMatrix>,
    chi: f64,
}

impl HolevoCandidate {
    fn from_vectors(t: &Channel, vectors: Vec<ComplexMatrix>) -> Self {
        let n = vectors.len();
        let outputs: Vec<ComplexMatrix> = vectors
            .iter()
            .map(|v| t.apply_schrodinger_raw(&(v * &v.adjoint())))
            .collect();
        let weights = vec![1.0 / n as f64; n];
        let chi = chi_of(&weights, &outputs);
        Self {
            vectors,
            weights,
            outputs,
            chi,
        }
    }

    /// Multiplicative weight update for fixed output states; kept only when
    /// it does not decrease `chi`.
    fn improve_weights(&mut self, rounds: usize, tol: f64) {
        let d = self.outputs[0].rows();
        let mut w = self.weights.clone();
        for _ in 0..rounds {
            let mut avg = ComplexMatrix::zeros(d, d);
            for (wi, out) in w.iter().zip(&self.outputs) {
                avg = avg + out.scale(cr(*wi));
            }
            let mut next: Vec<f64> = w
                .iter()
                .zip(&self.outputs)
                .map(|(&wi, out)| {
                    if wi <= 0.0 {
                        return 0.0;
                    }
                    let gain = rel_entropy_of(out, &avg).min(60.0);
                    wi * gain.exp2()
                })
                .collect();
            let total: f64 = next.iter().sum();
            if !(total.is_finite() && total > 0.0) {
                break;
            }
            for v in &mut next {
                *v /= total;
            }
            let change: f64 = next
                .iter()
                .zip(&w)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            w = next;
            if change < tol {
                break;
            }
        }
        let chi = chi_of(&w, &self.outputs);
        if chi > self.chi {
            self.weights = w;
            self.chi = chi;
        }
    }

    fn try_replace(&mut self, t: &Channel, idx: usize, vector: ComplexMatrix) -> bool {
        let output = t.apply_schrodinger_raw(&(&vector * &vector.adjoint()));
        let old_out = std::mem::replace(&mut self.outputs[idx], output);
        let chi = chi_of(&self.weights, &self.outputs);
        if chi > self.chi {
            self.vectors[idx] = vector;
            self.chi = chi;
            true
        } else {
            self.outputs[idx] = old_out;
            false
        }
    }
}

/// Maximizes the Holevo quantity over ensembles of at most `in_dim^2` pure
/// input states by alternating weight updates with seeded perturbations of
/// the state vectors.
pub fn one_shot_classical_capacity(t: &Channel, opt: &OptimizerConfig) -> ClassicalCapacityReport {
    let d = t.in_dim();
    let n = d * d;
    let mut rng = random::rng(opt.seed);

    let mut starts: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(opt.restarts + 1);
    starts.push((0..d).map(|k| ComplexMatrix::basis_vector(d, k)).collect());
    for _ in 0..opt.restarts {
        starts.push((0..n).map(|_| random::state_vector(&mut rng, d)).collect());
    }

    let mut best: Option<HolevoCandidate> = None;
    let mut all_converged = true;
    for vectors in starts {
        let mut cand = HolevoCandidate::from_vectors(t, vectors);
        let mut delta = 0.5;
        let mut converged = false;
        for _ in 0..opt.max_iter {
            let before = cand.chi;
            cand.improve_weights(100, opt.tol);
            let mut accepted = false;
            for i in 0..cand.vectors.len() {
                let mut v = cand.vectors[i].clone();
                for r in 0..v.rows() {
                    v.set(r, 0, v[(r, 0)] + random::complex_gaussian(&mut rng).scale(delta));
                }
                let norm = v.frobenius_norm();
                if norm < 1e-12 {
                    continue;
                }
                if cand.try_replace(t, i, v.scale(cr(1.0 / norm))) {
                    accepted = true;
                }
            }
            if !accepted {
                delta *= 0.5;
            }
            if delta < 1e-6 && (cand.chi - before).abs() < opt.tol {
                converged = true;
                break;
            }
        }
        all_converged &= converged;
        if best.as_ref().is_none_or(|b| cand.chi > b.chi) {
            best = Some(cand);
        }
    }

    let best = best.expect("at least one start");
    let states = best.vectors.iter().map(|v| v * &v.adjoint()).collect();
    let ensemble =
        EnsembleState::new(best.weights.clone(), states).expect("optimizer ensemble is valid");
    ClassicalCapacityReport {
        value: best.chi,
        ensemble,
        converged: all_converged,
    }
}

/// `S(rho^B) - S(rho)` for a bipartite state, second factor marginal minus
/// joint; can be negative.
pub fn coherent_info_es(s: &State) -> Result<f64> {
    let dims = s.algebra().factor_dims();
    if dims.len() != 2 || !s.algebra().is_fully_quantum() {
        return Err(Error::DimensionMismatch(
            "coherent information expects two quantum factors".into(),
        ));
    }
    let marginal = restrict(s, &[1])?;
    Ok(von_neumann_entropy(&marginal) - von_neumann_entropy(s))
}

/// Result of maximizing the coherent information over bipartite pure inputs
/// with the second half sent through the channel.
#[derive(Clone, Debug, Serialize)]
pub struct QuantumCapacityReport {
    pub value: f64,
    /// Unit vector on the reference (x) input space achieving the value.
    pub best_input: ComplexMatrix,
    /// Value at the maximally entangled input, reported as a diagnostic; for
    /// noisy channels it can lie well below the maximum.
    pub max_entangled_value: f64,
    pub converged: bool,
}

fn trace_out_first(m: &ComplexMatrix, d_first: usize, d_second: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d_second, d_second, |i, j| {
        let mut acc = C64::ZERO;
        for k in 0..d_first {
            acc += m[(k * d_second + i, k * d_second + j)];
        }
        acc
    })
}

fn coherent_objective(big_kraus: &[ComplexMatrix], d: usize, dout: usize, psi: &ComplexMatrix) -> f64 {
    let p = psi * &psi.adjoint();
    let mut out = ComplexMatrix::zeros(d * dout, d * dout);
    for k in big_kraus {
        out = out + &(k * &p) * &k.adjoint();
    }
    let b = trace_out_first(&out, d, dout);
    entropy_of(&b) - entropy_of(&out)
}

/// Maximizes `coherent_info_es((id (x) T)(|psi><psi|))` over unit vectors
/// `psi` on `C^d (x) C^d`, `d` the channel input dimension.
pub fn cs1(t: &Channel, opt: &OptimizerConfig) -> QuantumCapacityReport {
    let d = t.in_dim();
    let dout = t.out_dim();
    let big_kraus: Vec<ComplexMatrix> = t
        .kraus()
        .iter()
        .map(|k| ComplexMatrix::identity(d).kron(k))
        .collect();
    let objective = |psi: &ComplexMatrix| coherent_objective(&big_kraus, d, dout, psi);

    let mut omega = ComplexMatrix::zeros(d * d, 1);
    for k in 0..d {
        omega.set(k * d + k, 0, cr(1.0 / (d as f64).sqrt()));
    }
    let max_entangled_value = objective(&omega);

    let mut rng = random::rng(opt.seed);
    let mut starts = vec![omega, ComplexMatrix::basis_vector(d * d, 0)];
    for _ in 0..opt.restarts {
        starts.push(random::state_vector(&mut rng, d * d));
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best_input = ComplexMatrix::basis_vector(d * d, 0);
    let mut all_converged = true;
    for start in starts {
        let mut psi = start;
        let mut value = objective(&psi);
        let mut delta = 0.5;
        let mut converged = false;
        for _ in 0..opt.max_iter {
            let mut accepted = false;
            for _ in 0..8 {
                let mut prop = psi.clone();
                for r in 0..prop.rows() {
                    prop.set(
                        r,
                        0,
                        prop[(r, 0)] + random::complex_gaussian(&mut rng).scale(delta),
                    );
                }
                let norm = prop.frobenius_norm();
                if norm < 1e-12 {
                    continue;
                }
                let prop = prop.scale(cr(1.0 / norm));
                let v = objective(&prop);
                if v > value {
                    value = v;
                    psi = prop;
                    accepted = true;
                }
            }
            if !accepted {
                delta *= 0.6;
            }
            if delta < 1e-7 {
                converged = true;
                break;
            }
        }
        all_converged &= converged;
        if value > best_value {
            best_value = value;
            best_input = psi;
        }
    }

    QuantumCapacityReport {
        value: best_value,
        best_input,
        max_entangled_value,
        converged: all_converged,
    }
}
