//! Observable algebras built from classical and quantum tensor factors,
//! together with the states and effects living on them.
//!
//! A factor of kind `quantum` with dimension `d` contributes a full matrix
//! block `M_d`; a `classical` factor contributes the diagonal subalgebra of
//! `M_d`. States and effects are stored as matrices on the tensor product of
//! all factors, with block-diagonality across classical factors enforced at
//! validation time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, C64};
use crate::{EPS_ALG, TAU_RANK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Classical,
    Quantum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub kind: FactorKind,
    pub dim: usize,
}

/// Tensor product of classical and quantum factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Algebra {
    pub factors: Vec<Factor>,
}

impl Algebra {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::DimensionMismatch("algebra needs at least one factor".into()));
        }
        if factors.iter().any(|f| f.dim == 0) {
            return Err(Error::DimensionMismatch("factor dimensions must be positive".into()));
        }
        Ok(Self { factors })
    }

    /// Purely quantum algebra `M_{d1} (x) ... (x) M_{dk}`.
    pub fn quantum(dims: &[usize]) -> Self {
        Self {
            factors: dims
                .iter()
                .map(|&dim| Factor { kind: FactorKind::Quantum, dim })
                .collect(),
        }
    }

    /// Purely classical algebra (diagonal matrices).
    pub fn classical(dims: &[usize]) -> Self {
        Self {
            factors: dims
                .iter()
                .map(|&dim| Factor { kind: FactorKind::Classical, dim })
                .collect(),
        }
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn is_fully_quantum(&self) -> bool {
        self.factors.iter().all(|f| f.kind == FactorKind::Quantum)
    }

    /// Splits a flat index into per-factor components, first factor slowest.
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let dims = self.factor_dims();
        let mut out = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            out[k] = i % dims[k];
            i /= dims[k];
        }
        out
    }

    fn flat_index(dims: &[usize], comps: &[usize]) -> usize {
        let mut i = 0;
        for (k, &d) in dims.iter().enumerate() {
            i = i * d + comps[k];
        }
        i
    }

    /// Checks that `m` lies in the algebra: off-diagonal blocks across every
    /// classical factor vanish within `tol`.
    pub fn contains(&self, m: &ComplexMatrix, tol: f64) -> bool {
        let d = self.total_dim();
        if m.rows() != d || m.cols() != d {
            return false;
        }
        let classical: Vec<usize> = self
            .factors
            .iter()
            .enumerate()
            .filter(|(_, f)| f.kind == FactorKind::Classical)
            .map(|(k, _)| k)
            .collect();
        if classical.is_empty() {
            return true;
        }
        for i in 0..d {
            let ci = self.multi_index(i);
            for j in 0..d {
                let cj = self.multi_index(j);
                if classical.iter().any(|&k| ci[k] != cj[k]) && m[(i, j)].norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Density matrix on an [`Algebra`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct State {
    algebra: Algebra,
    rho: ComplexMatrix,
}

impl State {
    pub fn new(algebra: Algebra, rho: ComplexMatrix) -> Result<Self> {
        Self::with_tol(algebra, rho, EPS_ALG)
    }

    pub fn with_tol(algebra: Algebra, rho: ComplexMatrix, tol: f64) -> Result<Self> {
        let d = algebra.total_dim();
        if rho.rows() != d || rho.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{}, algebra dimension is {d}",
                rho.rows(),
                rho.cols()
            )));
        }
        if !rho.is_hermitian(tol) {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = rho.min_eigenvalue();
        if min < -tol {
            return Err(Error::InvalidState(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        if !algebra.contains(&rho, tol) {
            return Err(Error::InvalidState(
                "density matrix is not block diagonal across classical factors".into(),
            ));
        }
        Ok(Self { algebra, rho })
    }

    /// Rank-one state `|psi><psi|` from a unit vector.
    pub fn pure(algebra: Algebra, psi: &ComplexMatrix) -> Result<Self> {
        let d = algebra.total_dim();
        if psi.rows() != d || psi.cols() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "vector is {}x{}, expected {d}x1",
                psi.rows(),
                psi.cols()
            )));
        }
        let rho = psi * &psi.adjoint();
        Self::new(algebra, rho)
    }

    pub fn maximally_mixed(algebra: Algebra) -> Self {
        let d = algebra.total_dim();
        let rho = ComplexMatrix::identity(d).scale(cr(1.0 / d as f64));
        Self { algebra, rho }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// Born probability `tr(rho F)`.
    pub fn expect(&self, f: &ComplexMatrix) -> f64 {
        (&self.rho * f).trace().re
    }
}

/// Algebra element `F` with `0 <= F <= 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Effect {
    algebra: Algebra,
    f: ComplexMatrix,
}

impl Effect {
    pub fn new(algebra: Algebra, f: ComplexMatrix) -> Result<Self> {
        Self::with_tol(algebra, f, EPS_ALG)
    }

    pub fn with_tol(algebra: Algebra, f: ComplexMatrix, tol: f64) -> Result<Self> {
        let d = algebra.total_dim();
        if f.rows() != d || f.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "effect is {}x{}, algebra dimension is {d}",
                f.rows(),
                f.cols()
            )));
        }
        if !f.is_hermitian(tol) {
            return Err(Error::InvalidEffect("effect is not Hermitian".into()));
        }
        let (vals, _) = f.eigh();
        let min = vals.first().copied().unwrap_or(0.0);
        let max = vals.last().copied().unwrap_or(0.0);
        if min < -tol || max > 1.0 + tol {
            return Err(Error::InvalidEffect(format!(
                "spectrum [{min:.3e}, {max:.3e}] escapes [0, 1]"
            )));
        }
        if !algebra.contains(&f, tol) {
            return Err(Error::InvalidEffect(
                "effect is not block diagonal across classical factors".into(),
            ));
        }
        Ok(Self { algebra, f })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.f
    }

    /// Complementary effect `1 - F`.
    pub fn complement(&self) -> Effect {
        Effect {
            algebra: self.algebra.clone(),
            f: ComplexMatrix::identity(self.f.rows()) - self.f.clone(),
        }
    }
}

/// Partial trace onto the listed factors (strictly increasing indices).
pub fn restrict(s: &State, keep: &[usize]) -> Result<State> {
    let dims = s.algebra.factor_dims();
    if keep.is_empty() {
        return Err(Error::InvalidIndex("keep list is empty".into()));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || *keep.last().unwrap() >= dims.len() {
        return Err(Error::InvalidIndex(format!(
            "keep list {keep:?} is not a strictly increasing subset of 0..{}",
            dims.len()
        )));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let d = s.algebra.total_dim();
    let mut out = ComplexMatrix::zeros(kept_total, kept_total);
    for i in 0..d {
        let ci = s.algebra.multi_index(i);
        for j in 0..d {
            let cj = s.algebra.multi_index(j);
            let traced_match = (0..dims.len())
                .filter(|k| !keep.contains(k))
                .all(|k| ci[k] == cj[k]);
            if !traced_match {
                continue;
            }
            let ki: Vec<usize> = keep.iter().map(|&k| ci[k]).collect();
            let kj: Vec<usize> = keep.iter().map(|&k| cj[k]).collect();
            let a = Algebra::flat_index(&kept_dims, &ki);
            let b = Algebra::flat_index(&kept_dims, &kj);
            let v = out[(a, b)] + s.rho[(i, j)];
            out.set(a, b, v);
        }
    }
    let algebra = Algebra {
        factors: keep.iter().map(|&k| s.algebra.factors[k]).collect(),
    };
    State::with_tol(algebra, out, 1e-6)
}

/// Tensor product of two states.
pub fn product_state(a: &State, b: &State) -> State {
    let mut factors = a.algebra.factors.clone();
    factors.extend_from_slice(&b.algebra.factors);
    State {
        algebra: Algebra { factors },
        rho: a.rho.kron(&b.rho),
    }
}

const SIGMA_X: [[(f64, f64); 2]; 2] = [[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]];
const SIGMA_Y: [[(f64, f64); 2]; 2] = [[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]];
const SIGMA_Z: [[(f64, f64); 2]; 2] = [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]];

fn pauli(table: [[(f64, f64); 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| C64::new(table[i][j].0, table[i][j].1))
}

pub fn sigma_x() -> ComplexMatrix {
    pauli(SIGMA_X)
}

pub fn sigma_y() -> ComplexMatrix {
    pauli(SIGMA_Y)
}

pub fn sigma_z() -> ComplexMatrix {
    pauli(SIGMA_Z)
}

/// `n . sigma` for a direction in R^3.
pub fn spin_operator(n: [f64; 3]) -> ComplexMatrix {
    sigma_x().scale(cr(n[0])) + sigma_y().scale(cr(n[1])) + sigma_z().scale(cr(n[2]))
}

/// Qubit state `(1 + b . sigma) / 2` from Bloch coordinates, `|b| <= 1`.
pub fn bloch_to_state(b: [f64; 3]) -> Result<State> {
    let r = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    if r > 1.0 + EPS_ALG {
        return Err(Error::InvalidState(format!(
            "Bloch vector has length {r:.6}, outside the unit ball"
        )));
    }
    let rho = (ComplexMatrix::identity(2) + spin_operator(b)).scale(cr(0.5));
    State::new(Algebra::quantum(&[2]), rho)
}

/// Bloch coordinates of a qubit state.
pub fn state_to_bloch(s: &State) -> Result<[f64; 3]> {
    if s.algebra.factors.len() != 1
        || s.algebra.factors[0].dim != 2
        || s.algebra.factors[0].kind != FactorKind::Quantum
    {
        return Err(Error::DimensionMismatch(
            "Bloch coordinates need a single quantum factor of dimension 2".into(),
        ));
    }
    Ok([
        s.expect(&sigma_x()),
        s.expect(&sigma_y()),
        s.expect(&sigma_z()),
    ])
}

/// Schmidt decomposition of a bipartite unit vector: `psi = sum_k c_k u_k (x) v_k`
/// with `c_k > 0` descending and orthonormal families `u_k`, `v_k`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left: Vec<ComplexMatrix>,
    pub right: Vec<ComplexMatrix>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let da = self.left[0].rows();
        let db = self.right[0].rows();
        let mut out = ComplexMatrix::zeros(da * db, 1);
        for (k, &ck) in self.coefficients.iter().enumerate() {
            out = out + self.left[k].kron(&self.right[k]).scale(cr(ck));
        }
        out
    }
}

pub fn schmidt(psi: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<SchmidtDecomposition> {
    if psi.cols() != 1 || psi.rows() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "vector is {}x{}, expected {}x1",
            psi.rows(),
            psi.cols(),
            dim_a * dim_b
        )));
    }
    let norm = psi.frobenius_norm();
    if (norm - 1.0).abs() > EPS_ALG {
        return Err(Error::InvalidState(format!("vector has norm {norm:.9}, expected 1")));
    }
    let coeff_matrix = ComplexMatrix::unvec(psi, dim_a, dim_b);
    let svd = coeff_matrix.svd();
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let mut coefficients = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (k, &sk) in svd.s.iter().enumerate() {
        if sk <= TAU_RANK * smax {
            break;
        }
        coefficients.push(sk);
        left.push(ComplexMatrix::from_fn(dim_a, 1, |i, _| svd.u[(i, k)]));
        right.push(ComplexMatrix::from_fn(dim_b, 1, |j, _| svd.vt[(k, j)]));
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left,
        right,
    })
}

/// Minimal purification: returns a unit vector on `H (x) C^rank` whose first
/// marginal is the given state, together with the ancilla dimension.
pub fn purify(s: &State) -> (ComplexMatrix, usize) {
    let (vals, vecs) = s.rho.eigh();
    let d = s.rho.rows();
    let lmax = vals.last().copied().unwrap_or(0.0);
    let kept: Vec<(f64, usize)> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > TAU_RANK * lmax)
        .map(|(k, &v)| (v, k))
        .collect();
    let rank = kept.len().max(1);
    let mut psi = ComplexMatrix::zeros(d * rank, 1);
    for (slot, &(val, k)) in kept.iter().enumerate() {
        let e_k = ComplexMatrix::from_fn(d, 1, |i, _| vecs[(i, k)]);
        let f_k = ComplexMatrix::basis_vector(rank, slot);
        psi = psi + e_k.kron(&f_k).scale(cr(val.sqrt()));
    }
    (psi, rank)
}

/// Partial transpose of a `dA*dB` square matrix over the second tensor slot.
pub fn partial_transpose(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    assert_eq!(m.rows(), dim_a * dim_b);
    assert_eq!(m.cols(), dim_a * dim_b);
    ComplexMatrix::from_fn(dim_a * dim_b, dim_a * dim_b, |r, s| {
        let (i, j) = (r / dim_b, r % dim_b);
        let (k, l) = (s / dim_b, s % dim_b);
        m[(i * dim_b + l, k * dim_b + j)]
    })
}

/// Outcome of the partial-transpose separability test. The test is one-sided:
/// a negative eigenvalue certifies entanglement, a pass says nothing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PptVerdict {
    PassedInconclusive,
    FailedEntangled { min_eigenvalue: f64 },
}

/// Partial-transpose criterion across the factor cut `[0..cut) | [cut..)`.
pub fn ppt_check(s: &State, cut: usize) -> Result<PptVerdict> {
    let dims = s.algebra.factor_dims();
    if cut == 0 || cut >= dims.len() {
        return Err(Error::InvalidIndex(format!(
            "cut {cut} does not split {} factors into two groups",
            dims.len()
        )));
    }
    if !s.algebra.is_fully_quantum() {
        return Err(Error::InvalidState("partial-transpose test expects quantum factors".into()));
    }
    let da: usize = dims[..cut].iter().product();
    let db: usize = dims[cut..].iter().product();
    let pt = partial_transpose(&s.rho, da, db);
    let min = pt.min_eigenvalue();
    if min < -EPS_ALG {
        Ok(PptVerdict::FailedEntangled { min_eigenvalue: min })
    } else {
        Ok(PptVerdict::PassedInconclusive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn bell_phi_plus() -> State {
        let psi = ComplexMatrix::vector(&[
            cr(1.0 / 2f64.sqrt()),
            cr(0.0),
            cr(0.0),
            cr(1.0 / 2f64.sqrt()),
        ]);
        State::pure(Algebra::quantum(&[2, 2]), &psi).unwrap()
    }

    #[test]
    fn algebra_dimensions_multiply() {
        let a = Algebra::new(vec![
            Factor { kind: FactorKind::Classical, dim: 3 },
            Factor { kind: FactorKind::Quantum, dim: 2 },
        ])
        .unwrap();
        assert_eq!(a.total_dim(), 6);
        assert_eq!(a.multi_index(5), vec![2, 1]);
    }

    #[test]
    fn classical_factor_rejects_off_diagonal_state() {
        let a = Algebra::classical(&[2]);
        let rho = ComplexMatrix::from_rows(&[
            vec![cr(0.5), cr(0.5)],
            vec![cr(0.5), cr(0.5)],
        ])
        .unwrap();
        assert!(State::new(a.clone(), rho).is_err());
        let diag = ComplexMatrix::real_diagonal(&[0.25, 0.75]);
        assert!(State::new(a, diag).is_ok());
    }

    #[test]
    fn restrict_of_bell_pair_is_maximally_mixed() {
        let s = bell_phi_plus();
        let halves = [restrict(&s, &[0]).unwrap(), restrict(&s, &[1]).unwrap()];
        for half in halves {
            assert!((half.density() - &ComplexMatrix::identity(2).scale(cr(0.5))).max_abs() < 1e-12);
        }
    }

    #[test]
    fn restrict_rejects_bad_subsets() {
        let s = bell_phi_plus();
        assert!(restrict(&s, &[]).is_err());
        assert!(restrict(&s, &[1, 0]).is_err());
        assert!(restrict(&s, &[2]).is_err());
    }

    #[test]
    fn restrict_keeps_positivity_and_trace() {
        let a = Algebra::quantum(&[2, 3]);
        let psi = {
            let mut entries = Vec::new();
            for k in 0..6 {
                entries.push(c(0.1 + 0.12 * k as f64, 0.05 * (k as f64 - 2.0)));
            }
            let v = ComplexMatrix::vector(&entries);
            let n = v.frobenius_norm();
            v.scale(cr(1.0 / n))
        };
        let s = State::pure(a, &psi).unwrap();
        let r = restrict(&s, &[1]).unwrap();
        assert!((r.density().trace().re - 1.0).abs() < 1e-12);
        assert!(r.density().min_eigenvalue() > -1e-12);
    }

    #[test]
    fn bloch_roundtrip() {
        let b = [0.3, -0.4, 0.5];
        let s = bloch_to_state(b).unwrap();
        let back = state_to_bloch(&s).unwrap();
        for k in 0..3 {
            assert!((b[k] - back[k]).abs() < 1e-12);
        }
        assert!(bloch_to_state([0.9, 0.9, 0.9]).is_err());
    }

    #[test]
    fn pure_states_sit_on_the_bloch_sphere() {
        let s = bloch_to_state([0.6, 0.0, 0.8]).unwrap();
        let b = state_to_bloch(&s).unwrap();
        let r = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_of_bell_pair_is_flat() {
        let s = bell_phi_plus();
        let (psi, _) = purify(&restrict(&s, &[0]).unwrap());
        let dec = schmidt(&psi, 2, 2).unwrap();
        assert_eq!(dec.rank(), 2);
        for ck in &dec.coefficients {
            assert!((ck - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        }
        assert!((&dec.reconstruct() - &psi).max_abs() < 1e-12);
    }

    #[test]
    fn schmidt_squares_match_marginal_spectrum() {
        let entries: Vec<C64> = (0..6)
            .map(|k| c(0.3 - 0.07 * k as f64, 0.02 * k as f64))
            .collect();
        let v = ComplexMatrix::vector(&entries);
        let n = v.frobenius_norm();
        let psi = v.scale(cr(1.0 / n));
        let dec = schmidt(&psi, 2, 3).unwrap();
        let s = State::pure(Algebra::quantum(&[2, 3]), &psi).unwrap();
        let marginal = restrict(&s, &[0]).unwrap();
        let (mut vals, _) = marginal.density().eigh();
        vals.reverse();
        for (k, ck) in dec.coefficients.iter().enumerate() {
            assert!((ck * ck - vals[k]).abs() < 1e-10);
        }
        assert!((&dec.reconstruct() - &psi).max_abs() < 1e-12);
    }

    #[test]
    fn purify_restricts_back() {
        let rho = ComplexMatrix::real_diagonal(&[0.5, 0.3, 0.2]);
        let s = State::new(Algebra::quantum(&[3]), rho).unwrap();
        let (psi, rank) = purify(&s);
        assert_eq!(rank, 3);
        let big = State::pure(Algebra::quantum(&[3, rank]), &psi).unwrap();
        let back = restrict(&big, &[0]).unwrap();
        assert!((back.density() - s.density()).max_abs() < 1e-12);
    }

    #[test]
    fn purify_uses_minimal_ancilla() {
        let rho = ComplexMatrix::real_diagonal(&[0.5, 0.5, 0.0]);
        let s = State::new(Algebra::quantum(&[3]), rho).unwrap();
        let (_, rank) = purify(&s);
        assert_eq!(rank, 2);
    }

    #[test]
    fn ppt_flags_bell_pair_and_passes_product() {
        let entangled = bell_phi_plus();
        match ppt_check(&entangled, 1).unwrap() {
            PptVerdict::FailedEntangled { min_eigenvalue } => {
                assert!((min_eigenvalue + 0.5).abs() < 1e-10)
            }
            PptVerdict::PassedInconclusive => panic!("Bell pair must fail the test"),
        }
        let product = product_state(
            &bloch_to_state([0.0, 0.0, 1.0]).unwrap(),
            &bloch_to_state([1.0, 0.0, 0.0]).unwrap(),
        );
        assert_eq!(ppt_check(&product, 1).unwrap(), PptVerdict::PassedInconclusive);
    }

    #[test]
    fn separable_mixture_passes_ppt() {
        let p = product_state(
            &bloch_to_state([0.0, 0.0, 1.0]).unwrap(),
            &bloch_to_state([0.0, 0.0, 1.0]).unwrap(),
        );
        let q = product_state(
            &bloch_to_state([0.0, 0.0, -1.0]).unwrap(),
            &bloch_to_state([0.0, 0.0, -1.0]).unwrap(),
        );
        let rho = p.density().scale(cr(0.5)) + q.density().scale(cr(0.5));
        let s = State::new(Algebra::quantum(&[2, 2]), rho).unwrap();
        assert_eq!(ppt_check(&s, 1).unwrap(), PptVerdict::PassedInconclusive);
    }

    #[test]
    fn effect_spectrum_is_clamped() {
        let a = Algebra::quantum(&[2]);
        assert!(Effect::new(a.clone(), ComplexMatrix::real_diagonal(&[0.5, 1.0])).is_ok());
        assert!(Effect::new(a.clone(), ComplexMatrix::real_diagonal(&[1.5, 0.0])).is_err());
        assert!(Effect::new(a, ComplexMatrix::real_diagonal(&[-0.1, 0.0])).is_err());
    }

    #[test]
    fn effect_complement_sums_to_identity() {
        let a = Algebra::quantum(&[2]);
        let e = Effect::new(a, ComplexMatrix::real_diagonal(&[0.7, 0.2])).unwrap();
        let sum = e.matrix().clone() + e.complement().matrix().clone();
        assert!(sum.is_identity(1e-12));
    }
}
