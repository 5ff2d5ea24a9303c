//! Tight teleportation and dense-coding schemes on `d`-dimensional systems
//! with `d^2` classical signals: construction from trace-orthogonal unitary
//! bases (Pauli, shift-and-clock, Latin-square/Hadamard designs) and
//! equation-level verification of both protocols.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, cr, ComplexMatrix, C64};
use crate::systems::{sigma_x, sigma_y, sigma_z};
use crate::EPS_ALG;

/// `d^{-1/2} sum_k e_k (x) e_k` as a `d^2 x 1` column.
pub fn max_entangled(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::InvalidDesign(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    let w = cr(1.0 / (d as f64).sqrt());
    let mut v = ComplexMatrix::zeros(d * d, 1);
    for k in 0..d {
        v.set(k * d + k, 0, w);
    }
    Ok(v)
}

/// The identity and the three Pauli matrices: the essentially unique
/// trace-orthogonal unitary basis in dimension 2.
pub fn pauli_basis() -> Vec<ComplexMatrix> {
    vec![ComplexMatrix::identity(2), sigma_x(), sigma_y(), sigma_z()]
}

/// Shift-and-clock basis `U_(a,b) = S^a C^b` with `S e_k = e_{k+1 mod d}` and
/// `C e_k = exp(2 pi i k / d) e_k`, ordered with the shift index outermost.
/// Trace-orthogonal in every dimension; for `d = 2` it is the Pauli basis up
/// to phases.
pub fn weyl_basis(d: usize) -> Result<Vec<ComplexMatrix>> {
    if d < 2 {
        return Err(Error::InvalidDesign(format!(
            "dimension must be at least 2, got {d}"
        )));
    }
    let tau = 2.0 * std::f64::consts::PI / d as f64;
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            out.push(ComplexMatrix::from_fn(d, d, |m, n| {
                if m == (n + a) % d {
                    c(0.0, tau * (b * n) as f64).exp()
                } else {
                    C64::ZERO
                }
            }));
        }
    }
    Ok(out)
}

/// `d x d` array whose rows and columns are each permutations of `0..d`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "LatinSquareJson", into = "LatinSquareJson")]
pub struct LatinSquare {
    rows: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct LatinSquareJson {
    order: usize,
    rows: Vec<Vec<usize>>,
}

impl LatinSquare {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::InvalidDesign("empty Latin square".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidDesign(format!(
                    "row {i} has length {}, expected {d}",
                    row.len()
                )));
            }
            let mut seen = vec![false; d];
            for &v in row {
                if v >= d || seen[v] {
                    return Err(Error::InvalidDesign(format!(
                        "row {i} is not a permutation of 0..{d}"
                    )));
                }
                seen[v] = true;
            }
        }
        for n in 0..d {
            let mut seen = vec![false; d];
            for row in &rows {
                let v = row[n];
                if seen[v] {
                    return Err(Error::InvalidDesign(format!(
                        "column {n} is not a permutation of 0..{d}"
                    )));
                }
                seen[v] = true;
            }
        }
        Ok(Self { rows })
    }

    /// Addition table `(i + n) mod d`.
    pub fn cyclic(d: usize) -> Self {
        let rows = (0..d).map(|i| (0..d).map(|n| (i + n) % d).collect()).collect();
        Self::new(rows).expect("addition table is a Latin square")
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, n: usize) -> usize {
        self.rows[i][n]
    }
}

impl TryFrom<LatinSquareJson> for LatinSquare {
    type Error = Error;

    fn try_from(j: LatinSquareJson) -> Result<Self> {
        if j.rows.len() != j.order {
            return Err(Error::InvalidDesign(format!(
                "declared order {} but {} rows",
                j.order,
                j.rows.len()
            )));
        }
        Self::new(j.rows)
    }
}

impl From<LatinSquare> for LatinSquareJson {
    fn from(ls: LatinSquare) -> Self {
        LatinSquareJson {
            order: ls.order(),
            rows: ls.rows,
        }
    }
}

/// `d` unitary `d x d` matrices all of whose entries have modulus `d^{-1/2}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "HadamardSetJson", into = "HadamardSetJson")]
pub struct HadamardSet {
    mats: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct HadamardSetJson {
    mats: Vec<ComplexMatrix>,
}

impl HadamardSet {
    pub fn new(mats: Vec<ComplexMatrix>) -> Result<Self> {
        let d = mats.len();
        if d == 0 {
            return Err(Error::InvalidDesign("empty Hadamard set".into()));
        }
        let modulus = 1.0 / (d as f64).sqrt();
        for (i, h) in mats.iter().enumerate() {
            if h.rows() != d || h.cols() != d {
                return Err(Error::InvalidDesign(format!(
                    "matrix {i} is {}x{}, expected {d}x{d}",
                    h.rows(),
                    h.cols()
                )));
            }
            let gram_dev = (&(&h.adjoint() * h) - &ComplexMatrix::identity(d)).max_abs();
            if gram_dev > EPS_ALG {
                return Err(Error::InvalidDesign(format!(
                    "matrix {i} is not unitary, deviation {gram_dev:.3e}"
                )));
            }
            for r in 0..d {
                for col in 0..d {
                    let dev = (h[(r, col)].norm() - modulus).abs();
                    if dev > EPS_ALG {
                        return Err(Error::InvalidDesign(format!(
                            "matrix {i} entry ({r},{col}) has modulus deviating by {dev:.3e}"
                        )));
                    }
                }
            }
        }
        Ok(Self { mats })
    }

    /// `d` copies of the unitary Fourier matrix `d^{-1/2} exp(2 pi i jk / d)`.
    pub fn fourier(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDesign("empty Hadamard set".into()));
        }
        let tau = 2.0 * std::f64::consts::PI / d as f64;
        let scale = 1.0 / (d as f64).sqrt();
        let f = ComplexMatrix::from_fn(d, d, |j, k| c(0.0, tau * (j * k) as f64).exp() * cr(scale));
        Self::new(vec![f; d])
    }

    pub fn order(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[ComplexMatrix] {
        &self.mats
    }
}

impl TryFrom<HadamardSetJson> for HadamardSet {
    type Error = Error;

    fn try_from(j: HadamardSetJson) -> Result<Self> {
        Self::new(j.mats)
    }
}

impl From<HadamardSet> for HadamardSetJson {
    fn from(hs: HadamardSet) -> Self {
        HadamardSetJson { mats: hs.mats }
    }
}

fn trace_orthogonality_deviation(unitaries: &[ComplexMatrix], d: usize) -> (f64, usize, usize) {
    let mut worst = (0.0f64, 0, 0);
    for (x, ux) in unitaries.iter().enumerate() {
        for (y, uy) in unitaries.iter().enumerate() {
            let target = if x == y { cr(d as f64) } else { C64::ZERO };
            let dev = (ux.hs_inner(uy) - target).norm();
            if dev > worst.0 {
                worst = (dev, x, y);
            }
        }
    }
    worst
}

/// Unitary basis `(U_(i,j))_{m,n} = sqrt(d) H^(i)_{j,n} delta_{m, L(i,n)}`
/// from a Latin square `L` and a Hadamard set `H` of the same order. Row `i`
/// of the square scatters column phases taken from row `j` of `H^(i)`; the
/// square's column-distinctness kills cross terms between different `i`, and
/// row-orthogonality of each `H^(i)` separates different `j`. The
/// trace-orthogonality of the result is verified, not assumed.
pub fn basis_from_design(ls: &LatinSquare, hs: &HadamardSet) -> Result<Vec<ComplexMatrix>> {
    let d = ls.order();
    if hs.order() != d {
        return Err(Error::InvalidDesign(format!(
            "Latin square order {d} but Hadamard set order {}",
            hs.order()
        )));
    }
    let scale = cr((d as f64).sqrt());
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let h = &hs.mats()[i];
            out.push(ComplexMatrix::from_fn(d, d, |m, n| {
                if m == ls.entry(i, n) {
                    h[(j, n)] * scale
                } else {
                    C64::ZERO
                }
            }));
        }
    }
    let (dev, x, y) = trace_orthogonality_deviation(&out, d);
    if dev > 1e-10 {
        return Err(Error::InvalidDesign(format!(
            "constructed basis fails trace orthogonality at pair ({x},{y}), deviation {dev:.3e}"
        )));
    }
    Ok(out)
}

/// Tight scheme data: a shared entangled vector `omega` on `C^d (x) C^d`,
/// `d^2` unitaries `U_x`, and the derived measurement vectors
/// `Phi_x = (U_x (x) 1) omega`. The same data run teleportation (Alice
/// measures `{Phi_x}`, Bob corrects with `U_x`) and dense coding (Alice
/// encodes with `U_x`, Bob measures `{Phi_x}`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SchemeJson", into = "SchemeJson")]
pub struct TeleportationScheme {
    d: usize,
    omega: ComplexMatrix,
    unitaries: Vec<ComplexMatrix>,
    effects: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct SchemeJson {
    d: usize,
    omega: Vec<[f64; 2]>,
    unitaries: Vec<ComplexMatrix>,
}

/// Deviations from the structural conditions a working tight scheme must
/// satisfy. All fields are worst-case absolute residuals.
#[derive(Clone, Debug, Serialize)]
pub struct SchemeInvariants {
    /// `| ||omega|| - 1 |`.
    pub omega_norm: f64,
    /// Largest gap between a Schmidt coefficient of `omega` and `d^{-1/2}`.
    pub schmidt_flatness: f64,
    /// Worst `max_abs(U* U - 1)` over the basis.
    pub unitarity: f64,
    /// Worst `|tr(U_x* U_y) - d delta_xy|` over all pairs.
    pub trace_orthogonality: f64,
    /// Worst `|<Phi_x, Phi_y> - delta_xy|` over all pairs.
    pub effect_gram: f64,
    /// `max_abs(sum_x |Phi_x><Phi_x| - 1)`.
    pub effect_completeness: f64,
}

impl SchemeInvariants {
    pub fn max_deviation(&self) -> f64 {
        [
            self.omega_norm,
            self.schmidt_flatness,
            self.unitarity,
            self.trace_orthogonality,
            self.effect_gram,
            self.effect_completeness,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl TeleportationScheme {
    /// Builds the scheme determined by a trace-orthogonal unitary basis and
    /// the canonical maximally entangled vector. Rejects inputs that are not
    /// unitary or not trace-orthogonal.
    pub fn build(unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        let d = match unitaries.first() {
            Some(u) if u.is_square() && u.rows() >= 2 => u.rows(),
            _ => {
                return Err(Error::InvalidScheme(
                    "need square unitaries of dimension at least 2".into(),
                ))
            }
        };
        if unitaries.len() != d * d {
            return Err(Error::InvalidScheme(format!(
                "need {} unitaries for dimension {d}, got {}",
                d * d,
                unitaries.len()
            )));
        }
        for (x, u) in unitaries.iter().enumerate() {
            if u.rows() != d || u.cols() != d {
                return Err(Error::InvalidScheme(format!(
                    "unitary {x} is {}x{}, expected {d}x{d}",
                    u.rows(),
                    u.cols()
                )));
            }
            let dev = (&(&u.adjoint() * u) - &ComplexMatrix::identity(d)).max_abs();
            if dev > EPS_ALG {
                return Err(Error::InvalidScheme(format!(
                    "matrix {x} is not unitary, deviation {dev:.3e}"
                )));
            }
        }
        let (dev, x, y) = trace_orthogonality_deviation(&unitaries, d);
        if dev > EPS_ALG {
            return Err(Error::InvalidScheme(format!(
                "unitaries fail trace orthogonality at pair ({x},{y}), deviation {dev:.3e}"
            )));
        }
        Self::from_parts(d, max_entangled(d)?, unitaries)
    }

    /// Assembles a scheme from raw parts with shape checks only, so that
    /// corrupted data can be loaded and then examined by the verify
    /// operations. The measurement vectors are recomputed as
    /// `(U_x (x) 1) omega`.
    pub fn from_parts(d: usize, omega: ComplexMatrix, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidScheme(format!(
                "dimension must be at least 2, got {d}"
            )));
        }
        if omega.rows() != d * d || omega.cols() != 1 {
            return Err(Error::InvalidScheme(format!(
                "omega is {}x{}, expected {}x1",
                omega.rows(),
                omega.cols(),
                d * d
            )));
        }
        if unitaries.len() != d * d {
            return Err(Error::InvalidScheme(format!(
                "need {} unitaries for dimension {d}, got {}",
                d * d,
                unitaries.len()
            )));
        }
        for (x, u) in unitaries.iter().enumerate() {
            if u.rows() != d || u.cols() != d {
                return Err(Error::InvalidScheme(format!(
                    "unitary {x} is {}x{}, expected {d}x{d}",
                    u.rows(),
                    u.cols()
                )));
            }
        }
        let w = ComplexMatrix::unvec(&omega, d, d);
        let effects = unitaries.iter().map(|u| (u * &w).vec()).collect();
        Ok(Self {
            d,
            omega,
            unitaries,
            effects,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    /// Measurement vectors `Phi_x = (U_x (x) 1) omega`.
    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    fn omega_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::unvec(&self.omega, self.d, self.d)
    }

    fn effect_matrices(&self) -> Vec<ComplexMatrix> {
        self.effects
            .iter()
            .map(|phi| ComplexMatrix::unvec(phi, self.d, self.d))
            .collect()
    }

    fn effect_completeness(&self) -> f64 {
        let d = self.d;
        let mut sum = ComplexMatrix::zeros(d * d, d * d);
        for phi in &self.effects {
            sum = &sum + &(phi * &phi.adjoint());
        }
        (&sum - &ComplexMatrix::identity(d * d)).max_abs()
    }

    /// Residuals of the structural conditions; a valid scheme has
    /// `max_deviation()` at numerical zero.
    pub fn invariants(&self) -> SchemeInvariants {
        let d = self.d;
        let flat = 1.0 / (d as f64).sqrt();
        let svd = self.omega_matrix().svd();
        let mut schmidt_flatness = 0.0f64;
        for k in 0..d {
            let s = svd.s.get(k).copied().unwrap_or(0.0);
            schmidt_flatness = schmidt_flatness.max((s - flat).abs());
        }
        let mut unitarity = 0.0f64;
        for u in &self.unitaries {
            unitarity = unitarity
                .max((&(&u.adjoint() * u) - &ComplexMatrix::identity(d)).max_abs());
        }
        let (trace_orthogonality, _, _) = trace_orthogonality_deviation(&self.unitaries, d);
        let mut effect_gram = 0.0f64;
        for (x, px) in self.effects.iter().enumerate() {
            for (y, py) in self.effects.iter().enumerate() {
                let target = if x == y { cr(1.0) } else { C64::ZERO };
                effect_gram = effect_gram.max((px.hs_inner(py) - target).norm());
            }
        }
        let effect_completeness = self.effect_completeness();
        SchemeInvariants {
            omega_norm: (self.omega.frobenius_norm() - 1.0).abs(),
            schmidt_flatness,
            unitarity,
            trace_orthogonality,
            effect_gram,
            effect_completeness,
        }
    }

    /// Worst-case teleportation error over a spanning set of inputs and
    /// output observables: Alice measures `{Phi_x}` on her input together
    /// with her half of `omega`, Bob conjugates by `U_x`. For matrix units
    /// `rho = e_(mu,nu)` and `A = e_(alpha,beta)` the summed outcome
    /// probability must reproduce `tr(rho A)`; returns the largest absolute
    /// deviation. The sum is an outcome average only when the signal family
    /// is a complete measurement, so `max_abs(sum_x F_x - 1)` enters the
    /// residual as well; without it, any unitaries with derived `Phi_x`
    /// satisfy the summed equation term by term.
    pub fn verify_teleportation(&self) -> f64 {
        let d = self.d;
        let w = self.omega_matrix();
        let wc = w.conjugate();
        let gs = self.effect_matrices();
        // Per signal x the term tr[(rho (x) omega)(F_x (x) U_x* A U_x)]
        // contracts to M_x[nu, alpha] N_x[beta, mu] with the matrices below.
        let mut sum = vec![C64::ZERO; d * d * d * d];
        for (x, g) in gs.iter().enumerate() {
            let u = &self.unitaries[x];
            let m = &(g * &wc) * &u.adjoint();
            let n = u * &(&g.conjugate() * &w).transpose();
            for nu in 0..d {
                for alpha in 0..d {
                    for beta in 0..d {
                        for mu in 0..d {
                            sum[((nu * d + alpha) * d + beta) * d + mu] +=
                                m[(nu, alpha)] * n[(beta, mu)];
                        }
                    }
                }
            }
        }
        let mut residual = 0.0f64;
        for nu in 0..d {
            for alpha in 0..d {
                for beta in 0..d {
                    for mu in 0..d {
                        let target = if nu == alpha && beta == mu {
                            cr(1.0)
                        } else {
                            C64::ZERO
                        };
                        let dev = (sum[((nu * d + alpha) * d + beta) * d + mu] - target).norm();
                        residual = residual.max(dev);
                    }
                }
            }
        }
        residual.max(self.effect_completeness())
    }

    /// Worst-case dense-coding error: Alice encodes `x` by conjugating her
    /// half of `omega` with `U_x`, Bob measures `{Phi_y}`; the outcome
    /// distribution must be `delta_xy`. Returns
    /// `max_xy | |<Phi_y, (U_x (x) 1) omega>|^2 - delta_xy |`.
    pub fn verify_dense_coding(&self) -> f64 {
        let w = self.omega_matrix();
        let gs = self.effect_matrices();
        let mut residual = 0.0f64;
        for (x, u) in self.unitaries.iter().enumerate() {
            let encoded = u * &w;
            for (y, g) in gs.iter().enumerate() {
                let p = g.hs_inner(&encoded).norm_sqr();
                let target = if x == y { 1.0 } else { 0.0 };
                residual = residual.max((p - target).abs());
            }
        }
        residual
    }
}

impl TryFrom<SchemeJson> for TeleportationScheme {
    type Error = Error;

    fn try_from(j: SchemeJson) -> Result<Self> {
        let mut omega = ComplexMatrix::zeros(j.omega.len(), 1);
        for (k, [re, im]) in j.omega.iter().enumerate() {
            omega.set(k, 0, c(*re, *im));
        }
        Self::from_parts(j.d, omega, j.unitaries)
    }
}

impl From<TeleportationScheme> for SchemeJson {
    fn from(s: TeleportationScheme) -> Self {
        let omega = (0..s.omega.rows())
            .map(|k| {
                let z = s.omega[(k, 0)];
                [z.re, z.im]
            })
            .collect();
        SchemeJson {
            d: s.d,
            omega,
            unitaries: s.unitaries,
        }
    }
}

/// Least-squares fit of the overlap form
/// `<phi (x) omega1, omega2 (x) psi> = lambda <phi, psi>` over all
/// `phi, psi` in the `dim_h`-dimensional middle space. The form always
/// equals `phi* M psi` for one matrix `M`; `lambda` is the best scalar fit
/// and `residual` the worst entry of `M - lambda 1`.
#[derive(Clone, Debug)]
pub struct OverlapReport {
    /// True when the scalar identity holds to numerical precision.
    pub exists: bool,
    pub lambda: C64,
    pub residual: f64,
}

pub fn overlap_lambda(
    omega1: &ComplexMatrix,
    omega2: &ComplexMatrix,
    dim_h: usize,
) -> Result<OverlapReport> {
    if omega1.cols() != 1 || omega2.cols() != 1 || omega1.rows() != omega2.rows() {
        return Err(Error::DimensionMismatch(format!(
            "expected equal-length column vectors, got {}x{} and {}x{}",
            omega1.rows(),
            omega1.cols(),
            omega2.rows(),
            omega2.cols()
        )));
    }
    let len = omega1.rows();
    if dim_h == 0 || !len.is_multiple_of(dim_h) {
        return Err(Error::DimensionMismatch(format!(
            "length {len} is not a multiple of the middle dimension {dim_h}"
        )));
    }
    let dim_k = len / dim_h;
    for (name, v) in [("first", omega1), ("second", omega2)] {
        let norm = v.frobenius_norm();
        if (norm - 1.0).abs() > EPS_ALG {
            return Err(Error::InvalidState(format!(
                "{name} vector has norm {norm:.9}, expected 1"
            )));
        }
    }
    let w1 = ComplexMatrix::unvec(omega1, dim_k, dim_h);
    let w2 = ComplexMatrix::unvec(omega2, dim_h, dim_k);
    let m = &w2 * &w1.conjugate();
    let lambda = m.trace() / cr(dim_h as f64);
    let residual = (&m - &ComplexMatrix::identity(dim_h).scale(lambda)).max_abs();
    Ok(OverlapReport {
        exists: residual <= EPS_ALG,
        lambda,
        residual,
    })
}

/// Residuals linking a candidate reduced state to a unitary basis: a basis
/// can be orthonormal for the scalar product weighted by `omega1` only when
/// `omega1` is the flat state `1/d`.
#[derive(Clone, Debug)]
pub struct StateIndependenceReport {
    /// Worst `|tr(omega1 U_x* U_y) - delta_xy|`.
    pub skew_residual: f64,
    /// `max_abs(omega1 - 1/d)`.
    pub identity_residual: f64,
}

pub fn check_state_independence(
    unitaries: &[ComplexMatrix],
    omega1: &ComplexMatrix,
) -> Result<StateIndependenceReport> {
    let d = match unitaries.first() {
        Some(u) if u.is_square() => u.rows(),
        _ => {
            return Err(Error::DimensionMismatch(
                "need at least one square unitary".into(),
            ))
        }
    };
    if unitaries.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "need {} unitaries for dimension {d}, got {}",
            d * d,
            unitaries.len()
        )));
    }
    if omega1.rows() != d || omega1.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "reduced state is {}x{}, expected {d}x{d}",
            omega1.rows(),
            omega1.cols()
        )));
    }
    let mut skew = 0.0f64;
    for (x, ux) in unitaries.iter().enumerate() {
        for (y, uy) in unitaries.iter().enumerate() {
            let val = (omega1 * &(&ux.adjoint() * uy)).trace();
            let target = if x == y { cr(1.0) } else { C64::ZERO };
            skew = skew.max((val - target).norm());
        }
    }
    let identity_residual =
        (omega1 - &ComplexMatrix::identity(d).scale(cr(1.0 / d as f64))).max_abs();
    Ok(StateIndependenceReport {
        skew_residual: skew,
        identity_residual,
    })
}
