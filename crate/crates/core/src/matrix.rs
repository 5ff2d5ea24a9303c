//! Dense complex matrices and the decompositions the rest of the crate
//! builds on: Hermitian eigendecomposition, SVD, QR-style basis completion,
//! Kronecker products and operator norms.
//!
//! The JSON form of a matrix is `{"rows":r,"cols":c,"data":[[re,im],...]}`
//! with `data` listing entries row-major.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    m: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            m: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        Self {
            m: DMatrix::from_fn(rows, cols, f),
        }
    }

    /// Row-major list of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self::from_fn(entries.len(), entries.len(), |i, j| {
            if i == j {
                entries[i]
            } else {
                C64::ZERO
            }
        })
    }

    pub fn real_diagonal(entries: &[f64]) -> Self {
        let entries: Vec<C64> = entries.iter().map(|&x| cr(x)).collect();
        Self::diagonal(&entries)
    }

    /// Column vector.
    pub fn vector(entries: &[C64]) -> Self {
        Self::from_fn(entries.len(), 1, |i, _| entries[i])
    }

    /// Standard basis column vector `e_k` in dimension `n`.
    pub fn basis_vector(n: usize, k: usize) -> Self {
        Self::from_fn(n, 1, |i, _| if i == k { C64::ONE } else { C64::ZERO })
    }

    /// Matrix unit `|i><j|` in dimension `n`.
    pub fn matrix_unit(n: usize, i: usize, j: usize) -> Self {
        Self::from_fn(n, n, |a, b| {
            if a == i && b == j {
                C64::ONE
            } else {
                C64::ZERO
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.m[(i, j)] = v;
    }

    pub(crate) fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            m: self.m.map(|z| z.conj()),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { m: &self.m * s }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// Hilbert-Schmidt inner product `tr(A* B)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        let mut acc = C64::ZERO;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                acc += self.m[(i, j)].conj() * other.m[(i, j)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.hs_inner(self).re.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.svd().s.first().copied().unwrap_or(0.0)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && (self - &self.adjoint()).max_abs() <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.is_square() && (self - &Self::identity(self.rows())).max_abs() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (&self.adjoint() * self).is_identity(tol)
    }

    /// Isometry check: columns orthonormal, `V* V = 1`.
    pub fn is_isometry(&self, tol: f64) -> bool {
        (&self.adjoint() * self).is_identity(tol)
    }

    /// Eigendecomposition of a Hermitian matrix. The input is symmetrized
    /// first so that tiny Hermiticity violations do not poison the result.
    /// Returns eigenvalues in ascending order and the matching eigenvectors
    /// as columns, each with its largest component rotated to the positive
    /// real axis so repeated runs agree bit for bit.
    pub fn eigh(&self) -> (Vec<f64>, ComplexMatrix) {
        assert!(self.is_square(), "eigh requires a square matrix");
        let n = self.rows();
        let herm = (&self.m + self.m.adjoint()) * cr(0.5);
        let eig = herm.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let col = eig.eigenvectors.column(src);
            let phase = dominant_phase(col.iter());
            for i in 0..n {
                vectors[(i, dst)] = col[i] * phase;
            }
        }
        (values, Self { m: vectors })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigh().0.first().copied().unwrap_or(0.0)
    }

    /// Positive semidefinite within `tol`: Hermitian and smallest eigenvalue
    /// above `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    /// Singular value decomposition `A = U diag(s) Vt` with singular values
    /// sorted in descending order. Computed by one-sided Jacobi rotations,
    /// which stay accurate on the degenerate and rank-deficient matrices the
    /// iterative optimizers produce.
    pub fn svd(&self) -> Svd {
        let (m, n) = (self.rows(), self.cols());
        if m < n {
            let t = self.adjoint().svd();
            return Svd {
                u: t.vt.adjoint(),
                s: t.s,
                vt: t.u.adjoint(),
            };
        }
        // Rotate pairs of columns of `a` until they are mutually orthogonal;
        // `v` accumulates the rotations so that `a = self * v` throughout.
        let mut a = self.m.clone();
        let mut v = DMatrix::<C64>::identity(n, n);
        for _ in 0..60 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let mut app = 0.0;
                    let mut aqq = 0.0;
                    let mut apq = C64::ZERO;
                    for i in 0..m {
                        app += a[(i, p)].norm_sqr();
                        aqq += a[(i, q)].norm_sqr();
                        apq += a[(i, p)].conj() * a[(i, q)];
                    }
                    let h = apq.norm();
                    if h == 0.0 || h <= 1e-15 * (app * aqq).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let phase = apq / cr(h);
                    let theta = 0.5 * (2.0 * h).atan2(app - aqq);
                    let (ct, st) = (theta.cos(), theta.sin());
                    let cq = phase.conj() * ct;
                    let sq = phase.conj() * st;
                    for i in 0..m {
                        let (x, y) = (a[(i, p)], a[(i, q)]);
                        a[(i, p)] = x * cr(ct) + y * sq;
                        a[(i, q)] = y * cq - x * cr(st);
                    }
                    for i in 0..n {
                        let (x, y) = (v[(i, p)], v[(i, q)]);
                        v[(i, p)] = x * cr(ct) + y * sq;
                        v[(i, q)] = y * cq - x * cr(st);
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let norms: Vec<f64> = (0..n)
            .map(|j| a.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
        let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
        let vt = Self::from_fn(n, n, |r, c| v[(c, order[r])].conj());
        let mut good: Vec<ComplexMatrix> = Vec::new();
        let mut pending: Vec<usize> = Vec::new();
        let mut u = Self::zeros(m, n);
        for (slot, &j) in order.iter().enumerate() {
            if norms[j] > 0.0 {
                let col = Self::from_fn(m, 1, |i, _| a[(i, j)] / cr(norms[j]));
                for i in 0..m {
                    u.set(i, slot, col[(i, 0)]);
                }
                good.push(col);
            } else {
                pending.push(slot);
            }
        }
        if !pending.is_empty() {
            let full = Self::complete_orthonormal(&good, m)
                .expect("jacobi svd: column completion");
            for (extra, slot) in pending.into_iter().enumerate() {
                for i in 0..m {
                    u.set(i, slot, full[(i, good.len() + extra)]);
                }
            }
        }
        Svd { u, s, vt }
    }

    /// Least-squares solution of `self * x = rhs` via the pseudoinverse.
    pub fn lstsq(&self, rhs: &Self, rank_cutoff: f64) -> Self {
        let svd = self.svd();
        let smax = svd.s.first().copied().unwrap_or(0.0);
        let mut x = ComplexMatrix::zeros(self.cols(), rhs.cols());
        for (k, &sk) in svd.s.iter().enumerate() {
            if sk <= rank_cutoff * smax.max(1.0) {
                continue;
            }
            // x += v_k (u_k* rhs) / s_k
            for j in 0..rhs.cols() {
                let mut coeff = C64::ZERO;
                for i in 0..self.rows() {
                    coeff += svd.u.m[(i, k)].conj() * rhs.m[(i, j)];
                }
                coeff /= cr(sk);
                for i in 0..self.cols() {
                    let v_ik = svd.vt.m[(k, i)].conj();
                    x.m[(i, j)] += v_ik * coeff;
                }
            }
        }
        x
    }

    /// Row-major flattening into a column vector.
    pub fn vec(&self) -> Self {
        let (r, cs) = (self.rows(), self.cols());
        Self::from_fn(r * cs, 1, |k, _| self.m[(k / cs, k % cs)])
    }

    /// Inverse of [`ComplexMatrix::vec`].
    pub fn unvec(v: &Self, rows: usize, cols: usize) -> Self {
        assert_eq!(v.cols(), 1, "unvec expects a column vector");
        assert_eq!(v.rows(), rows * cols, "unvec length mismatch");
        Self::from_fn(rows, cols, |i, j| v.m[(i * cols + j, 0)])
    }

    /// Extends a set of orthonormal columns to a full unitary, deterministic
    /// Gram-Schmidt over the standard basis.
    pub fn complete_orthonormal(start: &[ComplexMatrix], dim: usize) -> Result<ComplexMatrix> {
        let mut cols: Vec<DMatrix<C64>> = Vec::with_capacity(dim);
        for (idx, v) in start.iter().enumerate() {
            if v.rows() != dim || v.cols() != 1 {
                return Err(Error::DimensionMismatch(format!(
                    "basis completion: column {idx} has shape {}x{}, expected {dim}x1",
                    v.rows(),
                    v.cols()
                )));
            }
            cols.push(v.m.clone());
        }
        for k in 0..dim {
            if cols.len() == dim {
                break;
            }
            let mut cand: DMatrix<C64> = DMatrix::zeros(dim, 1);
            cand[(k, 0)] = C64::ONE;
            for c in &cols {
                let overlap: C64 = c.iter().zip(cand.iter()).map(|(a, b)| a.conj() * b).sum();
                cand -= c * overlap;
            }
            let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-7 {
                cols.push(cand / cr(norm));
            }
        }
        if cols.len() != dim {
            return Err(Error::Numerical(
                "basis completion failed: starting columns not independent".into(),
            ));
        }
        Ok(Self::from_fn(dim, dim, |i, j| cols[j][(i, 0)]))
    }
}

/// Rotates so the largest-magnitude entry becomes real positive.
fn dominant_phase<'a>(entries: impl Iterator<Item = &'a C64>) -> C64 {
    let mut best = C64::ZERO;
    let mut best_norm = 0.0;
    for &z in entries {
        let n = z.norm();
        if n > best_norm {
            best_norm = n;
            best = z;
        }
    }
    if best_norm > 0.0 {
        best.conj() / cr(best_norm)
    } else {
        C64::ONE
    }
}

pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub vt: ComplexMatrix,
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.m[idx]
    }
}

macro_rules! binop {
    ($trait:ident, $fn:ident, $op:tt) => {
        impl $trait for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $fn(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix { m: &self.m $op &rhs.m }
            }
        }
        impl $trait for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $fn(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix { m: self.m $op rhs.m }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            m: &self.m * &rhs.m,
        }
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { m: self.m * rhs.m }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { m: -self.m.clone() }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut data = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let z = self.m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        MatrixJson {
            rows: self.rows(),
            cols: self.cols(),
            data,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(de)?;
        if raw.rows == 0 || raw.cols == 0 {
            return Err(D::Error::custom("matrix must have positive dimensions"));
        }
        if raw.data.len() != raw.rows * raw.cols {
            return Err(D::Error::custom(format!(
                "matrix data length {} does not match {}x{}",
                raw.data.len(),
                raw.rows,
                raw.cols
            )));
        }
        Ok(Self::from_fn(raw.rows, raw.cols, |i, j| {
            let [re, im] = raw.data[i * raw.cols + j];
            c(re, im)
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, -2.0)],
            vec![c(0.0, 2.0), c(3.0, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn eigh_recomposes_and_sorts() {
        let h = sample();
        let (vals, vecs) = h.eigh();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let rebuilt = &(&vecs * &ComplexMatrix::real_diagonal(&vals)) * &vecs.adjoint();
        assert!((&rebuilt - &h).max_abs() < 1e-12);
        assert!(vecs.is_unitary(1e-12));
    }

    #[test]
    fn svd_recomposes_sorted_descending() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.3, 1.0), c(-0.2, 0.0), c(2.0, -0.5)],
            vec![c(0.0, 0.0), c(1.5, 0.7), c(-1.0, 0.2)],
        ])
        .unwrap();
        let svd = a.svd();
        assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
        let rebuilt = &(&svd.u * &ComplexMatrix::real_diagonal(&svd.s)) * &svd.vt;
        assert!((&rebuilt - &a).max_abs() < 1e-12);
    }

    #[test]
    fn operator_norm_matches_top_singular_value() {
        let a = sample();
        let svd = a.svd();
        assert!((a.operator_norm() - svd.s[0]).abs() < 1e-12);
    }

    #[test]
    fn vec_unvec_roundtrip() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0)],
            vec![c(7.0, 8.0), c(9.0, 10.0), c(11.0, 12.0)],
        ])
        .unwrap();
        let v = a.vec();
        assert_eq!(v[(1, 0)], c(3.0, 4.0));
        assert_eq!(ComplexMatrix::unvec(&v, 2, 3), a);
    }

    #[test]
    fn kron_indexing() {
        let a = ComplexMatrix::from_rows(&[vec![cr(1.0), cr(2.0)], vec![cr(3.0), cr(4.0)]]).unwrap();
        let b = ComplexMatrix::identity(2);
        let k = a.kron(&b);
        assert_eq!(k[(0, 0)], cr(1.0));
        assert_eq!(k[(0, 2)], cr(2.0));
        assert_eq!(k[(1, 3)], cr(2.0));
        assert_eq!(k[(2, 0)], cr(3.0));
    }

    #[test]
    fn json_roundtrip_row_major() {
        let a = sample();
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.starts_with(r#"{"rows":2,"cols":2,"data":[[1.0,0.0],[0.0,-2.0]"#));
        let b: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
    }

    #[test]
    fn basis_completion_is_unitary() {
        let v = ComplexMatrix::vector(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let u = ComplexMatrix::complete_orthonormal(std::slice::from_ref(&v), 2).unwrap();
        assert!(u.is_unitary(1e-12));
        assert!((&u.adjoint() * &v).max_abs() > 0.0);
    }

    #[test]
    fn lstsq_solves_consistent_system() {
        let a = sample();
        let x = ComplexMatrix::vector(&[c(1.0, -1.0), c(0.5, 2.0)]);
        let b = &a * &x;
        let got = a.lstsq(&b, 1e-12);
        assert!((&got - &x).max_abs() < 1e-10);
    }

    fn svd_is_consistent(x: &ComplexMatrix) {
        let svd = x.svd();
        let k = svd.s.len();
        assert_eq!(k, x.rows().min(x.cols()));
        let recon = &(&svd.u * &ComplexMatrix::real_diagonal(&svd.s)) * &svd.vt;
        assert!((&recon - x).max_abs() < 1e-11);
        assert!((&svd.u.adjoint() * &svd.u - ComplexMatrix::identity(k)).max_abs() < 1e-11);
        assert!((&svd.vt * &svd.vt.adjoint() - ComplexMatrix::identity(k)).max_abs() < 1e-11);
        assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
        assert!(svd.s.iter().all(|&s| s >= 0.0));
    }

    #[test]
    fn svd_reconstructs_degenerate_and_rank_deficient_matrices() {
        let mut r = crate::random::rng(7);
        svd_is_consistent(&crate::random::ginibre(&mut r, 4, 4));
        svd_is_consistent(&crate::random::ginibre(&mut r, 5, 3));
        svd_is_consistent(&crate::random::ginibre(&mut r, 3, 5));
        svd_is_consistent(&ComplexMatrix::zeros(4, 4));
        svd_is_consistent(&ComplexMatrix::identity(4));
        let g = crate::random::ginibre(&mut r, 4, 1);
        svd_is_consistent(&(&g * &g.adjoint()));
        // rank-one with a fully degenerate null space, padded by shrinking
        // noise: the family that makes naive bidiagonalization drift
        let ones = ComplexMatrix::from_fn(4, 4, |i, j| {
            if (i == 0 || i == 3) && (j == 0 || j == 3) {
                cr(0.5)
            } else {
                C64::ZERO
            }
        });
        for t in 0..6 {
            let eps = 10f64.powi(-2 * t);
            let noisy = &ones.scale(cr(4.0)) + &crate::random::ginibre(&mut r, 4, 4).scale(cr(eps));
            svd_is_consistent(&noisy);
        }
    }

    #[test]
    fn svd_resolves_tiny_singular_values() {
        let mut r = crate::random::rng(12);
        let d = ComplexMatrix::real_diagonal(&[1.0, 1e-9, 1e-13, 0.0]);
        let u = crate::random::haar_unitary(&mut r, 4);
        let w = crate::random::haar_unitary(&mut r, 4);
        let svd = (&(&u * &d) * &w).svd();
        assert!((svd.s[0] - 1.0).abs() < 1e-12);
        assert!((svd.s[1] - 1e-9).abs() < 1e-16);
        assert!((svd.s[2] - 1e-13).abs() < 1e-16);
        assert!(svd.s[3] < 1e-15);
    }
}
