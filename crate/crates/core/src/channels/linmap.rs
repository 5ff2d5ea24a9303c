//! Linear maps between matrix algebras in transfer-matrix form, used for
//! complete-positivity tests and norm computations. A map from `M_din` to
//! `M_dout` is stored as the `dout^2 x din^2` matrix acting on row-major
//! vectorizations.

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, C64};
use crate::EPS_ALG;

use super::KrausMap;

#[derive(Clone, Debug)]
pub struct LinearMap {
    dim_in: usize,
    dim_out: usize,
    t: ComplexMatrix,
}

impl LinearMap {
    /// Builds the transfer matrix column by column from the action on matrix
    /// units.
    pub fn from_action(
        dim_in: usize,
        dim_out: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Self {
        let mut t = ComplexMatrix::zeros(dim_out * dim_out, dim_in * dim_in);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let image = f(&ComplexMatrix::matrix_unit(dim_in, i, j));
                assert_eq!(image.rows(), dim_out, "map image has wrong dimension");
                let col = image.vec();
                for r in 0..dim_out * dim_out {
                    t.set(r, i * dim_in + j, col[(r, 0)]);
                }
            }
        }
        Self { dim_in, dim_out, t }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(a.rows(), self.dim_in);
        assert_eq!(a.cols(), self.dim_in);
        ComplexMatrix::unvec(&(&self.t * &a.vec()), self.dim_out, self.dim_out)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            t: ComplexMatrix::identity(d * d),
        }
    }

    /// The transposition map `A -> A^T` on `M_d`.
    pub fn transpose_map(d: usize) -> Self {
        Self::from_action(d, d, |e| e.transpose())
    }

    /// Schrodinger action of a Kraus map.
    pub fn schrodinger(map: &KrausMap) -> Self {
        Self::from_action(map.in_dim(), map.out_dim(), |e| map.apply_schrodinger(e))
    }

    /// Heisenberg action of a Kraus map (observables flow backwards).
    pub fn heisenberg(map: &KrausMap) -> Self {
        Self::from_action(map.out_dim(), map.in_dim(), |e| map.apply_heisenberg(e))
    }

    /// `self` after `inner`.
    pub fn compose(&self, inner: &LinearMap) -> Self {
        assert_eq!(inner.dim_out, self.dim_in, "composition dimension mismatch");
        Self {
            dim_in: inner.dim_in,
            dim_out: self.dim_out,
            t: &self.t * &inner.t,
        }
    }

    pub fn sub(&self, other: &LinearMap) -> Self {
        assert_eq!(self.dim_in, other.dim_in);
        assert_eq!(self.dim_out, other.dim_out);
        Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            t: &self.t - &other.t,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            t: self.t.scale(s),
        }
    }

    /// Tensor with the identity on `M_n`: the stabilized map `T (x) id_n`.
    pub fn tensor_id(&self, n: usize) -> Self {
        let din = self.dim_in * n;
        let dout = self.dim_out * n;
        let mut t = ComplexMatrix::zeros(dout * dout, din * din);
        // unit e_{(i,a),(j,b)} of M_din*n maps to T(e_ij) (x) e_ab
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let image = self.apply(&ComplexMatrix::matrix_unit(self.dim_in, i, j));
                for a in 0..n {
                    for b in 0..n {
                        let colidx = (i * n + a) * din + (j * n + b);
                        for r in 0..self.dim_out {
                            for s in 0..self.dim_out {
                                let rowidx = (r * n + a) * dout + (s * n + b);
                                t.set(rowidx, colidx, image[(r, s)]);
                            }
                        }
                    }
                }
            }
        }
        Self {
            dim_in: din,
            dim_out: dout,
            t,
        }
    }

    /// Adjoint with respect to the Hilbert-Schmidt inner product.
    pub fn hs_adjoint(&self) -> Self {
        Self {
            dim_in: self.dim_out,
            dim_out: self.dim_in,
            t: self.t.adjoint(),
        }
    }

    /// Trace-normalized Choi matrix `(1/din) sum_kl e_kl (x) T(e_kl)`.
    pub fn choi(&self) -> ComplexMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        let mut images = Vec::with_capacity(din * din);
        for k in 0..din {
            for l in 0..din {
                images.push(self.apply(&ComplexMatrix::matrix_unit(din, k, l)));
            }
        }
        let scale = 1.0 / din as f64;
        ComplexMatrix::from_fn(din * dout, din * dout, |r, s| {
            let (k, m) = (r / dout, r % dout);
            let (l, n) = (s / dout, s % dout);
            images[k * din + l][(m, n)] * cr(scale)
        })
    }
}

/// Report of a complete-positivity test.
#[derive(Clone, Debug)]
pub struct CpVerdict {
    pub cp: bool,
    /// Smallest eigenvalue of the (Hermitian part of the) trace-normalized
    /// Choi matrix.
    pub min_eigenvalue: f64,
    /// Deviation of the Choi matrix from Hermiticity; nonzero means the map
    /// does not even preserve Hermiticity.
    pub hermiticity_deviation: f64,
    /// Eigenvector witnessing the negative eigenvalue, when there is one.
    pub witness: Option<ComplexMatrix>,
}

/// Tests complete positivity through the spectrum of the Choi matrix.
pub fn is_completely_positive(map: &LinearMap) -> CpVerdict {
    choi_cp_verdict(&map.choi())
}

/// Same test starting from an explicit Choi matrix.
pub fn choi_cp_verdict(choi: &ComplexMatrix) -> CpVerdict {
    let herm_dev = (choi - &choi.adjoint()).max_abs();
    let (vals, vecs) = choi.eigh();
    let min = vals.first().copied().unwrap_or(0.0);
    let cp = herm_dev <= EPS_ALG && min >= -EPS_ALG;
    let witness = if min < -EPS_ALG {
        Some(ComplexMatrix::from_fn(choi.rows(), 1, |i, _| vecs[(i, 0)]))
    } else {
        None
    };
    CpVerdict {
        cp,
        min_eigenvalue: min,
        hermiticity_deviation: herm_dev,
        witness,
    }
}

/// Splits a Choi matrix of known input dimension back into a dilation check:
/// errors unless the matrix is square with side `in_dim * out_dim` for some
/// integer `out_dim`.
pub fn choi_out_dim(choi: &ComplexMatrix, in_dim: usize) -> Result<usize> {
    if !choi.is_square() {
        return Err(Error::DimensionMismatch("Choi matrix must be square".into()));
    }
    if in_dim == 0 || !choi.rows().is_multiple_of(in_dim) {
        return Err(Error::DimensionMismatch(format!(
            "Choi side {} is not divisible by input dimension {in_dim}",
            choi.rows()
        )));
    }
    Ok(choi.rows() / in_dim)
}
