//! Stinespring dilations `T(X) = V* (X (x) 1) V` and the operators dominated
//! by a channel, realized as effects on the dilation space.

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix, C64};
use crate::{EPS_ALG, TAU_RANK};

use super::{choi_of, Channel, Instrument};

/// Isometry `V : C^in -> C^out (x) C^dilation` with `V* V = 1`. Row index
/// `(i, j)` is flattened as `i * dilation_dim + j`.
#[derive(Clone, Debug)]
pub struct StinespringIsometry {
    in_dim: usize,
    out_dim: usize,
    dilation_dim: usize,
    v: ComplexMatrix,
    minimal: bool,
}

impl StinespringIsometry {
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn dilation_dim(&self) -> usize {
        self.dilation_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    /// Isometry defect `max_abs(V*V - 1)`.
    pub fn isometry_deviation(&self) -> f64 {
        (&self.v.adjoint() * &self.v - ComplexMatrix::identity(self.in_dim)).max_abs()
    }
}

/// Builds a minimal dilation: the Kraus family is re-derived from the Choi
/// spectrum, so `dilation_dim` equals the Choi rank.
pub fn kraus_to_stinespring(t: &Channel) -> StinespringIsometry {
    let choi = choi_of(t.kraus_map());
    let (vals, vecs) = choi.matrix().eigh();
    let gmax = vals.last().copied().unwrap_or(0.0);
    let (da, db) = (t.in_dim(), t.out_dim());
    let mut kraus = Vec::new();
    for (k, &g) in vals.iter().enumerate().rev() {
        if g <= TAU_RANK * gmax {
            break;
        }
        let v = ComplexMatrix::from_fn(da * db, 1, |i, _| vecs[(i, k)]);
        kraus.push(
            ComplexMatrix::unvec(&v, da, db)
                .transpose()
                .scale(cr((da as f64 * g).sqrt())),
        );
    }
    let l = kraus.len();
    let v = ComplexMatrix::from_fn(db * l, da, |row, c| {
        let (i, j) = (row / l, row % l);
        kraus[j][(i, c)]
    });
    StinespringIsometry {
        in_dim: da,
        out_dim: db,
        dilation_dim: l,
        v,
        minimal: true,
    }
}

/// Heisenberg action through the dilation: `V* (X (x) F) V`. With `F = 1`
/// this is the channel itself; other effects `F` give the dominated maps.
pub fn stinespring_apply(
    v: &StinespringIsometry,
    x: &ComplexMatrix,
    f: &ComplexMatrix,
) -> ComplexMatrix {
    assert_eq!(x.rows(), v.out_dim);
    assert_eq!(f.rows(), v.dilation_dim);
    let mid = x.kron(f);
    &(&v.v.adjoint() * &mid) * &v.v
}

/// Recovers a Kraus family from a dilation and a resolution `sum_x
/// |chi_x><chi_x| = 1` on the dilation space: `K_x = (1 (x) <chi_x|) V`.
pub fn stinespring_to_kraus(
    v: &StinespringIsometry,
    chis: &[ComplexMatrix],
) -> Result<Channel> {
    let l = v.dilation_dim;
    let mut resolution = ComplexMatrix::zeros(l, l);
    for chi in chis {
        if chi.rows() != l || chi.cols() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "chi vector is {}x{}, expected {l}x1",
                chi.rows(),
                chi.cols()
            )));
        }
        resolution = resolution + chi * &chi.adjoint();
    }
    if !resolution.is_identity(EPS_ALG) {
        return Err(Error::InvalidChannel(
            "chi family does not resolve the identity on the dilation space".into(),
        ));
    }
    let kraus: Vec<ComplexMatrix> = chis
        .iter()
        .map(|chi| {
            ComplexMatrix::from_fn(v.out_dim, v.in_dim, |i, c| {
                let mut acc = C64::ZERO;
                for j in 0..l {
                    acc += chi[(j, 0)].conj() * v.v[(i * l + j, c)];
                }
                acc
            })
        })
        .collect();
    Channel::with_tol(kraus, 1e-7)
}

/// Expresses each outcome of an instrument as an effect on the minimal
/// dilation of the total channel: `T_x(X) = V* (X (x) F_x) V` with `F_x >= 0`
/// and `sum_x F_x = 1`.
pub fn radon_nikodym(inst: &Instrument) -> Result<Vec<ComplexMatrix>> {
    let total = inst.marginal_channel()?;
    let v = kraus_to_stinespring(&total);
    let l = v.dilation_dim;
    let (da, db) = (total.in_dim(), total.out_dim());
    // minimal Kraus family A_j back out of the dilation columns
    let basis: Vec<ComplexMatrix> = (0..l)
        .map(|j| ComplexMatrix::from_fn(db, da, |i, c| v.v[(i * l + j, c)]))
        .collect();
    let m = ComplexMatrix::from_fn(db * da, l, |r, j| basis[j].vec()[(r, 0)]);
    let mut effects = Vec::with_capacity(inst.maps().len());
    for map in inst.maps() {
        let mut f = ComplexMatrix::zeros(l, l);
        for b in map.kraus() {
            let rhs = b.vec();
            let coeff = m.lstsq(&rhs, TAU_RANK);
            let residual = (&(&m * &coeff) - &rhs).frobenius_norm();
            if residual > 1e-7 * rhs.frobenius_norm().max(1.0) {
                return Err(Error::Numerical(format!(
                    "outcome operator lies outside the dilation fiber (residual {residual:.3e})"
                )));
            }
            // F += conj(c) c^T so that sum_jk F[j,k] A_j* X A_k matches B* X B
            for j in 0..l {
                for k in 0..l {
                    let add = coeff[(j, 0)].conj() * coeff[(k, 0)];
                    let cur = f[(j, k)];
                    f.set(j, k, cur + add);
                }
            }
        }
        effects.push(f);
    }
    let mut sum = ComplexMatrix::zeros(l, l);
    for f in &effects {
        sum = sum + f.clone();
    }
    if !sum.is_identity(1e-7) {
        return Err(Error::Numerical(
            "dilation effects do not resolve the identity".into(),
        ));
    }
    Ok(effects)
}
