//! Completely positive maps and channels in Kraus form, their Choi and
//! Stinespring representations, instruments and measure-prepare channels.
//!
//! Conventions: a Kraus operator maps the Schrodinger input space (dimension
//! `in_dim`) to the Schrodinger output space (dimension `out_dim`), so each
//! Kraus matrix is `out_dim x in_dim`. The Heisenberg-picture map sends
//! observables on the output space to observables on the input space,
//! `T(B) = sum_x K_x* B K_x`, and a channel is unital: `sum_x K_x* K_x = 1`.

mod choi;
mod instrument;
mod linmap;
mod stinespring;

pub use choi::{channel_from_choi, choi_of, recombine, state_to_channel, ChoiMatrix, DualityParts};
pub use instrument::{apply_instrument, Branch, HybridState, Instrument, Povm};
pub use linmap::{choi_cp_verdict, choi_out_dim, is_completely_positive, CpVerdict, LinearMap};
pub use stinespring::{
    kraus_to_stinespring, radon_nikodym, stinespring_apply, stinespring_to_kraus,
    StinespringIsometry,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix};
use crate::systems::{Algebra, State};
use crate::EPS_ALG;

/// A completely positive map given by a list of Kraus operators, without the
/// unitality requirement of a [`Channel`]. Instrument outcomes are of this
/// kind.
#[derive(Clone, Debug)]
pub struct KrausMap {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty Kraus list".into()))?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidChannel("zero-dimensional Kraus operator".into()));
        }
        if kraus
            .iter()
            .any(|k| k.rows() != out_dim || k.cols() != in_dim)
        {
            return Err(Error::DimensionMismatch(
                "Kraus operators have inconsistent shapes".into(),
            ));
        }
        Ok(Self {
            in_dim,
            out_dim,
            kraus,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `sum_x K_x rho K_x*`.
    pub fn apply_schrodinger(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out = out + &(k * rho) * &k.adjoint();
        }
        out
    }

    /// `sum_x K_x* B K_x`.
    pub fn apply_heisenberg(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            out = out + &(&k.adjoint() * b) * k;
        }
        out
    }

    /// Heisenberg image of the identity, `sum_x K_x* K_x`.
    pub fn unit_image(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            out = out + &k.adjoint() * k;
        }
        out
    }
}

/// Unital completely positive map in Kraus form.
#[derive(Clone, Debug)]
pub struct Channel {
    map: KrausMap,
    /// Set by [`measure_prepare_channel`]: the channel factors through a
    /// classical intermediate stage.
    pub separable: bool,
}

impl Channel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tol(kraus, EPS_ALG)
    }

    pub fn with_tol(kraus: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let map = KrausMap::new(kraus)?;
        let dev = (map.unit_image() - ComplexMatrix::identity(map.in_dim)).max_abs();
        if dev > tol {
            return Err(Error::InvalidChannel(format!(
                "sum_x K_x* K_x deviates from the identity by {dev:.3e}"
            )));
        }
        Ok(Self {
            map,
            separable: false,
        })
    }

    pub fn from_kraus_map(map: KrausMap, tol: f64) -> Result<Self> {
        Self::with_tol(map.kraus, tol)
    }

    pub fn in_dim(&self) -> usize {
        self.map.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.map.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.map.kraus
    }

    pub fn kraus_map(&self) -> &KrausMap {
        &self.map
    }

    pub fn apply_schrodinger_raw(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.map.apply_schrodinger(rho)
    }

    pub fn apply_heisenberg(&self, b: &ComplexMatrix) -> ComplexMatrix {
        self.map.apply_heisenberg(b)
    }

    /// Schrodinger action on a state of a single quantum factor.
    pub fn apply(&self, s: &State) -> Result<State> {
        if s.algebra().total_dim() != self.in_dim() {
            return Err(Error::DimensionMismatch(format!(
                "state dimension {} does not match channel input {}",
                s.algebra().total_dim(),
                self.in_dim()
            )));
        }
        let rho = self.map.apply_schrodinger(s.density());
        State::with_tol(Algebra::quantum(&[self.out_dim()]), rho, 1e-6)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            map: KrausMap::new(vec![ComplexMatrix::identity(d)]).expect("identity Kraus"),
            separable: false,
        }
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        if !u.is_unitary(EPS_ALG) {
            return Err(Error::InvalidChannel("matrix is not unitary".into()));
        }
        Self::new(vec![u.clone()])
    }

    /// Channel that replaces every input by the fixed output state `rho`.
    pub fn depolarizing_to(rho: &State, in_dim: usize) -> Self {
        let (vals, vecs) = rho.density().eigh();
        let d_out = rho.density().rows();
        let mut kraus = Vec::new();
        for (k, &lam) in vals.iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            let col = ComplexMatrix::from_fn(d_out, 1, |i, _| vecs[(i, k)]);
            for c in 0..in_dim {
                let bra = ComplexMatrix::basis_vector(in_dim, c).adjoint();
                kraus.push((&col * &bra).scale(cr(lam.sqrt())));
            }
        }
        Self::with_tol(kraus, 1e-9).expect("replacement channel is unital")
    }

    /// Fully depolarizing channel onto the maximally mixed state.
    pub fn fully_depolarizing(d: usize) -> Self {
        Self::depolarizing_to(&State::maximally_mixed(Algebra::quantum(&[d])), d)
    }

    /// Row-stochastic transition matrix `p[x][y] = P(y|x)` embedded as a
    /// quantum channel with Kraus operators `sqrt(P(y|x)) |y><x|`. Basis
    /// states go to the corresponding output distributions; superpositions
    /// are dephased first.
    pub fn embed_classical(transition: &[Vec<f64>]) -> Result<Self> {
        let n = transition.len();
        if n == 0 {
            return Err(Error::InvalidChannel("empty transition matrix".into()));
        }
        let m = transition[0].len();
        for row in transition {
            if row.len() != m {
                return Err(Error::DimensionMismatch("ragged transition matrix".into()));
            }
            if row.iter().any(|&p| p < -EPS_ALG) {
                return Err(Error::InvalidChannel("negative transition probability".into()));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-7 {
                return Err(Error::InvalidChannel(format!("row sums to {total}")));
            }
        }
        let mut kraus = Vec::new();
        for (x, row) in transition.iter().enumerate() {
            for (y, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    let ket = ComplexMatrix::basis_vector(m, y);
                    let bra = ComplexMatrix::basis_vector(n, x).adjoint();
                    kraus.push((&ket * &bra).scale(cr(p.sqrt())));
                }
            }
        }
        let mut ch = Channel::with_tol(kraus, 1e-7)?;
        ch.separable = true;
        Ok(ch)
    }

    /// Composition `outer after inner` (Schrodinger pictures).
    pub fn compose(outer: &Channel, inner: &Channel) -> Result<Channel> {
        if inner.out_dim() != outer.in_dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose: inner output {} vs outer input {}",
                inner.out_dim(),
                outer.in_dim()
            )));
        }
        let mut kraus = Vec::with_capacity(outer.kraus().len() * inner.kraus().len());
        for a in outer.kraus() {
            for b in inner.kraus() {
                kraus.push(a * b);
            }
        }
        Channel::with_tol(kraus, 1e-7)
    }

    pub fn tensor(a: &Channel, b: &Channel) -> Channel {
        let mut kraus = Vec::with_capacity(a.kraus().len() * b.kraus().len());
        for ka in a.kraus() {
            for kb in b.kraus() {
                kraus.push(ka.kron(kb));
            }
        }
        Channel::with_tol(kraus, 1e-7).expect("tensor product of channels is unital")
    }

    /// Unitality deviation `max_abs(sum K*K - 1)`.
    pub fn unitality_deviation(&self) -> f64 {
        (self.map.unit_image() - ComplexMatrix::identity(self.in_dim())).max_abs()
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Serialize for KrausMap {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelJson {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            kraus: self.kraus.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for KrausMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ChannelJson::deserialize(de)?;
        let map = KrausMap::new(raw.kraus).map_err(D::Error::custom)?;
        if map.in_dim != raw.in_dim || map.out_dim != raw.out_dim {
            return Err(D::Error::custom(format!(
                "declared dimensions {}x{} do not match Kraus shapes {}x{}",
                raw.out_dim, raw.in_dim, map.out_dim, map.in_dim
            )));
        }
        Ok(map)
    }
}

impl Serialize for Channel {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.map.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let map = KrausMap::deserialize(de)?;
        Channel::from_kraus_map(map, 1e-6).map_err(D::Error::custom)
    }
}

/// Measure with `povm`, then prepare `preps[x]` on outcome `x`. The result is
/// a channel with a purely classical intermediate stage, Heisenberg form
/// `T(A) = sum_x tr(rho_x A) F_x`.
pub fn measure_prepare_channel(povm: &Povm, preps: &[State]) -> Result<Channel> {
    if preps.len() != povm.effects().len() {
        return Err(Error::DimensionMismatch(format!(
            "{} effects vs {} prepared states",
            povm.effects().len(),
            preps.len()
        )));
    }
    let out_dim = preps
        .first()
        .ok_or_else(|| Error::InvalidChannel("empty preparation list".into()))?
        .density()
        .rows();
    if preps.iter().any(|p| p.density().rows() != out_dim) {
        return Err(Error::DimensionMismatch(
            "prepared states live on different spaces".into(),
        ));
    }
    let in_dim = povm.dim();
    let mut kraus = Vec::new();
    for (f, prep) in povm.effects().iter().zip(preps) {
        let (g, fv) = f.eigh();
        let (h, rv) = prep.density().eigh();
        for (i, &gi) in g.iter().enumerate() {
            if gi <= 1e-14 {
                continue;
            }
            let bra = ComplexMatrix::from_fn(1, in_dim, |_, c| fv[(c, i)].conj());
            for (j, &hj) in h.iter().enumerate() {
                if hj <= 1e-14 {
                    continue;
                }
                let ket = ComplexMatrix::from_fn(out_dim, 1, |r, _| rv[(r, j)]);
                kraus.push((&ket * &bra).scale(cr((gi * hj).sqrt())));
            }
        }
    }
    let mut ch = Channel::with_tol(kraus, 1e-7)?;
    ch.separable = true;
    Ok(ch)
}

/// Dilation of a channel to a unitary acting on system plus ancilla:
/// `U (phi (x) psi_a) = (V phi) (x) psi_b`, with
/// `T_*(rho) = tr_env U (rho (x) |psi_a><psi_a|) U*`.
#[derive(Clone, Debug)]
pub struct AncillaForm {
    pub unitary: ComplexMatrix,
    /// Pure ancilla state on `C^{ancilla_dim}`.
    pub ancilla_state: ComplexMatrix,
    pub ancilla_dim: usize,
    /// Output system dimension (kept factor after the unitary).
    pub sys_dim: usize,
    /// Environment dimension (traced factor after the unitary).
    pub env_dim: usize,
}

impl AncillaForm {
    /// Applies the dilated dynamics and traces out the environment.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let psi_a = &self.ancilla_state;
        let joint = rho.kron(&(psi_a * &psi_a.adjoint()));
        let evolved = &(&self.unitary * &joint) * &self.unitary.adjoint();
        let (n, e) = (self.sys_dim, self.env_dim);
        ComplexMatrix::from_fn(n, n, |i, k| {
            let mut acc = crate::matrix::c(0.0, 0.0);
            for t in 0..e {
                acc += evolved[(i * e + t, k * e + t)];
            }
            acc
        })
    }
}

/// Builds an ancilla form with dimensions `a = out_dim * dilation_dim` and
/// `b = in_dim`, so that `in_dim * a = out_dim * dilation_dim * b` always
/// holds. The completion of the isometry to a unitary is deterministic; see
/// [`ancilla_form_seeded`] for a different completion of the same channel.
pub fn ancilla_form(t: &Channel) -> Result<AncillaForm> {
    ancilla_form_completed(t, None)
}

/// Same construction, but the unitary completion is mixed by a seeded random
/// rotation of the complement. The dilated channel is unchanged.
pub fn ancilla_form_seeded(t: &Channel, seed: u64) -> Result<AncillaForm> {
    ancilla_form_completed(t, Some(seed))
}

fn ancilla_form_completed(t: &Channel, seed: Option<u64>) -> Result<AncillaForm> {
    let v = kraus_to_stinespring(t);
    let (m, n, l) = (t.in_dim(), t.out_dim(), v.dilation_dim());
    let a = n * l;
    let b = m;
    let total = m * a;
    let psi_a = ComplexMatrix::basis_vector(a, 0);
    let psi_b = ComplexMatrix::basis_vector(b, 0);
    let mut source = Vec::with_capacity(m);
    let mut target = Vec::with_capacity(m);
    for i in 0..m {
        source.push(ComplexMatrix::basis_vector(m, i).kron(&psi_a));
        let vi = ComplexMatrix::from_fn(n * l, 1, |r, _| v.matrix()[(r, i)]);
        target.push(vi.kron(&psi_b));
    }
    let bs = ComplexMatrix::complete_orthonormal(&source, total)?;
    let mut bt = ComplexMatrix::complete_orthonormal(&target, total)?;
    if let Some(seed) = seed {
        let w = crate::random::haar_unitary(&mut crate::random::rng(seed), total - m);
        let mut mixed = ComplexMatrix::zeros(total, total);
        for r in 0..total {
            for c0 in 0..m {
                mixed.set(r, c0, bt[(r, c0)]);
            }
            for c0 in 0..total - m {
                let mut acc = crate::matrix::c(0.0, 0.0);
                for k in 0..total - m {
                    acc += bt[(r, m + k)] * w[(k, c0)];
                }
                mixed.set(r, m + c0, acc);
            }
        }
        bt = mixed;
    }
    let u = &bt * &bs.adjoint();
    if !u.is_unitary(1e-9) {
        return Err(Error::Numerical("ancilla-form completion is not unitary".into()));
    }
    Ok(AncillaForm {
        unitary: u,
        ancilla_state: psi_a,
        ancilla_dim: a,
        sys_dim: n,
        env_dim: l * b,
    })
}
