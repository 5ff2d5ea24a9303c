//! Observables with quantum output: instruments, POVMs and the hybrid
//! classical-quantum states they produce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix};
use crate::systems::{Algebra, Factor, FactorKind, State};
use crate::{EPS_ALG, TAU_RANK};

use super::{Channel, KrausMap};

/// Positive operator valued measure: effects `F_x >= 0` with `sum_x F_x = 1`.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = effects
            .first()
            .ok_or_else(|| Error::InvalidInstrument("empty effect list".into()))?
            .rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (x, f) in effects.iter().enumerate() {
            if f.rows() != dim || f.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "effect {x} is {}x{}, expected {dim}x{dim}",
                    f.rows(),
                    f.cols()
                )));
            }
            if !f.is_hermitian(EPS_ALG) {
                return Err(Error::InvalidEffect(format!("effect {x} is not Hermitian")));
            }
            let min = f.min_eigenvalue();
            if min < -EPS_ALG {
                return Err(Error::InvalidEffect(format!(
                    "effect {x} has negative eigenvalue {min:.3e}"
                )));
            }
            sum = sum + f.clone();
        }
        if !sum.is_identity(EPS_ALG) {
            return Err(Error::InvalidInstrument(
                "effects do not sum to the identity".into(),
            ));
        }
        Ok(Self { dim, effects })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// Outcome distribution on a state.
    pub fn probabilities(&self, s: &State) -> Result<Vec<f64>> {
        if s.algebra().total_dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "state dimension {} vs POVM dimension {}",
                s.algebra().total_dim(),
                self.dim
            )));
        }
        Ok(self.effects.iter().map(|f| s.expect(f)).collect())
    }
}

/// Measurement with quantum output: a family of CP maps `T_x`, one per
/// outcome, with unital sum.
#[derive(Clone, Debug)]
pub struct Instrument {
    outcomes: Vec<String>,
    maps: Vec<KrausMap>,
}

impl Instrument {
    pub fn new(outcomes: Vec<String>, maps: Vec<KrausMap>) -> Result<Self> {
        if outcomes.len() != maps.len() {
            return Err(Error::InvalidInstrument(format!(
                "{} labels vs {} outcome maps",
                outcomes.len(),
                maps.len()
            )));
        }
        let first = maps
            .first()
            .ok_or_else(|| Error::InvalidInstrument("no outcomes".into()))?;
        let (din, dout) = (first.in_dim(), first.out_dim());
        if maps.iter().any(|m| m.in_dim() != din || m.out_dim() != dout) {
            return Err(Error::DimensionMismatch(
                "outcome maps have inconsistent dimensions".into(),
            ));
        }
        let mut sum = ComplexMatrix::zeros(din, din);
        for m in &maps {
            sum = sum + m.unit_image();
        }
        if !sum.is_identity(EPS_ALG) {
            return Err(Error::InvalidInstrument(
                "outcome maps do not sum to a unital map".into(),
            ));
        }
        Ok(Self { outcomes, maps })
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn maps(&self) -> &[KrausMap] {
        &self.maps
    }

    pub fn in_dim(&self) -> usize {
        self.maps[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.maps[0].out_dim()
    }

    /// Ignoring the outcome: the total channel `sum_x T_x`.
    pub fn marginal_channel(&self) -> Result<Channel> {
        let mut kraus = Vec::new();
        for m in &self.maps {
            kraus.extend_from_slice(m.kraus());
        }
        Channel::with_tol(kraus, 1e-7)
    }

    /// Ignoring the quantum output: the POVM `F_x = T_x(1)`.
    pub fn marginal_povm(&self) -> Result<Povm> {
        Povm::new(self.maps.iter().map(|m| m.unit_image()).collect())
    }

    /// Projective measurement: `T_x(A) = p_x A p_x` for orthogonal
    /// projections summing to the identity.
    pub fn von_neumann(projections: &[ComplexMatrix]) -> Result<Self> {
        let d = projections
            .first()
            .ok_or_else(|| Error::InvalidInstrument("no projections".into()))?
            .rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (x, p) in projections.iter().enumerate() {
            if !p.is_hermitian(EPS_ALG) || (&(p * p) - p).max_abs() > EPS_ALG {
                return Err(Error::InvalidInstrument(format!(
                    "operator {x} is not an orthogonal projection"
                )));
            }
            sum = sum + p.clone();
        }
        if !sum.is_identity(EPS_ALG) {
            return Err(Error::InvalidInstrument(
                "projections do not resolve the identity".into(),
            ));
        }
        let outcomes = (0..projections.len()).map(|x| x.to_string()).collect();
        let maps = projections
            .iter()
            .map(|p| KrausMap::new(vec![p.clone()]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(outcomes, maps)
    }
}

/// One outcome branch of an instrument applied to a state.
#[derive(Clone, Debug)]
pub struct Branch {
    pub label: String,
    pub weight: f64,
    /// Normalized conditional state; absent when the branch probability is
    /// numerically zero.
    pub state: Option<ComplexMatrix>,
}

/// Classical-quantum hybrid: a weighted family of conditional states.
#[derive(Clone, Debug)]
pub struct HybridState {
    pub branches: Vec<Branch>,
}

impl HybridState {
    pub fn weights(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.weight).collect()
    }

    /// Block-diagonal density matrix on `classical (x) quantum`.
    pub fn as_block_state(&self) -> Result<State> {
        let n = self.branches.len();
        let d = self
            .branches
            .iter()
            .find_map(|b| b.state.as_ref().map(|s| s.rows()))
            .ok_or_else(|| Error::InvalidState("all branches are empty".into()))?;
        let mut rho = ComplexMatrix::zeros(n * d, n * d);
        for (x, b) in self.branches.iter().enumerate() {
            if let Some(s) = &b.state {
                for i in 0..d {
                    for j in 0..d {
                        rho.set(x * d + i, x * d + j, s[(i, j)].scale(b.weight));
                    }
                }
            }
        }
        let algebra = Algebra::new(vec![
            Factor { kind: FactorKind::Classical, dim: n },
            Factor { kind: FactorKind::Quantum, dim: d },
        ])?;
        State::with_tol(algebra, rho, 1e-6)
    }
}

/// Applies an instrument: branch weights `tr T_x*(rho)` and conditional
/// states `T_x*(rho) / weight`.
pub fn apply_instrument(inst: &Instrument, s: &State) -> Result<HybridState> {
    if s.algebra().total_dim() != inst.in_dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs instrument input {}",
            s.algebra().total_dim(),
            inst.in_dim()
        )));
    }
    let mut branches = Vec::with_capacity(inst.maps.len());
    for (label, map) in inst.outcomes.iter().zip(&inst.maps) {
        let unnorm = map.apply_schrodinger(s.density());
        let weight = unnorm.trace().re;
        let state = if weight > TAU_RANK {
            Some(unnorm.scale(cr(1.0 / weight)))
        } else {
            None
        };
        branches.push(Branch {
            label: label.clone(),
            weight: weight.max(0.0),
            state,
        });
    }
    Ok(HybridState { branches })
}

#[derive(Serialize, Deserialize)]
struct InstrumentJson {
    in_dim: usize,
    out_dim: usize,
    outcomes: Vec<String>,
    kraus: Vec<Vec<ComplexMatrix>>,
}

impl Serialize for Instrument {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        InstrumentJson {
            in_dim: self.in_dim(),
            out_dim: self.out_dim(),
            outcomes: self.outcomes.clone(),
            kraus: self.maps.iter().map(|m| m.kraus().to_vec()).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Instrument {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = InstrumentJson::deserialize(de)?;
        let maps = raw
            .kraus
            .into_iter()
            .map(KrausMap::new)
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        if let Some(m) = maps.first() {
            if m.in_dim() != raw.in_dim || m.out_dim() != raw.out_dim {
                return Err(D::Error::custom("declared dimensions do not match Kraus shapes"));
            }
        }
        Instrument::new(raw.outcomes, maps).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;
    use crate::random;
    use crate::systems::restrict;

    fn qubit_measurement() -> Instrument {
        let p0 = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::real_diagonal(&[0.0, 1.0]);
        Instrument::von_neumann(&[p0, p1]).unwrap()
    }

    #[test]
    fn povm_validation() {
        let mut r = random::rng(43);
        let effects = random::povm_effects(&mut r, 3, 4);
        let povm = Povm::new(effects).unwrap();
        let s = random::state(&mut r, 3, 3);
        let probs = povm.probabilities(&s).unwrap();
        assert!(probs.iter().all(|&p| p >= -1e-12));
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);

        let half = ComplexMatrix::real_diagonal(&[0.5, 0.5]);
        assert!(Povm::new(vec![half.clone()]).is_err());
        assert!(Povm::new(vec![
            ComplexMatrix::real_diagonal(&[1.5, 0.5]),
            ComplexMatrix::real_diagonal(&[-0.5, 0.5]),
        ])
        .is_err());
        let skew = ComplexMatrix::from_rows(&[
            vec![cr(0.5), c(0.0, 0.3)],
            vec![c(0.0, 0.3), cr(0.5)],
        ])
        .unwrap();
        assert!(Povm::new(vec![skew.clone(), &half - &(&skew - &half)]).is_err());
    }

    #[test]
    fn von_neumann_rejects_non_projections() {
        let tilted = ComplexMatrix::real_diagonal(&[0.6, 0.0]);
        let rest = ComplexMatrix::real_diagonal(&[0.4, 1.0]);
        assert!(Instrument::von_neumann(&[tilted, rest]).is_err());
        let inst = qubit_measurement();
        assert_eq!(inst.outcomes(), ["0".to_string(), "1".to_string()]);
    }

    #[test]
    fn projective_outcomes_are_orthogonal_and_repeatable() {
        let inst = qubit_measurement();
        for (x, mx) in inst.maps().iter().enumerate() {
            for (y, my) in inst.maps().iter().enumerate() {
                let prod = &mx.kraus()[0] * &my.kraus()[0];
                if x == y {
                    assert!((&prod - &mx.kraus()[0]).max_abs() < 1e-12);
                } else {
                    assert!(prod.max_abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn marginals_of_projective_instrument() {
        let inst = qubit_measurement();
        let total = inst.marginal_channel().unwrap();
        assert!(total.unitality_deviation() < 1e-12);
        let povm = inst.marginal_povm().unwrap();
        assert!((povm.effects()[0].clone() - ComplexMatrix::real_diagonal(&[1.0, 0.0])).max_abs() < 1e-12);

        let plus = ComplexMatrix::vector(&[cr(0.5f64.sqrt()), cr(0.5f64.sqrt())]);
        let s = State::pure(Algebra::quantum(&[2]), &plus).unwrap();
        let dephased = total.apply_schrodinger_raw(s.density());
        assert!((&dephased - &ComplexMatrix::real_diagonal(&[0.5, 0.5])).max_abs() < 1e-12);
    }

    #[test]
    fn apply_produces_weighted_branches_and_block_state() {
        let inst = qubit_measurement();
        let rho = State::new(
            Algebra::quantum(&[2]),
            ComplexMatrix::from_rows(&[
                vec![cr(0.8), cr(0.1)],
                vec![cr(0.1), cr(0.2)],
            ])
            .unwrap(),
        )
        .unwrap();
        let hybrid = apply_instrument(&inst, &rho).unwrap();
        let w = hybrid.weights();
        assert!((w[0] - 0.8).abs() < 1e-12 && (w[1] - 0.2).abs() < 1e-12);
        for b in &hybrid.branches {
            let s = b.state.as_ref().unwrap();
            assert!((s.trace().re - 1.0).abs() < 1e-12);
        }

        let block = hybrid.as_block_state().unwrap();
        let classical = restrict(&block, &[0]).unwrap();
        assert!((classical.density()[(0, 0)].re - 0.8).abs() < 1e-9);
        assert!((classical.density()[(1, 1)].re - 0.2).abs() < 1e-9);
    }

    #[test]
    fn zero_weight_branch_has_no_state() {
        let inst = qubit_measurement();
        let s = State::pure(Algebra::quantum(&[2]), &ComplexMatrix::basis_vector(2, 0)).unwrap();
        let hybrid = apply_instrument(&inst, &s).unwrap();
        assert!(hybrid.branches[0].state.is_some());
        assert!(hybrid.branches[1].state.is_none());
        assert!(hybrid.branches[1].weight.abs() < 1e-12);
    }

    #[test]
    fn instrument_serde_round_trip() {
        let inst = qubit_measurement();
        let text = serde_json::to_string(&inst).unwrap();
        let back: Instrument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.outcomes(), inst.outcomes());
        for (a, b) in back.maps().iter().zip(inst.maps()) {
            assert!((a.kraus()[0].clone() - b.kraus()[0].clone()).max_abs() < 1e-15);
        }

        let bad = text.replace("\"in_dim\":2", "\"in_dim\":3");
        assert!(serde_json::from_str::<Instrument>(&bad).is_err());
    }
}
