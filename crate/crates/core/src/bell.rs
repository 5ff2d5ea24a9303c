//! Two-party correlation experiments with dichotomic observables: correlation
//! coefficients, the four-term correlation combination `beta` with its
//! classical bound, and the decoding bound for joint-outcome tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{cr, ComplexMatrix};
use crate::systems::{spin_operator, Algebra, Effect, State};
use crate::EPS_ALG;

/// Two-outcome measurement, stored as the effect of the `+1` result.
#[derive(Clone, Debug)]
pub struct DichotomicObservable {
    effect_plus: Effect,
}

impl DichotomicObservable {
    pub fn new(effect_plus: Effect) -> Self {
        Self { effect_plus }
    }

    /// Observable with `effect_plus = 1`: it answers `+1` on every state.
    pub fn trivial(dim: usize) -> Self {
        let algebra = Algebra::quantum(&[dim]);
        let effect = Effect::new(algebra, ComplexMatrix::identity(dim)).expect("identity effect");
        Self::new(effect)
    }

    pub fn dim(&self) -> usize {
        self.effect_plus.algebra().total_dim()
    }

    pub fn effect_plus(&self) -> &Effect {
        &self.effect_plus
    }

    pub fn effect_minus(&self) -> Effect {
        self.effect_plus.complement()
    }

    /// `A = E_+ - E_- = 2 E_+ - 1`, Hermitian with spectrum in `[-1, 1]`.
    pub fn observable(&self) -> ComplexMatrix {
        let d = self.dim();
        &self.effect_plus.matrix().scale(cr(2.0)) - &ComplexMatrix::identity(d)
    }

    fn effect_for(&self, outcome: i8) -> Result<Effect> {
        match outcome {
            1 => Ok(self.effect_plus.clone()),
            -1 => Ok(self.effect_minus()),
            other => Err(Error::InvalidIndex(format!(
                "outcome must be +1 or -1, got {other}"
            ))),
        }
    }
}

/// Qubit measurement of spin along the unit vector `n`, with
/// `effect_plus = (1 + n . sigma) / 2`.
pub fn spin_observable(n: [f64; 3]) -> Result<DichotomicObservable> {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (len - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidEffect(format!(
            "spin direction must be a unit vector, |n| = {len}"
        )));
    }
    let m = (&ComplexMatrix::identity(2) + &spin_operator(n)).scale(cr(0.5));
    Ok(DichotomicObservable::new(Effect::new(
        Algebra::quantum(&[2]),
        m,
    )?))
}

/// Alice's analyzer at `theta` degrees in the z-x plane. Rotating the analyzer
/// by `theta` turns the measured spin direction by `2 theta`.
pub fn alice_analyzer(theta_deg: f64) -> DichotomicObservable {
    let t = 2.0 * theta_deg.to_radians();
    spin_observable([t.sin(), 0.0, t.cos()]).expect("unit direction")
}

/// Bob's analyzer at `theta` degrees, measuring spin opposite to Alice's at
/// the same angle. On the singlet this makes the correlation
/// `cos 2(theta_a - theta_b)`.
pub fn bob_analyzer(theta_deg: f64) -> DichotomicObservable {
    let t = 2.0 * theta_deg.to_radians();
    spin_observable([-t.sin(), 0.0, -t.cos()]).expect("unit direction")
}

/// Two-qubit singlet `(|01> - |10>) / sqrt 2`.
pub fn singlet() -> State {
    let mut v = ComplexMatrix::zeros(4, 1);
    v.set(1, 0, cr(std::f64::consts::FRAC_1_SQRT_2));
    v.set(2, 0, cr(-std::f64::consts::FRAC_1_SQRT_2));
    State::pure(Algebra::quantum(&[2, 2]), &v).expect("unit vector")
}

fn check_bipartite(s: &State, a: &DichotomicObservable, b: &DichotomicObservable) -> Result<()> {
    let dims = s.algebra().factor_dims();
    if dims.len() != 2 || dims[0] != a.dim() || dims[1] != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state factors {:?} vs observables on dims {} and {}",
            dims,
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Probability of the outcome pair `(a_out, b_out)`, both in `{+1, -1}`, when
/// the two parties measure `a` and `b` on the bipartite state `s`.
pub fn outcome_probability(
    s: &State,
    a: &DichotomicObservable,
    b: &DichotomicObservable,
    a_out: i8,
    b_out: i8,
) -> Result<f64> {
    check_bipartite(s, a, b)?;
    let ea = a.effect_for(a_out)?;
    let fb = b.effect_for(b_out)?;
    Ok(s.expect(&ea.matrix().kron(fb.matrix())))
}

/// Correlation coefficient `C(A, B) = sum_{a,b} a b p(a, b)`, equal to the
/// expectation of `A (x) B`. Always in `[-1, 1]`.
pub fn correlation(s: &State, a: &DichotomicObservable, b: &DichotomicObservable) -> Result<f64> {
    check_bipartite(s, a, b)?;
    Ok(s.expect(&a.observable().kron(&b.observable())))
}

/// Four-term combination `C(A1,B1) + C(A1,B2) + C(A2,B1) - C(A2,B2)`.
/// Bounded by 2 for states with a local classical model and by `2 sqrt 2`
/// for all quantum states.
pub fn chsh_beta(
    s: &State,
    a1: &DichotomicObservable,
    a2: &DichotomicObservable,
    b1: &DichotomicObservable,
    b2: &DichotomicObservable,
) -> Result<f64> {
    Ok(correlation(s, a1, b1)? + correlation(s, a1, b2)? + correlation(s, a2, b1)?
        - correlation(s, a2, b2)?)
}

/// Analyzer angles in degrees for a four-setting correlation experiment.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ChshAngles {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

/// The angle set reaching the quantum maximum `2 sqrt 2` on the singlet:
/// Alice at 45 and 0 degrees, Bob at 22.5 and 67.5 degrees.
pub fn standard_angles() -> ChshAngles {
    ChshAngles {
        a1: 45.0,
        a2: 0.0,
        b1: 22.5,
        b2: 67.5,
    }
}

/// Correlation matrix and combination value for a state measured with
/// analyzers at the given angles.
#[derive(Clone, Debug, Serialize)]
pub struct ChshReport {
    /// `correlations[i][j]` pairs Alice's setting `i+1` with Bob's `j+1`.
    pub correlations: [[f64; 2]; 2],
    pub beta: f64,
}

pub fn chsh_from_angles(s: &State, angles: &ChshAngles) -> Result<ChshReport> {
    let a = [alice_analyzer(angles.a1), alice_analyzer(angles.a2)];
    let b = [bob_analyzer(angles.b1), bob_analyzer(angles.b2)];
    let mut c = [[0.0; 2]; 2];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            c[i][j] = correlation(s, ai, bj)?;
        }
    }
    Ok(ChshReport {
        correlations: c,
        beta: c[0][0] + c[0][1] + c[1][0] - c[1][1],
    })
}

fn deterministic_beta(a1: f64, a2: f64, b1: f64, b2: f64) -> f64 {
    a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2
}

/// Maximum of the four-term combination over the 16 deterministic local
/// strategies `a1, a2, b1, b2 in {+1, -1}`. Returns exactly 2.
pub fn classical_chsh_max() -> f64 {
    let mut best = f64::NEG_INFINITY;
    for mask in 0..16u32 {
        let sign = |bit: u32| if mask >> bit & 1 == 0 { 1.0 } else { -1.0 };
        let beta = deterministic_beta(sign(0), sign(1), sign(2), sign(3));
        if beta > best {
            best = beta;
        }
    }
    best
}

const OUTCOMES: [f64; 2] = [1.0, -1.0];

fn outcome_index(v: i64) -> Result<usize> {
    match v {
        1 => Ok(0),
        -1 => Ok(1),
        other => Err(Error::InvalidDistribution(format!(
            "outcome must be +1 or -1, got {other}"
        ))),
    }
}

/// Joint distribution of Alice's outcome together with a pair outcome for
/// both of Bob's measurements, one table per Alice setting. Index order is
/// `p[i][a][b1][b2]` with `0` for outcome `+1` and `1` for `-1`.
///
/// Such a table presumes Bob measured `B1` and `B2` jointly; comparing its
/// decoding success with the induced `beta` quantifies what that assumption
/// would let Bob read off about Alice's setting choice.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "DistributionRows", into = "DistributionRows")]
pub struct JointOutcomeDistribution {
    p: [[[[f64; 2]; 2]; 2]; 2],
}

/// Wire format: rows `[i, a, b1, b2, prob]` with `i` in `{1, 2}` and the
/// outcomes encoded as the integers `+1` and `-1`.
#[derive(Serialize, Deserialize)]
struct DistributionRows {
    p: Vec<(i64, i64, i64, i64, f64)>,
}

impl JointOutcomeDistribution {
    /// Validates nonnegativity and that each setting's table sums to one.
    pub fn new(p: [[[[f64; 2]; 2]; 2]; 2]) -> Result<Self> {
        for (i, table) in p.iter().enumerate() {
            let mut total = 0.0;
            for plane in table {
                for row in plane {
                    for &v in row {
                        if v < -EPS_ALG {
                            return Err(Error::InvalidDistribution(format!(
                                "negative probability {v} in setting {}",
                                i + 1
                            )));
                        }
                        total += v;
                    }
                }
            }
            if (total - 1.0).abs() > EPS_ALG {
                return Err(Error::InvalidDistribution(format!(
                    "setting {} sums to {total}, expected 1",
                    i + 1
                )));
            }
        }
        Ok(Self { p })
    }

    /// Table entry for Alice's setting `1` or `2` and outcomes in `{+1, -1}`.
    pub fn prob(&self, setting: usize, a: i8, b1: i8, b2: i8) -> Result<f64> {
        if setting != 1 && setting != 2 {
            return Err(Error::InvalidIndex(format!(
                "setting must be 1 or 2, got {setting}"
            )));
        }
        Ok(self.p[setting - 1][outcome_index(a as i64)?][outcome_index(b1 as i64)?]
            [outcome_index(b2 as i64)?])
    }

    /// Largest discrepancy between the two settings' pair distributions of
    /// `(b1, b2)` after summing out Alice's outcome. A table with a large
    /// deviation lets Bob see Alice's setting from his outcomes alone.
    pub fn bob_marginal_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for b1 in 0..2 {
            for b2 in 0..2 {
                let m1: f64 = (0..2).map(|a| self.p[0][a][b1][b2]).sum();
                let m2: f64 = (0..2).map(|a| self.p[1][a][b1][b2]).sum();
                worst = worst.max((m1 - m2).abs());
            }
        }
        worst
    }
}

impl TryFrom<DistributionRows> for JointOutcomeDistribution {
    type Error = Error;

    fn try_from(rows: DistributionRows) -> Result<Self> {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        let mut seen = [[[[false; 2]; 2]; 2]; 2];
        for (i, a, b1, b2, prob) in rows.p {
            let si = match i {
                1 => 0,
                2 => 1,
                other => {
                    return Err(Error::InvalidDistribution(format!(
                        "setting must be 1 or 2, got {other}"
                    )))
                }
            };
            let (ia, ib1, ib2) = (outcome_index(a)?, outcome_index(b1)?, outcome_index(b2)?);
            if seen[si][ia][ib1][ib2] {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate row for ({i}, {a}, {b1}, {b2})"
                )));
            }
            seen[si][ia][ib1][ib2] = true;
            p[si][ia][ib1][ib2] = prob;
        }
        Self::new(p)
    }
}

impl From<JointOutcomeDistribution> for DistributionRows {
    fn from(d: JointOutcomeDistribution) -> Self {
        let mut rows = Vec::with_capacity(16);
        for (si, table) in d.p.iter().enumerate() {
            for (ia, plane) in table.iter().enumerate() {
                for (ib1, row) in plane.iter().enumerate() {
                    for (ib2, &prob) in row.iter().enumerate() {
                        rows.push((
                            si as i64 + 1,
                            OUTCOMES[ia] as i64,
                            OUTCOMES[ib1] as i64,
                            OUTCOMES[ib2] as i64,
                            prob,
                        ));
                    }
                }
            }
        }
        DistributionRows { p: rows }
    }
}

/// Probability that Bob correctly reads Alice's setting choice off his pair
/// outcome, decoding "setting 1" when `b1 = b2` and "setting 2" otherwise,
/// with both settings used equally often:
/// `p_ok = 1/2 sum |(b1+b2)/2| |a| p_1 + 1/2 sum |(b1-b2)/2| |a| p_2`.
/// Always at least `distribution_beta(d) / 4`.
pub fn telephone_success(d: &JointOutcomeDistribution) -> f64 {
    let mut p_ok = 0.0;
    for ia in 0..2 {
        for (ib1, &b1) in OUTCOMES.iter().enumerate() {
            for (ib2, &b2) in OUTCOMES.iter().enumerate() {
                p_ok += 0.5 * ((b1 + b2) / 2.0).abs() * d.p[0][ia][ib1][ib2];
                p_ok += 0.5 * ((b1 - b2) / 2.0).abs() * d.p[1][ia][ib1][ib2];
            }
        }
    }
    p_ok
}

/// Four-term combination computed from the table's induced correlations:
/// setting `i` pairs Alice's outcome with `b_j` summed over the other
/// outcome.
pub fn distribution_beta(d: &JointOutcomeDistribution) -> f64 {
    let mut c = [[0.0; 2]; 2];
    for (ia, &a) in OUTCOMES.iter().enumerate() {
        for (ib1, &b1) in OUTCOMES.iter().enumerate() {
            for (ib2, &b2) in OUTCOMES.iter().enumerate() {
                c[0][0] += a * b1 * d.p[0][ia][ib1][ib2];
                c[0][1] += a * b2 * d.p[0][ia][ib1][ib2];
                c[1][0] += a * b1 * d.p[1][ia][ib1][ib2];
                c[1][1] += a * b2 * d.p[1][ia][ib1][ib2];
            }
        }
    }
    c[0][0] + c[0][1] + c[1][0] - c[1][1]
}

/// True when the table decodes Alice's choice better than chance, which a
/// correlation combination above 2 forces.
pub fn signalling_check(d: &JointOutcomeDistribution) -> bool {
    telephone_success(d) > 0.5
}
