//! The basis-guessing adversary: Eve answers each round with her own
//! strategy applied to noisy guesses of the two bases. This module holds the
//! forward map from her strategy's statistics to what Alice and Bob observe,
//! its closed-form inverse, and the uncertainty thresholds beyond which no
//! feasible strategy exists.

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::j3_effective;
use crate::correlations::{asynchronicity, index, Correlation, TABLE_LEN};
use crate::error::{Error, Result};
use crate::{INPUTS, OUTPUTS};

/// Largest meaningful uncertainty: at `2/3` Eve's guess is uniform.
pub const MAX_EPSILON: f64 = 2.0 / 3.0;

fn check_epsilon(eps: f64) -> Result<()> {
    if !(0.0..=MAX_EPSILON).contains(&eps) {
        return Err(Error::InputDomain(format!("epsilon {eps} outside [0, 2/3]")));
    }
    Ok(())
}

/// `Pr[z | x]`: `1 - ε` on the true basis, `ε/2` on each other basis.
pub fn guess_distribution(eps: f64, x: usize) -> Result<[f64; INPUTS]> {
    check_epsilon(eps)?;
    if x >= INPUTS {
        return Err(Error::InputDomain(format!("input {x} not in {{0,1,2}}")));
    }
    Ok(std::array::from_fn(|z| if z == x { 1.0 - eps } else { eps / 2.0 }))
}

/// Eve's uncertainty and the table she answers with, indexed by her guesses.
/// The table need not be nonsignalling.
#[derive(Clone, Debug, PartialEq)]
pub struct EveModel {
    epsilon: f64,
    strategy: Correlation,
}

impl EveModel {
    pub fn new(epsilon: f64, strategy: Correlation) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(EveModel { epsilon, strategy })
    }

    /// Eve reproducing the honest statistics on her guesses.
    pub fn ideal(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, Correlation::ideal())
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn strategy(&self) -> &Correlation {
        &self.strategy
    }
}

/// `p(y|x) = Σ_z q(y|z) w(z_A|x_A) w(z_B|x_B)` with independent guesses on each side.
pub fn observed_correlation(m: &EveModel) -> Correlation {
    let w: [[f64; INPUTS]; INPUTS] =
        std::array::from_fn(|x| guess_distribution(m.epsilon, x).expect("validated epsilon"));
    let q = &m.strategy;
    let mut table = [0.0; TABLE_LEN];
    for ya in 0..OUTPUTS {
        for yb in 0..OUTPUTS {
            for xa in 0..INPUTS {
                for xb in 0..INPUTS {
                    let mut acc = 0.0;
                    for za in 0..INPUTS {
                        for zb in 0..INPUTS {
                            acc += q.p(ya, yb, za, zb) * w[xa][za] * w[xb][zb];
                        }
                    }
                    table[index(ya, yb, xa, xb)] = acc;
                }
            }
        }
    }
    Correlation::new(table).expect("mixing preserves normalization")
}

/// The pair `(J_3, S)` of a strategy or an observation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EveStats {
    pub j3: f64,
    pub s: f64,
}

impl EveStats {
    /// Reads `(J_3, S)` off a table using the cross-basis `J_3` form.
    pub fn of(p: &Correlation) -> Self {
        EveStats { j3: j3_effective(p), s: asynchronicity(p).total }
    }
}

/// Expected observed `(J_3, S)` when Eve's strategy has statistics `e`:
///
/// `<1 - J_3> = (1 - ε + 3ε²/4)(1 - J̃_3) + (3ε/2 - 9ε²/8) S̃`
/// `<S>       = (1 - 2ε + 3ε²/2) S̃ + (4ε/3 - ε²)(1 - J̃_3)`
///
/// Exact for symmetric strategies.
pub fn forward_stats(e: EveStats, eps: f64) -> Result<EveStats> {
    check_epsilon(eps)?;
    let [[a, b], [c, d]] = mixing_matrix(eps);
    let u = 1.0 - e.j3;
    Ok(EveStats {
        j3: 1.0 - (a * u + b * e.s),
        s: c * u + d * e.s,
    })
}

/// Rows map `(1 - J̃_3, S̃)` to `(<1 - J_3>, <S>)`.
pub fn mixing_matrix(eps: f64) -> [[f64; 2]; 2] {
    let e2 = eps * eps;
    [
        [1.0 - eps + 0.75 * e2, 1.5 * eps - 1.125 * e2],
        [4.0 / 3.0 * eps - e2, 1.0 - 2.0 * eps + 1.5 * e2],
    ]
}

/// Eve's `(J̃_3, S̃)` given observed `<J_3> = -1/8 + λ` and `<S> = μ`.
pub fn invert_stats(lambda: f64, mu: f64, eps: f64) -> Result<EveStats> {
    check_epsilon(eps)?;
    let den = 3.0 * eps - 2.0;
    if den.abs() < 1e-12 {
        return Err(Error::Singular("epsilon = 2/3 leaves Eve's statistics undetermined".into()));
    }
    let den2 = den * den;
    let g = 3.0 * eps * eps - 4.0 * eps;
    Ok(EveStats {
        j3: (g * (3.0 - 6.0 * mu + 8.0 * lambda) + 16.0 * lambda - 2.0) / (4.0 * den2),
        s: (g * (6.0 * mu - 8.0 * lambda + 9.0) + 24.0 * mu) / (6.0 * den2),
    })
}

fn check_tolerances(lambda: f64, mu: f64) -> Result<()> {
    if !(0.0..=0.125).contains(&lambda) {
        return Err(Error::InputDomain(format!("lambda {lambda} outside [0, 1/8]")));
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::InputDomain(format!("mu {mu} must be nonnegative")));
    }
    Ok(())
}

/// Closed form without the `δ ≤ μ` range check.
fn delta_threshold_formula(delta: f64, lambda: f64, mu: f64) -> Result<f64> {
    let radicand = 144.0 * (delta - 1.0) * lambda + 64.0 * lambda * lambda
        + 6.0 * (36.0 * delta + 8.0 * lambda - 9.0) * mu
        - 72.0 * mu * mu
        - 162.0 * delta
        + 81.0;
    if radicand < 0.0 {
        return Err(Error::NoThreshold { radicand });
    }
    let den = 6.0 * mu - 18.0 * delta - 8.0 * lambda + 9.0;
    if den == 0.0 {
        return Err(Error::Singular("threshold denominator vanishes".into()));
    }
    Ok(MAX_EPSILON - MAX_EPSILON * radicand.sqrt() / den)
}

/// Uncertainty beyond which every strategy matching `(λ, μ)` has `S̃ < 0`.
pub fn epsilon_max(lambda: f64, mu: f64) -> Result<f64> {
    check_tolerances(lambda, mu)?;
    delta_threshold_formula(0.0, lambda, mu)
}

/// Uncertainty at which matching `(λ, μ)` forces `S̃ = δ`. Equals
/// [`epsilon_max`] for `δ = 0`.
pub fn epsilon_delta_max(delta: f64, lambda: f64, mu: f64) -> Result<f64> {
    check_tolerances(lambda, mu)?;
    if !(0.0..=mu).contains(&delta) {
        return Err(Error::InputDomain(format!("delta {delta} outside [0, mu = {mu}]")));
    }
    delta_threshold_formula(delta, lambda, mu)
}

/// Root of `S̃(ε) = δ` on `[0, 2/3)` by bisection on [`invert_stats`].
/// Independent of the closed-form thresholds.
pub fn threshold_by_bisection(delta: f64, lambda: f64, mu: f64, tol: f64) -> Result<f64> {
    check_tolerances(lambda, mu)?;
    let f = |e: f64| invert_stats(lambda, mu, e).map(|s| s.s - delta);
    let mut lo = 0.0;
    let mut hi = MAX_EPSILON - 1e-9;
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo == 0.0 {
        return Ok(lo);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InputDomain(format!(
            "S~ - delta does not change sign on [0, 2/3) (lambda {lambda}, mu {mu}, delta {delta})"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Both thresholds at one observation. A threshold is `None` where its
/// closed form has no real value or `δ` lies outside `[0, μ]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub lambda: f64,
    pub mu: f64,
    pub delta: f64,
    pub epsilon_max: Option<f64>,
    pub epsilon_delta_max: Option<f64>,
}

pub fn thresholds(lambda: f64, mu: f64, delta: f64) -> Result<Thresholds> {
    check_tolerances(lambda, mu)?;
    let soft = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NoThreshold { .. }) | Err(Error::Singular(_)) => Ok(None),
        Err(Error::InputDomain(_)) if delta > mu => Ok(None),
        Err(e) => Err(e),
    };
    Ok(Thresholds {
        lambda,
        mu,
        delta,
        epsilon_max: soft(epsilon_max(lambda, mu))?,
        epsilon_delta_max: soft(epsilon_delta_max(delta, lambda, mu))?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub mu: f64,
    pub epsilon: f64,
    /// False where `δ > μ`: the value is the formula's, outside its stated range.
    pub in_domain: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityCurve {
    pub lambda: f64,
    pub delta: f64,
    pub points: Vec<CurvePoint>,
    /// Whether `ε` strictly increases along the grid.
    pub monotone: bool,
}

impl FeasibilityCurve {
    /// Two whitespace-separated columns `μ ε`, one point per line.
    pub fn write_data<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for p in &self.points {
            writeln!(w, "{} {}", crate::json::fmt_f64(p.mu), crate::json::fmt_f64(p.epsilon))?;
        }
        Ok(())
    }
}

/// Tabulates the `δ` threshold over `μ ∈ [lo, hi]` in steps of `step`.
pub fn feasibility_curve(
    lambda: f64,
    mu_range: (f64, f64),
    delta: f64,
    step: f64,
) -> Result<FeasibilityCurve> {
    let (lo, hi) = mu_range;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InputDomain("curve step must be positive".into()));
    }
    if !(lo <= hi) || lo < 0.0 {
        return Err(Error::InputDomain(format!("invalid mu range [{lo}, {hi}]")));
    }
    if delta < 0.0 {
        return Err(Error::InputDomain("delta must be nonnegative".into()));
    }
    check_tolerances(lambda, lo)?;
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let points = (0..count)
        .into_par_iter()
        .map(|i| {
            let mu = lo + i as f64 * step;
            let epsilon = delta_threshold_formula(delta, lambda, mu)?;
            Ok(CurvePoint { mu, epsilon, in_domain: delta <= mu })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = points.windows(2).all(|w| w[1].epsilon > w[0].epsilon);
    Ok(FeasibilityCurve { lambda, delta, points, monotone })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn ideal_strategy_mixing_matches_forward(eps in 0.0..=MAX_EPSILON) {
            let observed = EveStats::of(&observed_correlation(&EveModel::ideal(eps).unwrap()));
            let predicted = forward_stats(EveStats { j3: -0.125, s: 0.0 }, eps).unwrap();
            prop_assert!((observed.j3 - predicted.j3).abs() < 1e-12);
            prop_assert!((observed.s - predicted.s).abs() < 1e-12);
        }

        #[test]
        fn inverse_undoes_forward(j3 in -0.5..1.0f64, s in 0.0..1.0f64, eps in 0.0..0.6f64) {
            prop_assume!((3.0 * eps - 2.0).abs() >= 0.05);
            let f = forward_stats(EveStats { j3, s }, eps).unwrap();
            let back = invert_stats(f.j3 + 0.125, f.s, eps).unwrap();
            prop_assert!((back.j3 - j3).abs() < 1e-10);
            prop_assert!((back.s - s).abs() < 1e-10);
        }
    }
}
