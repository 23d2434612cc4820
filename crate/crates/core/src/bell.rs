//! The four synchronous Bell functionals for three inputs and two outputs,
//! the cross-basis form of `J_3` that the protocol estimates, and
//! classification against the classical and quantum bounds.

use serde::Serialize;

use crate::correlations::{
    check_nonsignalling, check_symmetric, check_synchronous, to_bias_form, BiasForm, Correlation,
};
use crate::error::{Error, Result};
use crate::INPUTS;

/// Absolute tolerance for calling a functional violated.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Quantum lower bound on every synchronous Bell functional.
pub const QUANTUM_BOUND: f64 = -0.125;

/// Ordered cross-basis input pairs entering [`j3_effective`].
pub const CROSS_PAIRS: [(usize, usize); 6] = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BellReport {
    /// `J_0 .. J_3`.
    #[serde(rename = "J")]
    pub j: [f64; 4],
    pub classical: bool,
    pub quantum_feasible: bool,
    /// The most negative functional below `-tol`, if any.
    pub violated_index: Option<usize>,
}

impl BellReport {
    fn from_values(j: [f64; 4], tol: f64) -> Self {
        let negatives = j.iter().filter(|&&v| v < -tol).count();
        let violated_index = (0..4)
            .filter(|&i| j[i] < -tol)
            .min_by(|&a, &b| j[a].total_cmp(&j[b]));
        let below_quantum = j.iter().any(|&v| v < QUANTUM_BOUND - tol);
        BellReport {
            j,
            classical: negatives == 0,
            quantum_feasible: !below_quantum && negatives <= 1,
            violated_index,
        }
    }
}

/// `J_i` from the off-diagonal correlators alone.
pub fn functionals_from_correlators([c01, c02, c12]: [f64; 3]) -> [f64; 4] {
    [
        (1.0 - c01 - c02 + c12) / 4.0,
        (1.0 - c01 + c02 - c12) / 4.0,
        (1.0 + c01 - c02 - c12) / 4.0,
        (1.0 + c01 + c02 + c12) / 4.0,
    ]
}

/// Evaluates the functionals on a symmetric synchronous bias form
/// (`c_xx = 1`, `a = b`, `c` symmetric).
pub fn bell_functionals(form: &BiasForm) -> Result<BellReport> {
    bell_functionals_tol(form, VIOLATION_TOL)
}

pub fn bell_functionals_tol(form: &BiasForm, tol: f64) -> Result<BellReport> {
    for x in 0..INPUTS {
        if (form.c[x][x] - 1.0).abs() > tol {
            return Err(Error::Precondition { predicate: "c_xx = 1" });
        }
        if (form.a[x] - form.b[x]).abs() > tol {
            return Err(Error::Precondition { predicate: "a = b" });
        }
        for y in 0..INPUTS {
            if (form.c[x][y] - form.c[y][x]).abs() > tol {
                return Err(Error::Precondition { predicate: "c symmetric" });
            }
        }
    }
    Ok(BellReport::from_values(
        functionals_from_correlators(form.off_diagonal()),
        tol,
    ))
}

/// `J_3 = 1 - (1/4) Σ` of the anti-correlated outcomes over the six ordered
/// cross-basis input pairs. Valid on any table; no synchronicity needed.
pub fn j3_effective(p: &Correlation) -> f64 {
    let s: f64 = CROSS_PAIRS
        .iter()
        .map(|&(xa, xb)| p.p(0, 1, xa, xb) + p.p(1, 0, xa, xb))
        .sum();
    1.0 - s / 4.0
}

/// `1 - J_3` in the cross-basis form, summed in the same order as [`j3_effective`].
pub fn one_minus_j3(p: &Correlation) -> f64 {
    let s: f64 = CROSS_PAIRS
        .iter()
        .map(|&(xa, xb)| p.p(0, 1, xa, xb) + p.p(1, 0, xa, xb))
        .sum();
    s / 4.0
}

/// Classifies a symmetric, synchronous, nonsignalling correlation.
pub fn classify(p: &Correlation) -> Result<BellReport> {
    classify_tol(p, VIOLATION_TOL)
}

pub fn classify_tol(p: &Correlation, tol: f64) -> Result<BellReport> {
    if !check_nonsignalling(p, tol) {
        return Err(Error::Precondition { predicate: "nonsignalling" });
    }
    if !check_symmetric(p, tol) {
        return Err(Error::Precondition { predicate: "symmetric" });
    }
    if !check_synchronous(p, tol) {
        return Err(Error::Precondition { predicate: "synchronous" });
    }
    let form = to_bias_form(p, tol)?;
    bell_functionals_tol(&form, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::{classical_correlation, ClassicalStrategy, Deterministic};
    use crate::hilbert::DEFAULT_TOL;

    fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn third_turn_correlators() {
        let r = bell_functionals(&BiasForm::synchronous([-0.5; 3])).unwrap();
        assert!(close(r.j, [0.375, 0.375, 0.375, -0.125], 1e-15));
        assert!(!r.classical && r.quantum_feasible);
        assert_eq!(r.violated_index, Some(3));
    }

    #[test]
    fn constant_and_uncorrelated() {
        let r = bell_functionals(&BiasForm::synchronous([1.0; 3])).unwrap();
        assert_eq!(r.j, [0.0, 0.0, 0.0, 1.0]);
        assert!(r.classical);
        let r = bell_functionals(&BiasForm::synchronous([0.0; 3])).unwrap();
        assert_eq!(r.j, [0.25; 4]);
    }

    #[test]
    fn non_unit_diagonal_is_a_precondition_error() {
        let mut f = BiasForm::synchronous([0.0; 3]);
        f.c[1][1] = 0.5;
        assert_eq!(
            bell_functionals(&f).unwrap_err(),
            Error::Precondition { predicate: "c_xx = 1" }
        );
    }

    #[test]
    fn effective_j3_on_reference_tables() {
        assert_eq!(j3_effective(&Correlation::ideal()), -0.125);
        assert_eq!(j3_effective(&Correlation::uniform()), 0.25);
    }

    #[test]
    fn ideal_classification() {
        let r = classify(&Correlation::ideal()).unwrap();
        assert!(!r.classical && r.quantum_feasible);
        assert_eq!(r.violated_index, Some(3));
    }

    #[test]
    fn classical_mixture_is_classical() {
        let s = ClassicalStrategy::new(vec![
            (Deterministic([0, 1, 1]), 0.3),
            (Deterministic([1, 1, 0]), 0.7),
        ])
        .unwrap();
        assert!(classify(&classical_correlation(&s)).unwrap().classical);
    }

    #[test]
    fn deterministic_functionals() {
        let p = classical_correlation(&ClassicalStrategy::deterministic(Deterministic([0, 0, 0])));
        assert_eq!(classify(&p).unwrap().j, [0.0, 0.0, 0.0, 1.0]);
        let p = classical_correlation(&ClassicalStrategy::deterministic(Deterministic([0, 1, 0])));
        assert_eq!(classify(&p).unwrap().j, [0.0, 1.0, 0.0, 0.0]);
        let s = ClassicalStrategy::new(Deterministic::all().map(|f| (f, 0.125)).collect()).unwrap();
        assert!(close(classify(&classical_correlation(&s)).unwrap().j, [0.25; 4], 1e-15));
    }

    #[test]
    fn anticorrelated_everywhere_exceeds_quantum_bound() {
        let p = BiasForm::synchronous([-1.0; 3]).to_correlation().unwrap();
        let r = classify(&p).unwrap();
        assert_eq!(r.j[3], -0.5);
        assert!(!r.quantum_feasible);
        assert_eq!(r.violated_index, Some(3));
    }

    #[test]
    fn classify_names_failed_predicate() {
        assert_eq!(
            classify(&Correlation::uniform()).unwrap_err(),
            Error::Precondition { predicate: "synchronous" }
        );
        let mut t = *Correlation::ideal().table();
        // Asymmetric but still synchronous and nonsignalling: shift weight on (0,1) only.
        let i = |ya, yb, xa, xb| crate::correlations::index(ya, yb, xa, xb);
        t[i(0, 0, 0, 1)] += 0.05;
        t[i(1, 1, 0, 1)] += 0.05;
        t[i(0, 1, 0, 1)] -= 0.05;
        t[i(1, 0, 0, 1)] -= 0.05;
        let p = Correlation::new(t).unwrap();
        assert_eq!(classify(&p).unwrap_err(), Error::Precondition { predicate: "symmetric" });
    }

    #[test]
    fn two_negative_functionals_are_quantum_infeasible() {
        let r = BellReport::from_values([-0.01, -0.01, 0.5, 0.5], VIOLATION_TOL);
        assert!(!r.quantum_feasible && !r.classical);
    }

    #[test]
    fn effective_form_matches_facet_form_on_ideal() {
        let p = Correlation::ideal();
        let r = bell_functionals(&to_bias_form(&p, DEFAULT_TOL).unwrap()).unwrap();
        assert!((r.j[3] - j3_effective(&p)).abs() < 1e-12);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::correlations::{classical_correlation, tracial_correlation, ClassicalStrategy, Deterministic};
    use crate::hilbert::{pvm_from_angles, PvmFamily, DEFAULT_TOL};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn quantum_families_obey_tsirelson_type_bounds(
            a in prop::array::uniform3(-3.2..3.2f64),
            b in prop::array::uniform3(-3.2..3.2f64),
        ) {
            let fa = pvm_from_angles(a).unwrap();
            let fb = pvm_from_angles(b).unwrap();
            for fam in [fa.clone(), PvmFamily::direct_sum(&[&fa, &fb]).unwrap()] {
                let r = classify(&tracial_correlation(&fam).unwrap()).unwrap();
                prop_assert!(r.j.iter().all(|&v| v >= QUANTUM_BOUND - 1e-9));
                prop_assert!(r.j.iter().filter(|&&v| v < -1e-9).count() <= 1);
                prop_assert!(r.quantum_feasible);
            }
        }

        #[test]
        fn classical_mixtures_satisfy_all_inequalities(w in prop::array::uniform8(0.0..1.0f64)) {
            let total: f64 = w.iter().sum();
            prop_assume!(total > 1e-6);
            let s = ClassicalStrategy::new(Deterministic::all().zip(w).map(|(f, x)| (f, x / total)).collect()).unwrap();
            let r = classify(&classical_correlation(&s)).unwrap();
            prop_assert!(r.j.iter().all(|&v| v >= -1e-12));
        }

        #[test]
        fn effective_j3_matches_facet_j3_on_synchronous_tables(
            c in prop::array::uniform3(-1.0..1.0f64),
        ) {
            // Any synchronous symmetric bias form that is a valid table.
            let form = BiasForm::synchronous(c);
            if let Ok(p) = form.to_correlation() {
                let facet = bell_functionals(&to_bias_form(&p, DEFAULT_TOL).unwrap()).unwrap().j[3];
                prop_assert!((j3_effective(&p) - facet).abs() < 1e-12);
            }
        }
    }
}
