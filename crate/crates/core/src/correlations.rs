//! Correlation tables `p(y_A, y_B | x_A, x_B)` for three inputs and two
//! outputs, their construction from quantum and classical strategies, the
//! bias-form coordinates, and the structural predicates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{validate_pvm, BipartiteState, CMatrix, PvmFamily, DEFAULT_TOL};
use crate::{INPUTS, OUTPUTS};

/// Number of table entries.
pub const TABLE_LEN: usize = OUTPUTS * OUTPUTS * INPUTS * INPUTS;

/// Position of `p(y_A, y_B | x_A, x_B)` in the flat table: output pair
/// major, input pair minor, matching the 4×9 layout rows `(y_A, y_B)` and
/// columns `(x_A, x_B)`.
pub const fn index(ya: usize, yb: usize, xa: usize, xb: usize) -> usize {
    (ya * OUTPUTS + yb) * INPUTS * INPUTS + xa * INPUTS + xb
}

/// A conditional distribution over output pairs for every input pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CorrelationFile", into = "CorrelationFile")]
pub struct Correlation {
    table: [f64; TABLE_LEN],
}

/// On-disk form: `{"p": [36 numbers]}` in [`index`] order.
#[derive(Serialize, Deserialize)]
struct CorrelationFile {
    p: Vec<f64>,
}

impl TryFrom<CorrelationFile> for Correlation {
    type Error = Error;
    fn try_from(f: CorrelationFile) -> Result<Self> {
        let table: [f64; TABLE_LEN] = f.p.try_into().map_err(|v: Vec<f64>| {
            Error::Parse(format!("expected {TABLE_LEN} entries in `p`, got {}", v.len()))
        })?;
        Correlation::new(table)
    }
}

impl From<Correlation> for CorrelationFile {
    fn from(c: Correlation) -> Self {
        CorrelationFile { p: c.table.to_vec() }
    }
}

impl Correlation {
    /// Validates entries in `[0, 1]` and per-input-pair normalization to [`DEFAULT_TOL`].
    pub fn new(table: [f64; TABLE_LEN]) -> Result<Self> {
        Self::with_tolerance(table, DEFAULT_TOL)
    }

    pub fn with_tolerance(table: [f64; TABLE_LEN], tol: f64) -> Result<Self> {
        for (i, &v) in table.iter().enumerate() {
            if !v.is_finite() || v < -tol || v > 1.0 + tol {
                return Err(Error::InputDomain(format!("entry {i} = {v} is not a probability")));
            }
        }
        let c = Correlation { table };
        for xa in 0..INPUTS {
            for xb in 0..INPUTS {
                let s = c.pair_total(xa, xb);
                if (s - 1.0).abs() > tol {
                    return Err(Error::InputDomain(format!(
                        "distribution for inputs ({xa},{xb}) sums to {s}"
                    )));
                }
            }
        }
        Ok(c)
    }

    /// Every entry 1/4: independent uniform outputs.
    pub fn uniform() -> Self {
        Correlation { table: [0.25; TABLE_LEN] }
    }

    /// The honest-device correlation, `tracial_correlation(ideal_pvms())`.
    pub fn ideal() -> Self {
        tracial_correlation(&crate::hilbert::ideal_pvms()).expect("ideal family is valid")
    }

    /// Builds a table from `f(y_A, y_B, x_A, x_B)`.
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut table = [0.0; TABLE_LEN];
        for ya in 0..OUTPUTS {
            for yb in 0..OUTPUTS {
                for xa in 0..INPUTS {
                    for xb in 0..INPUTS {
                        table[index(ya, yb, xa, xb)] = f(ya, yb, xa, xb);
                    }
                }
            }
        }
        Self::new(table)
    }

    pub fn p(&self, ya: usize, yb: usize, xa: usize, xb: usize) -> f64 {
        self.table[index(ya, yb, xa, xb)]
    }

    pub fn table(&self) -> &[f64; TABLE_LEN] {
        &self.table
    }

    /// The four outcome probabilities for one input pair, ordered `(0,0),(0,1),(1,0),(1,1)`.
    pub fn distribution(&self, xa: usize, xb: usize) -> [f64; 4] {
        [
            self.p(0, 0, xa, xb),
            self.p(0, 1, xa, xb),
            self.p(1, 0, xa, xb),
            self.p(1, 1, xa, xb),
        ]
    }

    fn pair_total(&self, xa: usize, xb: usize) -> f64 {
        self.distribution(xa, xb).iter().sum()
    }

    /// Alice's marginal `Σ_{y_B} p(y_A, y_B | x_A, x_B)`.
    pub fn marginal_a(&self, ya: usize, xa: usize, xb: usize) -> f64 {
        (0..OUTPUTS).map(|yb| self.p(ya, yb, xa, xb)).sum()
    }

    /// Bob's marginal `Σ_{y_A} p(y_A, y_B | x_A, x_B)`.
    pub fn marginal_b(&self, yb: usize, xa: usize, xb: usize) -> f64 {
        (0..OUTPUTS).map(|ya| self.p(ya, yb, xa, xb)).sum()
    }
}

/// Biases `a`, `b` and correlators `c` of a nonsignalling correlation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasForm {
    pub a: [f64; INPUTS],
    pub b: [f64; INPUTS],
    pub c: [[f64; INPUTS]; INPUTS],
}

impl BiasForm {
    /// The synchronous symmetric form with zero biases and the given
    /// off-diagonal correlators `(c01, c02, c12)`.
    pub fn synchronous(off_diagonal: [f64; 3]) -> Self {
        let [c01, c02, c12] = off_diagonal;
        BiasForm {
            a: [0.0; INPUTS],
            b: [0.0; INPUTS],
            c: [[1.0, c01, c02], [c01, 1.0, c12], [c02, c12, 1.0]],
        }
    }

    /// `(c01, c02, c12)`.
    pub fn off_diagonal(&self) -> [f64; 3] {
        [self.c[0][1], self.c[0][2], self.c[1][2]]
    }

    /// Inverse of [`to_bias_form`]:
    /// `p(y_A,y_B|x_A,x_B) = (1 + s_A a + s_B b + s_A s_B c)/4` with `s = (-1)^y`.
    /// Fails when the result is not a probability table.
    pub fn to_correlation(&self) -> Result<Correlation> {
        Correlation::from_fn(|ya, yb, xa, xb| {
            let sa = sign(ya);
            let sb = sign(yb);
            (1.0 + sa * self.a[xa] + sb * self.b[xb] + sa * sb * self.c[xa][xb]) / 4.0
        })
    }
}

fn sign(y: usize) -> f64 {
    if y == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A deterministic response `f : X → Y`; `outputs[x]` is `f(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Deterministic(pub [u8; INPUTS]);

impl Deterministic {
    /// All `2^3` functions, ordered by the binary number `f(0) f(1) f(2)`.
    pub fn all() -> impl Iterator<Item = Deterministic> {
        (0u8..8).map(|n| Deterministic([(n >> 2) & 1, (n >> 1) & 1, n & 1]))
    }
}

/// A shared-randomness mixture of deterministic response functions.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalStrategy {
    terms: Vec<(Deterministic, f64)>,
}

impl ClassicalStrategy {
    pub fn new(terms: Vec<(Deterministic, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InputDomain("strategy needs at least one function".into()));
        }
        if terms.iter().any(|(f, w)| !(*w >= 0.0) || f.0.iter().any(|&y| y > 1)) {
            return Err(Error::InputDomain(
                "weights must be nonnegative and outputs binary".into(),
            ));
        }
        let total: f64 = terms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InputDomain(format!("weights sum to {total}")));
        }
        Ok(ClassicalStrategy { terms })
    }

    pub fn deterministic(f: Deterministic) -> Self {
        ClassicalStrategy { terms: vec![(f, 1.0)] }
    }

    pub fn terms(&self) -> &[(Deterministic, f64)] {
        &self.terms
    }
}

/// `p(y_A,y_B|x_A,x_B) = (1/d) tr(E^{x_A}_{y_A} E^{x_B}_{y_B})`.
pub fn tracial_correlation(p: &PvmFamily) -> Result<Correlation> {
    let report = validate_pvm(p, DEFAULT_TOL);
    if let Some(why) = report.failure() {
        return Err(Error::Validation(why));
    }
    tracial_correlation_unchecked(p)
}

/// [`tracial_correlation`] without re-validating the family. Used on
/// families whose construction already guarantees the projector axioms.
pub(crate) fn tracial_correlation_unchecked(p: &PvmFamily) -> Result<Correlation> {
    let d = p.dim() as f64;
    let mut table = [0.0; TABLE_LEN];
    for xa in 0..INPUTS {
        for xb in 0..INPUTS {
            for ya in 0..OUTPUTS {
                for yb in 0..OUTPUTS {
                    let t = p.effect(xa, ya).trace_product(p.effect(xb, yb)).re / d;
                    table[index(ya, yb, xa, xb)] = t;
                }
            }
        }
    }
    Correlation::with_tolerance(table, DEFAULT_TOL)
}

/// The shared state of a general quantum correlation.
#[derive(Clone, Debug)]
pub enum SharedState {
    Pure(BipartiteState),
    /// A density operator on `C^{d_A} ⊗ C^{d_B}`.
    Mixed { dims: (usize, usize), rho: CMatrix },
}

impl SharedState {
    fn dims(&self) -> (usize, usize) {
        match self {
            SharedState::Pure(s) => s.dims(),
            SharedState::Mixed { dims, .. } => *dims,
        }
    }
}

/// `p(y_A,y_B|x_A,x_B) = tr(ρ (E^{x_A}_{y_A} ⊗ F^{x_B}_{y_B}))`.
pub fn correlation_from_state(
    state: &SharedState,
    alice: &PvmFamily,
    bob: &PvmFamily,
) -> Result<Correlation> {
    let (da, db) = state.dims();
    if alice.dim() != da || bob.dim() != db {
        return Err(Error::InputDomain(format!(
            "state dims {da}x{db} do not match measurement dims {}x{}",
            alice.dim(),
            bob.dim()
        )));
    }
    let rho = match state {
        SharedState::Pure(s) => s.density(),
        SharedState::Mixed { rho, .. } => {
            if rho.dim() != da * db {
                return Err(Error::InputDomain("density operator dimension mismatch".into()));
            }
            rho.clone()
        }
    };
    let mut table = [0.0; TABLE_LEN];
    for xa in 0..INPUTS {
        for xb in 0..INPUTS {
            for ya in 0..OUTPUTS {
                for yb in 0..OUTPUTS {
                    let joint = alice.effect(xa, ya).kron(bob.effect(xb, yb));
                    table[index(ya, yb, xa, xb)] = rho.trace_product(&joint).re;
                }
            }
        }
    }
    Correlation::new(table)
}

/// `p(y_A,y_B|x_A,x_B) = Σ_ω μ(ω) [y_A = f_ω(x_A)] [y_B = f_ω(x_B)]`.
pub fn classical_correlation(s: &ClassicalStrategy) -> Correlation {
    let mut table = [0.0; TABLE_LEN];
    for (f, w) in s.terms() {
        for xa in 0..INPUTS {
            for xb in 0..INPUTS {
                let (ya, yb) = (f.0[xa] as usize, f.0[xb] as usize);
                table[index(ya, yb, xa, xb)] += w;
            }
        }
    }
    Correlation::new(table).expect("classical mixtures are normalized")
}

/// Bias form of a nonsignalling correlation; `a` and `b` are read from
/// every column and must agree to `tol`.
pub fn to_bias_form(p: &Correlation, tol: f64) -> Result<BiasForm> {
    let signed = |xa: usize, xb: usize, wa: bool, wb: bool| -> f64 {
        let mut acc = 0.0;
        for ya in 0..OUTPUTS {
            for yb in 0..OUTPUTS {
                let mut s = 1.0;
                if wa {
                    s *= sign(ya);
                }
                if wb {
                    s *= sign(yb);
                }
                acc += s * p.p(ya, yb, xa, xb);
            }
        }
        acc
    };
    let mut form = BiasForm { a: [0.0; INPUTS], b: [0.0; INPUTS], c: [[0.0; INPUTS]; INPUTS] };
    for x in 0..INPUTS {
        form.a[x] = signed(x, 0, true, false);
        form.b[x] = signed(0, x, false, true);
        for other in 1..INPUTS {
            let a_alt = signed(x, other, true, false);
            if (a_alt - form.a[x]).abs() > tol {
                return Err(Error::Consistency(format!(
                    "Alice's marginal for x_A={x} changes with x_B (x_B=0: {}, x_B={other}: {a_alt})",
                    form.a[x]
                )));
            }
            let b_alt = signed(other, x, false, true);
            if (b_alt - form.b[x]).abs() > tol {
                return Err(Error::Consistency(format!(
                    "Bob's marginal for x_B={x} changes with x_A (x_A=0: {}, x_A={other}: {b_alt})",
                    form.b[x]
                )));
            }
        }
    }
    for xa in 0..INPUTS {
        for xb in 0..INPUTS {
            form.c[xa][xb] = signed(xa, xb, true, true);
        }
    }
    Ok(form)
}

/// Synchronous form realized by unit vectors: `c_{x_A x_B} = <u_{x_A}, u_{x_B}>`, zero biases.
pub fn from_unit_vectors(u: [&[f64]; INPUTS]) -> Result<BiasForm> {
    let n = u[0].len();
    if n == 0 || u.iter().any(|v| v.len() != n) {
        return Err(Error::InputDomain("vectors must share a positive dimension".into()));
    }
    for (x, v) in u.iter().enumerate() {
        let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InputDomain(format!("u_{x} has norm {norm}")));
        }
    }
    let dot = |i: usize, j: usize| u[i].iter().zip(u[j]).map(|(a, b)| a * b).sum::<f64>();
    let mut form = BiasForm::synchronous([dot(0, 1), dot(0, 2), dot(1, 2)]);
    for x in 0..INPUTS {
        form.c[x][x] = 1.0;
    }
    Ok(form)
}

/// Per-input and total asynchronicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Asynchronicity {
    /// `S = (1/3) Σ_x S_x`.
    pub total: f64,
    /// `S_x = Σ_{y_A ≠ y_B} p(y_A, y_B | x, x)`.
    pub per_input: [f64; INPUTS],
}

pub fn asynchronicity(p: &Correlation) -> Asynchronicity {
    let per_input: [f64; INPUTS] = std::array::from_fn(|x| p.p(0, 1, x, x) + p.p(1, 0, x, x));
    Asynchronicity {
        total: per_input.iter().sum::<f64>() / INPUTS as f64,
        per_input,
    }
}

pub fn check_nonsignalling(p: &Correlation, tol: f64) -> bool {
    for y in 0..OUTPUTS {
        for x in 0..INPUTS {
            for other in 1..INPUTS {
                if (p.marginal_a(y, x, other) - p.marginal_a(y, x, 0)).abs() > tol {
                    return false;
                }
                if (p.marginal_b(y, other, x) - p.marginal_b(y, 0, x)).abs() > tol {
                    return false;
                }
            }
        }
    }
    true
}

pub fn check_symmetric(p: &Correlation, tol: f64) -> bool {
    (0..OUTPUTS).all(|ya| {
        (0..OUTPUTS).all(|yb| {
            (0..INPUTS).all(|xa| {
                (0..INPUTS).all(|xb| (p.p(ya, yb, xa, xb) - p.p(yb, ya, xb, xa)).abs() <= tol)
            })
        })
    })
}

pub fn check_synchronous(p: &Correlation, tol: f64) -> bool {
    (0..INPUTS).all(|x| p.p(0, 1, x, x) <= tol && p.p(1, 0, x, x) <= tol)
}

/// Entrywise max distance between two tables.
pub fn max_distance(p: &Correlation, q: &Correlation) -> f64 {
    p.table().iter().zip(q.table()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{ideal_pvms, pvm_from_angles};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    /// Eq.-layout of the honest table, in eighths: rows (y_A,y_B), columns (x_A,x_B).
    const IDEAL_EIGHTHS: [[f64; 9]; 4] = [
        [4.0, 1.0, 1.0, 1.0, 4.0, 1.0, 1.0, 1.0, 4.0],
        [0.0, 3.0, 3.0, 3.0, 0.0, 3.0, 3.0, 3.0, 0.0],
        [0.0, 3.0, 3.0, 3.0, 0.0, 3.0, 3.0, 3.0, 0.0],
        [4.0, 1.0, 1.0, 1.0, 4.0, 1.0, 1.0, 1.0, 4.0],
    ];

    fn ideal_reference() -> [f64; TABLE_LEN] {
        let mut t = [0.0; TABLE_LEN];
        for (row, vals) in IDEAL_EIGHTHS.iter().enumerate() {
            for (col, v) in vals.iter().enumerate() {
                t[row * 9 + col] = v / 8.0;
            }
        }
        t
    }

    #[test]
    fn ideal_tracial_table_matches_reference() {
        let p = tracial_correlation(&ideal_pvms()).unwrap();
        let r = ideal_reference();
        for i in 0..TABLE_LEN {
            assert!((p.table()[i] - r[i]).abs() <= 1e-12, "entry {i}");
        }
        assert_eq!(p.p(0, 0, 0, 0), 0.5);
        assert!((p.p(0, 1, 0, 1) - 0.375).abs() < 1e-15);
        assert!((p.p(0, 0, 0, 1) - 0.125).abs() < 1e-15);
        assert!(asynchronicity(&p).total.abs() < 1e-15);
    }

    #[test]
    fn identical_measurements_never_disagree() {
        let p = tracial_correlation(&pvm_from_angles([0.7, 0.7, 0.7]).unwrap()).unwrap();
        for xa in 0..3 {
            for xb in 0..3 {
                assert!(p.p(0, 1, xa, xb).abs() < 1e-15);
                assert!(p.p(1, 0, xa, xb).abs() < 1e-15);
            }
        }
        let form = to_bias_form(&p, DEFAULT_TOL).unwrap();
        assert!(form.c.iter().flatten().all(|&c| (c - 1.0).abs() < 1e-12));
    }

    #[test]
    fn orthogonal_angles_anticorrelate() {
        let p = tracial_correlation(&pvm_from_angles([0.0, PI / 2.0, 0.0]).unwrap()).unwrap();
        let form = to_bias_form(&p, DEFAULT_TOL).unwrap();
        assert!((form.c[0][1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn epr_with_transposed_bob_matches_tracial() {
        let e = ideal_pvms();
        let p = correlation_from_state(&SharedState::Pure(BipartiteState::epr()), &e, &e.transpose())
            .unwrap();
        assert!(max_distance(&p, &tracial_correlation(&e).unwrap()) <= 1e-12);
        assert!(max_distance(&p, &Correlation::new(ideal_reference()).unwrap()) <= 1e-12);
    }

    #[test]
    fn product_state_factorizes() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let s = BipartiteState::product(&[c(0.6), c(0.8)], &[c(0.0), c(1.0)]).unwrap();
        let e = ideal_pvms();
        let f = pvm_from_angles([0.2, 1.3, -0.9]).unwrap();
        let p = correlation_from_state(&SharedState::Pure(s), &e, &f).unwrap();
        for xa in 0..3 {
            for xb in 0..3 {
                for ya in 0..2 {
                    for yb in 0..2 {
                        let pa = p.marginal_a(ya, xa, xb);
                        let pb = p.marginal_b(yb, xa, xb);
                        assert!((p.p(ya, yb, xa, xb) - pa * pb).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_state_is_uncorrelated() {
        let rho = CMatrix::identity(4).scale(0.25);
        let e = ideal_pvms();
        let p = correlation_from_state(&SharedState::Mixed { dims: (2, 2), rho }, &e, &e).unwrap();
        let form = to_bias_form(&p, DEFAULT_TOL).unwrap();
        assert!(form.a.iter().chain(&form.b).all(|v| v.abs() < 1e-12));
        assert!(form.c.iter().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn mismatched_dims_are_rejected() {
        let e = PvmFamily::direct_sum(&[&ideal_pvms(), &ideal_pvms()]).unwrap();
        let err = correlation_from_state(&SharedState::Pure(BipartiteState::epr()), &e, &ideal_pvms());
        assert!(matches!(err, Err(Error::InputDomain(_))));
    }

    #[test]
    fn ideal_bias_form() {
        let form = to_bias_form(&Correlation::ideal(), DEFAULT_TOL).unwrap();
        assert!(form.a.iter().chain(&form.b).all(|v| v.abs() < 1e-12));
        for v in form.off_diagonal() {
            assert!((v + 0.5).abs() < 1e-12);
        }
        for x in 0..3 {
            assert!((form.c[x][x] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_bias_form_is_zero() {
        let form = to_bias_form(&Correlation::uniform(), DEFAULT_TOL).unwrap();
        assert_eq!(form.a, [0.0; 3]);
        assert_eq!(form.b, [0.0; 3]);
        assert_eq!(form.c, [[0.0; 3]; 3]);
    }

    #[test]
    fn deterministic_strategy_biases() {
        let p = classical_correlation(&ClassicalStrategy::deterministic(Deterministic([0, 1, 0])));
        let form = to_bias_form(&p, DEFAULT_TOL).unwrap();
        assert_eq!(form.a, [1.0, -1.0, 1.0]);
        assert_eq!(form.b, [1.0, -1.0, 1.0]);
        assert_eq!(form.off_diagonal(), [-1.0, 1.0, -1.0]);
    }

    #[test]
    fn constant_strategy_is_fully_correlated() {
        let p = classical_correlation(&ClassicalStrategy::deterministic(Deterministic([0, 0, 0])));
        let form = to_bias_form(&p, DEFAULT_TOL).unwrap();
        assert!(form.c.iter().flatten().all(|&v| v == 1.0));
    }

    #[test]
    fn uniform_mixture_of_all_functions() {
        let s = ClassicalStrategy::new(Deterministic::all().map(|f| (f, 0.125)).collect()).unwrap();
        let p = classical_correlation(&s);
        let form = to_bias_form(&p, DEFAULT_TOL).unwrap();
        assert!(form.off_diagonal().iter().all(|v| v.abs() < 1e-15));
        assert!(check_synchronous(&p, 0.0) && check_symmetric(&p, 0.0));
    }

    #[test]
    fn bad_strategies_are_rejected() {
        assert!(ClassicalStrategy::new(vec![]).is_err());
        assert!(ClassicalStrategy::new(vec![(Deterministic([0, 0, 0]), 0.5)]).is_err());
        assert!(ClassicalStrategy::new(vec![(Deterministic([0, 2, 0]), 1.0)]).is_err());
        assert!(ClassicalStrategy::new(vec![
            (Deterministic([0, 0, 0]), 1.5),
            (Deterministic([1, 0, 0]), -0.5)
        ])
        .is_err());
    }

    #[test]
    fn signalling_table_names_the_marginal() {
        let mut t = *Correlation::ideal().table();
        t[index(0, 0, 0, 1)] += 0.01;
        for y in 0..4 {
            t[y * 9 + 1] /= 1.01;
        }
        let p = Correlation::new(t).unwrap();
        assert!(!check_nonsignalling(&p, DEFAULT_TOL));
        let err = to_bias_form(&p, DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::Consistency(ref m) if m.contains("marginal")));
    }

    #[test]
    fn predicates_on_reference_tables() {
        let ideal = Correlation::ideal();
        assert!(check_nonsignalling(&ideal, DEFAULT_TOL));
        assert!(check_symmetric(&ideal, DEFAULT_TOL));
        assert!(check_synchronous(&ideal, DEFAULT_TOL));
        let u = Correlation::uniform();
        assert!(check_nonsignalling(&u, DEFAULT_TOL));
        assert!(check_symmetric(&u, DEFAULT_TOL));
        assert!(!check_synchronous(&u, DEFAULT_TOL));
        assert_eq!(asynchronicity(&u).total, 0.5);
    }

    #[test]
    fn unit_vectors_at_third_turns() {
        let v = |t: f64| [t.cos(), t.sin()];
        let (a, b, c) = (v(0.0), v(2.0 * PI / 3.0), v(4.0 * PI / 3.0));
        let form = from_unit_vectors([&a, &b, &c]).unwrap();
        for x in form.off_diagonal() {
            assert!((x + 0.5).abs() < 1e-12);
        }
        let j3 = (1.0 + form.off_diagonal().iter().sum::<f64>()) / 4.0;
        assert!((j3 + 0.125).abs() < 1e-12);

        let same = from_unit_vectors([&a, &a, &a]).unwrap();
        assert!(same.c.iter().flatten().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(from_unit_vectors([&[1.0, 1.0], &a, &a]).is_err());
    }

    #[test]
    fn perturbed_unit_vectors_match_doubled_block_angles() {
        // Planar angles (0, 4π/3 + 0.1, 2π/3): the Gram matrix of a qubit
        // family with projector angles (0, 2π/3 + 0.05, π/3).
        let v = |t: f64| [t.cos(), t.sin()];
        let (a, b, c) = (v(0.0), v(4.0 * PI / 3.0 + 0.1), v(2.0 * PI / 3.0));
        let form = from_unit_vectors([&a, &b, &c]).unwrap();
        let [c01, c02, c12] = form.off_diagonal();
        assert!((c01 + 0.411_044).abs() < 1e-6);
        assert!((c02 + 0.5).abs() < 1e-12);
        assert!((c12 + 0.583_960).abs() < 1e-6);
        let j3 = (1.0 + c01 + c02 + c12) / 4.0;
        assert!((j3 + 0.123_751).abs() < 1e-6);

        let p = pvm_from_angles([0.0, 2.0 * PI / 3.0 + 0.05, PI / 3.0]).unwrap();
        let q = to_bias_form(&tracial_correlation(&p).unwrap(), DEFAULT_TOL).unwrap();
        for (x, y) in q.off_diagonal().iter().zip(form.off_diagonal()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn literal_perturbed_planar_angles() {
        // Planar angles (0, 2π/3 + 0.05, 4π/3), evaluated directly.
        let v = |t: f64| [t.cos(), t.sin()];
        let (a, b, c) = (v(0.0), v(2.0 * PI / 3.0 + 0.05), v(4.0 * PI / 3.0));
        let form = from_unit_vectors([&a, &b, &c]).unwrap();
        let [c01, c02, c12] = form.off_diagonal();
        assert!((c01 - (2.0 * PI / 3.0 + 0.05).cos()).abs() < 1e-15);
        assert!((c02 + 0.5).abs() < 1e-12);
        assert!((c12 - (2.0 * PI / 3.0 - 0.05).cos()).abs() < 1e-12);
    }

    #[test]
    fn bias_roundtrip_on_ideal() {
        let p = Correlation::ideal();
        let back = to_bias_form(&p, DEFAULT_TOL).unwrap().to_correlation().unwrap();
        assert!(max_distance(&p, &back) < 1e-12);
    }

    #[test]
    fn table_validation() {
        let mut t = [0.25; TABLE_LEN];
        t[0] = 0.3;
        assert!(Correlation::new(t).is_err());
        t[0] = -0.1;
        assert!(Correlation::new(t).is_err());
    }

    #[test]
    fn json_layout_is_flat_p_array() {
        let s = serde_json::to_string(&Correlation::uniform()).unwrap();
        assert!(s.starts_with("{\"p\":[0.25,"));
        let back: Correlation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, Correlation::uniform());
        assert!(serde_json::from_str::<Correlation>("{\"p\":[0.5,0.5]}").is_err());
    }
}
