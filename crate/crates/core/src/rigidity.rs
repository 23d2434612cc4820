//! Two-projections laboratory for the rigidity bound.
//!
//! A family is described by the dimensions of the four junk summands
//! `L_{αβ}` and a list of 2×2 blocks, one angle per block. From it we build the observables, the
//! nearby ideal family, and every quantity the bound talks about.
//!
//! Basis order is `L_00, L_01, L_10, L_11`, then the blocks. On the junk
//! summands the observables act as scalars:
//!
//! | summand | `M_0` | `M_1` | `M_2` (default) |
//! |---------|-------|-------|-----------------|
//! | `L_00`  | -1    | -1    | +1              |
//! | `L_01`  | -1    | +1    | +1              |
//! | `L_10`  | +1    | -1    | -1              |
//! | `L_11`  | +1    | +1    | -1              |
//!
//! On block `j`, `M_0 = diag(1, -1)` and `M_1` is the reflection at angle
//! `2θ_j`, `[[cos 2θ, sin 2θ], [sin 2θ, -cos 2θ]]`. The default `M_2` is the
//! reflection at `-2θ̂`, so at `θ = θ̂ = 2π/3` a block is exactly the ideal
//! qubit family.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{classify_tol, j3_effective, QUANTUM_BOUND};
use crate::correlations::{tracial_correlation, Correlation};
use crate::error::{Error, Result};
use crate::hilbert::{observable, CMatrix, PvmFamily, DEFAULT_TOL};
use crate::INPUTS;

/// The ideal block angle.
pub const THETA_HAT: f64 = 2.0 * PI / 3.0;

/// Half-width of the window block angles are confined to.
pub const ANGLE_WINDOW: f64 = PI / 6.0;

/// Slack on bound margins and on the angle window.
pub const MARGIN_TOL: f64 = 1e-9;

const SQRT3_OVER_2: f64 = 0.8660254037844386;

const M0_L: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];
const M1_L: [f64; 4] = [-1.0, 1.0, -1.0, 1.0];
const M2_L: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

/// A replacement third observable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct M2Override {
    /// `±1` on each of `L_00, L_01, L_10, L_11`.
    pub l_signs: [f64; 4],
    /// Per block: the reflection is taken at twice this angle.
    pub block_angles: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoProjectionForm {
    /// Dimensions of `L_00, L_01, L_10, L_11`.
    pub l: [usize; 4],
    pub angles: Vec<f64>,
    pub m2: Option<M2Override>,
}

impl TwoProjectionForm {
    pub fn new(l: [usize; 4], angles: Vec<f64>) -> Result<Self> {
        let f = TwoProjectionForm { l, angles, m2: None };
        f.validate()?;
        Ok(f)
    }

    /// One block at `θ̂`, no junk.
    pub fn ideal() -> Self {
        TwoProjectionForm { l: [0; 4], angles: vec![THETA_HAT], m2: None }
    }

    pub fn with_m2(mut self, m2: M2Override) -> Result<Self> {
        self.m2 = Some(m2);
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.l.iter().sum::<usize>() + 2 * self.angles.len()
    }

    pub fn junk_dim(&self) -> usize {
        self.l.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::InputDomain("form has dimension 0".into()));
        }
        for (j, &t) in self.angles.iter().enumerate() {
            if !t.is_finite() || (t - THETA_HAT).abs() > ANGLE_WINDOW + MARGIN_TOL {
                return Err(Error::InputDomain(format!(
                    "block {j} angle {t} is outside [2π/3 - π/6, 2π/3 + π/6]"
                )));
            }
        }
        if let Some(m2) = &self.m2 {
            if m2.l_signs.iter().any(|&s| s != 1.0 && s != -1.0) {
                return Err(Error::InputDomain("M_2 junk values must be ±1".into()));
            }
            if m2.block_angles.len() != self.angles.len() {
                return Err(Error::InputDomain(format!(
                    "M_2 override has {} block angles for {} blocks",
                    m2.block_angles.len(),
                    self.angles.len()
                )));
            }
            if m2.block_angles.iter().any(|a| !a.is_finite()) {
                return Err(Error::InputDomain("M_2 block angles must be finite".into()));
            }
        }
        Ok(())
    }
}

/// `[[cos 2t, sin 2t], [sin 2t, -cos 2t]]`, written exactly at the two
/// angles the ideal family uses.
fn reflection(t: f64) -> [[f64; 2]; 2] {
    let (c, s) = if t == THETA_HAT {
        (-0.5, -SQRT3_OVER_2)
    } else if t == -THETA_HAT {
        (-0.5, SQRT3_OVER_2)
    } else {
        ((2.0 * t).cos(), (2.0 * t).sin())
    };
    [[c, s], [s, -c]]
}

fn assemble(l: [usize; 4], l_values: [[f64; 4]; INPUTS], blocks: [Vec<[[f64; 2]; 2]>; INPUTS]) -> [CMatrix; INPUTS] {
    let junk: usize = l.iter().sum();
    let d = junk + 2 * blocks[0].len();
    std::array::from_fn(|x| {
        let mut m = CMatrix::zeros(d);
        let mut pos = 0;
        for (s, &n) in l.iter().enumerate() {
            for _ in 0..n {
                m[(pos, pos)] = l_values[x][s].into();
                pos += 1;
            }
        }
        for b in &blocks[x] {
            for r in 0..2 {
                for c in 0..2 {
                    m[(pos + r, pos + c)] = b[r][c].into();
                }
            }
            pos += 2;
        }
        m
    })
}

fn m2_parts(f: &TwoProjectionForm) -> ([f64; 4], Vec<[[f64; 2]; 2]>) {
    match &f.m2 {
        Some(o) => (o.l_signs, o.block_angles.iter().map(|&a| reflection(a)).collect()),
        None => (M2_L, vec![reflection(-THETA_HAT); f.angles.len()]),
    }
}

/// The observables `M_0, M_1, M_2` of the form.
pub fn assemble_observables(f: &TwoProjectionForm) -> Result<[CMatrix; INPUTS]> {
    f.validate()?;
    let (m2_l, m2_blocks) = m2_parts(f);
    let k = f.angles.len();
    Ok(assemble(
        f.l,
        [M0_L, M1_L, m2_l],
        [vec![reflection(0.0); k], f.angles.iter().map(|&t| reflection(t)).collect(), m2_blocks],
    ))
}

/// The projector family of the form; validated as a PVM.
pub fn assemble_pvms(f: &TwoProjectionForm) -> Result<PvmFamily> {
    let fam = PvmFamily::from_observables(assemble_observables(f)?)?;
    let report = crate::hilbert::validate_pvm(&fam, DEFAULT_TOL);
    match report.failure() {
        None => Ok(fam),
        Some(why) => Err(Error::Validation(why)),
    }
}

/// The nearby ideal family: blocks snapped to `θ̂`, default `M_2`, junk
/// values of `M_0` and `M_1` unchanged.
pub fn reference_family(f: &TwoProjectionForm) -> Result<PvmFamily> {
    f.validate()?;
    let k = f.angles.len();
    let obs = assemble(
        f.l,
        [M0_L, M1_L, M2_L],
        [vec![reflection(0.0); k], vec![reflection(THETA_HAT); k], vec![reflection(-THETA_HAT); k]],
    );
    PvmFamily::from_observables(obs)
}

fn check_dims(a: &PvmFamily, b: &PvmFamily) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::InputDomain(format!("dimensions {} and {} differ", a.dim(), b.dim())));
    }
    Ok(())
}

/// `(1/3) Σ_{x,y} (1/d) tr((E^x_y - F^x_y)²)`.
pub fn trace_deviation(a: &PvmFamily, b: &PvmFamily) -> Result<f64> {
    check_dims(a, b)?;
    let mut s = 0.0;
    for x in 0..INPUTS {
        for y in 0..2 {
            s += (a.effect(x, y) - b.effect(x, y)).hs_norm_sq();
        }
    }
    Ok(s / (3.0 * a.dim() as f64))
}

/// The same deviation through the observables, `(1/6) Σ_x (1/d) tr((M_x - N_x)²)`.
pub fn trace_deviation_observables(a: &PvmFamily, b: &PvmFamily) -> Result<f64> {
    check_dims(a, b)?;
    let mut s = 0.0;
    for x in 0..INPUTS {
        let m = observable(a, x)?;
        let n = observable(b, x)?;
        s += (m.matrix() - n.matrix()).hs_norm_sq();
    }
    Ok(s / (6.0 * a.dim() as f64))
}

/// `(1/d) tr(Δ²)` with `Δ = M_0 + M_1 + M_2`.
pub fn delta_square_trace(fam: &PvmFamily) -> Result<f64> {
    let mut delta = CMatrix::zeros(fam.dim());
    for x in 0..INPUTS {
        delta = &delta + observable(fam, x)?.matrix();
    }
    Ok(delta.hs_norm_sq() / fam.dim() as f64)
}

/// `(1/3) Σ_{x,y} |p(y,y|x,x) - 1/2|`.
pub fn statistical_difference(p: &Correlation) -> f64 {
    let mut s = 0.0;
    for x in 0..INPUTS {
        for y in 0..2 {
            s += (p.p(y, y, x, x) - 0.5).abs();
        }
    }
    s / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    /// `bound - value`.
    pub margin: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(value: f64, bound: f64) -> Self {
        let margin = bound - value;
        BoundCheck { value, bound, margin, holds: margin >= -MARGIN_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidityReport {
    pub d: usize,
    pub blocks: usize,
    pub j3: f64,
    pub lambda: f64,
    /// All four functionals of the realized correlation.
    #[serde(rename = "J")]
    pub j: [f64; 4],
    /// `|(1/d) tr(Δ²) - (1 + 8 J_3)|`.
    pub identity_residual: f64,
    /// Every functional is at least `-1/8` up to tolerance.
    pub quantum_bound_holds: bool,
    /// `l/d ≤ (32/3) λ`.
    pub junk: BoundCheck,
    /// `Δ_E ≤ (52/3) λ`.
    pub deviation: BoundCheck,
    /// `D ≤ √8 √λ + (64/3) λ`.
    pub statistical: BoundCheck,
}

impl RigidityReport {
    pub fn passed(&self) -> bool {
        self.junk.holds && self.deviation.holds && self.statistical.holds && self.quantum_bound_holds
    }
}

pub fn verify_main_bound(f: &TwoProjectionForm) -> Result<RigidityReport> {
    let fam = assemble_pvms(f)?;
    let reference = reference_family(f)?;
    let p = tracial_correlation(&fam)?;
    let j3 = j3_effective(&p);
    let lambda = j3 + 0.125;
    let bell = classify_tol(&p, DEFAULT_TOL)?;
    let d = f.dim();
    let lam = lambda.max(0.0);
    Ok(RigidityReport {
        d,
        blocks: f.angles.len(),
        j3,
        lambda,
        j: bell.j,
        identity_residual: (delta_square_trace(&fam)? - (1.0 + 8.0 * j3)).abs(),
        quantum_bound_holds: bell.j.iter().all(|&v| v >= QUANTUM_BOUND - MARGIN_TOL),
        junk: BoundCheck::new(f.junk_dim() as f64 / d as f64, 32.0 / 3.0 * lam),
        deviation: BoundCheck::new(trace_deviation(&fam, &reference)?, 52.0 / 3.0 * lam),
        statistical: BoundCheck::new(
            statistical_difference(&p),
            8f64.sqrt() * lam.sqrt() + 64.0 / 3.0 * lam,
        ),
    })
}

/// A form with `k ∈ [1, max_blocks]` blocks, angles uniform over the window
/// and each junk dimension uniform in `[0, k]`.
pub fn random_form<R: Rng + ?Sized>(rng: &mut R, max_blocks: usize) -> TwoProjectionForm {
    let k = rng.gen_range(1..=max_blocks.max(1));
    let angles = (0..k)
        .map(|_| rng.gen_range(THETA_HAT - ANGLE_WINDOW..=THETA_HAT + ANGLE_WINDOW))
        .collect();
    let l = std::array::from_fn(|_| rng.gen_range(0..=k));
    TwoProjectionForm { l, angles, m2: None }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub forms: usize,
    pub seed: u64,
    pub max_blocks: usize,
    pub violations: usize,
    pub max_identity_residual: f64,
    /// Smallest margin seen for each bound.
    pub min_margin_junk: f64,
    pub min_margin_deviation: f64,
    pub min_margin_statistical: f64,
    /// Forms that failed any check, in sweep order.
    pub failures: Vec<RigidityReport>,
}

/// Verifies `count` random forms in parallel. Form `i` is drawn from stream
/// `i` of the seeded generator, so the result does not depend on scheduling.
pub fn sweep(count: usize, max_blocks: usize, seed: u64) -> Result<SweepSummary> {
    let reports = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            verify_main_bound(&random_form(&mut rng, max_blocks))
        })
        .collect::<Result<Vec<_>>>()?;
    let min = |f: fn(&RigidityReport) -> f64| reports.iter().map(f).fold(f64::INFINITY, f64::min);
    Ok(SweepSummary {
        forms: count,
        seed,
        max_blocks,
        violations: reports.iter().filter(|r| !r.passed()).count(),
        max_identity_residual: reports.iter().map(|r| r.identity_residual).fold(0.0, f64::max),
        min_margin_junk: min(|r| r.junk.margin),
        min_margin_deviation: min(|r| r.deviation.margin),
        min_margin_statistical: min(|r| r.statistical.margin),
        failures: reports.into_iter().filter(|r| !r.passed()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::max_distance;
    use crate::hilbert::ideal_pvms;

    fn block(t: f64) -> TwoProjectionForm {
        TwoProjectionForm::new([0; 4], vec![t]).unwrap()
    }

    #[test]
    fn ideal_block_is_the_ideal_family() {
        let f = assemble_pvms(&TwoProjectionForm::ideal()).unwrap();
        assert_eq!(f, ideal_pvms());
        let p = tracial_correlation(&f).unwrap();
        assert!(max_distance(&p, &Correlation::ideal()) < 1e-15);
        assert_eq!(reference_family(&TwoProjectionForm::ideal()).unwrap(), f);
    }

    #[test]
    fn ideal_form_saturates_every_bound() {
        let r = verify_main_bound(&TwoProjectionForm::ideal()).unwrap();
        assert!(r.lambda.abs() < 1e-15);
        for b in [r.junk, r.deviation, r.statistical] {
            assert!(b.value.abs() < 1e-15 && b.bound.abs() < 1e-7 && b.holds);
        }
        assert!(r.passed());
    }

    #[test]
    fn perturbed_block() {
        let t = 0.05;
        let f = block(THETA_HAT + t);
        let r = verify_main_bound(&f).unwrap();
        let lambda = (1.0 - (2.0 * t).cos()) / 4.0;
        assert!((r.lambda - lambda).abs() < 1e-12, "{}", r.lambda);
        assert!((r.j3 - (-0.123751)).abs() < 1e-6);
        assert!(r.passed());

        let fam = assemble_pvms(&f).unwrap();
        let reference = reference_family(&f).unwrap();
        let m1 = observable(&fam, 1).unwrap();
        let n1 = observable(&reference, 1).unwrap();
        let dev = (m1.matrix() - n1.matrix()).hs_norm_sq() / 2.0;
        assert!((dev - 8.0 * lambda).abs() < 1e-12);
        assert!((dev - 0.0099917).abs() < 1e-7);
        assert!((r.deviation.value - 8.0 * lambda / 6.0).abs() < 1e-12);
        // Only M_1 moves.
        for x in [0, 2] {
            assert!((observable(&fam, x).unwrap().matrix() - observable(&reference, x).unwrap().matrix()).max_abs() < 1e-15);
        }
    }

    #[test]
    fn one_junk_dimension_with_ideal_block() {
        let f = TwoProjectionForm::new([0, 1, 0, 0], vec![THETA_HAT]).unwrap();
        let r = verify_main_bound(&f).unwrap();
        assert_eq!(r.d, 3);
        assert!((r.j3 + 1.0 / 12.0).abs() < 1e-12);
        assert!((r.lambda - 1.0 / 24.0).abs() < 1e-12);
        assert!((r.junk.value - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.junk.bound - 4.0 / 9.0).abs() < 1e-12);
        assert!(r.passed());
        let fam = assemble_pvms(&f).unwrap();
        assert!((delta_square_trace(&fam).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn per_block_deviation_formula() {
        for t in [-0.5, -0.2, 0.0, 0.1, 0.4] {
            let fam = assemble_pvms(&block(THETA_HAT + t)).unwrap();
            let lhs = delta_square_trace(&fam).unwrap() * 2.0;
            assert!((lhs - 8.0 * t.sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn deviation_cases() {
        let a = ideal_pvms();
        assert_eq!(trace_deviation(&a, &a).unwrap(), 0.0);
        let e = |x: usize, y: usize| a.effect(x, y).clone();
        let flipped = PvmFamily::new([[e(0, 0), e(0, 1)], [e(1, 1), e(1, 0)], [e(2, 0), e(2, 1)]]).unwrap();
        assert!((trace_deviation(&a, &flipped).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let big = assemble_pvms(&TwoProjectionForm::new([1, 0, 0, 0], vec![THETA_HAT]).unwrap()).unwrap();
        assert!(matches!(trace_deviation(&a, &big), Err(Error::InputDomain(_))));
    }

    #[test]
    fn form_validation() {
        assert!(TwoProjectionForm::new([0; 4], vec![]).is_err());
        assert!(TwoProjectionForm::new([1, 0, 0, 0], vec![]).is_ok());
        assert!(TwoProjectionForm::new([0; 4], vec![THETA_HAT + 0.6]).is_err());
        assert!(TwoProjectionForm::new([0; 4], vec![THETA_HAT + ANGLE_WINDOW]).is_ok());
        let bad = M2Override { l_signs: [1.0, 0.5, 1.0, 1.0], block_angles: vec![0.0] };
        assert!(TwoProjectionForm::ideal().with_m2(bad).is_err());
        let short = M2Override { l_signs: [1.0; 4], block_angles: vec![] };
        assert!(TwoProjectionForm::ideal().with_m2(short).is_err());
    }

    #[test]
    fn m2_override_moves_the_deviation() {
        let o = M2Override { l_signs: M2_L, block_angles: vec![-THETA_HAT + 0.1] };
        let f = TwoProjectionForm::ideal().with_m2(o).unwrap();
        let fam = assemble_pvms(&f).unwrap();
        let reference = reference_family(&f).unwrap();
        let dev = trace_deviation(&fam, &reference).unwrap();
        assert!(dev > 0.0);
        assert!((dev - trace_deviation_observables(&fam, &reference).unwrap()).abs() < 1e-12);
        let r = verify_main_bound(&f).unwrap();
        assert!(r.identity_residual < 1e-12);
    }

    #[test]
    fn junk_only_forms() {
        // Every junk summand alone gives (1/d) tr Δ² = 1, hence J_3 = 0.
        for s in 0..4 {
            let mut l = [0; 4];
            l[s] = 2;
            let r = verify_main_bound(&TwoProjectionForm::new(l, vec![]).unwrap()).unwrap();
            assert!(r.j3.abs() < 1e-15, "summand {s}");
            assert!(r.passed());
        }
    }

    #[test]
    fn deviation_vanishes_toward_ideal() {
        let mut last = f64::INFINITY;
        for t in [0.4, 0.2, 0.1, 0.01, 0.0] {
            let r = verify_main_bound(&block(THETA_HAT + t)).unwrap();
            assert!(r.deviation.value < last || r.deviation.value == 0.0);
            last = r.deviation.value;
        }
        assert!(last.abs() < 1e-15);
    }

    #[test]
    fn small_sweep_has_no_violations() {
        let s = sweep(40, 8, 3).unwrap();
        assert_eq!(s.violations, 0);
        assert!(s.max_identity_residual < 1e-12);
        assert_eq!(sweep(40, 8, 3).unwrap(), s);
    }
}
