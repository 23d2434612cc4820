//! Small dense complex linear algebra: operators, projection-valued
//! measures, observables, bipartite pure states and their Schmidt
//! decomposition.
//!
//! Everything here is sized for the handful-to-hundreds of dimensions the
//! rest of the crate needs. Matrices are dense and row-major.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{INPUTS, OUTPUTS};

/// Tolerance for constructions that are exact up to rounding.
pub const EXACT_TOL: f64 = 1e-12;

/// Default tolerance for predicates and Schmidt grouping.
pub const DEFAULT_TOL: f64 = 1e-9;

const SQRT3_OVER_4: f64 = 0.433_012_701_892_219_3;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        CMatrix {
            dim,
            data: vec![Complex64::default(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(1.0);
        }
        m
    }

    /// Builds a matrix from row-major complex entries.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InputDomain(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InputDomain("matrix entries must be finite".into()));
        }
        Ok(CMatrix { dim, data })
    }

    /// Builds a real matrix from its rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InputDomain("rows must form a square matrix".into()));
        }
        Self::from_vec(dim, rows.iter().flat_map(|r| r.iter().map(|&x| c(x))).collect())
    }

    /// The rank-one projector |v><v| for a unit vector `v`.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> Complex64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let d = self.dim;
        let mut acc = Complex64::default();
        for i in 0..d {
            for j in 0..d {
                acc += self.data[i * d + j] * other.data[j * d + i];
            }
        }
        acc
    }

    /// Squared Hilbert-Schmidt norm, `tr(A† A)`. For Hermitian `A` this is `tr(A²)`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self - &self.adjoint()).max_abs()
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        let (da, db) = (self.dim, other.dim);
        let mut m = Self::zeros(da * db);
        for i in 0..da {
            for j in 0..da {
                let a = self[(i, j)];
                if a == Complex64::default() {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        m[(i * db + k, j * db + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// Block-diagonal direct sum of the given matrices, in order.
    pub fn direct_sum(blocks: &[&CMatrix]) -> Self {
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut m = Self::zeros(dim);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    m[(offset + i, offset + j)] = b[(i, j)];
                }
            }
            offset += b.dim;
        }
        m
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        // Zero entries are skipped: block-diagonal operands then cost O(d²).
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == Complex64::default() {
                    continue;
                }
                let row = &rhs.data[k * d..(k + 1) * d];
                let dst = &mut out.data[i * d..(i + 1) * d];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// One binary projection-valued measure per input: `effect(x, y)` is `E^x_y`.
#[derive(Clone, Debug, PartialEq)]
pub struct PvmFamily {
    dim: usize,
    effects: [[CMatrix; OUTPUTS]; INPUTS],
}

impl PvmFamily {
    /// Wraps effects without checking the projector axioms; see [`validate_pvm`].
    pub fn new(effects: [[CMatrix; OUTPUTS]; INPUTS]) -> Result<Self> {
        let dim = effects[0][0].dim();
        if effects.iter().flatten().any(|e| e.dim() != dim) {
            return Err(Error::InputDomain("all effects must share one dimension".into()));
        }
        Ok(PvmFamily { dim, effects })
    }

    /// Builds the family from the outcome-1 projectors, completing each to the identity.
    pub fn from_outcome_one(projectors: [CMatrix; INPUTS]) -> Result<Self> {
        let [p0, p1, p2] = projectors;
        let complete = |p: CMatrix| {
            let id = CMatrix::identity(p.dim());
            [&id - &p, p]
        };
        Self::new([complete(p0), complete(p1), complete(p2)])
    }

    /// Builds the family from ±1 observables via `E_0 = (1 + M)/2`, `E_1 = (1 - M)/2`.
    pub fn from_observables(observables: [CMatrix; INPUTS]) -> Result<Self> {
        let split = |m: CMatrix| {
            let id = CMatrix::identity(m.dim());
            [(&id + &m).scale(0.5), (&id - &m).scale(0.5)]
        };
        let [m0, m1, m2] = observables;
        Self::new([split(m0), split(m1), split(m2)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effect(&self, x: usize, y: usize) -> &CMatrix {
        &self.effects[x][y]
    }

    /// Input-wise transpose, `F^x_y = (E^x_y)^T`.
    pub fn transpose(&self) -> Self {
        PvmFamily {
            dim: self.dim,
            effects: self.effects.clone().map(|pair| pair.map(|e| e.transpose())),
        }
    }

    /// Input-wise direct sum of several families.
    pub fn direct_sum(parts: &[&PvmFamily]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InputDomain("direct sum of zero families".into()));
        }
        let sum = |x: usize, y: usize| {
            let blocks: Vec<&CMatrix> = parts.iter().map(|p| p.effect(x, y)).collect();
            CMatrix::direct_sum(&blocks)
        };
        Self::new(std::array::from_fn(|x| std::array::from_fn(|y| sum(x, y))))
    }
}

/// The qubit measurements of the honest protocol. With
/// `|φ_0> = |1>`, `|φ_1> = (√3/2)|0> + (1/2)|1>`, `|φ_2> = (√3/2)|0> - (1/2)|1>`
/// the outcome-1 effect of input `x` is `|φ_x><φ_x|`.
///
/// Entries are written out rather than computed so the family is exact up to
/// the representation of `√3/4`.
pub fn ideal_pvms() -> PvmFamily {
    let r = SQRT3_OVER_4;
    let e = |rows: [[f64; 2]; 2]| {
        CMatrix::from_real_rows(&[&rows[0], &rows[1]]).expect("2x2 literal")
    };
    PvmFamily::new([
        [e([[1.0, 0.0], [0.0, 0.0]]), e([[0.0, 0.0], [0.0, 1.0]])],
        [e([[0.25, -r], [-r, 0.75]]), e([[0.75, r], [r, 0.25]])],
        [e([[0.25, r], [r, 0.75]]), e([[0.75, -r], [-r, 0.25]])],
    ])
    .expect("ideal family is well-formed")
}

/// Qubit family whose outcome-1 effect for input `x` projects onto
/// `cos θ_x |0> + sin θ_x |1>`.
pub fn pvm_from_angles(angles: [f64; INPUTS]) -> Result<PvmFamily> {
    if angles.iter().any(|a| !a.is_finite()) {
        return Err(Error::InputDomain("angles must be finite".into()));
    }
    let proj = |t: f64| CMatrix::outer(&[c(t.cos()), c(t.sin())]);
    PvmFamily::from_outcome_one(angles.map(proj))
}

/// A ±1-valued Hermitian observable.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable(CMatrix);

impl Observable {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

/// `M_x = E^x_0 - E^x_1`.
pub fn observable(p: &PvmFamily, x: usize) -> Result<Observable> {
    if x >= INPUTS {
        return Err(Error::InputDomain(format!("input {x} not in {{0,1,2}}")));
    }
    Ok(Observable(p.effect(x, 0) - p.effect(x, 1)))
}

/// Per-input defects of the projector axioms.
#[derive(Clone, Debug, PartialEq)]
pub struct PvmReport {
    pub tol: f64,
    /// Max-norm of `E - E†` over both outcomes, per input.
    pub hermiticity: [f64; INPUTS],
    /// Max-norm of `E² - E` over both outcomes, per input.
    pub idempotency: [f64; INPUTS],
    /// Max-norm of `E_0 + E_1 - 1`, per input.
    pub completeness: [f64; INPUTS],
}

impl PvmReport {
    pub fn passed(&self) -> bool {
        self.hermiticity
            .iter()
            .chain(&self.idempotency)
            .chain(&self.completeness)
            .all(|&d| d <= self.tol)
    }

    /// The dominant failure, if any.
    pub fn failure(&self) -> Option<String> {
        for x in 0..INPUTS {
            for (name, v) in [
                ("hermiticity", self.hermiticity[x]),
                ("idempotency", self.idempotency[x]),
                ("completeness", self.completeness[x]),
            ] {
                if v > self.tol {
                    return Some(format!("{name} defect {v:e} at input {x} exceeds {:e}", self.tol));
                }
            }
        }
        None
    }
}

pub fn validate_pvm(p: &PvmFamily, tol: f64) -> PvmReport {
    let id = CMatrix::identity(p.dim());
    let mut report = PvmReport {
        tol,
        hermiticity: [0.0; INPUTS],
        idempotency: [0.0; INPUTS],
        completeness: [0.0; INPUTS],
    };
    for x in 0..INPUTS {
        for y in 0..OUTPUTS {
            let e = p.effect(x, y);
            report.hermiticity[x] = report.hermiticity[x].max(e.hermiticity_defect());
            report.idempotency[x] = report.idempotency[x].max((&(e * e) - e).max_abs());
        }
        report.completeness[x] = (&(p.effect(x, 0) + p.effect(x, 1)) - &id).max_abs();
    }
    report
}

/// Pure state on `C^{d_A} ⊗ C^{d_B}`; amplitude `(i, j)` sits at `i * d_B + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    dims: (usize, usize),
    amplitudes: Vec<Complex64>,
}

impl BipartiteState {
    pub fn new(dims: (usize, usize), amplitudes: Vec<Complex64>) -> Result<Self> {
        let (da, db) = dims;
        if da == 0 || db == 0 || amplitudes.len() != da * db {
            return Err(Error::InputDomain(format!(
                "expected {} amplitudes for local dims {da}x{db}",
                da * db
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InputDomain("amplitudes must be finite".into()));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InputDomain("zero state".into()));
        }
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InputDomain(format!("state norm {norm} is not 1")));
        }
        Ok(BipartiteState { dims, amplitudes })
    }

    /// `(|00> + |11>)/√2` on two qubits.
    pub fn epr() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new((2, 2), vec![c(h), c(0.0), c(0.0), c(h)]).expect("EPR pair")
    }

    /// `|a> ⊗ |b>` for unit vectors `a`, `b`.
    pub fn product(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        let amps = a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect();
        Self::new((a.len(), b.len()), amps)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize, j: usize) -> Complex64 {
        self.amplitudes[i * self.dims.1 + j]
    }

    /// `|ψ><ψ|` on the joint space.
    pub fn density(&self) -> CMatrix {
        CMatrix::outer(&self.amplitudes)
    }
}

/// A group of equal Schmidt coefficients with their paired basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtGroup {
    /// Squared singular value shared by the group.
    pub coefficient: f64,
    pub a_vectors: Vec<Vec<Complex64>>,
    pub b_vectors: Vec<Vec<Complex64>>,
}

impl SchmidtGroup {
    pub fn multiplicity(&self) -> usize {
        self.a_vectors.len()
    }
}

/// `|ψ> = Σ_j √σ_j Σ_m |φ^A_{j,m}> ⊗ |φ^B_{j,m}>` with distinct descending `σ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtDecomposition {
    pub dims: (usize, usize),
    pub groups: Vec<SchmidtGroup>,
}

impl SchmidtDecomposition {
    /// `Σ_j σ_j d_j`, which is 1 for a normalized state.
    pub fn weight(&self) -> f64 {
        self.groups
            .iter()
            .map(|g| g.coefficient * g.multiplicity() as f64)
            .sum()
    }

    pub fn reconstruct(&self) -> Vec<Complex64> {
        let (da, db) = self.dims;
        let mut out = vec![Complex64::default(); da * db];
        for g in &self.groups {
            let amp = g.coefficient.sqrt();
            for (a, b) in g.a_vectors.iter().zip(&g.b_vectors) {
                for i in 0..da {
                    for j in 0..db {
                        out[i * db + j] += a[i] * b[j] * amp;
                    }
                }
            }
        }
        out
    }
}

/// Schmidt decomposition via the SVD of the `d_A × d_B` amplitude matrix.
/// Squared singular values within `group_tol` of a group's leading value join
/// that group; values at rounding level are dropped.
pub fn schmidt_decompose(s: &BipartiteState, group_tol: f64) -> Result<SchmidtDecomposition> {
    if !(group_tol > 0.0) {
        return Err(Error::InputDomain("group tolerance must be positive".into()));
    }
    let (da, db) = s.dims();
    let psi = nalgebra::DMatrix::<Complex64>::from_fn(da, db, |i, j| s.amplitude(i, j));
    let svd = psi.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut groups: Vec<SchmidtGroup> = Vec::new();
    let mut sums: Vec<f64> = Vec::new();
    for k in order {
        let sigma = svd.singular_values[k].powi(2);
        if sigma <= f64::EPSILON {
            continue;
        }
        let a: Vec<Complex64> = u.column(k).iter().copied().collect();
        let b: Vec<Complex64> = v_t.row(k).iter().copied().collect();
        match groups.last_mut() {
            Some(g) if (g.coefficient - sigma).abs() <= group_tol => {
                g.a_vectors.push(a);
                g.b_vectors.push(b);
                *sums.last_mut().unwrap() += sigma;
            }
            _ => {
                groups.push(SchmidtGroup {
                    coefficient: sigma,
                    a_vectors: vec![a],
                    b_vectors: vec![b],
                });
                sums.push(sigma);
            }
        }
    }
    for (g, total) in groups.iter_mut().zip(sums) {
        g.coefficient = total / g.multiplicity() as f64;
    }
    Ok(SchmidtDecomposition { dims: (da, db), groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn ideal_effects_match_displayed_projectors() {
        let p = ideal_pvms();
        let s3 = 3f64.sqrt();
        let e11 = CMatrix::from_real_rows(&[&[0.75, s3 / 4.0], &[s3 / 4.0, 0.25]]).unwrap();
        assert!(max_diff(p.effect(1, 1), &e11) < 1e-15);
        let e00 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(p.effect(0, 0), &e00);
        assert!(validate_pvm(&p, EXACT_TOL).passed());
    }

    #[test]
    fn ideal_effects_are_the_phi_projectors() {
        let s3 = 3f64.sqrt();
        let phis = [[0.0, 1.0], [s3 / 2.0, 0.5], [s3 / 2.0, -0.5]];
        let p = ideal_pvms();
        for (x, phi) in phis.iter().enumerate() {
            let proj = CMatrix::outer(&[c(phi[0]), c(phi[1])]);
            assert!(max_diff(p.effect(x, 1), &proj) < 1e-15, "x = {x}");
        }
    }

    #[test]
    fn angles_reproduce_ideal_family() {
        let p = pvm_from_angles([PI / 2.0, PI / 6.0, -PI / 6.0]).unwrap();
        let ideal = ideal_pvms();
        for x in 0..INPUTS {
            for y in 0..OUTPUTS {
                assert!(max_diff(p.effect(x, y), ideal.effect(x, y)) < 1e-12);
            }
        }
        assert!(pvm_from_angles([f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn observables_of_ideal_family() {
        let p = ideal_pvms();
        let m0 = observable(&p, 0).unwrap();
        let diag = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert_eq!(m0.matrix(), &diag);

        let s3 = 3f64.sqrt();
        let m1 = observable(&p, 1).unwrap();
        let expect = CMatrix::from_real_rows(&[&[-0.5, -s3 / 2.0], &[-s3 / 2.0, 0.5]]).unwrap();
        assert!(max_diff(m1.matrix(), &expect) < 1e-15);

        assert!(matches!(observable(&p, 3), Err(Error::InputDomain(_))));
    }

    #[test]
    fn observable_trace_counts_rank() {
        // Three-dimensional family with outcome-1 ranks 1, 2, 0.
        let e = |d: [f64; 3]| {
            CMatrix::from_real_rows(&[&[d[0], 0.0, 0.0], &[0.0, d[1], 0.0], &[0.0, 0.0, d[2]]])
                .unwrap()
        };
        let p = PvmFamily::from_outcome_one([e([1.0, 0.0, 0.0]), e([0.0, 1.0, 1.0]), e([0.0; 3])])
            .unwrap();
        for (x, rank) in [(0, 1.0), (1, 2.0), (2, 0.0)] {
            let m = observable(&p, x).unwrap();
            assert_eq!(m.matrix().trace().re, 3.0 - 2.0 * rank);
        }
    }

    #[test]
    fn scaled_projector_fails_idempotency() {
        let ideal = ideal_pvms();
        let mut effects: [[CMatrix; 2]; 3] =
            std::array::from_fn(|x| std::array::from_fn(|y| ideal.effect(x, y).clone()));
        effects[0][1] = effects[0][1].scale(0.999);
        let p = PvmFamily::new(effects).unwrap();
        let report = validate_pvm(&p, EXACT_TOL);
        assert!(!report.passed());
        assert!(report.idempotency[0] > EXACT_TOL);
        assert!(report.hermiticity[0] <= EXACT_TOL);
        assert!(report.failure().unwrap().contains("idempotency"));
    }

    #[test]
    fn direct_sum_of_families_validates() {
        let a = ideal_pvms();
        let b = pvm_from_angles([0.3, 1.1, -0.4]).unwrap();
        let s = PvmFamily::direct_sum(&[&a, &b, &a]).unwrap();
        assert_eq!(s.dim(), 6);
        assert!(validate_pvm(&s, EXACT_TOL).passed());
    }

    #[test]
    fn epr_schmidt_is_one_degenerate_group() {
        let d = schmidt_decompose(&BipartiteState::epr(), DEFAULT_TOL).unwrap();
        assert_eq!(d.groups.len(), 1);
        assert!((d.groups[0].coefficient - 0.5).abs() < 1e-12);
        assert_eq!(d.groups[0].multiplicity(), 2);
    }

    #[test]
    fn product_state_has_rank_one() {
        let s = BipartiteState::product(&[c(1.0), c(0.0)], &[c(0.0), c(1.0)]).unwrap();
        let d = schmidt_decompose(&s, DEFAULT_TOL).unwrap();
        assert_eq!(d.groups.len(), 1);
        assert!((d.groups[0].coefficient - 1.0).abs() < 1e-12);
        assert_eq!(d.groups[0].multiplicity(), 1);
    }

    #[test]
    fn distinct_coefficients_stay_separate() {
        let s = BipartiteState::new(
            (2, 2),
            vec![c(0.8f64.sqrt()), c(0.0), c(0.0), c(0.2f64.sqrt())],
        )
        .unwrap();
        let d = schmidt_decompose(&s, DEFAULT_TOL).unwrap();
        let coeffs: Vec<(f64, usize)> =
            d.groups.iter().map(|g| (g.coefficient, g.multiplicity())).collect();
        assert_eq!(coeffs.len(), 2);
        assert!((coeffs[0].0 - 0.8).abs() < 1e-12 && coeffs[0].1 == 1);
        assert!((coeffs[1].0 - 0.2).abs() < 1e-12 && coeffs[1].1 == 1);
        assert!((d.weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_state_is_rejected() {
        let err = BipartiteState::new((2, 2), vec![c(0.0); 4]).unwrap_err();
        assert!(matches!(err, Error::InputDomain(ref m) if m.contains("zero")));
        assert!(schmidt_decompose(&BipartiteState::epr(), 0.0).is_err());
    }

    #[test]
    fn kron_of_identities_and_outer() {
        let a = CMatrix::identity(2);
        let b = CMatrix::identity(3);
        assert_eq!(a.kron(&b), CMatrix::identity(6));
        let v = [c(0.6), Complex64::new(0.0, 0.8)];
        let p = CMatrix::outer(&v);
        assert!((&(&p * &p) - &p).max_abs() < 1e-15);
    }
}
