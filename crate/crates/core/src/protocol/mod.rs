//! Seeded Monte Carlo runs of the two key-distribution protocols.
//!
//! Variant A keeps every equal-basis round as key and tests `J_3` on the
//! cross-basis rounds. Variant B additionally sacrifices the equal-basis
//! rounds whose index is a multiple of `m` to estimate the asynchronicity.

mod device;
mod privacy;

pub use device::Device;
pub use privacy::privacy_amplify;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::CROSS_PAIRS;
use crate::error::{Error, Result};
use crate::INPUTS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub variant: Variant,
    pub n: u64,
    /// Sacrifice period; only read by variant B.
    pub m: u64,
    pub lambda: f64,
    pub mu: f64,
    pub seed: u64,
    pub input_distribution: [f64; INPUTS],
    /// Abort when Alice's and Bob's key bits disagree anywhere.
    pub abort_on_mismatch: bool,
}

impl ProtocolConfig {
    pub fn a(n: u64, lambda: f64, seed: u64) -> Self {
        ProtocolConfig {
            variant: Variant::A,
            n,
            m: 0,
            lambda,
            mu: 0.0,
            seed,
            input_distribution: [1.0 / 3.0; INPUTS],
            abort_on_mismatch: true,
        }
    }

    pub fn b(n: u64, m: u64, lambda: f64, mu: f64, seed: u64) -> Self {
        ProtocolConfig { variant: Variant::B, m, mu, ..Self::a(n, lambda, seed) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InputDomain("n must be at least 1".into()));
        }
        if self.variant == Variant::B && self.m < 2 {
            return Err(Error::InputDomain(format!("m = {} but variant B needs m >= 2", self.m)));
        }
        if !(0.0..=0.125).contains(&self.lambda) {
            return Err(Error::InputDomain(format!("lambda {} outside [0, 1/8]", self.lambda)));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::InputDomain(format!("mu {} must be nonnegative", self.mu)));
        }
        let d = &self.input_distribution;
        if d.iter().any(|&p| !(p >= 0.0)) || (d.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InputDomain(format!("input distribution {d:?} is not a distribution")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Key,
    J3Test,
    STest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    /// 1-based round index.
    pub i: u64,
    #[serde(rename = "xA")]
    pub xa: u8,
    #[serde(rename = "xB")]
    pub xb: u8,
    #[serde(rename = "yA")]
    pub ya: u8,
    #[serde(rename = "yB")]
    pub yb: u8,
    pub role: Role,
}

/// The role a round plays once bases have been exchanged.
pub fn role_of(i: u64, xa: u8, xb: u8, variant: Variant, m: u64) -> Role {
    if xa != xb {
        Role::J3Test
    } else if variant == Variant::B && i.is_multiple_of(m) {
        Role::STest
    } else {
        Role::Key
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sifted {
    pub key: Vec<RoundRecord>,
    pub j3_test: Vec<RoundRecord>,
    pub s_test: Vec<RoundRecord>,
}

/// Partitions rounds by role, overwriting whatever role they carried.
pub fn sift(records: &[RoundRecord], variant: Variant, m: u64) -> Sifted {
    let mut out = Sifted::default();
    for r in records {
        let role = role_of(r.i, r.xa, r.xb, variant, m);
        let r = RoundRecord { role, ..*r };
        match role {
            Role::Key => out.key.push(r),
            Role::J3Test => out.j3_test.push(r),
            Role::STest => out.s_test.push(r),
        }
    }
    out
}

/// Plug-in `J_3` from cross-basis rounds; equal-basis rounds are ignored.
pub fn estimate_j3(records: &[RoundRecord]) -> Result<f64> {
    let mut total = [[0u64; INPUTS]; INPUTS];
    let mut anti = [[0u64; INPUTS]; INPUTS];
    for r in records.iter().filter(|r| r.xa != r.xb) {
        let (a, b) = (r.xa as usize, r.xb as usize);
        total[a][b] += 1;
        anti[a][b] += (r.ya != r.yb) as u64;
    }
    let mut s = 0.0;
    for &(a, b) in &CROSS_PAIRS {
        if total[a][b] == 0 {
            return Err(Error::EstimationUndefined(format!("no rounds with inputs ({a}, {b})")));
        }
        s += anti[a][b] as f64 / total[a][b] as f64;
    }
    Ok(1.0 - s / 4.0)
}

/// Mean over bases of the fraction of equal-basis rounds with `y_A ≠ y_B`.
pub fn estimate_s(records: &[RoundRecord]) -> Result<f64> {
    let mut total = [0u64; INPUTS];
    let mut diff = [0u64; INPUTS];
    for r in records.iter().filter(|r| r.xa == r.xb) {
        total[r.xa as usize] += 1;
        diff[r.xa as usize] += (r.ya != r.yb) as u64;
    }
    let mut s = 0.0;
    for x in 0..INPUTS {
        if total[x] == 0 {
            return Err(Error::EstimationUndefined(format!("no test rounds in basis {x}")));
        }
        s += diff[x] as f64 / total[x] as f64;
    }
    Ok(s / INPUTS as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    Aborted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    J3OutOfTolerance,
    AsynchronicityAboveTolerance,
    KeyMismatch,
}

/// The statistical acceptance test alone. `s_hat` is ignored for variant A.
pub fn accept(j3_hat: f64, s_hat: Option<f64>, cfg: &ProtocolConfig) -> Verdict {
    if statistical_failures(j3_hat, s_hat, cfg).is_empty() {
        Verdict::Accepted
    } else {
        Verdict::Aborted
    }
}

fn statistical_failures(j3_hat: f64, s_hat: Option<f64>, cfg: &ProtocolConfig) -> Vec<AbortReason> {
    let mut out = Vec::new();
    if !((j3_hat + 0.125).abs() <= cfg.lambda) {
        out.push(AbortReason::J3OutOfTolerance);
    }
    if cfg.variant == Variant::B && !(s_hat.is_some_and(|s| s <= cfg.mu)) {
        out.push(AbortReason::AsynchronicityAboveTolerance);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolOutcome {
    pub config: ProtocolConfig,
    /// Alice's outputs on key rounds.
    pub raw_key: Vec<u8>,
    pub j3_hat: f64,
    /// Present for variant B.
    pub s_hat: Option<f64>,
    /// Rounds per input pair `[x_A][x_B]`.
    pub counts: [[u64; INPUTS]; INPUTS],
    /// Key rounds where `y_A ≠ y_B`.
    pub key_mismatches: u64,
    pub verdict: Verdict,
    pub abort_reasons: Vec<AbortReason>,
    pub transcript: Vec<RoundRecord>,
}

/// Everything in an outcome except the transcript and raw key bits.
#[derive(Serialize)]
pub struct OutcomeSummary<'a> {
    pub config: &'a ProtocolConfig,
    pub j3_hat: f64,
    pub s_hat: Option<f64>,
    pub verdict: Verdict,
    pub abort_reasons: &'a [AbortReason],
    pub rounds: u64,
    pub counts: &'a [[u64; INPUTS]; INPUTS],
    pub key_length: usize,
    pub key_mismatches: u64,
    /// Key bits packed most significant first, zero-padded to whole bytes.
    pub key_hex: String,
}

impl ProtocolOutcome {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accepted
    }

    pub fn key_hex(&self) -> String {
        self.raw_key
            .chunks(8)
            .map(|c| {
                let byte = c.iter().enumerate().fold(0u8, |acc, (k, &b)| acc | (b << (7 - k)));
                format!("{byte:02x}")
            })
            .collect()
    }

    pub fn summary(&self) -> OutcomeSummary<'_> {
        OutcomeSummary {
            config: &self.config,
            j3_hat: self.j3_hat,
            s_hat: self.s_hat,
            verdict: self.verdict,
            abort_reasons: &self.abort_reasons,
            rounds: self.transcript.len() as u64,
            counts: &self.counts,
            key_length: self.raw_key.len(),
            key_mismatches: self.key_mismatches,
            key_hex: self.key_hex(),
        }
    }

    /// The summary document: config echo, estimates, verdict and key.
    pub fn summary_json(&self) -> String {
        crate::json::to_pretty(&self.summary())
    }

    /// One JSON object per round.
    pub fn write_transcript<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.transcript {
            writeln!(w, "{}", crate::json::to_compact(r))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

fn draw_input(dist: &[f64; INPUTS], u: f64) -> u8 {
    let mut acc = 0.0;
    for (x, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return x as u8;
        }
    }
    // u fell past a total that rounded below 1: take the last input with weight.
    dist.iter().rposition(|&p| p > 0.0).unwrap_or(INPUTS - 1) as u8
}

/// Samples round `i` from its own stream, so rounds are independent of
/// evaluation order.
fn sample_round(key: &[u8; 32], i: u64, cfg: &ProtocolConfig, dev: &Device) -> RoundRecord {
    let mut rng = ChaCha8Rng::from_seed(*key);
    rng.set_stream(i);
    let xa = draw_input(&cfg.input_distribution, rng.gen());
    let xb = draw_input(&cfg.input_distribution, rng.gen());
    let (ya, yb) = dev.respond(xa as usize, xb as usize, rng.gen());
    RoundRecord { i, xa, xb, ya, yb, role: role_of(i, xa, xb, cfg.variant, cfg.m) }
}

fn stream_key(seed: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    ChaCha8Rng::seed_from_u64(seed).fill(&mut key);
    key
}

pub fn run_protocol(cfg: &ProtocolConfig, dev: &Device) -> Result<ProtocolOutcome> {
    run_protocol_with(cfg, dev, Execution::Parallel)
}

pub fn run_protocol_with(cfg: &ProtocolConfig, dev: &Device, exec: Execution) -> Result<ProtocolOutcome> {
    cfg.validate()?;
    let key = stream_key(cfg.seed);
    let transcript: Vec<RoundRecord> = match exec {
        Execution::Serial => (1..=cfg.n).map(|i| sample_round(&key, i, cfg, dev)).collect(),
        Execution::Parallel => (1..=cfg.n)
            .into_par_iter()
            .map(|i| sample_round(&key, i, cfg, dev))
            .collect(),
    };

    let sifted = sift(&transcript, cfg.variant, cfg.m);
    let j3_hat = estimate_j3(&sifted.j3_test)?;
    let s_hat = match cfg.variant {
        Variant::A => None,
        Variant::B => Some(estimate_s(&sifted.s_test)?),
    };

    let mut counts = [[0u64; INPUTS]; INPUTS];
    for r in &transcript {
        counts[r.xa as usize][r.xb as usize] += 1;
    }
    let raw_key: Vec<u8> = sifted.key.iter().map(|r| r.ya).collect();
    let key_mismatches = sifted.key.iter().filter(|r| r.ya != r.yb).count() as u64;

    let mut abort_reasons = statistical_failures(j3_hat, s_hat, cfg);
    if cfg.abort_on_mismatch && key_mismatches > 0 {
        abort_reasons.push(AbortReason::KeyMismatch);
    }
    let verdict = if abort_reasons.is_empty() { Verdict::Accepted } else { Verdict::Aborted };
    Ok(ProtocolOutcome {
        config: cfg.clone(),
        raw_key,
        j3_hat,
        s_hat,
        counts,
        key_mismatches,
        verdict,
        abort_reasons,
        transcript,
    })
}
