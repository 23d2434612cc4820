use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Compresses `raw_key` (one bit per byte) to `out_len` bits with a binary
/// Toeplitz matrix drawn from `seed`. Toeplitz matrices form a two-universal
/// family, and the matrix needs only `n + out_len - 1` random bits.
pub fn privacy_amplify(raw_key: &[u8], out_len: usize, seed: u64) -> Result<Vec<u8>> {
    let n = raw_key.len();
    if out_len > n {
        return Err(Error::InputDomain(format!(
            "output length {out_len} exceeds raw key length {n}"
        )));
    }
    if raw_key.iter().any(|&b| b > 1) {
        return Err(Error::InputDomain("raw key entries must be 0 or 1".into()));
    }
    if out_len == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag: Vec<bool> = (0..n + out_len - 1).map(|_| rng.gen()).collect();
    // Row r, column c of the matrix is diag[r - c + n - 1].
    Ok((0..out_len)
        .map(|r| {
            raw_key
                .iter()
                .enumerate()
                .fold(0u8, |acc, (c, &k)| acc ^ (k & diag[r + n - 1 - c] as u8))
        })
        .collect())
}
