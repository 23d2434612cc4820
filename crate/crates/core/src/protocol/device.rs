use crate::correlations::{index, Correlation};
use crate::error::{Error, Result};
use crate::{INPUTS, OUTPUTS};

/// Stands in for the shared entangled pairs: answers each round by sampling
/// the outcome pair from its correlation table.
#[derive(Clone, Debug, PartialEq)]
pub struct Device {
    correlation: Correlation,
    /// Cumulative outcome distribution per input pair, outcomes in the order
    /// (0,0), (0,1), (1,0), (1,1).
    cumulative: [[[f64; 4]; INPUTS]; INPUTS],
}

impl Device {
    pub fn new(correlation: Correlation) -> Self {
        let mut cumulative = [[[0.0; 4]; INPUTS]; INPUTS];
        for xa in 0..INPUTS {
            for xb in 0..INPUTS {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += correlation.table()[index(k / OUTPUTS, k % OUTPUTS, xa, xb)];
                    cumulative[xa][xb][k] = acc;
                }
            }
        }
        Device { correlation, cumulative }
    }

    pub fn honest() -> Self {
        Self::new(Correlation::ideal())
    }

    /// Independent uniform output bits on every input pair.
    pub fn uniform() -> Self {
        Self::new(Correlation::uniform())
    }

    /// Reads a `{"p": [...36 entries...]}` table from disk.
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let c: Correlation = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Ok(Self::new(c))
    }

    pub fn correlation(&self) -> &Correlation {
        &self.correlation
    }

    /// Outcome pair for inputs `(xa, xb)` given a uniform draw `u ∈ [0, 1)`.
    pub fn respond(&self, xa: usize, xb: usize, u: f64) -> (u8, u8) {
        let cum = &self.cumulative[xa][xb];
        // Rounding can leave the total just below 1; fall through to the last nonzero outcome.
        let k = cum.iter().position(|&c| u < c).unwrap_or_else(|| {
            (0..4).rev().find(|&k| k == 0 || cum[k] > cum[k - 1]).unwrap_or(3)
        });
        ((k / OUTPUTS) as u8, (k % OUTPUTS) as u8)
    }
}
