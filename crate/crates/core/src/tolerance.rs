//! Numerical thresholds shared across the crate.

use serde::{Deserialize, Serialize};

/// Tolerances used by validation checks and numerical detectors.
///
/// Every field is overridable; [`Tolerances::default`] gives the values the
/// library uses when no configuration is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Orthonormality of frames and Stiefel points.
    pub orth: f64,
    /// Skew-symmetry of generator blocks.
    pub skew: f64,
    /// Spectral reconstruction of skew matrices.
    pub spec: f64,
    /// Tangency defect `|U^T D + D^T U|`, relative to `1 + |D|`.
    pub tan: f64,
    /// Residual `|Exp_U(D) - V|` accepted by the shooting logarithm.
    pub shoot: f64,
    /// Relative merge tolerance for normal-form frequencies.
    pub freq: f64,
    /// Continued-fraction acceptance tolerance for frequency ratios.
    pub ratio: f64,
    /// Denominator cap for commensurability detection.
    pub d_max: u64,
    /// Relative rank threshold for Gram-Schmidt columns.
    pub rank: f64,
    /// Frequencies at or below `zero_freq * max(1, max frequency)` count as zero.
    pub zero_freq: f64,
    /// Closure residual `|gamma(T) - gamma(0)|` required to confirm a detected period.
    pub closure: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orth: 1e-10,
            skew: 1e-10,
            spec: 1e-9,
            tan: 1e-10,
            shoot: 1e-9,
            freq: 1e-8,
            ratio: 1e-9,
            d_max: 1000,
            rank: 1e-10,
            zero_freq: 1e-7,
            closure: 1e-8,
        }
    }
}

impl Tolerances {
    /// Checks the configuration invariants: positive tolerances, `d_max >= 100`.
    pub fn validate(&self) -> Result<(), String> {
        let named = [
            ("orth", self.orth),
            ("skew", self.skew),
            ("spec", self.spec),
            ("tan", self.tan),
            ("shoot", self.shoot),
            ("freq", self.freq),
            ("ratio", self.ratio),
            ("rank", self.rank),
            ("zero_freq", self.zero_freq),
            ("closure", self.closure),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("tolerance `{name}` must be positive, got {v}"));
            }
        }
        if self.d_max < 100 {
            return Err(format!("d_max must be at least 100, got {}", self.d_max));
        }
        Ok(())
    }
}
