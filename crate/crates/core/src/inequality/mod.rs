//! Numerical probes of the harmonic-analysis estimates behind the
//! well-posedness theory: a Kato–Ponce commutator bound, the `H^s` algebra
//! property, a short-time Strichartz bound on dyadic shells, and the
//! transference of Fourier multipliers from `R²` to `T²`.

mod bilinear;
mod random;
mod strichartz;
mod transference;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stats::{summarize, Summary};

pub use bilinear::{
    exact_product, kato_ponce_ensemble, kato_ponce_ratio, product_ensemble, product_ratio, RatioSample,
};
pub use random::{exponential_profile, random_band_limited, random_field, RandomFieldSpec};
pub use strichartz::{strichartz_ensemble, strichartz_sample, STRICHARTZ_NODES};
pub use transference::{
    line_multiplier_closed_form_s2, periodization_l2_ratio, transference_check, QuadratureSpec,
    TransferenceReport,
};

/// Ratios collected over a random ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub inequality: String,
    pub parameters: serde_json::Value,
    pub samples: Vec<RatioSample>,
    /// Draws whose right-hand side vanished.
    pub degenerate: usize,
    pub summary: Summary,
}

impl RatioReport {
    pub(crate) fn collect(
        inequality: &str,
        parameters: serde_json::Value,
        results: Vec<Result<RatioSample>>,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(results.len());
        let mut degenerate = 0;
        for r in results {
            match r {
                Ok(s) => samples.push(s),
                Err(crate::Error::Degenerate) => degenerate += 1,
                Err(e) => return Err(e),
            }
        }
        let ratios: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
        Ok(Self {
            inequality: inequality.to_string(),
            parameters,
            summary: summarize(&ratios),
            samples,
            degenerate,
        })
    }

    pub fn max_ratio(&self) -> f64 {
        self.summary.max
    }

    /// `index,lhs,rhs,ratio` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,lhs,rhs,ratio")?;
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(w, "{i},{:e},{:e},{:e}", s.lhs, s.rhs, s.ratio)?;
        }
        Ok(())
    }
}
