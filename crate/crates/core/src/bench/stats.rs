use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    /// Lower middle element for even counts.
    pub median: f64,
    pub average: f64,
}

pub fn stats(samples: &[f64]) -> Result<Summary> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidParameter("samples must be finite and non-negative".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(Summary {
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        median: sorted[(sorted.len() - 1) / 2],
        average: sorted.iter().sum::<f64>() / sorted.len() as f64,
    })
}
