//! Per-sample feature standardization and the target scaler.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::NetError;

/// Rows of the input matrix.
pub const HEIGHT: usize = 3;

/// Columns whose variance falls below this are centred but not divided.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// A `3 x w` matrix standardized column by column, with the statistics used.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledSample {
    pub matrix: Array2<f64>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// Mean and divisor of a slice, population variance, floor-guarded.
fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = if var < VARIANCE_FLOOR { 1.0 } else { var.sqrt() };
    (mean, std)
}

/// Standardizes each column of the matrix whose rows are `rows` across its
/// three entries.
pub fn scale_features(rows: [&[u64]; HEIGHT]) -> Result<ScaledSample, NetError> {
    let w = rows[0].len();
    if w == 0 || rows.iter().any(|r| r.len() != w) {
        return Err(NetError::Shape(format!(
            "rows of lengths {}, {}, {}",
            rows[0].len(),
            rows[1].len(),
            rows[2].len()
        )));
    }
    let mut matrix = Array2::zeros((HEIGHT, w));
    let mut means = Vec::with_capacity(w);
    let mut stds = Vec::with_capacity(w);
    for j in 0..w {
        let col: Vec<f64> = rows.iter().map(|r| r[j] as f64).collect();
        let (mean, std) = moments(&col);
        for (i, x) in col.iter().enumerate() {
            matrix[[i, j]] = (x - mean) / std;
        }
        means.push(mean);
        stds.push(std);
    }
    Ok(ScaledSample { matrix, means, stds })
}

/// Standardization of regression targets, fitted on training labels only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetScaler {
    pub mean: f64,
    pub std: f64,
}

impl TargetScaler {
    pub fn fit(ys: &[f64]) -> Result<TargetScaler, NetError> {
        if ys.is_empty() {
            return Err(NetError::Empty);
        }
        let (mean, std) = moments(ys);
        Ok(TargetScaler { mean, std })
    }

    pub fn transform(&self, y: f64) -> f64 {
        (y - self.mean) / self.std
    }

    pub fn inverse(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}
