//! Isotropic Gaussian kernel density estimation.

use std::f64::consts::PI;

use ndarray::{Array2, ArrayView2};

use super::neighbors::squared_distance;
use crate::preprocess::EncodedMatrix;
use crate::{Error, Result};

pub const MIN_BANDWIDTH: f64 = 1e-6;

/// Scott's rule with a scalar bandwidth: `mean_j(sd_j) * n^(-1/(m+4))`,
/// floored at [`MIN_BANDWIDTH`]. Standard deviations use `n - 1`.
pub fn scott_bandwidth(data: ArrayView2<'_, f64>) -> Result<f64> {
    let (n, m) = data.dim();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "bandwidth selection needs at least 2 points, got {n}"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("bandwidth selection needs at least one column".into()));
    }
    let mean_sd = data
        .columns()
        .into_iter()
        .map(|col| {
            let mean = col.sum() / n as f64;
            let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        })
        .sum::<f64>()
        / m as f64;
    let h = mean_sd * (n as f64).powf(-1.0 / (m as f64 + 4.0));
    Ok(h.max(MIN_BANDWIDTH))
}

/// Equal-weight mixture of `N(x_i, h^2 I)` over the support points.
#[derive(Clone, Debug)]
pub struct KdeModel {
    support: Array2<f64>,
    bandwidth: f64,
    log_norm: f64,
}

impl KdeModel {
    /// Fits with the Scott bandwidth of the support points.
    pub fn fit(data: &EncodedMatrix) -> Result<Self> {
        Self::fit_array(data.values.as_standard_layout().to_owned())
    }

    pub(crate) fn fit_array(support: Array2<f64>) -> Result<Self> {
        let h = scott_bandwidth(support.view())?;
        Self::from_array(support, h)
    }

    pub fn with_bandwidth(data: &EncodedMatrix, bandwidth: f64) -> Result<Self> {
        Self::from_array(data.values.as_standard_layout().to_owned(), bandwidth)
    }

    pub(crate) fn from_array(support: Array2<f64>, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        let (n, m) = support.dim();
        if n == 0 {
            return Err(Error::EmptyTable("KDE support".into()));
        }
        let log_norm = -(n as f64).ln() - 0.5 * m as f64 * (2.0 * PI * bandwidth * bandwidth).ln();
        Ok(KdeModel {
            support,
            bandwidth,
            log_norm,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.support.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.support.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.support.ncols()
    }

    /// Log density at `query`, via log-sum-exp so it stays finite far from
    /// the support.
    pub fn logpdf(&self, query: &[f64]) -> Result<f64> {
        if query.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: query.len(),
            });
        }
        let scale = -0.5 / (self.bandwidth * self.bandwidth);
        let data = self.support.as_slice().expect("standard layout");
        let m = self.dim().max(1);
        let exponents = data
            .chunks_exact(m)
            .map(|p| scale * squared_distance(query, p));
        Ok(log_sum_exp(exponents) + self.log_norm)
    }
}

pub(crate) fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = values.map(|v| (v - max).exp()).sum();
    max + sum.ln()
}
