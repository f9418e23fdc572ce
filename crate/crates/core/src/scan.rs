//! Scale scans and log–log exponent regression.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm values sampled at strictly decreasing scales (coarse to fine).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormScan {
    pub scale_values: Vec<f64>,
    pub norm_values: Vec<f64>,
    pub estimator_id: String,
}

impl NormScan {
    pub fn new(
        scale_values: Vec<f64>,
        norm_values: Vec<f64>,
        estimator_id: impl Into<String>,
    ) -> Result<Self> {
        if scale_values.len() != norm_values.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} scales but {} values",
                scale_values.len(),
                norm_values.len()
            )));
        }
        if scale_values.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidParameter(
                "scales must be strictly decreasing".into(),
            ));
        }
        if scale_values.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidParameter("scales must be positive".into()));
        }
        if norm_values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "norm values must be nonnegative".into(),
            ));
        }
        Ok(Self {
            scale_values,
            norm_values,
            estimator_id: estimator_id.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.scale_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scale_values.is_empty()
    }

    /// Drops entries below `rel` times the largest value. Spectral scans of
    /// band-limited data carry round-off in blocks that hold no modes.
    pub fn without_negligible(&self, rel: f64) -> NormScan {
        let top = self.norm_values.iter().copied().fold(0.0, f64::max);
        let (scale_values, norm_values) = self
            .scale_values
            .iter()
            .zip(&self.norm_values)
            .filter(|(_, v)| **v > rel * top)
            .map(|(s, v)| (*s, *v))
            .unzip();
        NormScan {
            scale_values,
            norm_values,
            estimator_id: self.estimator_id.clone(),
        }
    }

    /// Writes `scale,value,estimator_id` rows with a header. Lines in
    /// `preamble` are emitted first as `# ` comments.
    pub fn write_csv<W: Write>(&self, out: W, preamble: &[String]) -> Result<()> {
        let mut out = out;
        for line in preamble {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scale", "value", "estimator_id"])?;
        for (s, v) in self.scale_values.iter().zip(&self.norm_values) {
            w.write_record([
                format!("{s:e}"),
                format!("{v:e}"),
                self.estimator_id.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scales removed from each end of a scan before regression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub drop_fine: usize,
    pub drop_coarse: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            drop_fine: 2,
            drop_coarse: 1,
        }
    }
}

impl FitWindow {
    pub const ALL: FitWindow = FitWindow {
        drop_fine: 0,
        drop_coarse: 0,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least squares of `log2(value)` against `log2(scale)` inside `window`.
pub fn fit_exponent(scan: &NormScan, window: FitWindow) -> Result<ExponentFit> {
    let n = scan.len();
    let lo = window.drop_coarse;
    let hi = n.saturating_sub(window.drop_fine);
    if hi < lo + 3 {
        return Err(Error::InsufficientScales {
            needed: 3 + window.drop_coarse + window.drop_fine,
            got: n,
        });
    }
    let xs: Vec<f64> = scan.scale_values[lo..hi].iter().map(|s| s.log2()).collect();
    let mut ys = Vec::with_capacity(hi - lo);
    for &v in &scan.norm_values[lo..hi] {
        if v <= 0.0 {
            return Err(Error::ZeroNormInScan);
        }
        ys.push(v.log2());
    }
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (ssr / (m - 2.0) / sxx).sqrt();
    Ok(ExponentFit {
        slope,
        stderr,
        intercept,
        points: xs.len(),
    })
}

/// `2^{-lo}, 2^{-lo-1}, ..., 2^{-hi}` times `unit`.
pub fn dyadic_scales(unit: f64, lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| unit * 2f64.powi(-j)).collect()
}
