use serde::{Deserialize, Serialize};

/// Outcome of one claim verification. `pass` is derived from the recorded
/// numbers only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub claim: String,
    pub anchor: String,
    pub theta: Option<f64>,
    pub fitted_exponents: Vec<f64>,
    /// Auxiliary recorded values (ratios, discrepancies), by name.
    #[serde(default)]
    pub values: Vec<(String, f64)>,
    pub floor: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub runtime: f64,
    pub deviations: Vec<String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(claim: impl Into<String>, anchor: impl Into<String>) -> Self {
        Self {
            claim: claim.into(),
            anchor: anchor.into(),
            theta: None,
            fitted_exponents: Vec::new(),
            values: Vec::new(),
            floor: None,
            tolerance: None,
            pass: false,
            runtime: 0.0,
            deviations: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn with_value(mut self, name: impl Into<String>, v: f64) -> Self {
        self.values.push((name.into(), v));
        self
    }
}

/// Intentional departures shared by several reports.
pub mod deviation {
    pub const HILBERT_RELAXATION: &str =
        "K-functionals use the r = 2 Hilbert-couple quadratic relaxation (K2 <= K <= sqrt(2) K2)";
    pub const SHIFTED_TRILINEAR_COUPLE: &str =
        "trilinear Y-couple realized as Hilbert weights of orders (-1, 1) on the pressure output";
    pub const INTERIOR_INCREMENTS: &str =
        "time-Besov increments taken over the interior t in (0, T - h) only";
    pub const PERIODIC_SHIFTS: &str =
        "difference seminorms use exact periodic shifts instead of an extension operator";
    pub const DYADIC_SHIFTS: &str =
        "sup over h restricted to dyadic lattice shifts along axes and main diagonals";
    pub const SYNTHETIC_SERIES: &str =
        "rough time regularity measured on constructed space-time series, not on evolved solutions";
    pub const SHARP_LP_BLOCKS: &str = "Littlewood-Paley blocks use sharp annular Fourier cutoffs";
}
