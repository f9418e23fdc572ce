//! Experiment configuration: a sectioned TOML file whose values can be
//! overridden from the command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use besovflow_core::norms::Kernel;
use besovflow_core::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    Molli,
    InterpIneq,
    KfunProfile,
    KfunBilinear,
    KfunTrilinear,
    PressureDouble,
    TimeReg,
    DtpIdentity,
    BesovEquiv,
}

impl Claim {
    pub fn id(self) -> &'static str {
        match self {
            Claim::Molli => "molli",
            Claim::InterpIneq => "interp-ineq",
            Claim::KfunProfile => "kfun-profile",
            Claim::KfunBilinear => "kfun-bilinear",
            Claim::KfunTrilinear => "kfun-trilinear",
            Claim::PressureDouble => "pressure-double",
            Claim::TimeReg => "time-reg",
            Claim::DtpIdentity => "dtp-identity",
            Claim::BesovEquiv => "besov-equiv",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Which pressure time-regularity statement a `time-reg` run tests; `i`
/// is the velocity's own time exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TimeClaimId {
    I,
    Ii,
    Iii,
    Iv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum KernelId {
    Gaussian,
    Bump,
}

impl From<KernelId> for Kernel {
    fn from(k: KernelId) -> Self {
        match k {
            KernelId::Gaussian => Kernel::GaussianTruncated,
            KernelId::Bump => Kernel::PolynomialBump,
        }
    }
}

/// `NxN` or `NxNxN`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub dim: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<usize> = s
            .split('x')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad grid '{s}': {e}"))
            })
            .collect::<std::result::Result<_, _>>()?;
        if !(2..=3).contains(&parts.len()) || parts.iter().any(|&p| p != parts[0]) {
            return Err(format!("grid '{s}' must be NxN or NxNxN with equal sides"));
        }
        Ok(GridSpec {
            n: parts[0],
            dim: parts.len(),
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sides = vec![self.n.to_string(); self.dim];
        f.write_str(&sides.join("x"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub claim: Option<Claim>,
    pub time_claim: Option<TimeClaimId>,
    pub seed: Option<u64>,
    pub corpus_size: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub n: Option<usize>,
    pub dim: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    pub jmax: Option<u32>,
    pub kernel: Option<KernelId>,
    /// Time levels of synthetic series.
    pub levels: Option<u32>,
    pub samples_per_period: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentSection {
    pub theta: Option<f64>,
    pub theta_space: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub out: Option<PathBuf>,
}

/// Raw configuration as read from file or flags. Unset values take claim
/// specific defaults in [`ExperimentConfig::resolve`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: ExperimentSection,
    pub grid: GridSection,
    pub field: FieldSection,
    pub exponents: ExponentSection,
    pub output: OutputSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
    }

    /// Values set in `other` win.
    pub fn overlay(mut self, other: &ConfigFile) -> Self {
        macro_rules! take {
            ($($sec:ident.$f:ident),*) => {
                $(if other.$sec.$f.is_some() {
                    self.$sec.$f = other.$sec.$f.clone();
                })*
            };
        }
        take!(
            experiment.claim,
            experiment.time_claim,
            experiment.seed,
            experiment.corpus_size,
            grid.n,
            grid.dim,
            field.jmax,
            field.kernel,
            field.levels,
            field.samples_per_period,
            exponents.theta,
            exponents.theta_space,
            exponents.gamma,
            exponents.beta,
            exponents.epsilon,
            exponents.r,
            exponents.s,
            output.out
        );
        self
    }
}

/// Fully resolved experiment parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub claim: Claim,
    pub time_claim: TimeClaimId,
    pub seed: u64,
    pub corpus_size: usize,
    pub n: usize,
    pub dim: usize,
    pub jmax: u32,
    pub kernel: KernelId,
    pub levels: u32,
    pub samples_per_period: usize,
    pub theta: f64,
    pub theta_space: f64,
    pub gamma: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub r: f64,
    pub s: f64,
    pub out: PathBuf,
}

/// Highest lacunary level a grid resolves: `2^jmax < n / 2`.
fn resolved_depth(n: usize) -> u32 {
    n.max(8).ilog2() - 2
}

/// Highest level whose annulus stays inside a 2/3 dealiasing box.
fn dealiased_depth(n: usize) -> u32 {
    let mut j = 0;
    while (1usize << (j + 2)) * 3 <= n {
        j += 1;
    }
    j
}

impl ExperimentConfig {
    pub fn resolve(raw: &ConfigFile) -> Result<Self> {
        let claim = raw
            .experiment
            .claim
            .ok_or_else(|| Error::InvalidParameter("no claim given".into()))?;
        let time_claim = raw.experiment.time_claim.unwrap_or(TimeClaimId::I);
        let (n0, corpus0, theta0) = match claim {
            Claim::Molli => (256, 1, 0.5),
            Claim::InterpIneq => (128, 20, 0.7),
            Claim::KfunProfile => (64, 10, 0.5),
            Claim::KfunBilinear | Claim::KfunTrilinear => (128, 10, 0.6),
            Claim::PressureDouble => (512, 10, 0.4),
            Claim::TimeReg => (256, 1, 0.7),
            Claim::DtpIdentity => (128, 1, 0.5),
            Claim::BesovEquiv => (128, 20, 0.6),
        };
        let n = raw.grid.n.unwrap_or(n0);
        let dim = raw.grid.dim.unwrap_or(2);
        let jmax0 = match claim {
            Claim::KfunBilinear | Claim::KfunTrilinear => 4,
            Claim::PressureDouble => dealiased_depth(n),
            _ => resolved_depth(n),
        };
        let levels0 = match (claim, time_claim) {
            (Claim::TimeReg, TimeClaimId::I) => 6,
            _ => 5,
        };
        let spp0 = match (claim, time_claim) {
            (Claim::TimeReg, TimeClaimId::I) => 8,
            _ => 16,
        };
        let theta = raw.exponents.theta.unwrap_or(theta0);
        let cfg = Self {
            claim,
            time_claim,
            seed: raw.experiment.seed.unwrap_or(0),
            corpus_size: raw.experiment.corpus_size.unwrap_or(corpus0),
            n,
            dim,
            jmax: raw.field.jmax.unwrap_or(jmax0),
            kernel: raw.field.kernel.unwrap_or(KernelId::Gaussian),
            levels: raw.field.levels.unwrap_or(levels0),
            samples_per_period: raw.field.samples_per_period.unwrap_or(spp0),
            theta,
            theta_space: raw.exponents.theta_space.unwrap_or(theta),
            gamma: raw.exponents.gamma.unwrap_or(0.3),
            beta: raw.exponents.beta.unwrap_or(0.0),
            epsilon: raw.exponents.epsilon.unwrap_or(0.0),
            r: raw.exponents.r.unwrap_or(2.0),
            s: raw.exponents.s.unwrap_or(2.0),
            out: raw
                .output
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("results")),
        };
        cfg.check_hypotheses()?;
        Ok(cfg)
    }

    /// Rejects parameters outside the hypotheses of the tested statement.
    pub fn check_hypotheses(&self) -> Result<()> {
        let gated = matches!(self.claim, Claim::PressureDouble | Claim::TimeReg);
        if gated && !(self.r > 1.0 && self.r.is_finite()) {
            return Err(Error::Hypothesis(format!(
                "requires 1 < r < infinity, got r = {}",
                self.r
            )));
        }
        if self.claim == Claim::TimeReg
            && matches!(self.time_claim, TimeClaimId::Ii | TimeClaimId::Iv)
            && self.theta <= 0.5
        {
            return Err(Error::Hypothesis(format!(
                "claim ({}) requires theta > 1/2, got theta = {}",
                self.time_claim_label(),
                self.theta
            )));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta = {} must lie in (0, 1)",
                self.theta
            )));
        }
        if self.corpus_size == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(())
    }

    pub fn time_claim_label(&self) -> &'static str {
        match self.time_claim {
            TimeClaimId::I => "i",
            TimeClaimId::Ii => "ii",
            TimeClaimId::Iii => "iii",
            TimeClaimId::Iv => "iv",
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json)[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Base name of output files.
    pub fn stem(&self) -> String {
        match self.claim {
            Claim::TimeReg => format!("time-reg-{}-theta{}", self.time_claim_label(), self.theta),
            c => format!("{}-theta{}", c.id(), self.theta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_parsing() {
        assert_eq!(
            "256x256".parse::<GridSpec>().unwrap(),
            GridSpec { n: 256, dim: 2 }
        );
        assert_eq!("64x64x64".parse::<GridSpec>().unwrap().dim, 3);
        assert!("64x32".parse::<GridSpec>().is_err());
        assert!("64".parse::<GridSpec>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: ConfigFile = toml::from_str(
            "[experiment]\nclaim = \"molli\"\nseed = 3\n[exponents]\ntheta = 0.3\n[grid]\nn = 64\n",
        )
        .unwrap();
        let mut flags = ConfigFile::default();
        flags.exponents.theta = Some(0.7);
        let cfg = ExperimentConfig::resolve(&file.overlay(&flags)).unwrap();
        assert_eq!(cfg.theta, 0.7);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.n, 64);
        assert_eq!(cfg.jmax, 4);
        assert!(toml::from_str::<ConfigFile>("[grid]\nsize = 3\n").is_err());
    }

    #[test]
    fn gates_and_hash() {
        let mut raw = ConfigFile::default();
        raw.experiment.claim = Some(Claim::TimeReg);
        raw.experiment.time_claim = Some(TimeClaimId::Ii);
        raw.exponents.theta = Some(0.4);
        let err = ExperimentConfig::resolve(&raw).unwrap_err();
        assert!(err.to_string().contains("requires theta > 1/2"));
        raw.exponents.theta = Some(0.7);
        raw.exponents.r = Some(1.0);
        assert!(matches!(
            ExperimentConfig::resolve(&raw),
            Err(Error::Hypothesis(_))
        ));
        raw.exponents.r = Some(3.0);
        let a = ExperimentConfig::resolve(&raw).unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }
}
