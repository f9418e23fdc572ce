use std::fs;
use std::path::Path;

use besovflow_core::report::ExperimentReport;
use besovflow_core::{Error, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::experiments::Outcome;

/// The short result form printed to stdout.
#[derive(Serialize)]
pub struct Summary<'a> {
    pub claim: &'a str,
    pub theta: Option<f64>,
    pub fitted_exponents: &'a [f64],
    pub pass: bool,
}

impl<'a> From<&'a ExperimentReport> for Summary<'a> {
    fn from(r: &'a ExperimentReport) -> Self {
        Summary {
            claim: &r.claim,
            theta: r.theta,
            fitted_exponents: &r.fitted_exponents,
            pass: r.pass,
        }
    }
}

pub fn summary_line(r: &ExperimentReport) -> String {
    serde_json::to_string(&Summary::from(r)).expect("summary serializes")
}

/// Writes `<stem>.json` per report, `<stem>-<name>.csv` per scan and
/// profile, and the resolved configuration as `<stem>.config.json`.
pub fn write_outcome(cfg: &ExperimentConfig, outcome: &Outcome) -> Result<()> {
    let dir = &cfg.out;
    fs::create_dir_all(dir)?;
    let stem = cfg.stem();
    let hash = cfg.hash();
    let preamble = vec![
        format!("config-hash: {hash}"),
        format!("claim: {}", cfg.claim),
    ];
    fs::write(
        dir.join(format!("{stem}.config.json")),
        serde_json::to_string_pretty(cfg)?,
    )?;
    for (i, r) in outcome.reports.iter().enumerate() {
        let name = if outcome.reports.len() == 1 {
            format!("{stem}.json")
        } else {
            format!("{stem}-{i}.json")
        };
        fs::write(dir.join(name), serde_json::to_string_pretty(r)?)?;
    }
    for (name, scan) in &outcome.scans {
        scan.write_csv(
            fs::File::create(dir.join(format!("{stem}-{name}.csv")))?,
            &preamble,
        )?;
    }
    for (name, profile) in &outcome.profiles {
        profile.write_csv(
            fs::File::create(dir.join(format!("{stem}-{name}.csv")))?,
            &preamble,
        )?;
    }
    Ok(())
}

/// Every report JSON directly inside `dir`, sorted by file name. Files
/// that are not reports (configs, summaries) are skipped.
pub fn collect_reports(dir: &Path) -> Result<Vec<ExperimentReport>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let text = fs::read_to_string(&p)?;
        if let Ok(r) = serde_json::from_str::<ExperimentReport>(&text) {
            out.push(r);
        }
    }
    if out.is_empty() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no reports found in {}", dir.display()),
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Claim, ConfigFile};
    use besovflow_core::scan::NormScan;

    #[test]
    fn outputs_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut raw = ConfigFile::default();
        raw.experiment.claim = Some(Claim::Molli);
        raw.output.out = Some(dir.path().to_path_buf());
        let cfg = ExperimentConfig::resolve(&raw).unwrap();
        let mut report = ExperimentReport::new("molli", "anchor");
        report.pass = true;
        let outcome = Outcome {
            reports: vec![report.clone()],
            scans: vec![(
                "error".into(),
                NormScan::new(vec![0.5, 0.25], vec![1.0, 0.7], "e").unwrap(),
            )],
            profiles: Vec::new(),
        };
        write_outcome(&cfg, &outcome).unwrap();
        let csv = fs::read_to_string(dir.path().join("molli-theta0.5-error.csv")).unwrap();
        assert!(csv.starts_with(&format!("# config-hash: {}", cfg.hash())));
        assert_eq!(collect_reports(dir.path()).unwrap(), vec![report]);
        assert!(summary_line(&outcome.reports[0]).contains("\"pass\":true"));
    }
}
