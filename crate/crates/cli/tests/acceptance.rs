//! Acceptance suite. Prints one line per criterion and exits non-zero when a
//! criterion fails that is not listed in `KNOWN_FAILURES`. Set
//! `BESOVFLOW_STRICT=1` to make every failure fatal.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use besovflow::config::{ConfigFile, ExperimentConfig};
use besovflow::experiments::{self, Outcome};
use besovflow_core::pressure::solve_bilinear;
use besovflow_core::report::{deviation, ExperimentReport};
use besovflow_core::{Field, Grid};

/// Criteria measured to fail at desk scale; see the README.
const KNOWN_FAILURES: [u32; 2] = [2, 3];

const TG_TOL: f64 = 1e-10;
const TG_BUDGET: f64 = 1.0;
const MOLLI_SLOPE_TOL: [f64; 3] = [0.1, 0.1, 0.15];
const MOLLI_BUDGET: f64 = 30.0;
const DOUBLE_SLACK: f64 = 0.15;
const DOUBLE_BUDGET: f64 = 120.0;
const INTERP_BOUND: f64 = 10.0;
const INTERP_BUDGET: f64 = 60.0;
const CLOSED_FORM_TOL: f64 = 1e-6;
const K_RATIO_BOUND: f64 = 100.0;
const K_DRIFT: f64 = 0.2;
const DTP_MIN_RATIO: f64 = 3.5;
const DTP_FINEST: f64 = 1e-4;
const DTP_BUDGET: f64 = 120.0;
const TIME_SLOPE_TOL: f64 = 0.1;
const EQUIV_BAND: (f64, f64) = (0.05, 20.0);

type Criterion = (u32, &'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn config(toml_text: &str) -> ExperimentConfig {
    let raw: ConfigFile = toml::from_str(toml_text).expect("valid acceptance config");
    ExperimentConfig::resolve(&raw).expect("config resolves")
}

fn run(toml_text: &str) -> Outcome {
    experiments::run(&config(toml_text)).expect("experiment runs")
}

fn value(r: &ExperimentReport, name: &str) -> f64 {
    r.value(name).unwrap_or(f64::NAN)
}

fn fmt_slopes(v: &[f64]) -> String {
    v.iter()
        .map(|s| format!("{s:.3}"))
        .collect::<Vec<_>>()
        .join("/")
}

fn taylor_green() -> Verdict {
    let start = Instant::now();
    let g = Grid::cube(2, 128).unwrap();
    let u = Field::from_fn(&g, 2, |x, c| {
        let (a, b) = (2.0 * PI * x[0], 2.0 * PI * x[1]);
        if c == 0 {
            a.sin() * b.cos()
        } else {
            -a.cos() * b.sin()
        }
    })
    .unwrap();
    let p = solve_bilinear(&u, &u).unwrap().p;
    // -lap p = d_i d_j (u_i u_j) solved by hand for this flow
    let exact = Field::from_fn(&g, 1, |x, _| {
        ((4.0 * PI * x[0]).cos() + (4.0 * PI * x[1]).cos()) / 4.0
    })
    .unwrap();
    let err = p.sub(&exact).unwrap().max_abs();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        err < TG_TOL && secs < TG_BUDGET,
        format!("max error {err:.2e}, {secs:.2} s"),
    )
}

fn mollification() -> Verdict {
    let runs = [(0.3, 256, 2), (0.5, 256, 2), (0.7, 256, 2), (0.5, 64, 3)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (theta, n, dim) in runs {
        let start = Instant::now();
        let out = run(&format!(
            "[experiment]\nclaim = \"molli\"\n[grid]\nn = {n}\ndim = {dim}\n[exponents]\ntheta = {theta}\n"
        ));
        let secs = start.elapsed().as_secs_f64();
        let slopes = &out.reports[0].fitted_exponents;
        let targets = [theta, theta - 1.0, 2.0 * theta];
        let ok = slopes.len() == 3
            && slopes
                .iter()
                .zip(targets)
                .zip(MOLLI_SLOPE_TOL)
                .all(|((s, t), tol)| (s - t).abs() <= tol)
            && secs < MOLLI_BUDGET;
        pass &= ok;
        parts.push(format!(
            "theta {theta} {n}^{dim}: {} ({secs:.1} s)",
            fmt_slopes(slopes)
        ));
    }
    verdict(pass, parts.join("; "))
}

fn double_regularity() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for theta in [0.3, 0.4] {
        let start = Instant::now();
        let out = run(&format!(
            "[experiment]\nclaim = \"pressure-double\"\ncorpus_size = 10\n[exponents]\ntheta = {theta}\nr = 2.0\n"
        ));
        let secs = start.elapsed().as_secs_f64();
        let r = &out.reports[0];
        let floor = 2.0 * theta - DOUBLE_SLACK;
        let ok = r.fitted_exponents.len() == 10
            && r.fitted_exponents.iter().all(|s| *s >= floor)
            && secs < DOUBLE_BUDGET;
        pass &= ok;
        let min = r
            .fitted_exponents
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        parts.push(format!(
            "theta {theta}: min slope {min:.3} vs {floor:.2}, compensated ratio {:.3} ({secs:.1} s)",
            value(r, "max_compensated_block_ratio")
        ));
    }
    verdict(pass, parts.join("; "))
}

fn interpolation() -> Verdict {
    let start = Instant::now();
    let out = run("[experiment]\nclaim = \"interp-ineq\"\ncorpus_size = 20\n");
    let secs = start.elapsed().as_secs_f64();
    let max = value(&out.reports[0], "max_ratio");
    verdict(
        max <= INTERP_BOUND && secs < INTERP_BUDGET,
        format!("max ratio {max:.3}, {secs:.1} s"),
    )
}

fn k_profiles() -> Verdict {
    let out = run("[experiment]\nclaim = \"kfun-profile\"\n");
    let r = &out.reports[0];
    let shapes = out
        .profiles
        .iter()
        .all(|(_, p)| p.is_monotone(1e-12) && p.is_concave(1e-9) && p.within_bound(1e-12));
    let (k_err, q_err) = (
        value(r, "closed_form_k_rel_err"),
        value(r, "closed_form_norm_rel_err"),
    );
    verdict(
        !out.profiles.is_empty() && shapes && k_err <= CLOSED_FORM_TOL && q_err <= CLOSED_FORM_TOL,
        format!(
            "{} profiles, closed form errors {k_err:.1e} / {q_err:.1e}",
            out.profiles.len()
        ),
    )
}

fn k_inequality(claim: &str) -> (Verdict, ExperimentReport) {
    let out = run(&format!(
        "[experiment]\nclaim = \"{claim}\"\ncorpus_size = 10\n"
    ));
    let r = out.reports.into_iter().next().unwrap();
    let (ratio, drift) = (
        value(&r, "max_bracketed_ratio"),
        value(&r, "refinement_drift"),
    );
    let v = verdict(
        ratio < K_RATIO_BOUND && drift <= K_DRIFT,
        format!("bracketed ratio {ratio:.3}, refinement drift {drift:.2e}"),
    );
    (v, r)
}

fn trilinear() -> Verdict {
    let (mut v, r) = k_inequality("kfun-trilinear");
    let recorded = r
        .deviations
        .iter()
        .any(|d| d == deviation::SHIFTED_TRILINEAR_COUPLE);
    v.pass &= recorded;
    v.detail.push_str(if recorded {
        ", couple deviation recorded"
    } else {
        ", couple deviation missing"
    });
    v
}

fn dtp_identity() -> Verdict {
    let start = Instant::now();
    let out = run("[experiment]\nclaim = \"dtp-identity\"\n[grid]\nn = 128\n");
    let secs = start.elapsed().as_secs_f64();
    let r = &out.reports[0];
    let (ratio, finest) = (value(r, "min_ratio"), value(r, "discrepancy_stride_1"));
    verdict(
        ratio >= DTP_MIN_RATIO && finest < DTP_FINEST && secs < DTP_BUDGET,
        format!("halving ratio {ratio:.2}, finest discrepancy {finest:.2e}, {secs:.1} s"),
    )
}

fn time_besov() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for theta in [0.3, 0.5, 0.7] {
        let out = run(&format!(
            "[experiment]\nclaim = \"time-reg\"\ntime_claim = \"i\"\n[grid]\nn = 256\n[field]\nlevels = 6\n[exponents]\ntheta = {theta}\n"
        ));
        let r = &out.reports[0];
        let slope = r.fitted_exponents.first().copied().unwrap_or(f64::NAN);
        pass &= (slope - theta).abs() <= TIME_SLOPE_TOL;
        parts.push(format!(
            "theta {theta}: {slope:.3} (split bound {:.3})",
            value(r, "split_bound_exponent")
        ));
    }
    verdict(pass, parts.join("; "))
}

fn gates() -> Verdict {
    let cases: [(&[&str], Option<&str>); 5] = [
        (
            &["timereg", "--claim", "ii", "--theta", "0.4"],
            Some("requires theta > 1/2"),
        ),
        (
            &["timereg", "--claim", "iv", "--theta", "0.5"],
            Some("requires theta > 1/2"),
        ),
        (
            &["timereg", "--claim", "iii", "--theta", "0.7", "--r", "1"],
            Some("1 < r < infinity"),
        ),
        (
            &["timereg", "--claim", "i", "--r", "inf"],
            Some("1 < r < infinity"),
        ),
        (
            &["pressure", "--theta", "0.4", "--r", "1"],
            Some("1 < r < infinity"),
        ),
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut codes = Vec::new();
    for (args, needle) in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_besovflow"))
            .args(args)
            .arg("--out")
            .arg(dir.path())
            .output()
            .expect("binary runs");
        let stderr = String::from_utf8_lossy(&out.stderr);
        let code = out.status.code();
        pass &= code == Some(2) && needle.is_none_or(|n| stderr.contains(n));
        codes.push(format!(
            "{}={}",
            args[..3].join(" "),
            code.map_or("signal".into(), |c| c.to_string())
        ));
    }
    verdict(pass, format!("exit codes: {}", codes.join(", ")))
}

fn equivalence() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for theta in [0.4, 0.6] {
        let out = run(&format!(
            "[experiment]\nclaim = \"besov-equiv\"\n[exponents]\ntheta = {theta}\n"
        ));
        let r = &out.reports[0];
        let (lo, hi) = (value(r, "min_ratio"), value(r, "max_ratio"));
        pass &= lo >= EQUIV_BAND.0 && hi <= EQUIV_BAND.1;
        parts.push(format!("theta {theta}: [{lo:.2}, {hi:.2}]"));
    }
    verdict(pass, parts.join("; "))
}

fn main() -> ExitCode {
    // libtest flags such as --nocapture are accepted and ignored; a bare
    // filter word selects criteria by name
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let strict = std::env::var("BESOVFLOW_STRICT").is_ok_and(|v| v == "1");
    let criteria: [Criterion; 11] = [
        (1, "taylor-green-pressure", taylor_green),
        (2, "mollification-scaling", mollification),
        (3, "pressure-double-regularity", double_regularity),
        (4, "interpolation-inequalities", interpolation),
        (5, "k-functional-profiles", k_profiles),
        (6, "bilinear-k-inequality", || {
            k_inequality("kfun-bilinear").0
        }),
        (7, "trilinear-k-inequality", trilinear),
        (8, "pressure-rate-identity", dtp_identity),
        (9, "time-besov-exponent", time_besov),
        (10, "hypothesis-gates", gates),
        (11, "besov-interpolation-equivalence", equivalence),
    ];
    let mut fatal = 0;
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let v = check();
        let tag = match (v.pass, KNOWN_FAILURES.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("[{tag}] {id:>2} {name}: {}", v.detail);
        if !v.pass {
            failed += 1;
            if strict || !KNOWN_FAILURES.contains(&id) {
                fatal += 1;
            }
        }
    }
    println!("acceptance: {} of {ran} criteria pass", ran - failed);
    if fatal > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
