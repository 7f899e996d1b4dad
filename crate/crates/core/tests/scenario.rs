use specpart::scenario::{
    apply_axis, execute, run, sweep, ImsResult, Mode, PerssonResult, RingResult, ScenarioConfig, SolveResult, SweepAxis,
};

const SMALL: &str = r#"
name = "small"
mode = "solve"
k = 2
p = 2
seed = 7

[domain]
region = { type = "rect", lo = [0.0, 0.0], hi = [3.0, 3.0] }
lo = [0.0, 0.0]
hi = [3.0, 3.0]
h = 0.25

[optimizer]
starts = 2

[sigma]
radii = [0.5, 1.0, 1.5]
"#;

fn small() -> ScenarioConfig {
    ScenarioConfig::from_toml(SMALL).unwrap()
}

#[test]
fn shipped_samples_parse_and_validate() {
    let names = ScenarioConfig::names();
    assert_eq!(names.len(), 7);
    for name in names {
        let c = ScenarioConfig::named(name).unwrap();
        assert_eq!(c.mode, Mode::Example);
        assert_eq!(c.example.as_ref().unwrap().name, name);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(ScenarioConfig::from_json(&json).unwrap(), c);
    }
    assert!(ScenarioConfig::named("nosuch").is_err());
}

#[test]
fn unknown_fields_and_bad_values_are_rejected() {
    assert!(ScenarioConfig::from_toml(&format!("{SMALL}\nbogus = 1\n")).is_err());
    assert!(ScenarioConfig::from_toml(&SMALL.replace("k = 2", "k = 0")).is_err());
    assert!(ScenarioConfig::from_toml(&SMALL.replace("p = 2", "p = 0.5")).is_err());
    assert!(ScenarioConfig::from_toml(&SMALL.replace("h = 0.25", "h = 0.7")).is_err());
    let inf = ScenarioConfig::from_toml(&SMALL.replace("p = 2", "p = \"inf\"")).unwrap();
    assert!(inf.p.is_inf());
}

#[test]
fn solve_is_deterministic_and_hashed() {
    let a = execute(&small()).unwrap();
    let b = execute(&small()).unwrap();
    assert_eq!(serde_json::to_string(&a.report).unwrap(), serde_json::to_string(&b.report).unwrap());
    assert_eq!(a.report.input_hash.len(), 64);
    let mut other = small();
    other.seed = 8;
    assert_ne!(execute(&other).unwrap().report.input_hash, a.report.input_hash);
    let r: SolveResult = serde_json::from_value(a.report.result).unwrap();
    assert_eq!(r.partition.energy.lambdas.len(), 2);
    assert_eq!(r.eigenvalues.len(), 2);
}

#[test]
fn threshold_mode_attaches_the_threshold() {
    let mut c = small();
    c.mode = Mode::Threshold;
    let r: SolveResult = serde_json::from_value(execute(&c).unwrap().report.result).unwrap();
    let t = r.threshold.unwrap();
    assert!(r.lambda_prev.is_some());
    assert!(t.holder_bound_holds());
}

#[test]
fn run_writes_report_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small();
    c.out = Some(dir.path().to_path_buf());
    run(&c).unwrap();
    for f in ["report.json", "cells.pgm", "eigenvalues.csv", "cell_1.spfd", "cell_2.spfd"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let csv = std::fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    assert!(csv.starts_with("index,lambda,residual\n"));
}

#[test]
fn persson_mode_reports_a_monotone_sweep() {
    let mut c = small();
    c.mode = Mode::Persson;
    let r: PerssonResult = serde_json::from_value(execute(&c).unwrap().report.result).unwrap();
    assert!(r.monotone);
    assert_eq!(r.sweep.rows.len(), 3);
}

#[test]
fn ring_mode_stays_within_eps() {
    let mut c = small();
    c.mode = Mode::Ring;
    c.domain.lo = vec![-12.0, -12.0];
    c.domain.hi = vec![12.0, 12.0];
    c.domain.h = 0.5;
    c.domain.region = specpart::geometry::Region::rect(&[-12.0, -12.0], &[12.0, 12.0]);
    c.ring.eps = 0.5;
    c.ring.sigma = Some(0.0);
    let r: RingResult = serde_json::from_value(execute(&c).unwrap().report.result).unwrap();
    assert!(r.within_eps);
    assert!(r.energy.lambdas.iter().all(|&l| l <= 0.5));
}

#[test]
fn ims_mode_reports_quartering_residuals() {
    let mut c = small();
    c.mode = Mode::Ims;
    c.domain.lo = vec![-8.0, -8.0];
    c.domain.hi = vec![8.0, 8.0];
    c.domain.h = 0.125;
    c.domain.region = specpart::geometry::Region::rect(&[-8.0, -8.0], &[8.0, 8.0]);
    c.ims.n = vec![1.0, 2.0, 4.0];
    let r: ImsResult = serde_json::from_value(execute(&c).unwrap().report.result).unwrap();
    for row in &r.rows[1..] {
        let ratio = row.ratio.unwrap();
        assert!((3.0..=5.0).contains(&ratio), "{ratio}");
    }
}

#[test]
fn sweeps_mark_monotonicity() {
    let t = sweep(&small(), SweepAxis::P, &[1.0, 2.0, f64::INFINITY]).unwrap();
    assert!(t.all_ok(), "{}", t.to_csv());
    assert!(t.to_csv().lines().count() == 4);
    assert!(apply_axis(&small(), SweepAxis::K, 1.5).is_err());
    assert!("window".parse::<SweepAxis>().is_ok() && "q".parse::<SweepAxis>().is_err());
}
