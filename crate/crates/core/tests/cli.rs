use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use photon_steering::cli::fn_table::{cmd_fn_table, FnTable};
use photon_steering::cli::presets::{cmd_scenario, presets, ScenarioOutcome};
use photon_steering::cli::sweep::{run_sweep, SweepGrid, SweepSpec};
use photon_steering::eval::{evaluate_inequality, SteeringReport};
use photon_steering::sim::{run_experiment, SimConfig, SimResult, Strategy as Play};
use photon_steering::{ExperimentParams, SettingCount};
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_photon-steer"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn scenario_table_and_json() {
    let o = run(&["scenario", "babichev-sym"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("necessary_lhs") && text.contains("0.87") && text.contains("PASS"), "{text}");

    let o = run(&["--json", "scenario", "improved-no-pd"]);
    assert!(o.status.success());
    let parsed: ScenarioOutcome = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(parsed.schema_version, 1);
    assert!(parsed.all_pass);
    assert!((parsed.report.sufficient.lhs_value - 1.10).abs() <= 0.005);
}

#[test]
fn unknown_scenario_lists_presets() {
    let o = run(&["scenario", "no-such-thing"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    for p in presets() {
        assert!(err.contains(&p.name), "{err}");
    }
}

#[test]
fn fn_table_output() {
    let o = run(&["fn-table", "--max", "8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for v in ["0.70711", "0.66667", "0.64073", "0.63662"] {
        assert!(text.contains(v), "{v} missing from\n{text}");
    }
    let o = run(&["--json", "fn-table", "--max", "20"]);
    let table: FnTable = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(table.rows.len(), 20);
}

#[test]
fn sweep_writes_grid_and_contour() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let spec = configs().join("sweep_detectors.json");
    let o = run(&["sweep", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("eta_h,eta_p,value,flag\n"));
    assert_eq!(csv.lines().count(), 1 + 101 * 101);
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(&last[..2], ["1", "1"]);
    assert!((last[2].parse::<f64>().unwrap() - 0.56010).abs() < 5e-6);
    assert!(csv.contains("\n0,0,2,unreachable\n"));
    let contour = std::fs::read_to_string(dir.path().join("grid.csv.contour.csv")).unwrap();
    assert!(contour.lines().count() > 10);
}

#[test]
fn sweep_to_unwritable_path_names_it() {
    let spec = configs().join("sweep_detectors.json");
    let o = run(&["sweep", "--spec", spec.to_str().unwrap(), "--out", "/nonexistent-dir/grid.csv"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/grid.csv"));
}

#[test]
fn simulate_ideal_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("sim_ideal.json");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let result: SimResult =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sim_result.json")).unwrap()).unwrap();
    let expected = (2.0 / std::f64::consts::PI).sqrt();
    assert!(result.report.lhs.z_score(expected) < 5.0);
    assert!(!dir.path().join("transcript.csv").exists());
}

#[test]
fn simulate_cheater_exits_zero_with_not_violated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("sim_cheater.json");
    let o = run(&["--json", "simulate", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let result: SimResult = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(result.report.verdict, photon_steering::eval::Verdict::NotViolated);
    let transcript = std::fs::read_to_string(dir.path().join("transcript.csv")).unwrap();
    assert!(transcript.contains(",equatorial:0,"));
}

#[test]
fn malformed_config_reports_line_and_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"preset\": \"ideal\",\n  \"shots_per_setting\": \"many\",\n  \"seed\": 1\n}").unwrap();
    let out = dir.path().join("out");
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");
    assert!(!out.exists());
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let spec: SweepSpec =
        serde_json::from_str(&std::fs::read_to_string(configs().join("sweep_detectors.json")).unwrap()).unwrap();
    let with = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_sweep(&spec).unwrap())
    };
    let one = with(1);
    let four = with(4);
    assert_eq!(one.to_csv(), four.to_csv());
    assert_eq!(one, four);
}

fn round_trip<T>(x: &T) -> T
where
    T: serde::Serialize + serde::de::DeserializeOwned,
{
    serde_json::from_str(&serde_json::to_string(x).unwrap()).unwrap()
}

#[test]
fn report_types_round_trip() {
    for p in presets() {
        let outcome = cmd_scenario(&p.name).unwrap();
        assert_eq!(round_trip(&outcome), outcome);
    }
    let table = cmd_fn_table(17).unwrap();
    assert_eq!(round_trip(&table), table);
    let spec: SweepSpec =
        serde_json::from_str(&std::fs::read_to_string(configs().join("sweep_detectors.json")).unwrap()).unwrap();
    let grid = run_sweep(&spec).unwrap();
    assert_eq!(round_trip::<SweepGrid>(&grid), grid);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steering_reports_round_trip(
        eta in 0.0f64..=1.0, chi in 0.0f64..=1.0, eta_h in 0.0f64..=1.0, eta_p in 0.0f64..=1.0,
        n in prop_oneof![(1u32..50).prop_map(SettingCount::Finite), Just(SettingCount::Infinite)],
    ) {
        let report = evaluate_inequality(&ExperimentParams::new(eta, chi, eta_h, eta_p, n).unwrap()).unwrap();
        prop_assert_eq!(round_trip::<SteeringReport>(&report), report);
    }

    #[test]
    fn sim_results_round_trip(seed in any::<u64>(), shots in 1u64..40, strategy_index in 0usize..3) {
        let strategy = [Play::HonestQuantum, Play::LhsTwoRing, Play::LhsEquatorial][strategy_index];
        let cfg = SimConfig {
            params: ExperimentParams::new(0.64, 0.3, 0.86, 0.3, SettingCount::Finite(4)).unwrap(),
            shots_per_setting: shots,
            seed,
            strategy,
            record_transcript: true,
        };
        let result = run_experiment(&cfg).unwrap();
        prop_assert_eq!(round_trip(&result), result);
    }
}
