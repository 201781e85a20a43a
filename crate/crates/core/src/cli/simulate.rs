//! Monte Carlo runs driven by a JSON config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::presets::find_preset;
use super::{read_json, to_json, write_atomic, CliError, CliResult};
use crate::params::ExperimentParams;
use crate::sim::{run_experiment, BobAxis, ShotRecord, SimConfig, SimResult, Strategy};
use crate::Error;

pub const RESULT_FILE: &str = "sim_result.json";
pub const TRANSCRIPT_FILE: &str = "transcript.csv";

/// On-disk form of a simulation config: either explicit `params` or a `preset` name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ExperimentParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub shots_per_setting: u64,
    pub seed: u64,
    pub strategy: Strategy,
    #[serde(default)]
    pub record_transcript: bool,
}

impl SimConfigFile {
    pub fn resolve(self) -> CliResult<SimConfig> {
        let params = match (self.params, self.preset) {
            (Some(p), None) => p,
            (None, Some(name)) => find_preset(&name)?.params,
            (Some(_), Some(_)) => return Err(Error::Config("give either params or preset, not both".into()).into()),
            (None, None) => return Err(Error::Config("config needs params or a preset name".into()).into()),
        };
        Ok(SimConfig {
            params,
            shots_per_setting: self.shots_per_setting,
            seed: self.seed,
            strategy: self.strategy,
            record_transcript: self.record_transcript,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutputs {
    pub result: PathBuf,
    pub transcript: Option<PathBuf>,
}

pub fn transcript_csv(shots: &[ShotRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["setting", "alice_report", "bob_axis", "bob_outcome"])
        .expect("in-memory write");
    for s in shots {
        let axis = match s.bob_axis {
            BobAxis::Z => "z".to_string(),
            BobAxis::Equatorial => format!("equatorial:{}", s.bob_theta),
        };
        w.write_record([
            s.setting.to_string(),
            s.alice_report.to_string(),
            axis,
            s.bob_outcome.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

/// Parses the config, runs the experiment, and only then writes `sim_result.json`
/// (plus `transcript.csv` when requested) into `out_dir`.
pub fn cmd_simulate(config: &Path, out_dir: &Path) -> CliResult<(SimResult, SimulateOutputs)> {
    let file: SimConfigFile = read_json(config)?;
    let cfg = file.resolve()?;
    let mut result = run_experiment(&cfg)?;
    let transcript = result.transcript.take();

    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let transcript_path = match &transcript {
        Some(shots) => {
            let path = out_dir.join(TRANSCRIPT_FILE);
            write_atomic(&path, transcript_csv(shots).as_bytes())?;
            Some(path)
        }
        None => None,
    };
    let result_path = out_dir.join(RESULT_FILE);
    write_atomic(&result_path, to_json(&result).as_bytes())?;
    Ok((
        result,
        SimulateOutputs {
            result: result_path,
            transcript: transcript_path,
        },
    ))
}

impl SimulateOutputs {
    pub fn summary(&self, r: &SimResult) -> String {
        let e = &r.report;
        let se = |x: Option<f64>| x.map_or("undefined".to_string(), |s| format!("{s:.5}"));
        let mut out = format!(
            "strategy {:?}, {} shots/setting, seed {}\n",
            r.config.strategy, r.config.shots_per_setting, r.config.seed
        );
        out.push_str(&format!(
            "  lhs    {:.5} ± {}  (analytic {:.5})\n",
            e.lhs.value,
            se(e.lhs.std_error),
            e.analytic_lhs
        ));
        out.push_str(&format!(
            "  rhs    {:.5} ± {}  (analytic {:.5})\n",
            e.rhs.value,
            se(e.rhs.std_error),
            e.analytic_rhs
        ));
        out.push_str(&format!("  margin {:+.5} ± {}\n", e.margin.value, se(e.margin.std_error)));
        out.push_str(&format!("  verdict {:?} (threshold {} standard errors)\n", e.verdict, e.significance_sigmas));
        if r.error_bars_degenerate {
            out.push_str("  warning: some standard errors are undefined (too few shots)\n");
        }
        out.push_str(&format!("wrote {}\n", self.result.display()));
        if let Some(t) = &self.transcript {
            out.push_str(&format!("wrote {}\n", t.display()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, text: &str) -> PathBuf {
        let p = dir.join("cfg.json");
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn missing_seed_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            r#"{"preset": "ideal", "shots_per_setting": 10, "strategy": "honest_quantum"}"#,
        );
        let out = dir.path().join("out");
        let err = cmd_simulate(&cfg, &out).unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
        assert!(!out.exists());
    }

    #[test]
    fn preset_run_with_transcript() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            r#"{"preset": "babichev-sym", "shots_per_setting": 20, "seed": 3,
                "strategy": "lhs_two_ring", "record_transcript": true}"#,
        );
        let out = dir.path().join("out");
        let (result, outputs) = cmd_simulate(&cfg, &out).unwrap();
        let text = std::fs::read_to_string(outputs.transcript.unwrap()).unwrap();
        assert!(text.starts_with("setting,alice_report,bob_axis,bob_outcome\n0,"));
        assert_eq!(text.lines().count(), 1 + 9 * 20);
        assert!(text.contains(",z,"));
        let back: SimResult = serde_json::from_str(&std::fs::read_to_string(outputs.result).unwrap()).unwrap();
        assert_eq!(back, result);
        assert!(back.transcript.is_none());
    }

    #[test]
    fn conflicting_sources_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            r#"{"preset": "ideal", "params": {"eta": 1, "chi": 0.5, "eta_h": 1, "eta_p": 0, "n_settings": 8},
                "shots_per_setting": 10, "seed": 1, "strategy": "honest_quantum"}"#,
        );
        assert!(cmd_simulate(&cfg, &dir.path().join("o")).is_err());
    }
}
