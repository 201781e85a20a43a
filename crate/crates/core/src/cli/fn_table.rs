//! Table of the finite-setting bound f(n) and its approach to 2/π.

use serde::{Deserialize, Serialize};

use super::{CliResult, SCHEMA_VERSION};
use crate::bounds::{c_plane, f_n, f_n_bruteforce};
use crate::Error;

/// Rows up to this n are cross-checked against sign enumeration.
pub const BRUTE_FORCE_CHECK_MAX: u32 = 16;
pub const BRUTE_FORCE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Passed,
    Failed,
    Unchecked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnRow {
    pub n: u32,
    pub f: f64,
    pub excess_over_asymptote: f64,
    pub brute_force: Option<f64>,
    pub check: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnTable {
    pub schema_version: u32,
    pub rows: Vec<FnRow>,
    pub asymptote: f64,
}

pub fn cmd_fn_table(n_max: u32) -> CliResult<FnTable> {
    if n_max == 0 {
        return Err(Error::Domain {
            name: "max",
            value: 0.0,
            range: "n ≥ 1",
        }
        .into());
    }
    let asymptote = c_plane();
    let rows = (1..=n_max)
        .map(|n| {
            let f = f_n(n)?.value;
            let brute_force = if n <= BRUTE_FORCE_CHECK_MAX {
                Some(f_n_bruteforce(n)?)
            } else {
                None
            };
            let check = match brute_force {
                Some(b) if (b - f).abs() <= BRUTE_FORCE_TOLERANCE => CheckStatus::Passed,
                Some(_) => CheckStatus::Failed,
                None => CheckStatus::Unchecked,
            };
            Ok(FnRow {
                n,
                f,
                excess_over_asymptote: f - asymptote,
                brute_force,
                check,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(FnTable {
        schema_version: SCHEMA_VERSION,
        rows,
        asymptote,
    })
}

impl FnTable {
    pub fn to_table(&self) -> String {
        let mut out = format!("{:>5}  {:>9}  {:>11}  {}\n", "n", "f(n)", "f(n)-2/pi", "brute force");
        for r in &self.rows {
            out.push_str(&format!(
                "{:>5}  {:>9.5}  {:>11.3e}  {:?}\n",
                r.n, r.f, r.excess_over_asymptote, r.check
            ));
        }
        out.push_str(&format!("{:>5}  {:>9.5}  {:>11.3e}\n", "inf", self.asymptote, 0.0));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // five-decimal display values, deliberately not the library constants
    #[allow(clippy::approx_constant)]
    #[test]
    fn small_table() {
        let t = cmd_fn_table(8).unwrap();
        assert_eq!(t.rows.len(), 8);
        assert!(t.rows.iter().all(|r| r.check == CheckStatus::Passed));
        assert!((t.rows[1].f - 0.70711).abs() < 5e-6);
        assert!((t.rows[2].f - 0.66667).abs() < 5e-6);
        assert!((t.rows[7].f - 0.64073).abs() < 5e-6);
        assert!((t.asymptote - 0.63662).abs() < 5e-6);
        let text = t.to_table();
        assert!(text.contains("0.70711") && text.contains("0.63662"));
    }

    #[test]
    fn rows_beyond_check_range_are_unchecked() {
        let t = cmd_fn_table(18).unwrap();
        assert_eq!(t.rows[16].check, CheckStatus::Unchecked);
        assert_eq!(t.rows[16].brute_force, None);
    }

    #[test]
    fn zero_rejected() {
        assert!(cmd_fn_table(0).is_err());
    }
}
