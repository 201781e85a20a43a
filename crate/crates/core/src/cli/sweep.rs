//! Two-parameter grids of feasibility quantities and their iso-contours.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{float_repr, write_atomic, CliResult, SCHEMA_VERSION};
use crate::eval::{eta_threshold, evaluate_inequality, necessary_condition, sufficient_condition};
use crate::params::ExperimentParams;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Eta,
    Chi,
    EtaH,
    EtaP,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Eta => "eta",
            SweepParameter::Chi => "chi",
            SweepParameter::EtaH => "eta_h",
            SweepParameter::EtaP => "eta_p",
        }
    }

    fn set(self, params: &mut ExperimentParams, value: f64) {
        match self {
            SweepParameter::Eta => params.eta = value,
            SweepParameter::Chi => params.chi = value,
            SweepParameter::EtaH => params.eta_h = value,
            SweepParameter::EtaP => params.eta_p = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    SufficientLhs,
    NecessaryLhs,
    EtaThreshold,
    Margin,
}

impl SweepQuantity {
    fn default_level(self) -> f64 {
        match self {
            SweepQuantity::EtaThreshold => 0.64,
            SweepQuantity::SufficientLhs | SweepQuantity::NecessaryLhs => 1.0,
            SweepQuantity::Margin => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub parameter: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    /// `steps` evenly spaced values from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub schema_version: u32,
    /// Exactly two distinct parameters: the first varies along CSV rows fastest-last.
    pub axes: Vec<Axis>,
    /// Values of the parameters not swept (swept ones are overridden per cell).
    pub fixed: ExperimentParams,
    pub quantity: SweepQuantity,
    /// Iso-contour level; defaults to 0.64 for `eta_threshold`, 1 for condition sides, 0 for the margin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contour_level: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(Error::Config(msg).into());
        if self.axes.len() != 2 {
            return bad(format!("a sweep needs exactly 2 axes, got {}", self.axes.len()));
        }
        if self.axes[0].parameter == self.axes[1].parameter {
            return bad(format!("axes must be distinct parameters, both are {}", self.axes[0].parameter.name()));
        }
        for a in &self.axes {
            if a.steps < 2 {
                return bad(format!("axis {} needs at least 2 steps", a.parameter.name()));
            }
            if !(a.min.is_finite() && a.max.is_finite() && a.min < a.max) {
                return bad(format!("axis {} needs finite min < max", a.parameter.name()));
            }
            for v in [a.min, a.max] {
                crate::error::check_probability(a.parameter.name(), v)?;
            }
        }
        self.fixed.clone().validated()?;
        Ok(())
    }

    pub fn level(&self) -> f64 {
        self.contour_level.unwrap_or_else(|| self.quantity.default_level())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellFlag {
    Ok,
    /// The required η exceeds 1; the raw value is kept.
    Unreachable,
}

impl CellFlag {
    fn as_str(self) -> &'static str {
        match self {
            CellFlag::Ok => "ok",
            CellFlag::Unreachable => "unreachable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    #[serde(with = "float_repr")]
    pub value: f64,
    pub flag: CellFlag,
}

/// A straight piece of the iso-contour inside one grid square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: (f64, f64),
    pub end: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub schema_version: u32,
    pub spec: SweepSpec,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major: `cells[i * ys.len() + j]` is at `(xs[i], ys[j])`.
    pub cells: Vec<Cell>,
    pub contour_level: f64,
    pub contour: Vec<Segment>,
}

impl SweepGrid {
    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[i * self.ys.len() + j]
    }

    /// Cell nearest to the given coordinates.
    pub fn nearest(&self, x: f64, y: f64) -> &Cell {
        let closest = |v: &[f64], t: f64| {
            (0..v.len())
                .min_by(|&a, &b| (v[a] - t).abs().total_cmp(&(v[b] - t).abs()))
                .unwrap_or(0)
        };
        self.cell(closest(&self.xs, x), closest(&self.ys, y))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let (px, py) = (self.spec.axes[0].parameter.name(), self.spec.axes[1].parameter.name());
        w.write_record([px, py, "value", "flag"]).expect("in-memory write");
        for c in &self.cells {
            w.write_record([
                c.x.to_string(),
                c.y.to_string(),
                float_repr::format_float(c.value),
                c.flag.as_str().to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }

    pub fn contour_csv(&self) -> String {
        let (px, py) = (self.spec.axes[0].parameter.name(), self.spec.axes[1].parameter.name());
        let mut out = format!("segment,{px},{py}\n");
        for (k, s) in self.contour.iter().enumerate() {
            let _ = writeln!(out, "{k},{},{}", s.start.0, s.start.1);
            let _ = writeln!(out, "{k},{},{}", s.end.0, s.end.1);
        }
        out
    }
}

fn evaluate_cell(quantity: SweepQuantity, params: &ExperimentParams) -> crate::Result<(f64, CellFlag)> {
    Ok(match quantity {
        SweepQuantity::SufficientLhs => (sufficient_condition(params)?.lhs_value, CellFlag::Ok),
        SweepQuantity::NecessaryLhs => (necessary_condition(params).lhs_value, CellFlag::Ok),
        SweepQuantity::Margin => (evaluate_inequality(params)?.margin, CellFlag::Ok),
        SweepQuantity::EtaThreshold => {
            let t = eta_threshold(params)?;
            (t, if t > 1.0 { CellFlag::Unreachable } else { CellFlag::Ok })
        }
    })
}

/// Evaluates the grid; cells are independent, so the result does not depend on the worker count.
pub fn run_sweep(spec: &SweepSpec) -> CliResult<SweepGrid> {
    spec.validate()?;
    let xs = spec.axes[0].values();
    let ys = spec.axes[1].values();
    let cells = (0..xs.len() * ys.len())
        .into_par_iter()
        .map(|k| {
            let (x, y) = (xs[k / ys.len()], ys[k % ys.len()]);
            let mut params = spec.fixed.clone();
            spec.axes[0].parameter.set(&mut params, x);
            spec.axes[1].parameter.set(&mut params, y);
            let (value, flag) = evaluate_cell(spec.quantity, &params)?;
            Ok(Cell { x, y, value, flag })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let level = spec.level();
    let values: Vec<f64> = cells.iter().map(|c| c.value).collect();
    let contour = iso_contour(&xs, &ys, &values, level);
    Ok(SweepGrid {
        schema_version: SCHEMA_VERSION,
        spec: spec.clone(),
        xs,
        ys,
        cells,
        contour_level: level,
        contour,
    })
}

/// Marching squares with linear interpolation along cell edges. Squares with a
/// non-finite corner are skipped; saddles are resolved by the centre average.
pub fn iso_contour(xs: &[f64], ys: &[f64], values: &[f64], level: f64) -> Vec<Segment> {
    let ny = ys.len();
    let v = |i: usize, j: usize| values[i * ny + j];
    let mut segments = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        for j in 0..ny.saturating_sub(1) {
            // corners counter-clockwise from (i, j)
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals = corners.map(|(a, b)| v(a, b));
            if vals.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let above = vals.map(|x| x >= level);
            let mut points = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                if above[a] != above[b] {
                    let t = (level - vals[a]) / (vals[b] - vals[a]);
                    let (pa, pb) = (corners[a], corners[b]);
                    let lerp = |p: f64, q: f64| p + t * (q - p);
                    points.push((lerp(xs[pa.0], xs[pb.0]), lerp(ys[pa.1], ys[pb.1])));
                }
            }
            match points.len() {
                2 => segments.push(Segment {
                    start: points[0],
                    end: points[1],
                }),
                4 => {
                    let centre_above = vals.iter().sum::<f64>() / 4.0 >= level;
                    // edge crossings are ordered 0-1, 1-2, 2-3, 3-0; pair them around the corners
                    // that are isolated from the centre
                    let pairs = if centre_above == above[0] { [(0, 1), (2, 3)] } else { [(3, 0), (1, 2)] };
                    for (a, b) in pairs {
                        segments.push(Segment {
                            start: points[a],
                            end: points[b],
                        });
                    }
                }
                _ => {}
            }
        }
    }
    segments
}

/// Paths written by [`cmd_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutputs {
    pub grid: PathBuf,
    pub contour: PathBuf,
}

pub fn contour_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".contour.csv");
    PathBuf::from(s)
}

/// Runs the sweep and writes the grid CSV to `out` and the contour to `<out>.contour.csv`.
pub fn cmd_sweep(spec: &SweepSpec, out: &Path) -> CliResult<(SweepGrid, SweepOutputs)> {
    let grid = run_sweep(spec)?;
    let contour = contour_path(out);
    write_atomic(out, grid.to_csv().as_bytes())?;
    write_atomic(&contour, grid.contour_csv().as_bytes())?;
    Ok((
        grid,
        SweepOutputs {
            grid: out.to_path_buf(),
            contour,
        },
    ))
}
