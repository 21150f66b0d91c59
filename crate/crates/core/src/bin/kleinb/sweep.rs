//! One-axis parameter sweeps.

use std::fmt;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use kleinb::{amplitudes, make_channel, scattering::budget_from, ScatterError, Spin};
use rayon::prelude::*;
use serde::Deserialize;

use crate::args::SweepArgs;
use crate::output::fmt17;
use crate::Invalid;

pub const COLUMNS: [&str; 16] = [
    "axis_value",
    "regime",
    "re_R",
    "im_R",
    "re_Rp",
    "im_Rp",
    "re_T",
    "im_T",
    "re_Tp",
    "im_Tp",
    "refl_same",
    "refl_flip",
    "trans_same",
    "trans_flip",
    "sum",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Energy,
    StepHeight,
    Field,
    Index,
}

impl std::str::FromStr for SweepAxis {
    type Err = Invalid;

    fn from_str(s: &str) -> Result<Self, Invalid> {
        match s {
            "E" | "e" | "energy" => Ok(SweepAxis::Energy),
            "V0" | "v0" => Ok(SweepAxis::StepHeight),
            "b" => Ok(SweepAxis::Field),
            "n" => Ok(SweepAxis::Index),
            other => Err(Invalid(format!(
                "unknown sweep axis `{other}` (expected E, V0, b or n)"
            ))),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Energy => "E",
            SweepAxis::StepHeight => "V0",
            SweepAxis::Field => "b",
            SweepAxis::Index => "n",
        })
    }
}

/// Contents of a sweep config file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    axis: Option<String>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
    values: Option<Vec<f64>>,
    #[serde(rename = "E")]
    energy: Option<f64>,
    #[serde(rename = "V0")]
    v0: Option<f64>,
    b: Option<f64>,
    n: Option<u32>,
    spin: Option<Spin>,
    columns: Option<Vec<String>>,
    jobs: Option<usize>,
}

/// Fully resolved sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub energy: f64,
    pub v0: f64,
    pub b: f64,
    pub n: u32,
    pub spin: Spin,
    /// Indices into [`COLUMNS`].
    pub columns: Vec<usize>,
    pub jobs: Option<usize>,
}

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        1 => vec![start],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        stop
                    } else {
                        start + (stop - start) * (i as f64 / last)
                    }
                })
                .collect()
        }
    }
}

impl SweepSpec {
    pub fn resolve(args: &SweepArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => read_config(path)?,
            None => SweepFile::default(),
        };
        let axis: SweepAxis = args
            .axis
            .clone()
            .or(file.axis)
            .ok_or_else(|| Invalid("missing --axis".into()))?
            .parse()?;

        let values = match (args.values.clone(), args.start.or(file.start)) {
            (Some(v), _) => v,
            (None, Some(start)) => {
                let stop = args
                    .stop
                    .or(file.stop)
                    .ok_or_else(|| Invalid("missing --stop".into()))?;
                let count = args
                    .count
                    .or(file.count)
                    .ok_or_else(|| Invalid("missing --count".into()))?;
                if count == 0 {
                    bail!(Invalid("--count must be at least 1".into()));
                }
                linspace(start, stop, count)
            }
            (None, None) => file
                .values
                .ok_or_else(|| Invalid("give either --values or --start/--stop/--count".into()))?,
        };
        if values.is_empty() {
            bail!(Invalid("the sweep has no points".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            bail!(Invalid(format!("axis value {v} is not finite")));
        }
        if axis == SweepAxis::Index {
            if let Some(v) = values
                .iter()
                .find(|v| v.fract() != 0.0 || **v < 0.0 || **v > f64::from(u32::MAX))
            {
                bail!(Invalid(format!(
                    "n must be a non-negative integer, got {v}"
                )));
            }
        }

        let fixed =
            |flag: Option<f64>, from_file: Option<f64>, name: &str, ax: SweepAxis| match flag
                .or(from_file)
            {
                Some(v) => Ok(v),
                None if axis == ax => Ok(f64::NAN),
                None => Err(Invalid(format!("missing fixed value --{name}"))),
            };
        let energy = fixed(args.energy, file.energy, "E", SweepAxis::Energy)?;
        let v0 = fixed(args.v0, file.v0, "V0", SweepAxis::StepHeight)?;
        let b = fixed(args.b, file.b, "b", SweepAxis::Field)?;
        let n = args.n.or(file.n).unwrap_or(1);
        let spin = args.spin.or(file.spin).unwrap_or(Spin::Up);

        let columns = match args.columns.clone().or(file.columns) {
            None => (0..COLUMNS.len()).collect(),
            Some(names) => names
                .iter()
                .map(|name| {
                    COLUMNS
                        .iter()
                        .position(|c| c == name)
                        .ok_or_else(|| Invalid(format!("unknown column `{name}`")))
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        let jobs = args.jobs.or(file.jobs);
        if jobs == Some(0) {
            bail!(Invalid("--jobs must be at least 1".into()));
        }
        Ok(Self {
            axis,
            values,
            energy,
            v0,
            b,
            n,
            spin,
            columns,
            jobs,
        })
    }

    /// Every column of one row, as text.
    fn row(&self, x: f64) -> [String; 16] {
        let (mut energy, mut v0, mut b, mut n) = (self.energy, self.v0, self.b, self.n);
        match self.axis {
            SweepAxis::Energy => energy = x,
            SweepAxis::StepHeight => v0 = x,
            SweepAxis::Field => b = x,
            SweepAxis::Index => n = x as u32,
        }
        let mut out: [String; 16] = Default::default();
        out[0] = fmt17(x);
        let result = make_channel(energy, v0, b, self.spin, n)
            .map_err(ScatterError::from)
            .and_then(|p| Ok((p, amplitudes(&p)?)));
        match result {
            Ok((p, a)) => {
                let budget = budget_from(&p, &a);
                out[1] = a.regime.label().to_string();
                let nums = [
                    a.r.re,
                    a.r.im,
                    a.r_flip.re,
                    a.r_flip.im,
                    a.t.re,
                    a.t.im,
                    a.t_flip.re,
                    a.t_flip.im,
                    budget.refl_same,
                    budget.refl_flip,
                    budget.trans_same,
                    budget.trans_flip,
                    budget.sum(),
                ];
                for (slot, v) in out[2..15].iter_mut().zip(nums) {
                    *slot = fmt17(v);
                }
            }
            Err(e) => out[15] = e.to_string(),
        }
        out
    }

    /// Evaluates every point, in parallel, and returns the rows in axis order.
    pub fn evaluate(&self) -> Result<Vec<[String; 16]>> {
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(jobs) = self.jobs {
            pool = pool.num_threads(jobs);
        }
        let pool = pool.build().context("starting worker threads")?;
        Ok(pool.install(|| self.values.par_iter().map(|&x| self.row(x)).collect()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows = self.evaluate()?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|&i| COLUMNS[i]))?;
        for row in &rows {
            w.write_record(self.columns.iter().map(|&i| row[i].as_str()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn read_config(path: &Path) -> Result<SweepFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).map_err(|e| Invalid(format!("config {}: {e}", path.display())).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_ends() {
        let v = linspace(0.1, 0.7, 7);
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[6], 0.7);
        assert_eq!(linspace(3.0, 9.0, 1), vec![3.0]);
    }
}
