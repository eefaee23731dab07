//! CSV tables and the JSON metadata that accompanies a result table.
//!
//! CSV files use LF line endings, `.` as decimal separator and 17
//! significant digits, so rerunning a deterministic command reproduces the
//! file byte for byte. Rows are ordered by sensor, then round.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{FisherStep, FisherTrajectory, NoiseFisher};
use crate::error::{Error, Result};
use crate::montecarlo::{CellStats, ExperimentResult, TauPolicy};
use crate::pattern::MeetingPattern;
use crate::sync::{Algorithm, TrialTrajectory};

pub const RESULT_HEADER: [&str; 8] = [
    "sensor",
    "round",
    "mean",
    "variance",
    "accuracy",
    "fi_bound",
    "var_floor",
    "ratio_var_times_J",
];
pub const BOUNDS_HEADER: [&str; 4] = ["sensor", "round", "J", "var_floor"];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn parse_f64(field: &str, what: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::MismatchedShapes(format!("cannot parse {what} value {field:?}")))
}

fn parse_opt(field: &str, what: &str) -> Result<Option<f64>> {
    if field.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(field, what).map(Some)
    }
}

fn parse_usize(field: &str, what: &str) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::MismatchedShapes(format!("cannot parse {what} value {field:?}")))
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, want: &[&str]) -> Result<()> {
    let got: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if got != want {
        return Err(Error::MismatchedShapes(format!(
            "expected columns {want:?}, found {got:?}"
        )));
    }
    Ok(())
}

/// A result table as read back from disk: `cells[t][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub cells: Vec<Vec<CellStats>>,
}

pub fn write_result<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(RESULT_HEADER)?;
    for a in 0..result.n() {
        for (t, row) in result.cells.iter().enumerate() {
            let c = &row[a];
            w.write_record([
                a.to_string(),
                t.to_string(),
                fmt_f64(c.mean),
                fmt_f64(c.variance),
                fmt_opt(c.accuracy),
                fmt_f64(c.fi_bound),
                fmt_f64(c.var_floor),
                fmt_opt(c.ratio_var_times_j),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Collects `(sensor, round, value)` triples into a dense `[round][sensor]` grid.
fn densify<T: Clone>(entries: Vec<(usize, usize, T)>, what: &str) -> Result<Vec<Vec<T>>> {
    let n = entries.iter().map(|e| e.0 + 1).max().unwrap_or(0);
    let rounds = entries.iter().map(|e| e.1 + 1).max().unwrap_or(0);
    if n == 0 || entries.len() != n * rounds {
        return Err(Error::MismatchedShapes(format!(
            "{what}: {} rows do not form a {n} x {rounds} sensor/round grid",
            entries.len()
        )));
    }
    let mut grid: Vec<Vec<Option<T>>> = vec![vec![None; n]; rounds];
    for (a, t, v) in entries {
        if grid[t][a].replace(v).is_some() {
            return Err(Error::MismatchedShapes(format!(
                "{what}: duplicate row for sensor {a}, round {t}"
            )));
        }
    }
    Ok(grid
        .into_iter()
        .map(|row| row.into_iter().map(|v| v.expect("counted above")).collect())
        .collect())
}

pub fn read_result<R: Read>(input: R) -> Result<ResultTable> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &RESULT_HEADER)?;
    let mut entries = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        entries.push((
            parse_usize(f(0), "sensor")?,
            parse_usize(f(1), "round")?,
            CellStats {
                mean: parse_f64(f(2), "mean")?,
                variance: parse_f64(f(3), "variance")?,
                accuracy: parse_opt(f(4), "accuracy")?,
                fi_bound: parse_f64(f(5), "fi_bound")?,
                var_floor: parse_f64(f(6), "var_floor")?,
                ratio_var_times_j: parse_opt(f(7), "ratio_var_times_J")?,
            },
        ));
    }
    Ok(ResultTable {
        cells: densify(entries, "result")?,
    })
}

pub fn write_bounds<W: Write>(traj: &FisherTrajectory, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(BOUNDS_HEADER)?;
    for a in 0..traj.n() {
        for (t, row) in traj.values.iter().enumerate() {
            w.write_record([a.to_string(), t.to_string(), fmt_f64(row[a]), fmt_f64(1.0 / row[a])])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads the `J` column back as `[round][sensor]`.
pub fn read_bounds<R: Read>(input: R) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &BOUNDS_HEADER)?;
    let mut entries = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        entries.push((
            parse_usize(f(0), "sensor")?,
            parse_usize(f(1), "round")?,
            parse_f64(f(2), "J")?,
        ));
    }
    densify(entries, "bounds")
}

/// Rebuilds a FI trajectory (with per-event steps) from a table of values.
pub fn trajectory_from_values(
    values: Vec<Vec<f64>>,
    pattern: &MeetingPattern,
    noise_fi: NoiseFisher,
) -> Result<FisherTrajectory> {
    if values.len() != pattern.depth() + 1 || values[0].len() != pattern.n() {
        return Err(Error::MismatchedShapes(format!(
            "bounds table is {}x{}, pattern needs {}x{}",
            values.len(),
            values[0].len(),
            pattern.depth() + 1,
            pattern.n()
        )));
    }
    let steps = pattern
        .events()
        .iter()
        .map(|&event| FisherStep {
            event,
            observed_fi: values[event.round][event.observed],
            increment: values[event.round + 1][event.observer] - values[event.round][event.observer],
        })
        .collect();
    Ok(FisherTrajectory {
        values,
        noise_fi,
        steps,
    })
}

/// Facts about a run that the CSV cannot carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunMeta {
    pub version: u32,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub tau_star: TauPolicy,
    pub seed: u64,
    pub delta0: f64,
    pub noise_variance: f64,
    /// `null` encodes a noiseless channel.
    pub noise_fi: Option<f64>,
    pub pattern: PathBuf,
    pub initial_fi: Vec<f64>,
    pub epsilon: Option<f64>,
}

impl RunMeta {
    pub fn noise_fisher(&self) -> NoiseFisher {
        self.noise_fi.map_or(NoiseFisher::Infinite, NoiseFisher::Finite)
    }

    /// `result.csv` → `result.meta.json`.
    pub fn sidecar_path(result: &Path) -> PathBuf {
        result.with_extension("meta.json")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One row per (trial, round, sensor) for `--dump-trials`.
pub fn write_trial_rows<W: Write>(w: &mut csv::Writer<W>, trial: usize, traj: &TrialTrajectory) -> Result<()> {
    for (t, row) in traj.states.iter().enumerate() {
        for (a, s) in row.iter().enumerate() {
            w.write_record([
                trial.to_string(),
                a.to_string(),
                t.to_string(),
                fmt_f64(traj.tau_star),
                fmt_f64(s.opinion),
                fmt_f64(s.accuracy),
            ])?;
        }
    }
    Ok(())
}

pub fn trial_writer<W: Write>(out: W) -> Result<csv::Writer<W>> {
    let mut w = writer(out);
    w.write_record(["trial", "sensor", "round", "tau_star", "opinion", "accuracy"])?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::fi_recursion;
    use crate::dist::DistributionSpec;
    use crate::montecarlo::{run_experiment, ExperimentConfig};
    use crate::pattern::MeetingEvent;

    fn small_result() -> ExperimentResult {
        let p = MeetingPattern::new(2, vec![MeetingEvent::new(0, 0, 1)]).unwrap();
        let g = DistributionSpec::gaussian(1.0).unwrap();
        run_experiment(&ExperimentConfig::new(p, vec![g; 2], g, 50, 1)).unwrap()
    }

    #[test]
    fn result_round_trip_is_exact() {
        let r = small_result();
        let mut buf = Vec::new();
        write_result(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("sensor,round,mean,variance,accuracy,fi_bound,var_floor,ratio_var_times_J\n"));
        assert!(!text.contains('\r'));
        assert!(text.lines().nth(1).unwrap().starts_with("0,0,"));
        let back = read_result(&buf[..]).unwrap();
        assert_eq!(back.cells, r.cells);
    }

    #[test]
    fn bounds_round_trip() {
        let p = MeetingPattern::new(2, vec![MeetingEvent::new(0, 0, 1)]).unwrap();
        let t = fi_recursion(&p, &[1.0, 1.0], NoiseFisher::Finite(1.0)).unwrap();
        let mut buf = Vec::new();
        write_bounds(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text.lines().nth(2).unwrap(),
            "0,1,1.5000000000000000e0,6.6666666666666663e-1"
        );
        let values = read_bounds(&buf[..]).unwrap();
        let rebuilt = trajectory_from_values(values, &p, NoiseFisher::Finite(1.0)).unwrap();
        assert_eq!(rebuilt, t);
    }

    #[test]
    fn malformed_tables_are_rejected() {
        assert!(read_bounds("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_bounds("sensor,round,J,var_floor\n0,0,1,1\n0,2,1,1\n".as_bytes()).is_err());
        assert!(read_bounds("sensor,round,J,var_floor\n0,0,x,1\n".as_bytes()).is_err());
        assert!(read_bounds("sensor,round,J,var_floor\n0,0,1,1\n0,0,1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn meta_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let meta = RunMeta {
            version: 1,
            algorithm: Algorithm::Alg,
            trials: 10,
            tau_star: TauPolicy::Fixed(0.0),
            seed: 1,
            delta0: 1.0,
            noise_variance: 1.0,
            noise_fi: None,
            pattern: "p.json".into(),
            initial_fi: vec![1.0],
            epsilon: Some(0.1),
        };
        let path = RunMeta::sidecar_path(&dir.path().join("result.csv"));
        assert!(path.ends_with("result.meta.json"));
        meta.save(&path).unwrap();
        let back = RunMeta::load(&path).unwrap();
        assert_eq!(back, meta);
        assert_eq!(back.noise_fisher(), NoiseFisher::Infinite);
    }
}
