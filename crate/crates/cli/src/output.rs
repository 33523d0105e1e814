use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use easym::TimeSeries;
use serde_json::json;

use crate::runner::{ResultRecord, SeriesData, SeriesValues};
use crate::CliError;

/// Scientific notation with 16 significant digits, e.g. `1.234500000000000e-3`.
pub fn format_number(x: f64) -> String {
    format!("{x:.15e}")
}

fn series_csv(s: &SeriesData) -> String {
    let mut out = String::new();
    let time = |t: f64| if s.integer_times { format!("{}", t as u64) } else { format_number(t) };
    match &s.values {
        SeriesValues::Scalar { values, std_error } => {
            out.push_str(if std_error.is_some() { "time,value,std_error\n" } else { "time,value\n" });
            for (k, (&t, &v)) in s.times.iter().zip(values).enumerate() {
                write!(out, "{},{}", time(t), format_number(v)).unwrap();
                if let Some(se) = std_error {
                    write!(out, ",{}", format_number(se[k])).unwrap();
                }
                out.push('\n');
            }
        }
        SeriesValues::Distribution { charges, probabilities } => {
            out.push_str("time,charge,probability\n");
            for (&t, row) in s.times.iter().zip(probabilities) {
                for (&q, &p) in charges.iter().zip(row) {
                    writeln!(out, "{},{},{}", time(t), q, format_number(p)).unwrap();
                }
            }
        }
    }
    out
}

/// Writes every series as `<probe>[_<label>].csv`, the analysis results and
/// provenance as `summary.json`, and the config echo as `config.toml`.
/// Returns the written paths.
pub fn write_outputs(record: &ResultRecord, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut files = Vec::new();
    for run in &record.runs {
        for s in &run.series {
            let name = format!("{}.csv", run.file_stem(s.probe));
            let path = dir.join(&name);
            fs::write(&path, series_csv(s))?;
            files.push(json!({ "file": name, "probe": s.probe, "run": run.label }));
            written.push(path);
        }
    }
    let summary = json!({
        "config": record.config,
        "runs": record.runs,
        "files": files,
        "analysis": record.analysis,
        "provenance": record.provenance,
    });
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    fs::write(&path, text)?;
    written.push(path);
    let path = dir.join("config.toml");
    fs::write(&path, record.config.to_toml())?;
    written.push(path);
    Ok(written)
}

/// Reads a `time,value[,std_error]` CSV as written by [`write_outputs`].
pub fn read_series_csv(path: &Path) -> Result<TimeSeries, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let bad = |line: usize, what: &str| CliError::Config(format!("{}:{line}: {what}", path.display()));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.starts_with("time,value") => {}
        _ => return Err(bad(1, "expected a time,value header")),
    }
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (k, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let mut next = || -> Result<f64, CliError> {
            cols.next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| bad(k + 1, "expected two numeric columns"))
        };
        times.push(next()?);
        values.push(next()?);
    }
    TimeSeries::new(times, values).map_err(CliError::from_core)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProbeName;

    #[test]
    fn numbers_keep_sixteen_digits() {
        let s = format_number(std::f64::consts::PI);
        assert_eq!(s, "3.141592653589793e0");
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
        assert_eq!(format_number(0.0), "0.000000000000000e0");
        let tiny = 1.234_567_890_123_4e-17;
        assert_eq!(format_number(tiny).parse::<f64>().unwrap(), tiny);
    }

    #[test]
    fn csv_layouts() {
        let s = SeriesData {
            probe: ProbeName::EaU1,
            times: vec![0.0, 1.0],
            integer_times: true,
            values: SeriesValues::Scalar { values: vec![0.5, 0.25], std_error: Some(vec![0.0, 0.1]) },
        };
        let text = series_csv(&s);
        assert!(text.starts_with("time,value,std_error\n0,5.000000000000000e-1,0.000000000000000e0\n"));
        assert!(text.ends_with('\n') && !text.contains('\r'));

        let d = SeriesData {
            probe: ProbeName::Pq,
            times: vec![0.5],
            integer_times: false,
            values: SeriesValues::Distribution { charges: vec![-2, 0, 2], probabilities: vec![vec![0.25, 0.5, 0.25]] },
        };
        let text = series_csv(&d);
        assert_eq!(text.lines().count(), 4);
        assert!(text.contains("\n5.000000000000000e-1,-2,2.500000000000000e-1\n"));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = SeriesData {
            probe: ProbeName::Cv,
            times: vec![0.0, 0.1, 0.2],
            integer_times: false,
            values: SeriesValues::Scalar { values: vec![1.0, 1.0 / 3.0, 2.0], std_error: None },
        };
        let path = dir.path().join("cv.csv");
        fs::write(&path, series_csv(&s)).unwrap();
        let back = read_series_csv(&path).unwrap();
        assert_eq!(back.times(), &s.times[..]);
        assert_eq!(back.values(), &[1.0, 1.0 / 3.0, 2.0]);
        fs::write(&path, "t,v\n0,1\n").unwrap();
        assert!(matches!(read_series_csv(&path), Err(CliError::Config(_))));
    }
}
