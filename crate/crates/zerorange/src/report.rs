//! Experiment reports and their CSV and JSON forms.

use crate::config::Format;
use crate::error::{DriverError, Result};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => format!("{v:.16e}"),
            Value::Text(s) => s.clone(),
        }
    }
}

/// One acceptance check: its number in the acceptance list, a short name
/// and the outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub number: u8,
    pub name: String,
    /// The comparison as evaluated, e.g. `0.0043 <= 0.02`.
    pub detail: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub id: String,
    pub parameters: Vec<(String, Value)>,
    pub statistics: Vec<(String, f64)>,
    pub criteria: Vec<Criterion>,
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn new(id: &str) -> Self {
        Self {
            id: id.to_string(),
            parameters: Vec::new(),
            statistics: Vec::new(),
            criteria: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn param(&mut self, name: &str, value: Value) {
        self.parameters.push((name.to_string(), value));
    }

    pub fn stat(&mut self, name: &str, value: f64) -> f64 {
        debug_assert!(self.statistic(name).is_none(), "statistic {name} reported twice");
        self.statistics.push((name.to_string(), value));
        value
    }

    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.statistics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn check(&mut self, number: u8, name: &str, detail: String, pass: bool) {
        self.criteria.push(Criterion { number, name: name.to_string(), detail, pass });
    }

    /// `value <= bound`, recorded with its detail.
    pub fn check_at_most(&mut self, number: u8, name: &str, value: f64, bound: f64) {
        self.check(number, name, format!("{value:.3e} <= {bound:.0e}"), value <= bound);
    }

    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    /// One header row and one data row: parameters, statistics, then a
    /// pass flag per criterion. Wall time is left out so that equal seeds
    /// give equal files.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["experiment".to_string()];
        header.extend(self.parameters.iter().map(|(n, _)| n.clone()));
        header.extend(self.statistics.iter().map(|(n, _)| n.clone()));
        header.extend(self.criteria.iter().map(|c| format!("pass_{}", c.name)));
        out.write_record(&header)?;
        let mut row = vec![self.id.clone()];
        row.extend(self.parameters.iter().map(|(_, v)| v.csv()));
        row.extend(self.statistics.iter().map(|(_, v)| format!("{v:.16e}")));
        row.extend(self.criteria.iter().map(|c| c.pass.to_string()));
        out.write_record(&row)?;
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        let params: serde_json::Map<String, serde_json::Value> =
            self.parameters.iter().map(|(n, v)| (n.clone(), serde_json::to_value(v).unwrap())).collect();
        let stats: serde_json::Map<String, serde_json::Value> =
            self.statistics.iter().map(|(n, v)| (n.clone(), serde_json::json!(v))).collect();
        let doc = serde_json::json!({
            "experiment": self.id,
            "parameters": params,
            "statistics": stats,
            "criteria": self.criteria,
            "pass": self.passed(),
            "wall_time_s": self.wall_time_s,
        });
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, w: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    pub fn write_to(&self, format: Format, path: &Path) -> Result<()> {
        let output = |source| DriverError::Output { path: path.display().to_string(), source };
        let file = std::fs::File::create(path).map_err(output)?;
        let mut buf = std::io::BufWriter::new(file);
        self.write(format, &mut buf)?;
        buf.flush().map_err(output)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport::new("globular-endpoint");
        r.param("seed", Value::Int(1));
        r.param("gamma", Value::Real(1.0));
        r.stat("ks", 0.1);
        r.check_at_most(8, "endpoint_ks", 0.1, 0.02);
        r.wall_time_s = 3.0;
        r
    }

    #[test]
    fn csv_has_one_column_per_field() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "experiment,seed,gamma,ks,pass_endpoint_ks");
        assert_eq!(lines[1], "globular-endpoint,1,1.0000000000000000e0,1.0000000000000001e-1,false");
        assert!(!text.contains("3.0"));
    }

    #[test]
    fn json_carries_wall_time_and_outcome() {
        let mut buf = Vec::new();
        sample().write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["wall_time_s"], 3.0);
        assert_eq!(v["pass"], false);
        assert_eq!(v["statistics"]["ks"], 0.1);
        assert_eq!(v["criteria"][0]["number"], 8);
    }
}
