use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{Experiment, ExperimentConfig, Format};
use crate::HarnessError;
use doi_lab::random::GENERATOR_VERSION;
use doi_lab::Operator;

/// A JSON number, or a string for values JSON cannot carry.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// First 8 bytes of the SHA-256 of the entries' bit patterns, in hex.
pub fn fingerprint(op: &Operator) -> String {
    let mut hasher = Sha256::new();
    hasher.update((op.dim() as u64).to_le_bytes());
    for z in op.entries().iter() {
        hasher.update(z.re.to_bits().to_le_bytes());
        hasher.update(z.im.to_bits().to_le_bytes());
    }
    hasher.finalize()[..8].iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// One asserted comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Value,
    /// `<=`, `>=` or `==`.
    pub relation: &'static str,
    pub bound: Value,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value: num(value), relation: "<=", bound: num(bound), passed: value <= bound }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value: num(value), relation: ">=", bound: num(bound), passed: value >= bound }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: Value::Bool(ok), relation: "==", bound: Value::Bool(true), passed: ok }
    }
}

/// Everything an experiment produced; CSV, JSON and text are renderings of
/// this one object.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub experiment: Experiment,
    pub seed: u64,
    pub generator: &'static str,
    pub version: &'static str,
    pub preamble: Vec<String>,
    pub parameters: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn new(cfg: &ExperimentConfig, columns: &[&str]) -> Self {
        let mut parameters = BTreeMap::new();
        for (name, value) in &cfg.tolerances {
            parameters.insert(format!("tol.{name}"), num(*value));
        }
        Self {
            experiment: cfg.experiment,
            seed: cfg.seed,
            generator: GENERATOR_VERSION,
            version: env!("CARGO_PKG_VERSION"),
            preamble: Vec::new(),
            parameters,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn note(&mut self, line: impl Into<String>) -> &mut Self {
        self.preamble.push(line.into());
        self
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.summary.insert(key.to_string(), value.into());
        self
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.passed &= check.passed;
        self.checks.push(check);
        self
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// Numeric summary entry.
    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }

    /// Numeric column of the table.
    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| cell_f64(&r[idx])).collect())
    }

    fn header(&self) -> String {
        format!(
            "doi-lab {} {} seed={} generator={}",
            self.version, self.experiment, self.seed, self.generator
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\n", self.header());
        for line in &self.preamble {
            let _ = writeln!(out, "# {line}");
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text)).expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&body).expect("utf-8 cells"));
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.header());
        for line in &self.preamble {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str("[parameters]\n");
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "{k}={}", cell_text(v));
        }
        out.push_str("[summary]\n");
        for (k, v) in &self.summary {
            let _ = writeln!(out, "{k}={}", cell_text(v));
        }
        out.push_str("[checks]\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                cell_text(&c.value),
                c.relation,
                cell_text(&c.bound)
            );
        }
        if !self.rows.is_empty() {
            out.push_str("[table]\n");
            let _ = writeln!(out, "{}", self.columns.join("\t"));
            for row in &self.rows {
                let cells: Vec<String> = row.iter().map(cell_text).collect();
                let _ = writeln!(out, "{}", cells.join("\t"));
            }
        }
        let _ = writeln!(out, "result={}", if self.passed { "PASS" } else { "FAIL" });
        out
    }

    /// `<experiment>-<seed>.<ext>` under `dir`.
    pub fn file_name(&self, ext: &str) -> String {
        format!("{}-{}.{ext}", self.experiment, self.seed)
    }

    /// Writes the report in `format`; CSV is accompanied by the JSON
    /// rendering, which carries the summary. Returns the written paths.
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>, HarnessError> {
        fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
        let mut files = Vec::new();
        match format {
            Format::Csv => {
                files.push((self.file_name("csv"), self.to_csv()));
                files.push((self.file_name("json"), self.to_json()));
            }
            Format::Json => files.push((self.file_name("json"), self.to_json())),
            Format::Text => files.push((self.file_name("txt"), self.to_text())),
        }
        files
            .into_iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                write_atomic(&path, body.as_bytes())?;
                Ok(path)
            })
            .collect()
    }
}

/// Writes to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|source| HarnessError::Io { path: tmp.clone(), source })?;
    fs::rename(&tmp, path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn cell_f64(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap_or(f64::NAN),
        Value::String(s) => match s.as_str() {
            "inf" => f64::INFINITY,
            "-inf" => f64::NEG_INFINITY,
            _ => f64::NAN,
        },
        _ => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let cfg = ExperimentConfig::new(Experiment::Convergence).with_seed(7);
        let mut r = Report::new(&cfg, &["n", "value"]);
        r.note("a note");
        r.push_row(vec![1.into(), num(0.5)]);
        r.push_row(vec![2.into(), num(f64::INFINITY)]);
        r.set("slope", num(-1.0));
        r.check(Check::at_most("slope", -1.0, -0.9));
        r
    }

    #[test]
    fn renderings() {
        let r = sample();
        let csv = r.to_csv();
        assert!(csv.starts_with("# doi-lab "));
        assert!(csv.contains("generator=chacha8-cn-v1"));
        assert!(csv.ends_with("n,value\n1,0.5\n2,inf\n"));
        let json: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["experiment"], "convergence");
        assert_eq!(json["passed"], true);
        assert!(r.to_text().contains("PASS slope -1.0 <= -0.9"));
        assert_eq!(r.column_f64("value").unwrap(), vec![0.5, f64::INFINITY]);
        assert_eq!(r.file_name("csv"), "convergence-7.csv");
    }

    #[test]
    fn failing_check_flips_the_result() {
        let mut r = sample();
        r.check(Check::at_least("slope-bound", 0.1, 0.9));
        assert!(!r.passed);
        assert_eq!(r.failed_checks().len(), 1);
    }

    #[test]
    fn fingerprints_distinguish() {
        let a = Operator::identity(3);
        let b = Operator::zeros(3);
        assert_eq!(fingerprint(&a), fingerprint(&a.clone()));
        assert_ne!(fingerprint(&a), fingerprint(&b));
        assert_eq!(fingerprint(&a).len(), 16);
    }

    #[test]
    fn atomic_write_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let paths = sample().write(dir.path(), Format::Csv).unwrap();
        assert_eq!(paths.len(), 2);
        let names: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert!(names.iter().all(|n| !n.ends_with(".tmp")));
    }
}
