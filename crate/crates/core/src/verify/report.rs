//! Verification reports and their serialized forms.
//!
//! The structured-text form is an indented `key: value` tree (YAML subset).
//! Floats are written in shortest round-trip notation, so
//! `from_text(to_text(r)) == r` for every report.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a checker converts per-trial defects into a pass decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// Pass iff every absolute defect is at most the value.
    Absolute(f64),
    /// Pass iff every defect is at most `multiple × (summed error bars)`.
    /// Defects are then reported as ratios to the summed error bars and
    /// `tolerance_used` is the multiple.
    ErrorBars(f64),
}

impl Tolerance {
    pub fn mode_name(&self) -> &'static str {
        match self {
            Tolerance::Absolute(_) => "absolute",
            Tolerance::ErrorBars(_) => "error-bars",
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Tolerance::Absolute(v) | Tolerance::ErrorBars(v) => *v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixValue {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<f64>>,
}

impl From<&DMatrix<f64>> for MatrixValue {
    fn from(m: &DMatrix<f64>) -> Self {
        let data = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        MatrixValue { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl MatrixValue {
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.data[i][j])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Parameter {
    Scalar(f64),
    Matrix(MatrixValue),
}

impl Parameter {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            Parameter::Scalar(v) => Some(*v),
            Parameter::Matrix(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<DMatrix<f64>> {
        match self {
            Parameter::Scalar(_) => None,
            Parameter::Matrix(m) => Some(m.to_matrix()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub defect: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub quasi_state: String,
    pub trials: usize,
    pub max_defect: f64,
    pub tolerance_used: f64,
    pub tolerance_mode: String,
    pub pass: bool,
    #[serde(default)]
    pub skipped: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Side conditions with their own limits; any entry forces a failure.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed_conditions: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fitted_parameters: BTreeMap<String, Parameter>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_trial_records: Vec<TrialRecord>,
}

impl VerificationReport {
    pub fn new(check_name: &str, quasi_state: &str, tolerance: Tolerance) -> Self {
        Self {
            check_name: check_name.to_string(),
            quasi_state: quasi_state.to_string(),
            trials: 0,
            max_defect: 0.0,
            tolerance_used: tolerance.value(),
            tolerance_mode: tolerance.mode_name().to_string(),
            pass: true,
            skipped: false,
            notes: Vec::new(),
            failed_conditions: Vec::new(),
            fitted_parameters: BTreeMap::new(),
            per_trial_records: Vec::new(),
        }
    }

    /// A report for a check whose hypotheses are not met.
    pub fn skipped(check_name: &str, quasi_state: &str, reason: &str) -> Self {
        let mut r = Self::new(check_name, quasi_state, Tolerance::Absolute(0.0));
        r.skipped = true;
        r.pass = false;
        r.notes.push(reason.to_string());
        r
    }

    pub fn record(&mut self, defect: f64, values: &[(&str, f64)]) {
        let values = values.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        self.per_trial_records.push(TrialRecord { index: self.per_trial_records.len(), defect, values });
        self.trials = self.per_trial_records.len();
        if defect.is_nan() || defect > self.max_defect {
            self.max_defect = if defect.is_nan() { f64::INFINITY } else { defect };
        }
        self.refresh();
    }

    /// Records a defect that is judged against the report's tolerance mode.
    pub fn record_with_bars(&mut self, abs_defect: f64, bars: f64, values: &[(&str, f64)]) {
        let mut vals: Vec<(&str, f64)> = values.to_vec();
        vals.push(("abs_defect", abs_defect));
        vals.push(("error_bars", bars));
        let defect = if self.tolerance_mode == "error-bars" {
            if abs_defect == 0.0 {
                0.0
            } else {
                abs_defect / bars.max(f64::MIN_POSITIVE)
            }
        } else {
            abs_defect
        };
        self.record(defect, &vals);
    }

    /// Folds a stage result that is not a per-trial record into the decision.
    pub fn include_defect(&mut self, defect: f64) {
        if defect.is_nan() || defect > self.max_defect {
            self.max_defect = if defect.is_nan() { f64::INFINITY } else { defect };
        }
        self.refresh();
    }

    /// Checks a side condition `value ≤ limit`, storing both as parameters.
    pub fn require(&mut self, key: &str, value: f64, limit: f64) {
        self.set_scalar(key, value);
        self.set_scalar(&format!("{key}_limit"), limit);
        if !(value <= limit) {
            self.failed_conditions.push(format!("{key} = {value:e} exceeds {limit:e}"));
        }
        self.refresh();
    }

    pub fn set_scalar(&mut self, key: &str, v: f64) {
        self.fitted_parameters.insert(key.to_string(), Parameter::Scalar(v));
    }

    pub fn set_matrix(&mut self, key: &str, m: &DMatrix<f64>) {
        self.fitted_parameters.insert(key.to_string(), Parameter::Matrix(m.into()));
    }

    pub fn scalar(&self, key: &str) -> Option<f64> {
        self.fitted_parameters.get(key).and_then(Parameter::scalar)
    }

    pub fn matrix(&self, key: &str) -> Option<DMatrix<f64>> {
        self.fitted_parameters.get(key).and_then(Parameter::matrix)
    }

    fn refresh(&mut self) {
        if !self.skipped {
            self.pass = self.max_defect <= self.tolerance_used && self.failed_conditions.is_empty();
        }
    }

    /// `PASS`, `FAIL` or `SKIP`.
    pub fn status(&self) -> &'static str {
        if self.skipped {
            "SKIP"
        } else if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {} [{}] max_defect={:.3e} tol={:.3e} ({})",
            self.status(),
            self.check_name,
            self.quasi_state,
            self.max_defect,
            self.tolerance_used,
            self.tolerance_mode
        )
    }
}

/// The reports of one `verify` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub n: usize,
    pub seed: u64,
    pub summary: String,
    pub reports: Vec<VerificationReport>,
}

impl SuiteReport {
    pub fn new(suite: &str, n: usize, seed: u64, reports: Vec<VerificationReport>) -> Self {
        let mut s = Self { suite: suite.to_string(), n, seed, summary: String::new(), reports };
        s.summary = s.summary_line();
        s
    }

    /// Every non-skipped report passes.
    pub fn pass(&self) -> bool {
        self.reports.iter().filter(|r| !r.skipped).all(|r| r.pass)
    }

    /// `PASS k/k` or `FAIL j/k`, counting non-skipped reports.
    pub fn summary_line(&self) -> String {
        let run: Vec<&VerificationReport> = self.reports.iter().filter(|r| !r.skipped).collect();
        let passed = run.iter().filter(|r| r.pass).count();
        let skipped = self.reports.len() - run.len();
        let head = if passed == run.len() { "PASS" } else { "FAIL" };
        if skipped > 0 {
            format!("{head} {passed}/{} ({skipped} skipped)", run.len())
        } else {
            format!("{head} {passed}/{}", run.len())
        }
    }

    pub fn to_text(&self) -> Result<String> {
        serde_yaml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        serde_yaml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// One row per scalar: `check_name,record,key,value`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["check_name", "record", "key", "value"]).map_err(io)?;
        for r in &self.reports {
            let name = r.check_name.as_str();
            let summary = [
                ("quasi_state", r.quasi_state.clone()),
                ("status", r.status().to_string()),
                ("trials", r.trials.to_string()),
                ("max_defect", format!("{:e}", r.max_defect)),
                ("tolerance_used", format!("{:e}", r.tolerance_used)),
                ("tolerance_mode", r.tolerance_mode.clone()),
            ];
            for (k, v) in summary {
                w.write_record([name, "summary", k, &v]).map_err(io)?;
            }
            for note in &r.notes {
                w.write_record([name, "note", "text", note]).map_err(io)?;
            }
            for (k, p) in &r.fitted_parameters {
                match p {
                    Parameter::Scalar(v) => w.write_record([name, "param", k, &format!("{v:e}")]).map_err(io)?,
                    Parameter::Matrix(m) => {
                        for (i, row) in m.data.iter().enumerate() {
                            for (j, v) in row.iter().enumerate() {
                                w.write_record([name, "param", &format!("{k}[{i}][{j}]"), &format!("{v:e}")])
                                    .map_err(io)?;
                            }
                        }
                    }
                }
            }
            for t in &r.per_trial_records {
                let rec = format!("trial{}", t.index);
                w.write_record([name, &rec, "defect", &format!("{:e}", t.defect)]).map_err(io)?;
                for (k, v) in &t.values {
                    w.write_record([name, &rec, k, &format!("{v:e}")]).map_err(io)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}
