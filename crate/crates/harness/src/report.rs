//! Report rows and their CSV / JSON serializations.
//!
//! CSV floats use 17 significant digits so a row reproduces bit-for-bit;
//! wall-clock times appear only in the JSON report, keeping the CSV
//! identical across runs and worker counts.

use std::io::Write;
use std::path::Path;

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};
use wishart_gpi::gpi::{Status, Verdict};
use wishart_gpi::linalg::SymMat;

use crate::config::ExperimentConfig;

pub const CSV_COLUMNS: [&str; 27] = [
    "experiment_id",
    "inequality_id",
    "reference",
    "status",
    "d",
    "alpha",
    "block_sizes",
    "sigma_index",
    "sigma_digest",
    "exponents",
    "split",
    "lhs",
    "lhs_se",
    "rhs",
    "rhs_se",
    "margin",
    "z",
    "verdict",
    "n",
    "seed",
    "bound",
    "bound_z",
    "bound_verdict",
    "rerun_n",
    "rerun_z",
    "rerun_verdict",
    "note",
];

/// JSON has no infinities; non-finite floats are written as strings.
fn float<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() { s.serialize_f64(*v) } else { s.serialize_str(&fmt_float(*v)) }
}

fn opt_float<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => float(v, s),
        None => s.serialize_none(),
    }
}

/// Second comparison carried by a row: the sandwich's exact upper bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    #[serde(serialize_with = "float")]
    pub value: f64,
    #[serde(serialize_with = "float")]
    pub z: f64,
    pub verdict: Verdict,
}

/// Confirmation run for a violated open or conditional instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rerun {
    pub n: u64,
    #[serde(serialize_with = "float")]
    pub z: f64,
    pub verdict: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment_id: String,
    pub inequality_id: String,
    pub reference: String,
    pub status: Status,
    pub d: usize,
    pub alpha: Option<f64>,
    pub block_sizes: Vec<usize>,
    pub sigma_index: usize,
    pub sigma_digest: String,
    pub exponents: Vec<f64>,
    pub split: Option<usize>,
    #[serde(serialize_with = "float")]
    pub lhs: f64,
    #[serde(serialize_with = "float")]
    pub lhs_se: f64,
    #[serde(serialize_with = "float")]
    pub rhs: f64,
    #[serde(serialize_with = "float")]
    pub rhs_se: f64,
    #[serde(serialize_with = "float")]
    pub margin: f64,
    #[serde(serialize_with = "float")]
    pub z: f64,
    /// `None` when the engine refused the instance; `note` says why.
    pub verdict: Option<Verdict>,
    pub n: u64,
    pub seed: u64,
    pub bound: Option<BoundCheck>,
    pub rerun: Option<Rerun>,
    pub note: String,
    #[serde(serialize_with = "opt_float")]
    pub wall_time_ms: Option<f64>,
}

impl ReportRow {
    /// A violation that counts against the run: on a proved instance, or
    /// confirmed by the larger re-run elsewhere.
    pub fn is_proved_violation(&self) -> bool {
        self.status == Status::Proved
            && (self.verdict == Some(Verdict::Violated)
                || self.bound.as_ref().is_some_and(|b| b.verdict == Verdict::Violated))
    }

    pub fn is_confirmed_violation(&self) -> bool {
        self.rerun.as_ref().is_some_and(|r| r.verdict == Some(Verdict::Violated))
    }

    fn csv_record(&self) -> Vec<String> {
        let list = |v: &[f64]| v.iter().map(|x| fmt_float(*x)).collect::<Vec<_>>().join(";");
        let opt = |v: Option<String>| v.unwrap_or_default();
        let verdict = |v: Option<Verdict>| v.map_or_else(|| "error".to_string(), verdict_label);
        vec![
            self.experiment_id.clone(),
            self.inequality_id.clone(),
            self.reference.clone(),
            self.status.label().to_string(),
            self.d.to_string(),
            opt(self.alpha.map(fmt_float)),
            self.block_sizes.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";"),
            self.sigma_index.to_string(),
            self.sigma_digest.clone(),
            list(&self.exponents),
            opt(self.split.map(|k| k.to_string())),
            fmt_float(self.lhs),
            fmt_float(self.lhs_se),
            fmt_float(self.rhs),
            fmt_float(self.rhs_se),
            fmt_float(self.margin),
            fmt_float(self.z),
            verdict(self.verdict),
            self.n.to_string(),
            self.seed.to_string(),
            opt(self.bound.as_ref().map(|b| fmt_float(b.value))),
            opt(self.bound.as_ref().map(|b| fmt_float(b.z))),
            opt(self.bound.as_ref().map(|b| verdict_label(b.verdict))),
            opt(self.rerun.as_ref().map(|r| r.n.to_string())),
            opt(self.rerun.as_ref().map(|r| fmt_float(r.z))),
            opt(self.rerun.as_ref().map(|r| verdict(r.verdict))),
            self.note.clone(),
        ]
    }
}

fn verdict_label(v: Verdict) -> String {
    v.to_string()
}

/// 17 significant digits; `inf`, `-inf` and `NaN` spelled out.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// SHA-256 over the dimension and the row-major entries (little endian).
pub fn sigma_digest(s: &SymMat) -> String {
    let mut h = Sha256::new();
    h.update((s.dim() as u64).to_le_bytes());
    for v in s.to_row_major() {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaRecord {
    pub index: usize,
    pub digest: String,
    pub dim: usize,
    pub row_major: Vec<f64>,
}

impl SigmaRecord {
    pub fn new(index: usize, s: &SymMat) -> Self {
        Self { index, digest: sigma_digest(s), dim: s.dim(), row_major: s.to_row_major() }
    }
}

/// Everything one `run` produced.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment_id: String,
    pub config: ExperimentConfig,
    /// Every Σ instance in full, so any row can be reproduced standalone.
    pub sigmas: Vec<SigmaRecord>,
    pub rows: Vec<ReportRow>,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(CSV_COLUMNS)?;
        for row in &self.rows {
            out.write_record(row.csv_record())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    pub fn json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `<csv_path>` and the JSON report next to it.
    pub fn write_files(&self, csv_path: &Path) -> std::io::Result<()> {
        if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(csv_path, self.csv_string())?;
        std::fs::write(csv_path.with_extension("json"), self.json_string() + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_text() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 1.0] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(f64::NEG_INFINITY).parse::<f64>().unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn digest_is_stable_and_discriminating() {
        let a = SymMat::identity(2);
        assert_eq!(sigma_digest(&a), sigma_digest(&SymMat::identity(2)));
        assert_ne!(sigma_digest(&a), sigma_digest(&SymMat::identity(3)));
        assert_eq!(sigma_digest(&a).len(), 64);
    }
}
