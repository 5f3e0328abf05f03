//! Verification reports and their CSV / JSON renderings.
//!
//! CSV columns are fixed: `suite,params,lhs,rhs,ratio,verdict,seed,wall_ms`.
//! `params` is a `;`-separated list of `key=value` pairs in key order. Floats
//! use Rust's shortest round-trip formatting, so identical runs produce
//! identical bytes. `wall_ms` is `NA` unless timing output is requested.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which right-hand side a report compares against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// The perturbed bound with the K-dependence.
    Thm1,
    /// Fouvry-Iwaniec.
    Fi89,
    /// Robert-Sargos.
    Rs06,
    /// Sargos-Wu.
    Sw,
    /// The exponent-pair bound with (κ, λ).
    Lwy,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] = [Self::Thm1, Self::Fi89, Self::Rs06, Self::Sw, Self::Lwy];

    pub fn name(self) -> &'static str {
        match self {
            Self::Thm1 => "thm1",
            Self::Fi89 => "fi89",
            Self::Rs06 => "rs06",
            Self::Sw => "sw",
            Self::Lwy => "lwy",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown bound `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs` when `rhs > 0`, NaN otherwise.
    pub ratio: f64,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
    pub which_bound: Option<BoundKind>,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, lhs: f64, rhs: f64, seed: u64) -> Self {
        let ratio = if rhs > 0.0 { lhs / rhs } else { f64::NAN };
        Self {
            suite: suite.into(),
            lhs,
            rhs,
            ratio,
            params: BTreeMap::new(),
            seed,
            which_bound: None,
            holds: lhs <= rhs,
            wall_ms: None,
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn bound(mut self, which: BoundKind) -> Self {
        self.which_bound = Some(which);
        self
    }

    pub fn verdict(mut self, holds: bool) -> Self {
        self.holds = holds;
        self
    }

    pub fn verdict_str(&self) -> &'static str {
        if self.holds {
            "pass"
        } else {
            "fail"
        }
    }

    pub fn params_string(&self) -> String {
        let mut parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if let Some(b) = self.which_bound {
            parts.push(format!("bound={b}"));
        }
        parts.join(";")
    }
}

/// Header block of a JSON report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub version: String,
    pub config_hash: String,
    pub suite: String,
}

/// A complete suite output: rows plus a summary map.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub rows: Vec<VerificationReport>,
    pub summary: BTreeMap<String, f64>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: VerificationReport) {
        self.rows.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    pub fn first_failure(&self) -> Option<&VerificationReport> {
        self.rows.iter().find(|r| !r.holds)
    }

    /// Largest finite ratio and its row index.
    pub fn max_ratio(&self) -> Option<(usize, f64)> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.ratio.is_finite())
            .fold(None, |best, (i, r)| match best {
                Some((_, b)) if b >= r.ratio => best,
                _ => Some((i, r.ratio)),
            })
    }

    pub fn summarize(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn write_csv<W: Write>(&self, w: W, timing: bool) -> Result<()> {
        let mut out = csv::WriterBuilder::new().from_writer(w);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        out.write_record(["suite", "params", "lhs", "rhs", "ratio", "verdict", "seed", "wall_ms"])
            .map_err(io)?;
        for r in &self.rows {
            let wall = match (timing, r.wall_ms) {
                (true, Some(ms)) => format!("{ms}"),
                _ => "NA".to_string(),
            };
            out.write_record([
                r.suite.clone(),
                r.params_string(),
                format!("{}", r.lhs),
                format!("{}", r.rhs),
                format!("{}", r.ratio),
                r.verdict_str().to_string(),
                r.seed.to_string(),
                wall,
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W, meta: &ReportMeta, timing: bool) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a> {
            meta: &'a ReportMeta,
            rows: Vec<VerificationReport>,
            summary: &'a BTreeMap<String, f64>,
        }
        let rows = self
            .rows
            .iter()
            .cloned()
            .map(|mut r| {
                if !timing {
                    r.wall_ms = None;
                }
                r
            })
            .collect();
        let doc = Doc {
            meta,
            rows,
            summary: &self.summary,
        };
        serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Error::Io(e.into()))?;
        writeln!(w)?;
        Ok(())
    }

    /// CSV bytes without timing, for determinism comparisons.
    pub fn to_csv_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, false).expect("writing to a Vec cannot fail");
        buf
    }
}
