//! Pass/fail bookkeeping shared by the command-line scenarios and the
//! verification suites.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// One named check: a measured value against a fixed threshold. `Upper`
/// checks pass when `|value| <= threshold` (residual style); `Lower` checks
/// pass when `|value| >= threshold` (nontriviality witnesses).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub kind: CheckKind,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Upper,
    Lower,
}

impl Check {
    pub fn upper(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            kind: CheckKind::Upper,
            pass: value.abs() <= threshold && value.is_finite(),
        }
    }

    pub fn lower(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            kind: CheckKind::Lower,
            pass: value.abs() >= threshold && value.is_finite(),
        }
    }

    /// `PASS name: |x| = v (<= t)` style line for terminal output.
    pub fn line(&self) -> String {
        let rel = match self.kind {
            CheckKind::Upper => "<=",
            CheckKind::Lower => ">=",
        };
        format!(
            "{} {}: |{}| {} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            fmt_float(self.value),
            rel,
            fmt_float(self.threshold),
        )
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    !checks.is_empty() && checks.iter().all(|c| c.pass)
}

/// Full-precision float formatting used in every text artifact, so that
/// reruns are byte-identical.
pub fn fmt_float(x: f64) -> String {
    format!("{:.16e}", x)
}

/// `name,value,threshold,kind,pass` rows with a header.
pub fn checks_csv(checks: &[Check]) -> String {
    let mut out = String::from("name,value,threshold,kind,pass\n");
    for c in checks {
        let kind = match c.kind {
            CheckKind::Upper => "upper",
            CheckKind::Lower => "lower",
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            c.name,
            fmt_float(c.value),
            fmt_float(c.threshold),
            kind,
            c.pass
        )
        .expect("string write");
    }
    out
}
