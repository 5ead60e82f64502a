//! JSON and CSV renderings of diagnostic, matrix and verification reports.

use std::fmt::Write as _;

use fock_core::spaces::{DiagnosticReport, FittedConstant};
use fock_core::OperatorMatrix;
use serde::Serialize;

#[derive(Serialize)]
struct SpaceJson {
    family: String,
    s1: String,
    s2: String,
}

#[derive(Serialize)]
struct ConstantJson {
    r1: f64,
    r2: f64,
    constant: Option<f64>,
    status: String,
}

#[derive(Serialize)]
struct DiagnosticJson {
    space: SpaceJson,
    truncation: u32,
    r_grid: Vec<f64>,
    constants: Vec<ConstantJson>,
    verdict: String,
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

pub fn diagnostic_json(report: &DiagnosticReport) -> String {
    let json = DiagnosticJson {
        space: SpaceJson {
            family: report.space.family.to_string(),
            s1: report.space.s1.to_string(),
            s2: report.space.s2.to_string(),
        },
        truncation: report.truncation,
        r_grid: report.r_grid.clone(),
        constants: report
            .constants
            .iter()
            .map(|c| ConstantJson { r1: c.r1, r2: c.r2, constant: c.constant, status: format!("{:?}", c.status) })
            .collect(),
        verdict: report.verdict.to_string(),
    };
    pretty(&json)
}

fn radius_label(c: &FittedConstant) -> String {
    if c.r1 == c.r2 {
        format!("{}", c.r1)
    } else {
        format!("{}:{}", c.r1, c.r2)
    }
}

/// `r,constant` rows; radius pairs print as `r1:r2`, infinite constants as
/// `inf`.
pub fn diagnostic_csv(report: &DiagnosticReport) -> String {
    let mut out = String::from("r,constant\n");
    for c in &report.constants {
        let value = c.constant.map_or_else(|| String::from("inf"), |v| format!("{v:e}"));
        let _ = writeln!(out, "{},{}", radius_label(c), value);
    }
    out
}

#[derive(Serialize)]
struct MatrixJson {
    dim: usize,
    degree: u32,
    indices: Vec<Vec<u32>>,
    /// Row-major `[re, im]` pairs.
    data: Vec<[f64; 2]>,
}

pub fn matrix_json(m: &OperatorMatrix) -> String {
    pretty(&MatrixJson {
        dim: m.dim(),
        degree: m.degree(),
        indices: m.indices().iter().map(|a| a.entries().to_vec()).collect(),
        data: m.data().iter().map(|v| [v.re, v.im]).collect(),
    })
}

/// First case that exceeded its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailedCase {
    pub case: String,
    pub error: f64,
    pub tolerance: f64,
}

/// Outcome of a verification suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub max_error: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailedCase>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        pretty(self)
    }
}
