//! Machine-readable JSON reports. Field order is fixed by the struct
//! definitions and floats serialize losslessly, so identical inputs yield
//! byte-identical documents.

use kerrlab::glassey::{BoundResult, HypothesisReport};
use kerrlab::integrate::{BlowupReport, SolverStats, StopReason};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Integration outcome without the bulky trajectory (exported as CSV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBlock {
    pub blew_up: bool,
    pub z_star_estimate: Option<f64>,
    pub low_confidence: bool,
    pub z_reached: f64,
    pub reason: StopReason,
    pub trajectory_points: usize,
}

impl From<&BlowupReport> for ResultBlock {
    fn from(report: &BlowupReport) -> Self {
        ResultBlock {
            blew_up: report.blew_up,
            z_star_estimate: report.z_star_estimate,
            low_confidence: report.low_confidence,
            z_reached: report.z_reached,
            reason: report.reason,
            trajectory_points: report.trajectory.len(),
        }
    }
}

/// Report of `simulate` (and the integration part of `verify-bound`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    /// Echo of the resolved configuration; re-running it reproduces the run.
    pub config: RunConfig,
    pub z_max: f64,
    pub a: f64,
    pub b: f64,
    pub hypotheses: HypothesisReport,
    pub hypotheses_pass: bool,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub result: ResultBlock,
    pub bound_gamma: Option<f64>,
    pub bound_closed_form: Option<f64>,
    pub stats: SolverStats,
}

/// Report of `check`: configuration echo plus the hypothesis verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub config: RunConfig,
    pub z_max: f64,
    pub a: f64,
    pub b: f64,
    pub hypotheses: HypothesisReport,
    pub hypotheses_pass: bool,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

/// Report of `verify-bound`: the bound numbers and the ordering verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyBoundReport {
    pub config: RunConfig,
    pub z_max: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub z_star_estimate: Option<f64>,
    pub bounds: BoundResult,
    /// `z_star_estimate <= gamma_quadrature` (within extrapolation slack);
    /// absent when the integration was not requested.
    pub estimate_below_gamma: Option<bool>,
    /// `gamma_quadrature <= gamma_closed_q`.
    pub gamma_below_closed_form: bool,
    /// `gamma_closed_q <= l_star_nondim`.
    pub closed_form_below_literal: bool,
    /// Conjunction of the applicable ordering checks.
    pub ordering_pass: bool,
    pub stats: Option<SolverStats>,
}

/// Summary block printed and serialized by `analytic`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSummary {
    pub z_star: f64,
    pub amplitude: f64,
    pub l_star: f64,
    pub l_star_over_z_star: f64,
    pub max_relative_residual: f64,
    pub samples: usize,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports always serialize");
    text.push('\n');
    text
}
