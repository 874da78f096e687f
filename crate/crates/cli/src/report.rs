// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! JSON report shapes. Every report carries `schema: 1`; fields
//! serialize in declaration order, so identical runs produce identical
//! bytes.

use serde::Serialize;

pub const SCHEMA: u32 = 1;

/// Output of the analyze pipeline.
#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub pencil_label: String,
    pub n: usize,
    pub rho0: f64,
    pub index: usize,
    pub fitted_exponent: f64,
    pub wong_dims: Vec<usize>,
    pub stabilized_at: usize,
    #[serde(rename = "U_dim")]
    pub u_dim: usize,
    /// Smallest singular value of E on the consistent space; `null` when
    /// the space is trivial (the restriction is vacuously injective).
    pub injectivity_gap: Option<f64>,
    pub generator_built: bool,
    pub warnings: Vec<String>,
}

/// One trace written by the solve pipeline.
#[derive(Debug, Serialize)]
pub struct RouteSummary {
    pub route: String,
    pub path: Option<String>,
    pub samples: usize,
    pub max_mild_residual: f64,
}

/// Stdout summary of the solve pipeline.
#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub schema: u32,
    pub pencil_label: String,
    pub n: usize,
    pub t_end: f64,
    pub dt: f64,
    pub routes: Vec<RouteSummary>,
    /// Relative L2 discrepancy between the two routes; present for
    /// `--route both`.
    pub discrepancy: Option<f64>,
}

/// One resolvent bound sample in the example report.
#[derive(Debug, Serialize)]
pub struct BoundSampleReport {
    pub z_re: f64,
    pub z_im: f64,
    pub resolvent_norm: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Output of the example pipeline.
#[derive(Debug, Serialize)]
pub struct ExampleReport {
    pub schema: u32,
    pub n: usize,
    pub index: usize,
    pub bound_check: Vec<BoundSampleReport>,
    pub bound_all_pass: bool,
    /// Mesh sizes behind the two trend lists, smallest first.
    pub trend_n: Vec<usize>,
    pub gap_per_n: Vec<f64>,
    pub dist_per_n: Vec<f64>,
    pub witness_csv: Option<String>,
}

/// Residual maxima printed by the check pipeline. Absent stages (no
/// certified generator, trivial chain) serialize as `null`.
#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub schema: u32,
    pub pencil_label: String,
    pub n: usize,
    pub seed: u64,
    pub resolvent_points: Vec<[f64; 2]>,
    pub commutation_max: f64,
    pub membership_max: f64,
    pub expansion_max: Option<f64>,
    pub scaled_defect_slope: Option<f64>,
    pub generator_relation: Option<f64>,
    pub resolvent_consistency: Option<f64>,
    pub mild_residual: Option<f64>,
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization is infallible");
    s.push('\n');
    s
}
