//! Table and JSON renderings of a computed result.

use std::fmt::Write as _;

use hilbtaut_core::cohomology::{Dims, HilbertCohomologyResult};
use hilbtaut_core::GradedDim;
use serde::Serialize;

use crate::config::{dims_to_json, DimsJson, OutputFormat, SurfaceSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputeReport {
    pub op: String,
    pub n: u32,
    pub k: Option<u32>,
    pub surface: SurfaceSpec,
    pub result: HilbertCohomologyResult,
}

#[derive(Serialize)]
struct BoundsJson {
    lower: DimsJson,
    upper: DimsJson,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    op: &'a str,
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    surface: &'a SurfaceSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    dims: Option<DimsJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<BoundsJson>,
    /// Coefficients of the Poincaré polynomial from `min_degree` upwards.
    #[serde(skip_serializing_if = "Option::is_none")]
    poincare: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_degree: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    euler: Option<i64>,
    provenance: &'a [String],
}

/// Degrees shown: always `0`, plus everything up to the support.
fn degree_range(gs: &[&GradedDim]) -> std::ops::RangeInclusive<i32> {
    let lo = gs.iter().filter_map(|g| g.min_degree()).min().unwrap_or(0).min(0);
    let hi = gs.iter().filter_map(|g| g.max_degree()).max().unwrap_or(0).max(0);
    lo..=hi
}

impl ComputeReport {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Table => self.table(),
            OutputFormat::Json => self.json(),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "op: {}", self.op);
        let _ = writeln!(out, "surface: {}", self.surface.describe());
        match self.k {
            Some(k) => {
                let _ = writeln!(out, "n: {}, k: {}", self.n, k);
            }
            None => {
                let _ = writeln!(out, "n: {}", self.n);
            }
        }
        match &self.result.dims {
            Dims::Exact(g) => {
                for d in degree_range(&[g]) {
                    let _ = writeln!(out, "H^{}: {}", d, g.get(d));
                }
                let _ = writeln!(out, "total: {}", g.total());
                let _ = writeln!(out, "euler: {}", g.euler());
            }
            Dims::Bounds { lower, upper } => {
                for d in degree_range(&[lower, upper]) {
                    let _ = writeln!(out, "H^{}: [{}, {}]", d, lower.get(d), upper.get(d));
                }
                let _ = writeln!(out, "total: [{}, {}]", lower.total(), upper.total());
                let _ = writeln!(out, "euler: {}", upper.euler());
            }
        }
        let _ = writeln!(out, "provenance:");
        for p in &self.result.provenance {
            let _ = writeln!(out, "  {}", p);
        }
        out
    }

    fn json(&self) -> String {
        let (dims, bounds, poincare, min_degree, total, euler) = match &self.result.dims {
            Dims::Exact(g) => {
                let range = degree_range(&[g]);
                let lo = *range.start();
                let coeffs = range.map(|d| g.get(d)).collect();
                (Some(dims_to_json(g)), None, Some(coeffs), Some(lo), Some(g.total()), Some(g.euler()))
            }
            Dims::Bounds { lower, upper } => (
                None,
                Some(BoundsJson { lower: dims_to_json(lower), upper: dims_to_json(upper) }),
                None,
                None,
                None,
                Some(upper.euler()),
            ),
        };
        let doc = ReportJson {
            op: &self.op,
            n: self.n,
            k: self.k,
            surface: &self.surface,
            dims,
            bounds,
            poincare,
            min_degree,
            total,
            euler,
            provenance: &self.result.provenance,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}
