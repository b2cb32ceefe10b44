//! JSON job files and the surface section they carry.

use std::collections::BTreeMap;

use hilbtaut_core::cohomology::ResultKind;
use hilbtaut_core::ringmodel::{self, Pairing, Preset, SurfaceData};
use hilbtaut_core::{GradedDim, Q};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Graded dimensions as `{"degree": dim}`.
pub type DimsJson = BTreeMap<String, u64>;

/// `[i, j, k, "c"]`: basis `i` times basis `j` has coefficient `c` on basis `k`.
pub type PairingEntry = (usize, usize, usize, String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
#[serde(tag = "preset", rename_all = "lowercase", deny_unknown_fields)]
pub enum SurfaceSpec {
    P2 {
        #[serde(rename = "L")]
        l: i64,
        #[serde(rename = "A", default)]
        a: i64,
    },
    Affine {
        d: u32,
    },
    Formal {
        h_o: DimsJson,
        h_l: DimsJson,
        h_l2: DimsJson,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h_a: Option<DimsJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h_la: Option<DimsJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h_l2a: Option<DimsJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h_l2a2: Option<DimsJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        o_unit: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l2a_a: Option<Vec<PairingEntry>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        la_la: Option<Vec<PairingEntry>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub surface: SurfaceSpec,
    pub op: String,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default)]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operation {
    Compute(ResultKind),
    Verify,
}

impl Operation {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s == "verify" {
            return Ok(Operation::Verify);
        }
        ResultKind::parse(s).map(Operation::Compute).ok_or_else(|| {
            CliError::Config(format!(
                "unknown op {:?}; expected one of taut, tensor2, sym2, ext2, extk, tensor2-twisted, verify",
                s
            ))
        })
    }
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed job file: {}", e)))
    }

    /// Checks that the operation has what it needs.
    pub fn validate(&self) -> Result<Operation, CliError> {
        let op = Operation::parse(&self.op)?;
        if self.n == 0 {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        if let Operation::Compute(kind) = op {
            match kind {
                ResultKind::Tensor2 | ResultKind::Sym2 | ResultKind::Ext2 | ResultKind::Tensor2Twisted if self.n < 2 => {
                    return Err(CliError::Config(format!("op {} needs n ≥ 2, got n={}", kind, self.n)));
                }
                ResultKind::Extk => match self.k {
                    None => return Err(CliError::Config("op extk needs k".into())),
                    Some(k) if k > self.n => {
                        return Err(CliError::Config(format!("extk needs 0 ≤ k ≤ n, got k={} > n={}", k, self.n)));
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        Ok(op)
    }
}

fn dims_from_json(name: &str, m: &DimsJson) -> Result<GradedDim, CliError> {
    let mut g = GradedDim::zero();
    for (k, &v) in m {
        let d: i32 = k
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{}: degree key {:?} is not an integer", name, k)))?;
        g.add_at(d, v);
    }
    Ok(g)
}

pub fn dims_to_json(g: &GradedDim) -> DimsJson {
    g.iter().map(|(d, m)| (d.to_string(), m)).collect()
}

fn pairing_from_json(
    name: &str,
    entries: &[PairingEntry],
    left: &GradedDim,
    right: &GradedDim,
    target: &GradedDim,
) -> Result<Pairing, CliError> {
    let mut parsed = Vec::with_capacity(entries.len());
    for (i, j, k, c) in entries {
        let c: Q = c
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{}: coefficient {:?} is not a rational number", name, c)))?;
        parsed.push((*i, *j, *k, c));
    }
    Pairing::new(left.clone(), right.clone(), target.clone(), &parsed).map_err(|e| CliError::Config(format!("{}: {}", name, e)))
}

fn pairing_to_json(p: &Pairing) -> Vec<PairingEntry> {
    p.entries().into_iter().map(|(i, j, k, c)| (i, j, k, c.to_string())).collect()
}

impl SurfaceSpec {
    pub fn to_surface(&self) -> Result<SurfaceData, CliError> {
        let core = |e: hilbtaut_core::Error| CliError::Config(e.to_string());
        match self {
            SurfaceSpec::P2 { l, a } => ringmodel::p2(*l, *a).map_err(core),
            SurfaceSpec::Affine { d } => ringmodel::affine(*d).map_err(core),
            SurfaceSpec::Formal { h_o, h_l, h_l2, h_a, h_la, h_l2a, h_l2a2, o_unit, l2a_a, la_la } => {
                let opt = |name: &str, m: &Option<DimsJson>| m.as_ref().map(|m| dims_from_json(name, m)).transpose();
                let mut data = SurfaceData::formal(
                    dims_from_json("h_o", h_o)?,
                    dims_from_json("h_l", h_l)?,
                    dims_from_json("h_l2", h_l2)?,
                    opt("h_a", h_a)?,
                    opt("h_la", h_la)?,
                    opt("h_l2a", h_l2a)?,
                    opt("h_l2a2", h_l2a2)?,
                );
                data.o_unit = *o_unit;
                if let Some(e) = l2a_a {
                    data.l2a_a = Some(pairing_from_json("l2a_a", e, &data.h_l2a, &data.h_a, &data.h_l2a2)?);
                }
                if let Some(e) = la_la {
                    data.la_la = Some(pairing_from_json("la_la", e, &data.h_la, &data.h_la, &data.h_l2a2)?);
                }
                data.validate().map_err(core)?;
                Ok(data)
            }
        }
    }

    /// The section that regenerates `data`: the preset when there is one.
    pub fn from_surface(data: &SurfaceData) -> Self {
        match data.preset {
            Preset::P2 { l, a } => SurfaceSpec::P2 { l, a },
            Preset::Affine { d } => SurfaceSpec::Affine { d },
            Preset::Formal => Self::formal_of(data),
        }
    }

    /// Every dimension and pairing spelled out.
    pub fn formal_of(data: &SurfaceData) -> Self {
        SurfaceSpec::Formal {
            h_o: dims_to_json(&data.h_o),
            h_l: dims_to_json(&data.h_l),
            h_l2: dims_to_json(&data.h_l2),
            h_a: Some(dims_to_json(&data.h_a)),
            h_la: Some(dims_to_json(&data.h_la)),
            h_l2a: Some(dims_to_json(&data.h_l2a)),
            h_l2a2: Some(dims_to_json(&data.h_l2a2)),
            o_unit: data.o_unit,
            l2a_a: data.l2a_a.as_ref().map(pairing_to_json),
            la_la: data.la_la.as_ref().map(pairing_to_json),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SurfaceSpec::P2 { l, a } => format!("p2, L=O({}), A=O({})", l, a),
            SurfaceSpec::Affine { d } => format!("affine chart, weights ≤ {}", d),
            SurfaceSpec::Formal { .. } => "formal".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_presets() {
        let c = JobConfig::from_json(r#"{"surface":{"preset":"p2","L":1},"op":"taut","n":3}"#).unwrap();
        assert_eq!(c.surface, SurfaceSpec::P2 { l: 1, a: 0 });
        assert_eq!(c.output, OutputFormat::Table);
        assert_eq!(c.validate().unwrap(), Operation::Compute(ResultKind::Taut));
    }

    #[test]
    fn formal_with_pairings() {
        let text = r#"{"surface":{"preset":"formal","h_o":{"0":1},"h_l":{"0":1},"h_l2":{"0":1},
            "l2a_a":[[0,0,0,"1/2"]],"la_la":[[0,0,0,"1"]]},"op":"tensor2-twisted","n":2,"output":"json"}"#;
        let c = JobConfig::from_json(text).unwrap();
        let data = c.surface.to_surface().unwrap();
        assert_eq!(data.l2a_a.as_ref().unwrap().entries()[0].3, Q::new(1.into(), 2.into()));
        assert_eq!(SurfaceSpec::formal_of(&data).to_surface().unwrap(), data);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(JobConfig::from_json(r#"{"surface":{"preset":"p2","L":1},"op":"taut"}"#).is_err());
        let c = JobConfig::from_json(r#"{"surface":{"preset":"p2","L":1},"op":"extk","n":2,"k":3}"#).unwrap();
        assert!(c.validate().is_err());
        let c = JobConfig::from_json(r#"{"surface":{"preset":"p2","L":1},"op":"tensor3","n":2}"#).unwrap();
        assert!(c.validate().is_err());
        let s = SurfaceSpec::Formal {
            h_o: [("x".to_string(), 1)].into(),
            h_l: DimsJson::new(),
            h_l2: DimsJson::new(),
            h_a: None,
            h_la: None,
            h_l2a: None,
            h_l2a2: None,
            o_unit: None,
            l2a_a: None,
            la_la: None,
        };
        assert!(s.to_surface().is_err());
    }
}
