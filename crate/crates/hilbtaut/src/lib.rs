//! Front end for `hilbtaut-core`: JSON job files, rendering, and the
//! self-verification suites.

pub mod config;
mod error;
pub mod report;
pub mod verify;

pub use config::{JobConfig, Operation, OutputFormat, SurfaceSpec};
pub use error::CliError;
pub use report::ComputeReport;

use hilbtaut_core::cohomology;

/// Runs one compute job; `verify` jobs are dispatched by the caller.
pub fn compute(config: &JobConfig) -> Result<ComputeReport, CliError> {
    let kind = match config.validate()? {
        Operation::Compute(kind) => kind,
        Operation::Verify => return Err(CliError::Config("verify is not a compute operation".into())),
    };
    let data = config.surface.to_surface()?;
    let result = cohomology::compute(kind, config.n, config.k, &data)?;
    Ok(ComputeReport {
        op: kind.name().to_string(),
        n: config.n,
        k: if kind == cohomology::ResultKind::Extk { config.k } else { None },
        surface: config.surface.clone(),
        result,
    })
}

/// Tier from `HILBTAUT_VERIFY_TIER` when set, else the given default.
pub fn effective_tier(flag: Option<verify::Tier>) -> Result<verify::Tier, CliError> {
    match std::env::var("HILBTAUT_VERIFY_TIER") {
        Ok(v) if !v.trim().is_empty() => verify::Tier::parse(&v),
        _ => Ok(flag.unwrap_or(verify::Tier::Fast)),
    }
}
