//! Global dimension cap for composite constructions.
//!
//! Tensor products and composite systems multiply dimensions quickly; the cap
//! keeps a stray script from allocating gigabyte matrices. The default (4096)
//! is generous for desk-scale work and can be raised with the `BETA_DIM_CAP`
//! environment variable.

use std::sync::OnceLock;

pub const DEFAULT_DIM_CAP: usize = 4096;

static DIM_CAP: OnceLock<usize> = OnceLock::new();

/// Effective dimension cap: `BETA_DIM_CAP` if set and parseable, else 4096.
///
/// Read once per process; later environment changes are ignored.
pub fn dim_cap() -> usize {
    *DIM_CAP.get_or_init(|| {
        std::env::var("BETA_DIM_CAP")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&c| c > 0)
            .unwrap_or(DEFAULT_DIM_CAP)
    })
}

/// Checks `dim` against the cap and reports the offending context on failure.
pub fn check_dim(dim: usize, what: &str) -> crate::error::Result<()> {
    let cap = dim_cap();
    if dim > cap {
        Err(crate::error::Error::Capacity(format!(
            "{what} needs dimension {dim}, cap is {cap} (override with BETA_DIM_CAP)"
        )))
    } else {
        Ok(())
    }
}
