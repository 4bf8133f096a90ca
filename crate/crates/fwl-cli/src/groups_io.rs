//! Group construction from config specs, the group content hash used for
//! manifests and the spectra cache, and spectrum acquisition.

use fwl_core::groups::{bend, build_octagon_fuchsian, build_symmetric_schottky, GeneratorSystem};
use fwl_core::zeta::{length_spectrum, LengthSpectrum};
use sha2::{Digest, Sha256};

use crate::cache;
use crate::config::{GroupSpec, RunConfig};
use crate::error::CliError;

/// sha256 of the canonical JSON form of the group spec.
pub fn group_hash(spec: &GroupSpec) -> String {
    let bytes = serde_json::to_vec(spec).expect("group spec serializes");
    hex::encode(Sha256::digest(bytes))
}

/// Human-readable tag for CSV headers and SVG titles.
pub fn group_desc(spec: &GroupSpec) -> String {
    match spec {
        GroupSpec::Schottky { k, gap } => format!("schottky k={k} gap={gap}"),
        GroupSpec::Octagon { theta } => format!("octagon theta={theta}"),
        GroupSpec::Cylinder { ell } => format!("cylinder ell={ell}"),
        GroupSpec::Planted { alpha, t_max } => format!("planted alpha={alpha} t_max={t_max}"),
    }
}

/// Geometric generator system, for commands that sample orbits.
pub fn build_geometry(spec: &GroupSpec) -> Result<GeneratorSystem, CliError> {
    match spec {
        GroupSpec::Schottky { k, gap } => Ok(build_symmetric_schottky(*k, *gap)?),
        GroupSpec::Octagon { theta } => {
            let base = build_octagon_fuchsian();
            if *theta == 0.0 {
                Ok(base)
            } else {
                Ok(bend(&base, *theta)?)
            }
        }
        GroupSpec::Cylinder { .. } | GroupSpec::Planted { .. } => Err(CliError::Config(
            "group.kind: this command needs a geometric group (schottky or octagon)".into(),
        )),
    }
}

/// Length spectrum for zeta-based commands, via the cache when
/// FWL_CACHE_DIR is set. The cylinder needs no enumeration; planted specs
/// carry no geodesics at all.
pub fn spectrum_for(cfg: &RunConfig) -> Result<LengthSpectrum, CliError> {
    let spec = cfg.group_required()?;
    match spec {
        GroupSpec::Cylinder { ell } => Ok(LengthSpectrum::single_geodesic(*ell)),
        GroupSpec::Planted { .. } => Err(CliError::Config(
            "group.kind: planted fixtures provide only zero heights; \
             use the count/weyl commands"
                .into(),
        )),
        GroupSpec::Schottky { .. } | GroupSpec::Octagon { .. } => {
            let wl = cfg.word_length_or_default();
            let hash = group_hash(spec);
            if let Some(cached) = cache::load_spectrum(&hash, wl) {
                return Ok(cached);
            }
            let sys = build_geometry(spec)?;
            let spectrum = length_spectrum(&sys, wl)?;
            cache::store_spectrum(&hash, wl, &spectrum);
            Ok(spectrum)
        }
    }
}
