//! Length-spectrum cache keyed by (group hash, word-length cutoff),
//! enabled by the FWL_CACHE_DIR environment variable. JSON round-trips
//! f64 exactly (shortest representation), so cached and freshly computed
//! spectra produce byte-identical downstream outputs.

use std::path::PathBuf;

use fwl_core::zeta::{LengthSpectrum, SpectrumEntry};
use serde::{Deserialize, Serialize};

pub const CACHE_ENV: &str = "FWL_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct CachedEntry {
    l: f64,
    theta: f64,
    mult: u32,
    word_length: usize,
}

#[derive(Serialize, Deserialize)]
struct CachedSpectrum {
    entries: Vec<CachedEntry>,
    cutoff_word_length: usize,
    l_max: f64,
}

fn cache_path(hash: &str, word_length: usize) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    let short = &hash[..hash.len().min(16)];
    Some(PathBuf::from(dir).join(format!("spectrum_{short}_L{word_length}.json")))
}

pub fn load_spectrum(hash: &str, word_length: usize) -> Option<LengthSpectrum> {
    let path = cache_path(hash, word_length)?;
    let text = std::fs::read_to_string(path).ok()?;
    let cached: CachedSpectrum = serde_json::from_str(&text).ok()?;
    Some(LengthSpectrum {
        entries: cached
            .entries
            .into_iter()
            .map(|e| SpectrumEntry {
                l: e.l,
                theta: e.theta,
                mult: e.mult,
                word_length: e.word_length,
            })
            .collect(),
        cutoff_word_length: cached.cutoff_word_length,
        l_max: cached.l_max,
    })
}

/// Best-effort: cache misses and write failures are silent (the spectrum
/// is recomputed next time).
pub fn store_spectrum(hash: &str, word_length: usize, spectrum: &LengthSpectrum) {
    let Some(path) = cache_path(hash, word_length) else {
        return;
    };
    if let Some(parent) = path.parent() {
        let _ = std::fs::create_dir_all(parent);
    }
    let cached = CachedSpectrum {
        entries: spectrum
            .entries
            .iter()
            .map(|e| CachedEntry {
                l: e.l,
                theta: e.theta,
                mult: e.mult,
                word_length: e.word_length,
            })
            .collect(),
        cutoff_word_length: spectrum.cutoff_word_length,
        l_max: spectrum.l_max,
    };
    if let Ok(bytes) = serde_json::to_vec(&cached) {
        let _ = std::fs::write(path, bytes);
    }
}
