//! Limit-set sampling and dimension estimators.
//!
//! Two independent estimates of the critical exponent of a convex
//! cocompact group acting on the unit disk: box counting over a sampled
//! point cloud (upper Minkowski dimension) and the exponential growth
//! rate of the orbit of the origin (abscissa of convergence of the
//! Poincaré series). Agreement between the two, and with the largest
//! real zero of the zeta function, is the main cross-check of the suite.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fit::fit_line;
use crate::groups::{letter_from_key, GeneratorSystem};
use crate::moebius::{MapClass, MoebiusMap, RawProduct};

/// Grid used to deduplicate sampled points before counting.
const DEDUP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum LimitSetError {
    /// Every sampled word was elliptic or parabolic.
    DegenerateGroup,
    /// Fewer than 3 scales had counts strictly between 1 and the cloud size.
    InsufficientScaleRange,
    /// Box counting needs at least 100 points to say anything.
    CloudTooSmall,
    /// Orbit growth fitting is only meaningful for verified ping-pong systems.
    NotPingPong,
    InvalidParameter(String),
}

impl core::fmt::Display for LimitSetError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LimitSetError::DegenerateGroup => write!(f, "degenerate group for sampling"),
            LimitSetError::InsufficientScaleRange => write!(f, "insufficient scale range"),
            LimitSetError::CloudTooSmall => {
                write!(f, "point cloud too small for box counting (need >= 100)")
            }
            LimitSetError::NotPingPong => {
                write!(f, "orbital counting requires free ping-pong group")
            }
            LimitSetError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LimitSetError {}

/// Sampled approximation of a limit set.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Complex64>,
    /// Word length the sample was generated at.
    pub word_length: usize,
    pub group_desc: String,
    /// Words whose matrix was not loxodromic (skipped, not sampled).
    pub skipped_non_loxodromic: usize,
}

/// Box-counting regression result.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    /// Minus the slope of log N(eps) against log eps, clamped to [0, 2].
    pub value: f64,
    /// Standard error of the regression slope.
    pub stderr: f64,
    pub scales_used: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Depth-first walk over reduced words with the running matrix product,
/// restricted to words starting with `first`. `visit` sees every node
/// (depth in 1..=max_len) exactly once, in deterministic letter order.
fn walk_products<F: FnMut(usize, &MoebiusMap)>(
    sys: &GeneratorSystem,
    max_len: usize,
    first: i32,
    visit: &mut F,
) {
    fn rec<F: FnMut(usize, &MoebiusMap)>(
        sys: &GeneratorSystem,
        depth: usize,
        max_len: usize,
        last: i32,
        m: &MoebiusMap,
        visit: &mut F,
    ) {
        visit(depth, m);
        if depth == max_len {
            return;
        }
        for key in 0..2 * sys.k() as u32 {
            let letter = letter_from_key(key);
            if letter == -last {
                continue;
            }
            let nm = m.compose(&sys.letter_matrix(letter));
            rec(sys, depth + 1, max_len, letter, &nm, visit);
        }
    }
    let m = sys.letter_matrix(first);
    rec(sys, 1, max_len, first, &m, visit);
}

/// Attracting fixed points for one first-letter partition of the length-L
/// words. Returns (points, skipped) with points still undeduplicated, so
/// partitions can be computed in parallel and merged deterministically.
pub fn sample_limit_set_partition(
    g: &GeneratorSystem,
    word_length: usize,
    first: i32,
) -> (Vec<Complex64>, usize) {
    let mut pts = Vec::new();
    let mut skipped = 0usize;
    walk_products(g, word_length, first, &mut |depth, m| {
        if depth != word_length {
            return;
        }
        if m.classify() != MapClass::Loxodromic {
            skipped += 1;
            return;
        }
        // Loxodromic maps always have two fixed points; keep the finite
        // attracting one (infinity never occurs for disk-preserving groups).
        match m.fixed_points() {
            Ok((att, _)) => match att.finite() {
                Some(z) => pts.push(z),
                None => skipped += 1,
            },
            Err(_) => skipped += 1,
        }
    });
    (pts, skipped)
}

/// The exact product of det-1 disk maps satisfies |d|^2 - |b|^2 = 1, so the
/// hyperbolic orbit distance is d_H(0, w(0)) = 2 artanh(|b|/|d|) =
/// 2 ln(|d| + |b|), and the log form only needs the entries to relative
/// accuracy — hence the raw (never renormalized) product.
fn orbit_distance(m: &RawProduct) -> f64 {
    2.0 * (m.d.norm() + m.b.norm()).ln()
}

/// Like `walk_products` but carrying a raw (never renormalized) product and
/// reporting the hyperbolic distance d_H(0, w(0)) at every node.
fn walk_orbit_distances<F: FnMut(usize, f64)>(
    sys: &GeneratorSystem,
    max_len: usize,
    first: i32,
    visit: &mut F,
) {
    fn rec<F: FnMut(usize, f64)>(
        sys: &GeneratorSystem,
        depth: usize,
        max_len: usize,
        last: i32,
        m: &RawProduct,
        visit: &mut F,
    ) {
        visit(depth, orbit_distance(m));
        if depth == max_len {
            return;
        }
        for key in 0..2 * sys.k() as u32 {
            let letter = letter_from_key(key);
            if letter == -last {
                continue;
            }
            let nm = m.mul(&sys.letter_matrix(letter));
            rec(sys, depth + 1, max_len, letter, &nm, visit);
        }
    }
    let m = RawProduct::from_map(&sys.letter_matrix(first));
    rec(sys, 1, max_len, first, &m, visit);
}

fn quantize(z: Complex64) -> (i64, i64) {
    ((z.re / DEDUP_TOL).round() as i64, (z.im / DEDUP_TOL).round() as i64)
}

/// Attracting fixed points of every loxodromic reduced word of length
/// exactly `word_length`, deduplicated on a 1e-9 grid. Output order is the
/// lexicographic order of the quantized coordinates, independent of the
/// enumeration schedule.
pub fn sample_limit_set(
    g: &GeneratorSystem,
    word_length: usize,
) -> Result<PointCloud, LimitSetError> {
    if word_length < 2 {
        return Err(LimitSetError::InvalidParameter(format!(
            "word_length must be >= 2, got {word_length}"
        )));
    }
    let mut keyed: Vec<((i64, i64), Complex64)> = Vec::new();
    let mut skipped = 0usize;
    for key in 0..2 * g.k() as u32 {
        let (pts, sk) = sample_limit_set_partition(g, word_length, letter_from_key(key));
        skipped += sk;
        keyed.extend(pts.into_iter().map(|z| (quantize(z), z)));
    }
    keyed.sort_unstable_by_key(|e| e.0);
    keyed.dedup_by_key(|e| e.0);
    if keyed.is_empty() {
        return Err(LimitSetError::DegenerateGroup);
    }
    Ok(PointCloud {
        points: keyed.into_iter().map(|e| e.1).collect(),
        word_length,
        group_desc: format!("{}-generator system", g.k()),
        skipped_non_loxodromic: skipped,
    })
}

/// Number of occupied eps-boxes on the grid anchored at the origin.
pub fn box_count_at_scale(points: &[Complex64], eps: f64) -> usize {
    let mut cells: Vec<(i64, i64)> = points
        .iter()
        .map(|z| ((z.re / eps).floor() as i64, (z.im / eps).floor() as i64))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

/// Box-counting dimension over `n_scales` geometric scales in
/// [eps_min, eps_max]. Scales whose count is 1 (window too coarse) or
/// equal to the cloud size (below sample resolution) are discarded.
pub fn box_dimension(
    cloud: &PointCloud,
    eps_min: f64,
    eps_max: f64,
    n_scales: usize,
) -> Result<DimensionEstimate, LimitSetError> {
    if cloud.points.len() < 100 {
        return Err(LimitSetError::CloudTooSmall);
    }
    if !(eps_min > 0.0) || !(eps_min < eps_max) {
        return Err(LimitSetError::InvalidParameter(format!(
            "need 0 < eps_min < eps_max, got [{eps_min}, {eps_max}]"
        )));
    }
    if n_scales < 3 {
        return Err(LimitSetError::InvalidParameter(format!(
            "need at least 3 scales, got {n_scales}"
        )));
    }
    let ratio = eps_max / eps_min;
    let mut scales = Vec::new();
    let mut counts = Vec::new();
    for i in 0..n_scales {
        let eps = eps_min * ratio.powf(i as f64 / (n_scales - 1) as f64);
        let n = box_count_at_scale(&cloud.points, eps);
        if 1 < n && n < cloud.points.len() {
            scales.push(eps);
            counts.push(n);
        }
    }
    if scales.len() < 3 {
        return Err(LimitSetError::InsufficientScaleRange);
    }
    let xs: Vec<f64> = scales.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&n| (n as f64).ln()).collect();
    let fit = fit_line(&xs, &ys);
    Ok(DimensionEstimate {
        value: (-fit.slope).clamp(0.0, 2.0),
        stderr: fit.slope_stderr,
        scales_used: scales,
        counts,
    })
}

/// Growth-rate estimate of the critical exponent: fit log M(T) against T,
/// where M(T) counts reduced words of length <= L moving the origin
/// hyperbolic distance <= T. The fit runs over the completeness window
/// T <= T_hi, with T_hi the smallest distance reached by a length-L word
/// (beyond it the length cutoff starts dropping orbit points), discarding
/// the smallest 20% of distances where the asymptotic regime has not set in.
pub fn poincare_abscissa(g: &GeneratorSystem, max_len: usize) -> Result<f64, LimitSetError> {
    if !g.schottky_flag {
        return Err(LimitSetError::NotPingPong);
    }
    if max_len < 4 {
        return Err(LimitSetError::InvalidParameter(format!(
            "word length must be >= 4, got {max_len}"
        )));
    }
    let mut dists = Vec::new();
    let mut t_hi = f64::INFINITY;
    for key in 0..2 * g.k() as u32 {
        walk_orbit_distances(g, max_len, letter_from_key(key), &mut |depth, d| {
            dists.push(d);
            if depth == max_len && d < t_hi {
                t_hi = d;
            }
        });
    }
    dists.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let m_cnt = dists.partition_point(|&d| d <= t_hi);
    let j0 = core::cmp::max(3, (0.2 * m_cnt as f64).ceil() as usize);
    if m_cnt < j0 + 2 {
        return Err(LimitSetError::InvalidParameter(format!(
            "only {m_cnt} orbit points below the completeness cutoff"
        )));
    }
    let xs: Vec<f64> = dists[j0 - 1..m_cnt].to_vec();
    let ys: Vec<f64> = (j0..=m_cnt).map(|j| (j as f64).ln()).collect();
    Ok(fit_line(&xs, &ys).slope)
}
