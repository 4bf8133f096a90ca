//! Truncated Selberg zeta function: evaluation, zero counting and location,
//! and extraction of the critical exponent as the largest real zero.
//!
//! The surface zeta is Z(s) = prod_{gamma} prod_{k>=0} (1 - e^{-(s+k)l_gamma})
//! over primitive closed geodesics. Numerically we truncate the k-product at
//! `k_max` and expand the geodesic product as a cycle expansion truncated by
//! total word weight: a term picking the j-th power of a factor whose
//! geodesic has word length n costs weight j*n, and only terms of total
//! weight <= L survive. The truncated *product* over finitely many geodesics
//! vanishes only on the lattice lines Re s = -k, so it cannot reproduce the
//! real zero at the critical exponent; the weight-truncated *expansion* is
//! the standard estimator with that zero, and every operation here
//! (log_zeta, count_zeros, find_zeros, delta_from_zeta) evaluates that same
//! expansion so that the advertised cross-checks hold exactly. For a
//! spectrum of single-letter words the expansion with L >= k_max + 1 is the
//! exact product, which is what the lattice examples exercise.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::groups::{primitive_classes, GeneratorSystem};
use crate::moebius::{complex_length_from_trace, RawProduct};

/// Distance guard: contour integration refuses to proceed when the running
/// zero-distance estimate |Z|/|Z'| drops below this.
pub const CONTOUR_GUARD: f64 = 1e-4;

/// log_zeta refuses to evaluate when |Z|/|Z'| is below this.
const LOG_SINGULAR_GUARD: f64 = 1e-8;

/// Cells smaller than this are reported as a single zero with the cell's
/// residue count as multiplicity.
const CLUSTER_FLOOR: f64 = 1e-9;

/// Below this cell size a non-convergent Newton iteration is an error
/// rather than a reason to keep subdividing.
const NEWTON_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum ZetaError {
    /// A canonical word in the spectrum was not loxodromic.
    NonHyperbolic,
    /// log_zeta evaluated at (or too near) a zero of the truncated product.
    LogSingular,
    /// A zero sits within `CONTOUR_GUARD` of the integration contour, or the
    /// quadrature error estimate exceeded 0.1.
    ContourTooClose,
    /// Newton failed to converge inside a cell that the argument principle
    /// says holds exactly one zero.
    NewtonDiverged { cell: Rect },
    /// Real-axis scan found no sign change.
    NoRealZero,
    InvalidInput(String),
}

impl core::fmt::Display for ZetaError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ZetaError::NonHyperbolic => write!(f, "non-hyperbolic element in spectrum"),
            ZetaError::LogSingular => write!(f, "log singular at zero"),
            ZetaError::ContourTooClose => {
                write!(f, "contour too close to zero; perturb region")
            }
            ZetaError::NewtonDiverged { cell } => write!(
                f,
                "Newton non-convergence after 50 iterations in cell [{}, {}] x [{}, {}]",
                cell.re_min, cell.re_max, cell.im_min, cell.im_max
            ),
            ZetaError::NoRealZero => write!(f, "no real zero found in (0,1)"),
            ZetaError::InvalidInput(msg) => write!(f, "{}", msg),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ZetaError {}

/// Axis-aligned rectangle in the complex s-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn validate(&self) -> Result<(), ZetaError> {
        if !(self.re_min < self.re_max && self.im_min < self.im_max) {
            return Err(ZetaError::InvalidInput(format!(
                "empty or inverted region [{}, {}] x [{}, {}]",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        if !(self.re_min.is_finite()
            && self.re_max.is_finite()
            && self.im_min.is_finite()
            && self.im_max.is_finite())
        {
            return Err(ZetaError::InvalidInput(String::from(
                "region bounds must be finite",
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, s: Complex64) -> bool {
        self.re_min <= s.re && s.re <= self.re_max && self.im_min <= s.im && s.im <= self.im_max
    }

    fn contains_with_margin(&self, s: Complex64, frac: f64) -> bool {
        let mre = frac * self.width();
        let mim = frac * self.height();
        self.re_min - mre <= s.re
            && s.re <= self.re_max + mre
            && self.im_min - mim <= s.im
            && s.im <= self.im_max + mim
    }

    fn grown(&self, d: f64) -> Rect {
        Rect {
            re_min: self.re_min - d,
            re_max: self.re_max + d,
            im_min: self.im_min - d,
            im_max: self.im_max + d,
        }
    }

    /// Split the longer side at interior fraction `t`, children in order.
    fn split(&self, t: f64) -> (Rect, Rect) {
        if self.width() >= self.height() {
            let cut = self.re_min + t * self.width();
            (
                Rect { re_max: cut, ..*self },
                Rect { re_min: cut, ..*self },
            )
        } else {
            let cut = self.im_min + t * self.height();
            (
                Rect { im_max: cut, ..*self },
                Rect { im_min: cut, ..*self },
            )
        }
    }
}

/// One merged entry of the length spectrum: a geodesic length, its holonomy
/// (identically 0 for surface groups but carried through the data model),
/// the number of unoriented primitive classes sharing it, and the smallest
/// word length realizing it (used for truncation sensitivity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub l: f64,
    pub theta: f64,
    pub mult: u32,
    pub word_length: usize,
}

/// Primitive length spectrum up to a word-length cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthSpectrum {
    pub entries: Vec<SpectrumEntry>,
    pub cutoff_word_length: usize,
    pub l_max: f64,
}

impl LengthSpectrum {
    /// Spectrum of a hyperbolic cylinder: one primitive geodesic.
    pub fn single_geodesic(l: f64) -> Self {
        assert!(l > 0.0, "geodesic length must be positive");
        LengthSpectrum {
            entries: vec![SpectrumEntry {
                l,
                theta: 0.0,
                mult: 1,
                word_length: 1,
            }],
            cutoff_word_length: 1,
            l_max: l,
        }
    }

    /// Restriction to entries of word length <= `max_word_length`.
    pub fn filtered_to(&self, max_word_length: usize) -> Self {
        let entries: Vec<SpectrumEntry> = self
            .entries
            .iter()
            .filter(|e| e.word_length <= max_word_length)
            .copied()
            .collect();
        let l_max = entries.iter().fold(0.0f64, |m, e| m.max(e.l));
        LengthSpectrum {
            entries,
            cutoff_word_length: max_word_length,
            l_max,
        }
    }
}

/// Quantization grid for merging equal (l, theta) classes.
const MERGE_TOL: f64 = 1e-9;

/// Primitive length spectrum of a free ping-pong group: one entry per
/// unoriented primitive conjugacy class of word length <= `max_len`, classes
/// with equal (l, theta) on a 1e-9 grid merged with their multiplicities
/// added. Entries are sorted by l ascending. Word products are accumulated
/// without renormalization so the traces stay accurate for deep words.
pub fn length_spectrum(
    g: &GeneratorSystem,
    max_len: usize,
) -> Result<LengthSpectrum, ZetaError> {
    if max_len < 1 {
        return Err(ZetaError::InvalidInput(String::from(
            "spectrum cutoff must be at least 1",
        )));
    }
    if !g.schottky_flag {
        return Err(ZetaError::InvalidInput(String::from(
            "length spectrum requires a verified ping-pong system",
        )));
    }
    // key: (quantized l, quantized theta) -> (l, theta, mult, min word length)
    let mut merged: alloc::collections::BTreeMap<(i64, i64), (f64, f64, u32, usize)> =
        alloc::collections::BTreeMap::new();
    for class in primitive_classes(g.k(), max_len) {
        let letters = class.canonical.letters();
        let mut m = RawProduct::from_map(&g.letter_matrix(letters[0]));
        for &letter in &letters[1..] {
            m = m.mul(&g.letter_matrix(letter));
        }
        let cl = complex_length_from_trace(m.trace()).map_err(|_| ZetaError::NonHyperbolic)?;
        let key = (
            (cl.l / MERGE_TOL).round() as i64,
            (cl.theta / MERGE_TOL).round() as i64,
        );
        let slot = merged.entry(key).or_insert((cl.l, cl.theta, 0, letters.len()));
        slot.2 += 1;
        slot.3 = slot.3.min(letters.len());
    }
    let mut entries: Vec<SpectrumEntry> = merged
        .into_values()
        .map(|(l, theta, mult, word_length)| SpectrumEntry {
            l,
            theta,
            mult,
            word_length,
        })
        .collect();
    entries.sort_by(|a, b| a.l.total_cmp(&b.l).then(a.theta.total_cmp(&b.theta)));
    let l_max = entries.iter().fold(0.0f64, |m, e| m.max(e.l));
    Ok(LengthSpectrum {
        entries,
        cutoff_word_length: max_len,
        l_max,
    })
}

/// Truncation parameters: `k_max` bounds the k-product, `word_length_l`
/// bounds the total weight of the cycle expansion. For honest use k_max
/// should be at least 1 (see [`ZetaParams::for_region`]); k_max = 0 is
/// permitted for single-factor diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZetaParams {
    pub k_max: u32,
    pub word_length_l: usize,
}

impl ZetaParams {
    pub fn new(k_max: u32, word_length_l: usize) -> Self {
        ZetaParams {
            k_max,
            word_length_l,
        }
    }

    /// Default truncation for a query region: factors with k much larger
    /// than |Re s| are uniformly close to 1, so k_max = ceil(|re_min|) + 3.
    pub fn for_region(region: &Rect, word_length_l: usize) -> Self {
        let k_max = if region.re_min >= 0.0 {
            3
        } else {
            region.re_min.abs().ceil() as u32 + 3
        };
        ZetaParams {
            k_max,
            word_length_l,
        }
    }
}

/// Zeros with multiplicities inside `region`; the multiplicities sum to the
/// argument-principle count of the region.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroList {
    pub zeros: Vec<(Complex64, u32)>,
    pub region: Rect,
    pub params: ZetaParams,
}

/// One exponential term coeff * e^{-s*rate} of expansion weight `weight`.
#[derive(Debug, Clone, Copy)]
struct Term {
    weight: usize,
    coeff: f64,
    rate: f64,
}

/// The weight-truncated cycle expansion of one factor family
/// (1 - e^{-(s+k)l})^mult: terms j = 1..=mult with weight j*n.
#[derive(Debug, Clone)]
struct Factor {
    terms: Vec<Term>,
}

/// Weight-bucketed evaluator for the truncated zeta and its s-derivative.
/// Buckets z[w] hold the total weight-w part of the expansion; each factor
/// multiplies the polynomial in place with a downward sweep so lower buckets
/// still hold the pre-factor values when read.
#[derive(Debug, Clone)]
pub(crate) struct ZetaFunction {
    factors: Vec<Factor>,
    weight_cap: usize,
}

impl ZetaFunction {
    pub(crate) fn new(spec: &LengthSpectrum, p: &ZetaParams) -> Self {
        let cap = p.word_length_l;
        let mut factors = Vec::new();
        // deterministic order: entries by l ascending, k ascending within
        for e in &spec.entries {
            let n = e.word_length;
            if n == 0 || n > cap {
                continue;
            }
            for k in 0..=p.k_max {
                let mut terms = Vec::new();
                // (1 - x)^mult = sum_j C(mult, j) (-x)^j, x = e^{-(s+k)l}
                let mut binom = 1.0f64;
                for j in 1..=e.mult as usize {
                    if j * n > cap {
                        break;
                    }
                    binom *= (e.mult as usize - j + 1) as f64 / j as f64;
                    let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
                    let coeff = sign * binom * (-(j as f64) * k as f64 * e.l).exp();
                    if coeff != 0.0 {
                        terms.push(Term {
                            weight: j * n,
                            coeff,
                            rate: j as f64 * e.l,
                        });
                    }
                }
                if !terms.is_empty() {
                    factors.push(Factor { terms });
                }
            }
        }
        ZetaFunction {
            factors,
            weight_cap: cap,
        }
    }

    /// (Z(s), Z'(s)) of the truncated expansion.
    pub(crate) fn value_and_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let cap = self.weight_cap;
        let zero = Complex64::new(0.0, 0.0);
        let mut z = vec![zero; cap + 1];
        let mut dz = vec![zero; cap + 1];
        z[0] = Complex64::new(1.0, 0.0);
        let mut vals: Vec<(usize, Complex64, Complex64)> = Vec::new();
        for f in &self.factors {
            vals.clear();
            for t in &f.terms {
                let v = t.coeff * (-s * t.rate).exp();
                vals.push((t.weight, v, -t.rate * v));
            }
            for w in (1..=cap).rev() {
                let mut acc = zero;
                let mut dacc = zero;
                for &(wt, v, dv) in &vals {
                    if wt <= w {
                        acc += v * z[w - wt];
                        dacc += v * dz[w - wt] + dv * z[w - wt];
                    }
                }
                z[w] += acc;
                dz[w] += dacc;
            }
        }
        (z.iter().sum(), dz.iter().sum())
    }

    /// Z'(s)/Z(s), guarding against contour points too near a zero.
    fn log_derivative(&self, s: Complex64) -> Result<Complex64, ZetaError> {
        let (v, d) = self.value_and_derivative(s);
        if v.norm() == 0.0 {
            return Err(ZetaError::ContourTooClose);
        }
        if d.norm() > 0.0 && v.norm() / d.norm() < CONTOUR_GUARD {
            return Err(ZetaError::ContourTooClose);
        }
        Ok(d / v)
    }
}

/// Principal-branch logarithm of the truncated zeta. Deterministic factor
/// order (l ascending, then k ascending) makes repeated evaluations
/// bit-identical.
pub fn log_zeta(
    s: Complex64,
    spec: &LengthSpectrum,
    p: &ZetaParams,
) -> Result<Complex64, ZetaError> {
    let zf = ZetaFunction::new(spec, p);
    let (v, d) = zf.value_and_derivative(s);
    if v.norm() == 0.0 {
        return Err(ZetaError::LogSingular);
    }
    if d.norm() > 0.0 && v.norm() / d.norm() < LOG_SINGULAR_GUARD {
        return Err(ZetaError::LogSingular);
    }
    Ok(v.ln())
}

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
const GL_X: [f64; 10] = [
    -0.9739065285171717,
    -0.8650633666889845,
    -0.6794095682990244,
    -0.4333953941292472,
    -0.1488743389816312,
    0.1488743389816312,
    0.4333953941292472,
    0.6794095682990244,
    0.8650633666889845,
    0.9739065285171717,
];
const GL_W: [f64; 10] = [
    0.0666713443086881,
    0.1494513491505806,
    0.2190863625159820,
    0.2692667193099963,
    0.2955242247147529,
    0.2955242247147529,
    0.2692667193099963,
    0.2190863625159820,
    0.1494513491505806,
    0.0666713443086881,
];

fn gl10(zf: &ZetaFunction, a: Complex64, b: Complex64) -> Result<Complex64, ZetaError> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..10 {
        acc += GL_W[i] * zf.log_derivative(mid + GL_X[i] * half)?;
    }
    Ok(acc * half)
}

/// Adaptive composite quadrature of Z'/Z along [a, b]; returns the value and
/// an error estimate.
fn edge_integral(
    zf: &ZetaFunction,
    a: Complex64,
    b: Complex64,
    tol: f64,
    depth: u32,
) -> Result<(Complex64, f64), ZetaError> {
    let whole = gl10(zf, a, b)?;
    let mid = 0.5 * (a + b);
    let split = gl10(zf, a, mid)? + gl10(zf, mid, b)?;
    let err = (whole - split).norm();
    if err < tol || depth >= 20 {
        return Ok((split, err));
    }
    let (lv, le) = edge_integral(zf, a, mid, 0.5 * tol, depth + 1)?;
    let (rv, re) = edge_integral(zf, mid, b, 0.5 * tol, depth + 1)?;
    Ok((lv + rv, le + re))
}

const TAU: f64 = core::f64::consts::TAU;

/// Argument-principle count over `region` with no retry on proximity
/// failure; the building block for the public retrying wrapper and the
/// subdivision search.
pub(crate) fn count_zeros_in(zf: &ZetaFunction, region: &Rect) -> Result<u32, ZetaError> {
    region.validate()?;
    let sw = Complex64::new(region.re_min, region.im_min);
    let se = Complex64::new(region.re_max, region.im_min);
    let ne = Complex64::new(region.re_max, region.im_max);
    let nw = Complex64::new(region.re_min, region.im_max);
    // counterclockwise; per-edge tolerance so the total quadrature error
    // budget on the winding number is ~1e-3
    let tol = TAU * 1e-3 / 4.0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (a, b) in [(sw, se), (se, ne), (ne, nw), (nw, sw)] {
        let (v, e) = edge_integral(zf, a, b, tol, 0)?;
        total += v;
        err += e;
    }
    let winding = total / Complex64::new(0.0, TAU);
    if err / TAU >= 0.1 {
        return Err(ZetaError::ContourTooClose);
    }
    let n = winding.re.round();
    if (winding - n).norm() >= 0.1 || n < 0.0 {
        return Err(ZetaError::ContourTooClose);
    }
    Ok(n as u32)
}

/// Number of zeros of the truncated zeta inside `region`, counted with
/// multiplicity by the argument principle. On contour-proximity failure the
/// region is grown outward in steps of 1e-2 (up to 8 times) and the count of
/// the perturbed region is returned.
pub fn count_zeros(
    region: &Rect,
    spec: &LengthSpectrum,
    p: &ZetaParams,
) -> Result<u32, ZetaError> {
    region.validate()?;
    let zf = ZetaFunction::new(spec, p);
    let mut last = ZetaError::ContourTooClose;
    for attempt in 0..=8u32 {
        let r = region.grown(1e-2 * attempt as f64);
        match count_zeros_in(&zf, &r) {
            Ok(n) => return Ok(n),
            Err(ZetaError::ContourTooClose) => last = ZetaError::ContourTooClose,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Newton iteration s -> s - Z/Z' from `start`; `Some` only when the step
/// contracts below 1e-13*(1+|s|) within 50 iterations and the limit stays
/// inside `cell` inflated by 10% per side.
fn newton_in_cell(zf: &ZetaFunction, start: Complex64, cell: &Rect) -> Option<Complex64> {
    // The counted zero is strictly interior (the cell contour cleared the
    // proximity guard), so anything meaningfully outside is a different
    // zero Newton wandered to; the margin only absorbs refinement noise.
    const EDGE_SLOP: f64 = 1e-3;
    let mut s = start;
    for _ in 0..50 {
        let (v, d) = zf.value_and_derivative(s);
        if v.norm() == 0.0 {
            return cell.contains_with_margin(s, EDGE_SLOP).then_some(s);
        }
        if d.norm() == 0.0 {
            return None;
        }
        let step = v / d;
        s -= step;
        if step.norm() < 1e-13 * (1.0 + s.norm()) {
            return cell.contains_with_margin(s, EDGE_SLOP).then_some(s);
        }
    }
    None
}

/// Interior split fractions tried when a child contour lands on a zero.
const SPLIT_FRACTIONS: [f64; 7] = [0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65];

fn find_rec(
    zf: &ZetaFunction,
    cell: Rect,
    count: u32,
    depth: u32,
    out: &mut Vec<(Complex64, u32)>,
) -> Result<(), ZetaError> {
    if count == 0 {
        return Ok(());
    }
    let span = cell.width().max(cell.height());
    if count == 1 {
        if let Some(z) = newton_in_cell(zf, cell.center(), &cell) {
            out.push((z, 1));
            return Ok(());
        }
        if span < NEWTON_FLOOR {
            return Err(ZetaError::NewtonDiverged { cell });
        }
        // Newton escaped the cell (zero hugging an edge): subdivide instead.
    } else if span < CLUSTER_FLOOR {
        // unresolvable cluster = genuine multiple zero at this precision
        out.push((cell.center(), count));
        return Ok(());
    }
    if depth > 80 {
        return Err(ZetaError::ContourTooClose);
    }
    for t in SPLIT_FRACTIONS {
        let (ca, cb) = cell.split(t);
        let (na, nb) = match (count_zeros_in(zf, &ca), count_zeros_in(zf, &cb)) {
            (Ok(na), Ok(nb)) => (na, nb),
            _ => continue,
        };
        if na + nb != count {
            continue; // a zero straddles the cut within quadrature blur
        }
        find_rec(zf, ca, na, depth + 1, out)?;
        find_rec(zf, cb, nb, depth + 1, out)?;
        return Ok(());
    }
    Err(ZetaError::ContourTooClose)
}

/// Locate all zeros of the truncated zeta in `region` by recursive
/// subdivision plus Newton polish; multiplicities sum to the
/// argument-principle count of `region` itself (which must have a clean
/// contour: unlike [`count_zeros`], the region is never perturbed, since the
/// returned list is tied to it).
pub fn find_zeros(
    region: &Rect,
    spec: &LengthSpectrum,
    p: &ZetaParams,
) -> Result<ZeroList, ZetaError> {
    region.validate()?;
    let zf = ZetaFunction::new(spec, p);
    let total = count_zeros_in(&zf, region)?;
    let mut zeros = Vec::new();
    find_rec(&zf, *region, total, 0, &mut zeros)?;
    zeros.sort_by(|a, b| a.0.im.total_cmp(&b.0.im).then(a.0.re.total_cmp(&b.0.re)));
    Ok(ZeroList {
        zeros,
        region: *region,
        params: *p,
    })
}

/// Largest real zero with a truncation-sensitivity estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaEstimate {
    pub value: f64,
    /// |delta(L) - delta(L-1)|, when the L-1 spectrum still has a real zero.
    pub sensitivity: Option<f64>,
}

/// Largest real zero of the truncated zeta on a downward scan from 1.0 to
/// just below 0 (the cyclic-group zero sits exactly at 0), bisection plus
/// Newton polish.
fn largest_real_zero(zf: &ZetaFunction) -> Result<f64, ZetaError> {
    let f = |x: f64| zf.value_and_derivative(Complex64::new(x, 0.0)).0.re;
    const STEP: f64 = 0.02;
    let mut bracket: Option<(f64, f64)> = None;
    let mut prev_x = 1.0;
    let mut prev_f = f(prev_x);
    if prev_f == 0.0 {
        return Ok(prev_x);
    }
    for i in 1..=53 {
        let x = 1.0 - STEP * i as f64;
        if x < -0.05 {
            break;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() != prev_f.signum() {
            bracket = Some((x, prev_x));
            break;
        }
        prev_x = x;
        prev_f = fx;
    }
    let (mut lo, mut hi) = bracket.ok_or(ZetaError::NoRealZero)?;
    let mut flo = f(lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..20 {
        let (v, d) = zf.value_and_derivative(Complex64::new(s, 0.0));
        if v.re == 0.0 || d.re == 0.0 {
            break;
        }
        let step = v.re / d.re;
        let next = s - step;
        if next < lo - STEP || next > hi + STEP {
            break; // polish wandered; keep the bisection value
        }
        s = next;
        if step.abs() < 1e-15 * (1.0 + s.abs()) {
            break;
        }
    }
    Ok(s)
}

/// Critical exponent as the largest real zero of the truncated zeta,
/// with the L vs L-1 sensitivity attached.
pub fn delta_from_zeta(
    spec: &LengthSpectrum,
    p: &ZetaParams,
) -> Result<DeltaEstimate, ZetaError> {
    let zf = ZetaFunction::new(spec, p);
    let value = largest_real_zero(&zf)?;
    let sensitivity = if spec.cutoff_word_length >= 2 {
        let prev = spec.filtered_to(spec.cutoff_word_length - 1);
        let pp = ZetaParams::new(p.k_max, p.word_length_l.min(prev.cutoff_word_length));
        let zf_prev = ZetaFunction::new(&prev, &pp);
        largest_real_zero(&zf_prev).ok().map(|v| (value - v).abs())
    } else {
        None
    };
    Ok(DeltaEstimate { value, sensitivity })
}
