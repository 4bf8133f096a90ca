//! Möbius transformations of the Riemann sphere as normalized 2x2 complex
//! matrices, with trace-based classification and complex translation lengths.

use alloc::string::String;
use core::f64::consts::PI;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const TAU: f64 = 2.0 * PI;

/// A point of the Riemann sphere: a finite complex number or the point at
/// infinity kept as an explicit variant (no NaN/inf encoding tricks).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtendedComplex {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtendedComplex::Finite(z) => Some(z),
            ExtendedComplex::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(z: Complex64) -> Self {
        ExtendedComplex::Finite(z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapClass {
    Identity,
    Parabolic,
    Elliptic,
    Loxodromic,
}

/// Complex translation length of a loxodromic element: `l > 0` is the
/// geodesic length, `theta` the holonomy angle in (-pi, pi], related to the
/// trace by 2 cosh((l + i theta)/2) = ±tr.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexLength {
    pub l: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MoebiusError {
    /// ad - bc vanishes (or is not finite); the map is not invertible.
    DegenerateMatrix,
    /// fixed_points called on (a tolerance-identified) identity.
    FixedPointsOfIdentity,
    /// complex_length is only defined for loxodromic elements.
    NotLoxodromic(MapClass),
}

impl fmt::Display for MoebiusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoebiusError::DegenerateMatrix => write!(f, "degenerate matrix: ad - bc = 0"),
            MoebiusError::FixedPointsOfIdentity => {
                write!(f, "fixed points undefined for the identity")
            }
            MoebiusError::NotLoxodromic(c) => {
                write!(f, "complex length undefined for non-loxodromic element ({c:?})")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MoebiusError {}

/// z -> (az + b)/(cz + d) with ad - bc normalized to 1. The matrix is only
/// determined up to sign; every derived quantity tolerates ±(a,b,c,d).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Tolerance on tr^2 used by `classify` (and the identity test).
pub const CLASSIFY_TOL: f64 = 1e-10;

impl MoebiusMap {
    /// Build from matrix entries, normalizing the determinant to 1.
    pub fn new(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, MoebiusError> {
        let det = a * d - b * c;
        if !det.is_finite() || det.norm_sqr() < 1e-280 {
            return Err(MoebiusError::DegenerateMatrix);
        }
        let s = det.sqrt();
        Ok(MoebiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// z -> k z (k != 0), e.g. `scaling(2.0.into())` is the closed geodesic
    /// of length ln 2 on the model cylinder.
    pub fn scaling(k: Complex64) -> Result<Self, MoebiusError> {
        MoebiusMap::new(k, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn trace_sq(&self) -> Complex64 {
        let t = self.trace();
        t * t
    }

    /// Matrix product; `self.compose(&g)` acts as z -> self(g(z)).
    /// Renormalizes to damp determinant drift along long products.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        let det = a * d - b * c;
        // det == 1 in exact arithmetic; rescale by sqrt to stay there
        let s = det.sqrt();
        MoebiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        }
    }

    pub fn inverse(&self) -> MoebiusMap {
        // inverse of a det-1 matrix
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn apply(&self, z: ExtendedComplex) -> ExtendedComplex {
        match z {
            ExtendedComplex::Infinity => {
                if self.c.norm_sqr() == 0.0 {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::Finite(self.a / self.c)
                }
            }
            ExtendedComplex::Finite(z) => {
                let num = self.a * z + self.b;
                let den = self.c * z + self.d;
                if den.norm_sqr() == 0.0 {
                    return ExtendedComplex::Infinity;
                }
                let w = num / den;
                if w.is_finite() {
                    ExtendedComplex::Finite(w)
                } else {
                    ExtendedComplex::Infinity
                }
            }
        }
    }

    /// Convenience wrapper for finite inputs.
    pub fn apply_c(&self, z: Complex64) -> ExtendedComplex {
        self.apply(ExtendedComplex::Finite(z))
    }

    fn is_identity_tol(&self) -> bool {
        // ±Id: off-diagonal ~ 0 and a ~ d
        self.b.norm() <= CLASSIFY_TOL
            && self.c.norm() <= CLASSIFY_TOL
            && (self.a - self.d).norm() <= CLASSIFY_TOL
    }

    /// Trace-squared classification with tolerance `CLASSIFY_TOL`:
    /// tr^2 = 4 parabolic, tr^2 in [0,4) real elliptic, otherwise loxodromic.
    pub fn classify(&self) -> MapClass {
        if self.is_identity_tol() {
            return MapClass::Identity;
        }
        let t2 = self.trace_sq();
        if (t2 - 4.0).norm() <= CLASSIFY_TOL {
            return MapClass::Parabolic;
        }
        if t2.im.abs() <= CLASSIFY_TOL && t2.re >= -CLASSIFY_TOL && t2.re < 4.0 {
            return MapClass::Elliptic;
        }
        MapClass::Loxodromic
    }

    /// Both fixed points, attracting first for loxodromic maps. Parabolic
    /// maps return their single fixed point twice.
    pub fn fixed_points(&self) -> Result<(ExtendedComplex, ExtendedComplex), MoebiusError> {
        let class = self.classify();
        if class == MapClass::Identity {
            return Err(MoebiusError::FixedPointsOfIdentity);
        }
        let scale = self.a.norm().max(self.b.norm()).max(self.d.norm()).max(1.0);
        if self.c.norm() <= 1e-13 * scale {
            // infinity is fixed
            if (self.a - self.d).norm() <= 1e-13 * scale {
                // translation z -> z + b/d
                return Ok((ExtendedComplex::Infinity, ExtendedComplex::Infinity));
            }
            let zf = ExtendedComplex::Finite(self.b / (self.d - self.a));
            return Ok(if class == MapClass::Loxodromic && self.a.norm() > self.d.norm() {
                (ExtendedComplex::Infinity, zf)
            } else {
                (zf, ExtendedComplex::Infinity)
            });
        }
        // c z^2 + (d - a) z - b = 0; discriminant reduces to tr^2 - 4
        let disc = (self.trace_sq() - 4.0).sqrt();
        let z1 = (self.a - self.d + disc) / (2.0 * self.c);
        let z2 = (self.a - self.d - disc) / (2.0 * self.c);
        if class == MapClass::Parabolic {
            let z = (self.a - self.d) / (2.0 * self.c);
            return Ok((ExtendedComplex::Finite(z), ExtendedComplex::Finite(z)));
        }
        // multiplier at z0 is 1/(c z0 + d)^2: attracting iff |c z0 + d| > 1
        let m1 = (self.c * z1 + self.d).norm();
        let m2 = (self.c * z2 + self.d).norm();
        let (att, rep) = if m1 >= m2 { (z1, z2) } else { (z2, z1) };
        Ok((ExtendedComplex::Finite(att), ExtendedComplex::Finite(rep)))
    }

    /// Complex translation length (l, theta) of a loxodromic element.
    pub fn complex_length(&self) -> Result<ComplexLength, MoebiusError> {
        let class = self.classify();
        if class != MapClass::Loxodromic {
            return Err(MoebiusError::NotLoxodromic(class));
        }
        complex_length_from_trace(self.trace())
    }
}

/// Complex length from the trace of a det-1 matrix alone. Deep word
/// products are accumulated raw (see [`RawProduct`]); their trace matches
/// the exact det-1 trace to relative ~ n*eps even when the computed det
/// has lost all accuracy, so length extraction must not touch the entries.
pub(crate) fn complex_length_from_trace(tr: Complex64) -> Result<ComplexLength, MoebiusError> {
    let t2 = tr * tr;
    if (t2 - 4.0).norm() <= CLASSIFY_TOL {
        return Err(MoebiusError::NotLoxodromic(MapClass::Parabolic));
    }
    if t2.im.abs() <= CLASSIFY_TOL && t2.re >= -CLASSIFY_TOL && t2.re < 4.0 {
        return Err(MoebiusError::NotLoxodromic(MapClass::Elliptic));
    }
    let disc = (t2 - 4.0).sqrt();
    // eigenvalue of larger modulus, avoiding cancellation
    let lam_plus = (tr + disc) / 2.0;
    let lam_minus = (tr - disc) / 2.0;
    let lam = if lam_plus.norm() >= lam_minus.norm() {
        lam_plus
    } else {
        lam_minus
    };
    let l = 2.0 * lam.norm().ln();
    let theta = wrap_angle(2.0 * lam.arg());
    Ok(ComplexLength { l, theta })
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut t = a - TAU * (a / TAU).round();
    if t <= -PI {
        t += TAU;
    }
    if t > PI {
        t -= TAU;
    }
    t
}

/// Unnormalized 2x2 product accumulator for deep words. `compose` rescales
/// by the computed determinant, but once entries reach scale s the computed
/// det of a true det-1 product carries cancellation noise ~ s^2 * 1e-16, and
/// dividing by it injects that noise into every entry. Raw products keep
/// entries accurate to relative ~ n*eps, and quantities derived under the
/// "det = 1 exactly" assumption (trace, |d|^2 - |b|^2 = 1) stay reliable.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawProduct {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl RawProduct {
    pub fn from_map(m: &MoebiusMap) -> Self {
        RawProduct {
            a: m.a,
            b: m.b,
            c: m.c,
            d: m.d,
        }
    }

    pub fn mul(&self, m: &MoebiusMap) -> Self {
        RawProduct {
            a: self.a * m.a + self.b * m.c,
            b: self.a * m.b + self.b * m.d,
            c: self.c * m.a + self.d * m.c,
            d: self.c * m.b + self.d * m.d,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }
}

/// Hyperbolic distance from 0 to z in the Poincaré disk: 2 artanh|z|.
/// |z| is clamped strictly below 1 (largest representable double < 1, so
/// the result caps near 37.4) to keep deep orbit points finite.
pub fn disk_distance_from_origin(z: Complex64) -> f64 {
    let below_one = f64::from_bits(1.0f64.to_bits() - 1);
    let r = z.norm().min(below_one);
    2.0 * r.atanh()
}

/// Human-readable one-liner, handy for error contexts.
pub fn describe(m: &MoebiusMap) -> String {
    alloc::format!(
        "[{:.6}{:+.6}i, {:.6}{:+.6}i; {:.6}{:+.6}i, {:.6}{:+.6}i]",
        m.a.re, m.a.im, m.b.re, m.b.im, m.c.re, m.c.im, m.d.re, m.d.im
    )
}
