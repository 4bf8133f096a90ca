//! Group constructions in the Poincaré disk: symmetric Schottky groups, the
//! genus-2 octagon surface group, quasifuchsian bendings of it, reduced-word
//! enumeration and primitive conjugacy classes (closed geodesics).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::moebius::{ExtendedComplex, MoebiusMap};

/// Euclidean disk-model constants of the regular hyperbolic octagon of area
/// 4π, frozen from the derivation documented at [`build_octagon_fuchsian`]
/// and re-derived by a unit test.
///
/// Distance from the origin to the nearest point of each side circle.
pub const OCTAGON_NEAREST_POINT: f64 = 0.6435942529055827;
/// Distance from the origin to each side-circle center.
pub const OCTAGON_CENTER_DIST: f64 = 1.0986841134678098;
/// Common Euclidean radius of the eight side circles.
pub const OCTAGON_RADIUS: f64 = 0.4550898605622272;

/// Largest bending angle accepted by [`bend`].
pub const MAX_BEND_ANGLE: f64 = 0.8;

#[derive(Clone, Debug, PartialEq)]
pub enum GroupsError {
    /// 2k disks overlap (or parameters out of range) in `build_symmetric_schottky`.
    NotSchottky,
    /// |theta| exceeds `MAX_BEND_ANGLE` in `bend`.
    BendAngleOutOfRange,
    /// word letters must be nonzero with |letter| <= k and no adjacent
    /// cancelling pair.
    InvalidWord(String),
}

impl fmt::Display for GroupsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupsError::NotSchottky => write!(f, "not a Schottky configuration"),
            GroupsError::BendAngleOutOfRange => {
                write!(f, "bending angle outside validated range")
            }
            GroupsError::InvalidWord(msg) => write!(f, "invalid word: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GroupsError {}

/// Euclidean circle; the pairing circles of every group here are orthogonal
/// to the unit circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        debug_assert!(radius.is_finite() && radius > 0.0);
        Circle { center, radius }
    }

    pub fn point_at(&self, angle: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, angle)
    }

    /// Strict interior.
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// |center|^2 = 1 + radius^2, the condition to meet the unit circle at
    /// right angles.
    pub fn orthogonal_to_unit_circle(&self, tol: f64) -> bool {
        (self.center.norm_sqr() - 1.0 - self.radius * self.radius).abs() <= tol
    }
}

/// Image of a circle under a Möbius map (assumes the image is again a
/// circle, i.e. the pole of `g` is not on the circle).
pub fn image_circle(g: &MoebiusMap, circle: &Circle) -> Circle {
    let c = circle.center;
    let rho = circle.radius;
    if g.c.norm() < 1e-14 {
        // affine map z -> (a z + b)/d
        let center = (g.a * c + g.b) / g.d;
        let radius = (g.a / g.d).norm() * rho;
        return Circle::new(center, radius);
    }
    let pole = -g.d / g.c;
    let diff = pole - c;
    // the image center is the image of the point symmetric to the pole;
    // when the pole sits at the circle center that point is infinity
    let center = if diff.norm() <= 1e-13 * (1.0 + rho) {
        g.a / g.c
    } else {
        let sym = c + rho * rho / diff.conj();
        match g.apply_c(sym) {
            ExtendedComplex::Finite(w) => w,
            // sym == pole only if the pole is on the circle, excluded
            ExtendedComplex::Infinity => g.a / g.c,
        }
    };
    // sample a boundary point away from the pole so its image stays finite
    let dir = if diff.norm() <= 1e-13 * (1.0 + rho) {
        Complex64::new(1.0, 0.0)
    } else {
        diff / diff.norm()
    };
    let sample = c - rho * dir;
    let radius = match g.apply_c(sample) {
        ExtendedComplex::Finite(w) => (w - center).norm(),
        ExtendedComplex::Infinity => rho,
    };
    Circle::new(center, radius)
}

/// Marked generator system: `generators[i]` maps the exterior of
/// `pairing[i].0` onto the interior of `pairing[i].1`. `schottky_flag` is
/// set when all 2k closed disks are pairwise disjoint (free, convex
/// cocompact of infinite volume); the octagon group has it unset.
#[derive(Clone, Debug)]
pub struct GeneratorSystem {
    pub generators: Vec<MoebiusMap>,
    pub pairing: Vec<(Circle, Circle)>,
    pub schottky_flag: bool,
}

impl GeneratorSystem {
    pub fn k(&self) -> usize {
        self.generators.len()
    }

    /// Matrix for a signed letter: +i is generator i (1-based), -i its inverse.
    pub fn letter_matrix(&self, letter: i32) -> MoebiusMap {
        let idx = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            self.generators[idx]
        } else {
            self.generators[idx].inverse()
        }
    }

    /// All 2k pairing circles, exterior circles first.
    pub fn all_circles(&self) -> Vec<Circle> {
        let mut v: Vec<Circle> = self.pairing.iter().map(|p| p.0).collect();
        v.extend(self.pairing.iter().map(|p| p.1));
        v
    }

    /// The circle whose exterior letter `l` expands: D_i for +i, D'_i for -i.
    /// The letter maps the exterior of `source_circle(l)` into the interior
    /// of `target_circle(l)`.
    pub fn source_circle(&self, letter: i32) -> Circle {
        let idx = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            self.pairing[idx].0
        } else {
            self.pairing[idx].1
        }
    }

    pub fn target_circle(&self, letter: i32) -> Circle {
        let idx = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            self.pairing[idx].1
        } else {
            self.pairing[idx].0
        }
    }
}

/// Reduced word in the free group on k generators: signed 1-based indices,
/// no adjacent cancelling pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord {
    letters: Vec<i32>,
}

impl GroupWord {
    pub fn new(letters: Vec<i32>, k: usize) -> Result<Self, GroupsError> {
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize > k {
                return Err(GroupsError::InvalidWord(alloc::format!(
                    "letter {l} out of range for k={k}"
                )));
            }
        }
        for w in letters.windows(2) {
            if w[0] == -w[1] {
                return Err(GroupsError::InvalidWord(alloc::format!(
                    "adjacent cancelling pair ({}, {})",
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(GroupWord { letters })
    }

    /// For words already known to be reduced (internal enumeration).
    pub(crate) fn from_reduced(letters: Vec<i32>) -> Self {
        GroupWord { letters }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// First and last letters do not cancel (single letters qualify).
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => f != -l,
            _ => true,
        }
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn rotated(&self, r: usize) -> GroupWord {
        let n = self.letters.len();
        if n == 0 {
            return self.clone();
        }
        let r = r % n;
        let mut v = Vec::with_capacity(n);
        v.extend_from_slice(&self.letters[r..]);
        v.extend_from_slice(&self.letters[..r]);
        GroupWord { letters: v }
    }
}

/// Letter ordering used for all lexicographic comparisons:
/// +1 < -1 < +2 < -2 < ...
pub fn letter_key(l: i32) -> u32 {
    if l > 0 {
        2 * (l as u32 - 1)
    } else {
        2 * (-l) as u32 - 1
    }
}

pub(crate) fn letter_from_key(key: u32) -> i32 {
    if key % 2 == 0 {
        (key / 2) as i32 + 1
    } else {
        -(((key + 1) / 2) as i32)
    }
}

fn key_less(a: &[i32], b: &[i32]) -> bool {
    for (&x, &y) in a.iter().zip(b.iter()) {
        let (kx, ky) = (letter_key(x), letter_key(y));
        if kx != ky {
            return kx < ky;
        }
    }
    a.len() < b.len()
}

/// Left-to-right product of the letter matrices of `w`.
pub fn word_matrix(w: &GroupWord, g: &GeneratorSystem) -> MoebiusMap {
    let mut m = MoebiusMap::identity();
    for &l in w.letters() {
        m = m.compose(&g.letter_matrix(l));
    }
    m
}

/// Depth-first enumeration of all reduced words of length 1..=max_len,
/// optionally restricted to a fixed first letter so consumers can partition
/// work across 2k independent streams.
pub struct WordIter {
    k: usize,
    max_len: usize,
    fixed_first: Option<i32>,
    word: Vec<i32>,
    started: bool,
    done: bool,
}

impl WordIter {
    pub fn new(k: usize, max_len: usize) -> Self {
        WordIter {
            k,
            max_len,
            fixed_first: None,
            word: Vec::with_capacity(max_len),
            started: false,
            done: k == 0 || max_len == 0,
        }
    }

    pub fn starting_with(k: usize, max_len: usize, first: i32) -> Self {
        debug_assert!(first != 0 && first.unsigned_abs() as usize <= k);
        WordIter {
            k,
            max_len,
            fixed_first: Some(first),
            word: Vec::with_capacity(max_len),
            started: false,
            done: k == 0 || max_len == 0,
        }
    }

    fn smallest_allowed(&self, prev: Option<i32>) -> i32 {
        for key in 0..2 * self.k as u32 {
            let l = letter_from_key(key);
            if prev != Some(-l) {
                return l;
            }
        }
        unreachable!("k >= 1 leaves at least one allowed letter")
    }

    fn next_allowed(&self, cur: i32, prev: Option<i32>) -> Option<i32> {
        for key in letter_key(cur) + 1..2 * self.k as u32 {
            let l = letter_from_key(key);
            if prev != Some(-l) {
                return Some(l);
            }
        }
        None
    }

    /// Advance to the next word in DFS order; false when exhausted.
    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            let first = self.fixed_first.unwrap_or_else(|| letter_from_key(0));
            self.word.push(first);
            return true;
        }
        if self.word.len() < self.max_len {
            let last = *self.word.last().unwrap();
            let l = self.smallest_allowed(Some(last));
            self.word.push(l);
            return true;
        }
        loop {
            let cur = match self.word.pop() {
                Some(c) => c,
                None => return false,
            };
            if self.word.is_empty() && self.fixed_first.is_some() {
                return false;
            }
            let prev = self.word.last().copied();
            if let Some(l) = self.next_allowed(cur, prev) {
                self.word.push(l);
                return true;
            }
            if self.word.is_empty() {
                return false;
            }
        }
    }

    /// Internal-iteration form that avoids per-word allocation.
    pub fn walk(mut self, mut f: impl FnMut(&[i32])) {
        if self.done {
            return;
        }
        while self.advance() {
            f(&self.word);
        }
        self.done = true;
    }
}

impl Iterator for WordIter {
    type Item = GroupWord;

    fn next(&mut self) -> Option<GroupWord> {
        if self.done {
            return None;
        }
        if self.advance() {
            Some(GroupWord::from_reduced(self.word.clone()))
        } else {
            self.done = true;
            None
        }
    }
}

/// All reduced words of length 1..=max_len, each exactly once
/// (2k·(2k−1)^{n−1} words at length n).
pub fn enumerate_words(k: usize, max_len: usize) -> WordIter {
    WordIter::new(k, max_len)
}

/// Unoriented conjugacy class of a hyperbolic group element, i.e. a closed
/// geodesic of the quotient; `canonical` is the lexicographic minimum over
/// all rotations of the cyclic word and of its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjClass {
    pub canonical: GroupWord,
    pub primitive_flag: bool,
}

/// Lexicographic minimum (letter order `letter_key`) over all rotations of
/// `w` and of `w.inverse()`. Input must be cyclically reduced.
pub fn canonical_form(w: &GroupWord) -> GroupWord {
    debug_assert!(w.is_cyclically_reduced());
    let n = w.len();
    if n == 0 {
        return w.clone();
    }
    let inv = w.inverse();
    let mut best: Option<GroupWord> = None;
    for r in 0..n {
        for cand in [w.rotated(r), inv.rotated(r)] {
            match &best {
                Some(b) if !key_less(cand.letters(), b.letters()) => {}
                _ => best = Some(cand),
            }
        }
    }
    best.unwrap()
}

fn is_primitive_word(letters: &[i32]) -> bool {
    let n = letters.len();
    for d in 1..n {
        if n % d != 0 {
            continue;
        }
        // period d <=> rotation by d fixes the word <=> proper power
        if (0..n).all(|i| letters[i] == letters[(i + d) % n]) {
            return false;
        }
    }
    true
}

/// All primitive unoriented conjugacy classes with canonical word length in
/// 1..=max_len whose canonical form starts with `first` (canonical words
/// always start with a positive letter). Partition piece of
/// [`primitive_classes`] for parallel consumption.
pub fn primitive_classes_starting_with(k: usize, max_len: usize, first: i32) -> Vec<ConjClass> {
    let mut out = Vec::new();
    if first <= 0 {
        // canonical forms start with the smallest letter of the class,
        // which is always positive (the inverse word flips signs)
        return out;
    }
    WordIter::starting_with(k, max_len, first).walk(|letters| {
        if letters.len() > 1 && letters[0] == -letters[letters.len() - 1] {
            return; // not cyclically reduced
        }
        let w = GroupWord::from_reduced(letters.to_vec());
        if canonical_form(&w).letters() != letters {
            return; // some rotation/inverse is smaller: counted elsewhere
        }
        if !is_primitive_word(letters) {
            return;
        }
        out.push(ConjClass {
            canonical: w,
            primitive_flag: true,
        });
    });
    out
}

/// All primitive unoriented conjugacy classes (closed geodesics) of word
/// length 1..=max_len, each exactly once, sorted by (length, letter order).
pub fn primitive_classes(k: usize, max_len: usize) -> Vec<ConjClass> {
    let mut out = Vec::new();
    for i in 1..=k as i32 {
        out.extend(primitive_classes_starting_with(k, max_len, i));
    }
    out.sort_by(|a, b| {
        let (wa, wb) = (a.canonical.letters(), b.canonical.letters());
        wa.len().cmp(&wb.len()).then_with(|| {
            for (&x, &y) in wa.iter().zip(wb.iter()) {
                let c = letter_key(x).cmp(&letter_key(y));
                if c != core::cmp::Ordering::Equal {
                    return c;
                }
            }
            core::cmp::Ordering::Equal
        })
    });
    out
}

/// Symmetric Schottky group on k generators: 2k circles orthogonal to the
/// unit circle, centers at angles jπ/k, each disk subtending the angle
/// π/k − angle_gap seen from the origin. Generator i maps the exterior of
/// the disk at angle (i−1)π/k onto the interior of the antipodal disk.
pub fn build_symmetric_schottky(k: usize, angle_gap: f64) -> Result<GeneratorSystem, GroupsError> {
    if k < 1 || !angle_gap.is_finite() {
        return Err(GroupsError::NotSchottky);
    }
    let step = PI / k as f64;
    if angle_gap <= 0.0 || angle_gap >= step {
        // beta >= step/2 makes neighbouring closed disks meet on the unit
        // circle; beta <= 0 is no disk at all
        return Err(GroupsError::NotSchottky);
    }
    let beta = (step - angle_gap) / 2.0;
    let s = 1.0 / beta.cos();
    let rho = beta.tan();
    let mut generators = Vec::with_capacity(k);
    let mut pairing = Vec::with_capacity(k);
    for i in 0..k {
        let alpha = i as f64 * step;
        let c1 = Complex64::from_polar(s, alpha);
        let c2 = -c1;
        // reflection in the circle (c1, rho) followed by reflection in the
        // perpendicular bisector of [c1, c2]: z -> (-s e^{ia} z + e^{2ia})/(z - s e^{ia})
        let e_a = Complex64::from_polar(1.0, alpha);
        let g = MoebiusMap::new(
            -s * e_a,
            e_a * e_a,
            Complex64::new(1.0, 0.0),
            -s * e_a,
        )
        .expect("schottky generator is nondegenerate");
        generators.push(g);
        pairing.push((Circle::new(c1, rho), Circle::new(c2, rho)));
    }
    let sys = GeneratorSystem {
        generators,
        pairing,
        schottky_flag: true,
    };
    if !verify_ping_pong(&sys, 64) {
        return Err(GroupsError::NotSchottky);
    }
    Ok(sys)
}

/// Numerical ping-pong check for Schottky systems: every letter must send
/// boundary samples of every other circle strictly inside its target circle.
pub fn verify_ping_pong(sys: &GeneratorSystem, samples: usize) -> bool {
    let k = sys.k() as i32;
    let letters: Vec<i32> = (1..=k).chain((1..=k).map(|i| -i)).collect();
    for &l in &letters {
        let m = sys.letter_matrix(l);
        let tgt = sys.target_circle(l);
        for &j in &letters {
            if j == l {
                continue; // the source boundary maps onto the target boundary
            }
            let cj = sys.source_circle(j);
            for t in 0..samples {
                let z = cj.point_at(t as f64 / samples as f64 * 2.0 * PI);
                match m.apply_c(z) {
                    ExtendedComplex::Finite(w) => {
                        if (w - tgt.center).norm() >= tgt.radius {
                            return false;
                        }
                    }
                    ExtendedComplex::Infinity => return false,
                }
            }
        }
    }
    true
}

/// Fuchsian surface group of the regular hyperbolic octagon of area 4π.
///
/// Derivation of the frozen constants: area 4π forces vertex angles π/4
/// (Gauss–Bonnet: (8−2)π − 8·(π/4) = 4π). The right triangle cut from the
/// octagon by the center O, an edge midpoint M and an adjacent vertex V has
/// angles π/8 at O, π/2 at M, π/8 at V, so cosh(OM) = cos(π/8)/sin(π/8) =
/// cot(π/8) = 1 + √2. In the disk model the edge through M at Euclidean
/// radius r₀ = tanh(OM/2) lies on the circle orthogonal to the unit circle
/// with |center| = (r₀ + 1/r₀)/2 and radius (1/r₀ − r₀)/2.
///
/// Circle C_j is centered at |center|·e^{iπ(j−1)/4} with C₁ on the positive
/// real axis. Generator 𝒜₁ maps the exterior of C₁ onto the interior of C₃
/// (reflection in C₁ followed by reflection in the diagonal between them),
/// ℬ₁: C₂→C₄, 𝒜₂: C₅→C₇, ℬ₂: C₆→C₈. The side pairing closes up around a
/// single vertex cycle of all eight vertices, giving the genus-2 relator
/// checked in the tests.
pub fn build_octagon_fuchsian() -> GeneratorSystem {
    let s0 = OCTAGON_CENTER_DIST;
    let circles: Vec<Circle> = (0..8)
        .map(|j| {
            Circle::new(
                Complex64::from_polar(s0, j as f64 * PI / 4.0),
                OCTAGON_RADIUS,
            )
        })
        .collect();
    let gen_for = |j: usize| -> MoebiusMap {
        let alpha = (j as f64 - 1.0) * PI / 4.0;
        let c = Complex64::from_polar(s0, alpha);
        // reflection in C_j then in the line through the origin at angle
        // alpha + π/4 (which swaps C_j and C_{j+2})
        let e = Complex64::from_polar(1.0, 2.0 * (alpha + PI / 4.0));
        MoebiusMap::new(e * c.conj(), -e, Complex64::new(1.0, 0.0), -c)
            .expect("octagon generator is nondegenerate")
    };
    let generators = vec![gen_for(1), gen_for(2), gen_for(5), gen_for(6)];
    let pairing = vec![
        (circles[0], circles[2]),
        (circles[1], circles[3]),
        (circles[4], circles[6]),
        (circles[5], circles[7]),
    ];
    GeneratorSystem {
        generators,
        pairing,
        schottky_flag: false,
    }
}

/// Elliptic rotation by `theta` about the axis through ±i, normalized so
/// that small positive angles move the real line in the −x direction: the
/// rotation w ↦ e^{iθ}w conjugated through z ↦ (z−i)/(z+i), with the sign
/// of θ fixed by that orientation. In matrix form
/// [[cos(θ/2), −sin(θ/2)], [sin(θ/2), cos(θ/2)]].
pub fn rotation_fixing_pm_i(theta: f64) -> MoebiusMap {
    let (sin, cos) = (theta / 2.0).sin_cos();
    MoebiusMap {
        a: Complex64::new(cos, 0.0),
        b: Complex64::new(-sin, 0.0),
        c: Complex64::new(sin, 0.0),
        d: Complex64::new(cos, 0.0),
    }
}

/// Quasifuchsian bending of the octagon group: conjugate the first two
/// generators (𝒜₁, ℬ₁) by the rotation fixing ±i and replace their pairing
/// circles C₁..C₄ by the rotated images. The unbent generators 𝒜₂, ℬ₂ keep
/// their circles.
pub fn bend(base: &GeneratorSystem, theta: f64) -> Result<GeneratorSystem, GroupsError> {
    if !(theta.abs() <= MAX_BEND_ANGLE) {
        return Err(GroupsError::BendAngleOutOfRange);
    }
    debug_assert_eq!(base.generators.len(), 4, "bend expects the octagon system");
    let m = rotation_fixing_pm_i(theta);
    let m_inv = m.inverse();
    let conj = |g: &MoebiusMap| m.compose(g).compose(&m_inv);
    let move_pair = |p: &(Circle, Circle)| (image_circle(&m, &p.0), image_circle(&m, &p.1));
    let generators = vec![
        conj(&base.generators[0]),
        conj(&base.generators[1]),
        base.generators[2],
        base.generators[3],
    ];
    let pairing = vec![
        move_pair(&base.pairing[0]),
        move_pair(&base.pairing[1]),
        base.pairing[2],
        base.pairing[3],
    ];
    Ok(GeneratorSystem {
        generators,
        pairing,
        schottky_flag: false,
    })
}
