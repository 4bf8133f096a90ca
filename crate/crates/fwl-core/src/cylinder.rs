//! Phase-space dynamics of the hyperbolic cylinder: the symbol
//! p = mu zeta^2 + 2 r zeta + eta^2 - 1 (mu = 1 - r^2) on
//! (-1,1)_r x S^1_y with momenta (zeta, eta), its Hamiltonian flow,
//! trapped-set classification, the radial points at the horizon, explicit
//! escape functions with their monotonicity identities, and the exact
//! resonance lattice of the cylinder for cross-checking the zeta machinery.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::zeta::{Rect, ZeroList, ZetaParams};

/// On-shell tolerance for operations that require |p| small.
pub const ON_SHELL_TOL: f64 = 1e-6;

/// Default half-width of the band |mu| < eps where the sign rule
/// -r(zeta - r) separates the two characteristic sheets.
pub const DEFAULT_EPS_BAND: f64 = 0.2;

/// Trapping classification defaults: escape declared at |r| > 1.5 or
/// |zeta| > 1e3, integration horizon 30 time units.
pub const DEFAULT_ESCAPE_RADIUS: f64 = 1.5;
pub const DEFAULT_ZETA_ESCAPE: f64 = 1e3;
pub const DEFAULT_T_MAX: f64 = 30.0;

/// Trajectory truncation thresholds (well past any classification radius;
/// reaching them means the trajectory left for the mu < 0 ends).
const BLOWUP_R: f64 = 10.0;
const BLOWUP_ZETA: f64 = 1e10;

/// Neighborhood constant: the fhat derivative bound is checked wherever
/// max(phi_+, phi_-) >= C^2 * (h/htilde), C = 4.
pub const FHAT_NEIGHBORHOOD_C: f64 = 4.0;

/// Lower bound c the fhat derivative must clear inside the checked zone
/// (validated near the trapped set before freezing).
pub const FHAT_LOWER_C: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CylinderError {
    /// The operation needs |p(pt)| < 1e-6.
    OffShell { p: f64 },
}

impl core::fmt::Display for CylinderError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CylinderError::OffShell { p } => {
                write!(f, "point is off the energy surface: p = {}", p)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CylinderError {}

/// Point of the cylinder phase space. `y` is circle-valued but stored as a
/// real representative so trajectories can wind; `mu = 1 - r^2` is always
/// derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub r: f64,
    pub y: f64,
    pub zeta: f64,
    pub eta: f64,
}

impl PhasePoint {
    pub fn new(r: f64, y: f64, zeta: f64, eta: f64) -> Self {
        PhasePoint { r, y, zeta, eta }
    }

    pub fn mu(&self) -> f64 {
        1.0 - self.r * self.r
    }

    /// Representative of y in [0, 2pi).
    pub fn wrapped_y(&self) -> f64 {
        let w = self.y % core::f64::consts::TAU;
        if w < 0.0 {
            w + core::f64::consts::TAU
        } else {
            w
        }
    }
}

/// The principal symbol p = mu zeta^2 + 2 r zeta + eta^2 - 1.
pub fn symbol_p(pt: &PhasePoint) -> f64 {
    pt.mu() * pt.zeta * pt.zeta + 2.0 * pt.r * pt.zeta + pt.eta * pt.eta - 1.0
}

/// Hamiltonian vector field of p in (r, y, zeta, eta) order:
/// (2(mu zeta + r), 2 eta, 2 zeta (r zeta - 1), 0). The zero fourth
/// component is the exact conservation of eta.
pub fn hamiltonian_field(pt: &PhasePoint) -> (f64, f64, f64, f64) {
    (
        2.0 * (pt.mu() * pt.zeta + pt.r),
        2.0 * pt.eta,
        2.0 * pt.zeta * (pt.r * pt.zeta - 1.0),
        0.0,
    )
}

fn field4(s: [f64; 4]) -> [f64; 4] {
    let mu = 1.0 - s[0] * s[0];
    [
        2.0 * (mu * s[2] + s[0]),
        2.0 * s[3],
        2.0 * s[2] * (s[0] * s[2] - 1.0),
        0.0,
    ]
}

fn rk4_step(s: [f64; 4], h: f64) -> [f64; 4] {
    let k1 = field4(s);
    let mut s2 = [0.0; 4];
    for i in 0..4 {
        s2[i] = s[i] + 0.5 * h * k1[i];
    }
    let k2 = field4(s2);
    for i in 0..4 {
        s2[i] = s[i] + 0.5 * h * k2[i];
    }
    let k3 = field4(s2);
    for i in 0..4 {
        s2[i] = s[i] + h * k3[i];
    }
    let k4 = field4(s2);
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Fixed-step RK4 trajectory. Samples are stored with t strictly
/// increasing in both time directions (negative `t_total` integrates
/// backward and reverses the record).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub samples: Vec<(f64, PhasePoint)>,
    /// max |p(sample) - p(start)| over the retained samples
    pub energy_drift: f64,
    /// trajectory truncated at |r| > 10 or |zeta| > 1e10; the offending
    /// sample is discarded (expected behavior toward the mu < 0 ends)
    pub escaped: bool,
}

pub fn integrate_flow(start: &PhasePoint, t_total: f64, dt: f64) -> FlowTrajectory {
    assert!(dt > 0.0, "step size must be positive");
    assert!(
        t_total.abs() / dt < 1e8,
        "step count budget exceeded: |T|/dt must stay below 1e8"
    );
    let n_steps = (t_total.abs() / dt).round() as usize;
    let h = dt * t_total.signum();
    let p0 = symbol_p(start);
    let mut state = [start.r, start.y, start.zeta, start.eta];
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push((0.0, *start));
    let mut drift = 0.0f64;
    let mut escaped = false;
    for k in 1..=n_steps {
        state = rk4_step(state, h);
        if state[0].abs() > BLOWUP_R || state[2].abs() > BLOWUP_ZETA {
            escaped = true;
            break;
        }
        let pt = PhasePoint::new(state[0], state[1], state[2], state[3]);
        drift = drift.max((symbol_p(&pt) - p0).abs());
        samples.push((k as f64 * h, pt));
    }
    if t_total < 0.0 {
        samples.reverse();
    }
    FlowTrajectory {
        samples,
        energy_drift: drift,
        escaped,
    }
}

/// Trapped-set membership by set, not by time direction of boundedness:
/// `ForwardTrapped` is the forward trapped set Gamma_+ = {zeta = 0}, whose
/// trajectories converge to the trapped set K backward in time and leave
/// through the horizon forward; `BackwardTrapped` is Gamma_- =
/// {zeta = -2r/mu}, bounded forward. (The observational rule is therefore:
/// bounded both ways -> Trapped, bounded backward only -> ForwardTrapped,
/// bounded forward only -> BackwardTrapped.)
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrappingClass {
    Trapped,
    ForwardTrapped,
    BackwardTrapped,
    Escaping,
}

fn stays_bounded(start: [f64; 4], t_max: f64, dir: f64, escape_radius: f64) -> bool {
    const DT: f64 = 1e-2;
    let n = (t_max / DT).ceil() as usize;
    let mut s = start;
    for _ in 0..n {
        s = rk4_step(s, dir * DT);
        if s[0].abs() > escape_radius || s[2].abs() > DEFAULT_ZETA_ESCAPE {
            return false;
        }
    }
    true
}

/// Classify an energy-surface point by integrating both time directions up
/// to `t_max` with escape thresholds |r| > escape_radius, |zeta| > 1e3.
pub fn classify_trapping(
    pt: &PhasePoint,
    t_max: f64,
    escape_radius: f64,
) -> Result<TrappingClass, CylinderError> {
    let p = symbol_p(pt);
    if p.abs() >= ON_SHELL_TOL {
        return Err(CylinderError::OffShell { p });
    }
    let s = [pt.r, pt.y, pt.zeta, pt.eta];
    let fwd = stays_bounded(s, t_max, 1.0, escape_radius);
    let bwd = stays_bounded(s, t_max, -1.0, escape_radius);
    Ok(match (fwd, bwd) {
        (true, true) => TrappingClass::Trapped,
        (false, true) => TrappingClass::ForwardTrapped,
        (true, false) => TrappingClass::BackwardTrapped,
        (false, false) => TrappingClass::Escaping,
    })
}

/// Closed-form membership test against the same classes: K is
/// {r = zeta = 0}, Gamma_+ is {zeta = 0}, Gamma_- is {mu zeta + 2r = 0}.
pub fn analytic_trapping(pt: &PhasePoint) -> Result<TrappingClass, CylinderError> {
    let p = symbol_p(pt);
    if p.abs() >= ON_SHELL_TOL {
        return Err(CylinderError::OffShell { p });
    }
    const SET_TOL: f64 = 1e-12;
    let on_plus = pt.zeta.abs() <= SET_TOL;
    let on_minus = (pt.mu() * pt.zeta + 2.0 * pt.r).abs() <= SET_TOL;
    Ok(match (on_plus, on_minus) {
        (true, true) => TrappingClass::Trapped,
        (true, false) => TrappingClass::ForwardTrapped,
        (false, true) => TrappingClass::BackwardTrapped,
        (false, false) => TrappingClass::Escaping,
    })
}

/// The quadratic escape function f00 = r zeta + r^2/2 and its exact flow
/// derivative H_p f00 = 2 zeta^2 + 2 mu zeta r + 2 r^2 (symbolic, not a
/// finite difference); the derivative dominates zeta^2 + r^2 whenever
/// |mu| <= 1, since the difference is (zeta + mu r)^2 + r^2 (1 - mu^2).
pub fn escape_f00(pt: &PhasePoint) -> (f64, f64) {
    let mu = pt.mu();
    let value = pt.r * pt.zeta + 0.5 * pt.r * pt.r;
    let derivative =
        2.0 * pt.zeta * pt.zeta + 2.0 * mu * pt.zeta * pt.r + 2.0 * pt.r * pt.r;
    (value, derivative)
}

/// Squared distances to the two trapped-set branches with their exact flow
/// derivatives: phi_+ = zeta^2 decays along the flow near K while
/// phi_- = (mu zeta + 2r)^2 grows, as long as r zeta < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiPair {
    pub plus: f64,
    pub minus: f64,
    pub d_plus: f64,
    pub d_minus: f64,
}

pub fn phi_pm(pt: &PhasePoint) -> PhiPair {
    let mu = pt.mu();
    let plus = pt.zeta * pt.zeta;
    let w = mu * pt.zeta + 2.0 * pt.r;
    let minus = w * w;
    let rz = pt.r * pt.zeta;
    PhiPair {
        plus,
        minus,
        d_plus: 4.0 * plus * (rz - 1.0),
        d_minus: 4.0 * minus * (1.0 - rz),
    }
}

/// Logarithmic flattening of the phi pair at scale q = h/htilde.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FhatEval {
    pub value: f64,
    /// H_p fhat = 4 (1 - r zeta) (phi_-/(q+phi_-) + phi_+/(q+phi_+))
    pub derivative: f64,
    /// whether max(phi_+, phi_-) >= C^2 q, i.e. the point is outside the
    /// sqrt(q)-neighborhood of the trapped set where the bound is asserted
    pub in_checked_zone: bool,
    /// derivative >= FHAT_LOWER_C, reported only meaningfully in the zone
    pub bound_ok: bool,
}

pub(crate) fn fhat_value(q: f64, plus: f64, minus: f64) -> f64 {
    (q + minus).ln() - (q + plus).ln()
}

pub fn fhat(pt: &PhasePoint, h_over_htilde: f64) -> FhatEval {
    assert!(h_over_htilde > 0.0, "scale ratio must be positive");
    let q = h_over_htilde;
    let phi = phi_pm(pt);
    let value = fhat_value(q, phi.plus, phi.minus);
    let derivative = 4.0
        * (1.0 - pt.r * pt.zeta)
        * (phi.minus / (q + phi.minus) + phi.plus / (q + phi.plus));
    let in_checked_zone =
        phi.plus.max(phi.minus) >= FHAT_NEIGHBORHOOD_C * FHAT_NEIGHBORHOOD_C * q;
    FhatEval {
        value,
        derivative,
        in_checked_zone,
        bound_ok: derivative >= FHAT_LOWER_C,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Linearization of the rescaled flow at the radial points L_+/L_- on the
/// horizon, in coordinates (mu, rho, eta_hat).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialLinearization {
    pub sign: Sign,
    pub matrix: [[f64; 3]; 3],
    pub eigenvalues: [f64; 3],
}

/// The radial points sit at r = 1 with |zeta| = infinity: L_+ (source) at
/// zeta -> -infinity, L_- (sink) at zeta -> +infinity. In the chart
/// rho = -1/zeta (resp. 1/zeta), eta_hat = -eta/zeta (resp. eta/zeta), with
/// time rescaled by rho, the flow is linearized by
/// [[+-4, -4, 0], [0, +-2, 0], [0, 0, +-2]]
/// with eigenvectors d_mu, 2 d_mu +- d_rho, d_eta_hat.
pub fn radial_linearization(sign: Sign) -> RadialLinearization {
    let s = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    RadialLinearization {
        sign,
        matrix: [[4.0 * s, -4.0, 0.0], [0.0, 2.0 * s, 0.0], [0.0, 0.0, 2.0 * s]],
        eigenvalues: [4.0 * s, 2.0 * s, 2.0 * s],
    }
}

/// Exact rescaled field near L_+/L_- in the chart (mu, rho, eta_hat) with
/// r = +sqrt(1 - mu). For L_+ (rho = -1/zeta, d/dtau = rho d/dt):
/// mu' = 4r(mu - r rho), rho' = 2 rho (r + rho), eta_hat' = 2 eta_hat
/// (r + rho); for L_- (rho = 1/zeta): mu' = -4r(mu + r rho),
/// rho' = 2 rho (rho - r), eta_hat' = 2 eta_hat (rho - r). Linearizing at
/// the origin reproduces [`radial_linearization`] exactly.
pub fn radial_rescaled_field(sign: Sign, state: [f64; 3]) -> [f64; 3] {
    let [mu, rho, eta_hat] = state;
    let r = (1.0 - mu).sqrt();
    match sign {
        Sign::Plus => [
            4.0 * r * (mu - r * rho),
            2.0 * rho * (r + rho),
            2.0 * eta_hat * (r + rho),
        ],
        Sign::Minus => [
            -4.0 * r * (mu + r * rho),
            2.0 * rho * (rho - r),
            2.0 * eta_hat * (rho - r),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaClass {
    SigmaPlus,
    SigmaMinus,
    OffCharacteristic,
}

/// Sheet assignment near the horizon. Inside |mu| < eps the sign of
/// -r (zeta - r) separates the sheets; Sigma_- does not meet {mu >= eps},
/// so points there are definitely Sigma_+; for mu <= -eps the same sign
/// rule is only a connected-component heuristic and is flagged as such.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaVerdict {
    pub class: SigmaClass,
    pub heuristic: bool,
}

pub fn sigma_split(pt: &PhasePoint, eps: f64) -> SigmaVerdict {
    assert!(eps > 0.0, "band width must be positive");
    if symbol_p(pt).abs() >= ON_SHELL_TOL {
        return SigmaVerdict {
            class: SigmaClass::OffCharacteristic,
            heuristic: false,
        };
    }
    let mu = pt.mu();
    if mu >= eps {
        return SigmaVerdict {
            class: SigmaClass::SigmaPlus,
            heuristic: false,
        };
    }
    let discriminator = -pt.r * (pt.zeta - pt.r);
    let class = if discriminator >= 0.0 {
        SigmaClass::SigmaPlus
    } else {
        SigmaClass::SigmaMinus
    };
    SigmaVerdict {
        class,
        // outside the band the sign rule is extrapolation; on the dividing
        // line {zeta = r} the sign itself is degenerate
        heuristic: mu <= -eps || discriminator == 0.0,
    }
}

/// Exact resonance lattice of a cylinder with neck length ell: zeros of
/// prod_k (1 - e^{-(s+k) ell}) at s = -k + 2 pi i m / ell, k >= 0, m
/// integer, multiplicity 1, restricted to the strict interior of `region`
/// and sorted like find_zeros output (by im, then re).
pub fn exact_zero_lattice(ell: f64, region: &Rect) -> ZeroList {
    assert!(ell > 0.0, "neck length must be positive");
    let spacing = core::f64::consts::TAU / ell;
    let mut zeros = Vec::new();
    let k_lo = if region.re_max >= 0.0 {
        0i64
    } else {
        (-region.re_max).ceil() as i64
    };
    let k_hi = (-region.re_min).floor() as i64;
    for k in k_lo..=k_hi {
        let re = -(k as f64);
        if !(region.re_min < re && re < region.re_max) {
            continue;
        }
        let m_lo = (region.im_min / spacing).floor() as i64;
        let m_hi = (region.im_max / spacing).ceil() as i64;
        for m in m_lo..=m_hi {
            let im = spacing * m as f64;
            if region.im_min < im && im < region.im_max {
                zeros.push((Complex64::new(re, im), 1u32));
            }
        }
    }
    zeros.sort_by(|a, b| a.0.im.total_cmp(&b.0.im).then(a.0.re.total_cmp(&b.0.re)));
    let k_max = k_hi.max(0) as u32;
    ZeroList {
        zeros,
        region: *region,
        params: ZetaParams::new(k_max, k_max as usize + 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::{find_zeros, LengthSpectrum};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TAU: f64 = core::f64::consts::TAU;

    /// eta >= 0 solving p = 0 for the given (r, zeta); the box tests keep
    /// 1 - mu zeta^2 - 2 r zeta positive.
    fn on_shell_eta(r: f64, zeta: f64) -> f64 {
        let mu = 1.0 - r * r;
        let e2 = 1.0 - mu * zeta * zeta - 2.0 * r * zeta;
        assert!(e2 >= 0.0, "no real eta at r={r}, zeta={zeta}");
        e2.sqrt()
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(symbol_p(&PhasePoint::new(0.0, 1.3, 0.0, 1.0)), 0.0);
        assert_eq!(symbol_p(&PhasePoint::new(0.0, -2.0, 0.0, 0.0)), -1.0);
        // the backward branch zeta = -2r/mu with |eta| = 1 is on-shell
        let pt = PhasePoint::new(0.5, 0.0, -2.0 * 0.5 / 0.75, 1.0);
        assert!(symbol_p(&pt).abs() < 1e-15);
    }

    #[test]
    fn field_matches_hamiltons_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        for _ in 0..1000 {
            let pt = PhasePoint::new(
                rng.gen_range(-0.95..0.95),
                rng.gen_range(0.0..TAU),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-2.0..2.0),
            );
            let (dr, dy, dzeta, deta) = hamiltonian_field(&pt);
            let pp = |r: f64, zeta: f64, eta: f64| {
                symbol_p(&PhasePoint::new(r, pt.y, zeta, eta))
            };
            let dp_dzeta =
                (pp(pt.r, pt.zeta + h, pt.eta) - pp(pt.r, pt.zeta - h, pt.eta)) / (2.0 * h);
            let dp_deta =
                (pp(pt.r, pt.zeta, pt.eta + h) - pp(pt.r, pt.zeta, pt.eta - h)) / (2.0 * h);
            let dp_dr =
                (pp(pt.r + h, pt.zeta, pt.eta) - pp(pt.r - h, pt.zeta, pt.eta)) / (2.0 * h);
            assert!((dr - dp_dzeta).abs() < 1e-6);
            assert!((dy - dp_deta).abs() < 1e-6);
            assert!((dzeta + dp_dr).abs() < 1e-6);
            assert_eq!(deta, 0.0); // y never appears in p
        }
    }

    #[test]
    fn trapped_points_only_rotate() {
        for eta in [1.0, -1.0] {
            let (dr, dy, dzeta, deta) = hamiltonian_field(&PhasePoint::new(0.0, 0.7, 0.0, eta));
            assert_eq!((dr, dzeta, deta), (0.0, 0.0, 0.0));
            assert_eq!(dy, 2.0 * eta);
        }
    }

    #[test]
    fn mu_strictly_decreases_at_horizon() {
        for r in [1.0, -1.0] {
            for zeta in [-5.0, 0.0, 0.3, 7.0] {
                let pt = PhasePoint::new(r, 0.0, zeta, 0.0);
                let (dr, _, _, _) = hamiltonian_field(&pt);
                let dmu = -2.0 * r * dr;
                assert_eq!(dmu, -4.0 * r * r);
                assert_eq!(dmu, -4.0);
            }
        }
    }

    #[test]
    fn trapped_line_is_invariant() {
        let traj = integrate_flow(&PhasePoint::new(0.0, 0.0, 0.0, 1.0), 10.0, 1e-3);
        assert!(!traj.escaped);
        for (_, pt) in &traj.samples {
            assert!(pt.r.abs() < 1e-8 && pt.zeta.abs() < 1e-8);
        }
        // y advances linearly at speed 2
        let (t_end, last) = traj.samples.last().unwrap();
        assert!((last.y - 2.0 * t_end).abs() < 1e-9);
        assert!(traj.energy_drift < 1e-12);
    }

    #[test]
    fn forward_branch_converges_backward_and_escapes_forward() {
        let start = PhasePoint::new(0.1, 0.0, 0.0, 1.0);
        let back = integrate_flow(&start, -10.0, 1e-3);
        assert!(!back.escaped);
        // samples ascend in t; the earliest is the deep-backward endpoint
        assert!(back.samples.windows(2).all(|w| w[0].0 < w[1].0));
        let (t0, earliest) = back.samples.first().unwrap();
        assert_eq!(*t0, -10.0);
        assert!(earliest.r.abs() < 1e-8, "r = {}", earliest.r);
        assert!(earliest.zeta.abs() < 1e-12);

        let fwd = integrate_flow(&start, 10.0, 1e-3);
        assert!(fwd.escaped, "r grows like e^(2t) and must truncate");
        let (_, last) = fwd.samples.last().unwrap();
        assert!(last.r > 1.5);
    }

    #[test]
    fn energy_drift_stays_below_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let (r, zeta) = loop {
                let r = rng.gen_range(-0.7..0.7);
                let zeta = rng.gen_range(-0.8..0.8);
                if 1.0 - (1.0 - r * r) * zeta * zeta - 2.0 * r * zeta >= 0.0 {
                    break (r, zeta);
                }
            };
            let eta = on_shell_eta(r, zeta) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let start = PhasePoint::new(r, rng.gen_range(0.0..TAU), zeta, eta);
            let traj = integrate_flow(&start, 10.0, 1e-3);
            assert!(
                traj.energy_drift < 1e-8,
                "drift {} from {start:?}",
                traj.energy_drift
            );
        }
    }

    #[test]
    fn sample_grid_shape() {
        let start = PhasePoint::new(0.0, 0.0, 0.0, 1.0);
        let traj = integrate_flow(&start, 1.0, 1e-3);
        assert_eq!(traj.samples.len(), 1001);
        assert_eq!(traj.samples[0].0, 0.0);
        assert!((traj.samples.last().unwrap().0 - 1.0).abs() < 1e-12);

        let back = integrate_flow(&start, -1.0, 1e-3);
        assert_eq!(back.samples.len(), 1001);
        assert_eq!(back.samples.last().unwrap().0, 0.0);
        assert!((back.samples[0].0 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn classify_known_points() {
        // the branch zeta = -2r/mu is transversally repelling forward, so
        // the ~1e-16 rounding offset of the constructed point grows like
        // e^{4t}; 8 time units keep it below 1e-2 while every escape here
        // needs at most ~5
        let t_max = 8.0;
        let r = DEFAULT_ESCAPE_RADIUS;
        assert_eq!(
            classify_trapping(&PhasePoint::new(0.0, 0.0, 0.0, 1.0), t_max, r).unwrap(),
            TrappingClass::Trapped
        );
        assert_eq!(
            classify_trapping(&PhasePoint::new(0.3, 0.0, 0.0, 1.0), t_max, r).unwrap(),
            TrappingClass::ForwardTrapped
        );
        let zeta = -2.0 * 0.3 / (1.0 - 0.09);
        assert_eq!(
            classify_trapping(&PhasePoint::new(0.3, 0.0, zeta, 1.0), t_max, r).unwrap(),
            TrappingClass::BackwardTrapped
        );
        let generic = PhasePoint::new(0.2, 0.0, 0.3, on_shell_eta(0.2, 0.3));
        assert_eq!(
            classify_trapping(&generic, t_max, r).unwrap(),
            TrappingClass::Escaping
        );
    }

    #[test]
    fn classify_requires_energy_surface() {
        let pt = PhasePoint::new(0.3, 0.0, 0.5, 1.0);
        assert!(symbol_p(&pt).abs() > 1e-3);
        match classify_trapping(&pt, 10.0, 1.5) {
            Err(CylinderError::OffShell { p }) => assert!((p - symbol_p(&pt)).abs() < 1e-15),
            other => panic!("expected OffShell, got {other:?}"),
        }
        assert!(analytic_trapping(&pt).is_err());
    }

    #[test]
    fn classification_agrees_with_membership_on_grid() {
        let n = 25;
        let mut total = 0;
        let mut agree = 0;
        for i in 0..n {
            for j in 0..n {
                let r = -0.6 + 1.2 * i as f64 / (n - 1) as f64;
                let zeta = -0.5 + 1.0 * j as f64 / (n - 1) as f64;
                let pt = PhasePoint::new(r, 0.0, zeta, on_shell_eta(r, zeta));
                let dynamic = classify_trapping(&pt, 12.0, 1.5).unwrap();
                let member = analytic_trapping(&pt).unwrap();
                total += 1;
                if dynamic == member {
                    agree += 1;
                } else {
                    // disagreements may only hug the separatrices
                    let d_plus = pt.zeta.abs();
                    let d_minus = (pt.mu() * pt.zeta + 2.0 * pt.r).abs();
                    assert!(
                        d_plus < 1e-3 || d_minus < 1e-3,
                        "far-off disagreement at {pt:?}: {dynamic:?} vs {member:?}"
                    );
                }
            }
        }
        assert!(
            agree as f64 >= 0.99 * total as f64,
            "agreement {agree}/{total}"
        );
    }

    #[test]
    fn f00_examples() {
        assert_eq!(escape_f00(&PhasePoint::new(0.0, 0.0, 0.0, 1.0)), (0.0, 0.0));
        let (v, d) = escape_f00(&PhasePoint::new(0.5, 0.0, 1.0, 0.0));
        assert!((v - 0.625).abs() < 1e-15);
        assert!((d - 3.25).abs() < 1e-15);
        assert!(d >= 0.25 + 1.0);
    }

    #[test]
    fn f00_derivative_dominates_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..100_000 {
            let pt = PhasePoint::new(
                rng.gen_range(-1.0..1.0),
                0.0,
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-2.0..2.0),
            );
            let (_, d) = escape_f00(&pt);
            let gap = d - (pt.zeta * pt.zeta + pt.r * pt.r);
            assert!(gap >= 0.0, "gap {gap} at {pt:?}");
            // the gap is exactly the sum of squares (zeta + mu r)^2
            // + r^2 (1 - mu^2)
            let mu = pt.mu();
            let sos = {
                let a = pt.zeta + mu * pt.r;
                a * a + pt.r * pt.r * (1.0 - mu * mu)
            };
            assert!((gap - sos).abs() <= 1e-12 * (1.0 + sos.abs()));
        }
    }

    #[test]
    fn phi_vanishes_on_its_branch() {
        let on_plus = PhasePoint::new(0.4, 0.0, 0.0, 1.0);
        let phi = phi_pm(&on_plus);
        assert_eq!(phi.plus, 0.0);
        assert_eq!(phi.d_plus, 0.0);
        assert!(phi.minus > 0.0);

        let r = 0.4;
        let on_minus = PhasePoint::new(r, 0.0, -2.0 * r / (1.0 - r * r), 1.0);
        let phi = phi_pm(&on_minus);
        assert!(phi.minus < 1e-30);
        assert!(phi.d_minus.abs() < 1e-29);
        assert!(phi.plus > 0.0);
    }

    #[test]
    fn phi_derivative_signs_and_near_k_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let pt = PhasePoint::new(
                rng.gen_range(-0.9..0.9),
                0.0,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.5..1.5),
            );
            if pt.r * pt.zeta >= 1.0 {
                continue;
            }
            let phi = phi_pm(&pt);
            if phi.plus > 0.0 {
                assert!(phi.d_plus < 0.0);
            }
            if phi.minus > 0.0 {
                assert!(phi.d_minus > 0.0);
            }
        }
        // contraction rate -4 (1 + O(r^2 + zeta^2)) near the trapped set
        for r in [-0.05f64, -0.02, 0.0, 0.01, 0.05] {
            for zeta in [-0.05f64, -0.01, 0.02, 0.05] {
                let phi = phi_pm(&PhasePoint::new(r, 0.0, zeta, 1.0));
                let rate = phi.d_plus / phi.plus;
                assert!(
                    (-4.4..=-3.6).contains(&rate),
                    "rate {rate} at r={r}, zeta={zeta}"
                );
            }
        }
    }

    #[test]
    fn fhat_examples() {
        // symmetric on the trapped set
        let k = fhat(&PhasePoint::new(0.0, 0.0, 0.0, 1.0), 1e-4);
        assert_eq!(k.value, 0.0);
        assert!(!k.in_checked_zone);

        let e = fhat(&PhasePoint::new(0.0, 0.0, 0.1, on_shell_eta(0.0, 0.1)), 1e-4);
        assert!(e.in_checked_zone);
        assert!(e.bound_ok);
        assert!((e.derivative - 7.920792079207921).abs() < 1e-12);

        // antisymmetry of the underlying value in (phi_+, phi_-)
        let (q, a, b) = (1e-3, 0.2, 0.07);
        assert_eq!(fhat_value(q, a, b), -fhat_value(q, b, a));
    }

    #[test]
    fn fhat_bound_holds_near_trapped_set() {
        for q in [1e-3, 1e-4, 1e-5] {
            for i in 0..20 {
                for j in 0..20 {
                    let r = -0.3 + 0.6 * i as f64 / 19.0;
                    let zeta = -0.3 + 0.6 * j as f64 / 19.0;
                    let ev = fhat(&PhasePoint::new(r, 0.0, zeta, 1.0), q);
                    if ev.in_checked_zone {
                        assert!(
                            ev.bound_ok,
                            "derivative {} at r={r}, zeta={zeta}, q={q}",
                            ev.derivative
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn radial_matrices_and_eigenvectors() {
        let plus = radial_linearization(Sign::Plus);
        assert_eq!(plus.matrix, [[4.0, -4.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]]);
        assert_eq!(plus.eigenvalues, [4.0, 2.0, 2.0]);
        let minus = radial_linearization(Sign::Minus);
        assert_eq!(
            minus.matrix,
            [[-4.0, -4.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, -2.0]]
        );
        assert_eq!(minus.eigenvalues, [-4.0, -2.0, -2.0]);

        // A (2, 1, 0)^T = 2 (2, 1, 0)^T for the + sign
        let v = [2.0, 1.0, 0.0];
        let mut av = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                av[i] += plus.matrix[i][j] * v[j];
            }
        }
        assert_eq!(av, [4.0, 2.0, 0.0]);
    }

    #[test]
    fn rescaled_field_linearizes_to_radial_matrix() {
        // central differences of the field at the origin
        let h = 1e-6;
        for sign in [Sign::Plus, Sign::Minus] {
            let lin = radial_linearization(sign);
            for j in 0..3 {
                let mut ep = [0.0; 3];
                ep[j] = h;
                let mut em = [0.0; 3];
                em[j] = -h;
                let fp = radial_rescaled_field(sign, ep);
                let fm = radial_rescaled_field(sign, em);
                for i in 0..3 {
                    let d = (fp[i] - fm[i]) / (2.0 * h);
                    assert!(
                        (d - lin.matrix[i][j]).abs() < 1e-6,
                        "{sign:?} entry ({i},{j}): {d}"
                    );
                }
            }
        }
    }

    #[test]
    fn rescaled_field_agrees_with_ambient_flow() {
        // chart point -> ambient point; push the ambient field through the
        // chart and the time rescale, compare against the closed form
        for (sign, rho_sign) in [(Sign::Plus, -1.0), (Sign::Minus, 1.0)] {
            for (mu, rho, eta_hat) in
                [(0.02, 0.05, 0.01), (0.1, 0.2, -0.04), (-0.03, 0.08, 0.0)]
            {
                let r = (1.0f64 - mu).sqrt();
                let zeta = rho_sign / rho;
                // eta_hat = rho_sign eta/zeta = rho eta in both charts
                let eta = eta_hat / rho;
                let pt = PhasePoint::new(r, 0.0, zeta, eta);
                let (dr, _, dzeta, _) = hamiltonian_field(&pt);
                let dmu_dt = -2.0 * r * dr;
                // rho = rho_sign/zeta, eta_hat = rho_sign eta/zeta with eta
                // conserved, so both derivatives carry -zeta'/zeta^2
                let drho_dt = -rho_sign * dzeta / (zeta * zeta);
                let deta_hat_dt = -rho_sign * eta * dzeta / (zeta * zeta);
                let expected = radial_rescaled_field(sign, [mu, rho, eta_hat]);
                let got = [rho * dmu_dt, rho * drho_dt, rho * deta_hat_dt];
                for i in 0..3 {
                    assert!(
                        (got[i] - expected[i]).abs() < 1e-12 * (1.0 + expected[i].abs()),
                        "{sign:?} comp {i}: {} vs {}",
                        got[i],
                        expected[i]
                    );
                }
            }
        }
    }

    #[test]
    fn flow_map_jacobian_matches_matrix_exponential() {
        // RK4 flow of the rescaled field over dt = 1e-2, Jacobian by
        // central differences, against exp(dt A) for the block-triangular A
        let dt = 1e-2;
        let h = 1e-4;
        let steps = 10;
        let sub = dt / steps as f64;
        let flow = |sign: Sign, x0: [f64; 3]| -> [f64; 3] {
            let mut x = x0;
            for _ in 0..steps {
                let k1 = radial_rescaled_field(sign, x);
                let mut x2 = [0.0; 3];
                for i in 0..3 {
                    x2[i] = x[i] + 0.5 * sub * k1[i];
                }
                let k2 = radial_rescaled_field(sign, x2);
                for i in 0..3 {
                    x2[i] = x[i] + 0.5 * sub * k2[i];
                }
                let k3 = radial_rescaled_field(sign, x2);
                for i in 0..3 {
                    x2[i] = x[i] + sub * k3[i];
                }
                let k4 = radial_rescaled_field(sign, x2);
                for i in 0..3 {
                    x[i] += sub / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            x
        };
        for sign in [Sign::Plus, Sign::Minus] {
            let s = match sign {
                Sign::Plus => 1.0,
                Sign::Minus => -1.0,
            };
            let (a, b, d) = (4.0 * s, -4.0, 2.0 * s);
            let ea = (a * dt).exp();
            let ed = (d * dt).exp();
            let expected = [
                [ea, b * (ea - ed) / (a - d), 0.0],
                [0.0, ed, 0.0],
                [0.0, 0.0, ed],
            ];
            for j in 0..3 {
                let mut xp = [0.0; 3];
                xp[j] = h;
                let mut xm = [0.0; 3];
                xm[j] = -h;
                let fp = flow(sign, xp);
                let fm = flow(sign, xm);
                for i in 0..3 {
                    let jac = (fp[i] - fm[i]) / (2.0 * h);
                    assert!(
                        (jac - expected[i][j]).abs() < 1e-4,
                        "{sign:?} ({i},{j}): {jac} vs {}",
                        expected[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn sigma_split_examples() {
        // just outside the horizon both on-shell roots exist; the small one
        // sits on Sigma_+, the large one on Sigma_-
        let r = 1.001;
        let mu = 1.0 - r * r;
        let small = (1.0 - r) / mu;
        let large = (-1.0 - r) / mu;
        assert!(large > 100.0);
        let v_small = sigma_split(&PhasePoint::new(r, 0.0, small, 0.0), DEFAULT_EPS_BAND);
        assert_eq!(v_small.class, SigmaClass::SigmaPlus);
        assert!(!v_small.heuristic);
        let v_large = sigma_split(&PhasePoint::new(r, 0.0, large, 0.0), DEFAULT_EPS_BAND);
        assert_eq!(v_large.class, SigmaClass::SigmaMinus);
        assert!(!v_large.heuristic);

        // just inside: both roots are Sigma_+ (Sigma_- lives over mu < 0)
        let r = 0.999;
        let mu = 1.0 - r * r;
        for zeta in [(1.0 - r) / mu, (-1.0 - r) / mu] {
            let v = sigma_split(&PhasePoint::new(r, 0.0, zeta, 0.0), DEFAULT_EPS_BAND);
            assert_eq!(v.class, SigmaClass::SigmaPlus, "zeta = {zeta}");
            assert!(!v.heuristic);
        }

        // interior of the cylinder: definite Sigma_+ without the sign rule
        let v = sigma_split(
            &PhasePoint::new(0.2, 0.0, 0.3, on_shell_eta(0.2, 0.3)),
            DEFAULT_EPS_BAND,
        );
        assert_eq!(v.class, SigmaClass::SigmaPlus);
        assert!(!v.heuristic);

        // beyond the band the rule is flagged
        let r = 1.2f64;
        let mu = 1.0 - r * r;
        let v = sigma_split(&PhasePoint::new(r, 0.0, (1.0 - r) / mu, 0.0), 0.2);
        assert_eq!(v.class, SigmaClass::SigmaPlus);
        assert!(v.heuristic);
        let v = sigma_split(&PhasePoint::new(r, 0.0, (-1.0 - r) / mu, 0.0), 0.2);
        assert_eq!(v.class, SigmaClass::SigmaMinus);
        assert!(v.heuristic);

        // off the energy surface
        let v = sigma_split(&PhasePoint::new(0.2, 0.0, 0.3, 1.0), DEFAULT_EPS_BAND);
        assert_eq!(v.class, SigmaClass::OffCharacteristic);
    }

    #[test]
    fn sigma_plus_crosses_horizon_downward() {
        // start inside on Sigma_+ near mu = 0 and watch mu through the
        // crossing: it must decrease strictly
        let r = 0.97;
        let mu = 1.0 - r * r;
        let zeta = (1.0 - r) / mu;
        let start = PhasePoint::new(r, 0.0, zeta, 0.0);
        assert!(symbol_p(&start).abs() < 1e-12);
        let traj = integrate_flow(&start, 2.0, 1e-4);
        let mus: Vec<f64> = traj.samples.iter().map(|(_, pt)| pt.mu()).collect();
        let crossing = mus.iter().position(|&m| m < 0.0).expect("no crossing");
        assert!(crossing > 0);
        for w in mus[crossing.saturating_sub(20)..crossing + 20].windows(2) {
            assert!(w[1] < w[0], "mu not decreasing through the horizon");
        }
    }

    #[test]
    fn lattice_examples() {
        let zl = exact_zero_lattice(TAU, &Rect::new(-0.5, 0.5, 0.5, 5.5));
        let ims: Vec<f64> = zl.zeros.iter().map(|(z, _)| z.im).collect();
        assert_eq!(ims, alloc::vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(zl.zeros.iter().all(|&(z, m)| z.re == 0.0 && m == 1));

        // ell = 1: spacing 2 pi, boundary points excluded strictly
        let zl = exact_zero_lattice(1.0, &Rect::new(-0.5, 0.5, 0.0, 7.0));
        assert_eq!(zl.zeros.len(), 1);
        assert!((zl.zeros[0].0 - Complex64::new(0.0, TAU)).norm() < 1e-15);

        // edges on lattice points are excluded
        let zl = exact_zero_lattice(TAU, &Rect::new(-0.5, 0.5, 1.0, 5.0));
        let ims: Vec<f64> = zl.zeros.iter().map(|(z, _)| z.im).collect();
        assert_eq!(ims, alloc::vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn lattice_covers_negative_heights_and_deeper_lines() {
        let region = Rect::new(-1.5, 0.5, -2.5, 0.5);
        let zl = exact_zero_lattice(TAU, &region);
        // lines k = 0, 1; heights -2, -1, 0
        let expected = [
            (-1.0, -2.0),
            (0.0, -2.0),
            (-1.0, -1.0),
            (0.0, -1.0),
            (-1.0, 0.0),
            (0.0, 0.0),
        ];
        assert_eq!(zl.zeros.len(), expected.len());
        for ((z, m), (re, im)) in zl.zeros.iter().zip(&expected) {
            assert_eq!(*m, 1);
            assert!((z.re - re).abs() < 1e-15 && (z.im - im).abs() < 1e-15);
        }
    }

    #[test]
    fn lattice_matches_zero_search() {
        let spec = LengthSpectrum::single_geodesic(TAU);
        let region = Rect::new(-1.7, 0.3, 0.4, 4.3);
        let params = ZetaParams::new(2, 3);
        let found = find_zeros(&region, &spec, &params).unwrap();
        let exact = exact_zero_lattice(TAU, &region);
        assert_eq!(found.zeros.len(), exact.zeros.len());
        // match as sets: refinement noise in im may reorder a shared height
        let mut remaining = found.zeros.clone();
        for &(z, m) in &exact.zeros {
            let hit = remaining
                .iter()
                .position(|&(w, wm)| (w - z).norm() < 1e-8 && wm == m)
                .unwrap_or_else(|| panic!("no zero within 1e-8 of {z}"));
            remaining.swap_remove(hit);
        }
    }
}
