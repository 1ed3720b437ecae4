//! Integral quantities of ground-state profiles (particle number, energy)
//! and a quadrature check of the critical convolution inequality at `d = 6`.

use crate::error::{Error, Result};
use crate::lane_emden::LaneEmdenProfile;
use crate::ode::Dimension;
use crate::real::{c, Real};
use crate::shooting::GroundStateResult;

/// Positive Gauss-Legendre abscissas and weights, 12 points on `[-1, 1]`.
const GL12_X: [f64; 6] = [
    0.125_233_408_511_468_9,
    0.367_831_498_998_180_2,
    0.587_317_954_286_617_4,
    0.769_902_674_194_304_7,
    0.904_117_256_370_474_9,
    0.981_560_634_246_719_3,
];
const GL12_W: [f64; 6] = [
    0.249_147_045_813_402_8,
    0.233_492_536_538_354_8,
    0.203_167_426_723_065_9,
    0.160_078_328_543_346_2,
    0.106_939_325_995_318_4,
    0.047_175_336_386_511_8,
];

/// 12-point Gauss-Legendre quadrature of `f` over `[a, b]`.
pub fn gl12<R: Real, F: Fn(R) -> R>(a: R, b: R, f: &F) -> R {
    let half = c::<R>(0.5);
    let mid = (a + b) * half;
    let rad = (b - a) * half;
    let mut s = R::zero();
    for i in 0..6 {
        let x = c::<R>(GL12_X[i]) * rad;
        let w = c::<R>(GL12_W[i]);
        s = s + w * (f(mid + x) + f(mid - x));
    }
    s * rad
}

/// Surface measure of the unit sphere in dimension `d`:
/// `2 pi^(d/2) / Gamma(d/2)`. Computed in `f64` internally.
pub fn surface_area<R: Real>(d: R) -> Result<R> {
    let df = d.to_f64().ok_or_else(|| Error::Domain("dimension not representable".into()))?;
    if !(df > 0.0 && df.is_finite()) {
        return Err(Error::Domain(format!("dimension must be positive, got {df}")));
    }
    let pi = std::f64::consts::PI;
    Ok(c(2.0 * pi.powf(df / 2.0) / statrs::function::gamma::gamma(df / 2.0)))
}

/// A quadrature with automatic tail handling.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult<R: Real> {
    /// Integral including the tail estimate when the tail converges.
    pub value: R,
    pub r_max_used: R,
    /// Estimated contribution beyond `r_max_used` (infinite when divergent).
    pub tail_estimate: R,
    pub converged: bool,
}

/// A radial profile usable in quadratures: either a full-system ground
/// state or a reduced-equation solve (where `V = 1 - u` by construction).
pub enum Profile<'a, R: Real> {
    Ground(&'a GroundStateResult<R>),
    Reduced(&'a LaneEmdenProfile<R>),
}

impl<R: Real> Profile<'_, R> {
    /// `(u, u', V)` by dense evaluation.
    fn at(&self, r: R) -> (R, R, R) {
        match self {
            Profile::Ground(gs) => {
                let s = gs.solution.state_at(r);
                (s.u, s.du, s.v)
            }
            Profile::Reduced(p) => {
                let [w, dw] = p.eval(r);
                (w, dw, R::one() - w)
            }
        }
    }

    /// Accepted step radii, monotone.
    fn step_radii(&self) -> Vec<R> {
        match self {
            Profile::Ground(gs) => gs.solution.sol.steps.iter().map(|s| s.0).collect(),
            Profile::Reduced(p) => p.sol.steps.iter().map(|s| s.0).collect(),
        }
    }

    /// Last radius at which the profile is positive and decreasing.
    fn r_trusted(&self) -> Result<R> {
        match self {
            Profile::Ground(gs) => gs
                .profile
                .last()
                .map(|s| s.r)
                .ok_or_else(|| Error::Domain("empty profile".into())),
            Profile::Reduced(p) => Ok(p.first_zero.unwrap_or_else(|| p.r_end())),
        }
    }

    /// Largest step radius at or below `r_hi` where the profile still tracks
    /// the far-field power law `u ~ r^-p` within 5%, measured by the
    /// two-point logarithmic slope over `[r/2, r]`. Beyond that radius the
    /// accumulated integration error dominates the decaying tail and the
    /// profile values are no longer usable for tail fitting.
    fn algebraic_trust_cut(&self, p_model: R, r_hi: R) -> R {
        let half = c::<R>(0.5);
        let tol = c::<R>(0.05) * p_model;
        for &r in self.step_radii().iter().rev() {
            if r > r_hi {
                continue;
            }
            let (u1, _, _) = self.at(r);
            let (u0, _, _) = self.at(half * r);
            if u1 > R::zero() && u0 > u1 {
                let p = (u0 / u1).ln() / c::<R>(2.0).ln();
                if (p - p_model).abs() <= tol {
                    return r;
                }
            }
        }
        r_hi
    }

    /// Potential limit estimate (value, divergent flag).
    fn v_infinity(&self, d: Dimension<R>) -> (R, bool) {
        match self {
            Profile::Ground(gs) => (gs.v_infinity, gs.v_infinity_divergent),
            Profile::Reduced(_) => {
                let _ = d;
                (R::one(), false)
            }
        }
    }
}

/// Integrate `f(r, u, du, V) dr` over the profile up to `r_stop`, GL12 per
/// accepted step, plus the origin piece `[0, r_start]` at frozen state.
fn integrate_profile<R: Real, F: Fn(R, R, R, R) -> R>(p: &Profile<'_, R>, r_stop: R, f: &F) -> R {
    let radii = p.step_radii();
    let r_start = *radii.first().expect("nonempty");
    // origin piece: u, V vary as 1 + O(r^2), the integrand carries r^(d-1)
    let (u0, du0, v0) = p.at(r_start);
    let mut total = gl12(R::zero(), r_start, &|r| f(r, u0, du0, v0));
    for w in radii.windows(2) {
        let (a, b) = (w[0], w[1].min(r_stop));
        if b <= a {
            break;
        }
        total = total
            + gl12(a, b, &|r| {
                let (u, du, v) = p.at(r);
                f(r, u, du, v)
            });
        if b >= r_stop {
            break;
        }
    }
    total
}

/// Tail of `int g dr` beyond `R` for an integrand with logarithmic slope
/// `q = -d ln g / d ln r` at the endpoint: `g(R) R / (q - 1)`.
fn algebraic_tail<R: Real>(g_end: R, r_end: R, q: R) -> Option<R> {
    if q > R::one() {
        Some(g_end * r_end / (q - R::one()))
    } else {
        None
    }
}

/// Far-field power of `u` for non-exponential decay: `r^-4` at the critical
/// dimension, `r^-2` above it.
fn tail_power<R: Real>(dd: R) -> R {
    if dd > c(6.0) {
        c(2.0)
    } else {
        c(4.0)
    }
}

/// A quadrature is converged when the analytic tail bound is resolved below
/// this fraction of the integral.
pub const TAIL_REL_TOL: f64 = 1e-6;

fn finish_quadrature<R: Real>(scale: R, bulk: R, tail: Option<R>, r_stop: R) -> QuadratureResult<R> {
    match tail {
        Some(t) => {
            let value = scale * (bulk + t);
            let tail_estimate = scale * t;
            QuadratureResult {
                value,
                r_max_used: r_stop,
                tail_estimate,
                converged: tail_estimate < c::<R>(TAIL_REL_TOL) * value.abs().max(R::one()),
            }
        }
        None => QuadratureResult {
            value: scale * bulk,
            r_max_used: r_stop,
            tail_estimate: R::infinity(),
            converged: false,
        },
    }
}

/// Particle number `N = omega_{d-1} int u^2 r^(d-1) dr`.
///
/// The tail beyond the trusted profile is exponential for `d < 6`
/// (rate `-u'/u` at the endpoint) and algebraic at `d = 6` and above;
/// for `d > 6` the profile approaches `2(d-4)/r^2` and the integral
/// diverges, reported with `converged = false`.
pub fn particle_number<R: Real>(profile: &Profile<'_, R>, d: Dimension<R>) -> Result<QuadratureResult<R>> {
    let dd = d.get();
    let omega = surface_area(dd)?;
    let six = c::<R>(6.0);
    let mut r_stop = profile.r_trusted()?;
    let dm1 = dd - R::one();
    let (u_probe, _, _) = profile.at(r_stop);
    if dd >= six && u_probe > R::zero() {
        r_stop = profile.algebraic_trust_cut(tail_power(dd), r_stop);
    }
    let (u_end, du_end, _) = profile.at(r_stop);
    let bulk = integrate_profile(profile, r_stop, &|r, u, _, _| u * u * r.powf(dm1));
    let g_end = u_end * u_end * r_stop.powf(dm1);
    let tail = if u_end <= R::zero() {
        // profile reached an exact zero: nothing beyond it
        Some(R::zero())
    } else if dd < six {
        let kappa = -du_end / u_end;
        if kappa > R::zero() {
            Some(g_end / (c::<R>(2.0) * kappa))
        } else {
            None
        }
    } else {
        algebraic_tail(g_end, r_stop, c::<R>(2.0) * tail_power(dd) - dm1)
    };
    Ok(finish_quadrature(omega, bulk, tail, r_stop))
}

/// Energy split into its two nonnegative parts.
#[derive(Debug, Clone, Copy)]
pub struct EnergyResult<R: Real> {
    pub total: QuadratureResult<R>,
    /// `(omega/2) int u'^2 r^(d-1) dr`
    pub kinetic: R,
    /// `(gamma omega/4) int (V_inf - V) u^2 r^(d-1) dr`
    pub interaction: R,
}

/// Energy `E = (omega/2) int u'^2 r^(d-1) - (gamma omega/4) int (V - V_inf) u^2 r^(d-1)`.
/// Requires `d > 2`: below that the potential has no finite limit and the
/// interaction term is not defined.
pub fn energy<R: Real>(profile: &Profile<'_, R>, d: Dimension<R>, gamma: R) -> Result<EnergyResult<R>> {
    let dd = d.get();
    if dd <= c(2.0) {
        return Err(Error::Domain(format!(
            "energy requires d > 2 (potential limit diverges at d = {dd})"
        )));
    }
    if !(gamma > R::zero() && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    let omega = surface_area(dd)?;
    let six = c::<R>(6.0);
    let mut r_stop = profile.r_trusted()?;
    let dm1 = dd - R::one();
    let (u_probe, _, _) = profile.at(r_stop);
    if dd >= six && u_probe > R::zero() {
        r_stop = profile.algebraic_trust_cut(tail_power(dd), r_stop);
    }
    let (u_end, du_end, v_end) = profile.at(r_stop);
    let (vinf, vinf_div) = profile.v_infinity(d);
    if vinf_div {
        return Err(Error::Domain("potential limit diverges; energy undefined".into()));
    }
    let k_rad = integrate_profile(profile, r_stop, &|r, _, du, _| du * du * r.powf(dm1));
    let w_rad = integrate_profile(profile, r_stop, &|r, u, _, v| (vinf - v) * u * u * r.powf(dm1));
    let half = c::<R>(0.5);
    let quarter = c::<R>(0.25);
    let kinetic = half * omega * k_rad;
    let interaction = quarter * gamma * omega * w_rad;
    // endpoint integrand magnitudes bound the truncated tails
    let g_end = half * omega * du_end * du_end * r_stop.powf(dm1)
        + quarter * gamma * omega * (vinf - v_end).abs() * u_end * u_end * r_stop.powf(dm1);
    let tail = if u_end <= R::zero() {
        Some(R::zero())
    } else if dd < six {
        let kappa = -du_end / u_end;
        if kappa > R::zero() {
            Some(g_end / (c::<R>(2.0) * kappa))
        } else {
            None
        }
    } else {
        // the gradient term decays slowest: u' ~ r^-(p+1)
        let p = tail_power(dd);
        algebraic_tail(g_end, r_stop, c::<R>(2.0) * (p + R::one()) - dm1)
    };
    let total = finish_quadrature(R::one(), kinetic + interaction, tail, r_stop);
    Ok(EnergyResult { total, kinetic, interaction })
}

/// Controls for the convolution-inequality quadrature at `d = 6`.
#[derive(Debug, Clone, Copy)]
pub struct HlsControls {
    pub r_min: f64,
    pub r_max: f64,
    pub segments: usize,
}

impl Default for HlsControls {
    fn default() -> Self {
        Self { r_min: 1e-6, r_max: 1e4, segments: 1200 }
    }
}

/// Trial function for the inequality check.
#[derive(Debug, Clone, Copy)]
pub enum Trial {
    /// `f = (1 + r^2)^-2`, the extremal profile: ratio 1.
    Optimizer,
    /// Optimizer dilated by `lambda`: the ratio is scale invariant.
    Dilated(f64),
    /// Optimizer times `1 + eps e^(-r^2)`: ratio strictly below 1.
    Perturbed(f64),
}

impl Trial {
    fn eval(&self, r: f64) -> (f64, f64) {
        let base = |r: f64| (1.0 + r * r).powi(-2);
        let dbase = |r: f64| -4.0 * r * (1.0 + r * r).powi(-3);
        match *self {
            Trial::Optimizer => (base(r), dbase(r)),
            Trial::Dilated(l) => (base(l * r), l * dbase(l * r)),
            Trial::Perturbed(e) => {
                let b = (-r * r).exp();
                (base(r) * (1.0 + e * b), dbase(r) * (1.0 + e * b) - 2.0 * e * r * b * base(r))
            }
        }
    }
}

/// Result of the inequality quadrature:
/// `LHS = -4 omega_5^2 int Vt f^2 r^5 dr` with `Laplacian Vt = f^2`,
/// `RHS = (5/288) (omega_5 int f'^2 r^5 dr)^2`, `ratio = LHS / RHS <= 1`.
#[derive(Debug, Clone, Copy)]
pub struct HlsResult {
    pub ratio: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Full gradient norm `omega_5 int f'^2 r^5 dr`.
    pub gradient: f64,
}

/// Check the critical convolution inequality at `d = 6` by solving the
/// radial Poisson equation for the trial function and comparing both sides.
pub fn hls_check(trial: Trial, ctl: &HlsControls) -> Result<HlsResult> {
    if !(ctl.r_min > 0.0 && ctl.r_max > ctl.r_min && ctl.segments >= 2) {
        return Err(Error::InvalidConfig("bad quadrature controls".into()));
    }
    let n = ctl.segments;
    let ratio = (ctl.r_max / ctl.r_min).powf(1.0 / n as f64);
    let edges: Vec<f64> = (0..=n).map(|i| ctl.r_min * ratio.powi(i as i32)).collect();

    let f2r5 = |r: f64| {
        let (f, _) = trial.eval(r);
        f * f * r.powi(5)
    };
    let df2r5 = |r: f64| {
        let (_, df) = trial.eval(r);
        df * df * r.powi(5)
    };

    // mass below the first edge: f ~ f(0), integrand ~ f(0)^2 r^5
    let mass0 = gl12(0.0, edges[0], &f2r5);
    // cumulative mass at edges
    let mut m_edges = vec![0.0; n + 1];
    m_edges[0] = mass0;
    for i in 0..n {
        m_edges[i + 1] = m_edges[i] + gl12(edges[i], edges[i + 1], &f2r5);
    }
    let m_inf = m_edges[n];
    if !m_inf.is_finite() || m_inf <= 0.0 {
        return Err(Error::PoissonNonConvergence(format!("mass integral = {m_inf}")));
    }

    // M(r) anywhere: edge value plus a fresh sub-segment quadrature
    let locate = |r: f64| -> usize {
        let t = (r / ctl.r_min).ln() / ratio.ln();
        (t.floor() as usize).min(n - 1)
    };
    let mass_at = |r: f64| -> f64 {
        let i = locate(r);
        m_edges[i] + gl12(edges[i], r, &f2r5)
    };
    // Vt' = M(r)/r^5; Vt(rmax) = -M_inf/(4 rmax^4) from the far-field tail
    let vp = |r: f64| mass_at(r) / r.powi(5);
    let mut vt_edges = vec![0.0; n + 1];
    vt_edges[n] = -m_inf / (4.0 * ctl.r_max.powi(4));
    for i in (0..n).rev() {
        vt_edges[i] = vt_edges[i + 1] - gl12(edges[i], edges[i + 1], &vp);
    }
    let vt_at = |r: f64| {
        let i = locate(r);
        vt_edges[i] + gl12(edges[i], r, &vp)
    };

    let omega5: f64 = surface_area(6.0)?;
    let mut i_int = 0.0;
    let mut i_grad = gl12(0.0, edges[0], &df2r5);
    for i in 0..n {
        i_grad += gl12(edges[i], edges[i + 1], &df2r5);
        i_int += gl12(edges[i], edges[i + 1], &|r| vt_at(r) * f2r5(r));
    }
    // below the first edge Vt is essentially Vt(r_min)
    i_int += vt_edges[0] * mass0;

    let lhs = -4.0 * omega5 * omega5 * i_int;
    let gradient = omega5 * i_grad;
    let rhs = (5.0 / 288.0) * gradient * gradient;
    if !(lhs.is_finite() && rhs > 0.0) {
        return Err(Error::PoissonNonConvergence(format!("lhs = {lhs}, rhs = {rhs}")));
    }
    Ok(HlsResult { ratio: lhs / rhs, lhs, rhs, gradient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::SolverConfig;
    use crate::shooting::shoot;
    use std::f64::consts::PI;

    fn ground_state(d: f64) -> GroundStateResult<f64> {
        let cfg = SolverConfig::for_dimension(Dimension::new(d).unwrap());
        shoot(&cfg, 1e-12).unwrap()
    }

    #[test]
    fn surface_area_closed_forms() {
        assert!((surface_area::<f64>(1.0).unwrap() - 2.0).abs() < 1e-13);
        assert!((surface_area::<f64>(2.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((surface_area::<f64>(3.0).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!((surface_area::<f64>(6.0).unwrap() - PI.powi(3)).abs() < 1e-11);
        assert!(surface_area::<f64>(0.0).is_err());
    }

    #[test]
    fn gl12_polynomial_exactness() {
        // exact through degree 23
        let v = gl12(0.0, 1.0, &|x: f64| x.powi(23));
        assert!((v - 1.0 / 24.0).abs() < 1e-15);
        let w = gl12(-2.0, 3.0, &|x: f64| x * x);
        assert!((w - (27.0 + 8.0) / 3.0).abs() < 1e-12);
    }

    fn reduced(d: f64, r_max: f64) -> crate::lane_emden::LaneEmdenProfile<f64> {
        use crate::integrate::Tolerances;
        // essentially pure relative control: the algebraic tail falls many
        // orders below any useful absolute floor, and the accumulated error
        // sets how far out the tail fit can be trusted
        crate::lane_emden::solve_lane_emden(
            Dimension::new(d).unwrap(),
            r_max,
            Tolerances { abs: 1e-30, rel: 1e-13 },
        )
        .unwrap()
    }

    #[test]
    fn particle_number_d6_analytic() {
        // N = 2304 pi^3 for u = (1 + r^2/24)^-2, via the reduced profile
        let p = reduced(6.0, 2e4);
        let n = particle_number(&Profile::Reduced(&p), Dimension::new(6.0).unwrap()).unwrap();
        assert!(n.converged);
        let exact = 2304.0 * PI.powi(3);
        assert!(
            (n.value - exact).abs() / exact < 1e-6,
            "N = {}, exact = {exact}",
            n.value
        );
        assert!(n.tail_estimate < 1e-6 * n.value);
    }

    #[test]
    fn particle_number_d6_from_shooting() {
        // the shot trajectory is trustworthy only to the candidate blur,
        // so the quadrature is coarser than the reduced-profile route
        let gs = ground_state(6.0);
        let n = particle_number(&Profile::Ground(&gs), Dimension::new(6.0).unwrap()).unwrap();
        let exact = 2304.0 * PI.powi(3);
        assert!((n.value - exact).abs() / exact < 0.05, "N = {}", n.value);
        assert!(n.tail_estimate.is_finite());
    }

    #[test]
    fn particle_number_d3_frozen() {
        let gs = ground_state(3.0);
        let n = particle_number(&Profile::Ground(&gs), Dimension::new(3.0).unwrap()).unwrap();
        assert!(n.converged);
        // frozen from an independent adaptive quadrature
        assert!((n.value - 45.473_940_89).abs() < 1e-4, "N = {}", n.value);
        assert!(n.tail_estimate < 1e-6);
    }

    #[test]
    fn particle_number_divergent_above_six() {
        for d in [7.0, 8.0] {
            let p = reduced(d, 1e3);
            let n = particle_number(&Profile::Reduced(&p), Dimension::new(d).unwrap()).unwrap();
            assert!(!n.converged, "d = {d} should diverge");
            assert!(n.tail_estimate.is_infinite());
        }
    }

    #[test]
    fn energy_d6_analytic() {
        // closed forms: int u'^2 r^5 = int u^3 r^5 = 230.4, so
        // K = 115.2 pi^3 and W = 57.6 pi^3 at gamma = 1
        let p = reduced(6.0, 1e4);
        let e = energy(&Profile::Reduced(&p), Dimension::new(6.0).unwrap(), 1.0).unwrap();
        let exact_k = 115.2 * PI.powi(3);
        let exact_w = 57.6 * PI.powi(3);
        assert!((e.kinetic - exact_k).abs() / exact_k < 1e-6, "K = {}", e.kinetic);
        assert!((e.interaction - exact_w).abs() / exact_w < 1e-6, "W = {}", e.interaction);
        let exact = exact_k + exact_w;
        assert!((e.total.value - exact).abs() / exact < 1e-6);
    }

    #[test]
    fn energy_d3_frozen() {
        let gs = ground_state(3.0);
        let e = energy(&Profile::Ground(&gs), Dimension::new(3.0).unwrap(), 1.0).unwrap();
        assert!((e.total.value - 24.231_500_58).abs() < 1e-4, "E = {}", e.total.value);
    }

    #[test]
    fn energy_rejects_low_dimension() {
        let gs = ground_state(2.0);
        assert!(energy(&Profile::Ground(&gs), Dimension::new(2.0).unwrap(), 1.0).is_err());
        let gs3 = ground_state(3.0);
        assert!(energy(&Profile::Ground(&gs3), Dimension::new(3.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn hls_optimizer_ratio_one() {
        let r = hls_check(Trial::Optimizer, &HlsControls::default()).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-5, "ratio = {}", r.ratio);
        // closed forms: gradient = 2 pi^3 / 5, both sides pi^6 / 360
        assert!((r.gradient - 2.0 * PI.powi(3) / 5.0).abs() < 1e-5);
        assert!((r.lhs - PI.powi(6) / 360.0).abs() < 1e-4, "lhs = {}", r.lhs);
        assert!((r.rhs - PI.powi(6) / 360.0).abs() < 1e-4, "rhs = {}", r.rhs);
    }

    #[test]
    fn hls_dilation_invariance() {
        let base = hls_check(Trial::Optimizer, &HlsControls::default()).unwrap();
        for lam in [0.5, 2.0] {
            let r = hls_check(Trial::Dilated(lam), &HlsControls::default()).unwrap();
            assert!((r.ratio - base.ratio).abs() < 1e-6, "lambda = {lam}: {}", r.ratio);
        }
    }

    #[test]
    fn hls_perturbed_strictly_below_one() {
        let r = hls_check(Trial::Perturbed(0.1), &HlsControls::default()).unwrap();
        assert!(r.ratio < 1.0 - 1e-6, "ratio = {}", r.ratio);
        // independent coarse pipeline gives 0.99996258 with its own ~2e-6 bias
        assert!((r.ratio - 0.999_962_58).abs() < 3e-6, "ratio = {}", r.ratio);
    }

    #[test]
    fn hls_rejects_bad_controls() {
        let ctl = HlsControls { r_min: 0.0, ..HlsControls::default() };
        assert!(hls_check(Trial::Optimizer, &ctl).is_err());
    }

    #[test]
    fn interaction_matches_angular_kernel_double_integral() {
        // D = omega_5 omega_4 int int f(r)^2 f(s)^2 r^5 s^5 K(r,s) dr ds with
        // K(r,s) = int_0^pi sin^4 t (r^2 + s^2 - 2 r s cos t)^-2 dt must equal
        // -omega_5^2 int Vt f^2 r^5 dr computed through the Poisson solve.
        let kernel = |r: f64, s: f64| {
            // 64-point trapezoid-free GL over [0, pi]
            let mut acc = 0.0;
            let n = 8;
            for k in 0..n {
                let a = PI * k as f64 / n as f64;
                let b = PI * (k + 1) as f64 / n as f64;
                acc += gl12(a, b, &|t: f64| {
                    let st = t.sin();
                    st.powi(4) / (r * r + s * s - 2.0 * r * s * t.cos()).powi(2)
                });
            }
            acc
        };
        // Newton property: the angular mean collapses to the larger radius
        for (r, s) in [(0.5_f64, 1.7_f64), (2.0, 0.3)] {
            let want = 3.0 * PI / 8.0 / r.max(s).powi(4);
            let got = kernel(r, s);
            assert!((got - want).abs() / want < 1e-10, "K({r},{s}) = {got}, want {want}");
        }

        let omega5 = PI.powi(3);
        let omega4 = 8.0 * PI * PI / 3.0;
        let f2r5 = |r: f64| (1.0 + r * r).powi(-4) * r.powi(5);
        // geometric grid [1e-2, 1e2], 40 segments per axis
        let n = 30;
        let edges: Vec<f64> = (0..=n).map(|i| 1e-2 * 1e4_f64.powf(i as f64 / n as f64)).collect();
        let mut double = 0.0;
        for i in 0..n {
            for j in 0..n {
                double += gl12(edges[i], edges[i + 1], &|r: f64| {
                    f2r5(r) * gl12(edges[j], edges[j + 1], &|s: f64| f2r5(s) * kernel(r, s))
                });
            }
        }
        let d_val = omega5 * omega4 * double;
        let poisson = hls_check(Trial::Optimizer, &HlsControls::default()).unwrap();
        assert!(
            (d_val - poisson.lhs).abs() / poisson.lhs < 1e-2,
            "double integral {d_val} vs Poisson route {}",
            poisson.lhs
        );
    }
}
