//! The universal radial system
//!
//! ```text
//! u''  + (d-1)/r u'  = (V - 1) u
//! V''  + (d-1)/r V'  = u^2
//! ```
//!
//! with `u(0) = u0 > 0`, `u'(0) = V(0) = V'(0) = 0`, together with the
//! series startup that steps over the regular singular point at `r = 0`
//! and the event-watching integration driver.

use crate::error::{Error, Result};
use crate::integrate::{solve, Direction, EventFn, OdeProblem, RawEvent, Solution, Tolerances};
use crate::real::{c, Real};

/// Space dimension `d > 0`, a continuous parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimension<R: Real>(R);

impl<R: Real> Dimension<R> {
    pub fn new(d: R) -> Result<Self> {
        if !(d > R::zero()) || !d.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dimension must be positive and finite, got {d}"
            )));
        }
        Ok(Dimension(d))
    }

    #[inline]
    pub fn get(self) -> R {
        self.0
    }
}

/// State advanced by the integrator: `(r, u, u', V, V')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialState<R: Real> {
    pub r: R,
    pub u: R,
    pub du: R,
    pub v: R,
    pub dv: R,
}

impl<R: Real> RadialState<R> {
    #[inline]
    pub fn from_vec(r: R, y: &[R; 4]) -> Self {
        RadialState { r, u: y[0], du: y[1], v: y[2], dv: y[3] }
    }

    #[inline]
    pub fn to_vec(&self) -> [R; 4] {
        [self.u, self.du, self.v, self.dv]
    }
}

/// What terminated an integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// `u` crossed zero while decreasing.
    UZeroDescending,
    /// `u'` crossed zero from below while `u > 0`.
    DuZeroAscending,
    /// The horizon `r_max` was reached.
    RMaxReached,
    /// `u` dropped below the decay-acceptance threshold with a decay-like
    /// slope (`|u'|` of the order of `u_floor`, not O(1)).
    UDecayed,
}

/// A localized terminating event.
#[derive(Debug, Clone, Copy)]
pub struct Event<R: Real> {
    pub kind: EventKind,
    pub r_event: R,
    pub state: RadialState<R>,
}

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig<R: Real> {
    pub d: Dimension<R>,
    pub abs_tol: R,
    pub rel_tol: R,
    /// Radius at which the series startup hands over to the integrator.
    pub r_start: R,
    pub r_max: R,
    /// Decay-acceptance threshold on `u`.
    pub u_floor: R,
    /// Root localization tolerance (in `r`) for events.
    pub event_tol: R,
}

impl<R: Real> SolverConfig<R> {
    /// Defaults for a given dimension. The horizon scales with the decay
    /// law: exponential for `d < 6`, algebraic (`r^-4` at `d = 6`, `r^-2`
    /// beyond) which needs a much longer range to fall below `u_floor`.
    pub fn for_dimension(d: Dimension<R>) -> Self {
        let six = c::<R>(6.0);
        let r_max = if d.get() < six {
            c(100.0)
        } else if d.get() <= six {
            c(1000.0)
        } else {
            c(30000.0)
        };
        SolverConfig {
            d,
            abs_tol: c(1e-10),
            rel_tol: c(1e-10),
            r_start: c(1e-3),
            r_max,
            u_floor: c(1e-8),
            event_tol: c(1e-12),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > R::zero()
            && self.rel_tol > R::zero()
            && self.r_start > R::zero()
            && self.r_start < R::one()
            && self.r_max > self.r_start
            && self.u_floor > R::zero()
            && self.event_tol > R::zero();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{self:?}")))
        }
    }

    pub fn tolerances(&self) -> Tolerances<R> {
        Tolerances { abs: self.abs_tol, rel: self.rel_tol }
    }
}

/// Right-hand side as derivatives of `(r, u, u', V, V')`; the first entry is
/// `dr/dr = 1`.
pub fn rhs<R: Real>(state: &RadialState<R>, d: Dimension<R>) -> Result<[R; 5]> {
    if state.r <= R::zero() {
        return Err(Error::NonpositiveRadius(state.r.to_f64().unwrap_or(f64::NAN)));
    }
    let dm1_r = (d.get() - R::one()) / state.r;
    Ok([
        R::one(),
        state.du,
        (state.v - R::one()) * state.u - dm1_r * state.du,
        state.dv,
        state.u * state.u - dm1_r * state.dv,
    ])
}

fn rhs_vec<R: Real>(d: R) -> impl Fn(R, &[R; 4]) -> [R; 4] {
    move |r, y| {
        let dm1_r = (d - R::one()) / r;
        [
            y[1],
            (y[2] - R::one()) * y[0] - dm1_r * y[1],
            y[3],
            y[0] * y[0] - dm1_r * y[3],
        ]
    }
}

/// 4th-order Taylor state at `r0`, removing the `(d-1)/r` singularity:
///
/// ```text
/// u(r)  = u0 - u0/(2d) r^2 + u0(u0^2+1)/(8d(d+2)) r^4
/// V(r)  = u0^2/(2d) r^2 - u0^2/(4d(d+2)) r^4
/// ```
pub fn series_start<R: Real>(u0: R, d: Dimension<R>, r0: R) -> Result<RadialState<R>> {
    if u0 <= R::zero() {
        return Err(Error::Domain(format!("u0 must be positive, got {u0}")));
    }
    if r0 <= R::zero() {
        return Err(Error::NonpositiveRadius(r0.to_f64().unwrap_or(f64::NAN)));
    }
    let dd = d.get();
    let two = c::<R>(2.0);
    let r2 = r0 * r0;
    let r3 = r2 * r0;
    let r4 = r2 * r2;
    let dp2 = dd + two;
    let u02 = u0 * u0;

    let u = u0 - u0 / (two * dd) * r2 + u0 * (u02 + R::one()) / (c::<R>(8.0) * dd * dp2) * r4;
    let du = -u0 / dd * r0 + u0 * (u02 + R::one()) / (two * dd * dp2) * r3;
    let v = u02 / (two * dd) * r2 - u02 / (c::<R>(4.0) * dd * dp2) * r4;
    let dv = u02 / dd * r0 - u02 / (dd * dp2) * r3;
    Ok(RadialState { r: r0, u, du, v, dv })
}

/// The outcome of an event-watching integration of the full system.
#[derive(Debug, Clone)]
pub struct RadialSolution<R: Real> {
    pub d: Dimension<R>,
    pub sol: Solution<R, 4>,
    pub event: Event<R>,
}

impl<R: Real> RadialSolution<R> {
    pub fn state_at(&self, r: R) -> RadialState<R> {
        RadialState::from_vec(r, &self.sol.eval(r))
    }

    pub fn r_end(&self) -> R {
        self.sol.r_end()
    }

    /// Profile at the accepted steps (monotone in `r`).
    pub fn profile(&self) -> Vec<RadialState<R>> {
        self.sol.steps.iter().map(|(r, y)| RadialState::from_vec(*r, y)).collect()
    }

    /// Profile resampled on a geometric grid, event point included.
    pub fn profile_geometric(&self, per_decade: usize) -> Vec<RadialState<R>> {
        self.sol.geometric_grid(per_decade).into_iter().map(|r| self.state_at(r)).collect()
    }
}

fn raw_to_event<R: Real>(kinds: &[EventKind], raw: &RawEvent<R, 4>) -> Event<R> {
    Event {
        kind: kinds[raw.id],
        r_event: raw.r,
        state: RadialState::from_vec(raw.r, &raw.y),
    }
}

/// Advance `start` until the first watched event or the horizon.
///
/// If `RMaxReached` is not in `watch` and the horizon is hit, the run is
/// still returned with an `RMaxReached` event so callers can inspect the
/// final state.
pub fn integrate<R: Real>(
    start: &RadialState<R>,
    cfg: &SolverConfig<R>,
    watch: &[EventKind],
) -> Result<RadialSolution<R>> {
    cfg.validate()?;
    if start.r < cfg.r_start {
        return Err(Error::InvalidConfig(format!(
            "start radius {} below r_start {}",
            start.r, cfg.r_start
        )));
    }
    let u_floor = cfg.u_floor;
    let mut events: Vec<EventFn<'_, R, 4>> = Vec::new();
    let mut kinds: Vec<EventKind> = Vec::new();
    for kind in watch {
        match kind {
            EventKind::UZeroDescending => {
                kinds.push(*kind);
                events.push(EventFn {
                    id: kinds.len() - 1,
                    direction: Direction::Falling,
                    g: Box::new(|_r, y: &[R; 4]| y[0]),
                });
            }
            EventKind::DuZeroAscending => {
                kinds.push(*kind);
                events.push(EventFn {
                    id: kinds.len() - 1,
                    direction: Direction::Rising,
                    g: Box::new(|_r, y: &[R; 4]| y[1]),
                });
            }
            EventKind::UDecayed => {
                kinds.push(*kind);
                events.push(EventFn {
                    id: kinds.len() - 1,
                    direction: Direction::Falling,
                    // armed only while the slope is decay-like; a solution
                    // plunging through zero passes u_floor with |u'| = O(1)
                    // and must not be mistaken for decay
                    g: Box::new(move |_r, y: &[R; 4]| {
                        let guard = y[1].abs() < c::<R>(10.0) * R::one().max(y[2].abs()) * u_floor;
                        if guard {
                            y[0] - u_floor
                        } else {
                            R::one()
                        }
                    }),
                });
            }
            EventKind::RMaxReached => {} // implicit horizon
        }
    }

    let problem = OdeProblem {
        rhs: Box::new(rhs_vec(cfg.d.get())),
        r0: start.r,
        y0: start.to_vec(),
        r_end: cfg.r_max,
        tol: cfg.tolerances(),
        event_tol: cfg.event_tol,
        events,
    };
    let sol = solve(&problem)?;
    let event = match &sol.event {
        Some(raw) => raw_to_event(&kinds, raw),
        None => {
            let (r, y) = *sol.steps.last().unwrap();
            Event { kind: EventKind::RMaxReached, r_event: r, state: RadialState::from_vec(r, &y) }
        }
    };
    Ok(RadialSolution { d: cfg.d, sol, event })
}

/// Convenience: series startup followed by integration.
pub fn integrate_from_origin<R: Real>(
    u0: R,
    cfg: &SolverConfig<R>,
    watch: &[EventKind],
) -> Result<RadialSolution<R>> {
    let start = series_start(u0, cfg.d, cfg.r_start)?;
    integrate(&start, cfg, watch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lane_emden::exact_d6;

    fn dim(d: f64) -> Dimension<f64> {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn rhs_balanced_state_has_zero_curvature() {
        // (V-1)u = 0 and u' = 0 kill the u'' component
        let s = RadialState { r: 1.0, u: 1.0, du: 0.0, v: 1.0, dv: 0.0 };
        let f = rhs(&s, dim(3.0)).unwrap();
        assert_eq!(f[2], 0.0);
    }

    #[test]
    fn rhs_zero_u_kills_u_terms() {
        let s = RadialState { r: 2.0, u: 0.0, du: 0.0, v: 0.5, dv: 0.1 };
        let f = rhs(&s, dim(3.0)).unwrap();
        assert_eq!(f[2], 0.0);
        assert!((f[4] - (-0.1)).abs() < 1e-15); // V'' = 0 - (2/2)*0.1
    }

    #[test]
    fn rhs_rejects_nonpositive_radius() {
        let s = RadialState { r: 0.0, u: 1.0, du: 0.0, v: 0.0, dv: 0.0 };
        assert!(rhs(&s, dim(3.0)).is_err());
    }

    #[test]
    fn rhs_exact_solution_residual_d6() {
        // d=6 closed form with V = 1 - u solves both equations
        let r = 1.0f64;
        let u = exact_d6(r);
        let du = -(r / 6.0) * (1.0 + r * r / 24.0f64).powi(-3);
        let s = RadialState { r, u, du, v: 1.0 - u, dv: -du };
        let f = rhs(&s, dim(6.0)).unwrap();
        // u'' from the closed form
        let q = 1.0 + r * r / 24.0f64;
        let ddu = -q.powi(-3) / 6.0 + (r * r / 24.0) * q.powi(-4);
        assert!((f[2] - ddu).abs() <= 1e-12, "u'' residual {}", f[2] - ddu);
        assert!((f[4] - (-ddu)).abs() <= 1e-12);
    }

    #[test]
    fn series_matches_d6_taylor_coefficients() {
        // u0=1, d=6: coefficients of (1 + r^2/24)^-2 are -1/12 and +1/192
        let d = dim(6.0);
        let r0 = 1e-2f64;
        let s = series_start(1.0, d, r0).unwrap();
        let taylor = 1.0 - r0 * r0 / 12.0 + r0.powi(4) / 192.0;
        // agreement beyond the r^6 term is below f64 resolution near 1
        assert!((s.u - taylor).abs() < 1e-15);
        assert!((s.u - exact_d6(r0)).abs() < 1e-14);
    }

    #[test]
    fn series_potential_sandwich() {
        // u^2 r^2/(2d) <= V <= u0^2 r^2/(2d) to leading order
        for &d in &[1.0, 2.0, 3.5, 6.0, 8.0] {
            let s = series_start(1.0f64, dim(d), 1e-3).unwrap();
            let lower = s.u * s.u * s.r * s.r / (2.0 * d);
            let upper = s.r * s.r / (2.0 * d);
            assert!(s.v >= lower - 1e-15 && s.v <= upper + 1e-15, "d={d}");
        }
    }

    #[test]
    fn series_residual_is_cubic_in_r0() {
        // residual of the u equation at the startup state scales like r0^3
        let d = dim(3.0);
        let resid = |r0: f64| {
            let s = series_start(2.0, d, r0).unwrap();
            // u'' from the truncated series directly
            let u0 = 2.0f64;
            let ddu = -u0 / 3.0 + 3.0 * u0 * (u0 * u0 + 1.0) / (2.0 * 3.0 * 5.0) * r0 * r0;
            let f = rhs(&s, d).unwrap();
            (ddu - f[2]).abs()
        };
        let r1 = resid(1e-3);
        let r2 = resid(2e-3);
        assert!(r1 < 1e-8);
        assert!(r2 / r1 > 7.0, "expected at least cubic growth, got {}", r2 / r1);
    }

    #[test]
    fn series_rejects_bad_inputs() {
        assert!(series_start(0.0, dim(3.0), 1e-3).is_err());
        assert!(series_start(-1.0, dim(3.0), 1e-3).is_err());
        assert!(series_start(1.0, dim(3.0), 0.0).is_err());
    }

    #[test]
    fn integrate_tracks_exact_d6() {
        let mut cfg = SolverConfig::for_dimension(dim(6.0));
        cfg.r_max = 50.0;
        let sol = integrate_from_origin(1.0, &cfg, &[EventKind::RMaxReached]).unwrap();
        let max_err = sol
            .profile()
            .iter()
            .map(|s| (s.u - exact_d6(s.r)).abs())
            .fold(0.0, f64::max);
        assert!(max_err <= 10.0 * cfg.abs_tol, "sup error {max_err}");
    }

    #[test]
    fn small_u0_goes_negative() {
        let cfg = SolverConfig::for_dimension(dim(3.0));
        let sol = integrate_from_origin(0.5, &cfg, &[EventKind::UZeroDescending]).unwrap();
        assert_eq!(sol.event.kind, EventKind::UZeroDescending);
        assert!(sol.event.r_event < cfg.r_max);
    }

    #[test]
    fn potential_slope_nonnegative() {
        for &(u0, d) in &[(0.5, 3.0), (1.0, 6.0), (2.0, 2.0), (5.0, 4.5)] {
            let cfg = SolverConfig::for_dimension(dim(d));
            let sol = integrate_from_origin(
                u0,
                &cfg,
                &[EventKind::UZeroDescending, EventKind::DuZeroAscending],
            )
            .unwrap();
            for s in sol.profile() {
                assert!(s.dv >= -1e-12, "V' = {} at r = {} (u0={u0}, d={d})", s.dv, s.r);
            }
        }
    }

    #[test]
    fn integral_equation_consistency() {
        // u'(r) r^(d-1) must equal the integral of (V-1) u s^(d-1) over [0, r]
        let d = 3.0;
        let cfg = SolverConfig::for_dimension(dim(d));
        let sol = integrate_from_origin(1.0, &cfg, &[EventKind::UZeroDescending]).unwrap();
        let r_end = sol.r_end() * 0.9;
        // composite Simpson on a fine uniform grid from the dense output
        let n = 4000;
        let h = (r_end - cfg.r_start) / n as f64;
        let f = |r: f64| {
            let s = sol.state_at(r);
            (s.v - 1.0) * s.u * r.powf(d - 1.0)
        };
        let mut acc = 0.0;
        for i in 0..n / 2 {
            let a = cfg.r_start + 2.0 * i as f64 * h;
            acc += h / 3.0 * (f(a) + 4.0 * f(a + h) + f(a + 2.0 * h));
        }
        // contribution of [0, r_start] from the series: (V-1)u s^(d-1) ~ -u0 s^(d-1)
        acc += -1.0 * cfg.r_start.powf(d) / d;
        let s_end = sol.state_at(r_end);
        let lhs = s_end.du * r_end.powf(d - 1.0);
        assert!(
            (lhs - acc).abs() <= 100.0 * cfg.abs_tol,
            "integral identity violated by {}",
            (lhs - acc).abs()
        );
    }

    #[test]
    fn no_double_zero_at_crossing() {
        let cfg = SolverConfig::for_dimension(dim(3.0));
        let sol = integrate_from_origin(0.5, &cfg, &[EventKind::UZeroDescending]).unwrap();
        let s = sol.event.state;
        assert!(s.du.abs() > 1e-6, "u' = {} at the zero of u", s.du);
    }

    #[test]
    fn convergence_with_tolerance() {
        // the d=6 exact-solution error must drop roughly in proportion to
        // the tolerance for an error-per-step controller
        let mut errs = Vec::new();
        for &tol in &[1e-6, 1e-7, 1e-8, 1e-9] {
            let mut cfg = SolverConfig::for_dimension(dim(6.0));
            cfg.abs_tol = tol;
            cfg.rel_tol = tol;
            cfg.r_max = 50.0;
            let sol = integrate_from_origin(1.0, &cfg, &[EventKind::RMaxReached]).unwrap();
            let e = sol
                .profile()
                .iter()
                .map(|s| (s.u - exact_d6(s.r)).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "errors not decreasing: {errs:?}");
        }
        assert!(errs[3] < 1e-2 * errs[0], "insufficient gain over 3 decades: {errs:?}");
    }

    #[test]
    fn starts_strictly_decreasing() {
        for &(u0, d) in &[(0.7, 2.0), (1.3, 3.0), (4.0, 7.0)] {
            let cfg = SolverConfig::for_dimension(dim(d));
            let sol = integrate_from_origin(
                u0,
                &cfg,
                &[EventKind::UZeroDescending, EventKind::DuZeroAscending],
            )
            .unwrap();
            let early = sol.state_at(cfg.r_start * 2.0);
            assert!(early.du < 0.0, "u0={u0} d={d}");
        }
    }
}
