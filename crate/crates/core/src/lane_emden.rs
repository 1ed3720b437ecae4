//! Reduced quadratic equation for `d >= 6` and related diagnostics.
//!
//! With `w = u`, the reduction `u + V = 1` collapses the coupled system to
//! `w'' + (d-1)/r w' = -w^2`, `w(0) = 1`, `w'(0) = 0`. For `d = 6` this has
//! the closed form `w = (1 + r^2/24)^-2`; for `d > 6` the solution crosses
//! zero at a finite radius.

use crate::error::{Error, Result};
use crate::integrate::{Direction, EventFn, OdeProblem, Solution, Tolerances};
use crate::ode::{integrate_from_origin, Dimension, EventKind, SolverConfig};
use crate::real::{c, Real};

/// Exact `d = 6` profile `u(r) = (1 + r^2/24)^-2`.
pub fn exact_d6<R: Real>(r: R) -> R {
    let one = R::one();
    let q = one + r * r / c(24.0);
    one / (q * q)
}

/// Radial derivative of [`exact_d6`].
pub fn exact_d6_deriv<R: Real>(r: R) -> R {
    let one = R::one();
    let q = one + r * r / c(24.0);
    -r / (c::<R>(6.0) * q * q * q)
}

/// Solution of the reduced equation; state vector is `[w, w']`.
pub struct LaneEmdenProfile<R: Real> {
    pub d: Dimension<R>,
    pub sol: Solution<R, 2>,
    /// First zero of `w`, when one occurs before `r_max`.
    pub first_zero: Option<R>,
}

impl<R: Real> LaneEmdenProfile<R> {
    pub fn eval(&self, r: R) -> [R; 2] {
        self.sol.eval(r)
    }

    pub fn r_end(&self) -> R {
        self.sol.steps.last().expect("nonempty").0
    }
}

/// Integrate `w'' + (d-1)/r w' = -w^2` from a fourth-order series start,
/// stopping at the first zero of `w` or at `r_max`.
pub fn solve_lane_emden<R: Real>(d: Dimension<R>, r_max: R, tol: Tolerances<R>) -> Result<LaneEmdenProfile<R>> {
    if !(r_max > R::zero()) {
        return Err(Error::Domain(format!("r_max must be positive, got {r_max}")));
    }
    let dd = d.get();
    let r0 = c::<R>(1e-3);
    // w = 1 - r^2/(2d) + r^4/(4d(d+2)) + O(r^6)
    let two = c::<R>(2.0);
    let w0 = R::one() - r0 * r0 / (two * dd) + r0.powi(4) / (c::<R>(4.0) * dd * (dd + two));
    let dw0 = -r0 / dd + r0.powi(3) / (dd * (dd + two));
    let dm1 = dd - R::one();
    let problem = OdeProblem {
        rhs: Box::new(move |r: R, y: &[R; 2]| [y[1], -y[0] * y[0] - dm1 / r * y[1]]),
        r0,
        y0: [w0, dw0],
        r_end: r_max,
        tol,
        event_tol: c(1e-12),
        events: vec![EventFn {
            id: 0,
            direction: Direction::Falling,
            g: Box::new(|_r: R, y: &[R; 2]| y[0]),
        }],
    };
    let sol = crate::integrate::solve(&problem)?;
    let first_zero = sol.event.as_ref().map(|e| e.r);
    Ok(LaneEmdenProfile { d, sol, first_zero })
}

/// Lyapunov samples `(r, L, L')` for the reduced equation:
/// `L = E r^d + (d/3) w w' r^(d-1)` with `E = w'^2/2 + w^3/3`,
/// `L' = -((d-6)/6) w'^2 r^(d-1)`.
pub fn lyapunov<R: Real>(profile: &LaneEmdenProfile<R>, grid: &[R]) -> Vec<(R, R, R)> {
    let d = profile.d.get();
    let third = R::one() / c(3.0);
    let half = c::<R>(0.5);
    grid.iter()
        .map(|&r| {
            let [w, dw] = profile.eval(r);
            let e = half * dw * dw + third * w * w * w;
            let l = e * r.powf(d) + (d * third) * w * dw * r.powf(d - R::one());
            let dl = -((d - c::<R>(6.0)) / c(6.0)) * dw * dw * r.powf(d - R::one());
            (r, l, dl)
        })
        .collect()
}

/// Milne variables `y = -r w'/w`, `z = -r w^2/w'` with limits `y(0) = 0`,
/// `z(0) = d`, satisfying `r y' = y (2 - d + y + z)`, `r z' = z (d - 2y - z)`.
#[derive(Debug, Clone, Copy)]
pub struct MilnePoint<R: Real> {
    pub r: R,
    pub y: R,
    pub z: R,
    /// Residual of `r y' = y (2 - d + y + z)` using exact derivatives of the profile.
    pub res_y: R,
    /// Residual of `r z' = z (d - 2y - z)`.
    pub res_z: R,
}

pub fn milne<R: Real>(profile: &LaneEmdenProfile<R>, grid: &[R]) -> Result<Vec<MilnePoint<R>>> {
    let d = profile.d.get();
    let two = c::<R>(2.0);
    let mut out = Vec::with_capacity(grid.len());
    for &r in grid {
        let [w, dw] = profile.eval(r);
        if w <= R::zero() || dw >= R::zero() {
            return Err(Error::Domain(format!("Milne map needs w > 0, w' < 0 at r = {r}")));
        }
        let y = -r * dw / w;
        let z = -r * w * w / dw;
        // exact derivatives via the reduced equation
        let ddw = -w * w - (d - R::one()) / r * dw;
        let dy = -dw / w - r * ddw / w + r * dw * dw / (w * w);
        let dz = -w * w / dw - two * r * w + r * w * w * ddw / (dw * dw);
        let res_y = r * dy - y * (two - d + y + z);
        let res_z = r * dz - z * (d - two * y - z);
        out.push(MilnePoint { r, y, z, res_y, res_z });
    }
    Ok(out)
}

/// Milne `y` for the exact `d = 6` profile: `y = 4 r^2 / (24 + r^2)`.
pub fn milne_y_d6<R: Real>(r: R) -> R {
    c::<R>(4.0) * r * r / (c::<R>(24.0) + r * r)
}

/// Sup norm of `u + V - 1` along a ground-state trajectory: measures how
/// well the reduction holds at a given dimension.
pub fn reduction_check<R: Real>(u0: R, cfg: &SolverConfig<R>) -> Result<R> {
    let sol = integrate_from_origin(u0, cfg, &[EventKind::UZeroDescending, EventKind::UDecayed, EventKind::RMaxReached])?;
    let mut sup = R::zero();
    for s in sol.profile() {
        let dev = (s.u + s.v - R::one()).abs();
        if dev > sup {
            sup = dev;
        }
    }
    Ok(sup)
}
