//! Rescaling between the universal profile and physical solutions, and the
//! logarithmic change of variables that makes the `d = 6` case autonomous.

use crate::error::{Error, Result};
use crate::ode::RadialState;
use crate::real::{c, Real};

/// Scaling between the universal profile `(u, V)` and a physical pair
/// `(psi, v)` with coupling `gamma`: `psi(x) = u(sigma x) / A`,
/// `v(x) = (V(sigma x) - 1) / B + omega / gamma` with `A = sqrt(gamma) /
/// sigma^2`, `B = gamma / sigma^2`. The frequency is fixed by the gauge
/// `v(0) = 0`, which gives `omega = sigma^2` and `v(x) = V(sigma x) / B`.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalScaling<R: Real> {
    pub sigma: R,
    pub gamma: R,
    pub omega: R,
    /// Amplitude factor `sqrt(gamma) / sigma^2` applied to `u`.
    pub amplitude: R,
    /// Potential factor `gamma / sigma^2` applied to `V`.
    pub potential: R,
}

impl<R: Real> PhysicalScaling<R> {
    pub fn new(sigma: R, gamma: R) -> Result<Self> {
        if !(sigma > R::zero() && sigma.is_finite()) {
            return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
        }
        if !(gamma > R::zero() && gamma.is_finite()) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self {
            sigma,
            gamma,
            omega: sigma * sigma,
            amplitude: gamma.sqrt() / (sigma * sigma),
            potential: gamma / (sigma * sigma),
        })
    }

    /// Map a universal state at radius `r` to the physical state at
    /// `x = r / sigma`: returns `(x, psi, dpsi, v, dv)`.
    pub fn to_physical(&self, s: &RadialState<R>) -> (R, R, R, R, R) {
        let x = s.r / self.sigma;
        (
            x,
            s.u / self.amplitude,
            self.sigma * s.du / self.amplitude,
            s.v / self.potential,
            self.sigma * s.dv / self.potential,
        )
    }

    /// Inverse of [`Self::to_physical`].
    pub fn to_universal(&self, x: R, psi: R, dpsi: R, v: R, dv: R) -> RadialState<R> {
        RadialState {
            r: x * self.sigma,
            u: psi * self.amplitude,
            du: dpsi * self.amplitude / self.sigma,
            v: v * self.potential,
            dv: dv * self.potential / self.sigma,
        }
    }
}

/// State in the variables `s = ln r`, `phi = r^2 u`, `W = r^2 (V - 1)`,
/// with `s`-derivatives.
#[derive(Debug, Clone, Copy)]
pub struct LogState<R: Real> {
    pub s: R,
    pub phi: R,
    pub dphi: R,
    pub w: R,
    pub dw: R,
}

/// Convert a radial state: `dphi/ds = r^2 (2u + r u')` and likewise for `W`.
pub fn to_log_variables<R: Real>(st: &RadialState<R>) -> Result<LogState<R>> {
    if !(st.r > R::zero()) {
        return Err(Error::NonpositiveRadius(st.r.to_f64().unwrap_or(f64::NAN)));
    }
    let r2 = st.r * st.r;
    let two = c::<R>(2.0);
    Ok(LogState {
        s: st.r.ln(),
        phi: r2 * st.u,
        dphi: r2 * (two * st.u + st.r * st.du),
        w: r2 * (st.v - R::one()),
        dw: r2 * (two * (st.v - R::one()) + st.r * st.dv),
    })
}

/// Inverse of [`to_log_variables`]: recover `(r, u, u', V, V')`.
pub fn from_log_variables<R: Real>(ls: &LogState<R>) -> RadialState<R> {
    let r = ls.s.exp();
    let r2 = r * r;
    let two = c::<R>(2.0);
    let u = ls.phi / r2;
    let vm1 = ls.w / r2;
    RadialState {
        r,
        u,
        du: (ls.dphi / r2 - two * u) / r,
        v: R::one() + vm1,
        dv: (ls.dw / r2 - two * vm1) / r,
    }
}

/// Residual of the `phi` equation in log variables:
/// `phi'' + (d - 6) phi' - 2(d - 4) phi = W phi`.
/// `ddphi` must be supplied (from the original equation it is
/// `r^2 (2u + 2 r u') + r^3 (u' + r u'')` with `u''` from the system).
pub fn phi_equation_residual<R: Real>(d: R, ls: &LogState<R>, ddphi: R) -> R {
    let two = c::<R>(2.0);
    ddphi + (d - c::<R>(6.0)) * ls.dphi - two * (d - c::<R>(4.0)) * ls.phi - ls.w * ls.phi
}

/// Second `s`-derivative of `phi` computed from the radial system itself.
pub fn ddphi_from_state<R: Real>(d: R, st: &RadialState<R>) -> R {
    let r = st.r;
    let r2 = r * r;
    // u'' from the equation
    let ddu = (st.v - R::one()) * st.u - (d - R::one()) / r * st.du;
    // phi = r^2 u, s = ln r:
    // dphi/ds    = 2 r^2 u + r^3 u'
    // d2phi/ds2  = 4 r^2 u + 5 r^3 u' + r^4 u''
    c::<R>(4.0) * r2 * st.u + c::<R>(5.0) * r2 * r * st.du + r2 * r2 * ddu
}

/// Second `s`-derivative of `W`.
pub fn ddw_from_state<R: Real>(d: R, st: &RadialState<R>) -> R {
    let r = st.r;
    let r2 = r * r;
    let ddv = st.u * st.u - (d - R::one()) / r * st.dv;
    c::<R>(4.0) * r2 * (st.v - R::one()) + c::<R>(5.0) * r2 * r * st.dv + r2 * r2 * ddv
}

/// Energy of the autonomous `d`-system in log variables:
/// `2E = phi'^2 - 2(d-4) phi^2 + W'^2/2 - (d-4) W^2 - W phi^2`,
/// conserved exactly at `d = 6`.
pub fn autonomous_energy<R: Real>(d: R, ls: &LogState<R>) -> R {
    let half = c::<R>(0.5);
    let dm4 = d - c::<R>(4.0);
    half * (ls.dphi * ls.dphi - c::<R>(2.0) * dm4 * ls.phi * ls.phi + half * ls.dw * ls.dw
        - dm4 * ls.w * ls.w
        - ls.w * ls.phi * ls.phi)
}

/// `dE/ds = -(d - 6)(phi'^2 + W'^2/2)`: zero at `d = 6`, a strict sign
/// elsewhere along nonconstant trajectories.
pub fn autonomous_energy_rate<R: Real>(d: R, ls: &LogState<R>) -> R {
    -(d - c::<R>(6.0)) * (ls.dphi * ls.dphi + c::<R>(0.5) * ls.dw * ls.dw)
}

/// Closed-form `d = 6` soliton in log variables: `phi = 6 / cosh^2(s - s0)`
/// with `e^{2 s0} = 24`.
pub fn soliton_d6<R: Real>(s: R, s0: R) -> R {
    let ch = (s - s0).cosh();
    c::<R>(6.0) / (ch * ch)
}

/// Locate the maximum of `phi(s)` by linear interpolation of the sign
/// change of `dphi/ds` over a sampled trajectory; returns `s0`.
pub fn fit_s0<R: Real>(samples: &[LogState<R>]) -> Result<R> {
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.dphi > R::zero() && b.dphi <= R::zero() {
            let t = a.dphi / (a.dphi - b.dphi);
            return Ok(a.s + t * (b.s - a.s));
        }
    }
    Err(Error::Domain("no maximum of phi found in the sample range".into()))
}
