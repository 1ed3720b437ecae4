//! Spherically symmetric ground states of the coupled Schrödinger–Newton
//! system in arbitrary dimension `d > 0`.
//!
//! After rescaling, every radial bound state is a solution of the universal
//! system
//!
//! ```text
//! u'' + (d-1)/r u' = (V - 1) u
//! V'' + (d-1)/r V' = u^2
//! ```
//!
//! with `u(0) = u0 > 0`, `u'(0) = V(0) = V'(0) = 0`. The crate integrates
//! this system with an adaptive embedded Runge-Kutta pair, classifies initial
//! values by their first terminating event, bisects to the unique ground
//! state, and evaluates the derived quantities: decay rates, the potential
//! limit, particle number and energy, the reduced quadratic equation active
//! for `d >= 6`, logarithmic variables in which the `d = 6` flow is
//! autonomous, and a quadrature check of the critical convolution inequality.
//!
//! Everything is generic over the scalar type through [`Real`]; the aliases
//! below fix `f64` for ordinary use.

pub mod error;
pub mod functionals;
pub mod integrate;
pub mod lane_emden;
pub mod ode;
pub mod real;
pub mod shooting;
pub mod transforms;

pub use error::{Error, Result};
pub use real::Real;

/// Dimension parameter over `f64`.
pub type Dimension = ode::Dimension<f64>;
/// Solver configuration over `f64`.
pub type SolverConfig = ode::SolverConfig<f64>;
/// Radial state over `f64`.
pub type RadialState = ode::RadialState<f64>;
/// Event-watching integration outcome over `f64`.
pub type RadialSolution = ode::RadialSolution<f64>;
/// Classification verdict over `f64`.
pub type Classification = shooting::Classification<f64>;
/// Converged shooting result over `f64`.
pub type GroundStateResult = shooting::GroundStateResult<f64>;
/// Reduced-equation profile over `f64`.
pub type LaneEmdenProfile = lane_emden::LaneEmdenProfile<f64>;
/// Physical rescaling over `f64`.
pub type PhysicalScaling = transforms::PhysicalScaling<f64>;
/// Log-variable state over `f64`.
pub type LogState = transforms::LogState<f64>;
/// Quadrature outcome over `f64`.
pub type QuadratureResult = functionals::QuadratureResult<f64>;
