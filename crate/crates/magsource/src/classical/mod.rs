//! Classical cyclotron trajectories of charges emitted by a point source.
//!
//! In the natural units of [`crate::scaling`] (lengths in v₀/ω_L, times in
//! 1/ω_L, speeds in v₀) every orbit launched from the origin with polar angle
//! θ₀ and azimuth φ₀ follows
//!
//! ```text
//! ρ̂(t) = sin θ₀ · sin t,    ẑ(t) = cos θ₀ · t,    φ(t) = φ₀ − t,
//! ```
//!
//! where ρ̂(t) is a signed meridian coordinate (its magnitude is the
//! cylindrical radius). A destination (ρ̂, ẑ) is reached at flight time τ
//! exactly when the energy function
//!
//! ```text
//! ε̂(τ) = ρ̂²/sin²τ + ẑ²/τ²
//! ```
//!
//! equals 1. On each cyclotron interval νπ < τ < (ν+1)π the function ε̂ has a
//! single minimum, so destinations inside the ν-th caustic are reached twice
//! per interval (a Fast and a Slow orbit), points outside not at all — there
//! the real pair continues into a complex-time ghost orbit. The module finds
//! all real flight times ([`find_flight_times`]), ghost flight times
//! ([`find_ghost_times`]), evaluates per-orbit densities and velocities, and
//! parametrizes the fold caustics ([`caustic_point`], [`caustic_surface`]).

use crate::scaling::ScaledPoint;
use thiserror::Error;

pub mod caustics;
pub mod ghosts;
pub mod roots;

pub use caustics::{
    caustic_point, caustic_proximity, caustic_radius_at_z, caustic_surface, CausticPoint,
};
pub use ghosts::{find_ghost_times, GhostRoot, GhostScan};
pub use roots::{
    find_flight_times, interval_minimum, interval_solutions, IntervalMin, IntervalOutcome,
};

/// Errors from the classical layer.
#[derive(Debug, Error, PartialEq)]
pub enum ClassicalError {
    /// A caustic parametrization was requested outside its branch.
    #[error(
        "flight time {tau} lies outside the caustic branch [{lo}, {hi}] of interval nu = {nu}"
    )]
    CausticDomain { nu: u32, tau: f64, lo: f64, hi: f64 },
}

/// Which of the (up to) two orbits per cyclotron interval a solution is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Left of the interval minimum of ε̂ (shorter flight, ε̂′ < 0).
    Fast,
    /// Right of the interval minimum (longer flight, ε̂′ > 0).
    Slow,
    /// Straight flight along the axis; only exists for ρ̂ = 0.
    Axial,
}

/// One real solution of ε̂(τ) = 1: an orbit connecting source and destination.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySolution {
    /// Cyclotron interval index: νπ < τ ≤ (ν+1)π.
    pub nu: u32,
    /// Flight time in units of 1/ω_L.
    pub tau: f64,
    pub kind: RootKind,
    /// Maslov index μ: 2ν for Fast/Axial, 2ν+1 for Slow.
    pub maslov: u32,
    /// dε̂/dτ at the root; vanishes exactly on a caustic.
    pub e_deriv: f64,
}

/// Position (signed meridian ρ̂, azimuth φ, ẑ) and velocity (v_ρ, v_φ, v_z)
/// of an arriving orbit, velocities in units of v₀. Launch azimuth φ₀ = 0.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryState {
    pub position: [f64; 3],
    pub velocity: [f64; 3],
}

/// The energy function ε̂(τ) = ρ̂²/sin²τ + ẑ²/τ² (in units of E).
///
/// Returns `+∞` on the interval boundaries sin τ = 0 (for ρ̂ > 0) and at
/// τ = 0.
pub fn energy_hat(p: &ScaledPoint, tau: f64) -> f64 {
    let s = tau.sin();
    let rho2 = p.rho() * p.rho();
    let radial = if rho2 == 0.0 { 0.0 } else { rho2 / (s * s) };
    radial + p.z() * p.z() / (tau * tau)
}

/// dε̂/dτ = −2(ρ̂² cos τ/sin³τ + ẑ²/τ³).
pub fn energy_hat_deriv(p: &ScaledPoint, tau: f64) -> f64 {
    let (s, c) = tau.sin_cos();
    let rho2 = p.rho() * p.rho();
    let radial = if rho2 == 0.0 { 0.0 } else { rho2 * c / (s * s * s) };
    -2.0 * (radial + p.z() * p.z() / (tau * tau * tau))
}

/// Per-orbit classical density ñ_ν = 2/(τ sin²τ |ε̂′(τ)|), in units of
/// [mk/(4πεħ²)]².
///
/// Diverges (returns `+∞`) on a caustic where ε̂′ = 0. For the Axial orbit it
/// evaluates the transverse Jacobian factor 1/sin²|ẑ|; the focal-line
/// divergence along ρ̂ = 0 is a property of the full sum, not of this factor.
pub fn density(sol: &TrajectorySolution) -> f64 {
    let s = sol.tau.sin();
    let denom = sol.tau * s * s * sol.e_deriv.abs();
    if denom == 0.0 {
        f64::INFINITY
    } else {
        2.0 / denom
    }
}

/// Arrival velocity (v_ρ, v_φ, v_z) in units of v₀.
///
/// At a root of ε̂ = 1 these are v_ρ = ρ̂ cot τ, v_φ = −ρ̂, v_z = ẑ/τ; the
/// azimuthal component is exactly −ρ̂ because orbits from a point source on
/// the axis carry zero canonical angular momentum.
pub fn velocity(p: &ScaledPoint, sol: &TrajectorySolution) -> [f64; 3] {
    let v_rho = if p.rho() == 0.0 {
        0.0
    } else {
        let (s, c) = sol.tau.sin_cos();
        p.rho() * c / s
    };
    [v_rho, -p.rho(), p.z() / sol.tau]
}

/// Launch polar angle θ₀ of a solution, from ẑ = τ cos θ₀.
pub fn launch_angle(p: &ScaledPoint, sol: &TrajectorySolution) -> f64 {
    (p.z() / sol.tau).clamp(-1.0, 1.0).acos()
}

/// Orbit position at scaled time t for launch angles (θ₀, φ₀):
/// (ρ̂ signed, φ, ẑ) = (sin θ₀ sin t, φ₀ − t, cos θ₀ · t).
pub fn trajectory_position(theta0: f64, phi0: f64, t: f64) -> [f64; 3] {
    [theta0.sin() * t.sin(), phi0 - t, theta0.cos() * t]
}

/// Position and velocity of an arriving orbit (launch azimuth φ₀ = 0, so the
/// arrival azimuth is −τ).
pub fn trajectory_state(p: &ScaledPoint, sol: &TrajectorySolution) -> TrajectoryState {
    TrajectoryState {
        position: [p.rho(), -sol.tau, p.z()],
        velocity: velocity(p, sol),
    }
}

/// Signed Jacobian determinant of the launch-to-destination map
/// F(θ₀, φ₀, τ) = (sin θ₀ sin τ, τ cos θ₀, φ₀ − τ):
///
/// ```text
/// det 𝒥 = cos²θ₀ sin τ + τ sin²θ₀ cos τ.
/// ```
///
/// Its magnitude relates to the per-orbit density by
/// ñ_ν = 1/(|det 𝒥| · |sin τ|).
pub fn jacobian_det(p: &ScaledPoint, sol: &TrajectorySolution) -> f64 {
    let theta0 = launch_angle(p, sol);
    let (st, ct) = theta0.sin_cos();
    let (s, c) = sol.tau.sin_cos();
    ct * ct * s + sol.tau * st * st * c
}
