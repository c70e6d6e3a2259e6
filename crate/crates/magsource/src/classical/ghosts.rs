//! Ghost orbits: complex flight-time roots in classically forbidden intervals.
//!
//! Where a cyclotron interval carries no real Fast/Slow pair the two roots of
//! ε̂(τ) = 1 continue into a complex-conjugate pair. The member whose
//! continued dynamical phase decays (positive imaginary part of
//! σ(τ) = ρ̂² cot τ + ẑ²/τ + τ, the phase per unit ε) is the ghost orbit that
//! feeds the exponentially damped wave on the dark side of a caustic.
//!
//! Roots are found by complex Newton iteration in the interval-local variable
//! w = τ − νπ (sin²w and cot w are parity-free), seeded just above the real
//! interval minimum at the height suggested by the local quadratic model
//! ε̂(x_m + iy) ≈ ε̂_min − ½ε̂″y².

use std::f64::consts::PI;

use num_complex::Complex64;

use super::roots::{interval_solutions, IntervalOutcome};
#[cfg(test)]
use super::roots::interval_minimum;
use crate::scaling::ScaledPoint;

/// One ghost orbit: complex flight time and complex phase-per-ε.
#[derive(Debug, Clone, Copy)]
pub struct GhostRoot {
    pub nu: u32,
    /// Complex flight time with the decaying branch selected.
    pub tau: Complex64,
    /// σ = ρ̂² cot τ + ẑ²/τ + τ; the dynamical phase is S = ε·σ, Im σ > 0.
    pub sigma: Complex64,
}

/// Result of a ghost scan: the roots found plus any intervals where the
/// complex Newton iteration failed to converge (skipped with a warning
/// record, never silently).
#[derive(Debug, Clone, Default)]
pub struct GhostScan {
    pub ghosts: Vec<GhostRoot>,
    pub failed_intervals: Vec<u32>,
}

/// ε̂(νπ + w) − 1 and its w-derivative for complex w.
fn gap_complex(rho2: f64, z2: f64, nu_pi: f64, w: Complex64) -> (Complex64, Complex64) {
    let s = w.sin();
    let c = w.cos();
    let tau = w + nu_pi;
    let f = Complex64::from(rho2) / (s * s) + Complex64::from(z2) / (tau * tau) - 1.0;
    let fp = (Complex64::from(rho2) * c / (s * s * s) + Complex64::from(z2) / (tau * tau * tau))
        * -2.0;
    (f, fp)
}

fn complex_newton(rho2: f64, z2: f64, nu_pi: f64, seed: Complex64) -> Option<Complex64> {
    let mut w = seed;
    for _ in 0..60 {
        let (f, fp) = gap_complex(rho2, z2, nu_pi, w);
        if f.norm() < 1e-12 {
            return Some(w);
        }
        w -= f / fp;
    }
    None
}

/// Scan intervals ν ≤ nu_max without real orbits for ghost roots.
///
/// On-axis destinations (ρ̂ = 0) have no fold structure and return an empty
/// scan.
pub fn find_ghost_times(p: &ScaledPoint, nu_max: u32) -> GhostScan {
    let mut scan = GhostScan::default();
    if p.rho() == 0.0 {
        return scan;
    }
    let rho2 = p.rho() * p.rho();
    let z2 = p.z() * p.z();
    for nu in 0..=nu_max {
        if let IntervalOutcome::Forbidden { minimum } = interval_solutions(p, nu) {
            if let Some(root) = ghost_in_interval(rho2, z2, minimum.nu, minimum.tau, minimum.e_min)
            {
                scan.ghosts.push(root);
            } else {
                scan.failed_intervals.push(nu);
            }
        }
    }
    scan
}

/// Newton search for the ghost of one interval, seeded from its real energy
/// minimum. Callers guarantee `e_min > 1` (classically forbidden interval).
pub(crate) fn ghost_in_interval(
    rho2: f64,
    z2: f64,
    nu: u32,
    tau_min: f64,
    e_min: f64,
) -> Option<GhostRoot> {
    let nu_pi = nu as f64 * PI;
    let x_min = tau_min - nu_pi;
    // Quadratic-model height: ε̂(x_m + iy) ≈ e_min − ½ε̂″ y² crosses 1 at
    // y = √(2(e_min−1)/ε̂″).
    let (s, c) = x_min.sin_cos();
    let tau = nu_pi + x_min;
    let half_curv = rho2 * (1.0 + 2.0 * c * c) / (s * s * s * s) + 3.0 * z2 / (tau * tau * tau * tau);
    let y0 = ((e_min - 1.0) / half_curv).max(0.0).sqrt().clamp(1e-6, 1.2);
    let w = complex_newton(rho2, z2, nu_pi, Complex64::new(x_min, y0))?;
    let tau_c = w + nu_pi;
    // cot τ = cot w exactly (π-periodicity holds for complex arguments too).
    let sigma = Complex64::from(rho2) * w.cos() / w.sin() + Complex64::from(z2) / tau_c + tau_c;
    if sigma.im >= 0.0 {
        Some(GhostRoot { nu, tau: tau_c, sigma })
    } else {
        Some(GhostRoot {
            nu,
            tau: tau_c.conj(),
            sigma: sigma.conj(),
        })
    }
}

/// Convenience for tests: ghost of a single interval.
#[cfg(test)]
pub(crate) fn ghost_for_interval(p: &ScaledPoint, nu: u32) -> Option<GhostRoot> {
    let m = interval_minimum(p, nu);
    if m.e_min <= 1.0 {
        return None;
    }
    ghost_in_interval(p.rho() * p.rho(), p.z() * p.z(), nu, m.tau, m.e_min)
}
