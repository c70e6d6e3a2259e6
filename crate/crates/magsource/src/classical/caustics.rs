//! Caustic surfaces: fold loci where Fast and Slow orbits coalesce.
//!
//! Eliminating the launch angle from ε̂(τ) = 1, ε̂′(τ) = 0 parametrizes the
//! ν-th caustic by flight time. With the parity-free variable x = τ − νπ the
//! branch lives on x ∈ [π/2, π]:
//!
//! ```text
//!     ρ̂²(x) = sin³x / (sin x − τ cos x),
//!     ẑ²(x) = τ³ cos x / (τ cos x − sin x),      τ = νπ + x.
//! ```
//!
//! Both denominators are positive there, ρ̂ falls monotonically from 1 to 0
//! while |ẑ| climbs from 0 to the on-axis cusp at (ν+1)π, so each surface is
//! a nested bell around the source; at fixed |ẑ| the radii grow with ν and
//! accumulate below the ρ̂ = 1 cylinder.

use std::f64::consts::PI;

use super::roots::interval_minimum;
use super::ClassicalError;
use crate::scaling::ScaledPoint;

/// A point on a caustic surface, tagged by interval and flight time.
#[derive(Debug, Clone, Copy)]
pub struct CausticPoint {
    pub nu: u32,
    pub tau: f64,
    pub rho: f64,
    /// Non-negative representative; surfaces are mirror-symmetric in ẑ.
    pub z: f64,
}

/// Evaluate the ν-th caustic at flight time τ ∈ [(ν+½)π, (ν+1)π].
pub fn caustic_point(nu: u32, tau: f64) -> Result<CausticPoint, ClassicalError> {
    let nu_pi = nu as f64 * PI;
    let lo = nu_pi + 0.5 * PI;
    let hi = nu_pi + PI;
    if !tau.is_finite() || tau < lo || tau > hi {
        return Err(ClassicalError::CausticDomain { nu, tau, lo, hi });
    }
    let x = tau - nu_pi;
    let (s, c) = x.sin_cos();
    // s ≥ 0 and c ≤ 0 on the branch, so both quotients are non-negative;
    // clamp guards the roundoff sign at the endpoints.
    let rho2 = s * s * s / (s - tau * c);
    let z2 = tau * tau * tau * c / (tau * c - s);
    Ok(CausticPoint {
        nu,
        tau,
        rho: rho2.max(0.0).sqrt(),
        z: z2.max(0.0).sqrt(),
    })
}

/// Uniformly sample the ν-th caustic from the equator (ρ̂ = 1, ẑ = 0) to the
/// on-axis cusp at |ẑ| = (ν+1)π. `samples` ≥ 2 points are returned.
pub fn caustic_surface(nu: u32, samples: usize) -> Vec<CausticPoint> {
    let n = samples.max(2);
    let nu_pi = nu as f64 * PI;
    (0..n)
        .map(|i| {
            let x = 0.5 * PI * (1.0 + i as f64 / (n - 1) as f64);
            caustic_point(nu, nu_pi + x).expect("x ∈ [π/2, π] is always in the domain")
        })
        .collect()
}

/// Cylindrical radius of the ν-th caustic at height z, or `None` beyond the
/// cusp |z| ≥ (ν+1)π. Found by bisection on the monotone branch ẑ(x).
pub fn caustic_radius_at_z(nu: u32, z: f64) -> Option<f64> {
    let az = z.abs();
    let nu_pi = nu as f64 * PI;
    if az >= nu_pi + PI {
        return if az == nu_pi + PI { Some(0.0) } else { None };
    }
    let z_at = |x: f64| {
        let tau = nu_pi + x;
        let (s, c) = x.sin_cos();
        (tau * tau * tau * c / (tau * c - s)).max(0.0).sqrt()
    };
    let mut a = 0.5 * PI;
    let mut b = PI;
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if z_at(mid) < az {
            a = mid;
        } else {
            b = mid;
        }
    }
    let x = 0.5 * (a + b);
    Some(caustic_point(nu, nu_pi + x).expect("bisection stays in domain").rho)
}

/// Distance estimate to the ν-th caustic from that interval's energy
/// minimum: `|ε̂_min − 1| / |∇ε̂|`, the first-order Euclidean offset.
pub(crate) fn proximity_from_minimum(p: &ScaledPoint, m: &super::roots::IntervalMin) -> f64 {
    if p.rho() == 0.0 {
        return 0.0;
    }
    let x = m.tau - m.nu as f64 * PI;
    let s2 = x.sin().powi(2);
    let grad = (2.0 * p.rho() / s2).hypot(2.0 * p.z() / (m.tau * m.tau));
    (m.e_min - 1.0).abs() / grad
}

/// First-order Euclidean distance from `p` to the nearest caustic among
/// intervals ν ≤ nu_max: min over ν of `|ε̂_min − 1| / |∇ε̂(τ_min)|`.
///
/// On the axis the fold structure degenerates; 0 is returned there so that
/// callers treat the axis as untrusted for stationary-phase purposes.
pub fn caustic_proximity(p: &ScaledPoint, nu_max: u32) -> f64 {
    if p.rho() == 0.0 {
        return 0.0;
    }
    (0..=nu_max)
        .map(|nu| proximity_from_minimum(p, &interval_minimum(p, nu)))
        .fold(f64::INFINITY, f64::min)
}
