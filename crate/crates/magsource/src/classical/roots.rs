//! Real flight-time roots of ε̂(τ) = 1, organized by cyclotron interval.
//!
//! All interval-local computations use the offset x = τ − νπ ∈ (0, π). The
//! squared sine, the cotangent, and therefore ε̂ and ε̂′ are parity-free in
//! this variable (sin²τ = sin²x, cot τ = cot x), which keeps the evaluation
//! exact for interval indices up to the 10⁶ used by convergence scans.
//!
//! Existence follows the interval minimum: on each interval ε̂ has exactly one
//! minimum (the radial part of −ε̂′/2 is strictly decreasing in x), so a Fast
//! and a Slow root exist precisely when the minimum lies below 1. Roots are
//! found by Newton iteration seeded from the large-τ asymptotic positions
//! νπ + arcsin ρ̂ and (ν+1)π − arcsin ρ̂, safeguarded by bisection on a
//! bracket that is updated every step.

use std::f64::consts::PI;

use super::{RootKind, TrajectorySolution};
use crate::scaling::ScaledPoint;

/// Minimum of ε̂ over one cyclotron interval.
#[derive(Debug, Clone, Copy)]
pub struct IntervalMin {
    pub nu: u32,
    /// Location of the minimum (for ρ̂ = 0: the right endpoint, where the
    /// monotone ε̂ attains its infimum).
    pub tau: f64,
    pub e_min: f64,
}

/// Classification of one cyclotron interval at a destination point.
#[derive(Debug, Clone)]
pub enum IntervalOutcome {
    /// Destination inside the ν-th caustic: Fast and Slow orbits exist. On
    /// the caustic itself the two coincide (|ε̂′| = 0, divergent density).
    Pair {
        fast: TrajectorySolution,
        slow: TrajectorySolution,
        minimum: IntervalMin,
    },
    /// ρ̂ = 0 destination: single straight flight along the axis.
    Axial(TrajectorySolution),
    /// No real orbit in this interval (the ghost-orbit region).
    Forbidden { minimum: IntervalMin },
}

/// ε̂ − 1 and dε̂/dx at interval offset x, with τ = νπ + x.
fn gap_and_deriv(rho2: f64, z2: f64, nu_pi: f64, x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let tau = nu_pi + x;
    let gap = rho2 / (s * s) + z2 / (tau * tau) - 1.0;
    let deriv = -2.0 * (rho2 * c / (s * s * s) + z2 / (tau * tau * tau));
    (gap, deriv)
}

/// Newton iteration safeguarded by a maintained bracket [a, b] with
/// f(a)·f(b) < 0. `f` returns (value, derivative).
fn rtsafe<F: Fn(f64) -> (f64, f64)>(f: F, mut a: f64, mut b: f64, seed: f64) -> f64 {
    let sign_a = f(a).0.signum();
    let mut x = seed.clamp(a, b);
    for _ in 0..120 {
        let (v, d) = f(x);
        if v == 0.0 {
            return x;
        }
        if v.signum() == sign_a {
            a = x;
        } else {
            b = x;
        }
        let newton = x - v / d;
        x = if newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (b - a).abs() < 1e-14 {
            return x;
        }
    }
    x
}

/// Locate the unique minimum of ε̂ on interval ν (requires ρ̂ > 0).
///
/// For ρ̂ = 0 the energy function is monotone on the interval and the
/// (unattained) infimum at the right endpoint is reported instead.
pub fn interval_minimum(p: &ScaledPoint, nu: u32) -> IntervalMin {
    let rho2 = p.rho() * p.rho();
    let z2 = p.z() * p.z();
    let nu_pi = nu as f64 * PI;
    if rho2 == 0.0 {
        let hi = nu_pi + PI;
        let e_min = if z2 == 0.0 { f64::INFINITY } else { z2 / (hi * hi) };
        return IntervalMin { nu, tau: hi, e_min };
    }
    if z2 == 0.0 {
        // ε̂ = ρ̂²/sin²x is minimal exactly at mid-interval.
        return IntervalMin {
            nu,
            tau: nu_pi + 0.5 * PI,
            e_min: rho2,
        };
    }
    // −ε̂′/2 = ρ̂² cos x/sin³x + ẑ²/τ³ is strictly decreasing, positive at
    // x = π/2, negative toward x = π: bracket the sign change.
    let slope = |x: f64| {
        let (s, c) = x.sin_cos();
        let tau = nu_pi + x;
        let g = rho2 * c / (s * s * s) + z2 / (tau * tau * tau);
        let gp = -rho2 * (1.0 + 2.0 * c * c) / (s * s * s * s) - 3.0 * z2 / (tau * tau * tau * tau);
        (g, gp)
    };
    // Small-deflection estimate cos x* ≈ −ẑ²/(ρ̂²τ³) seeds Newton.
    let mid_tau = nu_pi + 0.5 * PI;
    let defl = z2 / (rho2 * mid_tau * mid_tau * mid_tau);
    let seed = (-defl.min(0.999_999)).acos();
    let x = rtsafe(slope, 0.5 * PI, PI - 1e-9, seed);
    let (gap, _) = gap_and_deriv(rho2, z2, nu_pi, x);
    IntervalMin {
        nu,
        tau: nu_pi + x,
        e_min: gap + 1.0,
    }
}

/// Classify interval ν and return its real orbits, if any.
pub fn interval_solutions(p: &ScaledPoint, nu: u32) -> IntervalOutcome {
    let rho = p.rho();
    let az = p.z().abs();
    let nu_pi = nu as f64 * PI;
    if rho == 0.0 {
        if az > 0.0 {
            let home = ((az / PI).ceil() as u32).saturating_sub(1);
            if home == nu {
                return IntervalOutcome::Axial(TrajectorySolution {
                    nu,
                    tau: az,
                    kind: RootKind::Axial,
                    maslov: 2 * nu,
                    e_deriv: -2.0 / az,
                });
            }
        }
        return IntervalOutcome::Forbidden {
            minimum: interval_minimum(p, nu),
        };
    }

    let minimum = interval_minimum(p, nu);
    let gap_min = minimum.e_min - 1.0;
    if gap_min.abs() < 1e-13 {
        // On a caustic: coalesced pair with vanishing ε̂′.
        let degenerate = |kind, maslov| TrajectorySolution {
            nu,
            tau: minimum.tau,
            kind,
            maslov,
            e_deriv: 0.0,
        };
        return IntervalOutcome::Pair {
            fast: degenerate(RootKind::Fast, 2 * nu),
            slow: degenerate(RootKind::Slow, 2 * nu + 1),
            minimum,
        };
    }
    if gap_min > 0.0 {
        return IntervalOutcome::Forbidden { minimum };
    }

    let rho2 = rho * rho;
    let z2 = p.z() * p.z();
    let x_min = minimum.tau - nu_pi;
    let f = |x: f64| gap_and_deriv(rho2, z2, nu_pi, x);

    // Fast root: walk the left bracket edge until ε̂ > 1 again.
    let mut a = x_min;
    loop {
        a *= 0.5;
        if f(a).0 > 0.0 {
            break;
        }
    }
    let tau_f = nu_pi + rtsafe(f, a, x_min, rho.asin());

    // Slow root: walk the right edge toward π.
    let mut span = PI - x_min;
    loop {
        span *= 0.5;
        if f(PI - span).0 > 0.0 {
            break;
        }
    }
    let tau_s = nu_pi + rtsafe(f, x_min, PI - span, PI - rho.asin());

    let sol = |tau: f64, kind, maslov| TrajectorySolution {
        nu,
        tau,
        kind,
        maslov,
        e_deriv: gap_and_deriv(rho2, z2, nu_pi, tau - nu_pi).1,
    };
    IntervalOutcome::Pair {
        fast: sol(tau_f, RootKind::Fast, 2 * nu),
        slow: sol(tau_s, RootKind::Slow, 2 * nu + 1),
        minimum,
    }
}

/// All real flight times with ν ≤ nu_max, sorted by increasing τ.
///
/// Destinations with ρ̂ > 1 are outside every cyclotron disc and yield no
/// real orbits (only ghosts); an empty vector is returned immediately.
pub fn find_flight_times(p: &ScaledPoint, nu_max: u32) -> Vec<TrajectorySolution> {
    if p.rho() > 1.0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for nu in 0..=nu_max {
        match interval_solutions(p, nu) {
            IntervalOutcome::Pair { fast, slow, .. } => {
                out.push(fast);
                out.push(slow);
            }
            IntervalOutcome::Axial(sol) => out.push(sol),
            IntervalOutcome::Forbidden { .. } => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::energy_hat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn point(rho: f64, z: f64) -> ScaledPoint {
        ScaledPoint::new(rho, z).unwrap()
    }

    #[test]
    fn interval_minima_match_frozen_values() {
        // Minima of ε̂ at (ρ̂, ẑ) = (0.5, 5), located with mpmath findroot on
        // dε̂/dτ at 40 significant digits.
        let p = point(0.5, 5.0);
        let expected = [
            (0u32, 2.585_805_798_71, 4.637_008_844_85),
            (1, 5.211_268_977_12, 1.244_777_109_14),
            (2, 8.037_986_638_29, 0.645_600_873_654),
            (3, 11.068_788_066_2, 0.455_396_401_870),
        ];
        for &(nu, tau, e_min) in &expected {
            let m = interval_minimum(&p, nu);
            assert!(((m.tau - tau) / tau).abs() < 1e-10, "τ_min at ν={nu}");
            assert!(((m.e_min - e_min) / e_min).abs() < 1e-10, "e_min at ν={nu}");
        }
    }

    #[test]
    fn flight_times_match_frozen_values() {
        // First allowed interval at (0.5, 5) is ν₀ = 2; its roots were frozen
        // from an mpmath bisection of ε̂ = 1 at 40 significant digits.
        let p = point(0.5, 5.0);
        let sols = find_flight_times(&p, 2);
        assert_eq!(sols.len(), 2);
        let (fast, slow) = (&sols[0], &sols[1]);
        assert_eq!(fast.nu, 2);
        assert!(((fast.tau - 7.068_891_569_601_344_950_6) / fast.tau).abs() < 1e-12);
        assert!(((slow.tau - 8.770_504_176_100_382_079_1) / slow.tau).abs() < 1e-12);
        assert_eq!(fast.maslov, 4);
        assert_eq!(slow.maslov, 5);
    }

    #[test]
    fn roots_satisfy_structure_invariants() {
        // ε̂ = 1 residual, derivative signs, ordering around the minimum, and
        // the consecutive Maslov ladder starting at 2ν₀.
        let p = point(0.5, 5.0);
        let sols = find_flight_times(&p, 40);
        assert!(!sols.is_empty());
        for pair in sols.chunks(2) {
            let (f, s) = (&pair[0], &pair[1]);
            assert_eq!(f.nu, s.nu);
            let m = interval_minimum(&p, f.nu);
            assert!(f.tau < m.tau && m.tau < s.tau, "Fast < argmin < Slow");
            assert!(f.e_deriv < 0.0 && s.e_deriv > 0.0);
        }
        for (i, sol) in sols.iter().enumerate() {
            assert!((energy_hat(&p, sol.tau) - 1.0).abs() < 1e-10);
            assert_eq!(sol.maslov, sols[0].maslov + i as u32);
        }
        assert_eq!(sols[0].maslov, 2 * sols[0].nu);
    }

    #[test]
    fn roots_approach_asymptotic_positions() {
        // τ_fast → νπ + arcsin ρ̂ and τ_slow → (ν+1)π − arcsin ρ̂ with an
        // O(ẑ²/τ²) correction.
        let p = point(0.25, 1.0);
        let nu = 3000u32;
        let sols: Vec<_> = find_flight_times(&p, nu)
            .into_iter()
            .filter(|s| s.nu == nu)
            .collect();
        assert_eq!(sols.len(), 2);
        let base = nu as f64 * PI;
        assert!((sols[0].tau - (base + 0.25f64.asin())).abs() < 1e-8);
        assert!((sols[1].tau - (base + PI - 0.25f64.asin())).abs() < 1e-8);
    }

    #[test]
    fn zero_z_roots_are_exact_arcsines() {
        // In the source plane the roots are exactly νπ ± arcsin ρ̂ shifted to
        // the interval, for every interval including ν = 0.
        let p = point(0.73, 0.0);
        let a = 0.73f64.asin();
        let sols = find_flight_times(&p, 3);
        assert_eq!(sols.len(), 8);
        for pair in sols.chunks(2) {
            let base = pair[0].nu as f64 * PI;
            assert!((pair[0].tau - (base + a)).abs() < 1e-12);
            assert!((pair[1].tau - (base + PI - a)).abs() < 1e-12);
        }
        assert_eq!(sols[0].nu, 0);
    }

    #[test]
    fn on_axis_destination_has_single_straight_orbit() {
        let p = point(0.0, 3.3);
        let sols = find_flight_times(&p, 50);
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].tau, 3.3);
        assert_eq!(sols[0].nu, 1);
        assert_eq!(sols[0].kind, RootKind::Axial);
        assert_eq!(sols[0].maslov, 2);
    }

    #[test]
    fn outside_unit_radius_has_no_real_orbits() {
        assert!(find_flight_times(&point(1.0001, 0.3), 100).is_empty());
        // ρ̂ = 1 off the source plane is also forbidden (ε̂ > 1 strictly).
        let p = point(1.0, 2.0);
        match interval_solutions(&p, 5) {
            IntervalOutcome::Forbidden { minimum } => assert!(minimum.e_min > 1.0),
            _ => panic!("expected forbidden interval at ρ̂ = 1, ẑ ≠ 0"),
        }
    }

    #[test]
    fn caustic_point_yields_coalesced_pair() {
        // A destination on the ν = 1 caustic surface must report a pair with
        // |ε̂′| ≈ 0 rather than a forbidden interval.
        let c = crate::classical::caustic_point(1, PI + 0.75 * PI).unwrap();
        let p = point(c.rho, c.z);
        match interval_solutions(&p, 1) {
            IntervalOutcome::Pair { fast, slow, .. } => {
                assert!((fast.tau - slow.tau).abs() < 1e-4);
                assert!(fast.e_deriv.abs() < 1e-5);
            }
            _ => panic!("expected a (degenerate) pair on the caustic"),
        }
    }

    #[test]
    fn newton_roots_match_bisection_scan_oracle() {
        // Independent root finder: scan 2000 subintervals per interval for
        // sign changes of ε̂ − 1 and bisect each bracket.
        let mut rng = ChaCha8Rng::seed_from_u64(0x726f_6f74);
        for _ in 0..10 {
            let p = point(rng.gen_range(0.05..0.95), rng.gen_range(-6.0..6.0));
            let nu_max = 20;
            let mut scanned = Vec::new();
            for nu in 0..=nu_max {
                let nu_pi = nu as f64 * PI;
                let h = |x: f64| energy_hat(&p, nu_pi + x) - 1.0;
                let m = 2000;
                for i in 1..m {
                    let (xa, xb) = (PI * i as f64 / m as f64, PI * (i + 1) as f64 / m as f64);
                    let (mut a, mut b) = (xa, xb.min(PI - 1e-12));
                    if h(a) * h(b) < 0.0 {
                        for _ in 0..60 {
                            let mid = 0.5 * (a + b);
                            if h(a) * h(mid) <= 0.0 {
                                b = mid;
                            } else {
                                a = mid;
                            }
                        }
                        scanned.push(nu_pi + 0.5 * (a + b));
                    }
                }
            }
            let newton: Vec<f64> = find_flight_times(&p, nu_max)
                .iter()
                .map(|s| s.tau)
                .collect();
            assert_eq!(
                newton.len(),
                scanned.len(),
                "root count mismatch at ({}, {})",
                p.rho(),
                p.z()
            );
            for (n, s) in newton.iter().zip(&scanned) {
                assert!((n - s).abs() < 1e-9, "root mismatch: {n} vs {s}");
            }
        }
    }
}
