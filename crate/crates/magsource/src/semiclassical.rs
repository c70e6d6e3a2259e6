//! Trajectory sums: primitive and uniform-Airy semiclassical wave functions.
//!
//! Each classical orbit reaching the destination contributes a partial wave
//! `√ñ_ν · e^{iΦ_ν}` whose modulus is the square root of the classical
//! density and whose phase
//!
//! ```text
//!     Φ_ν = S_ν − (π/2)μ_ν,       S_ν = ε(ρ̂² cot τ_ν + ẑ²/τ_ν + τ_ν),
//! ```
//!
//! combines the dynamical action (in units of ħ) with the Maslov index
//! μ = 2ν (Fast/Axial) or 2ν+1 (Slow). Ghost orbits continue the same
//! expressions to complex flight times; their `Im S > 0` damps the wave
//! beyond a caustic. The overall sign is fixed by the free-space limit,
//! where the single direct orbit must reproduce `G̃_free = −e^{2iεr̂}/r̂`.
//!
//! Two summation modes are offered. **Primitive** adds every partial wave as
//! is and diverges on the caustics where Fast and Slow coalesce
//! (`ñ → ∞`). **Uniform** folds each Fast/Slow pair through the two-term
//! Airy (fold-catastrophe) formula
//!
//! ```text
//!     ψ_pair = √π e^{i(S̄−πν−π/4)} [ξ^{1/4}(p+q)·Ai(−ξ) − i ξ^{−1/4}(p−q)·Ai′(−ξ)],
//!     S̄ = (S_f+S_s)/2,   ξ = (3ΔS/2)^{2/3},   ΔS = (S_s−S_f)/2 ≥ 0,
//! ```
//!
//! with p = √ñ_f, q = √ñ_s, which reduces to the primitive pair for ξ ≫ 1
//! (the two are swapped automatically beyond ξ = 25, where they agree to
//! ~1e−4 and the Airy argument would leave its evaluation window) and stays
//! finite on the caustic, where the exact tangency limit is used. On the
//! dark side the ghost feeds the decaying branch `2√π ξ^{1/4}|√ñ_g|·Ai(+ξ)`
//! with `ξ = (3 Im S_g/2)^{2/3}`.
//!
//! Trajectories are summed strictly in order of increasing flight time — the
//! series converges only conditionally, so the order is part of the
//! definition — under a hard orbit-count cutoff. At the Landau levels
//! `ε = 2l+1` the tail reduces to a periodic zeta function with unit phase
//! factor and the partial sums grow like `√N`; this genuine divergence is
//! reproduced, not masked.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::classical::caustics::proximity_from_minimum;
use crate::classical::ghosts::ghost_in_interval;
use crate::classical::{
    self, interval_solutions, GhostRoot, IntervalOutcome, RootKind, TrajectorySolution,
};
use crate::quantum::CurrentDensity;
use crate::scaling::ScaledPoint;
use crate::specialfn::airy_ai;

/// Beyond this Airy argument the uniform pair formula and the primitive sum
/// agree to better than 1e-4 and the primitive form is used directly.
const XI_CROSSOVER: f64 = 25.0;

/// Radial distance below which outputs are flagged low-confidence: the
/// stationary-phase amplitudes blow up near the symmetry axis and no Bessel
/// uniformization is attempted.
pub const LOW_CONFIDENCE_RHO: f64 = 0.05;

/// Errors from explicit pair/ghost combination calls.
#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SemiclassicalError {
    #[error(
        "uniform pair requires the Fast and Slow orbit of one interval, got {kind_a:?} (ν = {nu_a}) with {kind_b:?} (ν = {nu_b})"
    )]
    PairMismatch {
        kind_a: OrbitClass,
        nu_a: u32,
        kind_b: OrbitClass,
        nu_b: u32,
    },
    #[error("expected a ghost-orbit contribution, got {kind:?} in interval ν = {nu}")]
    NotGhost { kind: OrbitClass, nu: u32 },
}

/// Classification of a contributing orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitClass {
    Fast,
    Slow,
    Axial,
    Ghost,
}

impl OrbitClass {
    /// Lower-case label used in trajectory tables.
    pub fn label(&self) -> &'static str {
        match self {
            OrbitClass::Fast => "fast",
            OrbitClass::Slow => "slow",
            OrbitClass::Axial => "axial",
            OrbitClass::Ghost => "ghost",
        }
    }
}

/// One orbit's partial wave: `value = modulus · e^{i·phase}` with the Maslov
/// shift already folded into `phase`. Ghosts carry a complex phase (its
/// imaginary part is the damping exponent) and no arrival velocity.
#[derive(Debug, Clone, Copy)]
pub struct OrbitContribution {
    pub nu: u32,
    pub kind: OrbitClass,
    /// Flight time; real axis for real orbits.
    pub tau: Complex64,
    /// Maslov index (for ghosts: the 2ν of the embedding interval; their
    /// extra π/4 is already part of `phase`).
    pub maslov: u32,
    /// |√ñ_ν| — infinite exactly on a caustic.
    pub modulus: f64,
    /// Total phase Φ = S − (π/2)μ; `phase.im > 0` damps a ghost.
    pub phase: Complex64,
    /// Arrival velocity (v_ρ, v_φ, v_z) in units of v₀; `None` for ghosts.
    pub velocity: Option<[f64; 3]>,
}

impl OrbitContribution {
    /// The partial wave `modulus · e^{i·phase}`.
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.modulus * (-self.phase.im).exp(), self.phase.re)
    }
}

/// How many orbits to sum and how.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SummationPolicy {
    /// Orbit-count cutoff N ≥ 1. A Fast/Slow pair counts as two orbits; when
    /// the cutoff lands mid-pair only the earlier (Fast) orbit enters, summed
    /// primitively, so that exactly N orbits contribute whenever N exist.
    pub max_orbits: usize,
    /// Include complex ghost orbits from forbidden intervals (default on).
    pub include_ghosts: bool,
    pub mode: SumMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    /// Raw stationary-phase sum; diverges on caustics.
    Primitive,
    /// Airy-uniformized pairs; finite everywhere off the axis.
    Uniform,
}

impl SummationPolicy {
    pub fn new(max_orbits: usize, include_ghosts: bool, mode: SumMode) -> Self {
        Self {
            max_orbits: max_orbits.max(1),
            include_ghosts,
            mode,
        }
    }
}

/// Combined semiclassical field data at one point.
#[derive(Debug, Clone, Copy)]
pub struct ScField {
    /// Wave function in units of mk/(4πεħ²), same convention as the quantum
    /// Green function.
    pub psi: Complex64,
    /// |ψ|² in natural density units.
    pub density: f64,
    /// Current components in natural current units; ghosts contribute to ψ
    /// but are excluded from the velocity-weighted sums, while j_φ = −ρ̂|ψ|²
    /// holds exactly (every orbit arrives with v_φ = −ρ̂).
    pub current: CurrentDensity,
    /// First-order distance to the nearest caustic among scanned intervals.
    pub caustic_distance: f64,
    /// ρ̂ < LOW_CONFIDENCE_RHO: near-axis amplitudes are untrustworthy.
    pub low_confidence: bool,
    /// A non-finite partial wave entered the sum (primitive mode on a
    /// caustic).
    pub divergent: bool,
    /// Orbits actually summed.
    pub orbits_used: usize,
}

/// Dynamical action (phase in units of ħ) of a real orbit:
/// `S = ε(ρ̂² cot τ + ẑ²/τ + τ)`. Finite for every genuine flight-time root;
/// a τ on an interval boundary (sin τ = 0, ρ̂ > 0) yields ±∞.
pub fn dynamical_phase(sol: &TrajectorySolution, p: &ScaledPoint, eps: f64) -> f64 {
    let rho2 = p.rho() * p.rho();
    let z2 = p.z() * p.z();
    let tau = sol.tau;
    let radial = if rho2 == 0.0 {
        0.0
    } else {
        rho2 * tau.cos() / tau.sin()
    };
    eps * (radial + z2 / tau + tau)
}

/// Complex continuation of the dynamical action for a ghost orbit,
/// `S = ε·σ` with `Im S > 0`.
pub fn ghost_phase(ghost: &GhostRoot, eps: f64) -> Complex64 {
    ghost.sigma * eps
}

/// Continued `ε̂′(τ) = −2(ρ̂² cos τ/sin³τ + ẑ²/τ³)` for complex flight times.
fn complex_e_deriv(rho2: f64, z2: f64, tau: Complex64) -> Complex64 {
    let sin = tau.sin();
    (Complex64::from(rho2) * tau.cos() / (sin * sin * sin) + Complex64::from(z2) / (tau * tau * tau))
        * -2.0
}

/// Smooth part of the stationary-phase amplitude, `g(τ) = √(ε/π)·(−1)^ν/
/// (√τ·sin τ)`, with the constant phase `e^{−i(πν+π/4)}` factored out. It is
/// real and positive on interval ν's real axis — the primitive amplitude is
/// `√ñ_ν = g(τ)·√(2π/(ε|ε̂′|))` there — and extends to complex flight times,
/// where its argument is the ghost's phase correction beyond the fold-limit
/// convention.
fn g_amplitude(eps: f64, nu: u32, tau: Complex64) -> Complex64 {
    let sign = if nu % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::from(sign * (eps / PI).sqrt()) / (tau.sqrt() * tau.sin())
}

/// Partial wave of one real orbit.
pub fn orbit_contribution(
    sol: &TrajectorySolution,
    p: &ScaledPoint,
    eps: f64,
) -> OrbitContribution {
    let s = dynamical_phase(sol, p, eps);
    let kind = match sol.kind {
        RootKind::Fast => OrbitClass::Fast,
        RootKind::Slow => OrbitClass::Slow,
        RootKind::Axial => OrbitClass::Axial,
    };
    OrbitContribution {
        nu: sol.nu,
        kind,
        tau: Complex64::from(sol.tau),
        maslov: sol.maslov,
        modulus: classical::density(sol).sqrt(),
        phase: Complex64::from(s - 0.5 * PI * sol.maslov as f64),
        velocity: Some(classical::velocity(p, sol)),
    }
}

/// Partial wave of a ghost orbit by steepest descent through the complex
/// flight time: modulus |√ñ(τ_g)| from the continued classical density,
/// phase `S_g − πν − π/4 + φ_res`. The residual `φ_res = arg g(τ_g) −
/// ½·arg(i ε̂′(τ_g))` vanishes on the caustic, where the phase reduces to the
/// coalescing pair's mean Maslov shift plus the fold's π/4.
pub fn ghost_contribution(ghost: &GhostRoot, p: &ScaledPoint, eps: f64) -> OrbitContribution {
    let rho2 = p.rho() * p.rho();
    let z2 = p.z() * p.z();
    let tau = ghost.tau;
    let sin = tau.sin();
    let e_deriv = complex_e_deriv(rho2, z2, tau);
    let n_tilde = 2.0 / (tau * sin * sin * e_deriv).norm();
    let phi_res = g_amplitude(eps, ghost.nu, tau).arg()
        - 0.5 * (Complex64::new(0.0, 1.0) * e_deriv).arg();
    let s = ghost_phase(ghost, eps);
    OrbitContribution {
        nu: ghost.nu,
        kind: OrbitClass::Ghost,
        tau: ghost.tau,
        maslov: 2 * ghost.nu,
        modulus: n_tilde.sqrt(),
        phase: Complex64::new(s.re - PI * ghost.nu as f64 - 0.25 * PI + phi_res, s.im),
        velocity: None,
    }
}

/// Core of the fold-catastrophe formula: given the carrier phase
/// `θ = S̄ − πν − π/4`, the Airy argument ξ and the symmetric/antisymmetric
/// amplitudes `a± = p ± q`, return
/// `√π e^{iθ}[ξ^{1/4}·a₊·Ai(−ξ) − i ξ^{−1/4}·a₋·Ai′(−ξ)]`.
fn fold_combine(theta: f64, xi: f64, a_plus: f64, a_minus: f64) -> Complex64 {
    let (ai, aip) = airy_ai(-xi).expect("ξ ≤ 25 stays inside the Airy window");
    let bracket = Complex64::new(
        xi.powf(0.25) * a_plus * ai,
        -xi.powf(-0.25) * a_minus * aip,
    );
    Complex64::from_polar(PI.sqrt(), theta) * bracket
}

/// Data shared by the uniform pair and its velocity-weighted variant.
struct PairGeometry {
    theta: f64,
    xi: f64,
    /// `None` off the caustic; on it, the tangency amplitude replacing
    /// ξ^{1/4}(p+q), with ξ = 0 and p − q = 0.
    tangency: Option<f64>,
}

fn pair_geometry(
    p: &ScaledPoint,
    eps: f64,
    fast: &OrbitContribution,
    slow: &OrbitContribution,
) -> PairGeometry {
    let s_f = fast.phase.re + 0.5 * PI * fast.maslov as f64;
    let s_s = slow.phase.re + 0.5 * PI * slow.maslov as f64;
    let half_gap = 0.5 * (s_s - s_f);
    let theta = 0.5 * (s_f + s_s) - PI * fast.nu as f64 - 0.25 * PI;
    if half_gap > 1e-12 && fast.modulus.is_finite() && slow.modulus.is_finite() {
        return PairGeometry {
            theta,
            xi: (1.5 * half_gap).powf(2.0 / 3.0),
            tangency: None,
        };
    }
    // Tangency limit: the pair sits on the caustic. With ε̂(τ) ≈ 1 + ½ε̂″δ²
    // around the common root τ_m, the amplitude combination ξ^{1/4}(p+q)
    // approaches 2^{4/3}(ε/ε̂″²)^{1/6}/√(τ_m sin²τ_m).
    let tau_m = 0.5 * (fast.tau.re + slow.tau.re);
    let (s, c) = tau_m.sin_cos();
    let rho2 = p.rho() * p.rho();
    let z2 = p.z() * p.z();
    let curvature =
        2.0 * (rho2 * (1.0 + 2.0 * c * c) / (s * s * s * s) + 3.0 * z2 / tau_m.powi(4));
    let amplitude = 2f64.powf(4.0 / 3.0) * (eps / (curvature * curvature)).powf(1.0 / 6.0)
        / (tau_m * s * s).sqrt();
    PairGeometry {
        theta,
        xi: 0.0,
        tangency: Some(amplitude),
    }
}

/// Uniform (Airy) replacement for one Fast/Slow pair. Far beyond the
/// caustic (ξ > 25) this returns the primitive two-term sum, to which the
/// formula has converged there anyway.
pub fn uniform_pair(
    p: &ScaledPoint,
    eps: f64,
    fast: &OrbitContribution,
    slow: &OrbitContribution,
) -> Result<Complex64, SemiclassicalError> {
    check_pair(fast, slow)?;
    let geo = pair_geometry(p, eps, fast, slow);
    if let Some(amplitude) = geo.tangency {
        let (ai, _) = airy_ai(0.0).expect("0 is inside the Airy window");
        return Ok(Complex64::from_polar(PI.sqrt() * amplitude * ai, geo.theta));
    }
    if geo.xi > XI_CROSSOVER {
        return Ok(fast.value() + slow.value());
    }
    Ok(fold_combine(
        geo.theta,
        geo.xi,
        fast.modulus + slow.modulus,
        fast.modulus - slow.modulus,
    ))
}

/// Velocity-weighted uniform pair: applies the same fold to the amplitudes
/// (v_f·p, v_s·q) component-wise, so that currents stay finite on caustics.
fn uniform_pair_weighted(
    p: &ScaledPoint,
    eps: f64,
    fast: &OrbitContribution,
    slow: &OrbitContribution,
) -> [Complex64; 3] {
    let vf = fast.velocity.expect("real orbits carry velocities");
    let vs = slow.velocity.expect("real orbits carry velocities");
    let geo = pair_geometry(p, eps, fast, slow);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for k in 0..3 {
        out[k] = if let Some(amplitude) = geo.tangency {
            let (ai, _) = airy_ai(0.0).expect("0 is inside the Airy window");
            let v_mean = 0.5 * (vf[k] + vs[k]);
            Complex64::from_polar(PI.sqrt() * amplitude * ai, geo.theta) * v_mean
        } else if geo.xi > XI_CROSSOVER {
            fast.value() * vf[k] + slow.value() * vs[k]
        } else {
            fold_combine(
                geo.theta,
                geo.xi,
                vf[k] * fast.modulus + vs[k] * slow.modulus,
                vf[k] * fast.modulus - vs[k] * slow.modulus,
            )
        };
    }
    out
}

/// Decaying Airy wave fed by a ghost on the dark side of its caustic, with
/// `ξ = (3 Im S/2)^{2/3}`:
///
/// ```text
///     ψ_dark = 2π e^{iθ} [Re(w)·Ai(ξ) − i·(Im(w)/√ξ)·Ai′(ξ)],
///     w = g(τ_g)·√(−2i√ξ/(ε ε̂′(τ_g))),   θ = Re S − πν − π/4.
/// ```
///
/// Both fold coefficients follow from the single ghost saddle because the
/// amplitude is real-analytic on the real flight-time axis; the Ai′ term
/// keeps the handoff to the bright-side pair formula smooth through the
/// caustic. Deep in the shadow (ξ > 25, damping below e^{−83}) the primitive
/// ghost value — the formula's asymptotic limit — is returned instead.
pub fn uniform_dark(
    p: &ScaledPoint,
    eps: f64,
    ghost: &OrbitContribution,
) -> Result<Complex64, SemiclassicalError> {
    if ghost.kind != OrbitClass::Ghost {
        return Err(SemiclassicalError::NotGhost {
            kind: ghost.kind,
            nu: ghost.nu,
        });
    }
    let xi = (1.5 * ghost.phase.im).powf(2.0 / 3.0);
    if xi > XI_CROSSOVER {
        return Ok(ghost.value());
    }
    let tau = ghost.tau;
    let e_deriv = complex_e_deriv(p.rho() * p.rho(), p.z() * p.z(), tau);
    let g = g_amplitude(eps, ghost.nu, tau);
    // Carrier phase θ: strip the steepest-descent residual recorded by
    // ghost_contribution back off the stored total phase.
    let phi_res = g.arg() - 0.5 * (Complex64::new(0.0, 1.0) * e_deriv).arg();
    let theta = ghost.phase.re - phi_res;
    let w = g * (Complex64::new(0.0, -2.0 * xi.sqrt()) / (e_deriv * eps)).sqrt();
    let (ai, aip) = airy_ai(xi).expect("ξ ≤ 25 stays inside the Airy window");
    let bracket = Complex64::new(w.re * ai, -w.im / xi.sqrt() * aip);
    Ok(Complex64::from_polar(2.0 * PI, theta) * bracket)
}

fn check_pair(
    fast: &OrbitContribution,
    slow: &OrbitContribution,
) -> Result<(), SemiclassicalError> {
    if fast.kind == OrbitClass::Fast && slow.kind == OrbitClass::Slow && fast.nu == slow.nu {
        Ok(())
    } else {
        Err(SemiclassicalError::PairMismatch {
            kind_a: fast.kind,
            nu_a: fast.nu,
            kind_b: slow.kind,
            nu_b: slow.nu,
        })
    }
}

/// One interval's contribution, keeping Fast/Slow pairing intact for the
/// uniform mode.
enum IntervalEntry {
    Pair {
        fast: OrbitContribution,
        slow: OrbitContribution,
    },
    Single(OrbitContribution),
    Ghost(OrbitContribution),
}

fn collect_entries(
    p: &ScaledPoint,
    eps: f64,
    policy: &SummationPolicy,
) -> (Vec<IntervalEntry>, f64, usize) {
    let target = policy.max_orbits.max(1);
    let mut entries = Vec::new();
    let mut count = 0usize;
    let mut distance = f64::INFINITY;
    let rho2 = p.rho() * p.rho();
    let z2 = p.z() * p.z();
    // Real orbits need τ ≥ |ẑ|, so intervals below |ẑ|/π are all forbidden;
    // beyond that, pairs recur in every interval whenever ρ̂ < 1 and the scan
    // is bounded by the orbit target. Outside the unit cylinder only
    // ever-fainter ghosts exist and the scan stops once they are negligible.
    let nu_limit = target as u32 + 16 + (p.z().abs() / PI) as u32;
    let mut faint_ghosts = 0u32;
    for nu in 0..=nu_limit {
        if count >= target {
            break;
        }
        match interval_solutions(p, nu) {
            IntervalOutcome::Pair {
                fast,
                slow,
                minimum,
            } => {
                distance = distance.min(proximity_from_minimum(p, &minimum));
                let f = orbit_contribution(&fast, p, eps);
                if count + 1 == target {
                    // The hard cutoff splits this pair; its Fast orbit is
                    // earlier and enters alone (primitively in either mode).
                    entries.push(IntervalEntry::Single(f));
                    count += 1;
                    break;
                }
                entries.push(IntervalEntry::Pair {
                    fast: f,
                    slow: orbit_contribution(&slow, p, eps),
                });
                count += 2;
                faint_ghosts = 0;
            }
            IntervalOutcome::Axial(sol) => {
                distance = 0.0;
                entries.push(IntervalEntry::Single(orbit_contribution(&sol, p, eps)));
                count += 1;
                // The axis carries exactly one real orbit and no ghosts.
                break;
            }
            IntervalOutcome::Forbidden { minimum } => {
                if p.rho() > 0.0 {
                    distance = distance.min(proximity_from_minimum(p, &minimum));
                    if policy.include_ghosts {
                        if let Some(root) = ghost_in_interval(
                            rho2,
                            z2,
                            minimum.nu,
                            minimum.tau,
                            minimum.e_min,
                        ) {
                            let c = ghost_contribution(&root, p, eps);
                            if c.modulus * (-c.phase.im).exp() > 1e-30 {
                                entries.push(IntervalEntry::Ghost(c));
                                count += 1;
                                faint_ghosts = 0;
                            } else {
                                faint_ghosts += 1;
                            }
                        }
                    }
                }
                // Outside the unit cylinder no interval ever carries a real
                // orbit; stop once the damping has won.
                if p.rho() >= 1.0 && (!policy.include_ghosts || faint_ghosts >= 3) {
                    break;
                }
            }
        }
    }
    (entries, distance, count)
}

/// Evaluate the semiclassical field (wave function, density, current) at a
/// point. Never fails: quality degrades with small cutoffs and is flagged,
/// not masked.
pub fn sc_field(p: &ScaledPoint, eps: f64, policy: &SummationPolicy) -> ScField {
    let (entries, caustic_distance, orbits_used) = collect_entries(p, eps, policy);
    let mut psi = Complex64::new(0.0, 0.0);
    let mut weighted = [Complex64::new(0.0, 0.0); 3];
    for entry in &entries {
        match entry {
            IntervalEntry::Pair { fast, slow } => match policy.mode {
                SumMode::Primitive => {
                    psi += fast.value() + slow.value();
                    let vf = fast.velocity.expect("real orbit");
                    let vs = slow.velocity.expect("real orbit");
                    for k in 0..3 {
                        weighted[k] += fast.value() * vf[k] + slow.value() * vs[k];
                    }
                }
                SumMode::Uniform => {
                    psi += uniform_pair(p, eps, fast, slow).expect("constructed as a pair");
                    let w = uniform_pair_weighted(p, eps, fast, slow);
                    for k in 0..3 {
                        weighted[k] += w[k];
                    }
                }
            },
            IntervalEntry::Single(c) => {
                psi += c.value();
                let v = c.velocity.expect("real orbit");
                for k in 0..3 {
                    weighted[k] += c.value() * v[k];
                }
            }
            IntervalEntry::Ghost(c) => {
                psi += match policy.mode {
                    SumMode::Primitive => c.value(),
                    SumMode::Uniform => uniform_dark(p, eps, c).expect("constructed as a ghost"),
                };
            }
        }
    }
    // Global sign fixed by the free-space limit G̃_free = −e^{2iεr̂}/r̂.
    psi = -psi;
    for w in &mut weighted {
        *w = -*w;
    }
    let density = psi.norm_sqr();
    let current = CurrentDensity {
        rho: (psi.conj() * weighted[0]).re,
        phi: -p.rho() * density,
        z: (psi.conj() * weighted[2]).re,
    };
    let divergent = !psi.is_finite()
        || !current.rho.is_finite()
        || !current.z.is_finite()
        || !density.is_finite();
    ScField {
        psi,
        density,
        current,
        caustic_distance,
        low_confidence: p.rho() < LOW_CONFIDENCE_RHO,
        divergent,
        orbits_used,
    }
}

/// Semiclassical wave function (see [`sc_field`]).
pub fn wavefunction(p: &ScaledPoint, eps: f64, policy: &SummationPolicy) -> Complex64 {
    sc_field(p, eps, policy).psi
}

/// |ψ|² in natural density units.
pub fn sc_density(p: &ScaledPoint, eps: f64, policy: &SummationPolicy) -> f64 {
    sc_field(p, eps, policy).density
}

/// Current components in natural current units.
pub fn sc_current(p: &ScaledPoint, eps: f64, policy: &SummationPolicy) -> CurrentDensity {
    sc_field(p, eps, policy).current
}

/// Ordered list of individual orbit contributions (pairs flattened), as
/// printed by the trajectory tables.
pub fn orbit_contributions(
    p: &ScaledPoint,
    eps: f64,
    policy: &SummationPolicy,
) -> Vec<OrbitContribution> {
    let (entries, _, _) = collect_entries(p, eps, policy);
    let mut out = Vec::new();
    for entry in entries {
        match entry {
            IntervalEntry::Pair { fast, slow } => {
                out.push(fast);
                out.push(slow);
            }
            IntervalEntry::Single(c) | IntervalEntry::Ghost(c) => out.push(c),
        }
    }
    out
}

/// Partial sums of the wave function at a set of orbit-count checkpoints,
/// computed in one pass. Checkpoints must be increasing; the returned values
/// correspond to `wavefunction` with `max_orbits` at each checkpoint.
pub fn wavefunction_partial_sums(
    p: &ScaledPoint,
    eps: f64,
    policy: &SummationPolicy,
    checkpoints: &[usize],
) -> Vec<Complex64> {
    debug_assert!(checkpoints.windows(2).all(|w| w[0] < w[1]));
    let Some(&last) = checkpoints.last() else {
        return Vec::new();
    };
    let full = SummationPolicy {
        max_orbits: last,
        ..*policy
    };
    let (entries, _, _) = collect_entries(p, eps, &full);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut psi = Complex64::new(0.0, 0.0);
    let mut count = 0usize;
    let mut next = 0usize;
    for entry in &entries {
        match entry {
            IntervalEntry::Pair { fast, slow } => {
                // A checkpoint landing mid-pair sees only the Fast half,
                // exactly as a direct evaluation with that cutoff would.
                if next < checkpoints.len() && checkpoints[next] == count + 1 {
                    out.push(-(psi + fast.value()));
                    next += 1;
                }
                match policy.mode {
                    SumMode::Primitive => psi += fast.value() + slow.value(),
                    SumMode::Uniform => {
                        psi += uniform_pair(p, eps, fast, slow).expect("constructed as a pair")
                    }
                }
                count += 2;
            }
            IntervalEntry::Single(c) => {
                psi += c.value();
                count += 1;
            }
            IntervalEntry::Ghost(c) => {
                psi += match policy.mode {
                    SumMode::Primitive => c.value(),
                    SumMode::Uniform => uniform_dark(p, eps, c).expect("constructed as a ghost"),
                };
                count += 1;
            }
        }
        while next < checkpoints.len() && count >= checkpoints[next] {
            out.push(-psi);
            next += 1;
        }
        if next == checkpoints.len() {
            break;
        }
    }
    while next < checkpoints.len() {
        out.push(-psi);
        next += 1;
    }
    out
}

/// Partial sum of the periodic zeta function `Σ_{ν=1}^{N} e^{iπ(ε−1)ν}/√ν`,
/// the asymptotic tail of the trajectory sum. At the Landau levels the phase
/// factor is 1 and the sum grows like `2√N`.
pub fn periodic_zeta_partial(eps: f64, n: usize) -> Complex64 {
    let step = eps - 1.0;
    let mut angle = 0.0f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for nu in 1..=n {
        // Phase accumulated modulo 2 (in units of π) to keep precision over
        // millions of terms.
        angle = (angle + step).rem_euclid(2.0);
        sum += Complex64::from_polar(1.0 / (nu as f64).sqrt(), angle * PI);
    }
    sum
}
