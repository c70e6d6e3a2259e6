//! Physical-to-dimensionless conversion and the natural units of the problem.
//!
//! A charge `q` of mass `m` and kinetic energy `E` in a uniform magnetic
//! field `ℬ` defines three scales:
//!
//! * the Larmor frequency `ω_L = |q|ℬ/(2m)` (half the cyclotron frequency),
//! * the emission speed `v₀ = √(2E/m)` and wavenumber `k = m v₀/ħ`,
//! * the dimensionless energy `ε = E/(ħ ω_L)`, i.e. the energy in units of
//!   the Landau-level spacing parameter.
//!
//! Measuring lengths in units of `v₀/ω_L` (the cyclotron *diameter* of an
//! equatorial orbit) and times in units of `1/ω_L` renders the classical
//! trajectory field universal: every downstream module consumes only `ε` and
//! scaled coordinates `(ρ̂, ẑ)`. The context is needed again only to label
//! outputs with physical units:
//!
//! * density unit `[m k/(4π ε ħ²)]²` — the squared modulus of the free-space
//!   point-source wave at unit scaled distance,
//! * current-density unit `m k³/(16π² ε² ħ³)` (density unit × `v₀`),
//! * total-current unit `J_free = m k/(π ħ³)` — the current emitted by the
//!   identical source in field-free space.

use thiserror::Error;

/// Reduced Planck constant (J·s), CODATA 2018 exact value.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge (C), SI exact value.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Electron mass (kg), CODATA 2018.
pub const ELECTRON_MASS: f64 = 9.109_383_7015e-31;

/// Errors from physical-parameter validation.
#[derive(Debug, Error, PartialEq)]
pub enum ScalingError {
    /// A physical input that must be strictly positive was not.
    #[error("invalid parameter: {name} must be strictly positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    /// A scaled radial coordinate was negative.
    #[error("invalid scaled point: rho_hat must be >= 0, got {rho}")]
    NegativeRho { rho: f64 },
}

/// Physical source parameters. The charge enters only through its magnitude;
/// a negative charge flips the sense of the azimuthal drift but none of the
/// field magnitudes computed here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Particle charge in coulomb (magnitude used).
    pub charge: f64,
    /// Particle mass in kilograms.
    pub mass: f64,
    /// Magnetic field strength in tesla.
    pub field: f64,
    /// Kinetic energy at the source in joule.
    pub energy: f64,
}

/// Derived scales of the dimensionless problem. Immutable value type; safe to
/// share across parallel workers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingContext {
    /// Larmor frequency `ω_L = |q|ℬ/2m` (rad/s).
    pub larmor: f64,
    /// Emission speed `v₀ = √(2E/m)` (m/s).
    pub speed: f64,
    /// Wavenumber `k = m v₀/ħ` (1/m).
    pub wavenumber: f64,
    /// Dimensionless energy `ε = E/(ħ ω_L)`.
    pub epsilon: f64,
    /// Length unit `v₀/ω_L` (m); the cyclotron diameter of an equatorial orbit.
    pub length_unit: f64,
    /// Density unit `[m k/(4π ε ħ²)]²`.
    pub density_unit: f64,
    /// Current-density unit `m k³/(16π² ε² ħ³)` = density unit × `v₀`.
    pub current_unit: f64,
    /// Total-current unit `J_free = m k/(π ħ³)`, the free-space source current.
    pub total_current_unit: f64,
}

/// A dimensionless cylindrical destination `(ρ̂, ẑ)` in cyclotron-diameter
/// units. `ρ̂ ≥ 0` at this API boundary; a signed-radius convention exists
/// only inside the classical module's orbit bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPoint {
    rho: f64,
    z: f64,
}

impl ScaledPoint {
    /// Build a scaled point, rejecting negative or non-finite `ρ̂`.
    pub fn new(rho: f64, z: f64) -> Result<Self, ScalingError> {
        if !(rho >= 0.0) || !rho.is_finite() || !z.is_finite() {
            return Err(ScalingError::NegativeRho { rho });
        }
        Ok(Self { rho, z })
    }

    /// Radial distance `ρ̂ ≥ 0`.
    #[inline]
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Signed axial distance `ẑ`.
    #[inline]
    pub fn z(&self) -> f64 {
        self.z
    }

    /// Spherical distance `r̂ = √(ρ̂² + ẑ²)`.
    #[inline]
    pub fn r(&self) -> f64 {
        self.rho.hypot(self.z)
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<f64, ScalingError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ScalingError::NonPositive { name, value })
    }
}

/// Derive all natural units from physical parameters.
///
/// The dimensionless energy is computed two ways, `ε = E/(ħω_L)` and
/// `ε = k·length_unit/2`; these agree to rounding because
/// `k·length_unit = m v₀²/(ħ ω_L) = 2E/(ħ ω_L)`.
pub fn build_context(p: &PhysicalParams) -> Result<ScalingContext, ScalingError> {
    let q = check_positive("charge magnitude", p.charge.abs())?;
    let m = check_positive("mass", p.mass)?;
    let b = check_positive("field", p.field)?;
    let e = check_positive("energy", p.energy)?;

    let larmor = q * b / (2.0 * m);
    let speed = (2.0 * e / m).sqrt();
    let wavenumber = m * speed / HBAR;
    let epsilon = e / (HBAR * larmor);
    let length_unit = speed / larmor;

    let density_amp = m * wavenumber / (4.0 * std::f64::consts::PI * epsilon * HBAR * HBAR);
    let density_unit = density_amp * density_amp;
    let current_unit = density_unit * speed;
    let total_current_unit = m * wavenumber / (std::f64::consts::PI * HBAR.powi(3));

    Ok(ScalingContext {
        larmor,
        speed,
        wavenumber,
        epsilon,
        length_unit,
        density_unit,
        current_unit,
        total_current_unit,
    })
}

impl ScalingContext {
    /// `ε` recomputed from the wave side, `k·length_unit/2`. Used as a
    /// consistency check against the energy-side definition.
    pub fn epsilon_from_wavenumber(&self) -> f64 {
        self.wavenumber * self.length_unit / 2.0
    }

    /// Convert physical cylindrical coordinates (meters) to scaled ones.
    pub fn to_scaled(&self, rho: f64, z: f64) -> Result<ScaledPoint, ScalingError> {
        ScaledPoint::new(rho / self.length_unit, z / self.length_unit)
    }

    /// Convert a scaled point back to physical cylindrical coordinates (meters).
    pub fn from_scaled(&self, p: &ScaledPoint) -> (f64, f64) {
        (p.rho() * self.length_unit, p.z() * self.length_unit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn electron_context(field: f64, eps: f64) -> (PhysicalParams, ScalingContext) {
        let larmor = ELEMENTARY_CHARGE * field / (2.0 * ELECTRON_MASS);
        let params = PhysicalParams {
            charge: ELEMENTARY_CHARGE,
            mass: ELECTRON_MASS,
            field,
            energy: eps * HBAR * larmor,
        };
        let ctx = build_context(&params).expect("valid parameters");
        (params, ctx)
    }

    #[test]
    fn epsilon_is_energy_over_level_spacing() {
        // E = 50 ħω_L by construction, so ε = 50 exactly up to rounding.
        let (_, ctx) = electron_context(1.0, 50.0);
        assert!((ctx.epsilon - 50.0).abs() < 1e-12 * 50.0);
    }

    #[test]
    fn doubling_field_at_fixed_energy_halves_epsilon() {
        let (params, ctx1) = electron_context(1.0, 50.0);
        let params2 = PhysicalParams {
            field: 2.0,
            ..params
        };
        let ctx2 = build_context(&params2).expect("valid parameters");
        assert!((ctx2.epsilon - ctx1.epsilon / 2.0).abs() < 1e-12 * ctx1.epsilon);
    }

    #[test]
    fn electron_larmor_frequency_at_one_tesla() {
        // |q|ℬ/2m for the electron at ℬ = 1 T. Expected value evaluated with
        // mpmath (40 significant digits) from the same CODATA constants:
        // ω_L = 8.79410005386...e10 rad/s.
        let (_, ctx) = electron_context(1.0, 50.0);
        let expected = 8.794_100_053_86e10;
        assert!(
            ((ctx.larmor - expected) / expected).abs() < 1e-11,
            "larmor = {}",
            ctx.larmor
        );
    }

    #[test]
    fn epsilon_agrees_between_energy_and_wave_definitions() {
        for (b, eps) in [(1.0, 50.0), (0.37, 51.01), (5.0, 500.0), (2.2, 0.5)] {
            let (_, ctx) = electron_context(b, eps);
            let e1 = ctx.epsilon;
            let e2 = ctx.epsilon_from_wavenumber();
            assert!(
                ((e1 - e2) / e1).abs() < 1e-12,
                "ε mismatch: {e1} vs {e2} at ℬ={b}"
            );
        }
    }

    #[test]
    fn current_unit_is_density_unit_times_speed() {
        let (_, ctx) = electron_context(1.0, 50.0);
        assert!(
            ((ctx.current_unit - ctx.density_unit * ctx.speed) / ctx.current_unit).abs() < 1e-14
        );
    }

    #[test]
    fn to_scaled_round_trips() {
        let (_, ctx) = electron_context(1.0, 50.0);
        assert_eq!(ctx.to_scaled(0.0, 0.0).unwrap(), ScaledPoint::new(0.0, 0.0).unwrap());
        let p = ctx.to_scaled(ctx.length_unit, -ctx.length_unit).unwrap();
        assert!((p.rho() - 1.0).abs() < 1e-14 && (p.z() + 1.0).abs() < 1e-14);

        let (rho, z) = (3.7e-7, -1.2e-7);
        let sp = ctx.to_scaled(rho, z).unwrap();
        let (rho2, z2) = ctx.from_scaled(&sp);
        assert!(((rho - rho2) / rho).abs() < 1e-14);
        assert!(((z - z2) / z).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_inputs_are_rejected() {
        let bad = PhysicalParams {
            charge: ELEMENTARY_CHARGE,
            mass: 0.0,
            field: 1.0,
            energy: 1e-22,
        };
        assert!(matches!(
            build_context(&bad),
            Err(ScalingError::NonPositive { name: "mass", .. })
        ));
    }

    #[test]
    fn negative_charge_uses_magnitude() {
        let (params, ctx) = electron_context(1.0, 50.0);
        let neg = PhysicalParams {
            charge: -params.charge,
            ..params
        };
        let ctx2 = build_context(&neg).expect("negative charge accepted");
        assert_eq!(ctx, ctx2);
    }

    #[test]
    fn scaled_point_rejects_negative_rho() {
        assert!(ScaledPoint::new(-0.1, 0.0).is_err());
        assert!(ScaledPoint::new(f64::NAN, 0.0).is_err());
    }
}
