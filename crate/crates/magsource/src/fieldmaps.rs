//! Field sampling over rectangles and radial profiles, image and CSV output.
//!
//! This module turns the point evaluators of [`quantum`](crate::quantum) and
//! [`semiclassical`](crate::semiclassical) into whole figures: scalar or
//! vector quantities sampled on a pixel grid in the `(ρ̂, ẑ)` plane or along
//! a radial cut, encoded as binary portable pixmaps (`P5` grayscale, `P6`
//! color) and CSV tables.
//!
//! Conventions shared by every sampler:
//!
//! * **Payload.** By default each sample holds the *integrated* quantity
//!   `2πρ̂·q(ρ̂, ẑ)` — the per-unit-length content of the full cylinder shell
//!   through the point, which is what the reference figures plot. The raw
//!   point quantity is available via [`Weighting::Raw`].
//! * **Pixel centers.** Pixel `(ix, iy)` is evaluated at its center;
//!   `iy = 0` is the row at `z_min` and `data` grows upward in `ẑ`.
//!   Image encoders flip rows so the *top* image row is `z_max`.
//! * **Half-pixel nudge.** Any sample (or supersample) whose `|ẑ|` falls
//!   strictly inside half a sub-pixel step of the source plane is moved to
//!   `ẑ = ±h` (`+h` for `ẑ = 0`): the Landau-channel series does not converge
//!   in the plane `ẑ = 0` itself, and the classical density is singular on
//!   the focal line it contains.
//! * **Supersampling.** With factor `s > 1` each pixel is the box-filter mean
//!   of `s × s` sub-samples (weighting applied per sub-sample); flags merge
//!   by severity. This is the anti-aliasing device for large `ε`, where the
//!   fringe spacing drops below one pixel.
//! * **No silent NaN.** A non-finite sample is stored as `0.0` and flagged
//!   [`SampleFlag::Divergent`]; primitive-mode samples are also flagged
//!   divergent when their first-order caustic distance is below half a pixel
//!   step, so caustic streaks are marked rather than numerically enormous.
//! * **Determinism.** Rows are sampled in parallel but every sample is an
//!   independent computation and results are assembled in index order, so
//!   output bytes are identical for any worker count.
//!
//! CSV layout: `# magsource v1`, optional `# key=value` comment lines echoing
//! the run configuration, a column header, then rows with `ẑ` ascending and
//! `ρ̂` fastest, 12 significant digits. A trailing `flag` column carries the
//! reason code of each sample (`ok`, `low_confidence`, `slow_convergence`,
//! `divergent`) so flagged values are never mistaken for physics.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::quantum::{self, CurrentDensity, QuantumError};
use crate::scaling::ScaledPoint;
use crate::semiclassical::{sc_field, SumMode, SummationPolicy};

/// Relative truncation error above which a quantum sample is flagged
/// [`SampleFlag::SlowConvergence`].
pub const SLOW_CONVERGENCE_TOL: f64 = 1e-6;

/// Errors from grid validation, sampling and encoding.
#[derive(Debug, Error)]
pub enum FieldmapsError {
    /// A grid or profile specification violated its invariants.
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },
    /// A numeric encoder parameter was out of range.
    #[error("invalid parameter: {name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    /// Upfront `ε` validation failed (threshold or invalid value).
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    /// An encoder was handed a field with the wrong number of components.
    #[error("encoder expects a {expected}-component field, got {got}")]
    ComponentMismatch { expected: usize, got: usize },
    /// Flow-map encoding requires both fields on one grid.
    #[error("flow-map fields must share a single grid specification")]
    GridMismatch,
}

/// Which evaluator fills the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Exact Landau-channel Green function.
    Quantum,
    /// Primitive semiclassical orbit sum (diverges on caustics).
    Primitive,
    /// Airy-uniformized semiclassical orbit sum.
    Uniform,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Quantum => "quantum",
            Method::Primitive => "primitive",
            Method::Uniform => "uniform",
        }
    }
}

/// Which field quantity is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Particle density `n` (natural density units).
    Density,
    /// Radial current component `j_ρ`.
    CurrentRho,
    /// Azimuthal current component `j_φ`.
    CurrentPhi,
    /// Axial current component `j_z`.
    CurrentZ,
    /// All three current components `(j_ρ, j_φ, j_z)`.
    CurrentVector,
}

impl Quantity {
    /// Number of payload values per sample.
    pub fn components(&self) -> usize {
        match self {
            Quantity::CurrentVector => 3,
            _ => 1,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Quantity::Density => "density",
            Quantity::CurrentRho => "current_rho",
            Quantity::CurrentPhi => "current_phi",
            Quantity::CurrentZ => "current_z",
            Quantity::CurrentVector => "current_vector",
        }
    }
}

/// Whether samples hold the integrated shell quantity or the raw point value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// `2πρ̂·q(ρ̂, ẑ)` — what the reference figures plot.
    Integrated,
    /// `q(ρ̂, ẑ)` unweighted.
    Raw,
}

impl Weighting {
    pub fn label(&self) -> &'static str {
        match self {
            Weighting::Integrated => "integrated",
            Weighting::Raw => "raw",
        }
    }
}

/// Per-sample reliability code, ordered by severity (merge = max).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SampleFlag {
    /// Converged, trustworthy value.
    Ok,
    /// Semiclassical sample closer to the axis than the trust radius.
    LowConfidence,
    /// Quantum series truncated before the tail estimate fell below
    /// [`SLOW_CONVERGENCE_TOL`] relative.
    SlowConvergence,
    /// Non-finite sample, caustic-adjacent primitive sample, or the source
    /// point itself; the stored value is `0.0` and must not be trusted.
    Divergent,
}

impl SampleFlag {
    /// Stable reason code used in the CSV `flag` column.
    pub fn code(&self) -> &'static str {
        match self {
            SampleFlag::Ok => "ok",
            SampleFlag::LowConfidence => "low_confidence",
            SampleFlag::SlowConvergence => "slow_convergence",
            SampleFlag::Divergent => "divergent",
        }
    }
}

/// Rectangle in the `(ρ̂, ẑ)` plane with a pixel resolution and supersample
/// factor. Invariants: finite non-degenerate ranges, `ρ_min ≥ 0`, at least
/// one pixel per side, `supersample ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rho_min: f64,
    pub rho_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub width: u32,
    pub height: u32,
    pub supersample: u32,
}

impl GridSpec {
    pub fn new(
        rho_min: f64,
        rho_max: f64,
        z_min: f64,
        z_max: f64,
        width: u32,
        height: u32,
        supersample: u32,
    ) -> Result<Self, FieldmapsError> {
        let spec = Self {
            rho_min,
            rho_max,
            z_min,
            z_max,
            width,
            height,
            supersample,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), FieldmapsError> {
        let fail = |reason: String| Err(FieldmapsError::InvalidGrid { reason });
        if !(self.rho_min.is_finite() && self.rho_max.is_finite())
            || !(self.z_min.is_finite() && self.z_max.is_finite())
        {
            return fail("coordinate ranges must be finite".into());
        }
        if self.rho_min < 0.0 {
            return fail(format!("rho_min must be >= 0, got {}", self.rho_min));
        }
        if self.rho_min >= self.rho_max {
            return fail(format!(
                "rho range is degenerate: [{}, {}]",
                self.rho_min, self.rho_max
            ));
        }
        if self.z_min >= self.z_max {
            return fail(format!(
                "z range is degenerate: [{}, {}]",
                self.z_min, self.z_max
            ));
        }
        if self.width == 0 || self.height == 0 {
            return fail(format!(
                "pixel counts must be >= 1, got {}x{}",
                self.width, self.height
            ));
        }
        if self.supersample == 0 {
            return fail("supersample factor must be >= 1".into());
        }
        Ok(())
    }

    /// Pixel step along `ρ̂`.
    pub fn dx(&self) -> f64 {
        (self.rho_max - self.rho_min) / self.width as f64
    }

    /// Pixel step along `ẑ`.
    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / self.height as f64
    }

    /// Center `ρ̂` of pixel column `ix`.
    pub fn rho_center(&self, ix: u32) -> f64 {
        self.rho_min + (ix as f64 + 0.5) * self.dx()
    }

    /// Center `ẑ` of pixel row `iy` (`iy = 0` at `z_min`).
    pub fn z_center(&self, iy: u32) -> f64 {
        self.z_min + (iy as f64 + 0.5) * self.dz()
    }

    fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

/// A sampled rectangle: immutable after fill, safe to share.
#[derive(Debug, Clone)]
pub struct Field2D {
    pub grid: GridSpec,
    pub method: Method,
    pub quantity: Quantity,
    pub weighting: Weighting,
    pub epsilon: f64,
    /// Row-major from `z_min`, `ρ̂` fastest, `components()` values per pixel.
    pub data: Vec<f64>,
    /// One flag per pixel in the same order.
    pub flags: Vec<SampleFlag>,
}

impl Field2D {
    /// Payload values per pixel.
    pub fn components(&self) -> usize {
        self.quantity.components()
    }

    fn index(&self, ix: u32, iy: u32) -> usize {
        (iy as usize * self.grid.width as usize + ix as usize) * self.components()
    }

    /// Scalar value of pixel `(ix, iy)`; the first component for vectors.
    pub fn value(&self, ix: u32, iy: u32) -> f64 {
        self.data[self.index(ix, iy)]
    }

    /// Vector payload of pixel `(ix, iy)`; scalar fields repeat their value.
    pub fn vector(&self, ix: u32, iy: u32) -> [f64; 3] {
        let i = self.index(ix, iy);
        if self.components() == 3 {
            [self.data[i], self.data[i + 1], self.data[i + 2]]
        } else {
            [self.data[i]; 3]
        }
    }

    pub fn flag(&self, ix: u32, iy: u32) -> SampleFlag {
        self.flags[iy as usize * self.grid.width as usize + ix as usize]
    }

    /// Extract one component of a vector field as a scalar field sharing the
    /// grid and flags (0 = `j_ρ`, 1 = `j_φ`, 2 = `j_z`). On a scalar field
    /// only index 0 is valid and returns a clone.
    pub fn component(&self, idx: usize) -> Result<Field2D, FieldmapsError> {
        let n = self.components();
        if idx >= n {
            return Err(FieldmapsError::ComponentMismatch {
                expected: n,
                got: idx + 1,
            });
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let quantity = match idx {
            0 => Quantity::CurrentRho,
            1 => Quantity::CurrentPhi,
            _ => Quantity::CurrentZ,
        };
        Ok(Field2D {
            grid: self.grid,
            method: self.method,
            quantity,
            weighting: self.weighting,
            epsilon: self.epsilon,
            data: self
                .data
                .chunks_exact(n)
                .map(|chunk| chunk[idx])
                .collect(),
            flags: self.flags.clone(),
        })
    }

    /// Largest `|value|` over non-divergent pixels (first component), used by
    /// the per-image normalization. `0.0` for an all-divergent field.
    pub fn max_abs(&self) -> f64 {
        let n = self.components();
        self.data
            .chunks_exact(n)
            .zip(&self.flags)
            .filter(|(_, f)| **f != SampleFlag::Divergent)
            .map(|(chunk, _)| chunk[0].abs())
            .fold(0.0, f64::max)
    }

    /// Largest in-plane current magnitude `hypot(j_ρ, j_z)` over
    /// non-divergent pixels of a 3-component field.
    pub fn max_plane_magnitude(&self) -> Result<f64, FieldmapsError> {
        if self.components() != 3 {
            return Err(FieldmapsError::ComponentMismatch {
                expected: 3,
                got: self.components(),
            });
        }
        Ok(self
            .data
            .chunks_exact(3)
            .zip(&self.flags)
            .filter(|(_, f)| **f != SampleFlag::Divergent)
            .map(|(c, _)| c[0].hypot(c[2]))
            .fold(0.0, f64::max))
    }
}

/// A sampled radial cut at fixed `ẑ`.
#[derive(Debug, Clone)]
pub struct Profile1D {
    pub method: Method,
    pub quantity: Quantity,
    pub weighting: Weighting,
    pub epsilon: f64,
    pub z: f64,
    /// Sample abscissas, evenly spaced and endpoint-inclusive.
    pub rhos: Vec<f64>,
    /// `components()` values per sample, same order as `rhos`.
    pub data: Vec<f64>,
    pub flags: Vec<SampleFlag>,
}

impl Profile1D {
    pub fn components(&self) -> usize {
        self.quantity.components()
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.rhos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhos.is_empty()
    }

    /// Scalar value of sample `i` (first component for vectors).
    pub fn value(&self, i: usize) -> f64 {
        self.data[i * self.components()]
    }
}

/// One evaluated sample before weighting: up to three payload values.
struct RawSample {
    values: [f64; 3],
    n: usize,
    flag: SampleFlag,
}

fn divergent_sample(n: usize) -> RawSample {
    RawSample {
        values: [0.0; 3],
        n,
        flag: SampleFlag::Divergent,
    }
}

fn pack(quantity: Quantity, density: f64, current: CurrentDensity) -> ([f64; 3], usize) {
    match quantity {
        Quantity::Density => ([density, 0.0, 0.0], 1),
        Quantity::CurrentRho => ([current.rho, 0.0, 0.0], 1),
        Quantity::CurrentPhi => ([current.phi, 0.0, 0.0], 1),
        Quantity::CurrentZ => ([current.z, 0.0, 0.0], 1),
        Quantity::CurrentVector => ([current.rho, current.phi, current.z], 3),
    }
}

/// Evaluate the requested quantity at one scaled point. `divergence_radius`
/// is the caustic-distance threshold below which primitive-mode samples are
/// flagged divergent (half a pixel step).
fn eval_sample(
    quantity: Quantity,
    method: Method,
    eps: f64,
    p: &ScaledPoint,
    policy: &SummationPolicy,
    divergence_radius: f64,
) -> RawSample {
    let n = quantity.components();
    match method {
        Method::Quantum => {
            let gv = match quantum::green(p, eps) {
                Ok(gv) => gv,
                // ε was validated upfront, so a per-point error can only be
                // the source point itself, where the field truly diverges.
                Err(_) => return divergent_sample(n),
            };
            let (values, n) = pack(quantity, gv.density(), gv.current(p, eps));
            if !values[..n].iter().all(|v| v.is_finite()) {
                return divergent_sample(n);
            }
            let flag = if gv.trunc_error > SLOW_CONVERGENCE_TOL * gv.g.norm() {
                SampleFlag::SlowConvergence
            } else {
                SampleFlag::Ok
            };
            RawSample { values, n, flag }
        }
        Method::Primitive | Method::Uniform => {
            let mode = if method == Method::Primitive {
                SumMode::Primitive
            } else {
                SumMode::Uniform
            };
            let eff = SummationPolicy {
                mode,
                ..*policy
            };
            let field = sc_field(p, eps, &eff);
            let (values, n) = pack(quantity, field.density, field.current);
            let near_caustic =
                method == Method::Primitive && field.caustic_distance < divergence_radius;
            if field.divergent || near_caustic || !values[..n].iter().all(|v| v.is_finite()) {
                return divergent_sample(n);
            }
            let flag = if field.low_confidence {
                SampleFlag::LowConfidence
            } else {
                SampleFlag::Ok
            };
            RawSample { values, n, flag }
        }
    }
}

fn validate_method_epsilon(method: Method, eps: f64) -> Result<(), FieldmapsError> {
    match method {
        // The Green function has a pole at every Landau level; fail fast.
        Method::Quantum => quantum::validate_epsilon(eps)?,
        // The orbit sum exists at any positive energy (its behavior *at* a
        // threshold is itself of interest), so only basic validity applies.
        Method::Primitive | Method::Uniform => {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(QuantumError::InvalidEpsilon { epsilon: eps }.into());
            }
        }
    }
    Ok(())
}

/// Nudge `z` off the source plane: strictly inside half a sub-step it moves
/// to `±half_step` (`+` for `ẑ = 0` exactly).
fn nudge_z(z: f64, half_step: f64) -> f64 {
    if z.abs() < half_step {
        if z >= 0.0 {
            half_step
        } else {
            -half_step
        }
    } else {
        z
    }
}

/// Box-filtered pixel: mean of the sub-sample values (weighting already
/// applied), flags merged by severity. Divergent sub-samples contribute their
/// stored `0.0` to the mean; the merged flag marks the pixel untrustworthy.
fn merge_subsamples(samples: &[RawSample], n: usize) -> ([f64; 3], SampleFlag) {
    let mut acc = [0.0f64; 3];
    let mut flag = SampleFlag::Ok;
    for s in samples {
        for k in 0..n {
            acc[k] += s.values[k];
        }
        flag = flag.max(s.flag);
    }
    let inv = 1.0 / samples.len() as f64;
    for a in &mut acc {
        *a *= inv;
    }
    (acc, flag)
}

fn apply_weight(sample: &mut RawSample, weighting: Weighting, rho: f64) {
    if weighting == Weighting::Integrated {
        let w = 2.0 * PI * rho;
        for k in 0..sample.n {
            sample.values[k] *= w;
        }
    }
}

/// Sample a quantity over a rectangle. For [`Method::Quantum`], `ε` must be
/// off-threshold; the summation policy applies to the semiclassical methods
/// (its `mode` field is overridden to match `method`).
pub fn sample_map(
    quantity: Quantity,
    method: Method,
    eps: f64,
    grid: &GridSpec,
    policy: &SummationPolicy,
    weighting: Weighting,
) -> Result<Field2D, FieldmapsError> {
    grid.validate()?;
    validate_method_epsilon(method, eps)?;

    let n = quantity.components();
    let s = grid.supersample;
    // Sub-samples sit at the centers of the s-times-finer grid; for s = 1
    // this expression is bit-identical to the pixel centers, so CSV
    // coordinates name the exact evaluation points.
    let sub_dx = (grid.rho_max - grid.rho_min) / (grid.width as f64 * s as f64);
    let sub_dz = (grid.z_max - grid.z_min) / (grid.height as f64 * s as f64);
    let half_sub_dz = 0.5 * sub_dz;
    let divergence_radius = 0.5 * grid.dx().max(grid.dz());

    let rows: Vec<(Vec<f64>, Vec<SampleFlag>)> = (0..grid.height)
        .into_par_iter()
        .map(|iy| {
            let mut data = Vec::with_capacity(grid.width as usize * n);
            let mut flags = Vec::with_capacity(grid.width as usize);
            let mut subs: Vec<RawSample> = Vec::with_capacity((s * s) as usize);
            for ix in 0..grid.width {
                subs.clear();
                for a in 0..s {
                    for b in 0..s {
                        let kx = (ix as u64 * s as u64 + a as u64) as f64;
                        let kz = (iy as u64 * s as u64 + b as u64) as f64;
                        let rho = grid.rho_min + (kx + 0.5) * sub_dx;
                        let z_raw = grid.z_min + (kz + 0.5) * sub_dz;
                        let z = nudge_z(z_raw, half_sub_dz);
                        let mut sample = match ScaledPoint::new(rho, z) {
                            Ok(p) => {
                                eval_sample(quantity, method, eps, &p, policy, divergence_radius)
                            }
                            Err(_) => divergent_sample(n),
                        };
                        apply_weight(&mut sample, weighting, rho);
                        subs.push(sample);
                    }
                }
                let (values, flag) = merge_subsamples(&subs, n);
                data.extend_from_slice(&values[..n]);
                flags.push(flag);
            }
            (data, flags)
        })
        .collect();

    let mut data = Vec::with_capacity(grid.pixel_count() * n);
    let mut flags = Vec::with_capacity(grid.pixel_count());
    for (row_data, row_flags) in rows {
        data.extend_from_slice(&row_data);
        flags.extend_from_slice(&row_flags);
    }

    Ok(Field2D {
        grid: *grid,
        method,
        quantity,
        weighting,
        epsilon: eps,
        data,
        flags,
    })
}

/// Sample a quantity along a radial cut at fixed `ẑ`, on `samples ≥ 2`
/// evenly spaced points from `rho_min` to `rho_max` inclusive. The exact
/// requested `ẑ` is used (no nudge); primitive-mode samples are flagged
/// divergent within half a sample step of a caustic.
pub fn sample_profile(
    quantity: Quantity,
    method: Method,
    eps: f64,
    z: f64,
    rho_min: f64,
    rho_max: f64,
    samples: usize,
    policy: &SummationPolicy,
    weighting: Weighting,
) -> Result<Profile1D, FieldmapsError> {
    let fail = |reason: String| Err(FieldmapsError::InvalidGrid { reason });
    if !z.is_finite() || !rho_min.is_finite() || !rho_max.is_finite() {
        return fail("profile coordinates must be finite".into());
    }
    if rho_min < 0.0 {
        return fail(format!("rho_min must be >= 0, got {rho_min}"));
    }
    if rho_min >= rho_max {
        return fail(format!("rho range is degenerate: [{rho_min}, {rho_max}]"));
    }
    if samples < 2 {
        return fail(format!("a profile needs at least 2 samples, got {samples}"));
    }
    validate_method_epsilon(method, eps)?;

    let n = quantity.components();
    let step = (rho_max - rho_min) / (samples - 1) as f64;
    let divergence_radius = 0.5 * step;
    let rhos: Vec<f64> = (0..samples).map(|i| rho_min + i as f64 * step).collect();

    let results: Vec<RawSample> = rhos
        .par_iter()
        .map(|&rho| {
            let mut sample = match ScaledPoint::new(rho, z) {
                Ok(p) => eval_sample(quantity, method, eps, &p, policy, divergence_radius),
                Err(_) => divergent_sample(n),
            };
            apply_weight(&mut sample, weighting, rho);
            sample
        })
        .collect();

    let mut data = Vec::with_capacity(samples * n);
    let mut flags = Vec::with_capacity(samples);
    for s in results {
        data.extend_from_slice(&s.values[..s.n]);
        flags.push(s.flag);
    }

    Ok(Profile1D {
        method,
        quantity,
        weighting,
        epsilon: eps,
        z,
        rhos,
        data,
        flags,
    })
}

// ---------------------------------------------------------------------------
// Image encoders
// ---------------------------------------------------------------------------

fn check_scalar(field: &Field2D) -> Result<(), FieldmapsError> {
    if field.components() != 1 {
        return Err(FieldmapsError::ComponentMismatch {
            expected: 1,
            got: field.components(),
        });
    }
    Ok(())
}

fn resolve_scale(
    field_max: f64,
    absolute_max: Option<f64>,
) -> Result<f64, FieldmapsError> {
    match absolute_max {
        Some(m) if m > 0.0 && m.is_finite() => Ok(m),
        Some(m) => Err(FieldmapsError::InvalidParameter {
            name: "absolute_max",
            value: m,
        }),
        None => Ok(field_max),
    }
}

fn pnm_header(magic: &str, grid: &GridSpec) -> Vec<u8> {
    format!("{magic}\n{} {}\n255\n", grid.width, grid.height).into_bytes()
}

fn to_byte(c: f64) -> u8 {
    (255.0 * c).round().clamp(0.0, 255.0) as u8
}

/// Encode a scalar field as an 8-bit binary `P5` pixmap, dark = high.
///
/// Values are max-normalized (per-image by default, or against
/// `absolute_max` for cross-figure comparability), clamped to `[0, 1]`,
/// gamma-compressed, and inverted; divergent pixels render full dark, which
/// makes primitive-mode caustics appear as the expected dark streaks.
pub fn encode_grayscale(
    field: &Field2D,
    gamma: f64,
    absolute_max: Option<f64>,
) -> Result<Vec<u8>, FieldmapsError> {
    check_scalar(field)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(FieldmapsError::InvalidParameter {
            name: "gamma",
            value: gamma,
        });
    }
    let max = resolve_scale(field.max_abs(), absolute_max)?;
    let mut out = pnm_header("P5", &field.grid);
    out.reserve(field.grid.pixel_count());
    for iy in (0..field.grid.height).rev() {
        for ix in 0..field.grid.width {
            let byte = if field.flag(ix, iy) == SampleFlag::Divergent {
                0
            } else if max > 0.0 {
                let t = (field.value(ix, iy).max(0.0) / max).clamp(0.0, 1.0);
                255 - to_byte(t.powf(gamma))
            } else {
                255
            };
            out.push(byte);
        }
    }
    Ok(out)
}

/// Encode a signed scalar field (typically `j_z`) as a `P6` pixmap on a
/// diverging colormap: white at zero, saturating to red for positive and
/// blue for negative values (square-root compressed); divergent pixels are
/// black.
pub fn encode_diverging(
    field: &Field2D,
    absolute_max: Option<f64>,
) -> Result<Vec<u8>, FieldmapsError> {
    check_scalar(field)?;
    let max = resolve_scale(field.max_abs(), absolute_max)?;
    let mut out = pnm_header("P6", &field.grid);
    out.reserve(3 * field.grid.pixel_count());
    for iy in (0..field.grid.height).rev() {
        for ix in 0..field.grid.width {
            let rgb = if field.flag(ix, iy) == SampleFlag::Divergent {
                [0, 0, 0]
            } else if max > 0.0 {
                let t = (field.value(ix, iy) / max).clamp(-1.0, 1.0);
                let fade = to_byte(1.0 - t.abs().sqrt());
                if t >= 0.0 {
                    [255, fade, fade]
                } else {
                    [fade, fade, 255]
                }
            } else {
                [255, 255, 255]
            };
            out.extend_from_slice(&rgb);
        }
    }
    Ok(out)
}

/// Map an HSV color (hue in `[0, 1)`, saturation and value in `[0, 1]`) to
/// RGB bytes by the standard hexcone construction.
fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h6 = (h * 6.0).rem_euclid(6.0);
    let i = h6.floor();
    let f = h6 - i;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match i as u32 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [to_byte(r), to_byte(g), to_byte(b)]
}

/// Encode the in-plane current `(j_ρ, j_z)` as a `P6` pixmap: hue follows
/// the flow direction `atan2(j_z, j_ρ)` around the circular colormap and
/// brightness follows the square-root-compressed magnitude. Both fields must
/// share one grid; divergent pixels render white (full bright), matching the
/// magnitude convention.
pub fn encode_flowmap(
    jrho: &Field2D,
    jz: &Field2D,
    absolute_max: Option<f64>,
) -> Result<Vec<u8>, FieldmapsError> {
    check_scalar(jrho)?;
    check_scalar(jz)?;
    if jrho.grid != jz.grid {
        return Err(FieldmapsError::GridMismatch);
    }
    let field_max = jrho
        .data
        .iter()
        .zip(&jz.data)
        .zip(jrho.flags.iter().zip(&jz.flags))
        .filter(|(_, (fa, fb))| **fa != SampleFlag::Divergent && **fb != SampleFlag::Divergent)
        .map(|((a, b), _)| a.hypot(*b))
        .fold(0.0, f64::max);
    let max = resolve_scale(field_max, absolute_max)?;
    let mut out = pnm_header("P6", &jrho.grid);
    out.reserve(3 * jrho.grid.pixel_count());
    for iy in (0..jrho.grid.height).rev() {
        for ix in 0..jrho.grid.width {
            let divergent = jrho.flag(ix, iy) == SampleFlag::Divergent
                || jz.flag(ix, iy) == SampleFlag::Divergent;
            let rgb = if divergent {
                [255, 255, 255]
            } else if max > 0.0 {
                let (a, b) = (jrho.value(ix, iy), jz.value(ix, iy));
                let mag = a.hypot(b);
                let brightness = (mag / max).clamp(0.0, 1.0).sqrt();
                let mut hue = (b.atan2(a) + PI) / (2.0 * PI);
                if hue >= 1.0 {
                    hue -= 1.0;
                }
                hsv_to_rgb(hue, 1.0, brightness)
            } else {
                [0, 0, 0]
            };
            out.extend_from_slice(&rgb);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

/// Canonical CSV number format: 12 significant digits; `−0` collapses to `0`
/// so equal values always serialize identically.
pub fn csv_number(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

/// Write the preamble shared by every CSV table: the format magic and one
/// `# key=value` comment line per metadata pair.
pub fn write_csv_preamble<W: Write>(w: &mut W, meta: &[(String, String)]) -> io::Result<()> {
    writeln!(w, "# magsource v1")?;
    for (key, value) in meta {
        writeln!(w, "# {key}={value}")?;
    }
    Ok(())
}

fn column_header(quantity: Quantity, leading: &str) -> String {
    if quantity.components() == 3 {
        format!("{leading},j_rho,j_phi,j_z,flag")
    } else {
        format!("{leading},value,flag")
    }
}

/// Write a sampled rectangle as CSV: `# magsource v1`, one `# key=value`
/// line per metadata pair, a column header, then one row per pixel with `ẑ`
/// ascending and `ρ̂` fastest.
pub fn write_map_csv<W: Write>(
    w: &mut W,
    field: &Field2D,
    meta: &[(String, String)],
) -> io::Result<()> {
    write_csv_preamble(w, meta)?;
    writeln!(w, "{}", column_header(field.quantity, "rho_hat,z_hat"))?;
    let n = field.components();
    for iy in 0..field.grid.height {
        let z = csv_number(field.grid.z_center(iy));
        for ix in 0..field.grid.width {
            let i = field.index(ix, iy);
            let values: Vec<String> = (0..n).map(|k| csv_number(field.data[i + k])).collect();
            writeln!(
                w,
                "{},{},{},{}",
                csv_number(field.grid.rho_center(ix)),
                z,
                values.join(","),
                field.flag(ix, iy).code()
            )?;
        }
    }
    Ok(())
}

/// Write a radial profile as CSV with the same preamble conventions as
/// [`write_map_csv`].
pub fn write_profile_csv<W: Write>(
    w: &mut W,
    profile: &Profile1D,
    meta: &[(String, String)],
) -> io::Result<()> {
    write_csv_preamble(w, meta)?;
    writeln!(w, "{}", column_header(profile.quantity, "rho_hat"))?;
    let n = profile.components();
    for (i, rho) in profile.rhos.iter().enumerate() {
        let values: Vec<String> = (0..n)
            .map(|k| csv_number(profile.data[i * n + k]))
            .collect();
        writeln!(
            w,
            "{},{},{}",
            csv_number(*rho),
            values.join(","),
            profile.flags[i].code()
        )?;
    }
    Ok(())
}

/// 64-bit FNV-1a hash, used to fingerprint output byte streams in
/// reproducibility checks.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes.iter().fold(OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(PRIME))
}
