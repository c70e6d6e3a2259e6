//! Fields of a monoenergetic point source of charges in a uniform magnetic field.
//!
//! A point source embedded in a homogeneous magnetic field `ℬ ẑ` emits
//! monoenergetic charges in all directions. Their spiraling orbits refocus and
//! interfere, producing an intricate stationary pattern of particle density
//! and probability current. This crate computes those fields three ways and
//! cross-validates them:
//!
//! * **quantum** — the exact energy Green function as a sum over Landau
//!   channels (transverse Landau level × longitudinal plane or evanescent
//!   wave), with analytic gradients ([`quantum`]);
//! * **primitive** semiclassical — a coherent sum over all classical orbits
//!   connecting source and destination, with amplitudes from the classical
//!   density and Maslov phase indices ([`classical`], [`semiclassical`]);
//! * **uniform** semiclassical — the same orbit sum with each coalescing
//!   fast/slow orbit pair folded through an Airy-function uniform
//!   approximation that stays finite on the caustics ([`semiclassical`]).
//!
//! Everything is computed in the universal dimensionless form of the problem:
//! lengths in units of the cyclotron diameter `v₀/ω_L`, flight times in units
//! of the inverse Larmor frequency `1/ω_L`, and a single parameter
//! `ε = E/(ħω_L)` controlling the wave pattern ([`scaling`]).
//!
//! The [`fieldmaps`] module samples any of these quantities over rectangles
//! or radial profiles and encodes portable-pixmap images and CSV tables; the
//! [`cli`] module wires it all to a command-line binary (`magsource`).

pub mod classical;
pub mod cli;
pub mod fieldmaps;
pub mod quantum;
pub mod scaling;
pub mod semiclassical;
pub mod specialfn;

pub use scaling::{PhysicalParams, ScaledPoint, ScalingContext};
