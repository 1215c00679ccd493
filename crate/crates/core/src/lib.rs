//! Spectral simulator for a coupled wave-heat system on a rectangle.
//!
//! The displacement satisfies a wave equation driven by the Lame operator
//! with slip/no-rotation boundary conditions (`u.n = 0`, `curl u = 0` on
//! the boundary), the temperature a heat equation with no-flux boundaries,
//! and the two exchange energy through a bilinear coupling with constant
//! `nu`. On a rectangle both operators have closed-form eigenbases, so the
//! discretization expands every field in those modes, integrates the linear
//! dynamics exactly per mode, and evaluates the coupling pseudospectrally
//! with exact dealiasing.
//!
//! Module map:
//! * [`domain`], [`field`], [`basis`] - the eigenbasis, transforms, and
//!   spectral calculus;
//! * [`helmholtz`] - exact splitting into divergence-free and curl-free
//!   parts;
//! * [`dynamics`] - Strang stepping with exact linear substeps, plus an RK4
//!   reference route;
//! * [`diagnostics`] - energy/entropy/Fisher functionals and inequality
//!   checks;
//! * [`asymptotics`] - the limit temperature, closed-form wave modes,
//!   decay and stability experiments;
//! * [`config`], [`presets`], [`runner`], [`verify`] - CLI-facing plumbing.

pub mod asymptotics;
pub mod basis;
pub mod config;
pub mod diagnostics;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod helmholtz;
pub mod presets;
pub mod runner;
pub mod verify;

pub use basis::Basis;
pub use domain::{DomainSpec, ScalarMode, VectorKind, VectorMode};
pub use dynamics::{PhysParams, SimState, StepperConfig};
pub use error::{Result, SimError};
pub use field::{ScalarField, VectorField};
