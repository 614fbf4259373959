//! Rotation-rate estimation for quasiperiodic trajectories observed through
//! projections.
//!
//! A quasiperiodic trajectory lives on a `d`-torus where the dynamics are a
//! rigid rotation `θ ↦ θ + ρ (mod 1)`. In practice one rarely observes torus
//! coordinates; instead one sees a projection of the orbit onto a circle or a
//! plane, often with self-overlapping geometry. This crate computes the
//! rotation rate of such a projection from the observed sequence alone:
//!
//! * [`torus`] -- mod-1 arithmetic, the flat torus metric, rigid-rotation
//!   orbit generation, and unimodular coordinate changes;
//! * [`birkhoff`] -- plain and weighted Birkhoff averages with smooth bump
//!   weights and convergence diagnostics;
//! * [`projections`] -- Fourier-series test curves, angle extraction about a
//!   reference point, winding numbers, and scalar delay pairs;
//! * [`embedding`] -- delay-coordinate vectors and the product metric used to
//!   separate integer translates of the lifted angle-difference graph;
//! * [`lift`] -- the offset-continuation algorithm that assigns an integer
//!   lift to each angle difference, plus ground-truth oracles and
//!   near-return chain diagnostics;
//! * [`cr3bp`] -- the planar circular restricted three-body problem with a
//!   fixed-step 8th-order Runge-Kutta integrator and continuous-time angle
//!   unwrapping;
//! * [`pipeline`] -- the end-to-end estimator gluing the above together.
//!
//! All numerics are generic over the scalar type through the [`Real`] trait,
//! implemented for `f32`, `f64`, and the software double-double type [`Dd`]
//! used by the extended-precision mode.

pub mod birkhoff;
pub mod cr3bp;
pub mod dd;
pub mod embedding;
pub mod grid;
pub mod lift;
pub mod pipeline;
pub mod projections;
pub mod scalar;
pub mod sum;
pub mod torus;

pub use dd::Dd;
pub use scalar::Real;

/// Concrete aliases for the common double-precision instantiation.
pub type TorusPoint64 = torus::TorusPoint<f64>;
pub type RotationVector64 = torus::RotationVector<f64>;
pub type PlanarPoint64 = projections::PlanarPoint<f64>;
pub type FourierCurve64 = projections::FourierCurve<f64>;
pub type DelayCloud64 = embedding::DelayCloud<f64>;
pub type LiftedSeries64 = lift::LiftedSeries<f64>;
pub type Cr3bpState64 = cr3bp::Cr3bpState<f64>;
