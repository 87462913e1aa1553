#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Lemniscates, logarithmic capacity and harmonic measure of rational
//! functions `R(z) = Σ a_i / (z - p_i)`.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, reports and the
//! command-line front end live in the companion `lemnis` crate.
//!
//! Module map:
//!
//! - [`poly`], [`ratfunc`]: polynomials, partial-fraction rational functions,
//!   zeros, critical points and the Laurent data at infinity.
//! - [`lemniscate`]: level-set tracing of `{|R| = t}` with component and
//!   containment structure, goodness checks and point queries.
//! - [`capacity`]: logarithmic capacity by a panel (boundary element) solve
//!   and by Leja points, plus closed forms and discrete energies.
//! - [`harmonic`]: walk-on-spheres harmonic measure, Möbius transport, the
//!   image-arclength measure and the reflection/energy checks.
//! - [`bounds`]: the component capacity bounds, injectivity certificates,
//!   the ε-pole sweep and the unbounded-ratio family.
//! - [`schwarz`]: the monotone `t^{1/m} cap(K_t)` sweep.

extern crate alloc;

pub mod bounds;
pub mod capacity;
mod contour;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod lemniscate;
mod linalg;
pub mod poly;
pub mod ratfunc;
pub mod rng;
pub mod schwarz;

pub use num_complex::Complex64 as C64;

pub use bounds::{
    certify_injectivity_radius, counterexample_experiment, epsilon_sweep, injectivity_constant, verify_lower_bounds,
    verify_upper_bound, BoundsOptions, BoundsReport, InjectivityCertificate,
};
pub use capacity::{
    cap_fekete, cap_panel, cap_polynomial_preimage, mutual_energy, self_energy, CapacityEstimate, CapacityMethod,
    DiscreteMeasure,
};
pub use error::{Error, Result};
pub use geometry::{Polyline, Rect};
pub use harmonic::{
    image_arc_measure, moebius_transport, verify_energy_identity, verify_reflection, wos, ArcPartition, DomainSide,
    HarmonicMeasureReport, Source,
};
pub use lemniscate::{is_good, trace, GoodnessReport, Lemniscate, TraceOptions, Window};
pub use poly::Polynomial;
pub use ratfunc::{CriticalData, RationalFunction, Zeros};
pub use schwarz::{default_levels, sweep_f, SweepResult};
