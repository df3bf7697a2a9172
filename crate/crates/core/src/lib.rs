//! Desk-scale numerics for conformally immersed surfaces in `R^n`.
//!
//! The crate samples conformal parameterizations on structured grids and
//! computes the quantities classical surface theory attaches to them:
//! conformal factor, second fundamental form, mean and Gauss curvature,
//! Willmore-type energies, the Gauss map and its energy. On top of that
//! sit the analytic tools used to study degenerating families:
//!
//! * [`liouville`] — Newtonian-potential solver for `-Δv = K e^{2u}` and
//!   harmonicity diagnostics for `u - v`;
//! * [`branch`] — classification of isolated singularities by branching
//!   order, density ratios and blow-up limits;
//! * [`mobius`] — Möbius transformations with exact conformal-factor
//!   bookkeeping and the inversion energy identity;
//! * [`varifold`] — ball-growth statistics: Simon's monotonicity
//!   function, densities, Li-Yau and diameter bounds;
//! * [`moduli`] — torus lattice normalization and hyperbolic collar
//!   geometry for surfaces degenerating in moduli space.
//!
//! The [`catalog`] module provides the closed-form example surfaces the
//! test-suite and CLI experiments are built on.

pub mod branch;
pub mod catalog;
pub mod error;
pub(crate) mod exec;
pub mod fd;
pub mod geometry;
pub mod grid;
pub mod immersion;
pub mod interp;
pub mod jet;
pub(crate) mod linalg;
pub mod liouville;
pub mod mobius;
pub mod moduli;
pub mod varifold;

pub use error::ConfsurfError;
pub use geometry::{EnergyReport, GeometryFields};
pub use grid::{DomainKind, Grading, GridLayout, ParamGrid};
pub use immersion::{DerivativeSource, SampledImmersion, Surface};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, ConfsurfError>;
