//! Numerical entanglement harvesting between two Unruh–DeWitt detectors on
//! parallel accelerated worldlines.
//!
//! * [`quadrature`] — adaptive Gauss–Kronrod integration (1D and 2D,
//!   complex-valued, global or local refinement).
//! * [`physics`] — the E and X integrals, their stationary-phase limits and
//!   the negativity.
//! * [`sweep`] — parallel, resumable evaluation over a 3D parameter grid.
//! * [`analysis`] — entanglement regions per `c3` slice and cross-strategy
//!   comparison.
//! * [`plot`] — SVG rendering of region maps.

pub mod analysis;
pub mod physics;
pub mod plot;
pub mod quadrature;
pub mod sweep;
