//! Numerical laboratory for 1-D sphere-valued wave maps in null coordinates.
//!
//! The crate builds smooth small initial data from bump profiles, evolves it
//! with a constraint-preserving characteristic integrator, extracts the
//! asymptotic traveling-wave structure (F, G, alpha), evaluates the
//! small-amplitude expansion in closed form, and measures homogeneous
//! Sobolev/Besov norms of slices together with the explicit low-frequency
//! lower bound that drives their growth.

pub mod bump;
pub mod data;
pub mod error;
pub mod evolve;
pub mod experiments;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod perturb;
pub mod profile;
pub mod quad;
pub mod spectral;

pub use bump::{make_bump_pair, BumpProfile, BumpShape};
pub use data::{build_initial_data, smallness_check, DataSpec, Truncation};
pub use error::{Error, Result};
pub use field::{NullField, SphereSlice};
pub use grid::Grid1D;
