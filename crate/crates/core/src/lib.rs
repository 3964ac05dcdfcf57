//! Stationary values of random walks on the directed configuration model.
//!
//! Two halves: analytic parameters of a bi-degree distribution (branching
//! process fixed points, the Cramér rate function of `log ζ̃`, and the
//! predicted exponent of `1/π_min`), and simulation of the model itself
//! (sampling, strongly connected components, stationary distributions,
//! hitting and cover times, marked Galton-Watson trees).

pub mod bp;
pub mod degree;
pub mod error;
pub mod experiment;
pub mod explore;
pub mod graph;
pub mod gw;
pub mod rate;
pub mod scc;
pub mod seed;
pub mod walk;

pub use error::{Error, Result};
