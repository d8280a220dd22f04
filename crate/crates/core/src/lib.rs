//! Pricing engine for carbon emission allowance certificates built on the
//! electricity bid stack.
//!
//! The model chain: stochastic electricity demand is pushed through the
//! merit order of a carbon-adjusted bid stack ([`stack`]), which yields the
//! market emissions rate. Cumulative emissions drive the digital compliance
//! payoff of an allowance certificate ([`scheme`]); the certificate price
//! solves a semilinear degenerate PDE in (t, demand, emissions) that is
//! integrated with an explicit upwind finite-difference scheme ([`pde`]).
//! European calls on the certificate solve a linear PDE with the same
//! stencil ([`option`]), and [`mc`] runs Euler path simulations of the
//! coupled system to estimate expected cumulative emissions under a range
//! of penalty levels. [`analysis`] provides the mesh-refinement convergence
//! harness and [`config`] the file-based configuration surface shared with
//! the command line.

pub mod analysis;
pub mod config;
pub mod demand;
pub mod error;
pub mod grid;
pub mod mc;
pub mod option;
pub mod pde;
pub mod quad;
pub mod scheme;
pub mod stack;

pub use config::EngineConfig;
pub use demand::JacobiParams;
pub use error::{ConfigError, EngineError};
pub use grid::{Grid, SolvedSurfaces, StorePolicy, ValueSurface};
pub use mc::{McResult, PathConfig};
pub use option::OptionSpec;
pub use pde::EmissionsRateTable;
pub use scheme::{Mechanism, SchemeParams, TwoPeriodScheme};
pub use stack::{ActiveSet, StackParams};
