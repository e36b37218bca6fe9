//! Numerical laboratory for the Euler–Korteweg system with no-flux walls and
//! its zero-capillarity limit towards compressible Euler.

pub mod boundary_layer;
pub mod ek;
pub mod entropy;
pub mod euler;
pub mod grid;
pub mod harness;
pub mod nls;
pub mod state;

#[cfg(test)]
pub(crate) mod quadrature;

pub use boundary_layer::{BoundaryLayerField, Cutoff};
pub use ek::{EkConfig, EkError, EkSolver, EkTrajectory, Reconstruction};
pub use entropy::{EntropyReport, EntropyRow};
pub use euler::{EulerConfig, EulerReference, EulerSnapshot, EulerSolver};
pub use grid::{Field, FlowState, GhostPolicy, Grid1D};
pub use nls::{NlsSolver, WaveState};
pub use state::{StateError, StateFunctions};
