//! Simulation and certification of input-to-state stability for parabolic,
//! transport and wave equations driven by in-domain and boundary disturbances.
//!
//! The crate solves each model numerically, evaluates truncated
//! (Stampacchia-type) Lyapunov functionals along the computed trajectories and
//! audits the trajectories against closed-form ISS estimates.
//!
//! Modules, bottom up:
//!
//! * [`trunc`]: the truncation pair `(g, G)` and its inequalities.
//! * [`comparison`]: monotone maps, inversion and gain composition.
//! * [`signals`]: disturbance signals and sup-norm queries.
//! * [`fields`]: grids, discrete fields, trajectories and `L^q` norms.
//! * [`solvers`]: time integrators for the three model problems.
//! * [`glf`]: truncation levels and generalized Lyapunov functionals.
//! * [`certify`]: closed-form bounds and trajectory checks.
//! * [`export`]: CSV writers for trajectories, functional series and reports.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod comparison;
pub mod error;
pub mod export;
pub mod fields;
pub mod glf;
pub mod signals;
pub mod solvers;
pub mod trunc;

pub use certify::{BoundKind, CheckReport, IssBound};
pub use comparison::{KlBound, MonotoneFn};
pub use error::{Error, Result};
pub use fields::{Field, Grid, Grid1D, Grid2D, Layout, PdeClass, State, Trajectory};
pub use glf::{GlfSeries, GlfSpec};
pub use signals::{Profile, SpaceTimeField, TimeSignal};
pub use solvers::{ParabolicScenario, SolverConfig, TransportScenario, WaveScenario};
pub use trunc::TruncationPair;
