//! Time integrators for the three model problems.
//!
//! * [`parabolic`]: reaction-diffusion with Dirichlet and nonlinear Robin
//!   boundary parts, semi-implicit in time.
//! * [`transport`]: conservation law with a mass-dependent speed and a
//!   reflecting inflow boundary, first-order upwind.
//! * [`wave`]: damped-boundary wave equation in characteristic variables,
//!   first-order upwind for each family.
//!
//! Every solver is deterministic and single-threaded.

pub mod parabolic;
pub mod transport;
pub mod wave;

mod tridiag;

pub use parabolic::{solve_parabolic, HTerm, ParabolicScenario};
pub use transport::{solve_transport, SpeedAssumption, SpeedMap, TransportScenario};
pub use wave::{reconstruct_wave_state, solve_wave, WaveScenario};

use crate::error::{domain, Result};

/// Default Courant safety factor for the hyperbolic solvers.
pub const DEFAULT_CFL_SIGMA: f64 = 0.9;

/// Default tolerance for the Robin boundary solve.
pub const DEFAULT_BC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Fixed step. Required for the parabolic solver unless defaulted to `h`;
    /// for hyperbolic solvers it caps the CFL-derived step.
    pub dt: Option<f64>,
    /// Courant safety factor `σ ∈ (0, 1]` for the hyperbolic solvers.
    pub cfl_sigma: Option<f64>,
    pub t_end: f64,
    pub bc_tol: f64,
    /// Store every `m`-th step (the final step is always stored).
    pub output_stride: usize,
}

impl SolverConfig {
    pub fn new(t_end: f64) -> Self {
        Self {
            dt: None,
            cfl_sigma: None,
            t_end,
            bc_tol: DEFAULT_BC_TOL,
            output_stride: 1,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.cfl_sigma = Some(sigma);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.output_stride = stride;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.cfl_sigma.unwrap_or(DEFAULT_CFL_SIGMA)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return domain(format!("t_end must be positive, got {}", self.t_end));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return domain(format!("dt must be positive, got {dt}"));
            }
        }
        let sigma = self.sigma();
        if !(sigma > 0.0 && sigma <= 1.0) {
            return domain(format!("CFL safety factor must lie in (0, 1], got {sigma}"));
        }
        if !(self.bc_tol > 0.0) {
            return domain("bc_tol must be positive");
        }
        if self.output_stride == 0 {
            return domain("output_stride must be at least 1");
        }
        Ok(())
    }
}

/// Fixed-step clock that truncates the last step to land on `t_end`.
pub(crate) struct Clock {
    pub t: f64,
    pub step: usize,
    t_end: f64,
}

impl Clock {
    pub fn new(t_end: f64) -> Self {
        Self { t: 0.0, step: 0, t_end }
    }

    pub fn done(&self) -> bool {
        self.t >= self.t_end
    }

    /// Step to take when the nominal step is `dt`. Steps that would leave a
    /// sliver below `1e-9·dt` before `t_end` are stretched to finish instead.
    pub fn next_dt(&self, dt: f64) -> f64 {
        let remaining = self.t_end - self.t;
        if dt >= remaining * (1.0 - 1e-9) {
            remaining
        } else {
            dt
        }
    }

    pub fn advance(&mut self, dt: f64) -> f64 {
        self.step += 1;
        let next = self.t + dt;
        self.t = if (self.t_end - next).abs() <= 1e-12 * self.t_end {
            self.t_end
        } else {
            next
        };
        self.t
    }

    /// Whether the step just taken should be stored.
    pub fn store(&self, stride: usize) -> bool {
        self.step.is_multiple_of(stride) || self.done()
    }
}
