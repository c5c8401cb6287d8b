//! Transport equation with a mass-dependent speed
//!
//! ```text
//! ρ_t + (λ(W(t)) ρ)_y = 0,     W(t) = ∫₀¹ ρ(y, t) dy
//! ρ(0, t) = k ρ(1, t) + d(t)
//! ```
//!
//! on the unit interval with `λ > 0`, so the flow runs left to right. The
//! scheme is conservative first-order upwind on cell averages. The speed is
//! spatially constant, so the flux form and the advective form coincide.

use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::fields::{Field, Grid, Layout, PdeClass, SolverMeta, State, Trajectory};
use crate::signals::TimeSignal;
use crate::solvers::{Clock, SolverConfig};

/// Half-width of the sampled range used to check the speed assumptions.
const CHECK_RANGE: f64 = 100.0;
const CHECK_SAMPLES: usize = 401;

/// Velocity map `λ: ℝ → ℝ_{>0}` with a label for reports.
#[derive(Clone)]
pub struct SpeedMap {
    pub label: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl SpeedMap {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    pub fn constant(v: f64) -> Self {
        Self::new(format!("constant {v}"), move |_| v)
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }
}

impl std::fmt::Debug for SpeedMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("SpeedMap").field(&self.label).finish()
    }
}

/// Structural assumption on the speed map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpeedAssumption {
    /// Uniform lower bound `λ(s) >= λ₀ > 0` for all `s`.
    Bounded { lambda0: f64 },
    /// `λ` nonincreasing on `[0, ∞)` with `λ(s) >= λ(|s|)`; only local
    /// estimates are available.
    Decreasing,
}

#[derive(Debug, Clone)]
pub struct TransportScenario {
    pub id: String,
    pub lambda: SpeedMap,
    pub assumption: SpeedAssumption,
    /// Boundary feedback gain, `|k| < 1`.
    pub k: f64,
    /// Boundary disturbance.
    pub d: TimeSignal,
    /// Initial density on a cell-centered grid.
    pub rho0: Field,
}

impl TransportScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.k.abs() < 1.0) {
            return domain(format!("|k| must be < 1, got k = {}", self.k));
        }
        let sample = |i: usize| -CHECK_RANGE + 2.0 * CHECK_RANGE * i as f64 / (CHECK_SAMPLES - 1) as f64;
        for i in 0..CHECK_SAMPLES {
            let s = sample(i);
            let v = self.lambda.eval(s);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::AssumptionViolation(format!(
                    "speed map '{}' is not positive at {s}: {v}",
                    self.lambda.label
                )));
            }
        }
        match self.assumption {
            SpeedAssumption::Bounded { lambda0 } => {
                if !(lambda0 > 0.0) {
                    return domain(format!("lambda0 must be positive, got {lambda0}"));
                }
                for i in 0..CHECK_SAMPLES {
                    let s = sample(i);
                    if self.lambda.eval(s) < lambda0 {
                        return Err(Error::AssumptionViolation(format!(
                            "speed {} at {s} is below lambda0 = {lambda0}",
                            self.lambda.eval(s)
                        )));
                    }
                }
            }
            SpeedAssumption::Decreasing => {
                let half = CHECK_SAMPLES / 2;
                let mut prev = self.lambda.eval(0.0);
                for i in 1..=half {
                    let s = CHECK_RANGE * i as f64 / half as f64;
                    let v = self.lambda.eval(s);
                    if v > prev {
                        return Err(Error::AssumptionViolation(format!(
                            "speed map increases on [0, inf) near {s}"
                        )));
                    }
                    if self.lambda.eval(-s) < v {
                        return Err(Error::AssumptionViolation(format!(
                            "speed at {} is below the speed at {s}",
                            -s
                        )));
                    }
                    prev = v;
                }
            }
        }
        Ok(())
    }
}

/// Integrate the transport scenario on a cell-centered `grid`.
///
/// Each step recomputes the mass `W = h Σ ρ_i` and takes
/// `dt = min(σ h/λ(W), cfg.dt, remaining)`. The inflow value uses the
/// outflow cell of the current step.
pub fn solve_transport(scn: &TransportScenario, grid: &Grid, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    scn.validate()?;
    let g = grid.as_1d()?;
    if g.layout() != Layout::Cell {
        return domain("the transport solver needs a cell-centered grid");
    }
    if scn.rho0.grid() != grid {
        return Err(Error::Mismatch("initial density is not on the solver grid".into()));
    }
    let n = g.cells();
    let h = g.h();
    let sigma = cfg.sigma();
    let meta = SolverMeta {
        scheme: "conservative first-order upwind, mass-dependent speed, CFL-limited step".into(),
        ..SolverMeta::default()
    };
    let mut traj = Trajectory::new(scn.id.clone(), PdeClass::Transport, *grid, meta);
    let mut rho = scn.rho0.values().to_vec();
    traj.push(0.0, State::Transport { rho: rho.clone() })?;
    let mut next = vec![0.0; n];
    let mut clock = Clock::new(cfg.t_end);
    while !clock.done() {
        let mass = h * rho.iter().sum::<f64>();
        let speed = scn.lambda.eval(mass);
        if !(speed > 0.0) || !speed.is_finite() {
            return Err(Error::AssumptionViolation(format!(
                "speed λ(W) = {speed} at W = {mass}, t = {}",
                clock.t
            )));
        }
        let mut dt = sigma * h / speed;
        if let Some(cap) = cfg.dt {
            dt = dt.min(cap);
        }
        let mut dt = clock.next_dt(dt);
        // rounding in σh/λ can overshoot σ by one ulp
        while speed * dt / h > sigma {
            dt = f64::from_bits(dt.to_bits() - 1);
        }
        let nu = speed * dt / h;
        let inflow = scn.k * rho[n - 1] + scn.d.value(clock.t);
        next[0] = rho[0] - nu * (rho[0] - inflow);
        for i in 1..n {
            next[i] = rho[i] - nu * (rho[i] - rho[i - 1]);
        }
        std::mem::swap(&mut rho, &mut next);
        let t_new = clock.advance(dt);
        if rho.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverDiverged {
                step: clock.step,
                time: t_new,
                reason: "non-finite density".into(),
            });
        }
        traj.meta.dt_history.push(dt);
        traj.meta.courant_history.push(nu);
        if clock.store(cfg.output_stride) {
            traj.push(t_new, State::Transport { rho: rho.clone() })?;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid1D;

    fn cells(n: usize) -> Grid {
        Grid::D1(Grid1D::new(n, Layout::Cell).unwrap())
    }

    fn scenario(grid: Grid, k: f64, d: f64, rho0: impl Fn(&[f64]) -> f64) -> TransportScenario {
        TransportScenario {
            id: "test".into(),
            lambda: SpeedMap::constant(1.0),
            assumption: SpeedAssumption::Bounded { lambda0: 1.0 },
            k,
            d: TimeSignal::constant(d),
            rho0: Field::from_fn(grid, 0.0, rho0).unwrap(),
        }
    }

    #[test]
    fn steady_state_is_preserved() {
        let g = cells(100);
        let scn = scenario(g, 0.5, 0.5, |_| 1.0);
        let tr = solve_transport(&scn, &g, &SolverConfig::new(10.0).with_sigma(0.8)).unwrap();
        assert!(tr.meta.dt_history.len() >= 1000);
        for s in tr.frames() {
            let State::Transport { rho } = s else { panic!() };
            assert!(rho.iter().all(|v| (v - 1.0).abs() <= 1e-10));
        }
    }

    #[test]
    fn zero_state_is_preserved() {
        let g = cells(32);
        let scn = scenario(g, 0.5, 0.0, |_| 0.0);
        let tr = solve_transport(&scn, &g, &SolverConfig::new(2.0)).unwrap();
        assert!(tr
            .frames()
            .iter()
            .all(|s| matches!(s, State::Transport { rho } if rho.iter().all(|&v| v == 0.0))));
    }

    #[test]
    fn courant_number_never_exceeds_sigma() {
        let g = cells(64);
        let mut scn = scenario(g, -0.3, 0.2, |p| (3.0 * p[0]).sin().abs());
        scn.lambda = SpeedMap::new("1/(1+|s|)", |s: f64| 1.0 / (1.0 + s.abs()));
        scn.assumption = SpeedAssumption::Decreasing;
        let sigma = 0.7;
        let tr = solve_transport(&scn, &g, &SolverConfig::new(3.0).with_sigma(sigma)).unwrap();
        assert!(tr.meta.courant_history.iter().all(|&nu| nu <= sigma));
    }

    #[test]
    fn validation_errors() {
        let g = cells(16);
        assert!(scenario(g, 1.0, 0.0, |_| 0.0).validate().is_err());
        let mut scn = scenario(g, 0.5, 0.0, |_| 0.0);
        scn.lambda = SpeedMap::new("sign", |s: f64| s);
        assert!(matches!(scn.validate(), Err(Error::AssumptionViolation(_))));
        let mut scn = scenario(g, 0.5, 0.0, |_| 0.0);
        scn.lambda = SpeedMap::new("1+s^2", |s: f64| 1.0 + s * s);
        scn.assumption = SpeedAssumption::Decreasing;
        assert!(scn.validate().is_err());
    }

    #[test]
    fn node_grid_is_rejected() {
        let g = Grid::D1(Grid1D::new(16, Layout::Node).unwrap());
        let scn = scenario(g, 0.5, 0.0, |_| 0.0);
        assert!(solve_transport(&scn, &g, &SolverConfig::new(1.0)).is_err());
    }
}
