//! Wave equation with a pinned end and boundary velocity damping
//!
//! ```text
//! w_tt = c² w_yy + f          on (0, 1)
//! w(0, t) = 0
//! w_y(1, t) + k w_t(1, t) = d(t),    c k = 1
//! ```
//!
//! evolved in the characteristic pair `ξ = w_t + c w_y` (moving left,
//! `ξ_t − c ξ_y = f`) and `η = w_t − c w_y` (moving right,
//! `η_t + c η_y = f`). With `c k = 1` the damped end becomes `ξ(1, t) = c d(t)`
//! and the pinned end becomes `η(0, t) = −ξ(0, t)`. Both closures are assigned,
//! not solved, so they hold exactly at every stored step.

use crate::error::{domain, Error, Result};
use crate::fields::{Field, Grid, Layout, PdeClass, SolverMeta, State, Trajectory};
use crate::signals::{SpaceTimeField, TimeSignal};
use crate::solvers::{Clock, SolverConfig};

#[derive(Debug, Clone)]
pub struct WaveScenario {
    pub id: String,
    /// Wave speed `c > 0`; the damping gain is `k = 1/c`.
    pub c: f64,
    pub f: SpaceTimeField,
    /// Boundary disturbance at `y = 1`.
    pub d: TimeSignal,
    /// Initial displacement, with `w0(0) = 0`.
    pub w0: Field,
    /// Initial velocity.
    pub phi0: Field,
}

impl WaveScenario {
    pub fn k(&self) -> f64 {
        1.0 / self.c
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return domain(format!("wave speed must be positive, got {}", self.c));
        }
        let g = grid.as_1d()?;
        if g.layout() != Layout::Node {
            return domain("the wave solver needs a node-centered grid");
        }
        if self.w0.grid() != grid || self.phi0.grid() != grid {
            return Err(Error::Mismatch("initial data is not on the solver grid".into()));
        }
        let anchor = self.w0.values()[0];
        if anchor.abs() > 1e-12 {
            return domain(format!("initial displacement must vanish at y = 0, got {anchor}"));
        }
        Ok(())
    }
}

/// `w_y` of node values: centered in the interior, second-order one-sided at
/// the ends.
pub fn gradient(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len() - 1;
    let mut out = vec![0.0; n + 1];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    out[n] = (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * h);
    for i in 1..n {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    out
}

/// `(w_t, w_y) = ((ξ + η)/2, (ξ − η)/(2c))` on raw node values.
pub fn reconstruct_values(xi: &[f64], eta: &[f64], c: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(c > 0.0) {
        return domain(format!("wave speed must be positive, got {c}"));
    }
    if xi.len() != eta.len() {
        return Err(Error::Mismatch("characteristic fields differ in length".into()));
    }
    let wt = xi.iter().zip(eta).map(|(a, b)| 0.5 * (a + b)).collect();
    let wy = xi.iter().zip(eta).map(|(a, b)| (a - b) / (2.0 * c)).collect();
    Ok((wt, wy))
}

/// Recover `(w_t, w_y)` from the characteristic pair.
pub fn reconstruct_wave_state(xi: &Field, eta: &Field, c: f64) -> Result<(Field, Field)> {
    if xi.grid() != eta.grid() {
        return Err(Error::Mismatch("characteristic fields live on different grids".into()));
    }
    let (wt, wy) = reconstruct_values(xi.values(), eta.values(), c)?;
    Ok((
        Field::new(*xi.grid(), wt, xi.time())?,
        Field::new(*xi.grid(), wy, xi.time())?,
    ))
}

/// Integrate the wave scenario on a node-centered `grid` with
/// `dt = min(σ h / c, cfg.dt)`.
pub fn solve_wave(scn: &WaveScenario, grid: &Grid, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    scn.validate(grid)?;
    let g = grid.as_1d()?;
    let n = g.cells();
    let h = g.h();
    let c = scn.c;
    let mut dt = cfg.sigma() * h / c;
    if let Some(cap) = cfg.dt {
        dt = dt.min(cap);
    }
    let ys: Vec<f64> = (0..=n).map(|i| g.coord(i)).collect();

    let wy0 = gradient(scn.w0.values(), h);
    let mut xi: Vec<f64> = scn.phi0.values().iter().zip(&wy0).map(|(v, s)| v + c * s).collect();
    let mut eta: Vec<f64> = scn.phi0.values().iter().zip(&wy0).map(|(v, s)| v - c * s).collect();
    xi[n] = c * scn.d.value(0.0);
    eta[0] = -xi[0];

    let meta = SolverMeta {
        scheme: "characteristic first-order upwind, exact boundary closures".into(),
        wave_speed: Some(c),
        ..SolverMeta::default()
    };
    let mut traj = Trajectory::new(scn.id.clone(), PdeClass::Wave, *grid, meta);
    traj.push(
        0.0,
        State::Wave {
            xi: xi.clone(),
            eta: eta.clone(),
        },
    )?;
    let (mut xi_next, mut eta_next) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    let mut clock = Clock::new(cfg.t_end);
    while !clock.done() {
        let dt = clock.next_dt(dt);
        let nu = c * dt / h;
        let t = clock.t;
        for i in 0..n {
            xi_next[i] = xi[i] + nu * (xi[i + 1] - xi[i]) + dt * scn.f.eval(&[ys[i]], t);
        }
        for i in 1..=n {
            eta_next[i] = eta[i] - nu * (eta[i] - eta[i - 1]) + dt * scn.f.eval(&[ys[i]], t);
        }
        let t_new = clock.advance(dt);
        xi_next[n] = c * scn.d.value(t_new);
        eta_next[0] = -xi_next[0];
        std::mem::swap(&mut xi, &mut xi_next);
        std::mem::swap(&mut eta, &mut eta_next);
        if xi.iter().chain(&eta).any(|v| !v.is_finite()) {
            return Err(Error::SolverDiverged {
                step: clock.step,
                time: t_new,
                reason: "non-finite characteristic values".into(),
            });
        }
        traj.meta.dt_history.push(dt);
        traj.meta.courant_history.push(nu);
        if clock.store(cfg.output_stride) {
            traj.push(
                t_new,
                State::Wave {
                    xi: xi.clone(),
                    eta: eta.clone(),
                },
            )?;
        }
    }
    Ok(traj)
}
