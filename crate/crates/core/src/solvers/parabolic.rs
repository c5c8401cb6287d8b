//! Reaction-diffusion equation
//!
//! ```text
//! w_t = div(a ∇w) − c·φ(w) − h(y, t, w) + f     in Ω
//! w   = d₁                                      on Γ₁
//! a ∂w/∂ν = −ϕ(w) + d₂                          on Γ₂
//! ```
//!
//! on the unit interval or square. Each step evaluates reaction, absorption
//! and forcing explicitly, fixes the boundary values at the new time, then
//! solves the diffusion implicitly with face-averaged coefficients (one
//! tridiagonal solve per line; the square uses x-sweeps followed by
//! y-sweeps).
//!
//! A Robin node takes the value `w_b` solving
//! `a (w_b − w_in)/h + ϕ(w_b) = d₂`, where `w_in` is the inward neighbour at
//! the old time. The left side is increasing in `w_b`, so bisection on an
//! expanding bracket always converges.
//!
//! In the square a corner is Dirichlet when either adjacent edge is, and
//! otherwise follows the Robin rule of its left/right edge.

use std::sync::Arc;

use crate::comparison::MonotoneFn;
use crate::error::{domain, Error, Result};
use crate::fields::{EdgeKind, Field, Grid, Grid1D, Grid2D, Layout, PdeClass, SolverMeta, State, Trajectory};
use crate::signals::SpaceTimeField;
use crate::solvers::{tridiag, Clock, SolverConfig};

/// Absorbing term `h(point, t, w)`.
pub type HTerm = Arc<dyn Fn(&[f64], f64, f64) -> f64 + Send + Sync>;

/// Sample count per axis for the scenario admissibility checks.
const CHECK_SAMPLES: usize = 65;

#[derive(Clone)]
pub struct ParabolicScenario {
    pub id: String,
    /// Diffusivity, bounded below by `a0 > 0`.
    pub a: SpaceTimeField,
    /// Reaction weight, bounded below by `c0 >= 0`.
    pub c: SpaceTimeField,
    pub a0: f64,
    pub c0: f64,
    /// Reaction nonlinearity.
    pub phi: MonotoneFn,
    /// Absorbing term; `None` means zero.
    pub h_term: Option<HTerm>,
    /// Boundary nonlinearity on the Robin part.
    pub varphi: MonotoneFn,
    pub f: SpaceTimeField,
    pub d1: SpaceTimeField,
    pub d2: SpaceTimeField,
    pub w0: Field,
    /// Boundary labels of the interval ends `y = 0` and `y = 1` (1D only; the
    /// square carries its labels on the grid).
    pub ends: [EdgeKind; 2],
}

impl std::fmt::Debug for ParabolicScenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParabolicScenario")
            .field("id", &self.id)
            .field("a0", &self.a0)
            .field("c0", &self.c0)
            .field("phi", &self.phi)
            .field("varphi", &self.varphi)
            .field("ends", &self.ends)
            .finish_non_exhaustive()
    }
}

impl ParabolicScenario {
    /// Check the structural conditions on the coefficients and nonlinearities
    /// by sampling, over the grid points and `[0, t_end]`.
    pub fn validate(&self, grid: &Grid, t_end: f64) -> Result<()> {
        if !(self.a0 > 0.0) {
            return domain(format!("a0 must be positive, got {}", self.a0));
        }
        if !(self.c0 >= 0.0) {
            return domain(format!("c0 must be nonnegative, got {}", self.c0));
        }
        if self.w0.grid() != grid {
            return Err(Error::Mismatch("initial field is not on the solver grid".into()));
        }
        if let Grid::D1(g) = grid {
            if g.layout() != Layout::Node {
                return domain("the parabolic solver needs a node-centered grid");
            }
        }
        let points = grid.points();
        let stride = (points.len() / CHECK_SAMPLES).max(1);
        let times: Vec<f64> = (0..=8).map(|k| t_end * k as f64 / 8.0).collect();
        for p in points.iter().step_by(stride) {
            for &t in &times {
                let a = self.a.eval(p, t);
                if !(a >= self.a0) {
                    return domain(format!("diffusivity {a} at {p:?}, t = {t} is below a0 = {}", self.a0));
                }
                let c = self.c.eval(p, t);
                if !(c >= self.c0) {
                    return domain(format!(
                        "reaction weight {c} at {p:?}, t = {t} is below c0 = {}",
                        self.c0
                    ));
                }
            }
        }
        check_odd_dominated(&self.phi)?;
        check_odd_dominated(&self.varphi)?;
        check_slope_at_least_one(&self.phi)?;
        if let Some(h) = &self.h_term {
            let (lo, hi) = self.phi.domain();
            let span = lo.abs().max(hi.abs());
            for p in points.iter().step_by(stride) {
                for &t in &times {
                    for k in 0..=16 {
                        let v = -span + 2.0 * span * k as f64 / 16.0;
                        let hv = h(p, t, v);
                        if !(hv * v >= 0.0) {
                            return domain(format!("absorbing term has h·w = {} < 0 at w = {v}", hv * v));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// `m(v)·v >= 0` and `m(−v) <= −m(v)` for `v >= 0` on the validated range.
fn check_odd_dominated(m: &MonotoneFn) -> Result<()> {
    let (lo, hi) = m.domain();
    let span = lo.abs().min(hi.abs()).max(0.0);
    for k in 0..CHECK_SAMPLES {
        let v = span * k as f64 / (CHECK_SAMPLES - 1) as f64;
        let (pos, neg) = (m.eval(v), m.eval(-v));
        if pos * v < 0.0 || neg * (-v) < 0.0 {
            return not_admissible(m, format!("sign condition fails at ±{v}"));
        }
        if neg > -pos + 1e-12 * (1.0 + pos.abs()) {
            return not_admissible(m, format!("m(-v) > -m(v) at v = {v}"));
        }
    }
    Ok(())
}

/// Sampled difference quotients of `φ` are at least 1.
fn check_slope_at_least_one(m: &MonotoneFn) -> Result<()> {
    let (lo, hi) = m.domain();
    let n = CHECK_SAMPLES - 1;
    let step = (hi - lo) / n as f64;
    for k in 0..n {
        let a = lo + k as f64 * step;
        let slope = (m.eval(a + step) - m.eval(a)) / step;
        if slope < 1.0 - 1e-9 {
            return not_admissible(m, format!("slope {slope} < 1 on [{a}, {}]", a + step));
        }
    }
    Ok(())
}

fn not_admissible(m: &MonotoneFn, reason: String) -> Result<()> {
    Err(Error::NotAdmissible {
        label: m.label().to_string(),
        reason,
    })
}

/// Solve `a (w_b − w_in)/h + ϕ(w_b) = d₂` for the Robin node value.
fn robin_value(varphi: &MonotoneFn, a: f64, h: f64, w_in: f64, d2: f64, tol: f64) -> Option<f64> {
    let residual = |w: f64| a * (w - w_in) / h + varphi.eval(w) - d2;
    let r0 = residual(w_in);
    if r0 == 0.0 {
        return Some(w_in);
    }
    // expand a bracket from w_in towards the root
    let dir = if r0 > 0.0 { -1.0 } else { 1.0 };
    let mut step = 1.0f64.max(w_in.abs());
    let mut far = w_in + dir * step;
    let mut expansions = 0;
    while residual(far) * dir < 0.0 {
        step *= 2.0;
        far = w_in + dir * step;
        expansions += 1;
        if expansions > 200 || !far.is_finite() {
            return None;
        }
    }
    let (mut lo, mut hi) = if dir > 0.0 { (w_in, far) } else { (far, w_in) };
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let r = residual(mid);
        if r == 0.0 || hi - lo <= tol * (1.0 + mid.abs()) {
            return Some(mid);
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

struct Stepper<'a> {
    scn: &'a ParabolicScenario,
    cfg: &'a SolverConfig,
    points: Vec<Vec<f64>>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn diverged(step: usize, time: f64, reason: impl Into<String>) -> Error {
        Error::SolverDiverged {
            step,
            time,
            reason: reason.into(),
        }
    }

    /// Explicit reaction, absorption and forcing at every node.
    fn explicit(&self, w: &[f64], t: f64, dt: f64) -> Vec<f64> {
        let scn = self.scn;
        w.iter()
            .zip(&self.points)
            .map(|(&v, p)| {
                let absorb = scn.h_term.as_ref().map_or(0.0, |h| h(p, t, v));
                v + dt * (-scn.c.eval(p, t) * scn.phi.eval(v) - absorb + scn.f.eval(p, t))
            })
            .collect()
    }

    fn boundary_value(&self, kind: EdgeKind, p: &[f64], t: f64, w_in: f64, h: f64) -> Option<f64> {
        match kind {
            EdgeKind::Dirichlet => Some(self.scn.d1.eval(p, t)),
            EdgeKind::Robin => robin_value(
                &self.scn.varphi,
                self.scn.a.eval(p, t),
                h,
                w_in,
                self.scn.d2.eval(p, t),
                self.cfg.bc_tol,
            ),
        }
    }

    /// Implicit diffusion along one line of `len + 1` nodes whose two end
    /// values are fixed. `idx(k)` maps the line position to storage.
    fn sweep(&mut self, w: &mut [f64], idx: impl Fn(usize) -> usize, len: usize, h: f64, t: f64, dt: f64) -> bool {
        let m = len - 1;
        let r = dt / (h * h);
        let a: Vec<f64> = (0..=len).map(|k| self.scn.a.eval(&self.points[idx(k)], t)).collect();
        self.lower.clear();
        self.diag.clear();
        self.upper.clear();
        self.rhs.clear();
        for k in 1..=m {
            let a_minus = 0.5 * (a[k - 1] + a[k]);
            let a_plus = 0.5 * (a[k] + a[k + 1]);
            self.lower.push(-r * a_minus);
            self.diag.push(1.0 + r * (a_minus + a_plus));
            self.upper.push(-r * a_plus);
            let mut b = w[idx(k)];
            if k == 1 {
                b += r * a_minus * w[idx(0)];
            }
            if k == m {
                b += r * a_plus * w[idx(len)];
            }
            self.rhs.push(b);
        }
        if !tridiag::solve(&self.lower, &self.diag, &self.upper, &mut self.rhs, &mut self.scratch) {
            return false;
        }
        for k in 1..=m {
            w[idx(k)] = self.rhs[k - 1];
        }
        true
    }

    fn step_1d(&mut self, g: &Grid1D, w: &[f64], t: f64, dt: f64, step: usize) -> Result<Vec<f64>> {
        let n = g.cells();
        let h = g.h();
        let t_new = t + dt;
        let mut next = self.explicit(w, t, dt);
        let left = self.boundary_value(self.scn.ends[0], &[0.0], t_new, w[1], h);
        let right = self.boundary_value(self.scn.ends[1], &[1.0], t_new, w[n - 1], h);
        match (left, right) {
            (Some(l), Some(r)) => {
                next[0] = l;
                next[n] = r;
            }
            _ => return Err(Self::diverged(step, t_new, "Robin boundary solve failed")),
        }
        if !self.sweep(&mut next, |k| k, n, h, t_new, dt) {
            return Err(Self::diverged(step, t_new, "singular tridiagonal pivot"));
        }
        Ok(next)
    }

    fn step_2d(&mut self, g: &Grid2D, w: &[f64], t: f64, dt: f64, step: usize) -> Result<Vec<f64>> {
        let (nx, ny) = (g.nx(), g.ny());
        let (hx, hy) = (g.hx(), g.hy());
        let edges = g.edges();
        let t_new = t + dt;
        let mut next = self.explicit(w, t, dt);
        let fail = || Self::diverged(step, t_new, "Robin boundary solve failed");
        // left/right edges, corners included
        for j in 0..=ny {
            for (i, inner, kind) in [(0, 1, edges.left), (nx, nx - 1, edges.right)] {
                let corner = j == 0 || j == ny;
                let vertical = if j == 0 { edges.bottom } else { edges.top };
                let kind = if corner && vertical == EdgeKind::Dirichlet {
                    EdgeKind::Dirichlet
                } else {
                    kind
                };
                let p = g.coord(i, j);
                next[g.index(i, j)] = self
                    .boundary_value(kind, &p, t_new, w[g.index(inner, j)], hx)
                    .ok_or_else(fail)?;
            }
        }
        // bottom/top edges without corners
        for i in 1..nx {
            for (j, inner, kind) in [(0, 1, edges.bottom), (ny, ny - 1, edges.top)] {
                let p = g.coord(i, j);
                next[g.index(i, j)] = self
                    .boundary_value(kind, &p, t_new, w[g.index(i, inner)], hy)
                    .ok_or_else(fail)?;
            }
        }
        for j in 1..ny {
            if !self.sweep(&mut next, |k| g.index(k, j), nx, hx, t_new, dt) {
                return Err(Self::diverged(step, t_new, "singular pivot in x-sweep"));
            }
        }
        for i in 1..nx {
            if !self.sweep(&mut next, |k| g.index(i, k), ny, hy, t_new, dt) {
                return Err(Self::diverged(step, t_new, "singular pivot in y-sweep"));
            }
        }
        Ok(next)
    }
}

/// Integrate the reaction-diffusion scenario on `grid` up to `cfg.t_end`.
///
/// Uses `cfg.dt`, defaulting to `h` when unset.
pub fn solve_parabolic(scn: &ParabolicScenario, grid: &Grid, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    scn.validate(grid, cfg.t_end)?;
    let dt = cfg.dt.unwrap_or_else(|| grid.h());
    let meta = SolverMeta {
        scheme: "semi-implicit: implicit diffusion (face-averaged, tridiagonal), explicit reaction/forcing, \
                 bisection Robin boundary"
            .into(),
        ..SolverMeta::default()
    };
    let mut traj = Trajectory::new(scn.id.clone(), PdeClass::Parabolic, *grid, meta);
    let mut w = scn.w0.values().to_vec();
    traj.push(0.0, State::Parabolic { w: w.clone() })?;
    let mut stepper = Stepper {
        scn,
        cfg,
        points: grid.points(),
        lower: Vec::new(),
        diag: Vec::new(),
        upper: Vec::new(),
        rhs: Vec::new(),
        scratch: Vec::new(),
    };
    let mut clock = Clock::new(cfg.t_end);
    while !clock.done() {
        let step_dt = clock.next_dt(dt);
        let next = match grid {
            Grid::D1(g) => stepper.step_1d(g, &w, clock.t, step_dt, clock.step + 1)?,
            Grid::D2(g) => stepper.step_2d(g, &w, clock.t, step_dt, clock.step + 1)?,
        };
        let t_new = clock.advance(step_dt);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Stepper::diverged(clock.step, t_new, "non-finite values"));
        }
        w = next;
        traj.meta.dt_history.push(step_dt);
        if clock.store(cfg.output_stride) {
            traj.push(t_new, State::Parabolic { w: w.clone() })?;
        }
    }
    Ok(traj)
}
