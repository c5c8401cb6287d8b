//! Grids on the unit interval and unit square, discrete fields, `L^q` norms
//! and solution trajectories.
//!
//! Quadrature weights are normalized to the unit measure: composite trapezoid
//! on node-centered grids, midpoint on cell-centered grids.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

/// Smallest admissible cell count per axis.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    /// `n + 1` points at `i·h`, boundary included.
    Node,
    /// `n` points at `(i + 1/2)·h`.
    Cell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid1D {
    n: usize,
    layout: Layout,
}

impl Grid1D {
    pub fn new(n: usize, layout: Layout) -> Result<Self> {
        if n < MIN_CELLS {
            return domain(format!("grid needs at least {MIN_CELLS} cells, got {n}"));
        }
        Ok(Self { n, layout })
    }

    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    #[inline]
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn len(&self) -> usize {
        match self.layout {
            Layout::Node => self.n + 1,
            Layout::Cell => self.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        match self.layout {
            Layout::Node => i as f64 / self.n as f64,
            Layout::Cell => (i as f64 + 0.5) / self.n as f64,
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        let h = self.h();
        match self.layout {
            Layout::Cell => vec![h; self.n],
            Layout::Node => {
                let mut w = vec![h; self.n + 1];
                w[0] = 0.5 * h;
                w[self.n] = 0.5 * h;
                w
            }
        }
    }

    pub fn refine(&self) -> Self {
        Self {
            n: 2 * self.n,
            layout: self.layout,
        }
    }
}

/// Boundary condition attached to one edge of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Prescribed value (the `Γ₁` part of the boundary).
    Dirichlet,
    /// Nonlinear flux condition (the `Γ₂` part).
    Robin,
}

impl FromStr for EdgeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(EdgeKind::Dirichlet),
            "robin" => Ok(EdgeKind::Robin),
            other => domain(format!("unknown edge kind '{other}' (expected dirichlet or robin)")),
        }
    }
}

/// Edge labels of the unit square. Each edge carries exactly one label, so the
/// two boundary parts always partition the four edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeLabels {
    pub left: EdgeKind,
    pub right: EdgeKind,
    pub bottom: EdgeKind,
    pub top: EdgeKind,
}

/// Node-centered grid on the unit square, stored row-major: `index = j·(nx+1) + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    edges: EdgeLabels,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, edges: EdgeLabels) -> Result<Self> {
        if nx < MIN_CELLS || ny < MIN_CELLS {
            return domain(format!("grid needs at least {MIN_CELLS} cells per axis, got {nx}x{ny}"));
        }
        Ok(Self { nx, ny, edges })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        1.0 / self.ny as f64
    }

    pub fn edges(&self) -> EdgeLabels {
        self.edges
    }

    pub fn len(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn coord(&self, i: usize, j: usize) -> [f64; 2] {
        [i as f64 / self.nx as f64, j as f64 / self.ny as f64]
    }

    pub fn weights(&self) -> Vec<f64> {
        let wx = Grid1D {
            n: self.nx,
            layout: Layout::Node,
        }
        .weights();
        let wy = Grid1D {
            n: self.ny,
            layout: Layout::Node,
        }
        .weights();
        let mut w = Vec::with_capacity(self.len());
        for &b in &wy {
            for &a in &wx {
                w.push(a * b);
            }
        }
        w
    }

    pub fn refine(&self) -> Self {
        Self {
            nx: 2 * self.nx,
            ny: 2 * self.ny,
            edges: self.edges,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    D1(Grid1D),
    D2(Grid2D),
}

impl Grid {
    pub fn dim(&self) -> usize {
        match self {
            Grid::D1(_) => 1,
            Grid::D2(_) => 2,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::D1(g) => g.len(),
            Grid::D2(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest spacing, used for scheme-aware tolerances.
    pub fn h(&self) -> f64 {
        match self {
            Grid::D1(g) => g.h(),
            Grid::D2(g) => g.hx().max(g.hy()),
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        match self {
            Grid::D1(g) => g.weights(),
            Grid::D2(g) => g.weights(),
        }
    }

    /// Coordinates of every point, in storage order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        match self {
            Grid::D1(g) => (0..g.len()).map(|i| vec![g.coord(i)]).collect(),
            Grid::D2(g) => {
                let mut pts = Vec::with_capacity(g.len());
                for j in 0..=g.ny {
                    for i in 0..=g.nx {
                        pts.push(g.coord(i, j).to_vec());
                    }
                }
                pts
            }
        }
    }

    pub fn refine(&self) -> Self {
        match self {
            Grid::D1(g) => Grid::D1(g.refine()),
            Grid::D2(g) => Grid::D2(g.refine()),
        }
    }

    pub fn as_1d(&self) -> Result<&Grid1D> {
        match self {
            Grid::D1(g) => Ok(g),
            Grid::D2(_) => Err(Error::Mismatch("expected a 1D grid".into())),
        }
    }
}

/// Weighted discrete `L^q` norm; `q = ∞` gives the max norm.
///
/// Values are scaled by their max before powering so that large `q` neither
/// overflows nor underflows.
pub fn weighted_lq(values: &[f64], weights: &[f64], q: f64) -> Result<f64> {
    if !(q >= 2.0) {
        return domain(format!("L^q norms are supported for q >= 2, got {q}"));
    }
    if values.len() != weights.len() {
        return Err(Error::Mismatch(format!(
            "{} values against {} quadrature weights",
            values.len(),
            weights.len()
        )));
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if q.is_infinite() || peak == 0.0 {
        return Ok(peak);
    }
    let sum: f64 = values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v.abs() / peak).powf(q))
        .sum();
    Ok(peak * sum.powf(1.0 / q))
}

/// Values on a grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
    time: f64,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("field values must be finite");
        }
        Ok(Self { grid, values, time })
    }

    /// Sample `f` at every grid point.
    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = grid.points().iter().map(|p| f(p)).collect();
        Self::new(grid, values, time)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| c * v).collect(), self.time)
    }

    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        weighted_lq(&self.values, &self.grid.weights(), q)
    }
}

/// Which of the three model problems a trajectory or functional belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PdeClass {
    Parabolic,
    Transport,
    Wave,
}

impl PdeClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            PdeClass::Parabolic => "parabolic",
            PdeClass::Transport => "transport",
            PdeClass::Wave => "wave",
        }
    }
}

impl fmt::Display for PdeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PdeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parabolic" => Ok(PdeClass::Parabolic),
            "transport" => Ok(PdeClass::Transport),
            "wave" => Ok(PdeClass::Wave),
            other => domain(format!("unknown pde class '{other}'")),
        }
    }
}

/// Solution state at one stamp.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Parabolic {
        w: Vec<f64>,
    },
    Transport {
        rho: Vec<f64>,
    },
    /// Characteristic pair `ξ = w_t + c·w_y`, `η = w_t − c·w_y`.
    Wave {
        xi: Vec<f64>,
        eta: Vec<f64>,
    },
}

impl State {
    pub fn class(&self) -> PdeClass {
        match self {
            State::Parabolic { .. } => PdeClass::Parabolic,
            State::Transport { .. } => PdeClass::Transport,
            State::Wave { .. } => PdeClass::Wave,
        }
    }

    fn is_finite(&self) -> bool {
        let all = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            State::Parabolic { w } => all(w),
            State::Transport { rho } => all(rho),
            State::Wave { xi, eta } => all(xi) && all(eta),
        }
    }

    fn len_ok(&self, n: usize) -> bool {
        match self {
            State::Parabolic { w } => w.len() == n,
            State::Transport { rho } => rho.len() == n,
            State::Wave { xi, eta } => xi.len() == n && eta.len() == n,
        }
    }
}

/// Bookkeeping recorded by a solver.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverMeta {
    pub scheme: String,
    /// Every accepted step size, stored or not.
    pub dt_history: Vec<f64>,
    /// Courant number of every accepted step (hyperbolic solvers).
    pub courant_history: Vec<f64>,
    /// Wave speed `c`, needed to reconstruct `(w_t, w_y)` from the characteristic pair.
    pub wave_speed: Option<f64>,
}

/// Time-stamped solution snapshots on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    scenario_id: String,
    class: PdeClass,
    grid: Grid,
    times: Vec<f64>,
    frames: Vec<State>,
    pub meta: SolverMeta,
}

impl Trajectory {
    pub fn new(scenario_id: impl Into<String>, class: PdeClass, grid: Grid, meta: SolverMeta) -> Self {
        Self {
            scenario_id: scenario_id.into(),
            class,
            grid,
            times: Vec::new(),
            frames: Vec::new(),
            meta,
        }
    }

    /// Append a snapshot. Stamps must start at 0 and increase strictly.
    pub fn push(&mut self, t: f64, state: State) -> Result<()> {
        if state.class() != self.class {
            return Err(Error::Mismatch(format!(
                "{} state pushed onto a {} trajectory",
                state.class(),
                self.class
            )));
        }
        if !state.len_ok(self.grid.len()) {
            return Err(Error::Mismatch("state length does not match the grid".into()));
        }
        if !state.is_finite() {
            return domain("trajectory states must be finite");
        }
        match self.times.last() {
            None if t != 0.0 => return domain(format!("trajectory must start at t = 0, got {t}")),
            Some(&last) if !(t > last) => {
                return domain(format!("time stamps must increase strictly: {last} then {t}"))
            }
            _ => {}
        }
        self.times.push(t);
        self.frames.push(state);
        Ok(())
    }

    pub fn scenario_id(&self) -> &str {
        &self.scenario_id
    }

    pub fn class(&self) -> PdeClass {
        self.class
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[State] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Primary field at stamp `i`: `w`, `ρ`, or `ξ` for the wave.
    pub fn field(&self, i: usize) -> Result<Field> {
        let values = match &self.frames[i] {
            State::Parabolic { w } => w.clone(),
            State::Transport { rho } => rho.clone(),
            State::Wave { xi, .. } => xi.clone(),
        };
        Field::new(self.grid, values, self.times[i])
    }

    /// The norm the ISS estimates control at stamp `i`: `‖w‖_q`, `‖ρ‖_q`, or
    /// `‖w_t‖_q + ‖w_y‖_q` for the wave.
    pub fn state_norm(&self, i: usize, q: f64) -> Result<f64> {
        let weights = self.grid.weights();
        match &self.frames[i] {
            State::Parabolic { w } => weighted_lq(w, &weights, q),
            State::Transport { rho } => weighted_lq(rho, &weights, q),
            State::Wave { xi, eta } => {
                let c = self
                    .meta
                    .wave_speed
                    .ok_or_else(|| Error::Misuse("wave trajectory without a wave speed".into()))?;
                let (wt, wy) = crate::solvers::wave::reconstruct_values(xi, eta, c)?;
                Ok(weighted_lq(&wt, &weights, q)? + weighted_lq(&wy, &weights, q)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn line(n: usize, layout: Layout) -> Grid {
        Grid::D1(Grid1D::new(n, layout).unwrap())
    }

    fn all_dirichlet() -> EdgeLabels {
        EdgeLabels {
            left: EdgeKind::Dirichlet,
            right: EdgeKind::Robin,
            bottom: EdgeKind::Dirichlet,
            top: EdgeKind::Robin,
        }
    }

    #[test]
    fn norm_examples() {
        let g = line(64, Layout::Node);
        let two = Field::from_fn(g, 0.0, |_| 2.0).unwrap();
        assert_relative_eq!(two.lq_norm(3.0).unwrap(), 2.0, max_relative = 1e-14);
        assert_eq!(two.lq_norm(f64::INFINITY).unwrap(), 2.0);
        let ramp = Field::from_fn(line(512, Layout::Node), 0.0, |p| p[0]).unwrap();
        assert!((ramp.lq_norm(2.0).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-4);
        assert!(two.lq_norm(1.5).is_err());
    }

    #[test]
    fn weights_sum_to_one() {
        for g in [
            line(10, Layout::Node),
            line(10, Layout::Cell),
            Grid::D2(Grid2D::new(8, 12, all_dirichlet()).unwrap()),
        ] {
            let s: f64 = g.weights().iter().sum();
            assert_relative_eq!(s, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn two_dimensional_norm() {
        // ∫∫ (xy)^2 = 1/9 on the unit square
        let g = Grid::D2(Grid2D::new(256, 256, all_dirichlet()).unwrap());
        let f = Field::from_fn(g, 0.0, |p| p[0] * p[1]).unwrap();
        assert!((f.lq_norm(2.0).unwrap() - 1.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn refine_examples() {
        let g = Grid1D::new(64, Layout::Node).unwrap();
        assert_eq!(g.refine().cells(), 128);
        let g2 = Grid2D::new(32, 32, all_dirichlet()).unwrap().refine();
        assert_eq!((g2.nx(), g2.ny()), (64, 64));
        assert_eq!(g2.edges(), all_dirichlet());
        let g = Grid1D::new(50, Layout::Cell).unwrap();
        assert_eq!(g.refine().refine().cells(), 200);
        assert!(Grid1D::new(4, Layout::Node).is_err());
    }

    #[test]
    fn field_validation() {
        let g = line(8, Layout::Cell);
        assert!(Field::new(g, vec![0.0; 9], 0.0).is_err());
        assert!(Field::new(g, vec![f64::NAN; 8], 0.0).is_err());
    }

    #[test]
    fn trajectory_push_rules() {
        let g = line(8, Layout::Cell);
        let mut tr = Trajectory::new("t", PdeClass::Transport, g, SolverMeta::default());
        assert!(tr.push(0.1, State::Transport { rho: vec![0.0; 8] }).is_err());
        tr.push(0.0, State::Transport { rho: vec![0.0; 8] }).unwrap();
        assert!(tr.push(0.0, State::Transport { rho: vec![0.0; 8] }).is_err());
        assert!(tr.push(0.5, State::Parabolic { w: vec![0.0; 8] }).is_err());
        assert!(tr.push(0.5, State::Transport { rho: vec![0.0; 7] }).is_err());
        tr.push(0.5, State::Transport { rho: vec![1.0; 8] }).unwrap();
        assert_eq!(tr.state_norm(1, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn large_q_approaches_max() {
        let g = line(256, Layout::Node);
        let f = Field::from_fn(g, 0.0, |p| (3.0 * p[0]).sin() + 0.2).unwrap();
        let sup = f.lq_norm(f64::INFINITY).unwrap();
        let gaps: Vec<f64> = [2.0, 8.0, 32.0, 128.0]
            .iter()
            .map(|&q| sup - f.lq_norm(q).unwrap())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[3] < 0.05 * sup);
    }

    proptest! {
        #[test]
        fn homogeneity(vals in prop::collection::vec(-5.0f64..5.0, 17), c in -10.0f64..10.0, q in 2.0f64..20.0) {
            let f = Field::new(line(16, Layout::Node), vals, 0.0).unwrap();
            let lhs = f.scaled(c).unwrap().lq_norm(q).unwrap();
            let rhs = c.abs() * f.lq_norm(q).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }

        #[test]
        fn holder_ordering(vals in prop::collection::vec(-5.0f64..5.0, 16), q1 in 2.0f64..10.0, dq in 0.0f64..10.0) {
            let f = Field::new(line(16, Layout::Cell), vals, 0.0).unwrap();
            let a = f.lq_norm(q1).unwrap();
            let b = f.lq_norm(q1 + dq).unwrap();
            prop_assert!(a <= b * (1.0 + 1e-12));
            prop_assert!(b <= f.lq_norm(f64::INFINITY).unwrap() * (1.0 + 1e-12));
        }
    }
}
