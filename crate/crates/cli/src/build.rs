//! Turn a parsed [`RunConfig`] into core scenarios, grids and solver settings.

use std::sync::Arc;

use glfcert_core::fields::{EdgeKind, EdgeLabels};
use glfcert_core::signals::{Piece, SignalKind};
use glfcert_core::solvers::{SpeedAssumption, SpeedMap};
use glfcert_core::{
    Field, Grid, Grid1D, Grid2D, Layout, MonotoneFn, ParabolicScenario, Profile, SolverConfig, SpaceTimeField,
    TimeSignal, TransportScenario, WaveScenario,
};

use crate::config::{
    AssumptionSpec, ConfigError, EdgeName, FieldSpec, HSpec, LayoutName, MonoSpec, PieceSpec, ProfileSpec, RunConfig,
    ScenarioSpec, SignalSpec, SpeedSpec,
};

/// Validated range of the configured nonlinearities.
pub const MONOTONE_RANGE: f64 = 1e3;

/// A scenario ready to solve.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Problem {
    Parabolic(ParabolicScenario),
    Transport {
        scn: TransportScenario,
        /// Radius of the local estimate for decreasing speed maps.
        r0: Option<f64>,
    },
    Wave(WaveScenario),
}

impl Problem {
    pub fn grid(&self) -> Grid {
        match self {
            Problem::Parabolic(s) => *s.w0.grid(),
            Problem::Transport { scn, .. } => *scn.rho0.grid(),
            Problem::Wave(s) => *s.w0.grid(),
        }
    }
}

fn core_err(key: &str) -> impl Fn(glfcert_core::Error) -> ConfigError + '_ {
    move |e| ConfigError::new(key, e.to_string())
}

pub fn profile(spec: &ProfileSpec, key: &str) -> Result<Profile, ConfigError> {
    let p = match *spec {
        ProfileSpec::Zero => Profile::Zero,
        ProfileSpec::Constant { value } => Profile::Constant { value },
        ProfileSpec::Linear { slope, intercept } => Profile::Linear { slope, intercept },
        ProfileSpec::Sine {
            amplitude,
            wavenumber,
            offset,
        } => Profile::Sine {
            amplitude,
            wavenumber,
            offset,
        },
        ProfileSpec::Bump { center, radius, height } => Profile::Bump { center, radius, height },
    };
    p.validate().map_err(core_err(key))?;
    Ok(p)
}

fn piece(spec: &PieceSpec) -> Piece {
    match spec {
        PieceSpec::Constant { start, value } => Piece {
            start: *start,
            kind: SignalKind::Constant { value: *value },
        },
        PieceSpec::Sinusoid {
            start,
            offset,
            amplitude,
            frequency,
            phase,
        } => Piece {
            start: *start,
            kind: SignalKind::Sinusoid {
                amplitude: *amplitude,
                frequency: *frequency,
                phase: *phase,
                offset: *offset,
            },
        },
        PieceSpec::ExpDecay { start, amplitude, rate } => Piece {
            start: *start,
            kind: SignalKind::ExpDecay {
                amplitude: *amplitude,
                rate: *rate,
            },
        },
        PieceSpec::Polynomial { start, coeffs } => Piece {
            start: *start,
            kind: SignalKind::Polynomial { coeffs: coeffs.clone() },
        },
    }
}

pub fn signal(spec: &SignalSpec, key: &str) -> Result<TimeSignal, ConfigError> {
    let pieces = match spec {
        SignalSpec::Value(v) => vec![piece(&PieceSpec::Constant { start: 0.0, value: *v })],
        SignalSpec::Piece(p) => vec![piece(p)],
        SignalSpec::Pieces(ps) => ps.iter().map(piece).collect(),
    };
    TimeSignal::new(pieces).map_err(core_err(key))
}

pub fn field(spec: &FieldSpec, key: &str) -> Result<SpaceTimeField, ConfigError> {
    match spec {
        FieldSpec::Value(v) => Ok(SpaceTimeField::constant(*v)),
        FieldSpec::Separable { profile: p, signal: s } => Ok(SpaceTimeField::Separable {
            profile: profile(p, key)?,
            signal: signal(s, key)?,
        }),
    }
}

fn monotone(spec: &MonoSpec, key: &str) -> Result<MonotoneFn, ConfigError> {
    let r = MONOTONE_RANGE;
    let m = match *spec {
        MonoSpec::Identity => MonotoneFn::identity(-r, r),
        MonoSpec::Linear { slope } => MonotoneFn::new(format!("{slope}·v"), -r, r, move |v| slope * v),
        MonoSpec::Cubic { coef } => MonotoneFn::new(format!("v + {coef}·v³"), -r, r, move |v| v + coef * v * v * v),
        MonoSpec::OddPower { coef, exponent } => {
            MonotoneFn::new(format!("v + {coef}·|v|^{exponent}"), -r, r, move |v| {
                v + coef * v.signum() * v.abs().powf(exponent)
            })
        }
    };
    m.map_err(core_err(key))
}

fn speed(spec: &SpeedSpec) -> SpeedMap {
    match *spec {
        SpeedSpec::Constant { value } => SpeedMap::constant(value),
        SpeedSpec::Reciprocal { scale } => SpeedMap::new(format!("1/(1+{scale}·|s|)"), move |s: f64| {
            1.0 / (1.0 + scale * s.abs())
        }),
        SpeedSpec::Floored { floor, amplitude } => {
            SpeedMap::new(format!("{floor} + {amplitude}/(1+s²)"), move |s: f64| {
                floor + amplitude / (1.0 + s * s)
            })
        }
    }
}

fn edge(e: EdgeName) -> EdgeKind {
    match e {
        EdgeName::Dirichlet => EdgeKind::Dirichlet,
        EdgeName::Robin => EdgeKind::Robin,
    }
}

fn grid(cfg: &RunConfig, default_layout: Layout, allow_2d: bool) -> Result<Grid, ConfigError> {
    let g = &cfg.grid;
    if g.nx.is_some() || g.ny.is_some() {
        if !allow_2d {
            return Err(ConfigError::new(
                "grid.nx",
                "two-dimensional grids are available for the parabolic class only",
            ));
        }
        let (Some(nx), Some(ny)) = (g.nx, g.ny) else {
            return Err(ConfigError::new("grid.nx", "a square grid needs both nx and ny"));
        };
        let e = g.edges.unwrap_or(crate::config::EdgesSpec {
            left: EdgeName::Dirichlet,
            right: EdgeName::Robin,
            bottom: EdgeName::Dirichlet,
            top: EdgeName::Robin,
        });
        let labels = EdgeLabels {
            left: edge(e.left),
            right: edge(e.right),
            bottom: edge(e.bottom),
            top: edge(e.top),
        };
        return Grid2D::new(nx, ny, labels).map(Grid::D2).map_err(core_err("grid.nx"));
    }
    let n =
        g.n.ok_or_else(|| ConfigError::new("grid", "set n (interval) or nx and ny (square)"))?;
    let layout = match g.layout {
        None => default_layout,
        Some(LayoutName::Node) => Layout::Node,
        Some(LayoutName::Cell) => Layout::Cell,
    };
    Grid1D::new(n, layout).map(Grid::D1).map_err(core_err("grid.n"))
}

fn initial(grid: Grid, p: &ProfileSpec, key: &str) -> Result<Field, ConfigError> {
    let shape = profile(p, key)?;
    Field::from_fn(grid, 0.0, |x| shape.eval(x)).map_err(core_err(key))
}

pub fn solver_config(cfg: &RunConfig) -> Result<SolverConfig, ConfigError> {
    let s = &cfg.solver;
    let mut out = SolverConfig::new(s.t_end);
    out.dt = s.dt;
    out.cfl_sigma = s.cfl_sigma;
    if let Some(tol) = s.bc_tol {
        out.bc_tol = tol;
    }
    if let Some(m) = s.output_stride {
        out.output_stride = m;
    }
    out.validate().map_err(core_err("solver"))?;
    Ok(out)
}

/// Build and validate the scenario described by `cfg`.
pub fn problem(cfg: &RunConfig) -> Result<Problem, ConfigError> {
    match &cfg.scenario {
        ScenarioSpec::Parabolic(s) => {
            let g = grid(cfg, Layout::Node, true)?;
            let h_term = s.h.as_ref().map(|h| match *h {
                HSpec::Linear { coef } => {
                    Arc::new(move |_: &[f64], _: f64, w: f64| coef * w) as glfcert_core::solvers::HTerm
                }
            });
            let scn = ParabolicScenario {
                id: s.id.clone(),
                a: field(&s.a, "scenario.a")?,
                c: field(&s.c, "scenario.c")?,
                a0: s.a0,
                c0: s.c0,
                phi: monotone(&s.phi, "scenario.phi")?,
                h_term,
                varphi: monotone(&s.varphi, "scenario.varphi")?,
                f: field(&s.f, "scenario.f")?,
                d1: field(&s.d1, "scenario.d1")?,
                d2: field(&s.d2, "scenario.d2")?,
                w0: initial(g, &s.w0, "scenario.w0")?,
                ends: [edge(s.ends[0]), edge(s.ends[1])],
            };
            scn.validate(&g, cfg.solver.t_end).map_err(core_err("scenario"))?;
            Ok(Problem::Parabolic(scn))
        }
        ScenarioSpec::Transport(s) => {
            let g = grid(cfg, Layout::Cell, false)?;
            let (assumption, r0) = match s.assumption {
                AssumptionSpec::Bounded { lambda0 } => (SpeedAssumption::Bounded { lambda0 }, None),
                AssumptionSpec::Decreasing { r0 } => (SpeedAssumption::Decreasing, Some(r0)),
            };
            let scn = TransportScenario {
                id: s.id.clone(),
                lambda: speed(&s.lambda),
                assumption,
                k: s.k,
                d: signal(&s.d, "scenario.d")?,
                rho0: initial(g, &s.rho0, "scenario.rho0")?,
            };
            scn.validate().map_err(|e| {
                let key = if e.to_string().contains("|k|") {
                    "scenario.k"
                } else {
                    "scenario.lambda"
                };
                ConfigError::new(key, e.to_string())
            })?;
            Ok(Problem::Transport { scn, r0 })
        }
        ScenarioSpec::Wave(s) => {
            let g = grid(cfg, Layout::Node, false)?;
            let scn = WaveScenario {
                id: s.id.clone(),
                c: s.c,
                f: field(&s.f, "scenario.f")?,
                d: signal(&s.d, "scenario.d")?,
                w0: initial(g, &s.w0, "scenario.w0")?,
                phi0: initial(g, &s.phi0, "scenario.phi0")?,
            };
            scn.validate(&g).map_err(core_err("scenario"))?;
            Ok(Problem::Wave(scn))
        }
    }
}
