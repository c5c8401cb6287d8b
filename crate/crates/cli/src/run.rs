//! The `run` pipeline: solve, evaluate the functional, audit the estimates,
//! write artifacts and a plain-text report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use glfcert_core::certify::{
    bound_transport_liss, check_trajectory, default_tolerance, small_k_warning, InputSups, LissVariant,
};
use glfcert_core::export::{to_file, trajectory_metadata, write_check_report, write_glf_series, write_trajectory};
use glfcert_core::fields::weighted_lq;
use glfcert_core::glf::{
    compute_m_parabolic, compute_m_transport, compute_m_wave, default_wave_eps, dissipation_report, lambda0_local,
    midpoint_transport_r, parabolic_decay, parabolic_level, parabolic_running_sups, transport_decay, wave_decay,
    wave_slack,
};
use glfcert_core::signals::{running_sup_field, SampleSpec, DEFAULT_RESOLUTION};
use glfcert_core::solvers::wave::gradient;
use glfcert_core::solvers::{solve_parabolic, solve_transport, solve_wave, SpeedAssumption};
use glfcert_core::{
    BoundKind, CheckReport, GlfSeries, GlfSpec, IssBound, PdeClass, SolverConfig, SpaceTimeField, Trajectory,
};

use crate::build::{self, Problem};
use crate::config::{BoundName, ConfigError, Format, RunConfig};
use crate::fmt_num;

/// Environment variable that overrides the output root.
pub const OUT_ENV: &str = "GLFCERT_OUT";
/// Spatial samples per axis for disturbance sups.
const SUP_POINTS: usize = 65;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("solver error: {0}")]
    Core(#[from] glfcert_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Functional parameters chosen for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlfPlan {
    pub spec: GlfSpec,
    pub decay: f64,
}

/// Everything needed to execute a configuration, validated up front.
#[derive(Debug, Clone)]
pub struct Plan {
    pub config: RunConfig,
    pub problem: Problem,
    pub solver: SolverConfig,
    pub glf: Option<GlfPlan>,
    pub notes: Vec<String>,
    pub bounds: Vec<BoundName>,
    pub qs: Vec<f64>,
    /// Rate parameter of the `m`-form wave estimate.
    pub wave_m: f64,
    pub heat_eps: f64,
}

fn bound_class(b: BoundName) -> PdeClass {
    match b {
        BoundName::ParabolicQ | BoundName::HeatClm => PdeClass::Parabolic,
        BoundName::TransportP | BoundName::TransportQ | BoundName::TransportLiss => PdeClass::Transport,
        BoundName::WaveREps | BoundName::WaveM => PdeClass::Wave,
    }
}

fn problem_class(p: &Problem) -> PdeClass {
    match p {
        Problem::Parabolic(_) => PdeClass::Parabolic,
        Problem::Transport { .. } => PdeClass::Transport,
        Problem::Wave(_) => PdeClass::Wave,
    }
}

/// Validate `cfg` and fix every parameter, without solving anything.
pub fn plan(config: RunConfig, source: &str) -> Result<Plan, ConfigError> {
    plan_inner(config).map_err(|e| e.anchored(source))
}

fn plan_inner(config: RunConfig) -> Result<Plan, ConfigError> {
    let problem = build::problem(&config)?;
    let solver = build::solver_config(&config)?;
    let t_end = solver.t_end;
    let g = &config.glf;
    let p = g.p.unwrap_or(2.0);
    let need = |v: Option<f64>, key: &str| -> Result<f64, ConfigError> {
        v.ok_or_else(|| ConfigError::new(key, "required when glf.auto = false"))
    };
    let mut notes = Vec::new();
    let glf_err = |key: &str| {
        let key = key.to_string();
        move |e: glfcert_core::Error| ConfigError::new(key.clone(), e.to_string())
    };

    let glf = match &problem {
        Problem::Parabolic(scn) => {
            if scn.c0 > 0.0 {
                let level = compute_m_parabolic(scn, t_end).map_err(glf_err("scenario"))?;
                let spec = GlfSpec::parabolic(p, level).map_err(glf_err("glf.p"))?;
                Some(GlfPlan {
                    spec,
                    decay: parabolic_decay(scn.c0, p),
                })
            } else {
                notes.push("truncated functional skipped: it needs c0 > 0".to_string());
                None
            }
        }
        Problem::Transport { scn, r0 } => {
            let r = match g.r {
                Some(r) => r,
                None if g.auto => midpoint_transport_r(p, scn.k),
                None => need(None, "glf.r")?,
            };
            let lambda0 = match (scn.assumption, r0) {
                (SpeedAssumption::Bounded { lambda0 }, _) => lambda0,
                (SpeedAssumption::Decreasing, Some(r0)) => {
                    lambda0_local(scn, *r0).map_err(glf_err("scenario.assumption"))?.lambda0
                }
                (SpeedAssumption::Decreasing, None) => {
                    return Err(ConfigError::new("scenario.assumption", "decreasing speed maps need r0"))
                }
            };
            let level = compute_m_transport(scn, t_end).map_err(glf_err("scenario.d"))?;
            let spec = GlfSpec::transport(p, r, level, scn.k).map_err(glf_err("glf.r"))?;
            if let Some(w) = small_k_warning(scn.k) {
                notes.push(format!("warning: {w}"));
            }
            Some(GlfPlan {
                spec,
                decay: transport_decay(r, lambda0),
            })
        }
        Problem::Wave(scn) => {
            let r = match g.r {
                Some(r) => r,
                None if g.auto => 1.0,
                None => need(None, "glf.r")?,
            };
            let eps = match g.eps {
                Some(e) => e,
                None if g.auto => default_wave_eps(scn.c, r),
                None => need(None, "glf.eps")?,
            };
            let level = compute_m_wave(scn, t_end).map_err(glf_err("scenario.d"))?;
            let spec = GlfSpec::wave(p, r, eps, level, scn.c).map_err(glf_err("glf.eps"))?;
            Some(GlfPlan {
                spec,
                decay: wave_decay(scn.c, r, eps),
            })
        }
    };

    let class = problem_class(&problem);
    let bounds = match &config.certify.bounds {
        Some(b) => b.clone(),
        None => match &problem {
            Problem::Parabolic(s) if s.c0 > 0.0 => vec![BoundName::ParabolicQ],
            Problem::Parabolic(_) => vec![BoundName::HeatClm],
            Problem::Transport { r0: None, .. } => vec![BoundName::TransportQ, BoundName::TransportP],
            Problem::Transport { .. } => vec![BoundName::TransportLiss],
            Problem::Wave(_) => vec![BoundName::WaveM, BoundName::WaveREps],
        },
    };
    for b in &bounds {
        if bound_class(*b) != class {
            return Err(ConfigError::new(
                "certify.bounds",
                format!("{b:?} does not apply to a {class} scenario"),
            ));
        }
        match (b, &problem) {
            (BoundName::ParabolicQ, Problem::Parabolic(s)) if s.c0 <= 0.0 => {
                return Err(ConfigError::new("certify.bounds", "parabolic_q needs c0 > 0"))
            }
            (BoundName::TransportLiss, Problem::Transport { r0: None, .. }) => {
                return Err(ConfigError::new(
                    "certify.bounds",
                    "transport_liss needs a decreasing speed map with r0",
                ))
            }
            (BoundName::TransportP | BoundName::TransportQ, Problem::Transport { r0: Some(_), .. }) => {
                return Err(ConfigError::new(
                    "certify.bounds",
                    "global transport estimates need a bounded speed map; use transport_liss",
                ))
            }
            _ => {}
        }
    }
    let qs = config.certify.q.clone().unwrap_or(vec![2.0, f64::INFINITY]);
    if let Some(q) = qs.iter().find(|q| !(**q >= 2.0)) {
        return Err(ConfigError::new(
            "certify.q",
            format!("norm exponents must be >= 2, got {q}"),
        ));
    }
    if let Some(tol) = config.certify.tol {
        if !(tol >= 0.0) {
            return Err(ConfigError::new("certify.tol", "tolerance must be nonnegative"));
        }
    }
    let wave_m = g.m.unwrap_or(1.0);
    if !(wave_m > 0.0) {
        return Err(ConfigError::new("glf.m", "m must be positive"));
    }
    let heat_eps = config.certify.heat_eps.unwrap_or(1.0);
    Ok(Plan {
        config,
        problem,
        solver,
        glf,
        notes,
        bounds,
        qs,
        wave_m,
        heat_eps,
    })
}

pub fn solve(plan: &Plan) -> Result<Trajectory, glfcert_core::Error> {
    let grid = plan.problem.grid();
    match &plan.problem {
        Problem::Parabolic(s) => solve_parabolic(s, &grid, &plan.solver),
        Problem::Transport { scn, .. } => solve_transport(scn, &grid, &plan.solver),
        Problem::Wave(s) => solve_wave(s, &grid, &plan.solver),
    }
}

/// Running sup of `‖f(·, t)‖_{L²}` for a separable field.
fn running_l2_sup(f: &SpaceTimeField, grid: &glfcert_core::Grid, times: &[f64]) -> glfcert_core::Result<Vec<f64>> {
    match f {
        SpaceTimeField::Separable { profile, signal } => {
            let vals: Vec<f64> = grid.points().iter().map(|p| profile.eval(p)).collect();
            let norm = weighted_lq(&vals, &grid.weights(), 2.0)?;
            Ok(signal
                .running_sup(times, DEFAULT_RESOLUTION)?
                .into_iter()
                .map(|s| s * norm)
                .collect())
        }
        SpaceTimeField::Custom { .. } => Err(glfcert_core::Error::Misuse(
            "the quadratic heat estimate needs a separable forcing".into(),
        )),
    }
}

fn sample_spec(grid: &glfcert_core::Grid) -> SampleSpec {
    SampleSpec::new(grid.dim(), SUP_POINTS)
}

/// Disturbance sizes at each stamp for `kind`.
pub fn bound_inputs(problem: &Problem, traj: &Trajectory, kind: BoundName) -> glfcert_core::Result<Vec<InputSups>> {
    let times = traj.times();
    let n = times.len();
    let zip = |f: Vec<f64>, d: Vec<f64>, level: Vec<f64>| -> Vec<InputSups> {
        (0..n)
            .map(|i| InputSups {
                f: f[i],
                d: d[i],
                level: level[i],
            })
            .collect()
    };
    let zeros = vec![0.0; n];
    Ok(match problem {
        Problem::Parabolic(scn) => match kind {
            BoundName::HeatClm => {
                let f = running_l2_sup(&scn.f, traj.grid(), times)?;
                let d = running_sup_field(&scn.d2, sample_spec(traj.grid()), times)?;
                zip(f, d, zeros)
            }
            _ => {
                let levels = parabolic_running_sups(scn, times)?
                    .into_iter()
                    .map(|s| parabolic_level(scn, s))
                    .collect::<glfcert_core::Result<Vec<_>>>()?;
                zip(zeros.clone(), zeros, levels)
            }
        },
        Problem::Transport { scn, .. } => {
            let d = scn.d.running_sup(times, DEFAULT_RESOLUTION)?;
            zip(zeros.clone(), d, zeros)
        }
        Problem::Wave(scn) => {
            let f = running_sup_field(&scn.f, sample_spec(traj.grid()), times)?;
            let d = scn.d.running_sup(times, DEFAULT_RESOLUTION)?;
            zip(f, d, zeros)
        }
    })
}

/// Norm of the initial data entering the estimates at exponent `q`.
pub fn initial_norm(problem: &Problem, q: f64) -> glfcert_core::Result<f64> {
    match problem {
        Problem::Parabolic(s) => s.w0.lq_norm(q),
        Problem::Transport { scn, .. } => scn.rho0.lq_norm(q),
        Problem::Wave(s) => {
            let g = s.w0.grid();
            let slope = gradient(s.w0.values(), g.h());
            Ok(s.phi0.lq_norm(q)? + weighted_lq(&slope, &g.weights(), q)?)
        }
    }
}

/// One audit requested by the plan: either a check or a reason it was skipped.
#[derive(Debug, Clone)]
pub enum Audit {
    Checked(CheckReport),
    Skipped { label: String, reason: String },
}

fn core_kind(plan: &Plan, name: BoundName, q: f64) -> glfcert_core::Result<BoundKind> {
    let glf = plan.glf.map(|g| g.spec);
    Ok(match (&plan.problem, name) {
        (Problem::Parabolic(s), BoundName::ParabolicQ) => BoundKind::ParabolicQ { c0: s.c0 },
        (Problem::Parabolic(_), BoundName::HeatClm) => BoundKind::HeatClm { eps: plan.heat_eps },
        (Problem::Transport { scn, .. }, BoundName::TransportP) => {
            let spec = glf.expect("transport runs always plan a functional");
            let lambda0 = match scn.assumption {
                SpeedAssumption::Bounded { lambda0 } => lambda0,
                SpeedAssumption::Decreasing => unreachable!("rejected while planning"),
            };
            BoundKind::TransportP {
                p: spec.p,
                r: spec.r,
                lambda0,
            }
        }
        (Problem::Transport { scn, .. }, BoundName::TransportQ) => {
            let SpeedAssumption::Bounded { lambda0 } = scn.assumption else {
                unreachable!("rejected while planning")
            };
            BoundKind::TransportQ { k: scn.k, lambda0 }
        }
        (Problem::Transport { scn, r0 }, BoundName::TransportLiss) => BoundKind::TransportLiss {
            variant: LissVariant::Q { q },
            k: scn.k,
            lambda0: lambda0_local(scn, r0.expect("checked while planning"))?.lambda0,
        },
        (Problem::Wave(s), BoundName::WaveREps) => {
            let spec = glf.expect("wave runs always plan a functional");
            BoundKind::WaveREps {
                r: spec.r,
                eps: spec.eps,
                c: s.c,
            }
        }
        (Problem::Wave(s), BoundName::WaveM) => BoundKind::WaveM { m: plan.wave_m, c: s.c },
        _ => unreachable!("bound classes are checked while planning"),
    })
}

fn q_label(q: f64) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        format!("{q}")
    }
}

/// Run every requested check against `traj`.
pub fn audit(plan: &Plan, traj: &Trajectory) -> glfcert_core::Result<Vec<Audit>> {
    let tol = plan.config.certify.tol.unwrap_or_else(|| default_tolerance(traj));
    let mut out = Vec::new();
    for &name in &plan.bounds {
        let inputs = bound_inputs(&plan.problem, traj, name)?;
        let qs: Vec<f64> = match name {
            BoundName::TransportP => vec![plan.glf.map_or(3.0, |g| g.spec.p + 1.0)],
            BoundName::HeatClm => vec![2.0],
            _ => plan.qs.clone(),
        };
        for q in qs {
            let kind = core_kind(plan, name, q)?;
            let label = format!("{} q={}", kind, q_label(q));
            if name == BoundName::WaveREps && q.is_infinite() {
                out.push(Audit::Skipped {
                    label,
                    reason: "stated for finite q only".into(),
                });
                continue;
            }
            let x0 = initial_norm(&plan.problem, q)?;
            if let (BoundName::TransportLiss, Problem::Transport { scn, r0 }) = (name, &plan.problem) {
                let r0 = r0.expect("checked while planning");
                let gate_d = scn.d.sup_window(0.0, plan.solver.t_end, DEFAULT_RESOLUTION)?;
                let local = bound_transport_liss(LissVariant::Q { q }, scn, r0, 0.0, x0, gate_d, gate_d)?;
                if !local.gate {
                    out.push(Audit::Skipped {
                        label,
                        reason: format!(
                            "outside the local ball: ‖ρ₀‖ + sup|d| = {} > R₀ = {}",
                            fmt_num(x0 + gate_d),
                            fmt_num(r0)
                        ),
                    });
                    continue;
                }
            }
            let bound = IssBound {
                kind,
                initial_norm: x0,
                inputs: inputs.clone(),
            };
            out.push(Audit::Checked(check_trajectory(traj, q, &bound, tol)?));
        }
    }
    Ok(out)
}

/// Functional series along `traj`, when the plan has one.
pub fn functional(plan: &Plan, traj: &Trajectory) -> glfcert_core::Result<Option<GlfSeries>> {
    let Some(g) = plan.glf else { return Ok(None) };
    if traj.len() < 2 {
        return Ok(None);
    }
    let slack = match &plan.problem {
        Problem::Wave(s) => wave_slack(traj, &s.f, &g.spec)?,
        _ => vec![0.0; traj.len()],
    };
    dissipation_report(traj, &g.spec, g.decay, &slack).map(Some)
}

/// Sup norm of `(w_t, w_y)` at `2/c + 0.2` for an undisturbed wave run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteTimeProbe {
    pub t: f64,
    pub sup_norm: f64,
    pub floor: f64,
}

impl FiniteTimeProbe {
    pub fn below_floor(&self) -> bool {
        self.sup_norm <= self.floor
    }
}

pub fn finite_time_probe(plan: &Plan, traj: &Trajectory) -> glfcert_core::Result<Option<FiniteTimeProbe>> {
    let Problem::Wave(s) = &plan.problem else {
        return Ok(None);
    };
    if !(s.f.is_trivially_zero() && s.d.sup_window(0.0, plan.solver.t_end, DEFAULT_RESOLUTION)? == 0.0) {
        return Ok(None);
    }
    let target = 2.0 / s.c + 0.2;
    let Some(i) = traj.times().iter().position(|&t| t >= target - 1e-12) else {
        return Ok(None);
    };
    Ok(Some(FiniteTimeProbe {
        t: traj.times()[i],
        sup_norm: traj.state_norm(i, f64::INFINITY)?,
        floor: 10.0 * traj.grid().h(),
    }))
}

/// Outcome of [`execute`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: String,
    pub violations: usize,
    pub directory: PathBuf,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Output root: the environment override, else the config's directory, else `out`.
pub fn output_root(cfg: &RunConfig) -> PathBuf {
    if let Some(dir) = std::env::var_os(OUT_ENV) {
        return PathBuf::from(dir);
    }
    PathBuf::from(cfg.output.directory.clone().unwrap_or_else(|| "out".into()))
}

/// Solve, audit and write artifacts under `root/<scenario id>/`.
pub fn execute(plan: &Plan, root: &Path) -> Result<RunOutcome, RunError> {
    let traj = solve(plan)?;
    let series = functional(plan, &traj)?;
    let audits = audit(plan, &traj)?;
    let probe = finite_time_probe(plan, &traj)?;
    let dir = root.join(plan.config.id());
    let out = &plan.config.output;
    if out.wants(Format::Trajectory) {
        to_file(&dir.join("trajectory.csv"), |f| write_trajectory(&traj, f))?;
        std::fs::write(dir.join("trajectory.toml"), trajectory_metadata(&traj))?;
    }
    if let (true, Some(s)) = (out.wants(Format::Glf), &series) {
        to_file(&dir.join("glf.csv"), |f| write_glf_series(s, f))?;
    }
    if out.wants(Format::Check) {
        for a in &audits {
            if let Audit::Checked(rep) = a {
                let name = format!("check_{}_q{}.csv", rep.kind.name(), q_label(rep.q));
                to_file(&dir.join(name), |f| write_check_report(rep, f))?;
            }
        }
    }
    let violations = audits
        .iter()
        .map(|a| match a {
            Audit::Checked(r) => r.violations,
            Audit::Skipped { .. } => 0,
        })
        .sum();
    let report = render_report(plan, &traj, series.as_ref(), &audits, probe, violations);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("report.txt"), &report)?;
    Ok(RunOutcome {
        report,
        violations,
        directory: dir,
    })
}

/// Marker line preceding the configuration echo in a report.
pub const CONFIG_MARKER: &str = "---- configuration ----";

/// Extract and re-parse the configuration echoed at the end of a report.
pub fn echoed_config(report: &str) -> Result<RunConfig, ConfigError> {
    let text = report
        .split_once(CONFIG_MARKER)
        .map(|(_, rest)| rest)
        .ok_or_else(|| ConfigError::new("report", "no configuration echo found"))?;
    RunConfig::parse(text)
}

fn render_report(
    plan: &Plan,
    traj: &Trajectory,
    series: Option<&GlfSeries>,
    audits: &[Audit],
    probe: Option<FiniteTimeProbe>,
    violations: usize,
) -> String {
    let mut s = String::new();
    let cfg = &plan.config;
    let _ = writeln!(s, "scenario: {} ({})", cfg.id(), traj.class());
    let grid = traj.grid();
    match grid {
        glfcert_core::Grid::D1(g) => {
            let _ = writeln!(
                s,
                "grid: n = {}, h = {}, layout {:?}",
                g.cells(),
                fmt_num(g.h()),
                g.layout()
            );
        }
        glfcert_core::Grid::D2(g) => {
            let _ = writeln!(s, "grid: nx = {}, ny = {}, edges {:?}", g.nx(), g.ny(), g.edges());
        }
    }
    let dts = &traj.meta.dt_history;
    let dt_max = dts.iter().cloned().fold(0.0, f64::max);
    let _ = writeln!(
        s,
        "solver: {}, steps = {}, stored = {}, t_end = {}, max dt = {}",
        traj.meta.scheme,
        dts.len(),
        traj.len(),
        fmt_num(plan.solver.t_end),
        fmt_num(dt_max)
    );
    if let Some(nu) = traj.meta.courant_history.iter().cloned().reduce(f64::max) {
        let _ = writeln!(s, "max courant number = {}", fmt_num(nu));
    }
    let _ = writeln!(
        s,
        "disturbance sups: closed windows [0, t], {DEFAULT_RESOLUTION} samples per signal piece, {SUP_POINTS} points per axis"
    );
    for note in &plan.notes {
        let _ = writeln!(s, "note: {note}");
    }
    if let Some(g) = plan.glf {
        let spec = g.spec;
        let _ = writeln!(
            s,
            "functional: p = {}, r = {}, eps = {}, truncation level M = {}, decay rate = {}",
            fmt_num(spec.p),
            fmt_num(spec.r),
            fmt_num(spec.eps),
            fmt_num(spec.level),
            fmt_num(g.decay)
        );
    }
    if let Some(series) = series {
        let _ = writeln!(
            s,
            "functional series: Vhat(0) = {}, Vhat(T) = {}, max residual = {}, final envelope = {}",
            fmt_num(series.vhat[0]),
            fmt_num(*series.vhat.last().expect("nonempty")),
            fmt_num(series.max_residual()),
            fmt_num(*series.envelope.last().expect("nonempty"))
        );
    }
    for a in audits {
        match a {
            Audit::Checked(r) => {
                let _ = writeln!(
                    s,
                    "check {} q={}: min margin = {}, violations = {}, tol = {}",
                    r.kind,
                    q_label(r.q),
                    fmt_num(r.min_margin),
                    r.violations,
                    fmt_num(r.tol)
                );
            }
            Audit::Skipped { label, reason } => {
                let _ = writeln!(s, "check {label}: skipped ({reason})");
            }
        }
    }
    match probe {
        Some(p) => {
            let _ = writeln!(
                s,
                "finite-time probe: at t = {}, sup|w_t| + sup|w_y| = {} {} floor 10h = {} ({})",
                fmt_num(p.t),
                fmt_num(p.sup_norm),
                if p.below_floor() { "<=" } else { ">" },
                fmt_num(p.floor),
                if p.below_floor() {
                    "below the diffusion floor"
                } else {
                    "above the diffusion floor"
                }
            );
        }
        None if matches!(plan.problem, Problem::Wave(_)) => {
            let _ = writeln!(
                s,
                "finite-time probe: not applicable (disturbed run or horizon before 2/c + 0.2)"
            );
        }
        None => {}
    }
    let _ = writeln!(
        s,
        "status: {} ({violations} violations)",
        if violations == 0 { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(s, "{CONFIG_MARKER}");
    s.push_str(&cfg.to_toml());
    s
}
