//! Built-in acceptance suite.
//!
//! Criteria are grouped by component; `all` runs the groups on separate
//! threads (each group owns its RNG and output file) and then repeats them to
//! confirm the report is reproducible.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use glfcert_core::certify::{bound_parabolic_q, bound_transport_q, bound_wave_m};
use glfcert_core::glf::{glf_eval, lambda0_local, transport_decay};
use glfcert_core::trunc::{gronwall_envelope, young_epsilon_gap, PropertyArgs};
use glfcert_core::{GlfSpec, State, Trajectory, TruncationPair};

use crate::build::Problem;
use crate::config::{BoundName, FieldSpec, PieceSpec, ProfileSpec, RunConfig, ScenarioSpec, SignalSpec};
use crate::fmt_num;
use crate::run::{self, Audit, Plan};
use crate::scenarios;

/// Component groups of the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Trunc,
    Parabolic,
    Transport,
    Wave,
    All,
}

impl Suite {
    pub const GROUPS: [Suite; 4] = [Suite::Trunc, Suite::Parabolic, Suite::Transport, Suite::Wave];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Trunc => "trunc",
            Suite::Parabolic => "parabolic",
            Suite::Transport => "transport",
            Suite::Wave => "wave",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trunc" => Ok(Suite::Trunc),
            "parabolic" => Ok(Suite::Parabolic),
            "transport" => Ok(Suite::Transport),
            "wave" => Ok(Suite::Wave),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite '{other}' (expected trunc, parabolic, transport, wave or all)"
            )),
        }
    }
}

/// Outcome of one criterion with its measured values.
#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

impl Criterion {
    fn new(id: &'static str, title: &'static str) -> Self {
        Self {
            id,
            title,
            passed: true,
            details: Vec::new(),
        }
    }

    /// Record a measured quantity against its threshold.
    fn expect(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.details
            .push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("     {line}"));
    }

    fn fail_with(id: &'static str, title: &'static str, err: String) -> Self {
        let mut c = Self::new(id, title);
        c.expect(false, format!("error: {err}"));
        c
    }

    /// `[PASS] id title` header line.
    pub fn headline(&self) -> String {
        format!(
            "[{}] {} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub criteria: Vec<Criterion>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!("verify {} --seed {}\n", self.suite.name(), self.seed);
        for c in &self.criteria {
            let _ = writeln!(s, "{}", c.headline());
            for d in &c.details {
                let _ = writeln!(s, "    {d}");
            }
        }
        let failed = self.criteria.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            s,
            "summary: {} of {} criteria passed",
            self.criteria.len() - failed,
            self.criteria.len()
        );
        s
    }
}

type Check = fn(u64) -> Result<Criterion, String>;

fn group_checks(suite: Suite) -> Vec<(&'static str, &'static str, Check)> {
    match suite {
        Suite::Trunc => vec![
            ("1", "truncation calculus", truncation_calculus as Check),
            ("2", "Young and Gronwall lemmas", lemmas),
            ("8", "bound evaluator constants", evaluator_constants),
        ],
        Suite::Parabolic => vec![
            (
                "3",
                "heat baseline under the quadratic estimate",
                heat_baseline as Check,
            ),
            ("4", "parabolic functional and L^q estimate", parabolic_functional),
        ],
        Suite::Transport => vec![
            ("5", "transport with bounded speed", transport_global as Check),
            ("6", "transport with decreasing speed", transport_local),
        ],
        Suite::Wave => vec![("7", "wave with matched damping", wave as Check)],
        Suite::All => Vec::new(),
    }
}

fn run_group(suite: Suite, seed: u64) -> Vec<Criterion> {
    group_checks(suite)
        .into_iter()
        .map(|(id, title, check)| check(seed).unwrap_or_else(|e| Criterion::fail_with(id, title, e)))
        .collect()
}

fn run_groups(groups: &[Suite], seed: u64, out: Option<&Path>) -> Vec<(Suite, Vec<Criterion>)> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = groups
            .iter()
            .map(|&g| {
                scope.spawn(move || {
                    let crit = run_group(g, seed);
                    if let Some(dir) = out {
                        let rep = SuiteReport {
                            suite: g,
                            seed,
                            criteria: crit.clone(),
                        };
                        let _ = std::fs::create_dir_all(dir)
                            .and_then(|_| std::fs::write(dir.join(format!("{}.txt", g.name())), rep.render()));
                    }
                    (g, crit)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite group panicked"))
            .collect()
    })
}

/// Run `suite` with `seed`. When `out` is set each group writes its own
/// report file there.
pub fn run_suite(suite: Suite, seed: u64, out: Option<&Path>) -> SuiteReport {
    let groups: Vec<Suite> = match suite {
        Suite::All => Suite::GROUPS.to_vec(),
        g => vec![g],
    };
    let first = run_groups(&groups, seed, out);
    let mut criteria: Vec<Criterion> = first.iter().flat_map(|(_, c)| c.clone()).collect();
    criteria.sort_by_key(|c| c.id.parse::<u32>().unwrap_or(u32::MAX));
    if suite == Suite::All {
        let second = run_groups(&groups, seed, None);
        let mut c = Criterion::new("9", "determinism");
        let same = first == second;
        c.expect(
            same,
            format!(
                "second pass with seed {seed}: {}",
                if same { "identical" } else { "differs" }
            ),
        );
        criteria.push(c);
    }
    SuiteReport { suite, seed, criteria }
}

// ---- helpers -------------------------------------------------------------

fn bundled(name: &str) -> Result<RunConfig, String> {
    let b = scenarios::find(name).ok_or_else(|| format!("no bundled scenario '{name}'"))?;
    RunConfig::parse(b.source).map_err(|e| e.to_string())
}

fn planned(cfg: RunConfig) -> Result<Plan, String> {
    let text = cfg.to_toml();
    run::plan(cfg, &text).map_err(|e| e.to_string())
}

fn solved(plan: &Plan) -> Result<Trajectory, String> {
    run::solve(plan).map_err(|e| e.to_string())
}

fn audits(plan: &Plan, traj: &Trajectory) -> Result<Vec<Audit>, String> {
    run::audit(plan, traj).map_err(|e| e.to_string())
}

fn q_text(q: f64) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        format!("{q}")
    }
}

/// Record every audit: checked ones must have zero violations.
fn expect_audits(c: &mut Criterion, what: &str, list: &[Audit]) -> usize {
    let mut checked = 0;
    for a in list {
        match a {
            Audit::Checked(r) => {
                checked += 1;
                c.expect(
                    r.violations == 0,
                    format!(
                        "{what}: {} q={} violations = {} (need 0), min margin = {}, tol = {}",
                        r.kind,
                        q_text(r.q),
                        r.violations,
                        fmt_num(r.min_margin),
                        fmt_num(r.tol)
                    ),
                );
            }
            Audit::Skipped { label, reason } => c.note(format!("{what}: {label} skipped ({reason})")),
        }
    }
    checked
}

fn within(elapsed: Duration, limit: Duration) -> String {
    format!(
        "runtime under {} s: {}",
        limit.as_secs(),
        if elapsed < limit { "yes" } else { "no" }
    )
}

fn max_time_step(traj: &Trajectory) -> f64 {
    traj.meta.dt_history.iter().cloned().fold(0.0, f64::max)
}

// ---- truncation group ---------------------------------------------------

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn truncation_calculus(seed: u64) -> Result<Criterion, String> {
    let mut c = Criterion::new("1", "truncation calculus");
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const SAMPLES: usize = 10_000;
    for p in [1.5, 2.0, 3.0, 5.0] {
        let pair = TruncationPair::new(p).map_err(|e| e.to_string())?;
        let mut vanish_fail = 0usize;
        let mut monotone_fail = 0usize;
        let mut identity_err: f64 = 0.0;
        let mut scaling_err: f64 = 0.0;
        let mut min_gap = [f64::INFINITY; 5];
        let names = ["shift-split", "absolute-shift", "doubling", "band-sandwich", "young"];
        for _ in 0..SAMPLES {
            let s: f64 = rng.gen_range(-10.0..10.0);
            let tau: f64 = rng.gen_range(-10.0..10.0);
            let level: f64 = rng.gen_range(0.0..10.0);
            let eps = log_uniform(&mut rng, 1e-2, 1e2);
            let m = log_uniform(&mut rng, 1e-2, 1e2);

            let neg = -s.abs();
            if pair.power_unchecked(neg) != 0.0 || pair.primitive_unchecked(neg) != 0.0 {
                vanish_fail += 1;
            }
            let big = pair.primitive_unchecked(s);
            let via_power = pair.power_unchecked(s) * s / (p + 1.0);
            if big != 0.0 || via_power != 0.0 {
                identity_err = identity_err.max((big - via_power).abs() / big.abs().max(via_power.abs()));
            }
            let (lo, hi) = if s <= tau { (s, tau) } else { (tau, s) };
            if pair.power_unchecked(lo) > pair.power_unchecked(hi) {
                monotone_fail += 1;
            }
            let scaled = pair.primitive_unchecked(m * s);
            let expected = m.powf(p + 1.0) * big;
            if scaled != 0.0 || expected != 0.0 {
                scaling_err = scaling_err.max((scaled - expected).abs() / scaled.abs().max(expected.abs()));
            }
            let cases = [
                PropertyArgs::ShiftSplit { s, tau },
                PropertyArgs::AbsoluteShift { s, tau },
                PropertyArgs::Doubling { s, tau },
                PropertyArgs::BandSandwich { s, tau, level },
                PropertyArgs::Young { s, tau, eps },
            ];
            for (k, args) in cases.into_iter().enumerate() {
                let t = pair.property_terms(args).map_err(|e| e.to_string())?;
                min_gap[k] = min_gap[k].min(t.gap() / (1.0 + t.lhs.abs()));
            }
        }
        c.expect(
            vanish_fail == 0,
            format!("p={p}: g and G vanish for s <= 0, failures = {vanish_fail} (need 0)"),
        );
        c.expect(
            identity_err <= 1e-12,
            format!(
                "p={p}: G(s) = g(s)·s/(p+1), max relative error = {} (<= 1e-12)",
                fmt_num(identity_err)
            ),
        );
        c.expect(
            monotone_fail == 0,
            format!("p={p}: g nondecreasing, failures = {monotone_fail} (need 0)"),
        );
        for (name, gap) in names.iter().zip(min_gap) {
            c.expect(
                gap >= -1e-9,
                format!("p={p}: {name} min relative gap = {} (>= -1e-9)", fmt_num(gap)),
            );
        }
        c.expect(
            scaling_err <= 1e-12,
            format!(
                "p={p}: G(ms) = m^(p+1) G(s), max relative error = {} (<= 1e-12)",
                fmt_num(scaling_err)
            ),
        );
    }
    c.expect(
        start.elapsed() < Duration::from_secs(5),
        within(start.elapsed(), Duration::from_secs(5)),
    );
    Ok(c)
}

fn lemmas(seed: u64) -> Result<Criterion, String> {
    let mut c = Criterion::new("2", "Young and Gronwall lemmas");
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut min_gap = f64::INFINITY;
    for _ in 0..10_000 {
        let r = rng.gen_range(1.05..6.0);
        let q = r / (r - 1.0);
        let a = rng.gen_range(0.0..10.0);
        let b = rng.gen_range(0.0..10.0);
        let eps = log_uniform(&mut rng, 1e-2, 1e2);
        let gap = young_epsilon_gap(r, q, a, b, eps).map_err(|e| e.to_string())?;
        min_gap = min_gap.min(gap);
    }
    c.expect(
        min_gap >= 0.0,
        format!("Young with eps: min gap = {} (>= 0)", fmt_num(min_gap)),
    );
    let dt = 1e-3;
    let n = 1001;
    let env = gronwall_envelope(&vec![-1.0; n], &vec![1.0; n], 0.0, dt).map_err(|e| e.to_string())?;
    let err = env
        .iter()
        .enumerate()
        .map(|(i, e)| (e - (1.0 - (-(i as f64) * dt).exp())).abs())
        .fold(0.0, f64::max);
    c.expect(
        err <= 1e-5,
        format!(
            "Gronwall envelope of η' = −η + 1 on [0, 1], dt = 1e-3: max error = {} (<= 1e-5)",
            fmt_num(err)
        ),
    );
    Ok(c)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn evaluator_constants(_seed: u64) -> Result<Criterion, String> {
    let mut c = Criterion::new("8", "bound evaluator constants");
    let e = |r: glfcert_core::Result<f64>| r.map_err(|e| e.to_string());
    let at_zero = e(bound_parabolic_q(2.0, 0.0, 1.0, 0.0, 1.0))?;
    c.expect(
        at_zero == 4.0,
        format!(
            "parabolic L^q estimate at t = 0, unit data: {} (== 4)",
            fmt_num(at_zero)
        ),
    );
    let mut gain_ok = true;
    for level in [0.25, 1.0, 3.0, 7.5] {
        for t in [0.0, 1.0, 10.0] {
            gain_ok &= e(bound_parabolic_q(2.0, t, 0.0, level, 1.0))? == 8.0 * level;
        }
    }
    c.expect(
        gain_ok,
        "parabolic level gain equals 8M exactly for M in {0.25, 1, 3, 7.5}".into(),
    );
    let wave = e(bound_wave_m(2.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0))?;
    let target = 8.0 * 4f64.exp();
    c.expect(
        rel(wave, target) <= 1e-10,
        format!(
            "wave m-form at t = 0, m = c = 1: {} vs 8e^4 = {} (relative <= 1e-10)",
            fmt_num(wave),
            fmt_num(target)
        ),
    );
    let mut worst: f64 = 0.0;
    for k in [0.1, 0.25, 0.5, -0.5, 0.9] {
        for q in [2.0, 4.0, f64::INFINITY] {
            worst = worst.max(rel(e(bound_transport_q(q, k, 0.0, 1.0, 1.0, 0.0))?, 2.0 / f64::abs(k)));
        }
    }
    c.expect(
        worst <= 1e-12,
        format!(
            "transport L^q prefactor vs 2/|k|: max relative error = {} (<= 1e-12)",
            fmt_num(worst)
        ),
    );
    Ok(c)
}

// ---- parabolic group ----------------------------------------------------

fn heat_baseline(_seed: u64) -> Result<Criterion, String> {
    let mut c = Criterion::new("3", "heat baseline under the quadratic estimate");
    let start = Instant::now();
    let plan = planned(bundled("heat_clm_demo")?)?;
    let traj = solved(&plan)?;
    let list = audits(&plan, &traj)?;
    let elapsed = start.elapsed();
    let h = traj.grid().h();
    let tol = h * h + max_time_step(&traj);
    for a in &list {
        if let Audit::Checked(r) = a {
            c.expect(
                r.min_margin > 0.0,
                format!("{} L2 norm: min margin = {} (> 0)", r.kind, fmt_num(r.min_margin)),
            );
            c.expect(
                r.violations == 0 && r.tol == tol,
                format!(
                    "violations at tolerance h² + dt = {}: {} (need 0)",
                    fmt_num(tol),
                    r.violations
                ),
            );
        }
    }
    c.expect(
        list.iter().any(|a| matches!(a, Audit::Checked(_))),
        "heat estimate audited".into(),
    );
    c.expect(
        elapsed < Duration::from_secs(10),
        within(elapsed, Duration::from_secs(10)),
    );
    Ok(c)
}

/// Reporting constant for the residual bound `max residual <= C (h + dt)`.
pub const RESIDUAL_CONSTANT: f64 = 1.0;

fn parabolic_functional(_seed: u64) -> Result<Criterion, String> {
    let mut c = Criterion::new("4", "parabolic functional and L^q estimate");
    let base = bundled("parabolic_demo")?;
    let mut maxima = Vec::new();
    for n in [50, 100, 200] {
        let mut cfg = base.clone();
        cfg.grid.n = Some(n);
        cfg.solver.t_end = 1.0;
        let plan = planned(cfg)?;
        let level = plan.glf.map(|g| g.spec.level).unwrap_or(f64::NAN);
        let traj = solved(&plan)?;
        let series = run::functional(&plan, &traj)
            .map_err(|e| e.to_string())?
            .ok_or("no functional planned")?;
        let scale = traj.grid().h() + max_time_step(&traj);
        let worst = series.max_residual();
        c.expect(
            worst <= RESIDUAL_CONSTANT * scale,
            format!(
                "n={n}: M = {}, max residual = {} <= C·(h + dt) = {} with C = {RESIDUAL_CONSTANT}",
                fmt_num(level),
                fmt_num(worst),
                fmt_num(RESIDUAL_CONSTANT * scale)
            ),
        );
        maxima.push(worst);
    }
    let decreasing = maxima.windows(2).all(|w| w[1] < w[0]);
    c.expect(decreasing, "max residual decreases over both refinements".into());

    let plan = planned(base)?;
    let traj = solved(&plan)?;
    let list = audits(&plan, &traj)?;
    let checked = expect_audits(&mut c, "n=100", &list);
    c.expect(
        checked == 3,
        format!("estimates audited for q in {{2, 4, inf}}: {checked} (need 3)"),
    );
    Ok(c)
}

// ---- transport group ----------------------------------------------------

fn transport_scenario(cfg: &mut RunConfig) -> Result<&mut crate::config::TransportSpec, String> {
    match &mut cfg.scenario {
        ScenarioSpec::Transport(t) => Ok(t),
        _ => Err("expected a transport scenario".into()),
    }
}

fn transport_global(_seed: u64) -> Result<Criterion, String> {
    let mut c = Criterion::new("5", "transport with bounded speed");
    let base = bundled("transport_global")?;

    // undisturbed functional decay at the weight rate
    let mut cfg = base.clone();
    {
        let t = transport_scenario(&mut cfg)?;
        t.d = SignalSpec::Value(0.0);
        t.rho0 = ProfileSpec::Bump {
            center: 0.4,
            radius: 0.3,
            height: 1.0,
        };
    }
    cfg.solver.t_end = 3.0;
    let plan = planned(cfg)?;
    let traj = solved(&plan)?;
    let r = 3.0 * std::f64::consts::LN_2;
    let spec = GlfSpec::transport(2.0, r, 0.0, 0.5).map_err(|e| e.to_string())?;
    let grid = traj.grid();
    let v0 = glf_eval(&traj.frames()[0], grid, &spec).map_err(|e| e.to_string())?;
    let h = grid.h();
    let mut worst = 0.0f64;
    for (t, s) in traj.times().iter().zip(traj.frames()) {
        let v = glf_eval(s, grid, &spec).map_err(|e| e.to_string())?;
        worst = worst.max(v / ((-transport_decay(r, 1.0) * t).exp() * v0));
    }
    c.expect(
        worst <= 1.0 + 10.0 * h,
        format!(
            "max Vhat(t) / (e^(-rt) Vhat(0)) with r = 3 ln 2 = {} (<= 1 + 10h = {})",
            fmt_num(worst),
            fmt_num(1.0 + 10.0 * h)
        ),
    );

    let mut cfg = base;
    cfg.certify.bounds = Some(vec![BoundName::TransportQ]);
    let plan = planned(cfg)?;
    let traj = solved(&plan)?;
    let checked = expect_audits(
        &mut c,
        "disturbed run",
        &run::audit(&plan, &traj).map_err(|e| e.to_string())?,
    );
    c.expect(
        checked == 2,
        format!("L^q estimate audited for q in {{2, inf}}: {checked} (need 2)"),
    );

    let mut cfg = bundled("transport_steady")?;
    cfg.solver.output_stride = Some(1);
    let plan = planned(cfg)?;
    let traj = solved(&plan)?;
    let steps = traj.meta.dt_history.len();
    let rho = 0.4;
    let drift = traj
        .frames()
        .iter()
        .flat_map(|s| match s {
            State::Transport { rho } => rho.clone(),
            _ => Vec::new(),
        })
        .map(|v| (v - rho).abs())
        .fold(0.0, f64::max);
    c.expect(steps >= 1000, format!("steady state run: {steps} steps (>= 1000)"));
    c.expect(
        drift <= 1e-10,
        format!("steady state drift = {} (<= 1e-10)", fmt_num(drift)),
    );
    Ok(c)
}

fn transport_local(_seed: u64) -> Result<Criterion, String> {
    let mut c = Criterion::new("6", "transport with decreasing speed");
    let base = bundled("transport_liss")?;
    let plan = planned(base.clone())?;
    let Problem::Transport { scn, r0: Some(r0) } = &plan.problem else {
        return Err("transport_liss is not a local transport scenario".into());
    };
    let rate = lambda0_local(scn, *r0).map_err(|e| e.to_string())?;
    c.expect(
        rate.lambda0 == 0.2,
        format!(
            "local rate = {} at radius {} (== 0.2)",
            fmt_num(rate.lambda0),
            fmt_num(rate.radius)
        ),
    );

    let mut cfg = base;
    {
        let t = transport_scenario(&mut cfg)?;
        t.rho0 = ProfileSpec::Constant { value: 1.0 };
        t.d = SignalSpec::Value(0.5);
    }
    let rejected = planned(cfg)?;
    let traj = solved(&rejected)?;
    let list = audits(&rejected, &traj)?;
    let closed = list.iter().all(|a| matches!(a, Audit::Skipped { .. }));
    c.expect(
        closed,
        "‖ρ₀‖ + sup|d| = 1.5: local estimate rejected for every q".into(),
    );

    let traj = solved(&plan)?;
    let list = audits(&plan, &traj)?;
    let checked = expect_audits(&mut c, "‖ρ₀‖ + sup|d| = 0.9", &list);
    c.expect(
        checked == plan.qs.len(),
        format!("accepted for every q: {checked} of {}", plan.qs.len()),
    );
    Ok(c)
}

// ---- wave group ---------------------------------------------------------

fn wave_scenario(cfg: &mut RunConfig) -> Result<&mut crate::config::WaveSpec, String> {
    match &mut cfg.scenario {
        ScenarioSpec::Wave(w) => Ok(w),
        _ => Err("expected a wave scenario".into()),
    }
}

fn wave(_seed: u64) -> Result<Criterion, String> {
    let mut c = Criterion::new("7", "wave with matched damping");

    // (a) boundary closures at every step of a disturbed run
    let mut cfg = bundled("wave_disturbed")?;
    wave_scenario(&mut cfg)?.c = 2.0;
    cfg.solver.output_stride = Some(1);
    cfg.solver.t_end = 2.0;
    let plan = planned(cfg)?;
    let Problem::Wave(scn) = &plan.problem else {
        return Err("expected a wave problem".into());
    };
    let traj = solved(&plan)?;
    let (mut right, mut left) = (0.0f64, 0.0f64);
    for (t, s) in traj.times().iter().zip(traj.frames()) {
        if let State::Wave { xi, eta } = s {
            right = right.max((xi[xi.len() - 1] - scn.c * scn.d.value(*t)).abs());
            left = left.max((eta[0] + xi[0]).abs());
        }
    }
    c.expect(
        right == 0.0 && left == 0.0,
        format!(
            "c = 2, k = 0.5, {} steps: max |ξ(1,t) − c d(t)| = {}, max |η(0,t) + ξ(0,t)| = {} (both exactly 0)",
            traj.meta.dt_history.len(),
            fmt_num(right),
            fmt_num(left)
        ),
    );

    // (b) finite-time absorption of an undisturbed bump
    let plan = planned(bundled("wave_finite_time")?)?;
    let traj = solved(&plan)?;
    match run::finite_time_probe(&plan, &traj).map_err(|e| e.to_string())? {
        Some(p) => c.expect(
            p.below_floor(),
            format!(
                "sup|w_t| + sup|w_y| at t = {} is {} (<= 10h = {})",
                fmt_num(p.t),
                fmt_num(p.sup_norm),
                fmt_num(p.floor)
            ),
        ),
        None => c.expect(false, "finite-time probe unavailable".into()),
    }

    // (c) both estimates on undisturbed-boundary runs, q in {2, 4}
    let mut free = bundled("wave_finite_time")?;
    free.solver.t_end = 3.0;
    let mut forced = free.clone();
    wave_scenario(&mut forced)?.f = FieldSpec::Value(0.5);
    for (label, mut cfg) in [("bump", free), ("forced", forced)] {
        cfg.glf.r = Some(1.0);
        cfg.glf.eps = Some(1.0);
        cfg.glf.m = Some(1.0);
        cfg.certify.q = Some(vec![2.0, 4.0]);
        cfg.certify.bounds = Some(vec![BoundName::WaveM, BoundName::WaveREps]);
        let plan = planned(cfg)?;
        let traj = solved(&plan)?;
        let checked = expect_audits(&mut c, label, &audits(&plan, &traj)?);
        c.expect(checked == 4, format!("{label}: estimates audited: {checked} (need 4)"));
    }

    // boundary-disturbed run: the m-form estimate only
    let mut cfg = bundled("wave_finite_time")?;
    cfg.solver.t_end = 3.0;
    wave_scenario(&mut cfg)?.d = SignalSpec::Piece(PieceSpec::Constant { start: 0.0, value: 0.4 });
    cfg.glf.m = Some(1.0);
    cfg.certify.q = Some(vec![2.0, 4.0]);
    cfg.certify.bounds = Some(vec![BoundName::WaveM]);
    let plan = planned(cfg)?;
    let traj = solved(&plan)?;
    expect_audits(&mut c, "d = 0.4", &audits(&plan, &traj)?);
    c.note(
        "d = 0.4: the (r, eps) form is not audited; its boundary gain (2/c)·sup|d| is below the transient \
         (c+1)·d/2 when c > 1"
            .into(),
    );
    Ok(c)
}
