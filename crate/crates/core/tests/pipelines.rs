//! Solver → functional → estimate pipelines on the reference scenarios.

use std::f64::consts::LN_2;

use glfcert_core::certify::{
    bound_transport_liss, check_trajectory, default_tolerance, BoundKind, InputSups, IssBound, LissVariant,
};
use glfcert_core::fields::{EdgeKind, Grid1D, Layout};
use glfcert_core::glf::{
    dissipation_report, glf_eval, lambda0_local, parabolic_decay, parabolic_level, parabolic_running_sups,
    transport_decay, wave_decay, wave_slack, ParabolicSups,
};
use glfcert_core::signals::{running_sup_field, SampleSpec, DEFAULT_RESOLUTION};
use glfcert_core::solvers::{solve_parabolic, solve_transport, solve_wave, SolverConfig, SpeedAssumption, SpeedMap};
use glfcert_core::{
    Field, GlfSpec, Grid, MonotoneFn, ParabolicScenario, Profile, SpaceTimeField, TimeSignal, Trajectory,
    TransportScenario, WaveScenario,
};

const QS: [f64; 3] = [2.0, 4.0, f64::INFINITY];

fn line(n: usize, layout: Layout) -> Grid {
    Grid::D1(Grid1D::new(n, layout).unwrap())
}

fn bump(center: f64, radius: f64, height: f64) -> Profile {
    Profile::Bump { center, radius, height }
}

/// a = c = 1, identity nonlinearities, constant disturbances with level M = 1.
fn reaction_diffusion(n: usize) -> ParabolicScenario {
    let grid = line(n, Layout::Node);
    let w0 = Profile::Sine {
        amplitude: 3.0,
        wavenumber: 1.0,
        offset: 0.25,
    };
    ParabolicScenario {
        id: "reaction_diffusion".into(),
        a: SpaceTimeField::constant(1.0),
        c: SpaceTimeField::constant(1.0),
        a0: 1.0,
        c0: 1.0,
        phi: MonotoneFn::identity(-100.0, 100.0).unwrap(),
        h_term: None,
        varphi: MonotoneFn::identity(-100.0, 100.0).unwrap(),
        f: SpaceTimeField::constant(0.5),
        d1: SpaceTimeField::constant(0.25),
        d2: SpaceTimeField::constant(0.25),
        w0: Field::from_fn(grid, 0.0, |p| w0.eval(p)).unwrap(),
        ends: [EdgeKind::Dirichlet, EdgeKind::Robin],
    }
}

fn parabolic_bound(scn: &ParabolicScenario, tr: &Trajectory, q: f64) -> IssBound {
    let inputs = parabolic_running_sups(scn, tr.times())
        .unwrap()
        .into_iter()
        .map(|s| InputSups {
            level: parabolic_level(scn, s).unwrap(),
            ..Default::default()
        })
        .collect();
    IssBound {
        kind: BoundKind::ParabolicQ { c0: scn.c0 },
        initial_norm: scn.w0.lq_norm(q).unwrap(),
        inputs,
    }
}

#[test]
fn parabolic_level_is_one() {
    let scn = reaction_diffusion(50);
    let m = parabolic_level(
        &scn,
        ParabolicSups {
            f: 0.5,
            d1: 0.25,
            d2: 0.25,
        },
    )
    .unwrap();
    assert!((m - 1.0).abs() < 1e-10);
}

#[test]
fn parabolic_residual_shrinks_under_refinement() {
    // Robin at both ends, uniform start above the level
    let mut maxima = Vec::new();
    for n in [50, 100, 200] {
        let mut scn = reaction_diffusion(n);
        scn.d1 = SpaceTimeField::zero();
        scn.d2 = SpaceTimeField::constant(0.5);
        scn.ends = [EdgeKind::Robin, EdgeKind::Robin];
        scn.w0 = Field::from_fn(*scn.w0.grid(), 0.0, |_| 3.0).unwrap();
        let grid = *scn.w0.grid();
        let tr = solve_parabolic(&scn, &grid, &SolverConfig::new(1.0)).unwrap();
        let spec = GlfSpec::parabolic(2.0, 1.0).unwrap();
        let slack = vec![0.0; tr.len()];
        let series = dissipation_report(&tr, &spec, parabolic_decay(1.0, 2.0), &slack).unwrap();
        assert!(series.vhat.iter().all(|&v| v > 0.0));
        let dt = tr.meta.dt_history.iter().cloned().fold(0.0, f64::max);
        assert!(series.max_residual() <= grid.h() + dt);
        maxima.push(series.max_residual());
    }
    assert!(maxima[1] < maxima[0] && maxima[2] < maxima[1], "{maxima:?}");
}

#[test]
fn parabolic_estimate_holds_for_each_q() {
    let scn = reaction_diffusion(100);
    let grid = *scn.w0.grid();
    let tr = solve_parabolic(&scn, &grid, &SolverConfig::new(3.0)).unwrap();
    let tol = default_tolerance(&tr);
    for q in QS {
        let rep = check_trajectory(&tr, q, &parabolic_bound(&scn, &tr, q), tol).unwrap();
        assert_eq!(rep.violations, 0, "q = {q}");
    }
}

fn transport(
    n: usize,
    lambda: SpeedMap,
    assumption: SpeedAssumption,
    d: TimeSignal,
    rho0: Profile,
) -> TransportScenario {
    let grid = line(n, Layout::Cell);
    TransportScenario {
        id: "transport".into(),
        lambda,
        assumption,
        k: 0.5,
        d,
        rho0: Field::from_fn(grid, 0.0, |p| rho0.eval(p)).unwrap(),
    }
}

#[test]
fn transport_functional_decays_at_the_weight_rate() {
    let n = 200;
    let scn = transport(
        n,
        SpeedMap::constant(1.0),
        SpeedAssumption::Bounded { lambda0: 1.0 },
        TimeSignal::zero(),
        bump(0.4, 0.3, 1.0),
    );
    let grid = *scn.rho0.grid();
    let tr = solve_transport(&scn, &grid, &SolverConfig::new(3.0).with_sigma(0.8)).unwrap();
    let r = 3.0 * LN_2;
    let spec = GlfSpec::transport(2.0, r, 0.0, 0.5).unwrap();
    let v0 = glf_eval(&tr.frames()[0], &grid, &spec).unwrap();
    let h = grid.h();
    for (t, s) in tr.times().iter().zip(tr.frames()) {
        let v = glf_eval(s, &grid, &spec).unwrap();
        let cap = (-transport_decay(r, 1.0) * t).exp() * v0 * (1.0 + 10.0 * h);
        assert!(v <= cap, "t={t} v={v} cap={cap}");
    }
    for q in [2.0, f64::INFINITY] {
        let bound = IssBound {
            kind: BoundKind::TransportQ { k: 0.5, lambda0: 1.0 },
            initial_norm: scn.rho0.lq_norm(q).unwrap(),
            inputs: vec![InputSups::default(); tr.len()],
        };
        let rep = check_trajectory(&tr, q, &bound, default_tolerance(&tr)).unwrap();
        assert_eq!(rep.violations, 0);
    }
}

#[test]
fn transport_disturbed_run_respects_the_estimates() {
    let scn = transport(
        200,
        SpeedMap::constant(1.0),
        SpeedAssumption::Bounded { lambda0: 1.0 },
        TimeSignal::single(glfcert_core::signals::SignalKind::Sinusoid {
            offset: 0.1,
            amplitude: 0.2,
            frequency: 1.0,
            phase: 0.0,
        })
        .unwrap(),
        bump(0.5, 0.25, 1.5),
    );
    let grid = *scn.rho0.grid();
    let tr = solve_transport(&scn, &grid, &SolverConfig::new(4.0)).unwrap();
    let sup_d = scn.d.running_sup(tr.times(), DEFAULT_RESOLUTION).unwrap();
    let inputs: Vec<InputSups> = sup_d
        .iter()
        .map(|&d| InputSups {
            d,
            ..Default::default()
        })
        .collect();
    for q in [2.0, f64::INFINITY] {
        let bound = IssBound {
            kind: BoundKind::TransportQ { k: 0.5, lambda0: 1.0 },
            initial_norm: scn.rho0.lq_norm(q).unwrap(),
            inputs: inputs.clone(),
        };
        let rep = check_trajectory(&tr, q, &bound, default_tolerance(&tr)).unwrap();
        assert_eq!(rep.violations, 0);
    }
    let p_bound = IssBound {
        kind: BoundKind::TransportP {
            p: 2.0,
            r: 3.0 * LN_2,
            lambda0: 1.0,
        },
        initial_norm: scn.rho0.lq_norm(3.0).unwrap(),
        inputs,
    };
    let rep = check_trajectory(&tr, 3.0, &p_bound, default_tolerance(&tr)).unwrap();
    assert_eq!(rep.violations, 0);
}

#[test]
fn steady_transport_state_is_preserved() {
    // constant density with inflow k·ρ + d = ρ
    let rho = 0.4;
    let d = (1.0 - 0.5) * rho;
    let scn = transport(
        100,
        SpeedMap::constant(1.0),
        SpeedAssumption::Bounded { lambda0: 1.0 },
        TimeSignal::constant(d),
        Profile::Constant { value: rho },
    );
    let grid = *scn.rho0.grid();
    let tr = solve_transport(&scn, &grid, &SolverConfig::new(10.0).with_sigma(0.8)).unwrap();
    assert!(tr.meta.dt_history.len() >= 1000);
    let drift = tr
        .frames()
        .iter()
        .flat_map(|s| match s {
            glfcert_core::State::Transport { rho: v } => v.clone(),
            _ => unreachable!(),
        })
        .map(|v| (v - rho).abs())
        .fold(0.0, f64::max);
    assert!(drift <= 1e-10, "drift {drift}");
}

fn decreasing_speed() -> SpeedMap {
    SpeedMap::new("1/(1+|s|)", |s: f64| 1.0 / (1.0 + s.abs()))
}

#[test]
fn local_transport_gate_and_bound() {
    let r0 = 1.0;
    let rejected = transport(
        200,
        decreasing_speed(),
        SpeedAssumption::Decreasing,
        TimeSignal::constant(0.5),
        Profile::Constant { value: 1.0 },
    );
    assert_eq!(lambda0_local(&rejected, r0).unwrap().lambda0, 0.2);
    let norm = rejected.rho0.lq_norm(2.0).unwrap();
    let gate = bound_transport_liss(LissVariant::Q { q: 2.0 }, &rejected, r0, 0.0, norm, 0.5, 0.5).unwrap();
    assert!(!gate.gate);

    let accepted = transport(
        200,
        decreasing_speed(),
        SpeedAssumption::Decreasing,
        TimeSignal::constant(0.3),
        Profile::Constant { value: 0.6 },
    );
    let grid = *accepted.rho0.grid();
    let tr = solve_transport(&accepted, &grid, &SolverConfig::new(6.0)).unwrap();
    for q in [2.0, f64::INFINITY] {
        let norm = accepted.rho0.lq_norm(q).unwrap();
        let sup_d = accepted.d.running_sup(tr.times(), DEFAULT_RESOLUTION).unwrap();
        let open = bound_transport_liss(LissVariant::Q { q }, &accepted, r0, 0.0, norm, 0.3, 0.3).unwrap();
        assert!(open.gate);
        let bound = IssBound {
            kind: BoundKind::TransportLiss {
                variant: LissVariant::Q { q },
                k: 0.5,
                lambda0: open.lambda0,
            },
            initial_norm: norm,
            inputs: sup_d
                .iter()
                .map(|&d| InputSups {
                    d,
                    ..Default::default()
                })
                .collect(),
        };
        let rep = check_trajectory(&tr, q, &bound, default_tolerance(&tr)).unwrap();
        assert_eq!(rep.violations, 0);
    }
}

fn wave(n: usize, f: SpaceTimeField, d: TimeSignal, phi0: Profile) -> WaveScenario {
    let grid = line(n, Layout::Node);
    WaveScenario {
        id: "wave".into(),
        c: 2.0,
        f,
        d,
        w0: Field::from_fn(grid, 0.0, |_| 0.0).unwrap(),
        phi0: Field::from_fn(grid, 0.0, |p| phi0.eval(p)).unwrap(),
    }
}

fn wave_inputs(scn: &WaveScenario, tr: &Trajectory) -> Vec<InputSups> {
    let sup_f = running_sup_field(&scn.f, SampleSpec::new(1, 65), tr.times()).unwrap();
    let sup_d = scn.d.running_sup(tr.times(), DEFAULT_RESOLUTION).unwrap();
    sup_f
        .into_iter()
        .zip(sup_d)
        .map(|(f, d)| InputSups { f, d, level: 0.0 })
        .collect()
}

fn wave_init(scn: &WaveScenario, q: f64) -> f64 {
    let g = scn.w0.grid();
    let slope = glfcert_core::solvers::wave::gradient(scn.w0.values(), g.h());
    scn.phi0.lq_norm(q).unwrap() + glfcert_core::fields::weighted_lq(&slope, &g.weights(), q).unwrap()
}

fn check_wave(scn: &WaveScenario, t_end: f64, kinds: &[BoundKind], qs: &[f64]) -> Vec<f64> {
    let grid = *scn.w0.grid();
    let tr = solve_wave(scn, &grid, &SolverConfig::new(t_end).with_sigma(0.9)).unwrap();
    let inputs = wave_inputs(scn, &tr);
    let mut margins = Vec::new();
    for kind in kinds {
        for &q in qs {
            let bound = IssBound {
                kind: *kind,
                initial_norm: wave_init(scn, q),
                inputs: inputs.clone(),
            };
            let rep = check_trajectory(&tr, q, &bound, default_tolerance(&tr)).unwrap();
            margins.push(rep.min_margin + rep.tol);
        }
    }
    margins
}

#[test]
fn wave_estimates_hold_without_boundary_disturbance() {
    let kinds = [
        BoundKind::WaveM { m: 1.0, c: 2.0 },
        BoundKind::WaveREps {
            r: 1.0,
            eps: 1.0,
            c: 2.0,
        },
    ];
    let free = wave(400, SpaceTimeField::zero(), TimeSignal::zero(), bump(0.5, 0.2, 1.0));
    let forced = wave(
        400,
        SpaceTimeField::uniform(TimeSignal::constant(0.5)),
        TimeSignal::zero(),
        bump(0.5, 0.2, 1.0),
    );
    for scn in [free, forced] {
        for m in check_wave(&scn, 3.0, &kinds, &[2.0, 4.0]) {
            assert!(m >= 0.0);
        }
    }
}

#[test]
fn wave_m_estimate_holds_with_boundary_disturbance() {
    let scn = wave(
        400,
        SpaceTimeField::zero(),
        TimeSignal::constant(0.4),
        bump(0.5, 0.2, 1.0),
    );
    for m in check_wave(
        &scn,
        3.0,
        &[BoundKind::WaveM { m: 1.0, c: 2.0 }],
        &[2.0, 4.0, f64::INFINITY],
    ) {
        assert!(m >= 0.0);
    }
}

#[test]
fn wave_dissipation_residual() {
    let scn = wave(
        400,
        SpaceTimeField::uniform(TimeSignal::constant(0.5)),
        TimeSignal::zero(),
        bump(0.5, 0.2, 1.0),
    );
    let grid = *scn.w0.grid();
    let tr = solve_wave(&scn, &grid, &SolverConfig::new(3.0)).unwrap();
    let spec = GlfSpec::wave(2.0, 1.0, 1.0, 0.0, 2.0).unwrap();
    let slack = wave_slack(&tr, &scn.f, &spec).unwrap();
    let series = dissipation_report(&tr, &spec, wave_decay(2.0, 1.0, 1.0), &slack).unwrap();
    assert!(series.max_residual() <= 0.0);
}

#[test]
fn heat_run_stays_under_the_quadratic_estimate() {
    let grid = line(200, Layout::Node);
    let w0 = bump(0.5, 0.3, 1.0);
    let forcing = TimeSignal::single(glfcert_core::signals::SignalKind::Sinusoid {
        offset: 0.0,
        amplitude: 0.3,
        frequency: 1.0,
        phase: 0.0,
    })
    .unwrap();
    let scn = ParabolicScenario {
        id: "heat".into(),
        a: SpaceTimeField::constant(1.0),
        c: SpaceTimeField::zero(),
        a0: 1.0,
        c0: 0.0,
        phi: MonotoneFn::identity(-100.0, 100.0).unwrap(),
        h_term: None,
        varphi: MonotoneFn::identity(-100.0, 100.0).unwrap(),
        f: SpaceTimeField::uniform(forcing),
        d1: SpaceTimeField::zero(),
        d2: SpaceTimeField::constant(0.2),
        w0: Field::from_fn(grid, 0.0, |p| w0.eval(p)).unwrap(),
        ends: [EdgeKind::Dirichlet, EdgeKind::Robin],
    };
    let tr = solve_parabolic(&scn, &grid, &SolverConfig::new(5.0)).unwrap();
    // spatially constant forcing: its L² norm on the unit interval is its value
    let spec = SampleSpec::new(1, 65);
    let sup_f = running_sup_field(&scn.f, spec, tr.times()).unwrap();
    let sup_d = running_sup_field(&scn.d2, spec, tr.times()).unwrap();
    let bound = IssBound {
        kind: BoundKind::HeatClm { eps: 1.0 },
        initial_norm: scn.w0.lq_norm(2.0).unwrap(),
        inputs: sup_f
            .into_iter()
            .zip(sup_d)
            .map(|(f, d)| InputSups { f, d, level: 0.0 })
            .collect(),
    };
    let rep = check_trajectory(&tr, 2.0, &bound, default_tolerance(&tr)).unwrap();
    assert!(rep.min_margin > 0.0, "min margin {}", rep.min_margin);
}

/// With `c > 1` the `(r, ε)` estimate's boundary gain `(2/c)·sup|d|` is too
/// small: a constant disturbance `d` sends the front `ξ = c d` into a quiet
/// state, and until its reflection returns `w_t = c d/2`, `w_y = d/2`, so the
/// state norm sits at `(c + 1) d / 2` for `t ∈ (1/c, 2/c)`.
#[test]
fn wave_r_eps_gain_is_too_small_for_fast_waves() {
    let (c, d) = (2.0, 0.4);
    let plateau = (c + 1.0) * d / 2.0;
    let gain = 2f64.sqrt() * (2.0 / c) * d;
    assert!(plateau > gain + 0.03);

    let grid = line(400, Layout::Node);
    let scn = WaveScenario {
        id: "quiet".into(),
        c,
        f: SpaceTimeField::zero(),
        d: TimeSignal::constant(d),
        w0: Field::from_fn(grid, 0.0, |_| 0.0).unwrap(),
        phi0: Field::from_fn(grid, 0.0, |_| 0.0).unwrap(),
    };
    let tr = solve_wave(&scn, &grid, &SolverConfig::new(1.0).with_sigma(0.9)).unwrap();
    let i = tr.times().iter().position(|&t| t >= 0.75).unwrap();
    assert!((tr.state_norm(i, 2.0).unwrap() - plateau).abs() < 0.01);

    let inputs = wave_inputs(&scn, &tr);
    let check = |kind: BoundKind| {
        let bound = IssBound {
            kind,
            initial_norm: 0.0,
            inputs: inputs.clone(),
        };
        check_trajectory(&tr, 2.0, &bound, default_tolerance(&tr)).unwrap()
    };
    assert!(check(BoundKind::WaveREps { r: 1.0, eps: 1.0, c }).violations > 0);
    assert_eq!(check(BoundKind::WaveM { m: 1.0, c }).violations, 0);
}
