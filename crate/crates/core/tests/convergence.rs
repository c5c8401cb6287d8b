//! Grid-refinement studies against closed-form solutions of the linear cases.

use std::f64::consts::PI;

use glfcert_core::fields::{EdgeKind, Grid1D, Layout, State};
use glfcert_core::signals::Profile;
use glfcert_core::solvers::{
    solve_parabolic, solve_transport, solve_wave, ParabolicScenario, SolverConfig, SpeedAssumption, SpeedMap,
    TransportScenario, WaveScenario,
};
use glfcert_core::{Field, Grid, MonotoneFn, SpaceTimeField, TimeSignal};

fn max_error(values: &[f64], exact: impl Fn(usize) -> f64) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| (v - exact(i)).abs())
        .fold(0.0, f64::max)
}

fn ratios(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}

fn heat(grid: Grid, ends: [EdgeKind; 2], w0: impl Fn(&[f64]) -> f64) -> ParabolicScenario {
    ParabolicScenario {
        id: "heat".into(),
        a: SpaceTimeField::constant(1.0),
        c: SpaceTimeField::zero(),
        a0: 1.0,
        c0: 0.0,
        phi: MonotoneFn::identity(-10.0, 10.0).unwrap(),
        h_term: None,
        varphi: MonotoneFn::identity(-10.0, 10.0).unwrap(),
        f: SpaceTimeField::zero(),
        d1: SpaceTimeField::zero(),
        d2: SpaceTimeField::zero(),
        w0: Field::from_fn(grid, 0.0, w0).unwrap(),
        ends,
    }
}

/// Final-time max error of the heat solver against `exact(y)`.
fn heat_error(n: usize, ends: [EdgeKind; 2], mode: f64, t_end: f64, dt: f64) -> f64 {
    let grid = Grid::D1(Grid1D::new(n, Layout::Node).unwrap());
    let scn = heat(grid, ends, |p| (mode * p[0]).sin());
    let tr = solve_parabolic(&scn, &grid, &SolverConfig::new(t_end).with_dt(dt)).unwrap();
    let State::Parabolic { w } = tr.frames().last().unwrap() else {
        unreachable!()
    };
    let decay = (-mode * mode * t_end).exp();
    max_error(w, |i| decay * (mode * i as f64 / n as f64).sin())
}

#[test]
fn diffusion_is_second_order_in_space() {
    // w = e^{-π²t} sin(πy), pinned at both ends; dt ∝ h² isolates the spatial order
    let errors: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let h = 1.0 / n as f64;
            heat_error(n, [EdgeKind::Dirichlet; 2], PI, 0.1, 0.25 * h * h)
        })
        .collect();
    for r in ratios(&errors) {
        assert!(r >= 3.5, "errors {errors:?}");
    }
}

#[test]
fn robin_boundary_is_first_order() {
    // w_y(1) = -w(1): modes sin(μy) with tan μ = -μ
    let mut lo = 1.6;
    let mut hi = 3.1;
    for _ in 0..100 {
        let mid: f64 = 0.5 * (lo + hi);
        if mid.tan() + mid > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let errors: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let h = 1.0 / n as f64;
            heat_error(n, [EdgeKind::Dirichlet, EdgeKind::Robin], mu, 0.1, 0.25 * h * h)
        })
        .collect();
    for r in ratios(&errors) {
        assert!(r >= 1.7, "errors {errors:?}");
    }
}

#[test]
fn upwind_transport_is_first_order() {
    let bump = Profile::Bump {
        center: 0.5,
        radius: 0.3,
        height: 1.0,
    };
    let k = 0.5;
    let t_end = 0.3;
    let errors: Vec<f64> = [100, 200, 400]
        .iter()
        .map(|&n| {
            let grid = Grid::D1(Grid1D::new(n, Layout::Cell).unwrap());
            let scn = TransportScenario {
                id: "advect".into(),
                lambda: SpeedMap::constant(1.0),
                assumption: SpeedAssumption::Bounded { lambda0: 1.0 },
                k,
                d: TimeSignal::zero(),
                rho0: Field::from_fn(grid, 0.0, |p| bump.eval(p)).unwrap(),
            };
            let tr = solve_transport(&scn, &grid, &SolverConfig::new(t_end).with_sigma(0.8)).unwrap();
            let State::Transport { rho } = tr.frames().last().unwrap() else {
                unreachable!()
            };
            let g = grid.as_1d().unwrap();
            max_error(rho, |i| {
                let y = g.coord(i);
                if y >= t_end {
                    bump.eval(&[y - t_end])
                } else {
                    k * bump.eval(&[1.0 + y - t_end])
                }
            })
        })
        .collect();
    for r in ratios(&errors) {
        assert!(r >= 1.7, "errors {errors:?}");
    }
}

#[test]
fn characteristic_wave_is_first_order() {
    let bump = Profile::Bump {
        center: 0.5,
        radius: 0.15,
        height: 1.0,
    };
    let t_end = 0.3;
    let errors: Vec<f64> = [100, 200, 400]
        .iter()
        .map(|&n| {
            let grid = Grid::D1(Grid1D::new(n, Layout::Node).unwrap());
            let scn = WaveScenario {
                id: "wave".into(),
                c: 1.0,
                f: SpaceTimeField::zero(),
                d: TimeSignal::zero(),
                w0: Field::from_fn(grid, 0.0, |_| 0.0).unwrap(),
                phi0: Field::from_fn(grid, 0.0, |p| bump.eval(p)).unwrap(),
            };
            let tr = solve_wave(&scn, &grid, &SolverConfig::new(t_end).with_sigma(0.8)).unwrap();
            let State::Wave { xi, eta } = tr.frames().last().unwrap() else {
                unreachable!()
            };
            // ξ travels left, η travels right, both unchanged in shape
            let y = |i: usize| i as f64 / n as f64;
            let e_xi = max_error(xi, |i| bump.eval(&[y(i) + t_end]));
            let e_eta = max_error(eta, |i| bump.eval(&[y(i) - t_end]));
            e_xi.max(e_eta)
        })
        .collect();
    for r in ratios(&errors) {
        assert!(r >= 1.7, "errors {errors:?}");
    }
}
