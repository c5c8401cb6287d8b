//! Seeded sample sweeps and artifact round-trips.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use glfcert_core::export::{to_file, write_glf_series, write_trajectory};
use glfcert_core::glf::dissipation_report;
use glfcert_core::solvers::{solve_transport, SolverConfig, SpeedAssumption, SpeedMap};
use glfcert_core::trunc::{young_epsilon_gap, PropertyArgs};
use glfcert_core::{Field, GlfSpec, Grid, Grid1D, Layout, Profile, TimeSignal, TransportScenario, TruncationPair};

#[test]
fn truncation_properties_on_seeded_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [1.5, 2.0, 3.0, 5.0] {
        let pair = TruncationPair::new(p).unwrap();
        for _ in 0..2000 {
            let s = rng.gen_range(-5.0..5.0);
            let tau = rng.gen_range(-5.0..5.0);
            let level = rng.gen_range(0.0..5.0);
            let eps = rng.gen_range(0.01..10.0);
            let cases = [
                PropertyArgs::ShiftSplit { s, tau },
                PropertyArgs::AbsoluteShift { s, tau },
                PropertyArgs::Doubling { s, tau },
                PropertyArgs::BandSandwich { s, tau, level },
                PropertyArgs::Young { s, tau, eps },
            ];
            for args in cases {
                let terms = pair.property_terms(args).unwrap();
                assert!(terms.holds(1e-9), "p={p} {}: {terms:?}", args.name());
            }
        }
    }
}

#[test]
fn young_gap_on_seeded_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5000 {
        let r = rng.gen_range(1.01..6.0);
        let q = r / (r - 1.0);
        let gap = young_epsilon_gap(
            r,
            q,
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.01..10.0),
        )
        .unwrap();
        assert!(gap >= -1e-9, "gap {gap}");
    }
}

#[test]
fn transport_artifacts_round_trip_through_files() {
    let grid = Grid::D1(Grid1D::new(32, Layout::Cell).unwrap());
    let bump = Profile::Bump {
        center: 0.5,
        radius: 0.3,
        height: 1.0,
    };
    let scn = TransportScenario {
        id: "roundtrip".into(),
        lambda: SpeedMap::constant(1.0),
        assumption: SpeedAssumption::Bounded { lambda0: 1.0 },
        k: 0.5,
        d: TimeSignal::zero(),
        rho0: Field::from_fn(grid, 0.0, |p| bump.eval(p)).unwrap(),
    };
    let tr = solve_transport(&scn, &grid, &SolverConfig::new(0.5).with_stride(4)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let traj_path = dir.path().join("nested/trajectory.csv");
    to_file(&traj_path, |f| write_trajectory(&tr, f)).unwrap();
    let mut rdr = csv::Reader::from_path(&traj_path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "y", "value"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), tr.len() * 32);
    let last: f64 = rows.last().unwrap()[2].parse().unwrap();
    let glfcert_core::State::Transport { rho } = tr.frames().last().unwrap() else {
        unreachable!()
    };
    assert_eq!(last, rho[31]);

    let spec = GlfSpec::transport(2.0, 2.0, 0.0, 0.5).unwrap();
    let series = dissipation_report(&tr, &spec, 2.0, &vec![0.0; tr.len()]).unwrap();
    let glf_path = dir.path().join("glf.csv");
    to_file(&glf_path, |f| write_glf_series(&series, f)).unwrap();
    let text = std::fs::read_to_string(&glf_path).unwrap();
    assert_eq!(text.lines().count(), tr.len() + 1);
    assert!(text.lines().last().unwrap().contains(",,"));
}
