//! CSV artifacts for trajectories, functional series and bound checks.
//!
//! Numbers use Rust's shortest round-trip formatting, which is locale
//! independent. Every file starts with a header row.

use std::io::Write;
use std::path::Path;

use crate::certify::CheckReport;
use crate::error::Result;
use crate::fields::{Grid, State, Trajectory};
use crate::glf::GlfSeries;

fn num(v: f64) -> String {
    format!("{v}")
}

/// Trajectory rows: `t,y,value` (1D), `t,x,y,value` (2D) or `t,y,xi,eta` (wave).
pub fn write_trajectory<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let points = traj.grid().points();
    let two_d = matches!(traj.grid(), Grid::D2(_));
    let header: &[&str] = match (traj.frames().first(), two_d) {
        (Some(State::Wave { .. }), _) => &["t", "y", "xi", "eta"],
        (_, true) => &["t", "x", "y", "value"],
        (_, false) => &["t", "y", "value"],
    };
    wtr.write_record(header)?;
    for (t, state) in traj.times().iter().zip(traj.frames()) {
        let t = num(*t);
        match state {
            State::Parabolic { w: values } | State::Transport { rho: values } => {
                for (p, v) in points.iter().zip(values) {
                    let mut rec = vec![t.clone()];
                    rec.extend(p.iter().map(|&c| num(c)));
                    rec.push(num(*v));
                    wtr.write_record(&rec)?;
                }
            }
            State::Wave { xi, eta } => {
                for ((p, a), b) in points.iter().zip(xi).zip(eta) {
                    wtr.write_record([t.clone(), num(p[0]), num(*a), num(*b)])?;
                }
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Sidecar metadata for a trajectory file, as TOML.
pub fn trajectory_metadata(traj: &Trajectory) -> String {
    let dts = &traj.meta.dt_history;
    let dt_min = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let dt_max = dts.iter().cloned().fold(0.0, f64::max);
    let mut s = String::new();
    s.push_str(&format!("scenario = {:?}\n", traj.scenario_id()));
    s.push_str(&format!("class = {:?}\n", traj.class().as_str()));
    s.push_str(&format!("scheme = {:?}\n", traj.meta.scheme));
    match traj.grid() {
        Grid::D1(g) => {
            s.push_str(&format!("n = {}\n", g.cells()));
            s.push_str(&format!("layout = {:?}\n", format!("{:?}", g.layout()).to_lowercase()));
        }
        Grid::D2(g) => {
            s.push_str(&format!("nx = {}\nny = {}\n", g.nx(), g.ny()));
            s.push_str("layout = \"node\"\n");
        }
    }
    s.push_str(&format!("steps = {}\n", dts.len()));
    s.push_str(&format!("stored = {}\n", traj.len()));
    if !dts.is_empty() {
        s.push_str(&format!("dt_min = {}\ndt_max = {}\n", num(dt_min), num(dt_max)));
    }
    if let Some(max_nu) = traj.meta.courant_history.iter().cloned().reduce(f64::max) {
        s.push_str(&format!("courant_max = {}\n", num(max_nu)));
    }
    if let Some(c) = traj.meta.wave_speed {
        s.push_str(&format!("wave_speed = {}\n", num(c)));
    }
    s
}

/// Rows `t,Vhat,residual,envelope`; the last stamp has no residual.
pub fn write_glf_series<W: Write>(series: &GlfSeries, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["t", "Vhat", "residual", "envelope"])?;
    for i in 0..series.times.len() {
        let residual = series.residuals.get(i).map_or(String::new(), |r| num(*r));
        wtr.write_record([
            num(series.times[i]),
            num(series.vhat[i]),
            residual,
            num(series.envelope[i]),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Rows `t,lhs,rhs,margin` followed by a `# summary` comment line.
pub fn write_check_report<W: Write>(report: &CheckReport, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["t", "lhs", "rhs", "margin"])?;
    for i in 0..report.times.len() {
        wtr.write_record([
            num(report.times[i]),
            num(report.lhs[i]),
            num(report.rhs[i]),
            num(report.margins[i]),
        ])?;
    }
    wtr.flush()?;
    let mut out = wtr.into_inner().map_err(|e| crate::Error::Io(e.to_string()))?;
    writeln!(
        out,
        "# summary min_margin={} violations={} tol={} q={} bound={}",
        num(report.min_margin),
        report.violations,
        num(report.tol),
        num(report.q),
        report.kind
    )?;
    Ok(())
}

/// Write `f`'s output to `path`, creating parent directories.
pub fn to_file(path: &Path, f: impl FnOnce(std::fs::File) -> Result<()>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    f(std::fs::File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{check_trajectory, BoundKind, InputSups, IssBound};
    use crate::fields::{Grid1D, Layout, PdeClass, SolverMeta};

    fn tiny() -> Trajectory {
        let g = Grid::D1(Grid1D::new(8, Layout::Node).unwrap());
        let mut tr = Trajectory::new("tiny", PdeClass::Parabolic, g, SolverMeta::default());
        tr.push(0.0, State::Parabolic { w: vec![0.5; 9] }).unwrap();
        tr.push(0.5, State::Parabolic { w: vec![0.25; 9] }).unwrap();
        tr.meta.dt_history = vec![0.5];
        tr
    }

    #[test]
    fn trajectory_csv_layout() {
        let mut buf = Vec::new();
        write_trajectory(&tiny(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,y,value");
        assert_eq!(lines[1], "0,0,0.5");
        assert_eq!(lines.len(), 1 + 2 * 9);
        assert!(trajectory_metadata(&tiny()).contains("n = 8"));
    }

    #[test]
    fn check_csv_has_summary() {
        let tr = tiny();
        let bound = IssBound {
            kind: BoundKind::ParabolicQ { c0: 1.0 },
            initial_norm: 0.5,
            inputs: vec![InputSups::default(); 2],
        };
        let rep = check_trajectory(&tr, 2.0, &bound, 0.0).unwrap();
        let mut buf = Vec::new();
        write_check_report(&rep, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,lhs,rhs,margin\n"));
        let summary = text.lines().last().unwrap();
        assert!(summary.starts_with("# summary min_margin="));
        assert!(summary.contains("violations=0"));
    }
}
