//! Generalized Lyapunov functionals built from the truncation pair.
//!
//! Each functional is a sum of energies `∫ weight(y)·G(±v(y) − M) dy`, where
//! `M` is a truncation level derived from the disturbance sizes. The energies
//! vanish while `|v| <= M`, so the functional measures only the part of the
//! state that the disturbances cannot explain.
//!
//! | class     | terms                                                     |
//! |-----------|-----------------------------------------------------------|
//! | parabolic | `V(w − M) + V(−w − M)`, unweighted                        |
//! | transport | same with weight `e^{−ry}`                                |
//! | wave      | `V₁(±ξ − M)` with `e^{ry}` plus `V₂(±η − M)` with `e^{−ry}` |
//!
//! [`dissipation_report`] checks the discrete decay inequality
//! `D⁺V̂ + rate·V̂ <= slack` along a trajectory with forward differences.

use crate::comparison::invert_monotone;
use crate::error::{domain, Error, Result};
use crate::fields::{Field, Grid, PdeClass, State, Trajectory};
use crate::signals::{running_sup_field, sup_field, SampleSpec, SpaceTimeField, DEFAULT_RESOLUTION};
use crate::solvers::{ParabolicScenario, SpeedAssumption, TransportScenario, WaveScenario};
use crate::trunc::{gronwall_envelope_on, TruncationPair};

/// Tolerance for the inverses in the parabolic truncation level.
const INVERSE_TOL: f64 = 1e-12;

/// Parameters of one functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlfSpec {
    pub class: PdeClass,
    /// Truncation exponent `p > 1`.
    pub p: f64,
    /// Spatial weight rate (transport and wave).
    pub r: f64,
    /// Truncation level `M >= 0`.
    pub level: f64,
    /// Young split parameter (wave).
    pub eps: f64,
}

fn check_common(p: f64, level: f64) -> Result<()> {
    TruncationPair::new(p)?;
    if !(level >= 0.0 && level.is_finite()) {
        return domain(format!("truncation level must be finite and nonnegative, got {level}"));
    }
    Ok(())
}

impl GlfSpec {
    pub fn parabolic(p: f64, level: f64) -> Result<Self> {
        check_common(p, level)?;
        Ok(Self {
            class: PdeClass::Parabolic,
            p,
            r: 0.0,
            level,
            eps: 0.0,
        })
    }

    /// Requires `0 < r <= (p+1)·ln(1/|k|)`, which makes the boundary
    /// contribution of the reflected inflow nonpositive.
    pub fn transport(p: f64, r: f64, level: f64, k: f64) -> Result<Self> {
        check_common(p, level)?;
        if !(k.abs() < 1.0) {
            return domain(format!("|k| must be < 1, got {k}"));
        }
        let r_max = max_transport_r(p, k);
        if !(r > 0.0 && r <= r_max * (1.0 + 1e-12)) {
            return domain(format!("weight rate r = {r} must lie in (0, {r_max}]"));
        }
        Ok(Self {
            class: PdeClass::Transport,
            p,
            r,
            level,
            eps: 0.0,
        })
    }

    /// Requires `c·r − ε > 0`.
    pub fn wave(p: f64, r: f64, eps: f64, level: f64, c: f64) -> Result<Self> {
        check_common(p, level)?;
        if !(eps > 0.0) {
            return domain(format!("Young split must be positive, got {eps}"));
        }
        if !(c * r - eps > 0.0) {
            return domain(format!("need c·r − ε > 0, got {}", c * r - eps));
        }
        Ok(Self {
            class: PdeClass::Wave,
            p,
            r,
            level,
            eps,
        })
    }

    pub fn pair(&self) -> TruncationPair {
        TruncationPair::new(self.p).expect("exponent validated at construction")
    }
}

/// Largest admissible transport weight rate, `(p+1)·ln(1/|k|)`.
pub fn max_transport_r(p: f64, k: f64) -> f64 {
    (p + 1.0) * (1.0 / k.abs()).ln()
}

/// Default weight rate for the `L^q` transport estimate: the midpoint of
/// `[(p+1)/2·ln(1/|k|), (p+1)·ln(1/|k|)]`.
pub fn midpoint_transport_r(p: f64, k: f64) -> f64 {
    0.75 * max_transport_r(p, k)
}

/// Default wave split `ε = c·r/2`.
pub fn default_wave_eps(c: f64, r: f64) -> f64 {
    0.5 * c * r
}

/// Decay rate of the parabolic functional, `c₀ (p+1)`.
pub fn parabolic_decay(c0: f64, p: f64) -> f64 {
    c0 * (p + 1.0)
}

/// Decay rate of the transport functional, `r λ₀`.
pub fn transport_decay(r: f64, lambda0: f64) -> f64 {
    r * lambda0
}

/// Decay rate of the wave functional, `c r − ε`.
pub fn wave_decay(c: f64, r: f64, eps: f64) -> f64 {
    c * r - eps
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    None,
    /// `e^{r y}`.
    Increasing,
    /// `e^{−r y}`.
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `G(v − M)`.
    Positive,
    /// `G(−v − M)`.
    Negative,
}

fn energy_raw(
    values: &[f64],
    grid: &Grid,
    pair: TruncationPair,
    r: f64,
    weight: Weight,
    orientation: Orientation,
    level: f64,
) -> Result<f64> {
    let q = grid.weights();
    let sign = match orientation {
        Orientation::Positive => 1.0,
        Orientation::Negative => -1.0,
    };
    let rate = match weight {
        Weight::None => 0.0,
        Weight::Increasing => r,
        Weight::Decreasing => -r,
    };
    let coords: Option<Vec<f64>> = match (grid, weight) {
        (_, Weight::None) => None,
        (Grid::D1(g), _) => Some((0..g.len()).map(|i| g.coord(i)).collect()),
        (Grid::D2(_), _) => return domain("spatial weights are defined on the unit interval only"),
    };
    let mut total = 0.0;
    for (i, (&v, &wq)) in values.iter().zip(&q).enumerate() {
        let g = pair.primitive_unchecked(sign * v - level);
        if g == 0.0 {
            continue;
        }
        let w = coords.as_ref().map_or(1.0, |y| (rate * y[i]).exp());
        total += wq * w * g;
    }
    Ok(total)
}

/// `∫ weight(y)·G(±fld(y) − M) dy` by the grid quadrature.
pub fn weighted_g_energy(
    fld: &Field,
    p: f64,
    r: f64,
    weight: Weight,
    orientation: Orientation,
    level: f64,
) -> Result<f64> {
    let pair = TruncationPair::new(p)?;
    if !(r >= 0.0) {
        return domain(format!("weight rate must be nonnegative, got {r}"));
    }
    energy_raw(fld.values(), fld.grid(), pair, r, weight, orientation, level)
}

/// Terms of the functional at one state, in the order listed in the module docs.
pub fn glf_components(state: &State, grid: &Grid, spec: &GlfSpec) -> Result<Vec<f64>> {
    if state.class() != spec.class {
        return domain(format!(
            "{} functional evaluated on a {} state",
            spec.class,
            state.class()
        ));
    }
    let pair = spec.pair();
    let e = |v: &[f64], w: Weight, o: Orientation| energy_raw(v, grid, pair, spec.r, w, o, spec.level);
    use Orientation::{Negative, Positive};
    match state {
        State::Parabolic { w } => Ok(vec![e(w, Weight::None, Positive)?, e(w, Weight::None, Negative)?]),
        State::Transport { rho } => Ok(vec![
            e(rho, Weight::Decreasing, Positive)?,
            e(rho, Weight::Decreasing, Negative)?,
        ]),
        State::Wave { xi, eta } => Ok(vec![
            e(xi, Weight::Increasing, Positive)?,
            e(xi, Weight::Increasing, Negative)?,
            e(eta, Weight::Decreasing, Positive)?,
            e(eta, Weight::Decreasing, Negative)?,
        ]),
    }
}

/// `V̂` at one state.
pub fn glf_eval(state: &State, grid: &Grid, spec: &GlfSpec) -> Result<f64> {
    Ok(glf_components(state, grid, spec)?.iter().sum())
}

/// `V̂` along a trajectory together with the discrete dissipation residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct GlfSeries {
    pub spec: GlfSpec,
    pub times: Vec<f64>,
    pub vhat: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    /// `(V̂_{i+1} − V̂_i)/Δt + rate·V̂_i − slack_i`, one per interval.
    pub residuals: Vec<f64>,
    pub decay_rate: f64,
    /// Comparison solution of `η' = −rate·η + slack`, `η(0) = V̂(0)`.
    pub envelope: Vec<f64>,
}

impl GlfSeries {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluate `V̂` along `traj` and the forward-difference dissipation residuals
/// against `decay_rate` and the per-stamp `slack`.
pub fn dissipation_report(traj: &Trajectory, spec: &GlfSpec, decay_rate: f64, slack: &[f64]) -> Result<GlfSeries> {
    if traj.len() < 2 {
        return domain("dissipation report needs at least two stamps");
    }
    if slack.len() != traj.len() {
        return domain(format!("slack has {} entries for {} stamps", slack.len(), traj.len()));
    }
    if traj.class() != spec.class {
        return domain(format!("{} functional on a {} trajectory", spec.class, traj.class()));
    }
    let components = traj
        .frames()
        .iter()
        .map(|s| glf_components(s, traj.grid(), spec))
        .collect::<Result<Vec<_>>>()?;
    let vhat: Vec<f64> = components.iter().map(|c| c.iter().sum()).collect();
    let times = traj.times().to_vec();
    let residuals = (0..times.len() - 1)
        .map(|i| (vhat[i + 1] - vhat[i]) / (times[i + 1] - times[i]) + decay_rate * vhat[i] - slack[i])
        .collect();
    let phi = vec![-decay_rate; times.len()];
    let envelope = gronwall_envelope_on(&times, &phi, slack, vhat[0])?;
    Ok(GlfSeries {
        spec: *spec,
        times,
        vhat,
        components,
        residuals,
        decay_rate,
        envelope,
    })
}

/// Slack of the wave dissipation inequality, `4 (p/ε)^p V₁(|f|)(t)`, at each stamp.
pub fn wave_slack(traj: &Trajectory, f: &SpaceTimeField, spec: &GlfSpec) -> Result<Vec<f64>> {
    if spec.class != PdeClass::Wave {
        return Err(Error::Misuse("wave slack requested for a non-wave functional".into()));
    }
    let grid = traj.grid();
    let pair = spec.pair();
    let points = grid.points();
    let factor = 4.0 * (spec.p / spec.eps).powf(spec.p);
    traj.times()
        .iter()
        .map(|&t| {
            let abs_f: Vec<f64> = points.iter().map(|p| f.eval(p, t).abs()).collect();
            Ok(factor
                * energy_raw(
                    &abs_f,
                    grid,
                    pair,
                    spec.r,
                    Weight::Increasing,
                    Orientation::Positive,
                    0.0,
                )?)
        })
        .collect()
}

/// Disturbance sups entering the parabolic truncation level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicSups {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
}

/// `M = φ⁻¹(sup|f| / c₀) + sup|d₁| + ϕ⁻¹(sup|d₂|)`.
pub fn parabolic_level(scn: &ParabolicScenario, sups: ParabolicSups) -> Result<f64> {
    if !(scn.c0 > 0.0) {
        return domain("the parabolic truncation level needs c0 > 0");
    }
    let inv = |m: &crate::comparison::MonotoneFn, y: f64| -> Result<f64> {
        if y == 0.0 {
            return Ok(0.0);
        }
        let (_, hi) = m.domain();
        invert_monotone(m, y, 0.0, hi, INVERSE_TOL).map_err(|e| match e {
            Error::Bracket { .. } => Error::Domain(format!("cannot invert '{}' at {y}: {e}", m.label())),
            other => other,
        })
    };
    Ok(inv(&scn.phi, sups.f / scn.c0)? + sups.d1 + inv(&scn.varphi, sups.d2)?)
}

/// Disturbance sups of a parabolic scenario over `[0, t]`.
pub fn parabolic_sups(scn: &ParabolicScenario, t: f64) -> Result<ParabolicSups> {
    let spec = SampleSpec::new(scn.w0.grid().dim(), 65);
    Ok(ParabolicSups {
        f: sup_field(&scn.f, spec, 0.0, t)?,
        d1: sup_field(&scn.d1, spec, 0.0, t)?,
        d2: sup_field(&scn.d2, spec, 0.0, t)?,
    })
}

/// Running disturbance sups of a parabolic scenario at each stamp.
pub fn parabolic_running_sups(scn: &ParabolicScenario, times: &[f64]) -> Result<Vec<ParabolicSups>> {
    let spec = SampleSpec::new(scn.w0.grid().dim(), 65);
    let f = running_sup_field(&scn.f, spec, times)?;
    let d1 = running_sup_field(&scn.d1, spec, times)?;
    let d2 = running_sup_field(&scn.d2, spec, times)?;
    Ok((0..times.len())
        .map(|i| ParabolicSups {
            f: f[i],
            d1: d1[i],
            d2: d2[i],
        })
        .collect())
}

pub fn compute_m_parabolic(scn: &ParabolicScenario, t: f64) -> Result<f64> {
    parabolic_level(scn, parabolic_sups(scn, t)?)
}

/// `M = sup|d| / (1 − |k|)` over `[0, t]`.
pub fn compute_m_transport(scn: &TransportScenario, t: f64) -> Result<f64> {
    if !(scn.k.abs() < 1.0) {
        return domain(format!("|k| must be < 1, got {}", scn.k));
    }
    Ok(scn.d.sup_window(0.0, t, DEFAULT_RESOLUTION)? / (1.0 - scn.k.abs()))
}

/// `M = sup|d| / c` over `[0, t]`.
pub fn compute_m_wave(scn: &WaveScenario, t: f64) -> Result<f64> {
    if !(scn.c > 0.0) {
        return domain(format!("wave speed must be positive, got {}", scn.c));
    }
    Ok(scn.d.sup_window(0.0, t, DEFAULT_RESOLUTION)? / scn.c)
}

/// Local decay rate for a decreasing speed map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalRate {
    /// `Λ₀ = λ(radius)`.
    pub lambda0: f64,
    /// `2 R₀ max{1/|k|, 1/(1−|k|)}`, the largest mass the local estimate covers.
    pub radius: f64,
}

/// `Λ₀ = λ(2 R₀ max{1/|k|, 1/(1−|k|)})` for a scenario with a decreasing speed map.
pub fn lambda0_local(scn: &TransportScenario, r0: f64) -> Result<LocalRate> {
    if let SpeedAssumption::Bounded { .. } = scn.assumption {
        return Err(Error::Misuse(
            "the local rate applies to decreasing speed maps; use the uniform bound".into(),
        ));
    }
    if !(r0 > 0.0) {
        return domain(format!("R0 must be positive, got {r0}"));
    }
    let k = scn.k.abs();
    if !(k > 0.0 && k < 1.0) {
        return domain(format!("the local rate needs 0 < |k| < 1, got {}", scn.k));
    }
    let radius = 2.0 * r0 * (1.0 / k).max(1.0 / (1.0 - k));
    Ok(LocalRate {
        lambda0: scn.lambda.eval(radius),
        radius,
    })
}
