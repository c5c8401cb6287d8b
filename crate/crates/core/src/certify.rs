//! Closed-form ISS estimates and trajectory audits.
//!
//! Each `bound_*` function evaluates one estimate of the form
//! `decay(t)·‖initial‖ + gains·sup‖disturbance‖` with its explicit constants.
//! [`check_trajectory`] compares the matching state norm against such a bound
//! at every stored stamp, using disturbance sups taken over `[0, t_i]`
//! (running maxima), so each comparison is causal.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::fields::{PdeClass, Trajectory};
use crate::glf::lambda0_local;
use crate::solvers::TransportScenario;

/// `|k|` below which the `L^q` transport estimate is flagged as ill-conditioned.
pub const SMALL_K_WARNING: f64 = 0.05;

fn check_q(q: f64) -> Result<()> {
    if q >= 2.0 {
        Ok(())
    } else {
        domain(format!("estimates hold for q in [2, inf], got {q}"))
    }
}

/// `4 ‖w₀‖ e^{−c₀ t} + 8 M`, uniform in `q`.
pub fn bound_parabolic_q(q: f64, t: f64, w0_norm: f64, level: f64, c0: f64) -> Result<f64> {
    check_q(q)?;
    if !(c0 > 0.0) {
        return domain(format!("c0 must be positive, got {c0}"));
    }
    Ok(4.0 * w0_norm * (-c0 * t).exp() + 8.0 * level)
}

/// `2 e^{r/(p+1)} ‖ρ₀‖ e^{−r λ₀ t/(p+1)} + 2 sup|d|`.
pub fn bound_transport_p(p: f64, r: f64, t: f64, rho0_norm: f64, lambda0: f64, sup_d: f64) -> Result<f64> {
    if !(p > 1.0 && r > 0.0 && lambda0 > 0.0) {
        return domain("transport estimate needs p > 1, r > 0 and lambda0 > 0");
    }
    Ok(2.0 * (r / (p + 1.0)).exp() * rho0_norm * (-r * lambda0 * t / (p + 1.0)).exp() + 2.0 * sup_d)
}

/// `(2/|k|) ‖ρ₀‖ |k|^{λ₀ t/2} + (2/(1−|k|)) sup|d|`.
pub fn bound_transport_q(q: f64, k: f64, t: f64, rho0_norm: f64, lambda0: f64, sup_d: f64) -> Result<f64> {
    check_q(q)?;
    let ka = k.abs();
    if ka == 0.0 {
        return domain("the L^q transport estimate degenerates at k = 0");
    }
    if !(ka < 1.0) {
        return domain(format!("|k| must be < 1, got {k}"));
    }
    if !(lambda0 > 0.0) {
        return domain(format!("lambda0 must be positive, got {lambda0}"));
    }
    Ok((2.0 / ka) * rho0_norm * ka.powf(lambda0 * t / 2.0) + (2.0 / (1.0 - ka)) * sup_d)
}

/// Warning text when `|k|` is small enough to make the `L^q` transport
/// prefactor `2/|k|` ill-conditioned.
pub fn small_k_warning(k: f64) -> Option<String> {
    (k != 0.0 && k.abs() < SMALL_K_WARNING)
        .then(|| format!("|k| = {} < {SMALL_K_WARNING}: prefactor 2/|k| is large", k.abs()))
}

/// Which global transport estimate a local one is modelled on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LissVariant {
    P { p: f64, r: f64 },
    Q { q: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LissBound {
    /// `‖ρ₀‖ + sup|d| <= R₀`.
    pub gate: bool,
    /// `None` when the gate is closed.
    pub bound: Option<f64>,
    pub lambda0: f64,
    pub radius: f64,
}

/// Local transport estimate for a decreasing speed map: the global form with
/// `λ₀` replaced by `Λ₀`, applicable only when `‖ρ₀‖ + sup|d| <= R₀`.
///
/// `gate_sup_d` is the disturbance sup over the whole horizon; `sup_d` enters
/// the gain term and may be a running sup.
pub fn bound_transport_liss(
    variant: LissVariant,
    scn: &TransportScenario,
    r0: f64,
    t: f64,
    rho0_norm: f64,
    gate_sup_d: f64,
    sup_d: f64,
) -> Result<LissBound> {
    let rate = lambda0_local(scn, r0)?;
    let gate = rho0_norm + gate_sup_d <= r0;
    let bound = if gate {
        Some(match variant {
            LissVariant::P { p, r } => bound_transport_p(p, r, t, rho0_norm, rate.lambda0, sup_d)?,
            LissVariant::Q { q } => bound_transport_q(q, scn.k, t, rho0_norm, rate.lambda0, sup_d)?,
        })
    } else {
        None
    };
    Ok(LissBound {
        gate,
        bound,
        lambda0: rate.lambda0,
        radius: rate.radius,
    })
}

/// Wave estimate with weight rate `r` and Young split `ε`, for `q ∈ [2, ∞)`:
///
/// `2^{(q−1)/q} [ 2^{(q+1)/q} e^{(2r − (cr−ε)t)/q} init
///   + ((q−1)/ε)^{(q−1)/q} (8 e^{2r}/(cr−ε))^{1/q} sup|f| + (2/c) sup|d| ]`
/// with `init = ‖φ₀‖_q + ‖w₀'‖_q`.
#[allow(clippy::too_many_arguments)]
pub fn bound_wave_r_eps(q: f64, r: f64, eps: f64, t: f64, init: f64, sup_f: f64, sup_d: f64, c: f64) -> Result<f64> {
    check_q(q)?;
    if !q.is_finite() {
        return domain("the (r, eps) wave estimate is stated for finite q");
    }
    if !(c > 0.0 && eps > 0.0) {
        return domain("wave estimate needs c > 0 and eps > 0");
    }
    let rate = c * r - eps;
    if !(rate > 0.0) {
        return domain(format!("need c·r − ε > 0, got {rate}"));
    }
    let lead = 2f64.powf((q - 1.0) / q);
    let decay = 2f64.powf((q + 1.0) / q) * ((2.0 * r - rate * t) / q).exp() * init;
    let forcing = ((q - 1.0) / eps).powf((q - 1.0) / q) * (8.0 * (2.0 * r).exp() / rate).powf(1.0 / q) * sup_f;
    Ok(lead * (decay + forcing + (2.0 / c) * sup_d))
}

/// Wave estimate valid for every `q ∈ [2, ∞]`:
/// `8 e^{4m/c} e^{−mt/2} init + (16/m) e^{4m/c} sup|f| + (4/c) sup|d|`.
pub fn bound_wave_m(q: f64, m: f64, t: f64, init: f64, sup_f: f64, sup_d: f64, c: f64) -> Result<f64> {
    check_q(q)?;
    if !(m > 0.0) {
        return domain(format!("m must be positive, got {m}"));
    }
    if !(c > 0.0) {
        return domain(format!("wave speed must be positive, got {c}"));
    }
    let growth = (4.0 * m / c).exp();
    Ok(8.0 * growth * (-m * t / 2.0).exp() * init + (16.0 / m) * growth * sup_f + (4.0 / c) * sup_d)
}

/// Classical quadratic-Lyapunov estimate for the heat equation on the unit
/// interval with a pinned end and a flux-disturbed end:
/// `e^{−(π²/2−ε)t/2} ‖w₀‖ + (sup‖f‖ + sup|d|)/√(ε(π²/2−ε))`.
pub fn heat_clm_bound(t: f64, w0_norm: f64, eps: f64, sup_f: f64, sup_d: f64) -> Result<f64> {
    let rate = std::f64::consts::PI.powi(2) / 2.0 - eps;
    if !(eps > 0.0 && eps <= 2.0) {
        return domain(format!("eps must lie in (0, 2], got {eps}"));
    }
    if !(rate > 0.0) {
        return domain("decay rate is not positive");
    }
    Ok((-rate * t / 2.0).exp() * w0_norm + (sup_f + sup_d) / (eps * rate).sqrt())
}

/// Estimate family and its constant parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundKind {
    ParabolicQ {
        c0: f64,
    },
    TransportP {
        p: f64,
        r: f64,
        lambda0: f64,
    },
    TransportQ {
        k: f64,
        lambda0: f64,
    },
    /// Local estimate; `lambda0` is the local rate `Λ₀`. Evaluated only when
    /// the gate was open.
    TransportLiss {
        variant: LissVariant,
        k: f64,
        lambda0: f64,
    },
    WaveREps {
        r: f64,
        eps: f64,
        c: f64,
    },
    WaveM {
        m: f64,
        c: f64,
    },
    HeatClm {
        eps: f64,
    },
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::ParabolicQ { .. } => "parabolic_q",
            BoundKind::TransportP { .. } => "transport_p",
            BoundKind::TransportQ { .. } => "transport_q",
            BoundKind::TransportLiss { .. } => "transport_liss",
            BoundKind::WaveREps { .. } => "wave_r_eps",
            BoundKind::WaveM { .. } => "wave_m",
            BoundKind::HeatClm { .. } => "heat_clm",
        }
    }

    pub fn class(&self) -> PdeClass {
        match self {
            BoundKind::ParabolicQ { .. } | BoundKind::HeatClm { .. } => PdeClass::Parabolic,
            BoundKind::TransportP { .. } | BoundKind::TransportQ { .. } | BoundKind::TransportLiss { .. } => {
                PdeClass::Transport
            }
            BoundKind::WaveREps { .. } | BoundKind::WaveM { .. } => PdeClass::Wave,
        }
    }

    /// Named parameters, for report headers.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            BoundKind::ParabolicQ { c0 } => vec![("c0", c0)],
            BoundKind::TransportP { p, r, lambda0 } => vec![("p", p), ("r", r), ("lambda0", lambda0)],
            BoundKind::TransportQ { k, lambda0 } => vec![("k", k), ("lambda0", lambda0)],
            BoundKind::TransportLiss { variant, k, lambda0 } => {
                let mut v = vec![("k", k), ("Lambda0", lambda0)];
                if let LissVariant::P { p, r } = variant {
                    v.push(("p", p));
                    v.push(("r", r));
                }
                v
            }
            BoundKind::WaveREps { r, eps, c } => vec![("r", r), ("eps", eps), ("c", c)],
            BoundKind::WaveM { m, c } => vec![("m", m), ("c", c)],
            BoundKind::HeatClm { eps } => vec![("eps", eps)],
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        for (k, v) in self.params() {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Disturbance sizes entering a bound at one stamp.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InputSups {
    /// In-domain forcing (sup norm, or the sup of its spatial `L²` norm for
    /// the quadratic heat estimate).
    pub f: f64,
    /// Boundary disturbance.
    pub d: f64,
    /// Truncation level `M` (parabolic).
    pub level: f64,
}

/// A bound instantiated for one trajectory: constants, initial-data norm and
/// the disturbance sups at each stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct IssBound {
    pub kind: BoundKind,
    pub initial_norm: f64,
    pub inputs: Vec<InputSups>,
}

impl IssBound {
    pub fn eval(&self, q: f64, t: f64, inp: InputSups) -> Result<f64> {
        let x0 = self.initial_norm;
        match self.kind {
            BoundKind::ParabolicQ { c0 } => bound_parabolic_q(q, t, x0, inp.level, c0),
            BoundKind::TransportP { p, r, lambda0 } => bound_transport_p(p, r, t, x0, lambda0, inp.d),
            BoundKind::TransportQ { k, lambda0 } => bound_transport_q(q, k, t, x0, lambda0, inp.d),
            BoundKind::TransportLiss { variant, k, lambda0 } => match variant {
                LissVariant::P { p, r } => bound_transport_p(p, r, t, x0, lambda0, inp.d),
                LissVariant::Q { q: vq } => bound_transport_q(vq, k, t, x0, lambda0, inp.d),
            },
            BoundKind::WaveREps { r, eps, c } => bound_wave_r_eps(q, r, eps, t, x0, inp.f, inp.d, c),
            BoundKind::WaveM { m, c } => bound_wave_m(q, m, t, x0, inp.f, inp.d, c),
            BoundKind::HeatClm { eps } => heat_clm_bound(t, x0, eps, inp.f, inp.d),
        }
    }
}

/// Margins of a trajectory against a bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub kind: BoundKind,
    pub q: f64,
    pub tol: f64,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `rhs − lhs` at each stamp.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    /// Stamps with `margin < −tol`.
    pub violations: usize,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Scheme-aware tolerance: `10 h` for the first-order hyperbolic schemes,
/// `h² + Δt` (largest step) for the parabolic scheme.
pub fn default_tolerance(traj: &Trajectory) -> f64 {
    let h = traj.grid().h();
    match traj.class() {
        PdeClass::Parabolic => {
            let dt = traj.meta.dt_history.iter().cloned().fold(0.0, f64::max);
            h * h + dt
        }
        PdeClass::Transport | PdeClass::Wave => 10.0 * h,
    }
}

/// Compare the state norm (`‖w_t‖_q + ‖w_y‖_q` for the wave) with the bound
/// at every stamp.
pub fn check_trajectory(traj: &Trajectory, q: f64, bound: &IssBound, tol: f64) -> Result<CheckReport> {
    if bound.kind.class() != traj.class() {
        return domain(format!(
            "{} bound checked against a {} trajectory",
            bound.kind.name(),
            traj.class()
        ));
    }
    if bound.inputs.len() != traj.len() {
        return Err(Error::Mismatch(format!(
            "bound has inputs for {} stamps, trajectory has {}",
            bound.inputs.len(),
            traj.len()
        )));
    }
    if !(tol >= 0.0) {
        return domain("tolerance must be nonnegative");
    }
    let times = traj.times().to_vec();
    let mut lhs = Vec::with_capacity(times.len());
    let mut rhs = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        lhs.push(traj.state_norm(i, q)?);
        rhs.push(bound.eval(q, t, bound.inputs[i])?);
    }
    let margins: Vec<f64> = rhs.iter().zip(&lhs).map(|(r, l)| r - l).collect();
    let min_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    let violations = margins.iter().filter(|&&m| m < -tol).count();
    Ok(CheckReport {
        kind: bound.kind,
        q,
        tol,
        times,
        lhs,
        rhs,
        margins,
        min_margin,
        violations,
    })
}
