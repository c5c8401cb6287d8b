//! Disturbance and initial-data signals.
//!
//! [`TimeSignal`] is a right-continuous piecewise signal on `t >= 0`;
//! [`Profile`] is a spatial shape on the unit interval or unit square; and
//! [`SpaceTimeField`] combines them (or wraps an arbitrary closure). Each type
//! answers sup-norm queries over time windows, which feed the truncation
//! levels and the disturbance gains of the ISS bounds.
//!
//! Windows are treated as closed. For the continuous pieces used here the sup
//! over `(t0, t1)` and over `[t0, t1]` agree.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};

/// Sampling resolution for pieces without a closed-form maximum.
pub const DEFAULT_RESOLUTION: usize = 4096;

/// Shape of one piece of a [`TimeSignal`]. All kinds use the global time `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalKind {
    Constant {
        value: f64,
    },
    /// `offset + amplitude · sin(2π·frequency·t + phase)`.
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
        offset: f64,
    },
    /// `amplitude · e^{-rate·t}`.
    ExpDecay {
        amplitude: f64,
        rate: f64,
    },
    /// `Σ coeffs[i] · t^i`.
    Polynomial {
        coeffs: Vec<f64>,
    },
}

impl SignalKind {
    fn params(&self) -> Vec<f64> {
        match self {
            SignalKind::Constant { value } => vec![*value],
            SignalKind::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => vec![*amplitude, *frequency, *phase, *offset],
            SignalKind::ExpDecay { amplitude, rate } => vec![*amplitude, *rate],
            SignalKind::Polynomial { coeffs } => coeffs.clone(),
        }
    }

    #[inline]
    fn eval(&self, t: f64) -> f64 {
        match self {
            SignalKind::Constant { value } => *value,
            SignalKind::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => offset + amplitude * (2.0 * PI * frequency * t + phase).sin(),
            SignalKind::ExpDecay { amplitude, rate } => amplitude * (-rate * t).exp(),
            SignalKind::Polynomial { coeffs } => horner(coeffs, t),
        }
    }

    fn scaled(&self, c: f64) -> Self {
        match self {
            SignalKind::Constant { value } => SignalKind::Constant { value: c * value },
            SignalKind::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => SignalKind::Sinusoid {
                amplitude: c * amplitude,
                frequency: *frequency,
                phase: *phase,
                offset: c * offset,
            },
            SignalKind::ExpDecay { amplitude, rate } => SignalKind::ExpDecay {
                amplitude: c * amplitude,
                rate: *rate,
            },
            SignalKind::Polynomial { coeffs } => SignalKind::Polynomial {
                coeffs: coeffs.iter().map(|a| c * a).collect(),
            },
        }
    }

    /// `sup |piece|` over the closed interval `[a, b]`.
    fn sup_abs(&self, a: f64, b: f64, resolution: usize) -> f64 {
        match self {
            SignalKind::Constant { value } => value.abs(),
            SignalKind::ExpDecay { .. } => self.eval(a).abs().max(self.eval(b).abs()),
            SignalKind::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => {
                let th_a = 2.0 * PI * frequency * a + phase;
                let th_b = 2.0 * PI * frequency * b + phase;
                let (lo, hi) = if th_a <= th_b { (th_a, th_b) } else { (th_b, th_a) };
                let mut best = self.eval(a).abs().max(self.eval(b).abs());
                // critical angles π/2 + kπ inside [lo, hi]
                let k0 = ((lo - FRAC_PI_2) / PI).ceil();
                let k1 = ((hi - FRAC_PI_2) / PI).floor();
                if k1 - k0 >= 1.0 {
                    return offset.abs() + amplitude.abs();
                }
                if k1 >= k0 {
                    let theta = FRAC_PI_2 + k0 * PI;
                    best = best.max((offset + amplitude * theta.sin()).abs());
                }
                best
            }
            SignalKind::Polynomial { coeffs } => poly_sup_abs(coeffs, a, b, resolution),
        }
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect()
}

/// Dense samples plus bisection on sign changes of the derivative between
/// neighbouring samples.
fn poly_sup_abs(coeffs: &[f64], a: f64, b: f64, resolution: usize) -> f64 {
    let d = derivative(coeffs);
    let n = resolution.max(2) - 1;
    let step = (b - a) / n as f64;
    let mut best: f64 = 0.0;
    let mut prev_t = a;
    let mut prev_d = horner(&d, a);
    for i in 0..=n {
        let t = if i == n { b } else { a + i as f64 * step };
        best = best.max(horner(coeffs, t).abs());
        let dt = horner(&d, t);
        if i > 0 && prev_d * dt < 0.0 {
            let (mut lo, mut hi) = (prev_t, t);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if horner(&d, lo) * horner(&d, mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            best = best.max(horner(coeffs, 0.5 * (lo + hi)).abs());
        }
        prev_t = t;
        prev_d = dt;
    }
    best
}

/// One piece of a [`TimeSignal`], active from `start` up to the next piece.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub kind: SignalKind,
}

/// Right-continuous piecewise time signal on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pieces: Vec<Piece>,
}

impl TimeSignal {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return domain("a signal needs at least one piece");
        };
        if first.start != 0.0 {
            return domain(format!("first piece must start at 0, got {}", first.start));
        }
        for w in pieces.windows(2) {
            if !(w[1].start > w[0].start) || !w[1].start.is_finite() {
                return domain(format!(
                    "breakpoints must increase strictly: {} then {}",
                    w[0].start, w[1].start
                ));
            }
        }
        for piece in &pieces {
            if piece.kind.params().iter().any(|v| !v.is_finite()) {
                return domain("signal parameters must be finite");
            }
        }
        Ok(Self { pieces })
    }

    pub fn single(kind: SignalKind) -> Result<Self> {
        Self::new(vec![Piece { start: 0.0, kind }])
    }

    pub fn constant(value: f64) -> Self {
        Self {
            pieces: vec![Piece {
                start: 0.0,
                kind: SignalKind::Constant { value },
            }],
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// `c · signal`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    start: p.start,
                    kind: p.kind.scaled(c),
                })
                .collect(),
        }
    }

    fn active(&self, t: f64) -> usize {
        // last piece whose start is <= t
        self.pieces.partition_point(|p| p.start <= t).saturating_sub(1)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return domain(format!("signals are defined for t >= 0, got {t}"));
        }
        Ok(self.value(t))
    }

    /// Evaluation for callers that already guarantee `t >= 0`.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        self.pieces[self.active(t)].kind.eval(t)
    }

    /// `sup |signal|` over the closed window `[t0, t1]`.
    pub fn sup_window(&self, t0: f64, t1: f64, resolution: usize) -> Result<f64> {
        if !(t0 >= 0.0 && t1 > t0) {
            return domain(format!("window [{t0}, {t1}] is empty or starts before 0"));
        }
        if resolution < 2 {
            return domain("sampling resolution must be at least 2");
        }
        let mut best: f64 = 0.0;
        for (i, piece) in self.pieces.iter().enumerate() {
            let end = self.pieces.get(i + 1).map_or(f64::INFINITY, |p| p.start);
            let a = piece.start.max(t0);
            let b = end.min(t1);
            if a > b {
                continue;
            }
            best = best.max(piece.kind.sup_abs(a, b, resolution));
        }
        Ok(best)
    }

    /// Running sup `max_{s ∈ [0, t_i]} |signal(s)|` at each stamp.
    pub fn running_sup(&self, times: &[f64], resolution: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(times.len());
        let mut acc: f64 = 0.0;
        let mut prev = 0.0;
        for (i, &t) in times.iter().enumerate() {
            if i == 0 || t <= prev {
                acc = acc.max(self.eval(t)?.abs());
            } else {
                acc = acc.max(self.sup_window(prev, t, resolution)?);
            }
            out.push(acc);
            prev = t;
        }
        Ok(out)
    }
}

/// Spatial shape on the unit interval (`point = [y]`) or unit square
/// (`point = [x, y]`).
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Zero,
    Constant {
        value: f64,
    },
    /// `slope · point[0] + intercept`.
    Linear {
        slope: f64,
        intercept: f64,
    },
    /// `offset + amplitude · Π_d sin(wavenumber · π · point[d])`.
    Sine {
        amplitude: f64,
        wavenumber: f64,
        offset: f64,
    },
    /// `height · cos²(π·dist/(2·radius))` inside the ball of `radius`
    /// around `(center, …, center)`, zero outside.
    Bump {
        center: f64,
        radius: f64,
        height: f64,
    },
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        let params: Vec<f64> = match *self {
            Profile::Zero => vec![],
            Profile::Constant { value } => vec![value],
            Profile::Linear { slope, intercept } => vec![slope, intercept],
            Profile::Sine {
                amplitude,
                wavenumber,
                offset,
            } => vec![amplitude, wavenumber, offset],
            Profile::Bump { center, radius, height } => {
                if !(radius > 0.0) {
                    return domain("bump radius must be positive");
                }
                vec![center, radius, height]
            }
        };
        if params.iter().any(|v| !v.is_finite()) {
            return domain("profile parameters must be finite");
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, point: &[f64]) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Constant { value } => value,
            Profile::Linear { slope, intercept } => slope * point[0] + intercept,
            Profile::Sine {
                amplitude,
                wavenumber,
                offset,
            } => {
                let prod: f64 = point.iter().map(|&x| (wavenumber * PI * x).sin()).product();
                offset + amplitude * prod
            }
            Profile::Bump { center, radius, height } => {
                let dist = point.iter().map(|&x| (x - center).powi(2)).sum::<f64>().sqrt();
                if dist < radius {
                    height * (FRAC_PI_2 * dist / radius).cos().powi(2)
                } else {
                    0.0
                }
            }
        }
    }

    /// `sup |profile|` over the closed unit interval (`dim = 1`) or square.
    pub fn sup_abs(&self, dim: usize) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Constant { value } => value.abs(),
            Profile::Linear { slope, intercept } => intercept.abs().max((slope + intercept).abs()),
            Profile::Sine {
                amplitude,
                wavenumber,
                offset,
            } => {
                let (lo, hi) = sine_range(wavenumber);
                let (mut plo, mut phi) = (lo, hi);
                for _ in 1..dim {
                    let cands = [plo * lo, plo * hi, phi * lo, phi * hi];
                    plo = cands.iter().cloned().fold(f64::INFINITY, f64::min);
                    phi = cands.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                }
                (offset + amplitude * plo).abs().max((offset + amplitude * phi).abs())
            }
            Profile::Bump { center, radius, height } => {
                // the peak is attained only if the center lies in the closed domain;
                // otherwise the nearest boundary point is the maximizer
                let nearest = center.clamp(0.0, 1.0);
                let dist = ((nearest - center).abs()) * (dim as f64).sqrt();
                if dist < radius {
                    height.abs() * (FRAC_PI_2 * dist / radius).cos().powi(2)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Range of `sin(k π x)` for `x ∈ [0, 1]`.
fn sine_range(k: f64) -> (f64, f64) {
    let end = (k * PI).sin();
    let (th_lo, th_hi) = if k >= 0.0 { (0.0, k * PI) } else { (k * PI, 0.0) };
    let mut lo = end.min(0.0);
    let mut hi = end.max(0.0);
    let k0 = ((th_lo - FRAC_PI_2) / PI).ceil() as i64;
    let k1 = ((th_hi - FRAC_PI_2) / PI).floor() as i64;
    for j in k0..=k1.min(k0 + 2) {
        let v = (FRAC_PI_2 + j as f64 * PI).sin();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

type FieldFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// A function of space and time.
#[derive(Clone)]
pub enum SpaceTimeField {
    /// `profile(point) · signal(t)`.
    Separable { profile: Profile, signal: TimeSignal },
    /// Arbitrary closure with an optional certified bound on `sup |f|`.
    Custom { eval: FieldFn, sup_hint: Option<f64> },
}

impl fmt::Debug for SpaceTimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTimeField::Separable { profile, signal } => f
                .debug_struct("Separable")
                .field("profile", profile)
                .field("signal", signal)
                .finish(),
            SpaceTimeField::Custom { sup_hint, .. } => f.debug_struct("Custom").field("sup_hint", sup_hint).finish(),
        }
    }
}

impl SpaceTimeField {
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        SpaceTimeField::Separable {
            profile: Profile::Constant { value: 1.0 },
            signal: TimeSignal::constant(value),
        }
    }

    /// Time-independent field with the given shape.
    pub fn stationary(profile: Profile) -> Self {
        SpaceTimeField::Separable {
            profile,
            signal: TimeSignal::constant(1.0),
        }
    }

    /// Spatially uniform field following `signal`.
    pub fn uniform(signal: TimeSignal) -> Self {
        SpaceTimeField::Separable {
            profile: Profile::Constant { value: 1.0 },
            signal,
        }
    }

    pub fn custom<F>(f: F, sup_hint: Option<f64>) -> Self
    where
        F: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    {
        SpaceTimeField::Custom {
            eval: Arc::new(f),
            sup_hint,
        }
    }

    #[inline]
    pub fn eval(&self, point: &[f64], t: f64) -> f64 {
        match self {
            SpaceTimeField::Separable { profile, signal } => profile.eval(point) * signal.value(t),
            SpaceTimeField::Custom { eval, .. } => eval(point, t),
        }
    }

    /// Whether the field is identically zero by construction.
    pub fn is_trivially_zero(&self) -> bool {
        match self {
            SpaceTimeField::Separable { profile, signal } => {
                profile.sup_abs(2) == 0.0
                    || signal
                        .pieces()
                        .iter()
                        .all(|p| p.kind == SignalKind::Constant { value: 0.0 })
            }
            SpaceTimeField::Custom { .. } => false,
        }
    }
}

/// Space-time lattice for sampled sup queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    /// Spatial dimension (1 or 2).
    pub dim: usize,
    /// Points per spatial axis, endpoints included.
    pub points: usize,
    /// Points in time, endpoints included.
    pub time_resolution: usize,
}

impl SampleSpec {
    pub fn new(dim: usize, points: usize) -> Self {
        Self {
            dim,
            points,
            time_resolution: DEFAULT_RESOLUTION,
        }
    }
}

/// `sup |field|` over the closed domain times `[t0, t1]`.
///
/// Separable fields are answered exactly. Custom fields are sampled on the
/// lattice; a declared hint is returned when it dominates the samples.
pub fn sup_field(field: &SpaceTimeField, spec: SampleSpec, t0: f64, t1: f64) -> Result<f64> {
    if !(t0 >= 0.0 && t1 > t0) {
        return domain(format!("window [{t0}, {t1}] is empty or starts before 0"));
    }
    if !(spec.dim == 1 || spec.dim == 2) || spec.points < 2 || spec.time_resolution < 2 {
        return domain("sample spec needs dim in {1, 2} and at least 2 points per axis");
    }
    match field {
        SpaceTimeField::Separable { profile, signal } => {
            Ok(profile.sup_abs(spec.dim) * signal.sup_window(t0, t1, spec.time_resolution)?)
        }
        SpaceTimeField::Custom { eval, sup_hint } => {
            let sampled = sample_custom(eval.as_ref(), spec, t0, t1);
            Ok(match sup_hint {
                Some(h) if *h >= sampled => *h,
                _ => sampled,
            })
        }
    }
}

fn sample_custom(eval: &(dyn Fn(&[f64], f64) -> f64 + Send + Sync), spec: SampleSpec, t0: f64, t1: f64) -> f64 {
    let nx = spec.points - 1;
    let nt = spec.time_resolution - 1;
    let mut best: f64 = 0.0;
    for it in 0..=nt {
        let t = t0 + (t1 - t0) * it as f64 / nt as f64;
        if spec.dim == 1 {
            for i in 0..=nx {
                best = best.max(eval(&[i as f64 / nx as f64], t).abs());
            }
        } else {
            for j in 0..=nx {
                for i in 0..=nx {
                    best = best.max(eval(&[i as f64 / nx as f64, j as f64 / nx as f64], t).abs());
                }
            }
        }
    }
    best
}

/// Running `sup |field|` over `domain × [0, t_i]` at each stamp.
pub fn running_sup_field(field: &SpaceTimeField, spec: SampleSpec, times: &[f64]) -> Result<Vec<f64>> {
    match field {
        SpaceTimeField::Separable { profile, signal } => {
            let amp = profile.sup_abs(spec.dim);
            Ok(signal
                .running_sup(times, spec.time_resolution)?
                .into_iter()
                .map(|s| amp * s)
                .collect())
        }
        SpaceTimeField::Custom { eval, .. } => {
            let mut out = Vec::with_capacity(times.len());
            let mut acc: f64 = 0.0;
            let mut prev = 0.0;
            for (i, &t) in times.iter().enumerate() {
                let window = if i == 0 || t <= prev {
                    let single = SampleSpec {
                        time_resolution: 2,
                        ..spec
                    };
                    sample_custom(eval.as_ref(), single, t, t)
                } else {
                    let local = SampleSpec {
                        time_resolution: 8,
                        ..spec
                    };
                    sample_custom(eval.as_ref(), local, prev, t)
                };
                acc = acc.max(window);
                out.push(acc);
                prev = t;
            }
            Ok(out)
        }
    }
}
