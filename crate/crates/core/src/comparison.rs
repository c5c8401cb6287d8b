//! Comparison functions: strictly increasing scalar maps, class-K maps, their
//! inverses and the exponential KL bounds used by every ISS estimate.
//!
//! Monotonicity is checked when a map is built, on an evenly spaced sample of
//! the declared validation interval. The closure itself is evaluated wherever
//! the caller asks; the interval is only the range that was checked.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};

/// Number of points used to spot-check monotonicity at construction.
pub const VALIDATION_SAMPLES: usize = 257;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A strictly increasing map `ℝ → ℝ`, validated on `[domain_lo, domain_hi]`.
#[derive(Clone)]
pub struct MonotoneFn {
    eval: ScalarFn,
    domain_lo: f64,
    domain_hi: f64,
    label: String,
    class_k: bool,
}

impl fmt::Debug for MonotoneFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneFn")
            .field("label", &self.label)
            .field("domain", &(self.domain_lo, self.domain_hi))
            .field("class_k", &self.class_k)
            .finish()
    }
}

impl MonotoneFn {
    /// Build a strictly increasing map, rejecting it if any sampled pair on
    /// `[lo, hi]` fails to increase.
    pub fn new<F>(label: impl Into<String>, lo: f64, hi: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let label = label.into();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return domain(format!(
                "map '{label}': validation interval [{lo}, {hi}] is empty or unbounded"
            ));
        }
        let map = Self {
            eval: Arc::new(f),
            domain_lo: lo,
            domain_hi: hi,
            label,
            class_k: false,
        };
        map.check_increasing()?;
        Ok(map)
    }

    /// Build a class-K map on `[0, hi]`: strictly increasing with `f(0) = 0`.
    pub fn class_k<F>(label: impl Into<String>, hi: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut map = Self::new(label, 0.0, hi, f)?;
        let at_zero = map.eval(0.0);
        if at_zero != 0.0 {
            return Err(Error::NotAdmissible {
                label: map.label,
                reason: format!("class-K map must vanish at 0, got {at_zero}"),
            });
        }
        map.class_k = true;
        Ok(map)
    }

    /// The identity map validated on `[lo, hi]`.
    pub fn identity(lo: f64, hi: f64) -> Result<Self> {
        Self::new("identity", lo, hi, |v| v)
    }

    fn check_increasing(&self) -> Result<()> {
        let n = VALIDATION_SAMPLES - 1;
        let step = (self.domain_hi - self.domain_lo) / n as f64;
        let mut prev = self.eval(self.domain_lo);
        if !prev.is_finite() {
            return self.reject(format!("non-finite value at {}", self.domain_lo));
        }
        for i in 1..=n {
            let x = if i == n {
                self.domain_hi
            } else {
                self.domain_lo + i as f64 * step
            };
            let v = self.eval(x);
            if !v.is_finite() {
                return self.reject(format!("non-finite value at {x}"));
            }
            if v <= prev {
                return self.reject(format!("not strictly increasing near {x}"));
            }
            prev = v;
        }
        Ok(())
    }

    fn reject(&self, reason: String) -> Result<()> {
        Err(Error::NotAdmissible {
            label: self.label.clone(),
            reason,
        })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.domain_lo, self.domain_hi)
    }

    pub fn is_class_k(&self) -> bool {
        self.class_k
    }

    /// Inverse on the validation interval.
    pub fn inverse(&self, y: f64, tol: f64) -> Result<f64> {
        invert_monotone(self, y, self.domain_lo, self.domain_hi, tol)
    }
}

/// Bracketed bisection for `f(x) = y` on `[lo, hi]`.
///
/// Stops once `|f(x) - y| <= tol` or the bracket has collapsed to adjacent
/// floating-point numbers.
pub fn invert_monotone(f: &MonotoneFn, y: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return domain(format!("inversion tolerance must be positive, got {tol}"));
    }
    if !(lo <= hi) {
        return domain(format!("inversion bracket [{lo}, {hi}] is empty"));
    }
    let (f_lo, f_hi) = (f.eval(lo), f.eval(hi));
    if !(f_lo <= y && y <= f_hi) {
        return Err(Error::Bracket {
            target: y,
            lo_value: f_lo,
            hi_value: f_hi,
        });
    }
    if (f_lo - y).abs() <= tol {
        return Ok(lo);
    }
    if (f_hi - y).abs() <= tol {
        return Ok(hi);
    }
    let (mut a, mut b) = (lo, hi);
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return Ok(mid);
        }
        let v = f.eval(mid);
        if (v - y).abs() <= tol {
            return Ok(mid);
        }
        if v < y {
            a = mid;
        } else {
            b = mid;
        }
    }
}

/// Gain `γ(s) = 2 ψ₁(2 ρ(s)) + μ(ρ(s))` of the abstract ISS estimate.
pub fn gain_from_prop22(psi1: &MonotoneFn, rho: &MonotoneFn, mu: &MonotoneFn, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return domain(format!("gain argument must be nonnegative, got {s}"));
    }
    let r = rho.eval(s);
    Ok(2.0 * psi1.eval(2.0 * r) + mu.eval(r))
}

/// The three comparison maps of the parabolic functional with exponent `p`:
/// upper bound `ψ₁(s) = s^{p+1}/(p+1)`, lower bound `ψ₂(s) = s^{p+1}/(2^p (p+1))`
/// and level penalty `μ(s) = 2 s^{p+1}`.
pub fn parabolic_psi_set(p: f64) -> Result<(MonotoneFn, MonotoneFn, MonotoneFn)> {
    if !(p.is_finite() && p > 1.0) {
        return domain(format!("exponent must lie in (1, inf), got {p}"));
    }
    let hi = 1e3;
    let psi1 = MonotoneFn::class_k("psi1", hi, move |s| s.max(0.0).powf(p + 1.0) / (p + 1.0))?;
    let two_p = 2f64.powf(p);
    let psi2 = MonotoneFn::class_k("psi2", hi, move |s| s.max(0.0).powf(p + 1.0) / (two_p * (p + 1.0)))?;
    let mu = MonotoneFn::class_k("mu", hi, move |s| 2.0 * s.max(0.0).powf(p + 1.0))?;
    Ok((psi1, psi2, mu))
}

/// `β(s, t) = amplitude(s) · e^{-rate t}`.
#[derive(Debug, Clone)]
pub struct KlBound {
    amplitude: MonotoneFn,
    rate: f64,
}

impl KlBound {
    pub fn new(amplitude: MonotoneFn, rate: f64) -> Result<Self> {
        if !amplitude.is_class_k() {
            return domain(format!("KL amplitude '{}' must be class-K", amplitude.label()));
        }
        if !(rate.is_finite() && rate > 0.0) {
            return domain(format!("KL decay rate must be positive, got {rate}"));
        }
        Ok(Self { amplitude, rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        self.amplitude.eval(s) * (-self.rate * t).exp()
    }
}
