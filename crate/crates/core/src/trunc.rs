//! Stampacchia truncation pair and the elementary inequalities built on it.
//!
//! For an exponent `p > 1` the pair is
//!
//! ```text
//! g(s) = s^p            (s >= 0),   0 otherwise
//! G(s) = s^(p+1)/(p+1)  (s >= 0),   0 otherwise
//! ```
//!
//! `G` is the primitive of `g`. Both vanish on the non-positive axis, which is
//! what makes the disturbance-shifted energies `G(±w - M)` switch off once the
//! state is inside the band `|w| <= M`.
//!
//! The inequalities used by the Lyapunov constructions are exposed as *gap*
//! functions: each returns `rhs - lhs`, so a nonnegative value certifies the
//! inequality at that point.

use crate::error::{domain, Result};

/// Exponent `p` together with the truncated power `g` and its primitive `G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPair {
    p: f64,
}

impl TruncationPair {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return domain(format!("truncation exponent must lie in (1, inf), got {p}"));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn exponent(&self) -> f64 {
        self.p
    }

    /// `g(s)`: the truncated power.
    pub fn power(&self, s: f64) -> Result<f64> {
        check_finite(s)?;
        Ok(self.power_unchecked(s))
    }

    /// `G(s)`: the primitive of the truncated power.
    pub fn primitive(&self, s: f64) -> Result<f64> {
        check_finite(s)?;
        Ok(self.primitive_unchecked(s))
    }

    /// `g(s)` without the finiteness check. Callers guarantee `s` is finite.
    #[inline]
    pub fn power_unchecked(&self, s: f64) -> f64 {
        if s > 0.0 {
            s.powf(self.p)
        } else {
            0.0
        }
    }

    /// `G(s)` without the finiteness check. Callers guarantee `s` is finite.
    #[inline]
    pub fn primitive_unchecked(&self, s: f64) -> f64 {
        if s > 0.0 {
            s.powf(self.p + 1.0) / (self.p + 1.0)
        } else {
            0.0
        }
    }

    /// Gap of the selected inequality at `args`; nonnegative certifies it.
    pub fn property_gap(&self, args: PropertyArgs) -> Result<f64> {
        self.property_terms(args).map(|t| t.gap())
    }

    /// Both sides of the selected inequality, for relative-tolerance checks.
    pub fn property_terms(&self, args: PropertyArgs) -> Result<PropertyTerms> {
        for v in args.values() {
            check_finite(v)?;
        }
        let big_g = |s: f64| self.primitive_unchecked(s);
        let two_p = 2f64.powf(self.p);
        let terms = match args {
            PropertyArgs::ShiftSplit { s, tau } => PropertyTerms {
                lhs: big_g(s),
                rhs: big_g(s + tau) + big_g(s - tau),
            },
            PropertyArgs::AbsoluteShift { s, tau } => PropertyTerms {
                lhs: big_g(s.abs() + tau),
                rhs: big_g(s + tau) + big_g(-s + tau),
            },
            PropertyArgs::Doubling { s, tau } => PropertyTerms {
                lhs: big_g(s + tau),
                rhs: two_p * (big_g(s) + big_g(tau)),
            },
            PropertyArgs::BandSandwich { s, tau, level } => PropertyTerms {
                lhs: big_g(s.abs()),
                rhs: two_p
                    * (big_g(s + tau - level)
                        + big_g(s - tau - level)
                        + big_g(-s + tau - level)
                        + big_g(-s - tau - level))
                    + two_p * big_g(level),
            },
            PropertyArgs::Young { s, tau, eps } => {
                if !(eps > 0.0) {
                    return domain(format!("Young split parameter must be positive, got {eps}"));
                }
                PropertyTerms {
                    lhs: self.power_unchecked(s) * tau,
                    rhs: eps * big_g(s) + (self.p / eps).powf(self.p) * big_g(tau),
                }
            }
        };
        Ok(terms)
    }
}

fn check_finite(s: f64) -> Result<()> {
    if s.is_finite() {
        Ok(())
    } else {
        domain(format!("argument must be finite, got {s}"))
    }
}

/// Arguments of the pair's algebraic inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropertyArgs {
    /// `G(s) <= G(s+τ) + G(s-τ)`.
    ShiftSplit { s: f64, tau: f64 },
    /// `G(|s|+τ) <= G(s+τ) + G(-s+τ)`.
    AbsoluteShift { s: f64, tau: f64 },
    /// `G(s+τ) <= 2^p (G(s) + G(τ))`.
    Doubling { s: f64, tau: f64 },
    /// `G(|s|) <= 2^p Σ G(±s ± τ - M) + 2^p G(M)`.
    BandSandwich { s: f64, tau: f64, level: f64 },
    /// `g(s) τ <= ε G(s) + (p/ε)^p G(τ)`.
    Young { s: f64, tau: f64, eps: f64 },
}

impl PropertyArgs {
    fn values(&self) -> Vec<f64> {
        match *self {
            PropertyArgs::ShiftSplit { s, tau }
            | PropertyArgs::AbsoluteShift { s, tau }
            | PropertyArgs::Doubling { s, tau } => vec![s, tau],
            PropertyArgs::BandSandwich { s, tau, level } => vec![s, tau, level],
            PropertyArgs::Young { s, tau, eps } => vec![s, tau, eps],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PropertyArgs::ShiftSplit { .. } => "shift-split",
            PropertyArgs::AbsoluteShift { .. } => "absolute-shift",
            PropertyArgs::Doubling { .. } => "doubling",
            PropertyArgs::BandSandwich { .. } => "band-sandwich",
            PropertyArgs::Young { .. } => "young",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyTerms {
    pub lhs: f64,
    pub rhs: f64,
}

impl PropertyTerms {
    pub fn gap(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// Relative acceptance: `gap >= -rel_tol * (1 + |lhs|)`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.gap() >= -rel_tol * (1.0 + self.lhs.abs())
    }
}

/// Gap of Young's inequality with ε:
/// `ε a^r + C(ε) b^q - a b` with `C(ε) = (ε r)^(-q/r) / q`.
pub fn young_epsilon_gap(r_exp: f64, q_exp: f64, a: f64, b: f64, eps: f64) -> Result<f64> {
    if !(r_exp > 1.0 && q_exp > 1.0) {
        return domain("Young exponents must exceed 1");
    }
    if (1.0 / r_exp + 1.0 / q_exp - 1.0).abs() > 1e-12 {
        return domain(format!("exponents {r_exp}, {q_exp} are not conjugate"));
    }
    if !(a >= 0.0 && b >= 0.0) {
        return domain("Young arguments must be nonnegative");
    }
    if !(eps > 0.0) {
        return domain("Young parameter must be positive");
    }
    let c_eps = (eps * r_exp).powf(-q_exp / r_exp) / q_exp;
    Ok(eps * a.powf(r_exp) + c_eps * b.powf(q_exp) - a * b)
}

/// Comparison envelope for `η' <= φ(t) η + ψ(t)` on a uniform grid with step `dt`:
///
/// `e^{∫₀ᵗφ} η₀ + ∫₀ᵗ e^{∫ₛᵗφ} ψ(s) ds`, integrals by composite trapezoid.
pub fn gronwall_envelope(phi: &[f64], psi: &[f64], eta0: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return domain("gronwall_envelope requires dt > 0");
    }
    let times: Vec<f64> = (0..phi.len()).map(|i| i as f64 * dt).collect();
    gronwall_envelope_on(&times, phi, psi, eta0)
}

/// Same as [`gronwall_envelope`] on an arbitrary increasing time grid.
///
/// Evaluated recursively, `E_i = e^{ΔΦ_i} E_{i-1} + Δt/2 (e^{ΔΦ_i} ψ_{i-1} + ψ_i)`,
/// which never forms `e^{-Φ}` and so stays finite for long horizons.
pub fn gronwall_envelope_on(times: &[f64], phi: &[f64], psi: &[f64], eta0: f64) -> Result<Vec<f64>> {
    if phi.is_empty() {
        return domain("gronwall_envelope requires a nonempty series");
    }
    if phi.len() != psi.len() || phi.len() != times.len() {
        return domain(format!(
            "series lengths differ: times {}, phi {}, psi {}",
            times.len(),
            phi.len(),
            psi.len()
        ));
    }
    let mut out = Vec::with_capacity(phi.len());
    out.push(eta0);
    for i in 1..phi.len() {
        let dt = times[i] - times[i - 1];
        if !(dt > 0.0) {
            return domain("time stamps must be strictly increasing");
        }
        let growth = (0.5 * dt * (phi[i - 1] + phi[i])).exp();
        let prev = out[i - 1];
        out.push(growth * prev + 0.5 * dt * (growth * psi[i - 1] + psi[i]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pair(p: f64) -> TruncationPair {
        TruncationPair::new(p).unwrap()
    }

    /// Composite Simpson rule, used as an oracle independent of the closed form.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn power_values() {
        assert_eq!(pair(2.0).power(3.0).unwrap(), 9.0);
        assert_eq!(pair(2.0).power(-1.0).unwrap(), 0.0);
        assert_relative_eq!(pair(1.5).power(4.0).unwrap(), 8.0, max_relative = 1e-14);
    }

    #[test]
    fn primitive_values() {
        assert_relative_eq!(pair(2.0).primitive(3.0).unwrap(), 9.0, max_relative = 1e-14);
        assert_eq!(pair(3.0).primitive(-5.0).unwrap(), 0.0);
        let pr = pair(2.0);
        let quad = simpson(|t| pr.power(t).unwrap(), 0.0, 1.0, 1000);
        assert_relative_eq!(pr.primitive(1.0).unwrap(), quad, max_relative = 1e-12);
        assert_relative_eq!(quad, 1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(TruncationPair::new(1.0).is_err());
        assert!(TruncationPair::new(f64::INFINITY).is_err());
        assert!(pair(2.0).power(f64::NAN).is_err());
        assert!(pair(2.0).primitive(f64::INFINITY).is_err());
        let bad = PropertyArgs::Young {
            s: 1.0,
            tau: 1.0,
            eps: 0.0,
        };
        assert!(pair(2.0).property_gap(bad).is_err());
    }

    #[test]
    fn property_gap_examples() {
        let pr = pair(2.0);
        // 1/3 + 4/3 - 1
        let young = pr
            .property_gap(PropertyArgs::Young {
                s: 1.0,
                tau: 1.0,
                eps: 1.0,
            })
            .unwrap();
        assert_relative_eq!(young, 2.0 / 3.0, max_relative = 1e-14);
        let split = pr.property_gap(PropertyArgs::ShiftSplit { s: 0.0, tau: 0.0 }).unwrap();
        assert_eq!(split, 0.0);
        // equality case of the doubling bound: 4 (1/3 + 1/3) - 8/3
        let dbl = pr.property_gap(PropertyArgs::Doubling { s: 1.0, tau: 1.0 }).unwrap();
        assert!(dbl.abs() < 1e-14);
    }

    #[test]
    fn young_examples() {
        assert_relative_eq!(young_epsilon_gap(2.0, 2.0, 0.0, 5.0, 1.0).unwrap(), 6.25);
        assert_relative_eq!(young_epsilon_gap(2.0, 2.0, 1.0, 1.0, 1.0).unwrap(), 0.25);
        assert!(young_epsilon_gap(3.0, 1.5, 1.0, 1.0, 0.5).unwrap() >= 0.0);
        assert!(young_epsilon_gap(2.0, 3.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn young_brute_force_scan() {
        // dense scan over (a, b) for r = 3, q = 3/2, eps = 0.5
        let mut min_gap = f64::INFINITY;
        for i in 0..=200 {
            for j in 0..=200 {
                let a = i as f64 * 0.05;
                let b = j as f64 * 0.05;
                min_gap = min_gap.min(young_epsilon_gap(3.0, 1.5, a, b, 0.5).unwrap());
            }
        }
        assert!(min_gap >= -1e-12, "min gap {min_gap}");
    }

    #[test]
    fn gronwall_examples() {
        let n = 1001;
        let env = gronwall_envelope(&vec![0.0; n], &vec![0.0; n], 1.0, 1e-3).unwrap();
        assert!(env.iter().all(|&v| v == 1.0));

        let env = gronwall_envelope(&vec![-1.0; n], &vec![1.0; n], 0.0, 1e-3).unwrap();
        for (i, v) in env.iter().enumerate() {
            let t = i as f64 * 1e-3;
            assert!((v - (1.0 - (-t).exp())).abs() < 1e-5);
        }
        assert!((env[n - 1] - 0.632_120_558_8).abs() < 1e-5);

        let steps = 1000;
        let dt = std::f64::consts::LN_2 / steps as f64;
        let env = gronwall_envelope(&vec![-1.0; steps + 1], &vec![0.0; steps + 1], 2.0, dt).unwrap();
        assert!((env[steps] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gronwall_errors() {
        assert!(gronwall_envelope(&[], &[], 0.0, 1e-3).is_err());
        assert!(gronwall_envelope(&[0.0, 0.0], &[0.0], 0.0, 1e-3).is_err());
        assert!(gronwall_envelope(&[0.0], &[0.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn gronwall_dominates_forward_euler() {
        let n = 2001;
        let dt = 1e-3;
        let phi: Vec<f64> = (0..n).map(|i| -1.0 + (i as f64 * dt * 3.0).sin()).collect();
        let psi: Vec<f64> = (0..n).map(|i| (i as f64 * dt).cos().abs()).collect();
        let env = gronwall_envelope(&phi, &psi, 0.5, dt).unwrap();
        let mut eta = 0.5;
        for i in 0..n {
            assert!(eta <= env[i] + 10.0 * dt, "step {i}: euler {eta} > envelope {}", env[i]);
            eta += dt * (phi[i] * eta + psi[i]);
        }
    }

    fn exponent() -> impl Strategy<Value = f64> {
        prop_oneof![Just(1.5), Just(2.0), Just(3.0), Just(5.0), 1.01f64..8.0]
    }

    proptest! {
        #[test]
        fn vanishes_on_nonpositive_axis(p in exponent(), s in -1e3f64..=0.0) {
            let pr = pair(p);
            prop_assert_eq!(pr.power(s).unwrap(), 0.0);
            prop_assert_eq!(pr.primitive(s).unwrap(), 0.0);
        }

        #[test]
        fn primitive_is_power_times_argument(p in exponent(), s in -50f64..50.0) {
            let pr = pair(p);
            let lhs = pr.primitive(s).unwrap();
            let rhs = pr.power(s).unwrap() * s / (p + 1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300));
        }

        #[test]
        fn power_is_nondecreasing(p in exponent(), a in -20f64..20.0, b in -20f64..20.0) {
            let pr = pair(p);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(pr.power(lo).unwrap() <= pr.power(hi).unwrap());
        }

        #[test]
        fn scaling_law(p in exponent(), m in 0f64..10.0, s in -10f64..10.0) {
            let pr = pair(p);
            let lhs = pr.primitive(m * s).unwrap();
            let rhs = m.powf(p + 1.0) * pr.primitive(s).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1e-300));
        }

        #[test]
        fn all_gaps_nonnegative(
            p in exponent(),
            s in -10f64..10.0,
            tau in -10f64..10.0,
            level in -10f64..10.0,
            eps in 1e-3f64..5.0,
        ) {
            let pr = pair(p);
            for args in [
                PropertyArgs::ShiftSplit { s, tau },
                PropertyArgs::AbsoluteShift { s, tau },
                PropertyArgs::Doubling { s, tau },
                PropertyArgs::BandSandwich { s, tau, level },
                PropertyArgs::Young { s, tau, eps },
            ] {
                let terms = pr.property_terms(args).unwrap();
                prop_assert!(terms.holds(1e-9), "{} failed: {:?}", args.name(), terms);
            }
        }
    }
}
