//! Physical parameters, pump envelopes, and the governing planar vector
//! fields of the semiclassical Kerr parametric oscillator.
//!
//! The planar nonautonomous system in hardware coordinates `(x, y)` is
//!
//! ```text
//! dx/dt = (p(t) - kappa/2) x + delta y + K y (x^2 + y^2)
//! dy/dt = -(p(t) + kappa/2) y - delta x - K x (x^2 + y^2)
//! ```
//!
//! with the conservative limit generated by the effective Hamiltonian
//! `H = (delta/2) r^2 + (K/4) r^4 + p0 x y`.

use crate::{KerrError, Result};
use serde::{Deserialize, Serialize};

/// Residual bound a frozen-time equilibrium must satisfy.
pub const FROZEN_RESIDUAL_TOL: f64 = 1e-10;

/// Two-photon pump envelope `p(t)`.
///
/// A closed tagged union rather than a user callback: the closed-form
/// variational and coefficient solutions only exist for the logistic ramp,
/// and pattern-matching keeps those paths exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PumpEnvelope {
    /// Constant pump `p(t) = p0`.
    Constant { p0: f64 },
    /// Monotone logistic turn-on `p(t) = p_max / (1 + exp(-gamma (t - t_c)))`.
    Logistic { p_max: f64, gamma: f64, t_c: f64 },
    /// Gate-stage pump `P(t) = p0 + A exp(-t^2 / (2 sigma^2))`.
    GaussianGate { p0: f64, amp: f64, sigma: f64 },
}

impl PumpEnvelope {
    /// Evaluates the envelope at time `t`. Total for finite `t`.
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            PumpEnvelope::Constant { p0 } => p0,
            PumpEnvelope::Logistic { p_max, gamma, t_c } => {
                // logistic via exp of a non-positive argument only
                let u = gamma * (t - t_c);
                if u >= 0.0 {
                    p_max / (1.0 + (-u).exp())
                } else {
                    let e = u.exp();
                    p_max * e / (1.0 + e)
                }
            }
            PumpEnvelope::GaussianGate { p0, amp, sigma } => {
                p0 + amp * (-t * t / (2.0 * sigma * sigma)).exp()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(KerrError::InvalidParameter(m.to_string()));
        match *self {
            PumpEnvelope::Constant { p0 } => {
                if p0 < 0.0 || !p0.is_finite() {
                    return bad("Constant envelope requires p0 >= 0");
                }
            }
            PumpEnvelope::Logistic { p_max, gamma, t_c } => {
                if p_max < 0.0 || !p_max.is_finite() {
                    return bad("Logistic envelope requires p_max >= 0");
                }
                if gamma <= 0.0 || !gamma.is_finite() {
                    return bad("Logistic envelope requires gamma > 0");
                }
                if !t_c.is_finite() {
                    return bad("Logistic envelope requires finite t_c");
                }
            }
            PumpEnvelope::GaussianGate { p0, amp, sigma } => {
                if p0 < 0.0 || amp < 0.0 {
                    return bad("GaussianGate envelope requires p0 >= 0 and A >= 0");
                }
                if sigma <= 0.0 || !sigma.is_finite() {
                    return bad("GaussianGate envelope requires sigma > 0");
                }
            }
        }
        Ok(())
    }
}

/// Physical constants of the model plus the pump envelope; the single source
/// of truth for every downstream computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Single-photon dissipation rate, >= 0.
    pub kappa: f64,
    /// Kerr coefficient, > 0.
    #[serde(rename = "K")]
    pub kerr: f64,
    /// Detuning.
    pub delta: f64,
    pub pump: PumpEnvelope,
}

impl ModelParams {
    pub fn new(kappa: f64, kerr: f64, delta: f64, pump: PumpEnvelope) -> Result<Self> {
        if !(kerr > 0.0) {
            return Err(KerrError::InvalidParameter("K must be > 0".into()));
        }
        if !(kappa >= 0.0) {
            return Err(KerrError::InvalidParameter("kappa must be >= 0".into()));
        }
        if !delta.is_finite() {
            return Err(KerrError::InvalidParameter("delta must be finite".into()));
        }
        pump.validate()?;
        Ok(Self { kappa, kerr, delta, pump })
    }

    /// Reference parameter set used throughout: kappa = K = 1, resonant,
    /// logistic ramp p_max = 2.5, gamma = 1.5, t_c = 5.
    pub fn reference_ramp() -> Self {
        Self {
            kappa: 1.0,
            kerr: 1.0,
            delta: 0.0,
            pump: PumpEnvelope::Logistic { p_max: 2.5, gamma: 1.5, t_c: 5.0 },
        }
    }

    /// Reference conservative gate skeleton: kappa = 0 is NOT set here; the
    /// skeleton module ignores kappa. Baseline pump p0 = 1.5.
    pub fn reference_gate(kappa: f64, amp: f64, sigma: f64) -> Self {
        Self {
            kappa,
            kerr: 1.0,
            delta: 0.0,
            pump: PumpEnvelope::GaussianGate { p0: 1.5, amp, sigma },
        }
    }

    pub fn pump_value(&self, t: f64) -> f64 {
        self.pump.value(t)
    }
}

/// A point of the planar phase space; `alpha = x + i y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
}

impl PhaseState {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self { x: 0.0, y: 0.0 }
    }

    pub fn radius_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(&self) -> f64 {
        self.radius_sq().sqrt()
    }
}

/// Time-stamped solution path of the planar system.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, PhaseState)>,
    pub params: ModelParams,
    pub initial: PhaseState,
}

impl Trajectory {
    pub fn new(samples: Vec<(f64, PhaseState)>, params: ModelParams, initial: PhaseState) -> Self {
        debug_assert!(samples.windows(2).all(|w| w[1].0 > w[0].0));
        Self { samples, params, initial }
    }
}

/// Right-hand side of the full nonautonomous planar system.
pub fn full_rhs(params: &ModelParams, t: f64, s: PhaseState) -> (f64, f64) {
    let p = params.pump_value(t);
    let r2 = s.radius_sq();
    let dx = (p - 0.5 * params.kappa) * s.x + params.delta * s.y + params.kerr * s.y * r2;
    let dy = -(p + 0.5 * params.kappa) * s.y - params.delta * s.x - params.kerr * s.x * r2;
    (dx, dy)
}

/// Effective Hamiltonian of the conservative limit. Uses `delta`, `K`, and
/// the constant baseline pump; `kappa` is ignored.
pub fn hamiltonian(delta: f64, kerr: f64, p0: f64, s: PhaseState) -> f64 {
    let r2 = s.radius_sq();
    0.5 * delta * r2 + 0.25 * kerr * r2 * r2 + p0 * s.x * s.y
}

/// Hamiltonian equations of motion: `(dH/dy, -dH/dx)`.
pub fn hamiltonian_rhs(delta: f64, kerr: f64, p0: f64, s: PhaseState) -> (f64, f64) {
    let r2 = s.radius_sq();
    let dx = delta * s.y + kerr * s.y * r2 + p0 * s.x;
    let dy = -(delta * s.x + kerr * s.x * r2 + p0 * s.y);
    (dx, dy)
}

/// Frozen-time equilibria of the full resonant system at time `t`.
///
/// Returns the origin always; when `p(t) > kappa/2` additionally the
/// symmetric nonzero pair solving `K^2 r^4 = p^2 - (kappa/2)^2` with
/// `y = -((p - kappa/2)/(K r^2)) x`. Restricted to `delta = 0`, where the
/// closed form exists.
pub fn frozen_full_equilibria(params: &ModelParams, t: f64) -> Result<Vec<PhaseState>> {
    if params.delta != 0.0 {
        return Err(KerrError::Unsupported(
            "frozen equilibria are only available in the resonant case delta = 0".into(),
        ));
    }
    let p = params.pump_value(t);
    let half_kappa = 0.5 * params.kappa;
    let mut out = vec![PhaseState::origin()];
    if p > half_kappa {
        let r2 = ((p * p - half_kappa * half_kappa).sqrt()) / params.kerr;
        let c = (p - half_kappa) / (params.kerr * r2);
        // x^2 (1 + c^2) = r^2, y = -c x
        let x = (r2 / (1.0 + c * c)).sqrt();
        for sign in [1.0, -1.0] {
            out.push(PhaseState::new(sign * x, -c * sign * x));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ramp() -> ModelParams {
        ModelParams::reference_ramp()
    }

    #[test]
    fn logistic_midpoint_and_saturation() {
        let env = PumpEnvelope::Logistic { p_max: 2.5, gamma: 1.5, t_c: 5.0 };
        assert_abs_diff_eq!(env.value(5.0), 1.25, epsilon = 1e-15);
        assert_abs_diff_eq!(env.value(1e4), 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(env.value(-1e4), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_gate_peak() {
        let env = PumpEnvelope::GaussianGate { p0: 1.5, amp: 7.5, sigma: 0.3 };
        assert_abs_diff_eq!(env.value(0.0), 9.0, epsilon = 1e-15);
    }

    #[test]
    fn vacuum_is_exact_solution() {
        let p = ramp();
        for t in [-10.0, 0.0, 5.0, 42.0] {
            assert_eq!(full_rhs(&p, t, PhaseState::origin()), (0.0, 0.0));
        }
    }

    #[test]
    fn full_rhs_direct_substitution() {
        // kappa=1, K=1, delta=0, p=2, state (1,0) -> (1.5, -1)
        let p = ModelParams::new(1.0, 1.0, 0.0, PumpEnvelope::Constant { p0: 2.0 }).unwrap();
        let (dx, dy) = full_rhs(&p, 0.0, PhaseState::new(1.0, 0.0));
        assert_abs_diff_eq!(dx, 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(dy, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn hamiltonian_values() {
        assert_eq!(hamiltonian(0.0, 1.0, 1.5, PhaseState::origin()), 0.0);
        let s = PhaseState::new(1.5f64.sqrt(), -(1.5f64.sqrt()));
        assert_abs_diff_eq!(hamiltonian(0.0, 1.0, 1.5, s), 0.0, epsilon = 1e-14);
        let s = PhaseState::new(0.0, 1.5f64.sqrt());
        assert_abs_diff_eq!(hamiltonian(0.0, 1.0, 1.5, s), 0.5625, epsilon = 1e-14);
    }

    #[test]
    fn hamiltonian_rhs_matches_full_rhs_kappa_zero() {
        let p = ModelParams::new(0.0, 1.0, 0.3, PumpEnvelope::Constant { p0: 1.5 }).unwrap();
        for i in 0..100 {
            let x = -2.0 + 4.0 * (i as f64) / 99.0;
            let y = ((i * 37) % 100) as f64 / 25.0 - 2.0;
            let s = PhaseState::new(x, y);
            let a = hamiltonian_rhs(0.3, 1.0, 1.5, s);
            let b = full_rhs(&p, 0.0, s);
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-14);
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-14);
        }
    }

    #[test]
    fn hamiltonian_rhs_derived_point() {
        let s = PhaseState::new(0.0, 1.5f64.sqrt());
        let (dx, dy) = hamiltonian_rhs(0.0, 1.0, 1.5, s);
        let expect = 1.5f64.sqrt() * 1.5;
        assert_abs_diff_eq!(dx, expect, epsilon = 1e-14);
        assert_abs_diff_eq!(dy, -expect, epsilon = 1e-14);
    }

    #[test]
    fn frozen_equilibria_subcritical() {
        let p = ModelParams::new(1.0, 1.0, 0.0, PumpEnvelope::Constant { p0: 0.4 }).unwrap();
        let eq = frozen_full_equilibria(&p, 0.0).unwrap();
        assert_eq!(eq.len(), 1);
        assert_eq!(eq[0], PhaseState::origin());
    }

    #[test]
    fn frozen_equilibria_supercritical_residual() {
        let p = ModelParams::new(1.0, 1.0, 0.0, PumpEnvelope::Constant { p0: 2.5 }).unwrap();
        let eq = frozen_full_equilibria(&p, 0.0).unwrap();
        assert_eq!(eq.len(), 3);
        let r_expect = 6f64.powf(0.25);
        for s in &eq[1..] {
            assert_abs_diff_eq!(s.norm(), r_expect, epsilon = 1e-12);
            let (dx, dy) = full_rhs(&p, 0.0, *s);
            assert!((dx * dx + dy * dy).sqrt() < FROZEN_RESIDUAL_TOL);
        }
        // symmetric pair
        assert_abs_diff_eq!(eq[1].x, -eq[2].x, epsilon = 1e-15);
        assert_abs_diff_eq!(eq[1].y, -eq[2].y, epsilon = 1e-15);
    }

    #[test]
    fn frozen_equilibria_reject_detuned() {
        let p = ModelParams::new(1.0, 1.0, 0.1, PumpEnvelope::Constant { p0: 2.5 }).unwrap();
        assert!(frozen_full_equilibria(&p, 0.0).is_err());
    }

    #[test]
    fn frozen_equilibria_time_dependent_residual() {
        let p = ramp();
        for t in [4.5, 6.0, 10.0] {
            let eq = frozen_full_equilibria(&p, t).unwrap();
            for s in eq {
                let (dx, dy) = full_rhs(&p, t, s);
                assert!((dx * dx + dy * dy).sqrt() < FROZEN_RESIDUAL_TOL);
            }
        }
    }

    #[test]
    fn params_serde_roundtrip() {
        let p = ramp();
        let js = serde_json::to_string(&p).unwrap();
        assert!(js.contains("\"kappa\""));
        assert!(js.contains("\"K\""));
        assert!(js.contains("\"p_max\""));
        let back: ModelParams = serde_json::from_str(&js).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(1.0, 0.0, 0.0, PumpEnvelope::Constant { p0: 1.0 }).is_err());
        assert!(ModelParams::new(-0.1, 1.0, 0.0, PumpEnvelope::Constant { p0: 1.0 }).is_err());
        assert!(PumpEnvelope::Logistic { p_max: 1.0, gamma: 0.0, t_c: 0.0 }.validate().is_err());
        assert!(PumpEnvelope::GaussianGate { p0: 1.0, amp: -1.0, sigma: 0.3 }.validate().is_err());
    }

    proptest! {
        #[test]
        fn odd_symmetry(x in -3.0f64..3.0, y in -3.0f64..3.0, t in -5.0f64..15.0,
                        delta in -2.0f64..2.0) {
            let p = ModelParams::new(1.0, 1.0, delta,
                PumpEnvelope::Logistic { p_max: 2.5, gamma: 1.5, t_c: 5.0 }).unwrap();
            let s = PhaseState::new(x, y);
            let m = PhaseState::new(-x, -y);
            let (dx, dy) = full_rhs(&p, t, s);
            let (mx, my) = full_rhs(&p, t, m);
            prop_assert!((mx + dx).abs() < 1e-12 * (1.0 + dx.abs()));
            prop_assert!((my + dy).abs() < 1e-12 * (1.0 + dy.abs()));
        }

        #[test]
        fn logistic_monotone(t in -20.0f64..30.0, dt in 1e-6f64..5.0) {
            let env = PumpEnvelope::Logistic { p_max: 2.5, gamma: 1.5, t_c: 5.0 };
            prop_assert!(env.value(t + dt) >= env.value(t));
            // strictly monotone away from the float-saturated tail
            if t + dt <= 15.0 {
                prop_assert!(env.value(t + dt) > env.value(t));
            }
        }

        #[test]
        fn envelope_nonnegative(t in -50.0f64..50.0) {
            for env in [
                PumpEnvelope::Constant { p0: 0.7 },
                PumpEnvelope::Logistic { p_max: 2.5, gamma: 1.5, t_c: 5.0 },
                PumpEnvelope::GaussianGate { p0: 1.5, amp: 7.5, sigma: 0.3 },
            ] {
                prop_assert!(env.value(t) >= 0.0);
            }
        }
    }
}
