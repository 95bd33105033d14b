//! Linear stability of the vacuum trajectory: autonomous eigenvalues and
//! threshold, closed-form variational solutions under the logistic ramp, and
//! the two-regime classification of the ramped problem.

use crate::model::PumpEnvelope;
use crate::quad::softplus;
use crate::{KerrError, Result};
use serde::{Deserialize, Serialize};

/// An eigenvalue of the 2x2 vacuum Jacobian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Logistic ramp that never exceeds threshold; origin uniformly stable.
    UniformlyStable,
    /// Logistic ramp crossing threshold: critical direction flips type.
    ThresholdCrossing,
    AutonomousStable,
    AutonomousSaddle,
    /// Constant pump exactly at threshold.
    AutonomousCritical,
}

/// Outcome of the vacuum linear analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearClassification {
    pub regime: Regime,
    /// Unit vector of the critical direction (x-axis in the resonant case).
    pub critical_direction: (f64, f64),
    /// Jacobian eigenvalues; constant-pump case only.
    pub eigenvalues: Option<(Eigenvalue, Eigenvalue)>,
    /// Linearized threshold sqrt(delta^2 + (kappa/2)^2).
    pub p_c: f64,
    /// Time where p(t) = p_c; threshold-crossing ramps only.
    pub crossing_time: Option<f64>,
}

/// Eigenvalues of the vacuum Jacobian for a constant pump:
/// `lambda_pm = -kappa/2 +- sqrt(p0^2 - delta^2)`.
pub fn autonomous_eigenvalues(p0: f64, delta: f64, kappa: f64) -> (Eigenvalue, Eigenvalue) {
    let disc = p0 * p0 - delta * delta;
    if disc >= 0.0 {
        let s = disc.sqrt();
        (
            Eigenvalue { re: -0.5 * kappa + s, im: 0.0 },
            Eigenvalue { re: -0.5 * kappa - s, im: 0.0 },
        )
    } else {
        let s = (-disc).sqrt();
        (
            Eigenvalue { re: -0.5 * kappa, im: s },
            Eigenvalue { re: -0.5 * kappa, im: -s },
        )
    }
}

/// Linearized threshold `p_c = sqrt(delta^2 + (kappa/2)^2)`.
pub fn threshold(delta: f64, kappa: f64) -> f64 {
    (delta * delta + 0.25 * kappa * kappa).sqrt()
}

/// Integral of the logistic pump: `int_{t0}^{t} p(s) ds`, overflow-safe.
pub fn pump_integral(env: &PumpEnvelope, t0: f64, t: f64) -> Result<f64> {
    let PumpEnvelope::Logistic { p_max, gamma, t_c } = *env else {
        return Err(KerrError::Unsupported(
            "closed-form pump integral requires the Logistic envelope".into(),
        ));
    };
    // int p = p_max (t - t0) + (p_max/gamma) [ln(1+e^{-g(t-tc)}) - ln(1+e^{-g(t0-tc)})]
    let a = softplus(-gamma * (t - t_c));
    let b = softplus(-gamma * (t0 - t_c));
    Ok(p_max * (t - t0) + p_max / gamma * (a - b))
}

/// Closed-form exponent of the critical direction:
/// `int_{t0}^{t} (p(s) - kappa/2) ds` for the logistic ramp.
pub fn variational_exponent(env: &PumpEnvelope, kappa: f64, t0: f64, t: f64) -> Result<f64> {
    Ok(pump_integral(env, t0, t)? - 0.5 * kappa * (t - t0))
}

/// Closed-form variational solution `(xi(t), eta(t))` of the diagonal
/// linearized system under the logistic ramp.
pub fn variational_solution(
    env: &PumpEnvelope,
    kappa: f64,
    xi0: f64,
    eta0: f64,
    t0: f64,
    t: f64,
) -> Result<(f64, f64)> {
    let ip = pump_integral(env, t0, t)?;
    let damp = 0.5 * kappa * (t - t0);
    Ok((xi0 * (ip - damp).exp(), eta0 * (-ip - damp).exp()))
}

/// Classifies the vacuum linear type for constant or logistic envelopes.
pub fn classify(kappa: f64, delta: f64, env: &PumpEnvelope) -> Result<LinearClassification> {
    let p_c = threshold(delta, kappa);
    match *env {
        PumpEnvelope::Constant { p0 } => {
            let eig = autonomous_eigenvalues(p0, delta, kappa);
            // exact comparison: the critical case is measure-zero and users
            // probing it pass p0 = p_c exactly
            let regime = if p0 == p_c {
                Regime::AutonomousCritical
            } else if p0 < p_c {
                Regime::AutonomousStable
            } else {
                Regime::AutonomousSaddle
            };
            Ok(LinearClassification {
                regime,
                critical_direction: (1.0, 0.0),
                eigenvalues: Some(eig),
                p_c,
                crossing_time: None,
            })
        }
        PumpEnvelope::Logistic { p_max, gamma, t_c } => {
            if p_max > p_c {
                // invert p(t*) = p_c
                let t_star = t_c - (p_max / p_c - 1.0).ln() / gamma;
                Ok(LinearClassification {
                    regime: Regime::ThresholdCrossing,
                    critical_direction: (1.0, 0.0),
                    eigenvalues: None,
                    p_c,
                    crossing_time: Some(t_star),
                })
            } else {
                Ok(LinearClassification {
                    regime: Regime::UniformlyStable,
                    critical_direction: (1.0, 0.0),
                    eigenvalues: None,
                    p_c,
                    crossing_time: None,
                })
            }
        }
        PumpEnvelope::GaussianGate { .. } => Err(KerrError::Unsupported(
            "classification is defined for preparation-stage envelopes only".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odeint::{integrate, SolverSettings};
    use crate::quad::adaptive_gk;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ramp_env() -> PumpEnvelope {
        PumpEnvelope::Logistic { p_max: 2.5, gamma: 1.5, t_c: 5.0 }
    }

    #[test]
    fn eigenvalues_pure_damping() {
        let (lp, lm) = autonomous_eigenvalues(0.0, 0.0, 1.0);
        assert_eq!((lp.re, lp.im), (-0.5, 0.0));
        assert_eq!((lm.re, lm.im), (-0.5, 0.0));
    }

    #[test]
    fn eigenvalues_saddle() {
        let (lp, lm) = autonomous_eigenvalues(1.5, 0.0, 1.0);
        assert_abs_diff_eq!(lp.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lm.re, -2.0, epsilon = 1e-15);
    }

    #[test]
    fn eigenvalues_critical() {
        let (lp, lm) = autonomous_eigenvalues(0.5, 0.0, 1.0);
        assert_abs_diff_eq!(lp.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lm.re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn eigenvalues_complex_below_detuning() {
        let (lp, lm) = autonomous_eigenvalues(0.5, 1.0, 1.0);
        assert!(lp.im > 0.0);
        assert_eq!(lp.im, -lm.im);
        assert_eq!(lp.re, -0.5);
    }

    #[test]
    fn exponent_zero_at_t0() {
        let e = variational_exponent(&ramp_env(), 1.0, 3.0, 3.0).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn exponent_step_ramp_limit() {
        // gamma large: ramp becomes a step at t_c
        let env = PumpEnvelope::Logistic { p_max: 2.5, gamma: 400.0, t_c: 5.0 };
        let (t0, t) = (0.0, 12.0);
        let e = variational_exponent(&env, 1.0, t0, t).unwrap();
        let step = -0.5 * (5.0 - t0) + (2.5 - 0.5) * (t - 5.0);
        assert_abs_diff_eq!(e, step, epsilon = 1e-6);
    }

    #[test]
    fn exponent_matches_quadrature() {
        let env = ramp_env();
        let e = variational_exponent(&env, 1.0, 0.0, 12.0).unwrap();
        let q = adaptive_gk(|s| env.value(s) - 0.5, 0.0, 12.0, 1e-12);
        assert_abs_diff_eq!(e, q, epsilon = 1e-10);
    }

    #[test]
    fn exponent_overflow_safe() {
        let env = PumpEnvelope::Logistic { p_max: 2.5, gamma: 50.0, t_c: 5.0 };
        let e = variational_exponent(&env, 1.0, -100.0, 100.0).unwrap();
        assert!(e.is_finite());
    }

    #[test]
    fn variational_vacuum() {
        let (xi, eta) = variational_solution(&ramp_env(), 1.0, 0.0, 0.0, 0.0, 7.0).unwrap();
        assert_eq!((xi, eta), (0.0, 0.0));
    }

    #[test]
    fn eta_decay_bound() {
        let env = ramp_env();
        for i in 0..40 {
            let t = 0.25 * i as f64;
            let (_, eta) = variational_solution(&env, 1.0, 1.0, 0.7, 0.0, t).unwrap();
            assert!(eta.abs() <= 0.7 * (-0.5 * t).exp() + 1e-15);
        }
    }

    #[test]
    fn variational_agrees_with_odeint() {
        let env = ramp_env();
        let kappa = 1.0;
        let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
            let p = env.value(t);
            dy[0] = (p - 0.5 * kappa) * y[0];
            dy[1] = -(p + 0.5 * kappa) * y[1];
        };
        let settings = SolverSettings::with_tol(1e-10, 1e-13);
        let sol = integrate(&rhs, &[1e-3, 1e-3], 0.0, 12.0, &settings).unwrap();
        for (t, y) in sol.sample_uniform(48) {
            let (xi, eta) = variational_solution(&env, kappa, 1e-3, 1e-3, 0.0, t).unwrap();
            assert!((y[0] - xi).abs() <= 1e-6 * xi.abs().max(1e-12), "xi at t={t}");
            assert!((y[1] - eta).abs() <= 1e-6 * eta.abs().max(1e-14) + 1e-12, "eta at t={t}");
        }
    }

    #[test]
    fn classify_constant_stable() {
        let c = classify(1.0, 0.0, &PumpEnvelope::Constant { p0: 0.4 }).unwrap();
        assert_eq!(c.regime, Regime::AutonomousStable);
        assert_eq!(c.p_c, 0.5);
    }

    #[test]
    fn classify_constant_critical_exact() {
        let c = classify(1.0, 0.0, &PumpEnvelope::Constant { p0: 0.5 }).unwrap();
        assert_eq!(c.regime, Regime::AutonomousCritical);
    }

    #[test]
    fn classify_threshold_crossing_time() {
        let c = classify(1.0, 0.0, &ramp_env()).unwrap();
        assert_eq!(c.regime, Regime::ThresholdCrossing);
        let t_star = c.crossing_time.unwrap();
        assert_abs_diff_eq!(t_star, 5.0 - 4.0f64.ln() / 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ramp_env().value(t_star), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn classify_uniformly_stable() {
        let env = PumpEnvelope::Logistic { p_max: 0.4, gamma: 1.5, t_c: 5.0 };
        let c = classify(1.0, 0.0, &env).unwrap();
        assert_eq!(c.regime, Regime::UniformlyStable);
    }

    #[test]
    fn classify_rejects_gate() {
        let env = PumpEnvelope::GaussianGate { p0: 1.5, amp: 7.5, sigma: 0.3 };
        assert!(classify(1.0, 0.0, &env).is_err());
    }

    #[test]
    fn classify_consistent_with_eigenvalues() {
        for p0 in [0.1, 0.4, 0.6, 1.5, 3.0] {
            let c = classify(1.0, 0.0, &PumpEnvelope::Constant { p0 }).unwrap();
            let (lp, _) = c.eigenvalues.unwrap();
            assert_eq!(c.regime == Regime::AutonomousSaddle, lp.re > 0.0);
        }
    }

    proptest! {
        #[test]
        fn cocycle_additivity(t0 in -5.0f64..5.0, t1 in -5.0f64..15.0, t2 in -5.0f64..25.0) {
            let env = ramp_env();
            let a = variational_exponent(&env, 1.0, t0, t1).unwrap();
            let b = variational_exponent(&env, 1.0, t1, t2).unwrap();
            let c = variational_exponent(&env, 1.0, t0, t2).unwrap();
            prop_assert!((a + b - c).abs() < 1e-12 * (1.0 + c.abs()));
        }

        #[test]
        fn eta_nonincreasing(t in 0.0f64..20.0, dt in 0.0f64..5.0) {
            let env = ramp_env();
            let (_, e1) = variational_solution(&env, 1.0, 1.0, 1.0, 0.0, t).unwrap();
            let (_, e2) = variational_solution(&env, 1.0, 1.0, 1.0, 0.0, t + dt).unwrap();
            prop_assert!(e2.abs() <= e1.abs() + 1e-15);
        }
    }
}
