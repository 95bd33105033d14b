//! Invariant-graph reduction near the vacuum: the cubic graph coefficient
//! `a3(t)`, the quintic reduced equation `x' = mu(t) x - b(t) x^5`, the exact
//! moving branches `+-rho(t)`, frozen reduced roots, and preparation
//! diagnostics (ramp-rate lag, branch convergence).

use crate::linear::variational_exponent;
use crate::model::{frozen_full_equilibria, ModelParams, PumpEnvelope, Trajectory};
use crate::odeint::{integrate, Method, SolverSettings};
use crate::quad::{adaptive_gk, softplus};
use crate::{KerrError, Result};

/// Configuration of the post-threshold forward branch construction.
#[derive(Debug, Clone, Copy)]
pub struct BranchConfig {
    /// Post-threshold reference time `T`.
    pub reference_time: f64,
    /// Initial coefficient value `a3(T)`.
    pub a3_init: f64,
    /// Reference initial value `w(T) = w_* > 0` of the branch solution.
    pub w_star: f64,
    /// Required lower bound on `q(t) = 4 p(t) - kappa` for `t >= T`.
    pub delta_margin: f64,
}

impl BranchConfig {
    /// Validates `q(T) >= delta_margin > 0` against the envelope.
    pub fn new(
        env: &PumpEnvelope,
        kappa: f64,
        reference_time: f64,
        a3_init: f64,
        w_star: f64,
        delta_margin: f64,
    ) -> Result<Self> {
        if !(delta_margin > 0.0) {
            return Err(KerrError::InvalidParameter("delta_margin must be > 0".into()));
        }
        if !(w_star > 0.0) {
            return Err(KerrError::InvalidParameter("w_star must be > 0".into()));
        }
        let q_t = 4.0 * env.value(reference_time) - kappa;
        if q_t < delta_margin {
            return Err(KerrError::InvalidParameter(format!(
                "q(T) = {q_t} below required margin {delta_margin}"
            )));
        }
        Ok(Self { reference_time, a3_init, w_star, delta_margin })
    }

    /// Default configuration: `T` is the time where the ramp is half
    /// saturated in `q` (`q(T) = 0.5 (4 p_max - kappa)`), `a3(T) = 0`,
    /// `w_* = b_inf / mu_inf`. Transients from these defaults are forgotten
    /// exponentially, so they only affect early post-threshold samples.
    pub fn defaults(env: &PumpEnvelope, kappa: f64, kerr: f64) -> Result<Self> {
        let PumpEnvelope::Logistic { p_max, gamma, t_c } = *env else {
            return Err(KerrError::Unsupported(
                "branch construction requires the Logistic envelope".into(),
            ));
        };
        if !(p_max > 0.5 * kappa) {
            return Err(KerrError::InvalidParameter(
                "branch construction requires a threshold-crossing ramp (p_max > kappa/2)".into(),
            ));
        }
        let q_inf = 4.0 * p_max - kappa;
        // invert p(T) = (0.5 q_inf + kappa) / 4
        let p_t = (0.5 * q_inf + kappa) / 4.0;
        let reference_time = t_c - (p_max / p_t - 1.0).ln() / gamma;
        let mu_inf = p_max - 0.5 * kappa;
        let b_inf = kerr / q_inf;
        Ok(Self {
            reference_time,
            a3_init: 0.0,
            w_star: b_inf / mu_inf,
            delta_margin: 0.5 * q_inf,
        })
    }
}

/// Asymptotic coefficient values of the saturated ramp.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticCoefficients {
    pub mu_inf: f64,
    pub a3_asy: f64,
    pub b_inf: f64,
}

pub fn asymptotic_coefficients(env: &PumpEnvelope, kappa: f64, kerr: f64) -> Result<AsymptoticCoefficients> {
    let PumpEnvelope::Logistic { p_max, .. } = *env else {
        return Err(KerrError::Unsupported("asymptotics require the Logistic envelope".into()));
    };
    let q_inf = 4.0 * p_max - kappa;
    Ok(AsymptoticCoefficients {
        mu_inf: p_max - 0.5 * kappa,
        a3_asy: -kerr / q_inf,
        b_inf: kerr / q_inf,
    })
}

/// Closed-form exponent `Q(t, s) = int_s^t (4 p(u) - kappa) du` of the
/// coefficient equation, overflow-safe.
pub fn exponent_q(env: &PumpEnvelope, kappa: f64, s: f64, t: f64) -> Result<f64> {
    let PumpEnvelope::Logistic { p_max, gamma, t_c } = *env else {
        return Err(KerrError::Unsupported("exponent Q requires the Logistic envelope".into()));
    };
    let a = softplus(-gamma * (t - t_c));
    let b = softplus(-gamma * (s - t_c));
    Ok((4.0 * p_max - kappa) * (t - s) + 4.0 * p_max / gamma * (a - b))
}

/// Exact forward solution of the coefficient equation
/// `a3' + (4 p(t) - kappa) a3 = -K` by variation of constants; the integral
/// is evaluated with adaptive Gauss-Kronrod quadrature.
pub fn a3_forward(
    config: &BranchConfig,
    env: &PumpEnvelope,
    kappa: f64,
    kerr: f64,
    t: f64,
) -> Result<f64> {
    let t_ref = config.reference_time;
    if t < t_ref {
        return Err(KerrError::InvalidParameter(format!(
            "a3_forward requires t >= T = {t_ref}, got {t}"
        )));
    }
    let homogeneous = (-exponent_q(env, kappa, t_ref, t)?).exp() * config.a3_init;
    // integrand exp(-Q(t, tau)) is smooth and exponentially localized at tau = t
    let forced = adaptive_gk(
        |tau| (-exponent_q(env, kappa, tau, t).unwrap()).exp(),
        t_ref,
        t,
        1e-12,
    );
    Ok(homogeneous - kerr * forced)
}

/// Right-hand side of the reduced quintic equation.
pub fn reduced_rhs(mu: f64, b: f64, x: f64) -> f64 {
    mu * x - b * x.powi(5)
}

/// Exact variation-of-constants solution of `w' = -4 mu(t) w + 4 b(t)` with
/// `w(T) = w_*`; `b` comes from [`a3_forward`]. Positive for all `t >= T`.
pub fn branch_w(
    config: &BranchConfig,
    env: &PumpEnvelope,
    kappa: f64,
    kerr: f64,
    t: f64,
) -> Result<f64> {
    let t_ref = config.reference_time;
    if t < t_ref {
        return Err(KerrError::InvalidParameter(format!(
            "branch_w requires t >= T = {t_ref}, got {t}"
        )));
    }
    let decay = (-4.0 * variational_exponent(env, kappa, t_ref, t)?).exp();
    let forced = adaptive_gk(
        |tau| {
            let b = -kerr * a3_forward(config, env, kappa, kerr, tau).unwrap();
            4.0 * b * (-4.0 * variational_exponent(env, kappa, tau, t).unwrap()).exp()
        },
        t_ref,
        t,
        1e-12,
    );
    Ok(config.w_star * decay + forced)
}

/// Moving branch `sign * w(t)^{-1/4}`.
pub fn moving_branch(
    config: &BranchConfig,
    env: &PumpEnvelope,
    kappa: f64,
    kerr: f64,
    t: f64,
    sign: f64,
) -> Result<f64> {
    let w = branch_w(config, env, kappa, kerr, t)?;
    Ok(sign.signum() * w.powf(-0.25))
}

/// Instantaneous algebraic roots `+-(mu/b)^{1/4}` of the reduced equation;
/// absent when `mu <= 0` or `b <= 0`.
pub fn frozen_reduced_roots(mu: f64, b: f64) -> Option<f64> {
    if mu > 0.0 && b > 0.0 {
        Some((mu / b).powf(0.25))
    } else {
        None
    }
}

/// Sampled reduced coefficients on a uniform grid over `[T, t_end]`,
/// with Hermite interpolation of `b(t)` for trajectory integration.
///
/// The table is built by integrating the coefficient ODE directly at tight
/// tolerance; [`a3_forward`] provides the independent quadrature route the
/// tests compare against.
#[derive(Debug, Clone)]
pub struct ReducedCoefficients {
    pub ts: Vec<f64>,
    pub mu: Vec<f64>,
    pub a3: Vec<f64>,
    pub b: Vec<f64>,
    /// d(a3)/dt from the coefficient ODE, for Hermite interpolation.
    pub da3: Vec<f64>,
    pub asymptotic: AsymptoticCoefficients,
    kappa: f64,
    kerr: f64,
    env: PumpEnvelope,
}

impl ReducedCoefficients {
    pub fn sample(
        config: &BranchConfig,
        env: &PumpEnvelope,
        kappa: f64,
        kerr: f64,
        t_end: f64,
        n: usize,
    ) -> Result<Self> {
        let t_ref = config.reference_time;
        if t_end <= t_ref || n < 2 {
            return Err(KerrError::InvalidParameter("need t_end > T and n >= 2".into()));
        }
        let rhs_a3 = |t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = -kerr - (4.0 * env.value(t) - kappa) * y[0];
        };
        let settings = SolverSettings {
            rtol: 1e-12,
            atol: 1e-14,
            max_step: 0.25,
            ..SolverSettings::default()
        };
        let sol = integrate(&rhs_a3, &[config.a3_init], t_ref, t_end, &settings)?;
        let ts: Vec<f64> = (0..n)
            .map(|i| t_ref + (t_end - t_ref) * i as f64 / (n - 1) as f64)
            .collect();
        let a3: Vec<f64> = ts.iter().map(|&t| sol.sample(t)[0]).collect();
        let mu: Vec<f64> = ts.iter().map(|&t| env.value(t) - 0.5 * kappa).collect();
        let b: Vec<f64> = a3.iter().map(|&a| -kerr * a).collect();
        let da3: Vec<f64> = ts
            .iter()
            .zip(a3.iter())
            .map(|(&t, &a)| -kerr - (4.0 * env.value(t) - kappa) * a)
            .collect();
        Ok(Self {
            ts,
            mu,
            a3,
            b,
            da3,
            asymptotic: asymptotic_coefficients(env, kappa, kerr)?,
            kappa,
            kerr,
            env: *env,
        })
    }

    /// Hermite-interpolated `b(t)`; clamps to the table ends.
    pub fn b_at(&self, t: f64) -> f64 {
        let ts = &self.ts;
        if t <= ts[0] {
            return self.b[0];
        }
        if t >= ts[ts.len() - 1] {
            return self.b[ts.len() - 1];
        }
        let i = ts.partition_point(|&u| u <= t) - 1;
        let h = ts[i + 1] - ts[i];
        let s = (t - ts[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let a0 = self.a3[i];
        let a1 = self.a3[i + 1];
        let d0 = self.da3[i];
        let d1 = self.da3[i + 1];
        let a = (2.0 * s3 - 3.0 * s2 + 1.0) * a0
            + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * a1
            + (s3 - s2) * h * d1;
        -self.kerr * a
    }

    pub fn mu_at(&self, t: f64) -> f64 {
        self.env.value(t) - 0.5 * self.kappa
    }
}

/// Integrates the reduced quintic equation from `x0` at `T` to `t_end`,
/// returning the sampled scalar path.
pub fn reduced_trajectory(
    coeffs: &ReducedCoefficients,
    x0: f64,
    t_end: f64,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = reduced_rhs(coeffs.mu_at(t), coeffs.b_at(t), y[0]);
    };
    let settings = SolverSettings { rtol: 1e-10, atol: 1e-12, ..SolverSettings::default() };
    let sol = integrate(&rhs, &[x0], coeffs.ts[0], t_end, &settings)?;
    Ok(sol.sample_uniform(n_samples).into_iter().map(|(t, y)| (t, y[0])).collect())
}

/// Dynamic lag `|x(t) - x_eq(t)|` between a full-system trajectory and the
/// frozen full-system equilibrium branch on the same side; the frozen root
/// is taken as 0 below threshold.
pub fn lag_metric(trajectory: &Trajectory, params: &ModelParams) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(trajectory.samples.len());
    for &(t, s) in &trajectory.samples {
        let eq = frozen_full_equilibria(params, t)?;
        // nonzero pair present => index 1 is the positive-x branch
        let x_eq = if eq.len() > 1 {
            if s.x >= 0.0 {
                eq[1].x
            } else {
                eq[2].x
            }
        } else {
            0.0
        };
        out.push((t, (s.x - x_eq).abs()));
    }
    Ok(out)
}

/// Integrates the full planar system under a ramp from a near-vacuum seed
/// and returns the trajectory on a uniform output grid.
pub fn full_preparation_trajectory(
    params: &ModelParams,
    x0: f64,
    y0: f64,
    t0: f64,
    t1: f64,
    n_samples: usize,
    stiff: bool,
) -> Result<Trajectory> {
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let (dx, dyv) = crate::model::full_rhs(params, t, crate::model::PhaseState::new(y[0], y[1]));
        dy[0] = dx;
        dy[1] = dyv;
    };
    let settings = SolverSettings {
        rtol: 1e-10,
        atol: 1e-12,
        method: if stiff { Method::TrBdf2 } else { Method::DormandPrince },
        ..SolverSettings::default()
    };
    let sol = integrate(&rhs, &[x0, y0], t0, t1, &settings)?;
    let samples = sol
        .sample_uniform(n_samples)
        .into_iter()
        .map(|(t, y)| (t, crate::model::PhaseState::new(y[0], y[1])))
        .collect();
    Ok(Trajectory::new(samples, *params, crate::model::PhaseState::new(x0, y0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ramp_env() -> PumpEnvelope {
        PumpEnvelope::Logistic { p_max: 2.5, gamma: 1.5, t_c: 5.0 }
    }

    fn default_cfg() -> BranchConfig {
        BranchConfig::defaults(&ramp_env(), 1.0, 1.0).unwrap()
    }

    #[test]
    fn default_reference_time_half_saturated() {
        let cfg = default_cfg();
        let q = 4.0 * ramp_env().value(cfg.reference_time) - 1.0;
        assert_abs_diff_eq!(q, 4.5, epsilon = 1e-12);
        assert_abs_diff_eq!(cfg.delta_margin, 4.5, epsilon = 1e-12);
    }

    #[test]
    fn config_rejects_premature_reference_time() {
        // T = 0 is far below threshold for the reference ramp
        assert!(BranchConfig::new(&ramp_env(), 1.0, 0.0, 0.0, 0.1, 4.5).is_err());
        assert!(BranchConfig::new(&ramp_env(), 1.0, 8.0, 0.0, -0.1, 4.5).is_err());
    }

    #[test]
    fn q_exponent_zero_and_cocycle() {
        let env = ramp_env();
        assert_eq!(exponent_q(&env, 1.0, 3.0, 3.0).unwrap(), 0.0);
        let (t0, t1, t2) = (2.0, 6.5, 11.0);
        let a = exponent_q(&env, 1.0, t0, t1).unwrap();
        let b = exponent_q(&env, 1.0, t1, t2).unwrap();
        let c = exponent_q(&env, 1.0, t0, t2).unwrap();
        assert_abs_diff_eq!(a + b, c, epsilon = 1e-12);
    }

    #[test]
    fn q_exponent_matches_quadrature() {
        let env = ramp_env();
        let q = exponent_q(&env, 1.0, 5.0, 10.0).unwrap();
        let num = adaptive_gk(|s| 4.0 * env.value(s) - 1.0, 5.0, 10.0, 1e-12);
        assert_abs_diff_eq!(q, num, epsilon = 1e-10);
    }

    #[test]
    fn a3_pure_decay_for_zero_kerr() {
        let cfg = BranchConfig::new(&ramp_env(), 1.0, 6.0, -0.5, 0.1, 1.0).unwrap();
        let env = ramp_env();
        let t = 8.0;
        let a = a3_forward(&cfg, &env, 1.0, 0.0, t).unwrap();
        let expect = (-exponent_q(&env, 1.0, 6.0, t).unwrap()).exp() * -0.5;
        assert_abs_diff_eq!(a, expect, epsilon = 1e-12);
    }

    #[test]
    fn a3_asymptote() {
        let cfg = default_cfg();
        let env = ramp_env();
        let a = a3_forward(&cfg, &env, 1.0, 1.0, cfg.reference_time + 15.0).unwrap();
        assert!((a - (-1.0 / 9.0)).abs() < 1e-6, "a3 = {a}");
    }

    #[test]
    fn a3_rejects_pre_reference_time() {
        let cfg = default_cfg();
        assert!(a3_forward(&cfg, &ramp_env(), 1.0, 1.0, cfg.reference_time - 0.1).is_err());
    }

    #[test]
    fn a3_contraction_forgets_initialization() {
        let env = ramp_env();
        let t_ref = default_cfg().reference_time;
        let delta = default_cfg().delta_margin;
        let c0 = BranchConfig::new(&env, 1.0, t_ref, 0.0, 0.1, delta).unwrap();
        let c1 = BranchConfig::new(&env, 1.0, t_ref, -1.0, 0.1, delta).unwrap();
        for dt in [0.5, 1.0, 2.0, 4.0] {
            let d = (a3_forward(&c0, &env, 1.0, 1.0, t_ref + dt).unwrap()
                - a3_forward(&c1, &env, 1.0, 1.0, t_ref + dt).unwrap())
            .abs();
            assert!(d <= (-delta * dt).exp() * 1.0 + 1e-14, "dt={dt} d={d}");
        }
    }

    #[test]
    fn a3_satisfies_coefficient_ode() {
        let cfg = default_cfg();
        let env = ramp_env();
        let t = cfg.reference_time + 3.0;
        let h = 1e-5;
        let da = (a3_forward(&cfg, &env, 1.0, 1.0, t + h).unwrap()
            - a3_forward(&cfg, &env, 1.0, 1.0, t - h).unwrap())
            / (2.0 * h);
        let a = a3_forward(&cfg, &env, 1.0, 1.0, t).unwrap();
        let residual = da + (4.0 * env.value(t) - 1.0) * a + 1.0;
        assert!(residual.abs() < 1e-8, "residual {residual}");
    }

    #[test]
    fn reduced_rhs_roots_and_symmetry() {
        assert_eq!(reduced_rhs(2.0, 1.0 / 9.0, 0.0), 0.0);
        let x_eq = (2.0f64 / (1.0 / 9.0)).powf(0.25);
        assert!(reduced_rhs(2.0, 1.0 / 9.0, x_eq).abs() < 1e-12);
        assert_eq!(reduced_rhs(2.0, 0.1, -0.7), -reduced_rhs(2.0, 0.1, 0.7));
    }

    #[test]
    fn branch_w_contraction() {
        let env = ramp_env();
        let base = default_cfg();
        let c1 = BranchConfig { w_star: 0.02, ..base };
        let c2 = BranchConfig { w_star: 0.9, ..base };
        let t = base.reference_time + 2.0;
        let d = (branch_w(&c1, &env, 1.0, 1.0, t).unwrap()
            - branch_w(&c2, &env, 1.0, 1.0, t).unwrap())
        .abs();
        let bound = (0.9 - 0.02)
            * (-4.0 * variational_exponent(&env, 1.0, base.reference_time, t).unwrap()).exp();
        assert_abs_diff_eq!(d, bound, epsilon = 1e-9);
    }

    #[test]
    fn branch_w_asymptote_and_positivity() {
        let cfg = default_cfg();
        let env = ramp_env();
        for dt in [0.0, 1.0, 5.0, 15.0] {
            let w = branch_w(&cfg, &env, 1.0, 1.0, cfg.reference_time + dt).unwrap();
            assert!(w > 0.0);
        }
        let w_inf = branch_w(&cfg, &env, 1.0, 1.0, cfg.reference_time + 15.0).unwrap();
        assert!((w_inf - 1.0 / 18.0).abs() < 1e-6, "w = {w_inf}");
    }

    #[test]
    fn moving_branch_limit_and_symmetry() {
        let cfg = default_cfg();
        let env = ramp_env();
        let t = cfg.reference_time + 15.0;
        let rho = moving_branch(&cfg, &env, 1.0, 1.0, t, 1.0).unwrap();
        assert!((rho - 18f64.powf(0.25)).abs() < 1e-3, "rho = {rho}");
        let neg = moving_branch(&cfg, &env, 1.0, 1.0, t, -1.0).unwrap();
        assert_abs_diff_eq!(rho, -neg, epsilon = 1e-14);
    }

    #[test]
    fn moving_branch_solves_reduced_equation() {
        let cfg = default_cfg();
        let env = ramp_env();
        let t = cfg.reference_time + 2.0;
        let h = 1e-4;
        let rp = moving_branch(&cfg, &env, 1.0, 1.0, t + h, 1.0).unwrap();
        let rm = moving_branch(&cfg, &env, 1.0, 1.0, t - h, 1.0).unwrap();
        let drho = (rp - rm) / (2.0 * h);
        let rho = moving_branch(&cfg, &env, 1.0, 1.0, t, 1.0).unwrap();
        let mu = env.value(t) - 0.5;
        let b = -a3_forward(&cfg, &env, 1.0, 1.0, t).unwrap();
        assert!((drho - reduced_rhs(mu, b, rho)).abs() < 1e-6);
    }

    #[test]
    fn frozen_roots_values() {
        let r = frozen_reduced_roots(2.0, 1.0 / 9.0).unwrap();
        assert_abs_diff_eq!(r, 18f64.powf(0.25), epsilon = 1e-12);
        assert!(frozen_reduced_roots(-0.1, 0.1).is_none());
        assert!(frozen_reduced_roots(0.0, 0.1).is_none());
        assert!(frozen_reduced_roots(1.0, 0.0).is_none());
    }

    #[test]
    fn frozen_roots_agree_with_branch_after_saturation() {
        let cfg = default_cfg();
        let env = ramp_env();
        let t = cfg.reference_time + 15.0;
        let mu = env.value(t) - 0.5;
        let b = -a3_forward(&cfg, &env, 1.0, 1.0, t).unwrap();
        let root = frozen_reduced_roots(mu, b).unwrap();
        let rho = moving_branch(&cfg, &env, 1.0, 1.0, t, 1.0).unwrap();
        assert!((root - rho).abs() < 1e-4);
    }

    #[test]
    fn coefficient_table_matches_quadrature_route() {
        let cfg = default_cfg();
        let env = ramp_env();
        let table =
            ReducedCoefficients::sample(&cfg, &env, 1.0, 1.0, cfg.reference_time + 12.0, 600)
                .unwrap();
        for dt in [0.7, 3.3, 9.1] {
            let t = cfg.reference_time + dt;
            let b_quad = -a3_forward(&cfg, &env, 1.0, 1.0, t).unwrap();
            assert!((table.b_at(t) - b_quad).abs() < 1e-8, "dt={dt}");
        }
        assert_abs_diff_eq!(table.asymptotic.a3_asy, -1.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(table.asymptotic.mu_inf, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn reduced_trajectories_sign_preserved_and_converge() {
        let cfg = default_cfg();
        let env = ramp_env();
        let t_end = cfg.reference_time + 10.0;
        let table = ReducedCoefficients::sample(&cfg, &env, 1.0, 1.0, t_end, 2000).unwrap();
        for x0 in [0.1, -0.1] {
            let path = reduced_trajectory(&table, x0, t_end, 200).unwrap();
            assert!(path.iter().all(|&(_, x)| x.signum() == x0.signum()));
            let (tf, xf) = *path.last().unwrap();
            let rho = moving_branch(&cfg, &env, 1.0, 1.0, tf, x0.signum()).unwrap();
            assert!((xf - rho).abs() < 1e-4, "x0={x0}: x={xf} rho={rho}");
        }
    }

    #[test]
    fn a3_eventually_negative() {
        let cfg = default_cfg();
        let env = ramp_env();
        // a3(T) = +0.5 starts positive; must turn negative and stay so
        let c = BranchConfig { a3_init: 0.5, ..cfg };
        let mut t1 = None;
        for i in 0..=100 {
            let t = cfg.reference_time + 10.0 * i as f64 / 100.0;
            let a = a3_forward(&c, &env, 1.0, 1.0, t).unwrap();
            if a < 0.0 && t1.is_none() {
                t1 = Some(t);
            }
            if let Some(_) = t1 {
                assert!(a < 0.0, "a3 re-crossed zero at t={t}");
            }
        }
        assert!(t1.is_some());
    }

    #[test]
    fn lag_metric_vacuum_equals_frozen_root() {
        // trajectory pinned at the origin: lag equals the frozen-root magnitude
        let params = ModelParams::reference_ramp();
        let samples: Vec<_> = (0..50)
            .map(|i| (0.4 * i as f64, crate::model::PhaseState::origin()))
            .collect();
        let traj = Trajectory::new(samples, params, crate::model::PhaseState::origin());
        let lag = lag_metric(&traj, &params).unwrap();
        for (t, l) in lag {
            let eq = frozen_full_equilibria(&params, t).unwrap();
            let expect = if eq.len() > 1 { eq[1].x } else { 0.0 };
            assert_abs_diff_eq!(l, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn peak_lag_increases_with_ramp_rate() {
        let mut peaks = Vec::new();
        for gamma in [0.5, 1.5, 4.0] {
            let params = ModelParams::new(
                1.0,
                1.0,
                0.0,
                PumpEnvelope::Logistic { p_max: 2.5, gamma, t_c: 5.0 },
            )
            .unwrap();
            let traj =
                full_preparation_trajectory(&params, 1e-3, 0.0, 0.0, 20.0, 1500, false).unwrap();
            let lag = lag_metric(&traj, &params).unwrap();
            peaks.push(lag.iter().map(|&(_, l)| l).fold(0.0, f64::max));
        }
        assert!(peaks[0] < peaks[1] && peaks[1] < peaks[2], "peaks {peaks:?}");
    }
}
