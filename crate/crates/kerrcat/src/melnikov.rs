//! Aperiodic Melnikov analysis of the gate pulse: the splitting function
//! `M(t0) = A G_sigma(t0) - kappa A_lobe`, its zeros, the maximum
//! `M_max(A, sigma)`, and the critical-amplitude curve `A_crit(sigma)`.

use crate::quad::trapezoid_uniform;
use crate::skeleton::HomoclinicOrbit;
use crate::{KerrError, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Half-width of the fixed quadrature window in orbit time; the integrand
/// decays like `exp(-2 p0 |t|)`, so truncation error is ~1e-26 for the
/// reference orbit.
pub const QUAD_WINDOW: f64 = 20.0;
/// Uniform trapezoid points on the quadrature window.
pub const QUAD_POINTS: usize = 4001;
/// Cross-section-time grid for curve sampling and maximization.
pub const T0_MIN: f64 = -2.0;
pub const T0_MAX: f64 = 2.0;
pub const T0_POINTS: usize = 801;
/// Default sigma grid of the threshold curve.
pub const SIGMA_MIN: f64 = 0.1;
pub const SIGMA_MAX: f64 = 1.0;
pub const SIGMA_POINTS: usize = 181;

const ZERO_REFINE_TOL: f64 = 1e-10;
const NON_SIMPLE_SLOPE_TOL: f64 = 1e-6;
const GOLDEN_TOL: f64 = 1e-8;

/// Pulse kernel `G_sigma(t0) = int pdot1(t + t0) x_h(t) y_h(t) dt` by
/// trapezoidal quadrature on the fixed window; the pulse derivative uses the
/// closed form `-((t + t0)/sigma^2) exp(-(t + t0)^2 / (2 sigma^2))`.
pub fn pulse_kernel_g(orbit: &HomoclinicOrbit, sigma: f64, t0: f64) -> f64 {
    assert!(sigma > 0.0, "pulse width must be positive");
    trapezoid_uniform(
        |t| {
            let tau = t + t0;
            let pdot = -(tau / (sigma * sigma)) * (-tau * tau / (2.0 * sigma * sigma)).exp();
            pdot * orbit.xy_product(t)
        },
        -QUAD_WINDOW,
        QUAD_WINDOW,
        QUAD_POINTS,
    )
}

/// Simplified Melnikov function `M(t0) = A G_sigma(t0) - kappa A_lobe`.
pub fn melnikov_m(orbit: &HomoclinicOrbit, kappa: f64, amp: f64, sigma: f64, t0: f64) -> f64 {
    amp * pulse_kernel_g(orbit, sigma, t0) - kappa * orbit.lobe_area()
}

/// Detuning contribution `-Delta int (x_h xdot_h + y_h ydot_h) dt`; a total
/// derivative, so the returned value is a cancellation check and satisfies
/// `|result| < 1e-8` for `|Delta| <= 10` on the reference orbit.
pub fn detuning_term(orbit: &HomoclinicOrbit, delta: f64) -> f64 {
    -delta
        * trapezoid_uniform(
            |t| {
                let s = orbit.point(t);
                let (vx, vy) = orbit.velocity(t);
                s.x * vx + s.y * vy
            },
            -QUAD_WINDOW,
            QUAD_WINDOW,
            QUAD_POINTS,
        )
}

/// A refined simple-zero record of the Melnikov curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MelnikovZero {
    pub t0: f64,
    /// Sign of `M'` at the zero: +1.0 or -1.0.
    pub slope_sign: f64,
    /// Set when `|M'(t0)|` falls below the simplicity tolerance.
    pub non_simple: bool,
}

/// Sampled Melnikov curve for one `(A, sigma)` pair with detected zeros.
#[derive(Debug, Clone, Serialize)]
pub struct MelnikovCurve {
    pub amp: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub lobe_area: f64,
    pub t0: Vec<f64>,
    pub m: Vec<f64>,
    pub zeros: Vec<MelnikovZero>,
}

impl MelnikovCurve {
    /// Samples `M(t0)` on the standard 801-point grid and refines all simple
    /// zeros by bisection.
    pub fn compute(orbit: &HomoclinicOrbit, kappa: f64, amp: f64, sigma: f64) -> Result<Self> {
        if sigma <= 0.0 {
            return Err(KerrError::InvalidParameter("sigma must be > 0".into()));
        }
        let t0: Vec<f64> = (0..T0_POINTS)
            .map(|i| T0_MIN + (T0_MAX - T0_MIN) * i as f64 / (T0_POINTS - 1) as f64)
            .collect();
        let m: Vec<f64> = t0
            .par_iter()
            .map(|&u| melnikov_m(orbit, kappa, amp, sigma, u))
            .collect();
        let zeros = find_zeros_on_grid(orbit, kappa, amp, sigma, &t0, &m);
        Ok(Self {
            amp,
            sigma,
            kappa,
            lobe_area: orbit.lobe_area(),
            t0,
            m,
            zeros,
        })
    }
}

/// Detects sign changes between adjacent samples and refines each by
/// bisection on [`melnikov_m`] to `|M| < 1e-10`; slope sign comes from the
/// bracketing samples and zeros with `|M'|` below 1e-6 are flagged
/// non-simple.
pub fn find_zeros_on_grid(
    orbit: &HomoclinicOrbit,
    kappa: f64,
    amp: f64,
    sigma: f64,
    t0: &[f64],
    m: &[f64],
) -> Vec<MelnikovZero> {
    let mut zeros = Vec::new();
    for i in 0..t0.len() - 1 {
        let (ma, mb) = (m[i], m[i + 1]);
        if ma == 0.0 {
            // grid point exactly on the zero set: handled as the left bracket
            zeros.push(refine_zero(orbit, kappa, amp, sigma, t0[i], t0[i + 1]));
            continue;
        }
        if ma * mb < 0.0 {
            zeros.push(refine_zero(orbit, kappa, amp, sigma, t0[i], t0[i + 1]));
        }
    }
    zeros
}

fn refine_zero(
    orbit: &HomoclinicOrbit,
    kappa: f64,
    amp: f64,
    sigma: f64,
    mut a: f64,
    mut b: f64,
) -> MelnikovZero {
    let f = |u: f64| melnikov_m(orbit, kappa, amp, sigma, u);
    let mut fa = f(a);
    let mut t0 = 0.5 * (a + b);
    for _ in 0..200 {
        t0 = 0.5 * (a + b);
        let fm = f(t0);
        if fm.abs() < ZERO_REFINE_TOL {
            break;
        }
        if fa * fm <= 0.0 {
            b = t0;
        } else {
            a = t0;
            fa = fm;
        }
    }
    let h = 1e-6;
    let slope = (f(t0 + h) - f(t0 - h)) / (2.0 * h);
    MelnikovZero {
        t0,
        slope_sign: slope.signum(),
        non_simple: slope.abs() < NON_SIMPLE_SLOPE_TOL,
    }
}

/// Maximizes a smooth scalar function over `[T0_MIN, T0_MAX]` by an
/// 801-point grid scan followed by golden-section refinement around the best
/// sample. Returns `(argmax, max)`.
fn grid_golden_max<F: Fn(f64) -> f64 + Sync>(f: F) -> (f64, f64) {
    let vals: Vec<(f64, f64)> = (0..T0_POINTS)
        .into_par_iter()
        .map(|i| {
            let u = T0_MIN + (T0_MAX - T0_MIN) * i as f64 / (T0_POINTS - 1) as f64;
            (u, f(u))
        })
        .collect();
    let best = vals
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    let mut a = vals[best.saturating_sub(1)].0;
    let mut b = vals[(best + 1).min(T0_POINTS - 1)].0;
    if a == b {
        return vals[best];
    }
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > GOLDEN_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    let t0 = 0.5 * (a + b);
    (t0, f(t0))
}

/// `M_max(A, sigma) = max_{t0} M(t0; A, sigma)`; grid scan plus
/// golden-section to 1e-8 in `t0`. Returns `(t0_argmax, value)`.
pub fn m_max(orbit: &HomoclinicOrbit, kappa: f64, amp: f64, sigma: f64) -> (f64, f64) {
    grid_golden_max(|u| melnikov_m(orbit, kappa, amp, sigma, u))
}

/// Maximum of the pulse kernel alone, for the threshold formula.
pub fn g_max(orbit: &HomoclinicOrbit, sigma: f64) -> (f64, f64) {
    grid_golden_max(|u| pulse_kernel_g(orbit, sigma, u))
}

/// Critical-amplitude curve `A_crit(sigma) = kappa A_lobe / max G_sigma`;
/// `a_crit[i]` is absent where `max G <= 0`.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdCurve {
    pub sigma: Vec<f64>,
    pub a_crit: Vec<Option<f64>>,
    pub kappa: f64,
    pub lobe_area: f64,
}

/// Computes the threshold curve on the given sigma grid; grid points are
/// independent and evaluated in parallel with index-ordered output.
pub fn threshold_curve(orbit: &HomoclinicOrbit, kappa: f64, sigma_grid: &[f64]) -> Result<ThresholdCurve> {
    if sigma_grid.iter().any(|&s| s <= 0.0) {
        return Err(KerrError::InvalidParameter("sigma grid must be positive".into()));
    }
    let lobe = orbit.lobe_area();
    let a_crit: Vec<Option<f64>> = sigma_grid
        .par_iter()
        .map(|&s| {
            let (_, gmax) = g_max(orbit, s);
            if gmax > 0.0 {
                Some(kappa * lobe / gmax)
            } else {
                None
            }
        })
        .collect();
    Ok(ThresholdCurve {
        sigma: sigma_grid.to_vec(),
        a_crit,
        kappa,
        lobe_area: lobe,
    })
}

/// The default 181-point uniform sigma grid on [0.1, 1.0].
pub fn default_sigma_grid() -> Vec<f64> {
    (0..SIGMA_POINTS)
        .map(|i| SIGMA_MIN + (SIGMA_MAX - SIGMA_MIN) * i as f64 / (SIGMA_POINTS - 1) as f64)
        .collect()
}
