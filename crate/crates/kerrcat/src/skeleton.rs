//! Conservative resonant figure-eight skeleton: rotated-frame geometry,
//! lemniscate contour, the analytic homoclinic branch, and its lobe area.
//!
//! The homoclinic branch is stored in the orientation that solves the
//! Hamiltonian equations of motion forward in time,
//!
//! ```text
//! x_h(t) =  sqrt(p0/K) e^{-p0 t} sech(2 p0 t)
//! y_h(t) = -sqrt(p0/K) e^{ p0 t} sech(2 p0 t)
//! ```
//!
//! With this orientation the signed area `(1/2) int (x_h y_h' - y_h x_h') dt`
//! is negative and equals minus the geometric lobe area `p0/K`, which is the
//! constant offset the dissipative Melnikov term needs. The product
//! `x_h y_h = -(p0/K) sech^2(2 p0 t)` is orientation-independent.

use crate::model::PhaseState;
use crate::quad::adaptive_gk;
use crate::{KerrError, Result};
use std::f64::consts::FRAC_1_SQRT_2;

/// Analytic homoclinic branch of the resonant `H = 0` separatrix.
#[derive(Debug, Clone, Copy)]
pub struct HomoclinicOrbit {
    pub p0: f64,
    pub kerr: f64,
    amplitude: f64, // sqrt(p0/K)
}

impl HomoclinicOrbit {
    pub fn new(p0: f64, kerr: f64) -> Result<Self> {
        if !(p0 > 0.0) || !(kerr > 0.0) {
            return Err(KerrError::InvalidParameter(
                "homoclinic orbit requires p0 > 0 and K > 0".into(),
            ));
        }
        Ok(Self { p0, kerr, amplitude: (p0 / kerr).sqrt() })
    }

    /// Point on the orbit at parameter time `t`; overflow-safe for any
    /// finite `t` via max-exponent factoring.
    pub fn point(&self, t: f64) -> PhaseState {
        let a = self.p0 * t;
        // x = c * 2 / (e^{3a} + e^{-a}),  y = -c * 2 / (e^{a} + e^{-3a})
        let mx = (3.0 * a).max(-a);
        let x = 2.0 * (-mx).exp() / ((3.0 * a - mx).exp() + (-a - mx).exp());
        let my = a.max(-3.0 * a);
        let y = 2.0 * (-my).exp() / ((a - my).exp() + (-3.0 * a - my).exp());
        PhaseState::new(self.amplitude * x, -self.amplitude * y)
    }

    /// Closed-form orbit velocity `(x_h'(t), y_h'(t))`; agrees with the
    /// Hamiltonian vector field on the orbit.
    pub fn velocity(&self, t: f64) -> (f64, f64) {
        let a = self.p0 * t;
        // d/dt [2/(e^{3a}+e^{-a})] = -2 p0 (3 e^{3a} - e^{-a}) / (e^{3a}+e^{-a})^2
        let mx = (3.0 * a).max(-a);
        let (e3, em1) = ((3.0 * a - mx).exp(), (-a - mx).exp());
        let dx = -2.0 * self.p0 * (3.0 * e3 - em1) * (-mx).exp() / ((e3 + em1) * (e3 + em1));
        let my = a.max(-3.0 * a);
        let (e1, em3) = ((a - my).exp(), (-3.0 * a - my).exp());
        let dy = -2.0 * self.p0 * (e1 - 3.0 * em3) * (-my).exp() / ((e1 + em3) * (e1 + em3));
        (self.amplitude * dx, -self.amplitude * dy)
    }

    /// `x_h(t) * y_h(t) = -(p0/K) sech^2(2 p0 t)`; the factor entering the
    /// Melnikov pulse kernel. Orientation-independent.
    pub fn xy_product(&self, t: f64) -> f64 {
        let a = 2.0 * self.p0 * t;
        let sech = 2.0 / (a.exp() + (-a).exp());
        -(self.p0 / self.kerr) * sech * sech
    }

    /// Hamiltonian energy on the orbit; zero up to rounding.
    pub fn energy(&self, t: f64) -> f64 {
        crate::model::hamiltonian(0.0, self.kerr, self.p0, self.point(t))
    }

    /// Geometric area of one lobe, `p0/K`, consistent with the quadrature of
    /// the oriented line integral (which evaluates to minus this value).
    pub fn lobe_area(&self) -> f64 {
        self.p0 / self.kerr
    }

    /// Oriented line integral `(1/2) int (x_h y_h' - y_h x_h') dt` by
    /// quadrature over `t` in `[-20, 20]`; the independent check on
    /// [`Self::lobe_area`].
    pub fn signed_area_quadrature(&self) -> f64 {
        adaptive_gk(
            |t| {
                let s = self.point(t);
                let (dx, dy) = self.velocity(t);
                0.5 * (s.x * dy - s.y * dx)
            },
            -20.0,
            20.0,
            1e-10,
        )
    }
}

/// Symplectic rotated frame `(X, Y) = (1/sqrt(2)) (x + y, -x + y)`.
pub fn rotated_frame(s: PhaseState) -> (f64, f64) {
    (FRAC_1_SQRT_2 * (s.x + s.y), FRAC_1_SQRT_2 * (-s.x + s.y))
}

/// Inverse of [`rotated_frame`].
pub fn rotated_frame_inverse(big_x: f64, big_y: f64) -> PhaseState {
    PhaseState::new(FRAC_1_SQRT_2 * (big_x - big_y), FRAC_1_SQRT_2 * (big_x + big_y))
}

/// Radius of the `H = 0` lemniscate contour at polar angle `theta` in the
/// rotated frame: `R^2 = -(2 p0/K) cos 2theta`, defined where `cos 2theta <= 0`.
pub fn lemniscate_radius(p0: f64, kerr: f64, theta: f64) -> Option<f64> {
    let c = (2.0 * theta).cos();
    if c > 0.0 {
        None
    } else {
        Some((-(2.0 * p0 / kerr) * c).sqrt())
    }
}

/// Maximum lemniscate radius `sqrt(2 p0/K)`, attained at `theta = pi/2`.
pub fn lemniscate_radius_max(p0: f64, kerr: f64) -> f64 {
    (2.0 * p0 / kerr).sqrt()
}

/// Saddle (origin) and the two elliptic centers of the conservative skeleton.
/// Centers sit at `(0, +-sqrt(p0/K))` in the rotated frame.
pub struct SaddleCenters {
    pub saddle: PhaseState,
    pub centers_rotated: [(f64, f64); 2],
    pub centers: [PhaseState; 2],
}

pub fn saddle_centers(p0: f64, kerr: f64) -> Result<SaddleCenters> {
    if !(p0 > 0.0) || !(kerr > 0.0) {
        return Err(KerrError::InvalidParameter("saddle_centers requires p0, K > 0".into()));
    }
    let r = (p0 / kerr).sqrt();
    let rot = [(0.0, r), (0.0, -r)];
    Ok(SaddleCenters {
        saddle: PhaseState::origin(),
        centers_rotated: rot,
        centers: [rotated_frame_inverse(0.0, r), rotated_frame_inverse(0.0, -r)],
    })
}
