//! Splitting of the half-plane Poisson kernel into a clamped far part and a
//! compactly supported near part.
//!
//! For a radius `R` and angle `theta*` the evaluation point is
//! `(x*, y*) = R (cos theta*, sin theta*)` and the split width is
//! `delta = R - |x*|`. Then
//!
//! ```text
//! P1(t, y) = min(P(t, y), P(delta, y))
//! P2(t, y) = P(t, y) - P(delta, y)   for |t| < delta, else 0
//! ```
//!
//! `P1` is a sub-convex mixture of normalized interval indicators with
//! density `phi_y(a) = -2a d/da P1(a, y)` on `a > delta`, which is what makes
//! the far part controllable by the Hardy–Littlewood maximal function.

use std::f64::consts::{FRAC_1_PI, FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func_model::SimpleFunction;
use crate::quadrature::{integrate, integrate_real, QuadConfig};

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::param(name, v, "must be positive and finite"));
    }
    Ok(())
}

fn kernel(t: f64, y: f64) -> f64 {
    y / (PI * (y * y + t * t))
}

/// `P(t, y) = y / (pi (y^2 + t^2))`.
pub fn poisson_kernel(t: f64, y: f64) -> Result<f64> {
    check_positive("y", y)?;
    if !t.is_finite() {
        return Err(Error::NonFinite("t"));
    }
    Ok(kernel(t, y))
}

fn check_split(t: f64, y: f64, delta: f64) -> Result<()> {
    check_positive("y", y)?;
    check_positive("delta", delta)?;
    if !t.is_finite() {
        return Err(Error::NonFinite("t"));
    }
    Ok(())
}

/// Far part `min(P(t, y), P(delta, y))`.
pub fn p1(t: f64, y: f64, delta: f64) -> Result<f64> {
    check_split(t, y, delta)?;
    Ok(p1_raw(t, y, delta))
}

/// Near part, supported on `|t| < delta`.
pub fn p2(t: f64, y: f64, delta: f64) -> Result<f64> {
    check_split(t, y, delta)?;
    Ok(p2_raw(t, y, delta))
}

fn p1_raw(t: f64, y: f64, delta: f64) -> f64 {
    if t.abs() < delta {
        kernel(delta, y)
    } else {
        kernel(t, y)
    }
}

fn p2_raw(t: f64, y: f64, delta: f64) -> f64 {
    if t.abs() < delta {
        kernel(t, y) - kernel(delta, y)
    } else {
        0.0
    }
}

fn phi_raw(a: f64, y: f64) -> f64 {
    let s = y * y + a * a;
    4.0 * FRAC_1_PI * a * a * y / (s * s)
}

/// Mixing density `phi_y(a) = (4/pi) a^2 y / (y^2 + a^2)^2`, defined for `a > delta`.
pub fn phi(a: f64, y: f64, delta: f64) -> Result<f64> {
    check_split(a, y, delta)?;
    if a <= delta {
        return Err(Error::param("a", a, "phi is defined only for a > delta"));
    }
    Ok(phi_raw(a, y))
}

/// Right limit of `phi` at `a = delta`, for plotting.
pub fn phi_right_limit(y: f64, delta: f64) -> Result<f64> {
    check_positive("y", y)?;
    check_positive("delta", delta)?;
    Ok(phi_raw(delta, y))
}

/// Total mass of `phi` over `(delta, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiMass {
    /// `2 delta P(delta, y) + 1 - (2/pi) arctan(delta / y)`.
    pub mass: f64,
    /// `1 - mass`, computed without cancellation; strictly positive.
    pub deficit: f64,
    /// Independent quadrature of the density.
    pub quadrature: f64,
}

/// `(2/pi) (arctan u - u / (1 + u^2))`, the gap between the mass and 1.
fn mass_deficit(u: f64) -> f64 {
    let d = if u < 0.1 {
        // sum_{k>=1} (-1)^{k+1} 2k/(2k+1) u^{2k+1}
        let u2 = u * u;
        let mut term = u * u2;
        let mut acc = 0.0;
        for k in 1..16 {
            let kf = k as f64;
            let c = 2.0 * kf / (2.0 * kf + 1.0);
            acc += if k % 2 == 1 { c * term } else { -c * term };
            term *= u2;
        }
        acc
    } else {
        u.atan() - u / (1.0 + u * u)
    };
    2.0 * FRAC_1_PI * d
}

pub fn phi_mass(y: f64, delta: f64) -> Result<PhiMass> {
    check_positive("y", y)?;
    check_positive("delta", delta)?;
    let u = delta / y;
    let deficit = mass_deficit(u);
    // 2 delta P(delta, y) + (2/pi) arctan(y / delta); near 1 it is taken from
    // the deficit so that it never rounds above 1
    let mass = if deficit < 0.5 {
        1.0 - deficit
    } else {
        2.0 * FRAC_1_PI * (u / (1.0 + u * u) + (1.0 / u).atan())
    };
    // a = y tan(s) maps (delta, inf) onto (arctan(delta/y), pi/2)
    let s0 = u.atan();
    let (quadrature, _) = integrate_real(
        |s| {
            let c = s.cos();
            phi_raw(y * s.tan(), y) * y / (c * c)
        },
        &[s0, FRAC_PI_2],
        &QuadConfig::relative(1e-13, 1e-15),
    )?;
    Ok(PhiMass {
        mass,
        deficit,
        quadrature,
    })
}

/// `|P1(t, y) - integral_{max(delta,|t|)}^inf phi_y(a) / (2a) da|` with the
/// integral done by quadrature up to `a_max` (where `P(a_max, y) < 1e-12`)
/// and the remainder `P(a_max, y)` added analytically.
pub fn decomp_residual(t: f64, y: f64, delta: f64) -> Result<f64> {
    check_split(t, y, delta)?;
    let lower = delta.max(t.abs());
    let reach = (y * FRAC_1_PI * 1e12 - y * y).max(0.0).sqrt();
    let a_max = (2.0 * lower).max(2.0 * reach).max(4.0 * y);
    let tail = kernel(a_max, y);
    // a = e^s turns phi/(2a) da into phi/2 ds
    let (s0, s1) = (lower.ln(), a_max.ln());
    let mut pts = vec![s0, s1];
    let peak = y.ln();
    if peak > s0 && peak < s1 {
        pts.push(peak);
    }
    let (body, _) = integrate_real(
        |s| 0.5 * phi_raw(s.exp(), y),
        &pts,
        &QuadConfig::relative(1e-13, 1e-16),
    )?;
    Ok((p1_raw(t, y, delta) - (body + tail)).abs())
}

/// Radius, maximizing angle and the derived split quantities at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitGeometry {
    pub r: f64,
    pub theta_star: f64,
    pub x_star: f64,
    pub y_star: f64,
    pub delta: f64,
    /// True when `theta*` lies in `(pi/2, pi)` and the mirrored branch is used.
    pub reflected: bool,
}

impl SplitGeometry {
    /// Geometry for `theta*` in `(0, pi/2]`.
    pub fn new(r: f64, theta_star: f64) -> Result<Self> {
        if !(theta_star > 0.0 && theta_star <= FRAC_PI_2) {
            return Err(Error::param(
                "theta_star",
                theta_star,
                "must lie in (0, pi/2]; use from_angle for the reflected branch",
            ));
        }
        SplitGeometry::from_angle(r, theta_star)
    }

    /// Geometry for any `theta*` in `(0, pi)`. On `(pi/2, pi)` the split is
    /// the mirror image of the one at `pi - theta*`: `x*` changes sign and
    /// `delta = R - |x*|`.
    pub fn from_angle(r: f64, theta_star: f64) -> Result<Self> {
        check_positive("r", r)?;
        if !(theta_star > 0.0 && theta_star < PI) {
            return Err(Error::param(
                "theta_star",
                theta_star,
                "must lie in (0, pi)",
            ));
        }
        let reflected = theta_star > FRAC_PI_2;
        let reduced = if reflected {
            PI - theta_star
        } else {
            theta_star
        };
        let half = 0.5 * reduced;
        let sh = half.sin();
        // R - R cos(theta) = 2 R sin^2(theta/2)
        let delta = 2.0 * r * sh * sh;
        let y_star = r * reduced.sin();
        let x_abs = r * reduced.cos();
        Ok(SplitGeometry {
            r,
            theta_star,
            x_star: if reflected { -x_abs } else { x_abs },
            y_star,
            delta,
            reflected,
        })
    }

    /// Mirror image `theta* -> pi - theta*`.
    pub fn reflect(&self) -> Result<Self> {
        SplitGeometry::from_angle(self.r, PI - self.theta_star)
    }

    /// Relative defect of `y*^2 + delta^2 = 2 R delta`.
    pub fn identity_defect(&self) -> f64 {
        let lhs = self.y_star * self.y_star + self.delta * self.delta;
        let rhs = 2.0 * self.r * self.delta;
        (lhs - rhs).abs() / rhs
    }

    /// `(delta / y*)^2`, below 1 whenever `x* != 0`.
    pub fn ratio_sq(&self) -> f64 {
        (self.delta / self.y_star).powi(2)
    }
}

/// `g_k = integral of P_k(x* - t, y*) f(t) dt` for `k = 1, 2`.
///
/// `g2` is closed form; `g1` is integrated adaptively with the switch points
/// `t = x* +- delta` of the clamp placed on the initial subdivision.
pub fn split_convolutions(f: &SimpleFunction, geom: &SplitGeometry) -> Result<(f64, f64)> {
    if !f.is_nonnegative() {
        return Err(Error::NegativeFunction);
    }
    let (x, y, delta) = (geom.x_star, geom.y_star, geom.delta);
    check_split(x, y, delta)?;
    let p_delta = kernel(delta, y);

    let mut g2 = 0.0;
    for (a, b, v) in f.pieces() {
        let (lo, hi) = (a.max(x - delta), b.min(x + delta));
        if v.re == 0.0 || hi <= lo {
            continue;
        }
        let angle = ((hi - lo) * y).atan2(y * y + (hi - x) * (lo - x));
        g2 += v.re * (FRAC_1_PI * angle - p_delta * (hi - lo));
    }

    let (lo, hi) = f.support();
    let mut pts = f.breakpoints().to_vec();
    pts.extend(
        [x - delta, x + delta, x - y, x + y, x]
            .into_iter()
            .filter(|p| *p > lo && *p < hi),
    );
    let g1 = integrate(
        |t| Complex64::new(f.eval(t).re * p1_raw(x - t, y, delta), 0.0),
        &pts,
        &QuadConfig::relative(1e-12, 1e-16),
    )?
    .value
    .re;
    Ok((g1, g2))
}

/// `||f||_1 / (2 pi lambda2)`: no radius at or beyond this can have `g2 > lambda2`.
pub fn p2_threshold_radius(f_l1_norm: f64, lambda2: f64) -> Result<f64> {
    check_positive("f_l1_norm", f_l1_norm)?;
    check_positive("lambda2", lambda2)?;
    Ok(f_l1_norm / (2.0 * PI * lambda2))
}
