//! The Cauchy integral of a boundary function against the Poisson extension
//! of `(I + iH) f`, with and without a factor `1/2`.

use std::f64::consts::{FRAC_1_PI, FRAC_PI_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func_model::SimpleFunction;
use crate::quadrature::{integrate_real, QuadConfig};
use crate::transforms::{cauchy_integral, hilbert, poisson};

use super::{members, FamilyConfig, Fixture, Flag, Report, Row, DEFAULT_SEED};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityConfig {
    pub family: Option<FamilyConfig>,
    pub fixtures: Vec<Fixture>,
    /// Sample points `[x, y]` with `y > 0`.
    pub points: Vec<[f64; 2]>,
    pub tol: f64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        let mut points = vec![[0.0, 1.0]];
        points.extend((1..20).map(|j| [-1.3 + 0.37 * j as f64, 0.15 + 0.2 * (j % 5) as f64]));
        IdentityConfig {
            family: Some(FamilyConfig {
                count: 3,
                ..FamilyConfig::signed(DEFAULT_SEED)
            }),
            fixtures: vec![Fixture::Indicator01, Fixture::TwoBump, Fixture::Comb],
            points,
            tol: 1e-4,
        }
    }
}

/// Poisson extension of `Hf` at `x + iy`, as `(1/pi) int Hf(x + y tan s) ds`
/// over `s` in `(-pi/2, pi/2)`, split where `x + y tan s` crosses a breakpoint
/// (the logarithmic singularities of `Hf`).
pub fn poisson_of_hilbert(f: &SimpleFunction, x: f64, y: f64) -> Result<Complex64> {
    if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::OutOfDomain(format!("need y > 0, got {x} + {y}i")));
    }
    let mut pts = vec![-FRAC_PI_2, FRAC_PI_2];
    pts.extend(f.breakpoints().iter().map(|t| ((t - x) / y).atan()));
    let cfg = QuadConfig::absolute(1e-11);
    let part = |take: fn(Complex64) -> f64| -> Result<f64> {
        let (v, _) = integrate_real(
            |s| {
                let t = x + y * s.tan();
                // a node can round onto a breakpoint; that single point has no mass
                if f.breakpoints().contains(&t) {
                    0.0
                } else {
                    hilbert(f, t).map(take).unwrap_or(0.0)
                }
            },
            &pts,
            &cfg,
        )?;
        Ok(FRAC_1_PI * v)
    };
    let re = part(|c| c.re)?;
    let im = if f.is_real() { 0.0 } else { part(|c| c.im)? };
    Ok(Complex64::new(re, im))
}

/// Cauchy integral against `P((I + iH) f)` (candidate "full") and half of it
/// (candidate "half") at each sample point.
pub fn run_identity_sec4(cfg: &IdentityConfig) -> Result<Report> {
    if cfg.points.is_empty() {
        return Err(Error::InvalidConfig("no sample points".into()));
    }
    if let Some(p) = cfg
        .points
        .iter()
        .find(|p| !(p[1] > 0.0) || !p[0].is_finite())
    {
        return Err(Error::OutOfDomain(format!(
            "sample {} + {}i is not in the upper half-plane",
            p[0], p[1]
        )));
    }
    let fam = members(&cfg.fixtures, cfg.family.as_ref())?;
    let mut simple = Vec::new();
    for m in &fam {
        let f = m.f.as_simple().ok_or_else(|| {
            Error::Unsupported(format!(
                "identity run needs simple functions, '{}' is not",
                m.id
            ))
        })?;
        simple.push((m.id.as_str(), f));
    }

    struct Out {
        cauchy: Complex64,
        full: Complex64,
    }
    let outs: Vec<Vec<Out>> = simple
        .par_iter()
        .map(|(_, f)| {
            cfg.points
                .iter()
                .map(|&[x, y]| {
                    let z = Complex64::new(x, y);
                    let cauchy = cauchy_integral(f, z)?;
                    let full = poisson(f, x, y)? + Complex64::i() * poisson_of_hilbert(f, x, y)?;
                    Ok(Out { cauchy, full })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut report = Report::new("identity-sec4", cfg.family.as_ref().map(|f| f.seed), cfg)?;
    let (mut worst_full, mut worst_half): (f64, f64) = (0.0, 0.0);
    for ((id, _), rows) in simple.iter().zip(&outs) {
        for (p, o) in cfg.points.iter().zip(rows) {
            let rf = (o.full - o.cauchy).norm();
            let rh = (0.5 * o.full - o.cauchy).norm();
            worst_full = worst_full.max(rf);
            worst_half = worst_half.max(rh);
            report.rows.push(
                Row::new()
                    .with("id", *id)
                    .with("x", p[0])
                    .with("y", p[1])
                    .with("cauchy_re", o.cauchy.re)
                    .with("cauchy_im", o.cauchy.im)
                    .with("candidate_re", o.full.re)
                    .with("candidate_im", o.full.im)
                    .with("residual_full", rf)
                    .with("residual_half", rh),
            );
        }
    }
    report
        .empirical_constants
        .insert("max_residual_full".into(), worst_full);
    report
        .empirical_constants
        .insert("max_residual_half".into(), worst_half);
    let (full_ok, half_ok) = (worst_full <= cfg.tol, worst_half <= cfg.tol);
    let verdict = match (full_ok, half_ok) {
        (true, false) => "full: C f = P((I + iH) f)",
        (false, true) => "half: C f = P((I + iH) f) / 2",
        (true, true) => "ambiguous: both candidates match",
        (false, false) => "none: neither candidate matches",
    };
    report
        .flags
        .push(Flag::new("identity_candidate", full_ok != half_ok, verdict));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_at_i() {
        let f = SimpleFunction::indicator(0.0, 1.0, 1.0).unwrap();
        let c = cauchy_integral(&f, Complex64::i()).unwrap();
        assert!((c - Complex64::new(0.125, -0.0551589000381629)).norm() < 1e-14);
        let full = poisson(&f, 0.0, 1.0).unwrap()
            + Complex64::i() * poisson_of_hilbert(&f, 0.0, 1.0).unwrap();
        assert!((0.5 * full - c).norm() < 1e-8);
        assert!((full - c).norm() > 0.1);
    }

    #[test]
    fn zero_function_has_zero_residuals() {
        let r = run_identity_sec4(&IdentityConfig {
            family: None,
            fixtures: vec![Fixture::Zero],
            points: vec![[0.5, 0.5], [2.0, 0.1]],
            tol: 1e-4,
        })
        .unwrap();
        assert_eq!(r.constant("max_residual_full"), Some(0.0));
        assert_eq!(r.constant("max_residual_half"), Some(0.0));
        assert!(!r.passed());
    }

    #[test]
    fn rejects_lower_half_plane() {
        let cfg = IdentityConfig {
            points: vec![[0.5, -1.0]],
            ..IdentityConfig::default()
        };
        assert!(run_identity_sec4(&cfg).unwrap_err().is_domain());
    }
}
