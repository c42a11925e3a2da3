//! Numeric checks of the Poisson kernel split: the sub-convex decomposition
//! of the far part, and the level-set inclusion at half levels.

use std::f64::consts::{FRAC_1_PI, FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func_model::Sector;
use crate::kernel_split::{
    decomp_residual, p1, p2, p2_threshold_radius, phi, phi_mass, poisson_kernel,
    split_convolutions, SplitGeometry,
};
use crate::maximal::{angular_max, AngleSearchConfig};
use crate::quadrature::{integrate_real, QuadConfig};
use crate::transforms::TransformKind;

use super::{members, FamilyConfig, Fixture, Flag, Report, Row, DEFAULT_SEED};

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|j| match j {
            0 => lo,
            _ if j + 1 == n => hi,
            _ => (a + (b - a) * j as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Config {
    /// Seed of the random triples for the split and geometry checks.
    pub seed: u64,
    /// Half the `t` grid is negative; magnitudes are log-spaced over `range`.
    pub t_count: usize,
    pub y_count: usize,
    pub delta_count: usize,
    pub range: [f64; 2],
    pub samples: usize,
    pub tol: f64,
}

impl Default for Lemma1Config {
    fn default() -> Self {
        Lemma1Config {
            seed: DEFAULT_SEED,
            t_count: 50,
            y_count: 50,
            delta_count: 50,
            range: [1e-3, 1e3],
            samples: 10_000,
            tol: 1e-8,
        }
    }
}

/// Decomposition residuals and mixing-density mass on a `(t, y, delta)`
/// grid, plus randomized checks of the split and of the split geometry.
pub fn run_lemma1(cfg: &Lemma1Config) -> Result<Report> {
    let [lo, hi] = cfg.range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || cfg.y_count == 0 || cfg.delta_count == 0 {
        return Err(Error::InvalidConfig(format!(
            "bad lemma grid range [{lo}, {hi}]"
        )));
    }
    if cfg.t_count < 2 {
        return Err(Error::InvalidConfig(
            "t grid needs at least two points".into(),
        ));
    }
    let half = log_space(lo, hi, cfg.t_count / 2);
    let mut ts: Vec<f64> = half.iter().rev().map(|t| -t).collect();
    ts.extend(&half);
    if cfg.t_count % 2 == 1 {
        ts.insert(half.len(), 0.0);
    }
    let ys = log_space(lo, hi, cfg.y_count);
    let ds = log_space(lo, hi, cfg.delta_count);

    struct Cell {
        y: f64,
        delta: f64,
        mass: f64,
        deficit: f64,
        quadrature: f64,
        phi_min: f64,
        residual: f64,
    }
    let cells: Vec<Vec<Cell>> = ys
        .par_iter()
        .map(|&y| {
            ds.iter()
                .map(|&delta| {
                    let m = phi_mass(y, delta)?;
                    let mut residual: f64 = 0.0;
                    for &t in &ts {
                        residual = residual.max(decomp_residual(t, y, delta)?);
                    }
                    let mut phi_min = f64::INFINITY;
                    for s in [1.0 + 1e-9, 2.0, 10.0, 1e3] {
                        phi_min = phi_min.min(phi(delta * s, y, delta)?);
                    }
                    Ok(Cell {
                        y,
                        delta,
                        mass: m.mass,
                        deficit: m.deficit,
                        quadrature: m.quadrature,
                        phi_min,
                        residual,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut report = Report::new("lemma1", Some(cfg.seed), cfg)?;
    let mut worst_res: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    let mut min_deficit = f64::INFINITY;
    let mut phi_ok = true;
    let mut mass_ok = true;
    for c in cells.iter().flatten() {
        worst_res = worst_res.max(c.residual);
        worst_quad = worst_quad.max((c.quadrature - c.mass).abs());
        min_deficit = min_deficit.min(c.deficit);
        phi_ok &= c.phi_min > 0.0;
        // the mass itself rounds to 1 when delta << y; the deficit does not
        mass_ok &= c.mass > 0.0 && c.mass <= 1.0 && c.deficit > 0.0;
        report.rows.push(
            Row::new()
                .with("y", c.y)
                .with("delta", c.delta)
                .with("mass", c.mass)
                .with("deficit", c.deficit)
                .with("mass_quadrature", c.quadrature)
                .with("phi_min", c.phi_min)
                .with("max_residual", c.residual),
        );
    }
    let at_one = phi_mass(1.0, 1.0)?.mass;
    let at_one_err = (at_one - (FRAC_1_PI + 0.5)).abs();

    // randomized split and geometry checks
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let log_u = |rng: &mut ChaCha8Rng| (rng.gen_range(lo.ln()..hi.ln())).exp();
    let mut split_err: f64 = 0.0;
    for _ in 0..cfg.samples {
        let (y, delta) = (log_u(&mut rng), log_u(&mut rng));
        let t = rng.gen_range(-4.0..4.0) * delta;
        let k = poisson_kernel(t, y)?;
        split_err = split_err.max(((p1(t, y, delta)? + p2(t, y, delta)?) - k).abs() / k);
    }
    let mut geom_err: f64 = 0.0;
    let mut ratio_ok = true;
    for _ in 0..cfg.samples {
        let r = log_u(&mut rng);
        let theta = FRAC_PI_2 - rng.gen_range(0.0..FRAC_PI_2);
        let g = SplitGeometry::new(r, theta)?;
        geom_err = geom_err.max(g.identity_defect());
        if g.x_star > 0.0 {
            ratio_ok &= g.ratio_sq() < 1.0;
        }
    }
    let mut norm_err: f64 = 0.0;
    for y in [1e-3, 1.0, 1e3] {
        let (v, _) = integrate_real(
            |s| poisson_kernel(y * s.tan(), y).unwrap_or(0.0) * y / s.cos().powi(2),
            &[-FRAC_PI_2, 0.0, FRAC_PI_2],
            &QuadConfig::absolute(1e-12),
        )?;
        norm_err = norm_err.max((v - 1.0).abs());
    }

    let k = &mut report.empirical_constants;
    k.insert("max_decomp_residual".into(), worst_res);
    k.insert("max_mass_quadrature_error".into(), worst_quad);
    k.insert("min_mass_deficit".into(), min_deficit);
    k.insert("phi_mass(1,1)".into(), at_one);
    k.insert("max_split_error".into(), split_err);
    k.insert("max_geometry_defect".into(), geom_err);
    k.insert("kernel_normalization_error".into(), norm_err);

    let flags = &mut report.flags;
    flags.push(Flag::new(
        "decomposition",
        worst_res <= cfg.tol,
        format!("max residual {worst_res:e} against {:e}", cfg.tol),
    ));
    flags.push(Flag::new(
        "phi_positive",
        phi_ok,
        "phi > 0 on every sampled a > delta",
    ));
    flags.push(Flag::new(
        "mass_below_one",
        mass_ok,
        format!("mass in (0, 1] and deficit > 0 everywhere; smallest deficit {min_deficit:e}"),
    ));
    flags.push(Flag::new(
        "mass_quadrature",
        worst_quad <= 1e-10,
        format!("closed form against quadrature: {worst_quad:e}"),
    ));
    flags.push(Flag::new(
        "mass_at_one",
        at_one_err <= 1e-10,
        format!("phi_mass(1, 1) = {at_one}, off by {at_one_err:e}"),
    ));
    flags.push(Flag::new(
        "exact_split",
        split_err <= 1e-15,
        format!("max relative error of p1 + p2 - P is {split_err:e}"),
    ));
    flags.push(Flag::new(
        "geometry",
        geom_err <= 1e-12 && ratio_ok,
        format!("max relative defect {geom_err:e}; (delta/y)^2 < 1: {ratio_ok}"),
    ));
    flags.push(Flag::new(
        "kernel_normalization",
        norm_err <= 1e-8,
        format!("max |int P - 1| = {norm_err:e}"),
    ));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingConfig {
    pub family: Option<FamilyConfig>,
    pub fixtures: Vec<Fixture>,
    pub lambdas: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub r_count: usize,
    pub search: AngleSearchConfig,
    /// Relative tolerance of `g = g1 + g2`.
    pub split_tol: f64,
}

impl Default for SplittingConfig {
    fn default() -> Self {
        SplittingConfig {
            family: Some(FamilyConfig {
                count: 20,
                ..FamilyConfig::nonnegative(DEFAULT_SEED)
            }),
            fixtures: vec![Fixture::Indicator01, Fixture::TwoBump],
            lambdas: vec![0.05, 0.1, 0.2, 0.5],
            r_min: 1e-2,
            r_max: 1e2,
            r_count: 48,
            search: AngleSearchConfig::default(),
            split_tol: 1e-9,
        }
    }
}

/// For each radius, the maximizing angle of the Poisson extension, the split
/// `g = g1 + g2` there, and the inclusion `{g > lambda} in {g1 > lambda/2} or
/// {g2 > lambda/2}` together with the exclusion radius of `g2`.
pub fn run_splitting_suite(cfg: &SplittingConfig) -> Result<Report> {
    cfg.search.validate()?;
    if !(cfg.r_min > 0.0 && cfg.r_max > cfg.r_min) || cfg.r_count == 0 {
        return Err(Error::InvalidConfig("bad radius sweep".into()));
    }
    if let Some(&l) = cfg.lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(Error::param("lambda", l, "must be positive"));
    }
    let fam = members(&cfg.fixtures, cfg.family.as_ref())?;
    for m in &fam {
        match m.f.as_simple() {
            Some(f) if f.is_nonnegative() => {}
            _ => return Err(Error::NegativeFunction),
        }
    }
    let radii = log_space(cfg.r_min, cfg.r_max, cfg.r_count);

    struct Point {
        r: f64,
        geom: SplitGeometry,
        g: f64,
        g1: f64,
        g2: f64,
    }
    let sweeps: Vec<Vec<Point>> = fam
        .par_iter()
        .map(|m| {
            let f = m.f.as_simple().expect("checked above");
            radii
                .iter()
                .map(|&r| {
                    let am = angular_max(
                        TransformKind::Poisson,
                        &m.f,
                        r,
                        &Sector::UPPER_HALF,
                        &cfg.search,
                    )?;
                    let geom = SplitGeometry::from_angle(r, am.theta)?;
                    let (g1, g2) = split_convolutions(f, &geom)?;
                    Ok(Point {
                        r,
                        geom,
                        g: am.value,
                        g1,
                        g2,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut report = Report::new("splitting", cfg.family.as_ref().map(|f| f.seed), cfg)?;
    let mut split_err: f64 = 0.0;
    let (mut inclusion, mut radius, mut bound) = (0usize, 0usize, 0usize);
    let mut exceed = vec![0usize; cfg.lambdas.len()];
    for (m, pts) in fam.iter().zip(&sweeps) {
        let l1 = m.f.lp_norm(1.0)?;
        for p in pts {
            let err = (p.g - (p.g1 + p.g2)).abs() / p.g.max(f64::MIN_POSITIVE);
            split_err = split_err.max(err);
            // g2 <= P2(0, y*) ||f||_1 <= ||f||_1 / (2 pi R)
            let g2_cap = l1 / (2.0 * PI * p.r);
            if p.g2 > g2_cap * (1.0 + 1e-12) {
                bound += 1;
            }
            for (i, &lam) in cfg.lambdas.iter().enumerate() {
                if p.g > lam {
                    exceed[i] += 1;
                    if !(p.g1 > 0.5 * lam || p.g2 > 0.5 * lam) {
                        inclusion += 1;
                    }
                }
                if p.g2 > 0.5 * lam && l1 > 0.0 {
                    let limit = p2_threshold_radius(l1, 0.5 * lam)?;
                    if p.r >= limit * (1.0 + 1e-12) {
                        radius += 1;
                    }
                }
            }
            report.rows.push(
                Row::new()
                    .with("id", m.id.as_str())
                    .with("r", p.r)
                    .with("theta_star", p.geom.theta_star)
                    .with("reflected", p.geom.reflected)
                    .with("x_star", p.geom.x_star)
                    .with("y_star", p.geom.y_star)
                    .with("delta", p.geom.delta)
                    .with("g", p.g)
                    .with("g1", p.g1)
                    .with("g2", p.g2)
                    .with("split_error", err)
                    .with("g2_bound", g2_cap),
            );
        }
    }
    let k = &mut report.empirical_constants;
    k.insert("max_split_error".into(), split_err);
    k.insert("inclusion_violations".into(), inclusion as f64);
    k.insert("radius_violations".into(), radius as f64);
    k.insert("g2_bound_violations".into(), bound as f64);
    for (lam, n) in cfg.lambdas.iter().zip(&exceed) {
        k.insert(format!("exceedances[lambda={lam}]"), *n as f64);
    }
    report.flags.push(Flag::new(
        "split_exact",
        split_err <= cfg.split_tol,
        format!("max relative |g - g1 - g2| is {split_err:e}"),
    ));
    report.flags.push(Flag::new(
        "inclusion",
        inclusion == 0,
        format!("{inclusion} points with g > lambda but g1, g2 <= lambda/2"),
    ));
    report.flags.push(Flag::new(
        "exclusion_radius",
        radius == 0,
        format!("{radius} points with g2 > lambda/2 beyond ||f||_1 / (pi lambda)"),
    ));
    report.flags.push(Flag::new(
        "g2_bound",
        bound == 0,
        format!("{bound} points with g2 > ||f||_1 / (2 pi R)"),
    ));
    Ok(report)
}
