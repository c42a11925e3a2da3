//! Norm-inequality experiments for the angular maximal Poisson, Stieltjes
//! and Laplace transforms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func_model::{conjugate_exponent, RadialGrid, Sector};
use crate::maximal::{
    distribution_of_samples, lp_norm_profile, max_profile, AngleSearchConfig, RadialProfile,
    TailPolicy,
};
use crate::transforms::TransformKind;

use super::{
    constant_key, lambda_sweep, members, FamilyConfig, Fixture, Flag, NamedFunction, Report, Row,
    DEFAULT_SEED,
};

/// Light search used by the family sweeps; the profiles only feed norms.
fn sweep_search() -> AngleSearchConfig {
    AngleSearchConfig {
        coarse_count: 128,
        boundary_layers: 16,
        refine_iters: 30,
        min_offset: 1e-8,
    }
}

fn octave_grid(lo: i32, hi: i32, per_octave: usize) -> RadialGrid {
    RadialGrid::octave_aligned(lo, hi, per_octave).expect("static grid is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Config {
    pub family: Option<FamilyConfig>,
    pub fixtures: Vec<Fixture>,
    /// Octave-aligned, so that dilations by powers of two shift the profile
    /// along the grid.
    pub grid: RadialGrid,
    pub search: AngleSearchConfig,
    pub dilations: Vec<f64>,
    pub lambda_count: usize,
    /// Lowest level of the sweep, relative to the profile maximum.
    pub lambda_floor: f64,
    pub cap: f64,
    pub invariance_tol: f64,
}

impl Default for Theorem1Config {
    fn default() -> Self {
        Theorem1Config {
            family: Some(FamilyConfig::nonnegative(DEFAULT_SEED)),
            fixtures: vec![Fixture::Indicator01, Fixture::TwoBump, Fixture::Zero],
            grid: octave_grid(-16, 12, 16),
            search: sweep_search(),
            dilations: vec![1.0, 2.0, 4.0, 8.0],
            lambda_count: 64,
            lambda_floor: 1e-3,
            cap: 2.0,
            invariance_tol: 1e-3,
        }
    }
}

struct WeakRow {
    dilation: f64,
    l1: f64,
    max: f64,
    weak: f64,
    ratio: f64,
}

/// `sup lambda mu(lambda)` over the sweep; the stretch `[0, rho_min)` below
/// the grid is counted at the first sampled value.
fn weak_norm(profile: &RadialProfile, floor: f64, count: usize) -> Result<(f64, f64)> {
    let max = profile.max_value();
    if max == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut nodes = Vec::with_capacity(profile.rho.len() + 1);
    nodes.push(0.0);
    nodes.extend_from_slice(&profile.rho);
    let mut values = Vec::with_capacity(nodes.len());
    values.push(profile.values[0]);
    values.extend_from_slice(&profile.values);
    let lambdas = lambda_sweep(max, floor, count);
    Ok((
        max,
        distribution_of_samples(&nodes, &values, &lambdas)?.weak_norm,
    ))
}

fn nonnegative_simple(m: &NamedFunction) -> Result<()> {
    match m.f.as_simple() {
        Some(f) if f.is_nonnegative() => Ok(()),
        Some(_) => Err(Error::NegativeFunction),
        None => Err(Error::Unsupported(format!(
            "weak-type run needs simple functions, '{}' is not",
            m.id
        ))),
    }
}

/// Weak-type ratios `sup lambda mu(lambda) / ||f||_1` of the angular maximal
/// Poisson transform over nonnegative functions and their dilation orbits.
pub fn run_theorem1(cfg: &Theorem1Config) -> Result<Report> {
    cfg.grid.validate()?;
    cfg.search.validate()?;
    if cfg.lambda_count < 2 || !(cfg.lambda_floor > 0.0 && cfg.lambda_floor < 1.0) {
        return Err(Error::InvalidConfig(
            "lambda sweep needs at least two levels and a floor in (0, 1)".into(),
        ));
    }
    if let Some(&s) = cfg.dilations.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::param("dilation", s, "must be positive"));
    }
    let fam = members(&cfg.fixtures, cfg.family.as_ref())?;
    for m in &fam {
        nonnegative_simple(m)?;
    }

    let orbits: Vec<Vec<WeakRow>> = fam
        .par_iter()
        .map(|m| {
            cfg.dilations
                .iter()
                .map(|&s| {
                    let f = m.f.dilate(s)?;
                    let l1 = f.lp_norm(1.0)?;
                    let profile = max_profile(
                        TransformKind::Poisson,
                        &f,
                        &cfg.grid,
                        &Sector::UPPER_HALF,
                        &cfg.search,
                    )?;
                    let (max, weak) = weak_norm(&profile, cfg.lambda_floor, cfg.lambda_count)?;
                    let ratio = if l1 > 0.0 { weak / l1 } else { 0.0 };
                    Ok(WeakRow {
                        dilation: s,
                        l1,
                        max,
                        weak,
                        ratio,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut report = Report::new("theorem1", cfg.family.as_ref().map(|f| f.seed), cfg)?;
    let mut k1: f64 = 0.0;
    let mut spread_max: f64 = 0.0;
    let mut worst = String::new();
    for (m, orbit) in fam.iter().zip(&orbits) {
        let hi = orbit.iter().map(|r| r.ratio).fold(0.0, f64::max);
        let lo = orbit.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let spread = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
        if spread > spread_max {
            spread_max = spread;
            worst = m.id.clone();
        }
        for r in orbit {
            k1 = k1.max(r.ratio);
            report.rows.push(
                Row::new()
                    .with("id", m.id.as_str())
                    .with("dilation", r.dilation)
                    .with("l1_norm", r.l1)
                    .with("profile_max", r.max)
                    .with("weak_norm", r.weak)
                    .with("ratio", r.ratio)
                    .with("orbit_spread", spread),
            );
        }
    }
    report.empirical_constants.insert("K1".into(), k1);
    report
        .empirical_constants
        .insert("dilation_spread".into(), spread_max);
    for (m, orbit) in fam.iter().zip(&orbits).take(cfg.fixtures.len()) {
        if let Some(r) = orbit.first() {
            report
                .empirical_constants
                .insert(format!("K1[{}]", m.id), r.ratio);
        }
    }
    report.flags.push(Flag::new(
        "K1_cap",
        k1 <= cfg.cap,
        format!("max ratio {k1} against cap {}", cfg.cap),
    ));
    report.flags.push(Flag::new(
        "dilation_invariance",
        spread_max <= cfg.invariance_tol,
        format!(
            "largest relative spread {spread_max} (member '{worst}') against {}",
            cfg.invariance_tol
        ),
    ));
    if let Some(i) = cfg.fixtures.iter().position(|f| *f == Fixture::Zero) {
        let zero_ok = orbits[i].iter().all(|r| r.ratio == 0.0);
        report.flags.push(Flag::new(
            "zero_function",
            zero_ok,
            "zero function has ratio 0",
        ));
    }
    Ok(report)
}

/// Shared config of the strong-type runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremConfig {
    pub family: Option<FamilyConfig>,
    pub fixtures: Vec<Fixture>,
    pub grid: RadialGrid,
    pub search: AngleSearchConfig,
    /// `"inf"` stands for the endpoint exponent.
    #[serde(with = "exponents")]
    pub exponents: Vec<f64>,
    /// Cap on the ratio at `p = 2`.
    pub cap: f64,
}

impl TheoremConfig {
    fn base(exponents: Vec<f64>, fixtures: Vec<Fixture>, cap: f64) -> Self {
        TheoremConfig {
            family: Some(FamilyConfig::signed(DEFAULT_SEED)),
            fixtures,
            grid: octave_grid(-12, 12, 16),
            search: sweep_search(),
            exponents,
            cap,
        }
    }

    pub fn theorem2() -> Self {
        TheoremConfig::base(
            vec![1.5, 2.0, 3.0, f64::INFINITY],
            vec![Fixture::Indicator01, Fixture::TwoBump, Fixture::Comb],
            2.5,
        )
    }

    pub fn theorem3() -> Self {
        TheoremConfig::base(
            vec![1.5, 2.0, 3.0],
            vec![Fixture::Indicator01, Fixture::TwoBump, Fixture::Comb],
            16.0,
        )
    }

    pub fn theorem4() -> Self {
        TheoremConfig::base(
            vec![1.0, 1.5, 2.0],
            vec![
                Fixture::Exp1,
                Fixture::Indicator01,
                Fixture::TwoBump,
                Fixture::Comb,
            ],
            3.6,
        )
    }

    fn check(&self, ok: impl Fn(f64) -> bool, range: &'static str) -> Result<()> {
        self.grid.validate()?;
        self.search.validate()?;
        if self.exponents.is_empty() {
            return Err(Error::InvalidConfig("empty exponent list".into()));
        }
        if let Some(&p) = self.exponents.iter().find(|p| !ok(**p)) {
            return Err(Error::param("p", p, range));
        }
        Ok(())
    }
}

mod exponents {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Exp {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|p| {
                if p.is_infinite() {
                    Exp::Text("inf".into())
                } else {
                    Exp::Num(*p)
                }
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Exp>::deserialize(d)?
            .into_iter()
            .map(|e| match e {
                Exp::Num(p) => Ok(p),
                Exp::Text(t) if t == "inf" || t == "infinity" => Ok(f64::INFINITY),
                Exp::Text(t) => Err(serde::de::Error::custom(format!("bad exponent '{t}'"))),
            })
            .collect()
    }
}

/// Norm of a profile in `L^q`, the tail-corrected value when available.
fn profile_norm(profile: &RadialProfile, q: f64) -> Result<(f64, f64, f64)> {
    let n = lp_norm_profile(profile, q, TailPolicy::Report)?;
    let rel = n.tail.and_then(|t| t.relative).unwrap_or(f64::NAN);
    Ok((n.best(), n.norm, rel))
}

fn simple_only(fam: Vec<NamedFunction>) -> Vec<NamedFunction> {
    fam.into_iter()
        .filter(|m| m.f.as_simple().is_some())
        .collect()
}

#[derive(Clone, Copy)]
struct StrongRow {
    p: f64,
    q: f64,
    input: f64,
    output: f64,
    truncated: f64,
    tail_relative: f64,
}

impl StrongRow {
    fn ratio(&self) -> f64 {
        if self.input > 0.0 {
            self.output / self.input
        } else {
            0.0
        }
    }
}

/// Ratios `||M f||_q / ||f||_p` with `q = out_exp(p)`.
fn strong_rows(
    kind: TransformKind,
    sector: Sector,
    m: &NamedFunction,
    cfg: &TheoremConfig,
    out_exp: impl Fn(f64) -> Result<f64>,
) -> Result<Vec<StrongRow>> {
    let profile = max_profile(kind, &m.f, &cfg.grid, &sector, &cfg.search)?;
    cfg.exponents
        .iter()
        .map(|&p| {
            let q = out_exp(p)?;
            let input = m.f.lp_norm(p)?;
            let (output, truncated, tail_relative) = profile_norm(&profile, q)?;
            Ok(StrongRow {
                p,
                q,
                input,
                output,
                truncated,
                tail_relative,
            })
        })
        .collect()
}

fn push_strong(report: &mut Report, id: &str, r: &StrongRow) {
    report.rows.push(
        Row::new()
            .with("id", id)
            .with("p", r.p)
            .with("q", r.q)
            .with("input_norm", r.input)
            .with("output_norm", r.output)
            .with("truncated_norm", r.truncated)
            .with("tail_relative", r.tail_relative)
            .with("ratio", r.ratio()),
    );
}

fn max_ratio_by_p(rows: &[(String, Vec<StrongRow>)], p: f64) -> f64 {
    rows.iter()
        .flat_map(|(_, rs)| rs.iter().filter(|r| r.p == p).map(StrongRow::ratio))
        .fold(0.0, f64::max)
}

fn cap_flag(
    report: &mut Report,
    name: &str,
    cfg: &TheoremConfig,
    rows: &[(String, Vec<StrongRow>)],
) {
    if cfg.exponents.contains(&2.0) {
        let k = max_ratio_by_p(rows, 2.0);
        report.flags.push(Flag::new(
            &format!("{name}_cap"),
            k <= cfg.cap,
            format!("max ratio at p = 2 is {k} against cap {}", cfg.cap),
        ));
    }
}

/// `||M_P f||_p / ||f||_p` for `p` in `(1, inf]`; at `p = inf` the profile
/// maximum is compared with `||f||_inf` directly.
pub fn run_theorem2(cfg: &TheoremConfig) -> Result<Report> {
    cfg.check(|p| p > 1.0, "theorem 2 needs p in (1, inf]")?;
    let fam = simple_only(members(&cfg.fixtures, cfg.family.as_ref())?);
    let rows: Vec<(String, Vec<StrongRow>)> = fam
        .par_iter()
        .map(|m| {
            let rs = strong_rows(TransformKind::Poisson, Sector::UPPER_HALF, m, cfg, Ok)?;
            Ok((m.id.clone(), rs))
        })
        .collect::<Result<_>>()?;

    let mut report = Report::new("theorem2", cfg.family.as_ref().map(|f| f.seed), cfg)?;
    for (id, rs) in &rows {
        for r in rs {
            push_strong(&mut report, id, r);
        }
    }
    for &p in &cfg.exponents {
        report
            .empirical_constants
            .insert(constant_key("K2", p), max_ratio_by_p(&rows, p));
    }
    cap_flag(&mut report, "K2", cfg, &rows);
    if cfg.exponents.iter().any(|p| p.is_infinite()) {
        let mut worst: f64 = f64::NEG_INFINITY;
        for (_, rs) in &rows {
            for r in rs.iter().filter(|r| r.p.is_infinite()) {
                worst = worst.max(r.output - r.input);
            }
        }
        report.flags.push(Flag::new(
            "contraction",
            worst <= 1e-9,
            format!("max of ||M f||_inf - ||f||_inf is {worst:e}"),
        ));
    }
    Ok(report)
}

/// `||M_S f||_p / ||f||_p` for `p` in `(1, inf)`, reported next to the
/// Poisson ratio on the same function.
pub fn run_theorem3(cfg: &TheoremConfig) -> Result<Report> {
    cfg.check(
        |p| p > 1.0 && p.is_finite(),
        "theorem 3 needs p in (1, inf)",
    )?;
    let fam = simple_only(members(&cfg.fixtures, cfg.family.as_ref())?);
    type Pair = (String, Vec<StrongRow>, Vec<StrongRow>);
    let rows: Vec<Pair> = fam
        .par_iter()
        .map(|m| {
            let s = strong_rows(TransformKind::Stieltjes, Sector::CUT_PLANE, m, cfg, Ok)?;
            let p = strong_rows(TransformKind::Poisson, Sector::UPPER_HALF, m, cfg, Ok)?;
            Ok((m.id.clone(), s, p))
        })
        .collect::<Result<_>>()?;

    let mut report = Report::new("theorem3", cfg.family.as_ref().map(|f| f.seed), cfg)?;
    for (id, s, p) in &rows {
        for (rs, rp) in s.iter().zip(p) {
            report.rows.push(
                Row::new()
                    .with("id", id.as_str())
                    .with("p", rs.p)
                    .with("input_norm", rs.input)
                    .with("output_norm", rs.output)
                    .with("truncated_norm", rs.truncated)
                    .with("tail_relative", rs.tail_relative)
                    .with("ratio", rs.ratio())
                    .with("poisson_ratio", rp.ratio()),
            );
        }
    }
    let stieltjes: Vec<(String, Vec<StrongRow>)> = rows
        .iter()
        .map(|(id, s, _)| (id.clone(), s.clone()))
        .collect();
    let poisson: Vec<(String, Vec<StrongRow>)> = rows
        .iter()
        .map(|(id, _, p)| (id.clone(), p.clone()))
        .collect();
    for &p in &cfg.exponents {
        let k3 = max_ratio_by_p(&stieltjes, p);
        let k2 = max_ratio_by_p(&poisson, p);
        report.empirical_constants.insert(constant_key("K3", p), k3);
        report.empirical_constants.insert(constant_key("K2", p), k2);
        report.empirical_constants.insert(
            constant_key("K3/K2", p),
            if k2 > 0.0 { k3 / k2 } else { f64::NAN },
        );
    }
    cap_flag(&mut report, "K3", cfg, &stieltjes);
    Ok(report)
}

/// `||M_L f||_{p'} / ||f||_p` for `p` in `[1, 2]`.
pub fn run_theorem4(cfg: &TheoremConfig) -> Result<Report> {
    cfg.check(|p| (1.0..=2.0).contains(&p), "theorem 4 needs p in [1, 2]")?;
    let fam = members(&cfg.fixtures, cfg.family.as_ref())?;
    let rows: Vec<(String, Vec<StrongRow>)> = fam
        .par_iter()
        .map(|m| {
            let rs = strong_rows(
                TransformKind::LaplaceRay,
                Sector::RIGHT_HALF,
                m,
                cfg,
                conjugate_exponent,
            )?;
            Ok((m.id.clone(), rs))
        })
        .collect::<Result<_>>()?;

    let mut report = Report::new("theorem4", cfg.family.as_ref().map(|f| f.seed), cfg)?;
    for (id, rs) in &rows {
        for r in rs {
            push_strong(&mut report, id, r);
        }
    }
    for &p in &cfg.exponents {
        report
            .empirical_constants
            .insert(constant_key("K4", p), max_ratio_by_p(&rows, p));
    }
    cap_flag(&mut report, "K4", cfg, &rows);
    if cfg.exponents.contains(&1.0) {
        let k = max_ratio_by_p(&rows, 1.0);
        report.flags.push(Flag::new(
            "p1_bound",
            k <= 1.0 + 1e-12,
            format!("max ||M_L f||_inf / ||f||_1 is {k}"),
        ));
    }
    if cfg.exponents.contains(&2.0) {
        if let Some((_, rs)) = rows.iter().find(|(id, _)| id == Fixture::Exp1.name()) {
            let r = rs
                .iter()
                .find(|r| r.p == 2.0)
                .map(StrongRow::ratio)
                .unwrap_or(0.0);
            let target = std::f64::consts::PI.sqrt();
            report.empirical_constants.insert("K4[exp1]".into(), r);
            report.flags.push(Flag::new(
                "exp1_ratio",
                (r - target).abs() <= 1e-2 * target,
                format!("exp1 ratio {r} against sqrt(pi) = {target}"),
            ));
        }
    }
    Ok(report)
}
