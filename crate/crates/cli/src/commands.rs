use std::collections::BTreeMap;
use std::env;

use angmax_core::kernel_split::{
    decomp_residual, p1, p2, phi, phi_mass, poisson_kernel, split_convolutions, SplitGeometry,
};
use angmax_core::maximal::{
    distribution_of_samples, lp_norm_profile, max_profile, AngleSearchConfig, TailPolicy,
};
use angmax_core::transforms::poisson;
use angmax_core::verify::{self, Report, Row};
use angmax_core::{InputFunction, RadialGrid, Sector, TransformKind};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::{self, Format};
use crate::output::{report, Target};
use crate::{Cli, CliError, Command, FunctionArg, KernelSplitArgs, MaxprofileArgs, SearchArgs};
use crate::{TransformArgs, VerifyArgs};

pub fn run(cli: Cli) -> Result<u8, CliError> {
    let (common, rest) = config::load_config(cli.config.as_deref())?;
    if let Some(jobs) = cli.jobs.or(common.jobs) {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))?;
    }
    let dir = cli.out.or(common.out).or_else(|| {
        env::var_os("ANGMAX_OUT")
            .filter(|v| !v.is_empty())
            .map(Into::into)
    });
    let target = Target {
        dir,
        format: cli.format.or(common.format),
    };
    match cli.command {
        Command::Transform(a) => transform(a, rest, &target),
        Command::Maxprofile(a) => maxprofile(a, rest, &target),
        Command::Verify(a) => verify_cmd(a, rest, &target),
        Command::KernelSplit(a) => kernel_split(a, rest, &target),
    }
}

fn from_file<T: DeserializeOwned>(rest: Map<String, Value>) -> Result<T, CliError> {
    serde_json::from_value(Value::Object(rest))
        .map_err(|e| CliError::Config(format!("bad config: {e}")))
}

/// Flag list when given, else the config list, else empty.
fn pick<T: Clone>(flag: &[T], file: Option<Vec<T>>) -> Vec<T> {
    if flag.is_empty() {
        file.unwrap_or_default()
    } else {
        flag.to_vec()
    }
}

fn resolve_function(
    arg: &FunctionArg,
    file_f: Option<Value>,
    file_seed: Option<u64>,
) -> Result<(InputFunction, Option<u64>), CliError> {
    let seed = arg.seed.or(file_seed);
    let f = match (&arg.f, file_f) {
        (Some(src), _) => config::load_function(src, seed)?,
        (None, Some(v)) => config::function_from_value(v, seed)?,
        (None, None) => return Err(CliError::Config("no function given (use --f)".into())),
    };
    Ok((f, seed))
}

fn resolve_kind(flag: Option<&String>, file: Option<String>) -> Result<TransformKind, CliError> {
    let name = flag
        .cloned()
        .or(file)
        .ok_or_else(|| CliError::Config("no transform kind given (use --kind)".into()))?;
    Ok(name.parse::<TransformKind>()?)
}

/// Pair two lists, repeating a singleton to the other's length.
fn broadcast(a: &[f64], b: &[f64], what: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let n = match (a.len(), b.len()) {
        (n, m) if n == m => n,
        (1, m) => m,
        (n, 1) => n,
        (n, m) => {
            return Err(CliError::Config(format!(
                "{what}: lists of lengths {n} and {m} cannot be paired"
            )))
        }
    };
    let at = |v: &[f64], i: usize| if v.len() == 1 { v[0] } else { v[i] };
    Ok((0..n).map(|i| (at(a, i), at(b, i))).collect())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransformFile {
    f: Option<Value>,
    seed: Option<u64>,
    kind: Option<String>,
    x: Option<Vec<f64>>,
    y: Option<Vec<f64>>,
    z: Option<Vec<ZSpec>>,
    rho: Option<Vec<f64>>,
    theta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ZSpec {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

fn parse_z(s: &str) -> Result<Complex64, CliError> {
    s.trim()
        .parse::<Complex64>()
        .map_err(|_| CliError::Config(format!("bad complex number '{s}'")))
}

fn transform(a: TransformArgs, rest: Map<String, Value>, target: &Target) -> Result<u8, CliError> {
    let file: TransformFile = from_file(rest)?;
    let (f, seed) = resolve_function(&a.function, file.f, file.seed)?;
    let kind = resolve_kind(a.kind.as_ref(), file.kind)?;

    let z_file: Vec<Complex64> = file
        .z
        .unwrap_or_default()
        .iter()
        .map(|z| match z {
            ZSpec::Real(v) => Ok(Complex64::new(*v, 0.0)),
            ZSpec::Pair([re, im]) => Ok(Complex64::new(*re, *im)),
            ZSpec::Text(s) => parse_z(s),
        })
        .collect::<Result<_, _>>()?;
    let z_flag: Vec<Complex64> = a.z.iter().map(|s| parse_z(s)).collect::<Result<_, _>>()?;
    let zs = pick(&z_flag, Some(z_file));
    let (x, y) = (pick(&a.x, file.x), pick(&a.y, file.y));
    let (rho, theta) = (pick(&a.rho, file.rho), pick(&a.theta, file.theta));

    let modes = [!zs.is_empty(), !rho.is_empty(), !x.is_empty()];
    let points: Vec<Complex64> = match modes {
        [true, false, false] => zs,
        [false, true, false] => {
            let theta = if theta.is_empty() { vec![0.0] } else { theta };
            broadcast(&rho, &theta, "rho/theta")?
                .into_iter()
                .map(|(r, t)| Complex64::from_polar(r, t))
                .collect()
        }
        [false, false, true] => {
            let y = if y.is_empty() { vec![0.0] } else { y };
            broadcast(&x, &y, "x/y")?
                .into_iter()
                .map(|(x, y)| Complex64::new(x, y))
                .collect()
        }
        [false, false, false] => {
            return Err(CliError::Config(
                "no evaluation point (use --z, --rho/--theta or --x/--y)".into(),
            ))
        }
        _ => {
            return Err(CliError::Config(
                "give points as exactly one of --z, --rho/--theta, --x/--y".into(),
            ))
        }
    };

    let mut rows = Vec::with_capacity(points.len());
    for z in &points {
        let v = kind.evaluate(&f, *z)?;
        rows.push(
            Row::new()
                .with("z_re", z.re)
                .with("z_im", z.im)
                .with("rho", z.norm())
                .with("theta", z.arg())
                .with("value_re", v.re)
                .with("value_im", v.im)
                .with("value_abs", v.norm()),
        );
    }
    let echo = json!({
        "command": "transform",
        "kind": kind,
        "f": f,
        "seed": seed,
        "points": points.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    });
    let r = report("transform", seed, echo, rows);
    target.emit("transform", &r, &r, Format::Csv)?;
    Ok(0)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaxprofileFile {
    f: Option<Value>,
    seed: Option<u64>,
    kind: Option<String>,
    p: Option<Vec<Value>>,
    grid: Option<RadialGrid>,
    sector: Option<Sector>,
    search: Option<Value>,
}

fn search_config(file: Option<Value>, flags: &SearchArgs) -> Result<AngleSearchConfig, CliError> {
    let mut base = serde_json::to_value(AngleSearchConfig::default()).expect("serializable");
    if let Some(v) = file {
        config::merge(&mut base, v, "/search")?;
    }
    config::merge(&mut base, search_patch(flags), "/search")?;
    let cfg: AngleSearchConfig = serde_json::from_value(base)
        .map_err(|e| CliError::Config(format!("bad search config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn search_patch(flags: &SearchArgs) -> Value {
    let mut m = Map::new();
    if let Some(n) = flags.coarse {
        m.insert("coarse_count".into(), json!(n));
    }
    if let Some(n) = flags.layers {
        m.insert("boundary_layers".into(), json!(n));
    }
    if let Some(n) = flags.refine {
        m.insert("refine_iters".into(), json!(n));
    }
    Value::Object(m)
}

fn exponent_list(flag: &[String], file: Option<Vec<Value>>) -> Result<Vec<f64>, CliError> {
    if !flag.is_empty() {
        return flag.iter().map(|s| config::parse_exponent(s)).collect();
    }
    match file {
        None => Ok(vec![2.0]),
        Some(vs) => vs
            .iter()
            .map(|v| match v {
                Value::Number(n) => Ok(n.as_f64().unwrap_or(f64::NAN)),
                Value::String(s) => config::parse_exponent(s),
                other => Err(CliError::Config(format!("bad exponent {other}"))),
            })
            .collect(),
    }
}

fn key(name: &str, p: f64) -> String {
    if p.is_infinite() {
        format!("{name}[p=inf]")
    } else {
        format!("{name}[p={p}]")
    }
}

fn maxprofile(
    a: MaxprofileArgs,
    rest: Map<String, Value>,
    target: &Target,
) -> Result<u8, CliError> {
    let file: MaxprofileFile = from_file(rest)?;
    let (f, seed) = resolve_function(&a.function, file.f, file.seed)?;
    let kind = resolve_kind(a.kind.as_ref(), file.kind)?;
    let grid = match &a.grid {
        Some(s) => serde_json::from_value(config::parse_grid(s)?)
            .map_err(|e| CliError::Config(format!("bad grid: {e}")))?,
        None => file.grid.unwrap_or_default(),
    };
    grid.validate()?;
    let natural = kind.natural_sector().ok_or_else(|| {
        CliError::Config(format!(
            "the {kind} transform has no angular maximal function"
        ))
    })?;
    let base = file.sector.unwrap_or(natural);
    let sector = Sector::new(
        a.theta_lo.unwrap_or(base.theta_lo),
        a.theta_hi.unwrap_or(base.theta_hi),
    )?;
    let search = search_config(file.search, &a.search)?;
    let exponents = exponent_list(&a.p, file.p)?;

    let profile = max_profile(kind, &f, &grid, &sector, &search)?;

    let echo = json!({
        "command": "maxprofile",
        "kind": kind,
        "f": f,
        "seed": seed,
        "grid": grid,
        "sector": sector,
        "search": search,
        "p": config::exponents_value(&exponents),
    });
    let rows = profile
        .rho
        .iter()
        .zip(&profile.values)
        .zip(&profile.arg_theta)
        .map(|((r, v), t)| {
            Row::new()
                .with("rho", *r)
                .with("value", *v)
                .with("theta_argmax", *t)
        })
        .collect();
    let table = report("maxprofile", seed, echo.clone(), rows);

    let mut summary = report("maxprofile", seed, echo, Vec::new());
    let c: &mut BTreeMap<String, f64> = &mut summary.empirical_constants;
    c.insert("max_value".into(), profile.max_value());
    for &p in &exponents {
        let n = lp_norm_profile(&profile, p, TailPolicy::Report)?;
        let f_norm = f.lp_norm(p)?;
        c.insert(key("norm", p), n.best());
        c.insert(key("truncated_norm", p), n.norm);
        c.insert(key("f_norm", p), f_norm);
        if let Some(rel) = n.tail.and_then(|t| t.relative) {
            c.insert(key("tail_relative", p), rel);
        }
        if f_norm > 0.0 {
            c.insert(key("ratio", p), n.best() / f_norm);
        }
    }
    let top = profile.max_value();
    if top > 0.0 {
        let n = 64;
        let lambdas: Vec<f64> = (0..n)
            .map(|j| top * (1e-3f64).powf(j as f64 / (n - 1) as f64))
            .collect();
        let dist = distribution_of_samples(&profile.rho, &profile.values, &lambdas)?;
        let l1 = f.lp_norm(1.0)?;
        c.insert("weak_norm".into(), dist.weak_norm);
        c.insert("f_norm[p=1]".into(), l1);
        if l1 > 0.0 {
            c.insert("weak_ratio".into(), dist.weak_norm / l1);
        }
    }
    let stem = format!("maxprofile_{kind}");
    target.emit(&stem, &table, &summary, Format::Json)?;
    Ok(0)
}

/// Merge the config file and the flags over the experiment defaults and run it.
fn experiment<C, F>(
    default: C,
    rest: Map<String, Value>,
    a: &VerifyArgs,
    run: F,
) -> Result<Report, CliError>
where
    C: Serialize + DeserializeOwned,
    F: FnOnce(&C) -> angmax_core::Result<Report>,
{
    let mut cfg = serde_json::to_value(&default).expect("serializable");
    let mut rest = rest;
    if let Some(seed) = rest.remove("seed") {
        config::set_seed(&mut cfg, seed)?;
    }
    config::merge(&mut cfg, Value::Object(rest), "")?;

    if let Some(seed) = a.seed {
        config::set_seed(&mut cfg, json!(seed))?;
    }
    if let Some(n) = a.count {
        match cfg.get_mut("family") {
            Some(Value::Object(fam)) => {
                fam.insert("count".into(), json!(n));
            }
            _ => {
                return Err(CliError::Config(
                    "this experiment has no random family".into(),
                ))
            }
        }
    }
    if !a.p.is_empty() {
        let ps =
            a.p.iter()
                .map(|s| config::parse_exponent(s))
                .collect::<Result<Vec<_>, _>>()?;
        config::set(&mut cfg, "exponents", config::exponents_value(&ps))?;
    }
    if let Some(g) = &a.grid {
        config::set(&mut cfg, "grid", config::parse_grid(g)?)?;
    }
    let patch = search_patch(&a.search);
    if patch.as_object().is_some_and(|m| !m.is_empty()) {
        config::set(&mut cfg, "search", patch)?;
    }

    let cfg: C = serde_json::from_value(cfg)
        .map_err(|e| CliError::Config(format!("bad experiment config: {e}")))?;
    Ok(run(&cfg)?)
}

fn verify_cmd(a: VerifyArgs, rest: Map<String, Value>, target: &Target) -> Result<u8, CliError> {
    use verify::*;
    let report = match a.experiment.as_str() {
        "theorem1" => experiment(Theorem1Config::default(), rest, &a, run_theorem1)?,
        "theorem2" => experiment(TheoremConfig::theorem2(), rest, &a, run_theorem2)?,
        "theorem3" => experiment(TheoremConfig::theorem3(), rest, &a, run_theorem3)?,
        "theorem4" => experiment(TheoremConfig::theorem4(), rest, &a, run_theorem4)?,
        "ray-hy" => experiment(RayConfig::default(), rest, &a, run_ray_hy)?,
        "cauchy-rep" => experiment(CauchyRepConfig::default(), rest, &a, run_cauchy_rep)?,
        "identity-sec4" => experiment(IdentityConfig::default(), rest, &a, run_identity_sec4)?,
        "splitting" => experiment(SplittingConfig::default(), rest, &a, run_splitting_suite)?,
        "lemma1" => experiment(Lemma1Config::default(), rest, &a, run_lemma1)?,
        other => {
            return Err(CliError::Config(format!(
                "unknown experiment '{other}'; expected one of {}",
                EXPERIMENTS.join(", ")
            )))
        }
    };
    target.emit(&report.experiment.clone(), &report, &report, Format::Json)?;
    for flag in &report.flags {
        let mark = if flag.passed { "pass" } else { "FAIL" };
        eprintln!("{mark} {}: {}", flag.name, flag.detail);
    }
    Ok(if report.passed() { 0 } else { 1 })
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSplitFile {
    t: Option<Vec<f64>>,
    y: Option<Vec<f64>>,
    delta: Option<Vec<f64>>,
    r: Option<f64>,
    theta: Option<f64>,
    f: Option<Value>,
    seed: Option<u64>,
}

fn kernel_split(
    a: KernelSplitArgs,
    rest: Map<String, Value>,
    target: &Target,
) -> Result<u8, CliError> {
    let file: KernelSplitFile = from_file(rest)?;
    let r = a.r.or(file.r);
    let (rows, echo) = if let Some(r) = r {
        let theta = a
            .theta
            .or(file.theta)
            .ok_or_else(|| CliError::Config("--r needs --theta".into()))?;
        let (f, seed) = resolve_function(&a.function, file.f, file.seed)?;
        let simple = f
            .as_simple()
            .ok_or_else(|| CliError::Config("the split needs a simple function".into()))?;
        let geom = SplitGeometry::from_angle(r, theta)?;
        let (g1, g2) = split_convolutions(simple, &geom)?;
        let g = poisson(simple, geom.x_star, geom.y_star)?.re;
        let row = Row::new()
            .with("r", geom.r)
            .with("theta_star", geom.theta_star)
            .with("x_star", geom.x_star)
            .with("y_star", geom.y_star)
            .with("delta", geom.delta)
            .with("reflected", geom.reflected)
            .with("identity_defect", geom.identity_defect())
            .with("ratio_sq", geom.ratio_sq())
            .with("g", g)
            .with("g1", g1)
            .with("g2", g2);
        let echo = json!({
            "command": "kernel-split",
            "r": r,
            "theta": theta,
            "f": f,
            "seed": seed,
        });
        (vec![row], echo)
    } else {
        let (t, y, delta) = (
            pick(&a.t, file.t),
            pick(&a.y, file.y),
            pick(&a.delta, file.delta),
        );
        if t.is_empty() || y.is_empty() || delta.is_empty() {
            return Err(CliError::Config(
                "kernel evaluation needs --t, --y and --delta (or --r/--theta for a split)".into(),
            ));
        }
        let mut rows = Vec::new();
        for &yv in &y {
            for &d in &delta {
                let mass = phi_mass(yv, d)?;
                for &tv in &t {
                    // phi is the mixing density on (delta, inf), zero below
                    let density = if tv > d { phi(tv, yv, d)? } else { 0.0 };
                    rows.push(
                        Row::new()
                            .with("t", tv)
                            .with("y", yv)
                            .with("delta", d)
                            .with("poisson", poisson_kernel(tv, yv)?)
                            .with("p1", p1(tv, yv, d)?)
                            .with("p2", p2(tv, yv, d)?)
                            .with("decomp_residual", decomp_residual(tv, yv, d)?)
                            .with("phi", density)
                            .with("phi_mass", mass.mass)
                            .with("phi_deficit", mass.deficit),
                    );
                }
            }
        }
        let echo = json!({ "command": "kernel-split", "t": t, "y": y, "delta": delta });
        (rows, echo)
    };
    let r = report("kernel-split", None, echo, rows);
    target.emit("kernel_split", &r, &r, Format::Csv)?;
    Ok(0)
}
