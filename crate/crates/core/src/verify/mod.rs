//! Seeded experiments that measure the constants of the norm inequalities
//! for the angular maximal transforms, and the numeric invariants of the
//! Poisson kernel split.
//!
//! Every runner takes a serializable config, returns a [`Report`] and never
//! looks at the clock or the thread count, so a rerun with the same config is
//! byte-identical.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::func_model::{ExpFunction, InputFunction, SimpleFunction};

mod identity;
mod ray;
mod split;
mod theorems;

pub use identity::{run_identity_sec4, IdentityConfig};
pub use ray::{
    cauchy_contour, ray_l2_norm, run_cauchy_rep, run_ray_hy, CauchyFixture, CauchyRepConfig,
    ContourValue, RayConfig,
};
pub use split::{run_lemma1, run_splitting_suite, Lemma1Config, SplittingConfig};
pub use theorems::{
    run_theorem1, run_theorem2, run_theorem3, run_theorem4, Theorem1Config, TheoremConfig,
};

/// Default seed of the random families.
pub const DEFAULT_SEED: u64 = 1;

/// A function with a stable identifier used in report rows.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedFunction {
    pub id: String,
    pub f: InputFunction,
}

/// Seeded generator of random simple functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub seed: u64,
    pub count: usize,
    pub max_pieces: usize,
    pub breakpoint_range: [f64; 2],
    pub value_range: [f64; 2],
    /// Forces real values `>= 0`; the lower end of `value_range` is clamped to 0.
    pub nonnegative: bool,
}

impl FamilyConfig {
    pub fn nonnegative(seed: u64) -> Self {
        FamilyConfig {
            seed,
            count: 100,
            max_pieces: 6,
            breakpoint_range: [0.0, 4.0],
            value_range: [0.0, 2.0],
            nonnegative: true,
        }
    }

    pub fn signed(seed: u64) -> Self {
        FamilyConfig {
            value_range: [-2.0, 2.0],
            nonnegative: false,
            ..FamilyConfig::nonnegative(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.breakpoint_range;
        if !(a >= 0.0 && b > a && b.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "breakpoint range [{a}, {b}] must be a nonempty interval in [0, inf)"
            )));
        }
        let [lo, hi] = self.value_range;
        let lo = if self.nonnegative { lo.max(0.0) } else { lo };
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidConfig(format!(
                "value range [{lo}, {hi}] is empty"
            )));
        }
        if self.max_pieces == 0 {
            return Err(Error::InvalidConfig("max_pieces must be at least 1".into()));
        }
        Ok(())
    }

    /// The family members, in index order.
    pub fn generate(&self) -> Result<Vec<NamedFunction>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let [a, b] = self.breakpoint_range;
        let [lo, hi] = self.value_range;
        let lo = if self.nonnegative { lo.max(0.0) } else { lo };
        let min_gap = 1e-6 * (b - a);
        let mut out = Vec::with_capacity(self.count);
        for i in 0..self.count {
            let pieces = rng.gen_range(1..=self.max_pieces);
            let breakpoints = loop {
                let mut t: Vec<f64> = (0..=pieces).map(|_| rng.gen_range(a..b)).collect();
                t.sort_by(f64::total_cmp);
                if t.windows(2).all(|w| w[1] - w[0] > min_gap) {
                    break t;
                }
            };
            let values = (0..pieces).map(|_| rng.gen_range(lo..hi)).collect();
            out.push(NamedFunction {
                id: format!("rand-{i:03}"),
                f: SimpleFunction::real(breakpoints, values)?.into(),
            });
        }
        Ok(out)
    }
}

/// Named test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fixture {
    /// `1` on `[0, 1]`.
    Indicator01,
    /// `1` on `[0, 1]`, `1/2` on `[2, 3]`.
    TwoBump,
    /// Alternating `+1, -1` on four pieces of length `1/2`.
    Comb,
    /// `e^{-t}`.
    Exp1,
    /// Zero on `[0, 1]`.
    Zero,
}

impl Fixture {
    pub const ALL: [Fixture; 5] = [
        Fixture::Indicator01,
        Fixture::TwoBump,
        Fixture::Comb,
        Fixture::Exp1,
        Fixture::Zero,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Fixture::Indicator01 => "indicator01",
            Fixture::TwoBump => "two_bump",
            Fixture::Comb => "comb",
            Fixture::Exp1 => "exp1",
            Fixture::Zero => "zero",
        }
    }

    pub fn function(&self) -> InputFunction {
        let simple = |t: Vec<f64>, v: Vec<f64>| -> InputFunction {
            SimpleFunction::real(t, v).expect("fixture is valid").into()
        };
        match self {
            Fixture::Indicator01 => simple(vec![0.0, 1.0], vec![1.0]),
            Fixture::TwoBump => simple(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.0, 0.5]),
            Fixture::Comb => simple(vec![0.0, 0.5, 1.0, 1.5, 2.0], vec![1.0, -1.0, 1.0, -1.0]),
            Fixture::Exp1 => ExpFunction::new(Complex64::new(1.0, 0.0), 1.0)
                .expect("fixture is valid")
                .into(),
            Fixture::Zero => simple(vec![0.0, 1.0], vec![0.0]),
        }
    }

    pub fn named(&self) -> NamedFunction {
        NamedFunction {
            id: self.name().to_string(),
            f: self.function(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        !matches!(self, Fixture::Comb)
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown fixture '{s}'")))
    }
}

/// Fixtures first (in the given order), then the seeded family.
pub(crate) fn members(
    fixtures: &[Fixture],
    family: Option<&FamilyConfig>,
) -> Result<Vec<NamedFunction>> {
    let mut out: Vec<NamedFunction> = fixtures.iter().map(Fixture::named).collect();
    if let Some(fam) = family {
        out.extend(fam.generate()?);
    }
    Ok(out)
}

/// One cell of a report row.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) => fmt_f64(*v),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// Ordered `(column, value)` pairs; serialized as a JSON object in column order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row(pub Vec<(String, Cell)>);

impl Row {
    pub fn new() -> Self {
        Row(Vec::new())
    }

    pub fn with(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn num(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            Cell::Num(v) => Some(*v),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl Serialize for Row {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// A named pass/fail check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flag {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Flag {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Flag {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub version: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub rows: Vec<Row>,
    pub empirical_constants: BTreeMap<String, f64>,
    pub flags: Vec<Flag>,
}

impl Report {
    pub(crate) fn new<C: Serialize>(
        experiment: &str,
        seed: Option<u64>,
        config: &C,
    ) -> Result<Self> {
        let config = serde_json::to_value(config)
            .map_err(|e| Error::InvalidConfig(format!("config is not serializable: {e}")))?;
        Ok(Report {
            experiment: experiment.to_string(),
            version: crate::VERSION.to_string(),
            seed,
            config,
            rows: Vec::new(),
            empirical_constants: BTreeMap::new(),
            flags: Vec::new(),
        })
    }

    pub fn passed(&self) -> bool {
        self.flags.iter().all(|f| f.passed)
    }

    pub fn flag(&self, name: &str) -> Option<&Flag> {
        self.flags.iter().find(|f| f.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.empirical_constants.get(name).copied()
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    /// Rows as CSV, preceded by `#` lines carrying the version and config.
    /// Columns follow the first row; missing cells are left empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# {}", self.version)?;
        writeln!(out, "# experiment: {}", self.experiment)?;
        writeln!(out, "# config: {}", self.config)?;
        let Some(first) = self.rows.first() else {
            return Ok(());
        };
        let cols: Vec<&str> = first.0.iter().map(|(k, _)| k.as_str()).collect();
        writeln!(out, "{}", cols.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = cols
                .iter()
                .map(|c| row.get(c).map(Cell::csv).unwrap_or_default())
                .collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// `n` log-spaced levels from `floor * max` up to `max`.
pub(crate) fn lambda_sweep(max: f64, floor: f64, n: usize) -> Vec<f64> {
    let lo = (floor * max).ln();
    let hi = max.ln();
    (0..n)
        .map(|j| {
            if j + 1 == n {
                max
            } else {
                (lo + (hi - lo) * j as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Key for a per-exponent constant, e.g. `K2[p=2]`.
pub(crate) fn constant_key(name: &str, p: f64) -> String {
    if p.is_infinite() {
        format!("{name}[p=inf]")
    } else {
        format!("{name}[p={p}]")
    }
}

/// Names accepted by the CLI `verify` subcommand.
pub const EXPERIMENTS: [&str; 9] = [
    "theorem1",
    "theorem2",
    "theorem3",
    "theorem4",
    "ray-hy",
    "cauchy-rep",
    "identity-sec4",
    "splitting",
    "lemma1",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_is_deterministic() {
        let a = FamilyConfig::nonnegative(7).generate().unwrap();
        let b = FamilyConfig::nonnegative(7).generate().unwrap();
        let c = FamilyConfig::nonnegative(8).generate().unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 100);
        for m in &a {
            let f = m.f.as_simple().unwrap();
            assert!(f.is_nonnegative());
            assert!(f.piece_count() <= 6);
            let (lo, hi) = f.support();
            assert!(lo >= 0.0 && hi <= 4.0);
        }
        let s = FamilyConfig::signed(7).generate().unwrap();
        assert!(s.iter().any(|m| !m.f.as_simple().unwrap().is_nonnegative()));
    }

    #[test]
    fn fixtures_round_trip_by_name() {
        for fx in Fixture::ALL {
            assert_eq!(fx.name().parse::<Fixture>().unwrap(), fx);
        }
        assert!("bogus".parse::<Fixture>().is_err());
        assert_eq!(Fixture::TwoBump.function().lp_norm(1.0).unwrap(), 1.5);
    }

    #[test]
    fn sweep_endpoints() {
        let l = lambda_sweep(2.0, 1e-3, 64);
        assert_eq!(l.len(), 64);
        assert_eq!(l[63], 2.0);
        assert!((l[0] - 2e-3).abs() < 1e-15);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn csv_follows_column_order() {
        let mut r = Report::new("demo", Some(3), &serde_json::json!({"a": 1})).unwrap();
        r.rows.push(
            Row::new()
                .with("id", "x")
                .with("value", 0.5)
                .with("n", 2usize),
        );
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# angmax "));
        assert_eq!(lines[3], "id,value,n");
        assert_eq!(lines[4], "x,0.50000000000000000,2");
        let mut json = Vec::new();
        r.write_json(&mut json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(v["rows"][0]["n"], 2);
        assert_eq!(v["seed"], 3);
    }
}
