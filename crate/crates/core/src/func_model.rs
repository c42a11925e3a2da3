//! Input functions, sectors, polar points and radial grids.
//!
//! Everything here is immutable after construction. Simple functions are
//! piecewise constant on `[t_0, t_n]` with complex values and vanish elsewhere;
//! the exponential family `a e^{-ct}` is kept alongside them because its
//! Laplace transform has a closed form.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Open sector `{ z : lo < arg z < hi }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub theta_lo: f64,
    pub theta_hi: f64,
}

impl Sector {
    /// Plane cut along the positive real axis.
    pub const CUT_PLANE: Sector = Sector {
        theta_lo: 0.0,
        theta_hi: 2.0 * PI,
    };
    /// Upper half-plane.
    pub const UPPER_HALF: Sector = Sector {
        theta_lo: 0.0,
        theta_hi: PI,
    };
    /// Right half-plane.
    pub const RIGHT_HALF: Sector = Sector {
        theta_lo: -FRAC_PI_2,
        theta_hi: FRAC_PI_2,
    };

    pub fn new(theta_lo: f64, theta_hi: f64) -> Result<Self> {
        if !theta_lo.is_finite() || !theta_hi.is_finite() {
            return Err(Error::NonFinite("sector bounds"));
        }
        if theta_lo >= theta_hi {
            return Err(Error::param("theta_hi", theta_hi, "must exceed theta_lo"));
        }
        if theta_hi - theta_lo > 2.0 * PI {
            return Err(Error::param(
                "theta_hi",
                theta_hi,
                "sector opening exceeds 2*pi",
            ));
        }
        Ok(Sector { theta_lo, theta_hi })
    }

    pub fn width(&self) -> f64 {
        self.theta_hi - self.theta_lo
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta > self.theta_lo && theta < self.theta_hi
    }

    pub fn is_within(&self, outer: &Sector) -> bool {
        self.theta_lo >= outer.theta_lo && self.theta_hi <= outer.theta_hi
    }
}

/// A point `rho e^{i theta}` with `rho > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    rho: f64,
    theta: f64,
}

impl PolarPoint {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !rho.is_finite() || !theta.is_finite() {
            return Err(Error::NonFinite("polar point"));
        }
        if rho <= 0.0 {
            return Err(Error::param("rho", rho, "must be positive"));
        }
        Ok(PolarPoint { rho, theta })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn x(&self) -> f64 {
        self.rho * self.theta.cos()
    }

    pub fn y(&self) -> f64 {
        self.rho * self.theta.sin()
    }

    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(self.rho, self.theta)
    }
}

/// Log-spaced nodes on `[rho_min, rho_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub rho_min: f64,
    pub rho_max: f64,
    pub count: usize,
}

impl Default for RadialGrid {
    fn default() -> Self {
        RadialGrid {
            rho_min: 1e-3,
            rho_max: 1e3,
            count: 2048,
        }
    }
}

impl RadialGrid {
    pub fn new(rho_min: f64, rho_max: f64, count: usize) -> Result<Self> {
        if !rho_min.is_finite() || !rho_max.is_finite() {
            return Err(Error::NonFinite("grid bounds"));
        }
        if rho_min <= 0.0 {
            return Err(Error::param("rho_min", rho_min, "must be positive"));
        }
        if rho_min >= rho_max {
            return Err(Error::param("rho_max", rho_max, "must exceed rho_min"));
        }
        if count < 2 {
            return Err(Error::param("count", count as f64, "need at least 2 nodes"));
        }
        Ok(RadialGrid {
            rho_min,
            rho_max,
            count,
        })
    }

    /// Grid on `[2^lo, 2^hi]` with exactly `per_octave` steps per doubling, so
    /// that dilation by a power of two maps nodes onto nodes.
    pub fn octave_aligned(lo: i32, hi: i32, per_octave: usize) -> Result<Self> {
        if hi <= lo || per_octave == 0 {
            return Err(Error::InvalidConfig(format!(
                "octave grid needs lo < hi and per_octave > 0 (got {lo}, {hi}, {per_octave})"
            )));
        }
        let steps = (hi - lo) as usize * per_octave;
        RadialGrid::new(2f64.powi(lo), 2f64.powi(hi), steps + 1)
    }

    pub fn validate(&self) -> Result<()> {
        RadialGrid::new(self.rho_min, self.rho_max, self.count).map(|_| ())
    }

    pub fn nodes(&self) -> Vec<f64> {
        let (a, b) = (self.rho_min.ln(), self.rho_max.ln());
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| match i {
                0 => self.rho_min,
                i if i == self.count - 1 => self.rho_max,
                i => (a + (b - a) * i as f64 / last).exp(),
            })
            .collect()
    }
}

/// Conjugate exponent `p'` with `1/p + 1/p' = 1`.
pub fn conjugate_exponent(p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    })
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Piecewise-constant function with finite support on the half-line.
///
/// `values[i]` is the value on the open piece `(breakpoints[i], breakpoints[i+1])`.
/// Zero-valued pieces are kept as given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SimpleFunctionRepr", into = "SimpleFunctionRepr")]
pub struct SimpleFunction {
    breakpoints: Vec<f64>,
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SimpleFunctionRepr {
    breakpoints: Vec<f64>,
    values: Vec<[f64; 2]>,
}

impl TryFrom<SimpleFunctionRepr> for SimpleFunction {
    type Error = Error;

    fn try_from(repr: SimpleFunctionRepr) -> Result<Self> {
        let values = repr
            .values
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        SimpleFunction::new(repr.breakpoints, values)
    }
}

impl From<SimpleFunction> for SimpleFunctionRepr {
    fn from(f: SimpleFunction) -> Self {
        SimpleFunctionRepr {
            breakpoints: f.breakpoints,
            values: f.values.iter().map(|v| [v.re, v.im]).collect(),
        }
    }
}

/// Validating constructor; see [`SimpleFunction::new`].
pub fn make_simple(breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<SimpleFunction> {
    SimpleFunction::new(breakpoints, values)
}

impl SimpleFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NoPieces);
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::LengthMismatch {
                expected: values.len() + 1,
                values: values.len(),
                got: breakpoints.len(),
            });
        }
        if breakpoints.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("breakpoints"));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite("values"));
        }
        if let Some(index) = breakpoints.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::BreakpointsNotIncreasing {
                index,
                prev: breakpoints[index],
                next: breakpoints[index + 1],
            });
        }
        if breakpoints[0] < 0.0 {
            return Err(Error::NegativeStart(breakpoints[0]));
        }
        Ok(SimpleFunction {
            breakpoints,
            values,
        })
    }

    /// Real-valued convenience constructor.
    pub fn real(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        SimpleFunction::new(
            breakpoints,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// `c` times the indicator of `[a, b]`.
    pub fn indicator(a: f64, b: f64, c: f64) -> Result<Self> {
        SimpleFunction::real(vec![a, b], vec![c])
    }

    pub fn zero_on(a: f64, b: f64) -> Result<Self> {
        SimpleFunction::indicator(a, b, 0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.values.len()])
    }

    /// Iterator over `(left, right, value)` for each piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (w[0], w[1], *v))
    }

    /// Right-continuous evaluation: the value of the piece `[t_{i-1}, t_i)`
    /// containing `t`, zero outside `[t_0, t_n)`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let (lo, hi) = self.support();
        if !(t >= lo && t < hi) {
            return Complex64::new(0.0, 0.0);
        }
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        self.values[idx - 1]
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0 && v.re >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Exact `L^p` norm; `p = f64::INFINITY` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 || p.is_infinite() {
            return Ok(scale);
        }
        let sum: f64 = self
            .pieces()
            .map(|(a, b, v)| (v.norm() / scale).powf(p) * (b - a))
            .sum();
        Ok(scale * sum.powf(1.0 / p))
    }

    pub fn l1_norm(&self) -> f64 {
        self.pieces().map(|(a, b, v)| v.norm() * (b - a)).sum()
    }

    /// `t -> f(s t)`.
    pub fn dilate(&self, s: f64) -> Result<Self> {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::param("s", s, "dilation factor must be positive"));
        }
        Ok(SimpleFunction {
            breakpoints: self.breakpoints.iter().map(|t| t / s).collect(),
            values: self.values.clone(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        SimpleFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `a f + b g` on the merged breakpoint set. Gaps between the two supports
    /// become zero-valued pieces.
    pub fn combine(a: Complex64, f: &SimpleFunction, b: Complex64, g: &SimpleFunction) -> Self {
        let mut merged: Vec<f64> = f
            .breakpoints
            .iter()
            .chain(&g.breakpoints)
            .copied()
            .collect();
        merged.sort_by(f64::total_cmp);
        merged.dedup();
        let values = merged
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                a * f.eval(mid) + b * g.eval(mid)
            })
            .collect();
        SimpleFunction {
            breakpoints: merged,
            values,
        }
    }

    /// `F(x) = integral of f over (-inf, x]`.
    pub fn cumulative(&self, x: f64) -> Complex64 {
        self.pieces()
            .map(|(a, b, v)| v * (x.min(b) - a).max(0.0))
            .sum()
    }
}

/// Free-function form of [`SimpleFunction::lp_norm`].
pub fn lp_norm(f: &SimpleFunction, p: f64) -> Result<f64> {
    f.lp_norm(p)
}

/// Free-function form of [`SimpleFunction::dilate`].
pub fn dilate(f: &SimpleFunction, s: f64) -> Result<SimpleFunction> {
    f.dilate(s)
}

/// Free-function form of [`SimpleFunction::combine`].
pub fn combine(
    a: Complex64,
    f: &SimpleFunction,
    b: Complex64,
    g: &SimpleFunction,
) -> SimpleFunction {
    SimpleFunction::combine(a, f, b, g)
}

/// `t -> amplitude * exp(-rate * t)` on the half-line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFunction {
    amplitude: Complex64,
    rate: f64,
}

impl ExpFunction {
    pub fn new(amplitude: Complex64, rate: f64) -> Result<Self> {
        if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
            return Err(Error::NonFinite("amplitude"));
        }
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::param("rate", rate, "must be positive"));
        }
        Ok(ExpFunction { amplitude, rate })
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let a = self.amplitude.norm();
        if p.is_infinite() {
            return Ok(a);
        }
        Ok(a * (self.rate * p).powf(-1.0 / p))
    }

    pub fn dilate(&self, s: f64) -> Result<Self> {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::param("s", s, "dilation factor must be positive"));
        }
        ExpFunction::new(self.amplitude, self.rate * s)
    }
}

/// Any function the transforms accept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputFunction {
    Simple(SimpleFunction),
    Exp(ExpFunction),
}

impl From<SimpleFunction> for InputFunction {
    fn from(f: SimpleFunction) -> Self {
        InputFunction::Simple(f)
    }
}

impl From<ExpFunction> for InputFunction {
    fn from(f: ExpFunction) -> Self {
        InputFunction::Exp(f)
    }
}

impl InputFunction {
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        match self {
            InputFunction::Simple(f) => f.lp_norm(p),
            InputFunction::Exp(g) => g.lp_norm(p),
        }
    }

    pub fn dilate(&self, s: f64) -> Result<Self> {
        Ok(match self {
            InputFunction::Simple(f) => InputFunction::Simple(f.dilate(s)?),
            InputFunction::Exp(g) => InputFunction::Exp(g.dilate(s)?),
        })
    }

    pub fn scale(&self, c: Complex64) -> Result<Self> {
        Ok(match self {
            InputFunction::Simple(f) => InputFunction::Simple(f.scale(c)),
            InputFunction::Exp(g) => InputFunction::Exp(ExpFunction::new(g.amplitude * c, g.rate)?),
        })
    }

    pub fn is_real(&self) -> bool {
        match self {
            InputFunction::Simple(f) => f.is_real(),
            InputFunction::Exp(g) => g.amplitude.im == 0.0,
        }
    }

    pub fn as_simple(&self) -> Option<&SimpleFunction> {
        match self {
            InputFunction::Simple(f) => Some(f),
            InputFunction::Exp(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constructor_examples() {
        let ind = make_simple(vec![0.0, 1.0], vec![c(1.0)]).unwrap();
        assert_eq!(ind.support(), (0.0, 1.0));
        let two = make_simple(vec![0.0, 1.0, 2.0], vec![c(1.0), c(-1.0)]).unwrap();
        assert_eq!(two.piece_count(), 2);
        assert_eq!(two.eval(1.5), c(-1.0));
    }

    #[test]
    fn constructor_errors_are_distinct() {
        assert!(matches!(
            make_simple(vec![1.0, 0.0], vec![c(1.0)]),
            Err(Error::BreakpointsNotIncreasing { .. })
        ));
        assert!(matches!(
            make_simple(vec![-1.0, 0.0], vec![c(1.0)]),
            Err(Error::NegativeStart(_))
        ));
        assert!(matches!(
            make_simple(vec![0.0, f64::NAN], vec![c(1.0)]),
            Err(Error::NonFinite("breakpoints"))
        ));
        assert!(matches!(
            make_simple(vec![0.0, 1.0], vec![c(f64::INFINITY)]),
            Err(Error::NonFinite("values"))
        ));
        assert!(matches!(
            make_simple(vec![0.0, 1.0, 2.0], vec![c(1.0)]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            make_simple(vec![0.0], vec![]),
            Err(Error::NoPieces)
        ));
        assert!(matches!(
            make_simple(vec![0.0, 1.0, 1.0], vec![c(1.0), c(2.0)]),
            Err(Error::BreakpointsNotIncreasing { index: 1, .. })
        ));
    }

    #[test]
    fn norms() {
        let ind = SimpleFunction::indicator(0.0, 1.0, 1.0).unwrap();
        assert_eq!(ind.lp_norm(2.0).unwrap(), 1.0);
        assert_eq!(ind.lp_norm(f64::INFINITY).unwrap(), 1.0);
        let f = SimpleFunction::indicator(0.0, 3.0, 2.0).unwrap();
        // 2^3 * 3 = 24
        assert!((f.lp_norm(3.0).unwrap() - 2.884_499_140_614_817).abs() < 1e-14);
        assert!(matches!(ind.lp_norm(0.5), Err(Error::InvalidExponent(_))));
        assert!(matches!(
            ind.lp_norm(f64::NAN),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn lp_norm_matches_riemann_sum() {
        let f = SimpleFunction::real(vec![0.0, 0.5, 2.0, 3.0], vec![1.0, -3.0, 0.25]).unwrap();
        let n = 300_000;
        let h = 3.0 / n as f64;
        for p in [1.0, 1.5, 3.0] {
            let s: f64 = (0..n)
                .map(|i| f.eval((i as f64 + 0.5) * h).norm().powf(p) * h)
                .sum();
            let oracle = s.powf(1.0 / p);
            assert!((f.lp_norm(p).unwrap() - oracle).abs() < 1e-9);
        }
    }

    #[test]
    fn dilation() {
        let ind = SimpleFunction::indicator(0.0, 1.0, 1.0).unwrap();
        let d = ind.dilate(2.0).unwrap();
        assert_eq!(d.breakpoints(), &[0.0, 0.5]);
        assert_eq!(ind.dilate(1.0).unwrap(), ind);
        assert_eq!(ind.dilate(4.0).unwrap().lp_norm(2.0).unwrap(), 0.5);
        assert!(ind.dilate(0.0).is_err());
        assert!(ind.dilate(-1.0).is_err());
    }

    #[test]
    fn combine_examples() {
        let a = SimpleFunction::indicator(0.0, 1.0, 1.0).unwrap();
        let b = SimpleFunction::indicator(1.0, 2.0, 1.0).unwrap();
        let u = combine(c(1.0), &a, c(1.0), &b);
        assert_eq!(u.breakpoints(), &[0.0, 1.0, 2.0]);
        assert_eq!(u.values(), &[c(1.0), c(1.0)]);

        let z = combine(c(1.0), &a, c(-1.0), &a);
        assert!(z.is_zero());
        assert_eq!(z.support(), (0.0, 1.0));

        let g = SimpleFunction::indicator(0.5, 1.5, 1.0).unwrap();
        let h = combine(c(2.0), &a, c(3.0), &g);
        assert_eq!(h.breakpoints(), &[0.0, 0.5, 1.0, 1.5]);
        assert_eq!(h.values(), &[c(2.0), c(5.0), c(3.0)]);
    }

    #[test]
    fn combine_fills_gaps_with_zero() {
        let a = SimpleFunction::indicator(0.0, 1.0, 1.0).unwrap();
        let b = SimpleFunction::indicator(2.0, 3.0, 1.0).unwrap();
        let u = combine(c(1.0), &a, c(1.0), &b);
        assert_eq!(u.values(), &[c(1.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let f: SimpleFunction =
            serde_json::from_str(r#"{"breakpoints":[0,1],"values":[[1,0]]}"#).unwrap();
        assert_eq!(f, SimpleFunction::indicator(0.0, 1.0, 1.0).unwrap());
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"breakpoints":[0.0,1.0],"values":[[1.0,0.0]]}"#);
        let bad: std::result::Result<SimpleFunction, _> =
            serde_json::from_str(r#"{"breakpoints":[1,0],"values":[[1,0]]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn grid_nodes() {
        let g = RadialGrid::default();
        let nodes = g.nodes();
        assert_eq!(nodes.len(), 2048);
        assert_eq!(nodes[0], 1e-3);
        assert_eq!(nodes[2047], 1e3);
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(RadialGrid::new(1.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(0.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(1.0, 2.0, 1).is_err());

        let o = RadialGrid::octave_aligned(-2, 2, 4).unwrap();
        let n = o.nodes();
        assert_eq!(n.len(), 17);
        assert!((n[4] - 0.5).abs() < 1e-15 && (n[8] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sectors_and_points() {
        assert!(Sector::new(1.0, 0.5).is_err());
        assert!(Sector::new(0.0, 7.0).is_err());
        assert!(Sector::UPPER_HALF.is_within(&Sector::CUT_PLANE));
        assert!(!Sector::RIGHT_HALF.is_within(&Sector::UPPER_HALF));
        let p = PolarPoint::new(2.0, PI / 2.0).unwrap();
        assert!(p.x().abs() < 1e-15 && (p.y() - 2.0).abs() < 1e-15);
        assert!(PolarPoint::new(0.0, 0.0).is_err());
    }

    #[test]
    fn exp_norms() {
        let g = ExpFunction::new(Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert!((g.lp_norm(2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(g.lp_norm(1.0).unwrap(), 1.0);
        assert!(ExpFunction::new(Complex64::new(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate_exponent(2.0).unwrap(), 2.0);
        assert_eq!(conjugate_exponent(1.0).unwrap(), f64::INFINITY);
        assert_eq!(conjugate_exponent(f64::INFINITY).unwrap(), 1.0);
        assert!((conjugate_exponent(1.5).unwrap() - 3.0).abs() < 1e-15);
    }
}
