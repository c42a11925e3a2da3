//! Closed-form transforms against direct adaptive quadrature.

use std::f64::consts::PI;

use angmax_core::transforms::quad_oracle_scaled;
use angmax_core::verify::FamilyConfig;
use angmax_core::{SimpleFunction, TransformKind};
use num_complex::Complex64;

/// Low-discrepancy point in `[0, 1)`.
fn weyl(k: usize, alpha: f64) -> f64 {
    (k as f64 * alpha).fract()
}

const A1: f64 = 0.618_033_988_749_894_8;
const A2: f64 = 0.754_877_666_246_692_7;

fn points(kind: TransformKind, f: &SimpleFunction, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    let mut k = 0;
    while out.len() < n {
        k += 1;
        let (u, v) = (weyl(k, A1), weyl(k, A2));
        let z = match kind {
            TransformKind::Poisson | TransformKind::CauchyIntegral => {
                Complex64::new(-2.0 + 8.0 * u, 10f64.powf(-2.0 + 3.0 * v))
            }
            TransformKind::Stieltjes => {
                Complex64::from_polar(10f64.powf(-2.0 + 3.0 * u), 0.02 + (2.0 * PI - 0.04) * v)
            }
            TransformKind::LaplaceRay => {
                Complex64::from_polar(10f64.powf(-2.0 + 3.7 * u), -1.5 + 3.0 * v)
            }
            TransformKind::Hilbert => {
                let x = -2.0 + 8.0 * u;
                if f.breakpoints().iter().any(|b| (b - x).abs() < 1e-3) {
                    continue;
                }
                Complex64::new(x, 0.0)
            }
        };
        out.push(z);
    }
    out
}

/// Worst `|closed - oracle| / |oracle|` over the family and its sample points.
fn worst_error(kind: TransformKind, family: &[SimpleFunction], per_fn: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for f in family {
        let input = f.clone().into();
        for z in points(kind, f, per_fn) {
            let exact = kind.evaluate(&input, z).unwrap();
            let quad = quad_oracle_scaled(kind, f, z).unwrap();
            let denom = if quad.value.norm() > 0.0 {
                quad.value.norm()
            } else {
                quad.scale.max(1.0)
            };
            worst = worst.max((exact - quad.value).norm() / denom);
        }
    }
    worst
}

fn family(seed: u64, count: usize) -> Vec<SimpleFunction> {
    let cfg = FamilyConfig {
        count,
        ..FamilyConfig::signed(seed)
    };
    cfg.generate()
        .unwrap()
        .into_iter()
        .map(|m| m.f.as_simple().unwrap().clone())
        .collect()
}

#[test]
fn closed_forms_match_quadrature() {
    let fam = family(11, 20);
    for kind in TransformKind::ALL {
        let err = worst_error(kind, &fam, 10);
        assert!(err <= 1e-8, "{kind}: {err:e}");
    }
}

#[test]
fn complex_values_match_quadrature() {
    let f = SimpleFunction::new(
        vec![0.0, 0.3, 1.7, 2.0],
        vec![
            Complex64::new(1.0, -2.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(-1.5, 0.25),
        ],
    )
    .unwrap();
    for kind in TransformKind::ALL {
        let err = worst_error(kind, std::slice::from_ref(&f), 40);
        assert!(err <= 1e-8, "{kind}: {err:e}");
    }
}
