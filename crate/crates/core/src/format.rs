//! Fixed float formatting for CSV artifacts.
//!
//! 17 significant digits round-trip every `f64`. Values with magnitude in
//! `[1e-4, 1e6)` are written positionally, everything else in lowercase
//! scientific notation.

/// Format `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let a = v.abs();
    if !(1e-4..1e6).contains(&a) {
        return sci;
    }
    // exponent of the leading digit after rounding to 17 digits
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}
