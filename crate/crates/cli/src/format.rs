//! Deterministic number formatting for CSV output.

/// Shortest decimal string that parses back to the same `f64` (never more
/// than 17 significant digits). Plain notation for 1e-5 <= |x| < 1e16,
/// exponent notation otherwise.
pub fn float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Empty field for a missing value.
pub fn optional(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}
