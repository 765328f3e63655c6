//! Number formatting for text and CSV reports.

/// `x` rounded to six significant digits, in fixed notation when that stays
/// readable and scientific notation otherwise.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Round first so the exponent reflects carries such as 9.999995 → 10.0000.
    let sci = format!("{x:.5e}");
    let exp: i32 = sci.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn exact(x: f64) -> String {
    format!("{x}")
}
