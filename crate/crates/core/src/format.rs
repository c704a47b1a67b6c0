//! Number formatting shared by the human-facing CSV writers.

/// Format `x` with six significant digits in fixed notation.
///
/// Trailing zeros are kept so that columns line up (`1.00000`, `0.0110000`).
/// Very small or very large magnitudes fall back to scientific notation.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new digit (9.999996 -> 10.00000); re-derive
    // from the rounded value so the digit count stays at six
    let rounded: f64 = s.parse().unwrap_or(x);
    let m2 = rounded.abs().log10().floor() as i32;
    if m2 != magnitude {
        let decimals = (5 - m2).max(0) as usize;
        return format!("{rounded:.decimals$}");
    }
    s
}

/// Compact label for a threshold used in file names and column headers:
/// `0.3 -> "03"`, `0.5 -> "05"`, `1.25 -> "125"`.
pub fn theta_label(theta: f64) -> String {
    format!("{theta}").replace(['.', '-'], "")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(0.0), "0.00000");
        assert_eq!(sig6(-0.011), "-0.0110000");
        assert_eq!(sig6(123.456789), "123.457");
        assert_eq!(sig6(9.9999996), "10.0000");
        assert_eq!(sig6(1e-9), "1.00000e-9");
    }

    #[test]
    fn theta_labels() {
        assert_eq!(theta_label(0.3), "03");
        assert_eq!(theta_label(0.5), "05");
        assert_eq!(theta_label(1e9), "1000000000");
    }
}
