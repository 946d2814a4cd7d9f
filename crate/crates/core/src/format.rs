//! Locale-independent number formatting for CSV and report output.

const SIG_DIGITS: i32 = 15;

/// 15 significant digits; scientific notation when `0 < |v| < 1e-4`.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs();
    if mag < 1e-4 {
        return format!("{:.*e}", (SIG_DIGITS - 1) as usize, v);
    }
    let exponent = mag.log10().floor() as i32;
    let decimals = (SIG_DIGITS - 1 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}
