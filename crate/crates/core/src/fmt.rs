//! Number formatting shared by the CSV writers.

/// Formats `x` with six significant digits.
///
/// Magnitudes outside `[1e-4, 1e15)` switch to exponent notation; non-finite
/// values print as `inf`, `-inf` or `nan`.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(614.8), "614.800");
        assert_eq!(sig6(17.566_666), "17.5667");
        assert_eq!(sig6(0.065), "0.0650000");
        assert_eq!(sig6(123_456_789.0), "123456789");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(f64::INFINITY), "inf");
        assert_eq!(sig6(-2.0), "-2.00000");
    }
}
