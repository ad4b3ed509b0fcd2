//! Float formatting shared by every exporter: 17 significant digits, and the
//! strings `inf`, `-inf`, `nan` for non-finite values.

pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Inverse of [`format_f64`].
pub fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.0, -0.0, 1.0 / 3.0, 6.0221e23, -1.5e-300, f64::MIN_POSITIVE, f64::MAX] {
            let s = format_f64(v);
            assert_eq!(parse_f64(&s).unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_f64(660.0), "6.6000000000000000e2");
        assert_eq!(format_f64(f64::INFINITY), "inf");
        assert!(parse_f64("nan").unwrap().is_nan());
    }
}
