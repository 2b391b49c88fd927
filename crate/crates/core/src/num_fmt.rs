/// Formats a float with 17 significant digits so it parses back bit-exactly.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sentinels_verbatim() {
        assert_eq!(format_float(1e18), "1.0000000000000000e18");
        assert_eq!(format_float(-1e18), "-1.0000000000000000e18");
    }

    proptest! {
        #[test]
        fn round_trips_bit_exact(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = format_float(v);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
