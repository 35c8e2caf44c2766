/// Six significant digits, always with a decimal point (`1` prints as `1.0`).
/// Very large or small magnitudes switch to exponent form.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.0".to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..16).contains(&exp) {
        let m = trim(mantissa);
        return format!("{m}e{exp}");
    }
    if exp >= 5 {
        let rounded: f64 = format!("{x:.5e}").parse().expect("round trip");
        return format!("{rounded:.0}.0");
    }
    let decimals = (5 - exp) as usize;
    trim(&format!("{x:.decimals$}"))
}

fn trim(s: &str) -> String {
    if !s.contains('.') {
        return format!("{s}.0");
    }
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn examples() {
        assert_eq!(sig6(1.0), "1.0");
        assert_eq!(sig6(0.0), "0.0");
        assert_eq!(sig6(3.0), "3.0");
        assert_eq!(sig6(2.2451223337533075), "2.24512");
        assert_eq!(sig6(0.24512233375330753), "0.245122");
        assert_eq!(sig6(123456.7), "123457.0");
        assert_eq!(sig6(-0.5), "-0.5");
        assert_eq!(sig6(1.5e-9), "1.5e-9");
        assert_eq!(sig6(9.999999), "10.0");
    }
}
