//! SI constants and number formatting for reports.

/// Reduced Planck constant in J·s (exact in the 2019 SI).
pub const HBAR: f64 = 1.054_571_817e-34;

/// `%.Ng`-style formatting: `sig` significant digits, trailing zeros
/// trimmed, scientific notation outside `1e-5 <= |x| < 10^sig`.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

const PREFIXES: [(i32, &str); 17] = [
    (-24, "y"),
    (-21, "z"),
    (-18, "a"),
    (-15, "f"),
    (-12, "p"),
    (-9, "n"),
    (-6, "µ"),
    (-3, "m"),
    (0, ""),
    (3, "k"),
    (6, "M"),
    (9, "G"),
    (12, "T"),
    (15, "P"),
    (18, "E"),
    (21, "Z"),
    (24, "Y"),
];

/// Engineering notation with an SI prefix, e.g. `1.11 ns` or `886 ps`.
pub fn format_engineering(x: f64, unit: &str, sig: usize) -> String {
    if x == 0.0 {
        return format!("0 {unit}");
    }
    if !x.is_finite() {
        return format!("{x} {unit}");
    }
    // round first so that e.g. 999.96 ps becomes 1.00 ns
    let rounded: f64 = format!("{:.*e}", sig - 1, x).parse().expect("float");
    let exp10 = rounded.abs().log10().floor() as i32;
    let exp3 = (exp10.div_euclid(3) * 3).clamp(-24, 24);
    let prefix = PREFIXES
        .iter()
        .find(|(e, _)| *e == exp3)
        .map(|(_, p)| *p)
        .expect("prefix table covers the clamp range");
    let mantissa = rounded / 10f64.powi(exp3);
    let int_digits = (mantissa.abs().log10().floor() as i32 + 1).max(1);
    let decimals = (sig as i32 - int_digits).max(0) as usize;
    format!("{:.*} {prefix}{unit}", decimals, mantissa)
}

/// Parses the output of [`format_engineering`] back into base units.
pub fn parse_engineering(s: &str, unit: &str) -> Option<f64> {
    let (num, rest) = s.trim().split_once(' ')?;
    let prefix = rest.strip_suffix(unit)?;
    let exp = PREFIXES.iter().find(|(_, p)| *p == prefix)?.0;
    Some(num.parse::<f64>().ok()? * 10f64.powi(exp))
}
