//! Deterministic text output: fixed-width scientific numbers and CSV.

/// Significant digits of every CSV number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` in C `%.11e` style (12 significant digits, exponent with sign and at
/// least two digits), e.g. `-1.940551663000e+00`.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // normalise -0 so equal values print identically
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exponent) = s.split_once('e').expect("exponent present in {:e} output");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let sign = if exponent < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exponent.abs())
}

/// CSV document with a header and LF line endings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Csv::default();
        csv.push(header.iter().map(|h| h.to_string()));
        csv
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        let line: Vec<String> = fields.into_iter().collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponents() {
        assert_eq!(sci(5.75), "5.75000000000e+00");
        assert_eq!(sci(-1.940551663), "-1.94055166300e+00");
        assert_eq!(sci(1.5e-120), "1.50000000000e-120");
        assert_eq!(sci(0.0), "0.00000000000e+00");
        assert_eq!(sci(-0.0), "0.00000000000e+00");
        assert_eq!(sci(12345.0), "1.23450000000e+04");
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["n", "i", "root", "w"]);
        c.push(["1".to_string(), "2".into(), sci(2.5), sci(3.75)]);
        assert_eq!(c.as_str(), "n,i,root,w\n1,2,2.50000000000e+00,3.75000000000e+00\n");
    }
}
