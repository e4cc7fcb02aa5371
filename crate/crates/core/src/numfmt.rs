//! Deterministic number formatting shared by printers and reports.

use crate::C64;

/// Rounds to 12 significant digits. Non-finite values pass through.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// 12-significant-digit text with no trailing zeros. Magnitudes below
/// `1e-5` or from `1e15` up use exponent notation (`2.5e-7`).
pub fn fmt_sig12(x: f64) -> String {
    let r = round_sig12(x);
    if r == 0.0 {
        return "0".into();
    }
    if r.is_finite() && (r.abs() < 1e-5 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn fmt_complex_sig12(c: C64) -> String {
    let re = fmt_sig12(c.re);
    let im = fmt_sig12(c.im.abs());
    let sign = if c.im < 0.0 { '-' } else { '+' };
    format!("({re}{sign}{im}i)")
}

/// Splits a coefficient into a sign flag and the text of its magnitude for
/// sign-aware sums. Genuinely complex coefficients are printed as a
/// parenthesized literal and never flagged negative.
pub(crate) fn fmt_complex_coeff(c: C64) -> (bool, String) {
    if round_sig12(c.im) == 0.0 {
        let negative = c.re < 0.0;
        (negative, fmt_sig12(c.re.abs()))
    } else {
        (false, fmt_complex_sig12(c))
    }
}

/// Exact (shortest round-trip) literal for a complex constant, in the
/// expression grammar: `2`, `(-2)`, `(1.5-0.25i)`.
pub(crate) fn fmt_literal(c: C64) -> String {
    if c.im == 0.0 {
        if c.re.is_sign_negative() {
            format!("({})", c.re)
        } else {
            format!("{}", c.re)
        }
    } else {
        let sign = if c.im.is_sign_negative() { '-' } else { '+' };
        format!("({}{}{}i)", c.re, sign, c.im.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_sig12(0.25), "0.25");
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(-2.0), "-2");
        assert_eq!(fmt_sig12(1e-20), "1e-20");
        assert_eq!(fmt_sig12(-2.5e-7), "-2.5e-7");
        assert_eq!(fmt_sig12(1.0e16 / 3.0), "3.33333333333e15");
        assert_eq!(fmt_sig12(0.1 + 0.2), "0.3");
    }

    #[test]
    fn literals() {
        assert_eq!(fmt_literal(C64::new(2.0, 0.0)), "2");
        assert_eq!(fmt_literal(C64::new(-2.0, 0.0)), "(-2)");
        assert_eq!(fmt_literal(C64::new(1.5, -0.25)), "(1.5-0.25i)");
    }
}
