//! Exact rational helpers shared by the model, solver and exporters.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for every cost, coefficient and LP value.
pub type Rational = BigRational;

/// Significant digits used when a rational has no finite decimal expansion.
pub const DECIMAL_DIGITS: usize = 15;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integral(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large numerator or denominator: scale down before dividing.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Exact conversion of a finite float. Returns `None` for NaN or infinities.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `"12"`, `"-0.25"`, `"1.5e3"` or `"7/3"` into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut all = String::with_capacity(whole.len() + frac.len());
    all.push_str(whole);
    all.push_str(frac);
    let mut value = Rational::from_integer(all.parse::<BigInt>().ok()?);
    let scale = exponent - frac.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

fn has_finite_decimal(r: &Rational) -> bool {
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while d.is_even() {
        d /= &two;
    }
    while (&d % &five).is_zero() {
        d /= &five;
    }
    d.is_one()
}

/// Renders a rational as a plain decimal string.
///
/// Values with a finite decimal expansion are printed exactly with trailing
/// zeros removed. Others are rounded half away from zero to
/// [`DECIMAL_DIGITS`] significant digits. Re-parsing the output and rendering
/// it again yields the same string.
pub fn format_decimal(r: &Rational) -> String {
    if r.is_zero() {
        return String::from("0");
    }
    let negative = r.is_negative();
    let abs = r.abs();
    let ten = BigInt::from(10);
    let (digits, scale) = if has_finite_decimal(&abs) {
        // Smallest k with abs * 10^k integral.
        let mut k = 0usize;
        let mut v = abs.clone();
        while !v.denom().is_one() {
            v *= Rational::from_integer(ten.clone());
            k += 1;
        }
        (v.to_integer(), k as i64)
    } else {
        // Decimal exponent e with 10^e <= abs < 10^(e+1).
        let mut e: i64 = (abs.numer().to_string().len() as i64) - (abs.denom().to_string().len() as i64);
        let pow10 = |p: i64| -> Rational {
            if p >= 0 {
                Rational::from_integer(num_traits::pow(ten.clone(), p as usize))
            } else {
                Rational::new(BigInt::one(), num_traits::pow(ten.clone(), (-p) as usize))
            }
        };
        while abs >= pow10(e + 1) {
            e += 1;
        }
        while abs < pow10(e) {
            e -= 1;
        }
        let mut scale = DECIMAL_DIGITS as i64 - 1 - e;
        let mut scaled = round_half_away(&(&abs * pow10(scale)));
        if scaled >= num_traits::pow(ten.clone(), DECIMAL_DIGITS) {
            scaled = round_half_away(&(&abs * pow10(scale - 1)));
            scale -= 1;
        }
        // Strip trailing zeros so the output is canonical.
        while scale > 0 && (&scaled % &ten).is_zero() {
            scaled /= &ten;
            scale -= 1;
        }
        if scale < 0 {
            scaled *= num_traits::pow(ten.clone(), (-scale) as usize);
            scale = 0;
        }
        (scaled, scale)
    };
    let mut text = digits.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if scale == 0 {
        out.push_str(&text);
        return out;
    }
    let scale = scale as usize;
    if text.len() <= scale {
        let mut padded: String = core::iter::repeat_n('0', scale - text.len()).collect();
        padded.push_str(&text);
        text = padded;
        out.push_str("0.");
        out.push_str(&text);
        return out;
    }
    let (w, f) = text.split_at(text.len() - scale);
    let _ = write!(out, "{w}.{f}");
    out
}

fn round_half_away(r: &Rational) -> BigInt {
    let floor = r.floor();
    let frac = r - &floor;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if frac >= half {
        floor.to_integer() + BigInt::one()
    } else {
        floor.to_integer()
    }
}

/// Sums a list of rationals.
pub fn sum<'a>(items: impl IntoIterator<Item = &'a Rational>) -> Rational {
    items.into_iter().fold(Rational::zero(), |acc, x| acc + x)
}

/// Sorts `(index, value)` pairs by index, merges duplicates and drops zeros.
pub fn normalize_terms(mut terms: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    terms.sort_by_key(|t| t.0);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(terms.len());
    for (idx, value) in terms {
        match out.last_mut() {
            Some(last) if last.0 == idx => last.1 += value,
            _ => out.push((idx, value)),
        }
    }
    out.retain(|t| !t.1.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_decimal("12").unwrap(), int(12));
        assert_eq!(parse_decimal("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_decimal("1.5e3").unwrap(), int(1500));
        assert_eq!(parse_decimal("7/3").unwrap(), ratio(7, 3));
        assert_eq!(parse_decimal(".5").unwrap(), ratio(1, 2));
        assert!(parse_decimal("abc").is_none());
        assert!(parse_decimal("1/0").is_none());
        assert!(parse_decimal("").is_none());
    }

    #[test]
    fn formats_exact_and_rounded() {
        assert_eq!(format_decimal(&int(0)), "0");
        assert_eq!(format_decimal(&int(-42)), "-42");
        assert_eq!(format_decimal(&ratio(5, 4)), "1.25");
        assert_eq!(format_decimal(&ratio(1, 80)), "0.0125");
        assert_eq!(format_decimal(&ratio(5, 3)), "1.66666666666667");
        assert_eq!(format_decimal(&ratio(-1, 3)), "-0.333333333333333");
        assert_eq!(format_decimal(&ratio(200, 3)), "66.6666666666667");
    }

    #[test]
    fn formatting_is_stable_under_reparse() {
        for (n, d) in [(5, 3), (1, 7), (22, 7), (1000001, 3), (-2, 9), (1, 30000)] {
            let once = format_decimal(&ratio(n, d));
            let twice = format_decimal(&parse_decimal(&once).unwrap());
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn normalize_merges_and_drops_zero() {
        let t = normalize_terms(alloc::vec![(3, int(1)), (1, int(2)), (3, int(-1)), (2, int(5))]);
        assert_eq!(t, alloc::vec![(1, int(2)), (2, int(5))]);
        assert_eq!(to_f64(&ratio(1, 4)).to_string(), "0.25");
    }
}
