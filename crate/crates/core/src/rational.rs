//! Exact rationals. Everything numeric in the crate is a [`Q`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

/// `n/d` as a normalized rational. Panics if `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"7"`, `"-3"` or `"num/den"` (big integers allowed).
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

/// `num/den`, or just `num` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Always `num/den`, as used in trace documents and reports.
pub fn fmt_q_frac(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Decimal expansion truncated toward zero after `digits` places.
pub fn to_decimal(x: &Q, digits: usize) -> String {
    let neg = x.is_negative();
    let a = x.abs();
    let (int, mut rem) = a.numer().div_rem(a.denom());
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if digits > 0 {
        out.push('.');
        let ten = BigInt::from(10);
        for _ in 0..digits {
            rem *= &ten;
            let (d, r) = rem.div_rem(a.denom());
            out.push_str(&d.to_string());
            rem = r;
        }
    }
    out
}

pub fn to_f64(x: &Q) -> f64 {
    // good enough for display and float-side tolerances
    let s = to_decimal(x, 17);
    s.parse().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("6/4"), Some(q(3, 2)));
        assert_eq!(parse_q(" 5 "), Some(qi(5)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("x"), None);
        assert_eq!(fmt_q(&q(3, 2)), "3/2");
        assert_eq!(fmt_q(&qi(4)), "4");
        assert_eq!(fmt_q_frac(&qi(4)), "4/1");
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&q(1, 3), 4), "0.3333");
        assert_eq!(to_decimal(&q(-7, 2), 2), "-3.50");
        assert_eq!(to_decimal(&q(2540, 1146), 12), "2.216404886561");
    }

    #[test]
    fn huge_fractions_parse() {
        let e = parse_q("6495602330607721/18889465931478580854784").unwrap();
        assert!(e > Q::zero() && e < q(1, 1_000_000));
    }
}
