//! Exact check of the parameter constraint system behind the `2 - 2 alpha` bound.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateTable {
    pub alpha: Q,
    pub beta: Q,
    pub lambda: Q,
    pub epsilon: Q,
    pub w: Q,
    pub w_prime: Q,
    pub eta: Q,
    pub kappa: Q,
    pub gamma: Q,
    pub omega_1: Q,
    pub omega_2: Q,
    pub omega_3: Q,
}

const TABLE2: &str = include_str!("../../../../data/table2.txt");

const NAMES: [&str; 12] = [
    "alpha", "beta", "lambda", "epsilon", "w", "w_prime", "eta", "kappa", "gamma", "omega_1", "omega_2",
    "omega_3",
];

impl CertificateTable {
    /// The published parameter values.
    pub fn table2() -> Self {
        Self::parse(TABLE2).expect("bundled table parses")
    }

    /// Parses `name value` lines (an optional `=` is allowed); `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vals: Vec<Option<Q>> = vec![None; NAMES.len()];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let toks: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == '=').filter(|t| !t.is_empty()).collect();
            if toks.len() != 2 {
                return Err(err("expected `name value`"));
            }
            let idx = NAMES.iter().position(|n| *n == toks[0]).ok_or_else(|| err("unknown parameter"))?;
            if vals[idx].is_some() {
                return Err(err("parameter given twice"));
            }
            vals[idx] = Some(parse_q(toks[1]).ok_or_else(|| err("bad rational"))?);
        }
        if let Some(i) = vals.iter().position(Option::is_none) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("missing parameter {}", NAMES[i]),
            });
        }
        let mut it = vals.into_iter().map(Option::unwrap);
        let mut next = || it.next().unwrap();
        Ok(CertificateTable {
            alpha: next(),
            beta: next(),
            lambda: next(),
            epsilon: next(),
            w: next(),
            w_prime: next(),
            eta: next(),
            kappa: next(),
            gamma: next(),
            omega_1: next(),
            omega_2: next(),
            omega_3: next(),
        })
    }
}

/// Left-hand sides of the four weighted inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateSums {
    pub a: Q,
    pub b1: Q,
    pub b2: Q,
    pub r: Q,
    pub bound: Q,
}

/// Evaluates the four explicit forms. Assumes `beta`, `gamma` and `5 + beta` are nonzero.
pub fn certificate_sums(t: &CertificateTable) -> CertificateSums {
    let one = Q::one();
    let two = Q::from_integer(2.into());
    let (al, be, la, ep, w, wp) = (&t.alpha, &t.beta, &t.lambda, &t.epsilon, &t.w, &t.w_prime);
    let (o1, o2, o3) = (&t.omega_1, &t.omega_2, &t.omega_3);
    let five_b = Q::from_integer(5.into()) + be;

    let p = &one - wp * (&one + be) * (&one - w);
    let m1 = al / be;
    let m2 = &p * (al + ep) / be;
    let m3 = (al + (&one - al - al / be) * &p * ep) / be;
    let max_term = m1.max(m2).max(m3);
    let shared = &two * o2 * &max_term + o3 * (&two + al + &two * al / be);
    let growth = wp * (&one + w * (&one - be) / &five_b);

    let a = &two * o1 * ((&one - la) + al / be) + &two * o2 * (&one + ep) * (&one - la) + &shared;
    let ext = &one + ep - ep * wp * (&one + (&one - &two * w) * (&one - la));
    let b1 = &two * o1 * (&one + al / be) + &two * o2 * (&ext + &t.gamma * &growth) + &shared;
    let b2 = &two * o1 * (&one + al / be) + &two * o2 * &ext + &shared;
    let three = Q::from_integer(3.into());
    let r = &two * o2 * &growth - o3 * (&one - &t.eta) * (&one - (&three * la + &t.kappa) / &t.gamma);
    CertificateSums {
        a,
        b1,
        b2,
        r,
        bound: &two - &two * al,
    }
}

/// Names of all violated constraints; empty means the table certifies `2 - 2 alpha`.
pub fn verify_parameters(t: &CertificateTable) -> (bool, Vec<String>) {
    let zero = Q::zero();
    let one = Q::one();
    let mut bad: Vec<String> = Vec::new();
    let mut need = |ok: bool, name: &str| {
        if !ok {
            bad.push(name.to_string());
        }
    };
    let open = |x: &Q| *x > zero && *x < one;
    need(t.alpha > zero, "alpha > 0");
    need(open(&t.beta), "0 < beta < 1");
    need(open(&t.epsilon), "0 < epsilon < 1");
    need(open(&t.eta), "0 < eta < 1");
    need(t.w > zero && t.w <= Q::new(1.into(), 2.into()), "0 < w <= 1/2");
    for (name, o) in [("omega_1 >= 0", &t.omega_1), ("omega_2 >= 0", &t.omega_2), ("omega_3 >= 0", &t.omega_3)] {
        need(*o >= zero, name);
    }
    need(&t.omega_1 + &t.omega_2 + &t.omega_3 == one, "sum omega_i = 1");
    // the remaining rows divide by these
    if t.beta.is_zero() || t.eta.is_zero() || t.gamma.is_zero() || t.beta == one {
        need(false, "nonzero denominators");
        return (bad.is_empty(), bad);
    }
    let (be, ep, w) = (&t.beta, &t.epsilon, &t.w);
    let five_b = Q::from_integer(5.into()) + be;
    let lower = &one / (&one + (&one - be) / &five_b * w);
    need(t.w_prime >= lower, "w' lower bound");
    let denom = &one + Q::from_integer(3.into()) * ep - ep * w * (Q::from_integer(9.into()) + Q::from_integer(3.into()) * be) / &five_b;
    need(!denom.is_zero() && t.w_prime <= (&one + ep) / &denom, "w' upper bound");
    let ratio = (&one + be) / (&one - be);
    need(t.kappa == Q::from_integer(4.into()) * &t.lambda * &ratio, "kappa definition");
    let gamma = &t.lambda / &t.eta
        * (Q::from_integer(4.into())
            + Q::from_integer(3.into()) * &t.eta
            + Q::from_integer(4.into()) * (&one + &t.eta) * &ratio);
    need(t.gamma == gamma, "gamma definition");
    let s = certificate_sums(t);
    need(s.a <= s.bound, "inequality A");
    need(s.b1 <= s.bound, "inequality B1");
    need(s.b2 <= s.bound, "inequality B2");
    need(s.r <= zero, "inequality r");
    (bad.is_empty(), bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{fmt_q, q, qi};

    #[test]
    fn table2_certifies() {
        let t = CertificateTable::table2();
        let (ok, bad) = verify_parameters(&t);
        assert!(ok, "{bad:?}");
        assert_eq!(fmt_q(&t.alpha), "1/200000000000");
        assert_eq!(qi(2) - qi(2) * &t.alpha, qi(2) - q(1, 100_000_000_000));
    }

    #[test]
    fn beta_out_of_range() {
        let mut t = CertificateTable::table2();
        t.beta = qi(2);
        let (ok, bad) = verify_parameters(&t);
        assert!(!ok);
        assert!(bad.contains(&"0 < beta < 1".to_string()));
    }

    #[test]
    fn omega_sum() {
        let mut t = CertificateTable::table2();
        t.omega_1 += q(1, 252);
        let (_, bad) = verify_parameters(&t);
        assert!(bad.contains(&"sum omega_i = 1".to_string()));
    }

    #[test]
    fn parse_errors() {
        assert!(CertificateTable::parse("alpha 1/2\n").is_err());
        assert!(CertificateTable::parse("bogus 1\n").is_err());
        let mut txt = TABLE2.to_string();
        txt.push_str("alpha 1\n");
        assert!(CertificateTable::parse(&txt).is_err());
    }
}
