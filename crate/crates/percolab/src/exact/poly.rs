use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Univariate polynomial in `p` with exact rational coefficients; index = power.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolynomialInP {
    coeffs: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct PolyDoc {
    num: Vec<String>,
    den: Vec<String>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational with the shortest decimal expansion that round-trips to `x`.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Parameter(format!("{x} is not finite")));
    }
    parse_rational(&format!("{x}"))
}

/// Parses `a/b`, an integer or a plain decimal such as `0.35` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Argument(format!("`{s}` is not a rational number"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{}{}", if int.is_empty() { "0" } else { int }, frac).parse().map_err(|_| bad())?;
    let r = BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
    Ok(if neg { -r } else { r })
}

pub fn to_f64(r: &BigRational) -> f64 {
    // scale to keep precision for tiny or huge ratios
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b != 0.0 && a.abs() > 1e-300 => a / b,
        _ => {
            let shift = r.numer().bits() as i64 - r.denom().bits() as i64 - 60;
            let (n, d) = if shift > 0 {
                (r.numer().clone(), r.denom() << shift as usize)
            } else {
                (r.numer() << (-shift) as usize, r.denom().clone())
            };
            let q = (n / d).to_f64().unwrap_or(0.0);
            q * 2f64.powi(shift as i32)
        }
    }
}

fn binom_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 1..=n {
        let next = &row[k - 1] * BigInt::from(n - k + 1) / BigInt::from(k);
        row.push(next);
    }
    row
}

impl PolynomialInP {
    pub fn zero() -> Self {
        PolynomialInP { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        PolynomialInP { coeffs: vec![c] }.trimmed()
    }

    pub fn one() -> Self {
        PolynomialInP::constant(BigRational::one())
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        PolynomialInP { coeffs }.trimmed()
    }

    /// `sum_k c_k p^k (1 - p)^(m - k)` expanded into powers of `p`.
    pub fn from_binomial_basis(c: &[BigRational], m: usize) -> Self {
        let mut out = vec![BigRational::zero(); m + 1];
        let rows: Vec<Vec<BigInt>> = (0..=m).map(binom_row).collect();
        for (k, ck) in c.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            // (1-p)^(m-k) = sum_i C(m-k, i) (-p)^i
            let row = &rows[m - k];
            for (i, b) in row.iter().enumerate() {
                let term = ck * BigRational::from_integer(b.clone());
                if i % 2 == 0 {
                    out[k + i] += term;
                } else {
                    out[k + i] -= term;
                }
            }
        }
        PolynomialInP::from_coeffs(out)
    }

    /// `p^a (1 - p)^b`.
    pub fn monomial_pq(a: usize, b: usize) -> Self {
        let mut c = vec![BigRational::zero(); a + 1];
        c[a] = BigRational::one();
        PolynomialInP::from_binomial_basis(&c, a + b)
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                let b = other.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                a + b
            })
            .collect();
        PolynomialInP::from_coeffs(c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        PolynomialInP::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return PolynomialInP::zero();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        PolynomialInP::from_coeffs(c)
    }

    pub fn derivative(&self) -> Self {
        PolynomialInP::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, p: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * p + c;
        }
        acc
    }

    pub fn eval_f64(&self, p: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * p + to_f64(c))
    }

    /// True when the values at `p = 0, 0.1, ..., 1` all lie in `[0, 1]`.
    pub fn looks_like_probability(&self) -> bool {
        (0..=10).all(|i| {
            let v = self.eval(&rat(i, 10));
            !v.is_negative() && v <= BigRational::one()
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = PolyDoc {
            num: self.coeffs.iter().map(|c| c.numer().to_string()).collect(),
            den: self.coeffs.iter().map(|c| c.denom().to_string()).collect(),
        };
        serde_json::to_value(doc).expect("plain strings serialise")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let doc: PolyDoc = serde_json::from_value(v.clone())?;
        if doc.num.len() != doc.den.len() {
            return Err(Error::Argument("num and den arrays differ in length".into()));
        }
        let mut c = Vec::with_capacity(doc.num.len());
        for (n, d) in doc.num.iter().zip(&doc.den) {
            c.push(parse_rational(&format!("{n}/{d}"))?);
        }
        Ok(PolynomialInP::from_coeffs(c))
    }
}

impl std::fmt::Display for PolynomialInP {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*p")?,
                _ => write!(f, "{c}*p^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_basis_sums_to_one() {
        // sum_k C(m,k) p^k (1-p)^(m-k) = 1
        let m = 7;
        let c: Vec<BigRational> = binom_row(m).into_iter().map(BigRational::from_integer).collect();
        assert_eq!(PolynomialInP::from_binomial_basis(&c, m), PolynomialInP::one());
    }

    #[test]
    fn monomial_and_derivative() {
        let q = PolynomialInP::monomial_pq(2, 1); // p^2 - p^3
        assert_eq!(q.coeffs(), &[rat(0, 1), rat(0, 1), rat(1, 1), rat(-1, 1)]);
        assert_eq!(q.derivative().coeffs(), &[rat(0, 1), rat(2, 1), rat(-3, 1)]);
        assert_eq!(q.eval(&rat(1, 2)), rat(1, 8));
        assert!(q.looks_like_probability());
        assert!(!q.scale(&rat(-1, 1)).looks_like_probability());
    }

    #[test]
    fn json_round_trip() {
        let q = PolynomialInP::from_coeffs(vec![rat(1, 3), rat(-5, 7), rat(0, 1), rat(2, 9)]);
        let v = q.to_json_value();
        assert_eq!(v["num"][1], "-5");
        assert_eq!(PolynomialInP::from_json_value(&v).unwrap(), q);
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("0.35").unwrap(), rat(7, 20));
        assert_eq!(parse_rational("3/9").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(rational_from_f64(0.7).unwrap(), rat(7, 10));
        assert!((to_f64(&rat(1, 3)) - 1.0 / 3.0).abs() < 1e-16);
        let big = BigInt::from(10u32).pow(400);
        let third = BigRational::new(&big + BigInt::one(), big * BigInt::from(3));
        assert!((to_f64(&third) - 1.0 / 3.0).abs() < 1e-15);
    }
}
