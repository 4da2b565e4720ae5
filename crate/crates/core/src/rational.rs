//! Sparse multivariate polynomials with exact rational coefficients in the
//! variables `x, y, z, a, b`.
//!
//! Terms are kept in a `BTreeMap` with zero coefficients removed, so two
//! polynomials are equal exactly when their term maps are equal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X = 0,
    Y = 1,
    Z = 2,
    A = 3,
    B = 4,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::X, Var::Y, Var::Z, Var::A, Var::B];

    pub fn name(self) -> &'static str {
        ["x", "y", "z", "a", "b"][self as usize]
    }
}

pub type Exponents = [u32; 5];

#[derive(Clone, PartialEq, Eq, Default)]
pub struct RationalPoly {
    terms: BTreeMap<Exponents, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl RationalPoly {
    pub fn zero() -> RationalPoly {
        RationalPoly::default()
    }

    pub fn one() -> RationalPoly {
        RationalPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> RationalPoly {
        RationalPoly::term(c, [0; 5])
    }

    pub fn int(n: i64) -> RationalPoly {
        RationalPoly::constant(rat(n))
    }

    pub fn var(v: Var) -> RationalPoly {
        let mut e = [0; 5];
        e[v as usize] = 1;
        RationalPoly::term(BigRational::one(), e)
    }

    pub fn term(c: BigRational, exps: Exponents) -> RationalPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        RationalPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, exps: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn pow(&self, n: u32) -> RationalPoly {
        (0..n).fold(RationalPoly::one(), |acc, _| &acc * self)
    }

    pub fn scale(&self, c: &BigRational) -> RationalPoly {
        let mut out = RationalPoly::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    /// Largest exponent of `v`, or `None` for the zero polynomial.
    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|e| e[v as usize]).max()
    }

    /// Coefficient of `v^n`, as a polynomial in the remaining variables.
    pub fn coeff_of(&self, v: Var, n: u32) -> RationalPoly {
        let mut out = RationalPoly::zero();
        for (e, c) in &self.terms {
            if e[v as usize] == n {
                let mut e2 = *e;
                e2[v as usize] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// Coefficients of `1, v, v^2, ..` up to the degree in `v`.
    pub fn coefficients_in(&self, v: Var) -> Vec<RationalPoly> {
        match self.degree_in(v) {
            None => Vec::new(),
            Some(d) => (0..=d).map(|n| self.coeff_of(v, n)).collect(),
        }
    }

    /// Replaces `v` by `value` and expands.
    pub fn substitute(&self, v: Var, value: &RationalPoly) -> RationalPoly {
        let max = self.degree_in(v).unwrap_or(0);
        let powers: Vec<RationalPoly> = (0..=max)
            .scan(RationalPoly::one(), |acc, i| {
                let cur = acc.clone();
                if i < max {
                    *acc = &*acc * value;
                }
                Some(cur)
            })
            .collect();
        let mut out = RationalPoly::zero();
        for (e, c) in &self.terms {
            let k = e[v as usize];
            let mut rest = *e;
            rest[v as usize] = 0;
            let mono = RationalPoly::term(c.clone(), rest);
            out = out + &mono * &powers[k as usize];
        }
        out
    }

    pub fn specialize(&self, v: Var, value: &BigRational) -> RationalPoly {
        self.substitute(v, &RationalPoly::constant(value.clone()))
    }

    /// Exact division by `v^n`; `None` if some term has a smaller power.
    pub fn div_by_var_power(&self, v: Var, n: u32) -> Option<RationalPoly> {
        let mut out = RationalPoly::zero();
        for (e, c) in &self.terms {
            if e[v as usize] < n {
                return None;
            }
            let mut e2 = *e;
            e2[v as usize] -= n;
            out.add_term(e2, c.clone());
        }
        Some(out)
    }

    /// Division with remainder treating both sides as polynomials in `v`.
    /// Requires the leading coefficient of `divisor` in `v` to be a nonzero
    /// constant.
    pub fn div_rem_in(&self, v: Var, divisor: &RationalPoly) -> Option<(RationalPoly, RationalPoly)> {
        let dd = divisor.degree_in(v)?;
        let lead = divisor.coeff_of(v, dd);
        let lead_c = lead.as_constant()?;
        let mut q = RationalPoly::zero();
        let mut r = self.clone();
        while let Some(dr) = r.degree_in(v) {
            if dr < dd || r.is_zero() {
                break;
            }
            let top = r.coeff_of(v, dr).scale(&lead_c.recip());
            let mut e = [0; 5];
            e[v as usize] = dr - dd;
            let shift = &top * &RationalPoly::term(BigRational::one(), e);
            q = q + shift.clone();
            r = r - &shift * divisor;
        }
        Some((q, r))
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&[0; 5]).cloned(),
            _ => None,
        }
    }

    pub fn eval(&self, values: &[BigRational; 5]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= num_traits::pow(values[i].clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_complex(&self, values: &[Complex64; 5]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (e, c) in &self.terms {
            let mut t = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= values[i].powu(k);
                }
            }
            acc += t;
        }
        acc
    }
}

impl Add for RationalPoly {
    type Output = RationalPoly;
    fn add(mut self, rhs: RationalPoly) -> RationalPoly {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Add<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        self.clone() + rhs.clone()
    }
}

impl Neg for RationalPoly {
    type Output = RationalPoly;
    fn neg(mut self) -> RationalPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Sub for RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: RationalPoly) -> RationalPoly {
        self + (-rhs)
    }
}

impl Sub<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        self.clone() - rhs.clone()
    }
}

impl Mul<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = RationalPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let mut e = *e1;
                for i in 0..5 {
                    e[i] += e2[i];
                }
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Mul for RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: RationalPoly) -> RationalPoly {
        &self * &rhs
    }
}

impl fmt::Display for RationalPoly {
    /// Terms in decreasing lexicographic exponent order, e.g. `x^4 - 2*a*x^3 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = Var::ALL
                .iter()
                .filter(|v| e[**v as usize] > 0)
                .map(|v| match e[*v as usize] {
                    1 => v.name().to_string(),
                    k => format!("{}^{k}", v.name()),
                })
                .collect();
            let negative = c.is_negative();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Shorthand used by the certificates: `x`, `y`, ... as polynomials.
pub fn vars() -> [RationalPoly; 5] {
    Var::ALL.map(RationalPoly::var)
}
