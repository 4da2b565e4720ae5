//! Ternary cubic forms over finite fields and over the integers.
//!
//! Coefficient vectors always use the monomial order
//! `[x^3, x^2y, x^2z, xy^2, xyz, xz^2, y^3, y^2z, yz^2, z^3]`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::finitefield::{Elem, FieldDesc, FieldError, ProjPoint, Scalar};
use crate::poly::{self, BiPoly};
use crate::rational::{RationalPoly, Var};

/// Exponents of `(x, y, z)` for each coefficient slot.
pub const MONOMIALS: [[u32; 3]; 10] = [
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

pub fn monomial_index(exps: [u32; 3]) -> Option<usize> {
    MONOMIALS.iter().position(|m| *m == exps)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("form over {form} cannot be evaluated at a point over {point}")]
    FieldMismatch { form: String, point: String },
    #[error("expected {expected} coefficients, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("the zero form has no factorization")]
    ZeroForm,
    #[error("need at least two nonzero forms, got {0}")]
    TooFewForms(usize),
    #[error("cannot parse form: {0}")]
    Parse(String),
}

/// A cubic form with coefficients in a finite field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TernaryForm {
    field: FieldDesc,
    coeffs: [Elem; 10],
}

impl TernaryForm {
    pub fn new(field: &FieldDesc, coeffs: [Elem; 10]) -> Result<TernaryForm, FormError> {
        if coeffs.iter().any(|&c| c >= field.order()) {
            return Err(FieldError::BadCoordinates {
                field: field.to_string(),
            }
            .into());
        }
        Ok(TernaryForm {
            field: field.clone(),
            coeffs,
        })
    }

    pub fn zero(field: &FieldDesc) -> TernaryForm {
        TernaryForm {
            field: field.clone(),
            coeffs: [0; 10],
        }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem; 10] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn can_evaluate_over(&self, target: &FieldDesc) -> bool {
        &self.field == target
            || (self.field.is_prime_field()
                && self.field.characteristic() == target.characteristic())
    }

    /// Evaluates at raw coordinates in `target`. The caller guarantees that
    /// the form's coefficients embed into `target`.
    #[inline]
    pub(crate) fn eval_raw(&self, target: &FieldDesc, [x, y, z]: [Elem; 3]) -> Elem {
        let f = target;
        let c = &self.coeffs;
        // Horner in x over polynomials in (y, z)
        let y2 = f.mul(y, y);
        let z2 = f.mul(z, z);
        let yz = f.mul(y, z);
        let a2 = c[0];
        let a1 = f.add(f.mul(c[1], y), f.mul(c[2], z));
        let a0 = f.add(f.add(f.mul(c[3], y2), f.mul(c[4], yz)), f.mul(c[5], z2));
        let b = f.add(
            f.add(f.mul(c[6], f.mul(y2, y)), f.mul(c[7], f.mul(y2, z))),
            f.add(f.mul(c[8], f.mul(y, z2)), f.mul(c[9], f.mul(z2, z))),
        );
        let h = f.add(f.mul(a2, x), a1);
        let h = f.add(f.mul(h, x), a0);
        f.add(f.mul(h, x), b)
    }

    /// Coefficients of `f(x, y, 1)` as a polynomial in `y`, for a fixed `x`.
    #[inline]
    pub(crate) fn y_poly_at(&self, target: &FieldDesc, x: Elem) -> [Elem; 4] {
        let f = target;
        let c = &self.coeffs;
        let x2 = f.mul(x, x);
        let x3 = f.mul(x2, x);
        [
            f.add(f.add(f.mul(c[0], x3), f.mul(c[2], x2)), f.add(f.mul(c[5], x), c[9])),
            f.add(f.add(f.mul(c[1], x2), f.mul(c[4], x)), c[8]),
            f.add(f.mul(c[3], x), c[7]),
            c[6],
        ]
    }

    /// Coefficients of `f(x, 1, 0)` as a polynomial in `x`.
    pub(crate) fn line_at_infinity(&self) -> [Elem; 4] {
        let c = &self.coeffs;
        [c[6], c[3], c[1], c[0]]
    }

    /// Dehomogenization `f(x, y, 1)` as a polynomial in `x` over `k[y]`.
    fn dehomogenize(&self) -> BiPoly {
        let mut out: BiPoly = vec![Vec::new(); 4];
        for (slot, &[ex, ey, _]) in MONOMIALS.iter().enumerate() {
            let c = self.coeffs[slot];
            if c == 0 {
                continue;
            }
            let coeff = &mut out[ex as usize];
            if coeff.len() <= ey as usize {
                coeff.resize(ey as usize + 1, 0);
            }
            coeff[ey as usize] = c;
        }
        while out.last().is_some_and(|c| c.is_empty()) {
            out.pop();
        }
        out
    }

    fn divisible_by_z(&self) -> bool {
        MONOMIALS
            .iter()
            .zip(&self.coeffs)
            .all(|(m, &c)| m[2] > 0 || c == 0)
    }

    /// Reads a form written in the rendering grammar, reducing integer
    /// coefficients into the prime subfield of `field`.
    pub fn parse(field: &FieldDesc, text: &str) -> Result<TernaryForm, FormError> {
        let ints = IntegerCubic::from_str(text)?;
        Ok(ints.reduce(field))
    }
}

impl fmt::Display for TernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, bool)> = self
            .coeffs
            .iter()
            .map(|&c| (self.field.format_elem(c), c == 0))
            .collect();
        write_terms(f, &terms)
    }
}

impl fmt::Debug for TernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} over {}", self.field)
    }
}

fn monomial_text(exps: [u32; 3]) -> String {
    let mut parts = Vec::new();
    for (name, e) in ["x", "y", "z"].iter().zip(exps) {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

/// Writes `c*mono + ...`, dropping zero terms and unit coefficients.
fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(String, bool)]) -> fmt::Result {
    let mut first = true;
    for ((coeff, is_zero), &exps) in terms.iter().zip(&MONOMIALS) {
        if *is_zero {
            continue;
        }
        let (negative, magnitude) = match coeff.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, coeff.as_str()),
        };
        let sep = match (first, negative) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        let mono = monomial_text(exps);
        if magnitude == "1" {
            write!(f, "{sep}{mono}")?;
        } else if magnitude.contains('+') {
            write!(f, "{sep}({magnitude})*{mono}")?;
        } else {
            write!(f, "{sep}{magnitude}*{mono}")?;
        }
        first = false;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Evaluates `form` at `pt`. Forms over GF(p) may be evaluated at points of
/// any GF(p^k).
pub fn eval_form(form: &TernaryForm, pt: &ProjPoint) -> Result<Scalar, FormError> {
    if !form.can_evaluate_over(pt.field()) {
        return Err(FormError::FieldMismatch {
            form: form.field.to_string(),
            point: pt.field().to_string(),
        });
    }
    let v = form.eval_raw(pt.field(), pt.coords());
    Ok(Scalar::from_elem(pt.field(), v)?)
}

/// Linear combination `sum coeffs[i] * basis[i]`.
pub fn combine(basis: &[TernaryForm], coeffs: &[Scalar]) -> Result<TernaryForm, FormError> {
    let field = basis.first().map(|b| b.field.clone()).ok_or(FormError::LengthMismatch {
        expected: 1,
        got: 0,
    })?;
    if basis.len() != coeffs.len() {
        return Err(FormError::LengthMismatch {
            expected: basis.len(),
            got: coeffs.len(),
        });
    }
    for (b, c) in basis.iter().zip(coeffs) {
        field.ensure_same(&b.field)?;
        field.ensure_same(c.field())?;
    }
    let raw: Vec<Elem> = coeffs.iter().map(Scalar::elem).collect();
    Ok(combine_raw(&field, basis, &raw))
}

pub(crate) fn combine_raw(field: &FieldDesc, basis: &[TernaryForm], coeffs: &[Elem]) -> TernaryForm {
    let mut out = [0; 10];
    for (b, &c) in basis.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for (o, &bc) in out.iter_mut().zip(&b.coeffs) {
            *o = field.add(*o, field.mul(c, bc));
        }
    }
    TernaryForm {
        field: field.clone(),
        coeffs: out,
    }
}

/// Whether `f` and `g` share a nonconstant factor.
///
/// Exact: a common homogeneous factor is either a power of `z` or survives
/// dehomogenization at `z = 1`, where the bivariate gcd is computed by a
/// primitive pseudo-remainder sequence.
pub fn has_common_factor(f: &TernaryForm, g: &TernaryForm) -> Result<bool, FormError> {
    f.field.ensure_same(&g.field)?;
    if f.is_zero() || g.is_zero() {
        return Err(FormError::ZeroForm);
    }
    Ok(share_factor_unchecked(f, g))
}

fn share_factor_unchecked(f: &TernaryForm, g: &TernaryForm) -> bool {
    if f.divisible_by_z() && g.divisible_by_z() {
        return true;
    }
    poly::bivariate_share_factor(&f.field, &f.dehomogenize(), &g.dehomogenize())
}

/// Whether all given forms share one nonconstant factor. Zero forms are
/// ignored; at least two nonzero forms are required.
pub fn common_factor_all(forms: &[TernaryForm]) -> Result<bool, FormError> {
    let nonzero: Vec<&TernaryForm> = forms.iter().filter(|f| !f.is_zero()).collect();
    if nonzero.len() < 2 {
        return Err(FormError::TooFewForms(nonzero.len()));
    }
    let field = &nonzero[0].field;
    for f in &nonzero {
        field.ensure_same(&f.field)?;
    }
    if nonzero.iter().all(|f| f.divisible_by_z()) {
        return Ok(true);
    }
    let mut acc = nonzero[0].dehomogenize();
    for f in &nonzero[1..] {
        acc = poly::bivariate_gcd(field, &acc, &f.dehomogenize());
        if poly::bivariate_is_constant(&acc) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A cubic form with integer coefficients: the fixture bases and the two
/// explicit maps are stored this way and reduced or lifted as needed.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct IntegerCubic(pub [i64; 10]);

impl IntegerCubic {
    pub fn reduce(&self, field: &FieldDesc) -> TernaryForm {
        TernaryForm {
            field: field.clone(),
            coeffs: self.0.map(|c| field.from_int(c)),
        }
    }

    pub fn eval_i64(&self, [x, y, z]: [i64; 3]) -> i64 {
        MONOMIALS
            .iter()
            .zip(&self.0)
            .map(|(&[a, b, c], &k)| k * x.pow(a) * y.pow(b) * z.pow(c))
            .sum()
    }

    pub fn eval_rational(&self, pt: &[BigRational; 3]) -> BigRational {
        let mut acc = BigRational::zero();
        for (&[a, b, c], &k) in MONOMIALS.iter().zip(&self.0) {
            if k == 0 {
                continue;
            }
            let term = BigRational::from_integer(BigInt::from(k))
                * num_traits::pow(pt[0].clone(), a as usize)
                * num_traits::pow(pt[1].clone(), b as usize)
                * num_traits::pow(pt[2].clone(), c as usize);
            acc += term;
        }
        acc
    }

    pub fn eval_complex(&self, pt: &[num_complex::Complex64; 3]) -> num_complex::Complex64 {
        MONOMIALS
            .iter()
            .zip(&self.0)
            .filter(|(_, &k)| k != 0)
            .map(|(&[a, b, c], &k)| {
                pt[0].powu(a) * pt[1].powu(b) * pt[2].powu(c) * k as f64
            })
            .sum()
    }

    pub fn to_rational_poly(&self) -> RationalPoly {
        let mut out = RationalPoly::zero();
        for (&[a, b, c], &k) in MONOMIALS.iter().zip(&self.0) {
            if k == 0 {
                continue;
            }
            let mut exps = [0u32; 5];
            exps[Var::X as usize] = a;
            exps[Var::Y as usize] = b;
            exps[Var::Z as usize] = c;
            out = out + RationalPoly::term(BigRational::from_integer(k.into()), exps);
        }
        out
    }

    pub fn combine(basis: &[IntegerCubic], coeffs: &[i64]) -> Result<IntegerCubic, FormError> {
        if basis.len() != coeffs.len() {
            return Err(FormError::LengthMismatch {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        let mut out = [0i64; 10];
        for (b, &c) in basis.iter().zip(coeffs) {
            for (o, &bc) in out.iter_mut().zip(&b.0) {
                *o += c * bc;
            }
        }
        Ok(IntegerCubic(out))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for IntegerCubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, bool)> = self.0.iter().map(|&c| (c.to_string(), c == 0)).collect();
        write_terms(f, &terms)
    }
}

impl FromStr for IntegerCubic {
    type Err = FormError;

    /// Accepts sums of terms `[c*]monomial` with `monomial` a `*`-separated
    /// product of `x`, `y`, `z` powers (`x^2*y`, `xyz` is not accepted).
    fn from_str(text: &str) -> Result<Self, FormError> {
        let err = |msg: &str| FormError::Parse(format!("{msg} in {text:?}"));
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        if compact == "0" {
            return Ok(IntegerCubic([0; 10]));
        }
        let mut coeffs = [0i64; 10];
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let mut sign = 1i64;
            if let Some(r) = rest.strip_prefix('+') {
                rest = r;
            } else if let Some(r) = rest.strip_prefix('-') {
                sign = -1;
                rest = r;
            } else if !first {
                return Err(err("expected '+' or '-'"));
            }
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(end);
            rest = tail;
            let mut coeff = 1i64;
            let mut exps = [0u32; 3];
            let mut seen_var = false;
            for (i, factor) in term.split('*').enumerate() {
                if factor.is_empty() {
                    return Err(err("empty factor"));
                }
                if factor.chars().all(|c| c.is_ascii_digit()) {
                    if i != 0 {
                        return Err(err("coefficient must come first"));
                    }
                    coeff = factor.parse().map_err(|_| err("coefficient overflow"))?;
                    continue;
                }
                let (name, power) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u32>().map_err(|_| err("bad exponent"))?),
                    None => (factor, 1),
                };
                let slot = match name {
                    "x" => 0,
                    "y" => 1,
                    "z" => 2,
                    _ => return Err(err(&format!("unknown variable {name:?}"))),
                };
                exps[slot] += power;
                seen_var = true;
            }
            if !seen_var {
                return Err(err("constant term in a cubic form"));
            }
            let slot = monomial_index(exps).ok_or_else(|| err("term is not of degree 3"))?;
            coeffs[slot] += sign * coeff;
        }
        Ok(IntegerCubic(coeffs))
    }
}

/// Cubic from a homogeneous cubic `RationalPoly` in `x, y, z` with integer
/// coefficients.
pub fn integer_cubic_from_poly(p: &RationalPoly) -> Option<IntegerCubic> {
    let mut out = [0i64; 10];
    for (exps, c) in p.terms() {
        if exps[Var::A as usize] != 0 || exps[Var::B as usize] != 0 || !c.is_integer() {
            return None;
        }
        let slot = monomial_index([exps[0], exps[1], exps[2]])?;
        out[slot] = i64::try_from(c.to_integer()).ok()?;
    }
    Some(IntegerCubic(out))
}
