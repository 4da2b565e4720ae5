//! Small dense polynomials over a [`FieldDesc`]: univariate (used for
//! per-line root finding during base-locus scans) and bivariate in `x` over
//! `k[y]` (used by the exact common-factor test).

use crate::finitefield::{Elem, FieldDesc};

/// Coefficients low degree first; the zero polynomial is empty.
pub type UniPoly = Vec<Elem>;

pub fn trim(a: &mut UniPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(a: &[Elem]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn eval(f: &FieldDesc, a: &[Elem], x: Elem) -> Elem {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

pub fn sub(f: &FieldDesc, a: &[Elem], b: &[Elem]) -> UniPoly {
    let n = a.len().max(b.len());
    let mut out: UniPoly = (0..n)
        .map(|i| f.sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
        .collect();
    trim(&mut out);
    out
}

pub fn mul(f: &FieldDesc, a: &[Elem], b: &[Elem]) -> UniPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(ai, bj));
        }
    }
    trim(&mut out);
    out
}

pub fn scale(f: &FieldDesc, a: &[Elem], c: Elem) -> UniPoly {
    let mut out: UniPoly = a.iter().map(|&x| f.mul(x, c)).collect();
    trim(&mut out);
    out
}

/// Division with remainder; `b` must be nonzero.
pub fn div_rem(f: &FieldDesc, a: &[Elem], b: &[Elem]) -> (UniPoly, UniPoly) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = f.inv(b[db]).unwrap();
    let mut r: UniPoly = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut quot = vec![0; r.len() - db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = f.mul(r[r.len() - 1], lead_inv);
        quot[shift] = c;
        for (i, &bi) in b[..=db].iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, bi));
        }
        trim(&mut r);
    }
    trim(&mut quot);
    (quot, r)
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd(f: &FieldDesc, a: &[Elem], b: &[Elem]) -> UniPoly {
    let mut a: UniPoly = a.to_vec();
    let mut b: UniPoly = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let (_, r) = div_rem(f, &a, &b);
        a = b;
        b = r;
    }
    make_monic(f, a)
}

pub fn make_monic(f: &FieldDesc, a: UniPoly) -> UniPoly {
    match a.last() {
        Some(&lead) if lead != 1 => scale(f, &a, f.inv(lead).unwrap()),
        _ => a,
    }
}

/// Polynomial in `x` whose coefficients are polynomials in `y`.
pub type BiPoly = Vec<UniPoly>;

fn bi_trim(a: &mut BiPoly) {
    while a.last().is_some_and(|c| c.is_empty()) {
        a.pop();
    }
}

fn bi_degree(a: &BiPoly) -> Option<usize> {
    a.iter().rposition(|c| !c.is_empty())
}

/// gcd of the `y`-coefficients (the content in `k[y]`).
fn content(f: &FieldDesc, a: &BiPoly) -> UniPoly {
    a.iter().fold(Vec::new(), |g, c| gcd(f, &g, c))
}

fn primitive_part(f: &FieldDesc, a: &BiPoly, content: &[Elem]) -> BiPoly {
    let mut out: BiPoly = a
        .iter()
        .map(|c| {
            let (q, r) = div_rem(f, c, content);
            debug_assert!(r.is_empty());
            q
        })
        .collect();
    bi_trim(&mut out);
    out
}

/// Pseudo-remainder of `a` by `b` in `k[y][x]`: `lc(b)^e * a mod b` with no
/// division in the coefficient ring.
fn pseudo_rem(f: &FieldDesc, a: &BiPoly, b: &BiPoly) -> BiPoly {
    let db = bi_degree(b).expect("pseudo-division by zero");
    let lead = &b[db];
    let mut r = a.clone();
    bi_trim(&mut r);
    while let Some(dr) = bi_degree(&r) {
        if dr < db {
            break;
        }
        let top = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = mul(f, c, lead);
        }
        for (i, bi) in b[..=db].iter().enumerate() {
            let t = mul(f, &top, bi);
            r[shift + i] = sub(f, &r[shift + i], &t);
        }
        bi_trim(&mut r);
    }
    r
}

/// gcd of two nonzero bivariate polynomials, up to a unit.
///
/// Splits off contents in `k[y]`, then runs a primitive pseudo-remainder
/// sequence in `x`; the last nonzero remainder is the primitive gcd. Inputs
/// free of `x` only contribute through their content.
pub fn bivariate_gcd(f: &FieldDesc, a: &BiPoly, b: &BiPoly) -> BiPoly {
    let (ca, cb) = (content(f, a), content(f, b));
    let cg = gcd(f, &ca, &cb);
    let mut a = primitive_part(f, a, &ca);
    let mut b = primitive_part(f, b, &cb);
    if bi_degree(&a) < bi_degree(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    let pg = loop {
        match bi_degree(&b) {
            None => break a,
            Some(0) => break vec![vec![1]],
            Some(_) => {}
        }
        let r = pseudo_rem(f, &a, &b);
        let next = if r.is_empty() {
            Vec::new()
        } else {
            let cr = content(f, &r);
            primitive_part(f, &r, &cr)
        };
        a = b;
        b = next;
    };
    pg.iter().map(|c| mul(f, c, &cg)).collect()
}

/// Whether a bivariate polynomial is a nonzero constant.
pub fn bivariate_is_constant(a: &BiPoly) -> bool {
    match bi_degree(a) {
        None => false,
        Some(0) => degree(&a[0]) == Some(0),
        Some(_) => false,
    }
}

/// Whether two nonzero bivariate polynomials share a nonconstant factor.
pub fn bivariate_share_factor(f: &FieldDesc, a: &BiPoly, b: &BiPoly) -> bool {
    !bivariate_is_constant(&bivariate_gcd(f, a, b))
}
