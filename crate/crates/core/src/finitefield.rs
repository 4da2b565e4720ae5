//! Exact arithmetic in GF(p) and GF(p^k), and points of the projective plane
//! over these fields.
//!
//! Elements are encoded as integers: the coordinate vector `(c_0, .., c_{k-1})`
//! of `c_0 + c_1 t + .. + c_{k-1} t^{k-1}` modulo the field's modulus becomes
//! `c_0 + c_1 p + .. + c_{k-1} p^{k-1}`. The prime subfield is therefore the
//! range `0..p` in every extension, and a form with prime-field coefficients
//! can be evaluated at points of any GF(p^d) without an embedding map.
//!
//! The modulus of GF(p^k) is the monic irreducible polynomial whose lower
//! coefficients have the smallest integer encoding. Two [`FieldDesc`] values
//! with the same `(p, k)` are always the same field.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

/// Integer encoding of a field element (see module docs).
pub type Elem = u64;

/// Largest extension degree accepted by [`build_field`].
pub const MAX_DEGREE: u32 = 16;

const MAX_ORDER: u64 = 1 << 62;
const TABLE_LIMIT: u64 = 1 << 20;
const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {0} is outside 1..={MAX_DEGREE}")]
    DegreeOutOfRange(u32),
    #[error("GF({p}^{k}) is too large for this implementation")]
    TooLarge { p: u64, k: u32 },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("operands belong to different fields ({left} and {right})")]
    MixedFields { left: String, right: String },
    #[error("invalid element coordinates for {field}")]
    BadCoordinates { field: String },
    #[error("all projective coordinates are zero")]
    ZeroPoint,
}

struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[n] = log(1 + g^n)`, only built in odd characteristic.
    zech: Vec<u32>,
}

struct FieldInner {
    p: u64,
    k: u32,
    q: u64,
    modulus: Vec<u64>,
    pow_p: Vec<u64>,
    tables: Option<LogTables>,
}

/// A finite field GF(p^k) with its canonical modulus. Cheap to clone.
#[derive(Clone)]
pub struct FieldDesc(Arc<FieldInner>);

fn field_cache() -> &'static Mutex<HashMap<(u64, u32), FieldDesc>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), FieldDesc>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Builds (or fetches from the process-wide cache) GF(p^k).
pub fn build_field(p: u64, k: u32) -> Result<FieldDesc, FieldError> {
    if !(1..=MAX_DEGREE).contains(&k) {
        return Err(FieldError::DegreeOutOfRange(k));
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if p >= 1 << 31 {
        return Err(FieldError::TooLarge { p, k });
    }
    let q = match p.checked_pow(k) {
        Some(q) if q <= MAX_ORDER => q,
        _ => return Err(FieldError::TooLarge { p, k }),
    };
    if let Some(f) = field_cache().lock().unwrap().get(&(p, k)) {
        return Ok(f.clone());
    }
    let field = FieldDesc::construct(p, k, q);
    let mut cache = field_cache().lock().unwrap();
    Ok(cache.entry((p, k)).or_insert(field).clone())
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn divisors(n: u32) -> impl Iterator<Item = u32> {
    (1..=n).filter(move |d| n % d == 0)
}

pub(crate) fn lcm(a: u32, b: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Dense polynomials over GF(p), low degree first, used only to find and
/// apply the modulus.
mod fp_poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        super::pow_mod(a, p - 2, p)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = r[r.len() - 1] * lead_inv % p;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        rem(&prod, m, p)
    }

    pub fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut result = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    /// Rabin's irreducibility test for a monic `f` of degree `k`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = (f.len() - 1) as u32;
        let x = vec![0u64, 1];
        let frob_power = |times: u32| {
            let mut r = x.clone();
            for _ in 0..times {
                r = pow_mod(&r, p, f, p);
            }
            r
        };
        if !sub(&frob_power(k), &x, p).is_empty() {
            return false;
        }
        super::prime_factors(k as u64).into_iter().all(|r| {
            let h = sub(&frob_power(k / r as u32), &x, p);
            gcd(f, &h, p).len() == 1
        })
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Lex-smallest monic irreducible of degree `k` over GF(p), comparing the
/// integer encoding of its non-leading coefficients.
fn canonical_modulus(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = p.pow(k);
    for low in 0..count {
        let mut f: Vec<u64> = (0..k).map(|i| low / p.pow(i) % p).collect();
        f.push(1);
        if f[0] != 0 && fp_poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldDesc {
    fn construct(p: u64, k: u32, q: u64) -> FieldDesc {
        let modulus = canonical_modulus(p, k);
        let pow_p = (0..k).map(|i| p.pow(i)).collect();
        let mut inner = FieldInner {
            p,
            k,
            q,
            modulus,
            pow_p,
            tables: None,
        };
        if k > 1 && q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        FieldDesc(Arc::new(inner))
    }

    /// Shorthand for `build_field(p, 1)`.
    pub fn prime(p: u64) -> Result<FieldDesc, FieldError> {
        build_field(p, 1)
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    pub fn order(&self) -> u64 {
        self.0.q
    }

    /// Monic modulus, low degree first. For prime fields this is the
    /// placeholder `t`.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    /// Whether `e` lies in the prime subfield.
    #[inline]
    pub fn in_prime_subfield(&self, e: Elem) -> bool {
        e < self.0.p
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.0.q
    }

    /// Reduces an integer into the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.0.p as i64) as u64
    }

    pub fn digits(&self, e: Elem) -> Vec<u64> {
        (0..self.0.k as usize)
            .map(|i| e / self.0.pow_p[i] % self.0.p)
            .collect()
    }

    pub fn from_digits(&self, digits: &[u64]) -> Result<Elem, FieldError> {
        if digits.len() != self.0.k as usize || digits.iter().any(|&d| d >= self.0.p) {
            return Err(FieldError::BadCoordinates {
                field: self.to_string(),
            });
        }
        Ok(digits.iter().zip(&self.0.pow_p).map(|(d, w)| d * w).sum())
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let f = &*self.0;
        if f.p == 2 {
            return a ^ b;
        }
        if f.k == 1 {
            let s = a + b;
            return if s >= f.p { s - f.p } else { s };
        }
        match &f.tables {
            Some(t) => {
                if a == 0 {
                    return b;
                }
                if b == 0 {
                    return a;
                }
                let q1 = (f.q - 1) as u32;
                let la = t.log[a as usize];
                let lb = t.log[b as usize];
                let d = if lb >= la { lb - la } else { lb + q1 - la };
                let z = t.zech[d as usize];
                if z == NO_LOG {
                    0
                } else {
                    let s = la as u64 + z as u64;
                    t.exp[(s % q1 as u64) as usize] as u64
                }
            }
            None => self.add_digits(a, b, false),
        }
    }

    fn add_digits(&self, a: Elem, b: Elem, negate_b: bool) -> Elem {
        let f = &*self.0;
        let mut out = 0;
        for &w in &f.pow_p {
            let da = a / w % f.p;
            let mut db = b / w % f.p;
            if negate_b {
                db = (f.p - db) % f.p;
            }
            out += (da + db) % f.p * w;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let f = &*self.0;
        if f.p == 2 || a == 0 {
            return a;
        }
        if f.k == 1 {
            return f.p - a;
        }
        self.add_digits(0, a, true)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let f = &*self.0;
        if f.k == 1 {
            return ((a as u128 * b as u128) % f.p as u128) as u64;
        }
        match &f.tables {
            Some(t) => {
                let s = t.log[a as usize] as u64 + t.log[b as usize] as u64;
                let q1 = f.q - 1;
                t.exp[(if s >= q1 { s - q1 } else { s }) as usize] as u64
            }
            None => self.mul_poly(a, b),
        }
    }

    fn mul_poly(&self, a: Elem, b: Elem) -> Elem {
        let f = &*self.0;
        let prod = fp_poly::mul_mod(&self.digits(a), &self.digits(b), &f.modulus, f.p);
        prod.iter().zip(&f.pow_p).map(|(d, w)| d * w).sum()
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut result = 1;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        let f = &*self.0;
        if f.k == 1 {
            return Some(pow_mod(a, f.p - 2, f.p));
        }
        match &f.tables {
            Some(t) => {
                let q1 = (f.q - 1) as u32;
                let l = t.log[a as usize];
                Some(t.exp[((q1 - l) % q1) as usize] as u64)
            }
            None => Some(self.pow(a, f.q - 2)),
        }
    }

    /// `a^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        if self.0.k == 1 {
            return a;
        }
        self.pow(a, self.0.p)
    }

    /// Degree over GF(p) of the smallest subfield containing `a`.
    pub fn elem_degree(&self, a: Elem) -> u32 {
        let f = &*self.0;
        if a < f.p {
            return 1;
        }
        if let Some(t) = &f.tables {
            let l = t.log[a as usize] as u64;
            // g^l lies in GF(p^d) iff (q-1)/(p^d-1) divides l.
            return divisors(f.k)
                .find(|&d| l % ((f.q - 1) / (f.p.pow(d) - 1)) == 0)
                .unwrap_or(f.k);
        }
        divisors(f.k)
            .find(|&d| self.pow(a, f.p.pow(d)) == a)
            .unwrap_or(f.k)
    }

    /// Number of points of the projective plane over this field.
    pub fn p2_size(&self) -> u64 {
        let q = self.0.q;
        q * q + q + 1
    }

    fn label(&self) -> String {
        self.to_string()
    }

    pub(crate) fn ensure_same(&self, other: &FieldDesc) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::MixedFields {
                left: self.label(),
                right: other.label(),
            })
        }
    }

    /// Renders an element as an integer (prime subfield) or a polynomial in `t`.
    pub fn format_elem(&self, e: Elem) -> String {
        if e < self.0.p {
            return e.to_string();
        }
        let mut terms = Vec::new();
        for (i, d) in self.digits(e).into_iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(match (d, i) {
                (_, 0) => d.to_string(),
                (1, _) => mono,
                _ => format!("{d}*{mono}"),
            });
        }
        terms.join("+")
    }
}

fn build_tables(f: &FieldInner) -> LogTables {
    let scratch = FieldDesc(Arc::new(FieldInner {
        p: f.p,
        k: f.k,
        q: f.q,
        modulus: f.modulus.clone(),
        pow_p: f.pow_p.clone(),
        tables: None,
    }));
    let q1 = f.q - 1;
    let factors = prime_factors(q1);
    let generator = (2..f.q)
        .find(|&g| factors.iter().all(|&r| scratch.pow(g, q1 / r) != 1))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; q1 as usize];
    let mut log = vec![NO_LOG; f.q as usize];
    let mut cur = 1u64;
    for i in 0..q1 {
        exp[i as usize] = cur as u32;
        log[cur as usize] = i as u32;
        cur = scratch.mul(cur, generator);
    }
    let zech = if f.p == 2 {
        Vec::new()
    } else {
        (0..q1)
            .map(|n| log[scratch.add_digits(1, exp[n as usize] as u64, false) as usize])
            .collect()
    };
    LogTables { exp, log, zech }
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.k == other.0.k
    }
}

impl Eq for FieldDesc {}

impl std::hash::Hash for FieldDesc {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.0.p, self.0.k).hash(state);
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.k)
        }
    }
}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A field element tied to its field. Operations across fields are errors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    field: FieldDesc,
    value: Elem,
}

impl Scalar {
    pub fn new(field: &FieldDesc, coords: &[u64]) -> Result<Scalar, FieldError> {
        Ok(Scalar {
            field: field.clone(),
            value: field.from_digits(coords)?,
        })
    }

    pub fn from_elem(field: &FieldDesc, value: Elem) -> Result<Scalar, FieldError> {
        if value >= field.order() {
            return Err(FieldError::BadCoordinates {
                field: field.label(),
            });
        }
        Ok(Scalar {
            field: field.clone(),
            value,
        })
    }

    pub fn from_int(field: &FieldDesc, n: i64) -> Scalar {
        Scalar {
            field: field.clone(),
            value: field.from_int(n),
        }
    }

    /// The element `t` (the class of the variable modulo the modulus).
    pub fn generator(field: &FieldDesc) -> Scalar {
        let value = if field.degree() == 1 { 0 } else { field.characteristic() };
        Scalar {
            field: field.clone(),
            value,
        }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn elem(&self) -> Elem {
        self.value
    }

    pub fn coords(&self) -> Vec<u64> {
        self.field.digits(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn binary(
        &self,
        other: &Scalar,
        op: impl Fn(&FieldDesc, Elem, Elem) -> Elem,
    ) -> Result<Scalar, FieldError> {
        self.field.ensure_same(&other.field)?;
        Ok(Scalar {
            field: self.field.clone(),
            value: op(&self.field, self.value, other.value),
        })
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.binary(other, FieldDesc::add)
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.binary(other, FieldDesc::sub)
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.binary(other, FieldDesc::mul)
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            field: self.field.clone(),
            value: self.field.neg(self.value),
        }
    }

    pub fn inv(&self) -> Result<Scalar, FieldError> {
        let value = self.field.inv(self.value).ok_or(FieldError::ZeroInverse)?;
        Ok(Scalar {
            field: self.field.clone(),
            value,
        })
    }

    pub fn pow(&self, e: u64) -> Scalar {
        Scalar {
            field: self.field.clone(),
            value: self.field.pow(self.value, e),
        }
    }

    pub fn frobenius(&self) -> Scalar {
        Scalar {
            field: self.field.clone(),
            value: self.field.frobenius(self.value),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self.field.format_elem(self.value), self.field)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_elem(self.value))
    }
}

/// Normalizes a nonzero coordinate triple so that its last nonzero entry is 1.
pub(crate) fn normalize(field: &FieldDesc, c: [Elem; 3]) -> Option<[Elem; 3]> {
    let last = c.iter().rposition(|&x| x != 0)?;
    if c[last] == 1 {
        return Some(c);
    }
    let inv = field.inv(c[last])?;
    Some(c.map(|x| field.mul(x, inv)))
}

/// A point of the projective plane, stored as its normalized representative
/// (last nonzero coordinate equal to 1).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    field: FieldDesc,
    coords: [Elem; 3],
}

impl ProjPoint {
    pub fn new(field: &FieldDesc, coords: [Elem; 3]) -> Result<ProjPoint, FieldError> {
        if coords.iter().any(|&c| c >= field.order()) {
            return Err(FieldError::BadCoordinates {
                field: field.label(),
            });
        }
        let coords = normalize(field, coords).ok_or(FieldError::ZeroPoint)?;
        Ok(ProjPoint {
            field: field.clone(),
            coords,
        })
    }

    /// Reduces integer coordinates into the prime subfield of `field`.
    pub fn from_ints(field: &FieldDesc, coords: [i64; 3]) -> Result<ProjPoint, FieldError> {
        ProjPoint::new(field, coords.map(|c| field.from_int(c)))
    }

    pub fn from_scalars(coords: [&Scalar; 3]) -> Result<ProjPoint, FieldError> {
        let field = coords[0].field();
        coords[1].field().ensure_same(field)?;
        coords[2].field().ensure_same(field)?;
        ProjPoint::new(field, coords.map(|s| s.elem()))
    }

    pub(crate) fn from_normalized(field: &FieldDesc, coords: [Elem; 3]) -> ProjPoint {
        debug_assert_eq!(normalize(field, coords), Some(coords));
        ProjPoint {
            field: field.clone(),
            coords,
        }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn coords(&self) -> [Elem; 3] {
        self.coords
    }

    pub fn scalars(&self) -> [Scalar; 3] {
        self.coords.map(|value| Scalar {
            field: self.field.clone(),
            value,
        })
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ProjPoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.field.characteristic(), self.field.degree(), self.coords).cmp(&(
            other.field.characteristic(),
            other.field.degree(),
            other.coords,
        ))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.coords.map(|c| self.field.format_elem(c));
        write!(f, "[{x}:{y}:{z}]")
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} over {}", self.field)
    }
}

/// All points of P^2 over `field`, sorted lexicographically by their
/// normalized coordinate encodings.
pub fn enumerate_p2(field: &FieldDesc) -> Vec<ProjPoint> {
    let q = field.order();
    let mut pts = Vec::with_capacity(field.p2_size() as usize);
    for x in 0..q {
        for y in 0..q {
            pts.push([x, y, 1]);
        }
        pts.push([x, 1, 0]);
    }
    pts.push([1, 0, 0]);
    pts.sort_unstable();
    pts.into_iter()
        .map(|c| ProjPoint::from_normalized(field, c))
        .collect()
}

/// Smallest `d` dividing the field degree such that the point is defined over GF(p^d).
pub fn minimal_degree(pt: &ProjPoint) -> u32 {
    pt.coords
        .iter()
        .fold(1, |acc, &c| lcm(acc, pt.field.elem_degree(c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_irreducible_cubic_gf2(low: [u64; 3]) -> bool {
        // a cubic is irreducible iff it has no root
        (0..2u64).all(|x| (low[0] + low[1] * x + low[2] * x * x + x * x * x) % 2 != 0)
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(build_field(2, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(build_field(2, 2).unwrap().modulus(), &[1, 1, 1]);
        // brute-force oracle: smallest encoding among irreducible monic cubics
        let oracle = (0..8u64)
            .map(|n| [n & 1, (n >> 1) & 1, (n >> 2) & 1])
            .find(|low| brute_irreducible_cubic_gf2(*low))
            .unwrap();
        assert_eq!(oracle, [1, 1, 0]);
        assert_eq!(build_field(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(build_field(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn build_errors() {
        assert_eq!(build_field(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(build_field(1, 1).unwrap_err(), FieldError::NotPrime(1));
        assert_eq!(build_field(2, 0).unwrap_err(), FieldError::DegreeOutOfRange(0));
        assert_eq!(build_field(2, 17).unwrap_err(), FieldError::DegreeOutOfRange(17));
        assert!(matches!(build_field(1_000_003, 16), Err(FieldError::TooLarge { .. })));
    }

    #[test]
    fn small_examples() {
        let gf2 = FieldDesc::prime(2).unwrap();
        let one = Scalar::from_int(&gf2, 1);
        assert!(one.add(&one).unwrap().is_zero());

        let gf4 = build_field(2, 2).unwrap();
        let t = Scalar::generator(&gf4);
        assert_eq!(t.mul(&t).unwrap().coords(), vec![1, 1]);

        let gf8 = build_field(2, 3).unwrap();
        for a in 1..8 {
            let s = Scalar::from_elem(&gf8, a).unwrap();
            assert_eq!(s.inv().unwrap().mul(&s).unwrap().elem(), 1);
        }
        assert_eq!(Scalar::from_int(&gf8, 0).inv().unwrap_err(), FieldError::ZeroInverse);
    }

    #[test]
    fn mixed_fields_are_errors() {
        let a = Scalar::from_int(&FieldDesc::prime(2).unwrap(), 1);
        let b = Scalar::from_int(&FieldDesc::prime(3).unwrap(), 1);
        assert!(matches!(a.add(&b), Err(FieldError::MixedFields { .. })));
        let c = Scalar::from_int(&build_field(2, 2).unwrap(), 1);
        assert!(matches!(a.mul(&c), Err(FieldError::MixedFields { .. })));
    }

    fn check_axioms_exhaustive(f: &FieldDesc) {
        let q = f.order();
        for a in 0..q {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..q {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
                for c in 0..q {
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_small_fields() {
        for (p, k) in [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (2, 4), (3, 2), (7, 1), (13, 1)] {
            check_axioms_exhaustive(&build_field(p, k).unwrap());
        }
    }

    #[test]
    fn axioms_sampled_large_fields() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        // (3,5) uses log tables, (5,9) the polynomial fallback
        for (p, k) in [(2, 9), (3, 5), (5, 9), (11, 2), (65_537, 1)] {
            let f = build_field(p, k).unwrap();
            for _ in 0..10_000 {
                let [a, b, c] = [(); 3].map(|_| rng.gen_range(0..f.order()));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
                assert_eq!(f.sub(f.add(a, b), b), a);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
            }
        }
    }

    #[test]
    fn table_and_polynomial_arithmetic_agree() {
        let f = build_field(3, 4).unwrap();
        for a in (0..f.order()).step_by(7) {
            for b in (0..f.order()).step_by(5) {
                assert_eq!(f.mul(a, b), f.mul_poly(a, b));
                assert_eq!(f.add(a, b), f.add_digits(a, b, false));
            }
        }
    }

    #[test]
    fn p2_counts_and_uniqueness() {
        for (p, k, n) in [(2, 1, 7), (2, 2, 21), (2, 3, 73), (3, 1, 13)] {
            let f = build_field(p, k).unwrap();
            let pts = enumerate_p2(&f);
            assert_eq!(pts.len(), n);
            let mut sorted = pts.clone();
            sorted.dedup();
            assert_eq!(sorted.len(), n);
            assert!(pts.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn every_triple_normalizes_into_enumeration() {
        let f = build_field(2, 2).unwrap();
        let pts: std::collections::HashSet<_> = enumerate_p2(&f).into_iter().collect();
        for x in 0..4 {
            for y in 0..4 {
                for z in 0..4 {
                    if (x, y, z) == (0, 0, 0) {
                        continue;
                    }
                    assert!(pts.contains(&ProjPoint::new(&f, [x, y, z]).unwrap()));
                }
            }
        }
    }

    #[test]
    fn minimal_degree_examples() {
        let gf8 = build_field(2, 3).unwrap();
        assert_eq!(minimal_degree(&ProjPoint::new(&gf8, [1, 0, 0]).unwrap()), 1);
        let gf4 = build_field(2, 2).unwrap();
        let t = Scalar::generator(&gf4).elem();
        assert_eq!(minimal_degree(&ProjPoint::new(&gf4, [t, 1, 1]).unwrap()), 2);
        let gf2 = FieldDesc::prime(2).unwrap();
        assert!(enumerate_p2(&gf2).iter().all(|p| minimal_degree(p) == 1));
    }

    /// Test-only embedding of GF(p^d) into GF(p^k): send the class of `t` to a
    /// root of the smaller field's modulus.
    fn embedding(small: &FieldDesc, big: &FieldDesc) -> Vec<Elem> {
        let m = small.modulus();
        let root = big
            .elements()
            .find(|&r| {
                let mut acc = 0;
                for &c in m.iter().rev() {
                    acc = big.add(big.mul(acc, r), c);
                }
                acc == 0
            })
            .unwrap();
        small
            .elements()
            .map(|e| {
                let mut acc = 0;
                for &c in small.digits(e).iter().rev() {
                    acc = big.add(big.mul(acc, root), c);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn minimal_degree_divides_and_reencodes() {
        for (p, k) in [(2, 4), (2, 6), (3, 4)] {
            let big = build_field(p, k).unwrap();
            let embeddings: HashMap<u32, Vec<Elem>> = divisors(k)
                .map(|d| (d, embedding(&build_field(p, d).unwrap(), &big)))
                .collect();
            for pt in enumerate_p2(&big).iter().step_by(3) {
                let d = minimal_degree(pt);
                assert_eq!(k % d, 0);
                let emb = &embeddings[&d];
                let small = build_field(p, d).unwrap();
                // pull back each coordinate, then push forward again
                let pulled = pt.coords().map(|c| emb.iter().position(|&e| e == c).unwrap() as Elem);
                let again = ProjPoint::new(&big, pulled.map(|e| emb[e as usize])).unwrap();
                assert_eq!(&again, pt);
                assert!(ProjPoint::new(&small, pulled).is_ok());
                if d > 1 {
                    let proper = divisors(d).filter(|&e| e < d).all(|e| {
                        pt.coords().iter().any(|c| !embeddings[&e].contains(c))
                    });
                    assert!(proper);
                }
            }
        }
    }
}
