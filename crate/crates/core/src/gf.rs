//! Prime fields and their extensions `F_p[t]/(m)`.
//!
//! Elements are stored as integers `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` where
//! `c_i` are the coordinates in the power basis of the modulus root `t`. The
//! constant coordinate is the fastest digit, so the prime subfield `F_p` sits at
//! indices `0..p` in every extension and the enumeration order of the field is
//! simply `0..q`.
//!
//! Arithmetic is table driven: discrete log/exp tables for multiplication,
//! Zech logarithms for addition in odd-characteristic extensions, and dense
//! addition/multiplication tables when the field is small.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// Largest field (in elements) constructed unless the caller raises the limit.
pub const DEFAULT_FIELD_LIMIT: u64 = 1 << 20;

/// Fields up to this size get dense `q x q` addition and multiplication tables.
const DENSE_TABLE_LIMIT: u32 = 256;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field {p}^{k} exceeds the size limit of {limit} elements")]
    TooLarge { p: u64, k: u32, limit: u64 },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("value {value} is not an element of a field with {q} elements")]
    OutOfRange { value: u64, q: u32 },
    #[error("expected {expected} coordinates, got {got}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("cannot embed F_{base} into F_{ext}")]
    Incompatible { base: String, ext: String },
    #[error("modulus has no root in the extension field")]
    NoRoot,
    #[error("invalid field specification {0:?}")]
    BadSpec(String),
    #[error("invalid field element {0:?}")]
    BadElement(String),
}

/// An element of some `F_q`, as its base-`p` coordinate index.
///
/// The value is meaningless without the [`FieldDesc`] it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElem(pub(crate) u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// Position of the element in the field's enumeration order.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The `"p^k"` description of a field, as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub k: u32,
}

impl FieldSpec {
    pub fn build(self) -> Result<FieldDesc, FieldError> {
        make_field(self.p, self.k)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::BadSpec(s.to_string());
        let s = s.trim();
        let (p, k) = match s.split_once('^') {
            Some((p, k)) => (p.trim(), k.trim()),
            None => (s, "1"),
        };
        let p = p.parse::<u64>().map_err(|_| bad())?;
        let k = k.parse::<u32>().map_err(|_| bad())?;
        Ok(FieldSpec { p, k })
    }
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, low degree first, `k + 1` entries; empty for prime fields.
    modulus: Vec<u32>,
    generator: u32,
    /// `exp[i] = g^i` for `i < 2(q-1)`, doubled so products of logs need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[i] = log(1 + g^i)`, or `NO_LOG` when `1 + g^i = 0`. Only for odd `p`, `k > 1`.
    zech: Vec<u32>,
    add_tab: Vec<u32>,
    mul_tab: Vec<u32>,
}

/// A finite field `F_{p^k}` together with its arithmetic tables.
///
/// Cheap to clone and safe to share between threads.
#[derive(Clone)]
pub struct FieldDesc {
    inner: Arc<Inner>,
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        // moduli are chosen deterministically, so (p, k) identifies the field
        self.inner.p == other.inner.p && self.inner.k == other.inner.k
    }
}

impl Eq for FieldDesc {}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldDesc")
            .field("p", &self.inner.p)
            .field("k", &self.inner.k)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

/// Builds `F_{p^k}` with the default size limit.
pub fn make_field(p: u64, k: u32) -> Result<FieldDesc, FieldError> {
    make_field_with_limit(p, k, DEFAULT_FIELD_LIMIT)
}

/// Builds `F_{p^k}`, refusing fields with more than `limit` elements.
///
/// The modulus is the first monic irreducible polynomial of degree `k` when
/// coefficient sequences are ordered lexicographically with the constant term
/// varying fastest.
pub fn make_field_with_limit(p: u64, k: u32, limit: u64) -> Result<FieldDesc, FieldError> {
    if k == 0 {
        return Err(FieldError::ZeroDegree);
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    let too_large = FieldError::TooLarge { p, k, limit };
    let mut q: u64 = 1;
    for _ in 0..k {
        q = q.checked_mul(p).ok_or_else(|| too_large.clone())?;
        if q > limit || q > u64::from(u32::MAX / 2) {
            return Err(too_large);
        }
    }
    let p = p as u32;
    let q = q as u32;
    let modulus = if k == 1 {
        Vec::new()
    } else {
        first_irreducible(p, k)
    };
    Ok(FieldDesc {
        inner: Arc::new(build_tables(p, k, q, modulus)),
    })
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

// Dense polynomials over F_p used only while constructing a field.
mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let inv_lead = inv_mod(m[dm], p);
        while r.len() > dm {
            let top = r.len() - 1;
            let c = (u64::from(r[top]) * u64::from(inv_lead) % u64::from(p)) as u32;
            let shift = top - dm;
            for (i, &mi) in m.iter().enumerate() {
                let sub = (u64::from(c) * u64::from(mi) % u64::from(p)) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + u64::from(x) * u64::from(y)) % u64::from(p);
            }
        }
        let out: Vec<u32> = out.into_iter().map(|v| v as u32).collect();
        rem(&out, m, p)
    }

    pub fn powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        rem(&result, m, p)
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
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

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        let mut result = 1u64;
        let mut b = u64::from(a % p);
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * b % u64::from(p);
            }
            b = b * b % u64::from(p);
            e >>= 1;
        }
        result as u32
    }

    /// Rabin-style test: `m` of degree `k` is irreducible iff
    /// `gcd(x^{p^i} - x, m) = 1` for every `i <= k/2`.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let k = m.len() - 1;
        let x = vec![0u32, 1];
        let mut xp = x.clone();
        for _ in 1..=k / 2 {
            xp = powmod(&xp, u64::from(p), m, p);
            let mut diff = xp.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            trim(&mut diff);
            let g = gcd(m, &diff, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

fn digits(mut value: u32, p: u32, k: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(value % p);
        value /= p;
    }
    out
}

fn undigits(coords: &[u32], p: u32) -> u32 {
    coords.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn first_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for idx in 0..count {
        let mut m = digits(idx as u32, p, k);
        m.push(1);
        if m[0] == 0 {
            // divisible by t
            continue;
        }
        if fp_poly::is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn build_tables(p: u32, k: u32, q: u32, modulus: Vec<u32>) -> Inner {
    let group = u64::from(q - 1);
    let factors = prime_factors(group);
    let as_poly = |v: u32| {
        let mut d = digits(v, p, k);
        fp_poly::trim(&mut d);
        d
    };
    // prime fields use the modulus `t - 0` trick: reduce integers mod p directly
    let modulus_or_linear = if k == 1 { vec![0, 1] } else { modulus.clone() };
    let pow = |v: u32, e: u64| -> u32 {
        if k == 1 {
            let mut r = 1u64;
            let mut b = u64::from(v);
            let mut e = e;
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % u64::from(p);
                }
                b = b * b % u64::from(p);
                e >>= 1;
            }
            r as u32
        } else {
            let r = fp_poly::powmod(&as_poly(v), e, &modulus_or_linear, p);
            undigits(&r, p)
        }
    };
    let generator = (1..q)
        .find(|&g| factors.iter().all(|&l| pow(g, group / l) != 1))
        .unwrap_or(1);

    let n = (q - 1) as usize;
    let mut exp = vec![0u32; 2 * n.max(1)];
    let mut log = vec![NO_LOG; q as usize];
    let mut cur = 1u32;
    let g_poly = as_poly(generator);
    for (i, slot) in exp.iter_mut().take(n).enumerate() {
        *slot = cur;
        log[cur as usize] = i as u32;
        cur = if k == 1 {
            ((u64::from(cur) * u64::from(generator)) % u64::from(p)) as u32
        } else {
            let r = fp_poly::mulmod(&as_poly(cur), &g_poly, &modulus_or_linear, p);
            undigits(&r, p)
        };
    }
    for i in 0..n {
        exp[n + i] = exp[i];
    }

    let add_digits = |a: u32, b: u32| -> u32 {
        let da = digits(a, p, k);
        let db = digits(b, p, k);
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
        undigits(&sum, p)
    };

    let zech = if p != 2 && k > 1 {
        (0..n)
            .map(|i| {
                let s = add_digits(1, exp[i]);
                if s == 0 {
                    NO_LOG
                } else {
                    log[s as usize]
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut inner = Inner {
        p,
        k,
        q,
        modulus,
        generator,
        exp,
        log,
        zech,
        add_tab: Vec::new(),
        mul_tab: Vec::new(),
    };
    if q <= DENSE_TABLE_LIMIT {
        let qs = q as usize;
        let mut add_tab = vec![0u32; qs * qs];
        let mut mul_tab = vec![0u32; qs * qs];
        for a in 0..q {
            for b in 0..q {
                add_tab[a as usize * qs + b as usize] = inner.add_slow(a, b);
                mul_tab[a as usize * qs + b as usize] = inner.mul_slow(a, b);
            }
        }
        inner.add_tab = add_tab;
        inner.mul_tab = mul_tab;
    }
    inner
}

impl Inner {
    #[inline]
    fn add_slow(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let n = self.q - 1;
        let la = self.log[a as usize];
        let lb = self.log[b as usize];
        let diff = if lb >= la { lb - la } else { lb + n - la };
        let z = self.zech[diff as usize];
        if z == NO_LOG {
            0
        } else {
            self.exp[(la + z) as usize]
        }
    }

    #[inline]
    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }
}

impl FieldDesc {
    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.inner.k
    }

    /// Number of elements.
    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: u64::from(self.inner.p),
            k: self.inner.k,
        }
    }

    /// Monic modulus coefficients, constant term first; empty for a prime field.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    /// The multiplicative generator behind the log tables.
    pub fn generator(&self) -> FieldElem {
        FieldElem(self.inner.generator)
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    pub fn contains(&self, a: FieldElem) -> bool {
        a.0 < self.inner.q
    }

    /// The element with the given enumeration index.
    pub fn element(&self, index: u64) -> Result<FieldElem, FieldError> {
        if index < u64::from(self.inner.q) {
            Ok(FieldElem(index as u32))
        } else {
            Err(FieldError::OutOfRange {
                value: index,
                q: self.inner.q,
            })
        }
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(i64::from(self.inner.p)) as u32)
    }

    pub fn from_coeffs(&self, coords: &[u32]) -> Result<FieldElem, FieldError> {
        let k = self.inner.k as usize;
        if coords.len() != k {
            return Err(FieldError::CoordinateCount {
                expected: k,
                got: coords.len(),
            });
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= self.inner.p) {
            return Err(FieldError::OutOfRange {
                value: u64::from(c),
                q: self.inner.p,
            });
        }
        Ok(FieldElem(undigits(coords, self.inner.p)))
    }

    /// Power-basis coordinates, exactly `k` of them.
    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        digits(a.0, self.inner.p, self.inner.k)
    }

    /// All `q` elements in enumeration order, starting with zero.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.inner.q).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let inner = &*self.inner;
        if !inner.add_tab.is_empty() {
            return FieldElem(inner.add_tab[(a.0 * inner.q + b.0) as usize]);
        }
        FieldElem(inner.add_slow(a.0, b.0))
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let inner = &*self.inner;
        if inner.p == 2 || a.0 == 0 {
            return a;
        }
        if inner.k == 1 {
            return FieldElem(inner.p - a.0);
        }
        // -1 = g^{(q-1)/2} in odd characteristic
        let half = (inner.q - 1) / 2;
        FieldElem(inner.exp[(inner.log[a.0 as usize] + half) as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let inner = &*self.inner;
        if !inner.mul_tab.is_empty() {
            return FieldElem(inner.mul_tab[(a.0 * inner.q + b.0) as usize]);
        }
        FieldElem(inner.mul_slow(a.0, b.0))
    }

    /// `acc + a * b`.
    #[inline]
    pub fn mul_add(&self, acc: FieldElem, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(acc, self.mul(a, b))
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let inner = &*self.inner;
        let n = inner.q - 1;
        let l = inner.log[a.0 as usize];
        Ok(FieldElem(inner.exp[((n - l) % n.max(1)) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let inner = &*self.inner;
        let n = u64::from(inner.q - 1);
        let l = u64::from(inner.log[a.0 as usize]);
        FieldElem(inner.exp[((l * (e % n)) % n) as usize])
    }

    /// `x -> x^p`.
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, u64::from(self.inner.p))
    }

    /// `n * a` for an integer `n`, i.e. `a` added to itself `n mod p` times.
    pub fn scale_int(&self, a: FieldElem, n: u64) -> FieldElem {
        self.mul(a, FieldElem((n % u64::from(self.inner.p)) as u32))
    }

    /// Wraps an element so it can be used with operators; fails if it is out of range.
    pub fn value(&self, a: FieldElem) -> Result<Value, FieldError> {
        if !self.contains(a) {
            return Err(FieldError::OutOfRange {
                value: u64::from(a.0),
                q: self.inner.q,
            });
        }
        Ok(Value {
            field: self.clone(),
            elem: a,
        })
    }

    /// Text form: a decimal residue for prime fields, otherwise a polynomial in `t`.
    pub fn format(&self, a: FieldElem) -> String {
        if self.inner.k == 1 {
            return a.0.to_string();
        }
        let cs = self.coeffs(a);
        let mut terms = Vec::new();
        for (i, &c) in cs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            let term = if i == 0 {
                c.to_string()
            } else if c == 1 {
                var
            } else {
                format!("{c}{var}")
            };
            terms.push(term);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// Inverse of [`FieldDesc::format`].
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem, FieldError> {
        let bad = || FieldError::BadElement(s.to_string());
        let p = self.inner.p;
        let mut coords = vec![0u32; self.inner.k as usize];
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(bad());
        }
        for term in text.split('+') {
            let (coef, power) = match term.find('t') {
                None => (term, 0usize),
                Some(pos) => {
                    let coef = if pos == 0 { "1" } else { &term[..pos] };
                    let rest = &term[pos + 1..];
                    let power = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .ok_or_else(bad)?
                            .parse::<usize>()
                            .map_err(|_| bad())?
                    };
                    (coef, power)
                }
            };
            let c = coef.parse::<u64>().map_err(|_| bad())?;
            if power >= coords.len() {
                return Err(bad());
            }
            coords[power] = ((u64::from(coords[power]) + c) % u64::from(p)) as u32;
        }
        self.from_coeffs(&coords)
    }
}

/// A field element bundled with its field, for operator syntax and
/// checked mixed-field arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Value {
    field: FieldDesc,
    elem: FieldElem,
}

impl Value {
    pub fn elem(&self) -> FieldElem {
        self.elem
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    fn same_field(&self, other: &Value) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::MixedFields)
        }
    }

    fn wrap(&self, elem: FieldElem) -> Value {
        Value {
            field: self.field.clone(),
            elem,
        }
    }

    pub fn try_add(&self, other: &Value) -> Result<Value, FieldError> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.add(self.elem, other.elem)))
    }

    pub fn try_sub(&self, other: &Value) -> Result<Value, FieldError> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.sub(self.elem, other.elem)))
    }

    pub fn try_mul(&self, other: &Value) -> Result<Value, FieldError> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.mul(self.elem, other.elem)))
    }

    pub fn try_div(&self, other: &Value) -> Result<Value, FieldError> {
        self.same_field(other)?;
        Ok(self.wrap(self.field.div(self.elem, other.elem)?))
    }

    pub fn inv(&self) -> Result<Value, FieldError> {
        Ok(self.wrap(self.field.inv(self.elem)?))
    }

    pub fn pow(&self, e: u64) -> Value {
        self.wrap(self.field.pow(self.elem, e))
    }

    pub fn frobenius(&self) -> Value {
        self.wrap(self.field.frobenius(self.elem))
    }
}

macro_rules! value_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &Value {
            type Output = Value;

            /// Panics when the operands live in different fields.
            fn $method(self, rhs: &Value) -> Value {
                self.$checked(rhs).expect("operands belong to different fields")
            }
        }
    };
}

value_op!(Add, add, try_add);
value_op!(Sub, sub, try_sub);
value_op!(Mul, mul, try_mul);

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format(self.elem))
    }
}

/// A field homomorphism `F_{p^a} -> F_{p^b}` with `a | b`.
#[derive(Clone, Debug)]
pub struct Embedding {
    base: FieldDesc,
    ext: FieldDesc,
    table: Vec<FieldElem>,
    /// `(image, preimage)` sorted by image.
    inverse: Vec<(FieldElem, FieldElem)>,
}

/// Embeds `base` into `ext` by sending the modulus root to the first root of
/// the base modulus found in `ext`'s enumeration order.
pub fn embed(base: &FieldDesc, ext: &FieldDesc) -> Result<Embedding, FieldError> {
    if base.p() != ext.p() || !ext.k().is_multiple_of(base.k()) {
        return Err(FieldError::Incompatible {
            base: base.spec().to_string(),
            ext: ext.spec().to_string(),
        });
    }
    let table: Vec<FieldElem> = if base == ext {
        base.elements().collect()
    } else if base.k() == 1 {
        // prime subfield elements share their index in every extension
        base.elements().collect()
    } else {
        let m = base.modulus();
        let root = ext
            .elements()
            .find(|&x| {
                let v = m.iter().rev().fold(FieldElem::ZERO, |acc, &c| {
                    ext.add(ext.mul(acc, x), FieldElem(c))
                });
                v.is_zero()
            })
            .ok_or(FieldError::NoRoot)?;
        let powers: Vec<FieldElem> = (0..base.k()).map(|i| ext.pow(root, u64::from(i))).collect();
        base.elements()
            .map(|a| {
                base.coeffs(a)
                    .iter()
                    .zip(&powers)
                    .fold(FieldElem::ZERO, |acc, (&c, &r)| {
                        ext.add(acc, ext.mul(FieldElem(c), r))
                    })
            })
            .collect()
    };
    let mut inverse: Vec<(FieldElem, FieldElem)> = table
        .iter()
        .enumerate()
        .map(|(i, &img)| (img, FieldElem(i as u32)))
        .collect();
    inverse.sort_unstable();
    Ok(Embedding {
        base: base.clone(),
        ext: ext.clone(),
        table,
        inverse,
    })
}

impl Embedding {
    pub fn base(&self) -> &FieldDesc {
        &self.base
    }

    pub fn ext(&self) -> &FieldDesc {
        &self.ext
    }

    #[inline]
    pub fn apply(&self, a: FieldElem) -> FieldElem {
        self.table[a.0 as usize]
    }

    /// The base element mapping to `x`, if `x` lies in the image.
    pub fn preimage(&self, x: FieldElem) -> Option<FieldElem> {
        self.inverse
            .binary_search_by_key(&x, |&(img, _)| img)
            .ok()
            .map(|i| self.inverse[i].1)
    }
}

/// Builds `F_{q^e}` for `field = F_q`, under the given size limit.
pub fn extension(field: &FieldDesc, e: u32, limit: u64) -> Result<FieldDesc, FieldError> {
    make_field_with_limit(u64::from(field.p()), field.k() * e, limit)
}
