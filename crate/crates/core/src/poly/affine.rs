use std::cmp::Ordering;
use std::fmt;

use crate::gf::{FieldDesc, FieldElem};

use super::{chart_vars, monomial_count, monomial_index, PolyError, TernaryForm};

/// Exponent pair of `x1^a x2^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Mono {
    pub e1: u32,
    pub e2: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { e1: 0, e2: 0 };

    pub const fn new(e1: u32, e2: u32) -> Self {
        Mono { e1, e2 }
    }

    pub fn degree(self) -> u32 {
        self.e1 + self.e2
    }

    pub fn divides(self, other: Mono) -> bool {
        self.e1 <= other.e1 && self.e2 <= other.e2
    }

    pub fn lcm(self, other: Mono) -> Mono {
        Mono::new(self.e1.max(other.e1), self.e2.max(other.e2))
    }

    pub fn times(self, other: Mono) -> Mono {
        Mono::new(self.e1 + other.e1, self.e2 + other.e2)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn over(self, other: Mono) -> Mono {
        Mono::new(self.e1 - other.e1, self.e2 - other.e2)
    }

    pub fn coprime(self, other: Mono) -> bool {
        (self.e1 == 0 || other.e1 == 0) && (self.e2 == 0 || other.e2 == 0)
    }

    /// Graded reverse lexicographic order with `x1 > x2`.
    pub fn grevlex(self, other: Mono) -> Ordering {
        // with two variables, ties in degree are broken by the smaller x2 exponent
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.e2.cmp(&self.e2))
    }
}

/// A polynomial in `x1, x2`, terms sorted by decreasing grevlex order with no
/// stored zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct AffinePoly {
    field: FieldDesc,
    terms: Vec<(Mono, FieldElem)>,
}

impl fmt::Debug for AffinePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffinePoly({self})")
    }
}

impl fmt::Display for AffinePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(m, c)| {
                let mut mono = String::new();
                for (name, e) in [("x1", m.e1), ("x2", m.e2)] {
                    match e {
                        0 => {}
                        1 => mono.push_str(name),
                        _ => mono.push_str(&format!("{name}^{e}")),
                    }
                }
                let ctext = self.field.format(c);
                match (mono.is_empty(), c == FieldElem::ONE) {
                    (true, _) => ctext,
                    (false, true) => mono,
                    (false, false) => format!("({ctext})·{mono}"),
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl AffinePoly {
    pub fn zero(field: &FieldDesc) -> Self {
        AffinePoly {
            field: field.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(field: &FieldDesc, c: FieldElem) -> Self {
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![(Mono::ONE, c)]
        };
        AffinePoly {
            field: field.clone(),
            terms,
        }
    }

    /// Collects terms, merging repeated monomials and dropping zeros.
    pub fn from_terms(field: &FieldDesc, terms: impl IntoIterator<Item = (Mono, FieldElem)>) -> Self {
        let mut v: Vec<(Mono, FieldElem)> = terms.into_iter().collect();
        v.sort_by(|a, b| b.0.grevlex(a.0));
        let mut out: Vec<(Mono, FieldElem)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = field.add(last.1, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        AffinePoly {
            field: field.clone(),
            terms: out,
        }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn terms(&self) -> &[(Mono, FieldElem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for nonzero constants and for zero.
    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| *m == Mono::ONE)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.degree())
    }

    pub fn leading(&self) -> Option<(Mono, FieldElem)> {
        self.terms.first().copied()
    }

    /// Everything but the leading term.
    pub fn tail(&self) -> Self {
        AffinePoly {
            field: self.field.clone(),
            terms: self.terms.iter().skip(1).copied().collect(),
        }
    }

    pub fn coeff(&self, m: Mono) -> FieldElem {
        self.terms
            .iter()
            .find(|(t, _)| *t == m)
            .map(|&(_, c)| c)
            .unwrap_or(FieldElem::ZERO)
    }

    pub fn eval(&self, x1: FieldElem, x2: FieldElem) -> FieldElem {
        let f = &self.field;
        self.terms.iter().fold(FieldElem::ZERO, |acc, &(m, c)| {
            let v = f.mul(f.pow(x1, u64::from(m.e1)), f.pow(x2, u64::from(m.e2)));
            f.add(acc, f.mul(c, v))
        })
    }

    /// Formal derivative in `x1` (`var = 0`) or `x2` (`var = 1`).
    pub fn partial(&self, var: usize) -> Self {
        let f = &self.field;
        let terms = self.terms.iter().filter_map(|&(m, c)| {
            let e = if var == 0 { m.e1 } else { m.e2 };
            if e == 0 {
                return None;
            }
            let nm = if var == 0 {
                Mono::new(m.e1 - 1, m.e2)
            } else {
                Mono::new(m.e1, m.e2 - 1)
            };
            Some((nm, f.scale_int(c, u64::from(e))))
        });
        AffinePoly::from_terms(f, terms)
    }

    pub fn scale(&self, c: FieldElem) -> Self {
        if c.is_zero() {
            return AffinePoly::zero(&self.field);
        }
        let f = &self.field;
        AffinePoly {
            field: f.clone(),
            terms: self.terms.iter().map(|&(m, a)| (m, f.mul(a, c))).collect(),
        }
    }

    /// Scales so the leading coefficient is 1.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) if c != FieldElem::ONE => {
                self.scale(self.field.inv(c).expect("leading coefficient is nonzero"))
            }
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &AffinePoly) -> Self {
        self.add_scaled(FieldElem::ONE, Mono::ONE, other)
    }

    pub fn sub(&self, other: &AffinePoly) -> Self {
        self.add_scaled(self.field.neg(FieldElem::ONE), Mono::ONE, other)
    }

    /// `self + c·m·other`, by merging the sorted term lists.
    pub fn add_scaled(&self, c: FieldElem, m: Mono, other: &AffinePoly) -> Self {
        let f = &self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other
            .terms
            .iter()
            .map(|&(om, oc)| (om.times(m), f.mul(oc, c)))
            .peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(ma, ca)), Some(&(mb, cb))) => match ma.grevlex(mb) {
                    Ordering::Greater => {
                        out.push((ma, ca));
                        a.next();
                    }
                    Ordering::Less => {
                        if !cb.is_zero() {
                            out.push((mb, cb));
                        }
                        b.next();
                    }
                    Ordering::Equal => {
                        let s = f.add(ca, cb);
                        if !s.is_zero() {
                            out.push((ma, s));
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some(&&t), None) => {
                    out.push(t);
                    a.next();
                }
                (None, Some(&t)) => {
                    if !t.1.is_zero() {
                        out.push(t);
                    }
                    b.next();
                }
                (None, None) => break,
            }
        }
        AffinePoly {
            field: f.clone(),
            terms: out,
        }
    }

    pub fn mul(&self, other: &AffinePoly) -> Self {
        let f = &self.field;
        let terms = self.terms.iter().flat_map(|&(ma, ca)| {
            other
                .terms
                .iter()
                .map(move |&(mb, cb)| (ma.times(mb), f.mul(ca, cb)))
        });
        AffinePoly::from_terms(f, terms)
    }

    /// Inverse of dehomogenization: the degree-`d` form whose chart polynomial is `self`.
    pub fn homogenize(&self, chart: usize, d: u32) -> Result<TernaryForm, PolyError> {
        if chart > 2 {
            return Err(PolyError::BadChart(chart));
        }
        if let Some(deg) = self.total_degree() {
            if deg > d {
                return Err(PolyError::DegreeTooHigh { degree: d, got: deg });
            }
        }
        let [u, v] = chart_vars(chart);
        let mut coeffs = vec![FieldElem::ZERO; monomial_count(d)];
        for &(m, c) in &self.terms {
            let mut e = [0u32; 3];
            e[u] = m.e1;
            e[v] = m.e2;
            e[chart] = d - m.degree();
            coeffs[monomial_index(e)] = c;
        }
        TernaryForm::new(&self.field, d, coeffs)
    }
}
