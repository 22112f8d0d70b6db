use crate::gf::{FieldDesc, FieldElem};

use super::resultant::Ring;

/// Univariate polynomial over some `F_q`, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly(pub Vec<FieldElem>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<FieldElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn constant(c: FieldElem) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> FieldElem {
        self.0.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.0.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.0
    }
}

/// `F_q[x]` as a ring context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniRing {
    field: FieldDesc,
}

impl UniRing {
    pub fn new(field: &FieldDesc) -> Self {
        UniRing { field: field.clone() }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn eval(&self, a: &UniPoly, x: FieldElem) -> FieldElem {
        let f = &self.field;
        a.0.iter()
            .rev()
            .fold(FieldElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn derivative(&self, a: &UniPoly) -> UniPoly {
        let f = &self.field;
        UniPoly::new(
            a.0.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.scale_int(c, i as u64))
                .collect(),
        )
    }

    pub fn scale(&self, a: &UniPoly, c: FieldElem) -> UniPoly {
        let f = &self.field;
        UniPoly::new(a.0.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn monic(&self, a: &UniPoly) -> UniPoly {
        if a.is_zero() {
            return a.clone();
        }
        let inv = self.field.inv(a.leading()).expect("nonzero leading coefficient");
        self.scale(a, inv)
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn div_rem(&self, a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly) {
        let f = &self.field;
        let db = b.degree().expect("division by the zero polynomial");
        let inv_lead = f.inv(b.leading()).expect("nonzero leading coefficient");
        let mut r = a.0.clone();
        if r.len() <= db {
            return (UniPoly::default(), UniPoly::new(r));
        }
        let mut quot = vec![FieldElem::ZERO; r.len() - db];
        for i in (db..r.len()).rev() {
            let c = f.mul(r[i], inv_lead);
            if c.is_zero() {
                continue;
            }
            quot[i - db] = c;
            for (j, &bj) in b.0.iter().enumerate() {
                let idx = i - db + j;
                r[idx] = f.sub(r[idx], f.mul(c, bj));
            }
        }
        r.truncate(db);
        (UniPoly::new(quot), UniPoly::new(r))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let (_, r) = self.div_rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Common roots of all `polys` over the algebraic closure exist iff the
    /// gcd has positive degree or every input is zero.
    pub fn gcd_all<'a>(&self, polys: impl IntoIterator<Item = &'a UniPoly>) -> UniPoly {
        polys
            .into_iter()
            .fold(UniPoly::default(), |acc, p| self.gcd(&acc, p))
    }

    /// Roots lying in the coefficient field, by exhaustive evaluation.
    pub fn roots(&self, a: &UniPoly) -> Vec<FieldElem> {
        self.field
            .elements()
            .filter(|&x| self.eval(a, x).is_zero())
            .collect()
    }
}

impl Ring for UniRing {
    type Elem = UniPoly;

    fn zero(&self) -> UniPoly {
        UniPoly::default()
    }

    fn one(&self) -> UniPoly {
        UniPoly::constant(FieldElem::ONE)
    }

    fn is_zero(&self, a: &UniPoly) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        let f = &self.field;
        let n = a.0.len().max(b.0.len());
        UniPoly::new((0..n).map(|i| f.add(a.coeff(i), b.coeff(i))).collect())
    }

    fn neg(&self, a: &UniPoly) -> UniPoly {
        UniPoly::new(a.0.iter().map(|&c| self.field.neg(c)).collect())
    }

    fn mul(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        if a.is_zero() || b.is_zero() {
            return UniPoly::default();
        }
        let f = &self.field;
        let mut out = vec![FieldElem::ZERO; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        UniPoly::new(out)
    }

    fn exact_div(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        let (q, r) = self.div_rem(a, b);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn p(v: &[u32]) -> UniPoly {
        UniPoly::new(v.iter().map(|&c| FieldElem(c)).collect())
    }

    #[test]
    fn division_identity() {
        let f = make_field(5, 1).unwrap();
        let r = UniRing::new(&f);
        let a = p(&[1, 2, 3, 4, 1]);
        let b = p(&[2, 0, 1]);
        let (quo, rem) = r.div_rem(&a, &b);
        assert_eq!(r.add(&r.mul(&quo, &b), &rem), a);
        assert!(rem.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_detects_common_root() {
        let f = make_field(2, 1).unwrap();
        let r = UniRing::new(&f);
        // (x+1)(x^2+x+1) and (x+1)x
        let a = r.mul(&p(&[1, 1]), &p(&[1, 1, 1]));
        let b = r.mul(&p(&[1, 1]), &p(&[0, 1]));
        assert_eq!(r.gcd(&a, &b), p(&[1, 1]));
        assert_eq!(r.gcd(&p(&[1, 1, 1]), &p(&[0, 1])), p(&[1]));
        assert!(r.gcd(&UniPoly::default(), &UniPoly::default()).is_zero());
        assert_eq!(r.roots(&a), vec![FieldElem(1)]);
    }
}
