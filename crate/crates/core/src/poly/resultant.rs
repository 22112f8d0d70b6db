use crate::gf::{FieldDesc, FieldElem};

use super::PolyError;

/// Commutative ring context in which determinants are taken.
///
/// `exact_div` is only ever called when the quotient exists, which is the
/// case for every division performed by fraction-free elimination over an
/// integral domain.
pub trait Ring {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn exact_div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

impl Ring for FieldDesc {
    type Elem = FieldElem;

    fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    fn is_zero(&self, a: &FieldElem) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldDesc::add(self, *a, *b)
    }

    fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldDesc::neg(self, *a)
    }

    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldDesc::mul(self, *a, *b)
    }

    fn exact_div(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.div(*a, *b).expect("division by zero in exact_div")
    }

    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldDesc::sub(self, *a, *b)
    }
}

/// Resultant together with the data needed to judge whether it specializes.
///
/// `Res(f, g)` evaluated at a point of the coefficient ring agrees with the
/// resultant of the specialized polynomials only where `lead_f` and `lead_g`
/// do not both vanish; callers inspect them rather than assume it.
#[derive(Debug, Clone, PartialEq)]
pub struct Resultant<E> {
    pub value: E,
    pub degree_f: usize,
    pub degree_g: usize,
    pub lead_f: E,
    pub lead_g: E,
}

/// The `(m+n) × (m+n)` Sylvester matrix of `f` (degree `m`) and `g` (degree
/// `n`), coefficients given lowest degree first.
pub fn sylvester_matrix<R: Ring>(ring: &R, f: &[R::Elem], g: &[R::Elem]) -> Vec<Vec<R::Elem>> {
    let m = f.len().saturating_sub(1);
    let n = g.len().saturating_sub(1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (poly, shifts) in [(f, n), (g, m)] {
        for s in 0..shifts {
            let mut row = vec![ring.zero(); size];
            for (i, c) in poly.iter().rev().enumerate() {
                row[s + i] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant<R: Ring>(ring: &R, mut m: Vec<Vec<R::Elem>>) -> R::Elem {
    let n = m.len();
    if n == 0 {
        return ring.one();
    }
    let mut negate = false;
    let mut prev = ring.one();
    for k in 0..n - 1 {
        if ring.is_zero(&m[k][k]) {
            match (k + 1..n).find(|&i| !ring.is_zero(&m[i][k])) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return ring.zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = ring.sub(&ring.mul(&m[i][j], &m[k][k]), &ring.mul(&m[i][k], &m[k][j]));
                m[i][j] = ring.exact_div(&t, &prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        ring.neg(&d)
    } else {
        d
    }
}

fn trim<R: Ring>(ring: &R, v: &[R::Elem]) -> Vec<R::Elem> {
    let len = v.iter().rposition(|c| !ring.is_zero(c)).map_or(0, |i| i + 1);
    v[..len].to_vec()
}

/// Sylvester resultant of two univariate polynomials over `ring`, coefficients
/// lowest degree first. Degrees are the actual degrees after dropping zero
/// leading entries; a zero input against a nonconstant one gives 0.
pub fn resultant<R: Ring>(
    ring: &R,
    f: &[R::Elem],
    g: &[R::Elem],
) -> Result<Resultant<R::Elem>, PolyError> {
    let f = trim(ring, f);
    let g = trim(ring, g);
    if f.is_empty() && g.is_empty() {
        return Err(PolyError::BothZero);
    }
    let lead = |v: &[R::Elem]| v.last().cloned().unwrap_or_else(|| ring.zero());
    let (lead_f, lead_g) = (lead(&f), lead(&g));
    let degree_f = f.len().saturating_sub(1);
    let degree_g = g.len().saturating_sub(1);
    let value = if f.is_empty() || g.is_empty() {
        let other = if f.is_empty() { &g } else { &f };
        if other.len() == 1 {
            ring.one()
        } else {
            ring.zero()
        }
    } else {
        determinant(ring, sylvester_matrix(ring, &f, &g))
    };
    Ok(Resultant {
        value,
        degree_f,
        degree_g,
        lead_f,
        lead_g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::poly::{UniPoly, UniRing};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn elems(v: &[u32]) -> Vec<FieldElem> {
        v.iter().map(|&c| FieldElem(c)).collect()
    }

    // cofactor expansion, independent of elimination
    fn det_expand(f: &FieldDesc, m: &[Vec<FieldElem>]) -> FieldElem {
        let n = m.len();
        if n == 0 {
            return FieldElem::ONE;
        }
        let mut acc = FieldElem::ZERO;
        for j in 0..n {
            let minor: Vec<Vec<FieldElem>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let term = f.mul(m[0][j], det_expand(f, &minor));
            acc = if j % 2 == 0 { f.add(acc, term) } else { f.sub(acc, term) };
        }
        acc
    }

    #[test]
    fn small_examples() {
        let f = make_field(2, 1).unwrap();
        let r = resultant(&f, &elems(&[0, 0, 1]), &elems(&[0, 1])).unwrap();
        assert!(r.value.is_zero());
        let r = resultant(&f, &elems(&[1, 1]), &elems(&[0, 1])).unwrap();
        assert_eq!(r.value, FieldElem::ONE);
        assert!(matches!(resultant(&f, &elems(&[0]), &[]), Err(PolyError::BothZero)));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let f = make_field(7, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 0..6 {
            for _ in 0..20 {
                let m: Vec<Vec<FieldElem>> = (0..n)
                    .map(|_| (0..n).map(|_| FieldElem(rng.gen_range(0..7))).collect())
                    .collect();
                assert_eq!(determinant(&f, m.clone()), det_expand(&f, &m));
            }
        }
    }

    #[test]
    fn swap_sign_rule() {
        let f = make_field(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let da = rng.gen_range(1..5);
            let db = rng.gen_range(1..5);
            let mut a: Vec<FieldElem> = (0..da).map(|_| FieldElem(rng.gen_range(0..5))).collect();
            let mut b: Vec<FieldElem> = (0..db).map(|_| FieldElem(rng.gen_range(0..5))).collect();
            a.push(FieldElem(rng.gen_range(1..5)));
            b.push(FieldElem(rng.gen_range(1..5)));
            let rab = resultant(&f, &a, &b).unwrap().value;
            let rba = resultant(&f, &b, &a).unwrap().value;
            let expect = if (da * db) % 2 == 1 { f.neg(rba) } else { rba };
            assert_eq!(rab, expect);
            // vanishes iff a common factor
            let ring = UniRing::new(&f);
            let g = ring.gcd(&UniPoly::new(a.clone()), &UniPoly::new(b.clone()));
            assert_eq!(rab.is_zero(), g.degree().unwrap_or(0) > 0);
        }
    }

    #[test]
    fn bivariate_elimination_specializes() {
        // coefficients in F_3[x]; compare Res_y at x = x0 with resultant of specializations
        let f = make_field(3, 1).unwrap();
        let ring = UniRing::new(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rand_poly = |rng: &mut ChaCha8Rng, d: usize| {
            UniPoly::new((0..=d).map(|_| FieldElem(rng.gen_range(0..3))).collect())
        };
        for _ in 0..50 {
            let mut a: Vec<UniPoly> = (0..3).map(|_| rand_poly(&mut rng, 2)).collect();
            let mut b: Vec<UniPoly> = (0..2).map(|_| rand_poly(&mut rng, 2)).collect();
            a.push(UniPoly::constant(FieldElem::ONE));
            b.push(UniPoly::constant(FieldElem::ONE));
            let res = resultant(&ring, &a, &b).unwrap().value;
            for x0 in f.elements() {
                let sa: Vec<FieldElem> = a.iter().map(|c| ring.eval(c, x0)).collect();
                let sb: Vec<FieldElem> = b.iter().map(|c| ring.eval(c, x0)).collect();
                let direct = resultant(&f, &sa, &sb).unwrap().value;
                assert_eq!(ring.eval(&res, x0), direct);
            }
        }
    }
}
