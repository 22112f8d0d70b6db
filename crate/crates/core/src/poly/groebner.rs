use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::gf::FieldElem;

use super::{AffinePoly, Mono, PolyError};

/// Full reduction of `p` modulo `basis` (all elements monic, nonzero).
fn normal_form(p: &AffinePoly, basis: &[AffinePoly]) -> AffinePoly {
    let field = p.field().clone();
    let mut p = p.clone();
    let mut rest: Vec<(Mono, FieldElem)> = Vec::new();
    while let Some((m, c)) = p.leading() {
        match basis
            .iter()
            .find(|g| g.leading().is_some_and(|(lm, _)| lm.divides(m)))
        {
            Some(g) => {
                let (lm, _) = g.leading().expect("basis elements are nonzero");
                p = p.add_scaled(field.neg(c), m.over(lm), g);
            }
            None => {
                rest.push((m, c));
                p = p.tail();
            }
        }
    }
    AffinePoly::from_terms(&field, rest)
}

fn s_poly(a: &AffinePoly, b: &AffinePoly) -> AffinePoly {
    let (ma, _) = a.leading().expect("nonzero");
    let (mb, _) = b.leading().expect("nonzero");
    let l = ma.lcm(mb);
    let minus_one = a.field().neg(FieldElem::ONE);
    AffinePoly::zero(a.field())
        .add_scaled(FieldElem::ONE, l.over(ma), a)
        .add_scaled(minus_one, l.over(mb), b)
}

fn lm(p: &AffinePoly) -> Mono {
    p.leading().expect("nonzero").0
}

/// Buchberger's algorithm in grevlex order with the normal selection strategy
/// and both of Buchberger's criteria. Returns the reduced basis, monic, sorted
/// by leading monomial. Stops early with `[1]` once a constant appears.
pub fn groebner_basis(generators: &[AffinePoly]) -> Vec<AffinePoly> {
    let mut basis: Vec<AffinePoly> = Vec::new();
    for g in generators {
        let r = normal_form(g, &basis);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return vec![AffinePoly::constant(r.field(), FieldElem::ONE)];
        }
        basis.push(r.monic());
    }
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pending.insert((i, j));
        }
    }
    while !pending.is_empty() {
        // normal strategy: pair with the smallest lcm
        let &(i, j) = pending
            .iter()
            .min_by(|a, b| {
                let la = lm(&basis[a.0]).lcm(lm(&basis[a.1]));
                let lb = lm(&basis[b.0]).lcm(lm(&basis[b.1]));
                la.grevlex(lb).then(a.cmp(b))
            })
            .expect("nonempty");
        pending.remove(&(i, j));
        let (mi, mj) = (lm(&basis[i]), lm(&basis[j]));
        if mi.coprime(mj) {
            continue;
        }
        let l = mi.lcm(mj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && lm(&basis[k]).divides(l)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let r = normal_form(&s_poly(&basis[i], &basis[j]), &basis);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return vec![AffinePoly::constant(r.field(), FieldElem::ONE)];
        }
        let n = basis.len();
        basis.push(r.monic());
        for k in 0..n {
            pending.insert((k, n));
        }
    }
    reduce(basis)
}

fn reduce(basis: Vec<AffinePoly>) -> Vec<AffinePoly> {
    // drop elements whose leading monomial is divisible by another's
    let mut minimal: Vec<AffinePoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let m = lm(g);
        let redundant = basis.iter().enumerate().any(|(k, h)| {
            let hm = lm(h);
            k != i && hm.divides(m) && (hm != m || k < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out: Vec<AffinePoly> = (0..minimal.len())
        .map(|i| {
            let others: Vec<AffinePoly> = minimal
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, g)| g.clone())
                .collect();
            let g = &minimal[i];
            let tail = normal_form(&g.tail(), &others);
            let (m, c) = g.leading().expect("nonzero");
            AffinePoly::from_terms(g.field(), [(m, c)]).add(&tail).monic()
        })
        .collect();
    out.sort_by(|a, b| match lm(b).grevlex(lm(a)) {
        Ordering::Equal => Ordering::Equal,
        o => o,
    });
    out
}

/// True iff the generators have no common zero over the algebraic closure,
/// i.e. the reduced Gröbner basis is `{1}`.
pub fn ideal_trivial(generators: &[AffinePoly]) -> Result<bool, PolyError> {
    if generators.iter().all(AffinePoly::is_zero) {
        return Err(PolyError::AllZero);
    }
    let basis = groebner_basis(generators);
    Ok(basis.len() == 1 && basis[0].is_constant() && !basis[0].is_zero())
}
