//! Polynomials: ternary forms, affine chart polynomials, univariate
//! polynomials, resultants and Gröbner bases.

mod affine;
mod groebner;
mod resultant;
mod univariate;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::gf::{Embedding, FieldDesc, FieldElem, FieldError};

pub use affine::{AffinePoly, Mono};
pub use groebner::{groebner_basis, ideal_trivial};
pub use resultant::{determinant, resultant, sylvester_matrix, Resultant, Ring};
pub use univariate::{UniPoly, UniRing};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("expected {expected} coefficients for a degree-{degree} form, got {got}")]
    CoefficientCount {
        degree: u32,
        expected: usize,
        got: usize,
    },
    #[error("forms of degree {0} have no partial derivatives of lower degree")]
    ConstantForm(u32),
    #[error("the zero form defines no curve")]
    ZeroForm,
    #[error("both resultant inputs are zero")]
    BothZero,
    #[error("every generator is zero")]
    AllZero,
    #[error("chart index {0} is not in 0..3")]
    BadChart(usize),
    #[error("cannot parse form: {0}")]
    Parse(String),
    #[error("polynomial has degree {got} but the target degree is {degree}")]
    DegreeTooHigh { degree: u32, got: u32 },
}

/// Number of monomials `X^a Y^b Z^c` with `a + b + c = d`.
pub fn monomial_count(d: u32) -> usize {
    let d = d as usize;
    (d + 1) * (d + 2) / 2
}

/// Exponent triples in storage order: graded lexicographic with `X > Y > Z`.
pub fn monomials(d: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::with_capacity(monomial_count(d));
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

/// Storage index of `X^a Y^b Z^c` among the degree `a + b + c` monomials.
pub fn monomial_index(exps: [u32; 3]) -> usize {
    let s = (exps[1] + exps[2]) as usize;
    s * (s + 1) / 2 + exps[2] as usize
}

/// The two affine coordinates of a chart, as indices into `[X, Y, Z]`.
pub fn chart_vars(chart: usize) -> [usize; 2] {
    match chart {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

/// A homogeneous polynomial of degree `d` in `X, Y, Z`.
#[derive(Clone, PartialEq, Eq)]
pub struct TernaryForm {
    field: FieldDesc,
    degree: u32,
    coeffs: Vec<FieldElem>,
}

impl fmt::Debug for TernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryForm({} over F_{}: {})", self.degree, self.field.spec(), self)
    }
}

impl TernaryForm {
    pub fn new(field: &FieldDesc, degree: u32, coeffs: Vec<FieldElem>) -> Result<Self, PolyError> {
        let expected = monomial_count(degree);
        if coeffs.len() != expected {
            return Err(PolyError::CoefficientCount {
                degree,
                expected,
                got: coeffs.len(),
            });
        }
        if let Some(&c) = coeffs.iter().find(|&&c| !field.contains(c)) {
            return Err(FieldError::OutOfRange {
                value: u64::from(c.index()),
                q: field.q(),
            }
            .into());
        }
        Ok(TernaryForm {
            field: field.clone(),
            degree,
            coeffs,
        })
    }

    pub fn zero(field: &FieldDesc, degree: u32) -> Self {
        TernaryForm {
            field: field.clone(),
            degree,
            coeffs: vec![FieldElem::ZERO; monomial_count(degree)],
        }
    }

    /// Builds a form from `(coefficient, [a, b, c])` terms; repeated monomials add up.
    pub fn from_terms(
        field: &FieldDesc,
        degree: u32,
        terms: &[(FieldElem, [u32; 3])],
    ) -> Result<Self, PolyError> {
        let mut form = TernaryForm::zero(field, degree);
        for &(c, exps) in terms {
            let got = exps.iter().sum::<u32>();
            if got != degree {
                return Err(PolyError::Parse(format!(
                    "monomial {exps:?} has degree {got}, expected {degree}"
                )));
            }
            if !field.contains(c) {
                return Err(FieldError::OutOfRange {
                    value: u64::from(c.index()),
                    q: field.q(),
                }
                .into());
            }
            let i = monomial_index(exps);
            form.coeffs[i] = field.add(form.coeffs[i], c);
        }
        Ok(form)
    }

    /// Decodes the base-`q` integer `Σ coeff_j q^j` (coefficient 0 least significant).
    pub fn decode(field: &FieldDesc, degree: u32, mut index: u64) -> Self {
        let q = u64::from(field.q());
        let coeffs = (0..monomial_count(degree))
            .map(|_| {
                let c = FieldElem((index % q) as u32);
                index /= q;
                c
            })
            .collect();
        TernaryForm {
            field: field.clone(),
            degree,
            coeffs,
        }
    }

    /// Canonical checkpoint encoding; inverse of [`TernaryForm::decode`].
    pub fn encode(&self) -> BigUint {
        let q = BigUint::from(self.field.q());
        self.coeffs
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, c| acc * &q + BigUint::from(c.index()))
    }

    pub fn encode_u64(&self) -> Option<u64> {
        self.encode().to_u64()
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, exps: [u32; 3]) -> FieldElem {
        self.coeffs[monomial_index(exps)]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `(coefficient, exponents)` for each nonzero term in storage order.
    pub fn terms(&self) -> impl Iterator<Item = (FieldElem, [u32; 3])> + '_ {
        monomials(self.degree)
            .into_iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (c, e))
    }

    pub fn scale(&self, c: FieldElem) -> Self {
        let f = &self.field;
        TernaryForm {
            field: f.clone(),
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Sum of two forms of the same degree over the same field.
    pub fn add(&self, other: &TernaryForm) -> Result<Self, PolyError> {
        if self.field != other.field {
            return Err(FieldError::MixedFields.into());
        }
        if self.degree != other.degree {
            return Err(PolyError::CoefficientCount {
                degree: self.degree,
                expected: self.coeffs.len(),
                got: other.coeffs.len(),
            });
        }
        let f = &self.field;
        Ok(TernaryForm {
            field: f.clone(),
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    /// Multiplies by the coordinate variable `var` (0 = X, 1 = Y, 2 = Z).
    pub fn mul_var(&self, var: usize) -> Self {
        let mut out = TernaryForm::zero(&self.field, self.degree + 1);
        for (c, mut e) in self.terms() {
            e[var] += 1;
            out.coeffs[monomial_index(e)] = c;
        }
        out
    }

    /// Formal partial derivative in `var` (0 = X, 1 = Y, 2 = Z).
    pub fn partial(&self, var: usize) -> Result<Self, PolyError> {
        if self.degree == 0 {
            return Err(PolyError::ConstantForm(0));
        }
        let f = &self.field;
        let mut out = TernaryForm::zero(f, self.degree - 1);
        for (c, mut e) in self.terms() {
            if e[var] == 0 {
                continue;
            }
            let factor = u64::from(e[var]);
            e[var] -= 1;
            out.coeffs[monomial_index(e)] = f.scale_int(c, factor);
        }
        Ok(out)
    }

    /// Value at `coords`, which must live in the form's own field.
    pub fn evaluate(&self, coords: &[FieldElem; 3]) -> FieldElem {
        eval_terms(&self.field, self.degree, &self.coeffs, coords)
    }

    /// Value at a point over an extension field reached through `emb`.
    pub fn evaluate_in(&self, emb: &Embedding, coords: &[FieldElem; 3]) -> Result<FieldElem, PolyError> {
        if emb.base() != &self.field {
            return Err(FieldError::MixedFields.into());
        }
        let lifted: Vec<FieldElem> = self.coeffs.iter().map(|&c| emb.apply(c)).collect();
        Ok(eval_terms(emb.ext(), self.degree, &lifted, coords))
    }

    /// The same polynomial with coefficients pushed into `emb.ext()`.
    pub fn lift(&self, emb: &Embedding) -> Result<Self, PolyError> {
        if emb.base() != &self.field {
            return Err(FieldError::MixedFields.into());
        }
        Ok(TernaryForm {
            field: emb.ext().clone(),
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&c| emb.apply(c)).collect(),
        })
    }

    /// Sets the chart variable to 1; the other two become `x1, x2` in order.
    pub fn dehomogenize(&self, chart: usize) -> Result<AffinePoly, PolyError> {
        if chart > 2 {
            return Err(PolyError::BadChart(chart));
        }
        let [u, v] = chart_vars(chart);
        let terms = self.terms().map(|(c, e)| (Mono::new(e[u], e[v]), c));
        Ok(AffinePoly::from_terms(&self.field, terms))
    }
}

fn eval_terms(field: &FieldDesc, degree: u32, coeffs: &[FieldElem], coords: &[FieldElem; 3]) -> FieldElem {
    let d = degree as usize;
    let pw: Vec<Vec<FieldElem>> = coords
        .iter()
        .map(|&x| {
            let mut v = Vec::with_capacity(d + 1);
            let mut cur = FieldElem::ONE;
            for _ in 0..=d {
                v.push(cur);
                cur = field.mul(cur, x);
            }
            v
        })
        .collect();
    monomials(degree)
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| !c.is_zero())
        .fold(FieldElem::ZERO, |acc, (e, &c)| {
            let m = field.mul(
                field.mul(pw[0][e[0] as usize], pw[1][e[1] as usize]),
                pw[2][e[2] as usize],
            );
            field.add(acc, field.mul(c, m))
        })
}

impl fmt::Display for TernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, e) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mono = format_monomial(e);
            if c == FieldElem::ONE && !mono.is_empty() {
                f.write_str(&mono)?;
                continue;
            }
            let ctext = self.field.format(c);
            let ctext = if self.field.k() > 1 && ctext.contains(['+', 't']) {
                format!("({ctext})")
            } else {
                ctext
            };
            if mono.is_empty() {
                f.write_str(&ctext)?;
            } else {
                write!(f, "{ctext}·{mono}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn format_monomial(e: [u32; 3]) -> String {
    let mut s = String::new();
    for (name, &n) in ["X", "Y", "Z"].iter().zip(&e) {
        match n {
            0 => {}
            1 => s.push_str(name),
            _ => {
                s.push_str(name);
                s.push('^');
                s.push_str(&n.to_string());
            }
        }
    }
    s
}

/// Parses the `c·X^aY^bZ^c + …` text form (`*` is accepted for `·`).
pub fn parse_form(field: &FieldDesc, degree: u32, text: &str) -> Result<TernaryForm, PolyError> {
    let bad = |msg: &str| PolyError::Parse(format!("{msg} in {text:?}"));
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned == "0" {
        return Ok(TernaryForm::zero(field, degree));
    }
    // split on '+' outside parentheses
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in cleaned.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == '+' && depth == 0 {
            terms.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    terms.push(cur);

    let mut parsed = Vec::new();
    for term in terms {
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let (coef, mono) = if let Some(rest) = term.strip_prefix('(') {
            let close = rest.find(')').ok_or_else(|| bad("unbalanced parenthesis"))?;
            (field.parse_elem(&rest[..close])?, &rest[close + 1..])
        } else {
            let split = term
                .find(['X', 'Y', 'Z', '·', '*'])
                .unwrap_or(term.len());
            if split == 0 {
                (FieldElem::ONE, &term[..])
            } else {
                let c = match term[..split].parse::<i64>() {
                    Ok(n) => field.from_int(n),
                    Err(_) => field
                        .parse_elem(&term[..split])
                        .map_err(|_| bad("bad coefficient"))?,
                };
                (c, &term[split..])
            }
        };
        let mono = mono.trim_start_matches(['·', '*']);
        let mut exps = [0u32; 3];
        let mut chars = mono.chars().peekable();
        while let Some(v) = chars.next() {
            let var = match v {
                'X' => 0,
                'Y' => 1,
                'Z' => 2,
                '1' if mono == "1" => continue,
                _ => return Err(bad("unexpected character")),
            };
            let mut n = 1u32;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                n = digits.parse().map_err(|_| bad("bad exponent"))?;
            }
            exps[var] += n;
        }
        parsed.push((coef, exps));
    }
    TernaryForm::from_terms(field, degree, &parsed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn f2() -> FieldDesc {
        make_field(2, 1).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(monomial_count(0), 1);
        assert_eq!(monomial_count(1), 3);
        assert_eq!(monomial_count(3), 10);
        assert_eq!(monomial_count(4), 15);
        for d in 0..8 {
            let ms = monomials(d);
            assert_eq!(ms.len(), monomial_count(d));
            for (i, &e) in ms.iter().enumerate() {
                assert_eq!(monomial_index(e), i);
            }
        }
        assert_eq!(monomials(2)[0], [2, 0, 0]);
        assert_eq!(monomials(2)[1], [1, 1, 0]);
        assert_eq!(monomials(2)[5], [0, 0, 2]);
    }

    #[test]
    fn evaluation_examples() {
        let f = f2();
        let x = parse_form(&f, 1, "X").unwrap();
        assert_eq!(x.evaluate(&[FieldElem(0), FieldElem(1), FieldElem(1)]), FieldElem(0));
        let fermat = parse_form(&f, 3, "X^3 + Y^3 + Z^3").unwrap();
        assert_eq!(fermat.evaluate(&[FieldElem(1); 3]), FieldElem(1));
    }

    #[test]
    fn scaling_law() {
        let f = make_field(3, 2).unwrap();
        let form = parse_form(&f, 3, "X^3 + (t+1)·XYZ + 2·Y^2Z + Z^3").unwrap();
        let v = [FieldElem(4), FieldElem(7), FieldElem(2)];
        for lam in f.elements() {
            let scaled = [f.mul(lam, v[0]), f.mul(lam, v[1]), f.mul(lam, v[2])];
            assert_eq!(
                form.evaluate(&scaled),
                f.mul(f.pow(lam, 3), form.evaluate(&v))
            );
        }
    }

    #[test]
    fn partial_examples() {
        let f = f2();
        let x3 = parse_form(&f, 3, "X^3").unwrap();
        assert_eq!(x3.partial(0).unwrap(), parse_form(&f, 2, "X^2").unwrap());
        let x2 = parse_form(&f, 2, "X^2").unwrap();
        assert!(x2.partial(0).unwrap().is_zero());
        let f3 = make_field(3, 1).unwrap();
        let fermat = parse_form(&f3, 3, "X^3 + Y^3 + Z^3").unwrap();
        assert!(fermat.partial(1).unwrap().is_zero());
        assert!(TernaryForm::zero(&f, 0).partial(0).is_err());
    }

    #[test]
    fn dehomogenize_examples() {
        let f = f2();
        let xyz = parse_form(&f, 3, "XYZ").unwrap();
        let a = xyz.dehomogenize(2).unwrap();
        assert_eq!(a.terms(), &[(Mono::new(1, 1), FieldElem::ONE)]);
        let z3 = parse_form(&f, 3, "Z^3").unwrap();
        let a = z3.dehomogenize(2).unwrap();
        assert!(a.is_constant() && !a.is_zero());
        let fermat = parse_form(&f, 3, "X^3 + Y^3 + Z^3").unwrap();
        let a = fermat.dehomogenize(2).unwrap();
        assert_eq!(a.total_degree(), Some(3));
        assert_eq!(a.terms().len(), 3);
        assert!(fermat.dehomogenize(3).is_err());
    }

    #[test]
    fn round_trip_homogenize() {
        let f = make_field(3, 1).unwrap();
        let form = parse_form(&f, 3, "X^2Y + 2·Y^3 + XZ^2").unwrap();
        for chart in 0..3 {
            let back = form.dehomogenize(chart).unwrap().homogenize(chart, 3).unwrap();
            assert_eq!(back, form);
        }
    }

    #[test]
    fn text_round_trip() {
        let f = make_field(2, 2).unwrap();
        let form = parse_form(&f, 2, "(t+1)·X^2 + t·XY + Z^2").unwrap();
        let text = form.to_string();
        assert_eq!(parse_form(&f, 2, &text).unwrap(), form);
        assert_eq!(TernaryForm::zero(&f, 2).to_string(), "0");
        assert!(parse_form(&f, 2, "X^3").is_err());
    }

    #[test]
    fn encode_decode() {
        let f = make_field(3, 1).unwrap();
        for idx in [0u64, 1, 2, 3, 100, 59048] {
            let form = TernaryForm::decode(&f, 3, idx);
            assert_eq!(form.encode_u64(), Some(idx));
        }
    }

    #[test]
    fn euler_relation_exhaustive_q2_small_degree() {
        let f = f2();
        for d in 1..=3u32 {
            let m = monomial_count(d) as u32;
            for idx in 0..(1u64 << m) {
                let form = TernaryForm::decode(&f, d, idx);
                let lhs = (0..3)
                    .map(|v| form.partial(v).unwrap().mul_var(v))
                    .reduce(|a, b| a.add(&b).unwrap())
                    .unwrap();
                let rhs = form.scale(f.from_int(i64::from(d)));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn euler_relation_sampled_q9() {
        use rand::{Rng, SeedableRng};
        let f = make_field(3, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in [2u32, 3, 4, 6] {
            for _ in 0..50 {
                let coeffs = (0..monomial_count(d))
                    .map(|_| FieldElem(rng.gen_range(0..f.q())))
                    .collect();
                let form = TernaryForm::new(&f, d, coeffs).unwrap();
                let lhs = (0..3)
                    .map(|v| form.partial(v).unwrap().mul_var(v))
                    .reduce(|a, b| a.add(&b).unwrap())
                    .unwrap();
                assert_eq!(lhs, form.scale(f.from_int(i64::from(d))));
            }
        }
    }
}
