//! Points of the projective plane over `F_q` and its extensions.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::gf::{embed, extension, FieldDesc, FieldElem, FieldError, DEFAULT_FIELD_LIMIT};
use crate::poly::{chart_vars, monomials, PolyError, TernaryForm};

/// Homogeneous coordinates with the first nonzero entry equal to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: [FieldElem; 3],
}

impl ProjPoint {
    /// Normalizes `coords`; `None` if all three are zero.
    pub fn new(field: &FieldDesc, coords: [FieldElem; 3]) -> Option<Self> {
        let lead = coords.iter().copied().find(|c| !c.is_zero())?;
        let inv = field.inv(lead).ok()?;
        Some(ProjPoint {
            coords: coords.map(|c| field.mul(c, inv)),
        })
    }

    pub fn coords(&self) -> &[FieldElem; 3] {
        &self.coords
    }

    /// Index of the first nonzero coordinate, which is also the chart used for jets.
    pub fn chart(&self) -> usize {
        self.coords
            .iter()
            .position(|c| !c.is_zero())
            .expect("a projective point has a nonzero coordinate")
    }

    /// Affine coordinates in the canonical chart.
    pub fn affine(&self) -> (FieldElem, FieldElem) {
        let [u, v] = chart_vars(self.chart());
        (self.coords[u], self.coords[v])
    }

    pub fn display<'a>(&'a self, field: &'a FieldDesc) -> impl fmt::Display + 'a {
        PointText { point: self, field }
    }
}

struct PointText<'a> {
    point: &'a ProjPoint,
    field: &'a FieldDesc,
}

impl fmt::Display for PointText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.point.coords.map(|x| self.field.format(x));
        write!(f, "[{a}:{b}:{c}]")
    }
}

/// Parses `"[a:b:c]"`, normalizing the result.
pub fn parse_point(field: &FieldDesc, text: &str) -> Result<ProjPoint, PolyError> {
    let bad = || PolyError::Parse(format!("bad point {text:?}"));
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(bad)?;
    let parts: Vec<&str> = inner.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut coords = [FieldElem::ZERO; 3];
    for (c, s) in coords.iter_mut().zip(parts) {
        *c = field.parse_elem(s.trim())?;
    }
    ProjPoint::new(field, coords).ok_or_else(bad)
}

/// `(f(P), ∂f/∂u(P), ∂f/∂v(P))` in the canonical chart of `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Jet {
    pub value: FieldElem,
    pub dx: FieldElem,
    pub dy: FieldElem,
}

impl Jet {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero() && self.dx.is_zero() && self.dy.is_zero()
    }
}

/// All `q^2+q+1` points, lexicographic in the coordinate triples.
pub fn enumerate_p2(field: &FieldDesc) -> Vec<ProjPoint> {
    let q = field.q() as usize;
    let mut out = Vec::with_capacity(q * q + q + 1);
    out.push(ProjPoint {
        coords: [FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE],
    });
    for b in field.elements() {
        out.push(ProjPoint {
            coords: [FieldElem::ZERO, FieldElem::ONE, b],
        });
    }
    for a in field.elements() {
        for b in field.elements() {
            out.push(ProjPoint {
                coords: [FieldElem::ONE, a, b],
            });
        }
    }
    out
}

/// The three linear functionals `form -> jet` at `point`, as rows over the
/// monomials of degree `d` in storage order.
pub fn jet_functionals(field: &FieldDesc, d: u32, point: &ProjPoint) -> [Vec<FieldElem>; 3] {
    let chart = point.chart();
    let [u, v] = chart_vars(chart);
    let c = point.coords;
    let mut rows = [Vec::new(), Vec::new(), Vec::new()];
    for e in monomials(d) {
        let pu = |k: u32| field.pow(c[u], u64::from(k));
        let pv = |k: u32| field.pow(c[v], u64::from(k));
        // the chart coordinate is 1
        rows[0].push(field.mul(pu(e[u]), pv(e[v])));
        rows[1].push(if e[u] == 0 {
            FieldElem::ZERO
        } else {
            field.scale_int(field.mul(pu(e[u] - 1), pv(e[v])), u64::from(e[u]))
        });
        rows[2].push(if e[v] == 0 {
            FieldElem::ZERO
        } else {
            field.scale_int(field.mul(pu(e[u]), pv(e[v] - 1)), u64::from(e[v]))
        });
    }
    rows
}

fn dot(field: &FieldDesc, row: &[FieldElem], coeffs: &[FieldElem]) -> FieldElem {
    row.iter()
        .zip(coeffs)
        .fold(FieldElem::ZERO, |acc, (&r, &c)| field.mul_add(acc, r, c))
}

/// Jet of `form` at a point rational over its field.
pub fn jet_at(form: &TernaryForm, point: &ProjPoint) -> Jet {
    let (x, y) = point.affine();
    let chart = form
        .dehomogenize(point.chart())
        .expect("chart index is in range");
    Jet {
        value: chart.eval(x, y),
        dx: chart.partial(0).eval(x, y),
        dy: chart.partial(1).eval(x, y),
    }
}

/// Precomputed value and jet functionals at every point of `P^2(F)`, for
/// repeated evaluation of forms of one degree.
#[derive(Debug, Clone)]
pub struct PointTable {
    field: FieldDesc,
    degree: u32,
    width: usize,
    points: Vec<ProjPoint>,
    // per point: value row, then dx row, then dy row
    rows: Vec<FieldElem>,
}

impl PointTable {
    pub fn new(field: &FieldDesc, degree: u32) -> Self {
        let points = enumerate_p2(field);
        let width = crate::poly::monomial_count(degree);
        let mut rows = Vec::with_capacity(points.len() * 3 * width);
        for p in &points {
            for r in jet_functionals(field, degree, p) {
                rows.extend(r);
            }
        }
        PointTable {
            field: field.clone(),
            degree,
            width,
            points,
            rows,
        }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn row(&self, i: usize, which: usize) -> &[FieldElem] {
        let start = (3 * i + which) * self.width;
        &self.rows[start..start + self.width]
    }

    /// Value at point `i` of the form with the given coefficients.
    pub fn value(&self, i: usize, coeffs: &[FieldElem]) -> FieldElem {
        dot(&self.field, self.row(i, 0), coeffs)
    }

    pub fn jet(&self, i: usize, coeffs: &[FieldElem]) -> Jet {
        Jet {
            value: self.value(i, coeffs),
            dx: dot(&self.field, self.row(i, 1), coeffs),
            dy: dot(&self.field, self.row(i, 2), coeffs),
        }
    }

    /// Number of points where the form vanishes.
    pub fn count(&self, coeffs: &[FieldElem]) -> u32 {
        (0..self.points.len())
            .filter(|&i| self.value(i, coeffs).is_zero())
            .count() as u32
    }

    /// Index of the first point where value and both chart derivatives vanish.
    pub fn first_singular(&self, coeffs: &[FieldElem]) -> Option<usize> {
        (0..self.points.len()).find(|&i| self.value(i, coeffs).is_zero() && {
            let j = self.jet(i, coeffs);
            j.dx.is_zero() && j.dy.is_zero()
        })
    }

    /// All points where value and both chart derivatives vanish.
    pub fn singular_points(&self, coeffs: &[FieldElem]) -> Vec<ProjPoint> {
        (0..self.points.len())
            .filter(|&i| self.jet(i, coeffs).is_zero())
            .map(|i| self.points[i])
            .collect()
    }
}

/// `#C_F(F_{q^e})`: points of `P^2(F_{q^e})` on the curve.
pub fn point_count(form: &TernaryForm, e: u32) -> Result<u64, PolyError> {
    if form.is_zero() {
        return Err(PolyError::ZeroForm);
    }
    if e == 0 {
        return Err(PolyError::Field(FieldError::ZeroDegree));
    }
    let base = form.field();
    if e == 1 {
        let pts = enumerate_p2(base);
        return Ok(pts
            .iter()
            .filter(|p| form.evaluate(p.coords()).is_zero())
            .count() as u64);
    }
    let ext = extension(base, e, DEFAULT_FIELD_LIMIT)?;
    let emb = embed(base, &ext)?;
    let lifted = form.lift(&emb)?;
    Ok(enumerate_p2(&ext)
        .iter()
        .filter(|p| lifted.evaluate(p.coords()).is_zero())
        .count() as u64)
}

fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `#P^2(F_{q^j}) = q^{2j} + q^j + 1`.
pub fn p2_size(q: u64, j: u32) -> BigUint {
    let qj = BigUint::from(q).pow(j);
    &qj * &qj + &qj + 1u32
}

/// Number of closed points of degree `e` on `P^2` over `F_q`, by Möbius inversion.
pub fn closed_point_count_q(q: u64, e: u32) -> BigUint {
    assert!(e >= 1, "closed points have degree at least 1");
    let mut acc = BigInt::zero();
    for j in (1..=e).filter(|j| e.is_multiple_of(*j)) {
        let mu = mobius(u64::from(e / j));
        if mu != 0 {
            acc += BigInt::from(mu) * BigInt::from(p2_size(q, j));
        }
    }
    let acc = acc / BigInt::from(e);
    debug_assert!(!acc.is_negative());
    acc.to_biguint().unwrap_or_else(BigUint::one)
}

pub fn closed_point_count(field: &FieldDesc, e: u32) -> BigUint {
    closed_point_count_q(u64::from(field.q()), e)
}
