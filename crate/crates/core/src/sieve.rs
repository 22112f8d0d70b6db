//! Densities of forms with prescribed jets at finitely many rational points.
//!
//! When the jet evaluation map `S_d -> H^0(Z, O_Z)` is surjective every
//! fiber has the same size, so densities are exact ratios read off a rank
//! computation. Everything here is exact; generic results are returned in
//! any [`Scalar`].

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldDesc, FieldElem};
use crate::plane::{closed_point_count_q, enumerate_p2, jet_functionals, parse_point, ProjPoint};
use crate::poly::monomial_count;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SieveError {
    #[error("neighborhood order must be 1 or 2, got {0}")]
    BadOrder(u8),
    #[error("point listed twice in the jet scheme")]
    DuplicatePoint,
    #[error("target has {got} constraints for {expected} points")]
    TargetLength { expected: usize, got: usize },
    #[error("constraint {constraint} needs an order-2 neighborhood")]
    ConstraintOrder { constraint: PointConstraint },
    #[error("jet map has rank {rank} < {dim}; not surjective in degree {d}")]
    NotSurjective { d: u32, rank: usize, dim: usize },
    #[error("degree {d} is below the required bound {required}")]
    DegreeBound { d: u32, required: u64 },
    #[error("zeta values need s >= 3, got {0}")]
    ZetaRegion(u32),
    #[error("closed points of degree >= 2 have no rational coordinates (r = {0})")]
    NonRational(u32),
    #[error("cannot parse jet scheme entry {0:?}")]
    Parse(String),
    #[error("computation needs {needed} steps, over the limit {limit}")]
    TooLarge { needed: u128, limit: u128 },
}

/// Neighborhood order at a point: `Value` sees `f(P)`, `Jet` sees `f(P)` and
/// both chart derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Order {
    Value,
    Jet,
}

impl Order {
    pub fn from_u8(n: u8) -> Result<Self, SieveError> {
        match n {
            1 => Ok(Order::Value),
            2 => Ok(Order::Jet),
            _ => Err(SieveError::BadOrder(n)),
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Order::Value => 1,
            Order::Jet => 2,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Order::Value => 1,
            Order::Jet => 3,
        }
    }
}

/// A finite set of rational points with neighborhood orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ZConfig {
    entries: Vec<(ProjPoint, Order)>,
}

impl ZConfig {
    pub fn new(entries: Vec<(ProjPoint, Order)>) -> Result<Self, SieveError> {
        let mut seen: Vec<ProjPoint> = entries.iter().map(|e| e.0).collect();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(SieveError::DuplicatePoint);
        }
        Ok(ZConfig { entries })
    }

    pub fn empty() -> Self {
        ZConfig::default()
    }

    pub fn single(point: ProjPoint, order: Order) -> Self {
        ZConfig {
            entries: vec![(point, order)],
        }
    }

    /// Every rational point, in enumeration order.
    pub fn all_points(field: &FieldDesc, order: Order) -> Self {
        ZConfig {
            entries: enumerate_p2(field).into_iter().map(|p| (p, order)).collect(),
        }
    }

    pub fn entries(&self) -> &[(ProjPoint, Order)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `dim H^0(Z, O_Z)`.
    pub fn dim(&self) -> usize {
        self.entries.iter().map(|e| e.1.dim()).sum()
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.entries.iter().any(|e| &e.0 == p)
    }

    /// The union with further entries; duplicate points are rejected.
    pub fn extended(&self, more: impl IntoIterator<Item = (ProjPoint, Order)>) -> Result<Self, SieveError> {
        let mut entries = self.entries.clone();
        entries.extend(more);
        ZConfig::new(entries)
    }

    /// Parses `none`, `all^1`, `all^2`, or a comma list like `[0:0:1]^2,[0:1:0]^1`
    /// (a point without `^` has order 1).
    pub fn parse(field: &FieldDesc, text: &str) -> Result<Self, SieveError> {
        let text = text.trim();
        match text {
            "" | "none" => return Ok(ZConfig::empty()),
            "all" | "all^1" => return Ok(ZConfig::all_points(field, Order::Value)),
            "all^2" => return Ok(ZConfig::all_points(field, Order::Jet)),
            _ => {}
        }
        let mut entries = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (pt, order) = match item.rsplit_once('^') {
                Some((pt, o)) if pt.ends_with(']') => {
                    let n = o.trim().parse::<u8>().map_err(|_| SieveError::Parse(item.to_string()))?;
                    (pt, Order::from_u8(n)?)
                }
                _ => (item, Order::Value),
            };
            let p = parse_point(field, pt).map_err(|_| SieveError::Parse(item.to_string()))?;
            entries.push((p, order));
        }
        ZConfig::new(entries)
    }

    /// Canonical text, e.g. `[0:0:1]^2,[0:1:0]^1`.
    pub fn describe(&self, field: &FieldDesc) -> String {
        self.entries
            .iter()
            .map(|(p, o)| format!("{}^{}", p.display(field), o.as_u8()))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// The matrix of the jet evaluation map in degree `d`: one row per
/// coordinate of `H^0(Z, O_Z)`, one column per monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetMatrix {
    field: FieldDesc,
    d: u32,
    rows: Vec<Vec<FieldElem>>,
}

impl JetMatrix {
    pub fn rows(&self) -> &[Vec<FieldElem>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        monomial_count(self.d)
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn rank(&self) -> usize {
        rank(&self.field, &self.rows)
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.n_rows()
    }
}

pub fn jet_matrix(field: &FieldDesc, d: u32, z: &ZConfig) -> JetMatrix {
    let mut rows = Vec::with_capacity(z.dim());
    for (p, order) in &z.entries {
        let [value, dx, dy] = jet_functionals(field, d, p);
        rows.push(value);
        if *order == Order::Jet {
            rows.push(dx);
            rows.push(dy);
        }
    }
    JetMatrix {
        field: field.clone(),
        d,
        rows,
    }
}

/// Row echelon form in place; returns the pivot columns.
fn echelon(field: &FieldDesc, m: &mut [Vec<FieldElem>]) -> Vec<usize> {
    let n_cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n_cols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = field.inv(m[r][c]).expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = field.neg(row[c]);
            for (x, &v) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = field.mul_add(*x, factor, v);
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

/// Row rank over the field.
pub fn rank(field: &FieldDesc, rows: &[Vec<FieldElem>]) -> usize {
    let mut m = rows.to_vec();
    echelon(field, &mut m).len()
}

/// Allowed jets at one point of the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointConstraint {
    ValueZero,
    ValueNonzero,
    JetZero,
    JetNonzero,
    /// `f(P) = 0` with a nonzero derivative: on the curve and smooth there.
    OnCurveSmooth,
    Unconstrained,
}

impl fmt::Display for PointConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PointConstraint::ValueZero => "value-zero",
            PointConstraint::ValueNonzero => "value-nonzero",
            PointConstraint::JetZero => "jet-zero",
            PointConstraint::JetNonzero => "jet-nonzero",
            PointConstraint::OnCurveSmooth => "on-curve-smooth",
            PointConstraint::Unconstrained => "unconstrained",
        };
        f.write_str(s)
    }
}

impl PointConstraint {
    /// Number of allowed local values in `O_P / m_P^order`.
    pub fn cardinality(self, q: u64, order: Order) -> Result<BigUint, SieveError> {
        let q = BigUint::from(q);
        let q2 = &q * &q;
        let q3 = &q2 * &q;
        Ok(match (order, self) {
            (Order::Value, PointConstraint::ValueZero) => BigUint::one(),
            (Order::Value, PointConstraint::ValueNonzero) => q - 1u32,
            (Order::Value, PointConstraint::Unconstrained) => q,
            (Order::Value, c) => return Err(SieveError::ConstraintOrder { constraint: c }),
            (Order::Jet, PointConstraint::ValueZero) => q2,
            (Order::Jet, PointConstraint::ValueNonzero) => (q - 1u32) * q2,
            (Order::Jet, PointConstraint::JetZero) => BigUint::one(),
            (Order::Jet, PointConstraint::JetNonzero) => q3 - 1u32,
            (Order::Jet, PointConstraint::OnCurveSmooth) => q2 - 1u32,
            (Order::Jet, PointConstraint::Unconstrained) => q3,
        })
    }

    /// Whether a local value `(value, dx, dy)` satisfies the constraint.
    pub fn admits(self, value: FieldElem, dx: FieldElem, dy: FieldElem) -> bool {
        let jet_zero = value.is_zero() && dx.is_zero() && dy.is_zero();
        match self {
            PointConstraint::ValueZero => value.is_zero(),
            PointConstraint::ValueNonzero => !value.is_zero(),
            PointConstraint::JetZero => jet_zero,
            PointConstraint::JetNonzero => !jet_zero,
            PointConstraint::OnCurveSmooth => value.is_zero() && !jet_zero,
            PointConstraint::Unconstrained => true,
        }
    }
}

/// One constraint per entry of a [`ZConfig`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TargetSet {
    pub constraints: Vec<PointConstraint>,
}

impl TargetSet {
    pub fn new(constraints: Vec<PointConstraint>) -> Self {
        TargetSet { constraints }
    }

    pub fn uniform(c: PointConstraint, n: usize) -> Self {
        TargetSet {
            constraints: vec![c; n],
        }
    }

    /// `|T|` as a product over points.
    pub fn cardinality(&self, q: u64, z: &ZConfig) -> Result<BigUint, SieveError> {
        if self.constraints.len() != z.len() {
            return Err(SieveError::TargetLength {
                expected: z.len(),
                got: self.constraints.len(),
            });
        }
        let mut acc = BigUint::one();
        for (c, (_, order)) in self.constraints.iter().zip(z.entries()) {
            acc *= c.cardinality(q, *order)?;
        }
        Ok(acc)
    }
}

fn to_scalar<S: Scalar>(num: &BigUint, den: &BigUint) -> S {
    S::from_ratio(&num.clone().into(), &den.clone().into())
}

/// `#{F in S_d : jets in T} / #S_d = |T| / q^dim`, valid once the jet map is
/// shown surjective by an explicit rank computation.
pub fn fiber_density<S: Scalar>(field: &FieldDesc, d: u32, z: &ZConfig, t: &TargetSet) -> Result<S, SieveError> {
    let card = t.cardinality(u64::from(field.q()), z)?;
    let m = jet_matrix(field, d, z);
    let r = m.rank();
    if r != z.dim() {
        return Err(SieveError::NotSurjective {
            d,
            rank: r,
            dim: z.dim(),
        });
    }
    let den = BigUint::from(field.q()).pow(z.dim() as u32);
    Ok(to_scalar(&card, &den))
}

/// Number of closed points of each degree `1..r` in `U = P^2 \ Z`.
fn closed_points_below(q: u64, r: u32, z: &ZConfig) -> Vec<(u32, BigUint)> {
    (1..r)
        .map(|e| {
            let mut n = closed_point_count_q(q, e);
            if e == 1 {
                n -= BigUint::from(z.len());
            }
            (e, n)
        })
        .collect()
}

fn euler_factor<S: Scalar>(q: u64, below: &[(u32, BigUint)]) -> S {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for (e, n) in below {
        let n: u32 = n.try_into().expect("closed point counts at small degree fit in u32");
        let qe = BigUint::from(q).pow(3 * e);
        num *= (&qe - 1u32).pow(n);
        den *= qe.pow(n);
    }
    to_scalar(&num, &den)
}

/// `s = #U_{<r}` and the degree bound `3rs + dim - 1`.
pub fn p_dr_bound(q: u64, r: u32, z: &ZConfig) -> (BigUint, BigUint) {
    let s: BigUint = closed_points_below(q, r, z).into_iter().map(|(_, n)| n).sum();
    let total = BigUint::from(3 * r) * &s + BigUint::from(z.dim());
    let bound = if total.is_zero() { total } else { total - 1u32 };
    (s, bound)
}

/// `(|T| / q^dim) · ∏_{P in U_{<r}} (1 - q^{-3 deg P})`, the exact density of
/// forms smooth at every closed point of degree `< r` outside `Z` and with
/// jets in `T` on `Z`; requires `d ≥ 3rs + dim - 1`.
pub fn p_dr_formula<S: Scalar>(field: &FieldDesc, d: u32, r: u32, z: &ZConfig, t: &TargetSet) -> Result<S, SieveError> {
    let q = u64::from(field.q());
    let (_, bound) = p_dr_bound(q, r, z);
    if BigUint::from(d) < bound {
        return Err(SieveError::DegreeBound {
            d,
            required: bound.try_into().unwrap_or(u64::MAX),
        });
    }
    let card = t.cardinality(q, z)?;
    let den = BigUint::from(q).pow(z.dim() as u32);
    let local: S = to_scalar(&card, &den);
    Ok(local * euler_factor::<S>(q, &closed_points_below(q, r, z)))
}

/// Outcome of certifying the product formula by an explicit rank computation.
#[derive(Debug, Clone, PartialEq)]
pub struct PdrCertificate<S> {
    pub d: u32,
    pub dim: usize,
    pub rank: usize,
    pub surjective: bool,
    /// The formula's value; exact for `S_d` when `surjective`.
    pub density: S,
}

/// The product formula for `r ≤ 2`, where `U_{<r}` consists of rational
/// points, certified by the rank of the combined jet map on `Z` plus an
/// order-2 neighborhood of every rational point outside `Z`.
pub fn p_dr_certified<S: Scalar>(
    field: &FieldDesc,
    d: u32,
    r: u32,
    z: &ZConfig,
    t: &TargetSet,
) -> Result<PdrCertificate<S>, SieveError> {
    if r > 2 {
        return Err(SieveError::NonRational(r));
    }
    let q = u64::from(field.q());
    let card = t.cardinality(q, z)?;
    let extra: Vec<(ProjPoint, Order)> = if r == 2 {
        enumerate_p2(field)
            .into_iter()
            .filter(|p| !z.contains(p))
            .map(|p| (p, Order::Jet))
            .collect()
    } else {
        Vec::new()
    };
    let combined = z.extended(extra)?;
    let m = jet_matrix(field, d, &combined);
    let rank = m.rank();
    let den = BigUint::from(q).pow(z.dim() as u32);
    let local: S = to_scalar(&card, &den);
    Ok(PdrCertificate {
        d,
        dim: combined.dim(),
        rank,
        surjective: rank == combined.dim(),
        density: local * euler_factor::<S>(q, &closed_points_below(q, r, z)),
    })
}

/// Smallest `d` in `1..=max_d` at which the jet map of `z` is surjective.
pub fn smallest_surjective_degree(field: &FieldDesc, z: &ZConfig, max_d: u32) -> Option<u32> {
    (1..=max_d).find(|&d| jet_matrix(field, d, z).is_surjective())
}

/// `ζ_{P^2}(s) = 1 / ((1 - q^{-s})(1 - q^{1-s})(1 - q^{2-s}))`.
pub fn zeta_p2<S: Scalar>(q: u64, s: u32) -> Result<S, SieveError> {
    if s < 3 {
        return Err(SieveError::ZetaRegion(s));
    }
    let mut inv = S::one();
    for k in 0..3 {
        let qe = BigUint::from(q).pow(s - k);
        inv = inv * to_scalar::<S>(&(&qe - 1u32), &qe);
    }
    Ok(S::one() / inv)
}

/// `ζ_U(s)` for `U = P^2 \ Z`: the Euler factors of the removed rational points divided out.
pub fn zeta_u<S: Scalar>(q: u64, s: u32, z: &ZConfig) -> Result<S, SieveError> {
    let zp = zeta_p2::<S>(q, s)?;
    let qs = BigUint::from(q).pow(s);
    let factor: S = to_scalar(&(&qs - 1u32), &qs);
    Ok(zp * num_traits::pow(factor, z.len()))
}

/// The truncated product `∏_{P in U, deg P < r} (1 - q^{-3 deg P})`.
pub fn truncated_euler_product<S: Scalar>(q: u64, r: u32, z: &ZConfig) -> S {
    euler_factor(q, &closed_points_below(q, r, z))
}

/// Right-hand sides of the medium- and high-degree tail estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct TailBounds<S> {
    pub medium: S,
    pub high: S,
    /// False when `d/3` is not an integer and the exponent `min(⌊d/p⌋+1, d/3)`
    /// was replaced by `min(⌊d/p⌋+1, ⌊d/3⌋)`, which can only enlarge the bound.
    pub high_exponent_exact: bool,
}

/// `medium = 2 q^{-r} / (1 - q^{-1})` and
/// `high = 3(d-1)^2 q^{-min(⌊d/p⌋+1, d/3)} + 3d q^{-⌊(d-1)/p⌋-1}`.
pub fn tail_bounds<S: Scalar>(field: &FieldDesc, d: u32, r: u32) -> TailBounds<S> {
    let q = u64::from(field.q());
    let p = field.p();
    let qb = BigUint::from(q);
    // 2 q^{-r} / (1 - 1/q) = 2 q^{1-r} / (q - 1)
    let medium: S = if r == 0 {
        to_scalar(&(BigUint::from(2u32) * &qb), &(&qb - 1u32))
    } else {
        to_scalar(&BigUint::from(2u32), &(qb.pow(r - 1) * (&qb - 1u32)))
    };
    let e_p = d / p + 1;
    // with d/3 fractional the minimum is e_p exactly when e_p <= ⌊d/3⌋
    let exact = d.is_multiple_of(3) || e_p <= d / 3;
    let e1 = e_p.min(d / 3);
    let e2 = d.saturating_sub(1) / p + 1;
    let dm1 = BigUint::from(d.saturating_sub(1));
    let t1: S = to_scalar(&(BigUint::from(3u32) * &dm1 * &dm1), &qb.pow(e1));
    let t2: S = to_scalar(&BigUint::from(3 * d), &qb.pow(e2));
    TailBounds {
        medium,
        high: t1 + t2,
        high_exponent_exact: exact,
    }
}

/// Density of forms with a singular point at some rational point, by
/// inclusion–exclusion over subsets `A` of `P^2(F_q)`: forms singular on all
/// of `A` make up `q^{-rank}` of `S_d`, with `rank` that of the order-2 jet map on `A`.
pub fn singular_at_rational_density<S: Scalar>(field: &FieldDesc, d: u32, limit: u128) -> Result<S, SieveError> {
    let pts = enumerate_p2(field);
    let n = pts.len();
    let needed = 1u128 << n.min(127);
    if n >= 127 || needed > limit {
        return Err(SieveError::TooLarge { needed, limit });
    }
    let funcs: Vec<[Vec<FieldElem>; 3]> = pts.iter().map(|p| jet_functionals(field, d, p)).collect();
    let q = BigUint::from(field.q());
    let m = monomial_count(d) as u32;
    // accumulate sum of ± q^{m - rank} as integers, divide by q^m at the end
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    let mut rows: Vec<Vec<FieldElem>> = Vec::new();
    for mask in 1u64..(1u64 << n) {
        rows.clear();
        for (i, f) in funcs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rows.extend(f.iter().cloned());
            }
        }
        let rk = rank(field, &rows) as u32;
        let term = q.pow(m - rk);
        if mask.count_ones() % 2 == 1 {
            pos += term;
        } else {
            neg += term;
        }
    }
    Ok(to_scalar(&(pos - neg), &q.pow(m)))
}

/// Exact number of forms in `S_d` (zero form included) with each rational
/// point count `t = 0..=q^2+q+1`. Enumerates the image of the value map at
/// the rational points, so costs `q^rank` steps.
pub fn all_forms_point_counts(field: &FieldDesc, d: u32, limit: u128) -> Result<Vec<BigUint>, SieveError> {
    let z = ZConfig::all_points(field, Order::Value);
    let m = jet_matrix(field, d, &z);
    let n = z.len();
    let q = u64::from(field.q());
    // columns of the value matrix span the image; keep an independent subset
    let width = m.n_cols();
    let mut cols: Vec<Vec<FieldElem>> = (0..width)
        .map(|j| m.rows().iter().map(|row| row[j]).collect())
        .collect();
    let chosen = {
        // greedy choice of independent columns
        let mut basis: Vec<Vec<FieldElem>> = Vec::new();
        let mut chosen = Vec::new();
        for (j, col) in cols.iter().enumerate() {
            let mut trial = basis.clone();
            trial.push(col.clone());
            if rank(field, &trial) == trial.len() {
                basis = trial;
                chosen.push(j);
            }
        }
        chosen
    };
    let reduced: Vec<Vec<FieldElem>> = chosen.iter().map(|&j| std::mem::take(&mut cols[j])).collect();
    let rk = reduced.len() as u32;
    let needed = (q as u128).checked_pow(rk).unwrap_or(u128::MAX);
    if needed > limit {
        return Err(SieveError::TooLarge { needed, limit });
    }
    let fiber = BigUint::from(q).pow(width as u32 - rk);
    let mut counts = vec![0u64; n + 1];
    let mut digits = vec![0u32; rk as usize];
    let mut vec = vec![FieldElem::ZERO; n];
    loop {
        let zeros = vec.iter().filter(|v| v.is_zero()).count();
        counts[zeros] += 1;
        // odometer step, updating the image vector incrementally
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(counts.into_iter().map(|c| BigUint::from(c) * &fiber).collect());
            }
            let old = FieldElem(digits[i]);
            digits[i] = (digits[i] + 1) % q as u32;
            let new = FieldElem(digits[i]);
            let delta = field.sub(new, old);
            for (v, &c) in vec.iter_mut().zip(&reduced[i]) {
                *v = field.mul_add(*v, delta, c);
            }
            if digits[i] != 0 {
                break;
            }
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::poly::TernaryForm;
    use crate::Rational;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn scheme_text_round_trip() {
        let f = make_field(3, 1).unwrap();
        let z = ZConfig::parse(&f, "[0:0:1]^2, [1:2:0]").unwrap();
        assert_eq!(z.dim(), 4);
        assert_eq!(z.describe(&f), "[0:0:1]^2,[1:2:0]^1");
        assert_eq!(ZConfig::parse(&f, &z.describe(&f)).unwrap(), z);
        assert_eq!(ZConfig::parse(&f, "all^2").unwrap().dim(), 39);
        assert!(ZConfig::parse(&f, "none").unwrap().is_empty());
        assert!(ZConfig::parse(&f, "[0:0:1],[0:0:2]").is_err());
        assert!(ZConfig::parse(&f, "[0:0:1]^3").is_err());
        assert!(ZConfig::parse(&f, "[0:0:0]").is_err());
    }

    #[test]
    fn matrix_examples() {
        let f = make_field(2, 1).unwrap();
        let p = parse_point(&f, "[0:0:1]").unwrap();
        let m = jet_matrix(&f, 1, &ZConfig::single(p, Order::Value));
        assert_eq!(m.n_rows(), 1);
        let row: Vec<u32> = m.rows()[0].iter().map(|x| x.index()).collect();
        // storage order X, Y, Z
        assert_eq!(row, [0, 0, 1]);
        let m = jet_matrix(&f, 2, &ZConfig::single(p, Order::Jet));
        assert_eq!((m.n_rows(), m.n_cols(), m.rank()), (3, 6, 3));
        assert_eq!(jet_matrix(&f, 1, &ZConfig::single(p, Order::Jet)).rank(), 3);
        let all = ZConfig::all_points(&f, Order::Value);
        let m = jet_matrix(&f, 6, &all);
        assert_eq!((m.n_rows(), m.n_cols(), m.rank()), (7, 28, 7));
        assert_eq!(rank(&f, &vec![vec![FieldElem::ZERO; 3]; 2]), 0);
        let id: Vec<Vec<FieldElem>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { FieldElem::ONE } else { FieldElem::ZERO }).collect())
            .collect();
        assert_eq!(rank(&f, &id), 3);
    }

    #[test]
    fn jet_rows_match_jet_at_on_monomials() {
        let f = make_field(3, 1).unwrap();
        let z = ZConfig::all_points(&f, Order::Jet);
        let m = jet_matrix(&f, 3, &z);
        for j in 0..m.n_cols() {
            let mut coeffs = vec![FieldElem::ZERO; m.n_cols()];
            coeffs[j] = FieldElem::ONE;
            let form = TernaryForm::new(&f, 3, coeffs).unwrap();
            for (i, (p, _)) in z.entries().iter().enumerate() {
                let jet = crate::plane::jet_at(&form, p);
                assert_eq!(m.rows()[3 * i][j], jet.value);
                assert_eq!(m.rows()[3 * i + 1][j], jet.dx);
                assert_eq!(m.rows()[3 * i + 2][j], jet.dy);
            }
        }
    }

    #[test]
    fn fiber_density_examples() {
        let f = make_field(2, 1).unwrap();
        let all = ZConfig::all_points(&f, Order::Value);
        let t = TargetSet::uniform(PointConstraint::ValueZero, 7);
        assert_eq!(fiber_density::<Rational>(&f, 6, &all, &t).unwrap(), rat(1, 128));
        let p = parse_point(&f, "[0:0:1]").unwrap();
        let one = ZConfig::single(p, Order::Jet);
        let t = TargetSet::uniform(PointConstraint::JetZero, 1);
        assert_eq!(fiber_density::<Rational>(&f, 2, &one, &t).unwrap(), rat(1, 8));
        let all2 = ZConfig::all_points(&f, Order::Jet);
        let t = TargetSet::uniform(PointConstraint::OnCurveSmooth, 7);
        let dens: Rational = fiber_density(&f, 20, &all2, &t).unwrap();
        assert_eq!(dens, num_traits::pow(rat(3, 8), 7));
        // below the surjectivity threshold the error reports the rank
        assert!(matches!(
            fiber_density::<Rational>(&f, 2, &all2, &t),
            Err(SieveError::NotSurjective { rank: 6, .. })
        ));
        assert!(fiber_density::<f64>(&f, 2, &one, &TargetSet::uniform(PointConstraint::JetZero, 1)).unwrap() == 0.125);
    }

    #[test]
    fn target_cardinalities() {
        let f = make_field(3, 1).unwrap();
        let all = ZConfig::all_points(&f, Order::Jet);
        // t points on the curve and smooth, the rest off the curve
        for t in [0usize, 4, 13] {
            let mut c = vec![PointConstraint::OnCurveSmooth; t];
            c.resize(13, PointConstraint::ValueNonzero);
            let card = TargetSet::new(c).cardinality(3, &all).unwrap();
            let expect = BigUint::from(8u32).pow(t as u32) * BigUint::from(2u32 * 9).pow(13 - t as u32);
            assert_eq!(card, expect);
        }
        assert!(PointConstraint::JetZero.cardinality(3, Order::Value).is_err());
    }

    #[test]
    fn product_formula_examples() {
        let f = make_field(2, 1).unwrap();
        let empty = ZConfig::empty();
        let trivial = TargetSet::default();
        let v: Rational = p_dr_formula(&f, 41, 2, &empty, &trivial).unwrap();
        assert_eq!(v, num_traits::pow(rat(7, 8), 7));
        assert!(matches!(
            p_dr_formula::<Rational>(&f, 40, 2, &empty, &trivial),
            Err(SieveError::DegreeBound { required: 41, .. })
        ));
        let (s, bound) = p_dr_bound(2, 3, &empty);
        assert_eq!(s, BigUint::from(14u32));
        let v: Rational = p_dr_formula(&f, bound.try_into().unwrap(), 3, &empty, &trivial).unwrap();
        assert_eq!(v, num_traits::pow(rat(7, 8), 7) * num_traits::pow(rat(63, 64), 7));
        // r = 0 is the plain fiber density
        let p = parse_point(&f, "[0:0:1]").unwrap();
        let one = ZConfig::single(p, Order::Jet);
        let t = TargetSet::uniform(PointConstraint::JetZero, 1);
        assert_eq!(p_dr_formula::<Rational>(&f, 2, 0, &one, &t).unwrap(), rat(1, 8));
    }

    #[test]
    fn certified_product_formula() {
        let f = make_field(2, 1).unwrap();
        let cert: PdrCertificate<Rational> =
            p_dr_certified(&f, 41, 2, &ZConfig::empty(), &TargetSet::default()).unwrap();
        assert!(cert.surjective);
        assert_eq!((cert.rank, cert.dim), (21, 21));
        assert_eq!(cert.density, num_traits::pow(rat(7, 8), 7));
        let all2 = ZConfig::all_points(&f, Order::Jet);
        let smallest = smallest_surjective_degree(&f, &all2, 41).unwrap();
        assert!(smallest <= 20);
        assert!(!jet_matrix(&f, smallest - 1, &all2).is_surjective());
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta_p2::<Rational>(2, 3).unwrap(), rat(64, 21));
        assert_eq!(zeta_p2::<Rational>(3, 3).unwrap(), rat(729, 416));
        assert!(zeta_p2::<Rational>(2, 2).is_err());
        let f = make_field(3, 1).unwrap();
        let all = ZConfig::all_points(&f, Order::Value);
        let ratio = zeta_p2::<Rational>(3, 3).unwrap() / zeta_u::<Rational>(3, 3, &all).unwrap();
        assert_eq!(ratio, num_traits::pow(rat(27, 26), 13));
        // the truncated product sits between ζ_U(3)^{-1} and ζ_U(3)^{-1}/(1 - 2q^{-r}/(1-q^{-1}))
        for r in 2..6u32 {
            let tp: Rational = truncated_euler_product(3, r, &ZConfig::empty());
            let inv = Rational::one() / zeta_u::<Rational>(3, 3, &ZConfig::empty()).unwrap();
            let slack = Rational::one() - rat(2, 1) * rat(3, 2) / Rational::from_count(3u64.pow(r));
            assert!(tp >= inv);
            assert!(tp <= inv / slack);
        }
    }

    #[test]
    fn tail_bound_examples() {
        let f2 = make_field(2, 1).unwrap();
        let b: TailBounds<Rational> = tail_bounds(&f2, 6, 4);
        assert_eq!(b.medium, rat(1, 4));
        assert_eq!(b.high, rat(21, 1));
        assert!(b.high_exponent_exact);
        let f5 = make_field(5, 1).unwrap();
        let b: TailBounds<Rational> = tail_bounds(&f5, 30, 1);
        let expect = rat(3 * 841, 5i64.pow(7)) + rat(90, 5i64.pow(6));
        assert_eq!(b.high, expect);
        // d = 4, p = 2: min(3, 4/3) has a fractional second argument
        let b: TailBounds<Rational> = tail_bounds(&f2, 4, 1);
        assert!(!b.high_exponent_exact);
    }

    #[test]
    fn inclusion_exclusion_matches_enumeration() {
        let f = make_field(2, 1).unwrap();
        for d in 1..=3u32 {
            let m = monomial_count(d) as u32;
            let table = crate::plane::PointTable::new(&f, d);
            let count = (0..1u64 << m)
                .filter(|&i| {
                    let form = TernaryForm::decode(&f, d, i);
                    table.first_singular(form.coeffs()).is_some()
                })
                .count();
            let dens: Rational = singular_at_rational_density(&f, d, 1 << 20).unwrap();
            assert_eq!(dens, Rational::ratio(count as i64, 1i64 << m));
        }
    }

    #[test]
    fn all_forms_distribution() {
        let f = make_field(2, 1).unwrap();
        for d in 1..=3u32 {
            let m = monomial_count(d) as u32;
            let table = crate::plane::PointTable::new(&f, d);
            let mut direct = vec![0u64; 8];
            for i in 0..1u64 << m {
                let form = TernaryForm::decode(&f, d, i);
                direct[table.count(form.coeffs()) as usize] += 1;
            }
            let exact = all_forms_point_counts(&f, d, 1 << 20).unwrap();
            let direct: Vec<BigUint> = direct.into_iter().map(BigUint::from).collect();
            assert_eq!(exact, direct);
        }
        // surjective case: binomial
        let exact = all_forms_point_counts(&f, 7, 1 << 20).unwrap();
        let fiber = BigUint::from(2u32).pow(36 - 7);
        let binom = [1u32, 7, 21, 35, 35, 21, 7, 1];
        for t in 0..8 {
            assert_eq!(exact[t], BigUint::from(binom[t]) * &fiber);
        }
    }

    #[test]
    fn surjectivity_threshold() {
        for q in [2u64, 3] {
            let f = make_field(q, 1).unwrap();
            let pts = enumerate_p2(&f);
            for k in 1..=4usize {
                for order in [Order::Value, Order::Jet] {
                    let z = ZConfig::new(pts.iter().take(k).map(|&p| (p, order)).collect()).unwrap();
                    let d = (z.dim() as u32).saturating_sub(1).max(1);
                    assert_eq!(jet_matrix(&f, d, &z).rank(), z.dim());
                }
            }
        }
    }
}
