//! Point-count distributions: empirical histograms over `S_d` or the smooth
//! forms, binomial models, moments and their comparison.

use std::ops::Range;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldDesc, FieldElem, FieldSpec};
use crate::plane::PointTable;
use crate::poly::monomial_count;
use crate::scalar::{format_fixed, Scalar};
use crate::smooth::SmoothnessChecker;
use crate::Rational;

/// Default cap on the number of candidate forms an exhaustive run may visit.
pub const DEFAULT_BUDGET: u64 = 1 << 30;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.5758293035489;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("{needed} candidate forms exceed the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("invalid shard {index} of {of}")]
    BadShard { index: u32, of: u32 },
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("histogram has no forms")]
    EmptyHistogram,
    #[error("histograms differ in {0} and cannot be merged")]
    Mismatch(&'static str),
    #[error("support sizes differ: histogram {histogram}, model {model}")]
    Support { histogram: usize, model: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    All,
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Exhaustive,
    Sample { n: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shard {
    pub index: u32,
    pub of: u32,
}

impl Shard {
    pub fn new(index: u32, of: u32) -> Result<Self, StatsError> {
        if of == 0 || index >= of {
            return Err(StatsError::BadShard { index, of });
        }
        Ok(Shard { index, of })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Provenance {
    /// Every nonzero form visited; the zero form is never counted.
    Exhaustive { zero_form_excluded: bool },
    Sampled { n: u64, seed: u64 },
}

/// Counts of forms by number of rational points `t = 0..=q^2+q+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub field: FieldSpec,
    pub d: u32,
    pub mode: Mode,
    pub counts: Vec<u64>,
    pub total: u64,
    pub provenance: Provenance,
}

impl Histogram {
    pub fn empty(field: FieldSpec, d: u32, mode: Mode, provenance: Provenance) -> Self {
        let q = field.p.pow(field.k);
        let n = (q * q + q + 1) as usize;
        Histogram {
            field,
            d,
            mode,
            counts: vec![0; n + 1],
            total: 0,
            provenance,
        }
    }

    pub fn q(&self) -> u64 {
        self.field.p.pow(self.field.k)
    }

    pub fn record(&mut self, t: u32) {
        self.counts[t as usize] += 1;
        self.total += 1;
    }

    /// Adds another partial histogram of the same experiment.
    pub fn merge(&mut self, other: &Histogram) -> Result<(), StatsError> {
        if self.field != other.field {
            return Err(StatsError::Mismatch("field"));
        }
        if self.d != other.d {
            return Err(StatsError::Mismatch("degree"));
        }
        if self.mode != other.mode {
            return Err(StatsError::Mismatch("mode"));
        }
        if self.provenance != other.provenance {
            return Err(StatsError::Mismatch("provenance"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        Ok(())
    }

    /// The exhaustive all-forms histogram with the zero form put back; it
    /// vanishes at every rational point.
    pub fn with_zero_form(&self) -> Histogram {
        let mut h = self.clone();
        if let Provenance::Exhaustive {
            zero_form_excluded: true,
        } = h.provenance
        {
            if let Some(c) = h.counts.last_mut() {
                *c += 1;
            }
            h.total += 1;
            h.provenance = Provenance::Exhaustive {
                zero_form_excluded: false,
            };
        }
        h
    }

    /// Relative frequencies.
    pub fn pmf<S: Scalar>(&self) -> Vec<S> {
        let total = BigInt::from(self.total);
        self.counts
            .iter()
            .map(|&c| S::from_ratio(&BigInt::from(c), &total))
            .collect()
    }
}

/// Candidate index of a form: its coefficients as base-`q` digits, the first
/// stored coefficient least significant. Index 0 is the zero form.
pub fn candidate_space(q: u64, d: u32) -> u128 {
    (q as u128)
        .checked_pow(monomial_count(d) as u32)
        .unwrap_or(u128::MAX)
}

/// Splits `0..len` into `n` contiguous, disjoint, covering ranges whose
/// lengths differ by at most one.
pub fn split_range(len: u64, n: u32) -> Vec<Range<u64>> {
    let n = u64::from(n.max(1));
    let (base, extra) = (len / n, len % n);
    let mut start = 0;
    (0..n)
        .map(|i| {
            let size = base + u64::from(i < extra);
            let r = start..start + size;
            start += size;
            r
        })
        .collect()
}

/// Ranges of candidate indices for each of `n_shards` shards of the full
/// coefficient space of degree `d` over `F_q`. Workers skip index 0.
pub fn shard_plan(q: u64, d: u32, n_shards: u32) -> Result<Vec<Range<u64>>, StatsError> {
    if n_shards == 0 {
        return Err(StatsError::BadShard { index: 0, of: 0 });
    }
    let space = candidate_space(q, d);
    let len = u64::try_from(space).map_err(|_| StatsError::BudgetExceeded {
        needed: space,
        budget: u64::MAX,
    })?;
    Ok(split_range(len, n_shards))
}

/// Writes the coefficients of candidate `index` into `out`.
pub fn decode_candidate(q: u32, mut index: u64, out: &mut [FieldElem]) {
    for c in out.iter_mut() {
        *c = FieldElem((index % u64::from(q)) as u32);
        index /= u64::from(q);
    }
}

/// Coefficients of sample number `index`: i.i.d. uniform, redrawn while all
/// zero. The stream depends only on `(seed, index)`, so any split of the
/// sample range into shards draws the same forms.
pub fn sample_candidate(q: u32, seed: u64, index: u64, out: &mut [FieldElem]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        for c in out.iter_mut() {
            *c = FieldElem(rng.gen_range(0..q));
        }
        if out.iter().any(|c| !c.is_zero()) {
            return;
        }
    }
}

/// Per-worker state for filling a histogram.
pub struct Tally {
    field: FieldDesc,
    mode: Mode,
    table: PointTable,
    checker: Option<SmoothnessChecker>,
    coeffs: Vec<FieldElem>,
    pub histogram: Histogram,
}

impl Tally {
    pub fn new(field: &FieldDesc, d: u32, mode: Mode, provenance: Provenance) -> Self {
        Tally {
            field: field.clone(),
            mode,
            table: PointTable::new(field, d),
            checker: (mode == Mode::Smooth).then(|| SmoothnessChecker::new(field, d)),
            coeffs: vec![FieldElem::ZERO; monomial_count(d)],
            histogram: Histogram::empty(field.spec(), d, mode, provenance),
        }
    }

    pub fn resume(field: &FieldDesc, histogram: Histogram) -> Self {
        let mut t = Tally::new(field, histogram.d, histogram.mode, histogram.provenance);
        t.histogram = histogram;
        t
    }

    fn visit_current(&mut self) {
        if let Some(checker) = self.checker.as_mut() {
            if !checker.check_coeffs(&self.coeffs).smooth {
                return;
            }
        }
        let t = self.table.count(&self.coeffs);
        self.histogram.record(t);
    }

    /// Visits the candidates with indices in `range`, skipping the zero form.
    pub fn exhaustive(&mut self, range: Range<u64>) {
        let q = self.field.q();
        if range.is_empty() {
            return;
        }
        decode_candidate(q, range.start, &mut self.coeffs);
        for index in range {
            if index != 0 {
                self.visit_current();
            }
            // odometer step
            for c in self.coeffs.iter_mut() {
                c.0 += 1;
                if c.0 < q {
                    break;
                }
                c.0 = 0;
            }
        }
    }

    /// Draws and visits samples with indices in `range`.
    pub fn sample(&mut self, seed: u64, range: Range<u64>) {
        let q = self.field.q();
        for index in range {
            sample_candidate(q, seed, index, &mut self.coeffs);
            self.visit_current();
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }
}

fn provenance_for(strategy: Strategy) -> Provenance {
    match strategy {
        Strategy::Exhaustive => Provenance::Exhaustive {
            zero_form_excluded: true,
        },
        Strategy::Sample { n, seed } => Provenance::Sampled { n, seed },
    }
}

/// The index range a strategy covers in total: candidate indices for
/// exhaustive runs, sample numbers for sampled ones.
pub fn strategy_range(q: u64, d: u32, strategy: Strategy, budget: u64) -> Result<u64, StatsError> {
    match strategy {
        Strategy::Exhaustive => {
            let space = candidate_space(q, d);
            if space > u128::from(budget) {
                return Err(StatsError::BudgetExceeded { needed: space, budget });
            }
            Ok(space as u64)
        }
        Strategy::Sample { n, .. } => {
            if n == 0 {
                return Err(StatsError::EmptySample);
            }
            Ok(n)
        }
    }
}

/// Histogram of one shard (or of everything when `shard` is `None`).
pub fn empirical_histogram(
    field: &FieldDesc,
    d: u32,
    mode: Mode,
    strategy: Strategy,
    shard: Option<Shard>,
    budget: u64,
) -> Result<Histogram, StatsError> {
    let len = strategy_range(u64::from(field.q()), d, strategy, budget)?;
    let shard = match shard {
        Some(s) => Shard::new(s.index, s.of)?,
        None => Shard { index: 0, of: 1 },
    };
    let range = split_range(len, shard.of)[shard.index as usize].clone();
    let mut tally = Tally::new(field, d, mode, provenance_for(strategy));
    match strategy {
        Strategy::Exhaustive => tally.exhaustive(range),
        Strategy::Sample { seed, .. } => tally.sample(seed, range),
    }
    Ok(tally.histogram)
}

/// Runs every shard on its own thread and merges in shard order.
pub fn sharded_histogram(
    field: &FieldDesc,
    d: u32,
    mode: Mode,
    strategy: Strategy,
    shards: u32,
    budget: u64,
) -> Result<Histogram, StatsError> {
    let shards = shards.max(1);
    let parts: Vec<Result<Histogram, StatsError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..shards)
            .map(|i| {
                s.spawn(move || {
                    empirical_histogram(field, d, mode, strategy, Some(Shard { index: i, of: shards }), budget)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("shard worker panicked"))
            .collect()
    });
    let mut acc = Histogram::empty(field.spec(), d, mode, provenance_for(strategy));
    for part in parts {
        acc.merge(&part?)?;
    }
    Ok(acc)
}

/// A distribution on `t = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDist<S> {
    pub n: u32,
    pub p: S,
    pub pmf: Vec<S>,
}

fn binomial_coeff(n: u32, k: u32) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

impl<S: Scalar> ModelDist<S> {
    /// `Binomial(n, p)`: the sum of `n` independent Bernoulli(p) variables.
    pub fn binomial(n: u32, p: S) -> Self {
        let one_minus = S::one() - p.clone();
        let pmf = (0..=n)
            .map(|t| {
                let c = S::from_biguint(&binomial_coeff(n, t));
                c * num_traits::pow(p.clone(), t as usize) * num_traits::pow(one_minus.clone(), (n - t) as usize)
            })
            .collect();
        ModelDist { n, p, pmf }
    }

    pub fn mean(&self) -> S {
        raw_moment(&self.pmf, 1)
    }
}

fn n_points(q: u64) -> u32 {
    (q * q + q + 1) as u32
}

/// Each rational point lies on a random smooth curve with probability
/// `(q^2-1)/(q^3-1) = (q+1)/(q^2+q+1)`, independently.
pub fn smooth_model<S: Scalar>(q: u64) -> ModelDist<S> {
    let n = n_points(q);
    ModelDist::binomial(n, S::from_ratio(&BigInt::from(q + 1), &BigInt::from(n)))
}

/// Each rational point lies on a random curve with probability `1/q`.
pub fn all_curves_model<S: Scalar>(q: u64) -> ModelDist<S> {
    ModelDist::binomial(n_points(q), S::from_ratio(&BigInt::one(), &BigInt::from(q)))
}

/// `E[t^k]`.
pub fn raw_moment<S: Scalar>(pmf: &[S], k: u32) -> S {
    pmf.iter().enumerate().fold(S::zero(), |acc, (t, w)| {
        acc + w.clone() * num_traits::pow(S::from_count(t as u64), k as usize)
    })
}

/// `E[(t - c)^k]`, expanded binomially in the raw moments.
pub fn central_moment<S: Scalar>(pmf: &[S], center: &S, k: u32) -> S {
    (0..=k).fold(S::zero(), |acc, j| {
        let c = S::from_biguint(&binomial_coeff(k, j));
        acc + c * raw_moment(pmf, j) * num_traits::pow(-center.clone(), (k - j) as usize)
    })
}

/// `coefficient · base^{-k/2}`; exact even when `k` is odd.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMoment<S> {
    pub k: u32,
    pub base: u64,
    pub coefficient: S,
}

impl<S: Scalar> NormalizedMoment<S> {
    /// The value itself when `k` is even.
    pub fn exact(&self) -> Option<S> {
        self.k.is_multiple_of(2).then(|| self.coefficient.clone() / num_traits::pow(S::from_count(self.base), (self.k / 2) as usize))
    }

    /// The square of the value, always rational.
    pub fn squared(&self) -> S {
        self.coefficient.clone() * self.coefficient.clone() / num_traits::pow(S::from_count(self.base), self.k as usize)
    }

    pub fn to_f64(&self) -> f64 {
        self.coefficient.to_f64() / (self.base as f64).powf(f64::from(self.k) / 2.0)
    }
}

/// `N_k = E[t^k] / (q+1)^{k/2}`.
pub fn n_moment<S: Scalar>(pmf: &[S], q: u64, k: u32) -> NormalizedMoment<S> {
    NormalizedMoment {
        k,
        base: q + 1,
        coefficient: raw_moment(pmf, k),
    }
}

/// `M_k = E[((t - (q+1)) / sqrt(q+1))^k]`.
pub fn m_moment<S: Scalar>(pmf: &[S], q: u64, k: u32) -> NormalizedMoment<S> {
    NormalizedMoment {
        k,
        base: q + 1,
        coefficient: central_moment(pmf, &S::from_count(q + 1), k),
    }
}

/// Stirling numbers of the second kind `S(k, l)` for `l = 0..=k`.
pub fn stirling2_row(k: u32) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for i in 1..=k as usize {
        let mut next = vec![BigUint::zero(); i + 1];
        for j in 1..=i {
            let carry = if j < i { &row[j] * j } else { BigUint::zero() };
            next[j] = carry + &row[j - 1];
        }
        row = next;
    }
    row
}

/// `E[(X_1 + ... + X_n)^k]` for i.i.d. Bernoulli(p), as
/// `sum_l S(k, l) (n)_l p^l`, where `(n)_l` is the falling factorial.
pub fn stirling_moment_identity<S: Scalar>(n: u32, p: &S, k: u32) -> S {
    let row = stirling2_row(k);
    let mut acc = S::from_biguint(&row[0]);
    let mut falling = BigUint::one();
    for l in 1..=k.min(n) {
        falling *= n - l + 1;
        let term = &row[l as usize] * &falling;
        acc = acc + S::from_biguint(&term) * num_traits::pow(p.clone(), l as usize);
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub t: u32,
    pub count: u64,
    pub empirical_freq: Rational,
    pub model_pmf: Rational,
    pub diff: Rational,
    /// Normal-approximation 99% half-width of the frequency, sampled runs only.
    pub ci_halfwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub tv_distance: Rational,
    pub max_abs_diff: Rational,
    pub rows: Vec<CompareRow>,
}

impl Comparison {
    pub fn tv_text(&self) -> String {
        format_fixed(&self.tv_distance, 12)
    }

    pub fn max_abs_diff_text(&self) -> String {
        format_fixed(&self.max_abs_diff, 12)
    }
}

/// Total variation and per-`t` differences against an exact model, with
/// 99% half-widths for sampled histograms.
pub fn compare(h: &Histogram, m: &ModelDist<Rational>) -> Result<Comparison, StatsError> {
    compare_with_quantile(h, m, Z_99)
}

pub fn compare_with_quantile(h: &Histogram, m: &ModelDist<Rational>, z: f64) -> Result<Comparison, StatsError> {
    if h.total == 0 {
        return Err(StatsError::EmptyHistogram);
    }
    if h.counts.len() != m.pmf.len() {
        return Err(StatsError::Support {
            histogram: h.counts.len(),
            model: m.pmf.len(),
        });
    }
    let freqs: Vec<Rational> = h.pmf();
    let sampled = matches!(h.provenance, Provenance::Sampled { .. });
    let mut tv = Rational::zero();
    let mut max = Rational::zero();
    let rows = freqs
        .into_iter()
        .zip(&m.pmf)
        .enumerate()
        .map(|(t, (f, p))| {
            let diff = &f - p;
            tv += diff.abs();
            if diff.abs() > max {
                max = diff.abs();
            }
            let ci_halfwidth = sampled.then(|| {
                let phat = Scalar::to_f64(&f);
                z * (phat * (1.0 - phat) / h.total as f64).sqrt()
            });
            CompareRow {
                t: t as u32,
                count: h.counts[t],
                empirical_freq: f,
                model_pmf: p.clone(),
                diff,
                ci_halfwidth,
            }
        })
        .collect();
    Ok(Comparison {
        tv_distance: tv / Rational::from_integer(2.into()),
        max_abs_diff: max,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn model_examples() {
        let m: ModelDist<Rational> = smooth_model(2);
        assert_eq!((m.n, m.p.clone()), (7, rat(3, 7)));
        assert_eq!(m.mean(), rat(3, 1));
        assert_eq!(m.pmf[0], num_traits::pow(rat(4, 7), 7));
        assert_eq!(m.pmf.iter().cloned().sum::<Rational>(), Rational::one());
        let a: ModelDist<Rational> = all_curves_model(2);
        assert_eq!(a.p, rat(1, 2));
        for t in 0..8 {
            assert_eq!(a.pmf[t], a.pmf[7 - t]);
        }
        let f: ModelDist<f64> = smooth_model(3);
        assert!((f.mean() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn moment_examples() {
        for q in [2u64, 3, 4, 5] {
            let m: ModelDist<Rational> = smooth_model(q);
            let n = (q * q + q + 1) as i64;
            assert_eq!(m_moment(&m.pmf, q, 1).coefficient, Rational::zero());
            let m2 = m_moment(&m.pmf, q, 2).exact().unwrap();
            assert_eq!(m2, rat((q * q) as i64, n));
            // odd third moment n p (1-p)(1-2p) / (q+1)^{3/2}
            let p = m.p.clone();
            let expect = Rational::from_integer(n.into()) * &p * (Rational::one() - &p) * (Rational::one() - rat(2, 1) * &p);
            assert_eq!(m_moment(&m.pmf, q, 3).coefficient, expect);
        }
        let m: ModelDist<Rational> = smooth_model(2);
        assert_eq!(raw_moment(&m.pmf, 2), rat(75, 7));
        assert_eq!(stirling_moment_identity(7, &rat(3, 7), 2), rat(75, 7));
        assert_eq!(rat(3, 1) + rat(42 * 9, 49), rat(75, 7));
        assert_eq!(stirling_moment_identity(7, &rat(3, 7), 1), rat(3, 1));
    }

    #[test]
    fn central_moment_matches_direct_sum() {
        let m: ModelDist<Rational> = smooth_model(3);
        let c = rat(4, 1);
        for k in 0..7 {
            let direct: Rational = m
                .pmf
                .iter()
                .enumerate()
                .map(|(t, w)| w * num_traits::pow(Rational::from_integer((t as i64).into()) - &c, k))
                .sum();
            assert_eq!(central_moment(&m.pmf, &c, k as u32), direct);
        }
    }

    #[test]
    fn stirling_rows() {
        let row: Vec<u32> = stirling2_row(4).iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(row, [0, 1, 7, 6, 1]);
        assert_eq!(stirling2_row(0), vec![BigUint::one()]);
    }

    #[test]
    fn plan_partitions() {
        assert_eq!(shard_plan(2, 3, 1).unwrap(), vec![0..1024]);
        let plan = shard_plan(2, 3, 4).unwrap();
        assert_eq!(plan.len(), 4);
        assert_eq!(plan.iter().map(|r| r.end - r.start).sum::<u64>(), 1024);
        for w in plan.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        assert!(shard_plan(2, 3, 0).is_err());
        assert_eq!(split_range(3, 5).iter().filter(|r| r.is_empty()).count(), 2);
    }

    #[test]
    fn lines_histogram() {
        let f = make_field(2, 1).unwrap();
        let h = empirical_histogram(&f, 1, Mode::All, Strategy::Exhaustive, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(h.total, 7);
        assert_eq!(h.counts[3], 7);
        let h = empirical_histogram(&f, 1, Mode::Smooth, Strategy::Exhaustive, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(h.total, 7);
    }

    #[test]
    fn budget_and_shard_errors() {
        let f = make_field(2, 1).unwrap();
        assert!(matches!(
            empirical_histogram(&f, 3, Mode::All, Strategy::Exhaustive, None, 1000),
            Err(StatsError::BudgetExceeded { needed: 1024, budget: 1000 })
        ));
        assert!(empirical_histogram(&f, 3, Mode::All, Strategy::Exhaustive, Some(Shard { index: 4, of: 4 }), DEFAULT_BUDGET).is_err());
        assert!(empirical_histogram(&f, 3, Mode::All, Strategy::Sample { n: 0, seed: 1 }, None, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn compare_self_is_zero() {
        let m: ModelDist<Rational> = all_curves_model(2);
        let spec = FieldSpec { p: 2, k: 1 };
        let mut h = Histogram::empty(spec, 7, Mode::All, Provenance::Exhaustive { zero_form_excluded: false });
        for (t, c) in [1u64, 7, 21, 35, 35, 21, 7, 1].into_iter().enumerate() {
            h.counts[t] = c;
            h.total += c;
        }
        let cmp = compare(&h, &m).unwrap();
        assert_eq!(cmp.tv_distance, Rational::zero());
        assert_eq!(cmp.tv_text(), "0.000000000000");
        assert!(cmp.rows.iter().all(|r| r.ci_halfwidth.is_none()));
    }
}
