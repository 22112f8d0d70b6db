//! Deciding whether `F = 0` is a smooth curve over the algebraic closure.
//!
//! The plane is split into the affine chart `Z = 1`, the points `[x:1:0]`
//! and the point `[1:0:0]`. Rational singular points are found directly
//! from jets. The affine chart is handled by eliminating `y` from
//! `f, f_x, f_y` with resultants; any common root of the eliminants is then
//! examined exactly over the extension it lives in. Systems where an
//! eliminant vanishes identically go to a Gröbner basis computation.

use std::fmt;

use crate::gf::{embed, extension, Embedding, FieldDesc, FieldElem, DEFAULT_FIELD_LIMIT};
use crate::plane::{enumerate_p2, jet_at, PointTable, ProjPoint};
use crate::poly::{
    ideal_trivial, monomial_count, monomials, PolyError, TernaryForm, UniPoly, UniRing,
};

/// Largest extension scanned for roots of an eliminant before deferring to Gröbner.
pub const ROOT_SCAN_LIMIT: u64 = 1 << 12;

/// Largest extension whose plane points are tabulated by the oracle.
const TABLE_POINT_LIMIT: u64 = 1 << 20;

/// A singular point over `F_{q^e}`, with `e = ext_degree`. Coordinates live
/// in `extension(field, e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Witness {
    pub chart: usize,
    pub ext_degree: u32,
    pub point: ProjPoint,
}

impl Witness {
    /// Text form: the point with its field, e.g. `[1:t:0] over 2^2`.
    pub fn describe(&self, field: &FieldDesc) -> String {
        match extension(field, self.ext_degree, DEFAULT_FIELD_LIMIT) {
            Ok(ext) => format!("{} over {}", self.point.display(&ext), ext.spec()),
            Err(_) => format!("point over degree-{} extension", self.ext_degree),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothnessVerdict {
    pub smooth: bool,
    pub witness: Option<Witness>,
}

impl SmoothnessVerdict {
    pub const SMOOTH: SmoothnessVerdict = SmoothnessVerdict {
        smooth: true,
        witness: None,
    };

    fn singular(witness: Option<Witness>) -> Self {
        SmoothnessVerdict {
            smooth: false,
            witness,
        }
    }
}

impl fmt::Display for SmoothnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.smooth { "smooth" } else { "singular" })
    }
}

fn check_form(form: &TernaryForm) -> Result<(), PolyError> {
    if form.is_zero() {
        return Err(PolyError::ZeroForm);
    }
    if form.degree() == 0 {
        return Err(PolyError::ConstantForm(0));
    }
    Ok(())
}

/// True iff `F(P) = 0` and both chart derivatives vanish at a rational `P`.
pub fn is_singular_at(form: &TernaryForm, point: &ProjPoint) -> Result<bool, PolyError> {
    if form.is_zero() {
        return Err(PolyError::ZeroForm);
    }
    Ok(jet_at(form, point).is_zero())
}

/// As [`is_singular_at`] for a point with coordinates in `extension(field, e)`.
pub fn is_singular_at_ext(form: &TernaryForm, e: u32, point: &ProjPoint) -> Result<bool, PolyError> {
    if form.is_zero() {
        return Err(PolyError::ZeroForm);
    }
    let ext = extension(form.field(), e, DEFAULT_FIELD_LIMIT)?;
    if let Some(&c) = point.coords().iter().find(|c| !ext.contains(**c)) {
        return Err(PolyError::Field(crate::gf::FieldError::OutOfRange {
            value: u64::from(c.index()),
            q: ext.q(),
        }));
    }
    let emb = embed(form.field(), &ext)?;
    Ok(jet_at(&form.lift(&emb)?, point).is_zero())
}

/// Decides smoothness of a single form.
pub fn is_smooth(form: &TernaryForm) -> Result<SmoothnessVerdict, PolyError> {
    check_form(form)?;
    SmoothnessChecker::new(form.field(), form.degree()).check(form)
}

/// Smoothness by a Gröbner basis computation in each of the three charts;
/// slow, and independent of the elimination path.
pub fn is_smooth_groebner(form: &TernaryForm) -> Result<bool, PolyError> {
    check_form(form)?;
    for chart in 0..3 {
        let f = form.dehomogenize(chart)?;
        if !ideal_trivial(&[f.clone(), f.partial(0), f.partial(1)])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// How often each decision path was taken.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckerStats {
    pub forms: u64,
    pub rational_witness: u64,
    pub infinity: u64,
    pub root_analysis: u64,
    pub groebner: u64,
}

struct EvalSetup {
    emb: Embedding,
    // x_i^a for each evaluation point x_i, a = 0..=d
    powers: Vec<Vec<FieldElem>>,
    // inverse Vandermonde matrix, row j gives the coefficient of x^j
    inv_vandermonde: Vec<Vec<FieldElem>>,
}

/// Reusable smoothness decision for forms of one degree over one field.
/// Holds tables and extension fields; each worker owns its own.
pub struct SmoothnessChecker {
    field: FieldDesc,
    degree: u32,
    table: PointTable,
    exps: Vec<[u32; 3]>,
    eval: Option<EvalSetup>,
    root_fields: Vec<Option<(FieldDesc, Embedding)>>,
    stats: CheckerStats,
}

enum ChartOutcome {
    Clean,
    Singular(Option<Witness>),
    Undecided,
}

/// Coefficients of a polynomial in `y` over `F_q[x]`: `cols[b]` is the
/// coefficient of `y^b`, lowest `x` power first.
type Columns = Vec<Vec<FieldElem>>;

fn trim_cols(mut cols: Columns) -> Columns {
    for c in cols.iter_mut() {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
    }
    while cols.last().is_some_and(|c| c.is_empty()) {
        cols.pop();
    }
    cols
}

fn is_nonzero_constant(cols: &Columns) -> bool {
    cols.len() == 1 && cols[0].len() == 1
}

impl SmoothnessChecker {
    pub fn new(field: &FieldDesc, degree: u32) -> Self {
        SmoothnessChecker {
            field: field.clone(),
            degree,
            table: PointTable::new(field, degree),
            exps: monomials(degree),
            eval: None,
            root_fields: Vec::new(),
            stats: CheckerStats::default(),
        }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn stats(&self) -> CheckerStats {
        self.stats
    }

    pub fn check(&mut self, form: &TernaryForm) -> Result<SmoothnessVerdict, PolyError> {
        check_form(form)?;
        if form.field() != &self.field || form.degree() != self.degree {
            return Err(PolyError::CoefficientCount {
                degree: self.degree,
                expected: monomial_count(self.degree),
                got: form.coeffs().len(),
            });
        }
        Ok(self.check_coeffs(form.coeffs()))
    }

    /// Verdict for the nonzero form with these coefficients (storage order).
    pub fn check_coeffs(&mut self, coeffs: &[FieldElem]) -> SmoothnessVerdict {
        self.stats.forms += 1;
        if let Some(i) = self.table.first_singular(coeffs) {
            self.stats.rational_witness += 1;
            let point = self.table.points()[i];
            return SmoothnessVerdict::singular(Some(Witness {
                chart: point.chart(),
                ext_degree: 1,
                point,
            }));
        }
        if let Some(w) = self.infinity_line(coeffs) {
            self.stats.infinity += 1;
            return SmoothnessVerdict::singular(w);
        }
        // [1:0:0] is rational and was covered above
        match self.affine_chart(coeffs) {
            ChartOutcome::Clean => SmoothnessVerdict::SMOOTH,
            ChartOutcome::Singular(w) => SmoothnessVerdict::singular(w),
            ChartOutcome::Undecided => {
                self.stats.groebner += 1;
                let form = TernaryForm::new(&self.field, self.degree, coeffs.to_vec())
                    .expect("coefficient count matches the degree");
                let f = form.dehomogenize(2).expect("chart 2 exists");
                let gens = [f.clone(), f.partial(0), f.partial(1)];
                match ideal_trivial(&gens) {
                    Ok(true) => SmoothnessVerdict::SMOOTH,
                    _ => SmoothnessVerdict::singular(None),
                }
            }
        }
    }

    fn root_field(&mut self, j: u32) -> Option<(FieldDesc, Embedding)> {
        let idx = j as usize;
        if self.root_fields.len() <= idx {
            self.root_fields.resize(idx + 1, None);
        }
        if self.root_fields[idx].is_none() {
            let size = u64::from(self.field.q()).checked_pow(j)?;
            if size > ROOT_SCAN_LIMIT {
                return None;
            }
            let ext = extension(&self.field, j, DEFAULT_FIELD_LIMIT).ok()?;
            let emb = embed(&self.field, &ext).ok()?;
            self.root_fields[idx] = Some((ext, emb));
        }
        self.root_fields[idx].clone()
    }

    /// Some(witness) if a point `[x:1:0]` is singular.
    fn infinity_line(&mut self, coeffs: &[FieldElem]) -> Option<Option<Witness>> {
        let f = &self.field;
        let d = self.degree as usize;
        let mut a = vec![FieldElem::ZERO; d + 1];
        let mut bx = vec![FieldElem::ZERO; d.max(1)];
        let mut c = vec![FieldElem::ZERO; d];
        for (e, &coef) in self.exps.iter().zip(coeffs) {
            if coef.is_zero() {
                continue;
            }
            let ex = e[0] as usize;
            match e[2] {
                0 => {
                    a[ex] = coef;
                    if ex > 0 {
                        bx[ex - 1] = f.scale_int(coef, ex as u64);
                    }
                }
                1 => c[ex] = coef,
                _ => {}
            }
        }
        let ring = UniRing::new(f);
        let polys = [UniPoly::new(a), UniPoly::new(bx), UniPoly::new(c)];
        let g = ring.gcd_all(&polys);
        if g.degree() == Some(0) {
            return None;
        }
        // best effort: a root of the gcd in a small extension
        let top = g.degree().unwrap_or(1) as u32;
        for j in 1..=top {
            let Some((ext, emb)) = self.root_field(j) else {
                break;
            };
            let lifted = UniPoly::new(g.coeffs().iter().map(|&x| emb.apply(x)).collect());
            let ering = UniRing::new(&ext);
            let root = ext.elements().find(|&x| ering.eval(&lifted, x).is_zero());
            if let Some(x0) = root {
                let point = ProjPoint::new(&ext, [x0, FieldElem::ONE, FieldElem::ZERO])
                    .expect("nonzero coordinates");
                return Some(Some(Witness {
                    chart: 1,
                    ext_degree: j,
                    point,
                }));
            }
        }
        Some(None)
    }

    fn eval_setup(&mut self) -> &EvalSetup {
        if self.eval.is_none() {
            let d = self.degree as u64;
            let needed = (d * d.saturating_sub(1) + 1).max(1);
            let q = u64::from(self.field.q());
            let mut k = 1u32;
            while q.pow(k) < needed {
                k += 1;
            }
            let ext = extension(&self.field, k, DEFAULT_FIELD_LIMIT)
                .expect("evaluation field is small");
            let emb = embed(&self.field, &ext).expect("compatible fields");
            let xs: Vec<FieldElem> = ext.elements().take(needed as usize).collect();
            let powers = xs
                .iter()
                .map(|&x| (0..=d).map(|a| ext.pow(x, a)).collect())
                .collect();
            let inv_vandermonde = inverse_vandermonde(&ext, &xs);
            self.eval = Some(EvalSetup {
                emb,
                powers,
                inv_vandermonde,
            });
        }
        self.eval.as_ref().expect("initialized above")
    }

    fn affine_chart(&mut self, coeffs: &[FieldElem]) -> ChartOutcome {
        let f = self.field.clone();
        let d = self.degree as usize;
        let mut fc: Columns = vec![vec![FieldElem::ZERO; d + 1]; d + 1];
        for (e, &coef) in self.exps.iter().zip(coeffs) {
            fc[e[1] as usize][e[0] as usize] = coef;
        }
        let fx: Columns = fc
            .iter()
            .map(|col| {
                col.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(a, &c)| f.scale_int(c, a as u64))
                    .collect()
            })
            .collect();
        let fy: Columns = (1..fc.len())
            .map(|b| fc[b].iter().map(|&c| f.scale_int(c, b as u64)).collect())
            .collect();
        let (fc, fx, fy) = (trim_cols(fc), trim_cols(fx), trim_cols(fy));
        if fc.is_empty() {
            return ChartOutcome::Undecided;
        }
        if is_nonzero_constant(&fx) || is_nonzero_constant(&fy) || is_nonzero_constant(&fc) {
            return ChartOutcome::Clean;
        }
        if fx.is_empty() || fy.is_empty() || (fc.len() == 1 && (fx.len() == 1 || fy.len() == 1)) {
            return ChartOutcome::Undecided;
        }
        let r1 = self.eliminate(&fc, &fx);
        let r2 = self.eliminate(&fc, &fy);
        if r1.is_zero() || r2.is_zero() {
            return ChartOutcome::Undecided;
        }
        let ring = UniRing::new(&f);
        let g = ring.gcd(&r1, &r2);
        if g.degree() == Some(0) {
            return ChartOutcome::Clean;
        }
        self.stats.root_analysis += 1;
        self.analyze_roots(&g, &fc, &fx, &fy)
    }

    /// `Res_y(a, b)` as a polynomial in `x`, by evaluation and interpolation.
    fn eliminate(&mut self, a: &Columns, b: &Columns) -> UniPoly {
        let base = self.field.clone();
        let setup = self.eval_setup();
        let ext = setup.emb.ext();
        let lift = |cols: &Columns| -> Columns {
            cols.iter()
                .map(|c| c.iter().map(|&x| setup.emb.apply(x)).collect())
                .collect()
        };
        let (la, lb) = (lift(a), lift(b));
        let n = setup.powers.len();
        let mut values = Vec::with_capacity(n);
        let mut sa = vec![FieldElem::ZERO; la.len()];
        let mut sb = vec![FieldElem::ZERO; lb.len()];
        let mut scratch = Vec::new();
        for pw in &setup.powers {
            for (dst, col) in sa.iter_mut().zip(&la) {
                *dst = specialize(ext, col, pw);
            }
            for (dst, col) in sb.iter_mut().zip(&lb) {
                *dst = specialize(ext, col, pw);
            }
            values.push(sylvester_det(ext, &sa, &sb, &mut scratch));
        }
        let coeffs: Vec<FieldElem> = setup
            .inv_vandermonde
            .iter()
            .map(|row| {
                let c = row
                    .iter()
                    .zip(&values)
                    .fold(FieldElem::ZERO, |acc, (&r, &v)| ext.mul_add(acc, r, v));
                setup
                    .emb
                    .preimage(c)
                    .expect("resultant of polynomials over the base field lies in the base field")
            })
            .collect();
        debug_assert!(coeffs.iter().all(|c| base.contains(*c)));
        UniPoly::new(coeffs)
    }

    fn analyze_roots(&mut self, g: &UniPoly, fc: &Columns, fx: &Columns, fy: &Columns) -> ChartOutcome {
        let top = g.degree().unwrap_or(0) as u32;
        for j in 1..=top {
            let Some((ext, emb)) = self.root_field(j) else {
                return ChartOutcome::Undecided;
            };
            let ering = UniRing::new(&ext);
            let lg = UniPoly::new(g.coeffs().iter().map(|&x| emb.apply(x)).collect());
            let lift = |cols: &Columns| -> Columns {
                cols.iter()
                    .map(|c| c.iter().map(|&x| emb.apply(x)).collect())
                    .collect()
            };
            let (lf, lx, ly) = (lift(fc), lift(fx), lift(fy));
            for x0 in ext.elements() {
                if !ering.eval(&lg, x0).is_zero() {
                    continue;
                }
                let pw: Vec<FieldElem> = (0..=self.degree as u64).map(|a| ext.pow(x0, a)).collect();
                let spec = |cols: &Columns| {
                    UniPoly::new(cols.iter().map(|c| specialize(&ext, c, &pw)).collect())
                };
                let polys = [spec(&lf), spec(&lx), spec(&ly)];
                let h = ering.gcd_all(&polys);
                if h.degree() == Some(0) {
                    continue;
                }
                let witness = ext
                    .elements()
                    .find(|&y| polys.iter().all(|p| ering.eval(p, y).is_zero()))
                    .map(|y0| Witness {
                        chart: 2,
                        ext_degree: j,
                        point: ProjPoint::new(&ext, [x0, y0, FieldElem::ONE])
                            .expect("nonzero coordinates"),
                    });
                return ChartOutcome::Singular(witness);
            }
        }
        ChartOutcome::Clean
    }
}

fn specialize(field: &FieldDesc, col: &[FieldElem], powers: &[FieldElem]) -> FieldElem {
    col.iter()
        .zip(powers)
        .fold(FieldElem::ZERO, |acc, (&c, &p)| field.mul_add(acc, c, p))
}

/// Determinant of the Sylvester matrix of `a` and `b` (lowest degree first,
/// formal degrees `len - 1`), by Gaussian elimination.
fn sylvester_det(field: &FieldDesc, a: &[FieldElem], b: &[FieldElem], m: &mut Vec<FieldElem>) -> FieldElem {
    let da = a.len() - 1;
    let db = b.len() - 1;
    let n = da + db;
    if n == 0 {
        return FieldElem::ONE;
    }
    m.clear();
    m.resize(n * n, FieldElem::ZERO);
    for s in 0..db {
        for (i, &c) in a.iter().rev().enumerate() {
            m[s * n + s + i] = c;
        }
    }
    for s in 0..da {
        for (i, &c) in b.iter().rev().enumerate() {
            m[(db + s) * n + s + i] = c;
        }
    }
    let mut det = FieldElem::ONE;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| !m[r * n + k].is_zero()) else {
            return FieldElem::ZERO;
        };
        if piv != k {
            for c in k..n {
                m.swap(piv * n + c, k * n + c);
            }
            det = field.neg(det);
        }
        let pv = m[k * n + k];
        det = field.mul(det, pv);
        let inv = field.inv(pv).expect("pivot is nonzero");
        for r in k + 1..n {
            let factor = field.mul(m[r * n + k], inv);
            if factor.is_zero() {
                continue;
            }
            let nf = field.neg(factor);
            for c in k + 1..n {
                m[r * n + c] = field.mul_add(m[r * n + c], nf, m[k * n + c]);
            }
        }
    }
    det
}

/// Inverse of the Vandermonde matrix `V[i][j] = xs[i]^j`; entry `[j][i]` of
/// the result is the coefficient of `x^j` in the `i`-th Lagrange basis polynomial.
fn inverse_vandermonde(field: &FieldDesc, xs: &[FieldElem]) -> Vec<Vec<FieldElem>> {
    let n = xs.len();
    let mut out = vec![vec![FieldElem::ZERO; n]; n];
    for (i, &xi) in xs.iter().enumerate() {
        // numerator prod_{k != i} (x - x_k), denominator prod (x_i - x_k)
        let mut num = vec![FieldElem::ONE];
        let mut den = FieldElem::ONE;
        for (k, &xk) in xs.iter().enumerate() {
            if k == i {
                continue;
            }
            let mut next = vec![FieldElem::ZERO; num.len() + 1];
            for (t, &c) in num.iter().enumerate() {
                next[t + 1] = field.add(next[t + 1], c);
                next[t] = field.sub(next[t], field.mul(c, xk));
            }
            num = next;
            den = field.mul(den, field.sub(xi, xk));
        }
        let inv = field.inv(den).expect("evaluation points are distinct");
        for (j, &c) in num.iter().enumerate() {
            out[j][i] = field.mul(c, inv);
        }
    }
    out
}

struct ScanLevel {
    e: u32,
    field: FieldDesc,
    emb: Embedding,
    table: Option<PointTable>,
}

/// Exhaustive search for singular points over `F_{q^e}`, `e = 1..=max_e`.
/// Independent of [`SmoothnessChecker`]; meant for small degrees.
pub struct OracleScanner {
    base: FieldDesc,
    degree: u32,
    levels: Vec<ScanLevel>,
}

impl OracleScanner {
    pub fn new(field: &FieldDesc, degree: u32, max_e: u32) -> Result<Self, PolyError> {
        Self::with_limit(field, degree, max_e, DEFAULT_FIELD_LIMIT)
    }

    pub fn with_limit(field: &FieldDesc, degree: u32, max_e: u32, limit: u64) -> Result<Self, PolyError> {
        let mut levels = Vec::new();
        for e in 1..=max_e {
            let ext = extension(field, e, limit)?;
            let emb = embed(field, &ext)?;
            let q = u64::from(ext.q());
            let table = (q * q + q < TABLE_POINT_LIMIT).then(|| PointTable::new(&ext, degree));
            levels.push(ScanLevel {
                e,
                field: ext,
                emb,
                table,
            });
        }
        Ok(OracleScanner {
            base: field.clone(),
            degree,
            levels,
        })
    }

    fn lift(&self, level: &ScanLevel, coeffs: &[FieldElem]) -> Vec<FieldElem> {
        coeffs.iter().map(|&c| level.emb.apply(c)).collect()
    }

    fn scan_level<'a>(
        &'a self,
        level: &'a ScanLevel,
        coeffs: &[FieldElem],
    ) -> Box<dyn Iterator<Item = ProjPoint> + 'a> {
        let lifted = self.lift(level, coeffs);
        match &level.table {
            Some(t) => Box::new(
                (0..t.len())
                    .filter(move |&i| t.value(i, &lifted).is_zero() && t.jet(i, &lifted).is_zero())
                    .map(|i| t.points()[i]),
            ),
            None => {
                let form = TernaryForm::new(&level.field, self.degree, lifted)
                    .expect("coefficient count matches the degree");
                Box::new(
                    enumerate_p2(&level.field)
                        .into_iter()
                        .filter(move |p| jet_at(&form, p).is_zero()),
                )
            }
        }
    }

    /// Whether `point` (over level `e`) is defined over a proper subfield.
    fn in_smaller_level(&self, level: &ScanLevel, point: &ProjPoint) -> bool {
        let q = u64::from(self.base.q());
        (1..level.e).filter(|s| level.e.is_multiple_of(*s)).any(|s| {
            let qs = q.pow(s);
            point
                .coords()
                .iter()
                .all(|&c| level.field.pow(c, qs) == c)
        })
    }

    /// Every singular point, each listed once at the smallest degree it is defined over.
    pub fn singular_points(&self, form: &TernaryForm) -> Result<Vec<(u32, ProjPoint)>, PolyError> {
        check_form(form)?;
        let mut out = Vec::new();
        for level in &self.levels {
            for p in self.scan_level(level, form.coeffs()) {
                if !self.in_smaller_level(level, &p) {
                    out.push((level.e, p));
                }
            }
        }
        Ok(out)
    }

    /// Whether any singular point exists over the scanned fields; only the
    /// maximal levels are visited since each contains its subfields.
    pub fn has_singular_point(&self, coeffs: &[FieldElem]) -> bool {
        let max_e = self.levels.len() as u32;
        self.levels
            .iter()
            .filter(|l| !(l.e + 1..=max_e).any(|m| m % l.e == 0))
            .any(|l| self.scan_level(l, coeffs).next().is_some())
    }
}

/// All singular points over `F_{q^e}` for `e = 1..=max_e`.
pub fn singular_scan_oracle(form: &TernaryForm, max_e: u32) -> Result<Vec<(u32, ProjPoint)>, PolyError> {
    check_form(form)?;
    OracleScanner::new(form.field(), form.degree(), max_e)?.singular_points(form)
}

/// The extension degree bound that makes the oracle complete: `(d-1)^2`, at least 1.
pub fn oracle_bound(d: u32) -> u32 {
    (d.saturating_sub(1) * d.saturating_sub(1)).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::poly::parse_form;

    #[test]
    fn pointwise_examples() {
        let f = make_field(2, 1).unwrap();
        let pts = enumerate_p2(&f);
        let xyz = parse_form(&f, 3, "XYZ").unwrap();
        let p100 = parse_point(&f, "[1:0:0]");
        assert!(is_singular_at(&xyz, &p100).unwrap());
        let conic = parse_form(&f, 2, "X^2 + YZ").unwrap();
        assert!(!is_singular_at(&conic, &parse_point(&f, "[0:0:1]")).unwrap());
        let line = parse_form(&f, 1, "X").unwrap();
        assert!(pts.iter().all(|p| !is_singular_at(&line, p).unwrap()));
    }

    fn parse_point(f: &FieldDesc, s: &str) -> ProjPoint {
        crate::plane::parse_point(f, s).unwrap()
    }

    #[test]
    fn smoothness_examples() {
        let f = make_field(2, 1).unwrap();
        let fermat = parse_form(&f, 3, "X^3 + Y^3 + Z^3").unwrap();
        assert!(is_smooth(&fermat).unwrap().smooth);
        assert!(singular_scan_oracle(&fermat, 4).unwrap().is_empty());
        let xyz = parse_form(&f, 3, "XYZ").unwrap();
        let v = is_smooth(&xyz).unwrap();
        assert!(!v.smooth);
        assert!(is_singular_at(&xyz, &v.witness.unwrap().point).unwrap());
        let sing = singular_scan_oracle(&xyz, 1).unwrap();
        let pts: Vec<String> = sing.iter().map(|(_, p)| p.display(&f).to_string()).collect();
        assert_eq!(pts, ["[0:0:1]", "[0:1:0]", "[1:0:0]"]);
        assert!(!is_smooth(&parse_form(&f, 3, "X^2Z").unwrap()).unwrap().smooth);
        let conic = parse_form(&f, 2, "X^2 + YZ").unwrap();
        assert!(is_smooth(&conic).unwrap().smooth);
        assert!(singular_scan_oracle(&conic, 1).unwrap().is_empty());
        assert!(matches!(is_smooth(&TernaryForm::zero(&f, 3)), Err(PolyError::ZeroForm)));
    }

    #[test]
    fn cubes_of_lines_are_singular() {
        let f = make_field(3, 1).unwrap();
        let mut checker = SmoothnessChecker::new(&f, 3);
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    if a.is_zero() && b.is_zero() && c.is_zero() {
                        continue;
                    }
                    // (aX+bY+cZ)^3 = a X^3 + b Y^3 + c Z^3 over F_3
                    let form = TernaryForm::from_terms(
                        &f,
                        3,
                        &[(a, [3, 0, 0]), (b, [0, 3, 0]), (c, [0, 0, 3])],
                    )
                    .unwrap();
                    assert!(!checker.check(&form).unwrap().smooth);
                }
            }
        }
    }

    #[test]
    fn singularity_off_rational_points() {
        // (X^2+XY+Y^2+Z^2)·Z over F_2: a smooth conic meeting the line Z = 0
        // at the conjugate pair [w:1:0], w in F_4 \ F_2
        let f = make_field(2, 1).unwrap();
        let form = parse_form(&f, 3, "X^2Z + XYZ + Y^2Z + Z^3").unwrap();
        let v = is_smooth(&form).unwrap();
        assert!(!v.smooth);
        let w = v.witness.expect("root found in F_4");
        assert_eq!(w.ext_degree, 2);
        assert!(is_singular_at_ext(&form, w.ext_degree, &w.point).unwrap());
        // the same configuration inside the affine chart
        let form = parse_form(&f, 3, "X^2Y + XYZ + YZ^2 + Y^3").unwrap();
        let v = is_smooth(&form).unwrap();
        assert!(!v.smooth);
        // y divides the chart polynomial, so elimination degenerates and no witness is promised
        if let Some(w) = v.witness {
            assert!(is_singular_at_ext(&form, w.ext_degree, &w.point).unwrap());
        }
        let sing = singular_scan_oracle(&form, 4).unwrap();
        assert_eq!(sing.len(), 2);
        assert!(sing.iter().all(|&(e, _)| e == 2));
    }

    #[test]
    fn all_binary_cubics_agree_with_oracle() {
        let f = make_field(2, 1).unwrap();
        let mut checker = SmoothnessChecker::new(&f, 3);
        let oracle = OracleScanner::new(&f, 3, 4).unwrap();
        for idx in 1..1u64 << 10 {
            let form = TernaryForm::decode(&f, 3, idx);
            let v = checker.check(&form).unwrap();
            assert_eq!(v.smooth, !oracle.has_singular_point(form.coeffs()), "{form}");
            if let Some(w) = v.witness {
                assert!(is_singular_at_ext(&form, w.ext_degree, &w.point).unwrap());
            }
        }
    }

    #[test]
    fn scaling_invariance_ternary_cubics() {
        let f = make_field(3, 1).unwrap();
        let mut checker = SmoothnessChecker::new(&f, 3);
        let two = FieldElem(2);
        for idx in 1..3u64.pow(10) {
            let form = TernaryForm::decode(&f, 3, idx);
            let a = checker.check(&form).unwrap().smooth;
            let b = checker.check(&form.scale(two)).unwrap().smooth;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn resultant_path_matches_groebner() {
        let f = make_field(2, 1).unwrap();
        let mut checker = SmoothnessChecker::new(&f, 4);
        for idx in (1..1u64 << 15).step_by(37) {
            let form = TernaryForm::decode(&f, 4, idx);
            let v = checker.check(&form).unwrap();
            let chart = form.dehomogenize(2).unwrap();
            let affine_clean = ideal_trivial(&[chart.clone(), chart.partial(0), chart.partial(1)]).unwrap();
            if v.smooth {
                assert!(affine_clean);
            }
        }
    }
}
