//! One function per experiment kind; each returns a [`Report`].

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use planecount_core::plane::PointTable;
use planecount_core::poly::monomial_count;
use planecount_core::scalar::format_ratio;
use planecount_core::sieve::{
    all_forms_point_counts, fiber_density, jet_matrix, p_dr_bound, p_dr_certified, p_dr_formula,
    singular_at_rational_density, smallest_surjective_degree, tail_bounds, zeta_p2, Order, PointConstraint,
    SieveError, TargetSet, ZConfig,
};
use planecount_core::smooth::{is_singular_at_ext, oracle_bound, OracleScanner, SmoothnessChecker};
use planecount_core::stats::{
    all_curves_model, compare_with_quantile, m_moment, n_moment, raw_moment, smooth_model, stirling_moment_identity,
    Histogram, Mode, NormalizedMoment, Provenance, Strategy,
};
use planecount_core::{ExactModel, FieldDesc, FieldElem, Rational, TernaryForm};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::manifest::{Experiment, Kind, Manifest, StrategySpec};
use crate::report::{csv_table, fixed, float, header, rational, Report};
use crate::runner::{Control, Job, Pass};
use crate::CliError;

/// Largest number of projective points the singular-point scan may visit per form.
pub const ORACLE_POINT_BUDGET: u64 = 1 << 24;

/// Step limit for exact computations that do not enumerate forms.
pub const EXACT_STEP_LIMIT: u128 = 1 << 24;

pub fn run(manifest: &Manifest) -> Result<Report, CliError> {
    run_with(manifest, Control::default())
}

pub fn run_with(manifest: &Manifest, control: Control) -> Result<Report, CliError> {
    manifest.validate()?;
    let exp = &manifest.experiment;
    let field = exp.field.build().map_err(|e| CliError::InvalidManifest(e.to_string()))?;
    let ctx = Ctx {
        manifest,
        field: &field,
        control,
    };
    match exp.kind {
        Kind::Distribution => ctx.distribution(false),
        Kind::Moments => ctx.distribution(true),
        Kind::SieveVerify => ctx.sieve_verify(),
        Kind::SmoothCrosscheck => ctx.smooth_crosscheck(),
        Kind::PropositionExact => ctx.proposition_exact(),
        Kind::Bounds => ctx.bounds(),
    }
}

struct Ctx<'a> {
    manifest: &'a Manifest,
    field: &'a FieldDesc,
    control: Control,
}

fn strategy_of(spec: StrategySpec) -> (Strategy, u64) {
    match spec {
        StrategySpec::Exhaustive { budget } => (Strategy::Exhaustive, budget),
        StrategySpec::Sample { n, seed } => (Strategy::Sample { n, seed }, u64::MAX),
    }
}

fn q_pow(q: u32, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

fn ratio(num: &BigUint, den: &BigUint) -> Rational {
    Rational::new(num.clone().into(), den.clone().into())
}

struct HistJob {
    table: PointTable,
    checker: Option<SmoothnessChecker>,
}

impl Job for HistJob {
    fn width(&self) -> usize {
        self.table.len() + 1
    }

    fn visit(&mut self, coeffs: &[FieldElem], counters: &mut [u64]) -> Result<(), CliError> {
        if let Some(c) = self.checker.as_mut() {
            if !c.check_coeffs(coeffs).smooth {
                return Ok(());
            }
        }
        counters[self.table.count(coeffs) as usize] += 1;
        Ok(())
    }
}

struct CrossJob {
    field: FieldDesc,
    degree: u32,
    checker: SmoothnessChecker,
    oracle: OracleScanner,
}

impl Job for CrossJob {
    fn width(&self) -> usize {
        4
    }

    /// Counters: forms, smooth, singular, witnesses replayed.
    fn visit(&mut self, coeffs: &[FieldElem], counters: &mut [u64]) -> Result<(), CliError> {
        let verdict = self.checker.check_coeffs(coeffs);
        let oracle_singular = self.oracle.has_singular_point(coeffs);
        let form = || TernaryForm::new(&self.field, self.degree, coeffs.to_vec()).expect("coefficient count matches");
        if verdict.smooth == oracle_singular {
            return Err(CliError::Inconsistency(format!(
                "decision says {verdict} but the scan {} a singular point for {}",
                if oracle_singular { "found" } else { "did not find" },
                form()
            )));
        }
        counters[0] += 1;
        counters[if verdict.smooth { 1 } else { 2 }] += 1;
        if let Some(w) = verdict.witness {
            let ok = is_singular_at_ext(&form(), w.ext_degree, &w.point).map_err(|e| CliError::Internal(e.to_string()))?;
            if !ok {
                return Err(CliError::Inconsistency(format!(
                    "witness {} is not singular on {}",
                    w.describe(&self.field),
                    form()
                )));
            }
            counters[3] += 1;
        }
        Ok(())
    }
}

/// Counters: forms, forms with a singular closed point of degree in `lo..=hi`.
struct ClosedPointJob {
    field: FieldDesc,
    degree: u32,
    lo: u32,
    table: PointTable,
    oracle: Option<OracleScanner>,
}

impl Job for ClosedPointJob {
    fn width(&self) -> usize {
        2
    }

    fn visit(&mut self, coeffs: &[FieldElem], counters: &mut [u64]) -> Result<(), CliError> {
        counters[0] += 1;
        let hit = match &self.oracle {
            None => self.table.first_singular(coeffs).is_some(),
            Some(o) => {
                let form = TernaryForm::new(&self.field, self.degree, coeffs.to_vec()).expect("coefficient count matches");
                o.singular_points(&form)
                    .map_err(|e| CliError::Internal(e.to_string()))?
                    .iter()
                    .any(|(e, _)| *e >= self.lo)
            }
        };
        if hit {
            counters[1] += 1;
        }
        Ok(())
    }
}

fn moment_json(m: &NormalizedMoment<Rational>) -> Value {
    json!({
        "coefficient": format_ratio(&m.coefficient),
        "base": m.base,
        "half_power": m.k,
        "exact": m.exact().map(|v| format_ratio(&v)),
        "value": float(m.to_f64()),
    })
}

impl Ctx<'_> {
    fn exp(&self) -> &Experiment {
        &self.manifest.experiment
    }

    /// A pass whose checkpoints are keyed by the manifest digest and `label`.
    fn pass(&self, label: &str, strategy: Strategy, budget: u64) -> Pass<'_> {
        Pass {
            field: self.field,
            degree: self.exp().degree,
            strategy,
            budget,
            digest: format!("{}:{label}", self.exp().digest()),
            execution: &self.manifest.execution,
            control: self.control,
        }
    }

    fn histogram(&self) -> Result<Histogram, CliError> {
        let exp = self.exp();
        let (strategy, budget) = strategy_of(exp.strategy);
        let d = exp.degree;
        let field = self.field;
        let mode = exp.mode;
        let counts = self.pass("histogram", strategy, budget).run(|| HistJob {
            table: PointTable::new(field, d),
            checker: (mode == Mode::Smooth).then(|| SmoothnessChecker::new(field, d)),
        })?;
        let provenance = match strategy {
            Strategy::Exhaustive => Provenance::Exhaustive {
                zero_form_excluded: true,
            },
            Strategy::Sample { n, seed } => Provenance::Sampled { n, seed },
        };
        let mut h = Histogram::empty(field.spec(), d, mode, provenance);
        h.total = counts.iter().sum();
        h.counts = counts;
        Ok(h)
    }

    fn distribution(&self, with_moments: bool) -> Result<Report, CliError> {
        let exp = self.exp();
        let q = u64::from(self.field.q());
        let d = exp.degree;
        let h = self.histogram()?;
        let model: ExactModel = match exp.mode {
            Mode::Smooth => smooth_model(q),
            Mode::All => all_curves_model(q),
        };
        let mut out = header(exp, self.field);
        out.insert("histogram".into(), serde_json::to_value(&h).expect("histograms serialize"));
        out.insert(
            "model".into(),
            json!({
                "n": model.n,
                "p": format_ratio(&model.p),
                "pmf": model.pmf.iter().map(format_ratio).collect::<Vec<_>>(),
            }),
        );
        let mut csv_rows = Vec::new();
        if h.total > 0 {
            let cmp = compare_with_quantile(&h, &model, exp.tolerance.confidence_z).map_err(CliError::from_stats)?;
            let rows: Vec<Value> = cmp
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "t": r.t,
                        "count": r.count,
                        "empirical_freq": fixed(&r.empirical_freq),
                        "model_pmf": fixed(&r.model_pmf),
                        "model_pmf_exact": format_ratio(&r.model_pmf),
                        "diff": fixed(&r.diff),
                        "ci_halfwidth": r.ci_halfwidth.map(float),
                    })
                })
                .collect();
            csv_rows = cmp
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.t.to_string(),
                        r.count.to_string(),
                        fixed(&r.empirical_freq),
                        fixed(&r.model_pmf),
                        fixed(&r.diff),
                        r.ci_halfwidth.map(float).unwrap_or_default(),
                    ]
                })
                .collect();
            out.insert(
                "comparison".into(),
                json!({
                    "tv_distance": cmp.tv_text(),
                    "tv_distance_exact": format_ratio(&cmp.tv_distance),
                    "max_abs_diff": cmp.max_abs_diff_text(),
                    "rows": rows,
                }),
            );
        } else {
            out.insert("comparison".into(), Value::Null);
        }
        if let Provenance::Exhaustive { .. } = h.provenance {
            let all = q_pow(self.field.q(), monomial_count(d));
            match exp.mode {
                Mode::Smooth => {
                    let frac = ratio(&BigUint::from(h.total), &all);
                    let zeta_inv = Rational::one() / zeta_p2::<Rational>(q, 3).expect("s = 3 is in range");
                    out.insert(
                        "smooth_fraction".into(),
                        json!({
                            "value": rational(&frac),
                            "limit": rational(&zeta_inv),
                            "abs_diff": fixed(&(frac - zeta_inv).abs()),
                        }),
                    );
                }
                Mode::All => {
                    let with_zero = h.with_zero_form();
                    let mut entry = Map::new();
                    entry.insert("counts".into(), json!(with_zero.counts));
                    entry.insert("total".into(), json!(with_zero.total));
                    match all_forms_point_counts(self.field, d, EXACT_STEP_LIMIT) {
                        Ok(exact) => {
                            let same = exact.iter().zip(&with_zero.counts).all(|(a, &b)| *a == BigUint::from(b));
                            if !same {
                                return Err(CliError::Inconsistency(
                                    "enumerated counts differ from the exact value-map distribution".into(),
                                ));
                            }
                            entry.insert("matches_value_map_count".into(), json!(true));
                        }
                        Err(_) => {
                            entry.insert("matches_value_map_count".into(), Value::Null);
                        }
                    }
                    let cmp = compare_with_quantile(&with_zero, &model, exp.tolerance.confidence_z)
                        .map_err(CliError::from_stats)?;
                    entry.insert("tv_distance_exact".into(), json!(format_ratio(&cmp.tv_distance)));
                    out.insert("zero_form_readded".into(), Value::Object(entry));
                }
            }
        }
        let mut csv = csv_table(
            &["t", "count", "empirical_freq", "model_pmf", "diff", "ci_halfwidth"],
            &csv_rows,
        );
        if with_moments {
            let (json_moments, rows) = self.moments(&h, &model)?;
            out.insert("moments".into(), json_moments);
            csv = csv_table(
                &["k", "empirical_n", "model_n", "empirical_m", "model_m"],
                &rows,
            );
        }
        Ok(Report {
            payload: Value::Object(out),
            csv: Some(csv),
        })
    }

    fn moments(&self, h: &Histogram, model: &ExactModel) -> Result<(Value, Vec<Vec<String>>), CliError> {
        let q = h.q();
        let pmf: Option<Vec<Rational>> = (h.total > 0).then(|| h.pmf());
        let mut entries = Vec::new();
        let mut rows = Vec::new();
        for k in 1..=self.exp().moments_k {
            let stirling = stirling_moment_identity(model.n, &model.p, k);
            if stirling != raw_moment(&model.pmf, k) {
                return Err(CliError::Inconsistency(format!("moment identity fails at k = {k}")));
            }
            let mn = n_moment(&model.pmf, q, k);
            let mm = m_moment(&model.pmf, q, k);
            let (en, em) = match &pmf {
                Some(p) => (Some(n_moment(p, q, k)), Some(m_moment(p, q, k))),
                None => (None, None),
            };
            entries.push(json!({
                "k": k,
                "empirical": { "N": en.as_ref().map(moment_json), "M": em.as_ref().map(moment_json) },
                "model": { "N": moment_json(&mn), "M": moment_json(&mm) },
                "model_raw_moment": format_ratio(&stirling),
            }));
            rows.push(vec![
                k.to_string(),
                en.map(|m| float(m.to_f64())).unwrap_or_default(),
                float(mn.to_f64()),
                em.map(|m| float(m.to_f64())).unwrap_or_default(),
                float(mm.to_f64()),
            ]);
        }
        Ok((Value::Array(entries), rows))
    }

    fn sieve_verify(&self) -> Result<Report, CliError> {
        let exp = self.exp();
        let d = exp.degree;
        let q = u64::from(self.field.q());
        let z = ZConfig::parse(self.field, &exp.sieve.z).map_err(|e| CliError::InvalidManifest(e.to_string()))?;
        let t = match exp.sieve.target.as_slice() {
            [] => TargetSet::uniform(PointConstraint::Unconstrained, z.len()),
            [c] => TargetSet::uniform(*c, z.len()),
            many => TargetSet::new(many.to_vec()),
        };
        let card = t.cardinality(q, &z).map_err(|e| CliError::InvalidManifest(e.to_string()))?;
        let described = z.describe(self.field);
        let m = jet_matrix(self.field, d, &z);
        let rank = m.rank();
        let surjective = rank == z.dim();
        let mut out = header(exp, self.field);
        out.insert("d".into(), json!(d));
        out.insert("zconfig".into(), json!(described));
        out.insert("zconfig_digest".into(), json!(hex::encode(Sha256::digest(described.as_bytes()))));
        out.insert("dim".into(), json!(z.dim()));
        out.insert("rank".into(), json!(rank));
        out.insert("surjective".into(), json!(surjective));
        out.insert("target_cardinality".into(), json!(card.to_string()));
        out.insert(
            "smallest_surjective_degree".into(),
            json!(smallest_surjective_degree(self.field, &z, exp.sieve.max_degree)),
        );
        let forms = monomial_count(d);
        out.insert(
            "fiber_size".into(),
            if surjective {
                json!(q_pow(self.field.q(), forms - z.dim()).to_string())
            } else {
                Value::Null
            },
        );
        let fiber: Result<Rational, SieveError> = fiber_density(self.field, d, &z, &t);
        out.insert(
            "density".into(),
            match &fiber {
                Ok(v) => json!(format_ratio(v)),
                Err(_) => Value::Null,
            },
        );
        let r = exp.sieve.r;
        if r > 0 {
            let (s, bound) = p_dr_bound(q, r, &z);
            let mut entry = Map::new();
            entry.insert("r".into(), json!(r));
            entry.insert("s".into(), json!(s.to_string()));
            entry.insert("degree_bound".into(), json!(bound.to_string()));
            let formula: Result<Rational, SieveError> = p_dr_formula(self.field, d, r, &z, &t);
            entry.insert(
                "formula".into(),
                match formula {
                    Ok(v) => json!(format_ratio(&v)),
                    Err(e) => json!({ "unavailable": e.to_string() }),
                },
            );
            if r <= 2 {
                let cert = p_dr_certified::<Rational>(self.field, d, r, &z, &t)
                    .map_err(|e| CliError::InvalidManifest(e.to_string()))?;
                entry.insert(
                    "certificate".into(),
                    json!({
                        "dim": cert.dim,
                        "rank": cert.rank,
                        "surjective": cert.surjective,
                        "density": format_ratio(&cert.density),
                    }),
                );
            }
            out.insert("product_formula".into(), Value::Object(entry));
        }
        Ok(Report {
            payload: Value::Object(out),
            csv: None,
        })
    }

    fn smooth_crosscheck(&self) -> Result<Report, CliError> {
        let exp = self.exp();
        let d = exp.degree;
        let max_e = exp.oracle_max_e.unwrap_or_else(|| oracle_bound(d));
        let q = u64::from(self.field.q());
        // the scan visits P^2 over each maximal level
        let scanned: u128 = (1..=max_e)
            .filter(|e| !(e + 1..=max_e).any(|m| m % e == 0))
            .map(|e| {
                let qe = (q as u128).saturating_pow(e);
                qe.saturating_mul(qe).saturating_add(qe + 1)
            })
            .sum();
        if scanned > u128::from(ORACLE_POINT_BUDGET) {
            return Err(CliError::Budget(format!(
                "scan of {scanned} points per form exceeds {ORACLE_POINT_BUDGET}"
            )));
        }
        let (strategy, budget) = strategy_of(exp.strategy);
        let field = self.field;
        let counters = self.pass("crosscheck", strategy, budget).run(|| CrossJob {
            field: field.clone(),
            degree: d,
            checker: SmoothnessChecker::new(field, d),
            oracle: OracleScanner::new(field, d, max_e).expect("extension sizes were checked"),
        })?;
        let mut out = header(exp, self.field);
        out.insert("oracle_max_e".into(), json!(max_e));
        out.insert("forms".into(), json!(counters[0]));
        out.insert("smooth".into(), json!(counters[1]));
        out.insert("singular".into(), json!(counters[2]));
        out.insert("witnesses_replayed".into(), json!(counters[3]));
        out.insert("disagreements".into(), json!(0));
        let csv = csv_table(
            &["forms", "smooth", "singular", "witnesses_replayed", "disagreements"],
            &[vec![
                counters[0].to_string(),
                counters[1].to_string(),
                counters[2].to_string(),
                counters[3].to_string(),
                "0".into(),
            ]],
        );
        Ok(Report {
            payload: Value::Object(out),
            csv: Some(csv),
        })
    }

    fn proposition_exact(&self) -> Result<Report, CliError> {
        let exp = self.exp();
        let d = exp.degree;
        let q = u64::from(self.field.q());
        let z = ZConfig::all_points(self.field, Order::Value);
        let rank = jet_matrix(self.field, d, &z).rank();
        let surjective = rank == z.dim();
        let counts = all_forms_point_counts(self.field, d, EXACT_STEP_LIMIT)
            .map_err(|e| CliError::Budget(e.to_string()))?;
        let model: ExactModel = all_curves_model(q);
        let total = q_pow(self.field.q(), monomial_count(d));
        let total_r = ratio(&total, &BigUint::one());
        let mut rows = Vec::new();
        let mut json_rows = Vec::new();
        let mut tv = Rational::zero();
        for (t, (c, p)) in counts.iter().zip(&model.pmf).enumerate() {
            let expected = &total_r * p;
            let got = ratio(c, &BigUint::one());
            tv += (ratio(c, &total) - p).abs();
            json_rows.push(json!({
                "t": t,
                "count": c.to_string(),
                "binomial_count": format_ratio(&expected),
                "equal": got == expected,
            }));
            rows.push(vec![t.to_string(), c.to_string(), format_ratio(&expected)]);
        }
        tv /= Rational::from_integer(2.into());
        let exact = tv.is_zero();
        if surjective && !exact {
            return Err(CliError::Inconsistency(
                "surjective value map but the distribution is not binomial".into(),
            ));
        }
        let mut out = header(exp, self.field);
        out.insert("d".into(), json!(d));
        out.insert("dim".into(), json!(z.dim()));
        out.insert("rank".into(), json!(rank));
        out.insert("surjective".into(), json!(surjective));
        out.insert(
            "smallest_surjective_degree".into(),
            json!(smallest_surjective_degree(self.field, &z, exp.sieve.max_degree)),
        );
        out.insert("zero_form_included".into(), json!(true));
        out.insert("binomial_exact".into(), json!(exact));
        out.insert("tv_distance_exact".into(), json!(format_ratio(&tv)));
        out.insert("rows".into(), Value::Array(json_rows));
        Ok(Report {
            payload: Value::Object(out),
            csv: Some(csv_table(&["t", "count", "binomial_count"], &rows)),
        })
    }

    /// Density of forms singular at some closed point of degree in `r..=⌊d/3⌋`.
    fn closed_point_density(&self, r: u32) -> Result<(Rational, &'static str), CliError> {
        let exp = self.exp();
        let d = exp.degree;
        let hi = d / 3;
        if r > hi {
            return Ok((Rational::zero(), "empty-range"));
        }
        let (strategy, budget) = match exp.strategy {
            StrategySpec::Exhaustive { budget } => (Strategy::Exhaustive, budget),
            StrategySpec::Sample { .. } => {
                return Err(CliError::InvalidManifest("tail densities need an exhaustive strategy".into()))
            }
        };
        let q = u64::from(self.field.q());
        let fits = planecount_core::stats::candidate_space(q, d) <= u128::from(budget);
        if hi == 1 && !fits {
            let v = singular_at_rational_density(self.field, d, EXACT_STEP_LIMIT)
                .map_err(|e| CliError::Budget(e.to_string()))?;
            return Ok((v, "inclusion-exclusion"));
        }
        let field = self.field;
        let counters = self.pass(&format!("closed-points-r{r}"), strategy, budget).run(|| ClosedPointJob {
            field: field.clone(),
            degree: d,
            lo: r,
            table: PointTable::new(field, d),
            oracle: (hi > 1).then(|| OracleScanner::new(field, d, hi).expect("small extensions")),
        })?;
        let all = q_pow(self.field.q(), monomial_count(d));
        // the zero form, skipped by the pass, is singular everywhere
        Ok((ratio(&BigUint::from(counters[1] + 1), &all), "enumeration"))
    }

    fn bounds(&self) -> Result<Report, CliError> {
        let exp = self.exp();
        let d = exp.degree;
        let mut entries = Vec::new();
        let mut rows = Vec::new();
        for r in 1..=exp.r_max {
            let b = tail_bounds::<Rational>(self.field, d, r);
            let (density, method) = self.closed_point_density(r)?;
            let vacuous = b.medium >= Rational::one();
            let status = if vacuous {
                "vacuous"
            } else if density <= b.medium {
                "holds"
            } else {
                return Err(CliError::Inconsistency(format!(
                    "density {} exceeds the bound {} at r = {r}",
                    format_ratio(&density),
                    format_ratio(&b.medium)
                )));
            };
            let high_vacuous = b.high >= Rational::one();
            entries.push(json!({
                "r": r,
                "degree_range": [r, d / 3],
                "medium_bound": rational(&b.medium),
                "density": rational(&density),
                "density_method": method,
                "status": status,
                "high_bound": rational(&b.high),
                "high_bound_vacuous": high_vacuous,
                "high_exponent_exact": b.high_exponent_exact,
            }));
            rows.push(vec![
                r.to_string(),
                fixed(&b.medium),
                fixed(&density),
                status.to_string(),
                fixed(&b.high),
                if high_vacuous { "vacuous" } else { "nonvacuous" }.to_string(),
            ]);
        }
        let mut out = header(exp, self.field);
        out.insert("d".into(), json!(d));
        out.insert("bounds".into(), Value::Array(entries));
        Ok(Report {
            payload: Value::Object(out),
            csv: Some(csv_table(
                &["r", "medium_bound", "density", "status", "high_bound", "high_status"],
                &rows,
            )),
        })
    }
}

/// Description of a field and its tables, for `field info`.
pub fn field_info(field: &FieldDesc) -> Value {
    json!({
        "spec": field.spec().to_string(),
        "p": field.p(),
        "k": field.k(),
        "q": field.q(),
        "modulus": field.modulus(),
        "generator": field.format(field.generator()),
        "elements": (field.q() <= 256).then(|| field.elements().map(|a| field.format(a)).collect::<Vec<_>>()),
    })
}
