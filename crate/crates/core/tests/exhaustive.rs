use num_bigint::BigUint;
use planecount_core::gf::{embed, extension, DEFAULT_FIELD_LIMIT};
use planecount_core::plane::{closed_point_count_q, enumerate_p2, jet_at, p2_size, PointTable};
use planecount_core::poly::{ideal_trivial, monomial_count, AffinePoly};
use planecount_core::sieve::{all_forms_point_counts, fiber_density, Order, PointConstraint, TargetSet, ZConfig};
use planecount_core::smooth::{is_singular_at, SmoothnessChecker};
use planecount_core::stats::{
    all_curves_model, empirical_histogram, smooth_model, Mode, Strategy, DEFAULT_BUDGET,
};
use planecount_core::{make_field, ExactModel, Rational, TernaryForm};

fn lift(p: &AffinePoly, emb: &planecount_core::gf::Embedding) -> AffinePoly {
    AffinePoly::from_terms(emb.ext(), p.terms().iter().map(|&(m, c)| (m, emb.apply(c))))
}

#[test]
fn ideal_triviality_matches_common_zero_search() {
    let f = make_field(2, 1).unwrap();
    let exts: Vec<_> = (1..=4)
        .map(|e| {
            let ext = extension(&f, e, DEFAULT_FIELD_LIMIT).unwrap();
            
            embed(&f, &ext).unwrap()
        })
        .collect();
    for index in 1..1u64 << 10 {
        let form = TernaryForm::decode(&f, 3, index);
        let a = form.dehomogenize(2).unwrap();
        let gens = [a.clone(), a.partial(0), a.partial(1)];
        if gens.iter().all(AffinePoly::is_zero) {
            continue;
        }
        let trivial = ideal_trivial(&gens).unwrap();
        let common_zero = exts.iter().any(|emb| {
            let lifted: Vec<AffinePoly> = gens.iter().map(|g| lift(g, emb)).collect();
            let ext = emb.ext();
            ext.elements()
                .any(|x| ext.elements().any(|y| lifted.iter().all(|g| g.eval(x, y).is_zero())))
        });
        assert_eq!(trivial, !common_zero, "form {form}");
    }
}

#[test]
fn jets_vanish_exactly_at_singular_points() {
    let f = make_field(2, 1).unwrap();
    for d in 1..=3u32 {
        for index in 1..1u64 << monomial_count(d) {
            let form = TernaryForm::decode(&f, d, index);
            for p in enumerate_p2(&f) {
                let on = form.evaluate(p.coords()).is_zero();
                let grad = (0..3).all(|v| form.partial(v).unwrap().evaluate(p.coords()).is_zero());
                assert_eq!(jet_at(&form, &p).is_zero(), on && grad);
                assert_eq!(is_singular_at(&form, &p).unwrap(), on && grad);
            }
        }
    }
}

#[test]
fn orbit_point_identity() {
    for q in [2u64, 3, 4, 5] {
        for big_e in 1..=4u32 {
            let total: BigUint = (1..=big_e)
                .filter(|e| big_e % e == 0)
                .map(|e| closed_point_count_q(q, e) * e)
                .sum();
            assert_eq!(total, p2_size(q, big_e));
        }
    }
}

#[test]
fn singular_at_origin_density_matches_enumeration() {
    let f = make_field(2, 1).unwrap();
    let p = enumerate_p2(&f)[0];
    let z = ZConfig::single(p, Order::Jet);
    let t = TargetSet::uniform(PointConstraint::JetZero, 1);
    let density: Rational = fiber_density(&f, 3, &z, &t).unwrap();
    let count = (0..1u64 << 10)
        .filter(|&i| jet_at(&TernaryForm::decode(&f, 3, i), &p).is_zero())
        .count();
    assert_eq!(count, 128);
    assert_eq!(density * Rational::from_integer(1024.into()), Rational::from_integer(128.into()));
}

#[test]
fn all_mode_histogram_plus_zero_form_is_exact_distribution() {
    for (p, d) in [(2u64, 2u32), (2, 3), (2, 4), (3, 2)] {
        let f = make_field(p, 1).unwrap();
        let h = empirical_histogram(&f, d, Mode::All, Strategy::Exhaustive, None, DEFAULT_BUDGET)
            .unwrap()
            .with_zero_form();
        let exact = all_forms_point_counts(&f, d, 1 << 24).unwrap();
        let counts: Vec<BigUint> = h.counts.iter().map(|&c| BigUint::from(c)).collect();
        assert_eq!(counts, exact);
    }
}

#[test]
fn all_forms_binomial_once_surjective() {
    let f = make_field(2, 1).unwrap();
    let exact = all_forms_point_counts(&f, 7, 1 << 20).unwrap();
    let model: ExactModel = all_curves_model(2);
    let total = Rational::from_integer(BigUint::from(2u32).pow(36).into());
    for (c, p) in exact.iter().zip(&model.pmf) {
        assert_eq!(Rational::from_integer(c.clone().into()), &total * p);
    }
    // below the threshold the distribution is not binomial
    let exact = all_forms_point_counts(&f, 2, 1 << 20).unwrap();
    let total = Rational::from_integer(BigUint::from(2u32).pow(6).into());
    assert!(exact
        .iter()
        .zip(&model.pmf)
        .any(|(c, p)| Rational::from_integer(c.clone().into()) != &total * p));
}

#[test]
fn smooth_cubics_reverse_enumeration_agrees() {
    let f = make_field(2, 1).unwrap();
    let h = empirical_histogram(&f, 3, Mode::Smooth, Strategy::Exhaustive, None, DEFAULT_BUDGET).unwrap();
    let mut checker = SmoothnessChecker::new(&f, 3);
    let table = PointTable::new(&f, 3);
    let mut counts = vec![0u64; 8];
    for index in (1..1u64 << 10).rev() {
        let form = TernaryForm::decode(&f, 3, index);
        if checker.check(&form).unwrap().smooth {
            counts[table.count(form.coeffs()) as usize] += 1;
        }
    }
    assert_eq!(h.counts, counts);
    assert_eq!(h.total, 336);
    assert_eq!(h.counts.len(), smooth_model::<Rational>(2).pmf.len());
}
