use num_bigint::BigUint;
use num_traits::{One, Zero};
use planecount_core::plane::{enumerate_p2, jet_at, point_count};
use planecount_core::poly::monomial_count;
use planecount_core::sieve::{
    fiber_density, jet_matrix, truncated_euler_product, zeta_u, Order, PointConstraint, TargetSet, ZConfig,
};
use planecount_core::smooth::{is_singular_at, is_singular_at_ext, is_smooth, is_smooth_groebner};
use planecount_core::stats::{
    central_moment, empirical_histogram, raw_moment, sharded_histogram, stirling_moment_identity, Mode, ModelDist,
    Strategy as Run, DEFAULT_BUDGET,
};
use planecount_core::{make_field, FieldDesc, FieldElem, Rational, Scalar, TernaryForm};
use proptest::prelude::*;

fn field_of(q: u64) -> FieldDesc {
    match q {
        4 => make_field(2, 2),
        8 => make_field(2, 3),
        9 => make_field(3, 2),
        _ => make_field(q, 1),
    }
    .unwrap()
}

fn form_from(field: &FieldDesc, d: u32, raw: &[u32]) -> TernaryForm {
    let q = field.q();
    let coeffs = raw
        .iter()
        .take(monomial_count(d))
        .map(|&r| field.element(u64::from(r % q)).unwrap())
        .collect();
    TernaryForm::new(field, d, coeffs).unwrap()
}

fn nonzero_form(q: u64, d: u32) -> impl Strategy<Value = TernaryForm> {
    let field = field_of(q);
    proptest::collection::vec(any::<u32>(), monomial_count(d)).prop_filter_map("zero form", move |raw| {
        let f = form_from(&field, d, &raw);
        (!f.is_zero()).then_some(f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn field_axioms(q in prop::sample::select(vec![27u64, 125, 256, 243]), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = match q {
            27 => make_field(3, 3),
            125 => make_field(5, 3),
            256 => make_field(2, 8),
            _ => make_field(3, 5),
        }.unwrap();
        let el = |x: u64| f.element(x % q).unwrap();
        let (a, b, c) = (el(a), el(b), el(c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.pow(a, q), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
        }
    }

    #[test]
    fn euler_relation(form in nonzero_form(9, 5)) {
        let f = form.field().clone();
        let mut lhs = TernaryForm::zero(&f, 5);
        for v in 0..3 {
            lhs = lhs.add(&form.partial(v).unwrap().mul_var(v)).unwrap();
        }
        // d = 5 is 2 mod 3
        prop_assert_eq!(lhs, form.scale(f.from_int(5)));
    }

    #[test]
    fn point_count_and_smoothness_scale_invariant(form in nonzero_form(5, 3), c in 1u32..5) {
        let f = form.field().clone();
        let scaled = form.scale(f.element(u64::from(c)).unwrap());
        prop_assert_eq!(point_count(&form, 1).unwrap(), point_count(&scaled, 1).unwrap());
        prop_assert_eq!(point_count(&form, 2).unwrap(), point_count(&scaled, 2).unwrap());
        prop_assert_eq!(is_smooth(&form).unwrap().smooth, is_smooth(&scaled).unwrap().smooth);
    }

    #[test]
    fn fast_path_matches_groebner(q in prop::sample::select(vec![2u64, 3, 4, 5, 7]), d in 2u32..6, raw in proptest::collection::vec(any::<u32>(), 21)) {
        let field = field_of(q);
        let form = form_from(&field, d, &raw);
        prop_assume!(!form.is_zero());
        let v = is_smooth(&form).unwrap();
        prop_assert_eq!(v.smooth, is_smooth_groebner(&form).unwrap());
        if let Some(w) = v.witness {
            prop_assert!(is_singular_at_ext(&form, w.ext_degree, &w.point).unwrap());
        }
    }

    #[test]
    fn jet_zero_iff_singular(form in nonzero_form(4, 4)) {
        for p in enumerate_p2(form.field()) {
            let on_curve = form.evaluate(p.coords()).is_zero();
            let grad_zero = (0..3).all(|v| form.partial(v).unwrap().evaluate(p.coords()).is_zero());
            prop_assert_eq!(jet_at(&form, &p).is_zero(), on_curve && grad_zero);
            prop_assert_eq!(is_singular_at(&form, &p).unwrap(), jet_at(&form, &p).is_zero());
        }
    }

    #[test]
    fn stirling_identity_matches_pmf(n in 1u32..=31, k in 0u32..=8, num in 0i64..=20, den in 1i64..=20) {
        prop_assume!(num <= den);
        let p = Rational::ratio(num, den);
        let m = ModelDist::binomial(n, p.clone());
        prop_assert_eq!(m.pmf.iter().cloned().sum::<Rational>(), Rational::one());
        prop_assert_eq!(stirling_moment_identity(n, &p, k), raw_moment(&m.pmf, k));
        let mean = Rational::from_integer(n.into()) * &p;
        prop_assert_eq!(central_moment(&m.pmf, &mean, 1), Rational::zero());
    }

    #[test]
    fn sharding_preserves_histograms(shards in 1u32..9, d in 1u32..4) {
        let f = make_field(2, 1).unwrap();
        for mode in [Mode::All, Mode::Smooth] {
            let whole = empirical_histogram(&f, d, mode, Run::Exhaustive, None, DEFAULT_BUDGET).unwrap();
            let split = sharded_histogram(&f, d, mode, Run::Exhaustive, shards, DEFAULT_BUDGET).unwrap();
            prop_assert_eq!(whole, split);
        }
    }

    #[test]
    fn sampling_independent_of_split(shards in 1u32..6, seed in any::<u64>()) {
        let f = make_field(3, 1).unwrap();
        let strategy = Run::Sample { n: 300, seed };
        let whole = empirical_histogram(&f, 2, Mode::All, strategy, None, DEFAULT_BUDGET).unwrap();
        let split = sharded_histogram(&f, 2, Mode::All, strategy, shards, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(whole.total, 300);
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn surjective_above_threshold(q in prop::sample::select(vec![2u64, 3]), mask in 1u32..(1 << 13), orders in any::<u16>()) {
        let f = field_of(q);
        let pts = enumerate_p2(&f);
        let entries: Vec<_> = pts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(i, &p)| (p, if orders >> i & 1 == 1 { Order::Jet } else { Order::Value }))
            .take(6)
            .collect();
        prop_assume!(!entries.is_empty());
        let z = ZConfig::new(entries).unwrap();
        let d = (z.dim() as u32 - 1).max(1);
        prop_assert_eq!(jet_matrix(&f, d, &z).rank(), z.dim());
        // density times #S_d is a whole number of forms
        let t = TargetSet::uniform(PointConstraint::Unconstrained, z.len());
        let dens: Rational = fiber_density(&f, d, &z, &t).unwrap();
        prop_assert_eq!(dens, Rational::one());
        let t = TargetSet::uniform(PointConstraint::ValueZero, z.len());
        let dens: Rational = fiber_density(&f, d, &z, &t).unwrap();
        let forms = Rational::from_integer(BigUint::from(q).pow(monomial_count(d) as u32).into());
        prop_assert!((dens * forms).is_integer());
    }

    #[test]
    fn truncated_product_bracketed(q in prop::sample::select(vec![2u64, 3, 4]), r in 2u32..5) {
        let tp: Rational = truncated_euler_product(q, r, &ZConfig::empty());
        let inv = Rational::one() / zeta_u::<Rational>(q, 3, &ZConfig::empty()).unwrap();
        let tail = Rational::from_integer(2.into()) * Rational::ratio(q as i64, q as i64 - 1)
            / Rational::from_count(q.pow(r));
        prop_assert!(tp >= inv);
        prop_assert!(tp * (Rational::one() - tail) <= inv);
    }
}

#[test]
fn chart_restriction_keeps_chart_points() {
    let f = make_field(3, 1).unwrap();
    let form = TernaryForm::decode(&f, 3, 12345);
    for chart in 0..3 {
        let a = form.dehomogenize(chart).unwrap();
        for p in enumerate_p2(&f).into_iter().filter(|p| p.chart() == chart) {
            let (x, y) = p.affine();
            assert_eq!(a.eval(x, y), form.evaluate(p.coords()));
        }
    }
}
