use nlkg_core::exponents::*;
use nlkg_core::NlkgError;
use num_bigint::BigInt;
use proptest::prelude::*;

fn triple(b: &str, c: &str, s: &str) -> ExpTriple {
    ExpTriple::new(parse_rational(b).unwrap(), parse_rational(c).unwrap(), parse_rational(s).unwrap())
}

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

#[test]
fn energy_triple_indices() {
    let h = h_triple();
    for d in 1..=8 {
        for theta in [int(0), int(1), rat(1, 3)] {
            let i = h.indices(&theta, d);
            assert_eq!((i.reg, i.str, i.dec), (int(1), int(0), int(0)));
        }
        assert!(h.is_admissible(&int(1), d), "d = {d}");
    }
}

#[test]
fn w_and_k_in_three_dimensions() {
    let w = w_triple(3);
    assert_eq!(w, triple("1/4", "1/4", "1/2"));
    assert_eq!(w.reg(&int(0), 3), int(1));
    assert_eq!(w.str_(&int(0), 3), int(0));
    assert_eq!(w.admissible_theta(&int(1), 3), Some(int(0)));
    let k = k_triple(3);
    assert_eq!(k, triple("3/10", "3/10", "1/2"));
    assert_eq!(k.reg(&int(1), 3), int(1));
    assert_eq!(k.str_(&int(1), 3), int(0));
}

#[test]
fn transforms() {
    assert_eq!(h_triple().dual(&int(1)), triple("1", "1/2", "0"));
    let z = triple("1/7", "2/9", "-3/5");
    let zs = z.transform(&Transform::Regularity(rat(5, 4)));
    assert_eq!((zs.b.clone(), zs.c.clone(), zs.sigma), (z.b.clone(), z.c.clone(), rat(5, 4)));
    assert_eq!(z.transform(&Transform::Dual(rat(1, 2))).dual(&rat(1, 2)), z);
}

#[test]
fn admissibility_range() {
    assert!(!triple("1", "1", "0").is_admissible(&int(1), 3));
    assert!(!triple("1/4", "1/2", "1/2").is_admissible(&int(1), 3));
    assert!(!triple("-1/10", "1/4", "0").is_admissible(&int(1), 3));
    // Admissible only through an interior θ: reg decreases and str
    // increases in θ.
    let z = triple("1/4", "1/4", "1/2");
    assert!(z.is_admissible(&int(1), 3));
    assert!(!z.is_admissible(&rat(9, 10), 3));
}

#[test]
fn parse_forms() {
    assert_eq!(q("3/2"), rat(3, 2));
    assert_eq!(q("-4"), int(-4));
    assert_eq!(q("1.25"), rat(5, 4));
    assert_eq!(q(" 6/4 "), rat(3, 2));
    for bad in ["", "1/0", "a/b", "1.", "1.2.3"] {
        assert!(matches!(parse_rational(bad), Err(NlkgError::Parse(_))), "{bad:?}");
    }
    assert_eq!(fmt_rational(&rat(-6, 4)), "-3/2");
    assert_eq!(fmt_rational(&int(7)), "7");
}

#[test]
fn windows() {
    assert_eq!(range_p1(3).unwrap(), (rat(4, 3), rat(8, 5)));
    assert_eq!(range_p2(3).unwrap(), (rat(10, 3), int(4)));
    assert_eq!(range_p2(5).unwrap(), (rat(6, 5), rat(4, 3)));
    assert!(matches!(range_p2(2), Err(NlkgError::ParamOutOfRange(_))));
}

#[test]
fn three_dimensional_example_holds_exactly() {
    let report = verify_relations(3, &rat(3, 2), &int(4)).unwrap();
    let fails: Vec<_> = report.failures().map(|r| r.name.clone()).collect();
    assert!(fails.is_empty(), "{fails:?}");
    assert!(report.relations.len() >= 20);
    assert_eq!(report.nu, "99/991");
    assert!(report.epsilon.is_none());
    let table = report.to_table();
    assert!(table.contains("0 failing"));
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["relations"].as_array().unwrap().len(), report.relations.len());
    assert_eq!(json["catalog"]["w"]["b"], "1/4");
}

#[test]
fn out_of_window_parameters_are_rejected() {
    assert!(matches!(verify_relations(2, &int(3), &int(4)), Err(NlkgError::ParamOutOfRange(_))));
    assert!(matches!(verify_relations(3, &int(1), &int(4)), Err(NlkgError::ParamOutOfRange(_))));
    assert!(matches!(verify_relations(3, &rat(3, 2), &int(5)), Err(NlkgError::ParamOutOfRange(_))));
    // p₂ = 4/(d-2) is inside, the lower end is not.
    assert!(matches!(verify_relations(3, &rat(3, 2), &rat(10, 3)), Err(NlkgError::ParamOutOfRange(_))));
    assert!(matches!(verify_relations(5, &rat(1, 2), &rat(4, 3)), Err(NlkgError::ParamOutOfRange(_))));
}

#[test]
fn hat_m_relation_in_five_dimensions() {
    let c = ExponentCatalog::unchecked(5, &rat(1, 2), &rat(4, 3));
    let p2 = rat(4, 3);
    let rhs = &(&c.n + &c.m_hat) + &c.m.scale(&(&p2 - int(1)));
    assert_eq!(c.y, rhs);
}

#[test]
fn catalog_identities_at_critical_p2() {
    for d in 5..=6 {
        let (a1, b1) = range_p1(d).unwrap();
        let p1 = (a1 + b1) / int(2);
        let p2 = range_p2(d).unwrap().1;
        let r = verify_relations(d, &p1, &p2).unwrap();
        let red: Vec<_> = r.failures().map(|x| x.name.as_str()).collect();
        // Only the β interval is red here; everything else holds exactly.
        assert_eq!(red, ["0 < beta"], "d = {d}");
        assert!(r.epsilon.is_some());
        let eps = q(r.epsilon.as_deref().unwrap());
        assert!(eps.denom() <= &BigInt::from(MAX_DENOMINATOR));
    }
}

#[test]
fn grid_runs_quickly() {
    let t = std::time::Instant::now();
    let grid = standard_grid();
    assert_eq!(grid.len(), 8);
    for (d, p1, p2) in grid {
        verify_relations(d, &p1, &p2).unwrap();
    }
    assert!(t.elapsed().as_secs_f64() < 1.0, "{:?}", t.elapsed());
}

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| rat(n, d))
}

fn arb_triple() -> impl Strategy<Value = ExpTriple> {
    (arb_rational(), arb_rational(), arb_rational()).prop_map(|(b, c, s)| ExpTriple::new(b, c, s))
}

proptest! {
    #[test]
    fn dual_is_an_involution(z in arb_triple(), s in arb_rational()) {
        prop_assert_eq!(z.dual(&s).dual(&s), z);
    }

    #[test]
    fn indices_are_affine_in_theta(z in arb_triple(), t in 0i64..=12, d in 1usize..8) {
        let theta = rat(t, 12);
        let (zero, one) = (int(0), int(1));
        let interp = |f: &dyn Fn(&Rational) -> Rational| &f(&zero) + &theta * (f(&one) - f(&zero));
        prop_assert_eq!(z.reg(&theta, d), interp(&|th| z.reg(th, d)));
        prop_assert_eq!(z.str_(&theta, d), interp(&|th| z.str_(th, d)));
        prop_assert_eq!(z.dec(&theta, d), interp(&|th| z.dec(th, d)));
    }

    #[test]
    fn indices_are_linear_in_the_triple(a in arb_triple(), b in arb_triple(), k in arb_rational(), d in 1usize..8) {
        let th = rat(1, 2);
        let combo = &a + &b.scale(&k);
        // reg and str are affine in (b, c, σ) with the same constant part.
        let base = ExpTriple::zero();
        let lin = |f: &dyn Fn(&ExpTriple) -> Rational| f(&a) + &k * (f(&b) - f(&base));
        prop_assert_eq!(combo.reg(&th, d), lin(&|z| z.reg(&th, d)));
        prop_assert_eq!(combo.str_(&th, d), lin(&|z| z.str_(&th, d)));
    }
}
