use kfcl::poset::{pattern_leq, Pattern, Sign};
use kfcl::samples::{iota_table, rho_multi, rho_single, LinearOrder, Sample};
use kfcl::sphere::{layer_cake, reconstruct, Cap, Cover, CoverSet, SphereGrid, UnitPoint};
use proptest::prelude::*;

fn sample(max_len: usize) -> impl Strategy<Value = Sample> {
    (1..=max_len).prop_flat_map(|len| {
        proptest::collection::vec(0u8..3, len).prop_map(move |v| {
            let signs: Vec<Option<Sign>> = v
                .iter()
                .map(|&c| match c {
                    0 => None,
                    1 => Some(Sign::Plus),
                    _ => Some(Sign::Minus),
                })
                .collect();
            Sample::from_signs(&signs).unwrap()
        })
    })
}

fn order(len: usize) -> impl Strategy<Value = LinearOrder> {
    Just((0..len).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|seq| LinearOrder::new(seq).unwrap())
}

fn sample_with_orders(
    max_len: usize,
    d: usize,
) -> impl Strategy<Value = (Sample, Vec<LinearOrder>)> {
    sample(max_len).prop_flat_map(move |s| {
        let len = s.len();
        (Just(s), proptest::collection::vec(order(len), d))
    })
}

proptest! {
    #[test]
    fn negation_is_an_order_automorphism(a in sample(8), b in sample(8)) {
        if a.len() == b.len() {
            prop_assert_eq!(a.leq(&b).unwrap(), a.negate().leq(&b.negate()).unwrap());
        }
        prop_assert_eq!(a.negate().negate(), a);
    }

    #[test]
    fn rho_single_mirrors_under_negation((s, orders) in sample_with_orders(10, 1)) {
        prop_assume!(!s.is_zero());
        let p = rho_single(&s, &orders[0]).unwrap();
        prop_assert_eq!(rho_single(&s.negate(), &orders[0]).unwrap(), p.mirror());
        let runs = {
            let signs: Vec<Sign> = orders[0].sequence().iter().filter_map(|&i| s.get(i)).collect();
            1 + signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        prop_assert_eq!(p.length() as usize, runs);
    }

    #[test]
    fn rho_single_monotone_on_restrictions((s, orders) in sample_with_orders(10, 1), mask in any::<u64>()) {
        let t = s.restrict(mask);
        prop_assume!(t.is_realizable());
        let lo = rho_single(&t, &orders[0]).unwrap();
        let hi = rho_single(&s, &orders[0]).unwrap();
        prop_assert!(pattern_leq(&lo, &hi) || lo == hi, "{} !<= {}", lo, hi);
    }

    #[test]
    fn opposite_signs_get_distinct_images((s, orders) in sample_with_orders(10, 2)) {
        prop_assume!(!s.is_zero());
        let table = iota_table(&s, &orders).unwrap();
        for (a, &f) in table.support.iter().enumerate() {
            for (b, &g) in table.support.iter().enumerate() {
                if s.get(f) != s.get(g) {
                    prop_assert_ne!(&table.values[a], &table.values[b]);
                }
            }
        }
    }

    #[test]
    fn rho_multi_monotone_and_non_collapsing((s, orders) in sample_with_orders(9, 2), mask in any::<u64>()) {
        prop_assume!(s.is_realizable());
        let t = s.restrict(mask);
        let hi = rho_multi(&s, &orders).unwrap();
        prop_assert_ne!(&rho_multi(&s.negate(), &orders).unwrap(), &hi);
        prop_assert_eq!(rho_multi(&s.negate(), &orders).unwrap(), hi.negate());
        if t.is_realizable() {
            let lo = rho_multi(&t, &orders).unwrap();
            prop_assert!(lo.leq(&hi).unwrap(), "{} !<= {}", lo, hi);
        }
    }

    #[test]
    fn layer_cake_reconstructs(values in proptest::collection::vec((0usize..6, any::<bool>(), 0.0f64..=1.0), 1..6)) {
        let mut used = [false; 6];
        let mut entries: Vec<(usize, Sign, f64)> = Vec::new();
        for (i, plus, v) in values {
            if !used[i] {
                used[i] = true;
                entries.push((i, if plus { Sign::Plus } else { Sign::Minus }, v));
            }
        }
        entries[0].2 = 1.0;
        let terms = layer_cake(6, &entries).unwrap();
        let total: f64 = terms.iter().map(|t| t.coefficient).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        for w in terms.windows(2) {
            prop_assert!(w[0].sample.leq(&w[1].sample).unwrap() && w[0].sample != w[1].sample);
        }
        for &(i, y, v) in &entries {
            prop_assert!((reconstruct(&terms, i, y) - v).abs() <= 1e-12);
            prop_assert_eq!(reconstruct(&terms, i, -y), 0.0);
        }
    }

    #[test]
    fn cap_cover_chi_reconstructs(theta in 0.0f64..std::f64::consts::TAU, phi in 0.1f64..3.0) {
        let centres = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-0.6, -0.6, -0.529_150_262_212_918]];
        let sets = centres
            .iter()
            .enumerate()
            .map(|(i, c)| CoverSet::caps(format!("C{i}"), vec![Cap::new(UnitPoint::normalize(c.to_vec()).unwrap(), 0.9).unwrap()]))
            .collect();
        let cover = Cover::new(2, sets, vec![], None).unwrap();
        let u = UnitPoint::new(vec![phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos()]).unwrap();
        prop_assert_eq!(cover.sample_at(&u.antipode()).unwrap(), cover.sample_at(&u).unwrap().negate());
        match cover.chi_decompose(&u) {
            Ok(terms) => {
                prop_assert_eq!(terms[0].sample, cover.sample_at(&u).unwrap());
                for (i, y, v) in cover.chi_values(&u).unwrap() {
                    prop_assert!((reconstruct(&terms, i, y) - v).abs() <= 1e-12);
                }
            }
            Err(kfcl::Error::Uncovered) => prop_assert!(cover.sample_at(&u).unwrap().is_zero()),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

#[test]
fn grid_samples_are_antipodally_symmetric() {
    let sets = kfcl::sphere::regular_simplex(3)
        .into_iter()
        .enumerate()
        .map(|(i, v)| CoverSet::voronoi(format!("F{i}"), v))
        .collect();
    let cover = Cover::new(3, sets, vec![], None).unwrap();
    let grid = SphereGrid::symmetrized(3, 4000)
        .unwrap()
        .with_extra(cover.feature_points())
        .unwrap();
    assert!(grid.antipodes_consistent());
    for i in 0..grid.len() {
        let s = cover.sample_at(grid.point(i)).unwrap();
        assert!(s.is_realizable());
        assert_eq!(
            cover.sample_at(grid.point(grid.antipode_index(i))).unwrap(),
            s.negate()
        );
    }
    assert_ne!(
        Pattern::Zero,
        rho_single(
            &cover.sample_at(grid.point(0)).unwrap(),
            &LinearOrder::identity(5)
        )
        .unwrap()
    );
}
