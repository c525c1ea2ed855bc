use kfcl::harness::{builtin_cover, caps_random};
use kfcl::samples::Sample;
use kfcl::sphere::{
    calibrate_epsilon, check_antipodal_free, check_coverage, compute_realized_samples,
    epsilon_claim_failures, is_in_interval_closure, witness_search, SearchMode, SphereGrid,
};
use kfcl::sphere::{Cap, Cover, CoverSet, UnitPoint};

#[test]
fn smoothed_supports_sit_below_realized_samples_on_circle() {
    for name in ["caps-demo-s1", "caps-random:1,4,7"] {
        let cover = builtin_cover(name).unwrap();
        let grid = SphereGrid::circle(3600)
            .unwrap()
            .with_extra(cover.feature_points())
            .unwrap();
        assert!(
            epsilon_claim_failures(&cover, &grid).unwrap().is_empty(),
            "{name}"
        );
    }
}

#[test]
fn calibration_shrinks_epsilon_until_supports_fit() {
    let cover = builtin_cover("caps-random:1,5,3").unwrap();
    let grid = SphereGrid::circle(3600)
        .unwrap()
        .with_extra(cover.feature_points())
        .unwrap();
    assert!(!epsilon_claim_failures(&cover, &grid).unwrap().is_empty());
    let (calibrated, eps) = calibrate_epsilon(&cover, &grid).unwrap();
    assert!(eps < cover.epsilon().unwrap());
    assert!(epsilon_claim_failures(&calibrated, &grid)
        .unwrap()
        .is_empty());
    let demo = builtin_cover("caps-demo-s1").unwrap();
    assert_eq!(
        calibrate_epsilon(&demo, &grid).unwrap().1,
        demo.epsilon().unwrap()
    );
}

/// Caps of radius 1 around `±e_1, ±e_2, ±e_3`.
fn octahedral_caps() -> Cover {
    let sets = (0..3)
        .flat_map(|axis| {
            [(1.0, "+"), (-1.0, "-")].map(|(sign, tag)| {
                let mut c = vec![0.0; 3];
                c[axis] = sign;
                CoverSet::caps(
                    format!("{}{tag}", ["X", "Y", "Z"][axis]),
                    vec![Cap::new(UnitPoint::new(c).unwrap(), 1.0).unwrap()],
                )
            })
        })
        .collect();
    Cover::new(2, sets, vec![], None).unwrap()
}

#[test]
fn smoothed_supports_spot_check_on_two_sphere() {
    let cover = octahedral_caps();
    assert!((cover.epsilon().unwrap() - (std::f64::consts::PI - 2.0) / 4.0).abs() < 1e-12);
    let grid = SphereGrid::symmetrized(2, 20_000).unwrap();
    assert!(check_antipodal_free(&cover).pass);
    assert!(check_coverage(&cover, &grid).unwrap().pass);
    let failures = epsilon_claim_failures(&cover, &grid).unwrap();
    assert!(failures.is_empty(), "{} failures", failures.len());
    let (report, _) = witness_search(&cover, &grid, SearchMode::SingleOrder(0)).unwrap();
    assert!(report.all_points_realizable);
    assert!(report.pass);
}

#[test]
fn random_caps_are_valid_covers() {
    let (cover, attempts) = caps_random(1, 4, 7).unwrap();
    assert!(attempts >= 1);
    assert!(check_antipodal_free(&cover).pass);
    assert!(
        check_coverage(&cover, &SphereGrid::circle(3600).unwrap())
            .unwrap()
            .pass
    );
}

#[test]
fn realized_samples_of_demo_cover() {
    let cover = builtin_cover("caps-demo-s1").unwrap();
    let grid = SphereGrid::circle(3600).unwrap();
    let realized = compute_realized_samples(&cover, &grid).unwrap();
    for s in &realized {
        assert!(realized.contains(&s.negate()));
        assert!(is_in_interval_closure(s, &realized));
    }
    // at 90° only A holds and -u lies in B and C
    let between = Sample::from_pairs(3, &[(0, kfcl::Sign::Plus), (1, kfcl::Sign::Minus)]).unwrap();
    assert!(is_in_interval_closure(&between, &realized));
}

#[test]
fn simplex_witnesses_reach_n_plus_two() {
    for (n, points) in [(1, 3600), (2, 20_000), (3, 20_000)] {
        let cover = builtin_cover(&format!("simplex-voronoi:{n}")).unwrap();
        let grid = SphereGrid::symmetrized(n, points)
            .unwrap()
            .with_extra(cover.feature_points())
            .unwrap();
        let (report, _) = witness_search(&cover, &grid, SearchMode::SingleOrder(0)).unwrap();
        assert!(report.achieved as usize >= n + 2, "n = {n}");
        assert!(report.rank_pass);
    }
}
