//! Chains in the sharpness domain seen through the multi-order sample maps.

use kfcl::poset::Sign;
use kfcl::samples::{iota_table, LinearOrder, Sample};
use kfcl::sharpness::SharpnessInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The `d` orders of the instance as linear orders on element indices.
fn orders(inst: &SharpnessInstance) -> Vec<LinearOrder> {
    (0..inst.d())
        .map(|i| {
            let xs = inst.elements();
            let mut seq: Vec<usize> = (0..xs.len()).collect();
            seq.sort_by(|&a, &b| inst.compare(&xs[a], &xs[b], i));
            LinearOrder::new(seq).unwrap()
        })
        .collect()
}

#[test]
fn alternating_heights_never_exceed_m() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (d, m) in [(2, 3), (2, 5), (3, 2)] {
        let inst = SharpnessInstance::new(d, m).unwrap();
        let ords = orders(&inst);
        let n = inst.size();
        for _ in 0..300 {
            let signs: Vec<Option<Sign>> = (0..n)
                .map(|_| match rng.gen_range(0..3) {
                    0 => None,
                    1 => Some(Sign::Plus),
                    _ => Some(Sign::Minus),
                })
                .collect();
            let s = Sample::from_signs(&signs).unwrap();
            if s.is_zero() {
                continue;
            }
            let heights = iota_table(&s, &ords).unwrap().heights();
            assert!(
                heights.iter().all(|&h| h <= m),
                "d={d} m={m} heights {heights:?}"
            );
        }
    }
}

#[test]
fn witness_with_alternating_signs_attains_m() {
    for (d, m) in [(1, 5), (2, 2), (2, 3), (3, 2)] {
        let inst = SharpnessInstance::new(d, m).unwrap();
        let found = inst.longest_common_monotone().unwrap();
        assert_eq!(found.length, m as usize);
        let ords = orders(&inst);
        let pairs: Vec<(usize, Sign)> = found
            .witness
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let idx = inst.elements().iter().position(|y| y == x).unwrap();
                (idx, if k % 2 == 0 { Sign::Plus } else { Sign::Minus })
            })
            .collect();
        let s = Sample::from_pairs(inst.size(), &pairs).unwrap();
        let heights = iota_table(&s, &ords).unwrap().heights();
        assert_eq!(heights.iter().copied().max(), Some(m), "d={d} m={m}");
    }
}
