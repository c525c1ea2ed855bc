//! Brute-force oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use kfcl::poset::{pattern_leq, GridVector, Pattern, PatternPoset, Sign};
use kfcl::samples::{LinearOrder, Sample, SignFunction};

pub type Ideal = BTreeSet<Vec<u32>>;

/// Every nonempty finite order ideal of `{1, 2, …}^dim` with at most `max_size` points.
pub fn all_ideals(dim: usize, max_size: usize) -> Vec<Ideal> {
    let bottom: Ideal = [vec![1; dim]].into_iter().collect();
    let mut seen: BTreeSet<Ideal> = BTreeSet::new();
    let mut frontier = vec![bottom];
    while let Some(ideal) = frontier.pop() {
        if !seen.insert(ideal.clone()) {
            continue;
        }
        if ideal.len() == max_size {
            continue;
        }
        for p in addable(&ideal, dim) {
            let mut next = ideal.clone();
            next.insert(p);
            if !seen.contains(&next) {
                frontier.push(next);
            }
        }
    }
    seen.into_iter().collect()
}

/// Points outside the ideal all of whose lower neighbours lie inside.
fn addable(ideal: &Ideal, dim: usize) -> Vec<Vec<u32>> {
    let mut out = BTreeSet::new();
    for p in ideal {
        for k in 0..dim {
            let mut q = p.clone();
            q[k] += 1;
            if ideal.contains(&q) {
                continue;
            }
            let supported = (0..dim).all(|j| {
                if q[j] == 1 {
                    return true;
                }
                let mut r = q.clone();
                r[j] -= 1;
                ideal.contains(&r)
            });
            if supported {
                out.insert(q);
            }
        }
    }
    out.into_iter().collect()
}

/// Longest strict-inclusion chain from the bottom ideal to each ideal,
/// counted in steps, over the given (downward closed) family.
pub fn chain_lengths(ideals: &[Ideal]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ideals.len()).collect();
    order.sort_by_key(|&i| ideals[i].len());
    let mut best = vec![0usize; ideals.len()];
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[..a] {
            if ideals[j].len() < ideals[i].len() && ideals[j].is_subset(&ideals[i]) {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best
}

pub fn grid_vectors(ideal: &Ideal) -> Vec<GridVector> {
    ideal
        .iter()
        .map(|p| GridVector::new(p.clone()).unwrap())
        .collect()
}

/// Longest chain below `p` in `H_{2,m}`, counted in steps.
pub fn pattern_chain_rank(p: &Pattern, m: u32) -> usize {
    let poset = PatternPoset::new(m).unwrap();
    let elements = poset.elements();
    let below: Vec<&Pattern> = elements
        .iter()
        .filter(|q| pattern_leq(q, p) && *q != p)
        .collect();
    below
        .iter()
        .map(|q| pattern_chain_rank(q, m) + 1)
        .max()
        .unwrap_or(0)
}

/// All maximal alternating patterns along `order`, by subset enumeration.
pub fn brute_force_pattern_length(s: &Sample, order: &LinearOrder) -> u32 {
    let supp: Vec<usize> = order
        .sequence()
        .iter()
        .copied()
        .filter(|&i| s.get(i).is_some())
        .collect();
    let mut best = 0;
    for mask in 1u32..(1 << supp.len()) {
        let chain: Vec<usize> = (0..supp.len())
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| supp[k])
            .collect();
        if chain.windows(2).all(|w| s.get(w[0]) != s.get(w[1])) {
            best = best.max(chain.len() as u32);
        }
    }
    best
}

/// `ι_r` by enumerating every subset of the support as a candidate chain.
pub fn brute_force_iota(
    s: &Sample,
    orders: &[LinearOrder],
    r: &SignFunction,
) -> BTreeMap<usize, u32> {
    let supp = s.support();
    let mut best: BTreeMap<usize, u32> = supp.iter().map(|&f| (f, 1)).collect();
    for mask in 1u32..(1 << supp.len()) {
        let mut chain: Vec<usize> = (0..supp.len())
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| supp[k])
            .collect();
        chain.sort_by_key(|&f| orders[0].position(f));
        let ok = chain.windows(2).all(|w| {
            s.get(w[0]) != s.get(w[1])
                && orders.iter().enumerate().all(|(j, o)| match r.get(j) {
                    Sign::Plus => o.less(w[0], w[1]),
                    Sign::Minus => o.less(w[1], w[0]),
                })
        });
        if ok {
            let last = *chain.last().unwrap();
            let e = best.get_mut(&last).unwrap();
            *e = (*e).max(chain.len() as u32);
        }
    }
    best
}

/// The six-point two-order instance with alternating signs.
pub fn figure_three() -> (Sample, Vec<LinearOrder>) {
    let second_positions = [3usize, 1, 5, 2, 6, 4];
    let mut by_second: Vec<usize> = (0..6).collect();
    by_second.sort_by_key(|&i| second_positions[i]);
    let orders = vec![
        LinearOrder::identity(6),
        LinearOrder::new(by_second).unwrap(),
    ];
    let signs = [
        Sign::Plus,
        Sign::Minus,
        Sign::Plus,
        Sign::Minus,
        Sign::Plus,
        Sign::Minus,
    ];
    let pairs: Vec<(usize, Sign)> = signs.iter().copied().enumerate().collect();
    (Sample::from_pairs(6, &pairs).unwrap(), orders)
}
