//! The sharpness construction for several orders.
//!
//! `X = [m]^R`, where `R` is the lexicographically ordered set of direction
//! choices `r: [d] → {±1}` with `r(1) = +1`. Order `≤_i` compares two points
//! at their first differing coordinate `r`, reading that coordinate upwards
//! when `r(i) = +1` and downwards otherwise. No sequence of distinct points
//! is monotone in all `d` orders for more than `m` steps.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poset::Sign;
use crate::samples::SignFunction;

/// Largest `|X|` accepted by the dynamic program.
pub const DP_LIMIT: usize = 100_000;
/// Largest `|X|` cross-checked by exhaustive subset enumeration.
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharpnessInstance {
    d: usize,
    m: u32,
    directions: Vec<SignFunction>,
    elements: Vec<Vec<u32>>,
}

impl SharpnessInstance {
    pub fn new(d: usize, m: u32) -> Result<SharpnessInstance> {
        if d == 0 || m == 0 {
            return Err(Error::Config(format!(
                "sharpness needs d >= 1 and m >= 1, got d={d}, m={m}"
            )));
        }
        let directions = SignFunction::all(d)?;
        let size = (m as usize)
            .checked_pow(directions.len() as u32)
            .filter(|&n| n <= DP_LIMIT)
            .ok_or_else(|| {
                Error::SizeGuard(format!("|X| = {m}^{} exceeds {DP_LIMIT}", directions.len()))
            })?;
        let dim = directions.len();
        let mut elements = Vec::with_capacity(size);
        let mut cur = vec![1u32; dim];
        'outer: loop {
            elements.push(cur.clone());
            let mut k = dim;
            loop {
                if k == 0 {
                    break 'outer;
                }
                k -= 1;
                if cur[k] < m {
                    cur[k] += 1;
                    cur[k + 1..].iter_mut().for_each(|c| *c = 1);
                    break;
                }
            }
        }
        Ok(SharpnessInstance {
            d,
            m,
            directions,
            elements,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn directions(&self) -> &[SignFunction] {
        &self.directions
    }

    /// All of `[m]^R`, in plain lexicographic order.
    pub fn elements(&self) -> &[Vec<u32>] {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// `x` versus `y` in `≤_i` (0-based `i`).
    pub fn compare(&self, x: &[u32], y: &[u32], i: usize) -> Ordering {
        match x.iter().zip(y).position(|(a, b)| a != b) {
            None => Ordering::Equal,
            Some(k) => match self.directions[k].get(i) {
                Sign::Plus => x[k].cmp(&y[k]),
                Sign::Minus => y[k].cmp(&x[k]),
            },
        }
    }

    /// `x ≤_i y`; reflexive.
    pub fn order_leq(&self, x: &[u32], y: &[u32], i: usize) -> bool {
        self.compare(x, y, i) != Ordering::Greater
    }

    fn less_in(&self, x: &[u32], y: &[u32], i: usize, direction: Sign) -> bool {
        let c = self.compare(x, y, i);
        match direction {
            Sign::Plus => c == Ordering::Less,
            Sign::Minus => c == Ordering::Greater,
        }
    }

    /// Longest sequence of distinct points that is, for each `i`, entirely
    /// increasing or entirely decreasing in `≤_i`. All `2^d` direction
    /// choices are searched; the witness is the lexicographically least
    /// among maximal sequences.
    pub fn longest_common_monotone(&self) -> Result<CommonMonotone> {
        let mut best: Option<CommonMonotone> = None;
        for mask in 0u32..(1 << self.d) {
            let dirs: Vec<Sign> = (0..self.d)
                .map(|i| {
                    if mask & (1 << i) != 0 {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    }
                })
                .collect();
            let found = self.longest_in_directions(&dirs);
            best = match best {
                None => Some(found),
                Some(b)
                    if found.length > b.length
                        || (found.length == b.length && found.witness < b.witness) =>
                {
                    Some(found)
                }
                keep => keep,
            };
        }
        Ok(best.expect("at least one direction choice"))
    }

    fn longest_in_directions(&self, dirs: &[Sign]) -> CommonMonotone {
        let n = self.size();
        // every qualifying sequence is sorted by its first order
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| {
            let c = self.compare(&self.elements[a], &self.elements[b], 0);
            if dirs[0] == Sign::Plus {
                c
            } else {
                c.reverse()
            }
        });
        let step = |a: usize, b: usize| {
            (0..self.d).all(|i| self.less_in(&self.elements[a], &self.elements[b], i, dirs[i]))
        };
        // longest chain starting at each position
        let mut from = vec![1usize; n];
        for p in (0..n).rev() {
            for q in p + 1..n {
                if from[q] + 1 > from[p] && step(idx[p], idx[q]) {
                    from[p] = from[q] + 1;
                }
            }
        }
        let length = from.iter().copied().max().unwrap_or(0);
        let mut witness = Vec::with_capacity(length);
        let mut cur: Option<usize> = None;
        for need in (1..=length).rev() {
            let start = cur.map_or(0, |c| c + 1);
            let next = (start..n)
                .filter(|&q| from[q] == need && cur.is_none_or(|c| step(idx[c], idx[q])))
                .min_by(|&a, &b| self.elements[idx[a]].cmp(&self.elements[idx[b]]))
                .expect("a continuation exists by construction");
            witness.push(self.elements[idx[next]].clone());
            cur = Some(next);
        }
        CommonMonotone {
            length,
            witness,
            directions: dirs.to_vec(),
        }
    }

    /// Exhaustive cross-check for `|X| ≤ ENUMERATION_LIMIT`: every subset,
    /// sorted by `≤_1`, tested for monotonicity in each order.
    pub fn enumerate_longest(&self) -> Result<usize> {
        let n = self.size();
        if n > ENUMERATION_LIMIT {
            return Err(Error::SizeGuard(format!(
                "|X| = {n} exceeds enumeration limit {ENUMERATION_LIMIT}"
            )));
        }
        let mut sorted: Vec<&Vec<u32>> = self.elements.iter().collect();
        sorted.sort_by(|a, b| self.compare(a, b, 0));
        let mut best = 0;
        for mask in 1u32..(1 << n) {
            let seq: Vec<&Vec<u32>> = (0..n)
                .filter(|k| mask & (1 << k) != 0)
                .map(|k| sorted[k])
                .collect();
            let monotone = (0..self.d).all(|i| {
                let up = seq
                    .windows(2)
                    .all(|w| self.compare(w[0], w[1], i) == Ordering::Less);
                let down = seq
                    .windows(2)
                    .all(|w| self.compare(w[0], w[1], i) == Ordering::Greater);
                up || down
            });
            if monotone {
                best = best.max(seq.len());
            }
        }
        Ok(best)
    }

    pub fn report(&self) -> Result<SharpnessReport> {
        let found = self.longest_common_monotone()?;
        let cross_check = if self.size() <= ENUMERATION_LIMIT {
            Some(self.enumerate_longest()?)
        } else {
            None
        };
        if let Some(e) = cross_check {
            if e != found.length {
                return Err(Error::Config(format!(
                    "dynamic program found {} but enumeration found {e}",
                    found.length
                )));
            }
        }
        Ok(SharpnessReport {
            d: self.d,
            m: self.m,
            size: self.size(),
            longest: found.length,
            witness: found.witness,
            directions: found.directions,
            bound_m: self.m,
            enumeration_cross_check: cross_check,
            pass: found.length == self.m as usize,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonMonotone {
    pub length: usize,
    pub witness: Vec<Vec<u32>>,
    /// Whether the witness runs up (`+`) or down (`-`) in each order.
    pub directions: Vec<Sign>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub d: usize,
    pub m: u32,
    #[serde(rename = "|X|")]
    pub size: usize,
    pub longest: usize,
    pub witness: Vec<Vec<u32>>,
    pub directions: Vec<Sign>,
    pub bound_m: u32,
    pub enumeration_cross_check: Option<usize>,
    pub pass: bool,
}
