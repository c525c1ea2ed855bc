//! Samples over a finite index set and the pattern maps out of them.
//!
//! A [`Sample`] is a consistent partial assignment of signs to the sets of a
//! cover, stored as a pair of bitmasks. [`rho_single`] extracts the maximal
//! alternating pattern along one linear order; [`iota_multi`] and
//! [`rho_multi`] do the same along several orders at once, landing in the
//! signed-antichain poset.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::{Antichain, GridVector, Pattern, Sign, SignedAntichain};

/// Largest supported index set; samples are stored as 64-bit masks.
pub const MAX_INDICES: usize = 64;

/// Ordered, duplicate-free list of set names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct IndexSet {
    names: Vec<String>,
}

impl IndexSet {
    pub fn new(names: Vec<String>) -> Result<IndexSet> {
        if names.is_empty() {
            return Err(Error::InvalidIndexSet("index set must be nonempty".into()));
        }
        if names.len() > MAX_INDICES {
            return Err(Error::InvalidIndexSet(format!(
                "{} indices exceed the supported maximum of {MAX_INDICES}",
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidIndexSet(format!("duplicate name {n:?}")));
            }
        }
        Ok(IndexSet { names })
    }

    /// `F1, F2, …, Fn`.
    pub fn numbered(n: usize) -> Result<IndexSet> {
        IndexSet::new((1..=n).map(|i| format!("F{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidIndexSet(format!("unknown name {name:?}")))
    }
}

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

/// A consistent partial sign assignment on `0..len`.
///
/// Bit `i` of `plus` (resp. `minus`) is set when index `i` carries `+`
/// (resp. `-`); the two masks are disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sample {
    len: u8,
    plus: u64,
    minus: u64,
}

impl Sample {
    /// The sample with empty support.
    pub fn zero(len: usize) -> Sample {
        assert!(len <= MAX_INDICES);
        Sample {
            len: len as u8,
            plus: 0,
            minus: 0,
        }
    }

    pub fn from_masks(len: usize, plus: u64, minus: u64) -> Result<Sample> {
        if len > MAX_INDICES {
            return Err(Error::InvalidSample(format!(
                "{len} indices exceed {MAX_INDICES}"
            )));
        }
        let universe = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        if plus & minus != 0 {
            return Err(Error::InvalidSample("an index carries both signs".into()));
        }
        if (plus | minus) & !universe != 0 {
            return Err(Error::InvalidSample(
                "assignment outside the index set".into(),
            ));
        }
        Ok(Sample {
            len: len as u8,
            plus,
            minus,
        })
    }

    pub fn from_signs(signs: &[Option<Sign>]) -> Result<Sample> {
        let pairs: Vec<(usize, Sign)> = signs
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|s| (i, s)))
            .collect();
        Sample::from_pairs(signs.len(), &pairs)
    }

    pub fn from_pairs(len: usize, pairs: &[(usize, Sign)]) -> Result<Sample> {
        let mut s = Sample::zero(len.min(MAX_INDICES));
        if len > MAX_INDICES {
            return Err(Error::InvalidSample(format!(
                "{len} indices exceed {MAX_INDICES}"
            )));
        }
        for &(i, sign) in pairs {
            s = s.with(i, sign)?;
        }
        Ok(s)
    }

    /// Extends the sample by `i ↦ sign`.
    pub fn with(self, i: usize, sign: Sign) -> Result<Sample> {
        if i >= self.len() {
            return Err(Error::InvalidSample(format!(
                "index {i} outside 0..{}",
                self.len()
            )));
        }
        match self.get(i) {
            Some(existing) if existing != sign => Err(Error::InvalidSample(format!(
                "index {i} already carries {existing}"
            ))),
            _ => {
                let bit = 1u64 << i;
                Ok(match sign {
                    Sign::Plus => Sample {
                        plus: self.plus | bit,
                        ..self
                    },
                    Sign::Minus => Sample {
                        minus: self.minus | bit,
                        ..self
                    },
                })
            }
        }
    }

    pub fn len(&self) -> usize {
        usize::from(self.len)
    }

    /// True for samples over an empty index set.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn plus_mask(&self) -> u64 {
        self.plus
    }

    pub fn minus_mask(&self) -> u64 {
        self.minus
    }

    pub fn support_mask(&self) -> u64 {
        self.plus | self.minus
    }

    pub fn get(&self, i: usize) -> Option<Sign> {
        let bit = 1u64 << i;
        if self.plus & bit != 0 {
            Some(Sign::Plus)
        } else if self.minus & bit != 0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    /// Support indices in increasing order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.support_mask() & (1 << i) != 0)
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn is_zero(&self) -> bool {
        self.support_mask() == 0
    }

    /// Carries at least one `+` and at least one `-`.
    pub fn is_realizable(&self) -> bool {
        self.plus != 0 && self.minus != 0
    }

    /// Subsample order: `self` agrees with `other` wherever `self` is defined.
    pub fn leq(&self, other: &Sample) -> Result<bool> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self.plus & !other.plus == 0 && self.minus & !other.minus == 0)
    }

    pub fn negate(&self) -> Sample {
        Sample {
            len: self.len,
            plus: self.minus,
            minus: self.plus,
        }
    }

    /// Restriction to the indices in `mask`.
    pub fn restrict(&self, mask: u64) -> Sample {
        Sample {
            len: self.len,
            plus: self.plus & mask,
            minus: self.minus & mask,
        }
    }

    pub fn to_record(&self, indices: &IndexSet) -> SampleRecord {
        SampleRecord {
            indices: indices.names().to_vec(),
            signs: self
                .support()
                .into_iter()
                .map(|i| {
                    (
                        indices.name(i).to_string(),
                        self.get(i).expect("in support"),
                    )
                })
                .collect(),
        }
    }

    pub fn from_record(record: &SampleRecord) -> Result<(IndexSet, Sample)> {
        let indices = IndexSet::new(record.indices.clone())?;
        let pairs = record
            .signs
            .iter()
            .map(|(name, &sign)| Ok((indices.position(name)?, sign)))
            .collect::<Result<Vec<_>>>()?;
        let sample = Sample::from_pairs(indices.len(), &pairs)?;
        Ok((indices, sample))
    }

    /// Human-readable form such as `{F1:+, F3:-}`.
    pub fn describe(&self, indices: &IndexSet) -> String {
        let parts: Vec<String> = self
            .support()
            .into_iter()
            .map(|i| format!("{}:{}", indices.name(i), self.get(i).expect("in support")))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            let c = match self.get(i) {
                Some(Sign::Plus) => '+',
                Some(Sign::Minus) => '-',
                None => '*',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Serialized sample: `{"indices":[...], "signs":{name: ±1}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub indices: Vec<String>,
    pub signs: BTreeMap<String, Sign>,
}

// ---------------------------------------------------------------------------
// Linear orders and sign functions
// ---------------------------------------------------------------------------

/// A linear order on `0..n`, kept as both the sequence and its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearOrder {
    sequence: Vec<usize>,
    position: Vec<usize>,
}

impl LinearOrder {
    /// `sequence` lists the indices from smallest to largest.
    pub fn new(sequence: Vec<usize>) -> Result<LinearOrder> {
        let n = sequence.len();
        let mut position = vec![usize::MAX; n];
        for (rank, &i) in sequence.iter().enumerate() {
            if i >= n || position[i] != usize::MAX {
                return Err(Error::InvalidOrder(format!(
                    "{sequence:?} is not a permutation of 0..{n}"
                )));
            }
            position[i] = rank;
        }
        Ok(LinearOrder { sequence, position })
    }

    pub fn identity(n: usize) -> LinearOrder {
        LinearOrder::new((0..n).collect()).expect("identity permutation")
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LinearOrder {
        let mut seq: Vec<usize> = (0..n).collect();
        seq.shuffle(rng);
        LinearOrder::new(seq).expect("shuffled permutation")
    }

    pub fn from_names(indices: &IndexSet, names: &[String]) -> Result<LinearOrder> {
        if names.len() != indices.len() {
            return Err(Error::InvalidOrder(format!(
                "order lists {} names for {} sets",
                names.len(),
                indices.len()
            )));
        }
        let seq = names
            .iter()
            .map(|n| indices.position(n))
            .collect::<Result<Vec<_>>>()?;
        LinearOrder::new(seq)
    }

    pub fn names(&self, indices: &IndexSet) -> Vec<String> {
        self.sequence
            .iter()
            .map(|&i| indices.name(i).to_string())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn position(&self, i: usize) -> usize {
        self.position[i]
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    pub fn reversed(&self) -> LinearOrder {
        let mut seq = self.sequence.clone();
        seq.reverse();
        LinearOrder::new(seq).expect("reversal of a permutation")
    }
}

/// A direction choice `r: [d] → {±1}` with `r(1) = +1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignFunction {
    values: Vec<Sign>,
}

impl SignFunction {
    pub fn new(values: Vec<Sign>) -> Result<SignFunction> {
        match values.first() {
            None => Err(Error::InvalidSignFunction("d must be at least 1".into())),
            Some(Sign::Minus) => Err(Error::InvalidSignFunction("r(1) must be +1".into())),
            Some(Sign::Plus) => Ok(SignFunction { values }),
        }
    }

    /// All `2^(d-1)` sign functions, lexicographically with `+` before `-`.
    pub fn all(d: usize) -> Result<Vec<SignFunction>> {
        if d == 0 {
            return Err(Error::InvalidSignFunction("d must be at least 1".into()));
        }
        if d > 16 {
            return Err(Error::SizeGuard(format!(
                "d = {d} gives 2^{} direction choices",
                d - 1
            )));
        }
        Ok((0u32..(1 << (d - 1)))
            .map(|mask| {
                let mut values = vec![Sign::Plus];
                for j in (0..d - 1).rev() {
                    values.push(if mask & (1 << j) != 0 {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    });
                }
                SignFunction { values }
            })
            .collect())
    }

    pub fn d(&self) -> usize {
        self.values.len()
    }

    /// `r(j)` for 0-based `j`.
    pub fn get(&self, j: usize) -> Sign {
        self.values[j]
    }

    pub fn values(&self) -> &[Sign] {
        &self.values
    }
}

impl fmt::Display for SignFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.values {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Single-order pattern map
// ---------------------------------------------------------------------------

fn check_order(s: &Sample, order: &LinearOrder) -> Result<()> {
    if order.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: order.len(),
        });
    }
    Ok(())
}

/// Longest alternating chain along `order` whose first element carries
/// `first`. Greedy: take every support element whose sign is the one needed.
pub fn longest_alternating_from(
    s: &Sample,
    order: &LinearOrder,
    first: Sign,
) -> Result<Vec<usize>> {
    check_order(s, order)?;
    let mut want = first;
    let mut chain = Vec::new();
    for &i in order.sequence() {
        if s.get(i) == Some(want) {
            chain.push(i);
            want = -want;
        }
    }
    Ok(chain)
}

/// The maximal alternating pattern of `s` along `order`, with a witness chain.
pub fn rho_single_with_chain(s: &Sample, order: &LinearOrder) -> Result<(Pattern, Vec<usize>)> {
    check_order(s, order)?;
    let first = order.sequence().iter().find_map(|&i| s.get(i));
    match first {
        None => Ok((Pattern::Zero, Vec::new())),
        Some(sign) => {
            // One element per run of equal signs: starting anywhere else
            // loses the first run.
            let chain = longest_alternating_from(s, order, sign)?;
            Ok((Pattern::signed(sign, chain.len() as u32)?, chain))
        }
    }
}

/// The maximal alternating pattern witnessed by `s` along `order`.
///
/// `[0]` for the zero sample and `[±1]` for constant-sign samples.
pub fn rho_single(s: &Sample, order: &LinearOrder) -> Result<Pattern> {
    rho_single_with_chain(s, order).map(|(p, _)| p)
}

// ---------------------------------------------------------------------------
// Multi-order maps
// ---------------------------------------------------------------------------

fn check_orders(s: &Sample, orders: &[LinearOrder]) -> Result<()> {
    if orders.is_empty() {
        return Err(Error::InvalidOrder("at least one order is required".into()));
    }
    orders.iter().try_for_each(|o| check_order(s, o))
}

/// Whether `g` may precede `f` in a chain increasing in `≤_{r(j)·j}` for all `j`.
fn precedes(g: usize, f: usize, orders: &[LinearOrder], r: &SignFunction) -> bool {
    orders.iter().enumerate().all(|(j, o)| match r.get(j) {
        Sign::Plus => o.less(g, f),
        Sign::Minus => o.less(f, g),
    })
}

/// Dynamic program for `ι_r` over the support, processed in `≤_1` order.
/// Returns, per support element (in `≤_1` order), the length and the best
/// predecessor.
fn iota_dp(
    s: &Sample,
    orders: &[LinearOrder],
    r: &SignFunction,
) -> Vec<(usize, u32, Option<usize>)> {
    let seq: Vec<usize> = orders[0]
        .sequence()
        .iter()
        .copied()
        .filter(|&i| s.get(i).is_some())
        .collect();
    let mut out: Vec<(usize, u32, Option<usize>)> = Vec::with_capacity(seq.len());
    for &f in &seq {
        let sf = s.get(f);
        let mut best = (1u32, None);
        for &(g, len, _) in &out {
            if s.get(g) != sf && len + 1 > best.0 && precedes(g, f, orders, r) {
                best = (len + 1, Some(g));
            }
        }
        out.push((f, best.0, best.1));
    }
    out
}

fn check_multi(s: &Sample, orders: &[LinearOrder], r: &SignFunction) -> Result<()> {
    check_orders(s, orders)?;
    if r.d() != orders.len() {
        return Err(Error::DimensionMismatch {
            expected: orders.len(),
            found: r.d(),
        });
    }
    if s.is_zero() {
        return Err(Error::ZeroSample);
    }
    Ok(())
}

/// `ι_r(F)` for every `F` in the support: the longest alternating chain
/// ending at `F` that increases in `≤_j` where `r(j) = +` and decreases where
/// `r(j) = -`. Pairs are returned in increasing index order.
pub fn iota_multi(
    s: &Sample,
    orders: &[LinearOrder],
    r: &SignFunction,
) -> Result<Vec<(usize, u32)>> {
    check_multi(s, orders, r)?;
    let mut values: Vec<(usize, u32)> = iota_dp(s, orders, r)
        .into_iter()
        .map(|(f, l, _)| (f, l))
        .collect();
    values.sort_unstable();
    Ok(values)
}

/// A longest chain realizing `h_r = max_F ι_r(F)`, listed from first to last.
/// Ties go to the earliest endpoint in `≤_1`.
pub fn longest_monotone_chain(
    s: &Sample,
    orders: &[LinearOrder],
    r: &SignFunction,
) -> Result<Vec<usize>> {
    check_multi(s, orders, r)?;
    let dp = iota_dp(s, orders, r);
    let mut end = 0;
    for (k, entry) in dp.iter().enumerate() {
        if entry.1 > dp[end].1 {
            end = k;
        }
    }
    let mut chain = vec![dp[end].0];
    let mut prev = dp[end].2;
    while let Some(g) = prev {
        chain.push(g);
        prev = dp.iter().find(|e| e.0 == g).and_then(|e| e.2);
    }
    chain.reverse();
    Ok(chain)
}

/// `ι(F) = (ι_r(F))_{r ∈ R}` for every support element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IotaTable {
    /// Direction choices in lexicographic order; coordinate `k` of each
    /// vector belongs to `directions[k]`.
    #[serde(skip)]
    pub directions: Vec<SignFunction>,
    pub support: Vec<usize>,
    pub signs: Vec<Sign>,
    pub values: Vec<GridVector>,
}

impl IotaTable {
    pub fn value_of(&self, f: usize) -> Option<&GridVector> {
        self.support
            .iter()
            .position(|&g| g == f)
            .map(|k| &self.values[k])
    }

    /// `h_r` for each direction: the coordinatewise maximum over the support.
    pub fn heights(&self) -> Vec<u32> {
        let dim = self.directions.len();
        (0..dim)
            .map(|k| self.values.iter().map(|v| v.coords()[k]).max().unwrap_or(0))
            .collect()
    }
}

pub fn iota_table(s: &Sample, orders: &[LinearOrder]) -> Result<IotaTable> {
    check_orders(s, orders)?;
    if s.is_zero() {
        return Err(Error::ZeroSample);
    }
    let directions = SignFunction::all(orders.len())?;
    let support = s.support();
    let mut coords = vec![Vec::with_capacity(directions.len()); support.len()];
    for r in &directions {
        for (k, (_, v)) in iota_multi(s, orders, r)?.into_iter().enumerate() {
            coords[k].push(v);
        }
    }
    let values = coords
        .into_iter()
        .map(GridVector::new)
        .collect::<Result<Vec<_>>>()?;
    let signs = support
        .iter()
        .map(|&f| s.get(f).expect("in support"))
        .collect();
    Ok(IotaTable {
        directions,
        support,
        signs,
        values,
    })
}

/// First pair of opposite-sign support elements sharing an image, if any.
pub fn find_iota_collision(table: &IotaTable) -> Option<(usize, usize)> {
    for a in 0..table.support.len() {
        for b in a + 1..table.support.len() {
            if table.signs[a] != table.signs[b] && table.values[a] == table.values[b] {
                return Some((table.support[a], table.support[b]));
            }
        }
    }
    None
}

/// The multi-order pattern map: maximal elements of the image of `ι`,
/// each colored by the sign of a set mapping onto it.
pub fn rho_multi(s: &Sample, orders: &[LinearOrder]) -> Result<SignedAntichain> {
    check_orders(s, orders)?;
    if !s.is_realizable() {
        return Err(Error::NotRealizable);
    }
    let table = iota_table(s, orders)?;
    rho_from_table(&table)
}

/// Assembles the signed antichain from a precomputed `ι` table.
pub fn rho_from_table(table: &IotaTable) -> Result<SignedAntichain> {
    if let Some((first, second)) = find_iota_collision(table) {
        let image = table.value_of(first).expect("in support").coords().to_vec();
        return Err(Error::IotaCollision {
            first,
            second,
            image,
        });
    }
    let antichain = Antichain::maximal(&table.values)?;
    let signs = antichain
        .elements()
        .iter()
        .map(|x| {
            let k = table
                .values
                .iter()
                .position(|v| v == x)
                .expect("maximal element is an image");
            table.signs[k]
        })
        .collect();
    SignedAntichain::new(antichain, signs)
}

// ---------------------------------------------------------------------------
// Observations on witnessed patterns
// ---------------------------------------------------------------------------

/// One of the four elementary facts about witnessed alternating patterns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationCheck {
    pub name: &'static str,
    pub applicable: bool,
    pub pass: bool,
    pub witness_chains: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationReport {
    /// Longest alternating chain starting with `+`, i.e. the largest `k` with `[k]` witnessed.
    pub plus_length: u32,
    /// Largest `k` with `[-k]` witnessed.
    pub minus_length: u32,
    pub maximal_pattern: Pattern,
    pub checks: Vec<ObservationCheck>,
}

impl ObservationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Validates that `chain` is strictly increasing in `order` with signs
/// alternating from `first`.
pub fn is_alternating_chain(s: &Sample, order: &LinearOrder, chain: &[usize], first: Sign) -> bool {
    let mut want = first;
    for (k, &f) in chain.iter().enumerate() {
        if s.get(f) != Some(want) || (k > 0 && !order.less(chain[k - 1], f)) {
            return false;
        }
        want = -want;
    }
    true
}

/// Evaluates the four observations on `s` along `order`:
///
/// 1. a realizable sample witnesses `[2]` or `[-2]`;
/// 2. witnessing `[k]` or `[-k]` implies witnessing `[±l]` for `2 ≤ l < k`;
/// 3. witnessing both `[k]` and `[-k]` implies witnessing `[k+1]` or `[-(k+1)]`;
/// 4. if `s` witnesses `[k]` then `-s` witnesses `[-k]`.
pub fn observation_checks(s: &Sample, order: &LinearOrder) -> Result<ObservationReport> {
    let plus = longest_alternating_from(s, order, Sign::Plus)?;
    let minus = longest_alternating_from(s, order, Sign::Minus)?;
    let (lp, lm) = (plus.len() as u32, minus.len() as u32);
    let mut checks = Vec::with_capacity(4);

    let realizable = s.is_realizable();
    checks.push(ObservationCheck {
        name: "witnesses_two_or_minus_two",
        applicable: realizable,
        pass: !realizable || lp.max(lm) >= 2,
        witness_chains: vec![if lp >= lm {
            plus.clone()
        } else {
            minus.clone()
        }],
    });

    // Dropping the head of a chain flips its sign and shortens it by one;
    // prefixes keep the sign.
    let mut down_ok = true;
    let mut down_witness = Vec::new();
    for (chain, sign) in [(&plus, Sign::Plus), (&minus, Sign::Minus)] {
        if chain.len() >= 3 {
            let tail = &chain[1..];
            let other_len = if sign == Sign::Plus { lm } else { lp };
            down_ok &=
                is_alternating_chain(s, order, tail, -sign) && other_len as usize >= tail.len();
            down_witness.push(tail.to_vec());
        }
    }
    checks.push(ObservationCheck {
        name: "witnessed_patterns_downward_closed",
        applicable: lp.max(lm) >= 3,
        pass: down_ok,
        witness_chains: down_witness,
    });

    let both = lp.min(lm) >= 1;
    checks.push(ObservationCheck {
        name: "equal_lengths_extend",
        applicable: both,
        pass: !both || lp != lm,
        witness_chains: vec![if lp > lm { plus.clone() } else { minus.clone() }],
    });

    let neg = s.negate();
    let neg_minus = longest_alternating_from(&neg, order, Sign::Minus)?;
    let neg_plus = longest_alternating_from(&neg, order, Sign::Plus)?;
    let mirrored = neg_minus.len() as u32 == lp
        && neg_plus.len() as u32 == lm
        && is_alternating_chain(&neg, order, &plus, Sign::Minus)
        && is_alternating_chain(&neg, order, &minus, Sign::Plus);
    checks.push(ObservationCheck {
        name: "antipode_mirrors_pattern",
        applicable: true,
        pass: mirrored,
        witness_chains: vec![neg_minus, neg_plus],
    });

    Ok(ObservationReport {
        plus_length: lp,
        minus_length: lm,
        maximal_pattern: rho_single(s, order)?,
        checks,
    })
}

// ---------------------------------------------------------------------------
// Random generation for seeded property suites
// ---------------------------------------------------------------------------

/// A uniformly random sample on `len` indices (each index `+`, `-` or undefined).
pub fn random_sample<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Sample {
    let mut s = Sample::zero(len);
    for i in 0..len {
        match rng.gen_range(0..3) {
            0 => s = s.with(i, Sign::Plus).expect("fresh index"),
            1 => s = s.with(i, Sign::Minus).expect("fresh index"),
            _ => {}
        }
    }
    s
}

/// A random realizable sample on `len ≥ 2` indices.
pub fn random_realizable_sample<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Sample {
    assert!(len >= 2, "a realizable sample needs two indices");
    loop {
        let s = random_sample(len, rng);
        if s.is_realizable() {
            return s;
        }
    }
}

/// A random realizable subsample of a realizable `s`.
pub fn random_realizable_subsample<R: Rng + ?Sized>(s: &Sample, rng: &mut R) -> Sample {
    assert!(s.is_realizable());
    loop {
        let mask: u64 = rng.gen();
        let t = s.restrict(mask);
        if t.is_realizable() {
            return t;
        }
    }
}

/// All `3^len` samples on `len` indices, zero first.
pub fn all_samples(len: usize) -> Vec<Sample> {
    let mut out = vec![Sample::zero(len)];
    for i in 0..len {
        let mut next = Vec::with_capacity(out.len() * 3);
        for s in &out {
            next.push(*s);
            next.push(s.with(i, Sign::Plus).expect("fresh index"));
            next.push(s.with(i, Sign::Minus).expect("fresh index"));
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{pattern_leq, GridVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P: Sign = Sign::Plus;
    const M: Sign = Sign::Minus;

    fn sample(len: usize, pairs: &[(usize, Sign)]) -> Sample {
        Sample::from_pairs(len, pairs).unwrap()
    }

    /// Brute force over every subset of the support: the longest alternating
    /// chain in `order`, with its first sign. Returns every maximum found.
    fn brute_force_patterns(s: &Sample, order: &LinearOrder) -> Vec<Pattern> {
        let supp: Vec<usize> = order
            .sequence()
            .iter()
            .copied()
            .filter(|&i| s.get(i).is_some())
            .collect();
        let mut best = 0usize;
        let mut found = Vec::new();
        for mask in 1u32..(1 << supp.len()) {
            let chain: Vec<usize> = (0..supp.len())
                .filter(|k| mask & (1 << k) != 0)
                .map(|k| supp[k])
                .collect();
            let alternates = chain.windows(2).all(|w| s.get(w[0]) != s.get(w[1]));
            if !alternates {
                continue;
            }
            let p = Pattern::signed(s.get(chain[0]).unwrap(), chain.len() as u32).unwrap();
            if chain.len() > best {
                best = chain.len();
                found = vec![p];
            } else if chain.len() == best && !found.contains(&p) {
                found.push(p);
            }
        }
        if found.is_empty() {
            vec![Pattern::Zero]
        } else {
            found
        }
    }

    /// Brute-force `ι_r` by enumerating all subsets of the support as chains.
    fn brute_force_iota(s: &Sample, orders: &[LinearOrder], r: &SignFunction) -> Vec<(usize, u32)> {
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
        best.into_iter().collect()
    }

    #[test]
    fn subsample_order_examples() {
        let a = sample(3, &[(0, P)]);
        assert!(a.leq(&sample(3, &[(0, P), (1, M)])).unwrap());
        assert!(!a.leq(&sample(3, &[(0, M), (1, M)])).unwrap());
        assert!(Sample::zero(3).leq(&a).unwrap());
        assert!(Sample::zero(3).leq(&Sample::zero(3)).unwrap());
        assert!(matches!(
            a.leq(&Sample::zero(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn negate_examples() {
        let s = sample(3, &[(0, P), (2, M)]);
        assert_eq!(s.negate(), sample(3, &[(0, M), (2, P)]));
        assert_eq!(s.negate().support(), s.support());
        assert_eq!(Sample::zero(5).negate(), Sample::zero(5));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let s = random_sample(12, &mut rng);
            assert_eq!(s.negate().negate(), s);
        }
    }

    #[test]
    fn consistency_is_enforced() {
        assert!(Sample::from_pairs(3, &[(0, P), (0, M)]).is_err());
        assert!(Sample::from_pairs(3, &[(3, P)]).is_err());
        assert!(Sample::from_masks(3, 0b1, 0b1).is_err());
        assert!(Sample::from_masks(3, 0b1000, 0).is_err());
        assert!(Sample::from_pairs(65, &[]).is_err());
        assert!(IndexSet::new(vec!["A".into(), "A".into()]).is_err());
        assert!(IndexSet::new(vec![]).is_err());
    }

    #[test]
    fn sample_record_shape() {
        let idx = IndexSet::new(vec!["A".into(), "B".into(), "C".into()]).unwrap();
        let s = sample(3, &[(0, P), (2, M)]);
        let text = serde_json::to_string(&s.to_record(&idx)).unwrap();
        assert_eq!(text, r#"{"indices":["A","B","C"],"signs":{"A":1,"C":-1}}"#);
        let rec: SampleRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(Sample::from_record(&rec).unwrap(), (idx, s));
        let bad: SampleRecord =
            serde_json::from_str(r#"{"indices":["A"],"signs":{"Z":1}}"#).unwrap();
        assert!(Sample::from_record(&bad).is_err());
    }

    #[test]
    fn linear_order_validation() {
        assert!(LinearOrder::new(vec![0, 2, 1]).is_ok());
        assert!(LinearOrder::new(vec![0, 0, 1]).is_err());
        assert!(LinearOrder::new(vec![0, 3, 1]).is_err());
        let o = LinearOrder::new(vec![2, 0, 1]).unwrap();
        assert!(o.less(2, 0) && o.less(0, 1) && !o.less(1, 2));
        assert_eq!(o.reversed().sequence(), &[1, 0, 2]);
        let idx = IndexSet::numbered(3).unwrap();
        assert_eq!(o.names(&idx), vec!["F3", "F1", "F2"]);
        assert_eq!(LinearOrder::from_names(&idx, &o.names(&idx)).unwrap(), o);
    }

    #[test]
    fn sign_functions_enumerate_lexicographically() {
        let r = SignFunction::all(3).unwrap();
        let shown: Vec<String> = r.iter().map(|r| r.to_string()).collect();
        assert_eq!(shown, vec!["+++", "++-", "+-+", "+--"]);
        assert_eq!(SignFunction::all(1).unwrap().len(), 1);
        assert!(SignFunction::new(vec![M, P]).is_err());
        assert!(SignFunction::all(0).is_err());
    }

    #[test]
    fn rho_single_examples() {
        let abc = LinearOrder::identity(3);
        assert_eq!(
            rho_single(&sample(3, &[(0, P), (1, M), (2, P)]), &abc).unwrap(),
            Pattern::from_signed_length(3)
        );
        let s = sample(3, &[(0, M), (1, M), (2, P)]);
        assert_eq!(
            rho_single(&s, &abc).unwrap(),
            Pattern::from_signed_length(-2)
        );
        assert_eq!(
            brute_force_patterns(&s, &abc),
            vec![Pattern::from_signed_length(-2)]
        );
        let all_plus = sample(5, &[(0, P), (1, P), (2, P), (3, P), (4, P)]);
        assert_eq!(
            rho_single(&all_plus, &LinearOrder::identity(5)).unwrap(),
            Pattern::from_signed_length(1)
        );
        assert_eq!(
            rho_single(&Sample::zero(4), &LinearOrder::identity(4)).unwrap(),
            Pattern::Zero
        );
        assert!(rho_single(&s, &LinearOrder::identity(4)).is_err());
    }

    #[test]
    fn rho_single_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let s = random_sample(9, &mut rng);
            let order = LinearOrder::random(9, &mut rng);
            let (p, chain) = rho_single_with_chain(&s, &order).unwrap();
            // the maximum is unique
            assert_eq!(brute_force_patterns(&s, &order), vec![p]);
            if let Some(sign) = p.sign() {
                assert!(is_alternating_chain(&s, &order, &chain, sign));
                assert_eq!(chain.len() as u32, p.length());
            }
        }
    }

    #[test]
    fn rho_single_is_monotone_and_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let hi = random_sample(10, &mut rng);
            let lo = hi.restrict(rng.gen());
            let order = LinearOrder::random(10, &mut rng);
            let (plo, phi) = (
                rho_single(&lo, &order).unwrap(),
                rho_single(&hi, &order).unwrap(),
            );
            assert!(pattern_leq(&plo, &phi), "{lo} <= {hi} but {plo} !<= {phi}");
            assert_eq!(rho_single(&hi.negate(), &order).unwrap(), phi.mirror());
        }
    }

    /// Fig. 3 of the two-order construction: six sets at (≤1, ≤2) positions
    /// (1,3),(2,1),(3,5),(4,2),(5,6),(6,4), alternately white (+) and black (-).
    fn figure_three() -> (Sample, Vec<LinearOrder>) {
        let second_positions = [3usize, 1, 5, 2, 6, 4];
        let mut by_second: Vec<usize> = (0..6).collect();
        by_second.sort_by_key(|&i| second_positions[i]);
        let orders = vec![
            LinearOrder::identity(6),
            LinearOrder::new(by_second).unwrap(),
        ];
        let s = sample(6, &[(0, P), (1, M), (2, P), (3, M), (4, P), (5, M)]);
        (s, orders)
    }

    #[test]
    fn iota_on_figure_three() {
        let (s, orders) = figure_three();
        let table = iota_table(&s, &orders).unwrap();
        let expected: Vec<GridVector> = [[1, 1], [1, 2], [2, 1], [1, 2], [2, 1], [2, 2]]
            .iter()
            .map(|c| GridVector::new(c.to_vec()).unwrap())
            .collect();
        assert_eq!(table.values, expected);
        let rho = rho_multi(&s, &orders).unwrap();
        assert_eq!(rho.to_string(), "{(2,2)-}");
        assert_eq!(table.heights(), vec![2, 2]);
    }

    #[test]
    fn iota_singleton_and_errors() {
        let orders = vec![
            LinearOrder::identity(4),
            LinearOrder::identity(4).reversed(),
        ];
        let s = sample(4, &[(2, M)]);
        for r in SignFunction::all(2).unwrap() {
            assert_eq!(iota_multi(&s, &orders, &r).unwrap(), vec![(2, 1)]);
        }
        let r = &SignFunction::all(2).unwrap()[0];
        assert_eq!(
            iota_multi(&Sample::zero(4), &orders, r),
            Err(Error::ZeroSample)
        );
        assert!(iota_multi(&s, &orders[..1], r).is_err());
        assert_eq!(rho_multi(&s, &orders), Err(Error::NotRealizable));
    }

    #[test]
    fn rho_multi_two_point_instance() {
        // A:+ then B:- in both orders; brute-force ι gives A ↦ (1,1), B ↦ (2,1).
        let orders = vec![LinearOrder::identity(2), LinearOrder::identity(2)];
        let s = sample(2, &[(0, P), (1, M)]);
        let r = SignFunction::all(2).unwrap();
        assert_eq!(brute_force_iota(&s, &orders, &r[0]), vec![(0, 1), (1, 2)]);
        assert_eq!(brute_force_iota(&s, &orders, &r[1]), vec![(0, 1), (1, 1)]);
        assert_eq!(rho_multi(&s, &orders).unwrap().to_string(), "{(2,1)-}");
    }

    #[test]
    fn iota_dp_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for d in 1..=3 {
            for _ in 0..300 {
                let n = rng.gen_range(1..=10);
                let s = random_sample(n, &mut rng);
                if s.is_zero() {
                    continue;
                }
                let orders: Vec<LinearOrder> =
                    (0..d).map(|_| LinearOrder::random(n, &mut rng)).collect();
                for r in SignFunction::all(d).unwrap() {
                    assert_eq!(
                        iota_multi(&s, &orders, &r).unwrap(),
                        brute_force_iota(&s, &orders, &r)
                    );
                    let chain = longest_monotone_chain(&s, &orders, &r).unwrap();
                    let h = iota_multi(&s, &orders, &r)
                        .unwrap()
                        .iter()
                        .map(|x| x.1)
                        .max()
                        .unwrap();
                    assert_eq!(chain.len() as u32, h);
                    assert!(chain.windows(2).all(|w| s.get(w[0]) != s.get(w[1])));
                }
            }
        }
    }

    #[test]
    fn one_order_iota_matches_rho_single() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..2000 {
            let s = random_sample(8, &mut rng);
            if s.is_zero() {
                continue;
            }
            let order = LinearOrder::random(8, &mut rng);
            let h = iota_table(&s, std::slice::from_ref(&order))
                .unwrap()
                .heights()[0];
            assert_eq!(h, rho_single(&s, &order).unwrap().length());
        }
    }

    #[test]
    fn observations_hold_and_report_shape() {
        let order = LinearOrder::identity(4);
        let s = sample(4, &[(0, P), (1, M), (3, M)]);
        let report = observation_checks(&s, &order).unwrap();
        assert_eq!((report.plus_length, report.minus_length), (2, 1));
        assert!(report.all_pass());
        assert_eq!(report.checks.len(), 4);
        let mirrored = observation_checks(&s.negate(), &order).unwrap();
        assert_eq!(mirrored.maximal_pattern, report.maximal_pattern.mirror());

        let zero = observation_checks(&Sample::zero(4), &order).unwrap();
        assert!(zero.all_pass());
        assert!(!zero.checks[0].applicable);
    }

    #[test]
    fn enumeration_of_all_samples() {
        let all = all_samples(3);
        assert_eq!(all.len(), 27);
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 27);
    }
}
