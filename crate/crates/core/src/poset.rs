//! Order-theoretic core.
//!
//! * [`Pattern`] and [`PatternPoset`]: alternating patterns `[±k]` ordered by
//!   length, with `[k]` and `[-k]` incomparable.
//! * [`GridVector`] and [`Antichain`]: points of `ℕ^R` under the product order
//!   and the nonempty order ideals they generate.
//! * [`SignedAntichain`]: an antichain with a sign on each of its elements,
//!   ordered by strict ideal containment or equality.
//! * [`check_monotone`]: a generic monotonicity harness over supplied pairs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A sign in `{-1, +1}`. Serialized as the integer `1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidSample(format!(
                "sign must be 1 or -1, got {other}"
            ))),
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        Sign::from_value(v).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

/// An alternating pattern: `[0]` or `[±k]` for `k ≥ 1`.
///
/// Only patterns of length at least 2 belong to the pattern poset proper; the
/// degenerate values `[0]`, `[+1]` and `[-1]` are representable because the
/// single-order pattern map returns them for degenerate samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr", into = "PatternRepr")]
pub enum Pattern {
    Zero,
    Signed { sign: Sign, length: u32 },
}

#[derive(Serialize, Deserialize)]
struct PatternRepr {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    sign: Option<Sign>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    length: Option<u32>,
}

impl TryFrom<PatternRepr> for Pattern {
    type Error = Error;

    fn try_from(repr: PatternRepr) -> Result<Pattern> {
        match (repr.kind.as_str(), repr.sign, repr.length) {
            ("zero", None, None) => Ok(Pattern::Zero),
            ("signed", Some(sign), Some(length)) => Pattern::signed(sign, length),
            (kind, sign, length) => Err(Error::InvalidPattern(format!(
                "kind {kind:?} with sign {sign:?} and length {length:?}"
            ))),
        }
    }
}

impl From<Pattern> for PatternRepr {
    fn from(p: Pattern) -> PatternRepr {
        match p {
            Pattern::Zero => PatternRepr {
                kind: "zero".into(),
                sign: None,
                length: None,
            },
            Pattern::Signed { sign, length } => PatternRepr {
                kind: "signed".into(),
                sign: Some(sign),
                length: Some(length),
            },
        }
    }
}

impl Pattern {
    pub fn signed(sign: Sign, length: u32) -> Result<Pattern> {
        if length == 0 {
            return Err(Error::InvalidPattern(
                "signed pattern needs length >= 1".into(),
            ));
        }
        Ok(Pattern::Signed { sign, length })
    }

    /// `[k]` for positive `k`, `[-k]` for negative `k`, `[0]` for zero.
    pub fn from_signed_length(k: i64) -> Pattern {
        match k.cmp(&0) {
            Ordering::Equal => Pattern::Zero,
            Ordering::Greater => Pattern::Signed {
                sign: Sign::Plus,
                length: k as u32,
            },
            Ordering::Less => Pattern::Signed {
                sign: Sign::Minus,
                length: (-k) as u32,
            },
        }
    }

    pub fn length(&self) -> u32 {
        match self {
            Pattern::Zero => 0,
            Pattern::Signed { length, .. } => *length,
        }
    }

    pub fn sign(&self) -> Option<Sign> {
        match self {
            Pattern::Zero => None,
            Pattern::Signed { sign, .. } => Some(*sign),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.length() < 2
    }

    /// The mirror image `[k] ↦ [-k]`; `[0]` is fixed.
    pub fn mirror(&self) -> Pattern {
        match *self {
            Pattern::Zero => Pattern::Zero,
            Pattern::Signed { sign, length } => Pattern::Signed {
                sign: -sign,
                length,
            },
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Zero => write!(f, "[0]"),
            Pattern::Signed {
                sign: Sign::Plus,
                length,
            } => write!(f, "[{length}]"),
            Pattern::Signed {
                sign: Sign::Minus,
                length,
            } => write!(f, "[-{length}]"),
        }
    }
}

/// Partial order on patterns: `[σk] ≤ [τl]` iff `k < l`, or `k = l` and `σ = τ`.
///
/// `[0]` sits below everything and `[±1]` below every pattern of length at
/// least 2; `[+1]` and `[-1]` are incomparable.
pub fn pattern_leq(p: &Pattern, q: &Pattern) -> bool {
    p.length() < q.length() || p == q
}

/// Rank of `[±k]` in the pattern poset, which is `k - 2`.
pub fn pattern_rank(p: &Pattern) -> Result<u32> {
    if p.is_degenerate() {
        return Err(Error::DegeneratePattern(p.to_string()));
    }
    Ok(p.length() - 2)
}

/// The pattern poset truncated at length `m`: elements `[±2] … [±m]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternPoset {
    m: u32,
}

impl PatternPoset {
    pub fn new(m: u32) -> Result<PatternPoset> {
        if m < 2 {
            return Err(Error::InvalidPattern(format!(
                "pattern poset cap must be >= 2, got {m}"
            )));
        }
        Ok(PatternPoset { m })
    }

    pub fn cap(&self) -> u32 {
        self.m
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        (2..=self.m).contains(&p.length())
    }

    /// All elements, by increasing length, `+` before `-`.
    pub fn elements(&self) -> Vec<Pattern> {
        (2..=self.m)
            .flat_map(|k| [Sign::Plus, Sign::Minus].map(|sign| Pattern::Signed { sign, length: k }))
            .collect()
    }

    /// The elements covered by `p`: both patterns of length one less.
    pub fn lower_covers(&self, p: &Pattern) -> Vec<Pattern> {
        if !self.contains(p) || p.length() == 2 {
            return Vec::new();
        }
        let k = p.length() - 1;
        vec![
            Pattern::Signed {
                sign: Sign::Plus,
                length: k,
            },
            Pattern::Signed {
                sign: Sign::Minus,
                length: k,
            },
        ]
    }
}

// ---------------------------------------------------------------------------
// Grid vectors and antichains in ℕ^R
// ---------------------------------------------------------------------------

/// A point of `ℕ^R` with all coordinates at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct GridVector(Vec<u32>);

impl GridVector {
    pub fn new(coords: Vec<u32>) -> Result<GridVector> {
        if coords.is_empty() {
            return Err(Error::InvalidGridVector(
                "index set must be nonempty".into(),
            ));
        }
        if coords.contains(&0) {
            return Err(Error::InvalidGridVector(format!(
                "coordinates must be >= 1: {coords:?}"
            )));
        }
        Ok(GridVector(coords))
    }

    /// The all-ones vector, the least element of `ℕ^R`.
    pub fn ones(dim: usize) -> GridVector {
        GridVector(vec![1; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// Product order. Vectors of different dimension are never comparable.
    pub fn le(&self, other: &GridVector) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn product(&self) -> u128 {
        self.0.iter().map(|&c| u128::from(c)).product()
    }

    fn meet(&self, other: &GridVector) -> GridVector {
        GridVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }
}

impl<'de> Deserialize<'de> for GridVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        GridVector::new(Vec::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for GridVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Generators up to this count use inclusion-exclusion for ideal sizes.
const INCLUSION_EXCLUSION_LIMIT: usize = 8;

/// A nonempty antichain of `ℕ^R`, standing for the order ideal it generates.
///
/// Elements are kept in lexicographic order, which makes equality of
/// antichains coincide with equality of the generated ideals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Antichain {
    elements: Vec<GridVector>,
}

impl Antichain {
    /// Builds an antichain from pairwise incomparable points.
    pub fn new(points: Vec<GridVector>) -> Result<Antichain> {
        check_common_dim(&points)?;
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                if a.le(b) || b.le(a) {
                    return Err(Error::InvalidAntichain(format!(
                        "{a} and {b} are comparable"
                    )));
                }
            }
        }
        let mut elements = points;
        elements.sort();
        Ok(Antichain { elements })
    }

    /// The maximal elements of an arbitrary nonempty point set.
    pub fn maximal(points: &[GridVector]) -> Result<Antichain> {
        check_common_dim(points)?;
        let mut elements: Vec<GridVector> = points
            .iter()
            .filter(|&p| !points.iter().any(|q| p.le(q) && p != q))
            .cloned()
            .collect();
        elements.sort();
        elements.dedup();
        Ok(Antichain { elements })
    }

    pub fn singleton(v: GridVector) -> Antichain {
        Antichain { elements: vec![v] }
    }

    /// The antichain `{(1,…,1)}` of the minimal nonempty ideal.
    pub fn bottom(dim: usize) -> Antichain {
        Antichain::singleton(GridVector::ones(dim))
    }

    pub fn elements(&self) -> &[GridVector] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn is_bottom(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].coords().iter().all(|&c| c == 1)
    }

    /// Whether `v` lies in the ideal generated by this antichain.
    pub fn ideal_contains(&self, v: &GridVector) -> bool {
        self.elements.iter().any(|g| v.le(g))
    }

    /// Ideal containment: every generator of `self` lies below a generator of `other`.
    pub fn leq(&self, other: &Antichain) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.elements.iter().all(|a| other.ideal_contains(a)))
    }

    /// Per-coordinate maxima `h_r = max { x(r) : x ∈ a }`.
    pub fn heights(&self) -> GridVector {
        let dim = self.dim();
        GridVector(
            (0..dim)
                .map(|r| {
                    self.elements
                        .iter()
                        .map(|x| x.coords()[r])
                        .max()
                        .unwrap_or(1)
                })
                .collect(),
        )
    }

    /// Number of points in the generated order ideal.
    pub fn ideal_size(&self) -> u128 {
        if self.elements.len() <= INCLUSION_EXCLUSION_LIMIT {
            inclusion_exclusion_size(&self.elements)
        } else {
            let gens: Vec<&[u32]> = self.elements.iter().map(|g| g.coords()).collect();
            slice_count(&gens)
        }
    }

    /// Rank in the poset of nonempty ideals: `|ideal| - 1`.
    pub fn rank(&self) -> u128 {
        self.ideal_size() - 1
    }

    /// Explicit enumeration of the generated ideal, in lexicographic order.
    pub fn ideal_points(&self) -> Vec<GridVector> {
        let bound = self.heights();
        let mut out = Vec::new();
        let mut cur = vec![1u32; self.dim()];
        loop {
            let v = GridVector(cur.clone());
            if self.ideal_contains(&v) {
                out.push(v);
            }
            // odometer over the bounding box
            let mut i = cur.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < bound.coords()[i] {
                    cur[i] += 1;
                    for c in &mut cur[i + 1..] {
                        *c = 1;
                    }
                    break;
                }
            }
        }
    }
}

impl<'de> Deserialize<'de> for Antichain {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let points = Vec::<GridVector>::deserialize(deserializer)?;
        Antichain::new(points).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

fn check_common_dim(points: &[GridVector]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidAntichain("antichain must be nonempty".into()))?;
    let dim = first.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.dim(),
        });
    }
    Ok(dim)
}

/// `|⋃ ↓g|` as the alternating sum over nonempty subsets of generator meets.
fn inclusion_exclusion_size(gens: &[GridVector]) -> u128 {
    let n = gens.len();
    let mut total: i128 = 0;
    for mask in 1u32..(1 << n) {
        let mut meet: Option<GridVector> = None;
        for (i, g) in gens.iter().enumerate() {
            if mask & (1 << i) != 0 {
                meet = Some(match meet {
                    None => g.clone(),
                    Some(m) => m.meet(g),
                });
            }
        }
        let size = meet.map_or(0, |m| m.product()) as i128;
        if mask.count_ones() % 2 == 1 {
            total += size;
        } else {
            total -= size;
        }
    }
    total as u128
}

/// Counts the ideal slice by slice along the first coordinate.
fn slice_count(gens: &[&[u32]]) -> u128 {
    if gens.is_empty() {
        return 0;
    }
    if gens[0].len() == 1 {
        return u128::from(gens.iter().map(|g| g[0]).max().unwrap_or(0));
    }
    let top = gens.iter().map(|g| g[0]).max().unwrap_or(0);
    let mut total = 0u128;
    let mut x = 1;
    while x <= top {
        let rest: Vec<&[u32]> = gens.iter().filter(|g| g[0] >= x).map(|g| &g[1..]).collect();
        // the slice is constant until the next generator drops out
        let next = gens
            .iter()
            .map(|g| g[0])
            .filter(|&c| c >= x)
            .min()
            .unwrap_or(top);
        total += u128::from(next - x + 1) * slice_count(&rest);
        x = next + 1;
    }
    total
}

// ---------------------------------------------------------------------------
// Signed antichains
// ---------------------------------------------------------------------------

/// An antichain `a` together with a sign `f(x)` on each `x ∈ a`.
///
/// `(a, f) ≤ (b, g)` iff the ideal of `a` is strictly contained in that of
/// `b`, or `a = b` and `f = g`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SignedAntichainRepr")]
pub struct SignedAntichain {
    antichain: Antichain,
    signs: Vec<Sign>,
}

#[derive(Deserialize)]
struct SignedAntichainRepr {
    antichain: Antichain,
    signs: Vec<Sign>,
}

impl TryFrom<SignedAntichainRepr> for SignedAntichain {
    type Error = Error;

    fn try_from(r: SignedAntichainRepr) -> Result<SignedAntichain> {
        SignedAntichain::new(r.antichain, r.signs)
    }
}

impl SignedAntichain {
    /// `signs[i]` is the sign of `antichain.elements()[i]`.
    pub fn new(antichain: Antichain, signs: Vec<Sign>) -> Result<SignedAntichain> {
        if signs.len() != antichain.len() {
            return Err(Error::InvalidAntichain(format!(
                "{} signs for {} antichain elements",
                signs.len(),
                antichain.len()
            )));
        }
        Ok(SignedAntichain { antichain, signs })
    }

    /// Builds from `(point, sign)` pairs in any order.
    pub fn from_pairs(mut pairs: Vec<(GridVector, Sign)>) -> Result<SignedAntichain> {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let (points, signs): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        SignedAntichain::new(Antichain::new(points)?, signs)
    }

    pub fn antichain(&self) -> &Antichain {
        &self.antichain
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn sign_of(&self, x: &GridVector) -> Option<Sign> {
        self.antichain
            .elements()
            .iter()
            .position(|e| e == x)
            .map(|i| self.signs[i])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&GridVector, Sign)> {
        self.antichain
            .elements()
            .iter()
            .zip(self.signs.iter().copied())
    }

    pub fn leq(&self, other: &SignedAntichain) -> Result<bool> {
        if self.antichain == other.antichain {
            return Ok(self.signs == other.signs);
        }
        self.antichain.leq(&other.antichain)
    }

    /// The antipodality `(a, f) ↦ (a, -f)`.
    pub fn negate(&self) -> SignedAntichain {
        SignedAntichain {
            antichain: self.antichain.clone(),
            signs: self.signs.iter().map(|&s| -s).collect(),
        }
    }

    /// Rank in the full signed poset; equals the rank of the antichain.
    pub fn rank(&self) -> u128 {
        self.antichain.rank()
    }

    /// Rank in the poset with the two minimal elements `({(1,…,1)}, ±)`
    /// removed. `None` for those two elements.
    pub fn reduced_rank(&self) -> Option<u128> {
        if self.antichain.is_bottom() {
            None
        } else {
            Some(self.rank() - 1)
        }
    }
}

impl fmt::Display for SignedAntichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, s)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}{s}")?;
        }
        write!(f, "}}")
    }
}

// ---------------------------------------------------------------------------
// Monotonicity harness
// ---------------------------------------------------------------------------

/// A comparable source pair whose images are not comparable in the target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneViolation<T> {
    pub pair_index: usize,
    pub lower_image: T,
    pub upper_image: T,
}

/// Checks `map` on pairs `(lo, hi)` with `lo ≤ hi` in the source poset.
/// Returns every pair whose images fail `target_leq`; empty iff monotone on
/// the supplied pairs.
pub fn check_monotone<S, T, M, L>(
    pairs: &[(S, S)],
    map: M,
    target_leq: L,
) -> Vec<MonotoneViolation<T>>
where
    M: Fn(&S) -> T,
    L: Fn(&T, &T) -> bool,
{
    pairs
        .iter()
        .enumerate()
        .filter_map(|(pair_index, (lo, hi))| {
            let lower_image = map(lo);
            let upper_image = map(hi);
            (!target_leq(&lower_image, &upper_image)).then_some(MonotoneViolation {
                pair_index,
                lower_image,
                upper_image,
            })
        })
        .collect()
}
