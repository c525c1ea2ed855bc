//! Discretized spheres and closed antipodal-free covers.
//!
//! A [`SphereGrid`] is a finite, antipode-closed point set on `S^n` whose
//! antipode map is an exact, constructed involution. A [`Cover`] is a list of
//! named closed sets, each either a union of geodesic caps or a Voronoi cell
//! of a vertex family, together with one or more linear orders on the names.
//!
//! On top of these, this module extracts per-point samples, evaluates the
//! ε-smoothed membership function `χ_u` and its layer-cake decomposition,
//! computes realized sample sets and searches grids for high witnesses.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::poset::{pattern_rank, Pattern, Sign, SignedAntichain};
use crate::samples::{
    iota_table, rho_from_table, rho_single_with_chain, IndexSet, LinearOrder, Sample,
};

/// Slack for closed-set membership tests and unit-norm checks.
pub const TOLERANCE: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Points and grids
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitPoint(Vec<f64>);

impl UnitPoint {
    pub fn new(coords: Vec<f64>) -> Result<UnitPoint> {
        if coords.len() < 2 {
            return Err(Error::InvalidPoint(format!(
                "need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!(
                "non-finite coordinates {coords:?}"
            )));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidPoint(format!("norm {norm} is not 1")));
        }
        Ok(UnitPoint(coords))
    }

    /// Scales a nonzero vector onto the sphere.
    pub fn normalize(coords: Vec<f64>) -> Result<UnitPoint> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidPoint(format!("cannot normalize {coords:?}")));
        }
        UnitPoint::new(coords.into_iter().map(|c| c / norm).collect())
    }

    pub fn on_circle(angle: f64) -> UnitPoint {
        UnitPoint(vec![angle.cos(), angle.sin()])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// The `n` of `S^n` this point lives on.
    pub fn sphere_dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn dot(&self, other: &UnitPoint) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn antipode(&self) -> UnitPoint {
        UnitPoint(self.0.iter().map(|c| -c).collect())
    }

    pub fn scaled(&self, y: Sign) -> UnitPoint {
        match y {
            Sign::Plus => self.clone(),
            Sign::Minus => self.antipode(),
        }
    }

    /// Geodesic distance.
    pub fn angle_to(&self, other: &UnitPoint) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

impl<'de> Deserialize<'de> for UnitPoint {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        UnitPoint::new(Vec::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

/// An antipode-closed point set on `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    n: usize,
    points: Vec<UnitPoint>,
    antipode: Vec<usize>,
}

impl SphereGrid {
    /// Builds a grid from base points; each is followed in the antipode map
    /// by its exact negation, stored in the second half.
    pub fn from_base(n: usize, base: Vec<UnitPoint>) -> Result<SphereGrid> {
        if let Some(p) = base.iter().find(|p| p.sphere_dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: p.coords().len(),
            });
        }
        let half = base.len();
        let mut points = base;
        let negations: Vec<UnitPoint> = points.iter().map(UnitPoint::antipode).collect();
        points.extend(negations);
        let antipode = (0..2 * half).map(|i| (i + half) % (2 * half)).collect();
        Ok(SphereGrid {
            n,
            points,
            antipode,
        })
    }

    /// Uniform angular grid on `S^1`; `count` must be even.
    pub fn circle(count: usize) -> Result<SphereGrid> {
        if count < 2 || !count.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "circle grid needs an even point count >= 2, got {count}"
            )));
        }
        let base = (0..count / 2)
            .map(|k| UnitPoint::on_circle(2.0 * PI * k as f64 / count as f64))
            .collect();
        SphereGrid::from_base(1, base)
    }

    /// `count` points on `S^n`: half taken from an additive-recurrence
    /// low-discrepancy sequence pushed through the Gaussian map, half their
    /// negations. For `n = 1` this is the uniform circle grid.
    pub fn symmetrized(n: usize, count: usize) -> Result<SphereGrid> {
        if n == 0 {
            return Err(Error::Config("sphere dimension must be at least 1".into()));
        }
        if n == 1 {
            return SphereGrid::circle(count);
        }
        if count < 2 || !count.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "symmetrized grid needs an even point count >= 2, got {count}"
            )));
        }
        let dim = n + 1;
        // φ with φ^(dim+1) = φ + 1; step α_j = φ^-(j+1)
        let mut phi = 2.0f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
        }
        let alpha: Vec<f64> = (1..=dim).map(|j| phi.powi(-(j as i32))).collect();
        let normal = Normal::standard();
        let mut base = Vec::with_capacity(count / 2);
        let mut k = 1u64;
        while base.len() < count / 2 {
            let v: Vec<f64> = alpha
                .iter()
                .map(|a| {
                    let t = (0.5 + k as f64 * a).fract().clamp(1e-12, 1.0 - 1e-12);
                    normal.inverse_cdf(t)
                })
                .collect();
            k += 1;
            if let Ok(p) = UnitPoint::normalize(v) {
                base.push(p);
            }
        }
        SphereGrid::from_base(n, base)
    }

    /// Appends extra points, each paired with its exact negation.
    pub fn with_extra(self, extra: Vec<UnitPoint>) -> Result<SphereGrid> {
        if let Some(p) = extra.iter().find(|p| p.sphere_dim() != self.n) {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                found: p.coords().len(),
            });
        }
        let SphereGrid {
            n,
            mut points,
            mut antipode,
        } = self;
        for p in extra {
            let i = points.len();
            points.push(p.antipode());
            points.push(p);
            antipode.push(i + 1);
            antipode.push(i);
        }
        Ok(SphereGrid {
            n,
            points,
            antipode,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[UnitPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &UnitPoint {
        &self.points[i]
    }

    pub fn antipode_index(&self, i: usize) -> usize {
        self.antipode[i]
    }

    /// The antipode map is a fixed-point-free involution matching exact negation.
    pub fn antipodes_consistent(&self) -> bool {
        (0..self.len()).all(|i| {
            let j = self.antipode[i];
            j != i
                && self.antipode[j] == i
                && self.points[i]
                    .coords()
                    .iter()
                    .zip(self.points[j].coords())
                    .all(|(a, b)| *a == -*b)
        })
    }
}

// ---------------------------------------------------------------------------
// Covers
// ---------------------------------------------------------------------------

/// A closed geodesic cap `{u : angle(u, center) ≤ radius}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: UnitPoint,
    pub radius: f64,
}

impl Cap {
    pub fn new(center: UnitPoint, radius: f64) -> Result<Cap> {
        if !(0.0..=PI).contains(&radius) {
            return Err(Error::InvalidCover(format!(
                "cap radius {radius} outside [0, pi]"
            )));
        }
        Ok(Cap { center, radius })
    }

    pub fn contains(&self, u: &UnitPoint) -> bool {
        u.dot(&self.center) >= self.radius.cos() - TOLERANCE
    }

    pub fn distance(&self, u: &UnitPoint) -> f64 {
        if self.contains(u) {
            0.0
        } else {
            (u.angle_to(&self.center) - self.radius).max(0.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Caps(Vec<Cap>),
    /// Cell of this vertex in the Voronoi diagram of all Voronoi vertices of
    /// the cover: points whose inner product with it is maximal.
    Voronoi(UnitPoint),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverSet {
    pub name: String,
    pub geometry: Geometry,
}

impl CoverSet {
    pub fn caps(name: impl Into<String>, caps: Vec<Cap>) -> CoverSet {
        CoverSet {
            name: name.into(),
            geometry: Geometry::Caps(caps),
        }
    }

    pub fn voronoi(name: impl Into<String>, vertex: UnitPoint) -> CoverSet {
        CoverSet {
            name: name.into(),
            geometry: Geometry::Voronoi(vertex),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    n: usize,
    sets: Vec<CoverSet>,
    indices: IndexSet,
    orders: Vec<LinearOrder>,
    epsilon: Option<f64>,
    voronoi: Vec<UnitPoint>,
}

impl Cover {
    /// Validates names and dimensions. Without orders the listing order is
    /// used; without `epsilon` cap-only covers get a quarter of their
    /// smallest antipodal gap.
    pub fn new(
        n: usize,
        sets: Vec<CoverSet>,
        orders: Vec<LinearOrder>,
        epsilon: Option<f64>,
    ) -> Result<Cover> {
        if n == 0 {
            return Err(Error::InvalidCover(
                "sphere dimension must be at least 1".into(),
            ));
        }
        let indices = IndexSet::new(sets.iter().map(|s| s.name.clone()).collect())
            .map_err(|e| Error::InvalidCover(e.to_string()))?;
        let mut voronoi = Vec::new();
        for set in &sets {
            match &set.geometry {
                Geometry::Caps(caps) => {
                    if caps.is_empty() {
                        return Err(Error::InvalidCover(format!("set {} has no caps", set.name)));
                    }
                    for cap in caps {
                        if cap.center.sphere_dim() != n {
                            return Err(Error::InvalidCover(format!(
                                "cap center of {} has {} coordinates, expected {}",
                                set.name,
                                cap.center.coords().len(),
                                n + 1
                            )));
                        }
                        Cap::new(cap.center.clone(), cap.radius)?;
                    }
                }
                Geometry::Voronoi(v) => {
                    if v.sphere_dim() != n {
                        return Err(Error::InvalidCover(format!(
                            "Voronoi vertex of {} has {} coordinates, expected {}",
                            set.name,
                            v.coords().len(),
                            n + 1
                        )));
                    }
                    voronoi.push(v.clone());
                }
            }
        }
        let orders = if orders.is_empty() {
            vec![LinearOrder::identity(sets.len())]
        } else {
            orders
        };
        if let Some(o) = orders.iter().find(|o| o.len() != sets.len()) {
            return Err(Error::InvalidCover(format!(
                "order over {} sets for a cover of {}",
                o.len(),
                sets.len()
            )));
        }
        if let Some(e) = epsilon {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidCover(format!(
                    "epsilon must be positive, got {e}"
                )));
            }
        }
        let mut cover = Cover {
            n,
            sets,
            indices,
            orders,
            epsilon,
            voronoi,
        };
        if cover.epsilon.is_none() {
            cover.epsilon = cover.antipodal_gap().filter(|g| *g > 0.0).map(|g| g / 4.0);
        }
        Ok(cover)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[CoverSet] {
        &self.sets
    }

    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    pub fn orders(&self) -> &[LinearOrder] {
        &self.orders
    }

    pub fn with_orders(mut self, orders: Vec<LinearOrder>) -> Result<Cover> {
        if orders.is_empty() || orders.iter().any(|o| o.len() != self.sets.len()) {
            return Err(Error::InvalidCover(
                "orders must be nonempty permutations of the sets".into(),
            ));
        }
        self.orders = orders;
        Ok(self)
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Cover> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidCover(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        self.epsilon = Some(epsilon);
        Ok(self)
    }

    pub fn is_cap_only(&self) -> bool {
        self.voronoi.is_empty()
    }

    /// Smallest geodesic distance between some `F` and `-F`, for cap-only
    /// covers. Negative when some `F` meets `-F`.
    pub fn antipodal_gap(&self) -> Option<f64> {
        if !self.is_cap_only() {
            return None;
        }
        self.sets
            .iter()
            .filter_map(|s| match &s.geometry {
                Geometry::Caps(caps) => Some(cap_union_gap(caps).0),
                Geometry::Voronoi(_) => None,
            })
            .reduce(f64::min)
    }

    fn check_point(&self, u: &UnitPoint) -> Result<()> {
        if u.sphere_dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                found: u.coords().len(),
            });
        }
        Ok(())
    }

    /// `u ∈ y·F` for the set at `index`.
    pub fn membership(&self, u: &UnitPoint, index: usize, y: Sign) -> Result<bool> {
        self.check_point(u)?;
        Ok(self.member_unchecked(u, index, y))
    }

    fn member_unchecked(&self, u: &UnitPoint, index: usize, y: Sign) -> bool {
        let v = u.scaled(y);
        match &self.sets[index].geometry {
            Geometry::Caps(caps) => caps.iter().any(|c| c.contains(&v)),
            Geometry::Voronoi(vertex) => {
                let mine = v.dot(vertex);
                self.voronoi.iter().all(|w| mine >= v.dot(w) - TOLERANCE)
            }
        }
    }

    /// Geodesic distance from `u` to `y·F`; cap unions only.
    pub fn distance_to_set(&self, u: &UnitPoint, index: usize, y: Sign) -> Result<f64> {
        self.check_point(u)?;
        match &self.sets[index].geometry {
            Geometry::Caps(caps) => {
                let v = u.scaled(y);
                Ok(caps
                    .iter()
                    .map(|c| c.distance(&v))
                    .fold(f64::INFINITY, f64::min))
            }
            Geometry::Voronoi(_) => Err(Error::UnsupportedGeometry(self.sets[index].name.clone())),
        }
    }

    /// The sample of `u`: `+` on sets containing `u`, `-` on sets containing `-u`.
    pub fn sample_at(&self, u: &UnitPoint) -> Result<Sample> {
        self.check_point(u)?;
        let mut s = Sample::zero(self.sets.len());
        for i in 0..self.sets.len() {
            let plus = self.member_unchecked(u, i, Sign::Plus);
            let minus = self.member_unchecked(u, i, Sign::Minus);
            match (plus, minus) {
                (true, true) => {
                    return Err(Error::NotAntipodalFree {
                        set: self.sets[i].name.clone(),
                    })
                }
                (true, false) => s = s.with(i, Sign::Plus)?,
                (false, true) => s = s.with(i, Sign::Minus)?,
                (false, false) => {}
            }
        }
        Ok(s)
    }

    /// `χ_u(F, y) = max(1 - d(u, yF)/ε, 0)`.
    pub fn chi(&self, u: &UnitPoint, index: usize, y: Sign) -> Result<f64> {
        let eps = self
            .epsilon
            .ok_or_else(|| Error::InvalidCover("no epsilon configured for this cover".into()))?;
        let d = self.distance_to_set(u, index, y)?;
        Ok((1.0 - d / eps).max(0.0))
    }

    /// The layer-cake decomposition of `χ_u` along a subsample chain.
    pub fn chi_decompose(&self, u: &UnitPoint) -> Result<Vec<ChiTerm>> {
        let values = self.chi_values(u)?;
        for i in 0..self.sets.len() {
            let both = values
                .iter()
                .filter(|(j, _, v)| *j == i && *v > 0.0)
                .count()
                == 2;
            if both {
                return Err(Error::EpsilonTooLarge {
                    set: self.sets[i].name.clone(),
                    epsilon: self.epsilon.unwrap_or(f64::NAN),
                });
            }
        }
        layer_cake(self.sets.len(), &values)
    }

    /// `χ_u(F, y)` for every set and sign, sets in index order, `+` first.
    pub fn chi_values(&self, u: &UnitPoint) -> Result<Vec<(usize, Sign, f64)>> {
        let mut out = Vec::with_capacity(2 * self.sets.len());
        for i in 0..self.sets.len() {
            for y in [Sign::Plus, Sign::Minus] {
                out.push((i, y, self.chi(u, i, y)?));
            }
        }
        Ok(out)
    }

    /// Support of `χ_u` as a sample, or an error when it is inconsistent.
    pub fn smoothed_support(&self, u: &UnitPoint) -> Result<Sample> {
        let mut s = Sample::zero(self.sets.len());
        for (i, y, v) in self.chi_values(u)? {
            if v > 0.0 {
                s = s.with(i, y).map_err(|_| Error::EpsilonTooLarge {
                    set: self.sets[i].name.clone(),
                    epsilon: self.epsilon.unwrap_or(f64::NAN),
                })?;
            }
        }
        Ok(s)
    }

    /// Points where the cells of this cover meet in the most sets.
    ///
    /// For Voronoi families these are the normalized sums over nonempty
    /// proper vertex subsets; on `S^1` they are the endpoints of every arc.
    /// Grids are augmented with these so that measure-zero witnesses are
    /// represented.
    pub fn feature_points(&self) -> Vec<UnitPoint> {
        let mut out = Vec::new();
        let k = self.voronoi.len();
        if (2..=16).contains(&k) {
            let zero_sum = vector_sum(&self.voronoi).iter().all(|c| c.abs() < 1e-9);
            for mask in 1u32..(1 << k) - 1 {
                // for zero-sum families the complement gives the antipode
                if zero_sum && mask & (1 << (k - 1)) != 0 {
                    continue;
                }
                let chosen: Vec<UnitPoint> = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.voronoi[i].clone())
                    .collect();
                if let Ok(p) = UnitPoint::normalize(vector_sum(&chosen)) {
                    out.push(p);
                }
            }
        }
        if self.n == 1 {
            for set in &self.sets {
                if let Geometry::Caps(caps) = &set.geometry {
                    for cap in caps {
                        let c = cap.center.coords();
                        let theta = c[1].atan2(c[0]);
                        out.push(UnitPoint::on_circle(theta + cap.radius));
                        out.push(UnitPoint::on_circle(theta - cap.radius));
                    }
                }
            }
        }
        out
    }

    pub fn to_file(&self) -> CoverFile {
        CoverFile {
            dimension: self.n,
            sets: self
                .sets
                .iter()
                .map(|s| SetFile {
                    name: s.name.clone(),
                    geometry: match &s.geometry {
                        Geometry::Caps(caps) => GeometryFile::Caps {
                            caps: caps
                                .iter()
                                .map(|c| CapFile {
                                    center: c.center.coords().to_vec(),
                                    radius: c.radius,
                                })
                                .collect(),
                        },
                        Geometry::Voronoi(v) => GeometryFile::Voronoi {
                            voronoi_vertex: v.coords().to_vec(),
                        },
                    },
                })
                .collect(),
            orders: self.orders.iter().map(|o| o.names(&self.indices)).collect(),
            epsilon: self.epsilon,
        }
    }

    pub fn from_file(file: &CoverFile) -> Result<Cover> {
        let mut sets = Vec::with_capacity(file.sets.len());
        for s in &file.sets {
            let geometry = match &s.geometry {
                GeometryFile::Caps { caps } => Geometry::Caps(
                    caps.iter()
                        .map(|c| Cap::new(UnitPoint::new(c.center.clone())?, c.radius))
                        .collect::<Result<Vec<_>>>()?,
                ),
                GeometryFile::Voronoi { voronoi_vertex } => {
                    Geometry::Voronoi(UnitPoint::new(voronoi_vertex.clone())?)
                }
            };
            sets.push(CoverSet {
                name: s.name.clone(),
                geometry,
            });
        }
        let indices = IndexSet::new(sets.iter().map(|s| s.name.clone()).collect())
            .map_err(|e| Error::InvalidCover(e.to_string()))?;
        let orders = file
            .orders
            .iter()
            .map(|names| LinearOrder::from_names(&indices, names))
            .collect::<Result<Vec<_>>>()?;
        Cover::new(file.dimension, sets, orders, file.epsilon)
    }
}

fn vector_sum(points: &[UnitPoint]) -> Vec<f64> {
    let dim = points.first().map_or(0, |p| p.coords().len());
    let mut sum = vec![0.0; dim];
    for p in points {
        for (s, c) in sum.iter_mut().zip(p.coords()) {
            *s += c;
        }
    }
    sum
}

/// Minimal `angle(c1, -c2) - r1 - r2` over cap pairs of one set, with the
/// pair attaining it.
fn cap_union_gap(caps: &[Cap]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for (i, a) in caps.iter().enumerate() {
        for (j, b) in caps.iter().enumerate().skip(i) {
            let gap = a.center.angle_to(&b.center.antipode()) - a.radius - b.radius;
            if gap < best.0 {
                best = (gap, i, j);
            }
        }
    }
    best
}

/// A point in `cap a ∩ -(cap b)` when their gap is not positive.
fn overlap_witness(a: &Cap, b: &Cap) -> UnitPoint {
    let target = b.center.antipode();
    let theta = a.center.angle_to(&target);
    let c = a.center.coords();
    let mut tangent: Vec<f64> = target
        .coords()
        .iter()
        .zip(c)
        .map(|(t, ci)| t - a.center.dot(&target) * ci)
        .collect();
    let mut norm = tangent.iter().map(|t| t * t).sum::<f64>().sqrt();
    if norm < 1e-9 {
        // target is ±center: any direction orthogonal to the center works
        let k = c
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .map_or(0, |x| x.0);
        tangent = c.iter().map(|ci| -c[k] * ci).collect();
        tangent[k] += 1.0;
        norm = tangent.iter().map(|t| t * t).sum::<f64>().sqrt();
    }
    let step = a.radius.min(theta);
    let coords = c
        .iter()
        .zip(&tangent)
        .map(|(ci, ti)| step.cos() * ci + step.sin() * ti / norm)
        .collect();
    UnitPoint::normalize(coords).expect("combination of orthonormal vectors")
}

// ---------------------------------------------------------------------------
// χ decomposition
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiTerm {
    pub coefficient: f64,
    #[serde(skip)]
    pub sample: Sample,
    pub support_size: usize,
}

/// Writes a function on `index × sign` with values in `[0, 1]` and maximum 1
/// as `Σ α_i · [s_i]` over a strictly increasing chain `s_1 < … < s_q`, with
/// `s_1 = {value = 1}`, `s_q` the support, and `Σ α_i = 1`.
pub fn layer_cake(len: usize, values: &[(usize, Sign, f64)]) -> Result<Vec<ChiTerm>> {
    let positive: Vec<(usize, Sign, f64)> = values.iter().copied().filter(|v| v.2 > 0.0).collect();
    if let Some(v) = positive.iter().find(|v| v.2.is_nan() || v.2 > 1.0) {
        return Err(Error::InvalidSample(format!(
            "value {} outside [0, 1]",
            v.2
        )));
    }
    let top = positive.iter().map(|v| v.2).fold(0.0, f64::max);
    if top < 1.0 {
        return Err(Error::Uncovered);
    }
    let mut levels: Vec<f64> = positive.iter().map(|v| v.2).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    let mut terms = Vec::with_capacity(levels.len());
    for (k, &t) in levels.iter().enumerate() {
        let next = levels.get(k + 1).copied().unwrap_or(0.0);
        let mut s = Sample::zero(len);
        for &(i, y, v) in &positive {
            if v >= t {
                s = s.with(i, y)?;
            }
        }
        terms.push(ChiTerm {
            coefficient: t - next,
            sample: s,
            support_size: s.support_size(),
        });
    }
    Ok(terms)
}

/// `Σ α_i · [(index, y) ∈ s_i]`.
pub fn reconstruct(terms: &[ChiTerm], index: usize, y: Sign) -> f64 {
    terms
        .iter()
        .filter(|t| t.sample.get(index) == Some(y))
        .map(|t| t.coefficient)
        .sum()
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetAntipodalCheck {
    pub name: String,
    pub method: &'static str,
    pub pass: bool,
    /// Distance between `F` and `-F` (cap unions).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    /// A point of `F ∩ -F` when the check fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<UnitPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntipodalReport {
    pub pass: bool,
    pub sets: Vec<SetAntipodalCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub voronoi_certificate: Option<VoronoiCertificate>,
    pub sweep_points: usize,
    pub sweep_violations: Vec<UnitPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiCertificate {
    pub spans: bool,
    pub sums_to_zero: bool,
    pub distinct: bool,
}

impl VoronoiCertificate {
    pub fn holds(&self) -> bool {
        self.spans && self.sums_to_zero && self.distinct
    }
}

/// Grid used for the falsification sweep in [`check_antipodal_free`].
pub const SWEEP_POINTS: usize = 2000;

/// Exact per-set antipodal-freeness for cap unions; for Voronoi cells a
/// certificate (spanning, zero-sum, distinct vertices). A sweep over a
/// symmetrized grid backs both up.
pub fn check_antipodal_free(cover: &Cover) -> AntipodalReport {
    let certificate = (!cover.voronoi.is_empty()).then(|| {
        let dim = cover.n + 1;
        let rows: Vec<f64> = cover
            .voronoi
            .iter()
            .flat_map(|v| v.coords().to_vec())
            .collect();
        let m = DMatrix::from_row_slice(cover.voronoi.len(), dim, &rows);
        let distinct = cover
            .voronoi
            .iter()
            .enumerate()
            .all(|(i, a)| cover.voronoi[i + 1..].iter().all(|b| a.angle_to(b) > 1e-9));
        VoronoiCertificate {
            spans: m.rank(1e-9) == dim,
            sums_to_zero: vector_sum(&cover.voronoi).iter().all(|c| c.abs() < 1e-9),
            distinct,
        }
    });
    let cert_ok = certificate.as_ref().is_none_or(|c| c.holds());

    let sets: Vec<SetAntipodalCheck> = cover
        .sets
        .iter()
        .map(|set| match &set.geometry {
            Geometry::Caps(caps) => {
                let (gap, i, j) = cap_union_gap(caps);
                let pass = gap > 0.0;
                SetAntipodalCheck {
                    name: set.name.clone(),
                    method: "cap-gap",
                    pass,
                    gap: Some(gap),
                    witness: (!pass).then(|| overlap_witness(&caps[i], &caps[j])),
                }
            }
            Geometry::Voronoi(_) => SetAntipodalCheck {
                name: set.name.clone(),
                method: "voronoi-certificate",
                pass: cert_ok,
                gap: None,
                witness: None,
            },
        })
        .collect();

    let grid = SphereGrid::symmetrized(cover.n, SWEEP_POINTS)
        .and_then(|g| g.with_extra(cover.feature_points()))
        .expect("sweep grid parameters are valid");
    let sweep_violations: Vec<UnitPoint> = grid
        .points()
        .par_iter()
        .filter(|u| {
            (0..cover.sets.len()).any(|i| {
                cover.member_unchecked(u, i, Sign::Plus)
                    && cover.member_unchecked(u, i, Sign::Minus)
            })
        })
        .cloned()
        .collect();

    AntipodalReport {
        pass: sets.iter().all(|s| s.pass) && sweep_violations.is_empty(),
        sets,
        voronoi_certificate: certificate,
        sweep_points: grid.len(),
        sweep_violations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    /// Every grid point lies in some `F` or some `-F`.
    pub pass: bool,
    /// Covered only through `F ∪ -F`: some grid point lies in no `F` itself.
    pub half_cover: bool,
    pub grid_size: usize,
    pub uncovered: Vec<usize>,
    pub outside_positive_sets: usize,
}

pub fn check_coverage(cover: &Cover, grid: &SphereGrid) -> Result<CoverageReport> {
    if grid.dimension() != cover.n {
        return Err(Error::DimensionMismatch {
            expected: cover.n,
            found: grid.dimension(),
        });
    }
    let flags: Vec<(bool, bool)> = grid
        .points()
        .par_iter()
        .map(|u| {
            let positive = (0..cover.sets.len()).any(|i| cover.member_unchecked(u, i, Sign::Plus));
            let negative = (0..cover.sets.len()).any(|i| cover.member_unchecked(u, i, Sign::Minus));
            (positive, positive || negative)
        })
        .collect();
    let uncovered: Vec<usize> = flags
        .iter()
        .enumerate()
        .filter(|(_, f)| !f.1)
        .map(|(i, _)| i)
        .collect();
    let outside = flags.iter().filter(|f| !f.0).count();
    Ok(CoverageReport {
        pass: uncovered.is_empty(),
        half_cover: uncovered.is_empty() && outside > 0,
        grid_size: grid.len(),
        uncovered,
        outside_positive_sets: outside,
    })
}

/// `{ s(u) : u ∈ grid }`.
pub fn compute_realized_samples(cover: &Cover, grid: &SphereGrid) -> Result<BTreeSet<Sample>> {
    let samples: Vec<Sample> = grid
        .points()
        .par_iter()
        .map(|u| cover.sample_at(u))
        .collect::<Result<_>>()?;
    Ok(samples.into_iter().collect())
}

/// Whether `s` lies between two realized samples. The zero sample never does.
pub fn is_in_interval_closure(s: &Sample, realized: &BTreeSet<Sample>) -> bool {
    if s.is_zero() {
        return false;
    }
    let below = realized.iter().any(|r| r.leq(s).unwrap_or(false));
    let above = realized.iter().any(|r| s.leq(r).unwrap_or(false));
    below && above
}

/// Grid points `u` whose smoothed support is not below any realized sample.
pub fn epsilon_claim_failures(cover: &Cover, grid: &SphereGrid) -> Result<Vec<usize>> {
    let realized = compute_realized_samples(cover, grid)?;
    let maximal: Vec<Sample> = realized
        .iter()
        .filter(|s| {
            !realized
                .iter()
                .any(|t| t != *s && s.leq(t).unwrap_or(false))
        })
        .copied()
        .collect();
    let supports: Vec<Sample> = grid
        .points()
        .par_iter()
        .map(|u| cover.smoothed_support(u))
        .collect::<Result<_>>()?;
    Ok(supports
        .iter()
        .enumerate()
        .filter(|(_, s)| !maximal.iter().any(|m| s.leq(m).unwrap_or(false)))
        .map(|(i, _)| i)
        .collect())
}

/// Largest `ε` among the default and its successive halvings for which
/// [`epsilon_claim_failures`] is empty on `grid`, with the cover updated.
pub fn calibrate_epsilon(cover: &Cover, grid: &SphereGrid) -> Result<(Cover, f64)> {
    let mut eps = cover
        .epsilon()
        .ok_or_else(|| Error::InvalidCover("no epsilon to calibrate from".into()))?;
    for _ in 0..40 {
        let candidate = cover.clone().with_epsilon(eps)?;
        match epsilon_claim_failures(&candidate, grid) {
            Ok(f) if f.is_empty() => return Ok((candidate, eps)),
            Ok(_) | Err(Error::EpsilonTooLarge { .. }) => eps /= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InvalidCover(format!(
        "no epsilon down to {eps} passes on this grid"
    )))
}

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Alternating patterns along the cover's order with this index.
    SingleOrder(usize),
    /// Alternating chains monotone in all of the cover's orders.
    MultiOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum WitnessPattern {
    Single(Pattern),
    Multi(SignedAntichain),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thresholds {
    /// Pattern length `n + 2` (single order) or `∏ h_r ≥ (n+1)/2` (several orders).
    pub primary: f64,
    /// `((n+1)/2)^(1/2^(d-1))` for the longest chain monotone in every order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_h: Option<f64>,
    /// Rank bound in the target poset: `n` for patterns, `(n+1)/2` for signed antichains.
    pub rank: f64,
}

/// Result of scanning a grid for the highest witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub mode: &'static str,
    pub dimension: usize,
    pub orders: usize,
    pub witness_index: usize,
    pub witness_point: UnitPoint,
    pub witness_sample: BTreeMap<String, Sign>,
    pub pattern: WitnessPattern,
    /// Chains realizing the witness, by set name; one per direction choice
    /// in multi-order mode.
    pub chains: BTreeMap<String, Vec<String>>,
    /// Longest alternating chain (single) or `∏ h_r` (multi) at the witness.
    pub achieved: u64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub h_values: BTreeMap<String, u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_h: Option<u32>,
    pub threshold: Thresholds,
    /// Largest rank reached anywhere on the grid, and where.
    pub best_rank: u64,
    pub best_rank_index: usize,
    pub rank_pass: bool,
    /// Every grid point carries a realizable sample.
    pub all_points_realizable: bool,
    pub pass: bool,
    pub grid_size: usize,
}

/// Per-point outcome of a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointOutcome {
    pub index: usize,
    pub support: usize,
    /// Pattern length (single) or `∏ h_r` (multi).
    pub achieved: u64,
    pub rank: Option<u64>,
}

/// `((n+1)/2)^(1/2^(d-1))`.
pub fn multi_order_threshold(n: usize, d: usize) -> f64 {
    ((n as f64 + 1.0) / 2.0).powf(1.0 / 2f64.powi(d as i32 - 1))
}

pub fn witness_search(
    cover: &Cover,
    grid: &SphereGrid,
    mode: SearchMode,
) -> Result<(WitnessReport, Vec<PointOutcome>)> {
    if grid.dimension() != cover.n {
        return Err(Error::DimensionMismatch {
            expected: cover.n,
            found: grid.dimension(),
        });
    }
    if grid.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    let antipodal = check_antipodal_free(cover);
    if !antipodal.pass {
        let bad = antipodal
            .sets
            .iter()
            .find(|s| !s.pass)
            .map_or("sweep".to_string(), |s| s.name.clone());
        return Err(Error::NotAntipodalFree { set: bad });
    }
    match mode {
        SearchMode::SingleOrder(k) => {
            if k >= cover.orders.len() {
                return Err(Error::Config(format!(
                    "order {k} requested, cover has {}",
                    cover.orders.len()
                )));
            }
            single_order_search(cover, grid, k)
        }
        SearchMode::MultiOrder => {
            if cover.orders.len() < 2 {
                return Err(Error::Config(
                    "multi-order search needs at least 2 orders".into(),
                ));
            }
            multi_order_search(cover, grid)
        }
    }
}

fn names(cover: &Cover, chain: &[usize]) -> Vec<String> {
    chain
        .iter()
        .map(|&i| cover.indices.name(i).to_string())
        .collect()
}

fn sample_map(cover: &Cover, s: &Sample) -> BTreeMap<String, Sign> {
    s.to_record(&cover.indices).signs
}

fn first_max<T: PartialOrd + Copy>(values: impl Iterator<Item = T>) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best
}

fn single_order_search(
    cover: &Cover,
    grid: &SphereGrid,
    k: usize,
) -> Result<(WitnessReport, Vec<PointOutcome>)> {
    let order = &cover.orders[k];
    let scanned: Vec<(Sample, Pattern, Vec<usize>)> = grid
        .points()
        .par_iter()
        .map(|u| {
            let s = cover.sample_at(u)?;
            let (p, chain) = rho_single_with_chain(&s, order)?;
            Ok((s, p, chain))
        })
        .collect::<Result<_>>()?;
    let outcomes: Vec<PointOutcome> = scanned
        .iter()
        .enumerate()
        .map(|(index, (s, p, _))| PointOutcome {
            index,
            support: s.support_size(),
            achieved: u64::from(p.length()),
            rank: pattern_rank(p).ok().map(u64::from),
        })
        .collect();
    let (best, _) = first_max(outcomes.iter().map(|o| o.achieved)).expect("nonempty grid");
    let (s, pattern, chain) = &scanned[best];
    let (rank_index, best_rank) =
        first_max(outcomes.iter().map(|o| o.rank.unwrap_or(0))).expect("nonempty grid");
    let n = cover.n as f64;
    let threshold = Thresholds {
        primary: n + 2.0,
        max_h: None,
        rank: n,
    };
    let achieved = u64::from(pattern.length());
    let mut chains = BTreeMap::new();
    chains.insert("alternating".to_string(), names(cover, chain));
    let report = WitnessReport {
        mode: "single-order",
        dimension: cover.n,
        orders: 1,
        witness_index: best,
        witness_point: grid.point(best).clone(),
        witness_sample: sample_map(cover, s),
        pattern: WitnessPattern::Single(*pattern),
        chains,
        achieved,
        h_values: BTreeMap::new(),
        max_h: None,
        rank_pass: best_rank as f64 >= threshold.rank,
        best_rank,
        best_rank_index: rank_index,
        all_points_realizable: outcomes.iter().all(|o| o.achieved >= 2),
        pass: achieved as f64 >= threshold.primary,
        threshold,
        grid_size: grid.len(),
    };
    Ok((report, outcomes))
}

struct MultiScan {
    sample: Sample,
    heights: Vec<u32>,
    product: u64,
    rho: Option<SignedAntichain>,
}

fn multi_order_search(
    cover: &Cover,
    grid: &SphereGrid,
) -> Result<(WitnessReport, Vec<PointOutcome>)> {
    let orders = &cover.orders;
    let d = orders.len();
    let scanned: Vec<MultiScan> = grid
        .points()
        .par_iter()
        .map(|u| {
            let sample = cover.sample_at(u)?;
            if sample.is_zero() {
                return Ok(MultiScan {
                    sample,
                    heights: Vec::new(),
                    product: 0,
                    rho: None,
                });
            }
            let table = iota_table(&sample, orders)?;
            let heights = table.heights();
            let product = heights.iter().map(|&h| u64::from(h)).product();
            let rho = if sample.is_realizable() {
                Some(rho_from_table(&table)?)
            } else {
                None
            };
            Ok(MultiScan {
                sample,
                heights,
                product,
                rho,
            })
        })
        .collect::<Result<_>>()?;
    let outcomes: Vec<PointOutcome> = scanned
        .iter()
        .enumerate()
        .map(|(index, m)| PointOutcome {
            index,
            support: m.sample.support_size(),
            achieved: m.product,
            rank: m
                .rho
                .as_ref()
                .and_then(|w| w.reduced_rank())
                .map(|r| r as u64),
        })
        .collect();
    let (best, _) = first_max(outcomes.iter().map(|o| o.achieved)).expect("nonempty grid");
    let (rank_index, best_rank) =
        first_max(outcomes.iter().map(|o| o.rank.unwrap_or(0))).expect("nonempty grid");
    let scan = &scanned[best];
    let rho = scan.rho.clone().ok_or(Error::NotRealizable)?;
    let directions = crate::samples::SignFunction::all(d)?;
    let mut h_values = BTreeMap::new();
    let mut chains = BTreeMap::new();
    for (r, &h) in directions.iter().zip(&scan.heights) {
        h_values.insert(r.to_string(), h);
        let chain = crate::samples::longest_monotone_chain(&scan.sample, orders, r)?;
        chains.insert(r.to_string(), names(cover, &chain));
    }
    let max_h = scan.heights.iter().copied().max().unwrap_or(0);
    let n = cover.n as f64;
    let threshold = Thresholds {
        primary: (n + 1.0) / 2.0,
        max_h: Some(multi_order_threshold(cover.n, d)),
        rank: (n + 1.0) / 2.0,
    };
    let pass = scan.product as f64 >= threshold.primary
        && f64::from(max_h) >= threshold.max_h.unwrap_or(0.0);
    let report = WitnessReport {
        mode: "multi-order",
        dimension: cover.n,
        orders: d,
        witness_index: best,
        witness_point: grid.point(best).clone(),
        witness_sample: sample_map(cover, &scan.sample),
        pattern: WitnessPattern::Multi(rho),
        chains,
        achieved: scan.product,
        h_values,
        max_h: Some(max_h),
        rank_pass: best_rank as f64 >= threshold.rank,
        best_rank,
        best_rank_index: rank_index,
        all_points_realizable: scanned.iter().all(|m| m.sample.is_realizable()),
        pass,
        threshold,
        grid_size: grid.len(),
    };
    Ok((report, outcomes))
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Structured-text cover description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverFile {
    pub dimension: usize,
    pub sets: Vec<SetFile>,
    #[serde(default)]
    pub orders: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetFile {
    pub name: String,
    pub geometry: GeometryFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GeometryFile {
    Caps { caps: Vec<CapFile> },
    Voronoi { voronoi_vertex: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapFile {
    pub center: Vec<f64>,
    pub radius: f64,
}

// ---------------------------------------------------------------------------
// Standard vertex families
// ---------------------------------------------------------------------------

/// The `n + 2` vertices of a regular simplex inscribed in `S^n`.
///
/// On `S^1` the vertices sit at 90°, 210° and 330°, so cell boundaries land
/// on uniform grids whose size is a multiple of 12.
pub fn regular_simplex(n: usize) -> Vec<UnitPoint> {
    if n == 1 {
        return (0..3)
            .map(|k| UnitPoint::on_circle(PI / 2.0 + 2.0 * PI * k as f64 / 3.0))
            .collect();
    }
    // e_1, …, e_N and a·(1, …, 1), centred and normalized
    let dim = n + 1;
    let a = (1.0 - ((dim + 1) as f64).sqrt()) / dim as f64;
    let centre = (1.0 + a) / (dim + 1) as f64;
    let mut out: Vec<UnitPoint> = (0..dim)
        .map(|i| {
            let v = (0..dim)
                .map(|j| if i == j { 1.0 } else { 0.0 } - centre)
                .collect();
            UnitPoint::normalize(v).expect("nonzero simplex vertex")
        })
        .collect();
    out.push(UnitPoint::normalize(vec![a - centre; dim]).expect("nonzero simplex vertex"));
    out
}
