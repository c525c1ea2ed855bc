//! Experiment orchestration: builtin covers, configuration, and reports.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]. The one
//! source of randomness is [`ChaCha8Rng`] seeded with `seed_from_u64(seed)`;
//! reports name the generator so runs can be reproduced elsewhere.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::Sign;
use crate::samples::{LinearOrder, SampleRecord};
use crate::sharpness::{SharpnessInstance, SharpnessReport};
use crate::sphere::{
    check_antipodal_free, check_coverage, reconstruct, regular_simplex, witness_search,
    AntipodalReport, Cap, Cover, CoverFile, CoverSet, CoverageReport, PointOutcome, SearchMode,
    SphereGrid, UnitPoint, WitnessReport,
};

/// Name of the random generator recorded in every report.
pub const GENERATOR: &str = "ChaCha8Rng::seed_from_u64";
/// Smallest accepted grid.
pub const MIN_RESOLUTION: usize = 100;
/// Grid size used to validate random cap covers.
pub const RANDOM_COVER_GRID: usize = 2000;
/// Attempts made by `caps-random` before giving up.
pub const RANDOM_COVER_ATTEMPTS: u32 = 200;

pub fn kfcl_threshold(n: usize) -> f64 {
    n as f64 + 2.0
}

pub fn lemma_rank_threshold(n: usize) -> f64 {
    (n as f64 + 1.0) / 2.0
}

pub fn two_orders_threshold(n: usize) -> f64 {
    d_orders_threshold(n, 2)
}

pub fn d_orders_threshold(n: usize, d: usize) -> f64 {
    crate::sphere::multi_order_threshold(n, d)
}

// ---------------------------------------------------------------------------
// Builtin covers
// ---------------------------------------------------------------------------

/// Where a cover comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "source")]
pub enum CoverSource {
    SimplexVoronoi { n: usize },
    CapsRandom { n: usize, k: usize, seed: u64 },
    CapsDemoS1,
    ChiDemoS1,
    File { path: PathBuf },
}

impl CoverSource {
    /// Parses `simplex-voronoi:N`, `caps-random:N,K,SEED`, `caps-demo-s1`,
    /// `chi-demo-s1`, or else a file path.
    pub fn parse(text: &str) -> Result<CoverSource> {
        let (name, args) = match text.split_once(':') {
            Some((name, args)) => (name, Some(args)),
            None => (text, None),
        };
        let numbers = |expected: usize| -> Result<Vec<u64>> {
            let args = args.ok_or_else(|| {
                Error::Config(format!("builtin {name} needs {expected} parameter(s)"))
            })?;
            let parsed = args
                .split(',')
                .map(|a| {
                    a.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Config(format!("bad parameter {a:?} for {name}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if parsed.len() != expected {
                return Err(Error::Config(format!(
                    "builtin {name} needs {expected} parameter(s), got {}",
                    parsed.len()
                )));
            }
            Ok(parsed)
        };
        match name {
            "simplex-voronoi" => Ok(CoverSource::SimplexVoronoi {
                n: numbers(1)?[0] as usize,
            }),
            "caps-random" => {
                let p = numbers(3)?;
                Ok(CoverSource::CapsRandom {
                    n: p[0] as usize,
                    k: p[1] as usize,
                    seed: p[2],
                })
            }
            "caps-demo-s1" | "chi-demo-s1" if args.is_some() => {
                Err(Error::Config(format!("builtin {name} takes no parameters")))
            }
            "caps-demo-s1" => Ok(CoverSource::CapsDemoS1),
            "chi-demo-s1" => Ok(CoverSource::ChiDemoS1),
            _ => Ok(CoverSource::File {
                path: PathBuf::from(text),
            }),
        }
    }

    pub fn load(&self) -> Result<Cover> {
        match self {
            CoverSource::SimplexVoronoi { n } => simplex_voronoi(*n),
            CoverSource::CapsRandom { n, k, seed } => caps_random(*n, *k, *seed).map(|(c, _)| c),
            CoverSource::CapsDemoS1 => caps_demo_s1(),
            CoverSource::ChiDemoS1 => chi_demo_s1(),
            CoverSource::File { path } => load_cover_file(path),
        }
    }
}

pub fn load_cover_file(path: &Path) -> Result<Cover> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read cover file {}: {e}", path.display())))?;
    let file: CoverFile = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("cannot parse cover file {}: {e}", path.display())))?;
    Cover::from_file(&file)
}

/// `builtin_cover("simplex-voronoi:2")` and friends.
pub fn builtin_cover(name: &str) -> Result<Cover> {
    match CoverSource::parse(name)? {
        CoverSource::File { .. } => Err(Error::Config(format!("unknown builtin cover {name:?}"))),
        source => source.load(),
    }
}

/// Voronoi cells of a regular simplex on `S^n`, named `F1 … F(n+2)`.
pub fn simplex_voronoi(n: usize) -> Result<Cover> {
    if n == 0 {
        return Err(Error::Config("simplex-voronoi needs n >= 1".into()));
    }
    let sets = regular_simplex(n)
        .into_iter()
        .enumerate()
        .map(|(i, v)| CoverSet::voronoi(format!("F{}", i + 1), v))
        .collect();
    Cover::new(n, sets, vec![], None)
}

/// `k` single-cap sets with random centres and radii in `[π/4, π/2 - 0.05]`,
/// redrawn until the cover is antipodal-free and covers a validation grid.
/// Returns the cover and the number of attempts used.
pub fn caps_random(n: usize, k: usize, seed: u64) -> Result<(Cover, u32)> {
    if n == 0 || k == 0 {
        return Err(Error::Config("caps-random needs n >= 1 and k >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = SphereGrid::symmetrized(n, RANDOM_COVER_GRID)?;
    for attempt in 1..=RANDOM_COVER_ATTEMPTS {
        let sets = (0..k)
            .map(|i| {
                let center = random_unit_point(n, &mut rng);
                let radius = rng.gen_range(PI / 4.0..PI / 2.0 - 0.05);
                Ok(CoverSet::caps(
                    format!("C{}", i + 1),
                    vec![Cap::new(center, radius)?],
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let cover = Cover::new(n, sets, vec![], None)?;
        let grid = grid.clone().with_extra(cover.feature_points())?;
        if check_antipodal_free(&cover).pass && check_coverage(&cover, &grid)?.pass {
            return Ok((cover, attempt));
        }
    }
    Err(Error::InvalidCover(format!(
        "caps-random({n}, {k}, seed={seed}) found no valid cover in {RANDOM_COVER_ATTEMPTS} attempts; retry with another seed"
    )))
}

fn random_unit_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitPoint {
    loop {
        let v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm2: f64 = v.iter().map(|c| c * c).sum();
        if norm2 > 1e-6 && norm2 <= 1.0 {
            if let Ok(p) = UnitPoint::normalize(v) {
                return p;
            }
        }
    }
}

/// Three arcs of half-width 70° centred at 90°, 210° and 330°.
pub fn caps_demo_s1() -> Result<Cover> {
    let half_width = 70f64.to_radians();
    let sets = ["A", "B", "C"]
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let centre = UnitPoint::on_circle((90.0 + 120.0 * k as f64).to_radians());
            Ok(CoverSet::caps(*name, vec![Cap::new(centre, half_width)?]))
        })
        .collect::<Result<Vec<_>>>()?;
    Cover::new(1, sets, vec![], None)
}

/// Five short arcs on `S^1` with `ε = 1` whose smoothed membership at
/// `(1, 0)` is 0.5, 0.3, 1, 1 and 0.9 on `F1+`, `F2-`, `F3-`, `F4+`, `F5-`.
pub fn chi_demo_s1() -> Result<Cover> {
    let radius = 0.1;
    let centres = [0.6, PI + 0.8, PI, 0.0, PI + 0.2];
    let sets = centres
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            Ok(CoverSet::caps(
                format!("F{}", i + 1),
                vec![Cap::new(UnitPoint::on_circle(t), radius)?],
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Cover::new(1, sets, vec![], Some(1.0))
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Kfcl,
    LemmaRank,
    TwoOrders,
    DOrders,
    ChiDemo,
    Sharpness,
    ValidateCover,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Builtin name with parameters, or a cover file path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<String>,
    /// Number of grid points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Seed for random orders and property suites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of random orders for multi-order experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Evaluation point for `chi-demo`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Add the cover's feature points to the grid.
    #[serde(default = "default_true")]
    pub features: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Per-point CSV for grid scans.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Record elapsed time; makes reports differ between runs.
    #[serde(default)]
    pub wall_time: bool,
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            cover: None,
            grid: None,
            seed: None,
            orders: None,
            d: None,
            m: None,
            point: None,
            epsilon: None,
            features: true,
            out: None,
            csv: None,
            wall_time: false,
        }
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("cannot parse config: {e}")))
    }

    fn require<T: Clone>(&self, value: &Option<T>, field: &str) -> Result<T> {
        value.clone().ok_or_else(|| {
            Error::Config(format!(
                "experiment {:?} requires field `{field}`",
                self.kind
            ))
        })
    }

    fn grid_size(&self) -> Result<usize> {
        let g = self.require(&self.grid, "grid")?;
        if g < MIN_RESOLUTION {
            return Err(Error::Config(format!(
                "grid resolution {g} is below the minimum {MIN_RESOLUTION}"
            )));
        }
        if !g.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "grid resolution {g} must be even (points come in antipodal pairs)"
            )));
        }
        Ok(g)
    }

    /// Orders requested by the config, drawn from the seed.
    fn order_count(&self) -> Result<usize> {
        match self.kind {
            ExperimentKind::TwoOrders => match self.orders {
                None | Some(2) => Ok(2),
                Some(k) => Err(Error::Config(format!(
                    "two-orders uses exactly 2 orders, got {k}"
                ))),
            },
            ExperimentKind::DOrders => {
                let k = self.require(&self.orders.or(self.d), "orders")?;
                if k < 2 {
                    return Err(Error::Config(format!(
                        "d-orders needs at least 2 orders, got {k}"
                    )));
                }
                Ok(k)
            }
            ExperimentKind::LemmaRank => {
                let k = self.orders.unwrap_or(2);
                if k < 2 {
                    return Err(Error::Config(format!(
                        "lemma-rank needs at least 2 orders, got {k}"
                    )));
                }
                Ok(k)
            }
            _ => Ok(self.orders.unwrap_or(0)),
        }
    }

    /// Checks kind-specific required fields.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ExperimentKind::Kfcl => {
                self.require(&self.cover, "cover")?;
                self.grid_size()?;
                if self.orders.is_some_and(|k| k > 1) {
                    return Err(Error::Config("kfcl uses a single order".into()));
                }
                if self.orders == Some(1) {
                    self.require(&self.seed, "seed")?;
                }
            }
            ExperimentKind::LemmaRank | ExperimentKind::TwoOrders | ExperimentKind::DOrders => {
                self.require(&self.cover, "cover")?;
                self.grid_size()?;
                self.require(&self.seed, "seed")?;
                self.order_count()?;
            }
            ExperimentKind::ChiDemo => {
                if self.cover.is_some() {
                    self.require(&self.point, "point")?;
                }
            }
            ExperimentKind::Sharpness => {
                self.require(&self.d, "d")?;
                self.require(&self.m, "m")?;
            }
            ExperimentKind::ValidateCover => {
                self.require(&self.cover, "cover")?;
                if self.grid.is_some() {
                    self.grid_size()?;
                }
            }
        }
        if let Some(e) = self.epsilon {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::Config(format!("epsilon must be positive, got {e}")));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverSummary {
    pub dimension: usize,
    pub sets: Vec<String>,
    pub orders: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl CoverSummary {
    fn of(cover: &Cover) -> CoverSummary {
        CoverSummary {
            dimension: cover.dimension(),
            sets: cover.indices().names().to_vec(),
            orders: cover
                .orders()
                .iter()
                .map(|o| o.names(cover.indices()))
                .collect(),
            epsilon: cover.epsilon(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiDemoTerm {
    pub coefficient: f64,
    pub support_size: usize,
    pub sample: SampleRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiDemoReport {
    pub point: UnitPoint,
    pub chi: Vec<ChiValue>,
    pub terms: Vec<ChiDemoTerm>,
    pub coefficient_sum: f64,
    pub max_reconstruction_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiValue {
    pub set: String,
    pub sign: Sign,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub antipodal_free: AntipodalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<CoverageReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ExperimentResult {
    Witness(WitnessReport),
    Chi(ChiDemoReport),
    Sharpness(SharpnessReport),
    Validation(ValidationReport),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub generator: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverSummary>,
    /// Thresholds this experiment checks, by name.
    pub thresholds: Vec<(String, f64)>,
    pub result: ExperimentResult,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
    #[serde(skip)]
    pub per_point: Vec<PointOutcome>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Writes the report and, if configured, the per-point CSV.
    pub fn write_outputs(&self) -> anyhow::Result<()> {
        if let Some(path) = &self.config.out {
            std::fs::write(path, self.to_json() + "\n")?;
        }
        if let Some(path) = &self.config.csv {
            let mut w = csv::Writer::from_path(path)?;
            for p in &self.per_point {
                w.serialize(p)?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

/// Runs an experiment on the current rayon pool.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let mut report = match config.kind {
        ExperimentKind::Kfcl
        | ExperimentKind::LemmaRank
        | ExperimentKind::TwoOrders
        | ExperimentKind::DOrders => run_scan(config)?,
        ExperimentKind::ChiDemo => run_chi(config)?,
        ExperimentKind::Sharpness => run_sharpness(config)?,
        ExperimentKind::ValidateCover => run_validate(config)?,
    };
    if config.wall_time {
        report.wall_time_ms = Some(start.elapsed().as_millis());
    }
    Ok(report)
}

/// Runs an experiment on a dedicated pool with `threads` workers.
pub fn run_with_threads(config: &ExperimentConfig, threads: usize) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run(config))
}

fn load_cover(config: &ExperimentConfig) -> Result<Cover> {
    let source = CoverSource::parse(config.cover.as_deref().unwrap_or("chi-demo-s1"))?;
    let cover = source.load()?;
    match config.epsilon {
        Some(e) => cover.with_epsilon(e),
        None => Ok(cover),
    }
}

fn report(
    config: &ExperimentConfig,
    cover: Option<&Cover>,
    thresholds: Vec<(String, f64)>,
    result: ExperimentResult,
    pass: bool,
) -> ExperimentReport {
    ExperimentReport {
        config: config.clone(),
        generator: GENERATOR,
        cover: cover.map(CoverSummary::of),
        thresholds,
        result,
        pass,
        wall_time_ms: None,
        per_point: Vec::new(),
    }
}

fn run_scan(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut cover = load_cover(config)?;
    let n = cover.dimension();
    let k = config.order_count()?;
    if k > 0 {
        let seed = config.require(&config.seed, "seed")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let orders = (0..k)
            .map(|_| LinearOrder::random(cover.sets().len(), &mut rng))
            .collect();
        cover = cover.with_orders(orders)?;
    }
    let mut grid = SphereGrid::symmetrized(n, config.grid_size()?)?;
    if config.features {
        grid = grid.with_extra(cover.feature_points())?;
    }
    let (mode, thresholds) = match config.kind {
        ExperimentKind::Kfcl => (
            SearchMode::SingleOrder(0),
            vec![("pattern_length".to_string(), kfcl_threshold(n))],
        ),
        ExperimentKind::LemmaRank => (
            SearchMode::MultiOrder,
            vec![("reduced_rank".to_string(), lemma_rank_threshold(n))],
        ),
        _ => {
            let d = cover.orders().len();
            (
                SearchMode::MultiOrder,
                vec![
                    ("h_product".to_string(), lemma_rank_threshold(n)),
                    ("max_h".to_string(), d_orders_threshold(n, d)),
                ],
            )
        }
    };
    let (witness, per_point) = witness_search(&cover, &grid, mode)?;
    let pass = match config.kind {
        ExperimentKind::LemmaRank => witness.rank_pass,
        _ => witness.pass,
    };
    let mut out = report(
        config,
        Some(&cover),
        thresholds,
        ExperimentResult::Witness(witness),
        pass,
    );
    out.per_point = per_point;
    Ok(out)
}

fn run_chi(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let cover = load_cover(config)?;
    let mut coords = config.point.clone().unwrap_or_else(|| vec![1.0, 0.0]);
    if coords.len() != cover.dimension() + 1 {
        return Err(Error::DimensionMismatch {
            expected: cover.dimension() + 1,
            found: coords.len(),
        });
    }
    // accept slightly off-sphere input from the command line
    let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidPoint(format!(
            "point has norm {norm}, expected 1"
        )));
    }
    coords.iter_mut().for_each(|c| *c /= norm);
    let u = UnitPoint::normalize(coords)?;
    let terms = cover.chi_decompose(&u)?;
    let values = cover.chi_values(&u)?;
    let max_err = values
        .iter()
        .map(|&(i, y, v)| (reconstruct(&terms, i, y) - v).abs())
        .fold(0.0, f64::max);
    let sum: f64 = terms.iter().map(|t| t.coefficient).sum();
    let chi = values
        .iter()
        .filter(|v| v.2 > 0.0)
        .map(|&(i, y, v)| ChiValue {
            set: cover.indices().name(i).to_string(),
            sign: y,
            value: v,
        })
        .collect();
    let demo = ChiDemoReport {
        point: u,
        chi,
        terms: terms
            .iter()
            .map(|t| ChiDemoTerm {
                coefficient: t.coefficient,
                support_size: t.support_size,
                sample: t.sample.to_record(cover.indices()),
            })
            .collect(),
        coefficient_sum: sum,
        max_reconstruction_error: max_err,
    };
    let pass = (sum - 1.0).abs() <= 1e-12 && max_err <= 1e-12;
    Ok(report(
        config,
        Some(&cover),
        vec![("reconstruction_error".to_string(), 1e-12)],
        ExperimentResult::Chi(demo),
        pass,
    ))
}

fn run_sharpness(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let d = config.require(&config.d, "d")?;
    let m = config.require(&config.m, "m")?;
    let result = SharpnessInstance::new(d, m)?.report()?;
    let pass = result.pass;
    Ok(report(
        config,
        None,
        vec![("longest".to_string(), f64::from(m))],
        ExperimentResult::Sharpness(result),
        pass,
    ))
}

fn run_validate(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let cover = load_cover(config)?;
    let antipodal_free = check_antipodal_free(&cover);
    let coverage = match config.grid {
        Some(g) => {
            let mut grid = SphereGrid::symmetrized(cover.dimension(), g)?;
            if config.features {
                grid = grid.with_extra(cover.feature_points())?;
            }
            Some(check_coverage(&cover, &grid)?)
        }
        None => None,
    };
    let pass = antipodal_free.pass && coverage.as_ref().is_none_or(|c| c.pass);
    Ok(report(
        config,
        Some(&cover),
        Vec::new(),
        ExperimentResult::Validation(ValidationReport {
            antipodal_free,
            coverage,
        }),
        pass,
    ))
}
