//! Seeded Monte Carlo suites.
//!
//! Every replication draws its randomness from a ChaCha8 stream seeded by
//! `derive_seed(master_seed, rep, tag)`, so a suite is a pure function of
//! its config. Replications run on the current rayon pool and are collected
//! in replication order; the worker count never changes a result.

use planecross_core::crossings::{count_crossings_bruteforce, count_crossings_grid, has_crossing};
use planecross_core::geometry::{
    octant_grid, sample_sphere_pp, ProjectionPlane, SpherePoint, Vec3,
};
use planecross_core::pointprocess::sample_poisson_ball;
use planecross_core::rgg::{build_edges_grid, GeometricGraph};
use planecross_core::seeding::{derive_seed, STREAM_CONTROL, STREAM_GRAPH, STREAM_PLANES};
use planecross_core::stats::{
    covariance_ci, mean_ci, tv_distance_to_poisson, wasserstein1_to_poisson, EmpiricalPmf,
};
use planecross_core::theory::{
    bound_terms, expected_crossings, expected_crossings_kernel, geometric_cdf, BoundTerm,
    RegimeSpec, LOG_REGIME_EXPONENT_LIMIT,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{ConfigError, RunError};

pub const DEFAULT_GRID_RESOLUTION: usize = 64;
pub const DEFAULT_MAX_PLANES: u32 = 10;

/// Normal of the first plane in the two-plane suite.
pub fn two_plane_base() -> SpherePoint {
    SpherePoint::from_direction(Vec3::new(1.0, 1.0, 1.0)).expect("nonzero")
}

/// Tangent direction along which the second plane is obtained.
pub const TWO_PLANE_TANGENT: Vec3 = Vec3::new(1.0, -1.0, 0.0);

fn reference_normal() -> SpherePoint {
    SpherePoint::new(Vec3::E3).expect("unit")
}

/// Samples the graph of a replication from the given stream.
pub fn replication_graph(
    cfg: &ExperimentConfig,
    r: f64,
    rep: u64,
    tag: u64,
) -> Result<(u64, GeometricGraph), RunError> {
    let seed = derive_seed(cfg.master_seed, rep, tag);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cloud = sample_poisson_ball(cfg.t, cfg.window(), &mut rng)?;
    Ok((seed, build_edges_grid(&cloud, r)?))
}

fn replicate<T: Send>(
    n: u64,
    f: impl Fn(u64) -> Result<T, RunError> + Sync + Send,
) -> Result<Vec<T>, RunError> {
    (0..n).into_par_iter().map(f).collect()
}

fn model_means(cfg: &ExperimentConfig, r: f64) -> Result<(f64, f64), RunError> {
    let w = cfg.window();
    let region = cfg.region.as_ref();
    Ok((
        expected_crossings(cfg.t, r, &w, region)?,
        expected_crossings_kernel(cfg.t, r, &w, region)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistributionRecord {
    pub rep: u64,
    pub seed: u64,
    pub n_vertices: u64,
    pub n_edges: u64,
    pub n_crossings: u64,
    pub degenerate_hits: u64,
}

/// Fit of an empirical count law against a Poisson law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonFit {
    pub mean: f64,
    pub tv: f64,
    pub w1: f64,
}

impl PoissonFit {
    fn new(pmf: &EmpiricalPmf, mean: f64) -> Result<Self, RunError> {
        Ok(PoissonFit {
            mean,
            tv: tv_distance_to_poisson(pmf, mean)?,
            w1: wasserstein1_to_poisson(pmf, mean)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    pub radius: f64,
    pub plane: SpherePoint,
    pub records: Vec<DistributionRecord>,
    pub pmf: EmpiricalPmf,
    pub mean: f64,
    pub halfwidth: f64,
    pub theory: PoissonFit,
    pub kernel: PoissonFit,
}

/// Single-plane crossing counts, optionally restricted to a region.
pub fn run_distribution(cfg: &ExperimentConfig) -> Result<DistributionReport, RunError> {
    cfg.validate()?;
    let r = cfg.connection_radius()?;
    let normal = cfg.plane.unwrap_or_else(reference_normal);
    let plane = ProjectionPlane::from_sphere_point(normal);
    let region = cfg.region.as_ref();
    let records = replicate(cfg.replications, |rep| {
        let (seed, graph) = replication_graph(cfg, r, rep, STREAM_GRAPH)?;
        let set = count_crossings_grid(&graph, &plane, region);
        Ok(DistributionRecord {
            rep,
            seed,
            n_vertices: graph.points().len() as u64,
            n_edges: graph.edges().len() as u64,
            n_crossings: set.count() as u64,
            degenerate_hits: set.degenerate_hits() as u64,
        })
    })?;
    let pmf = EmpiricalPmf::from_samples(records.iter().map(|r| r.n_crossings));
    let counts: Vec<f64> = records.iter().map(|r| r.n_crossings as f64).collect();
    let (mean, halfwidth) = ci_or_point(&counts)?;
    let (m_theory, m_kernel) = model_means(cfg, r)?;
    Ok(DistributionReport {
        radius: r,
        plane: normal,
        theory: PoissonFit::new(&pmf, m_theory)?,
        kernel: PoissonFit::new(&pmf, m_kernel)?,
        records,
        pmf,
        mean,
        halfwidth,
    })
}

// A single replication has a mean but no spread estimate.
fn ci_or_point(xs: &[f64]) -> Result<(f64, f64), RunError> {
    if xs.len() == 1 {
        return Ok((xs[0], f64::INFINITY));
    }
    Ok(mean_ci(xs)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwoPlaneRecord {
    pub rep: u64,
    pub seed: u64,
    pub n_vertices: u64,
    pub n_edges: u64,
    pub n_crossings_x: u64,
    pub n_crossings_y: u64,
    pub degenerate_hits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPlaneReport {
    pub radius: f64,
    pub normals: (SpherePoint, SpherePoint),
    pub separation: f64,
    pub control: bool,
    pub records: Vec<TwoPlaneRecord>,
    pub mean_x: f64,
    pub mean_y: f64,
    pub variance_x: f64,
    pub covariance: f64,
    pub halfwidth: f64,
    pub m_theory: f64,
    pub m_kernel: f64,
    /// Exponent with `separation = t^{-alpha}`; absent at zero separation.
    pub alpha: Option<f64>,
    pub bound_terms: Vec<BoundTerm>,
}

impl TwoPlaneReport {
    pub fn ci_contains_zero(&self) -> bool {
        self.covariance.abs() <= self.halfwidth
    }
}

/// Normals at the given spherical distance: the configured normal (or
/// `(1,1,1)/√3`) and a geodesic step from it toward a fixed tangent.
pub fn plane_pair(
    first: SpherePoint,
    separation: f64,
) -> Result<(SpherePoint, SpherePoint), RunError> {
    let second = first
        .geodesic_step(TWO_PLANE_TANGENT, separation)
        .or_else(|_| first.geodesic_step(Vec3::E3, separation))?;
    Ok((first, second))
}

/// Counts on two planes per replication and their covariance.
///
/// Both counts come from the same graph unless `control` is set, in which
/// case the second plane sees an independent graph.
pub fn run_two_plane(cfg: &ExperimentConfig) -> Result<TwoPlaneReport, RunError> {
    cfg.validate()?;
    let separation = cfg.separation.ok_or(ConfigError::Missing("separation"))?;
    let r = cfg.connection_radius()?;
    let (nx, ny) = plane_pair(cfg.plane.unwrap_or_else(two_plane_base), separation)?;
    let (px, py) = (
        ProjectionPlane::from_sphere_point(nx),
        ProjectionPlane::from_sphere_point(ny),
    );
    let region = cfg.region.as_ref();
    let records = replicate(cfg.replications, |rep| {
        let (seed, graph) = replication_graph(cfg, r, rep, STREAM_GRAPH)?;
        let x = count_crossings_grid(&graph, &px, region);
        let y = if cfg.control {
            let (_, other) = replication_graph(cfg, r, rep, STREAM_CONTROL)?;
            count_crossings_grid(&other, &py, region)
        } else {
            count_crossings_grid(&graph, &py, region)
        };
        Ok(TwoPlaneRecord {
            rep,
            seed,
            n_vertices: graph.points().len() as u64,
            n_edges: graph.edges().len() as u64,
            n_crossings_x: x.count() as u64,
            n_crossings_y: y.count() as u64,
            degenerate_hits: (x.degenerate_hits() + y.degenerate_hits()) as u64,
        })
    })?;
    let xs: Vec<f64> = records.iter().map(|r| r.n_crossings_x as f64).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.n_crossings_y as f64).collect();
    let (covariance, halfwidth) = covariance_ci(&xs, &ys)?;
    let (variance_x, _) = covariance_ci(&xs, &xs)?;
    let n = xs.len() as f64;
    let (m_theory, m_kernel) = model_means(cfg, r)?;
    let alpha = (separation > 0.0 && cfg.t > 1.0).then(|| (-separation.ln() / cfg.t.ln()).max(0.0));
    let bound_terms = match alpha {
        Some(a) => bound_terms(cfg.t, r, a)?,
        None => Vec::new(),
    };
    Ok(TwoPlaneReport {
        radius: r,
        normals: (nx, ny),
        separation,
        control: cfg.control,
        mean_x: xs.iter().sum::<f64>() / n,
        mean_y: ys.iter().sum::<f64>() / n,
        variance_x,
        covariance,
        halfwidth,
        m_theory,
        m_kernel,
        alpha,
        bound_terms,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FindPlaneRecord {
    pub rep: u64,
    pub seed: u64,
    pub n_vertices: u64,
    pub n_edges: u64,
    /// 1-based index of the first crossing-free plane; empty when censored.
    pub first_success: Option<u32>,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FindPlaneReport {
    pub radius: f64,
    pub max_planes: u32,
    pub records: Vec<FindPlaneRecord>,
    /// Empirical `P(first ≤ m)` for `m = 1..=max_planes`.
    pub empirical_cdf: Vec<f64>,
    pub predicted_cdf: Vec<f64>,
    pub predicted_cdf_kernel: Vec<f64>,
    pub m_theory: f64,
    pub m_kernel: f64,
}

impl FindPlaneReport {
    pub fn max_deviation(&self) -> f64 {
        max_abs_diff(&self.empirical_cdf, &self.predicted_cdf)
    }

    pub fn max_deviation_kernel(&self) -> f64 {
        max_abs_diff(&self.empirical_cdf, &self.predicted_cdf_kernel)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Draws uniform planes from S²₊₊ until one carries no crossing.
pub fn run_find_plane(cfg: &ExperimentConfig) -> Result<FindPlaneReport, RunError> {
    cfg.validate()?;
    if cfg.radius.is_none() && !matches!(cfg.regime, RegimeSpec::Constant(_)) {
        return Err(ConfigError::invalid(
            "regime",
            "the find-plane suite needs the constant regime",
        )
        .into());
    }
    let m = cfg.max_planes.unwrap_or(DEFAULT_MAX_PLANES);
    let r = cfg.connection_radius()?;
    let records = replicate(cfg.replications, |rep| {
        let (seed, graph) = replication_graph(cfg, r, rep, STREAM_GRAPH)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, rep, STREAM_PLANES));
        let first_success = (1..=m).find(|_| {
            let plane = ProjectionPlane::from_sphere_point(sample_sphere_pp(&mut rng));
            !has_crossing(&graph, &plane)
        });
        Ok(FindPlaneRecord {
            rep,
            seed,
            n_vertices: graph.points().len() as u64,
            n_edges: graph.edges().len() as u64,
            first_success,
            censored: first_success.is_none(),
        })
    })?;
    let n = records.len() as f64;
    // Censored records only say "first > m", which is all the CDF up to m needs.
    let empirical_cdf = (1..=m)
        .map(|k| {
            records
                .iter()
                .filter(|r| r.first_success.is_some_and(|f| f <= k))
                .count() as f64
                / n
        })
        .collect();
    let (m_theory, m_kernel) = model_means(cfg, r)?;
    Ok(FindPlaneReport {
        radius: r,
        max_planes: m,
        records,
        empirical_cdf,
        predicted_cdf: (1..=m).map(|k| geometric_cdf(k, m_theory)).collect(),
        predicted_cdf_kernel: (1..=m).map(|k| geometric_cdf(k, m_kernel)).collect(),
        m_theory,
        m_kernel,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExistenceRecord {
    pub rep: u64,
    pub seed: u64,
    pub n_vertices: u64,
    pub n_edges: u64,
    pub zero_planes: u64,
    pub grid_planes: u64,
    /// A zero-crossing grid plane was found and confirmed by brute force.
    pub exists: bool,
    /// The first zero-crossing grid plane was re-counted by brute force and
    /// agreed. False when there was nothing to certify.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReport {
    pub radius: f64,
    pub grid_resolution: usize,
    /// `c` in the mean count `c·ln t` per plane, when in the log regime.
    pub exponent: Option<f64>,
    pub warnings: Vec<String>,
    pub records: Vec<ExistenceRecord>,
    pub existence_fraction: f64,
    pub existence_halfwidth: f64,
    /// Mean fraction of grid planes without crossings. A grid estimate of
    /// the normalized measure of crossing-free directions, not that measure.
    pub measure_proxy: f64,
    pub measure_halfwidth: f64,
    pub m_theory: f64,
    pub m_kernel: f64,
}

/// Counts crossings on an equal-area grid of planes over S²₊₊.
pub fn run_existence_scan(cfg: &ExperimentConfig) -> Result<ExistenceReport, RunError> {
    cfg.validate()?;
    let g = cfg.grid_resolution.unwrap_or(DEFAULT_GRID_RESOLUTION);
    let r = cfg.connection_radius()?;
    let window = cfg.window();
    let exponent = cfg.regime.log_exponent(&window);
    let mut warnings = Vec::new();
    match exponent {
        Some(c) if c >= LOG_REGIME_EXPONENT_LIMIT => warnings.push(format!(
            "log-regime exponent c = {c:.5} is not below {LOG_REGIME_EXPONENT_LIMIT}; outside the proven existence regime"
        )),
        None => warnings.push("existence scan run outside the log regime".to_string()),
        _ => {}
    }
    let planes: Vec<ProjectionPlane> = octant_grid(g)
        .into_iter()
        .map(ProjectionPlane::from_sphere_point)
        .collect();
    let records = replicate(cfg.replications, |rep| {
        let (seed, graph) = replication_graph(cfg, r, rep, STREAM_GRAPH)?;
        let mut zero_planes = 0;
        let mut first_zero = None;
        for plane in &planes {
            if !has_crossing(&graph, plane) {
                zero_planes += 1;
                first_zero.get_or_insert(plane);
            }
        }
        let certified =
            first_zero.is_some_and(|p| count_crossings_bruteforce(&graph, p, None).is_empty());
        Ok(ExistenceRecord {
            rep,
            seed,
            n_vertices: graph.points().len() as u64,
            n_edges: graph.edges().len() as u64,
            zero_planes,
            grid_planes: planes.len() as u64,
            exists: certified,
            certified,
        })
    })?;
    let exists: Vec<f64> = records
        .iter()
        .map(|r| f64::from(u8::from(r.exists)))
        .collect();
    let fractions: Vec<f64> = records
        .iter()
        .map(|r| r.zero_planes as f64 / r.grid_planes as f64)
        .collect();
    let (existence_fraction, existence_halfwidth) = ci_or_point(&exists)?;
    let (measure_proxy, measure_halfwidth) = ci_or_point(&fractions)?;
    let (m_theory, m_kernel) = model_means(cfg, r)?;
    Ok(ExistenceReport {
        radius: r,
        grid_resolution: g,
        exponent,
        warnings,
        records,
        existence_fraction,
        existence_halfwidth,
        measure_proxy,
        measure_halfwidth,
        m_theory,
        m_kernel,
    })
}
