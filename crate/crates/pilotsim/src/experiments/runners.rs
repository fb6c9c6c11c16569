//! Sweep runners. Jobs are (sweep point, angle realization) pairs run on a rayon pool; results
//! come back in job order, so reductions never depend on the thread count.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, GeometryKind};
use super::output::{Metric, ResultRow, SweepPoint};
use super::ExperimentError;
use crate::channel::{sample_paths, stats_from_paths, ArrayConfig, Geometry, PathSet};
use crate::pilot::{build_scheme, empirical_nmse, error_cov_closed_form, nmse, nmse_bounds, Scenario};
use crate::random::{derive_stream, Moments};
use crate::rate::{DataPhaseConfig, RateEvaluator};
use crate::Stats;

/// Receiver noise variance; UE powers are given relative to it.
pub const NOISE_VARIANCE: f64 = 1.0;
/// Stream index for angles (and random array positions) of an angle realization.
pub const ANGLE_STREAM: u64 = 0;
/// Stream index for fading gains and noise of an angle realization.
pub const DRAW_STREAM: u64 = 1;

/// Everything except the energies.
#[derive(Debug, Clone, Copy)]
struct Setup {
    scenario: Scenario,
    bs_antennas: usize,
    ue_antennas: usize,
    paths: usize,
    ue_count: usize,
    pilot_length: usize,
}

impl Setup {
    fn point(&self, rho_tau: f64, rho_d: Option<f64>) -> SweepPoint {
        SweepPoint {
            scenario: self.scenario,
            bs_antennas: self.bs_antennas,
            ue_antennas: self.ue_antennas,
            paths: self.paths,
            ue_count: self.ue_count,
            pilot_length: self.pilot_length,
            rho_tau,
            rho_d,
        }
    }
}

/// Sweep order: scenario, M, N, L, K, T_τ.
fn setups(cfg: &ExperimentConfig) -> Vec<Setup> {
    let mut out = Vec::new();
    for scenario in cfg.scenarios() {
        for m in cfg.arrays.bs_antennas.to_vec() {
            for n in cfg.arrays.ue_antennas.to_vec() {
                for l in cfg.paths.paths.to_vec() {
                    for k in cfg.cell.ue_count.to_vec() {
                        for t in cfg.timing.pilot_lengths(scenario, k, n, l) {
                            out.push(Setup {
                                scenario,
                                bs_antennas: m,
                                ue_antennas: n,
                                paths: l,
                                ue_count: k,
                                pilot_length: t,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Channel statistics of every UE for one angle realization.
///
/// UE `u` always consumes the same part of the stream, so sweeps over K, M or energy share angles.
fn draw_stats(cfg: &ExperimentConfig, realization: usize, setup: &Setup) -> Result<Vec<Stats>, ExperimentError> {
    let mut rng = derive_stream(cfg.mc.seed, realization as u64, ANGLE_STREAM);
    let paths = (0..setup.ue_count)
        .map(|u| {
            sample_paths(
                &mut rng,
                setup.paths,
                cfg.paths.aoa_range,
                cfg.paths.aod_range,
                cfg.cell.sigma_sq(u),
            )
        })
        .collect::<Result<Vec<PathSet<f64>>, _>>()?;
    let spacing = cfg.arrays.spacing;
    let (bs, ue) = match cfg.arrays.geometry {
        GeometryKind::UniformLinear => (
            ArrayConfig::new(setup.bs_antennas, Geometry::UniformLinear, spacing)?,
            ArrayConfig::new(setup.ue_antennas, Geometry::UniformLinear, spacing)?,
        ),
        GeometryKind::RandomPositions => (
            ArrayConfig::random_positions(setup.bs_antennas, spacing, &mut rng)?,
            ArrayConfig::random_positions(setup.ue_antennas, spacing, &mut rng)?,
        ),
    };
    Ok(paths
        .iter()
        .map(|p| stats_from_paths(&bs, &ue, p))
        .collect::<Result<Vec<_>, _>>()?)
}

fn pool(cfg: &ExperimentConfig) -> Result<rayon::ThreadPool, ExperimentError> {
    let workers = cfg
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ExperimentError::ThreadPool(e.to_string()))
}

/// Runs `job` on every element, keeping input order.
fn parallel_map<J, O, F>(cfg: &ExperimentConfig, jobs: &[J], job: F) -> Result<Vec<O>, ExperimentError>
where
    J: Sync,
    O: Send,
    F: Fn(&J) -> Result<O, ExperimentError> + Sync + Send,
{
    pool(cfg)?.install(|| jobs.par_iter().map(job).collect())
}

struct NmseSample {
    closed: f64,
    bounds: Option<(f64, f64)>,
    empirical: Option<f64>,
    elapsed: Duration,
}

fn nmse_job(
    cfg: &ExperimentConfig,
    setup: &Setup,
    rho_tau: f64,
    realization: usize,
) -> Result<NmseSample, ExperimentError> {
    let start = Instant::now();
    let stats = draw_stats(cfg, realization, setup)?;
    let scheme = build_scheme(
        setup.scenario,
        setup.ue_count,
        setup.ue_antennas,
        setup.paths,
        setup.pilot_length,
        rho_tau,
        &stats,
    )?;
    let ues = setup.ue_count as f64;
    let mut closed = 0.0;
    let mut lower = 0.0;
    let mut upper = 0.0;
    for (u, st) in stats.iter().enumerate() {
        closed += nmse(&error_cov_closed_form(&scheme, &stats, NOISE_VARIANCE, u)?, st);
        if setup.scenario != Scenario::PC {
            let b = nmse_bounds(setup.scenario, st, rho_tau, NOISE_VARIANCE)?;
            lower += b.lower;
            upper += b.upper;
        }
    }
    let bounds = (setup.scenario != Scenario::PC).then(|| (lower / ues, upper / ues));
    let empirical = if cfg.mc.empirical {
        let mut rng = derive_stream(cfg.mc.seed, realization as u64, DRAW_STREAM);
        let per_ue = empirical_nmse(&scheme, &stats, NOISE_VARIANCE, cfg.mc.noise_realizations, &mut rng)?;
        Some(per_ue.iter().map(|e| e.mean).sum::<f64>() / ues)
    } else {
        None
    };
    Ok(NmseSample {
        closed: closed / ues,
        bounds,
        empirical,
        elapsed: start.elapsed(),
    })
}

fn nmse_rows(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<Vec<ResultRow>, ExperimentError> {
    cfg.validate()?;
    let angles = cfg.mc.angle_realizations;
    let points: Vec<(Setup, f64)> = setups(cfg)
        .into_iter()
        .flat_map(|s| cfg.energy.pilot_energies().into_iter().map(move |r| (s, r)))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..angles).map(move |a| (p, a)))
        .collect();
    let samples = parallel_map(cfg, &jobs, |&(p, a)| nmse_job(cfg, &points[p].0, points[p].1, a))?;

    let mut rows = Vec::new();
    for ((setup, rho), chunk) in points.iter().zip(samples.chunks(angles)) {
        let wall_time = chunk.iter().map(|s| s.elapsed).sum();
        let row = |metric, m: &Moments, trials| ResultRow {
            experiment: kind,
            point: setup.point(*rho, None),
            metric,
            value: m.mean(),
            std_error: Some(m.std_error()),
            trials,
            seed: cfg.mc.seed,
            wall_time,
        };
        let collect = |f: &dyn Fn(&NmseSample) -> Option<f64>| -> Option<Moments> {
            let mut m = Moments::default();
            for s in chunk {
                m.push(f(s)?);
            }
            Some(m)
        };
        rows.push(row(
            Metric::NmseClosed,
            &collect(&|s| Some(s.closed)).expect("always set"),
            angles,
        ));
        if let Some(m) = collect(&|s| s.empirical) {
            rows.push(row(Metric::NmseEmpirical, &m, angles * cfg.mc.noise_realizations));
        }
        if let Some(m) = collect(&|s| s.bounds.map(|b| b.0)) {
            rows.push(row(Metric::NmseLower, &m, angles));
        }
        if let Some(m) = collect(&|s| s.bounds.map(|b| b.1)) {
            rows.push(row(Metric::NmseUpper, &m, angles));
        }
    }
    Ok(rows)
}

/// Closed-form and empirical NMSE, plus bounds for the uncombined scenarios, per sweep point.
pub fn run_nmse_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    nmse_rows(cfg, ExperimentKind::NmseSweep)
}

/// NMSE against the number of UEs for each configured pilot length (PC only).
pub fn run_contamination_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    if cfg.scenarios().iter().any(|&s| s != Scenario::PC) {
        return Err(
            super::ConfigError::Invalid(vec!["scenario: contamination sweeps are defined for PC only".into()]).into(),
        );
    }
    nmse_rows(cfg, ExperimentKind::Contamination)
}

/// Spectral-efficiency samples of one angle realization at one pilot/data split.
fn rate_job(
    cfg: &ExperimentConfig,
    setup: &Setup,
    rho_tau: f64,
    rho_d: f64,
    realization: usize,
) -> Result<(Moments, Duration), ExperimentError> {
    let start = Instant::now();
    let stats = draw_stats(cfg, realization, setup)?;
    let scheme = build_scheme(
        setup.scenario,
        setup.ue_count,
        setup.ue_antennas,
        setup.paths,
        setup.pilot_length,
        rho_tau,
        &stats,
    )?;
    let data = DataPhaseConfig::after_pilots(
        rho_d,
        cfg.timing.coherence_length,
        setup.pilot_length,
        NOISE_VARIANCE,
        setup.paths,
    )?;
    let eval = RateEvaluator::new(&scheme, &stats, data)?;
    let mut rng = derive_stream(cfg.mc.seed, realization as u64, DRAW_STREAM);
    let mut m = Moments::default();
    for _ in 0..cfg.mc.noise_realizations {
        m.push(eval.sample(&mut rng)?);
    }
    Ok((m, start.elapsed()))
}

fn rate_rows(
    cfg: &ExperimentConfig,
    kind: ExperimentKind,
    with_curve: bool,
) -> Result<Vec<ResultRow>, ExperimentError> {
    cfg.validate()?;
    let angles = cfg.mc.angle_realizations;
    let grid = cfg.energy.grid();
    let curves: Vec<(Setup, f64)> = setups(cfg)
        .into_iter()
        .flat_map(|s| cfg.energy.totals().into_iter().map(move |t| (s, t)))
        .collect();
    let split = |total: f64, share: f64| {
        let rho_tau = share * total;
        (rho_tau, total - rho_tau)
    };
    let per_curve = grid.len() * angles;
    let jobs: Vec<(usize, usize, usize)> = (0..curves.len())
        .flat_map(|c| (0..grid.len()).flat_map(move |g| (0..angles).map(move |a| (c, g, a))))
        .collect();
    let samples = parallel_map(cfg, &jobs, |&(c, g, a)| {
        let (setup, total) = &curves[c];
        let (rho_tau, rho_d) = split(*total, grid[g]);
        rate_job(cfg, setup, rho_tau, rho_d, a)
    })?;

    let mut rows = Vec::new();
    for ((setup, total), curve) in curves.iter().zip(samples.chunks(per_curve)) {
        let pooled: Vec<(Moments, Duration)> = curve
            .chunks(angles)
            .map(|point| {
                point
                    .iter()
                    .fold((Moments::default(), Duration::ZERO), |(mut m, t), (s, dt)| {
                        m.merge(s);
                        (m, t + *dt)
                    })
            })
            .collect();
        let row = |g: usize, metric, value, std_error| {
            let (rho_tau, rho_d) = split(*total, grid[g]);
            ResultRow {
                experiment: kind,
                point: setup.point(rho_tau, Some(rho_d)),
                metric,
                value,
                std_error,
                trials: pooled[g].0.count(),
                seed: cfg.mc.seed,
                wall_time: pooled[g].1,
            }
        };
        if with_curve {
            for (g, (m, _)) in pooled.iter().enumerate() {
                rows.push(row(g, Metric::SpectralEfficiency, m.mean(), Some(m.std_error())));
            }
        }
        // first grid maximum
        let best = (1..pooled.len()).fold(0, |b, g| if pooled[g].0.mean() > pooled[b].0.mean() { g } else { b });
        rows.push(row(best, Metric::OptimalRhoBar, grid[best], None));
        rows.push(row(
            best,
            Metric::MaxSpectralEfficiency,
            pooled[best].0.mean(),
            Some(pooled[best].0.std_error()),
        ));
    }
    Ok(rows)
}

/// Spectral efficiency over the normalized pilot-energy grid, with the grid maximum per curve.
pub fn run_tradeoff_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    rate_rows(cfg, ExperimentKind::Tradeoff, true)
}

/// Optimal normalized pilot energy and the maximum spectral efficiency per array size.
pub fn run_scaling_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    rate_rows(cfg, ExperimentKind::Scaling, false)
}
