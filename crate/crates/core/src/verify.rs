//! Verification suites and convergence sweeps.
//!
//! Each suite turns one identity into a list of [`Check`]s. A numeric error inside a check
//! becomes a failed check carrying the error string; the remaining checks still run.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, BulkPoint, NullDirection, PrincipalParams};
use crate::holomap::{
    boundary_limit, kernel_direct, kernel_grid, kernel_series, past_boundary_limit, past_phase, transform_f1,
    transform_f2, KernelEval, KernelPath, LimitOptions,
};
use crate::modes::{bulk_mode_eval, expansion_residual, BulkMode};
use crate::quadrature::{
    harmonic_gram, identity_deviation, kg_norm_check, l2_inner, CauchySlice, FnField, KgNormalization, SphereGrid,
};
use crate::report::{
    run_id, Check, ParamsEcho, RunConfig, Suite, SweepRow, Timing, VerificationReport, SCHEMA_VERSION,
};
use crate::sampling::Sampler;
use crate::specfun::harmonics::{harmonic_count, harmonics_up_to, HarmonicIndex};
use crate::tolerance as tol;

struct Collector {
    prefix: &'static str,
    checks: Vec<Check>,
    timings: Vec<Timing>,
}

impl Collector {
    fn new(suite: Suite) -> Self {
        Self { prefix: suite.name(), checks: Vec::new(), timings: Vec::new() }
    }

    fn run(&mut self, name: &str, tolerance: f64, f: impl FnOnce() -> Result<Check>) {
        let name = format!("{}/{name}", self.prefix);
        let start = Instant::now();
        let mut check = f().unwrap_or_else(|e| Check::errored(&name, tolerance, &e));
        check.name = name;
        check.tolerance = tolerance;
        let seconds = start.elapsed().as_secs_f64();
        log::info!("{}: residual {:?} (tol {:e}) {:.3}s", check.name, check.residual, tolerance, seconds);
        self.timings.push(Timing { check: check.name.clone(), seconds });
        self.checks.push(check);
    }
}

/// Runs every suite in `cfg.suites`, in order, into one report.
pub fn run(cfg: &RunConfig) -> Result<VerificationReport> {
    let params = cfg.validate()?;
    if cfg.suites.is_empty() {
        return Err(Error::Config("no suite selected".into()));
    }
    if let Some(e) = cfg.grid_exactness {
        if e == 0 {
            return Err(Error::Config("grid exactness must be positive".into()));
        }
    }
    let mut checks = Vec::new();
    let mut timings = Vec::new();
    for &suite in &cfg.suites {
        let c = run_suite(suite, cfg, &params);
        checks.extend(c.checks);
        timings.extend(c.timings);
    }
    let names: Vec<_> = cfg.suites.iter().map(|s| s.name()).collect();
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        run_id: run_id(&cfg.suites, cfg),
        suite: names.join("+"),
        params: ParamsEcho::from(&params),
        config: cfg.clone(),
        checks,
        timings,
    })
}

fn run_suite(suite: Suite, cfg: &RunConfig, params: &PrincipalParams) -> Collector {
    let mut c = Collector::new(suite);
    let lmax = cfg.lmax_for(suite);
    match suite {
        Suite::OrthoBulk => ortho_bulk(&mut c, cfg, params, lmax),
        Suite::OrthoBoundary => ortho_boundary(&mut c, cfg, params, lmax),
        Suite::Expansion => expansion(&mut c, cfg, params, lmax),
        Suite::BoundaryLimit => limits(&mut c, params, lmax),
        Suite::TransformF1 => transforms_f1(&mut c, cfg, params, lmax),
        Suite::TransformF2 => transforms_f2(&mut c, cfg, params, lmax),
        Suite::Antipodal => antipodal(&mut c, cfg, params, lmax),
    }
    c
}

fn grid_for(cfg: &RunConfig, d: usize, lmax: usize) -> Result<SphereGrid> {
    SphereGrid::build(d, cfg.grid_exactness.unwrap_or(2 * lmax))
}

fn ortho_bulk(c: &mut Collector, cfg: &RunConfig, params: &PrincipalParams, lmax: usize) {
    for (name, norm) in [
        ("gram-closed-form-constant", KgNormalization::closed_form(params)),
        ("gram-unit-constant", KgNormalization::unit_gram(params)),
    ] {
        c.run(name, tol::BULK_GRAM, || {
            let norm = norm?;
            let r = kg_norm_check(params, lmax, &grid_for(cfg, params.d, lmax)?, norm)?;
            Ok(Check::measured(name, r.max_deviation, tol::BULK_GRAM)
                .with("modes", r.modes)
                .with("c_tau", norm.c_tau)
                .with("grid_exactness", r.grid_exactness))
        });
    }
    c.run("grid-resolved", 0.0, || {
        let grid = grid_for(cfg, params.d, lmax)?;
        let short = (2 * lmax).saturating_sub(grid.exactness_degree);
        Ok(Check::measured("", short as f64, 0.0)
            .with("required_exactness", 2 * lmax)
            .with("grid_exactness", grid.exactness_degree))
    });
}

/// Largest `|Y(-u) - (-1)^L Y(u)|` over all harmonics up to `lmax` at seeded points.
fn parity_defect(d: usize, lmax: usize, seed: u64) -> Result<f64> {
    let mut s = Sampler::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..tol::TRANSFORM_SAMPLES {
        let u = s.unit_vector(d);
        let minus: Vec<f64> = u.iter().map(|x| -x).collect();
        let (yu, ym) = (harmonics_up_to(d, lmax, &u)?, harmonics_up_to(d, lmax, &minus)?);
        let mut k = 0;
        for degree in 0..=lmax {
            let sign = if degree % 2 == 0 { 1.0 } else { -1.0 };
            for _ in 0..harmonic_count(d, degree) {
                worst = worst.max((ym[k] - sign * yu[k]).norm());
                k += 1;
            }
        }
    }
    Ok(worst)
}

/// Largest `|‖Y(-·)‖² - ‖Y‖²|` over all harmonics up to `lmax`.
fn reflected_norm_defect(d: usize, lmax: usize, grid: &SphereGrid) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for idx in HarmonicIndex::up_to(d, lmax)? {
        let direct = FnField { d, f: |u: &[f64]| crate::specfun::hyperspherical_y(d, &idx, u) };
        let reflected = FnField {
            d,
            f: |u: &[f64]| {
                let m: Vec<f64> = u.iter().map(|x| -x).collect();
                crate::specfun::hyperspherical_y(d, &idx, &m)
            },
        };
        let a = l2_inner(&direct, &direct, grid)?;
        let b = l2_inner(&reflected, &reflected, grid)?;
        worst = worst.max((a - b).norm());
    }
    Ok(worst)
}

fn ortho_boundary(c: &mut Collector, cfg: &RunConfig, params: &PrincipalParams, lmax: usize) {
    let d = params.d;
    c.run("harmonic-gram", tol::BOUNDARY_GRAM, || {
        let grid = grid_for(cfg, d, lmax)?;
        let dev = identity_deviation(&harmonic_gram(&grid, lmax)?);
        Ok(Check::measured("", dev, tol::BOUNDARY_GRAM).with("grid_exactness", grid.exactness_degree))
    });
    c.run("parity", tol::PARITY, || Ok(Check::measured("", parity_defect(d, lmax, cfg.seed)?, tol::PARITY)));
    c.run("reflected-norm", tol::PARITY, || {
        Ok(Check::measured("", reflected_norm_defect(d, lmax, &grid_for(cfg, d, lmax)?)?, tol::PARITY))
    });
}

/// Seeded `(ρ, u, v)` triples.
fn expansion_samples(d: usize, seed: u64, n: usize) -> Vec<(f64, Vec<f64>, Vec<f64>)> {
    let mut s = Sampler::new(seed);
    (0..n)
        .map(|_| {
            let rho = s.uniform(-tol::SAMPLE_RHO_MAX, tol::SAMPLE_RHO_MAX);
            (rho, s.unit_vector(d), s.unit_vector(d))
        })
        .collect()
}

fn expansion(c: &mut Collector, cfg: &RunConfig, params: &PrincipalParams, lmax: usize) {
    let samples = expansion_samples(params.d, cfg.seed, tol::EXPANSION_SAMPLES);
    let residuals = |l: usize| -> Vec<Result<f64>> {
        samples
            .iter()
            .map(|(rho, u, v)| {
                let p = BulkPoint::new(*rho, u.clone(), cfg.epsilon)?;
                expansion_residual(&p, &NullDirection::new(1.0, v.clone())?, params, l)
            })
            .collect()
    };
    let mut high = Vec::new();
    c.run("residual-max", tol::EXPANSION_RESIDUAL, || {
        high = residuals(lmax);
        let mut worst: f64 = 0.0;
        for r in &high {
            worst = worst.max(r.clone()?);
        }
        let median = {
            let mut v: Vec<f64> = high.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
            v.sort_by(f64::total_cmp);
            v.get(v.len() / 2).copied()
        };
        Ok(Check::measured("", worst, tol::EXPANSION_RESIDUAL)
            .with("lmax", lmax)
            .with("epsilon", cfg.epsilon)
            .with("median", median))
    });
    let low_lmax = tol::EXPANSION_LMAX_LOW.min(lmax);
    let tolerance = 1.0 - tol::EXPANSION_IMPROVING_FRACTION;
    c.run("improves-over-low-cutoff", tolerance, || {
        let low = residuals(low_lmax);
        let improving = high.iter().zip(&low).filter(|(h, l)| matches!((h, l), (Ok(h), Ok(l)) if h < l)).count();
        let errors = high.iter().chain(&low).filter(|r| r.is_err()).count();
        let fraction = improving as f64 / samples.len() as f64;
        Ok(Check::measured("", 1.0 - fraction, tolerance)
            .with("improving", improving)
            .with("samples", samples.len())
            .with("low_lmax", low_lmax)
            .with("errors", errors))
    });
}

fn limits(c: &mut Collector, params: &PrincipalParams, lmax: usize) {
    let opts = LimitOptions::default();
    for degree in 0..=lmax {
        c.run(&format!("future-limit-L{degree}"), tol::BOUNDARY_LIMIT, || {
            let idx = HarmonicIndex::all(params.d, degree)?.remove(0);
            let mut u = vec![0.0; params.d];
            u[0] = 0.6;
            u[params.d - 1] = 0.8;
            let b = BoundaryPoint::new(u)?;
            let lim = boundary_limit(&idx, &b, params, &opts)?;
            // the limit is the radial factor times the harmonic, so its ratio to Y is l-independent
            let residual = (lim.radial.value - 1.0).norm();
            Ok(Check::measured("", residual, tol::BOUNDARY_LIMIT)
                .with("extrapolated", [lim.radial.value.re, lim.radial.value.im])
                .with("error_estimate", lim.radial.error_estimate)
                .with("integer_ladder_residual", (lim.radial.integer_ladder_value - 1.0).norm())
                .with("levels", opts.deltas.len()))
        });
    }
}

/// Worst error over all `(L, l)` with `L` in `degrees`, each scaled by the rms size of degree `L`.
fn worst_scaled(
    d: usize,
    degrees: std::ops::RangeInclusive<usize>,
    mut pair: impl FnMut(&HarmonicIndex) -> Result<(Complex64, Complex64)>,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for degree in degrees {
        let pairs = HarmonicIndex::all(d, degree)?.iter().map(&mut pair).collect::<Result<Vec<_>>>()?;
        let scale = (pairs.iter().map(|(_, e)| e.norm_sqr()).sum::<f64>() / pairs.len() as f64).sqrt();
        for (got, expected) in pairs {
            worst = worst.max((got - expected).norm() / scale);
        }
    }
    Ok(worst)
}

fn transform_points(d: usize, seed: u64) -> Result<Vec<BulkPoint>> {
    let mut s = Sampler::new(seed);
    (0..tol::TRANSFORM_SAMPLES)
        .map(|_| {
            let rho = s.uniform(-tol::SAMPLE_RHO_MAX, tol::SAMPLE_RHO_MAX);
            BulkPoint::new(rho, s.unit_vector(d), tol::TRANSFORM_EPSILON)
        })
        .collect()
}

fn transforms_f1(c: &mut Collector, cfg: &RunConfig, params: &PrincipalParams, lmax: usize) {
    let d = params.d;
    c.run("direct", tol::TRANSFORM_DIRECT, || {
        let mut worst: f64 = 0.0;
        for p in transform_points(d, cfg.seed)? {
            let grid = kernel_grid(d, p.rho_tilde(), tol::KERNEL_PANEL_NODES, tol::KERNEL_AZIMUTH_NODES)?;
            worst = worst.max(worst_scaled(d, 0..=lmax, |idx| {
                let expected = bulk_mode_eval(&BulkMode::new(*params, idx.clone())?, &p)?;
                Ok((transform_f1(idx, &p, params, &grid, KernelPath::Direct)?, expected))
            })?);
        }
        Ok(Check::measured("", worst, tol::TRANSFORM_DIRECT).with("points", tol::TRANSFORM_SAMPLES).with("lmax", lmax))
    });
    c.run("series", tol::TRANSFORM_SERIES, || {
        let grid = grid_for(cfg, d, 2 * lmax)?;
        let mut worst: f64 = 0.0;
        for p in transform_points(d, cfg.seed)? {
            worst = worst.max(worst_scaled(d, 0..=lmax, |idx| {
                let expected = bulk_mode_eval(&BulkMode::new(*params, idx.clone())?, &p)?;
                Ok((transform_f1(idx, &p, params, &grid, KernelPath::Series { lmax })?, expected))
            })?);
        }
        Ok(Check::measured("", worst, tol::TRANSFORM_SERIES).with("grid_exactness", grid.exactness_degree))
    });
}

fn transforms_f2(c: &mut Collector, cfg: &RunConfig, params: &PrincipalParams, lmax: usize) {
    let d = params.d;
    let boundary_points = || -> Result<Vec<BoundaryPoint>> {
        let mut s = Sampler::new(cfg.seed);
        (0..tol::TRANSFORM_SAMPLES).map(|_| BoundaryPoint::new(s.unit_vector(d))).collect()
    };
    let run_path = |path: KernelPath, grid: &SphereGrid, slice: CauchySlice| -> Result<f64> {
        let norm = KgNormalization::unit_gram(params)?;
        let mut worst: f64 = 0.0;
        for b in boundary_points()? {
            worst = worst.max(worst_scaled(d, 0..=lmax, |idx| {
                let expected = crate::specfun::hyperspherical_y(d, idx, &b.u)?;
                Ok((transform_f2(idx, &b, params, grid, path, norm, slice)?, expected))
            })?);
        }
        Ok(worst)
    };
    c.run("direct", tol::TRANSFORM_DIRECT, || {
        let eps = tol::TRANSFORM_EPSILON;
        let grid = kernel_grid(d, Complex64::new(0.0, -eps), tol::KERNEL_PANEL_NODES, tol::KERNEL_AZIMUTH_NODES)?;
        let worst = run_path(KernelPath::Direct, &grid, CauchySlice::shifted(eps))?;
        Ok(Check::measured("", worst, tol::TRANSFORM_DIRECT).with("slice_im", eps).with("lmax", lmax))
    });
    c.run("series", tol::TRANSFORM_SERIES, || {
        let grid = grid_for(cfg, d, 2 * lmax)?;
        let worst = run_path(KernelPath::Series { lmax }, &grid, CauchySlice::waist())?;
        Ok(Check::measured("", worst, tol::TRANSFORM_SERIES).with("grid_exactness", grid.exactness_degree))
    });
}

fn antipodal(c: &mut Collector, cfg: &RunConfig, params: &PrincipalParams, lmax: usize) {
    let d = params.d;
    let opts = LimitOptions::default();
    let phase = past_phase(params);
    c.run("phase-modulus", tol::PHASE_MODULUS, || {
        Ok(Check::measured("", (phase.norm() - (-PI * params.nu).exp()).abs(), tol::PHASE_MODULUS))
    });
    let points = || -> Result<Vec<BoundaryPoint>> {
        let mut s = Sampler::new(cfg.seed);
        (0..3).map(|_| BoundaryPoint::new(s.unit_vector(d))).collect()
    };
    for degree in 0..=lmax {
        c.run(&format!("past-phase-L{degree}"), tol::BOUNDARY_LIMIT, || {
            let idx = HarmonicIndex::all(d, degree)?.remove(0);
            let lim = past_boundary_limit(&idx, &points()?[0], params, &opts)?;
            Ok(Check::measured("", (lim.phase - phase).norm() / phase.norm(), tol::BOUNDARY_LIMIT)
                .with("extracted", [lim.phase.re, lim.phase.im])
                .with("expected", [phase.re, phase.im]))
        });
        c.run(&format!("identity-L{degree}"), tol::BOUNDARY_LIMIT, || {
            let mut worst: f64 = 0.0;
            for b in points()? {
                let minus = b.antipode();
                worst = worst.max(worst_scaled(d, degree..=degree, |idx| {
                    let lim = past_boundary_limit(idx, &b, params, &opts)?;
                    Ok((lim.limit, phase * crate::specfun::hyperspherical_y(d, idx, &minus.u)?))
                })?);
            }
            Ok(Check::measured("", worst, tol::BOUNDARY_LIMIT))
        });
        c.run(&format!("phase-stripped-L{degree}"), tol::BOUNDARY_LIMIT, || {
            let mut worst: f64 = 0.0;
            for b in points()? {
                let minus = b.antipode();
                worst = worst.max(worst_scaled(d, degree..=degree, |idx| {
                    let lim = past_boundary_limit(idx, &minus, params, &opts)?;
                    Ok((lim.phase_stripped, crate::specfun::hyperspherical_y(d, idx, &b.u)?))
                })?);
            }
            Ok(Check::measured("", worst, tol::BOUNDARY_LIMIT))
        });
    }
    c.run("parity", tol::PARITY, || Ok(Check::measured("", parity_defect(d, lmax, cfg.seed)?, tol::PARITY)));
    c.run("reflected-norm", tol::PARITY, || {
        Ok(Check::measured("", reflected_norm_defect(d, lmax, &SphereGrid::build(d, 2 * lmax)?)?, tol::PARITY))
    });
}

/// Which truncated series a sweep measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    /// Plane wave against its mode expansion.
    Expansion,
    /// Closed-form kernel against its series.
    Kernel,
}

impl std::str::FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expansion" => Ok(Self::Expansion),
            "kernel" => Ok(Self::Kernel),
            other => Err(Error::Config(format!("unknown sweep '{other}' (expansion or kernel)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub d: usize,
    pub nu: f64,
    pub lmax_values: Vec<usize>,
    pub epsilon_values: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { d: 3, nu: 1.0, lmax_values: vec![5, 10, 20], epsilon_values: vec![0.05, 0.1, 0.5], seed: 0, samples: 10 }
    }
}

/// Mean relative residual over seeded samples for every `(ε, Lmax)`, ε-major.
pub fn sweep(kind: SweepKind, cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let params = RunConfig { d: cfg.d, nu: cfg.nu, ..RunConfig::default() }.validate()?;
    if cfg.epsilon_values.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::Config("sweep epsilons must be positive".into()));
    }
    let samples = expansion_samples(cfg.d, cfg.seed, cfg.samples);
    let mut rows = Vec::new();
    for &epsilon in &cfg.epsilon_values {
        for &lmax in &cfg.lmax_values {
            let mut total = 0.0;
            for (rho, u, v) in &samples {
                let p = BulkPoint::new(*rho, u.clone(), epsilon)?;
                total += match kind {
                    SweepKind::Expansion => {
                        expansion_residual(&p, &NullDirection::new(1.0, v.clone())?, &params, lmax)?
                    }
                    SweepKind::Kernel => {
                        let b = BoundaryPoint::new(v.clone())?;
                        let exact = kernel_direct(&p, &b, &params)?;
                        (kernel_series(&p, &b, &KernelEval { params, lmax })? - exact).norm() / exact.norm()
                    }
                };
            }
            rows.push(SweepRow { lmax, epsilon, residual: total / samples.len().max(1) as f64 });
        }
    }
    Ok(rows)
}
