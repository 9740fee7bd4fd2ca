//! One-way repeater chain built from logical Bell measurements.
//!
//! Stations sit every `L0` km along a link of length `L`. Each signal photon
//! crosses one fiber segment with transmission `exp(-L0/L_att)` and meets an
//! ancilla photon that is present with probability `eta_m`, so a physical
//! pair is complete with probability `eta = eta_m^2 exp(-L0/L_att)`. A station
//! also needs its source to fire (probability `eta_s`). The chain succeeds per
//! time step with probability `(eta_s p)^(L/L0)`, with `L/L0` taken as a real
//! exponent, and costs `C = n m / (R t0 L0)` photons per unit rate and km.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::success_probability;
use crate::bm::Apparatus;
use crate::code::CodeParams;
use crate::error::{check_probability, Error, Result};

pub const DEFAULT_ATTENUATION_KM: f64 = 22.0;

/// Fiber and ancilla losses of one repeater segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossChannel {
    pub attenuation_length_km: f64,
    /// Probability that an ancilla photon is present.
    pub eta_missing: f64,
}

impl Default for LossChannel {
    fn default() -> Self {
        Self {
            attenuation_length_km: DEFAULT_ATTENUATION_KM,
            eta_missing: 1.0,
        }
    }
}

impl LossChannel {
    /// Probability that both photons of a physical pair reach the detectors
    /// across a segment of `spacing_km >= 0`.
    pub fn transmission(&self, spacing_km: f64) -> f64 {
        self.eta_missing * self.eta_missing * (-spacing_km / self.attenuation_length_km).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub total_distance_km: f64,
    pub station_spacing_km: f64,
    pub attenuation_length_km: f64,
    pub eta_missing: f64,
    pub eta_source: f64,
}

impl ChainConfig {
    /// Config with the default 22 km attenuation length and perfect ancillas
    /// and sources.
    pub fn new(total_distance_km: f64, station_spacing_km: f64) -> Result<Self> {
        Self {
            total_distance_km,
            station_spacing_km,
            attenuation_length_km: DEFAULT_ATTENUATION_KM,
            eta_missing: 1.0,
            eta_source: 1.0,
        }
        .validated()
    }

    pub fn with_eta_missing(self, eta_missing: f64) -> Result<Self> {
        Self { eta_missing, ..self }.validated()
    }

    pub fn with_eta_source(self, eta_source: f64) -> Result<Self> {
        Self { eta_source, ..self }.validated()
    }

    pub fn with_attenuation_km(self, attenuation_length_km: f64) -> Result<Self> {
        Self {
            attenuation_length_km,
            ..self
        }
        .validated()
    }

    pub fn with_spacing_km(self, station_spacing_km: f64) -> Result<Self> {
        Self {
            station_spacing_km,
            ..self
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let finite_positive = |x: f64| x.is_finite() && x > 0.0;
        if !finite_positive(self.total_distance_km) {
            return Err(Error::InvalidChain(format!(
                "total distance must be positive, got {}",
                self.total_distance_km
            )));
        }
        if !finite_positive(self.station_spacing_km) || self.station_spacing_km > self.total_distance_km {
            return Err(Error::InvalidChain(format!(
                "station spacing must lie in (0, {}], got {}",
                self.total_distance_km, self.station_spacing_km
            )));
        }
        if !finite_positive(self.attenuation_length_km) {
            return Err(Error::InvalidChain(format!(
                "attenuation length must be positive, got {}",
                self.attenuation_length_km
            )));
        }
        check_probability("eta_missing", self.eta_missing)?;
        check_probability("eta_source", self.eta_source)?;
        Ok(self)
    }

    pub fn channel(&self) -> LossChannel {
        LossChannel {
            attenuation_length_km: self.attenuation_length_km,
            eta_missing: self.eta_missing,
        }
    }

    /// Number of segments `L / L0`, not rounded.
    pub fn stations(&self) -> f64 {
        self.total_distance_km / self.station_spacing_km
    }
}

/// Per-pair transmission `eta_m^2 exp(-L0/L_att)`.
pub fn effective_eta(cfg: &ChainConfig) -> f64 {
    cfg.channel().transmission(cfg.station_spacing_km)
}

/// `R t0 = (eta_s p)^(L/L0)` with the linear-optics Bell measurement.
pub fn chain_success(code: CodeParams, cfg: &ChainConfig) -> Result<f64> {
    chain_success_with(Apparatus::LinearOptics, code, cfg)
}

pub fn chain_success_with(apparatus: Apparatus, code: CodeParams, cfg: &ChainConfig) -> Result<f64> {
    let cfg = cfg.validated()?;
    let p = success_probability(apparatus, code, effective_eta(&cfg))?;
    Ok((cfg.eta_source * p).powf(cfg.stations()))
}

/// `C_L = n m / (R t0 L0)`.
pub fn cost(code: CodeParams, cfg: &ChainConfig) -> Result<f64> {
    cost_with(Apparatus::LinearOptics, code, cfg)
}

pub fn cost_with(apparatus: Apparatus, code: CodeParams, cfg: &ChainConfig) -> Result<f64> {
    let success = chain_success_with(apparatus, code, cfg)?;
    if success <= 0.0 {
        return Err(Error::DegenerateCost);
    }
    Ok(code.photons() as f64 / (success * cfg.station_spacing_km))
}

/// `ln C_L`, finite even where `R t0` underflows.
fn log_cost(apparatus: Apparatus, code: CodeParams, cfg: &ChainConfig) -> f64 {
    let p = match success_probability(apparatus, code, effective_eta(cfg)) {
        Ok(p) => p * cfg.eta_source,
        Err(_) => return f64::INFINITY,
    };
    if p <= 0.0 {
        return f64::INFINITY;
    }
    (code.photons() as f64).ln() - cfg.stations() * p.ln() - cfg.station_spacing_km.ln()
}

/// Optimum of one code, or the whole search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub code: CodeParams,
    pub spacing_km: f64,
    /// `R t0`.
    pub success_per_timestep: f64,
    pub cost: f64,
    /// `L / L0`.
    pub stations: f64,
}

impl ChainResult {
    fn evaluate(apparatus: Apparatus, code: CodeParams, cfg: &ChainConfig) -> Result<Self> {
        let success = chain_success_with(apparatus, code, cfg)?;
        let cost = (log_cost(apparatus, code, cfg)).exp();
        Ok(Self {
            code,
            spacing_km: cfg.station_spacing_km,
            success_per_timestep: success,
            cost,
            stations: cfg.stations(),
        })
    }
}

/// Ranges searched by [`optimize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub n: RangeInclusive<u32>,
    pub m: RangeInclusive<u32>,
    pub spacing_km: RangeInclusive<f64>,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            n: 1..=40,
            m: 1..=8,
            spacing_km: 0.5..=10.0,
        }
    }
}

/// Points in the coarse spacing grid that brackets each minimum.
pub const SPACING_GRID_POINTS: usize = 200;
/// Final width of the golden-section bracket, km.
pub const SPACING_TOLERANCE_KM: f64 = 1e-6;

/// Which edges of the search space the optimum touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BoundaryFlags {
    pub n: bool,
    pub m: bool,
    pub spacing: bool,
}

impl BoundaryFlags {
    pub fn any(&self) -> bool {
        self.n || self.m || self.spacing
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub best: ChainResult,
    /// Per-code optima, cheapest first.
    pub ranked: Vec<ChainResult>,
    pub on_boundary: BoundaryFlags,
}

/// Minimize `ln C` over the spacing for one code: a coarse grid finds the
/// best cell, then golden-section search refines inside its neighbours.
fn optimize_spacing(
    apparatus: Apparatus,
    code: CodeParams,
    base: &ChainConfig,
    bounds: &RangeInclusive<f64>,
) -> Option<ChainResult> {
    let (lo, hi) = (*bounds.start(), *bounds.end());
    let at = |spacing: f64| {
        let cfg = ChainConfig {
            station_spacing_km: spacing,
            ..*base
        };
        log_cost(apparatus, code, &cfg)
    };
    let grid: Vec<f64> = (0..SPACING_GRID_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SPACING_GRID_POINTS - 1) as f64)
        .collect();
    let (best_i, best_val) = grid
        .iter()
        .map(|&x| at(x))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if !best_val.is_finite() {
        return None;
    }
    let a = grid[best_i.saturating_sub(1)];
    let b = grid[(best_i + 1).min(grid.len() - 1)];
    let (x, fx) = golden_section(at, a, b, SPACING_TOLERANCE_KM);
    let spacing = if fx <= best_val { x } else { grid[best_i] };
    let cfg = ChainConfig {
        station_spacing_km: spacing,
        ..*base
    };
    ChainResult::evaluate(apparatus, code, &cfg).ok()
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

/// Cheapest `(n, m, L0)` for a link of `distance_km`.
///
/// `base` supplies attenuation length, `eta_m` and `eta_s`; its spacing is
/// ignored. Ties in cost are broken by `(n, m, L0)` ascending.
pub fn optimize(distance_km: f64, space: &SearchSpace, base: &ChainConfig) -> Result<Optimum> {
    optimize_with(Apparatus::LinearOptics, distance_km, space, base)
}

pub fn optimize_with(apparatus: Apparatus, distance_km: f64, space: &SearchSpace, base: &ChainConfig) -> Result<Optimum> {
    if space.n.is_empty() || space.m.is_empty() || *space.n.start() == 0 || *space.m.start() == 0 {
        return Err(Error::EmptySearchSpace(format!(
            "n in {:?}, m in {:?} must be non-empty and start at 1 or more",
            space.n, space.m
        )));
    }
    let (lo, hi) = (*space.spacing_km.start(), *space.spacing_km.end());
    if !(lo > 0.0 && lo <= hi && hi <= distance_km) {
        return Err(Error::EmptySearchSpace(format!(
            "spacing bounds [{lo}, {hi}] must lie within (0, {distance_km}]"
        )));
    }
    let base = ChainConfig {
        total_distance_km: distance_km,
        station_spacing_km: hi,
        ..*base
    }
    .validated()?;

    let cells: Vec<CodeParams> = space
        .n
        .clone()
        .flat_map(|n| space.m.clone().map(move |m| CodeParams::new(n, m)))
        .collect::<Result<_>>()?;
    let mut ranked: Vec<ChainResult> = cells
        .par_iter()
        .filter_map(|&code| optimize_spacing(apparatus, code, &base, &space.spacing_km))
        .collect();
    if ranked.is_empty() {
        return Err(Error::NoViableConfiguration);
    }
    ranked.sort_by(|a, b| {
        a.cost
            .total_cmp(&b.cost)
            .then(a.code.cmp(&b.code))
            .then(a.spacing_km.total_cmp(&b.spacing_km))
    });
    let best = ranked[0];
    let edge_tol = 1e-3;
    let on_boundary = BoundaryFlags {
        n: best.code.n() == *space.n.end() && space.n.start() != space.n.end(),
        m: best.code.m() == *space.m.end() && space.m.start() != space.m.end(),
        spacing: (best.spacing_km - lo).abs() < edge_tol || (best.spacing_km - hi).abs() < edge_tol,
    };
    Ok(Optimum {
        best,
        ranked,
        on_boundary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub code: CodeParams,
    pub spacing_km: f64,
    pub success_per_timestep: f64,
}

/// `R t0` for every `(code, spacing)` pair, codes outermost.
pub fn rate_curve(codes: &[CodeParams], distance_km: f64, spacings_km: &[f64], base: &ChainConfig) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::with_capacity(codes.len() * spacings_km.len());
    for &code in codes {
        for &spacing in spacings_km {
            let cfg = ChainConfig {
                total_distance_km: distance_km,
                station_spacing_km: spacing,
                ..*base
            };
            out.push(CurvePoint {
                code,
                spacing_km: spacing,
                success_per_timestep: chain_success(code, &cfg)?,
            });
        }
    }
    Ok(out)
}

/// Largest tolerable source vacuum probability `1 - eta_s` such that
/// `(eta_s p)^(L/L0)` still reaches `target_rate`.
///
/// `cfg` supplies `L`, `L0`, attenuation length and `eta_m`; its `eta_source`
/// is ignored.
pub fn source_vacuum_threshold(code: CodeParams, cfg: &ChainConfig, target_rate: f64) -> Result<f64> {
    check_probability("target_rate", target_rate)?;
    let perfect_sources = ChainConfig {
        eta_source: 1.0,
        ..*cfg
    };
    let best = chain_success(code, &perfect_sources)?;
    if best < target_rate || best == 0.0 {
        return Err(Error::TargetUnreachable {
            target: target_rate,
            best,
        });
    }
    let p = success_probability(Apparatus::LinearOptics, code, effective_eta(&perfect_sources))?;
    let eta_s = (target_rate.powf(1.0 / cfg.stations()) / p).min(1.0);
    Ok(1.0 - eta_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resources {
    /// Photon doppler modules needed for one encoded Bell pair.
    pub dopplers: u64,
    /// Probability that at least one of the multiplexed sources fires.
    pub multiplexed_source_success: f64,
}

/// Doppler count `2nm - 1` and multiplexed source success `1 - (1-eta)^N`.
pub fn resource_count(code: CodeParams, sources_per_multiplex: u32, eta_source_single: f64) -> Result<Resources> {
    check_probability("eta_source_single", eta_source_single)?;
    if sources_per_multiplex == 0 {
        return Err(Error::InvalidChain("at least one source per multiplexer is required".into()));
    }
    Ok(Resources {
        dopplers: 2 * u64::from(code.photons()) - 1,
        multiplexed_source_success: 1.0 - (1.0 - eta_source_single).powi(sources_per_multiplex as i32),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostComparison {
    pub linear_optics: ChainResult,
    pub perfect: ChainResult,
    /// `C(linear optics) / C(perfect)` at the respective optima.
    pub ratio: f64,
}

/// Ratio of the optimal cost with the linear-optics Bell measurement to the
/// optimal cost with a perfect one.
pub fn perfect_bm_cost_ratio(distance_km: f64, space: &SearchSpace, base: &ChainConfig) -> Result<CostComparison> {
    let linear = optimize_with(Apparatus::LinearOptics, distance_km, space, base)?.best;
    let perfect = optimize_with(Apparatus::Perfect, distance_km, space, base)?.best;
    Ok(CostComparison {
        ratio: linear.cost / perfect.cost,
        linear_optics: linear,
        perfect,
    })
}
