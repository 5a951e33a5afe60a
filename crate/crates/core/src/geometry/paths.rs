//! Path lengths, the log-volume length bound and boundary probes.
//!
//! Along any path, Cauchy–Schwarz applied to `d_u log Vol = Λ(u) = g(u, ω)`
//! and `g(ω, ω) = n` gives `|d log Vol| ≤ √n |γ'|`, hence
//! `L(γ) ≥ (1/√n) |Δ log Vol|`. Radial paths `t ↦ e^{t/n} ω` attain it.

use serde::Serialize;

use crate::class::CohClass;
use crate::error::{Error, Result};
use crate::intersection::IntersectionForm;
use crate::lefschetz::ConePoint;

/// Successive cumulative lengths closer than this count as converged.
pub const CONV_TOL: f64 = 1e-3;
/// Fraction of `(1/√n) log 2` each halving must add to count as divergent.
pub const DIVERGENCE_FACTOR: f64 = 0.9;
/// Number of trailing schedule steps inspected for divergence.
pub const DIVERGENCE_WINDOW: usize = 5;

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];
const PANELS: usize = 4;

/// `∫ f` over `[a, b]` with composite 8-point Gauss–Legendre.
fn gauss<F: FnMut(f64) -> Result<f64>>(a: f64, b: f64, mut f: F) -> Result<f64> {
    let width = (b - a) / PANELS as f64;
    let mut acc = 0.0;
    for p in 0..PANELS {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            acc += w * half * (f(mid - half * x)? + f(mid + half * x)?);
        }
    }
    Ok(acc)
}

/// `|γ'|` for `γ' = dir` at `x`, requiring `x` admissible.
fn speed(form: &IntersectionForm, x: CohClass, dir: &CohClass) -> Result<f64> {
    let p = ConePoint::new(form, x)?;
    Ok(p.norm_sq(dir).max(0.0).sqrt())
}

/// Length of the straight segment from `a` to `b`.
pub fn segment_length(form: &IntersectionForm, a: &CohClass, b: &CohClass) -> Result<f64> {
    ConePoint::new(form, a.clone())?;
    ConePoint::new(form, b.clone())?;
    let d = b - a;
    gauss(0.0, 1.0, |s| speed(form, a.axpy(s, &d), &d))
}

/// Length of the piecewise-linear path through `samples`.
pub fn path_length(form: &IntersectionForm, samples: &[CohClass]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput(
            "a path needs at least two samples".into(),
        ));
    }
    samples
        .windows(2)
        .map(|w| segment_length(form, &w[0], &w[1]))
        .sum()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LengthBound {
    pub length: f64,
    pub delta_log_vol: f64,
    /// `(1/√n) |Δ log Vol|`, the bound the Cauchy–Schwarz argument yields.
    pub sharp_bound: f64,
    /// `(√2/√n) |Δ log Vol|`. Radial paths fall below this one.
    pub sqrt2_bound: f64,
    /// `length ≥ sharp_bound − 1e-9`.
    pub holds: bool,
}

pub fn bound_check(form: &IntersectionForm, samples: &[CohClass]) -> Result<LengthBound> {
    let length = path_length(form, samples)?;
    let first = form.volume(&samples[0])?;
    let last = form.volume(samples.last().expect("non-empty"))?;
    let delta_log_vol = last.ln() - first.ln();
    let n = form.dim() as f64;
    let sharp_bound = delta_log_vol.abs() / n.sqrt();
    Ok(LengthBound {
        length,
        delta_log_vol,
        sharp_bound,
        sqrt2_bound: 2f64.sqrt() * sharp_bound,
        holds: length >= sharp_bound - 1e-9,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProbeClass {
    Divergent,
    Convergent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeStep {
    pub t: f64,
    pub volume: f64,
    /// Length of `γ` from the first schedule point down to `t`.
    pub cumulative_length: f64,
    /// Length added since the previous schedule point.
    pub increment: f64,
    pub delta_log_vol: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub steps: Vec<ProbeStep>,
    pub classification: ProbeClass,
    /// The last increment.
    pub tail_variation: f64,
    /// Smallest ratio `increment / ((1/√n) log(t_prev/t))` over the trailing window.
    pub min_growth_ratio: f64,
}

/// `t_max, t_max/2, …` for `halvings` halvings, stopping below `t_min`.
pub fn halving_schedule(t_max: f64, t_min: f64, halvings: usize) -> Vec<f64> {
    (0..=halvings)
        .map(|k| t_max * 0.5f64.powi(k as i32))
        .take_while(|&t| t >= t_min)
        .collect()
}

/// Follows `γ(t) = α + tω` toward `α` along a decreasing schedule of `t` and
/// classifies whether the length to the boundary is finite.
pub fn boundary_probe(
    form: &IntersectionForm,
    alpha: &CohClass,
    omega: &CohClass,
    schedule: &[f64],
) -> Result<ProbeReport> {
    form.check_len(alpha)?;
    ConePoint::new(form, omega.clone())?;
    if schedule.len() < 2 {
        return Err(Error::InvalidInput(
            "schedule needs at least two points".into(),
        ));
    }
    if schedule.iter().any(|&t| !(t > 0.0) || !t.is_finite())
        || schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidInput(
            "schedule must be positive and strictly decreasing".into(),
        ));
    }
    let n = form.dim() as f64;
    let gamma = |t: f64| alpha.axpy(t, omega);
    ConePoint::new(form, gamma(schedule[0]))?;

    let mut steps = vec![ProbeStep {
        t: schedule[0],
        volume: form.volume(&gamma(schedule[0]))?,
        cumulative_length: 0.0,
        increment: 0.0,
        delta_log_vol: 0.0,
    }];
    let mut ratios = Vec::new();
    for w in schedule.windows(2) {
        let (hi, lo) = (w[0], w[1]);
        ConePoint::new(form, gamma(lo))?;
        // substitute t = e^s so 1/t blow-up integrates smoothly
        let increment = gauss(lo.ln(), hi.ln(), |s| {
            let t = s.exp();
            Ok(speed(form, gamma(t), omega)? * t)
        })?;
        let prev = steps.last().expect("non-empty");
        let volume = form.volume(&gamma(lo))?;
        ratios.push(increment / ((hi / lo).ln() / n.sqrt()));
        steps.push(ProbeStep {
            t: lo,
            volume,
            cumulative_length: prev.cumulative_length + increment,
            increment,
            delta_log_vol: volume.ln() - prev.volume.ln(),
        });
    }
    let tail_variation = steps.last().expect("non-empty").increment;
    let window = &ratios[ratios.len().saturating_sub(DIVERGENCE_WINDOW)..];
    let min_growth_ratio = window.iter().copied().fold(f64::INFINITY, f64::min);
    let classification =
        if ratios.len() >= DIVERGENCE_WINDOW && min_growth_ratio >= DIVERGENCE_FACTOR {
            ProbeClass::Divergent
        } else if tail_variation < CONV_TOL {
            ProbeClass::Convergent
        } else {
            ProbeClass::Inconclusive
        };
    Ok(ProbeReport {
        steps,
        classification,
        tail_variation,
        min_growth_ratio,
    })
}
