//! Incoherent quasimomentum ensembles, their fidelity, and the Ramsey fringe
//! through which that fidelity is measured.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use rayon::prelude::*;

use crate::analytics::overlap_single_beta;
use crate::error::{Error, Result};
use crate::rotor::{
    ladder_overlap, FftPlans, Propagator, RotorParams, RotorState, LEAKAGE_THRESHOLD,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// `f(beta) = 1` on `[0, 1)`.
    Uniform01,
    /// Momentum `p ~ N(0, sigma^2)`, reduced to its fractional part.
    GaussianMomentum { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// `beta_j = (j + 1/2) / count`; uniform distribution only.
    Stratified,
    Pseudorandom {
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub distribution: Distribution,
    pub count: usize,
    pub sampling: Sampling,
    /// Ladder site of the initial plane wave of every member.
    pub n0: i64,
}

impl EnsembleSpec {
    pub fn stratified(count: usize) -> Self {
        Self {
            distribution: Distribution::Uniform01,
            count,
            sampling: Sampling::Stratified,
            n0: 0,
        }
    }
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self::stratified(10_000)
    }
}

pub fn sample_quasimomenta(spec: &EnsembleSpec) -> Result<Vec<f64>> {
    if spec.count == 0 {
        return Err(Error::Domain("ensemble needs at least one member".into()));
    }
    if let Distribution::GaussianMomentum { sigma } = spec.distribution {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Domain(format!(
                "momentum width {sigma} must be positive"
            )));
        }
    }
    let count = spec.count;
    match (spec.sampling, spec.distribution) {
        (Sampling::Stratified, Distribution::Uniform01) => Ok((0..count)
            .map(|j| (j as f64 + 0.5) / count as f64)
            .collect()),
        (Sampling::Stratified, Distribution::GaussianMomentum { .. }) => Err(Error::Domain(
            "stratified sampling is defined for the uniform distribution only".into(),
        )),
        (Sampling::Pseudorandom { seed }, Distribution::Uniform01) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count).map(|_| rng.gen::<f64>()).collect())
        }
        (Sampling::Pseudorandom { seed }, Distribution::GaussianMomentum { sigma }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(0.0, sigma).map_err(|e| Error::Domain(e.to_string()))?;
            Ok((0..count)
                .map(|_| {
                    let beta = normal.sample(&mut rng).rem_euclid(1.0);
                    if beta >= 1.0 {
                        0.0
                    } else {
                        beta
                    }
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Closed-form per-beta overlap `J0(|W_N| dk)`; exact resonance only.
    AnalyticResonant,
    /// Two split-operator evolutions per quasimomentum.
    Propagator,
}

/// Ensemble-averaged overlap and fidelity for `N = 0, 1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    pub n_kicks: Vec<u64>,
    pub mean_overlap: Vec<Complex64>,
    pub fidelity: Vec<f64>,
}

impl FidelityTrace {
    fn from_overlaps(mean_overlap: Vec<Complex64>) -> Self {
        Self {
            n_kicks: (0..mean_overlap.len() as u64).collect(),
            fidelity: mean_overlap.iter().map(|c| c.norm_sqr()).collect(),
            mean_overlap,
        }
    }

    pub fn len(&self) -> usize {
        self.n_kicks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_kicks.is_empty()
    }
}

fn check_pair(params1: &RotorParams, params2: &RotorParams, method: Method) -> Result<()> {
    params1.validate()?;
    params2.validate()?;
    if params1.tau != params2.tau || params1.ell != params2.ell || params1.n_max != params2.n_max {
        return Err(Error::Domain(
            "the two evolutions may differ only in the kick strength".into(),
        ));
    }
    if method == Method::AnalyticResonant && params1.epsilon() != 0.0 {
        return Err(Error::Domain(format!(
            "closed-form overlaps need exact resonance, detuning is {}",
            params1.epsilon()
        )));
    }
    Ok(())
}

/// Overlaps `<U1^N psi_beta | U2^N psi_beta>` for `N = 0..=n_kicks` of one
/// quasimomentum.
fn overlap_series(
    beta: f64,
    n0: i64,
    params1: &RotorParams,
    params2: &RotorParams,
    n_kicks: usize,
    method: Method,
    plans: &FftPlans,
) -> Result<Vec<Complex64>> {
    match method {
        Method::AnalyticResonant => {
            let dk = params1.k - params2.k;
            Ok((0..=n_kicks as u64)
                .map(|n| Complex64::new(overlap_single_beta(n, dk, beta, params1.ell), 0.0))
                .collect())
        }
        Method::Propagator => {
            let mut prop1 = Propagator::with_plans(params1.with_beta(beta), plans.clone())?;
            let mut prop2 = Propagator::with_plans(params2.with_beta(beta), plans.clone())?;
            let start = RotorState::plane_wave(n0, beta, params1.n_max)?.into_amplitudes();
            let mut a = start.clone();
            let mut b = start;
            let mut series = Vec::with_capacity(n_kicks + 1);
            series.push(ladder_overlap(&a, &b));
            for kick in 1..=n_kicks {
                let edge = prop1.apply(&mut a).max(prop2.apply(&mut b));
                if edge >= LEAKAGE_THRESHOLD {
                    return Err(Error::Truncation {
                        kick,
                        edge,
                        n_max: params1.n_max,
                    });
                }
                series.push(ladder_overlap(&a, &b));
            }
            Ok(series)
        }
    }
}

fn all_series(
    spec: &EnsembleSpec,
    params1: &RotorParams,
    params2: &RotorParams,
    n_kicks: usize,
    method: Method,
) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    check_pair(params1, params2, method)?;
    let betas = sample_quasimomenta(spec)?;
    let plans = FftPlans::new(params1.grid_len());
    let series = betas
        .par_iter()
        .map(|&beta| overlap_series(beta, spec.n0, params1, params2, n_kicks, method, &plans))
        .collect::<Result<Vec<_>>>()?;
    Ok((betas, series))
}

/// Fidelity of the incoherent ensemble, `|mean_beta <U1^N psi|U2^N psi>|^2`,
/// for `N = 0..=n_max_kicks`. The `beta` fields of the parameters are
/// ignored; each member uses its sampled quasimomentum.
///
/// Per-member overlaps are summed in ascending sample order, so the result
/// does not depend on the thread count.
pub fn ensemble_fidelity(
    spec: &EnsembleSpec,
    params1: &RotorParams,
    params2: &RotorParams,
    n_max_kicks: usize,
    method: Method,
) -> Result<FidelityTrace> {
    let (betas, series) = all_series(spec, params1, params2, n_max_kicks, method)?;
    let weight = 1.0 / betas.len() as f64;
    let mut mean = vec![Complex64::new(0.0, 0.0); n_max_kicks + 1];
    for member in &series {
        for (acc, c) in mean.iter_mut().zip(member) {
            *acc += c;
        }
    }
    for c in &mut mean {
        *c *= weight;
    }
    Ok(FidelityTrace::from_overlaps(mean))
}

/// Unaveraged per-member overlaps after `n_kicks` kicks.
pub fn per_beta_contributions(
    spec: &EnsembleSpec,
    params1: &RotorParams,
    params2: &RotorParams,
    n_kicks: usize,
    method: Method,
) -> Result<Vec<(f64, Complex64)>> {
    let (betas, series) = all_series(spec, params1, params2, n_kicks, method)?;
    Ok(betas
        .into_iter()
        .zip(series)
        .map(|(beta, s)| (beta, s[n_kicks]))
        .collect())
}

/// Population of the upper level versus the scanned Ramsey phase.
#[derive(Debug, Clone, PartialEq)]
pub struct RamseyScan {
    pub phases: Vec<f64>,
    pub population: Vec<f64>,
    pub extracted_fidelity: f64,
}

/// `P1(phi) = (1 + sqrt(F) cos(phi + offset)) / 2` on the given phases.
///
/// The level energies and the shift between the pulse phase and the fringe
/// phase only translate the fringe, so they are lumped into `phase_offset`.
pub fn ramsey_population(fidelity: f64, phase_offset: f64, phases: &[f64]) -> Result<RamseyScan> {
    let amplitude = fidelity.clamp(0.0, 1.0).sqrt();
    let population: Vec<f64> = phases
        .iter()
        .map(|phi| 0.5 * (1.0 + amplitude * (phi + phase_offset).cos()))
        .collect();
    let extracted_fidelity = extract_visibility(&population)?;
    Ok(RamseyScan {
        phases: phases.to_vec(),
        population,
        extracted_fidelity,
    })
}

/// Ramsey fringe produced by an ensemble-averaged overlap `c`: the fringe
/// contrast is `|c|` and its phase is `arg c`.
pub fn ramsey_from_overlap(mean_overlap: Complex64, phases: &[f64]) -> Result<RamseyScan> {
    ramsey_population(mean_overlap.norm_sqr(), mean_overlap.arg(), phases)
}

/// `(max P1 - min P1)^2`.
pub fn extract_visibility(population: &[f64]) -> Result<f64> {
    if population.len() < 2 {
        return Err(Error::Domain(format!(
            "visibility needs at least two samples, got {}",
            population.len()
        )));
    }
    let max = population.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = population.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((max - min).powi(2))
}

/// `n` equally spaced phases covering `[0, 2 pi)`.
pub fn uniform_phases(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}
