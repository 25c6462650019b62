//! Stroboscopic propagation of a single beta-rotor.
//!
//! The state lives on the truncated integer-momentum ladder
//! `n = -n_max ..= n_max`. One period applies the free phase
//! `exp(-i (tau/2) (n + beta)^2)` on the ladder, then the kick
//! `exp(-i k cos theta)` on the conjugate `M`-point angle grid.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Edge occupation above which a state is considered truncated.
pub const LEAKAGE_THRESHOLD: f64 = 1e-12;

/// Tolerance on the norm of an input state.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Parameters of one beta-rotor. The detuning `2 pi ell - tau` is derived
/// from the stored period, never stored on its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorParams {
    pub tau: f64,
    pub k: f64,
    pub beta: f64,
    pub ell: u32,
    pub n_max: usize,
}

impl RotorParams {
    /// Period `tau = 2 pi ell - epsilon`.
    pub fn new(ell: u32, epsilon: f64, k: f64, beta: f64, n_max: usize) -> Result<Self> {
        let params = Self {
            tau: 2.0 * PI * f64::from(ell) - epsilon,
            k,
            beta,
            ell,
            n_max,
        };
        params.validate()?;
        Ok(params)
    }

    /// Exact resonance `tau = 2 pi ell`.
    pub fn resonant(ell: u32, k: f64, beta: f64, n_max: usize) -> Result<Self> {
        Self::new(ell, 0.0, k, beta, n_max)
    }

    pub fn epsilon(&self) -> f64 {
        2.0 * PI * f64::from(self.ell) - self.tau
    }

    /// Number of ladder sites, always odd.
    pub fn grid_len(&self) -> usize {
        2 * self.n_max + 1
    }

    pub fn with_k(self, k: f64) -> Self {
        Self { k, ..self }
    }

    pub fn with_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }

    pub fn with_n_max(self, n_max: usize) -> Self {
        Self { n_max, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Domain(format!(
                "kicking period {} must be positive",
                self.tau
            )));
        }
        if !(self.k.is_finite() && self.k >= 0.0) {
            return Err(Error::Domain(format!(
                "kick strength {} must be non-negative",
                self.k
            )));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::Domain(format!(
                "quasimomentum {} must lie in [0, 1)",
                self.beta
            )));
        }
        if self.ell == 0 {
            return Err(Error::Domain("resonance order must be positive".into()));
        }
        if self.n_max == 0 {
            return Err(Error::Domain("grid half-width must be positive".into()));
        }
        Ok(())
    }
}

/// Grid half-width large enough to hold `n_kicks` kicks of strength up to
/// `k_max` starting from ladder site `n0`.
pub fn grid_half_width(n0: i64, k_max: f64, n_kicks: usize) -> usize {
    n0.unsigned_abs() as usize + (1.5 * (k_max * n_kicks as f64 + 10.0)).ceil() as usize
}

/// Amplitudes on the momentum ladder; entry `j` holds `<n|psi>` for
/// `n = j - n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotorState {
    beta: f64,
    amplitudes: Vec<Complex64>,
}

impl RotorState {
    /// Plane wave of momentum `n0 + beta`.
    pub fn plane_wave(n0: i64, beta: f64, n_max: usize) -> Result<Self> {
        if n0.unsigned_abs() as usize > n_max {
            return Err(Error::Grid { n0, n_max });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        amplitudes[(n0 + n_max as i64) as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { beta, amplitudes })
    }

    /// Wraps raw amplitudes. The length must be odd.
    pub fn from_amplitudes(beta: f64, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len().is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "ladder length {} must be odd",
                amplitudes.len()
            )));
        }
        Ok(Self { beta, amplitudes })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() / 2
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude at ladder site `n`, zero outside the grid.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        let j = n + self.n_max() as i64;
        if j < 0 || j as usize >= self.amplitudes.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[j as usize]
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Larger of the two edge occupations `|<+-n_max|psi>|^2`.
    pub fn edge_occupation(&self) -> f64 {
        let first = self.amplitudes[0].norm_sqr();
        let last = self.amplitudes[self.amplitudes.len() - 1].norm_sqr();
        first.max(last)
    }

    /// Checks the norm and truncation guards.
    pub fn check_valid(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Domain(format!("state norm {norm} differs from one")));
        }
        let edge = self.edge_occupation();
        if edge >= LEAKAGE_THRESHOLD {
            return Err(Error::Truncation {
                kick: 0,
                edge,
                n_max: self.n_max(),
            });
        }
        Ok(())
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }
}

/// Mean kinetic energy `sum |<n|psi>|^2 (n + beta)^2 / 2`.
pub fn energy(state: &RotorState) -> f64 {
    let n_max = state.n_max() as i64;
    state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let p = (j as i64 - n_max) as f64 + state.beta;
            0.5 * c.norm_sqr() * p * p
        })
        .sum()
}

/// `<a|b>`.
pub fn overlap(a: &RotorState, b: &RotorState) -> Result<Complex64> {
    if a.beta != b.beta {
        return Err(Error::Domain(format!(
            "overlap of states with quasimomenta {} and {}",
            a.beta, b.beta
        )));
    }
    if a.amplitudes.len() != b.amplitudes.len() {
        return Err(Error::Domain(format!(
            "overlap of states on grids of size {} and {}",
            a.amplitudes.len(),
            b.amplitudes.len()
        )));
    }
    Ok(ladder_overlap(&a.amplitudes, &b.amplitudes))
}

pub(crate) fn ladder_overlap(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|<n|psi>|^2` on every ladder site.
pub fn momentum_distribution(state: &RotorState) -> Vec<f64> {
    state.amplitudes.iter().map(|c| c.norm_sqr()).collect()
}

/// Forward/inverse transforms for one grid size; cheap to clone and share
/// between threads.
#[derive(Clone)]
pub struct FftPlans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPlans {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One-period Floquet operator with precomputed phase tables.
pub struct Propagator {
    params: RotorParams,
    free_phase: Vec<Complex64>,
    kick: Vec<Complex64>,
    plans: FftPlans,
    scratch: Vec<Complex64>,
}

impl Propagator {
    pub fn new(params: RotorParams) -> Result<Self> {
        let plans = FftPlans::new(params.grid_len());
        Self::with_plans(params, plans)
    }

    pub fn with_plans(params: RotorParams, plans: FftPlans) -> Result<Self> {
        params.validate()?;
        let m = params.grid_len();
        if plans.len() != m {
            return Err(Error::Domain(format!(
                "transform of size {} for a grid of size {m}",
                plans.len()
            )));
        }
        let n_max = params.n_max as i64;
        let free_phase = (0..m)
            .map(|j| {
                let p = (j as i64 - n_max) as f64 + params.beta;
                Complex64::from_polar(1.0, -0.5 * params.tau * p * p)
            })
            .collect();
        let kick = (0..m)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / m as f64;
                Complex64::from_polar(1.0, -params.k * theta.cos())
            })
            .collect();
        let scratch_len = plans
            .forward
            .get_inplace_scratch_len()
            .max(plans.inverse.get_inplace_scratch_len());
        Ok(Self {
            params,
            free_phase,
            kick,
            plans,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    pub fn params(&self) -> &RotorParams {
        &self.params
    }

    /// Applies one period in place and returns the edge occupation.
    pub fn apply(&mut self, amplitudes: &mut [Complex64]) -> f64 {
        debug_assert_eq!(amplitudes.len(), self.kick.len());
        for (c, phase) in amplitudes.iter_mut().zip(&self.free_phase) {
            *c *= phase;
        }
        // Ladder -> angle grid. The n_max index offset contributes a phase
        // on the angle grid that cancels between the two transforms.
        self.plans
            .inverse
            .process_with_scratch(amplitudes, &mut self.scratch);
        for (c, kick) in amplitudes.iter_mut().zip(&self.kick) {
            *c *= kick;
        }
        self.plans
            .forward
            .process_with_scratch(amplitudes, &mut self.scratch);
        let scale = 1.0 / amplitudes.len() as f64;
        for c in amplitudes.iter_mut() {
            *c *= scale;
        }
        let last = amplitudes.len() - 1;
        amplitudes[0].norm_sqr().max(amplitudes[last].norm_sqr())
    }

    /// Applies `n_kicks` periods to `state` in place, checking the leakage
    /// guard after every kick.
    pub fn evolve_in_place(&mut self, state: &mut RotorState, n_kicks: usize) -> Result<()> {
        self.check_compatible(state)?;
        for kick in 1..=n_kicks {
            let edge = self.apply(&mut state.amplitudes);
            if edge >= LEAKAGE_THRESHOLD {
                return Err(Error::Truncation {
                    kick,
                    edge,
                    n_max: self.params.n_max,
                });
            }
        }
        Ok(())
    }

    fn check_compatible(&self, state: &RotorState) -> Result<()> {
        if state.beta != self.params.beta {
            return Err(Error::Domain(format!(
                "state quasimomentum {} differs from propagator quasimomentum {}",
                state.beta, self.params.beta
            )));
        }
        if state.amplitudes.len() != self.params.grid_len() {
            return Err(Error::Domain(format!(
                "state grid of size {} differs from propagator grid of size {}",
                state.amplitudes.len(),
                self.params.grid_len()
            )));
        }
        Ok(())
    }
}

/// `U_beta |state>` for one period.
pub fn evolve_one_kick(state: &RotorState, params: &RotorParams) -> Result<RotorState> {
    evolve_kicks(state, params, 1)
}

/// `U_beta^N |state>`; `N = 0` returns the input unchanged.
pub fn evolve_kicks(
    state: &RotorState,
    params: &RotorParams,
    n_kicks: usize,
) -> Result<RotorState> {
    let mut propagator = Propagator::new(*params)?;
    propagator.check_compatible(state)?;
    state.check_valid()?;
    let mut out = state.clone();
    propagator.evolve_in_place(&mut out, n_kicks)?;
    Ok(out)
}
