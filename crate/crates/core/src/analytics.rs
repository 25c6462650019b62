//! Closed-form fidelities at exact resonance `tau = 2 pi ell`.
//!
//! For a plane-wave initial condition the overlap of the two evolved copies
//! of one beta-rotor is `J0(|W_N(xi0)| dk)`. Averaging it over a uniform
//! quasimomentum distribution and letting `N -> infinity` gives the
//! saturation value
//!
//! ```text
//! F*(dk) = ( (1/2pi) * integral_0^{2pi} J0^2(dk csc(a) / 2) da )^2
//! ```

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{midpoint, GaussLegendre, PanelRule, QuadratureSpec, Scheme};
use crate::specfun::{j0, w_n, xi0};

/// Absolute tolerance on `F*` between successive node doublings.
pub const FSTAR_TOLERANCE: f64 = 1e-6;

/// Upper end of the directly integrated part of the substituted tail; the
/// remainder is added from its closed-form mean.
const TAIL_CUTOFF: f64 = 500.0;

/// `J0(|W_N(xi0(beta, ell))| dk)`; one for `N = 0`.
pub fn overlap_single_beta(n_kicks: u64, dk: f64, beta: f64, ell: u32) -> f64 {
    if n_kicks == 0 {
        return 1.0;
    }
    let w = w_n(n_kicks, xi0(beta, ell)).expect("phase of a finite quasimomentum is finite");
    j0(w.magnitude * dk)
}

/// Fidelity of one beta-rotor started in a plane wave: `J0^2(|W_N| dk)`.
pub fn fidelity_single_beta(n_kicks: u64, dk: f64, beta: f64, ell: u32) -> f64 {
    overlap_single_beta(n_kicks, dk, beta, ell).powi(2)
}

/// Large-`N` form of the resonant fidelity together with a flag telling
/// whether `N dk >= 1`, below which the expansion is meaningless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    pub value: f64,
    pub in_regime: bool,
}

/// `(2 / (pi dk N)) cos^2(dk N - pi/4)`.
pub fn resonant_asymptote(n_kicks: u64, dk: f64) -> Asymptote {
    let x = dk * n_kicks as f64;
    let in_regime = x >= 1.0;
    if !in_regime {
        warn!("resonant asymptote evaluated at N dk = {x} < 1");
    }
    Asymptote {
        value: 2.0 / (PI * x) * (x - FRAC_PI_4).cos().powi(2),
        in_regime,
    }
}

/// `integral_0^1 J0(|W_N(xi0(beta))| dk) dbeta`.
///
/// The integrand has `N ell` oscillations on the unit interval; fewer than 8
/// nodes per oscillation is rejected.
pub fn ensemble_overlap_uniform(
    n_kicks: u64,
    dk: f64,
    ell: u32,
    quad: &QuadratureSpec,
) -> Result<f64> {
    quad.validate()?;
    let needed = 8 * n_kicks as usize * ell as usize;
    if quad.nodes < needed {
        return Err(Error::Accuracy(format!(
            "{} nodes cannot resolve the {} oscillations of the {}-kick integrand (need {})",
            quad.nodes,
            n_kicks as usize * ell as usize,
            n_kicks,
            needed
        )));
    }
    if dk == 0.0 {
        return Ok(1.0);
    }
    if n_kicks == 1 {
        // |W_1| = 1 for every quasimomentum.
        return Ok(j0(dk));
    }
    let f = |beta: f64| overlap_single_beta(n_kicks, dk, beta, ell);
    Ok(match quad.scheme {
        Scheme::Midpoint => midpoint(0.0, 1.0, quad.nodes, f),
        Scheme::GaussLegendreComposite => {
            let rule = GaussLegendre::new(32);
            let panels = quad.nodes.div_ceil(32);
            let h = 1.0 / panels as f64;
            (0..panels)
                .map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, f))
                .sum()
        }
    })
}

/// Saturation value `F*(dk)`.
///
/// By the symmetries of `csc` and the evenness of `J0^2` the full-period
/// integral is four times the integral over `(0, pi/2]`. That quarter is
/// split at `alpha = singularity_margin`:
///
/// * `[margin, pi/2]` is integrated in `alpha` on panels of equal width in
///   `z = dk / (2 sin alpha)`, so each panel holds a fixed fraction of an
///   oscillation;
/// * `(0, margin]` is mapped onto `z in [z_c, inf)`, where
///   `dalpha = dk dz / (z sqrt(4 z^2 - dk^2))`. It is integrated on panels up
///   to `z = 500`; beyond, the oscillating part of `J0^2 ~ (1 + sin 2z)/(pi z)`
///   is below `1e-9` and the mean part is added in closed form.
///
/// The panel count is doubled until two successive results agree to
/// [`FSTAR_TOLERANCE`], at most twice.
pub fn fstar(dk: f64, quad: &QuadratureSpec) -> Result<f64> {
    quad.validate()?;
    if !(dk.is_finite() && dk >= 0.0) {
        return Err(Error::Domain(format!(
            "kick difference {dk} must be non-negative"
        )));
    }
    if dk == 0.0 {
        return Ok(1.0);
    }
    let rule = PanelRule::from_spec(quad);
    let from_quarter = |quarter: f64| (2.0 * quarter / PI).powi(2);
    let mut previous = from_quarter(quarter_integral(dk, quad.singularity_margin, &rule, 0));
    for level in 1..=2 {
        let current = from_quarter(quarter_integral(dk, quad.singularity_margin, &rule, level));
        if (current - previous).abs() <= FSTAR_TOLERANCE {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::Accuracy(format!(
        "saturation quadrature at dk = {dk} did not converge to {FSTAR_TOLERANCE:e} \
         within two node doublings"
    )))
}

/// `integral_0^{pi/2} J0^2(dk / (2 sin a)) da` with `2^level` times the base
/// panel count.
fn quarter_integral(dk: f64, margin: f64, rule: &PanelRule, level: u32) -> f64 {
    let refine = 1usize << level;
    let z_lo = 0.5 * dk;
    let z_c = dk / (2.0 * margin.sin());

    let inner_panels = (((z_c - z_lo) / FRAC_PI_2).ceil() as usize).max(2) * refine;
    let dz = (z_c - z_lo) / inner_panels as f64;
    let alpha_at = |z: f64| (z_lo / z).min(1.0).asin();
    let integrand = |alpha: f64| j0(z_lo / alpha.sin()).powi(2);
    let mut inner = 0.0;
    for i in 0..inner_panels {
        let a_hi = if i == 0 {
            FRAC_PI_2
        } else {
            alpha_at(z_lo + i as f64 * dz)
        };
        let a_lo = if i + 1 == inner_panels {
            margin
        } else {
            alpha_at(z_lo + (i + 1) as f64 * dz)
        };
        inner += rule.integrate(a_lo, a_hi, integrand);
    }

    let weight = |z: f64| dk / (z * (4.0 * z * z - dk * dk).sqrt());
    let tail_integrand = |z: f64| j0(z).powi(2) * weight(z);
    let z_end = TAIL_CUTOFF.max(2.0 * z_c);
    let mut tail = 0.0;
    let mut z = z_c;
    while z < z_end {
        let h = (FRAC_PI_2.min(0.25 * z) / refine as f64).min(z_end - z);
        tail += rule.integrate(z, z + h, tail_integrand);
        z += h;
    }
    // integral_{z_end}^inf weight(z) / (pi z) dz
    let s = (4.0 - (dk / z_end).powi(2)).sqrt();
    let remainder = dk / (PI * z_end * z_end * (2.0 + s));

    inner + tail + remainder
}

/// `fstar` on every grid point, in input order.
pub fn saturation_curve(dk_grid: &[f64], quad: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    if dk_grid.is_empty() {
        return Err(Error::Domain("empty kick-difference grid".into()));
    }
    if let Some(bad) = dk_grid.iter().find(|dk| !(dk.is_finite() && **dk >= 0.0)) {
        return Err(Error::Domain(format!(
            "kick difference {bad} must be non-negative"
        )));
    }
    dk_grid
        .par_iter()
        .map(|&dk| fstar(dk, quad).map(|f| (dk, f)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_beta_examples() {
        assert_eq!(fidelity_single_beta(17, 0.0, 0.31, 2), 1.0);
        assert!(fidelity_single_beta(1, 2.404826, 0.5, 1) < 1e-12);
        assert!(fidelity_single_beta(2, 1.202413, 0.5, 1) < 1e-12);
        for n in [2u64, 4, 6, 40] {
            assert!((fidelity_single_beta(n, 1.7, 0.0, 1) - 1.0).abs() < 1e-14);
        }
        assert_eq!(fidelity_single_beta(0, 3.0, 0.5, 1), 1.0);
    }

    #[test]
    fn asymptote_examples() {
        let x = FRAC_PI_4 + FRAC_PI_2;
        let a = resonant_asymptote(1, x);
        assert!(a.value.abs() < 1e-30);
        assert!(a.in_regime);
        assert!(!resonant_asymptote(1, 0.5).in_regime);
        let a = resonant_asymptote(100, 0.5).value;
        let exact = j0(50.0).powi(2);
        assert!((a - exact).abs() / exact < 0.02);
    }

    #[test]
    fn uniform_average_examples() {
        let quad = QuadratureSpec::for_ensemble(7, 1);
        assert_eq!(ensemble_overlap_uniform(7, 0.0, 1, &quad).unwrap(), 1.0);
        let one = ensemble_overlap_uniform(1, 1.3, 1, &quad).unwrap();
        assert_eq!(one, j0(1.3));
        let coarse = QuadratureSpec {
            nodes: 100,
            ..QuadratureSpec::for_ensemble(50, 1)
        };
        assert!(matches!(
            ensemble_overlap_uniform(50, 1.0, 1, &coarse),
            Err(Error::Accuracy(_))
        ));
    }

    #[test]
    fn gauss_and_midpoint_averages_agree() {
        let mid = QuadratureSpec::for_ensemble(30, 2);
        let gauss = QuadratureSpec {
            scheme: Scheme::GaussLegendreComposite,
            ..mid
        };
        let a = ensemble_overlap_uniform(30, 1.1, 2, &mid).unwrap();
        let b = ensemble_overlap_uniform(30, 1.1, 2, &gauss).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn fstar_at_zero_and_errors() {
        let quad = QuadratureSpec::default();
        assert_eq!(fstar(0.0, &quad).unwrap(), 1.0);
        assert!(fstar(-1.0, &quad).is_err());
        assert!(saturation_curve(&[], &quad).is_err());
        assert!(saturation_curve(&[0.3, -0.1], &quad).is_err());
        assert_eq!(saturation_curve(&[0.0], &quad).unwrap(), vec![(0.0, 1.0)]);
    }
}
