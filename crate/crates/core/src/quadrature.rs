//! Quadrature rules shared by the analytic averages.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Rule applied on each panel (or on the whole interval for the
/// quasimomentum average).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Midpoint,
    GaussLegendreComposite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub scheme: Scheme,
    /// Half-width of the neighbourhood around a singular abscissa that is
    /// handled by a change of variables instead of direct sampling.
    pub singularity_margin: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: 32,
            scheme: Scheme::GaussLegendreComposite,
            singularity_margin: PI / 16.0,
        }
    }
}

impl QuadratureSpec {
    /// Midpoint rule resolving every oscillation of the `N`-kick
    /// quasimomentum integrand with at least 64 nodes.
    pub fn for_ensemble(n_kicks: u64, ell: u32) -> Self {
        Self {
            nodes: 4096.max(64 * n_kicks as usize * ell as usize),
            scheme: Scheme::Midpoint,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 16 {
            return Err(Error::Domain(format!(
                "quadrature needs at least 16 nodes, got {}",
                self.nodes
            )));
        }
        let margin = self.singularity_margin;
        if !(margin > 0.0 && margin < PI / 8.0) {
            return Err(Error::Domain(format!(
                "singularity margin {margin} must lie in (0, pi/8)"
            )));
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum();
        half * sum
    }
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Panel rule selected by a [`QuadratureSpec`]: an `n`-point Gauss-Legendre
/// or midpoint rule applied per panel.
pub(crate) enum PanelRule {
    Gauss(GaussLegendre),
    Midpoint(usize),
}

impl PanelRule {
    pub(crate) fn from_spec(spec: &QuadratureSpec) -> Self {
        match spec.scheme {
            Scheme::GaussLegendreComposite => Self::Gauss(GaussLegendre::new(spec.nodes)),
            Scheme::Midpoint => Self::Midpoint(spec.nodes),
        }
    }

    pub(crate) fn integrate(&self, a: f64, b: f64, f: impl FnMut(f64) -> f64) -> f64 {
        match self {
            Self::Gauss(rule) => rule.integrate(a, b, f),
            Self::Midpoint(n) => midpoint(a, b, *n, f),
        }
    }
}

/// Composite midpoint rule with `n` nodes on `[a, b]`.
pub fn midpoint(a: f64, b: f64, n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}
