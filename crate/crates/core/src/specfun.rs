//! Bessel functions of orders zero and one, their first zeros, and the
//! kick-accumulation phasor sum `W_N(xi) = sum_{s=0}^{N-1} exp(-i s xi)`.
//!
//! The Bessel evaluator switches between three representations:
//!
//! * `|z| < 2`: ascending power series (all terms below one in magnitude).
//! * `2 <= |z| < 25`: Miller backward recurrence normalised with
//!   `J0 + 2 (J2 + J4 + ...) = 1`.
//! * `|z| >= 25`: Hankel asymptotic expansion, summed until the terms drop
//!   below the double-precision floor.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 2.0;
const HANKEL_LIMIT: f64 = 25.0;

/// J0 of a real argument. Non-finite input propagates as NaN.
pub fn j0(z: f64) -> f64 {
    if !z.is_finite() {
        return f64::NAN;
    }
    let x = z.abs();
    if x < SERIES_LIMIT {
        series(x).0
    } else if x < HANKEL_LIMIT {
        miller(x).0
    } else {
        hankel(x, 0)
    }
}

/// J1 of a real argument. Non-finite input propagates as NaN.
pub fn j1(z: f64) -> f64 {
    if !z.is_finite() {
        return f64::NAN;
    }
    let x = z.abs();
    let value = if x < SERIES_LIMIT {
        series(x).1
    } else if x < HANKEL_LIMIT {
        miller(x).1
    } else {
        hankel(x, 1)
    };
    if z < 0.0 {
        -value
    } else {
        value
    }
}

/// Checked J0: rejects non-finite arguments.
pub fn bessel_j0(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!(
            "bessel_j0 argument {z} is not finite"
        )));
    }
    Ok(j0(z))
}

/// Checked J1: rejects non-finite arguments.
pub fn bessel_j1(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!(
            "bessel_j1 argument {z} is not finite"
        )));
    }
    Ok(j1(z))
}

fn series(x: f64) -> (f64, f64) {
    let q = -0.25 * x * x;
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut s0 = 1.0;
    let mut s1 = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        s0 += t0;
        s1 += t1;
        if t0.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    (s0, 0.5 * x * s1)
}

fn miller(x: f64) -> (f64, f64) {
    let mut m = (1.5 * x + 40.0) as usize;
    if m % 2 == 1 {
        m += 1;
    }
    let two_over_x = 2.0 / x;
    let mut above = 0.0_f64;
    let mut current = 1e-30_f64;
    let mut norm = 0.0_f64;
    let mut j1_unscaled = 0.0_f64;
    // `current` holds the unnormalised J_k; step down to k = 0.
    for k in (1..=m).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        let order = k - 1;
        if order == 1 {
            j1_unscaled = current;
        }
        if order > 0 && order % 2 == 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            j1_unscaled *= 1e-250;
        }
    }
    norm += current;
    (current / norm, j1_unscaled / norm)
}

fn hankel(x: f64, order: u32) -> f64 {
    let mu = 4.0 * f64::from(order * order);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut previous = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let magnitude = term.abs();
        if magnitude > previous {
            break;
        }
        previous = magnitude;
        // k = 1, 2, 3, 4, ... contributes +Q, -P, -Q, +P, ...
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if magnitude < 1e-17 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    let (cos_chi, sin_chi) = if order == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// First positive zeros of J0 and J1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselZeros {
    pub z0: f64,
    pub z1: f64,
}

impl BesselZeros {
    /// Locates both zeros by Newton iteration on the evaluator itself.
    pub fn compute() -> Self {
        let z0 = newton(2.4, |z| (j0(z), -j1(z)));
        let z1 = newton(3.8, |z| {
            let v = j1(z);
            (v, j0(z) - v / z)
        });
        Self { z0, z1 }
    }
}

fn newton(mut z: f64, f: impl Fn(f64) -> (f64, f64)) -> f64 {
    for _ in 0..50 {
        let (value, slope) = f(z);
        let step = value / slope;
        z -= step;
        if step.abs() < 1e-15 * z.abs() {
            break;
        }
    }
    z
}

/// `pi * ell * (2 beta - 1)`: the constant phase advance per kick felt by a
/// plane wave of quasimomentum `beta` at the resonance `tau = 2 pi ell`.
pub fn xi0(beta: f64, ell: u32) -> f64 {
    PI * f64::from(ell) * (2.0 * beta - 1.0)
}

/// Modulus and argument of `W_N(xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasorSum {
    pub magnitude: f64,
    /// In `(-pi, pi]`.
    pub argument: f64,
}

impl PhasorSum {
    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.argument)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut a = angle.rem_euclid(two_pi);
    if a > PI {
        a -= two_pi;
    }
    a + 0.0
}

/// `W_N(xi)`. Uses the sine ratio away from `xi = 0 mod 2 pi` and the direct
/// phasor sum inside `|sin(xi/2)| < 1e-8`, where the ratio is 0/0.
pub fn w_n(n_kicks: u64, xi: f64) -> Result<PhasorSum> {
    if n_kicks == 0 {
        return Err(Error::Domain("W_N needs at least one kick".into()));
    }
    if !xi.is_finite() {
        return Err(Error::Domain(format!("W_N phase {xi} is not finite")));
    }
    let n = n_kicks as f64;
    if n_kicks == 1 {
        return Ok(PhasorSum {
            magnitude: 1.0,
            argument: 0.0,
        });
    }
    let half_sin = (0.5 * xi).sin();
    if half_sin.abs() < 1e-8 {
        let sum: Complex64 = (0..n_kicks)
            .map(|s| Complex64::from_polar(1.0, -(s as f64) * xi))
            .sum();
        return Ok(PhasorSum {
            magnitude: sum.norm().min(n),
            argument: wrap_angle(sum.arg()),
        });
    }
    let ratio = (0.5 * n * xi).sin() / half_sin;
    let mut argument = -0.5 * (n - 1.0) * xi;
    if ratio < 0.0 {
        argument += PI;
    }
    Ok(PhasorSum {
        magnitude: ratio.abs().min(n),
        argument: wrap_angle(argument),
    })
}
