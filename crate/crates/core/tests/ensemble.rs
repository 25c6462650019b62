use std::f64::consts::PI;

use rotorlab::analytics::overlap_single_beta;
use rotorlab::ensemble::{
    ensemble_fidelity, per_beta_contributions, sample_quasimomenta, Distribution, EnsembleSpec,
    Method, Sampling,
};
use rotorlab::rotor::{grid_half_width, RotorParams};
use rotorlab::specfun::{j0, xi0};

const K1: f64 = 0.8 * PI;

fn pair(epsilon: f64, dk: f64, n_kicks: usize) -> (RotorParams, RotorParams) {
    let p1 = RotorParams::new(1, epsilon, K1, 0.5, grid_half_width(0, K1, n_kicks)).unwrap();
    (p1, p1.with_k(K1 - dk))
}

#[test]
fn wrapped_gaussian_is_flat() {
    let spec = EnsembleSpec {
        distribution: Distribution::GaussianMomentum { sigma: 2.5 },
        count: 10_000,
        sampling: Sampling::Pseudorandom { seed: 2024 },
        n0: 0,
    };
    let betas = sample_quasimomenta(&spec).unwrap();
    assert!(betas.iter().all(|b| (0.0..1.0).contains(b)));
    let mut bins = [0usize; 20];
    for b in &betas {
        bins[(b * 20.0) as usize] += 1;
    }
    let expected = 10_000.0 / 20.0;
    let sigma = (10_000.0 * 0.05 * 0.95f64).sqrt();
    for (i, count) in bins.iter().enumerate() {
        assert!(
            (*count as f64 - expected).abs() <= 3.0 * sigma,
            "bin {i}: {count}"
        );
    }
}

#[test]
fn analytic_and_propagated_traces_agree() {
    let (p1, p2) = pair(0.0, 1.885, 30);
    let spec = EnsembleSpec::stratified(100);
    let analytic = ensemble_fidelity(&spec, &p1, &p2, 30, Method::AnalyticResonant).unwrap();
    let propagated = ensemble_fidelity(&spec, &p1, &p2, 30, Method::Propagator).unwrap();
    for n in 0..=30 {
        assert!(
            (analytic.fidelity[n] - propagated.fidelity[n]).abs() < 1e-8,
            "N = {n}: {} vs {}",
            analytic.fidelity[n],
            propagated.fidelity[n]
        );
    }
}

#[test]
fn traces_are_bounded_and_consistent() {
    let spec = EnsembleSpec::stratified(64);
    for (epsilon, method) in [(0.0, Method::AnalyticResonant), (0.07, Method::Propagator)] {
        let (p1, p2) = pair(epsilon, 0.9, 25);
        let trace = ensemble_fidelity(&spec, &p1, &p2, 25, method).unwrap();
        assert_eq!(trace.len(), 26);
        assert_eq!(trace.fidelity[0], 1.0);
        for (f, c) in trace.fidelity.iter().zip(&trace.mean_overlap) {
            assert!((0.0..=1.0 + 1e-12).contains(f));
            assert!((f - c.norm_sqr()).abs() <= 1e-12);
        }
    }
}

#[test]
fn zero_kick_difference_keeps_unit_fidelity() {
    let (p1, p2) = pair(0.1, 0.0, 20);
    let trace = ensemble_fidelity(
        &EnsembleSpec::stratified(16),
        &p1,
        &p2,
        20,
        Method::Propagator,
    )
    .unwrap();
    assert!(trace.fidelity.iter().all(|f| (f - 1.0).abs() < 1e-10));
}

#[test]
fn stratified_ensembles_converge_with_size() {
    let (p1, p2) = pair(0.0, 1.885, 50);
    let at = |count| {
        ensemble_fidelity(
            &EnsembleSpec::stratified(count),
            &p1,
            &p2,
            50,
            Method::AnalyticResonant,
        )
        .unwrap()
        .fidelity[50]
    };
    let (f2, f3, f4) = (at(100), at(1000), at(10_000));
    let (d1, d2) = ((f3 - f2).abs(), (f4 - f3).abs());
    assert!(d1 >= 4.0 * d2, "{f2} {f3} {f4}");
}

#[test]
fn thread_count_does_not_change_the_average() {
    let (p1, p2) = pair(0.025, 0.6283, 15);
    let spec = EnsembleSpec::stratified(48);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| ensemble_fidelity(&spec, &p1, &p2, 15, Method::Propagator).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn non_resonant_member_oscillates_above_its_floor() {
    let dk = 0.6283;
    let (p1, p2) = pair(0.0, dk, 200);
    // Stratified pair {0.25, 0.75}.
    let spec = EnsembleSpec::stratified(2);
    let w_bound = 1.0 / (0.5 * xi0(0.25, 1)).sin().abs();
    let floor = j0(w_bound * dk);
    let mut overlaps = Vec::new();
    for n in 1..=200 {
        let members = per_beta_contributions(&spec, &p1, &p2, n, Method::AnalyticResonant).unwrap();
        assert_eq!(members[0].0, 0.25);
        overlaps.push(members[0].1.re);
    }
    assert!(overlaps.iter().all(|&c| c >= floor - 1e-12));
    let turns = overlaps
        .windows(3)
        .filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0)
        .count();
    assert!(turns >= 50, "{turns} turning points");
    let late_min = overlaps[100..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let early_min = overlaps[..100]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    assert!((late_min - early_min).abs() < 1e-6);

    let propagated = per_beta_contributions(&spec, &p1, &p2, 200, Method::Propagator).unwrap();
    assert!((propagated[0].1.re - overlap_single_beta(200, dk, 0.25, 1)).abs() < 1e-8);
}
