//! One function per subcommand. Each takes a resolved configuration and
//! returns the finished table; nothing here touches the filesystem.

use std::f64::consts::PI;

use rotorlab::analytics::{fidelity_single_beta, fstar, resonant_asymptote, saturation_curve};
use rotorlab::ensemble::{ensemble_fidelity, ramsey_from_overlap, uniform_phases, Method};
use rotorlab::rotor::{energy, grid_half_width, overlap, Propagator, RotorParams, RotorState};
use rotorlab::specfun::{wrap_angle, xi0};

use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;
use crate::table::CsvTable;

/// Fewest phases accepted by `ramsey`. With `n` uniform phases the extracted
/// visibility underestimates `F` by at most `F sin^2(pi / n)`.
pub const MIN_RAMSEY_PHASES: usize = 8;

/// Runs the command the configuration was resolved for.
pub fn execute(config: &ExperimentConfig) -> Result<CsvTable, CliError> {
    let command = config
        .command
        .ok_or_else(|| CliError::Config("configuration names no command".into()))?;
    let mut table = match command {
        Command::SingleBeta => cmd_single_beta(config)?,
        Command::Fig2Main => cmd_fig2_main(config)?,
        Command::Fig2Inset => cmd_fig2_inset(config)?,
        Command::Ramsey => cmd_ramsey(config)?,
        Command::Energy => cmd_energy(config)?,
    };
    let annotations = std::mem::take(&mut table.header);
    table.set_config(config);
    table.header.extend(annotations);
    Ok(table)
}

/// Kick strengths `(k1, k1 - dk)`. Kick strengths are non-negative, so a
/// difference larger than `k1` is realised as `(dk, 0)` instead; at
/// resonance the fidelity depends on the pair only through `dk`.
pub fn kick_strengths(k1: f64, dk: f64) -> (f64, f64) {
    let upper = k1.max(dk);
    (upper, upper - dk)
}

/// Grid half-width: the configured value, or the sizing rule for the
/// strongest kick `k_max` over the run.
fn n_max_for(config: &ExperimentConfig, k_max: f64, n_kicks: u64) -> usize {
    match config.rotor.n_max {
        0 => grid_half_width(config.rotor.n0, k_max, n_kicks as usize),
        n => n,
    }
}

/// The pair of evolutions for the configured `dk` at detuning `epsilon`.
fn kick_pair(
    config: &ExperimentConfig,
    epsilon: f64,
    n_kicks: u64,
) -> Result<(RotorParams, RotorParams), CliError> {
    let r = &config.rotor;
    let (ka, kb) = kick_strengths(r.k1, r.dk);
    let p1 = RotorParams::new(r.ell, epsilon, ka, r.beta, n_max_for(config, ka, n_kicks))?;
    Ok((p1, p1.with_k(kb)))
}

fn is_resonant_beta(beta: f64, ell: u32) -> bool {
    wrap_angle(xi0(beta, ell)).abs() < 1e-12
}

/// Single-member fidelity for `N = 0..=n_kicks` by propagating both copies.
fn propagated_single_beta(config: &ExperimentConfig) -> Result<Vec<f64>, CliError> {
    let n_kicks = config.run.n_kicks;
    let (p1, p2) = kick_pair(config, config.rotor.epsilon, n_kicks)?;
    let mut u1 = Propagator::new(p1)?;
    let mut u2 = Propagator::new(p2)?;
    let mut a = RotorState::plane_wave(config.rotor.n0, p1.beta, p1.n_max)?;
    let mut b = a.clone();
    let mut out = vec![1.0];
    for _ in 0..n_kicks {
        u1.evolve_in_place(&mut a, 1)?;
        u2.evolve_in_place(&mut b, 1)?;
        out.push(overlap(&a, &b)?.norm_sqr());
    }
    Ok(out)
}

/// Columns `N, F_beta` and, for a resonant quasimomentum at exact
/// resonance, `F_asymptote` (`NaN` where `N dk < 1`).
pub fn cmd_single_beta(config: &ExperimentConfig) -> Result<CsvTable, CliError> {
    let r = &config.rotor;
    let n_kicks = config.run.n_kicks;
    let analytic = r.epsilon == 0.0 && config.method() == Method::AnalyticResonant;
    let fidelity = if analytic {
        (0..=n_kicks)
            .map(|n| fidelity_single_beta(n, r.dk, r.beta, r.ell))
            .collect()
    } else {
        propagated_single_beta(config)?
    };

    let with_asymptote = r.epsilon == 0.0 && is_resonant_beta(r.beta, r.ell);
    let mut table = if with_asymptote {
        CsvTable::new(&["N", "F_beta", "F_asymptote"])
    } else {
        CsvTable::new(&["N", "F_beta"])
    }
    .integer_column(0);
    for (n, f) in (0..=n_kicks).zip(fidelity) {
        let mut row = vec![n as f64, f];
        if with_asymptote {
            row.push(if n as f64 * r.dk >= 1.0 {
                resonant_asymptote(n, r.dk).value
            } else {
                f64::NAN
            });
        }
        table.push_row(row);
    }
    Ok(table)
}

/// Columns `dk, fstar, F_numeric_N<n>`: the saturation curve and the
/// ensemble fidelity after `n` kicks on the configured grid.
pub fn cmd_fig2_main(config: &ExperimentConfig) -> Result<CsvTable, CliError> {
    let n_kicks = config.run.n_kicks;
    let grid = config.dk_grid();
    let curve = saturation_curve(&grid, &config.quadrature_spec())?;
    let spec = config.ensemble_spec();
    let numeric_name = format!("F_numeric_N{n_kicks}");
    let mut table = CsvTable::new(&["dk", "fstar", &numeric_name]);
    for (dk, f_star) in curve {
        let mut pair_config = config.clone();
        pair_config.rotor.dk = dk;
        let (p1, p2) = kick_pair(&pair_config, config.rotor.epsilon, n_kicks)?;
        let trace = ensemble_fidelity(&spec, &p1, &p2, n_kicks as usize, config.method())?;
        table.push_row(vec![dk, f_star, trace.fidelity[n_kicks as usize]]);
    }
    Ok(table)
}

/// Column name for a detuned trace: `0.025 -> F_eps0p025`.
pub fn detuning_column(epsilon: f64) -> String {
    format!(
        "F_eps{}",
        epsilon.to_string().replace('-', "m").replace('.', "p")
    )
}

/// Columns `N, N_dk, F_resonant_eps0` and one propagated column per
/// configured detuning; the saturation value is written as `plateau`.
pub fn cmd_fig2_inset(config: &ExperimentConfig) -> Result<CsvTable, CliError> {
    let n_kicks = config.run.n_kicks;
    let dk = config.rotor.dk;
    let spec = config.ensemble_spec();

    let (p1, p2) = kick_pair(config, 0.0, n_kicks)?;
    let resonant = ensemble_fidelity(&spec, &p1, &p2, n_kicks as usize, Method::AnalyticResonant)?;
    let mut detuned = Vec::with_capacity(config.run.epsilons.len());
    for &epsilon in &config.run.epsilons {
        let (p1, p2) = kick_pair(config, epsilon, n_kicks)?;
        detuned.push(ensemble_fidelity(
            &spec,
            &p1,
            &p2,
            n_kicks as usize,
            Method::Propagator,
        )?);
    }

    let mut names = vec!["N".to_string(), "N_dk".into(), "F_resonant_eps0".into()];
    names.extend(config.run.epsilons.iter().map(|&e| detuning_column(e)));
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut table = CsvTable::new(&names).integer_column(0);
    table.annotate(
        "plateau",
        format!("{:.16e}", fstar(dk, &config.quadrature_spec())?),
    );
    for n in 0..=n_kicks as usize {
        let mut row = vec![n as f64, n as f64 * dk, resonant.fidelity[n]];
        row.extend(detuned.iter().map(|t| t.fidelity[n]));
        table.push_row(row);
    }
    Ok(table)
}

/// Columns `phi, P1` for the fringe after `n_kicks`; the ensemble fidelity
/// and the visibility read off the fringe are written to the header.
pub fn cmd_ramsey(config: &ExperimentConfig) -> Result<CsvTable, CliError> {
    let phases = config.run.phases;
    if phases < MIN_RAMSEY_PHASES {
        return Err(CliError::Domain(format!(
            "{phases} phases cannot resolve the fringe; use at least {MIN_RAMSEY_PHASES}"
        )));
    }
    let n_kicks = config.run.n_kicks as usize;
    let (p1, p2) = kick_pair(config, config.rotor.epsilon, n_kicks as u64)?;
    let trace = ensemble_fidelity(&config.ensemble_spec(), &p1, &p2, n_kicks, config.method())?;
    let fidelity = trace.fidelity[n_kicks];
    let scan = ramsey_from_overlap(trace.mean_overlap[n_kicks], &uniform_phases(phases))?;

    let mut table = CsvTable::new(&["phi", "P1"]);
    table.annotate("fidelity", format!("{fidelity:.16e}"));
    table.annotate(
        "extracted_fidelity",
        format!("{:.16e}", scan.extracted_fidelity),
    );
    table.annotate(
        "grid_bias_bound",
        format!("{:.3e}", fidelity * (PI / phases as f64).sin().powi(2)),
    );
    for (phi, p) in scan.phases.iter().zip(&scan.population) {
        table.push_row(vec![*phi, *p]);
    }
    Ok(table)
}

/// Columns `N, E` for one quasimomentum kicked with `k1`; the least-squares
/// coefficient `a` of `E(N) - E(0) = a N^2` is written as `fit_coefficient`.
pub fn cmd_energy(config: &ExperimentConfig) -> Result<CsvTable, CliError> {
    let r = &config.rotor;
    let n_kicks = config.run.n_kicks;
    let params = RotorParams::new(
        r.ell,
        r.epsilon,
        r.k1,
        r.beta,
        n_max_for(config, r.k1, n_kicks),
    )?;
    let mut propagator = Propagator::new(params)?;
    let mut state = RotorState::plane_wave(r.n0, r.beta, params.n_max)?;
    let mut energies = vec![energy(&state)];
    for _ in 0..n_kicks {
        propagator.evolve_in_place(&mut state, 1)?;
        energies.push(energy(&state));
    }

    let (mut num, mut den) = (0.0, 0.0);
    for (n, e) in energies.iter().enumerate().skip(1) {
        let n2 = (n * n) as f64;
        num += (e - energies[0]) * n2;
        den += n2 * n2;
    }
    let coefficient = if den > 0.0 { num / den } else { 0.0 };

    let mut table = CsvTable::new(&["N", "E"]).integer_column(0);
    table.annotate("fit_coefficient", format!("{coefficient:.16e}"));
    table.annotate("k1_squared_over_4", format!("{:.16e}", r.k1 * r.k1 / 4.0));
    for (n, e) in energies.into_iter().enumerate() {
        table.push_row(vec![n as f64, e]);
    }
    Ok(table)
}
