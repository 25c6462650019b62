use std::path::{Path, PathBuf};
use std::process::{Command as Process, Output};

use rotorlab_cli::{load_config, run, Command, CsvTable, ExperimentConfig, Overrides};

const GOLDEN: [(&str, Command); 5] = [
    ("single_beta", Command::SingleBeta),
    ("fig2_main", Command::Fig2Main),
    ("fig2_inset", Command::Fig2Inset),
    ("ramsey", Command::Ramsey),
    ("energy", Command::Energy),
];

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn rotorlab(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_rotorlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_table(output: &Output) -> CsvTable {
    assert!(
        output.status.success(),
        "exit {:?}: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    CsvTable::parse(&String::from_utf8(output.stdout.clone()).unwrap()).unwrap()
}

fn command_table(command: Command, overrides: Overrides) -> CsvTable {
    run(&load_config(None, &overrides, command).unwrap()).unwrap()
}

fn text_config(command: Command, text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(text)
        .unwrap()
        .resolve(command)
        .unwrap()
}

fn assert_tables_close(actual: &CsvTable, expected: &CsvTable, rel: f64) {
    assert_eq!(actual.columns, expected.columns);
    assert_eq!(actual.rows.len(), expected.rows.len());
    for (r, (a, e)) in actual.rows.iter().zip(&expected.rows).enumerate() {
        for (c, (x, y)) in a.iter().zip(e).enumerate() {
            let same = (x.is_nan() && y.is_nan()) || (x - y).abs() <= rel * y.abs().max(1e-300);
            assert!(same, "row {r} column {}: {x} vs {y}", actual.columns[c]);
        }
    }
}

#[test]
fn golden_files_reproduce() {
    for (name, command) in GOLDEN {
        let config = golden(&format!("{name}.toml"));
        let output = rotorlab(&[command.as_str(), "--config", config.to_str().unwrap()]);
        let actual = stdout_table(&output);
        let text = std::fs::read_to_string(golden(&format!("{name}.csv"))).unwrap();
        let expected = CsvTable::parse(&text).unwrap();
        assert_tables_close(&actual, &expected, 1e-10);
        assert_eq!(actual.header, expected.header, "{name} header");
    }
}

#[test]
fn headers_reexecute_to_the_same_body() {
    for (name, _) in GOLDEN {
        let text = std::fs::read_to_string(golden(&format!("{name}.csv"))).unwrap();
        let recorded = CsvTable::parse(&text).unwrap();
        let rerun = run(&recorded.config().unwrap()).unwrap();
        assert_eq!(rerun.render_body(), recorded.render_body(), "{name}");
    }
}

#[test]
fn thread_count_does_not_change_the_output() {
    let config = golden("fig2_inset.toml");
    let config = config.to_str().unwrap();
    let one = rotorlab(&[
        "fig2-inset",
        "--config",
        config,
        "--threads",
        "1",
        "--n-kicks",
        "12",
    ]);
    let four = rotorlab(&[
        "fig2-inset",
        "--config",
        config,
        "--threads",
        "4",
        "--n-kicks",
        "12",
    ]);
    assert_eq!(
        stdout_table(&one).render_body(),
        stdout_table(&four).render_body()
    );
}

#[test]
fn flags_override_the_file_and_out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let config = golden("single_beta.toml");
    let output = rotorlab(&[
        "single-beta",
        "--config",
        config.to_str().unwrap(),
        "--n-kicks",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert!(output.stdout.is_empty());
    let table = CsvTable::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 8);
    assert_eq!(table.config().unwrap().run.n_kicks, 7);
}

#[test]
fn seeded_pseudorandom_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(
        &path,
        "[ensemble]\nsampling = \"pseudorandom\"\ncount = 500\n",
    )
    .unwrap();
    let path = path.to_str().unwrap();
    let a = stdout_table(&rotorlab(&[
        "fig2-inset",
        "--config",
        path,
        "--seed",
        "3",
        "--n-kicks",
        "5",
    ]));
    let b = stdout_table(&rotorlab(&[
        "fig2-inset",
        "--config",
        path,
        "--seed",
        "3",
        "--n-kicks",
        "5",
    ]));
    let c = stdout_table(&rotorlab(&[
        "fig2-inset",
        "--config",
        path,
        "--seed",
        "4",
        "--n-kicks",
        "5",
    ]));
    assert_eq!(a.render_body(), b.render_body());
    assert_ne!(a.render_body(), c.render_body());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_string()
    };

    let unknown = write("unknown.toml", "[rotor]\nell = 1\nkick = 2.0\n");
    let output = rotorlab(&["single-beta", "--config", &unknown]);
    assert_eq!(output.status.code(), Some(2));
    let message = String::from_utf8_lossy(&output.stderr);
    assert!(
        message.contains("kick") && message.contains("line 3"),
        "{message}"
    );

    let missing = dir.path().join("absent.toml");
    assert_eq!(
        rotorlab(&["energy", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let coarse = write(
        "coarse.toml",
        "[quadrature]\nnodes = 16\nscheme = \"midpoint\"\nsingularity_margin = 0.39\n\
         [run]\ndk_start = 0.01\ndk_stop = 0.01\n",
    );
    assert_eq!(
        rotorlab(&["fig2-main", "--config", &coarse]).status.code(),
        Some(3)
    );

    let narrow = write("narrow.toml", "[rotor]\nn_max = 8\n[ensemble]\ncount = 4\n");
    let output = rotorlab(&["fig2-inset", "--config", &narrow]);
    assert_eq!(output.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&output.stderr).contains("n_max"));

    let output = rotorlab(&["ramsey", "--phases", "2"]);
    assert_eq!(output.status.code(), Some(5));
    assert!(!output.stderr.is_empty());

    let out = dir.path().join("no/such/dir/out.csv");
    let output = rotorlab(&[
        "single-beta",
        "--n-kicks",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn defaults_reproduce_the_figure_parameters() {
    let config = load_config(None, &Overrides::default(), Command::Fig2Main).unwrap();
    assert_eq!(config.rotor.ell, 1);
    assert_eq!(config.rotor.epsilon, 0.0);
    assert_eq!(config.rotor.k1, 0.8 * std::f64::consts::PI);
    assert_eq!(config.rotor.dk, 0.6283);
    assert_eq!(config.ensemble.count, 10_000);
    assert_eq!(config.run.n_kicks, 50);
}

#[test]
fn single_beta_examples() {
    let table = command_table(Command::SingleBeta, Overrides::default());
    let f = table.column("F_beta").unwrap();
    // Near-zero at the first kick past z0 / dk, and below 0.1 for good once
    // the 2 / (pi N dk) envelope is.
    let z0: f64 = 2.404825557695773;
    let past_zero = (z0 / 0.6283).ceil() as usize;
    assert!(f[past_zero] < 0.01, "{}", f[past_zero]);
    assert!(f[..past_zero].iter().all(|&v| v > 0.01));
    let settled = (2.0 / (std::f64::consts::PI * 0.1 * 0.6283)).ceil() as usize;
    for (n, value) in f.iter().enumerate().skip(settled) {
        assert!(*value < 0.1, "N = {n}: {value}");
    }
    assert!(table.column("F_asymptote").is_some());

    let flat = command_table(
        Command::SingleBeta,
        Overrides {
            dk: Some(0.0),
            ..Default::default()
        },
    );
    assert!(flat.column("F_beta").unwrap().iter().all(|&v| v == 1.0));

    let beta0 = command_table(
        Command::SingleBeta,
        Overrides {
            beta: Some(0.0),
            n_kicks: Some(40),
            ..Default::default()
        },
    );
    assert!(beta0.column("F_asymptote").is_none());
    let f = beta0.column("F_beta").unwrap();
    let first = f[1];
    for (n, value) in f.iter().enumerate() {
        let expected = if n % 2 == 0 { 1.0 } else { first };
        assert!((value - expected).abs() < 1e-14, "N = {n}");
    }
}

#[test]
fn single_beta_propagated_matches_closed_form() {
    let closed = command_table(
        Command::SingleBeta,
        Overrides {
            beta: Some(0.3),
            n_kicks: Some(25),
            ..Default::default()
        },
    );
    let config = text_config(
        Command::SingleBeta,
        "[rotor]\nbeta = 0.3\n[run]\nn_kicks = 25\nmethod = \"propagator\"\n",
    );
    let propagated = run(&config).unwrap();
    assert_tables_close(&propagated, &closed, 1e-8);
}

#[test]
fn fig2_main_examples() {
    let config = text_config(
        Command::Fig2Main,
        "[run]\ndk_start = 0.0\ndk_stop = 6.0\ndk_step = 0.5\n",
    );
    let table = run(&config).unwrap();
    assert_eq!(table.rows[0], vec![0.0, 1.0, 1.0]);
    for row in &table.rows {
        assert!((row[1] - row[2]).abs() < 0.03, "dk = {}", row[0]);
    }
}

#[test]
fn fig2_inset_examples() {
    let table =
        CsvTable::parse(&std::fs::read_to_string(golden("fig2_inset.csv")).unwrap()).unwrap();
    let plateau: f64 = table.annotation("plateau").unwrap().parse().unwrap();
    assert!((plateau - 0.561072262024).abs() < 1e-9);
    assert_eq!(
        table.columns,
        ["N", "N_dk", "F_resonant_eps0", "F_eps0p025", "F_eps0p1"]
    );
    let resonant = table.column("F_resonant_eps0").unwrap();
    assert_eq!(resonant[0], 1.0);
    let first_minimum = (1..resonant.len() - 1)
        .find(|&n| resonant[n] < resonant[n - 1] && resonant[n] < resonant[n + 1])
        .unwrap();
    assert_eq!(first_minimum, 6);
}

#[test]
fn ramsey_examples() {
    let full = command_table(
        Command::Ramsey,
        Overrides {
            dk: Some(0.0),
            ..Default::default()
        },
    );
    let extracted: f64 = full
        .annotation("extracted_fidelity")
        .unwrap()
        .parse()
        .unwrap();
    assert!((extracted - 1.0).abs() < 1e-6);
    let p = full.column("P1").unwrap();
    assert!((p[0] - 1.0).abs() < 1e-12);

    let table = CsvTable::parse(&std::fs::read_to_string(golden("ramsey.csv")).unwrap()).unwrap();
    let fidelity: f64 = table.annotation("fidelity").unwrap().parse().unwrap();
    let extracted: f64 = table
        .annotation("extracted_fidelity")
        .unwrap()
        .parse()
        .unwrap();
    assert!((fidelity - 0.561).abs() < 0.01);
    assert!((extracted - fidelity).abs() < 1e-3);
    assert_eq!(table.rows.len(), 256);
}

#[test]
fn energy_examples() {
    let table = CsvTable::parse(&std::fs::read_to_string(golden("energy.csv")).unwrap()).unwrap();
    let fit: f64 = table
        .annotation("fit_coefficient")
        .unwrap()
        .parse()
        .unwrap();
    let k = 0.8 * std::f64::consts::PI;
    assert!((fit - k * k / 4.0).abs() / (k * k / 4.0) < 0.01);

    let flat = command_table(
        Command::Energy,
        Overrides {
            k1: Some(0.0),
            dk: Some(0.0),
            ..Default::default()
        },
    );
    let e = flat.column("E").unwrap();
    assert!(e.iter().all(|&v| (v - e[0]).abs() < 1e-12));

    let bounded = command_table(
        Command::Energy,
        Overrides {
            beta: Some(0.3),
            n_kicks: Some(500),
            ..Default::default()
        },
    );
    let e = bounded.column("E").unwrap();
    let max = e.iter().copied().fold(0.0, f64::max);
    // |W_N| <= 1 / |sin(xi0 / 2)| bounds the momentum spread.
    let w_max = 1.0 / (0.5 * std::f64::consts::PI * (2.0 * 0.3 - 1.0)).sin().abs();
    assert!(
        max <= k * k * w_max * w_max / 4.0 + 0.3 * 0.3 / 2.0 + 1e-9,
        "{max}"
    );
    assert!(max < 0.01 * k * k * 500.0 * 500.0 / 4.0);
}
