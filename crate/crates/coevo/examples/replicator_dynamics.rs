//! Replicator dynamics on type games: balanced ladders sit still, unstable
//! mixtures escape along the directions the quadratic-form test flags.
//!
//! ```bash
//! cargo run --example replicator_dynamics
//! ```

use coevo::dynamics::{replicate, stability_probe, ProbeOptions, StepControl};
use coevo::env::Environment;
use coevo::game::SymmetricGame;
use coevo::linalg::Matrix;
use coevo::scalar::Scalar;
use coevo::stability::{build_type_game, construct_rps_nsc};

fn main() {
    // The balanced seven-level ladder holds its frequencies.
    let env = Environment::builder(SymmetricGame::rock_paper_scissors())
        .costs((0..8).map(|n| Scalar::ratio(3 * n, 10)).collect())
        .tail_step(Scalar::ratio(3, 10))
        .build()
        .unwrap();
    let config = construct_rps_nsc(&env, None).unwrap();
    let tg = build_type_game(&config).unwrap();
    let x0: Vec<f64> = config
        .distribution()
        .frequencies()
        .iter()
        .map(Scalar::to_f64)
        .collect();
    let control = StepControl::default();
    let record = replicate(tg.payoff(), &x0, 100.0, &control).unwrap();
    println!("ladder start:    {x0:?}");
    println!("ladder terminal: {:?}", record.terminal());

    let probe = stability_probe(
        tg.payoff(),
        &x0,
        &[1e-3, 1e-2],
        100.0,
        &control,
        &ProbeOptions::default(),
    )
    .unwrap();
    for r in &probe.radii {
        println!(
            "probe r = {}: max excursion {:.2e}, escaped: {}",
            r.radius, r.max_excursion, r.escaped
        );
    }

    // A coordination-flavoured type game: the interior rest point repels,
    // and the probe reports the escape.
    let b = Matrix::from_rows(vec![
        vec![Scalar::from_int(10), Scalar::from_int(3)],
        vec![Scalar::from_int(5), Scalar::from_int(10)],
    ])
    .unwrap();
    let rest = [7.0 / 12.0, 5.0 / 12.0];
    let probe =
        stability_probe(&b, &rest, &[1e-3], 200.0, &control, &ProbeOptions::default()).unwrap();
    println!(
        "coordination mix: escaped = {}, terminal distance {:.3}",
        probe.radii[0].escaped, probe.radii[0].max_terminal_distance
    );

    // First rows of the CSV export.
    let csv = record.to_csv(&tg.type_names());
    for line in csv.lines().take(3) {
        println!("{line}");
    }
}
