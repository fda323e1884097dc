//! Game-level diagnostics: efficiency, deviation gains, punishment actions,
//! genericity, and the pure maxmin/minmax guarantees.
//!
//! ```bash
//! cargo run --example analyze_game
//! ```

use coevo::game::{prisoners_dilemma, SymmetricGame};
use coevo::scalar::Scalar;

fn print_diagnostics(name: &str, game: &SymmetricGame) {
    let d = game.diagnostics(&Scalar::ratio(1, 1_000_000_000_000));
    println!("== {name}");
    println!("   efficient payoff: {}", d.efficiency.efficient_payoff);
    let profiles: Vec<String> = d
        .efficiency
        .efficient_profiles
        .iter()
        .map(|&(a, b)| format!("({}, {})", game.action_label(a), game.action_label(b)))
        .collect();
    println!("   efficient profiles: {}", profiles.join(" "));
    println!(
        "   symmetric efficient actions: {:?}",
        d.efficiency
            .symmetric_efficient_actions
            .iter()
            .map(|&a| game.action_label(a))
            .collect::<Vec<_>>()
    );
    println!(
        "   punishment actions: {:?}",
        d.punishment_actions
            .iter()
            .map(|&a| game.action_label(a))
            .collect::<Vec<_>>()
    );
    println!("   generic: {}", d.generic);
    println!(
        "   maxmin {} (play {}), minmax {} (opponent plays {})",
        d.maxmin.maxmin,
        game.action_label(d.maxmin.maxmin_action),
        d.maxmin.minmax,
        game.action_label(d.maxmin.minmax_action)
    );
    for (a, g) in d.deviation_gains.iter().enumerate() {
        println!("   deviation gain g({}) = {g}", game.action_label(a));
    }
}

fn main() {
    print_diagnostics("prisoner's dilemma (3, 0, 4, 1)", &prisoners_dilemma());
    print_diagnostics("rock-paper-scissors", &SymmetricGame::rock_paper_scissors());

    // A generic game whose only efficient profile is asymmetric: no
    // configuration of it can be stable, because highest types must play an
    // efficient profile against themselves.
    let skewed = SymmetricGame::from_int_rows(
        &["a", "b", "c"],
        &[&[0, 9, 1], &[6, 2, 3], &[4, 5, 7]],
    )
    .unwrap();
    print_diagnostics("generic game with asymmetric-only efficiency", &skewed);
}
