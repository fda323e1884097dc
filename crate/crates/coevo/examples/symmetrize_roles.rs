//! Role-symmetrizing an asymmetric interaction: nature tosses a fair coin
//! for the role assignment and each embedded action is a contingency plan
//! (what to play as row, what to play as column). The embedded game always
//! admits a symmetric efficient profile, even when the original interaction
//! only reaches efficiency through mis-matched actions.
//!
//! ```bash
//! cargo run --example symmetrize_roles
//! ```

use coevo::game::symmetrize;
use coevo::linalg::Matrix;
use coevo::scalar::Scalar;

fn s(v: i64) -> Scalar {
    Scalar::from_int(v)
}

fn main() {
    // An anti-coordination interaction: the surplus is created only when
    // the two sides choose different actions, so every efficient profile of
    // the original game is asymmetric.
    let row = Matrix::from_rows(vec![vec![s(0), s(3)], vec![s(1), s(0)]]).unwrap();
    let col = Matrix::from_rows(vec![vec![s(0), s(2)], vec![s(4), s(0)]]).unwrap();
    let embedded = symmetrize(&row, &col).unwrap();

    println!("embedded actions: {:?}", embedded.actions());
    let eff = embedded.efficiency();
    println!("efficient payoff: {}", eff.efficient_payoff);
    println!(
        "symmetric efficient actions: {:?}",
        eff.symmetric_efficient_actions
            .iter()
            .map(|&a| embedded.action_label(a))
            .collect::<Vec<_>>()
    );
    // The symmetric optimum is the contingency plan that takes one side of
    // the mismatch in each role; the coin toss restores fairness.
    for &a in &eff.symmetric_efficient_actions {
        println!(
            "  `{}` pays {} against itself",
            embedded.action_label(a),
            embedded.payoff_pure(a, a)
        );
    }
}
