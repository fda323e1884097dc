//! The heterogeneous Rock-Paper-Scissors ladder: cognitive levels coexist
//! because each extra win from deceiving the levels below is exactly eaten
//! by the extra cognitive cost. Within a level everyone mixes uniformly;
//! across levels the deceiver plays Paper against an induced Rock.
//!
//! ```bash
//! cargo run --example rps_ladder
//! ```

use coevo::env::Environment;
use coevo::game::SymmetricGame;
use coevo::scalar::Scalar;
use coevo::stability::{check_highest_type_conditions, construct_rps_nsc};

fn main() {
    // Cognitive costs 0.3 (n − 1): seven levels fit under the payoff swing
    // of 2, and the balance system pins the frequencies.
    let env = Environment::builder(SymmetricGame::rock_paper_scissors())
        .costs((0..8).map(|n| Scalar::ratio(3 * n, 10)).collect())
        .tail_step(Scalar::ratio(3, 10))
        .build()
        .unwrap();
    let config = construct_rps_nsc(&env, None).unwrap();
    println!("ladder levels: {}", config.distribution().len());
    for i in 0..config.distribution().len() {
        println!(
            "  level {}: share {}, expected fitness {}",
            config.distribution().type_at(i).level,
            config.distribution().frequency(i),
            config.expected_fitness_by_index(i).unwrap()
        );
    }
    println!(
        "balanced: {}",
        config.is_balanced(&Scalar::zero()).unwrap()
    );
    println!(
        "highest-type conditions pass: {}",
        check_highest_type_conditions(&config).unwrap().pass
    );

    // Two levels with k(2) = 1 leave the split free: any share ε for the
    // naive level balances at fitness ε − 1, approaching the maxmin floor
    // −1 as the sophisticates take over.
    let env = Environment::builder(SymmetricGame::rock_paper_scissors())
        .costs_int(&[0, 1])
        .tail_step(Scalar::from_int(9))
        .build()
        .unwrap();
    for eps in [Scalar::ratio(1, 10), Scalar::ratio(1, 2), Scalar::ratio(9, 10)] {
        let config = construct_rps_nsc(&env, Some(&eps)).unwrap();
        println!(
            "two-level split ({} naive): everyone earns {}",
            eps,
            config.expected_fitness_by_index(0).unwrap()
        );
    }
}
