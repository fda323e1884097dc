//! In-group cooperation with out-group exploitation: discriminating types
//! that play Dove against their own kind and Hawk against everyone else.
//! Higher levels Hawk the levels they deceive; the ladder balances when the
//! exploitation gains exactly offset the cognitive costs, and it is
//! evolutionarily stable precisely when the hawk gain beats the dove loss.
//!
//! ```bash
//! cargo run --example hawk_dove_ingroup
//! ```

use coevo::env::CostSchedule;
use coevo::interdependent::{construct_hawkdove_esc, HawkDoveCase};
use coevo::scalar::Scalar;

fn main() {
    let costs = CostSchedule::new(
        (0..4).map(|n| Scalar::ratio(35 * n, 100)).collect(),
        Scalar::ratio(35, 100),
    )
    .unwrap();

    for (g, l) in [
        (Scalar::ratio(1, 2), Scalar::ratio(2, 5)), // g > l
        (Scalar::ratio(2, 5), Scalar::ratio(2, 5)), // g = l
        (Scalar::ratio(3, 10), Scalar::ratio(2, 5)), // g < l
    ] {
        let built = construct_hawkdove_esc(&g, &l, &costs, false).unwrap();
        println!(
            "g = {g}, l = {l}: {}",
            match built.case {
                HawkDoveCase::EvolutionarilyStable => "evolutionarily stable ladder",
                HawkDoveCase::NeutrallyStable => "neutrally stable ladder (drift is unpunished)",
                HawkDoveCase::NoneInFamily => "no stable in-group ladder",
            }
        );
        if let Some(config) = &built.configuration {
            for i in 0..config.distribution().len() {
                println!(
                    "  level {}: share {}, fitness {}",
                    config.distribution().type_at(i).level,
                    config.distribution().frequency(i),
                    config.expected_fitness_by_index(i).unwrap()
                );
            }
        }
    }

    // The mixed variant: within a level, play the mixed Hawk-Dove
    // equilibrium instead of mutual Dove.
    let built = construct_hawkdove_esc(
        &Scalar::ratio(1, 2),
        &Scalar::ratio(2, 5),
        &costs,
        true,
    )
    .unwrap();
    let config = built.configuration.unwrap();
    println!(
        "mixed-within-level variant: {} levels, balanced: {}",
        config.distribution().len(),
        config.is_balanced(&Scalar::zero()).unwrap()
    );
}
