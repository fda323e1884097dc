//! Undominated strategies, deception equilibria, and their
//! fitness-maximising refinement.
//!
//! A deceiver implants a belief in the victim's mind; the victim then plays
//! some best reply to that belief, so the deceiver effectively chooses any
//! profile whose victim side is undominated. The deception equilibria are
//! the deceiver's subjective favourites among those; the fitness-maximising
//! ones additionally maximise the deceiver's material payoff, and may not
//! exist.
//!
//! ```bash
//! cargo run --example deception_equilibria
//! ```

use coevo::env::Environment;
use coevo::game::prisoners_dilemma;
use coevo::prefs::{
    deception_equilibria, fmde, undominated_pure_actions, CognitiveType, UtilityFunction,
};

fn main() {
    let pd = prisoners_dilemma();
    let env = Environment::builder(pd.clone())
        .costs_int(&[0, 1])
        .build()
        .unwrap();

    let materialistic = UtilityFunction::materialistic(&pd);
    println!(
        "undominated actions of a materialistic player: {:?} (cooperation is strictly dominated)",
        undominated_pure_actions(&materialistic).unwrap().actions
    );

    let deceiver = CognitiveType::materialistic("sophisticate", &pd, 2);
    let naive = CognitiveType::simple(
        "trusting",
        UtilityFunction::dominant_action(0, 2), // prefers to cooperate, always
        1,
    )
    .unwrap();
    let de = deception_equilibria(&env, &deceiver, &naive, &[]).unwrap();
    println!(
        "deceiving a trusting victim: inducible actions {:?}, optimal profiles {:?}, value {}",
        de.feasible, de.profiles, de.value
    );
    let f = fmde(&env, &deceiver, &naive, &[]).unwrap();
    println!(
        "fitness-maximising deceptions: {:?} with fitness {}",
        f.profiles, f.fitness
    );

    // A spiteful deceiver's subjective optimum clashes with fitness: the
    // fitness-maximising set comes out empty.
    let spite = UtilityFunction::new(pd.payoff_matrix().map(|v| -v)).unwrap();
    let spiteful = CognitiveType::simple("spiteful", spite, 2).unwrap();
    let victim = CognitiveType::materialistic("victim", &pd, 1);
    let f = fmde(&env, &spiteful, &victim, &[]).unwrap();
    println!(
        "spiteful deceiver vs materialistic victim: fitness-maximising set {:?} (empty: spite \
         and fitness disagree)",
        f.profiles
    );
}
