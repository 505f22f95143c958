use nashfold_core::game::{
    best_response, find_equilibrium, is_generalized_nash, player_cost, provider_cost,
};
use nashfold_core::oracle::brute_nash_check;
use nashfold_core::random::{random_game, seeded};
use nashfold_core::{Error, StrategyProfile};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn potential_minima_are_equilibria(seed in any::<u64>()) {
        let players = 1 + (seed % 3) as usize;
        let n = 1 + (seed / 3 % 3) as usize;
        let game = random_game(&mut seeded(seed), players, n, 2);
        let census = brute_nash_check(&game).unwrap();
        prop_assert!(census.violations().is_empty());
        for p in &census.potential_minima {
            prop_assert!(is_generalized_nash(&game, p).unwrap());
        }
        match find_equilibrium(&game) {
            Ok(eq) => {
                prop_assert!(census.potential_minima.contains(&eq));
                prop_assert!(census.equilibria.contains(&eq));
            }
            Err(Error::Infeasible(_)) => prop_assert!(census.profiles.is_empty()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn best_response_is_a_best_deviation(seed in any::<u64>()) {
        let game = random_game(&mut seeded(seed), 2, 2, 2);
        let census = brute_nash_check(&game).unwrap();
        for p in census.profiles.iter().take(4) {
            for k in 0..game.player_count() {
                let z = best_response(&game, p, k).unwrap();
                let mut moved = p.clone();
                moved.strategies[k] = z;
                let best = player_cost(&game, &moved, k).unwrap();
                // no feasible unilateral deviation does better
                for q in census.profiles.iter().filter(|q| same_except(q, p, k)) {
                    prop_assert!(player_cost(&game, q, k).unwrap() >= best.clone());
                }
            }
        }
    }

    #[test]
    fn equilibria_checked_by_solver_agree_with_enumeration(seed in any::<u64>()) {
        let game = random_game(&mut seeded(seed), 2, 2, 1);
        let census = brute_nash_check(&game).unwrap();
        for p in &census.profiles {
            prop_assert_eq!(is_generalized_nash(&game, p).unwrap(), census.equilibria.contains(p));
            prop_assert!(provider_cost(&game, p).is_ok());
        }
    }
}

fn same_except(q: &StrategyProfile, p: &StrategyProfile, k: usize) -> bool {
    q.strategies
        .iter()
        .zip(&p.strategies)
        .enumerate()
        .all(|(i, (a, b))| i == k || a == b)
}
