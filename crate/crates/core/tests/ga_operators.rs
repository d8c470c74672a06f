use evoplat_core::ga::{
    mutable_start, mutate_moves, one_point_crossover, tournament_select, AgentGenome,
};
use evoplat_core::rng::stream;
use evoplat_core::Action;
use proptest::prelude::*;

fn arb_moves(len: usize) -> impl Strategy<Value = Vec<Action>> {
    prop::collection::vec((0u8..7).prop_map(|c| Action::from_code(c).unwrap()), len)
}

fn arb_pair() -> impl Strategy<Value = (Vec<Action>, Vec<Action>, f64)> {
    (1usize..200).prop_flat_map(|len| (arb_moves(len), arb_moves(len), 0.0f64..=1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn crossover_conserves_genes_per_index((a, b, frac) in arb_pair()) {
        let (c1, c2) =
            one_point_crossover(&AgentGenome::new(a.clone()), &AgentGenome::new(b.clone()), frac).unwrap();
        for i in 0..a.len() {
            let mut parents = [a[i], b[i]];
            let mut children = [c1.moves[i], c2.moves[i]];
            parents.sort_by_key(|x| x.code());
            children.sort_by_key(|x| x.code());
            prop_assert_eq!(parents, children);
        }
    }

    #[test]
    fn zero_rate_is_identity(moves in arb_moves(64), seed in any::<u64>()) {
        let mut g = AgentGenome::new(moves.clone());
        let changed = mutate_moves(&mut g, 0.0, 0.8, &Action::ALL, &mut stream(seed, 0, 0));
        prop_assert_eq!(changed, 0);
        prop_assert_eq!(g.moves, moves);
    }

    #[test]
    fn full_tournament_returns_the_argmax(fitness in prop::collection::vec(-1e3f64..1e3, 1..60), seed in any::<u64>()) {
        let population: Vec<AgentGenome> = fitness
            .iter()
            .map(|&f| AgentGenome { fitness: Some(f), ..AgentGenome::new(vec![Action::Noop]) })
            .collect();
        let best = (0..fitness.len()).reduce(|b, i| if fitness[i] > fitness[b] { i } else { b }).unwrap();
        let pick = tournament_select(&population, population.len(), &mut stream(seed, 0, 0));
        prop_assert_eq!(pick, best);
    }
}

#[test]
fn protected_prefix_never_changes() {
    let mut rng = stream(99, 0, 0);
    for trial in 0..10_000u64 {
        let len = 1 + (trial as usize % 97);
        let original: Vec<Action> = (0..len).map(|i| Action::ALL[(i * 5 + trial as usize) % 7]).collect();
        let mut g = AgentGenome::new(original.clone());
        mutate_moves(&mut g, 1.0, 0.8, &Action::ALL, &mut rng);
        let protected = (len as f64 * 0.2).floor() as usize;
        assert_eq!(mutable_start(len, 0.8), protected);
        assert_eq!(g.moves[..protected], original[..protected], "trial {trial}");
    }
}
