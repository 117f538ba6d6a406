use proptest::prelude::*;

use csg_core::random::{
    gnp, gnp_connected, make_supersub_game, random_table_game, rng, SubParams, SupParams,
};
use csg_core::solvers::{brute_force_best, enumerate_feasible_structures, tsp, NoBound};
use csg_core::{
    connected_subsets_by_filter, upper_bound_tsp, AgentSet, ConnectedSubsets, Graph, Pseudotree,
    SolveOptions, SuperSubBound,
};

fn any_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.0f64..=1.0, any::<u64>())
        .prop_map(|(n, p, seed)| gnp(n, p, &mut rng(seed)).unwrap())
}

fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.25f64..=1.0, any::<u64>())
        .prop_map(|(n, p, seed)| gnp_connected(n, p, 10_000, &mut rng(seed)).unwrap())
}

proptest! {
    #[test]
    fn components_partition_the_set(g in any_graph(10), bits in any::<u64>()) {
        let s = AgentSet::from_bits(bits) & g.agents();
        let comps: Vec<_> = g.components(s).collect();
        let mut union = AgentSet::EMPTY;
        for (i, &c) in comps.iter().enumerate() {
            prop_assert!(!c.is_empty());
            prop_assert!(c.is_disjoint(union));
            prop_assert!(g.is_connected(c));
            union |= c;
            for &d in &comps[i + 1..] {
                prop_assert!(!g.is_connected(c | d));
            }
        }
        prop_assert_eq!(union, s);
    }

    #[test]
    fn enumerator_matches_filter(g in any_graph(12), ground in any::<u64>(), req in any::<u64>(), forb in any::<u64>()) {
        let ground = AgentSet::from_bits(ground) & g.agents();
        let required = AgentSet::from_bits(req) & ground & AgentSet::from_bits(0b1001_0010_0101);
        let forbidden = AgentSet::from_bits(forb) & AgentSet::from_bits(0b0110_0000_1000);
        let mut got: Vec<_> = ConnectedSubsets::new(&g, ground, required, forbidden).collect();
        let n = got.len();
        got.sort();
        got.dedup();
        prop_assert_eq!(got.len(), n, "duplicates");
        let mut want = connected_subsets_by_filter(&g, ground, required, forbidden);
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn pseudotree_invariants(g in connected_graph(12), root_pick in any::<usize>()) {
        let root = root_pick % g.n();
        let pt = Pseudotree::build(&g, root).unwrap();
        prop_assert!(pt.is_spanning_tree_of(&g));
        prop_assert!(pt.satisfies_branch_property(&g));
        prop_assert!(pt.is_breadth_first());
        prop_assert_eq!(pt.agent_at(1), root);
        for i in 1..=g.n() {
            prop_assert_eq!(pt.breadth_first_position(pt.agent_at(i)).unwrap(), i);
        }
    }

    #[test]
    fn generator_is_super_subadditive(n in 1usize..=8, seed in any::<u64>(), hi_w in 0i64..50, hi_k in 0i64..20) {
        let game = make_supersub_game(
            n,
            SupParams { min_weight: 0, max_weight: hi_w },
            SubParams { min_kappa: 0, max_kappa: hi_k },
            seed,
        ).unwrap();
        prop_assert!(game.check_super_subadditive().unwrap());
        for c in game.agents().subsets() {
            prop_assert_eq!(game.value(c), game.sup_value(c).unwrap() + game.sub_value(c).unwrap());
        }
    }

    #[test]
    fn partition_value_is_additive(n in 1usize..=8, seed in any::<u64>(), split in any::<u64>()) {
        let mut r = rng(seed);
        let game = random_table_game(n, &mut r).unwrap();
        let g = Graph::complete(n).unwrap();
        let structures: Vec<_> = enumerate_feasible_structures(&g).take(50).collect();
        for blocks in structures {
            let (a, b): (Vec<_>, Vec<_>) =
                blocks.iter().enumerate().partition(|(i, _)| split >> (i % 64) & 1 == 1);
            let a: Vec<AgentSet> = a.into_iter().map(|(_, &s)| s).collect();
            let b: Vec<AgentSet> = b.into_iter().map(|(_, &s)| s).collect();
            prop_assert_eq!(game.partition_value(&blocks), game.partition_value(&a) + game.partition_value(&b));
        }
    }

    #[test]
    fn tsp_bound_dominates_completions(g in connected_graph(6), seed in any::<u64>()) {
        let game = make_supersub_game(g.n(), SupParams::default(), SubParams::default(), seed).unwrap();
        // Each feasible structure, split into a prefix of blocks and the rest.
        for blocks in enumerate_feasible_structures(&g) {
            for k in 0..=blocks.len() {
                let partial = game.partition_value(&blocks[..k]);
                let rest: AgentSet = blocks[k..].iter().fold(AgentSet::EMPTY, |a, &b| a | b);
                let ub = upper_bound_tsp(&game, partial, rest).unwrap();
                prop_assert!(ub >= game.partition_value(&blocks));
            }
        }
    }

    #[test]
    fn pruning_preserves_the_optimum(g in connected_graph(8), seed in any::<u64>()) {
        let game = make_supersub_game(g.n(), SupParams::default(), SubParams::default(), seed).unwrap();
        let pt = Pseudotree::build(&g, 0).unwrap();
        let plain = tsp(&game, &g, &pt, SolveOptions::default().with_bound(&NoBound)).unwrap();
        let pruned = tsp(&game, &g, &pt, SolveOptions::default().with_bound(&SuperSubBound)).unwrap();
        prop_assert_eq!(plain.best_value, pruned.best_value);
        prop_assert!(pruned.stats.nodes_expanded <= plain.stats.nodes_expanded);
        if g.n() <= 7 {
            let oracle = brute_force_best(&game, &g, SolveOptions::default()).unwrap();
            prop_assert_eq!(oracle.best_value, plain.best_value);
        }
    }
}
