use std::collections::BTreeSet;

use muscc::automata::{accepts, random_automaton, ParityAutomaton, RandomAutomatonConfig};
use muscc::collapse::buchi_to_cobuchi;
use muscc::formula::{classify, evaluate, negate, parse, Formula};
use muscc::game::{brute_force_solve, random_arena, solve, ParityArena};
use muscc::graph::{bisimilar, pseudotree_of, random_graph_with, random_scck_with, scc_decompose, ColoredGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn open_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["P", "Q"]).prop_map(Formula::atom),
        prop::sample::select(vec!["P", "Q"]).prop_map(Formula::neg_atom),
        prop::sample::select(vec!["X", "Y"]).prop_map(Formula::var),
    ];
    leaf.prop_recursive(5, 32, 2, |inner| {
        let var = prop::sample::select(vec!["X", "Y"]);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            inner.clone().prop_map(Formula::diamond),
            inner.clone().prop_map(Formula::boxed),
            (var.clone(), inner.clone()).prop_map(|(x, a)| Formula::mu(x, a)),
            (var, inner).prop_map(|(x, a)| Formula::nu(x, a)),
        ]
    })
}

/// Closed formulas: free variables get an outermost binder.
fn sentence() -> impl Strategy<Value = Formula> {
    (open_formula(), any::<bool>(), any::<bool>()).prop_map(|(mut f, x_least, y_least)| {
        for (x, least) in [("X", x_least), ("Y", y_least)] {
            if f.free_variables().contains(x) {
                f = if least { Formula::mu(x, f) } else { Formula::nu(x, f) };
            }
        }
        f
    })
}

fn graph(seed: u64) -> ColoredGraph {
    random_graph_with(&mut rng(seed), 7, &["P", "Q"])
}

fn automaton(seed: u64, cover_only: bool) -> ParityAutomaton {
    let cfg = RandomAutomatonConfig { max_states: 3, priorities: vec![0, 1, 2], cover_only, weak: false };
    random_automaton(&mut rng(seed), &["P", "Q"], &cfg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn display_parse_roundtrip(f in sentence()) {
        prop_assert!(f.is_sentence());
        let back = parse(&f.to_string()).unwrap();
        prop_assert_eq!(&back, &f.rename_bound());
        prop_assert_eq!(parse(&back.to_string()).unwrap(), back);
    }

    #[test]
    fn negation_complements(f in sentence(), seed in any::<u64>()) {
        let g = graph(seed);
        let pos = evaluate(&g, &f).unwrap();
        let neg = evaluate(&g, &negate(&f).unwrap()).unwrap();
        let all: BTreeSet<usize> = g.vertices().collect();
        prop_assert!(pos.is_disjoint(&neg));
        prop_assert_eq!(pos.union(&neg).copied().collect::<BTreeSet<_>>(), all);
    }

    #[test]
    fn negation_swaps_sigma_and_pi(f in sentence()) {
        let (a, b) = (classify(&f), classify(&negate(&f).unwrap()));
        prop_assert_eq!((a.sigma, a.pi), (b.pi, b.sigma));
    }

    #[test]
    fn evaluation_is_bisimulation_invariant(f in sentence(), seed in any::<u64>()) {
        let g = random_scck_with(&mut rng(seed), 1, 8, &["P", "Q"]);
        let t = pseudotree_of(&g).unwrap();
        prop_assert_eq!(evaluate(&g, &f).unwrap().contains(&g.point()), evaluate(&t, &f).unwrap().contains(&t.point()));
    }

    #[test]
    fn graph_json_roundtrip(seed in any::<u64>()) {
        let g = graph(seed);
        prop_assert_eq!(ColoredGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn automaton_json_roundtrip(seed in any::<u64>(), cover_only in any::<bool>()) {
        let a = automaton(seed, cover_only);
        prop_assert_eq!(ParityAutomaton::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn arena_json_roundtrip(seed in any::<u64>()) {
        let a = random_arena(&mut rng(seed), 8, 4, 3);
        prop_assert_eq!(ParityArena::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn scc_is_mutual_reachability(seed in any::<u64>()) {
        let g = graph(seed);
        let d = scc_decompose(&g);
        for u in g.vertices() {
            let from_u = g.reachable_from(u);
            for v in g.vertices() {
                prop_assert_eq!(from_u[v] && g.reachable_from(v)[u], d.component_of[u] == d.component_of[v]);
            }
        }
    }

    #[test]
    fn solver_matches_brute_force(seed in any::<u64>()) {
        let a = random_arena(&mut rng(seed), 7, 4, 3);
        prop_assert_eq!(solve(&a).winner, brute_force_solve(&a, 8).unwrap());
    }

    #[test]
    fn canonical_form_is_stable(seed in any::<u64>()) {
        let g = graph(seed);
        let c = g.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        prop_assert!(bisimilar(&g, &c).unwrap());
    }

    #[test]
    fn collapse_agrees_on_scc1(seed in any::<u64>()) {
        let r = &mut rng(seed);
        let cfg = RandomAutomatonConfig { max_states: 3, priorities: vec![0, 1], cover_only: true, weak: false };
        let b = random_automaton(r, &["P"], &cfg);
        let g = random_scck_with(r, 1, 8, &["P"]);
        let c = buchi_to_cobuchi(&b, 1).unwrap().automaton;
        prop_assert_eq!(accepts(&b, &g).unwrap(), accepts(&c, &g).unwrap());
    }
}
