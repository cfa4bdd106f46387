mod common;

use muscc::automata::{accepts, is_weak, normalize_to_covers};
use muscc::collapse::{buchi_to_cobuchi, find_disagreement_outside_scck};
use muscc::gamma::*;
use muscc::graph::{graft, in_scck, make_gk, make_nloop, pseudotree_of, random_graph_with, random_scck_with, F};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn b_gamma_matches_gamma_game() {
    let b = make_b_gamma();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let g = random_graph_with(&mut rng, 10, &[F]);
        assert_eq!(accepts(&b, &g).unwrap(), gamma_winner(&g).unwrap().winner == GammaPlayer::PN, "{}", g.to_json());
    }
}

#[test]
fn box_star_automaton_matches_semantics() {
    let a = make_box_star_gamma_automaton();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..600 {
        let g = if i % 2 == 0 { random_scck_with(&mut rng, 1, 10, &[F]) } else { random_graph_with(&mut rng, 8, &[F]) };
        assert_eq!(accepts(&a, &g).unwrap(), box_star_gamma_semantic(&g).unwrap(), "{}", g.to_json());
    }
}

#[test]
fn gamma_is_bisimulation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let g = random_scck_with(&mut rng, 1, 10, &[F]);
        let t = pseudotree_of(&g).unwrap();
        assert_eq!(gamma_winner(&g).unwrap().winner, gamma_winner(&t).unwrap().winner);
        assert_eq!(box_star_gamma_semantic(&g).unwrap(), box_star_gamma_semantic(&t).unwrap());
    }
}

#[test]
fn nloop_grafts_fail_box_star() {
    let a = make_box_star_gamma_automaton();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let k = rng.gen_range(1..=3);
        let g = make_gk(k).unwrap();
        let at = rng.gen_range(0..g.vertex_count());
        let h = graft(&g, at, &make_nloop()).unwrap();
        assert!(!box_star_gamma_semantic(&h).unwrap());
        assert!(!accepts(&a, &h).unwrap());
    }
}

#[test]
fn collapse_of_b_gamma_needs_five_cycle() {
    let b = normalize_to_covers(&make_b_gamma());
    let c = buchi_to_cobuchi(&b, 1).unwrap();
    assert_eq!(c.window, 4);
    assert_eq!(c.automaton.state_count(), 46);
    assert!(c.automaton.state_count() <= 4 + 16 + 64 + 256);
    let d = find_disagreement_outside_scck(&b, 1, 6).unwrap().expect("disagreement within bound");
    assert_eq!(d.graph.vertex_count(), 5);
    assert!(d.buchi_accepts && !d.cobuchi_accepts);
    assert!(!in_scck(&d.graph, 1));
}

#[test]
fn falsifier_worked_examples() {
    for (w, tag) in [
        (common::accept_all(), DerivationTag::AcceptsNLoop),
        (common::always_f(), DerivationTag::RejectedGk),
        (common::f_reachable(), DerivationTag::PumpedNLoopGraft),
    ] {
        assert!(is_weak(&w));
        let r = falsify_weak(&w).unwrap();
        assert_eq!(r.derivation.tag, tag, "{:?}", r.derivation);
        assert!(verify_witness(&w, &r).unwrap());
        assert!(in_scck(&r.counterexample, 1));
        assert_ne!(r.automaton_verdict, r.semantic_verdict);
    }
}
