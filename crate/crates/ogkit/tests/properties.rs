//! Cross-checks against independent oracles, exhaustively on tiny graphs
//! and over the seeded corpus on larger ones, plus algebraic laws for sums
//! and serialization round trips.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{
    all_partitions, congruence_holds, corpus, isomorphic, nim_outcome_consistent,
    oracle_congruences, oracle_grundy, oracle_outcomes, oracle_remoteness, rotate,
};
use ogkit::{
    all_congruences, canonical_form, enumerate_labeled, extended_nim, fim_partition,
    graph_from_mask, is_rulegraph, is_simple, minimize, outcomes_normal, remoteness,
    simple_representatives, sum, sum_with_separator, valuation, FimClass, NimValue, Optiongraph,
    Outcome, Partition, Remoteness,
};

#[test]
fn congruence_enumeration_matches_brute_force_exhaustively() {
    for n in 1..=3 {
        for g in enumerate_labeled(n).unwrap() {
            let lib: BTreeSet<Vec<usize>> = all_congruences(&g)
                .unwrap()
                .iter()
                .map(common::class_vector)
                .collect();
            let oracle: BTreeSet<Vec<usize>> =
                oracle_congruences(&g).into_iter().collect();
            assert_eq!(lib, oracle, "congruences differ on {}", g.serialize());
        }
    }
}

#[test]
fn refinement_maximum_is_coarsest_brute_force_congruence_exhaustively() {
    for n in 1..=3 {
        for g in enumerate_labeled(n).unwrap() {
            let top = common::class_vector(&ogkit::max_congruence(&g));
            assert!(congruence_holds(&g, &top));
            for c in oracle_congruences(&g) {
                assert!(
                    common::vector_refines(&c, &top),
                    "{c:?} does not refine {top:?} on {}",
                    g.serialize()
                );
            }
        }
    }
}

#[test]
fn outcomes_match_the_game_tree_exhaustively() {
    for n in 1..=3 {
        for g in enumerate_labeled(n).unwrap() {
            assert_eq!(
                outcomes_normal(&g),
                oracle_outcomes(&g),
                "outcomes differ on {}",
                g.serialize()
            );
        }
    }
}

#[test]
fn outcomes_match_the_game_tree_on_the_corpus() {
    for g in corpus() {
        assert_eq!(outcomes_normal(&g), oracle_outcomes(&g), "on {}", g.serialize());
    }
}

#[test]
fn rulegraph_values_match_the_textbook_recursions() {
    let mut checked = 0;
    for g in corpus().into_iter().filter(is_rulegraph_ref) {
        let grundy = oracle_grundy(&g);
        let nim = extended_nim(&g);
        for p in 0..g.position_count() {
            assert_eq!(nim[p], NimValue::Finite(grundy[p]), "nim at {}", g.label(p));
        }
        let rem = remoteness(&g);
        let oracle = oracle_remoteness(&g);
        for p in 0..g.position_count() {
            assert_eq!(rem[p], Remoteness::Finite(oracle[p]), "remoteness at {}", g.label(p));
        }
        checked += 1;
    }
    assert!(checked >= 50, "corpus has enough rulegraphs, got {checked}");
}

fn is_rulegraph_ref(g: &Optiongraph) -> bool {
    is_rulegraph(g)
}

#[test]
fn values_and_outcomes_cohere_on_the_corpus() {
    for g in corpus() {
        nim_outcome_consistent(&g).unwrap();
    }
}

#[test]
fn ending_behaviour_constrains_values_on_the_corpus() {
    for g in corpus() {
        let fim = fim_partition(&g);
        let v = valuation(&g);
        for p in 0..g.position_count() {
            match fim.class_of(p) {
                // no play ends: a guaranteed draw with nothing settled below
                FimClass::Infinite => {
                    assert_eq!(v.outcomes[p], Outcome::Draw);
                    assert_eq!(v.remoteness[p], Remoteness::Infinite);
                    assert_eq!(v.nim[p], NimValue::Infinite(BTreeSet::new()));
                }
                // every play ends: classical finite values
                FimClass::Finite => {
                    assert!(matches!(v.nim[p], NimValue::Finite(_)));
                    assert!(matches!(v.remoteness[p], Remoteness::Finite(_)));
                }
                FimClass::Mixed => {}
            }
        }
    }
}

#[test]
fn simplicity_is_isomorphism_invariant() {
    let mut pairs = 0;
    for seed in 0..200u64 {
        let n = 2 + (seed % 4) as usize;
        let g = ogkit::random_optiongraph(n, 0.4, 9000 + seed);
        let h = rotate(&g, 1 + (seed as usize % (n - 1)));
        assert_eq!(is_simple(&g), is_simple(&h), "verdicts differ on {}", g.serialize());
        pairs += 1;
    }
    assert_eq!(pairs, 200);
}

#[test]
fn canonical_dedup_is_permutation_sound() {
    for n in [3, 4] {
        let reps = simple_representatives(n).unwrap();
        let plain: BTreeSet<u64> =
            reps.iter().map(|g| canonical_form(g).unwrap().bits()).collect();
        let rotated: BTreeSet<u64> = reps
            .iter()
            .enumerate()
            .map(|(i, g)| canonical_form(&rotate(g, i % n)).unwrap().bits())
            .collect();
        assert_eq!(plain, rotated);
    }
}

#[test]
fn canonical_codes_decide_isomorphism_on_small_corpus_pairs() {
    let small: Vec<Optiongraph> = corpus()
        .into_iter()
        .filter(|g| g.position_count() == 4)
        .take(40)
        .collect();
    for a in &small {
        for b in &small {
            let same_code = canonical_form(a).unwrap() == canonical_form(b).unwrap();
            assert_eq!(same_code, isomorphic(a, b));
        }
    }
}

#[test]
fn sums_commute_and_collapse_consistently() {
    let small: Vec<Optiongraph> = corpus()
        .into_iter()
        .filter(|g| g.position_count() <= 4)
        .take(30)
        .collect();
    for pair in small.chunks_exact(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let ab = sum(a, b).unwrap().graph;
        let ba = sum(b, a).unwrap().graph;
        assert!(isomorphic(&ab, &ba), "sum not commutative up to isomorphism");
        // collapsing before summing must not change the collapsed sum;
        // class labels like {a,b} contain commas, so pick another separator
        let collapsed_parts =
            sum_with_separator(&minimize(a).graph, &minimize(b).graph, '+')
                .unwrap()
                .graph;
        assert!(
            isomorphic(&minimize(&ab).graph, &minimize(&collapsed_parts).graph),
            "minimization does not respect sums on {} and {}",
            a.serialize(),
            b.serialize()
        );
    }
}

#[test]
fn sums_associate_up_to_isomorphism() {
    let tiny: Vec<Optiongraph> = corpus()
        .into_iter()
        .filter(|g| g.position_count() <= 2)
        .take(9)
        .collect();
    for triple in tiny.chunks_exact(3) {
        let (a, b, c) = (&triple[0], &triple[1], &triple[2]);
        // inner sums introduce commas, so the outer sum separates with ';'
        let left =
            sum_with_separator(&sum(a, b).unwrap().graph, c, ';').unwrap().graph;
        let right =
            sum_with_separator(a, &sum(b, c).unwrap().graph, ';').unwrap().graph;
        assert_eq!(
            canonical_form(&left).unwrap(),
            canonical_form(&right).unwrap(),
            "associativity fails"
        );
    }
}

#[test]
fn quotient_then_quotient_reaches_the_same_simple_graph() {
    // collapsing in stages or in one step lands on the same game
    for g in corpus().into_iter().filter(|g| g.position_count() >= 2).take(60) {
        let all = all_congruences(&g).unwrap();
        let theta = &all[all.len() / 2];
        let q = ogkit::quotient(&g, theta).unwrap();
        assert!(isomorphic(
            &minimize(&q.graph).graph,
            &minimize(&g).graph
        ));
    }
}

#[test]
fn partition_count_follows_the_bell_numbers() {
    for (n, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203), (7, 877)] {
        assert_eq!(all_partitions(n).len(), bell);
    }
}

proptest! {
    #[test]
    fn serialization_round_trips(mask in 0u64..512, shift in 0usize..3) {
        let g = rotate(&graph_from_mask(3, mask), shift);
        let back = Optiongraph::parse(&g.serialize()).unwrap();
        prop_assert_eq!(g, back);
    }

    #[test]
    fn partition_display_parses_back(
        mask in 0u64..512,
        raw in proptest::collection::vec(0usize..3, 3)
    ) {
        let g = graph_from_mask(3, mask);
        let p = Partition::from_class_assignment(&raw);
        let text = p.display(&g);
        let back = Partition::parse(&g, &text).unwrap();
        prop_assert_eq!(p, back);
    }

    #[test]
    fn random_graphs_round_trip_with_longer_labels(
        n in 1usize..7,
        seed in 0u64..5000,
    ) {
        let g = ogkit::random_optiongraph(n, 0.5, seed);
        let renamed = Optiongraph::new(
            (0..n).map(|p| format!("pos{p}x")).collect(),
            (0..n).map(|p| g.options(p).to_vec()).collect(),
        ).unwrap();
        let back = Optiongraph::parse(&renamed.serialize()).unwrap();
        prop_assert_eq!(renamed, back);
    }
}
