mod common;

use common::*;
use linforest::decomp::{verify, BoundSpec};
use linforest::oracle::{solve_exact, Outcome};
use linforest::poly21::{solve21, NoReason, Solve21};

fn agree(g: &linforest::graph::MultiGraph) {
    let b = BoundSpec::finite(2, 1);
    let exact = solve_exact(g, &b, 10_000_000);
    assert_ne!(exact.outcome, Outcome::Timeout);
    match solve21(g).unwrap() {
        Solve21::Yes(lab) => {
            assert!(verify(g, &lab, &b).is_ok());
            assert!(exact.is_yes(), "{g:?}");
        }
        Solve21::No(_) => assert!(!exact.is_yes(), "{g:?}"),
    }
}

#[test]
fn subcubic_corpus_sizes() {
    let counts: Vec<usize> = (1..=5).map(|n| connected_subcubic(n).len()).collect();
    assert_eq!(counts, [1, 2, 4, 12, 22]);
}

#[test]
fn agrees_with_oracle_up_to_six_vertices() {
    for n in 1..=6 {
        connected_subcubic(n).iter().for_each(agree);
    }
}

#[test]
fn agrees_with_oracle_on_random_graphs() {
    let mut r = rng(21);
    for i in 0..150 {
        agree(&random_subcubic(&mut r, 10 + i % 20, 15 + i % 25));
    }
}

#[test]
fn degree_four_is_rejected() {
    let star = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
    assert_eq!(solve21(&star).unwrap(), Solve21::No(NoReason::DegreeAtLeast4(0)));
}
