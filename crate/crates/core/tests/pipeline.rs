use proptest::prelude::*;

use zipper_core::combinators::{compile, parse_term, readback};
use zipper_core::engine::{equal_mod_loops, reduce, search_path, SearchLimits, Status, Strategy};
use zipper_core::graph::{emit_zg, parse_zg, ZGraph};
use zipper_core::knots::{apply_r2, diagram_iso, emit_diagram, encode, parse_diagram, realize_click};
use zipper_core::rewrites::{apply, enumerate_matches, MoveKind};

fn c(s: &str) -> ZGraph {
    compile(&parse_term(s).unwrap())
}

#[test]
fn reduction_reads_back() {
    for (src, nf) in [("K I S", "I"), ("S K K S", "S"), ("S (K S) K I K", "S (K I) K")] {
        let t = reduce(&c(src), &Strategy::default());
        assert_eq!(t.status, Status::NormalForm);
        assert_eq!(readback(&t.final_graph).unwrap(), parse_term(nf).unwrap(), "{src}");
    }
}

#[test]
fn trace_survives_a_zg_round_trip() {
    let t = reduce(&c("S I I K"), &Strategy::default());
    let back = parse_zg(&emit_zg(&t.final_graph)).unwrap();
    assert!(equal_mod_loops(&back, &t.final_graph).0);
    assert!(t.replay().is_ok());
}

#[test]
fn search_finds_the_reduction_of_skk() {
    let path = search_path(&c("S K K"), &c("I"), &SearchLimits::depth(12)).unwrap();
    assert!(path.iter().any(|m| m.kind == MoveKind::Click));
    let mut g = c("S K K");
    for m in &path {
        g = apply(&g, m).unwrap();
    }
    assert!(equal_mod_loops(&g, &c("I")).0);
}

#[test]
fn click_then_zip_on_diagrams() {
    let g = parse_zg("ZM 2 body f v1 v2\nZP 2 f a1 a2 res").unwrap();
    let d = encode(&g).unwrap();
    let clicked = realize_click(&d, &d.virtual_links()).unwrap();
    let g = apply(&g, &enumerate_matches(&g, MoveKind::Click)[0]).unwrap();
    assert!(diagram_iso(&clicked, &encode(&g).unwrap()));
    let mut zipped = clicked;
    let mut moves = 0;
    while let Some(&site) = zipped.r2_sites().first() {
        zipped = apply_r2(&zipped, site).unwrap();
        moves += 1;
    }
    assert_eq!(moves, 2);
    let g = apply(&g, &enumerate_matches(&g, MoveKind::Zip)[0]).unwrap();
    assert!(diagram_iso(&zipped, &encode(&g).unwrap()));
    let text = emit_diagram(&zipped);
    assert!(diagram_iso(&parse_diagram(&text).unwrap(), &zipped));
}

proptest! {
    #[test]
    fn reduction_is_idempotent(seed in 0u64..500) {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let t = zipper_core::combinators::random_term(&mut rng, 8);
        let once = reduce(&compile(&t), &Strategy::default());
        prop_assume!(once.status == Status::NormalForm);
        let twice = reduce(&once.final_graph, &Strategy::default());
        prop_assert!(twice.steps.is_empty());
    }
}

