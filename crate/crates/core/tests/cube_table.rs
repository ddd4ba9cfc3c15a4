//! The published list of cube switching sets (one per class, beyond the
//! five fixed ones), transcribed row by row in `data/cube_table.txt`.

use std::collections::BTreeSet;

use level2::admissible::{conjugate, enumerate_b_bruteforce, is_admissible};
use level2::catalog::{build, Family};
use level2::engine::cube_fixed_bs;
use level2::equivalence::{classes, GroupChoice, SymmetryGroup};
use level2::Graph;

fn table() -> Vec<Graph> {
    include_str!("data/cube_table.txt")
        .lines()
        .map(|line| {
            let bits: Vec<u8> = line.bytes().filter(|b| *b != b' ').map(|b| b - b'0').collect();
            Graph::from_matrix(8, &bits).unwrap()
        })
        .collect()
}

#[test]
fn listed_matrices_cover_every_class_once() {
    let r = build(Family::Cube).unwrap();
    let listed = table();
    assert_eq!(listed.len(), 35);
    for (i, b) in listed.iter().enumerate() {
        assert!(is_admissible(&r, b), "listed matrix {} is not admissible", i + 6);
        assert_ne!(conjugate(&r, b).as_ref(), Some(b), "listed matrix {} is fixed", i + 6);
    }
    let group = SymmetryGroup::new(Family::Cube, GroupChoice::Maximal).unwrap();
    let all: Vec<Graph> = cube_fixed_bs().into_iter().chain(listed).collect();
    let keys: BTreeSet<u128> = all.iter().map(|b| group.canonical_key(b)).collect();
    assert_eq!(keys.len(), 40);
    let computed: BTreeSet<u128> = classes(&enumerate_b_bruteforce(&r).unwrap(), &group)
        .iter()
        .map(|c| c.canonical.key())
        .collect();
    assert_eq!(keys, computed);
}
