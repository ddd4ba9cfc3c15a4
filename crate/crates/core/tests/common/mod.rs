//! Figure fixtures shared by the integration targets. Edge lists are
//! transcribed from drawings; node k of a drawing is vertex k − 1.

#![allow(dead_code)]

use level2::catalog::cube_geometry;
use level2::engine::{cube_fixed_bs, fano_case_b, six_vertex_pair};
use level2::Graph;

pub fn with_outside(b: &Graph, outside: &[&[usize]]) -> Graph {
    let n = b.order();
    let mut g = Graph::empty(n + outside.len());
    for (x, y) in b.edges() {
        g.add_edge(x, y);
    }
    for (k, nb) in outside.iter().enumerate() {
        for &v in *nb {
            g.add_edge(n + k, v);
        }
    }
    g
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x - 1).collect()
}

/// Six-vertex pair: pairs {1,2}, {3,4}, {5,6}; outside vertices 7 and 8.
pub fn six_vertex_figure() -> (Graph, Graph) {
    let (b, b2) = six_vertex_pair();
    (
        with_outside(&b, &[&one_based(&[1, 2]), &one_based(&[2, 3, 5])]),
        with_outside(&b2, &[&one_based(&[1, 2]), &one_based(&[1, 3, 6])]),
    )
}

/// Fano pair: points 1..7 and one outside vertex on a line, moved to the
/// matching oval.
pub fn fano_figure() -> (Graph, Graph) {
    let (b, b2) = fano_case_b();
    (
        with_outside(&b, &[&one_based(&[1, 2, 4])]),
        with_outside(&b2, &[&one_based(&[3, 5, 6])]),
    )
}

/// Cube vertex with coordinates `x1 x2 x3` written as a string.
pub fn cube_point(s: &str) -> usize {
    let geo = cube_geometry();
    let b = s.as_bytes();
    let x = (b[0] - b'0') | (b[1] - b'0') << 1 | (b[2] - b'0') << 2;
    geo.coords.iter().position(|&c| c == x).unwrap()
}

fn cube_set(v: &[&str]) -> Vec<usize> {
    v.iter().map(|s| cube_point(s)).collect()
}

/// Cube pair as drawn, and the right-hand graph as computed with the fixed
/// choice of π.
pub fn cube_figure() -> (Graph, Graph, Graph) {
    let cube = cube_fixed_bs()[1].clone();
    let left = with_outside(
        &cube,
        &[&cube_set(&["000", "010", "101", "111"]), &cube_set(&["001", "011", "101", "111"])],
    );
    let drawn = with_outside(
        &cube,
        &[&cube_set(&["001", "011", "100", "110"]), &cube_set(&["010", "011", "110", "111"])],
    );
    let computed = with_outside(
        &cube,
        &[&cube_set(&["001", "011", "100", "110"]), &cube_set(&["000", "001", "100", "101"])],
    );
    (left, drawn, computed)
}
