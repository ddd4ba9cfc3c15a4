//! Canonical labelling and isomorphism for graphs with at most 64 vertices.
//!
//! Individualisation-refinement: equitable colour refinement, then a search
//! tree that individualises one vertex of the first non-singleton cell at a
//! time. The canonical form is the smallest relabelled adjacency among the
//! leaves. Automorphisms found between leaves prune children that lie in
//! one orbit of the pointwise stabiliser of the current path.

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_ORDER: usize = 64;

struct Ctx {
    n: usize,
    rows: Vec<u64>,
    first: Option<(Vec<u64>, Vec<usize>)>,
    best: Option<(Vec<u64>, Vec<usize>)>,
    generators: Vec<Vec<usize>>,
}

fn rows_of(g: &Graph) -> Vec<u64> {
    (0..g.order())
        .map(|v| g.neighbours(v).fold(0u64, |acc, u| acc | 1 << u))
        .collect()
}

/// Refines `colours` (ranks, 0-based) to the coarsest equitable partition
/// finer than it. Colour numbering depends only on the isomorphism type of
/// `(graph, colouring)`.
fn refine(rows: &[u64], colours: &mut Vec<u32>) {
    let n = rows.len();
    loop {
        let k = colours.iter().max().map_or(0, |&c| c as usize + 1);
        let mut masks = vec![0u64; k];
        for (v, &c) in colours.iter().enumerate() {
            masks[c as usize] |= 1 << v;
        }
        let sigs: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let counts = masks.iter().map(|m| (rows[v] & m).count_ones()).collect();
                (colours[v], counts)
            })
            .collect();
        let mut distinct: Vec<&(u32, Vec<u32>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        if distinct.len() == k {
            return;
        }
        *colours = sigs
            .iter()
            .map(|s| distinct.binary_search(&s).unwrap() as u32)
            .collect();
    }
}

fn individualise(colours: &[u32], v: usize) -> Vec<u32> {
    colours
        .iter()
        .enumerate()
        .map(|(u, &c)| 2 * c + u32::from(u != v))
        .collect()
}

/// Orbits of the group generated by `gens`, as a representative per vertex.
fn orbit_reps(n: usize, gens: &[&Vec<usize>]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    for g in gens {
        for v in 0..n {
            let (a, b) = (find(&mut parent, v), find(&mut parent, g[v]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

impl Ctx {
    fn relabelled(&self, label: &[usize]) -> Vec<u64> {
        // Row `label[v]` of the result is row v re-indexed.
        let mut out = vec![0u64; self.n];
        for v in 0..self.n {
            let mut r = self.rows[v];
            let mut m = 0u64;
            while r != 0 {
                let u = r.trailing_zeros() as usize;
                r &= r - 1;
                m |= 1 << label[u];
            }
            out[label[v]] = m;
        }
        out
    }

    fn leaf(&mut self, colours: &[u32]) {
        let label: Vec<usize> = colours.iter().map(|&c| c as usize).collect();
        let form = self.relabelled(&label);
        let auto_with = |other: &[usize]| -> Vec<usize> {
            // Vertex v goes to the vertex carrying the same label in `other`.
            let mut inv = vec![0; label.len()];
            for (v, &l) in other.iter().enumerate() {
                inv[l] = v;
            }
            label.iter().map(|&l| inv[l]).collect()
        };
        match &self.first {
            None => {
                self.first = Some((form.clone(), label.clone()));
                self.best = Some((form, label));
            }
            Some((f, fl)) => {
                if *f == form {
                    let a = auto_with(fl);
                    self.generators.push(a);
                    return;
                }
                let (b, bl) = self.best.as_ref().unwrap();
                if *b == form {
                    let a = auto_with(bl);
                    self.generators.push(a);
                } else if form < *b {
                    self.best = Some((form, label));
                }
            }
        }
    }

    fn search(&mut self, mut colours: Vec<u32>, path: &mut Vec<usize>) {
        refine(&self.rows, &mut colours);
        let n = self.n;
        let k = colours.iter().max().map_or(0, |&c| c as usize + 1);
        if k == n {
            self.leaf(&colours);
            return;
        }
        let mut sizes = vec![0usize; k];
        for &c in &colours {
            sizes[c as usize] += 1;
        }
        let target = (0..k).find(|&c| sizes[c] > 1).unwrap() as u32;
        let cell: Vec<usize> = (0..n).filter(|&v| colours[v] == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if !tried.is_empty() {
                let stab: Vec<&Vec<usize>> = self
                    .generators
                    .iter()
                    .filter(|g| path.iter().all(|&p| g[p] == p))
                    .collect();
                let reps = orbit_reps(n, &stab);
                if tried.iter().any(|&t| reps[t] == reps[v]) {
                    continue;
                }
            }
            tried.push(v);
            path.push(v);
            self.search(individualise(&colours, v), path);
            path.pop();
        }
    }
}

fn check(g: &Graph) -> Result<()> {
    if g.order() > MAX_ORDER {
        return Err(Error::capacity("isomorphism order", g.order(), MAX_ORDER));
    }
    Ok(())
}

/// `label[v]` is the canonical position of vertex `v`.
pub fn canonical_labelling(g: &Graph) -> Result<Vec<usize>> {
    check(g)?;
    let n = g.order();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut ctx = Ctx {
        n,
        rows: rows_of(g),
        first: None,
        best: None,
        generators: Vec::new(),
    };
    ctx.search(vec![0; n], &mut Vec::new());
    Ok(ctx.best.unwrap().1)
}

/// The relabelled graph with vertex `label[v]` in place of `v`; equal for
/// exactly the isomorphic inputs.
pub fn canonical_form(g: &Graph) -> Result<Graph> {
    let label = canonical_labelling(g)?;
    let mut perm = vec![0; label.len()];
    for (v, &l) in label.iter().enumerate() {
        perm[l] = v;
    }
    Ok(g.relabel(&perm))
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> Result<bool> {
    check(g)?;
    check(h)?;
    if g.order() != h.order() || g.edge_count() != h.edge_count() {
        return Ok(false);
    }
    let mut dg: Vec<usize> = (0..g.order()).map(|v| g.degree(v)).collect();
    let mut dh: Vec<usize> = (0..h.order()).map(|v| h.degree(v)).collect();
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return Ok(false);
    }
    Ok(canonical_form(g)? == canonical_form(h)?)
}
