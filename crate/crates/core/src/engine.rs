//! Switching inside host graphs: instances, detection, the algebraic
//! operation `QᵀAQ`, the combinatorial rewrites of the named methods, and
//! the checks on the outcome.

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::admissible::{
    block_complement, block_transpose, enumerate_b_normalized, enumerate_v, is_admissible, transform_column,
    Block2, BlockGrid, Column, BLOCK_I, BLOCK_N, BLOCK_NT, BLOCK_O,
};
use crate::catalog::{build, cube_geometry, fano_geometry, Family};
use crate::equivalence::{classes, GroupChoice, SymmetryGroup};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::iso::is_isomorphic;
use crate::linalg::ScaledOrthogonal;
use crate::reducibility::Reducer;

/// A switching set inside a host graph, in the family's vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchingInstance {
    pub host: Graph,
    pub family: Family,
    /// Pairs `C_1, …, C_m` for circulant families; one cell holding the
    /// labelled points for GM4, Fano and the cube.
    pub cells: Vec<Vec<usize>>,
    /// Induced adjacency on the ordered switching set.
    pub b: Graph,
}

fn cells_for(family: Family, tuple: &[usize]) -> Vec<Vec<usize>> {
    match family {
        Family::Circulant(_) => tuple.chunks(2).map(<[usize]>::to_vec).collect(),
        _ => vec![tuple.to_vec()],
    }
}

fn column_of(g: &Graph, u: usize, set: &[usize]) -> Column {
    set.iter()
        .enumerate()
        .fold(0, |acc, (i, &s)| acc | (g.has_edge(u, s) as Column) << i)
}

impl SwitchingInstance {
    /// Builds and validates an instance from the ordered switching set.
    pub fn new(host: Graph, family: Family, vertices: &[usize]) -> Result<Self> {
        let n = family.validate()?.size();
        if vertices.len() != n {
            return Err(Error::Dimension(format!("{family} needs {n} vertices, got {}", vertices.len())));
        }
        let distinct: BTreeSet<usize> = vertices.iter().copied().collect();
        if distinct.len() != n || vertices.iter().any(|&v| v >= host.order()) {
            return Err(Error::Domain("switching set must be distinct host vertices".into()));
        }
        let b = host.induced(vertices);
        let inst = SwitchingInstance {
            host,
            family,
            cells: cells_for(family, vertices),
            b,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.cells.concat()
    }

    pub fn outside(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.vertices().into_iter().collect();
        (0..self.host.order()).filter(|v| !set.contains(v)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let r = build(self.family)?;
        let set = self.vertices();
        if self.host.induced(&set) != self.b {
            return Err(Error::Condition("recorded B is not the induced subgraph".into()));
        }
        if !is_admissible(&r, &self.b) {
            return Err(Error::Admissibility(format!("induced subgraph is not in B_R for {}", self.family)));
        }
        for u in self.outside() {
            let c = column_of(&self.host, u, &set);
            if transform_column(&r, c).is_none() {
                return Err(Error::Admissibility(format!(
                    "outside vertex {u} has column {} not in V_R",
                    crate::admissible::column_to_string(c, set.len())
                )));
            }
        }
        Ok(())
    }
}

/// `QᵀAQ` for `Q = diag(R, I)` on the instance, in exact integer arithmetic.
pub fn apply(instance: &SwitchingInstance) -> Result<Graph> {
    let r = build(instance.family)?;
    let set = instance.vertices();
    let invalid = |what: String| Error::Condition(format!("invalid instance: {what}"));
    let new_b = crate::admissible::conjugate(&r, &instance.b).ok_or_else(|| invalid("RᵀBR is not an adjacency matrix".into()))?;
    let mut out = instance.host.clone();
    for (i, &a) in set.iter().enumerate() {
        for (j, &b) in set.iter().enumerate().skip(i + 1) {
            out.set_edge(a, b, new_b.has_edge(i, j));
        }
    }
    for u in instance.outside() {
        let c = column_of(&instance.host, u, &set);
        let img = transform_column(&r, c).ok_or_else(|| invalid(format!("column of vertex {u} leaves 01")))?;
        for (i, &s) in set.iter().enumerate() {
            out.set_edge(u, s, img >> i & 1 == 1);
        }
    }
    Ok(out)
}

/// `(Q·s)ᵀ A (Q·s) / s²` for a dense integer matrix `q = s·Q`, checked to be
/// an adjacency matrix.
pub fn conjugate_scaled(g: &Graph, q: &[i64], scale: i64) -> Result<Graph> {
    let n = g.order();
    if q.len() != n * n || scale == 0 {
        return Err(Error::Dimension("conjugating matrix must be n×n".into()));
    }
    let a = g.adjacency_i64();
    let mut aq = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            if a[i * n + k] == 0 {
                continue;
            }
            for j in 0..n {
                aq[i * n + j] += q[k * n + j];
            }
        }
    }
    let s2 = scale * scale;
    let mut out = Graph::empty(n);
    for i in 0..n {
        for j in i..n {
            let v: i64 = (0..n).map(|k| q[k * n + i] * aq[k * n + j]).sum();
            match (v, i == j) {
                (0, _) => {}
                (x, false) if x == s2 => out.add_edge(i, j),
                _ => {
                    return Err(Error::Condition(format!(
                        "conjugate entry ({i},{j}) is {v}/{s2}, not an adjacency entry"
                    )))
                }
            }
        }
    }
    Ok(out)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn check_partition(n: usize, cells: &[&[usize]]) -> Result<Vec<Option<usize>>> {
    let mut owner = vec![None; n];
    for (ci, c) in cells.iter().enumerate() {
        if c.is_empty() {
            return Err(Error::Domain("cells must be nonempty".into()));
        }
        for &v in *c {
            if v >= n || owner[v].is_some() {
                return Err(Error::Domain(format!("vertex {v} is out of range or in two cells")));
            }
            owner[v] = Some(ci);
        }
    }
    Ok(owner)
}

fn count_in(g: &Graph, v: usize, cell: &[usize]) -> usize {
    cell.iter().filter(|&&c| g.has_edge(v, c)).count()
}

/// Scaled matrix `s·diag(R₁,…,R_t,I)` with `R_i = (2/|C_i|)J − I`.
pub fn gm_matrix(n: usize, cells: &[Vec<usize>]) -> (Vec<i64>, i64) {
    let s = cells.iter().fold(1i64, |acc, c| {
        let c = c.len() as i64;
        acc / gcd(acc, c) * c
    });
    let mut q = vec![0i64; n * n];
    for i in 0..n {
        q[i * n + i] = s;
    }
    for c in cells {
        let f = 2 * s / c.len() as i64;
        for &a in c {
            for &b in c {
                q[a * n + b] = f - if a == b { s } else { 0 };
            }
        }
    }
    (q, s)
}

/// Scaled WQH matrix for cell pairs `(C⁽¹⁾, C⁽²⁾)`: blocks `I − J/c` and
/// `J/c` with `c = |C⁽¹⁾|`.
pub fn wqh_matrix(n: usize, cells: &[(Vec<usize>, Vec<usize>)]) -> (Vec<i64>, i64) {
    let s = cells.iter().fold(1i64, |acc, (c, _)| {
        let c = c.len() as i64;
        acc / gcd(acc, c) * c
    });
    let mut q = vec![0i64; n * n];
    for i in 0..n {
        q[i * n + i] = s;
    }
    for (c1, c2) in cells {
        let f = s / c1.len() as i64;
        for (x, y, same) in [(c1, c1, true), (c2, c2, true), (c1, c2, false), (c2, c1, false)] {
            for &a in x {
                for &b in y {
                    q[a * n + b] = if same { -f + if a == b { s } else { 0 } } else { f };
                }
            }
        }
    }
    (q, s)
}

/// GM switching: for every outside vertex with exactly half its
/// neighbours in `C_i`, swap its adjacencies with `C_i`.
pub fn apply_gm(g: &Graph, cells: &[Vec<usize>]) -> Result<Graph> {
    let n = g.order();
    let refs: Vec<&[usize]> = cells.iter().map(Vec::as_slice).collect();
    let owner = check_partition(n, &refs)?;
    for (i, ci) in cells.iter().enumerate() {
        for (j, cj) in cells.iter().enumerate() {
            let counts: BTreeSet<usize> = ci.iter().map(|&v| count_in(g, v, cj)).collect();
            if counts.len() > 1 {
                return Err(Error::Condition(format!(
                    "vertices of C_{} have differing neighbour counts {counts:?} in C_{}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let mut out = g.clone();
    for v in (0..n).filter(|&v| owner[v].is_none()) {
        for (i, c) in cells.iter().enumerate() {
            let k = count_in(g, v, c);
            if 2 * k == c.len() {
                for &w in c {
                    out.toggle_edge(v, w);
                }
            } else if k != 0 && k != c.len() {
                return Err(Error::Condition(format!(
                    "vertex {v} has {k} neighbours in C_{}, expected 0, half, or all",
                    i + 1
                )));
            }
        }
    }
    Ok(out)
}

/// WQH switching on cell pairs `(C_i⁽¹⁾, C_i⁽²⁾)`.
pub fn apply_wqh(g: &Graph, cells: &[(Vec<usize>, Vec<usize>)]) -> Result<Graph> {
    let n = g.order();
    let refs: Vec<&[usize]> = cells.iter().flat_map(|(a, b)| [a.as_slice(), b.as_slice()]).collect();
    let owner = check_partition(n, &refs)?;
    for (i, (a, b)) in cells.iter().enumerate() {
        if a.len() != b.len() {
            return Err(Error::Condition(format!("|C_{0}^(1)| != |C_{0}^(2)|", i + 1)));
        }
    }
    for (i, (a1, a2)) in cells.iter().enumerate() {
        for (j, (b1, b2)) in cells.iter().enumerate() {
            let diffs: BTreeSet<i64> = a1
                .iter()
                .map(|&v| count_in(g, v, b1) as i64 - count_in(g, v, b2) as i64)
                .chain(a2.iter().map(|&v| count_in(g, v, b2) as i64 - count_in(g, v, b1) as i64))
                .collect();
            if diffs.len() > 1 {
                return Err(Error::Condition(format!(
                    "signed neighbour differences {diffs:?} of C_{} towards C_{} are not constant",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let mut out = g.clone();
    for v in (0..n).filter(|&v| owner[v].is_none()) {
        for (i, (c1, c2)) in cells.iter().enumerate() {
            let (k1, k2) = (count_in(g, v, c1), count_in(g, v, c2));
            let swap = (k1 == c1.len() && k2 == 0) || (k1 == 0 && k2 == c2.len());
            if swap {
                for &w in c1.iter().chain(c2) {
                    out.toggle_edge(v, w);
                }
            } else if k1 != k2 {
                return Err(Error::Condition(format!(
                    "vertex {v} has {k1} neighbours in C_{0}^(1) and {k2} in C_{0}^(2)",
                    i + 1
                )));
            }
        }
    }
    Ok(out)
}

/// Cases of the ten-vertex corollary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TenCase {
    A,
    B,
    C,
}

/// The switching-set constructions with a closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedB {
    /// Generalized sun graph, `m` odd.
    Sun,
    /// `circulant(O, I…I, N, Nᵀ, I…I)`, `m` odd.
    FirstFamily,
    /// `circulant(O, N, Nᵀ, O…O, N, Nᵀ)`, `m ≥ 5`.
    SecondFamily,
    /// The irreducible six-vertex set.
    SixVertex,
    TenVertex(TenCase),
    /// Representative `k` (0..18) of the irreducible twelve-vertex classes.
    TwelveVertex(usize),
}

fn circulant_b(m: usize, offsets: &[Block2]) -> Graph {
    let mut blocks = vec![BLOCK_O; m * m];
    for i in 0..m {
        for j in 0..m {
            blocks[i * m + j] = offsets[(j + m - i) % m];
        }
    }
    BlockGrid::new(m, blocks).expect("symmetric offsets").to_graph()
}

fn sun_offsets(m: usize, middle: Block2) -> Vec<Block2> {
    let h = (m - 1) / 2;
    let mut v = vec![BLOCK_O; m];
    for d in 1..h {
        v[d] = middle;
        v[m - d] = middle;
    }
    v[h] = BLOCK_N;
    v[h + 1] = BLOCK_NT;
    v
}

fn second_offsets(m: usize) -> Vec<Block2> {
    let mut v = vec![BLOCK_O; m];
    v[1] = BLOCK_N;
    v[2] = BLOCK_NT;
    v[m - 2] = BLOCK_N;
    v[m - 1] = BLOCK_NT;
    v
}

/// The eighteen irreducible twelve-vertex representatives, as canonical
/// class forms sorted by key.
pub fn twelve_vertex_representatives() -> &'static [Graph] {
    static REPS: OnceLock<Vec<Graph>> = OnceLock::new();
    REPS.get_or_init(|| {
        let f = Family::Circulant(6);
        let grids = enumerate_b_normalized(6).expect("m = 6 supported");
        let gs: Vec<Graph> = grids.iter().map(BlockGrid::to_graph).collect();
        let group = SymmetryGroup::new(f, GroupChoice::Maximal).expect("group");
        let red = Reducer::new(f).expect("reducer");
        let mut reps: Vec<Graph> = classes(&gs, &group)
            .into_par_iter()
            .filter(|c| red.search(&c.canonical, crate::reducibility::DEFAULT_DEPTH).expect("member").is_none())
            .map(|c| c.canonical)
            .collect();
        reps.sort_by_key(Graph::key);
        reps
    })
}

pub fn build_named_b(method: NamedB, m: usize) -> Result<Graph> {
    let need_odd = |what: &str| {
        if m < 3 || m % 2 == 0 {
            Err(Error::Domain(format!("{what} needs m odd and at least 3, got {m}")))
        } else {
            Ok(())
        }
    };
    let need = |want: usize, what: &str| {
        if m != want {
            Err(Error::Domain(format!("{what} needs m = {want}, got {m}")))
        } else {
            Ok(())
        }
    };
    Ok(match method {
        NamedB::Sun => {
            need_odd("sun switching")?;
            circulant_b(m, &sun_offsets(m, BLOCK_O))
        }
        NamedB::FirstFamily => {
            need_odd("the first circulant family")?;
            circulant_b(m, &sun_offsets(m, BLOCK_I))
        }
        NamedB::SecondFamily => {
            if m < 5 {
                return Err(Error::Domain(format!("the second circulant family needs m >= 5, got {m}")));
            }
            circulant_b(m, &second_offsets(m))
        }
        NamedB::SixVertex => {
            need(3, "six-vertex switching")?;
            circulant_b(3, &sun_offsets(3, BLOCK_O))
        }
        NamedB::TenVertex(c) => {
            need(5, "ten-vertex switching")?;
            match c {
                TenCase::A => circulant_b(5, &sun_offsets(5, BLOCK_O)),
                TenCase::B => circulant_b(5, &sun_offsets(5, BLOCK_I)),
                TenCase::C => circulant_b(5, &second_offsets(5)),
            }
        }
        NamedB::TwelveVertex(k) => {
            need(6, "twelve-vertex switching")?;
            twelve_vertex_representatives()
                .get(k)
                .cloned()
                .ok_or_else(|| Error::Domain(format!("twelve-vertex representative {k} out of 0..18")))?
        }
    })
}

/// The switching method whose combinatorial rewrite is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    Sun,
    FirstFamily,
    SecondFamily,
    TenVertex(TenCase),
    SixVertex,
    TwelveVertex,
    Fano,
    Cube,
}

impl Theorem {
    pub fn family(self, m: usize) -> Family {
        match self {
            Theorem::Sun | Theorem::FirstFamily | Theorem::SecondFamily => Family::Circulant(m),
            Theorem::TenVertex(_) => Family::Circulant(5),
            Theorem::SixVertex => Family::Circulant(3),
            Theorem::TwelveVertex => Family::Circulant(6),
            Theorem::Fano => Family::Fano,
            Theorem::Cube => Family::Cube,
        }
    }
}

/// Which former block feeds block `(i, i+d)`; `None` keeps it.
type BlockRule = fn(m: usize, i: usize, d: usize) -> Option<(usize, usize)>;

fn rule_sun(m: usize, i: usize, d: usize) -> Option<(usize, usize)> {
    let h = (m - 1) / 2;
    (d == h).then_some((i, i + h + 1))
}

fn rule_first(m: usize, i: usize, d: usize) -> Option<(usize, usize)> {
    let h = (m - 1) / 2;
    if d < h {
        Some((i + 1, i + d + 1))
    } else if d == h {
        Some((i, i + h + 1))
    } else {
        None
    }
}

fn rule_second(_m: usize, i: usize, d: usize) -> Option<(usize, usize)> {
    match d {
        1 => Some((i, i + 2)),
        2 => Some((i + 1, i + 2)),
        _ => None,
    }
}

fn rule_ten_b(_m: usize, i: usize, d: usize) -> Option<(usize, usize)> {
    match d {
        1 => Some((i + 1, i + 2)),
        2 => Some((i, i + 3)),
        _ => None,
    }
}

/// The hypothesis on `B` shared by the closed-form circulant methods:
/// diagonal blocks empty, block `(i, i+d)` equal to the base offset or its
/// complement.
fn check_offsets(grid: &BlockGrid, base: &[Block2], what: &str) -> Result<()> {
    let m = grid.m();
    for i in 0..m {
        if grid.block(i, i) != BLOCK_O {
            return Err(Error::Condition(format!("{what}: C_{} must induce no edge", i + 1)));
        }
        for d in 1..=m / 2 {
            let b = grid.block(i, i + d);
            if b != base[d] && b != block_complement(base[d]) {
                return Err(Error::Condition(format!(
                    "{what}: the subgraph on C_{} u C_{} is not of the required shape",
                    i + 1,
                    (i + d) % m + 1
                )));
            }
        }
    }
    Ok(())
}

fn pair_parity_rewrite(inst: &SwitchingInstance, out: &mut Graph) -> Result<()> {
    let m = inst.cells.len();
    for v in inst.outside() {
        let counts: Vec<usize> = inst.cells.iter().map(|c| count_in(&inst.host, v, c)).collect();
        let parity = counts[0] % 2;
        if counts.iter().any(|&k| k % 2 != parity) {
            return Err(Error::Condition(format!(
                "vertex {v} has neighbour counts {counts:?} in the pairs, not all of one parity"
            )));
        }
        if parity == 1 {
            // The neighbour w in C_{i+1} moves to π(w) in C_i.
            for i in 0..m {
                let next = &inst.cells[(i + 1) % m];
                for a in 0..2 {
                    out.set_edge(v, inst.cells[i][a], inst.host.has_edge(v, next[a]));
                }
            }
        }
    }
    Ok(())
}

/// `4B'_ij = J B_ij J + J B_{i,j+1} Y + Y B_{i+1,j} J + Y B_{i+1,j+1} Y`.
fn block_formula(grid: &BlockGrid) -> Result<BlockGrid> {
    let m = grid.m();
    let mat = |b: Block2| [[(b & 1) as i32, (b >> 1 & 1) as i32], [(b >> 2 & 1) as i32, (b >> 3 & 1) as i32]];
    let j = [[1, 1], [1, 1]];
    let y = [[1, -1], [-1, 1]];
    let mul = |a: [[i32; 2]; 2], b: [[i32; 2]; 2]| {
        let mut c = [[0; 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                c[r][s] = a[r][0] * b[0][s] + a[r][1] * b[1][s];
            }
        }
        c
    };
    let mut blocks = vec![BLOCK_O; m * m];
    for i in 0..m {
        for jj in 0..m {
            let terms = [
                mul(mul(j, mat(grid.block(i, jj))), j),
                mul(mul(j, mat(grid.block(i, jj + 1))), y),
                mul(mul(y, mat(grid.block(i + 1, jj))), j),
                mul(mul(y, mat(grid.block(i + 1, jj + 1))), y),
            ];
            let mut out = 0u8;
            for r in 0..2 {
                for s in 0..2 {
                    let v: i32 = terms.iter().map(|t| t[r][s]).sum();
                    match v {
                        0 => {}
                        4 => out |= 1 << (2 * r + s),
                        _ => return Err(Error::Condition("block formula leaves 01".into())),
                    }
                }
            }
            blocks[i * m + jj] = out;
        }
    }
    BlockGrid::new(m, blocks)
}

fn write_inside(inst: &SwitchingInstance, b: &Graph, out: &mut Graph) {
    let set = inst.vertices();
    for (i, &a) in set.iter().enumerate() {
        for (j, &c) in set.iter().enumerate().skip(i + 1) {
            out.set_edge(a, c, b.has_edge(i, j));
        }
    }
}

/// Normal form of a twelve-vertex matrix modulo block complements.
fn block_normal(grid: &BlockGrid) -> Vec<Block2> {
    let m = grid.m();
    let mut v = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let b = grid.block(i, j);
            v.push(if b & 1 == 1 { block_complement(b) } else { b });
        }
    }
    v
}

/// Graph drawn for Fano switching, case (a): the 7-cycle `v₁…v₇`.
pub fn fano_case_a() -> Graph {
    Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0)])
}

/// Graph drawn for Fano switching, case (b), and its replacement.
pub fn fano_case_b() -> (Graph, Graph) {
    let e = |v: &[(usize, usize)]| Graph::from_edges(7, &v.iter().map(|&(a, b)| (a - 1, b - 1)).collect::<Vec<_>>());
    (
        e(&[(4, 3), (4, 5), (6, 1), (6, 3), (6, 5), (7, 1), (7, 2), (7, 3), (7, 4), (7, 6)]),
        e(&[(4, 3), (4, 5), (2, 3), (2, 5), (2, 7), (1, 2), (1, 4), (1, 5), (1, 6), (1, 7)]),
    )
}

/// The five cube switching sets fixed by the conjugation: the empty graph,
/// the cube, the antipodal matching, the union of two 4-cycles on opposite
/// edges, and the last two together.
pub fn cube_fixed_bs() -> Vec<Graph> {
    let geo = cube_geometry();
    let by_coord = |x: u8| geo.coords.iter().position(|&c| c == x).unwrap();
    let parse = |s: &str| {
        let b = s.as_bytes();
        by_coord((b[0] - b'0') | (b[1] - b'0') << 1 | (b[2] - b'0') << 2)
    };
    let g = |pairs: &[(&str, &str)]| {
        Graph::from_edges(8, &pairs.iter().map(|&(a, b)| (parse(a), parse(b))).collect::<Vec<_>>())
    };
    let cube = Graph::from_edges(
        8,
        &(0..8)
            .flat_map(|a| (a + 1..8).map(move |b| (a, b)))
            .filter(|&(a, b)| geo.adjacent(a, b))
            .collect::<Vec<_>>(),
    );
    let antipodal = [("000", "111"), ("100", "011"), ("101", "010"), ("110", "001")];
    let cycles = [
        ("000", "100"),
        ("000", "011"),
        ("111", "100"),
        ("111", "011"),
        ("101", "001"),
        ("101", "110"),
        ("010", "001"),
        ("010", "110"),
    ];
    let both: Vec<_> = antipodal.iter().chain(&cycles).copied().collect();
    vec![Graph::empty(8), cube, g(&antipodal), g(&cycles), g(&both)]
}

/// The combinatorial statement of `theorem` applied to `inst`: checks the
/// statement's hypotheses, then rewrites edges as described in prose.
pub fn apply_prose(inst: &SwitchingInstance, theorem: Theorem) -> Result<Graph> {
    let mut out = inst.host.clone();
    match theorem {
        Theorem::Sun | Theorem::FirstFamily | Theorem::SecondFamily | Theorem::TenVertex(_) | Theorem::SixVertex
        | Theorem::TwelveVertex => {
            let Family::Circulant(m) = inst.family else {
                return Err(Error::Domain(format!("{theorem:?} needs pairs, got {}", inst.family)));
            };
            if theorem.family(m) != inst.family {
                return Err(Error::Domain(format!("{theorem:?} does not apply to {}", inst.family)));
            }
            let grid = BlockGrid::from_graph(&inst.b)?;
            pair_parity_rewrite(inst, &mut out)?;
            let (base, rule): (Vec<Block2>, BlockRule) = match theorem {
                Theorem::Sun | Theorem::TenVertex(TenCase::A) => (sun_offsets(m, BLOCK_O), rule_sun),
                Theorem::FirstFamily => (sun_offsets(m, BLOCK_I), rule_first),
                Theorem::TenVertex(TenCase::B) => (sun_offsets(m, BLOCK_I), rule_ten_b),
                Theorem::SecondFamily | Theorem::TenVertex(TenCase::C) => (second_offsets(m), rule_second),
                Theorem::SixVertex => {
                    let (before, after) = six_vertex_pair();
                    if inst.b != before {
                        return Err(Error::Condition("six-vertex: the switching set is not the drawn graph".into()));
                    }
                    write_inside(inst, &after, &mut out);
                    return Ok(out);
                }
                Theorem::TwelveVertex => {
                    let normal = block_normal(&grid);
                    let ok = (0..m).all(|i| grid.block(i, i) == BLOCK_O)
                        && twelve_vertex_representatives()
                            .iter()
                            .any(|r| block_normal(&BlockGrid::from_graph(r).unwrap()) == normal);
                    if !ok {
                        return Err(Error::Condition(
                            "twelve-vertex: the switching set is not a listed matrix up to block complements".into(),
                        ));
                    }
                    write_inside(inst, &block_formula(&grid)?.to_graph(), &mut out);
                    return Ok(out);
                }
                _ => unreachable!(),
            };
            check_offsets(&grid, &base, &format!("{theorem:?}"))?;
            let mut blocks = vec![BLOCK_O; m * m];
            for i in 0..m {
                for d in 1..=m / 2 {
                    let j = (i + d) % m;
                    let b = match rule(m, i, d) {
                        Some((k, l)) => grid.block(k, l),
                        None => grid.block(i, j),
                    };
                    blocks[i * m + j] = b;
                    blocks[j * m + i] = block_transpose(b);
                }
            }
            let new = BlockGrid::new(m, blocks)?;
            write_inside(inst, &new.to_graph(), &mut out);
        }
        Theorem::Fano => {
            if inst.family != Family::Fano {
                return Err(Error::Domain("Fano switching needs a Fano instance".into()));
            }
            let geo = fano_geometry();
            let set = inst.vertices();
            let mask = |pts: &[usize; 3]| pts.iter().fold(0 as Column, |a, &p| a | 1 << p);
            for v in inst.outside() {
                let c = column_of(&inst.host, v, &set);
                let img = if c == 0 || c == 0x7f {
                    c
                } else if let Some(i) = geo.lines.iter().position(|l| mask(l) == c) {
                    mask(&geo.ovals[i])
                } else if let Some(i) = geo.lines.iter().position(|l| mask(l) ^ 0x7f == c) {
                    mask(&geo.ovals[i]) ^ 0x7f
                } else {
                    return Err(Error::Condition(format!(
                        "vertex {v} is adjacent to neither all, none, a line, nor four points off a line"
                    )));
                };
                for (i, &s) in set.iter().enumerate() {
                    out.set_edge(v, s, img >> i & 1 == 1);
                }
            }
            let (b_before, b_after) = fano_case_b();
            if inst.b == b_before {
                write_inside(inst, &b_after, &mut out);
            } else if inst.b != fano_case_a() && inst.b.edge_count() != 0 && inst.b != Graph::complete(7) {
                return Err(Error::Condition("Fano: the switching set is not one of the drawn graphs".into()));
            }
        }
        Theorem::Cube => {
            if inst.family != Family::Cube {
                return Err(Error::Domain("cube switching needs a cube instance".into()));
            }
            let geo = cube_geometry();
            let pi = geo.pi();
            let set = inst.vertices();
            let mask = |pts: &[usize]| pts.iter().fold(0 as Column, |a, &p| a | 1 << p);
            for v in inst.outside() {
                let c = column_of(&inst.host, v, &set);
                let img = if c == 0 || c == 0xff {
                    c
                } else {
                    let k = geo.planes.iter().position(|p| mask(p) == c).ok_or_else(|| {
                        Error::Condition(format!("vertex {v} is adjacent to neither all, none, nor an affine plane"))
                    })?;
                    let p = &geo.planes[k];
                    if geo.is_face(k) {
                        mask(&p.iter().map(|&x| pi[x]).collect::<Vec<_>>())
                    } else if k < 12 {
                        c ^ 0xff
                    } else {
                        c
                    }
                };
                for (i, &s) in set.iter().enumerate() {
                    out.set_edge(v, s, img >> i & 1 == 1);
                }
            }
            if !cube_fixed_bs().contains(&inst.b) {
                let r = build(Family::Cube)?;
                let nb = crate::admissible::conjugate(&r, &inst.b)
                    .ok_or_else(|| Error::Condition("cube: B is not in B_R".into()))?;
                write_inside(inst, &nb, &mut out);
            }
        }
    }
    Ok(out)
}

/// The drawn six-vertex switching set and its replacement.
pub fn six_vertex_pair() -> (Graph, Graph) {
    let e = |v: &[(usize, usize)]| Graph::from_edges(6, &v.iter().map(|&(a, b)| (a - 1, b - 1)).collect::<Vec<_>>());
    (
        e(&[(2, 4), (2, 3), (2, 6), (4, 5), (4, 6), (6, 1)]),
        e(&[(2, 4), (2, 5), (2, 6), (4, 1), (4, 6), (6, 3)]),
    )
}

/// Cospectral with cospectral complements.
pub fn verify_r_cospectral(g: &Graph, h: &Graph) -> Result<bool> {
    if g.order() != h.order() {
        return Err(Error::Dimension(format!("orders {} and {} differ", g.order(), h.order())));
    }
    Ok(g.char_poly() == h.char_poly() && g.complement().char_poly() == h.complement().char_poly())
}

/// Bounds for detection.
#[derive(Clone, Debug, Default)]
pub struct SearchLimits {
    pub max_instances: Option<usize>,
    pub time_budget: Option<Duration>,
}

struct Finder<'a> {
    nr: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
    order: Vec<usize>,
    /// Dual words completed when position `order[k]` is placed, as lists of
    /// positions.
    completes: Vec<Vec<Vec<usize>>>,
    group: &'a SymmetryGroup,
    r: &'a ScaledOrthogonal,
    host: &'a Graph,
    deadline: Option<Instant>,
}

impl Finder<'_> {
    fn xor_support(&self, verts: &[usize], acc: &mut [u64]) {
        acc.iter_mut().for_each(|w| *w = 0);
        for &v in verts {
            for (a, b) in acc.iter_mut().zip(&self.rows[v]) {
                *a ^= b;
            }
        }
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() > d)
    }

    /// Extends `tuple` (indexed by position, `usize::MAX` when unset) at
    /// step `k` of `order`.
    fn dfs(&self, k: usize, tuple: &mut Vec<usize>, chosen: &mut Vec<u64>, forced: &[u64], out: &mut Vec<Vec<usize>>) {
        if k == self.nr {
            self.finish(tuple, out);
            return;
        }
        if self.expired() {
            return;
        }
        let remaining = self.nr - k;
        let outstanding: u32 = forced.iter().zip(chosen.iter()).map(|(f, c)| (f & !c).count_ones()).sum();
        let n = self.host.order();
        let mut acc = vec![0u64; self.words];
        for u in 0..n {
            if chosen[u / 64] >> (u % 64) & 1 == 1 {
                continue;
            }
            let is_forced = forced[u / 64] >> (u % 64) & 1 == 1;
            if outstanding as usize == remaining && !is_forced {
                continue;
            }
            let pos = self.order[k];
            tuple[pos] = u;
            chosen[u / 64] |= 1 << (u % 64);
            let mut f = forced.to_vec();
            let mut ok = true;
            for word in &self.completes[k] {
                let verts: Vec<usize> = word.iter().map(|&p| tuple[p]).collect();
                self.xor_support(&verts, &mut acc);
                for (fw, a) in f.iter_mut().zip(&acc) {
                    *fw |= a;
                }
                let need: u32 = f.iter().zip(chosen.iter()).map(|(x, c)| (x & !c).count_ones()).sum();
                if need as usize > remaining - 1 {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.dfs(k + 1, tuple, chosen, &f, out);
            }
            chosen[u / 64] &= !(1 << (u % 64));
            tuple[pos] = usize::MAX;
        }
    }

    fn seeds(&self, w: usize, picked: &mut Vec<usize>, acc: &mut Vec<u64>, out: &mut Vec<Vec<usize>>) {
        if picked.len() == w {
            let mut x = acc.clone();
            for &v in picked.iter() {
                x[v / 64] &= !(1 << (v % 64));
            }
            if x.iter().map(|y| y.count_ones() as usize).sum::<usize>() <= self.nr - w {
                out.push(picked.clone());
            }
            return;
        }
        let last = *picked.last().unwrap();
        for u in last + 1..self.host.order() {
            for (a, r) in acc.iter_mut().zip(&self.rows[u]) {
                *a ^= r;
            }
            picked.push(u);
            self.seeds(w, picked, acc, out);
            picked.pop();
            for (a, r) in acc.iter_mut().zip(&self.rows[u]) {
                *a ^= r;
            }
        }
    }

    /// Places an ordered seed on the first positions and extends it.
    fn start(&self, seed: &[usize], out: &mut Vec<Vec<usize>>) {
        let mut tuple = vec![usize::MAX; self.nr];
        let mut chosen = vec![0u64; self.words];
        let mut forced = vec![0u64; self.words];
        let mut acc = vec![0u64; self.words];
        for (k, &u) in seed.iter().enumerate() {
            tuple[self.order[k]] = u;
            chosen[u / 64] |= 1 << (u % 64);
            for word in &self.completes[k] {
                let verts: Vec<usize> = word.iter().map(|&p| tuple[p]).collect();
                self.xor_support(&verts, &mut acc);
                for (f, a) in forced.iter_mut().zip(&acc) {
                    *f |= a;
                }
            }
        }
        let need: u32 = forced.iter().zip(&chosen).map(|(f, c)| (f & !c).count_ones()).sum();
        if need as usize <= self.nr - seed.len() {
            self.dfs(seed.len(), &mut tuple, &mut chosen, &forced, out);
        }
    }

    fn finish(&self, tuple: &[usize], out: &mut Vec<Vec<usize>>) {
        for s in &self.group.perms {
            let t: Vec<usize> = s.iter().map(|&i| tuple[i]).collect();
            if t.as_slice() < tuple {
                return;
            }
        }
        let b = self.host.induced(tuple);
        if !is_admissible(self.r, &b) {
            return;
        }
        let inside: BTreeSet<usize> = tuple.iter().copied().collect();
        let ok = (0..self.host.order())
            .filter(|u| !inside.contains(u))
            .all(|u| transform_column(self.r, column_of(self.host, u, tuple)).is_some());
        if ok {
            out.push(tuple.to_vec());
        }
    }
}

/// All valid switching sets of `family` in `g`, one per class of orderings
/// under the family's symmetries, sorted by vertex tuple.
pub fn find_switching_sets(g: &Graph, family: Family, limits: &SearchLimits) -> Result<Vec<SwitchingInstance>> {
    let r = build(family)?;
    let nr = r.size();
    let n = g.order();
    if n < nr {
        return Ok(Vec::new());
    }
    let group = SymmetryGroup::new(family, GroupChoice::Maximal)?;
    let vs: Vec<Column> = enumerate_v(&r)?.into_iter().map(|(v, _)| v).collect();
    let dual: Vec<Column> = (1..1 << nr)
        .filter(|&h: &Column| vs.iter().all(|&v| (h & v).count_ones() % 2 == 0))
        .collect();
    // Start with a lightest dual word, then add positions greedily by the
    // number of dual words they complete.
    let mut order: Vec<usize> = Vec::new();
    if let Some(&h0) = dual.iter().min_by_key(|h| (h.count_ones(), **h)) {
        order.extend((0..nr).filter(|&i| h0 >> i & 1 == 1));
    }
    while order.len() < nr {
        let placed = order.iter().fold(0 as Column, |a, &p| a | 1 << p);
        let next = (0..nr)
            .filter(|p| !order.contains(p))
            .max_by_key(|&p| {
                let m = placed | 1 << p;
                (dual.iter().filter(|&&h| h & !m == 0).count(), std::cmp::Reverse(p))
            })
            .unwrap();
        order.push(next);
    }
    let mut completes = vec![Vec::new(); nr];
    let mut placed: Column = 0;
    for (k, &p) in order.iter().enumerate() {
        placed |= 1 << p;
        for &h in &dual {
            if h >> p & 1 == 1 && h & !placed == 0 {
                completes[k].push((0..nr).filter(|&i| h >> i & 1 == 1).collect());
            }
        }
    }
    let words = n.div_ceil(64);
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|v| {
            let mut w = vec![0u64; words];
            for u in g.neighbours(v) {
                w[u / 64] |= 1 << (u % 64);
            }
            w
        })
        .collect();
    let finder = Finder {
        nr,
        words,
        rows,
        order,
        completes,
        group: &group,
        r: &r,
        host: g,
        deadline: limits.time_budget.map(|d| Instant::now() + d),
    };
    // Seeds: unordered sets on the support of the lightest dual word whose
    // row sum leaves at most `nr − w` odd outside vertices.
    let w = dual.iter().map(|h| h.count_ones() as usize).min().unwrap_or(1).max(1);
    let results: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut seeds = Vec::new();
            let mut acc = finder.rows[first].clone();
            let mut picked = vec![first];
            finder.seeds(w, &mut picked, &mut acc, &mut seeds);
            let mut out = Vec::new();
            for seed in seeds {
                let mut perm = seed.clone();
                permute(&mut perm, 0, &mut |p| {
                    finder.start(p, &mut out);
                    false
                });
            }
            out
        })
        .collect();
    let mut results = results;
    results.sort();
    results.dedup();
    if let Some(k) = limits.max_instances {
        results.truncate(k);
    }
    results
        .into_iter()
        .map(|t| SwitchingInstance::new(g.clone(), family, &t))
        .collect()
}

/// A host of order `|R| + profile.len()` containing `b` as a valid
/// switching set; outside vertex `j` sees the set through `profile[j]`.
pub fn gen_planted(family: Family, b: &Graph, profile: &[Column], seed: u64) -> Result<(Graph, SwitchingInstance)> {
    let r = build(family)?;
    let nr = r.size();
    if b.order() != nr || !is_admissible(&r, b) {
        return Err(Error::Admissibility(format!("planted B is not in B_R for {family}")));
    }
    for &c in profile {
        if c >> nr != 0 || transform_column(&r, c).is_none() {
            return Err(Error::Admissibility(format!(
                "profile column {} is not in V_R",
                crate::admissible::column_to_string(c, nr)
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = nr + profile.len();
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(&mut rng);
    let mut g = Graph::empty(n);
    for i in 0..nr {
        for j in i + 1..nr {
            g.set_edge(labels[i], labels[j], b.has_edge(i, j));
        }
    }
    for (o, &c) in profile.iter().enumerate() {
        let u = labels[nr + o];
        for i in 0..nr {
            g.set_edge(u, labels[i], c >> i & 1 == 1);
        }
    }
    for a in nr..n {
        for c in a + 1..n {
            if rng.gen_bool(0.5) {
                g.add_edge(labels[a], labels[c]);
            }
        }
    }
    let inst = SwitchingInstance::new(g.clone(), family, &labels[..nr])?;
    Ok((g, inst))
}

/// `count` columns drawn uniformly from `V_R`.
pub fn random_profile(family: Family, count: usize, rng: &mut impl Rng) -> Result<Vec<Column>> {
    let vs: Vec<Column> = enumerate_v(&build(family)?)?.into_iter().map(|(v, _)| v).collect();
    Ok((0..count).map(|_| vs[rng.gen_range(0..vs.len())]).collect())
}

/// A switching set satisfying `theorem`'s hypothesis, with random block
/// complements where the statement allows them.
pub fn random_theorem_b(theorem: Theorem, m: usize, rng: &mut impl Rng) -> Result<Graph> {
    let complement_blocks = |g: Graph, rng: &mut dyn rand::RngCore| -> Result<Graph> {
        let grid = BlockGrid::from_graph(&g)?;
        let mm = grid.m();
        let mut blocks: Vec<Block2> = (0..mm * mm).map(|k| grid.block(k / mm, k % mm)).collect();
        for i in 0..mm {
            for j in i + 1..mm {
                if rng.gen_bool(0.5) {
                    blocks[i * mm + j] = block_complement(blocks[i * mm + j]);
                    blocks[j * mm + i] = block_complement(blocks[j * mm + i]);
                }
            }
        }
        Ok(BlockGrid::new(mm, blocks)?.to_graph())
    };
    match theorem {
        Theorem::Sun => complement_blocks(build_named_b(NamedB::Sun, m)?, rng),
        Theorem::FirstFamily => complement_blocks(build_named_b(NamedB::FirstFamily, m)?, rng),
        Theorem::SecondFamily => complement_blocks(build_named_b(NamedB::SecondFamily, m)?, rng),
        Theorem::TenVertex(c) => complement_blocks(build_named_b(NamedB::TenVertex(c), 5)?, rng),
        Theorem::SixVertex => build_named_b(NamedB::SixVertex, 3),
        Theorem::TwelveVertex => {
            let k = rng.gen_range(0..18);
            complement_blocks(build_named_b(NamedB::TwelveVertex(k), 6)?, rng)
        }
        Theorem::Fano => Ok(if rng.gen_bool(0.5) { fano_case_a() } else { fano_case_b().0 }),
        Theorem::Cube => {
            let f = Family::Cube;
            static REPS: OnceLock<Vec<Graph>> = OnceLock::new();
            let reps = REPS.get_or_init(|| {
                let bs = crate::admissible::enumerate_b_bruteforce(&build(f).unwrap()).unwrap();
                let group = SymmetryGroup::new(f, GroupChoice::Maximal).unwrap();
                classes(&bs, &group).into_iter().map(|c| c.canonical).collect()
            });
            let fixed = cube_fixed_bs();
            Ok(if rng.gen_bool(0.5) {
                fixed[rng.gen_range(0..fixed.len())].clone()
            } else {
                reps[rng.gen_range(0..reps.len())].clone()
            })
        }
    }
}

/// Random host satisfying the GM hypotheses for the given cell sizes.
pub fn gen_planted_gm(sizes: &[usize], outside: usize, seed: u64) -> Result<(Graph, Vec<Vec<usize>>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inside: usize = sizes.iter().sum();
    let n = inside + outside;
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(&mut rng);
    let mut cells = Vec::new();
    let mut at = 0;
    for &s in sizes {
        if s == 0 {
            return Err(Error::Domain("cells must be nonempty".into()));
        }
        cells.push(labels[at..at + s].to_vec());
        at += s;
    }
    let mut g = Graph::empty(n);
    for (i, ci) in cells.iter().enumerate() {
        for (j, cj) in cells.iter().enumerate().skip(i) {
            regular_block(&mut g, ci, cj, i == j, &mut rng);
        }
    }
    for &v in &labels[inside..] {
        for c in &cells {
            let k = match rng.gen_range(0..3) {
                0 => 0,
                1 if c.len() % 2 == 0 => c.len() / 2,
                _ => c.len(),
            };
            let mut pick = c.clone();
            pick.shuffle(&mut rng);
            for &w in &pick[..k] {
                g.add_edge(v, w);
            }
        }
    }
    random_outside_edges(&mut g, &labels[inside..], &mut rng);
    Ok((g, cells))
}

/// Edges between `a` and `b` (or inside `a` when `same`) such that every
/// vertex has a constant number of neighbours on the other side.
fn regular_block(g: &mut Graph, a: &[usize], b: &[usize], same: bool, rng: &mut impl Rng) {
    let s = a.len();
    match rng.gen_range(0..4) {
        0 => {}
        1 => {
            for (x, &u) in a.iter().enumerate() {
                for (y, &w) in b.iter().enumerate() {
                    if !same || x != y {
                        g.add_edge(u, w);
                    }
                }
            }
        }
        k => {
            // A permutation matching when sizes agree (an involution without
            // fixed points inside one cell), or its complement.
            if s != b.len() || (same && s % 2 == 1) {
                return;
            }
            let mut perm: Vec<usize> = (0..s).collect();
            perm.shuffle(rng);
            let partner: Vec<usize> = if same {
                let mut p = vec![0; s];
                for c in perm.chunks(2) {
                    p[c[0]] = c[1];
                    p[c[1]] = c[0];
                }
                p
            } else {
                perm
            };
            for x in 0..s {
                for y in 0..s {
                    if same && y <= x {
                        continue;
                    }
                    let m = partner[x] == y;
                    if (k == 2) == m {
                        g.add_edge(a[x], b[y]);
                    }
                }
            }
        }
    }
}

fn random_outside_edges(g: &mut Graph, outside: &[usize], rng: &mut impl Rng) {
    for (i, &a) in outside.iter().enumerate() {
        for &b in &outside[i + 1..] {
            if rng.gen_bool(0.5) {
                g.add_edge(a, b);
            }
        }
    }
}

/// Random host satisfying the WQH hypotheses.
pub fn gen_planted_wqh(sizes: &[usize], outside: usize, seed: u64) -> Result<(Graph, Vec<(Vec<usize>, Vec<usize>)>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inside: usize = sizes.iter().map(|s| 2 * s).sum();
    let n = inside + outside;
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(&mut rng);
    let mut cells = Vec::new();
    let mut at = 0;
    for &s in sizes {
        if s == 0 {
            return Err(Error::Domain("cells must be nonempty".into()));
        }
        cells.push((labels[at..at + s].to_vec(), labels[at + s..at + 2 * s].to_vec()));
        at += 2 * s;
    }
    // Retry random regular blocks until the signed differences agree.
    let base = Graph::empty(n);
    let mut g = base.clone();
    for _ in 0..1000 {
        g = base.clone();
        for (i, (a1, a2)) in cells.iter().enumerate() {
            for (j, (b1, b2)) in cells.iter().enumerate().skip(i) {
                let same = i == j;
                regular_block(&mut g, a1, b1, same, &mut rng);
                regular_block(&mut g, a2, b2, same, &mut rng);
                regular_block(&mut g, a1, b2, false, &mut rng);
                if !same {
                    regular_block(&mut g, a2, b1, false, &mut rng);
                }
            }
        }
        if wqh_inside_ok(&g, &cells) {
            break;
        }
    }
    for &v in &labels[inside..] {
        for (c1, c2) in &cells {
            match rng.gen_range(0..3) {
                0 => c1.iter().for_each(|&w| g.add_edge(v, w)),
                1 => c2.iter().for_each(|&w| g.add_edge(v, w)),
                _ => {
                    let k = rng.gen_range(0..=c1.len());
                    for c in [c1, c2] {
                        let mut p = c.clone();
                        p.shuffle(&mut rng);
                        p[..k].iter().for_each(|&w| g.add_edge(v, w));
                    }
                }
            }
        }
    }
    random_outside_edges(&mut g, &labels[inside..], &mut rng);
    Ok((g, cells))
}

fn wqh_inside_ok(g: &Graph, cells: &[(Vec<usize>, Vec<usize>)]) -> bool {
    cells.iter().all(|(a1, a2)| {
        cells.iter().all(|(b1, b2)| {
            let d: BTreeSet<i64> = a1
                .iter()
                .map(|&v| count_in(g, v, b1) as i64 - count_in(g, v, b2) as i64)
                .chain(a2.iter().map(|&v| count_in(g, v, b2) as i64 - count_in(g, v, b1) as i64))
                .collect();
            d.len() == 1
        })
    })
}

/// A subspace of `𝔽₂ⁿ` given by a basis of packed vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfTwoSpace {
    pub dimension: usize,
    pub basis: Vec<u32>,
}

impl GfTwoSpace {
    pub fn new(dimension: usize, basis: Vec<u32>) -> Result<Self> {
        let s = GfTwoSpace { dimension, basis };
        if s.span().count_ones() as usize != (1usize << s.basis.len()) - 1 {
            return Err(Error::Domain("basis vectors are dependent".into()));
        }
        Ok(s)
    }

    /// Nonzero vectors of the span, as a bitset over `1..2ⁿ`.
    pub fn span(&self) -> u64 {
        let mut set = 0u64;
        for mask in 1u32..1 << self.basis.len() {
            let v = (0..self.basis.len())
                .filter(|&i| mask >> i & 1 == 1)
                .fold(0, |a, i| a ^ self.basis[i]);
            set |= 1 << v;
        }
        set
    }
}

fn kneser_vertices(n: usize, k: usize) -> Vec<u64> {
    let mut seen = BTreeSet::new();
    fn rec(n: usize, k: usize, from: u32, basis: &mut Vec<u32>, span: u64, seen: &mut BTreeSet<u64>) {
        if basis.len() == k {
            seen.insert(span);
            return;
        }
        for v in from..1u32 << n {
            if span >> v & 1 == 1 {
                continue;
            }
            let mut s = span | 1 << v;
            let mut x = span;
            while x != 0 {
                let w = x.trailing_zeros();
                x &= x - 1;
                s |= 1 << (w ^ v);
            }
            basis.push(v);
            rec(n, k, v + 1, basis, s, seen);
            basis.pop();
        }
    }
    rec(n, k, 1, &mut Vec::new(), 0, &mut seen);
    seen.into_iter().collect()
}

fn check_kneser(n: usize, k: usize) -> Result<()> {
    if k < 2 || k > n || n > 6 {
        return Err(Error::Domain(format!("2-Kneser graph needs 2 <= k <= n <= 6, got n={n}, k={k}")));
    }
    Ok(())
}

/// The `k`-subspaces of `𝔽₂ⁿ`, adjacent when they meet trivially; vertices
/// in order of their point sets.
pub fn gen_kneser2(n: usize, k: usize) -> Result<Graph> {
    check_kneser(n, k)?;
    let vs = kneser_vertices(n, k);
    let mut g = Graph::empty(vs.len());
    for a in 0..vs.len() {
        for b in a + 1..vs.len() {
            if vs[a] & vs[b] == 0 {
                g.add_edge(a, b);
            }
        }
    }
    Ok(g)
}

/// A Fano switching set in `K₂(n, k)`: the spans of a fixed
/// `(k−2)`-space `σ` with the lines of a plane `π` meeting `σ` trivially.
pub fn find_kneser_fano_instance(n: usize, k: usize) -> Result<SwitchingInstance> {
    check_kneser(n, k)?;
    if n < k + 1 {
        return Err(Error::Domain(format!("need n >= k + 1 for a plane beside sigma, got n={n}, k={k}")));
    }
    let g = gen_kneser2(n, k)?;
    let vs = kneser_vertices(n, k);
    let plane = GfTwoSpace::new(n, vec![1, 2, 4])?;
    let sigma = GfTwoSpace::new(n, (3..k + 1).map(|i| 1u32 << i).collect())?;
    let lines: Vec<GfTwoSpace> = kneser_vertices(3, 2)
        .into_iter()
        .map(|pts| {
            let p: Vec<u32> = (1..8).filter(|&v| pts >> v & 1 == 1).collect();
            GfTwoSpace::new(n, vec![p[0], p[1]]).unwrap()
        })
        .collect();
    debug_assert_eq!(plane.span().count_ones(), 7);
    let members: Vec<usize> = lines
        .iter()
        .map(|l| {
            let mut basis = sigma.basis.clone();
            basis.extend(&l.basis);
            let span = GfTwoSpace::new(n, basis).expect("sigma meets the plane trivially").span();
            vs.iter().position(|&v| v == span).expect("a k-space")
        })
        .collect();
    // Order the seven spaces so that Fano lines are the pencils of π.
    let geo = fano_geometry();
    let point_sets: Vec<u64> = lines.iter().map(GfTwoSpace::span).collect();
    let mut idx: Vec<usize> = (0..7).collect();
    let mut found = None;
    permute(&mut idx, 0, &mut |p| {
        let ok = geo.lines.iter().all(|l| {
            let common = l.iter().fold(!0u64, |a, &x| a & point_sets[p[x]]);
            common != 0
        });
        if ok {
            let tuple: Vec<usize> = p.iter().map(|&i| members[i]).collect();
            if let Ok(inst) = SwitchingInstance::new(g.clone(), Family::Fano, &tuple) {
                found = Some(inst);
                return true;
            }
        }
        false
    });
    found.ok_or_else(|| Error::Condition("no labelling of the pencil makes a Fano switching set".into()))
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == v.len() {
        return f(v);
    }
    for i in k..v.len() {
        v.swap(k, i);
        if permute(v, k + 1, f) {
            return true;
        }
        v.swap(k, i);
    }
    false
}

/// Switches and reports whether the result is an ℝ-cospectral mate.
pub fn switch_and_verify(inst: &SwitchingInstance) -> Result<(Graph, bool, bool)> {
    let h = apply(inst)?;
    let cospectral = verify_r_cospectral(&inst.host, &h)?;
    let iso = is_isomorphic(&inst.host, &h)?;
    Ok((h, cospectral, iso))
}
