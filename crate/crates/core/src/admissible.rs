//! The admissible outside columns `𝓥_R` and switching-set matrices `𝓑_R`.
//!
//! `𝓑_R` is found either by brute force over every graph on `n ≤ 8`
//! vertices, or, for the circulant family, by patching together 2×2 blocks
//! under the local window rule
//!
//! ```text
//! 4B'_ij = J B_ij J + J B_i,j+1 Y + Y B_i+1,j J + Y B_i+1,j+1 Y   (indices mod m)
//! ```
//!
//! Patching fixes every diagonal block to `O` and every off-diagonal block to
//! one representative of `{X, J − X}`; the full set is recovered by block and
//! full complementation, under which it is closed.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::catalog::{build, Family};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::ScaledOrthogonal;

pub const FORMAT_VERSION: &str = "level2-catalog v1";

/// 01-vectors of length `n` are packed with coordinate `i` at bit `i`.
pub type Column = u32;

pub fn column_to_string(v: Column, n: usize) -> String {
    (0..n)
        .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn column_from_slice(v: &[u8]) -> Column {
    v.iter()
        .enumerate()
        .map(|(i, &x)| ((x & 1) as u32) << i)
        .sum()
}

/// Lexicographic rank of a packed column read from coordinate 0.
fn column_lex_key(v: Column, n: usize) -> u32 {
    v.reverse_bits() >> (32 - n)
}

/// `Rᵀv` for a packed 01-vector, if it is again a 01-vector.
pub fn transform_column(r: &ScaledOrthogonal, v: Column) -> Option<Column> {
    let n = r.size();
    let mut out = 0;
    for j in 0..n {
        let mut s = 0;
        for i in 0..n {
            if v >> i & 1 == 1 {
                s += r.at(i, j);
            }
        }
        match s {
            0 => {}
            2 => out |= 1 << j,
            _ => return None,
        }
    }
    Some(out)
}

/// `𝓥_R` as (v, Rᵀv) pairs sorted lexicographically by `v`.
pub fn enumerate_v(r: &ScaledOrthogonal) -> Result<Vec<(Column, Column)>> {
    let n = r.size();
    if n > 16 {
        return Err(Error::capacity("V enumeration order", n, 16));
    }
    let mut out: Vec<(Column, Column)> = (0..1u32 << n)
        .filter_map(|v| transform_column(r, v).map(|w| (v, w)))
        .collect();
    out.sort_by_key(|&(v, _)| column_lex_key(v, n));
    Ok(out)
}

/// `Rᵀv`, or an admissibility error naming the vector.
pub fn image_of_column(r: &ScaledOrthogonal, v: &[u8]) -> Result<Vec<u8>> {
    let n = r.size();
    if v.len() != n || v.iter().any(|&x| x > 1) {
        return Err(Error::Dimension(format!(
            "expected a 01-vector of length {n}"
        )));
    }
    let packed = column_from_slice(v);
    let w = transform_column(r, packed).ok_or_else(|| {
        Error::Admissibility(format!(
            "column {} is not in V_R",
            column_to_string(packed, n)
        ))
    })?;
    Ok((0..n).map(|j| (w >> j & 1) as u8).collect())
}

/// `RᵀBR` exactly, if it is an adjacency matrix.
pub fn conjugate(r: &ScaledOrthogonal, b: &Graph) -> Option<Graph> {
    let n = r.size();
    assert_eq!(b.order(), n);
    // T = B M, then P = Mᵀ T; P must be 4 times an adjacency matrix.
    let mut t = vec![0i32; n * n];
    for a in 0..n {
        for c in b.neighbours(a) {
            for j in 0..n {
                t[a * n + j] += r.at(c, j);
            }
        }
    }
    let mut out = Graph::empty(n);
    for i in 0..n {
        for j in i..n {
            let s: i32 = (0..n).map(|a| r.at(a, i) * t[a * n + j]).sum();
            match (s, i == j) {
                (0, _) => {}
                (4, false) => out.add_edge(i, j),
                _ => return None,
            }
        }
    }
    Some(out)
}

pub fn is_admissible(r: &ScaledOrthogonal, b: &Graph) -> bool {
    b.order() == r.size() && conjugate(r, b).is_some()
}

/// Every graph `B` on `n ≤ 8` vertices with `RᵀBR` an adjacency matrix,
/// sorted by upper-triangle key.
pub fn enumerate_b_bruteforce(r: &ScaledOrthogonal) -> Result<Vec<Graph>> {
    let n = r.size();
    Ok(bruteforce_keys(r)?
        .into_iter()
        .map(|k| Graph::from_key(n, k))
        .collect())
}

/// Upper-triangle keys of `𝓑_R` by Gray-code enumeration.
///
/// `P = MᵀBM` is kept in an 8×8 byte array. Toggling edge `{a, b}` adds
/// `±(M_a ⊗ M_b + M_b ⊗ M_a)`, and `B` is admissible iff every entry of `P`
/// is 0 or 4 with a zero diagonal. The leading edges are fixed per task so
/// that tasks run in parallel; the merge is sorted.
pub fn bruteforce_keys(r: &ScaledOrthogonal) -> Result<Vec<u128>> {
    let n = r.size();
    if n > 8 {
        return Err(Error::capacity("brute-force B enumeration order", n, 8));
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let e = edges.len();
    let mut plus = vec![[0i8; 64]; e];
    for (k, &(a, b)) in edges.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                plus[k][i * 8 + j] = (r.at(a, i) * r.at(b, j) + r.at(b, i) * r.at(a, j)) as i8;
            }
        }
    }
    let minus: Vec<[i8; 64]> = plus.iter().map(|d| d.map(|x| -x)).collect();
    let mut mask = [!4i8; 64];
    for i in 0..8 {
        mask[i * 8 + i] = -1;
    }
    let fixed = e.min(8);
    let free = e - fixed;
    // Key position p (0 = most significant) belongs to edge p; key bit g is
    // edge e-1-g.
    let chunks: Vec<Vec<u128>> = (0..1u64 << fixed)
        .into_par_iter()
        .map(|c| {
            let mut p = [0i8; 64];
            for g in free..e {
                if c >> (g - free) & 1 == 1 {
                    add(&mut p, &plus[e - 1 - g]);
                }
            }
            let mut found = Vec::new();
            let check =
                |p: &[i8; 64]| p.iter().zip(&mask).fold(0i8, |acc, (x, m)| acc | (x & m)) == 0;
            if check(&p) {
                found.push((c as u128) << free);
            }
            let mut code = 0u64;
            for s in 1..1u64 << free {
                let g = s.trailing_zeros() as usize;
                code ^= 1 << g;
                let edge = e - 1 - g;
                if code >> g & 1 == 1 {
                    add(&mut p, &plus[edge]);
                } else {
                    add(&mut p, &minus[edge]);
                }
                if check(&p) {
                    found.push(((c as u128) << free) | code as u128);
                }
            }
            found
        })
        .collect();
    let mut keys: Vec<u128> = chunks.into_iter().flatten().collect();
    keys.sort_unstable();
    Ok(keys)
}

#[inline(always)]
fn add(p: &mut [i8; 64], d: &[i8; 64]) {
    for (x, y) in p.iter_mut().zip(d) {
        *x = x.wrapping_add(*y);
    }
}

/// A 2×2 01-block packed as `b00 | b01 << 1 | b10 << 2 | b11 << 3`.
pub type Block2 = u8;

pub const BLOCK_O: Block2 = 0;
pub const BLOCK_I: Block2 = 0b1001;
pub const BLOCK_Z: Block2 = 0b0110;
pub const BLOCK_J: Block2 = 0b1111;
/// `N = [[0,0],[1,1]]`.
pub const BLOCK_N: Block2 = 0b1100;
/// `Nᵀ = [[0,1],[0,1]]`.
pub const BLOCK_NT: Block2 = 0b1010;

pub fn block_transpose(b: Block2) -> Block2 {
    (b & 0b1001) | (b & 0b0010) << 1 | (b & 0b0100) >> 1
}

pub fn block_complement(b: Block2) -> Block2 {
    !b & 0b1111
}

fn block_at(b: Block2, a: usize, c: usize) -> i32 {
    (b >> (2 * a + c) & 1) as i32
}

/// `m × m` grid of 2×2 blocks; `blocks[i * m + j]` is `B_ij`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockGrid {
    m: usize,
    blocks: Vec<Block2>,
}

impl BlockGrid {
    pub fn new(m: usize, blocks: Vec<Block2>) -> Result<Self> {
        if blocks.len() != m * m {
            return Err(Error::Dimension(format!(
                "{} blocks for a {m}x{m} grid",
                blocks.len()
            )));
        }
        let g = BlockGrid { m, blocks };
        if !g.to_graph_checked() {
            return Err(Error::Admissibility(
                "block grid is not an adjacency matrix".into(),
            ));
        }
        Ok(g)
    }

    fn to_graph_checked(&self) -> bool {
        let m = self.m;
        (0..m).all(|i| {
            let d = self.blocks[i * m + i];
            (d == BLOCK_O || d == BLOCK_Z)
                && (0..m).all(|j| self.blocks[j * m + i] == block_transpose(self.blocks[i * m + j]))
                && self.blocks.iter().all(|&b| b < 16)
        })
    }

    pub fn from_graph(g: &Graph) -> Result<Self> {
        let n = g.order();
        if n % 2 != 0 || n == 0 {
            return Err(Error::Dimension(format!(
                "order {n} is not a positive even number"
            )));
        }
        let m = n / 2;
        let mut blocks = vec![0; m * m];
        for i in 0..m {
            for j in 0..m {
                let mut b = 0;
                for a in 0..2 {
                    for c in 0..2 {
                        if g.has_edge(2 * i + a, 2 * j + c) {
                            b |= 1 << (2 * a + c);
                        }
                    }
                }
                blocks[i * m + j] = b;
            }
        }
        Ok(BlockGrid { m, blocks })
    }

    pub fn to_graph(&self) -> Graph {
        let m = self.m;
        let mut g = Graph::empty(2 * m);
        for i in 0..m {
            for j in 0..m {
                let b = self.blocks[i * m + j];
                for a in 0..2 {
                    for c in 0..2 {
                        let (u, v) = (2 * i + a, 2 * j + c);
                        if u < v && block_at(b, a, c) == 1 {
                            g.add_edge(u, v);
                        }
                    }
                }
            }
        }
        g
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn block(&self, i: usize, j: usize) -> Block2 {
        self.blocks[(i % self.m) * self.m + j % self.m]
    }

    /// Every block has an even number of ones.
    pub fn blocks_even(&self) -> bool {
        self.blocks.iter().all(|b| b.count_ones() % 2 == 0)
    }
}

/// `4X = J P J + J Q Y + Y S J + Y T Y`, or `None` unless `X` is 01.
fn window(p: Block2, q: Block2, s: Block2, t: Block2) -> Option<Block2> {
    const J: [[i32; 2]; 2] = [[1, 1], [1, 1]];
    const Y: [[i32; 2]; 2] = [[1, -1], [-1, 1]];
    let mut out = 0;
    for a in 0..2 {
        for c in 0..2 {
            let mut v = 0;
            for k in 0..2 {
                for l in 0..2 {
                    v += J[a][k] * block_at(p, k, l) * J[l][c]
                        + J[a][k] * block_at(q, k, l) * Y[l][c]
                        + Y[a][k] * block_at(s, k, l) * J[l][c]
                        + Y[a][k] * block_at(t, k, l) * Y[l][c];
                }
            }
            match v {
                0 => {}
                4 => out |= 1 << (2 * a + c),
                _ => return None,
            }
        }
    }
    Some(out)
}

/// `R_{2m}ᵀ B R_{2m}` computed blockwise; `None` if some block leaves 01.
pub fn block_transform(b: &BlockGrid) -> Option<BlockGrid> {
    let m = b.m;
    let mut out = vec![0; m * m];
    for i in 0..m {
        for j in 0..m {
            out[i * m + j] = window(
                b.block(i, j),
                b.block(i, j + 1),
                b.block(i + 1, j),
                b.block(i + 1, j + 1),
            )?;
        }
    }
    let g = BlockGrid { m, blocks: out };
    g.to_graph_checked().then_some(g)
}

/// The inverse transform `R_{2m} B' R_{2m}ᵀ`:
/// `4B_ij = J B'_ij J + J B'_i,j-1 Y + Y B'_i-1,j J + Y B'_i-1,j-1 Y`.
pub fn block_transform_inverse(b: &BlockGrid) -> Option<BlockGrid> {
    let m = b.m;
    let mut out = vec![0; m * m];
    for i in 0..m {
        for j in 0..m {
            let (im, jm) = (i + m - 1, j + m - 1);
            out[i * m + j] = window(
                b.block(i, j),
                b.block(i, jm),
                b.block(im, j),
                b.block(im, jm),
            )?;
        }
    }
    let g = BlockGrid { m, blocks: out };
    g.to_graph_checked().then_some(g)
}

/// Block representatives modulo `X ↦ J − X` among even-weight blocks.
const BLOCK_REPS: [Block2; 4] = [BLOCK_O, BLOCK_I, BLOCK_N, BLOCK_NT];

/// The representative of `{X, J − X}`.
pub fn block_rep(b: Block2) -> Block2 {
    if BLOCK_REPS.contains(&b) {
        b
    } else {
        block_complement(b)
    }
}

/// Normalized members of `𝓑_{R_2m}`: diagonal blocks `O` and every
/// off-diagonal block in `{O, I, N, Nᵀ}`. Sorted by key.
pub fn enumerate_b_normalized(m: usize) -> Result<Vec<BlockGrid>> {
    if m < 2 {
        return Err(Error::Domain(format!(
            "circulant family needs m >= 2, got {m}"
        )));
    }
    if m > 8 {
        return Err(Error::capacity("patched B enumeration pairs", m, 8));
    }
    // Validity of a window depends only on its four blocks.
    // Diagonal windows must also leave a zero diagonal.
    let mut ok = vec![[false; 2]; 1 << 16];
    for code in 0..1usize << 16 {
        let q = |k: usize| (code >> (4 * k) & 15) as Block2;
        if let Some(w) = window(q(0), q(1), q(2), q(3)) {
            ok[code] = [true, w & BLOCK_I == 0];
        }
    }
    // Unknowns are the upper blocks (i, j), i < j, taken column by column.
    let order: Vec<(usize, usize)> = (1..m).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let pos = |i: usize, j: usize| order.iter().position(|&x| x == (i.min(j), i.max(j)));
    // Window (i, j) for i <= j uses blocks (i,j), (i,j+1), (i+1,j), (i+1,j+1).
    // Windows (j, i) are transposes and need no separate check.
    let mut ready: Vec<Vec<(usize, usize)>> = vec![Vec::new(); order.len()];
    for i in 0..m {
        for j in i..m {
            let cells = [
                (i, j),
                (i, (j + 1) % m),
                ((i + 1) % m, j),
                ((i + 1) % m, (j + 1) % m),
            ];
            let last = cells
                .iter()
                .filter_map(|&(a, b)| if a == b { None } else { pos(a, b) })
                .max();
            match last {
                Some(k) => ready[k].push((i, j)),
                None => unreachable!("every window touches an off-diagonal block for m >= 2"),
            }
        }
    }
    let mut grid = vec![BLOCK_O; m * m];
    let mut out = Vec::new();
    search_blocks(m, &order, &ready, &ok, 0, &mut grid, &mut out);
    let mut grids: Vec<BlockGrid> = out
        .into_iter()
        .map(|blocks| BlockGrid { m, blocks })
        .collect();
    grids.sort_by_cached_key(|g| g.to_graph().upper_bits());
    Ok(grids)
}

fn search_blocks(
    m: usize,
    order: &[(usize, usize)],
    ready: &[Vec<(usize, usize)>],
    ok: &[[bool; 2]],
    k: usize,
    grid: &mut Vec<Block2>,
    out: &mut Vec<Vec<Block2>>,
) {
    if k == order.len() {
        out.push(grid.clone());
        return;
    }
    let (i, j) = order[k];
    for &b in &BLOCK_REPS {
        grid[i * m + j] = b;
        grid[j * m + i] = block_transpose(b);
        let pass = ready[k].iter().all(|&(wi, wj)| {
            let at = |a: usize, c: usize| grid[(a % m) * m + c % m] as usize;
            let code =
                at(wi, wj) | at(wi, wj + 1) << 4 | at(wi + 1, wj) << 8 | at(wi + 1, wj + 1) << 12;
            ok[code][(wi == wj) as usize]
        });
        if pass {
            search_blocks(m, order, ready, ok, k + 1, grid, out);
        }
    }
    grid[i * m + j] = BLOCK_O;
    grid[j * m + i] = BLOCK_O;
}

/// Every member of `𝓑_{R_2m}` obtained from one normalized grid by block
/// complements and full complementation, as keys.
pub fn expand_normalized(g: &BlockGrid) -> Vec<u128> {
    let m = g.m;
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::with_capacity(1 << (pairs.len() + 1));
    for mask in 0..1u64 << pairs.len() {
        let mut h = g.clone();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                let b = block_complement(h.blocks[i * m + j]);
                h.blocks[i * m + j] = b;
                h.blocks[j * m + i] = block_transpose(b);
            }
        }
        let graph = h.to_graph();
        out.push(graph.key());
        out.push(graph.complement().key());
    }
    out
}

/// Raw `𝓑_{R_2m}` by patching, sorted by key. Refuses when the raw set
/// would exceed `limit` matrices.
pub fn enumerate_b_patched(m: usize, limit: usize) -> Result<Vec<Graph>> {
    let normalized = enumerate_b_normalized(m)?;
    let per = 1usize << (m * (m - 1) / 2 + 1);
    let total = normalized.len().saturating_mul(per);
    if total > limit {
        return Err(Error::capacity("raw patched B set", total, limit));
    }
    let mut keys: Vec<u128> = normalized
        .par_iter()
        .flat_map_iter(expand_normalized)
        .collect();
    keys.sort_unstable();
    keys.dedup();
    Ok(keys
        .into_iter()
        .map(|k| Graph::from_key(2 * m, k))
        .collect())
}

/// How a `𝓑_R` listing was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Brute,
    Patched,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Patched => "patched",
        }
    }
}

/// `𝓥_R` and `𝓑_R` for one family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleCatalog {
    pub family: Family,
    pub method: Method,
    /// `(v, Rᵀv)` pairs.
    pub v_set: Vec<(Column, Column)>,
    pub b_set: Vec<Graph>,
}

impl AdmissibleCatalog {
    /// Brute force where the order allows it, patching otherwise.
    pub fn compute(family: Family, method: Option<Method>, limit: usize) -> Result<Self> {
        let r = build(family)?;
        let method = method.unwrap_or(if r.size() <= 8 {
            Method::Brute
        } else {
            Method::Patched
        });
        let b_set = match (method, family) {
            (Method::Brute, _) => enumerate_b_bruteforce(&r)?,
            (Method::Patched, Family::Circulant(m)) => enumerate_b_patched(m, limit)?,
            (Method::Patched, f) => {
                return Err(Error::Domain(format!(
                    "patching applies to the circulant family, not {f}"
                )))
            }
        };
        Ok(AdmissibleCatalog {
            family,
            method,
            v_set: enumerate_v(&r)?,
            b_set,
        })
    }

    /// Text form of `𝓑_R`: a header, then `order hex` per line.
    pub fn b_file(&self) -> String {
        write_b_file(self.family, self.method.as_str(), &self.b_set)
    }

    /// Text form of `𝓥_R`: a header, then `v image` as 01-strings.
    pub fn v_file(&self) -> String {
        let n = self.family.size();
        let mut s = String::new();
        writeln!(s, "# {FORMAT_VERSION}").unwrap();
        writeln!(s, "family: {}", self.family).unwrap();
        writeln!(s, "kind: V").unwrap();
        writeln!(s, "order: {n}").unwrap();
        writeln!(s, "count: {}", self.v_set.len()).unwrap();
        for &(v, w) in &self.v_set {
            writeln!(s, "{} {}", column_to_string(v, n), column_to_string(w, n)).unwrap();
        }
        s
    }
}

pub fn write_b_file(family: Family, method: &str, b_set: &[Graph]) -> String {
    let mut s = String::new();
    writeln!(s, "# {FORMAT_VERSION}").unwrap();
    writeln!(s, "family: {family}").unwrap();
    writeln!(s, "kind: B").unwrap();
    writeln!(s, "method: {method}").unwrap();
    writeln!(s, "order: {}", family.size()).unwrap();
    writeln!(s, "count: {}", b_set.len()).unwrap();
    for g in b_set {
        writeln!(s, "{} {}", g.order(), g.to_hex()).unwrap();
    }
    s
}

/// Parsed `𝓑_R` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFile {
    pub family: Family,
    pub method: String,
    pub b_set: Vec<Graph>,
}

pub fn read_b_file(text: &str) -> Result<BFile> {
    let mut family = None;
    let mut method = String::new();
    let mut count = None;
    let mut b_set = Vec::new();
    let mut saw_version = false;
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if rest.trim() == FORMAT_VERSION {
                saw_version = true;
            }
            continue;
        }
        if let Some((k, v)) = line.split_once(':') {
            let v = v.trim();
            match k.trim() {
                "family" => {
                    family = Some(
                        v.parse::<Family>()
                            .map_err(|e| Error::parse(ln, e.to_string()))?,
                    )
                }
                "method" => method = v.to_string(),
                "count" => {
                    count = Some(
                        v.parse::<usize>()
                            .map_err(|_| Error::parse(ln, "bad count"))?,
                    )
                }
                "kind" if v != "B" => {
                    return Err(Error::parse(ln, format!("expected kind B, got {v}")))
                }
                _ => {}
            }
            continue;
        }
        let (n, hex) = line
            .split_once(' ')
            .ok_or_else(|| Error::parse(ln, "expected `order hex`"))?;
        let n: usize = n
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad order {n:?}")))?;
        let g = Graph::from_hex(n, hex.trim()).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::parse(ln, msg),
            e => e,
        })?;
        b_set.push(g);
    }
    if !saw_version {
        return Err(Error::parse(
            1,
            format!("missing `# {FORMAT_VERSION}` header"),
        ));
    }
    let family = family.ok_or_else(|| Error::parse(1, "missing family"))?;
    if let Some(c) = count {
        if c != b_set.len() {
            return Err(Error::parse(
                1,
                format!("header count {c} but {} matrices", b_set.len()),
            ));
        }
    }
    Ok(BFile {
        family,
        method,
        b_set,
    })
}
