//! Reducibility of a switching set: can the switching by `R` be obtained as a
//! sequence of switchings by decomposable factors `R = Q₁⋯Q_s P` (up to a
//! column permutation `P`)?
//!
//! Conjugating by `Q = diag(R, I)` with an arbitrary host graph reduces to
//! two conditions on each prefix product `S_i = Q₁⋯Q_i`:
//!
//! * `S_iᵀ B S_i` is an adjacency matrix, and
//! * `S_iᵀ v` is a 01-vector for every `v ∈ 𝓥_R`,
//!
//! because every outside column of a valid host lies in `𝓥_R` and the
//! outside-outside block is never touched.
//!
//! The search is iterative deepening over factor sequences. Its state is the
//! prefix product `S`. Two products that differ by a right permutation `h`
//! that the candidate set is invariant under (`h Q h⁻¹` is again a candidate
//! up to such a permutation) have the same future, so states are memoized
//! modulo those permutations: all of them for the Fano and cube sets, the
//! pair-preserving ones for the circulant family.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::admissible::{enumerate_v, is_admissible, Column};
use crate::catalog::{build, compose_block_diagonal, Family, Piece};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{indecomposable_blocks, IntMatrix, ScaledOrthogonal};

pub const CERTIFICATE_VERSION: &str = "level2-certificate v1";
pub const DEFAULT_DEPTH: usize = 6;
/// Products of up to this many factors keep `2^depth · S` inside `i16`.
pub const MAX_DEPTH: usize = 12;

/// A decomposable factor: catalog matrices placed on disjoint ordered index
/// lists, identity elsewhere. Piece vertex `a` sits at index `placement[a]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub pieces: Vec<(Family, Vec<usize>)>,
}

impl Factor {
    pub fn matrix(&self, n: usize) -> Result<ScaledOrthogonal> {
        let mut used = vec![false; n];
        let mut pieces = Vec::new();
        for (f, idx) in &self.pieces {
            for &i in idx {
                if i < n {
                    used[i] = true;
                }
            }
            pieces.push((Piece::Matrix(build(*f)?), idx.clone()));
        }
        let rest: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
        if !rest.is_empty() {
            pieces.push((Piece::Identity(rest.len()), rest));
        }
        compose_block_diagonal(n, &pieces)
    }

    pub fn largest_block(&self) -> usize {
        self.pieces.iter().map(|(f, _)| f.size()).max().unwrap_or(1)
    }

    pub fn to_text(&self) -> String {
        self.pieces
            .iter()
            .map(|(f, idx)| {
                let idx: Vec<String> = idx.iter().map(usize::to_string).collect();
                format!("{f}@{}", idx.join(","))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn from_text(s: &str, ln: usize) -> Result<Self> {
        let mut pieces = Vec::new();
        for tok in s.split_whitespace() {
            let (f, idx) = tok
                .split_once('@')
                .ok_or_else(|| Error::parse(ln, format!("piece {tok:?} lacks '@'")))?;
            let f: Family = f.parse().map_err(|e: Error| Error::parse(ln, e.to_string()))?;
            let idx: Vec<usize> = idx
                .split(',')
                .map(|x| x.parse().map_err(|_| Error::parse(ln, format!("bad index {x:?}"))))
                .collect::<Result<_>>()?;
            pieces.push((f, idx));
        }
        if pieces.is_empty() {
            return Err(Error::parse(ln, "factor without pieces"));
        }
        Ok(Factor { pieces })
    }
}

/// The factors the search may use for one family.
#[derive(Clone, Debug)]
pub struct FactorCandidateSet {
    pub family: Family,
    pub factors: Vec<Factor>,
}

/// Column-permutation classes that the memo and candidate dedup work modulo.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColumnQuotient {
    All,
    Pairs,
}

fn quotient_for(family: Family) -> ColumnQuotient {
    match family {
        Family::Circulant(_) => ColumnQuotient::Pairs,
        _ => ColumnQuotient::All,
    }
}

/// Canonical key of an `n×n` matrix modulo right multiplication by the
/// quotient's permutations.
fn column_key(n: usize, e: &[i32], q: ColumnQuotient) -> Vec<i16> {
    let col = |j: usize| -> Vec<i16> { (0..n).map(|i| e[i * n + j] as i16).collect() };
    let mut cols: Vec<Vec<i16>> = match q {
        ColumnQuotient::All => (0..n).map(col).collect(),
        ColumnQuotient::Pairs => (0..n / 2)
            .map(|p| {
                let (mut a, mut b) = (col(2 * p), col(2 * p + 1));
                if b < a {
                    std::mem::swap(&mut a, &mut b);
                }
                a.extend(b);
                a
            })
            .collect(),
    };
    cols.sort_unstable();
    cols.concat()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Ordered pair tuples up to rotation, grouped into disjoint blocks: every
/// way to place `diag(R_{2k₁}, …)` with each `k ≥ 2`, each `k ≤ m − 1`.
fn circulant_arrangements(m: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(m: usize, from: usize, used: u32, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        // Next block starts at its smallest pair, which is > the previous
        // block's smallest pair; that fixes both the rotation and the block
        // order.
        for first in from..m {
            if used >> first & 1 == 1 {
                continue;
            }
            let free: Vec<usize> = (first + 1..m).filter(|&p| used >> p & 1 == 0).collect();
            for k in 2..m {
                if k - 1 > free.len() {
                    break;
                }
                for rest in subsets(free.len(), k - 1) {
                    let chosen: Vec<usize> = rest.iter().map(|&i| free[i]).collect();
                    for order in permutations(&chosen) {
                        let mut tuple = vec![first];
                        tuple.extend(order);
                        let mask = tuple.iter().fold(used, |acc, &p| acc | 1 << p);
                        cur.push(tuple);
                        rec(m, first + 1, mask, cur, out);
                        cur.pop();
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(m, 0, 0, &mut Vec::new(), &mut out);
    out
}

pub fn factor_candidates(family: Family) -> Result<FactorCandidateSet> {
    let n = family.validate()?.size();
    let mut factors = Vec::new();
    match family {
        Family::Gm4 | Family::Circulant(2) => {}
        Family::Circulant(m) => {
            for arr in circulant_arrangements(m) {
                let pieces = arr
                    .into_iter()
                    .map(|tuple| {
                        let idx: Vec<usize> = tuple.iter().flat_map(|&p| [2 * p, 2 * p + 1]).collect();
                        (Family::Circulant(tuple.len()), idx)
                    })
                    .collect();
                factors.push(Factor { pieces });
            }
        }
        Family::Fano | Family::Cube => {
            let mut placed: Vec<Factor> = Vec::new();
            for s in subsets(n, 4) {
                placed.push(Factor {
                    pieces: vec![(Family::Gm4, s)],
                });
            }
            if family == Family::Cube {
                for s in subsets(n, 4).into_iter().filter(|s| s.contains(&0)) {
                    let t: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
                    placed.push(Factor {
                        pieces: vec![(Family::Gm4, s), (Family::Gm4, t)],
                    });
                }
            }
            for s in subsets(n, 6) {
                for p in permutations(&s) {
                    placed.push(Factor {
                        pieces: vec![(Family::Circulant(3), p)],
                    });
                }
            }
            if family == Family::Cube {
                for s in subsets(n, 7) {
                    for p in permutations(&s) {
                        placed.push(Factor {
                            pieces: vec![(Family::Fano, p)],
                        });
                    }
                }
            }
            factors = placed;
        }
    }
    // Keep one factor per class of matrices modulo the column quotient.
    let q = quotient_for(family);
    let mut seen = BTreeSet::new();
    let mut kept = Vec::new();
    for f in factors {
        let m = f.matrix(n)?;
        if seen.insert(column_key(n, m.entries(), q)) {
            kept.push(f);
        }
    }
    Ok(FactorCandidateSet {
        family,
        factors: kept,
    })
}

/// Machine-checkable proof of reducibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationCertificate {
    pub family: Family,
    pub b: Graph,
    pub factors: Vec<Factor>,
    /// `Q₁⋯Q_s = R P` with `P e_i = e_{column_permutation[i]}`.
    pub column_permutation: Vec<usize>,
    /// `(Q₁⋯Q_i)ᵀ B (Q₁⋯Q_i)` for `i = 1..s`.
    pub intermediate_bs: Vec<Graph>,
}

struct Prepared {
    m: Vec<i32>,
    /// `Qᵀw` for every 01-mask `w`, or `u16::MAX` when it leaves 01.
    vmap: Vec<u16>,
}

/// Precomputed search tables for one family.
pub struct Reducer {
    family: Family,
    n: usize,
    r: ScaledOrthogonal,
    quotient: ColumnQuotient,
    v_masks: Vec<u16>,
    candidates: FactorCandidateSet,
    prepared: Vec<Prepared>,
    /// Full column-sort key of each candidate, for the final step.
    finishers: HashMap<Vec<i16>, usize>,
}

impl Reducer {
    pub fn new(family: Family) -> Result<Self> {
        let r = build(family)?;
        let n = r.size();
        if n > 16 {
            return Err(Error::capacity("reducibility order", n, 16));
        }
        let candidates = factor_candidates(family)?;
        let prepared: Vec<Prepared> = candidates
            .factors
            .par_iter()
            .map(|f| {
                let q = f.matrix(n).expect("valid placement");
                let vmap = (0..1u32 << n)
                    .map(|w| crate::admissible::transform_column(&q, w).map_or(u16::MAX, |x| x as u16))
                    .collect();
                Prepared {
                    m: q.entries().to_vec(),
                    vmap,
                }
            })
            .collect();
        let mut finishers = HashMap::new();
        for (i, p) in prepared.iter().enumerate() {
            finishers.entry(column_key(n, &p.m, ColumnQuotient::All)).or_insert(i);
        }
        let v_masks = enumerate_v(&r)?.into_iter().map(|(v, _)| v as u16).collect();
        Ok(Reducer {
            family,
            n,
            r,
            quotient: quotient_for(family),
            v_masks,
            candidates,
            prepared,
            finishers,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn candidates(&self) -> &FactorCandidateSet {
        &self.candidates
    }

    /// A certificate with at most `depth_bound` factors, if one exists.
    pub fn search(&self, b: &Graph, depth_bound: usize) -> Result<Option<FactorizationCertificate>> {
        if depth_bound == 0 {
            return Err(Error::Domain("depth bound must be at least 1".into()));
        }
        if depth_bound > MAX_DEPTH {
            return Err(Error::capacity("depth bound", depth_bound, MAX_DEPTH));
        }
        if !is_admissible(&self.r, b) {
            return Err(Error::Admissibility("matrix is not in B_R".into()));
        }
        let n = self.n;
        let scale = 1i32 << depth_bound;
        let mut s = vec![0i32; n * n];
        for i in 0..n {
            s[i * n + i] = scale;
        }
        let rows: Vec<u16> = (0..n)
            .map(|a| b.neighbours(a).fold(0u16, |acc, c| acc | 1 << c))
            .collect();
        let mut ctx = Search {
            red: self,
            scale,
            memo: HashMap::new(),
            path: Vec::new(),
        };
        for depth in 1..=depth_bound {
            if ctx.dfs(&s, &rows, &self.v_masks, depth) {
                let path = std::mem::take(&mut ctx.path);
                return Ok(Some(self.certificate(b, path)?));
            }
        }
        Ok(None)
    }

    fn certificate(&self, b: &Graph, path: Vec<usize>) -> Result<FactorizationCertificate> {
        let n = self.n;
        let factors: Vec<Factor> = path.iter().map(|&i| self.candidates.factors[i].clone()).collect();
        let mut s = IntMatrix::identity(n);
        let mut scale = BigInt::from(1);
        let a = b.adjacency_matrix();
        let mut intermediate_bs = Vec::new();
        for f in &factors {
            s = s.mul(&f.matrix(n)?.to_int_matrix())?;
            scale *= 2;
            let conj = s.transpose().mul(&a)?.mul(&s)?.div_exact(&(&scale * &scale))?;
            intermediate_bs.push(adjacency_to_graph(&conj)?);
        }
        // P = Rᵀ S up to the scale.
        let p = self
            .r
            .to_int_matrix()
            .transpose()
            .mul(&s)?
            .div_exact(&(&scale * 2))?;
        let perm = matrix_to_permutation(&p)
            .ok_or_else(|| Error::Condition("search returned a product that is not R up to columns".into()))?;
        Ok(FactorizationCertificate {
            family: self.family,
            b: b.clone(),
            factors,
            column_permutation: perm,
            intermediate_bs,
        })
    }
}

struct Search<'a> {
    red: &'a Reducer,
    scale: i32,
    memo: HashMap<Vec<i16>, u8>,
    path: Vec<usize>,
}

impl Search<'_> {
    /// Tries to finish within `rem` more factors from product `s`
    /// (scaled by `self.scale`), conjugated graph `rows` and column images
    /// `w`. On success `self.path` holds the factor indices.
    fn dfs(&mut self, s: &[i32], rows: &[u16], w: &[u16], rem: usize) -> bool {
        let red = self.red;
        let n = red.n;
        if rem == 1 {
            return self.finish(s);
        }
        let key = column_key(n, s, red.quotient);
        if self.memo.get(&key).is_some_and(|&d| d as usize >= rem) {
            return false;
        }
        let mut next_w = vec![0u16; w.len()];
        for (ci, p) in red.prepared.iter().enumerate() {
            let mut ok = true;
            for (dst, &x) in next_w.iter_mut().zip(w) {
                let y = p.vmap[x as usize];
                if y == u16::MAX {
                    ok = false;
                    break;
                }
                *dst = y;
            }
            if !ok {
                continue;
            }
            let Some(next_rows) = conjugate_rows(n, &p.m, rows) else {
                continue;
            };
            let next_s = times_half(n, s, &p.m);
            self.path.push(ci);
            if self.dfs(&next_s, &next_rows, &next_w, rem - 1) {
                return true;
            }
            self.path.pop();
        }
        let entry = self.memo.entry(key).or_insert(0);
        *entry = (*entry).max(rem as u8);
        false
    }

    /// The last factor must be `Sᵀ R` up to a column permutation.
    fn finish(&mut self, s: &[i32]) -> bool {
        let red = self.red;
        let n = red.n;
        // 2Q = (scale·S)ᵀ (2R) / scale
        let mut q = vec![0i32; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for k in 0..n {
                    acc += s[k * n + i] * red.r.at(k, j);
                }
                if acc % self.scale != 0 {
                    return false;
                }
                q[i * n + j] = acc / self.scale;
            }
        }
        match red.finishers.get(&column_key(n, &q, ColumnQuotient::All)) {
            Some(&ci) => {
                self.path.push(ci);
                true
            }
            None => false,
        }
    }
}

/// `s · m / 2` for `m = 2Q`.
fn times_half(n: usize, s: &[i32], m: &[i32]) -> Vec<i32> {
    let mut out = vec![0i32; n * n];
    for i in 0..n {
        for k in 0..n {
            let a = s[i * n + k];
            if a == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += a * m[k * n + j];
            }
        }
    }
    for x in &mut out {
        debug_assert!(*x % 2 == 0);
        *x /= 2;
    }
    out
}

/// `QᵀBQ` on bitmask rows, if it is an adjacency matrix.
fn conjugate_rows(n: usize, m: &[i32], rows: &[u16]) -> Option<Vec<u16>> {
    let mut t = [0i32; 256];
    for a in 0..n {
        let mut r = rows[a];
        while r != 0 {
            let c = r.trailing_zeros() as usize;
            r &= r - 1;
            for j in 0..n {
                t[a * n + j] += m[c * n + j];
            }
        }
    }
    let mut out = vec![0u16; n];
    for i in 0..n {
        for j in i..n {
            let mut v = 0;
            for a in 0..n {
                v += m[a * n + i] * t[a * n + j];
            }
            match v {
                0 => {}
                4 if i != j => {
                    out[i] |= 1 << j;
                    out[j] |= 1 << i;
                }
                _ => return None,
            }
        }
    }
    Some(out)
}

fn adjacency_to_graph(a: &IntMatrix) -> Result<Graph> {
    if !a.is_adjacency() {
        return Err(Error::Condition("intermediate matrix is not an adjacency matrix".into()));
    }
    let n = a.rows();
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if a.get(i, j) == &BigInt::from(1) {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

fn matrix_to_permutation(p: &IntMatrix) -> Option<Vec<usize>> {
    let n = p.rows();
    // P e_i = e_{perm[i]}: column i has its one in row perm[i].
    let one = BigInt::from(1);
    let zero = BigInt::from(0);
    let mut perm = Vec::with_capacity(n);
    for j in 0..n {
        let mut hit = None;
        for i in 0..n {
            let x = p.get(i, j);
            if x == &one && hit.is_none() {
                hit = Some(i);
            } else if x != &zero {
                return None;
            }
        }
        perm.push(hit?);
    }
    let set: BTreeSet<usize> = perm.iter().copied().collect();
    (set.len() == n).then_some(perm)
}

/// Convenience wrapper building the tables for one query.
pub fn is_reducible(b: &Graph, family: Family, depth_bound: usize) -> Result<Option<FactorizationCertificate>> {
    Reducer::new(family)?.search(b, depth_bound)
}

/// Re-checks a certificate from scratch with big-integer arithmetic.
pub fn verify_certificate(cert: &FactorizationCertificate) -> Result<()> {
    let family = cert.family;
    let r = build(family)?;
    let n = r.size();
    if cert.b.order() != n {
        return Err(Error::Dimension(format!("B has order {}, R has {n}", cert.b.order())));
    }
    if !is_admissible(&r, &cert.b) {
        return Err(Error::Admissibility("certificate B is not in B_R".into()));
    }
    if cert.factors.is_empty() || cert.intermediate_bs.len() != cert.factors.len() {
        return Err(Error::Condition("need one intermediate matrix per factor".into()));
    }
    let a = cert.b.adjacency_matrix();
    let vs = enumerate_v(&r)?;
    let mut s = IntMatrix::identity(n);
    let mut scale = BigInt::from(1);
    for (k, (f, want)) in cert.factors.iter().zip(&cert.intermediate_bs).enumerate() {
        let q = f.matrix(n)?.to_int_matrix();
        // Decomposable, level-2, regular orthogonal factor.
        let blocks = indecomposable_blocks(&q);
        if blocks.iter().map(|b| b.size()).max().unwrap_or(0) >= n {
            return Err(Error::Condition(format!("factor {} is indecomposable", k + 1)));
        }
        let qqt = q.mul(&q.transpose())?;
        if qqt != IntMatrix::identity(n).scale(&BigInt::from(4)) {
            return Err(Error::Condition(format!("factor {} is not orthogonal", k + 1)));
        }
        if (0..n).any(|i| (0..n).map(|j| q.get(i, j).clone()).sum::<BigInt>() != BigInt::from(2)) {
            return Err(Error::Condition(format!("factor {} is not regular", k + 1)));
        }
        s = s.mul(&q)?;
        scale *= 2;
        let conj = s.transpose().mul(&a)?.mul(&s)?.div_exact(&(&scale * &scale))
            .map_err(|_| Error::Condition(format!("prefix {} conjugate of B is not integral", k + 1)))?;
        let g = adjacency_to_graph(&conj)
            .map_err(|_| Error::Condition(format!("prefix {} conjugate of B is not an adjacency matrix", k + 1)))?;
        if &g != want {
            return Err(Error::Condition(format!("intermediate matrix {} does not match", k + 1)));
        }
        let st = s.transpose();
        for &(v, _) in &vs {
            let col: Vec<BigInt> = (0..n).map(|i| BigInt::from((v >> i & 1) as i64)).collect();
            let vm = IntMatrix::new(n, 1, col)?;
            let img = st.mul(&vm)?;
            let ok = img.div_exact(&scale).map(|x| x.is_01()).unwrap_or(false);
            if !ok {
                return Err(Error::Condition(format!(
                    "prefix {} maps V column {} outside 01",
                    k + 1,
                    crate::admissible::column_to_string(v as Column, n)
                )));
            }
        }
    }
    // Product = R P exactly.
    let p = &cert.column_permutation;
    let mut pm = IntMatrix::zeros(n, n);
    if p.len() != n || p.iter().collect::<BTreeSet<_>>().len() != n || p.iter().any(|&x| x >= n) {
        return Err(Error::Condition("column permutation is not a permutation".into()));
    }
    for (i, &pi) in p.iter().enumerate() {
        pm.set(pi, i, BigInt::from(1));
    }
    let rp = r.to_int_matrix().mul(&pm)?.scale(&(&scale / 2));
    if rp != s {
        return Err(Error::Condition("factor product is not R times the column permutation".into()));
    }
    Ok(())
}

impl FactorizationCertificate {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# {CERTIFICATE_VERSION}").unwrap();
        writeln!(s, "family: {}", self.family).unwrap();
        writeln!(s, "b: {} {}", self.b.order(), self.b.to_hex()).unwrap();
        writeln!(s, "factors: {}", self.factors.len()).unwrap();
        for f in &self.factors {
            writeln!(s, "factor: {}", f.to_text()).unwrap();
        }
        let perm: Vec<String> = self.column_permutation.iter().map(usize::to_string).collect();
        writeln!(s, "column_permutation: {}", perm.join(" ")).unwrap();
        for g in &self.intermediate_bs {
            writeln!(s, "intermediate: {} {}", g.order(), g.to_hex()).unwrap();
        }
        s
    }

    /// Parses every certificate in `text`; certificates are separated by
    /// their version header.
    pub fn parse_all(text: &str) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        let mut cur: Option<(usize, Vec<(usize, String)>)> = None;
        for (idx, line) in text.lines().enumerate() {
            let ln = idx + 1;
            let line = line.trim();
            if line == format!("# {CERTIFICATE_VERSION}") {
                if let Some((start, body)) = cur.take() {
                    out.push(Self::parse_body(start, &body)?);
                }
                cur = Some((ln, Vec::new()));
            } else if !line.is_empty() && !line.starts_with('#') {
                match cur.as_mut() {
                    Some((_, body)) => body.push((ln, line.to_string())),
                    None => return Err(Error::parse(ln, format!("missing `# {CERTIFICATE_VERSION}` header"))),
                }
            }
        }
        if let Some((start, body)) = cur {
            out.push(Self::parse_body(start, &body)?);
        }
        Ok(out)
    }

    fn parse_body(start: usize, body: &[(usize, String)]) -> Result<Self> {
        let mut family = None;
        let mut b = None;
        let mut factors = Vec::new();
        let mut declared = None;
        let mut perm = None;
        let mut inter = Vec::new();
        let graph = |v: &str, ln: usize| -> Result<Graph> {
            let (n, hex) = v.split_once(' ').ok_or_else(|| Error::parse(ln, "expected `order hex`"))?;
            let n: usize = n.parse().map_err(|_| Error::parse(ln, "bad order"))?;
            Graph::from_hex(n, hex.trim()).map_err(|e| Error::parse(ln, e.to_string()))
        };
        for (ln, line) in body {
            let ln = *ln;
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(ln, format!("expected `key: value`, got {line:?}")))?;
            let v = v.trim();
            match k.trim() {
                "family" => family = Some(v.parse::<Family>().map_err(|e| Error::parse(ln, e.to_string()))?),
                "b" => b = Some(graph(v, ln)?),
                "factors" => declared = Some(v.parse::<usize>().map_err(|_| Error::parse(ln, "bad factor count"))?),
                "factor" => factors.push(Factor::from_text(v, ln)?),
                "column_permutation" => {
                    perm = Some(
                        v.split_whitespace()
                            .map(|x| x.parse().map_err(|_| Error::parse(ln, format!("bad index {x:?}"))))
                            .collect::<Result<Vec<usize>>>()?,
                    )
                }
                "intermediate" => inter.push(graph(v, ln)?),
                other => return Err(Error::parse(ln, format!("unknown key {other:?}"))),
            }
        }
        if declared.is_some_and(|d| d != factors.len()) {
            return Err(Error::parse(start, "factor count does not match the header"));
        }
        Ok(FactorizationCertificate {
            family: family.ok_or_else(|| Error::parse(start, "missing family"))?,
            b: b.ok_or_else(|| Error::parse(start, "missing b"))?,
            factors,
            column_permutation: perm.ok_or_else(|| Error::parse(start, "missing column_permutation"))?,
            intermediate_bs: inter,
        })
    }
}

/// Reducibility test for the six-vertex method: some union of two pairs
/// induces a regular graph and each of the two remaining vertices has an
/// even number of neighbours in it.
pub fn lemma_ah6_criterion(b: &Graph) -> Result<bool> {
    let r = build(Family::Circulant(3))?;
    if b.order() != 6 || !is_admissible(&r, b) {
        return Err(Error::Admissibility("matrix is not in B_R6".into()));
    }
    for skip in 0..3 {
        let inside: Vec<usize> = (0..6).filter(|v| v / 2 != skip).collect();
        let degs: BTreeSet<usize> = inside
            .iter()
            .map(|&v| inside.iter().filter(|&&u| b.has_edge(u, v)).count())
            .collect();
        let regular = degs.len() == 1;
        let even = [2 * skip, 2 * skip + 1]
            .iter()
            .all(|&v| inside.iter().filter(|&&u| b.has_edge(u, v)).count() % 2 == 0);
        if regular && even {
            return Ok(true);
        }
    }
    Ok(false)
}
