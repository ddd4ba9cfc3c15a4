//! Symmetries of a catalog matrix and the classes of `𝓑_R` under them.
//!
//! A symmetry is a pair of permutations `(σ, σ')` with
//! `R[σ(a)][σ'(b)] = R[a][b]`, i.e. `PᵀRP' = R` for `P e_a = e_σ(a)`.
//! Conjugating by `P` sends `B` to the graph with `B'[a][b] = B[σ(a)][σ(b)]`
//! and keeps `𝓑_R` invariant, since `Rᵀ(PᵀBP)R = P'ᵀ(RᵀBR)P'`.
//!
//! Classes are orbits under conjugation and full complementation, plus, for
//! the circulant family, complementation of any off-diagonal block pair. The
//! canonical member is the least upper-triangle bitstring in the orbit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::admissible::{block_complement, is_admissible, BlockGrid, FORMAT_VERSION};
use crate::catalog::{build, Family};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::ScaledOrthogonal;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymmetryPair {
    pub p: Vec<usize>,
    pub p_prime: Vec<usize>,
}

impl SymmetryPair {
    pub fn holds_for(&self, r: &ScaledOrthogonal) -> bool {
        let n = r.size();
        (0..n).all(|a| (0..n).all(|b| r.at(self.p[a], self.p_prime[b]) == r.at(a, b)))
    }
}

/// Every symmetry pair of `r`, sorted, by backtracking over `σ` with the
/// candidate columns for every `σ'(b)` narrowed as rows are fixed.
pub fn symmetry_pairs(r: &ScaledOrthogonal) -> Result<Vec<SymmetryPair>> {
    let n = r.size();
    if n > 12 {
        return Err(Error::capacity("symmetry search order", n, 12));
    }
    let full: u32 = (1 << n) - 1;
    let mut out = Vec::new();
    let mut sigma = vec![usize::MAX; n];
    let cand = vec![full; n];
    backtrack_sym(r, 0, &mut sigma, 0, &cand, &mut out);
    out.sort();
    Ok(out)
}

fn backtrack_sym(
    r: &ScaledOrthogonal,
    a: usize,
    sigma: &mut [usize],
    used: u32,
    cand: &[u32],
    out: &mut Vec<SymmetryPair>,
) {
    let n = r.size();
    if a == n {
        // Every column now has exactly one candidate and they are distinct.
        let p_prime: Vec<usize> = cand.iter().map(|c| c.trailing_zeros() as usize).collect();
        out.push(SymmetryPair {
            p: sigma.to_vec(),
            p_prime,
        });
        return;
    }
    for s in 0..n {
        if used >> s & 1 == 1 {
            continue;
        }
        let mut next = cand.to_vec();
        let mut alive = true;
        for b in 0..n {
            let want = r.at(a, b);
            let mut c = next[b];
            let mut keep = 0u32;
            while c != 0 {
                let col = c.trailing_zeros() as usize;
                c &= c - 1;
                if r.at(s, col) == want {
                    keep |= 1 << col;
                }
            }
            if keep == 0 {
                alive = false;
                break;
            }
            next[b] = keep;
        }
        if !alive || !has_matching(&next) {
            continue;
        }
        sigma[a] = s;
        backtrack_sym(r, a + 1, sigma, used | 1 << s, &next, out);
    }
    sigma[a] = usize::MAX;
}

/// Hall-style check that the candidate sets admit a system of distinct
/// representatives.
fn has_matching(cand: &[u32]) -> bool {
    let n = cand.len();
    let mut match_col = vec![usize::MAX; 32];
    fn augment(b: usize, cand: &[u32], seen: &mut u32, match_col: &mut [usize]) -> bool {
        let mut c = cand[b];
        while c != 0 {
            let col = c.trailing_zeros() as usize;
            c &= c - 1;
            if *seen >> col & 1 == 1 {
                continue;
            }
            *seen |= 1 << col;
            if match_col[col] == usize::MAX || augment(match_col[col], cand, seen, match_col) {
                match_col[col] = b;
                return true;
            }
        }
        false
    }
    (0..n).all(|b| {
        let mut seen = 0;
        augment(b, cand, &mut seen, &mut match_col)
    })
}

pub fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    // (p ∘ q)(i) = p(q(i))
    q.iter().map(|&i| p[i]).collect()
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Closure of a generating set under composition.
pub fn generate_group(n: usize, gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = compose(g, &x);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// Which conjugations define the classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupChoice {
    /// Every symmetry found by search.
    Maximal,
    /// For the circulant family only the block shift and the swap of the
    /// first pair; for Fano and the cube the same as `Maximal`.
    Generators,
}

/// The conjugating permutations `σ` for one family.
#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    pub family: Family,
    pub perms: Vec<Vec<usize>>,
    /// For circulant families whose symmetries all permute the pairs: each
    /// `σ` as a pair permutation and per-pair flip,
    /// `σ(2i + a) = 2π(i) + (a ⊕ f_i)`.
    pair_action: Option<Vec<(Vec<usize>, Vec<bool>)>>,
}

/// The two generators named for the circulant family: the block shift
/// `C_i ↦ C_{i+1}` and the swap inside `C_1`.
pub fn circulant_generators(m: usize) -> Vec<Vec<usize>> {
    let n = 2 * m;
    let shift: Vec<usize> = (0..n).map(|i| (i + 2) % n).collect();
    let mut swap: Vec<usize> = (0..n).collect();
    swap.swap(0, 1);
    vec![shift, swap]
}

impl SymmetryGroup {
    pub fn new(family: Family, choice: GroupChoice) -> Result<Self> {
        let r = build(family)?;
        let n = r.size();
        let perms = match (choice, family) {
            (GroupChoice::Generators, Family::Circulant(m)) => {
                let gens = circulant_generators(m);
                let group = generate_group(n, &gens);
                let pairs: BTreeSet<Vec<usize>> =
                    symmetry_pairs(&r)?.into_iter().map(|s| s.p).collect();
                assert!(
                    group.iter().all(|g| pairs.contains(g)),
                    "generators must be symmetries"
                );
                group
            }
            _ => {
                let mut v: Vec<Vec<usize>> = symmetry_pairs(&r)?.into_iter().map(|s| s.p).collect();
                v.dedup();
                v
            }
        };
        // For m = 2 the matrix is GM4 in disguise and its symmetries mix the
        // pairs; those orbits are expanded explicitly instead.
        let pair_action = match family {
            Family::Circulant(m) => perms
                .iter()
                .map(|s| {
                    let pi: Vec<usize> = (0..m).map(|i| s[2 * i] / 2).collect();
                    let flip: Vec<bool> = (0..m).map(|i| s[2 * i] % 2 == 1).collect();
                    (0..m)
                        .all(|i| s[2 * i + 1] == 2 * pi[i] + !flip[i] as usize)
                        .then_some((pi, flip))
                })
                .collect(),
            _ => None,
        };
        Ok(SymmetryGroup {
            family,
            perms,
            pair_action,
        })
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    /// Least upper-triangle key in the orbit of `b`.
    pub fn canonical_key(&self, b: &Graph) -> u128 {
        match (self.family, &self.pair_action) {
            (Family::Circulant(m), Some(action)) => {
                canonical_circulant(action, m, &BlockGrid::from_graph(b).expect("even order"))
            }
            (Family::Circulant(m), None) => self.orbit_min_explicit(m, b),
            _ => self
                .perms
                .iter()
                .map(|s| {
                    let h = b.relabel(s);
                    h.key().min(h.complement().key())
                })
                .min()
                .expect("group contains the identity"),
        }
    }

    pub fn canonical(&self, b: &Graph) -> Graph {
        Graph::from_key(b.order(), self.canonical_key(b))
    }

    fn orbit_min_explicit(&self, m: usize, b: &Graph) -> u128 {
        let mut orbit: BTreeSet<u128> = BTreeSet::from([b.key()]);
        let mut stack = vec![b.clone()];
        while let Some(x) = stack.pop() {
            let mut next: Vec<Graph> = self.perms.iter().map(|s| x.relabel(s)).collect();
            next.push(x.complement());
            for i in 0..m {
                for j in i + 1..m {
                    let mut y = x.clone();
                    for a in 0..2 {
                        for c in 0..2 {
                            y.toggle_edge(2 * i + a, 2 * j + c);
                        }
                    }
                    next.push(y);
                }
            }
            for y in next {
                if orbit.insert(y.key()) {
                    stack.push(y);
                }
            }
        }
        orbit.into_iter().next().expect("orbit contains b")
    }
}

/// For every `σ`, normalize the relabelled grid by making the diagonal
/// blocks `O` and giving every upper block a zero top-left entry. That
/// lexicographically minimizes over the block and full complements
/// because each upper block owns a disjoint set of key bits and its first
/// bit decides between `X` and `J − X`. The conjugations permute the
/// pairs, so they normalize the complement group and the orbit minimum
/// is the minimum of these.
fn canonical_circulant(action: &[(Vec<usize>, Vec<bool>)], m: usize, g: &BlockGrid) -> u128 {
    let n = 2 * m;
    let len = n * (n - 1) / 2;
    let bitpos = |u: usize, v: usize| -> usize {
        // row-major position of (u, v), u < v
        let before = u * (2 * n - u - 1) / 2;
        len - 1 - (before + v - u - 1)
    };
    let mut best = u128::MAX;
    for (pi, flip) in action {
        let mut key = 0u128;
        for i in 0..m {
            for j in i + 1..m {
                let mut b = orient(g.block(pi[i], pi[j]), flip[i], flip[j]);
                if b & 1 == 1 {
                    b = block_complement(b);
                }
                for a in 0..2 {
                    for c in 0..2 {
                        if b >> (2 * a + c) & 1 == 1 {
                            key |= 1 << bitpos(2 * i + a, 2 * j + c);
                        }
                    }
                }
            }
        }
        best = best.min(key);
    }
    best
}

/// Block with rows swapped if `fr` and columns swapped if `fc`.
fn orient(b: u8, fr: bool, fc: bool) -> u8 {
    let at = |a: usize, c: usize| b >> (2 * a + c) & 1;
    let mut out = 0;
    for a in 0..2 {
        for c in 0..2 {
            out |= at(a ^ fr as usize, c ^ fc as usize) << (2 * a + c);
        }
    }
    out
}

/// Canonical member of the class of `b` under the maximal group.
pub fn orbit_canonical(b: &Graph, family: Family) -> Result<Graph> {
    let r = build(family)?;
    if !is_admissible(&r, b) {
        return Err(Error::Admissibility("matrix is not in B_R".into()));
    }
    Ok(SymmetryGroup::new(family, GroupChoice::Maximal)?.canonical(b))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub canonical: Graph,
    pub members: u64,
    pub irreducible: Option<bool>,
}

/// Partition of `b_set` into orbits, ordered by canonical key.
pub fn classes(b_set: &[Graph], group: &SymmetryGroup) -> Vec<EquivalenceClass> {
    classes_weighted(b_set, group, 1)
}

/// As [`classes`], counting every listed matrix as `weight` raw members.
/// Used for normalized circulant listings, where one grid stands for
/// `2^(m(m−1)/2 + 1)` matrices.
pub fn classes_weighted(
    b_set: &[Graph],
    group: &SymmetryGroup,
    weight: u64,
) -> Vec<EquivalenceClass> {
    let keys: Vec<u128> = b_set.par_iter().map(|b| group.canonical_key(b)).collect();
    let mut counts: BTreeMap<u128, u64> = BTreeMap::new();
    for k in keys {
        *counts.entry(k).or_default() += weight;
    }
    let n = group.family.size();
    counts
        .into_iter()
        .map(|(k, members)| EquivalenceClass {
            canonical: Graph::from_key(n, k),
            members,
            irreducible: None,
        })
        .collect()
}

/// Delimiter-separated class table: `hex<TAB>size<TAB>irreducible`.
pub fn class_table(family: Family, group: GroupChoice, classes: &[EquivalenceClass]) -> String {
    let mut s = String::new();
    writeln!(s, "# {FORMAT_VERSION}").unwrap();
    writeln!(s, "family: {family}").unwrap();
    writeln!(s, "kind: classes").unwrap();
    writeln!(
        s,
        "group: {}",
        match group {
            GroupChoice::Maximal => "maximal",
            GroupChoice::Generators => "generators",
        }
    )
    .unwrap();
    writeln!(s, "count: {}", classes.len()).unwrap();
    writeln!(s, "canonical\tsize\tirreducible").unwrap();
    for c in classes {
        let flag = match c.irreducible {
            Some(true) => "yes",
            Some(false) => "no",
            None => "-",
        };
        writeln!(s, "{}\t{}\t{}", c.canonical.to_hex(), c.members, flag).unwrap();
    }
    s
}

pub fn read_class_table(text: &str) -> Result<(Family, Vec<EquivalenceClass>)> {
    let mut family = None;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("canonical\t") {
            continue;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.trim() == "family" {
                family = Some(
                    v.trim()
                        .parse::<Family>()
                        .map_err(|e| Error::parse(ln, e.to_string()))?,
                );
            }
            continue;
        }
        let fam: Family = family.ok_or_else(|| Error::parse(ln, "row before family header"))?;
        let cols: Vec<&str> = line.split('\t').collect();
        let [hex, size, flag] = cols.as_slice() else {
            return Err(Error::parse(ln, "expected three tab-separated columns"));
        };
        let canonical =
            Graph::from_hex(fam.size(), hex).map_err(|e| Error::parse(ln, e.to_string()))?;
        let members = size
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad size {size:?}")))?;
        let irreducible = match *flag {
            "yes" => Some(true),
            "no" => Some(false),
            "-" => None,
            f => return Err(Error::parse(ln, format!("bad flag {f:?}"))),
        };
        out.push(EquivalenceClass {
            canonical,
            members,
            irreducible,
        });
    }
    Ok((
        family.ok_or_else(|| Error::parse(1, "missing family"))?,
        out,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::enumerate_b_bruteforce;

    #[test]
    fn circulant_symmetries_contain_generators() {
        for m in 2..=5 {
            let r = build(Family::Circulant(m)).unwrap();
            let pairs = symmetry_pairs(&r).unwrap();
            assert!(pairs.iter().all(|s| s.holds_for(&r)));
            let ps: BTreeSet<Vec<usize>> = pairs.iter().map(|s| s.p.clone()).collect();
            for g in circulant_generators(m) {
                assert!(ps.contains(&g), "m = {m}");
            }
            assert!(ps.contains(&(0..2 * m).collect::<Vec<_>>()));
        }
    }

    #[test]
    fn fano_shift_is_a_symmetry() {
        let r = build(Family::Fano).unwrap();
        let shift: Vec<usize> = (0..7).map(|i| (i + 1) % 7).collect();
        let pairs = symmetry_pairs(&r).unwrap();
        assert!(pairs.iter().any(|s| s.p == shift && s.p_prime == shift));
    }

    #[test]
    fn group_closure() {
        for f in [
            Family::Gm4,
            Family::Fano,
            Family::Cube,
            Family::Circulant(3),
        ] {
            let g = SymmetryGroup::new(f, GroupChoice::Maximal).unwrap();
            let set: BTreeSet<&Vec<usize>> = g.perms.iter().collect();
            for a in &g.perms {
                assert!(set.contains(&inverse(a)));
                for b in g.perms.iter().take(20) {
                    assert!(set.contains(&compose(a, b)), "{f}");
                }
            }
        }
    }

    #[test]
    fn canonical_is_orbit_invariant_small() {
        let f = Family::Circulant(3);
        let bs = enumerate_b_bruteforce(&build(f).unwrap()).unwrap();
        let g = SymmetryGroup::new(f, GroupChoice::Maximal).unwrap();
        // Oracle: explicit orbit expansion by closing under every operation.
        for b in &bs {
            let mut orbit: BTreeSet<u128> = BTreeSet::from([b.key()]);
            let mut stack = vec![b.clone()];
            while let Some(x) = stack.pop() {
                let mut next: Vec<Graph> = g.perms.iter().map(|s| x.relabel(s)).collect();
                next.push(x.complement());
                for i in 0..3 {
                    for j in i + 1..3 {
                        let mut y = x.clone();
                        for a in 0..2 {
                            for c in 0..2 {
                                y.toggle_edge(2 * i + a, 2 * j + c);
                            }
                        }
                        next.push(y);
                    }
                }
                for y in next {
                    if orbit.insert(y.key()) {
                        stack.push(y);
                    }
                }
            }
            assert_eq!(g.canonical_key(b), *orbit.iter().next().unwrap());
        }
    }

    #[test]
    fn empty_graph_is_its_own_canonical_form() {
        for f in [Family::Circulant(3), Family::Fano, Family::Cube] {
            let o = Graph::empty(f.size());
            assert_eq!(orbit_canonical(&o, f).unwrap(), o);
        }
        assert!(orbit_canonical(&Graph::from_edges(4, &[(0, 1)]), Family::Gm4).is_err());
    }

    #[test]
    fn class_table_round_trip() {
        let f = Family::Fano;
        let bs = enumerate_b_bruteforce(&build(f).unwrap()).unwrap();
        let g = SymmetryGroup::new(f, GroupChoice::Maximal).unwrap();
        let cls = classes(&bs, &g);
        assert_eq!(cls.iter().map(|c| c.members).sum::<u64>(), bs.len() as u64);
        let text = class_table(f, GroupChoice::Maximal, &cls);
        let (fam, back) = read_class_table(&text).unwrap();
        assert_eq!(fam, f);
        assert_eq!(back, cls);
    }
}
