//! The indecomposable level-2 regular orthogonal matrices, the block-diagonal
//! factors built from them, and the two finite geometries that describe the
//! sporadic cases.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::ScaledOrthogonal;

/// One of the four indecomposable families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Gm4,
    /// `R_{2m}` on `m` vertex pairs.
    Circulant(usize),
    Fano,
    Cube,
}

impl Family {
    pub fn size(self) -> usize {
        match self {
            Family::Gm4 => 4,
            Family::Circulant(m) => 2 * m,
            Family::Fano => 7,
            Family::Cube => 8,
        }
    }

    /// Number of vertex pairs for the circulant family.
    pub fn pairs(self) -> Option<usize> {
        match self {
            Family::Circulant(m) => Some(m),
            _ => None,
        }
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            Family::Circulant(m) if m < 2 => Err(Error::Domain(format!(
                "circulant family needs m >= 2, got {m}"
            ))),
            f => Ok(f),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Gm4 => write!(f, "gm4"),
            Family::Circulant(m) => write!(f, "circulant:{m}"),
            Family::Fano => write!(f, "fano"),
            Family::Cube => write!(f, "cube"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let fam = match s.as_str() {
            "gm4" | "gm" => Family::Gm4,
            "fano" => Family::Fano,
            "cube" => Family::Cube,
            _ => {
                let m = s
                    .strip_prefix("circulant:")
                    .or_else(|| s.strip_prefix("circ:"))
                    .ok_or_else(|| Error::Domain(format!("unknown family {s:?}")))?;
                let m: usize = m
                    .parse()
                    .map_err(|_| Error::Domain(format!("bad pair count in {s:?}")))?;
                Family::Circulant(m)
            }
        };
        fam.validate()
    }
}

/// The 2×2 constants, as `[[a, b], [c, d]]`.
pub(crate) const J2: [[i32; 2]; 2] = [[1, 1], [1, 1]];
pub(crate) const I2: [[i32; 2]; 2] = [[1, 0], [0, 1]];
pub(crate) const Y2: [[i32; 2]; 2] = [[1, -1], [-1, 1]];
pub(crate) const Z2: [[i32; 2]; 2] = [[0, 1], [1, 0]];

fn neg(b: [[i32; 2]; 2]) -> [[i32; 2]; 2] {
    b.map(|r| r.map(|x| -x))
}

fn from_blocks(blocks: &[Vec<[[i32; 2]; 2]>]) -> Vec<i32> {
    let m = blocks.len();
    let n = 2 * m;
    let mut e = vec![0; n * n];
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, blk) in row.iter().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    e[(2 * bi + a) * n + 2 * bj + b] = blk[a][b];
                }
            }
        }
    }
    e
}

/// `2R` for the family.
pub fn build(family: Family) -> Result<ScaledOrthogonal> {
    let family = family.validate()?;
    let n = family.size();
    let e = match family {
        Family::Gm4 => (0..16)
            .map(|k| if k / 4 == k % 4 { -1 } else { 1 })
            .collect(),
        Family::Circulant(m) => {
            let blocks: Vec<Vec<_>> = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            if i == j {
                                J2
                            } else if j == (i + m - 1) % m {
                                Y2
                            } else {
                                [[0; 2]; 2]
                            }
                        })
                        .collect()
                })
                .collect();
            from_blocks(&blocks)
        }
        Family::Fano => {
            let first = [-1, 1, 1, 0, 1, 0, 0];
            (0..49).map(|k| first[(k % 7 + 7 - k / 7) % 7]).collect()
        }
        Family::Cube => {
            let (i, z) = (I2, Z2);
            from_blocks(&[
                vec![neg(i), i, i, i],
                vec![i, neg(z), i, z],
                vec![i, z, neg(z), i],
                vec![i, i, z, neg(z)],
            ])
        }
    };
    let r = ScaledOrthogonal::from_entries_unchecked(n, e);
    debug_assert!(r.is_level2());
    Ok(r)
}

/// A piece of a block-diagonal factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Piece {
    Matrix(ScaledOrthogonal),
    Identity(usize),
}

impl Piece {
    pub fn size(&self) -> usize {
        match self {
            Piece::Matrix(m) => m.size(),
            Piece::Identity(k) => *k,
        }
    }
}

/// Places each piece on its ordered index list: entry `(a, b)` of a piece
/// lands at `(idx[a], idx[b])`. The index lists must partition `0..n`.
pub fn compose_block_diagonal(
    n: usize,
    pieces: &[(Piece, Vec<usize>)],
) -> Result<ScaledOrthogonal> {
    let mut seen = vec![false; n];
    let mut e = vec![0i32; n * n];
    for (piece, idx) in pieces {
        if piece.size() != idx.len() {
            return Err(Error::Placement(format!(
                "piece of size {} placed on {} indices",
                piece.size(),
                idx.len()
            )));
        }
        for &x in idx {
            if x >= n {
                return Err(Error::Placement(format!(
                    "index {x} out of range for order {n}"
                )));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::Placement(format!("index {x} covered twice")));
            }
        }
        match piece {
            Piece::Identity(_) => {
                for &x in idx {
                    e[x * n + x] = 2;
                }
            }
            Piece::Matrix(m) => {
                for (a, &ia) in idx.iter().enumerate() {
                    for (b, &ib) in idx.iter().enumerate() {
                        e[ia * n + ib] = m.at(a, b);
                    }
                }
            }
        }
    }
    if let Some(x) = seen.iter().position(|&s| !s) {
        return Err(Error::Placement(format!("index {x} not covered")));
    }
    Ok(ScaledOrthogonal::from_entries_unchecked(n, e))
}

/// Vertex indices `2i, 2i+1` of pair `C_{i+1}` in the circulant labelling.
pub fn pair(i: usize) -> [usize; 2] {
    [2 * i, 2 * i + 1]
}

/// PG(2,2) on points `0..7`, where point `i` is `v_{i+1}` and `π` adds one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanoGeometry {
    pub points: Vec<usize>,
    /// `lines[i] = πⁱ{v₁, v₂, v₄}`, sorted.
    pub lines: Vec<[usize; 3]>,
    /// `ovals[i] = πⁱ{v₃, v₅, v₆}`, sorted.
    pub ovals: Vec<[usize; 3]>,
}

fn shifted(base: [usize; 3], i: usize, n: usize) -> [usize; 3] {
    let mut t = base.map(|x| (x + i) % n);
    t.sort_unstable();
    t
}

pub fn fano_geometry() -> FanoGeometry {
    FanoGeometry {
        points: (0..7).collect(),
        lines: (0..7).map(|i| shifted([0, 1, 3], i, 7)).collect(),
        ovals: (0..7).map(|i| shifted([2, 4, 5], i, 7)).collect(),
    }
}

impl FanoGeometry {
    /// The line through two distinct points.
    pub fn line_through(&self, a: usize, b: usize) -> usize {
        self.lines
            .iter()
            .position(|l| l.contains(&a) && l.contains(&b))
            .expect("two points span a line")
    }

    pub fn lines_through(&self, p: usize) -> Vec<usize> {
        (0..7).filter(|&i| self.lines[i].contains(&p)).collect()
    }
}

/// AG(3,2) on the eight cube vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeGeometry {
    /// `coords[i]` are the coordinates `(x1, x2, x3)` of vertex `i`, packed
    /// as `x1 + 2 x2 + 4 x3`.
    pub coords: Vec<u8>,
    /// The 14 affine planes as sorted vertex lists: 6 faces, then 6 planes
    /// through opposite edges, then the 2 tetrahedral sets.
    pub planes: Vec<[usize; 4]>,
}

/// Coordinates of the labelled cube vertices `1..8` as bit strings
/// `x1 x2 x3`.
const CUBE_LABELS: [&str; 8] = ["000", "111", "101", "010", "110", "001", "011", "100"];

pub fn cube_geometry() -> CubeGeometry {
    let coords: Vec<u8> = CUBE_LABELS
        .iter()
        .map(|s| {
            s.bytes()
                .enumerate()
                .map(|(k, c)| ((c - b'0') << k) as u8)
                .sum()
        })
        .collect();
    let mut normals: Vec<u8> = (1..8).collect();
    normals.sort_by_key(|a| (a.count_ones(), *a));
    let mut planes = Vec::with_capacity(14);
    for a in normals {
        for c in 0..2 {
            let mut p = [0usize; 4];
            let mut k = 0;
            for (v, &x) in coords.iter().enumerate() {
                if ((a & x).count_ones() % 2) as u8 == c {
                    p[k] = v;
                    k += 1;
                }
            }
            planes.push(p);
        }
    }
    CubeGeometry { coords, planes }
}

impl CubeGeometry {
    /// The cube automorphism of order six used by cube switching:
    /// `(x1, x2, x3) ↦ (x2, x3, x1) ⊕ 111`, acting on labels `0..8`.
    pub fn pi(&self) -> Vec<usize> {
        self.coords
            .iter()
            .map(|&x| {
                let (x1, x2, x3) = (x & 1, x >> 1 & 1, x >> 2 & 1);
                let y = (x2 | x3 << 1 | x1 << 2) ^ 7;
                self.coords.iter().position(|&c| c == y).unwrap()
            })
            .collect()
    }

    /// Whether two vertices are joined by a cube edge.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        (self.coords[a] ^ self.coords[b]).count_ones() == 1
    }

    pub fn is_face(&self, plane: usize) -> bool {
        plane < 6
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::indecomposable_blocks;

    #[test]
    fn families_parse_and_print() {
        for f in [
            Family::Gm4,
            Family::Circulant(5),
            Family::Fano,
            Family::Cube,
        ] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("circulant:1".parse::<Family>().is_err());
        assert!("tetra".parse::<Family>().is_err());
        assert!(build(Family::Circulant(1)).is_err());
    }

    #[test]
    fn every_family_is_level2_and_indecomposable() {
        let mut fams = vec![Family::Gm4, Family::Fano, Family::Cube];
        fams.extend((2..=8).map(Family::Circulant));
        for f in fams {
            let r = build(f).unwrap();
            assert!(r.is_level2(), "{f}");
            assert_eq!(indecomposable_blocks(&r.to_int_matrix()).len(), 1, "{f}");
        }
    }

    #[test]
    fn circulant_three_blocks() {
        let r = build(Family::Circulant(3)).unwrap();
        // block (1,0) is Y, block (0,2) is Y, block (0,1) is O
        assert_eq!(
            [r.at(2, 0), r.at(2, 1), r.at(3, 0), r.at(3, 1)],
            [1, -1, -1, 1]
        );
        assert_eq!(
            [r.at(0, 4), r.at(0, 5), r.at(1, 4), r.at(1, 5)],
            [1, -1, -1, 1]
        );
        assert!((0..2).all(|a| (2..4).all(|b| r.at(a, b) == 0)));
    }

    #[test]
    fn placement_errors() {
        let gm = Piece::Matrix(build(Family::Gm4).unwrap());
        assert!(compose_block_diagonal(6, &[(gm.clone(), vec![0, 1, 2, 3])]).is_err());
        assert!(compose_block_diagonal(
            6,
            &[
                (gm.clone(), vec![0, 1, 2, 3]),
                (Piece::Identity(2), vec![3, 4])
            ]
        )
        .is_err());
        let ok = compose_block_diagonal(
            6,
            &[(gm, vec![0, 1, 2, 3]), (Piece::Identity(2), vec![4, 5])],
        )
        .unwrap();
        assert!(ok.is_level2());
    }

    #[test]
    fn fano_axioms() {
        let g = fano_geometry();
        assert_eq!(g.lines[0], [0, 1, 3]);
        for a in 0..7 {
            for b in 0..7 {
                if a != b {
                    let n = g
                        .lines
                        .iter()
                        .filter(|l| l.contains(&a) && l.contains(&b))
                        .count();
                    assert_eq!(n, 1);
                }
            }
            for l in &g.lines {
                let meet = l.iter().filter(|x| g.lines[a].contains(x)).count();
                assert!(meet == 1 || *l == g.lines[a]);
            }
            // an oval meets every line in 0 or 2 points, except tangents in 1
            assert!(g
                .lines
                .iter()
                .all(|l| l.iter().filter(|x| g.ovals[a].contains(x)).count() <= 2));
        }
    }

    #[test]
    fn cube_planes_form_extended_hamming_code() {
        let g = cube_geometry();
        assert_eq!(g.planes.len(), 14);
        let mut words: Vec<u8> = g
            .planes
            .iter()
            .map(|p| p.iter().map(|&v| 1u8 << v).sum())
            .collect();
        words.extend([0, 255]);
        words.sort_unstable();
        words.dedup();
        assert_eq!(words.len(), 16);
        for &a in &words {
            assert!(words.contains(&!a));
            for &b in &words {
                assert!(words.contains(&(a ^ b)));
                if a != b {
                    assert!((a ^ b).count_ones() >= 4);
                }
            }
        }
        // faces contain exactly four cube edges, tetrahedra none
        let edges_in = |p: &[usize; 4]| {
            let mut k = 0;
            for i in 0..4 {
                for j in i + 1..4 {
                    k += g.adjacent(p[i], p[j]) as usize;
                }
            }
            k
        };
        assert!(g.planes[..6].iter().all(|p| edges_in(p) == 4));
        assert!(g.planes[6..12].iter().all(|p| edges_in(p) == 2));
        assert!(g.planes[12..].iter().all(|p| edges_in(p) == 0));
    }

    #[test]
    fn cube_pi_matches_cycle_notation() {
        // (12)(385476) on labels 1..8
        let want = [2, 1, 8, 7, 4, 3, 6, 5];
        let pi = cube_geometry().pi();
        for (v, &w) in want.iter().enumerate() {
            assert_eq!(pi[v] + 1, w, "image of {}", v + 1);
        }
    }
}
