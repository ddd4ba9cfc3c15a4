//! Simple loopless graphs as bit-packed symmetric adjacency rows, with
//! graph6 and edge-list text formats.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{char_poly_i64, IntMatrix, IntPolynomial};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// From a 01 matrix given row by row. Fails unless it is an adjacency
    /// matrix.
    pub fn from_matrix(n: usize, entries: &[u8]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} entries for order {n}",
                entries.len()
            )));
        }
        let mut g = Self::empty(n);
        for i in 0..n {
            if entries[i * n + i] != 0 {
                return Err(Error::Admissibility(format!("loop at vertex {i}")));
            }
            for j in 0..n {
                let (a, b) = (entries[i * n + j], entries[j * n + i]);
                if a > 1 || a != b {
                    return Err(Error::Admissibility(format!(
                        "entry ({i}, {j}) breaks symmetry or is not 0/1"
                    )));
                }
                if a == 1 && i < j {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b && a < self.n && b < self.n, "bad edge {a}-{b}");
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
        self.bits[b * self.words + a / 64] |= 1 << (a % 64);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] &= !(1 << (b % 64));
        self.bits[b * self.words + a / 64] &= !(1 << (a % 64));
    }

    pub fn set_edge(&mut self, a: usize, b: usize, on: bool) {
        if on {
            self.add_edge(a, b);
        } else {
            self.remove_edge(a, b);
        }
    }

    pub fn toggle_edge(&mut self, a: usize, b: usize) {
        let on = self.has_edge(a, b);
        self.set_edge(a, b, !on);
    }

    /// Adjacency row of `v` as 64-bit words.
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.has_edge(v, u))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.n);
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.has_edge(a, b) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// The graph whose vertex `i` is vertex `perm[i]` of `self`, that is the
    /// adjacency matrix `PᵀAP` with `P e_i = e_{perm[i]}`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut g = Self::empty(self.n);
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.has_edge(perm[a], perm[b]) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Induced subgraph on `vertices`, in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let k = vertices.len();
        let mut g = Self::empty(k);
        for a in 0..k {
            for b in a + 1..k {
                if self.has_edge(vertices[a], vertices[b]) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn adjacency_i64(&self) -> Vec<i64> {
        let n = self.n;
        let mut a = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                if self.has_edge(i, j) {
                    a[i * n + j] = 1;
                }
            }
        }
        a
    }

    pub fn adjacency_matrix(&self) -> IntMatrix {
        if self.n == 0 {
            // IntMatrix has no empty shape; callers never need one.
            panic!("adjacency matrix of the null graph");
        }
        IntMatrix::from_i64(self.n, self.n, &self.adjacency_i64()).expect("square")
    }

    pub fn char_poly(&self) -> IntPolynomial {
        char_poly_i64(self.n, &self.adjacency_i64())
    }

    /// Upper-triangle bitstring in row order (0,1), (0,2), …, (1,2), …
    pub fn upper_bits(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for a in 0..self.n {
            for b in a + 1..self.n {
                out.push(self.has_edge(a, b));
            }
        }
        out
    }

    /// The upper-triangle bitstring as an integer with the first position as
    /// the most significant bit, so that integer order is lexicographic
    /// order. Orders up to 16 only.
    pub fn key(&self) -> u128 {
        assert!(self.n <= 16, "key() needs order <= 16");
        self.upper_bits()
            .into_iter()
            .fold(0u128, |acc, b| (acc << 1) | b as u128)
    }

    pub fn from_key(n: usize, key: u128) -> Self {
        assert!(n <= 16);
        let len = n * n.saturating_sub(1) / 2;
        let mut g = Self::empty(n);
        let mut pos = 0;
        for a in 0..n {
            for b in a + 1..n {
                if key >> (len - 1 - pos) & 1 == 1 {
                    g.add_edge(a, b);
                }
                pos += 1;
            }
        }
        g
    }

    /// Upper-triangle bitstring as lowercase hex, zero-padded at the end to
    /// a whole number of nibbles.
    pub fn to_hex(&self) -> String {
        let bits = self.upper_bits();
        let mut s = String::with_capacity(bits.len().div_ceil(4));
        for chunk in bits.chunks(4) {
            let mut v = 0u32;
            for (i, &b) in chunk.iter().enumerate() {
                v |= (b as u32) << (3 - i);
            }
            s.push(char::from_digit(v, 16).unwrap());
        }
        s
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let len = n * n.saturating_sub(1) / 2;
        if hex.len() != len.div_ceil(4) {
            return Err(Error::parse(
                0,
                format!("hex string of length {} for order {n}", hex.len()),
            ));
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for ch in hex.chars() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::parse(0, format!("bad hex digit {ch:?}")))?;
            for i in (0..4).rev() {
                bits.push(v >> i & 1 == 1);
            }
        }
        if bits[len..].iter().any(|&b| b) {
            return Err(Error::parse(0, "nonzero padding bits"));
        }
        let mut g = Self::empty(n);
        let mut pos = 0;
        for a in 0..n {
            for b in a + 1..n {
                if bits[pos] {
                    g.add_edge(a, b);
                }
                pos += 1;
            }
        }
        Ok(g)
    }

    pub fn to_graph6(&self) -> String {
        let mut out = Vec::new();
        let n = self.n as u64;
        if n <= 62 {
            out.push(n as u8 + 63);
        } else if n <= 258_047 {
            out.push(b'~');
            for shift in [12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        } else {
            out.extend([b'~', b'~']);
            for shift in [30, 24, 18, 12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        }
        let mut acc = 0u8;
        let mut k = 0;
        for j in 1..self.n {
            for i in 0..j {
                acc = (acc << 1) | self.has_edge(i, j) as u8;
                k += 1;
                if k == 6 {
                    out.push(acc + 63);
                    acc = 0;
                    k = 0;
                }
            }
        }
        if k > 0 {
            out.push((acc << (6 - k)) + 63);
        }
        String::from_utf8(out).expect("printable ascii")
    }

    pub fn from_graph6(s: &str) -> Result<Self> {
        let s = s.trim_end_matches(['\n', '\r']);
        let s = s.strip_prefix(">>graph6<<").unwrap_or(s);
        let bytes = s.as_bytes();
        if let Some((pos, &b)) = bytes
            .iter()
            .enumerate()
            .find(|(_, &b)| !(63..=126).contains(&b))
        {
            return Err(Error::parse(
                0,
                format!("byte {b:#x} at offset {pos} outside graph6 range"),
            ));
        }
        let (n, rest) = match bytes {
            [b'~', b'~', r @ ..] => {
                if r.len() < 6 {
                    return Err(Error::parse(0, "truncated graph6 size"));
                }
                let n = r[..6]
                    .iter()
                    .fold(0u64, |acc, &b| (acc << 6) | (b - 63) as u64);
                (n as usize, &r[6..])
            }
            [b'~', r @ ..] => {
                if r.len() < 3 {
                    return Err(Error::parse(0, "truncated graph6 size"));
                }
                let n = r[..3]
                    .iter()
                    .fold(0u64, |acc, &b| (acc << 6) | (b - 63) as u64);
                (n as usize, &r[3..])
            }
            [b, r @ ..] => ((b - 63) as usize, r),
            [] => return Err(Error::parse(0, "empty graph6 string")),
        };
        let nbits = n * n.saturating_sub(1) / 2;
        if rest.len() != nbits.div_ceil(6) {
            return Err(Error::parse(
                0,
                format!(
                    "graph6 body has {} bytes, expected {}",
                    rest.len(),
                    nbits.div_ceil(6)
                ),
            ));
        }
        let mut g = Self::empty(n);
        let mut pos = 0;
        for j in 1..n {
            for i in 0..j {
                let byte = rest[pos / 6] - 63;
                if byte >> (5 - pos % 6) & 1 == 1 {
                    g.add_edge(i, j);
                }
                pos += 1;
            }
        }
        Ok(g)
    }

    /// Edge-list text: first line `n`, then one `a b` pair per line, 0-based.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (a, b) in self.edges() {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, first) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing order line"))?;
        let n: usize = first
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad order {first:?}")))?;
        let mut g = Self::empty(n);
        for (ln, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [a, b] = parts.as_slice() else {
                return Err(Error::parse(ln, "expected two vertex numbers"));
            };
            let a: usize = a
                .parse()
                .map_err(|_| Error::parse(ln, format!("bad vertex {a:?}")))?;
            let b: usize = b
                .parse()
                .map_err(|_| Error::parse(ln, format!("bad vertex {b:?}")))?;
            if a >= n || b >= n || a == b {
                return Err(Error::parse(
                    ln,
                    format!("invalid edge {a} {b} for order {n}"),
                ));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    /// Reads either format: graph6 if the first non-empty line looks like it,
    /// otherwise an edge list.
    pub fn parse_any(text: &str) -> Result<Self> {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty())
            .unwrap_or("");
        if first.parse::<usize>().is_ok() {
            Self::from_edge_list(text)
        } else {
            Self::from_graph6(first).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::parse(1, msg),
                e => e,
            })
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({}, {:?})", self.n, self.edges())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph6_known_strings() {
        // Path on 3 vertices and the Petersen graph, from the nauty format notes.
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(p3.to_graph6(), "Bg");
        let petersen = Graph::from_graph6("IheA@GUAo").unwrap();
        assert_eq!(petersen.order(), 10);
        assert_eq!(petersen.edge_count(), 15);
        assert!((0..10).all(|v| petersen.degree(v) == 3));
        assert_eq!(petersen.to_graph6(), "IheA@GUAo");
        assert_eq!(Graph::complete(4).to_graph6(), "C~");
        assert_eq!(Graph::empty(0).to_graph6(), "?");
    }

    #[test]
    fn graph6_long_order_header() {
        let g = Graph::from_edges(70, &[(0, 69), (3, 4)]);
        let s = g.to_graph6();
        assert!(s.starts_with('~'));
        assert_eq!(Graph::from_graph6(&s).unwrap(), g);
    }

    #[test]
    fn graph6_rejects_bad_input() {
        assert!(Graph::from_graph6("").is_err());
        assert!(Graph::from_graph6("C").is_err());
        assert!(Graph::from_graph6("C~~").is_err());
        assert!(Graph::from_graph6("C\u{1}").is_err());
    }

    #[test]
    fn key_and_hex_round_trip() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 4), (3, 4)]);
        assert_eq!(Graph::from_key(5, g.key()), g);
        assert_eq!(Graph::from_hex(5, &g.to_hex()).unwrap(), g);
        // (0,1) is the most significant bit of ten.
        assert_eq!(g.key() >> 9, 1);
        assert!(Graph::from_hex(5, "zz0").is_err());
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 3)]);
        assert_eq!(Graph::from_edge_list(&g.to_edge_list()).unwrap(), g);
        assert_eq!(Graph::parse_any(&g.to_edge_list()).unwrap(), g);
        assert_eq!(Graph::parse_any(&g.to_graph6()).unwrap(), g);
        let err = Graph::from_edge_list("4\n0 1\n2 9\n").unwrap_err();
        assert_eq!(err, Error::parse(3, "invalid edge 2 9 for order 4"));
    }

    #[test]
    fn relabel_is_conjugation() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]);
        let h = g.relabel(&[2, 1, 0, 3]);
        assert!(h.has_edge(0, 1) && h.has_edge(1, 2) && !h.has_edge(0, 2));
        let h = g.relabel(&[1, 0, 2, 3]);
        assert!(h.has_edge(0, 1) && h.has_edge(0, 2));
    }
}
