//! Exact integer matrices, characteristic polynomials and the structural
//! predicates used by everything else.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Builds a matrix from nested rows. Panics on ragged input, which is a
    /// programming error rather than a data error.
    pub fn from_rows<T: Copy + Into<i64>>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| BigInt::from(x.into())))
            .collect();
        Self::new(r, c, data).expect("non-empty rows")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// The all-ones matrix.
    pub fn ones(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::one(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &IntMatrix, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &IntMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    /// Exact division of every entry by `k`; an inexact entry is an error.
    pub fn div_exact(&self, k: &BigInt) -> Result<Self> {
        let mut data = Vec::with_capacity(self.data.len());
        for (idx, a) in self.data.iter().enumerate() {
            let (q, r) = a.div_rem(k);
            if !r.is_zero() {
                return Err(Error::Inexact(format!(
                    "entry ({}, {}) = {a} is not divisible by {k}",
                    idx / self.cols,
                    idx % self.cols
                )));
            }
            data.push(q);
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Entries as machine integers, if they all fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.data.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn is_01(&self) -> bool {
        self.data.iter().all(|x| x.is_zero() || x.is_one())
    }

    /// Symmetric 01-matrix with zero diagonal.
    pub fn is_adjacency(&self) -> bool {
        self.is_square()
            && self.is_01()
            && (0..self.rows).all(|i| {
                self.get(i, i).is_zero() && (0..i).all(|j| self.get(i, j) == self.get(j, i))
            })
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Polynomial with integer coefficients in ascending degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = k == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Determinant by fraction-free (Bareiss) elimination over the integers.
pub fn det_bareiss(a: &IntMatrix) -> Result<BigInt> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut m = a.data.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !m[r * n + k].is_zero()) {
                Some(r) => {
                    for j in 0..n {
                        m.swap(k * n + j, r * n + j);
                    }
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                m[i * n + j] = v / &prev;
            }
        }
        prev = m[k * n + k].clone();
    }
    Ok(sign * &m[n * n - 1])
}

/// Characteristic polynomial det(xI − a) by the division-free Berkowitz
/// recursion. Slow but independent of [`char_poly`]; kept as a cross-check.
pub fn char_poly_berkowitz(a: &IntMatrix) -> Result<IntPolynomial> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "char_poly of {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    // c holds the coefficients of det(xI - A_k) for the leading k x k block,
    // highest degree first.
    let mut c: Vec<BigInt> = vec![BigInt::one(), -a.get(0, 0).clone()];
    for k in 1..n {
        // Column vector t of length k+2 built from the Toeplitz recursion.
        let akk = a.get(k, k).clone();
        let r: Vec<BigInt> = (0..k).map(|j| a.get(k, j).clone()).collect();
        let s: Vec<BigInt> = (0..k).map(|i| a.get(i, k).clone()).collect();
        let mut t = vec![BigInt::one(), -akk];
        // r * A^j * s for j = 0..k-1
        let mut v = s.clone();
        for _ in 0..k {
            let rv: BigInt = r.iter().zip(&v).map(|(x, y)| x * y).sum();
            t.push(-rv);
            let mut nv = vec![BigInt::zero(); k];
            for (i, nvi) in nv.iter_mut().enumerate() {
                for (j, vj) in v.iter().enumerate() {
                    let aij = a.get(i, j);
                    if !aij.is_zero() && !vj.is_zero() {
                        *nvi += aij * vj;
                    }
                }
            }
            v = nv;
        }
        let mut nc = vec![BigInt::zero(); k + 2];
        for (i, nci) in nc.iter_mut().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                if j <= i && i - j < t.len() {
                    *nci += &t[i - j] * cj;
                }
            }
        }
        c = nc;
    }
    c.reverse();
    Ok(IntPolynomial::new(c))
}

/// Characteristic polynomial det(xI − a).
///
/// Computed modulo a set of 31-bit primes whose product exceeds twice a
/// Hadamard-type bound on the coefficients (Hessenberg reduction per prime),
/// then rebuilt exactly by the Chinese remainder theorem.
pub fn char_poly(a: &IntMatrix) -> Result<IntPolynomial> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "char_poly of {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let bits = coefficient_bound_bits(a);
    let primes = primes_for_bits(bits + 2, n as u64 + 1);
    let residues: Vec<Vec<u64>> = primes
        .iter()
        .map(|&p| {
            let ap: Vec<u64> = a.data.iter().map(|x| reduce(x, p)).collect();
            char_poly_mod(&ap, n, p)
        })
        .collect();
    Ok(IntPolynomial::new(crt_columns(&residues, &primes, n + 1)))
}

/// Fast path for small machine-integer matrices (adjacency matrices and
/// their relatives). Same algorithm as [`char_poly`].
pub fn char_poly_i64(n: usize, a: &[i64]) -> IntPolynomial {
    assert_eq!(a.len(), n * n);
    let r2 = (0..n)
        .map(|i| {
            a[i * n..(i + 1) * n]
                .iter()
                .map(|&x| (x as i128) * (x as i128))
                .sum::<i128>()
        })
        .max()
        .unwrap_or(0);
    let bits = bound_bits(n, &BigInt::from(r2));
    let primes = primes_for_bits(bits + 2, n as u64 + 1);
    let residues: Vec<Vec<u64>> = primes
        .iter()
        .map(|&p| {
            let ap: Vec<u64> = a.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
            char_poly_mod(&ap, n, p)
        })
        .collect();
    IntPolynomial::new(crt_columns(&residues, &primes, n + 1))
}

fn reduce(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits")
}

/// Bits needed for max_k |c_k| where c_k sums C(n,k) principal minors, each
/// bounded by Hadamard with the largest squared row norm.
fn coefficient_bound_bits(a: &IntMatrix) -> u64 {
    let n = a.rows;
    let r2 = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j) * a.get(i, j)).sum::<BigInt>())
        .max()
        .unwrap_or_default();
    bound_bits(n, &r2)
}

fn bound_bits(n: usize, r2: &BigInt) -> u64 {
    // |c_k|^2 <= C(n,k)^2 * r2^k
    let r2 = if r2.is_zero() {
        BigInt::one()
    } else {
        r2.clone()
    };
    let mut best = BigInt::one();
    let mut binom = BigInt::one();
    let mut pow = BigInt::one();
    for k in 0..=n {
        let cand = &binom * &binom * &pow;
        if cand > best {
            best = cand;
        }
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
        pow *= &r2;
    }
    best.bits() / 2 + 1
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = 1u64;
        let mut base = a % n;
        let mut e = d;
        while e > 0 {
            if e & 1 == 1 {
                x = mulm(x, base);
            }
            base = mulm(base, base);
            e >>= 1;
        }
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Descending primes below 2^31 whose product has at least `bits` bits.
fn primes_for_bits(bits: u64, min: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut have = 0u64;
    let mut cand = (1u64 << 31) - 1;
    while have < bits {
        if cand <= min {
            panic!("ran out of 31-bit primes");
        }
        if is_prime_u64(cand) {
            out.push(cand);
            have += 30;
        }
        cand -= 2;
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Coefficients (ascending) of det(xI − a) mod p: similarity reduction to
/// upper Hessenberg form, then the standard three-term recurrence.
fn char_poly_mod(a: &[u64], n: usize, p: u64) -> Vec<u64> {
    let mut h = a.to_vec();
    let sub = |x: u64, y: u64| if x >= y { x - y } else { x + p - y };
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i * n + j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            for c in 0..n {
                h.swap(piv * n + c, (j + 1) * n + c);
            }
            for r in 0..n {
                h.swap(r * n + piv, r * n + j + 1);
            }
        }
        let inv = inv_mod(h[(j + 1) * n + j], p);
        for k in j + 2..n {
            let u = h[k * n + j] * inv % p;
            if u == 0 {
                continue;
            }
            for c in 0..n {
                h[k * n + c] = sub(h[k * n + c], u * h[(j + 1) * n + c] % p);
            }
            for r in 0..n {
                h[r * n + j + 1] = (h[r * n + j + 1] + u * h[r * n + k]) % p;
            }
        }
    }
    // polys[m] = char poly of the leading m×m block.
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 0..n {
        let prev = &polys[m];
        let mut next = vec![0u64; m + 2];
        let hmm = h[m * n + m];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = (next[d + 1] + c) % p;
            next[d] = sub(next[d], c * hmm % p);
        }
        let mut prod = 1u64;
        for i in (0..m).rev() {
            prod = prod * h[(i + 1) * n + i] % p;
            if prod == 0 {
                break;
            }
            let t = h[i * n + m] * prod % p;
            if t == 0 {
                continue;
            }
            for (d, &c) in polys[i].iter().enumerate() {
                next[d] = sub(next[d], t * c % p);
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn crt_columns(residues: &[Vec<u64>], primes: &[u64], len: usize) -> Vec<BigInt> {
    let modulus: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    let half = &modulus >> 1;
    let basis: Vec<BigInt> = primes
        .iter()
        .map(|&p| {
            let pb = BigInt::from(p);
            let mi = &modulus / &pb;
            let inv = inv_mod(reduce(&mi, p), p);
            mi * BigInt::from(inv)
        })
        .collect();
    (0..len)
        .map(|d| {
            let mut acc = BigInt::zero();
            for (res, e) in residues.iter().zip(&basis) {
                acc += e * BigInt::from(res[d]);
            }
            let mut v = acc.mod_floor(&modulus);
            if v > half {
                v -= &modulus;
            }
            v
        })
        .collect()
}

/// True iff `m·mᵀ = 4I`, every row sums to 2 and some entry is odd, i.e.
/// `m/2` is a regular orthogonal matrix of level exactly 2.
pub fn is_level2_regular_orthogonal(m: &IntMatrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows;
    let two = BigInt::from(2);
    let four = BigInt::from(4);
    for i in 0..n {
        let s: BigInt = (0..n).map(|j| m.get(i, j).clone()).sum();
        if s != two {
            return false;
        }
        for k in 0..=i {
            let dot: BigInt = (0..n).map(|j| m.get(i, j) * m.get(k, j)).sum();
            let want = if i == k { &four } else { &BigInt::ZERO };
            if &dot != want {
                return false;
            }
        }
    }
    m.data.iter().any(|x| x.is_odd())
}

/// One indecomposable block: a set of rows together with the columns they
/// touch.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Block {
    pub fn size(&self) -> usize {
        self.rows.len()
    }
}

/// Connected components of the bipartite row/column graph of the nonzero
/// pattern, sorted by smallest row index.
///
/// For a matrix that is block diagonal after a simultaneous permutation the
/// row and column sets of every block coincide; a permutation part shows up
/// as singletons.
pub fn indecomposable_blocks(m: &IntMatrix) -> Vec<Block> {
    let (r, c) = (m.rows, m.cols);
    // Union-find over r + c nodes.
    let mut parent: Vec<usize> = (0..r + c).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..r {
        for j in 0..c {
            if !m.get(i, j).is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, r + j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut index = std::collections::BTreeMap::new();
    for x in 0..r + c {
        let root = find(&mut parent, x);
        let at = *index.entry(root).or_insert_with(|| {
            blocks.push(Block {
                rows: vec![],
                cols: vec![],
            });
            blocks.len() - 1
        });
        if x < r {
            blocks[at].rows.push(x);
        } else {
            blocks[at].cols.push(x - r);
        }
    }
    blocks.sort();
    blocks
}

/// A level-2 regular orthogonal matrix stored as `M = 2R`.
///
/// Every entry of such an `M` lies in `{-2, …, 2}`, so the entries are kept
/// as small integers; [`ScaledOrthogonal::to_int_matrix`] gives the exact
/// big-integer view.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ScaledOrthogonal {
    n: usize,
    e: Vec<i32>,
}

impl ScaledOrthogonal {
    /// Validates `m` as twice a level-2 regular orthogonal matrix.
    pub fn new(m: &IntMatrix) -> Result<Self> {
        if !is_level2_regular_orthogonal(m) {
            return Err(Error::Domain(
                "matrix is not 2R for a level-2 regular orthogonal R".into(),
            ));
        }
        let e = m
            .to_i64()
            .expect("entries bounded by 2")
            .into_iter()
            .map(|x| x as i32)
            .collect();
        Ok(ScaledOrthogonal { n: m.rows, e })
    }

    /// Accepts a product of level-2 factors, which may have level 1 (a
    /// permutation scaled by 2) but must still satisfy `MMᵀ = 4I`.
    pub(crate) fn from_entries_unchecked(n: usize, e: Vec<i32>) -> Self {
        debug_assert_eq!(e.len(), n * n);
        ScaledOrthogonal { n, e }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> i32 {
        self.e[i * self.n + j]
    }

    pub fn entries(&self) -> &[i32] {
        &self.e
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::new(
            self.n,
            self.n,
            self.e.iter().map(|&x| BigInt::from(x)).collect(),
        )
        .expect("square")
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut e = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                e[j * n + i] = self.e[i * n + j];
            }
        }
        ScaledOrthogonal { n, e }
    }

    /// `(self · other) / 2`, the scaled form of the product of the two
    /// orthogonal matrices. Panics if the halving is inexact, which cannot
    /// happen for products that stay orthogonal with integral `2R`.
    pub fn compose(&self, other: &ScaledOrthogonal) -> Option<Self> {
        let n = self.n;
        assert_eq!(n, other.n);
        let mut e = vec![0i32; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.e[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    e[i * n + j] += a * other.e[k * n + j];
                }
            }
        }
        if e.iter().any(|x| x % 2 != 0) {
            return None;
        }
        e.iter_mut().for_each(|x| *x /= 2);
        Some(ScaledOrthogonal { n, e })
    }

    /// If `self/2` is a permutation matrix, the permutation `σ` with
    /// `R[i][σ(i)] = 1`.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        let n = self.n;
        let mut perm = Vec::with_capacity(n);
        for i in 0..n {
            let row = &self.e[i * n..(i + 1) * n];
            let mut hit = None;
            for (j, &x) in row.iter().enumerate() {
                match x {
                    0 => {}
                    2 if hit.is_none() => hit = Some(j),
                    _ => return None,
                }
            }
            perm.push(hit?);
        }
        Some(perm)
    }

    pub fn is_level2(&self) -> bool {
        is_level2_regular_orthogonal(&self.to_int_matrix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn char_poly_small_cases() {
        assert_eq!(
            char_poly(&IntMatrix::zeros(2, 2)).unwrap(),
            IntPolynomial::from_i64(&[0, 0, 1])
        );
        let k3 = m(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        assert_eq!(
            char_poly(&k3).unwrap(),
            IntPolynomial::from_i64(&[-2, -3, 0, 1])
        );
        let c4 = m(&[&[0, 1, 0, 1], &[1, 0, 1, 0], &[0, 1, 0, 1], &[1, 0, 1, 0]]);
        assert_eq!(
            char_poly(&c4).unwrap(),
            IntPolynomial::from_i64(&[0, 0, -4, 0, 1])
        );
        assert_eq!(char_poly(&c4).unwrap().to_string(), "x^4 - 4x^2");
    }

    #[test]
    fn char_poly_rejects_rectangular() {
        let a = IntMatrix::zeros(2, 3);
        assert!(matches!(char_poly(&a), Err(Error::Dimension(_))));
        assert!(matches!(char_poly_berkowitz(&a), Err(Error::Dimension(_))));
    }

    #[test]
    fn berkowitz_and_bareiss_agree_on_fixed_matrix() {
        let a = m(&[&[2, -1, 0, 3], &[1, 1, 4, 0], &[0, 5, -2, 1], &[7, 0, 1, 1]]);
        let p = char_poly_berkowitz(&a).unwrap();
        assert_eq!(p, char_poly(&a).unwrap());
        // p(0) = det(-A) = det(A) for even order
        assert_eq!(p.eval(&BigInt::zero()), det_bareiss(&a).unwrap());
    }

    #[test]
    fn big_entries_survive_crt() {
        let big = BigInt::from(10).pow(30);
        let a = IntMatrix::new(
            2,
            2,
            vec![big.clone(), BigInt::from(1), BigInt::from(-3), -big.clone()],
        )
        .unwrap();
        // x^2 - (big^2 - 3)
        let want = IntPolynomial::new(vec![-(&big * &big) + 3, BigInt::zero(), BigInt::one()]);
        assert_eq!(char_poly(&a).unwrap(), want);
        assert_eq!(char_poly_berkowitz(&a).unwrap(), want);
    }

    #[test]
    fn level2_predicate() {
        let gm = m(&[
            &[-1, 1, 1, 1],
            &[1, -1, 1, 1],
            &[1, 1, -1, 1],
            &[1, 1, 1, -1],
        ]);
        assert!(is_level2_regular_orthogonal(&gm));
        assert!(!is_level2_regular_orthogonal(
            &IntMatrix::identity(4).scale(&BigInt::from(2))
        ));
        assert!(!is_level2_regular_orthogonal(&IntMatrix::ones(4, 4)));
    }

    #[test]
    fn blocks_of_direct_sum() {
        let mut a = IntMatrix::identity(6).scale(&BigInt::from(2));
        for i in 0..4 {
            for j in 0..4 {
                a.set(i, j, BigInt::from(if i == j { -1 } else { 1 }));
            }
        }
        let b = indecomposable_blocks(&a);
        let sizes: Vec<usize> = b.iter().map(Block::size).collect();
        assert_eq!(sizes, vec![4, 1, 1]);
    }

    #[test]
    fn polynomial_display() {
        assert_eq!(
            IntPolynomial::from_i64(&[-2, -3, 0, 1]).to_string(),
            "x^3 - 3x - 2"
        );
        assert_eq!(IntPolynomial::from_i64(&[]).to_string(), "0");
        assert_eq!(IntPolynomial::from_i64(&[5]).to_string(), "5");
        assert_eq!(IntPolynomial::from_i64(&[0, -1]).to_string(), "-x");
    }
}
