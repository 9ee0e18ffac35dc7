//! Skew adjacency matrices, exact determinants, Pfaffian certification by
//! nice cycles, and the block determinant identities of `H_g^e`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{Generator, OrientedGraph};
use crate::graph::{remove_vertices, Graph, HubRole};
use crate::matching::has_perfect_matching;

/// Default cap on the number of elementary cycles visited.
pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// Dense row-major matrix of big integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
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
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        IntMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Matrix("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self.get(i, i).is_zero() && (0..i).all(|j| *self.get(i, j) == -self.get(j, i))
            })
    }

    /// Deletes the listed rows and columns.
    pub fn submatrix(&self, drop_rows: &[usize], drop_cols: &[usize]) -> Result<IntMatrix> {
        let keep = |drop: &[usize], len: usize| -> Result<Vec<usize>> {
            if let Some(&bad) = drop.iter().find(|&&x| x >= len) {
                return Err(Error::VertexOutOfRange { index: bad, n: len });
            }
            Ok((0..len).filter(|x| !drop.contains(x)).collect())
        };
        let rows = keep(drop_rows, self.rows)?;
        let cols = keep(drop_cols, self.cols)?;
        let data = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j).clone()))
            .collect();
        Ok(IntMatrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        })
    }
}

/// Sparse antisymmetric integer matrix. Row `i` lists `(j, a_ij)` with
/// `a_ij != 0`, ascending in `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewMatrix {
    rows: Vec<Vec<(usize, i64)>>,
}

impl SkewMatrix {
    /// Builds the matrix from upper-triangle entries `(i, j, a_ij)`, `i < j`.
    pub fn from_upper(order: usize, entries: impl IntoIterator<Item = (usize, usize, i64)>) -> Result<Self> {
        let mut rows = vec![Vec::new(); order];
        for (i, j, a) in entries {
            if i >= j || j >= order {
                return Err(Error::Matrix(format!("entry ({i}, {j}) is not strictly upper")));
            }
            if a != 0 {
                rows[i].push((j, a));
                rows[j].push((i, -a));
            }
        }
        for r in &mut rows {
            r.sort_unstable();
            if r.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Matrix("duplicate entry".into()));
            }
        }
        Ok(SkewMatrix { rows })
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map_or(0, |p| self.rows[i][p].1)
    }

    pub fn row(&self, i: usize) -> &[(usize, i64)] {
        &self.rows[i]
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> IntMatrix {
        let n = self.order();
        let mut m = IntMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                m.set(i, j, BigInt::from(a));
            }
        }
        m
    }

    /// Deletes the same rows and columns, which keeps the matrix antisymmetric.
    pub fn principal_submatrix(&self, drop: &[usize]) -> Result<SkewMatrix> {
        let n = self.order();
        if let Some(&bad) = drop.iter().find(|&&x| x >= n) {
            return Err(Error::VertexOutOfRange { index: bad, n });
        }
        let mut map = vec![None; n];
        let mut next = 0;
        for (i, slot) in map.iter_mut().enumerate() {
            if !drop.contains(&i) {
                *slot = Some(next);
                next += 1;
            }
        }
        let rows = (0..n)
            .filter(|&i| map[i].is_some())
            .map(|i| {
                self.rows[i]
                    .iter()
                    .filter_map(|&(j, a)| map[j].map(|k| (k, a)))
                    .collect()
            })
            .collect();
        Ok(SkewMatrix { rows })
    }

    /// Deletes arbitrary rows and columns, giving a dense matrix.
    pub fn submatrix(&self, drop_rows: &[usize], drop_cols: &[usize]) -> Result<IntMatrix> {
        self.to_dense().submatrix(drop_rows, drop_cols)
    }
}

/// `a_ij = +1` for an arc `i -> j`, `-1` for `j -> i`, `0` otherwise.
pub fn skew_adjacency(og: &OrientedGraph) -> SkewMatrix {
    let entries = og
        .arcs()
        .map(|(t, h)| if t < h { (t, h, 1) } else { (h, t, -1) });
    SkewMatrix::from_upper(og.base().n(), entries).expect("arcs are distinct edges")
}

/// Fraction-free Bareiss elimination with row pivoting.
pub fn determinant_exact(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::Matrix(format!("{}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        bottom.par_iter_mut().for_each(|row| {
            let factor = std::mem::take(&mut row[k]);
            for j in k + 1..n {
                let cross = !factor.is_zero() && !pivot_row[j].is_zero();
                if row[j].is_zero() && !cross {
                    continue;
                }
                let mut x = pivot * &row[j];
                if cross {
                    x -= &factor * &pivot_row[j];
                }
                row[j] = x / &prev;
            }
        });
        prev = a[k][k].clone();
    }
    Ok(&a[n - 1][n - 1] * sign)
}

/// Laplace expansion along the first row. Exponential; test oracle only.
pub fn determinant_cofactor(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::Matrix(format!("{}x{} matrix", m.rows(), m.cols())));
    }
    fn rec(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> BigInt {
        if rows.is_empty() {
            return BigInt::one();
        }
        let mut total = BigInt::zero();
        for (k, &c) in cols.iter().enumerate() {
            let x = m.get(rows[0], c);
            if x.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&j| j != c).collect();
            let minor = rec(m, &rows[1..], &rest);
            if k % 2 == 0 {
                total += x * minor;
            } else {
                total -= x * minor;
            }
        }
        total
    }
    let idx: Vec<usize> = (0..m.rows()).collect();
    Ok(rec(m, &idx, &idx))
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &b in &BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The `k` largest primes below `2^62`, descending.
pub fn large_primes(k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut c = (1u64 << 62) - 1;
    while out.len() < k {
        if is_prime_u64(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

fn residue(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = if r.is_negative() { r + BigInt::from(p) } else { r };
    r.to_u64().expect("residue fits in u64")
}

/// Determinant modulo a prime by Gaussian elimination.
pub fn determinant_mod_p(m: &IntMatrix, p: u64) -> Result<u64> {
    if !m.is_square() {
        return Err(Error::Matrix(format!("{}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut a: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| residue(m.get(i, j), p)).collect())
        .collect();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i][k] != 0) else {
            return Ok(0);
        };
        if piv != k {
            a.swap(piv, k);
            det = (p - det) % p;
        }
        det = mul_mod(det, a[k][k], p);
        let inv = inv_mod(a[k][k], p);
        let (top, bottom) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            if row[k] == 0 {
                continue;
            }
            let f = mul_mod(row[k], inv, p);
            for j in k..n {
                if pivot_row[j] != 0 {
                    row[j] = (row[j] + p - mul_mod(f, pivot_row[j], p)) % p;
                }
            }
        }
    }
    Ok(det)
}

trait Scalar: Clone + Send + Sync {
    fn from_i64(x: i64, ctx: u64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
}

impl Scalar for BigRational {
    fn from_i64(x: i64, _: u64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

#[derive(Debug, Clone, Copy)]
struct Zp {
    v: u64,
    p: u64,
}

impl Scalar for Zp {
    fn from_i64(x: i64, p: u64) -> Self {
        Zp {
            v: x.rem_euclid(p as i64) as u64,
            p,
        }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn add(&self, o: &Self) -> Self {
        Zp { v: (self.v + o.v) % self.p, p: self.p }
    }
    fn sub(&self, o: &Self) -> Self {
        Zp { v: (self.v + self.p - o.v) % self.p, p: self.p }
    }
    fn mul(&self, o: &Self) -> Self {
        Zp { v: mul_mod(self.v, o.v, self.p), p: self.p }
    }
    fn div(&self, o: &Self) -> Self {
        Zp { v: mul_mod(self.v, inv_mod(o.v, self.p), self.p), p: self.p }
    }
}

/// Product of the 2x2 pivots of a skew-symmetric elimination, or `None`
/// when the matrix is singular. The determinant is the square of the result.
///
/// Each step takes a vertex `u` of minimum degree and its minimum-degree
/// neighbour `v`, and forms the Schur complement of the block on `{u, v}`:
/// `a_ij += (a_iv a_ju − a_iu a_jv) / a_uv`.
fn skew_pivot_product<S: Scalar>(m: &SkewMatrix, ctx: u64) -> Option<S> {
    let n = m.order();
    if n % 2 == 1 {
        return None;
    }
    let mut rows: Vec<BTreeMap<usize, S>> = m
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&(j, a)| (j, S::from_i64(a, ctx)))
                .filter(|(_, a)| !a.is_zero())
                .collect()
        })
        .collect();
    let mut alive = vec![true; n];
    let mut product = S::from_i64(1, ctx);
    for _ in 0..n / 2 {
        let u = (0..n).filter(|&i| alive[i]).min_by_key(|&i| rows[i].len())?;
        if rows[u].is_empty() {
            return None;
        }
        let v = *rows[u].keys().min_by_key(|&&j| rows[j].len()).expect("non-empty row");
        let p = rows[u][&v].clone();
        product = product.mul(&p);
        let mut touched: Vec<usize> = rows[u].keys().chain(rows[v].keys()).copied().collect();
        touched.sort_unstable();
        touched.dedup();
        touched.retain(|&x| x != u && x != v);
        let col = |rows: &Vec<BTreeMap<usize, S>>, i: usize, c: usize| rows[i].get(&c).cloned();
        let iu: Vec<Option<S>> = touched.iter().map(|&i| col(&rows, i, u)).collect();
        let iv: Vec<Option<S>> = touched.iter().map(|&i| col(&rows, i, v)).collect();
        for (x, &i) in touched.iter().enumerate() {
            for (y, &j) in touched.iter().enumerate().skip(x + 1) {
                // a_ju = -a_uj is stored in row j as col(j, u); a_jv likewise
                let mut delta: Option<S> = None;
                if let (Some(a_iv), Some(a_ju)) = (&iv[x], &iu[y]) {
                    delta = Some(a_iv.mul(a_ju));
                }
                if let (Some(a_iu), Some(a_jv)) = (&iu[x], &iv[y]) {
                    let t = a_iu.mul(a_jv);
                    delta = Some(match delta {
                        Some(d) => d.sub(&t),
                        None => S::from_i64(0, ctx).sub(&t),
                    });
                }
                let Some(delta) = delta else { continue };
                let delta = delta.div(&p);
                if delta.is_zero() {
                    continue;
                }
                let new = match rows[i].get(&j) {
                    Some(old) => old.add(&delta),
                    None => delta,
                };
                if new.is_zero() {
                    rows[i].remove(&j);
                    rows[j].remove(&i);
                } else {
                    rows[j].insert(i, S::from_i64(0, ctx).sub(&new));
                    rows[i].insert(j, new);
                }
            }
        }
        for &i in &touched {
            rows[i].remove(&u);
            rows[i].remove(&v);
        }
        rows[u].clear();
        rows[v].clear();
        alive[u] = false;
        alive[v] = false;
    }
    Some(product)
}

/// Exact Pfaffian magnitude `|Pf(M)| = sqrt(det M)` by sparse elimination
/// over the rationals.
pub fn skew_pfaffian_abs(m: &SkewMatrix) -> Result<BigInt> {
    match skew_pivot_product::<BigRational>(m, 0) {
        None => Ok(BigInt::zero()),
        Some(q) if q.is_integer() => Ok(q.to_integer().abs()),
        Some(q) => Err(Error::Inconsistent(format!("non-integral Pfaffian {q}"))),
    }
}

/// Exact determinant of a skew-symmetric matrix.
pub fn skew_determinant(m: &SkewMatrix) -> Result<BigInt> {
    let pf = skew_pfaffian_abs(m)?;
    Ok(&pf * &pf)
}

/// `det M mod p` by the same sparse elimination carried out in `GF(p)`.
pub fn skew_determinant_mod_p(m: &SkewMatrix, p: u64) -> u64 {
    match skew_pivot_product::<Zp>(m, p) {
        None => 0,
        Some(x) => mul_mod(x.v, x.v, p),
    }
}

/// Recomputes `det` modulo several large primes and reports the first
/// disagreeing prime.
pub fn check_skew_residues(m: &SkewMatrix, det: &BigInt, primes: usize) -> Result<()> {
    let bad = large_primes(primes)
        .into_par_iter()
        .find_first(|&p| skew_determinant_mod_p(m, p) != residue(det, p));
    match bad {
        None => Ok(()),
        Some(p) => Err(Error::Inconsistent(format!("determinant residue mismatch modulo {p}"))),
    }
}

/// Same as [`check_skew_residues`] for dense matrices.
pub fn check_dense_residues(m: &IntMatrix, det: &BigInt, primes: usize) -> Result<()> {
    for p in large_primes(primes) {
        if determinant_mod_p(m, p)? != residue(det, p) {
            return Err(Error::Inconsistent(format!("determinant residue mismatch modulo {p}")));
        }
    }
    Ok(())
}

/// Exact square root of a perfect square; anything else is an error.
pub fn exact_sqrt(x: &BigInt) -> Result<BigInt> {
    if x.is_negative() {
        return Err(Error::NotPerfectSquare(x.to_string()));
    }
    let r = x.sqrt();
    if &(&r * &r) == x {
        Ok(r)
    } else {
        Err(Error::NotPerfectSquare(x.to_string()))
    }
}

/// `sqrt(det A(og))`, the number of perfect matchings when `og` is a
/// Pfaffian orientation.
pub fn pm_count_via_determinant(og: &OrientedGraph) -> Result<BigInt> {
    let det = skew_determinant(&skew_adjacency(og))?;
    exact_sqrt(&det)
}

/// Same quantity through dense Bareiss elimination.
pub fn pm_count_via_dense_determinant(og: &OrientedGraph) -> Result<BigInt> {
    let det = determinant_exact(&skew_adjacency(og).to_dense())?;
    exact_sqrt(&det)
}

/// Elementary cycle given as a closed walk `vertices[0] .. vertices[k-1]
/// vertices[0]`, together with the number of its edges whose direction
/// agrees with that traversal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiceCycle {
    pub vertices: Vec<usize>,
    pub co_oriented: usize,
}

impl NiceCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_oddly_oriented(&self) -> bool {
        self.co_oriented % 2 == 1
    }
}

/// Co-oriented edge count along `walk`, closing it back to the start when
/// `closed` is set.
pub fn co_oriented_count(og: &OrientedGraph, walk: &[usize], closed: bool) -> Result<usize> {
    let mut pairs: Vec<(usize, usize)> = walk.windows(2).map(|w| (w[0], w[1])).collect();
    if closed && walk.len() > 1 {
        pairs.push((walk[walk.len() - 1], walk[0]));
    }
    pairs.iter().try_fold(0, |acc, &(a, b)| match og.direction(a, b) {
        Some(1) => Ok(acc + 1),
        Some(_) => Ok(acc),
        None => Err(Error::InvalidGraph(format!("{a}-{b} is not an edge"))),
    })
}

/// Calls `visit` once per elementary cycle of length at least 3, each cycle
/// rooted at its smallest vertex and traversed towards its smaller
/// neighbour on the cycle. Fails once more than `cap` cycles are seen.
pub fn for_each_cycle(g: &Graph, cap: usize, mut visit: impl FnMut(&[usize])) -> Result<usize> {
    fn dfs(
        g: &Graph,
        s: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        seen: &mut usize,
        cap: usize,
        visit: &mut dyn FnMut(&[usize]),
    ) -> Result<()> {
        let v = *path.last().expect("path starts at s");
        for &w in g.neighbors(v) {
            if w == s && path.len() >= 3 && path[1] < path[path.len() - 1] {
                *seen += 1;
                if *seen > cap {
                    return Err(Error::CapExceeded {
                        what: "elementary cycle count",
                        size: *seen,
                        cap,
                    });
                }
                visit(path);
            } else if w > s && !on_path[w] {
                on_path[w] = true;
                path.push(w);
                dfs(g, s, path, on_path, seen, cap, visit)?;
                path.pop();
                on_path[w] = false;
            }
        }
        Ok(())
    }
    let mut seen = 0;
    let mut on_path = vec![false; g.n()];
    for s in 0..g.n() {
        let mut path = vec![s];
        on_path[s] = true;
        dfs(g, s, &mut path, &mut on_path, &mut seen, cap, &mut visit)?;
        on_path[s] = false;
    }
    Ok(seen)
}

fn remainder_has_perfect_matching(g: &Graph, removed: &[usize]) -> bool {
    let (rest, _) = remove_vertices(g, removed).expect("cycle vertices are in range");
    has_perfect_matching(&rest)
}

/// Every even elementary cycle `C` for which `g ∖ C` has a perfect matching.
pub fn enumerate_nice_cycles(g: &Graph, cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut even = Vec::new();
    for_each_cycle(g, cap, |c| {
        if c.len() % 2 == 0 {
            even.push(c.to_vec());
        }
    })?;
    Ok(even
        .into_par_iter()
        .filter(|c| remainder_has_perfect_matching(g, c))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PfaffianVerdict {
    /// `None` when the cycle cap was hit before the check completed.
    pub pfaffian: Option<bool>,
    pub cycles_checked: usize,
    pub violations: usize,
}

/// Checks that every nice cycle is oddly oriented.
pub fn verify_pfaffian(og: &OrientedGraph, cap: usize) -> PfaffianVerdict {
    match enumerate_nice_cycles(og.base(), cap) {
        Err(_) => PfaffianVerdict {
            pfaffian: None,
            cycles_checked: 0,
            violations: 0,
        },
        Ok(cycles) => {
            let violations = cycles
                .par_iter()
                .filter(|c| co_oriented_count(og, c, true).expect("cycle edges exist").is_multiple_of(2))
                .count();
            PfaffianVerdict {
                pfaffian: Some(violations == 0),
                cycles_checked: cycles.len(),
                violations,
            }
        }
    }
}

/// Nice cycles with their orientation parity.
pub fn oriented_nice_cycles(og: &OrientedGraph, cap: usize) -> Result<Vec<NiceCycle>> {
    enumerate_nice_cycles(og.base(), cap)?
        .into_iter()
        .map(|vertices| {
            let co_oriented = co_oriented_count(og, &vertices, true)?;
            Ok(NiceCycle {
                vertices,
                co_oriented,
            })
        })
        .collect()
}

/// Elementary paths `from .. to` whose removal leaves a graph with a
/// perfect matching, each with its co-oriented edge count.
pub fn nice_paths(og: &OrientedGraph, from: usize, to: usize, cap: usize) -> Result<Vec<(Vec<usize>, usize)>> {
    let g = og.base();
    let n = g.n();
    if from >= n || to >= n {
        return Err(Error::VertexOutOfRange { index: from.max(to), n });
    }
    fn dfs(
        g: &Graph,
        to: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        let v = *path.last().expect("non-empty path");
        if v == to {
            if out.len() == cap {
                return Err(Error::CapExceeded {
                    what: "elementary path count",
                    size: cap + 1,
                    cap,
                });
            }
            out.push(path.clone());
            return Ok(());
        }
        for &w in g.neighbors(v) {
            if !on_path[w] {
                on_path[w] = true;
                path.push(w);
                dfs(g, to, path, on_path, out, cap)?;
                path.pop();
                on_path[w] = false;
            }
        }
        Ok(())
    }
    let mut paths = Vec::new();
    let mut on_path = vec![false; n];
    on_path[from] = true;
    dfs(g, to, &mut vec![from], &mut on_path, &mut paths, cap)?;
    paths
        .into_iter()
        .filter(|p| p.len() % 2 == 0 && remainder_has_perfect_matching(g, p))
        .map(|p| {
            let c = co_oriented_count(og, &p, false)?;
            Ok((p, c))
        })
        .collect()
}

/// The six determinants attached to `H_g^e`: the full matrix `A`, `B` and
/// `B'` (row and column of `v1`, respectively `v2`, deleted), `D` (row of
/// `v1` and column of `v2` deleted), `D'` (row of `v2`, column of `v1`) and
/// `K` (rows and columns of both deleted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDeterminants {
    pub a: BigInt,
    pub b: BigInt,
    pub b_prime: BigInt,
    pub d: BigInt,
    pub d_prime: BigInt,
    pub k: BigInt,
}

/// `dense_limit` bounds the order up to which the non-principal minors `D`
/// and `D'` are computed; above it they are reported as zero and the
/// returned flag is false.
pub fn block_determinants(og: &OrientedGraph, dense_limit: usize) -> Result<(BlockDeterminants, bool)> {
    let g = og.base();
    let hub = |r| {
        g.hub(r)
            .ok_or_else(|| Error::InvalidGraph(format!("missing hub {}", HubRole::name(r))))
    };
    let (v1, v2) = (hub(HubRole::V1)?, hub(HubRole::V2)?);
    let a = skew_adjacency(og);
    let principal = |drop: &[usize]| -> Result<BigInt> { skew_determinant(&a.principal_submatrix(drop)?) };
    let dense_ok = a.order() <= dense_limit;
    let (d, d_prime) = if dense_ok {
        (
            determinant_exact(&a.submatrix(&[v1], &[v2])?)?,
            determinant_exact(&a.submatrix(&[v2], &[v1])?)?,
        )
    } else {
        (BigInt::zero(), BigInt::zero())
    };
    Ok((
        BlockDeterminants {
            a: principal(&[])?,
            b: principal(&[v1])?,
            b_prime: principal(&[v2])?,
            d,
            d_prime,
            k: principal(&[v1, v2])?,
        },
        dense_ok,
    ))
}

/// One identity checked numerically, with both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

fn identity(name: &str, lhs: BigInt, rhs: BigInt) -> IdentityCheck {
    IdentityCheck {
        name: name.to_string(),
        holds: lhs == rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

/// Default order limit for dense elimination of the `D`, `D'` minors.
pub const DEFAULT_DENSE_LIMIT: usize = 700;

/// Checks the block identities linking generations `g` and `g + 1`:
/// `det B = det B' = 0`, `det D' = −det D`, `det K_{g+1} = det K_g³ det A_g`,
/// `det A_{g+1} = 4 det A_g² det K_g²`, and `det A_g = 4^((4^g+6g−1)/9)`.
pub fn verify_determinant_lemmas(gen: &Generator, g: u32, dense_limit: usize) -> Result<Vec<IdentityCheck>> {
    let (cur, dense_ok) = block_determinants(&gen.nonfractal_oriented(g)?, dense_limit)?;
    let next_og = gen.nonfractal_oriented(g + 1)?;
    let next_a = skew_adjacency(&next_og);
    let v = |r| next_og.base().hub(r).expect("hubs present");
    let next_k = skew_determinant(&next_a.principal_submatrix(&[v(HubRole::V1), v(HubRole::V2)])?)?;
    let next_det_a = skew_determinant(&next_a)?;
    let exponent = crate::analytic::nonfractal_pm_exponent(g)?
        .to_usize()
        .ok_or_else(|| Error::Domain("exponent too large".into()))?;
    let mut checks = vec![
        identity("det B = 0", cur.b.clone(), BigInt::zero()),
        identity("det B' = 0", cur.b_prime.clone(), BigInt::zero()),
    ];
    if dense_ok {
        checks.push(identity("det D' = -det D", cur.d_prime.clone(), -cur.d.clone()));
    }
    checks.extend([
        identity(
            "det K(g+1) = det K(g)^3 det A(g)",
            next_k,
            cur.k.pow(3) * &cur.a,
        ),
        identity(
            "det A(g+1) = 4 det A(g)^2 det K(g)^2",
            next_det_a,
            cur.a.pow(2) * cur.k.pow(2) * 4,
        ),
        identity("det A(g) = 4^((4^g+6g-1)/9)", cur.a.clone(), BigInt::one() << (2 * exponent)),
    ]);
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::nonfractal_pm_count;
    use crate::matching::{count_perfect_matchings_bruteforce, DEFAULT_ENUMERATION_CAP};
    use proptest::prelude::*;

    fn gen() -> Generator {
        Generator::default()
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn cyclic_c4() -> OrientedGraph {
        OrientedGraph::from_arcs(Graph::cycle(4), &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn skew_adjacency_examples() {
        let single = OrientedGraph::from_arcs(Graph::path(2), &[(0, 1)]).unwrap();
        assert_eq!(
            skew_adjacency(&single).to_dense(),
            IntMatrix::from_rows(&[vec![0, 1], vec![-1, 0]]).unwrap()
        );
        let h1 = skew_adjacency(&gen().nonfractal_oriented(1).unwrap());
        assert_eq!(h1.get(0, 1), 1);
        assert_eq!(h1.get(0, 2), 1);
        assert_eq!(h1.get(3, 1), 1);
        assert_eq!(h1.get(1, 3), -1);
        assert!(h1.to_dense().is_antisymmetric());
    }

    #[test]
    fn hub_block_of_second_generation() {
        // the hub block of A(H_g^e), rows and columns ordered v1..v4, repeats A(H_1^e)
        let og = gen().nonfractal_oriented(2).unwrap();
        let a = skew_adjacency(&og);
        let h = |r| og.base().hub(r).unwrap();
        let hubs = [h(HubRole::V1), h(HubRole::V2), h(HubRole::V3), h(HubRole::V4)];
        let block: Vec<Vec<i64>> = hubs.iter().map(|&i| hubs.iter().map(|&j| a.get(i, j)).collect()).collect();
        assert_eq!(
            block,
            vec![vec![0, 1, 1, 0], vec![-1, 0, 0, -1], vec![-1, 0, 0, 1], vec![0, 1, -1, 0]]
        );
    }

    #[test]
    fn small_determinants() {
        assert_eq!(determinant_exact(&IntMatrix::identity(5)).unwrap(), big(1));
        let a1 = skew_adjacency(&gen().nonfractal_oriented(1).unwrap());
        assert_eq!(determinant_exact(&a1.to_dense()).unwrap(), big(4));
        assert_eq!(skew_determinant(&a1).unwrap(), big(4));
        let a2 = skew_adjacency(&gen().nonfractal_oriented(2).unwrap());
        assert_eq!(determinant_exact(&a2.to_dense()).unwrap(), big(64));
        assert_eq!(skew_determinant(&a2).unwrap(), big(64));
        assert!(determinant_exact(&IntMatrix::zeros(2, 3)).is_err());
        assert_eq!(determinant_exact(&IntMatrix::zeros(0, 0)).unwrap(), big(1));
    }

    #[test]
    fn first_generation_submatrices() {
        let og = gen().nonfractal_oriented(1).unwrap();
        let (d, _) = block_determinants(&og, DEFAULT_DENSE_LIMIT).unwrap();
        assert_eq!(d.a, big(4));
        assert_eq!(d.b, big(0));
        assert_eq!(d.b_prime, big(0));
        assert_eq!(d.d_prime, -d.d.clone());
        assert_eq!(d.d, big(-2));
        // K_1 is the 2x2 block on {v3, v4}, which are not adjacent in H_1
        assert_eq!(d.k, big(1));
        let a = skew_adjacency(&og);
        let b1 = a.submatrix(&[0], &[0]).unwrap();
        assert_eq!((b1.rows(), b1.cols()), (3, 3));
        assert!(a.submatrix(&[9], &[]).is_err());
    }

    #[test]
    fn determinant_lemma_chain() {
        for g in 1..=3 {
            let checks = verify_determinant_lemmas(&gen(), g, DEFAULT_DENSE_LIMIT).unwrap();
            assert_eq!(checks.len(), 6);
            for c in &checks {
                assert!(c.holds, "g={g}: {} ({} vs {})", c.name, c.lhs, c.rhs);
            }
        }
        let og = gen().nonfractal_oriented(2).unwrap();
        assert_eq!(block_determinants(&og, DEFAULT_DENSE_LIMIT).unwrap().0.k, big(4));
        let og3 = gen().nonfractal_oriented(3).unwrap();
        assert_eq!(skew_determinant(&skew_adjacency(&og3)).unwrap(), BigInt::one() << 18);
    }

    #[test]
    fn perfect_matchings_from_determinants() {
        for g in 1..=3 {
            let og = gen().nonfractal_oriented(g).unwrap();
            let expected = nonfractal_pm_count(g).unwrap();
            assert_eq!(pm_count_via_determinant(&og).unwrap(), expected);
            assert_eq!(pm_count_via_dense_determinant(&og).unwrap(), expected);
            let brute = count_perfect_matchings_bruteforce(og.base(), DEFAULT_ENUMERATION_CAP).unwrap();
            assert_eq!(brute.count, expected);
        }
    }

    #[test]
    fn cyclic_square_is_not_pfaffian() {
        let og = cyclic_c4();
        assert_eq!(skew_determinant(&skew_adjacency(&og)).unwrap(), big(0));
        assert_eq!(pm_count_via_determinant(&og).unwrap(), big(0));
        let v = verify_pfaffian(&og, DEFAULT_CYCLE_CAP);
        assert_eq!((v.pfaffian, v.cycles_checked, v.violations), (Some(false), 1, 1));
    }

    #[test]
    fn non_square_determinant_is_an_error() {
        assert!(matches!(exact_sqrt(&big(8)), Err(Error::NotPerfectSquare(_))));
        assert_eq!(exact_sqrt(&big(64)).unwrap(), big(8));
    }

    #[test]
    fn nice_cycles_of_small_graphs() {
        let c4 = enumerate_nice_cycles(&Graph::cycle(4), DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(c4, vec![vec![0, 1, 2, 3]]);
        let h1 = verify_pfaffian(&gen().nonfractal_oriented(1).unwrap(), DEFAULT_CYCLE_CAP);
        assert_eq!((h1.pfaffian, h1.cycles_checked), (Some(true), 1));
        let h2 = oriented_nice_cycles(&gen().nonfractal_oriented(2).unwrap(), DEFAULT_CYCLE_CAP).unwrap();
        assert!(!h2.is_empty());
        assert!(h2.iter().all(|c| c.len() % 2 == 0 && c.is_oddly_oriented()));
        let f2 = enumerate_nice_cycles(&gen().fractal(2).unwrap(), DEFAULT_CYCLE_CAP).unwrap();
        assert!(f2.iter().all(|c| c.len() % 2 == 0));
    }

    #[test]
    fn cycle_counts_and_cap() {
        let mut k4 = 0;
        for_each_cycle(&Graph::complete(4), 100, |_| k4 += 1).unwrap();
        assert_eq!(k4, 7);
        let h2 = for_each_cycle(&gen().nonfractal(2).unwrap(), 100, |_| {}).unwrap();
        assert_eq!(h2, 20);
        assert!(for_each_cycle(&gen().nonfractal(3).unwrap(), 100, |_| {}).is_err());
        let capped = verify_pfaffian(&gen().nonfractal_oriented(3).unwrap(), 100);
        assert_eq!(capped.pfaffian, None);
    }

    #[test]
    fn parity_does_not_depend_on_direction() {
        let og = gen().nonfractal_oriented(2).unwrap();
        for c in oriented_nice_cycles(&og, DEFAULT_CYCLE_CAP).unwrap() {
            let mut rev = c.vertices.clone();
            rev.reverse();
            let back = co_oriented_count(&og, &rev, true).unwrap();
            assert_eq!(back + c.co_oriented, c.len());
            assert_eq!(back % 2, c.co_oriented % 2);
        }
    }

    #[test]
    fn nice_hub_paths_are_oddly_oriented() {
        for g in 1..=2 {
            let og = gen().nonfractal_oriented(g).unwrap();
            let h = |r| og.base().hub(r).unwrap();
            let paths = nice_paths(&og, h(HubRole::V1), h(HubRole::V2), 100_000).unwrap();
            assert!(paths.iter().any(|(p, _)| p.len() == 2));
            for (p, c) in paths {
                assert_eq!(c % 2, 1, "{p:?}");
            }
        }
    }

    #[test]
    fn modular_checks_agree() {
        let primes = large_primes(3);
        assert!(primes.iter().all(|&p| is_prime_u64(p) && p < 1 << 62));
        assert!(primes.windows(2).all(|w| w[0] > w[1]));
        assert!(!is_prime_u64(1 << 61) && is_prime_u64((1 << 61) - 1));
        let og = gen().nonfractal_oriented(3).unwrap();
        let a = skew_adjacency(&og);
        let det = skew_determinant(&a).unwrap();
        check_skew_residues(&a, &det, 4).unwrap();
        check_dense_residues(&a.to_dense(), &det, 2).unwrap();
        assert!(check_skew_residues(&a, &(det + 1), 2).is_err());
    }

    fn arb_square(max: usize) -> impl Strategy<Value = IntMatrix> {
        (0..=max).prop_flat_map(|n| {
            proptest::collection::vec(-3i64..=3, n * n).prop_map(move |v| {
                IntMatrix::from_vec(n, n, v.into_iter().map(BigInt::from).collect())
            })
        })
    }

    fn arb_skew(max: usize) -> impl Strategy<Value = SkewMatrix> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(-2i64..=2, n * (n - 1) / 2).prop_map(move |v| {
                let mut it = v.into_iter();
                let entries: Vec<(usize, usize, i64)> = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .map(|(i, j)| (i, j, it.next().unwrap()))
                    .collect();
                SkewMatrix::from_upper(n, entries).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor_expansion(m in arb_square(6)) {
            let det = determinant_exact(&m).unwrap();
            prop_assert_eq!(&det, &determinant_cofactor(&m).unwrap());
            let p = large_primes(1)[0];
            prop_assert_eq!(determinant_mod_p(&m, p).unwrap(), residue(&det, p));
        }

        #[test]
        fn skew_elimination_matches_bareiss(m in arb_skew(9)) {
            let dense = determinant_exact(&m.to_dense()).unwrap();
            prop_assert_eq!(&skew_determinant(&m).unwrap(), &dense);
            let p = large_primes(1)[0];
            prop_assert_eq!(skew_determinant_mod_p(&m, p), residue(&dense, p));
            if m.order() % 2 == 1 {
                prop_assert!(dense.is_zero());
            }
        }

        #[test]
        fn principal_submatrices_stay_antisymmetric(m in arb_skew(8), drop in proptest::collection::vec(0usize..8, 0..3)) {
            let drop: Vec<usize> = drop.into_iter().filter(|&x| x < m.order()).collect();
            let sub = m.principal_submatrix(&drop).unwrap();
            prop_assert!(sub.to_dense().is_antisymmetric());
        }
    }
}
