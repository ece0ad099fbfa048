//! Exact arithmetic in `Z[beta]`, `Z[pi]` and `Z[pi, beta]`.
//!
//! `pi` is a root of `X^d - p` and `beta` a root of a monic integer polynomial
//! `P` of degree `n` whose reduction mod `p` is primitive. Elements of
//! `Z[pi, beta]` are stored as `d x n` integer grids over the basis
//! `{pi^k beta^j : 0 <= k < d, 0 <= j < n}`.
//!
//! Multiplication matrices order that basis with `beta` as the outer index:
//! the basis vector `pi^k beta^j` sits at position [`basis_index`]`(d, k, j)
//! = j * d + k`. For `n = d = 2` this gives the ordering
//! `1, pi, beta, pi*beta`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::{self, JsonInt};
use crate::matrix::{det_int, IntMatrix, Matrix};
use crate::numtheory::{self, NumberTheoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} is too large (must fit in a signed 64-bit integer)")]
    PrimeTooLarge(u64),
    #[error("polynomial {0:?} is not primitive modulo p")]
    NotPrimitivePolynomial(Vec<i64>),
    #[error("polynomial has degree zero")]
    DegreeZero,
    #[error("polynomial {0:?} is not monic")]
    NotMonic(Vec<i64>),
    #[error("ramification index d must be at least 1")]
    ZeroRamification,
    #[error("cannot decide primitivity: {0}")]
    PrimitivityBudget(NumberTheoryError),
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Position of `pi^k beta^j` in multiplication matrices.
#[inline]
pub fn basis_index(d: usize, k: usize, j: usize) -> usize {
    j * d + k
}

/// The ring tower parameters `(p, n, d, P)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroundParamsWire", into = "GroundParamsWire")]
pub struct GroundParams {
    p: u64,
    n: usize,
    d: usize,
    poly: Vec<i64>,
    /// `beta_reduction[j - n][t]` is `b_t^j` with `beta^j = sum_t b_t^j beta^t`.
    beta_reduction: Vec<Vec<BigInt>>,
}

#[derive(Serialize, Deserialize)]
struct GroundParamsWire {
    p: u64,
    d: usize,
    #[serde(rename = "P")]
    poly: Vec<i64>,
}

impl TryFrom<GroundParamsWire> for GroundParams {
    type Error = AlgebraError;

    fn try_from(w: GroundParamsWire) -> Result<Self, AlgebraError> {
        GroundParams::new(w.p, w.d, &w.poly)
    }
}

impl From<GroundParams> for GroundParamsWire {
    fn from(g: GroundParams) -> Self {
        GroundParamsWire {
            p: g.p,
            d: g.d,
            poly: g.poly,
        }
    }
}

impl GroundParams {
    /// Validates `(p, d, P)` and precomputes the `beta` reduction table.
    ///
    /// `poly` holds the coefficients of `P` from the constant term up, ending
    /// in the leading 1. `P mod p` must be primitive, which is checked by
    /// computing the multiplicative order of `X` in `F_p[X]/(P)`; an element
    /// of order `p^n - 1` can only exist when the quotient is a field, so this
    /// also establishes irreducibility.
    pub fn new(p: u64, d: usize, poly: &[i64]) -> Result<Self, AlgebraError> {
        if d == 0 {
            return Err(AlgebraError::ZeroRamification);
        }
        if p > i64::MAX as u64 {
            return Err(AlgebraError::PrimeTooLarge(p));
        }
        if !numtheory::is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        let mut trimmed = poly.to_vec();
        while trimmed.len() > 1 && trimmed.last() == Some(&0) {
            trimmed.pop();
        }
        if trimmed.len() < 2 {
            return Err(AlgebraError::DegreeZero);
        }
        if *trimmed.last().unwrap() != 1 {
            return Err(AlgebraError::NotMonic(poly.to_vec()));
        }
        let n = trimmed.len() - 1;
        if !is_primitive_mod_p(&trimmed, p)? {
            return Err(AlgebraError::NotPrimitivePolynomial(trimmed));
        }
        let beta_reduction = beta_power_table(&trimmed);
        Ok(GroundParams {
            p,
            n,
            d,
            poly: trimmed,
            beta_reduction,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Rank of `Z[pi, beta]` over `Z`.
    pub fn rank(&self) -> usize {
        self.n * self.d
    }

    pub fn poly(&self) -> &[i64] {
        &self.poly
    }

    /// `b_t^j` for `n <= j <= 2n - 2`; `None` outside that range.
    pub fn beta_reduction(&self, j: usize, t: usize) -> Option<&BigInt> {
        if j < self.n || t >= self.n {
            return None;
        }
        self.beta_reduction.get(j - self.n).map(|row| &row[t])
    }

    /// The whole reduction table, one row per power `beta^n ..= beta^(2n-2)`.
    pub fn beta_reduction_table(&self) -> &[Vec<BigInt>] {
        &self.beta_reduction
    }

    /// Exact product in `Z[pi, beta]`.
    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.check_shape(a);
        self.check_shape(b);
        let (n, d) = (self.n, self.d);
        let wide_n = 2 * n - 1;
        let mut acc = vec![BigInt::zero(); (2 * d - 1) * wide_n];
        for k1 in 0..d {
            for j1 in 0..n {
                let x = a.get(k1, j1);
                if x.is_zero() {
                    continue;
                }
                for k2 in 0..d {
                    for j2 in 0..n {
                        let y = b.get(k2, j2);
                        if !y.is_zero() {
                            acc[(k1 + k2) * wide_n + j1 + j2] += x * y;
                        }
                    }
                }
            }
        }
        // beta^j for j >= n, using the precomputed table
        for k in 0..2 * d - 1 {
            for j in n..wide_n {
                let c = std::mem::take(&mut acc[k * wide_n + j]);
                if c.is_zero() {
                    continue;
                }
                for t in 0..n {
                    acc[k * wide_n + t] += &c * &self.beta_reduction[j - n][t];
                }
            }
        }
        // pi^d = p
        let p = self.p_big();
        for k in (d..2 * d - 1).rev() {
            for j in 0..n {
                let c = std::mem::take(&mut acc[k * wide_n + j]);
                acc[(k - d) * wide_n + j] += c * &p;
            }
        }
        let mut out = RingElement::zero(d, n);
        for k in 0..d {
            for j in 0..n {
                *out.get_mut(k, j) = std::mem::take(&mut acc[k * wide_n + j]);
            }
        }
        out
    }

    /// `pi^e` as a ring element: `p^(e / d) * pi^(e mod d)`.
    pub fn pi_power(&self, e: usize) -> RingElement {
        let mut out = RingElement::zero(self.d, self.n);
        *out.get_mut(e % self.d, 0) = num_traits::pow(self.p_big(), e / self.d);
        out
    }

    /// Reduction modulo `pi`: the `pi^0` row taken to least non-negative
    /// residues mod `p`.
    pub fn mod_p(&self, a: &RingElement) -> BetaPoly {
        self.check_shape(a);
        let p = self.p_big();
        BetaPoly::new(
            (0..self.n)
                .map(|j| a.get(0, j).mod_floor(&p).to_i64().expect("residue below p fits i64"))
                .collect(),
        )
    }

    /// `nd x nd` integer matrix of multiplication by `a`. Column
    /// `basis_index(k, j)` is the coordinate vector of `a * pi^k beta^j`.
    pub fn int_mult_matrix(&self, a: &RingElement) -> IntMatrix {
        let (n, d) = (self.n, self.d);
        let size = n * d;
        let mut m = Matrix::from_fn(size, size, |_, _| BigInt::zero());
        for k in 0..d {
            for j in 0..n {
                let col = basis_index(d, k, j);
                let image = self.mul(a, &RingElement::monomial(d, n, k, j));
                for k2 in 0..d {
                    for j2 in 0..n {
                        m[(basis_index(d, k2, j2), col)] = image.get(k2, j2).clone();
                    }
                }
            }
        }
        m
    }

    /// `n x n` matrix over `Z[pi]` of multiplication by `a` in the basis
    /// `1, beta, ..., beta^(n-1)`. Column `j` holds `a * beta^j`.
    pub fn zpi_mult_matrix(&self, a: &RingElement) -> Matrix<ZPiElement> {
        let (n, d) = (self.n, self.d);
        let images: Vec<RingElement> = (0..n)
            .map(|j| self.mul(a, &RingElement::monomial(d, n, 0, j)))
            .collect();
        Matrix::from_fn(n, n, |t, j| {
            ZPiElement::new((0..d).map(|k| images[j].get(k, t).clone()).collect())
        })
    }

    /// Determinant of a square matrix over `Z[pi]`.
    ///
    /// Division-free cofactor expansion along the first row, with minors
    /// memoized by their column set: `O(2^n * n)` ring products.
    pub fn det_zpi(&self, m: &Matrix<ZPiElement>) -> Result<ZPiElement, AlgebraError> {
        if !m.is_square() {
            return Err(AlgebraError::NonSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let size = m.rows();
        for i in 0..size {
            for j in 0..size {
                if m[(i, j)].degree_count() != self.d {
                    return Err(AlgebraError::DimensionMismatch {
                        expected: self.d,
                        got: m[(i, j)].degree_count(),
                    });
                }
            }
        }
        let mut memo = HashMap::new();
        Ok(self.det_zpi_minor(m, 0, (1u64 << size) - 1, &mut memo))
    }

    // Determinant of rows `row..` restricted to the columns set in `cols`.
    fn det_zpi_minor(
        &self,
        m: &Matrix<ZPiElement>,
        row: usize,
        cols: u64,
        memo: &mut HashMap<u64, ZPiElement>,
    ) -> ZPiElement {
        if cols == 0 {
            return ZPiElement::one(self.d);
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = ZPiElement::zero(self.d);
        let mut sign_positive = true;
        for c in 0..m.cols() {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = &m[(row, c)];
            if !entry.is_zero() {
                let sub = self.det_zpi_minor(m, row + 1, cols & !(1 << c), memo);
                let term = entry.mul(&sub, self.p);
                acc = if sign_positive { acc.add(&term) } else { acc.sub(&term) };
            }
            sign_positive = !sign_positive;
        }
        memo.insert(cols, acc.clone());
        acc
    }

    /// The `d x d` matrix of multiplication by `x` on `Z[pi]` in the basis
    /// `1, pi, ..., pi^(d-1)`: entry `(i, c)` is `x_(i-c)` on and below the
    /// diagonal and `p * x_(i-c+d)` above it.
    pub fn zpi_norm_matrix(&self, x: &ZPiElement) -> IntMatrix {
        let d = self.d;
        let p = self.p_big();
        Matrix::from_fn(d, d, |i, c| {
            if i >= c {
                x.coords[i - c].clone()
            } else {
                &p * &x.coords[i + d - c]
            }
        })
    }

    /// Norm from `Q(pi)` down to `Q`.
    pub fn norm_zpi(&self, x: &ZPiElement) -> BigInt {
        assert_eq!(x.degree_count(), self.d, "element does not belong to Z[pi] of this tower");
        det_int(&self.zpi_norm_matrix(x)).expect("norm matrix is square")
    }

    fn check_shape(&self, a: &RingElement) {
        assert!(
            a.d == self.d && a.n == self.n,
            "ring element is {}x{}, params expect {}x{}",
            a.d,
            a.n,
            self.d,
            self.n
        );
    }
}

/// `beta^j` for `j = n ..= 2n-2` reduced to degree below `n`, over the integers.
fn beta_power_table(poly: &[i64]) -> Vec<Vec<BigInt>> {
    let n = poly.len() - 1;
    let mut table = Vec::new();
    if n < 2 {
        return table;
    }
    // beta^n = -sum_t c_t beta^t
    let mut current: Vec<BigInt> = poly[..n].iter().map(|&c| BigInt::from(-c)).collect();
    table.push(current.clone());
    for _ in n + 1..=2 * n - 2 {
        let top = current[n - 1].clone();
        let mut next = vec![BigInt::zero(); n];
        for t in (1..n).rev() {
            next[t] = current[t - 1].clone();
        }
        for t in 0..n {
            next[t] -= &top * poly[t];
        }
        current = next;
        table.push(current.clone());
    }
    table
}

/// Whether `X` has order exactly `p^n - 1` in `F_p[X]/(P)`.
fn is_primitive_mod_p(poly: &[i64], p: u64) -> Result<bool, AlgebraError> {
    let n = (poly.len() - 1) as u32;
    let reduced: Vec<u64> = poly
        .iter()
        .map(|&c| (c as i128).rem_euclid(p as i128) as u64)
        .collect();
    let group_order = p
        .checked_pow(n)
        .map(|v| v - 1)
        .ok_or(AlgebraError::PrimitivityBudget(NumberTheoryError::FactorizationBudget(u64::MAX)))?;
    let ring = PolyModP { modulus: reduced, p };
    let x = ring.x();
    if !ring.is_one(&ring.pow(&x, group_order)) {
        return Ok(false);
    }
    let factors = numtheory::factorize(group_order).map_err(AlgebraError::PrimitivityBudget)?;
    for (q, _) in factors {
        if ring.is_one(&ring.pow(&x, group_order / q)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `F_p[X]` modulo a monic polynomial.
struct PolyModP {
    modulus: Vec<u64>,
    p: u64,
}

impl PolyModP {
    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn x(&self) -> Vec<u64> {
        let mut v = vec![0; self.degree()];
        if self.degree() == 1 {
            // X = -c0 in F_p[X]/(X + c0)
            v[0] = (self.p - self.modulus[0] % self.p) % self.p;
        } else {
            v[1] = 1;
        }
        v
    }

    fn is_one(&self, a: &[u64]) -> bool {
        a[0] == 1 % self.p && a[1..].iter().all(|&c| c == 0)
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.degree();
        let p = self.p;
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + numtheory::mul_mod(x, y, p)) % p;
            }
        }
        for top in (n..2 * n - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for t in 0..n {
                let sub = numtheory::mul_mod(c, self.modulus[t], p);
                let slot = &mut prod[top - n + t];
                *slot = (*slot + p - sub) % p;
            }
        }
        prod.truncate(n);
        prod
    }

    fn pow(&self, base: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = vec![0u64; self.degree()];
        acc[0] = 1 % self.p;
        let mut b = base.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }
}

/// Element of `Z[beta]`: `sum_j coords[j] beta^j`. Cell contents and
/// connection coefficients live here.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BetaPoly {
    coords: Vec<i64>,
}

impl BetaPoly {
    pub fn new(coords: Vec<i64>) -> Self {
        BetaPoly { coords }
    }

    pub fn zero(n: usize) -> Self {
        BetaPoly { coords: vec![0; n] }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Embeds into `Z[pi, beta]` on the `pi^0` row.
    pub fn lift(&self, d: usize) -> RingElement {
        let n = self.coords.len();
        let mut out = RingElement::zero(d, n);
        for (j, &c) in self.coords.iter().enumerate() {
            *out.get_mut(0, j) = BigInt::from(c);
        }
        out
    }
}

impl fmt::Display for BetaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| match j {
                0 => c.to_string(),
                1 => format!("{c}b"),
                _ => format!("{c}b^{j}"),
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// Element of `Z[pi, beta]` as a `d x n` integer grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    d: usize,
    n: usize,
    coords: Vec<BigInt>,
}

impl RingElement {
    pub fn zero(d: usize, n: usize) -> Self {
        RingElement {
            d,
            n,
            coords: vec![BigInt::zero(); d * n],
        }
    }

    pub fn one(d: usize, n: usize) -> Self {
        Self::from_int(d, n, BigInt::one())
    }

    pub fn from_int(d: usize, n: usize, v: BigInt) -> Self {
        let mut out = Self::zero(d, n);
        out.coords[0] = v;
        out
    }

    /// `pi^k beta^j`.
    pub fn monomial(d: usize, n: usize, k: usize, j: usize) -> Self {
        let mut out = Self::zero(d, n);
        *out.get_mut(k, j) = BigInt::one();
        out
    }

    /// Builds from `d` rows of `n` coordinates; row `k` multiplies `pi^k`.
    pub fn from_grid(grid: Vec<Vec<BigInt>>) -> Result<Self, AlgebraError> {
        let d = grid.len();
        let n = grid.first().map_or(0, Vec::len);
        if d == 0 || n == 0 {
            return Err(AlgebraError::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(bad) = grid.iter().find(|row| row.len() != n) {
            return Err(AlgebraError::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(RingElement {
            d,
            n,
            coords: grid.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_grid(grid: &[&[i64]]) -> Result<Self, AlgebraError> {
        Self::from_grid(grid.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, j: usize) -> &BigInt {
        assert!(k < self.d && j < self.n, "coordinate ({k}, {j}) out of range");
        &self.coords[k * self.n + j]
    }

    pub fn get_mut(&mut self, k: usize, j: usize) -> &mut BigInt {
        assert!(k < self.d && j < self.n, "coordinate ({k}, {j}) out of range");
        &mut self.coords[k * self.n + j]
    }

    /// The `n` coordinates multiplying `pi^k`.
    pub fn pi_row(&self, k: usize) -> &[BigInt] {
        &self.coords[k * self.n..(k + 1) * self.n]
    }

    pub fn to_grid(&self) -> Vec<Vec<BigInt>> {
        (0..self.d).map(|k| self.pi_row(k).to_vec()).collect()
    }

    /// Coordinates in multiplication-matrix order (see [`basis_index`]).
    pub fn to_basis_vector(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.d * self.n];
        for k in 0..self.d {
            for j in 0..self.n {
                v[basis_index(self.d, k, j)] = self.get(k, j).clone();
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn max_abs(&self) -> BigInt {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> RingElement {
        RingElement {
            d: self.d,
            n: self.n,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    fn zip(&self, other: &RingElement, f: impl Fn(&BigInt, &BigInt) -> BigInt) -> RingElement {
        assert!(self.d == other.d && self.n == other.n, "shape mismatch");
        RingElement {
            d: self.d,
            n: self.n,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl Serialize for RingElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let grid: Vec<Vec<JsonInt>> = (0..self.d)
            .map(|k| self.pi_row(k).iter().map(json::wrap).collect())
            .collect();
        grid.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingElement {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let grid: Vec<Vec<JsonInt>> = Vec::deserialize(de)?;
        RingElement::from_grid(grid.into_iter().map(|r| r.into_iter().map(|v| v.0).collect()).collect())
            .map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for k in 0..self.d {
            for j in 0..self.n {
                let c = self.get(k, j);
                if c.is_zero() {
                    continue;
                }
                let mut t = c.to_string();
                match k {
                    0 => {}
                    1 => t.push_str("pi"),
                    _ => t.push_str(&format!("pi^{k}")),
                }
                match j {
                    0 => {}
                    1 => t.push('b'),
                    _ => t.push_str(&format!("b^{j}")),
                }
                terms.push(t);
            }
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// Element of `Z[pi]`: `sum_k coords[k] pi^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZPiElement {
    coords: Vec<BigInt>,
}

impl ZPiElement {
    pub fn new(coords: Vec<BigInt>) -> Self {
        assert!(!coords.is_empty(), "Z[pi] element needs at least one coordinate");
        ZPiElement { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(d: usize) -> Self {
        ZPiElement {
            coords: vec![BigInt::zero(); d],
        }
    }

    pub fn one(d: usize) -> Self {
        let mut z = Self::zero(d);
        z.coords[0] = BigInt::one();
        z
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn degree_count(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &ZPiElement) -> ZPiElement {
        assert_eq!(self.coords.len(), other.coords.len());
        ZPiElement {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &ZPiElement) -> ZPiElement {
        assert_eq!(self.coords.len(), other.coords.len());
        ZPiElement {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        }
    }

    /// Product with `pi^d = p`.
    pub fn mul(&self, other: &ZPiElement, p: u64) -> ZPiElement {
        let d = self.coords.len();
        assert_eq!(d, other.coords.len());
        let p = BigInt::from(p);
        let mut out = vec![BigInt::zero(); d];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                let prod = a * b;
                if i + j < d {
                    out[i + j] += prod;
                } else {
                    out[i + j - d] += prod * &p;
                }
            }
        }
        ZPiElement { coords: out }
    }
}

impl Serialize for ZPiElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<JsonInt> = self.coords.iter().map(json::wrap).collect();
        v.serialize(s)
    }
}

impl Serialize for Matrix<ZPiElement> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl fmt::Display for ZPiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => c.to_string(),
                1 => format!("{c}pi"),
                _ => format!("{c}pi^{k}"),
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}
