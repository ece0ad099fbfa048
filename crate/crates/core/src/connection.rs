//! Connection integers and the matrices of multiplication by `-q`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, BetaPoly, GroundParams, RingElement, ZPiElement};
use crate::matrix::{det_int, IntMatrix, Matrix};
use crate::register::{RegisterError, RegisterSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectionError {
    #[error("connection integer {0} is not congruent to -1 modulo pi")]
    NotCongruentMinusOne(RingElement),
    #[error("connection integer has shape {got_d}x{got_n}, expected {d}x{n}")]
    Shape { d: usize, n: usize, got_d: usize, got_n: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Register(#[from] RegisterError),
}

/// Everything derived from a connection integer `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectionAnalysis {
    pub q: RingElement,
    /// `q + 1` as a `d x n` grid: entry `(k, j)` is `q~_(k,j)`.
    pub q_tilde: RingElement,
    /// `q~_j = sum_k q~_(k,j) pi^k`, one per `beta` power.
    pub q_tilde_pi: Vec<ZPiElement>,
    /// Multiplication by `-q` over `Z`, `nd x nd`.
    #[serde(rename = "M_prime")]
    pub m_prime: IntMatrix,
    /// Multiplication by `-q` over `Z[pi]`, `n x n`.
    #[serde(rename = "M")]
    pub m: Matrix<ZPiElement>,
    #[serde(rename = "N_pi", serialize_with = "ser_zpi")]
    pub n_pi: ZPiElement,
    #[serde(rename = "N_prime", serialize_with = "crate::json::serialize_big")]
    pub n_prime: BigInt,
    #[serde(rename = "N_prime_abs", serialize_with = "crate::json::serialize_big")]
    pub n_prime_abs: BigInt,
}

fn ser_zpi<S: serde::Serializer>(v: &ZPiElement, s: S) -> Result<S::Ok, S::Error> {
    v.serialize(s)
}

impl ConnectionAnalysis {
    /// `|N'|` as a machine integer, when it fits.
    pub fn modulus(&self) -> Option<u64> {
        self.n_prime_abs.to_u64()
    }
}

/// `q~_(k,j) = sum_{i : 1 <= d*i + k <= r} q_j^(d*i + k) p^i`.
pub fn q_tilde_grid(spec: &RegisterSpec) -> RingElement {
    let g = spec.ground();
    let (d, n) = (g.d(), g.n());
    let p = g.p_big();
    let mut grid = RingElement::zero(d, n);
    for idx in 1..=spec.len() {
        let (i, k) = (idx / d, idx % d);
        let weight = num_traits::pow(p.clone(), i);
        for (j, &c) in spec.coeff(idx).coords().iter().enumerate() {
            *grid.get_mut(k, j) += &weight * c;
        }
    }
    grid
}

/// `q = -1 + sum_i q_i pi^i`.
pub fn connection_integer(spec: &RegisterSpec) -> RingElement {
    let mut q = q_tilde_grid(spec);
    *q.get_mut(0, 0) -= 1;
    q
}

pub fn analyze(spec: &RegisterSpec) -> ConnectionAnalysis {
    analyze_connection(&connection_integer(spec), spec.ground()).expect("q has the ground shape")
}

/// Analysis of an arbitrary element `q`; the congruence `q = -1 mod pi` is not
/// required here.
pub fn analyze_connection(q: &RingElement, g: &GroundParams) -> Result<ConnectionAnalysis, ConnectionError> {
    check_shape(q, g)?;
    let (d, n) = (g.d(), g.n());
    let mut q_tilde = q.clone();
    *q_tilde.get_mut(0, 0) += 1;
    let q_tilde_pi = (0..n)
        .map(|j| ZPiElement::new((0..d).map(|k| q_tilde.get(k, j).clone()).collect()))
        .collect();
    let minus_q = q.neg();
    let m_prime = g.int_mult_matrix(&minus_q);
    let m = g.zpi_mult_matrix(&minus_q);
    let n_pi = g.det_zpi(&m)?;
    let n_prime = det_int(&m_prime)?;
    let n_prime_abs = n_prime.abs();
    Ok(ConnectionAnalysis {
        q: q.clone(),
        q_tilde,
        q_tilde_pi,
        m_prime,
        m,
        n_pi,
        n_prime,
        n_prime_abs,
    })
}

/// `q = -1 + sum q~_(k,j) pi^k beta^j` from a `d x n` grid of `q~` values.
pub fn connection_from_grid(grid: &RingElement) -> RingElement {
    let mut q = grid.clone();
    *q.get_mut(0, 0) -= 1;
    q
}

/// The `4 x 4` matrix of multiplication by `-q` for `p = n = d = 2`,
/// `beta^2 = beta + 1`, written out in the arguments
/// `(x, y, z, t) = (q~_00, q~_10, q~_01, q~_11)`.
pub fn specialized_mprime_2_2(x: i64, y: i64, z: i64, t: i64) -> IntMatrix {
    IntMatrix::from_i64_rows(&[
        &[1 - x, -2 * y, -z, -2 * t],
        &[-y, 1 - x, -t, -z],
        &[-z, -2 * t, 1 - x - z, -2 * y - 2 * t],
        &[-t, -z, -y - t, 1 - x - z],
    ])
}

/// Whether `q = -1 (mod pi)`: `q_00 = -1` and `q_0j = 0` modulo `p` for `j >= 1`.
pub fn is_congruent_minus_one(q: &RingElement, g: &GroundParams) -> bool {
    let p = g.p_big();
    (0..g.n()).all(|j| {
        let target = if j == 0 { -BigInt::one() } else { BigInt::zero() };
        (q.get(0, j) - target).is_multiple_of(&p)
    })
}

/// A register whose connection integer is `q`.
///
/// Each `delta_(i,j)` (the coordinates of `q + 1`) is written in base `p` with
/// its sign carried by every digit; digit `k` of `delta_(i,j)` becomes
/// coordinate `j` of `q_(d*k + i)`. The length is the highest power of `pi`
/// actually used (at least 1).
pub fn spec_from_connection(q: &RingElement, g: &GroundParams) -> Result<RegisterSpec, ConnectionError> {
    check_shape(q, g)?;
    if !is_congruent_minus_one(q, g) {
        return Err(ConnectionError::NotCongruentMinusOne(q.clone()));
    }
    let (d, n) = (g.d(), g.n());
    let p = g.p_big();
    let mut coeffs: Vec<Vec<i64>> = Vec::new();
    for i in 0..d {
        for j in 0..n {
            let mut delta = q.get(i, j).clone();
            if i == 0 && j == 0 {
                delta += 1;
            }
            let sign: i64 = match delta.sign() {
                Sign::Minus => -1,
                _ => 1,
            };
            let mut magnitude = delta.abs();
            let mut k = 0usize;
            while !magnitude.is_zero() {
                let (quot, digit) = magnitude.div_rem(&p);
                let digit = digit.to_i64().expect("digit below p");
                if digit != 0 {
                    let power = d * k + i;
                    debug_assert!(power >= 1, "pi^0 digit is zero by the congruence");
                    if coeffs.len() < power {
                        coeffs.resize(power, vec![0; n]);
                    }
                    coeffs[power - 1][j] = sign * digit;
                }
                magnitude = quot;
                k += 1;
            }
        }
    }
    if coeffs.is_empty() {
        coeffs.push(vec![0; n]);
    }
    Ok(RegisterSpec::new(g.clone(), coeffs.into_iter().map(BetaPoly::new).collect())?)
}

fn check_shape(q: &RingElement, g: &GroundParams) -> Result<(), ConnectionError> {
    if q.d() != g.d() || q.n() != g.n() {
        return Err(ConnectionError::Shape {
            d: g.d(),
            n: g.n(),
            got_d: q.d(),
            got_n: q.n(),
        });
    }
    Ok(())
}
