//! Periods, multiplicative orders and the rationality of output streams.
//!
//! Period measurement works on the automaton itself: a repeated state (found by
//! Brent's cycle search) proves that every output sequence is periodic from
//! that point on, so transients and minimal periods below are exact rather than
//! window estimates. [`detect_period`] is the window-based variant for bare
//! sequences.

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{basis_index, RingElement};
use crate::connection::{analyze, ConnectionAnalysis};
use crate::matrix::IntMatrix;
use crate::numtheory::{self, NumberTheoryError};
use crate::register::{RegisterError, RegisterSpec, RegisterState, Simulator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("gcd({base}, {modulus}) != 1, order undefined")]
    NotCoprime { base: u64, modulus: u64 },
    #[error("modulus {0} is below 2")]
    ModulusTooSmall(u64),
    #[error("|N'| = {0} does not fit in 64 bits")]
    ModulusTooLarge(BigInt),
    #[error("cannot factor {0} within the trial-division budget")]
    FactorizationBudget(u64),
    #[error("no period found within {0} steps")]
    Undetermined(usize),
    #[error("numerators unstable at precision {0}; retry with a larger precision")]
    PrecisionTooLow(usize),
    #[error(transparent)]
    Register(#[from] RegisterError),
}

impl From<NumberTheoryError> for AnalysisError {
    fn from(e: NumberTheoryError) -> Self {
        match e {
            NumberTheoryError::NotCoprime { base, modulus } => AnalysisError::NotCoprime { base, modulus },
            NumberTheoryError::ModulusTooSmall(m) => AnalysisError::ModulusTooSmall(m),
            NumberTheoryError::FactorizationBudget(m) => AnalysisError::FactorizationBudget(m),
        }
    }
}

/// Smallest `e >= 1` with `p^e = 1 (mod m)`.
pub fn mult_order(p: u64, m: u64) -> Result<u64, AnalysisError> {
    Ok(numtheory::mult_order(p, m)?)
}

/// As [`mult_order`], but `1` for `m = 1`.
fn order_or_one(p: u64, m: u64) -> Result<u64, AnalysisError> {
    if m == 1 {
        Ok(1)
    } else {
        mult_order(p, m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Periodicity {
    pub transient: usize,
    pub period: usize,
}

/// Smallest period `l <= max_len` of the tail of `seq`, with its minimal
/// transient `t`.
///
/// A candidate is accepted only when `t <= len / 2` and the periodic part
/// covers at least two periods. Candidates are tried in increasing order, so
/// the answer is the true `(t, l)` whenever `len >= max(2t, t + 2l, 4l)`.
pub fn detect_period<T: PartialEq>(seq: &[T], max_len: usize) -> Result<Periodicity, AnalysisError> {
    let len = seq.len();
    for period in 1..=max_len.min(len / 2) {
        let transient = (0..len - period)
            .rev()
            .find(|&i| seq[i] != seq[i + period])
            .map_or(0, |i| i + 1);
        if 2 * transient <= len && len - transient >= 2 * period {
            return Ok(Periodicity { transient, period });
        }
    }
    Err(AnalysisError::Undetermined(len))
}

/// Transient `mu` and period `lambda` of the state sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StateCycle {
    pub transient: u64,
    pub period: u64,
}

/// Brent's cycle search on the register state, giving up after `max_steps`
/// transitions of the leading simulator.
pub fn state_cycle(spec: &RegisterSpec, state: &RegisterState, max_steps: usize) -> Result<StateCycle, AnalysisError> {
    let start = Simulator::new(spec, state)?;
    let budget = max_steps as u64;
    let mut tortoise = start.clone();
    let mut hare = start.clone();
    hare.advance();
    let (mut power, mut lambda) = (1u64, 1u64);
    while !tortoise.same_state(&hare) {
        if hare.steps() >= budget {
            return Err(AnalysisError::Undetermined(max_steps));
        }
        if power == lambda {
            tortoise = hare.clone();
            power *= 2;
            lambda = 0;
        }
        hare.advance();
        lambda += 1;
    }
    let mut tortoise = start.clone();
    let mut hare = start;
    for _ in 0..lambda {
        hare.advance();
    }
    let mut mu = 0;
    while !tortoise.same_state(&hare) {
        tortoise.advance();
        hare.advance();
        mu += 1;
    }
    Ok(StateCycle {
        transient: mu,
        period: lambda,
    })
}

/// Output digits of one cycle-resolved run: indices past `mu + lambda` wrap
/// around the cycle, so any position can be read.
struct CycleOutputs {
    n: usize,
    mu: usize,
    lambda: usize,
    digits: Vec<i64>,
}

impl CycleOutputs {
    fn collect(spec: &RegisterSpec, state: &RegisterState, cycle: StateCycle) -> Result<Self, AnalysisError> {
        let n = spec.ground().n();
        let (mu, lambda) = (cycle.transient as usize, cycle.period as usize);
        let mut sim = Simulator::new(spec, state)?;
        let mut digits = Vec::with_capacity((mu + lambda) * n);
        for _ in 0..mu + lambda {
            digits.extend_from_slice(sim.output());
            sim.advance();
        }
        Ok(CycleOutputs { n, mu, lambda, digits })
    }

    fn at(&self, i: usize, j: usize) -> i64 {
        let i = if i < self.mu + self.lambda {
            i
        } else {
            self.mu + (i - self.mu) % self.lambda
        };
        self.digits[i * self.n + j]
    }
}

/// Minimal period and transient of `f`, given that `f` is periodic with
/// `cycle` from index `start` on.
///
/// The periods of a purely periodic sequence that divide `cycle` are closed
/// under gcd, so stripping prime factors greedily reaches the minimum.
fn resolve_period(f: impl Fn(usize) -> i64, start: usize, cycle: usize) -> Periodicity {
    let holds = |l: usize| (start..start + cycle).all(|z| f(z + l) == f(z));
    let mut period = cycle;
    let factors = numtheory::factorize(cycle as u64).expect("cycle length below the trial-division limit");
    for (q, _) in factors {
        let q = q as usize;
        while period % q == 0 && holds(period / q) {
            period /= q;
        }
    }
    let mut transient = start;
    while transient > 0 && f(transient - 1) == f(transient - 1 + period) {
        transient -= 1;
    }
    Periodicity { transient, period }
}

/// `4 * d * ord + 64`.
pub fn default_horizon(d: usize, ord: u64) -> usize {
    (4 * d as u64 * ord + 64) as usize
}

/// `|N'|` prime, `p` a primitive root modulo it, and `gcd(d, |N'| - 1) = 1`.
///
/// Under these conditions any output with a non-constant decimated stream has
/// period exactly `|N'| - 1`. (With every decimated stream eventually constant
/// the period still divides `d`, not necessarily 1.)
pub fn corollary1_predicate(n_prime_abs: u64, p: u64, d: usize) -> bool {
    if !numtheory::is_prime(n_prime_abs) || p % n_prime_abs == 0 {
        return false;
    }
    let phi = n_prime_abs - 1;
    matches!(mult_order(p, n_prime_abs), Ok(o) if o == phi) && numtheory::gcd(d as u64, phi) == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    #[serde(rename = "N_prime_abs")]
    pub n_prime_abs: u64,
    pub ord: u64,
    pub state_cycle: StateCycle,
    /// Indexed `[k][j]`: the decimated stream `a_j^k, a_j^(d+k), ...`.
    pub sub_periods: Vec<Vec<Periodicity>>,
    /// One per coordinate `a_j`.
    pub coord_periods: Vec<Periodicity>,
    pub total_period: u64,
    /// `|N'| / gcd(|N'|, numerator)` per decimated stream, when the numerators
    /// were recovered.
    pub reduced_denominators: Option<Vec<Vec<u64>>>,
    pub sub_periods_divide_ord: bool,
    pub coord_periods_divide_d_ord: bool,
    pub total_is_lcm_and_divides_d_ord: bool,
    pub theorem2_ok: bool,
    pub corollary1_applicable: bool,
}

/// Measures every period of the register started in `state` and checks them
/// against `ord_|N'|(p)`.
///
/// `horizon` bounds the cycle search (default [`default_horizon`]); the
/// report needs at most about `mu + lambda` further steps once a cycle is
/// found.
pub fn theorem2_report(
    spec: &RegisterSpec,
    state: &RegisterState,
    horizon: Option<usize>,
) -> Result<PeriodReport, AnalysisError> {
    theorem2_report_with(spec, state, horizon, None)
}

/// [`theorem2_report`] with an explicit precision for the numerator recovery
/// behind `reduced_denominators` (see [`verify_rationality`]).
pub fn theorem2_report_with(
    spec: &RegisterSpec,
    state: &RegisterState,
    horizon: Option<usize>,
    precision: Option<usize>,
) -> Result<PeriodReport, AnalysisError> {
    let g = spec.ground();
    let (p, d, n) = (g.p(), g.d(), g.n());
    let conn = analyze(spec);
    let n_abs = conn
        .n_prime_abs
        .to_u64()
        .ok_or_else(|| AnalysisError::ModulusTooLarge(conn.n_prime_abs.clone()))?;
    let ord = order_or_one(p, n_abs)?;
    let horizon = horizon.unwrap_or_else(|| default_horizon(d, ord));
    let cycle = state_cycle(spec, state, horizon)?;
    let out = CycleOutputs::collect(spec, state, cycle)?;
    let (mu, lambda) = (out.mu, out.lambda);

    let sub_cycle = lambda / lambda.gcd(&d);
    let sub_periods: Vec<Vec<Periodicity>> = (0..d)
        .map(|k| {
            let start = mu.saturating_sub(k).div_ceil(d);
            (0..n)
                .map(|j| resolve_period(|z| out.at(d * z + k, j), start, sub_cycle))
                .collect()
        })
        .collect();
    let coord_periods: Vec<Periodicity> =
        (0..n).map(|j| resolve_period(|i| out.at(i, j), mu, lambda)).collect();
    let total_period = coord_periods.iter().fold(1u64, |acc, c| numtheory::lcm(acc, c.period as u64));

    let d_ord = d as u64 * ord;
    let sub_ok = sub_periods.iter().flatten().all(|s| ord % s.period as u64 == 0);
    let coord_ok = coord_periods.iter().all(|c| d_ord % c.period as u64 == 0);
    // the vector sequence repeats exactly when every coordinate does
    let vector_period = resolve_period(
        |i| (0..n).fold(0i64, |h, j| h.wrapping_mul(1_000_003).wrapping_add(out.at(i, j))),
        mu,
        lambda,
    );
    let total_ok = d_ord % total_period == 0 && vector_period.period as u64 == total_period;

    // best effort at the default precision; an explicit precision must hold up
    let rationality = match verify_rationality_with(spec, state, &conn, precision) {
        Ok(r) => Some(r),
        Err(e) if precision.is_some() => return Err(e),
        Err(_) => None,
    };
    let reduced_denominators = rationality.map(|r| {
        r.reduced_denominators
            .iter()
            .map(|row| row.iter().map(|v| v.to_u64().expect("divides |N'|")).collect())
            .collect()
    });

    Ok(PeriodReport {
        n_prime_abs: n_abs,
        ord,
        state_cycle: cycle,
        sub_periods,
        coord_periods,
        total_period,
        reduced_denominators,
        sub_periods_divide_ord: sub_ok,
        coord_periods_divide_d_ord: coord_ok,
        total_is_lcm_and_divides_d_ord: total_ok,
        theorem2_ok: sub_ok && coord_ok && total_ok,
        corollary1_applicable: n_abs >= 2 && corollary1_predicate(n_abs, p, d),
    })
}

impl PeriodReport {
    /// Aligned plain-text rendering.
    pub fn render_table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("|N'|".into(), self.n_prime_abs.to_string()),
            ("ord".into(), self.ord.to_string()),
            (
                "state cycle".into(),
                format!("transient {}, period {}", self.state_cycle.transient, self.state_cycle.period),
            ),
        ];
        for (k, row) in self.sub_periods.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                let mut value = format!("transient {}, period {}", s.transient, s.period);
                if let Some(den) = &self.reduced_denominators {
                    let _ = write!(value, ", denominator {}", den[k][j]);
                }
                rows.push((format!("a_{j} (k={k})"), value));
            }
        }
        for (j, c) in self.coord_periods.iter().enumerate() {
            rows.push((format!("a_{j}"), format!("transient {}, period {}", c.transient, c.period)));
        }
        rows.push(("total period".into(), self.total_period.to_string()));
        rows.push(("sub periods | ord".into(), yes_no(self.sub_periods_divide_ord)));
        rows.push(("coord periods | d*ord".into(), yes_no(self.coord_periods_divide_d_ord)));
        rows.push(("total = lcm, | d*ord".into(), yes_no(self.total_is_lcm_and_divides_d_ord)));
        rows.push(("periods consistent".into(), yes_no(self.theorem2_ok)));
        rows.push(("max-period criterion".into(), yes_no(self.corollary1_applicable)));
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
    }
}

impl fmt::Display for PeriodReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_table())
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

/// Outcome of [`verify_rationality`]. Vectors are `d x n` grids indexed like
/// ring elements, so entry `(k, j)` belongs to the stream `a_j^k, a_j^(d+k), ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalityReport {
    pub precision: usize,
    #[serde(rename = "N_prime", serialize_with = "crate::json::serialize_big")]
    pub n_prime: BigInt,
    /// `M' alpha'`, recovered from the truncated expansions.
    pub y_prime: RingElement,
    /// `adj(M') y'`: each stream is the p-adic expansion of `numerator / N'`.
    pub numerators: RingElement,
    #[serde(serialize_with = "crate::json::serialize_big_grid")]
    pub reduced_denominators: Vec<Vec<BigInt>>,
    pub expansion_matches: bool,
}

/// Recovers the integer vector `y' = M' alpha'` from the first `d * (K + 8)`
/// outputs and checks that `alpha' = adj(M') y' / N'` reproduces every
/// observed digit.
///
/// `precision` defaults to [`default_precision`]. Fails with
/// [`AnalysisError::PrecisionTooLow`] when `y'` changes between `K` and `K + 8`.
pub fn verify_rationality(
    spec: &RegisterSpec,
    state: &RegisterState,
    precision: Option<usize>,
) -> Result<RationalityReport, AnalysisError> {
    verify_rationality_with(spec, state, &analyze(spec), precision)
}

/// `ceil(log_p(2 |N'| B)) + 16`, where `B` bounds the numerator coordinates by
/// the size of the initial memory, the register length and the `beta`
/// reduction table.
pub fn default_precision(spec: &RegisterSpec, state: &RegisterState, n_prime_abs: &BigInt) -> usize {
    let g = spec.ground();
    let (d, n, r) = (g.d(), g.n(), spec.len());
    let p = g.p_big();
    let reduction = g
        .beta_reduction_table()
        .iter()
        .flatten()
        .map(|b| b.abs())
        .max()
        .unwrap_or_default()
        + 1;
    let digit = &p - 1u32;
    let carries = BigInt::from(r * n * n) * &digit * &digit * reduction;
    let bound = (BigInt::one() + state.memory.max_abs() + carries) * num_traits::pow(p.clone(), r.div_ceil(d) + 1);
    let target = BigInt::from(2) * n_prime_abs * bound;
    let mut k = 0;
    let mut pk = BigInt::one();
    while pk <= target {
        pk *= &p;
        k += 1;
    }
    k + 16
}

fn verify_rationality_with(
    spec: &RegisterSpec,
    state: &RegisterState,
    conn: &ConnectionAnalysis,
    precision: Option<usize>,
) -> Result<RationalityReport, AnalysisError> {
    let g = spec.ground();
    let (d, n) = (g.d(), g.n());
    let p = g.p_big();
    let k1 = precision.unwrap_or_else(|| default_precision(spec, state, &conn.n_prime_abs));
    let k2 = k1 + 8;

    let mut sim = Simulator::new(spec, state)?;
    let mut digits = Vec::with_capacity(d * k2 * n);
    for _ in 0..d * k2 {
        digits.extend_from_slice(sim.output());
        sim.advance();
    }
    let digit = |z: usize, k: usize, j: usize| digits[(d * z + k) * n + j];

    let recover = |precision: usize| -> Vec<BigInt> {
        let modulus = num_traits::pow(p.clone(), precision);
        let mut alpha = vec![BigInt::zero(); d * n];
        for k in 0..d {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for z in (0..precision).rev() {
                    acc = acc * &p + digit(z, k, j);
                }
                alpha[basis_index(d, k, j)] = acc;
            }
        }
        conn.m_prime
            .mul_vec(&alpha)
            .into_iter()
            .map(|v| balanced(&v, &modulus))
            .collect()
    };
    let y = recover(k1);
    if y != recover(k2) {
        return Err(AnalysisError::PrecisionTooLow(k1));
    }

    let adj = adjugate(&conn.m_prime);
    let w = adj.mul_vec(&y);
    let n_prime = conn.n_prime.clone();

    let modulus = num_traits::pow(p.clone(), k2);
    let inverse = mod_inverse(&n_prime, &modulus).expect("N' = 1 mod p is a unit");
    let mut expansion_matches = true;
    for k in 0..d {
        for j in 0..n {
            let mut x = (&w[basis_index(d, k, j)] * &inverse).mod_floor(&modulus);
            for z in 0..k2 {
                let (q, r) = x.div_rem(&p);
                if r != BigInt::from(digit(z, k, j)) {
                    expansion_matches = false;
                }
                x = q;
            }
        }
    }

    let reduced_denominators = (0..d)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let num = &w[basis_index(d, k, j)];
                    &conn.n_prime_abs / conn.n_prime_abs.gcd(num)
                })
                .collect()
        })
        .collect();

    Ok(RationalityReport {
        precision: k1,
        n_prime,
        y_prime: from_basis_vector(d, n, &y),
        numerators: from_basis_vector(d, n, &w),
        reduced_denominators,
        expansion_matches,
    })
}

/// Representative of `v mod m` in `(-m/2, m/2]`.
fn balanced(v: &BigInt, m: &BigInt) -> BigInt {
    let r = v.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

fn adjugate(m: &IntMatrix) -> IntMatrix {
    m.adjugate().expect("multiplication matrices are square")
}

fn from_basis_vector(d: usize, n: usize, v: &[BigInt]) -> RingElement {
    let mut e = RingElement::zero(d, n);
    for k in 0..d {
        for j in 0..n {
            *e.get_mut(k, j) = v[basis_index(d, k, j)].clone();
        }
    }
    e
}
