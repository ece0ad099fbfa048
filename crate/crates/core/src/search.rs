//! Enumeration of connection grids `q~` by the value of the norm form `N'`.
//!
//! The search space is the `d x n` grid of `q~_(k,j)` rather than the register
//! coefficients: the grid alone fixes `q = -1 + sum q~_(k,j) pi^k beta^j`, its
//! matrices and `N'`, and [`spec_from_connection`](crate::connection::spec_from_connection)
//! recovers a register when one is needed. Grids are listed in lexicographic
//! order of their arguments taken in matrix order (for `n = d = 2` that is
//! `(x, y, z, t) = (q~_00, q~_10, q~_01, q~_11)`).

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{basis_index, GroundParams, RingElement};
use crate::analysis::{corollary1_predicate, mult_order};
use crate::connection::{analyze_connection, connection_from_grid, specialized_mprime_2_2};
use crate::matrix::det_int;
use crate::numtheory;
use crate::tables::Table1Row;

pub use crate::numtheory::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("bounds must be a {d}x{n} grid")]
    BoundsShape { d: usize, n: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchFilters {
    pub require_prime: bool,
    pub require_primitive_root: bool,
    pub require_gcd_d: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    ground: GroundParams,
    bounds: Vec<Vec<u64>>,
    signed: bool,
    pub filters: SearchFilters,
    pub limit: Option<usize>,
}

impl SearchConfig {
    /// `bounds[k][j]` caps `|q~_(k,j)|`. Values range over `0..=bound`, or
    /// `-bound..=bound` when `signed`; the `pi^0` row keeps multiples of `p` only.
    pub fn new(ground: GroundParams, bounds: Vec<Vec<u64>>, signed: bool) -> Result<Self, SearchError> {
        let (d, n) = (ground.d(), ground.n());
        if bounds.len() != d || bounds.iter().any(|r| r.len() != n) {
            return Err(SearchError::BoundsShape { d, n });
        }
        Ok(SearchConfig {
            ground,
            bounds,
            signed,
            filters: SearchFilters::default(),
            limit: None,
        })
    }

    pub fn uniform(ground: GroundParams, bound: u64, signed: bool) -> Self {
        let bounds = vec![vec![bound; ground.n()]; ground.d()];
        SearchConfig::new(ground, bounds, signed).expect("uniform bounds have the ground shape")
    }

    pub fn ground(&self) -> &GroundParams {
        &self.ground
    }

    /// Admissible values per argument, in matrix order.
    pub fn slot_values(&self) -> Vec<Vec<i64>> {
        let (d, n) = (self.ground.d(), self.ground.n());
        let p = self.ground.p() as i64;
        let mut slots = vec![Vec::new(); d * n];
        for k in 0..d {
            for j in 0..n {
                let b = self.bounds[k][j] as i64;
                let lo = if self.signed { -b } else { 0 };
                slots[basis_index(d, k, j)] = (lo..=b).filter(|v| k != 0 || v % p == 0).collect();
            }
        }
        slots
    }

    /// Number of grids [`grids`] yields.
    pub fn grid_count(&self) -> u128 {
        self.slot_values().iter().map(|s| s.len() as u128).product()
    }
}

/// A grid with its norm-form value and the period-related verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub q_tilde: RingElement,
    /// The grid in matrix order.
    pub args: Vec<i64>,
    #[serde(rename = "N_prime", serialize_with = "crate::json::serialize_big")]
    pub n_prime: BigInt,
    #[serde(rename = "N_prime_abs", serialize_with = "crate::json::serialize_big")]
    pub n_prime_abs: BigInt,
    pub is_prime: bool,
    /// `ord_|N'|(p)`; `None` beyond 64 bits or when `phi(|N'|)` cannot be factored.
    pub ord: Option<u64>,
    pub is_primitive_root: bool,
    pub gcd_ok: bool,
    /// `|N'| - 1` when the maximal-period criterion applies, `d * ord` otherwise.
    pub predicted_max_period: Option<u64>,
}

impl Candidate {
    pub fn passes(&self, filters: &SearchFilters) -> bool {
        (!filters.require_prime || self.is_prime)
            && (!filters.require_primitive_root || self.is_primitive_root)
            && (!filters.require_gcd_d || self.gcd_ok)
    }
}

/// Evaluates one grid given in matrix order.
pub fn evaluate(ground: &GroundParams, args: &[i64]) -> Candidate {
    let (p, d, n) = (ground.p(), ground.d(), ground.n());
    assert_eq!(args.len(), d * n, "grid has {} arguments, expected {}", args.len(), d * n);
    let mut grid = RingElement::zero(d, n);
    for k in 0..d {
        for j in 0..n {
            *grid.get_mut(k, j) = BigInt::from(args[basis_index(d, k, j)]);
        }
    }
    let q = connection_from_grid(&grid);
    let n_prime = det_int(&ground.int_mult_matrix(&q.neg())).expect("multiplication matrices are square");
    let n_prime_abs = n_prime.abs();
    let small = n_prime_abs.to_u64();
    let ord = small.and_then(|m| if m == 1 { Some(1) } else { mult_order(p, m).ok() });
    let is_prime = small.is_some_and(numtheory::is_prime);
    let is_primitive_root = is_prime && ord.is_some() && ord == small.map(|m| m - 1);
    let gcd_ok = small.is_some_and(|m| m >= 1 && numtheory::gcd(d as u64, m - 1) == 1);
    let corollary = small.is_some_and(|m| m >= 2 && corollary1_predicate(m, p, d));
    let predicted_max_period = match (corollary, small, ord) {
        (true, Some(m), _) => Some(m - 1),
        (_, _, Some(o)) => Some(d as u64 * o),
        _ => None,
    };
    Candidate {
        q_tilde: grid,
        args: args.to_vec(),
        n_prime,
        n_prime_abs,
        is_prime,
        ord,
        is_primitive_root,
        gcd_ok,
        predicted_max_period,
    }
}

/// Every admissible grid, lexicographically, last argument fastest.
pub fn grids(config: &SearchConfig) -> impl Iterator<Item = Vec<i64>> {
    let slots = config.slot_values();
    let empty = slots.iter().any(Vec::is_empty);
    let mut odometer = vec![0usize; slots.len()];
    let mut done = empty;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let current = odometer.iter().zip(&slots).map(|(&i, s)| s[i]).collect();
        done = true;
        for pos in (0..odometer.len()).rev() {
            odometer[pos] += 1;
            if odometer[pos] < slots[pos].len() {
                done = false;
                break;
            }
            odometer[pos] = 0;
        }
        Some(current)
    })
}

/// Candidates passing the filters, in grid order, up to the limit.
pub fn enumerate(config: &SearchConfig) -> impl Iterator<Item = Candidate> + '_ {
    grids(config)
        .map(|args| evaluate(&config.ground, &args))
        .filter(|c| c.passes(&config.filters))
        .take(config.limit.unwrap_or(usize::MAX))
}

/// Same result as collecting [`enumerate`], with grids evaluated in parallel
/// blocks.
pub fn search(config: &SearchConfig) -> Vec<Candidate> {
    const BLOCK: usize = 4096;
    let limit = config.limit.unwrap_or(usize::MAX);
    let mut found = Vec::new();
    let mut source = grids(config);
    while found.len() < limit {
        let block: Vec<Vec<i64>> = source.by_ref().take(BLOCK).collect();
        if block.is_empty() {
            break;
        }
        let hits: Vec<Candidate> = block
            .par_iter()
            .map(|args| evaluate(&config.ground, args))
            .filter(|c| c.passes(&config.filters))
            .collect();
        found.extend(hits);
    }
    found.truncate(limit);
    found
}

/// One norm-form table row checked against the `4 x 4` template and the
/// general multiplication matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1Check {
    pub row: Table1Row,
    #[serde(serialize_with = "crate::json::serialize_big")]
    pub det: BigInt,
    pub matches: bool,
    pub is_prime: bool,
    pub template_matches_general: bool,
}

impl Table1Check {
    pub fn passed(&self) -> bool {
        self.matches && self.template_matches_general
    }

    /// One report line, e.g.
    /// `PASS N'=9 (x,y,z,t)=(2,1,4,0) det=9 composite 3^2`.
    pub fn summary_line(&self) -> String {
        let r = &self.row;
        let mut line = format!(
            "{} N'={} (x,y,z,t)=({},{},{},{}) det={}",
            if self.passed() { "PASS" } else { "FAIL" },
            r.n_prime,
            r.x,
            r.y,
            r.z,
            r.t,
            self.det
        );
        if !self.matches {
            line.push_str(&format!(" expected |det|={}", r.n_prime));
        }
        if !self.template_matches_general {
            line.push_str(" template!=general");
        }
        if self.is_prime {
            line.push_str(" prime");
        } else {
            line.push_str(" composite");
            if let Ok(f) = numtheory::factorize(r.n_prime) {
                let parts: Vec<String> = f
                    .iter()
                    .map(|&(q, e)| if e == 1 { q.to_string() } else { format!("{q}^{e}") })
                    .collect();
                line.push(' ');
                line.push_str(&parts.join("*"));
            }
        }
        line
    }
}

/// `p = n = d = 2`, `beta^2 = beta + 1`: the ring of the table.
pub fn table1_ground() -> GroundParams {
    GroundParams::new(2, 2, &[-1, -1, 1]).expect("X^2 - X - 1 is primitive mod 2")
}

pub fn check_table1(rows: &[Table1Row]) -> Vec<Table1Check> {
    let g = table1_ground();
    rows.iter()
        .map(|row| {
            let template = specialized_mprime_2_2(row.x, row.y, row.z, row.t);
            let det = det_int(&template).expect("template is square");
            let mut grid = RingElement::zero(2, 2);
            for (k, j, v) in [(0, 0, row.x), (1, 0, row.y), (0, 1, row.z), (1, 1, row.t)] {
                *grid.get_mut(k, j) = BigInt::from(v);
            }
            let general = analyze_connection(&connection_from_grid(&grid), &g)
                .expect("grid has the ground shape")
                .m_prime;
            Table1Check {
                row: *row,
                matches: det.abs() == BigInt::from(row.n_prime),
                det,
                is_prime: numtheory::is_prime(row.n_prime),
                template_matches_general: template == general,
            }
        })
        .collect()
}

/// Checks the bundled norm-form table.
pub fn reproduce_table1() -> Vec<Table1Check> {
    check_table1(&crate::fixtures::table1())
}
