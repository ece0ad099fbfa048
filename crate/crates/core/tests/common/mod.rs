//! Random registers and an independent scalar FCSR for the integration suites.
#![allow(dead_code)]

use std::collections::VecDeque;

use dvfcsr::presets::PRIMITIVE_POLYS;
use dvfcsr::register::{RegisterSpec, RegisterState};
use dvfcsr::{BetaPoly, GroundParams, RingElement};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_ground(rng: &mut impl Rng, primes: &[u64], max_n: usize, max_d: usize) -> GroundParams {
    let choices: Vec<&(u64, &[i64])> = PRIMITIVE_POLYS
        .iter()
        .filter(|(p, poly)| primes.contains(p) && poly.len() - 1 <= max_n)
        .collect();
    let (p, poly) = **choices.choose(rng).expect("some preset matches");
    GroundParams::new(p, rng.gen_range(1..=max_d), poly).expect("presets are primitive")
}

/// Coefficients drawn uniformly from `S = {0, +-1, .., +-(p-1)}`.
pub fn random_spec(rng: &mut impl Rng, ground: &GroundParams, max_r: usize) -> RegisterSpec {
    let s = ground.p() as i64 - 1;
    let r = rng.gen_range(1..=max_r);
    let coeffs = (0..r)
        .map(|_| BetaPoly::new((0..ground.n()).map(|_| rng.gen_range(-s..=s)).collect()))
        .collect();
    RegisterSpec::new(ground.clone(), coeffs).expect("coefficients lie in S")
}

/// Canonical cells and memory coordinates in `-mem..=mem`.
pub fn random_state(rng: &mut impl Rng, spec: &RegisterSpec, mem: i64) -> RegisterState {
    let g = spec.ground();
    let p = g.p() as i64;
    let cells = (0..spec.len())
        .map(|_| BetaPoly::new((0..g.n()).map(|_| rng.gen_range(0..p)).collect()))
        .collect();
    let grid: Vec<Vec<i64>> = (0..g.d())
        .map(|_| (0..g.n()).map(|_| rng.gen_range(-mem..=mem)).collect())
        .collect();
    let rows: Vec<&[i64]> = grid.iter().map(Vec::as_slice).collect();
    RegisterState::new(cells, RingElement::from_i64_grid(&rows).expect("rectangular grid"))
}

/// The classical p-ary FCSR: `sigma = sum q_i a_(n-i) + m`, emit `a_n`,
/// `a_(n+r) = sigma mod p`, `m = sigma div p`.
pub struct ScalarFcsr {
    p: i128,
    taps: Vec<i128>,
    cells: VecDeque<i128>,
    pub memory: i128,
}

impl ScalarFcsr {
    pub fn new(p: u64, taps: &[i64], cells: &[i64], memory: i64) -> Self {
        assert_eq!(taps.len(), cells.len());
        ScalarFcsr {
            p: p as i128,
            taps: taps.iter().map(|&q| q as i128).collect(),
            cells: cells.iter().map(|&a| a as i128).collect(),
            memory: memory as i128,
        }
    }

    pub fn next_output(&self) -> i128 {
        self.cells[0]
    }

    pub fn clock(&mut self) -> i128 {
        let r = self.taps.len();
        let sigma: i128 = self
            .taps
            .iter()
            .enumerate()
            .map(|(i, q)| q * self.cells[r - 1 - i])
            .sum::<i128>()
            + self.memory;
        let a = sigma.rem_euclid(self.p);
        self.memory = (sigma - a) / self.p;
        let out = self.cells.pop_front().expect("nonempty register");
        self.cells.push_back(a);
        out
    }
}
