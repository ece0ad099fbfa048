//! The register automaton.
//!
//! A state is `r` cells `a_0 .. a_(r-1)` (elements of `F_p[beta]`, stored as
//! canonical lifts with digits in `0..p`) plus a memory `m` in `Z[pi, beta]`.
//! One transition computes
//!
//! ```text
//! sigma = q_1 a_(r-1) + ... + q_r a_0 + m
//! a_r   = sigma mod p            (pi^0 row, digitwise)
//! m'    = (sigma - a_r) / pi     (rows shift down, top row = (sigma_0 - a_r) / p)
//! ```
//!
//! then drops `a_0` (the output) and appends `a_r`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BetaPoly, GroundParams, RingElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegisterError {
    #[error("register needs at least one connection coefficient")]
    EmptyRegister,
    #[error("declared length r = {declared} but {actual} coefficients given")]
    LengthMismatch { declared: usize, actual: usize },
    #[error("coefficient q_{index} has {got} coordinates, expected {expected}")]
    CoefficientShape { index: usize, expected: usize, got: usize },
    #[error("coefficient q_{index} has coordinate {value} outside S = {{0, +-1, .., +-(p-1)}}")]
    CoefficientOutOfRange { index: usize, value: i64 },
    #[error("state has {got} cells, register length is {expected}")]
    CellCount { expected: usize, got: usize },
    #[error("cell a_{index} is not a canonical lift (coordinates {coords:?})")]
    CellOutOfRange { index: usize, coords: Vec<i64> },
    #[error("memory is {got_d}x{got_n}, expected {d}x{n}")]
    MemoryShape { d: usize, n: usize, got_d: usize, got_n: usize },
    #[error("memory diverged past {bound} after {step} steps")]
    MemoryDiverged { step: u64, bound: BigInt },
    #[error("subsequence index (k = {k}, j = {j}) out of range for d = {d}, n = {n}")]
    IndexOutOfRange { k: usize, j: usize, d: usize, n: usize },
}

/// Ground params plus the connection coefficients `q_1 .. q_r` in `S[beta]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RegisterSpecWire", into = "RegisterSpecWire")]
pub struct RegisterSpec {
    ground: GroundParams,
    coeffs: Vec<BetaPoly>,
}

#[derive(Serialize, Deserialize)]
struct RegisterSpecWire {
    ground: GroundParams,
    r: usize,
    coeffs: Vec<BetaPoly>,
}

impl TryFrom<RegisterSpecWire> for RegisterSpec {
    type Error = RegisterError;

    fn try_from(w: RegisterSpecWire) -> Result<Self, RegisterError> {
        if w.r != w.coeffs.len() {
            return Err(RegisterError::LengthMismatch {
                declared: w.r,
                actual: w.coeffs.len(),
            });
        }
        RegisterSpec::new(w.ground, w.coeffs)
    }
}

impl From<RegisterSpec> for RegisterSpecWire {
    fn from(s: RegisterSpec) -> Self {
        RegisterSpecWire {
            r: s.coeffs.len(),
            ground: s.ground,
            coeffs: s.coeffs,
        }
    }
}

impl RegisterSpec {
    /// `coeffs[i - 1]` is `q_i`.
    pub fn new(ground: GroundParams, coeffs: Vec<BetaPoly>) -> Result<Self, RegisterError> {
        if coeffs.is_empty() {
            return Err(RegisterError::EmptyRegister);
        }
        let bound = ground.p() as i64 - 1;
        for (i, q) in coeffs.iter().enumerate() {
            if q.len() != ground.n() {
                return Err(RegisterError::CoefficientShape {
                    index: i + 1,
                    expected: ground.n(),
                    got: q.len(),
                });
            }
            if let Some(&bad) = q.coords().iter().find(|c| c.abs() > bound) {
                return Err(RegisterError::CoefficientOutOfRange { index: i + 1, value: bad });
            }
        }
        Ok(RegisterSpec { ground, coeffs })
    }

    /// Convenience constructor from raw coordinate rows, `q_1` first.
    pub fn from_rows(ground: GroundParams, rows: &[&[i64]]) -> Result<Self, RegisterError> {
        Self::new(ground, rows.iter().map(|r| BetaPoly::new(r.to_vec())).collect())
    }

    pub fn ground(&self) -> &GroundParams {
        &self.ground
    }

    /// Register length `r`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `q_i` for `1 <= i <= r`.
    pub fn coeff(&self, i: usize) -> &BetaPoly {
        &self.coeffs[i - 1]
    }

    pub fn coeffs(&self) -> &[BetaPoly] {
        &self.coeffs
    }

    pub fn check_state(&self, state: &RegisterState) -> Result<(), RegisterError> {
        let g = &self.ground;
        if state.cells.len() != self.len() {
            return Err(RegisterError::CellCount {
                expected: self.len(),
                got: state.cells.len(),
            });
        }
        let p = g.p() as i64;
        for (i, c) in state.cells.iter().enumerate() {
            if c.len() != g.n() || c.coords().iter().any(|&v| v < 0 || v >= p) {
                return Err(RegisterError::CellOutOfRange {
                    index: i,
                    coords: c.coords().to_vec(),
                });
            }
        }
        let m = &state.memory;
        if m.d() != g.d() || m.n() != g.n() {
            return Err(RegisterError::MemoryShape {
                d: g.d(),
                n: g.n(),
                got_d: m.d(),
                got_n: m.n(),
            });
        }
        Ok(())
    }

    /// All-zero cells and memory.
    pub fn zero_state(&self) -> RegisterState {
        let g = &self.ground;
        RegisterState {
            cells: vec![BetaPoly::zero(g.n()); self.len()],
            memory: RingElement::zero(g.d(), g.n()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterState {
    pub cells: Vec<BetaPoly>,
    pub memory: RingElement,
}

impl RegisterState {
    pub fn new(cells: Vec<BetaPoly>, memory: RingElement) -> Self {
        RegisterState { cells, memory }
    }
}

/// Intermediate values of one transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepTrace {
    pub sigma: RingElement,
    pub out_cell: BetaPoly,
    pub new_memory: RingElement,
}

/// One transition, computed exactly in `Z[pi, beta]`.
///
/// The state must satisfy [`RegisterSpec::check_state`].
pub fn step(spec: &RegisterSpec, state: &RegisterState) -> (RegisterState, StepTrace) {
    debug_assert!(spec.check_state(state).is_ok());
    let g = spec.ground();
    let (d, n, r) = (g.d(), g.n(), spec.len());
    let mut sigma = state.memory.clone();
    for i in 1..=r {
        let product = g.mul(&spec.coeff(i).lift(d), &state.cells[r - i].lift(d));
        sigma = sigma.add(&product);
    }
    let out_cell = g.mod_p(&sigma);
    let p = g.p_big();
    let mut new_memory = RingElement::zero(d, n);
    for k in 0..d - 1 {
        for j in 0..n {
            *new_memory.get_mut(k, j) = sigma.get(k + 1, j).clone();
        }
    }
    for j in 0..n {
        // exact: sigma_0j - a_j is divisible by p
        *new_memory.get_mut(d - 1, j) = (sigma.get(0, j) - out_cell.coords()[j]) / &p;
    }
    let mut cells = state.cells[1..].to_vec();
    cells.push(out_cell.clone());
    let next = RegisterState {
        cells,
        memory: new_memory.clone(),
    };
    (
        next,
        StepTrace {
            sigma,
            out_cell,
            new_memory,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    /// `a_0, a_1, ...`; the first `r` are the initial cells.
    pub outputs: Vec<BetaPoly>,
    pub final_state: RegisterState,
}

/// Emits `steps` outputs, performing one transition per output.
///
/// With `memory_bound` set, fails with [`RegisterError::MemoryDiverged`] as soon
/// as any memory coordinate exceeds it in absolute value.
pub fn run(
    spec: &RegisterSpec,
    state: &RegisterState,
    steps: usize,
    memory_bound: Option<&BigInt>,
) -> Result<RunOutput, RegisterError> {
    let mut sim = Simulator::new(spec, state)?;
    let mut outputs = Vec::with_capacity(steps);
    for _ in 0..steps {
        outputs.push(BetaPoly::new(sim.output().to_vec()));
        sim.advance();
        if let Some(bound) = memory_bound {
            sim.check_memory_bound(bound)?;
        }
    }
    Ok(RunOutput {
        outputs,
        final_state: sim.state(),
    })
}

/// `(a_j^k, a_j^(d+k), a_j^(2d+k), ...)`.
pub fn subsequence(seq: &[BetaPoly], k: usize, j: usize, d: usize) -> Result<Vec<i64>, RegisterError> {
    let n = seq.first().map_or(usize::MAX, BetaPoly::len);
    if d == 0 || k >= d || j >= n {
        return Err(RegisterError::IndexOutOfRange { k, j, d, n });
    }
    Ok(seq.iter().skip(k).step_by(d).map(|a| a.coords()[j]).collect())
}

#[derive(Debug, Clone)]
enum Memory {
    Fast(Vec<i128>),
    Exact(RingElement),
}

/// Stateful runner used for long simulations.
///
/// Steps in checked `i128` arithmetic and switches to [`step`] for any
/// transition that would overflow, so results are always exact.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    spec: &'a RegisterSpec,
    p: i128,
    /// `q_i` at `(i - 1) * n`.
    coeffs: Vec<i128>,
    /// `b_t^j` at `(j - n) * n + t`; `None` if the table does not fit.
    reduction: Option<Vec<i128>>,
    /// Ring buffer of `r` cells, logical cell 0 at `head`.
    cells: Vec<i64>,
    head: usize,
    memory: Memory,
    acc: Vec<i128>,
    steps: u64,
}

impl<'a> Simulator<'a> {
    pub fn new(spec: &'a RegisterSpec, state: &RegisterState) -> Result<Self, RegisterError> {
        spec.check_state(state)?;
        let g = spec.ground();
        let n = g.n();
        let coeffs = spec
            .coeffs()
            .iter()
            .flat_map(|q| q.coords().iter().map(|&c| c as i128))
            .collect();
        let reduction = g
            .beta_reduction_table()
            .iter()
            .flatten()
            .map(|b| b.to_i128())
            .collect::<Option<Vec<_>>>();
        let cells = state.cells.iter().flat_map(|c| c.coords().iter().copied()).collect();
        let mut sim = Simulator {
            spec,
            p: g.p() as i128,
            coeffs,
            reduction,
            cells,
            head: 0,
            memory: Memory::Exact(state.memory.clone()),
            acc: vec![0; 2 * n - 1],
            steps: 0,
        };
        sim.try_fast_memory();
        Ok(sim)
    }

    pub fn spec(&self) -> &RegisterSpec {
        self.spec
    }

    /// Transitions performed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Logical cell `i` (0 is the next output).
    pub fn cell(&self, i: usize) -> &[i64] {
        let r = self.spec.len();
        let n = self.spec.ground().n();
        let slot = (self.head + i) % r;
        &self.cells[slot * n..(slot + 1) * n]
    }

    /// The value the next transition emits.
    pub fn output(&self) -> &[i64] {
        self.cell(0)
    }

    pub fn memory(&self) -> RingElement {
        match &self.memory {
            Memory::Exact(m) => m.clone(),
            Memory::Fast(v) => {
                let g = self.spec.ground();
                let n = g.n();
                RingElement::from_grid(
                    v.chunks(n).map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect(),
                )
                .expect("memory grid has the ground shape")
            }
        }
    }

    pub fn state(&self) -> RegisterState {
        let r = self.spec.len();
        RegisterState {
            cells: (0..r).map(|i| BetaPoly::new(self.cell(i).to_vec())).collect(),
            memory: self.memory(),
        }
    }

    pub fn check_memory_bound(&self, bound: &BigInt) -> Result<(), RegisterError> {
        let exceeded = match &self.memory {
            Memory::Fast(v) => v.iter().any(|x| BigInt::from(x.unsigned_abs()) > *bound),
            Memory::Exact(m) => m.max_abs() > *bound,
        };
        if exceeded {
            Err(RegisterError::MemoryDiverged {
                step: self.steps,
                bound: bound.clone(),
            })
        } else {
            Ok(())
        }
    }

    /// Whether both simulators are in the same automaton state.
    pub fn same_state(&self, other: &Simulator<'_>) -> bool {
        let r = self.spec.len();
        if (0..r).any(|i| self.cell(i) != other.cell(i)) {
            return false;
        }
        match (&self.memory, &other.memory) {
            (Memory::Fast(a), Memory::Fast(b)) => a == b,
            _ => self.memory() == other.memory(),
        }
    }

    /// One transition.
    pub fn advance(&mut self) {
        if !self.fast_step() {
            let (next, _) = step(self.spec, &self.state());
            self.load(&next);
        }
        self.steps += 1;
    }

    fn load(&mut self, state: &RegisterState) {
        self.cells.clear();
        self.cells.extend(state.cells.iter().flat_map(|c| c.coords().iter().copied()));
        self.head = 0;
        self.memory = Memory::Exact(state.memory.clone());
        self.try_fast_memory();
    }

    fn try_fast_memory(&mut self) {
        if self.reduction.is_none() {
            return;
        }
        if let Memory::Exact(m) = &self.memory {
            let g = self.spec.ground();
            let mut v = Vec::with_capacity(g.rank());
            for k in 0..g.d() {
                for x in m.pi_row(k) {
                    match x.to_i128() {
                        Some(x) => v.push(x),
                        None => return,
                    }
                }
            }
            self.memory = Memory::Fast(v);
        }
    }

    /// Returns false, leaving the state untouched, on overflow.
    fn fast_step(&mut self) -> bool {
        let Memory::Fast(mem) = &self.memory else {
            return false;
        };
        let Some(reduction) = &self.reduction else {
            return false;
        };
        let g = self.spec.ground();
        let (n, d, r) = (g.n(), g.d(), self.spec.len());
        let acc = &mut self.acc;
        acc.iter_mut().for_each(|x| *x = 0);
        for i in 1..=r {
            let q = &self.coeffs[(i - 1) * n..i * n];
            let slot = (self.head + r - i) % r;
            let a = &self.cells[slot * n..(slot + 1) * n];
            for (x, &qx) in q.iter().enumerate() {
                if qx == 0 {
                    continue;
                }
                for (y, &ay) in a.iter().enumerate() {
                    let Some(v) = qx.checked_mul(ay as i128).and_then(|v| acc[x + y].checked_add(v)) else {
                        return false;
                    };
                    acc[x + y] = v;
                }
            }
        }
        for j in n..2 * n - 1 {
            let c = acc[j];
            if c == 0 {
                continue;
            }
            for t in 0..n {
                let Some(v) = c.checked_mul(reduction[(j - n) * n + t]).and_then(|v| acc[t].checked_add(v)) else {
                    return false;
                };
                acc[t] = v;
            }
        }
        // acc[..n] becomes the pi^0 row of sigma
        for t in 0..n {
            match acc[t].checked_add(mem[t]) {
                Some(v) => acc[t] = v,
                None => return false,
            }
        }
        let p = self.p;
        let Memory::Fast(mem) = &mut self.memory else { unreachable!() };
        mem.copy_within(n.., 0);
        let slot = self.head;
        for t in 0..n {
            let digit = self.acc[t].rem_euclid(p);
            mem[(d - 1) * n + t] = (self.acc[t] - digit) / p;
            self.cells[slot * n + t] = digit as i64;
        }
        self.head = (self.head + 1) % r;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use num_traits::Zero;

    fn example_ground() -> GroundParams {
        GroundParams::new(2, 2, &[-1, -1, 1]).unwrap()
    }

    fn cells(rows: &[&[i64]]) -> Vec<BetaPoly> {
        rows.iter().map(|r| BetaPoly::new(r.to_vec())).collect()
    }

    fn first_example() -> (RegisterSpec, RegisterState) {
        let spec = RegisterSpec::from_rows(example_ground(), &[&[1, 0], &[0, 1], &[0, 1]]).unwrap();
        let state = RegisterState::new(
            cells(&[&[1, 0], &[1, 1], &[0, 1]]),
            RingElement::from_i64_grid(&[&[5, -1], &[0, 4]]).unwrap(),
        );
        (spec, state)
    }

    #[test]
    fn first_transition_of_the_worked_example() {
        let (spec, state) = first_example();
        let (next, trace) = step(&spec, &state);
        assert_eq!(trace.sigma, RingElement::from_i64_grid(&[&[6, 3], &[0, 4]]).unwrap());
        assert_eq!(trace.out_cell, BetaPoly::new(vec![0, 1]));
        assert_eq!(next.memory, RingElement::from_i64_grid(&[&[0, 4], &[3, 1]]).unwrap());
        assert_eq!(next.cells, cells(&[&[1, 1], &[0, 1], &[0, 1]]));
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let (spec, _) = first_example();
        let zero = spec.zero_state();
        let (next, trace) = step(&spec, &zero);
        assert_eq!(next, zero);
        assert!(trace.out_cell.is_zero());
    }

    #[test]
    fn scalar_fcsr_step() {
        let g = GroundParams::new(2, 1, &[-1, 1]).unwrap();
        let spec = RegisterSpec::from_rows(g, &[&[1]]).unwrap();
        let state = RegisterState::new(cells(&[&[1]]), RingElement::from_i64_grid(&[&[1]]).unwrap());
        let (next, trace) = step(&spec, &state);
        assert_eq!(trace.sigma, RingElement::from_i64_grid(&[&[2]]).unwrap());
        assert_eq!(trace.out_cell, BetaPoly::new(vec![0]));
        assert_eq!(next.memory, RingElement::from_i64_grid(&[&[1]]).unwrap());
    }

    #[test]
    fn run_zero_steps_leaves_state_alone() {
        let (spec, state) = first_example();
        let out = run(&spec, &state, 0, None).unwrap();
        assert!(out.outputs.is_empty());
        assert_eq!(out.final_state, state);
    }

    #[test]
    fn run_starts_with_the_initial_cells() {
        let (spec, state) = first_example();
        let out = run(&spec, &state, 5, None).unwrap();
        assert_eq!(&out.outputs[..3], &state.cells[..]);
        assert_eq!(out.outputs[3], BetaPoly::new(vec![0, 1]));
    }

    #[test]
    fn memory_guard_trips() {
        let (spec, state) = first_example();
        let err = run(&spec, &state, 10, Some(&BigInt::from(3))).unwrap_err();
        assert!(matches!(err, RegisterError::MemoryDiverged { step: 1, .. }), "{err:?}");
    }

    #[test]
    fn spec_validation() {
        let g = example_ground();
        assert_eq!(RegisterSpec::new(g.clone(), vec![]), Err(RegisterError::EmptyRegister));
        assert!(matches!(
            RegisterSpec::from_rows(g.clone(), &[&[2, 0]]),
            Err(RegisterError::CoefficientOutOfRange { index: 1, value: 2 })
        ));
        assert!(RegisterSpec::from_rows(g.clone(), &[&[-1, 1]]).is_ok());
        let spec = RegisterSpec::from_rows(g, &[&[1, 0]]).unwrap();
        let bad = RegisterState::new(cells(&[&[2, 0]]), RingElement::zero(2, 2));
        assert!(matches!(spec.check_state(&bad), Err(RegisterError::CellOutOfRange { .. })));
        let bad = RegisterState::new(cells(&[&[-1, 0]]), RingElement::zero(2, 2));
        assert!(spec.check_state(&bad).is_err());
        let bad = RegisterState::new(cells(&[&[1, 0]]), RingElement::zero(1, 2));
        assert!(matches!(spec.check_state(&bad), Err(RegisterError::MemoryShape { .. })));
        assert!(run(&spec, &bad, 1, None).is_err());
    }

    #[test]
    fn spec_json_roundtrip_and_length_check() {
        let (spec, state) = first_example();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            text,
            r#"{"ground":{"p":2,"d":2,"P":[-1,-1,1]},"r":3,"coeffs":[[1,0],[0,1],[0,1]]}"#
        );
        assert_eq!(serde_json::from_str::<RegisterSpec>(&text).unwrap(), spec);
        let wrong_r = text.replace("\"r\":3", "\"r\":4");
        assert!(serde_json::from_str::<RegisterSpec>(&wrong_r).is_err());
        let st = serde_json::to_string(&state).unwrap();
        assert_eq!(st, r#"{"cells":[[1,0],[1,1],[0,1]],"memory":[[5,-1],[0,4]]}"#);
        assert_eq!(serde_json::from_str::<RegisterState>(&st).unwrap(), state);
    }

    #[test]
    fn subsequence_decimates() {
        let seq = cells(&[&[1, 0], &[1, 1], &[0, 1], &[0, 1], &[0, 0]]);
        assert_eq!(subsequence(&seq, 0, 0, 2).unwrap(), vec![1, 0, 0]);
        assert_eq!(subsequence(&seq, 1, 1, 2).unwrap(), vec![1, 1]);
        assert_eq!(subsequence(&seq, 0, 1, 1).unwrap(), vec![0, 1, 1, 1, 0]);
        assert!(matches!(subsequence(&seq, 2, 0, 2), Err(RegisterError::IndexOutOfRange { .. })));
        assert!(matches!(subsequence(&seq, 0, 2, 2), Err(RegisterError::IndexOutOfRange { .. })));
        let constant = cells(&[&[1], &[1], &[1], &[1]]);
        assert_eq!(subsequence(&constant, 1, 0, 3).unwrap(), vec![1]);
        assert_eq!(subsequence(&constant, 0, 0, 2).unwrap(), vec![1, 1]);
    }

    #[test]
    fn huge_memory_falls_back_to_exact_arithmetic() {
        let (spec, mut state) = first_example();
        let huge: BigInt = BigInt::from(i128::MAX) * 7 + 3;
        *state.memory.get_mut(0, 0) = huge.clone();
        let fast = run(&spec, &state, 12, None).unwrap();
        let mut exact = state.clone();
        let mut outs = Vec::new();
        for _ in 0..12 {
            outs.push(exact.cells[0].clone());
            exact = step(&spec, &exact).0;
        }
        assert_eq!(fast.outputs, outs);
        assert_eq!(fast.final_state, exact);
        assert!(!fast.final_state.memory.is_zero());
    }

    fn arb_spec_state() -> impl Strategy<Value = (RegisterSpec, RegisterState)> {
        (0..crate::presets::PRIMITIVE_POLYS.len(), 1usize..=3, 1usize..=5).prop_flat_map(|(pi, d, r)| {
            let (p, poly) = crate::presets::PRIMITIVE_POLYS[pi];
            let g = GroundParams::new(p, d, poly).unwrap();
            let n = g.n();
            let s = p as i64 - 1;
            (
                Just(g),
                proptest::collection::vec(-s..=s, r * n),
                proptest::collection::vec(0..=s, r * n),
                proptest::collection::vec(-20i64..=20, d * n),
            )
                .prop_map(move |(g, q, a, m)| {
                    let spec = RegisterSpec::new(g, q.chunks(n).map(|c| BetaPoly::new(c.to_vec())).collect()).unwrap();
                    let memory = RingElement::from_grid(
                        m.chunks(n).map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect(),
                    )
                    .unwrap();
                    let state = RegisterState::new(a.chunks(n).map(|c| BetaPoly::new(c.to_vec())).collect(), memory);
                    (spec, state)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn simulator_matches_exact_steps((spec, state) in arb_spec_state()) {
            let fast = run(&spec, &state, 60, None).unwrap();
            let mut s = state.clone();
            for out in &fast.outputs {
                prop_assert_eq!(out, &s.cells[0]);
                s = step(&spec, &s).0;
            }
            prop_assert_eq!(fast.final_state, s);
        }

        #[test]
        fn traced_steps_satisfy_the_reconstruction_identity((spec, state) in arb_spec_state()) {
            let g = spec.ground().clone();
            let p = g.p_big();
            let mut s = state;
            for _ in 0..40 {
                let (next, t) = step(&spec, &s);
                prop_assert_eq!(&t.out_cell, &g.mod_p(&t.sigma));
                for j in 0..g.n() {
                    let rebuilt = t.sigma.get(0, j) - &p * t.new_memory.get(g.d() - 1, j);
                    prop_assert_eq!(rebuilt, BigInt::from(t.out_cell.coords()[j]));
                    prop_assert!((t.sigma.get(0, j) - t.out_cell.coords()[j]) % &p == BigInt::zero());
                }
                prop_assert_eq!(step(&spec, &s).0, next.clone());
                s = next;
            }
        }

        #[test]
        fn decimations_interleave_back((spec, state) in arb_spec_state()) {
            let d = spec.ground().d();
            let n = spec.ground().n();
            let out = run(&spec, &state, 50, None).unwrap().outputs;
            for j in 0..n {
                let subs: Vec<Vec<i64>> = (0..d).map(|k| subsequence(&out, k, j, d).unwrap()).collect();
                let rebuilt: Vec<i64> = (0..out.len()).map(|i| subs[i % d][i / d]).collect();
                let row: Vec<i64> = out.iter().map(|a| a.coords()[j]).collect();
                prop_assert_eq!(rebuilt, row);
            }
        }
    }
}
