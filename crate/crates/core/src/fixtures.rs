//! Reference data shipped with the crate: the worked example registers, the
//! norm-form table and the 36-step trace of the first example.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::register::{RegisterError, RegisterSpec, RegisterState};
use crate::tables::{parse_table1, SequenceTable, Table1Row};

pub const EXAMPLE1_JSON: &str = include_str!("../fixtures/example1.json");
pub const EXAMPLE2_JSON: &str = include_str!("../fixtures/example2.json");
pub const EXAMPLE3_JSON: &str = include_str!("../fixtures/example3.json");
pub const ZERO_STATE_JSON: &str = include_str!("../fixtures/zero_state.json");
/// `q = -1`.
pub const TRIVIAL_JSON: &str = include_str!("../fixtures/trivial.json");
pub const TABLE1_CSV: &str = include_str!("../fixtures/table1.csv");
pub const TABLE2_CSV: &str = include_str!("../fixtures/table2.csv");

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("invalid fixture JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid initial state: {0}")]
    State(#[from] RegisterError),
}

/// A register and, optionally, an initial state (all zero when absent).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub spec: RegisterSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<RegisterState>,
}

impl Fixture {
    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        let f: Fixture = serde_json::from_str(text)?;
        if let Some(state) = &f.state {
            f.spec.check_state(state)?;
        }
        Ok(f)
    }

    pub fn initial_state(&self) -> RegisterState {
        self.state.clone().unwrap_or_else(|| self.spec.zero_state())
    }
}

fn bundled(text: &str) -> Fixture {
    Fixture::parse(text).expect("bundled fixture is valid")
}

/// `q_1 = 1, q_2 = beta, q_3 = beta`, state `(1, 1+beta, beta; 5 - beta + 4 pi beta)`.
pub fn example1() -> Fixture {
    bundled(EXAMPLE1_JSON)
}

/// `q_1 = 1, q_2 = 0, q_3 = 1 + beta`, zero state.
pub fn example2() -> Fixture {
    bundled(EXAMPLE2_JSON)
}

/// `q_1 = 1 + beta, q_2 = 0, q_3 = beta, q_4 = beta`,
/// state `(1, 1+beta, 1+beta, beta; 5 - beta + 4 pi beta)`.
pub fn example3() -> Fixture {
    bundled(EXAMPLE3_JSON)
}

pub fn zero_state() -> Fixture {
    bundled(ZERO_STATE_JSON)
}

pub fn trivial() -> Fixture {
    bundled(TRIVIAL_JSON)
}

pub fn table1() -> Vec<Table1Row> {
    parse_table1(TABLE1_CSV.as_bytes()).expect("bundled table is valid")
}

pub fn table2() -> SequenceTable {
    SequenceTable::parse(TABLE2_CSV.as_bytes()).expect("bundled table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_loads() {
        assert_eq!(example1().spec.len(), 3);
        assert_eq!(example3().spec.len(), 4);
        assert!(example2().state.is_none());
        assert_eq!(trivial().spec.len(), 1);
        assert_eq!(table1().len(), 52);
        let t2 = table2();
        assert_eq!(t2.columns(), 36);
        assert_eq!(t2.rows().len(), 6);
    }

    #[test]
    fn first_example_replays_the_trace() {
        let f = example1();
        let run = SequenceTable::from_run(&f.spec, &f.initial_state(), 36, None).unwrap();
        assert_eq!(run, table2());
        assert_eq!(run.to_csv_string(), TABLE2_CSV);
    }

    #[test]
    fn bad_state_is_rejected() {
        let text = EXAMPLE1_JSON.replace("[[1, 0], [1, 1], [0, 1]]", "[[1, 0], [2, 1], [0, 1]]");
        assert!(matches!(Fixture::parse(&text), Err(FixtureError::State(_))));
        assert!(matches!(Fixture::parse("{"), Err(FixtureError::Json(_))));
    }
}
