//! Linear realizability scan for a one-step cellular automaton map.
//!
//! A three-cell window with zero boundary evolves under a local rule table;
//! the scan asks whether any binary 3x3 matrix reproduces that one-step map
//! on all eight window states. For rule 110 the answer is no, under plain
//! integer arithmetic and under arithmetic mod 2 alike, which pins the rule
//! outside the linear operator class.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local rule table indexed by the neighborhood `(left<<2)|(center<<1)|right`.
pub type RuleTable = [u8; 8];

/// The rule-110 table.
pub fn rule_110() -> RuleTable {
    let mut table = [0u8; 8];
    for k in 0..8 {
        table[k] = ((110 >> k) & 1) as u8;
    }
    table
}

/// Arithmetic in which candidate matrices act on the cell vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    Integer,
    Mod2,
}

/// One-step evolution of a three-cell window under zero boundary cells.
pub fn ca_step(table: &RuleTable, cells: [u8; 3]) -> [u8; 3] {
    let get = |i: isize| -> u8 {
        if (0..3).contains(&i) {
            cells[i as usize]
        } else {
            0
        }
    };
    let mut out = [0u8; 3];
    for i in 0..3isize {
        let idx = ((get(i - 1) << 2) | (get(i) << 1) | get(i + 1)) as usize;
        out[i as usize] = table[idx];
    }
    out
}

/// Candidate matrix that disagrees with the rule on some window state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaCounterexample {
    pub matrix: [[u8; 3]; 3],
    pub input: [u8; 3],
    /// What the matrix produced, before any comparison.
    pub output: [i64; 3],
    /// What the rule says the next window is.
    pub expected: [u8; 3],
}

/// Scan result over all 512 binary 3x3 candidates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaReport {
    /// Rule table keyed by neighborhood string, e.g. "110" -> 1.
    pub rule_table: BTreeMap<String, u8>,
    pub arithmetic: Arithmetic,
    pub candidates_checked: usize,
    /// Candidates reproducing the rule on all eight window states.
    pub matches: Vec<[[u8; 3]; 3]>,
    /// First failing window state for each rejected candidate.
    pub counterexamples: Vec<CaCounterexample>,
}

fn apply_candidate(m: &[[u8; 3]; 3], cells: [u8; 3], arith: Arithmetic) -> [i64; 3] {
    let mut out = [0i64; 3];
    for i in 0..3 {
        let mut acc = 0i64;
        for j in 0..3 {
            acc += m[i][j] as i64 * cells[j] as i64;
        }
        out[i] = match arith {
            Arithmetic::Integer => acc,
            Arithmetic::Mod2 => acc % 2,
        };
    }
    out
}

/// Tests every binary 3x3 matrix against the rule's one-step map, in
/// row-major bit order: candidate `k` has entry `(i,j)` equal to bit
/// `8 - (3i + j)` of `k`.
pub fn ca_linear_impossibility(table: &RuleTable, arith: Arithmetic) -> Result<CaReport> {
    if table.iter().any(|&v| v > 1) {
        return Err(Error::Validation(
            "rule table entries must be 0 or 1".into(),
        ));
    }
    let mut rule_table = BTreeMap::new();
    for (k, &v) in table.iter().enumerate() {
        rule_table.insert(format!("{:03b}", k), v);
    }

    let states: Vec<[u8; 3]> = (0..8u8).map(|s| [(s >> 2) & 1, (s >> 1) & 1, s & 1]).collect();
    let mut matches = Vec::new();
    let mut counterexamples = Vec::new();
    for code in 0..512u16 {
        let mut m = [[0u8; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = ((code >> (8 - (3 * i + j))) & 1) as u8;
            }
        }
        let mut failure = None;
        for &cells in &states {
            let expected = ca_step(table, cells);
            let output = apply_candidate(&m, cells, arith);
            if (0..3).any(|i| output[i] != expected[i] as i64) {
                failure = Some(CaCounterexample {
                    matrix: m,
                    input: cells,
                    output,
                    expected,
                });
                break;
            }
        }
        match failure {
            None => matches.push(m),
            Some(cx) => counterexamples.push(cx),
        }
    }

    Ok(CaReport {
        rule_table,
        arithmetic: arith,
        candidates_checked: 512,
        matches,
        counterexamples,
    })
}
