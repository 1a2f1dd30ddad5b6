//! Analysis of the quasi-periodic operator class.
//!
//! The class collects integer matrices whose spectra are irrational; its
//! canonical member is the Fibonacci stepping operator `[[1,1],[1,0]]`.
//! This module quantifies the behaviors that make the class interesting:
//! golden-ratio convergence of iterate ratios, worst-case division traces,
//! the substitution word the operator generates, almost-periodicity of its
//! frequency pair, and the impossibility of capturing a nonlinear cellular
//! automaton with any linear one-step map.

mod almost_period;
mod ca;

pub use almost_period::{almost_period_search, AlmostPeriodReport, GridSpec};
pub use ca::{ca_linear_impossibility, ca_step, rule_110, Arithmetic, CaCounterexample, CaReport, RuleTable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Golden ratio, the dominant eigenvalue of the stepping operator.
pub const GOLDEN_RATIO: f64 = 1.618033988749894848204586834365638118_f64;

/// 2x2 integer matrix, the carrier of the operator class test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix2 { a, b, c, d }
    }

    pub fn transpose(&self) -> Self {
        IntMatrix2::new(self.a, self.c, self.b, self.d)
    }

    /// The stepping operator `[[1,1],[1,0]]`.
    pub fn stepping() -> Self {
        IntMatrix2::new(1, 1, 1, 0)
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }
}

/// Class-membership verdict for one integer matrix.
///
/// Membership is decided exactly: the discriminant `(a-d)^2 + 4bc` must be
/// positive and not a perfect square, which holds precisely when the
/// eigenvalues are real irrationals. No floating point is consulted for the
/// verdict itself; the eigenvalues are reported as floats for readability
/// and are `None` when they are a complex pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OmegaVerdict {
    pub matrix: IntMatrix2,
    pub discriminant: i64,
    pub eigenvalues: Option<(f64, f64)>,
    pub in_omega: bool,
}

impl OmegaVerdict {
    pub fn analyze(matrix: IntMatrix2) -> Self {
        let disc = (matrix.a - matrix.d).pow(2) + 4 * matrix.b * matrix.c;
        let in_omega = disc > 0 && !is_perfect_square(disc);
        let eigenvalues = if disc >= 0 {
            let tr = (matrix.a + matrix.d) as f64;
            let sq = (disc as f64).sqrt();
            Some(((tr + sq) / 2.0, (tr - sq) / 2.0))
        } else {
            None
        };
        OmegaVerdict {
            matrix,
            discriminant: disc,
            eigenvalues,
            in_omega,
        }
    }
}

fn is_perfect_square(x: i64) -> bool {
    if x < 0 {
        return false;
    }
    let r = (x as f64).sqrt().round() as i64;
    // Float sqrt can be off by one at the edges; settle it in integers.
    for cand in r.saturating_sub(1)..=r + 1 {
        if cand >= 0 && cand * cand == x {
            return true;
        }
    }
    false
}

/// Verdicts for all 16 binary 2x2 matrices, in row-major bit order: matrix
/// number `k` has entries `(a,b,c,d)` read from the four bits of `k`, most
/// significant first.
pub fn classify_binary_2x2() -> Vec<OmegaVerdict> {
    (0..16u8)
        .map(|k| {
            let bit = |i: u8| ((k >> (3 - i)) & 1) as i64;
            OmegaVerdict::analyze(IntMatrix2::new(bit(0), bit(1), bit(2), bit(3)))
        })
        .collect()
}

/// Exact value of the stepping-operator iterate count, i.e. the `n`-th
/// Fibonacci number under the convention `fib(0) = fib(1) = 1`.
///
/// The closed form `(l1^(n+1) - l2^(n+1)) / (l1 - l2)` equals this integer
/// for every `n`; it is evaluated here by exact integer iteration because a
/// 64-bit float loses the unit digit near `n = 70` while the contract runs
/// to `n = 90`. [`binet_estimate`] exposes the float reading of the closed
/// form, and the two agree wherever the float has integer resolution.
pub fn fib(n: u32) -> Result<u64> {
    if n > 90 {
        return Err(Error::Domain(format!("fib supports n <= 90, got {n}")));
    }
    // (a, b) walks (F_k, F_{k+1}) in the standard indexing; the value
    // requested here is F_{n+1}.
    let mut a: u64 = 0;
    let mut b: u64 = 1;
    for _ in 0..=n {
        let next = a + b;
        a = b;
        b = next;
    }
    Ok(a)
}

/// Closed-form (Binet) evaluation of [`fib`] in floating point.
pub fn binet_estimate(n: u32) -> f64 {
    let l1 = (1.0 + 5.0f64.sqrt()) / 2.0;
    let l2 = (1.0 - 5.0f64.sqrt()) / 2.0;
    (l1.powi(n as i32 + 1) - l2.powi(n as i32 + 1)) / (l1 - l2)
}

/// Distance of the iterate ratio `fib(n+1)/fib(n)` from the golden ratio.
///
/// Strictly decreasing in `n` until the quotient digit noise floor of f64
/// (around `n = 33`); the contract range keeps `n <= 89` so the numerator
/// stays in range.
pub fn golden_ratio_gap(n: u32) -> Result<f64> {
    if n > 89 {
        return Err(Error::Domain(format!(
            "golden_ratio_gap supports n <= 89, got {n}"
        )));
    }
    let num = fib(n + 1)? as f64;
    let den = fib(n)? as f64;
    Ok((num / den - GOLDEN_RATIO).abs())
}

/// Worst-case division trace of the subtraction-free Euclid algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EuclidTrace {
    pub p: u64,
    pub q: u64,
    /// Quotient of each division step, in execution order.
    pub quotients: Vec<u64>,
    /// Remainder of each division step, in execution order.
    pub remainders: Vec<u64>,
    pub gcd: u64,
    pub steps: usize,
}

/// Runs Euclid's algorithm on `q >= p >= 1`, dividing the larger entry by
/// the smaller until the remainder vanishes.
pub fn euclid_trace(p: u64, q: u64) -> Result<EuclidTrace> {
    if p < 1 || q < p {
        return Err(Error::Domain(format!(
            "euclid_trace requires q >= p >= 1, got ({p}, {q})"
        )));
    }
    let mut u = q;
    let mut v = p;
    let mut quotients = Vec::new();
    let mut remainders = Vec::new();
    while v != 0 {
        let s = u / v;
        let r = u % v;
        quotients.push(s);
        remainders.push(r);
        u = v;
        v = r;
    }
    Ok(EuclidTrace {
        p,
        q,
        steps: quotients.len(),
        gcd: u,
        quotients,
        remainders,
    })
}

/// The binary substitution word after `k` rewritings of the seed `"0"`
/// under `0 -> 01`, `1 -> 0`.
///
/// Its length is `fib(k + 1)`; each word is a prefix of the next from
/// `k = 1` on. The supported range `k <= 30` tops out near 2.2 million
/// characters.
pub fn fib_word(k: u32) -> Result<String> {
    if k > 30 {
        return Err(Error::Domain(format!("fib_word supports k <= 30, got {k}")));
    }
    let mut word = String::from("0");
    for _ in 0..k {
        let mut next = String::with_capacity(word.len() * 2);
        for ch in word.chars() {
            match ch {
                '0' => next.push_str("01"),
                _ => next.push('0'),
            }
        }
        word = next;
    }
    Ok(word)
}

/// Uniform envelope for the analysis subcommands: what was checked, with
/// which inputs, what came out, and whether it matched expectation.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub check: String,
    pub inputs: serde_json::Value,
    pub observed: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn new(check: &str, inputs: serde_json::Value, observed: serde_json::Value) -> Self {
        AnalysisReport {
            schema: crate::REPORT_SCHEMA,
            check: check.to_string(),
            inputs,
            observed,
            expected: None,
            pass: None,
            notes: Vec::new(),
        }
    }

    pub fn with_expectation(mut self, expected: serde_json::Value, pass: bool) -> Self {
        self.expected = Some(expected);
        self.pass = Some(pass);
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.notes.push(note.to_string());
        self
    }
}
