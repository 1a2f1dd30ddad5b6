//! Hypothesis programs: ordered rules of gated branches with reversible or
//! assignment actions, validated once at load time.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar};
use crate::logic::CompositeSystem;
use crate::machine::gates::Gate;

/// One effect a fired branch applies to the machine state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    /// Collapse a subsystem onto one local state, renormalizing.
    SetLocal { subsystem: usize, state: usize },
    /// Exchange two local states of a subsystem (a transposition, so
    /// always reversible).
    Swap {
        subsystem: usize,
        state_a: usize,
        state_b: usize,
    },
    /// Apply an invertible operator to one subsystem, renormalizing.
    /// The matrix is carried row-major as (re, im) pairs.
    Apply {
        name: String,
        subsystem: usize,
        matrix: Vec<Vec<(f64, f64)>>,
    },
    /// Reset a combined variable (by creation order) to its state (true)
    /// or into its complement (false).
    SetCombined { var: usize, truth: bool },
    /// Record a message in the run report.
    Print { message: String },
}

impl Action {
    fn describe(&self) -> String {
        match self {
            Action::SetLocal { subsystem, state } => format!("set s{}:{}", subsystem + 1, state),
            Action::Swap {
                subsystem,
                state_a,
                state_b,
            } => format!("swap s{}:{}<->{}", subsystem + 1, state_a, state_b),
            Action::Apply { name, subsystem, .. } => format!("apply {name} s{}", subsystem + 1),
            Action::SetCombined { var, truth } => format!("set combined {} {}", var + 1, truth),
            Action::Print { .. } => "print".to_string(),
        }
    }
}

/// One guarded alternative inside a rule. `gate: None` is the else branch
/// and always fires when reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub label: String,
    pub gate: Option<Gate>,
    pub actions: Vec<Action>,
}

/// An if/elif/else chain: the first branch whose gate fires wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    pub branches: Vec<Branch>,
}

/// A candidate program mapping the machine state at `t` to `t + 1`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HypothesisProgram {
    pub name: String,
    pub rules: Vec<Rule>,
}

impl HypothesisProgram {
    /// Stable content digest of the program, for report provenance.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("program serializes");
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Validates the program against a system with `slots` measurement
    /// slots and `combined_vars` combined variables. Invertibility of
    /// applied operators is checked here, not at step time.
    pub fn validate(
        &self,
        sys: &CompositeSystem,
        slots: usize,
        combined_vars: usize,
    ) -> Result<()> {
        for rule in &self.rules {
            if rule.branches.is_empty() {
                return Err(Error::Validation(format!(
                    "rule {} has no branches",
                    rule.name
                )));
            }
            for (bi, branch) in rule.branches.iter().enumerate() {
                if branch.gate.is_none() && bi + 1 != rule.branches.len() {
                    return Err(Error::Validation(format!(
                        "rule {}: else branch must come last",
                        rule.name
                    )));
                }
                if let Some(g) = &branch.gate {
                    g.validate(slots)?;
                }
                for action in &branch.actions {
                    validate_action(action, sys, combined_vars)?;
                }
            }
        }
        Ok(())
    }
}

fn validate_action(action: &Action, sys: &CompositeSystem, combined_vars: usize) -> Result<()> {
    let dims = sys.subsystem_dims();
    let check_local = |subsystem: usize, state: usize| -> Result<()> {
        let d = *dims.get(subsystem).ok_or_else(|| {
            Error::Validation(format!(
                "action references subsystem {}, system has {}",
                subsystem + 1,
                dims.len()
            ))
        })?;
        if state >= d {
            return Err(Error::Validation(format!(
                "action references state {state} of subsystem {} with dimension {d}",
                subsystem + 1
            )));
        }
        Ok(())
    };
    match action {
        Action::SetLocal { subsystem, state } => check_local(*subsystem, *state),
        Action::Swap {
            subsystem,
            state_a,
            state_b,
        } => {
            check_local(*subsystem, *state_a)?;
            check_local(*subsystem, *state_b)
        }
        Action::Apply {
            name,
            subsystem,
            matrix,
        } => {
            check_local(*subsystem, 0)?;
            let d = dims[*subsystem];
            let m = action_matrix(matrix, d)
                .map_err(|e| Error::Validation(format!("operator {name}: {e}")))?;
            let det = m.det()?;
            if det.norm() < 1e-12 {
                return Err(Error::Validation(format!(
                    "operator {name} is not invertible (determinant {det})"
                )));
            }
            Ok(())
        }
        Action::SetCombined { var, .. } => {
            if *var >= combined_vars {
                return Err(Error::Validation(format!(
                    "action references combined variable {}, machine has {combined_vars}",
                    var + 1
                )));
            }
            Ok(())
        }
        Action::Print { .. } => Ok(()),
    }
}

/// Decodes a serialized operator into a matrix of the expected dimension.
pub fn action_matrix(rows: &[Vec<(f64, f64)>], dim: usize) -> Result<Matrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Dimension(format!(
            "operator must be {dim}x{dim} for its subsystem"
        )));
    }
    let entries: Vec<Scalar> = rows
        .iter()
        .flat_map(|r| r.iter().map(|&(re, im)| Scalar::new(re, im)))
        .collect();
    Matrix::new(dim, dim, entries)
}

/// Descriptive register materialized per rule: which slots its conditions
/// read, which slots its actions may write, and the key of the spectrum it
/// last consumed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Register {
    pub instruction: String,
    /// 1-based rule index within the program.
    pub index: usize,
    /// Source bits: slots read by any branch condition.
    pub source: Vec<bool>,
    /// Target bits: slots whose truth the actions may change.
    pub target: Vec<bool>,
    /// Memory key (t, k) of the spectrum consumed at the latest step.
    pub spectrum_key: Option<(u64, usize)>,
}

fn mark_gate_slots(gate: &Gate, bits: &mut [bool]) {
    match gate {
        Gate::Atom { slot, .. } => bits[*slot - 1] = true,
        Gate::Any(children) | Gate::All(children) => {
            for c in children {
                mark_gate_slots(c, bits);
            }
        }
    }
}

/// Builds the register skeletons for a validated program.
pub fn materialize_registers(
    program: &HypothesisProgram,
    sys: &CompositeSystem,
    slots: usize,
    combined_slot_ranges: &[(usize, usize)],
) -> Vec<Register> {
    program
        .rules
        .iter()
        .enumerate()
        .map(|(k, rule)| {
            let mut source = vec![false; slots];
            let mut target = vec![false; slots];
            let mut ops = Vec::new();
            for branch in &rule.branches {
                if let Some(g) = &branch.gate {
                    mark_gate_slots(g, &mut source);
                }
                for action in &branch.actions {
                    ops.push(action.describe());
                    match action {
                        Action::SetLocal { .. } | Action::Swap { .. } | Action::Apply { .. } => {
                            // A local action can change the truth of any
                            // standard configuration slot.
                            for m in 1..=sys.total_dim() {
                                target[m - 1] = true;
                            }
                        }
                        Action::SetCombined { var, .. } => {
                            if let Some(&(lo, hi)) = combined_slot_ranges.get(*var) {
                                for s in lo..=hi {
                                    target[s - 1] = true;
                                }
                            }
                        }
                        Action::Print { .. } => {}
                    }
                }
            }
            Register {
                instruction: ops.join("; "),
                index: k + 1,
                source,
                target,
                spectrum_key: None,
            }
        })
        .collect()
}
