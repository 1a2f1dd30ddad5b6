//! `beta hypothesize <trajectory.json>`: operator recovery by exhaustive
//! search over a candidate family.

use std::path::Path;

use beta_core::machine::{hypothesis_search, Family};
use beta_core::omega::AnalysisReport;
use serde_json::json;

use crate::{fail, Emit, FamilyFlag, EXIT_DIAGNOSTICS, EXIT_USAGE};

pub fn cmd_hypothesize(path: &Path, family: FamilyFlag, emit: &Emit) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(&format!("cannot read {}: {e}", path.display()), EXIT_USAGE),
    };
    let trajectory: Vec<Vec<i64>> = match serde_json::from_str(&text) {
        Ok(t) => t,
        Err(e) => {
            return fail(
                &format!(
                    "{} is not a JSON array of integer vectors: {e}",
                    path.display()
                ),
                EXIT_DIAGNOSTICS,
            )
        }
    };
    if trajectory.is_empty() {
        return fail("trajectory is empty; nothing constrains an operator", EXIT_USAGE);
    }
    if trajectory.len() < 2 {
        return fail(
            "trajectory has a single point; at least two are needed to constrain an operator",
            EXIT_USAGE,
        );
    }

    let (fam, family_name) = match family {
        FamilyFlag::Binary2x2 => (Family::Binary2x2, "binary2x2"),
        FamilyFlag::Binary3x3 => (Family::Binary3x3, "binary3x3"),
    };
    let candidate_count = match fam.candidates() {
        Ok(c) => c.len(),
        Err(e) => return fail(&e.to_string(), EXIT_USAGE),
    };
    let matches = match hypothesis_search(&trajectory, &fam) {
        Ok(m) => m,
        // The trajectory was syntactically fine but inconsistent with the
        // family's shape: a content problem, reported as diagnostics.
        Err(e) => return fail(&e.to_string(), EXIT_DIAGNOSTICS),
    };

    // Every reported match reproduces each observed transition in exact
    // integer arithmetic; the flag records that no tolerance was involved.
    let match_docs: Vec<serde_json::Value> = matches
        .iter()
        .map(|m| json!({ "rows": m.rows(), "exact": true }))
        .collect();
    let report = AnalysisReport::new(
        "hypothesize",
        json!({
            "trajectory": trajectory,
            "family": family_name,
            "candidates": candidate_count,
        }),
        json!({
            "matches": match_docs,
            "match_count": matches.len(),
            "unique": matches.len() == 1,
        }),
    );

    let mut lines = Vec::new();
    lines.push(format!(
        "{} of {candidate_count} candidates reproduce the {}-point trajectory (exact integer arithmetic)",
        matches.len(),
        trajectory.len()
    ));
    for m in &matches {
        lines.push(format!("  {:?}", m.rows()));
    }
    if matches.len() == 1 {
        lines.push("the operator is uniquely determined within this family".to_string());
    }
    emit.finish(&report, &lines.join("\n"))
}
