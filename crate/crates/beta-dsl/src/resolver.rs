//! Binds a parsed tree to the simulation core: builds the composite
//! system, registers combined variables, lowers conditions to gates and
//! actions to machine instructions, and assembles the run configuration.
//!
//! Every binding failure becomes a positioned diagnostic; resolution
//! succeeds only when no error-severity diagnostic was produced.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use beta_core::linalg::Scalar;
use beta_core::logic::{build_composite, make_combined_state, CompositeSystem};
use beta_core::machine::{
    Action, Branch, Gate, HypothesisProgram, MachineState, Mode, Rule, RunConfig,
};

use crate::ast::{ActionDecl, Ast, Cond, Constituent, Diagnostic, Span, StateRef};

/// A fully bound program, ready to execute.
#[derive(Debug, Clone)]
pub struct BoundProgram {
    /// Machine state at the initial configuration: the first standard
    /// basis state, with every combined variable assigned to its own
    /// combined state.
    pub state: MachineState,
    pub program: HypothesisProgram,
    pub config: RunConfig,
}

impl BoundProgram {
    pub fn system(&self) -> &CompositeSystem {
        self.state.sys()
    }
}

struct Names {
    /// subsystem name -> 0-based index
    subsystems: BTreeMap<String, usize>,
    /// (subsystem index) -> state name -> 0-based local state
    states: Vec<BTreeMap<String, usize>>,
    /// combined variable name -> creation index
    combined: BTreeMap<String, usize>,
    /// combined variable creation index -> 1-based slot range
    combined_slots: Vec<(usize, usize)>,
}

/// Resolves a tree into a bound program, or explains why it cannot be.
pub fn resolve(ast: &Ast) -> Result<BoundProgram, Vec<Diagnostic>> {
    let mut diagnostics: Vec<Diagnostic> = Vec::new();

    if ast.subsystems.is_empty() {
        diagnostics.push(Diagnostic::error(
            "program declares no subsystems (a `system { ... }` block is required)",
            Span::default(),
        ));
        return Err(diagnostics);
    }

    // --- subsystems -----------------------------------------------------
    let mut names = Names {
        subsystems: BTreeMap::new(),
        states: Vec::new(),
        combined: BTreeMap::new(),
        combined_slots: Vec::new(),
    };
    let mut dims = Vec::new();
    for (n, sub) in ast.subsystems.iter().enumerate() {
        if names.subsystems.insert(sub.name.clone(), n).is_some() {
            diagnostics.push(Diagnostic::error(
                format!("duplicate subsystem name `{}`", sub.name),
                sub.span,
            ));
        }
        if sub.states.len() % 2 != 0 {
            diagnostics.push(Diagnostic::error(
                format!(
                    "subsystem `{}` has odd dimension {}; states must come in pairs",
                    sub.name,
                    sub.states.len()
                ),
                sub.span,
            ));
        }
        let mut local = BTreeMap::new();
        for (k, state) in sub.states.iter().enumerate() {
            if local.insert(state.clone(), k).is_some() {
                diagnostics.push(Diagnostic::error(
                    format!("duplicate state `{}` in subsystem `{}`", state, sub.name),
                    sub.span,
                ));
            }
        }
        names.states.push(local);
        dims.push(sub.states.len().max(2));
    }
    if diagnostics.iter().any(|d| d.severity == crate::ast::Severity::Error) {
        return Err(diagnostics);
    }

    let mut sys = match build_composite(&dims) {
        Ok(sys) => sys,
        Err(e) => {
            diagnostics.push(Diagnostic::error(
                format!("cannot build the system: {e}"),
                ast.subsystems[0].span,
            ));
            return Err(diagnostics);
        }
    };
    for (n, sub) in ast.subsystems.iter().enumerate() {
        for (k, state) in sub.states.iter().enumerate() {
            if let Err(e) = sys.set_element_label(n, k, &format!("{}.{}", sub.name, state)) {
                diagnostics.push(Diagnostic::error(
                    format!("cannot label state: {e}"),
                    sub.span,
                ));
            }
        }
    }

    // --- machine state and combined variables ---------------------------
    let mut state = match MachineState::standard_basis(sys.clone(), 1) {
        Ok(state) => state,
        Err(e) => {
            diagnostics.push(Diagnostic::error(
                format!("cannot initialize the machine state: {e}"),
                ast.subsystems[0].span,
            ));
            return Err(diagnostics);
        }
    };

    for decl in &ast.combines {
        if names.subsystems.contains_key(&decl.name) {
            diagnostics.push(Diagnostic::error(
                format!(
                    "combined variable `{}` shadows a subsystem of the same name",
                    decl.name
                ),
                decl.span,
            ));
            continue;
        }
        if names.combined.contains_key(&decl.name) {
            diagnostics.push(Diagnostic::error(
                format!("duplicate combined variable `{}`", decl.name),
                decl.span,
            ));
            continue;
        }
        let mut support = Vec::new();
        let mut ok = true;
        for constituent in &decl.constituents {
            match resolve_constituent(constituent, &names, &sys, &mut diagnostics) {
                Some(index) => support.push(index),
                None => ok = false,
            }
        }
        if !ok {
            continue;
        }
        let amps: Vec<Scalar> = match &decl.amplitudes {
            Some(values) => {
                if values.len() != support.len() {
                    diagnostics.push(Diagnostic::error(
                        format!(
                            "`amps` lists {} values for {} constituents",
                            values.len(),
                            support.len()
                        ),
                        decl.span,
                    ));
                    continue;
                }
                if values.iter().any(|v| !v.is_finite()) {
                    diagnostics.push(Diagnostic::error(
                        "`amps` values must be finite",
                        decl.span,
                    ));
                    continue;
                }
                values.iter().map(|&v| Scalar::new(v, 0.0)).collect()
            }
            None => vec![Scalar::new(1.0, 0.0); support.len()],
        };
        let combined = match make_combined_state(&sys, &support, &amps) {
            Ok(c) => c,
            Err(e) => {
                diagnostics.push(Diagnostic::error(
                    format!("cannot build combined state `{}`: {e}", decl.name),
                    decl.span,
                ));
                continue;
            }
        };
        match state.add_combined(&decl.name, combined) {
            Ok(idx) => {
                names.combined.insert(decl.name.clone(), idx);
            }
            Err(e) => {
                diagnostics.push(Diagnostic::error(
                    format!("cannot register `{}`: {e}", decl.name),
                    decl.span,
                ));
            }
        }
    }
    names.combined_slots = state.combined_slot_ranges();

    // --- rules -----------------------------------------------------------
    let mut rules = Vec::new();
    let mut seen_rules: BTreeMap<String, ()> = BTreeMap::new();
    for rule in &ast.rules {
        if seen_rules.insert(rule.name.clone(), ()).is_some() {
            diagnostics.push(Diagnostic::error(
                format!("duplicate rule name `{}`", rule.name),
                rule.span,
            ));
            continue;
        }
        let mut branches = Vec::new();
        for (bi, branch) in rule.branches.iter().enumerate() {
            let gate = lower_cond(&branch.cond, true, &names, &sys, &mut diagnostics);
            let mut actions = Vec::new();
            for action in &branch.actions {
                if let Some(a) = lower_action(action, &names, &sys, &mut diagnostics) {
                    actions.push(a);
                }
            }
            // The machine prefixes the rule name when recording firings,
            // so the label is just the 1-based branch position.
            branches.push(Branch {
                label: format!("{}", bi + 1),
                gate,
                actions,
            });
        }
        rules.push(Rule {
            name: rule.name.clone(),
            branches,
        });
    }

    // --- run configuration ------------------------------------------------
    let mut config = RunConfig::default();
    let mut program_name = "main".to_string();
    if let Some(run) = &ast.run {
        program_name = run.name.clone();
        if !(run.epsilon > 0.0) || !run.epsilon.is_finite() {
            diagnostics.push(Diagnostic::error(
                format!(
                    "entropy threshold must be positive and finite, got {}",
                    run.epsilon
                ),
                run.span,
            ));
        }
        if run.max_steps == 0 {
            diagnostics.push(Diagnostic::error("step bound must be at least 1", run.span));
        }
        if run.shots == Some(0) {
            diagnostics.push(Diagnostic::error("`shots` must be at least 1", run.span));
        }
        config.epsilon = run.epsilon;
        config.max_steps = run.max_steps;
        if let Some(shots) = run.shots {
            config.shots = shots;
        }
        config.mode = match run.seed {
            Some(seed) => Mode::Sampled { seed },
            None => Mode::Exact,
        };
    }

    if diagnostics.iter().any(|d| d.severity == crate::ast::Severity::Error) {
        return Err(diagnostics);
    }

    let program = HypothesisProgram {
        name: program_name,
        rules,
    };
    // Safety net: the machine's own validation should agree with ours.
    if let Err(e) = program.validate(&sys, state.slots(), state.combined().len()) {
        diagnostics.push(Diagnostic::error(
            format!("bound program failed validation: {e}"),
            Span::default(),
        ));
        return Err(diagnostics);
    }

    Ok(BoundProgram {
        state,
        program,
        config,
    })
}

fn resolve_state_ref(
    r: &StateRef,
    names: &Names,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<(usize, usize)> {
    let sub = match names.subsystems.get(&r.subsystem) {
        Some(&n) => n,
        None => {
            diagnostics.push(Diagnostic::error(
                format!("unknown subsystem `{}`", r.subsystem),
                r.span,
            ));
            return None;
        }
    };
    let state = match names.states[sub].get(&r.state) {
        Some(&k) => k,
        None => {
            diagnostics.push(Diagnostic::error(
                format!("subsystem `{}` has no state `{}`", r.subsystem, r.state),
                r.span,
            ));
            return None;
        }
    };
    Some((sub, state))
}

/// Maps a combine constituent to the 1-based standard index it denotes.
fn resolve_constituent(
    constituent: &Constituent,
    names: &Names,
    sys: &CompositeSystem,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<usize> {
    match constituent {
        Constituent::Single(r) => {
            let (sub, state) = resolve_state_ref(r, names, diagnostics)?;
            let indices = sys.indices_with_local_state(sub, state).ok()?;
            if indices.len() != 1 {
                diagnostics.push(Diagnostic::error(
                    format!(
                        "`{}.{}` matches {} joint configurations; a combine constituent \
                         must pin exactly one (use a tuple naming every subsystem)",
                        r.subsystem,
                        r.state,
                        indices.len()
                    ),
                    r.span,
                ));
                return None;
            }
            Some(indices[0])
        }
        Constituent::Tuple(refs, span) => {
            let total = names.subsystems.len();
            let mut locals: Vec<Option<usize>> = vec![None; total];
            let mut ok = true;
            for r in refs {
                if let Some((sub, state)) = resolve_state_ref(r, names, diagnostics) {
                    if locals[sub].is_some() {
                        diagnostics.push(Diagnostic::error(
                            format!("subsystem `{}` named twice in the tuple", r.subsystem),
                            r.span,
                        ));
                        ok = false;
                    }
                    locals[sub] = Some(state);
                } else {
                    ok = false;
                }
            }
            if !ok {
                return None;
            }
            if locals.iter().any(Option::is_none) {
                diagnostics.push(Diagnostic::error(
                    format!(
                        "joint tuple must name all {} subsystems, names {}",
                        total,
                        refs.len()
                    ),
                    *span,
                ));
                return None;
            }
            let locals: Vec<usize> = locals.into_iter().map(Option::unwrap).collect();
            match sys.standard_index(&locals) {
                Ok(index) => Some(index),
                Err(e) => {
                    diagnostics.push(Diagnostic::error(format!("bad tuple: {e}"), *span));
                    None
                }
            }
        }
    }
}

/// Lowers a condition to a measurement gate. `positive` tracks negation
/// so `not` distributes through `any`/`all` by De Morgan; a negated
/// combined variable becomes the observation of one of its companion
/// (complement) directions.
fn lower_cond(
    cond: &Cond,
    positive: bool,
    names: &Names,
    sys: &CompositeSystem,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<Gate> {
    match cond {
        Cond::Any(children, _) => {
            let lowered: Option<Vec<Gate>> = children
                .iter()
                .map(|c| lower_cond(c, positive, names, sys, diagnostics))
                .collect();
            let lowered = lowered?;
            Some(if positive {
                Gate::Any(lowered)
            } else {
                Gate::All(lowered)
            })
        }
        Cond::All(children, _) => {
            let lowered: Option<Vec<Gate>> = children
                .iter()
                .map(|c| lower_cond(c, positive, names, sys, diagnostics))
                .collect();
            let lowered = lowered?;
            Some(if positive {
                Gate::All(lowered)
            } else {
                Gate::Any(lowered)
            })
        }
        Cond::Not(inner, _) => lower_cond(inner, !positive, names, sys, diagnostics),
        Cond::State(r) => {
            let (sub, state) = resolve_state_ref(r, names, diagnostics)?;
            let slots = sys.indices_with_local_state(sub, state).ok()?;
            let atoms: Vec<Gate> = slots
                .iter()
                .map(|&slot| Gate::Atom {
                    slot,
                    polarity: positive,
                })
                .collect();
            Some(match (atoms.len(), positive) {
                (1, _) => atoms.into_iter().next().expect("one atom"),
                // "observed in this state" over several joint slots;
                // negation: none of those slots saw it.
                (_, true) => Gate::Any(atoms),
                (_, false) => Gate::All(atoms),
            })
        }
        Cond::Combined(name, span) => {
            let var = match names.combined.get(name) {
                Some(&idx) => idx,
                None => {
                    diagnostics.push(Diagnostic::error(
                        format!("unknown combined variable `{name}`"),
                        *span,
                    ));
                    return None;
                }
            };
            let (start, end) = names.combined_slots[var];
            if positive {
                Some(Gate::Atom {
                    slot: start,
                    polarity: true,
                })
            } else {
                // The complement of the combined state spans the companion
                // directions: the negated atom is their observation.
                let atoms: Vec<Gate> = (start + 1..=end)
                    .map(|slot| Gate::Atom {
                        slot,
                        polarity: true,
                    })
                    .collect();
                if atoms.is_empty() {
                    diagnostics.push(Diagnostic::error(
                        format!("combined variable `{name}` has no complement direction"),
                        *span,
                    ));
                    return None;
                }
                Some(if atoms.len() == 1 {
                    atoms.into_iter().next().expect("one atom")
                } else {
                    Gate::Any(atoms)
                })
            }
        }
    }
}

/// The built-in operator catalog for `apply(name, subsystem)`.
/// All members are unitary, hence invertible.
fn builtin_operator(name: &str, dim: usize) -> Option<Vec<Vec<(f64, f64)>>> {
    match name {
        "hadamard" => {
            if dim != 2 {
                return None;
            }
            let h = FRAC_1_SQRT_2;
            Some(vec![
                vec![(h, 0.0), (h, 0.0)],
                vec![(h, 0.0), (-h, 0.0)],
            ])
        }
        // Cyclic shift of the local states: k -> k+1 (mod dim).
        "flip" => {
            let mut rows = vec![vec![(0.0, 0.0); dim]; dim];
            for k in 0..dim {
                rows[(k + 1) % dim][k] = (1.0, 0.0);
            }
            Some(rows)
        }
        // Diagonal phase ladder: state k gains phase 2*pi*k/dim.
        "phase" => {
            let mut rows = vec![vec![(0.0, 0.0); dim]; dim];
            for (k, row) in rows.iter_mut().enumerate() {
                let theta = 2.0 * PI * k as f64 / dim as f64;
                row[k] = (theta.cos(), theta.sin());
            }
            Some(rows)
        }
        _ => None,
    }
}

fn lower_action(
    action: &ActionDecl,
    names: &Names,
    sys: &CompositeSystem,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<Action> {
    match action {
        ActionDecl::SetState(r) => {
            let (sub, state) = resolve_state_ref(r, names, diagnostics)?;
            Some(Action::SetLocal {
                subsystem: sub,
                state,
            })
        }
        ActionDecl::SetCombined { name, truth, span } => {
            let var = match names.combined.get(name) {
                Some(&idx) => idx,
                None => {
                    diagnostics.push(Diagnostic::error(
                        format!("unknown combined variable `{name}`"),
                        *span,
                    ));
                    return None;
                }
            };
            Some(Action::SetCombined { var, truth: *truth })
        }
        ActionDecl::Swap {
            first,
            second,
            span,
        } => {
            let (sub, state_a) = resolve_state_ref(first, names, diagnostics)?;
            let state_b = match second {
                Some(second) => {
                    let (sub_b, state_b) = resolve_state_ref(second, names, diagnostics)?;
                    if sub_b != sub {
                        diagnostics.push(Diagnostic::error(
                            format!(
                                "cannot swap across subsystems `{}` and `{}`",
                                first.subsystem, second.subsystem
                            ),
                            *span,
                        ));
                        return None;
                    }
                    state_b
                }
                None => {
                    let dim = sys.subsystem_dims()[sub];
                    if dim != 2 {
                        diagnostics.push(Diagnostic::error(
                            format!(
                                "one-argument swap needs a two-state subsystem; `{}` has {dim}",
                                first.subsystem
                            ),
                            *span,
                        ));
                        return None;
                    }
                    1 - state_a
                }
            };
            Some(Action::Swap {
                subsystem: sub,
                state_a,
                state_b,
            })
        }
        ActionDecl::Apply {
            operator,
            subsystem,
            span,
        } => {
            let sub = match names.subsystems.get(subsystem) {
                Some(&n) => n,
                None => {
                    diagnostics.push(Diagnostic::error(
                        format!("unknown subsystem `{subsystem}`"),
                        *span,
                    ));
                    return None;
                }
            };
            let dim = sys.subsystem_dims()[sub];
            match builtin_operator(operator, dim) {
                Some(matrix) => Some(Action::Apply {
                    name: operator.clone(),
                    subsystem: sub,
                    matrix,
                }),
                None => {
                    diagnostics.push(Diagnostic::error(
                        format!(
                            "no operator `{operator}` for dimension {dim} \
                             (built-ins: hadamard (dim 2), flip, phase)"
                        ),
                        *span,
                    ));
                    None
                }
            }
        }
        ActionDecl::Print { message, .. } => Some(Action::Print {
            message: message.clone(),
        }),
    }
}
