//! Machine execution: event-state registers, the append-only spectrum
//! store, single stepping, and the entropy-convergence driver.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{tensor_matrix, von_neumann_entropy, Matrix, Scalar, Vector};
use crate::logic::{CombinedState, CombinedStateDocument, CompositeSystem, SystemDocument};
use crate::machine::gates::eval_gate;
use crate::machine::program::{
    action_matrix, materialize_registers, Action, HypothesisProgram, Register,
};
use crate::machine::spectrum::{
    exact_true_counts, multinomial_counts, Mode, Spectrum,
};
use crate::REPORT_SCHEMA;

/// A combined variable held by the machine: its defining state, a label,
/// and a private register vector that carries its current assignment.
#[derive(Debug, Clone)]
pub struct CombinedVar {
    label: String,
    spec: CombinedState,
    vector: Vector,
}

impl CombinedVar {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spec(&self) -> &CombinedState {
        &self.spec
    }

    pub fn vector(&self) -> &Vector {
        &self.vector
    }
}

/// Full machine state: the composite system, the main state vector, and
/// the combined variables in creation order.
#[derive(Debug, Clone)]
pub struct MachineState {
    sys: CompositeSystem,
    main: Vector,
    combined: Vec<CombinedVar>,
}

impl MachineState {
    /// Builds a state from an explicit main vector, which must match the
    /// system dimension and be normalized to within 1e-9.
    pub fn new(sys: CompositeSystem, main: Vector) -> Result<Self> {
        if main.dim() != sys.total_dim() {
            return Err(Error::Dimension(format!(
                "state dimension {} does not match system dimension {}",
                main.dim(),
                sys.total_dim()
            )));
        }
        main.check_finite()?;
        if (main.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "state vector must be normalized, got norm {}",
                main.norm()
            )));
        }
        Ok(Self {
            sys,
            main: main.normalize()?,
            combined: Vec::new(),
        })
    }

    /// Starts in the pure standard configuration with 1-based `index`.
    pub fn standard_basis(sys: CompositeSystem, index: usize) -> Result<Self> {
        if index < 1 || index > sys.total_dim() {
            return Err(Error::Domain(format!(
                "standard index {index} outside 1..{}",
                sys.total_dim()
            )));
        }
        let main = Vector::basis(sys.total_dim(), index - 1)?;
        Self::new(sys, main)
    }

    /// Registers a combined variable, initially assigned to its own
    /// state. Its register indices (the combined index and its companion
    /// indices) must not collide with any already registered variable.
    pub fn add_combined(&mut self, label: &str, spec: CombinedState) -> Result<usize> {
        if spec.total_dim() != self.sys.total_dim() {
            return Err(Error::Dimension(format!(
                "combined state built over dimension {}, machine has {}",
                spec.total_dim(),
                self.sys.total_dim()
            )));
        }
        let mut new_ids: BTreeSet<u64> = BTreeSet::new();
        new_ids.insert(spec.index());
        new_ids.extend(spec.companion_indices());
        for var in &self.combined {
            let mut ids: BTreeSet<u64> = BTreeSet::new();
            ids.insert(var.spec.index());
            ids.extend(var.spec.companion_indices());
            if !ids.is_disjoint(&new_ids) {
                return Err(Error::Validation(format!(
                    "register indices of {label} collide with {}: both claim {:?}",
                    var.label,
                    ids.intersection(&new_ids).collect::<Vec<_>>()
                )));
            }
        }
        let vector = spec.vector().clone();
        self.combined.push(CombinedVar {
            label: label.to_string(),
            spec,
            vector,
        });
        Ok(self.combined.len() - 1)
    }

    pub fn sys(&self) -> &CompositeSystem {
        &self.sys
    }

    pub fn main(&self) -> &Vector {
        &self.main
    }

    pub fn combined(&self) -> &[CombinedVar] {
        &self.combined
    }

    /// Total measurement slots: one per standard configuration, then for
    /// each combined variable one slot for its state and one per
    /// companion, in creation order.
    pub fn slots(&self) -> usize {
        self.sys.total_dim()
            + self
                .combined
                .iter()
                .map(|v| 1 + v.spec.companion_bases().len())
                .sum::<usize>()
    }

    /// Register index carried by each slot: the standard index for
    /// standard slots, the combined / companion indices for the rest.
    pub fn slot_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = (1..=self.sys.total_dim() as u64).collect();
        for var in &self.combined {
            ids.push(var.spec.index());
            ids.extend(var.spec.companion_indices());
        }
        ids
    }

    /// Human-readable slot labels, aligned with [`slot_ids`].
    pub fn slot_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = (1..=self.sys.total_dim())
            .map(|m| self.standard_label(m))
            .collect();
        for var in &self.combined {
            labels.push(var.label.clone());
            for j in 1..=var.spec.companion_bases().len() {
                labels.push(format!("{}^{j}", var.label));
            }
        }
        labels
    }

    /// 1-based inclusive slot ranges claimed by each combined variable.
    pub fn combined_slot_ranges(&self) -> Vec<(usize, usize)> {
        let mut ranges = Vec::with_capacity(self.combined.len());
        let mut next = self.sys.total_dim() + 1;
        for var in &self.combined {
            let width = 1 + var.spec.companion_bases().len();
            ranges.push((next, next + width - 1));
            next += width;
        }
        ranges
    }

    /// Joint label of a standard configuration, e.g. `s1.0&s2.1`.
    pub fn standard_label(&self, index: usize) -> String {
        let tuple = match self.sys.standard_tuple(index) {
            Ok(t) => t,
            Err(_) => return format!("#{index}"),
        };
        let parts: Vec<String> = tuple
            .iter()
            .enumerate()
            .map(|(n, &k)| {
                self.sys
                    .elements()
                    .iter()
                    .find(|e| e.subsystem == n && e.local_state == k)
                    .map(|e| e.label.clone())
                    .unwrap_or_else(|| format!("s{}.{k}", n + 1))
            })
            .collect();
        parts.join("&")
    }

    /// Occurrence probability of each slot: standard weights from the
    /// main vector, then each variable's overlap with its state and its
    /// companions.
    pub fn slot_probs(&self) -> Result<Vec<f64>> {
        let mut probs = self.main.weights();
        for var in &self.combined {
            probs.push(var.spec.vector().inner(&var.vector)?.norm_sqr());
            for c in var.spec.companion_bases() {
                probs.push(c.inner(&var.vector)?.norm_sqr());
            }
        }
        Ok(probs)
    }

    fn apply_action(&mut self, action: &Action, prints: &mut Vec<String>) -> Result<()> {
        match action {
            Action::SetLocal { subsystem, state } => self.set_local(*subsystem, *state),
            Action::Swap {
                subsystem,
                state_a,
                state_b,
            } => self.swap_local(*subsystem, *state_a, *state_b),
            Action::Apply {
                name,
                subsystem,
                matrix,
            } => self.apply_operator(name, *subsystem, matrix),
            Action::SetCombined { var, truth } => self.set_combined(*var, *truth),
            Action::Print { message } => {
                prints.push(message.clone());
                Ok(())
            }
        }
    }

    /// Collapses one subsystem onto a local state: all probability mass
    /// of each fiber moves to the configuration with that local state.
    /// This is an assignment, not a reversible evolution, so relative
    /// phases inside a fiber are discarded.
    fn set_local(&mut self, subsystem: usize, state: usize) -> Result<()> {
        let dims = self.sys.subsystem_dims();
        let d = *dims.get(subsystem).ok_or_else(|| {
            Error::Domain(format!("no subsystem {}", subsystem + 1))
        })?;
        if state >= d {
            return Err(Error::Domain(format!(
                "local state {state} out of range for dimension {d}"
            )));
        }
        let mut out = Vector::zeros(self.sys.total_dim());
        for m in 1..=self.sys.total_dim() {
            let mut tuple = self.sys.standard_tuple(m)?;
            if tuple[subsystem] != state {
                continue;
            }
            let mut mass = 0.0;
            for k in 0..d {
                tuple[subsystem] = k;
                let idx = self.sys.standard_index(&tuple)?;
                mass += self.main.entry(idx - 1).norm_sqr();
            }
            out.set(m - 1, Scalar::new(mass.sqrt(), 0.0));
        }
        self.main = out.normalize()?;
        Ok(())
    }

    /// Exchanges two local states of a subsystem across every fiber: a
    /// permutation of the standard basis, hence reversible.
    fn swap_local(&mut self, subsystem: usize, state_a: usize, state_b: usize) -> Result<()> {
        let dims = self.sys.subsystem_dims();
        let d = *dims.get(subsystem).ok_or_else(|| {
            Error::Domain(format!("no subsystem {}", subsystem + 1))
        })?;
        if state_a >= d || state_b >= d {
            return Err(Error::Domain(format!(
                "swap states {state_a},{state_b} out of range for dimension {d}"
            )));
        }
        if state_a == state_b {
            return Ok(());
        }
        let mut out = self.main.clone();
        for m in 1..=self.sys.total_dim() {
            let mut tuple = self.sys.standard_tuple(m)?;
            if tuple[subsystem] == state_a {
                tuple[subsystem] = state_b;
                let partner = self.sys.standard_index(&tuple)?;
                out.set(partner - 1, self.main.entry(m - 1));
                out.set(m - 1, self.main.entry(partner - 1));
            }
        }
        self.main = out;
        Ok(())
    }

    /// Applies an invertible operator to one subsystem (identity on the
    /// others) and renormalizes.
    fn apply_operator(
        &mut self,
        name: &str,
        subsystem: usize,
        rows: &[Vec<(f64, f64)>],
    ) -> Result<()> {
        let dims = self.sys.subsystem_dims();
        let d = *dims.get(subsystem).ok_or_else(|| {
            Error::Domain(format!("no subsystem {}", subsystem + 1))
        })?;
        let op = action_matrix(rows, d)?;
        let mut full = Matrix::identity(1);
        for (n, &dn) in dims.iter().enumerate() {
            let factor = if n == subsystem {
                op.clone()
            } else {
                Matrix::identity(dn)
            };
            full = tensor_matrix(&full, &factor)?;
        }
        let moved = full.mul_vec(&self.main)?;
        self.main = moved.normalize().map_err(|_| {
            Error::Numeric(format!("operator {name} annihilated the state"))
        })?;
        Ok(())
    }

    /// Reassigns a combined variable: `true` puts its register on its own
    /// state, `false` on the first companion direction (inside the same
    /// support span but orthogonal to the state).
    fn set_combined(&mut self, var: usize, truth: bool) -> Result<()> {
        let count = self.combined.len();
        let v = self.combined.get_mut(var).ok_or_else(|| {
            Error::Domain(format!(
                "no combined variable {}, machine has {count}",
                var + 1
            ))
        })?;
        if truth {
            v.vector = v.spec.vector().clone();
        } else {
            let c = v.spec.companion_bases().first().ok_or_else(|| {
                Error::Degeneracy(format!(
                    "combined variable {} has no companion direction",
                    v.label
                ))
            })?;
            v.vector = c.clone();
        }
        Ok(())
    }
}

/// Append-only spectrum memory addressed by `(t, k)`: `k = 0` holds the
/// canonical spectrum of step `t`, `k >= 1` the copy consumed by rule `k`.
#[derive(Debug, Clone, Default)]
pub struct MemoryStore {
    records: Vec<((u64, usize), Spectrum)>,
    keys: BTreeSet<(u64, usize)>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, t: u64, k: usize, spectrum: Spectrum) -> Result<()> {
        if !self.keys.insert((t, k)) {
            return Err(Error::Validation(format!(
                "memory key ({t},{k}) already written; the store is append-only"
            )));
        }
        self.records.push(((t, k), spectrum));
        Ok(())
    }

    pub fn get(&self, t: u64, k: usize) -> Option<&Spectrum> {
        self.records
            .iter()
            .find(|((rt, rk), _)| *rt == t && *rk == k)
            .map(|(_, s)| s)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in insertion order.
    pub fn records(&self) -> impl Iterator<Item = (&(u64, usize), &Spectrum)> {
        self.records.iter().map(|(k, s)| (k, s))
    }
}

/// What one step produced: the measured spectrum, which branches fired,
/// any printed messages, and the step entropy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u64,
    pub entries: Vec<u64>,
    pub fired: Vec<String>,
    pub prints: Vec<String>,
    pub entropy: f64,
}

/// A loaded program together with the evolving machine state.
#[derive(Debug)]
pub struct Machine {
    program: HypothesisProgram,
    registers: Vec<Register>,
    state: MachineState,
    store: MemoryStore,
    t: u64,
    shots: u64,
    mode: Mode,
    rng: ChaCha8Rng,
}

impl Machine {
    /// Validates the program against the state and loads it.
    pub fn new(
        program: HypothesisProgram,
        state: MachineState,
        shots: u64,
        mode: Mode,
    ) -> Result<Self> {
        if shots < 1 {
            return Err(Error::Validation("shots must be at least 1".into()));
        }
        let slots = state.slots();
        program.validate(state.sys(), slots, state.combined().len())?;
        let registers =
            materialize_registers(&program, state.sys(), slots, &state.combined_slot_ranges());
        let seed = match mode {
            Mode::Exact => 0,
            Mode::Sampled { seed } => seed,
        };
        Ok(Self {
            program,
            registers,
            state,
            store: MemoryStore::new(),
            t: 0,
            shots,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn state(&self) -> &MachineState {
        &self.state
    }

    pub fn store(&self) -> &MemoryStore {
        &self.store
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn program(&self) -> &HypothesisProgram {
        &self.program
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    fn measure(&mut self) -> Result<Spectrum> {
        let probs = self.state.slot_probs()?;
        let total = self.state.sys().total_dim();
        let mode = self.mode;
        let shots = self.shots;
        let rng = &mut self.rng;
        let mut take_group = |group: &[f64]| -> Result<Vec<u64>> {
            match mode {
                Mode::Exact => Ok(exact_true_counts(group, shots)),
                Mode::Sampled { .. } => multinomial_counts(group, shots, &mut *rng),
            }
        };
        let mut counts = Vec::with_capacity(probs.len());
        counts.extend(take_group(&probs[..total])?);
        let mut offset = total;
        for var in self.state.combined() {
            let width = 1 + var.spec().companion_bases().len();
            counts.extend(take_group(&probs[offset..offset + width])?);
            offset += width;
        }
        Spectrum::from_true_counts(&counts, shots, mode)
    }

    /// Runs one step: measure, store the spectrum under `(t, 0)` and one
    /// alias per rule, let each rule's first firing branch act, and report
    /// the entropy of the step's standard spectrum.
    pub fn step(&mut self) -> Result<StepRecord> {
        self.t += 1;
        let t = self.t;
        let spectrum = self.measure()?;
        self.store.insert(t, 0, spectrum.clone())?;
        for k in 1..=self.program.rules.len() {
            self.store.insert(t, k, spectrum.clone())?;
            self.registers[k - 1].spectrum_key = Some((t, k));
        }
        let mut fired = Vec::new();
        let mut prints = Vec::new();
        let rules = self.program.rules.clone();
        for rule in &rules {
            for branch in &rule.branches {
                let hit = match &branch.gate {
                    Some(g) => eval_gate(g, &spectrum)?.fired,
                    None => true,
                };
                if hit {
                    fired.push(format!("{}.{}", rule.name, branch.label));
                    for action in &branch.actions {
                        self.state.apply_action(action, &mut prints)?;
                    }
                    break;
                }
            }
        }
        let entropy = standard_entropy(&spectrum, self.state.sys().total_dim())?;
        Ok(StepRecord {
            t,
            entries: spectrum.entries().to_vec(),
            fired,
            prints,
            entropy,
        })
    }
}

/// Entropy of the step's standard spectrum: normalized true counts of the
/// standard slots fed through the spectral entropy (bits).
pub fn standard_entropy(spectrum: &Spectrum, standard_slots: usize) -> Result<f64> {
    let entries = spectrum.entries();
    if entries.len() < 2 * standard_slots {
        return Err(Error::Dimension(format!(
            "spectrum has {} slots, expected at least {standard_slots}",
            entries.len() / 2
        )));
    }
    let counts: Vec<f64> = (0..standard_slots).map(|r| entries[2 * r] as f64).collect();
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numeric(
            "standard spectrum recorded no occurrences; entropy undefined".into(),
        ));
    }
    let weights: Vec<f64> = counts.iter().map(|c| c / total).collect();
    von_neumann_entropy(&weights)
}

/// How a convergence run is executed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RunConfig {
    pub epsilon: f64,
    pub max_steps: u64,
    pub shots: u64,
    pub mode: Mode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-9,
            max_steps: 64,
            shots: 1024,
            mode: Mode::Exact,
        }
    }
}

/// Entropy trace and verdict of a convergence run. `depth` is the first
/// step whose entropy fell below `epsilon`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub entropy_trace: Vec<f64>,
    pub epsilon: f64,
    pub depth: Option<u64>,
    pub decided_class: Option<String>,
    pub converged: bool,
}

/// Full machine-run document, stable under identical inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub program_name: String,
    pub program_digest: String,
    pub system: SystemDocument,
    pub combined: Vec<CombinedStateDocument>,
    pub combined_labels: Vec<String>,
    pub slot_labels: Vec<String>,
    pub slot_ids: Vec<u64>,
    pub shots: u64,
    pub epsilon: f64,
    pub max_steps: u64,
    pub mode: Mode,
    pub steps: Vec<StepRecord>,
    /// Branch labels that fired at least once over the run, in order of
    /// first firing.
    pub branches_fired: Vec<String>,
    pub entropy_trace: Vec<f64>,
    pub depth: Option<u64>,
    pub decided_class: Option<String>,
    pub converged: bool,
}

/// Everything a finished run hands back.
#[derive(Debug)]
pub struct RunOutcome {
    pub convergence: ConvergenceReport,
    pub report: RunReport,
    pub machine: Machine,
}

/// Dominant standard slot of a step (ties to the lowest index), labeled.
fn dominant_label(state: &MachineState, entries: &[u64]) -> Option<String> {
    let total = state.sys().total_dim();
    let mut best: Option<(u64, usize)> = None;
    for m in 1..=total {
        let c = entries[2 * (m - 1)];
        if best.map(|(bc, _)| c > bc).unwrap_or(true) {
            best = Some((c, m));
        }
    }
    best.map(|(_, m)| state.standard_label(m))
}

/// Steps the machine until the spectral entropy falls below `epsilon` or
/// `max_steps` is exhausted, collecting the full run document.
pub fn run_until_converged(
    program: HypothesisProgram,
    state: MachineState,
    config: RunConfig,
) -> Result<RunOutcome> {
    if !(config.epsilon > 0.0) || !config.epsilon.is_finite() {
        return Err(Error::Domain(format!(
            "epsilon must be a positive finite threshold, got {}",
            config.epsilon
        )));
    }
    let system_doc = state.sys().to_document();
    let combined_docs: Vec<CombinedStateDocument> =
        state.combined().iter().map(|v| v.spec().to_document()).collect();
    let combined_labels: Vec<String> =
        state.combined().iter().map(|v| v.label().to_string()).collect();
    let slot_labels = state.slot_labels();
    let slot_ids = state.slot_ids();
    let program_name = program.name.clone();
    let program_digest = program.digest();

    let mut machine = Machine::new(program, state, config.shots, config.mode)?;
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut entropy_trace = Vec::new();
    let mut depth = None;
    let mut decided_class = None;

    for _ in 0..config.max_steps {
        let record = machine.step()?;
        entropy_trace.push(record.entropy);
        let crossed = record.entropy < config.epsilon;
        if crossed {
            depth = Some(record.t);
            decided_class = dominant_label(machine.state(), &record.entries);
        }
        steps.push(record);
        if crossed {
            break;
        }
    }

    let mut branches_fired: Vec<String> = Vec::new();
    for record in &steps {
        for label in &record.fired {
            if !branches_fired.contains(label) {
                branches_fired.push(label.clone());
            }
        }
    }

    let converged = depth.is_some();
    let convergence = ConvergenceReport {
        entropy_trace: entropy_trace.clone(),
        epsilon: config.epsilon,
        depth,
        decided_class: decided_class.clone(),
        converged,
    };
    let report = RunReport {
        schema: REPORT_SCHEMA.to_string(),
        program_name,
        program_digest,
        system: system_doc,
        combined: combined_docs,
        combined_labels,
        slot_labels,
        slot_ids,
        shots: config.shots,
        epsilon: config.epsilon,
        max_steps: config.max_steps,
        mode: config.mode,
        steps,
        branches_fired,
        entropy_trace,
        depth,
        decided_class,
        converged,
    };
    Ok(RunOutcome {
        convergence,
        report,
        machine,
    })
}
