//! The machine layer: measurement spectra over event slots, conditional
//! gates on those spectra, gated rule programs, the stepping executive
//! with its append-only spectrum memory, entropy-driven convergence, and
//! operator recovery from observed trajectories.

mod exec;
mod gates;
mod program;
mod search;
mod spectrum;

pub use exec::{
    run_until_converged, standard_entropy, CombinedVar, ConvergenceReport, Machine, MachineState,
    MemoryStore, RunConfig, RunOutcome, RunReport, StepRecord,
};
pub use gates::{
    and_combine, direct_sum_concat, eval_gate, gate_truth, if_gate, or_combine, Gate, GateValue,
};
pub use program::{
    action_matrix, materialize_registers, Action, Branch, HypothesisProgram, Register, Rule,
};
pub use search::{hypothesis_search, transport_nat_function, Family, IntMat};
pub use spectrum::{measure_spectrum, selector_matrix, Mode, Spectrum};
