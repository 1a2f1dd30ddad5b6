//! Conditional gating over spectra: IF gates, OR/AND composition, and the
//! gate expressions used by program rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::spectrum::{select_false, select_true, Spectrum};

/// Gates a frequency vector on the truth of one slot: entry `i` passes
/// when the source slot meets the polarity and target bit `i` is set.
/// Truth of a frequency is occurrence: `f >= 1`.
///
/// With 0/1 frequencies and positive polarity this is exactly the
/// Kronecker-delta matrix product `out_i = d(phi_x * y_i, 1) * phi_i`.
pub fn if_gate(x: usize, y: &[bool], phi: &[u64], polarity: bool) -> Result<Vec<u64>> {
    if x < 1 || x > phi.len() {
        return Err(Error::Validation(format!(
            "source slot {x} outside 1..{}",
            phi.len()
        )));
    }
    if y.len() != phi.len() {
        return Err(Error::Validation(format!(
            "target mask length {} does not match vector length {}",
            y.len(),
            phi.len()
        )));
    }
    let source_true = phi[x - 1] >= 1;
    let pass = if polarity { source_true } else { !source_true };
    Ok(phi
        .iter()
        .zip(y)
        .map(|(&f, &bit)| if pass && bit { f } else { 0 })
        .collect())
}

/// Raw direct-sum composition: block concatenation of the gate outputs.
pub fn direct_sum_concat(gates: &[Vec<u64>]) -> Result<Vec<u64>> {
    if gates.is_empty() {
        return Err(Error::Validation("cannot combine zero gate outputs".into()));
    }
    Ok(gates.concat())
}

fn check_equal_lengths(gates: &[Vec<u64>]) -> Result<usize> {
    if gates.is_empty() {
        return Err(Error::Validation("cannot combine zero gate outputs".into()));
    }
    let len = gates[0].len();
    if gates.iter().any(|g| g.len() != len) {
        return Err(Error::Dimension(
            "gate outputs must have equal lengths".into(),
        ));
    }
    Ok(len)
}

/// OR composition: the direct sum folded back to one block by entrywise
/// maximum, so an entry is occupied when any block occupies it.
pub fn or_combine(gates: &[Vec<u64>]) -> Result<Vec<u64>> {
    let len = check_equal_lengths(gates)?;
    let blocks = direct_sum_concat(gates)?;
    let mut out = vec![0u64; len];
    for (i, &f) in blocks.iter().enumerate() {
        let slot = i % len;
        out[slot] = out[slot].max(f);
    }
    Ok(out)
}

/// AND composition: iterated entrywise product, saturating so large
/// frequency products cannot wrap.
pub fn and_combine(gates: &[Vec<u64>]) -> Result<Vec<u64>> {
    let len = check_equal_lengths(gates)?;
    let mut out = vec![1u64; len];
    for g in gates {
        for (o, &f) in out.iter_mut().zip(g) {
            *o = o.saturating_mul(f);
        }
    }
    Ok(out)
}

/// A rule condition over measurement slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    /// Truth (or falsity) of one 1-based slot.
    Atom { slot: usize, polarity: bool },
    /// OR of the children.
    Any(Vec<Gate>),
    /// AND of the children.
    All(Vec<Gate>),
}

impl Gate {
    /// Largest slot index referenced, for validation against a system.
    pub fn max_slot(&self) -> usize {
        match self {
            Gate::Atom { slot, .. } => *slot,
            Gate::Any(children) | Gate::All(children) => {
                children.iter().map(Gate::max_slot).max().unwrap_or(0)
            }
        }
    }

    pub fn validate(&self, slots: usize) -> Result<()> {
        match self {
            Gate::Atom { slot, .. } => {
                if *slot < 1 || *slot > slots {
                    return Err(Error::Validation(format!(
                        "condition references slot {slot}, system has {slots}"
                    )));
                }
            }
            Gate::Any(children) | Gate::All(children) => {
                if children.is_empty() {
                    return Err(Error::Validation(
                        "OR/AND condition needs at least one operand".into(),
                    ));
                }
                for c in children {
                    c.validate(slots)?;
                }
            }
        }
        Ok(())
    }
}

/// Gate output carried in the full interleaved spectrum domain, so AND of
/// a true-atom and a false-atom cannot spuriously cancel: every passing
/// atom contributes the whole spectrum, whose paired entries are never
/// both zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateValue {
    pub vector: Vec<u64>,
    pub fired: bool,
}

/// Evaluates a gate expression against a spectrum.
///
/// An atom passes when its slot shows at least one occurrence at the
/// requested polarity; its value is the spectrum gated on that entry.
/// Composition is entrywise max (OR) and saturating product (AND); the
/// expression fires exactly when its vector is nonzero.
pub fn eval_gate(gate: &Gate, spectrum: &Spectrum) -> Result<GateValue> {
    gate.validate(spectrum.slots())?;
    let vector = eval_vector(gate, spectrum)?;
    let fired = vector.iter().any(|&f| f >= 1);
    Ok(GateValue { vector, fired })
}

fn eval_vector(gate: &Gate, spectrum: &Spectrum) -> Result<Vec<u64>> {
    match gate {
        Gate::Atom { slot, polarity } => {
            let entries = spectrum.entries();
            // Index of the spectrum entry whose occurrence the atom tests.
            let idx = 2 * (slot - 1) + if *polarity { 0 } else { 1 };
            let y = vec![true; entries.len()];
            if_gate(idx + 1, &y, entries, true)
        }
        Gate::Any(children) => {
            let values: Result<Vec<Vec<u64>>> =
                children.iter().map(|c| eval_vector(c, spectrum)).collect();
            or_combine(&values?)
        }
        Gate::All(children) => {
            let values: Result<Vec<Vec<u64>>> =
                children.iter().map(|c| eval_vector(c, spectrum)).collect();
            and_combine(&values?)
        }
    }
}

/// Truth-table reading of a gate: atoms from the spectrum's occurrence
/// bits, Boolean connectives on top. The gate algebra must agree with
/// this on firing.
pub fn gate_truth(gate: &Gate, spectrum: &Spectrum) -> Result<bool> {
    gate.validate(spectrum.slots())?;
    Ok(match gate {
        Gate::Atom { slot, polarity } => {
            let t = select_true(spectrum)[slot - 1] >= 1;
            let f = select_false(spectrum)[slot - 1] >= 1;
            if *polarity {
                t
            } else {
                f
            }
        }
        Gate::Any(children) => {
            let mut any = false;
            for c in children {
                any |= gate_truth(c, spectrum)?;
            }
            any
        }
        Gate::All(children) => {
            let mut all = true;
            for c in children {
                all &= gate_truth(c, spectrum)?;
            }
            all
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::spectrum::Mode;

    #[test]
    fn if_gate_examples() {
        assert_eq!(
            if_gate(1, &[false, true], &[1, 7], true).unwrap(),
            vec![0, 7]
        );
        // Source false: zero vector for any mask.
        assert_eq!(
            if_gate(1, &[true, true], &[0, 7], true).unwrap(),
            vec![0, 0]
        );
        // All-ones mask with a true source passes the vector unchanged.
        assert_eq!(
            if_gate(2, &[true, true], &[3, 7], true).unwrap(),
            vec![3, 7]
        );
        // Negative polarity passes when the source is unoccupied.
        assert_eq!(
            if_gate(1, &[true, true], &[0, 7], false).unwrap(),
            vec![0, 7]
        );
    }

    #[test]
    fn if_gate_matches_delta_matrix_on_binary_vectors() {
        // Oracle: out_i = d(phi_x * y_i, 1) * phi_i computed literally.
        let slots = 3usize;
        for code in 0..1u32 << slots {
            let phi: Vec<u64> = (0..slots).map(|i| (code >> i & 1) as u64).collect();
            for mask in 0..1u32 << slots {
                let y: Vec<bool> = (0..slots).map(|i| mask >> i & 1 == 1).collect();
                for x in 1..=slots {
                    let got = if_gate(x, &y, &phi, true).unwrap();
                    let oracle: Vec<u64> = (0..slots)
                        .map(|i| {
                            let delta = phi[x - 1] * u64::from(y[i]);
                            if delta == 1 {
                                phi[i]
                            } else {
                                0
                            }
                        })
                        .collect();
                    assert_eq!(got, oracle, "phi {phi:?} y {y:?} x {x}");
                }
            }
        }
    }

    #[test]
    fn if_gate_bounds() {
        assert!(matches!(
            if_gate(0, &[true], &[1], true),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            if_gate(2, &[true], &[1], true),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            if_gate(1, &[true, true], &[1], true),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn combine_examples() {
        assert_eq!(
            or_combine(&[vec![0, 7], vec![0, 0]]).unwrap(),
            vec![0, 7]
        );
        assert_eq!(
            and_combine(&[vec![0, 7], vec![1, 0]]).unwrap(),
            vec![0, 0]
        );
        assert_eq!(
            direct_sum_concat(&[vec![0, 7], vec![1, 0]]).unwrap(),
            vec![0, 7, 1, 0]
        );
        assert!(or_combine(&[]).is_err());
        assert!(and_combine(&[]).is_err());
        assert!(matches!(
            or_combine(&[vec![1], vec![1, 2]]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn and_saturates() {
        let big = vec![u64::MAX, 2];
        assert_eq!(
            and_combine(&[big.clone(), big]).unwrap(),
            vec![u64::MAX, 4]
        );
    }

    #[test]
    fn gate_firing_matches_truth_table_exhaustively() {
        // All 0/1 spectra over 3 slots, all atoms and depth <= 2 nestings.
        let slots = 3usize;
        let atoms: Vec<Gate> = (1..=slots)
            .flat_map(|s| {
                [true, false]
                    .into_iter()
                    .map(move |p| Gate::Atom { slot: s, polarity: p })
            })
            .collect();
        let mut gates: Vec<Gate> = atoms.clone();
        for a in &atoms {
            for b in &atoms {
                gates.push(Gate::Any(vec![a.clone(), b.clone()]));
                gates.push(Gate::All(vec![a.clone(), b.clone()]));
                gates.push(Gate::Any(vec![
                    Gate::All(vec![a.clone(), b.clone()]),
                    b.clone(),
                ]));
                gates.push(Gate::All(vec![
                    Gate::Any(vec![a.clone(), b.clone()]),
                    a.clone(),
                ]));
            }
        }
        for truth_mask in 0..1u32 << slots {
            let counts: Vec<u64> = (0..slots).map(|r| (truth_mask >> r & 1) as u64).collect();
            let spectrum = Spectrum::from_true_counts(&counts, 1, Mode::Exact).unwrap();
            for gate in &gates {
                let value = eval_gate(gate, &spectrum).unwrap();
                let truth = gate_truth(gate, &spectrum).unwrap();
                assert_eq!(
                    value.fired, truth,
                    "gate {gate:?} spectrum {:?}",
                    spectrum.entries()
                );
            }
        }
    }

    #[test]
    fn mixed_and_of_true_and_false_atoms_fires() {
        // Slot 1 true, slot 2 false: AND of those two facts must fire even
        // though the true/false selector vectors have disjoint support.
        let spectrum = Spectrum::from_true_counts(&[8, 0], 8, Mode::Exact).unwrap();
        let gate = Gate::All(vec![
            Gate::Atom { slot: 1, polarity: true },
            Gate::Atom { slot: 2, polarity: false },
        ]);
        let value = eval_gate(&gate, &spectrum).unwrap();
        assert!(value.fired);
        // And the converse polarity does not fire.
        let gate = Gate::All(vec![
            Gate::Atom { slot: 1, polarity: false },
            Gate::Atom { slot: 2, polarity: false },
        ]);
        assert!(!eval_gate(&gate, &spectrum).unwrap().fired);
    }

    #[test]
    fn gate_validation() {
        let spectrum = Spectrum::from_true_counts(&[1, 0], 1, Mode::Exact).unwrap();
        let bad = Gate::Atom { slot: 3, polarity: true };
        assert!(matches!(
            eval_gate(&bad, &spectrum),
            Err(Error::Validation(_))
        ));
        let empty = Gate::Any(vec![]);
        assert!(matches!(
            eval_gate(&empty, &spectrum),
            Err(Error::Validation(_))
        ));
        assert_eq!(
            Gate::All(vec![
                Gate::Atom { slot: 2, polarity: true },
                Gate::Any(vec![Gate::Atom { slot: 5, polarity: false }]),
            ])
            .max_slot(),
            5
        );
    }
}
