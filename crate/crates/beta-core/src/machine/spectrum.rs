//! Joint spectra: per-slot true/false frequencies over a measurement batch.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// How a spectrum was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Expected counts, rounded half-to-even. Deterministic.
    Exact,
    /// Multinomial draws from a stream seeded once per run.
    Sampled { seed: u64 },
}

/// Frequency vector over measurement slots: entry `2r` counts the batches
/// in which slot `r` came out true, entry `2r+1` those in which its
/// orthocomplement did. The two always sum to the batch size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spectrum {
    entries: Vec<u64>,
    shots: u64,
    mode: Mode,
}

impl Spectrum {
    /// Wraps raw entries, enforcing the pairing invariant.
    pub fn new(entries: Vec<u64>, shots: u64, mode: Mode) -> Result<Self> {
        if shots < 1 {
            return Err(Error::Validation("shots must be at least 1".into()));
        }
        if entries.is_empty() || entries.len() % 2 != 0 {
            return Err(Error::Validation(format!(
                "spectrum needs a nonempty even entry count, got {}",
                entries.len()
            )));
        }
        for r in 0..entries.len() / 2 {
            let sum = entries[2 * r] + entries[2 * r + 1];
            if sum != shots {
                return Err(Error::Validation(format!(
                    "slot {} entries sum to {sum}, expected shots = {shots}",
                    r + 1
                )));
            }
        }
        Ok(Spectrum { entries, shots, mode })
    }

    /// Builds the interleaved spectrum from per-slot true counts.
    pub fn from_true_counts(true_counts: &[u64], shots: u64, mode: Mode) -> Result<Self> {
        let mut entries = Vec::with_capacity(true_counts.len() * 2);
        for (r, &t) in true_counts.iter().enumerate() {
            if t > shots {
                return Err(Error::Validation(format!(
                    "slot {} true count {t} exceeds shots {shots}",
                    r + 1
                )));
            }
            entries.push(t);
            entries.push(shots - t);
        }
        Spectrum::new(entries, shots, mode)
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of measurement slots.
    pub fn slots(&self) -> usize {
        self.entries.len() / 2
    }
}

/// The 0/1 selector matrix extracting the true (even) or false (odd)
/// entries of a spectrum: shape `slots x 2*slots`.
pub fn selector_matrix(slots: usize, polarity: bool) -> Vec<Vec<u64>> {
    let offset = if polarity { 0 } else { 1 };
    (0..slots)
        .map(|r| {
            let mut row = vec![0u64; 2 * slots];
            row[2 * r + offset] = 1;
            row
        })
        .collect()
}

fn apply_selector(matrix: &[Vec<u64>], entries: &[u64]) -> Vec<u64> {
    matrix
        .iter()
        .map(|row| row.iter().zip(entries).map(|(&a, &b)| a * b).sum())
        .collect()
}

/// Frequencies with which each slot came out true.
pub fn select_true(spectrum: &Spectrum) -> Vec<u64> {
    apply_selector(&selector_matrix(spectrum.slots(), true), spectrum.entries())
}

/// Frequencies with which each slot's orthocomplement came out true.
pub fn select_false(spectrum: &Spectrum) -> Vec<u64> {
    apply_selector(&selector_matrix(spectrum.slots(), false), spectrum.entries())
}

/// Per-slot probabilities of a normalized state over the standard basis.
pub fn state_probs(state: &Vector) -> Result<Vec<f64>> {
    let w = state.weights();
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "state must be normalized, squared mass is {total}"
        )));
    }
    Ok(w)
}

/// Expected counts under round-half-to-even; deterministic.
pub(crate) fn exact_true_counts(probs: &[f64], shots: u64) -> Vec<u64> {
    probs
        .iter()
        .map(|&p| {
            let c = (shots as f64 * p).round_ties_even();
            c.clamp(0.0, shots as f64) as u64
        })
        .collect()
}

/// One multinomial batch: each shot lands on one slot.
pub(crate) fn multinomial_counts<R: Rng>(probs: &[f64], shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    let dist = WeightedIndex::new(probs.iter().map(|&p| p.max(0.0)))
        .map_err(|e| Error::Numeric(format!("cannot sample from weights: {e}")))?;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        counts[dist.sample(rng)] += 1;
    }
    Ok(counts)
}

/// Measures a normalized state over its standard basis: in exact mode the
/// expected counts, in sampled mode one seeded multinomial batch.
pub fn measure_spectrum(state: &Vector, shots: u64, mode: Mode) -> Result<Spectrum> {
    if shots < 1 {
        return Err(Error::Validation("shots must be at least 1".into()));
    }
    let probs = state_probs(state)?;
    let counts = match mode {
        Mode::Exact => exact_true_counts(&probs, shots),
        Mode::Sampled { seed } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            multinomial_counts(&probs, shots, &mut rng)?
        }
    };
    Spectrum::from_true_counts(&counts, shots, mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_pure_state() {
        let state = Vector::basis(4, 0).unwrap();
        let s = measure_spectrum(&state, 8, Mode::Exact).unwrap();
        assert_eq!(s.entries(), &[8, 0, 0, 8, 0, 8, 0, 8]);
        assert_eq!(s.slots(), 4);
    }

    #[test]
    fn exact_balanced_state() {
        let half = 1.0 / 2.0_f64.sqrt();
        let state = Vector::from_real(&[half, 0.0, 0.0, half]).unwrap();
        let s = measure_spectrum(&state, 1000, Mode::Exact).unwrap();
        assert_eq!(select_true(&s), vec![500, 0, 0, 500]);
        assert_eq!(select_false(&s), vec![500, 1000, 1000, 500]);
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let half = 1.0 / 2.0_f64.sqrt();
        let state = Vector::from_real(&[half, 0.0, 0.0, half]).unwrap();
        let a = measure_spectrum(&state, 1024, Mode::Sampled { seed: 42 }).unwrap();
        let b = measure_spectrum(&state, 1024, Mode::Sampled { seed: 42 }).unwrap();
        assert_eq!(a, b);
        let c = measure_spectrum(&state, 1024, Mode::Sampled { seed: 43 }).unwrap();
        assert_ne!(a, c);
        // Counts concentrate on the two supported slots.
        let t = select_true(&a);
        assert_eq!(t[1], 0);
        assert_eq!(t[2], 0);
        assert_eq!(t[0] + t[3], 1024);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let state = Vector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            measure_spectrum(&state, 8, Mode::Exact),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn selector_examples() {
        let s = Spectrum::new(vec![3, 1, 0, 4], 4, Mode::Exact).unwrap();
        assert_eq!(select_true(&s), vec![3, 0]);
        assert_eq!(select_false(&s), vec![1, 4]);
    }

    #[test]
    fn selector_outputs_sum_to_shots() {
        let s = Spectrum::new(vec![3, 1, 0, 4, 2, 2], 4, Mode::Exact).unwrap();
        let t = select_true(&s);
        let f = select_false(&s);
        for r in 0..s.slots() {
            assert_eq!(t[r] + f[r], s.shots());
        }
    }

    #[test]
    fn all_true_spectrum_has_zero_false_selection() {
        let s = Spectrum::from_true_counts(&[5, 5, 5], 5, Mode::Exact).unwrap();
        assert_eq!(select_false(&s), vec![0, 0, 0]);
    }

    #[test]
    fn selector_matrix_shape() {
        let m = selector_matrix(3, true);
        assert_eq!(m.len(), 3);
        assert_eq!(m[0].len(), 6);
        assert_eq!(m[1][2], 1);
        let f = selector_matrix(3, false);
        assert_eq!(f[1][3], 1);
        assert_eq!(f[1][2], 0);
    }

    #[test]
    fn pairing_invariant_enforced() {
        assert!(matches!(
            Spectrum::new(vec![3, 2], 4, Mode::Exact),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Spectrum::new(vec![3], 3, Mode::Exact),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Spectrum::new(vec![], 3, Mode::Exact),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Spectrum::from_true_counts(&[5], 4, Mode::Exact),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Spectrum::new(vec![1, 0], 0, Mode::Exact),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn round_ties_even_in_exact_mode() {
        // p = 0.5 at shots = 1: expected 0.5 rounds to 0, not 1.
        let counts = exact_true_counts(&[0.5, 0.5], 1);
        assert_eq!(counts, vec![0, 0]);
        // 2.5 rounds to 2; 3.5 rounds to 4.
        let counts = exact_true_counts(&[0.5, 0.7], 5);
        assert_eq!(counts, vec![2, 4]);
    }
}
