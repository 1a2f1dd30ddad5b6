//! Composite event-state systems and their subspace logic.
//!
//! A composite system is a finite product of even-dimensional subsystems.
//! Its standard basis indexes every joint configuration; propositions about
//! the system are closed subspaces of the product space, which form an
//! orthomodular (not distributive) lattice. Combined states span several
//! standard bases and receive fresh prime-product indices so they can be
//! measured as first-class propositions.

mod combined;
mod subspace;

pub use combined::{
    complementary_pair, make_combined_state, observable_extended, observable_standard,
    CombinedState, CombinedStateDocument, Observable,
};
pub use subspace::{
    compatibility, distributivity_witness, distributivity_witness_diagonal, random_subspace,
    random_unit_vector, DiagonalScanReport, PropositionKind, SubspaceProposition,
    WitnessReport,
};

use serde::{Deserialize, Serialize};

use crate::cap::check_dim;
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// One local state of one subsystem, the most primitive proposition the
/// model can express.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropositionalElement {
    pub subsystem: usize,
    pub local_state: usize,
    pub label: String,
}

/// Finite product of even-dimensional subsystems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeSystem {
    subsystem_dims: Vec<usize>,
    total_dim: usize,
    elements: Vec<PropositionalElement>,
}

/// Builds the composite of the given subsystem dimensions.
///
/// Every dimension must be even and positive; the product dimension is
/// subject to the global cap. Elements are enumerated subsystem-major with
/// placeholder labels `s<n>.<k>`; callers with named states install their
/// own labels afterwards.
pub fn build_composite(dims: &[usize]) -> Result<CompositeSystem> {
    if dims.is_empty() {
        return Err(Error::Validation(
            "composite system needs at least one subsystem".into(),
        ));
    }
    let mut total: usize = 1;
    for (n, &d) in dims.iter().enumerate() {
        if d == 0 || d % 2 != 0 {
            return Err(Error::Validation(format!(
                "subsystem {} has dimension {}, which is not a positive even integer",
                n + 1,
                d
            )));
        }
        total = total
            .checked_mul(d)
            .ok_or_else(|| Error::Capacity("composite dimension overflows usize".into()))?;
    }
    check_dim(total, "composite system")?;
    let mut elements = Vec::with_capacity(dims.iter().sum());
    for (n, &d) in dims.iter().enumerate() {
        for k in 0..d {
            elements.push(PropositionalElement {
                subsystem: n,
                local_state: k,
                label: format!("s{}.{}", n + 1, k),
            });
        }
    }
    Ok(CompositeSystem {
        subsystem_dims: dims.to_vec(),
        total_dim: total,
        elements,
    })
}

impl CompositeSystem {
    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    /// Product of the subsystem dimensions, i.e. the standard basis count.
    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn elements(&self) -> &[PropositionalElement] {
        &self.elements
    }

    /// Replaces the label of one propositional element.
    pub fn set_element_label(&mut self, subsystem: usize, local_state: usize, label: &str) -> Result<()> {
        let el = self
            .elements
            .iter_mut()
            .find(|e| e.subsystem == subsystem && e.local_state == local_state)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "no element for subsystem {subsystem} state {local_state}"
                ))
            })?;
        el.label = label.to_string();
        Ok(())
    }

    /// 1-based standard basis index of a joint configuration, given one
    /// 0-based local state per subsystem. The first subsystem varies
    /// slowest.
    pub fn standard_index(&self, locals: &[usize]) -> Result<usize> {
        if locals.len() != self.subsystem_dims.len() {
            return Err(Error::Dimension(format!(
                "expected {} local states, got {}",
                self.subsystem_dims.len(),
                locals.len()
            )));
        }
        let mut idx = 0usize;
        for (n, (&k, &d)) in locals.iter().zip(&self.subsystem_dims).enumerate() {
            if k >= d {
                return Err(Error::Domain(format!(
                    "local state {k} out of range for subsystem {} of dimension {d}",
                    n + 1
                )));
            }
            idx = idx * d + k;
        }
        Ok(idx + 1)
    }

    /// Inverse of [`standard_index`]: the joint configuration behind a
    /// 1-based standard index.
    pub fn standard_tuple(&self, index: usize) -> Result<Vec<usize>> {
        if index < 1 || index > self.total_dim {
            return Err(Error::Domain(format!(
                "standard index {index} outside 1..{}",
                self.total_dim
            )));
        }
        let mut rem = index - 1;
        let mut locals = vec![0usize; self.subsystem_dims.len()];
        for (n, &d) in self.subsystem_dims.iter().enumerate().rev() {
            locals[n] = rem % d;
            rem /= d;
        }
        Ok(locals)
    }

    /// All 1-based standard indices whose configuration puts `subsystem`
    /// in `local_state`.
    pub fn indices_with_local_state(&self, subsystem: usize, local_state: usize) -> Result<Vec<usize>> {
        let d = *self
            .subsystem_dims
            .get(subsystem)
            .ok_or_else(|| Error::Domain(format!("no subsystem {subsystem}")))?;
        if local_state >= d {
            return Err(Error::Domain(format!(
                "local state {local_state} out of range for dimension {d}"
            )));
        }
        let mut out = Vec::new();
        for m in 1..=self.total_dim {
            if self.standard_tuple(m)?[subsystem] == local_state {
                out.push(m);
            }
        }
        Ok(out)
    }

    pub fn to_document(&self) -> SystemDocument {
        SystemDocument {
            schema: crate::REPORT_SCHEMA.to_string(),
            dims: self.subsystem_dims.clone(),
            total_dim: self.total_dim,
            elements: self.elements.clone(),
        }
    }
}

/// Serialized form of a composite system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemDocument {
    pub schema: String,
    pub dims: Vec<usize>,
    pub total_dim: usize,
    pub elements: Vec<PropositionalElement>,
}

impl SystemDocument {
    pub fn restore(&self) -> Result<CompositeSystem> {
        let mut sys = build_composite(&self.dims)?;
        for el in &self.elements {
            sys.set_element_label(el.subsystem, el.local_state, &el.label)?;
        }
        Ok(sys)
    }
}

/// Tests a two-pair state for correlation: the squared amplitudes of the
/// matched outcome pairs (first and fourth, or second and third) must carry
/// at least `threshold` of the probability mass.
pub fn correlation_check(state: &Vector, threshold: f64) -> Result<bool> {
    if state.dim() != 4 {
        return Err(Error::Dimension(format!(
            "correlation check is defined on dimension 4, got {}",
            state.dim()
        )));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Domain(format!(
            "threshold must lie in [0, 1], got {threshold}"
        )));
    }
    let w = state.weights();
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "state must be normalized, squared mass is {total}"
        )));
    }
    Ok(w[0] + w[3] >= threshold || w[1] + w[2] >= threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Scalar;

    #[test]
    fn composite_dimensions() {
        let sys = build_composite(&[2, 2]).unwrap();
        assert_eq!(sys.total_dim(), 4);
        assert_eq!(sys.elements().len(), 4);

        let sys = build_composite(&[2]).unwrap();
        assert_eq!(sys.total_dim(), 2);
        assert_eq!(sys.elements().len(), 2);

        let sys = build_composite(&[2, 4, 2]).unwrap();
        assert_eq!(sys.total_dim(), 16);
        assert_eq!(sys.elements().len(), 8);
    }

    #[test]
    fn odd_dimension_rejected() {
        assert!(matches!(build_composite(&[3]), Err(Error::Validation(_))));
        assert!(matches!(build_composite(&[2, 5]), Err(Error::Validation(_))));
        assert!(matches!(build_composite(&[0]), Err(Error::Validation(_))));
        assert!(matches!(build_composite(&[]), Err(Error::Validation(_))));
    }

    #[test]
    fn oversized_composite_rejected() {
        assert!(matches!(
            build_composite(&[4096, 2]),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn element_enumeration_is_subsystem_major() {
        let sys = build_composite(&[2, 4]).unwrap();
        let el = sys.elements();
        assert_eq!((el[0].subsystem, el[0].local_state), (0, 0));
        assert_eq!((el[1].subsystem, el[1].local_state), (0, 1));
        assert_eq!((el[2].subsystem, el[2].local_state), (1, 0));
        assert_eq!((el[5].subsystem, el[5].local_state), (1, 3));
        assert_eq!(el[0].label, "s1.0");
        assert_eq!(el[5].label, "s2.3");
    }

    #[test]
    fn index_round_trip() {
        let sys = build_composite(&[2, 4, 2]).unwrap();
        for m in 1..=16 {
            let tuple = sys.standard_tuple(m).unwrap();
            assert_eq!(sys.standard_index(&tuple).unwrap(), m);
        }
        // First subsystem is the slow axis.
        assert_eq!(sys.standard_index(&[0, 0, 0]).unwrap(), 1);
        assert_eq!(sys.standard_index(&[0, 0, 1]).unwrap(), 2);
        assert_eq!(sys.standard_index(&[0, 1, 0]).unwrap(), 3);
        assert_eq!(sys.standard_index(&[1, 0, 0]).unwrap(), 9);
        assert!(sys.standard_index(&[2, 0, 0]).is_err());
        assert!(sys.standard_index(&[0, 0]).is_err());
        assert!(sys.standard_tuple(0).is_err());
        assert!(sys.standard_tuple(17).is_err());
    }

    #[test]
    fn local_state_fibers() {
        let sys = build_composite(&[2, 2]).unwrap();
        assert_eq!(sys.indices_with_local_state(0, 0).unwrap(), vec![1, 2]);
        assert_eq!(sys.indices_with_local_state(0, 1).unwrap(), vec![3, 4]);
        assert_eq!(sys.indices_with_local_state(1, 1).unwrap(), vec![2, 4]);
        assert!(sys.indices_with_local_state(2, 0).is_err());
        assert!(sys.indices_with_local_state(0, 2).is_err());
    }

    #[test]
    fn labels_can_be_installed_and_round_trip() {
        let mut sys = build_composite(&[4]).unwrap();
        sys.set_element_label(0, 0, "w").unwrap();
        sys.set_element_label(0, 1, "p").unwrap();
        assert_eq!(sys.elements()[0].label, "w");
        let doc = sys.to_document();
        let back = doc.restore().unwrap();
        assert_eq!(back, sys);
        assert!(sys.set_element_label(1, 0, "x").is_err());
    }

    #[test]
    fn correlation_examples() {
        let half = 1.0 / 2.0_f64.sqrt();
        let bell = Vector::from_real(&[half, 0.0, 0.0, half]).unwrap();
        assert!(correlation_check(&bell, 0.99).unwrap());

        let product = Vector::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(correlation_check(&product, 0.99).unwrap());

        let uniform = Vector::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(!correlation_check(&uniform, 0.99).unwrap());
    }

    #[test]
    fn correlation_detects_anti_pair() {
        let half = 1.0 / 2.0_f64.sqrt();
        let anti = Vector::from_real(&[0.0, half, -half, 0.0]).unwrap();
        assert!(correlation_check(&anti, 0.99).unwrap());
    }

    #[test]
    fn correlation_rejects_bad_input() {
        let unnormalized = Vector::from_real(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            correlation_check(&unnormalized, 0.99),
            Err(Error::Domain(_))
        ));
        let wrong_dim = Vector::from_real(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            correlation_check(&wrong_dim, 0.99),
            Err(Error::Dimension(_))
        ));
        let bell = Vector::new(vec![
            Scalar::new(1.0 / 2.0_f64.sqrt(), 0.0),
            Scalar::new(0.0, 0.0),
            Scalar::new(0.0, 0.0),
            Scalar::new(1.0 / 2.0_f64.sqrt(), 0.0),
        ])
        .unwrap();
        assert!(correlation_check(&bell, 1.5).is_err());
    }
}
