//! Combined states: superpositions over several standard bases, promoted
//! to first-class propositions under fresh prime-product indices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt_extend, Matrix, Scalar, Vector};
use crate::logic::{CompositeSystem, PropositionKind, SubspaceProposition};
use crate::primes::nth_prime;

/// A unit vector spanning several standard bases, carrying its registry
/// index and the companion bases that complete its support span.
#[derive(Debug, Clone)]
pub struct CombinedState {
    support: Vec<usize>,
    amplitudes: Vec<Scalar>,
    vector: Vector,
    index: u64,
    companion_bases: Vec<Vector>,
    complement: SubspaceProposition,
    total_dim: usize,
}

impl CombinedState {
    /// 1-based standard indices the state spans, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Normalized amplitudes, aligned with [`support`].
    pub fn amplitudes(&self) -> &[Scalar] {
        &self.amplitudes
    }

    pub fn vector(&self) -> &Vector {
        &self.vector
    }

    /// Registry index: total dimension plus the product of the support's
    /// primes. Unique per support by factorization uniqueness.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn companion_bases(&self) -> &[Vector] {
        &self.companion_bases
    }

    /// Registry indices of the companion bases, following the main index.
    pub fn companion_indices(&self) -> Vec<u64> {
        (1..=self.companion_bases.len() as u64)
            .map(|j| self.index + j)
            .collect()
    }

    /// The proposition "this combined state obtains".
    pub fn proposition(&self) -> SubspaceProposition {
        SubspaceProposition::from_span(std::slice::from_ref(&self.vector))
            .expect("unit vector spans a line")
            .with_kind(PropositionKind::Combined(self.index))
    }

    /// Orthocomplement of the state within its support span: true exactly
    /// when the support is occupied but the combined state is false.
    pub fn complement(&self) -> &SubspaceProposition {
        &self.complement
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn to_document(&self) -> CombinedStateDocument {
        CombinedStateDocument {
            schema: crate::REPORT_SCHEMA.to_string(),
            total_dim: self.total_dim,
            support: self.support.clone(),
            amplitudes: self.amplitudes.iter().map(|a| (a.re, a.im)).collect(),
            index: self.index,
        }
    }
}

/// Serialized form of a combined state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombinedStateDocument {
    pub schema: String,
    pub total_dim: usize,
    pub support: Vec<usize>,
    pub amplitudes: Vec<(f64, f64)>,
    pub index: u64,
}

impl CombinedStateDocument {
    pub fn restore(&self, sys: &CompositeSystem) -> Result<CombinedState> {
        let amps: Vec<Scalar> = self.amplitudes.iter().map(|&(re, im)| Scalar::new(re, im)).collect();
        let state = make_combined_state(sys, &self.support, &amps)?;
        if state.index != self.index {
            return Err(Error::Validation(format!(
                "stored index {} does not match recomputed index {}",
                self.index, state.index
            )));
        }
        Ok(state)
    }
}

/// Builds a combined state over the given 1-based support with the given
/// amplitudes (normalized here; each must be individually nonzero).
///
/// Companion bases come from Gram-Schmidt runs of the support's standard
/// bases against the state: one support vector is absorbed by the span and
/// skipped, leaving exactly `support.len() - 1` companions.
pub fn make_combined_state(
    sys: &CompositeSystem,
    support: &[usize],
    amplitudes: &[Scalar],
) -> Result<CombinedState> {
    let dim = sys.total_dim();
    if support.len() < 2 {
        return Err(Error::Validation(
            "combined state needs at least two support indices".into(),
        ));
    }
    if support.len() != amplitudes.len() {
        return Err(Error::Validation(format!(
            "{} support indices but {} amplitudes",
            support.len(),
            amplitudes.len()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &m in support {
        if m < 1 || m > dim {
            return Err(Error::Validation(format!(
                "support index {m} outside 1..{dim}"
            )));
        }
        if !seen.insert(m) {
            return Err(Error::Validation(format!("duplicate support index {m}")));
        }
    }
    // Canonical ascending order keeps the index and companions independent
    // of how the caller listed the support.
    let mut pairs: Vec<(usize, Scalar)> = support.iter().copied().zip(amplitudes.iter().copied()).collect();
    pairs.sort_by_key(|&(m, _)| m);

    let norm2: f64 = pairs.iter().map(|(_, a)| a.norm_sqr()).sum();
    if norm2 < 1e-24 {
        return Err(Error::Degeneracy("amplitudes are numerically zero".into()));
    }
    let scale = norm2.sqrt();
    let mut vector = Vector::zeros(dim);
    let mut normed = Vec::with_capacity(pairs.len());
    for (m, a) in &pairs {
        let alpha = *a / Scalar::new(scale, 0.0);
        if alpha.norm() < 1e-12 {
            return Err(Error::Degeneracy(format!(
                "amplitude on support index {m} is numerically zero"
            )));
        }
        normed.push(alpha);
        vector.set(m - 1, alpha);
    }

    let mut product: u64 = 1;
    for (m, _) in &pairs {
        product = product
            .checked_mul(nth_prime(*m))
            .ok_or_else(|| Error::Capacity("prime-product index overflows u64".into()))?;
    }
    let index = (dim as u64)
        .checked_add(product)
        .ok_or_else(|| Error::Capacity("prime-product index overflows u64".into()))?;

    let mut companions: Vec<Vector> = Vec::new();
    let mut anchored = vec![vector.clone()];
    for (m, _) in &pairs {
        if companions.len() + 1 == pairs.len() {
            break;
        }
        let candidate = Vector::basis(dim, m - 1)?;
        match gram_schmidt_extend(&anchored, &candidate) {
            Ok(u) => {
                anchored.push(u.clone());
                companions.push(u);
            }
            // One support vector is linearly dependent on the state plus
            // the companions gathered so far; skip it.
            Err(Error::Degeneracy(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    if companions.len() + 1 != pairs.len() {
        return Err(Error::Degeneracy(
            "support span did not yield the expected companion count".into(),
        ));
    }

    let complement = if companions.is_empty() {
        SubspaceProposition::zero(dim)?
    } else {
        SubspaceProposition::from_span(&companions)?
    };

    Ok(CombinedState {
        support: pairs.iter().map(|&(m, _)| m).collect(),
        amplitudes: normed,
        vector,
        index,
        companion_bases: companions,
        complement,
        total_dim: dim,
    })
}

/// A Hermitian operator with a labeled point spectrum.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: Matrix,
    eigen_map: BTreeMap<u64, f64>,
}

impl Observable {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Index-to-eigenvalue association: standard indices map to
    /// themselves, combined indices to their registry values.
    pub fn eigen_map(&self) -> &BTreeMap<u64, f64> {
        &self.eigen_map
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        self.matrix.mul_vec(v)
    }
}

/// The standard readout operator: eigenvalue `m` on standard basis `m`.
pub fn observable_standard(sys: &CompositeSystem) -> Result<Observable> {
    let dim = sys.total_dim();
    let diag: Vec<f64> = (1..=dim).map(|m| m as f64).collect();
    let matrix = Matrix::diag_real(&diag);
    let eigen_map = (1..=dim as u64).map(|m| (m, m as f64)).collect();
    Ok(Observable { matrix, eigen_map })
}

/// The extended readout operator for a combined state: eigenvalue `m*` on
/// the state itself, `m* + j` on its `j`-th companion, and the standard
/// eigenvalue `m` on every basis outside the support.
pub fn observable_extended(sys: &CompositeSystem, combined: &CombinedState) -> Result<Observable> {
    let dim = sys.total_dim();
    if combined.total_dim() != dim {
        return Err(Error::Validation(format!(
            "combined state was built for dimension {}, system has {}",
            combined.total_dim(),
            dim
        )));
    }
    let mut matrix = Matrix::zeros(dim, dim);
    let mut eigen_map = BTreeMap::new();

    let phi = combined.vector();
    let p_phi = Matrix::outer(phi, phi);
    matrix = matrix.add(&p_phi.scale(Scalar::new(combined.index() as f64, 0.0)))?;
    eigen_map.insert(combined.index(), combined.index() as f64);

    for (j, c) in combined.companion_bases().iter().enumerate() {
        let value = combined.index() + 1 + j as u64;
        let p = Matrix::outer(c, c);
        matrix = matrix.add(&p.scale(Scalar::new(value as f64, 0.0)))?;
        eigen_map.insert(value, value as f64);
    }

    for m in 1..=dim {
        if combined.support().contains(&m) {
            continue;
        }
        let e = Vector::basis(dim, m - 1)?;
        let p = Matrix::outer(&e, &e);
        matrix = matrix.add(&p.scale(Scalar::new(m as f64, 0.0)))?;
        eigen_map.insert(m as u64, m as f64);
    }

    Ok(Observable { matrix, eigen_map })
}

/// The proposition complementary to a combined state: orthogonal to it,
/// so its truth forces the combined state false.
pub fn complementary_pair(combined: &CombinedState) -> SubspaceProposition {
    combined.complement().clone()
}
