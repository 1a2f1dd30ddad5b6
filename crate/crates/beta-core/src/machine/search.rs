//! Operator recovery: exhaustive search over candidate integer matrix
//! families for one consistent with an observed trajectory, plus the
//! transport of basis-permuting operators to functions on indices.

use serde::{Deserialize, Serialize};

use crate::cap::check_dim;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A small dense integer matrix used as a search candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMat {
    rows: Vec<Vec<i64>>,
}

impl IntMat {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(
                "candidate matrix must be square and nonempty".into(),
            ));
        }
        Ok(Self { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} against a {}x{} matrix",
                v.len(),
                self.dim(),
                self.dim()
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }
}

/// Which candidate operators a search enumerates, in a stable order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// All sixteen 0/1 matrices of size 2x2, ordered by reading the four
    /// bits (a, b, c, d) row-major from the most significant bit down.
    Binary2x2,
    /// All 512 binary 3x3 matrices, same row-major bit order.
    Binary3x3,
    /// An explicit, caller-ordered candidate list.
    Explicit(Vec<IntMat>),
}

impl Family {
    pub fn candidates(&self) -> Result<Vec<IntMat>> {
        match self {
            Family::Binary2x2 => (0..16u32)
                .map(|k| {
                    IntMat::new(vec![
                        vec![(k >> 3 & 1) as i64, (k >> 2 & 1) as i64],
                        vec![(k >> 1 & 1) as i64, (k & 1) as i64],
                    ])
                })
                .collect(),
            Family::Binary3x3 => (0..512u32)
                .map(|k| {
                    let bit = |i: u32| (k >> (8 - i) & 1) as i64;
                    IntMat::new(vec![
                        vec![bit(0), bit(1), bit(2)],
                        vec![bit(3), bit(4), bit(5)],
                        vec![bit(6), bit(7), bit(8)],
                    ])
                })
                .collect(),
            Family::Explicit(mats) => {
                if mats.is_empty() {
                    return Err(Error::Validation("empty candidate family".into()));
                }
                let d = mats[0].dim();
                if mats.iter().any(|m| m.dim() != d) {
                    return Err(Error::Dimension(
                        "explicit family mixes candidate dimensions".into(),
                    ));
                }
                Ok(mats.clone())
            }
        }
    }
}

/// Finds every candidate in `family` that maps each trajectory point to
/// its successor, preserving the family's enumeration order.
pub fn hypothesis_search(trajectory: &[Vec<i64>], family: &Family) -> Result<Vec<IntMat>> {
    if trajectory.len() < 2 {
        return Err(Error::Validation(
            "trajectory needs at least two points to constrain an operator".into(),
        ));
    }
    let candidates = family.candidates()?;
    let dim = candidates[0].dim();
    if trajectory.iter().any(|p| p.len() != dim) {
        return Err(Error::Dimension(format!(
            "trajectory points must have length {dim} to match the family"
        )));
    }
    let mut matches = Vec::new();
    for m in candidates {
        let consistent = trajectory.windows(2).all(|w| {
            m.apply(&w[0]).map(|next| next == w[1]).unwrap_or(false)
        });
        if consistent {
            matches.push(m);
        }
    }
    Ok(matches)
}

/// Transports a basis-permuting operator to the function it induces on
/// 1-based indices: feeds the `n`-th standard basis vector through `f` and
/// reads off which single basis vector comes out. Anything that is not a
/// clean basis vector (to within 1e-9) is an encoding failure.
pub fn transport_nat_function(f: &Matrix, n: u64) -> Result<u64> {
    if !f.is_square() {
        return Err(Error::Dimension(format!(
            "operator must be square, got {}x{}",
            f.rows(),
            f.cols()
        )));
    }
    let dim = f.rows() as u64;
    check_dim(f.rows(), "transported operator dimension")?;
    if n < 1 || n > dim {
        return Err(Error::Domain(format!(
            "index {n} outside the operator's range 1..{dim}"
        )));
    }
    let basis = crate::linalg::Vector::basis(f.rows(), (n - 1) as usize)?;
    let image = f.mul_vec(&basis)?;
    let mut hit: Option<u64> = None;
    for (i, e) in image.entries().iter().enumerate() {
        let is_one = (e.re - 1.0).abs() <= 1e-9 && e.im.abs() <= 1e-9;
        let is_zero = e.norm() <= 1e-9;
        if is_one {
            if hit.is_some() {
                return Err(Error::Encoding(
                    "operator image marks more than one index".into(),
                ));
            }
            hit = Some(i as u64 + 1);
        } else if !is_zero {
            return Err(Error::Encoding(format!(
                "operator image has a non 0/1 entry {e} at position {}",
                i + 1
            )));
        }
    }
    hit.ok_or_else(|| Error::Encoding("operator image marks no index".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn stepping_trajectory() -> Vec<Vec<i64>> {
        vec![vec![1, 0], vec![1, 1], vec![2, 1], vec![3, 2]]
    }

    #[test]
    fn binary_families_have_stable_sizes() {
        assert_eq!(Family::Binary2x2.candidates().unwrap().len(), 16);
        assert_eq!(Family::Binary3x3.candidates().unwrap().len(), 512);
        // The first candidate of each family is the zero matrix and the
        // last is all ones, fixing the enumeration order.
        let c = Family::Binary2x2.candidates().unwrap();
        assert_eq!(c[0].rows(), &[vec![0, 0], vec![0, 0]]);
        assert_eq!(c[15].rows(), &[vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn recovers_the_stepping_operator_uniquely() {
        let found = hypothesis_search(&stepping_trajectory(), &Family::Binary2x2).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].rows(), &[vec![1, 1], vec![1, 0]]);
    }

    #[test]
    fn inconsistent_trajectory_matches_nothing() {
        let trajectory = vec![vec![1, 0], vec![1, 1], vec![5, 5]];
        let found = hypothesis_search(&trajectory, &Family::Binary2x2).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn short_or_misshapen_trajectories_are_rejected() {
        assert!(hypothesis_search(&[vec![1, 0]], &Family::Binary2x2).is_err());
        assert!(hypothesis_search(&[vec![1, 0, 0], vec![1, 1, 0]], &Family::Binary2x2).is_err());
    }

    #[test]
    fn explicit_families_keep_caller_order() {
        let id = IntMat::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        let step = IntMat::new(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let fam = Family::Explicit(vec![step.clone(), id.clone()]);
        // A fixed point trajectory: both identity and any matrix fixing
        // the point qualify; order must follow the family.
        let trajectory = vec![vec![0, 0], vec![0, 0], vec![0, 0]];
        let found = hypothesis_search(&trajectory, &fam).unwrap();
        assert_eq!(found, vec![step, id]);
    }

    #[test]
    fn chunked_scan_agrees_with_serial_scan() {
        // Order stability: filtering candidates in chunks and merging
        // in family order gives exactly the serial result.
        let trajectory = vec![vec![1, 1], vec![2, 1]];
        let serial = hypothesis_search(&trajectory, &Family::Binary2x2).unwrap();
        let all = Family::Binary2x2.candidates().unwrap();
        let mut merged = Vec::new();
        for chunk in all.chunks(4) {
            for m in chunk {
                let ok = trajectory
                    .windows(2)
                    .all(|w| m.apply(&w[0]).map(|n| n == w[1]).unwrap_or(false));
                if ok {
                    merged.push(m.clone());
                }
            }
        }
        assert_eq!(serial, merged);
        assert!(!serial.is_empty());
    }

    #[test]
    fn transport_reads_off_permutations() {
        // Cyclic shift on four states: e1 -> e2 -> e3 -> e4 -> e1.
        let mut shift = Matrix::zeros(4, 4);
        for i in 0..4 {
            shift.set((i + 1) % 4, i, crate::linalg::Scalar::new(1.0, 0.0));
        }
        assert_eq!(transport_nat_function(&shift, 1).unwrap(), 2);
        assert_eq!(transport_nat_function(&shift, 4).unwrap(), 1);

        // The transposition pair (1 3)(2 4).
        let mut pair = Matrix::zeros(4, 4);
        pair.set(2, 0, crate::linalg::Scalar::new(1.0, 0.0));
        pair.set(3, 1, crate::linalg::Scalar::new(1.0, 0.0));
        pair.set(0, 2, crate::linalg::Scalar::new(1.0, 0.0));
        pair.set(1, 3, crate::linalg::Scalar::new(1.0, 0.0));
        assert_eq!(transport_nat_function(&pair, 3).unwrap(), 1);
        assert_eq!(transport_nat_function(&pair, 2).unwrap(), 4);
    }

    #[test]
    fn transport_rejects_non_permutation_images() {
        let half = Matrix::diag_real(&[0.5, 1.0]);
        assert!(matches!(
            transport_nat_function(&half, 1),
            Err(Error::Encoding(_))
        ));
        // Superposition output: two indices marked.
        let mut spread = Matrix::zeros(2, 2);
        spread.set(0, 0, crate::linalg::Scalar::new(1.0, 0.0));
        spread.set(1, 0, crate::linalg::Scalar::new(1.0, 0.0));
        assert!(transport_nat_function(&spread, 1).is_err());
        // Out-of-range index.
        let id = Matrix::identity(2);
        assert!(matches!(
            transport_nat_function(&id, 3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            transport_nat_function(&id, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn identity_transports_to_identity_function() {
        let id = Matrix::identity(5);
        for n in 1..=5u64 {
            assert_eq!(transport_nat_function(&id, n).unwrap(), n);
        }
    }
}
