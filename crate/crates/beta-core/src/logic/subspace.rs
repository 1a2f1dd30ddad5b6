//! Subspace propositions and their orthomodular lattice operations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigen, gram_schmidt_extend, Matrix, Scalar, Vector};

/// Where a proposition came from; purely descriptive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropositionKind {
    /// The 1-dimensional span of standard basis `m` (1-based).
    Standard(usize),
    /// Orthocomplement of standard basis `m`.
    Orthocomplement(usize),
    /// A combined state registered under the given index.
    Combined(u64),
    General,
}

/// A closed subspace of the composite space, carried as its orthogonal
/// projector. Meets are subspace intersections, joins are closed spans,
/// complements are orthocomplements; the result is an orthomodular lattice
/// in which distributivity genuinely fails.
#[derive(Debug, Clone)]
pub struct SubspaceProposition {
    projector: Matrix,
    rank: usize,
    kind: PropositionKind,
}

/// Iterations of projector squaring used to converge the alternating
/// product onto the intersection. Each squaring doubles both the decay of
/// non-shared directions and the accumulated rounding error on the unit
/// eigenspace, so the count balances two limits: 2^20 washes any
/// eigenvalue below 1 - 1e-6 (principal angle above ~1 milliradian) to
/// under 0.5, while the rounding drift on genuinely shared directions
/// stays near 2^20 * eps ~ 1e-10, safely inside the 1e-9 tolerance used
/// for lattice identities. Larger counts (e.g. 32) amplify drift past
/// 1e-7 and corrupt the recovered projector.
const MEET_SQUARINGS: usize = 20;

impl SubspaceProposition {
    /// Span of the 1-based standard basis vector `m`.
    pub fn standard(dim: usize, m: usize) -> Result<Self> {
        if m < 1 || m > dim {
            return Err(Error::Domain(format!(
                "standard index {m} outside 1..{dim}"
            )));
        }
        let v = Vector::basis(dim, m - 1)?;
        let projector = Matrix::outer(&v, &v);
        Ok(SubspaceProposition {
            projector,
            rank: 1,
            kind: PropositionKind::Standard(m),
        })
    }

    /// The always-true proposition.
    pub fn whole(dim: usize) -> Result<Self> {
        Ok(SubspaceProposition {
            projector: Matrix::identity(dim),
            rank: dim,
            kind: PropositionKind::General,
        })
    }

    /// The always-false proposition.
    pub fn zero(dim: usize) -> Result<Self> {
        Ok(SubspaceProposition {
            projector: Matrix::zeros(dim, dim),
            rank: 0,
            kind: PropositionKind::General,
        })
    }

    /// Span of the given vectors; linearly dependent inputs are allowed
    /// and collapse into the rank.
    pub fn from_span(vectors: &[Vector]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Validation("span of no vectors is ambiguous; use zero(dim)".into()));
        }
        let dim = vectors[0].dim();
        let mut basis: Vec<Vector> = Vec::new();
        for v in vectors {
            if v.dim() != dim {
                return Err(Error::Dimension(
                    "span vectors must share one dimension".into(),
                ));
            }
            match gram_schmidt_extend(&basis, v) {
                Ok(u) => basis.push(u),
                Err(Error::Degeneracy(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        if basis.is_empty() {
            return Err(Error::Degeneracy(
                "span vectors are all numerically zero".into(),
            ));
        }
        let mut projector = Matrix::zeros(dim, dim);
        for b in &basis {
            projector = projector.add(&Matrix::outer(b, b))?;
        }
        Ok(SubspaceProposition {
            projector,
            rank: basis.len(),
            kind: PropositionKind::General,
        })
    }

    /// Wraps an explicit projector, validating Hermiticity, idempotence,
    /// and integer trace.
    pub fn from_projector(projector: Matrix) -> Result<Self> {
        if projector.rows() != projector.cols() {
            return Err(Error::Dimension("projector must be square".into()));
        }
        if !projector.is_hermitian(1e-10) {
            return Err(Error::Validation(
                "projector must be Hermitian within 1e-10".into(),
            ));
        }
        let square = projector.mul(&projector)?;
        if !square.approx_eq(&projector, 1e-10) {
            return Err(Error::Validation(
                "projector must be idempotent within 1e-10".into(),
            ));
        }
        let tr = projector.trace();
        let rank = tr.re.round();
        if (tr.re - rank).abs() > 0.5 || tr.im.abs() > 1e-9 || rank < 0.0 {
            return Err(Error::Validation(format!(
                "projector trace {tr} is not a nonnegative integer"
            )));
        }
        Ok(SubspaceProposition {
            projector,
            rank: rank as usize,
            kind: PropositionKind::General,
        })
    }

    pub(crate) fn with_kind(mut self, kind: PropositionKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn projector(&self) -> &Matrix {
        &self.projector
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.projector.rows()
    }

    pub fn kind(&self) -> PropositionKind {
        self.kind
    }

    /// Negation: the orthocomplement subspace.
    pub fn orthocomplement(&self) -> Self {
        let id = Matrix::identity(self.dim());
        let kind = match self.kind {
            PropositionKind::Standard(m) => PropositionKind::Orthocomplement(m),
            PropositionKind::Orthocomplement(m) => PropositionKind::Standard(m),
            _ => PropositionKind::General,
        };
        SubspaceProposition {
            projector: id.sub(&self.projector).expect("same dims"),
            rank: self.dim() - self.rank,
            kind,
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "propositions live in different dimensions: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// Conjunction: intersection of the two subspaces.
    ///
    /// The alternating product `PQP` fixes exactly the intersection and
    /// contracts everything else; repeated squaring drives it to the
    /// intersection projector, and an eigen-snap removes the residue.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut t = self
            .projector
            .mul(&other.projector)?
            .mul(&self.projector)?;
        for _ in 0..MEET_SQUARINGS {
            t = t.mul(&t)?;
            // Re-symmetrize so float drift cannot push the iterate off the
            // Hermitian manifold across 32 squarings.
            t = t.add(&t.adjoint())?.scale(Scalar::new(0.5, 0.0));
        }
        let mut basis: Vec<Vector> = Vec::new();
        for (lambda, v) in eigen(&t)? {
            if lambda.re > 0.5 {
                match gram_schmidt_extend(&basis, &v) {
                    Ok(u) => basis.push(u),
                    Err(Error::Degeneracy(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
        if basis.is_empty() {
            return Self::zero(self.dim());
        }
        let mut projector = Matrix::zeros(self.dim(), self.dim());
        for b in &basis {
            projector = projector.add(&Matrix::outer(b, b))?;
        }
        Ok(SubspaceProposition {
            projector,
            rank: basis.len(),
            kind: PropositionKind::General,
        })
    }

    /// Disjunction: closed span of the two subspaces, via De Morgan.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self
            .orthocomplement()
            .meet(&other.orthocomplement())?
            .orthocomplement())
    }

    /// Lattice order: `self` is contained in `other`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.check_same_dim(other)?;
        let fixed = other.projector.mul(&self.projector)?;
        Ok(fixed.approx_eq(&self.projector, 1e-9))
    }

    /// Equality as subspaces, measured by projector distance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.projector.approx_eq(&other.projector, tol)
    }

    /// Whether every vector of `self` is orthogonal to every vector of
    /// `other` (so the two cannot both be true).
    pub fn is_orthogonal_to(&self, other: &Self) -> Result<bool> {
        self.check_same_dim(other)?;
        Ok(self.projector.mul(&other.projector)?.norm_inf() <= 1e-10)
    }
}

/// Two propositions are compatible when each splits cleanly along the
/// other: `p = (p∧q) ∨ (p∧q′)` and symmetrically. Compatible pairs form
/// Boolean sublattices; incompatible pairs are where the quantum logic
/// departs from classical logic.
pub fn compatibility(p: &SubspaceProposition, q: &SubspaceProposition) -> Result<bool> {
    let split = |a: &SubspaceProposition, b: &SubspaceProposition| -> Result<bool> {
        let recomposed = a.meet(b)?.join(&a.meet(&b.orthocomplement())?)?;
        Ok(recomposed.approx_eq(a, 1e-9))
    };
    Ok(split(p, q)? && split(q, p)?)
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<(f64, f64)>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| (m.entry(i, j).re, m.entry(i, j).im)).collect())
        .collect()
}

/// Both sides of the distributivity identity for a witness triple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessReport {
    pub dim: usize,
    /// Projector of `r ∧ (p ∨ q)`, row-major (re, im) pairs.
    pub left_projector: Vec<Vec<(f64, f64)>>,
    /// Projector of `(r∧p) ∨ (r∧q)`.
    pub right_projector: Vec<Vec<(f64, f64)>>,
    pub left_rank: usize,
    pub right_rank: usize,
    pub witness_found: bool,
}

/// Produces a triple violating `r ∧ (p∨q) = (r∧p) ∨ (r∧q)`: the spans of
/// the first two basis vectors and of their diagonal. The left side keeps
/// the diagonal line (rank 1); the right side collapses to zero.
pub fn distributivity_witness(
    dim: usize,
) -> Result<(
    SubspaceProposition,
    SubspaceProposition,
    SubspaceProposition,
    WitnessReport,
)> {
    if dim < 2 {
        return Err(Error::Domain(format!(
            "witness needs dimension >= 2, got {dim}"
        )));
    }
    let p = SubspaceProposition::standard(dim, 1)?;
    let q = SubspaceProposition::standard(dim, 2)?;
    let mut diag = Vector::zeros(dim);
    let half = 1.0 / 2.0_f64.sqrt();
    diag.set(0, Scalar::new(half, 0.0));
    diag.set(1, Scalar::new(half, 0.0));
    let r = SubspaceProposition::from_span(&[diag])?;

    let left = r.meet(&p.join(&q)?)?;
    let right = r.meet(&p)?.join(&r.meet(&q)?)?;
    let report = WitnessReport {
        dim,
        left_rank: left.rank(),
        right_rank: right.rank(),
        left_projector: matrix_rows(left.projector()),
        right_projector: matrix_rows(right.projector()),
        witness_found: !left.approx_eq(&right, 1e-9),
    };
    Ok((p, q, r, report))
}

/// Result of the exhaustive scan over diagonal (classical) propositions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagonalScanReport {
    pub dim: usize,
    pub triples_checked: usize,
    pub witness_found: bool,
}

/// Checks every triple of diagonal 0/1 projectors for a distributivity
/// violation. Diagonal propositions commute, so none exists; the scan
/// demonstrates that the failure above needs genuinely oblique subspaces.
pub fn distributivity_witness_diagonal(dim: usize) -> Result<DiagonalScanReport> {
    if !(1..=3).contains(&dim) {
        return Err(Error::Domain(format!(
            "exhaustive diagonal scan is supported for dimensions 1..=3, got {dim}"
        )));
    }
    let props: Vec<SubspaceProposition> = (0..1usize << dim)
        .map(|mask| {
            let diag: Vec<f64> = (0..dim)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { 0.0 })
                .collect();
            SubspaceProposition::from_projector(Matrix::diag_real(&diag))
        })
        .collect::<Result<_>>()?;
    let mut triples_checked = 0usize;
    let mut witness_found = false;
    for p in &props {
        for q in &props {
            for r in &props {
                triples_checked += 1;
                let left = r.meet(&p.join(q)?)?;
                let right = r.meet(p)?.join(&r.meet(q)?)?;
                if !left.approx_eq(&right, 1e-9) {
                    witness_found = true;
                }
            }
        }
    }
    Ok(DiagonalScanReport {
        dim,
        triples_checked,
        witness_found,
    })
}

/// Random unit vector with independent complex normal entries.
pub fn random_unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Result<Vector> {
    loop {
        let mut entries = Vec::with_capacity(dim);
        for _ in 0..dim {
            // Box-Muller from uniform draws keeps the dependency surface at
            // plain `rand`.
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            let radius = (-2.0 * u1.ln()).sqrt();
            let re = radius * (2.0 * std::f64::consts::PI * u2).cos();
            let im = radius * (2.0 * std::f64::consts::PI * u2).sin();
            entries.push(Scalar::new(re, im));
        }
        let v = Vector::new(entries)?;
        match v.normalize() {
            Ok(u) => return Ok(u),
            Err(Error::Degeneracy(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Random subspace of the given rank, as a proposition.
pub fn random_subspace<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> Result<SubspaceProposition> {
    if rank == 0 {
        return SubspaceProposition::zero(dim);
    }
    if rank > dim {
        return Err(Error::Domain(format!(
            "rank {rank} exceeds dimension {dim}"
        )));
    }
    let mut basis: Vec<Vector> = Vec::new();
    while basis.len() < rank {
        let v = random_unit_vector(rng, dim)?;
        match gram_schmidt_extend(&basis, &v) {
            Ok(u) => basis.push(u),
            Err(Error::Degeneracy(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    SubspaceProposition::from_span(&basis)
}
