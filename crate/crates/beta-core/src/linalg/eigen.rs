//! Eigendecomposition of small dense complex matrices.
//!
//! Dimensions 1 through 3 go through the characteristic polynomial in closed
//! form (quadratic formula, Cardano) with a Newton polish; anything larger is
//! reduced to Hessenberg form and driven to Schur form by a shifted QR
//! iteration. Defective inputs yield fewer pairs than the dimension; every
//! returned pair satisfies `M v = lambda v` to working precision.


use super::{scalar, Matrix, Scalar, Vector};
use crate::error::{Error, Result};

/// Total QR steps allowed before the iteration gives up.
const QR_SWEEP_BUDGET: usize = 10_000;

/// Eigenpairs of a square matrix, sorted by descending real part of the
/// eigenvalue (ties broken by descending imaginary part).
///
/// Eigenvectors are unit norm with the first non-negligible component made
/// real nonnegative, so repeated runs and different code paths agree exactly.
pub fn eigen(m: &Matrix) -> Result<Vec<(Scalar, Vector)>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    crate::cap::check_dim(m.rows(), "eigendecomposition")?;
    m.check_finite()?;
    let mut pairs = match m.rows() {
        1 => vec![(m.entry(0, 0), Vector::basis(1, 0)?)],
        2 | 3 => closed_form(m)?,
        _ => qr_schur(m)?,
    };
    for (_, v) in pairs.iter_mut() {
        *v = phase_fix(&v.normalize()?);
        v.check_finite()?;
    }
    pairs.sort_by(|a, b| {
        b.0.re
            .partial_cmp(&a.0.re)
            .unwrap()
            .then(b.0.im.partial_cmp(&a.0.im).unwrap())
    });
    Ok(pairs)
}

fn phase_fix(v: &Vector) -> Vector {
    for i in 0..v.dim() {
        let e = v.entry(i);
        if e.norm() > 1e-12 {
            return v.scale(e.conj() / e.norm());
        }
    }
    v.clone()
}

/// Characteristic-polynomial roots for dim 2 and 3, then null spaces.
fn closed_form(m: &Matrix) -> Result<Vec<(Scalar, Vector)>> {
    let n = m.rows();
    if n == 3 && m.is_hermitian(1e-10) {
        // The Cardano path loses half the digits on repeated roots, which
        // Hermitian inputs (projector-like matrices especially) hit all
        // the time; the trigonometric form below is stable there.
        return hermitian_closed_form_3(m);
    }
    let roots = if n == 2 {
        quadratic_roots(m)
    } else {
        cubic_roots(m)
    };
    let scale = m.norm_inf().max(1.0);
    let mut pairs: Vec<(Scalar, Vector)> = Vec::with_capacity(n);
    for lambda in roots {
        let lambda = polish_root(m, lambda);
        let shifted = m.sub(&Matrix::identity(n).scale(lambda))?;
        let mut basis = null_space(&shifted, 1e-10 * scale);
        if basis.is_empty() {
            basis = null_space(&shifted, 1e-6 * scale);
        }
        if basis.is_empty() {
            return Err(Error::Numeric(
                "eigenvector extraction found no null direction".into(),
            ));
        }
        // Within a cluster of (near-)equal roots, each root must claim a
        // direction not already taken; for a defective matrix none is left
        // and the root is dropped.
        let used: Vec<&Vector> = pairs
            .iter()
            .filter(|(l, _)| (l - lambda).norm() <= 1e-8 * scale)
            .map(|(_, v)| v)
            .collect();
        let mut chosen = None;
        for cand in &basis {
            let mut r = cand.clone();
            for u in &used {
                let c = u.inner(&r)?;
                r = r.sub(&u.scale(c))?;
            }
            if r.norm() > 0.3 {
                chosen = Some(r.normalize()?);
                break;
            }
        }
        if let Some(v) = chosen {
            pairs.push((lambda, v));
        }
    }
    Ok(pairs)
}

/// Eigenvalues of a 3x3 Hermitian matrix in descending order, computed
/// from the trigonometric closed form. Accurate to machine precision even
/// for repeated eigenvalues, where the general cubic formula degrades.
fn hermitian_roots_3(m: &Matrix) -> [f64; 3] {
    let a00 = m.entry(0, 0).re;
    let a11 = m.entry(1, 1).re;
    let a22 = m.entry(2, 2).re;
    let off = m.entry(0, 1).norm_sqr() + m.entry(0, 2).norm_sqr() + m.entry(1, 2).norm_sqr();
    let q = (a00 + a11 + a22) / 3.0;
    let p2 = (a00 - q).powi(2) + (a11 - q).powi(2) + (a22 - q).powi(2) + 2.0 * off;
    if p2 <= 0.0 {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();
    let b = m
        .sub(&Matrix::identity(3).scale(scalar(q, 0.0)))
        .expect("same shape")
        .scale(scalar(1.0 / p, 0.0));
    let r = (b.det().expect("3x3 determinant").re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let two_thirds_pi = 2.0 * std::f64::consts::FRAC_PI_3;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + two_thirds_pi).cos();
    let e2 = 3.0 * q - e1 - e3;
    [e1, e2, e3]
}

/// Eigenpairs of a 3x3 Hermitian matrix: clusters of nearly equal
/// eigenvalues are resolved jointly, with the null-space cutoff placed
/// between the rounding noise and the spectral gap to the next cluster.
fn hermitian_closed_form_3(m: &Matrix) -> Result<Vec<(Scalar, Vector)>> {
    let scale = m.norm_inf().max(1.0);
    let roots = hermitian_roots_3(m);
    // A true multiple root splits by up to ~sqrt(eps)*scale in the trig
    // formula (acos is steep at the clamp boundary), so cluster well above
    // that; the cluster mean cancels the split to working precision.
    let ctol = 3e-7 * scale;
    let mut pairs: Vec<(Scalar, Vector)> = Vec::with_capacity(3);
    let mut i = 0;
    while i < 3 {
        let mut j = i + 1;
        while j < 3 && (roots[j - 1] - roots[j]).abs() <= ctol {
            j += 1;
        }
        let multiplicity = j - i;
        let lambda = roots[i..j].iter().sum::<f64>() / multiplicity as f64;
        let gap = roots
            .iter()
            .enumerate()
            .filter(|(k, _)| *k < i || *k >= j)
            .map(|(_, r)| (r - lambda).abs())
            .fold(scale, f64::min);
        let cutoff = (gap * 0.1).min(1e-4 * scale).max(1e-8 * scale);
        let shifted = m.sub(&Matrix::identity(3).scale(scalar(lambda, 0.0)))?;
        let basis = null_space(&shifted, cutoff);
        if basis.len() < multiplicity {
            return Err(Error::Numeric(format!(
                "found {} directions for an eigenvalue of multiplicity {multiplicity}",
                basis.len()
            )));
        }
        for v in basis.into_iter().take(multiplicity) {
            pairs.push((scalar(lambda, 0.0), v));
        }
        i = j;
    }
    Ok(pairs)
}

fn quadratic_roots(m: &Matrix) -> Vec<Scalar> {
    let tr = m.entry(0, 0) + m.entry(1, 1);
    let det = m.entry(0, 0) * m.entry(1, 1) - m.entry(0, 1) * m.entry(1, 0);
    let disc = tr * tr - scalar(4.0, 0.0) * det;
    let sq = disc.sqrt();
    // Pick the large-magnitude root first, recover the other from the
    // product to dodge cancellation.
    let r1 = (tr + sq) * scalar(0.5, 0.0);
    let r2 = (tr - sq) * scalar(0.5, 0.0);
    if r1.norm() >= r2.norm() && r1.norm() > 1e-300 {
        vec![r1, det / r1]
    } else if r2.norm() > 1e-300 {
        vec![det / r2, r2]
    } else {
        vec![r1, r2]
    }
}

fn cubic_roots(m: &Matrix) -> Vec<Scalar> {
    let c2 = m.entry(0, 0) + m.entry(1, 1) + m.entry(2, 2);
    let minor = |i: usize, j: usize| -> Scalar {
        m.entry(i, i) * m.entry(j, j) - m.entry(i, j) * m.entry(j, i)
    };
    let c1 = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let c0 = m.det().expect("3x3 determinant");
    // Substituting lambda = t + c2/3 into
    // lambda^3 - c2 lambda^2 + c1 lambda - c0 gives the depressed cubic
    // t^3 + p t + q = 0 with the coefficients below.
    let s = c2 / scalar(3.0, 0.0);
    let p = c1 - c2 * c2 / scalar(3.0, 0.0);
    let q = -(s * s * s * scalar(2.0, 0.0)) + c1 * s - c0;
    // Cardano: t = u + v where u^3 = -q/2 + sqrt(q^2/4 + p^3/27) and
    // v = -p/(3u); the larger branch of u^3 keeps the division stable.
    let half_q = q * scalar(0.5, 0.0);
    let delta = half_q * half_q + (p / scalar(3.0, 0.0)).powu(3);
    let root_delta = delta.sqrt();
    let cand1 = -half_q + root_delta;
    let cand2 = -half_q - root_delta;
    let u3 = if cand1.norm() >= cand2.norm() { cand1 } else { cand2 };
    let omega = Scalar::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let ts: Vec<Scalar> = if u3.norm() < 1e-300 {
        // p and q both vanish: a triple root at the origin.
        let t0 = (-q).cbrt();
        vec![t0, t0 * omega, t0 * omega * omega]
    } else {
        let u = u3.cbrt();
        let v = -p / (u * scalar(3.0, 0.0));
        // t_k = u w^k + v w^{2k} over the cube roots of unity w.
        vec![
            u + v,
            u * omega + v * omega * omega,
            u * omega * omega + v * omega,
        ]
    };
    ts.into_iter().map(|t| t + s).collect()
}

/// A few Newton steps on the characteristic polynomial tighten closed-form
/// roots to working precision.
fn polish_root(m: &Matrix, mut lambda: Scalar) -> Scalar {
    let n = m.rows();
    let (c2, c1, c0) = if n == 2 {
        let tr = m.entry(0, 0) + m.entry(1, 1);
        let det = m.entry(0, 0) * m.entry(1, 1) - m.entry(0, 1) * m.entry(1, 0);
        (tr, det, scalar(0.0, 0.0))
    } else {
        let c2 = m.entry(0, 0) + m.entry(1, 1) + m.entry(2, 2);
        let minor = |i: usize, j: usize| -> Scalar {
            m.entry(i, i) * m.entry(j, j) - m.entry(i, j) * m.entry(j, i)
        };
        let c1 = minor(0, 1) + minor(0, 2) + minor(1, 2);
        (c2, c1, m.det().expect("3x3 determinant"))
    };
    for _ in 0..3 {
        let (val, der) = if n == 2 {
            let val = (lambda - c2) * lambda + c1;
            let der = scalar(2.0, 0.0) * lambda - c2;
            (val, der)
        } else {
            let val = ((lambda - c2) * lambda + c1) * lambda - c0;
            let der = (scalar(3.0, 0.0) * lambda - scalar(2.0, 0.0) * c2) * lambda + c1;
            (val, der)
        };
        if der.norm() < 1e-300 {
            break;
        }
        let step = val / der;
        lambda -= step;
        if step.norm() < 1e-16 * (lambda.norm() + 1.0) {
            break;
        }
    }
    lambda
}

/// Orthonormal basis of the null space of `a`, with pivots below `cutoff`
/// treated as zero. Gaussian elimination with full pivoting.
fn null_space(a: &Matrix, cutoff: f64) -> Vec<Vector> {
    let n = a.rows();
    let mut u = a.clone();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    for step in 0..n {
        // Full pivot over the remaining submatrix.
        let mut best = (step, step, 0.0f64);
        for i in step..n {
            for j in step..n {
                let mag = u.entry(i, j).norm();
                if mag > best.2 {
                    best = (i, j, mag);
                }
            }
        }
        if best.2 <= cutoff {
            break;
        }
        let (pi, pj, _) = best;
        if pi != step {
            for j in 0..n {
                let tmp = u.entry(step, j);
                u.set(step, j, u.entry(pi, j));
                u.set(pi, j, tmp);
            }
        }
        if pj != step {
            for i in 0..n {
                let tmp = u.entry(i, step);
                u.set(i, step, u.entry(i, pj));
                u.set(i, pj, tmp);
            }
            col_perm.swap(step, pj);
        }
        let p = u.entry(step, step);
        for i in step + 1..n {
            let f = u.entry(i, step) / p;
            for j in step..n {
                let cur = u.entry(i, j);
                u.set(i, j, cur - f * u.entry(step, j));
            }
        }
        rank += 1;
    }
    let mut basis: Vec<Vector> = Vec::new();
    for free in rank..n {
        let mut x = vec![scalar(0.0, 0.0); n];
        x[free] = scalar(1.0, 0.0);
        for i in (0..rank).rev() {
            let mut s = scalar(0.0, 0.0);
            for j in i + 1..n {
                s += u.entry(i, j) * x[j];
            }
            x[i] = -s / u.entry(i, i);
        }
        let mut v = Vector::zeros(n);
        for (permuted, &original) in col_perm.iter().enumerate() {
            v.set(original, x[permuted]);
        }
        // Orthonormalize against the basis gathered so far.
        for b in &basis {
            let c = b.inner(&v).expect("matching dims");
            v = v.sub(&b.scale(c)).expect("matching dims");
        }
        if v.norm() > 1e-12 {
            basis.push(v.normalize().expect("nonzero"));
        }
    }
    basis
}

/// Hessenberg reduction followed by shifted QR, returning eigenpairs
/// extracted from the Schur form.
fn qr_schur(m: &Matrix) -> Result<Vec<(Scalar, Vector)>> {
    let n = m.rows();
    // Normalize to unit infinity-norm before iterating. The sweep assumes
    // entries of roughly unit size: on a matrix that has decayed into the
    // subnormal range (such as a repeatedly squared projector product with
    // an empty fixed space) the rotation magnitudes underflow to zero and
    // no sweep can make progress. Every |entry| is at most `sigma`, so the
    // per-entry division below cannot overflow; eigenvectors are unchanged
    // by scaling and eigenvalues are multiplied back at the end.
    let sigma = m.norm_inf();
    if sigma == 0.0 {
        return (0..n)
            .map(|i| Ok((scalar(0.0, 0.0), Vector::basis(n, i)?)))
            .collect();
    }
    if !sigma.is_finite() {
        return Err(Error::Numeric(
            "matrix entries overflow the eigenvalue iteration's scaling".into(),
        ));
    }
    let scaled = Matrix::from_rows(
        (0..n)
            .map(|i| (0..n).map(|j| m.entry(i, j) / sigma).collect())
            .collect(),
    )?;
    let (mut h, mut u) = hessenberg(&scaled)?;
    let hnorm = h.norm_inf().max(1e-300);
    let eps = f64::EPSILON;
    // Absolute floor for negligibility, in the spirit of LAPACK's `smlnum`:
    // a coupling this far below the (unit) matrix scale carries no
    // information even when its diagonal neighbourhood is itself tiny.
    let smlnum = f64::MIN_POSITIVE * (n as f64) / eps;
    let zero = scalar(0.0, 0.0);

    let mut sweeps = 0usize;
    let mut stagnation = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let local = h.entry(hi - 1, hi - 1).norm() + h.entry(hi, hi).norm();
        let thresh = (eps * if local > 0.0 { local } else { hnorm }).max(smlnum);
        if h.entry(hi, hi - 1).norm() <= thresh {
            h.set(hi, hi - 1, zero);
            hi -= 1;
            stagnation = 0;
            continue;
        }
        sweeps += 1;
        stagnation += 1;
        if sweeps > QR_SWEEP_BUDGET {
            return Err(Error::Numeric(format!(
                "eigenvalue iteration did not converge within {QR_SWEEP_BUDGET} sweeps"
            )));
        }
        // Start of the unreduced block ending at hi.
        let mut lo = hi;
        while lo > 0 {
            let d = h.entry(lo - 1, lo - 1).norm() + h.entry(lo, lo).norm();
            let th = (eps * if d > 0.0 { d } else { hnorm }).max(smlnum);
            if h.entry(lo, lo - 1).norm() <= th {
                h.set(lo, lo - 1, zero);
                break;
            }
            lo -= 1;
        }
        let mu = if stagnation % 12 == 0 {
            // Exceptional shift: a deterministic complex kick that breaks
            // the symmetry of cycling configurations (e.g. permutations).
            let kick = h.entry(hi, hi - 1).norm()
                + if hi >= 2 { h.entry(hi - 1, hi - 2).norm() } else { 0.0 };
            h.entry(hi, hi) + Scalar::new(0.4375 * kick, 0.6 * kick)
        } else {
            wilkinson_shift(
                h.entry(hi - 1, hi - 1),
                h.entry(hi - 1, hi),
                h.entry(hi, hi - 1),
                h.entry(hi, hi),
            )
        };
        for i in lo..=hi {
            let cur = h.entry(i, i);
            h.set(i, i, cur - mu);
        }
        let mut rots: Vec<(usize, Scalar, Scalar, f64)> = Vec::new();
        for k in lo..hi {
            let a = h.entry(k, k);
            let b = h.entry(k + 1, k);
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if r < 1e-300 {
                rots.push((k, scalar(1.0, 0.0), zero, 1.0));
                continue;
            }
            // G = [[conj(a), conj(b)], [-b, a]] / r zeroes the subdiagonal.
            for j in k..n {
                let x = h.entry(k, j);
                let y = h.entry(k + 1, j);
                h.set(k, j, (a.conj() * x + b.conj() * y) / r);
                h.set(k + 1, j, (-b * x + a * y) / r);
            }
            rots.push((k, a, b, r));
        }
        for &(k, a, b, r) in &rots {
            // Right-multiply by G^H, restoring similarity.
            let top = hi.min(k + 1);
            for i in 0..=top {
                let x = h.entry(i, k);
                let y = h.entry(i, k + 1);
                h.set(i, k, (x * a + y * b) / r);
                h.set(i, k + 1, (-x * b.conj() + y * a.conj()) / r);
            }
            for i in 0..n {
                let x = u.entry(i, k);
                let y = u.entry(i, k + 1);
                u.set(i, k, (x * a + y * b) / r);
                u.set(i, k + 1, (-x * b.conj() + y * a.conj()) / r);
            }
        }
        for i in lo..=hi {
            let cur = h.entry(i, i);
            h.set(i, i, cur + mu);
        }
    }
    // Clean below-diagonal residue; h is now the triangular Schur factor.
    for i in 1..n {
        for j in 0..i {
            h.set(i, j, zero);
        }
    }
    let pairs = schur_vectors(&h, &u)?;
    Ok(pairs
        .into_iter()
        .map(|(lambda, v)| (lambda * sigma, v))
        .collect())
}

fn wilkinson_shift(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Scalar {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - scalar(4.0, 0.0) * det).sqrt();
    let l1 = (tr + disc) * scalar(0.5, 0.0);
    let l2 = (tr - disc) * scalar(0.5, 0.0);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Householder reduction to upper Hessenberg form; returns (H, U) with
/// `M = U H U^H`.
fn hessenberg(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = m.rows();
    let mut h = m.clone();
    let mut u = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let mut x: Vec<Scalar> = (k + 1..n).map(|i| h.entry(i, k)).collect();
        let xnorm = x.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if xnorm < 1e-300 {
            continue;
        }
        let phase = if x[0].norm() > 1e-300 {
            x[0] / x[0].norm()
        } else {
            scalar(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        x[0] -= alpha;
        let vnorm = x.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        let v: Vec<Scalar> = x.into_iter().map(|e| e / vnorm).collect();
        // Left: rows k+1..n of every column.
        for j in 0..n {
            let mut w = scalar(0.0, 0.0);
            for (off, vi) in v.iter().enumerate() {
                w += vi.conj() * h.entry(k + 1 + off, j);
            }
            w *= 2.0;
            for (off, vi) in v.iter().enumerate() {
                let cur = h.entry(k + 1 + off, j);
                h.set(k + 1 + off, j, cur - vi * w);
            }
        }
        // Right: columns k+1..n of every row, for h and the accumulator.
        for target in [&mut h, &mut u] {
            for i in 0..n {
                let mut w = scalar(0.0, 0.0);
                for (off, vi) in v.iter().enumerate() {
                    w += target.entry(i, k + 1 + off) * vi;
                }
                w *= 2.0;
                for (off, vi) in v.iter().enumerate() {
                    let cur = target.entry(i, k + 1 + off);
                    target.set(i, k + 1 + off, cur - w * vi.conj());
                }
            }
        }
    }
    Ok((h, u))
}

/// Eigenvectors of the triangular factor by back-substitution, mapped back
/// through the accumulated unitary.
fn schur_vectors(t: &Matrix, u: &Matrix) -> Result<Vec<(Scalar, Vector)>> {
    let n = t.rows();
    let smallnum = f64::EPSILON * t.norm_inf().max(1.0);
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t.entry(k, k);
        let mut y = vec![scalar(0.0, 0.0); n];
        y[k] = scalar(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = scalar(0.0, 0.0);
            for j in i + 1..=k {
                s += t.entry(i, j) * y[j];
            }
            let mut den = t.entry(i, i) - lambda;
            if den.norm() < smallnum {
                den = scalar(smallnum, 0.0);
            }
            y[i] = -s / den;
            let mag = y[i].norm();
            if mag > 1e100 {
                // Rescale a blowing-up solve (defective cluster) instead of
                // overflowing; normalization later absorbs the factor.
                for e in y.iter_mut() {
                    *e /= mag;
                }
            }
        }
        let v = u.mul_vec(&Vector::new(y)?)?;
        pairs.push((lambda, v));
    }
    Ok(pairs)
}
