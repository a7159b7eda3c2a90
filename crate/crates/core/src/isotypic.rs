//! Numerical recovery of the block structure of a twirling channel: a
//! unitary `U` and spec with `U Φ(U† X U) U† = ⊕_ℓ (𝟙_{m_ℓ} ⊗ Ω_{n_ℓ})`.
//!
//! Two random elements of the commutant are used. The eigenspaces of the
//! first split `C^d` into pieces of the form `u ⊗ C^{n_ℓ}`; the second links
//! pieces that belong to the same block and transports one basis to the
//! others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{block_channel, Channel, MixedUnitaryDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, orthonormalize_columns, random_hermitian, ComplexMatrix};
use crate::mud::{
    conjugated_decomposition, minimal_decomposition, verify_decomposition, BlockSpec,
};

/// Largest `‖J(Φ∘Φ) − J(Φ)‖_F` accepted as a projection.
pub const IDEMPOTENCE_TOL: f64 = 1e-8;
/// Eigenvalue gaps above this fraction of the spectral diameter split clusters.
pub const GAP_THRESHOLD: f64 = 1e-6;
/// Eigenspaces are linked when `‖P_i B P_j‖_F` exceeds this fraction of `‖B‖_F`.
pub const LINK_THRESHOLD: f64 = 1e-6;
/// Largest change allowed when re-orthonormalizing a transported basis.
pub const TRANSPORT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_RETRIES: usize = 8;

// Spectra narrower than this (relative to the largest eigenvalue) are one cluster.
const FLAT_SPECTRUM: f64 = 1e-9;
// A ratio within 10× of a threshold on either side is ambiguous.
const AMBIGUITY: f64 = 10.0;

/// Block structure discovered for a commutant-projection channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockStructure {
    pub spec: BlockSpec,
    /// Unitary `U` with `U Φ(U† X U) U† = block_channel(spec)(X)`.
    pub basis_change: ComplexMatrix,
    /// `‖J(UΦ(U†·U)U†) − J(block_channel(spec))‖_F`.
    pub residual: f64,
}

fn check_projection(phi: &Channel) -> Result<()> {
    let deviation = phi.idempotence_error();
    if deviation.is_nan() || deviation > IDEMPOTENCE_TOL {
        return Err(Error::NotProjection { deviation });
    }
    Ok(())
}

fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + &a.adjoint()).scale_real(0.5)
}

/// `Φ(H)` for a random Hermitian `H` drawn from `seed`.
pub fn random_commutant_element(phi: &Channel, seed: u64) -> Result<ComplexMatrix> {
    check_projection(phi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_hermitian(phi.dim_in(), &mut rng);
    Ok(hermitian_part(&phi.apply(&h)?))
}

enum Attempt {
    Found(BlockSpec, ComplexMatrix),
    Ambiguous,
}

/// Groups descending eigenvalues into clusters of (start, len).
fn cluster(values: &[f64]) -> Option<Vec<(usize, usize)>> {
    let n = values.len();
    let scale = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let diameter = values[0] - values[n - 1];
    if diameter <= FLAT_SPECTRUM * scale || scale == 0.0 {
        return Some(vec![(0, n)]);
    }
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 0..n - 1 {
        let gap = (values[i] - values[i + 1]) / diameter;
        if gap > GAP_THRESHOLD / AMBIGUITY && gap < GAP_THRESHOLD * AMBIGUITY {
            return None;
        }
        if gap > GAP_THRESHOLD {
            clusters.push((start, i + 1 - start));
            start = i + 1;
        }
    }
    clusters.push((start, n - start));
    Some(clusters)
}

/// Discovers the structure from two commutant elements. `Ambiguous` asks
/// for fresh random elements.
fn discover(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Attempt> {
    let d = a.rows();
    let eig = hermitian_eig(a, 1e-8)?;
    let Some(clusters) = cluster(&eig.values) else {
        return Ok(Attempt::Ambiguous);
    };
    let bases: Vec<ComplexMatrix> = clusters
        .iter()
        .map(|&(start, len)| eig.vectors.submatrix(0, start, d, len))
        .collect();
    let projectors: Vec<ComplexMatrix> = bases.iter().map(|q| q * &q.adjoint()).collect();

    let b_norm = b.frobenius_norm();
    let k = bases.len();
    let mut linked = vec![vec![false; k]; k];
    for i in 0..k {
        linked[i][i] = true;
        for j in i + 1..k {
            let ratio = if b_norm == 0.0 {
                0.0
            } else {
                (&(&projectors[i] * b) * &projectors[j]).frobenius_norm() / b_norm
            };
            if ratio > LINK_THRESHOLD / AMBIGUITY && ratio < LINK_THRESHOLD * AMBIGUITY {
                return Ok(Attempt::Ambiguous);
            }
            linked[i][j] = ratio > LINK_THRESHOLD;
            linked[j][i] = linked[i][j];
        }
    }

    // Connected components of the link graph, each listed in eigenvalue order.
    let mut component = vec![usize::MAX; k];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for root in 0..k {
        if component[root] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![root];
        component[root] = id;
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            for j in 0..k {
                if linked[i][j] && component[j] == usize::MAX {
                    component[j] = id;
                    members.push(j);
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }

    let mut blocks: Vec<(usize, usize, Vec<ComplexMatrix>)> = Vec::new();
    for members in &components {
        let n = bases[members[0]].cols();
        if let Some(&bad) = members.iter().find(|&&i| bases[i].cols() != n) {
            return Err(Error::NotCommutantProjection(format!(
                "linked eigenspaces have dimensions {n} and {}",
                bases[bad].cols()
            )));
        }
        if members
            .iter()
            .any(|&i| members.iter().any(|&j| !linked[i][j]))
        {
            return Ok(Attempt::Ambiguous);
        }
        let reference = &bases[members[0]];
        let mut transported = vec![reference.clone()];
        for &i in &members[1..] {
            let raw = &(&projectors[i] * b) * reference;
            let mut q = raw.clone();
            for x in 0..n {
                let col = raw.column(x);
                let norm = crate::linalg::vec_norm(&col);
                q.set_column(x, &col.iter().map(|z| z / norm).collect::<Vec<_>>());
            }
            let Some(ortho) = orthonormalize_columns(&q) else {
                return Ok(Attempt::Ambiguous);
            };
            if ortho.frobenius_distance(&q) > TRANSPORT_TOL {
                return Ok(Attempt::Ambiguous);
            }
            transported.push(ortho);
        }
        blocks.push((members.len(), n, transported));
    }
    blocks.sort_by_key(|b| std::cmp::Reverse((b.1, b.0)));

    let mut u = ComplexMatrix::zeros(d, d);
    let mut offset = 0;
    for (_, n, qs) in &blocks {
        for (i, q) in qs.iter().enumerate() {
            for x in 0..*n {
                for (c, z) in q.column(x).iter().enumerate() {
                    u[(offset + i * n + x, c)] = z.conj();
                }
            }
        }
        offset += qs.len() * n;
    }
    let spec = BlockSpec::new(blocks.iter().map(|(m, n, _)| (*m, *n)).collect())?;
    Ok(Attempt::Found(spec, u))
}

/// Finds `(spec, U)` with `U Φ(U† X U) U† = block_channel(spec)` within `tol`.
///
/// Blocks are ordered by descending `n`, then descending `m`. Attempt `t`
/// (for `t < max_retries`) draws its random elements from `seed + t`; an
/// attempt is discarded when a gap or link test is ambiguous or the
/// residual exceeds `tol`.
pub fn block_structure(
    phi: &Channel,
    seed: u64,
    tol: f64,
    max_retries: usize,
) -> Result<BlockStructure> {
    check_projection(phi)?;
    let d = phi.dim_in();
    for t in 0..max_retries.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let a = hermitian_part(&phi.apply(&random_hermitian(d, &mut rng))?);
        let b = hermitian_part(&phi.apply(&random_hermitian(d, &mut rng))?);
        let Attempt::Found(spec, u) = discover(&a, &b)? else {
            continue;
        };
        let Ok(conjugated) = phi.conjugate(&u) else {
            continue;
        };
        let residual = conjugated
            .choi()
            .frobenius_distance(&block_channel(&spec).choi());
        if residual <= tol {
            return Ok(BlockStructure {
                spec,
                basis_change: u,
                residual,
            });
        }
    }
    Err(Error::DegenerateRandomElements {
        attempts: max_retries.max(1),
    })
}

/// Minimal mixed-unitary decomposition of a twirling channel, with
/// [`DEFAULT_MAX_RETRIES`] attempts.
pub fn twirl_decomposition(
    phi: &Channel,
    seed: u64,
    tol: f64,
) -> Result<MixedUnitaryDecomposition> {
    twirl_decomposition_with_retries(phi, seed, tol, DEFAULT_MAX_RETRIES).map(|(d, _)| d)
}

/// As [`twirl_decomposition`], also returning the discovered structure.
pub fn twirl_decomposition_with_retries(
    phi: &Channel,
    seed: u64,
    tol: f64,
    max_retries: usize,
) -> Result<(MixedUnitaryDecomposition, BlockStructure)> {
    let structure = block_structure(phi, seed, tol, max_retries)?;
    let d = conjugated_decomposition(
        &minimal_decomposition(&structure.spec),
        &structure.basis_change,
    )?;
    let report = verify_decomposition(&d, phi, tol)?;
    if !report.pass {
        return Err(Error::VerificationFailed(format!(
            "channel error {:.3e}, unitarity error {:.3e}",
            report.max_channel_error, report.max_unitarity_error
        )));
    }
    Ok((d, structure))
}
