//! Closed-form minimal mixed-unitary decompositions of
//! `Φ = ⊕_ℓ (𝟙_{M_{m_ℓ}} ⊗ Ω_{n_ℓ})`.
//!
//! For `N = Σ n_ℓ²` and every `k ∈ 1..=N` the unitary
//! `U_k = ⊕_ℓ (𝟙_{m_ℓ} ⊗ U_{k,ℓ})` is built from
//!
//! ```text
//! U_{k,ℓ}[a,b] = (1/n_ℓ) Σ_{c=1..n_ℓ} exp(2πi c(b−a)/n_ℓ) · exp(2πi k (N_ℓ + (a−1)n_ℓ + c)/N)
//! ```
//!
//! with `N_1 = 0`, `N_ℓ = n_1² + … + n_{ℓ−1}²`, and then
//! `Φ(X) = (1/N) Σ_k U_k X U_k†`. All indices in this module (`k`, `ℓ`,
//! `a`, `b`, `c`) are 1-based, matching the formula above; conversion to
//! 0-based storage happens only when writing matrix entries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, MixedUnitaryDecomposition};
use crate::error::{dims, Error, Result};
use crate::linalg::{kron, root_of_unity, ComplexMatrix, C64, DEFAULT_TOL};

/// One isotypic block: `multiplicity` copies of an irrep of dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub multiplicity: usize,
    pub dim: usize,
}

/// Ordered list of `(m_ℓ, n_ℓ)` pairs. Order is significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct BlockSpec {
    blocks: Vec<Block>,
}

impl BlockSpec {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidBlockSpec("no blocks".into()));
        }
        if let Some(&(m, n)) = pairs.iter().find(|&&(m, n)| m == 0 || n == 0) {
            return Err(Error::InvalidBlockSpec(format!(
                "block ({m}, {n}) has a zero entry"
            )));
        }
        Ok(Self {
            blocks: pairs
                .into_iter()
                .map(|(multiplicity, dim)| Block { multiplicity, dim })
                .collect(),
        })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.blocks
            .iter()
            .map(|b| (b.multiplicity, b.dim))
            .collect()
    }

    /// `d = Σ m_ℓ n_ℓ`.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.multiplicity * b.dim).sum()
    }

    /// `N = Σ n_ℓ²`, the Choi rank and mixed-unitary rank of the block channel.
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// Sorted by descending `n_ℓ`, then descending `m_ℓ`.
    pub fn canonical(&self) -> BlockSpec {
        let mut blocks = self.blocks.clone();
        blocks.sort_by(|x, y| y.dim.cmp(&x.dim).then(y.multiplicity.cmp(&x.multiplicity)));
        BlockSpec { blocks }
    }

    /// Row offset of each block inside `M_d`.
    pub fn row_offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let start = *acc;
                *acc += b.multiplicity * b.dim;
                Some(start)
            })
            .collect()
    }
}

impl TryFrom<Vec<(usize, usize)>> for BlockSpec {
    type Error = Error;

    fn try_from(pairs: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(pairs)
    }
}

impl From<BlockSpec> for Vec<(usize, usize)> {
    fn from(spec: BlockSpec) -> Self {
        spec.pairs()
    }
}

/// Parses `"1x2,1x1"` as `[(1, 2), (1, 1)]`.
impl FromStr for BlockSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let pairs = s
            .split(',')
            .map(|item| {
                let item = item.trim();
                let (m, n) = item.split_once(['x', 'X']).ok_or_else(|| {
                    Error::InvalidBlockSpec(format!("expected MxN, got {item:?}"))
                })?;
                let parse = |t: &str| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::InvalidBlockSpec(format!("{item:?}: {e}")))
                };
                Ok((parse(m)?, parse(n)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("{}x{}", b.multiplicity, b.dim))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Offsets `N_ℓ = n_1² + … + n_{ℓ−1}²`, with `N_1 = 0` (returned 0-indexed by ℓ).
pub fn block_offsets(spec: &BlockSpec) -> Vec<usize> {
    spec.blocks
        .iter()
        .scan(0, |acc, b| {
            let start = *acc;
            *acc += b.dim * b.dim;
            Some(start)
        })
        .collect()
}

fn check_k(k: usize, spec: &BlockSpec) -> Result<()> {
    let n = spec.rank();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange(format!("k = {k} not in 1..={n}")));
    }
    Ok(())
}

/// `U_{k,ℓ} ∈ M_{n_ℓ}` for 1-based `k ∈ 1..=N` and `ell ∈ 1..=p`.
pub fn constructor_unitary(k: usize, ell: usize, spec: &BlockSpec) -> Result<ComplexMatrix> {
    check_k(k, spec)?;
    if ell == 0 || ell > spec.num_blocks() {
        return Err(Error::IndexOutOfRange(format!(
            "ell = {ell} not in 1..={}",
            spec.num_blocks()
        )));
    }
    let big_n = spec.rank() as i64;
    let n = spec.blocks[ell - 1].dim as i64;
    let offset = block_offsets(spec)[ell - 1] as i64;
    let k = k as i64;

    let mut u = ComplexMatrix::zeros(n as usize, n as usize);
    for a in 1..=n {
        // The second phase depends only on (a, c); hoist it out of the b loop.
        let row_phase: Vec<C64> = (1..=n)
            .map(|c| root_of_unity(k * (offset + (a - 1) * n + c), big_n))
            .collect();
        for b in 1..=n {
            let entry: C64 = (1..=n)
                .map(|c| root_of_unity(c * (b - a), n) * row_phase[(c - 1) as usize])
                .sum();
            u[((a - 1) as usize, (b - 1) as usize)] = entry / n as f64;
        }
    }
    Ok(u)
}

/// `U_k = (𝟙_{m_1} ⊗ U_{k,1}) ⊕ … ⊕ (𝟙_{m_p} ⊗ U_{k,p})` for 1-based `k`.
pub fn assemble_unitary(k: usize, spec: &BlockSpec) -> Result<ComplexMatrix> {
    check_k(k, spec)?;
    let d = spec.total_dim();
    let mut u = ComplexMatrix::zeros(d, d);
    for ((ell, block), start) in spec.blocks.iter().enumerate().zip(spec.row_offsets()) {
        let small = constructor_unitary(k, ell + 1, spec)?;
        let piece = kron(&ComplexMatrix::identity(block.multiplicity), &small);
        u.set_submatrix(start, start, &piece);
    }
    Ok(u)
}

/// The uniform `N`-term decomposition `(1/N) Σ_k U_k X U_k†` of the block channel.
pub fn minimal_decomposition(spec: &BlockSpec) -> MixedUnitaryDecomposition {
    let unitaries = (1..=spec.rank())
        .map(|k| assemble_unitary(k, spec).expect("k is in range"))
        .collect();
    MixedUnitaryDecomposition::uniform(unitaries).expect("constructed unitaries are unitary")
}

/// Replaces each `U_k` by `u† U_k u`; probabilities are unchanged.
///
/// If `Φ(X) = u† Ψ(u X u†) u` and `d` decomposes `Ψ`, the result decomposes `Φ`.
pub fn conjugated_decomposition(
    d: &MixedUnitaryDecomposition,
    u: &ComplexMatrix,
) -> Result<MixedUnitaryDecomposition> {
    if u.shape() != (d.dim(), d.dim()) {
        return Err(Error::DimensionMismatch {
            expected: dims(d.dim(), d.dim()),
            found: dims(u.rows(), u.cols()),
        });
    }
    let deviation = u.unitarity_error();
    if deviation > DEFAULT_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let ud = u.adjoint();
    let unitaries = d.unitaries().iter().map(|uk| &(&ud * uk) * u).collect();
    MixedUnitaryDecomposition::from_raw_parts(d.probs().to_vec(), unitaries)
}

/// Errors measured by [`verify_decomposition`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    /// `‖J(Σ p_k U_k · U_k†) − J(target)‖_F`.
    pub max_channel_error: f64,
    /// `max_k ‖U_k†U_k − 𝟙‖_F`.
    pub max_unitarity_error: f64,
    /// `|Σ p_k − 1|` (or the most negative probability, if larger).
    pub prob_sum_error: f64,
}

pub fn verify_decomposition(
    d: &MixedUnitaryDecomposition,
    target: &Channel,
    tol: f64,
) -> Result<VerificationReport> {
    if target.dim_in() != d.dim() || target.dim_out() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("M_{0} → M_{0}", d.dim()),
            found: format!("M_{} → M_{}", target.dim_in(), target.dim_out()),
        });
    }
    let max_channel_error = d.choi().frobenius_distance(&target.choi());
    let max_unitarity_error = d.max_unitarity_error();
    let prob_sum_error = d.prob_sum_error();
    Ok(VerificationReport {
        pass: max_channel_error <= tol && max_unitarity_error <= tol && prob_sum_error <= tol,
        max_channel_error,
        max_unitarity_error,
        prob_sum_error,
    })
}

/// Largest Frobenius norm of `(1/N) Σ_k U_{k,ℓ} X U_{k,ℓ'}†` over matrix units
/// `X ∈ M_{n_ℓ, n_ℓ'}` (1-based `ell`, `ell_prime`). Zero for `ℓ ≠ ℓ'`.
pub fn cross_block_residual(spec: &BlockSpec, ell: usize, ell_prime: usize) -> Result<f64> {
    let big_n = spec.rank();
    let left: Vec<ComplexMatrix> = (1..=big_n)
        .map(|k| constructor_unitary(k, ell, spec))
        .collect::<Result<_>>()?;
    let right: Vec<ComplexMatrix> = (1..=big_n)
        .map(|k| constructor_unitary(k, ell_prime, spec).map(|u| u.adjoint()))
        .collect::<Result<_>>()?;
    let (rows, cols) = (left[0].rows(), right[0].rows());
    let mut worst: f64 = 0.0;
    for a in 0..rows {
        for b in 0..cols {
            let x = ComplexMatrix::matrix_unit(rows, cols, a, b);
            let mut acc = ComplexMatrix::zeros(rows, cols);
            for (l, r) in left.iter().zip(&right) {
                acc += &(&(l * &x) * r);
            }
            worst = worst.max(acc.scale_real(1.0 / big_n as f64).frobenius_norm());
        }
    }
    Ok(worst)
}

/// Largest distance between `(1/N) Σ_k U_{k,ℓ} X U_{k,ℓ}†` and `Ω_{n_ℓ}(X)`
/// over matrix units `X`.
pub fn single_block_residual(spec: &BlockSpec, ell: usize) -> Result<f64> {
    let big_n = spec.rank();
    let us: Vec<ComplexMatrix> = (1..=big_n)
        .map(|k| constructor_unitary(k, ell, spec))
        .collect::<Result<_>>()?;
    let n = us[0].rows();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let x = ComplexMatrix::matrix_unit(n, n, a, b);
            let mut acc = ComplexMatrix::zeros(n, n);
            for u in &us {
                acc += &(&(u * &x) * &u.adjoint());
            }
            let expected = if a == b {
                ComplexMatrix::identity(n).scale_real(1.0 / n as f64)
            } else {
                ComplexMatrix::zeros(n, n)
            };
            worst = worst.max(
                acc.scale_real(1.0 / big_n as f64)
                    .frobenius_distance(&expected),
            );
        }
    }
    Ok(worst)
}

/// `true` if all off-diagonal Gram entries share one value and all diagonal
/// entries another, within `tol`.
pub fn is_equiangular(d: &MixedUnitaryDecomposition, tol: f64) -> bool {
    let g = d.gram();
    let n = g.rows();
    if n < 2 {
        return true;
    }
    let diag = g[(0, 0)];
    let off = g[(0, 1)];
    (0..n).all(|i| {
        (0..n).all(|j| {
            let target = if i == j { diag } else { off };
            (g[(i, j)] - target).norm() <= tol
        })
    })
}
