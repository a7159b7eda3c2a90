//! Channels in Kraus form, Choi matrices, and mixed-unitary decompositions.

use crate::error::{dims, Error, Result};
use crate::linalg::{
    direct_sum, hermitian_eig, kron, numerical_rank, ComplexMatrix, DEFAULT_TOL, ZERO,
};
use crate::mud::BlockSpec;

/// Trace-preservation tolerance enforced at construction.
pub const TP_TOL: f64 = 1e-10;

/// Eigenvalue cutoff used when factoring a Choi matrix into Kraus operators.
pub const KRAUS_CUTOFF: f64 = 1e-12;

/// A completely positive trace-preserving map `M_n → M_m` in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    /// Validates shapes and `Σ A_k† A_k = 𝟙` (within [`TP_TOL`]).
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let (dim_out, dim_in) = first.shape();
        if let Some(bad) = kraus.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::DimensionMismatch {
                expected: dims(dim_out, dim_in),
                found: dims(bad.rows(), bad.cols()),
            });
        }
        let mut gram = ComplexMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            gram += &(&k.adjoint() * k);
        }
        let deviation = gram.frobenius_distance(&ComplexMatrix::identity(dim_in));
        if deviation > TP_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    /// Builds the channel with the given Choi matrix by spectral factorization.
    ///
    /// Eigenvalues at or below [`KRAUS_CUTOFF`] are dropped; each remaining
    /// eigenpair `(λ, v)` gives `A[a, j] = √λ · v[a·dim_in + j]`.
    pub fn from_choi(choi: &ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        let size = dim_in * dim_out;
        if choi.shape() != (size, size) {
            return Err(Error::DimensionMismatch {
                expected: dims(size, size),
                found: dims(choi.rows(), choi.cols()),
            });
        }
        let eig = hermitian_eig(choi, DEFAULT_TOL)?;
        let kraus = eig
            .values
            .iter()
            .enumerate()
            .take_while(|(_, &lambda)| lambda > KRAUS_CUTOFF)
            .map(|(col, &lambda)| {
                let s = lambda.sqrt();
                ComplexMatrix::from_fn(dim_out, dim_in, |a, j| {
                    eig.vectors[(a * dim_in + j, col)] * s
                })
            })
            .collect();
        Self::new(kraus)
    }

    /// Builds a channel from its action on matrix units, via the Choi matrix.
    pub fn from_linear_map(
        dim_in: usize,
        dim_out: usize,
        map: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let mut choi = ComplexMatrix::zeros(dim_out * dim_in, dim_out * dim_in);
        for j in 0..dim_in {
            for k in 0..dim_in {
                let image = map(&ComplexMatrix::matrix_unit(dim_in, dim_in, j, k));
                for a in 0..dim_out {
                    for b in 0..dim_out {
                        choi[(a * dim_in + j, b * dim_in + k)] = image[(a, b)];
                    }
                }
            }
        }
        Self::from_choi(&choi, dim_in, dim_out)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn is_square(&self) -> bool {
        self.dim_in == self.dim_out
    }

    /// `Σ_k A_k X A_k†`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch {
                expected: dims(self.dim_in, self.dim_in),
                found: dims(x.rows(), x.cols()),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &(&(k * x) * &k.adjoint());
        }
        Ok(out)
    }

    /// `J(Φ) = Σ_{j,k} Φ(E_{j,k}) ⊗ E_{j,k}`, of size `mn × mn`.
    pub fn choi(&self) -> ComplexMatrix {
        choi_of_kraus(&self.kraus, self.dim_in, self.dim_out)
    }

    pub fn choi_rank(&self, tol: f64) -> usize {
        numerical_rank(&self.choi(), tol)
    }

    /// Matrix `S` with `vec(Φ(X)) = S · vec(X)` for row-major `vec`.
    ///
    /// `S` is an entry permutation of the Choi matrix, so Frobenius
    /// distances between superoperators equal those between Choi matrices.
    pub fn superoperator(&self) -> ComplexMatrix {
        let (n, m) = (self.dim_in, self.dim_out);
        let mut s = ComplexMatrix::zeros(m * m, n * n);
        for k in &self.kraus {
            for a in 0..m {
                for b in 0..m {
                    for j in 0..n {
                        let kaj = k[(a, j)];
                        if kaj == ZERO {
                            continue;
                        }
                        for l in 0..n {
                            s[(a * m + b, j * n + l)] += kaj * k[(b, l)].conj();
                        }
                    }
                }
            }
        }
        s
    }

    /// `‖J(Φ∘Φ) − J(Φ)‖_F`; infinity for non-square channels.
    pub fn idempotence_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let s = self.superoperator();
        (&s * &s).frobenius_distance(&s)
    }

    /// The channel `X ↦ U Φ(U† X U) U†` for a unitary `U`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Channel> {
        if !self.is_square() || u.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch {
                expected: dims(self.dim_in, self.dim_in),
                found: dims(u.rows(), u.cols()),
            });
        }
        let deviation = u.unitarity_error();
        if deviation > DEFAULT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let ud = u.adjoint();
        Channel::new(self.kraus.iter().map(|k| &(u * k) * &ud).collect())
    }

    /// Kraus family of minimal length, from the spectral factorization of
    /// the Choi matrix. The operators are pairwise Hilbert–Schmidt orthogonal.
    pub fn minimal_kraus(&self) -> Result<Channel> {
        Self::from_choi(&self.choi(), self.dim_in, self.dim_out)
    }
}

pub(crate) fn choi_of_kraus(
    kraus: &[ComplexMatrix],
    dim_in: usize,
    dim_out: usize,
) -> ComplexMatrix {
    let size = dim_in * dim_out;
    let mut choi = ComplexMatrix::zeros(size, size);
    for k in kraus {
        // Row-major vec(A) is the Choi vector of A.
        let w = k.as_slice();
        for (r, &wr) in w.iter().enumerate() {
            if wr == ZERO {
                continue;
            }
            for (c, &wc) in w.iter().enumerate() {
                choi[(r, c)] += wr * wc.conj();
            }
        }
    }
    choi
}

pub fn identity_channel(n: usize) -> Channel {
    Channel::new(vec![ComplexMatrix::identity(n)]).expect("identity is trace preserving")
}

/// Completely depolarizing channel `Ω_n(X) = Tr(X) 𝟙/n`, with Kraus
/// operators `E_{j,k}/√n`.
pub fn depolarizing(n: usize) -> Channel {
    let s = 1.0 / (n as f64).sqrt();
    let kraus = (0..n)
        .flat_map(|j| (0..n).map(move |k| (j, k)))
        .map(|(j, k)| ComplexMatrix::matrix_unit(n, n, j, k).scale_real(s))
        .collect();
    Channel::new(kraus).expect("depolarizing Kraus family is trace preserving")
}

/// `Φ_a ⊗ Φ_b`, Kraus `{A_i ⊗ B_j}`.
pub fn channel_tensor(a: &Channel, b: &Channel) -> Channel {
    let kraus = a
        .kraus
        .iter()
        .flat_map(|x| b.kraus.iter().map(move |y| kron(x, y)))
        .collect();
    Channel {
        dim_in: a.dim_in * b.dim_in,
        dim_out: a.dim_out * b.dim_out,
        kraus,
    }
}

/// `Φ_a ⊕ Φ_b`, Kraus `{A_i ⊕ 0} ∪ {0 ⊕ B_j}`. Off-diagonal input blocks are
/// annihilated.
pub fn channel_direct_sum(a: &Channel, b: &Channel) -> Channel {
    let zero_b = ComplexMatrix::zeros(b.dim_out, b.dim_in);
    let zero_a = ComplexMatrix::zeros(a.dim_out, a.dim_in);
    let kraus = a
        .kraus
        .iter()
        .map(|x| direct_sum(x, &zero_b))
        .chain(b.kraus.iter().map(|y| direct_sum(&zero_a, y)))
        .collect();
    Channel {
        dim_in: a.dim_in + b.dim_in,
        dim_out: a.dim_out + b.dim_out,
        kraus,
    }
}

/// `⊕_ℓ (𝟙_{M_{m_ℓ}} ⊗ Ω_{n_ℓ})` on `M_d`, `d = Σ m_ℓ n_ℓ`.
pub fn block_channel(spec: &BlockSpec) -> Channel {
    spec.blocks()
        .iter()
        .map(|b| channel_tensor(&identity_channel(b.multiplicity), &depolarizing(b.dim)))
        .reduce(|acc, c| channel_direct_sum(&acc, &c))
        .expect("block spec is non-empty")
}

/// Outcome of a Choi-distance comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelComparison {
    pub equal: bool,
    /// `‖J(a) − J(b)‖_F`.
    pub error: f64,
}

/// Channels are equal iff their Choi matrices are within `tol` in Frobenius norm.
pub fn channels_equal(a: &Channel, b: &Channel, tol: f64) -> Result<ChannelComparison> {
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out) {
        return Err(Error::DimensionMismatch {
            expected: format!("M_{} → M_{}", a.dim_in, a.dim_out),
            found: format!("M_{} → M_{}", b.dim_in, b.dim_out),
        });
    }
    let error = a.choi().frobenius_distance(&b.choi());
    Ok(ChannelComparison {
        equal: error <= tol,
        error,
    })
}

/// Probability tolerance for [`MixedUnitaryDecomposition::new`].
pub const PROB_TOL: f64 = 1e-12;

/// `X ↦ Σ_k p_k U_k X U_k†`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedUnitaryDecomposition {
    dim: usize,
    probs: Vec<f64>,
    unitaries: Vec<ComplexMatrix>,
}

impl MixedUnitaryDecomposition {
    /// Checks shapes, that `probs` is a probability vector (within
    /// [`PROB_TOL`]) and that every `U_k` is unitary (within [`DEFAULT_TOL`]).
    pub fn new(probs: Vec<f64>, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        let d = Self::from_raw_parts(probs, unitaries)?;
        if let Some(p) = d.probs.iter().find(|&&p| p < 0.0) {
            return Err(Error::InvalidProbabilities(format!("negative entry {p}")));
        }
        let sum_err = d.prob_sum_error();
        if sum_err > PROB_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "probabilities sum to 1 ± {sum_err:.3e}"
            )));
        }
        let deviation = d.max_unitarity_error();
        if deviation > DEFAULT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(d)
    }

    /// Checks shapes only. Used when reading possibly-corrupted input that
    /// should still be reported on by [`crate::mud::verify_decomposition`].
    pub fn from_raw_parts(probs: Vec<f64>, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        let first = unitaries.first().ok_or(Error::EmptyKraus)?;
        let dim = first.rows();
        if probs.len() != unitaries.len() {
            return Err(Error::InvalidProbabilities(format!(
                "{} probabilities for {} unitaries",
                probs.len(),
                unitaries.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidProbabilities("non-finite entry".into()));
        }
        if let Some(bad) = unitaries.iter().find(|u| u.shape() != (dim, dim)) {
            return Err(Error::DimensionMismatch {
                expected: dims(dim, dim),
                found: dims(bad.rows(), bad.cols()),
            });
        }
        Ok(Self {
            dim,
            probs,
            unitaries,
        })
    }

    /// Uniform mixture `(1/N) Σ U_k X U_k†`.
    pub fn uniform(unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        let p = 1.0 / unitaries.len().max(1) as f64;
        Self::new(vec![p; unitaries.len()], unitaries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    /// Number of unitaries.
    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    /// `|Σ p_k − 1|`, or the magnitude of the most negative entry if larger.
    pub fn prob_sum_error(&self) -> f64 {
        let sum: f64 = self.probs.iter().sum();
        let negative = self.probs.iter().fold(0.0f64, |acc, &p| acc.max(-p));
        (sum - 1.0).abs().max(negative)
    }

    pub fn max_unitarity_error(&self) -> f64 {
        self.unitaries
            .iter()
            .map(ComplexMatrix::unitarity_error)
            .fold(0.0, f64::max)
    }

    /// Kraus operators `√p_k U_k`.
    pub fn kraus(&self) -> Vec<ComplexMatrix> {
        self.probs
            .iter()
            .zip(&self.unitaries)
            .map(|(&p, u)| u.scale_real(p.max(0.0).sqrt()))
            .collect()
    }

    pub fn choi(&self) -> ComplexMatrix {
        choi_of_kraus(&self.kraus(), self.dim, self.dim)
    }

    /// Gram matrix `⟨U_k, U_{k'}⟩`.
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            crate::linalg::frob_inner(&self.unitaries[i], &self.unitaries[j])
                .expect("unitaries share a shape")
        })
    }
}

/// The channel with Kraus operators `√p_k U_k`.
pub fn as_channel(d: &MixedUnitaryDecomposition) -> Result<Channel> {
    Channel::new(d.kraus())
}

#[cfg(test)]
fn c(re: f64) -> crate::linalg::C64 {
    crate::linalg::C64::new(re, 0.0)
}
