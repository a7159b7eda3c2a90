//! Complementary channels and numerical forms of the mixed-unitarity
//! criteria: vanishing diagonals on traceless inputs, orthogonal bases of
//! trace vectors, and images inside a block algebra `⊕ (𝟙_m ⊗ M_n)`.

use crate::channel::{Channel, MixedUnitaryDecomposition};
use crate::error::{dims, Error, Result};
use crate::linalg::{
    frob_inner, inner, kron, partial_trace_first, partial_trace_second, vec_norm, ComplexMatrix,
    C64, ZERO,
};
use crate::mud::{block_offsets, BlockSpec};

/// Stinespring isometry `A = Σ_k A_k ⊗ e_k ∈ M_{mr, n}`; row `a·r + k` holds
/// row `a` of `A_k`.
pub fn stinespring_isometry(c: &Channel) -> ComplexMatrix {
    let r = c.kraus().len();
    ComplexMatrix::from_fn(c.dim_out() * r, c.dim_in(), |row, j| {
        c.kraus()[row % r][(row / r, j)]
    })
}

/// `Ψ(X) = Σ_{j,k} ⟨A_j† A_k, X⟩ E_{j,k}`, i.e. `(Tr ⊗ 𝟙)(A X A†)` for the
/// Stinespring isometry of `c`.
pub fn complementary_from_kraus(c: &Channel) -> Channel {
    let r = c.kraus().len();
    let kraus = (0..c.dim_out())
        .map(|a| ComplexMatrix::from_fn(r, c.dim_in(), |k, j| c.kraus()[k][(a, j)]))
        .collect();
    Channel::new(kraus).expect("complement of a channel is trace preserving")
}

/// `Ψ_n(X) = (1/n) 𝟙_n ⊗ X`, complementary to `Ω_n`.
pub fn depolarizing_complement(n: usize) -> Channel {
    let s = 1.0 / (n as f64).sqrt();
    let kraus = (0..n)
        .map(|j| {
            let e = ComplexMatrix::matrix_unit(n, 1, j, 0);
            kron(&e, &ComplexMatrix::identity(n)).scale_real(s)
        })
        .collect();
    Channel::new(kraus).expect("depolarizing complement is trace preserving")
}

/// The channel `M_d → M_N` acting on block `ℓ` as
/// `X_ℓ ⊗ Y_ℓ ↦ (Tr(X_ℓ)/n_ℓ) 𝟙_{n_ℓ} ⊗ Y_ℓ` and discarding cross blocks.
/// Complementary to [`crate::channel::block_channel`]; its image is
/// `⊕_ℓ (𝟙_{n_ℓ} ⊗ M_{n_ℓ})`.
pub fn block_complement(spec: &BlockSpec) -> Channel {
    let d = spec.total_dim();
    let big_n = spec.rank();
    let offsets = block_offsets(spec);
    let mut kraus = Vec::new();
    for ((block, &out_start), in_start) in
        spec.blocks().iter().zip(&offsets).zip(spec.row_offsets())
    {
        let (m, n) = (block.multiplicity, block.dim);
        let s = 1.0 / (n as f64).sqrt();
        for i in 0..m {
            for j in 0..n {
                // Row (j·n + x) of the block output reads input row (i·n + x).
                let mut k = ComplexMatrix::zeros(big_n, d);
                for x in 0..n {
                    k[(out_start + j * n + x, in_start + i * n + x)] = C64::new(s, 0.0);
                }
                kraus.push(k);
            }
        }
    }
    Channel::new(kraus).expect("block complement is trace preserving")
}

/// Fixed basis of traceless `n × n` matrices: `E_{j,k}` for `j ≠ k`, then
/// `E_{j,j} − E_{j+1,j+1}`.
pub fn traceless_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in 0..n {
            if j != k {
                out.push(ComplexMatrix::matrix_unit(n, n, j, k));
            }
        }
    }
    for j in 0..n.saturating_sub(1) {
        out.push(
            &ComplexMatrix::matrix_unit(n, n, j, j)
                - &ComplexMatrix::matrix_unit(n, n, j + 1, j + 1),
        );
    }
    out
}

/// Result of [`vanishing_diagonal_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalReport {
    pub pass: bool,
    /// Largest `|Ψ(X)_{k,k}|` over the traceless basis.
    pub worst: f64,
    /// Index into [`traceless_basis`] achieving `worst`, if any.
    pub worst_input: Option<usize>,
}

/// Checks that `Ψ(X)` has vanishing diagonal for every traceless `X`.
pub fn vanishing_diagonal_check(psi: &Channel, tol: f64) -> DiagonalReport {
    let mut worst = 0.0;
    let mut worst_input = None;
    for (idx, x) in traceless_basis(psi.dim_in()).iter().enumerate() {
        let y = psi.apply(x).expect("basis has input dimension");
        for z in y.diagonal() {
            if z.norm() > worst {
                worst = z.norm();
                worst_input = Some(idx);
            }
        }
    }
    DiagonalReport {
        pass: worst <= tol,
        worst,
        worst_input,
    }
}

/// Trace-vector residual of one vector.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceVectorReport {
    pub vector: Vec<C64>,
    /// `max_X |⟨v, Ψ(X) v⟩ − Tr(Ψ(X))|` over the traceless probe basis.
    pub max_deviation: f64,
}

/// Result of [`trace_vector_basis_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct TraceVectorBasisReport {
    pub pass: bool,
    /// `max_{i≠j} |⟨v_i, v_j⟩|`.
    pub max_overlap: f64,
    pub vectors: Vec<TraceVectorReport>,
}

impl TraceVectorBasisReport {
    pub fn max_deviation(&self) -> f64 {
        self.vectors
            .iter()
            .map(|v| v.max_deviation)
            .fold(0.0, f64::max)
    }
}

/// Checks that `vectors` are pairwise orthogonal and that each is a trace
/// vector for `{Ψ(X) : Tr(X) = 0}`, probed over [`traceless_basis`].
pub fn trace_vector_basis_check(
    psi: &Channel,
    vectors: &[Vec<C64>],
    tol: f64,
) -> Result<TraceVectorBasisReport> {
    let big_n = psi.dim_out();
    if vectors.len() != big_n {
        return Err(Error::DimensionMismatch {
            expected: format!("{big_n} vectors"),
            found: format!("{} vectors", vectors.len()),
        });
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != big_n) {
        return Err(Error::DimensionMismatch {
            expected: format!("vectors of length {big_n}"),
            found: format!("length {}", v.len()),
        });
    }
    let images: Vec<ComplexMatrix> = traceless_basis(psi.dim_in())
        .iter()
        .map(|x| psi.apply(x).expect("basis has input dimension"))
        .collect();
    let mut max_overlap: f64 = 0.0;
    for (i, u) in vectors.iter().enumerate() {
        for v in &vectors[i + 1..] {
            max_overlap = max_overlap.max(inner(u, v).norm());
        }
    }
    let vectors: Vec<TraceVectorReport> = vectors
        .iter()
        .map(|v| {
            let max_deviation = images
                .iter()
                .map(|y| (inner(v, &y.apply_vec(v)) - y.trace()).norm())
                .fold(0.0, f64::max);
            TraceVectorReport {
                vector: v.clone(),
                max_deviation,
            }
        })
        .collect();
    let pass = max_overlap <= tol && vectors.iter().all(|r| r.max_deviation <= tol);
    Ok(TraceVectorBasisReport {
        pass,
        max_overlap,
        vectors,
    })
}

/// Standard basis `e_1, …, e_n` of `C^n`.
pub fn standard_basis(n: usize) -> Vec<Vec<C64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { C64::new(1.0, 0.0) } else { ZERO })
                .collect()
        })
        .collect()
}

/// `Ξ(X) = U Ψ(X) U†` with `U = Σ_k e_k v_k† / ‖v_k‖`.
pub fn rotate_by_trace_vectors(psi: &Channel, vectors: &[Vec<C64>]) -> Result<Channel> {
    let big_n = psi.dim_out();
    if vectors.len() != big_n || vectors.iter().any(|v| v.len() != big_n) {
        return Err(Error::DimensionMismatch {
            expected: format!("{big_n} vectors of length {big_n}"),
            found: format!("{} vectors", vectors.len()),
        });
    }
    let mut u = ComplexMatrix::zeros(big_n, big_n);
    for (k, v) in vectors.iter().enumerate() {
        let norm = vec_norm(v);
        for (j, z) in v.iter().enumerate() {
            u[(k, j)] = z.conj() / norm;
        }
    }
    Channel::new(psi.kraus().iter().map(|b| &u * b).collect())
}

/// Orthonormal trace vectors for `{Ψ_0(X) : Tr(X) = 0}` read off from a
/// mixed-unitary decomposition, where `Ψ_0` is the complement of `reference`.
///
/// `reference` must have pairwise orthogonal Kraus operators `A_j` (as
/// produced by [`Channel::minimal_kraus`]) and exactly as many of them as
/// `d` has unitaries. The Kraus operators `B_k = √p_k U_k` of `d` satisfy
/// `B = W A` for a unitary `W`, and the vectors `v_k = W† e_k` are returned;
/// rotating `Ψ_0` by them gives the complement of `d` itself.
pub fn decomposition_trace_vectors(
    d: &MixedUnitaryDecomposition,
    reference: &Channel,
) -> Result<Vec<Vec<C64>>> {
    let a = reference.kraus();
    let b = d.kraus();
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} reference Kraus operators", b.len()),
            found: format!("{}", a.len()),
        });
    }
    if reference.dim_in() != d.dim() || reference.dim_out() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: dims(d.dim(), d.dim()),
            found: dims(reference.dim_out(), reference.dim_in()),
        });
    }
    let r = a.len();
    let norms: Vec<f64> = a.iter().map(|x| x.frobenius_norm().powi(2)).collect();
    for i in 0..r {
        for j in i + 1..r {
            let overlap = frob_inner(&a[i], &a[j])?.norm();
            if overlap > 1e-9 * (norms[i] * norms[j]).sqrt() {
                return Err(Error::InvalidMatrix(
                    "reference Kraus operators are not orthogonal".into(),
                ));
            }
        }
    }
    let w = ComplexMatrix::from_fn(r, r, |k, j| {
        frob_inner(&a[j], &b[k]).expect("shared shape") / norms[j]
    });
    let deviation = w.unitarity_error();
    if deviation > 1e-8 {
        return Err(Error::NotUnitary { deviation });
    }
    let wd = w.adjoint();
    Ok((0..r).map(|k| wd.column(k)).collect())
}

/// Result of [`image_in_block_algebra_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraReport {
    pub pass: bool,
    /// Largest `‖Y − P(Y)‖_F` over images `Y = Ψ(E_{j,k})`, with `P` the
    /// orthogonal projection onto `⊕ (𝟙_{m_ℓ} ⊗ M_{n_ℓ})`.
    pub max_residual: f64,
}

/// Orthogonal projection of `y` onto `⊕_ℓ (𝟙_{m_ℓ} ⊗ M_{n_ℓ})`.
pub fn project_onto_block_algebra(y: &ComplexMatrix, spec: &BlockSpec) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(y.rows(), y.cols());
    for (block, start) in spec.blocks().iter().zip(spec.row_offsets()) {
        let (m, n) = (block.multiplicity, block.dim);
        let diag = y.submatrix(start, start, m * n, m * n);
        let reduced = partial_trace_second_factor_m(&diag, m, n).scale_real(1.0 / m as f64);
        out.set_submatrix(start, start, &kron(&ComplexMatrix::identity(m), &reduced));
    }
    out
}

fn partial_trace_second_factor_m(x: &ComplexMatrix, m: usize, n: usize) -> ComplexMatrix {
    // Trace over the m-dimensional (first) factor of M_m ⊗ M_n.
    partial_trace_first(x, m, n)
}

/// Checks that `Ψ(X) ∈ ⊕_ℓ (𝟙_{m_ℓ} ⊗ M_{n_ℓ})` for every matrix unit `X`.
/// Requires `m_ℓ ≥ n_ℓ` for every block.
pub fn image_in_block_algebra_check(
    psi: &Channel,
    spec: &BlockSpec,
    tol: f64,
) -> Result<AlgebraReport> {
    if let Some(b) = spec.blocks().iter().find(|b| b.multiplicity < b.dim) {
        return Err(Error::MultiplicityTooSmall {
            m: b.multiplicity,
            n: b.dim,
        });
    }
    if psi.dim_out() != spec.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("output dimension {}", spec.total_dim()),
            found: format!("{}", psi.dim_out()),
        });
    }
    let n = psi.dim_in();
    let mut max_residual: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let y = psi.apply(&ComplexMatrix::matrix_unit(n, n, j, k))?;
            max_residual =
                max_residual.max(y.frobenius_distance(&project_onto_block_algebra(&y, spec)));
        }
    }
    Ok(AlgebraReport {
        pass: max_residual <= tol,
        max_residual,
    })
}

/// Checks both Stinespring marginals: `(𝟙 ⊗ Tr)(AXA†) = Φ(X)` and
/// `(Tr ⊗ 𝟙)(AXA†) = Ψ(X)` over all matrix units, returning the worst error.
pub fn complementarity_error(phi: &Channel, psi: &Channel, isometry: &ComplexMatrix) -> f64 {
    let (n, m, r) = (phi.dim_in(), phi.dim_out(), psi.dim_out());
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            let x = ComplexMatrix::matrix_unit(n, n, j, k);
            let big = &(isometry * &x) * &isometry.adjoint();
            let a = partial_trace_second(&big, m, r);
            let b = partial_trace_first(&big, m, r);
            worst = worst
                .max(a.frobenius_distance(&phi.apply(&x).expect("dims")))
                .max(b.frobenius_distance(&psi.apply(&x).expect("dims")));
        }
    }
    worst
}

/// Gram matrix `⟨Ψ(E_a), Ψ(E_b)⟩` over the matrix-unit basis of the input.
/// Two channels related by an isometry `V` (`Ξ = V Ψ V†`) share it.
pub fn image_gram(psi: &Channel) -> ComplexMatrix {
    let n = psi.dim_in();
    let images: Vec<ComplexMatrix> = (0..n * n)
        .map(|i| {
            psi.apply(&ComplexMatrix::matrix_unit(n, n, i / n, i % n))
                .expect("dims")
        })
        .collect();
    ComplexMatrix::from_fn(n * n, n * n, |a, b| {
        frob_inner(&images[a], &images[b]).expect("shared shape")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        as_channel, block_channel, channels_equal, depolarizing, identity_channel,
    };
    use crate::linalg::{numerical_rank, random_unitary, DEFAULT_TOL};
    use crate::mud::minimal_decomposition;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(pairs: &[(usize, usize)]) -> BlockSpec {
        BlockSpec::new(pairs.to_vec()).unwrap()
    }

    fn trace_map(n: usize) -> Channel {
        Channel::new(
            (0..n)
                .map(|j| ComplexMatrix::matrix_unit(1, n, 0, j))
                .collect(),
        )
        .unwrap()
    }

    /// Rank of the span of the vectorized images of all matrix units.
    fn image_dimension(psi: &Channel) -> usize {
        let n = psi.dim_in();
        let rows: Vec<Vec<C64>> = (0..n * n)
            .map(|i| {
                psi.apply(&ComplexMatrix::matrix_unit(n, n, i / n, i % n))
                    .unwrap()
                    .as_slice()
                    .to_vec()
            })
            .collect();
        numerical_rank(&ComplexMatrix::from_rows(rows).unwrap(), DEFAULT_TOL)
    }

    fn random_channel(n: usize, r: usize, seed: u64) -> Channel {
        // Random isometry C^n → C^{n r}, sliced into r Kraus operators.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(n * r, &mut rng);
        let kraus = (0..r).map(|k| u.submatrix(k * n, 0, n, n)).collect();
        Channel::new(kraus).unwrap()
    }

    #[test]
    fn complement_of_identity_is_trace() {
        for n in 1..=3 {
            let psi = complementary_from_kraus(&identity_channel(n));
            assert_eq!((psi.dim_in(), psi.dim_out()), (n, 1));
            assert!(channels_equal(&psi, &trace_map(n), 1e-14).unwrap().equal);
        }
    }

    #[test]
    fn complement_of_depolarizing_is_isometric_to_prop_one_map() {
        for n in 1..=3 {
            let a = complementary_from_kraus(&depolarizing(n));
            let b = depolarizing_complement(n);
            assert!(image_gram(&a).frobenius_distance(&image_gram(&b)) < 1e-12);
        }
    }

    #[test]
    fn random_complement_is_trace_preserving() {
        let c = random_channel(3, 4, 17);
        let psi = complementary_from_kraus(&c);
        assert_eq!(psi.dim_out(), 4);
        let y = psi.apply(&ComplexMatrix::identity(3)).unwrap();
        assert!((y.trace() - C64::new(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn stinespring_marginals() {
        let chans = [
            depolarizing(2),
            block_channel(&spec(&[(2, 2), (1, 1)])),
            random_channel(2, 3, 5),
        ];
        for c in &chans {
            let a = stinespring_isometry(c);
            assert!(
                (&a.adjoint() * &a).frobenius_distance(&ComplexMatrix::identity(c.dim_in()))
                    < 1e-12
            );
            let psi = complementary_from_kraus(c);
            assert!(complementarity_error(c, &psi, &a) < 1e-10);
        }
        // Ψ_n from the explicit isometry (1/√n) Σ E_{j,k} ⊗ e_j ⊗ e_k.
        let n = 2;
        let iso = ComplexMatrix::from_fn(n * n * n, n, |row, col| {
            let (a, jk) = (row / (n * n), row % (n * n));
            let (j, k) = (jk / n, jk % n);
            if a == j && col == k {
                C64::new(1.0 / (n as f64).sqrt(), 0.0)
            } else {
                ZERO
            }
        });
        assert!(complementarity_error(&depolarizing(n), &depolarizing_complement(n), &iso) < 1e-12);
    }

    #[test]
    fn depolarizing_complement_examples() {
        let one = depolarizing_complement(1);
        assert!(
            channels_equal(&one, &identity_channel(1), 1e-15)
                .unwrap()
                .equal
        );

        let e12 = ComplexMatrix::matrix_unit(2, 2, 0, 1);
        let y = depolarizing_complement(2).apply(&e12).unwrap();
        let expected = kron(&ComplexMatrix::identity(2), &e12).scale_real(0.5);
        assert!(y.frobenius_distance(&expected) < 1e-15);

        for n in 1..=3 {
            assert_eq!(image_dimension(&depolarizing_complement(n)), n * n);
        }
    }

    #[test]
    fn block_complement_examples() {
        let b = block_complement(&spec(&[(1, 1)]));
        assert!(
            channels_equal(&b, &identity_channel(1), 1e-15)
                .unwrap()
                .equal
        );

        let s = spec(&[(1, 2), (1, 1)]);
        let psi = block_complement(&s);
        assert_eq!((psi.dim_in(), psi.dim_out()), (3, 5));
        assert_eq!(image_dimension(&psi), 5);
        // A ⊕ [a] ↦ (Tr(𝟙_1)/2 · 𝟙_2 ⊗ A) ⊕ [a].
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = crate::linalg::random_hermitian(2, &mut rng);
        let x = crate::linalg::direct_sum(&a, &ComplexMatrix::identity(1).scale_real(0.7));
        let expected = crate::linalg::direct_sum(
            &kron(&ComplexMatrix::identity(2), &a).scale_real(0.5),
            &ComplexMatrix::identity(1).scale_real(0.7),
        );
        assert!(psi.apply(&x).unwrap().frobenius_distance(&expected) < 1e-14);

        assert_eq!(image_dimension(&block_complement(&spec(&[(2, 2)]))), 4);
    }

    #[test]
    fn block_complement_matches_kraus_complement() {
        for s in [
            spec(&[(1, 2), (1, 1)]),
            spec(&[(2, 2), (3, 1)]),
            spec(&[(1, 3), (2, 1)]),
        ] {
            let phi = block_channel(&s);
            let a = complementary_from_kraus(&phi);
            let b = block_complement(&s);
            assert!(image_gram(&a).frobenius_distance(&image_gram(&b)) < 1e-12);
            assert!(complementarity_error(&phi, &b, &block_isometry(&s)) < 1e-12);
        }
    }

    /// Isometry `A = Σ_k A_k ⊗ e_k` built from the block channel's Kraus
    /// operators, in the same order `block_complement` lists its outputs.
    fn block_isometry(s: &BlockSpec) -> ComplexMatrix {
        stinespring_isometry(&block_channel(s))
    }

    #[test]
    fn vanishing_diagonal_examples() {
        assert!(vanishing_diagonal_check(&trace_map(3), 1e-12).pass);
        let r = vanishing_diagonal_check(&identity_channel(2), 1e-12);
        assert!(!r.pass);
        assert!((r.worst - 1.0).abs() < 1e-15);
        // Witness is E_11 − E_22, the last basis element for n = 2.
        assert_eq!(r.worst_input, Some(2));
    }

    #[test]
    fn trace_vector_rotation_on_block_complement() {
        let s = spec(&[(1, 2), (1, 1)]);
        let psi = block_complement(&s);
        assert!(!vanishing_diagonal_check(&psi, 1e-9).pass);
        let d = minimal_decomposition(&s);
        let v = decomposition_trace_vectors(&d, &block_channel(&s)).unwrap();
        assert!(trace_vector_basis_check(&psi, &v, 1e-9).unwrap().pass);
        let rotated = rotate_by_trace_vectors(&psi, &v).unwrap();
        assert!(vanishing_diagonal_check(&rotated, 1e-9).pass);
        assert!(
            trace_vector_basis_check(&rotated, &standard_basis(5), 1e-9)
                .unwrap()
                .pass
        );
        // The rotation lands on the complement of the decomposition itself.
        let direct = complementary_from_kraus(&as_channel(&d).unwrap());
        assert!(channels_equal(&rotated, &direct, 1e-10).unwrap().equal);
    }

    #[test]
    fn trace_vector_examples() {
        let psi = trace_map(2);
        assert!(
            trace_vector_basis_check(&psi, &standard_basis(1), 1e-12)
                .unwrap()
                .pass
        );

        let r = trace_vector_basis_check(&identity_channel(2), &standard_basis(2), 1e-12).unwrap();
        assert!(!r.pass);

        let d = minimal_decomposition(&spec(&[(1, 3)]));
        let psi = complementary_from_kraus(&as_channel(&d).unwrap());
        assert!(
            trace_vector_basis_check(&psi, &standard_basis(9), 1e-10)
                .unwrap()
                .pass
        );

        assert!(trace_vector_basis_check(&psi, &standard_basis(3), 1e-10).is_err());

        let skewed = vec![
            vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), ZERO],
        ];
        let r = trace_vector_basis_check(&depolarizing(2), &skewed, 1e-12).unwrap();
        assert!(!r.pass);
        assert!((r.max_overlap - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_and_trace_vector_checks_agree() {
        let s = spec(&[(2, 2), (1, 1)]);
        let candidates = [
            trace_map(2),
            identity_channel(3),
            depolarizing(2),
            block_complement(&s),
            complementary_from_kraus(&as_channel(&minimal_decomposition(&s)).unwrap()),
            random_channel(2, 2, 3),
        ];
        for psi in &candidates {
            let a = vanishing_diagonal_check(psi, 1e-9).pass;
            let b = trace_vector_basis_check(psi, &standard_basis(psi.dim_out()), 1e-9)
                .unwrap()
                .pass;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn block_algebra_examples() {
        let psi = block_complement(&spec(&[(1, 2), (1, 1)]));
        assert!(
            image_in_block_algebra_check(&psi, &spec(&[(2, 2), (1, 1)]), 1e-12)
                .unwrap()
                .pass
        );
        assert!(
            image_in_block_algebra_check(&trace_map(3), &spec(&[(1, 1)]), 1e-12)
                .unwrap()
                .pass
        );

        let id = identity_channel(2);
        for s in [spec(&[(2, 1)]), spec(&[(1, 1), (1, 1)])] {
            let r = image_in_block_algebra_check(&id, &s, 1e-12).unwrap();
            assert!(!r.pass && r.max_residual > 0.5);
        }
        assert!(matches!(
            image_in_block_algebra_check(&id, &spec(&[(1, 2)]), 1e-12),
            Err(Error::MultiplicityTooSmall { m: 1, n: 2 })
        ));
        assert!(matches!(
            image_in_block_algebra_check(&id, &spec(&[(3, 1)]), 1e-12),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
