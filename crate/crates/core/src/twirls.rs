//! Named twirling channels: finite-group averages over the symmetric and
//! Weyl groups, the permutation twirl in closed form, and the Werner twirl.

use std::collections::HashMap;
use std::fmt;

use crate::channel::{Channel, MixedUnitaryDecomposition};
use crate::error::{dims, Error, Result};
use crate::linalg::{
    frob_inner, hermitian_eig, kron, root_of_unity, swap_operator, ComplexMatrix, C64, DEFAULT_TOL,
};
use crate::mud::{conjugated_decomposition, minimal_decomposition, BlockSpec};

/// Entrywise tolerance when matching a product against the listed elements.
pub const CLOSURE_TOL: f64 = 1e-8;

/// A permutation of `{1, …, n}`, stored zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    /// From a one-based image list: `mapping[k-1] = π(k)`.
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        if mapping.iter().any(|&x| x == 0 || x > n) {
            return Err(Error::InvalidPermutation(format!(
                "entries must lie in 1..={n}: {mapping:?}"
            )));
        }
        Self::from_zero_based(mapping.into_iter().map(|x| x - 1).collect())
    }

    pub fn from_zero_based(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &x in &map {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!(
                    "not a bijection: {map:?}"
                )));
            }
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// One-based image of one-based `k`.
    pub fn apply(&self, k: usize) -> usize {
        self.map[k - 1] + 1
    }

    /// One-based image list.
    pub fn mapping(&self) -> Vec<usize> {
        self.map.iter().map(|x| x + 1).collect()
    }

    /// `(self ∘ other)(k) = self(other(k))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::InvalidPermutation(format!(
                "cannot compose permutations of {} and {} points",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation {
            map: other.map.iter().map(|&k| self.map[k]).collect(),
        })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.mapping())
    }
}

/// `V_π = Σ_k E_{π(k),k}`.
pub fn permutation_matrix(p: &Permutation) -> ComplexMatrix {
    let n = p.len();
    let mut v = ComplexMatrix::zeros(n, n);
    for (k, &pk) in p.map.iter().enumerate() {
        v[(pk, k)] = C64::new(1.0, 0.0);
    }
    v
}

/// A finite group of unitaries, closed under products and adjoints.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroupRep {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

type Key = Vec<(i64, i64)>;

fn key(m: &ComplexMatrix) -> Key {
    // 1e-6 buckets; near-boundary products fall back to a linear scan.
    m.as_slice()
        .iter()
        .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
        .collect()
}

struct Lookup<'a> {
    elements: &'a [ComplexMatrix],
    index: HashMap<Key, usize>,
}

impl<'a> Lookup<'a> {
    fn new(elements: &'a [ComplexMatrix]) -> Self {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, m)| (key(m), i))
            .collect();
        Self { elements, index }
    }

    fn contains(&self, m: &ComplexMatrix) -> bool {
        if let Some(&i) = self.index.get(&key(m)) {
            if self.elements[i].max_abs_diff(m) <= CLOSURE_TOL {
                return true;
            }
        }
        self.elements
            .iter()
            .any(|e| e.max_abs_diff(m) <= CLOSURE_TOL)
    }
}

impl FiniteGroupRep {
    /// Validates shapes, unitarity (within 1e−10), presence of the identity,
    /// and closure under products and adjoints.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::NotClosed("group has no elements".into()))?;
        let dim = first.rows();
        for e in &elements {
            if e.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    expected: dims(dim, dim),
                    found: dims(e.rows(), e.cols()),
                });
            }
            let deviation = e.unitarity_error();
            if deviation > DEFAULT_TOL {
                return Err(Error::NotUnitary { deviation });
            }
        }
        let lookup = Lookup::new(&elements);
        if !lookup.contains(&ComplexMatrix::identity(dim)) {
            return Err(Error::NotClosed("identity is missing".into()));
        }
        for (i, a) in elements.iter().enumerate() {
            if !lookup.contains(&a.adjoint()) {
                return Err(Error::NotClosed(format!(
                    "inverse of element {i} is missing"
                )));
            }
            for (j, b) in elements.iter().enumerate() {
                if !lookup.contains(&(a * b)) {
                    return Err(Error::NotClosed(format!(
                        "product of elements {i} and {j} is missing"
                    )));
                }
            }
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Closure of a set of unitary generators under multiplication, always
/// including the identity.
fn generate(dim: usize, generators: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut elements = vec![ComplexMatrix::identity(dim)];
    let mut index: HashMap<Key, usize> = HashMap::new();
    index.insert(key(&elements[0]), 0);
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for g in generators {
            let p = &current * g;
            let k = key(&p);
            let known = index.contains_key(&k)
                || elements.iter().any(|e| e.max_abs_diff(&p) <= CLOSURE_TOL);
            if !known {
                index.insert(k, elements.len());
                elements.push(p);
            }
        }
    }
    elements
}

const MAX_SYMMETRIC_DEGREE: usize = 6;

/// All `n!` permutation matrices of `Sym(n)` in lexicographic order of
/// their image lists.
pub fn symmetric_group_rep(n: usize) -> Result<FiniteGroupRep> {
    if n == 0 {
        return Err(Error::OutOfRange("symmetric group needs n ≥ 1".into()));
    }
    if n > MAX_SYMMETRIC_DEGREE {
        return Err(Error::GroupTooLarge(format!(
            "Sym({n}) exceeds the limit n ≤ {MAX_SYMMETRIC_DEGREE}"
        )));
    }
    let mut perms = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    permute(&mut current, 0, &mut perms);
    perms.sort();
    let elements = perms
        .into_iter()
        .map(|p| permutation_matrix(&Permutation { map: p }))
        .collect();
    Ok(FiniteGroupRep { dim: n, elements })
}

fn permute(v: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == v.len() {
        out.push(v.clone());
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permute(v, start + 1, out);
        v.swap(start, i);
    }
}

/// Shift `S = Σ_k E_{k+1 mod n, k}`.
pub fn shift_operator(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == (c + 1) % n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Clock `C = diag(ω^k)`, `ω = exp(2πi/n)`.
pub fn clock_operator(n: usize) -> ComplexMatrix {
    let diag: Vec<C64> = (0..n as i64).map(|k| root_of_unity(k, n as i64)).collect();
    ComplexMatrix::from_diag(&diag)
}

/// The group generated by the shift, the clock and the scalar
/// `τ = −exp(iπ/n)`. It has `n³` elements for odd `n` and `2n³` for even
/// `n` (16 for the qubit Pauli group).
pub fn weyl_group_rep(n: usize) -> Result<FiniteGroupRep> {
    if !(2..=6).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "Weyl group needs 2 ≤ n ≤ 6, got {n}"
        )));
    }
    let tau = -root_of_unity(1, 2 * n as i64);
    let generators = [
        shift_operator(n),
        clock_operator(n),
        ComplexMatrix::identity(n).scale(tau),
    ];
    Ok(FiniteGroupRep {
        dim: n,
        elements: generate(n, &generators),
    })
}

/// `X ↦ (1/|G|) Σ_g ρ(g) X ρ(g)†`, Kraus family `{ρ(g)/√|G|}`.
pub fn twirl_finite_group(rep: &FiniteGroupRep) -> Channel {
    let s = 1.0 / (rep.order() as f64).sqrt();
    Channel::new(rep.elements.iter().map(|g| g.scale_real(s)).collect())
        .expect("unitary group average is trace preserving")
}

/// The all-ones matrix `J_n`.
fn all_ones(n: usize) -> ComplexMatrix {
    ComplexMatrix::ones(n)
}

/// `X ↦ ⟨J/n, X⟩ J/n + ⟨𝟙 − J/n, X⟩ (𝟙 − J/n)/(n−1)`.
pub fn permutation_twirl_closed_form(n: usize) -> Result<Channel> {
    if n < 2 {
        return Err(Error::OutOfRange(format!(
            "permutation twirl needs n ≥ 2, got {n}"
        )));
    }
    let p0 = all_ones(n).scale_real(1.0 / n as f64);
    let p1 = &ComplexMatrix::identity(n) - &p0;
    Channel::from_linear_map(n, n, |x| {
        let a = frob_inner(&p0, x).expect("shape");
        let b = frob_inner(&p1, x).expect("shape") / (n as f64 - 1.0);
        &p0.scale(a) + &p1.scale(b)
    })
}

/// `U = (1/√n) Σ_{a,b} exp(2πi ab/n) E_{a,b}` with one-based `a, b`.
pub fn fourier_matrix(n: usize) -> ComplexMatrix {
    let s = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |a, b| {
        root_of_unity(((a + 1) * (b + 1)) as i64, n as i64) * s
    })
}

/// The `(n−1)² + 1` unitaries `U† U_k U` for the permutation twirl, with
/// `U` the Fourier matrix and `U_k` the construction for `[(1,n−1),(1,1)]`.
pub fn permutation_twirl_decomposition(n: usize) -> Result<MixedUnitaryDecomposition> {
    if !(2..=6).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "permutation twirl decomposition needs 2 ≤ n ≤ 6, got {n}"
        )));
    }
    let spec = BlockSpec::new(vec![(1, n - 1), (1, 1)])?;
    conjugated_decomposition(&minimal_decomposition(&spec), &fourier_matrix(n))
}

/// Projectors `((𝟙 + SWAP)/2, (𝟙 − SWAP)/2)` onto the symmetric and
/// antisymmetric subspaces of `C^n ⊗ C^n`.
pub fn werner_projectors(n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n < 2 {
        return Err(Error::OutOfRange(format!(
            "Werner projectors need n ≥ 2, got {n}"
        )));
    }
    let id = ComplexMatrix::identity(n * n);
    let swap = swap_operator(n);
    Ok(((&id + &swap).scale_real(0.5), (&id - &swap).scale_real(0.5)))
}

/// `binom(n+1, 2)` and `binom(n, 2)`.
fn werner_ranks(n: usize) -> (usize, usize) {
    (n * (n + 1) / 2, n * (n - 1) / 2)
}

/// `X ↦ ⟨Π0, X⟩ Π0 / binom(n+1,2) + ⟨Π1, X⟩ Π1 / binom(n,2)` on `M_{n²}`.
pub fn werner_channel(n: usize) -> Result<Channel> {
    let (p0, p1) = werner_projectors(n)?;
    let (r0, r1) = werner_ranks(n);
    let d = n * n;
    Channel::from_linear_map(d, d, |x| {
        let a = frob_inner(&p0, x).expect("shape") / r0 as f64;
        let b = frob_inner(&p1, x).expect("shape") / r1 as f64;
        &p0.scale(a) + &p1.scale(b)
    })
}

/// Unitary `U` with `U Π0 U† = 𝟙 ⊕ 0`, symmetric subspace first.
pub fn werner_diagonalizer(n: usize) -> Result<ComplexMatrix> {
    let (p0, _) = werner_projectors(n)?;
    Ok(hermitian_eig(&p0, DEFAULT_TOL)?.vectors.adjoint())
}

/// The `(n⁴ + n²)/2` unitaries decomposing the Werner twirl.
pub fn werner_decomposition(n: usize) -> Result<MixedUnitaryDecomposition> {
    if !(2..=3).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "Werner decomposition needs 2 ≤ n ≤ 3, got {n}"
        )));
    }
    let (r0, r1) = werner_ranks(n);
    let spec = BlockSpec::new(vec![(1, r0), (1, r1)])?;
    conjugated_decomposition(&minimal_decomposition(&spec), &werner_diagonalizer(n)?)
}

/// `V ⊗ V`.
pub fn local_square(v: &ComplexMatrix) -> ComplexMatrix {
    kron(v, v)
}
