//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twirl_core::channel::{as_channel, block_channel, channels_equal, depolarizing, Channel};
use twirl_core::complementary::{
    complementary_from_kraus, decomposition_trace_vectors, rotate_by_trace_vectors, standard_basis,
    trace_vector_basis_check, vanishing_diagonal_check,
};
use twirl_core::isotypic::block_structure;
use twirl_core::linalg::{
    frob_inner, kron, numerical_rank, random_unitary, swap_operator, ComplexMatrix, C64,
};
use twirl_core::mud::{
    cross_block_residual, minimal_decomposition, verify_decomposition, BlockSpec,
};
use twirl_core::twirls::{
    permutation_twirl_closed_form, permutation_twirl_decomposition, symmetric_group_rep,
    twirl_finite_group, werner_channel, werner_decomposition, werner_projectors, weyl_group_rep,
};
use twirl_core::{twirl_decomposition, MixedUnitaryDecomposition, DEFAULT_TOL};

struct Outcome {
    pass: bool,
    detail: String,
}

/// Decompositions produced along the way, with their targets.
type Produced = Vec<(String, MixedUnitaryDecomposition, Channel)>;

fn spec(pairs: &[(usize, usize)]) -> BlockSpec {
    BlockSpec::new(pairs.to_vec()).unwrap()
}

/// The five unitaries of the worked `Ω_2 ⊕ Ω_1` example, typed in from
/// their closed forms.
fn example_unitaries() -> Vec<ComplexMatrix> {
    let r5 = 5f64.sqrt();
    let p = (5.0 + 2.0 * r5).sqrt() / 4.0;
    let m = (5.0 - 2.0 * r5).sqrt() / 4.0;
    let q = r5 / 4.0;
    let c = C64::new;
    let embed = |a: C64, b: C64, cc: C64, d: C64| {
        ComplexMatrix::from_rows(vec![
            vec![a, b, c(0.0, 0.0)],
            vec![cc, d, c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap()
    };
    vec![
        embed(c(-0.25, p), c(-q, -m), c(q, -m), c(-0.25, -p)),
        embed(c(-0.25, -m), c(q, -p), c(-q, -p), c(-0.25, m)),
        embed(c(-0.25, m), c(q, p), c(-q, p), c(-0.25, -m)),
        embed(c(-0.25, -p), c(-q, m), c(q, m), c(-0.25, p)),
        ComplexMatrix::identity(3),
    ]
}

fn criterion_1(produced: &mut Produced) -> Outcome {
    let s = spec(&[(1, 2), (1, 1)]);
    let d = minimal_decomposition(&s);
    let expected = example_unitaries();
    let count_ok = d.len() == 5;
    let entry_err = d
        .unitaries()
        .iter()
        .zip(&expected)
        .map(|(u, e)| u.max_abs_diff(e))
        .fold(0.0, f64::max);
    let target = block_channel(&s);
    let report = verify_decomposition(&d, &target, 1e-10).unwrap();
    produced.push(("example [(1,2),(1,1)]".into(), d, target));
    Outcome {
        pass: count_ok && entry_err <= 1e-9 && report.pass,
        detail: format!(
            "5 unitaries: {count_ok}, max entry error {entry_err:.2e}, channel error {:.2e}",
            report.max_channel_error
        ),
    }
}

fn criterion_2() -> Outcome {
    let d = minimal_decomposition(&spec(&[(1, 2), (1, 1)]));
    let mut worst: f64 = 0.0;
    for (i, a) in d.unitaries().iter().enumerate() {
        for (j, b) in d.unitaries().iter().enumerate() {
            let target = if i == j { 3.0 } else { 0.5 };
            worst = worst.max((frob_inner(a, b).unwrap() - C64::new(target, 0.0)).norm());
        }
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("25 inner products, max deviation {worst:.2e}"),
    }
}

fn sweep_specs() -> Vec<BlockSpec> {
    let mut pairs: Vec<Vec<(usize, usize)>> = (1..=4).map(|n| vec![(1, n)]).collect();
    for m in 1..=8 {
        for n in 1..=8 {
            if m * n <= 8 {
                pairs.push(vec![(m, n)]);
            }
        }
    }
    pairs.extend([
        vec![(1, 2), (1, 1)],
        vec![(2, 2), (1, 1)],
        vec![(1, 3), (1, 2)],
        vec![(2, 1), (1, 2)],
    ]);
    pairs.sort();
    pairs.dedup();
    pairs
        .into_iter()
        .map(|p| BlockSpec::new(p).unwrap())
        .collect()
}

fn criterion_3(produced: &mut Produced) -> Outcome {
    let specs = sweep_specs();
    let mut failures = Vec::new();
    let (mut worst_channel, mut worst_unitary, mut worst_cross): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for s in &specs {
        let d = minimal_decomposition(s);
        let target = block_channel(s);
        let report = verify_decomposition(&d, &target, 1e-10).unwrap();
        let mut cross: f64 = 0.0;
        for l in 1..=s.num_blocks() {
            for lp in 1..=s.num_blocks() {
                if l != lp {
                    cross = cross.max(cross_block_residual(s, l, lp).unwrap());
                }
            }
        }
        worst_channel = worst_channel.max(report.max_channel_error);
        worst_unitary = worst_unitary.max(report.max_unitarity_error);
        worst_cross = worst_cross.max(cross);
        if d.len() != s.rank() || !report.pass || cross > 1e-10 {
            failures.push(s.to_string());
        }
        produced.push((format!("sweep {s}"), d, target));
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{} specs, channel {worst_channel:.2e}, unitarity {worst_unitary:.2e}, cross-block {worst_cross:.2e}{}",
            specs.len(),
            if failures.is_empty() { String::new() } else { format!(", failing: {failures:?}") }
        ),
    }
}

fn criterion_4(produced: &mut Produced) -> Outcome {
    let mut ok = true;
    let mut ranks = Vec::new();
    let (mut worst_verify, mut worst_agree): (f64, f64) = (0.0, 0.0);
    for n in 2..=5 {
        let closed = permutation_twirl_closed_form(n).unwrap();
        let avg = twirl_finite_group(&symmetric_group_rep(n).unwrap());
        let rank = closed.choi_rank(DEFAULT_TOL);
        ranks.push(rank);
        let d = permutation_twirl_decomposition(n).unwrap();
        let report = verify_decomposition(&d, &avg, 1e-10).unwrap();
        let agree = closed.choi().frobenius_distance(&avg.choi());
        worst_verify = worst_verify.max(report.max_channel_error);
        worst_agree = worst_agree.max(agree);
        ok &= rank == (n - 1) * (n - 1) + 1 && report.pass && agree <= 1e-10;
        produced.push((format!("permutation twirl n={n}"), d, avg));
    }
    Outcome {
        pass: ok && ranks == [2, 5, 10, 17],
        detail: format!(
            "ranks {ranks:?}, decomposition error {worst_verify:.2e}, closed form vs average {worst_agree:.2e}"
        ),
    }
}

/// `max_X ‖W Ξ(X) W† − Ξ(W X W†)‖_F` over matrix units.
fn covariance_error(xi: &Channel, w: &ComplexMatrix) -> f64 {
    let d = xi.dim_in();
    let mut worst: f64 = 0.0;
    for j in 0..d {
        for k in 0..d {
            let x = ComplexMatrix::matrix_unit(d, d, j, k);
            let lhs = &(w * &xi.apply(&x).unwrap()) * &w.adjoint();
            let rhs = xi.apply(&(&(w * &x) * &w.adjoint())).unwrap();
            worst = worst.max(lhs.frobenius_distance(&rhs));
        }
    }
    worst
}

fn criterion_5(produced: &mut Produced) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, rank, r0, r1) in [(2, 10, 3, 1), (3, 45, 6, 3)] {
        let xi = werner_channel(n).unwrap();
        let got_rank = xi.choi_rank(DEFAULT_TOL);
        let (p0, p1) = werner_projectors(n).unwrap();
        let ranks = (
            numerical_rank(&p0, DEFAULT_TOL),
            numerical_rank(&p1, DEFAULT_TOL),
        );
        let d = werner_decomposition(n).unwrap();
        let report = verify_decomposition(&d, &xi, 1e-9).unwrap();
        let mut invariance = covariance_error(&xi, &swap_operator(n));
        let mut rng = ChaCha8Rng::seed_from_u64(500 + n as u64);
        for _ in 0..10 {
            let v = random_unitary(n, &mut rng);
            invariance = invariance.max(covariance_error(&xi, &kron(&v, &v)));
        }
        ok &= got_rank == rank
            && ranks == (r0, r1)
            && d.len() == rank
            && report.pass
            && invariance <= 1e-9;
        parts.push(format!(
            "n={n}: rank {got_rank}, projector ranks {ranks:?}, decomposition error {:.2e}, invariance {invariance:.2e}",
            report.max_channel_error
        ));
        produced.push((format!("Werner n={n}"), d, xi));
    }
    Outcome {
        pass: ok,
        detail: parts.join("; "),
    }
}

fn random_spec(rng: &mut ChaCha8Rng) -> BlockSpec {
    loop {
        let blocks = rng.random_range(1..=3);
        let pairs: Vec<(usize, usize)> = (0..blocks)
            .map(|_| (rng.random_range(1..=3), rng.random_range(1..=3)))
            .collect();
        if pairs.iter().map(|(m, n)| m * n).sum::<usize>() <= 8 {
            return BlockSpec::new(pairs).unwrap();
        }
    }
}

fn criterion_6(produced: &mut Produced) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    let mut worst_residual: f64 = 0.0;
    for trial in 0..20u64 {
        let s = random_spec(&mut rng);
        let w = random_unitary(s.total_dim(), &mut rng);
        let phi = block_channel(&s).conjugate(&w).unwrap();
        match block_structure(&phi, trial, 1e-8, 8) {
            Ok(found) => {
                worst_residual = worst_residual.max(found.residual);
                if found.spec != s.canonical() || found.residual > 1e-8 {
                    failures.push(format!("trial {trial}: {s} → {}", found.spec));
                }
            }
            Err(e) => failures.push(format!("trial {trial}: {s}: {e}")),
        }
        match twirl_decomposition(&phi, trial, 1e-9) {
            Ok(d) => produced.push((format!("scrambled {s} (trial {trial})"), d, phi)),
            Err(e) => failures.push(format!("trial {trial} decomposition: {e}")),
        }
    }

    let weyl = twirl_finite_group(&weyl_group_rep(2).unwrap());
    let weyl_ok = match block_structure(&weyl, 0, 1e-8, 8) {
        Ok(found) => found.spec == spec(&[(1, 2)]),
        Err(_) => false,
    };
    let weyl_err = weyl.choi().frobenius_distance(&depolarizing(2).choi());
    let weyl_equal = channels_equal(&weyl, &depolarizing(2), 1e-10)
        .unwrap()
        .equal;
    if let Ok(d) = twirl_decomposition(&weyl, 0, 1e-9) {
        produced.push(("qubit Weyl twirl".into(), d, weyl));
    } else {
        failures.push("qubit Weyl twirl decomposition".into());
    }
    Outcome {
        pass: failures.is_empty() && weyl_ok && weyl_equal,
        detail: format!(
            "20 trials, max residual {worst_residual:.2e}; Weyl spec [(1,2)]: {weyl_ok}, Weyl vs depolarizing {weyl_err:.2e}{}",
            if failures.is_empty() { String::new() } else { format!("; failures: {failures:?}") }
        ),
    }
}

/// Rotates the complement of the minimal Kraus family of `target` by the
/// trace vectors read off from `d`, then runs both criteria.
fn rotated_checks(d: &MixedUnitaryDecomposition, target: &Channel) -> Result<(f64, f64), String> {
    let reference = target.minimal_kraus().map_err(|e| e.to_string())?;
    let vectors = decomposition_trace_vectors(d, &reference).map_err(|e| e.to_string())?;
    let psi = complementary_from_kraus(&reference);
    let before = trace_vector_basis_check(&psi, &vectors, 1e-9).map_err(|e| e.to_string())?;
    if !before.pass {
        return Err(format!(
            "trace vectors fail before rotation ({:.2e})",
            before.max_deviation()
        ));
    }
    let xi = rotate_by_trace_vectors(&psi, &vectors).map_err(|e| e.to_string())?;
    let diag = vanishing_diagonal_check(&xi, 1e-9);
    let basis = trace_vector_basis_check(&xi, &standard_basis(xi.dim_out()), 1e-9)
        .map_err(|e| e.to_string())?;
    if !diag.pass || !basis.pass {
        return Err(format!(
            "diagonal {:.2e}, trace-vector deviation {:.2e}, overlap {:.2e}",
            diag.worst,
            basis.max_deviation(),
            basis.max_overlap
        ));
    }
    Ok((diag.worst, basis.max_deviation()))
}

fn criterion_7(produced: &Produced) -> Outcome {
    let mut failures = Vec::new();
    let (mut worst_diag, mut worst_dev): (f64, f64) = (0.0, 0.0);
    for (name, d, target) in produced {
        match rotated_checks(d, target) {
            Ok((a, b)) => {
                worst_diag = worst_diag.max(a);
                worst_dev = worst_dev.max(b);
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{} decompositions, max diagonal {worst_diag:.2e}, max trace-vector deviation {worst_dev:.2e}{}",
            produced.len(),
            if failures.is_empty() { String::new() } else { format!("; failures: {failures:?}") }
        ),
    }
}

fn criterion_8(produced: &Produced) -> Outcome {
    let mismatches: Vec<String> = produced
        .iter()
        .filter_map(|(name, d, target)| {
            let rank = target.choi_rank(DEFAULT_TOL);
            let own = as_channel(d).map(|c| c.choi_rank(DEFAULT_TOL)).unwrap_or(0);
            (d.len() != rank || own != rank)
                .then(|| format!("{name}: {} unitaries, choi rank {rank}", d.len()))
        })
        .collect();
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!(
            "{} decompositions{}",
            produced.len(),
            if mismatches.is_empty() {
                String::new()
            } else {
                format!("; mismatches: {mismatches:?}")
            }
        ),
    }
}

fn main() -> ExitCode {
    let mut produced = Produced::new();
    let outcomes = [
        ("1 worked example reproduction", criterion_1(&mut produced)),
        ("2 equiangularity", criterion_2()),
        ("3 construction sweep", criterion_3(&mut produced)),
        ("4 permutation twirl", criterion_4(&mut produced)),
        ("5 Werner twirl", criterion_5(&mut produced)),
        ("6 isotypic recovery", criterion_6(&mut produced)),
    ];
    let c7 = criterion_7(&produced);
    let c8 = criterion_8(&produced);
    let mut all = true;
    for (name, o) in outcomes.iter().map(|(n, o)| (*n, o)).chain([
        ("7 diagonal and trace-vector criteria", &c7),
        ("8 minimality witness", &c8),
    ]) {
        all &= o.pass;
        println!(
            "criterion {name}: {} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
