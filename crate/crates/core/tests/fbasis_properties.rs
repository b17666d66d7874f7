mod common;

use bethe_circuit::fbasis::{
    build_fm, dual_rtt_residual, exchange_residual, factorization_residual, fbasis_operators_at,
    dressed_dual_at, twist_consistency_residual,
};
use bethe_circuit::operator::{monodromy_on, permutation_r, permutation_r_from_word, DenseOperator};
use bethe_circuit::{ChainSpec, Model, QubitPermutation, C64};
use common::{c, random_c, random_spec, rng};
use proptest::prelude::*;

fn rapidities(seed: u64, m: usize) -> Vec<C64> {
    let mut rng = rng(seed);
    (0..m).map(|_| random_c(&mut rng, 0.6, (0.05, 0.45))).collect()
}

/// `R^σ T_1 .. T_M - T_{σ_1} .. T_{σ_M} R^σ` with the ancillae on wires
/// `0..M` and the sites after them.
fn intertwining_residual(r_sigma: &DenseOperator, sigma: &QubitPermutation, u: &[C64], spec: &ChainSpec) -> f64 {
    let m = u.len();
    let n = spec.n_sites();
    let total = m + n;
    let spins: Vec<usize> = (m..total).collect();
    let model = spec.model();
    let t: Vec<DenseOperator> = (0..m)
        .map(|a| monodromy_on(&model, u[a], a, &spins, spec.inhomogeneities(), total).unwrap())
        .collect();
    let chain = |order: &[usize]| order.iter().fold(DenseOperator::identity(total), |acc, &a| &acc * &t[a - 1]);
    let r = r_sigma.kron(&DenseOperator::identity(n));
    let identity: Vec<usize> = (1..=m).collect();
    (&r * &chain(&identity)).max_abs_diff(&(&chain(sigma.images()) * &r))
}

#[test]
fn reversal_words_intertwine_monodromies() {
    let u = rapidities(21, 3);
    let reversal = QubitPermutation::new(vec![3, 2, 1]).unwrap();
    for n in 1..=2 {
        let spec = random_spec(&mut rng(22 + n as u64), n, 0, false);
        let model = spec.model();
        let left = permutation_r_from_word(&reversal, &[1, 2, 1], &u, &model).unwrap();
        let right = permutation_r_from_word(&reversal, &[2, 1, 2], &u, &model).unwrap();
        assert!(left.max_abs_diff(&right) < 1e-12);
        assert!(intertwining_residual(&left, &reversal, &u, &spec) < 1e-10);
        assert!(intertwining_residual(&right, &reversal, &u, &spec) < 1e-10);
    }
}

#[test]
fn every_word_of_a_permutation_gives_the_same_operator() {
    let u = rapidities(23, 3);
    let model = Model::new(c(0.95, 0.05));
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..5 {
        let longer: Vec<Vec<usize>> =
            words.iter().flat_map(|w| [1, 2].map(|p| [w.clone(), vec![p]].concat())).collect();
        words.extend(longer);
        words.sort();
        words.dedup();
    }
    for sigma in QubitPermutation::all(3) {
        let reference = permutation_r(&sigma, &u, &model).unwrap();
        for word in &words {
            if let Ok(op) = permutation_r_from_word(&sigma, word, &u, &model) {
                assert!(op.max_abs_diff(&reference) < 1e-11, "{:?} via {word:?}", sigma.images());
            }
        }
    }
}

#[test]
fn f_matrix_fixes_uniform_states() {
    for m in 1..=4 {
        let f = build_fm(&rapidities(24 + m as u64, m), &Model::new(c(0.9, 0.1))).unwrap();
        let op = f.operator();
        let last = op.dim() - 1;
        for row in 0..op.dim() {
            let (e0, e1) = (if row == 0 { 1.0 } else { 0.0 }, if row == last { 1.0 } else { 0.0 });
            assert_eq!(op.entry(row, 0), c(e0, 0.0));
            assert_eq!(op.entry(row, last), c(e1, 0.0));
        }
    }
}

#[test]
fn twisted_monodromies_agree_for_all_permutations() {
    let u = rapidities(25, 3);
    for n in 1..=2 {
        let spec = random_spec(&mut rng(26), n, 0, false);
        for sigma in QubitPermutation::all(3) {
            assert!(twist_consistency_residual(&u, &sigma, &spec).unwrap() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn factorization_for_every_permutation(seed in any::<u64>(), m in 1usize..=3) {
        let u = rapidities(seed, m);
        let model = Model::new(c(0.9, 0.1));
        for sigma in QubitPermutation::all(m) {
            let res = factorization_residual(&sigma, &u, &model).unwrap();
            prop_assert!(res < 1e-10, "{:?}: {res}", sigma.images());
        }
    }

    #[test]
    fn dressed_duals_keep_the_exchange_algebra(seed in any::<u64>(), m in 1usize..=3) {
        let u = rapidities(seed, m);
        let model = Model::new(c(0.85, -0.05));
        let f = build_fm(&u, &model).unwrap();
        let (v1, v2) = (c(0.12, -0.07), c(-0.21, 0.04));
        prop_assert!(dual_rtt_residual(v1, v2, &u, &model, None).unwrap() < 1e-10);
        prop_assert!(dual_rtt_residual(v1, v2, &u, &model, Some(&f)).unwrap() < 1e-10);
    }

    #[test]
    fn exchange_symmetry_of_transpositions(seed in any::<u64>(), m in 2usize..=4) {
        let u = rapidities(seed, m);
        let model = Model::new(c(0.9, 0.1));
        for a in 1..m {
            for b in (a + 1)..=m {
                let tau = QubitPermutation::transposition(m, a, b).unwrap();
                prop_assert!(exchange_residual(c(0.05, -0.1), &u, &tau, &model).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn closed_forms_match_dressed_blocks(seed in any::<u64>(), m in 1usize..=3) {
        let u = rapidities(seed, m);
        let model = Model::new(c(0.9, 0.1));
        let v = c(-0.1, 0.02);
        let dressed = dressed_dual_at(v, &u, &model).unwrap();
        let half = dressed.dim() / 2;
        let (a, b, cc) = fbasis_operators_at(v, &u, &model).unwrap();
        let blk = |r: usize, col: usize| dressed.matrix().view((r * half, col * half), (half, half)).into_owned();
        let diff = |x: &DenseOperator, y: bethe_circuit::CMatrix| bethe_circuit::operator::max_abs_diff(x.matrix(), &y);
        prop_assert!(diff(&a, blk(0, 0)) < 1e-10);
        prop_assert!(diff(&b, blk(0, 1)) < 1e-10);
        prop_assert!(diff(&cc, blk(1, 0)) < 1e-10);
    }
}
