mod common;

use common::*;
use proptest::prelude::*;
use qwalk::alt_synthesis::{a_max, synthesize_alt, AltTrace};
use qwalk::linalg::{basis_ket, identity, outer, CKet, CMatrix};
use qwalk::povm::{born_probabilities, QuantumState, Rank1Item, Rank1Povm};
use qwalk::random::{random_ket, random_ket_in_support, random_non_simple_povm, random_psd, random_rank1_povm};
use qwalk::synthesis::{not_coin, synthesize};
use qwalk::walk::{induced_povm, run, run_observed};
use qwalk::WalkProgram;

fn plus_minus() -> (CKet, CKet) {
    let s = 1.0 / 2f64.sqrt();
    (CKet::from_vec(vec![c(s), c(s)]), CKet::from_vec(vec![c(s), c(-s)]))
}

/// Coin amplitudes at the origin after each iteration's second layer,
/// one column per basis input.
fn origin_maps(prog: &WalkProgram, iterations: usize) -> Vec<CMatrix> {
    let d = prog.dim();
    let mut out = vec![CMatrix::zeros(d, d); iterations];
    for k in 0..d {
        run_observed(prog, &basis_ket(d, k), |step, st| {
            if step % 2 == 1 && step / 2 < iterations {
                out[step / 2].set_column(k, &st.coin_vector(0));
            }
        })
        .unwrap();
    }
    out
}

/// Every structural claim about the alternative compiler on one input.
fn check_alt(r: &Rank1Povm) -> Result<(), TestCaseError> {
    let (prog, trace) = synthesize_alt(r, 1e-10).unwrap();
    let omega = induced_povm(&prog).unwrap();
    prop_assert!(item_deviation(&omega, &prog, r) < 1e-9, "{}", item_deviation(&omega, &prog, r));
    prop_assert!(conservation(&prog).ok(true), "{:?}", conservation(&prog));
    check_trace(r, &prog, &trace)
}

fn check_trace(r: &Rank1Povm, prog: &WalkProgram, trace: &AltTrace) -> Result<(), TestCaseError> {
    let d = r.dim();
    let maps = origin_maps(prog, trace.iterations.len());
    let mut gamma = identity(d);
    for (i, (it, item)) in trace.iterations.iter().zip(r.items()).enumerate() {
        gamma -= item.element();
        prop_assert!(max_diff(&gamma, &it.gamma) < 1e-12);
        prop_assert!(it.j <= d - 1);
        prop_assert_eq!(psd_rank(&gamma, 1e-9), d - it.j, "iteration {}", i);
        let oracle = bisect_a_max(&(&gamma + item.element()), &item.ket);
        prop_assert!((it.a_tilde - oracle).abs() < 1e-8);
        // the walk's own origin map, after the corrective coins, is L_end
        let mut corr = identity(d);
        if it.not_applied {
            corr = not_coin(d) * corr;
        }
        if let Some(c3) = &it.coin3 {
            corr = c3 * corr;
        }
        prop_assert!(max_diff(&(&corr * &maps[i]), &it.l_end) < 1e-9);
        for l in 1..=it.j {
            let row = it.l_end.row(d - l);
            prop_assert!(row.iter().all(|z| z.norm() < 1e-9), "iteration {} row {}", i, d - l);
        }
    }
    Ok(())
}

#[test]
fn a_max_on_tetrahedron_remainder() {
    let t = tetrahedron();
    let a = identity(3) - &t.elements()[0];
    let psi = &tetrahedron_kets()[1];
    let v = a_max(&a, psi, 1e-10).unwrap();
    assert!((v - bisect_a_max(&a, psi)).abs() < 1e-8);
    // ψ₂ exactly fills what ψ₁ leaves over on that direction
    assert!((v - 0.75).abs() < 1e-12);
}

#[test]
fn basis_measurement() {
    let items = vec![Rank1Item::new(1.0, basis_ket(2, 0)), Rank1Item::new(1.0, basis_ket(2, 1))];
    let r = Rank1Povm::from_items(2, items, 1e-10).unwrap();
    let (prog, trace) = synthesize_alt(&r, 1e-10).unwrap();
    let it = &trace.iterations[0];
    assert!((it.a_tilde - 1.0).abs() < 1e-15);
    assert_eq!(it.theta, 0.0);
    assert_eq!(it.j, 1);
    let omega = induced_povm(&prog).unwrap();
    assert!(item_deviation(&omega, &prog, &r) < 1e-12);
}

#[test]
fn tetrahedron_targets() {
    let r = tetrahedron_rank1();
    let (prog, trace) = synthesize_alt(&r, 1e-10).unwrap();
    let omega = induced_povm(&prog).unwrap();
    assert!(item_deviation(&omega, &prog, &r) < 1e-9);
    check_trace(&r, &prog, &trace).unwrap();
}

fn check_born(r: &Rank1Povm, prog: &WalkProgram) {
    let mut g = rng(5);
    for _ in 0..10 {
        let phi = random_ket(2, &mut g);
        let expect = born_probabilities(&r.to_povm(), &QuantumState::Pure(phi.clone()), 1e-10).unwrap();
        let (_, dist) = run(prog, &phi).unwrap();
        for (&x, &label) in prog.outcome_positions() {
            assert!((dist.get(&x).copied().unwrap_or(0.0) - expect[label]).abs() < 1e-10);
        }
    }
}

#[test]
fn split_plus_listed_first_exhausts_late() {
    // In this order Γ₁ = 𝟙 − ½|+⟩⟨+| still has full rank; j only reaches
    // d − 1 = 1 at the end of iteration 2.
    let (plus, minus) = plus_minus();
    let items = vec![Rank1Item::new(0.5, plus.clone()), Rank1Item::new(0.5, plus), Rank1Item::new(1.0, minus)];
    let r = Rank1Povm::from_items(2, items, 1e-10).unwrap();
    let (prog, trace) = synthesize_alt(&r, 1e-10).unwrap();
    assert_eq!(psd_rank(&trace.iterations[0].gamma, 1e-9), 2);
    assert_eq!(trace.iterations.iter().map(|it| it.j).collect::<Vec<_>>(), vec![0, 1]);
    check_born(&r, &prog);
    check_trace(&r, &prog, &trace).unwrap();
}

#[test]
fn split_plus_listed_last_reaches_case_b() {
    let (plus, minus) = plus_minus();
    let items = vec![Rank1Item::new(1.0, minus), Rank1Item::new(0.5, plus.clone()), Rank1Item::new(0.5, plus)];
    let r = Rank1Povm::from_items(2, items, 1e-10).unwrap();
    let (prog, trace) = synthesize_alt(&r, 1e-10).unwrap();
    let (first, second) = (&trace.iterations[0], &trace.iterations[1]);
    assert_eq!(psd_rank(&first.gamma, 1e-9), 1);
    assert_eq!(first.j, 1);
    // Case B: Γ₁ ∝ E₂, the whole remaining weight can be peeled
    assert!((second.a_tilde - 1.0).abs() < 1e-12);
    assert!(max_diff(&second.coin1, &identity(2)) < 1e-12);
    assert!(second.not_applied);
    check_born(&r, &prog);
    check_trace(&r, &prog, &trace).unwrap();
}

#[test]
fn outside_support_is_infeasible() {
    let a = outer(&basis_ket(3, 0), &basis_ket(3, 0));
    assert!(matches!(a_max(&a, &basis_ket(3, 2), 1e-10), Err(qwalk::Error::Infeasible(_))));
}

fn sizes() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=5).prop_flat_map(|d| (Just(d), d.max(2)..=12, any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_simple_povms((d, n, seed) in sizes()) {
        let r = random_rank1_povm(d, n, &mut rng(seed));
        check_alt(&r)?;
    }

    #[test]
    fn random_non_simple_povms(d in 2usize..=5, seed in any::<u64>()) {
        let r = random_non_simple_povm(d, &mut rng(seed));
        check_alt(&r)?;
    }

    #[test]
    fn main_and_alt_agree((d, n, seed) in sizes()) {
        let r = random_rank1_povm(d, n, &mut rng(seed));
        let (pm, _) = synthesize(&r, 1e-10).unwrap();
        let (pa, _) = synthesize_alt(&r, 1e-10).unwrap();
        let om = induced_povm(&pm).unwrap();
        let oa = induced_povm(&pa).unwrap();
        for (x, label) in pm.outcome_positions() {
            let xa = pa.outcome_positions().iter().find(|(_, l)| *l == label).map(|(x, _)| *x).unwrap();
            prop_assert!(max_diff(&om.element(*x), &oa.element(xa)) < 1e-9);
        }
    }

    #[test]
    fn a_max_closed_form_matches_bisection(d in 1usize..=6, rank in 1usize..=6, seed in any::<u64>()) {
        let rank = rank.min(d);
        let mut g = rng(seed);
        let a = random_psd(d, rank, &mut g);
        let psi = random_ket_in_support(&a, &mut g);
        let v = a_max(&a, &psi, 1e-10).unwrap();
        let oracle = bisect_a_max(&a, &psi);
        prop_assert!((v - oracle).abs() < 1e-8 * v.max(1.0), "{} vs {}", v, oracle);
        let p = outer(&psi, &psi);
        let floor = 1e-9 * eigenvalues(&a)[d - 1];
        prop_assert_eq!(count_above(&(&a - &p * c(v)), floor), rank - 1);
        prop_assert_eq!(count_above(&(&a - &p * c(0.5 * v)), floor), rank);
    }
}
