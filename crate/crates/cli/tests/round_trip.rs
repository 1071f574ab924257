use proptest::prelude::*;
use qwalk::random::{random_ket, random_povm, random_rank1_povm, random_unitary};
use qwalk::{synthesize, CoinLayer, WalkProgram};
use qwalk_cli::files::{from_json, to_json, PovmFile, ScheduleFile, StateFile};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_program(d: usize, layers: usize, post: bool, g: &mut StdRng) -> WalkProgram {
    let mut p = WalkProgram::new(d);
    for _ in 0..layers {
        let mut layer = if g.random_bool(0.8) { CoinLayer::new() } else { CoinLayer::stationary() };
        for x in -3i64..=3 {
            if g.random_bool(0.4) {
                layer.insert(x, random_unitary(d, g));
            }
        }
        p.push_layer(layer);
    }
    for x in 0..layers as i64 {
        if g.random_bool(0.5) {
            p.set_outcome(2 * x, g.random_range(0..10));
        }
    }
    if post {
        p.set_post_layer(CoinLayer::stationary().with(0, random_unitary(d, g)));
    }
    p
}

#[test]
fn synthesized_schedule_round_trips() {
    let mut g = StdRng::seed_from_u64(1);
    let (prog, _) = synthesize(&random_rank1_povm(3, 5, &mut g), 1e-10).unwrap();
    let text = to_json(&ScheduleFile::from_program(&prog));
    let back: ScheduleFile = from_json(&text).unwrap();
    assert_eq!(back.to_program().unwrap(), prog);
    assert_eq!(to_json(&back), text);
}

#[test]
fn non_unitary_coin_is_rejected() {
    let mut f = ScheduleFile::from_program(&random_program(2, 1, false, &mut StdRng::seed_from_u64(2)));
    f.layers[0].coins.push(qwalk_cli::files::CoinEntry {
        position: 9,
        matrix: vec![vec![[2.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]],
    });
    assert!(f.to_program().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schedule_files_round_trip(d in 2usize..=4, layers in 0usize..=5, post in any::<bool>(), seed in any::<u64>()) {
        let prog = random_program(d, layers, post, &mut StdRng::seed_from_u64(seed));
        let text = to_json(&ScheduleFile::from_program(&prog));
        let back: ScheduleFile = from_json(&text).unwrap();
        prop_assert_eq!(&back.to_program().unwrap(), &prog);
        prop_assert_eq!(to_json(&back), text);
    }

    #[test]
    fn povm_files_round_trip(d in 1usize..=4, n in 1usize..=5, seed in any::<u64>()) {
        let mut g = StdRng::seed_from_u64(seed);
        let ranks: Vec<usize> = (0..n.max(d)).map(|_| g.random_range(1..=d)).collect();
        let p = random_povm(d, &ranks, &mut g);
        let text = to_json(&PovmFile::from_povm(&p));
        let back: PovmFile = from_json(&text).unwrap();
        prop_assert_eq!(&back.to_povm().unwrap(), &p);
        prop_assert_eq!(to_json(&back), text);
    }

    #[test]
    fn state_files_round_trip(d in 1usize..=6, seed in any::<u64>()) {
        let v = random_ket(d, &mut StdRng::seed_from_u64(seed));
        let text = to_json(&StateFile::from_ket(&v));
        let back: StateFile = from_json(&text).unwrap();
        prop_assert_eq!(back.to_ket().unwrap(), v);
        prop_assert_eq!(to_json(&back), text);
    }
}
