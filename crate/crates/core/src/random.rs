//! Random test instances: Haar-like unitaries, states and POVMs.
//!
//! All generators take the RNG explicitly so experiments are reproducible.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CKet, CMatrix, ZERO};
use crate::povm::{Povm, Rank1Item, Rank1Povm};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly random unit ket.
pub fn random_ket(d: usize, rng: &mut impl Rng) -> CKet {
    let v = CKet::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-random unitary (Gram–Schmidt on a complex Ginibre matrix).
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    let mut cols: Vec<CKet> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = CKet::from_fn(d, |_, _| gaussian(rng));
        for _ in 0..2 {
            for c in &cols {
                let p = c.dotc(&v);
                v -= c * p;
            }
        }
        let n = v.norm();
        if n > 1e-6 {
            cols.push(v.unscale(n));
        }
    }
    CMatrix::from_columns(&cols)
}

/// `m×d` matrix with orthonormal columns (`m ≥ d`).
pub fn random_isometry(m: usize, d: usize, rng: &mut impl Rng) -> CMatrix {
    random_unitary(m, rng).columns(0, d).into_owned()
}

/// Rank-1 items `wᵢwᵢ†` where `wᵢ†` is row `i` of a random isometry.
fn items_from_isometry(v: &CMatrix) -> Vec<Rank1Item> {
    v.row_iter()
        .map(|row| {
            let w = row.adjoint();
            let a = w.norm_squared();
            Rank1Item::new(a, w.unscale(a.sqrt()))
        })
        .collect()
}

/// Random rank-1 POVM with `n ≥ d` items; generically simple.
pub fn random_rank1_povm(d: usize, n: usize, rng: &mut impl Rng) -> Rank1Povm {
    assert!(n >= d, "a rank-1 POVM needs at least d items");
    let v = random_isometry(n, d, rng);
    Rank1Povm::from_items(d, items_from_isometry(&v), 1e-10).expect("isometry rows form a POVM")
}

/// Random POVM whose element `k` has rank `ranks[k]`; needs `Σ ranks ≥ d`.
pub fn random_povm(d: usize, ranks: &[usize], rng: &mut impl Rng) -> Povm {
    let total: usize = ranks.iter().sum();
    assert!(total >= d, "ranks must add up to at least d");
    let v = random_isometry(total, d, rng);
    let mut row = 0;
    let elements = ranks
        .iter()
        .map(|&r| {
            let block = v.rows(row, r);
            row += r;
            block.adjoint() * block
        })
        .collect();
    Povm::new(elements).expect("blocks of an isometry")
}

/// Rank-1 POVM with repeated proportional elements, in random order.
///
/// Half the time the base is a random rank-1 POVM, otherwise a rotated
/// orthonormal basis; a few items are split into proportional pieces, which
/// forces fully exhausted directions partway through synthesis.
pub fn random_non_simple_povm(d: usize, rng: &mut impl Rng) -> Rank1Povm {
    let base = if rng.random_bool(0.5) {
        let n = rng.random_range(d..=d + 3);
        random_rank1_povm(d, n, rng).items().to_vec()
    } else {
        let u = random_unitary(d, rng);
        (0..d).map(|k| Rank1Item::new(1.0, u.column(k).into_owned())).collect()
    };
    let mut items = Vec::new();
    for it in base {
        let pieces = if rng.random_bool(0.6) { rng.random_range(2..=3) } else { 1 };
        let mut cuts: Vec<f64> = (0..pieces).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = cuts.iter().sum();
        cuts.iter_mut().for_each(|c| *c /= total);
        for c in cuts {
            let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            items.push(Rank1Item::new(it.weight * c, &it.ket * phase));
        }
    }
    items.shuffle(rng);
    Rank1Povm::from_items(d, items, 1e-10).expect("split items still complete")
}

/// Random PSD matrix of the given rank (`G G†`, `G` Ginibre `d×rank`).
pub fn random_psd(d: usize, rank: usize, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(d, rank, |_, _| gaussian(rng));
    &g * g.adjoint()
}

/// Random ket inside the column space of `a`.
pub fn random_ket_in_support(a: &CMatrix, rng: &mut impl Rng) -> CKet {
    let v = a * random_ket(a.ncols(), rng);
    let n = v.norm();
    if n == 0.0 {
        return CKet::from_element(a.nrows(), ZERO);
    }
    v.unscale(n)
}
