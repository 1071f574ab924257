#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qwalk::linalg::{basis_ket, identity, max_abs, outer, CKet, CMatrix};
use qwalk::povm::{Povm, Rank1Item, Rank1Povm};
use qwalk::walk::{induced_povm, run_observed, InducedPovm};
use qwalk::{CoinLayer, WalkProgram};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(x: f64) -> Complex64 {
    Complex64::from(x)
}

/// `[[Re, −Im], [Im, Re]]`; each eigenvalue of a Hermitian `m` appears twice.
pub fn real_embedding(m: &CMatrix) -> DMatrix<f64> {
    let d = m.nrows();
    let h = (m + m.adjoint()) * c(0.5);
    DMatrix::from_fn(2 * d, 2 * d, |r, col| {
        let z = h[(r % d, col % d)];
        match (r < d, col < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Sorted eigenvalues of a Hermitian matrix, via the real embedding.
pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = real_embedding(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev.into_iter().step_by(2).collect()
}

pub fn min_eig(m: &CMatrix) -> f64 {
    eigenvalues(m)[0]
}

/// Number of eigenvalues above `rel·λ_max`.
pub fn psd_rank(m: &CMatrix, rel: f64) -> usize {
    let ev = eigenvalues(m);
    let top = ev.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    ev.iter().filter(|&&l| l > rel * top).count()
}

/// Number of eigenvalues above an absolute threshold.
pub fn count_above(m: &CMatrix, threshold: f64) -> usize {
    eigenvalues(m).into_iter().filter(|&l| l > threshold).count()
}

/// Largest `a` keeping `A − a|ψ⟩⟨ψ|` PSD, by bisection on the minimum eigenvalue.
pub fn bisect_a_max(a: &CMatrix, psi: &CKet) -> f64 {
    let p = outer(psi, psi);
    let slack = 1e-12 * eigenvalues(a).last().copied().unwrap_or(1.0).max(1.0);
    let feasible = |x: f64| min_eig(&(a - &p * c(x))) >= -slack;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while feasible(hi) {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Inverse of an invertible square matrix by LU, as a stand-in for the
/// pseudo-inverse where the two coincide.
pub fn oracle_inverse(m: &CMatrix) -> CMatrix {
    m.clone().try_inverse().expect("invertible")
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

/// Overlap `|⟨a|b⟩|` of unit kets.
pub fn overlap(a: &CKet, b: &CKet) -> f64 {
    a.dotc(b).norm()
}

pub fn tetrahedron_kets() -> Vec<CKet> {
    let s = 1.0 / 3f64.sqrt();
    (1..=4)
        .map(|i| CKet::from_iterator(3, (0..3).map(|j| c(if i == j + 2 { -s } else { s }))))
        .collect()
}

pub fn tetrahedron() -> Povm {
    Povm::new(tetrahedron_kets().iter().map(|v| outer(v, v) * c(0.75)).collect()).unwrap()
}

pub fn tetrahedron_rank1() -> Rank1Povm {
    let items = tetrahedron_kets().into_iter().map(|v| Rank1Item::new(0.75, v)).collect();
    Rank1Povm::from_items(3, items, 1e-10).unwrap()
}

fn m3(rows: [[f64; 3]; 3]) -> CMatrix {
    CMatrix::from_fn(3, 3, |r, k| c(rows[r][k]))
}

/// The six-step tetrahedron walk with hand-written coins.
pub fn tetrahedron_fixture() -> WalkProgram {
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let c01 = m3([
        [1.0 / s3, 1.0 / s3, 1.0 / s3],
        [1.0 / s6, 1.0 / s6, -2.0 / s6],
        [1.0 / s2, -1.0 / s2, 0.0],
    ]);
    let not = m3([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
    let c12 = m3([[s3 / 2.0, 0.5, 0.0], [0.5, -s3 / 2.0, 0.0], [0.0, 0.0, 1.0]]);
    let c03 = m3([
        [-1.0 / s6, 1.0 / s3, -1.0 / s2],
        [-1.0 / s6, 1.0 / s3, 1.0 / s2],
        [(2.0f64 / 3.0).sqrt(), 1.0 / s3, 0.0],
    ]);
    let mut p = WalkProgram::new(3);
    p.push_layer(CoinLayer::new().with(0, c01));
    p.push_layer(CoinLayer::new().with(-1, not.clone()).with(1, c12));
    p.push_layer(CoinLayer::new().with(0, c03));
    p.push_layer(CoinLayer::new().with(-1, not.clone()));
    p.push_layer(CoinLayer::new());
    p.push_layer(CoinLayer::new().with(-1, not));
    for (i, x) in [6, 4, 2, 0].into_iter().enumerate() {
        p.set_outcome(x, i);
    }
    p
}

/// Largest deviation between the induced element at each labelled position
/// and the corresponding rank-1 target item.
pub fn item_deviation(omega: &InducedPovm, prog: &WalkProgram, r: &Rank1Povm) -> f64 {
    let mut worst: f64 = 0.0;
    for (&x, &label) in prog.outcome_positions() {
        worst = worst.max(max_diff(&omega.element(x), &r.items()[label].element()));
    }
    for (x, e) in omega.elements() {
        if !prog.outcome_positions().contains_key(x) {
            worst = worst.max(max_abs(e));
        }
    }
    worst
}

/// Summary of the conservation checks on one program.
#[derive(Debug, Clone, Copy)]
pub struct Conservation {
    pub completeness: f64,
    pub norm_drift: f64,
    pub below_minus_one: f64,
}

impl Conservation {
    pub fn ok(&self, require_floor: bool) -> bool {
        self.completeness < 1e-10 && self.norm_drift < 1e-12 && (!require_floor || self.below_minus_one == 0.0)
    }
}

/// `Σ Ω = 𝟙`, per-step norm drift and amplitude below `x = −1`, with every
/// basis state as input.
pub fn conservation(prog: &WalkProgram) -> Conservation {
    let d = prog.dim();
    let omega = induced_povm(prog).unwrap();
    let sum = omega.elements().values().fold(CMatrix::zeros(d, d), |a, e| a + e);
    let completeness = max_abs(&(sum - identity(d)));
    let mut norm_drift: f64 = 0.0;
    let mut below: f64 = 0.0;
    for k in 0..d {
        run_observed(prog, &basis_ket(d, k), |_, st| {
            norm_drift = norm_drift.max((st.norm_squared() - 1.0).abs());
            below = below.max(st.weight_below(-1));
        })
        .unwrap();
    }
    Conservation { completeness, norm_drift, below_minus_one: below }
}

/// Induced elements summed per original outcome.
pub fn grouped(prog: &WalkProgram, r: &Rank1Povm) -> (Vec<CMatrix>, f64) {
    let omega = induced_povm(prog).unwrap();
    let mut positions: BTreeMap<i64, usize> = BTreeMap::new();
    for (&x, &item) in prog.outcome_positions() {
        positions.insert(x, r.outcome_map()[item]);
    }
    let g = omega.group(&positions, r.outcome_count());
    (g.elements, g.stray)
}
