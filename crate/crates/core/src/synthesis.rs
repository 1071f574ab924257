//! Main compiler: a rank-1 POVM with `n` items becomes a `2(n−1)`-step walk.
//!
//! Iteration `i` applies `C⁽¹⁾ᵢ` at `x = 0`, shifts, then applies `C⁽²⁾ᵢ`
//! at `x = 1` and `NOT` at `x = −1` and shifts again. The operator `Kᵢ`
//! maps the initial coin state to the (unnormalized) coin state left at the
//! origin after `i` iterations, with `Kᵢ†Kᵢ = 𝟙 − Σ_{l≤i} E_l`. The first
//! row of `C⁽¹⁾ᵢ` is fixed by `C⁽¹⁾ᵢ†|0⟩ = K_{i−1}†⁺|ψᵢ⟩ / bᵢ`; the rest of
//! the coin is free and does not change the realized measurement.
//!
//! Item `j` (1-based) is read out at `x = 2(n − j)`, the last item at `x = 0`.

use num_complex::Complex64;

use crate::error::{infeasible, invalid, Result};
use crate::linalg::{
    complete_unitary, complete_unitary_with, fix_phase, pseudo_inverse, CKet, CMatrix, Completion,
    DEFAULT_TOL, ONE, ZERO,
};
pub use crate::program::{CoinLayer, WalkProgram};
use crate::povm::Rank1Povm;
use crate::walk::STATE_NORM_TOL;

/// `α′²` may exceed one by at most this much before it is a hard error;
/// inside the window it is clamped to exactly one.
pub const ALPHA_CLAMP: f64 = 1e-9;
/// `α′²` this close below one is also snapped to one. Otherwise roundoff
/// leaves `β′ ~ 1e-8` and a spurious tiny singular value in `K`.
pub const ALPHA_SNAP_BELOW: f64 = 1e-12;

/// Knobs for [`synthesize_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    /// Relative SVD cutoff; `b ≤ tol·d` is treated as zero.
    pub tol: f64,
    /// How the free rows of each `C⁽¹⁾` are filled in.
    pub completion: Completion,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions { tol: DEFAULT_TOL, completion: Completion::Forward }
    }
}

/// Everything computed during one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// `Kᵢ` after this iteration.
    pub k: CMatrix,
    pub b: f64,
    pub alpha_prime: f64,
    pub beta_prime: f64,
    pub coin1: CMatrix,
    /// `None` when `α′ = 1` and the identity is used instead.
    pub coin2: Option<CMatrix>,
}

/// An outcome that could already be detected at `x = 2` right after an
/// earlier iteration, since no coin acts on its path afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EarlyDetection {
    pub item: usize,
    /// 1-based iteration after which the detector may sit at `x = 2`.
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisTrace {
    pub iterations: Vec<IterationRecord>,
    /// Ket of the last item, realized at the origin.
    pub last_ket: CKet,
    pub options: SynthesisOptions,
}

impl SynthesisTrace {
    /// `K_{n−1}`, or the identity when there was no iteration.
    pub fn final_k(&self) -> CMatrix {
        self.iterations
            .last()
            .map(|r| r.k.clone())
            .unwrap_or_else(|| CMatrix::identity(self.last_ket.len(), self.last_ket.len()))
    }

    pub fn alpha_primes(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.alpha_prime).collect()
    }

    /// Items `1..=n−2` and the iteration after which each may be read.
    pub fn early_detection(&self) -> Vec<EarlyDetection> {
        let n = self.iterations.len() + 1;
        (1..n.saturating_sub(1))
            .map(|j| EarlyDetection { item: j - 1, iteration: j })
            .collect()
    }
}

/// `|0⟩⟨1| + |1⟩⟨0| + Σ_{k≥2} |k⟩⟨k|`
pub fn not_coin(d: usize) -> CMatrix {
    shift_back(d, 1.0)
}

/// `|0⟩⟨1| + β|1⟩⟨0| + Σ_{k≥2} |k⟩⟨k|`: what happens to the coin at the
/// origin across the second half of an iteration.
fn shift_back(d: usize, beta: f64) -> CMatrix {
    let mut m = CMatrix::identity(d, d);
    m[(0, 0)] = ZERO;
    m[(1, 1)] = ZERO;
    m[(0, 1)] = ONE;
    m[(1, 0)] = Complex64::from(beta);
    m
}

/// Reflection-type coin `[[α, β], [β, −α]] ⊕ 𝟙`.
pub fn coin2(alpha: f64, beta: f64, d: usize) -> CMatrix {
    let mut m = CMatrix::identity(d, d);
    m[(0, 0)] = Complex64::from(alpha);
    m[(0, 1)] = Complex64::from(beta);
    m[(1, 0)] = Complex64::from(beta);
    m[(1, 1)] = Complex64::from(-alpha);
    m
}

/// First-half coin of an iteration and its normalization `b`.
pub fn coin1(k_prev: &CMatrix, psi: &CKet, tol: f64) -> Result<(CMatrix, f64)> {
    coin1_with(k_prev, psi, tol, Completion::Forward)
}

fn coin1_first_row(k_prev: &CMatrix, psi: &CKet, tol: f64) -> Result<(CKet, f64)> {
    let d = k_prev.nrows();
    if !k_prev.is_square() || psi.len() != d {
        return Err(invalid(format!(
            "coin1: K is {}×{}, ψ has length {}",
            k_prev.nrows(),
            k_prev.ncols(),
            psi.len()
        )));
    }
    let v = pseudo_inverse(&k_prev.adjoint(), tol)? * psi;
    let b = v.norm();
    if !(b > tol * d as f64) {
        return Err(infeasible(format!(
            "ψ lies outside the support of the remaining operator (b = {b:e})"
        )));
    }
    // C†|0⟩ = v/b means row 0 of C is the conjugate of v/b.
    Ok((v.map(|z| z.conj()).unscale(b), b))
}

pub(crate) fn coin1_with(k_prev: &CMatrix, psi: &CKet, tol: f64, completion: Completion) -> Result<(CMatrix, f64)> {
    let (row, b) = coin1_first_row(k_prev, psi, tol)?;
    let c1 = complete_unitary_with(&[row], k_prev.nrows(), completion)?;
    Ok((c1, b))
}

/// `Kₗ = (|0⟩⟨1| + β′|1⟩⟨0| + Σ_{k≥2}|k⟩⟨k|) C⁽¹⁾ K_{l−1}`
pub fn advance_k(k_prev: &CMatrix, coin1: &CMatrix, beta_prime: f64) -> Result<CMatrix> {
    let d = k_prev.nrows();
    if !k_prev.is_square() || coin1.shape() != (d, d) {
        return Err(invalid(format!(
            "advance_k: K is {:?}, C⁽¹⁾ is {:?}",
            k_prev.shape(),
            coin1.shape()
        )));
    }
    if d < 2 {
        return Err(invalid("advance_k: coin dimension must be at least 2"));
    }
    if !(0.0..=1.0).contains(&beta_prime) {
        return Err(invalid(format!("advance_k: β′ = {beta_prime} outside [0, 1]")));
    }
    Ok(shift_back(d, beta_prime) * coin1 * k_prev)
}

/// `α′ = √a·b` (clamped to 1 inside [`ALPHA_CLAMP`]) and `β′ = √(1 − α′²)`.
pub fn coin2_params(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a <= 1.0 + ALPHA_CLAMP) || !(b > 0.0) || !b.is_finite() {
        return Err(invalid(format!("coin2_params: need a ∈ (0, 1], b > 0; got a = {a}, b = {b}")));
    }
    let alpha_sq = a * b * b;
    if alpha_sq > 1.0 + ALPHA_CLAMP {
        return Err(infeasible(format!(
            "α′² = {alpha_sq} exceeds 1: element is larger than what remains of the identity"
        )));
    }
    if alpha_sq >= 1.0 - ALPHA_SNAP_BELOW {
        return Ok((1.0, 0.0));
    }
    Ok((alpha_sq.sqrt(), (1.0 - alpha_sq).sqrt()))
}

pub fn synthesize(r: &Rank1Povm, tol: f64) -> Result<(WalkProgram, SynthesisTrace)> {
    synthesize_with(r, &SynthesisOptions { tol, ..SynthesisOptions::default() })
}

pub fn synthesize_with(r: &Rank1Povm, opts: &SynthesisOptions) -> Result<(WalkProgram, SynthesisTrace)> {
    let d = r.dim();
    if d < 2 {
        return Err(invalid("walk synthesis needs coin dimension ≥ 2"));
    }
    let n = r.len();
    let items = r.items();
    let not = not_coin(d);

    let mut prog = WalkProgram::new(d);
    let mut k = CMatrix::identity(d, d);
    let mut iterations = Vec::with_capacity(n.saturating_sub(1));
    for item in &items[..n - 1] {
        let (c1, b) = coin1_with(&k, &item.ket, opts.tol, opts.completion)?;
        let (alpha, beta) = coin2_params(item.weight, b)?;
        let c2 = (alpha < 1.0).then(|| coin2(alpha, beta, d));

        prog.push_layer(CoinLayer::new().with(0, c1.clone()));
        let mut second = CoinLayer::new().with(-1, not.clone());
        if let Some(c2) = &c2 {
            second.insert(1, c2.clone());
        }
        prog.push_layer(second);

        k = advance_k(&k, &c1, beta)?;
        iterations.push(IterationRecord {
            k: k.clone(),
            b,
            alpha_prime: alpha,
            beta_prime: beta,
            coin1: c1,
            coin2: c2,
        });
    }
    for j in 0..n {
        prog.set_outcome(2 * (n - 1 - j) as i64, j);
    }

    let trace = SynthesisTrace {
        iterations,
        last_ket: items[n - 1].ket.clone(),
        options: *opts,
    };
    Ok((prog, trace))
}

/// Extend a synthesized program so that outcome `j` leaves the coin in
/// `targets[j]` (up to a global phase).
///
/// Appends `C⁽¹⁾ₙ` at the origin without a shift, which rotates the last
/// outcome's coin state onto `|0⟩`, then a post layer mapping `|0⟩ → ζ` at
/// every outcome position.
pub fn extend_post_measurement(prog: &WalkProgram, trace: &SynthesisTrace, targets: &[CKet]) -> Result<WalkProgram> {
    let d = prog.dim();
    let n = trace.iterations.len() + 1;
    if targets.len() != n {
        return Err(invalid(format!("{} target states for {n} outcomes", targets.len())));
    }
    for (i, z) in targets.iter().enumerate() {
        if z.len() != d {
            return Err(invalid(format!("target {i} has dimension {} ≠ {d}", z.len())));
        }
        let dev = (z.norm_squared() - 1.0).abs();
        if dev > STATE_NORM_TOL {
            return Err(invalid(format!("target {i} not normalized (deviation {dev:e})")));
        }
    }

    let (mut row, _) = coin1_first_row(&trace.final_k(), &trace.last_ket, trace.options.tol)?;
    fix_phase(&mut row);
    let cn = complete_unitary_with(&[row], d, trace.options.completion)?;

    let mut out = prog.clone();
    out.push_layer(CoinLayer::stationary().with(0, cn));
    let mut post = CoinLayer::stationary();
    for (&x, &label) in prog.outcome_positions() {
        let zeta = targets
            .get(label)
            .ok_or_else(|| invalid(format!("outcome label {label} has no target")))?;
        // W has first row ζ*, so W† sends |0⟩ to ζ.
        let w = complete_unitary(&[zeta.map(|z| z.conj())], d)?;
        post.insert(x, w.adjoint());
    }
    out.set_post_layer(post);
    Ok(out)
}
