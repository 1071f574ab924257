//! Variant compiler based on peeling maximal weights off the residual
//! operator.
//!
//! Iteration `i` first applies a coin `C¹` at the origin whose `|0⟩` row is a
//! unit ket `η` orthogonal to every coin state the origin can hold when the
//! walk was started in a state orthogonal to `ψᵢ`. After the shift, site
//! `x = 1` therefore carries exactly `ãᵢ|ψᵢ⟩⟨ψᵢ|` with `ãᵢ` the largest weight
//! that can be removed from `Γ_{i−1}` while keeping it PSD. A reflection
//! coin `C²(θ)` with `cos²θ = aᵢ/ãᵢ` then trims this down to `Eᵢ`.
//!
//! The counter `j` tracks `d − rank(Γᵢ)`. Whenever an element exhausts a
//! direction (`cos θ = 1`) the counter grows and a swap coin parks the lost
//! direction at `|d−j⟩`, so that the origin state stays orthogonal to
//! `|d−1⟩, …, |d−j⟩`. Once `j = d − 1` the origin holds a single direction
//! and a `NOT` sends it back onto `|0⟩` after each iteration.
//!
//! Corrective coins (`NOT`, swap) do not translate; they are folded into the
//! next iteration's first coin, or emitted as a trailing stationary layer.

use num_complex::Complex64;

use crate::error::{infeasible, invalid, Error, Result};
use crate::linalg::{
    complete_unitary, ensure_finite, fix_phase, hermitian_eigen, max_abs, min_eigenvalue, outer, svd, CKet,
    CMatrix, DEFAULT_TOL, ONE, ZERO,
};
use crate::povm::Rank1Povm;
use crate::program::{CoinLayer, WalkProgram};
use crate::synthesis::not_coin;

/// Default window for treating `cos θ` as exactly one.
pub const DEFAULT_UNIT_COS_TOL: f64 = 1e-9;
/// Smallest singular value of the `η` constraint system above which no
/// admissible `η` exists.
const NULL_SPACE_TOL: f64 = 1e-7;
/// Allowed relative gap between the closed-form `ã` and the weight actually
/// routed to `x = 1` by the walk.
const A_TILDE_CONSISTENCY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltOptions {
    /// Relative cutoff for supports and pseudo-inverses.
    pub tol: f64,
    /// `cos θ = 1` is declared when `ã − a ≤ unit_cos_tol·max(1, a)`.
    pub unit_cos_tol: f64,
}

impl Default for AltOptions {
    fn default() -> Self {
        AltOptions { tol: DEFAULT_TOL, unit_cos_tol: DEFAULT_UNIT_COS_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AltIteration {
    /// `Γᵢ = Γ_{i−1} − Eᵢ`.
    pub gamma: CMatrix,
    /// `ãᵢ` from the closed form.
    pub a_tilde: f64,
    /// `|⟨η|φ_{i0}⟩|²`, the weight the walk actually routes to `x = 1`.
    pub a_tilde_walk: f64,
    /// Radians, in `[0, π/2]`.
    pub theta: f64,
    /// Counter value at the end of the iteration.
    pub j: usize,
    /// Initial coin state → origin coin state, at the start of the iteration.
    pub l_start: CMatrix,
    /// Same map at the end of the iteration (corrective coins included).
    pub l_end: CMatrix,
    pub eta: CKet,
    pub coin1: CMatrix,
    pub coin2: CMatrix,
    /// Swap coin applied after `j` was incremented.
    pub coin3: Option<CMatrix>,
    /// Whether the `NOT` correction fired (`j = d − 1`).
    pub not_applied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AltTrace {
    pub iterations: Vec<AltIteration>,
    pub options: AltOptions,
}

impl AltTrace {
    pub fn a_tildes(&self) -> Vec<f64> {
        self.iterations.iter().map(|it| it.a_tilde).collect()
    }
}

/// Largest `a` with `A − a|ψ⟩⟨ψ| ⪰ 0`, via `‖(A⁺)^{1/2}ψ‖⁻²`.
pub fn a_max(a: &CMatrix, psi: &CKet, tol: f64) -> Result<f64> {
    ensure_finite(a, "a_max")?;
    if !a.is_square() || psi.len() != a.nrows() {
        return Err(invalid(format!("a_max: A is {:?}, ψ has length {}", a.shape(), psi.len())));
    }
    let (values, vectors) = hermitian_eigen(a);
    let top = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return Err(infeasible("a_max: A is zero"));
    }
    let cutoff = tol * top;
    let mut projected = CKet::zeros(psi.len());
    let mut weighted = CKet::zeros(psi.len());
    for (k, &lambda) in values.iter().enumerate() {
        if lambda <= cutoff {
            continue;
        }
        let v = vectors.column(k);
        let c = v.dotc(psi);
        projected += v * c;
        weighted += v * (c / lambda.sqrt());
    }
    let leak = (psi - &projected).norm();
    if leak > tol.sqrt() * psi.norm() {
        return Err(infeasible(format!("ψ is not in the support of A (off-support norm {leak:e})")));
    }
    let w = weighted.norm_squared();
    if !(w > 0.0) {
        return Err(infeasible("ψ is not in the support of A"));
    }
    Ok(1.0 / w)
}

/// Householder reflection `H` with `H ψ ∝ |0⟩`; the columns `H|m⟩`, `m ≥ 1`,
/// form an orthonormal basis of the complement of `ψ`.
pub(crate) fn householder_to_e0(psi: &CKet) -> CMatrix {
    let d = psi.len();
    let norm = psi.norm();
    let phase = if psi[0].norm() > 0.0 { psi[0] / psi[0].norm() } else { ONE };
    let mut u = psi.clone();
    u[0] += phase * norm;
    let uu = u.norm_squared();
    CMatrix::identity(d, d) - outer(&u, &u) * Complex64::from(2.0 / uu)
}

/// Swap of `|1⟩` and `|d−j⟩` (identity when they coincide).
pub fn swap_coin(d: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::identity(d, d);
    let t = d - j;
    if t != 1 {
        m.swap_columns(1, t);
    }
    m
}

/// `C²(θ)` for `cos θ = cos_theta`.
pub fn rotation_coin(cos_theta: f64, d: usize) -> CMatrix {
    let sin = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    crate::synthesis::coin2(cos_theta, sin, d)
}

fn select_eta(phi_list: &[CKet], j: usize, d: usize) -> Result<CKet> {
    let rows = (phi_list.len() + j).max(d);
    let mut a = CMatrix::zeros(rows, d);
    for (r, phi) in phi_list.iter().enumerate() {
        for k in 0..d {
            a[(r, k)] = phi[k].conj();
        }
    }
    for l in 1..=j {
        a[(phi_list.len() + l - 1, d - l)] = ONE;
    }
    let svd = svd(&a);
    let v_t = svd.v_t;
    let (k_min, s_min) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(km, sm), (k, &s)| if s < sm { (k, s) } else { (km, sm) });
    let s_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if s_min > NULL_SPACE_TOL * s_max.max(1.0) {
        return Err(infeasible(format!(
            "no coin direction is orthogonal to the complement states (σ_min = {s_min:e})"
        )));
    }
    let mut eta = v_t.row(k_min).adjoint();
    for l in 1..=j {
        eta[d - l] = ZERO;
    }
    let n = eta.norm();
    eta.unscale_mut(n);
    fix_phase(&mut eta);
    Ok(eta)
}

/// First coin of an iteration, `|0⟩⟨η| + Σ_m |m⟩⟨η_{⊥m}|`, with
/// `η_{⊥m} = |m⟩` for the last `j` basis kets, so the coin is block
/// diagonal `M ⊕ 𝟙_j`.
pub fn build_coin1_alt(phi_list: &[CKet], j: usize, d: usize) -> Result<CMatrix> {
    build_coin1_alt_eta(phi_list, j, d).map(|(c, _)| c)
}

fn build_coin1_alt_eta(phi_list: &[CKet], j: usize, d: usize) -> Result<(CMatrix, CKet)> {
    if d < 2 || j >= d {
        return Err(invalid(format!("build_coin1_alt: need d ≥ 2 and j < d, got d = {d}, j = {j}")));
    }
    if phi_list.len() != d - 1 || phi_list.iter().any(|p| p.len() != d) {
        return Err(invalid(format!("build_coin1_alt: expected {} kets of dimension {d}", d - 1)));
    }
    let eta = select_eta(phi_list, j, d)?;
    let block = d - j;
    let head = CKet::from_iterator(block, eta.iter().take(block).map(|z| z.conj()));
    let m = complete_unitary(&[head], block)?;
    let mut c = CMatrix::identity(d, d);
    c.view_mut((0, 0), (block, block)).copy_from(&m);
    Ok((c, eta))
}

pub fn synthesize_alt(r: &Rank1Povm, tol: f64) -> Result<(WalkProgram, AltTrace)> {
    synthesize_alt_with(r, &AltOptions { tol, ..AltOptions::default() })
}

pub fn synthesize_alt_with(r: &Rank1Povm, opts: &AltOptions) -> Result<(WalkProgram, AltTrace)> {
    let d = r.dim();
    if d < 2 {
        return Err(invalid("walk synthesis needs coin dimension ≥ 2"));
    }
    let n = r.len();
    let not = not_coin(d);
    let mut prog = WalkProgram::new(d);
    let mut l = CMatrix::identity(d, d);
    let mut gamma = CMatrix::identity(d, d);
    let mut j = 0usize;
    let mut pending: Option<CMatrix> = None;
    let mut iterations = Vec::with_capacity(n.saturating_sub(1));

    for item in &r.items()[..n - 1] {
        let psi = &item.ket;
        let a = item.weight;
        let a_tilde = a_max(&gamma, psi, opts.tol)?;
        let slack = opts.unit_cos_tol * a.max(1.0);
        if a - a_tilde > slack {
            return Err(infeasible(format!("weight {a} exceeds the removable maximum {a_tilde}")));
        }
        let unit = a_tilde - a <= slack;
        let cos = if unit { 1.0 } else { (a / a_tilde).sqrt() };

        let h = householder_to_e0(psi);
        let phis: Vec<CKet> = (1..d).map(|m| &l * h.column(m)).collect();
        let (c1, eta) = build_coin1_alt_eta(&phis, j, d)?;
        let phi0 = &l * psi;
        let a_tilde_walk = eta.dotc(&phi0).norm_sqr();
        if (a_tilde_walk - a_tilde).abs() > A_TILDE_CONSISTENCY * a_tilde.max(1.0) {
            return Err(Error::InternalConsistency(format!(
                "walk routes weight {a_tilde_walk} to x = 1, expected {a_tilde}"
            )));
        }
        let c2 = rotation_coin(cos, d);
        let sin = c2[(0, 1)].re;

        let first = match pending.take() {
            Some(p) => &c1 * p,
            None => c1.clone(),
        };
        prog.push_layer(CoinLayer::new().with(0, first));
        prog.push_layer(CoinLayer::new().with(1, c2.clone()).with(-1, not.clone()));

        let l_start = l.clone();
        l = crate::synthesis::advance_k(&l, &c1, sin)?;

        let mut correction: Option<CMatrix> = None;
        let not_applied = j == d - 1;
        if not_applied {
            correction = Some(not.clone());
        }
        let mut coin3 = None;
        if unit {
            j += 1;
            if j > d - 1 {
                return Err(Error::InternalConsistency(format!("counter j = {j} exceeds d − 1")));
            }
            let c3 = swap_coin(d, j);
            correction = Some(match correction {
                Some(c) => &c3 * c,
                None => c3.clone(),
            });
            coin3 = Some(c3);
        }
        if let Some(c) = &correction {
            l = c * &l;
        }
        pending = correction;

        gamma -= item.element();
        let low = min_eigenvalue(&gamma);
        if low < -opts.tol * d as f64 {
            return Err(Error::InternalConsistency(format!("residual operator lost positivity (λ_min = {low:e})")));
        }

        iterations.push(AltIteration {
            gamma: gamma.clone(),
            a_tilde,
            a_tilde_walk,
            theta: cos.clamp(-1.0, 1.0).acos(),
            j,
            l_start,
            l_end: l.clone(),
            eta,
            coin1: c1,
            coin2: c2,
            coin3,
            not_applied,
        });
    }
    if let Some(p) = pending {
        if max_abs(&(&p - CMatrix::identity(d, d))) > 0.0 {
            prog.push_layer(CoinLayer::stationary().with(0, p));
        }
    }
    for i in 0..n {
        prog.set_outcome(2 * (n - 1 - i) as i64, i);
    }
    Ok((prog, AltTrace { iterations, options: *opts }))
}
