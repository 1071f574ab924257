//! Qutrit SIC-POVMs from the Heisenberg–Weyl orbit of the fiducial family
//! `(|1⟩ − e^{it}|2⟩)/√2`, and a hand-derived 16-step walk realizing them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::linalg::{outer, CKet, CMatrix, ONE, ZERO};
use crate::povm::Povm;
use crate::program::{CoinLayer, WalkProgram};
use crate::synthesis::{coin2, not_coin};

/// `α′` of the eight iterations; the matching `β′ = √(1 − α′²)`.
pub const ALPHA_PRIMES: [f64; 8] = [
    0.577_350_269_189_625_8, // √(1/3)
    0.612_372_435_695_794_5, // √(3/8)
    0.632_455_532_033_675_9, // √(2/5)
    std::f64::consts::FRAC_1_SQRT_2,
    0.816_496_580_927_726,   // √(2/3)
    1.0,
    0.816_496_580_927_726,   // √(2/3)
    1.0,
];

/// One member of the qutrit SIC family, labelled by the fiducial phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SicFamily {
    t: f64,
}

impl SicFamily {
    /// `t` is reduced into `[0, 2π)`.
    pub fn new(t: f64) -> Self {
        SicFamily { t: t.rem_euclid(TAU) }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn states(&self) -> Vec<CKet> {
        sic_states(self.t)
    }

    pub fn povm(&self) -> Povm {
        sic_povm(self.t)
    }

    pub fn schedule(&self) -> WalkProgram {
        paper_schedule(self.t)
    }
}

fn omega() -> Complex64 {
    Complex64::from_polar(1.0, TAU / 3.0)
}

/// Cyclic shift `X|k⟩ = |k+1 mod 3⟩`.
pub fn shift_x() -> CMatrix {
    let mut x = CMatrix::zeros(3, 3);
    x[(0, 2)] = ONE;
    x[(1, 0)] = ONE;
    x[(2, 1)] = ONE;
    x
}

/// Clock `Z = diag(1, ω, ω²)`.
pub fn clock_z() -> CMatrix {
    let w = omega();
    CMatrix::from_diagonal(&CKet::from_vec(vec![ONE, w, w * w]))
}

pub fn fiducial(t: f64) -> CKet {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CKet::from_vec(vec![ZERO, Complex64::from(s), -Complex64::from_polar(s, t)])
}

/// `|ψᵢ⟩ = XʲZᵏ|ψ⟩` with `i = 3j + k` (0-based).
pub fn sic_states(t: f64) -> Vec<CKet> {
    let t = t.rem_euclid(TAU);
    let x = shift_x();
    let z = clock_z();
    let fid = fiducial(t);
    let mut out = Vec::with_capacity(9);
    let mut xj = CMatrix::identity(3, 3);
    for _ in 0..3 {
        let mut zk = CMatrix::identity(3, 3);
        for _ in 0..3 {
            out.push(&xj * &zk * &fid);
            zk = &z * zk;
        }
        xj = &x * xj;
    }
    out
}

/// `Eᵢ = |ψᵢ⟩⟨ψᵢ|/3`.
pub fn sic_povm(t: f64) -> Povm {
    let elements = sic_states(t)
        .iter()
        .map(|v| outer(v, v) * Complex64::from(1.0 / 3.0))
        .collect();
    Povm::new(elements).expect("nine 3×3 elements")
}

fn coin(entries: [[Complex64; 3]; 3]) -> CMatrix {
    CMatrix::from_fn(3, 3, |r, c| entries[r][c])
}

/// The eight first-half coins of the 16-step protocol.
pub fn paper_coins(t: f64) -> [CMatrix; 8] {
    let t = t.rem_euclid(TAU);
    let q = Complex64::from_polar(1.0, PI / 6.0);
    let e = Complex64::from_polar(1.0, t);
    let em = e.conj();
    let i = Complex64::i();
    let r = |x: f64| Complex64::from(x);
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let z = ZERO;
    let o = ONE;

    [
        coin([[z, r(1.0 / s2), -em / s2], [o, z, z], [z, r(1.0 / s2), em / s2]]),
        coin([
            [z, r(-1.0 / s3), -i * (2.0f64 / 3.0).sqrt()],
            [o, z, z],
            [z, r((2.0f64 / 3.0).sqrt()), -i / s3],
        ]),
        coin([
            [z, r(-1.0 / s6), r(-(5.0f64 / 6.0).sqrt())],
            [o, z, z],
            [z, r((5.0f64 / 6.0).sqrt()), r(-1.0 / s6)],
        ]),
        coin([
            [-em / s3, e / (q * q * s3), q * e / s3],
            [z, r(1.0 / s2), -i / s2],
            [r(2.0) * q * q * em * em / s6, r(1.0 / s6), i / s6],
        ]),
        coin([[z, o / (q.powi(5) * s2), -q * e / s2], [o, z, z], [z, r(1.0 / s2), -e / s2]]),
        coin([[z, -q * q / s2, r(-1.0 / s2)], [o, z, z], [z, r(1.0 / s2), -o / (q * q * s2)]]),
        coin([
            [q * q * em / s2, z, q * e / s2],
            [z, o, z],
            [r(1.0 / s2), z, q.powi(5) * e * e / s2],
        ]),
        coin([[z, r(-1.0 / s2), q.powi(5) * em / s2], [o, z, z], [z, r(1.0 / s2), q.powi(5) * em / s2]]),
    ]
}

/// The published 16-layer program; outcome `i` (0-based) is read at
/// `x = 16 − 2i`.
pub fn paper_schedule(t: f64) -> WalkProgram {
    let not = not_coin(3);
    let mut prog = WalkProgram::new(3);
    for (c1, &alpha) in paper_coins(t).into_iter().zip(ALPHA_PRIMES.iter()) {
        prog.push_layer(CoinLayer::new().with(0, c1));
        let mut second = CoinLayer::new().with(-1, not.clone());
        if alpha < 1.0 {
            let beta = (1.0 - alpha * alpha).sqrt();
            second.insert(1, coin2(alpha, beta, 3));
        }
        prog.push_layer(second);
    }
    for i in 0..9 {
        prog.set_outcome(16 - 2 * i as i64, i as usize);
    }
    prog
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs, unitarity_residual};

    #[test]
    fn fiducial_at_zero() {
        let s = sic_states(0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = CKet::from_vec(vec![ZERO, Complex64::from(h), Complex64::from(-h)]);
        assert!((&s[0] - expect).norm() < 1e-15);
    }

    #[test]
    fn x_applied_once_cycles_amplitudes() {
        let s = sic_states(0.0);
        // i = 4 (1-based) is j = 1, k = 0: X moves amplitude of |k⟩ to |k+1⟩
        for k in 0..3 {
            assert!((s[3][(k + 1) % 3] - s[0][k]).norm() < 1e-15);
        }
    }

    #[test]
    fn pairwise_fidelity_quarter() {
        for &t in &[0.0, 0.3, 2.0, 5.5] {
            let s = sic_states(t);
            for a in 0..9 {
                for b in 0..9 {
                    let f = s[a].dotc(&s[b]).norm_sqr();
                    let expect = if a == b { 1.0 } else { 0.25 };
                    assert!((f - expect).abs() < 1e-12, "t={t} a={a} b={b} f={f}");
                }
            }
        }
    }

    #[test]
    fn povm_is_complete_with_trace_third() {
        let p = sic_povm(0.0);
        assert!(p.validate(1e-10).pass);
        for e in p.elements() {
            assert!((e.trace().re - 1.0 / 3.0).abs() < 1e-15);
        }
        let sum = p.elements().iter().fold(CMatrix::zeros(3, 3), |a, e| a + e);
        assert!(max_abs(&(sum - identity(3))) < 1e-10);
        assert!(sic_povm(PI / 7.0).validate(1e-10).pass);
    }

    #[test]
    fn t_is_periodic() {
        assert!((SicFamily::new(TAU + 0.5).t() - 0.5).abs() < 1e-15);
        assert!((SicFamily::new(-0.5).t() - (TAU - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn transcribed_coins_are_unitary() {
        for c in paper_coins(1.234) {
            assert!(unitarity_residual(&c) < 1e-14);
        }
    }

    #[test]
    fn alpha_table_matches_closed_forms() {
        let expect: [f64; 8] = [1.0 / 3.0, 3.0 / 8.0, 2.0 / 5.0, 0.5, 2.0 / 3.0, 1.0, 2.0 / 3.0, 1.0];
        for (a, e) in ALPHA_PRIMES.iter().zip(expect) {
            assert!((a - e.sqrt()).abs() <= 2.0 * f64::EPSILON);
        }
    }

    #[test]
    fn second_half_coins_do_not_depend_on_t() {
        let a = paper_schedule(0.1);
        let b = paper_schedule(4.0);
        for k in (1..16).step_by(2) {
            assert_eq!(a.layers()[k], b.layers()[k]);
        }
        assert_eq!(a.layer_count(), 16);
    }
}
