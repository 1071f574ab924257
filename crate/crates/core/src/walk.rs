//! State-vector simulation of coined walks on the integer line.
//!
//! The conditional shift moves the walker up one site when the coin reads
//! `|0⟩`, down one site on `|1⟩`, and leaves it in place for every other
//! coin state. The lattice is stored as a dense window that only grows on a
//! side when amplitude actually moves past it.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::linalg::{basis_ket, ensure_finite_ket, identity, operator_norm, CKet, CMatrix, ZERO};
use crate::program::{CoinLayer, WalkProgram};

/// Input coin states must be normalized to this level.
pub const STATE_NORM_TOL: f64 = 1e-10;
/// Positions with conditional probability at or below this are unreachable.
pub const MIN_CONDITIONAL_PROBABILITY: f64 = 1e-12;

/// Joint walker/coin amplitudes on the window `[min_pos, max_pos]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    dim: usize,
    min_pos: i64,
    max_pos: i64,
    /// Row-major: `(pos − min_pos)·dim + coin`.
    amps: Vec<Complex64>,
}

impl WalkState {
    /// `|x=0⟩ ⊗ |coin⟩` for a normalized coin state.
    pub fn new(coin: &CKet) -> Result<Self> {
        ensure_finite_ket(coin, "coin state")?;
        let dev = (coin.norm_squared() - 1.0).abs();
        if dev > STATE_NORM_TOL {
            return Err(invalid(format!("coin state not normalized (|‖φ‖²−1| = {dev:e})")));
        }
        Ok(Self::at_origin(coin))
    }

    fn at_origin(coin: &CKet) -> Self {
        WalkState {
            dim: coin.len(),
            min_pos: 0,
            max_pos: 0,
            amps: coin.iter().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn min_pos(&self) -> i64 {
        self.min_pos
    }

    pub fn max_pos(&self) -> i64 {
        self.max_pos
    }

    fn offset(&self, pos: i64) -> Option<usize> {
        (self.min_pos..=self.max_pos)
            .contains(&pos)
            .then(|| (pos - self.min_pos) as usize * self.dim)
    }

    pub fn amplitude(&self, pos: i64, coin: usize) -> Complex64 {
        match self.offset(pos) {
            Some(o) if coin < self.dim => self.amps[o + coin],
            _ => ZERO,
        }
    }

    /// Unnormalized coin vector at one site (zero outside the window).
    pub fn coin_vector(&self, pos: i64) -> CKet {
        match self.offset(pos) {
            Some(o) => CKet::from_column_slice(&self.amps[o..o + self.dim]),
            None => CKet::zeros(self.dim),
        }
    }

    pub fn probability_at(&self, pos: i64) -> f64 {
        match self.offset(pos) {
            Some(o) => self.amps[o..o + self.dim].iter().map(|z| z.norm_sqr()).sum(),
            None => 0.0,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Total squared amplitude strictly below `pos`.
    pub fn weight_below(&self, pos: i64) -> f64 {
        (self.min_pos..pos).map(|x| self.probability_at(x)).sum()
    }

    /// Position marginal over every site in the window with nonzero weight.
    pub fn distribution(&self) -> BTreeMap<i64, f64> {
        (self.min_pos..=self.max_pos)
            .map(|x| (x, self.probability_at(x)))
            .filter(|&(_, p)| p > 0.0)
            .collect()
    }

    /// Apply the layer's coins site by site.
    pub fn apply_coins(&mut self, layer: &CoinLayer) -> Result<()> {
        layer.validate(self.dim)?;
        for (&x, coin) in layer.coins() {
            let Some(o) = self.offset(x) else { continue };
            let v = CKet::from_column_slice(&self.amps[o..o + self.dim]);
            let w = coin * v;
            self.amps[o..o + self.dim].copy_from_slice(w.as_slice());
        }
        Ok(())
    }

    /// Conditional shift: coin 0 moves up, coin 1 moves down, others stay.
    pub fn translate(&mut self) {
        let d = self.dim;
        let grow_up = self.amplitude(self.max_pos, 0) != ZERO;
        let grow_down = d > 1 && self.amplitude(self.min_pos, 1) != ZERO;
        let new_min = self.min_pos - grow_down as i64;
        let new_max = self.max_pos + grow_up as i64;
        let width = (new_max - new_min + 1) as usize;
        let mut next = vec![ZERO; width * d];
        for x in self.min_pos..=self.max_pos {
            let o = (x - self.min_pos) as usize * d;
            for c in 0..d {
                let z = self.amps[o + c];
                if z == ZERO {
                    continue;
                }
                let dest = match c {
                    0 => x + 1,
                    1 => x - 1,
                    _ => x,
                };
                next[(dest - new_min) as usize * d + c] += z;
            }
        }
        self.min_pos = new_min;
        self.max_pos = new_max;
        self.amps = next;
    }

    /// One walk step: coins, then (optionally) the shift.
    pub fn step(&mut self, layer: &CoinLayer, translate: bool) -> Result<()> {
        self.apply_coins(layer)?;
        if translate {
            self.translate();
        }
        Ok(())
    }
}

fn check_program(prog: &WalkProgram, coin: &CKet) -> Result<()> {
    prog.validate()?;
    if coin.len() != prog.dim() {
        return Err(invalid(format!(
            "coin state dimension {} ≠ program dimension {}",
            coin.len(),
            prog.dim()
        )));
    }
    Ok(())
}

fn evolve(prog: &WalkProgram, mut state: WalkState, mut observe: impl FnMut(usize, &WalkState)) -> Result<WalkState> {
    for (i, layer) in prog.all_layers().enumerate() {
        state.step(layer, layer.translate())?;
        observe(i, &state);
    }
    Ok(state)
}

/// Run `prog` from `|0⟩ ⊗ coin`, calling `observe(step_index, state)` after
/// every layer (the post layer included).
pub fn run_observed(
    prog: &WalkProgram,
    coin: &CKet,
    observe: impl FnMut(usize, &WalkState),
) -> Result<WalkState> {
    check_program(prog, coin)?;
    evolve(prog, WalkState::new(coin)?, observe)
}

/// Final state and position distribution.
pub fn run(prog: &WalkProgram, coin: &CKet) -> Result<(WalkState, BTreeMap<i64, f64>)> {
    let state = run_observed(prog, coin, |_, _| {})?;
    let dist = state.distribution();
    Ok((state, dist))
}

/// Coin-space Kraus maps per final position: column `c` of `M_x` holds the
/// amplitudes at `x` obtained from the initial coin state `|c⟩`.
pub fn kraus_operators(prog: &WalkProgram) -> Result<BTreeMap<i64, CMatrix>> {
    let d = prog.dim();
    prog.validate()?;
    let finals = (0..d)
        .map(|c| evolve(prog, WalkState::at_origin(&basis_ket(d, c)), |_, _| {}))
        .collect::<Result<Vec<_>>>()?;
    let mut out: BTreeMap<i64, CMatrix> = BTreeMap::new();
    for (c, st) in finals.iter().enumerate() {
        for x in st.min_pos()..=st.max_pos() {
            let v = st.coin_vector(x);
            if v.iter().all(|z| *z == ZERO) {
                continue;
            }
            out.entry(x).or_insert_with(|| CMatrix::zeros(d, d)).set_column(c, &v);
        }
    }
    Ok(out)
}

/// Effective coin measurement realized by reading the walker position.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedPovm {
    dim: usize,
    elements: BTreeMap<i64, CMatrix>,
}

/// Induced elements summed per outcome label.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedPovm {
    pub elements: Vec<CMatrix>,
    /// Largest operator norm found at a position carrying no label.
    pub stray: f64,
}

impl InducedPovm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &BTreeMap<i64, CMatrix> {
        &self.elements
    }

    /// `Ω_x`, or the zero matrix for a position never reached.
    pub fn element(&self, position: i64) -> CMatrix {
        self.elements
            .get(&position)
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.dim, self.dim))
    }

    /// `‖Σ_x Ω_x − 𝟙‖` in operator norm.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .elements
            .values()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, e| acc + e);
        operator_norm(&(sum - identity(self.dim)))
    }

    /// Sum `Ω_x` over positions sharing a label in `outcome_positions`.
    pub fn group(&self, outcome_positions: &BTreeMap<i64, usize>, outcomes: usize) -> GroupedPovm {
        let mut elements = vec![CMatrix::zeros(self.dim, self.dim); outcomes];
        let mut stray: f64 = 0.0;
        for (x, e) in &self.elements {
            match outcome_positions.get(x) {
                Some(&l) if l < outcomes => elements[l] += e,
                _ => stray = stray.max(operator_norm(e)),
            }
        }
        GroupedPovm { elements, stray }
    }
}

/// `Ω_x = M_x† M_x` for every reachable position.
pub fn induced_povm(prog: &WalkProgram) -> Result<InducedPovm> {
    let elements = kraus_operators(prog)?
        .into_iter()
        .map(|(x, m)| (x, m.adjoint() * m))
        .collect();
    Ok(InducedPovm { dim: prog.dim(), elements })
}

/// Probability of finding the walker at `position` and the normalized coin
/// state there, conditioned on that event.
pub fn conditional_state(prog: &WalkProgram, input: &CKet, position: i64) -> Result<(f64, CKet)> {
    let (state, _) = run(prog, input)?;
    let v = state.coin_vector(position);
    let p = v.norm_squared();
    if p <= MIN_CONDITIONAL_PROBABILITY {
        return Err(Error::NoAmplitude { position, probability: p });
    }
    Ok((p, v.unscale(p.sqrt())))
}

/// Draw `shots` positions i.i.d. from the exact run distribution.
///
/// Uses ChaCha8 seeded with `seed` and inverse-CDF lookup, so a given seed
/// always reproduces the same histogram.
pub fn sample(prog: &WalkProgram, input: &CKet, shots: u64, seed: u64) -> Result<BTreeMap<i64, u64>> {
    if shots == 0 {
        return Err(invalid("shots must be at least 1"));
    }
    let (_, dist) = run(prog, input)?;
    let positions: Vec<i64> = dist.keys().copied().collect();
    let mut cdf = Vec::with_capacity(positions.len());
    let mut acc = 0.0;
    for p in dist.values() {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * acc;
        let k = cdf.partition_point(|&c| c <= u).min(positions.len() - 1);
        *hist.entry(positions[k]).or_default() += 1;
    }
    Ok(hist)
}
