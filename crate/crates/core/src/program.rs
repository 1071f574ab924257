//! Walk programs: ordered coin layers plus the position → outcome map.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::linalg::{unitarity_residual, CMatrix};

/// Coins must be unitary to this level in max-entry norm.
pub const UNITARY_TOL: f64 = 1e-10;

/// Position-dependent coins for one step. Positions not listed carry the
/// identity. `translate` says whether the conditional shift follows.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinLayer {
    coins: BTreeMap<i64, CMatrix>,
    translate: bool,
}

impl Default for CoinLayer {
    fn default() -> Self {
        CoinLayer::new()
    }
}

impl CoinLayer {
    /// Empty layer followed by a translation.
    pub fn new() -> Self {
        CoinLayer { coins: BTreeMap::new(), translate: true }
    }

    /// Empty layer with no translation afterwards.
    pub fn stationary() -> Self {
        CoinLayer { coins: BTreeMap::new(), translate: false }
    }

    pub fn with(mut self, position: i64, coin: CMatrix) -> Self {
        self.insert(position, coin);
        self
    }

    pub fn insert(&mut self, position: i64, coin: CMatrix) {
        self.coins.insert(position, coin);
    }

    pub fn coin(&self, position: i64) -> Option<&CMatrix> {
        self.coins.get(&position)
    }

    pub fn coins(&self) -> &BTreeMap<i64, CMatrix> {
        &self.coins
    }

    pub fn translate(&self) -> bool {
        self.translate
    }

    pub fn set_translate(&mut self, translate: bool) {
        self.translate = translate;
    }

    /// Checks every stored coin is a `d×d` unitary.
    pub fn validate(&self, d: usize) -> Result<()> {
        for (&x, c) in &self.coins {
            if c.nrows() != d || c.ncols() != d {
                return Err(invalid(format!(
                    "coin at x={x} is {}×{}, expected {d}×{d}",
                    c.nrows(),
                    c.ncols()
                )));
            }
            let r = unitarity_residual(c);
            if !(r <= UNITARY_TOL) {
                return Err(invalid(format!("coin at x={x} is not unitary (residual {r:e})")));
            }
        }
        Ok(())
    }
}

/// A compiled measurement: walk on the line for `layers.len()` steps, then
/// an optional translation-free `post_layer`, then read the position.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkProgram {
    dim: usize,
    layers: Vec<CoinLayer>,
    outcome_positions: BTreeMap<i64, usize>,
    post_layer: Option<CoinLayer>,
}

impl WalkProgram {
    pub fn new(dim: usize) -> Self {
        WalkProgram {
            dim,
            layers: Vec::new(),
            outcome_positions: BTreeMap::new(),
            post_layer: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layers(&self) -> &[CoinLayer] {
        &self.layers
    }

    pub fn push_layer(&mut self, layer: CoinLayer) {
        self.layers.push(layer);
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Labels attached to final walker positions.
    pub fn outcome_positions(&self) -> &BTreeMap<i64, usize> {
        &self.outcome_positions
    }

    pub fn set_outcome(&mut self, position: i64, label: usize) {
        self.outcome_positions.insert(position, label);
    }

    /// Replace every label `l` by `map[l]`, e.g. to go from rank-1 item
    /// indices back to the outcomes of a source POVM.
    pub fn relabel_outcomes(&mut self, map: &[usize]) -> Result<()> {
        for label in self.outcome_positions.values_mut() {
            *label = *map
                .get(*label)
                .ok_or_else(|| invalid(format!("no relabelling for outcome {label}")))?;
        }
        Ok(())
    }

    pub fn post_layer(&self) -> Option<&CoinLayer> {
        self.post_layer.as_ref()
    }

    pub fn set_post_layer(&mut self, mut layer: CoinLayer) {
        layer.set_translate(false);
        self.post_layer = Some(layer);
    }

    /// Every layer in execution order, the post layer last.
    pub fn all_layers(&self) -> impl Iterator<Item = &CoinLayer> {
        self.layers.iter().chain(self.post_layer.iter())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(invalid(format!("walk programs need coin dimension ≥ 2, got {}", self.dim)));
        }
        for (i, layer) in self.all_layers().enumerate() {
            layer
                .validate(self.dim)
                .map_err(|e| invalid(format!("layer {i}: {e}")))?;
        }
        if self.post_layer.as_ref().is_some_and(CoinLayer::translate) {
            return Err(invalid("post layer must not translate"));
        }
        Ok(())
    }
}
