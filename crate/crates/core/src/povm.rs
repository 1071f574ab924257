//! POVM data model: validation, Born-rule probabilities and rank-1
//! decomposition.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::linalg::{
    ensure_finite, ensure_finite_ket, fix_phase, hermitian_eigen, identity, operator_norm, outer,
    CKet, CMatrix,
};

/// Ordered list of `d×d` POVM elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<CMatrix>,
}

/// Residuals measured by [`Povm::validate`]; all in operator norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub hermiticity_residual: f64,
    /// `max(0, −λ_min)` over all elements.
    pub psd_violation: f64,
    pub completeness_residual: f64,
    pub pass: bool,
}

impl Povm {
    /// Builds a POVM after checking shapes and finiteness. Use
    /// [`Povm::validate`] for the physical constraints.
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements.first().ok_or_else(|| invalid("POVM has no elements"))?;
        let dim = first.nrows();
        for (i, e) in elements.iter().enumerate() {
            ensure_finite(e, "POVM element")?;
            if e.nrows() != dim || e.ncols() != dim {
                return Err(invalid(format!(
                    "POVM element {i} is {}×{}, expected {dim}×{dim}",
                    e.nrows(),
                    e.ncols()
                )));
            }
        }
        Ok(Povm { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut herm: f64 = 0.0;
        let mut psd: f64 = 0.0;
        let mut sum = CMatrix::zeros(self.dim, self.dim);
        for e in &self.elements {
            herm = herm.max(operator_norm(&(e - e.adjoint())));
            let (values, _) = hermitian_eigen(e);
            psd = psd.max(-values[0]);
            sum += e;
        }
        let complete = operator_norm(&(sum - identity(self.dim)));
        ValidationReport {
            hermiticity_residual: herm,
            psd_violation: psd,
            completeness_residual: complete,
            pass: herm <= tol && psd <= tol && complete <= tol,
        }
    }

    fn ensure_valid(&self, tol: f64) -> Result<()> {
        let r = self.validate(tol);
        if r.pass {
            Ok(())
        } else {
            Err(invalid(format!(
                "not a valid POVM: hermiticity {:e}, psd violation {:e}, completeness {:e}",
                r.hermiticity_residual, r.psd_violation, r.completeness_residual
            )))
        }
    }
}

/// A state to be measured: a unit ket or a unit-trace density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(CKet),
    Mixed(CMatrix),
}

impl QuantumState {
    fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(v) => v.len(),
            QuantumState::Mixed(m) => m.nrows(),
        }
    }
}

/// Born-rule outcome probabilities `Tr(ρ Eᵢ)`.
///
/// Entries below `−tol` are an error; entries in `[−tol, 0)` are clamped to 0.
pub fn born_probabilities(p: &Povm, state: &QuantumState, tol: f64) -> Result<Vec<f64>> {
    p.ensure_valid(tol)?;
    if state.dim() != p.dim() {
        return Err(invalid(format!("state dimension {} ≠ POVM dimension {}", state.dim(), p.dim())));
    }
    let raw: Vec<f64> = match state {
        QuantumState::Pure(v) => {
            ensure_finite_ket(v, "state")?;
            let norm_dev = (v.norm_squared() - 1.0).abs();
            if norm_dev > tol {
                return Err(invalid(format!("state not normalized (|‖ψ‖²−1| = {norm_dev:e})")));
            }
            p.elements.iter().map(|e| v.dotc(&(e * v)).re).collect()
        }
        QuantumState::Mixed(rho) => {
            ensure_finite(rho, "density matrix")?;
            if !rho.is_square() {
                return Err(invalid("density matrix is not square"));
            }
            let trace_dev = (rho.trace() - Complex64::from(1.0)).norm();
            if trace_dev > tol {
                return Err(invalid(format!("density matrix trace deviates from 1 by {trace_dev:e}")));
            }
            if operator_norm(&(rho - rho.adjoint())) > tol {
                return Err(invalid("density matrix is not Hermitian"));
            }
            p.elements.iter().map(|e| (rho * e).trace().re).collect()
        }
    };
    if let Some((i, &v)) = raw.iter().enumerate().find(|(_, &v)| v < -tol) {
        return Err(invalid(format!("negative probability {v:e} for outcome {i}")));
    }
    Ok(raw.into_iter().map(|v| v.max(0.0)).collect())
}

/// One weighted projector `a |ψ⟩⟨ψ|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Item {
    pub weight: f64,
    pub ket: CKet,
}

impl Rank1Item {
    pub fn new(weight: f64, ket: CKet) -> Self {
        Rank1Item { weight, ket }
    }

    pub fn element(&self) -> CMatrix {
        outer(&self.ket, &self.ket) * Complex64::from(self.weight)
    }
}

/// Rank-1 POVM with provenance back to the elements of a source POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Povm {
    dim: usize,
    items: Vec<Rank1Item>,
    outcome_map: Vec<usize>,
    /// Number of source outcomes, including any dropped zero elements.
    outcomes: usize,
}

impl Rank1Povm {
    /// Builds and checks all rank-1 invariants at tolerance `tol`.
    pub fn new(dim: usize, items: Vec<Rank1Item>, outcome_map: Vec<usize>, tol: f64) -> Result<Self> {
        if items.is_empty() {
            return Err(invalid("rank-1 POVM has no items"));
        }
        if outcome_map.len() != items.len() {
            return Err(invalid(format!(
                "outcome map has {} entries for {} items",
                outcome_map.len(),
                items.len()
            )));
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for (i, it) in items.iter().enumerate() {
            if it.ket.len() != dim {
                return Err(invalid(format!("item {i} has dimension {} ≠ {dim}", it.ket.len())));
            }
            ensure_finite_ket(&it.ket, "rank-1 item")?;
            if !(it.weight > 0.0 && it.weight <= 1.0 + tol) {
                return Err(invalid(format!("item {i} weight {} outside (0, 1]", it.weight)));
            }
            let dev = (it.ket.norm() - 1.0).abs();
            if dev > tol {
                return Err(invalid(format!("item {i} ket not normalized (deviation {dev:e})")));
            }
            sum += it.element();
        }
        let complete = operator_norm(&(sum - identity(dim)));
        if complete > tol {
            return Err(invalid(format!("rank-1 items do not sum to identity (residual {complete:e})")));
        }
        let outcomes = outcome_map.iter().copied().max().map_or(0, |m| m + 1);
        Ok(Rank1Povm { dim, items, outcome_map, outcomes })
    }

    /// Items map one-to-one onto outcomes `0..n`.
    pub fn from_items(dim: usize, items: Vec<Rank1Item>, tol: f64) -> Result<Self> {
        let map = (0..items.len()).collect();
        Rank1Povm::new(dim, items, map, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn items(&self) -> &[Rank1Item] {
        &self.items
    }

    pub fn outcome_map(&self) -> &[usize] {
        &self.outcome_map
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Number of source outcomes; zero elements of the source count too.
    pub fn outcome_count(&self) -> usize {
        self.outcomes
    }

    /// Sum items per outcome to recover the source POVM.
    pub fn regroup(&self) -> Vec<CMatrix> {
        let mut out = vec![CMatrix::zeros(self.dim, self.dim); self.outcome_count()];
        for (it, &o) in self.items.iter().zip(&self.outcome_map) {
            out[o] += it.element();
        }
        out
    }

    /// Each item as its own POVM element.
    pub fn to_povm(&self) -> Povm {
        Povm {
            dim: self.dim,
            elements: self.items.iter().map(Rank1Item::element).collect(),
        }
    }
}

/// Lexicographic order on amplitudes, larger `(re, im)` first.
fn amplitude_order(a: &CKet, b: &CKet) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Split every element into weighted projectors on its eigenvectors.
///
/// Eigenpairs with eigenvalue `≤ tol` are dropped. Within one element the
/// items are ordered by descending eigenvalue, with ties (within `tol`)
/// broken by [`amplitude_order`]. Every ket is phase-fixed so its
/// largest-magnitude amplitude is real positive. A rank-1 element keeps its
/// trace as the weight.
pub fn decompose_rank1(p: &Povm, tol: f64) -> Result<Rank1Povm> {
    p.ensure_valid(tol)?;
    let d = p.dim();
    let mut items = Vec::new();
    let mut outcome_map = Vec::new();
    for (idx, e) in p.elements().iter().enumerate() {
        let (values, vectors) = hermitian_eigen(e);
        let top = values[d - 1];
        if top > 1.0 + tol {
            return Err(invalid(format!("element {idx} exceeds the identity (eigenvalue {top})")));
        }
        let mut pairs: Vec<(f64, CKet)> = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > tol)
            .map(|(k, &v)| {
                let mut ket = vectors.column(k).into_owned();
                let n = ket.norm();
                ket.unscale_mut(n);
                fix_phase(&mut ket);
                (v, ket)
            })
            .collect();
        pairs.sort_by(|(va, ka), (vb, kb)| {
            if (va - vb).abs() > tol {
                vb.total_cmp(va)
            } else {
                amplitude_order(ka, kb)
            }
        });
        if pairs.len() == 1 {
            pairs[0].0 = e.trace().re;
        }
        for (w, ket) in pairs {
            items.push(Rank1Item::new(w.min(1.0), ket));
            outcome_map.push(idx);
        }
    }
    // Dropping sub-tolerance eigenvalues can cost up to d·tol per element.
    let slack = tol * (1 + p.len() * d) as f64;
    let mut r = Rank1Povm::new(d, items, outcome_map, slack)?;
    r.outcomes = p.len();
    Ok(r)
}
