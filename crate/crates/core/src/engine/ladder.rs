//! Span ladders of iterated CR derivatives of pulled-back gradients.
//!
//! For each multiindex alpha (graded-lex, fields applied as
//! Lambda_1^{a_1} ... Lambda_n^{a_n}, leftmost outermost) and each defining
//! function index l, the value at the origin of Lambda^alpha applied to the
//! pulled-back gradient row is a vector in the target space. The ladder
//! accumulates these by exact row reduction and records dimensions per
//! derivative order together with the spanning witnesses.

use std::collections::HashMap;

use crate::engine::fields::{apply_field, CrVectorField};
use crate::engine::EngineError;
use crate::jet::{compositions, Jet, JetError, JetMatrix};
use crate::linalg::RowBasis;
use crate::scalar::Complex;

/// A multiindex and gradient row index that contributed a new dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub alpha: Vec<u32>,
    /// 0-based index of the defining function.
    pub rho_index: usize,
}

#[derive(Clone, Debug)]
pub struct EkLadder {
    /// Dimension of the target ambient space.
    pub target_dim: usize,
    /// dims[k] = dim E_k(0) for k = 0..=k_reached.
    pub dims: Vec<usize>,
    /// Basis rows in insertion order; the first dims[k] of them span E_k(0).
    pub generators: Vec<Vec<Complex>>,
    /// One witness per generator, in the same order.
    pub witnesses: Vec<Witness>,
    /// counts[k] = number of multiindices with 1 <= |alpha| <= k.
    pub multiindex_counts: Vec<usize>,
}

impl EkLadder {
    /// Smallest k with dim E_k = N', if reached.
    pub fn full_rank_at(&self) -> Option<u32> {
        self.dims
            .iter()
            .position(|&d| d == self.target_dim)
            .map(|k| k as u32)
    }

    /// Generator rows spanning E_k(0).
    pub fn generators_at(&self, k: usize) -> &[Vec<Complex>] {
        &self.generators[..self.dims[k.min(self.dims.len() - 1)]]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Nondegenerate { k0: u32 },
    DegenerateUpTo { k_max: u32 },
}

#[derive(Clone, Debug)]
pub struct NondegeneracyReport {
    pub verdict: Verdict,
    pub ladder: EkLadder,
    /// Number of CR fields (CR dimension of the source).
    pub n_fields: usize,
    pub k_max_requested: u32,
}

impl NondegeneracyReport {
    pub fn dims(&self) -> &[usize] {
        &self.ladder.dims
    }
}

/// Compute the ladder up to derivative order `k_max`. With `stop_at_full`
/// the enumeration stops at the first order whose span is all of the target
/// space.
pub fn ek_spaces(
    grad: &JetMatrix,
    fields: &[CrVectorField],
    k_max: u32,
    stop_at_full: bool,
) -> Result<EkLadder, EngineError> {
    let d_prime = grad.nrows();
    let n_prime = grad.ncols();
    let n = fields.len();

    let mut basis = RowBasis::new(n_prime);
    let mut generators: Vec<Vec<Complex>> = Vec::new();
    let mut witnesses: Vec<Witness> = Vec::new();
    let mut dims: Vec<usize> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut count_so_far = 0usize;

    // jets of Lambda^alpha applied to every gradient entry, for the previous
    // grade; keyed by the multiindex exponents
    let mut prev: HashMap<Vec<u32>, Vec<Vec<Jet>>> = HashMap::new();

    for k in 0..=k_max {
        // a term of degree m feeds the value at 0 only after at least m more
        // field applications, so grade-k jets can be capped at degree
        // k_max - k without changing any later evaluation
        let cap = k_max - k;
        let mut level: HashMap<Vec<u32>, Vec<Vec<Jet>>> = HashMap::new();
        for alpha in compositions(n, k) {
            let exps = alpha.exps().to_vec();
            let rows: Vec<Vec<Jet>> = if k == 0 {
                (0..d_prime)
                    .map(|l| {
                        (0..n_prime)
                            .map(|nu| grad.get(l, nu).truncate(cap))
                            .collect()
                    })
                    .collect()
            } else {
                let j = exps
                    .iter()
                    .position(|&e| e > 0)
                    .expect("grade-k multiindex has a nonzero entry");
                let mut parent = exps.clone();
                parent[j] -= 1;
                let parent_rows = prev
                    .get(&parent)
                    .expect("parent multiindex computed in previous grade");
                let mut rows = Vec::with_capacity(d_prime);
                for parent_row in parent_rows {
                    let row: Vec<Jet> = parent_row
                        .iter()
                        .map(|jet| apply_field(&fields[j], jet).map(|r| r.truncate(cap)))
                        .collect::<Result<_, JetError>>()
                        .map_err(|e| match e {
                            JetError::OrderExhausted => EngineError::OrderExhausted {
                                alpha: exps.clone(),
                            },
                            other => EngineError::Jet(other),
                        })?;
                    rows.push(row);
                }
                rows
            };
            if k > 0 {
                count_so_far += 1;
            }
            for (l, row_jets) in rows.iter().enumerate() {
                let row: Vec<Complex> = row_jets.iter().map(|j| j.eval0()).collect();
                if basis.insert(row.clone()) {
                    generators.push(row);
                    witnesses.push(Witness {
                        alpha: exps.clone(),
                        rho_index: l,
                    });
                }
            }
            level.insert(exps, rows);
        }
        dims.push(basis.rank());
        counts.push(count_so_far);
        if stop_at_full && basis.rank() == n_prime {
            break;
        }
        prev = level;
    }

    Ok(EkLadder {
        target_dim: n_prime,
        dims,
        generators,
        witnesses,
        multiindex_counts: counts,
    })
}

/// Ladder plus verdict.
pub fn nondegeneracy_report(
    grad: &JetMatrix,
    fields: &[CrVectorField],
    k_max: u32,
    stop_at_full: bool,
) -> Result<NondegeneracyReport, EngineError> {
    let ladder = ek_spaces(grad, fields, k_max, stop_at_full)?;
    let verdict = match ladder.full_rank_at() {
        Some(k0) => Verdict::Nondegenerate { k0 },
        None => Verdict::DegenerateUpTo { k_max },
    };
    Ok(NondegeneracyReport {
        verdict,
        ladder,
        n_fields: fields.len(),
        k_max_requested: k_max,
    })
}

