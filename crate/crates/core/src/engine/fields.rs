//! The tangential CR vector-field basis of a graph manifold and its action
//! on jets.

use crate::engine::EngineError;
use crate::jet::{Jet, JetError, JetMatrix};
use crate::manifold::GraphManifold;
use crate::scalar::Complex;

/// A CR vector field sum a_j d/d(conj z_j) + sum b_mu d/d(s_mu) with jet
/// coefficients over the graph space.
#[derive(Clone, Debug)]
pub struct CrVectorField {
    pub dzbar: Vec<Jet>,
    pub ds: Vec<Jet>,
    zbar_indices: Vec<usize>,
    s_indices: Vec<usize>,
}

/// The basis Lambda_j = d/d(conj z_j) - i (phi_zbar)^T (I + i phi_s)^{-1} d/ds.
///
/// The constant part of I + i phi_s is the identity (d phi(0) = 0), so the
/// matrix inversion cannot fail.
pub fn cr_basis(m: &GraphManifold) -> Result<Vec<CrVectorField>, EngineError> {
    let n = m.n();
    let d = m.d();
    let gs = m.graph_space();
    let k = m.order();
    let i_unit = Complex::i();

    // phi_s and the unit matrix I + i phi_s
    let mut correction = Vec::with_capacity(d * d);
    for mu in 0..d {
        for nu in 0..d {
            let dphi = m.phi()[mu].deriv(m.s_index(nu))?;
            let mut entry = dphi.scale(&i_unit);
            if mu == nu {
                entry = entry.add(&Jet::one(gs, k));
            }
            correction.push(entry);
        }
    }
    let unit = JetMatrix::from_fn(d, d, |r, c| correction[r * d + c].clone());
    let unit_inv = unit.invert_unit()?;

    // rows of -i (phi_zbar)^T (I + i phi_s)^{-1}
    let zbar_indices: Vec<usize> = (0..n).map(|j| m.zbar_index(j)).collect();
    let s_indices: Vec<usize> = (0..d).map(|mu| m.s_index(mu)).collect();
    let mut fields = Vec::with_capacity(n);
    for j in 0..n {
        let mut phi_zbar_j = Vec::with_capacity(d);
        for mu in 0..d {
            phi_zbar_j.push(m.phi()[mu].deriv(zbar_indices[j])?);
        }
        let mut ds = Vec::with_capacity(d);
        for mu in 0..d {
            let mut acc = Jet::zero(gs, k);
            for (nu, dphi) in phi_zbar_j.iter().enumerate() {
                acc = acc.add(&dphi.mul(unit_inv.get(nu, mu)));
            }
            ds.push(acc.scale(&-&i_unit));
        }
        let dzbar = (0..n)
            .map(|jj| {
                if jj == j {
                    Jet::one(gs, k)
                } else {
                    Jet::zero(gs, k)
                }
            })
            .collect();
        fields.push(CrVectorField {
            dzbar,
            ds,
            zbar_indices: zbar_indices.clone(),
            s_indices: s_indices.clone(),
        });
    }
    Ok(fields)
}

/// Apply a CR vector field to a jet over the graph space.
pub fn apply_field(field: &CrVectorField, f: &Jet) -> Result<Jet, JetError> {
    let mut acc = Jet::zero(f.space(), f.order());
    for (coeff, &idx) in field.dzbar.iter().zip(&field.zbar_indices) {
        if coeff.is_exact() && coeff.is_zero() {
            continue;
        }
        acc = acc.add(&coeff.mul(&f.deriv(idx)?));
    }
    for (coeff, &idx) in field.ds.iter().zip(&field.s_indices) {
        if coeff.is_exact() && coeff.is_zero() {
            continue;
        }
        acc = acc.add(&coeff.mul(&f.deriv(idx)?));
    }
    Ok(acc)
}
