//! Rectangular matrices of jets over a shared space and order.

use std::sync::Arc;

use crate::jet::jet::{Jet, JetError};
use crate::jet::space::VarSpace;
use crate::linalg;
use crate::scalar::Complex;

#[derive(Clone, Debug)]
pub struct JetMatrix {
    nrows: usize,
    ncols: usize,
    entries: Vec<Jet>,
}

impl JetMatrix {
    pub fn from_fn<F: FnMut(usize, usize) -> Jet>(nrows: usize, ncols: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(nrows * ncols);
        for r in 0..nrows {
            for c in 0..ncols {
                entries.push(f(r, c));
            }
        }
        JetMatrix {
            nrows,
            ncols,
            entries,
        }
    }

    pub fn identity(space: &Arc<VarSpace>, order: u32, n: usize) -> Self {
        JetMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Jet::one(space, order)
            } else {
                Jet::zero(space, order)
            }
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> &Jet {
        &self.entries[r * self.ncols + c]
    }

    pub fn mul(&self, other: &JetMatrix) -> JetMatrix {
        assert_eq!(self.ncols, other.nrows);
        JetMatrix::from_fn(self.nrows, other.ncols, |r, c| {
            let mut acc: Option<Jet> = None;
            for k in 0..self.ncols {
                let p = self.get(r, k).mul(other.get(k, c));
                acc = Some(match acc {
                    None => p,
                    Some(a) => a.add(&p),
                });
            }
            acc.expect("inner dimension is nonzero")
        })
    }

    /// Constant-term matrix evaluated at the origin.
    pub fn eval0(&self) -> Vec<Vec<Complex>> {
        (0..self.nrows)
            .map(|r| (0..self.ncols).map(|c| self.get(r, c).eval0()).collect())
            .collect()
    }

    /// Inverse of a square matrix of jets whose constant part is invertible:
    /// exact Gaussian elimination on the constant part, truncated Neumann
    /// series for the rest.
    pub fn invert_unit(&self) -> Result<JetMatrix, JetError> {
        assert_eq!(self.nrows, self.ncols, "matrix must be square");
        let n = self.nrows;
        let space = self.entries[0].space().clone();
        let order = self.entries.iter().map(|j| j.order()).min().unwrap();
        let c0 = self.eval0();
        let c0_inv = linalg::mat_inverse(&c0).ok_or(JetError::SingularConstantPart)?;
        let c0_inv_jets = JetMatrix::from_fn(n, n, |r, c| {
            Jet::constant(&space, order, c0_inv[r][c].clone())
        });
        // B = C0^{-1} A = I - U with U of positive valuation
        let b = c0_inv_jets.mul(self);
        let ident = JetMatrix::identity(&space, order, n);
        let u = JetMatrix::from_fn(n, n, |r, c| ident.get(r, c).sub(b.get(r, c)));
        // (I - U)^{-1} = I + U + U^2 + ... via Horner
        let mut acc = ident.clone();
        for _ in 0..order {
            acc = u.mul(&acc);
            acc = JetMatrix::from_fn(n, n, |r, c| {
                ident.get(r, c).add(acc.get(r, c)).truncate(order)
            });
        }
        Ok(acc.mul(&c0_inv_jets))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::space::VarSpace;

    #[test]
    fn identity_inverts_to_identity() {
        let sp = VarSpace::graph(&["z"], &["s"]);
        let ident = JetMatrix::identity(&sp, 4, 2);
        let inv = ident.invert_unit().unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!(inv.get(r, c).eq_terms(ident.get(r, c)));
            }
        }
    }

    #[test]
    fn scalar_one_plus_is_inverts() {
        // (1 + i s) at order 2 inverts to 1 - i s - s^2; product is I mod degree 3
        let sp = VarSpace::graph(&["z"], &["s"]);
        let s = Jet::variable(&sp, 2, 2);
        let a = JetMatrix::from_fn(1, 1, |_, _| Jet::one(&sp, 2).add(&s.scale(&Complex::i())));
        let inv = a.invert_unit().unwrap();
        let expect = Jet::one(&sp, 2)
            .sub(&s.scale(&Complex::i()))
            .sub(&s.pow(2));
        assert!(inv.get(0, 0).eq_terms(&expect));
        let back = a.mul(&inv);
        assert!(back.get(0, 0).truncate(2).eq_terms(&Jet::one(&sp, 2)));
    }

    #[test]
    fn singular_constant_part_rejected() {
        let sp = VarSpace::graph(&["z"], &["s"]);
        let z = Jet::variable(&sp, 3, 0);
        let a = JetMatrix::from_fn(1, 1, |_, _| z.clone());
        assert_eq!(a.invert_unit().unwrap_err(), JetError::SingularConstantPart);
    }
}
