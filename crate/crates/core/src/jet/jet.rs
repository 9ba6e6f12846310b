//! Sparse truncated multivariate power series at the origin.
//!
//! A jet of order K represents a function modulo terms of total degree > K.
//! Jets built from polynomial input additionally carry an `exact` flag: no
//! truncation has occurred, so the jet IS the function and derivatives do not
//! lose order. Once any operation discards a term the flag drops and the
//! order bookkeeping becomes the usual one (a derivative costs one order).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::jet::monomial::Monomial;
use crate::jet::space::{same_space, VarSpace};
use crate::scalar::{Complex, ScalarError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JetError {
    SpaceMismatch,
    UnknownVariable(String),
    /// A derivative or evaluation needed more truncation order than the jet has.
    OrderExhausted,
    /// Composition requires substituted jets with zero constant term.
    NonzeroConstantTerm(usize),
    ZeroConstantTerm,
    SingularConstantPart,
    SingularLinearPart,
    /// Operation defined only for exact polynomial jets.
    NotPolynomial,
    Scalar(ScalarError),
}

impl fmt::Display for JetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetError::SpaceMismatch => write!(f, "jets live over different variable spaces"),
            JetError::UnknownVariable(n) => write!(f, "unknown variable `{n}`"),
            JetError::OrderExhausted => write!(f, "truncation order exhausted"),
            JetError::NonzeroConstantTerm(i) => {
                write!(f, "substituted jet #{i} has a nonzero constant term")
            }
            JetError::ZeroConstantTerm => write!(f, "jet has zero constant term, not a unit"),
            JetError::SingularConstantPart => write!(f, "constant part of the matrix is singular"),
            JetError::SingularLinearPart => write!(f, "linear part of the map is singular"),
            JetError::NotPolynomial => write!(f, "operation requires an exact polynomial jet"),
            JetError::Scalar(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for JetError {}

impl From<ScalarError> for JetError {
    fn from(e: ScalarError) -> Self {
        JetError::Scalar(e)
    }
}

/// Truncated power series over a typed variable space.
#[derive(Clone)]
pub struct Jet {
    space: Arc<VarSpace>,
    order: u32,
    exact: bool,
    terms: BTreeMap<Monomial, Complex>,
}

impl Jet {
    // -------------------------------------------------------------------
    // Construction
    // -------------------------------------------------------------------

    pub fn zero(space: &Arc<VarSpace>, order: u32) -> Jet {
        Jet {
            space: space.clone(),
            order,
            exact: true,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: &Arc<VarSpace>, order: u32, c: Complex) -> Jet {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(space.len()), c);
        }
        Jet {
            space: space.clone(),
            order,
            exact: true,
            terms,
        }
    }

    pub fn one(space: &Arc<VarSpace>, order: u32) -> Jet {
        Jet::constant(space, order, Complex::one())
    }

    pub fn variable(space: &Arc<VarSpace>, order: u32, idx: usize) -> Jet {
        assert!(idx < space.len(), "variable index out of range");
        let mut j = Jet::zero(space, order);
        if order >= 1 {
            j.terms
                .insert(Monomial::var(space.len(), idx), Complex::one());
        } else {
            j.exact = false;
        }
        j
    }

    /// Normalizing constructor: drops zero coefficients, truncates to `order`
    /// (clearing `exact` if truncation discards anything).
    pub fn from_terms<I>(space: &Arc<VarSpace>, order: u32, exact: bool, iter: I) -> Jet
    where
        I: IntoIterator<Item = (Monomial, Complex)>,
    {
        let mut terms: BTreeMap<Monomial, Complex> = BTreeMap::new();
        let mut dropped = false;
        for (m, c) in iter {
            if c.is_zero() {
                continue;
            }
            if m.degree() > order {
                dropped = true;
                continue;
            }
            match terms.entry(m) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get() + &c;
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        Jet {
            space: space.clone(),
            order,
            exact: exact && !dropped,
            terms,
        }
    }

    // -------------------------------------------------------------------
    // Accessors
    // -------------------------------------------------------------------

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Order up to which coefficients are reliable; u32::MAX when exact.
    pub fn effective_order(&self) -> u32 {
        if self.exact {
            u32::MAX
        } else {
            self.order
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: &Monomial) -> Complex {
        self.terms.get(m).cloned().unwrap_or_else(Complex::zero)
    }

    /// The constant term (evaluation at the origin).
    pub fn eval0(&self) -> Complex {
        self.coeff(&Monomial::one(self.space.len()))
    }

    /// Coefficient of the degree-1 monomial in variable `idx`.
    pub fn linear_coeff(&self, idx: usize) -> Complex {
        self.coeff(&Monomial::var(self.space.len(), idx))
    }

    /// Term-map equality over the same space, ignoring order bookkeeping.
    pub fn eq_terms(&self, other: &Jet) -> bool {
        same_space(&self.space, &other.space) && self.terms == other.terms
    }

    /// Equality of all coefficients of total degree <= k.
    pub fn eq_to_order(&self, other: &Jet, k: u32) -> bool {
        if !same_space(&self.space, &other.space) {
            return false;
        }
        let up_to = |j: &Jet| -> BTreeMap<Monomial, Complex> {
            j.terms
                .iter()
                .filter(|(m, _)| m.degree() <= k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect()
        };
        up_to(self) == up_to(other)
    }

    // -------------------------------------------------------------------
    // Ring operations
    // -------------------------------------------------------------------

    fn assert_same_space(&self, other: &Jet) {
        assert!(
            same_space(&self.space, &other.space),
            "jets live over different variable spaces"
        );
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.assert_same_space(other);
        let (order, exact_in) = if self.exact && other.exact {
            (self.order.max(other.order), true)
        } else {
            (
                self.effective_order().min(other.effective_order()),
                false,
            )
        };
        // merge the smaller term map into a copy of the larger one
        let (big, small) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut terms = big.terms.clone();
        let mut dropped = false;
        terms.retain(|m, _| {
            if m.degree() <= order {
                true
            } else {
                dropped = true;
                false
            }
        });
        for (m, c) in &small.terms {
            if m.degree() > order {
                dropped = true;
                continue;
            }
            match terms.entry(m.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get() + c;
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        Jet {
            space: self.space.clone(),
            order,
            exact: exact_in && !dropped,
            terms,
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Jet {
        Jet {
            space: self.space.clone(),
            order: self.order,
            exact: self.exact,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Complex) -> Jet {
        if c.is_zero() {
            return Jet::zero(&self.space, self.order);
        }
        Jet {
            space: self.space.clone(),
            order: self.order,
            exact: self.exact,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), c * v)).collect(),
        }
    }

    fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().unwrap().is_constant()
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        self.assert_same_space(other);
        // A jet that is exactly zero annihilates even truncated factors.
        if (self.exact && self.is_zero()) || (other.exact && other.is_zero()) {
            return Jet::zero(&self.space, self.order.max(other.order));
        }
        let (bound, exact_in) = if self.exact && other.exact {
            (self.order.max(other.order), true)
        } else {
            (
                self.effective_order().min(other.effective_order()),
                false,
            )
        };
        // scalar factors short-circuit the convolution
        if self.is_constant() {
            let t = other.scale(&self.eval0()).truncate(bound);
            let exact = exact_in && t.is_exact();
            return t.with_order_flags(bound, exact);
        }
        if other.is_constant() {
            let t = self.scale(&other.eval0()).truncate(bound);
            let exact = exact_in && t.is_exact();
            return t.with_order_flags(bound, exact);
        }
        let mut acc: BTreeMap<Monomial, Complex> = BTreeMap::new();
        let mut dropped = false;
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            for (m2, c2) in &other.terms {
                if d1 + m2.degree() > bound {
                    dropped = true;
                    continue;
                }
                let m = m1.mul(m2);
                let p = c1 * c2;
                match acc.entry(m) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        if !p.is_zero() {
                            e.insert(p);
                        }
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let sum = e.get() + &p;
                        if sum.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = sum;
                        }
                    }
                }
            }
        }
        Jet {
            space: self.space.clone(),
            order: bound,
            exact: exact_in && !dropped,
            terms: acc,
        }
    }

    pub fn pow(&self, n: u32) -> Jet {
        let mut result = Jet::one(&self.space, self.order);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Keep only terms of degree <= k.
    pub fn truncate(&self, k: u32) -> Jet {
        let order = self.order.min(k);
        let mut dropped = false;
        let terms: BTreeMap<Monomial, Complex> = self
            .terms
            .iter()
            .filter(|(m, _)| {
                if m.degree() <= order {
                    true
                } else {
                    dropped = true;
                    false
                }
            })
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Jet {
            space: self.space.clone(),
            order,
            exact: self.exact && !dropped,
            terms,
        }
    }

    // -------------------------------------------------------------------
    // Differentiation and conjugation
    // -------------------------------------------------------------------

    /// Formal partial derivative with respect to variable `idx`.
    pub fn deriv(&self, idx: usize) -> Result<Jet, JetError> {
        if idx >= self.space.len() {
            return Err(JetError::UnknownVariable(format!("#{idx}")));
        }
        let (order, exact) = if self.exact {
            (self.order, true)
        } else if self.order == 0 {
            return Err(JetError::OrderExhausted);
        } else {
            (self.order - 1, false)
        };
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if let Some(down) = m.step_down(idx) {
                let e = m.exp(idx);
                let scaled = c * &Complex::from_int(e as i64);
                if !scaled.is_zero() {
                    terms.insert(down, scaled);
                }
            }
        }
        Ok(Jet {
            space: self.space.clone(),
            order,
            exact,
            terms,
        })
    }

    /// Formal conjugation: swap holomorphic/antiholomorphic exponents and
    /// conjugate every coefficient. An involution.
    pub fn conj_swap(&self) -> Jet {
        let perm: Vec<usize> = (0..self.space.len()).map(|i| self.space.partner(i)).collect();
        Jet {
            space: self.space.clone(),
            order: self.order,
            exact: self.exact,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.permute(&perm), c.conj()))
                .collect(),
        }
    }

    /// Real in the CR sense: fixed by formal conjugation.
    pub fn is_real(&self) -> bool {
        self.eq_terms(&self.conj_swap())
    }

    // -------------------------------------------------------------------
    // Polynomial-only operations
    // -------------------------------------------------------------------

    /// Exact evaluation at a point, valid for exact polynomial jets only.
    pub fn eval_point(&self, point: &[Complex]) -> Result<Complex, JetError> {
        if !self.exact {
            return Err(JetError::NotPolynomial);
        }
        assert_eq!(point.len(), self.space.len());
        let mut total = Complex::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (idx, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    v = &v * &point[idx];
                }
            }
            total = &total + &v;
        }
        Ok(total)
    }

    /// Taylor shift: substitute each variable v by v + point[v]. Defined for
    /// exact polynomial jets; degrees are preserved so exactness survives.
    pub fn shift(&self, point: &[Complex]) -> Result<Jet, JetError> {
        if !self.exact {
            return Err(JetError::NotPolynomial);
        }
        assert_eq!(point.len(), self.space.len());
        let mut total = Jet::zero(&self.space, self.order);
        for (m, c) in &self.terms {
            let mut term = Jet::constant(&self.space, self.order, c.clone());
            for (idx, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let shifted_var = Jet::variable(&self.space, self.order, idx)
                    .add(&Jet::constant(&self.space, self.order, point[idx].clone()));
                term = term.mul(&shifted_var.pow(e));
            }
            total = total.add(&term);
        }
        debug_assert!(total.exact, "shift of a polynomial must stay exact");
        Ok(total)
    }

    // -------------------------------------------------------------------
    // Unit inversion
    // -------------------------------------------------------------------

    /// Multiplicative inverse of a unit jet (nonzero constant term), by exact
    /// constant inversion plus a truncated Neumann series.
    pub fn invert_unit(&self) -> Result<Jet, JetError> {
        let c0 = self.eval0();
        if c0.is_zero() {
            return Err(JetError::ZeroConstantTerm);
        }
        let c0_inv = c0.inv()?;
        if self.term_count() == 1 {
            // plain constant: the inverse is exact
            return Ok(Jet::constant(&self.space, self.order, c0_inv));
        }
        let order = self.order;
        let u = Jet::one(&self.space, order).sub(&self.scale(&c0_inv).truncate(order));
        // geometric series via Horner: acc = 1 + u*acc
        let one = Jet::one(&self.space, order);
        let mut acc = one.clone();
        for _ in 0..order {
            acc = one.add(&u.mul(&acc).truncate(order));
        }
        let mut result = acc.scale(&c0_inv);
        // the series is a truncation of an infinite expansion
        result.exact = false;
        result.order = order;
        Ok(result)
    }

    /// Force the truncation bookkeeping to (order, exact); internal use.
    pub(crate) fn with_order_flags(mut self, order: u32, exact: bool) -> Jet {
        self.order = order;
        self.exact = exact;
        self.terms.retain(|m, _| m.degree() <= order);
        self
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space)
            && self.order == other.order
            && self.exact == other.exact
            && self.terms == other.terms
    }
}

impl Eq for Jet {}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Jet(order {}{}; {})",
            self.order,
            if self.exact { ", exact" } else { "" },
            crate::expr::jet_to_string(self)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn quadric_space() -> Arc<VarSpace> {
        VarSpace::graph(&["z"], &["s"])
    }

    fn var(sp: &Arc<VarSpace>, idx: usize, order: u32) -> Jet {
        Jet::variable(sp, order, idx)
    }

    #[test]
    fn product_z_zbar() {
        let sp = quadric_space();
        let z = var(&sp, 0, 4);
        let zb = var(&sp, 1, 4);
        let p = z.mul(&zb);
        assert_eq!(p.term_count(), 1);
        assert_eq!(
            p.coeff(&Monomial::from_exps(vec![1, 1, 0])),
            Complex::one()
        );
    }

    #[test]
    fn truncated_geometric_identity() {
        // (1+z)(1 - z + z^2 - z^3 + z^4) = 1 at order 4
        let sp = quadric_space();
        let z = var(&sp, 0, 4);
        let a = Jet::one(&sp, 4).add(&z);
        let mut b = Jet::one(&sp, 4);
        let mut sign = -1i64;
        for e in 1..=4u32 {
            b = b.add(&z.pow(e).scale(&Complex::from_int(sign)));
            sign = -sign;
        }
        // the alternating series is a truncation, so mark it as such
        let b = b.with_order_flags(4, false);
        let p = a.mul(&b);
        assert!(p.eq_terms(&Jet::one(&sp, 4)));
        assert!(!p.is_exact());
    }

    #[test]
    fn truncation_kills_high_degree_product() {
        // (z^2 conj(z)^2) * (z conj(z)) = 0 at order 4
        let sp = quadric_space();
        let z = var(&sp, 0, 4);
        let zb = var(&sp, 1, 4);
        let a = z.pow(2).mul(&zb.pow(2));
        let b = z.mul(&zb);
        let p = a.mul(&b);
        assert!(p.is_zero());
        assert!(!p.is_exact());
    }

    #[test]
    fn derivative_examples() {
        let sp = quadric_space();
        let z = var(&sp, 0, 6);
        let zb = var(&sp, 1, 6);
        let s = var(&sp, 2, 6);

        // d/dzbar (z^2 zbar^2) = 2 z^2 zbar
        let j = z.pow(2).mul(&zb.pow(2));
        let dj = j.deriv(1).unwrap();
        let expect = z.pow(2).mul(&zb).scale(&Complex::from_int(2));
        assert!(dj.eq_terms(&expect));
        assert!(dj.is_exact());

        // d/ds (s + i z zbar) = 1
        let f = s.add(&z.mul(&zb).scale(&Complex::i()));
        assert!(f.deriv(2).unwrap().eq_terms(&Jet::one(&sp, 6)));

        // d/dzbar d/dzbar (-zbar^2) = -2
        let g = zb.pow(2).neg();
        let gg = g.deriv(1).unwrap().deriv(1).unwrap();
        assert!(gg.eq_terms(&Jet::constant(&sp, 6, Complex::from_int(-2))));
    }

    #[test]
    fn derivative_order_bookkeeping() {
        let sp = quadric_space();
        let z = var(&sp, 0, 3);
        let inexact = z.clone().with_order_flags(3, false);
        assert_eq!(inexact.deriv(0).unwrap().order(), 2);
        assert_eq!(z.deriv(0).unwrap().order(), 3);
        let tiny = z.with_order_flags(0, false);
        assert_eq!(tiny.deriv(0), Err(JetError::OrderExhausted));
    }

    #[test]
    fn invert_unit_examples() {
        let sp = quadric_space();
        assert!(Jet::one(&sp, 5)
            .invert_unit()
            .unwrap()
            .eq_terms(&Jet::one(&sp, 5)));

        // invert(1 + s) at order 3 = 1 - s + s^2 - s^3
        let s = var(&sp, 2, 3);
        let inv = Jet::one(&sp, 3).add(&s).invert_unit().unwrap();
        let mut expect = Jet::one(&sp, 3);
        expect = expect.sub(&s);
        expect = expect.add(&s.pow(2));
        expect = expect.sub(&s.pow(3));
        assert!(inv.eq_terms(&expect));

        // invert(2i) = -i/2
        let two_i = Jet::constant(&sp, 3, Complex::new(crate::scalar::Surd::zero(), crate::scalar::Surd::from_int(2)));
        let inv = two_i.invert_unit().unwrap();
        let expect = Jet::constant(
            &sp,
            3,
            Complex::new(crate::scalar::Surd::zero(), crate::scalar::Surd::from_rational(rat(-1, 2))),
        );
        assert_eq!(inv, expect);
        assert!(inv.is_exact());

        // zero constant term is rejected
        let z = var(&sp, 0, 3);
        assert_eq!(z.invert_unit().unwrap_err(), JetError::ZeroConstantTerm);
    }

    #[test]
    fn conj_swap_examples() {
        let sp = quadric_space();
        let z = var(&sp, 0, 4);
        let zb = var(&sp, 1, 4);
        let s = var(&sp, 2, 4);

        assert!(z.pow(2).conj_swap().eq_terms(&zb.pow(2)));

        // conj(i z zbar + s) = -i z zbar + s
        let f = z.mul(&zb).scale(&Complex::i()).add(&s);
        let g = z.mul(&zb).scale(&-&Complex::i()).add(&s);
        assert!(f.conj_swap().eq_terms(&g));
        assert!(f.conj_swap().conj_swap().eq_terms(&f));
        assert!(!f.is_real());
        assert!(z.mul(&zb).is_real());
    }

    #[test]
    fn shift_expands_binomially() {
        let sp = VarSpace::ambient(&["Z"]);
        let z = Jet::variable(&sp, 4, 0);
        // (Z+1)^2 = Z^2 + 2Z + 1
        let shifted = z.pow(2).shift(&[Complex::one(), Complex::one()]).unwrap();
        let expect = z
            .pow(2)
            .add(&z.scale(&Complex::from_int(2)))
            .add(&Jet::one(&sp, 4));
        assert!(shifted.eq_terms(&expect));
        assert!(shifted.is_exact());
    }

    #[test]
    fn eval0_examples() {
        let sp = quadric_space();
        let zb = var(&sp, 1, 4);
        assert_eq!(zb.scale(&Complex::from_int(-2)).eval0(), Complex::zero());
        let f = Jet::constant(&sp, 4, Complex::from_int(-2)).add(&var(&sp, 0, 4));
        assert_eq!(f.eval0(), Complex::from_int(-2));
        let c = Complex::new(crate::scalar::Surd::zero(), crate::scalar::Surd::from_rational(rat(-1, 2)));
        assert_eq!(Jet::constant(&sp, 4, c.clone()).eval0(), c);
    }
}
