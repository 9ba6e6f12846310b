//! Composition of jets and formal inversion of holomorphic map germs.

use std::sync::Arc;

use crate::jet::jet::{Jet, JetError};
use crate::jet::monomial::Monomial;
use crate::jet::space::{same_space, VarSpace};
use crate::linalg;
use crate::scalar::Complex;

/// Exact truncated composition outer(assignment).
///
/// `assignment` maps every variable of outer's space (by index) to a jet over
/// a common target space; every jet substituted for a variable that actually
/// occurs in `outer` must have zero constant term. Coefficients of the result
/// up to the working order are exactly those of the analytic composition.
pub fn compose(outer: &Jet, assignment: &[Jet]) -> Result<Jet, JetError> {
    let nvars = outer.space().len();
    assert_eq!(assignment.len(), nvars, "assignment must cover every variable");

    let target: Arc<VarSpace> = if nvars == 0 {
        outer.space().clone()
    } else {
        assignment[0].space().clone()
    };
    for a in assignment {
        if !same_space(a.space(), &target) {
            return Err(JetError::SpaceMismatch);
        }
    }

    for (idx, a) in assignment.iter().enumerate() {
        if !a.eval0().is_zero() {
            return Err(JetError::NonzeroConstantTerm(idx));
        }
    }
    // variables that actually occur drive the order bookkeeping
    let mut occurs = vec![false; nvars];
    for (m, _) in outer.terms() {
        for (idx, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                occurs[idx] = true;
            }
        }
    }

    let all_exact = outer.is_exact()
        && occurs
            .iter()
            .enumerate()
            .all(|(idx, &o)| !o || assignment[idx].is_exact());
    let bound = if all_exact {
        let mut b = outer.order();
        for (idx, &o) in occurs.iter().enumerate() {
            if o {
                b = b.max(assignment[idx].order());
            }
        }
        b
    } else {
        let mut b = outer.effective_order();
        for (idx, &o) in occurs.iter().enumerate() {
            if o {
                b = b.min(assignment[idx].effective_order());
            }
        }
        b
    };

    let substituted: Vec<Jet> = assignment.iter().map(|a| a.truncate(bound)).collect();
    let terms: Vec<(&Monomial, &Complex)> = outer.terms().collect();
    // power cache: powers[idx][e] = substituted[idx]^e
    let mut powers: Vec<Vec<Jet>> = (0..nvars).map(|_| vec![Jet::one(&target, bound)]).collect();

    let result = compose_rec(&terms, 0, nvars, &substituted, &mut powers, &target, bound);
    let exact = all_exact && result.is_exact();
    Ok(result.with_order_flags(bound, exact))
}

fn power(powers: &mut [Vec<Jet>], substituted: &[Jet], idx: usize, e: u32) -> Jet {
    while powers[idx].len() <= e as usize {
        let last = powers[idx].last().unwrap().clone();
        powers[idx].push(last.mul(&substituted[idx]));
    }
    powers[idx][e as usize].clone()
}

fn compose_rec(
    terms: &[(&Monomial, &Complex)],
    var: usize,
    nvars: usize,
    substituted: &[Jet],
    powers: &mut [Vec<Jet>],
    target: &Arc<VarSpace>,
    bound: u32,
) -> Jet {
    if terms.is_empty() {
        return Jet::zero(target, bound);
    }
    if var == nvars {
        let mut acc = Complex::zero();
        for (_, c) in terms {
            acc = &acc + c;
        }
        return Jet::constant(target, bound, acc);
    }
    // group terms by the exponent of the current variable
    let mut groups: std::collections::BTreeMap<u32, Vec<(&Monomial, &Complex)>> =
        std::collections::BTreeMap::new();
    for &(m, c) in terms {
        groups.entry(m.exp(var)).or_default().push((m, c));
    }
    let mut acc = Jet::zero(target, bound);
    for (e, group) in groups {
        let mut sub = compose_rec(&group, var + 1, nvars, substituted, powers, target, bound);
        if e > 0 {
            let p = power(powers, substituted, var, e);
            sub = sub.mul(&p);
        }
        acc = acc.add(&sub);
    }
    acc
}

/// Formal inverse of a holomorphic map germ fixing the origin.
///
/// `f` is one jet per holomorphic variable of its space, each using only
/// holomorphic variables, with zero constant term and invertible linear part.
/// Returns g with f(g) = g(f) = identity up to the working order, computed by
/// exact linear inversion followed by degree-by-degree iteration.
pub fn invert_map(f: &[Jet]) -> Result<Vec<Jet>, JetError> {
    assert!(!f.is_empty());
    let space = f[0].space().clone();
    let hol = space.holomorphic();
    assert_eq!(
        f.len(),
        hol.len(),
        "need one component per holomorphic variable"
    );
    let order = f.iter().map(|j| j.order()).min().unwrap();

    for (i, comp) in f.iter().enumerate() {
        if !same_space(comp.space(), &space) {
            return Err(JetError::SpaceMismatch);
        }
        if !comp.eval0().is_zero() {
            return Err(JetError::NonzeroConstantTerm(i));
        }
        for (m, _) in comp.terms() {
            for (idx, &e) in m.exps().iter().enumerate() {
                if e > 0 && !hol.contains(&idx) {
                    return Err(JetError::NotPolynomial);
                }
            }
        }
    }

    // linear part and its exact inverse
    let lin: Vec<Vec<Complex>> = f
        .iter()
        .map(|comp| hol.iter().map(|&v| comp.linear_coeff(v)).collect())
        .collect();
    let lin_inv = linalg::mat_inverse(&lin).ok_or(JetError::SingularLinearPart)?;

    let ident: Vec<Jet> = hol
        .iter()
        .map(|&v| Jet::variable(&space, order, v))
        .collect();
    let higher: Vec<Jet> = f
        .iter()
        .enumerate()
        .map(|(i, comp)| {
            let mut lin_jet = Jet::zero(&space, order);
            for (j, &v) in hol.iter().enumerate() {
                lin_jet = lin_jet.add(&Jet::variable(&space, order, v).scale(&lin[i][j]));
            }
            comp.sub(&lin_jet)
        })
        .collect();

    let apply_lin_inv = |vec: &[Jet]| -> Vec<Jet> {
        (0..hol.len())
            .map(|i| {
                let mut acc = Jet::zero(&space, order);
                for (j, jet) in vec.iter().enumerate() {
                    acc = acc.add(&jet.scale(&lin_inv[i][j]));
                }
                acc
            })
            .collect()
    };

    // g is correct to degree m entering the iteration for target degree m+1.
    // `higher` has no constant or linear part, so its degree-(m+1)
    // composition coefficients only involve g up to degree m; the order flag
    // is lifted to let the composition produce them.
    let mut g = apply_lin_inv(&ident);
    for target in 2..=order {
        let mut assignment: Vec<Jet> = (0..space.len())
            .map(|_| Jet::zero(&space, target))
            .collect();
        for (j, &v) in hol.iter().enumerate() {
            assignment[v] = g[j].truncate(target).with_order_flags(target, false);
        }
        let mut rhs = Vec::with_capacity(hol.len());
        for (i, h) in higher.iter().enumerate() {
            let h_of_g = compose(&h.truncate(target), &assignment)?;
            rhs.push(ident[i].truncate(target).sub(&h_of_g));
        }
        g = apply_lin_inv(&rhs);
    }
    // the inverse of a polynomial map is in general an infinite series
    Ok(g
        .into_iter()
        .map(|j| j.with_order_flags(order, false))
        .collect())
}
