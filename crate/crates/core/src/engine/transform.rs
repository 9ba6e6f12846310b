//! Target coordinate changes and the row-space transformation law.
//!
//! Changing target coordinates by a formal biholomorphism F fixing 0 turns
//! the defining functions into rho o F^{-1} and the map into F o H. The span
//! ladders computed in the two charts are related exactly: each generator row
//! is multiplied on the right by the inverse of the linear part of F at 0,
//! so dimensions and verdicts are invariant.

use std::sync::Arc;

use crate::engine::pipeline::Pipeline;
use crate::engine::EngineError;
use crate::jet::{compose, invert_map, same_space, Jet, VarSpace};
use crate::linalg;
use crate::manifold::ExtrinsicManifold;
use crate::rng::SplitMix64;
use crate::scalar::Complex;

/// Apply the coordinate change Z' = F(Z'_old)^{-1}-style relabeling to a
/// recentered target manifold and map: new defining functions rho o F^{-1}
/// (conjugate slots get the conjugated inverse), new map components F o H.
pub fn transform_target(
    target: &ExtrinsicManifold,
    map: &[Jet],
    f: &[Jet],
) -> Result<(ExtrinsicManifold, Vec<Jet>), EngineError> {
    let n_prime = target.ambient_dim();
    assert!(
        target.basepoint().iter().all(|c| c.is_zero()),
        "transform a recentered target"
    );
    if f.len() != n_prime {
        return Err(EngineError::Input(format!(
            "coordinate change has {} components, expected {n_prime}",
            f.len()
        )));
    }
    for comp in f {
        if !same_space(comp.space(), target.space()) {
            return Err(EngineError::Jet(crate::jet::JetError::SpaceMismatch));
        }
    }

    let g = invert_map(f)?;
    let mut rho_assignment: Vec<Jet> = Vec::with_capacity(2 * n_prime);
    for comp in &g {
        rho_assignment.push(comp.clone());
    }
    for comp in &g {
        rho_assignment.push(comp.conj_swap());
    }
    let rho_new: Vec<Jet> = target
        .rho()
        .iter()
        .map(|r| Ok(compose(r, &rho_assignment)?))
        .collect::<Result<_, EngineError>>()?;
    let target_new = ExtrinsicManifold::new(
        target.names().to_vec(),
        rho_new,
        vec![Complex::zero(); n_prime],
    )?;

    let mut map_assignment: Vec<Jet> = Vec::with_capacity(2 * n_prime);
    for h in map {
        map_assignment.push(h.clone());
    }
    for h in map {
        map_assignment.push(h.conj_swap());
    }
    let map_new: Vec<Jet> = f
        .iter()
        .map(|comp| Ok(compose(comp, &map_assignment)?))
        .collect::<Result<_, EngineError>>()?;

    Ok((target_new, map_new))
}

/// Linear part of a holomorphic map tuple at 0.
pub fn linear_part(f: &[Jet]) -> Vec<Vec<Complex>> {
    let hol = f[0].space().holomorphic();
    f.iter()
        .map(|comp| hol.iter().map(|&v| comp.linear_coeff(v)).collect())
        .collect()
}

#[derive(Clone, Debug)]
pub struct TransformCheck {
    pub holds: bool,
    /// Highest derivative order compared.
    pub k_checked: u32,
    pub failure: Option<String>,
}

/// Pulled-back gradient matrix of the transformed chart, computed directly in
/// source coordinates.
///
/// Materializing rho o F^{-1} and differentiating it produces very large
/// intermediate jets. Composition is associative and Jacobians invert, so the
/// same entries are
///
/// ```text
/// grad~_{l nu} = sum_k (d rho_l / d Z_k)(v, conj v) * [(JacF o v)^{-1}]_{k nu},
/// v = G o (restricted F o H),  computed as the fixed point v = L^{-1}(r - Ftilde(v)).
/// ```
///
/// The tangency of the transformed map is verified on the way as
/// rho(v, conj v) = 0.
pub fn transformed_gradient_matrix(
    pipeline: &Pipeline,
    f: &[Jet],
) -> Result<crate::jet::JetMatrix, EngineError> {
    use crate::jet::JetMatrix;
    use crate::manifold::ManifoldError;

    let target = &pipeline.target;
    let n_prime = target.ambient_dim();
    if f.len() != n_prime {
        return Err(EngineError::Input(format!(
            "coordinate change has {} components, expected {n_prime}",
            f.len()
        )));
    }
    let tspace = target.space().clone();
    let gspace = pipeline.source.graph_space().clone();
    let order = pipeline.source.order();

    // transformed map F o H, restricted to the source manifold
    let mut map_assignment: Vec<Jet> = Vec::with_capacity(2 * n_prime);
    for h in &pipeline.map {
        map_assignment.push(h.clone());
    }
    for h in &pipeline.map {
        map_assignment.push(h.conj_swap());
    }
    let mut restricted: Vec<Jet> = Vec::with_capacity(n_prime);
    for comp in f {
        let h_tilde = compose(comp, &map_assignment)?;
        restricted.push(pipeline.source.restrict(&h_tilde)?);
    }

    // linear part of F and the higher-order remainder
    let lin = linear_part(f);
    let lin_inv = linalg::mat_inverse(&lin).ok_or(crate::jet::JetError::SingularLinearPart)?;
    let hol = tspace.holomorphic();
    let higher: Vec<Jet> = f
        .iter()
        .enumerate()
        .map(|(k, comp)| {
            let mut l_jet = Jet::zero(&tspace, comp.order());
            for (j, &var) in hol.iter().enumerate() {
                l_jet = l_jet.add(&Jet::variable(&tspace, comp.order(), var).scale(&lin[k][j]));
            }
            comp.sub(&l_jet)
        })
        .collect();

    let apply_lin_inv = |vec: &[Jet]| -> Vec<Jet> {
        (0..n_prime)
            .map(|k| {
                let mut acc = Jet::zero(&gspace, order);
                for (j, jet) in vec.iter().enumerate() {
                    acc = acc.add(&jet.scale(&lin_inv[k][j]));
                }
                acc
            })
            .collect()
    };

    // v = G o (restricted F o H) as the fixed point v = L^{-1}(r - Ftilde(v));
    // `higher` has no constant or linear part, so degree target coefficients
    // only involve v up to degree target - 1
    let mut v = apply_lin_inv(&restricted);
    for target_deg in 2..=order {
        let mut assignment: Vec<Jet> = (0..tspace.len())
            .map(|_| Jet::zero(&gspace, target_deg))
            .collect();
        for (k, &var) in hol.iter().enumerate() {
            assignment[var] = v[k].truncate(target_deg).with_order_flags(target_deg, false);
        }
        let mut rhs = Vec::with_capacity(n_prime);
        for (k, h) in higher.iter().enumerate() {
            let h_of_v = compose(&h.truncate(target_deg), &assignment)?;
            rhs.push(restricted[k].truncate(target_deg).sub(&h_of_v));
        }
        v = apply_lin_inv(&rhs);
    }
    let v: Vec<Jet> = v
        .into_iter()
        .map(|j| j.with_order_flags(order, false))
        .collect();

    // assignment (v, conj v) for target-chart jets
    let mut v_assignment: Vec<Jet> = Vec::with_capacity(2 * n_prime);
    for comp in &v {
        v_assignment.push(comp.clone());
    }
    for comp in &v {
        v_assignment.push(comp.conj_swap());
    }

    // tangency of the transformed map: rho(v, conj v) must vanish identically
    for (l, rho) in target.rho().iter().enumerate() {
        let residual = compose(rho, &v_assignment)?;
        if !residual.is_zero() {
            let (m, c) = residual.terms().next().expect("nonzero jet has a term");
            let term = format!(
                "{}*{}",
                c,
                crate::expr::monomial_to_string(residual.space(), m)
            );
            return Err(EngineError::Manifold(ManifoldError::Tangency(Box::new(
                crate::manifold::TangencyFailure {
                    rho_index: l + 1,
                    term,
                    residual: crate::expr::jet_to_string(&residual),
                },
            ))));
        }
    }

    // (JacF o v)^{-1}
    let mut jac_entries = Vec::with_capacity(n_prime * n_prime);
    for comp in f {
        for &var in &hol {
            let d = comp.deriv(var)?;
            jac_entries.push(compose(&d, &v_assignment)?);
        }
    }
    let jac = JetMatrix::from_fn(n_prime, n_prime, |r, c| jac_entries[r * n_prime + c].clone());
    let jac_inv = jac.invert_unit()?;

    // gradient rows of the original chart evaluated along v, times JacG
    let d_prime = target.d();
    let mut entries = Vec::with_capacity(d_prime * n_prime);
    for l in 0..d_prime {
        let mut row_factors = Vec::with_capacity(n_prime);
        for k in 0..n_prime {
            let d = target.rho()[l].deriv(k)?;
            row_factors.push(compose(&d, &v_assignment)?);
        }
        for nu in 0..n_prime {
            let mut acc = Jet::zero(&gspace, order);
            for (k, factor) in row_factors.iter().enumerate() {
                acc = acc.add(&factor.mul(jac_inv.get(k, nu)));
            }
            entries.push(acc);
        }
    }
    Ok(JetMatrix::from_fn(d_prime, n_prime, |r, c| {
        entries[r * n_prime + c].clone()
    }))
}

/// Run the pipeline in the original and in the transformed target chart and
/// verify the exact row-space transformation law at every order up to k_max:
/// rowspace(E~_k) = rowspace(E_k * dF(0)^{-1}), hence equal dimensions and
/// verdicts.
pub fn check_transformation_law(
    pipeline: &Pipeline,
    f: &[Jet],
    k_max: u32,
) -> Result<TransformCheck, EngineError> {
    let base = pipeline.run(k_max, false)?;
    check_transformation_law_with_base(pipeline, &base, f, k_max)
}

/// Variant taking the untransformed full ladder (run with
/// `stop_at_full = false` at the same k_max), so repeated trials share it.
pub fn check_transformation_law_with_base(
    pipeline: &Pipeline,
    report_a: &crate::engine::NondegeneracyReport,
    f: &[Jet],
    k_max: u32,
) -> Result<TransformCheck, EngineError> {
    let grad = transformed_gradient_matrix(pipeline, f)?;
    let report_b = crate::engine::nondegeneracy_report(&grad, &pipeline.fields, k_max, false)?;

    let t = linear_part(f);
    let t_inv = linalg::mat_inverse(&t).ok_or(crate::jet::JetError::SingularLinearPart)?;
    let n_prime = pipeline.target.ambient_dim();

    let fail = |msg: String| TransformCheck {
        holds: false,
        k_checked: k_max,
        failure: Some(msg),
    };

    if report_a.verdict != report_b.verdict {
        return Ok(fail(format!(
            "verdicts differ: {:?} vs {:?}",
            report_a.verdict, report_b.verdict
        )));
    }
    if report_a.dims() != report_b.dims() {
        return Ok(fail(format!(
            "dimension ladders differ: {:?} vs {:?}",
            report_a.dims(),
            report_b.dims()
        )));
    }
    for k in 0..report_a.dims().len() {
        let transformed_gens: Vec<Vec<Complex>> = report_a
            .ladder
            .generators_at(k)
            .iter()
            .map(|row| linalg::row_times_mat(row, &t_inv))
            .collect();
        let new_gens = report_b.ladder.generators_at(k);
        if !linalg::row_spaces_equal(&transformed_gens, new_gens, n_prime) {
            return Ok(fail(format!("row spaces differ at order {k}")));
        }
    }
    Ok(TransformCheck {
        holds: true,
        k_checked: k_max,
        failure: None,
    })
}

/// Seeded random formal biholomorphism of the target chart: linear part
/// identity plus a strictly upper-triangular small-integer matrix (always
/// invertible), plus quadratic terms with coefficients in {-2..2}.
pub fn random_biholomorphism(
    space: &Arc<VarSpace>,
    order: u32,
    rng: &mut SplitMix64,
) -> Vec<Jet> {
    let hol = space.holomorphic();
    let n = hol.len();
    let mut linear = vec![vec![0i64; n]; n];
    for (r, row) in linear.iter_mut().enumerate() {
        row[r] = 1;
        for entry in row.iter_mut().skip(r + 1) {
            *entry = rng.int_in(-2, 2);
        }
    }
    let mut out = Vec::with_capacity(n);
    for lin_row in &linear {
        let mut comp = Jet::zero(space, order);
        for (j, &coef) in lin_row.iter().enumerate() {
            if coef != 0 {
                comp = comp.add(
                    &Jet::variable(space, order, hol[j]).scale(&Complex::from_int(coef)),
                );
            }
        }
        for a in 0..n {
            for b in a..n {
                let coef = rng.int_in(-2, 2);
                if coef != 0 {
                    let quad = Jet::variable(space, order, hol[a])
                        .mul(&Jet::variable(space, order, hol[b]))
                        .scale(&Complex::from_int(coef));
                    comp = comp.add(&quad);
                }
            }
        }
        out.push(comp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::pipeline::{ManifoldInput, Pipeline};
    use crate::engine::Verdict;
    use crate::expr::parse_jet;
    use crate::manifold::{CrMap, GraphManifold};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn quadric_pair(order: u32) -> Pipeline {
        let gs = GraphManifold::make_graph_space(&names(&["z"]), &names(&["s"]));
        let mk = |phi: &str| {
            GraphManifold::new(
                names(&["z"]),
                names(&["w"]),
                names(&["s"]),
                vec![parse_jet(phi, &gs, order).unwrap()],
            )
            .unwrap()
        };
        let source = mk("z^2*conj(z)^2");
        let target = mk("z*conj(z)");
        let asp = source.ambient_space().clone();
        let map = CrMap::new(
            vec![
                parse_jet("z^2", &asp, order).unwrap(),
                parse_jet("w", &asp, order).unwrap(),
            ],
            vec![Complex::zero(); 2],
            vec![Complex::zero(); 2],
        )
        .unwrap();
        Pipeline::prepare(
            ManifoldInput::Graph(source),
            ManifoldInput::Graph(target),
            map,
        )
        .unwrap()
    }

    #[test]
    fn identity_change_is_trivially_invariant() {
        let p = quadric_pair(8);
        let ident: Vec<Jet> = (0..2)
            .map(|j| Jet::variable(p.target.space(), 8, j))
            .collect();
        let (t_new, h_new) = transform_target(&p.target, &p.map, &ident).unwrap();
        for (a, b) in t_new.rho().iter().zip(p.target.rho()) {
            assert!(a.eq_terms(b));
        }
        for (a, b) in h_new.iter().zip(&p.map) {
            assert!(a.eq_terms(b));
        }
        let check = check_transformation_law(&p, &ident, 4).unwrap();
        assert!(check.holds);
    }

    #[test]
    fn diagonal_scaling_rescales_defining_function() {
        // F = (2z', w') on Im w' = |z'|^2 gives Im w' = |z'|^2 / 4
        let gs = GraphManifold::make_graph_space(&names(&["zp"]), &names(&["t"]));
        let target = GraphManifold::new(
            names(&["zp"]),
            names(&["wp"]),
            names(&["t"]),
            vec![parse_jet("zp*conj(zp)", &gs, 8).unwrap()],
        )
        .unwrap()
        .to_extrinsic()
        .unwrap();
        let tsp = target.space().clone();
        let f = vec![
            Jet::variable(&tsp, 8, 0).scale(&Complex::from_int(2)),
            Jet::variable(&tsp, 8, 1),
        ];
        let h = vec![Jet::zero(&tsp, 8), Jet::zero(&tsp, 8)];
        // the dummy map is not used for the defining-function comparison
        let (t_new, _) = transform_target(&target, &h, &f).unwrap();
        let expect = parse_jet(
            "-1/2*i*(wp - conj(wp)) - 1/4*zp*conj(zp)",
            &tsp,
            8,
        )
        .unwrap();
        assert!(t_new.rho()[0].eq_to_order(&expect, 8));
    }

    #[test]
    fn quadratic_shear_preserves_ladder() {
        // F = (z' + w'^2, w')
        let p = quadric_pair(9);
        let tsp = p.target.space().clone();
        let f = vec![
            Jet::variable(&tsp, 9, 0).add(&Jet::variable(&tsp, 9, 1).pow(2)),
            Jet::variable(&tsp, 9, 1),
        ];
        let check = check_transformation_law(&p, &f, 4).unwrap();
        assert!(check.holds, "failure: {:?}", check.failure);
        let report = p.run(10, true).unwrap();
        assert_eq!(report.verdict, Verdict::Nondegenerate { k0: 2 });
    }

    #[test]
    fn fast_transformed_gradient_matches_materialized_route() {
        // the direct source-space computation must agree entry by entry with
        // materializing rho o F^{-1} and differentiating it
        let p = quadric_pair(9);
        let tsp = p.target.space().clone();
        let mut rng = SplitMix64::new(5);
        for _ in 0..3 {
            let f = random_biholomorphism(&tsp, 9, &mut rng);
            let fast = transformed_gradient_matrix(&p, &f).unwrap();
            let (t_new, h_new) = transform_target(&p.target, &p.map, &f).unwrap();
            let slow_pipeline = p.with_target(t_new, h_new).unwrap();
            let slow = slow_pipeline.gradient_matrix().unwrap();
            assert_eq!((fast.nrows(), fast.ncols()), (slow.nrows(), slow.ncols()));
            for r in 0..fast.nrows() {
                for c in 0..fast.ncols() {
                    let a = fast.get(r, c);
                    let b = slow.get(r, c);
                    let k = a.effective_order().min(b.effective_order()).min(8);
                    assert!(
                        a.eq_to_order(b, k),
                        "entry ({r},{c}) differs to order {k}:\n  fast {a:?}\n  slow {b:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn random_biholomorphisms_are_invertible_and_seeded() {
        let sp = VarSpace::ambient(&["a", "b", "c"]);
        let mut rng = SplitMix64::new(42);
        let f = random_biholomorphism(&sp, 7, &mut rng);
        assert_eq!(f.len(), 3);
        let lin = linear_part(&f);
        assert!(linalg::mat_inverse(&lin).is_some());
        // unit upper-triangular linear part
        for (r, row) in lin.iter().enumerate() {
            assert!(row[r].is_one());
            for entry in row.iter().take(r) {
                assert!(entry.is_zero());
            }
        }
        let mut rng2 = SplitMix64::new(42);
        let f2 = random_biholomorphism(&sp, 7, &mut rng2);
        for (a, b) in f.iter().zip(&f2) {
            assert!(a.eq_terms(b));
        }
    }
}
