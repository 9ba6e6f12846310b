//! End-to-end analysis: recenter, normalize the source to graph form, verify
//! tangency, build the CR basis and the pulled-back gradient matrix, then
//! accumulate the derivative span ladder.

use crate::engine::fields::{apply_field, cr_basis, CrVectorField};
use crate::engine::ladder::{nondegeneracy_report, NondegeneracyReport};
use crate::engine::EngineError;
use crate::jet::{compositions, Jet, JetError, JetMatrix};
use crate::manifold::{
    pullback_assignment, pullback_residuals, verify_maps_into_target, CrMap, ExtrinsicManifold,
    GraphManifold, LinearChange,
};
use crate::scalar::Complex;

#[derive(Clone, Debug)]
pub enum ManifoldInput {
    Graph(GraphManifold),
    Extrinsic(ExtrinsicManifold),
}

/// Prepared analysis state: everything recentered at the origin, source in
/// graph form, tangency verified.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub source: GraphManifold,
    pub target: ExtrinsicManifold,
    /// Map components over the source ambient chart, vanishing at 0.
    pub map: Vec<Jet>,
    pub fields: Vec<CrVectorField>,
    /// Linear source change applied during graph conversion, if any.
    pub source_change: Option<LinearChange>,
}

impl Pipeline {
    pub fn prepare(
        source: ManifoldInput,
        target: ManifoldInput,
        map: CrMap,
    ) -> Result<Pipeline, EngineError> {
        // base-point consistency between the map and the manifold blocks
        let source_bp = match &source {
            ManifoldInput::Graph(_) => None,
            ManifoldInput::Extrinsic(m) => Some(m.basepoint().to_vec()),
        };
        let target_bp = match &target {
            ManifoldInput::Graph(_) => None,
            ManifoldInput::Extrinsic(m) => Some(m.basepoint().to_vec()),
        };
        check_basepoint(
            "source",
            source_bp.as_deref(),
            &map.source_basepoint,
        )?;
        check_basepoint(
            "target",
            target_bp.as_deref(),
            &map.target_basepoint,
        )?;

        let map = map.recenter()?;

        let target = match target {
            ManifoldInput::Graph(g) => g.to_extrinsic()?,
            ManifoldInput::Extrinsic(m) => m.recenter()?,
        };

        let (source, map_components, source_change) = match source {
            ManifoldInput::Graph(g) => (g, map.components, None),
            ManifoldInput::Extrinsic(m) => {
                let recentered = m.recenter()?;
                let (g, change) = recentered.to_graph()?;
                let components = change.apply_to_map(&map.components)?;
                (g, components, Some(change))
            }
        };

        verify_maps_into_target(&map_components, &source, &target)?;
        let fields = cr_basis(&source)?;
        Ok(Pipeline {
            source,
            target,
            map: map_components,
            fields,
            source_change,
        })
    }

    /// Swap in a different (already recentered) target and map over the same
    /// source; used by the coordinate-change checks.
    pub fn with_target(
        &self,
        target: ExtrinsicManifold,
        map: Vec<Jet>,
    ) -> Result<Pipeline, EngineError> {
        verify_maps_into_target(&map, &self.source, &target)?;
        Ok(Pipeline {
            source: self.source.clone(),
            target,
            map,
            fields: self.fields.clone(),
            source_change: self.source_change.clone(),
        })
    }

    /// The d' x N' matrix of pulled-back complex gradients restricted to the
    /// source manifold.
    pub fn gradient_matrix(&self) -> Result<JetMatrix, EngineError> {
        self.gradient_matrix_capped(None)
    }

    /// Same, with every entry truncated to `cap`: the ladder up to order
    /// k_max only ever reads coefficients of degree <= k_max, so the
    /// compositions can run degree-capped.
    fn gradient_matrix_capped(&self, cap: Option<u32>) -> Result<JetMatrix, EngineError> {
        let assignment = pullback_assignment(&self.map, &self.source, &self.target)?;
        let d_prime = self.target.d();
        let n_prime = self.target.ambient_dim();
        let mut entries = Vec::with_capacity(d_prime * n_prime);
        for l in 0..d_prime {
            for nu in 0..n_prime {
                let mut grad = self.target.rho()[l].deriv(nu)?;
                if let Some(c) = cap {
                    // substituted jets vanish at 0, so outer terms of degree
                    // beyond the cap never land inside it
                    grad = grad.truncate(c);
                }
                entries.push(crate::jet::compose(&grad, &assignment)?);
            }
        }
        Ok(JetMatrix::from_fn(d_prime, n_prime, |r, c| {
            entries[r * n_prime + c].clone()
        }))
    }

    pub fn run(&self, k_max: u32, stop_at_full: bool) -> Result<NondegeneracyReport, EngineError> {
        let grad = self.gradient_matrix_capped(Some(k_max))?;
        nondegeneracy_report(&grad, &self.fields, k_max, stop_at_full)
    }

    /// Consistency ladder: every iterated CR derivative of the pulled-back
    /// defining functions restricted to the source must be the identically
    /// zero jet, not merely zero at the origin.
    pub fn tangency_ladder_check(&self, depth: u32) -> Result<(), EngineError> {
        let residuals = pullback_residuals(&self.map, &self.source, &self.target)?;
        let n = self.fields.len();
        let mut prev: Vec<(Vec<u32>, Vec<Jet>)> = Vec::new();
        for k in 0..=depth {
            let mut level: Vec<(Vec<u32>, Vec<Jet>)> = Vec::new();
            for alpha in compositions(n, k) {
                let exps = alpha.exps().to_vec();
                let jets: Vec<Jet> = if k == 0 {
                    residuals.clone()
                } else {
                    let j = exps.iter().position(|&e| e > 0).unwrap();
                    let mut parent = exps.clone();
                    parent[j] -= 1;
                    let parent_jets = &prev
                        .iter()
                        .find(|(e, _)| *e == parent)
                        .expect("parent computed in previous grade")
                        .1;
                    parent_jets
                        .iter()
                        .map(|jet| apply_field(&self.fields[j], jet))
                        .collect::<Result<_, JetError>>()
                        .map_err(|e| match e {
                            JetError::OrderExhausted => EngineError::OrderExhausted {
                                alpha: exps.clone(),
                            },
                            other => EngineError::Jet(other),
                        })?
                };
                for (l, jet) in jets.iter().enumerate() {
                    if !jet.is_zero() {
                        return Err(EngineError::TangencyLadder {
                            alpha: exps.clone(),
                            rho_index: l,
                        });
                    }
                }
                level.push((exps, jets));
            }
            prev = level;
        }
        Ok(())
    }
}

fn check_basepoint(
    what: &str,
    manifold_bp: Option<&[Complex]>,
    map_bp: &[Complex],
) -> Result<(), EngineError> {
    match manifold_bp {
        Some(bp) => {
            if bp != map_bp {
                return Err(EngineError::Input(format!(
                    "{what} base point of the map differs from the {what} manifold base point"
                )));
            }
        }
        None => {
            // graph manifolds are centered at the origin
            if !map_bp.iter().all(|c| c.is_zero()) {
                return Err(EngineError::Input(format!(
                    "{what} manifold is in graph form (centered at 0) but the map's {what} base point is nonzero"
                )));
            }
        }
    }
    Ok(())
}

/// Finite nondegeneracy of the manifold itself: run the pipeline with the
/// identity map and the manifold as its own target.
pub fn manifold_nondegeneracy(
    m: ManifoldInput,
    k_max: u32,
    stop_at_full: bool,
) -> Result<NondegeneracyReport, EngineError> {
    let pipeline = manifold_identity_pipeline(m)?;
    pipeline.run(k_max, stop_at_full)
}

/// The prepared pipeline for the identity self-map of a manifold.
pub fn manifold_identity_pipeline(m: ManifoldInput) -> Result<Pipeline, EngineError> {
    match m {
        ManifoldInput::Graph(g) => {
            let map = CrMap::new(
                g.identity_map(),
                vec![Complex::zero(); g.n() + g.d()],
                vec![Complex::zero(); g.n() + g.d()],
            )?;
            Pipeline::prepare(
                ManifoldInput::Graph(g.clone()),
                ManifoldInput::Graph(g),
                map,
            )
        }
        ManifoldInput::Extrinsic(m) => {
            let n_amb = m.ambient_dim();
            let components: Vec<Jet> = (0..n_amb)
                .map(|j| Jet::variable(m.space(), m.order(), j))
                .collect();
            let map = CrMap::new(components, m.basepoint().to_vec(), m.basepoint().to_vec())?;
            Pipeline::prepare(
                ManifoldInput::Extrinsic(m.clone()),
                ManifoldInput::Extrinsic(m),
                map,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Verdict;
    use crate::expr::parse_jet;
    use crate::scalar::rat;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn graph_manifold(cr: &[&str], normal: &[&str], s: &[&str], phi: &[&str], order: u32) -> GraphManifold {
        let gs = GraphManifold::make_graph_space(&names(cr), &names(s));
        let jets: Vec<Jet> = phi.iter().map(|t| parse_jet(t, &gs, order).unwrap()).collect();
        GraphManifold::new(names(cr), names(normal), names(s), jets).unwrap()
    }

    fn quadric(order: u32) -> GraphManifold {
        graph_manifold(&["z"], &["w"], &["s"], &["z*conj(z)"], order)
    }

    fn quartic(order: u32) -> GraphManifold {
        graph_manifold(&["z"], &["w"], &["s"], &["z^2*conj(z)^2"], order)
    }

    fn prepare_quartic_to_quadric(order: u32) -> Pipeline {
        let source = quartic(order);
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
            ManifoldInput::Graph(quadric(order)),
            map,
        )
        .unwrap()
    }

    #[test]
    fn gradient_pullback_quartic_to_quadric() {
        // row (-conj(z)^2, 1/(2i))
        let p = prepare_quartic_to_quadric(8);
        let grad = p.gradient_matrix().unwrap();
        assert_eq!((grad.nrows(), grad.ncols()), (1, 2));
        let gs = p.source.graph_space();
        assert!(grad
            .get(0, 0)
            .eq_terms(&parse_jet("-1*conj(z)^2", gs, 8).unwrap()));
        let half_i = Jet::constant(
            gs,
            8,
            Complex::new(crate::scalar::Surd::zero(), crate::scalar::Surd::from_rational(rat(-1, 2))),
        );
        assert!(grad.get(0, 1).eq_terms(&half_i));
    }

    #[test]
    fn quartic_to_quadric_ladder() {
        let p = prepare_quartic_to_quadric(8);
        let report = p.run(10, true).unwrap();
        assert_eq!(report.verdict, Verdict::Nondegenerate { k0: 2 });
        assert_eq!(report.dims(), &[1, 1, 2]);
        // witnesses: alpha = (0) with rho_1, then alpha = (2) with rho_1
        assert_eq!(report.ladder.witnesses.len(), 2);
        assert_eq!(report.ladder.witnesses[0].alpha, vec![0]);
        assert_eq!(report.ladder.witnesses[1].alpha, vec![2]);
    }

    #[test]
    fn codimension_two_target_ladder() {
        // H(z,w) = (z, w, w) into Im w1 = Im w2 = |z'|^2 is 1-nondegenerate
        let source = quadric(8);
        let target = graph_manifold(
            &["zp"],
            &["w1", "w2"],
            &["t1", "t2"],
            &["zp*conj(zp)", "zp*conj(zp)"],
            8,
        );
        let asp = source.ambient_space().clone();
        let map = CrMap::new(
            vec![
                parse_jet("z", &asp, 8).unwrap(),
                parse_jet("w", &asp, 8).unwrap(),
                parse_jet("w", &asp, 8).unwrap(),
            ],
            vec![Complex::zero(); 2],
            vec![Complex::zero(); 3],
        )
        .unwrap();
        let p = Pipeline::prepare(
            ManifoldInput::Graph(source),
            ManifoldInput::Graph(target),
            map,
        )
        .unwrap();
        let report = p.run(10, true).unwrap();
        assert_eq!(report.verdict, Verdict::Nondegenerate { k0: 1 });
        assert_eq!(report.dims(), &[2, 3]);
    }

    #[test]
    fn zero_map_into_flat_target_row() {
        // H = 0 into Im w' = 0: the only gradient row is (0, 1/(2i))
        let source = quadric(6);
        let target = graph_manifold(&["zp"], &["wp"], &["t"], &["0"], 6);
        let asp = source.ambient_space().clone();
        let map = CrMap::new(
            vec![Jet::zero(&asp, 6), Jet::zero(&asp, 6)],
            vec![Complex::zero(); 2],
            vec![Complex::zero(); 2],
        )
        .unwrap();
        let p = Pipeline::prepare(
            ManifoldInput::Graph(source),
            ManifoldInput::Graph(target),
            map,
        )
        .unwrap();
        let grad = p.gradient_matrix().unwrap();
        assert!(grad.get(0, 0).is_zero());
        let half_i = Complex::new(
            crate::scalar::Surd::zero(),
            crate::scalar::Surd::from_rational(rat(-1, 2)),
        );
        assert_eq!(grad.get(0, 1).eval0(), half_i);
        // dim E_k = d' = 1 for all k
        let report = p.run(6, false).unwrap();
        assert_eq!(report.dims(), &[1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(report.verdict, Verdict::DegenerateUpTo { k_max: 6 });
    }

    #[test]
    fn manifold_nondegeneracy_examples() {
        // Im w = |z|^2 is 1-nondegenerate
        let r = manifold_nondegeneracy(ManifoldInput::Graph(quadric(8)), 10, true).unwrap();
        assert_eq!(r.verdict, Verdict::Nondegenerate { k0: 1 });

        // Im w = |z|^4 is degenerate at 0 to every finite order
        let r = manifold_nondegeneracy(ManifoldInput::Graph(quartic(8)), 6, false).unwrap();
        assert_eq!(r.verdict, Verdict::DegenerateUpTo { k_max: 6 });
        assert_eq!(r.dims(), &[1, 1, 1, 1, 1, 1, 1]);

        // the sphere in C^2 at (1, 0) is 1-nondegenerate
        let sp = ExtrinsicManifold::make_space(&names(&["Z1", "Z2"]));
        let rho = parse_jet("Z1*conj(Z1) + Z2*conj(Z2) - 1", &sp, 8).unwrap();
        let sphere = ExtrinsicManifold::new(
            names(&["Z1", "Z2"]),
            vec![rho],
            vec![Complex::one(), Complex::zero()],
        )
        .unwrap();
        let r = manifold_nondegeneracy(ManifoldInput::Extrinsic(sphere), 10, true).unwrap();
        assert_eq!(r.verdict, Verdict::Nondegenerate { k0: 1 });
    }

    #[test]
    fn tangency_ladder_is_zero_for_quartic_map() {
        let p = prepare_quartic_to_quadric(8);
        p.tangency_ladder_check(4).unwrap();
    }

    #[test]
    fn basepoint_mismatch_is_rejected() {
        let source = quadric(6);
        let asp = source.ambient_space().clone();
        let map = CrMap::new(
            vec![
                parse_jet("z", &asp, 6).unwrap(),
                parse_jet("w", &asp, 6).unwrap(),
            ],
            vec![Complex::one(), Complex::zero()],
            vec![Complex::zero(); 2],
        )
        .unwrap();
        let err = Pipeline::prepare(
            ManifoldInput::Graph(source),
            ManifoldInput::Graph(quadric(6)),
            map,
        )
        .unwrap_err();
        assert!(matches!(err, EngineError::Input(_)));
    }
}
