//! Manifold data model: generic submanifolds in graph or extrinsic form,
//! CR maps, recentering, extrinsic-to-graph conversion and restriction of
//! ambient functions to the manifold.

use std::fmt;
use std::sync::Arc;

use crate::expr::jet_to_string;
use crate::jet::{compose, same_space, Jet, JetError, JetMatrix, VarSpace};
use crate::linalg;
use crate::scalar::{rat, Complex};

#[derive(Clone, Debug)]
pub enum ManifoldError {
    Jet(JetError),
    SpaceMismatch,
    BadDimensions(String),
    NotReal(String),
    NotNormalized(String),
    BasepointNotOnManifold { index: usize, value: String },
    MapBasepointMismatch { component: usize, value: String },
    GenericityFailure,
    Tangency(Box<TangencyFailure>),
    Internal(String),
}

impl fmt::Display for ManifoldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldError::Jet(e) => write!(f, "{e}"),
            ManifoldError::SpaceMismatch => write!(f, "jet over an unexpected variable space"),
            ManifoldError::BadDimensions(s) => write!(f, "{s}"),
            ManifoldError::NotReal(s) => {
                write!(f, "{s} is not real (not fixed by conjugation)")
            }
            ManifoldError::NotNormalized(s) => write!(f, "{s}"),
            ManifoldError::BasepointNotOnManifold { index, value } => write!(
                f,
                "base point is not on the manifold: defining function #{} evaluates to {}",
                index + 1,
                value
            ),
            ManifoldError::MapBasepointMismatch { component, value } => write!(
                f,
                "map does not send the source base point to the target base point: component #{} evaluates to {}",
                component + 1,
                value
            ),
            ManifoldError::GenericityFailure => write!(
                f,
                "genericity failure: the complex gradients of the defining functions do not have full rank at the base point"
            ),
            ManifoldError::Tangency(t) => write!(f, "{t}"),
            ManifoldError::Internal(s) => write!(f, "internal error: {s}"),
        }
    }
}

impl std::error::Error for ManifoldError {}

impl From<JetError> for ManifoldError {
    fn from(e: JetError) -> Self {
        ManifoldError::Jet(e)
    }
}

// =============================================================================
// Graph form: Im w = phi(z, conj z, Re w)
// =============================================================================

/// A generic submanifold in graph form at the origin, with phi real,
/// phi(0) = 0 and d phi(0) = 0.
#[derive(Clone, Debug)]
pub struct GraphManifold {
    cr_names: Vec<String>,
    normal_names: Vec<String>,
    s_names: Vec<String>,
    graph_space: Arc<VarSpace>,
    ambient_space: Arc<VarSpace>,
    phi: Vec<Jet>,
    order: u32,
}

impl GraphManifold {
    /// The space (z, conj z, s) that graph-side jets live over.
    pub fn make_graph_space(cr_names: &[String], s_names: &[String]) -> Arc<VarSpace> {
        let cr: Vec<&str> = cr_names.iter().map(|s| s.as_str()).collect();
        let sv: Vec<&str> = s_names.iter().map(|s| s.as_str()).collect();
        VarSpace::graph(&cr, &sv)
    }

    /// The ambient space (z, w, conj z, conj w).
    pub fn make_ambient_space(cr_names: &[String], normal_names: &[String]) -> Arc<VarSpace> {
        let names: Vec<&str> = cr_names
            .iter()
            .chain(normal_names.iter())
            .map(|s| s.as_str())
            .collect();
        VarSpace::ambient(&names)
    }

    pub fn new(
        cr_names: Vec<String>,
        normal_names: Vec<String>,
        s_names: Vec<String>,
        phi: Vec<Jet>,
    ) -> Result<GraphManifold, ManifoldError> {
        let n = cr_names.len();
        let d = normal_names.len();
        if n == 0 || d == 0 {
            return Err(ManifoldError::BadDimensions(
                "need at least one CR variable and one normal variable".into(),
            ));
        }
        if s_names.len() != d || phi.len() != d {
            return Err(ManifoldError::BadDimensions(format!(
                "expected {d} graph equations and {d} Re-w variables"
            )));
        }
        let graph_space = Self::make_graph_space(&cr_names, &s_names);
        let ambient_space = Self::make_ambient_space(&cr_names, &normal_names);
        for (mu, p) in phi.iter().enumerate() {
            if !same_space(p.space(), &graph_space) {
                return Err(ManifoldError::SpaceMismatch);
            }
            if !p.is_real() {
                return Err(ManifoldError::NotReal(format!("phi_{}", mu + 1)));
            }
            if !p.eval0().is_zero() {
                return Err(ManifoldError::NotNormalized(format!(
                    "phi_{} has a nonzero constant term",
                    mu + 1
                )));
            }
            for idx in 0..graph_space.len() {
                if !p.linear_coeff(idx).is_zero() {
                    return Err(ManifoldError::NotNormalized(format!(
                        "phi_{} has a nonzero linear term in {}",
                        mu + 1,
                        graph_space.display_name(idx)
                    )));
                }
            }
        }
        let order = phi.iter().map(|p| p.order()).min().unwrap();
        Ok(GraphManifold {
            cr_names,
            normal_names,
            s_names,
            graph_space,
            ambient_space,
            phi,
            order,
        })
    }

    pub fn n(&self) -> usize {
        self.cr_names.len()
    }

    pub fn d(&self) -> usize {
        self.normal_names.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn phi(&self) -> &[Jet] {
        &self.phi
    }

    pub fn graph_space(&self) -> &Arc<VarSpace> {
        &self.graph_space
    }

    pub fn ambient_space(&self) -> &Arc<VarSpace> {
        &self.ambient_space
    }

    pub fn cr_names(&self) -> &[String] {
        &self.cr_names
    }

    pub fn normal_names(&self) -> &[String] {
        &self.normal_names
    }

    pub fn s_names(&self) -> &[String] {
        &self.s_names
    }

    /// Index of conj(z_j) in the graph space.
    pub fn zbar_index(&self, j: usize) -> usize {
        self.n() + j
    }

    /// Index of s_mu in the graph space.
    pub fn s_index(&self, mu: usize) -> usize {
        2 * self.n() + mu
    }

    /// The substitution (z, w, conj z, conj w) -> (z, s + i phi, conj z, s - i phi)
    /// realizing evaluation on the manifold.
    fn embedding(&self) -> Vec<Jet> {
        let n = self.n();
        let d = self.d();
        let gs = &self.graph_space;
        let k = self.order;
        let i_unit = Complex::i();
        let mut assignment = Vec::with_capacity(2 * (n + d));
        for j in 0..n {
            assignment.push(Jet::variable(gs, k, j));
        }
        for mu in 0..d {
            let s = Jet::variable(gs, k, self.s_index(mu));
            assignment.push(s.add(&self.phi[mu].scale(&i_unit)));
        }
        for j in 0..n {
            assignment.push(Jet::variable(gs, k, self.zbar_index(j)));
        }
        for mu in 0..d {
            let s = Jet::variable(gs, k, self.s_index(mu));
            assignment.push(s.sub(&self.phi[mu].scale(&i_unit)));
        }
        assignment
    }

    /// Restrict an ambient jet to the manifold: substitute w = s + i phi and
    /// conj w = s - i phi. A ring homomorphism onto jets in (z, conj z, s).
    pub fn restrict(&self, ambient: &Jet) -> Result<Jet, ManifoldError> {
        if !same_space(ambient.space(), &self.ambient_space) {
            return Err(ManifoldError::SpaceMismatch);
        }
        Ok(compose(ambient, &self.embedding())?)
    }

    /// Defining functions in extrinsic form over the ambient space:
    /// rho_mu = Im w_mu - phi_mu(z, conj z, (w + conj w)/2).
    pub fn to_extrinsic(&self) -> Result<ExtrinsicManifold, ManifoldError> {
        let n = self.n();
        let d = self.d();
        let asp = &self.ambient_space;
        let k = self.order;
        let half = Complex::from_rational(rat(1, 2));
        let minus_half_i = Complex::new(crate::scalar::Surd::zero(), crate::scalar::Surd::from_rational(rat(-1, 2)));

        // substitution for phi's variables: z -> z, conj z -> conj z, s -> (w + conj w)/2
        let nn = n + d;
        let mut assignment = Vec::with_capacity(2 * n + d);
        for j in 0..n {
            assignment.push(Jet::variable(asp, k, j));
        }
        for j in 0..n {
            assignment.push(Jet::variable(asp, k, nn + j));
        }
        for mu in 0..d {
            let w = Jet::variable(asp, k, n + mu);
            let wbar = Jet::variable(asp, k, nn + n + mu);
            assignment.push(w.add(&wbar).scale(&half));
        }

        let mut rho = Vec::with_capacity(d);
        for mu in 0..d {
            let w = Jet::variable(asp, k, n + mu);
            let wbar = Jet::variable(asp, k, nn + n + mu);
            let im_w = w.sub(&wbar).scale(&minus_half_i);
            let phi_amb = compose(&self.phi[mu], &assignment)?;
            rho.push(im_w.sub(&phi_amb));
        }
        let names: Vec<String> = self
            .cr_names
            .iter()
            .chain(self.normal_names.iter())
            .cloned()
            .collect();
        ExtrinsicManifold::new(names, rho, vec![Complex::zero(); n + d])
    }

    /// Components of the identity map of the ambient chart.
    pub fn identity_map(&self) -> Vec<Jet> {
        (0..self.n() + self.d())
            .map(|j| Jet::variable(&self.ambient_space, self.order, j))
            .collect()
    }
}

// =============================================================================
// Extrinsic form: rho(Z, conj Z) = 0
// =============================================================================

/// A generic submanifold given by defining functions over an ambient chart,
/// with a distinguished base point.
#[derive(Clone, Debug)]
pub struct ExtrinsicManifold {
    names: Vec<String>,
    space: Arc<VarSpace>,
    rho: Vec<Jet>,
    basepoint: Vec<Complex>,
    order: u32,
}

impl ExtrinsicManifold {
    pub fn make_space(names: &[String]) -> Arc<VarSpace> {
        let names: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        VarSpace::ambient(&names)
    }

    pub fn new(
        names: Vec<String>,
        rho: Vec<Jet>,
        basepoint: Vec<Complex>,
    ) -> Result<ExtrinsicManifold, ManifoldError> {
        let n_amb = names.len();
        let d = rho.len();
        if d == 0 || n_amb <= d {
            return Err(ManifoldError::BadDimensions(format!(
                "ambient dimension {n_amb} and codimension {d} leave no CR directions"
            )));
        }
        if basepoint.len() != n_amb {
            return Err(ManifoldError::BadDimensions(format!(
                "base point has {} coordinates, expected {n_amb}",
                basepoint.len()
            )));
        }
        let space = Self::make_space(&names);
        let at_origin = basepoint.iter().all(|c| c.is_zero());
        for (l, r) in rho.iter().enumerate() {
            if !same_space(r.space(), &space) {
                return Err(ManifoldError::SpaceMismatch);
            }
            if !r.is_real() {
                return Err(ManifoldError::NotReal(format!("rho_{}", l + 1)));
            }
            let value = if at_origin {
                r.eval0()
            } else {
                r.eval_point(&full_point(&space, &basepoint))?
            };
            if !value.is_zero() {
                return Err(ManifoldError::BasepointNotOnManifold {
                    index: l,
                    value: value.to_string(),
                });
            }
        }
        let m = ExtrinsicManifold {
            names,
            space,
            rho,
            basepoint,
            order: 0,
        };
        let order = m.rho.iter().map(|r| r.order()).min().unwrap();
        let m = ExtrinsicManifold { order, ..m };
        if linalg::rank(&m.gradient_at_basepoint()?, n_amb) != d {
            return Err(ManifoldError::GenericityFailure);
        }
        Ok(m)
    }

    pub fn ambient_dim(&self) -> usize {
        self.names.len()
    }

    pub fn d(&self) -> usize {
        self.rho.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn rho(&self) -> &[Jet] {
        &self.rho
    }

    pub fn basepoint(&self) -> &[Complex] {
        &self.basepoint
    }

    /// d x N matrix of complex gradients rho_Z evaluated at the base point.
    fn gradient_at_basepoint(&self) -> Result<Vec<Vec<Complex>>, ManifoldError> {
        let n_amb = self.ambient_dim();
        let at_origin = self.basepoint.iter().all(|c| c.is_zero());
        let point = full_point(&self.space, &self.basepoint);
        let mut rows = Vec::with_capacity(self.d());
        for r in &self.rho {
            let mut row = Vec::with_capacity(n_amb);
            for j in 0..n_amb {
                let dj = r.deriv(j)?;
                row.push(if at_origin {
                    dj.eval0()
                } else {
                    dj.eval_point(&point)?
                });
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Translate the base point to the origin.
    pub fn recenter(&self) -> Result<ExtrinsicManifold, ManifoldError> {
        if self.basepoint.iter().all(|c| c.is_zero()) {
            return Ok(self.clone());
        }
        let point = full_point(&self.space, &self.basepoint);
        let rho: Vec<Jet> = self
            .rho
            .iter()
            .map(|r| r.shift(&point))
            .collect::<Result<_, _>>()?;
        ExtrinsicManifold::new(
            self.names.clone(),
            rho,
            vec![Complex::zero(); self.ambient_dim()],
        )
    }

    /// Convert a recentered extrinsic manifold to graph form.
    ///
    /// Pivoted elimination on rho_Z(0) picks d normal directions; a complex
    /// linear change Z = A * Z_new makes the holomorphic linear part of the
    /// new defining functions exactly -(i/2) w (so the full linear part is
    /// Im w). The graph functions phi are then solved for by Newton
    /// iteration, doubling the correct degree each step.
    pub fn to_graph(&self) -> Result<(GraphManifold, LinearChange), ManifoldError> {
        assert!(
            self.basepoint.iter().all(|c| c.is_zero()),
            "convert after recentering"
        );
        let n_amb = self.ambient_dim();
        let d = self.d();
        let n = n_amb - d;
        let k = self.order;

        // pivot columns of the gradient matrix
        let grad = self.gradient_at_basepoint()?;
        let mut basis = linalg::RowBasis::new(n_amb);
        for row in &grad {
            basis.insert(row.clone());
        }
        if basis.rank() != d {
            return Err(ManifoldError::GenericityFailure);
        }
        let mut pivot_cols: Vec<usize> = basis.pivots().to_vec();
        pivot_cols.sort_unstable();
        let free_cols: Vec<usize> = (0..n_amb).filter(|c| !pivot_cols.contains(c)).collect();

        let g_pivot: Vec<Vec<Complex>> = grad
            .iter()
            .map(|row| pivot_cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let g_pivot_inv = linalg::mat_inverse(&g_pivot).ok_or(ManifoldError::GenericityFailure)?;

        // assemble A with old = A * new; columns: n CR directions then d normal
        let minus_half_i = Complex::new(
            crate::scalar::Surd::zero(),
            crate::scalar::Surd::from_rational(rat(-1, 2)),
        );
        let mut a = vec![vec![Complex::zero(); n_amb]; n_amb];
        for (j, &q) in free_cols.iter().enumerate() {
            a[q][j] = Complex::one();
            let g_col: Vec<Complex> = grad.iter().map(|row| row[q].clone()).collect();
            for (mu, &p) in pivot_cols.iter().enumerate() {
                let mut x = Complex::zero();
                for (nu, g) in g_col.iter().enumerate() {
                    x = &x + &(&g_pivot_inv[mu][nu] * g);
                }
                a[p][j] = -&x;
            }
        }
        for mu in 0..d {
            for (nu, &p) in pivot_cols.iter().enumerate() {
                a[p][n + mu] = &g_pivot_inv[nu][mu] * &minus_half_i;
            }
        }

        let cr_names: Vec<String> = free_cols.iter().map(|&q| self.names[q].clone()).collect();
        let normal_names: Vec<String> = pivot_cols.iter().map(|&p| self.names[p].clone()).collect();
        let s_names = unique_s_names(&cr_names, &normal_names, d);
        let new_ambient = GraphManifold::make_ambient_space(&cr_names, &normal_names);
        let graph_space = GraphManifold::make_graph_space(&cr_names, &s_names);

        let change = LinearChange {
            matrix: a,
            cr_columns: free_cols,
            normal_columns: pivot_cols,
            old_space: self.space.clone(),
            new_space: new_ambient.clone(),
            order: k,
        };

        // defining functions in the new coordinates
        let substitution = change.substitution();
        let rho_new: Vec<Jet> = self
            .rho
            .iter()
            .map(|r| compose(r, &substitution))
            .collect::<Result<_, _>>()?;

        // sanity: holomorphic linear part must now be [0 | -(i/2) I]
        for (l, r) in rho_new.iter().enumerate() {
            for j in 0..n {
                if !r.linear_coeff(j).is_zero() {
                    return Err(ManifoldError::Internal(format!(
                        "rho_{} kept a linear CR term after the coordinate change",
                        l + 1
                    )));
                }
            }
            for mu in 0..d {
                let expect = if mu == l {
                    minus_half_i.clone()
                } else {
                    Complex::zero()
                };
                if r.linear_coeff(n + mu) != expect {
                    return Err(ManifoldError::Internal(format!(
                        "rho_{} has an unexpected normal linear part",
                        l + 1
                    )));
                }
            }
        }

        let phi = solve_graph_newton(&rho_new, &graph_space, n, d, k)?;
        let m = GraphManifold::new(cr_names, normal_names, s_names, phi)?;
        Ok((m, change))
    }
}

fn unique_s_names(cr: &[String], normal: &[String], d: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(d);
    for mu in 0..d {
        let mut candidate = format!("s{}", mu + 1);
        while cr.contains(&candidate) || normal.contains(&candidate) || out.contains(&candidate) {
            candidate.push('_');
        }
        out.push(candidate);
    }
    out
}

/// Point vector over a full ambient space: holomorphic coordinates followed by
/// their conjugates.
fn full_point(space: &Arc<VarSpace>, basepoint: &[Complex]) -> Vec<Complex> {
    let mut point = vec![Complex::zero(); space.len()];
    for (j, b) in basepoint.iter().enumerate() {
        point[j] = b.clone();
        point[space.partner(j)] = b.conj();
    }
    point
}

/// Solve rho(z, s + i phi, conj z, s - i phi) = 0 for phi by Newton iteration.
fn solve_graph_newton(
    rho: &[Jet],
    graph_space: &Arc<VarSpace>,
    n: usize,
    d: usize,
    order: u32,
) -> Result<Vec<Jet>, ManifoldError> {
    let i_unit = Complex::i();
    let nn = n + d;
    let embedding = |phi: &[Jet]| -> Vec<Jet> {
        let mut assignment = Vec::with_capacity(2 * nn);
        for j in 0..n {
            assignment.push(Jet::variable(graph_space, order, j));
        }
        for (mu, p) in phi.iter().enumerate() {
            let s = Jet::variable(graph_space, order, 2 * n + mu);
            assignment.push(s.add(&p.scale(&i_unit)));
        }
        for j in 0..n {
            assignment.push(Jet::variable(graph_space, order, n + j));
        }
        for (mu, p) in phi.iter().enumerate() {
            let s = Jet::variable(graph_space, order, 2 * n + mu);
            assignment.push(s.sub(&p.scale(&i_unit)));
        }
        assignment
    };

    let mut phi: Vec<Jet> = (0..d).map(|_| Jet::zero(graph_space, order)).collect();
    let max_iter = 2 * (32 - order.leading_zeros()) + 4;
    for _ in 0..max_iter {
        let asgn = embedding(&phi);
        let residual: Vec<Jet> = rho
            .iter()
            .map(|r| compose(r, &asgn))
            .collect::<Result<_, JetError>>()?;
        if residual.iter().all(|r| r.is_zero()) {
            return Ok(phi);
        }
        // Jacobian d residual_l / d phi_mu = i (rho_{l,w_mu} - rho_{l,wbar_mu}) o embedding
        let mut jac_entries = Vec::with_capacity(d * d);
        for r in rho {
            for mu in 0..d {
                let dw = compose(&r.deriv(n + mu)?, &asgn)?;
                let dwbar = compose(&r.deriv(nn + n + mu)?, &asgn)?;
                jac_entries.push(dw.sub(&dwbar).scale(&i_unit));
            }
        }
        let jac = JetMatrix::from_fn(d, d, |r, c| jac_entries[r * d + c].clone());
        let jac_inv = jac.invert_unit()?;
        let mut next = Vec::with_capacity(d);
        for (mu, p) in phi.iter().enumerate() {
            let mut delta = Jet::zero(graph_space, order);
            for (l, res) in residual.iter().enumerate() {
                delta = delta.add(&jac_inv.get(mu, l).mul(res));
            }
            next.push(p.sub(&delta).truncate(order));
        }
        phi = next;
    }
    Err(ManifoldError::Internal(
        "graph-form Newton iteration did not converge".into(),
    ))
}

// =============================================================================
// Linear coordinate changes
// =============================================================================

/// Record of the complex-linear source change old = A * new chosen by
/// [`ExtrinsicManifold::to_graph`]; applied to map components so they live in
/// the new chart.
#[derive(Clone, Debug)]
pub struct LinearChange {
    pub matrix: Vec<Vec<Complex>>,
    /// Old columns that became CR directions, in order.
    pub cr_columns: Vec<usize>,
    /// Old columns that became normal directions, in order.
    pub normal_columns: Vec<usize>,
    old_space: Arc<VarSpace>,
    new_space: Arc<VarSpace>,
    order: u32,
}

impl LinearChange {
    pub fn identity(space: &Arc<VarSpace>, n_amb: usize, order: u32) -> LinearChange {
        let mut matrix = vec![vec![Complex::zero(); n_amb]; n_amb];
        for (j, row) in matrix.iter_mut().enumerate() {
            row[j] = Complex::one();
        }
        LinearChange {
            matrix,
            cr_columns: (0..n_amb).collect(),
            normal_columns: Vec::new(),
            old_space: space.clone(),
            new_space: space.clone(),
            order,
        }
    }

    /// Assignment substituting old variables by their expressions in the new
    /// chart, conjugate slots included.
    fn substitution(&self) -> Vec<Jet> {
        let n_amb = self.matrix.len();
        let k = self.order;
        let mut assignment = Vec::with_capacity(2 * n_amb);
        for old in 0..n_amb {
            let mut jet = Jet::zero(&self.new_space, k);
            for new in 0..n_amb {
                if !self.matrix[old][new].is_zero() {
                    jet = jet.add(
                        &Jet::variable(&self.new_space, k, new).scale(&self.matrix[old][new]),
                    );
                }
            }
            assignment.push(jet);
        }
        for old in 0..n_amb {
            assignment.push(assignment[old].conj_swap());
        }
        assignment
    }

    /// Rewrite holomorphic map components in the new chart.
    pub fn apply_to_map(&self, components: &[Jet]) -> Result<Vec<Jet>, ManifoldError> {
        let substitution = self.substitution();
        components
            .iter()
            .map(|h| {
                if !same_space(h.space(), &self.old_space) {
                    return Err(ManifoldError::SpaceMismatch);
                }
                Ok(compose(h, &substitution)?)
            })
            .collect()
    }
}

// =============================================================================
// CR maps
// =============================================================================

/// A polynomial CR map given by holomorphic components over the source
/// ambient chart, together with the base points it is centered at.
#[derive(Clone, Debug)]
pub struct CrMap {
    pub components: Vec<Jet>,
    pub source_basepoint: Vec<Complex>,
    pub target_basepoint: Vec<Complex>,
}

impl CrMap {
    pub fn new(
        components: Vec<Jet>,
        source_basepoint: Vec<Complex>,
        target_basepoint: Vec<Complex>,
    ) -> Result<CrMap, ManifoldError> {
        if components.is_empty() {
            return Err(ManifoldError::BadDimensions(
                "map needs at least one component".into(),
            ));
        }
        if components.len() != target_basepoint.len() {
            return Err(ManifoldError::BadDimensions(format!(
                "map has {} components but the target base point has {} coordinates",
                components.len(),
                target_basepoint.len()
            )));
        }
        let space = components[0].space().clone();
        for c in &components {
            if !same_space(c.space(), &space) {
                return Err(ManifoldError::SpaceMismatch);
            }
            for (m, _) in c.terms() {
                for (idx, &e) in m.exps().iter().enumerate() {
                    if e > 0 && space.var(idx).kind != crate::jet::VarKind::Holomorphic {
                        return Err(ManifoldError::NotNormalized(format!(
                            "map components must be holomorphic; found {}",
                            space.display_name(idx)
                        )));
                    }
                }
            }
        }
        Ok(CrMap {
            components,
            source_basepoint,
            target_basepoint,
        })
    }

    /// Shift so that the map sends 0 to 0: H_new(Z) = H(Z + p) - p'.
    pub fn recenter(&self) -> Result<CrMap, ManifoldError> {
        let space = self.components[0].space().clone();
        let order = self.components[0].order();
        let point = full_point(&space, &self.source_basepoint);
        let mut components = Vec::with_capacity(self.components.len());
        for (nu, c) in self.components.iter().enumerate() {
            let shifted = c.shift(&point)?;
            let offset = Jet::constant(&space, order, self.target_basepoint[nu].clone());
            let recentered = shifted.sub(&offset);
            let at_zero = recentered.eval0();
            if !at_zero.is_zero() {
                let value = &at_zero + &self.target_basepoint[nu];
                return Err(ManifoldError::MapBasepointMismatch {
                    component: nu,
                    value: value.to_string(),
                });
            }
            components.push(recentered);
        }
        Ok(CrMap {
            components,
            source_basepoint: vec![Complex::zero(); self.source_basepoint.len()],
            target_basepoint: vec![Complex::zero(); self.target_basepoint.len()],
        })
    }
}

// =============================================================================
// Tangency verification
// =============================================================================

/// Diagnostic for a map that fails to send the source into the target.
#[derive(Clone, Debug)]
pub struct TangencyFailure {
    /// 1-based index of the offending defining function.
    pub rho_index: usize,
    /// Graded-lex-first nonzero term of the residual.
    pub term: String,
    pub residual: String,
}

impl fmt::Display for TangencyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "map does not send the source manifold into the target: rho_{} pulled back and restricted has nonzero term {} (full residual: {})",
            self.rho_index, self.term, self.residual
        )
    }
}

/// Pull the target defining functions back along the map and restrict to the
/// source manifold; all residuals must vanish identically to the working
/// order.
pub fn verify_maps_into_target(
    components: &[Jet],
    source: &GraphManifold,
    target: &ExtrinsicManifold,
) -> Result<(), ManifoldError> {
    let residuals = pullback_residuals(components, source, target)?;
    for (l, r) in residuals.iter().enumerate() {
        if !r.is_zero() {
            let (m, c) = r.terms().next().expect("nonzero jet has a term");
            let term = format!("{}*{}", c, crate::expr::monomial_to_string(r.space(), m));
            return Err(ManifoldError::Tangency(Box::new(TangencyFailure {
                rho_index: l + 1,
                term,
                residual: jet_to_string(r),
            })));
        }
    }
    Ok(())
}

/// The jets rho'_l(H, conj H) restricted to the source manifold.
pub fn pullback_residuals(
    components: &[Jet],
    source: &GraphManifold,
    target: &ExtrinsicManifold,
) -> Result<Vec<Jet>, ManifoldError> {
    let assignment = pullback_assignment(components, source, target)?;
    target
        .rho()
        .iter()
        .map(|r| Ok(compose(r, &assignment)?))
        .collect()
}

/// Assignment sending target ambient variables to the restricted map
/// components (and their conjugates), shared by tangency verification and the
/// gradient pullback.
pub fn pullback_assignment(
    components: &[Jet],
    source: &GraphManifold,
    target: &ExtrinsicManifold,
) -> Result<Vec<Jet>, ManifoldError> {
    let n_prime = target.ambient_dim();
    if components.len() != n_prime {
        return Err(ManifoldError::BadDimensions(format!(
            "map has {} components but the target ambient dimension is {n_prime}",
            components.len()
        )));
    }
    let mut restricted = Vec::with_capacity(n_prime);
    for c in components {
        restricted.push(source.restrict(c)?);
    }
    let mut assignment = Vec::with_capacity(2 * n_prime);
    for r in &restricted {
        assignment.push(r.clone());
    }
    for r in &restricted {
        assignment.push(r.conj_swap());
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_jet;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// Im w = |z|^2 as a graph manifold.
    fn quadric(order: u32) -> GraphManifold {
        let gs = GraphManifold::make_graph_space(&names(&["z"]), &names(&["s"]));
        let phi = parse_jet("z*conj(z)", &gs, order).unwrap();
        GraphManifold::new(names(&["z"]), names(&["w"]), names(&["s"]), vec![phi]).unwrap()
    }

    /// Im w = |z|^4 as a graph manifold.
    fn quartic(order: u32) -> GraphManifold {
        let gs = GraphManifold::make_graph_space(&names(&["z"]), &names(&["s"]));
        let phi = parse_jet("z^2*conj(z)^2", &gs, order).unwrap();
        GraphManifold::new(names(&["z"]), names(&["w"]), names(&["s"]), vec![phi]).unwrap()
    }

    #[test]
    fn graph_manifold_validates_normalization() {
        let gs = GraphManifold::make_graph_space(&names(&["z"]), &names(&["s"]));
        // phi must be real
        let bad = parse_jet("i*z*conj(z)", &gs, 4).unwrap();
        assert!(matches!(
            GraphManifold::new(names(&["z"]), names(&["w"]), names(&["s"]), vec![bad]),
            Err(ManifoldError::NotReal(_))
        ));
        // d phi(0) must vanish
        let bad = parse_jet("z + conj(z)", &gs, 4).unwrap();
        assert!(matches!(
            GraphManifold::new(names(&["z"]), names(&["w"]), names(&["s"]), vec![bad]),
            Err(ManifoldError::NotNormalized(_))
        ));
    }

    #[test]
    fn restrict_examples() {
        let m = quadric(6);
        let asp = m.ambient_space().clone();
        let gs = m.graph_space().clone();

        // restrict(w) = s + i z conj(z)
        let w = Jet::variable(&asp, 6, 1);
        let got = m.restrict(&w).unwrap();
        let expect = parse_jet("s + i*z*conj(z)", &gs, 6).unwrap();
        assert!(got.eq_terms(&expect));

        // restrict(w - conj w) = 2 i z conj(z)
        let diff = w.sub(&Jet::variable(&asp, 6, 3));
        let got = m.restrict(&diff).unwrap();
        let expect = parse_jet("2*i*z*conj(z)", &gs, 6).unwrap();
        assert!(got.eq_terms(&expect));

        // restrict of the defining function is identically zero
        let rho = parse_jet("-1/2*i*(w - conj(w)) - z*conj(z)", &asp, 6).unwrap();
        assert!(m.restrict(&rho).unwrap().is_zero());
    }

    #[test]
    fn restrict_is_ring_homomorphism() {
        let m = quartic(6);
        let asp = m.ambient_space().clone();
        let a = parse_jet("z*w - conj(z)", &asp, 6).unwrap();
        let b = parse_jet("w + z^2", &asp, 6).unwrap();
        let lhs = m.restrict(&a.mul(&b)).unwrap();
        let rhs = m.restrict(&a).unwrap().mul(&m.restrict(&b).unwrap());
        assert!(lhs.eq_to_order(&rhs, 6));
        let lhs = m.restrict(&a.add(&b)).unwrap();
        let rhs = m.restrict(&a).unwrap().add(&m.restrict(&b).unwrap());
        assert!(lhs.eq_terms(&rhs));
    }

    #[test]
    fn restriction_preserves_realness() {
        let m = quadric(6);
        let asp = m.ambient_space().clone();
        let real_ambient = parse_jet("w*conj(w) + z*conj(z) + w + conj(w)", &asp, 6).unwrap();
        assert!(real_ambient.is_real());
        assert!(m.restrict(&real_ambient).unwrap().is_real());
    }

    #[test]
    fn recenter_sphere_at_pole() {
        // |z1|^2 + |z2|^2 - 1 at (1, 0) becomes z1 + conj z1 + |z1|^2 + |z2|^2
        let sp = ExtrinsicManifold::make_space(&names(&["Z1", "Z2"]));
        let rho = parse_jet("Z1*conj(Z1) + Z2*conj(Z2) - 1", &sp, 8).unwrap();
        let m = ExtrinsicManifold::new(
            names(&["Z1", "Z2"]),
            vec![rho],
            vec![Complex::one(), Complex::zero()],
        )
        .unwrap();
        let r = m.recenter().unwrap();
        let expect = parse_jet("Z1 + conj(Z1) + Z1*conj(Z1) + Z2*conj(Z2)", &sp, 8).unwrap();
        assert!(r.rho()[0].eq_terms(&expect));
        assert_eq!(r.rho()[0].eval0(), Complex::zero());
    }

    #[test]
    fn basepoint_must_lie_on_manifold() {
        let sp = ExtrinsicManifold::make_space(&names(&["Z1", "Z2"]));
        let rho = parse_jet("Z1*conj(Z1) + Z2*conj(Z2) - 1", &sp, 8).unwrap();
        let err = ExtrinsicManifold::new(
            names(&["Z1", "Z2"]),
            vec![rho],
            vec![Complex::from_int(2), Complex::zero()],
        )
        .unwrap_err();
        assert!(matches!(err, ManifoldError::BasepointNotOnManifold { .. }));
    }

    #[test]
    fn degenerate_gradient_fails_genericity() {
        // rho = |Z1|^2 + |Z2|^2 vanishes at 0 but its complex gradient does
        // too, so 0 is not a generic point
        let sp = ExtrinsicManifold::make_space(&names(&["Z1", "Z2"]));
        let rho = parse_jet("Z1*conj(Z1) + Z2*conj(Z2)", &sp, 6).unwrap();
        let err =
            ExtrinsicManifold::new(names(&["Z1", "Z2"]), vec![rho], vec![Complex::zero(); 2])
                .unwrap_err();
        assert!(matches!(err, ManifoldError::GenericityFailure));
    }

    #[test]
    fn recenter_map_examples() {
        // identity at 0 stays put
        let sp = VarSpace::ambient(&["z", "w"]);
        let ident = vec![Jet::variable(&sp, 6, 0), Jet::variable(&sp, 6, 1)];
        let map = CrMap::new(
            ident.clone(),
            vec![Complex::zero(); 2],
            vec![Complex::zero(); 2],
        )
        .unwrap();
        let r = map.recenter().unwrap();
        assert!(r.components[0].eq_terms(&ident[0]));

        // H(z1,z2) = (z1, z1 z2, z2^2) at (1,0) -> (1,0,0) recenters to
        // (z1, z2 + z1 z2, z2^2)
        let sp = VarSpace::ambient(&["z1", "z2"]);
        let comps = vec![
            parse_jet("z1", &sp, 6).unwrap(),
            parse_jet("z1*z2", &sp, 6).unwrap(),
            parse_jet("z2^2", &sp, 6).unwrap(),
        ];
        let map = CrMap::new(
            comps,
            vec![Complex::one(), Complex::zero()],
            vec![Complex::one(), Complex::zero(), Complex::zero()],
        )
        .unwrap();
        let r = map.recenter().unwrap();
        assert!(r.components[0].eq_terms(&parse_jet("z1", &sp, 6).unwrap()));
        assert!(r.components[1].eq_terms(&parse_jet("z2 + z1*z2", &sp, 6).unwrap()));
        assert!(r.components[2].eq_terms(&parse_jet("z2^2", &sp, 6).unwrap()));
    }

    #[test]
    fn recenter_map_rejects_mismatch() {
        let sp = VarSpace::ambient(&["z"]);
        let comps = vec![parse_jet("z^2", &sp, 4).unwrap()];
        let map = CrMap::new(comps, vec![Complex::one()], vec![Complex::from_int(3)]).unwrap();
        assert!(matches!(
            map.recenter().unwrap_err(),
            ManifoldError::MapBasepointMismatch { component: 0, .. }
        ));
    }

    #[test]
    fn to_graph_recovers_quadric_with_identity_change() {
        // rho = (w - conj w)/2i - z conj z is already solved for Im w
        let sp = ExtrinsicManifold::make_space(&names(&["z", "w"]));
        let rho = parse_jet("-1/2*i*(w - conj(w)) - z*conj(z)", &sp, 8).unwrap();
        let m = ExtrinsicManifold::new(names(&["z", "w"]), vec![rho], vec![Complex::zero(); 2])
            .unwrap();
        let (g, change) = m.to_graph().unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.d(), 1);
        let expect = parse_jet("z*conj(z)", g.graph_space(), 8).unwrap();
        assert!(g.phi()[0].eq_terms(&expect));
        // identity change
        for r in 0..2 {
            for c in 0..2 {
                let expect = if r == c { Complex::one() } else { Complex::zero() };
                assert_eq!(change.matrix[r][c], expect);
            }
        }
    }

    #[test]
    fn to_graph_recovers_quartic() {
        let sp = ExtrinsicManifold::make_space(&names(&["z", "w"]));
        let rho = parse_jet("-1/2*i*(w - conj(w)) - z^2*conj(z)^2", &sp, 9).unwrap();
        let m = ExtrinsicManifold::new(names(&["z", "w"]), vec![rho], vec![Complex::zero(); 2])
            .unwrap();
        let (g, _) = m.to_graph().unwrap();
        let expect = parse_jet("z^2*conj(z)^2", g.graph_space(), 9).unwrap();
        assert!(g.phi()[0].eq_terms(&expect));
    }

    #[test]
    fn to_graph_sphere_residual_vanishes() {
        // recentered sphere: the graph embedding must annihilate rho
        let sp = ExtrinsicManifold::make_space(&names(&["Z1", "Z2"]));
        let rho = parse_jet("Z1 + conj(Z1) + Z1*conj(Z1) + Z2*conj(Z2)", &sp, 9).unwrap();
        let m = ExtrinsicManifold::new(names(&["Z1", "Z2"]), vec![rho], vec![Complex::zero(); 2])
            .unwrap();
        let (g, change) = m.to_graph().unwrap();
        assert_eq!(g.n(), 1);
        // substitute old coordinates expressed in new ones, then restrict
        let rho_new = compose(&m.rho()[0], &change.substitution()).unwrap();
        let restricted = g.restrict(&rho_new).unwrap();
        assert!(restricted.is_zero(), "graph embedding residual: {restricted:?}");
        // phi is real and normalized by construction
        assert!(g.phi()[0].is_real());
    }

    #[test]
    fn verify_quadric_quartic_map() {
        // H(z,w) = (z^2, w) sends Im w = |z|^4 into Im w = |z|^2
        let source = quartic(8);
        let target = quadric(8).to_extrinsic().unwrap();
        let asp = source.ambient_space().clone();
        let h = vec![
            parse_jet("z^2", &asp, 8).unwrap(),
            parse_jet("w", &asp, 8).unwrap(),
        ];
        assert!(verify_maps_into_target(&h, &source, &target).is_ok());

        // H(z,w) = (z, 2w) does not
        let bad = vec![
            parse_jet("z", &asp, 8).unwrap(),
            parse_jet("2*w", &asp, 8).unwrap(),
        ];
        let target2 = quadric(8).to_extrinsic().unwrap();
        let source2 = quadric(8);
        match verify_maps_into_target(&bad, &source2, &target2).unwrap_err() {
            ManifoldError::Tangency(t) => assert_eq!(t.rho_index, 1),
            other => panic!("expected a tangency failure, got {other}"),
        }
    }

    #[test]
    fn verify_codimension_two_target() {
        // H(z,w) = (z, w, w) into Im w1 = Im w2 = |z|^2
        let source = quadric(8);
        let tg_space = GraphManifold::make_graph_space(&names(&["zp"]), &names(&["t1", "t2"]));
        let phi1 = parse_jet("zp*conj(zp)", &tg_space, 8).unwrap();
        let phi2 = phi1.clone();
        let target = GraphManifold::new(
            names(&["zp"]),
            names(&["w1", "w2"]),
            names(&["t1", "t2"]),
            vec![phi1, phi2],
        )
        .unwrap()
        .to_extrinsic()
        .unwrap();
        let asp = source.ambient_space().clone();
        let h = vec![
            parse_jet("z", &asp, 8).unwrap(),
            parse_jet("w", &asp, 8).unwrap(),
            parse_jet("w", &asp, 8).unwrap(),
        ];
        assert!(verify_maps_into_target(&h, &source, &target).is_ok());
    }
}
