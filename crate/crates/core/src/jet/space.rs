//! Typed variable spaces.
//!
//! A space is an ordered list of variables, each holomorphic, antiholomorphic
//! or real. Holomorphic variables are paired with their antiholomorphic
//! partners; real variables are their own partners. Conjugation of a jet swaps
//! exponents along this pairing.

use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarKind {
    Holomorphic,
    Antiholomorphic,
    Real,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VarInfo {
    pub name: String,
    pub kind: VarKind,
    /// Index of the conjugate partner (self for real variables).
    pub partner: usize,
}

#[derive(Clone, PartialEq, Eq)]
pub struct VarSpace {
    vars: Vec<VarInfo>,
}

impl VarSpace {
    /// Ambient space of a complex chart: the holomorphic coordinates followed
    /// by their antiholomorphic partners.
    pub fn ambient(hol_names: &[&str]) -> Arc<VarSpace> {
        let n = hol_names.len();
        let mut vars = Vec::with_capacity(2 * n);
        for (j, name) in hol_names.iter().enumerate() {
            vars.push(VarInfo {
                name: name.to_string(),
                kind: VarKind::Holomorphic,
                partner: n + j,
            });
        }
        for (j, name) in hol_names.iter().enumerate() {
            vars.push(VarInfo {
                name: name.to_string(),
                kind: VarKind::Antiholomorphic,
                partner: j,
            });
        }
        Arc::new(VarSpace { vars })
    }

    /// Graph-chart space (z, conj z, s) with `cr_names` holomorphic and
    /// `s_names` real.
    pub fn graph(cr_names: &[&str], s_names: &[&str]) -> Arc<VarSpace> {
        let n = cr_names.len();
        let mut vars = Vec::with_capacity(2 * n + s_names.len());
        for (j, name) in cr_names.iter().enumerate() {
            vars.push(VarInfo {
                name: name.to_string(),
                kind: VarKind::Holomorphic,
                partner: n + j,
            });
        }
        for (j, name) in cr_names.iter().enumerate() {
            vars.push(VarInfo {
                name: name.to_string(),
                kind: VarKind::Antiholomorphic,
                partner: j,
            });
        }
        for (j, name) in s_names.iter().enumerate() {
            vars.push(VarInfo {
                name: name.to_string(),
                kind: VarKind::Real,
                partner: 2 * n + j,
            });
        }
        Arc::new(VarSpace { vars })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var(&self, idx: usize) -> &VarInfo {
        &self.vars[idx]
    }

    pub fn vars(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn partner(&self, idx: usize) -> usize {
        self.vars[idx].partner
    }

    /// Resolve a name to its directly referable variable (holomorphic or
    /// real); antiholomorphic variables are only reachable through conj().
    pub fn resolve(&self, name: &str) -> Option<usize> {
        self.vars
            .iter()
            .position(|v| v.kind != VarKind::Antiholomorphic && v.name == name)
    }

    /// Indices of the holomorphic variables, in order.
    pub fn holomorphic(&self) -> Vec<usize> {
        self.indices_of(VarKind::Holomorphic)
    }

    /// Indices of the real variables, in order.
    pub fn real(&self) -> Vec<usize> {
        self.indices_of(VarKind::Real)
    }

    fn indices_of(&self, kind: VarKind) -> Vec<usize> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    /// Printable name: antiholomorphic variables render as conj(name).
    pub fn display_name(&self, idx: usize) -> String {
        let v = &self.vars[idx];
        match v.kind {
            VarKind::Antiholomorphic => format!("conj({})", v.name),
            _ => v.name.clone(),
        }
    }
}

impl fmt::Debug for VarSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.len()).map(|i| self.display_name(i)).collect();
        write!(f, "VarSpace[{}]", names.join(", "))
    }
}

/// Structural equality between (possibly distinct) Arc instances.
pub fn same_space(a: &Arc<VarSpace>, b: &Arc<VarSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partner_is_kind_swapping_involution() {
        let sp = VarSpace::graph(&["z1", "z2"], &["s"]);
        for idx in 0..sp.len() {
            let p = sp.partner(idx);
            assert_eq!(sp.partner(p), idx);
            match sp.var(idx).kind {
                VarKind::Holomorphic => assert_eq!(sp.var(p).kind, VarKind::Antiholomorphic),
                VarKind::Antiholomorphic => assert_eq!(sp.var(p).kind, VarKind::Holomorphic),
                VarKind::Real => assert_eq!(p, idx),
            }
        }
    }

    #[test]
    fn resolve_skips_antiholomorphic() {
        let sp = VarSpace::ambient(&["z", "w"]);
        assert_eq!(sp.resolve("z"), Some(0));
        assert_eq!(sp.resolve("w"), Some(1));
        assert_eq!(sp.resolve("nope"), None);
        assert_eq!(sp.display_name(2), "conj(z)");
    }
}
