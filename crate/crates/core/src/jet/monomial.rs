//! Exponent vectors with graded-lexicographic ordering.

use std::cmp::Ordering;

/// Exponent vector of a monomial, one entry per variable of the space.
///
/// Ordered graded-lexicographically: first by total degree, then lex on the
/// exponents. This is the canonical iteration and printing order everywhere.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            exps: vec![0; nvars],
        }
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[idx] = 1;
        Monomial { exps }
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn exp(&self, idx: usize) -> u32 {
        self.exps[idx]
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Decrement the exponent of `idx`; None if it is already zero.
    pub fn step_down(&self, idx: usize) -> Option<Monomial> {
        if self.exps[idx] == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[idx] -= 1;
        Some(Monomial { exps })
    }

    /// Permute the exponents: entry i of the result is the exponent of perm[i].
    pub fn permute(&self, perm: &[usize]) -> Monomial {
        Monomial {
            exps: perm.iter().map(|&p| self.exps[p]).collect(),
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

/// All exponent vectors over `nvars` slots of total degree exactly `degree`,
/// in increasing lexicographic order.
pub fn compositions(nvars: usize, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(cur: &mut Vec<u32>, pos: usize, rem: u32, out: &mut Vec<Monomial>) {
        if pos + 1 == cur.len() {
            cur[pos] = rem;
            out.push(Monomial::from_exps(cur.clone()));
            return;
        }
        for e in 0..=rem {
            cur[pos] = e;
            rec(cur, pos + 1, rem - e, out);
        }
    }
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    rec(&mut cur, 0, degree, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let m = |e: &[u32]| Monomial::from_exps(e.to_vec());
        assert!(m(&[0, 0]) < m(&[0, 1]));
        assert!(m(&[0, 1]) < m(&[1, 0]));
        assert!(m(&[1, 0]) < m(&[0, 2]));
        assert!(m(&[0, 2]) < m(&[1, 1]));
        assert!(m(&[1, 1]) < m(&[2, 0]));
    }

    #[test]
    fn compositions_enumerate_in_lex_order() {
        let cs = compositions(3, 2);
        let got: Vec<Vec<u32>> = cs.iter().map(|m| m.exps().to_vec()).collect();
        assert_eq!(
            got,
            vec![
                vec![0, 0, 2],
                vec![0, 1, 1],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 0, 0],
            ]
        );
        let mut sorted = cs.clone();
        sorted.sort();
        assert_eq!(sorted, cs);
    }
}
