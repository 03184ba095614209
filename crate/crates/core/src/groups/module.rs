use std::fmt::Debug;

use crate::phase::{C64, ONE};
use crate::{Error, Result};

/// Coefficients of a cochain: an abelian group written multiplicatively with
/// a left action of the group.
pub trait Coefficients: Clone + Debug {
    type Elem: Clone + Debug + PartialEq;

    fn one(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    fn act(&self, g: usize, a: &Self::Elem) -> Self::Elem;
    /// Zero iff equal; finite modules return 0 or 1.
    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> f64;
    fn label(&self) -> String;
}

/// U(1) with trivial action.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct U1;

impl Coefficients for U1 {
    type Elem = C64;

    fn one(&self) -> C64 {
        ONE
    }
    fn op(&self, a: &C64, b: &C64) -> C64 {
        a * b
    }
    fn inverse(&self, a: &C64) -> C64 {
        a.conj()
    }
    fn act(&self, _g: usize, a: &C64) -> C64 {
        *a
    }
    fn distance(&self, a: &C64, b: &C64) -> f64 {
        (a - b).norm()
    }
    fn label(&self) -> String {
        "u1".into()
    }
}

/// A finite abelian group `Z_{m₁} × … × Z_{m_r}` with an action of a finite
/// group by automorphisms. Elements are indices in mixed radix, first factor
/// least significant; index 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModule {
    factors: Vec<u64>,
    /// `action[g][m]`.
    action: Vec<Vec<usize>>,
}

impl FiniteModule {
    /// Module with trivial action of a group of the given order.
    pub fn trivial(factors: &[u64], group_order: usize) -> Self {
        let size: u64 = factors.iter().product();
        let id: Vec<usize> = (0..size as usize).collect();
        Self {
            factors: factors.to_vec(),
            action: vec![id; group_order],
        }
    }

    /// Module with an explicit action table `action[g][m]`, validated against
    /// the group: each `ρ_g` is an automorphism and `ρ_g ρ_h = ρ_{gh}`.
    pub fn with_action(
        factors: &[u64],
        action: Vec<Vec<usize>>,
        group: &super::FiniteGroup,
    ) -> Result<Self> {
        let m = Self {
            factors: factors.to_vec(),
            action,
        };
        let size = m.size();
        if m.action.len() != group.order() || m.action.iter().any(|r| r.len() != size) {
            return Err(Error::InvalidInput("module action table has the wrong shape".into()));
        }
        for g in group.elements() {
            for a in 0..size {
                for b in 0..size {
                    if m.act_idx(g, m.add(a, b)) != m.add(m.act_idx(g, a), m.act_idx(g, b)) {
                        return Err(Error::InvalidInput(format!(
                            "module action of {g} is not a homomorphism"
                        )));
                    }
                }
            }
            let mut seen = vec![false; size];
            for a in 0..size {
                seen[m.act_idx(g, a)] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::InvalidInput(format!("module action of {g} is not bijective")));
            }
            for h in group.elements() {
                for a in 0..size {
                    if m.act_idx(g, m.act_idx(h, a)) != m.act_idx(group.mul(g, h), a) {
                        return Err(Error::InvalidInput("module action is not a group action".into()));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn size(&self) -> usize {
        self.factors.iter().product::<u64>() as usize
    }

    pub fn is_trivial_action(&self) -> bool {
        self.action
            .iter()
            .all(|row| row.iter().enumerate().all(|(i, &j)| i == j))
    }

    pub fn residues(&self, mut a: usize) -> Vec<u64> {
        self.factors
            .iter()
            .map(|&m| {
                let d = a as u64 % m;
                a /= m as usize;
                d
            })
            .collect()
    }

    pub fn from_residues(&self, r: &[i128]) -> usize {
        let mut x = 0usize;
        for (i, &m) in self.factors.iter().enumerate().rev() {
            x = x * m as usize + r[i].rem_euclid(m as i128) as usize;
        }
        x
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.residues(a), self.residues(b));
        let s: Vec<i128> = ra.iter().zip(&rb).map(|(x, y)| (*x + *y) as i128).collect();
        self.from_residues(&s)
    }

    pub fn neg(&self, a: usize) -> usize {
        let s: Vec<i128> = self.residues(a).iter().map(|&x| -(x as i128)).collect();
        self.from_residues(&s)
    }

    #[inline]
    pub fn act_idx(&self, g: usize, a: usize) -> usize {
        self.action[g][a]
    }

    /// Integer lift of `ρ_g` in the residue basis: column `j` holds the
    /// residues of `ρ_g(e_j)`.
    pub fn action_matrix(&self, g: usize) -> Vec<Vec<i128>> {
        let r = self.factors.len();
        let mut m = vec![vec![0i128; r]; r];
        for j in 0..r {
            let mut e = vec![0i128; r];
            e[j] = 1;
            let img = self.residues(self.act_idx(g, self.from_residues(&e)));
            for i in 0..r {
                m[i][j] = img[i] as i128;
            }
        }
        m
    }
}

impl Coefficients for FiniteModule {
    type Elem = usize;

    fn one(&self) -> usize {
        0
    }
    fn op(&self, a: &usize, b: &usize) -> usize {
        self.add(*a, *b)
    }
    fn inverse(&self, a: &usize) -> usize {
        self.neg(*a)
    }
    fn act(&self, g: usize, a: &usize) -> usize {
        self.act_idx(g, *a)
    }
    fn distance(&self, a: &usize, b: &usize) -> f64 {
        if a == b {
            0.0
        } else {
            1.0
        }
    }
    fn label(&self) -> String {
        self.factors
            .iter()
            .map(|m| format!("Z{m}"))
            .collect::<Vec<_>>()
            .join("x")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;

    #[test]
    fn residue_arithmetic() {
        let m = FiniteModule::trivial(&[2, 4], 1);
        assert_eq!(m.size(), 8);
        let a = m.from_residues(&[1, 3]);
        assert_eq!(m.residues(a), vec![1, 3]);
        assert_eq!(m.add(a, a), m.from_residues(&[0, 2]));
        assert_eq!(m.add(a, m.neg(a)), 0);
    }

    #[test]
    fn swap_action_on_z2xz2() {
        let g = FiniteGroup::cyclic(2);
        // Z2 swapping the two factors: e=(1,0) <-> m=(0,1).
        let action = vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]];
        let m = FiniteModule::with_action(&[2, 2], action, &g).unwrap();
        assert_eq!(m.action_matrix(1), vec![vec![0, 1], vec![1, 0]]);
        let bad = vec![vec![0, 1, 2, 3], vec![0, 2, 3, 1]];
        assert!(FiniteModule::with_action(&[2, 2], bad, &g).is_err());
    }
}
