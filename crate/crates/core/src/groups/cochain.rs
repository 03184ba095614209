use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::group::tuples;
use super::module::{Coefficients, FiniteModule, U1};
use super::FiniteGroup;
use crate::phase::{PhaseValue, C64, DEFAULT_TOL};
use crate::{Error, Result};

/// A normalized `n`-cochain `Gⁿ → M`, stored densely.
#[derive(Debug, Clone)]
pub struct Cochain<M: Coefficients> {
    group: Arc<FiniteGroup>,
    module: M,
    degree: usize,
    values: Vec<M::Elem>,
}

impl<M: Coefficients + PartialEq> PartialEq for Cochain<M> {
    /// Exact equality of group, module and values.
    fn eq(&self, other: &Self) -> bool {
        *self.group == *other.group && self.module == other.module && self.degree == other.degree && self.values == other.values
    }
}

pub type PhaseCochain = Cochain<U1>;
pub type ModuleCochain = Cochain<FiniteModule>;

impl<M: Coefficients> Cochain<M> {
    pub fn identity(group: Arc<FiniteGroup>, module: M, degree: usize) -> Self {
        let size = group.order().pow(degree as u32);
        let one = module.one();
        Self {
            group,
            module,
            degree,
            values: vec![one; size],
        }
    }

    /// Build from a function on tuples; rejects non-normalized input.
    pub fn from_fn(
        group: Arc<FiniteGroup>,
        module: M,
        degree: usize,
        mut f: impl FnMut(&[usize]) -> M::Elem,
    ) -> Result<Self> {
        let values: Vec<M::Elem> = tuples(group.order(), degree).map(|t| f(&t)).collect();
        let c = Self {
            group,
            module,
            degree,
            values,
        };
        c.check_normalized()?;
        Ok(c)
    }

    /// Like [`Cochain::from_fn`] with a fallible closure.
    pub fn try_from_fn(
        group: Arc<FiniteGroup>,
        module: M,
        degree: usize,
        mut f: impl FnMut(&[usize]) -> Result<M::Elem>,
    ) -> Result<Self> {
        let values = tuples(group.order(), degree)
            .map(|t| f(&t))
            .collect::<Result<Vec<_>>>()?;
        let c = Self {
            group,
            module,
            degree,
            values,
        };
        c.check_normalized()?;
        Ok(c)
    }

    fn check_normalized(&self) -> Result<()> {
        let e = self.group.identity();
        let one = self.module.one();
        for (t, v) in tuples(self.group.order(), self.degree).zip(&self.values) {
            if t.contains(&e) && self.module.distance(v, &one) > DEFAULT_TOL {
                return Err(Error::InvalidInput(format!(
                    "cochain is not normalized at {t:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn module(&self) -> &M {
        &self.module
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn index(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.degree);
        let n = self.group.order();
        args.iter().fold(0, |acc, &g| acc * n + g)
    }

    pub fn get(&self, args: &[usize]) -> &M::Elem {
        &self.values[self.index(args)]
    }

    /// `(args, value)` pairs in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &M::Elem)> {
        tuples(self.group.order(), self.degree).zip(self.values.iter())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| self.module.op(a, b))
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    pub fn inverse(&self) -> Self {
        let values = self.values.iter().map(|a| self.module.inverse(a)).collect();
        Self {
            values,
            ..self.clone()
        }
    }

    /// `(dω)(g₁,…,g_{n+1}) = ρ_{g₁}ω(g₂,…) · Π_j ω(…,g_j g_{j+1},…)^{(-1)^j}
    /// · ω(g₁,…,g_n)^{(-1)^{n+1}}`.
    pub fn coboundary(&self) -> Self {
        let n = self.degree;
        let g = self.group.clone();
        let m = &self.module;
        let values = tuples(g.order(), n + 1)
            .map(|t| {
                let mut acc = m.act(t[0], self.get(&t[1..]));
                for j in 1..=n {
                    let mut s = Vec::with_capacity(n);
                    s.extend_from_slice(&t[..j - 1]);
                    s.push(g.mul(t[j - 1], t[j]));
                    s.extend_from_slice(&t[j + 1..]);
                    let v = self.get(&s);
                    acc = if j % 2 == 1 {
                        m.op(&acc, &m.inverse(v))
                    } else {
                        m.op(&acc, v)
                    };
                }
                let last = self.get(&t[..n]);
                if (n + 1) % 2 == 1 {
                    m.op(&acc, &m.inverse(last))
                } else {
                    m.op(&acc, last)
                }
            })
            .collect();
        Self {
            group: g.clone(),
            module: m.clone(),
            degree: n + 1,
            values,
        }
    }

    /// Largest distance of any entry from the identity.
    pub fn distance_from_identity(&self) -> f64 {
        let one = self.module.one();
        self.values
            .iter()
            .map(|v| self.module.distance(v, &one))
            .fold(0.0, f64::max)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance_from_identity() <= tol
    }

    pub fn is_cocycle(&self, tol: f64) -> bool {
        self.coboundary().is_identity(tol)
    }

    /// Largest entrywise distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| self.module.distance(a, b))
            .fold(0.0, f64::max)
    }
}

/// JSON form of a cochain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochainFile {
    pub degree: usize,
    pub module: String,
    pub entries: Vec<CochainEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochainEntry {
    pub args: Vec<usize>,
    pub value: serde_json::Value,
}

fn check_args(group: &FiniteGroup, degree: usize, args: &[usize]) -> Result<()> {
    if args.len() != degree || args.iter().any(|&g| g >= group.order()) {
        return Err(Error::InvalidInput(format!(
            "cochain entry arguments {args:?} do not fit degree {degree} over {group}"
        )));
    }
    Ok(())
}

impl Cochain<U1> {
    /// Non-identity entries as a [`CochainFile`] with module `"u1"`.
    pub fn to_file(&self) -> CochainFile {
        let entries = self
            .entries()
            .filter(|(_, v)| **v != crate::phase::ONE)
            .map(|(args, v)| CochainEntry {
                args,
                value: serde_json::to_value(PhaseValue::from_complex(*v)).expect("phase serializes"),
            })
            .collect();
        CochainFile {
            degree: self.degree,
            module: "u1".into(),
            entries,
        }
    }

    /// Unlisted entries are 1.
    pub fn from_file(file: &CochainFile, group: Arc<FiniteGroup>) -> Result<Self> {
        if file.module != "u1" {
            return Err(Error::InvalidInput(format!(
                "expected a u1 cochain, found module {:?}",
                file.module
            )));
        }
        let mut c = Self::identity(group.clone(), U1, file.degree);
        for e in &file.entries {
            check_args(&group, file.degree, &e.args)?;
            let v: PhaseValue = serde_json::from_value(e.value.clone())?;
            let i = c.index(&e.args);
            c.values[i] = v.to_complex()?;
        }
        c.check_normalized()?;
        Ok(c)
    }

    /// Values as complex numbers in tuple order.
    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

impl Cochain<FiniteModule> {
    /// Non-identity entries as residue vectors.
    pub fn to_file(&self) -> CochainFile {
        let entries = self
            .entries()
            .filter(|(_, v)| **v != 0)
            .map(|(args, v)| CochainEntry {
                args,
                value: serde_json::json!(self.module.residues(*v)),
            })
            .collect();
        CochainFile {
            degree: self.degree,
            module: self.module.label(),
            entries,
        }
    }

    pub fn from_file(file: &CochainFile, group: Arc<FiniteGroup>, module: FiniteModule) -> Result<Self> {
        let mut c = Self::identity(group.clone(), module, file.degree);
        for e in &file.entries {
            check_args(&group, file.degree, &e.args)?;
            let r: Vec<i128> = serde_json::from_value(e.value.clone())?;
            if r.len() != c.module.factors().len() {
                return Err(Error::InvalidInput("residue vector has the wrong length".into()));
            }
            let i = c.index(&e.args);
            c.values[i] = c.module.from_residues(&r);
        }
        c.check_normalized()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::root_of_unity;

    fn z2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2))
    }

    #[test]
    fn coboundary_of_1_cochain_on_z2_vanishes() {
        let m = FiniteModule::trivial(&[2], 2);
        let z = Cochain::from_fn(z2(), m, 1, |t| t[0]).unwrap();
        assert!(z.coboundary().is_identity(0.0));
    }

    #[test]
    fn every_2_cochain_on_z2_is_a_cocycle() {
        let m = FiniteModule::trivial(&[2], 2);
        let t = Cochain::from_fn(z2(), m, 2, |a| usize::from(a == [1, 1])).unwrap();
        assert!(t.is_cocycle(0.0));
        // Oracle: dω(1,1,1) for ω(1,1)=i evaluated by hand is i·1/(1·i) = 1.
        let w = Cochain::from_fn(z2(), U1, 2, |a| {
            if a == [1, 1] {
                root_of_unity(1, 4)
            } else {
                crate::phase::ONE
            }
        })
        .unwrap();
        assert!(w.is_cocycle(1e-12));
    }

    #[test]
    fn dx_on_z2_squares_the_single_entry() {
        let x = Cochain::from_fn(z2(), U1, 3, |a| {
            if a == [1, 1, 1] {
                root_of_unity(1, 8)
            } else {
                crate::phase::ONE
            }
        })
        .unwrap();
        let dx = x.coboundary();
        assert!((dx.get(&[1, 1, 1, 1]) - root_of_unity(1, 4)).norm() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized() {
        let m = FiniteModule::trivial(&[2], 2);
        assert!(Cochain::from_fn(z2(), m, 1, |_| 1).is_err());
    }

    #[test]
    fn file_round_trip() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let x = Cochain::from_fn(g.clone(), U1, 3, |a| {
            if a.contains(&0) {
                crate::phase::ONE
            } else {
                root_of_unity((a[0] * a[1] + a[2]) as i64, 9)
            }
        })
        .unwrap();
        let back = Cochain::<U1>::from_file(&x.to_file(), g).unwrap();
        assert_eq!(back.distance(&x), 0.0);
    }
}
