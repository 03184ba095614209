//! Skeletal data of a multiplicity-free G-crossed braided tensor category.
//!
//! Symbol conventions (all labels are charge indices):
//! - `F(a,b,c,d;e,f) = [F^{abc}_d]_{ef}` with `e ∈ a⊗b`, `f ∈ b⊗c`.
//! - `R(a,b;c) = R^{ab}_c` for `c ∈ a⊗b`; for `a_g, b_h` it maps
//!   `V^{b, ^{h̄}a}_c → V^{ab}_c`.
//! - `U(k; a,b;c) = U_k(a,b;c)` for `c ∈ a⊗b`.
//! - `η(x; g,h) = η_x(g,h)`.
//!
//! Symbols are stored on admissible tuples only; lookups elsewhere fail
//! with [`Error::InadmissibleTuple`].

mod derived;
pub mod io;
mod validate;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use derived::{AbelianGroup, QuantumDimensions};
pub use validate::Violation;

use crate::groups::FiniteGroup;
use crate::phase::{C64, ONE};
use crate::{Error, Result};

pub type FKey = [usize; 6];
pub type RKey = [usize; 3];
pub type UKey = [usize; 4];
pub type EtaKey = [usize; 3];

/// A G-crossed theory given by its symbol tables.
#[derive(Debug, Clone)]
pub struct GxTheory {
    name: String,
    group: Arc<FiniteGroup>,
    names: Vec<String>,
    grades: Vec<usize>,
    vacuum: usize,
    dual: Vec<usize>,
    /// `action[g][a] = ^g a`.
    action: Vec<Vec<usize>>,
    /// Sorted fusion products `a ⊗ b`.
    products: Vec<Vec<Vec<usize>>>,
    f: BTreeMap<FKey, C64>,
    r: BTreeMap<RKey, C64>,
    u: BTreeMap<UKey, C64>,
    eta: BTreeMap<EtaKey, C64>,
    metadata: BTreeMap<String, serde_json::Value>,
}

/// Charge list, fusion rules and action; symbols default to 1.
#[derive(Debug, Clone)]
pub struct TheoryBuilder {
    name: String,
    group: Arc<FiniteGroup>,
    names: Vec<String>,
    grades: Vec<usize>,
    vacuum: usize,
    fusion: Vec<(usize, usize, usize)>,
    action: Option<Vec<Vec<usize>>>,
    dual: Option<Vec<usize>>,
}

impl TheoryBuilder {
    pub fn new(name: impl Into<String>, group: Arc<FiniteGroup>) -> Self {
        Self {
            name: name.into(),
            group,
            names: Vec::new(),
            grades: Vec::new(),
            vacuum: 0,
            fusion: Vec::new(),
            action: None,
            dual: None,
        }
    }

    /// Add a charge; returns its index.
    pub fn charge(&mut self, name: impl Into<String>, grade: usize) -> usize {
        self.names.push(name.into());
        self.grades.push(grade);
        self.names.len() - 1
    }

    pub fn vacuum(&mut self, a: usize) -> &mut Self {
        self.vacuum = a;
        self
    }

    /// Declare `N(a,b,c) = 1`.
    pub fn fuse(&mut self, a: usize, b: usize, c: usize) -> &mut Self {
        self.fusion.push((a, b, c));
        self
    }

    /// `action[g][a] = ^g a`; identity when never set.
    pub fn action(&mut self, action: Vec<Vec<usize>>) -> &mut Self {
        self.action = Some(action);
        self
    }

    /// Explicit duals; derived from fusion when never set.
    pub fn dual(&mut self, dual: Vec<usize>) -> &mut Self {
        self.dual = Some(dual);
        self
    }

    pub fn build(&self) -> Result<GxTheory> {
        let n = self.names.len();
        let order = self.group.order();
        if n == 0 || self.vacuum >= n {
            return Err(Error::InvalidInput("theory needs charges and a vacuum".into()));
        }
        if let Some(&g) = self.grades.iter().find(|&&g| g >= order) {
            return Err(Error::InvalidInput(format!("grade {g} outside the group")));
        }
        let mut products = vec![vec![Vec::new(); n]; n];
        for &(a, b, c) in &self.fusion {
            if a >= n || b >= n || c >= n {
                return Err(Error::InvalidInput(format!("fusion entry ({a},{b},{c}) out of range")));
            }
            let p: &mut Vec<usize> = &mut products[a][b];
            if !p.contains(&c) {
                p.push(c);
            }
        }
        for row in products.iter_mut() {
            for p in row.iter_mut() {
                p.sort_unstable();
            }
        }
        let action = match &self.action {
            Some(a) => {
                if a.len() != order || a.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
                    return Err(Error::InvalidInput("action table has the wrong shape".into()));
                }
                a.clone()
            }
            None => vec![(0..n).collect(); order],
        };
        let dual = match &self.dual {
            Some(d) => {
                if d.len() != n || d.iter().any(|&x| x >= n) {
                    return Err(Error::InvalidInput("dual table has the wrong shape".into()));
                }
                d.clone()
            }
            None => (0..n)
                .map(|a| {
                    (0..n)
                        .find(|&b| products[a][b].contains(&self.vacuum))
                        .ok_or_else(|| Error::InvalidInput(format!("charge {a} has no dual")))
                })
                .collect::<Result<_>>()?,
        };
        let mut t = GxTheory {
            name: self.name.clone(),
            group: self.group.clone(),
            names: self.names.clone(),
            grades: self.grades.clone(),
            vacuum: self.vacuum,
            dual,
            action,
            products,
            f: BTreeMap::new(),
            r: BTreeMap::new(),
            u: BTreeMap::new(),
            eta: BTreeMap::new(),
            metadata: BTreeMap::new(),
        };
        t.reset_symbols();
        Ok(t)
    }
}

impl GxTheory {
    /// Same labels, grades, vacuum and action with new fusion rules; duals
    /// recomputed and every symbol reset to 1.
    pub fn with_fusion(&self, products: Vec<Vec<Vec<usize>>>) -> GxTheory {
        let mut t = GxTheory {
            products,
            f: BTreeMap::new(),
            r: BTreeMap::new(),
            u: BTreeMap::new(),
            eta: BTreeMap::new(),
            ..self.clone()
        };
        for row in t.products.iter_mut() {
            for p in row.iter_mut() {
                p.sort_unstable();
                p.dedup();
            }
        }
        let n = t.num_charges();
        for a in 0..n {
            if let Some(b) = (0..n).find(|&b| t.n(a, b, t.vacuum)) {
                t.dual[a] = b;
            }
        }
        t.reset_symbols();
        t
    }

    /// Replace the action table, keeping every symbol.
    pub fn set_action(&mut self, action: Vec<Vec<usize>>) {
        assert_eq!(action.len(), self.group.order());
        self.action = action;
    }

    fn reset_symbols(&mut self) {
        let n = self.num_charges();
        let order = self.group.order();
        self.f.clear();
        self.r.clear();
        self.u.clear();
        self.eta.clear();
        for a in 0..n {
            for b in 0..n {
                for &c in &self.products[a][b] {
                    self.r.insert([a, b, c], ONE);
                    for k in 0..order {
                        self.u.insert([k, a, b, c], ONE);
                    }
                }
            }
        }
        for key in self.admissible_f() {
            self.f.insert(key, ONE);
        }
        for x in 0..n {
            for g in 0..order {
                for h in 0..order {
                    self.eta.insert([x, g, h], ONE);
                }
            }
        }
    }

    fn admissible_f(&self) -> Vec<FKey> {
        let n = self.num_charges();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for &e in &self.products[a][b] {
                    for c in 0..n {
                        for &d in &self.products[e][c] {
                            for &f in &self.products[b][c] {
                                if self.n(a, f, d) {
                                    out.push([a, b, c, d, e, f]);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn num_charges(&self) -> usize {
        self.names.len()
    }

    pub fn charges(&self) -> std::ops::Range<usize> {
        0..self.names.len()
    }

    pub fn charge_name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn set_charge_name(&mut self, a: usize, name: impl Into<String>) {
        self.names[a] = name.into();
    }

    pub fn charge_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn grade(&self, a: usize) -> usize {
        self.grades[a]
    }

    pub fn charges_of_grade(&self, g: usize) -> impl Iterator<Item = usize> + '_ {
        self.charges().filter(move |&a| self.grades[a] == g)
    }

    pub fn vacuum(&self) -> usize {
        self.vacuum
    }

    pub fn dual(&self, a: usize) -> usize {
        self.dual[a]
    }

    /// `^g a`.
    #[inline]
    pub fn act(&self, g: usize, a: usize) -> usize {
        self.action[g][a]
    }

    pub fn action_table(&self) -> &[Vec<usize>] {
        &self.action
    }

    #[inline]
    pub fn n(&self, a: usize, b: usize, c: usize) -> bool {
        self.products[a][b].binary_search(&c).is_ok()
    }

    /// Sorted list of `c` with `N(a,b,c) = 1`.
    #[inline]
    pub fn products(&self, a: usize, b: usize) -> &[usize] {
        &self.products[a][b]
    }

    pub fn fusion_table(&self) -> &[Vec<Vec<usize>>] {
        &self.products
    }

    /// The product of `a ⊗ b` when it is a single charge.
    #[inline]
    pub fn fuse_unique(&self, a: usize, b: usize) -> Option<usize> {
        match self.products[a][b].as_slice() {
            [c] => Some(*c),
            _ => None,
        }
    }

    /// `a ⊗ b` for an abelian operand; errors otherwise.
    pub fn fuse1(&self, a: usize, b: usize) -> Result<usize> {
        self.fuse_unique(a, b).ok_or(Error::InadmissibleTuple {
            table: "fusion",
            labels: vec![a, b],
        })
    }

    /// `a ⊗ ā = I` only.
    pub fn is_invertible(&self, a: usize) -> bool {
        self.products[a][self.dual[a]] == [self.vacuum]
    }

    pub fn f(&self, a: usize, b: usize, c: usize, d: usize, e: usize, f: usize) -> Result<C64> {
        self.f
            .get(&[a, b, c, d, e, f])
            .copied()
            .ok_or_else(|| Error::InadmissibleTuple {
                table: "F",
                labels: vec![a, b, c, d, e, f],
            })
    }

    /// F-symbol with every internal label fixed by fusion of invertible
    /// charges: `e = a⊗b`, `f = b⊗c`, `d = e⊗c`.
    pub fn f_abelian(&self, a: usize, b: usize, c: usize) -> Result<C64> {
        let e = self.fuse1(a, b)?;
        let f = self.fuse1(b, c)?;
        let d = self.fuse1(e, c)?;
        self.f(a, b, c, d, e, f)
    }

    pub fn r(&self, a: usize, b: usize, c: usize) -> Result<C64> {
        self.r.get(&[a, b, c]).copied().ok_or_else(|| Error::InadmissibleTuple {
            table: "R",
            labels: vec![a, b, c],
        })
    }

    pub fn u(&self, k: usize, a: usize, b: usize, c: usize) -> Result<C64> {
        self.u
            .get(&[k, a, b, c])
            .copied()
            .ok_or_else(|| Error::InadmissibleTuple {
                table: "U",
                labels: vec![k, a, b, c],
            })
    }

    pub fn eta(&self, x: usize, g: usize, h: usize) -> Result<C64> {
        self.eta.get(&[x, g, h]).copied().ok_or_else(|| Error::InadmissibleTuple {
            table: "eta",
            labels: vec![x, g, h],
        })
    }

    pub fn set_f(&mut self, key: FKey, v: C64) -> Result<()> {
        set_in(&mut self.f, "F", key, v)
    }

    pub fn set_r(&mut self, key: RKey, v: C64) -> Result<()> {
        set_in(&mut self.r, "R", key, v)
    }

    pub fn set_u(&mut self, key: UKey, v: C64) -> Result<()> {
        set_in(&mut self.u, "U", key, v)
    }

    pub fn set_eta(&mut self, key: EtaKey, v: C64) -> Result<()> {
        set_in(&mut self.eta, "eta", key, v)
    }

    pub fn f_entries(&self) -> &BTreeMap<FKey, C64> {
        &self.f
    }

    pub fn r_entries(&self) -> &BTreeMap<RKey, C64> {
        &self.r
    }

    pub fn u_entries(&self) -> &BTreeMap<UKey, C64> {
        &self.u
    }

    pub fn eta_entries(&self) -> &BTreeMap<EtaKey, C64> {
        &self.eta
    }

    /// Recompute every F entry from its key.
    pub fn fill_f(&mut self, mut f: impl FnMut(&FKey) -> Result<C64>) -> Result<()> {
        fill(&mut self.f, &mut f)
    }

    pub fn fill_r(&mut self, mut f: impl FnMut(&RKey) -> Result<C64>) -> Result<()> {
        fill(&mut self.r, &mut f)
    }

    pub fn fill_u(&mut self, mut f: impl FnMut(&UKey) -> Result<C64>) -> Result<()> {
        fill(&mut self.u, &mut f)
    }

    pub fn fill_eta(&mut self, mut f: impl FnMut(&EtaKey) -> Result<C64>) -> Result<()> {
        fill(&mut self.eta, &mut f)
    }

    pub fn metadata(&self) -> &BTreeMap<String, serde_json::Value> {
        &self.metadata
    }

    pub fn set_metadata(&mut self, key: impl Into<String>, value: serde_json::Value) {
        self.metadata.insert(key.into(), value);
    }

    /// The identity-graded sector as a theory over the trivial group.
    pub fn identity_sector(&self) -> GxTheory {
        let e = self.group.identity();
        let keep: Vec<usize> = self.charges_of_grade(e).collect();
        let mut map = vec![usize::MAX; self.num_charges()];
        for (i, &a) in keep.iter().enumerate() {
            map[a] = i;
        }
        let group = Arc::new(FiniteGroup::product_of_cyclic(&[1]));
        let products = keep
            .iter()
            .map(|&a| {
                keep.iter()
                    .map(|&b| self.products[a][b].iter().map(|&c| map[c]).collect())
                    .collect()
            })
            .collect();
        let mut t = GxTheory {
            name: format!("{} (identity sector)", self.name),
            group,
            names: keep.iter().map(|&a| self.names[a].clone()).collect(),
            grades: vec![0; keep.len()],
            vacuum: map[self.vacuum],
            dual: keep.iter().map(|&a| map[self.dual[a]]).collect(),
            action: vec![(0..keep.len()).collect()],
            products,
            f: BTreeMap::new(),
            r: BTreeMap::new(),
            u: BTreeMap::new(),
            eta: BTreeMap::new(),
            metadata: self.metadata.clone(),
        };
        t.reset_symbols();
        t.fill_f(|k| self.f(keep[k[0]], keep[k[1]], keep[k[2]], keep[k[3]], keep[k[4]], keep[k[5]]))
            .expect("identity sector is closed under fusion");
        t.fill_r(|k| self.r(keep[k[0]], keep[k[1]], keep[k[2]]))
            .expect("identity sector is closed under fusion");
        t
    }

    /// Largest entrywise distance between the symbol tables of two theories
    /// over the same labels, or `None` when fusion, grades or action differ.
    pub fn table_distance(&self, other: &GxTheory) -> Option<TableDistance> {
        if self.grades != other.grades
            || self.products != other.products
            || self.action != other.action
            || self.vacuum != other.vacuum
            || *self.group != *other.group
        {
            return None;
        }
        fn dist<K: Ord>(a: &BTreeMap<K, C64>, b: &BTreeMap<K, C64>) -> f64 {
            a.iter()
                .zip(b.iter())
                .map(|((_, x), (_, y))| (x - y).norm())
                .fold(0.0, f64::max)
        }
        Some(TableDistance {
            f: dist(&self.f, &other.f),
            r: dist(&self.r, &other.r),
            u: dist(&self.u, &other.u),
            eta: dist(&self.eta, &other.eta),
        })
    }
}

/// Per-table maximum entrywise distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableDistance {
    pub f: f64,
    pub r: f64,
    pub u: f64,
    pub eta: f64,
}

impl TableDistance {
    pub fn max(&self) -> f64 {
        self.f.max(self.r).max(self.u).max(self.eta)
    }
}

fn set_in<const N: usize>(
    map: &mut BTreeMap<[usize; N], C64>,
    table: &'static str,
    key: [usize; N],
    v: C64,
) -> Result<()> {
    match map.get_mut(&key) {
        Some(slot) => {
            *slot = v;
            Ok(())
        }
        None => Err(Error::InadmissibleTuple {
            table,
            labels: key.to_vec(),
        }),
    }
}

fn fill<K: Ord + Clone>(
    map: &mut BTreeMap<K, C64>,
    f: &mut impl FnMut(&K) -> Result<C64>,
) -> Result<()> {
    let keys: Vec<K> = map.keys().cloned().collect();
    for k in keys {
        let v = f(&k)?;
        map.insert(k, v);
    }
    Ok(())
}
