//! Group cohomology `Hⁿ(G, M)` through Smith normal forms of the integer
//! coboundary matrices on normalized cochains.
//!
//! U(1) coefficients are handled in log space: a phase cochain `exp(2πi x)`
//! is a cocycle iff `Aₙ x ∈ ℤ`, and `Hⁿ(G, U(1)) ≅ ⊕ ℤ/dᵢ` over the nonunit
//! invariant factors of `Aₙ`. Finite modules `⊕ ℤ/mⱼ` are handled through the
//! lattice `Z̃ = {x : Aₙ x ≡ 0 mod m}` modulo `B̃ = im Aₙ₋₁ + m·ℤ`.

use std::sync::Arc;

use super::cochain::{Cochain, ModuleCochain, PhaseCochain};
use super::group::tuples;
use super::module::{FiniteModule, U1};
use super::snf::{IntMatrix, Smith};
use super::FiniteGroup;
use crate::phase::{lcm, root_of_unity, snap};
use crate::{Error, Result};

/// Index of normalized `n`-tuples (no identity entry).
struct TupleIndex {
    nonid: Vec<usize>,
    pos: Vec<Option<usize>>,
    n: usize,
}

impl TupleIndex {
    fn new(group: &FiniteGroup, n: usize) -> Self {
        let nonid: Vec<usize> = group.elements().filter(|&g| g != group.identity()).collect();
        let mut pos = vec![None; group.order()];
        for (i, &g) in nonid.iter().enumerate() {
            pos[g] = Some(i);
        }
        Self { nonid, pos, n }
    }

    fn count(&self) -> usize {
        self.nonid.len().pow(self.n as u32)
    }

    fn index(&self, t: &[usize]) -> Option<usize> {
        let k = self.nonid.len();
        t.iter().try_fold(0, |acc, &g| self.pos[g].map(|p| acc * k + p))
    }

    fn tuple(&self, mut idx: usize) -> Vec<usize> {
        let k = self.nonid.len();
        let mut t = vec![0; self.n];
        for slot in t.iter_mut().rev() {
            *slot = self.nonid[idx % k];
            idx /= k;
        }
        t
    }
}

/// Integer matrix of `d : Cⁿ → Cⁿ⁺¹` on normalized cochains with `r`
/// coordinates per tuple; `action(g)` is an integer lift of `ρ_g`.
fn coboundary_matrix(
    group: &FiniteGroup,
    n: usize,
    r: usize,
    action: &dyn Fn(usize) -> Vec<Vec<i128>>,
) -> IntMatrix {
    let src = TupleIndex::new(group, n);
    let dst = TupleIndex::new(group, n + 1);
    let mut a = IntMatrix::zeros(dst.count() * r, src.count() * r);
    let put_scalar = |a: &mut IntMatrix, row: usize, col: Option<usize>, s: i128| {
        if let Some(col) = col {
            for i in 0..r {
                a.add_to(row * r + i, col * r + i, s);
            }
        }
    };
    for row in 0..dst.count() {
        let t = dst.tuple(row);
        if let Some(col) = src.index(&t[1..]) {
            let p = action(t[0]);
            for i in 0..r {
                for j in 0..r {
                    a.add_to(row * r + i, col * r + j, p[i][j]);
                }
            }
        }
        for j in 1..=n {
            let mut s = Vec::with_capacity(n);
            s.extend_from_slice(&t[..j - 1]);
            s.push(group.mul(t[j - 1], t[j]));
            s.extend_from_slice(&t[j + 1..]);
            let sign = if j % 2 == 1 { -1 } else { 1 };
            put_scalar(&mut a, row, src.index(&s), sign);
        }
        let sign = if (n + 1) % 2 == 1 { -1 } else { 1 };
        put_scalar(&mut a, row, src.index(&t[..n]), sign);
    }
    a
}

fn u1_matrix(group: &FiniteGroup, n: usize) -> IntMatrix {
    coboundary_matrix(group, n, 1, &|_| vec![vec![1]])
}

fn module_matrix(group: &FiniteGroup, module: &FiniteModule, n: usize) -> IntMatrix {
    coboundary_matrix(group, n, module.factors().len(), &|g| module.action_matrix(g))
}

/// Diagonal relation matrix `m·ℤ` for `count` tuples.
fn relation_matrix(module: &FiniteModule, count: usize) -> IntMatrix {
    let r = module.factors().len();
    let mut d = IntMatrix::zeros(count * r, count * r);
    for t in 0..count {
        for (i, &m) in module.factors().iter().enumerate() {
            d.set(t * r + i, t * r + i, m as i128);
        }
    }
    d
}

/// Snap every normalized entry of a phase cochain to `k/N` turns.
fn snap_log(c: &PhaseCochain, root_order: u64) -> Result<Vec<i128>> {
    let idx = TupleIndex::new(c.group(), c.degree());
    (0..idx.count())
        .map(|i| snap(*c.get(&idx.tuple(i)), root_order).map(|k| k as i128))
        .collect()
}

fn phase_cochain_from_log(
    group: &Arc<FiniteGroup>,
    degree: usize,
    numer: &[i128],
    den: i128,
) -> PhaseCochain {
    let idx = TupleIndex::new(group, degree);
    Cochain::from_fn(group.clone(), U1, degree, |t| match idx.index(t) {
        Some(i) => root_of_unity(numer[i].rem_euclid(den) as i64, den as u64),
        None => crate::phase::ONE,
    })
    .expect("normalized by construction")
}

fn module_cochain_from_lift(
    group: &Arc<FiniteGroup>,
    module: &FiniteModule,
    degree: usize,
    lift: &[i128],
) -> ModuleCochain {
    let idx = TupleIndex::new(group, degree);
    let r = module.factors().len();
    Cochain::from_fn(group.clone(), module.clone(), degree, |t| match idx.index(t) {
        Some(i) => module.from_residues(&lift[i * r..(i + 1) * r]),
        None => 0,
    })
    .expect("normalized by construction")
}

fn module_lift(c: &ModuleCochain) -> Vec<i128> {
    let idx = TupleIndex::new(c.group(), c.degree());
    (0..idx.count())
        .flat_map(|i| {
            c.module()
                .residues(*c.get(&idx.tuple(i)))
                .into_iter()
                .map(|x| x as i128)
        })
        .collect()
}

/// All class vectors of `⊕ ℤ/dᵢ` in lexicographic order, first factor most
/// significant.
fn all_classes(invariants: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &d in invariants {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..d).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// `Hⁿ(G, U(1))` represented with phases in `μ_N`.
#[derive(Debug, Clone)]
pub struct U1Cohomology {
    group: Arc<FiniteGroup>,
    degree: usize,
    root_order: u64,
    smith: Smith,
    /// Positions in the Smith diagonal of the nonunit invariants.
    slots: Vec<usize>,
    invariants: Vec<u64>,
}

impl U1Cohomology {
    pub fn new(group: Arc<FiniteGroup>, degree: usize, root_order: u64) -> Result<Self> {
        let smith = Smith::compute(&u1_matrix(&group, degree))?;
        let mut slots = Vec::new();
        let mut invariants = Vec::new();
        for (i, &d) in smith.invariants().iter().enumerate() {
            if d > 1 {
                if root_order as i128 % d != 0 {
                    return Err(Error::RootOrderTooSmall {
                        root_order,
                        required: d as u64,
                    });
                }
                slots.push(i);
                invariants.push(d as u64);
            }
        }
        Ok(Self {
            group,
            degree,
            root_order,
            smith,
            slots,
            invariants,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn root_order(&self) -> u64 {
        self.root_order
    }

    /// Cyclic orders of the invariant-factor decomposition.
    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    /// Class of a cocycle as a vector in `⊕ ℤ/dᵢ`.
    pub fn class_of(&self, w: &PhaseCochain) -> Result<Vec<u64>> {
        self.check(w)?;
        let n = self.root_order as i128;
        let mut s = snap_log(w, self.root_order)?;
        self.smith.right_inv_mod(&mut s, n);
        let mut class = Vec::with_capacity(self.slots.len());
        for i in 0..self.smith.rank() {
            let d = self.smith.invariants()[i];
            if (d * s[i]) % n != 0 {
                return Err(Error::NotACocycle {
                    what: format!("{}-cochain", self.degree),
                    residual: ((d * s[i]) % n) as f64 / n as f64,
                });
            }
            if d > 1 {
                class.push(((d * s[i] / n).rem_euclid(d)) as u64);
            }
        }
        Ok(class)
    }

    /// Canonical cocycle representing `class`.
    pub fn representative(&self, class: &[u64]) -> PhaseCochain {
        assert_eq!(class.len(), self.invariants.len(), "class vector length");
        let l = self.invariants.iter().fold(1u64, |a, &d| lcm(a, d)) as i128;
        let mut y = vec![0i128; self.smith.cols()];
        for ((&slot, &d), &c) in self.slots.iter().zip(&self.invariants).zip(class) {
            y[slot] = (c % d) as i128 * (l / d as i128);
        }
        self.smith.right_mod(&mut y, l);
        phase_cochain_from_log(&self.group, self.degree, &y, l)
    }

    /// One representative per class, in lexicographic class order.
    pub fn representatives(&self) -> Vec<PhaseCochain> {
        all_classes(&self.invariants)
            .iter()
            .map(|c| self.representative(c))
            .collect()
    }

    fn check(&self, w: &PhaseCochain) -> Result<()> {
        if w.degree() != self.degree || **w.group() != *self.group {
            return Err(Error::InvalidInput("cochain does not match the cohomology group".into()));
        }
        Ok(())
    }
}

/// Solve `dμ = target` for a normalized U(1) cochain `μ` of degree one less.
///
/// Entries of `target` are snapped to `μ_N`. Returns `None` when `target` is
/// not a coboundary. The solution is canonical: free Smith coordinates are 0,
/// so an identity target yields the identity cochain.
pub fn solve_coboundary_u1(target: &PhaseCochain, root_order: u64) -> Result<Option<PhaseCochain>> {
    let n = target.degree();
    if n == 0 {
        return Ok(target.is_identity(crate::phase::DEFAULT_TOL).then(|| target.clone()));
    }
    let group = target.group().clone();
    let smith = Smith::compute(&u1_matrix(&group, n - 1))?;
    let big_n = root_order as i128;
    let mut v = snap_log(target, root_order)?;
    smith.left_mod(&mut v, big_n);
    if v[smith.rank()..].iter().any(|&x| x != 0) {
        return Ok(None);
    }
    let l = smith.invariants().iter().fold(1i128, |a, &d| lcm(a as u64, d as u64) as i128);
    let den = big_n.checked_mul(l).ok_or(Error::Overflow)?;
    let mut y = vec![0i128; smith.cols()];
    for i in 0..smith.rank() {
        y[i] = v[i] * (l / smith.invariants()[i]);
    }
    smith.right_mod(&mut y, den);
    Ok(Some(phase_cochain_from_log(&group, n - 1, &y, den)))
}

/// `μ` with `w1 = w2 · dμ`, or `None` when the classes differ.
pub fn cohomologous_u1(w1: &PhaseCochain, w2: &PhaseCochain, root_order: u64) -> Result<Option<PhaseCochain>> {
    if w1.degree() != w2.degree() || w1.group() != w2.group() {
        return Err(Error::InvalidInput("cochains differ in degree or group".into()));
    }
    solve_coboundary_u1(&w1.mul(&w2.inverse()), root_order)
}

/// `Hⁿ_ρ(G, M)` for a finite module `M` with action.
#[derive(Debug, Clone)]
pub struct FiniteCohomology {
    group: Arc<FiniteGroup>,
    module: FiniteModule,
    degree: usize,
    /// SNF of a generating matrix of `Z̃`.
    lattice: Smith,
    quotient: Smith,
    slots: Vec<usize>,
    invariants: Vec<u64>,
    /// SNF of `[Aₙ₋₁ | m]`, used for witnesses.
    bounding: Smith,
}

impl FiniteCohomology {
    pub fn new(group: Arc<FiniteGroup>, module: FiniteModule, degree: usize) -> Result<Self> {
        let n = degree;
        let cn = TupleIndex::new(&group, n).count();
        let cn1 = TupleIndex::new(&group, n + 1).count();
        let a = module_matrix(&group, &module, n);
        let k = a.hcat(&relation_matrix(&module, cn1));
        let dim = a.cols();
        let gens: Vec<Vec<i128>> = Smith::compute(&k)?
            .kernel_basis()?
            .into_iter()
            .map(|v| v[..dim].to_vec())
            .collect();
        let lattice = Smith::compute(&IntMatrix::from_columns(dim, &gens))?;
        if lattice.rank() != dim {
            return Err(Error::InvalidInput("cocycle lattice is not of full rank".into()));
        }
        let prev = if n == 0 {
            IntMatrix::zeros(dim, 0)
        } else {
            module_matrix(&group, &module, n - 1)
        };
        let bounding_m = prev.hcat(&relation_matrix(&module, cn));
        let mut coords = Vec::with_capacity(bounding_m.cols());
        for j in 0..bounding_m.cols() {
            let mut v: Vec<i128> = (0..dim).map(|i| bounding_m.get(i, j)).collect();
            lattice.left(&mut v)?;
            for (x, &e) in v.iter_mut().zip(lattice.invariants()) {
                debug_assert_eq!(*x % e, 0);
                *x /= e;
            }
            coords.push(v);
        }
        let quotient = Smith::compute(&IntMatrix::from_columns(dim, &coords))?;
        if quotient.rank() != dim {
            return Err(Error::InvalidInput("cohomology quotient is not finite".into()));
        }
        let mut slots = Vec::new();
        let mut invariants = Vec::new();
        for (i, &d) in quotient.invariants().iter().enumerate() {
            if d > 1 {
                slots.push(i);
                invariants.push(d as u64);
            }
        }
        let bounding = Smith::compute(&bounding_m)?;
        Ok(Self {
            group,
            module,
            degree,
            lattice,
            quotient,
            slots,
            invariants,
            bounding,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn module(&self) -> &FiniteModule {
        &self.module
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    /// Class of a cocycle; `NotACocycle` otherwise.
    pub fn class_of(&self, t: &ModuleCochain) -> Result<Vec<u64>> {
        if t.degree() != self.degree || t.module() != &self.module {
            return Err(Error::InvalidInput("cochain does not match the cohomology group".into()));
        }
        if !t.is_cocycle(0.0) {
            return Err(Error::NotACocycle {
                what: format!("{}-cochain in {}", self.degree, self.module.factors().len()),
                residual: 1.0,
            });
        }
        let mut v = module_lift(t);
        self.lattice.left(&mut v)?;
        for (x, &e) in v.iter_mut().zip(self.lattice.invariants()) {
            *x /= e;
        }
        self.quotient.left(&mut v)?;
        Ok(self
            .slots
            .iter()
            .zip(&self.invariants)
            .map(|(&s, &d)| v[s].rem_euclid(d as i128) as u64)
            .collect())
    }

    pub fn representative(&self, class: &[u64]) -> Result<ModuleCochain> {
        assert_eq!(class.len(), self.invariants.len(), "class vector length");
        let mut v = vec![0i128; self.lattice.cols().max(self.lattice.rows())];
        v.truncate(self.lattice.rows());
        for (&s, &c) in self.slots.iter().zip(class) {
            v[s] = c as i128;
        }
        self.quotient.left_inv(&mut v)?;
        for (x, &e) in v.iter_mut().zip(self.lattice.invariants()) {
            *x = x.checked_mul(e).ok_or(Error::Overflow)?;
        }
        self.lattice.left_inv(&mut v)?;
        Ok(module_cochain_from_lift(&self.group, &self.module, self.degree, &v))
    }

    pub fn representatives(&self) -> Result<Vec<ModuleCochain>> {
        all_classes(&self.invariants)
            .iter()
            .map(|c| self.representative(c))
            .collect()
    }

    /// `μ` with `t1 = t2 + dμ`, or `None`.
    pub fn cohomologous(&self, t1: &ModuleCochain, t2: &ModuleCochain) -> Result<Option<ModuleCochain>> {
        let diff = t1.mul(&t2.inverse());
        let v = module_lift(&diff);
        let Some(sol) = self.bounding.solve(&v)? else {
            return Ok(None);
        };
        if self.degree == 0 {
            return Ok(Some(Cochain::identity(self.group.clone(), self.module.clone(), 0)));
        }
        let prev = TupleIndex::new(&self.group, self.degree - 1).count() * self.module.factors().len();
        Ok(Some(module_cochain_from_lift(
            &self.group,
            &self.module,
            self.degree - 1,
            &sol[..prev],
        )))
    }
}

/// Every normalized cocycle of `Zⁿ_ρ(G, M)`, by enumeration of the lattice
/// `Z̃ / m·ℤ`. Intended for small inputs; fails beyond `limit` elements.
pub fn module_cocycles(
    group: Arc<FiniteGroup>,
    module: FiniteModule,
    degree: usize,
    limit: usize,
) -> Result<Vec<ModuleCochain>> {
    let cn = TupleIndex::new(&group, degree).count();
    let a = module_matrix(&group, &module, degree);
    let k = a.hcat(&relation_matrix(&module, TupleIndex::new(&group, degree + 1).count()));
    let dim = a.cols();
    let mut gens: Vec<Vec<i128>> = Smith::compute(&k)?
        .kernel_basis()?
        .into_iter()
        .map(|v| v[..dim].to_vec())
        .collect();
    // Reduce generators modulo m and deduplicate the spanned set by closure.
    let r = module.factors().len();
    let reduce = |v: &mut Vec<i128>| {
        for (i, x) in v.iter_mut().enumerate() {
            *x = x.rem_euclid(module.factors()[i % r] as i128);
        }
    };
    for g in gens.iter_mut() {
        reduce(g);
    }
    let mut seen = std::collections::BTreeSet::new();
    let zero = vec![0i128; cn * r];
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(v) = frontier.pop() {
        for g in &gens {
            let mut w: Vec<i128> = v.iter().zip(g).map(|(a, b)| a + b).collect();
            reduce(&mut w);
            if seen.insert(w.clone()) {
                if seen.len() > limit {
                    return Err(Error::BudgetExceeded(limit));
                }
                frontier.push(w);
            }
        }
    }
    gens.clear();
    Ok(seen
        .into_iter()
        .map(|v| module_cochain_from_lift(&group, &module, degree, &v))
        .collect())
}

/// Coefficient module for [`cohomology`].
#[derive(Debug, Clone)]
pub enum CoefficientModule {
    /// Abelian charges with the restricted symmetry action.
    AbelianCharges(FiniteModule),
    /// U(1) phases represented in `μ_N`.
    RootsOfUnity(u64),
}

/// A cochain of either coefficient kind.
#[derive(Debug, Clone)]
pub enum AnyCochain {
    Phase(PhaseCochain),
    Module(ModuleCochain),
}

/// Invariant factors and one representative per class.
#[derive(Debug, Clone)]
pub struct CohomologyGroup {
    pub invariants: Vec<u64>,
    pub representatives: Vec<AnyCochain>,
}

impl CohomologyGroup {
    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    /// `"Z2xZ2"`, or `"0"` for the trivial group.
    pub fn structure(&self) -> String {
        if self.invariants.is_empty() {
            "0".into()
        } else {
            self.invariants
                .iter()
                .map(|d| format!("Z{d}"))
                .collect::<Vec<_>>()
                .join("x")
        }
    }
}

/// `Hⁿ(G, M)` with class representatives.
pub fn cohomology(n: usize, group: Arc<FiniteGroup>, module: &CoefficientModule) -> Result<CohomologyGroup> {
    match module {
        CoefficientModule::RootsOfUnity(root_order) => {
            let h = U1Cohomology::new(group, n, *root_order)?;
            Ok(CohomologyGroup {
                invariants: h.invariants().to_vec(),
                representatives: h.representatives().into_iter().map(AnyCochain::Phase).collect(),
            })
        }
        CoefficientModule::AbelianCharges(m) => {
            let h = FiniteCohomology::new(group, m.clone(), n)?;
            Ok(CohomologyGroup {
                invariants: h.invariants().to_vec(),
                representatives: h.representatives()?.into_iter().map(AnyCochain::Module).collect(),
            })
        }
    }
}

/// Every normalized `n`-tuple, for callers iterating cochain entries.
pub fn normalized_tuples(group: &FiniteGroup, n: usize) -> Vec<Vec<usize>> {
    tuples(group.order(), n)
        .filter(|t| !t.contains(&group.identity()))
        .collect()
}
