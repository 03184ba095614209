//! Gauge transformations, charge relabelings and the equivalences they
//! induce between torsored theories.
//!
//! A [`GaugeTransform`] combines a vertex-basis change `Γ^{ab}_c` with a
//! natural isomorphism `γ_a(g)` of the symmetry action. Under it
//!
//! - `F̃ = Γ^{ab}_e Γ^{ec}_d / (Γ^{bc}_f Γ^{af}_d) · F`
//! - `R̃^{ab}_c = γ_a(h) Γ^{b, ^{h̄}a}_c / Γ^{ab}_c · R` for `b` of grade `h`
//! - `Ũ_k(a,b;c) = γ_a(k) γ_b(k) / γ_c(k) · Γ^{k̄a, k̄b}_{k̄c} / Γ^{ab}_c · U`
//! - `η̃_c(g,h) = γ_c(gh) / (γ_{ḡc}(h) γ_c(g)) · η`
//!
//! Gauges are found by solving the logarithms of these laws mod 1 with a
//! Smith normal form, then verified by re-application.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::groups::snf::{IntMatrix, Smith};
use crate::groups::{ModuleCochain, PhaseCochain, U1};
use crate::phase::{from_turns_f64, turns_of, PhaseValue, C64, ONE};
use crate::torsor::{apply_torsor_with, relative_obstruction_tol, TorsorInput, TorsorOptions};
use crate::{Error, GxTheory, Result};

/// Vertex phases `Γ^{ab}_c` and action phases `γ_a(g)`. Missing entries
/// are 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "GaugeFile", try_from = "GaugeFile")]
pub struct GaugeTransform {
    pub vertex: BTreeMap<[usize; 3], C64>,
    /// Keyed `[a, g]`.
    pub symmetry: BTreeMap<[usize; 2], C64>,
}

#[derive(Serialize, Deserialize)]
struct GaugeFile {
    vertex: Vec<VertexEntry>,
    symmetry: Vec<SymmetryEntry>,
}

#[derive(Serialize, Deserialize)]
struct VertexEntry {
    labels: [usize; 3],
    value: PhaseValue,
}

#[derive(Serialize, Deserialize)]
struct SymmetryEntry {
    charge: usize,
    element: usize,
    value: PhaseValue,
}

impl From<GaugeTransform> for GaugeFile {
    fn from(g: GaugeTransform) -> Self {
        Self {
            vertex: g
                .vertex
                .into_iter()
                .map(|(labels, v)| VertexEntry { labels, value: PhaseValue::from_complex(v) })
                .collect(),
            symmetry: g
                .symmetry
                .into_iter()
                .map(|([charge, element], v)| SymmetryEntry { charge, element, value: PhaseValue::from_complex(v) })
                .collect(),
        }
    }
}

impl TryFrom<GaugeFile> for GaugeTransform {
    type Error = Error;
    fn try_from(f: GaugeFile) -> Result<Self> {
        let mut g = GaugeTransform::default();
        for e in f.vertex {
            g.vertex.insert(e.labels, e.value.to_complex()?);
        }
        for e in f.symmetry {
            g.symmetry.insert([e.charge, e.element], e.value.to_complex()?);
        }
        Ok(g)
    }
}

impl GaugeTransform {
    pub fn identity() -> Self {
        Self::default()
    }

    /// `Γ^{ab}_c`.
    pub fn vertex(&self, a: usize, b: usize, c: usize) -> C64 {
        self.vertex.get(&[a, b, c]).copied().unwrap_or(ONE)
    }

    /// `γ_a(g)`.
    pub fn symmetry(&self, a: usize, g: usize) -> C64 {
        self.symmetry.get(&[a, g]).copied().unwrap_or(ONE)
    }

    /// Drop entries within `tol` of 1.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.vertex.retain(|_, v| (*v - ONE).norm() > tol);
        self.symmetry.retain(|_, v| (*v - ONE).norm() > tol);
        self
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.vertex.values().chain(self.symmetry.values()).all(|v| (*v - ONE).norm() <= tol)
    }

    /// Unit-modulus entries on admissible vertices, trivial on vacuum
    /// lines and at the identity element.
    pub fn validate(&self, theory: &GxTheory, tol: f64) -> Result<()> {
        let vac = theory.vacuum();
        let e = theory.group().identity();
        for (&[a, b, c], v) in &self.vertex {
            if !theory.n(a, b, c) {
                return Err(Error::InvalidInput(format!("gauge on inadmissible vertex ({a},{b},{c})")));
            }
            if (a == vac || b == vac) && (*v - ONE).norm() > tol {
                return Err(Error::InvalidInput(format!("gauge on vacuum line ({a},{b},{c})")));
            }
        }
        for (&[a, g], v) in &self.symmetry {
            if a >= theory.num_charges() || g >= theory.group().order() {
                return Err(Error::InvalidInput(format!("gauge entry ({a},{g}) out of range")));
            }
            if (a == vac || g == e) && (*v - ONE).norm() > tol {
                return Err(Error::InvalidInput(format!("nontrivial γ_{a}({g}) on vacuum or identity")));
            }
        }
        for v in self.vertex.values().chain(self.symmetry.values()) {
            if (v.norm() - 1.0).abs() > tol {
                return Err(Error::InvalidInput("gauge phases must have unit modulus".into()));
            }
        }
        Ok(())
    }
}

/// Apply a gauge transformation to every symbol table.
pub fn apply_gauge(theory: &GxTheory, gauge: &GaugeTransform) -> GxTheory {
    let th = theory;
    let grp = th.group();
    let gv = |a, b, c| gauge.vertex(a, b, c);
    let gs = |a, g| gauge.symmetry(a, g);
    let mut out = th.clone();
    let infallible = "keys come from the theory's own tables";
    out.fill_f(|&[a, b, c, d, e, f]| Ok(gv(a, b, e) * gv(e, c, d) / (gv(b, c, f) * gv(a, f, d)) * th.f(a, b, c, d, e, f)?))
        .expect(infallible);
    out.fill_r(|&[a, b, c]| {
        let h = th.grade(b);
        let ha = th.act(grp.inv(h), a);
        Ok(gs(a, h) * gv(b, ha, c) / gv(a, b, c) * th.r(a, b, c)?)
    })
    .expect(infallible);
    out.fill_u(|&[k, a, b, c]| {
        let kb = grp.inv(k);
        let v = gv(th.act(kb, a), th.act(kb, b), th.act(kb, c)) / gv(a, b, c);
        Ok(gs(a, k) * gs(b, k) / gs(c, k) * v * th.u(k, a, b, c)?)
    })
    .expect(infallible);
    out.fill_eta(|&[c, g, h]| {
        let gc = th.act(grp.inv(g), c);
        Ok(gs(c, grp.mul(g, h)) / (gs(gc, h) * gs(c, g)) * th.eta(c, g, h)?)
    })
    .expect(infallible);
    out
}

/// A grade-preserving permutation of charges. The relabeled theory carries
/// at charge `a` the data of charge `perm[a]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relabeling {
    pub perm: Vec<usize>,
}

impl Relabeling {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (a, &p) in self.perm.iter().enumerate() {
            inv[p] = a;
        }
        Self { perm: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(a, &p)| a == p)
    }

    fn check(&self, theory: &GxTheory) -> Result<()> {
        let n = theory.num_charges();
        let mut seen = vec![false; n];
        if self.perm.len() != n || self.perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput(format!("relabeling is not a permutation of {n} charges")));
        }
        for (a, &p) in self.perm.iter().enumerate() {
            if theory.grade(a) != theory.grade(p) {
                return Err(Error::GradeViolation(format!(
                    "{} (grade {}) sent to {} (grade {})",
                    theory.charge_name(a),
                    theory.grade(a),
                    theory.charge_name(p),
                    theory.grade(p)
                )));
            }
        }
        if self.perm[theory.vacuum()] != theory.vacuum() {
            return Err(Error::GradeViolation("the vacuum must be fixed".into()));
        }
        Ok(())
    }
}

/// `Q'(a, b, …) = Q(ℛa, ℛb, …)` on every table, with fusion and action
/// conjugated by the permutation. Charge names stay attached to indices.
pub fn relabel(theory: &GxTheory, r: &Relabeling) -> Result<GxTheory> {
    r.check(theory)?;
    let p = &r.perm;
    let inv = r.inverse().perm;
    let n = theory.num_charges();
    let products = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| theory.products(p[a], p[b]).iter().map(|&c| inv[c]).collect())
                .collect()
        })
        .collect();
    let mut out = theory.with_fusion(products);
    let action = theory
        .group()
        .elements()
        .map(|g| (0..n).map(|a| inv[theory.act(g, p[a])]).collect())
        .collect();
    out.set_action(action);
    out.fill_f(|k| theory.f(p[k[0]], p[k[1]], p[k[2]], p[k[3]], p[k[4]], p[k[5]]))?;
    out.fill_r(|k| theory.r(p[k[0]], p[k[1]], p[k[2]]))?;
    out.fill_u(|k| theory.u(k[0], p[k[1]], p[k[2]], p[k[3]]))?;
    out.fill_eta(|k| theory.eta(p[k[0]], k[1], k[2]))?;
    Ok(out)
}

/// Charge lines of a 1-cochain `z` in the abelian charges.
struct ZLines<'a> {
    th: &'a GxTheory,
    z: Vec<usize>,
    dz: Vec<usize>,
}

impl<'a> ZLines<'a> {
    fn new(th: &'a GxTheory, z: &ModuleCochain) -> Result<Self> {
        let a = th.abelian_subgroup()?;
        if z.degree() != 1 || **z.group() != **th.group() || z.module() != a.module() {
            return Err(Error::InvalidInput(
                "z must be a 1-cochain over the theory's group valued in its abelian charges".into(),
            ));
        }
        let zc = z.entries().map(|(_, &m)| a.charge(m)).collect();
        let dz = z.coboundary().entries().map(|(_, &m)| a.charge(m)).collect();
        Ok(Self { th, z: zc, dz })
    }

    fn z(&self, g: usize) -> usize {
        self.z[g]
    }
    fn zb(&self, g: usize) -> usize {
        self.th.dual(self.z[g])
    }
    fn dz(&self, g: usize, h: usize) -> usize {
        self.dz[g * self.th.group().order() + h]
    }
    fn m(&self, g: usize, h: usize) -> usize {
        self.th.group().mul(g, h)
    }
    fn act(&self, g: usize, a: usize) -> usize {
        self.th.act(g, a)
    }
    fn x(&self, a: usize, b: usize) -> Result<usize> {
        self.th.fuse1(a, b)
    }
    fn fa(&self, a: usize, b: usize, c: usize) -> Result<C64> {
        self.th.f_abelian(a, b, c)
    }
    fn rb(&self, a: usize, b: usize) -> Result<C64> {
        self.th.r(a, b, self.x(a, b)?)
    }
    fn ub(&self, k: usize, a: usize, b: usize) -> Result<C64> {
        self.th.u(k, a, b, self.x(a, b)?)
    }

    /// `Z_z(g,h,k)`.
    fn boundary_x(&self, g: usize, h: usize, k: usize) -> Result<C64> {
        let (gh, hk) = (self.m(g, h), self.m(h, k));
        let ghk = self.m(gh, k);
        let zk = self.act(gh, self.zb(k));
        let dhk = self.act(g, self.dz(h, k));
        let zh = self.act(g, self.zb(h));
        let zkhk = self.act(g, self.x(self.z(k), self.zb(hk))?);
        let zhgh = self.act(g, self.x(self.z(h), self.zb(gh))?);
        let zhk = self.x(self.act(g, self.z(hk)), self.zb(ghk))?;
        let num = self.fa(self.dz(gh, k), zhgh, zh)?
            * self.fa(self.dz(gh, k), self.dz(g, h), self.zb(g))?
            * self.fa(self.dz(g, hk), self.zb(g), dhk)?;
        let den = self.fa(self.dz(g, hk), dhk, self.zb(g))?
            * self.fa(zhk, dhk, zh)?
            * self.fa(zhk, zkhk, zk)?;
        Ok(self.th.eta(zk, g, h)?
            * self.ub(g, dhk, zh)?
            * self.ub(g, zkhk, zk)?
            * self.rb(dhk, self.zb(g))?
            * num
            / den)
    }

    /// The relabel-class cocycle for `dz = 0`.
    fn relabel_class(&self, g: usize, h: usize, k: usize) -> Result<C64> {
        let (gh, hk) = (self.m(g, h), self.m(h, k));
        let ghk = self.m(gh, k);
        let zk = self.act(gh, self.zb(k));
        let zkhk = self.act(g, self.x(self.z(k), self.zb(hk))?);
        let zhk = self.x(self.act(g, self.z(hk)), self.zb(ghk))?;
        Ok(self.th.eta(zk, g, h)? * self.ub(g, zkhk, zk)? / self.fa(zhk, zkhk, zk)?)
    }

    fn relabeling(&self) -> Result<Relabeling> {
        let th = self.th;
        let perm = th
            .charges()
            .map(|a| self.x(self.z(th.grade(a)), a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Relabeling { perm })
    }
}

/// Relabel by `ℛ_z(a_g) = z(g) ⊗ a_g`. The fusion rules of the result are
/// those of the torsor with `t = dz`.
pub fn relabel_by_1cochain(theory: &GxTheory, z: &ModuleCochain) -> Result<GxTheory> {
    relabel(theory, &ZLines::new(theory, z)?.relabeling()?)
}

/// The relabeling `ℛ_z` as a permutation.
pub fn relabeling_of_1cochain(theory: &GxTheory, z: &ModuleCochain) -> Result<Relabeling> {
    ZLines::new(theory, z)?.relabeling()
}

/// Result of [`coboundary_equivalence`].
#[derive(Debug, Clone)]
pub struct CoboundaryEquivalence {
    /// `dz`, the torsor 2-cocycle realized by the relabeling.
    pub dz: ModuleCochain,
    /// `Z_z`, the 3-cochain pairing with `dz`.
    pub z_z: PhaseCochain,
    /// Gauge taking `ℛ_z(theory)` to the torsored theory.
    pub gauge: GaugeTransform,
}

/// `Z_z` in closed form.
pub fn boundary_cochain(theory: &GxTheory, z: &ModuleCochain) -> Result<PhaseCochain> {
    let l = ZLines::new(theory, z)?;
    PhaseCochain::try_from_fn(theory.group().clone(), U1, 3, |t| l.boundary_x(t[0], t[1], t[2]))
}

/// Show that relabeling by `z` equals the torsor `(dz, Z_z)` up to gauge:
/// computes `Z_z`, solves for the gauge and checks `dZ_z · O_r(dz) = 1`.
pub fn coboundary_equivalence(theory: &GxTheory, z: &ModuleCochain, tol: f64) -> Result<CoboundaryEquivalence> {
    let l = ZLines::new(theory, z)?;
    let dz = z.coboundary();
    let z_z = PhaseCochain::try_from_fn(theory.group().clone(), U1, 3, |t| l.boundary_x(t[0], t[1], t[2]))?;
    let o_r = relative_obstruction_tol(theory, &dz, tol)?;
    let residual = z_z.coboundary().mul(&o_r).distance_from_identity();
    if residual > tol {
        return Err(Error::MatchFailure(format!("dZ_z · O_r(dz) deviates from 1 by {residual:.3e}")));
    }
    let relabeled = relabel(theory, &l.relabeling()?)?;
    let opts = TorsorOptions {
        tol,
        check_preconditions: false,
        record_obstruction: false,
    };
    let torsored = apply_torsor_with(theory, &TorsorInput::with_x(dz.clone(), z_z.clone()), &opts)?;
    let gauge = solve_gauge(&relabeled, &torsored, tol)?
        .ok_or_else(|| Error::MatchFailure("relabeled and torsored tables differ beyond gauge".into()))?;
    Ok(CoboundaryEquivalence { dz, z_z, gauge })
}

/// For a 1-cocycle `z`, the 3-cocycle `X` with `ℛ_z(C) ≅ C` glued to
/// `SPT^[X]`.
pub fn cocycle_relabel_class(theory: &GxTheory, z: &ModuleCochain, tol: f64) -> Result<PhaseCochain> {
    let l = ZLines::new(theory, z)?;
    if l.dz.iter().any(|&c| c != theory.vacuum()) {
        return Err(Error::NotA1Cocycle);
    }
    let x = PhaseCochain::try_from_fn(theory.group().clone(), U1, 3, |t| l.relabel_class(t[0], t[1], t[2]))?;
    let residual = x.coboundary().distance_from_identity();
    if residual > tol {
        return Err(Error::NotACocycle {
            what: "relabel class".into(),
            residual,
        });
    }
    Ok(x)
}

/// Index of the unknowns of a gauge solve.
struct Unknowns {
    vertex: BTreeMap<[usize; 3], usize>,
    symmetry: BTreeMap<[usize; 2], usize>,
}

impl Unknowns {
    fn new(th: &GxTheory) -> Self {
        let vac = th.vacuum();
        let mut vertex = BTreeMap::new();
        let mut symmetry = BTreeMap::new();
        let mut next = 0;
        for a in th.charges().filter(|&a| a != vac) {
            for b in th.charges().filter(|&b| b != vac) {
                for &c in th.products(a, b) {
                    vertex.insert([a, b, c], next);
                    next += 1;
                }
            }
        }
        let e = th.group().identity();
        for a in th.charges().filter(|&a| a != vac) {
            for g in th.group().elements().filter(|&g| g != e) {
                symmetry.insert([a, g], next);
                next += 1;
            }
        }
        Self { vertex, symmetry }
    }

    fn len(&self) -> usize {
        self.vertex.len() + self.symmetry.len()
    }
}

/// Rows of the linear system `A x ≡ b (mod 1)`, deduplicated.
#[derive(Default)]
struct System {
    rows: BTreeMap<Vec<(usize, i128)>, f64>,
    consistent: bool,
}

impl System {
    fn push(&mut self, terms: &[(Option<usize>, i128)], rhs: f64, tol: f64) {
        let mut acc: BTreeMap<usize, i128> = BTreeMap::new();
        for &(v, c) in terms {
            if let Some(v) = v {
                *acc.entry(v).or_default() += c;
            }
        }
        let row: Vec<(usize, i128)> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        let rhs = rhs.rem_euclid(1.0);
        if row.is_empty() {
            if rhs.min(1.0 - rhs) > tol {
                self.consistent = false;
            }
            return;
        }
        match self.rows.get(&row) {
            Some(&old) => {
                let d = (old - rhs).rem_euclid(1.0);
                if d.min(1.0 - d) > tol {
                    self.consistent = false;
                }
            }
            None => {
                self.rows.insert(row, rhs);
            }
        }
    }
}

/// A gauge `g` with `apply_gauge(src, g) = dst` entrywise within `tol`, or
/// `None` when none exists. Both theories must share labels, fusion and
/// action.
pub fn solve_gauge(src: &GxTheory, dst: &GxTheory, tol: f64) -> Result<Option<GaugeTransform>> {
    if src.table_distance(dst).is_none() {
        return Ok(None);
    }
    let th = src;
    let grp = th.group();
    let u = Unknowns::new(th);
    let v = |a: usize, b: usize, c: usize| u.vertex.get(&[a, b, c]).copied();
    let s = |a: usize, g: usize| u.symmetry.get(&[a, g]).copied();
    let mut sys = System {
        consistent: true,
        ..Default::default()
    };
    // Entries with vanishing modulus carry no phase information.
    let mut ratio = |x: C64, y: C64| -> Option<f64> {
        if x.norm() < tol && y.norm() < tol {
            return None;
        }
        let r = y / x;
        if !r.re.is_finite() || (r.norm() - 1.0).abs() > tol.max(1e-12) * 10.0 {
            sys.consistent = false;
            return None;
        }
        Some(turns_of(r))
    };
    let mut eqs: Vec<(Vec<(Option<usize>, i128)>, f64)> = Vec::new();
    for (&[a, b, c, d, e, f], &x) in th.f_entries() {
        if let Some(t) = ratio(x, dst.f(a, b, c, d, e, f)?) {
            eqs.push((vec![(v(a, b, e), 1), (v(e, c, d), 1), (v(b, c, f), -1), (v(a, f, d), -1)], t));
        }
    }
    for (&[a, b, c], &x) in th.r_entries() {
        if let Some(t) = ratio(x, dst.r(a, b, c)?) {
            let h = th.grade(b);
            let ha = th.act(grp.inv(h), a);
            eqs.push((vec![(s(a, h), 1), (v(b, ha, c), 1), (v(a, b, c), -1)], t));
        }
    }
    for (&[k, a, b, c], &x) in th.u_entries() {
        if let Some(t) = ratio(x, dst.u(k, a, b, c)?) {
            let kb = grp.inv(k);
            eqs.push((
                vec![
                    (v(th.act(kb, a), th.act(kb, b), th.act(kb, c)), 1),
                    (v(a, b, c), -1),
                    (s(a, k), 1),
                    (s(b, k), 1),
                    (s(c, k), -1),
                ],
                t,
            ));
        }
    }
    for (&[c, g, h], &x) in th.eta_entries() {
        if let Some(t) = ratio(x, dst.eta(c, g, h)?) {
            let gc = th.act(grp.inv(g), c);
            eqs.push((vec![(s(c, grp.mul(g, h)), 1), (s(gc, h), -1), (s(c, g), -1)], t));
        }
    }
    for (terms, t) in &eqs {
        sys.push(terms, *t, 1e-6);
    }
    if !sys.consistent {
        return Ok(None);
    }
    let n = u.len();
    let mut gauge = GaugeTransform::identity();
    if n > 0 && !sys.rows.is_empty() {
        let mut a = IntMatrix::zeros(sys.rows.len(), n);
        let mut b = Vec::with_capacity(sys.rows.len());
        for (i, (row, &rhs)) in sys.rows.iter().enumerate() {
            for &(j, c) in row {
                a.set(i, j, c);
            }
            b.push(rhs);
        }
        let smith = Smith::compute(&a)?;
        let Some(x) = smith.solve_mod_one(&b, 1e-6) else {
            return Ok(None);
        };
        for (&k, &i) in &u.vertex {
            gauge.vertex.insert(k, from_turns_f64(x[i]));
        }
        for (&k, &i) in &u.symmetry {
            gauge.symmetry.insert(k, from_turns_f64(x[i]));
        }
        gauge = gauge.pruned(1e-13);
    }
    let dist = apply_gauge(src, &gauge).table_distance(dst).map(|d| d.max());
    Ok((dist.is_some_and(|d| d <= tol)).then_some(gauge))
}

/// Witness that two theories are equivalent: relabel the first, then gauge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub relabeling: Relabeling,
    pub gauge: GaugeTransform,
}

/// Search for a grade-preserving relabeling `ℛ` and gauge `g` with
/// `apply_gauge(relabel(a, ℛ), g) = b`. At most `budget` candidate
/// relabelings are gauge-solved; exhausting the budget before the search
/// space is [`Error::BudgetExceeded`].
pub fn theories_equivalent(a: &GxTheory, b: &GxTheory, budget: usize, tol: f64) -> Result<Option<Witness>> {
    if **a.group() != **b.group() || a.num_charges() != b.num_charges() || a.vacuum() != b.vacuum() {
        return Ok(None);
    }
    let n = a.num_charges();
    let mut ga: Vec<usize> = a.charges().map(|x| a.grade(x)).collect();
    let mut gb: Vec<usize> = b.charges().map(|x| b.grade(x)).collect();
    ga.sort_unstable();
    gb.sort_unstable();
    if ga != gb {
        return Ok(None);
    }
    // Candidate images of each charge of b: same grade, same self-braiding
    // spectrum for identity-graded charges (gauge invariant there).
    let e = a.group().identity();
    let spectrum = |t: &GxTheory, x: usize| -> Vec<(usize, [i64; 2])> {
        if t.grade(x) != e {
            return Vec::new();
        }
        t.products(x, x)
            .iter()
            .map(|&c| {
                let r = t.r(x, x, c).unwrap_or(ONE);
                (t.products(x, x).len(), [(r.re * 1e6).round() as i64, (r.im * 1e6).round() as i64])
            })
            .collect()
    };
    let cands: Vec<Vec<usize>> = b
        .charges()
        .map(|x| {
            if x == b.vacuum() {
                return vec![a.vacuum()];
            }
            a.charges()
                .filter(|&y| y != a.vacuum() && a.grade(y) == b.grade(x) && spectrum(a, y) == spectrum(b, x))
                .collect()
        })
        .collect();
    let mut search = Search {
        a,
        b,
        cands,
        perm: vec![usize::MAX; n],
        used: vec![false; n],
        budget,
        spent: 0,
        tol,
    };
    search.run(0)
}

struct Search<'a> {
    a: &'a GxTheory,
    b: &'a GxTheory,
    cands: Vec<Vec<usize>>,
    perm: Vec<usize>,
    used: Vec<bool>,
    budget: usize,
    spent: usize,
    tol: f64,
}

impl Search<'_> {
    /// Fusion, duals and action agree on the charges assigned so far,
    /// given that they agreed before `x` was assigned.
    fn compatible(&self, x: usize) -> bool {
        let (a, b, p) = (self.a, self.b, &self.perm);
        let done = 0..=x;
        for y in done.clone() {
            for z in done.clone() {
                for [u, v, w] in [[x, y, z], [y, x, z], [y, z, x]] {
                    if b.n(u, v, w) != a.n(p[u], p[v], p[w]) {
                        return false;
                    }
                }
            }
        }
        for y in done {
            let by = b.dual(y);
            if by <= x && a.dual(p[y]) != p[by] {
                return false;
            }
            for g in b.group().elements() {
                let gy = b.act(g, y);
                if gy <= x && a.act(g, p[y]) != p[gy] {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, x: usize) -> Result<Option<Witness>> {
        if x == self.perm.len() {
            if self.spent == self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
            self.spent += 1;
            let r = Relabeling { perm: self.perm.clone() };
            let relabeled = relabel(self.a, &r)?;
            return Ok(solve_gauge(&relabeled, self.b, self.tol)?.map(|gauge| Witness { relabeling: r, gauge }));
        }
        for i in 0..self.cands[x].len() {
            let y = self.cands[x][i];
            if self.used[y] {
                continue;
            }
            self.perm[x] = y;
            self.used[y] = true;
            if self.compatible(x) {
                if let Some(w) = self.run(x + 1)? {
                    return Ok(Some(w));
                }
            }
            self.used[y] = false;
            self.perm[x] = usize::MAX;
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;
    use crate::consistency::{check_all, CheckOptions};
    use crate::constructions::{build_spt, fixtures, glue_spt, trivial_extension};
    use crate::groups::cohomology::U1Cohomology;
    use crate::groups::FiniteGroup;
    use crate::torsor::{apply_torsor, relative_obstruction, torsored_fusion};

    fn z2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2))
    }

    fn verdicts(t: &GxTheory) -> Vec<bool> {
        check_all(t, &CheckOptions::default()).iter().map(|r| r.passed()).collect()
    }

    /// Pseudo-random gauge from a seed, trivial where required.
    fn gauge_from_seed(th: &GxTheory, seed: u64) -> GaugeTransform {
        let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut g = GaugeTransform::identity();
        let vac = th.vacuum();
        for a in th.charges().filter(|&a| a != vac) {
            for b in th.charges().filter(|&b| b != vac) {
                for &c in th.products(a, b) {
                    g.vertex.insert([a, b, c], from_turns_f64(next()));
                }
            }
            for h in th.group().elements().filter(|&h| h != th.group().identity()) {
                g.symmetry.insert([a, h], from_turns_f64(next()));
            }
        }
        g
    }

    fn z_of(th: &GxTheory, f: impl Fn(usize) -> usize) -> ModuleCochain {
        let a = th.abelian_subgroup().unwrap();
        ModuleCochain::from_fn(th.group().clone(), a.module().clone(), 1, |g| {
            a.element(f(g[0])).expect("abelian charge")
        })
        .unwrap()
    }

    #[test]
    fn identity_gauge_is_identity() {
        let th = trivial_extension(&fixtures::semion(), z2()).unwrap();
        let out = apply_gauge(&th, &GaugeTransform::identity());
        assert_eq!(out.table_distance(&th).unwrap().max(), 0.0);
    }

    #[test]
    fn spt_coboundary_is_gauged_away() {
        for grp in ["Z2", "Z3", "S3"] {
            let g = Arc::new(FiniteGroup::parse(grp).unwrap());
            let n = g.order();
            let eps = PhaseCochain::from_fn(g.clone(), U1, 2, |t| {
                if t.contains(&0) {
                    ONE
                } else {
                    from_turns_f64((t[0] * n + t[1]) as f64 * 0.173)
                }
            })
            .unwrap();
            let spt = build_spt(&eps.coboundary()).unwrap();
            let e = |a: usize, b: usize| *eps.get(&[a, b]);
            let mut gauge = GaugeTransform::identity();
            for a in g.elements() {
                for b in g.elements() {
                    gauge.vertex.insert([a, b, g.mul(a, b)], e(a, b));
                    let hgh = g.conj(g.inv(b), a);
                    gauge.symmetry.insert([a, b], e(a, b) / e(b, hgh));
                }
            }
            let trivial = build_spt(&PhaseCochain::identity(g.clone(), U1, 3)).unwrap();
            let d = apply_gauge(&spt, &gauge).table_distance(&trivial).unwrap().max();
            assert!(d < 1e-12, "{grp}: {d}");
        }
    }

    #[test]
    fn toric_code_em_swap_is_a_valid_theory() {
        let tc = fixtures::toric_code();
        let swap = Relabeling { perm: vec![0, 2, 1, 3] };
        let out = relabel(&tc, &swap).unwrap();
        assert!(out.validate().is_empty());
        assert!(verdicts(&out).iter().all(|&v| v));
        let back = relabel(&out, &swap.inverse()).unwrap();
        assert_eq!(back.table_distance(&tc).unwrap().max(), 0.0);
        // The swapped tables are a gauge transform of the originals.
        let w = theories_equivalent(&tc, &out, 100, 1e-9).unwrap().expect("e-m duality");
        let back = apply_gauge(&relabel(&tc, &w.relabeling).unwrap(), &w.gauge);
        assert!(back.table_distance(&out).unwrap().max() < 1e-9);
    }

    #[test]
    fn relabel_rejects_grade_change() {
        let th = trivial_extension(&fixtures::semion(), z2()).unwrap();
        let r = Relabeling { perm: vec![0, 2, 1, 3] };
        assert!(matches!(relabel(&th, &r), Err(Error::GradeViolation(_))));
    }

    #[test]
    fn relabel_by_e_matches_torsored_fusion() {
        let th = trivial_extension(&fixtures::toric_code(), z2()).unwrap();
        let e = th.charge_by_name("e").unwrap();
        let z = z_of(&th, |g| if g == 1 { e } else { th.vacuum() });
        let out = relabel_by_1cochain(&th, &z).unwrap();
        assert_eq!(out.fusion_table(), torsored_fusion(&th, &z.coboundary()).unwrap().as_slice());
        for a in th.charges_of_grade(0) {
            for b in th.charges_of_grade(0) {
                assert_eq!(out.products(a, b), th.products(a, b));
            }
        }
        let id = z_of(&th, |_| th.vacuum());
        assert_eq!(relabel_by_1cochain(&th, &id).unwrap().table_distance(&th).unwrap().max(), 0.0);
    }

    #[test]
    fn coboundary_collapse_on_fixtures() {
        for grp in ["Z2", "Z2xZ2", "Z3"] {
            let g = Arc::new(FiniteGroup::parse(grp).unwrap());
            for c0 in [fixtures::toric_code(), fixtures::semion(), fixtures::z_n(3, 2).unwrap()] {
                let th = trivial_extension(&c0, g.clone()).unwrap();
                let a = th.abelian_subgroup().unwrap();
                let n = a.order();
                // Every z for small inputs, a stride through the rest.
                let total = n.pow(g.order() as u32 - 1);
                let step = (total / 16).max(1);
                for code in (0..total).step_by(step) {
                    let z = ModuleCochain::from_fn(g.clone(), a.module().clone(), 1, |t| {
                        if t[0] == 0 {
                            0
                        } else {
                            code / n.pow(t[0] as u32 - 1) % n
                        }
                    })
                    .unwrap();
                    let eq = coboundary_equivalence(&th, &z, 1e-9)
                        .unwrap_or_else(|e| panic!("{} over {grp}, z {code}: {e}", c0.name()));
                    let o = relative_obstruction(&th, &eq.dz).unwrap();
                    assert!(eq.z_z.coboundary().mul(&o).is_identity(1e-9));
                    if code == 0 {
                        assert!(eq.z_z.is_identity(1e-12) && eq.gauge.is_identity(1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn relabel_class_is_a_cocycle_and_collapses() {
        let th = trivial_extension(&fixtures::semion(), z2()).unwrap();
        let s = th.charge_by_name("s").unwrap();
        let z = z_of(&th, |g| if g == 1 { s } else { th.vacuum() });
        let x = cocycle_relabel_class(&th, &z, 1e-9).unwrap();
        // Trivial action: X(g,h,k) = 1 / F^{[z(hk) z̄(ghk)], [z(k) z̄(hk)], z̄(k)}.
        let f = th.f_abelian(s, s, s).unwrap();
        assert!((*x.get(&[1, 1, 1]) - f.conj()).norm() < 1e-12);
        assert!(x.coboundary().is_identity(1e-12));
        // Relabeling by z is gauge equivalent to gluing SPT^[X].
        let glued = glue_spt(&th, &x).unwrap();
        let relabeled = relabel_by_1cochain(&th, &z).unwrap();
        assert!(solve_gauge(&relabeled, &glued, 1e-9).unwrap().is_some());
        let tc = trivial_extension(&fixtures::toric_code(), z2()).unwrap();
        let bad = z_of(&tc, |g| if g == 1 { 1 } else { 0 });
        let a3 = trivial_extension(&fixtures::z_n(3, 2).unwrap(), Arc::new(FiniteGroup::cyclic(2))).unwrap();
        let z3 = z_of(&a3, |g| if g == 1 { 1 } else { 0 });
        assert!(cocycle_relabel_class(&tc, &bad, 1e-9).is_ok());
        assert!(matches!(cocycle_relabel_class(&a3, &z3, 1e-9), Err(Error::NotA1Cocycle)));
    }

    #[test]
    fn gauged_theory_is_found_equivalent() {
        let th = trivial_extension(&fixtures::toric_code(), z2()).unwrap();
        let g = gauge_from_seed(&th, 7);
        let gauged = apply_gauge(&th, &g);
        let w = theories_equivalent(&th, &gauged, 50, 1e-9).unwrap().expect("witness");
        let back = apply_gauge(&relabel(&th, &w.relabeling).unwrap(), &w.gauge);
        assert!(back.table_distance(&gauged).unwrap().max() < 1e-9);
        assert!(theories_equivalent(&th, &th, 1, 1e-9).unwrap().unwrap().relabeling.is_identity());
    }

    #[test]
    fn distinct_spt_classes_are_inequivalent() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let reps = U1Cohomology::new(g, 3, 3).unwrap().representatives();
        let spts: Vec<GxTheory> = reps.iter().map(|a| build_spt(a).unwrap()).collect();
        assert!(theories_equivalent(&spts[0], &spts[1], 10, 1e-9).unwrap().is_none());
        assert!(theories_equivalent(&spts[1], &spts[2], 10, 1e-9).unwrap().is_none());
    }

    #[test]
    fn budget_is_reported() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let reps = U1Cohomology::new(g, 3, 3).unwrap().representatives();
        let a = build_spt(&reps[1]).unwrap();
        let b = build_spt(&reps[2]).unwrap();
        assert!(matches!(theories_equivalent(&a, &b, 0, 1e-9), Err(Error::BudgetExceeded(0))));
    }

    #[test]
    fn gauge_round_trips_through_json() {
        let th = trivial_extension(&fixtures::semion(), z2()).unwrap();
        let g = gauge_from_seed(&th, 3);
        let s = serde_json::to_string(&g).unwrap();
        let back: GaugeTransform = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(g.validate(&th, 1e-12).is_ok());
    }

    #[test]
    fn torsor_with_trivial_t_and_relabeling_compose() {
        let th = trivial_extension(&fixtures::semion(), z2()).unwrap();
        let id = crate::torsor::TorsorInput::identity(&th).unwrap();
        let out = apply_torsor(&th, &id).unwrap();
        assert!(solve_gauge(&out, &th, 1e-12).unwrap().unwrap().is_identity(1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn gauge_preserves_verdicts(seed in any::<u64>(), which in 0usize..3) {
            let c0 = [fixtures::semion(), fixtures::toric_code(), fixtures::z_n(3, 2).unwrap()][which].clone();
            let th = trivial_extension(&c0, z2()).unwrap();
            let g = gauge_from_seed(&th, seed);
            let gauged = apply_gauge(&th, &g);
            prop_assert_eq!(verdicts(&gauged), verdicts(&th));
            let found = solve_gauge(&th, &gauged, 1e-9).unwrap().expect("solvable");
            prop_assert!(apply_gauge(&th, &found).table_distance(&gauged).unwrap().max() < 1e-9);
        }

        #[test]
        fn gauge_preserves_verdicts_on_broken_data(seed in any::<u64>()) {
            let mut th = trivial_extension(&fixtures::semion(), z2()).unwrap();
            let s = th.charge_by_name("s").unwrap();
            th.set_f([s, s, s, s, 0, 0], C64::new(0.0, 1.0)).unwrap();
            let gauged = apply_gauge(&th, &gauge_from_seed(&th, seed));
            prop_assert_eq!(verdicts(&gauged), verdicts(&th));
        }
    }
}
