//! Consistency equations of a G-crossed theory and the defectification
//! obstruction.
//!
//! Every checker sweeps all admissible label tuples and records the absolute
//! difference between the two sides. Labels follow the conventions of
//! [`crate::category`].

use std::sync::Arc;

use serde::Serialize;

use crate::groups::{tuples, FiniteGroup, PhaseCochain, U1};
use crate::phase::{C64, DEFAULT_TOL, ONE};
use crate::{Error, GxTheory, Result};

/// Which equation a report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    Pentagon,
    Hexagon,
    #[serde(rename = "heptagon+")]
    HeptagonPlus,
    #[serde(rename = "heptagon-")]
    HeptagonMinus,
    EtaAssoc,
    KappaSliding,
}

impl Equation {
    pub fn name(self) -> &'static str {
        match self {
            Equation::Pentagon => "pentagon",
            Equation::Hexagon => "hexagon",
            Equation::HeptagonPlus => "heptagon+",
            Equation::HeptagonMinus => "heptagon-",
            Equation::EtaAssoc => "eta-assoc",
            Equation::KappaSliding => "kappa-sliding",
        }
    }
}

/// A tuple on which the two sides disagree by more than the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub labels: Vec<usize>,
    #[serde(serialize_with = "ser_c64")]
    pub lhs: C64,
    #[serde(serialize_with = "ser_c64")]
    pub rhs: C64,
}

fn ser_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Outcome of one checker.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub equation: Equation,
    pub worst_residual: f64,
    pub checked: usize,
    pub tol: f64,
    /// At most [`MAX_RECORDED_FAILURES`] entries; `failure_count` is exact.
    pub failures: Vec<Failure>,
    pub failure_count: usize,
}

pub const MAX_RECORDED_FAILURES: usize = 64;

impl ConsistencyReport {
    fn new(equation: Equation, tol: f64) -> Self {
        Self {
            equation,
            worst_residual: 0.0,
            checked: 0,
            tol,
            failures: Vec::new(),
            failure_count: 0,
        }
    }

    fn record(&mut self, labels: &[usize], lhs: C64, rhs: C64) {
        let r = (lhs - rhs).norm();
        self.checked += 1;
        if r > self.worst_residual {
            self.worst_residual = r;
        }
        if r > self.tol {
            self.failure_count += 1;
            if self.failures.len() < MAX_RECORDED_FAILURES {
                self.failures.push(Failure {
                    labels: labels.to_vec(),
                    lhs,
                    rhs,
                });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    /// Merge `other` into `self` keeping the worse residual.
    fn absorb(&mut self, other: ConsistencyReport) {
        self.checked += other.checked;
        self.worst_residual = self.worst_residual.max(other.worst_residual);
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < MAX_RECORDED_FAILURES {
                self.failures.push(f);
            }
        }
    }
}

/// Checker options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    /// Skip pentagon tuples with more than this many non-identity grades.
    pub max_defects: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_defects: 4,
        }
    }
}

impl CheckOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Zero on inadmissible tuples, for use inside sums.
#[inline]
fn fz(t: &GxTheory, a: usize, b: usize, c: usize, d: usize, e: usize, f: usize) -> C64 {
    t.f(a, b, c, d, e, f).unwrap_or(C64::new(0.0, 0.0))
}

/// `Σ_δ F^{fcd}_e(g,l) F^{abl}_e(f,k) = Σ_h F^{abc}_g(f,h) F^{ahd}_e(g,k) F^{bcd}_k(h,l)`.
pub fn check_pentagon(t: &GxTheory, opts: &CheckOptions) -> ConsistencyReport {
    let mut rep = ConsistencyReport::new(Equation::Pentagon, opts.tol);
    let id = t.group().identity();
    let n = t.num_charges();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let defects = [a, b, c, d].iter().filter(|&&x| t.grade(x) != id).count();
                    if defects > opts.max_defects {
                        continue;
                    }
                    pentagon_at(t, [a, b, c, d], &mut rep);
                }
            }
        }
    }
    rep
}

fn pentagon_at(t: &GxTheory, abcd: [usize; 4], rep: &mut ConsistencyReport) {
    pentagon_sides(t, abcd, |labels, lhs, rhs| rep.record(labels, lhs, rhs));
}

/// Both hexagon equations on the identity-graded sector.
pub fn check_hexagon(t: &GxTheory, opts: &CheckOptions) -> ConsistencyReport {
    let mut rep = ConsistencyReport::new(Equation::Hexagon, opts.tol);
    let id = t.group().identity();
    let sector: Vec<usize> = t.charges_of_grade(id).collect();
    let rz = |a, b, c| t.r(a, b, c).unwrap_or(C64::new(0.0, 0.0));
    for &a in &sector {
        for &b in &sector {
            for &c in &sector {
                for &e in t.products(a, c) {
                    for &g in t.products(b, c) {
                        for &d in t.products(e, b) {
                            if !t.n(a, g, d) {
                                continue;
                            }
                            let mid = fz(t, a, c, b, d, e, g);
                            let sum = |inverse: bool| -> C64 {
                                t.products(a, b)
                                    .iter()
                                    .map(|&f| {
                                        let r = if inverse { rz(c, f, d).conj() } else { rz(f, c, d) };
                                        fz(t, c, a, b, d, e, f) * r * fz(t, a, b, c, d, f, g)
                                    })
                                    .sum()
                            };
                            let lhs = rz(a, c, e) * mid * rz(b, c, g);
                            rep.record(&[0, a, b, c, d, e, g], lhs, sum(false));
                            let lhs = rz(c, a, e).conj() * mid * rz(c, b, g).conj();
                            rep.record(&[1, a, b, c, d, e, g], lhs, sum(true));
                        }
                    }
                }
            }
        }
    }
    rep
}

/// Both heptagon equations over all grades. The returned report carries
/// [`Equation::HeptagonPlus`]; use [`check_heptagon_plus`] and
/// [`check_heptagon_minus`] for the separate reports.
pub fn check_heptagons(t: &GxTheory, opts: &CheckOptions) -> ConsistencyReport {
    let mut rep = check_heptagon_plus(t, opts);
    rep.absorb(check_heptagon_minus(t, opts));
    rep
}

/// `R^{ac}_e F^{a c ᵏ̄b}_d(e,g) R^{bc}_g
///  = Σ_f F^{c ᵏ̄a ᵏ̄b}_d(e, ᵏ̄f) U_k(a,b;f) R^{fc}_d F^{abc}_d(f,g)`.
pub fn check_heptagon_plus(t: &GxTheory, opts: &CheckOptions) -> ConsistencyReport {
    let mut rep = ConsistencyReport::new(Equation::HeptagonPlus, opts.tol);
    let grp = t.group().clone();
    let n = t.num_charges();
    let rz = |a, b, c| t.r(a, b, c).unwrap_or(C64::new(0.0, 0.0));
    let uz = |k, a, b, c| t.u(k, a, b, c).unwrap_or(C64::new(0.0, 0.0));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let kbar = grp.inv(t.grade(c));
                let (ka, kb) = (t.act(kbar, a), t.act(kbar, b));
                for &e in t.products(a, c) {
                    for &g in t.products(c, kb) {
                        for &d in t.products(e, kb) {
                            if !t.n(a, g, d) {
                                continue;
                            }
                            let lhs = rz(a, c, e) * fz(t, a, c, kb, d, e, g) * rz(b, c, g);
                            let rhs: C64 = t
                                .products(a, b)
                                .iter()
                                .map(|&f| {
                                    fz(t, c, ka, kb, d, e, t.act(kbar, f))
                                        * uz(t.grade(c), a, b, f)
                                        * rz(f, c, d)
                                        * fz(t, a, b, c, d, f, g)
                                })
                                .sum();
                            rep.record(&[a, b, c, d, e, g], lhs, rhs);
                        }
                    }
                }
            }
        }
    }
    rep
}

/// `(R^{ca}_e)⁻¹ F^{a ḡc b}_d(e,g) (R^{ḡc b}_g)⁻¹
///  = Σ_f F^{cab}_d(e,f) η_c(g,h) (R^{cf}_d)⁻¹ F^{a b h̄ḡc}_d(f,g)`.
pub fn check_heptagon_minus(t: &GxTheory, opts: &CheckOptions) -> ConsistencyReport {
    let mut rep = ConsistencyReport::new(Equation::HeptagonMinus, opts.tol);
    let grp = t.group().clone();
    let n = t.num_charges();
    let rz = |a, b, c| t.r(a, b, c).unwrap_or(C64::new(0.0, 0.0));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (g, h) = (t.grade(a), t.grade(b));
                let gc = t.act(grp.inv(g), c);
                let hgc = t.act(grp.inv(grp.mul(g, h)), c);
                let eta = t.eta(c, g, h).unwrap_or(C64::new(0.0, 0.0));
                for &e in t.products(a, gc) {
                    for &gl in t.products(gc, b) {
                        for &d in t.products(e, b) {
                            if !t.n(a, gl, d) {
                                continue;
                            }
                            let lhs = rz(c, a, e).conj() * fz(t, a, gc, b, d, e, gl) * rz(gc, b, gl).conj();
                            let rhs: C64 = t
                                .products(a, b)
                                .iter()
                                .map(|&f| {
                                    fz(t, c, a, b, d, e, f) * eta * rz(c, f, d).conj() * fz(t, a, b, hgc, d, f, gl)
                                })
                                .sum();
                            rep.record(&[a, b, c, d, e, gl], lhs, rhs);
                        }
                    }
                }
            }
        }
    }
    rep
}

/// `η_a(g,h) η_a(gh,k) = η_a(g,hk) η_{ḡa}(h,k)`.
pub fn check_eta_associativity(t: &GxTheory, opts: &CheckOptions) -> ConsistencyReport {
    let mut rep = ConsistencyReport::new(Equation::EtaAssoc, opts.tol);
    let grp = t.group().clone();
    let eta = |x, g, h| t.eta(x, g, h).unwrap_or(C64::new(0.0, 0.0));
    for a in t.charges() {
        for g in grp.elements() {
            let ga = t.act(grp.inv(g), a);
            for h in grp.elements() {
                for k in grp.elements() {
                    let lhs = eta(a, g, h) * eta(a, grp.mul(g, h), k);
                    let rhs = eta(a, g, grp.mul(h, k)) * eta(ga, h, k);
                    rep.record(&[a, g, h, k], lhs, rhs);
                }
            }
        }
    }
    rep
}

/// `η_a(g,h) η_b(g,h) / η_c(g,h) = U_g(a,b;c)⁻¹ U_h(ḡa,ḡb;ḡc)⁻¹ U_gh(a,b;c)`.
pub fn check_kappa_sliding(t: &GxTheory, opts: &CheckOptions) -> ConsistencyReport {
    let mut rep = ConsistencyReport::new(Equation::KappaSliding, opts.tol);
    let grp = t.group().clone();
    let eta = |x, g, h| t.eta(x, g, h).unwrap_or(C64::new(0.0, 0.0));
    let uz = |k, a, b, c| t.u(k, a, b, c).unwrap_or(C64::new(0.0, 0.0));
    for a in t.charges() {
        for b in t.charges() {
            for &c in t.products(a, b) {
                for g in grp.elements() {
                    let gi = grp.inv(g);
                    let (ga, gb, gc) = (t.act(gi, a), t.act(gi, b), t.act(gi, c));
                    for h in grp.elements() {
                        let lhs = eta(a, g, h) * eta(b, g, h) * eta(c, g, h).conj();
                        let rhs = uz(g, a, b, c).conj() * uz(h, ga, gb, gc).conj() * uz(grp.mul(g, h), a, b, c);
                        rep.record(&[a, b, c, g, h], lhs, rhs);
                    }
                }
            }
        }
    }
    rep
}

/// Every checker, in a fixed order: pentagon, hexagon, heptagon+, heptagon−,
/// η-associativity, κ-sliding.
pub fn check_all(t: &GxTheory, opts: &CheckOptions) -> Vec<ConsistencyReport> {
    vec![
        check_pentagon(t, opts),
        check_hexagon(t, opts),
        check_heptagon_plus(t, opts),
        check_heptagon_minus(t, opts),
        check_eta_associativity(t, opts),
        check_kappa_sliding(t, opts),
    ]
}

/// Whether every report passed.
pub fn all_passed(reports: &[ConsistencyReport]) -> bool {
    reports.iter().all(ConsistencyReport::passed)
}

/// The defectification obstruction `O(g,h,k,l)`: the ratio of the two sides
/// of the pentagon on a representative tuple of grades `(g,h,k,l)`.
///
/// The representative uses the lowest charge indices; every other admissible
/// tuple is checked to give the same ratio within `tol`.
pub fn defectification_obstruction(t: &GxTheory, tol: f64) -> Result<PhaseCochain> {
    let grp: Arc<FiniteGroup> = t.group().clone();
    let order = grp.order();
    let by_grade: Vec<Vec<usize>> = grp.elements().map(|g| t.charges_of_grade(g).collect()).collect();
    let mut values = vec![ONE; order.pow(4)];
    for (idx, gs) in tuples(order, 4).enumerate() {
        if gs.contains(&grp.identity()) {
            continue;
        }
        // (lhs, rhs) pairs over every admissible tuple in this grade sector.
        let mut sides: Vec<(C64, C64)> = Vec::new();
        for &a in &by_grade[gs[0]] {
            for &b in &by_grade[gs[1]] {
                for &c in &by_grade[gs[2]] {
                    for &d in &by_grade[gs[3]] {
                        pentagon_sides(t, [a, b, c, d], |_, l, r| sides.push((l, r)));
                    }
                }
            }
        }
        let (l0, r0) = sides
            .iter()
            .copied()
            .find(|(l, _)| l.norm() > 1e-6)
            .ok_or_else(|| Error::InvalidInput(format!("no admissible pentagon tuple in grades {gs:?}")))?;
        let o = r0 / l0;
        let spread = sides.iter().map(|&(l, r)| (r - o * l).norm()).fold(0.0, f64::max);
        if spread > tol {
            return Err(Error::RepresentativeDependent { args: gs, spread });
        }
        values[idx] = o / o.norm();
    }
    let mut it = values.into_iter();
    PhaseCochain::from_fn(grp, U1, 4, |_| it.next().expect("one value per tuple"))
}

fn pentagon_sides(t: &GxTheory, [a, b, c, d]: [usize; 4], mut visit: impl FnMut(&[usize], C64, C64)) {
    for &f in t.products(a, b) {
        for &g in t.products(f, c) {
            for &e in t.products(g, d) {
                for &l in t.products(c, d) {
                    if !t.n(f, l, e) {
                        continue;
                    }
                    for &k in t.products(b, l) {
                        if !t.n(a, k, e) {
                            continue;
                        }
                        let lhs = fz(t, f, c, d, e, g, l) * fz(t, a, b, l, e, f, k);
                        let rhs: C64 = t
                            .products(b, c)
                            .iter()
                            .map(|&h| {
                                fz(t, a, b, c, g, f, h) * fz(t, a, h, d, e, g, k) * fz(t, b, c, d, k, h, l)
                            })
                            .sum();
                        visit(&[a, b, c, d, e, f, g, k, l], lhs, rhs);
                    }
                }
            }
        }
    }
}
