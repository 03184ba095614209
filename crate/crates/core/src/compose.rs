//! Composition of torsor functors.
//!
//! Applying `(t′, X′)` and then `(t″, X″)` equals, up to the gauge returned
//! by [`compose_torsors`], applying `(t′t″, X′X″Y_{t″,t′})` once. The order
//! of the two functors matters only through the commutator 3-cocycle of
//! [`commutator_class`].

use crate::equivalence::GaugeTransform;
use crate::groups::{ModuleCochain, PhaseCochain, U1};
use crate::phase::C64;
use crate::torsor::{check_t, Lines, TorsorInput};
use crate::{Error, GxTheory, Result};

/// Composite torsor input and the gauge relating the two sides.
#[derive(Debug, Clone)]
pub struct Composition {
    pub composite: TorsorInput,
    /// Gauge on `apply_torsor(theory, composite)`.
    pub gauge: GaugeTransform,
    pub y: PhaseCochain,
}

/// `Y_{t′,t″}(g,h,k)`.
fn y_entry(p: &Lines, pp: &Lines, [g, h, k]: [usize; 3]) -> Result<C64> {
    let (gh, hk) = (p.mul(g, h), p.mul(h, k));
    let x = |a, b| p.fuse(a, b);
    let fa = |a, b, c| p.fa(a, b, c);
    let (t1gh, t1ghk, t1ghk2) = (p.t(g, h), p.t(gh, k), p.t(g, hk));
    let (t2gh, t2ghk, t2ghk2) = (pp.t(g, h), pp.t(gh, k), pp.t(g, hk));
    let g1hk = p.act(g, p.t(h, k));
    let g2hk = p.act(g, pp.t(h, k));
    let num = fa(t2ghk, t1ghk, t2gh)?
        * fa(x(t2gh, t2ghk)?, t1ghk, t1gh)?
        * fa(t2ghk2, g2hk, t1ghk2)?
        * fa(x(t2ghk2, t1ghk2)?, g2hk, g1hk)?;
    let den = fa(x(t2ghk, t1ghk)?, t2gh, t1gh)?
        * fa(t2ghk, t2gh, t1ghk)?
        * fa(x(t2gh, t2ghk)?, t1ghk2, g1hk)?
        * fa(t2ghk2, t1ghk2, g2hk)?;
    Ok(p.rb(t2gh, t1ghk)? / (p.rb(g2hk, t1ghk2)? * p.ub(g, g2hk, g1hk)?) * num / den)
}

/// `Y_{t′,t″}` as a cochain.
pub fn composition_cochain(theory: &GxTheory, t1: &ModuleCochain, t2: &ModuleCochain) -> Result<PhaseCochain> {
    let p = Lines::new(theory, t1)?;
    let pp = Lines::new(theory, t2)?;
    PhaseCochain::try_from_fn(theory.group().clone(), U1, 3, |a| y_entry(&p, &pp, [a[0], a[1], a[2]]))
}

/// Compose `in1 = (t′, X′)` followed by `in2 = (t″, X″)`.
///
/// The composite obstruction correction is `Y_{t″,t′}`; the vertex gauge
/// carries the braiding `R^{t′ t″}` of the two phantom lines.
///
/// Both 2-cocycles are checked against the identity-graded abelian charges
/// of `theory`; the torsored action agrees with the original one there, so
/// `in2` is also a valid input for the intermediate theory.
pub fn compose_torsors(theory: &GxTheory, in1: &TorsorInput, in2: &TorsorInput) -> Result<Composition> {
    check_t(theory, &in1.t)?;
    check_t(theory, &in2.t)?;
    let t = in1.t.mul(&in2.t);
    let l1 = Lines::new(theory, &in1.t)?;
    let l2 = Lines::new(theory, &in2.t)?;
    let l = Lines::new(theory, &t)?;
    let grp = theory.group().clone();
    let y = PhaseCochain::try_from_fn(grp.clone(), U1, 3, |a| y_entry(&l2, &l1, [a[0], a[1], a[2]]))?;
    let x = in1.x.mul(&in2.x).mul(&y);
    let composite = TorsorInput::with_x(t, x);

    // Vertices and grades of the torsored theory.
    let products = l.hat_products()?;
    let mut gauge = GaugeTransform::identity();
    for a in theory.charges() {
        for b in theory.charges() {
            let (g, h) = (theory.grade(a), theory.grade(b));
            let (s1, s2) = (l1.t(g, h), l2.t(g, h));
            let braid = l.rb(s1, s2)?;
            for &e in &products[a][b] {
                let v = l.fa(s2, s1, l.fuse(l.tb(g, h), e)?)?;
                gauge.vertex.insert([a, b, e], v * braid);
            }
        }
    }
    for a in theory.charges() {
        let g = theory.grade(a);
        for h in grp.elements() {
            let (q1, q2, q) = (l1.q(g, h)?, l2.q(g, h)?, l.q(g, h)?);
            let (s1, s2) = (l1.t(g, h), l2.t(g, h));
            let hgh = l.conj_by_inv(h, g);
            let num = l.fa(s2, q2, s1)? * l.fa(l.t(g, h), q2, q1)?;
            let den = l.fa(l2.t(h, hgh), s1, q1)? * l.fa(s2, s1, q2)?;
            let tail = l.fa(q2, q1, l.fuse(l.dual(q), a)?)?;
            let braid = l.rb(s1, s2)? / l.rb(l1.t(h, hgh), l2.t(h, hgh))?;
            gauge.symmetry.insert([a, h], (num / den * tail).conj() * l.rb(s1, q2)? * braid);
        }
    }
    Ok(Composition {
        composite,
        gauge: gauge.pruned(1e-13),
        y,
    })
}

/// Commutator class of two torsors with its coboundary witness.
#[derive(Debug, Clone)]
pub struct Commutator {
    /// `C_{t′,t″}`.
    pub c: PhaseCochain,
    /// `Ξ(g,h) = 1 / R^{t″(g,h) t′(g,h)}`.
    pub xi: PhaseCochain,
    /// Largest entrywise deviation of `Y_{t″,t′} / (C · Y_{t′,t″})` from `dΞ`.
    pub residual: f64,
}

/// `C_{t′,t″}(g,h,k) = M(t′(g,h), t″(gh,k)) / M(^g t′(h,k), t″(g,hk))`,
/// checked to satisfy `Y_{t″,t′} = C · Y_{t′,t″} · dΞ`.
pub fn commutator_class(theory: &GxTheory, t1: &ModuleCochain, t2: &ModuleCochain, tol: f64) -> Result<Commutator> {
    let p = Lines::new(theory, t1)?;
    let pp = Lines::new(theory, t2)?;
    let m = |a: usize, b: usize| {
        theory.monodromy(a, b).map_err(|e| match e {
            Error::NotAbelian { a, b } => Error::NotAbelianMonodromy { a, b },
            e => e,
        })
    };
    let grp = theory.group().clone();
    let c = PhaseCochain::try_from_fn(grp.clone(), U1, 3, |a| {
        let [g, h, k] = [a[0], a[1], a[2]];
        Ok(m(p.t(g, h), pp.t(p.mul(g, h), k))? / m(p.act(g, p.t(h, k)), pp.t(g, p.mul(h, k)))?)
    })?;
    let xi = PhaseCochain::try_from_fn(grp, U1, 2, |a| Ok(p.rb(pp.t(a[0], a[1]), p.t(a[0], a[1]))?.conj()))?;
    let y12 = composition_cochain(theory, t1, t2)?;
    let y21 = composition_cochain(theory, t2, t1)?;
    let residual = y21.mul(&c.mul(&y12).inverse()).distance(&xi.coboundary());
    if residual > tol {
        return Err(Error::MatchFailure(format!(
            "Y_{{t2,t1}} / (C Y_{{t1,t2}}) differs from dXi by {residual:.3e}"
        )));
    }
    Ok(Commutator { c, xi, residual })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::constructions::{fixtures, trivial_extension};
    use crate::equivalence::apply_gauge;
    use crate::groups::cohomology::module_cocycles;
    use crate::groups::FiniteGroup;
    use crate::torsor::{apply_torsor_with, t_from_charges, TorsorOptions};

    fn opts() -> TorsorOptions {
        TorsorOptions {
            check_preconditions: false,
            ..Default::default()
        }
    }

    fn x_of(g: Arc<FiniteGroup>, s: f64) -> PhaseCochain {
        let n = g.order();
        PhaseCochain::from_fn(g, U1, 3, |a| {
            if a.contains(&0) {
                crate::phase::ONE
            } else {
                crate::phase::from_turns_f64(((a[0] * n + a[1]) * n + a[2]) as f64 * s)
            }
        })
        .unwrap()
    }

    fn check_pair(th: &GxTheory, in1: &TorsorInput, in2: &TorsorInput) -> f64 {
        let two = apply_torsor_with(&apply_torsor_with(th, in1, &opts()).unwrap(), in2, &opts()).unwrap();
        let comp = compose_torsors(th, in1, in2).unwrap();
        let one = apply_torsor_with(th, &comp.composite, &opts()).unwrap();
        apply_gauge(&one, &comp.gauge).table_distance(&two).expect("same fusion").max()
    }

    #[test]
    fn toric_code_e_then_m() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let th = trivial_extension(&fixtures::toric_code(), g.clone()).unwrap();
        let [e, m, f] = ["e", "m", "f"].map(|n| th.charge_by_name(n).unwrap());
        let t1 = t_from_charges(&th, |a, b| if a == 1 && b == 1 { e } else { 0 }).unwrap();
        let t2 = t_from_charges(&th, |a, b| if a == 1 && b == 1 { m } else { 0 }).unwrap();
        let comp = compose_torsors(&th, &TorsorInput::new(t1.clone()), &TorsorInput::new(t2.clone())).unwrap();
        let a = th.abelian_subgroup().unwrap();
        assert_eq!(a.charge(*comp.composite.t.get(&[1, 1])), f);
        let d = check_pair(&th, &TorsorInput::new(t1.clone()), &TorsorInput::new(t2.clone()));
        assert!(d < 1e-9, "{d}");
        let c = commutator_class(&th, &t1, &t2, 1e-9).unwrap();
        assert!(c.c.is_identity(1e-12));
    }

    #[test]
    fn trivial_first_factor_gives_second() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let th = trivial_extension(&fixtures::semion(), g.clone()).unwrap();
        let id = TorsorInput::identity(&th).unwrap();
        let s = th.charge_by_name("s").unwrap();
        let t2 = t_from_charges(&th, |a, b| if a == 1 && b == 1 { s } else { 0 }).unwrap();
        let in2 = TorsorInput::with_x(t2, x_of(g, 0.21));
        let comp = compose_torsors(&th, &id, &in2).unwrap();
        assert_eq!(comp.composite.t, in2.t);
        assert!(comp.composite.x.distance(&in2.x) < 1e-12);
        assert!(comp.gauge.is_identity(1e-12));
        let both = compose_torsors(&th, &id, &id).unwrap();
        assert!(both.gauge.is_identity(0.0) && both.composite.x.is_identity(0.0));
    }

    #[test]
    fn every_pair_of_cocycles() {
        for (grp, c0) in [
            ("Z2", fixtures::toric_code()),
            ("Z2", fixtures::semion()),
            ("Z3", fixtures::z_n(3, 2).unwrap()),
            ("Z2xZ2", fixtures::semion()),
            ("Z2xZ2", fixtures::toric_code()),
            ("S3", fixtures::semion()),
        ] {
            let g = Arc::new(FiniteGroup::parse(grp).unwrap());
            let th = trivial_extension(&c0, g.clone()).unwrap();
            let a = th.abelian_subgroup().unwrap();
            let all = module_cocycles(g.clone(), a.module().clone(), 2, 4096).unwrap();
            let pick: Vec<_> = all.iter().step_by((all.len() / 6).max(1)).collect();
            for (i, t1) in pick.iter().enumerate() {
                for t2 in &pick {
                    let in1 = TorsorInput::with_x((*t1).clone(), x_of(g.clone(), 0.11));
                    let in2 = TorsorInput::with_x((*t2).clone(), x_of(g.clone(), 0.37));
                    let d = check_pair(&th, &in1, &in2);
                    assert!(d < 1e-9, "{} over {grp}, pair {i}: {d}", c0.name());
                    commutator_class(&th, t1, t2, 1e-9).unwrap();
                }
            }
        }
    }
}
