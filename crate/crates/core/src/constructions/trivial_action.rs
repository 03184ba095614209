//! Torsored data of `C₀ ⊠ SPT^[1]` written directly in terms of `C₀`.
//!
//! Written independently of [`crate::torsor`]: every label here is a `C₀`
//! charge, and the group only enters through the arguments of `t` and `X`.

use std::sync::Arc;

use crate::category::TheoryBuilder;
use crate::groups::{FiniteGroup, PhaseCochain, U1};
use crate::phase::C64;
use crate::{Error, GxTheory, Result};

use super::extension_index;

/// Closed-form torsored theory and its obstruction.
#[derive(Debug, Clone)]
pub struct ClosedForms {
    pub theory: GxTheory,
    /// `Ô = O_r(t)`, since the base extension is unobstructed.
    pub obstruction: PhaseCochain,
}

struct C0<'a> {
    c0: &'a GxTheory,
    grp: &'a FiniteGroup,
    /// `t(g,h)` as a `C₀` charge.
    t: Vec<usize>,
}

impl C0<'_> {
    fn t(&self, g: usize, h: usize) -> usize {
        self.t[g * self.grp.order() + h]
    }
    fn bar(&self, a: usize) -> usize {
        self.c0.dual(a)
    }
    fn x(&self, a: usize, b: usize) -> Result<usize> {
        self.c0.fuse1(a, b)
    }
    /// `t̄(g,h) ⊗ a`.
    fn tb(&self, g: usize, h: usize, a: usize) -> Result<usize> {
        self.x(self.bar(self.t(g, h)), a)
    }
    fn q(&self, g: usize, h: usize) -> Result<usize> {
        let hgh = self.grp.conj(self.grp.inv(h), g);
        self.x(self.bar(self.t(g, h)), self.t(h, hgh))
    }
    fn qb(&self, g: usize, h: usize, a: usize) -> Result<usize> {
        self.x(self.bar(self.q(g, h)?), a)
    }
    fn f(&self, a: usize, b: usize, c: usize, d: usize, e: usize, f: usize) -> Result<C64> {
        self.c0.f(a, b, c, d, e, f)
    }
    fn fa(&self, a: usize, b: usize, c: usize) -> Result<C64> {
        self.c0.f_abelian(a, b, c)
    }
    fn r(&self, a: usize, b: usize, c: usize) -> Result<C64> {
        self.c0.r(a, b, c)
    }
    fn rb(&self, a: usize, b: usize) -> Result<C64> {
        self.c0.r(a, b, self.x(a, b)?)
    }
    /// `k̄ g k`.
    fn cj(&self, k: usize, g: usize) -> usize {
        self.grp.conj(self.grp.inv(k), g)
    }
    fn m(&self, g: usize, h: usize) -> usize {
        self.grp.mul(g, h)
    }
}

/// The torsor `(t, X)` applied to `C₀ ⊠ SPT^[1]` over `group`, from the
/// closed forms for trivially acting symmetry. `t(g,h)` returns a `C₀`
/// charge. Charges are indexed as in [`super::trivial_extension`].
pub fn trivial_action_closed_forms(
    c0: &GxTheory,
    group: Arc<FiniteGroup>,
    t: impl Fn(usize, usize) -> usize,
    x: &PhaseCochain,
) -> Result<ClosedForms> {
    if c0.group().order() != 1 {
        return Err(Error::Precondition("base theory must be over the trivial group".into()));
    }
    let n0 = c0.num_charges();
    let order = group.order();
    let table: Vec<usize> = (0..order * order).map(|i| t(i / order, i % order)).collect();
    let z = C0 { c0, grp: &group, t: table };
    let idx = |a, g| extension_index(n0, a, g);
    let split = |a: usize| (a % n0, a / n0);

    let mut b = TheoryBuilder::new(format!("{} x {} (closed form)", c0.name(), group.name()), group.clone());
    for g in group.elements() {
        for a in c0.charges() {
            let name = if g == group.identity() {
                c0.charge_name(a).to_string()
            } else {
                format!("{}_{}", c0.charge_name(a), g)
            };
            b.charge(name, g);
        }
    }
    b.vacuum(idx(c0.vacuum(), group.identity()));
    for g in group.elements() {
        for h in group.elements() {
            for a in c0.charges() {
                for bb in c0.charges() {
                    for &c in c0.products(a, bb) {
                        b.fuse(idx(a, g), idx(bb, h), idx(z.x(z.t(g, h), c)?, z.m(g, h)));
                    }
                }
            }
        }
    }
    let mut action = vec![vec![0; n0 * order]; order];
    for k in group.elements() {
        for g in group.elements() {
            for a in c0.charges() {
                let kb = group.inv(k);
                action[k][idx(a, g)] = idx(z.qb(g, kb, a)?, group.conj(k, g));
            }
        }
    }
    b.action(action);
    let mut th = b.build()?;
    let xv = |g: usize, h: usize, k: usize| *x.get(&[g, h, k]);

    th.fill_f(|key| {
        let [(a, g), (bb, h), (c, k), (d, _), (e, _), (f, _)] = key.map(split);
        let (gh, hk) = (z.m(g, h), z.m(h, k));
        let (t1, t2, t3, t4) = (z.t(g, h), z.t(gh, k), z.t(g, hk), z.t(h, k));
        let e1 = z.tb(g, h, e)?;
        let d1 = z.tb(gh, k, d)?;
        let d2 = z.tb(g, h, d1)?;
        let f1 = z.tb(h, k, f)?;
        let d3 = z.tb(g, hk, d)?;
        let a1 = z.x(t4, a)?;
        Ok(z.f(t1, e1, c, d1, e, d2)?
            * z.f(a, bb, c, d2, e1, f1)?
            * z.fa(t2, t1, d2)?.conj()
            * z.fa(t3, t4, d2)?
            * z.f(t4, a, f1, d3, a1, d2)?.conj()
            * z.r(t4, a, a1)?.conj()
            * z.f(a, t4, f1, d3, a1, f)?
            * xv(g, h, k))
    })?;

    th.fill_r(|key| {
        let [(a, g), (bb, h), (c, _)] = key.map(split);
        let q = z.q(g, h)?;
        let a1 = z.qb(g, h, a)?;
        let c1 = z.tb(h, z.cj(h, g), c)?;
        let c2 = z.tb(g, h, c)?;
        Ok(z.r(a1, bb, c1)? * z.fa(z.t(g, h), q, c1)? * z.f(q, a1, bb, c2, a, c1)?.conj())
    })?;

    th.fill_u(|key| {
        let k = key[0];
        let [(a, g), (bb, h), (c, _)] = [key[1], key[2], key[3]].map(split);
        let (gh, gk, hk) = (z.m(g, h), z.m(g, k), z.m(h, k));
        let (kgk, khk) = (z.cj(k, g), z.cj(k, h));
        let (qgk, qhk, qghk) = (z.q(g, k)?, z.q(h, k)?, z.q(gh, k)?);
        let a1 = z.qb(g, k, a)?;
        let b1 = z.qb(h, k, bb)?;
        let c2 = z.tb(g, h, c)?;
        let c4 = z.tb(g, h, z.qb(h, k, c)?)?;
        let c3 = z.qb(g, k, c4)?;
        let qa = z.x(qhk, a)?;
        let num = z.fa(z.x(z.t(gk, khk), z.t(g, k))?, qgk, c3)?
            * z.fa(z.x(z.t(h, k), z.t(g, hk))?, qhk, c4)?
            * z.fa(z.t(gh, k), z.t(g, h), c2)?
            * z.fa(z.t(g, hk), z.t(h, k), qhk)?;
        let den = z.fa(z.t(k, z.cj(k, gh)), z.t(kgk, khk), c3)?
            * z.fa(z.t(gh, k), qghk, z.qb(gh, k, c)?)?
            * z.fa(z.t(gk, khk), z.t(g, k), qgk)?;
        Ok(z.rb(qhk, a)?.conj()
            * z.f(qgk, a1, b1, c4, a, c3)?.conj()
            * z.f(qhk, a, b1, c2, qa, c4)?.conj()
            * z.f(a, qhk, b1, c2, qa, bb)?
            * num
            / den
            * xv(g, k, khk)
            / (xv(g, h, k) * xv(k, kgk, khk)))
    })?;

    th.fill_eta(|key| {
        let (xc, k) = split(key[0]);
        let (g, h) = (key[1], key[2]);
        let gh = z.m(g, h);
        let kg = z.m(k, g);
        let mm = z.cj(g, k);
        let mh = z.m(mm, h);
        let hmh = z.cj(h, mm);
        let tgh = z.t(g, h);
        let (qkg, qkgh, qmh) = (z.q(k, g)?, z.q(k, gh)?, z.q(mm, h)?);
        let x1 = z.qb(k, gh, xc)?;
        let x2 = z.qb(k, g, xc)?;
        let num = z.fa(z.t(kg, h), z.t(k, g), qkg)?
            * z.fa(z.t(g, mh), z.t(mm, h), qmh)?
            * z.fa(z.t(gh, hmh), tgh, x1)?
            * z.fa(z.t(k, gh), qkgh, z.x(tgh, x1)?)?;
        let den = z.fa(z.t(k, gh), tgh, xc)?
            * z.fa(z.x(z.t(kg, h), z.t(k, g))?, qkg, x2)?
            * z.fa(z.x(z.t(g, mh), z.t(mm, h))?, qmh, x1)?
            * z.fa(qkgh, x1, tgh)?;
        Ok(z.rb(tgh, xc)? * z.rb(x1, tgh)? * num / den * xv(g, mm, h) / (xv(g, h, hmh) * xv(k, g, h)))
    })?;

    let obstruction = PhaseCochain::try_from_fn(group.clone(), U1, 4, |a| {
        let [g, h, k, l] = [a[0], a[1], a[2], a[3]];
        let (gh, hk, kl) = (z.m(g, h), z.m(h, k), z.m(k, l));
        let (ghk, hkl) = (z.m(gh, k), z.m(hk, l));
        Ok(z.rb(z.t(k, l), z.t(g, h))?
            * z.fa(z.t(gh, kl), z.t(g, h), z.t(k, l))?
            * z.fa(z.t(g, hkl), z.t(hk, l), z.t(h, k))?
            * z.fa(z.t(ghk, l), z.t(gh, k), z.t(g, h))?
            / (z.fa(z.t(gh, kl), z.t(k, l), z.t(g, h))?
                * z.fa(z.t(g, hkl), z.t(h, kl), z.t(k, l))?
                * z.fa(z.t(ghk, l), z.t(g, hk), z.t(h, k))?))
    })?;
    Ok(ClosedForms { theory: th, obstruction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{fixtures, trivial_extension};
    use crate::groups::cohomology::module_cocycles;
    use crate::phase::from_turns_f64;
    use crate::torsor::{apply_torsor, relative_obstruction, TorsorInput};

    fn some_x(g: Arc<FiniteGroup>) -> PhaseCochain {
        let n = g.order();
        PhaseCochain::from_fn(g, U1, 3, |a| {
            if a.contains(&0) {
                C64::new(1.0, 0.0)
            } else {
                from_turns_f64(((a[0] * n + a[1]) * n + a[2]) as f64 * 0.137)
            }
        })
        .unwrap()
    }

    fn compare(c0: &GxTheory, grp: &str) -> usize {
        let g = Arc::new(FiniteGroup::parse(grp).unwrap());
        let ext = trivial_extension(c0, g.clone()).unwrap();
        let a = ext.abelian_subgroup().unwrap();
        let n0 = c0.num_charges();
        let x = some_x(g.clone());
        let mut seen = 0;
        for t in module_cocycles(g.clone(), a.module().clone(), 2, 4096).unwrap() {
            let tc = |p: usize, q: usize| a.charge(*t.get(&[p, q])) % n0;
            let closed = trivial_action_closed_forms(c0, g.clone(), tc, &x).unwrap();
            let general = apply_torsor(&ext, &TorsorInput::with_x(t.clone(), x.clone())).unwrap();
            let d = closed.theory.table_distance(&general).unwrap().max();
            assert!(d < 1e-10, "{} over {grp}: distance {d}", c0.name());
            let o = relative_obstruction(&ext, &t).unwrap();
            assert!(closed.obstruction.distance(&o) < 1e-10);
            seen += 1;
        }
        seen
    }

    #[test]
    fn matches_general_torsor_over_z2() {
        assert_eq!(compare(&fixtures::toric_code(), "Z2"), 4);
        assert_eq!(compare(&fixtures::semion(), "Z2"), 2);
    }

    #[test]
    fn matches_general_torsor_over_larger_groups() {
        assert!(compare(&fixtures::toric_code(), "Z2xZ2") > 4);
        assert!(compare(&fixtures::z_n(3, 2).unwrap(), "Z3") >= 3);
        assert!(compare(&fixtures::semion(), "S3") >= 2);
    }

    #[test]
    fn rejects_graded_base() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let ext = trivial_extension(&fixtures::semion(), g.clone()).unwrap();
        let x = PhaseCochain::identity(g.clone(), U1, 3);
        assert!(trivial_action_closed_forms(&ext, g, |_, _| 0, &x).is_err());
    }
}
