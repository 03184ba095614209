//! Builders for canonical theories: SPT phases, gluing, trivial
//! extensions and fixtures.

pub mod fixtures;
mod trivial_action;

use std::sync::Arc;

pub use trivial_action::{trivial_action_closed_forms, ClosedForms};

use crate::category::TheoryBuilder;
use crate::groups::{FiniteGroup, PhaseCochain};
use crate::phase::DEFAULT_TOL;
use crate::{Error, GxTheory, Result};

fn require_3cocycle(alpha: &PhaseCochain) -> Result<()> {
    if alpha.degree() != 3 {
        return Err(Error::InvalidInput(format!("expected a 3-cochain, got degree {}", alpha.degree())));
    }
    let residual = alpha.coboundary().distance_from_identity();
    if residual > DEFAULT_TOL {
        return Err(Error::NotACocycle {
            what: "alpha".into(),
            residual,
        });
    }
    Ok(())
}

/// The SPT phase with 3-cocycle `α`: one charge `I_g` per grade (index `g`).
pub fn build_spt(alpha: &PhaseCochain) -> Result<GxTheory> {
    require_3cocycle(alpha)?;
    Ok(build_spt_unchecked(alpha))
}

/// [`build_spt`] without the cocycle check. A non-closed `α` yields data
/// that fail the pentagon.
pub fn build_spt_unchecked(alpha: &PhaseCochain) -> GxTheory {
    let grp = alpha.group().clone();
    let a = |g: usize, h: usize, k: usize| *alpha.get(&[g, h, k]);
    let mut b = TheoryBuilder::new("SPT", grp.clone());
    for g in grp.elements() {
        let name = if g == grp.identity() { "I".to_string() } else { format!("I{g}") };
        b.charge(name, g);
    }
    b.vacuum(grp.identity());
    for g in grp.elements() {
        for h in grp.elements() {
            b.fuse(g, h, grp.mul(g, h));
        }
    }
    let action = grp
        .elements()
        .map(|k| grp.elements().map(|g| grp.conj(k, g)).collect())
        .collect();
    b.action(action);
    let mut t = b.build().expect("group data are well formed");
    t.fill_f(|k| Ok(a(k[0], k[1], k[2]))).expect("closed form");
    t.fill_u(|key| {
        let [k, g, h, _] = *key;
        let kb = grp.inv(k);
        let kgk = grp.mul(grp.mul(kb, g), k);
        let khk = grp.mul(grp.mul(kb, h), k);
        Ok(a(g, k, khk) / (a(g, h, k) * a(k, kgk, khk)))
    })
    .expect("closed form");
    t.fill_eta(|key| {
        let [k, g, h] = *key;
        let gb = grp.inv(g);
        let m = grp.mul(grp.mul(gb, k), g);
        let hb_m_h = grp.mul(grp.mul(grp.inv(h), m), h);
        Ok(a(g, m, h) / (a(g, h, hb_m_h) * a(k, g, h)))
    })
    .expect("closed form");
    t
}

/// Multiply the data of `theory` by those of the SPT phase with cocycle `α`
/// at matching grades.
pub fn glue_spt(theory: &GxTheory, alpha: &PhaseCochain) -> Result<GxTheory> {
    require_3cocycle(alpha)?;
    if **alpha.group() != **theory.group() {
        return Err(Error::InvalidInput("alpha lives on a different group".into()));
    }
    let spt = build_spt_unchecked(alpha);
    let gr = |x: usize| theory.grade(x);
    let mut out = theory.clone();
    out.fill_f(|k| Ok(theory.f(k[0], k[1], k[2], k[3], k[4], k[5])? * spt.f_abelian(gr(k[0]), gr(k[1]), gr(k[2]))?))?;
    out.fill_u(|k| {
        let (g, h) = (gr(k[1]), gr(k[2]));
        Ok(theory.u(k[0], k[1], k[2], k[3])? * spt.u(k[0], g, h, spt.fuse1(g, h)?)?)
    })?;
    out.fill_eta(|k| Ok(theory.eta(k[0], k[1], k[2])? * spt.eta(gr(k[0]), k[1], k[2])?))?;
    Ok(out)
}

/// Index of charge `(a, g)` in a trivial extension of a theory with `n0`
/// charges.
pub fn extension_index(n0: usize, a: usize, g: usize) -> usize {
    g * n0 + a
}

/// The extension of a theory over the trivial group by `G` with every
/// grade a copy of it: charges `(a, g)`, fusion `(a,g)⊗(b,h) = (a⊗b, gh)`,
/// action `^k(a,g) = (a, kgk̄)`, `F` and `R` from the base, `U = η = 1`.
pub fn trivial_extension(c0: &GxTheory, group: Arc<FiniteGroup>) -> Result<GxTheory> {
    if c0.group().order() != 1 {
        return Err(Error::Precondition("base theory must be over the trivial group".into()));
    }
    let n0 = c0.num_charges();
    let idx = |a, g| extension_index(n0, a, g);
    let mut b = TheoryBuilder::new(format!("{} x {}", c0.name(), group.name()), group.clone());
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
                for c in c0.charges() {
                    for &e in c0.products(a, c) {
                        b.fuse(idx(a, g), idx(c, h), idx(e, group.mul(g, h)));
                    }
                }
            }
        }
    }
    let action = group
        .elements()
        .map(|k| {
            group
                .elements()
                .flat_map(|g| (0..n0).map(move |a| (a, g)))
                .map(|(a, g)| idx(a, group.conj(k, g)))
                .collect()
        })
        .collect();
    b.action(action);
    let mut t = b.build()?;
    let base = |x: usize| x % n0;
    t.fill_f(|k| c0.f(base(k[0]), base(k[1]), base(k[2]), base(k[3]), base(k[4]), base(k[5])))?;
    t.fill_r(|k| c0.r(base(k[0]), base(k[1]), base(k[2])))?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::consistency::{check_all, CheckOptions};
    use crate::groups::U1;
    use crate::phase::{C64, ONE};

    fn z2() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(2))
    }

    fn alpha_z2() -> PhaseCochain {
        PhaseCochain::from_fn(z2(), U1, 3, |t| if t == [1, 1, 1] { -ONE } else { ONE }).unwrap()
    }

    fn assert_consistent(t: &GxTheory) {
        for rep in check_all(t, &CheckOptions::default()) {
            assert!(rep.passed(), "{} fails {}: {:?}", t.name(), rep.equation.name(), rep.failures.first());
        }
    }

    #[test]
    fn fixtures_are_consistent() {
        for name in NAMES {
            assert_consistent(&by_name(name).unwrap());
        }
        assert_consistent(&z_n(3, 2).unwrap());
    }

    #[test]
    fn semion_values() {
        let s = semion();
        assert!((s.f(1, 1, 1, 1, 0, 0).unwrap() + ONE).norm() < 1e-12);
        assert!((s.r(1, 1, 0).unwrap() - C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn odd_z_n_with_odd_p_is_inconsistent() {
        let t = z_n(3, 1).unwrap();
        let reps = check_all(&t, &CheckOptions::default());
        assert!(!crate::consistency::all_passed(&reps));
    }

    #[test]
    fn spt_z2_values_and_consistency() {
        let t = build_spt(&alpha_z2()).unwrap();
        assert!((t.f(1, 1, 1, 1, 0, 0).unwrap() + ONE).norm() < 1e-12);
        assert!((t.u(1, 1, 1, 0).unwrap() + ONE).norm() < 1e-12);
        assert_consistent(&t);
    }

    #[test]
    fn spt_over_every_h3_class_is_consistent() {
        use crate::groups::cohomology::U1Cohomology;
        for (grp, n) in [("Z3", 3), ("Z2xZ2", 2), ("S3", 6)] {
            let g = Arc::new(FiniteGroup::parse(grp).unwrap());
            for alpha in U1Cohomology::new(g, 3, n).unwrap().representatives() {
                assert_consistent(&build_spt(&alpha).unwrap());
            }
        }
    }

    #[test]
    fn trivial_spt_is_all_ones() {
        let t = build_spt(&PhaseCochain::identity(z2(), U1, 3)).unwrap();
        assert!(t.u_entries().values().chain(t.eta_entries().values()).all(|v| (v - ONE).norm() < 1e-12));
    }

    #[test]
    fn spt_rejects_non_cocycle() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let bad = PhaseCochain::from_fn(g, U1, 3, |t| if t == [1, 1, 1] { -ONE } else { ONE }).unwrap();
        assert!(matches!(build_spt(&bad), Err(Error::NotACocycle { .. })));
    }

    #[test]
    fn trivial_extension_of_toric_code() {
        let t = trivial_extension(&toric_code(), z2()).unwrap();
        assert_eq!(t.num_charges(), 8);
        assert_consistent(&t);
    }

    #[test]
    fn trivial_extension_over_s3_is_consistent() {
        let s3 = Arc::new(FiniteGroup::parse("S3").unwrap());
        assert_consistent(&trivial_extension(&semion(), s3).unwrap());
    }

    #[test]
    fn glue_twice_equals_glue_product() {
        let t = trivial_extension(&semion(), z2()).unwrap();
        let a = alpha_z2();
        let twice = glue_spt(&glue_spt(&t, &a).unwrap(), &a).unwrap();
        let once = glue_spt(&t, &a.mul(&a)).unwrap();
        assert!(twice.table_distance(&once).unwrap().max() < 1e-12);
        assert!(twice.table_distance(&t).unwrap().max() < 1e-12);
        assert_consistent(&glue_spt(&t, &a).unwrap());
    }
}
