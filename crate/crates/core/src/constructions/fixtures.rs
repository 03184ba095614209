//! Closed-form fixture theories over the trivial group.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::groups::FiniteGroup;
use crate::phase::{from_turns_f64, C64};
use crate::{GxTheory, Result};
use crate::category::TheoryBuilder;

fn trivial_group() -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::product_of_cyclic(&[1]))
}

/// An abelian theory over the trivial group from closed-form symbols.
///
/// `fuse` must define an abelian group law on `0..names.len()` with
/// identity `0`. `f(a,b,c)` and `r(a,b)` give the only entries.
pub fn abelian_theory(
    name: &str,
    names: &[&str],
    fuse: impl Fn(usize, usize) -> usize,
    f: impl Fn(usize, usize, usize) -> C64,
    r: impl Fn(usize, usize) -> C64,
) -> Result<GxTheory> {
    let mut b = TheoryBuilder::new(name, trivial_group());
    for n in names {
        b.charge(*n, 0);
    }
    b.vacuum(0);
    let n = names.len();
    for a in 0..n {
        for c in 0..n {
            b.fuse(a, c, fuse(a, c));
        }
    }
    let mut t = b.build()?;
    t.fill_f(|k| Ok(f(k[0], k[1], k[2])))?;
    t.fill_r(|k| Ok(r(k[0], k[1])))?;
    Ok(t)
}

/// `Z_N` anyons with `F^{abc} = exp(iπ p a(b+c-[b+c])/N)` and
/// `R^{ab} = exp(iπ p ab/N)`. For odd `N` the data are consistent only for
/// even `p`.
pub fn z_n(n: usize, p: i64) -> Result<GxTheory> {
    let names: Vec<String> = (0..n).map(|a| a.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let nn = n as i64;
    abelian_theory(
        &format!("Z{n}^({p})"),
        &refs,
        |a, b| (a + b) % n,
        move |a, b, c| {
            let (a, b, c) = (a as i64, b as i64, c as i64);
            let carry = b + c - (b + c) % nn;
            from_turns_f64((p * a * carry) as f64 / (2 * nn) as f64)
        },
        move |a, b| from_turns_f64((p * a as i64 * b as i64) as f64 / (2 * nn) as f64),
    )
}

/// Semion: `F^{sss} = -1`, `R^{ss} = i`.
pub fn semion() -> GxTheory {
    let mut t = z_n(2, 1).expect("fixture");
    rename(&mut t, "semion", &["1", "s"]);
    t
}

/// Anti-semion: `F^{s̄s̄s̄} = -1`, `R^{s̄s̄} = -i`.
pub fn anti_semion() -> GxTheory {
    let mut t = z_n(2, -1).expect("fixture");
    rename(&mut t, "anti-semion", &["1", "sb"]);
    t
}

/// Semion ⊠ anti-semion.
pub fn double_semion() -> GxTheory {
    let mut t = deligne_product(&semion(), &anti_semion()).expect("fixture");
    t.set_name("double semion");
    t
}

/// Toric code: labels `1, e, m, f` with index `e_bit + 2 m_bit`, `F ≡ 1`,
/// `R^{ab} = (-1)^{a_e b_m}`.
pub fn toric_code() -> GxTheory {
    abelian_theory(
        "toric code",
        &["1", "e", "m", "f"],
        |a, b| a ^ b,
        |_, _, _| C64::new(1.0, 0.0),
        |a, b| {
            if (a & 1) * ((b >> 1) & 1) == 1 {
                C64::new(-1.0, 0.0)
            } else {
                C64::new(1.0, 0.0)
            }
        },
    )
    .expect("fixture")
}

/// Fibonacci anyons `{1, τ}`.
pub fn fibonacci() -> GxTheory {
    let mut b = TheoryBuilder::new("fibonacci", trivial_group());
    let one = b.charge("1", 0);
    let tau = b.charge("tau", 0);
    b.vacuum(one);
    b.fuse(one, one, one)
        .fuse(one, tau, tau)
        .fuse(tau, one, tau)
        .fuse(tau, tau, one)
        .fuse(tau, tau, tau);
    let mut t = b.build().expect("fixture");
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let m = [[1.0 / phi, phi.powf(-0.5)], [phi.powf(-0.5), -1.0 / phi]];
    t.fill_f(|k| {
        Ok(if k[..4] == [tau; 4] {
            C64::new(m[k[4]][k[5]], 0.0)
        } else {
            C64::new(1.0, 0.0)
        })
    })
    .expect("fixture");
    t.fill_r(|k| {
        Ok(match (k[0], k[1], k[2]) {
            (a, b, c) if a == tau && b == tau && c == one => C64::from_polar(1.0, -4.0 * PI / 5.0),
            (a, b, c) if a == tau && b == tau && c == tau => C64::from_polar(1.0, 3.0 * PI / 5.0),
            _ => C64::new(1.0, 0.0),
        })
    })
    .expect("fixture");
    t
}

/// Deligne product of two theories over the trivial group. Charge `(a,b)`
/// has index `a·|B| + b`; symbols multiply.
pub fn deligne_product(x: &GxTheory, y: &GxTheory) -> Result<GxTheory> {
    if x.group().order() != 1 || y.group().order() != 1 {
        return Err(crate::Error::Precondition(
            "deligne product needs theories over the trivial group".into(),
        ));
    }
    let ny = y.num_charges();
    let pair = |a: usize| (a / ny, a % ny);
    let mut b = TheoryBuilder::new(format!("{} x {}", x.name(), y.name()), trivial_group());
    for a in x.charges() {
        for c in y.charges() {
            b.charge(format!("{}{}", x.charge_name(a), y.charge_name(c)), 0);
        }
    }
    b.vacuum(x.vacuum() * ny + y.vacuum());
    for a in x.charges() {
        for c in x.charges() {
            for &e in x.products(a, c) {
                for a2 in y.charges() {
                    for c2 in y.charges() {
                        for &e2 in y.products(a2, c2) {
                            b.fuse(a * ny + a2, c * ny + c2, e * ny + e2);
                        }
                    }
                }
            }
        }
    }
    let mut t = b.build()?;
    t.fill_f(|k| {
        let p: Vec<(usize, usize)> = k.iter().map(|&a| pair(a)).collect();
        Ok(x.f(p[0].0, p[1].0, p[2].0, p[3].0, p[4].0, p[5].0)?
            * y.f(p[0].1, p[1].1, p[2].1, p[3].1, p[4].1, p[5].1)?)
    })?;
    t.fill_r(|k| {
        let p: Vec<(usize, usize)> = k.iter().map(|&a| pair(a)).collect();
        Ok(x.r(p[0].0, p[1].0, p[2].0)? * y.r(p[0].1, p[1].1, p[2].1)?)
    })?;
    Ok(t)
}

fn rename(t: &mut GxTheory, name: &str, labels: &[&str]) {
    t.set_name(name);
    for (a, l) in labels.iter().enumerate() {
        t.set_charge_name(a, *l);
    }
}

/// Every named fixture.
pub fn by_name(name: &str) -> Option<GxTheory> {
    Some(match name {
        "toric-code" => toric_code(),
        "semion" => semion(),
        "anti-semion" => anti_semion(),
        "double-semion" => double_semion(),
        "z4" => z_n(4, 1).ok()?,
        "fibonacci" => fibonacci(),
        _ => return None,
    })
}

pub const NAMES: &[&str] = &["toric-code", "semion", "anti-semion", "double-semion", "z4", "fibonacci"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::ONE;

    fn abelian_fixtures() -> Vec<GxTheory> {
        vec![toric_code(), semion(), anti_semion(), double_semion(), z_n(4, 1).unwrap(), z_n(3, 2).unwrap()]
    }

    /// Direct evaluation of the abelian pentagon, independent of the
    /// consistency module.
    #[test]
    fn abelian_pentagon_by_hand() {
        for th in abelian_fixtures() {
            let n = th.num_charges();
            let fu = |a, b| th.fuse1(a, b).unwrap();
            let f = |a, b, c| th.f(a, b, c, fu(fu(a, b), c), fu(a, b), fu(b, c)).unwrap();
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let lhs = f(fu(a, b), c, d) * f(a, b, fu(c, d));
                            let rhs = f(a, b, c) * f(a, fu(b, c), d) * f(b, c, d);
                            assert!((lhs - rhs).norm() < 1e-12, "{}: pentagon at {a},{b},{c},{d}", th.name());
                        }
                    }
                }
            }
        }
    }

    /// Spins `θ(a) = R(a,a)` (gauge invariant for abelian theories) and the ribbon relation `M(a,b) = θ(ab)/(θ(a)θ(b))`.
    #[test]
    fn spins_and_ribbon_relation() {
        let i = C64::new(0.0, 1.0);
        let expected: [(&str, GxTheory, Vec<C64>); 3] = [
            ("toric code", toric_code(), vec![ONE, ONE, ONE, -ONE]),
            ("semion", semion(), vec![ONE, i]),
            ("double semion", double_semion(), vec![ONE, i, -i, ONE]),
        ];
        for (name, th, spins) in expected {
            let n = th.num_charges();
            let fu = |a, b| th.fuse1(a, b).unwrap();
            let theta = |a| th.r(a, a, fu(a, a)).unwrap();
            let turns = |z: &C64| ((z.arg() / (2.0 * PI) * 1e6).round() as i64).rem_euclid(1_000_000);
            let mut got: Vec<C64> = (0..n).map(theta).collect();
            got.sort_by_key(turns);
            let mut want = spins.clone();
            want.sort_by_key(turns);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).norm() < 1e-12, "{name}: spins {got:?}, expected {want:?}");
            }
            for a in 0..n {
                for b in 0..n {
                    let m = th.r(a, b, fu(a, b)).unwrap() * th.r(b, a, fu(a, b)).unwrap();
                    let ribbon = theta(fu(a, b)) / (theta(a) * theta(b));
                    assert!((m - ribbon).norm() < 1e-12, "{name}: ribbon at {a},{b}");
                }
            }
        }
    }
}
