//! U(1) phases: exact roots of unity, snapping, and the JSON value format.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::{Error, Result};

pub type C64 = num_complex::Complex64;

/// Default tolerance for phase comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest distance from `μ_N` accepted by [`snap`].
pub const SNAP_TOL: f64 = 1e-6;

pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    a / gcd(a, b) * b
}

/// `exp(2πi k/n)`, exact for denominators 1, 2, 4 and 8 after reduction.
pub fn root_of_unity(k: i64, n: u64) -> C64 {
    assert!(n > 0, "root order must be positive");
    let k = k.rem_euclid(n as i64) as u64;
    let g = gcd(k, n);
    let (k, n) = (k / g, n / g);
    match (k, n) {
        (0, 1) => ONE,
        (1, 2) => C64::new(-1.0, 0.0),
        (1, 4) => C64::new(0.0, 1.0),
        (3, 4) => C64::new(0.0, -1.0),
        (1, 8) => C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        (3, 8) => C64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        (5, 8) => C64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        (7, 8) => C64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        _ => C64::from_polar(1.0, TAU * k as f64 / n as f64),
    }
}

/// Phase with argument `2π x` for a real number of turns.
pub fn from_turns_f64(x: f64) -> C64 {
    C64::from_polar(1.0, TAU * x)
}

/// Argument of `z` in turns, in `[0, 1)`.
pub fn turns_of(z: C64) -> f64 {
    (z.arg() / TAU).rem_euclid(1.0)
}

/// Snap `z` to `exp(2πi k/n)` and return `k ∈ [0, n)`.
pub fn snap(z: C64, n: u64) -> Result<u64> {
    let k = ((turns_of(z) * n as f64).round() as u64) % n;
    let distance = (z - root_of_unity(k as i64, n)).norm();
    if distance > SNAP_TOL {
        return Err(Error::SnapFailure {
            re: z.re,
            im: z.im,
            root_order: n,
            distance,
        });
    }
    Ok(k)
}

/// Whether two complex numbers agree within `tol`.
pub fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Inverse of a unit-modulus number, computed by conjugation.
#[inline]
pub fn inv(z: C64) -> C64 {
    z.conj()
}

/// A phase value as stored in JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseValue {
    Turns { turns: String },
    Cartesian { re: f64, im: f64 },
}

impl PhaseValue {
    pub fn to_complex(&self) -> Result<C64> {
        match self {
            PhaseValue::Cartesian { re, im } => Ok(C64::new(*re, *im)),
            PhaseValue::Turns { turns } => {
                let (p, q) = parse_fraction(turns)?;
                Ok(root_of_unity(p, q))
            }
        }
    }

    /// Turns form when `z` is bit-identical to a small-denominator root of
    /// unity, Cartesian form otherwise. Either form reloads to the same bits.
    pub fn from_complex(z: C64) -> Self {
        for q in 1..=48u64 {
            let k = ((turns_of(z) * q as f64).round() as i64).rem_euclid(q as i64);
            let w = root_of_unity(k, q);
            if w.re.to_bits() == z.re.to_bits() && w.im.to_bits() == z.im.to_bits() {
                let g = gcd(k as u64, q);
                return PhaseValue::Turns {
                    turns: format!("{}/{}", k as u64 / g, q / g),
                };
            }
        }
        PhaseValue::Cartesian { re: z.re, im: z.im }
    }
}

fn parse_fraction(s: &str) -> Result<(i64, u64)> {
    let bad = || Error::InvalidInput(format!("malformed turns value {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: i64 = p.parse().map_err(|_| bad())?;
    let q: u64 = q.parse().map_err(|_| bad())?;
    if q == 0 {
        return Err(bad());
    }
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_are_exact_on_small_denominators() {
        assert_eq!(root_of_unity(1, 4), C64::new(0.0, 1.0));
        assert_eq!(root_of_unity(2, 4), C64::new(-1.0, 0.0));
        assert_eq!(root_of_unity(-1, 2), C64::new(-1.0, 0.0));
        assert_eq!(root_of_unity(6, 3), ONE);
    }

    #[test]
    fn snap_accepts_near_roots_and_rejects_far_ones() {
        assert_eq!(snap(root_of_unity(3, 8), 8).unwrap(), 3);
        assert_eq!(snap(root_of_unity(1, 4) * from_turns_f64(1e-9), 8).unwrap(), 2);
        assert!(matches!(
            snap(from_turns_f64(0.01), 8),
            Err(Error::SnapFailure { .. })
        ));
    }

    #[test]
    fn phase_value_round_trips_bitwise() {
        for z in [
            root_of_unity(1, 8),
            root_of_unity(2, 3),
            from_turns_f64(0.123456789),
            C64::new(0.618, 0.0),
        ] {
            let back = PhaseValue::from_complex(z).to_complex().unwrap();
            assert_eq!(back.re.to_bits(), z.re.to_bits());
            assert_eq!(back.im.to_bits(), z.im.to_bits());
        }
        assert_eq!(
            PhaseValue::from_complex(root_of_unity(1, 4)),
            PhaseValue::Turns { turns: "1/4".into() }
        );
    }
}
