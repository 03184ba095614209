use std::fmt;

use crate::{Error, Result};

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    mult: Vec<Vec<usize>>,
    identity: usize,
    inv: Vec<usize>,
    cyclic_factors: Option<Vec<usize>>,
}

impl FiniteGroup {
    /// Build from a multiplication table, checking the group axioms.
    pub fn from_table(mult: Vec<Vec<usize>>) -> Result<Self> {
        let n = mult.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty group table".into()));
        }
        if mult.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidInput("group table is not a square table of element indices".into()));
        }
        for g in 0..n {
            for h in 0..n {
                for k in 0..n {
                    if mult[mult[g][h]][k] != mult[g][mult[h][k]] {
                        return Err(Error::InvalidInput(format!(
                            "group table is not associative at ({g},{h},{k})"
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mult[e][g] == g && mult[g][e] == g))
            .ok_or_else(|| Error::InvalidInput("group table has no identity".into()))?;
        let mut inv = Vec::with_capacity(n);
        for g in 0..n {
            let gi = (0..n)
                .find(|&h| mult[g][h] == identity && mult[h][g] == identity)
                .ok_or_else(|| Error::InvalidInput(format!("element {g} has no inverse")))?;
            inv.push(gi);
        }
        Ok(Self {
            name: format!("G{n}"),
            mult,
            identity,
            inv,
            cyclic_factors: None,
        })
    }

    /// `Z_n`.
    pub fn cyclic(n: usize) -> Self {
        Self::product_of_cyclic(&[n])
    }

    /// `Z_{n₁} × … × Z_{n_r}`; element index is mixed radix with the first
    /// factor least significant.
    pub fn product_of_cyclic(factors: &[usize]) -> Self {
        assert!(factors.iter().all(|&m| m > 0), "cyclic factors must be positive");
        let order: usize = factors.iter().product();
        let digits = |mut x: usize| {
            factors
                .iter()
                .map(|&m| {
                    let d = x % m;
                    x /= m;
                    d
                })
                .collect::<Vec<_>>()
        };
        let compose = |d: &[usize]| {
            let mut x = 0;
            for (i, &m) in factors.iter().enumerate().rev() {
                x = x * m + d[i];
            }
            x
        };
        let mut mult = vec![vec![0; order]; order];
        let mut inv = vec![0; order];
        for g in 0..order {
            let dg = digits(g);
            for h in 0..order {
                let dh = digits(h);
                let s: Vec<usize> = (0..factors.len()).map(|i| (dg[i] + dh[i]) % factors[i]).collect();
                mult[g][h] = compose(&s);
            }
            let ng: Vec<usize> = (0..factors.len()).map(|i| (factors[i] - dg[i]) % factors[i]).collect();
            inv[g] = compose(&ng);
        }
        let name = if factors.iter().all(|&m| m == 1) || factors.is_empty() {
            "1".to_string()
        } else {
            factors
                .iter()
                .filter(|&&m| m > 1)
                .map(|m| format!("Z{m}"))
                .collect::<Vec<_>>()
                .join("x")
        };
        Self {
            name,
            mult,
            identity: 0,
            inv,
            cyclic_factors: Some(factors.to_vec()),
        }
    }

    /// The symmetric group on `n` letters; permutations in lexicographic
    /// order, so the identity is element 0.
    pub fn symmetric(n: usize) -> Self {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for rest in perms(n - 1) {
                    let mut p = vec![first];
                    p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
                    out.push(p);
                }
            }
            out
        }
        let ps = perms(n);
        let index = |p: &Vec<usize>| ps.iter().position(|q| q == p).expect("closed under composition");
        // (gh)(i) = g(h(i))
        let mult = ps
            .iter()
            .map(|g| ps.iter().map(|h| index(&h.iter().map(|&i| g[i]).collect())).collect())
            .collect();
        let mut grp = Self::from_table(mult).expect("permutation table is a group");
        grp.name = format!("S{n}");
        grp
    }

    /// Parse `"Z2"`, `"Z2xZ2"`, `"Z3×Z4"`, `"S3"` or `"1"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if s == "1" || s.eq_ignore_ascii_case("trivial") {
            return Ok(Self::product_of_cyclic(&[1]));
        }
        if let Some(n) = s.strip_prefix('S').and_then(|d| d.parse::<usize>().ok()) {
            if (1..=5).contains(&n) {
                return Ok(Self::symmetric(n));
            }
        }
        let mut factors = Vec::new();
        for part in s.split(['x', 'X', '×']) {
            let part = part.trim();
            let m = part
                .strip_prefix('Z')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&m| m > 0)
                .ok_or_else(|| Error::InvalidInput(format!("cannot parse group {spec:?}")))?;
            factors.push(m);
        }
        Ok(Self::product_of_cyclic(&factors))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult[g][h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    /// `g h g⁻¹`.
    #[inline]
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn cyclic_factors(&self) -> Option<&[usize]> {
        self.cyclic_factors.as_deref()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|g| (0..n).all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    /// Exponent: least common multiple of the element orders.
    pub fn exponent(&self) -> usize {
        let mut e = 1;
        for g in self.elements() {
            e = crate::phase::lcm(e as u64, self.element_order(g) as u64) as usize;
        }
        e
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// All tuples in `{0..order}^n`, lexicographic with the first entry most
/// significant.
pub fn tuples(order: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = order.pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = idx % order;
            idx /= order;
        }
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_products_are_groups() {
        for f in [vec![2], vec![3], vec![2, 2], vec![2, 3], vec![4]] {
            let g = FiniteGroup::product_of_cyclic(&f);
            let again = FiniteGroup::from_table(g.table().to_vec()).unwrap();
            assert_eq!(again.identity(), 0);
            for x in g.elements() {
                assert_eq!(g.mul(x, g.inv(x)), 0);
            }
        }
    }

    #[test]
    fn parse_and_name() {
        assert_eq!(FiniteGroup::parse("Z2xZ2").unwrap().order(), 4);
        assert_eq!(FiniteGroup::parse("Z3").unwrap().name(), "Z3");
        assert_eq!(FiniteGroup::parse("S3").unwrap().order(), 6);
        assert!(!FiniteGroup::parse("S3").unwrap().is_abelian());
        assert!(FiniteGroup::parse("Q8").is_err());
    }

    #[test]
    fn rejects_non_associative_table() {
        let t = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 0, 0]];
        assert!(FiniteGroup::from_table(t).is_err());
    }

    #[test]
    fn s3_from_table() {
        // Permutations of three points composed left to right.
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([b[a[0]], b[a[1]], b[a[2]]])).collect())
            .collect();
        let g = FiniteGroup::from_table(table).unwrap();
        assert!(!g.is_abelian());
        assert_eq!(g.exponent(), 6);
    }
}
