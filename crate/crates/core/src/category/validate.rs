//! Structural axioms of a theory.

use std::fmt;

use super::GxTheory;
use crate::phase::{C64, DEFAULT_TOL, ONE};

/// One failed axiom.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

impl GxTheory {
    /// Every violated axiom; empty when the theory is structurally valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |rule: &'static str, detail: String| out.push(Violation { rule, detail });
        let g = self.group().clone();
        let e = g.identity();
        let n = self.num_charges();
        let vac = self.vacuum();

        if self.grade(vac) != e {
            push("vacuum", "vacuum is not identity-graded".into());
        }
        for a in 0..n {
            for b in 0..n {
                for &c in self.products(a, b) {
                    if self.grade(c) != g.mul(self.grade(a), self.grade(b)) {
                        push("grading", format!("N({a},{b},{c}) = 1 across grades"));
                    }
                }
                let with_vac = self.n(a, b, vac);
                if with_vac != (b == self.dual(a)) {
                    push("dual", format!("N({a},{b},I) disagrees with the dual map"));
                }
            }
            if self.products(vac, a) != [a] || self.products(a, vac) != [a] {
                push("unit", format!("vacuum does not act as the unit on {a}"));
            }
            if self.dual(self.dual(a)) != a {
                push("dual", format!("dual is not an involution at {a}"));
            }
        }

        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let lhs = self.products(a, b).iter().filter(|&&x| self.n(x, c, d)).count();
                        let rhs = self.products(b, c).iter().filter(|&&x| self.n(a, x, d)).count();
                        if lhs != rhs {
                            push("associativity", format!("({a},{b},{c}) -> {d}: {lhs} vs {rhs}"));
                        }
                    }
                }
            }
        }

        for x in g.elements() {
            let mut seen = vec![false; n];
            for a in 0..n {
                seen[self.act(x, a)] = true;
                if self.grade(self.act(x, a)) != g.conj(x, self.grade(a)) {
                    push("action", format!("^{x}{a} has the wrong grade"));
                }
            }
            if seen.iter().any(|s| !s) {
                push("action", format!("ρ_{x} is not a permutation"));
            }
            if self.act(x, vac) != vac {
                push("action", format!("ρ_{x} moves the vacuum"));
            }
            for y in g.elements() {
                if (0..n).any(|a| self.act(x, self.act(y, a)) != self.act(g.mul(x, y), a)) {
                    push("action", format!("ρ_{x} ρ_{y} != ρ_{}", g.mul(x, y)));
                }
            }
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if self.n(a, b, c) != self.n(self.act(x, a), self.act(x, b), self.act(x, c)) {
                            push("action", format!("ρ_{x} does not preserve N({a},{b},{c})"));
                        }
                    }
                }
            }
        }
        if (0..n).any(|a| self.act(e, a) != a) {
            push("action", "ρ of the identity is not trivial".into());
        }
        for a in 0..n {
            for b in 0..n {
                let ga = self.grade(a);
                if self.products(a, b) != self.products(self.act(ga, b), a) {
                    push("crossing", format!("{a}⊗{b} != ^{ga}{b}⊗{a}"));
                }
            }
        }

        let off = |z: C64| (z - ONE).norm() > DEFAULT_TOL;
        for (&[k, a, b, c], &v) in self.u_entries() {
            if (k == e || a == vac || b == vac) && off(v) {
                push("normalization", format!("U_{k}({a},{b};{c}) = {v} != 1"));
            }
        }
        for (&[x, p, q], &v) in self.eta_entries() {
            if (x == vac || p == e || q == e) && off(v) {
                push("normalization", format!("η_{x}({p},{q}) = {v} != 1"));
            }
        }
        for (&[a, b, c, d, x, y], &v) in self.f_entries() {
            if (a == vac || b == vac || c == vac) && off(v) {
                push("normalization", format!("F({a},{b},{c},{d};{x},{y}) = {v} != 1"));
            }
        }
        for (&[a, b, c], &v) in self.r_entries() {
            if (a == vac || b == vac) && off(v) {
                push("normalization", format!("R({a},{b};{c}) = {v} != 1"));
            }
        }

        // Unitarity of each F^{abc}_d as a matrix over (e, f).
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut ds: Vec<usize> = self
                        .products(a, b)
                        .iter()
                        .flat_map(|&x| self.products(x, c).iter().copied())
                        .collect();
                    ds.sort_unstable();
                    ds.dedup();
                    for d in ds {
                        let es: Vec<usize> =
                            self.products(a, b).iter().copied().filter(|&x| self.n(x, c, d)).collect();
                        let fs: Vec<usize> =
                            self.products(b, c).iter().copied().filter(|&x| self.n(a, x, d)).collect();
                        if es.len() != fs.len() {
                            push("unitarity", format!("F^{{{a}{b}{c}}}_{d} is not square"));
                            continue;
                        }
                        for &e1 in &es {
                            for &e2 in &es {
                                let s: C64 = fs
                                    .iter()
                                    .map(|&f| {
                                        self.f(a, b, c, d, e1, f).unwrap_or_default()
                                            * self.f(a, b, c, d, e2, f).unwrap_or_default().conj()
                                    })
                                    .sum();
                                let want = if e1 == e2 { ONE } else { C64::new(0.0, 0.0) };
                                if (s - want).norm() > DEFAULT_TOL {
                                    push("unitarity", format!("F^{{{a}{b}{c}}}_{d} is not unitary"));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}
