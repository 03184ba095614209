//! Quantum dimensions, the abelian charge group, and monodromy.

use super::GxTheory;
use crate::groups::snf::{IntMatrix, Smith};
use crate::groups::FiniteModule;
use crate::phase::C64;
use crate::{Error, Result};

/// Quantum dimensions `d_a` and the total dimension `D` of the identity
/// sector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumDimensions {
    pub dims: Vec<f64>,
    pub total: f64,
}

/// The group `A` of invertible identity-graded charges, identified with a
/// [`FiniteModule`] carrying the restricted symmetry action.
#[derive(Debug, Clone)]
pub struct AbelianGroup {
    to_charge: Vec<usize>,
    to_element: Vec<Option<usize>>,
    module: FiniteModule,
}

impl AbelianGroup {
    pub fn module(&self) -> &FiniteModule {
        &self.module
    }

    pub fn factors(&self) -> &[u64] {
        self.module.factors()
    }

    pub fn order(&self) -> usize {
        self.to_charge.len()
    }

    /// Charge of module element `m`.
    pub fn charge(&self, m: usize) -> usize {
        self.to_charge[m]
    }

    /// Module element of an abelian charge.
    pub fn element(&self, a: usize) -> Option<usize> {
        self.to_element[a]
    }

    /// Charges in module-element order.
    pub fn charges(&self) -> &[usize] {
        &self.to_charge
    }
}

impl GxTheory {
    /// `d_a = sqrt(λ_max(N_aᵀ N_a))`, the spectral radius of `N_a`.
    pub fn quantum_dimensions(&self) -> QuantumDimensions {
        let n = self.num_charges();
        let dims: Vec<f64> = self
            .charges()
            .map(|a| {
                // (N_aᵀ N_a)_{bc} = Σ_x N(a,x,b) N(a,x,c) = N_ā N_a.
                let apply = |v: &[f64]| -> Vec<f64> {
                    let mut w = vec![0.0; n];
                    for x in 0..n {
                        let s: f64 = self.products(a, x).iter().map(|&c| v[c]).sum();
                        for &b in self.products(a, x) {
                            w[b] += s;
                        }
                    }
                    w
                };
                let mut v = vec![1.0 / (n as f64).sqrt(); n];
                let mut lambda = 0.0;
                for _ in 0..10_000 {
                    let w = apply(&v);
                    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm == 0.0 {
                        return 0.0;
                    }
                    let next: f64 = v.iter().zip(&w).map(|(x, y)| x * y).sum();
                    v = w.into_iter().map(|x| x / norm).collect();
                    if (next - lambda).abs() <= 1e-15 * next.abs() {
                        lambda = next;
                        break;
                    }
                    lambda = next;
                }
                lambda.sqrt()
            })
            .collect();
        let e = self.group().identity();
        let total = self
            .charges_of_grade(e)
            .map(|a| dims[a] * dims[a])
            .sum::<f64>()
            .sqrt();
        QuantumDimensions { dims, total }
    }

    /// Whether `a` is identity-graded with `a ⊗ ā = I`.
    pub fn is_abelian(&self, a: usize) -> bool {
        self.grade(a) == self.group().identity() && self.is_invertible(a)
    }

    /// The abelian charge group with its cyclic decomposition.
    pub fn abelian_subgroup(&self) -> Result<AbelianGroup> {
        let charges: Vec<usize> = self.charges().filter(|&a| self.is_abelian(a)).collect();
        let m = charges.len();
        let pos = |a: usize| charges.iter().position(|&x| x == a);
        // Presentation: generators e_a, relations e_a + e_b - e_{ab} and e_I.
        let mut rels: Vec<Vec<i128>> = Vec::new();
        let mut v = vec![0i128; m];
        v[pos(self.vacuum()).expect("vacuum is abelian")] = 1;
        rels.push(v);
        for (i, &a) in charges.iter().enumerate() {
            for (j, &b) in charges.iter().enumerate() {
                let c = self.fuse1(a, b)?;
                let k = pos(c).ok_or_else(|| {
                    Error::InvalidInput(format!("abelian charges {a}, {b} fuse outside A"))
                })?;
                let mut v = vec![0i128; m];
                v[i] += 1;
                v[j] += 1;
                v[k] -= 1;
                rels.push(v);
            }
        }
        let smith = Smith::compute(&IntMatrix::from_columns(m, &rels))?;
        if smith.rank() != m {
            return Err(Error::InvalidInput("abelian charges do not form a finite group".into()));
        }
        let slots: Vec<usize> = (0..m).filter(|&i| smith.invariants()[i] > 1).collect();
        let factors: Vec<u64> = slots.iter().map(|&i| smith.invariants()[i] as u64).collect();
        let trivial = FiniteModule::trivial(&factors, 1);
        let mut to_element = vec![None; self.num_charges()];
        let mut to_charge = vec![usize::MAX; m];
        for (i, &a) in charges.iter().enumerate() {
            let mut y = vec![0i128; m];
            y[i] = 1;
            smith.left(&mut y)?;
            let r: Vec<i128> = slots.iter().map(|&s| y[s]).collect();
            let idx = trivial.from_residues(&r);
            if to_charge[idx] != usize::MAX {
                return Err(Error::InvalidInput("abelian charge decomposition is not injective".into()));
            }
            to_charge[idx] = a;
            to_element[a] = Some(idx);
        }
        let action: Vec<Vec<usize>> = self
            .group()
            .elements()
            .map(|g| {
                to_charge
                    .iter()
                    .map(|&a| {
                        to_element[self.act(g, a)].ok_or_else(|| {
                            Error::InvalidInput(format!("action {g} moves {a} outside A"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let module = FiniteModule::with_action(&factors, action, self.group())?;
        Ok(AbelianGroup {
            to_charge,
            to_element,
            module,
        })
    }

    /// `M_ab = R^{ab}_c R^{ba}_c` for identity-graded `a, b` with at least one
    /// abelian.
    pub fn monodromy(&self, a: usize, b: usize) -> Result<C64> {
        let e = self.group().identity();
        if self.grade(a) != e || self.grade(b) != e {
            return Err(Error::Precondition(format!(
                "monodromy needs identity-graded charges, got {a} and {b}"
            )));
        }
        if !self.is_invertible(a) && !self.is_invertible(b) {
            return Err(Error::NotAbelian { a, b });
        }
        let c = self.fuse1(a, b)?;
        Ok(self.r(a, b, c)? * self.r(b, a, c)?)
    }
}
