//! JSON theory files.
//!
//! ```json
//! { "name": "semion",
//!   "group": {"cyclic": [1]},
//!   "charges": [{"name": "1", "grade": 0}, {"name": "s", "grade": 0}],
//!   "vacuum": 0,
//!   "fusion": [[0,0,0], [0,1,1], [1,0,1], [1,1,0]],
//!   "F": [{"labels": [1,1,1,1,0,0], "value": {"turns": "1/2"}}],
//!   "R": [{"labels": [1,1,0], "value": {"turns": "1/4"}}] }
//! ```
//!
//! Symbol entries that are not listed are 1. `dual` and `action` are
//! optional; `U` and `eta` labels are `[k,a,b,c]` and `[x,g,h]`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{GxTheory, TheoryBuilder};
use crate::groups::FiniteGroup;
use crate::phase::{PhaseValue, C64, ONE};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum GroupSpec {
    Cyclic(Vec<usize>),
    Table(Vec<Vec<usize>>),
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Cyclic(f) => {
                if f.iter().any(|&m| m == 0) {
                    return Err(Error::InvalidInput("cyclic factor 0".into()));
                }
                Ok(FiniteGroup::product_of_cyclic(f))
            }
            GroupSpec::Table(t) => FiniteGroup::from_table(t.clone()),
        }
    }

    pub fn of(group: &FiniteGroup) -> Self {
        match group.cyclic_factors() {
            Some(f) => GroupSpec::Cyclic(f.to_vec()),
            None => GroupSpec::Table(group.table().to_vec()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChargeSpec {
    pub name: String,
    pub grade: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SymbolEntry {
    pub labels: Vec<usize>,
    pub value: PhaseValue,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TheoryFile {
    pub name: String,
    pub group: GroupSpec,
    pub charges: Vec<ChargeSpec>,
    pub vacuum: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<Vec<usize>>>,
    pub fusion: Vec<[usize; 3]>,
    #[serde(rename = "F", default)]
    pub f: Vec<SymbolEntry>,
    #[serde(rename = "R", default)]
    pub r: Vec<SymbolEntry>,
    #[serde(rename = "U", default)]
    pub u: Vec<SymbolEntry>,
    #[serde(default)]
    pub eta: Vec<SymbolEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

fn entry<const N: usize>(labels: &[usize]) -> Result<[usize; N]> {
    labels
        .try_into()
        .map_err(|_| Error::InvalidInput(format!("expected {N} labels, found {labels:?}")))
}

fn non_unit<const N: usize>(map: &BTreeMap<[usize; N], C64>) -> Vec<SymbolEntry> {
    map.iter()
        .filter(|(_, v)| v.re.to_bits() != ONE.re.to_bits() || v.im.to_bits() != ONE.im.to_bits())
        .map(|(k, v)| SymbolEntry {
            labels: k.to_vec(),
            value: PhaseValue::from_complex(*v),
        })
        .collect()
}

impl TheoryFile {
    pub fn into_theory(self) -> Result<GxTheory> {
        let group = Arc::new(self.group.build()?);
        let mut b = TheoryBuilder::new(self.name.clone(), group);
        for c in &self.charges {
            b.charge(c.name.clone(), c.grade);
        }
        b.vacuum(self.vacuum);
        for &[x, y, z] in &self.fusion {
            b.fuse(x, y, z);
        }
        if let Some(a) = self.action {
            b.action(a);
        }
        if let Some(d) = self.dual {
            b.dual(d);
        }
        let mut t = b.build()?;
        for e in &self.f {
            t.set_f(entry(&e.labels)?, e.value.to_complex()?)?;
        }
        for e in &self.r {
            t.set_r(entry(&e.labels)?, e.value.to_complex()?)?;
        }
        for e in &self.u {
            t.set_u(entry(&e.labels)?, e.value.to_complex()?)?;
        }
        for e in &self.eta {
            t.set_eta(entry(&e.labels)?, e.value.to_complex()?)?;
        }
        for (k, v) in self.metadata {
            t.set_metadata(k, v);
        }
        Ok(t)
    }

    pub fn from_theory(t: &GxTheory) -> Self {
        let mut fusion = Vec::new();
        for a in t.charges() {
            for b in t.charges() {
                for &c in t.products(a, b) {
                    fusion.push([a, b, c]);
                }
            }
        }
        let trivial_action = t
            .action_table()
            .iter()
            .all(|row| row.iter().enumerate().all(|(i, &j)| i == j));
        TheoryFile {
            name: t.name().to_string(),
            group: GroupSpec::of(t.group()),
            charges: t
                .charges()
                .map(|a| ChargeSpec {
                    name: t.charge_name(a).to_string(),
                    grade: t.grade(a),
                })
                .collect(),
            vacuum: t.vacuum(),
            dual: Some(t.charges().map(|a| t.dual(a)).collect()),
            action: (!trivial_action).then(|| t.action_table().to_vec()),
            fusion,
            f: non_unit(t.f_entries()),
            r: non_unit(t.r_entries()),
            u: non_unit(t.u_entries()),
            eta: non_unit(t.eta_entries()),
            metadata: t.metadata().clone(),
        }
    }
}

impl GxTheory {
    pub fn from_json(s: &str) -> Result<GxTheory> {
        serde_json::from_str::<TheoryFile>(s)?.into_theory()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TheoryFile::from_theory(self)).expect("theory serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<GxTheory> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}
