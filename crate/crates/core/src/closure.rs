//! Witness closure: extending a universe with the quasi-sets that existential
//! axioms ask for, so that later checks can find them among the declared
//! entities.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formula::{separation_with, SeparationInstance, Valuation};
use crate::universe::{EntityHandle, Universe, UniverseBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosureOp {
    /// `[x, y]` for every two `≡`-classes.
    WeakPair,
    /// `P(x)` for every quasi-set with `qc(x)` up to the bound.
    Power,
    /// `x/≡` and its classes for every quasi-set of atoms.
    Quotient,
    /// The stock separation instances on every quasi-set.
    Separation,
}

impl ClosureOp {
    pub const ALL: [ClosureOp; 4] = [
        ClosureOp::WeakPair,
        ClosureOp::Power,
        ClosureOp::Quotient,
        ClosureOp::Separation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClosureOp::WeakPair => "weakpair",
            ClosureOp::Power => "power",
            ClosureOp::Quotient => "quotient",
            ClosureOp::Separation => "separation",
        }
    }
}

impl fmt::Display for ClosureOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClosureOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClosureOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| {
                Error::validation(format!(
                    "unknown closure op `{s}` (expected weakpair, power, quotient or separation)"
                ))
            })
    }
}

#[derive(Debug, Clone)]
pub struct Closure {
    pub universe: Universe,
    /// Number of quasi-sets added.
    pub added: usize,
    /// Quasi-sets whose power quasi-set was not built because of the bound.
    pub skipped: Vec<String>,
}

/// Applies `ops` in order. Every op ranges over the entities of the input
/// universe only, so one call adds a single layer of witnesses.
pub fn close(u: &Universe, ops: &[ClosureOp], max_card: usize) -> Result<Closure> {
    let mut b = UniverseBuilder::from_universe(u.clone());
    let mut skipped = Vec::new();
    let qsets: Vec<EntityHandle> = u.qset_handles().collect();
    for op in ops {
        match op {
            ClosureOp::WeakPair => {
                let mut seen = HashSet::new();
                let reps: Vec<EntityHandle> = u
                    .handles()
                    .filter(|h| seen.insert(u.class_id(*h).unwrap_or(u32::MAX)))
                    .collect();
                for (i, &x) in reps.iter().enumerate() {
                    for &y in &reps[i..] {
                        b.derive_qset(u.weak_pair_members(x, y)?);
                    }
                }
            }
            ClosureOp::Power => {
                for &x in &qsets {
                    let members = u.members(x)?.to_vec();
                    if members.len() > max_card || members.len() >= 30 {
                        skipped.push(u.name(x).to_string());
                        continue;
                    }
                    let subs: Vec<EntityHandle> = (0usize..1 << members.len())
                        .map(|mask| {
                            let sub = members
                                .iter()
                                .enumerate()
                                .filter(|(k, _)| mask & (1 << k) != 0)
                                .map(|(_, h)| *h)
                                .collect();
                            b.derive_qset(sub)
                        })
                        .collect();
                    b.derive_qset(subs);
                }
            }
            ClosureOp::Quotient => {
                for &x in &qsets {
                    let Ok(classes) = u.quotient_classes(x) else {
                        continue;
                    };
                    let cs: Vec<EntityHandle> =
                        classes.into_iter().map(|c| b.derive_qset(c)).collect();
                    b.derive_qset(cs);
                }
            }
            ClosureOp::Separation => {
                let mut seen = HashSet::new();
                let atom_reps: Vec<EntityHandle> = u
                    .atom_handles()
                    .filter(|h| seen.insert(u.class_id(*h).unwrap_or(u32::MAX)))
                    .collect();
                for inst in SeparationInstance::stock() {
                    let params: Vec<String> = inst
                        .alpha
                        .free_vars()
                        .into_iter()
                        .filter(|v| *v != inst.var)
                        .collect();
                    let bindings: Vec<Valuation> = match params.first() {
                        None => vec![Valuation::new()],
                        Some(p) => atom_reps
                            .iter()
                            .map(|&c| Valuation::new().bind(p.clone(), c))
                            .collect(),
                    };
                    for v in &bindings {
                        for &x in &qsets {
                            let w = separation_with(u, x, &inst.alpha, &inst.var, v)?;
                            b.derive_qset(w.universe.members(w.qset)?.to_vec());
                        }
                    }
                }
            }
        }
    }
    let universe = b.build();
    Ok(Closure {
        added: universe.len() - u.len(),
        universe,
        skipped,
    })
}
