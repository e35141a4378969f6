#![allow(dead_code)]

use proptest::prelude::*;
use proptest::sample::Index;
use quasiset::{AtomSort, EntityHandle, Species, Universe, UniverseBuilder};

/// Atoms as (micro?, species number); quasi-sets as member picks among the
/// entities created before them.
#[derive(Debug, Clone)]
pub struct Recipe {
    pub atoms: Vec<(bool, u8)>,
    pub qsets: Vec<Vec<Index>>,
}

impl Recipe {
    pub fn build(&self) -> Universe {
        let mut b = UniverseBuilder::new();
        for (i, &(micro, s)) in self.atoms.iter().enumerate() {
            let (sort, tag) = if micro {
                (AtomSort::Micro, format!("m{s}"))
            } else {
                (AtomSort::Macro, format!("M{s}"))
            };
            b.add_atom(format!("a{i}"), sort, Species::new(tag))
                .unwrap();
        }
        for (i, picks) in self.qsets.iter().enumerate() {
            let len = b.universe().len();
            let mut members: Vec<EntityHandle> = if len == 0 {
                Vec::new()
            } else {
                let all: Vec<EntityHandle> = b.universe().handles().collect();
                picks.iter().map(|p| all[p.index(len)]).collect()
            };
            members.sort();
            members.dedup();
            let zfu = !members
                .iter()
                .any(|&m| b.universe().reaches_micro(m).unwrap());
            b.add_qset(format!("x{i}"), members, zfu).unwrap();
        }
        b.build()
    }
}

pub fn recipe(
    max_atoms: usize,
    max_qsets: usize,
    max_members: usize,
) -> impl Strategy<Value = Recipe> {
    (
        prop::collection::vec((any::<bool>(), 0u8..3), 0..=max_atoms),
        prop::collection::vec(
            prop::collection::vec(any::<Index>(), 0..=max_members),
            0..=max_qsets,
        ),
    )
        .prop_map(|(atoms, qsets)| Recipe { atoms, qsets })
}

pub fn universe(
    max_atoms: usize,
    max_qsets: usize,
    max_members: usize,
) -> impl Strategy<Value = Universe> {
    recipe(max_atoms, max_qsets, max_members).prop_map(|r| r.build())
}

/// Naive recursive indistinguishability: atoms by sort and species, quasi-sets
/// by matching every member's count of indistinguishable members on both
/// sides.
pub fn indist_oracle(u: &Universe, a: EntityHandle, b: EntityHandle) -> bool {
    let (ea, eb) = (u.entity(a).unwrap(), u.entity(b).unwrap());
    match (ea.as_qset(), eb.as_qset()) {
        (None, None) => ea.atom_sort() == eb.atom_sort() && ea.species() == eb.species(),
        (Some(x), Some(y)) => {
            let count = |set: &[EntityHandle], t: EntityHandle| {
                set.iter().filter(|&&s| indist_oracle(u, s, t)).count()
            };
            x.members()
                .iter()
                .chain(y.members())
                .all(|&t| count(x.members(), t) == count(y.members(), t))
        }
        _ => false,
    }
}
