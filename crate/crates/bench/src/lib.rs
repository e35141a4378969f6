//! Workloads shared by the benchmarks in `benches/`.

use quasiset::do_model::{gen_do, DoSystem, GenConfig};
use quasiset::{AtomSort, EntityHandle, Species, Universe, UniverseBuilder};

/// `atoms` atoms cycling through `species` micro species, then `layers`
/// quasi-sets, each holding a sliding window of `width` earlier entities.
pub fn layered_universe(atoms: usize, species: usize, layers: usize, width: usize) -> Universe {
    let mut b = UniverseBuilder::new();
    for i in 0..atoms {
        b.add_atom(
            format!("a{i}"),
            AtomSort::Micro,
            Species::new(format!("s{}", i % species)),
        )
        .unwrap();
    }
    for k in 0..layers {
        let all: Vec<EntityHandle> = b.universe().handles().collect();
        let start = (k * 3) % all.len().max(1);
        let members: Vec<EntityHandle> = all
            .iter()
            .cycle()
            .skip(start)
            .take(width.min(all.len()))
            .copied()
            .collect();
        b.add_qset(format!("x{k}"), members, false).unwrap();
    }
    b.build()
}

/// A flat quasi-set `x` of `n` atoms from three species.
pub fn flat_qset(n: usize) -> (Universe, EntityHandle) {
    let u = layered_universe(n, 3, 0, 0);
    let mut b = UniverseBuilder::from_universe(u);
    let members = b.universe().handles().collect();
    let x = b.add_qset("x", members, false).unwrap();
    (b.build(), x)
}

pub fn system(n: usize, seed: u64) -> DoSystem {
    gen_do(GenConfig {
        n,
        species_count: n,
        micro_fraction: 0.7,
        seed,
    })
    .expect("valid generator config")
}
