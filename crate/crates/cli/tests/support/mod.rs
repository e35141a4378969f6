#![allow(dead_code)]

pub mod formulas;
pub mod oracles;
pub mod reference;

use std::path::{Path, PathBuf};

use quasiset::{AtomSort, EntityHandle, Species, Universe, UniverseBuilder};
use rand::Rng;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn demo_spec() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/rational_demo.json")
}

/// Fresh scratch directory under the target dir, emptied first.
pub fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

/// Runs the CLI in-process and returns (exit code, stdout, stderr).
pub fn qset(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qset").chain(args.iter().copied());
    let code = quasiset_cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).expect("utf-8 stdout"),
        String::from_utf8(err).expect("utf-8 stderr"),
    )
}

/// Kind of an atom in a generated universe: micro flag and species number.
pub type AtomKind = (bool, u8);

pub fn build(atoms: &[AtomKind], qsets: &[Vec<usize>]) -> Universe {
    let mut b = UniverseBuilder::new();
    for (i, &(micro, s)) in atoms.iter().enumerate() {
        let (sort, tag) = if micro {
            (AtomSort::Micro, format!("m{s}"))
        } else {
            (AtomSort::Macro, format!("M{s}"))
        };
        b.add_atom(format!("a{i}"), sort, Species::new(tag))
            .unwrap();
    }
    for (i, picks) in qsets.iter().enumerate() {
        let all: Vec<EntityHandle> = b.universe().handles().collect();
        let mut members: Vec<EntityHandle> = picks.iter().map(|&k| all[k]).collect();
        members.sort();
        members.dedup();
        let zfu = !members
            .iter()
            .any(|&m| b.universe().reaches_micro(m).unwrap());
        b.add_qset(format!("x{i}"), members, zfu).unwrap();
    }
    b.build()
}

/// Random universe: up to `max_atoms` atoms over a few species, then up to
/// `max_qsets` quasi-sets whose members are drawn from earlier entities.
pub fn random_universe(
    rng: &mut impl Rng,
    max_atoms: usize,
    max_qsets: usize,
    max_members: usize,
) -> Universe {
    let atoms: Vec<AtomKind> = (0..rng.gen_range(0..=max_atoms))
        .map(|_| (rng.gen_bool(0.5), rng.gen_range(0..3)))
        .collect();
    let mut qsets = Vec::new();
    for q in 0..rng.gen_range(0..=max_qsets) {
        let existing = atoms.len() + q;
        let k = if existing == 0 {
            0
        } else {
            rng.gen_range(0..=max_members)
        };
        qsets.push((0..k).map(|_| rng.gen_range(0..existing)).collect());
    }
    build(&atoms, &qsets)
}
