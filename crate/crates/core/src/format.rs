//! JSON file formats. Every file carries a top-level `"format": 1`.
//!
//! Universe:
//!
//! ```json
//! { "format": 1,
//!   "atoms": [ { "id": "a", "kind": "m", "species": "electron" } ],
//!   "qsets": [ { "id": "x", "members": ["a"], "zfu": false } ] }
//! ```
//!
//! Quasi-set members must be atoms or earlier quasi-sets.
//!
//! D_O-system:
//!
//! ```json
//! { "format": 1, "n": 2, "lambda": ["1/2", "3"],
//!   "X": [ { "mass": "511/1000 MeV", "charge": "-1 e" } ],
//!   "P": [ { "x": 0, "lam": 1, "scale": "micro" } ] }
//! ```
//!
//! `x` is a 0-based index into `X` or an inline state, `lam` a 1-based index
//! into `lambda` or an inline rational, `scale` one of `"micro"`/`"macro"` or
//! a list of them (so that D2 and D6 violations can be written down).
//!
//! Rational spec:
//!
//! ```json
//! { "format": 1, "rationals": ["1/2"],
//!   "sequences": [ { "q": "0", "r": "1", "d": 2, "tail": "inv_n" } ],
//!   "qsets": [ { "id": "x", "members": ["r0", "s0"] } ] }
//! ```

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::do_model::{DoSystem, HiddenValue, IntrinsicState, Magnitude, Particle};
use crate::error::{Error, Result};
use crate::rational_model::{
    parse_rational, LimitDescriptor, MSequence, QSetSpec, RationalUniverseSpec,
};
use crate::universe::{AtomSort, EntityHandle, EntityKind, Species, Universe, UniverseBuilder};

pub const FORMAT_VERSION: u32 = 1;

fn version() -> u32 {
    FORMAT_VERSION
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::validation(format!(
            "unsupported format version {v} (expected {FORMAT_VERSION})"
        )));
    }
    Ok(())
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::validation(format!("line {} column {}: {e}", e.line(), e.column())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("file structs serialize");
    s.push('\n');
    s
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UniverseFile {
    #[serde(default = "version")]
    format: u32,
    #[serde(default)]
    atoms: Vec<AtomEntry>,
    #[serde(default)]
    qsets: Vec<QSetEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomEntry {
    id: String,
    kind: String,
    species: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QSetEntry {
    id: String,
    members: Vec<String>,
    zfu: bool,
}

pub fn universe_from_json(text: &str) -> Result<Universe> {
    let file: UniverseFile = parse_json(text)?;
    check_version(file.format)?;
    let mut b = UniverseBuilder::new();
    for (i, a) in file.atoms.iter().enumerate() {
        let sort = match a.kind.as_str() {
            "m" => AtomSort::Micro,
            "M" => AtomSort::Macro,
            k => {
                return Err(Error::validation(format!(
                    "atoms[{i}]: kind `{k}` is neither \"m\" nor \"M\""
                )))
            }
        };
        b.add_atom(a.id.clone(), sort, Species::new(a.species.clone()))
            .map_err(|e| at(format!("atoms[{i}]"), e))?;
    }
    for (i, q) in file.qsets.iter().enumerate() {
        let members = q
            .members
            .iter()
            .map(|m| {
                b.universe().lookup(m).ok_or_else(|| {
                    Error::validation(format!(
                        "qsets[{i}] (`{}`): member `{m}` is not an atom or an earlier qset",
                        q.id
                    ))
                })
            })
            .collect::<Result<Vec<EntityHandle>>>()?;
        b.add_qset(q.id.clone(), members, q.zfu)
            .map_err(|e| at(format!("qsets[{i}]"), e))?;
    }
    Ok(b.build())
}

fn at(place: String, e: Error) -> Error {
    match e {
        Error::Validation(m) => Error::validation(format!("{place}: {m}")),
        other => Error::validation(format!("{place}: {other}")),
    }
}

/// Atoms first, then quasi-sets in handle order, so every member reference
/// points backwards.
pub fn universe_to_json(u: &Universe) -> String {
    let mut file = UniverseFile {
        format: FORMAT_VERSION,
        atoms: Vec::new(),
        qsets: Vec::new(),
    };
    for e in u.entities() {
        match e.kind() {
            EntityKind::Atom { sort, species } => file.atoms.push(AtomEntry {
                id: e.name().to_string(),
                kind: sort.symbol().to_string(),
                species: species.as_str().to_string(),
            }),
            EntityKind::QSet(q) => file.qsets.push(QSetEntry {
                id: e.name().to_string(),
                members: q.members().iter().map(|&m| u.name(m).to_string()).collect(),
                zfu: q.is_zfu_set(),
            }),
        }
    }
    to_json(&file)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DoSystemFile {
    #[serde(default = "version")]
    format: u32,
    n: usize,
    lambda: Vec<String>,
    #[serde(rename = "X")]
    x: Vec<BTreeMap<String, String>>,
    #[serde(rename = "P")]
    p: Vec<ParticleEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParticleEntry {
    x: StateRef,
    lam: LabelRef,
    scale: ScaleEntry,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum StateRef {
    Index(usize),
    Inline(BTreeMap<String, String>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum LabelRef {
    Index(usize),
    Value(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ScaleEntry {
    One(String),
    Many(Vec<String>),
}

fn parse_state(place: &str, m: &BTreeMap<String, String>) -> Result<IntrinsicState> {
    let components = m
        .iter()
        .map(|(k, v)| {
            let mut parts = v.split_whitespace();
            let value = parts.next().ok_or_else(|| {
                Error::validation(format!("{place}: property `{k}` has no value"))
            })?;
            let value = parse_rational(value).map_err(|e| at(format!("{place}.{k}"), e))?;
            let unit = parts.collect::<Vec<_>>().join(" ");
            Ok((k.clone(), Magnitude { value, unit }))
        })
        .collect::<Result<Vec<_>>>()?;
    IntrinsicState::new(components).map_err(|e| at(place.to_string(), e))
}

fn state_entry(x: &IntrinsicState) -> BTreeMap<String, String> {
    x.components()
        .iter()
        .map(|(k, m)| (k.clone(), m.to_string()))
        .collect()
}

pub fn do_system_from_json(text: &str) -> Result<DoSystem> {
    let file: DoSystemFile = parse_json(text)?;
    check_version(file.format)?;
    if file.n != file.lambda.len() {
        return Err(Error::validation(format!(
            "n = {} but lambda lists {} values",
            file.n,
            file.lambda.len()
        )));
    }
    let lambda = file
        .lambda
        .iter()
        .enumerate()
        .map(|(i, s)| {
            parse_rational(s)
                .map(HiddenValue)
                .map_err(|e| at(format!("lambda[{}]", i + 1), e))
        })
        .collect::<Result<Vec<_>>>()?;
    let pool = file
        .x
        .iter()
        .enumerate()
        .map(|(i, m)| parse_state(&format!("X[{i}]"), m))
        .collect::<Result<Vec<_>>>()?;
    let mut particles = Vec::with_capacity(file.p.len());
    for (i, p) in file.p.iter().enumerate() {
        let place = format!("P[{i}]");
        let x = match &p.x {
            StateRef::Index(k) => pool.get(*k).cloned().ok_or_else(|| {
                Error::validation(format!("{place}: x = {k} is outside X (0..{})", pool.len()))
            })?,
            StateRef::Inline(m) => parse_state(&format!("{place}.x"), m)?,
        };
        let lam = match &p.lam {
            LabelRef::Index(k) if (1..=lambda.len()).contains(k) => lambda[k - 1].clone(),
            LabelRef::Index(k) => {
                return Err(Error::validation(format!(
                    "{place}: lam = {k} is outside 1..={}",
                    lambda.len()
                )))
            }
            LabelRef::Value(s) => {
                HiddenValue(parse_rational(s).map_err(|e| at(format!("{place}.lam"), e))?)
            }
        };
        let scales: Vec<&str> = match &p.scale {
            ScaleEntry::One(s) => vec![s.as_str()],
            ScaleEntry::Many(v) => v.iter().map(String::as_str).collect(),
        };
        let mut particle = Particle {
            x,
            lam,
            micro: false,
            macro_: false,
        };
        for s in scales {
            match s {
                "micro" => particle.micro = true,
                "macro" => particle.macro_ = true,
                other => {
                    return Err(Error::validation(format!(
                        "{place}: scale `{other}` is neither \"micro\" nor \"macro\""
                    )))
                }
            }
        }
        particles.push(particle);
    }
    DoSystem::new(lambda, pool, particles)
}

pub fn do_system_to_json(s: &DoSystem) -> String {
    let pool_index: HashMap<&IntrinsicState, usize> = s
        .intrinsic_pool()
        .iter()
        .enumerate()
        .map(|(i, x)| (x, i))
        .collect();
    let label_index: HashMap<&HiddenValue, usize> = s
        .lambda()
        .iter()
        .enumerate()
        .rev()
        .map(|(i, v)| (v, i + 1))
        .collect();
    let file = DoSystemFile {
        format: FORMAT_VERSION,
        n: s.n(),
        lambda: s.lambda().iter().map(|v| v.0.to_string()).collect(),
        x: s.intrinsic_pool().iter().map(state_entry).collect(),
        p: s.particles()
            .iter()
            .map(|p| ParticleEntry {
                x: match pool_index.get(&p.x) {
                    Some(&i) => StateRef::Index(i),
                    None => StateRef::Inline(state_entry(&p.x)),
                },
                lam: match label_index.get(&p.lam) {
                    Some(&i) => LabelRef::Index(i),
                    None => LabelRef::Value(p.lam.0.to_string()),
                },
                scale: match (p.micro, p.macro_) {
                    (true, false) => ScaleEntry::One("micro".into()),
                    (false, true) => ScaleEntry::One("macro".into()),
                    (micro, macro_) => ScaleEntry::Many(
                        [(micro, "micro"), (macro_, "macro")]
                            .into_iter()
                            .filter(|(on, _)| *on)
                            .map(|(_, s)| s.to_string())
                            .collect(),
                    ),
                },
            })
            .collect(),
    };
    to_json(&file)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalSpecFile {
    #[serde(default = "version")]
    format: u32,
    #[serde(default)]
    rationals: Vec<String>,
    #[serde(default)]
    sequences: Vec<SequenceEntry>,
    #[serde(default)]
    qsets: Vec<SpecQSetEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceEntry {
    q: String,
    r: String,
    d: u64,
    tail: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecQSetEntry {
    id: String,
    members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    zfu: Option<bool>,
}

/// Reads a rational spec. Sequences are parsed but not validated; that is
/// [`crate::rational_model::build_universe`]'s job.
pub fn rational_spec_from_json(text: &str) -> Result<RationalUniverseSpec> {
    let file: RationalSpecFile = parse_json(text)?;
    check_version(file.format)?;
    let rationals = file
        .rationals
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).map_err(|e| at(format!("rationals[{i}]"), e)))
        .collect::<Result<Vec<_>>>()?;
    let sequences = file
        .sequences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let place = format!("sequences[{i}]");
            let q = parse_rational(&s.q).map_err(|e| at(format!("{place}.q"), e))?;
            let r = parse_rational(&s.r).map_err(|e| at(format!("{place}.r"), e))?;
            let tail = s.tail.parse().map_err(|e| at(place, e))?;
            Ok(MSequence::new(LimitDescriptor::new(q, r, s.d), tail))
        })
        .collect::<Result<Vec<_>>>()?;
    let qsets = file
        .qsets
        .into_iter()
        .map(|q| QSetSpec {
            id: q.id,
            members: q.members,
            zfu: q.zfu,
        })
        .collect();
    Ok(RationalUniverseSpec {
        rationals,
        sequences,
        qsets,
    })
}

pub fn rational_spec_to_json(spec: &RationalUniverseSpec) -> String {
    let file = RationalSpecFile {
        format: FORMAT_VERSION,
        rationals: spec.rationals.iter().map(ToString::to_string).collect(),
        sequences: spec
            .sequences
            .iter()
            .map(|s| SequenceEntry {
                q: s.limit.q.to_string(),
                r: s.limit.r.to_string(),
                d: s.limit.d,
                tail: s.tail.name().to_string(),
            })
            .collect(),
        qsets: spec
            .qsets
            .iter()
            .map(|q| SpecQSetEntry {
                id: q.id.clone(),
                members: q.members.clone(),
                zfu: q.zfu,
            })
            .collect(),
    };
    to_json(&file)
}
