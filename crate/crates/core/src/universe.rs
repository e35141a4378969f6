//! Finite quasi-set universes.
//!
//! A [`Universe`] is an immutable, well-founded structure of m-atoms, M-atoms
//! and quasi-sets. Atoms carry a species tag; two atoms are indistinguishable
//! (`≡`) exactly when they share sort and species. Handles play the part of the
//! hidden label: they tell entities apart for bookkeeping, but no `≡`-level
//! result looks at the handle of an m-atom.
//!
//! Operations that build new quasi-sets return an [`Extension`]: a fresh
//! universe holding everything from the old one plus the result.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Largest quasi-cardinal [`Universe::power_qset`] accepts by default.
pub const DEFAULT_POWER_BOUND: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityHandle(u32);

impl EntityHandle {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    fn from_index(i: usize) -> Self {
        EntityHandle(u32::try_from(i).expect("universe exceeds u32 handles"))
    }
}

impl fmt::Display for EntityHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The two sorts of atoms: `m` (micro, no identity) and `M` (macro, classical).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomSort {
    Micro,
    Macro,
}

impl AtomSort {
    pub fn symbol(self) -> &'static str {
        match self {
            AtomSort::Micro => "m",
            AtomSort::Macro => "M",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Species(String);

impl Species {
    pub fn new(tag: impl Into<String>) -> Self {
        Species(tag.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuasiCardinal(pub u64);

impl QuasiCardinal {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for QuasiCardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSet {
    members: Vec<EntityHandle>,
    is_zfu_set: bool,
}

impl QSet {
    /// Members sorted by handle.
    pub fn members(&self) -> &[EntityHandle] {
        &self.members
    }

    pub fn is_zfu_set(&self) -> bool {
        self.is_zfu_set
    }

    pub fn contains(&self, h: EntityHandle) -> bool {
        self.members.binary_search(&h).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntityKind {
    Atom { sort: AtomSort, species: Species },
    QSet(QSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    handle: EntityHandle,
    name: String,
    kind: EntityKind,
}

impl Entity {
    pub fn handle(&self) -> EntityHandle {
        self.handle
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &EntityKind {
        &self.kind
    }

    pub fn atom_sort(&self) -> Option<AtomSort> {
        match &self.kind {
            EntityKind::Atom { sort, .. } => Some(*sort),
            EntityKind::QSet(_) => None,
        }
    }

    pub fn species(&self) -> Option<&Species> {
        match &self.kind {
            EntityKind::Atom { species, .. } => Some(species),
            EntityKind::QSet(_) => None,
        }
    }

    pub fn as_qset(&self) -> Option<&QSet> {
        match &self.kind {
            EntityKind::QSet(q) => Some(q),
            EntityKind::Atom { .. } => None,
        }
    }

    pub fn is_micro(&self) -> bool {
        self.atom_sort() == Some(AtomSort::Micro)
    }

    pub fn is_macro(&self) -> bool {
        self.atom_sort() == Some(AtomSort::Macro)
    }

    pub fn is_qset(&self) -> bool {
        self.as_qset().is_some()
    }
}

/// Outcome of the extensional equality predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtEq {
    Equal,
    Distinct,
    /// One of the arguments is an m-atom, for which `=E` is not a formula.
    NotApplicable(EntityHandle),
}

impl ExtEq {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            ExtEq::Equal => Some(true),
            ExtEq::Distinct => Some(false),
            ExtEq::NotApplicable(_) => None,
        }
    }
}

/// A universe together with a quasi-set just added to it.
#[derive(Debug, Clone)]
pub struct Extension {
    pub universe: Universe,
    pub qset: EntityHandle,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum ClassKey {
    Atom(AtomSort, Species),
    QSet(Vec<u32>),
}

#[derive(Debug, Clone, Default)]
pub struct Universe {
    entities: Vec<Entity>,
    species_table: BTreeMap<Species, AtomSort>,
    // ≡-class of each entity; equal ids iff indistinguishable
    class_of: Vec<u32>,
    // transitive closure reaches an m-atom (atoms: the atom itself is micro)
    reaches_micro: Vec<bool>,
    names: HashMap<String, EntityHandle>,
    by_members: HashMap<Vec<EntityHandle>, EntityHandle>,
    class_keys: HashMap<ClassKey, u32>,
}

impl Universe {
    pub fn empty() -> Self {
        Universe::default()
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn handles(&self) -> impl DoubleEndedIterator<Item = EntityHandle> + ExactSizeIterator {
        (0..self.entities.len()).map(EntityHandle::from_index)
    }

    pub fn qset_handles(&self) -> impl Iterator<Item = EntityHandle> + '_ {
        self.entities
            .iter()
            .filter(|e| e.is_qset())
            .map(|e| e.handle)
    }

    pub fn atom_handles(&self) -> impl Iterator<Item = EntityHandle> + '_ {
        self.entities
            .iter()
            .filter(|e| !e.is_qset())
            .map(|e| e.handle)
    }

    pub fn species_table(&self) -> &BTreeMap<Species, AtomSort> {
        &self.species_table
    }

    pub fn entity(&self, h: EntityHandle) -> Result<&Entity> {
        self.entities.get(h.index()).ok_or(Error::UnknownHandle(h))
    }

    pub fn lookup(&self, name: &str) -> Option<EntityHandle> {
        self.names.get(name).copied()
    }

    pub fn resolve(&self, name: &str) -> Result<EntityHandle> {
        self.lookup(name)
            .ok_or_else(|| Error::UnknownId(name.to_string()))
    }

    pub fn name(&self, h: EntityHandle) -> &str {
        self.entities
            .get(h.index())
            .map_or("?", |e| e.name.as_str())
    }

    pub fn qset(&self, h: EntityHandle) -> Result<&QSet> {
        let e = self.entity(h)?;
        e.as_qset().ok_or_else(|| Error::NotAQSet(e.name.clone()))
    }

    pub fn members(&self, h: EntityHandle) -> Result<&[EntityHandle]> {
        Ok(self.qset(h)?.members())
    }

    /// Membership `t ∈ x`. False when `x` is an atom.
    pub fn is_member(&self, t: EntityHandle, x: EntityHandle) -> Result<bool> {
        self.entity(t)?;
        Ok(self.entity(x)?.as_qset().is_some_and(|q| q.contains(t)))
    }

    /// `Z(x)`: `x` is a quasi-set flagged as a copy of a classical set.
    pub fn is_zfu_set(&self, h: EntityHandle) -> Result<bool> {
        Ok(self.entity(h)?.as_qset().is_some_and(QSet::is_zfu_set))
    }

    /// True when the transitive closure of `h` contains an m-atom.
    pub fn reaches_micro(&self, h: EntityHandle) -> Result<bool> {
        self.entity(h)?;
        Ok(self.reaches_micro[h.index()])
    }

    /// Identifier of the `≡`-class of `h`. Stable across extensions.
    pub fn class_id(&self, h: EntityHandle) -> Result<u32> {
        self.entity(h)?;
        Ok(self.class_of[h.index()])
    }

    /// Existing quasi-set whose member collection is exactly `members` (sorted).
    pub fn find_qset(&self, members: &[EntityHandle]) -> Option<EntityHandle> {
        self.by_members.get(members).copied()
    }

    /// The indistinguishability relation `≡`.
    ///
    /// Atoms are indistinguishable when they share sort and species. A quasi-set
    /// is never indistinguishable from an atom. Two quasi-sets are
    /// indistinguishable when every `≡`-class represented among the members of
    /// one is matched by a class of the other with the same multiplicity, which
    /// is the antecedent of Weak Extensionality (classes are nonempty, so
    /// `QSim` between two classes means "same class, same count").
    pub fn indist(&self, a: EntityHandle, b: EntityHandle) -> Result<bool> {
        Ok(self.class_id(a)? == self.class_id(b)?)
    }

    /// Extensional equality `=E`.
    pub fn ext_eq(&self, a: EntityHandle, b: EntityHandle) -> Result<ExtEq> {
        let ea = self.entity(a)?;
        let eb = self.entity(b)?;
        if ea.is_micro() {
            return Ok(ExtEq::NotApplicable(a));
        }
        if eb.is_micro() {
            return Ok(ExtEq::NotApplicable(b));
        }
        let equal = match (&ea.kind, &eb.kind) {
            (EntityKind::QSet(x), EntityKind::QSet(y)) => x.members == y.members,
            (EntityKind::Atom { .. }, EntityKind::Atom { .. }) => self.indist(a, b)?,
            _ => false,
        };
        Ok(if equal { ExtEq::Equal } else { ExtEq::Distinct })
    }

    pub fn qc(&self, x: EntityHandle) -> Result<QuasiCardinal> {
        Ok(QuasiCardinal(self.qset(x)?.members.len() as u64))
    }

    /// Classical cardinality of the member collection, counted over distinct
    /// handles. Coincides with [`Universe::qc`] in every finite universe.
    pub fn card(&self, x: EntityHandle) -> Result<u64> {
        let distinct: HashSet<EntityHandle> = self.qset(x)?.members.iter().copied().collect();
        Ok(distinct.len() as u64)
    }

    /// Members of the weak pair `[x, y]`: every entity indistinguishable from
    /// `x` or from `y`.
    pub fn weak_pair_members(&self, x: EntityHandle, y: EntityHandle) -> Result<Vec<EntityHandle>> {
        let cx = self.class_id(x)?;
        let cy = self.class_id(y)?;
        Ok(self
            .handles()
            .filter(|t| {
                let c = self.class_of[t.index()];
                c == cx || c == cy
            })
            .collect())
    }

    /// The weak pair `[x, y]`; written `[x]` when `x ≡ y`.
    pub fn weak_pair(&self, x: EntityHandle, y: EntityHandle) -> Result<Extension> {
        let members = self.weak_pair_members(x, y)?;
        Ok(self.extend_with(members))
    }

    /// Sub-quasi-set of `x` with quasi-cardinal `beta`, taking the first
    /// `beta` members in handle order.
    pub fn sub_qset_of_card(&self, x: EntityHandle, beta: QuasiCardinal) -> Result<Extension> {
        let members = self.members(x)?;
        let take = usize::try_from(beta.0).unwrap_or(usize::MAX);
        if take > members.len() {
            return Err(Error::validation(format!(
                "requested quasi-cardinal {beta} exceeds qc({}) = {}",
                self.name(x),
                members.len()
            )));
        }
        let chosen = members[..take].to_vec();
        Ok(self.extend_with(chosen))
    }

    /// Power quasi-set of `x`: one quasi-set per sub-collection of its members.
    pub fn power_qset(&self, x: EntityHandle, bound: usize) -> Result<Extension> {
        let members = self.members(x)?.to_vec();
        if members.len() > bound {
            return Err(Error::Resource {
                what: format!(
                    "power quasi-set of `{}` with qc {}",
                    self.name(x),
                    members.len()
                ),
                limit: bound as u64,
            });
        }
        if members.len() >= usize::BITS as usize - 1 {
            return Err(Error::Resource {
                what: "power quasi-set size".into(),
                limit: (usize::BITS - 2) as u64,
            });
        }
        let mut b = UniverseBuilder::from_universe(self.clone());
        let mut subs = Vec::with_capacity(1usize << members.len());
        for mask in 0usize..(1usize << members.len()) {
            let sub: Vec<EntityHandle> = members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, h)| *h)
                .collect();
            subs.push(b.derive_qset(sub));
        }
        let p = b.derive_qset(subs);
        Ok(Extension {
            universe: b.build(),
            qset: p,
        })
    }

    /// Members of `x` grouped by `≡`-class, classes ordered by their first
    /// member. `x` must contain atoms only.
    pub fn quotient_classes(&self, x: EntityHandle) -> Result<Vec<Vec<EntityHandle>>> {
        let members = self.members(x)?;
        if let Some(q) = members.iter().find(|h| self.entities[h.index()].is_qset()) {
            return Err(Error::Unsupported(format!(
                "quotient of `{}` which has quasi-set member `{}`",
                self.name(x),
                self.name(*q)
            )));
        }
        let mut order: Vec<u32> = Vec::new();
        let mut groups: HashMap<u32, Vec<EntityHandle>> = HashMap::new();
        for &m in members {
            let c = self.class_of[m.index()];
            groups
                .entry(c)
                .or_insert_with(|| {
                    order.push(c);
                    Vec::new()
                })
                .push(m);
        }
        Ok(order
            .into_iter()
            .map(|c| groups.remove(&c).unwrap_or_default())
            .collect())
    }

    /// The quotient `x/≡` as a quasi-set of class quasi-sets.
    pub fn quotient(&self, x: EntityHandle) -> Result<Extension> {
        let classes = self.quotient_classes(x)?;
        let mut b = UniverseBuilder::from_universe(self.clone());
        let class_handles: Vec<EntityHandle> =
            classes.into_iter().map(|c| b.derive_qset(c)).collect();
        let q = b.derive_qset(class_handles);
        Ok(Extension {
            universe: b.build(),
            qset: q,
        })
    }

    /// `Sim(x, y)`: every member of `x` is indistinguishable from every member of `y`.
    pub fn sim(&self, x: EntityHandle, y: EntityHandle) -> Result<bool> {
        let xs = self.members(x)?;
        let ys = self.members(y)?;
        Ok(xs.iter().all(|a| {
            ys.iter()
                .all(|b| self.class_of[a.index()] == self.class_of[b.index()])
        }))
    }

    /// `QSim(x, y)`: similar with equal quasi-cardinals.
    pub fn qsim(&self, x: EntityHandle, y: EntityHandle) -> Result<bool> {
        Ok(self.sim(x, y)? && self.qc(x)? == self.qc(y)?)
    }

    /// Kuratowski-style ordered pair `[[x], [x, y]]` built from weak pairs.
    ///
    /// The inner pieces `[x]`, `[y]` and `[x, y]` are all added before the
    /// outer weak pair is formed, so `ordered_qpair(y, x)` taken on the result
    /// reuses them.
    pub fn ordered_qpair(&self, x: EntityHandle, y: EntityHandle) -> Result<Extension> {
        let Extension {
            universe: u1,
            qset: sx,
        } = self.weak_pair(x, x)?;
        let Extension { universe: u2, .. } = u1.weak_pair(y, y)?;
        let Extension {
            universe: u3,
            qset: sxy,
        } = u2.weak_pair(x, y)?;
        u3.weak_pair(sx, sxy)
    }

    /// Quasi-function test: indistinguishable inputs map to indistinguishable
    /// outputs across every two pairs of `r`.
    pub fn check_quasi_function(&self, r: &[(EntityHandle, EntityHandle)]) -> Result<bool> {
        for &(a, b) in r {
            self.entity(a)?;
            self.entity(b)?;
        }
        for &(a, b) in r {
            for &(a2, b2) in r {
                if self.indist(a, a2)? && !self.indist(b, b2)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// New universe containing `members` as a quasi-set (reusing an existing
    /// quasi-set with the same member collection).
    pub fn extend_with(&self, mut members: Vec<EntityHandle>) -> Extension {
        members.sort_unstable();
        members.dedup();
        if let Some(h) = self.find_qset(&members) {
            return Extension {
                universe: self.clone(),
                qset: h,
            };
        }
        let mut b = UniverseBuilder::from_universe(self.clone());
        let h = b.derive_qset(members);
        Extension {
            universe: b.build(),
            qset: h,
        }
    }
}

/// Incremental construction of a [`Universe`]. Members must already exist when
/// a quasi-set is added, which keeps membership well-founded.
#[derive(Debug, Default)]
pub struct UniverseBuilder {
    u: Universe,
}

impl UniverseBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_universe(u: Universe) -> Self {
        UniverseBuilder { u }
    }

    pub fn universe(&self) -> &Universe {
        &self.u
    }

    pub fn add_atom(
        &mut self,
        name: impl Into<String>,
        sort: AtomSort,
        species: Species,
    ) -> Result<EntityHandle> {
        let name = name.into();
        self.check_name(&name)?;
        match self.u.species_table.get(&species) {
            Some(&s) if s != sort => {
                return Err(Error::validation(format!(
                    "species `{species}` used by both {}-atoms and {}-atoms (at `{name}`)",
                    s.symbol(),
                    sort.symbol()
                )))
            }
            _ => {}
        }
        self.u.species_table.insert(species.clone(), sort);
        let class = self.intern_class(ClassKey::Atom(sort, species.clone()));
        Ok(self.push(
            name,
            EntityKind::Atom { sort, species },
            class,
            sort == AtomSort::Micro,
        ))
    }

    /// Adds a declared quasi-set. Duplicate members and unknown handles are
    /// rejected, as is a `zfu` flag on a quasi-set that reaches an m-atom.
    pub fn add_qset(
        &mut self,
        name: impl Into<String>,
        members: Vec<EntityHandle>,
        zfu: bool,
    ) -> Result<EntityHandle> {
        let name = name.into();
        self.check_name(&name)?;
        for &m in &members {
            self.u.entity(m)?;
        }
        let mut sorted = members;
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::validation(format!(
                "quasi-set `{name}` lists member `{}` twice",
                self.u.name(w[0])
            )));
        }
        let reaches = sorted.iter().any(|m| self.u.reaches_micro[m.index()]);
        if zfu && reaches {
            return Err(Error::validation(format!(
                "quasi-set `{name}` is flagged as a set but its transitive closure contains an m-atom"
            )));
        }
        Ok(self.push_qset(name, sorted, zfu))
    }

    /// Adds (or reuses) an anonymous quasi-set; `zfu` is set exactly when no
    /// m-atom is reachable from it.
    pub fn derive_qset(&mut self, mut members: Vec<EntityHandle>) -> EntityHandle {
        members.sort_unstable();
        members.dedup();
        if let Some(h) = self.u.find_qset(&members) {
            return h;
        }
        let reaches = members.iter().any(|m| self.u.reaches_micro[m.index()]);
        let mut name = format!("q{}", self.u.entities.len());
        while self.u.names.contains_key(&name) {
            name.push('\'');
        }
        self.push_qset(name, members, !reaches)
    }

    pub fn build(self) -> Universe {
        self.u
    }

    fn check_name(&self, name: &str) -> Result<()> {
        if name.is_empty() {
            return Err(Error::validation("entity id must not be empty"));
        }
        if self.u.names.contains_key(name) {
            return Err(Error::validation(format!("duplicate entity id `{name}`")));
        }
        Ok(())
    }

    fn push_qset(&mut self, name: String, members: Vec<EntityHandle>, zfu: bool) -> EntityHandle {
        let mut key: Vec<u32> = members.iter().map(|m| self.u.class_of[m.index()]).collect();
        key.sort_unstable();
        let class = self.intern_class(ClassKey::QSet(key));
        let reaches = members.iter().any(|m| self.u.reaches_micro[m.index()]);
        let h = self.push(
            name,
            EntityKind::QSet(QSet {
                members: members.clone(),
                is_zfu_set: zfu,
            }),
            class,
            reaches,
        );
        self.u.by_members.entry(members).or_insert(h);
        h
    }

    fn intern_class(&mut self, key: ClassKey) -> u32 {
        let next = self.u.class_keys.len() as u32;
        *self.u.class_keys.entry(key).or_insert(next)
    }

    fn push(&mut self, name: String, kind: EntityKind, class: u32, reaches: bool) -> EntityHandle {
        let handle = EntityHandle::from_index(self.u.entities.len());
        self.u.names.insert(name.clone(), handle);
        self.u.entities.push(Entity { handle, name, kind });
        self.u.class_of.push(class);
        self.u.reaches_micro.push(reaches);
        handle
    }
}
