//! Systems of ontologically distinguishable particles.
//!
//! A particle is a pair of an intrinsic state (measured values of rest mass,
//! charge, spin, ...) and a hidden value taken from the injective labelling
//! `λ: {1..n} → ℚ`. Particles sharing an intrinsic state are physically
//! indistinguishable (`≐`); only the hidden value tells them apart.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::universe::{AtomSort, EntityHandle, Species, Universe, UniverseBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HiddenValue(pub BigRational);

impl fmt::Display for HiddenValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A measured value with its unit, e.g. `1/2 hbar`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Magnitude {
    pub value: BigRational,
    pub unit: String,
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit.is_empty() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} {}", self.value, self.unit)
        }
    }
}

/// Values of the state-independent properties of a particle, kept sorted by
/// property name so equal states compare equal component by component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntrinsicState(Vec<(String, Magnitude)>);

impl IntrinsicState {
    pub fn new(components: impl IntoIterator<Item = (String, Magnitude)>) -> Result<Self> {
        let mut v: Vec<(String, Magnitude)> = components.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = v.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::validation(format!(
                "intrinsic state names property `{}` twice",
                w[0].0
            )));
        }
        Ok(IntrinsicState(v))
    }

    pub fn components(&self) -> &[(String, Magnitude)] {
        &self.0
    }

    /// Canonical text, used as the species tag of the interpreted atom.
    pub fn tag(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|(k, m)| format!("{k}={m}")).collect();
        format!("<{}>", parts.join(", "))
    }
}

impl fmt::Display for IntrinsicState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    Micro,
    Macro,
}

/// A particle `⟨x, λ_i⟩` with its `m`/`M` predicates. Exactly one predicate
/// holding is an axiom (D6), so both are stored and checked.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Particle {
    pub x: IntrinsicState,
    pub lam: HiddenValue,
    pub micro: bool,
    pub macro_: bool,
}

impl Particle {
    pub fn new(x: IntrinsicState, lam: HiddenValue, scale: Scale) -> Self {
        Particle {
            x,
            lam,
            micro: scale == Scale::Micro,
            macro_: scale == Scale::Macro,
        }
    }

    pub fn scale(&self) -> Option<Scale> {
        match (self.micro, self.macro_) {
            (true, false) => Some(Scale::Micro),
            (false, true) => Some(Scale::Macro),
            _ => None,
        }
    }
}

/// Physical indistinguishability `≐`: same intrinsic state.
pub fn phys_indist(p: &Particle, q: &Particle) -> bool {
    p.x == q.x
}

/// Ontological indistinguishability: equality of the pairs `⟨x, λ⟩`.
pub fn onto_indist(p: &Particle, q: &Particle) -> bool {
    p.x == q.x && p.lam == q.lam
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoSystem {
    lambda: Vec<HiddenValue>,
    intrinsic_pool: Vec<IntrinsicState>,
    particles: Vec<Particle>,
}

impl DoSystem {
    /// `lambda[i - 1]` is `λ_i`. Rejects an empty labelling, repeated entries
    /// of the pool and repeated particles (the pool and `P` are sets).
    pub fn new(
        lambda: Vec<HiddenValue>,
        intrinsic_pool: Vec<IntrinsicState>,
        particles: Vec<Particle>,
    ) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::validation("n must be a positive integer"));
        }
        let mut seen = HashSet::new();
        if let Some(x) = intrinsic_pool.iter().find(|x| !seen.insert(*x)) {
            return Err(Error::validation(format!("X lists {x} twice")));
        }
        let mut seen = HashSet::new();
        if let Some((i, p)) = particles
            .iter()
            .enumerate()
            .find(|(_, p)| !seen.insert((&p.x, &p.lam)))
        {
            return Err(Error::validation(format!(
                "P lists the particle ⟨{}, {}⟩ twice (entry {i})",
                p.x, p.lam
            )));
        }
        Ok(DoSystem {
            lambda,
            intrinsic_pool,
            particles,
        })
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[HiddenValue] {
        &self.lambda
    }

    pub fn intrinsic_pool(&self) -> &[IntrinsicState] {
        &self.intrinsic_pool
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    /// Indices of all particles physically indistinguishable from particle `i`.
    pub fn pdot_class_indices(&self, i: usize) -> Result<Vec<usize>> {
        let p = self
            .particles
            .get(i)
            .ok_or_else(|| Error::validation(format!("no particle with index {i}")))?;
        Ok(self
            .particles
            .iter()
            .enumerate()
            .filter(|(_, q)| phys_indist(p, q))
            .map(|(j, _)| j)
            .collect())
    }

    /// The maximal `≐`-class containing `p`.
    pub fn pdot_class(&self, p: &Particle) -> Result<Vec<&Particle>> {
        if !self.particles.contains(p) {
            return Err(Error::validation("particle is not in the system"));
        }
        Ok(self
            .particles
            .iter()
            .filter(|q| phys_indist(p, q))
            .collect())
    }

    /// `A ≐ B`: every cross pair is physically indistinguishable and the two
    /// collections have the same cardinality.
    pub fn set_phys_indist(&self, a: &[&Particle], b: &[&Particle]) -> Result<bool> {
        if let Some(p) = a.iter().chain(b).find(|p| !self.particles.contains(p)) {
            return Err(Error::validation(format!(
                "particle ⟨{}, {}⟩ is not in the system",
                p.x, p.lam
            )));
        }
        let cross = a.iter().all(|p| b.iter().all(|q| phys_indist(p, q)));
        Ok(cross && a.len() == b.len())
    }

    pub fn check(&self, axiom: DAxiom) -> AxiomVerdict {
        match axiom {
            DAxiom::D1 => self.check_d1(),
            DAxiom::D2 => self.check_d2(),
            DAxiom::D3 => self.check_d3(),
            DAxiom::D4 => self.check_d4(),
            DAxiom::D5 => self.check_d5(),
            DAxiom::D6 => self.check_d6(),
        }
    }

    pub fn check_all(&self) -> Vec<AxiomVerdict> {
        DAxiom::ALL.iter().map(|&a| self.check(a)).collect()
    }

    /// `λ` is injective; on success also records `#Λ_N = #N`.
    pub fn check_d1(&self) -> AxiomVerdict {
        let mut first: HashMap<&HiddenValue, usize> = HashMap::new();
        for (i, v) in self.lambda.iter().enumerate() {
            if let Some(&j) = first.get(v) {
                return AxiomVerdict::violated(DAxiom::D1, DWitness::Labels(j + 1, i + 1));
            }
            first.insert(v, i);
        }
        let images: BTreeSet<&HiddenValue> = self.lambda.iter().collect();
        debug_assert_eq!(images.len(), self.n());
        AxiomVerdict::holds(DAxiom::D1, format!("#Λ_N = #N = {}", images.len()))
    }

    /// `P ⊆ X × Λ_N`; reports whether the inclusion is strict.
    pub fn check_d2(&self) -> AxiomVerdict {
        let images: HashSet<&HiddenValue> = self.lambda.iter().collect();
        let pool: HashSet<&IntrinsicState> = self.intrinsic_pool.iter().collect();
        if let Some(i) = self
            .particles
            .iter()
            .position(|p| !pool.contains(&p.x) || !images.contains(&p.lam))
        {
            return AxiomVerdict::violated(DAxiom::D2, DWitness::Particle(i));
        }
        let product = pool.len() * images.len();
        let note = if self.particles.len() < product {
            format!(
                "P is a proper subset of X × Λ_N ({} of {product} pairs)",
                self.particles.len()
            )
        } else {
            format!("P equals X × Λ_N ({product} pairs); the inclusion is not strict")
        };
        AxiomVerdict::holds(DAxiom::D2, note)
    }

    /// Two particles with the same hidden value have the same state, hence
    /// are the same particle.
    pub fn check_d3(&self) -> AxiomVerdict {
        match self.find_pair(|p, q| p.lam == q.lam && p.x != q.x) {
            Some((i, j)) => AxiomVerdict::violated(DAxiom::D3, DWitness::Particles(i, j)),
            None => AxiomVerdict::holds(
                DAxiom::D3,
                "no two distinct particles share a hidden value".into(),
            ),
        }
    }

    /// Physically indistinguishable macro particles are identical.
    pub fn check_d4(&self) -> AxiomVerdict {
        match self.find_pair(|p, q| p.macro_ && q.macro_ && phys_indist(p, q) && !onto_indist(p, q))
        {
            Some((i, j)) => AxiomVerdict::violated(DAxiom::D4, DWitness::Particles(i, j)),
            None => AxiomVerdict::holds(DAxiom::D4, String::new()),
        }
    }

    /// Physically indistinguishable but distinct particles are both micro.
    pub fn check_d5(&self) -> AxiomVerdict {
        match self
            .find_pair(|p, q| phys_indist(p, q) && !onto_indist(p, q) && !(p.micro && q.micro))
        {
            Some((i, j)) => AxiomVerdict::violated(DAxiom::D5, DWitness::Particles(i, j)),
            None => AxiomVerdict::holds(DAxiom::D5, String::new()),
        }
    }

    /// Each particle is micro or macro, not both.
    pub fn check_d6(&self) -> AxiomVerdict {
        match self.particles.iter().position(|p| p.micro == p.macro_) {
            Some(i) => AxiomVerdict::violated(DAxiom::D6, DWitness::Particle(i)),
            None => AxiomVerdict::holds(DAxiom::D6, String::new()),
        }
    }

    fn find_pair(&self, bad: impl Fn(&Particle, &Particle) -> bool) -> Option<(usize, usize)> {
        let ps = &self.particles;
        (0..ps.len())
            .flat_map(|i| (0..ps.len()).map(move |j| (i, j)))
            .find(|&(i, j)| bad(&ps[i], &ps[j]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DAxiom {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
}

impl DAxiom {
    pub const ALL: [DAxiom; 6] = [
        DAxiom::D1,
        DAxiom::D2,
        DAxiom::D3,
        DAxiom::D4,
        DAxiom::D5,
        DAxiom::D6,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        DAxiom::ALL
            .into_iter()
            .find(|a| a.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::validation(format!("unknown axiom `{s}` (expected D1..D6)")))
    }
}

impl fmt::Display for DAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", *self as u8 + 1)
    }
}

/// Counterexample to one of D1–D6.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DWitness {
    /// Two labels `i ≠ j` (1-based) with `λ_i = λ_j`.
    Labels(usize, usize),
    /// Index into `P`.
    Particle(usize),
    /// Two indices into `P`.
    Particles(usize, usize),
}

impl fmt::Display for DWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DWitness::Labels(i, j) => write!(f, "λ_{i} = λ_{j}"),
            DWitness::Particle(i) => write!(f, "particle P[{i}]"),
            DWitness::Particles(i, j) => write!(f, "particles P[{i}], P[{j}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomVerdict {
    pub axiom: DAxiom,
    pub holds: bool,
    pub witness: Option<DWitness>,
    pub note: String,
}

impl AxiomVerdict {
    fn holds(axiom: DAxiom, note: String) -> Self {
        AxiomVerdict {
            axiom,
            holds: true,
            witness: None,
            note,
        }
    }

    fn violated(axiom: DAxiom, witness: DWitness) -> Self {
        AxiomVerdict {
            axiom,
            holds: false,
            witness: Some(witness),
            note: String::new(),
        }
    }

    /// Re-checks the witness against `s` directly from the axiom's statement.
    /// True when the witness is a genuine counterexample.
    pub fn recheck(&self, s: &DoSystem) -> bool {
        let ps = &s.particles;
        match (self.axiom, self.witness) {
            (DAxiom::D1, Some(DWitness::Labels(i, j))) => {
                i != j
                    && (1..=s.n()).contains(&i)
                    && (1..=s.n()).contains(&j)
                    && s.lambda[i - 1] == s.lambda[j - 1]
            }
            (DAxiom::D2, Some(DWitness::Particle(i))) => ps
                .get(i)
                .is_some_and(|p| !s.intrinsic_pool.contains(&p.x) || !s.lambda.contains(&p.lam)),
            (DAxiom::D3, Some(DWitness::Particles(i, j))) => match (ps.get(i), ps.get(j)) {
                (Some(p), Some(q)) => p.lam == q.lam && p.x != q.x,
                _ => false,
            },
            (DAxiom::D4, Some(DWitness::Particles(i, j))) => match (ps.get(i), ps.get(j)) {
                (Some(p), Some(q)) => p.macro_ && q.macro_ && p.x == q.x && !onto_indist(p, q),
                _ => false,
            },
            (DAxiom::D5, Some(DWitness::Particles(i, j))) => match (ps.get(i), ps.get(j)) {
                (Some(p), Some(q)) => p.x == q.x && !onto_indist(p, q) && !(p.micro && q.micro),
                _ => false,
            },
            (DAxiom::D6, Some(DWitness::Particle(i))) => {
                ps.get(i).is_some_and(|p| !(p.micro ^ p.macro_))
            }
            _ => false,
        }
    }
}

impl fmt::Display for AxiomVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.witness, self.holds) {
            (_, true) if self.note.is_empty() => write!(f, "{}: holds", self.axiom),
            (_, true) => write!(f, "{}: holds ({})", self.axiom, self.note),
            (Some(w), false) => write!(f, "{}: violated by {w}", self.axiom),
            (None, false) => write!(f, "{}: violated", self.axiom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpretError {
    #[error("system is not a D_O-system: {0}")]
    Axiom(Box<AxiomVerdict>),
    #[error(transparent)]
    Universe(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterpretOptions {
    /// Classes with at most this many particles get their power quasi-set
    /// materialized.
    pub max_power_class: usize,
}

impl Default for InterpretOptions {
    fn default() -> Self {
        InterpretOptions { max_power_class: 3 }
    }
}

/// Name of the atom interpreting particle `i` (0-based).
pub fn particle_atom_name(i: usize) -> String {
    format!("p{}", i + 1)
}

/// Translates a D_O-system into a quasi-set universe.
///
/// | quasi-set theory | D_O-system |
/// |---|---|
/// | Urelemente | elements of `P` |
/// | m-atom / M-atom | `m(p)` / `M(p)` |
/// | `p ≡ q` | `p ≐ q` (species tag = intrinsic state) |
/// | `p =E q` | `p = q` (handle identity) |
/// | `qc(x)` | `card(x)` |
///
/// Besides the atoms, the universe holds every `≐`-class `p_≐` as a
/// quasi-set (named `p<i>_dot` after its first particle), the weak pair of
/// every two classes (`wp_p<i>_p<j>`) and the power quasi-set of each class of
/// at most `max_power_class` particles (`P_p<i>_dot`).
pub fn interpret(s: &DoSystem, opts: InterpretOptions) -> Result<Universe, InterpretError> {
    if let Some(v) = s.check_all().into_iter().find(|v| !v.holds) {
        return Err(InterpretError::Axiom(Box::new(v)));
    }
    let mut b = UniverseBuilder::new();
    let mut atoms = Vec::with_capacity(s.particles.len());
    for (i, p) in s.particles.iter().enumerate() {
        let sort = match p.scale() {
            Some(Scale::Micro) => AtomSort::Micro,
            _ => AtomSort::Macro,
        };
        atoms.push(b.add_atom(particle_atom_name(i), sort, Species::new(p.x.tag()))?);
    }
    let mut classes: Vec<(usize, Vec<EntityHandle>, EntityHandle)> = Vec::new();
    let mut done = vec![false; s.particles.len()];
    for i in 0..s.particles.len() {
        if done[i] {
            continue;
        }
        let members = s.pdot_class_indices(i)?;
        for &j in &members {
            done[j] = true;
        }
        let handles: Vec<EntityHandle> = members.iter().map(|&j| atoms[j]).collect();
        let zfu = !s.particles[i].micro;
        let q = b.add_qset(
            format!("{}_dot", particle_atom_name(i)),
            handles.clone(),
            zfu,
        )?;
        classes.push((i, handles, q));
    }
    for (a, (i, ca, _)) in classes.iter().enumerate() {
        for (j, cb, _) in &classes[a + 1..] {
            let members: Vec<EntityHandle> = ca.iter().chain(cb).copied().collect();
            let zfu = !s.particles[*i].micro && !s.particles[*j].micro;
            b.add_qset(
                format!("wp_{}_{}", particle_atom_name(*i), particle_atom_name(*j)),
                members,
                zfu,
            )?;
        }
    }
    for (i, members, _) in &classes {
        if members.len() > opts.max_power_class {
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
        let zfu = !s.particles[*i].micro;
        b.add_qset(format!("P_{}_dot", particle_atom_name(*i)), subs, zfu)?;
    }
    Ok(b.build())
}

/// Parameters for [`gen_do`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    /// Number of distinct intrinsic states available.
    pub species_count: usize,
    /// Share of micro particles, rounded to the nearest count.
    pub micro_fraction: f64,
    pub seed: u64,
}

/// Random D_O-system satisfying D1–D6 by construction: hidden values are
/// distinct rationals, each macro particle gets a state of its own, and micro
/// particles draw from the remaining states.
pub fn gen_do(cfg: GenConfig) -> Result<DoSystem> {
    if cfg.n == 0 {
        return Err(Error::validation("n must be at least 1"));
    }
    if !(0.0..=1.0).contains(&cfg.micro_fraction) {
        return Err(Error::validation(format!(
            "micro fraction {} is outside [0, 1]",
            cfg.micro_fraction
        )));
    }
    let micro = (cfg.n as f64 * cfg.micro_fraction).round() as usize;
    let macro_count = cfg.n - micro;
    let needed = macro_count + usize::from(micro > 0);
    if needed > cfg.species_count {
        return Err(Error::validation(format!(
            "{macro_count} macro particles{} need {needed} distinct intrinsic states, only {} available",
            if micro > 0 { " plus the micro ones" } else { "" },
            cfg.species_count
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut pool = Vec::with_capacity(cfg.species_count);
    let mut seen = HashSet::new();
    while pool.len() < cfg.species_count {
        let state = random_state(&mut rng);
        if seen.insert(state.clone()) {
            pool.push(state);
        }
    }

    let mut lambda = Vec::with_capacity(cfg.n);
    let mut seen = HashSet::new();
    while lambda.len() < cfg.n {
        let v = HiddenValue(BigRational::new(
            BigInt::from(rng.gen_range(-1000i64..=1000)),
            BigInt::from(rng.gen_range(1i64..=64)),
        ));
        if seen.insert(v.clone()) {
            lambda.push(v);
        }
    }
    let mut labels: Vec<usize> = (0..cfg.n).collect();
    labels.shuffle(&mut rng);

    let micro_states = cfg.species_count - macro_count;
    let mut particles = Vec::with_capacity(cfg.n);
    for (k, &label) in labels.iter().enumerate() {
        let (x, scale) = if k < macro_count {
            (pool[micro_states + k].clone(), Scale::Macro)
        } else {
            (pool[rng.gen_range(0..micro_states)].clone(), Scale::Micro)
        };
        particles.push(Particle::new(x, lambda[label].clone(), scale));
    }
    DoSystem::new(lambda, pool, particles)
}

fn random_state(rng: &mut impl Rng) -> IntrinsicState {
    let ratio = |rng: &mut dyn rand::RngCore, lo: i64, hi: i64, den: i64| {
        BigRational::new(BigInt::from(rng.gen_range(lo..=hi)), BigInt::from(den))
    };
    let components = [
        ("mass", ratio(rng, 1, 2000, 2), "MeV"),
        ("charge", ratio(rng, -3, 3, 3), "e"),
        ("spin", ratio(rng, 0, 4, 2), "hbar"),
    ];
    IntrinsicState::new(components.into_iter().map(|(k, value, unit)| {
        (
            k.to_string(),
            Magnitude {
                value,
                unit: unit.to_string(),
            },
        )
    }))
    .expect("distinct property names")
}
