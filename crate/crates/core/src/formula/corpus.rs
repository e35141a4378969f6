//! The named axiom corpus and its constructive checkers.
//!
//! Universal quantifiers range over the quasi-sets and entities of the input
//! universe. Existential claims are discharged by building the witness with a
//! universe operation and evaluating the axiom's matrix, as a formula, on the
//! universe extended with that witness.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use super::ast::{Formula, Quantifier};
use super::eval::{evaluate, separation_with, Valuation};
use super::parser::parse;
use crate::error::{Error, Result};
use crate::universe::{
    EntityHandle, QuasiCardinal, Universe, UniverseBuilder, DEFAULT_POWER_BOUND,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    WeakPair,
    Separation,
    QuasiCardinality,
    SubqsetCardinals,
    PowerQset,
    WeakExtensionality,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::WeakPair,
        Axiom::Separation,
        Axiom::QuasiCardinality,
        Axiom::SubqsetCardinals,
        Axiom::PowerQset,
        Axiom::WeakExtensionality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::WeakPair => "weak_pair",
            Axiom::Separation => "separation",
            Axiom::QuasiCardinality => "quasi_cardinality",
            Axiom::SubqsetCardinals => "subqset_cardinals",
            Axiom::PowerQset => "power_qset",
            Axiom::WeakExtensionality => "weak_extensionality",
        }
    }

    /// The axiom as a closed formula in the ASCII syntax. Separation is a
    /// schema and is shown with `alpha(t)` spelled as the stock `m(t)`
    /// instance.
    pub fn statement(self) -> &'static str {
        match self {
            Axiom::WeakPair => "forall x forall y existsQ z forall t (t in z <-> (t == x | t == y))",
            Axiom::Separation => {
                "forallQ x existsQ y forall t (t in y <-> (t in x & m(t)))"
            }
            Axiom::QuasiCardinality => "forallQ x (Cd(qc(x)) & (Z(x) -> qc(x) =E card(x)))",
            Axiom::SubqsetCardinals => {
                "forallQ x existsQ y ((forall t (t in y -> t in x)) & qc(y) <= qc(x))"
            }
            Axiom::PowerQset => "forallQ x existsQ p ((forall s (s in p -> Q(s) & forall t (t in s -> t in x))) & qc(p) =E 2^qc(x))",
            Axiom::WeakExtensionality => WEAK_EXT_STATEMENT,
        }
    }
}

// `qx` and `qy` stand for the quotients x/≡ and y/≡, which the checker binds
// explicitly since the language has no term for them.
const WEAK_EXT_STATEMENT: &str = "forallQ x forallQ y ((forall z (z in qx -> exists w (w in qy & (forall a (a in z -> forall b (b in w -> a == b))) & qc(z) =E qc(w)))) & (forall w (w in qy -> exists z (z in qx & (forall a (a in w -> forall b (b in z -> a == b))) & qc(w) =E qc(z)))) -> x == y)";

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::validation(format!("unknown axiom `{s}`")))
    }
}

/// A separation instance: the filtered variable and its formula. Other free
/// variables are bound to each atom class representative in turn.
#[derive(Debug, Clone)]
pub struct SeparationInstance {
    pub var: String,
    pub alpha: Formula,
}

impl SeparationInstance {
    pub fn parse(var: &str, src: &str) -> Result<Self> {
        Ok(SeparationInstance {
            var: var.to_string(),
            alpha: parse(src)?,
        })
    }

    /// `m(t)`, `M(t)` and `t == c`.
    pub fn stock() -> Vec<SeparationInstance> {
        ["m(t)", "M(t)", "t == c"]
            .into_iter()
            .map(|s| SeparationInstance::parse("t", s).expect("stock formula parses"))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct CorpusOptions {
    /// Largest quasi-cardinal whose power quasi-set is built.
    pub power_bound: usize,
    pub separation: Vec<SeparationInstance>,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            power_bound: DEFAULT_POWER_BOUND,
            separation: SeparationInstance::stock(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub instance: String,
    pub qset: EntityHandle,
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub instances: usize,
    pub witnesses: Vec<Witness>,
    pub violations: Vec<String>,
    /// Input universe extended with every witness; witness handles refer here.
    pub universe: Universe,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_axiom(u: &Universe, axiom: Axiom, opts: &CorpusOptions) -> Result<AxiomReport> {
    match axiom {
        Axiom::WeakPair => check_weak_pair(u),
        Axiom::Separation => check_separation(u, &opts.separation),
        Axiom::QuasiCardinality => check_quasi_cardinality(u),
        Axiom::SubqsetCardinals => check_subqset_cardinals(u),
        Axiom::PowerQset => check_power_qset(u, opts.power_bound),
        Axiom::WeakExtensionality => check_weak_extensionality(u),
    }
}

pub fn check_all(u: &Universe, opts: &CorpusOptions) -> Result<Vec<AxiomReport>> {
    Axiom::ALL
        .iter()
        .map(|&a| check_axiom(u, a, opts))
        .collect()
}

struct Tally {
    axiom: Axiom,
    instances: usize,
    witnesses: Vec<Witness>,
    violations: Vec<String>,
}

impl Tally {
    fn new(axiom: Axiom) -> Self {
        Tally {
            axiom,
            instances: 0,
            witnesses: Vec::new(),
            violations: Vec::new(),
        }
    }

    fn record(&mut self, holds: bool, instance: String, qset: EntityHandle) {
        self.instances += 1;
        if holds {
            self.witnesses.push(Witness { instance, qset });
        } else {
            self.violations.push(instance);
        }
    }

    fn finish(self, universe: Universe) -> AxiomReport {
        AxiomReport {
            axiom: self.axiom,
            instances: self.instances,
            witnesses: self.witnesses,
            violations: self.violations,
            universe,
        }
    }
}

fn formula(src: &str) -> Formula {
    parse(src).unwrap_or_else(|e| panic!("built-in formula `{src}` does not parse: {e}"))
}

/// One representative per `≡`-class, in handle order.
fn class_representatives(
    u: &Universe,
    handles: impl Iterator<Item = EntityHandle>,
) -> Vec<EntityHandle> {
    let mut seen = HashSet::new();
    handles
        .filter(|h| seen.insert(u.class_id(*h).expect("handle from this universe")))
        .collect()
}

// `t ≡ x ∨ t ≡ y` depends only on the classes of x and y, so one witness per
// unordered pair of classes serves every pair of entities. A witness either
// already exists or opens a new class, so adding witnesses never changes the
// weak pair of another class pair.
fn check_weak_pair(u: &Universe) -> Result<AxiomReport> {
    let reps = class_representatives(u, u.handles());
    let mut b = UniverseBuilder::from_universe(u.clone());
    let mut cases = Vec::new();
    for (i, &x) in reps.iter().enumerate() {
        for &y in &reps[i..] {
            let members = u.weak_pair_members(x, y)?;
            cases.push((x, y, b.derive_qset(members)));
        }
    }
    let ext = b.build();
    let matrix = formula("forall t (t in z <-> (t == x | t == y))");
    let mut tally = Tally::new(Axiom::WeakPair);
    for (x, y, z) in cases {
        let v = Valuation::new().bind("x", x).bind("y", y).bind("z", z);
        let holds = evaluate(&ext, &matrix, &v)?;
        tally.record(holds, format!("x = {}, y = {}", u.name(x), u.name(y)), z);
    }
    Ok(tally.finish(ext))
}

fn check_separation(u: &Universe, instances: &[SeparationInstance]) -> Result<AxiomReport> {
    let atom_reps = class_representatives(u, u.atom_handles());
    let qsets: Vec<EntityHandle> = u.qset_handles().collect();
    let mut ext = u.clone();
    let mut tally = Tally::new(Axiom::Separation);
    for inst in instances {
        let params: Vec<String> = inst
            .alpha
            .free_vars()
            .into_iter()
            .filter(|v| *v != inst.var)
            .collect();
        if params.len() > 1 {
            return Err(Error::validation(format!(
                "separation formula `{}` may have at most one parameter besides `{}`",
                inst.alpha, inst.var
            )));
        }
        let bindings: Vec<Valuation> = match params.first() {
            None => vec![Valuation::new()],
            Some(p) => atom_reps
                .iter()
                .map(|&c| Valuation::new().bind(p.clone(), c))
                .collect(),
        };
        let (sv, xv) = fresh_pair(&inst.alpha);
        let matrix = Formula::and(
            Formula::quant(
                Quantifier::Forall,
                inst.var.clone(),
                Formula::implies(
                    Formula::member(inst.var.clone(), sv.clone()),
                    Formula::and(
                        Formula::member(inst.var.clone(), xv.clone()),
                        inst.alpha.clone(),
                    ),
                ),
            ),
            Formula::quant(
                Quantifier::Forall,
                inst.var.clone(),
                Formula::implies(
                    Formula::member(inst.var.clone(), xv.clone()),
                    Formula::implies(
                        inst.alpha.clone(),
                        Formula::member(inst.var.clone(), sv.clone()),
                    ),
                ),
            ),
        );
        // Quantifier-free instances do not depend on which entities exist, so
        // their witnesses can share one extension.
        let shared = inst.alpha.is_quantifier_free();
        for params in &bindings {
            for &x in &qsets {
                let base = if shared { &ext } else { u };
                let w = separation_with(base, x, &inst.alpha, &inst.var, params)?;
                let v = params.clone().bind(sv.clone(), w.qset).bind(xv.clone(), x);
                let holds = evaluate(&w.universe, &matrix, &v)?;
                let label = params
                    .iter()
                    .map(|(k, h)| format!(", {k} = {}", u.name(h)))
                    .collect::<String>();
                tally.record(
                    holds,
                    format!("alpha = `{}`, x = {}{label}", inst.alpha, u.name(x)),
                    w.qset,
                );
                if shared {
                    ext = w.universe;
                }
            }
        }
    }
    Ok(tally.finish(ext))
}

// Variable names for the witness and the source qset that do not clash with
// the variables of `alpha`.
fn fresh_pair(alpha: &Formula) -> (String, String) {
    let text = alpha.to_string();
    let mut s = String::from("sep_s");
    let mut x = String::from("sep_x");
    while text.contains(&s) || text.contains(&x) {
        s.push('\'');
        x.push('\'');
    }
    (s, x)
}

fn check_quasi_cardinality(u: &Universe) -> Result<AxiomReport> {
    let matrix = formula("Cd(qc(x)) & (Z(x) -> qc(x) =E card(x))");
    let mut tally = Tally::new(Axiom::QuasiCardinality);
    for x in u.qset_handles() {
        let v = Valuation::new().bind("x", x);
        let counted = u.members(x)?.iter().collect::<HashSet<_>>().len() as u64;
        let holds = evaluate(u, &matrix, &v)? && u.qc(x)?.value() == counted;
        tally.record(holds, format!("x = {}", u.name(x)), x);
    }
    Ok(tally.finish(u.clone()))
}

fn check_subqset_cardinals(u: &Universe) -> Result<AxiomReport> {
    let qsets: Vec<EntityHandle> = u.qset_handles().collect();
    let mut ext = u.clone();
    let mut cases = Vec::new();
    for &x in &qsets {
        let alpha = u.qc(x)?.value();
        for beta in 0..=alpha {
            let w = ext.sub_qset_of_card(x, QuasiCardinal(beta))?;
            ext = w.universe;
            cases.push((x, beta, w.qset));
        }
    }
    let mut templates: BTreeMap<u64, Formula> = BTreeMap::new();
    let mut tally = Tally::new(Axiom::SubqsetCardinals);
    for (x, beta, y) in cases {
        let matrix = templates.entry(beta).or_insert_with(|| {
            formula(&format!(
                "Q(y) & (forall t (t in y -> t in x)) & qc(y) =E {beta}"
            ))
        });
        let v = Valuation::new().bind("x", x).bind("y", y);
        let holds = evaluate(&ext, matrix, &v)?;
        tally.record(holds, format!("x = {}, beta = {beta}", u.name(x)), y);
    }
    Ok(tally.finish(ext))
}

fn check_power_qset(u: &Universe, bound: usize) -> Result<AxiomReport> {
    let qsets: Vec<EntityHandle> = u.qset_handles().collect();
    let mut ext = u.clone();
    let mut cases = Vec::new();
    for &x in &qsets {
        let p = ext.power_qset(x, bound).map_err(|e| match e {
            Error::Resource { what, limit } => Error::Resource {
                what: format!("{} axiom: {what}", Axiom::PowerQset),
                limit,
            },
            other => other,
        })?;
        ext = p.universe;
        cases.push((x, p.qset));
    }
    let matrix = formula(
        "Q(p) & qc(p) =E 2^qc(x) & forall s (s in p -> (Q(s) & forall t (t in s -> t in x)))",
    );
    let mut tally = Tally::new(Axiom::PowerQset);
    for (x, p) in cases {
        let v = Valuation::new().bind("x", x).bind("p", p);
        let subs = ext.members(p)?;
        let distinct: HashSet<&[EntityHandle]> = subs
            .iter()
            .map(|s| ext.members(*s))
            .collect::<Result<_>>()?;
        let holds = evaluate(&ext, &matrix, &v)? && distinct.len() == subs.len();
        tally.record(holds, format!("x = {}", u.name(x)), p);
    }
    Ok(tally.finish(ext))
}

fn check_weak_extensionality(u: &Universe) -> Result<AxiomReport> {
    let rank_one: Vec<EntityHandle> = u
        .qset_handles()
        .filter(|&x| {
            u.members(x)
                .map(|ms| ms.iter().all(|m| !u.entities()[m.index()].is_qset()))
                .unwrap_or(false)
        })
        .collect();
    let mut ext = u.clone();
    let mut quotients = Vec::with_capacity(rank_one.len());
    for &x in &rank_one {
        let q = ext.quotient(x)?;
        ext = q.universe;
        quotients.push(q.qset);
    }
    let antecedent = formula(
        "(forall z (z in qx -> exists w (w in qy & (forall a (a in z -> forall b (b in w -> a == b))) & qc(z) =E qc(w)))) \
         & (forall w (w in qy -> exists z (z in qx & (forall a (a in w -> forall b (b in z -> a == b))) & qc(w) =E qc(z))))",
    );
    let consequent = formula("x == y");
    let mut tally = Tally::new(Axiom::WeakExtensionality);
    for (i, &x) in rank_one.iter().enumerate() {
        for (j, &y) in rank_one.iter().enumerate().skip(i) {
            let v = Valuation::new()
                .bind("x", x)
                .bind("y", y)
                .bind("qx", quotients[i])
                .bind("qy", quotients[j]);
            if evaluate(&ext, &antecedent, &v)? {
                let holds = evaluate(&ext, &consequent, &v)?;
                tally.record(
                    holds,
                    format!("x = {}, y = {}", u.name(x), u.name(y)),
                    quotients[j],
                );
            }
        }
    }
    Ok(tally.finish(ext))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::{AtomSort, Species};

    fn universe() -> Universe {
        let mut b = UniverseBuilder::new();
        let e1 = b
            .add_atom("e1", AtomSort::Micro, Species::new("e"))
            .unwrap();
        let e2 = b
            .add_atom("e2", AtomSort::Micro, Species::new("e"))
            .unwrap();
        let mu = b
            .add_atom("mu", AtomSort::Micro, Species::new("mu"))
            .unwrap();
        let c = b.add_atom("c", AtomSort::Macro, Species::new("c")).unwrap();
        b.add_qset("x", vec![e1, e2, mu, c], false).unwrap();
        b.add_qset("y", vec![e1, mu], false).unwrap();
        b.add_qset("y2", vec![e2, mu], false).unwrap();
        b.add_qset("s", vec![c], true).unwrap();
        b.build()
    }

    #[test]
    fn statements_parse_closed() {
        for a in Axiom::ALL {
            let f = parse(a.statement()).unwrap();
            if a != Axiom::WeakExtensionality {
                assert!(f.free_vars().is_empty(), "{a}");
            }
            assert_eq!(a.name().parse::<Axiom>().unwrap(), a);
        }
    }

    #[test]
    fn all_axioms_hold_on_small_universe() {
        let u = universe();
        for r in check_all(&u, &CorpusOptions::default()).unwrap() {
            assert!(r.holds(), "{}: {:?}", r.axiom, r.violations);
            assert!(r.instances > 0, "{}", r.axiom);
        }
    }

    #[test]
    fn power_qset_of_four_has_sixteen() {
        let u = universe();
        let r = check_axiom(&u, Axiom::PowerQset, &CorpusOptions::default()).unwrap();
        let w = r.witnesses.iter().find(|w| w.instance == "x = x").unwrap();
        assert_eq!(r.universe.qc(w.qset).unwrap(), QuasiCardinal(16));
    }

    #[test]
    fn power_qset_bound_is_a_resource_error() {
        let opts = CorpusOptions {
            power_bound: 3,
            ..CorpusOptions::default()
        };
        let err = check_axiom(&universe(), Axiom::PowerQset, &opts).unwrap_err();
        assert!(err.is_resource());
        assert!(err.to_string().contains("power_qset"));
    }

    #[test]
    fn weak_extensionality_detects_matching_quotients() {
        let u = universe();
        let r = check_axiom(&u, Axiom::WeakExtensionality, &CorpusOptions::default()).unwrap();
        assert!(r.holds());
        assert!(r.witnesses.iter().any(|w| w.instance == "x = y, y = y2"));
        let y = u.resolve("y").unwrap();
        let y2 = u.resolve("y2").unwrap();
        assert!(u.indist(y, y2).unwrap());
    }

    #[test]
    fn custom_separation_instance() {
        let opts = CorpusOptions {
            separation: vec![SeparationInstance::parse("t", "exists w (t in w & Z(w))").unwrap()],
            ..CorpusOptions::default()
        };
        let r = check_axiom(&universe(), Axiom::Separation, &opts).unwrap();
        assert!(r.holds(), "{:?}", r.violations);
    }
}
