//! Evaluation of formulas over a finite universe by exhaustive quantification.
//!
//! `forall`/`exists` range over every entity, `forallQ`/`existsQ`/`existsQ!`
//! over quasi-sets only. Connectives short-circuit left to right.
//!
//! A quantifier whose body has the shape `v in w -> ...` (universal) or
//! `v in w & ...` (existential) only visits the members of `w`; every other
//! entity satisfies the universal and falsifies the existential trivially, so
//! the verdict is the same as for a full scan.

use std::collections::BTreeMap;

use super::ast::{EntityPred, Formula, Func, NumTerm, Quantifier};
use crate::error::{Error, Result, Span};
use crate::universe::{EntityHandle, ExtEq, Extension, Universe};

/// Assignment of entities to the free variables of a formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation(BTreeMap<String, EntityHandle>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: impl Into<String>, h: EntityHandle) -> Self {
        self.0.insert(var.into(), h);
        self
    }

    pub fn insert(&mut self, var: impl Into<String>, h: EntityHandle) {
        self.0.insert(var.into(), h);
    }

    pub fn get(&self, var: &str) -> Option<EntityHandle> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, EntityHandle)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl<S: Into<String>> FromIterator<(S, EntityHandle)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (S, EntityHandle)>>(iter: I) -> Self {
        Valuation(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

pub fn evaluate(u: &Universe, f: &Formula, v: &Valuation) -> Result<bool> {
    for var in f.free_vars() {
        match v.get(&var) {
            Some(h) => {
                u.entity(h)?;
            }
            None => return Err(Error::UnboundVariable(var)),
        }
    }
    let mut ev = Evaluator {
        u,
        env: v.iter().collect(),
    };
    ev.eval(f)
}

struct Evaluator<'u, 'f> {
    u: &'u Universe,
    env: Vec<(&'f str, EntityHandle)>,
}

impl<'f> Evaluator<'_, 'f> {
    fn lookup(&self, var: &str) -> Result<EntityHandle> {
        self.env
            .iter()
            .rev()
            .find(|(name, _)| *name == var)
            .map(|(_, h)| *h)
            .ok_or_else(|| Error::UnboundVariable(var.to_string()))
    }

    fn eval(&mut self, f: &'f Formula) -> Result<bool> {
        match f {
            Formula::Pred(p, v) => {
                let e = self.u.entity(self.lookup(v)?)?;
                Ok(match p {
                    EntityPred::Micro => e.is_micro(),
                    EntityPred::Macro => e.is_macro(),
                    EntityPred::Zfu => e.as_qset().is_some_and(|q| q.is_zfu_set()),
                    EntityPred::QSet => e.is_qset(),
                })
            }
            Formula::Cardinal(n) => self.num(n).map(|_| true),
            Formula::Indist(a, b) => self.u.indist(self.lookup(a)?, self.lookup(b)?),
            Formula::Member(t, x) => self.u.is_member(self.lookup(t)?, self.lookup(x)?),
            Formula::ExtEq { lhs, rhs, span } => {
                match self.u.ext_eq(self.lookup(lhs)?, self.lookup(rhs)?)? {
                    ExtEq::Equal => Ok(true),
                    ExtEq::Distinct => Ok(false),
                    ExtEq::NotApplicable(h) => Err(not_applicable(self.u, lhs, rhs, h, *span)),
                }
            }
            Formula::NumEq(a, b) => Ok(self.num(a)? == self.num(b)?),
            Formula::Le(a, b) => Ok(self.num(a)? <= self.num(b)?),
            Formula::Not(a) => Ok(!self.eval(a)?),
            Formula::And(a, b) => Ok(self.eval(a)? && self.eval(b)?),
            Formula::Or(a, b) => Ok(self.eval(a)? || self.eval(b)?),
            Formula::Implies(a, b) => Ok(!self.eval(a)? || self.eval(b)?),
            Formula::Iff(a, b) => Ok(self.eval(a)? == self.eval(b)?),
            Formula::Quant {
                quantifier,
                vars,
                body,
            } => self.quantified(*quantifier, vars, body),
        }
    }

    fn quantified(&mut self, q: Quantifier, vars: &'f [String], body: &'f Formula) -> Result<bool> {
        let Some((var, rest)) = vars.split_first() else {
            return self.eval(body);
        };
        if q == Quantifier::ExistsQUnique {
            return self.unique(var, rest, body);
        }
        let domain = self.domain(q, var, rest.is_empty(), body)?;
        let universal = q.is_universal();
        for h in domain {
            self.env.push((var.as_str(), h));
            let r = self.quantified(q, rest, body);
            self.env.pop();
            if r? != universal {
                return Ok(!universal);
            }
        }
        Ok(universal)
    }

    fn unique(&mut self, var: &'f str, rest: &'f [String], body: &'f Formula) -> Result<bool> {
        let mut first: Option<EntityHandle> = None;
        for h in self.u.qset_handles().collect::<Vec<_>>() {
            self.env.push((var, h));
            let r = self.quantified(Quantifier::ExistsQ, rest, body);
            self.env.pop();
            if r? {
                match first {
                    None => first = Some(h),
                    Some(f) if self.u.ext_eq(f, h)? != ExtEq::Equal => return Ok(false),
                    Some(_) => {}
                }
            }
        }
        Ok(first.is_some())
    }

    fn domain(
        &self,
        q: Quantifier,
        var: &str,
        innermost: bool,
        body: &Formula,
    ) -> Result<Vec<EntityHandle>> {
        let guard = match (q.is_universal(), body) {
            (true, Formula::Implies(g, _)) | (false, Formula::And(g, _)) => match g.as_ref() {
                Formula::Member(t, w) if innermost && t == var && w != var => Some(w),
                _ => None,
            },
            _ => None,
        };
        let candidates: Vec<EntityHandle> = match guard {
            Some(w) => {
                let w = self.lookup(w)?;
                match self.u.entity(w)?.as_qset() {
                    Some(qs) => qs.members().to_vec(),
                    None => Vec::new(),
                }
            }
            None => self.u.handles().collect(),
        };
        if q.is_relativized() {
            Ok(candidates
                .into_iter()
                .filter(|h| self.u.entities()[h.index()].is_qset())
                .collect())
        } else {
            Ok(candidates)
        }
    }

    fn num(&self, n: &NumTerm) -> Result<u64> {
        match n {
            NumTerm::Lit(k) => Ok(*k),
            NumTerm::Apply(Func::Qc, v) => Ok(self.u.qc(self.lookup(v)?)?.value()),
            NumTerm::Apply(Func::Card, v) => self.u.card(self.lookup(v)?),
            NumTerm::Pow { base, exp } => {
                let e = self.num(exp)?;
                u32::try_from(e)
                    .ok()
                    .and_then(|e| base.checked_pow(e))
                    .ok_or_else(|| Error::Resource {
                        what: format!("numeric value of `{n}`"),
                        limit: u64::MAX,
                    })
            }
        }
    }
}

fn not_applicable(u: &Universe, lhs: &str, rhs: &str, h: EntityHandle, span: Span) -> Error {
    Error::Sort {
        span,
        message: format!(
            "`{lhs} =E {rhs}` applied to m-atom `{}`; extensional equality is not defined for m-atoms",
            u.name(h)
        ),
    }
}

/// Sort of a variable as far as it can be known before evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSort {
    MicroAtom,
    MacroAtom,
    QSet,
}

/// Static sort check: rejects `=E` on a variable declared (or bound by a
/// relativized quantifier) as an m-atom.
pub fn check_sorts(f: &Formula, declared: &BTreeMap<String, VarSort>) -> Result<()> {
    let mut env: Vec<(&str, Option<VarSort>)> = declared
        .iter()
        .map(|(k, v)| (k.as_str(), Some(*v)))
        .collect();
    check_sorts_in(f, &mut env)
}

fn check_sorts_in<'a>(f: &'a Formula, env: &mut Vec<(&'a str, Option<VarSort>)>) -> Result<()> {
    let sort_of = |env: &Vec<(&str, Option<VarSort>)>, v: &str| {
        env.iter()
            .rev()
            .find(|(n, _)| *n == v)
            .and_then(|(_, s)| *s)
    };
    match f {
        Formula::ExtEq { lhs, rhs, span } => {
            for v in [lhs, rhs] {
                if sort_of(env, v) == Some(VarSort::MicroAtom) {
                    return Err(Error::Sort {
                        span: *span,
                        message: format!(
                            "`{lhs} =E {rhs}`: `{v}` is an m-atom; extensional equality is not defined for m-atoms"
                        ),
                    });
                }
            }
            Ok(())
        }
        Formula::Not(a) => check_sorts_in(a, env),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_sorts_in(a, env)?;
            check_sorts_in(b, env)
        }
        Formula::Quant {
            quantifier,
            vars,
            body,
        } => {
            let depth = env.len();
            let sort = quantifier.is_relativized().then_some(VarSort::QSet);
            env.extend(vars.iter().map(|v| (v.as_str(), sort)));
            let r = check_sorts_in(body, env);
            env.truncate(depth);
            r
        }
        _ => Ok(()),
    }
}

/// Separation `[t ∈ x : α(t)]` for a formula with exactly one free variable.
pub fn separation(u: &Universe, x: EntityHandle, alpha: &Formula) -> Result<Extension> {
    let free = alpha.free_vars();
    if free.len() != 1 {
        return Err(Error::validation(format!(
            "separation formula must have exactly one free variable, `{alpha}` has {}",
            free.len()
        )));
    }
    let var = free.into_iter().next().expect("one free variable");
    separation_with(u, x, alpha, &var, &Valuation::new())
}

/// Separation with the filtered variable named explicitly; the remaining free
/// variables of `alpha` (parameters such as a fixed atom `c`) come from
/// `params`.
pub fn separation_with(
    u: &Universe,
    x: EntityHandle,
    alpha: &Formula,
    var: &str,
    params: &Valuation,
) -> Result<Extension> {
    let members = u.members(x)?.to_vec();
    let mut kept = Vec::new();
    for t in members {
        let v = params.clone().bind(var, t);
        if evaluate(u, alpha, &v)? {
            kept.push(t);
        }
    }
    Ok(u.extend_with(kept))
}
