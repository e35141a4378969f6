//! A deliberately naive evaluator used as an oracle for the library one. It
//! recomputes every relation from the member lists, evaluates both sides of
//! every connective and always quantifies over the whole universe.

use quasiset::formula::{EntityPred, Formula, Func, NumTerm, Quantifier};
use quasiset::{EntityHandle, Universe};

pub fn indist(u: &Universe, a: EntityHandle, b: EntityHandle) -> bool {
    let (ea, eb) = (u.entity(a).unwrap(), u.entity(b).unwrap());
    match (ea.as_qset(), eb.as_qset()) {
        (None, None) => ea.atom_sort() == eb.atom_sort() && ea.species() == eb.species(),
        (Some(x), Some(y)) => {
            let count = |set: &[EntityHandle], t: EntityHandle| {
                set.iter().filter(|&&s| indist(u, s, t)).count()
            };
            x.members()
                .iter()
                .chain(y.members())
                .all(|&t| count(x.members(), t) == count(y.members(), t))
        }
        _ => false,
    }
}

fn members(u: &Universe, x: EntityHandle) -> Vec<EntityHandle> {
    u.entity(x)
        .unwrap()
        .as_qset()
        .map(|q| q.members().to_vec())
        .unwrap_or_default()
}

fn is_qset(u: &Universe, x: EntityHandle) -> bool {
    u.entity(x).unwrap().as_qset().is_some()
}

fn reaches_micro(u: &Universe, x: EntityHandle) -> bool {
    let e = u.entity(x).unwrap();
    e.is_micro() || members(u, x).into_iter().any(|m| reaches_micro(u, m))
}

fn same_members(u: &Universe, a: EntityHandle, b: EntityHandle) -> bool {
    let (ma, mb) = (members(u, a), members(u, b));
    ma.iter().all(|m| mb.contains(m)) && mb.iter().all(|m| ma.contains(m))
}

fn ext_eq(u: &Universe, a: EntityHandle, b: EntityHandle) -> bool {
    let (ea, eb) = (u.entity(a).unwrap(), u.entity(b).unwrap());
    assert!(
        !ea.is_micro() && !eb.is_micro(),
        "reference: =E on an m-atom"
    );
    match (is_qset(u, a), is_qset(u, b)) {
        (true, true) => same_members(u, a, b),
        (false, false) => indist(u, a, b),
        _ => false,
    }
}

type Env = Vec<(String, EntityHandle)>;

fn get(env: &Env, v: &str) -> EntityHandle {
    env.iter()
        .rev()
        .find(|(n, _)| n == v)
        .map(|(_, h)| *h)
        .unwrap_or_else(|| panic!("reference: unbound `{v}`"))
}

fn num(u: &Universe, env: &Env, t: &NumTerm) -> u64 {
    match t {
        NumTerm::Lit(k) => *k,
        NumTerm::Apply(Func::Qc, v) => {
            let x = get(env, v);
            assert!(is_qset(u, x), "reference: qc of an atom");
            members(u, x).len() as u64
        }
        NumTerm::Apply(Func::Card, v) => {
            let mut ms = members(u, get(env, v));
            ms.sort();
            ms.dedup();
            ms.len() as u64
        }
        NumTerm::Pow { base, exp } => base.pow(num(u, env, exp) as u32),
    }
}

pub fn eval(u: &Universe, f: &Formula, env: &mut Env) -> bool {
    match f {
        Formula::Pred(p, v) => {
            let x = get(env, v);
            let e = u.entity(x).unwrap();
            match p {
                EntityPred::Micro => e.is_micro(),
                EntityPred::Macro => e.is_macro(),
                EntityPred::QSet => is_qset(u, x),
                EntityPred::Zfu => is_qset(u, x) && !reaches_micro(u, x),
            }
        }
        Formula::Cardinal(t) => {
            num(u, env, t);
            true
        }
        Formula::Indist(a, b) => indist(u, get(env, a), get(env, b)),
        Formula::Member(t, x) => members(u, get(env, x)).contains(&get(env, t)),
        Formula::ExtEq { lhs, rhs, .. } => ext_eq(u, get(env, lhs), get(env, rhs)),
        Formula::NumEq(a, b) => num(u, env, a) == num(u, env, b),
        Formula::Le(a, b) => num(u, env, a) <= num(u, env, b),
        Formula::Not(a) => !eval(u, a, env),
        Formula::And(a, b) => {
            let (x, y) = (eval(u, a, env), eval(u, b, env));
            x & y
        }
        Formula::Or(a, b) => {
            let (x, y) = (eval(u, a, env), eval(u, b, env));
            x | y
        }
        Formula::Implies(a, b) => {
            let (x, y) = (eval(u, a, env), eval(u, b, env));
            !x | y
        }
        Formula::Iff(a, b) => eval(u, a, env) == eval(u, b, env),
        Formula::Quant {
            quantifier,
            vars,
            body,
        } => quant(u, *quantifier, vars, body, env),
    }
}

fn quant(u: &Universe, q: Quantifier, vars: &[String], body: &Formula, env: &mut Env) -> bool {
    let Some((v, rest)) = vars.split_first() else {
        return eval(u, body, env);
    };
    let relativized = !matches!(q, Quantifier::Forall | Quantifier::Exists);
    let domain: Vec<EntityHandle> = u
        .handles()
        .filter(|&h| !relativized || is_qset(u, h))
        .collect();
    let mut results = Vec::new();
    for h in domain {
        env.push((v.clone(), h));
        let inner = match q {
            Quantifier::ExistsQUnique => quant(u, Quantifier::ExistsQ, rest, body, env),
            _ => quant(u, q, rest, body, env),
        };
        env.pop();
        results.push((h, inner));
    }
    match q {
        Quantifier::Forall | Quantifier::ForallQ => results.iter().all(|r| r.1),
        Quantifier::Exists | Quantifier::ExistsQ => results.iter().any(|r| r.1),
        Quantifier::ExistsQUnique => {
            let sat: Vec<EntityHandle> = results.iter().filter(|r| r.1).map(|r| r.0).collect();
            !sat.is_empty()
                && sat
                    .iter()
                    .all(|&a| sat.iter().all(|&b| same_members(u, a, b)))
        }
    }
}
