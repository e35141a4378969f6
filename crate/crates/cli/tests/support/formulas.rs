//! Random closed formulas that can be evaluated on any generated universe
//! without errors: `=E`, `qc` and `card` only see variables bound by a
//! relativized quantifier, and exponents stay small.

use quasiset::formula::{EntityPred, Formula, Func, NumTerm, Quantifier};
use quasiset::Span;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone)]
struct Var {
    name: String,
    qset: bool,
}

const QUANTIFIERS: [Quantifier; 5] = [
    Quantifier::Forall,
    Quantifier::Exists,
    Quantifier::ForallQ,
    Quantifier::ExistsQ,
    Quantifier::ExistsQUnique,
];

const PREDS: [EntityPred; 4] = [
    EntityPred::Micro,
    EntityPred::Macro,
    EntityPred::Zfu,
    EntityPred::QSet,
];

/// Closed formula of depth at most `max_depth`.
pub fn closed(rng: &mut impl Rng, max_depth: usize) -> Formula {
    let f = node(rng, max_depth, &mut Vec::new(), true);
    debug_assert!(f.free_vars().is_empty());
    debug_assert!(f.depth() <= max_depth);
    f
}

fn fresh(scope: &[Var]) -> String {
    format!("v{}", scope.len())
}

fn node(rng: &mut impl Rng, budget: usize, scope: &mut Vec<Var>, top: bool) -> Formula {
    if budget == 0 || (!top && rng.gen_bool(0.25)) {
        return atom(rng, scope);
    }
    // Closed formulas start with a quantifier most of the time.
    let pick = if top || scope.is_empty() && rng.gen_bool(0.8) {
        5
    } else {
        rng.gen_range(0..7)
    };
    match pick {
        0 => Formula::not(node(rng, budget - 1, scope, false)),
        1 => Formula::and(
            node(rng, budget - 1, scope, false),
            node(rng, budget - 1, scope, false),
        ),
        2 => Formula::or(
            node(rng, budget - 1, scope, false),
            node(rng, budget - 1, scope, false),
        ),
        3 => Formula::implies(
            node(rng, budget - 1, scope, false),
            node(rng, budget - 1, scope, false),
        ),
        4 => Formula::iff(
            node(rng, budget - 1, scope, false),
            node(rng, budget - 1, scope, false),
        ),
        _ => quantified(rng, budget, scope),
    }
}

fn quantified(rng: &mut impl Rng, budget: usize, scope: &mut Vec<Var>) -> Formula {
    let q = *QUANTIFIERS.choose(rng).unwrap();
    let var = Var {
        name: fresh(scope),
        qset: q != Quantifier::Forall && q != Quantifier::Exists,
    };
    let guard_over = scope.choose(rng).map(|w| w.name.clone());
    scope.push(var.clone());
    // Sometimes the body takes the bounded shape `v in w -> ...` / `v in w & ...`.
    let body = match guard_over {
        Some(w) if budget >= 2 && q != Quantifier::ExistsQUnique && rng.gen_bool(0.4) => {
            let g = Formula::member(var.name.clone(), w);
            let rest = node(rng, budget - 2, scope, false);
            if matches!(q, Quantifier::Forall | Quantifier::ForallQ) {
                Formula::implies(g, rest)
            } else {
                Formula::and(g, rest)
            }
        }
        _ => node(rng, budget - 1, scope, false),
    };
    scope.pop();
    Formula::quant(q, var.name, body)
}

fn apply(rng: &mut impl Rng, qvars: &[&Var]) -> Option<NumTerm> {
    let v = qvars.choose(rng)?;
    let f = if rng.gen_bool(0.5) {
        Func::Qc
    } else {
        Func::Card
    };
    Some(NumTerm::Apply(f, v.name.clone()))
}

fn num_term(rng: &mut impl Rng, qvars: &[&Var]) -> NumTerm {
    match rng.gen_range(0..3) {
        0 => apply(rng, qvars).unwrap_or(NumTerm::Lit(rng.gen_range(0..5))),
        1 => NumTerm::Pow {
            base: rng.gen_range(1..4),
            exp: Box::new(apply(rng, qvars).unwrap_or(NumTerm::Lit(rng.gen_range(0..4)))),
        },
        _ => NumTerm::Lit(rng.gen_range(0..6)),
    }
}

fn name(rng: &mut impl Rng, scope: &[Var]) -> Option<String> {
    scope.choose(rng).map(|v| v.name.clone())
}

fn atom(rng: &mut impl Rng, scope: &[Var]) -> Formula {
    let qvars: Vec<&Var> = scope.iter().filter(|v| v.qset).collect();
    loop {
        let f = match rng.gen_range(0..8) {
            0 => name(rng, scope).map(|v| Formula::Pred(*PREDS.choose(rng).unwrap(), v)),
            1 => name(rng, scope)
                .zip(name(rng, scope))
                .map(|(a, b)| Formula::Indist(a, b)),
            2 | 3 => name(rng, scope)
                .zip(name(rng, scope))
                .map(|(a, b)| Formula::Member(a, b)),
            4 => qvars
                .choose(rng)
                .zip(qvars.choose(rng))
                .map(|(a, b)| Formula::ExtEq {
                    lhs: a.name.clone(),
                    rhs: b.name.clone(),
                    span: Span::default(),
                }),
            5 => Some(Formula::NumEq(num_term(rng, &qvars), num_term(rng, &qvars))),
            6 => Some(Formula::Le(num_term(rng, &qvars), num_term(rng, &qvars))),
            _ => Some(Formula::Cardinal(num_term(rng, &qvars))),
        };
        if let Some(f) = f {
            return f;
        }
    }
}
