use std::collections::BTreeSet;
use std::fmt;

use crate::error::Span;

pub use super::lexer::{Func, Pred, Quantifier};

/// Natural-number valued terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NumTerm {
    Lit(u64),
    Apply(Func, String),
    Pow { base: u64, exp: Box<NumTerm> },
}

/// Predicates on entities. `Cd` takes a numeric term and lives in
/// [`Formula::Cardinal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntityPred {
    Micro,
    Macro,
    Zfu,
    QSet,
}

impl EntityPred {
    pub fn from_pred(p: Pred) -> Option<Self> {
        match p {
            Pred::Micro => Some(EntityPred::Micro),
            Pred::Macro => Some(EntityPred::Macro),
            Pred::Zfu => Some(EntityPred::Zfu),
            Pred::QSet => Some(EntityPred::QSet),
            Pred::Cardinal => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EntityPred::Micro => "m",
            EntityPred::Macro => "M",
            EntityPred::Zfu => "Z",
            EntityPred::QSet => "Q",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Pred(EntityPred, String),
    Cardinal(NumTerm),
    Indist(String, String),
    Member(String, String),
    /// `=E` between two entity variables. The span locates the node in its
    /// source so sort errors can point at it; it does not take part in
    /// [`Formula::strip_spans`] comparisons.
    ExtEq {
        lhs: String,
        rhs: String,
        span: Span,
    },
    NumEq(NumTerm, NumTerm),
    Le(NumTerm, NumTerm),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Quant {
        quantifier: Quantifier,
        vars: Vec<String>,
        body: Box<Formula>,
    },
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn quant(quantifier: Quantifier, var: impl Into<String>, body: Formula) -> Formula {
        Formula::Quant {
            quantifier,
            vars: vec![var.into()],
            body: Box::new(body),
        }
    }

    pub fn member(t: impl Into<String>, x: impl Into<String>) -> Formula {
        Formula::Member(t.into(), x.into())
    }

    /// Copy with every span reset, for structural comparison.
    pub fn strip_spans(&self) -> Formula {
        let mut f = self.clone();
        f.visit_mut(&mut |node| {
            if let Formula::ExtEq { span, .. } = node {
                *span = Span::default();
            }
        });
        f
    }

    fn visit_mut(&mut self, g: &mut impl FnMut(&mut Formula)) {
        g(self);
        match self {
            Formula::Not(a) => a.visit_mut(g),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.visit_mut(g);
                b.visit_mut(g);
            }
            Formula::Quant { body, .. } => body.visit_mut(g),
            _ => {}
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        let mut see = |v: &'a String, bound: &Vec<&'a str>| {
            if !bound.contains(&v.as_str()) {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::Pred(_, v) => see(v, bound),
            Formula::Indist(a, b)
            | Formula::Member(a, b)
            | Formula::ExtEq { lhs: a, rhs: b, .. } => {
                see(a, bound);
                see(b, bound);
            }
            Formula::Cardinal(n) => n.vars().for_each(|v| see(v, bound)),
            Formula::NumEq(a, b) | Formula::Le(a, b) => {
                a.vars().chain(b.vars()).for_each(|v| see(v, bound))
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant { vars, body, .. } => {
                let depth = bound.len();
                bound.extend(vars.iter().map(String::as_str));
                body.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    /// True when the formula contains no quantifier, so its truth value
    /// depends only on the valuation and not on which entities exist.
    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Quant { .. } => false,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            _ => true,
        }
    }

    pub fn contains_ext_eq(&self) -> bool {
        match self {
            Formula::ExtEq { .. } => true,
            Formula::Not(a) => a.contains_ext_eq(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.contains_ext_eq() || b.contains_ext_eq(),
            Formula::Quant { body, .. } => body.contains_ext_eq(),
            _ => false,
        }
    }

    /// Number of nested connective/quantifier levels; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Not(a) => 1 + a.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Quant { body, .. } => 1 + body.depth(),
            _ => 0,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Quant { .. } => 0,
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            _ => 6,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let parens = self.precedence() < ctx;
        if parens {
            f.write_str("(")?;
        }
        match self {
            Formula::Pred(p, v) => write!(f, "{}({v})", p.symbol())?,
            Formula::Cardinal(n) => write!(f, "Cd({n})")?,
            Formula::Indist(a, b) => write!(f, "{a} == {b}")?,
            Formula::Member(a, b) => write!(f, "{a} in {b}")?,
            Formula::ExtEq { lhs, rhs, .. } => write!(f, "{lhs} =E {rhs}")?,
            Formula::NumEq(a, b) => write!(f, "{a} =E {b}")?,
            Formula::Le(a, b) => write!(f, "{a} <= {b}")?,
            Formula::Not(a) => {
                f.write_str("~")?;
                a.fmt_prec(f, 5)?;
            }
            Formula::And(a, b) => binary(f, a, " & ", b, 4, 5)?,
            Formula::Or(a, b) => binary(f, a, " | ", b, 3, 4)?,
            Formula::Implies(a, b) => binary(f, a, " -> ", b, 3, 2)?,
            Formula::Iff(a, b) => binary(f, a, " <-> ", b, 2, 1)?,
            Formula::Quant {
                quantifier,
                vars,
                body,
            } => {
                write!(f, "{} {} (", quantifier.keyword(), vars.join(", "))?;
                body.fmt_prec(f, 0)?;
                f.write_str(")")?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn binary(
    f: &mut fmt::Formatter<'_>,
    a: &Formula,
    op: &str,
    b: &Formula,
    left: u8,
    right: u8,
) -> fmt::Result {
    a.fmt_prec(f, left)?;
    f.write_str(op)?;
    b.fmt_prec(f, right)
}

/// Prints the ASCII concrete syntax accepted by the parser.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl NumTerm {
    pub fn vars(&self) -> Box<dyn Iterator<Item = &String> + '_> {
        match self {
            NumTerm::Lit(_) => Box::new(std::iter::empty()),
            NumTerm::Apply(_, v) => Box::new(std::iter::once(v)),
            NumTerm::Pow { exp, .. } => exp.vars(),
        }
    }
}

impl fmt::Display for NumTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumTerm::Lit(n) => write!(f, "{n}"),
            NumTerm::Apply(g, v) => write!(f, "{}({v})", g.symbol()),
            NumTerm::Pow { base, exp } => write!(f, "{base}^{exp}"),
        }
    }
}
