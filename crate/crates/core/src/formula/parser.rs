//! Recursive-descent parser.
//!
//! Precedence, tightest first: `~`, `&`, `|`, `->`, `<->`. `&` and `|` group
//! to the left, `->` and `<->` to the right. A quantifier takes one or more
//! comma-separated variables and its body extends as far right as possible.

use super::ast::{EntityPred, Formula, NumTerm};
use super::lexer::{tokenize, Func, Pred, Quantifier, Rel, Token, TokenKind};
use crate::error::{Error, Result, Span};

pub fn parse(src: &str) -> Result<Formula> {
    let tokens = tokenize(src)?;
    parse_tokens(&tokens, src.len())
}

pub fn parse_tokens(tokens: &[Token], src_len: usize) -> Result<Formula> {
    let mut p = Parser {
        tokens,
        pos: 0,
        end: Span::new(src_len, src_len),
    };
    let f = p.formula()?;
    if let Some(t) = p.peek() {
        return Err(p.unexpected(t, &["end of input", "binary connective"]));
    }
    Ok(f)
}

enum Operand {
    Var(String, Span),
    Num(NumTerm, Span),
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: Span,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek().is_some_and(|t| &t.kind == kind)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, t: &Token, expected: &[&str]) -> Error {
        Error::Syntax {
            span: t.span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.kind.to_string(),
        }
    }

    fn error_here(&self, expected: &[&str]) -> Error {
        match self.peek() {
            Some(t) => self.unexpected(t, expected),
            None => Error::Syntax {
                span: self.end,
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: "end of input".into(),
            },
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<&'a Token> {
        if self.at(&kind) {
            Ok(self.bump().expect("peeked"))
        } else {
            Err(self.error_here(&[what]))
        }
    }

    fn ident(&mut self) -> Result<(String, Span)> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(name),
                span,
                ..
            }) => {
                self.pos += 1;
                Ok((name.clone(), *span))
            }
            _ => Err(self.error_here(&["variable"])),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.implication()?;
        if self.eat(&TokenKind::Iff) {
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&TokenKind::Implies) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&TokenKind::Or) {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&TokenKind::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(TokenKind::Quant(q)) => {
                let q = *q;
                self.pos += 1;
                self.quantified(q)
            }
            _ => self.atom(),
        }
    }

    fn quantified(&mut self, quantifier: Quantifier) -> Result<Formula> {
        let mut vars = vec![self.ident()?.0];
        while self.eat(&TokenKind::Comma) {
            vars.push(self.ident()?.0);
        }
        if quantifier == Quantifier::ExistsQUnique && vars.len() > 1 {
            return Err(Error::Syntax {
                span: self.tokens[self.pos - 1].span,
                expected: vec!["a single variable after `existsQ!`".into()],
                found: format!("{} variables", vars.len()),
            });
        }
        let body = self.formula()?;
        Ok(Formula::Quant {
            quantifier,
            vars,
            body: Box::new(body),
        })
    }

    fn atom(&mut self) -> Result<Formula> {
        let Some(t) = self.peek() else {
            return Err(self.error_here(&["formula"]));
        };
        match &t.kind {
            TokenKind::LParen => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(f)
            }
            TokenKind::Pred(Pred::Cardinal) => {
                self.pos += 1;
                self.expect(TokenKind::LParen, "`(`")?;
                let (n, _) = self.num_term()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(Formula::Cardinal(n))
            }
            TokenKind::Pred(p) => {
                let pred = EntityPred::from_pred(*p).expect("Cd handled above");
                self.pos += 1;
                self.expect(TokenKind::LParen, "`(`")?;
                let (v, _) = self.ident()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(Formula::Pred(pred, v))
            }
            _ => self.relation(),
        }
    }

    fn relation(&mut self) -> Result<Formula> {
        let lhs = self.operand()?;
        let rel = match self.peek() {
            Some(Token {
                kind: TokenKind::Rel(r),
                ..
            }) => *r,
            _ => return Err(self.error_here(&["`==`", "`in`", "`=E`", "`<=`"])),
        };
        self.pos += 1;
        let rhs = self.operand()?;
        match (rel, lhs, rhs) {
            (Rel::Indist, Operand::Var(a, _), Operand::Var(b, _)) => Ok(Formula::Indist(a, b)),
            (Rel::Member, Operand::Var(a, _), Operand::Var(b, _)) => Ok(Formula::Member(a, b)),
            (Rel::ExtEq, Operand::Var(a, sa), Operand::Var(b, sb)) => Ok(Formula::ExtEq {
                lhs: a,
                rhs: b,
                span: sa.join(sb),
            }),
            (Rel::ExtEq, Operand::Num(a, _), Operand::Num(b, _)) => Ok(Formula::NumEq(a, b)),
            (Rel::Le, Operand::Num(a, _), Operand::Num(b, _)) => Ok(Formula::Le(a, b)),
            (Rel::Le, Operand::Var(_, s), _) | (Rel::Le, _, Operand::Var(_, s)) => {
                Err(sort_mismatch(s, "numeric term on both sides of `<=`"))
            }
            (Rel::ExtEq, Operand::Var(_, s), Operand::Num(..))
            | (Rel::ExtEq, Operand::Num(..), Operand::Var(_, s)) => Err(sort_mismatch(
                s,
                "operands of the same sort on both sides of `=E`",
            )),
            (r, Operand::Num(_, s), _) | (r, _, Operand::Num(_, s)) => Err(sort_mismatch(
                s,
                &format!("variable on both sides of `{}`", r.symbol()),
            )),
        }
    }

    fn operand(&mut self) -> Result<Operand> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Ident(_)) => {
                let (v, s) = self.ident()?;
                Ok(Operand::Var(v, s))
            }
            Some(TokenKind::Int(_)) | Some(TokenKind::Func(_)) => {
                let (n, s) = self.num_term()?;
                Ok(Operand::Num(n, s))
            }
            _ => Err(self.error_here(&["variable", "numeric term", "`(`", "quantifier", "`~`"])),
        }
    }

    fn num_term(&mut self) -> Result<(NumTerm, Span)> {
        let Some(t) = self.bump() else {
            return Err(self.error_here(&["numeric term"]));
        };
        match &t.kind {
            TokenKind::Int(n) => {
                if self.eat(&TokenKind::Caret) {
                    let (exp, s) = self.num_term()?;
                    Ok((
                        NumTerm::Pow {
                            base: *n,
                            exp: Box::new(exp),
                        },
                        t.span.join(s),
                    ))
                } else {
                    Ok((NumTerm::Lit(*n), t.span))
                }
            }
            TokenKind::Func(g) => {
                let g: Func = *g;
                self.expect(TokenKind::LParen, "`(`")?;
                let (v, _) = self.ident()?;
                let close = self.expect(TokenKind::RParen, "`)`")?;
                Ok((NumTerm::Apply(g, v), t.span.join(close.span)))
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected(t, &["integer", "`qc`", "`card`"]))
            }
        }
    }
}

fn sort_mismatch(span: Span, expected: &str) -> Error {
    Error::Sort {
        span,
        message: format!("expected {expected}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::ast::Quantifier as Q;

    fn p(s: &str) -> Formula {
        parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
    }

    fn count_binders(f: &Formula) -> usize {
        match f {
            Formula::Quant { vars, body, .. } => vars.len() + count_binders(body),
            Formula::Not(a) => count_binders(a),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => count_binders(a) + count_binders(b),
            _ => 0,
        }
    }

    #[test]
    fn weak_pair_axiom_has_four_binders() {
        let f = p("forall x forall y existsQ z forall t (t in z <-> (t == x | t == y))");
        assert_eq!(count_binders(&f), 4);
        let Formula::Quant { quantifier, .. } = &f else {
            panic!()
        };
        assert_eq!(*quantifier, Q::Forall);
        assert!(f.free_vars().is_empty());
    }

    #[test]
    fn implication_is_right_associative() {
        let f = p("m(x) -> M(x) -> Z(x)");
        assert_eq!(
            f,
            Formula::implies(
                Formula::Pred(EntityPred::Micro, "x".into()),
                Formula::implies(
                    Formula::Pred(EntityPred::Macro, "x".into()),
                    Formula::Pred(EntityPred::Zfu, "x".into())
                )
            )
        );
    }

    #[test]
    fn precedence_levels() {
        assert_eq!(
            p("~m(x) & M(y) | Z(z) -> Q(w) <-> Q(v)"),
            p("((((~m(x)) & M(y)) | Z(z)) -> Q(w)) <-> Q(v)")
        );
        assert_eq!(
            p("a == b | c == d | e == f"),
            p("(a == b | c == d) | e == f")
        );
    }

    #[test]
    fn quantifier_body_extends_right() {
        assert_eq!(
            p("m(a) & forall x m(x) | M(x)"),
            p("m(a) & (forall x (m(x) | M(x)))")
        );
    }

    #[test]
    fn bad_binder_is_syntax_error() {
        let err = parse("forall (x)").unwrap_err();
        let Error::Syntax { span, expected, .. } = err else {
            panic!("{err:?}")
        };
        assert_eq!(span, Span::new(7, 8));
        assert_eq!(expected, vec!["variable".to_string()]);
    }

    #[test]
    fn numeric_relations() {
        assert_eq!(
            p("qc(x) <= 2^qc(y)"),
            Formula::Le(
                NumTerm::Apply(Func::Qc, "x".into()),
                NumTerm::Pow {
                    base: 2,
                    exp: Box::new(NumTerm::Apply(Func::Qc, "y".into()))
                }
            )
        );
        assert_eq!(
            p("existsQ z (qc(z) =E 3)"),
            Formula::quant(
                Q::ExistsQ,
                "z",
                Formula::NumEq(NumTerm::Apply(Func::Qc, "z".into()), NumTerm::Lit(3))
            )
        );
        assert!(matches!(parse("x <= 3"), Err(Error::Sort { .. })));
        assert!(matches!(parse("x =E qc(y)"), Err(Error::Sort { .. })));
        assert!(matches!(parse("3 in x"), Err(Error::Sort { .. })));
    }

    #[test]
    fn ext_eq_records_span() {
        let Formula::ExtEq { span, .. } = p("xx =E yy") else {
            panic!()
        };
        assert_eq!(span, Span::new(0, 8));
    }

    #[test]
    fn unique_quantifier_takes_one_variable() {
        assert!(parse("existsQ! y (y == y)").is_ok());
        assert!(parse("existsQ! x, y (x == y)").is_err());
    }

    #[test]
    fn trailing_garbage_and_unclosed_parens() {
        assert!(parse("m(x) )").is_err());
        assert!(parse("(m(x)").is_err());
        assert!(parse("").is_err());
        assert!(parse("m(x) m(y)").is_err());
    }

    #[test]
    fn printer_round_trips() {
        for src in [
            "forall x forall y existsQ z forall t (t in z <-> (t == x | t == y))",
            "~(m(x) & M(y)) -> ~~Z(z)",
            "(a == b -> c == d) -> e == f",
            "a == b <-> (c == d <-> e == f)",
            "(a == b <-> c == d) <-> e == f",
            "m(a) & (forall x (m(x))) | M(b)",
            "~(exists x (x in y))",
            "Cd(2^2^qc(x)) & card(y) =E 0",
            "existsQ! y (y =E x)",
            "forall a, b (a == b)",
        ] {
            let f = p(src);
            let printed = f.to_string();
            assert_eq!(
                p(&printed).strip_spans(),
                f.strip_spans(),
                "{src} => {printed}"
            );
        }
    }
}
