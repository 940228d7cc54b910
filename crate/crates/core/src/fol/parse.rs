//! Recursive-descent parser for the formula language.
//!
//! Grammar (ASCII shown; the Unicode forms ∀ ∃ ¬ ∧ ∨ → ≠ are also accepted):
//!
//! ```text
//! formula := ("exists" | "forall") var "." formula | implication
//! implication := disjunction [ "->" formula ]
//! disjunction := conjunction { ("|" | "or") conjunction }
//! conjunction := negation { ("&" | "and") negation }
//! negation := ("!" | "not") negation | atom
//! atom := term ("=" | "!=") term | "(" formula ")"
//! term := factor { ("+" | "-") factor }
//! factor := unary { "*" unary }
//! unary := "-" unary | var | int | "(" term ")"
//! ```
//!
//! `a != b` is sugar for `!(a = b)`, `a - b` for `a + -b`. The pretty-printer
//! emits ASCII and the round trip `parse(format!("{f}")) == f` holds for any
//! well-formed formula.

use super::{Formula, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    Dot,
    Eq,
    Neq,
    Plus,
    Minus,
    Star,
    Not,
    And,
    Or,
    Arrow,
    Exists,
    Forall,
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.bump(c);
                continue;
            }
            let tok = match c {
                '(' => {
                    self.bump(c);
                    Tok::LParen
                }
                ')' => {
                    self.bump(c);
                    Tok::RParen
                }
                '.' => {
                    self.bump(c);
                    Tok::Dot
                }
                '=' => {
                    self.bump(c);
                    Tok::Eq
                }
                '≠' => {
                    self.bump(c);
                    Tok::Neq
                }
                '+' => {
                    self.bump(c);
                    Tok::Plus
                }
                '*' => {
                    self.bump(c);
                    Tok::Star
                }
                '!' => {
                    self.bump(c);
                    if self.peek() == Some('=') {
                        self.bump('=');
                        Tok::Neq
                    } else {
                        Tok::Not
                    }
                }
                '~' | '¬' => {
                    self.bump(c);
                    Tok::Not
                }
                '&' | '∧' => {
                    self.bump(c);
                    Tok::And
                }
                '|' | '∨' => {
                    self.bump(c);
                    Tok::Or
                }
                '→' => {
                    self.bump(c);
                    Tok::Arrow
                }
                '∃' => {
                    self.bump(c);
                    Tok::Exists
                }
                '∀' => {
                    self.bump(c);
                    Tok::Forall
                }
                '-' => {
                    self.bump(c);
                    if self.peek() == Some('>') {
                        self.bump('>');
                        Tok::Arrow
                    } else {
                        Tok::Minus
                    }
                }
                c if c.is_ascii_digit() => {
                    let mut n: u64 = 0;
                    while let Some(d) = self.peek().filter(char::is_ascii_digit) {
                        n = n
                            .checked_mul(10)
                            .and_then(|n| n.checked_add(d as u64 - '0' as u64))
                            .ok_or(Error::Syntax {
                                pos: start,
                                msg: "integer literal too large".into(),
                            })?;
                        self.bump(d);
                    }
                    Tok::Int(n)
                }
                c if c.is_alphabetic() || c == '_' => {
                    let from = self.pos;
                    while let Some(d) = self
                        .peek()
                        .filter(|&d| d.is_alphanumeric() || d == '_' || d == '\'')
                    {
                        self.bump(d);
                    }
                    match &self.text[from..self.pos] {
                        "exists" => Tok::Exists,
                        "forall" => Tok::Forall,
                        "and" => Tok::And,
                        "or" => Tok::Or,
                        "not" => Tok::Not,
                        ident => Tok::Ident(ident.to_string()),
                    }
                }
                other => {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: format!("unexpected character `{other}`"),
                    })
                }
            };
            out.push((start, tok));
        }
        Ok(out)
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(Error::Syntax {
                pos: self.pos(),
                msg: format!("expected {what}"),
            })
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Exists) {
            let var = self.variable()?;
            self.expect(Tok::Dot, "`.` after quantified variable")?;
            return Ok(Formula::Exists(var, Box::new(self.formula()?)));
        }
        if self.eat(&Tok::Forall) {
            let var = self.variable()?;
            self.expect(Tok::Dot, "`.` after quantified variable")?;
            return Ok(Formula::Forall(var, Box::new(self.formula()?)));
        }
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            // right-associative; the right-hand side may be quantified
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn variable(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Ident(v)) => Ok(v),
            _ => Err(Error::Syntax {
                pos: self.pos(),
                msg: "expected a variable name".into(),
            }),
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Or) {
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut acc = self.negation()?;
        while self.eat(&Tok::And) {
            acc = Formula::and(acc, self.negation()?);
        }
        Ok(acc)
    }

    fn negation(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.negation()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        // a parenthesis can open either a formula or a term; try the formula
        // reading first and fall back on the term reading
        if self.peek() == Some(&Tok::LParen) {
            let save = self.idx;
            self.idx += 1;
            if let Ok(f) = self.formula() {
                if self.eat(&Tok::RParen) && !self.starts_term_operator() {
                    return Ok(f);
                }
            }
            self.idx = save;
        }
        if matches!(self.peek(), Some(Tok::Exists | Tok::Forall)) {
            return self.formula();
        }
        let lhs = self.term()?;
        match self.next() {
            Some(Tok::Eq) => Ok(Formula::Eq(lhs, self.term()?)),
            Some(Tok::Neq) => Ok(Formula::not(Formula::Eq(lhs, self.term()?))),
            _ => Err(Error::Syntax {
                pos: self.pos(),
                msg: "expected `=` or `!=`".into(),
            }),
        }
    }

    fn starts_term_operator(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Plus | Tok::Minus | Tok::Star | Tok::Eq | Tok::Neq)
        )
    }

    fn term(&mut self) -> Result<Term> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = Term::add(acc, self.factor()?);
            } else if self.eat(&Tok::Minus) {
                acc = Term::add(acc, Term::neg(self.factor()?));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Term> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::Star) {
            acc = Term::mul(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Term> {
        if self.eat(&Tok::Minus) {
            return Ok(Term::neg(self.unary()?));
        }
        match self.next() {
            Some(Tok::Ident(v)) => Ok(Term::Var(v)),
            Some(Tok::Int(n)) => {
                let n = i64::try_from(n).map_err(|_| Error::Syntax {
                    pos: self.pos(),
                    msg: "integer literal too large".into(),
                })?;
                Ok(Term::int(n))
            }
            Some(Tok::LParen) => {
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(Error::Syntax {
                pos: self.pos(),
                msg: "expected a term".into(),
            }),
        }
    }
}

/// Parse a formula. Binding discipline (no variable bound twice on a path) is
/// enforced; free variables are allowed and can be supplied by an assignment
/// or an ultraproduct-element environment.
pub fn parse(text: &str) -> Result<Formula> {
    let toks = Lexer { text, pos: 0 }.tokens()?;
    let mut parser = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let f = parser.formula()?;
    if parser.idx != parser.toks.len() {
        return Err(Error::Syntax {
            pos: parser.pos(),
            msg: "trailing input".into(),
        });
    }
    f.check_bindings()?;
    Ok(f)
}

/// Parse and require a sentence (no free variables).
pub fn parse_sentence(text: &str) -> Result<Formula> {
    let f = parse(text)?;
    if let Some(var) = f.free_vars().into_iter().next() {
        return Err(Error::UnboundVariable { var });
    }
    Ok(f)
}
