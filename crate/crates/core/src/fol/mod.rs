//! First-order formulas over the ring signature, with a parser, brute-force
//! evaluation over finite structures, truth sets over prime-indexed families,
//! and verdicts under ultrafilter specifications.
//!
//! The signature is fixed: constants `0` and `1`, unary negation, binary `+`
//! and `*`, equality, and integer literals as sugar for repeated addition.

mod classify;
pub(crate) mod eval;
mod parse;

pub use eval::{
    eval_finite, eval_term, los_verdict, transfer_report, truth_set, EvalOptions,
    SampledTruthSet, TransferReport,
};
pub use parse::{parse, parse_sentence};

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// The fixed ring signature every structure family interprets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature;

impl Signature {
    pub const CONSTANTS: [&'static str; 2] = ["0", "1"];
    pub const UNARY: [&'static str; 1] = ["-"];
    pub const BINARY: [&'static str; 2] = ["+", "*"];
    pub const RELATION: &'static str = "=";
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Zero,
    One,
    /// Sugar for a repeated sum of 1; kept as a literal for readability.
    IntLit(i64),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn int(n: i64) -> Self {
        match n {
            0 => Term::Zero,
            1 => Term::One,
            n if n < 0 => Term::Neg(Box::new(Term::int(-n))),
            n => Term::IntLit(n),
        }
    }

    // node constructors, not arithmetic on self
    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Term, b: Term) -> Self {
        Term::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Term, b: Term) -> Self {
        Term::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Term) -> Self {
        Term::Neg(Box::new(a))
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(v) => {
                out.insert(v);
            }
            Term::Zero | Term::One | Term::IntLit(_) => {}
            Term::Neg(t) => t.collect_vars(out),
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Self {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Self {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    /// Free variables, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go<'a>(f: &'a Formula, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Eq(a, b) => {
                    let mut vars = BTreeSet::new();
                    a.collect_vars(&mut vars);
                    b.collect_vars(&mut vars);
                    for v in vars {
                        if !bound.contains(&v) {
                            out.insert(v.to_string());
                        }
                    }
                }
                Formula::Not(g) => go(g, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Exists(v, body) | Formula::Forall(v, body) => {
                    bound.push(v);
                    go(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Number of nested quantifiers on the deepest path.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
        }
    }

    /// Enforce that no variable is bound twice on a root-to-leaf path.
    pub fn check_bindings(&self) -> Result<()> {
        fn go<'a>(f: &'a Formula, bound: &mut Vec<&'a str>) -> Result<()> {
            match f {
                Formula::Eq(..) => Ok(()),
                Formula::Not(g) => go(g, bound),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, bound)?;
                    go(b, bound)
                }
                Formula::Exists(v, body) | Formula::Forall(v, body) => {
                    if bound.contains(&v.as_str()) {
                        return Err(Error::ShadowedVariable { var: v.clone() });
                    }
                    bound.push(v);
                    let r = go(body, bound);
                    bound.pop();
                    r
                }
            }
        }
        go(self, &mut Vec::new())
    }

    /// Substitute a term for every free occurrence of `var`.
    pub fn substitute(&self, var: &str, replacement: &Term) -> Formula {
        fn sub_term(t: &Term, var: &str, r: &Term) -> Term {
            match t {
                Term::Var(v) if v == var => r.clone(),
                Term::Var(_) | Term::Zero | Term::One | Term::IntLit(_) => t.clone(),
                Term::Neg(a) => Term::Neg(Box::new(sub_term(a, var, r))),
                Term::Add(a, b) => Term::Add(
                    Box::new(sub_term(a, var, r)),
                    Box::new(sub_term(b, var, r)),
                ),
                Term::Mul(a, b) => Term::Mul(
                    Box::new(sub_term(a, var, r)),
                    Box::new(sub_term(b, var, r)),
                ),
            }
        }
        match self {
            Formula::Eq(a, b) => Formula::Eq(sub_term(a, var, replacement), sub_term(b, var, replacement)),
            Formula::Not(f) => Formula::not(f.substitute(var, replacement)),
            Formula::And(a, b) => {
                Formula::and(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            Formula::Or(a, b) => {
                Formula::or(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            Formula::Implies(a, b) => Formula::implies(
                a.substitute(var, replacement),
                b.substitute(var, replacement),
            ),
            Formula::Exists(v, body) if v != var => {
                Formula::exists(v, body.substitute(var, replacement))
            }
            Formula::Forall(v, body) if v != var => {
                Formula::forall(v, body.substitute(var, replacement))
            }
            // shadowed: bound occurrence, stop
            other => other.clone(),
        }
    }
}

// Precedence levels for printing: implication 1, or 2, and 3, not 4.
fn fmt_formula(f: &Formula, prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let level = match f {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(..) => 4,
        Formula::Eq(..) => 5,
    };
    let parens = level < prec;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::Eq(a, b) => {
            fmt_term(a, 0, out)?;
            write!(out, " = ")?;
            fmt_term(b, 0, out)?;
        }
        Formula::Not(g) => {
            write!(out, "!")?;
            fmt_formula(g, 5, out)?;
        }
        Formula::And(a, b) => {
            fmt_formula(a, 4, out)?;
            write!(out, " & ")?;
            fmt_formula(b, 4, out)?;
        }
        Formula::Or(a, b) => {
            fmt_formula(a, 3, out)?;
            write!(out, " | ")?;
            fmt_formula(b, 3, out)?;
        }
        Formula::Implies(a, b) => {
            fmt_formula(a, 2, out)?;
            write!(out, " -> ")?;
            // right-associative
            fmt_formula(b, 1, out)?;
        }
        Formula::Exists(v, body) => {
            write!(out, "exists {v}. ")?;
            fmt_formula(body, 0, out)?;
        }
        Formula::Forall(v, body) => {
            write!(out, "forall {v}. ")?;
            fmt_formula(body, 0, out)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

// Term precedence: addition 1, multiplication 2, unary minus 3.
fn fmt_term(t: &Term, prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let level = match t {
        Term::Add(..) => 1,
        Term::Mul(..) => 2,
        Term::Neg(..) => 3,
        _ => 4,
    };
    let parens = level < prec;
    if parens {
        write!(out, "(")?;
    }
    match t {
        Term::Var(v) => write!(out, "{v}")?,
        Term::Zero => write!(out, "0")?,
        Term::One => write!(out, "1")?,
        Term::IntLit(n) => write!(out, "{n}")?,
        Term::Neg(a) => {
            write!(out, "-")?;
            fmt_term(a, 3, out)?;
        }
        Term::Add(a, b) => {
            fmt_term(a, 1, out)?;
            // print `a + -b` as `a - b`
            if let Term::Neg(inner) = &**b {
                write!(out, " - ")?;
                fmt_term(inner, 3, out)?;
            } else {
                write!(out, " + ")?;
                fmt_term(b, 2, out)?;
            }
        }
        Term::Mul(a, b) => {
            fmt_term(a, 2, out)?;
            write!(out, " * ")?;
            fmt_term(b, 3, out)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, 0, f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, 0, f)
    }
}
