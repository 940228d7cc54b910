//! Parsers for the CLI's small expression languages: filters, element
//! expressions, and protoproduct sequence literals.

use ultraprod::index_filters::{DefinableSet, FilterSpec};
use ultraprod::proto::{BoundedPolySequence, FiltrationDescriptor};
use ultraprod::ultra::ValueRule;
use ultraprod::{Error, Result};

/// Filter words: `generic`, `principal:P`, `constrained`. Repeatable
/// `--assume` sets turn a generic filter into a constrained one.
pub fn parse_filter(text: &str, assumes: &[DefinableSet]) -> Result<FilterSpec> {
    let t = text.trim();
    if let Some(p) = t.strip_prefix("principal:") {
        if !assumes.is_empty() {
            return Err(Error::Unsupported {
                msg: "--assume cannot be combined with a principal filter".into(),
            });
        }
        let p: u64 = p.parse().map_err(|_| Error::Syntax {
            pos: 0,
            msg: format!("bad prime in `{t}`"),
        })?;
        return FilterSpec::principal(p);
    }
    match t {
        "generic" | "constrained" => {
            if assumes.is_empty() {
                Ok(FilterSpec::Generic)
            } else {
                Ok(FilterSpec::Constrained(assumes.to_vec()))
            }
        }
        _ => Err(Error::Syntax {
            pos: 0,
            msg: format!("unknown filter `{t}` (expected generic, principal:P, constrained)"),
        }),
    }
}

/// One parsed element expression.
#[derive(Debug, Clone)]
pub enum ElemExpr {
    Eq { left: ValueRule, right: ValueRule, family: String, filter: String },
    Inv { rule: ValueRule, family: String, filter: String },
    Residue { rule: ValueRule, modulus: u64 },
    Compare { left: ValueRule, right: ValueRule },
    Const { rule: ValueRule },
    Arith { op: String, left: ValueRule, right: Option<ValueRule>, family: String },
}

/// Grammar: `OP (rule) [(rule)] [@family] [filterword] | residue (rule) mod N`.
pub fn parse_elem(text: &str) -> Result<ElemExpr> {
    let mut rest = text.trim();
    let op = take_word(&mut rest).ok_or(Error::Syntax {
        pos: 0,
        msg: "empty element expression".into(),
    })?;
    match op.as_str() {
        "eq" | "compare" | "add" | "mul" | "sub" => {
            let left = take_rule(&mut rest)?;
            let right = take_rule(&mut rest)?;
            let (family, filter) = take_context(&mut rest)?;
            end_of_input(rest)?;
            Ok(match op.as_str() {
                "eq" => ElemExpr::Eq { left, right, family, filter },
                "compare" => ElemExpr::Compare { left, right },
                _ => ElemExpr::Arith { op, left, right: Some(right), family },
            })
        }
        "inv" => {
            let rule = take_rule(&mut rest)?;
            let (family, filter) = take_context(&mut rest)?;
            end_of_input(rest)?;
            Ok(ElemExpr::Inv { rule, family, filter })
        }
        "neg" => {
            let left = take_rule(&mut rest)?;
            let (family, _) = take_context(&mut rest)?;
            end_of_input(rest)?;
            Ok(ElemExpr::Arith { op, left, right: None, family })
        }
        "residue" => {
            let rule = take_rule(&mut rest)?;
            let kw = take_word(&mut rest);
            if kw.as_deref() != Some("mod") {
                return Err(Error::Syntax {
                    pos: 0,
                    msg: "expected `mod` after the rule".into(),
                });
            }
            let n = take_word(&mut rest)
                .and_then(|w| w.parse().ok())
                .ok_or(Error::Syntax {
                    pos: 0,
                    msg: "expected a modulus".into(),
                })?;
            end_of_input(rest)?;
            Ok(ElemExpr::Residue { rule, modulus: n })
        }
        "const" => {
            let rule = take_rule(&mut rest)?;
            end_of_input(rest)?;
            Ok(ElemExpr::Const { rule })
        }
        other => Err(Error::Syntax {
            pos: 0,
            msg: format!(
                "unknown element operation `{other}` \
                 (expected eq, inv, residue, compare, const, add, mul, sub, neg)"
            ),
        }),
    }
}

fn end_of_input(rest: &str) -> Result<()> {
    if rest.trim().is_empty() {
        Ok(())
    } else {
        Err(Error::Syntax {
            pos: 0,
            msg: format!("trailing input `{}`", rest.trim()),
        })
    }
}

fn take_word(rest: &mut &str) -> Option<String> {
    *rest = rest.trim_start();
    if rest.is_empty() {
        return None;
    }
    let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
    let word = rest[..end].to_string();
    *rest = &rest[end..];
    Some(word)
}

/// A parenthesized (or bracketed) rule literal.
fn take_rule(rest: &mut &str) -> Result<ValueRule> {
    *rest = rest.trim_start();
    let (open, close) = match rest.chars().next() {
        Some('(') => ('(', ')'),
        Some('[') => ('[', ']'),
        _ => {
            return Err(Error::Syntax {
                pos: 0,
                msg: "expected a parenthesized rule literal".into(),
            })
        }
    };
    let mut depth = 0usize;
    for (i, c) in rest.char_indices() {
        if c == open {
            depth += 1;
        } else if c == close {
            depth -= 1;
            if depth == 0 {
                let inner = &rest[1..i];
                *rest = &rest[i + 1..];
                return ValueRule::parse(inner);
            }
        }
    }
    Err(Error::Syntax {
        pos: 0,
        msg: "unbalanced rule literal".into(),
    })
}

fn take_context(rest: &mut &str) -> Result<(String, String)> {
    let mut family = "Fp".to_string();
    let mut filter = "generic".to_string();
    while let Some(word) = take_word(rest) {
        if let Some(fam) = word.strip_prefix('@') {
            family = fam.to_string();
        } else {
            filter = word;
        }
    }
    Ok((family, filter))
}

/// A parsed `proto` sequence argument: term rules plus an optional declared
/// filtration constraint such as `/ deg<=2`.
#[derive(Debug, Clone)]
pub struct SequenceExpr {
    pub sequence: BoundedPolySequence,
    pub constraint: Option<(FiltrationDescriptor, u64)>,
}

/// Parse a polynomial-sequence literal: a sum of terms `coeff x^exp` with
/// coefficient rules in parens, exponents as integers or bracketed rules,
/// e.g. `x + (p - 1)`, `(2)x^2 - x + (p)`, `x^[p] + 1`, `x^(p)`.
pub fn parse_sequence(text: &str) -> Result<SequenceExpr> {
    let (body, constraint) = split_constraint(text)?;
    // special form for the canonical unbounded example
    if body.trim() == "sum_{i<=p} x^i" {
        return Ok(SequenceExpr {
            sequence: BoundedPolySequence::geometric_sum(),
            constraint,
        });
    }
    let mut terms: Vec<(ValueRule, ValueRule)> = Vec::new();
    for (sign, piece) in split_terms(body)? {
        let (coeff, exp) = parse_term(&piece)?;
        let coeff = if sign { coeff } else { coeff.neg() };
        terms.push((coeff, exp));
    }
    Ok(SequenceExpr {
        sequence: BoundedPolySequence::from_terms(terms)?,
        constraint,
    })
}

fn split_constraint(text: &str) -> Result<(&str, Option<(FiltrationDescriptor, u64)>)> {
    // the suffix separator is a `/` at depth 0 followed by deg<= or count<=
    let bytes = text.as_bytes();
    let mut depth = 0i32;
    for i in 0..bytes.len() {
        match bytes[i] {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b'/' if depth == 0 => {
                let suffix = text[i + 1..].trim();
                let (filt, step_text) = if let Some(s) = suffix.strip_prefix("deg<=") {
                    (FiltrationDescriptor::degree(), s)
                } else if let Some(s) = suffix.strip_prefix("count<=") {
                    (FiltrationDescriptor::monomial_count(), s)
                } else {
                    continue; // a division inside the polynomial part
                };
                let step: u64 = step_text.trim().parse().map_err(|_| Error::Syntax {
                    pos: i,
                    msg: "bad filtration step".into(),
                })?;
                return Ok((&text[..i], Some((filt, step))));
            }
            _ => {}
        }
    }
    Ok((text, None))
}

fn split_terms(text: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut sign = true;
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '(' | '[' => {
                depth += 1;
                current.push(c);
            }
            ')' | ']' => {
                depth -= 1;
                current.push(c);
            }
            '+' | '-' if depth == 0 => {
                if !current.trim().is_empty() {
                    out.push((sign, current.trim().to_string()));
                }
                current = String::new();
                sign = c == '+';
            }
            _ => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        out.push((sign, current.trim().to_string()));
    }
    if out.is_empty() {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty sequence literal".into(),
        });
    }
    Ok(out)
}

fn parse_term(piece: &str) -> Result<(ValueRule, ValueRule)> {
    let piece = piece.trim();
    // split at the variable if present
    if let Some(xpos) = find_var(piece) {
        let coeff_text = piece[..xpos].trim();
        let exp_text = piece[xpos + 1..].trim();
        let coeff = if coeff_text.is_empty() {
            ValueRule::constant(1)
        } else {
            parse_wrapped_rule(coeff_text)?
        };
        let exp = if exp_text.is_empty() {
            ValueRule::constant(1)
        } else {
            let exp_text = exp_text.strip_prefix('^').ok_or(Error::Syntax {
                pos: 0,
                msg: format!("expected `^` after x in `{piece}`"),
            })?;
            parse_wrapped_rule(exp_text.trim())?
        };
        Ok((coeff, exp))
    } else {
        // constant term
        Ok((parse_wrapped_rule(piece)?, ValueRule::constant(0)))
    }
}

/// Position of the variable `x` at depth 0, if any.
fn find_var(piece: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in piece.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            'x' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

fn parse_wrapped_rule(text: &str) -> Result<ValueRule> {
    let t = text.trim();
    if (t.starts_with('(') && t.ends_with(')')) || (t.starts_with('[') && t.ends_with(']')) {
        return ValueRule::parse(&t[1..t.len() - 1]);
    }
    ValueRule::parse(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ultraprod::proto::Membership;

    #[test]
    fn filters() {
        assert_eq!(parse_filter("generic", &[]).unwrap(), FilterSpec::Generic);
        assert_eq!(
            parse_filter("principal:7", &[]).unwrap(),
            FilterSpec::Principal(7)
        );
        assert!(parse_filter("principal:6", &[]).is_err());
        let assume = DefinableSet::congruence(&[1], 4).unwrap();
        assert_eq!(
            parse_filter("generic", std::slice::from_ref(&assume)).unwrap(),
            FilterSpec::Constrained(vec![assume])
        );
    }

    #[test]
    fn elem_documented_examples() {
        assert!(matches!(
            parse_elem("eq (p) (0) @Fp generic").unwrap(),
            ElemExpr::Eq { .. }
        ));
        assert!(matches!(
            parse_elem("inv (6) @Zp^2 generic").unwrap(),
            ElemExpr::Inv { .. }
        ));
        assert!(matches!(
            parse_elem("residue (p) mod 4").unwrap(),
            ElemExpr::Residue { modulus: 4, .. }
        ));
    }

    #[test]
    fn sequences() {
        let s = parse_sequence("x + (p - 1) / deg<=1").unwrap();
        assert_eq!(
            s.constraint,
            Some((FiltrationDescriptor::degree(), 1))
        );
        assert_eq!(
            s.sequence.membership_check(&FiltrationDescriptor::degree()),
            Membership::Accepted { step: 1 }
        );
        let s = parse_sequence("x^[p]").unwrap();
        assert!(matches!(
            s.sequence.membership_check(&FiltrationDescriptor::degree()),
            Membership::Rejected { .. }
        ));
        let s = parse_sequence("sum_{i<=p} x^i").unwrap();
        assert!(matches!(
            s.sequence
                .membership_check(&FiltrationDescriptor::monomial_count()),
            Membership::Rejected { .. }
        ));
        // multi-term with explicit coefficient and rational rule
        let s = parse_sequence("(2)x^2 - x + ((p + 1)/2)").unwrap();
        assert_eq!(
            s.sequence.membership_check(&FiltrationDescriptor::degree()),
            Membership::Accepted { step: 2 }
        );
    }
}
