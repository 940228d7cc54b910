//! Deterministic random sentence generation for property harnesses.
//!
//! Callers supply a seeded RNG, so suites are reproducible run to run.

use rand::Rng;

use crate::fol::{Formula, Term};

#[derive(Debug, Clone, Copy)]
pub struct SentenceConfig {
    pub max_quantifier_depth: usize,
    pub max_connective_depth: usize,
    pub max_term_depth: usize,
    /// Integer literals are drawn from `[-max_const, max_const]`.
    pub max_const: i64,
}

impl Default for SentenceConfig {
    fn default() -> Self {
        SentenceConfig {
            max_quantifier_depth: 3,
            max_connective_depth: 2,
            max_term_depth: 2,
            max_const: 4,
        }
    }
}

const VAR_POOL: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

/// A random sentence (no free variables, no shadowed bindings).
pub fn random_sentence(rng: &mut impl Rng, cfg: &SentenceConfig) -> Formula {
    let mut bound = Vec::new();
    formula(
        rng,
        cfg,
        cfg.max_quantifier_depth,
        cfg.max_connective_depth,
        &mut bound,
    )
}

fn formula(
    rng: &mut impl Rng,
    cfg: &SentenceConfig,
    qdepth: usize,
    cdepth: usize,
    bound: &mut Vec<&'static str>,
) -> Formula {
    let can_quantify = qdepth > 0 && bound.len() < VAR_POOL.len();
    let roll: f64 = rng.gen();
    if can_quantify && roll < 0.45 {
        let var = VAR_POOL[bound.len()];
        bound.push(var);
        let body = formula(rng, cfg, qdepth - 1, cdepth, bound);
        bound.pop();
        return if rng.gen() {
            Formula::exists(var, body)
        } else {
            Formula::forall(var, body)
        };
    }
    if cdepth > 0 && roll < 0.8 {
        return match rng.gen_range(0..4) {
            0 => Formula::not(formula(rng, cfg, qdepth, cdepth - 1, bound)),
            1 => Formula::and(
                formula(rng, cfg, qdepth, cdepth - 1, bound),
                formula(rng, cfg, qdepth, cdepth - 1, bound),
            ),
            2 => Formula::or(
                formula(rng, cfg, qdepth, cdepth - 1, bound),
                formula(rng, cfg, qdepth, cdepth - 1, bound),
            ),
            _ => Formula::implies(
                formula(rng, cfg, qdepth, cdepth - 1, bound),
                formula(rng, cfg, qdepth, cdepth - 1, bound),
            ),
        };
    }
    Formula::eq(
        term(rng, cfg, cfg.max_term_depth, bound),
        term(rng, cfg, cfg.max_term_depth, bound),
    )
}

fn term(
    rng: &mut impl Rng,
    cfg: &SentenceConfig,
    depth: usize,
    bound: &[&'static str],
) -> Term {
    if depth == 0 || rng.gen::<f64>() < 0.4 {
        // leaf: prefer variables when some are bound
        if !bound.is_empty() && rng.gen::<f64>() < 0.6 {
            let v = bound[rng.gen_range(0..bound.len())];
            return Term::var(v);
        }
        return Term::int(rng.gen_range(-cfg.max_const..=cfg.max_const));
    }
    match rng.gen_range(0..3) {
        0 => Term::neg(term(rng, cfg, depth - 1, bound)),
        1 => Term::add(
            term(rng, cfg, depth - 1, bound),
            term(rng, cfg, depth - 1, bound),
        ),
        _ => Term::mul(
            term(rng, cfg, depth - 1, bound),
            term(rng, cfg, depth - 1, bound),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sentences_are_closed_and_well_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = SentenceConfig::default();
        for _ in 0..500 {
            let s = random_sentence(&mut rng, &cfg);
            assert!(s.is_sentence(), "{s}");
            s.check_bindings().unwrap();
            assert!(s.quantifier_depth() <= cfg.max_quantifier_depth);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = SentenceConfig::default();
        let a: Vec<String> = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..50).map(|_| random_sentence(&mut rng, &cfg).to_string()).collect()
        };
        let b: Vec<String> = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..50).map(|_| random_sentence(&mut rng, &cfg).to_string()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn roundtrip_through_parser() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = SentenceConfig::default();
        for _ in 0..200 {
            let s = random_sentence(&mut rng, &cfg);
            let printed = s.to_string();
            assert_eq!(crate::fol::parse(&printed).unwrap(), s, "printed = {printed}");
        }
    }
}
