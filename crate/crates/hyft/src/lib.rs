//! Arithmetic in all finite types over a combinator term language, the
//! hybrid extensionality systems built on top of it, and their syntactic
//! translations: the star embedding, elimination of extensionality, the
//! apartness-based alpha-translation, modified realizability clauses, and
//! the strong-retract calculus. A bounded standard-model evaluator checks
//! the semantic side of these constructions on finite domains.
//!
//! Everything is immutable and pure; all operations are safe to call from
//! multiple threads.

pub mod alpha;
pub mod hybrid;
mod memo;
pub mod model;
pub mod retract;
pub mod rewrite;
pub mod syntax;
pub mod typing;

pub use syntax::{Comb, FiniteType, Formula, Term};
pub use typing::Context;

/// All finite types of depth at most `depth` (the base type has depth 1).
/// The returned types share subtrees, so per-node caches hit across the
/// enumeration.
pub fn types_up_to_depth(depth: usize) -> Vec<FiniteType> {
    use std::sync::Arc;
    if depth == 0 {
        return vec![];
    }
    // exact[d] holds the types of depth exactly d
    let mut exact: Vec<Vec<Arc<FiniteType>>> = vec![vec![], vec![Arc::new(FiniteType::Nat)]];
    for d in 2..=depth {
        let mut level = Vec::new();
        let mut push_both = |a: &Arc<FiniteType>, b: &Arc<FiniteType>| {
            level.push(Arc::new(FiniteType::Prod(a.clone(), b.clone())));
            level.push(Arc::new(FiniteType::Arrow(a.clone(), b.clone())));
        };
        // one side has depth exactly d - 1, the other anything smaller
        let (shallower, deepest) = exact.split_at(d - 1);
        let last = &deepest[0];
        for a in last {
            for b in last {
                push_both(a, b);
            }
        }
        for a in last {
            for b in shallower.iter().flatten() {
                push_both(a, b);
                push_both(b, a);
            }
        }
        exact.push(level);
    }
    exact
        .into_iter()
        .flatten()
        .map(|t| t.as_ref().clone())
        .collect()
}

#[cfg(test)]
pub(crate) fn test_enum_types(depth: usize) -> Vec<FiniteType> {
    types_up_to_depth(depth)
}
