//! Internal memoization for the two traversals the term builders hammer:
//! annotation-driven type inference and free-variable sets.
//!
//! Caches are keyed by the address of the shared `Arc` node and each entry
//! pins its term alive, so a key can never be reused while the entry
//! exists. Terms are immutable, which makes the cached answers stable.
//! Caches are thread-local and flushed wholesale when they grow large.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::syntax::{FiniteType, Term};
use crate::typing::TypeError;

const CACHE_LIMIT: usize = 1 << 20;

// keepalive Arc plus the cached answer, keyed by node address
type Pinned<V> = HashMap<usize, (Arc<Term>, V)>;

thread_local! {
    static TYPES: RefCell<Pinned<FiniteType>> = RefCell::new(HashMap::new());
    static VARS: RefCell<Pinned<Arc<BTreeSet<String>>>> = RefCell::new(HashMap::new());
}

/// Annotation-driven type inference with node-level caching.
pub(crate) fn infer_type_cached(t: &Term) -> Result<FiniteType, TypeError> {
    match t {
        Term::Var { ty, .. } => Ok(ty.clone()),
        Term::Const { kind, params } => crate::typing::combinator_type(*kind, params),
        Term::App(f, a) => {
            let fty = infer_arc(f)?;
            let aty = infer_arc(a)?;
            match fty {
                FiniteType::Arrow(dom, cod) => {
                    if *dom == aty {
                        Ok(cod.as_ref().clone())
                    } else {
                        Err(TypeError::Mismatch {
                            expected: dom.as_ref().clone(),
                            found: aty,
                            what: format!("application of {f} to {a}"),
                        })
                    }
                }
                other => Err(TypeError::NotAFunction(other)),
            }
        }
    }
}

fn infer_arc(node: &Arc<Term>) -> Result<FiniteType, TypeError> {
    let key = Arc::as_ptr(node) as usize;
    if let Some(hit) = TYPES.with(|c| c.borrow().get(&key).map(|(_, ty)| ty.clone())) {
        return Ok(hit);
    }
    let ty = infer_type_cached(node)?;
    TYPES.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= CACHE_LIMIT {
            c.clear();
        }
        c.insert(key, (node.clone(), ty.clone()));
    });
    Ok(ty)
}

/// The set of free variable names, shared and cached per node.
pub(crate) fn free_var_names(t: &Term) -> Arc<BTreeSet<String>> {
    match t {
        Term::Var { name, .. } => Arc::new(BTreeSet::from([name.clone()])),
        Term::Const { .. } => Arc::new(BTreeSet::new()),
        Term::App(f, a) => {
            let fa = vars_arc(f);
            let aa = vars_arc(a);
            if fa.is_empty() {
                aa
            } else if aa.is_empty() {
                fa
            } else {
                let mut out = fa.as_ref().clone();
                out.extend(aa.iter().cloned());
                Arc::new(out)
            }
        }
    }
}

fn vars_arc(node: &Arc<Term>) -> Arc<BTreeSet<String>> {
    let key = Arc::as_ptr(node) as usize;
    if let Some(hit) = VARS.with(|c| c.borrow().get(&key).map(|(_, vs)| vs.clone())) {
        return hit;
    }
    let vs = free_var_names(node);
    VARS.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= CACHE_LIMIT {
            c.clear();
        }
        c.insert(key, (node.clone(), vs.clone()));
    });
    vs
}

pub(crate) fn occurs(name: &str, t: &Term) -> bool {
    free_var_names(t).contains(name)
}
