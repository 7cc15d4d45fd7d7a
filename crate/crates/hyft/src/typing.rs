//! Type assignment, substitution, canonical zero terms, and bracket
//! abstraction.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::syntax::{term_free_vars, Comb, FiniteType, Formula, Term};

#[derive(Debug, Error)]
pub enum TypeError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("type mismatch in {what}: expected {expected}, found {found}")]
    Mismatch {
        expected: FiniteType,
        found: FiniteType,
        what: String,
    },
    #[error("{0} is not a function type")]
    NotAFunction(FiniteType),
    #[error("{kind} takes {expected} type parameter(s), got {got}", kind = .kind.token())]
    WrongParamCount { kind: Comb, expected: usize, got: usize },
    #[error(
        "cannot infer type parameters for {kind}; write {kind}[...] explicitly",
        kind = .0.token()
    )]
    AmbiguousParams(Comb),
    #[error("variable {name} is annotated both as {a} and {b}")]
    InconsistentVar { name: String, a: FiniteType, b: FiniteType },
}

/// A finite map from identifiers to types; at most one binding per name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Context(BTreeMap<String, FiniteType>);

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn get(&self, name: &str) -> Option<&FiniteType> {
        self.0.get(name)
    }

    pub fn bind(&mut self, name: &str, ty: FiniteType) {
        self.0.insert(name.to_owned(), ty);
    }

    /// A copy extended with one binding; shadows any existing one.
    pub fn with(&self, name: &str, ty: FiniteType) -> Context {
        let mut c = self.clone();
        c.bind(name, ty);
        c
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &FiniteType)> {
        self.0.iter()
    }
}

impl FromIterator<(String, FiniteType)> for Context {
    fn from_iter<I: IntoIterator<Item = (String, FiniteType)>>(iter: I) -> Context {
        Context(iter.into_iter().collect())
    }
}

/// The combinator type schemas, instantiated.
pub fn combinator_type(kind: Comb, params: &[FiniteType]) -> Result<FiniteType, TypeError> {
    use FiniteType as FT;
    if params.len() != kind.param_arity() {
        return Err(TypeError::WrongParamCount {
            kind,
            expected: kind.param_arity(),
            got: params.len(),
        });
    }
    let p = |i: usize| params[i].clone();
    Ok(match kind {
        // K[r,s]: r -> s -> r
        Comb::K => FT::arrow(p(0), FT::arrow(p(1), p(0))),
        // S[r,s,t]: (r -> s -> t) -> (r -> s) -> r -> t
        Comb::S => FT::arrow(
            FT::arrow(p(0), FT::arrow(p(1), p(2))),
            FT::arrow(FT::arrow(p(0), p(1)), FT::arrow(p(0), p(2))),
        ),
        // PAIR[s,t]: s -> t -> s * t
        Comb::Pair => FT::arrow(p(0), FT::arrow(p(1), FT::prod(p(0), p(1)))),
        // FST[s,t]: s * t -> s
        Comb::Fst => FT::arrow(FT::prod(p(0), p(1)), p(0)),
        // SND[s,t]: s * t -> t
        Comb::Snd => FT::arrow(FT::prod(p(0), p(1)), p(1)),
        Comb::Zero => FT::Nat,
        Comb::Suc => FT::arrow(FT::Nat, FT::Nat),
        // REC[s]: s -> (N -> s -> s) -> N -> s
        Comb::Rec => FT::arrow(
            p(0),
            FT::arrow(
                FT::arrow(FT::Nat, FT::arrow(p(0), p(0))),
                FT::arrow(FT::Nat, p(0)),
            ),
        ),
    })
}

/// The unique type of `t` with free variables read from `ctx`; every
/// free variable must be bound there and its annotation must agree.
pub fn type_of(t: &Term, ctx: &Context) -> Result<FiniteType, TypeError> {
    match t {
        Term::Var { name, ty } => match ctx.get(name) {
            Some(bound) if bound == ty => Ok(ty.clone()),
            Some(bound) => Err(TypeError::InconsistentVar {
                name: name.clone(),
                a: bound.clone(),
                b: ty.clone(),
            }),
            None => Err(TypeError::Unbound(name.clone())),
        },
        Term::Const { kind, params } => combinator_type(*kind, params),
        Term::App(f, a) => {
            let fty = type_of(f, ctx)?;
            let aty = type_of(a, ctx)?;
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

/// Like [`type_of`] but trusting the annotations the variables carry.
pub fn infer_type(t: &Term) -> Result<FiniteType, TypeError> {
    crate::memo::infer_type_cached(t)
}

/// The canonical closed inhabitant `0_sigma` of any finite type. Zero
/// terms serve as dummy arguments all over the translations; component
/// terms are shared across calls when the type trees themselves are.
pub fn zero_term(ty: &FiniteType) -> Term {
    match ty {
        FiniteType::Nat => Term::constant(Comb::Zero, vec![]),
        FiniteType::Prod(a, b) => Term::app2(
            Term::constant(Comb::Pair, vec![a.as_ref().clone(), b.as_ref().clone()]),
            zero_arc(a),
            zero_arc(b),
        ),
        FiniteType::Arrow(a, b) => Term::app(
            Term::constant(Comb::K, vec![b.as_ref().clone(), a.as_ref().clone()]),
            zero_arc(b),
        ),
    }
}

// Pointer-keyed cache over shared type nodes; each entry pins its key
// alive, so addresses cannot be reused while cached.
fn zero_arc(ty: &std::sync::Arc<FiniteType>) -> Term {
    use std::cell::RefCell;
    use std::collections::HashMap;
    use std::sync::Arc;
    thread_local! {
        static CACHE: RefCell<HashMap<usize, (Arc<FiniteType>, Term)>> =
            RefCell::new(HashMap::new());
    }
    let key = Arc::as_ptr(ty) as usize;
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&key).map(|(_, z)| z.clone())) {
        return hit;
    }
    let built = zero_term(ty);
    CACHE.with(|c| {
        c.borrow_mut().insert(key, (ty.clone(), built.clone()));
    });
    built
}

/// Replaces every occurrence of the variable `x` in `t` by `s`. Terms have
/// no binders, so no capture can occur.
pub fn substitute_term(t: &Term, x: &str, s: &Term) -> Result<Term, TypeError> {
    let sty = infer_type(s)?;
    subst_term_checked(t, x, s, &sty)
}

fn subst_term_checked(t: &Term, x: &str, s: &Term, sty: &FiniteType) -> Result<Term, TypeError> {
    match t {
        Term::Var { name, ty } if name == x => {
            if ty == sty {
                Ok(s.clone())
            } else {
                Err(TypeError::Mismatch {
                    expected: ty.clone(),
                    found: sty.clone(),
                    what: format!("substitution for {x}"),
                })
            }
        }
        Term::Var { .. } | Term::Const { .. } => Ok(t.clone()),
        Term::App(f, a) => Ok(Term::app(
            subst_term_checked(f, x, s, sty)?,
            subst_term_checked(a, x, s, sty)?,
        )),
    }
}

/// Smallest decorated name not in `avoid`: the base itself, then
/// `base1`, `base2`, ...
pub fn fresh_name(base: &str, avoid: &dyn Fn(&str) -> bool) -> String {
    if !avoid(base) {
        return base.to_owned();
    }
    let mut k = 1u64;
    loop {
        let cand = format!("{base}{k}");
        if !avoid(&cand) {
            return cand;
        }
        k += 1;
    }
}

/// Capture-avoiding substitution; colliding bound variables are renamed
/// with a deterministic counter.
pub fn substitute_formula(phi: &Formula, x: &str, s: &Term) -> Result<Formula, TypeError> {
    let s_vars: Vec<String> = term_free_vars(s).into_keys().collect();
    subst_formula_inner(phi, x, s, &s_vars)
}

fn subst_formula_inner(
    phi: &Formula,
    x: &str,
    s: &Term,
    s_vars: &[String],
) -> Result<Formula, TypeError> {
    Ok(match phi {
        Formula::PrimEq(ty, a, b) => Formula::PrimEq(
            ty.clone(),
            substitute_term(a, x, s)?,
            substitute_term(b, x, s)?,
        ),
        Formula::ExtEq(ty, a, b) => Formula::ExtEq(
            ty.clone(),
            substitute_term(a, x, s)?,
            substitute_term(b, x, s)?,
        ),
        Formula::Ext(ty, a) => Formula::Ext(ty.clone(), substitute_term(a, x, s)?),
        Formula::Falsum => Formula::Falsum,
        Formula::And(a, b) => Formula::and(
            subst_formula_inner(a, x, s, s_vars)?,
            subst_formula_inner(b, x, s, s_vars)?,
        ),
        Formula::Or(a, b) => Formula::or(
            subst_formula_inner(a, x, s, s_vars)?,
            subst_formula_inner(b, x, s, s_vars)?,
        ),
        Formula::Imp(a, b) => Formula::imp(
            subst_formula_inner(a, x, s, s_vars)?,
            subst_formula_inner(b, x, s, s_vars)?,
        ),
        Formula::Forall(y, ty, body) | Formula::Exists(y, ty, body) => {
            let forall = matches!(phi, Formula::Forall(..));
            if y == x {
                // binder shadows the substituted variable
                phi.clone()
            } else {
                let (y, body) = if s_vars.iter().any(|v| v == y) {
                    let body_vars = crate::syntax::formula_free_vars(body);
                    let avoid = |cand: &str| {
                        cand == x || s_vars.iter().any(|v| v == cand) || body_vars.contains_key(cand)
                    };
                    let y2 = fresh_name(y, &avoid);
                    let renamed =
                        subst_formula_inner(body, y, &Term::var(&y2, ty.clone()), &[])?;
                    (y2, renamed)
                } else {
                    (y.clone(), body.as_ref().clone())
                };
                let body = subst_formula_inner(&body, x, s, s_vars)?;
                if forall {
                    Formula::forall(y, ty.clone(), body)
                } else {
                    Formula::exists(y, ty.clone(), body)
                }
            }
        }
    })
}

/// Checks that every atom of the formula is well-typed at its annotated
/// type in the ambient context; quantifiers extend the context.
pub fn check_formula(phi: &Formula, ctx: &Context) -> Result<(), TypeError> {
    match phi {
        Formula::PrimEq(ty, a, b) | Formula::ExtEq(ty, a, b) => {
            for t in [a, b] {
                let found = type_of(t, ctx)?;
                if &found != ty {
                    return Err(TypeError::Mismatch {
                        expected: ty.clone(),
                        found,
                        what: format!("equality atom over {t}"),
                    });
                }
            }
            Ok(())
        }
        Formula::Ext(ty, t) => {
            let found = type_of(t, ctx)?;
            if &found != ty {
                return Err(TypeError::Mismatch {
                    expected: ty.clone(),
                    found,
                    what: format!("ext atom over {t}"),
                });
            }
            Ok(())
        }
        Formula::Falsum => Ok(()),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            check_formula(a, ctx)?;
            check_formula(b, ctx)
        }
        Formula::Forall(x, ty, body) | Formula::Exists(x, ty, body) => {
            check_formula(body, &ctx.with(x, ty.clone()))
        }
    }
}

/// Bracket abstraction, clause by clause: the variable goes to `s k k`,
/// any other variable or combinator `c` goes to `k c`, and an application
/// `s t` goes to `s (\x.s) (\x.t)`. No shortcuts, so
/// `(\x.t) s == t[s/x]` holds definitionally under the rewrite rules.
pub fn lambda_abstract(x: &str, ty: FiniteType, t: &Term) -> Result<Term, TypeError> {
    abstract_inner(x, ty, t, false)
}

/// Bracket abstraction with the usual shortcuts: `\x.t := k t` when `x`
/// does not occur in `t`, and the eta contraction `\x.f x := f`. Produces
/// much smaller terms; used for building the larger closed combinators.
pub fn lambda_abstract_opt(x: &str, ty: FiniteType, t: &Term) -> Result<Term, TypeError> {
    abstract_inner(x, ty, t, true)
}

fn abstract_inner(x: &str, xty: FiniteType, t: &Term, opt: bool) -> Result<Term, TypeError> {
    use FiniteType as FT;
    if opt && !crate::memo::occurs(x, t) {
        let tty = infer_type(t)?;
        return Ok(Term::app(
            Term::constant(Comb::K, vec![tty, xty]),
            t.clone(),
        ));
    }
    match t {
        Term::Var { name, ty } if name == x => {
            if *ty != xty {
                return Err(TypeError::InconsistentVar {
                    name: name.clone(),
                    a: xty,
                    b: ty.clone(),
                });
            }
            // \x:s.x := s k k at  s[s, s->s, s] k[s, s->s] k[s, s]
            let ss = FT::arrow(xty.clone(), xty.clone());
            Ok(Term::app2(
                Term::constant(Comb::S, vec![xty.clone(), ss.clone(), xty.clone()]),
                Term::constant(Comb::K, vec![xty.clone(), ss]),
                Term::constant(Comb::K, vec![xty.clone(), xty]),
            ))
        }
        Term::Var { .. } | Term::Const { .. } => {
            let tty = infer_type(t)?;
            Ok(Term::app(
                Term::constant(Comb::K, vec![tty, xty]),
                t.clone(),
            ))
        }
        Term::App(f, a) => {
            if opt {
                if let Term::Var { name, .. } = a.as_ref() {
                    if name == x && !crate::memo::occurs(x, f) {
                        return Ok(f.as_ref().clone());
                    }
                }
            }
            let fty = infer_type(f)?;
            let (dom, cod) = match fty {
                FT::Arrow(d, c) => (d.as_ref().clone(), c.as_ref().clone()),
                other => return Err(TypeError::NotAFunction(other)),
            };
            let lf = abstract_inner(x, xty.clone(), f, opt)?;
            let la = abstract_inner(x, xty.clone(), a, opt)?;
            Ok(Term::app2(
                Term::constant(Comb::S, vec![xty, dom, cod]),
                lf,
                la,
            ))
        }
    }
}
