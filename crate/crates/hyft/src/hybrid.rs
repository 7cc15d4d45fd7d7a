//! The hybrid language layer: axiom schema generation for the hybrid
//! systems, the star translation into them, the elimination-of-
//! extensionality translation out of them, unfolding of extensional
//! equality, and the modified-realizability clauses for the new atoms.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{
    formula_free_vars, fst_term, snd_term, term_free_vars, Comb, FiniteType, Formula,
    Term,
};
use crate::typing::{fresh_name, substitute_formula, TypeError};

#[derive(Debug, Error)]
pub enum HybridError {
    #[error("star translation is only defined on formulas without ext/= atoms")]
    StarPrecondition,
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Deterministic supply of names not colliding with a fixed avoid set.
struct Names {
    used: BTreeSet<String>,
}

impl Names {
    fn avoiding<'a>(vars: impl IntoIterator<Item = &'a String>) -> Names {
        Names { used: vars.into_iter().cloned().collect() }
    }

    fn take(&mut self, base: &str) -> String {
        let name = fresh_name(base, &|c: &str| self.used.contains(c));
        self.used.insert(name.clone());
        name
    }
}

fn tvar(name: &str, ty: &FiniteType) -> Term {
    Term::var(name, ty.clone())
}

// ---------------------------------------------------------------------------
// Axiom schemas
// ---------------------------------------------------------------------------

/// The defining axioms of the hybrid system, instantiated at `sigma`,
/// `tau`: base clauses for `=` and `ext`, product and arrow clauses,
/// congruence of `ext` with primitive equality, and `ext(c)` for the
/// combinators. The axiom `x = y -> ext(x) -> ext(y)` is deliberately not
/// part of the list; see [`ext_respects_exteq_axiom`].
#[allow(clippy::vec_init_then_push)]
pub fn hybrid_axioms(sigma: &FiniteType, tau: &FiniteType) -> Vec<Formula> {
    use FiniteType as FT;
    let nat = FT::Nat;
    let prod = FT::prod(sigma.clone(), tau.clone());
    let arrow = FT::arrow(sigma.clone(), tau.clone());
    let x = "x";
    let y = "y";
    let f = "f";

    let mut axioms = Vec::new();

    // x =_0 y <-> x == y
    axioms.push(Formula::forall(
        x,
        nat.clone(),
        Formula::forall(
            y,
            nat.clone(),
            Formula::iff(
                Formula::ExtEq(nat.clone(), tvar(x, &nat), tvar(y, &nat)),
                Formula::PrimEq(nat.clone(), tvar(x, &nat), tvar(y, &nat)),
            ),
        ),
    ));

    // forall x:0. ext(x)
    axioms.push(Formula::forall(
        x,
        nat.clone(),
        Formula::Ext(nat.clone(), tvar(x, &nat)),
    ));

    // product clause for =
    axioms.push(Formula::forall(
        x,
        prod.clone(),
        Formula::forall(
            y,
            prod.clone(),
            Formula::iff(
                Formula::ExtEq(prod.clone(), tvar(x, &prod), tvar(y, &prod)),
                Formula::and(
                    Formula::ExtEq(
                        sigma.clone(),
                        fst_term(sigma, tau, tvar(x, &prod)),
                        fst_term(sigma, tau, tvar(y, &prod)),
                    ),
                    Formula::ExtEq(
                        tau.clone(),
                        snd_term(sigma, tau, tvar(x, &prod)),
                        snd_term(sigma, tau, tvar(y, &prod)),
                    ),
                ),
            ),
        ),
    ));

    // product clause for ext
    axioms.push(Formula::forall(
        x,
        prod.clone(),
        Formula::iff(
            Formula::Ext(prod.clone(), tvar(x, &prod)),
            Formula::and(
                Formula::Ext(sigma.clone(), fst_term(sigma, tau, tvar(x, &prod))),
                Formula::Ext(tau.clone(), snd_term(sigma, tau, tvar(x, &prod))),
            ),
        ),
    ));

    // f =_{s->t} g <-> forallE x:s. f x = g x
    let g = "g";
    axioms.push(Formula::forall(
        f,
        arrow.clone(),
        Formula::forall(
            g,
            arrow.clone(),
            Formula::iff(
                Formula::ExtEq(arrow.clone(), tvar(f, &arrow), tvar(g, &arrow)),
                Formula::forall(
                    x,
                    sigma.clone(),
                    Formula::imp(
                        Formula::Ext(sigma.clone(), tvar(x, sigma)),
                        Formula::ExtEq(
                            tau.clone(),
                            Term::app(tvar(f, &arrow), tvar(x, sigma)),
                            Term::app(tvar(g, &arrow), tvar(x, sigma)),
                        ),
                    ),
                ),
            ),
        ),
    ));

    // ext(f) -> ext(x) -> ext(f x)
    axioms.push(Formula::forall(
        f,
        arrow.clone(),
        Formula::forall(
            x,
            sigma.clone(),
            Formula::imp(
                Formula::Ext(arrow.clone(), tvar(f, &arrow)),
                Formula::imp(
                    Formula::Ext(sigma.clone(), tvar(x, sigma)),
                    Formula::Ext(tau.clone(), Term::app(tvar(f, &arrow), tvar(x, sigma))),
                ),
            ),
        ),
    ));

    // x == y -> ext(x) -> ext(y)
    axioms.push(Formula::forall(
        x,
        sigma.clone(),
        Formula::forall(
            y,
            sigma.clone(),
            Formula::imp(
                Formula::PrimEq(sigma.clone(), tvar(x, sigma), tvar(y, sigma)),
                Formula::imp(
                    Formula::Ext(sigma.clone(), tvar(x, sigma)),
                    Formula::Ext(sigma.clone(), tvar(y, sigma)),
                ),
            ),
        ),
    ));

    // ext(c) for every combinator at the given parameters
    let combs: Vec<Term> = vec![
        Term::constant(Comb::K, vec![sigma.clone(), tau.clone()]),
        Term::constant(Comb::S, vec![sigma.clone(), tau.clone(), tau.clone()]),
        Term::constant(Comb::Pair, vec![sigma.clone(), tau.clone()]),
        Term::constant(Comb::Fst, vec![sigma.clone(), tau.clone()]),
        Term::constant(Comb::Snd, vec![sigma.clone(), tau.clone()]),
        Term::constant(Comb::Zero, vec![]),
        Term::constant(Comb::Suc, vec![]),
        Term::constant(Comb::Rec, vec![sigma.clone()]),
    ];
    for c in combs {
        let ty = crate::typing::infer_type(&c).expect("combinator instance");
        axioms.push(Formula::Ext(ty, c));
    }

    axioms
}

/// `ext(f) -> ext(x) -> ext(y) -> x = y -> f x = f y`, closed.
pub fn ext_axiom(sigma: &FiniteType, tau: &FiniteType) -> Formula {
    let arrow = FiniteType::arrow(sigma.clone(), tau.clone());
    let f = tvar("f", &arrow);
    let x = tvar("x", sigma);
    let y = tvar("y", sigma);
    Formula::forall(
        "f",
        arrow.clone(),
        Formula::forall(
            "x",
            sigma.clone(),
            Formula::forall(
                "y",
                sigma.clone(),
                Formula::imp(
                    Formula::Ext(arrow.clone(), f.clone()),
                    Formula::imp(
                        Formula::Ext(sigma.clone(), x.clone()),
                        Formula::imp(
                            Formula::Ext(sigma.clone(), y.clone()),
                            Formula::imp(
                                Formula::ExtEq(sigma.clone(), x.clone(), y.clone()),
                                Formula::ExtEq(
                                    tau.clone(),
                                    Term::app(f.clone(), x),
                                    Term::app(f, y),
                                ),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    )
}

/// The reformulation of the extensionality axiom at types of the shape
/// `sigma -> 0`, which avoids extensional equality altogether.
pub fn ext_prime_axiom(sigma: &FiniteType, tau: &FiniteType) -> Formula {
    let nat = FiniteType::Nat;
    let s0 = FiniteType::arrow(sigma.clone(), nat.clone());
    let t0 = FiniteType::arrow(tau.clone(), nat.clone());
    let fty = FiniteType::arrow(s0.clone(), t0.clone());
    let f = tvar("f", &fty);
    let x = tvar("x", &s0);
    let y = tvar("y", &s0);
    let u = tvar("u", sigma);
    let v = tvar("v", tau);

    let premise = Formula::forall(
        "u",
        sigma.clone(),
        Formula::imp(
            Formula::Ext(sigma.clone(), u.clone()),
            Formula::PrimEq(
                nat.clone(),
                Term::app(x.clone(), u.clone()),
                Term::app(y.clone(), u.clone()),
            ),
        ),
    );
    let conclusion = Formula::forall(
        "v",
        tau.clone(),
        Formula::imp(
            Formula::Ext(tau.clone(), v.clone()),
            Formula::PrimEq(
                nat.clone(),
                Term::app(Term::app(f.clone(), x.clone()), v.clone()),
                Term::app(Term::app(f.clone(), y.clone()), v.clone()),
            ),
        ),
    );

    Formula::forall(
        "f",
        fty.clone(),
        Formula::forall(
            "x",
            s0.clone(),
            Formula::forall(
                "y",
                s0.clone(),
                Formula::imp(
                    Formula::Ext(fty.clone(), f),
                    Formula::imp(
                        Formula::Ext(s0.clone(), x),
                        Formula::imp(
                            Formula::Ext(s0.clone(), y),
                            Formula::imp(premise, conclusion),
                        ),
                    ),
                ),
            ),
        ),
    )
}

/// Type of the converse-extensionality witness `Z` at `sigma`, `tau`:
/// `((sigma -> 0) -> tau -> 0) -> (sigma -> 0) -> (sigma -> 0) -> tau -> sigma`.
pub fn cext_witness_type(sigma: &FiniteType, tau: &FiniteType) -> FiniteType {
    let nat = FiniteType::Nat;
    let s0 = FiniteType::arrow(sigma.clone(), nat.clone());
    let t0 = FiniteType::arrow(tau.clone(), nat);
    FiniteType::arrow(
        FiniteType::arrow(s0.clone(), t0),
        FiniteType::arrow(
            s0.clone(),
            FiniteType::arrow(s0, FiniteType::arrow(tau.clone(), sigma.clone())),
        ),
    )
}

/// Converse extensionality: a witness functional transports a point where
/// `f x` and `f y` differ back to a point where `x` and `y` differ. The
/// leading existential is not relativized: the witness need not be
/// extensional.
pub fn cext_axiom(sigma: &FiniteType, tau: &FiniteType) -> Formula {
    let nat = FiniteType::Nat;
    let s0 = FiniteType::arrow(sigma.clone(), nat.clone());
    let t0 = FiniteType::arrow(tau.clone(), nat.clone());
    let fty = FiniteType::arrow(s0.clone(), t0.clone());
    let zty = cext_witness_type(sigma, tau);

    let z = tvar("Z", &zty);
    let f = tvar("f", &fty);
    let x = tvar("x", &s0);
    let y = tvar("y", &s0);
    let v = tvar("v", tau);
    let zfxyv = Term::app(
        Term::app(Term::app(Term::app(z, f.clone()), x.clone()), y.clone()),
        v.clone(),
    );

    let apart_out = Formula::neg(Formula::PrimEq(
        nat.clone(),
        Term::app(Term::app(f.clone(), x.clone()), v.clone()),
        Term::app(Term::app(f.clone(), y.clone()), v.clone()),
    ));
    let apart_in = Formula::and(
        Formula::Ext(sigma.clone(), zfxyv.clone()),
        Formula::neg(Formula::PrimEq(
            nat.clone(),
            Term::app(x.clone(), zfxyv.clone()),
            Term::app(y.clone(), zfxyv),
        )),
    );

    let rel = |name: &str, ty: &FiniteType, body: Formula| {
        Formula::forall(
            name,
            ty.clone(),
            Formula::imp(Formula::Ext(ty.clone(), tvar(name, ty)), body),
        )
    };

    Formula::exists(
        "Z",
        zty,
        rel(
            "f",
            &fty,
            rel(
                "x",
                &s0,
                rel("y", &s0, rel("v", tau, Formula::imp(apart_out, apart_in))),
            ),
        ),
    )
}

/// The axiom `x = y -> ext(x) -> ext(y)`, which both translations happen
/// to validate but which is not an axiom of the hybrid system.
pub fn ext_respects_exteq_axiom(sigma: &FiniteType) -> Formula {
    let x = tvar("x", sigma);
    let y = tvar("y", sigma);
    Formula::forall(
        "x",
        sigma.clone(),
        Formula::forall(
            "y",
            sigma.clone(),
            Formula::imp(
                Formula::ExtEq(sigma.clone(), x.clone(), y.clone()),
                Formula::imp(
                    Formula::Ext(sigma.clone(), x),
                    Formula::Ext(sigma.clone(), y),
                ),
            ),
        ),
    )
}

// ---------------------------------------------------------------------------
// Star translation
// ---------------------------------------------------------------------------

/// Result of the star translation: the translated body plus the free
/// variables whose extensionality the soundness statement assumes.
#[derive(Debug, Clone)]
pub struct StarTranslation {
    pub formula: Formula,
    pub free_vars: Vec<(String, FiniteType)>,
}

impl StarTranslation {
    /// `ext(x_1) -> ... -> ext(x_n) -> phi*`.
    pub fn guarded(&self) -> Formula {
        let mut out = self.formula.clone();
        for (name, ty) in self.free_vars.iter().rev() {
            out = Formula::imp(Formula::Ext(ty.clone(), tvar(name, ty)), out);
        }
        out
    }
}

/// Replaces `==` by `=` and relativizes every quantifier to `ext`. Only
/// defined on formulas that do not already mention `ext` or `=`.
pub fn star_translate(phi: &Formula) -> Result<StarTranslation, HybridError> {
    let formula = star_inner(phi)?;
    let free_vars = formula_free_vars(phi).into_iter().collect();
    Ok(StarTranslation { formula, free_vars })
}

fn star_inner(phi: &Formula) -> Result<Formula, HybridError> {
    Ok(match phi {
        Formula::PrimEq(ty, s, t) => Formula::ExtEq(ty.clone(), s.clone(), t.clone()),
        Formula::ExtEq(..) | Formula::Ext(..) => return Err(HybridError::StarPrecondition),
        Formula::Falsum => Formula::Falsum,
        Formula::And(a, b) => Formula::and(star_inner(a)?, star_inner(b)?),
        Formula::Or(a, b) => Formula::or(star_inner(a)?, star_inner(b)?),
        Formula::Imp(a, b) => Formula::imp(star_inner(a)?, star_inner(b)?),
        Formula::Forall(x, ty, body) => {
            let guard = Formula::Ext(ty.clone(), tvar(x, ty));
            Formula::forall(x.clone(), ty.clone(), Formula::imp(guard, star_inner(body)?))
        }
        Formula::Exists(x, ty, body) => {
            let guard = Formula::Ext(ty.clone(), tvar(x, ty));
            Formula::exists(x.clone(), ty.clone(), Formula::and(guard, star_inner(body)?))
        }
    })
}

// ---------------------------------------------------------------------------
// Elimination of extensionality
// ---------------------------------------------------------------------------

/// The definitional expansion of `ext_sigma(x)`: truth at the base type,
/// componentwise at products, and at arrows the conjunction of
/// "preserves extensionality" and "preserves extensional equality". The
/// output contains no `ext`/`=` atoms.
pub fn ext_def_formula(sigma: &FiniteType, x: &Term) -> Formula {
    let fv = term_free_vars(x);
    let mut names = Names::avoiding(fv.keys());
    ext_def_inner(sigma, x, &mut names)
}

fn ext_def_inner(sigma: &FiniteType, x: &Term, names: &mut Names) -> Formula {
    match sigma {
        FiniteType::Nat => Formula::truth(),
        FiniteType::Prod(a, b) => Formula::and(
            ext_def_inner(a, &fst_term(a, b, x.clone()), names),
            ext_def_inner(b, &snd_term(a, b, x.clone()), names),
        ),
        FiniteType::Arrow(a, b) => {
            let xn = names.take("x");
            let xv = tvar(&xn, a);
            let preserves_ext = Formula::forall(
                xn.clone(),
                a.as_ref().clone(),
                Formula::imp(
                    ext_def_inner(a, &xv, names),
                    ext_def_inner(b, &Term::app(x.clone(), xv.clone()), names),
                ),
            );
            let xn2 = names.take("x");
            let yn = names.take("y");
            let xv2 = tvar(&xn2, a);
            let yv = tvar(&yn, a);
            let preserves_eq = Formula::forall(
                xn2.clone(),
                a.as_ref().clone(),
                Formula::forall(
                    yn.clone(),
                    a.as_ref().clone(),
                    Formula::imp(
                        exteq_def_inner(a, &xv2, &yv, names),
                        Formula::imp(
                            ext_def_inner(a, &xv2, names),
                            Formula::imp(
                                ext_def_inner(a, &yv, names),
                                exteq_def_inner(
                                    b,
                                    &Term::app(x.clone(), xv2.clone()),
                                    &Term::app(x.clone(), yv.clone()),
                                    names,
                                ),
                            ),
                        ),
                    ),
                ),
            );
            Formula::and(preserves_ext, preserves_eq)
        }
    }
}

/// The definitional expansion of `x =_sigma y`; output contains no
/// `ext`/`=` atoms.
pub fn exteq_def_formula(sigma: &FiniteType, x: &Term, y: &Term) -> Formula {
    let mut fv = term_free_vars(x);
    fv.append(&mut term_free_vars(y));
    let mut names = Names::avoiding(fv.keys());
    exteq_def_inner(sigma, x, y, &mut names)
}

fn exteq_def_inner(sigma: &FiniteType, x: &Term, y: &Term, names: &mut Names) -> Formula {
    match sigma {
        FiniteType::Nat => Formula::PrimEq(FiniteType::Nat, x.clone(), y.clone()),
        FiniteType::Prod(a, b) => Formula::and(
            exteq_def_inner(a, &fst_term(a, b, x.clone()), &fst_term(a, b, y.clone()), names),
            exteq_def_inner(b, &snd_term(a, b, x.clone()), &snd_term(a, b, y.clone()), names),
        ),
        FiniteType::Arrow(a, b) => {
            let un = names.take("x");
            let uv = tvar(&un, a);
            Formula::forall(
                un.clone(),
                a.as_ref().clone(),
                Formula::imp(
                    ext_def_inner(a, &uv, names),
                    exteq_def_inner(
                        b,
                        &Term::app(x.clone(), uv.clone()),
                        &Term::app(y.clone(), uv.clone()),
                        names,
                    ),
                ),
            )
        }
    }
}

/// Expands every `ext` and `=` atom into its definitional reading. The
/// identity on formulas already free of those atoms.
pub fn ee_translate(phi: &Formula) -> Formula {
    match phi {
        Formula::PrimEq(..) | Formula::Falsum => phi.clone(),
        Formula::ExtEq(ty, s, t) => exteq_def_formula(ty, s, t),
        Formula::Ext(ty, t) => ext_def_formula(ty, t),
        Formula::And(a, b) => Formula::and(ee_translate(a), ee_translate(b)),
        Formula::Or(a, b) => Formula::or(ee_translate(a), ee_translate(b)),
        Formula::Imp(a, b) => Formula::imp(ee_translate(a), ee_translate(b)),
        Formula::Forall(x, ty, body) => Formula::forall(x.clone(), ty.clone(), ee_translate(body)),
        Formula::Exists(x, ty, body) => Formula::exists(x.clone(), ty.clone(), ee_translate(body)),
    }
}

/// True when the formula mentions an `ext` or `=` atom anywhere.
pub fn has_hybrid_atoms(phi: &Formula) -> bool {
    match phi {
        Formula::ExtEq(..) | Formula::Ext(..) => true,
        Formula::PrimEq(..) | Formula::Falsum => false,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            has_hybrid_atoms(a) || has_hybrid_atoms(b)
        }
        Formula::Forall(_, _, body) | Formula::Exists(_, _, body) => has_hybrid_atoms(body),
    }
}

// ---------------------------------------------------------------------------
// Unfolding extensional equality as an abbreviation
// ---------------------------------------------------------------------------

/// Rewrites `x =_sigma y` through the defining equivalences of the hybrid
/// system: primitive equality at the base type, componentwise at products,
/// and relativized pointwise equality at arrows. Unlike the elimination
/// translation, `ext` atoms are left untouched.
pub fn exteq_unfold(sigma: &FiniteType, x: &Term, y: &Term) -> Formula {
    let mut fv = term_free_vars(x);
    fv.append(&mut term_free_vars(y));
    let mut names = Names::avoiding(fv.keys());
    exteq_unfold_inner(sigma, x, y, &mut names)
}

fn exteq_unfold_inner(sigma: &FiniteType, x: &Term, y: &Term, names: &mut Names) -> Formula {
    match sigma {
        FiniteType::Nat => Formula::PrimEq(FiniteType::Nat, x.clone(), y.clone()),
        FiniteType::Prod(a, b) => Formula::and(
            exteq_unfold_inner(a, &fst_term(a, b, x.clone()), &fst_term(a, b, y.clone()), names),
            exteq_unfold_inner(b, &snd_term(a, b, x.clone()), &snd_term(a, b, y.clone()), names),
        ),
        FiniteType::Arrow(a, b) => {
            let un = names.take("u");
            let uv = tvar(&un, a);
            Formula::forall(
                un.clone(),
                a.as_ref().clone(),
                Formula::imp(
                    Formula::Ext(a.as_ref().clone(), uv.clone()),
                    exteq_unfold_inner(
                        b,
                        &Term::app(x.clone(), uv.clone()),
                        &Term::app(y.clone(), uv),
                        names,
                    ),
                ),
            )
        }
    }
}

/// Applies [`exteq_unfold`] to every `=` atom of a formula.
pub fn unfold_exteq_in_formula(phi: &Formula) -> Formula {
    match phi {
        Formula::ExtEq(ty, s, t) => exteq_unfold(ty, s, t),
        Formula::PrimEq(..) | Formula::Ext(..) | Formula::Falsum => phi.clone(),
        Formula::And(a, b) => Formula::and(unfold_exteq_in_formula(a), unfold_exteq_in_formula(b)),
        Formula::Or(a, b) => Formula::or(unfold_exteq_in_formula(a), unfold_exteq_in_formula(b)),
        Formula::Imp(a, b) => Formula::imp(unfold_exteq_in_formula(a), unfold_exteq_in_formula(b)),
        Formula::Forall(x, ty, body) => {
            Formula::forall(x.clone(), ty.clone(), unfold_exteq_in_formula(body))
        }
        Formula::Exists(x, ty, body) => {
            Formula::exists(x.clone(), ty.clone(), unfold_exteq_in_formula(body))
        }
    }
}

// ---------------------------------------------------------------------------
// Modified realizability
// ---------------------------------------------------------------------------

/// `x mr phi`: the realizer type and the realizability formula. Atoms are
/// self-realizing (the realizer does not occur in the output); when the
/// whole formula needs no realizer data the reported type is `N` and the
/// variable is unused.
pub fn mr_translate(x: &str, phi: &Formula) -> Result<(FiniteType, Formula), TypeError> {
    let fv = formula_free_vars(phi);
    let mut names = Names::avoiding(fv.keys().chain(std::iter::once(&x.to_owned())));
    let (slot, formula) = mr_inner(phi, &mut names)?;
    match slot {
        None => Ok((FiniteType::Nat, formula)),
        Some((ty, var)) => {
            let formula = substitute_formula(&formula, &var, &tvar(x, &ty))?;
            Ok((ty, formula))
        }
    }
}

type MrSlot = Option<(FiniteType, String)>;

fn mr_inner(phi: &Formula, names: &mut Names) -> Result<(MrSlot, Formula), TypeError> {
    use FiniteType as FT;
    Ok(match phi {
        // prime formulas realize themselves
        Formula::PrimEq(..) | Formula::ExtEq(..) | Formula::Ext(..) | Formula::Falsum => {
            (None, phi.clone())
        }
        Formula::And(a, b) => {
            let (sa, fa) = mr_inner(a, names)?;
            let (sb, fb) = mr_inner(b, names)?;
            match (sa, sb) {
                (None, None) => (None, Formula::and(fa, fb)),
                (Some(slot), None) => (Some(slot), Formula::and(fa, fb)),
                (None, Some(slot)) => (Some(slot), Formula::and(fa, fb)),
                (Some((ta, va)), Some((tb, vb))) => {
                    let r = names.take("r");
                    let rv = tvar(&r, &FT::prod(ta.clone(), tb.clone()));
                    let fa = substitute_formula(&fa, &va, &fst_term(&ta, &tb, rv.clone()))?;
                    let fb = substitute_formula(&fb, &vb, &snd_term(&ta, &tb, rv))?;
                    (Some((FT::prod(ta, tb), r)), Formula::and(fa, fb))
                }
            }
        }
        Formula::Or(a, b) => {
            let (sa, fa) = mr_inner(a, names)?;
            let (sb, fb) = mr_inner(b, names)?;
            let r = names.take("r");
            // the realizer always carries the selector tag
            let (ty, left, right) = match (sa, sb) {
                (None, None) => (FT::Nat, fa, fb),
                (Some((ta, va)), None) => {
                    let rv = tvar(&r, &FT::prod(FT::Nat, ta.clone()));
                    let fa = substitute_formula(&fa, &va, &snd_term(&FT::Nat, &ta, rv))?;
                    (FT::prod(FT::Nat, ta), fa, fb)
                }
                (None, Some((tb, vb))) => {
                    let rv = tvar(&r, &FT::prod(FT::Nat, tb.clone()));
                    let fb = substitute_formula(&fb, &vb, &snd_term(&FT::Nat, &tb, rv))?;
                    (FT::prod(FT::Nat, tb), fa, fb)
                }
                (Some((ta, va)), Some((tb, vb))) => {
                    let payload = FT::prod(ta.clone(), tb.clone());
                    let rv = tvar(&r, &FT::prod(FT::Nat, payload.clone()));
                    let body = snd_term(&FT::Nat, &payload, rv);
                    let fa = substitute_formula(&fa, &va, &fst_term(&ta, &tb, body.clone()))?;
                    let fb = substitute_formula(&fb, &vb, &snd_term(&ta, &tb, body))?;
                    (FT::prod(FT::Nat, payload), fa, fb)
                }
            };
            let rv = tvar(&r, &ty);
            let tag = if ty == FT::Nat {
                rv
            } else {
                match &ty {
                    FT::Prod(_, payload) => fst_term(&FT::Nat, payload, rv),
                    _ => unreachable!(),
                }
            };
            let zero = Formula::PrimEq(FT::Nat, tag.clone(), Term::numeral(0));
            let f = Formula::and(
                Formula::imp(zero.clone(), left),
                Formula::imp(Formula::neg(zero), right),
            );
            (Some((ty, r)), f)
        }
        Formula::Imp(a, b) => {
            let (sa, fa) = mr_inner(a, names)?;
            let (sb, fb) = mr_inner(b, names)?;
            match (sa, sb) {
                (None, None) => (None, Formula::imp(fa, fb)),
                (None, Some(slot)) => (Some(slot), Formula::imp(fa, fb)),
                (Some((ta, va)), None) => {
                    let y = names.take("u");
                    let fa = substitute_formula(&fa, &va, &tvar(&y, &ta))?;
                    (
                        None,
                        Formula::forall(y, ta, Formula::imp(fa, fb)),
                    )
                }
                (Some((ta, va)), Some((tb, vb))) => {
                    let r = names.take("r");
                    let y = names.take("u");
                    let rty = FT::arrow(ta.clone(), tb.clone());
                    let fa = substitute_formula(&fa, &va, &tvar(&y, &ta))?;
                    let fb = substitute_formula(
                        &fb,
                        &vb,
                        &Term::app(tvar(&r, &rty), tvar(&y, &ta)),
                    )?;
                    (
                        Some((rty, r)),
                        Formula::forall(y, ta, Formula::imp(fa, fb)),
                    )
                }
            }
        }
        Formula::Forall(v, vty, body) => {
            let (sb, fb) = mr_inner(body, names)?;
            match sb {
                None => (None, Formula::forall(v.clone(), vty.clone(), fb)),
                Some((tb, vb)) => {
                    let r = names.take("r");
                    let rty = FT::arrow(vty.clone(), tb.clone());
                    let fb = substitute_formula(
                        &fb,
                        &vb,
                        &Term::app(tvar(&r, &rty), tvar(v, vty)),
                    )?;
                    (
                        Some((rty, r)),
                        Formula::forall(v.clone(), vty.clone(), fb),
                    )
                }
            }
        }
        Formula::Exists(v, vty, body) => {
            let (sb, fb) = mr_inner(body, names)?;
            match sb {
                None => {
                    let r = names.take("r");
                    let fb = substitute_formula(&fb, v, &tvar(&r, vty))?;
                    (Some((vty.clone(), r)), fb)
                }
                Some((tb, vb)) => {
                    let r = names.take("r");
                    let rty = FT::prod(vty.clone(), tb.clone());
                    let rv = tvar(&r, &rty);
                    let fb = substitute_formula(&fb, v, &fst_term(vty, &tb, rv.clone()))?;
                    let fb = substitute_formula(&fb, &vb, &snd_term(vty, &tb, rv))?;
                    (Some((rty, r)), fb)
                }
            }
        }
    })
}
