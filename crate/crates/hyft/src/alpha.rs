//! The apartness translation: positive/negative type translations, the
//! `dom`/`app` formula families, star application, apartness-image
//! combinators, term and formula translation, the symmetry and splitting
//! functionals, and the converse-extensionality witness.
//!
//! An element of `plus(sigma)` packages an element of `sigma` with a
//! potential argument for its extensionality; an element of
//! `minus(sigma)` is a potential argument that two elements are apart.
//! `dom` and `app` say that such an argument actually succeeds. Potential
//! arguments always exist (zero terms), actual ones need not.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::rewrite::{arith_library, cond_term};
use crate::syntax::{
    fst_term, pair_term, snd_term, term_free_vars, Comb, FiniteType, Formula, Term,
};
use crate::typing::{fresh_name, infer_type, lambda_abstract_opt, zero_term, TypeError};

#[derive(Debug, Error)]
pub enum AlphaError {
    #[error("variable {0} has no assigned translation variable")]
    UnmappedVariable(String),
    #[error("star application expects a term of a translated arrow type, got {0}")]
    NotStarApplicable(FiniteType),
    #[error(transparent)]
    Type(#[from] TypeError),
}

// The closed constructions below are pure functions of their type
// parameters and get embedded (shared) into every translation that uses
// them, so they are built once per instantiation.
macro_rules! construction_cache {
    ($name:ident, $key:ty) => {
        fn $name() -> &'static std::sync::Mutex<std::collections::HashMap<$key, Term>> {
            static CACHE: std::sync::OnceLock<
                std::sync::Mutex<std::collections::HashMap<$key, Term>>,
            > = std::sync::OnceLock::new();
            CACHE.get_or_init(Default::default)
        }
    };
}

construction_cache!(sym_cache, FiniteType);
construction_cache!(split_cache, FiniteType);
construction_cache!(fork_cache, (FiniteType, FiniteType));
construction_cache!(comb_cache, (Comb, Vec<FiniteType>));

/// `sigma^+`.
pub fn type_plus(sigma: &FiniteType) -> FiniteType {
    use FiniteType as FT;
    match sigma {
        FT::Nat => FT::Nat,
        FT::Prod(a, b) => FT::prod(type_plus(a), type_plus(b)),
        FT::Arrow(a, b) => {
            let (ap, bp) = (type_plus(a), type_plus(b));
            FT::prod(
                FT::arrow(ap.clone(), bp),
                FT::arrow(
                    ap.clone(),
                    FT::arrow(ap, FT::arrow(type_minus(b), type_minus(a))),
                ),
            )
        }
    }
}

/// `sigma^-`.
pub fn type_minus(sigma: &FiniteType) -> FiniteType {
    use FiniteType as FT;
    match sigma {
        FT::Nat => FT::Nat,
        FT::Prod(a, b) => FT::prod(FT::prod(type_minus(a), type_minus(b)), FT::Nat),
        FT::Arrow(a, b) => FT::prod(type_plus(a), type_minus(b)),
    }
}

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

fn lam(name: &str, ty: FiniteType, body: Term) -> Term {
    lambda_abstract_opt(name, ty, &body).expect("alpha construction")
}

fn tvar(name: &str, ty: &FiniteType) -> Term {
    Term::var(name, ty.clone())
}

/// First projection with the pair type read off the term.
fn pfst(t: Term) -> Term {
    match infer_type(&t).expect("pfst on untypeable term") {
        FiniteType::Prod(a, b) => fst_term(&a, &b, t),
        other => panic!("pfst on non-product type {other}"),
    }
}

fn psnd(t: Term) -> Term {
    match infer_type(&t).expect("psnd on untypeable term") {
        FiniteType::Prod(a, b) => snd_term(&a, &b, t),
        other => panic!("psnd on non-product type {other}"),
    }
}

/// Pairing with the component types read off the terms.
fn ppair(a: Term, b: Term) -> Term {
    let ta = infer_type(&a).expect("ppair left");
    let tb = infer_type(&b).expect("ppair right");
    pair_term(&ta, &tb, a, b)
}

fn star(s: Term, t: Term) -> Term {
    star_app(&s, &t).expect("star application during construction")
}

/// `s * t`: applies the function component of `s`. For `s` of type
/// `(sigma -> tau)^+` and `t` of type `sigma^+` the result has type
/// `tau^+`.
pub fn star_app(s: &Term, t: &Term) -> Result<Term, AlphaError> {
    let sty = infer_type(s)?;
    let (x, y) = match &sty {
        FiniteType::Prod(x, y) => (x.as_ref().clone(), y.as_ref().clone()),
        _ => return Err(AlphaError::NotStarApplicable(sty)),
    };
    let dom = match &x {
        FiniteType::Arrow(d, _) => d.as_ref().clone(),
        _ => return Err(AlphaError::NotStarApplicable(sty)),
    };
    let tty = infer_type(t)?;
    if tty != dom {
        return Err(TypeError::Mismatch {
            expected: dom,
            found: tty,
            what: "star application".into(),
        }
        .into());
    }
    Ok(Term::app(
        Term::app(Term::constant(Comb::Fst, vec![x, y]), s.clone()),
        t.clone(),
    ))
}

// ---------------------------------------------------------------------------
// dom / app formulas
// ---------------------------------------------------------------------------

struct Names {
    used: BTreeSet<String>,
}

impl Names {
    fn avoiding_terms(terms: &[&Term]) -> Names {
        let mut used = BTreeSet::new();
        for t in terms {
            used.extend(term_free_vars(t).into_keys());
        }
        Names { used }
    }

    fn take(&mut self, base: &str) -> String {
        let name = fresh_name(base, &|c: &str| self.used.contains(c));
        self.used.insert(name.clone());
        name
    }
}

/// `dom_sigma(x)` for `x : sigma^+`.
pub fn dom_formula(sigma: &FiniteType, x: &Term) -> Formula {
    let mut names = Names::avoiding_terms(&[x]);
    dom_inner(sigma, x, &mut names)
}

fn dom_inner(sigma: &FiniteType, x: &Term, names: &mut Names) -> Formula {
    use FiniteType as FT;
    match sigma {
        FT::Nat => Formula::truth(),
        FT::Prod(a, b) => {
            let (ap, bp) = (type_plus(a), type_plus(b));
            Formula::and(
                dom_inner(a, &fst_term(&ap, &bp, x.clone()), names),
                dom_inner(b, &snd_term(&ap, &bp, x.clone()), names),
            )
        }
        FT::Arrow(a, b) => {
            let ap = type_plus(a);
            let u = names.take("u");
            let uv = tvar(&u, &ap);
            let maps_dom = Formula::forall(
                u.clone(),
                ap.clone(),
                Formula::imp(
                    dom_inner(a, &uv, names),
                    dom_inner(b, &star(x.clone(), uv.clone()), names),
                ),
            );
            let u2 = names.take("u");
            let v = names.take("v");
            let w = names.take("w");
            let u2v = tvar(&u2, &ap);
            let vv = tvar(&v, &ap);
            let wv = tvar(&w, &type_minus(b));
            let transports = Formula::forall(
                u2.clone(),
                ap.clone(),
                Formula::forall(
                    v.clone(),
                    ap.clone(),
                    Formula::forall(
                        w.clone(),
                        type_minus(b),
                        Formula::imp(
                            dom_inner(a, &u2v, names),
                            Formula::imp(
                                dom_inner(a, &vv, names),
                                Formula::imp(
                                    app_inner(
                                        b,
                                        &star(x.clone(), u2v.clone()),
                                        &star(x.clone(), vv.clone()),
                                        &wv,
                                        names,
                                    ),
                                    app_inner(
                                        a,
                                        &u2v,
                                        &vv,
                                        &Term::app3(
                                            psnd(x.clone()),
                                            u2v.clone(),
                                            vv.clone(),
                                            wv.clone(),
                                        ),
                                        names,
                                    ),
                                ),
                            ),
                        ),
                    ),
                ),
            );
            Formula::and(maps_dom, transports)
        }
    }
}

/// `app_sigma(x, y, z)` for `x, y : sigma^+` and `z : sigma^-`.
pub fn app_formula(sigma: &FiniteType, x: &Term, y: &Term, z: &Term) -> Formula {
    let mut names = Names::avoiding_terms(&[x, y, z]);
    app_inner(sigma, x, y, z, &mut names)
}

fn app_inner(sigma: &FiniteType, x: &Term, y: &Term, z: &Term, names: &mut Names) -> Formula {
    use FiniteType as FT;
    let nat = FT::Nat;
    match sigma {
        FT::Nat => Formula::neg(Formula::PrimEq(nat, x.clone(), y.clone())),
        FT::Prod(a, b) => {
            let (ap, bp) = (type_plus(a), type_plus(b));
            let (am, bm) = (type_minus(a), type_minus(b));
            let payload = FT::prod(am.clone(), bm.clone());
            let tag = snd_term(&payload, &nat, z.clone());
            let inner = fst_term(&payload, &nat, z.clone());
            let tag_zero = Formula::PrimEq(nat.clone(), tag, Term::numeral(0));
            Formula::and(
                Formula::imp(
                    tag_zero.clone(),
                    app_inner(
                        a,
                        &fst_term(&ap, &bp, x.clone()),
                        &fst_term(&ap, &bp, y.clone()),
                        &fst_term(&am, &bm, inner.clone()),
                        names,
                    ),
                ),
                Formula::imp(
                    Formula::neg(tag_zero),
                    app_inner(
                        b,
                        &snd_term(&ap, &bp, x.clone()),
                        &snd_term(&ap, &bp, y.clone()),
                        &snd_term(&am, &bm, inner),
                        names,
                    ),
                ),
            )
        }
        FT::Arrow(a, b) => {
            let (ap, bm) = (type_plus(a), type_minus(b));
            let point = fst_term(&ap, &bm, z.clone());
            let wit = snd_term(&ap, &bm, z.clone());
            Formula::and(
                dom_inner(a, &point, names),
                app_inner(
                    b,
                    &star(x.clone(), point.clone()),
                    &star(y.clone(), point),
                    &wit,
                    names,
                ),
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Apartness functionals
// ---------------------------------------------------------------------------

/// Symmetry: a closed functional of type
/// `sigma^+ -> sigma^+ -> sigma^- -> sigma^-` turning a realizer of
/// `app(x, y, z)` into one of `app(y, x, _)`.
pub fn apartness_sym_term(sigma: &FiniteType) -> Term {
    if let Some(hit) = sym_cache().lock().unwrap().get(sigma) {
        return hit.clone();
    }
    let built = build_sym(sigma);
    sym_cache()
        .lock()
        .unwrap()
        .entry(sigma.clone())
        .or_insert(built)
        .clone()
}

fn build_sym(sigma: &FiniteType) -> Term {
    use FiniteType as FT;
    let sp = type_plus(sigma);
    let sm = type_minus(sigma);
    match sigma {
        FT::Nat => lam(
            "x",
            sp.clone(),
            lam("y", sp, lam("z", sm.clone(), tvar("z", &sm))),
        ),
        FT::Prod(a, b) => {
            let x = tvar("x", &sp);
            let y = tvar("y", &sp);
            let z = tvar("z", &sm);
            let ra = pfst(pfst(z.clone()));
            let rb = psnd(pfst(z.clone()));
            let body = ppair(
                ppair(
                    Term::app3(apartness_sym_term(a), pfst(x.clone()), pfst(y.clone()), ra),
                    Term::app3(apartness_sym_term(b), psnd(x.clone()), psnd(y.clone()), rb),
                ),
                psnd(z),
            );
            lam("x", sp.clone(), lam("y", sp, lam("z", sm, body)))
        }
        FT::Arrow(_, b) => {
            let x = tvar("x", &sp);
            let y = tvar("y", &sp);
            let z = tvar("z", &sm);
            let point = pfst(z.clone());
            let body = ppair(
                point.clone(),
                Term::app3(
                    apartness_sym_term(b),
                    star(x.clone(), point.clone()),
                    star(y.clone(), point),
                    psnd(z),
                ),
            );
            lam("x", sp.clone(), lam("y", sp, lam("z", sm, body)))
        }
    }
}

/// Splitting: a closed functional of type
/// `sigma^+ -> sigma^+ -> sigma^+ -> sigma^- -> sigma^- * 0`. Given a
/// realizer that `x` and `y` are apart and any third point `z`, it yields
/// a realizer plus a tag: tag `0` means the realizer separates `x` and
/// `z`, any other value means it separates `y` and `z`.
pub fn apartness_split_term(sigma: &FiniteType) -> Term {
    if let Some(hit) = split_cache().lock().unwrap().get(sigma) {
        return hit.clone();
    }
    let built = build_split(sigma);
    split_cache()
        .lock()
        .unwrap()
        .entry(sigma.clone())
        .or_insert(built)
        .clone()
}

fn build_split(sigma: &FiniteType) -> Term {
    use FiniteType as FT;
    let nat = FT::Nat;
    let sp = type_plus(sigma);
    let sm = type_minus(sigma);
    let out_ty = FT::prod(sm.clone(), nat.clone());
    let x = tvar("x", &sp);
    let y = tvar("y", &sp);
    let z = tvar("z", &sp);
    let u = tvar("u", &sm);
    let body = match sigma {
        FT::Nat => {
            // at the base type the witness is irrelevant; pick the side by
            // a decidable equality test
            let eq = arith_library().eq_nat.clone();
            ppair(
                Term::numeral(0),
                Term::app3(
                    cond_term(&nat),
                    Term::app2(eq, x.clone(), z.clone()),
                    Term::numeral(1),
                    Term::numeral(0),
                ),
            )
        }
        FT::Prod(a, b) => {
            let (am, bm) = (type_minus(a), type_minus(b));
            let sa = Term::app4(
                apartness_split_term(a),
                pfst(x.clone()),
                pfst(y.clone()),
                pfst(z.clone()),
                pfst(pfst(u.clone())),
            );
            let sb = Term::app4(
                apartness_split_term(b),
                psnd(x.clone()),
                psnd(y.clone()),
                psnd(z.clone()),
                psnd(pfst(u.clone())),
            );
            let left = ppair(
                ppair(ppair(pfst(sa.clone()), zero_term(&bm)), Term::numeral(0)),
                psnd(sa),
            );
            let right = ppair(
                ppair(ppair(zero_term(&am), pfst(sb.clone())), Term::numeral(1)),
                psnd(sb),
            );
            Term::app3(cond_term(&out_ty), psnd(u.clone()), left, right)
        }
        FT::Arrow(_, b) => {
            let point = pfst(u.clone());
            let s = Term::app4(
                apartness_split_term(b),
                star(x.clone(), point.clone()),
                star(y.clone(), point.clone()),
                star(z.clone(), point.clone()),
                psnd(u.clone()),
            );
            ppair(ppair(point, pfst(s.clone())), psnd(s))
        }
    };
    lam(
        "x",
        sp.clone(),
        lam(
            "y",
            sp.clone(),
            lam("z", sp, lam("u", sm, body)),
        ),
    )
}

/// The application-splitting subroutine: from `f, f2 : (a -> b)^+`,
/// `u, u2 : a^+` and a potential realizer `e` of the apartness of
/// `f * u` and `f2 * u2`, computes a pair of candidate realizers (one of
/// the apartness of `f` and `f2`, one of `u` and `u2`) together with a
/// tag picking the side that is actual whenever `e` is.
pub fn apartness_fork_term(a: &FiniteType, b: &FiniteType) -> Term {
    let key = (a.clone(), b.clone());
    if let Some(hit) = fork_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let built = build_fork(a, b);
    fork_cache().lock().unwrap().entry(key).or_insert(built).clone()
}

fn build_fork(a: &FiniteType, b: &FiniteType) -> Term {
    use FiniteType as FT;
    let fty = type_plus(&FT::arrow(a.clone(), b.clone()));
    let ap = type_plus(a);
    let bm = type_minus(b);
    let f = tvar("f", &fty);
    let f2 = tvar("f2", &fty);
    let u = tvar("u", &ap);
    let u2 = tvar("u2", &ap);
    let e = tvar("e", &bm);

    let t = Term::app4(
        apartness_split_term(b),
        star(f.clone(), u.clone()),
        star(f2.clone(), u2.clone()),
        star(f2.clone(), u.clone()),
        e.clone(),
    );
    // apartness of f and f2, observed at the shared point u
    let rf = ppair(u.clone(), pfst(t.clone()));
    // apartness of u and u2, transported through the backward component of
    // f2 and reoriented
    let ru = Term::app3(
        apartness_sym_term(a),
        u2.clone(),
        u.clone(),
        Term::app3(psnd(f2.clone()), u2.clone(), u.clone(), pfst(t.clone())),
    );
    let body = ppair(ppair(rf, ru), psnd(t));
    lam(
        "f",
        fty.clone(),
        lam(
            "f2",
            fty,
            lam("u", ap.clone(), lam("u2", ap, lam("e", bm, body))),
        ),
    )
}

// ---------------------------------------------------------------------------
// Alpha images of the combinators
// ---------------------------------------------------------------------------

/// The apartness image `c^alpha : (type of c)^+` of a combinator,
/// satisfying the defining equation of `c` with respect to `*`.
pub fn alpha_combinator(kind: Comb, params: &[FiniteType]) -> Result<Term, TypeError> {
    if params.len() != kind.param_arity() {
        return Err(TypeError::WrongParamCount {
            kind,
            expected: kind.param_arity(),
            got: params.len(),
        });
    }
    let key = (kind, params.to_vec());
    if let Some(hit) = comb_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let built = build_alpha_combinator(kind, params);
    Ok(comb_cache().lock().unwrap().entry(key).or_insert(built).clone())
}

fn build_alpha_combinator(kind: Comb, params: &[FiniteType]) -> Term {
    match kind {
        Comb::Zero => Term::numeral(0),
        Comb::Suc => alpha_suc(),
        Comb::K => alpha_k(&params[0], &params[1]),
        Comb::Pair => alpha_pair(&params[0], &params[1]),
        Comb::Fst => alpha_fst(&params[0], &params[1]),
        Comb::Snd => alpha_snd(&params[0], &params[1]),
        Comb::S => alpha_s(&params[0], &params[1], &params[2]),
        Comb::Rec => alpha_rec(&params[0]),
    }
}

fn alpha_suc() -> Term {
    let nat = FiniteType::Nat;
    ppair(
        Term::constant(Comb::Suc, vec![]),
        lam(
            "x",
            nat.clone(),
            lam("y", nat.clone(), lam("z", nat.clone(), tvar("z", &nat))),
        ),
    )
}

fn alpha_k(rho: &FiniteType, sigma: &FiniteType) -> Term {
    use FiniteType as FT;
    let rp = type_plus(rho);
    let sp = type_plus(sigma);
    let rm = type_minus(rho);
    let sm = type_minus(sigma);
    let x = tvar("x", &rp);

    // first component: \x. pair (\y. x) (\y y2 e. 0)
    let drop_y = lam(
        "y",
        sp.clone(),
        lam("y2", sp.clone(), lam("e", rm.clone(), zero_term(&sm))),
    );
    let first = lam(
        "x",
        rp.clone(),
        ppair(lam("y", sp.clone(), x.clone()), drop_y),
    );

    // second component: \x x2 e. snd e   with e : sigma^+ * rho^-
    let ety = FT::prod(sp, rm);
    let second = lam(
        "x",
        rp.clone(),
        lam(
            "x2",
            rp,
            lam("e", ety.clone(), psnd(tvar("e", &ety))),
        ),
    );
    ppair(first, second)
}

fn alpha_pair(sigma: &FiniteType, tau: &FiniteType) -> Term {
    use FiniteType as FT;
    let sp = type_plus(sigma);
    let tp = type_plus(tau);
    let pm = type_minus(&FT::prod(sigma.clone(), tau.clone()));
    let x = tvar("x", &sp);

    // given x and a realizer of apartness of (x, y) and (x, y2), project
    // the tau side
    let back_y = lam(
        "y",
        tp.clone(),
        lam(
            "y2",
            tp.clone(),
            lam("e", pm.clone(), psnd(pfst(tvar("e", &pm)))),
        ),
    );
    let first = lam(
        "x",
        sp.clone(),
        ppair(lam("y", tp.clone(), ppair(x.clone(), tvar("y", &tp))), back_y),
    );

    let ety = FT::prod(tp, pm);
    let second = lam(
        "x",
        sp.clone(),
        lam(
            "x2",
            sp,
            lam("e", ety.clone(), pfst(pfst(psnd(tvar("e", &ety))))),
        ),
    );
    ppair(first, second)
}

fn alpha_fst(sigma: &FiniteType, tau: &FiniteType) -> Term {
    use FiniteType as FT;
    let sp = type_plus(sigma);
    let tp = type_plus(tau);
    let sm = type_minus(sigma);
    let tm = type_minus(tau);
    let pp = FT::prod(sp.clone(), tp.clone());
    let back = lam(
        "x",
        pp.clone(),
        lam(
            "x2",
            pp.clone(),
            lam(
                "e",
                sm.clone(),
                ppair(
                    ppair(tvar("e", &sm), zero_term(&tm)),
                    Term::numeral(0),
                ),
            ),
        ),
    );
    ppair(Term::constant(Comb::Fst, vec![sp, tp]), back)
}

fn alpha_snd(sigma: &FiniteType, tau: &FiniteType) -> Term {
    use FiniteType as FT;
    let sp = type_plus(sigma);
    let tp = type_plus(tau);
    let sm = type_minus(sigma);
    let tm = type_minus(tau);
    let pp = FT::prod(sp.clone(), tp.clone());
    let back = lam(
        "x",
        pp.clone(),
        lam(
            "x2",
            pp.clone(),
            lam(
                "e",
                tm.clone(),
                ppair(
                    ppair(zero_term(&sm), tvar("e", &tm)),
                    Term::numeral(1),
                ),
            ),
        ),
    );
    ppair(Term::constant(Comb::Snd, vec![sp, tp]), back)
}

fn alpha_s(rho: &FiniteType, sigma: &FiniteType, tau: &FiniteType) -> Term {
    use FiniteType as FT;
    let rp = type_plus(rho);
    let rm = type_minus(rho);
    let tm = type_minus(tau);
    let xty = type_plus(&FT::arrow(rho.clone(), FT::arrow(sigma.clone(), tau.clone())));
    let yty = type_plus(&FT::arrow(rho.clone(), sigma.clone()));

    let x = tvar("x", &xty);
    let y = tvar("y", &yty);
    let z = tvar("z", &rp);

    // (i): s x y z = x z (y z), with respect to *
    let l3 = lam(
        "z",
        rp.clone(),
        star(star(x.clone(), z.clone()), star(y.clone(), z.clone())),
    );

    // (iv): transport apartness of x*z*(y*z) and x*z2*(y*z2) back to z, z2
    // by splitting into a function-side or argument-side realizer
    let z2 = tvar("z2", &rp);
    let e = tvar("e", &tm);
    let forked = Term::app4(
        Term::app(
            apartness_fork_term(sigma, tau),
            star(x.clone(), z.clone()),
        ),
        star(x.clone(), z2.clone()),
        star(y.clone(), z.clone()),
        star(y.clone(), z2.clone()),
        e.clone(),
    );
    let f_side = Term::app3(psnd(x.clone()), z.clone(), z2.clone(), pfst(pfst(forked.clone())));
    let u_side = Term::app3(psnd(y.clone()), z.clone(), z2.clone(), psnd(pfst(forked.clone())));
    let g3 = lam(
        "z",
        rp.clone(),
        lam(
            "z2",
            rp.clone(),
            lam(
                "e",
                tm.clone(),
                Term::app3(cond_term(&rm), psnd(forked), f_side, u_side),
            ),
        ),
    );

    // (iii): e = (z, d) with d separating x*z*(y*z) and x*z*(y2*z); the
    // backward component of x*z turns d into a separator of y*z and y2*z
    let y2 = tvar("y2", &yty);
    let e2ty = FT::prod(rp.clone(), tm.clone());
    let e2 = tvar("e", &e2ty);
    let pt = pfst(e2.clone());
    let g2 = lam(
        "y",
        yty.clone(),
        lam(
            "y2",
            yty.clone(),
            lam(
                "e",
                e2ty.clone(),
                ppair(
                    pt.clone(),
                    Term::app3(
                        psnd(star(x.clone(), pt.clone())),
                        star(y.clone(), pt.clone()),
                        star(y2.clone(), pt.clone()),
                        psnd(e2.clone()),
                    ),
                ),
            ),
        ),
    );

    // (ii): e = (y, (z, d)); then (z, (y*z, d)) separates x and x2
    let e1ty = FT::prod(yty.clone(), FT::prod(rp.clone(), tm.clone()));
    let e1 = tvar("e", &e1ty);
    let yv = pfst(e1.clone());
    let zv = pfst(psnd(e1.clone()));
    let dv = psnd(psnd(e1.clone()));
    let g1 = lam(
        "x",
        xty.clone(),
        lam(
            "x2",
            xty.clone(),
            lam(
                "e",
                e1ty.clone(),
                ppair(zv.clone(), ppair(star(yv, zv), dv)),
            ),
        ),
    );

    ppair(
        lam(
            "x",
            xty.clone(),
            ppair(lam("y", yty.clone(), ppair(l3, g3)), g2),
        ),
        g1,
    )
}

fn alpha_rec(sigma: &FiniteType) -> Term {
    use FiniteType as FT;
    let nat = FT::Nat;
    let sp = type_plus(sigma);
    let sm = type_minus(sigma);
    let step_src = FT::arrow(nat.clone(), FT::arrow(sigma.clone(), sigma.clone()));
    let yty = type_plus(&step_src);
    let ym = type_minus(&step_src);

    let x = tvar("x", &sp);
    let x2 = tvar("x2", &sp);
    let y = tvar("y", &yty);
    let y2 = tvar("y2", &yty);

    let rec_sp = Term::constant(Comb::Rec, vec![sp.clone()]);
    // R x (\m z. y * m * z) n, the computational component
    let iter = |x: &Term, y: &Term, n: Term| {
        let g = lam(
            "m",
            nat.clone(),
            lam(
                "zz",
                sp.clone(),
                star(star(y.clone(), tvar("m", &nat)), tvar("zz", &sp)),
            ),
        );
        Term::app3(rec_sp.clone(), x.clone(), g, n)
    };

    // (i)
    let l3 = lam("n", nat.clone(), iter(&x, &y, tvar("n", &nat)));

    // (iv): apartness of numerals carries no witness
    let g3 = lam(
        "n",
        nat.clone(),
        lam(
            "n2",
            nat.clone(),
            lam("e", sm.clone(), Term::numeral(0)),
        ),
    );

    // (iii): walk the recursion down; at each stage either the step
    // function itself is told apart or the recursive values are
    let e2ty = FT::prod(nat.clone(), sm.clone());
    let e2 = tvar("e", &e2ty);
    let fork = apartness_fork_term(sigma, sigma);
    let m = tvar("m", &nat);
    let prev_ty = FT::arrow(sm.clone(), ym.clone());
    let d = tvar("d", &sm);
    let forked = Term::app4(
        Term::app(fork, star(y.clone(), m.clone())),
        star(y2.clone(), m.clone()),
        iter(&x, &y, m.clone()),
        iter(&x, &y2, m.clone()),
        d.clone(),
    );
    let step = lam(
        "m",
        nat.clone(),
        lam(
            "prev",
            prev_ty.clone(),
            lam(
                "d",
                sm.clone(),
                Term::app3(
                    cond_term(&ym),
                    psnd(forked.clone()),
                    ppair(m.clone(), pfst(pfst(forked.clone()))),
                    Term::app(tvar("prev", &prev_ty), psnd(pfst(forked))),
                ),
            ),
        ),
    );
    let base = lam("d", sm.clone(), zero_term(&ym));
    let g2 = lam(
        "y",
        yty.clone(),
        lam(
            "y2",
            yty.clone(),
            lam(
                "e",
                e2ty.clone(),
                Term::app(
                    Term::app3(
                        Term::constant(Comb::Rec, vec![FT::arrow(sm.clone(), ym.clone())]),
                        base,
                        step,
                        pfst(e2.clone()),
                    ),
                    psnd(e2.clone()),
                ),
            ),
        ),
    );

    // (ii): peel the step function off one level at a time
    let e1ty = FT::prod(yty.clone(), FT::prod(nat.clone(), sm.clone()));
    let e1 = tvar("e", &e1ty);
    let yv = pfst(e1.clone());
    let nv = pfst(psnd(e1.clone()));
    let dv = psnd(psnd(e1.clone()));
    let prev1_ty = FT::arrow(sm.clone(), sm.clone());
    let d2 = tvar("d2", &sm);
    let step1 = lam(
        "m",
        nat.clone(),
        lam(
            "prev",
            prev1_ty.clone(),
            lam(
                "d2",
                sm.clone(),
                Term::app(
                    tvar("prev", &prev1_ty),
                    Term::app3(
                        psnd(star(yv.clone(), m.clone())),
                        iter(&x, &yv, m.clone()),
                        iter(&x2, &yv, m.clone()),
                        d2.clone(),
                    ),
                ),
            ),
        ),
    );
    let base1 = lam("d2", sm.clone(), d2.clone());
    let g1 = lam(
        "x",
        sp.clone(),
        lam(
            "x2",
            sp.clone(),
            lam(
                "e",
                e1ty.clone(),
                Term::app(
                    Term::app3(
                        Term::constant(Comb::Rec, vec![prev1_ty.clone()]),
                        base1,
                        step1,
                        nv,
                    ),
                    dv,
                ),
            ),
        ),
    );

    ppair(
        lam(
            "x",
            sp.clone(),
            ppair(lam("y", yty.clone(), ppair(l3, g3)), g2),
        ),
        g1,
    )
}

// ---------------------------------------------------------------------------
// Term and formula translation
// ---------------------------------------------------------------------------

/// Assignment of translation variables `x -> x_a : sigma^+`; distinct
/// sources always get distinct targets.
#[derive(Debug, Clone, Default)]
pub struct AlphaVarMap {
    map: std::collections::BTreeMap<String, (FiniteType, String)>,
}

impl AlphaVarMap {
    pub fn new() -> AlphaVarMap {
        AlphaVarMap::default()
    }

    pub fn from_vars<I>(vars: I) -> AlphaVarMap
    where
        I: IntoIterator<Item = (String, FiniteType)>,
    {
        let mut m = AlphaVarMap::new();
        for (name, ty) in vars {
            m.insert(&name, ty);
        }
        m
    }

    pub fn for_term(t: &Term) -> AlphaVarMap {
        AlphaVarMap::from_vars(term_free_vars(t))
    }

    pub fn for_formula(phi: &Formula) -> AlphaVarMap {
        AlphaVarMap::from_vars(crate::syntax::formula_free_vars(phi))
    }

    fn insert(&mut self, name: &str, ty: FiniteType) -> String {
        let target = format!("{name}_a");
        debug_assert!(
            !self
                .map
                .iter()
                .any(|(src, (_, tgt))| src != name && tgt == &target),
            "alpha variable map collision on {target}"
        );
        self.map.insert(name.to_owned(), (ty, target.clone()));
        target
    }

    /// Extended copy for a quantifier binder; returns the target name.
    pub fn bind(&self, name: &str, ty: FiniteType) -> (AlphaVarMap, String) {
        let mut m = self.clone();
        let target = m.insert(name, ty);
        (m, target)
    }

    pub fn lookup(&self, name: &str) -> Option<(&FiniteType, &str)> {
        self.map.get(name).map(|(ty, tgt)| (ty, tgt.as_str()))
    }
}

/// Term translation: variables to their assigned translation variables,
/// combinators to their alpha images, application to star application.
pub fn alpha_term(t: &Term, vmap: &AlphaVarMap) -> Result<Term, AlphaError> {
    match t {
        Term::Var { name, ty } => match vmap.lookup(name) {
            Some((src_ty, target)) => {
                if src_ty != ty {
                    return Err(TypeError::InconsistentVar {
                        name: name.clone(),
                        a: src_ty.clone(),
                        b: ty.clone(),
                    }
                    .into());
                }
                Ok(Term::var(target, type_plus(ty)))
            }
            None => Err(AlphaError::UnmappedVariable(name.clone())),
        },
        Term::Const { kind, params } => Ok(alpha_combinator(*kind, params)?),
        Term::App(f, a) => {
            let fa = alpha_term(f, vmap)?;
            let aa = alpha_term(a, vmap)?;
            star_app(&fa, &aa)
        }
    }
}

/// Formula translation: `ext` becomes `dom`, primitive equality moves to
/// the translated type, extensional equality becomes the impossibility of
/// an apartness realizer, and quantifiers are retyped to `sigma^+`.
pub fn alpha_formula(phi: &Formula, vmap: &AlphaVarMap) -> Result<Formula, AlphaError> {
    Ok(match phi {
        Formula::Ext(ty, t) => dom_formula(ty, &alpha_term(t, vmap)?),
        Formula::PrimEq(ty, s, t) => Formula::PrimEq(
            type_plus(ty),
            alpha_term(s, vmap)?,
            alpha_term(t, vmap)?,
        ),
        Formula::ExtEq(ty, s, t) => {
            let sa = alpha_term(s, vmap)?;
            let ta = alpha_term(t, vmap)?;
            let mut names = Names::avoiding_terms(&[&sa, &ta]);
            let w = names.take("w");
            let wv = tvar(&w, &type_minus(ty));
            Formula::neg(Formula::exists(
                w,
                type_minus(ty),
                app_formula(ty, &sa, &ta, &wv),
            ))
        }
        Formula::Falsum => Formula::Falsum,
        Formula::And(a, b) => {
            Formula::and(alpha_formula(a, vmap)?, alpha_formula(b, vmap)?)
        }
        Formula::Or(a, b) => Formula::or(alpha_formula(a, vmap)?, alpha_formula(b, vmap)?),
        Formula::Imp(a, b) => {
            Formula::imp(alpha_formula(a, vmap)?, alpha_formula(b, vmap)?)
        }
        Formula::Forall(x, ty, body) => {
            let (inner, target) = vmap.bind(x, ty.clone());
            Formula::forall(target, type_plus(ty), alpha_formula(body, &inner)?)
        }
        Formula::Exists(x, ty, body) => {
            let (inner, target) = vmap.bind(x, ty.clone());
            Formula::exists(target, type_plus(ty), alpha_formula(body, &inner)?)
        }
    })
}

// ---------------------------------------------------------------------------
// The converse-extensionality witness
// ---------------------------------------------------------------------------

/// The closed witness `Z` for converse extensionality at `sigma`, `tau`:
/// its computational component reads the separating point straight off the
/// backward component of `f`; every other component is a dummy zero term.
/// Satisfies `Z * f * x * y * v == fst ((snd f) x y (pair v 0))`.
pub fn cext_witness(sigma: &FiniteType, tau: &FiniteType) -> Term {
    use FiniteType as FT;
    let nat = FT::Nat;
    let a = FT::arrow(sigma.clone(), nat.clone()); // sigma -> 0
    let b = FT::arrow(tau.clone(), nat.clone()); // tau -> 0
    let ab = FT::arrow(a.clone(), b.clone());

    let fty = type_plus(&ab);
    let xty = type_plus(&a);
    let tp = type_plus(tau);
    let sm = type_minus(sigma);
    let am = type_minus(&a);
    let abm = type_minus(&ab);

    let f = tvar("f", &fty);
    let x = tvar("x", &xty);
    let y = tvar("y", &xty);
    let v = tvar("v", &tp);

    // fst ((snd f) x y (pair v 0))
    let core = pfst(Term::app3(
        psnd(f.clone()),
        x.clone(),
        y.clone(),
        ppair(v.clone(), Term::numeral(0)),
    ));

    // dummy backward components, from the innermost level outwards
    let g4 = FT::arrow(tp.clone(), FT::arrow(tp.clone(), FT::arrow(sm.clone(), type_minus(tau))));
    let r3m = FT::prod(tp.clone(), sm.clone()); // (tau -> sigma)^-
    let g3 = FT::arrow(xty.clone(), FT::arrow(xty.clone(), FT::arrow(r3m.clone(), am.clone())));
    let r2m = FT::prod(xty.clone(), r3m.clone());
    let g2 = FT::arrow(xty.clone(), FT::arrow(xty.clone(), FT::arrow(r2m.clone(), am.clone())));
    let r1m = FT::prod(xty.clone(), r2m);
    let g1 = FT::arrow(fty.clone(), FT::arrow(fty.clone(), FT::arrow(r1m, abm)));

    let level4 = ppair(lam("v", tp, core), zero_term(&g4));
    let level3 = ppair(lam("y", xty.clone(), level4), zero_term(&g3));
    let level2 = ppair(lam("x", xty, level3), zero_term(&g2));
    let z = ppair(lam("f", fty, level2), zero_term(&g1));

    debug_assert_eq!(
        infer_type(&z).expect("cext witness"),
        type_plus(&FT::arrow(
            ab,
            FT::arrow(a.clone(), FT::arrow(a, FT::arrow(tau.clone(), sigma.clone())))
        )),
        "witness type at sigma = {sigma}, tau = {tau}"
    );
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{eval_nat, term_eq_norm, EqOutcome, DEFAULT_FUEL};
    use FiniteType as FT;

    fn nat() -> FT {
        FT::Nat
    }

    fn nn() -> FT {
        FT::arrow(nat(), nat())
    }

    #[test]
    fn type_translations() {
        assert_eq!(type_plus(&nat()), nat());
        assert_eq!(type_minus(&nat()), nat());
        assert_eq!(
            type_plus(&nn()).to_string(),
            "(N -> N) * (N -> N -> N -> N)"
        );
        assert_eq!(type_minus(&nn()).to_string(), "N * N");
        assert_eq!(
            type_minus(&FT::prod(nat(), nat())).to_string(),
            "(N * N) * N"
        );
    }

    #[test]
    fn dom_and_app_at_low_types() {
        let x = Term::var("x", nat());
        assert_eq!(dom_formula(&nat(), &x), Formula::truth());

        let y = Term::var("y", nat());
        let z = Term::var("z", nat());
        assert_eq!(
            app_formula(&nat(), &x, &y, &z).to_string(),
            "x == y -> false"
        );

        let xp = Term::var("x", type_plus(&nn()));
        let yp = Term::var("y", type_plus(&nn()));
        let zp = Term::var("z", type_minus(&nn()));
        let f = app_formula(&nn(), &xp, &yp, &zp);
        assert_eq!(
            f.to_string(),
            "0 == 0 & (FST x (FST z) == FST y (FST z) -> false)"
        );
    }

    #[test]
    fn star_app_reduces_through_pairs() {
        let f = Term::var("f", nn());
        let g = Term::var("g", FT::arrow(nat(), FT::arrow(nat(), FT::arrow(nat(), nat()))));
        let packed = ppair(f.clone(), g);
        let applied = star_app(&packed, &Term::numeral(3)).unwrap();
        assert_eq!(
            term_eq_norm(&applied, &Term::app(f, Term::numeral(3)), DEFAULT_FUEL),
            EqOutcome::Equal
        );

        // wrong argument type is rejected
        let err = star_app(&packed, &Term::var("p", FT::prod(nat(), nat())));
        assert!(err.is_err());
    }

    #[test]
    fn alpha_k_defining_equation() {
        for (rho, sigma) in [(nat(), nat()), (nat(), nn()), (nn(), nat())] {
            let k = alpha_combinator(Comb::K, &[rho.clone(), sigma.clone()]).unwrap();
            let x = Term::var("x", type_plus(&rho));
            let y = Term::var("y", type_plus(&sigma));
            let lhs = star(star(k, x.clone()), y);
            assert_eq!(
                term_eq_norm(&lhs, &x, DEFAULT_FUEL),
                EqOutcome::Equal,
                "k alpha at ({rho}, {sigma})"
            );
        }
    }

    #[test]
    fn alpha_s_defining_equation() {
        for (r, s, t) in [(nat(), nat(), nat()), (nat(), nn(), nat())] {
            let sa = alpha_combinator(Comb::S, &[r.clone(), s.clone(), t.clone()]).unwrap();
            let x = Term::var("x", type_plus(&FT::arrow(r.clone(), FT::arrow(s.clone(), t.clone()))));
            let y = Term::var("y", type_plus(&FT::arrow(r.clone(), s.clone())));
            let z = Term::var("z", type_plus(&r));
            let lhs = star(star(star(sa, x.clone()), y.clone()), z.clone());
            let rhs = star(star(x, z.clone()), star(y, z));
            assert_eq!(
                term_eq_norm(&lhs, &rhs, DEFAULT_FUEL),
                EqOutcome::Equal,
                "s alpha at ({r}, {s}, {t})"
            );
        }
    }

    #[test]
    fn alpha_pair_projections() {
        let pa = alpha_combinator(Comb::Pair, &[nat(), nat()]).unwrap();
        let fa = alpha_combinator(Comb::Fst, &[nat(), nat()]).unwrap();
        let sa = alpha_combinator(Comb::Snd, &[nat(), nat()]).unwrap();
        let x = Term::var("x", nat());
        let y = Term::var("y", nat());
        let packed = star(star(pa, x.clone()), y.clone());
        assert_eq!(
            term_eq_norm(&star(fa, packed.clone()), &x, DEFAULT_FUEL),
            EqOutcome::Equal
        );
        assert_eq!(
            term_eq_norm(&star(sa, packed), &y, DEFAULT_FUEL),
            EqOutcome::Equal
        );
    }

    #[test]
    fn alpha_fst_backward_component_shape() {
        let fa = alpha_combinator(Comb::Fst, &[nat(), nat()]).unwrap();
        let x = Term::var("x", type_plus(&FT::prod(nat(), nat())));
        let e = Term::var("e", nat());
        let back = Term::app3(psnd(fa), x.clone(), x, e.clone());
        let expect = ppair(ppair(e, Term::numeral(0)), Term::numeral(0));
        assert_eq!(term_eq_norm(&back, &expect, DEFAULT_FUEL), EqOutcome::Equal);
    }

    #[test]
    fn alpha_rec_defining_equations() {
        for sigma in [nat(), nn()] {
            let ra = alpha_combinator(Comb::Rec, std::slice::from_ref(&sigma)).unwrap();
            let x = Term::var("x", type_plus(&sigma));
            let y = Term::var(
                "y",
                type_plus(&FT::arrow(nat(), FT::arrow(sigma.clone(), sigma.clone()))),
            );
            let at = |n: Term| star(star(star(ra.clone(), x.clone()), y.clone()), n);
            assert_eq!(
                term_eq_norm(&at(Term::numeral(0)), &x, DEFAULT_FUEL),
                EqOutcome::Equal,
                "R alpha base at {sigma}"
            );
            for n in 0..=5u64 {
                let lhs = at(Term::numeral(n + 1));
                let rhs = star(star(y.clone(), Term::numeral(n)), at(Term::numeral(n)));
                assert_eq!(
                    term_eq_norm(&lhs, &rhs, DEFAULT_FUEL),
                    EqOutcome::Equal,
                    "R alpha step at {sigma}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn alpha_s_backward_components_evaluate() {
        // exercise components (ii)-(iv) end to end at base parameters: the
        // transports must reduce to values of the right shape
        let sa = alpha_combinator(Comb::S, &[nat(), nat(), nat()]).unwrap();
        let xty = type_plus(&FT::arrow(nat(), FT::arrow(nat(), nat())));
        let yty = type_plus(&nn());
        let x = zero_term(&xty);
        let y = zero_term(&yty);

        // (iv): apartness of z and z2 from apartness of the results
        let g3 = psnd(Term::app(
            pfst(Term::app(pfst(sa.clone()), x.clone())),
            y.clone(),
        ));
        let out = Term::app3(g3, Term::numeral(2), Term::numeral(5), Term::numeral(1));
        // rho = N, so the transported realizer is a numeral
        assert!(crate::rewrite::eval_nat(&out, DEFAULT_FUEL).is_ok());

        // (ii): apartness of x and x2 from a packaged counterexample
        let g1 = psnd(sa.clone());
        let e = ppair(y.clone(), ppair(Term::numeral(3), Term::numeral(0)));
        let out = Term::app3(g1, x.clone(), zero_term(&xty), e);
        let nf = crate::rewrite::normalize(&out, DEFAULT_FUEL);
        assert_eq!(nf.status, crate::rewrite::Status::NormalForm);
        assert_eq!(
            infer_type(&nf.result).unwrap(),
            type_minus(&FT::arrow(nat(), FT::arrow(nat(), nat())))
        );
    }

    #[test]
    fn alpha_rec_backward_components_evaluate() {
        // the recursion-walking transports of the recursor image terminate
        // and produce realizers of the right type, for several depths
        let ra = alpha_combinator(Comb::Rec, &[nat()]).unwrap();
        let yty = type_plus(&FT::arrow(nat(), FT::arrow(nat(), nat())));
        let suc_step = {
            // y with function part \m z. S z and a trivial backward part
            let f = lam(
                "m",
                nat(),
                ppair(
                    lam("z", nat(), Term::app(Term::constant(Comb::Suc, vec![]), Term::var("z", nat()))),
                    lam("z", nat(), lam("z2", nat(), lam("e", nat(), Term::var("e", nat())))),
                ),
            );
            ppair(
                f,
                zero_term(&FT::arrow(
                    nat(),
                    FT::arrow(nat(), FT::arrow(FT::prod(nat(), nat()), nat())),
                )),
            )
        };
        assert_eq!(infer_type(&suc_step).unwrap(), yty);

        // (ii): x-side transport walks n levels of the recursion
        let g1 = psnd(ra.clone());
        for n in 0..=4u64 {
            let e = ppair(suc_step.clone(), ppair(Term::numeral(n), Term::numeral(9)));
            let out = Term::app3(g1.clone(), Term::numeral(2), Term::numeral(7), e);
            assert_eq!(crate::rewrite::eval_nat(&out, DEFAULT_FUEL).unwrap(), 9);
        }

        // (iii): y-side transport forks at each level and terminates
        let g2 = psnd(Term::app(pfst(ra.clone()), Term::numeral(2)));
        for n in 0..=4u64 {
            let e = ppair(Term::numeral(n), Term::numeral(6));
            let out = Term::app3(g2.clone(), suc_step.clone(), suc_step.clone(), e);
            let nf = crate::rewrite::normalize(&out, DEFAULT_FUEL);
            assert_eq!(nf.status, crate::rewrite::Status::NormalForm);
            assert_eq!(infer_type(&nf.result).unwrap(), type_minus(&FT::arrow(nat(), FT::arrow(nat(), nat()))));
        }
    }

    #[test]
    fn alpha_term_translates_numerals_to_themselves() {
        let vmap = AlphaVarMap::new();
        for n in 0..=10 {
            let t = alpha_term(&Term::numeral(n), &vmap).unwrap();
            assert_eq!(eval_nat(&t, DEFAULT_FUEL).unwrap(), n);
        }
    }

    #[test]
    fn alpha_term_clauses() {
        let t = Term::var("x", nat());
        let vmap = AlphaVarMap::for_term(&t);
        assert_eq!(alpha_term(&t, &vmap).unwrap(), Term::var("x_a", nat()));

        let unmapped = alpha_term(&Term::var("q", nat()), &AlphaVarMap::new());
        assert!(matches!(unmapped, Err(AlphaError::UnmappedVariable(_))));

        // K x y translates to k^a * x_a * y_a
        let kxy = Term::app2(
            Term::constant(Comb::K, vec![nat(), nat()]),
            Term::var("x", nat()),
            Term::var("y", nat()),
        );
        let vmap = AlphaVarMap::for_term(&kxy);
        let out = alpha_term(&kxy, &vmap).unwrap();
        let expect = star(
            star(
                alpha_combinator(Comb::K, &[nat(), nat()]).unwrap(),
                Term::var("x_a", nat()),
            ),
            Term::var("y_a", nat()),
        );
        assert_eq!(out, expect);
        assert_eq!(
            term_eq_norm(&out, &Term::var("x_a", nat()), DEFAULT_FUEL),
            EqOutcome::Equal
        );
    }

    #[test]
    fn alpha_formula_clauses() {
        let x = Term::var("x", nat());
        let phi = Formula::Ext(nat(), x.clone());
        let vmap = AlphaVarMap::for_formula(&phi);
        assert_eq!(alpha_formula(&phi, &vmap).unwrap(), Formula::truth());

        let phi = Formula::ExtEq(nat(), x.clone(), Term::var("y", nat()));
        let vmap = AlphaVarMap::for_formula(&phi);
        let out = alpha_formula(&phi, &vmap).unwrap();
        assert_eq!(
            out.to_string(),
            "(exists w:N. x_a == y_a -> false) -> false"
        );

        let phi = Formula::forall("z", nn(), Formula::Ext(nn(), Term::var("z", nn())));
        let out = alpha_formula(&phi, &AlphaVarMap::new()).unwrap();
        match out {
            Formula::Forall(name, ty, _) => {
                assert_eq!(name, "z_a");
                assert_eq!(ty, type_plus(&nn()));
            }
            other => panic!("expected a universal formula, got {other}"),
        }
    }

    #[test]
    fn sym_term_types_and_base_behaviour() {
        for sigma in [nat(), nn(), FT::prod(nat(), nat())] {
            let s = apartness_sym_term(&sigma);
            let ty = infer_type(&s).unwrap();
            let sp = type_plus(&sigma);
            let sm = type_minus(&sigma);
            assert_eq!(
                ty,
                FT::arrow(sp.clone(), FT::arrow(sp, FT::arrow(sm.clone(), sm)))
            );
        }
        // at the base type the witness is returned unchanged
        let s = apartness_sym_term(&nat());
        let out = Term::app3(s, Term::numeral(2), Term::numeral(5), Term::numeral(9));
        assert_eq!(eval_nat(&out, DEFAULT_FUEL).unwrap(), 9);
    }

    #[test]
    fn split_term_base_case_picks_the_right_side() {
        let s = apartness_split_term(&nat());
        // x = 2, y = 5, z = 2: x and z coincide, so the y side is selected
        let out = Term::app4(
            s.clone(),
            Term::numeral(2),
            Term::numeral(5),
            Term::numeral(2),
            Term::numeral(0),
        );
        assert_eq!(eval_nat(&psnd(out), DEFAULT_FUEL).unwrap(), 1);
        // z apart from x: the x side works
        let out = Term::app4(
            s,
            Term::numeral(2),
            Term::numeral(5),
            Term::numeral(4),
            Term::numeral(0),
        );
        assert_eq!(eval_nat(&psnd(out), DEFAULT_FUEL).unwrap(), 0);
    }

    #[test]
    fn sym_arrow_keeps_the_point() {
        // at N -> N the symmetric realizer re-uses the point and the witness
        let s = apartness_sym_term(&nn());
        let x = zero_term(&type_plus(&nn()));
        let y = zero_term(&type_plus(&nn()));
        let z = ppair(Term::numeral(4), Term::numeral(7));
        let out = Term::app3(s, x, y, z.clone());
        assert_eq!(term_eq_norm(&out, &z, DEFAULT_FUEL), EqOutcome::Equal);
    }

    #[test]
    fn cext_witness_equation_and_types() {
        for (sigma, tau) in [(nat(), nat()), (nat(), nn())] {
            let z = cext_witness(&sigma, &tau);
            let nat0 = nat();
            let a = FT::arrow(sigma.clone(), nat0.clone());
            let fty = type_plus(&FT::arrow(a.clone(), FT::arrow(tau.clone(), nat0)));
            let f = Term::var("f", fty);
            let x = Term::var("x", type_plus(&a));
            let y = Term::var("y", type_plus(&a));
            let v = Term::var("v", type_plus(&tau));
            let lhs = star(star(star(star(z, f.clone()), x.clone()), y.clone()), v.clone());
            let rhs = pfst(Term::app3(
                psnd(f),
                x,
                y,
                ppair(v, Term::numeral(0)),
            ));
            assert_eq!(
                term_eq_norm(&lhs, &rhs, DEFAULT_FUEL),
                EqOutcome::Equal,
                "witness equation at ({sigma}, {tau})"
            );
        }
        for sigma in crate::test_enum_types(2) {
            for tau in crate::test_enum_types(2) {
                let z = cext_witness(&sigma, &tau);
                assert!(infer_type(&z).is_ok());
                assert!(term_free_vars(&z).is_empty());
            }
        }
    }

    #[test]
    fn cext_witness_separates_concretely() {
        // sigma = tau = N; f is the alpha image of the identity functional,
        // x is constant 0, y is constant 1, each padded with dummy backward
        // components; the witness recovers the separating input
        let nat0 = nat();
        let a = FT::arrow(nat0.clone(), nat0.clone());
        let ap = type_plus(&a);
        let am = type_minus(&a);

        let id_back = lam(
            "g",
            ap.clone(),
            lam("g2", ap.clone(), lam("e", am.clone(), tvar("e", &am))),
        );
        let f = ppair(lam("g", ap.clone(), tvar("g", &ap)), id_back);

        let const_fn = |k: u64| {
            ppair(
                Term::app(
                    Term::constant(Comb::K, vec![nat(), nat()]),
                    Term::numeral(k),
                ),
                zero_term(&FT::arrow(
                    nat(),
                    FT::arrow(nat(), FT::arrow(nat(), nat())),
                )),
            )
        };
        let x = const_fn(0);
        let y = const_fn(1);

        let z = cext_witness(&nat0, &nat0);
        let point = star(
            star(star(star(z, f), x.clone()), y.clone()),
            Term::numeral(5),
        );
        assert_eq!(eval_nat(&point, DEFAULT_FUEL).unwrap(), 5);
        assert_eq!(
            eval_nat(&star(x, point.clone()), DEFAULT_FUEL).unwrap(),
            0
        );
        assert_eq!(eval_nat(&star(y, point), DEFAULT_FUEL).unwrap(), 1);
    }
}
