//! The strong-retract calculus: section/retraction pairs of closed terms
//! with `r . i = 1` on extensional inputs, and the compiler exhibiting any
//! finite type as a retract of one of the shape `tau -> 0`.

use crate::rewrite::arith_library;
use crate::syntax::{fst_term, pair_term, snd_term, FiniteType, Term};
use crate::typing::{infer_type, lambda_abstract_opt, zero_term, TypeError};

/// A section/retraction pair between two finite types. Both terms are
/// closed; the round trip `retraction(section(x)) = x` is the defining
/// contract, extensionally.
#[derive(Debug, Clone)]
pub struct Retraction {
    pub source: FiniteType,
    pub target: FiniteType,
    pub section: Term,
    pub retraction: Term,
}

#[derive(Debug, thiserror::Error)]
pub enum RetractError {
    #[error("cannot compose: first target is {0}, second source is {1}")]
    MiddleMismatch(FiniteType, FiniteType),
    #[error(transparent)]
    Type(#[from] TypeError),
}

impl Retraction {
    /// Checks that both terms are closed and typecheck at their arrow types.
    pub fn validate(&self) -> Result<(), TypeError> {
        let ity = infer_type(&self.section)?;
        let rty = infer_type(&self.retraction)?;
        let want_i = FiniteType::arrow(self.source.clone(), self.target.clone());
        let want_r = FiniteType::arrow(self.target.clone(), self.source.clone());
        if ity != want_i {
            return Err(TypeError::Mismatch {
                expected: want_i,
                found: ity,
                what: "section".into(),
            });
        }
        if rty != want_r {
            return Err(TypeError::Mismatch {
                expected: want_r,
                found: rty,
                what: "retraction".into(),
            });
        }
        Ok(())
    }
}

fn lam(name: &str, ty: FiniteType, body: Term) -> Term {
    lambda_abstract_opt(name, ty, &body).expect("retract construction")
}

fn tvar(name: &str, ty: &FiniteType) -> Term {
    Term::var(name, ty.clone())
}

/// `N` as a retract of `N -> N`: the section builds constant functions,
/// the retraction evaluates at `0`.
pub fn retract_base() -> Retraction {
    let nat = FiniteType::Nat;
    let section = lam(
        "x",
        nat.clone(),
        lam("y", nat.clone(), tvar("x", &nat)),
    );
    let retraction = lam(
        "f",
        FiniteType::arrow(nat.clone(), nat.clone()),
        Term::app(
            tvar("f", &FiniteType::arrow(nat.clone(), nat.clone())),
            Term::numeral(0),
        ),
    );
    Retraction {
        source: nat.clone(),
        target: FiniteType::arrow(nat.clone(), nat),
        section,
        retraction,
    }
}

/// Composition of retracts: `alpha` a retract of `beta` and `beta` of
/// `gamma` gives `alpha` a retract of `gamma`.
pub fn retract_compose(a: &Retraction, b: &Retraction) -> Result<Retraction, RetractError> {
    if a.target != b.source {
        return Err(RetractError::MiddleMismatch(
            a.target.clone(),
            b.source.clone(),
        ));
    }
    let section = lam(
        "x",
        a.source.clone(),
        Term::app(
            b.section.clone(),
            Term::app(a.section.clone(), tvar("x", &a.source)),
        ),
    );
    let retraction = lam(
        "y",
        b.target.clone(),
        Term::app(
            a.retraction.clone(),
            Term::app(b.retraction.clone(), tvar("y", &b.target)),
        ),
    );
    Ok(Retraction {
        source: a.source.clone(),
        target: b.target.clone(),
        section,
        retraction,
    })
}

/// Componentwise retract of products.
pub fn retract_prod(a: &Retraction, b: &Retraction) -> Retraction {
    let source = FiniteType::prod(a.source.clone(), b.source.clone());
    let target = FiniteType::prod(a.target.clone(), b.target.clone());
    let x = tvar("x", &source);
    let section = lam(
        "x",
        source.clone(),
        pair_term(
            &a.target,
            &b.target,
            Term::app(a.section.clone(), fst_term(&a.source, &b.source, x.clone())),
            Term::app(b.section.clone(), snd_term(&a.source, &b.source, x.clone())),
        ),
    );
    let y = tvar("y", &target);
    let retraction = lam(
        "y",
        target.clone(),
        pair_term(
            &a.source,
            &b.source,
            Term::app(a.retraction.clone(), fst_term(&a.target, &b.target, y.clone())),
            Term::app(b.retraction.clone(), snd_term(&a.target, &b.target, y.clone())),
        ),
    );
    Retraction { source, target, section, retraction }
}

/// If `alpha` is a retract of `beta`, then `gamma -> alpha` is a retract
/// of `gamma -> beta`, by post-composition on both sides.
pub fn retract_postcompose(gamma: &FiniteType, a: &Retraction) -> Retraction {
    let source = FiniteType::arrow(gamma.clone(), a.source.clone());
    let target = FiniteType::arrow(gamma.clone(), a.target.clone());
    let section = lam(
        "x",
        source.clone(),
        lam(
            "y",
            gamma.clone(),
            Term::app(
                a.section.clone(),
                Term::app(tvar("x", &source), tvar("y", gamma)),
            ),
        ),
    );
    let retraction = lam(
        "x",
        target.clone(),
        lam(
            "y",
            gamma.clone(),
            Term::app(
                a.retraction.clone(),
                Term::app(tvar("x", &target), tvar("y", gamma)),
            ),
        ),
    );
    Retraction { source, target, section, retraction }
}

/// `(a -> b) * (c -> d)` as a retract of `a * c -> b * d`. The retraction
/// probes the function with zero terms in the unused component.
pub fn retract_funpair(
    a: &FiniteType,
    b: &FiniteType,
    c: &FiniteType,
    d: &FiniteType,
) -> Retraction {
    let ab = FiniteType::arrow(a.clone(), b.clone());
    let cd = FiniteType::arrow(c.clone(), d.clone());
    let source = FiniteType::prod(ab.clone(), cd.clone());
    let ac = FiniteType::prod(a.clone(), c.clone());
    let bd = FiniteType::prod(b.clone(), d.clone());
    let target = FiniteType::arrow(ac.clone(), bd);

    let h = tvar("h", &source);
    let y = tvar("y", &ac);
    let section = lam(
        "h",
        source.clone(),
        lam(
            "y",
            ac.clone(),
            pair_term(
                b,
                d,
                Term::app(fst_term(&ab, &cd, h.clone()), fst_term(a, c, y.clone())),
                Term::app(snd_term(&ab, &cd, h.clone()), snd_term(a, c, y.clone())),
            ),
        ),
    );

    let k = tvar("k", &target);
    let retraction = lam(
        "k",
        target.clone(),
        pair_term(
            &ab,
            &cd,
            lam(
                "x",
                a.clone(),
                fst_term(
                    b,
                    d,
                    Term::app(k.clone(), pair_term(a, c, tvar("x", a), zero_term(c))),
                ),
            ),
            lam(
                "z",
                c.clone(),
                snd_term(
                    b,
                    d,
                    Term::app(k.clone(), pair_term(a, c, zero_term(a), tvar("z", c))),
                ),
            ),
        ),
    );
    Retraction { source, target, section, retraction }
}

/// `a -> b -> c` as a retract of `a * b -> c` (currying).
pub fn retract_curry(a: &FiniteType, b: &FiniteType, c: &FiniteType) -> Retraction {
    let source = FiniteType::arrow(a.clone(), FiniteType::arrow(b.clone(), c.clone()));
    let ab = FiniteType::prod(a.clone(), b.clone());
    let target = FiniteType::arrow(ab.clone(), c.clone());

    let f = tvar("f", &source);
    let section = lam(
        "f",
        source.clone(),
        lam(
            "x",
            ab.clone(),
            Term::app(
                Term::app(f.clone(), fst_term(a, b, tvar("x", &ab))),
                snd_term(a, b, tvar("x", &ab)),
            ),
        ),
    );
    let g = tvar("g", &target);
    let retraction = lam(
        "g",
        target.clone(),
        lam(
            "x",
            a.clone(),
            lam(
                "y",
                b.clone(),
                Term::app(g.clone(), pair_term(a, b, tvar("x", a), tvar("y", b))),
            ),
        ),
    );
    Retraction { source, target, section, retraction }
}

/// The strong isomorphism `N * N = N` given by Cantor pairing.
pub fn nat_prod_iso() -> Retraction {
    let nat = FiniteType::Nat;
    let nn = FiniteType::prod(nat.clone(), nat.clone());
    let lib = arith_library();
    let p = tvar("p", &nn);
    let section = lam(
        "p",
        nn.clone(),
        Term::app2(
            lib.pair_nat.clone(),
            fst_term(&nat, &nat, p.clone()),
            snd_term(&nat, &nat, p),
        ),
    );
    let retraction = lam(
        "n",
        nat.clone(),
        pair_term(
            &nat,
            &nat,
            Term::app(lib.unpair_fst.clone(), tvar("n", &nat)),
            Term::app(lib.unpair_snd.clone(), tvar("n", &nat)),
        ),
    );
    Retraction { source: nn, target: nat, section, retraction }
}

/// Exhibits any `sigma` as a strong retract of some `tau -> 0`, by
/// induction on the type: the base case embeds `N` into `N -> N`, products
/// go through pairs of functions and the pairing isomorphism, and arrows
/// through post-composition and currying.
pub fn retract_to_fun0(sigma: &FiniteType) -> Retraction {
    let nat = FiniteType::Nat;
    match sigma {
        FiniteType::Nat => retract_base(),
        FiniteType::Prod(a, b) => {
            let ra = retract_to_fun0(a);
            let rb = retract_to_fun0(b);
            let (ta, tb) = (fun0_domain(&ra), fun0_domain(&rb));
            let step1 = retract_prod(&ra, &rb);
            let step2 = retract_funpair(&ta, &nat, &tb, &nat);
            let step3 = retract_postcompose(&FiniteType::prod(ta, tb), &nat_prod_iso());
            retract_compose(&retract_compose(&step1, &step2).expect("prod middle"), &step3)
                .expect("prod iso middle")
        }
        FiniteType::Arrow(a, b) => {
            let rb = retract_to_fun0(b);
            let tb = fun0_domain(&rb);
            let step1 = retract_postcompose(a, &rb);
            let step2 = retract_curry(a, &tb, &nat);
            retract_compose(&step1, &step2).expect("arrow middle")
        }
    }
}

fn fun0_domain(r: &Retraction) -> FiniteType {
    match &r.target {
        FiniteType::Arrow(dom, cod) if **cod == FiniteType::Nat => dom.as_ref().clone(),
        other => panic!("retract target is not of the shape tau -> 0: {other}"),
    }
}
