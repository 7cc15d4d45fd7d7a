//! Bounded standard-model evaluation of formulas: the testing oracle for
//! semantic claims that cannot be decided syntactically.
//!
//! Quantifiers range over finite enumerations of closed terms, so a
//! `Holds` verdict always means "no counterexample in the sampled domain"
//! and an exhausted existential is reported as a witness-free `Fails`.
//! Primitive equality at higher types is only semi-decided: disagreement
//! on a sample is definite, agreement on all samples is `Unknown`.

use thiserror::Error;

use crate::rewrite::{self, eval_nat, normalize, RewriteError};
use crate::syntax::{formula_free_vars, pair_term, Comb, FiniteType, Formula, Term};
use crate::typing::{lambda_abstract_opt, substitute_formula, zero_term, TypeError};

/// Bounds for bounded-model evaluation: type-0 quantifiers range over
/// `0..=nat_bound`, quantifiers at other types over at most `term_budget`
/// enumerated closed terms per type, and every evaluation gets `fuel`
/// rewrite steps.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub nat_bound: u64,
    pub term_budget: usize,
    pub fuel: u64,
}

impl Default for DomainSpec {
    fn default() -> DomainSpec {
        DomainSpec { nat_bound: 8, term_budget: 7, fuel: rewrite::DEFAULT_FUEL }
    }
}

/// Outcome of bounded evaluation. A `Fails` verdict carries the
/// assignment of closed terms to universally quantified variables leading
/// to the failure; for a witness-less existential it is empty.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Holds,
    Fails(Vec<(String, Term)>),
    Unknown,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("formula contains ext/= atoms; expand them before evaluation")]
    HybridAtoms,
    #[error("formula has free variables: {0:?}")]
    OpenFormula(Vec<String>),
    #[error("evaluation failed on a closed term of type N: {0}")]
    Eval(RewriteError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

// ---------------------------------------------------------------------------
// Enumeration of closed terms
// ---------------------------------------------------------------------------

/// Closed terms of the given type: numerals at `N`, pairs of enumerations
/// at products, and at arrows a deduplicated generation from constants,
/// the identity, successor compositions, and small primitive-recursive
/// tables, capped at `term_budget` candidates per type.
pub fn enumerate(ty: &FiniteType, spec: &DomainSpec) -> Vec<Term> {
    match ty {
        FiniteType::Nat => (0..=spec.nat_bound).map(Term::numeral).collect(),
        FiniteType::Prod(a, b) => {
            let ea = enumerate(a, spec);
            let eb = enumerate(b, spec);
            let mut out = Vec::with_capacity(ea.len() * eb.len());
            for x in &ea {
                for y in &eb {
                    out.push(pair_term(a, b, x.clone(), y.clone()));
                }
            }
            out
        }
        FiniteType::Arrow(a, b) => enumerate_arrow(a, b, spec),
    }
}

fn identity_term(ty: &FiniteType) -> Term {
    lambda_abstract_opt("x", ty.clone(), &Term::var("x", ty.clone()))
        .expect("identity construction")
}

fn enumerate_arrow(a: &FiniteType, b: &FiniteType, spec: &DomainSpec) -> Vec<Term> {
    let nat = FiniteType::Nat;
    let mut candidates = Vec::new();

    // constants first, so low numerals show up as early counterexamples
    for c in enumerate(b, spec) {
        candidates.push(Term::app(
            Term::constant(Comb::K, vec![b.clone(), a.clone()]),
            c,
        ));
    }
    if a == b {
        candidates.push(identity_term(a));
    }
    if *a == nat && *b == nat {
        candidates.push(Term::constant(Comb::Suc, vec![]));
        let x = Term::var("x", nat.clone());
        let suc = |t: Term| Term::app(Term::constant(Comb::Suc, vec![]), t);
        candidates.push(
            lambda_abstract_opt("x", nat.clone(), &suc(suc(x.clone()))).expect("suc composition"),
        );
        // predecessor and a 0/1 swap, as primitive-recursive tables
        let rec = Term::constant(Comb::Rec, vec![nat.clone()]);
        let keep_index = lambda_abstract_opt(
            "m",
            nat.clone(),
            &lambda_abstract_opt("z", nat.clone(), &Term::var("m", nat.clone())).unwrap(),
        )
        .unwrap();
        candidates.push(Term::app2(rec.clone(), Term::numeral(0), keep_index));
        let const_zero = lambda_abstract_opt(
            "m",
            nat.clone(),
            &lambda_abstract_opt("z", nat.clone(), &Term::numeral(0)).unwrap(),
        )
        .unwrap();
        candidates.push(Term::app2(rec, Term::numeral(1), const_zero));
    }
    candidates.push(zero_term(&FiniteType::arrow(a.clone(), b.clone())));

    // deduplicate by behaviour on a small fixed probe set
    let probes = probe_terms(a);
    let mut kept: Vec<Term> = Vec::new();
    let mut signatures: Vec<Vec<Term>> = Vec::new();
    for cand in candidates {
        let sig: Vec<Term> = probes
            .iter()
            .map(|p| normalize(&Term::app(cand.clone(), p.clone()), spec.fuel).result)
            .collect();
        if !signatures.contains(&sig) {
            signatures.push(sig);
            kept.push(cand);
        }
        if kept.len() >= spec.term_budget {
            break;
        }
    }
    kept
}

// Probe inputs for behavioural deduplication; intentionally independent
// of the domain bounds so that enlarging a spec only grows enumerations.
fn probe_terms(a: &FiniteType) -> Vec<Term> {
    match a {
        FiniteType::Nat => (0..=3).map(Term::numeral).collect(),
        FiniteType::Prod(x, y) => {
            let ex = probe_terms(x);
            let ey = probe_terms(y);
            let mut out = Vec::new();
            for l in ex.iter().take(2) {
                for r in ey.iter().take(2) {
                    out.push(pair_term(x, y, l.clone(), r.clone()));
                }
            }
            out
        }
        FiniteType::Arrow(x, y) => {
            let mut out = vec![zero_term(a)];
            if x == y {
                out.push(identity_term(x));
            }
            for c in probe_terms(y).into_iter().take(2) {
                out.push(Term::app(
                    Term::constant(Comb::K, vec![y.as_ref().clone(), x.as_ref().clone()]),
                    c,
                ));
            }
            out
        }
    }
}

// ---------------------------------------------------------------------------
// Formula evaluation
// ---------------------------------------------------------------------------

/// Evaluates a closed formula over the bounded standard model. `ext`/`=`
/// atoms must have been expanded by the caller.
pub fn eval_formula(phi: &Formula, spec: &DomainSpec) -> Result<Verdict, ModelError> {
    if crate::hybrid::has_hybrid_atoms(phi) {
        return Err(ModelError::HybridAtoms);
    }
    let fv = formula_free_vars(phi);
    if !fv.is_empty() {
        return Err(ModelError::OpenFormula(fv.into_keys().collect()));
    }
    eval_inner(phi, spec)
}

fn eval_inner(phi: &Formula, spec: &DomainSpec) -> Result<Verdict, ModelError> {
    Ok(match phi {
        Formula::PrimEq(ty, s, t) => sem_eq(ty, s, t, spec)?,
        Formula::ExtEq(..) | Formula::Ext(..) => return Err(ModelError::HybridAtoms),
        Formula::Falsum => Verdict::Fails(vec![]),
        Formula::And(a, b) => match eval_inner(a, spec)? {
            Verdict::Fails(cex) => Verdict::Fails(cex),
            va => match eval_inner(b, spec)? {
                Verdict::Fails(cex) => Verdict::Fails(cex),
                Verdict::Holds if va.holds() => Verdict::Holds,
                _ => Verdict::Unknown,
            },
        },
        Formula::Or(a, b) => match eval_inner(a, spec)? {
            Verdict::Holds => Verdict::Holds,
            va => match eval_inner(b, spec)? {
                Verdict::Holds => Verdict::Holds,
                Verdict::Fails(mut cex) => match va {
                    Verdict::Fails(mut cl) => {
                        cl.append(&mut cex);
                        Verdict::Fails(cl)
                    }
                    _ => Verdict::Unknown,
                },
                Verdict::Unknown => Verdict::Unknown,
            },
        },
        Formula::Imp(a, b) => match eval_inner(a, spec)? {
            Verdict::Fails(_) => Verdict::Holds,
            va => match eval_inner(b, spec)? {
                Verdict::Holds => Verdict::Holds,
                Verdict::Fails(cex) if va.holds() => Verdict::Fails(cex),
                _ => Verdict::Unknown,
            },
        },
        Formula::Forall(x, ty, body) => {
            let mut unknown = false;
            for cand in enumerate(ty, spec) {
                let inst = substitute_formula(body, x, &cand)?;
                match eval_inner(&inst, spec)? {
                    Verdict::Fails(mut cex) => {
                        let mut all = vec![(x.clone(), cand)];
                        all.append(&mut cex);
                        return Ok(Verdict::Fails(all));
                    }
                    Verdict::Unknown => unknown = true,
                    Verdict::Holds => {}
                }
            }
            if unknown {
                Verdict::Unknown
            } else {
                Verdict::Holds
            }
        }
        Formula::Exists(x, ty, body) => {
            let mut unknown = false;
            for cand in enumerate(ty, spec) {
                let inst = substitute_formula(body, x, &cand)?;
                match eval_inner(&inst, spec)? {
                    Verdict::Holds => return Ok(Verdict::Holds),
                    Verdict::Unknown => unknown = true,
                    Verdict::Fails(_) => {}
                }
            }
            if unknown {
                Verdict::Unknown
            } else {
                // no witness in the bounded domain
                Verdict::Fails(vec![])
            }
        }
    })
}

// Semantic equality of two closed terms at a type: exact at N, pointwise
// at products, sampled at arrows.
fn sem_eq(
    ty: &FiniteType,
    s: &Term,
    t: &Term,
    spec: &DomainSpec,
) -> Result<Verdict, ModelError> {
    match ty {
        FiniteType::Nat => {
            let a = nat_value(s, spec)?;
            let b = nat_value(t, spec)?;
            Ok(match (a, b) {
                (Some(a), Some(b)) if a == b => Verdict::Holds,
                (Some(_), Some(_)) => Verdict::Fails(vec![]),
                _ => Verdict::Unknown,
            })
        }
        FiniteType::Prod(a, b) => {
            let sa = sem_eq(
                a,
                &crate::syntax::fst_term(a, b, s.clone()),
                &crate::syntax::fst_term(a, b, t.clone()),
                spec,
            )?;
            if let Verdict::Fails(c) = sa {
                return Ok(Verdict::Fails(c));
            }
            let sb = sem_eq(
                b,
                &crate::syntax::snd_term(a, b, s.clone()),
                &crate::syntax::snd_term(a, b, t.clone()),
                spec,
            )?;
            Ok(match (sa, sb) {
                (_, Verdict::Fails(c)) => Verdict::Fails(c),
                (Verdict::Holds, Verdict::Holds) => Verdict::Holds,
                _ => Verdict::Unknown,
            })
        }
        FiniteType::Arrow(a, b) => {
            // sampled extensional comparison; agreement on every sample of
            // an infinite type stays Unknown
            for p in enumerate(a, spec) {
                let v = sem_eq(
                    b,
                    &Term::app(s.clone(), p.clone()),
                    &Term::app(t.clone(), p),
                    spec,
                )?;
                if let Verdict::Fails(c) = v {
                    return Ok(Verdict::Fails(c));
                }
            }
            Ok(Verdict::Unknown)
        }
    }
}

fn nat_value(t: &Term, spec: &DomainSpec) -> Result<Option<u64>, ModelError> {
    match eval_nat(t, spec.fuel) {
        Ok(n) => Ok(Some(n)),
        Err(RewriteError::FuelExhausted(_)) => Ok(None),
        Err(e @ RewriteError::NotNumeral(_)) => Err(ModelError::Eval(e)),
    }
}

/// Strips the leading universal quantifiers matched by a counterexample
/// assignment and substitutes it in; used to confirm that reported
/// counterexamples actually falsify the body.
pub fn apply_counterexample(
    phi: &Formula,
    cex: &[(String, Term)],
) -> Result<Formula, ModelError> {
    let mut cur = phi.clone();
    for (name, term) in cex {
        match cur {
            Formula::Forall(ref x, _, ref body) if x == name => {
                cur = substitute_formula(body, name, term)?;
            }
            _ => return Err(ModelError::OpenFormula(vec![name.clone()])),
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;
    use crate::typing::Context;
    use FiniteType as FT;

    fn nat() -> FT {
        FT::Nat
    }

    fn spec() -> DomainSpec {
        DomainSpec { nat_bound: 5, term_budget: 7, ..Default::default() }
    }

    #[test]
    fn enumerate_nat_is_the_numeral_range() {
        let s = DomainSpec { nat_bound: 3, ..Default::default() };
        let e = enumerate(&nat(), &s);
        assert_eq!(e, (0..=3).map(Term::numeral).collect::<Vec<_>>());
    }

    #[test]
    fn enumerate_arrow_contains_identity_and_constants() {
        let e = enumerate(&FT::arrow(nat(), nat()), &spec());
        assert!(!e.is_empty());
        let probes: Vec<u64> = (0..=4).collect();
        let behaves_like_id = e.iter().any(|f| {
            probes.iter().all(|&n| {
                eval_nat(&Term::app(f.clone(), Term::numeral(n)), rewrite::DEFAULT_FUEL)
                    == Ok(n)
            })
        });
        let behaves_like_const1 = e.iter().any(|f| {
            probes.iter().all(|&n| {
                eval_nat(&Term::app(f.clone(), Term::numeral(n)), rewrite::DEFAULT_FUEL)
                    == Ok(1)
            })
        });
        assert!(behaves_like_id, "identity missing from enumeration");
        assert!(behaves_like_const1, "constant 1 missing from enumeration");
        // everything enumerated is closed and well-typed
        for f in &e {
            assert!(crate::syntax::term_free_vars(f).is_empty());
            assert_eq!(
                crate::typing::type_of(f, &Context::new()).unwrap(),
                FT::arrow(nat(), nat())
            );
        }
    }

    #[test]
    fn eval_reflexivity_holds() {
        let phi = parse_formula("forall x:N. x == x", &Context::new()).unwrap();
        assert_eq!(eval_formula(&phi, &spec()).unwrap(), Verdict::Holds);
    }

    #[test]
    fn eval_successor_never_zero() {
        let phi = parse_formula("exists x:N. SUC x == 0", &Context::new()).unwrap();
        assert_eq!(eval_formula(&phi, &spec()).unwrap(), Verdict::Fails(vec![]));
    }

    #[test]
    fn eval_finds_function_counterexample() {
        let phi = parse_formula("forall f:N -> N. f 0 == 0", &Context::new()).unwrap();
        match eval_formula(&phi, &spec()).unwrap() {
            Verdict::Fails(cex) => {
                assert_eq!(cex.len(), 1);
                assert_eq!(cex[0].0, "f");
                // the reported function really maps 0 somewhere else
                let v = eval_nat(
                    &Term::app(cex[0].1.clone(), Term::numeral(0)),
                    rewrite::DEFAULT_FUEL,
                )
                .unwrap();
                assert_ne!(v, 0);
                // and it is the first constant that differs from 0
                assert_eq!(v, 1);
                // the counterexample re-evaluates the body to false
                let stripped = apply_counterexample(&phi, &cex).unwrap();
                assert_eq!(
                    eval_formula(&stripped, &spec()).unwrap(),
                    Verdict::Fails(vec![])
                );
            }
            other => panic!("expected a counterexample, got {other:?}"),
        }
    }

    #[test]
    fn hybrid_atoms_are_rejected() {
        let phi = parse_formula("ext(x:N)", &Context::new()).unwrap();
        assert!(matches!(
            eval_formula(&phi, &spec()),
            Err(ModelError::HybridAtoms)
        ));
    }

    #[test]
    fn open_formulas_are_rejected() {
        let phi = parse_formula("x == x", &Context::new().with("x", nat())).unwrap();
        assert!(matches!(
            eval_formula(&phi, &spec()),
            Err(ModelError::OpenFormula(_))
        ));
    }

    #[test]
    fn unknown_propagates_from_higher_type_equality() {
        // extensional agreement of two definitionally distinct functions
        // stays Unknown
        let ctx = Context::new();
        let phi = parse_formula(
            "forall x:N -> N. x == x",
            &ctx,
        )
        .unwrap();
        // reflexive at arrow type: samples agree, domain infinite
        assert_eq!(eval_formula(&phi, &spec()).unwrap(), Verdict::Unknown);
    }

    #[test]
    fn monotonicity_on_universal_formulas() {
        let ctx = Context::new();
        let phis = [
            parse_formula("forall x:N. forall y:N. x == y", &ctx).unwrap(),
            parse_formula("forall x:N. SUC x == x -> false", &ctx).unwrap(),
            parse_formula("forall f:N -> N. f 1 == f 0", &ctx).unwrap(),
        ];
        for phi in &phis {
            let small = DomainSpec { nat_bound: 2, term_budget: 5, ..Default::default() };
            let big = DomainSpec { nat_bound: 6, term_budget: 12, ..Default::default() };
            let vs = eval_formula(phi, &small).unwrap();
            let vb = eval_formula(phi, &big).unwrap();
            if matches!(vs, Verdict::Fails(_)) {
                assert!(
                    matches!(vb, Verdict::Fails(_)),
                    "larger domain flipped Fails for {phi}"
                );
            }
        }
    }
}
