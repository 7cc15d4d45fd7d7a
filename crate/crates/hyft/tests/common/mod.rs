//! Deterministic random generators for well-typed terms and formulas,
//! shared by the property and acceptance suites.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hyft::syntax::{pair_term, Comb, FiniteType, Formula, Term};
use hyft::typing::{lambda_abstract, zero_term};

pub struct Gen {
    pub rng: StdRng,
    binder: u64,
}

impl Gen {
    pub fn seeded(seed: u64) -> Gen {
        Gen { rng: StdRng::seed_from_u64(seed), binder: 0 }
    }

    fn fresh_binder(&mut self) -> String {
        self.binder += 1;
        format!("w{}", self.binder)
    }

    pub fn ty(&mut self, depth: usize) -> FiniteType {
        if depth == 0 || self.rng.gen_bool(0.45) {
            FiniteType::Nat
        } else if self.rng.gen_bool(0.4) {
            FiniteType::prod(self.ty(depth - 1), self.ty(depth - 1))
        } else {
            FiniteType::arrow(self.ty(depth - 1), self.ty(depth - 1))
        }
    }

    /// A term of the requested type, well-typed in `ctx` by construction.
    pub fn term(&mut self, target: &FiniteType, ctx: &[(String, FiniteType)], depth: usize) -> Term {
        let vars: Vec<&(String, FiniteType)> =
            ctx.iter().filter(|(_, t)| t == target).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.35) {
            let (n, t) = vars[self.rng.gen_range(0..vars.len())];
            return Term::var(n, t.clone());
        }
        if depth == 0 {
            return zero_term(target);
        }
        match target {
            FiniteType::Nat => match self.rng.gen_range(0..6) {
                0 => Term::numeral(self.rng.gen_range(0..4)),
                1 => Term::app(
                    Term::constant(Comb::Suc, vec![]),
                    self.term(&FiniteType::Nat, ctx, depth - 1),
                ),
                2 => {
                    let other = self.ty(1);
                    let p = FiniteType::prod(FiniteType::Nat, other.clone());
                    hyft::syntax::fst_term(
                        &FiniteType::Nat,
                        &other,
                        self.term(&p, ctx, depth - 1),
                    )
                }
                3 => {
                    let a = self.ty(1);
                    Term::app(
                        self.term(&FiniteType::arrow(a.clone(), FiniteType::Nat), ctx, depth - 1),
                        self.term(&a, ctx, depth - 1),
                    )
                }
                4 => {
                    // a closed recursion: R base (\m z. S z) n
                    let step = lambda_abstract(
                        "m",
                        FiniteType::Nat,
                        &lambda_abstract(
                            "z",
                            FiniteType::Nat,
                            &Term::app(
                                Term::constant(Comb::Suc, vec![]),
                                Term::var("z", FiniteType::Nat),
                            ),
                        )
                        .unwrap(),
                    )
                    .unwrap();
                    Term::app3(
                        Term::constant(Comb::Rec, vec![FiniteType::Nat]),
                        self.term(&FiniteType::Nat, ctx, depth - 1),
                        step,
                        Term::numeral(self.rng.gen_range(0..3)),
                    )
                }
                _ => zero_term(target),
            },
            FiniteType::Prod(a, b) => pair_term(
                a,
                b,
                self.term(a, ctx, depth - 1),
                self.term(b, ctx, depth - 1),
            ),
            FiniteType::Arrow(a, b) => match self.rng.gen_range(0..4) {
                0 | 1 => {
                    let x = self.fresh_binder();
                    let mut inner = ctx.to_vec();
                    inner.push((x.clone(), a.as_ref().clone()));
                    let body = self.term(b, &inner, depth - 1);
                    lambda_abstract(&x, a.as_ref().clone(), &body)
                        .expect("generated abstraction")
                }
                2 => Term::app(
                    Term::constant(Comb::K, vec![b.as_ref().clone(), a.as_ref().clone()]),
                    self.term(b, ctx, depth - 1),
                ),
                _ => zero_term(target),
            },
        }
    }

    /// A formula over `ctx`; `hybrid` allows `ext`/`=` atoms.
    pub fn formula(&mut self, ctx: &[(String, FiniteType)], depth: usize, hybrid: bool) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.3) {
            let ty = self.ty(2);
            let s = self.term(&ty, ctx, 2);
            let t = self.term(&ty, ctx, 2);
            return match (hybrid, self.rng.gen_range(0..3)) {
                (true, 0) => Formula::Ext(ty, s),
                (true, 1) => Formula::ExtEq(ty, s, t),
                _ => Formula::PrimEq(ty, s, t),
            };
        }
        match self.rng.gen_range(0..7) {
            0 => Formula::Falsum,
            1 => Formula::and(
                self.formula(ctx, depth - 1, hybrid),
                self.formula(ctx, depth - 1, hybrid),
            ),
            2 => Formula::or(
                self.formula(ctx, depth - 1, hybrid),
                self.formula(ctx, depth - 1, hybrid),
            ),
            3 => Formula::imp(
                self.formula(ctx, depth - 1, hybrid),
                self.formula(ctx, depth - 1, hybrid),
            ),
            n => {
                let x = self.fresh_binder();
                let ty = self.ty(2);
                let mut inner = ctx.to_vec();
                inner.push((x.clone(), ty.clone()));
                let body = self.formula(&inner, depth - 1, hybrid);
                if n == 4 {
                    Formula::exists(x, ty, body)
                } else {
                    Formula::forall(x, ty, body)
                }
            }
        }
    }
}

/// A small pool of free variables for generated terms.
pub fn base_ctx(g: &mut Gen) -> Vec<(String, FiniteType)> {
    vec![
        ("x".to_owned(), FiniteType::Nat),
        ("y".to_owned(), FiniteType::Nat),
        ("f".to_owned(), FiniteType::arrow(FiniteType::Nat, FiniteType::Nat)),
        ("p".to_owned(), FiniteType::prod(FiniteType::Nat, FiniteType::Nat)),
        ("g".to_owned(), g.ty(2)),
    ]
}
