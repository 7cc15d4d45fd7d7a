//! The equational engine: one-step and full normalization under the
//! combinator equations, numeral evaluation, and a library of closed
//! arithmetic terms.
//!
//! Redexes, contracted leftmost-outermost:
//!
//! ```text
//! k x y            ~> x
//! s x y z          ~> x z (y z)
//! fst (pair x y)   ~> x
//! snd (pair x y)   ~> y
//! R x y 0          ~> x
//! R x y (S m)      ~> y m (R x y m)
//! ```
//!
//! The rules are non-overlapping and left-linear, so the system is
//! orthogonal and any normalizing strategy reaches the same normal form.
//! [`normalize`] reduces to weak head normal form first (evaluating the
//! scrutinee of `fst`/`snd`/`R` as far as needed) and then recurses into
//! the remaining arguments.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::syntax::{Comb, FiniteType, Term};
use crate::typing::{lambda_abstract_opt, zero_term};

pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RewriteError {
    #[error("fuel exhausted after {0} steps")]
    FuelExhausted(u64),
    #[error("normal form is not a numeral: {0}")]
    NotNumeral(Term),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    NormalForm,
    FuelExhausted,
}

#[derive(Debug, Clone)]
pub struct NormalizeOutcome {
    pub result: Term,
    pub steps: u64,
    pub status: Status,
}

/// Contracts the leftmost-outermost redex, if any.
pub fn step(t: &Term) -> Option<Term> {
    if let Some(t2) = contract_root(t) {
        return Some(t2);
    }
    if let Term::App(f, a) = t {
        if let Some(f2) = step(f) {
            return Some(Term::app(f2, a.as_ref().clone()));
        }
        if let Some(a2) = step(a) {
            return Some(Term::app(f.as_ref().clone(), a2));
        }
    }
    None
}

fn contract_root(t: &Term) -> Option<Term> {
    let (head, args) = t.spine();
    let kind = match head {
        Term::Const { kind, .. } => *kind,
        _ => return None,
    };
    match (kind, args.len()) {
        (Comb::K, 2) => Some(args[0].clone()),
        (Comb::S, 3) => Some(Term::app(
            Term::app(args[0].clone(), args[2].clone()),
            Term::app(args[1].clone(), args[2].clone()),
        )),
        (Comb::Fst, 1) | (Comb::Snd, 1) => {
            let (ihead, iargs) = args[0].spine();
            match ihead {
                Term::Const { kind: Comb::Pair, .. } if iargs.len() == 2 => {
                    Some(if kind == Comb::Fst {
                        iargs[0].clone()
                    } else {
                        iargs[1].clone()
                    })
                }
                _ => None,
            }
        }
        (Comb::Rec, 3) => {
            let (ihead, iargs) = args[2].spine();
            match ihead {
                Term::Const { kind: Comb::Zero, .. } if iargs.is_empty() => Some(args[0].clone()),
                Term::Const { kind: Comb::Suc, .. } if iargs.len() == 1 => {
                    let m = iargs[0].clone();
                    let rec_m = Term::app3(head.clone(), args[0].clone(), args[1].clone(), m.clone());
                    Some(Term::app2(args[1].clone(), m, rec_m))
                }
                _ => None,
            }
        }
        _ => None,
    }
}

struct Machine {
    fuel_left: u64,
    steps: u64,
    exhausted: bool,
    // Call-by-need: weak-head and full normal forms memoized per shared
    // node. The S rule duplicates its argument as clones of one Arc, so
    // pointer-keyed entries give genuine sharing of evaluation work.
    // Entries are only written when evaluation completed within fuel, and
    // the key Arc is kept alive by the entry itself.
    whnf_cache: HashMap<usize, (Arc<Term>, Arc<Term>)>,
    deep_cache: HashMap<usize, (Arc<Term>, Arc<Term>)>,
}

enum NumShape {
    Zero,
    Suc(Arc<Term>),
    Stuck,
}

impl Machine {
    fn new(fuel: u64) -> Machine {
        Machine {
            fuel_left: fuel,
            steps: 0,
            exhausted: false,
            whnf_cache: HashMap::new(),
            deep_cache: HashMap::new(),
        }
    }

    fn burn(&mut self) -> bool {
        if self.fuel_left == 0 {
            self.exhausted = true;
            false
        } else {
            self.fuel_left -= 1;
            self.steps += 1;
            true
        }
    }

    fn whnf(&mut self, t: &Arc<Term>) -> Arc<Term> {
        if !matches!(t.as_ref(), Term::App(..)) {
            return t.clone();
        }
        let key = Arc::as_ptr(t) as usize;
        if let Some((_, hit)) = self.whnf_cache.get(&key) {
            return hit.clone();
        }
        let out = self.whnf_run(t.clone());
        if !self.exhausted {
            self.whnf_cache.insert(key, (t.clone(), out.clone()));
        }
        out
    }

    fn whnf_run(&mut self, t: Arc<Term>) -> Arc<Term> {
        let mut cur = t;
        loop {
            if self.exhausted {
                return cur;
            }
            let (head, mut args) = spine_arcs(&cur);
            let kind = match head.as_ref() {
                Term::Const { kind, .. } => *kind,
                _ => return cur,
            };
            match kind {
                Comb::K if args.len() >= 2 => {
                    if !self.burn() {
                        return cur;
                    }
                    let x = args.remove(0);
                    args.remove(0);
                    cur = rebuild_arcs(x, args);
                }
                Comb::S if args.len() >= 3 => {
                    if !self.burn() {
                        return cur;
                    }
                    let x = args.remove(0);
                    let y = args.remove(0);
                    let z = args.remove(0);
                    // z is shared between both occurrences
                    let new = Arc::new(Term::App(
                        Arc::new(Term::App(x, z.clone())),
                        Arc::new(Term::App(y, z)),
                    ));
                    cur = rebuild_arcs(new, args);
                }
                Comb::Fst | Comb::Snd if !args.is_empty() => {
                    let scrut = self.whnf(&args[0]);
                    let proj = {
                        let (ihead, iargs) = spine_arcs(&scrut);
                        let is_pair =
                            matches!(ihead.as_ref(), Term::Const { kind: Comb::Pair, .. })
                                && iargs.len() == 2;
                        if is_pair {
                            let idx = if kind == Comb::Fst { 0 } else { 1 };
                            Some(iargs[idx].clone())
                        } else {
                            None
                        }
                    };
                    match proj {
                        Some(p) if !self.exhausted && self.burn() => {
                            args.remove(0);
                            cur = rebuild_arcs(p, args);
                        }
                        _ => {
                            args[0] = scrut;
                            return rebuild_arcs(head, args);
                        }
                    }
                }
                Comb::Rec if args.len() >= 3 => {
                    let scrut = self.whnf(&args[2]);
                    let shape = if self.exhausted {
                        NumShape::Stuck
                    } else {
                        let (ihead, iargs) = spine_arcs(&scrut);
                        match ihead.as_ref() {
                            Term::Const { kind: Comb::Zero, .. } if iargs.is_empty() => {
                                NumShape::Zero
                            }
                            Term::Const { kind: Comb::Suc, .. } if iargs.len() == 1 => {
                                NumShape::Suc(iargs[0].clone())
                            }
                            _ => NumShape::Stuck,
                        }
                    };
                    match shape {
                        NumShape::Zero if self.burn() => {
                            let x = args.remove(0);
                            args.remove(0);
                            args.remove(0);
                            cur = rebuild_arcs(x, args);
                        }
                        NumShape::Suc(m) if self.burn() => {
                            let x = args.remove(0);
                            let y = args.remove(0);
                            args.remove(0);
                            let rec_m = Arc::new(Term::App(
                                Arc::new(Term::App(
                                    Arc::new(Term::App(head.clone(), x)),
                                    y.clone(),
                                )),
                                m.clone(),
                            ));
                            let new = Arc::new(Term::App(
                                Arc::new(Term::App(y, m)),
                                rec_m,
                            ));
                            cur = rebuild_arcs(new, args);
                        }
                        _ => {
                            args[2] = scrut;
                            return rebuild_arcs(head, args);
                        }
                    }
                }
                _ => return cur,
            }
        }
    }

    fn deep(&mut self, t: &Arc<Term>) -> Arc<Term> {
        let key = Arc::as_ptr(t) as usize;
        if let Some((_, hit)) = self.deep_cache.get(&key) {
            return hit.clone();
        }
        let w = self.whnf(t);
        if self.exhausted {
            return w;
        }
        let (head, args) = spine_arcs(&w);
        let out = if args.is_empty() {
            w
        } else {
            let args: Vec<Arc<Term>> = args.iter().map(|a| self.deep(a)).collect();
            rebuild_arcs(head, args)
        };
        if !self.exhausted {
            self.deep_cache.insert(key, (t.clone(), out.clone()));
        }
        out
    }
}

fn spine_arcs(t: &Arc<Term>) -> (Arc<Term>, Vec<Arc<Term>>) {
    let mut args = Vec::new();
    let mut cur = t.clone();
    while let Term::App(f, a) = cur.as_ref() {
        args.push(a.clone());
        let f = f.clone();
        cur = f;
    }
    args.reverse();
    (cur, args)
}

fn rebuild_arcs(head: Arc<Term>, args: Vec<Arc<Term>>) -> Arc<Term> {
    args.into_iter()
        .fold(head, |acc, a| Arc::new(Term::App(acc, a)))
}

/// Full normalization, counting contractions. `FuelExhausted` is a status,
/// not an error; the result is then the best-effort partial reduct.
pub fn normalize(t: &Term, fuel: u64) -> NormalizeOutcome {
    let mut m = Machine::new(fuel);
    let result = m.deep(&Arc::new(t.clone()));
    NormalizeOutcome {
        result: result.as_ref().clone(),
        steps: m.steps,
        status: if m.exhausted { Status::FuelExhausted } else { Status::NormalForm },
    }
}

/// Evaluates a closed term of type `N` to the `n` with normal form `SUC^n 0`.
pub fn eval_nat(t: &Term, fuel: u64) -> Result<u64, RewriteError> {
    let out = normalize(t, fuel);
    match out.status {
        Status::FuelExhausted => Err(RewriteError::FuelExhausted(out.steps)),
        Status::NormalForm => out
            .result
            .as_numeral()
            .ok_or(RewriteError::NotNumeral(out.result)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqOutcome {
    Equal,
    Distinct,
    Unknown,
}

/// Decides provable equality of two terms by comparing normal forms; free
/// variables are allowed. `Unknown` on fuel exhaustion.
pub fn term_eq_norm(s: &Term, t: &Term, fuel: u64) -> EqOutcome {
    let a = normalize(s, fuel);
    let b = normalize(t, fuel);
    if a.status == Status::FuelExhausted || b.status == Status::FuelExhausted {
        return EqOutcome::Unknown;
    }
    if a.result == b.result {
        EqOutcome::Equal
    } else {
        EqOutcome::Distinct
    }
}

// ---------------------------------------------------------------------------
// Arithmetic library
// ---------------------------------------------------------------------------

/// Closed arithmetic terms, all defined from `R` by bracket abstraction.
/// `eq_nat` returns `0` for equal arguments (it is `|x - y|`), and
/// `pair_nat`/`unpair_*` are the Cantor pairing `j(x,y) = (x+y)(x+y+1)/2 + x`
/// with its projections.
#[derive(Debug, Clone)]
pub struct ArithLib {
    pub add: Term,
    pub mul: Term,
    pub pred: Term,
    pub monus: Term,
    pub eq_nat: Term,
    pub half: Term,
    pub pair_nat: Term,
    pub unpair_fst: Term,
    pub unpair_snd: Term,
}

fn lam(name: &str, ty: FiniteType, body: Term) -> Term {
    lambda_abstract_opt(name, ty, &body).expect("arithmetic library construction")
}

fn nvar(name: &str) -> Term {
    Term::var(name, FiniteType::Nat)
}

fn rec_nat() -> Term {
    Term::constant(Comb::Rec, vec![FiniteType::Nat])
}

fn suc(t: Term) -> Term {
    Term::app(Term::constant(Comb::Suc, vec![]), t)
}

/// `cond n a b` is `a` when `n == 0` and `b` otherwise, at any result type.
pub fn cond_term(ty: &FiniteType) -> Term {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<FiniteType, Term>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(ty) {
        return hit.clone();
    }
    let built = build_cond(ty);
    cache.lock().unwrap().entry(ty.clone()).or_insert(built).clone()
}

fn build_cond(ty: &FiniteType) -> Term {
    let branch = lam(
        "m",
        FiniteType::Nat,
        lam("w", ty.clone(), Term::var("b", ty.clone())),
    );
    lam(
        "n",
        FiniteType::Nat,
        lam(
            "a",
            ty.clone(),
            lam(
                "b",
                ty.clone(),
                Term::app3(
                    Term::constant(Comb::Rec, vec![ty.clone()]),
                    Term::var("a", ty.clone()),
                    branch,
                    nvar("n"),
                ),
            ),
        ),
    )
}

fn build_arith() -> ArithLib {
    use crate::syntax::{fst_term, pair_term, snd_term};
    let nat = FiniteType::Nat;
    let nn = FiniteType::prod(nat.clone(), nat.clone());

    // add x y = R x (\m z. S z) y
    let add = lam(
        "x",
        nat.clone(),
        lam(
            "y",
            nat.clone(),
            Term::app3(
                rec_nat(),
                nvar("x"),
                lam("m", nat.clone(), lam("z", nat.clone(), suc(nvar("z")))),
                nvar("y"),
            ),
        ),
    );
    let apply2 = |f: &Term, a: Term, b: Term| Term::app2(f.clone(), a, b);

    // mul x y = R 0 (\m z. add x z) y
    let mul = lam(
        "x",
        nat.clone(),
        lam(
            "y",
            nat.clone(),
            Term::app3(
                rec_nat(),
                Term::numeral(0),
                lam(
                    "m",
                    nat.clone(),
                    lam("z", nat.clone(), apply2(&add, nvar("x"), nvar("z"))),
                ),
                nvar("y"),
            ),
        ),
    );

    // pred x = R 0 (\m z. m) x
    let pred = lam(
        "x",
        nat.clone(),
        Term::app3(
            rec_nat(),
            Term::numeral(0),
            lam("m", nat.clone(), lam("z", nat.clone(), nvar("m"))),
            nvar("x"),
        ),
    );

    // monus x y = R x (\m z. pred z) y
    let monus = lam(
        "x",
        nat.clone(),
        lam(
            "y",
            nat.clone(),
            Term::app3(
                rec_nat(),
                nvar("x"),
                lam(
                    "m",
                    nat.clone(),
                    lam("z", nat.clone(), Term::app(pred.clone(), nvar("z"))),
                ),
                nvar("y"),
            ),
        ),
    );

    // eq_nat x y = (x - y) + (y - x), zero exactly on the diagonal
    let eq_nat = lam(
        "x",
        nat.clone(),
        lam(
            "y",
            nat.clone(),
            apply2(
                &add,
                apply2(&monus, nvar("x"), nvar("y")),
                apply2(&monus, nvar("y"), nvar("x")),
            ),
        ),
    );

    // half n = fst (R (0,0) (\m st. (snd st, S (fst st))) n)
    // The state at m is (half m, half (m+1)).
    let half_state = lam(
        "m",
        nat.clone(),
        lam(
            "st",
            nn.clone(),
            pair_term(
                &nat,
                &nat,
                snd_term(&nat, &nat, Term::var("st", nn.clone())),
                suc(fst_term(&nat, &nat, Term::var("st", nn.clone()))),
            ),
        ),
    );
    let half = lam(
        "n",
        nat.clone(),
        fst_term(
            &nat,
            &nat,
            Term::app3(
                Term::constant(Comb::Rec, vec![nn.clone()]),
                pair_term(&nat, &nat, Term::numeral(0), Term::numeral(0)),
                half_state,
                nvar("n"),
            ),
        ),
    );

    // pair_nat x y = half ((x+y) (x+y+1)) + x
    let sum = apply2(&add, nvar("x"), nvar("y"));
    let pair_nat = lam(
        "x",
        nat.clone(),
        lam(
            "y",
            nat.clone(),
            apply2(
                &add,
                Term::app(half.clone(), apply2(&mul, sum.clone(), suc(sum))),
                nvar("x"),
            ),
        ),
    );

    // Walk the Cantor enumeration: (x, y) steps to (0, x+1) when y = 0 and
    // to (x+1, y-1) otherwise; n steps from (0,0) land on unpair(n).
    let p = Term::var("p", nn.clone());
    let walk_step = lam(
        "p",
        nn.clone(),
        Term::app3(
            cond_term(&nn),
            snd_term(&nat, &nat, p.clone()),
            pair_term(
                &nat,
                &nat,
                Term::numeral(0),
                suc(fst_term(&nat, &nat, p.clone())),
            ),
            pair_term(
                &nat,
                &nat,
                suc(fst_term(&nat, &nat, p.clone())),
                Term::app(pred.clone(), snd_term(&nat, &nat, p)),
            ),
        ),
    );
    let unpair = lam(
        "n",
        nat.clone(),
        Term::app3(
            Term::constant(Comb::Rec, vec![nn.clone()]),
            pair_term(&nat, &nat, Term::numeral(0), Term::numeral(0)),
            lam(
                "m",
                nat.clone(),
                lam("z", nn.clone(), Term::app(walk_step.clone(), Term::var("z", nn.clone()))),
            ),
            nvar("n"),
        ),
    );
    let unpair_fst = lam(
        "n",
        nat.clone(),
        fst_term(&nat, &nat, Term::app(unpair.clone(), nvar("n"))),
    );
    let unpair_snd = lam(
        "n",
        nat.clone(),
        snd_term(&nat, &nat, Term::app(unpair, nvar("n"))),
    );

    ArithLib {
        add,
        mul,
        pred,
        monus,
        eq_nat,
        half,
        pair_nat,
        unpair_fst,
        unpair_snd,
    }
}

pub fn arith_library() -> &'static ArithLib {
    static LIB: OnceLock<ArithLib> = OnceLock::new();
    LIB.get_or_init(build_arith)
}

/// Closed term of type `sigma` usable as a dummy potential realizer.
pub fn dummy(ty: &FiniteType) -> Term {
    zero_term(ty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::{infer_type, Context};
    use FiniteType as FT;

    fn nat() -> FT {
        FT::Nat
    }

    fn nvarn(s: &str) -> Term {
        Term::var(s, nat())
    }

    #[test]
    fn step_contracts_leftmost_outermost() {
        // K 0 (SUC 0) ~> 0
        let t = Term::app2(
            Term::constant(Comb::K, vec![nat(), nat()]),
            Term::numeral(0),
            Term::numeral(1),
        );
        assert_eq!(step(&t), Some(Term::numeral(0)));

        // REC x y 0 ~> x
        let t = Term::app3(rec_nat(), nvarn("x"), Term::var("y", FT::arrow(nat(), FT::arrow(nat(), nat()))), Term::numeral(0));
        assert_eq!(step(&t), Some(nvarn("x")));

        assert_eq!(step(&nvarn("x")), None);
    }

    #[test]
    fn normalize_examples() {
        // S K K 5 ~>* 5
        let nn = FT::arrow(nat(), nat());
        let skk = Term::app2(
            Term::constant(Comb::S, vec![nat(), nn.clone(), nat()]),
            Term::constant(Comb::K, vec![nat(), nn]),
            Term::constant(Comb::K, vec![nat(), nat()]),
        );
        let out = normalize(&Term::app(skk, Term::numeral(5)), DEFAULT_FUEL);
        assert_eq!(out.status, Status::NormalForm);
        assert_eq!(out.result, Term::numeral(5));

        // REC 0 (\m z. SUC z) 3 ~>* 3
        let f = lam("m", nat(), lam("z", nat(), suc(nvarn("z"))));
        let t = Term::app3(rec_nat(), Term::numeral(0), f, Term::numeral(3));
        assert_eq!(eval_nat(&t, DEFAULT_FUEL).unwrap(), 3);

        let out = normalize(&nvarn("x"), DEFAULT_FUEL);
        assert_eq!(out.steps, 0);
        assert_eq!(out.result, nvarn("x"));
    }

    #[test]
    fn eval_nat_examples() {
        assert_eq!(eval_nat(&Term::numeral(2), DEFAULT_FUEL).unwrap(), 2);

        let lib = arith_library();
        let t = Term::app2(lib.add.clone(), Term::numeral(2), Term::numeral(3));
        assert_eq!(eval_nat(&t, DEFAULT_FUEL).unwrap(), 5);

        // FST (PAIR 7 1) = 7
        let t = crate::syntax::fst_term(
            &nat(),
            &nat(),
            crate::syntax::pair_term(&nat(), &nat(), Term::numeral(7), Term::numeral(1)),
        );
        assert_eq!(eval_nat(&t, DEFAULT_FUEL).unwrap(), 7);

        // a non-numeral normal form is reported, not silently accepted
        let stuck = Term::app(
            Term::constant(Comb::Fst, vec![nat(), nat()]),
            Term::var("p", FT::prod(nat(), nat())),
        );
        assert!(matches!(
            eval_nat(&stuck, DEFAULT_FUEL),
            Err(RewriteError::NotNumeral(_))
        ));
    }

    #[test]
    fn fuel_exhaustion_is_reported() {
        let lib = arith_library();
        let t = Term::app2(lib.mul.clone(), Term::numeral(40), Term::numeral(40));
        assert!(matches!(eval_nat(&t, 10), Err(RewriteError::FuelExhausted(_))));
        let out = normalize(&t, 10);
        assert_eq!(out.status, Status::FuelExhausted);
    }

    #[test]
    fn term_eq_norm_examples() {
        let x = nvarn("x");
        let y = nvarn("y");
        let kxy = Term::app2(Term::constant(Comb::K, vec![nat(), nat()]), x.clone(), y.clone());
        assert_eq!(term_eq_norm(&kxy, &x, DEFAULT_FUEL), EqOutcome::Equal);
        assert_eq!(term_eq_norm(&x, &y, DEFAULT_FUEL), EqOutcome::Distinct);

        // s x y z == x z (y z) with fresh variables
        let xf = Term::var("x", FT::arrow(nat(), FT::arrow(nat(), nat())));
        let yf = Term::var("y", FT::arrow(nat(), nat()));
        let z = nvarn("z");
        let sxyz = Term::app3(
            Term::constant(Comb::S, vec![nat(), nat(), nat()]),
            xf.clone(),
            yf.clone(),
            z.clone(),
        );
        let rhs = Term::app(Term::app(xf, z.clone()), Term::app(yf, z));
        assert_eq!(term_eq_norm(&sxyz, &rhs, DEFAULT_FUEL), EqOutcome::Equal);
    }

    #[test]
    fn arith_library_types_and_values() {
        let lib = arith_library();
        let ctx = Context::new();
        let n2 = FT::arrow(nat(), FT::arrow(nat(), nat()));
        let n1 = FT::arrow(nat(), nat());
        for (t, ty) in [
            (&lib.add, &n2),
            (&lib.mul, &n2),
            (&lib.monus, &n2),
            (&lib.eq_nat, &n2),
            (&lib.pair_nat, &n2),
            (&lib.pred, &n1),
            (&lib.half, &n1),
            (&lib.unpair_fst, &n1),
            (&lib.unpair_snd, &n1),
        ] {
            assert_eq!(crate::typing::type_of(t, &ctx).unwrap(), ty.clone());
        }

        let ev2 = |f: &Term, a: u64, b: u64| {
            eval_nat(&Term::app2(f.clone(), Term::numeral(a), Term::numeral(b)), DEFAULT_FUEL)
                .unwrap()
        };
        assert_eq!(ev2(&lib.eq_nat, 4, 4), 0);
        assert_eq!(ev2(&lib.eq_nat, 4, 5), 1);
        assert_eq!(ev2(&lib.monus, 3, 5), 0);
        assert_eq!(ev2(&lib.mul, 6, 7), 42);
        for n in 0..=10 {
            let h = eval_nat(&Term::app(lib.half.clone(), Term::numeral(n)), DEFAULT_FUEL).unwrap();
            assert_eq!(h, n / 2);
        }

        // Cantor pairing round-trip on a few points (exhaustive range is in
        // the acceptance suite)
        for (x, y) in [(0, 0), (3, 5), (7, 2), (1, 9)] {
            let j = ev2(&lib.pair_nat, x, y);
            let native = (x + y) * (x + y + 1) / 2 + x;
            assert_eq!(j, native);
            let fx =
                eval_nat(&Term::app(lib.unpair_fst.clone(), Term::numeral(j)), DEFAULT_FUEL)
                    .unwrap();
            let fy =
                eval_nat(&Term::app(lib.unpair_snd.clone(), Term::numeral(j)), DEFAULT_FUEL)
                    .unwrap();
            assert_eq!((fx, fy), (x, y));
        }
    }

    #[test]
    fn cond_selects_by_zero_test() {
        let c = cond_term(&nat());
        assert_eq!(infer_type(&c).unwrap().to_string(), "N -> N -> N -> N");
        let ev = |n: u64| {
            eval_nat(
                &Term::app3(c.clone(), Term::numeral(n), Term::numeral(7), Term::numeral(9)),
                DEFAULT_FUEL,
            )
            .unwrap()
        };
        assert_eq!(ev(0), 7);
        assert_eq!(ev(1), 9);
        assert_eq!(ev(5), 9);
    }
}
