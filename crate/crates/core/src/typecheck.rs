//! Rule-level typing: inference of a typing environment from each rule's
//! left-hand side, the plain function-passing check on that environment,
//! and the right-hand-side typability check in which calls to defined
//! symbols are only admitted through dependency pairs (at the rule's own
//! level) or strictly below the head symbol in the precedence.

use crate::deppairs::DependencyPair;
use crate::rewrite::{joinable, normalize, substitute, Joinability, NormalizeOutcome, Substitution};
use crate::signature::{Precedence, Rule, Signature};
use crate::syntax::{alpha_eq, free_vars, print_term, spine, Pos, Sort, Term};
use std::collections::HashMap;

pub type Environment = Vec<(String, Term)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InferError {
    #[error("the left-hand side applies {symbol} to {args} arguments but its arity is {arity}")]
    ArityOverflow { symbol: String, args: usize, arity: usize },
    #[error("non-algebraic pattern subterm {detail}")]
    NonAlgebraic { detail: String },
    #[error("conflicting constraints: cannot identify {left} with {right}")]
    Mismatch { left: String, right: String },
    #[error("variable {var} would occur in its own solution")]
    OccursCheck { var: String },
}

/// The typing data inferred from a rule's left-hand side: an ordered
/// environment for the pattern variables, the substitution from telescope
/// binders to arguments, the type the right-hand side must inhabit, and
/// the rule's sides with solved variables substituted out.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleEnv {
    pub delta: Environment,
    pub pi: Substitution,
    pub expected_type: Term,
    pub rhs: Term,
    pub lhs_args: Vec<Term>,
}

/// Walks the left-hand side against the head symbol's telescope,
/// accumulating variable types and solving constraints between repeated
/// or computed positions by first-order unification.
struct Walker<'a> {
    sig: &'a Signature,
    delta: Environment,
    solution: Substitution,
    fresh: usize,
}

pub fn infer_rule_environment(rule: &Rule, sig: &Signature) -> Result<RuleEnv, InferError> {
    let info = sig.get(&rule.head).expect("rule head is declared");
    if rule.args.len() > info.arity {
        return Err(InferError::ArityOverflow {
            symbol: rule.head.clone(),
            args: rule.args.len(),
            arity: info.arity,
        });
    }
    let mut w = Walker { sig, delta: Vec::new(), solution: Substitution::new(), fresh: 0 };
    let mut inst = Substitution::new();
    for (i, arg) in rule.args.iter().enumerate() {
        let (binder, dom) = &info.telescope[i];
        let expected = w.resolve(&substitute(dom, &inst));
        w.walk_pattern(arg, &expected)?;
        if !binder.is_empty() {
            inst.insert(binder.clone(), arg.clone());
        }
    }
    let delta =
        w.delta.clone().into_iter().map(|(n, t)| (n, w.resolve(&t))).collect::<Environment>();
    let pi: Substitution = inst.into_iter().map(|(k, v)| (k, w.resolve(&v))).collect();
    let expected_type = w.resolve(&sig.instantiated_codomain(&rule.head, &rule.args));
    let rhs = w.resolve(&rule.rhs);
    let lhs_args: Vec<Term> = rule.args.iter().map(|a| w.resolve(a)).collect();
    Ok(RuleEnv { delta, pi, expected_type, rhs, lhs_args })
}

impl<'a> Walker<'a> {
    fn show(&self, t: &Term) -> String {
        print_term(t, &self.sig.infix)
    }

    fn resolve(&self, t: &Term) -> Term {
        match t {
            Term::Sort(_) | Term::Sym(_) => t.clone(),
            Term::Var(x) => match self.solution.get(x) {
                Some(s) => self.resolve(s),
                None => t.clone(),
            },
            Term::App(f, a) => Term::app(self.resolve(f), self.resolve(a)),
            Term::Prod(x, a, b) => Term::prod(x.clone(), self.resolve(a), self.resolve(b)),
            Term::Abs(x, a, b) => Term::abs(x.clone(), self.resolve(a), self.resolve(b)),
        }
    }

    fn walk_pattern(&mut self, p: &Term, expected: &Term) -> Result<(), InferError> {
        let p = self.resolve(p);
        let expected = self.resolve(expected);
        match &p {
            Term::Var(x) => {
                if let Some(i) = self.delta.iter().position(|(n, _)| n == x) {
                    let known = self.delta[i].1.clone();
                    self.unify(&known, &expected)
                } else {
                    self.delta.push((x.clone(), expected));
                    Ok(())
                }
            }
            _ => match spine(&p) {
                (Term::Sym(g), args) => {
                    let info = self.sig.get(g).expect("pattern symbols are declared");
                    if args.len() > info.arity {
                        return Err(InferError::ArityOverflow {
                            symbol: g.clone(),
                            args: args.len(),
                            arity: info.arity,
                        });
                    }
                    let mut inst = Substitution::new();
                    for (j, arg) in args.iter().enumerate() {
                        let (binder, dom) = &info.telescope[j];
                        let dom = self.resolve(&substitute(dom, &inst));
                        self.walk_pattern(arg, &dom)?;
                        if !binder.is_empty() {
                            inst.insert(binder.clone(), (*arg).clone());
                        }
                    }
                    let owned: Vec<Term> = args.into_iter().cloned().collect();
                    let result = self.resolve(&self.sig.instantiated_codomain(g, &owned));
                    self.unify(&result, &expected)
                }
                _ => Err(InferError::NonAlgebraic { detail: self.show(&p) }),
            },
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> Result<(), InferError> {
        let a = self.resolve(a);
        let b = self.resolve(b);
        if alpha_eq(&a, &b) {
            return Ok(());
        }
        let mismatch = |w: &Walker| InferError::Mismatch { left: w.show(&a), right: w.show(&b) };
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) => self.bind_vars(x.clone(), y.clone()),
            (Term::Var(x), _) => self.bind(x.clone(), &b),
            (_, Term::Var(y)) => self.bind(y.clone(), &a),
            (Term::App(..), Term::App(..)) => {
                let (ha, aa) = spine(&a);
                let (hb, ab) = spine(&b);
                let heads_match = match (ha, hb) {
                    (Term::Sym(f), Term::Sym(g)) => f == g,
                    (Term::Var(v), Term::Var(w)) => v == w,
                    _ => false,
                };
                if !heads_match || aa.len() != ab.len() {
                    return Err(mismatch(self));
                }
                let pairs: Vec<(Term, Term)> =
                    aa.into_iter().cloned().zip(ab.into_iter().cloned()).collect();
                for (x, y) in pairs {
                    self.unify(&x, &y)?;
                }
                Ok(())
            }
            (Term::Prod(x, a1, b1), Term::Prod(y, a2, b2))
            | (Term::Abs(x, a1, b1), Term::Abs(y, a2, b2)) => {
                self.unify(a1, a2)?;
                let fresh = format!("#{}", self.fresh);
                self.fresh += 1;
                let mut lsub = Substitution::new();
                if !x.is_empty() {
                    lsub.insert(x.clone(), Term::Var(fresh.clone()));
                }
                let mut rsub = Substitution::new();
                if !y.is_empty() {
                    rsub.insert(y.clone(), Term::Var(fresh.clone()));
                }
                self.unify(&substitute(b1, &lsub), &substitute(b2, &rsub))
            }
            _ => Err(mismatch(self)),
        }
    }

    /// Identifies two pattern variables. The survivor is the more
    /// informative name: named variables beat generated wildcards, and on
    /// a tie the variable seen first keeps its slot in the environment.
    fn bind_vars(&mut self, x: String, y: String) -> Result<(), InferError> {
        let rank = |n: &str| usize::from(!n.starts_with('_'));
        let pos = |w: &Walker, n: &str| w.delta.iter().position(|(d, _)| d == n);
        let (survivor, loser) = match rank(&x).cmp(&rank(&y)) {
            std::cmp::Ordering::Greater => (x, y),
            std::cmp::Ordering::Less => (y, x),
            std::cmp::Ordering::Equal => match (pos(self, &x), pos(self, &y)) {
                (Some(i), Some(j)) if j < i => (y, x),
                (None, Some(_)) => (y, x),
                _ => (x, y),
            },
        };
        self.solution.insert(loser.clone(), Term::Var(survivor.clone()));
        match (pos(self, &loser), pos(self, &survivor)) {
            (Some(li), Some(si)) => {
                let lty = self.delta[li].1.clone();
                let sty = self.delta[si].1.clone();
                let keep = li.min(si);
                self.delta.remove(li.max(si));
                self.delta[keep] = (survivor, sty.clone());
                self.unify(&lty, &sty)
            }
            (Some(li), None) => {
                self.delta[li].0 = survivor;
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn bind(&mut self, x: String, t: &Term) -> Result<(), InferError> {
        let resolved = self.resolve(t);
        if free_vars(&resolved).contains(&x) {
            return Err(InferError::OccursCheck { var: x });
        }
        if free_vars(&resolved).iter().any(|v| v.starts_with('#')) {
            return Err(InferError::Mismatch {
                left: x,
                right: format!("{} (a bound variable would escape)", self.show(&resolved)),
            });
        }
        self.solution.insert(x.clone(), resolved.clone());
        if let Some(i) = self.delta.iter().position(|(n, _)| n == &x) {
            let xty = self.delta.remove(i).1;
            if let Some(ty) = self.pattern_type(&resolved)? {
                self.unify(&ty, &xty)?;
            }
        }
        Ok(())
    }

    /// Best-effort type of a pattern subterm, for consistency when a
    /// variable with a recorded type gets solved to a structured term.
    fn pattern_type(&mut self, t: &Term) -> Result<Option<Term>, InferError> {
        match t {
            Term::Var(y) => {
                Ok(self.delta.iter().find(|(n, _)| n == y).map(|(_, ty)| ty.clone()))
            }
            Term::Sort(Sort::Type) => Ok(Some(Term::Sort(Sort::Kind))),
            _ => match spine(t) {
                (Term::Sym(g), args) => {
                    let info = self.sig.get(g).expect("pattern symbols are declared");
                    if args.len() > info.arity {
                        return Err(InferError::ArityOverflow {
                            symbol: g.clone(),
                            args: args.len(),
                            arity: info.arity,
                        });
                    }
                    let owned: Vec<Term> = args.into_iter().cloned().collect();
                    Ok(Some(self.resolve(&self.sig.instantiated_codomain(g, &owned))))
                }
                _ => Ok(None),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfpFailure {
    pub var: String,
    pub ty: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfpOutcome {
    pub pass: bool,
    pub failures: Vec<PfpFailure>,
}

/// The plain function-passing condition on one rule: every variable of the
/// inferred environment must either be a direct argument of the left-hand
/// side at its telescope type, or have a fully applied symbol spine as its
/// type.
pub fn check_pfp(env: &RuleEnv, rule: &Rule, sig: &Signature) -> PfpOutcome {
    let info = sig.get(&rule.head).expect("rule head is declared");
    let mut failures = Vec::new();
    for (y, ty) in &env.delta {
        let direct = env.lhs_args.iter().enumerate().any(|(i, l)| {
            l == &Term::Var(y.clone())
                && info
                    .telescope
                    .get(i)
                    .is_some_and(|(_, dom)| alpha_eq(ty, &substitute(dom, &env.pi)))
        });
        if direct {
            continue;
        }
        let (head, args) = spine(ty);
        let fully_applied = match head {
            Term::Sym(d) => sig.get(d).is_some_and(|s| s.arity == args.len()),
            _ => false,
        };
        if fully_applied {
            continue;
        }
        let reason = match ty {
            Term::Prod(..) => "its type is a function type and the variable is not itself a direct argument of the left-hand side".to_string(),
            _ => "its type is not a fully applied symbol and the variable is not a direct argument of the left-hand side".to_string(),
        };
        failures.push(PfpFailure {
            var: y.clone(),
            ty: print_term(ty, &sig.infix),
            reason,
        });
    }
    PfpOutcome { pass: failures.is_empty(), failures }
}

/// Outcome of a per-rule check that can be undecided by fuel.
#[derive(Debug, Clone, PartialEq)]
pub enum Tri {
    Pass,
    Fail(String),
    Unknown(String),
}

#[derive(Debug, Clone)]
enum Stop {
    Fail(String),
    Unknown(String),
}

impl From<Stop> for Tri {
    fn from(s: Stop) -> Tri {
        match s {
            Stop::Fail(m) => Tri::Fail(m),
            Stop::Unknown(m) => Tri::Unknown(m),
        }
    }
}

/// Checks that each rule's right-hand side, typed in its inferred
/// environment, inhabits the instantiated codomain of its head symbol.
/// Defined symbols are admitted only through the rule's own dependency
/// pairs; every other premise (environment types, binder annotations,
/// conversion endpoints, declared types of called symbols) must be typable
/// strictly below the head symbol, where a defined symbol is admitted only
/// when the precedence puts it below, and undefined symbols freely.
pub fn check_condition_d(
    sig: &Signature,
    rules: &[Rule],
    prec: &Precedence,
    dps: &[DependencyPair],
    envs: &[Result<RuleEnv, InferError>],
    fuel: u64,
) -> Vec<Tri> {
    let mut dp_at: HashMap<(usize, Pos), usize> = HashMap::new();
    for (i, dp) in dps.iter().enumerate() {
        dp_at.insert((dp.rule, dp.position.clone()), i);
    }
    let mut checker = Checker { sig, rules, prec, fuel, dp_at, theta_memo: HashMap::new() };
    rules
        .iter()
        .zip(envs)
        .map(|(rule, env)| match env {
            Err(e) => Tri::Fail(format!("environment inference failed: {e}")),
            Ok(env) => checker.check_rule(rule, env),
        })
        .collect()
}

struct Checker<'a> {
    sig: &'a Signature,
    rules: &'a [Rule],
    prec: &'a Precedence,
    fuel: u64,
    dp_at: HashMap<(usize, Pos), usize>,
    theta_memo: HashMap<(String, String), Result<(), StopKind>>,
}

/// Cheap clonable mirror of Stop for the memo table.
#[derive(Debug, Clone)]
enum StopKind {
    Fail(String),
    Unknown(String),
}

impl From<StopKind> for Stop {
    fn from(s: StopKind) -> Stop {
        match s {
            StopKind::Fail(m) => Stop::Fail(m),
            StopKind::Unknown(m) => Stop::Unknown(m),
        }
    }
}

impl From<&Stop> for StopKind {
    fn from(s: &Stop) -> StopKind {
        match s {
            Stop::Fail(m) => StopKind::Fail(m.clone()),
            Stop::Unknown(m) => StopKind::Unknown(m.clone()),
        }
    }
}

fn arg_pos(base: &[usize], count: usize, j: usize) -> Pos {
    let mut p = base.to_vec();
    p.extend(std::iter::repeat(0).take(count - 1 - j));
    p.push(1);
    p
}

impl<'a> Checker<'a> {
    fn show(&self, t: &Term) -> String {
        print_term(t, &self.sig.infix)
    }

    fn check_rule(&mut self, rule: &Rule, env: &RuleEnv) -> Tri {
        let f = rule.head.clone();
        let mut ctx: Environment = Vec::new();
        for (y, ty) in &env.delta {
            if let Err(stop) = self.below_sort(&f, &mut ctx, ty) {
                return match stop {
                    Stop::Fail(m) => Tri::Fail(format!("environment entry {y}: {m}")),
                    Stop::Unknown(m) => Tri::Unknown(format!("environment entry {y}: {m}")),
                };
            }
            ctx.push((y.clone(), ty.clone()));
        }
        let inferred = match self.infer_full(&f, rule.index, &mut ctx, &env.rhs, &mut Vec::new()) {
            Ok(t) => t,
            Err(stop) => return stop.into(),
        };
        match self.convert_full(&f, &mut ctx, &inferred, &env.expected_type) {
            Ok(()) => Tri::Pass,
            Err(stop) => stop.into(),
        }
    }

    fn lookup(env: &Environment, x: &str) -> Option<Term> {
        env.iter().rev().find(|(n, _)| n == x).map(|(_, t)| t.clone())
    }

    fn infer_full(
        &mut self,
        f: &str,
        rule_idx: usize,
        env: &mut Environment,
        t: &Term,
        pos: &mut Pos,
    ) -> Result<Term, Stop> {
        match t {
            Term::Sort(Sort::Type) => Ok(Term::Sort(Sort::Kind)),
            Term::Sort(Sort::Kind) => Err(Stop::Fail("KIND has no type".into())),
            Term::Var(x) => Self::lookup(env, x)
                .ok_or_else(|| Stop::Fail(format!("unbound variable {x}"))),
            Term::Sym(_) | Term::App(..) => self.infer_spine_full(f, rule_idx, env, t, pos),
            Term::Abs(x, a, b) => {
                env.push((x.clone(), (**a).clone()));
                pos.push(1);
                let body_ty = self.infer_full(f, rule_idx, env, b, pos);
                pos.pop();
                env.pop();
                let prod = Term::prod(x.clone(), (**a).clone(), body_ty?);
                self.below_sort(f, env, &prod)?;
                Ok(prod)
            }
            Term::Prod(x, a, b) => {
                pos.push(0);
                let dom_sort = self.infer_full(f, rule_idx, env, a, pos);
                pos.pop();
                if dom_sort? != Term::Sort(Sort::Type) {
                    return Err(Stop::Fail(format!(
                        "the domain of {} is not a type",
                        self.show(t)
                    )));
                }
                env.push((x.clone(), (**a).clone()));
                pos.push(1);
                let cod_sort = self.infer_full(f, rule_idx, env, b, pos);
                pos.pop();
                env.pop();
                match cod_sort? {
                    s @ Term::Sort(_) => Ok(s),
                    _ => Err(Stop::Fail(format!(
                        "the codomain of {} is not a type",
                        self.show(t)
                    ))),
                }
            }
        }
    }

    fn infer_spine_full(
        &mut self,
        f: &str,
        rule_idx: usize,
        env: &mut Environment,
        t: &Term,
        pos: &mut Pos,
    ) -> Result<Term, Stop> {
        let (head, args) = spine(t);
        let args: Vec<Term> = args.into_iter().cloned().collect();
        let q = args.len();
        match head {
            Term::Sym(g) if self.sig.defined(g) => {
                let g = g.clone();
                if !self.dp_at.contains_key(&(rule_idx, pos.clone())) {
                    return Err(Stop::Fail(format!(
                        "the call to {g} is not covered by a dependency pair"
                    )));
                }
                self.theta_sort_below(f, &g)?;
                let info = self.sig.get(&g).unwrap();
                if q > info.arity {
                    return Err(Stop::Fail(format!(
                        "{g} is applied to {q} arguments but its arity is {}",
                        info.arity
                    )));
                }
                let telescope = info.telescope.clone();
                let mut inst = Substitution::new();
                for (j, arg) in args.iter().enumerate() {
                    let (binder, dom) = &telescope[j];
                    let expected = substitute(dom, &inst);
                    let mut apos = arg_pos(pos, q, j);
                    let found = self.infer_full(f, rule_idx, env, arg, &mut apos)?;
                    self.convert_full(f, env, &found, &expected)?;
                    if !binder.is_empty() {
                        inst.insert(binder.clone(), arg.clone());
                    }
                }
                Ok(self.sig.instantiated_codomain(&g, &args))
            }
            Term::Sym(g) => {
                let g = g.clone();
                self.theta_sort_below(f, &g)?;
                let theta = self.sig.get(&g).unwrap().theta.clone();
                self.apply_full(f, rule_idx, env, theta, &args, pos, true)
            }
            Term::Var(_) | Term::Abs(..) => {
                let head = head.clone();
                let mut hpos = pos.clone();
                hpos.extend(std::iter::repeat(0).take(q));
                let head_ty = self.infer_full(f, rule_idx, env, &head, &mut hpos)?;
                self.apply_full(f, rule_idx, env, head_ty, &args, pos, false)
            }
            _ => Err(Stop::Fail(format!("ill-formed application {}", self.show(t)))),
        }
    }

    /// Types an application one argument at a time, exposing products by
    /// normalization when needed. Each application step requires the
    /// product type itself to be well-sorted below `f`, except the first
    /// when the head's declared type was already checked.
    fn apply_full(
        &mut self,
        f: &str,
        rule_idx: usize,
        env: &mut Environment,
        mut ty: Term,
        args: &[Term],
        base_pos: &Pos,
        first_covered: bool,
    ) -> Result<Term, Stop> {
        let q = args.len();
        for (j, arg) in args.iter().enumerate() {
            ty = self.expose_product(ty)?;
            if !(j == 0 && first_covered) {
                self.below_sort(f, env, &ty)?;
            }
            let Term::Prod(x, dom, cod) = ty else { unreachable!() };
            let mut apos = arg_pos(base_pos, q, j);
            let found = self.infer_full(f, rule_idx, env, arg, &mut apos)?;
            self.convert_full(f, env, &found, &dom)?;
            let mut sub = Substitution::new();
            if !x.is_empty() {
                sub.insert(x, arg.clone());
            }
            ty = substitute(&cod, &sub);
        }
        Ok(ty)
    }

    fn expose_product(&mut self, ty: Term) -> Result<Term, Stop> {
        if matches!(ty, Term::Prod(..)) {
            return Ok(ty);
        }
        let (n, outcome) = normalize(&ty, self.rules, self.fuel);
        if matches!(n, Term::Prod(..)) {
            Ok(n)
        } else if outcome == NormalizeOutcome::FuelExhausted {
            Err(Stop::Unknown(format!(
                "could not expose a product type in {} (fuel exhausted)",
                self.show(&n)
            )))
        } else {
            Err(Stop::Fail(format!("cannot apply a term of type {}", self.show(&n))))
        }
    }

    fn infer_below(&mut self, f: &str, env: &mut Environment, t: &Term) -> Result<Term, Stop> {
        match t {
            Term::Sort(Sort::Type) => Ok(Term::Sort(Sort::Kind)),
            Term::Sort(Sort::Kind) => Err(Stop::Fail("KIND has no type".into())),
            Term::Var(x) => Self::lookup(env, x)
                .ok_or_else(|| Stop::Fail(format!("unbound variable {x}"))),
            Term::Sym(_) | Term::App(..) => {
                let (head, args) = spine(t);
                let args: Vec<Term> = args.into_iter().cloned().collect();
                match head {
                    Term::Sym(g) => {
                        let g = g.clone();
                        if self.sig.defined(&g) && !self.prec.strictly_less(&g, f) {
                            return Err(Stop::Fail(format!(
                                "defined symbol {g} is not below {f} in the precedence"
                            )));
                        }
                        self.theta_sort_below(f, &g)?;
                        let theta = self.sig.get(&g).unwrap().theta.clone();
                        self.apply_below(f, env, theta, &args)
                    }
                    Term::Var(_) | Term::Abs(..) => {
                        let head = head.clone();
                        let head_ty = self.infer_below(f, env, &head)?;
                        self.apply_below(f, env, head_ty, &args)
                    }
                    _ => Err(Stop::Fail(format!("ill-formed application {}", self.show(t)))),
                }
            }
            Term::Abs(x, a, b) => {
                env.push((x.clone(), (**a).clone()));
                let body_ty = self.infer_below(f, env, b);
                env.pop();
                let prod = Term::prod(x.clone(), (**a).clone(), body_ty?);
                self.below_sort(f, env, &prod)?;
                Ok(prod)
            }
            Term::Prod(x, a, b) => {
                if self.infer_below(f, env, a)? != Term::Sort(Sort::Type) {
                    return Err(Stop::Fail(format!(
                        "the domain of {} is not a type",
                        self.show(t)
                    )));
                }
                env.push((x.clone(), (**a).clone()));
                let cod_sort = self.infer_below(f, env, b);
                env.pop();
                match cod_sort? {
                    s @ Term::Sort(_) => Ok(s),
                    _ => Err(Stop::Fail(format!(
                        "the codomain of {} is not a type",
                        self.show(t)
                    ))),
                }
            }
        }
    }

    fn apply_below(
        &mut self,
        f: &str,
        env: &mut Environment,
        mut ty: Term,
        args: &[Term],
    ) -> Result<Term, Stop> {
        for arg in args {
            ty = self.expose_product(ty)?;
            let Term::Prod(x, dom, cod) = ty else { unreachable!() };
            let found = self.infer_below(f, env, arg)?;
            self.convert_below(&found, &dom)?;
            let mut sub = Substitution::new();
            if !x.is_empty() {
                sub.insert(x, arg.clone());
            }
            ty = substitute(&cod, &sub);
        }
        Ok(ty)
    }

    fn below_sort(&mut self, f: &str, env: &mut Environment, ty: &Term) -> Result<(), Stop> {
        match self.infer_below(f, env, ty)? {
            Term::Sort(_) => Ok(()),
            other => Err(Stop::Fail(format!(
                "{} is not a well-sorted type (its type is {})",
                self.show(ty),
                self.show(&other)
            ))),
        }
    }

    /// The declared type of `g` must be well-sorted in the system below
    /// `f`. Memoized per (f, g): the same premise recurs for every use of
    /// a symbol.
    fn theta_sort_below(&mut self, f: &str, g: &str) -> Result<(), Stop> {
        let key = (f.to_string(), g.to_string());
        if let Some(r) = self.theta_memo.get(&key) {
            return r.clone().map_err(Stop::from);
        }
        let theta = self.sig.get(g).unwrap().theta.clone();
        let mut empty = Environment::new();
        let r = self.below_sort(f, &mut empty, &theta);
        self.theta_memo.insert(key, r.as_ref().map(|_| ()).map_err(StopKind::from));
        r
    }

    fn convert_full(
        &mut self,
        f: &str,
        env: &mut Environment,
        found: &Term,
        expected: &Term,
    ) -> Result<(), Stop> {
        if alpha_eq(found, expected) {
            return Ok(());
        }
        match joinable(found, expected, self.rules, self.fuel) {
            Joinability::Yes => {
                self.below_sort(f, env, found)?;
                self.below_sort(f, env, expected)?;
                Ok(())
            }
            Joinability::No => Err(Stop::Fail(format!(
                "type mismatch: expected {}, found {}",
                self.show(expected),
                self.show(found)
            ))),
            Joinability::Unknown => Err(Stop::Unknown(format!(
                "conversion between {} and {} undecided (fuel exhausted)",
                self.show(found),
                self.show(expected)
            ))),
        }
    }

    fn convert_below(&mut self, found: &Term, expected: &Term) -> Result<(), Stop> {
        if alpha_eq(found, expected) {
            return Ok(());
        }
        match joinable(found, expected, self.rules, self.fuel) {
            Joinability::Yes => Ok(()),
            Joinability::No => Err(Stop::Fail(format!(
                "type mismatch: expected {}, found {}",
                self.show(expected),
                self.show(found)
            ))),
            Joinability::Unknown => Err(Stop::Unknown(format!(
                "conversion between {} and {} undecided (fuel exhausted)",
                self.show(found),
                self.show(expected)
            ))),
        }
    }
}
