//! Folding variant narrowing: breadth-first narrowing from a normalized
//! root, where a new node is folded away whenever it is subsumed by an
//! already-computed variant. The search saturates exactly when the theory
//! has a finite complete variant set for the input; bound exhaustion is
//! reported with the partial set.

use std::collections::BTreeSet;

use crate::axioms::match_many;
use crate::error::EngineResult;
use crate::limits::Session;
use crate::rewrite::{normalize, normalize_subst};
use crate::signature::{Signature, SymbolId};
use crate::subst::{renaming_away, Subst};
use crate::term::{Term, Var};
use crate::theory::Theory;
use crate::unify::b_unify;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    /// Normalized variant pattern.
    pub term: Term,
    /// Normalized substitution with domain inside the source term's
    /// variables and range away from the query's variable set.
    pub subst: Subst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantStatus {
    Complete,
    BoundExceeded,
}

#[derive(Debug, Clone)]
pub struct VariantResult {
    pub status: VariantStatus,
    pub variants: Vec<Variant>,
    pub nodes_explored: usize,
}

/// Is `(a)` more general than `(b)` as variants of a source with variables
/// `source_vars`: some instantiation carries a's pattern and substitution
/// simultaneously onto b's.
pub fn subsumes(sig: &Signature, a: &Variant, b: &Variant, source_vars: &BTreeSet<Var>) -> bool {
    let mut goals = vec![(a.term.clone(), b.term.clone())];
    for x in source_vars {
        let xt = Term::Var(x.clone());
        goals.push((a.subst.apply(sig, &xt), b.subst.apply(sig, &xt)));
    }
    !match_many(sig, &goals).is_empty()
}

/// Complete set of most general variants of `t`, away from `w`, within the
/// session's narrowing bounds.
pub fn folding_variant_narrow(
    theory: &Theory,
    session: &mut Session,
    t: &Term,
    w: &BTreeSet<Var>,
) -> EngineResult<VariantResult> {
    let source_vars = t.vars();
    let root = Variant {
        term: normalize(theory, session, t)?,
        subst: Subst::identity(),
    };
    let mut variants: Vec<Variant> = vec![root.clone()];
    let mut frontier: Vec<Variant> = vec![root];
    let mut nodes = 1usize;
    let mut depth = 0usize;
    let mut exhausted = false;

    'search: while !frontier.is_empty() {
        depth += 1;
        if depth > session.limits.max_narrow_depth {
            exhausted = true;
            break;
        }
        let mut next: Vec<Variant> = Vec::new();
        for node in std::mem::take(&mut frontier) {
            let children = narrow_children(theory, session, &node, &source_vars, w)?;
            for child in children {
                nodes += 1;
                session.stats.nodes += 1;
                if nodes > session.limits.max_narrow_nodes {
                    exhausted = true;
                    frontier = next;
                    break 'search;
                }
                if variants.iter().any(|v| subsumes(&theory.sig, v, &child, &source_vars)) {
                    continue;
                }
                variants.push(child.clone());
                next.push(child);
            }
        }
        frontier = next;
    }

    let status = if exhausted { VariantStatus::BoundExceeded } else { VariantStatus::Complete };
    let variants = minimize_variants(&theory.sig, variants, &source_vars);
    Ok(VariantResult { status, variants, nodes_explored: nodes })
}

/// One-step narrowing: for every non-variable position and every renamed
/// rule, each unifier of the subterm with the rule's left side produces the
/// normalized instance with the rewritten position.
fn narrow_children(
    theory: &Theory,
    session: &mut Session,
    node: &Variant,
    source_vars: &BTreeSet<Var>,
    w: &BTreeSet<Var>,
) -> EngineResult<Vec<Variant>> {
    let u = &node.term;
    let mut out = Vec::new();
    let mut away: BTreeSet<Var> = w.clone();
    away.extend(u.vars());
    away.extend(source_vars.iter().cloned());
    away.extend(node.subst.ran_vars());
    for pos in u.fun_positions() {
        let sub = u.subterm_at(&pos).expect("own position").clone();
        for rule_idx in 0..theory.rules.len() {
            let rule = &theory.rules[rule_idx];
            let mut rule_vars = rule.lhs.vars();
            rule.rhs.collect_vars(&mut rule_vars);
            let avoid_names: BTreeSet<String> = away
                .iter()
                .map(|v| v.name.clone())
                .chain(sub.vars().iter().map(|v| v.name.clone()))
                .collect();
            let ren = renaming_away(session, &rule_vars, &avoid_names);
            let lhs = ren.apply(&theory.sig, &rule.lhs);
            let rhs = ren.apply(&theory.sig, &rule.rhs);
            let mut unify_w = away.clone();
            unify_w.extend(lhs.vars());
            let unifiers = b_unify(&theory.sig, &[(sub.clone(), lhs)], &unify_w, session)?;
            for sigma in unifiers {
                let replaced = theory
                    .sig
                    .replace_at(u, &pos, rhs.clone())
                    .expect("valid position");
                let new_term = normalize(theory, session, &sigma.apply(&theory.sig, &replaced))?;
                let composed = node.subst.compose(&theory.sig, &sigma);
                let restricted = composed.restrict(source_vars);
                let new_subst = normalize_subst(theory, session, &restricted)?;
                out.push(Variant { term: new_term, subst: new_subst });
            }
        }
    }
    Ok(out)
}

/// Drop variants subsumed by another; mutually-subsuming pairs keep the
/// earlier (more shallow) one.
fn minimize_variants(
    sig: &Signature,
    cands: Vec<Variant>,
    source_vars: &BTreeSet<Var>,
) -> Vec<Variant> {
    let n = cands.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        if !keep[i] {
            continue;
        }
        for j in 0..n {
            if i == j || !keep[j] || !keep[i] {
                continue;
            }
            if subsumes(sig, &cands[j], &cands[i], source_vars) {
                if subsumes(sig, &cands[i], &cands[j], source_vars) {
                    if j < i {
                        keep[i] = false;
                    }
                } else {
                    keep[i] = false;
                }
            }
        }
    }
    cands
        .into_iter()
        .zip(keep)
        .filter_map(|(v, k)| k.then_some(v))
        .collect()
}

/// Constructor variants: those whose pattern is a pure constructor term.
pub fn constructor_variants(
    theory: &Theory,
    session: &mut Session,
    t: &Term,
    w: &BTreeSet<Var>,
) -> EngineResult<VariantResult> {
    let mut res = folding_variant_narrow(theory, session, t, w)?;
    res.variants.retain(|v| theory.is_ctor_term(&v.term));
    Ok(res)
}

#[derive(Debug, Clone)]
pub struct SymbolVariantReport {
    pub symbol: SymbolId,
    pub has_rules: bool,
    pub result: VariantResult,
}

#[derive(Debug, Clone)]
pub struct FvpReport {
    pub per_symbol: Vec<SymbolVariantReport>,
    /// Total variant count over rule-bearing symbols; None when any of
    /// them failed to saturate.
    pub complexity: Option<usize>,
}

impl FvpReport {
    pub fn is_fvp(&self) -> bool {
        self.per_symbol
            .iter()
            .all(|r| r.result.status == VariantStatus::Complete)
    }
}

/// FVP check: saturate the variant set of `f(x1,...,xn)` for every user
/// symbol. The variant complexity sums the counts over symbols that carry
/// rewrite rules.
pub fn fvp_check(theory: &Theory, session: &mut Session) -> EngineResult<FvpReport> {
    let mut per_symbol = Vec::new();
    for f in theory.sig.symbol_ids() {
        let d = theory.sig.symbol(f);
        if d.infra {
            continue;
        }
        let args: Vec<Term> = d
            .arg_sorts
            .iter()
            .enumerate()
            .map(|(i, &s)| Term::var(format!("X{}", i + 1), s))
            .collect();
        let term = if args.is_empty() {
            Term::constant(f)
        } else {
            theory.sig.app(f, args)
        };
        let w = term.vars();
        let result = folding_variant_narrow(theory, session, &term, &w)?;
        let has_rules = theory.rules_for(f).next().is_some();
        per_symbol.push(SymbolVariantReport { symbol: f, has_rules, result });
    }
    let complexity = per_symbol
        .iter()
        .filter(|r| r.has_rules)
        .try_fold(0usize, |acc, r| match r.result.status {
            VariantStatus::Complete => Some(acc + r.result.variants.len()),
            VariantStatus::BoundExceeded => None,
        });
    Ok(FvpReport { per_symbol, complexity })
}
