//! Rewriting modulo the structural axioms and normalization to canonical
//! values.
//!
//! Matching at an AC-rooted position uses implicit extension: a rule whose
//! left-hand side is rooted at the same AC symbol may rewrite any
//! sub-multiset of the flattened arguments, with the remainder rebuilt
//! around the instantiated right-hand side. This is equivalent to adding
//! extension rules and keeps rewriting strictly coherent with the axioms.

use crate::axioms::{match_terms, match_with_extension};
use crate::error::{EngineError, EngineResult};
use crate::limits::Session;
use crate::subst::Subst;
use crate::term::{Position, Term};
use crate::theory::Theory;

/// One innermost-leftmost rewrite step, if any rule applies anywhere.
/// Returns the rewritten term, the rule index, and the redex position.
pub fn rewrite_once(theory: &Theory, t: &Term) -> Option<(Term, usize, Position)> {
    if let Term::App(f, args) = t {
        for (i, a) in args.iter().enumerate() {
            if let Some((a2, rule, mut pos)) = rewrite_once(theory, a) {
                let mut new_args = args.clone();
                new_args[i] = a2;
                let mut p = vec![i];
                p.append(&mut pos);
                return Some((theory.sig.app(*f, new_args), rule, p));
            }
        }
    }
    root_rewrite(theory, t).map(|(t2, rule)| (t2, rule, vec![]))
}

/// Apply some rule at the root, with AC extension.
fn root_rewrite(theory: &Theory, t: &Term) -> Option<(Term, usize)> {
    let f = t.top_symbol()?;
    for (idx, rule) in theory.rules.iter().enumerate() {
        let lhs_top = rule.lhs.top_symbol().expect("validated rule");
        if lhs_top != f {
            continue;
        }
        if theory.sig.symbol(f).class.is_ac_like() {
            let pat_args = match &rule.lhs {
                Term::App(_, args) => args.clone(),
                Term::Var(_) => unreachable!("validated rule"),
            };
            let mut matches = match_with_extension(&theory.sig, f, &pat_args, t);
            // exact matches first, for determinism
            matches.sort_by_key(|(_, rest)| rest.len());
            if let Some((subst, rest)) = matches.into_iter().next() {
                let rhs = subst.apply(&theory.sig, &rule.rhs);
                let result = if rest.is_empty() {
                    rhs
                } else {
                    let mut parts = theory.sig.ac_args(f, &rhs);
                    parts.extend(rest);
                    theory.sig.from_ac_args(f, parts)
                };
                return Some((result, idx));
            }
        } else if let Some(subst) = match_terms(&theory.sig, &rule.lhs, t).into_iter().next() {
            return Some((subst.apply(&theory.sig, &rule.rhs), idx));
        }
    }
    None
}

/// Full normalization `t -> t!`. Unique modulo the axioms when the theory
/// is convergent as declared.
pub fn normalize(theory: &Theory, session: &mut Session, t: &Term) -> EngineResult<Term> {
    let mut budget = session.limits.max_rewrite_steps;
    normalize_inner(theory, session, &mut budget, t)
}

fn normalize_inner(
    theory: &Theory,
    session: &mut Session,
    budget: &mut usize,
    t: &Term,
) -> EngineResult<Term> {
    let reduced_children = match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => {
            let mut new_args = Vec::with_capacity(args.len());
            for a in args {
                new_args.push(normalize_inner(theory, session, budget, a)?);
            }
            theory.sig.app(*f, new_args)
        }
    };
    match root_rewrite(theory, &reduced_children) {
        None => Ok(reduced_children),
        Some((t2, _)) => {
            if *budget == 0 {
                return Err(EngineError::StepLimitExceeded {
                    limit: session.limits.max_rewrite_steps,
                    term: theory.sig.term_to_string(t),
                });
            }
            *budget -= 1;
            session.stats.rewrites += 1;
            normalize_inner(theory, session, budget, &t2)
        }
    }
}

/// Pointwise normalization of a substitution.
pub fn normalize_subst(theory: &Theory, session: &mut Session, s: &Subst) -> EngineResult<Subst> {
    let mut out = Subst::identity();
    for (v, t) in s.iter() {
        out.bind(v.clone(), normalize(theory, session, t)?);
    }
    Ok(out)
}

pub fn is_normalized(theory: &Theory, t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(_, args) => {
            args.iter().all(|a| is_normalized(theory, a)) && root_rewrite(theory, t).is_none()
        }
    }
}
