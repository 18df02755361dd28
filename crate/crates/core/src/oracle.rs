//! Brute-force ground semantics of the canonical term algebra, independent
//! of the narrowing-based decision machinery. Used as the testing oracle:
//! it enumerates canonical values by constructor-tree height, evaluates
//! formulas under every ground assignment up to a depth, and materializes
//! ground variants.
//!
//! The oracle never claims unsatisfiability; it only reports that no
//! witness exists up to the explored depth.

use std::collections::BTreeSet;

use crate::error::{EngineError, EngineResult};
use crate::formula::QfFormula;
use crate::limits::Session;
use crate::rewrite::normalize;
use crate::signature::{Role, SortId};
use crate::subst::Subst;
use crate::term::{Term, Var};
use crate::theory::Theory;

/// Canonical ground values discovered so far, with the least constructor
/// tree height that produces each of them.
pub struct GroundEnum {
    /// (normal form, height); no two terms are equal.
    found: Vec<(Term, usize)>,
    rounds_done: usize,
    saturated: bool,
}

impl GroundEnum {
    pub fn new() -> Self {
        GroundEnum { found: Vec::new(), rounds_done: 0, saturated: false }
    }

    pub fn saturated(&self) -> bool {
        self.saturated
    }

    pub fn rounds_done(&self) -> usize {
        self.rounds_done
    }

    pub fn len(&self) -> usize {
        self.found.len()
    }

    pub fn is_empty(&self) -> bool {
        self.found.is_empty()
    }

    fn contains(&self, t: &Term) -> bool {
        self.found.iter().any(|(u, _)| u == t)
    }

    /// Run enumeration rounds until `depth` (constructor tree height before
    /// normalization) is covered or the value count exceeds `value_cap`.
    pub fn grow(
        &mut self,
        theory: &Theory,
        session: &mut Session,
        depth: usize,
        value_cap: usize,
    ) -> EngineResult<()> {
        while self.rounds_done <= depth && !self.saturated && self.found.len() <= value_cap {
            let h = self.rounds_done;
            let mut new_terms: Vec<(Term, usize)> = Vec::new();
            for f in theory.sig.symbol_ids() {
                let d = theory.sig.symbol(f);
                if d.infra || d.role == Role::Defined {
                    continue;
                }
                if h == 0 {
                    if d.arity() == 0 {
                        let nf = normalize(theory, session, &Term::constant(f))?;
                        if !self.contains(&nf) && !new_terms.iter().any(|(u, _)| *u == nf) {
                            new_terms.push((nf, 0));
                        }
                    }
                    continue;
                }
                if d.arity() == 0 {
                    continue;
                }
                // argument tuples from earlier rounds, at least one of
                // height h-1 so each tuple is built exactly once
                let candidates: Vec<Vec<(Term, usize)>> = d
                    .arg_sorts
                    .iter()
                    .map(|&s| {
                        self.found
                            .iter()
                            .filter(|(t, ht)| *ht <= h - 1 && theory.sig.leq(theory.sig.least_sort(t), s))
                            .cloned()
                            .collect()
                    })
                    .collect();
                if candidates.iter().any(|c| c.is_empty()) {
                    continue;
                }
                let mut idx = vec![0usize; d.arity()];
                loop {
                    let tuple: Vec<&(Term, usize)> =
                        idx.iter().zip(&candidates).map(|(&i, c)| &c[i]).collect();
                    if tuple.iter().any(|(_, ht)| *ht == h - 1) {
                        let args: Vec<Term> = tuple.iter().map(|(t, _)| t.clone()).collect();
                        let t = theory.sig.app(f, args);
                        let nf = normalize(theory, session, &t)?;
                        if !self.contains(&nf) && !new_terms.iter().any(|(u, _)| *u == nf) {
                            new_terms.push((nf, h));
                        }
                    }
                    // odometer over candidate indices
                    let mut k = 0;
                    loop {
                        if k == idx.len() {
                            break;
                        }
                        idx[k] += 1;
                        if idx[k] < candidates[k].len() {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == idx.len() {
                        break;
                    }
                }
            }
            if h > 0 && new_terms.is_empty() {
                self.saturated = true;
            }
            self.found.extend(new_terms);
            self.rounds_done += 1;
        }
        Ok(())
    }

    /// Values of the given sort discovered up to `depth`, in a stable order.
    pub fn of_sort(&self, theory: &Theory, sort: SortId, depth: usize) -> Vec<Term> {
        let mut out: Vec<(usize, Term)> = self
            .found
            .iter()
            .filter(|(t, h)| *h <= depth && theory.sig.leq(theory.sig.least_sort(t), sort))
            .map(|(t, h)| (*h, t.clone()))
            .collect();
        out.sort_by(|(ha, a), (hb, b)| ha.cmp(hb).then_with(|| theory.sig.term_cmp(a, b)));
        out.into_iter().map(|(_, t)| t).collect()
    }
}

impl Default for GroundEnum {
    fn default() -> Self {
        GroundEnum::new()
    }
}

/// Distinct canonical values of `sort` reachable by constructor trees of
/// height at most `depth`.
pub fn enumerate_ground_terms(
    theory: &Theory,
    session: &mut Session,
    sort: SortId,
    depth: usize,
) -> EngineResult<Vec<Term>> {
    let mut en = GroundEnum::new();
    en.grow(theory, session, depth, usize::MAX)?;
    Ok(en.of_sort(theory, sort, depth))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Witness(Subst),
    NoWitnessUpToDepth,
}

/// Evaluate a formula in the canonical algebra under a ground assignment.
pub fn eval_ground(
    theory: &Theory,
    session: &mut Session,
    formula: &QfFormula,
    assignment: &Subst,
) -> EngineResult<bool> {
    Ok(match formula {
        QfFormula::Eq(a, b) => {
            let na = normalize(theory, session, &assignment.apply(&theory.sig, a))?;
            let nb = normalize(theory, session, &assignment.apply(&theory.sig, b))?;
            na == nb
        }
        QfFormula::Neq(a, b) => !eval_ground(theory, session, &QfFormula::Eq(a.clone(), b.clone()), assignment)?,
        QfFormula::Not(f) => !eval_ground(theory, session, f, assignment)?,
        QfFormula::And(a, b) => {
            eval_ground(theory, session, a, assignment)? && eval_ground(theory, session, b, assignment)?
        }
        QfFormula::Or(a, b) => {
            eval_ground(theory, session, a, assignment)? || eval_ground(theory, session, b, assignment)?
        }
        QfFormula::Implies(a, b) => {
            !eval_ground(theory, session, a, assignment)? || eval_ground(theory, session, b, assignment)?
        }
        QfFormula::Iff(a, b) => {
            eval_ground(theory, session, a, assignment)? == eval_ground(theory, session, b, assignment)?
        }
    })
}

/// Search for a satisfying ground assignment over values of height at most
/// `depth`. The assignment space is capped; exceeding the cap is an error,
/// never a silent truncation.
pub fn brute_force_sat(
    theory: &Theory,
    session: &mut Session,
    formula: &QfFormula,
    depth: usize,
) -> EngineResult<OracleOutcome> {
    let vars: Vec<Var> = formula.vars().into_iter().collect();
    let mut en = GroundEnum::new();
    en.grow(theory, session, depth, usize::MAX)?;
    let domains: Vec<Vec<Term>> = vars
        .iter()
        .map(|v| en.of_sort(theory, v.sort, depth))
        .collect();
    if domains.iter().any(|d| d.is_empty()) && !vars.is_empty() {
        return Ok(OracleOutcome::NoWitnessUpToDepth);
    }
    let total: usize = domains.iter().map(|d| d.len().max(1)).product();
    if total > session.limits.max_assignments {
        return Err(EngineError::AssignmentCapExceeded { cap: session.limits.max_assignments });
    }
    let mut idx = vec![0usize; vars.len()];
    loop {
        let assignment = Subst::from_pairs(
            vars.iter()
                .enumerate()
                .map(|(k, v)| (v.clone(), domains[k][idx[k]].clone())),
        );
        if eval_ground(theory, session, formula, &assignment)? {
            return Ok(OracleOutcome::Witness(assignment));
        }
        // odometer
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(OracleOutcome::NoWitnessUpToDepth);
            }
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// All ground variant instances `(normalize(t rho), rho)` over assignments
/// of enumerated values to the variables of `t`.
pub fn brute_force_variants(
    theory: &Theory,
    session: &mut Session,
    t: &Term,
    depth: usize,
) -> EngineResult<Vec<(Term, Subst)>> {
    let vars: Vec<Var> = t.vars().into_iter().collect();
    let mut en = GroundEnum::new();
    en.grow(theory, session, depth, usize::MAX)?;
    let domains: Vec<Vec<Term>> = vars
        .iter()
        .map(|v| en.of_sort(theory, v.sort, depth))
        .collect();
    if vars.is_empty() {
        return Ok(vec![(normalize(theory, session, t)?, Subst::identity())]);
    }
    if domains.iter().any(|d| d.is_empty()) {
        return Ok(vec![]);
    }
    let total: usize = domains.iter().map(|d| d.len()).product();
    if total > session.limits.max_assignments {
        return Err(EngineError::AssignmentCapExceeded { cap: session.limits.max_assignments });
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let rho = Subst::from_pairs(
            vars.iter()
                .enumerate()
                .map(|(k, v)| (v.clone(), domains[k][idx[k]].clone())),
        );
        let inst = normalize(theory, session, &rho.apply(&theory.sig, t))?;
        out.push((inst, rho));
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Check that no two enumerated values of any sort are equal; enumeration
/// distinctness is an invariant the rest of the oracle relies on.
pub fn enumeration_distinct(theory: &Theory, terms: &[Term]) -> bool {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for t in terms {
        if !seen.insert(theory.sig.term_to_string_typed(t)) {
            return false;
        }
    }
    true
}
