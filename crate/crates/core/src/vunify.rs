//! Variant-based equational unification: encode the equation system as a
//! conjunction term, saturate its variant set by folding narrowing, and
//! B-unify the fully narrowed equation literals of each variant. The
//! composed substitutions form a complete unifier set for the equational
//! theory whenever the theory has the finite variant property.

use std::collections::BTreeSet;

use crate::error::{EngineError, EngineResult};
use crate::limits::Session;
use crate::subst::Subst;
use crate::term::{Term, Var};
use crate::theory::Theory;
use crate::unify::{away_from, b_unify, minimize_substs};
use crate::variant::{folding_variant_narrow, VariantStatus};

/// Kind of literal in an encoded conjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LitKind {
    Eq,
    Neq,
}

/// Encode literals as a right-nested conjunction term over the extended
/// signature. Returns `None` for the empty conjunction.
pub fn encode_conj(theory: &Theory, lits: &[(LitKind, Term, Term)]) -> Option<Term> {
    let mut encoded: Vec<Term> = Vec::new();
    for (kind, l, r) in lits {
        let (eq_op, neq_op) = theory
            .literal_ops(theory.sig.least_sort(l), theory.sig.least_sort(r))
            .expect("literal sides sort-checked at parse time");
        let op = match kind {
            LitKind::Eq => eq_op,
            LitKind::Neq => neq_op,
        };
        encoded.push(theory.sig.app(op, vec![l.clone(), r.clone()]));
    }
    let mut it = encoded.into_iter().rev();
    let last = it.next()?;
    let mut conj = last;
    for lit in it {
        conj = theory.sig.app(theory.infra.and_op, vec![lit, conj]);
    }
    Some(conj)
}

/// Inverse of `encode_conj`.
pub fn decode_conj(theory: &Theory, t: &Term) -> Option<Vec<(LitKind, Term, Term)>> {
    let mut out = Vec::new();
    let mut cur = t.clone();
    loop {
        match &cur {
            Term::App(f, args) if *f == theory.infra.and_op => {
                out.push(decode_literal(theory, &args[0])?);
                cur = args[1].clone();
            }
            _ => {
                out.push(decode_literal(theory, &cur)?);
                return Some(out);
            }
        }
    }
}

pub fn decode_literal(theory: &Theory, t: &Term) -> Option<(LitKind, Term, Term)> {
    match t {
        Term::App(f, args) if args.len() == 2 => {
            for (_, eq, neq) in &theory.infra.eq_ops {
                if f == eq {
                    return Some((LitKind::Eq, args[0].clone(), args[1].clone()));
                }
                if f == neq {
                    return Some((LitKind::Neq, args[0].clone(), args[1].clone()));
                }
            }
            None
        }
        _ => None,
    }
}

/// Complete set of equational unifiers of the system, away from `w`.
/// Fails with a narrowing bound error when the variant set of the encoded
/// conjunction does not saturate.
pub fn var_unify(
    theory: &Theory,
    session: &mut Session,
    eqs: &[(Term, Term)],
    w: &BTreeSet<Var>,
) -> EngineResult<Vec<Subst>> {
    let mut domain: BTreeSet<Var> = BTreeSet::new();
    for (l, r) in eqs {
        l.collect_vars(&mut domain);
        r.collect_vars(&mut domain);
    }
    if eqs.is_empty() {
        return Ok(vec![Subst::identity()]);
    }
    let lits: Vec<(LitKind, Term, Term)> = eqs
        .iter()
        .map(|(l, r)| (LitKind::Eq, l.clone(), r.clone()))
        .collect();
    let conj = encode_conj(theory, &lits).expect("non-empty system");
    let res = folding_variant_narrow(theory, session, &conj, w)?;
    if res.status == VariantStatus::BoundExceeded {
        return Err(EngineError::NarrowBoundExceeded {
            depth: session.limits.max_narrow_depth,
            nodes: res.nodes_explored,
        });
    }
    let mut out: Vec<Subst> = Vec::new();
    for variant in &res.variants {
        let pairs: Vec<(Term, Term)> = match decode_conj(theory, &variant.term) {
            Some(lits) => lits.into_iter().map(|(_, l, r)| (l, r)).collect(),
            None => continue,
        };
        let mut w2: BTreeSet<Var> = w.clone();
        w2.extend(variant.subst.ran_vars());
        w2.extend(variant.term.vars());
        for gamma in b_unify(&theory.sig, &pairs, &w2, session)? {
            let alpha = variant.subst.compose(&theory.sig, &gamma);
            out.push(away_from(&theory.sig, session, &alpha, &domain, w));
        }
    }
    Ok(minimize_substs(&theory.sig, out, &domain))
}
