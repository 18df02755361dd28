//! Finitary unification modulo the structural axioms.
//!
//! Free symbols decompose, commutative symbols branch over the two argument
//! pairings, and AC/ACU equations go through an elementary solver: cancel
//! common arguments, abstract alien subterms behind fresh variables,
//! translate the remaining multiset equation into a homogeneous linear
//! Diophantine equation over multiplicities, and generate candidate
//! unifiers from subsets of its minimal basis. ACU admits the empty
//! assignment, which maps a variable to the identity. Sorts restrict every
//! step: a fresh variable standing alone for a lower-sorted variable takes
//! that variable's sort, and a variable can only absorb a multi-element
//! multiset when the carrier sort fits its own.
//!
//! Public results are idempotent, have the full variable set of the input
//! system as domain, are renamed away from the caller's variable set `W`,
//! and are minimized under subsumption.

use std::collections::BTreeSet;

use crate::axioms::match_many;
use crate::dioph::minimal_basis;
use crate::error::{EngineError, EngineResult};
use crate::limits::Session;
use crate::signature::{AxiomClass, Signature, SortId, SymbolId};
use crate::subst::{fresh_var, renaming_away, Subst};
use crate::term::{Term, Var};

const MAX_SOLVE_DEPTH: usize = 400;

/// Complete finite set of B-unifiers of the equation system, away from `w`.
pub fn b_unify(
    sig: &Signature,
    eqs: &[(Term, Term)],
    w: &BTreeSet<Var>,
    session: &mut Session,
) -> EngineResult<Vec<Subst>> {
    let mut domain: BTreeSet<Var> = BTreeSet::new();
    for (l, r) in eqs {
        l.collect_vars(&mut domain);
        r.collect_vars(&mut domain);
    }
    let mut avoid: BTreeSet<String> = w.iter().map(|v| v.name.clone()).collect();
    avoid.extend(domain.iter().map(|v| v.name.clone()));

    let raw = solve(sig, session, &avoid, eqs.to_vec(), Subst::identity(), 0)?;
    let mut processed: Vec<Subst> = Vec::new();
    for s in raw {
        processed.push(away_from(sig, session, &s, &domain, w));
    }
    let minimized = minimize_substs(sig, processed, &domain);
    session.stats.unifiers += minimized.len();
    Ok(minimized)
}

/// Normalize a raw solution into the "away from W" form: domain exactly
/// `domain`, every range variable fresh outside `w`.
pub fn away_from(
    sig: &Signature,
    session: &mut Session,
    s: &Subst,
    domain: &BTreeSet<Var>,
    w: &BTreeSet<Var>,
) -> Subst {
    let mut image_vars: BTreeSet<Var> = BTreeSet::new();
    for x in domain {
        s.apply(sig, &Term::Var(x.clone())).collect_vars(&mut image_vars);
    }
    let w_names: BTreeSet<String> = w.iter().map(|v| v.name.clone()).collect();
    let to_rename: BTreeSet<Var> = image_vars
        .iter()
        .filter(|v| w.contains(v) || domain.contains(v) || w_names.contains(&v.name))
        .cloned()
        .collect();
    let mut avoid = w_names;
    avoid.extend(image_vars.iter().map(|v| v.name.clone()));
    let ren = renaming_away(session, &to_rename, &avoid);
    let mut out = Subst::identity();
    for x in domain {
        let image = ren.apply(sig, &s.apply(sig, &Term::Var(x.clone())));
        out.bind(x.clone(), image);
        debug_assert!(out.get(x).is_some(), "domain must be fully moved");
    }
    out
}

/// Does `general` subsume `special` over `domain`, i.e. is there a `rho`
/// with `x . general . rho == x . special` for every domain variable?
pub fn subst_subsumes(
    sig: &Signature,
    general: &Subst,
    special: &Subst,
    domain: &BTreeSet<Var>,
) -> bool {
    let goals: Vec<(Term, Term)> = domain
        .iter()
        .map(|x| {
            let xt = Term::Var(x.clone());
            (general.apply(sig, &xt), special.apply(sig, &xt))
        })
        .collect();
    !match_many(sig, &goals).is_empty()
}

/// Drop every substitution subsumed by another; mutually-subsuming pairs
/// keep the earlier entry.
pub fn minimize_substs(sig: &Signature, cands: Vec<Subst>, domain: &BTreeSet<Var>) -> Vec<Subst> {
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
            if subst_subsumes(sig, &cands[j], &cands[i], domain) {
                if subst_subsumes(sig, &cands[i], &cands[j], domain) {
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
        .filter_map(|(s, k)| k.then_some(s))
        .collect()
}

fn solve(
    sig: &Signature,
    session: &mut Session,
    avoid: &BTreeSet<String>,
    mut goals: Vec<(Term, Term)>,
    subst: Subst,
    depth: usize,
) -> EngineResult<Vec<Subst>> {
    if depth > MAX_SOLVE_DEPTH {
        return Err(EngineError::UnifyDepthExceeded { cap: MAX_SOLVE_DEPTH });
    }
    let (l, r) = match goals.pop() {
        None => return Ok(vec![subst]),
        Some((l, r)) => (subst.apply(sig, &l), subst.apply(sig, &r)),
    };
    if l == r {
        return solve(sig, session, avoid, goals, subst, depth + 1);
    }
    match (&l, &r) {
        (Term::Var(x), Term::Var(y)) => {
            if sig.leq(y.sort, x.sort) {
                let ext = Subst::from_pairs([(x.clone(), Term::Var(y.clone()))]);
                solve(sig, session, avoid, goals, subst.compose(sig, &ext), depth + 1)
            } else if sig.leq(x.sort, y.sort) {
                let ext = Subst::from_pairs([(y.clone(), Term::Var(x.clone()))]);
                solve(sig, session, avoid, goals, subst.compose(sig, &ext), depth + 1)
            } else {
                let mut out = Vec::new();
                for m in sig.max_lower_bounds(x.sort, y.sort) {
                    let z = fresh_var(session, avoid, m);
                    let ext = Subst::from_pairs([
                        (x.clone(), Term::Var(z.clone())),
                        (y.clone(), Term::Var(z.clone())),
                    ]);
                    out.extend(solve(
                        sig,
                        session,
                        avoid,
                        goals.clone(),
                        subst.compose(sig, &ext),
                        depth + 1,
                    )?);
                }
                Ok(out)
            }
        }
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if !t.contains_var(x) && sig.leq(sig.least_sort(t), x.sort) {
                let ext = Subst::from_pairs([(x.clone(), t.clone())]);
                return solve(sig, session, avoid, goals, subst.compose(sig, &ext), depth + 1);
            }
            if let Term::App(f, args) = t {
                if matches!(sig.symbol(*f).class, AxiomClass::AssocCommId(_)) {
                    return elementary(
                        sig,
                        session,
                        avoid,
                        *f,
                        vec![Term::Var(x.clone())],
                        args.clone(),
                        goals,
                        subst,
                        depth,
                    );
                }
            }
            Ok(vec![])
        }
        (Term::App(f, largs), Term::App(g, rargs)) => {
            if f == g {
                match sig.symbol(*f).class {
                    AxiomClass::Free => {
                        let mut goals2 = goals;
                        for (a, b) in largs.iter().zip(rargs) {
                            goals2.push((a.clone(), b.clone()));
                        }
                        solve(sig, session, avoid, goals2, subst, depth + 1)
                    }
                    AxiomClass::Comm => {
                        let mut out = Vec::new();
                        for perm in [[0usize, 1], [1, 0]] {
                            let mut goals2 = goals.clone();
                            goals2.push((largs[0].clone(), rargs[perm[0]].clone()));
                            goals2.push((largs[1].clone(), rargs[perm[1]].clone()));
                            out.extend(solve(sig, session, avoid, goals2, subst.clone(), depth + 1)?);
                        }
                        Ok(out)
                    }
                    AxiomClass::AssocComm | AxiomClass::AssocCommId(_) => elementary(
                        sig,
                        session,
                        avoid,
                        *f,
                        largs.clone(),
                        rargs.clone(),
                        goals,
                        subst,
                        depth,
                    ),
                }
            } else if matches!(sig.symbol(*f).class, AxiomClass::AssocCommId(_)) {
                elementary(
                    sig,
                    session,
                    avoid,
                    *f,
                    largs.clone(),
                    sig.ac_args(*f, &r),
                    goals,
                    subst,
                    depth,
                )
            } else if matches!(sig.symbol(*g).class, AxiomClass::AssocCommId(_)) {
                elementary(
                    sig,
                    session,
                    avoid,
                    *g,
                    sig.ac_args(*g, &l),
                    rargs.clone(),
                    goals,
                    subst,
                    depth,
                )
            } else {
                Ok(vec![])
            }
        }
    }
}

/// Elementary AC/ACU unification of two argument multisets of symbol `f`.
#[allow(clippy::too_many_arguments)]
fn elementary(
    sig: &Signature,
    session: &mut Session,
    avoid: &BTreeSet<String>,
    f: SymbolId,
    left: Vec<Term>,
    right: Vec<Term>,
    rest_goals: Vec<(Term, Term)>,
    subst: Subst,
    depth: usize,
) -> EngineResult<Vec<Subst>> {
    let decl = sig.symbol(f);
    let is_acu = matches!(decl.class, AxiomClass::AssocCommId(_));
    let identity = sig.identity_term(f);

    // cancel common elements; multiset cancellation preserves the solutions
    let mut left = left;
    let mut right = right;
    let mut i = 0;
    while i < left.len() {
        if let Some(j) = right.iter().position(|r| *r == left[i]) {
            right.remove(j);
            left.remove(i);
        } else {
            i += 1;
        }
    }

    if left.is_empty() && right.is_empty() {
        return solve(sig, session, avoid, rest_goals, subst, depth + 1);
    }
    if left.is_empty() || right.is_empty() {
        if !is_acu {
            return Ok(vec![]);
        }
        let e = identity.clone().expect("ACU has identity");
        let mut goals2 = rest_goals;
        for t in left.into_iter().chain(right) {
            goals2.push((t, e.clone()));
        }
        return solve(sig, session, avoid, goals2, subst, depth + 1);
    }

    // distinct elements with signed multiplicities
    let mut elems: Vec<(Term, i64)> = Vec::new();
    for (side, sign) in [(&left, 1i64), (&right, -1i64)] {
        for t in *side {
            match elems.iter_mut().find(|(e, _)| e == t) {
                Some((_, c)) => *c += sign,
                None => elems.push((t.clone(), sign)),
            }
        }
    }
    let coeffs: Vec<i64> = elems.iter().map(|(_, c)| *c).collect();
    let basis = minimal_basis(
        &coeffs,
        session.limits.max_dioph_norm,
        session.limits.max_dioph_basis,
    )?;
    if basis.is_empty() {
        return Ok(vec![]);
    }
    if basis.len() >= 63 || (1u64 << basis.len()) > session.limits.max_ac_subsets as u64 {
        return Err(EngineError::AcSplitCapExceeded { cap: session.limits.max_ac_subsets });
    }

    let carrier_arg = decl.arg_sorts[0];
    let result_sort = decl.result;
    let identity_sort = identity.as_ref().map(|e| sig.least_sort(e));

    let mut out = Vec::new();
    'subsets: for mask in 1u64..(1u64 << basis.len()) {
        let chosen: Vec<&Vec<u32>> = basis
            .iter()
            .enumerate()
            .filter_map(|(i, b)| (mask & (1 << i) != 0).then_some(b))
            .collect();
        let totals: Vec<u64> = (0..elems.len())
            .map(|e| chosen.iter().map(|b| b[e] as u64).sum())
            .collect();
        // admissibility per element
        for (idx, (term, _)) in elems.iter().enumerate() {
            let total = totals[idx];
            match term {
                Term::Var(v) => {
                    if total == 0 {
                        let ok = is_acu
                            && identity_sort.map(|s| sig.leq(s, v.sort)).unwrap_or(false);
                        if !ok {
                            continue 'subsets;
                        }
                    } else if total >= 2 && !sig.leq(result_sort, v.sort) {
                        continue 'subsets;
                    }
                }
                _ => {
                    // alien subterm: exactly one atom, which re-unifies with it
                    if total != 1 {
                        continue 'subsets;
                    }
                }
            }
        }
        // sort constraints per fresh atom
        let mut atom_sort_cands: Vec<Vec<SortId>> = Vec::new();
        for b in &chosen {
            let mut cands = vec![carrier_arg];
            for (idx, (term, _)) in elems.iter().enumerate() {
                if b[idx] == 0 {
                    continue;
                }
                let constraint = match term {
                    Term::Var(v) if totals[idx] == 1 => Some(v.sort),
                    Term::Var(_) => Some(carrier_arg),
                    _ => None, // alien: its own unification will check sorts
                };
                if let Some(s) = constraint {
                    let mut next: Vec<SortId> = Vec::new();
                    for c in cands {
                        for m in sig.max_lower_bounds(c, s) {
                            if !next.contains(&m) {
                                next.push(m);
                            }
                        }
                    }
                    cands = next;
                    if cands.is_empty() {
                        continue 'subsets;
                    }
                }
            }
            atom_sort_cands.push(cands);
        }
        // branch over atom sort choices (nearly always singleton)
        let mut sort_choices: Vec<Vec<SortId>> = vec![vec![]];
        for cands in &atom_sort_cands {
            let mut next = Vec::new();
            for partial in &sort_choices {
                for &s in cands {
                    let mut p = partial.clone();
                    p.push(s);
                    next.push(p);
                }
            }
            sort_choices = next;
        }
        for choice in sort_choices {
            let atoms: Vec<Var> = choice
                .iter()
                .map(|&s| fresh_var(session, avoid, s))
                .collect();
            let mut ext = Subst::identity();
            let mut alien_goals: Vec<(Term, Term)> = Vec::new();
            let mut ok = true;
            for (idx, (term, _)) in elems.iter().enumerate() {
                let mut pieces: Vec<Term> = Vec::new();
                for (bi, b) in chosen.iter().enumerate() {
                    for _ in 0..b[idx] {
                        pieces.push(Term::Var(atoms[bi].clone()));
                    }
                }
                match term {
                    Term::Var(v) => {
                        let value = sig.from_ac_args(f, pieces);
                        if value.as_var() == Some(v) {
                            ok = false; // degenerate self-assignment
                            break;
                        }
                        ext.bind(v.clone(), value);
                    }
                    other => {
                        debug_assert_eq!(pieces.len(), 1);
                        alien_goals.push((other.clone(), pieces.pop().expect("one piece")));
                    }
                }
            }
            if !ok {
                continue;
            }
            let subst2 = subst.compose(sig, &ext);
            let mut goals2 = rest_goals.clone();
            goals2.extend(alien_goals);
            out.extend(solve(sig, session, avoid, goals2, subst2, depth + 1)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{Role, SymbolDecl};

    struct Fix {
        sig: Signature,
        nat: SortId,
        natset: SortId,
        zero: SymbolId,
        one: SymbolId,
        plus: SymbolId,
        union: SymbolId,
        smax: SymbolId,
        succ: SymbolId,
        empty: SymbolId,
    }

    fn fix() -> Fix {
        let mut sig = Signature::new();
        let nat = sig.add_sort("Nat");
        let natset = sig.add_sort("NatSet");
        sig.add_subsort(nat, natset);
        sig.close_subsorts().unwrap();
        let mk = |name: &str, args: Vec<SortId>, result, class| SymbolDecl {
            name: name.to_string(),
            arg_sorts: args,
            result,
            class,
            role: Role::Constructor,
            prec: 30,
            infra: false,
        };
        let zero = sig.add_symbol(mk("0", vec![], nat, AxiomClass::Free)).unwrap();
        let one = sig.add_symbol(mk("1", vec![], nat, AxiomClass::Free)).unwrap();
        let plus = sig
            .add_symbol(mk("_+_", vec![nat, nat], nat, AxiomClass::AssocCommId(zero)))
            .unwrap();
        let union = sig
            .add_symbol(mk("_,_", vec![natset, natset], natset, AxiomClass::AssocComm))
            .unwrap();
        let smax = sig.add_symbol(mk("max", vec![nat, nat], nat, AxiomClass::Comm)).unwrap();
        let succ = sig.add_symbol(mk("s", vec![nat], nat, AxiomClass::Free)).unwrap();
        let empty = sig.add_symbol(mk("empty", vec![], natset, AxiomClass::Free)).unwrap();
        Fix { sig, nat, natset, zero, one, plus, union, smax, succ, empty }
    }

    fn vars_of(eqs: &[(Term, Term)]) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for (l, r) in eqs {
            l.collect_vars(&mut s);
            r.collect_vars(&mut s);
        }
        s
    }

    fn unify(f: &Fix, eqs: &[(Term, Term)]) -> Vec<Subst> {
        let w = vars_of(eqs);
        let mut session = Session::default();
        b_unify(&f.sig, eqs, &w, &mut session).unwrap()
    }

    fn assert_sound(f: &Fix, eqs: &[(Term, Term)], sols: &[Subst]) {
        for s in sols {
            for (l, r) in eqs {
                assert_eq!(
                    s.apply(&f.sig, l),
                    s.apply(&f.sig, r),
                    "unsound unifier {} for {} = {}",
                    f.sig.subst_to_string(s),
                    f.sig.term_to_string(l),
                    f.sig.term_to_string(r)
                );
            }
        }
    }

    #[test]
    fn trivial_and_clash() {
        let f = fix();
        let x = Term::var("x", f.nat);
        let sols = unify(&f, &[(x.clone(), x.clone())]);
        assert_eq!(sols.len(), 1);
        // x =? x yields a pure renaming
        assert!(sols[0].iter().all(|(_, t)| t.is_var()));
        let zero = Term::constant(f.zero);
        let one = Term::constant(f.one);
        assert!(unify(&f, &[(zero.clone(), one.clone())]).is_empty());
        let sx = f.sig.app(f.succ, vec![x.clone()]);
        assert!(unify(&f, &[(sx, zero)]).is_empty());
    }

    #[test]
    fn acu_two_vars_against_constant() {
        // x + y =? 1 has exactly the two identity-absorbing solutions
        let f = fix();
        let x = Term::var("x", f.nat);
        let y = Term::var("y", f.nat);
        let one = Term::constant(f.one);
        let zero = Term::constant(f.zero);
        let eqs = [(f.sig.app(f.plus, vec![x.clone(), y.clone()]), one.clone())];
        let sols = unify(&f, &eqs);
        assert_sound(&f, &eqs, &sols);
        assert_eq!(sols.len(), 2);
        let vx = Var::new("x", f.nat);
        let vy = Var::new("y", f.nat);
        assert!(sols
            .iter()
            .any(|s| s.get(&vx) == Some(&one) && s.get(&vy) == Some(&zero)));
        assert!(sols
            .iter()
            .any(|s| s.get(&vx) == Some(&zero) && s.get(&vy) == Some(&one)));
    }

    #[test]
    fn comm_unification_minimizes_to_diagonal() {
        // max(x, 0) =? max(0, y): complete set subsumed by {x |-> y}
        let f = fix();
        let x = Term::var("x", f.nat);
        let y = Term::var("y", f.nat);
        let zero = Term::constant(f.zero);
        let eqs = [(
            f.sig.app(f.smax, vec![x.clone(), zero.clone()]),
            f.sig.app(f.smax, vec![zero.clone(), y.clone()]),
        )];
        let sols = unify(&f, &eqs);
        assert_sound(&f, &eqs, &sols);
        assert_eq!(sols.len(), 1);
        let vx = Var::new("x", f.nat);
        let vy = Var::new("y", f.nat);
        assert_eq!(sols[0].get(&vx), sols[0].get(&vy));
        assert!(sols[0].get(&vx).unwrap().is_var());
    }

    #[test]
    fn acu_occurs_collapses_to_identity() {
        // x =? x + y forces y to the identity
        let f = fix();
        let x = Term::var("x", f.nat);
        let y = Term::var("y", f.nat);
        let eqs = [(x.clone(), f.sig.app(f.plus, vec![x.clone(), y.clone()]))];
        let sols = unify(&f, &eqs);
        assert_sound(&f, &eqs, &sols);
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].get(&Var::new("y", f.nat)), Some(&Term::constant(f.zero)));
    }

    #[test]
    fn ac_occurs_fails() {
        // x =? (x, y) has no unifier: union has no identity
        let f = fix();
        let x = Term::var("x", f.natset);
        let y = Term::var("y", f.natset);
        let eqs = [(x.clone(), f.sig.app(f.union, vec![x.clone(), y.clone()]))];
        assert!(unify(&f, &eqs).is_empty());
    }

    #[test]
    fn acu_parity_has_no_unifier() {
        // z + z + 1 =? m + m is the even/odd clash
        let f = fix();
        let z = Term::var("z", f.nat);
        let m = Term::var("m", f.nat);
        let one = Term::constant(f.one);
        let lhs = f.sig.app(f.plus, vec![z.clone(), z.clone(), one]);
        let rhs = f.sig.app(f.plus, vec![m.clone(), m.clone()]);
        assert!(unify(&f, &[(lhs, rhs)]).is_empty());
    }

    #[test]
    fn ac_union_overlap_solutions_exist() {
        // (x, y) =? (NS, NS) must include the diagonal x = y = NS
        let f = fix();
        let x = Term::var("x", f.natset);
        let y = Term::var("y", f.natset);
        let ns = Term::var("NS", f.natset);
        let eqs = [(
            f.sig.app(f.union, vec![x.clone(), y.clone()]),
            f.sig.app(f.union, vec![ns.clone(), ns.clone()]),
        )];
        let sols = unify(&f, &eqs);
        assert_sound(&f, &eqs, &sols);
        let vx = Var::new("x", f.natset);
        let vy = Var::new("y", f.natset);
        // diagonal solution present
        assert!(sols.iter().any(|s| s.get(&vx) == s.get(&vy)));
        // overlap solution x |-> (a, b), y |-> a present
        assert!(sols.iter().any(|s| {
            match (s.get(&vx), s.get(&vy)) {
                (Some(Term::App(g, args)), Some(yv)) if *g == f.union && args.len() == 2 => {
                    args.contains(yv)
                }
                _ => false,
            }
        }));
    }

    #[test]
    fn sort_restriction_prunes_ac_solutions() {
        // (n, NS) =? (empty, 0, 1): n of sort Nat can only take 0 or 1
        let f = fix();
        let n = Term::var("n", f.nat);
        let ns = Term::var("NS", f.natset);
        let zero = Term::constant(f.zero);
        let one = Term::constant(f.one);
        let e = Term::constant(f.empty);
        let eqs = [(
            f.sig.app(f.union, vec![n.clone(), ns.clone()]),
            f.sig.app(f.union, vec![e.clone(), zero.clone(), one.clone()]),
        )];
        let sols = unify(&f, &eqs);
        assert_sound(&f, &eqs, &sols);
        assert_eq!(sols.len(), 2);
        for s in &sols {
            let nv = s.get(&Var::new("n", f.nat)).unwrap();
            assert!(nv == &zero || nv == &one);
        }
    }

    #[test]
    fn results_are_idempotent_away_from_w_with_full_domain() {
        let f = fix();
        let x = Term::var("x", f.nat);
        let y = Term::var("y", f.nat);
        let one = Term::constant(f.one);
        let eqs = [(f.sig.app(f.plus, vec![x.clone(), y.clone()]), one.clone())];
        let w = vars_of(&eqs);
        let mut session = Session::default();
        let sols = b_unify(&f.sig, &eqs, &w, &mut session).unwrap();
        for s in &sols {
            assert!(s.is_idempotent());
            assert!(s.ran_vars().is_disjoint(&w));
            let dom: BTreeSet<Var> = s.dom().cloned().collect();
            assert_eq!(dom, w);
        }
    }
}
