//! Matching modulo the structural axioms: free, commutative, AC, and ACU
//! symbols. Subjects are matched as opaque canonical terms; their variables
//! are never instantiated.
//!
//! AC matching enumerates distributions of the flattened subject multiset
//! over the pattern's argument list, respecting sorts: a variable below the
//! carrier sort can only absorb a single subject element, and only ACU
//! variables may absorb the empty multiset (becoming the identity).

use crate::signature::{Signature, SymbolId};
use crate::subst::Subst;
use crate::term::Term;

/// Equality modulo the axioms. Terms are kept canonical, so this is
/// structural equality; it exists as a named operation because callers mean
/// "B-equal", not "same representation".
pub fn b_equal(t: &Term, u: &Term) -> bool {
    t == u
}

/// Complete set of matchers `s` with `pattern . s == subject` (canonical
/// equality) and `dom(s)` inside the pattern's variables.
pub fn match_terms(sig: &Signature, pattern: &Term, subject: &Term) -> Vec<Subst> {
    match_many(sig, &[(pattern.clone(), subject.clone())])
}

/// Simultaneous matching of several pattern/subject pairs under one
/// substitution.
pub fn match_many(sig: &Signature, goals: &[(Term, Term)]) -> Vec<Subst> {
    let mut out = Vec::new();
    solve(sig, goals.to_vec(), Subst::identity(), &mut out);
    dedup_substs(out)
}

/// Matching with AC extension at the root: the pattern must be rooted at an
/// AC symbol, and any sub-multiset of the subject's flattened arguments may
/// be left over. Returns each matcher with its leftover multiset.
pub fn match_with_extension(
    sig: &Signature,
    f: SymbolId,
    pattern_args: &[Term],
    subject: &Term,
) -> Vec<(Subst, Vec<Term>)> {
    let subject_elems = sig.ac_args(f, subject);
    let mut out = Vec::new();
    match_multiset(
        sig,
        f,
        pattern_args.to_vec(),
        subject_elems,
        Subst::identity(),
        true,
        &mut out,
    );
    // dedup on (subst, leftover)
    let mut seen: Vec<(Subst, Vec<Term>)> = Vec::new();
    for item in out {
        if !seen.contains(&item) {
            seen.push(item);
        }
    }
    seen
}

fn dedup_substs(all: Vec<Subst>) -> Vec<Subst> {
    let mut seen: Vec<Subst> = Vec::new();
    for s in all {
        if !seen.contains(&s) {
            seen.push(s);
        }
    }
    seen
}

fn solve(sig: &Signature, mut goals: Vec<(Term, Term)>, subst: Subst, out: &mut Vec<Subst>) {
    let (pattern, subject) = match goals.pop() {
        None => {
            out.push(subst);
            return;
        }
        Some(g) => g,
    };
    let pattern = subst.apply(sig, &pattern);
    match &pattern {
        Term::Var(v) => {
            // `apply` already replaced bound variables, so v is unbound.
            if sig.leq(sig.least_sort(&subject), v.sort) {
                let mut s2 = subst;
                s2.bind(v.clone(), subject);
                solve(sig, goals, s2, out);
            }
        }
        Term::App(f, pargs) => {
            let class = sig.symbol(*f).class;
            if class.is_ac_like() {
                let subject_elems = sig.ac_args(*f, &subject);
                let mut results = Vec::new();
                match_multiset(
                    sig,
                    *f,
                    pargs.clone(),
                    subject_elems,
                    subst,
                    false,
                    &mut results,
                );
                for (s2, _) in results {
                    solve(sig, goals.clone(), s2, out);
                }
            } else {
                let (g, sargs) = match &subject {
                    Term::App(g, sargs) => (*g, sargs),
                    Term::Var(_) => return,
                };
                if g != *f {
                    return;
                }
                match class {
                    crate::signature::AxiomClass::Comm => {
                        // both argument pairings
                        for perm in [[0usize, 1], [1, 0]] {
                            let mut goals2 = goals.clone();
                            goals2.push((pargs[0].clone(), sargs[perm[0]].clone()));
                            goals2.push((pargs[1].clone(), sargs[perm[1]].clone()));
                            solve(sig, goals2, subst.clone(), out);
                        }
                    }
                    _ => {
                        debug_assert_eq!(pargs.len(), sargs.len());
                        let mut goals2 = goals;
                        for (p, s) in pargs.iter().zip(sargs) {
                            goals2.push((p.clone(), s.clone()));
                        }
                        solve(sig, goals2, subst, out);
                    }
                }
            }
        }
    }
}

/// Distribute the subject multiset over the pattern elements of one AC node.
fn match_multiset(
    sig: &Signature,
    f: SymbolId,
    pats: Vec<Term>,
    remaining: Vec<Term>,
    subst: Subst,
    allow_leftover: bool,
    out: &mut Vec<(Subst, Vec<Term>)>,
) {
    debug_assert!(remaining.len() < 60, "AC subject multiset too large");
    if pats.is_empty() {
        if allow_leftover || remaining.is_empty() {
            out.push((subst, remaining));
        }
        return;
    }
    // prefer an element that is already determined under the substitution
    let idx = pats
        .iter()
        .position(|p| {
            let p = subst.apply(sig, p);
            !p.is_var()
        })
        .unwrap_or(0);
    let mut pats2 = pats;
    let chosen = subst.apply(sig, &pats2.remove(idx));
    match &chosen {
        Term::App(g, args) if *g == f => {
            // a bound variable expanded to an f-rooted term: consume its
            // children exactly
            let mut rem = remaining;
            for needed in args {
                match rem.iter().position(|r| r == needed) {
                    Some(i) => {
                        rem.remove(i);
                    }
                    None => return,
                }
            }
            match_multiset(sig, f, pats2, rem, subst, allow_leftover, out);
        }
        Term::App(..) => {
            if sig.identity_term(f).as_ref() == Some(&chosen) {
                // identity consumes nothing
                match_multiset(sig, f, pats2, remaining, subst, allow_leftover, out);
                return;
            }
            // must match exactly one subject element; try each distinct one
            let mut tried: Vec<&Term> = Vec::new();
            for (i, s) in remaining.iter().enumerate() {
                if tried.contains(&s) {
                    continue;
                }
                tried.push(s);
                let mut sols = Vec::new();
                solve(
                    sig,
                    vec![(chosen.clone(), s.clone())],
                    subst.clone(),
                    &mut sols,
                );
                for s2 in sols {
                    let mut rem = remaining.clone();
                    rem.remove(i);
                    match_multiset(sig, f, pats2.clone(), rem, s2, allow_leftover, out);
                }
            }
        }
        Term::Var(v) => {
            let carrier = sig.symbol(f).result;
            let n = remaining.len();
            let can_take_many = sig.leq(carrier, v.sort);
            let identity_ok = sig
                .identity_term(f)
                .map(|e| sig.leq(sig.least_sort(&e), v.sort))
                .unwrap_or(false);
            // enumerate sub-multisets by bitmask
            for mask in 0u64..(1u64 << n) {
                let k = mask.count_ones();
                if k == 0 && !identity_ok {
                    continue;
                }
                if k >= 2 && !can_take_many {
                    continue;
                }
                let mut taken = Vec::new();
                let mut rest = Vec::new();
                for (i, s) in remaining.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        taken.push(s.clone());
                    } else {
                        rest.push(s.clone());
                    }
                }
                if k == 1 && !sig.leq(sig.least_sort(&taken[0]), v.sort) {
                    continue;
                }
                let value = sig.from_ac_args(f, taken);
                let mut s2 = subst.clone();
                s2.bind(v.clone(), value);
                match_multiset(sig, f, pats2.clone(), rest, s2, allow_leftover, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{AxiomClass, Role, SortId, SymbolDecl};
    use crate::term::Var;

    struct Fix {
        sig: Signature,
        nat: SortId,
        natset: SortId,
        zero: SymbolId,
        one: SymbolId,
        plus: SymbolId,
        union: SymbolId,
        succ: SymbolId,
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
        let succ = sig.add_symbol(mk("s", vec![nat], nat, AxiomClass::Free)).unwrap();
        Fix { sig, nat, natset, zero, one, plus, union, succ }
    }

    #[test]
    fn variable_matches_anything_of_its_sort() {
        let f = fix();
        let x = Term::var("x", f.natset);
        let t = f.sig.app(f.union, vec![Term::constant(f.zero), Term::constant(f.one)]);
        let ms = match_terms(&f.sig, &x, &t);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].get(&Var::new("x", f.natset)), Some(&t));
        // sort-restricted variable does not match a larger term
        let n = Term::var("n", f.nat);
        assert!(match_terms(&f.sig, &n, &t).is_empty());
    }

    #[test]
    fn symbol_clash_fails() {
        let f = fix();
        let pat = f.sig.app(f.succ, vec![Term::var("x", f.nat)]);
        assert!(match_terms(&f.sig, &pat, &Term::constant(f.zero)).is_empty());
    }

    #[test]
    fn ac_two_variable_split() {
        let f = fix();
        let ns = Term::var("NS", f.natset);
        let ns2 = Term::var("NS'", f.natset);
        let pat = f.sig.app(f.union, vec![ns.clone(), ns2.clone()]);
        let subj = f.sig.app(f.union, vec![Term::constant(f.zero), Term::constant(f.one)]);
        let ms = match_terms(&f.sig, &pat, &subj);
        // exactly the two ways of splitting {0, 1} into two singletons
        assert_eq!(ms.len(), 2);
        let zero = Term::constant(f.zero);
        let one = Term::constant(f.one);
        let vns = Var::new("NS", f.natset);
        let vns2 = Var::new("NS'", f.natset);
        assert!(ms
            .iter()
            .any(|m| m.get(&vns) == Some(&zero) && m.get(&vns2) == Some(&one)));
        assert!(ms
            .iter()
            .any(|m| m.get(&vns) == Some(&one) && m.get(&vns2) == Some(&zero)));
    }

    #[test]
    fn repeated_variable_needs_equal_pieces() {
        let f = fix();
        let ns = Term::var("NS", f.natset);
        let pat = f.sig.app(f.union, vec![ns.clone(), ns.clone()]);
        let zero = Term::constant(f.zero);
        let one = Term::constant(f.one);
        let subj_ok = f.sig.app(f.union, vec![zero.clone(), zero.clone(), one.clone(), one.clone()]);
        // NS can be 0,1 (taking one of each from both copies)? No: the two
        // copies must expand to the same multiset, so NS |-> (0,1) works.
        let ms = match_terms(&f.sig, &pat, &subj_ok);
        assert!(!ms.is_empty());
        let subj_bad = f.sig.app(f.union, vec![zero.clone(), zero.clone(), one.clone()]);
        assert!(match_terms(&f.sig, &pat, &subj_bad).is_empty());
    }

    #[test]
    fn acu_pattern_matches_identity_subject() {
        let f = fix();
        let n = Term::var("N", f.nat);
        // N + N matched against 0: both copies of N map to the identity
        let pat = f.sig.app(f.plus, vec![n.clone(), n.clone()]);
        let ms = match_terms(&f.sig, &pat, &Term::constant(f.zero));
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].get(&Var::new("N", f.nat)), Some(&Term::constant(f.zero)));
        // and against 1: impossible (N+N is even)
        assert!(match_terms(&f.sig, &pat, &Term::constant(f.one)).is_empty());
    }

    #[test]
    fn sort_restricted_ac_variable_takes_single_elements_only() {
        let f = fix();
        let n = Term::var("N", f.nat);
        let ns = Term::var("NS", f.natset);
        let pat = f.sig.app(f.union, vec![n.clone(), ns.clone()]);
        let zero = Term::constant(f.zero);
        let one = Term::constant(f.one);
        let two = f.sig.app(f.plus, vec![one.clone(), one.clone()]);
        let subj = f.sig.app(f.union, vec![zero.clone(), one.clone(), two.clone()]);
        let ms = match_terms(&f.sig, &pat, &subj);
        // N must take exactly one element (its sort is below the carrier)
        assert_eq!(ms.len(), 3);
        for m in &ms {
            let nv = m.get(&Var::new("N", f.nat)).unwrap();
            assert!(f.sig.leq(f.sig.least_sort(nv), f.nat));
        }
    }

    #[test]
    fn extension_matching_returns_leftovers() {
        let f = fix();
        let ns = Term::var("NS", f.natset);
        let pat_args = vec![ns.clone(), ns.clone()];
        let zero = Term::constant(f.zero);
        let one = Term::constant(f.one);
        let subj = f.sig.app(f.union, vec![zero.clone(), one.clone(), one.clone()]);
        let ms = match_with_extension(&f.sig, f.union, &pat_args, &subj);
        // NS |-> 1 with leftover {0} is the only extension match
        assert!(ms
            .iter()
            .any(|(m, rest)| m.get(&Var::new("NS", f.natset)) == Some(&one) && rest == &vec![zero.clone()]));
        assert!(ms
            .iter()
            .all(|(m, _)| m.get(&Var::new("NS", f.natset)) == Some(&one)));
    }
}
