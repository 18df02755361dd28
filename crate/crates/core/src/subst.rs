//! Substitutions: finite sort-preserving maps from variables to terms,
//! applied by homomorphic extension with re-canonicalization at AC nodes.

use std::collections::{BTreeMap, BTreeSet};

use crate::limits::Session;
use crate::signature::Signature;
use crate::term::{Term, Var};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<Var, Term>,
}

impl Subst {
    pub fn identity() -> Self {
        Subst::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Self {
        let mut s = Subst::identity();
        for (v, t) in pairs {
            s.bind(v, t);
        }
        s
    }

    /// Record `v -> t`; a binding of a variable to itself is dropped so that
    /// `dom` is exactly the set of moved variables.
    pub fn bind(&mut self, v: Var, t: Term) {
        if t.as_var() == Some(&v) {
            self.map.remove(&v);
        } else {
            self.map.insert(v, t);
        }
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn dom(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    pub fn ran_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.collect_vars(&mut out);
        }
        out
    }

    pub fn apply(&self, sig: &Signature, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.map.get(v) {
                Some(u) => u.clone(),
                None => t.clone(),
            },
            Term::App(f, args) => {
                if self.map.is_empty() {
                    return t.clone();
                }
                let new_args = args.iter().map(|a| self.apply(sig, a)).collect();
                sig.app(*f, new_args)
            }
        }
    }

    /// Composition: `t.apply(compose(s, r)) == t.apply(s).apply(r)`.
    pub fn compose(&self, sig: &Signature, after: &Subst) -> Subst {
        let mut out = Subst::identity();
        for (v, t) in &self.map {
            out.bind(v.clone(), after.apply(sig, t));
        }
        for (v, t) in &after.map {
            if !self.map.contains_key(v) {
                out.bind(v.clone(), t.clone());
            }
        }
        out
    }

    /// Restriction `s|_Z`: agrees with `s` on `Z`, identity elsewhere.
    pub fn restrict(&self, z: &BTreeSet<Var>) -> Subst {
        Subst {
            map: self
                .map
                .iter()
                .filter(|(v, _)| z.contains(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        let ran = self.ran_vars();
        self.map.keys().all(|v| !ran.contains(v))
    }

    /// Pointwise map over the range.
    pub fn map_range(&self, mut f: impl FnMut(&Term) -> Term) -> Subst {
        Subst {
            map: self.map.iter().map(|(v, t)| (v.clone(), f(t))).collect(),
        }
    }
}

/// A fresh variable whose name avoids every name in `avoid`.
pub fn fresh_var(session: &mut Session, avoid: &BTreeSet<String>, sort: crate::signature::SortId) -> Var {
    loop {
        let name = format!("V{}", session.next_fresh_index());
        if !avoid.contains(&name) {
            return Var::new(name, sort);
        }
    }
}

pub fn var_names(vars: &BTreeSet<Var>) -> BTreeSet<String> {
    vars.iter().map(|v| v.name.clone()).collect()
}

/// Sort-preserving renaming of `vars` to fresh variables away from `avoid`.
pub fn renaming_away(
    session: &mut Session,
    vars: &BTreeSet<Var>,
    avoid: &BTreeSet<String>,
) -> Subst {
    let mut avoid = avoid.clone();
    let mut out = Subst::identity();
    for v in vars {
        let fresh = fresh_var(session, &avoid, v.sort);
        avoid.insert(fresh.name.clone());
        out.bind(v.clone(), Term::Var(fresh));
    }
    out
}

/// Rename a term so that it shares no variable with `w`; returns the renamed
/// term and the renaming used.
pub fn rename_term_away(
    sig: &Signature,
    session: &mut Session,
    t: &Term,
    w: &BTreeSet<Var>,
) -> (Term, Subst) {
    let avoid: BTreeSet<String> = w.iter().map(|v| v.name.clone()).collect();
    let clashing: BTreeSet<Var> = t.vars().into_iter().filter(|v| avoid.contains(&v.name)).collect();
    let renaming = renaming_away(session, &clashing, &avoid);
    (renaming.apply(sig, t), renaming)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{AxiomClass, Role, Signature, SymbolDecl};

    fn small_sig() -> (Signature, crate::signature::SortId) {
        let mut sig = Signature::new();
        let nat = sig.add_sort("Nat");
        sig.close_subsorts().unwrap();
        let zero = sig
            .add_symbol(SymbolDecl {
                name: "0".into(),
                arg_sorts: vec![],
                result: nat,
                class: AxiomClass::Free,
                role: Role::Constructor,
                prec: 30,
                infra: false,
            })
            .unwrap();
        sig.add_symbol(SymbolDecl {
            name: "_+_".into(),
            arg_sorts: vec![nat, nat],
            result: nat,
            class: AxiomClass::AssocCommId(zero),
            role: Role::Constructor,
            prec: 20,
            infra: false,
        })
        .unwrap();
        (sig, nat)
    }

    #[test]
    fn compose_agrees_with_sequential_application() {
        let (sig, nat) = small_sig();
        let x = Var::new("x", nat);
        let y = Var::new("y", nat);
        let zero = Term::constant(sig.symbol_by_name("0").unwrap());
        let s = Subst::from_pairs([(x.clone(), Term::Var(y.clone()))]);
        let r = Subst::from_pairs([(y.clone(), zero.clone())]);
        let both = s.compose(&sig, &r);
        assert_eq!(both.get(&x), Some(&zero));
        assert_eq!(both.get(&y), Some(&zero));
        let t = Term::Var(x.clone());
        assert_eq!(both.apply(&sig, &t), r.apply(&sig, &s.apply(&sig, &t)));
        // right identity
        assert_eq!(s.compose(&sig, &Subst::identity()), s);
    }

    #[test]
    fn apply_collapses_identity_at_acu_nodes() {
        let (sig, nat) = small_sig();
        let plus = sig.symbol_by_name("_+_").unwrap();
        let zero = Term::constant(sig.symbol_by_name("0").unwrap());
        let n = Var::new("N", nat);
        let m = Var::new("M", nat);
        let t = sig.app(plus, vec![Term::Var(n.clone()), Term::Var(m.clone())]);
        let s = Subst::from_pairs([(n, zero)]);
        assert_eq!(s.apply(&sig, &t), Term::Var(m));
    }

    #[test]
    fn restrict_and_empty_apply() {
        let (sig, nat) = small_sig();
        let x = Var::new("x", nat);
        let y = Var::new("y", nat);
        let zero = Term::constant(sig.symbol_by_name("0").unwrap());
        let one = zero.clone();
        let s = Subst::from_pairs([(x.clone(), zero), (y.clone(), one)]);
        let only_x: std::collections::BTreeSet<_> = [x.clone()].into_iter().collect();
        let r = s.restrict(&only_x);
        assert_eq!(r.len(), 1);
        assert!(r.get(&y).is_none());
        let t = Term::Var(y.clone());
        assert_eq!(Subst::identity().apply(&sig, &t), t);
    }

    #[test]
    fn renaming_is_fresh_and_sort_preserving() {
        let (sig, nat) = small_sig();
        let mut session = Session::default();
        let x = Var::new("x", nat);
        let y = Var::new("y", nat);
        let w: BTreeSet<Var> = [x.clone(), y.clone()].into_iter().collect();
        let t = sig.app(
            sig.symbol_by_name("_+_").unwrap(),
            vec![Term::Var(x.clone()), Term::Var(y.clone())],
        );
        let (renamed, ren) = rename_term_away(&sig, &mut session, &t, &w);
        assert!(renamed.vars().is_disjoint(&w));
        assert!(ren.iter().all(|(v, t)| sig.least_sort(t) == v.sort));
        // renaming away from nothing leaves the term alone
        let (same, _) = rename_term_away(&sig, &mut session, &t, &BTreeSet::new());
        assert_eq!(same, t);
    }
}
