//! Order-sorted terms in canonical form.
//!
//! Canonicalization bakes the structural axioms into the representation:
//! arguments of associative-commutative symbols are flattened into an n-ary
//! node and kept sorted under a fixed total term order, identity elements
//! are removed eagerly at ACU nodes, and commutative binary arguments are
//! sorted as well. Structural equality of canonical terms therefore decides
//! equality modulo the axioms.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::signature::{Signature, SortId, SymbolId};

/// A variable carries its sort in its identity: two variables with the same
/// name but different sorts are distinct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub sort: SortId,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: SortId) -> Self {
        Var { name: name.into(), sort }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    App(SymbolId, Vec<Term>),
}

/// Path of 0-based child indices; indices at AC nodes address the flattened
/// child list.
pub type Position = Vec<usize>;

impl Term {
    pub fn var(name: impl Into<String>, sort: SortId) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn constant(f: SymbolId) -> Term {
        Term::App(f, vec![])
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn top_symbol(&self) -> Option<SymbolId> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(*f),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn subterm_at(&self, pos: &[usize]) -> Option<&Term> {
        match pos.split_first() {
            None => Some(self),
            Some((&i, rest)) => match self {
                Term::Var(_) => None,
                Term::App(_, args) => args.get(i)?.subterm_at(rest),
            },
        }
    }

    /// All positions of the term, root first, in canonical child order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&mut Vec::new(), &mut out);
        out
    }

    fn collect_positions(&self, prefix: &mut Position, out: &mut Vec<Position>) {
        out.push(prefix.clone());
        if let Term::App(_, args) = self {
            for (i, a) in args.iter().enumerate() {
                prefix.push(i);
                a.collect_positions(prefix, out);
                prefix.pop();
            }
        }
    }

    /// Non-variable positions, root first.
    pub fn fun_positions(&self) -> Vec<Position> {
        self.positions()
            .into_iter()
            .filter(|p| !self.subterm_at(p).expect("own position").is_var())
            .collect()
    }
}

impl Signature {
    /// Least sort of a well-formed canonical term. Symbols are not
    /// overloaded, so this is the variable's sort or the top symbol's
    /// declared result sort.
    pub fn least_sort(&self, t: &Term) -> SortId {
        match t {
            Term::Var(v) => v.sort,
            Term::App(f, _) => self.symbol(*f).result,
        }
    }

    pub fn identity_term(&self, f: SymbolId) -> Option<Term> {
        self.symbol(f).class.identity().map(Term::constant)
    }

    /// Canonicalizing constructor. Panics on ill-sorted input: internal
    /// engines only build well-sorted terms once a theory has validated.
    pub fn app(&self, f: SymbolId, args: Vec<Term>) -> Term {
        match self.try_app(f, args) {
            Ok(t) => t,
            Err(msg) => panic!("ill-formed term construction: {msg}"),
        }
    }

    /// Canonicalizing constructor with sort checking, for user input paths.
    pub fn try_app(&self, f: SymbolId, args: Vec<Term>) -> Result<Term, String> {
        let decl = self.symbol(f);
        if decl.class.is_ac_like() {
            // Flatten nested same-symbol nodes, drop identity arguments.
            let mut flat = Vec::with_capacity(args.len());
            let identity = self.identity_term(f);
            let mut stack: Vec<Term> = args.into_iter().rev().collect();
            while let Some(a) = stack.pop() {
                match a {
                    Term::App(g, sub) if g == f => {
                        stack.extend(sub.into_iter().rev());
                    }
                    other => {
                        if Some(&other) != identity.as_ref() {
                            flat.push(other);
                        }
                    }
                }
            }
            match flat.len() {
                0 => {
                    return match identity {
                        Some(e) => Ok(e),
                        None => Err(format!("`{}` applied to no arguments", decl.name)),
                    }
                }
                1 => return Ok(flat.pop().expect("one element")),
                _ => {}
            }
            let arg_sort = decl.arg_sorts[0];
            for a in &flat {
                if !self.leq(self.least_sort(a), arg_sort) {
                    return Err(self.sort_error(decl, a, arg_sort));
                }
            }
            flat.sort_by(|a, b| self.term_cmp(a, b));
            Ok(Term::App(f, flat))
        } else {
            if args.len() != decl.arity() {
                return Err(format!(
                    "`{}` expects {} arguments, got {}",
                    decl.name,
                    decl.arity(),
                    args.len()
                ));
            }
            for (a, &s) in args.iter().zip(&decl.arg_sorts) {
                if !self.leq(self.least_sort(a), s) {
                    return Err(self.sort_error(decl, a, s));
                }
            }
            let mut args = args;
            if decl.class == crate::signature::AxiomClass::Comm
                && self.term_cmp(&args[0], &args[1]) == Ordering::Greater
            {
                args.swap(0, 1);
            }
            Ok(Term::App(f, args))
        }
    }

    fn sort_error(&self, decl: &crate::signature::SymbolDecl, arg: &Term, expected: SortId) -> String {
        format!(
            "argument `{}` of `{}` has sort {}, not <= {}",
            self.term_to_string(arg),
            decl.name,
            self.sort_name(self.least_sort(arg)),
            self.sort_name(expected)
        )
    }

    /// Fixed total order on canonical terms: variables before applications,
    /// variables by name then sort name, applications by symbol name, arity,
    /// then arguments lexicographically.
    pub fn term_cmp(&self, a: &Term, b: &Term) -> Ordering {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => x
                .name
                .cmp(&y.name)
                .then_with(|| self.sort_name(x.sort).cmp(self.sort_name(y.sort))),
            (Term::Var(_), Term::App(..)) => Ordering::Less,
            (Term::App(..), Term::Var(_)) => Ordering::Greater,
            (Term::App(f, xs), Term::App(g, ys)) => self
                .symbol(*f)
                .name
                .cmp(&self.symbol(*g).name)
                .then(xs.len().cmp(&ys.len()))
                .then_with(|| {
                    for (x, y) in xs.iter().zip(ys) {
                        let c = self.term_cmp(x, y);
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                }),
        }
    }

    /// Replace the subterm at `pos`, re-establishing canonical form along
    /// the way. The replacement must be pre-validated for sorts; positions
    /// inside the rebuilt term may shift when an AC parent re-sorts.
    pub fn replace_at(&self, t: &Term, pos: &[usize], u: Term) -> Option<Term> {
        match pos.split_first() {
            None => Some(u),
            Some((&i, rest)) => match t {
                Term::Var(_) => None,
                Term::App(f, args) => {
                    let child = args.get(i)?;
                    let new_child = self.replace_at(child, rest, u)?;
                    let mut new_args = args.clone();
                    new_args[i] = new_child;
                    Some(self.app(*f, new_args))
                }
            },
        }
    }

    /// Multiset view of a term under an AC symbol `f`: the flattened
    /// children when `f`-rooted, nothing when it is the ACU identity, and
    /// the singleton term otherwise.
    pub fn ac_args(&self, f: SymbolId, t: &Term) -> Vec<Term> {
        match t {
            Term::App(g, args) if *g == f => args.clone(),
            _ => {
                if self.identity_term(f).as_ref() == Some(t) {
                    vec![]
                } else {
                    vec![t.clone()]
                }
            }
        }
    }

    /// Rebuild a term from an AC multiset view.
    pub fn from_ac_args(&self, f: SymbolId, args: Vec<Term>) -> Term {
        match args.len() {
            0 => self.identity_term(f).expect("empty AC multiset requires an identity"),
            1 => args.into_iter().next().expect("one element"),
            _ => self.app(f, args),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{AxiomClass, Role, SymbolDecl};

    pub(crate) struct Fix {
        pub sig: Signature,
        pub nat: SortId,
        pub natset: SortId,
        pub zero: SymbolId,
        pub one: SymbolId,
        pub plus: SymbolId,
        pub union: SymbolId,
        pub smax: SymbolId,
    }

    pub(crate) fn natset_sig() -> Fix {
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
        Fix { sig, nat, natset, zero, one, plus, union, smax }
    }

    #[test]
    fn acu_identity_is_removed_eagerly() {
        let f = natset_sig();
        let zero = Term::constant(f.zero);
        let one = Term::constant(f.one);
        // 1 + 0 collapses to 1
        let t = f.sig.app(f.plus, vec![one.clone(), zero.clone()]);
        assert_eq!(t, one);
        // 0 + 0 collapses to 0
        let t = f.sig.app(f.plus, vec![zero.clone(), zero.clone()]);
        assert_eq!(t, zero);
    }

    #[test]
    fn ac_children_flatten_and_sort() {
        let f = natset_sig();
        let zero = Term::constant(f.zero);
        let one = Term::constant(f.one);
        let a = f.sig.app(f.union, vec![one.clone(), zero.clone()]);
        let b = f.sig.app(f.union, vec![zero.clone(), one.clone()]);
        assert_eq!(a, b);
        let nested = f.sig.app(f.union, vec![a.clone(), zero.clone()]);
        match &nested {
            Term::App(g, args) => {
                assert_eq!(*g, f.union);
                assert_eq!(args.len(), 3);
            }
            _ => panic!("expected flattened union"),
        }
        // flattening is idempotent: rebuilding the canonical children changes nothing
        if let Term::App(g, args) = &nested {
            assert_eq!(f.sig.app(*g, args.clone()), nested);
        }
    }

    #[test]
    fn comm_children_sort() {
        let f = natset_sig();
        let zero = Term::constant(f.zero);
        let one = Term::constant(f.one);
        let a = f.sig.app(f.smax, vec![one.clone(), zero.clone()]);
        let b = f.sig.app(f.smax, vec![zero, one]);
        assert_eq!(a, b);
    }

    #[test]
    fn least_sort_examples() {
        let f = natset_sig();
        let zero = Term::constant(f.zero);
        assert_eq!(f.sig.least_sort(&zero), f.nat);
        let one = Term::constant(f.one);
        let set = f.sig.app(f.union, vec![zero, one]);
        assert_eq!(f.sig.least_sort(&set), f.natset);
        let x = Term::var("x", f.nat);
        assert_eq!(f.sig.least_sort(&x), f.nat);
    }

    #[test]
    fn sort_checking_rejects_bad_args() {
        let f = natset_sig();
        let set = f.sig.app(
            f.union,
            vec![Term::constant(f.zero), Term::constant(f.one)],
        );
        // a NatSet argument under `_+_ : Nat Nat -> Nat` is ill-sorted
        assert!(f.sig.try_app(f.plus, vec![set, Term::constant(f.one)]).is_err());
    }

    #[test]
    fn positions_and_replace() {
        let f = natset_sig();
        let one = Term::constant(f.one);
        let two = f.sig.app(f.plus, vec![one.clone(), one.clone()]);
        let t = f.sig.app(f.smax, vec![one.clone(), two.clone()]);
        // canonical order puts the constant before the + node
        assert_eq!(t.subterm_at(&[1]), Some(&two));
        let replaced = f.sig.replace_at(&t, &[0], Term::constant(f.zero)).unwrap();
        assert_eq!(
            replaced,
            f.sig.app(f.smax, vec![Term::constant(f.zero), two.clone()])
        );
        // root replacement
        assert_eq!(f.sig.replace_at(&t, &[], one.clone()), Some(one.clone()));
        // root, both max arguments, and the two children of the + node
        assert_eq!(t.fun_positions().len(), 5);
    }
}
