//! Order-sorted signatures: a poset of sorts and a family of typed function
//! symbols, each tagged with its structural-axiom class and its role in the
//! constructor/defined/predicate partition.

use std::collections::BTreeSet;

use crate::error::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

/// Structural axioms attached to a symbol. Associativity without
/// commutativity is rejected at theory load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomClass {
    Free,
    /// Commutative only.
    Comm,
    /// Associative-commutative.
    AssocComm,
    /// Associative-commutative with an identity constant.
    AssocCommId(SymbolId),
}

impl AxiomClass {
    pub fn is_ac_like(self) -> bool {
        matches!(self, AxiomClass::AssocComm | AxiomClass::AssocCommId(_))
    }

    pub fn identity(self) -> Option<SymbolId> {
        match self {
            AxiomClass::AssocCommId(c) => Some(c),
            _ => None,
        }
    }
}

/// Role of a symbol in the theory split: defined functions are evaluated
/// away, constructors build the data values, predicates are the constructors
/// of sort `Pred` that carry negative patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Defined,
    Constructor,
    Predicate,
}

#[derive(Debug, Clone)]
pub struct SymbolDecl {
    pub name: String,
    pub arg_sorts: Vec<SortId>,
    pub result: SortId,
    pub class: AxiomClass,
    pub role: Role,
    /// Parsing precedence for mixfix uses; larger binds looser.
    pub prec: u32,
    /// Internal machinery (conjunction encoding); never user-visible.
    pub infra: bool,
}

impl SymbolDecl {
    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }

    /// Literal token segments of a mixfix template, split on `_`.
    /// `None` for plain prefix symbols.
    pub fn template(&self) -> Option<Vec<String>> {
        if self.name.contains('_') {
            Some(self.name.split('_').map(|s| s.to_string()).collect())
        } else {
            None
        }
    }

    pub fn is_infix(&self) -> bool {
        if self.arity() != 2 {
            return false;
        }
        match self.template() {
            Some(segs) => segs.len() == 3 && segs[0].is_empty() && !segs[1].is_empty() && segs[2].is_empty(),
            None => false,
        }
    }

    pub fn is_postfix(&self) -> bool {
        if self.arity() != 1 {
            return false;
        }
        match self.template() {
            Some(segs) => segs.len() == 2 && segs[0].is_empty() && !segs[1].is_empty(),
            None => false,
        }
    }
}

/// An order-sorted signature. Symbols are not overloaded: each name has one
/// declaration, so every well-formed term has a least sort given by its top
/// symbol (preregularity holds by construction).
#[derive(Debug, Clone, Default)]
pub struct Signature {
    sorts: Vec<String>,
    /// Declared subsort edges (lower, upper).
    edges: Vec<(SortId, SortId)>,
    /// Reflexive-transitive closure; `leq[a][b]` iff sort a <= sort b.
    leq: Vec<Vec<bool>>,
    symbols: Vec<SymbolDecl>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn add_sort(&mut self, name: &str) -> SortId {
        if let Some(id) = self.sort_by_name(name) {
            return id;
        }
        self.sorts.push(name.to_string());
        SortId(self.sorts.len() as u32 - 1)
    }

    pub fn add_subsort(&mut self, lower: SortId, upper: SortId) {
        if !self.edges.contains(&(lower, upper)) {
            self.edges.push((lower, upper));
        }
    }

    pub fn add_symbol(&mut self, decl: SymbolDecl) -> Result<SymbolId, Diagnostic> {
        if self.symbol_by_name(&decl.name).is_some() {
            return Err(Diagnostic::new(
                "duplicate-op",
                format!("operator `{}` is declared twice", decl.name),
            ));
        }
        let underscores = decl.name.chars().filter(|&c| c == '_').count();
        if underscores > 0 && underscores != decl.arity() {
            return Err(Diagnostic::new(
                "bad-template",
                format!(
                    "operator `{}` has {} underscores but {} arguments",
                    decl.name,
                    underscores,
                    decl.arity()
                ),
            ));
        }
        self.symbols.push(decl);
        Ok(SymbolId(self.symbols.len() as u32 - 1))
    }

    /// Recompute the reflexive-transitive subsort closure and check that it
    /// is a partial order.
    pub fn close_subsorts(&mut self) -> Result<(), Diagnostic> {
        let n = self.sorts.len();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
        }
        for &(lo, hi) in &self.edges {
            leq[lo.0 as usize][hi.0 as usize] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Diagnostic::new(
                        "subsort-cycle",
                        format!(
                            "subsort cycle between `{}` and `{}`",
                            self.sorts[i], self.sorts[j]
                        ),
                    ));
                }
            }
        }
        self.leq = leq;
        Ok(())
    }

    pub fn sort_count(&self) -> usize {
        self.sorts.len()
    }

    pub fn sort_name(&self, s: SortId) -> &str {
        &self.sorts[s.0 as usize]
    }

    pub fn sort_by_name(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s == name).map(|i| SortId(i as u32))
    }

    pub fn sort_ids(&self) -> impl Iterator<Item = SortId> {
        (0..self.sorts.len() as u32).map(SortId)
    }

    pub fn leq(&self, a: SortId, b: SortId) -> bool {
        self.leq[a.0 as usize][b.0 as usize]
    }

    /// Declared subsort edges, as written.
    pub fn subsort_edges(&self) -> impl Iterator<Item = (SortId, SortId)> + '_ {
        self.edges.iter().copied()
    }

    /// Maximal elements of the common lower cone of `a` and `b`.
    pub fn max_lower_bounds(&self, a: SortId, b: SortId) -> Vec<SortId> {
        if self.leq(a, b) {
            return vec![a];
        }
        if self.leq(b, a) {
            return vec![b];
        }
        let lower: Vec<SortId> = self
            .sort_ids()
            .filter(|&s| self.leq(s, a) && self.leq(s, b))
            .collect();
        lower
            .iter()
            .copied()
            .filter(|&s| !lower.iter().any(|&t| t != s && self.leq(s, t)))
            .collect()
    }

    /// Connected component of a sort under the symmetric closure of `<`.
    pub fn component_of(&self, s: SortId) -> BTreeSet<SortId> {
        let mut seen = BTreeSet::new();
        let mut work = vec![s];
        while let Some(x) = work.pop() {
            if !seen.insert(x) {
                continue;
            }
            for t in self.sort_ids() {
                if t != x && (self.leq(t, x) || self.leq(x, t)) && !seen.contains(&t) {
                    work.push(t);
                }
            }
        }
        seen
    }

    /// Maximal sorts of the component containing `s`.
    pub fn component_tops(&self, s: SortId) -> Vec<SortId> {
        let comp = self.component_of(s);
        comp.iter()
            .copied()
            .filter(|&x| !comp.iter().any(|&y| y != x && self.leq(x, y)))
            .collect()
    }

    pub fn symbol(&self, f: SymbolId) -> &SymbolDecl {
        &self.symbols[f.0 as usize]
    }

    pub fn symbol_by_name(&self, name: &str) -> Option<SymbolId> {
        self.symbols.iter().position(|d| d.name == name).map(|i| SymbolId(i as u32))
    }

    pub fn symbol_ids(&self) -> impl Iterator<Item = SymbolId> {
        (0..self.symbols.len() as u32).map(SymbolId)
    }

    pub fn constants_of_sort(&self, s: SortId) -> Vec<SymbolId> {
        self.symbol_ids()
            .filter(|&f| {
                let d = self.symbol(f);
                !d.infra && d.arity() == 0 && self.leq(d.result, s)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decl(name: &str, args: Vec<SortId>, result: SortId) -> SymbolDecl {
        SymbolDecl {
            name: name.to_string(),
            arg_sorts: args,
            result,
            class: AxiomClass::Free,
            role: Role::Constructor,
            prec: 30,
            infra: false,
        }
    }

    #[test]
    fn subsort_closure_is_transitive_and_reflexive() {
        let mut sig = Signature::new();
        let a = sig.add_sort("A");
        let b = sig.add_sort("B");
        let c = sig.add_sort("C");
        sig.add_subsort(a, b);
        sig.add_subsort(b, c);
        sig.close_subsorts().unwrap();
        assert!(sig.leq(a, a));
        assert!(sig.leq(a, c));
        assert!(!sig.leq(c, a));
    }

    #[test]
    fn subsort_cycle_is_rejected() {
        let mut sig = Signature::new();
        let a = sig.add_sort("A");
        let b = sig.add_sort("B");
        sig.add_subsort(a, b);
        sig.add_subsort(b, a);
        assert!(sig.close_subsorts().is_err());
    }

    #[test]
    fn max_lower_bounds_on_chain() {
        let mut sig = Signature::new();
        let nat = sig.add_sort("Nat");
        let natset = sig.add_sort("NatSet");
        sig.add_subsort(nat, natset);
        sig.close_subsorts().unwrap();
        assert_eq!(sig.max_lower_bounds(nat, natset), vec![nat]);
        assert_eq!(sig.max_lower_bounds(natset, natset), vec![natset]);
    }

    #[test]
    fn template_shapes() {
        let mut sig = Signature::new();
        let nat = sig.add_sort("Nat");
        let pred = sig.add_sort("Pred");
        sig.close_subsorts().unwrap();
        let plus = decl("_+_", vec![nat, nat], nat);
        assert!(plus.is_infix());
        let isnat = decl("_:Nat", vec![nat], pred);
        assert!(isnat.is_postfix());
        assert!(!decl("max", vec![nat, nat], nat).is_infix());
    }

    #[test]
    fn duplicate_symbol_rejected() {
        let mut sig = Signature::new();
        let nat = sig.add_sort("Nat");
        sig.close_subsorts().unwrap();
        sig.add_symbol(decl("0", vec![], nat)).unwrap();
        assert!(sig.add_symbol(decl("0", vec![], nat)).is_err());
    }
}
