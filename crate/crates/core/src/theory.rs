//! The theory model: a rewrite theory split into defined functions,
//! data constructors and predicate constructors, with structural axioms,
//! rewrite rules, negative constrained patterns, and sort-finiteness
//! information. Loading validates the admissibility conditions and reports
//! one structured diagnostic per violation.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::error::{Diagnostic, LoadError};
use crate::limits::Session;
use crate::signature::{AxiomClass, Role, Signature, SortId, SymbolId};
use crate::term::{Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleOrigin {
    /// Rule for a defined function.
    Delta,
    /// Rule between data constructors.
    OmegaC,
    /// Predicate rule `p(u1,...,un) -> tt`.
    Pi,
}

#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub lhs: Term,
    pub rhs: Term,
    pub label: Option<String>,
    pub origin: RuleOrigin,
}

/// A constrained negative pattern `/\ w_l =/= w'_l => p(v) =/= tt`
/// characterizing when predicate `p` fails to hold.
#[derive(Debug, Clone)]
pub struct NegativePattern {
    pub pred: SymbolId,
    pub args: Vec<Term>,
    pub constraint: Vec<(Term, Term)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finiteness {
    /// Canonical representatives, pairwise distinct modulo the axioms.
    Finite(Vec<Term>),
    Infinite,
    Unknown,
}

#[derive(Debug, Clone, Default)]
pub struct FiniteSortTable {
    pub map: BTreeMap<SortId, Finiteness>,
}

impl FiniteSortTable {
    pub fn get(&self, s: SortId) -> &Finiteness {
        self.map.get(&s).unwrap_or(&Finiteness::Unknown)
    }
}

/// Conjunction-term machinery: fresh sorts `Lit < Conj`, a binary
/// conjunction operator, and equality/disequality literal constructors at
/// each connected component of the user's sort poset.
#[derive(Debug, Clone)]
pub struct ConjInfra {
    pub lit: SortId,
    pub conj: SortId,
    pub and_op: SymbolId,
    /// (component top sort, `=` op, `=/=` op)
    pub eq_ops: Vec<(SortId, SymbolId, SymbolId)>,
}

/// Parser output prior to validation.
#[derive(Debug, Clone)]
pub struct RawTheory {
    pub sig: Signature,
    pub var_table: BTreeMap<String, SortId>,
    pub rules: Vec<(Term, Term, Option<String>)>,
    pub patterns: Vec<(SymbolId, Vec<Term>, Vec<(Term, Term)>)>,
    pub convergent: bool,
    /// (sort, is_finite) annotations
    pub finiteness_annotations: Vec<(SortId, bool)>,
}

/// A validated theory.
#[derive(Debug, Clone)]
pub struct Theory {
    pub sig: Signature,
    pub rules: Vec<RewriteRule>,
    pub patterns: Vec<NegativePattern>,
    pub var_table: BTreeMap<String, SortId>,
    pub pred_sort: Option<SortId>,
    pub tt: Option<SymbolId>,
    pub convergent: bool,
    pub finite: FiniteSortTable,
    pub infra: ConjInfra,
    /// Non-fatal condition reports from validation.
    pub warnings: Vec<Diagnostic>,
}

impl Theory {
    pub fn tt_term(&self) -> Option<Term> {
        self.tt.map(Term::constant)
    }

    pub fn is_predicate(&self, f: SymbolId) -> bool {
        self.sig.symbol(f).role == Role::Predicate
    }

    /// Is `t` built from constructor and predicate symbols only
    /// (an Omega-term)?
    pub fn is_ctor_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, args) => {
                let d = self.sig.symbol(*f);
                !d.infra
                    && d.role != Role::Defined
                    && args.iter().all(|a| self.is_ctor_term(a))
            }
        }
    }

    /// Is `t` built from non-predicate constructors only (an Omega_c-term)?
    pub fn is_ctor_c_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, args) => {
                self.sig.symbol(*f).role == Role::Constructor
                    && !self.sig.symbol(*f).infra
                    && args.iter().all(|a| self.is_ctor_c_term(a))
            }
        }
    }

    pub fn contains_predicate_symbol(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => false,
            Term::App(f, args) => {
                self.sig.symbol(*f).role == Role::Predicate
                    || args.iter().any(|a| self.contains_predicate_symbol(a))
            }
        }
    }

    pub fn contains_defined_symbol(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => false,
            Term::App(f, args) => {
                self.sig.symbol(*f).role == Role::Defined
                    || args.iter().any(|a| self.contains_defined_symbol(a))
            }
        }
    }

    /// Rules whose left-hand side is rooted at `f`.
    pub fn rules_for(&self, f: SymbolId) -> impl Iterator<Item = &RewriteRule> {
        self.rules
            .iter()
            .filter(move |r| r.lhs.top_symbol() == Some(f))
    }

    pub fn patterns_for(&self, p: SymbolId) -> impl Iterator<Item = &NegativePattern> {
        self.patterns.iter().filter(move |np| np.pred == p)
    }

    /// The equality/disequality literal constructors covering both sides'
    /// sorts, if the two sorts live under a common component top.
    pub fn literal_ops(&self, a: SortId, b: SortId) -> Option<(SymbolId, SymbolId)> {
        self.infra
            .eq_ops
            .iter()
            .find(|(top, _, _)| self.sig.leq(a, *top) && self.sig.leq(b, *top))
            .map(|(_, eq, neq)| (*eq, *neq))
    }

    /// Load and validate a parsed theory. The finite-sort table is computed
    /// afterwards by `finite::classify_sorts` (it needs the rewrite engine).
    pub fn from_raw(raw: RawTheory) -> Result<Theory, LoadError> {
        let mut diags: Vec<Diagnostic> = Vec::new();
        let mut warnings: Vec<Diagnostic> = Vec::new();
        let mut sig = raw.sig;

        let pred_sort = sig.sort_by_name("Pred");
        let tt = sig.symbol_by_name("tt");

        let has_preds = sig
            .symbol_ids()
            .any(|f| sig.symbol(f).role == Role::Predicate);

        // ---- symbol-level checks -------------------------------------
        for f in sig.symbol_ids().collect::<Vec<_>>() {
            let d = sig.symbol(f).clone();
            if d.infra {
                continue;
            }
            match d.class {
                AxiomClass::Comm => {
                    if d.arity() != 2 || d.arg_sorts[0] != d.arg_sorts[1] {
                        diags.push(Diagnostic::new(
                            "comm-shape",
                            format!("commutative operator `{}` must be binary with equal argument sorts", d.name),
                        ));
                    }
                }
                AxiomClass::AssocComm | AxiomClass::AssocCommId(_) => {
                    if d.arity() != 2
                        || d.arg_sorts[0] != d.arg_sorts[1]
                        || d.arg_sorts[0] != d.result
                    {
                        diags.push(Diagnostic::new(
                            "assoc-shape",
                            format!("associative operator `{}` must be binary with argument and result sorts equal", d.name),
                        ));
                    }
                    if let AxiomClass::AssocCommId(e) = d.class {
                        let ed = sig.symbol(e);
                        if ed.arity() != 0 {
                            diags.push(Diagnostic::new(
                                "id-shape",
                                format!("identity of `{}` must be a constant", d.name),
                            ));
                        } else if !sig.leq(ed.result, d.arg_sorts[0]) {
                            diags.push(Diagnostic::new(
                                "id-sort",
                                format!("identity `{}` of `{}` is not of the argument sort", ed.name, d.name),
                            ));
                        }
                        if d.role == Role::Defined {
                            diags.push(Diagnostic::new(
                                "id-on-defined",
                                format!(
                                    "identity axiom on defined function `{}` relates a variable to a non-variable term",
                                    d.name
                                ),
                            ));
                        }
                    }
                }
                AxiomClass::Free => {}
            }
            if d.role == Role::Predicate {
                match pred_sort {
                    Some(p) if d.result == p => {}
                    _ => diags.push(Diagnostic::new(
                        "pred-result",
                        format!("predicate `{}` must have result sort Pred", d.name),
                    )),
                }
                if d.class != AxiomClass::Free {
                    diags.push(Diagnostic::new(
                        "pred-axioms",
                        format!("predicate `{}` cannot carry structural axioms", d.name),
                    ));
                }
            }
            if let Some(p) = pred_sort {
                if d.arg_sorts.iter().any(|&s| sig.leq(s, p) || sig.leq(p, s)) {
                    diags.push(Diagnostic::new(
                        "pred-arg",
                        format!("operator `{}` takes arguments in the Pred component", d.name),
                    ));
                }
            }
        }

        if has_preds {
            if pred_sort.is_none() {
                diags.push(Diagnostic::new(
                    "missing-pred-sort",
                    "predicates are declared but there is no sort `Pred`",
                ));
            }
            match tt {
                Some(c) if sig.symbol(c).arity() == 0 && Some(sig.symbol(c).result) == pred_sort => {}
                _ => diags.push(Diagnostic::new(
                    "missing-tt",
                    "predicates are declared but there is no constant `tt : -> Pred`",
                )),
            }
        }

        // ---- sort inhabitation ---------------------------------------
        {
            let mut inhabited = vec![false; sig.sort_count()];
            loop {
                let mut changed = false;
                for f in sig.symbol_ids() {
                    let d = sig.symbol(f);
                    if d.infra {
                        continue;
                    }
                    if d.arg_sorts.iter().all(|&a| {
                        sig.sort_ids().any(|s| sig.leq(s, a) && inhabited[s.0 as usize])
                    }) {
                        for s in sig.sort_ids() {
                            if sig.leq(d.result, s) && !inhabited[s.0 as usize] {
                                inhabited[s.0 as usize] = true;
                                changed = true;
                            }
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            for s in sig.sort_ids() {
                if !inhabited[s.0 as usize] {
                    diags.push(Diagnostic::new(
                        "empty-sort",
                        format!("sort `{}` has no ground terms", sig.sort_name(s)),
                    ));
                }
            }
        }

        // ---- rules -----------------------------------------------------
        let mut rules: Vec<RewriteRule> = Vec::new();
        for (lhs, rhs, label) in &raw.rules {
            if lhs.is_var() {
                diags.push(Diagnostic::new(
                    "rule-var-lhs",
                    format!("rule left-hand side `{}` is a variable", sig.term_to_string(lhs)),
                ));
                continue;
            }
            let lv = lhs.vars();
            let rv = rhs.vars();
            if !rv.is_subset(&lv) {
                diags.push(Diagnostic::new(
                    "rule-extra-vars",
                    format!(
                        "rule `{} => {}` introduces variables on the right",
                        sig.term_to_string(lhs),
                        sig.term_to_string(rhs)
                    ),
                ));
                continue;
            }
            if !sig.leq(sig.least_sort(rhs), sig.least_sort(lhs)) {
                diags.push(Diagnostic::new(
                    "rule-sort",
                    format!(
                        "rule `{} => {}` is not sort-decreasing",
                        sig.term_to_string(lhs),
                        sig.term_to_string(rhs)
                    ),
                ));
                continue;
            }
            let top = lhs.top_symbol().expect("non-variable lhs");
            let origin = match sig.symbol(top).role {
                Role::Defined => RuleOrigin::Delta,
                Role::Constructor => RuleOrigin::OmegaC,
                Role::Predicate => RuleOrigin::Pi,
            };
            if origin == RuleOrigin::Pi {
                let tt_ok = tt.map(Term::constant).as_ref() == Some(rhs);
                if !tt_ok {
                    diags.push(Diagnostic::new(
                        "pi-rule-shape",
                        format!(
                            "predicate rule `{} => {}` must rewrite to tt",
                            sig.term_to_string(lhs),
                            sig.term_to_string(rhs)
                        ),
                    ));
                    continue;
                }
            }
            rules.push(RewriteRule { lhs: lhs.clone(), rhs: rhs.clone(), label: label.clone(), origin });
        }

        // ---- negative patterns -----------------------------------------
        let mut patterns: Vec<NegativePattern> = Vec::new();
        for (p, args, constraint) in &raw.patterns {
            if sig.symbol(*p).role != Role::Predicate {
                diags.push(Diagnostic::new(
                    "pattern-pred",
                    format!("negative pattern head `{}` is not a predicate", sig.symbol(*p).name),
                ));
                continue;
            }
            let head_vars: BTreeSet<Var> = args.iter().flat_map(|a| a.vars()).collect();
            let mut ok = true;
            for a in args {
                if !ctor_c_term(&sig, a) {
                    diags.push(Diagnostic::new(
                        "pattern-args",
                        format!(
                            "negative pattern argument `{}` is not a constructor term",
                            sig.term_to_string(a)
                        ),
                    ));
                    ok = false;
                }
            }
            for (w1, w2) in constraint {
                if !ctor_c_term(&sig, w1) || !ctor_c_term(&sig, w2) {
                    diags.push(Diagnostic::new(
                        "pattern-constraint",
                        "negative pattern constraint must be over constructor terms",
                    ));
                    ok = false;
                }
                let mut cv = w1.vars();
                cv.extend(w2.vars());
                if !cv.is_subset(&head_vars) {
                    diags.push(Diagnostic::new(
                        "pattern-constraint-vars",
                        "negative pattern constraint uses variables not in the pattern head",
                    ));
                    ok = false;
                }
            }
            if ok {
                patterns.push(NegativePattern { pred: *p, args: args.clone(), constraint: constraint.clone() });
            }
        }

        if !diags.is_empty() {
            return Err(LoadError { diagnostics: diags });
        }

        // ---- conjunction-term machinery ---------------------------------
        let user_sorts: Vec<SortId> = sig.sort_ids().collect();
        let mut tops: Vec<SortId> = Vec::new();
        for s in &user_sorts {
            for t in sig.component_tops(*s) {
                if !tops.contains(&t) {
                    tops.push(t);
                }
            }
        }
        let lit_name = if sig.sort_by_name("Lit").is_none() { "Lit" } else { "Lit#" };
        let conj_name = if sig.sort_by_name("Conj").is_none() { "Conj" } else { "Conj#" };
        let lit = sig.add_sort(lit_name);
        let conj = sig.add_sort(conj_name);
        sig.add_subsort(lit, conj);
        sig.close_subsorts().map_err(|d| LoadError::one(d))?;
        let and_op = sig
            .add_symbol(crate::signature::SymbolDecl {
                name: "_/\\_".into(),
                arg_sorts: vec![lit, conj],
                result: conj,
                class: AxiomClass::Free,
                role: Role::Constructor,
                prec: 60,
                infra: true,
            })
            .map_err(LoadError::one)?;
        let mut eq_ops = Vec::new();
        for &top in &tops {
            let base = sig.sort_name(top).to_string();
            let eq = sig
                .add_symbol(crate::signature::SymbolDecl {
                    name: format!("_=_#{}", base),
                    arg_sorts: vec![top, top],
                    result: lit,
                    class: AxiomClass::Free,
                    role: Role::Constructor,
                    prec: 50,
                    infra: true,
                })
                .map_err(LoadError::one)?;
            let neq = sig
                .add_symbol(crate::signature::SymbolDecl {
                    name: format!("_=/=_#{}", base),
                    arg_sorts: vec![top, top],
                    result: lit,
                    class: AxiomClass::Free,
                    role: Role::Constructor,
                    prec: 50,
                    infra: true,
                })
                .map_err(LoadError::one)?;
            eq_ops.push((top, eq, neq));
        }

        // Condition check: with predicates present, the Pred sort should not
        // be finite over the non-predicate constructors alone. Reported as a
        // warning; the finite-sort elimination handles the enumerable cases.
        if has_preds {
            if let (Some(p), Some(ttc)) = (pred_sort, tt) {
                let pred_ctors: Vec<SymbolId> = sig
                    .symbol_ids()
                    .filter(|&f| {
                        let d = sig.symbol(f);
                        !d.infra && d.role == Role::Constructor && sig.leq(d.result, p) && f != ttc
                    })
                    .collect();
                if pred_ctors.is_empty() {
                    warnings.push(Diagnostic::new(
                        "pred-sort-finite",
                        "the Pred sort has no non-predicate constructors besides tt; \
                         formulas must not use Pred-sorted variables",
                    ));
                }
            }
        }

        Ok(Theory {
            sig,
            rules,
            patterns,
            var_table: raw.var_table,
            pred_sort,
            tt,
            convergent: raw.convergent,
            finite: FiniteSortTable::default(),
            infra: ConjInfra { lit, conj, and_op, eq_ops },
            warnings,
        })
    }
}

/// Constructor-term check usable before a `Theory` value exists.
fn ctor_c_term(sig: &Signature, t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, args) => {
            sig.symbol(*f).role == Role::Constructor
                && !sig.symbol(*f).infra
                && args.iter().all(|a| ctor_c_term(sig, a))
        }
    }
}

/// Build a theory from raw parse output, including the finite-sort table.
pub fn load_theory(raw: RawTheory, session: &mut Session) -> Result<Theory, LoadError> {
    let annotations = raw.finiteness_annotations.clone();
    let mut theory = Theory::from_raw(raw)?;
    let table = crate::finite::classify_sorts(&theory, &annotations, session);
    theory.finite = table;
    Ok(theory)
}
