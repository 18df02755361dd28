//! Quantifier-free formulas over equations and disequations.

use std::collections::BTreeSet;

use crate::term::{Term, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QfFormula {
    Eq(Term, Term),
    Neq(Term, Term),
    Not(Box<QfFormula>),
    And(Box<QfFormula>, Box<QfFormula>),
    Or(Box<QfFormula>, Box<QfFormula>),
    Implies(Box<QfFormula>, Box<QfFormula>),
    Iff(Box<QfFormula>, Box<QfFormula>),
}

impl QfFormula {
    pub fn not(f: QfFormula) -> QfFormula {
        QfFormula::Not(Box::new(f))
    }

    pub fn and(a: QfFormula, b: QfFormula) -> QfFormula {
        QfFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: QfFormula, b: QfFormula) -> QfFormula {
        QfFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: QfFormula, b: QfFormula) -> QfFormula {
        QfFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: QfFormula, b: QfFormula) -> QfFormula {
        QfFormula::Iff(Box::new(a), Box::new(b))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            QfFormula::Eq(a, b) | QfFormula::Neq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            QfFormula::Not(f) => f.collect_vars(out),
            QfFormula::And(a, b)
            | QfFormula::Or(a, b)
            | QfFormula::Implies(a, b)
            | QfFormula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

/// A conjunction of equations `G` and disequations `D`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Clause {
    pub eqs: Vec<(Term, Term)>,
    pub neqs: Vec<(Term, Term)>,
}

impl Clause {
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for (a, b) in self.eqs.iter().chain(&self.neqs) {
            a.collect_vars(&mut out);
            b.collect_vars(&mut out);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty() && self.neqs.is_empty()
    }
}
