//! Sort finiteness classification.
//!
//! A sort is finite when ground enumeration saturates: one full round of
//! constructor applications over the closed value set produces nothing new,
//! which makes the set provably complete. When enumeration keeps growing,
//! a sort is classified infinite if it sits on a constructor cycle (or is
//! fed by one) and its own value set is still producing fresh values.
//! Everything else stays unknown and needs a user annotation.

use crate::limits::Session;
use crate::oracle::GroundEnum;
use crate::signature::{Role, SortId};
use crate::theory::{FiniteSortTable, Finiteness, Theory};

const CLASSIFY_ROUNDS: usize = 8;
const CLASSIFY_VALUE_CAP: usize = 400;

pub fn classify_sorts(
    theory: &Theory,
    annotations: &[(SortId, bool)],
    session: &mut Session,
) -> FiniteSortTable {
    let mut table = FiniteSortTable::default();
    let infra_sorts = [theory.infra.lit, theory.infra.conj];

    let mut en = GroundEnum::new();
    if en.grow(theory, session, CLASSIFY_ROUNDS, CLASSIFY_VALUE_CAP).is_err() {
        // normalization trouble during classification: leave all unknown
        for s in theory.sig.sort_ids() {
            if !infra_sorts.contains(&s) {
                table.map.insert(s, Finiteness::Unknown);
            }
        }
        apply_annotations(theory, session, annotations, &mut table);
        return table;
    }

    if en.saturated() {
        for s in theory.sig.sort_ids() {
            if infra_sorts.contains(&s) {
                continue;
            }
            table.map.insert(s, Finiteness::Finite(en.of_sort(theory, s, usize::MAX)));
        }
        apply_annotations(theory, session, annotations, &mut table);
        return table;
    }

    // constructor feed edges: a value of sort x can appear under a
    // constructor producing sort r
    let n = theory.sig.sort_count();
    let mut edge = vec![vec![false; n]; n];
    for f in theory.sig.symbol_ids() {
        let d = theory.sig.symbol(f);
        if d.infra || d.role == Role::Defined || d.arity() == 0 {
            continue;
        }
        for &a in &d.arg_sorts {
            for x in theory.sig.sort_ids() {
                if theory.sig.leq(x, a) {
                    edge[x.0 as usize][d.result.0 as usize] = true;
                }
            }
        }
    }
    // transitive closure
    let mut reach = edge.clone();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }

    let max_h = en.rounds_done().saturating_sub(1);
    let growing = |s: SortId| -> bool {
        let recent = en.of_sort(theory, s, max_h);
        let older = en.of_sort(theory, s, max_h.saturating_sub(3));
        recent.len() > older.len()
    };
    let quiet = |s: SortId| -> bool { !growing(s) };

    // infinite seeds: cycle sorts that still grow
    let mut infinite = vec![false; n];
    for s in theory.sig.sort_ids() {
        if reach[s.0 as usize][s.0 as usize] && growing(s) {
            infinite[s.0 as usize] = true;
        }
    }
    // propagate: subsort containment, and constructors fed by an infinite
    // argument whose result cone is still growing
    loop {
        let mut changed = false;
        for s in theory.sig.sort_ids() {
            if infinite[s.0 as usize] {
                continue;
            }
            let up = theory
                .sig
                .sort_ids()
                .any(|t| infinite[t.0 as usize] && theory.sig.leq(t, s));
            let fed = theory.sig.symbol_ids().any(|f| {
                let d = theory.sig.symbol(f);
                !d.infra
                    && d.role != Role::Defined
                    && d.arity() > 0
                    && theory.sig.leq(d.result, s)
                    && d.arg_sorts.iter().any(|&a| {
                        theory
                            .sig
                            .sort_ids()
                            .any(|x| theory.sig.leq(x, a) && infinite[x.0 as usize])
                    })
            });
            if up || (fed && growing(s)) {
                infinite[s.0 as usize] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    for s in theory.sig.sort_ids() {
        if infra_sorts.contains(&s) {
            continue;
        }
        let f = if infinite[s.0 as usize] {
            Finiteness::Infinite
        } else if quiet(s) {
            Finiteness::Finite(en.of_sort(theory, s, usize::MAX))
        } else {
            Finiteness::Unknown
        };
        table.map.insert(s, f);
    }
    apply_annotations(theory, session, annotations, &mut table);
    table
}

fn apply_annotations(
    theory: &Theory,
    session: &mut Session,
    annotations: &[(SortId, bool)],
    table: &mut FiniteSortTable,
) {
    for &(s, fin) in annotations {
        if fin {
            let reps = match table.map.get(&s) {
                Some(Finiteness::Finite(reps)) => reps.clone(),
                _ => {
                    let mut en = GroundEnum::new();
                    let _ = en.grow(theory, session, CLASSIFY_ROUNDS, CLASSIFY_VALUE_CAP);
                    en.of_sort(theory, s, usize::MAX)
                }
            };
            table.map.insert(s, Finiteness::Finite(reps));
        } else {
            table.map.insert(s, Finiteness::Infinite);
        }
    }
}
