//! Minimal non-negative solutions of a homogeneous linear Diophantine
//! equation, the counting core of elementary AC/ACU unification.
//!
//! Uses the Contejean-Devie breadth-first completion: grow candidate
//! vectors one unit at a time in a direction that moves the defect toward
//! zero, pruning anything componentwise above an already-found solution.
//! The component-sum cap makes exhaustion explicit instead of silent.

use std::collections::HashSet;

use crate::error::{EngineError, EngineResult};

/// All minimal non-zero solutions `x >= 0` of `sum coeffs[i] * x[i] == 0`.
pub fn minimal_basis(coeffs: &[i64], norm_cap: u32, basis_cap: usize) -> EngineResult<Vec<Vec<u32>>> {
    let n = coeffs.len();
    if n == 0 {
        return Ok(vec![]);
    }
    let defect = |q: &[u32]| -> i64 {
        q.iter()
            .zip(coeffs)
            .map(|(&x, &c)| x as i64 * c)
            .sum()
    };
    let mut basis: Vec<Vec<u32>> = Vec::new();
    let mut frontier: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut e = vec![0u32; n];
            e[i] = 1;
            e
        })
        .collect();
    let mut truncated = false;
    while !frontier.is_empty() {
        let mut next: Vec<Vec<u32>> = Vec::new();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for q in frontier {
            let s = defect(&q);
            if s == 0 {
                if !basis.iter().any(|b| dominated(b, &q)) {
                    basis.push(q);
                    if basis.len() > basis_cap {
                        return Err(EngineError::DiophCapExceeded { cap: basis_cap });
                    }
                }
                continue;
            }
            for i in 0..n {
                if coeffs[i] as i128 * s as i128 >= 0 {
                    continue;
                }
                let mut q2 = q.clone();
                q2[i] += 1;
                if q2.iter().sum::<u32>() > norm_cap {
                    truncated = true;
                    continue;
                }
                if basis.iter().any(|b| dominated(b, &q2)) {
                    continue;
                }
                if seen.insert(q2.clone()) {
                    next.push(q2);
                }
            }
        }
        frontier = next;
    }
    if truncated {
        return Err(EngineError::DiophCapExceeded { cap: norm_cap as usize });
    }
    Ok(basis)
}

/// `b <= q` componentwise with `b` nonzero.
fn dominated(b: &[u32], q: &[u32]) -> bool {
    b.iter().zip(q).all(|(&x, &y)| x <= y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_solutions(coeffs: &[i64], basis: &[Vec<u32>]) {
        for b in basis {
            let s: i64 = b.iter().zip(coeffs).map(|(&x, &c)| x as i64 * c).sum();
            assert_eq!(s, 0, "basis vector {:?} is not a solution", b);
            assert!(b.iter().any(|&x| x > 0));
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                if i != j {
                    assert!(!dominated(a, b), "{:?} dominates {:?}", a, b);
                }
            }
        }
    }

    /// Brute-force minimal solutions over a small box, as an independent
    /// check of the completion search.
    fn brute_minimal(coeffs: &[i64], bound: u32) -> Vec<Vec<u32>> {
        let n = coeffs.len();
        let mut all: Vec<Vec<u32>> = Vec::new();
        let mut v = vec![0u32; n];
        loop {
            let s: i64 = v.iter().zip(coeffs).map(|(&x, &c)| x as i64 * c).sum();
            if s == 0 && v.iter().any(|&x| x > 0) {
                all.push(v.clone());
            }
            // odometer
            let mut i = 0;
            loop {
                if i == n {
                    let minimal: Vec<Vec<u32>> = all
                        .iter()
                        .filter(|a| !all.iter().any(|b| *b != **a && dominated(b, a)))
                        .cloned()
                        .collect();
                    return minimal;
                }
                if v[i] < bound {
                    v[i] += 1;
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn x_plus_y_equals_w() {
        // x + y - w = 0
        let coeffs = [1, 1, -1];
        let mut basis = minimal_basis(&coeffs, 40, 4096).unwrap();
        check_solutions(&coeffs, &basis);
        basis.sort();
        assert_eq!(basis, vec![vec![0, 1, 1], vec![1, 0, 1]]);
    }

    #[test]
    fn doubled_variable_parity() {
        // 2a + b - 2c = 0: any solution has even b
        let coeffs = [2, 1, -2];
        let basis = minimal_basis(&coeffs, 40, 4096).unwrap();
        check_solutions(&coeffs, &basis);
        assert!(basis.iter().all(|b| b[1] % 2 == 0));
        let mut sorted = basis.clone();
        sorted.sort();
        let mut expected = brute_minimal(&coeffs, 4);
        expected.sort();
        assert_eq!(sorted, expected);
    }

    #[test]
    fn agrees_with_brute_force_on_small_systems() {
        let cases: Vec<Vec<i64>> = vec![
            vec![1, 1, -2],
            vec![1, 2, -3],
            vec![2, 3, -1, -4],
            vec![1, 1, -1, -1],
            vec![3, -2],
        ];
        for coeffs in cases {
            let mut basis = minimal_basis(&coeffs, 40, 4096).unwrap();
            check_solutions(&coeffs, &basis);
            basis.sort();
            let mut expected = brute_minimal(&coeffs, 6);
            expected.sort();
            assert_eq!(basis, expected, "coeffs {:?}", coeffs);
        }
    }

    #[test]
    fn cap_violation_is_reported() {
        let coeffs = [97, -89];
        // minimal solution is (89, 97): norm 186 exceeds a cap of 10
        assert!(matches!(
            minimal_basis(&coeffs, 10, 4096),
            Err(EngineError::DiophCapExceeded { .. })
        ));
    }
}
