//! Brute-force ground truth.
//!
//! Nothing here calls into the combination operators of
//! [`bitspace`](crate::bitspace); partitions are only constructed and read.
//! Satisfiability is decided by a depth-first walk over variables in
//! ascending order that checks each clause as soon as its largest variable is
//! fixed.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bitspace::{BitspaceError, Partition};
use crate::clausal::{Assignment, Instance, Triple};

/// Largest instance `brute_force_sat` will decide.
pub const DECIDE_LIMIT: u32 = 30;
/// Largest instance whose solutions are counted or projected.
pub const COUNT_LIMIT: u32 = 20;
/// Largest coordinate count for a full truth table.
pub const TABLE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{vars} variables exceeds the oracle limit of {limit}")]
    TooManyVariables { vars: usize, limit: usize },
    #[error("partitions on {left:?} and {right:?} share no coordinate")]
    Disjoint { left: Vec<u32>, right: Vec<u32> },
    #[error(transparent)]
    Bitspace(#[from] BitspaceError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub satisfiable: bool,
    pub witness: Option<Assignment>,
    /// Exact number of satisfying assignments over `1..=num_vars`; only
    /// computed up to [`COUNT_LIMIT`] variables.
    pub solution_count: Option<u64>,
}

/// Clause as (variable mask, falsifying values) over assignment bits.
#[derive(Clone, Copy)]
struct Packed {
    vars: u64,
    falsified_by: u64,
}

struct Search {
    num_vars: u32,
    /// Clauses grouped by their largest variable.
    closing: Vec<Vec<Packed>>,
}

impl Search {
    fn new(instance: &Instance, num_vars: u32) -> Self {
        let mut closing = vec![Vec::new(); num_vars as usize + 1];
        for c in instance.clauses() {
            let mut vars = 0u64;
            let mut falsified_by = 0u64;
            let mut top = 0;
            for l in c.literals() {
                let bit = 1u64 << (l.var - 1);
                vars |= bit;
                if l.negated {
                    falsified_by |= bit;
                }
                top = top.max(l.var);
            }
            closing[top as usize].push(Packed { vars, falsified_by });
        }
        Search { num_vars, closing }
    }

    fn consistent(&self, bits: u64, var: u32) -> bool {
        self.closing[var as usize].iter().all(|c| bits & c.vars != c.falsified_by)
    }

    /// Visits every satisfying assignment; `visit` returns false to stop.
    fn walk(&self, bits: u64, var: u32, visit: &mut impl FnMut(u64) -> bool) -> bool {
        if var > self.num_vars {
            return visit(bits);
        }
        for value in [false, true] {
            let next = if value { bits | (1 << (var - 1)) } else { bits };
            if self.consistent(next, var) && !self.walk(next, var + 1, visit) {
                return false;
            }
        }
        true
    }

    fn for_each_solution(&self, mut visit: impl FnMut(u64) -> bool) {
        self.walk(0, 1, &mut visit);
    }
}

fn guard(vars: usize, limit: usize) -> Result<(), OracleError> {
    if vars > limit {
        Err(OracleError::TooManyVariables { vars, limit })
    } else {
        Ok(())
    }
}

pub fn brute_force_sat(instance: &Instance) -> Result<OracleVerdict, OracleError> {
    let n = instance.num_vars();
    guard(n as usize, DECIDE_LIMIT as usize)?;
    if instance.has_empty_clause() {
        return Ok(OracleVerdict {
            satisfiable: false,
            witness: None,
            solution_count: (n <= COUNT_LIMIT).then_some(0),
        });
    }
    let search = Search::new(instance, n);
    let mut first = None;
    let mut count = 0u64;
    let counting = n <= COUNT_LIMIT;
    search.for_each_solution(|bits| {
        first.get_or_insert(bits);
        count += 1;
        counting
    });
    Ok(OracleVerdict {
        satisfiable: first.is_some(),
        witness: first.map(|b| Assignment::from_bits(n, b)),
        solution_count: counting.then_some(count),
    })
}

/// Reference semantics for the symmetric combination: a GREEN cell survives
/// iff some GREEN cell of the other partition agrees with it on every shared
/// coordinate.
pub fn join_semantics_oracle(p: &Partition, q: &Partition) -> Result<(Partition, Partition), OracleError> {
    let shared: Vec<u32> = p.coords().iter().filter(|c| q.coords().contains(c)).copied().collect();
    if shared.is_empty() {
        return Err(OracleError::Disjoint {
            left: p.coords().to_vec(),
            right: q.coords().to_vec(),
        });
    }
    Ok((supported(p, q, &shared)?, supported(q, p, &shared)?))
}

fn value_of(part: &Partition, cell: usize, var: u32) -> bool {
    let pos = part.coords().iter().position(|&c| c == var).unwrap();
    (cell >> pos) & 1 == 1
}

fn supported(p: &Partition, q: &Partition, shared: &[u32]) -> Result<Partition, OracleError> {
    let out = Partition::from_fn(p.coords(), |pc| {
        p.is_green(pc)
            && (0..q.num_cells()).any(|qc| q.is_green(qc) && shared.iter().all(|&v| value_of(p, pc, v) == value_of(q, qc, v)))
    })?;
    Ok(out)
}

/// For each triple, the set of cells hit by some satisfying assignment.
/// Variables beyond `num_vars` (padding) are free.
pub fn projected_solution_sets(instance: &Instance, triples: &[Triple]) -> Result<BTreeMap<Triple, Partition>, OracleError> {
    let top = triples
        .iter()
        .flat_map(|t| t.vars().iter().copied())
        .max()
        .unwrap_or(0)
        .max(instance.num_vars());
    guard(top as usize, COUNT_LIMIT as usize)?;
    let mut sets: BTreeMap<Triple, u8> = triples.iter().map(|&t| (t, 0u8)).collect();
    if !instance.has_empty_clause() {
        let search = Search::new(instance, top);
        search.for_each_solution(|bits| {
            for (t, set) in sets.iter_mut() {
                let cell = t
                    .vars()
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (i, &v)| acc | (((bits >> (v - 1)) & 1) << i));
                *set |= 1 << cell;
            }
            true
        });
    }
    sets.into_iter()
        .map(|(t, m)| Ok((t, Partition::from_mask(t.vars(), u64::from(m))?)))
        .collect()
}

/// Truth table of the whole conjunction over its constrained variables, or
/// over all variables when no clause constrains any.
pub fn conjunction_truth_table(instance: &Instance) -> Result<Partition, OracleError> {
    let mut coords = instance.constrained_vars();
    if coords.is_empty() {
        coords = (1..=instance.num_vars()).collect();
    }
    truth_table_over(instance, &coords)
}

/// Truth table of the conjunction over `coords`, which must include every
/// constrained variable.
pub fn truth_table_over(instance: &Instance, coords: &[u32]) -> Result<Partition, OracleError> {
    guard(coords.len(), TABLE_LIMIT)?;
    let table = Partition::from_fn(coords, |cell| {
        let value = |v: u32| match coords.iter().position(|&c| c == v) {
            Some(i) => (cell >> i) & 1 == 1,
            None => false,
        };
        !instance.has_empty_clause() && instance.clauses().iter().all(|c| c.eval(value))
    })?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: u32, clauses: &[Vec<i64>]) -> Instance {
        Instance::from_dimacs_clauses(n, clauses).unwrap()
    }

    fn all_polarities() -> Vec<Vec<i64>> {
        (0..8)
            .map(|m| (1..=3).map(|v| if (m >> (v - 1)) & 1 == 1 { -v } else { v }).collect())
            .collect()
    }

    #[test]
    fn brute_force_examples() {
        let v = brute_force_sat(&inst(3, &[vec![1, 2, 3]])).unwrap();
        assert!(v.satisfiable);
        assert_eq!(v.solution_count, Some(7));
        assert!(inst(3, &[vec![1, 2, 3]]).is_satisfied_by(v.witness.as_ref().unwrap()));

        let v = brute_force_sat(&inst(3, &all_polarities())).unwrap();
        assert!(!v.satisfiable);
        assert_eq!(v.witness, None);
        assert_eq!(v.solution_count, Some(0));

        let v = brute_force_sat(&inst(3, &[])).unwrap();
        assert_eq!(v.solution_count, Some(8));

        let v = brute_force_sat(&inst(3, &[vec![1], vec![]])).unwrap();
        assert!(!v.satisfiable);
    }

    #[test]
    fn brute_force_guards() {
        assert_eq!(
            brute_force_sat(&inst(31, &[])),
            Err(OracleError::TooManyVariables { vars: 31, limit: 30 })
        );
        let v = brute_force_sat(&inst(25, &[vec![1, 2, 3]])).unwrap();
        assert!(v.satisfiable);
        assert_eq!(v.solution_count, None);
    }

    #[test]
    fn brute_force_matches_naive_enumeration() {
        let clauses = vec![vec![1, -2, 4], vec![-1, 3, 5], vec![2, -3, -5], vec![-4, 5, 1], vec![-1, -2, -3]];
        let i = inst(5, &clauses);
        let naive = (0u64..32).filter(|&b| i.is_satisfied_by(&Assignment::from_bits(5, b))).count() as u64;
        assert_eq!(brute_force_sat(&i).unwrap().solution_count, Some(naive));
    }

    #[test]
    fn join_oracle_examples() {
        let g = Partition::all_green(&[1, 2, 3]).unwrap();
        let h = Partition::all_green(&[2, 3, 4]).unwrap();
        assert_eq!(join_semantics_oracle(&g, &h).unwrap(), (g.clone(), h.clone()));

        let (p, _) = join_semantics_oracle(&g, &Partition::all_red(&[2, 3, 4]).unwrap()).unwrap();
        assert!(p.is_all_red());

        let left = Partition::from_mask(&[1, 2, 3], 0xFC).unwrap();
        let (a, b) = join_semantics_oracle(&left, &h).unwrap();
        assert_eq!(a, left);
        assert_eq!(b.mask(), Some(0xEE));

        assert!(matches!(
            join_semantics_oracle(&g, &Partition::all_green(&[5]).unwrap()),
            Err(OracleError::Disjoint { .. })
        ));
    }

    #[test]
    fn projected_sets_examples() {
        let t = Triple::new([1, 2, 3]).unwrap();
        let sets = projected_solution_sets(&inst(3, &all_polarities()), &[t]).unwrap();
        assert!(sets[&t].is_all_red());

        let sets = projected_solution_sets(&inst(3, &[vec![-1, 2, -3]]), &[t]).unwrap();
        assert_eq!(sets[&t].mask(), Some(0xDF));

        // Padding variable 3 is free.
        let sets = projected_solution_sets(&inst(2, &[vec![1], vec![2]]), &[t]).unwrap();
        assert_eq!(sets[&t].mask(), Some(0x88));

        assert!(projected_solution_sets(&inst(21, &[]), &[t]).is_err());
    }

    #[test]
    fn truth_table_examples() {
        assert!(conjunction_truth_table(&inst(2, &[])).unwrap().is_all_green());
        assert_eq!(conjunction_truth_table(&inst(2, &[])).unwrap().num_cells(), 4);
        let tt = conjunction_truth_table(&inst(4, &[vec![-1, 2, -3]])).unwrap();
        assert_eq!(tt.coords(), &[1, 2, 3]);
        assert_eq!(tt.mask(), Some(0xDF));
        let units: Vec<Vec<i64>> = (1..=17).map(|v| vec![v]).collect();
        assert_eq!(
            conjunction_truth_table(&inst(17, &units)),
            Err(OracleError::TooManyVariables { vars: 17, limit: 16 })
        );
    }
}
