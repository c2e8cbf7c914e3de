//! 3SAT instances and their clausal partition.
//!
//! Every clause lives in a 3-variable cube ([`Triple`]) whose cells are
//! colored RED exactly where some hosted clause is falsified. Clauses on the
//! same variable set share a cube. Narrower clauses are padded into a cube
//! with the smallest other constrained variables; when an instance constrains
//! fewer than three variables, phantom ids above `num_vars` fill the gap.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::bitspace::{cellwise, Op, Partition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClausalError {
    #[error("literal refers to variable 0")]
    ZeroVariable,
    #[error("variable {var} exceeds the declared {num_vars} variables")]
    VariableOutOfRange { var: u32, num_vars: u32 },
    #[error("clause has {0} distinct variables; only up to 3 are supported")]
    TooWide(usize),
    #[error("clause variable {var} is not part of host triple {triple}")]
    OutsideTriple { var: u32, triple: Triple },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: u32) -> Self {
        Literal { var, negated: true }
    }

    /// From a signed DIMACS integer. Zero is not a literal.
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 {
            return None;
        }
        let var = u32::try_from(lit.unsigned_abs()).ok()?;
        Some(Literal { var, negated: lit < 0 })
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -i64::from(self.var)
        } else {
            i64::from(self.var)
        }
    }

    /// Whether `value` for this literal's variable satisfies it.
    pub fn satisfied_by(self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬u{}", self.var)
        } else {
            write!(f, "u{}", self.var)
        }
    }
}

/// A canonical disjunction of one to three literals over distinct
/// variables, sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.literals.iter().map(|l| l.var)
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    /// Evaluates under `value(var)`.
    pub fn eval(&self, mut value: impl FnMut(u32) -> bool) -> bool {
        self.literals.iter().any(|l| l.satisfied_by(value(l.var)))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∨ ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Canonical {
    Clause(Clause),
    Tautology,
    Empty,
}

/// Merges duplicate literals, sorts by variable and classifies the result.
pub fn canonicalize(raw: &[Literal], num_vars: u32) -> Result<Canonical, ClausalError> {
    for l in raw {
        if l.var == 0 {
            return Err(ClausalError::ZeroVariable);
        }
        if l.var > num_vars {
            return Err(ClausalError::VariableOutOfRange { var: l.var, num_vars });
        }
    }
    let mut literals = raw.to_vec();
    literals.sort_unstable();
    literals.dedup();
    if literals.is_empty() {
        return Ok(Canonical::Empty);
    }
    if literals.windows(2).any(|w| w[0].var == w[1].var) {
        return Ok(Canonical::Tautology);
    }
    if literals.len() > 3 {
        return Err(ClausalError::TooWide(literals.len()));
    }
    Ok(Canonical::Clause(Clause { literals }))
}

/// A SAT instance over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    num_vars: u32,
    clauses: Vec<Clause>,
    has_empty_clause: bool,
    tautologies_dropped: usize,
    unconstrained: BTreeSet<u32>,
}

impl Instance {
    /// Canonicalizes every raw clause. Tautologies are dropped and counted;
    /// an empty clause is remembered but not stored.
    pub fn new<I, C>(num_vars: u32, raw: I) -> Result<Self, ClausalError>
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[Literal]>,
    {
        let mut clauses = Vec::new();
        let mut has_empty_clause = false;
        let mut tautologies_dropped = 0;
        for c in raw {
            match canonicalize(c.as_ref(), num_vars)? {
                Canonical::Clause(c) => clauses.push(c),
                Canonical::Tautology => tautologies_dropped += 1,
                Canonical::Empty => has_empty_clause = true,
            }
        }
        Ok(Self::from_canonical(num_vars, clauses, has_empty_clause, tautologies_dropped))
    }

    /// Convenience constructor from signed DIMACS-style literals.
    pub fn from_dimacs_clauses(num_vars: u32, raw: &[Vec<i64>]) -> Result<Self, ClausalError> {
        let lits: Vec<Vec<Literal>> = raw
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| Literal::from_dimacs(l).ok_or(ClausalError::ZeroVariable))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        Self::new(num_vars, lits)
    }

    fn from_canonical(num_vars: u32, clauses: Vec<Clause>, has_empty_clause: bool, tautologies_dropped: usize) -> Self {
        let used: BTreeSet<u32> = clauses.iter().flat_map(|c| c.vars()).collect();
        let unconstrained = (1..=num_vars).filter(|v| !used.contains(v)).collect();
        Instance {
            num_vars,
            clauses,
            has_empty_clause,
            tautologies_dropped,
            unconstrained,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn has_empty_clause(&self) -> bool {
        self.has_empty_clause
    }

    pub fn tautologies_dropped(&self) -> usize {
        self.tautologies_dropped
    }

    pub fn unconstrained_vars(&self) -> &BTreeSet<u32> {
        &self.unconstrained
    }

    pub fn constrained_vars(&self) -> Vec<u32> {
        (1..=self.num_vars).filter(|v| !self.unconstrained.contains(v)).collect()
    }

    /// Evaluates the whole conjunction; variables above the assignment's
    /// range read as false.
    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        !self.has_empty_clause && self.clauses.iter().all(|c| c.eval(|v| assignment.value(v)))
    }
}

/// Truth values for variables `1..=len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn all_false(num_vars: u32) -> Self {
        Assignment {
            values: vec![false; num_vars as usize],
        }
    }

    /// Bit `v-1` of `bits` is variable `v`.
    pub fn from_bits(num_vars: u32, bits: u64) -> Self {
        Assignment {
            values: (0..num_vars).map(|i| (bits >> i) & 1 == 1).collect(),
        }
    }

    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn len(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, var: u32) -> bool {
        var >= 1 && self.values.get(var as usize - 1).copied().unwrap_or(false)
    }

    pub fn set(&mut self, var: u32, value: bool) {
        let i = var as usize - 1;
        if i >= self.values.len() {
            self.values.resize(i + 1, false);
        }
        self.values[i] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Signed DIMACS literals, one per variable.
    pub fn to_dimacs(&self) -> Vec<i64> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| if v { i as i64 + 1 } else { -(i as i64 + 1) })
            .collect()
    }
}

/// Three ascending variable ids naming a cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple([u32; 3]);

impl Triple {
    /// Sorts the ids; `None` if any repeat or is zero.
    pub fn new(mut vars: [u32; 3]) -> Option<Self> {
        vars.sort_unstable();
        (vars[0] >= 1 && vars[0] < vars[1] && vars[1] < vars[2]).then_some(Triple(vars))
    }

    pub fn vars(&self) -> &[u32; 3] {
        &self.0
    }

    pub fn contains(&self, var: u32) -> bool {
        self.0.contains(&var)
    }

    pub fn shared_with(&self, other: &Triple) -> usize {
        self.0.iter().filter(|v| other.contains(**v)).count()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Cell of `assignment` restricted to `triple`.
pub fn assignment_restriction(assignment: &Assignment, triple: Triple) -> usize {
    triple
        .vars()
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| acc | (usize::from(assignment.value(v)) << i))
}

/// Cells of `triple`'s cube on which `clause` is false.
pub fn forbidden_cells(clause: &Clause, triple: Triple) -> Result<Vec<usize>, ClausalError> {
    let mut falsifying = Vec::with_capacity(clause.width());
    for l in clause.literals() {
        let pos = triple
            .vars()
            .iter()
            .position(|&v| v == l.var)
            .ok_or(ClausalError::OutsideTriple { var: l.var, triple })?;
        falsifying.push((pos, l.negated));
    }
    // A cell falsifies the clause when every literal's coordinate carries
    // the opposite of the literal's polarity.
    Ok((0..8)
        .filter(|&cell| falsifying.iter().all(|&(pos, negated)| ((cell >> pos) & 1 == 1) == negated))
        .collect())
}

/// The clausal partition: one 8-cell cube per host triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClausalState {
    cubes: BTreeMap<Triple, Partition>,
    phantoms: Vec<u32>,
}

impl ClausalState {
    /// Assembles a state directly. Every cube must sit on its triple.
    pub fn from_cubes(cubes: BTreeMap<Triple, Partition>, phantoms: Vec<u32>) -> Self {
        for (t, p) in &cubes {
            assert_eq!(p.coords(), t.vars(), "cube coordinates must match its triple");
        }
        ClausalState { cubes, phantoms }
    }

    pub fn cubes(&self) -> &BTreeMap<Triple, Partition> {
        &self.cubes
    }

    pub fn cube(&self, t: &Triple) -> Option<&Partition> {
        self.cubes.get(t)
    }

    /// Replaces an existing cube. Panics if the triple is absent or the
    /// coordinates differ.
    pub fn replace(&mut self, t: Triple, p: Partition) -> Partition {
        assert_eq!(p.coords(), t.vars());
        std::mem::replace(self.cubes.get_mut(&t).expect("unknown triple"), p)
    }

    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.cubes.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Padding variables above `num_vars` that exist only to fill cubes.
    pub fn phantoms(&self) -> &[u32] {
        &self.phantoms
    }

    /// All variables appearing in some cube, ascending.
    pub fn covered_vars(&self) -> BTreeSet<u32> {
        self.cubes.keys().flat_map(|t| t.vars().iter().copied()).collect()
    }

    pub fn green_total(&self) -> usize {
        self.cubes.values().map(Partition::green_count).sum()
    }

    pub fn empty_cube(&self) -> Option<Triple> {
        self.cubes.iter().find(|(_, p)| p.is_all_red()).map(|(t, _)| *t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuildOutcome {
    Partitioned(ClausalState),
    /// The instance holds an empty clause.
    TriviallyUnsat,
}

impl BuildOutcome {
    pub fn state(self) -> Option<ClausalState> {
        match self {
            BuildOutcome::Partitioned(s) => Some(s),
            BuildOutcome::TriviallyUnsat => None,
        }
    }
}

/// Picks the cube that hosts `clause`, filling missing slots with the
/// smallest variables from `pool` that the clause does not mention.
pub fn host_triple(clause: &Clause, pool: &[u32]) -> Option<Triple> {
    let mut vars: Vec<u32> = clause.vars().collect();
    for &v in pool {
        if vars.len() == 3 {
            break;
        }
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    if vars.len() < 3 {
        return None;
    }
    Triple::new([vars[0], vars[1], vars[2]])
}

pub fn build_clausal_partition(instance: &Instance) -> BuildOutcome {
    if instance.has_empty_clause() {
        return BuildOutcome::TriviallyUnsat;
    }
    let mut pool = instance.constrained_vars();
    let mut phantoms = Vec::new();
    if !pool.is_empty() {
        while pool.len() < 3 {
            let id = instance.num_vars() + phantoms.len() as u32 + 1;
            phantoms.push(id);
            pool.push(id);
        }
    }
    let mut cubes: BTreeMap<Triple, Partition> = BTreeMap::new();
    for clause in instance.clauses() {
        let triple = host_triple(clause, &pool).expect("pool holds at least three variables");
        let forbidden = forbidden_cells(clause, triple).expect("host triple covers the clause");
        let clause_part = Partition::from_fn(triple.vars(), |cell| !forbidden.contains(&cell))
            .expect("triple coordinates are valid");
        let cube = cubes
            .entry(triple)
            .or_insert_with(|| Partition::all_green(triple.vars()).expect("triple coordinates are valid"));
        *cube = cellwise(Op::Bs, cube, &clause_part).expect("same triple");
    }
    BuildOutcome::Partitioned(ClausalState { cubes, phantoms })
}

/// Low byte of a cube's mask.
pub fn cube_mask(p: &Partition) -> u8 {
    debug_assert_eq!(p.dim(), 3);
    p.mask().expect("cube has three coordinates") as u8
}
