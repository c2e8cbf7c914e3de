//! The `verify` property battery.
//!
//! Coverage in `--quick` mode: the exhaustive mask-pair laws check every
//! 16th ordered pair (4 096 of 65 536 per layout); instance laws run on a
//! quarter of the instances at smaller sizes.

use cubeprop_core::bitspace::{self, assemble, bs, impose, lift, project, ws, BitspaceError, Color, Op, Partition};
use cubeprop_core::clausal::{build_clausal_partition, ClausalState, Instance, Triple};
use cubeprop_core::dimacs::gen_random_3sat;
use cubeprop_core::oracle::{brute_force_sat, conjunction_truth_table, join_semantics_oracle, projected_solution_sets};
use cubeprop_core::propagate::{bidirectional_fixpoint, fixpoint, Options, Order, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::Fault;

pub type BcFn = fn(&Partition, &Partition) -> Result<(Partition, Partition), BitspaceError>;

/// Forgets to impose the meet on its second operand.
fn broken_bc(p: &Partition, q: &Partition) -> Result<(Partition, Partition), BitspaceError> {
    let (a, _) = bitspace::bc(p, q)?;
    Ok((a, q.clone()))
}

#[derive(Debug, Clone, Serialize)]
pub struct LawResult {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    /// First few failing cases.
    pub examples: Vec<String>,
}

impl LawResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub quick: bool,
    pub seed: u64,
    pub laws: Vec<LawResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(LawResult::passed)
    }
}

struct Law {
    result: LawResult,
}

impl Law {
    fn new(name: &'static str) -> Self {
        Law {
            result: LawResult {
                name,
                cases: 0,
                failures: 0,
                examples: Vec::new(),
            },
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.result.cases += 1;
        if !ok {
            self.result.failures += 1;
            if self.result.examples.len() < 5 {
                self.result.examples.push(describe());
            }
        }
    }
}

pub struct Config {
    pub quick: bool,
    pub seed: u64,
    pub fault: Option<Fault>,
}

pub fn run(cfg: &Config) -> VerifyReport {
    let bc: BcFn = match cfg.fault {
        Some(Fault::Bc) => broken_bc,
        None => bitspace::bc,
    };
    let stride = if cfg.quick { 16 } else { 1 };
    let scale = if cfg.quick { 4 } else { 1 };
    let instances = random_instances(cfg.seed, 100 / scale, if cfg.quick { 12 } else { 16 });
    let laws = vec![
        algebra_axioms(),
        bc_against_oracle("bc_equals_join_oracle_overlap2", bc, [1, 2, 3], [2, 3, 4], stride),
        bc_against_oracle("bc_equals_join_oracle_overlap1", bc, [1, 2, 3], [3, 4, 5], stride),
        project_lift_impose_laws(),
        whole_instance_equivalence(&instances),
        uni_equals_bi(&instances),
        confluence(&instances[..instances.len() / 2], cfg.seed),
        soundness(cfg.seed, 500 / scale, if cfg.quick { 14 } else { 20 }),
    ];
    VerifyReport {
        quick: cfg.quick,
        seed: cfg.seed,
        laws: laws.into_iter().map(|l| l.result).collect(),
    }
}

fn algebra_axioms() -> Law {
    let mut law = Law::new("algebra_axioms");
    let c = Color::ALL;
    for a in c {
        law.check(ws(a, Color::Red) == a, || format!("RED is not a WS identity for {a:?}"));
        law.check(bs(a, Color::Green) == a, || format!("GREEN is not a BS identity for {a:?}"));
        law.check(bs(a, Color::Red) == Color::Red, || format!("RED does not absorb {a:?} under BS"));
        for b in c {
            law.check(ws(a, b) == ws(b, a), || format!("WS not commutative on {a:?},{b:?}"));
            law.check(bs(a, b) == bs(b, a), || format!("BS not commutative on {a:?},{b:?}"));
            for d in c {
                law.check(ws(ws(a, b), d) == ws(a, ws(b, d)), || format!("WS not associative on {a:?},{b:?},{d:?}"));
                law.check(bs(bs(a, b), d) == bs(a, bs(b, d)), || format!("BS not associative on {a:?},{b:?},{d:?}"));
                law.check(bs(a, ws(b, d)) == ws(bs(a, b), bs(a, d)), || format!("BS does not distribute over WS on {a:?},{b:?},{d:?}"));
                law.check(ws(a, bs(b, d)) == bs(ws(a, b), ws(a, d)), || format!("WS does not distribute over BS on {a:?},{b:?},{d:?}"));
            }
        }
    }
    law
}

fn bc_against_oracle(name: &'static str, bc: BcFn, pc: [u32; 3], qc: [u32; 3], stride: usize) -> Law {
    let mut law = Law::new(name);
    for pair in (0..65_536usize).step_by(stride) {
        let (pm, qm) = ((pair >> 8) as u64, (pair & 0xFF) as u64);
        let p = Partition::from_mask(&pc, pm).unwrap();
        let q = Partition::from_mask(&qc, qm).unwrap();
        let got = bc(&p, &q).unwrap();
        let want = join_semantics_oracle(&p, &q).unwrap();
        law.check(got == want, || format!("masks {pm:#04x},{qm:#04x}: bc {got:?} vs oracle {want:?}"));
    }
    law
}

fn project_lift_impose_laws() -> Law {
    let mut law = Law::new("project_lift_impose");
    let coords = [1u32, 2, 3];
    let subsets: Vec<Vec<u32>> = (1u32..8)
        .map(|s| coords.iter().enumerate().filter(|(i, _)| (s >> i) & 1 == 1).map(|(_, &c)| c).collect())
        .collect();
    for m in 0..256u64 {
        let p = Partition::from_mask(&coords, m).unwrap();
        for sub in &subsets {
            let down = project(&p, sub).unwrap();
            let back = lift(&down, &coords).unwrap();
            law.check(p.is_subset_of(&back), || format!("lift∘project shrank {p} on {sub:?}"));
            law.check(project(&back, sub).unwrap() == down, || format!("project∘lift changed {down}"));
            law.check(impose(&p, &down).unwrap() == p, || format!("imposing own shadow changed {p}"));
            let smaller = Partition::from_mask(&coords, m & 0x5A).unwrap();
            law.check(project(&smaller, sub).unwrap().is_subset_of(&down), || format!("projection not monotone on {p}"));
            for fm in 0..(1u64 << (1 << sub.len())) {
                let face = Partition::from_mask(sub, fm).unwrap();
                law.check(impose(&p, &face).unwrap().is_subset_of(&p), || format!("impose grew {p} with {face}"));
            }
        }
    }
    law
}

fn random_instances(seed: u64, count: usize, max_n: u32) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(6..=max_n);
            let ratio = rng.gen_range(1.0..6.0);
            gen_random_3sat(n, (ratio * n as f64).round() as usize, rng.gen()).unwrap()
        })
        .collect()
}

fn state_of(inst: &Instance) -> ClausalState {
    build_clausal_partition(inst).state().expect("random instances have no empty clause")
}

fn whole_instance_equivalence(instances: &[Instance]) -> Law {
    let mut law = Law::new("assembled_cubes_equal_truth_table");
    for inst in instances {
        let s = state_of(inst);
        if s.is_empty() {
            continue;
        }
        let parts: Vec<Partition> = s.cubes().values().cloned().collect();
        let whole = assemble(&parts, Op::Bs).unwrap();
        let table = conjunction_truth_table(inst).unwrap();
        law.check(whole == table, || format!("{} vars / {} clauses", inst.num_vars(), inst.clauses().len()));
    }
    law
}

fn uni_equals_bi(instances: &[Instance]) -> Law {
    let mut law = Law::new("unidirectional_equals_bidirectional");
    for inst in instances {
        let s = state_of(inst);
        let uni = fixpoint(&s, &Options::full_closure(Order::Fifo));
        let bi = bidirectional_fixpoint(&s, &Options::full_closure(Order::Fifo));
        law.check(uni.fixpoint == bi.fixpoint, || format!("{} vars / {} clauses", inst.num_vars(), inst.clauses().len()));
        law.check(uni.stats.changing_applications <= 8 * s.len(), || "termination bound exceeded".into());
    }
    law
}

fn confluence(instances: &[Instance], seed: u64) -> Law {
    let mut law = Law::new("confluence");
    for (i, inst) in instances.iter().enumerate() {
        let s = state_of(inst);
        let base = fixpoint(&s, &Options::full_closure(Order::Fifo));
        for k in 0..4u64 {
            let order = Order::Random(seed ^ ((i as u64) << 8) ^ k);
            let r = fixpoint(&s, &Options::full_closure(order));
            law.check(r.fixpoint == base.fixpoint, || format!("instance {i} differs under {order:?}"));
            law.check(r.stats.changing_applications <= 8 * s.len(), || "termination bound exceeded".into());
        }
    }
    law
}

fn soundness(seed: u64, count: usize, max_n: u32) -> Law {
    let mut law = Law::new("soundness");
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    for _ in 0..count {
        let n = rng.gen_range(12..=max_n);
        let ratio = rng.gen_range(1.0..=6.0);
        let inst = gen_random_3sat(n, (ratio * n as f64).round() as usize, rng.gen()).unwrap();
        let s = state_of(&inst);
        let r = fixpoint(&s, &Options::full_closure(Order::Fifo));
        let triples: Vec<Triple> = s.triples().collect();
        let projected = projected_solution_sets(&inst, &triples).unwrap();
        let lost = projected.iter().find(|(t, cells)| !cells.is_subset_of(r.fixpoint.cube(t).unwrap()));
        law.check(lost.is_none(), || format!("n={n}: solution cell lost in cube {}", lost.unwrap().0));
        if let Verdict::EmptyCube(t) = r.verdict {
            let sat = brute_force_sat(&inst).unwrap().satisfiable;
            law.check(!sat, || format!("n={n}: empty cube {t} on a satisfiable instance"));
        }
    }
    law
}

pub fn render(report: &VerifyReport) -> String {
    let mut out = String::new();
    for law in &report.laws {
        let status = if law.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status} {:<40} {:>8} cases {:>6} failures\n", law.name, law.cases, law.failures));
        for e in &law.examples {
            out.push_str(&format!("     {e}\n"));
        }
    }
    out
}
