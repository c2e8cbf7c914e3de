use cubeprop_core::bitspace::{assemble, Op, Partition};
use cubeprop_core::clausal::{build_clausal_partition, cube_mask, ClausalState, Instance, Literal, Triple};
use cubeprop_core::dimacs::gen_random_3sat;
use cubeprop_core::oracle::{brute_force_sat, conjunction_truth_table, projected_solution_sets, truth_table_over};
use cubeprop_core::propagate::{bidirectional_fixpoint, extract_assignment, fixpoint, Options, Order, Verdict};
use proptest::prelude::*;

fn state(inst: &Instance) -> ClausalState {
    build_clausal_partition(inst).state().expect("no empty clause")
}

/// Random clauses of width 1..=3 so padding paths get exercised.
fn mixed_instance() -> impl Strategy<Value = Instance> {
    (3u32..=9).prop_flat_map(|n| {
        let lit = (1..=n, any::<bool>()).prop_map(|(var, negated)| Literal { var, negated });
        prop::collection::vec(prop::collection::vec(lit, 1..=3), 0..=3 * n as usize)
            .prop_map(move |cs| Instance::new(n, cs).unwrap())
    })
}

fn random_instance() -> impl Strategy<Value = Instance> {
    (4u32..=12, 0.5f64..7.0, any::<u64>()).prop_map(|(n, ratio, seed)| gen_random_3sat(n, (ratio * n as f64) as usize, seed).unwrap())
}

fn check_soundness(inst: &Instance) -> Result<(), TestCaseError> {
    let s = state(inst);
    let r = fixpoint(&s, &Options::full_closure(Order::Fifo));
    let triples: Vec<Triple> = s.triples().collect();
    let projected = projected_solution_sets(inst, &triples).unwrap();
    for (t, cells) in &projected {
        prop_assert!(cells.is_subset_of(r.fixpoint.cube(t).unwrap()), "cube {} lost a solution cell", t);
    }
    let oracle = brute_force_sat(inst).unwrap();
    if let Verdict::EmptyCube(_) = r.verdict {
        prop_assert!(!oracle.satisfiable);
    }
    prop_assert!(r.stats.changing_applications <= 8 * s.len());
    prop_assert_eq!(r.stats.cells_removed, s.green_total() - r.fixpoint.green_total());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sound_on_mixed_width(inst in mixed_instance()) {
        check_soundness(&inst)?;
    }

    #[test]
    fn sound_on_random_3sat(inst in random_instance()) {
        check_soundness(&inst)?;
    }

    #[test]
    fn orders_and_directions_agree(inst in random_instance(), seeds in prop::collection::vec(any::<u64>(), 3)) {
        let s = state(&inst);
        let base = fixpoint(&s, &Options::full_closure(Order::Fifo));
        for seed in seeds {
            prop_assert_eq!(&fixpoint(&s, &Options::full_closure(Order::Random(seed))).fixpoint, &base.fixpoint);
        }
        let bi = bidirectional_fixpoint(&s, &Options::full_closure(Order::Fifo));
        prop_assert_eq!(&bi.fixpoint, &base.fixpoint);
        // Early exit only shortens the run; the verdict is the same kind.
        let quick = fixpoint(&s, &Options::default());
        prop_assert_eq!(matches!(quick.verdict, Verdict::EmptyCube(_)), matches!(base.verdict, Verdict::EmptyCube(_)));
    }

    #[test]
    fn masks_only_shrink(inst in random_instance(), seed in any::<u64>()) {
        let s = state(&inst);
        let opts = Options { order: Order::Random(seed), early_exit: false, record_trace: true };
        let r = fixpoint(&s, &opts);
        for rec in &r.trace {
            prop_assert_eq!(rec.after & rec.before, rec.after);
        }
        for (t, p) in r.fixpoint.cubes() {
            let init = cube_mask(s.cube(t).unwrap());
            prop_assert_eq!(cube_mask(p) & init, cube_mask(p));
        }
    }

    #[test]
    fn verdict_matches_cube_emptiness(inst in random_instance()) {
        let r = fixpoint(&state(&inst), &Options::full_closure(Order::Fifo));
        match r.verdict {
            Verdict::EmptyCube(t) => prop_assert!(r.fixpoint.cube(&t).unwrap().is_all_red()),
            Verdict::NoEmptyCube => prop_assert!(r.fixpoint.cubes().values().all(|p| !p.is_all_red())),
        }
    }

    #[test]
    fn assembled_cubes_are_the_conjunction(inst in mixed_instance()) {
        let s = state(&inst);
        prop_assume!(!s.is_empty());
        let parts: Vec<Partition> = s.cubes().values().cloned().collect();
        let whole = assemble(&parts, Op::Bs).unwrap();
        let table = truth_table_over(&inst, whole.coords()).unwrap();
        prop_assert_eq!(&whole, &table);
        if s.phantoms().is_empty() {
            prop_assert_eq!(&whole, &conjunction_truth_table(&inst).unwrap());
        }
    }

    #[test]
    fn extracted_assignments_verify(inst in random_instance()) {
        let r = fixpoint(&state(&inst), &Options::default());
        if r.verdict == Verdict::NoEmptyCube {
            if let Some(x) = extract_assignment(&r, &inst).unwrap() {
                prop_assert!(x.verified);
                prop_assert!(inst.is_satisfied_by(&x.assignment));
            }
        }
    }
}

#[test]
fn empty_cube_neighbour_goes_red() {
    let mut clauses: Vec<Vec<i64>> = (0..8)
        .map(|m| (1..=3).map(|v| if (m >> (v - 1)) & 1 == 1 { -v } else { v }).collect())
        .collect();
    clauses.push(vec![2, 4, 5]);
    let inst = Instance::from_dimacs_clauses(5, &clauses).unwrap();
    let s = state(&inst);
    let t123 = Triple::new([1, 2, 3]).unwrap();
    let t245 = Triple::new([2, 4, 5]).unwrap();
    assert_eq!(fixpoint(&s, &Options::default()).verdict, Verdict::EmptyCube(t123));
    let full = fixpoint(&s, &Options::full_closure(Order::Fifo));
    assert!(full.fixpoint.cube(&t245).unwrap().is_all_red());
    let bi = bidirectional_fixpoint(&s, &Options::default());
    assert_eq!(bi.verdict, Verdict::EmptyCube(t123));
}

#[test]
fn chain_matches_projected_solutions() {
    // Units threaded through shared variables: u1 → u3 → u5 → u7.
    let inst = Instance::from_dimacs_clauses(
        8,
        &[
            vec![1, 1, 1],
            vec![-1, 2, 3],
            vec![-1, -2, 3],
            vec![-3, 4, 5],
            vec![-3, -4, 5],
            vec![-5, 6, 7],
            vec![-5, -6, 7],
            vec![-7, 8, -1],
        ],
    )
    .unwrap();
    let s = state(&inst);
    let r = fixpoint(&s, &Options::default());
    let triples: Vec<Triple> = s.triples().collect();
    let projected = projected_solution_sets(&inst, &triples).unwrap();
    for (t, cells) in projected {
        assert_eq!(&cells, r.fixpoint.cube(&t).unwrap(), "cube {t}");
    }
}

#[test]
fn parity_cycle_is_a_known_gap() {
    // x1+x2+x3=1, x1+x4+x5=0, x2+x4+x6=0, x3+x5+x6=0 (mod 2): every variable
    // sits in two cubes, so the equations sum to 0=1. Cubes meet in single
    // variables whose projections are full, so nothing propagates.
    let inst = Instance::from_dimacs_clauses(6, &parity_cycle()).unwrap();
    let r = fixpoint(&state(&inst), &Options::default());
    assert_eq!(r.verdict, Verdict::NoEmptyCube);
    assert_eq!(r.stats.changing_applications, 0);
    assert!(!brute_force_sat(&inst).unwrap().satisfiable);
    assert_eq!(extract_assignment(&r, &inst).unwrap(), None);
}

fn parity_cycle() -> Vec<Vec<i64>> {
    let eqs: [([i64; 3], u32); 4] = [([1, 2, 3], 1), ([1, 4, 5], 0), ([2, 4, 6], 0), ([3, 5, 6], 0)];
    let mut clauses = Vec::new();
    for (vars, parity) in eqs {
        // Forbid each assignment of the wrong parity.
        for m in 0u32..8 {
            if m.count_ones() % 2 != parity {
                clauses.push(
                    vars.iter()
                        .enumerate()
                        .map(|(i, &v)| if (m >> i) & 1 == 1 { -v } else { v })
                        .collect(),
                );
            }
        }
    }
    clauses
}
