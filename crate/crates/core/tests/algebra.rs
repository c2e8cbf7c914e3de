use cubeprop_core::bitspace::{assemble, bc, bc_uni, bs, cellwise, cross, impose, lift, project, ws, Color, Op, Partition};
use cubeprop_core::oracle::join_semantics_oracle;
use proptest::prelude::*;

const C: [Color; 2] = Color::ALL;

#[test]
fn operator_laws_exhaustive() {
    for a in C {
        for b in C {
            assert_eq!(ws(a, b), ws(b, a));
            assert_eq!(bs(a, b), bs(b, a));
            assert!(C.contains(&ws(a, b)) && C.contains(&bs(a, b)));
            // absorption
            assert_eq!(ws(a, bs(a, b)), a);
            assert_eq!(bs(a, ws(a, b)), a);
            for c in C {
                assert_eq!(ws(ws(a, b), c), ws(a, ws(b, c)));
                assert_eq!(bs(bs(a, b), c), bs(a, bs(b, c)));
                assert_eq!(bs(a, ws(b, c)), ws(bs(a, b), bs(a, c)));
                assert_eq!(ws(a, bs(b, c)), bs(ws(a, b), ws(a, c)));
            }
        }
        assert_eq!(ws(a, Color::Red), a);
        assert_eq!(bs(a, Color::Green), a);
        assert_eq!(bs(a, Color::Red), Color::Red);
        assert_eq!(ws(a, Color::Green), Color::Green);
        assert_eq!(ws(a, a), a);
        assert_eq!(bs(a, a), a);
    }
    assert_eq!(Op::Ws.identity(), Color::Red);
    assert_eq!(Op::Bs.identity(), Color::Green);
}

fn cube(coords: [u32; 3]) -> impl Strategy<Value = Partition> {
    (0u64..256).prop_map(move |m| Partition::from_mask(&coords, m).unwrap())
}

#[test]
fn uni_iterated_matches_bc_iterated_all_pairs() {
    let (pc, qc) = ([1, 2, 3], [2, 3, 4]);
    for pm in 0..256u64 {
        for qm in 0..256u64 {
            let p0 = Partition::from_mask(&pc, pm).unwrap();
            let q0 = Partition::from_mask(&qc, qm).unwrap();
            let (mut p, mut q) = (p0.clone(), q0.clone());
            loop {
                let np = bc_uni(&p, &q).unwrap();
                let nq = bc_uni(&q, &np).unwrap();
                if np == p && nq == q {
                    break;
                }
                p = np;
                q = nq;
            }
            let (mut bp, mut bq) = (p0, q0);
            loop {
                let (np, nq) = bc(&bp, &bq).unwrap();
                if np == bp && nq == bq {
                    break;
                }
                bp = np;
                bq = nq;
            }
            assert_eq!((p, q), (bp, bq), "masks {pm:#04x} {qm:#04x}");
        }
    }
}

#[test]
fn bc_matches_join_oracle_on_mixed_dimensions() {
    // A 2-space against a 3-space sharing one coordinate, and a 1-space
    // fully inside a 3-space.
    for pm in 0..16u64 {
        for qm in 0..256u64 {
            let p = Partition::from_mask(&[1, 5], pm).unwrap();
            let q = Partition::from_mask(&[2, 5, 7], qm).unwrap();
            assert_eq!(bc(&p, &q).unwrap(), join_semantics_oracle(&p, &q).unwrap());
        }
    }
    for pm in 0..4u64 {
        for qm in 0..256u64 {
            let p = Partition::from_mask(&[5], pm).unwrap();
            let q = Partition::from_mask(&[2, 5, 7], qm).unwrap();
            assert_eq!(bc(&p, &q).unwrap(), join_semantics_oracle(&p, &q).unwrap());
        }
    }
}

proptest! {
    #[test]
    fn project_is_monotone(a in 0u64..256, b in 0u64..256, target in prop::sample::subsequence(vec![1u32, 2, 3], 1..=3)) {
        let coords = [1, 2, 3];
        let small = Partition::from_mask(&coords, a & b).unwrap();
        let large = Partition::from_mask(&coords, a).unwrap();
        prop_assert!(project(&small, &target).unwrap().is_subset_of(&project(&large, &target).unwrap()));
    }

    #[test]
    fn project_after_lift_is_identity(m in 0u64..16) {
        let p = Partition::from_mask(&[2, 4], m).unwrap();
        let up = lift(&p, &[1, 2, 3, 4, 6]).unwrap();
        prop_assert_eq!(project(&up, &[2, 4]).unwrap(), p);
    }

    #[test]
    fn lift_after_project_never_shrinks(p in cube([1, 2, 3]), target in prop::sample::subsequence(vec![1u32, 2, 3], 1..=3)) {
        let back = lift(&project(&p, &target).unwrap(), p.coords()).unwrap();
        prop_assert!(p.is_subset_of(&back));
    }

    #[test]
    fn bc_contracts_and_is_idempotent(p in cube([1, 2, 3]), q in cube([2, 3, 4])) {
        let (a, b) = bc(&p, &q).unwrap();
        prop_assert!(a.is_subset_of(&p));
        prop_assert!(b.is_subset_of(&q));
        prop_assert_eq!(bc(&a, &b).unwrap(), (a.clone(), b.clone()));
        let u = bc_uni(&p, &q).unwrap();
        prop_assert!(u.is_subset_of(&p));
        prop_assert_eq!(bc_uni(&u, &q).unwrap(), u);
    }

    #[test]
    fn join_oracle_contracts_and_is_idempotent(p in cube([1, 2, 3]), q in cube([3, 4, 5])) {
        let (a, b) = join_semantics_oracle(&p, &q).unwrap();
        prop_assert!(a.is_subset_of(&p) && b.is_subset_of(&q));
        prop_assert_eq!(join_semantics_oracle(&a, &b).unwrap(), (a.clone(), b.clone()));
    }

    #[test]
    fn impose_never_adds_green(p in cube([1, 2, 3]), m in 0u64..4) {
        let face = Partition::from_mask(&[1, 3], m).unwrap();
        let out = impose(&p, &face).unwrap();
        prop_assert!(out.is_subset_of(&p));
    }

    #[test]
    fn cross_counts(a in 0u64..4, b in 0u64..16) {
        let p = Partition::from_mask(&[3], a).unwrap();
        let q = Partition::from_mask(&[1, 7], b).unwrap();
        let bsx = cross(Op::Bs, &p, &q).unwrap();
        prop_assert_eq!(bsx.num_cells(), p.num_cells() * q.num_cells());
        prop_assert_eq!(bsx.green_count(), p.green_count() * q.green_count());
        let wsx = cross(Op::Ws, &p, &q).unwrap();
        let red = (p.num_cells() - p.green_count()) * (q.num_cells() - q.green_count());
        prop_assert_eq!(wsx.green_count(), wsx.num_cells() - red);
    }

    #[test]
    fn cellwise_matches_color_tables(a in 0u64..256, b in 0u64..256) {
        let coords = [4, 5, 6];
        let p = Partition::from_mask(&coords, a).unwrap();
        let q = Partition::from_mask(&coords, b).unwrap();
        for op in [Op::Ws, Op::Bs] {
            let r = cellwise(op, &p, &q).unwrap();
            for cell in 0..8 {
                prop_assert_eq!(r.color(cell), Color::apply(op, p.color(cell), q.color(cell)));
            }
        }
    }

    #[test]
    fn assemble_of_disjoint_parts_is_cross(a in 0u64..4, b in 0u64..16, c in 0u64..4) {
        let x = Partition::from_mask(&[2], a).unwrap();
        let y = Partition::from_mask(&[1, 5], b).unwrap();
        let z = Partition::from_mask(&[9], c).unwrap();
        let chained = cross(Op::Bs, &cross(Op::Bs, &x, &y).unwrap(), &z).unwrap();
        prop_assert_eq!(assemble(&[x, y, z], Op::Bs).unwrap(), chained);
    }
}
