use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use cubeprop_core::clausal::{build_clausal_partition, BuildOutcome, ClausalState, Instance};
use cubeprop_core::dimacs::report::{
    cube_records, write_report, BenchReport, BenchRow, Counterexample, EngineVerdict, ExtractionRecord, ExtractionStatus,
    InstanceMeta, OracleRecord, Seeds, SolveReport, StatsRecord, TraceReport, TOOL, VERSION,
};
use cubeprop_core::dimacs::{emit_dimacs, gen_random_3sat, parse_dimacs};
use cubeprop_core::oracle::{brute_force_sat, OracleVerdict, COUNT_LIMIT, DECIDE_LIMIT};
use cubeprop_core::propagate::{build_adjacency, extract_assignment, fixpoint, Options, PropagationResult, Verdict};

use crate::args::{BenchArgs, GenSpec, InputArgs, OracleMode, OrderSpec, RunArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSAT: i32 = 10;
pub const EXIT_DISAGREE: i32 = 20;

pub struct Loaded {
    pub instance: Instance,
    pub source: String,
    pub gen_seed: Option<u64>,
}

pub fn load(input: &InputArgs) -> Result<Loaded> {
    if let Some(spec) = &input.gen {
        if !spec.is_single() {
            bail!("`--gen` for a single run takes one clause count and no count=");
        }
        let instance = gen_random_3sat(spec.n, spec.m_lo, spec.seed)?;
        return Ok(Loaded {
            instance,
            source: format!("gen:{spec}"),
            gen_seed: Some(spec.seed),
        });
    }
    let path = input.input.as_deref().context("either --input or --gen is required")?;
    let text = if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))?
    };
    let label = if path == "-" { "<stdin>" } else { path };
    match parse_dimacs(&text) {
        Ok(parsed) => {
            for w in &parsed.warnings {
                eprintln!("{label}:{w}");
            }
            Ok(Loaded {
                instance: parsed.instance,
                source: path.to_string(),
                gen_seed: None,
            })
        }
        Err(diags) => {
            for d in &diags {
                eprintln!("{label}:{d}");
            }
            bail!("{label}: could not parse DIMACS input");
        }
    }
}

pub fn run_oracle(instance: &Instance, mode: OracleMode) -> (OracleRecord, Option<OracleVerdict>) {
    let limit = match mode {
        OracleMode::Off => return (OracleRecord::off(), None),
        OracleMode::Auto => COUNT_LIMIT,
        OracleMode::On => DECIDE_LIMIT,
    };
    if instance.num_vars() > limit {
        let note = format!("{} variables exceeds the {limit}-variable oracle limit", instance.num_vars());
        return (OracleRecord::skipped(note), None);
    }
    match brute_force_sat(instance) {
        Ok(v) => (OracleRecord::ran(&v), Some(v)),
        Err(e) => (OracleRecord::skipped(e.to_string()), None),
    }
}

pub struct Outcome {
    pub report: SolveReport,
    pub exit: i32,
    pub initial: Option<ClausalState>,
    pub result: Option<PropagationResult>,
    pub edges: usize,
}

pub fn exit_code(engine: EngineVerdict, agrees: Option<bool>) -> i32 {
    match (agrees, engine.claims_unsat()) {
        (Some(false), _) => EXIT_DISAGREE,
        (_, true) => EXIT_UNSAT,
        (_, false) => EXIT_OK,
    }
}

/// Clausal partition, fixpoint, read-out and oracle for one instance.
pub fn run_instance(loaded: &Loaded, order: OrderSpec, oracle: OracleMode, record_trace: bool) -> Outcome {
    let instance = &loaded.instance;
    let seeds = Seeds {
        generator: loaded.gen_seed,
        order: order.to_string(),
    };
    let (oracle_record, _) = run_oracle(instance, oracle);

    let (engine, empty_cube, extraction, stats, cubes, initial, result, edges, phantoms) = match build_clausal_partition(instance) {
        BuildOutcome::TriviallyUnsat => (
            EngineVerdict::UnsatByEmptyClause,
            None,
            ExtractionRecord {
                status: ExtractionStatus::NotAttempted,
                literals: None,
                verified: None,
            },
            StatsRecord::default(),
            Vec::new(),
            None,
            None,
            0,
            Vec::new(),
        ),
        BuildOutcome::Partitioned(state) => {
            let opts = Options {
                order: order.0,
                early_exit: true,
                record_trace,
            };
            let edges = build_adjacency(&state).edges().len();
            let r = fixpoint(&state, &opts);
            let (engine, empty_cube) = match r.verdict {
                Verdict::EmptyCube(t) => (EngineVerdict::UnsatByEmptyCube, Some(*t.vars())),
                Verdict::NoEmptyCube => (EngineVerdict::NoEmptyCube, None),
            };
            let extraction = match extract_assignment(&r, instance) {
                Ok(Some(x)) => ExtractionRecord {
                    status: ExtractionStatus::Found,
                    literals: Some(x.assignment.to_dimacs()),
                    verified: Some(x.verified),
                },
                Ok(None) => ExtractionRecord {
                    status: ExtractionStatus::GaveUp,
                    literals: None,
                    verified: None,
                },
                Err(_) => ExtractionRecord {
                    status: ExtractionStatus::NotAttempted,
                    literals: None,
                    verified: None,
                },
            };
            let stats = StatsRecord::new(&r.stats, r.fixpoint.len(), edges);
            let cubes = cube_records(&r.fixpoint);
            let phantoms = state.phantoms().to_vec();
            (engine, empty_cube, extraction, stats, cubes, Some(state), Some(r), edges, phantoms)
        }
    };

    let agrees = SolveReport::agreement(engine, &oracle_record);
    let report = SolveReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        instance: InstanceMeta::new(loaded.source.clone(), instance, &phantoms),
        seeds,
        engine_verdict: engine,
        empty_cube,
        oracle: oracle_record,
        oracle_agrees: agrees,
        extraction,
        stats,
        cubes,
    };
    Outcome {
        exit: exit_code(engine, agrees),
        report,
        initial,
        result,
        edges,
    }
}

pub fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn trace_report(loaded: &Loaded, out: &Outcome) -> TraceReport {
    match (&out.initial, &out.result) {
        (Some(initial), Some(result)) => TraceReport::new(out.report.instance.clone(), out.report.seeds.clone(), initial, result, out.edges),
        _ => TraceReport {
            tool: TOOL.into(),
            version: VERSION.into(),
            instance: InstanceMeta::new(loaded.source.clone(), &loaded.instance, &[]),
            seeds: out.report.seeds.clone(),
            engine_verdict: out.report.engine_verdict,
            initial: Vec::new(),
            applications: Vec::new(),
            fixpoint: Vec::new(),
            stats: StatsRecord::default(),
        },
    }
}

pub fn solve(args: &RunArgs) -> Result<(i32, SolveReport)> {
    let loaded = load(&args.source)?;
    let out = run_instance(&loaded, args.order, args.oracle, args.trace.is_some());
    write_out(args.out.as_deref(), &write_report(&out.report))?;
    if let Some(path) = &args.trace {
        write_out(Some(path), &write_report(&trace_report(&loaded, &out)))?;
    }
    if args.verbose > 0 {
        eprintln!(
            "{}: {:?}, oracle {:?}, exit {}",
            loaded.source, out.report.engine_verdict, out.report.oracle.status, out.exit
        );
    }
    Ok((out.exit, out.report))
}

pub fn trace(args: &RunArgs) -> Result<(i32, TraceReport)> {
    let loaded = load(&args.source)?;
    let out = run_instance(&loaded, args.order, args.oracle, true);
    let report = trace_report(&loaded, &out);
    let path = args.trace.as_deref().or(args.out.as_deref());
    write_out(path, &write_report(&report))?;
    Ok((out.exit, report))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the `index`-th instance with `m` clauses in a sweep.
pub fn instance_seed(base: u64, m: usize, index: usize) -> u64 {
    splitmix64(base ^ ((m as u64) << 32) ^ index as u64)
}

#[derive(Default)]
struct RowAcc {
    instances: usize,
    engine_unsat: usize,
    oracle_ran: usize,
    oracle_sat: usize,
    agreements: usize,
    soundness: usize,
    gaps: usize,
    found: usize,
    gave_up: usize,
    passes: usize,
    changing: usize,
    removed: usize,
    bound_violations: usize,
}

fn mean(total: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total as f64 / n as f64
    }
}

pub fn bench(args: &BenchArgs) -> Result<(i32, BenchReport)> {
    let spec = &args.gen;
    if spec.n < 3 {
        bail!("bench needs n >= 3");
    }
    let mut rows = Vec::new();
    let mut counterexamples = Vec::new();
    for m in spec.clause_counts() {
        let started = std::time::Instant::now();
        let mut acc = RowAcc::default();
        for index in 0..spec.count {
            let seed = instance_seed(spec.seed, m, index);
            let single = GenSpec::single(spec.n, m, seed);
            let loaded = Loaded {
                instance: gen_random_3sat(spec.n, m, seed)?,
                source: format!("gen:{single}"),
                gen_seed: Some(seed),
            };
            let out = run_instance(&loaded, args.order, args.oracle, false);
            let r = &out.report;
            acc.instances += 1;
            acc.engine_unsat += usize::from(r.engine_verdict.claims_unsat());
            acc.passes += r.stats.passes;
            acc.changing += r.stats.changing_applications;
            acc.removed += r.stats.cells_removed;
            acc.bound_violations += usize::from(r.stats.changing_applications > 8 * r.stats.cubes);
            match r.extraction.status {
                ExtractionStatus::Found => acc.found += 1,
                ExtractionStatus::GaveUp => acc.gave_up += 1,
                ExtractionStatus::NotAttempted => {}
            }
            if let Some(sat) = r.oracle.satisfiable {
                acc.oracle_ran += 1;
                acc.oracle_sat += usize::from(sat);
                let kind = match (sat, r.engine_verdict.claims_unsat()) {
                    (true, true) => {
                        acc.soundness += 1;
                        Some("soundness_violation")
                    }
                    (false, false) => {
                        acc.gaps += 1;
                        Some("completeness_gap")
                    }
                    _ => {
                        acc.agreements += 1;
                        None
                    }
                };
                if let Some(kind) = kind {
                    counterexamples.push(Counterexample {
                        kind: kind.into(),
                        gen: single.to_string(),
                        seed,
                        solve_args: format!("solve --gen {single} --oracle on"),
                        dimacs: emit_dimacs(&loaded.instance),
                    });
                }
            }
        }
        if args.verbose > 0 {
            eprintln!("m={m}: {} instances in {:.2?}", acc.instances, started.elapsed());
        }
        rows.push(BenchRow {
            num_vars: spec.n,
            num_clauses: m,
            ratio: m as f64 / spec.n as f64,
            instances: acc.instances,
            engine_unsat: acc.engine_unsat,
            engine_open: acc.instances - acc.engine_unsat,
            oracle_ran: acc.oracle_ran,
            oracle_skipped: acc.instances - acc.oracle_ran,
            oracle_sat: acc.oracle_sat,
            oracle_unsat: acc.oracle_ran - acc.oracle_sat,
            agreements: acc.agreements,
            soundness_violations: acc.soundness,
            completeness_gaps: acc.gaps,
            agreement_rate: (acc.oracle_ran > 0).then(|| acc.agreements as f64 / acc.oracle_ran as f64),
            extraction_found: acc.found,
            extraction_gave_up: acc.gave_up,
            mean_passes: mean(acc.passes, acc.instances),
            mean_changing_applications: mean(acc.changing, acc.instances),
            mean_cells_removed: mean(acc.removed, acc.instances),
            termination_bound_violations: acc.bound_violations,
        });
    }
    let report = BenchReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        base_seed: spec.seed,
        order: args.order.to_string(),
        rows,
        counterexamples,
    };
    write_out(args.out.as_deref(), &write_report(&report))?;
    let unsound = report.rows.iter().any(|r| r.soundness_violations > 0 || r.termination_bound_violations > 0);
    Ok((if unsound { EXIT_DISAGREE } else { EXIT_OK }, report))
}
