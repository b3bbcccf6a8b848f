//! Command-line front end for the consistent-hashing toolkit: load-ratio
//! simulation, operation benchmarks, and brute-force cross-checks. All
//! tabular output is CSV on stdout; redirect to capture it.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hashprobe::bench::{bench_op, BenchOp};
use hashprobe::error::Error;
use hashprobe::hash::SplitMix64;
use hashprobe::multiprobe::MultiProbeTable;
use hashprobe::oracle::{node_entries, oracle_lookup, virtual_entries};
use hashprobe::ring::RingTable;
use hashprobe::sim::{run_trials, summarize, Algorithm, TrialConfig};

const USAGE_ERROR: u8 = 2;
const CHECK_FAILED: u8 = 1;

#[derive(Parser)]
#[command(
    name = "hashprobe",
    version,
    about = "Consistent hashing: load simulation, benchmarks, and correctness checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate peak-to-average load ratios over seeded trials (CSV)
    Simulate(SimulateArgs),
    /// Cross-check bucketed lookups against brute-force references
    Check(CheckArgs),
    /// Measure per-operation cost or memory accounting (CSV)
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoName {
    Multiprobe,
    Ring,
    Jump,
}

#[derive(Args)]
struct SimulateArgs {
    /// Assignment algorithm
    #[arg(long)]
    algo: AlgoName,
    /// Node counts, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    nodes: Vec<u64>,
    /// Keys sampled per node in every trial
    #[arg(long, default_value_t = 10_000)]
    keys_per_node: u64,
    /// Trials per node count
    #[arg(long, default_value_t = 100)]
    trials: u32,
    /// Base seed; trial t derives its own table seed from it
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Key hashes per lookup (multiprobe only)
    #[arg(long)]
    probes: Option<u32>,
    /// Virtual nodes per node (ring only): a number, "lnN", or "700lnN"
    #[arg(long)]
    vnodes: Option<String>,
    /// Structural memory budget per trial table in bytes; 0 disables the check
    #[arg(long, default_value_t = 1 << 30)]
    memory_budget: u64,
}

#[derive(Args)]
struct CheckArgs {
    /// Nodes in the checked tables
    #[arg(long, default_value_t = 64)]
    nodes: u64,
    /// Keys per check
    #[arg(long, default_value_t = 100_000)]
    keys: u64,
    /// Key hashes per lookup for the probing table
    #[arg(long, default_value_t = 2)]
    probes: u32,
    /// Virtual nodes per node for the ring table
    #[arg(long, default_value_t = 4)]
    vnodes: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fault injection: make the probing lookup skip its home bucket, to
    /// prove the checker catches real faults
    #[arg(long, hide = true)]
    inject_skip_bucket: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchOpName {
    Init,
    Assign,
    Update,
    Memory,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    algo: AlgoName,
    #[arg(long, value_delimiter = ',', required = true)]
    nodes: Vec<u64>,
    /// What to measure
    #[arg(long)]
    op: BenchOpName,
    #[arg(long)]
    probes: Option<u32>,
    #[arg(long)]
    vnodes: Option<String>,
    /// Timed repetitions per measurement (median is reported)
    #[arg(long, default_value_t = 5)]
    reps: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    configure_thread_pool();
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Check(args) => cmd_check(&args),
        Command::Bench(args) => cmd_bench(&args),
    }
}

/// PROBE_THREADS caps trial parallelism; unset leaves the default pool.
fn configure_thread_pool() {
    if let Ok(value) = std::env::var("PROBE_THREADS") {
        match value.parse::<usize>() {
            Ok(threads) if threads >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
            _ => {
                eprintln!("warning: ignoring invalid PROBE_THREADS value {value:?}");
            }
        }
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(USAGE_ERROR)
}

/// Resolve the algorithm parameter for one node count, enforcing that
/// exactly the applicable flag was given.
fn resolve_algorithm(
    algo: AlgoName,
    probes: &Option<u32>,
    vnodes: &Option<String>,
    n: u64,
) -> Result<Algorithm, String> {
    match algo {
        AlgoName::Multiprobe => {
            if vnodes.is_some() {
                return Err("--vnodes does not apply to --algo multiprobe".into());
            }
            match probes {
                Some(k) if *k >= 1 => Ok(Algorithm::MultiProbe { probes: *k }),
                Some(_) => Err("--probes must be at least 1".into()),
                None => Err("--algo multiprobe requires --probes".into()),
            }
        }
        AlgoName::Ring => {
            if probes.is_some() {
                return Err("--probes does not apply to --algo ring".into());
            }
            match vnodes {
                Some(spec) => Ok(Algorithm::Ring { vnodes: parse_vnodes(spec, n)? }),
                None => Err("--algo ring requires --vnodes".into()),
            }
        }
        AlgoName::Jump => {
            if probes.is_some() || vnodes.is_some() {
                return Err("--probes/--vnodes do not apply to --algo jump".into());
            }
            Ok(Algorithm::Jump)
        }
    }
}

/// A vnode count: numeric, or "lnN" / "700lnN" meaning max(1, round(c ln n)).
fn parse_vnodes(spec: &str, n: u64) -> Result<u32, String> {
    let scaled = |c: f64| {
        let j = (c * (n as f64).ln()).round();
        Ok(j.max(1.0) as u32)
    };
    match spec {
        "lnN" => scaled(1.0),
        "700lnN" => scaled(700.0),
        other => match other.parse::<u32>() {
            Ok(j) if j >= 1 => Ok(j),
            _ => Err(format!("--vnodes must be a positive integer, \"lnN\" or \"700lnN\", got {other:?}")),
        },
    }
}

fn cmd_simulate(args: &SimulateArgs) -> ExitCode {
    let mut rows: Vec<String> = Vec::with_capacity(args.nodes.len());
    for &n in &args.nodes {
        let algorithm = match resolve_algorithm(args.algo, &args.probes, &args.vnodes, n) {
            Ok(a) => a,
            Err(message) => return usage_error(&message),
        };
        let config = TrialConfig {
            algorithm,
            nodes: n,
            keys_per_node: args.keys_per_node,
            trials: args.trials,
            base_seed: args.seed,
            memory_budget: (args.memory_budget > 0).then_some(args.memory_budget),
        };
        let (name, value) = algorithm.param();
        let prefix = format!(
            "{},{},{},{},{},{}",
            algorithm.name(),
            n,
            name,
            value,
            args.trials,
            args.keys_per_node
        );
        match run_trials(&config).and_then(|reports| summarize(&reports)) {
            Ok(s) => rows.push(format!(
                "{prefix},{:.4},{:.4},{:.4}",
                s.median, s.p90, s.p99
            )),
            Err(Error::MemoryBudgetExceeded { .. }) => {
                // partial results are results
                rows.push(format!("{prefix},OOM,OOM,OOM"));
            }
            Err(Error::InvalidArgument(message)) => return usage_error(message),
            Err(other) => {
                eprintln!("error: {other}");
                return ExitCode::FAILURE;
            }
        }
    }
    println!("algorithm,n,param_name,param_value,trials,keys_per_node,median,p90,p99");
    for row in rows {
        println!("{row}");
    }
    ExitCode::SUCCESS
}

struct CheckFailure {
    seed: u64,
    key: u64,
    expected: u64,
    got: u64,
}

fn cmd_check(args: &CheckArgs) -> ExitCode {
    if args.nodes == 0 || args.probes == 0 || args.vnodes == 0 {
        return usage_error("--nodes, --probes and --vnodes must be at least 1");
    }
    let mut rng = SplitMix64::new(args.seed);
    let mut ids: Vec<u64> = Vec::with_capacity(args.nodes as usize);
    let mut table = match MultiProbeTable::new(args.seed, args.probes) {
        Ok(t) => t,
        Err(e) => return usage_error(&e.to_string()),
    };
    let mut ring = RingTable::new(args.seed, args.vnodes).expect("vnodes checked above");
    while ids.len() < args.nodes as usize {
        let id = rng.next_u64();
        if table.insert(id).is_ok() {
            ring.insert(id).expect("fresh id");
            ids.push(id);
        }
    }
    let keys: Vec<u64> = (0..args.keys).map(|_| rng.next_u64()).collect();

    let mut passed = 0u32;
    let mut failed = 0u32;
    let mut first_failure: Option<CheckFailure> = None;

    let mut record = |name: &str, detail: String, failure: Option<CheckFailure>| {
        match failure {
            None => {
                passed += 1;
                println!("check {name}: PASS ({detail})");
            }
            Some(f) => {
                failed += 1;
                println!("check {name}: FAIL ({detail})");
                if first_failure.is_none() {
                    first_failure = Some(f);
                }
            }
        }
    };

    // probing table vs brute force
    let entries = node_entries(args.seed, &ids);
    let mut failure = None;
    for &key in &keys {
        let got = if args.inject_skip_bucket {
            table.lookup_skipping_home_bucket(key).unwrap()
        } else {
            table.lookup(key).unwrap()
        };
        let expected = oracle_lookup(&entries, args.seed, args.probes, key).unwrap();
        if got != expected {
            failure = Some(CheckFailure { seed: args.seed, key, expected, got });
            break;
        }
    }
    record("multiprobe-vs-oracle", format!("{} keys", keys.len()), failure);

    // ring vs brute force over its virtual entries
    let ventries = virtual_entries(args.seed, &ids, args.vnodes);
    let mut failure = None;
    for &key in &keys {
        let got = ring.lookup(key).unwrap();
        let expected = oracle_lookup(&ventries, args.seed, 1, key).unwrap();
        if got != expected {
            failure = Some(CheckFailure { seed: args.seed, key, expected, got });
            break;
        }
    }
    record("ring-vs-oracle", format!("{} keys", keys.len()), failure);

    // adding a node may only move keys to it
    let before: Vec<u64> = keys.iter().map(|&k| table.lookup(k).unwrap()).collect();
    let new_node = loop {
        let id = rng.next_u64();
        if table.insert(id).is_ok() {
            break id;
        }
    };
    let mut failure = None;
    let mut moved = 0u64;
    for (i, &key) in keys.iter().enumerate() {
        let after = table.lookup(key).unwrap();
        if after != before[i] {
            moved += 1;
            if after != new_node {
                failure = Some(CheckFailure { seed: args.seed, key, expected: new_node, got: after });
                break;
            }
        }
    }
    record(
        "monotonic-add",
        format!("{} keys, {moved} moved to new node", keys.len()),
        failure,
    );

    // removing it must restore every assignment
    table.remove(new_node).unwrap();
    let mut failure = None;
    for (i, &key) in keys.iter().enumerate() {
        let after = table.lookup(key).unwrap();
        if after != before[i] {
            failure = Some(CheckFailure { seed: args.seed, key, expected: before[i], got: after });
            break;
        }
    }
    record("remove-restores", format!("{} keys", keys.len()), failure);

    println!("check: {passed} passed, {failed} failed");
    if let Some(f) = first_failure {
        println!(
            "counterexample: seed={} key={} expected={} got={}",
            f.seed, f.key, f.expected, f.got
        );
        return ExitCode::from(CHECK_FAILED);
    }
    ExitCode::SUCCESS
}

fn cmd_bench(args: &BenchArgs) -> ExitCode {
    let mut rows: Vec<String> = Vec::with_capacity(args.nodes.len());
    for &n in &args.nodes {
        if n == 0 {
            return usage_error("--nodes entries must be at least 1");
        }
        let algorithm = match resolve_algorithm(args.algo, &args.probes, &args.vnodes, n) {
            Ok(a) => a,
            Err(message) => return usage_error(&message),
        };
        let (value, nondeterministic) = match args.op {
            BenchOpName::Memory => (memory_per_node(algorithm, n), false),
            BenchOpName::Init => (bench_op(algorithm, n, BenchOp::Init, args.reps, args.seed), true),
            BenchOpName::Assign => {
                (bench_op(algorithm, n, BenchOp::Assign, args.reps, args.seed), true)
            }
            BenchOpName::Update => {
                (bench_op(algorithm, n, BenchOp::Update, args.reps, args.seed), true)
            }
        };
        let op = match args.op {
            BenchOpName::Init => "init",
            BenchOpName::Assign => "assign",
            BenchOpName::Update => "update",
            BenchOpName::Memory => "memory",
        };
        rows.push(format!(
            "{},{},{},{:.4},{}",
            algorithm.name(),
            n,
            op,
            value,
            nondeterministic
        ));
    }
    println!("algorithm,n,op,value,nondeterministic");
    for row in rows {
        println!("{row}");
    }
    ExitCode::SUCCESS
}

/// Bytes per node of the structural memory estimate; 0 for the stateless
/// jump algorithm.
fn memory_per_node(algorithm: Algorithm, n: u64) -> f64 {
    match algorithm {
        Algorithm::Jump => 0.0,
        Algorithm::MultiProbe { probes } => {
            let mut table = MultiProbeTable::new(0, probes).expect("probes validated");
            for id in 0..n {
                table.insert(id).expect("fresh id");
            }
            table.memory_estimate() as f64 / n as f64
        }
        Algorithm::Ring { vnodes } => {
            let mut table = RingTable::new(0, vnodes).expect("vnodes validated");
            for id in 0..n {
                table.insert(id).expect("fresh id");
            }
            table.memory_estimate() as f64 / n as f64
        }
    }
}
