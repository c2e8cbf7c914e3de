use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cubeprop_core::propagate::Order;

#[derive(Debug, Parser)]
#[command(name = "cubeprop", version, about = "Pairwise cube propagation for 3SAT, audited against brute force")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate one instance to its fixpoint and report the verdict.
    Solve(RunArgs),
    /// Run the property battery.
    Verify(VerifyArgs),
    /// Sweep random instances across clause counts and tabulate agreement.
    Bench(BenchArgs),
    /// Propagate one instance and dump every edge application.
    Trace(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// DIMACS file, or `-` for standard input.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    pub input: Option<String>,
    /// Random instance: `n=<n>,m=<m>,seed=<s>`.
    #[arg(long)]
    pub gen: Option<GenSpec>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: InputArgs,
    #[arg(long, value_enum, default_value_t = OracleMode::Auto)]
    pub oracle: OracleMode,
    /// Edge scheduling: `fifo` or `random:<seed>`.
    #[arg(long, default_value = "fifo")]
    pub order: OrderSpec,
    /// Report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trace path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// `n=<n>,m=<m>|<lo>..<hi>,seed=<s>[,count=<k>][,step=<d>]`.
    #[arg(long)]
    pub gen: GenSpec,
    #[arg(long, value_enum, default_value_t = OracleMode::Auto)]
    pub oracle: OracleMode,
    #[arg(long, default_value = "fifo")]
    pub order: OrderSpec,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Subsample the exhaustive pair checks and shrink instance counts.
    #[arg(long)]
    pub quick: bool,
    /// Seed for the random-instance laws.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Swap in a deliberately broken operator to check that the battery notices.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// The symmetric combination forgets to impose on its second operand.
    Bc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    On,
    Off,
    /// Run when the instance is small enough to also count solutions.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderSpec(pub Order);

impl FromStr for OrderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "fifo" {
            return Ok(OrderSpec(Order::Fifo));
        }
        match s.strip_prefix("random:").map(str::parse::<u64>) {
            Some(Ok(seed)) => Ok(OrderSpec(Order::Random(seed))),
            _ => Err(format!("expected `fifo` or `random:<seed>`, got `{s}`")),
        }
    }
}

impl std::fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Order::Fifo => f.write_str("fifo"),
            Order::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub n: u32,
    pub m_lo: usize,
    pub m_hi: usize,
    pub step: Option<usize>,
    pub seed: u64,
    pub count: usize,
}

impl GenSpec {
    pub fn single(n: u32, m: usize, seed: u64) -> Self {
        GenSpec {
            n,
            m_lo: m,
            m_hi: m,
            step: None,
            seed,
            count: 1,
        }
    }

    pub fn is_single(&self) -> bool {
        self.m_lo == self.m_hi && self.count == 1
    }

    /// Clause counts of a sweep. The default step is `max(1, n / 2)`.
    pub fn clause_counts(&self) -> Vec<usize> {
        let step = self.step.unwrap_or((self.n as usize / 2).max(1));
        (self.m_lo..=self.m_hi).step_by(step).collect()
    }
}

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mut n, mut m, mut seed) = (None, None, None);
        let (mut count, mut step) = (1usize, None);
        for part in s.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let num = |v: &str| v.trim().parse::<u64>().map_err(|_| format!("`{key}` needs a number, got `{v}`"));
            match key.trim() {
                "n" => n = Some(u32::try_from(num(value)?).map_err(|_| "n too large".to_string())?),
                "m" => {
                    m = Some(match value.split_once("..") {
                        Some((lo, hi)) => (num(lo)? as usize, num(hi)? as usize),
                        None => {
                            let v = num(value)? as usize;
                            (v, v)
                        }
                    })
                }
                "seed" => seed = Some(num(value)?),
                "count" => count = num(value)? as usize,
                "step" => step = Some((num(value)? as usize).max(1)),
                other => return Err(format!("unknown generator key `{other}`")),
            }
        }
        let (m_lo, m_hi) = m.ok_or("generator spec needs m")?;
        if m_lo > m_hi {
            return Err(format!("empty clause range {m_lo}..{m_hi}"));
        }
        if count == 0 {
            return Err("count must be at least 1".into());
        }
        Ok(GenSpec {
            n: n.ok_or("generator spec needs n")?,
            m_lo,
            m_hi,
            step,
            seed: seed.ok_or("generator spec needs seed")?,
            count,
        })
    }
}

impl std::fmt::Display for GenSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n={},", self.n)?;
        if self.m_lo == self.m_hi {
            write!(f, "m={}", self.m_lo)?;
        } else {
            write!(f, "m={}..{}", self.m_lo, self.m_hi)?;
        }
        write!(f, ",seed={}", self.seed)?;
        if self.count != 1 {
            write!(f, ",count={}", self.count)?;
        }
        if let Some(step) = self.step {
            write!(f, ",step={step}")?;
        }
        Ok(())
    }
}
