use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cofinitary::partial::parse_pairs;
use cofinitary::{
    decode, run, verify_transcript, BaseGroup, Condition, Error, PartialInjection, ReducedWord, RunConfig,
    Transcript, WordSource,
};

/// Build, check and read finite approximations of cofinitary representations.
#[derive(Parser)]
#[command(name = "forge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the extension scheduler and write a transcript.
    Build(BuildArgs),
    /// Re-check every claim in a transcript.
    Verify {
        transcript: PathBuf,
        /// Print only failing checks.
        #[arg(long)]
        quiet: bool,
    },
    /// Print the parities of the orbit of a parameter under `w[s]`.
    Decode {
        /// Pair list `n n'`, one per line.
        table: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, alias = "m")]
        parameter: u64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "trivial")]
        group: String,
    },
    /// Exit 0 iff the first condition lies below the second.
    Leq { q: PathBuf, p: PathBuf },
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, default_value = "trivial")]
    group: String,
    /// `thue-morse`, `champernowne`, `file:<path>` or `none` for no coding.
    #[arg(long, default_value = "thue-morse")]
    z: String,
    /// Explicit words, comma separated; overrides `--depth`.
    #[arg(long, value_delimiter = ',')]
    words: Vec<String>,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 16)]
    code_length: usize,
    /// Built-in permutations or `table:<path>`, comma separated.
    #[arg(long, value_delimiter = ',')]
    targets: Vec<String>,
    #[arg(long, default_value_t = 5)]
    hit_stride: u64,
    #[arg(long, default_value_t = 10)]
    hits: usize,
    /// Group elements to separate every word from.
    #[arg(long, value_delimiter = ',')]
    distinguish: Option<Vec<String>>,
    /// Words placed in F before the first step, comma separated.
    #[arg(long, value_delimiter = ',')]
    preload: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long)]
    out: PathBuf,
}

impl BuildArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            group: self.group.clone(),
            z: (self.z != "none").then(|| self.z.clone()),
            words: match self.words.is_empty() {
                true => WordSource::Depth(self.depth),
                false => WordSource::List(self.words.clone()),
            },
            code_length: self.code_length,
            targets: self.targets.clone(),
            hit_stride: self.hit_stride,
            hits_per_target: self.hits,
            distinguish: self.distinguish.clone(),
            preload: self.preload.clone(),
            budget: self.budget,
        }
    }
}

/// Whether the checked property held; errors exit with 2.
type Outcome = Result<bool, Error>;

fn build(args: &BuildArgs) -> Outcome {
    let t = run(&args.config())?;
    fs::write(&args.out, t.to_json())?;
    println!("wrote {} ({} steps)", args.out.display(), t.steps.len());
    println!("window: [0, {})", t.coverage);
    println!("certificates: {}", t.certificates.len());
    for cert in &t.certificates {
        println!(
            "  {} with parameter {} codes {} bits",
            cert.word, cert.parameter, cert.length
        );
    }
    if !t.uncodable.is_empty() {
        println!(
            "not coded (conjugate to a group element): {}",
            t.uncodable.join(", ")
        );
    }
    println!(
        "witnesses: {} hits, {} distinctions",
        t.hits.len(),
        t.distinctions.len()
    );
    Ok(true)
}

fn verify(path: &Path, quiet: bool) -> Outcome {
    let t = Transcript::from_json(&fs::read_to_string(path)?)?;
    let report = verify_transcript(&t);
    if quiet {
        for check in report.failures() {
            println!("[FAIL] {}: {}", check.name, check.detail);
        }
    } else {
        print!("{report}");
    }
    let failed = report.failures().count();
    println!("{} checks, {failed} failed", report.checks.len());
    Ok(failed == 0)
}

fn decode_table(table: &Path, word: &str, parameter: u64, count: usize, group: &str) -> Outcome {
    let group = BaseGroup::builtin(group)?;
    let s = PartialInjection::from_pairs(parse_pairs(&fs::read_to_string(table)?)?)?;
    let w = ReducedWord::parse(&group, word)?;
    let bits = decode(&group, &w, &s, parameter, count)?;
    println!("{}", cofinitary::coding::bits_to_string(&bits));
    Ok(true)
}

fn leq(q: &Path, p: &Path) -> Outcome {
    let q = Condition::from_json(&fs::read_to_string(q)?)?;
    let p = Condition::from_json(&fs::read_to_string(p)?)?;
    let violations = q.order_violations(&p)?;
    for v in &violations {
        println!("{v}");
    }
    if violations.is_empty() {
        println!("q <= p");
    }
    Ok(violations.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Build(args) => build(args),
        Command::Verify { transcript, quiet } => verify(transcript, *quiet),
        Command::Decode {
            table,
            word,
            parameter,
            count,
            group,
        } => decode_table(table, word, *parameter, *count, group),
        Command::Leq { q, p } => leq(q, p),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
