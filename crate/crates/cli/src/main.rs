mod input;
mod pipeline;
mod props;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use shortpa_core::apcover::{count_apcover, decide_apcover, decide_mapcover};
use shortpa_core::encode::{build_sentence3, build_sentence_m, encode_groups, encode_window, Encoding};
use shortpa_core::formats;
use shortpa_core::geometry::{build_system1, build_system2};
use shortpa_core::gip::{count_gip, decide_gip};
use shortpa_core::kpt::{fibonacci_family, infeasible_set, midpoint_free, strictly_convex_chain};
use shortpa_core::optimize::{bilevel_value_semantic, build_bilevel, build_pareto, solve_bilevel_brute, solve_pareto_brute};
use shortpa_core::presburger::{count_bounded, decide_bounded, BoundedBox};
use shortpa_core::satred::{count_sat, decide_qbf, reduce_3sat_to_apcover, reduce_qbf_to_mapcover};
use shortpa_core::{Error, Int};

use input::Input;
use pipeline::Stage;

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SCALE: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

/// Reductions from SAT to short Presburger sentences and fixed-size integer
/// programs, with brute-force oracles for every stage.
#[derive(Parser)]
#[command(name = "shortpa", version)]
struct Cli {
    /// Worker threads for the randomized suites; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Refuse encodings whose continued-fraction numerator exceeds this many bits.
    #[arg(long, global = true, default_value_t = 20_000)]
    max_scale: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Apcover,
    Mapcover,
    Sentence,
    Gip1,
    Gip2,
    Bilevel,
    Pareto,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a CNF, QBF or AP-COVER file to the target format.
    Reduce {
        input: PathBuf,
        #[arg(long, value_enum)]
        target: Target,
        /// Double the window so the optimization value is 0 or 1.
        #[arg(long)]
        parity_trick: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide an instance file. Exit status 0 means true, 1 false.
    Decide {
        input: PathBuf,
        /// Box half-width for sentence and GIP variables.
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Count witnesses of an instance file.
    Count {
        input: PathBuf,
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Run every stage of the reduction on a CNF and compare counts.
    VerifyPipeline {
        input: PathBuf,
        /// Comma-separated subset of sat,apcover,sentence,gip1,gip2,bilevel,pareto.
        #[arg(long, value_delimiter = ',', default_value = "sat,apcover,sentence,bilevel")]
        stages: Vec<Stage>,
        #[arg(long)]
        parity_trick: bool,
        /// Perturb the encoding before building later stages.
        #[arg(long, hide = true)]
        corrupt_encoding: bool,
    },
    /// Emit the Fibonacci PIP instance and its infeasible parameter set.
    GenKpt {
        #[arg(long)]
        s: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit the max-min instance for a CNF or AP-COVER file.
    GenBilevel {
        input: PathBuf,
        #[arg(long)]
        parity_trick: bool,
        /// Also compute the optimal value.
        #[arg(long)]
        solve: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit the Pareto instance for a CNF or AP-COVER file.
    GenPareto {
        input: PathBuf,
        #[arg(long)]
        parity_trick: bool,
        #[arg(long)]
        solve: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the randomized invariant suites, and re-parse every file in
    /// `$SHORTPA_FIXTURES` when it is set.
    Props {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

fn read(path: &Path) -> Result<Input> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    input::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn guard(enc: Encoding, max_bits: u64) -> Result<Encoding> {
    if enc.p.bits() > max_bits {
        return Err(Error::ScaleGuard {
            what: "continued-fraction numerator bits".into(),
            size: enc.p.bits().into(),
            limit: max_bits.into(),
        }
        .into());
    }
    Ok(enc)
}

/// The encoding behind a CNF (through AP-COVER) or an AP-COVER file.
fn encoding_of(input: &Input, parity: bool, max_bits: u64) -> Result<Encoding> {
    let inst = match input {
        Input::Cnf(f) => reduce_3sat_to_apcover(f, parity)?.0,
        Input::ApCover(i) => i.clone(),
        other => bail!("expected a CNF or AP-COVER input, found {}", other.kind()),
    };
    guard(encode_window(&inst.mu, &inst.nu, &inst.triples)?, max_bits)
}

fn bool_exit(b: bool) -> ExitCode {
    println!("{b}");
    if b {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    }
}

fn bounded_box(bound: Option<i64>, dim: usize) -> Result<BoundedBox> {
    let b = bound.context("--bound is required for this input")?;
    Ok(BoundedBox::new(vec![(Int::from(-b), Int::from(b)); dim])?)
}

fn reduce(input: &Input, target: Target, parity: bool, max_bits: u64) -> Result<String> {
    if let Input::Qbf(q) = input {
        let m = reduce_qbf_to_mapcover(q)?;
        return match target {
            Target::Mapcover => Ok(formats::write_mapcover(&m)),
            Target::Sentence => Ok(formats::write_sentence(&build_sentence_m(&m, &encode_groups(&m)?)?)),
            _ => bail!("a QBF reduces to mapcover or sentence"),
        };
    }
    if let Input::MapCover(m) = input {
        if target != Target::Sentence {
            bail!("an m-AP-COVER instance reduces to sentence only");
        }
        return Ok(formats::write_sentence(&build_sentence_m(m, &encode_groups(m)?)?));
    }
    if target == Target::Apcover {
        let Input::Cnf(f) = input else {
            bail!("only a CNF reduces to apcover");
        };
        return Ok(formats::write_apcover(&reduce_3sat_to_apcover(f, parity)?.0));
    }
    let enc = encoding_of(input, parity, max_bits)?;
    Ok(match target {
        Target::Sentence => formats::write_sentence(&build_sentence3(&enc)),
        Target::Gip1 => formats::write_gip(&build_system1(&enc)?),
        Target::Gip2 => formats::write_gip(&build_system2(&enc)?),
        Target::Bilevel => formats::write_bilevel(&build_bilevel(&enc)),
        Target::Pareto => formats::write_pareto(&build_pareto(&enc, parity)),
        Target::Apcover | Target::Mapcover => bail!("a CNF reduces to mapcover only as a QBF"),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Reduce { input, target, parity_trick, output } => {
            let text = reduce(&read(&input)?, target, parity_trick, cli.max_scale)?;
            emit(&text, output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Decide { input, bound } => Ok(match read(&input)? {
            Input::Cnf(f) => bool_exit(count_sat(&f)?.is_positive()),
            Input::Qbf(q) => bool_exit(decide_qbf(&q)?),
            Input::ApCover(i) => bool_exit(decide_apcover(&i)?),
            Input::MapCover(m) => bool_exit(decide_mapcover(&m)?),
            Input::Sentence(s) => bool_exit(decide_bounded(&s, &bounded_box(bound, s.num_vars())?)?),
            Input::Gip(g) => bool_exit(decide_gip(&g, &bounded_box(bound, g.nx)?)?),
            Input::Bilevel(b) => {
                let v = solve_bilevel_brute(&b)?;
                println!("value {v}");
                bool_exit(v.is_positive())
            }
            Input::Pareto(p) => {
                let (g, front) = solve_pareto_brute(&p)?;
                println!("min g {g} over {} Pareto minima", front.len());
                bool_exit(g.is_negative())
            }
            other => bail!("cannot decide a {} file", other.kind()),
        }),
        Cmd::Count { input, bound } => {
            let c = match read(&input)? {
                Input::Cnf(f) => count_sat(&f)?,
                Input::ApCover(i) => count_apcover(&i)?,
                Input::Sentence(s) => count_bounded(&s, &bounded_box(bound, s.num_vars())?)?,
                Input::Gip(g) => count_gip(&g, &bounded_box(bound, g.nx)?)?,
                other => bail!("cannot count a {} file", other.kind()),
            };
            println!("{c}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::VerifyPipeline { input, stages, parity_trick, corrupt_encoding } => {
            let Input::Cnf(f) = read(&input)? else {
                bail!("verify-pipeline takes a CNF file");
            };
            let rep = pipeline::verify(
                &f,
                &pipeline::Options { stages, parity_trick, corrupt_encoding, max_bits: cli.max_scale },
            )?;
            println!("{rep}");
            Ok(if !rep.passed() {
                ExitCode::from(EXIT_MISMATCH)
            } else if rep.skipped() {
                ExitCode::from(EXIT_SCALE)
            } else {
                ExitCode::SUCCESS
            })
        }
        Cmd::GenKpt { s, output } => {
            if s == 0 || s > 8 {
                return Err(Error::ScaleGuard { what: "Fibonacci family index".into(), size: s.into(), limit: 8.into() }.into());
            }
            let fam = fibonacci_family(s)?;
            let set = infeasible_set(&fam)?;
            let mut text = formats::write_pip(&fam.pip);
            text.push_str(&format!("# p {} q {}\n# infeasible {}\n", fam.p, fam.q, set.len()));
            for y in &set {
                text.push_str(&format!("#   {} {}\n", y.y1, y.y2));
            }
            text.push_str(&format!(
                "# strictly convex {}\n# midpoint free {}\n",
                strictly_convex_chain(&set),
                midpoint_free(&set)
            ));
            emit(&text, output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::GenBilevel { input, parity_trick, solve, output } => {
            let b = build_bilevel(&encoding_of(&read(&input)?, parity_trick, cli.max_scale)?);
            let mut text = formats::write_bilevel(&b);
            if solve {
                let v = match solve_bilevel_brute(&b) {
                    Err(Error::ScaleGuard { .. }) => bilevel_value_semantic(&b)?,
                    r => r?,
                };
                text.push_str(&format!("# value {v}\n"));
            }
            emit(&text, output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::GenPareto { input, parity_trick, solve, output } => {
            let p = build_pareto(&encoding_of(&read(&input)?, parity_trick, cli.max_scale)?, parity_trick);
            let mut text = formats::write_pareto(&p);
            if solve {
                let (g, front) = solve_pareto_brute(&p)?;
                text.push_str(&format!("# min g {g} over {} Pareto minima\n", front.len()));
            }
            emit(&text, output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Props { seed, cases } => {
            let mut suites = props::run(seed, cases, cli.jobs)?;
            if let Some(dir) = std::env::var_os("SHORTPA_FIXTURES") {
                suites.push(props::check_fixtures(Path::new(&dir))?);
            }
            let mut ok = true;
            for s in &suites {
                let status = if s.failures.is_empty() { "ok" } else { "FAIL" };
                println!("{:<12} {:<4} {} cases", s.name, status, s.cases);
                for f in &s.failures {
                    println!("    {f}");
                }
                ok &= s.failures.is_empty();
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_MISMATCH) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let scale = e.chain().any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::ScaleGuard { .. })));
            ExitCode::from(if scale { EXIT_SCALE } else { EXIT_USAGE })
        }
    }
}

