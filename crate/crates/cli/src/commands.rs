//! Argument grammar and dispatch.

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use losc_core::cancellation::{build_piece_table, check_c16, detect_order_obstruction, C16Verdict, DehnReducer, Position};
use losc_core::compat::{CompatReport, Direction};
use losc_core::order::{omega, OrderSpec, Sign};
use losc_core::words::{Alphabet, Letter};
use losc_core::zlattice::abelianization;
use serde_json::{json, Value};

use crate::meta::{describe, Built, Construction};
use crate::report::{Format, Report};
use crate::verify::{perfect_tau_failures, tau_transport_failures, verify_perfect, verify_rips, Run, Sampling};
use crate::{text, CliError, EXIT_FAIL, EXIT_OK, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "losc", version, about = "Left-orders, small cancellation and the Rips construction")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text, global = true)]
    pub format: FormatArg,
    /// Worker threads for `compat verify` (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Text,
    Doc,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the C'(1/6) condition.
    CheckC16(InputArgs),
    /// Look for the two-relator non-left-orderability pattern.
    Obstruct(InputArgs),
    /// Šunić orders on free groups.
    #[command(subcommand)]
    Order(OrderCmd),
    /// Reduce a word with Dehn's algorithm.
    Dehn {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        word: String,
    },
    /// Abelianisation via Smith normal form.
    Abelianize(InputArgs),
    /// Emit a construction as a presentation with a `#meta` line.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Compatibility checks on a generated context.
    #[command(subcommand)]
    Compat(CompatCmd),
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Presentation file.
    #[arg(long, required_unless_present = "stdin", conflicts_with = "stdin")]
    pub input: Option<PathBuf>,
    /// Read the presentation from standard input.
    #[arg(long)]
    pub stdin: bool,
}

#[derive(Subcommand, Debug)]
pub enum OrderCmd {
    /// Compare two words under the order given by a permutation of the generators.
    Cmp {
        /// The permutation word, e.g. "a b"; it also names the generators.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        /// Compare under the conjugate order by this word.
        #[arg(long)]
        conj: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GenCmd {
    /// Bowditch family: one relator per index.
    Bowditch {
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<i64>,
    },
    /// The perfect amalgam, optionally with extra Bowditch relators.
    Perfect {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        family: Vec<i64>,
    },
    /// The HNN construction over a presentation of Q.
    Rips {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the base F * P.
        #[arg(long)]
        nli: bool,
    },
    /// Add one free generator.
    Cantor {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "t")]
        name: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Inverse,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OrderArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum CompatCmd {
    /// Sign agreement of conjugate orders across the subgroup isomorphism.
    Verify {
        /// A `gen perfect` or `gen rips` output.
        #[arg(long, required_unless_present = "stdin", conflicts_with = "stdin")]
        ctx: Option<PathBuf>,
        #[arg(long)]
        stdin: bool,
        /// Test every conjugator of length at most this.
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Random conjugators per direction and order.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Length cap for random conjugators (default: longest generator + 3).
        #[arg(long)]
        max_len: Option<usize>,
        /// Subgroup elements are products of at most this many generators
        /// (default 2 for the amalgam, 1 for the HNN case).
        #[arg(long)]
        h_depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
        direction: DirectionArg,
        /// Domain order for the HNN case.
        #[arg(long, value_enum, default_value_t = OrderArg::Both)]
        order: OrderArg,
        /// Skip the case-hitting instances built from the construction.
        #[arg(long)]
        no_structured: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs it.
pub fn run<I, S>(argv: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: rendered }
            } else {
                Outcome { code, stdout: rendered, stderr: String::new() }
            };
        }
    };
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Doc => Format::Doc,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n.max(1));
    }
    let result = match pool.build() {
        Ok(pool) => dispatch(cli.command, stdin, &pool),
        Err(e) => Err(CliError::input(format!("thread pool: {e}"))),
    };
    match result {
        Ok((code, report)) => Outcome { code, stdout: report.render(format), stderr: String::new() },
        Err(e) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn read_source(path: Option<&PathBuf>, use_stdin: bool, stdin: &mut dyn Read) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match path {
        Some(p) if !use_stdin => {
            buf = std::fs::read(p).map_err(|e| CliError::input(format!("cannot read {}: {e}", p.display())))?;
        }
        _ => {
            stdin.read_to_end(&mut buf).map_err(|e| CliError::input(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(buf)
}

fn load(args: &InputArgs, stdin: &mut dyn Read) -> Result<(Vec<u8>, text::Parsed), CliError> {
    let bytes = read_source(args.input.as_ref(), args.stdin, stdin)?;
    let s = String::from_utf8(bytes.clone()).map_err(|_| CliError::input("input is not UTF-8"))?;
    Ok((bytes, text::parse(&s)?))
}

fn status(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn dispatch(cmd: Command, stdin: &mut dyn Read, pool: &rayon::ThreadPool) -> Result<(i32, Report), CliError> {
    match cmd {
        Command::CheckC16(args) => check_c16_cmd(&args, stdin),
        Command::Obstruct(args) => obstruct_cmd(&args, stdin),
        Command::Order(OrderCmd::Cmp { spec, lhs, rhs, conj }) => order_cmp(&spec, &lhs, &rhs, conj.as_deref()),
        Command::Dehn { input, word } => dehn_cmd(&input, &word, stdin),
        Command::Abelianize(args) => abelianize_cmd(&args, stdin),
        Command::Gen(g) => gen_cmd(g, stdin),
        Command::Compat(CompatCmd::Verify {
            ctx,
            stdin: use_stdin,
            radius,
            samples,
            max_len,
            h_depth,
            direction,
            order,
            no_structured,
            seed,
        }) => {
            let bytes = read_source(ctx.as_ref(), use_stdin, stdin)?;
            let s = String::from_utf8(bytes.clone()).map_err(|_| CliError::input("input is not UTF-8"))?;
            let parsed = text::parse(&s)?;
            let sampling = Sampling { radius, samples, max_len, structured: !no_structured, seed };
            pool.install(|| compat_cmd(&bytes, &parsed, &sampling, h_depth, direction, order))
        }
    }
}

fn position_doc(p: Position) -> Value {
    json!({ "relator": p.relator, "inverted": p.inverted, "offset": p.offset })
}

fn check_c16_cmd(args: &InputArgs, stdin: &mut dyn Read) -> Result<(i32, Report), CliError> {
    let (bytes, parsed) = load(args, stdin)?;
    let pres = &parsed.presentation;
    let verdict = check_c16(pres.relators());
    let table = build_piece_table(pres.relators());
    let mut r = Report::new("check-c16", if verdict.passed() { "pass" } else { "fail" }).with_input(&bytes);
    r.set("relators", pres.relators().len());
    r.set("min_relator_length", pres.relators().iter().map(|c| c.len()).min().unwrap_or(0));
    r.set("max_piece_length", table.max_piece());
    r.line(format!("relators: {}", pres.relators().len()));
    r.line(format!("longest piece: {}", table.max_piece()));
    match &verdict {
        C16Verdict::Pass => {}
        C16Verdict::ShortRelator { relator, length } => {
            r.set("witness", json!({ "kind": "short_relator", "relator": relator, "length": length }));
            r.line(format!("witness: {verdict}"));
        }
        C16Verdict::LongPiece(w) => {
            let piece = table.position_word(w.first).prefix(w.length);
            r.set(
                "witness",
                json!({
                    "kind": "long_piece",
                    "length": w.length,
                    "piece": pres.alphabet.format_word(&piece),
                    "first": position_doc(w.first),
                    "second": position_doc(w.second),
                }),
            );
            r.line(format!("witness: {verdict}"));
            r.line(format!("piece: {}", pres.alphabet.format_word(&piece)));
        }
    }
    Ok((status(verdict.passed()), r))
}

fn obstruct_cmd(args: &InputArgs, stdin: &mut dyn Read) -> Result<(i32, Report), CliError> {
    let (bytes, parsed) = load(args, stdin)?;
    let pres = &parsed.presentation;
    match detect_order_obstruction(pres) {
        Some(o) => {
            let (x, y) = o.generators;
            let names = [pres.alphabet.name(Letter(x)), pres.alphabet.name(Letter(y))];
            let mut r = Report::new("obstruct", "obstruction").with_input(&bytes);
            r.set("positive_relator", o.positive);
            r.set("mixed_relator", o.mixed);
            r.set("generators", json!(names));
            r.line(format!(
                "relators {} and {} leave no left-order on the subgroup <{}, {}>",
                o.positive, o.mixed, names[0], names[1]
            ));
            Ok((EXIT_FAIL, r))
        }
        None => {
            let mut r = Report::new("obstruct", "inconclusive").with_input(&bytes);
            r.line("no two-relator sign obstruction found");
            Ok((EXIT_OK, r))
        }
    }
}

fn order_cmp(spec: &str, lhs: &str, rhs: &str, conj: Option<&str>) -> Result<(i32, Report), CliError> {
    let alphabet = Alphabet::new(spec.split_whitespace()).map_err(|e| CliError::input(format!("--spec: {e}")))?;
    let order = OrderSpec::natural(alphabet.rank());
    let parse = |flag: &str, w: &str| alphabet.parse_word(w).map_err(|e| CliError::input(format!("{flag}: {e}")));
    let g = parse("--lhs", lhs)?;
    let h = parse("--rhs", rhs)?;
    let f = match conj {
        Some(c) => parse("--conj", c)?,
        None => losc_core::words::Word::empty(),
    };
    let diff = f.mul(&g.inverse()).mul(&h).mul(&f.inverse());
    let sign = order.sign(&diff);
    let leq = sign != Sign::Negative;
    let mut r = Report::new("order cmp", if leq { "lhs <= rhs" } else { "lhs > rhs" });
    r.set("difference", alphabet.format_word(&diff));
    r.set("tau", order.tau(&diff));
    r.set("omega", omega(&diff));
    r.set("sign", sign.to_string());
    r.line(format!(
        "tau + omega of {} = {}",
        alphabet.format_word(&diff),
        order.score(&diff)
    ));
    Ok((EXIT_OK, r))
}

fn dehn_cmd(args: &InputArgs, word: &str, stdin: &mut dyn Read) -> Result<(i32, Report), CliError> {
    let (bytes, parsed) = load(args, stdin)?;
    let pres = &parsed.presentation;
    let g = pres.alphabet.parse_word(word).map_err(|e| CliError::input(format!("--word: {e}")))?;
    let dehn = DehnReducer::new(pres).map_err(|e| CliError::input(e.to_string()))?;
    let reduced = dehn.reduce(&g);
    let mut r = Report::new("dehn", if reduced.is_empty() { "identity" } else { "nontrivial" }).with_input(&bytes);
    r.set("word", pres.alphabet.format_word(&g));
    r.set("reduced", pres.alphabet.format_word(&reduced));
    r.line(format!("reduced: {}", pres.alphabet.format_word(&reduced)));
    Ok((EXIT_OK, r))
}

fn abelianize_cmd(args: &InputArgs, stdin: &mut dyn Read) -> Result<(i32, Report), CliError> {
    let (bytes, parsed) = load(args, stdin)?;
    let ab = abelianization(&parsed.presentation);
    let mut r = Report::new("abelianize", "ok").with_input(&bytes);
    let torsion: Vec<String> = ab.torsion().map(|d| d.to_string()).collect();
    r.set("factors", json!(torsion));
    r.set("free_rank", ab.free_rank);
    r.set("perfect", ab.is_trivial());
    r.line(ab.to_string());
    Ok((EXIT_OK, r))
}

fn gen_cmd(g: GenCmd, stdin: &mut dyn Read) -> Result<(i32, Report), CliError> {
    let (construction, input) = match g {
        GenCmd::Bowditch { indices } => (Construction::Bowditch { indices }, None),
        GenCmd::Perfect { seed, family } => (Construction::Perfect { seed, family }, None),
        GenCmd::Rips { input, seed, nli } => {
            let (bytes, parsed) = load(&input, stdin)?;
            (Construction::Rips { seed, nli, q: text::format(&parsed.presentation, None) }, Some(bytes))
        }
        GenCmd::Cantor { input, name } => {
            let (bytes, parsed) = load(&input, stdin)?;
            (Construction::Cantor { name, base: text::format(&parsed.presentation, None) }, Some(bytes))
        }
    };
    let built = construction.build()?;
    let meta = describe(&construction, &built);
    let pres = built.presentation();
    let body = text::format(pres, Some(&meta));
    let mut r = Report::new("gen", "ok");
    if let Some(b) = input {
        r = r.with_input(&b);
    }
    r.set("generators", pres.rank());
    r.set("relators", pres.relators().len());
    r.set("presentation", text::format(pres, None));
    r.set("meta", meta);
    r.raw_text = Some(body);
    Ok((EXIT_OK, r))
}

fn directions(d: DirectionArg) -> Vec<Direction> {
    match d {
        DirectionArg::Forward => vec![Direction::Forward],
        DirectionArg::Inverse => vec![Direction::Inverse],
        DirectionArg::Both => vec![Direction::Forward, Direction::Inverse],
    }
}

fn run_doc(run: &Run, alphabet: &Alphabet) -> Value {
    let rep: &CompatReport = &run.report;
    let witnesses: Vec<Value> = rep
        .failures
        .iter()
        .map(|f| {
            json!({
                "g": alphabet.format_word(&f.g),
                "f": alphabet.format_word(&f.f),
                "case": f.case.to_string(),
                "h": f.h.iter().map(|&(i, inv)| if inv { format!("h{}^-1", i + 1) } else { format!("h{}", i + 1) }).collect::<Vec<_>>(),
                "domain_sign": f.lhs.to_string(),
                "codomain_sign": f.rhs.to_string(),
            })
        })
        .collect();
    json!({
        "direction": run.direction.label(),
        "order": run.order,
        "passed": rep.passed(),
        "conjugators": rep.conjugators,
        "failed_conjugators": rep.failed_conjugators,
        "comparisons": rep.comparisons,
        "agreed": rep.agreed,
        "failures": rep.failure_count(),
        "oracle_limited": rep.oracle_limited,
        "omega_mismatches": rep.omega_mismatches,
        "score_mismatches": rep.score_mismatches,
        "case_hits": rep.case_hits,
        "witnesses": witnesses,
    })
}

fn run_line(run: &Run) -> String {
    let rep = &run.report;
    let order = run.order.map_or(String::new(), |j| format!(" o{j}"));
    format!(
        "{}{}: {} conjugators, {} comparisons, {} failures, {} oracle-limited, {} score mismatches",
        run.direction.label(),
        order,
        rep.conjugators,
        rep.comparisons,
        rep.failure_count(),
        rep.oracle_limited,
        rep.score_mismatches
    )
}

fn compat_cmd(
    bytes: &[u8],
    parsed: &text::Parsed,
    sampling: &Sampling,
    h_depth: Option<usize>,
    direction: DirectionArg,
    order: OrderArg,
) -> Result<(i32, Report), CliError> {
    let (_, built) = Construction::from_parsed(parsed)?;
    let dirs = directions(direction);
    let (runs, tau_failures) = match &built {
        Built::Perfect(p) => (verify_perfect(p, &dirs, sampling, h_depth.unwrap_or(2)), perfect_tau_failures(p)),
        Built::Rips(r) => {
            let orders = match order {
                OrderArg::One => vec![1],
                OrderArg::Two => vec![2],
                OrderArg::Both => vec![1, 2],
            };
            (verify_rips(r, &dirs, &orders, sampling, h_depth.unwrap_or(1)), tau_transport_failures(r))
        }
        _ => return Err(CliError::input("compat verify needs a `gen perfect` or `gen rips` context")),
    };
    let pass = tau_failures.is_empty() && runs.iter().all(|r| r.report.passed());
    let mut rep = Report::new("compat verify", if pass { "pass" } else { "fail" }).with_input(bytes);
    let alphabet = &parsed.presentation.alphabet;
    rep.set("tau_transport_failures", json!(tau_failures));
    rep.set("runs", Value::Array(runs.iter().map(|r| run_doc(r, alphabet)).collect()));
    rep.line(format!("tau transport: {} failing pairs", tau_failures.len()));
    for run in &runs {
        rep.line(run_line(run));
        for f in run.report.failures.iter().take(3) {
            rep.line(format!(
                "  witness: case {} g = {} f = {} ({} vs {})",
                f.case,
                alphabet.format_word(&f.g),
                alphabet.format_word(&f.f),
                f.lhs,
                f.rhs
            ));
        }
    }
    Ok((status(pass), rep))
}
