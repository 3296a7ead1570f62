//! Command-line front end for the `eawg` library.
//!
//! Subcommands: `analyze`, `decide`, `calc`, `verify`, `enumerate`, and
//! `make-example`. Supporting classes are supplied inline (`--supp`) or as a
//! JSON file (`--supp-file`). Exit codes: 0 ok, 2 input error, 3 internal
//! inconsistency, 4 resource limit.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};

use clap::{Args, Parser, Subcommand};
use eawg::decide::decide;
use eawg::enumerate::{self, ExportFormat};
use eawg::hat::{self, HatElement};
use eawg::rep;
use eawg::semilattice::{
    make_family, parse_supp, serialize_supp, Root, SemilatticeContext, SubsetMask, SupportingClass,
};
use eawg::weyl::{self, WeylElement};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug)]
enum CliError {
    /// Bad user input: malformed class, word, or flag combination.
    Input(String),
    /// The oracles disagreed — must never happen.
    Internal(String),
    /// The request is well-formed but too large for this tool.
    Resource(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
            CliError::Resource(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Internal(msg) => write!(f, "internal inconsistency: {msg}"),
            CliError::Resource(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "eawg",
    version,
    about = "Presentation-by-conjugation decision procedure and exact group \
             arithmetic for type A1 extended affine Weyl groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a supporting class: rank, index, essential support, delta table
    Analyze(AnalyzeArgs),
    /// Decide whether the group admits the presentation by conjugation
    Decide(DecideArgs),
    /// Fold a word of reflections into normal form, with optional cross-checks
    Calc(CalcArgs),
    /// Run the randomized cross-validation suites
    Verify(VerifyArgs),
    /// Classify every supporting class of a rank and export the histogram
    Enumerate(EnumerateArgs),
    /// Print a standard family with a prescribed rank and index
    MakeExample(MakeExampleArgs),
}

#[derive(Args)]
struct SuppArgs {
    /// Inline supporting class, e.g. "rank=3; {1},{2},{3},{1,2}"
    #[arg(long, value_name = "TEXT")]
    supp: Option<String>,
    /// JSON file with {"rank":N,"supp":[[1],[2],...]}
    #[arg(long, value_name = "PATH", conflicts_with = "supp")]
    supp_file: Option<PathBuf>,
}

impl SuppArgs {
    fn load(&self) -> Result<SupportingClass, CliError> {
        match (&self.supp, &self.supp_file) {
            (Some(text), None) => parse_supp(text).map_err(|e| CliError::Input(e.to_string())),
            (None, Some(path)) => {
                let body = fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&body).map_err(|e| {
                    CliError::Input(format!("invalid class JSON in {}: {e}", path.display()))
                })
            }
            (None, None) => Err(CliError::Input(
                "a supporting class is required: pass --supp or --supp-file".into(),
            )),
            (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        }
    }

    fn is_given(&self) -> bool {
        self.supp.is_some() || self.supp_file.is_some()
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    supp: SuppArgs,
    /// Emit the summary as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DecideArgs {
    #[command(flatten)]
    supp: SuppArgs,
    /// Emit the full decision report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CalcArgs {
    #[command(flatten)]
    supp: SuppArgs,
    /// Also fold the word in the presented group and check its psi-image
    #[arg(long)]
    hat: bool,
    /// Also compute the matrix image and check it against the normal form
    #[arg(long)]
    matrix: bool,
    /// Word tokens r[±1;a1,...,aN], each an optional ^-1 suffix
    #[arg(required = true, value_name = "TOKEN")]
    word: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Nullity of the classes to exercise (1..=6)
    #[arg(long)]
    rank: u32,
    /// Random samples per suite
    #[arg(long, default_value_t = 500)]
    samples: u32,
    /// PRNG seed; the same seed reproduces the same checks
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    supp: SuppArgs,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Rank to sweep (full enumeration; 5 needs --allow-large)
    #[arg(long)]
    rank: u32,
    /// Also count permutation-canonical representatives
    #[arg(long)]
    dedup: bool,
    /// Permit the 2^26-class rank-5 sweep
    #[arg(long)]
    allow_large: bool,
    /// Worker threads; 0 uses the library default
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output file
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct MakeExampleArgs {
    /// Rank of the family
    #[arg(long)]
    rank: u32,
    /// Index of the family (rank ..= 2^rank - 1)
    #[arg(long)]
    index: u32,
    /// Emit the class as JSON instead of inline text
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    // Die quietly when the consumer closes the pipe (`eawg analyze | head`)
    // instead of panicking mid-print; Rust masks SIGPIPE by default.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Decide(args) => cmd_decide(&args),
        Command::Calc(args) => cmd_calc(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Enumerate(args) => cmd_enumerate(&args),
        Command::MakeExample(args) => cmd_make_example(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let ctx = SemilatticeContext::new(args.supp.load()?);
    if args.json {
        let delta: Vec<serde_json::Value> = ctx
            .pairs()
            .iter()
            .map(|&(r, s)| serde_json::json!({ "r": r, "s": s, "delta": ctx.delta(r, s) }))
            .collect();
        let value = serde_json::json!({
            "rank": ctx.rank(),
            "index": ctx.index(),
            "supp": ctx.supp(),
            "esupp": ctx.esupp(),
            "delta": delta,
        });
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
        return Ok(());
    }
    println!("rank: {}", ctx.rank());
    println!("index: {}", ctx.index());
    println!("supp: {}", serialize_supp(ctx.supp()));
    if ctx.esupp().is_empty() {
        println!("esupp: (none)");
    } else {
        let sets: Vec<String> = ctx.esupp().iter().map(|j| j.to_string()).collect();
        println!("esupp: {}", sets.join(","));
    }
    for &(r, s) in ctx.pairs() {
        println!("delta({r},{s}) = {}", ctx.delta(r, s));
    }
    Ok(())
}

fn cmd_decide(args: &DecideArgs) -> Result<(), CliError> {
    let ctx = SemilatticeContext::new(args.supp.load()?);
    let report = decide(&ctx);
    for check in &report.corollary_notes {
        if !check.consistent {
            return Err(CliError::Internal(format!(
                "closed-form check `{}` predicted {} but the computation disagrees",
                check.name, check.predicted
            )));
        }
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return Ok(());
    }
    println!("verdict: {:?}", report.verdict);
    println!("rank: {}", report.rank);
    println!("index: {}", report.index);
    println!("esupp size: {}", report.esupp_size);
    println!("n0: {}", report.n0);
    for entry in &report.kernel_basis {
        let sets: Vec<String> = entry.eps.iter().map(|j| j.to_string()).collect();
        println!(
            "kernel generator: eps on {}; m = {:?}",
            sets.join(","),
            entry.m
        );
    }
    if let Some(witness) = &report.witnesses {
        let terms: Vec<String> = witness
            .decomposition
            .iter()
            .map(|t| format!("z{}^{}", t.generator, t.coefficient))
            .collect();
        println!(
            "witness: z{} = {} (the reflection in alpha1 + tau{} is redundant)",
            witness.j0,
            if terms.is_empty() {
                "1".to_string()
            } else {
                terms.join(" * ")
            },
            witness.j0
        );
    }
    for check in &report.corollary_notes {
        println!(
            "note: {} predicts {} (consistent)",
            check.name, check.predicted
        );
    }
    Ok(())
}

/// Parses one word token `r[±1;a1,...,aN]` with an optional `^-1` suffix
/// (reflections are involutions, so the suffix is accepted and ignored).
fn parse_word_token(token: &str, rank: u32) -> Result<Root, CliError> {
    let bad = |msg: &str| CliError::Input(format!("bad word token `{token}`: {msg}"));
    let body = token.strip_suffix("^-1").unwrap_or(token);
    let inner = body
        .strip_prefix("r[")
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or_else(|| bad("expected r[±1;a1,...,aN]"))?;
    let (sign_text, coeff_text) = inner
        .split_once(';')
        .ok_or_else(|| bad("expected `;` between sign and coefficients"))?;
    let sign = match sign_text.trim() {
        "+1" | "1" => 1,
        "-1" => -1,
        other => return Err(bad(&format!("sign must be +1 or -1, got `{other}`"))),
    };
    let coeffs = coeff_text
        .split(',')
        .map(|part| part.trim().parse::<i64>())
        .collect::<Result<Vec<i64>, _>>()
        .map_err(|e| bad(&format!("coefficient: {e}")))?;
    if coeffs.len() != rank as usize {
        return Err(bad(&format!(
            "expected {rank} coefficients, got {}",
            coeffs.len()
        )));
    }
    Ok(Root::new(sign, coeffs))
}

fn parse_word(tokens: &[String], ctx: &SemilatticeContext) -> Result<Vec<Root>, CliError> {
    let joined = tokens.join(" ");
    let mut word = Vec::new();
    for token in joined.split_whitespace() {
        let root = parse_word_token(token, ctx.rank())?;
        if !ctx.is_valid_root(&root) {
            return Err(CliError::Input(format!(
                "root {root} is not in the root system of this class \
                 (its parity support is not a member of supp)"
            )));
        }
        word.push(root);
    }
    Ok(word)
}

fn cmd_calc(args: &CalcArgs) -> Result<(), CliError> {
    let ctx = SemilatticeContext::new(args.supp.load()?);
    let word = parse_word(&args.word, &ctx)?;
    let mut folded = WeylElement::identity(ctx.rank());
    for root in &word {
        let gen = weyl::from_reflection(&ctx, root).map_err(|e| CliError::Input(e.to_string()))?;
        folded = folded
            .mul(&gen)
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    println!("word: {} reflections", word.len());
    println!("weyl: {folded}");
    if args.hat {
        let mut hat_folded = HatElement::identity(&ctx);
        for root in &word {
            let gen = hat::generator(&ctx, root).map_err(|e| CliError::Internal(e.to_string()))?;
            hat_folded =
                hat::mul(&ctx, &hat_folded, &gen).map_err(|e| CliError::Internal(e.to_string()))?;
        }
        println!("hat: {}", hat_folded.render(&ctx));
        let image = hat::psi(&ctx, &hat_folded).map_err(|e| CliError::Internal(e.to_string()))?;
        if image == folded {
            println!("psi check: ok");
        } else {
            return Err(CliError::Internal(format!(
                "psi image `{image}` differs from the folded normal form `{folded}`"
            )));
        }
    }
    if args.matrix {
        let direct =
            rep::word_matrix(&ctx, &word).map_err(|e| CliError::Internal(e.to_string()))?;
        let from_normal_form =
            weyl::to_matrix(&ctx, &folded).map_err(|e| CliError::Internal(e.to_string()))?;
        let size = direct.size();
        for row in 0..size {
            let cells: Vec<String> = (0..size)
                .map(|col| direct.entry(row, col).to_string())
                .collect();
            println!("  [{}]", cells.join(", "));
        }
        if direct == from_normal_form {
            println!("matrix check: ok");
        } else {
            return Err(CliError::Internal(
                "word matrix differs from the normal form's matrix".into(),
            ));
        }
    }
    Ok(())
}

/// A uniformly seeded valid root over the class: parity drawn from supp,
/// even offsets in [−6, 6], random sign.
fn random_root(ctx: &SemilatticeContext, rng: &mut ChaCha8Rng) -> Root {
    let members = ctx.supp().members();
    let tau = members[rng.gen_range(0..members.len())];
    let sign = if rng.gen::<bool>() { 1 } else { -1 };
    let coeffs: Vec<i64> = (1..=ctx.rank())
        .map(|r| i64::from(tau.contains(r)) + 2 * rng.gen_range(-3..=3))
        .collect();
    Root::new(sign, coeffs)
}

fn random_class(rank: u32, rng: &mut ChaCha8Rng) -> SupportingClass {
    let mut members = vec![SubsetMask::EMPTY];
    members.extend((1..=rank).map(SubsetMask::singleton));
    members.extend(
        enumerate::free_slots(rank)
            .into_iter()
            .filter(|_| rng.gen::<bool>()),
    );
    SupportingClass::new(rank, members).expect("random classes are valid by construction")
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    if !(1..=6).contains(&args.rank) {
        return Err(CliError::Input(format!(
            "verify needs --rank in 1..=6, got {}",
            args.rank
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut classes: Vec<(String, SemilatticeContext)> = Vec::new();
    if args.supp.is_given() {
        let class = args.supp.load()?;
        if class.rank() != args.rank {
            return Err(CliError::Input(format!(
                "--supp has rank {} but --rank is {}",
                class.rank(),
                args.rank
            )));
        }
        classes.push(("given class".into(), SemilatticeContext::new(class)));
    } else {
        classes.push((
            "full lattice".into(),
            SemilatticeContext::new(SupportingClass::full_lattice(args.rank).unwrap()),
        ));
        classes.push((
            "minimal class".into(),
            SemilatticeContext::new(SupportingClass::minimal(args.rank).unwrap()),
        ));
        for k in 1..=2 {
            classes.push((
                format!("random class {k}"),
                SemilatticeContext::new(random_class(args.rank, &mut rng)),
            ));
        }
    }

    let samples = args.samples as usize;
    let mut failures: Vec<String> = Vec::new();

    // Suite 1: folded normal forms against the integer matrix representation.
    let mut checks = 0usize;
    for (label, ctx) in &classes {
        for _ in 0..samples {
            let len = rng.gen_range(0..=12);
            let word: Vec<Root> = (0..len).map(|_| random_root(ctx, &mut rng)).collect();
            let mut folded = WeylElement::identity(ctx.rank());
            for root in &word {
                folded = folded
                    .mul(&weyl::from_reflection(ctx, root).unwrap())
                    .unwrap();
            }
            let direct = rep::word_matrix(ctx, &word).unwrap();
            if weyl::to_matrix(ctx, &folded).unwrap() == direct {
                checks += 1;
            } else {
                failures.push(format!("weyl-matrix mismatch on {label}"));
            }
        }
    }
    println!("suite weyl-matrix: {checks} checks passed");

    // Suite 2: the defining relations and the psi homomorphism.
    let mut checks = 0usize;
    for (label, ctx) in &classes {
        for _ in 0..samples {
            let alpha = random_root(ctx, &mut rng);
            let beta = random_root(ctx, &mut rng);
            let g = hat::generator(ctx, &alpha).unwrap();
            let h = hat::generator(ctx, &beta).unwrap();
            let involution = hat::mul(ctx, &g, &g).unwrap().is_identity();
            let gh = hat::mul(ctx, &g, &h).unwrap();
            let conj = hat::mul(ctx, &gh, &g).unwrap();
            let image = hat::generator(ctx, &weyl::reflect_root(&alpha, &beta)).unwrap();
            let psi_ok = hat::psi(ctx, &gh).unwrap()
                == hat::psi(ctx, &g)
                    .unwrap()
                    .mul(&hat::psi(ctx, &h).unwrap())
                    .unwrap();
            if involution && conj == image && psi_ok {
                checks += 1;
            } else {
                failures.push(format!("hat relation failed on {label} at {alpha}, {beta}"));
            }
        }
    }
    println!("suite hat-relations: {checks} checks passed");

    // Suite 3: kernel basis elements are order-2 psi-trivial, and the
    // subgroup they generate has order exactly 2^n0.
    let mut checks = 0usize;
    for (label, ctx) in &classes {
        let basis = hat::kernel_basis(ctx);
        for u in &basis {
            let ok = hat::psi(ctx, u).unwrap().is_identity()
                && hat::mul(ctx, u, u).unwrap().is_identity();
            if ok {
                checks += 1;
            } else {
                failures.push(format!(
                    "kernel basis element not central of order 2 on {label}"
                ));
            }
        }
        if basis.len() <= 12 {
            let mut closure: Vec<HatElement> = vec![HatElement::identity(ctx)];
            let mut frontier = closure.clone();
            while let Some(elem) = frontier.pop() {
                for u in &basis {
                    let next = hat::mul(ctx, &elem, u).unwrap();
                    if !closure.contains(&next) {
                        closure.push(next.clone());
                        frontier.push(next);
                    }
                }
            }
            if closure.len() as u64 == 1u64 << basis.len() {
                checks += 1;
            } else {
                failures.push(format!(
                    "kernel closure has order {} instead of 2^{} on {label}",
                    closure.len(),
                    basis.len()
                ));
            }
        } else {
            println!(
                "note: skipping closure enumeration on {label} (n0 = {} too large)",
                basis.len()
            );
        }
    }
    println!("suite kernel: {checks} checks passed");

    // Suite 4: the reflection inverts translations, in all three models.
    let mut checks = 0usize;
    for (label, ctx) in &classes {
        for _ in 0..samples {
            let r = rng.gen_range(1..=ctx.rank());
            let k = rng.gen_range(-6i64..=6);
            let w = WeylElement::reflection_gen(ctx.rank());
            let t = WeylElement::translation_gen(ctx.rank(), r, k);
            let conj = w.mul(&t).unwrap().mul(&w).unwrap();
            let expected = WeylElement::translation_gen(ctx.rank(), r, -k);
            let hat_w = HatElement::reflection_gen(ctx);
            let hat_t = HatElement::translation_gen(ctx, r, k);
            let hat_conj = hat::mul(ctx, &hat::mul(ctx, &hat_w, &hat_t).unwrap(), &hat_w).unwrap();
            let hat_expected = HatElement::translation_gen(ctx, r, -k);
            let matrix_ok =
                weyl::to_matrix(ctx, &conj).unwrap() == weyl::to_matrix(ctx, &expected).unwrap();
            if conj == expected && hat_conj == hat_expected && matrix_ok {
                checks += 1;
            } else {
                failures.push(format!("conjugation failed on {label} at t[{r}]^{k}"));
            }
        }
    }
    println!("suite conjugation: {checks} checks passed");

    if failures.is_empty() {
        println!("all suites passed");
        Ok(())
    } else {
        Err(CliError::Internal(failures.swap_remove(0)))
    }
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<(), CliError> {
    let format: ExportFormat = args
        .format
        .parse()
        .map_err(|e: String| CliError::Input(e))?;
    if args.rank == 0 || args.rank > 5 {
        return Err(CliError::Resource(format!(
            "full sweeps are limited to ranks 1..=5; rank {} has 2^(2^{} - 1 - {}) classes",
            args.rank, args.rank, args.rank
        )));
    }
    if args.rank == 5 && !args.allow_large {
        return Err(CliError::Resource(
            "the rank-5 sweep visits 2^26 classes; pass --allow-large to proceed".into(),
        ));
    }
    let result = if args.rank == 5 {
        let total_done = AtomicU64::new(0);
        let meter = |done: u64, total: u64| {
            let pct = done * 100 / total;
            let last = total_done.load(Ordering::Relaxed);
            if pct > last
                && total_done
                    .compare_exchange(last, pct, Ordering::Relaxed, Ordering::Relaxed)
                    .is_ok()
            {
                eprint!("\rsweep progress: {pct:3}%");
                if pct == 100 {
                    eprintln!();
                }
            }
        };
        enumerate::sweep_with_progress(args.rank, args.dedup, args.workers, Some(&meter))
    } else {
        enumerate::sweep(args.rank, args.dedup, args.workers)
    }
    .map_err(|e| CliError::Resource(e.to_string()))?;
    enumerate::export(&result, &args.out, format)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", args.out.display())))?;
    let lacking = result.lacking_total();
    println!(
        "rank {}: {} classes, {} lacking the presentation; written to {}",
        result.rank,
        result.total_classes,
        lacking,
        args.out.display()
    );
    if let Some(dedup) = &result.dedup {
        let dedup_lacking: u64 = dedup.failures_by_index.iter().map(|e| e.count).sum();
        println!(
            "dedup: {} canonical representatives, {} lacking",
            dedup.total_classes, dedup_lacking
        );
    }
    Ok(())
}

fn cmd_make_example(args: &MakeExampleArgs) -> Result<(), CliError> {
    let class = make_family(args.rank, args.index).map_err(|e| CliError::Input(e.to_string()))?;
    if args.json {
        println!("{}", serde_json::to_string(&class).unwrap());
    } else {
        println!("{}", serialize_supp(&class));
    }
    Ok(())
}
