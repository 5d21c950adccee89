use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use snumber_core::dessin::{checked_sign, Dessin};
use snumber_core::insertion::enumerate_dessins;
use snumber_core::oracle::{
    brute_force_dessin_codes, brute_force_tree_codes, brute_force_tree_codes_uncapped,
    euler_numbers, DEFAULT_DESSIN_CAP, DEFAULT_TREE_CAP,
};
use snumber_core::partition::{
    all_type_lists, nonvanishing, parse_partition_list, Parity, Partition, TypeList,
};
use snumber_core::series::{
    admissible_parity, asymptotic_check, fit_basis, fit_from_engine, leading_coefficient, QFPoly,
    SNumberTable,
};
use snumber_core::snumber::{invariance_check, s_number, Mode};
use snumber_core::trees::{
    enumerate_real_trees, signed_sum, tree_disorders, tree_side, tree_sign, tree_to_dot,
    tree_weight, Color, RealBWTree,
};

mod cache;
use cache::Cache;

#[derive(Parser)]
#[command(
    name = "snumber",
    version,
    about = "Signed counts of real polynomials with prescribed critical values"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Full branch types, e.g. "3,1;2,2".
    #[arg(long = "type", global = true, value_name = "TYPES")]
    type_list: Option<String>,
    /// Reduced types, e.g. "2,2;1"; needs --degree or --simple outside `series`.
    #[arg(long, global = true, value_name = "TYPES")]
    reduced: Option<String>,
    /// Degree n for --reduced.
    #[arg(long, global = true)]
    degree: Option<u32>,
    /// Append m simple branch values to --reduced (n is then forced).
    #[arg(long, global = true, value_name = "M")]
    simple: Option<u32>,
    #[arg(long, global = true, default_value_t = Mode::Multiplicative)]
    mode: Mode,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON-lines s-number cache.
    #[arg(long, global = true, env = "SNUMBER_CACHE")]
    cache: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    White,
    Black,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Real black-and-white trees.
    #[command(subcommand)]
    Trees(TreesCmd),
    /// Increasing real dessins of a type list.
    #[command(subcommand)]
    Dessins(DessinsCmd),
    /// The s-number of a type list.
    Snumber,
    /// s-numbers of every ordering of a type list.
    Invariance {
        /// Check this many random lists instead of --type.
        #[arg(long)]
        sample: Option<usize>,
        /// Largest degree for --sample.
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
    },
    /// Generating series of s-numbers.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Brute-force references.
    #[command(subcommand)]
    Oracle(OracleCmd),
    #[command(subcommand)]
    Export(ExportCmd),
}

#[derive(Args)]
struct TreeFamily {
    /// Black degrees, e.g. "4,2,2".
    #[arg(long)]
    black: String,
    /// White degrees.
    #[arg(long)]
    white: String,
}

#[derive(Subcommand)]
enum TreesCmd {
    Enumerate(TreeFamily),
    /// Signed count of white-side and/or black-side trees.
    Sum {
        #[command(flatten)]
        family: TreeFamily,
        #[arg(long, value_enum, default_value_t = Side::Both)]
        side: Side,
    },
}

#[derive(Subcommand)]
enum DessinsCmd {
    Enumerate,
    /// Signs of all dessins and their sum.
    Sign,
}

#[derive(Subcommand)]
enum SeriesCmd {
    /// Fit the series of --reduced exactly from s-numbers.
    Fit {
        #[arg(long, value_enum)]
        parity: ParityArg,
        /// Held-out coefficients beyond the required two.
        #[arg(long, default_value_t = 0)]
        extra: u32,
    },
    /// Coefficients s(0..=upto), zero off the parity class.
    Coeff {
        #[arg(long, value_enum)]
        parity: ParityArg,
        #[arg(long)]
        upto: u32,
    },
    /// Closed-form top coefficient.
    Leading {
        #[arg(long, value_enum)]
        parity: ParityArg,
    },
    /// Compare the vanishing predicate with an s-number table.
    Vanishing {
        #[arg(long, value_enum)]
        parity: ParityArg,
        #[arg(long, default_value_t = 6)]
        upto: u32,
    },
    /// Growth of coefficients of a fitted or given series.
    Asymptotics {
        #[arg(long, value_enum)]
        parity: ParityArg,
        #[arg(long, default_value_t = 200)]
        m_max: u32,
        /// Series in text form, e.g. "g * (1)"; default: fit --reduced.
        #[arg(long)]
        series: Option<String>,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exhaustive dessin search for --type.
    Dessins {
        #[arg(long, default_value_t = DEFAULT_DESSIN_CAP)]
        cap: u32,
    },
    /// All real trees with a given edge count.
    Trees {
        #[arg(long)]
        edges: u32,
        #[arg(long, default_value_t = DEFAULT_TREE_CAP)]
        cap: u32,
    },
    /// Alternating permutation counts.
    Euler {
        #[arg(long)]
        upto: usize,
    },
}

#[derive(Subcommand)]
enum ExportCmd {
    /// DOT for the dessins of --type, or for one tree.
    Dot {
        /// Canonical tree code, e.g. "b[(())]w[]".
        #[arg(long)]
        tree: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Engine(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<snumber_core::Error> for Failure {
    fn from(e: snumber_core::Error) -> Self {
        Failure::Engine(e.into())
    }
}

type Run<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Run<T> {
    Err(Failure::Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Engine(e)) => {
            match e.downcast_ref::<snumber_core::Error>() {
                Some(snumber_core::Error::InvalidDessin(v)) => {
                    eprintln!("error: invalid dessin");
                    for line in v {
                        eprintln!("  - {line}");
                    }
                }
                _ => eprintln!("error: {e:#}"),
            }
            ExitCode::from(1)
        }
    }
}

struct Ctx<'a> {
    g: &'a Global,
    cache: Option<Cache>,
}

impl Ctx<'_> {
    fn s_number(&self, t: &TypeList) -> anyhow::Result<i128> {
        if let Some(c) = &self.cache {
            if let Some(v) = c.get(t) {
                return Ok(v);
            }
        }
        let v = s_number(t, self.g.mode)?;
        if let Some(c) = &self.cache {
            c.put(t, v)?;
        }
        Ok(v)
    }

    fn table(
        &self,
        lambdas: &[Partition],
        parity: Parity,
        m_max: u32,
    ) -> anyhow::Result<SNumberTable> {
        let table = SNumberTable::build_with(lambdas, parity, m_max, |t| {
            self.s_number(t)
                .map(BigInt::from)
                .map_err(|e| snumber_core::Error::Precondition(format!("{e:#}")))
        })?;
        Ok(table)
    }

    fn emit(&self, text: String) -> Run<()> {
        match &self.g.out {
            Some(p) => {
                std::fs::write(p, text).map_err(|e| anyhow!("writing {}: {e}", p.display()))?
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(|e| anyhow!(e))?;
            }
        }
        Ok(())
    }

    fn type_list(&self) -> Run<TypeList> {
        let g = self.g;
        match (&g.type_list, &g.reduced) {
            (Some(_), Some(_)) => usage("give either --type or --reduced, not both"),
            (Some(t), None) => {
                if g.degree.is_some() || g.simple.is_some() {
                    return usage("--degree/--simple only apply to --reduced");
                }
                Ok(TypeList::parse(t)?)
            }
            (None, Some(r)) => {
                let lambdas = parse_partition_list(r)?;
                match (g.degree, g.simple) {
                    (Some(n), None) => {
                        let nonempty: Vec<Partition> =
                            lambdas.into_iter().filter(|l| !l.is_empty()).collect();
                        Ok(TypeList::from_reduced(&nonempty, n)?)
                    }
                    (None, Some(m)) => match SNumberTable::type_list(&lambdas, m)? {
                        Some(t) => Ok(t),
                        None => Err(anyhow!("reduced types do not fit the forced degree").into()),
                    },
                    _ => usage("--reduced needs exactly one of --degree and --simple"),
                }
            }
            (None, None) => usage("this command needs --type or --reduced"),
        }
    }

    fn lambdas(&self) -> Run<Vec<Partition>> {
        match &self.g.reduced {
            Some(r) => Ok(parse_partition_list(r)?),
            None => usage("series commands need --reduced (use \"\" for the empty list)"),
        }
    }

    fn formats(&self, allowed: &[Format]) -> Run<Format> {
        if allowed.contains(&self.g.format) {
            Ok(self.g.format)
        } else {
            let name = self
                .g
                .format
                .to_possible_value()
                .expect("named")
                .get_name()
                .to_string();
            usage(format!("--format {name} is not available for this command"))
        }
    }
}

fn json_string<T: serde::Serialize>(v: &T) -> Run<String> {
    Ok(serde_json::to_string_pretty(v).map_err(|e| anyhow!(e))? + "\n")
}

fn hex(code: &[u8]) -> String {
    code.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn color_name(c: Color) -> &'static str {
    match c {
        Color::Black => "black",
        Color::White => "white",
    }
}

fn run(cli: &Cli) -> Run<()> {
    let cache = match &cli.global.cache {
        Some(p) => Some(Cache::open(p)?),
        None => None,
    };
    let ctx = Ctx {
        g: &cli.global,
        cache,
    };
    match &cli.command {
        Command::Trees(c) => trees(&ctx, c),
        Command::Dessins(c) => dessins(&ctx, c),
        Command::Snumber => {
            let fmt = ctx.formats(&[Format::Text, Format::Json])?;
            let t = ctx.type_list()?;
            let s = ctx.s_number(&t)?;
            ctx.emit(match fmt {
                Format::Json => {
                    json_string(&json!({"type": t.to_string(), "degree": t.degree(), "s": s}))?
                }
                _ => format!("{s}\n"),
            })
        }
        Command::Invariance { sample, max_degree } => invariance(&ctx, *sample, *max_degree),
        Command::Series(c) => series(&ctx, c),
        Command::Oracle(c) => oracle(&ctx, c),
        Command::Export(ExportCmd::Dot { tree }) => {
            let text = match tree {
                Some(code) => tree_to_dot(&RealBWTree::parse(code)?, true),
                None => {
                    let t = ctx.type_list()?;
                    enumerate_dessins(&t)?
                        .iter()
                        .map(Dessin::to_dot)
                        .collect::<String>()
                }
            };
            ctx.emit(text)
        }
    }
}

fn trees(ctx: &Ctx, c: &TreesCmd) -> Run<()> {
    let family = match c {
        TreesCmd::Enumerate(f) | TreesCmd::Sum { family: f, .. } => f,
    };
    let lb = Partition::parse(&family.black)?;
    let lw = Partition::parse(&family.white)?;
    match c {
        TreesCmd::Enumerate(_) => {
            let fmt = ctx.formats(&[Format::Text, Format::Json, Format::Csv, Format::Dot])?;
            let ts = enumerate_real_trees(&lb, &lw)?;
            let rows: Vec<_> = ts
                .iter()
                .map(|t| {
                    (
                        t.canonical(),
                        tree_sign(t),
                        color_name(tree_side(t)),
                        tree_weight(t),
                        tree_disorders(t),
                    )
                })
                .collect();
            ctx.emit(match fmt {
                Format::Json => json_string(
                    &rows
                        .iter()
                        .map(|(c, s, side, w, d)| json!({"tree": c, "sign": s, "side": side, "weight": w, "disorders": d}))
                        .collect::<Vec<_>>(),
                )?,
                Format::Csv => {
                    let mut s = String::from("tree,sign,side,weight,disorders\n");
                    for (c, sg, side, w, d) in &rows {
                        let _ = writeln!(s, "{c},{sg},{side},{w},{d}");
                    }
                    s
                }
                Format::Dot => ts.iter().map(|t| tree_to_dot(t, true)).collect(),
                Format::Text => {
                    let mut s = String::new();
                    for (c, sg, side, w, d) in &rows {
                        let _ = writeln!(s, "{c}  sign {sg:+}  side {side}  weight {w:+}  disorders {d}");
                    }
                    let _ = writeln!(s, "{} trees", rows.len());
                    s
                }
            })
        }
        TreesCmd::Sum { side, .. } => {
            let fmt = ctx.formats(&[Format::Text, Format::Json, Format::Csv])?;
            let mut sums = Vec::new();
            if *side != Side::Black {
                sums.push(("white", signed_sum(&lb, &lw, Color::White)?));
            }
            if *side != Side::White {
                sums.push(("black", signed_sum(&lb, &lw, Color::Black)?));
            }
            ctx.emit(match fmt {
                Format::Json => json_string(
                    &sums
                        .iter()
                        .map(|(k, v)| (k.to_string(), *v))
                        .collect::<std::collections::BTreeMap<_, _>>(),
                )?,
                Format::Csv => sums
                    .iter()
                    .fold(String::from("side,sum\n"), |mut s, (k, v)| {
                        let _ = writeln!(s, "{k},{v}");
                        s
                    }),
                _ => sums.iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
            })
        }
    }
}

fn dessins(ctx: &Ctx, c: &DessinsCmd) -> Run<()> {
    let t = ctx.type_list()?;
    let ds = enumerate_dessins(&t)?;
    let signs: Vec<i32> = ds
        .iter()
        .map(|d| checked_sign(d, &t))
        .collect::<Result<_, _>>()?;
    match c {
        DessinsCmd::Enumerate => {
            let fmt = ctx.formats(&[Format::Text, Format::Json, Format::Dot])?;
            ctx.emit(match fmt {
                Format::Json => json_string(
                    &ds.iter()
                        .zip(&signs)
                        .map(|(d, s)| json!({"code": hex(&d.canonical_code()), "sign": s, "dessin": d}))
                        .collect::<Vec<_>>(),
                )?,
                Format::Dot => ds.iter().map(Dessin::to_dot).collect(),
                _ => {
                    let mut s = String::new();
                    for (i, (d, sg)) in ds.iter().zip(&signs).enumerate() {
                        let _ = writeln!(
                            s,
                            "#{i} sign {sg:+} disorders {} code {}",
                            d.disorders()?,
                            hex(&d.canonical_code())
                        );
                    }
                    let _ = writeln!(s, "{} dessins", ds.len());
                    s
                }
            })
        }
        DessinsCmd::Sign => {
            let fmt = ctx.formats(&[Format::Text, Format::Json])?;
            let total: i64 = signs.iter().map(|&s| s as i64).sum();
            ctx.emit(match fmt {
                Format::Json => {
                    json_string(&json!({"type": t.to_string(), "signs": signs, "s": total}))?
                }
                _ => {
                    let ss: Vec<String> = signs.iter().map(|s| format!("{s:+}")).collect();
                    format!("signs: [{}]; s = {total}\n", ss.join(", "))
                }
            })
        }
    }
}

fn invariance(ctx: &Ctx, sample: Option<usize>, max_degree: u32) -> Run<()> {
    let fmt = ctx.formats(&[Format::Text, Format::Json])?;
    let lists = match sample {
        None => vec![ctx.type_list()?],
        Some(count) => {
            if max_degree < 2 {
                return usage("--max-degree must be at least 2");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.g.seed);
            (0..count)
                .map(|_| {
                    let n = rng.gen_range(2..=max_degree);
                    let all = all_type_lists(n, 3);
                    all[rng.gen_range(0..all.len())].clone()
                })
                .collect()
        }
    };
    let mut reports = Vec::new();
    for t in &lists {
        reports.push(invariance_check(t, ctx.g.mode)?);
    }
    ctx.emit(match fmt {
        Format::Json => json_string(&reports)?,
        _ if sample.is_none() => format!("{}\n", reports[0]),
        _ => lists
            .iter()
            .zip(&reports)
            .map(|(t, r)| format!("{t}: {r}\n"))
            .collect(),
    })?;
    if reports.iter().any(|r| !r.invariant) {
        return Err(anyhow!("s-number depends on the ordering").into());
    }
    Ok(())
}

fn series(ctx: &Ctx, c: &SeriesCmd) -> Run<()> {
    let lambdas = ctx.lambdas()?;
    match c {
        SeriesCmd::Fit { parity, extra } => {
            let fmt = ctx.formats(&[Format::Text, Format::Json])?;
            let parity = Parity::from(*parity);
            let unknowns = fit_basis(&lambdas, parity).len() as u32;
            let r = admissible_parity(&lambdas, parity);
            let mut count = unknowns + 2 + extra;
            let report = loop {
                let table = ctx.table(&lambdas, parity, r + 2 * (count - 1))?;
                match snumber_core::series::fit_f_report(&table) {
                    Err(snumber_core::Error::InsufficientData { .. })
                        if count < 4 * unknowns + 8 =>
                    {
                        count += 2
                    }
                    other => break other?,
                }
            };
            ctx.emit(match fmt {
                Format::Json => json_string(&report)?,
                _ => format!(
                    "{}\nfitted on m = {:?}; held out m = {:?}\n",
                    report.series, report.fitted, report.held_out
                ),
            })
        }
        SeriesCmd::Coeff { parity, upto } => {
            let fmt = ctx.formats(&[Format::Text, Format::Json, Format::Csv])?;
            let table = ctx.table(&lambdas, (*parity).into(), *upto)?;
            let all: Vec<BigInt> = (0..=*upto)
                .map(|m| table.values.get(&m).cloned().unwrap_or_default())
                .collect();
            ctx.emit(match fmt {
                Format::Json => {
                    json_string(&all.iter().map(|v| v.to_string()).collect::<Vec<_>>())?
                }
                Format::Csv => table.to_csv(),
                _ => {
                    let s: Vec<String> = all.iter().map(|v| v.to_string()).collect();
                    format!("{}\n", s.join(", "))
                }
            })
        }
        SeriesCmd::Leading { parity } => {
            let fmt = ctx.formats(&[Format::Text, Format::Json])?;
            let ((a, b), v) = leading_coefficient(&lambdas, (*parity).into())?;
            ctx.emit(match fmt {
                Format::Json => json_string(&json!({"q": a, "f": b, "value": v.to_string()}))?,
                _ => format!("q^{a} * f^{b}: {v}\n"),
            })
        }
        SeriesCmd::Vanishing { parity, upto } => {
            let fmt = ctx.formats(&[Format::Text, Format::Json])?;
            let parity = Parity::from(*parity);
            let table = ctx.table(&lambdas, parity, *upto)?;
            let predicate = nonvanishing(&lambdas, parity);
            let zero = table.is_zero();
            let consistent = zero != predicate;
            ctx.emit(match fmt {
                Format::Json => json_string(&json!({
                    "nonvanishing": predicate, "table_zero": zero, "consistent": consistent
                }))?,
                _ => format!(
                    "nonvanishing: {predicate}; table zero: {zero}; consistent: {consistent}\n"
                ),
            })
        }
        SeriesCmd::Asymptotics {
            parity,
            m_max,
            series,
        } => {
            let fmt = ctx.formats(&[Format::Text, Format::Json, Format::Csv])?;
            let parity = Parity::from(*parity);
            let f: QFPoly = match series {
                Some(s) => s.parse()?,
                None => fit_from_engine(&lambdas, parity, ctx.g.mode, 0)?.series,
            };
            // q^a f^b (times the even g) is odd exactly when a + b is
            let m_parity = match f.terms().keys().next() {
                Some(&(a, b)) if (a + b) % 2 == 1 => Parity::Odd,
                _ => Parity::Even,
            };
            let rep = asymptotic_check(&f, m_parity, *m_max)?;
            ctx.emit(match fmt {
                Format::Json => json_string(&rep)?,
                Format::Csv => {
                    rep.ratios
                        .iter()
                        .fold(String::from("m,ratio\n"), |mut s, (m, r)| {
                            let _ = writeln!(s, "{m},{r:.9}");
                            s
                        })
                }
                _ => {
                    let mut s = format!("series: {f}\n");
                    for target in [20, 40, 60, 100, 150] {
                        if let Some(r) = rep.ratio_at(target) {
                            let _ = writeln!(
                                s,
                                "m = {:>3}: ratio {r:.6} (4/pi^2 = {:.6})",
                                rep.admissible_at_least(target),
                                snumber_core::series::POLE_RATIO
                            );
                        }
                    }
                    if let Some(inc) = rep.trend_increasing(40, m_max.saturating_sub(2), 20) {
                        let _ = writeln!(s, "ln|s(m)|/(m ln m) increasing on 40..: {inc}");
                    }
                    s
                }
            })
        }
    }
}

fn oracle(ctx: &Ctx, c: &OracleCmd) -> Run<()> {
    match c {
        OracleCmd::Dessins { cap } => {
            let fmt = ctx.formats(&[Format::Text, Format::Json])?;
            if *cap > DEFAULT_DESSIN_CAP {
                eprintln!(
                    "warning: raising the dessin oracle cap to {cap}; this search is factorial"
                );
            }
            let t = ctx.type_list()?;
            let codes = brute_force_dessin_codes(&t, *cap)?;
            let hexes: Vec<String> = codes.iter().map(|c| hex(c)).collect();
            ctx.emit(match fmt {
                Format::Json => json_string(
                    &json!({"type": t.to_string(), "count": codes.len(), "codes": hexes}),
                )?,
                _ => format!(
                    "{} dessins\n{}",
                    codes.len(),
                    hexes.iter().map(|h| format!("{h}\n")).collect::<String>()
                ),
            })
        }
        OracleCmd::Trees { edges, cap } => {
            let fmt = ctx.formats(&[Format::Text, Format::Json, Format::Csv])?;
            let buckets = if *edges <= *cap.min(&DEFAULT_TREE_CAP) {
                brute_force_tree_codes(*edges)?
            } else if edges <= cap {
                eprintln!(
                    "warning: raising the tree oracle cap to {cap}; this search is exponential"
                );
                brute_force_tree_codes_uncapped(*edges)?
            } else {
                return Err(snumber_core::Error::CapExceeded(format!(
                    "tree oracle limited to {cap} edges, asked for {edges}"
                ))
                .into());
            };
            let rows: Vec<(String, String, usize)> = buckets
                .iter()
                .map(|((b, w), v)| (b.to_string(), w.to_string(), v.len()))
                .collect();
            let total: usize = rows.iter().map(|r| r.2).sum();
            ctx.emit(match fmt {
                Format::Json => json_string(
                    &rows
                        .iter()
                        .map(|(b, w, n)| json!({"black": b, "white": w, "count": n}))
                        .collect::<Vec<_>>(),
                )?,
                Format::Csv => {
                    rows.iter()
                        .fold(String::from("black,white,count\n"), |mut s, (b, w, n)| {
                            let _ = writeln!(s, "\"{b}\",\"{w}\",{n}");
                            s
                        })
                }
                _ => {
                    let mut s: String = rows
                        .iter()
                        .map(|(b, w, n)| format!("({b}) ({w}): {n}\n"))
                        .collect();
                    let _ = writeln!(s, "total: {total}");
                    s
                }
            })
        }
        OracleCmd::Euler { upto } => {
            let fmt = ctx.formats(&[Format::Text, Format::Json, Format::Csv])?;
            let e = euler_numbers(*upto);
            ctx.emit(match fmt {
                Format::Json => json_string(&e.iter().map(|v| v.to_string()).collect::<Vec<_>>())?,
                Format::Csv => {
                    e.iter()
                        .enumerate()
                        .fold(String::from("m,count\n"), |mut s, (m, v)| {
                            let _ = writeln!(s, "{m},{v}");
                            s
                        })
                }
                _ => {
                    let s: Vec<String> = e.iter().map(|v| v.to_string()).collect();
                    format!("{}\n", s.join(", "))
                }
            })
        }
    }
}
