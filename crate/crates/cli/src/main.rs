//! `ccg`: parse sentences, convert tree files, compile lexicon databases and
//! run batch coverage checks.

mod render;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use ccg_core::lexicon::FeatureConfig;
use ccg_core::{
    parse_tree_file, tokenize, Category, Chart, CompiledLexicon, Converter, FilterConfig, FrequencyScorer, Lexicon,
    Parser as CcgParser, RuleSet, TreeGroup,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "ccg", version, about = "Combinatory categorial grammar toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse one sentence and print its derivations.
    Parse {
        sentence: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Parse a file of sentences, one per line, printing JSON lines.
    Batch {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Convert an LTAG tree file to category database lines.
    Convert {
        tree_file: PathBuf,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Lexicon directory whose feature config maps node features to tags.
        #[arg(long, env = "CCG_LEXICON")]
        lexicon: Option<PathBuf>,
    },
    /// Compile the working lexicon into compiled.db.
    Compile {
        #[command(flatten)]
        lex: LexiconArg,
        /// Output file; `compiled.db` inside the lexicon directory when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct LexiconArg {
    /// Directory holding features.cfg, syn.db, cat.db, morph.db and raise.cfg.
    #[arg(long, env = "CCG_LEXICON")]
    lexicon: PathBuf,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    lex: LexiconArg,
    /// Goal category a complete parse must unify with.
    #[arg(long, default_value = "S[bar=-]")]
    goal: String,
    /// Rule overrides, e.g. `-BwdXComp,+FwdComp` or `FwdApp,BwdApp,Coord`.
    #[arg(long, allow_hyphen_values = true)]
    rules: Option<String>,
    /// Keep at most N categories per token.
    #[arg(long)]
    n_best: Option<usize>,
    #[arg(long, default_value_t = 10)]
    max_derivations: usize,
    #[arg(long, value_enum, default_value_t = Format::TreeAscii)]
    format: Format,
    /// Turn off a category filter (`span` or `n-best`); repeatable.
    #[arg(long)]
    disable_filter: Vec<String>,
    /// Frequency table (`word TAB category TAB count`) for n-best ranking.
    #[arg(long)]
    scores: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    TreeAscii,
    Bracketed,
    JsonLines,
}

/// Everything a parse needs, resolved from the command line.
struct Session {
    lex: CompiledLexicon,
    goal: Category,
    rules: RuleSet,
    filters: FilterConfig,
    scorer: Option<FrequencyScorer>,
    max_derivations: usize,
    format: Format,
}

impl Session {
    fn load(args: &RunArgs) -> Result<Self> {
        let lexicon = load_lexicon(&args.lex.lexicon)?;
        let (lex, _) = lexicon.compile().context("compiling lexicon")?;
        let goal = lexicon
            .features
            .atoms()
            .parse_category(&args.goal)
            .with_context(|| format!("goal category '{}'", args.goal))?;
        let mut rules = RuleSet::default();
        if let Some(list) = &args.rules {
            rules.apply_overrides(list).context("--rules")?;
        }
        let mut filters = FilterConfig {
            n_best: args.n_best,
            ..FilterConfig::default()
        };
        for name in &args.disable_filter {
            filters.disable(name)?;
        }
        let scorer = match &args.scores {
            Some(path) => {
                let text = read(path)?;
                Some(FrequencyScorer::parse(&text, lexicon.features.atoms()).with_context(|| path.display().to_string())?)
            }
            None => None,
        };
        Ok(Session {
            lex,
            goal,
            rules,
            filters,
            scorer,
            max_derivations: args.max_derivations,
            format: args.format,
        })
    }

    fn parse(&self, tokens: &[String]) -> Chart {
        let parser = CcgParser::new(&self.lex)
            .with_rules(self.rules.clone())
            .with_filters(self.filters.clone());
        match &self.scorer {
            Some(s) => parser.with_scorer(s.clone()).parse(tokens),
            None => parser.parse(tokens),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_lexicon(dir: &Path) -> Result<Lexicon> {
    Lexicon::load_dir(dir).with_context(|| format!("loading lexicon from {}", dir.display()))
}

fn report_tokens(chart: &Chart) {
    for a in chart.assignments() {
        if a.unknown {
            eprintln!("warning: token {} '{}': unknown word", a.token_index, a.token);
        } else if a.surviving.is_empty() {
            eprintln!("warning: token {} '{}': every category was filtered out", a.token_index, a.token);
        }
    }
}

fn cmd_parse(sentence: &str, args: &RunArgs) -> Result<ExitCode> {
    let session = Session::load(args)?;
    let tokens = tokenize(sentence);
    let start = Instant::now();
    let chart = session.parse(&tokens);
    report_tokens(&chart);
    let total = chart.goal_derivation_count(&session.goal);
    let ds = chart.derivations(&session.goal, session.max_derivations);
    let elapsed = start.elapsed();
    let mut out = io::stdout().lock();
    for (i, d) in ds.iter().enumerate() {
        match session.format {
            Format::TreeAscii => {
                writeln!(out, "derivation {} of {total}", i + 1)?;
                writeln!(out, "{}", render::ascii(d, &tokens))?;
            }
            Format::Bracketed => writeln!(out, "{}", d.bracketed())?,
            Format::JsonLines => writeln!(out, "{}", render::derivation_json(sentence, i, d, &tokens))?,
        }
    }
    if ds.is_empty() {
        eprintln!("no parse for goal {}", session.goal);
        return Ok(ExitCode::from(1));
    }
    if session.format != Format::JsonLines {
        eprintln!("{total} derivation(s), {:.1} ms", elapsed.as_secs_f64() * 1000.0);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_batch(file: &Path, args: &RunArgs) -> Result<ExitCode> {
    let session = Session::load(args)?;
    let text = read(file)?;
    let sentences: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    // collect() on an indexed parallel iterator keeps input order
    let rows: Vec<(bool, serde_json::Value)> = sentences
        .par_iter()
        .map(|s| {
            let start = Instant::now();
            let chart = session.parse(&tokenize(s));
            let count = chart.goal_derivation_count(&session.goal);
            let ms = start.elapsed().as_secs_f64() * 1000.0;
            let unknown: Vec<usize> = chart
                .assignments()
                .iter()
                .filter(|a| a.unknown)
                .map(|a| a.token_index)
                .collect();
            let row = json!({
                "sentence": s,
                "parsed": count > 0,
                "derivations": u64::try_from(count).unwrap_or(u64::MAX),
                "time_ms": ms,
                "unknown_tokens": unknown,
            });
            (count > 0, row)
        })
        .collect();
    let mut out = io::stdout().lock();
    for (_, row) in &rows {
        writeln!(out, "{row}")?;
    }
    let parsed = rows.iter().filter(|(p, _)| *p).count();
    let coverage = if rows.is_empty() {
        0.0
    } else {
        100.0 * parsed as f64 / rows.len() as f64
    };
    let summary = json!({
        "summary": true,
        "sentences": rows.len(),
        "parsed": parsed,
        "coverage": (coverage * 100.0).round() / 100.0,
    });
    writeln!(out, "{summary}")?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_convert(tree_file: &Path, out: Option<&Path>, lexicon: Option<&Path>) -> Result<ExitCode> {
    let cfg = match lexicon {
        Some(dir) => load_lexicon(dir)?.features,
        None => FeatureConfig::default(),
    };
    let text = read(tree_file)?;
    let groups = parse_tree_file(&text).with_context(|| tree_file.display().to_string())?;
    let conv = Converter::new(&cfg);
    let mut results = Vec::new();
    for g in groups {
        let (converted, warnings) = match g {
            TreeGroup::Family { trees, .. } => {
                let fam = conv.convert_family(&trees)?;
                (fam.results, fam.warnings)
            }
            TreeGroup::Tree(t) => {
                let r = conv.convert_tree(&t)?;
                (vec![r], Vec::new())
            }
        };
        for w in warnings.iter().chain(converted.iter().flat_map(|r| r.warnings.iter())) {
            eprintln!("warning: {w}");
        }
        results.extend(converted);
    }
    // comment lines name the source trees and the bare shape of each result
    let mut lines: String = results
        .iter()
        .map(|r| format!("# {}: {}\n", r.tree_names.join(" "), r.category.skeleton()))
        .collect();
    lines.push_str(&ccg_core::ltag::write_cat_db_lines(&results, &cfg));
    match out {
        Some(path) => fs::write(path, lines).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(lines.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compile(dir: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let lexicon = load_lexicon(dir)?;
    let (compiled, diags) = lexicon.compile().context("compiling lexicon")?;
    for d in &diags {
        eprintln!("note: {d}");
    }
    let path = out.map_or_else(|| dir.join("compiled.db"), Path::to_path_buf);
    fs::write(&path, compiled.to_db_string()).with_context(|| format!("writing {}", path.display()))?;
    let (base, raised) = compiled.counts();
    println!("base {base}");
    println!("raised {raised}");
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Parse { sentence, run } => cmd_parse(&sentence, &run),
        Command::Batch { file, run } => cmd_batch(&file, &run),
        Command::Convert { tree_file, out, lexicon } => cmd_convert(&tree_file, out.as_deref(), lexicon.as_deref()),
        Command::Compile { lex, out } => cmd_compile(&lex.lexicon, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
