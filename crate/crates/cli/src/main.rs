//! `bpy-morph`: compile, query and evaluate finite-state morphological
//! analyzers, and convert legacy-font text.
//!
//! Exit status: 0 on success, 1 on a domain error (bad lexicon, rule, gold or
//! mapping file; unknown tag; unmappable byte), 2 on an I/O error.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bpy_morph::encoding::MappingTable;
use bpy_morph::eval::{evaluate, parse_gold};
use bpy_morph::grammar;
use bpy_morph::lexc::{compile_lexicon, parse_lexc};
use bpy_morph::rules::{compile_ruleset, parse_rules};
use bpy_morph::runtime::{build_grammar, Grammar, RuntimeError, DEFAULT_MAX_OUTPUT};
use bpy_morph::SymbolTable;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bpy-morph",
    version,
    about = "Finite-state morphology for Bishnupriya Manipuri"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a lexicon and rule file into a grammar directory.
    Compile {
        /// Lexicon source (defaults to the bundled lexicon).
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Rule file (defaults to the bundled rules).
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Directory to write the compiled grammar into.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Analyze surface words, one per line.
    Analyze {
        #[command(flatten)]
        grammar: GrammarArgs,
        /// Input file (defaults to standard input).
        input: Option<PathBuf>,
    },
    /// Generate surface forms from lexical strings, one per line.
    Generate {
        #[command(flatten)]
        grammar: GrammarArgs,
        /// Input file (defaults to standard input).
        input: Option<PathBuf>,
    },
    /// Score the analyzer against a gold file.
    Eval {
        #[command(flatten)]
        grammar: GrammarArgs,
        /// Gold file: surface<TAB>analysis[,analysis...] per line.
        #[arg(long)]
        gold: PathBuf,
    },
    /// Convert legacy-font bytes to UTF-8 with a mapping table.
    Convert {
        /// Mapping table: hex-bytes<TAB>target per line.
        #[arg(long)]
        map: PathBuf,
        /// Input file (defaults to standard input).
        input: Option<PathBuf>,
        /// Output file (defaults to standard output).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GrammarArgs {
    /// Compiled grammar directory (defaults to the bundled grammar).
    #[arg(long)]
    grammar: Option<PathBuf>,
    /// Longest output, in symbols, a single query may produce.
    #[arg(long, default_value_t = DEFAULT_MAX_OUTPUT)]
    max_output_len: usize,
}

enum Failure {
    Domain(String),
    Io(String),
}

impl Failure {
    fn io(path: &Path, e: io::Error) -> Failure {
        Failure::Io(format!("{}: {e}", path.display()))
    }

    fn domain(path: &Path, e: impl std::fmt::Display) -> Failure {
        Failure::Domain(format!("{}: {e}", path.display()))
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(File::open(p).map_err(|e| Failure::io(p, e))?)),
        None => Box::new(io::stdin().lock()),
    })
}

fn load_grammar(args: &GrammarArgs) -> Result<Grammar, Failure> {
    let g = match &args.grammar {
        Some(dir) => Grammar::load(dir).map_err(|e| match e {
            RuntimeError::Io(io) => Failure::io(dir, io),
            other => Failure::domain(dir, other),
        })?,
        None => grammar::load_bundled().map_err(|e| Failure::Domain(format!("bundled grammar: {e}")))?,
    };
    Ok(g.with_max_output(args.max_output_len))
}

fn compile(lexicon: Option<&Path>, rules: Option<&Path>, out: &Path) -> Outcome {
    let (lex_name, lex_src) = match lexicon {
        Some(p) => (p.display().to_string(), read_text(p)?),
        None => ("bundled lexicon".to_string(), grammar::LEXICON.to_string()),
    };
    let (rule_name, rule_src) = match rules {
        Some(p) => (p.display().to_string(), read_text(p)?),
        None => ("bundled rules".to_string(), grammar::RULES.to_string()),
    };
    let ast = parse_lexc(&lex_src).map_err(|e| Failure::Domain(format!("{lex_name}: {e}")))?;
    let rs = parse_rules(&rule_src).map_err(|e| Failure::Domain(format!("{rule_name}: {e}")))?;
    let mut symtab = SymbolTable::new();
    let lex = compile_lexicon(&ast, &mut symtab).map_err(|e| Failure::Domain(format!("{lex_name}: {e}")))?;
    let rules = compile_ruleset(&rs, &mut symtab).map_err(|e| Failure::Domain(format!("{rule_name}: {e}")))?;
    let g = build_grammar(&lex, &rules).map_err(|e| Failure::Domain(e.to_string()))?;
    g.save(out).map_err(|e| match e {
        RuntimeError::Io(io) => Failure::io(out, io),
        other => Failure::domain(out, other),
    })?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "states: {}", g.net().num_states())?;
    writeln!(stdout, "arcs: {}", g.net().num_arcs())?;
    writeln!(stdout, "tags: {}", g.tags().len())?;
    Ok(())
}

/// Streams `input` line by line, writing `word<TAB>results` or
/// `word<TAB>+?`. Per-line errors are reported on stderr and make the
/// command fail after the whole input is processed.
fn query<F>(input: Option<&Path>, mut answer: F) -> Outcome
where
    F: FnMut(&str) -> Result<Vec<String>, String>,
{
    let reader = open_input(input)?;
    let mut out = BufWriter::new(io::stdout().lock());
    let mut failed = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let word = line.trim();
        if word.is_empty() {
            continue;
        }
        match answer(word) {
            Ok(results) if results.is_empty() => writeln!(out, "{word}\t+?")?,
            Ok(results) => writeln!(out, "{word}\t{}", results.join(","))?,
            Err(e) => {
                failed += 1;
                out.flush()?;
                eprintln!("line {}: {e}", i + 1);
            }
        }
    }
    out.flush()?;
    if failed > 0 {
        return Err(Failure::Domain(format!("{failed} input line(s) failed")));
    }
    Ok(())
}

fn analyze(args: &GrammarArgs, input: Option<&Path>) -> Outcome {
    let g = load_grammar(args)?;
    query(input, |w| {
        g.apply_up(w)
            .map(|r| r.iter().map(ToString::to_string).collect())
            .map_err(|e| format!("{w}: {e}"))
    })
}

fn generate(args: &GrammarArgs, input: Option<&Path>) -> Outcome {
    let g = load_grammar(args)?;
    query(input, |w| match g.parse_lexical(w).map_err(|e| e.to_string())? {
        None => Ok(Vec::new()),
        Some(ids) => g.apply_down_ids(&ids).map_err(|e| format!("{w}: {e}")),
    })
}

fn eval(args: &GrammarArgs, gold: &Path) -> Outcome {
    let entries = parse_gold(&read_text(gold)?).map_err(|e| Failure::domain(gold, e))?;
    let g = load_grammar(args)?;
    let report = evaluate(&g, &entries).map_err(|e| Failure::domain(gold, e))?;
    let mut stdout = io::stdout().lock();
    write!(stdout, "{}\n{}", report.table(), report.key_values())?;
    Ok(())
}

fn convert(map: &Path, input: Option<&Path>, output: Option<&Path>) -> Outcome {
    let bytes = fs::read(map).map_err(|e| Failure::io(map, e))?;
    let table = MappingTable::parse(&bytes).map_err(|e| Failure::domain(map, e))?;
    let mut data = Vec::new();
    match input {
        Some(p) => data = fs::read(p).map_err(|e| Failure::io(p, e))?,
        None => {
            io::stdin().lock().read_to_end(&mut data)?;
        }
    }
    let name = input.map_or("<stdin>".to_string(), |p| p.display().to_string());
    let text = table
        .convert(&data)
        .map_err(|e| Failure::Domain(format!("{name}: {e}")))?;
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(p, e))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile { lexicon, rules, out } => compile(lexicon.as_deref(), rules.as_deref(), out),
        Command::Analyze { grammar, input } => analyze(grammar, input.as_deref()),
        Command::Generate { grammar, input } => generate(grammar, input.as_deref()),
        Command::Eval { grammar, gold } => eval(grammar, gold),
        Command::Convert { map, input, output } => convert(map, input.as_deref(), output.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
