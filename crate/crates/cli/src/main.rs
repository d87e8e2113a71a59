use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stellar_core::classify::{check_equivalence, classify, EquivalenceStatus, Pivot, Status};
use stellar_core::mcnfun::{
    dominance_witness, ideal_member, term_to_plfunc, Bounded, FuncError, LGroupTerm, Membership,
    PLFunc,
};
use stellar_core::regular::{canonical_realization, Realization, RegularComplex, VertexOrder};
use stellar_core::sequences::{Family, Orbit, StellarSequence};
use stellar_core::serial::{
    self, complex_json, point_strings, report_json, tail_json, verdict_json, FunctionDto, PLMapDto,
    RealizationDto, RegularComplexDto, SequenceDto, SerialError, StepDto, WeightedComplexDto,
};
use stellar_core::WeightedComplex;

const EXIT_NO: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_NO_INPUT: u8 = 66;

#[derive(Parser, Debug)]
#[command(
    name = "stellar",
    version,
    about = "Exact stellar sequences, regular complexes and their unital groups"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    output: Format,
    /// Shorthand for `--output json`.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on Farey blow-ups in containment and refinement searches.
    #[arg(long, default_value_t = 64, global = true)]
    max_blowups: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Order {
    Lex,
    Given,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Json,
    Mesh,
}

#[derive(Args, Debug)]
struct DepthArg {
    #[arg(long, default_value_t = 32)]
    depth: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a file of any supported kind.
    Validate { file: PathBuf },
    /// Canonical realization of a weighted complex (or a sequence's initial complex).
    Realize {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Order::Lex)]
        order: Order,
    },
    /// Steps and supports of a sequence's orbit.
    Orbit {
        file: PathBuf,
        #[command(flatten)]
        depth: DepthArg,
    },
    /// Structural properties of the group a sequence presents.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        depth: DepthArg,
    },
    /// Compare the groups presented by two sequences.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        depth: DepthArg,
        /// Compare both orbits at this index only.
        #[arg(long)]
        pivot: Option<usize>,
    },
    /// Does a function vanish on some orbit support?
    Member {
        #[arg(long = "func")]
        func: PathBuf,
        #[arg(long = "seq")]
        seq: PathBuf,
        #[command(flatten)]
        depth: DepthArg,
    },
    /// Least m with f <= m g.
    Dominate {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Write a built-in family as a sequence file.
    Family {
        /// segment, lex-z2, effros-shen or simplicial.
        name: String,
        /// Continued-fraction period (comma separated) or golden, silver, sqrt3.
        #[arg(long)]
        cf: Option<String>,
        /// Vertex weight for lex-z2.
        #[arg(long)]
        n: Option<u64>,
        /// Comma separated weights for the simplicial family.
        #[arg(long)]
        weights: Option<String>,
        /// Number of steps to record as a checked prefix.
        #[arg(long, default_value_t = 0)]
        steps: usize,
        /// Destination file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-emit a complex, realization or sequence support as JSON or a text mesh.
    Export {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
        format: ExportFormat,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(m: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: m.into(),
        }
    }

    fn data(m: impl ToString) -> Self {
        Self {
            code: EXIT_DATA,
            message: m.to_string(),
        }
    }
}

impl From<SerialError> for Failure {
    fn from(e: SerialError) -> Self {
        Failure::data(e)
    }
}

/// What a command prints and how it exits.
struct Outcome {
    json: Value,
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(json: Value, text: impl Into<String>) -> Self {
        Self {
            json,
            text: text.into(),
            code: 0,
        }
    }

    fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_NO_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_sequence(path: &Path) -> Result<StellarSequence, Failure> {
    let dto: SequenceDto = serial::parse(&read(path)?)?;
    Ok(dto.to_sequence()?)
}

fn load_function(path: &Path, max_blowups: usize) -> Result<PLFunc, Failure> {
    match serial::parse::<FunctionDto>(&read(path)?)? {
        FunctionDto::Func(f) => Ok(f.to_func()?),
        FunctionDto::Term { term, dim } => {
            if dim == 0 {
                return Err(Failure::data("term dimension must be positive"));
            }
            let t = LGroupTerm::parse(&term).map_err(Failure::data)?;
            match term_to_plfunc(&t, &RegularComplex::unit_cube(dim), max_blowups)
                .map_err(Failure::data)?
            {
                Bounded::Done(f) => Ok(f),
                Bounded::Unknown => Err(Failure {
                    code: EXIT_UNKNOWN,
                    message: "blow-up cap reached while building the function".into(),
                }),
            }
        }
    }
}

fn kind_of(v: &Value) -> &'static str {
    let has = |k: &str| v.get(k).is_some();
    if has("provider") {
        "sequence"
    } else if has("map") && has("weighted") {
        "realization"
    } else if has("maximal_faces") {
        "weighted-complex"
    } else if has("pieces") {
        "pl-map"
    } else if has("maximal_simplexes") {
        "regular-complex"
    } else if has("term") || has("carrier") {
        "function"
    } else {
        "unknown"
    }
}

fn validate(path: &Path, max_blowups: usize) -> Result<Outcome, Failure> {
    let text = read(path)?;
    let value: Value = serial::parse(&text)?;
    let kind = kind_of(&value);
    match kind {
        "sequence" => {
            serial::parse::<SequenceDto>(&text)?.to_sequence()?;
        }
        "realization" => {
            serial::parse::<RealizationDto>(&text)?.to_realization()?;
        }
        "weighted-complex" => {
            let w = serial::parse::<WeightedComplexDto>(&text)?.to_complex_unchecked()?;
            let violations = w.validate();
            if !violations.is_empty() {
                let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
                return Err(Failure::data(format!(
                    "invalid weighted complex:\n  {}",
                    list.join("\n  ")
                )));
            }
        }
        "pl-map" => {
            serial::parse::<PLMapDto>(&text)?.to_map()?;
        }
        "regular-complex" => {
            serial::parse::<RegularComplexDto>(&text)?.to_complex()?;
        }
        "function" => {
            load_function(path, max_blowups)?;
        }
        _ => return Err(Failure::data("unrecognized file kind")),
    }
    Ok(Outcome::ok(
        json!({"valid": true, "kind": kind}),
        format!("valid {kind}"),
    ))
}

fn realize(path: &Path, order: Order) -> Result<Outcome, Failure> {
    let text = read(path)?;
    let value: Value = serial::parse(&text)?;
    let w: WeightedComplex = if kind_of(&value) == "sequence" {
        serial::parse::<SequenceDto>(&text)?.to_sequence()?.initial
    } else {
        serial::parse::<WeightedComplexDto>(&text)?.to_complex()?
    };
    let order = match order {
        Order::Lex => VertexOrder::Lex,
        Order::Given => VertexOrder::Given,
    };
    let r = canonical_realization(&w, &order).map_err(Failure::data)?;
    let mut lines = Vec::new();
    for (label, &i) in &r.map {
        lines.push(format!("{label} -> {}", r.geometric.vertex(i)));
    }
    Ok(Outcome::ok(
        serde_json::to_value(RealizationDto::from_realization(&r)).expect("plain data"),
        lines.join("\n"),
    ))
}

fn support_text(c: &RegularComplex) -> String {
    let simplexes: Vec<String> = c
        .maximal_simplexes()
        .iter()
        .map(|s| {
            let pts: Vec<String> = s.iter().map(|&i| c.vertex(i).to_string()).collect();
            format!("[{}]", pts.join(" "))
        })
        .collect();
    simplexes.join(" ")
}

fn orbit(path: &Path, depth: usize) -> Result<Outcome, Failure> {
    let seq = load_sequence(path)?;
    let o = Orbit::new(&seq, None, depth).map_err(Failure::data)?;
    let steps: Vec<StepDto> = o.steps().iter().map(StepDto::from_step).collect();
    let supports: Vec<Value> = o.supports().iter().map(complex_json).collect();
    let mut text = Vec::new();
    for (i, c) in o.supports().iter().enumerate() {
        let step = if i == 0 {
            "start".to_string()
        } else {
            o.steps()[i - 1].to_string()
        };
        text.push(format!("{i}: {step}: {}", support_text(c)));
    }
    Ok(Outcome::ok(
        json!({"tail": tail_json(o.tail()), "depth": o.depth(), "steps": steps, "supports": supports}),
        text.join("\n"),
    ))
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Yes => "Yes",
        Status::No => "No",
        Status::Unknown => "Unknown",
    }
}

fn classify_cmd(path: &Path, depth: usize, max_blowups: usize) -> Result<Outcome, Failure> {
    let seq = load_sequence(path)?;
    let report = classify(&seq, depth, max_blowups).map_err(Failure::data)?;
    let text: Vec<String> = report
        .entries()
        .iter()
        .map(|(name, p)| {
            format!(
                "{name}: {} ({})",
                status_text(p.status),
                p.certificate.as_str()
            )
        })
        .collect();
    Ok(Outcome::ok(report_json(&report), text.join("\n")))
}

fn equiv(
    a: &Path,
    b: &Path,
    depth: usize,
    pivot: Option<usize>,
    max_blowups: usize,
) -> Result<Outcome, Failure> {
    let (sa, sb) = (load_sequence(a)?, load_sequence(b)?);
    let pivot = pivot.map(|i| Pivot {
        a_index: i,
        b_index: i,
        gamma: None,
    });
    let v = check_equivalence(&sa, &sb, pivot, depth, max_blowups).map_err(Failure::data)?;
    let (text, code) = match &v.status {
        EquivalenceStatus::Certified => ("Certified".to_string(), 0),
        EquivalenceStatus::ConsistentToDepth(d) => {
            (format!("ConsistentToDepth({d})"), EXIT_UNKNOWN)
        }
        EquivalenceStatus::Refuted(i) => (format!("Refuted: {i:?}"), EXIT_NO),
    };
    Ok(Outcome::ok(verdict_json(&v), text).with_code(code))
}

fn member(func: &Path, seq: &Path, depth: usize, max_blowups: usize) -> Result<Outcome, Failure> {
    let f = load_function(func, max_blowups)?;
    let s = load_sequence(seq)?;
    let o = Orbit::new(&s, None, depth).map_err(Failure::data)?;
    let m = ideal_member(&f, &o.supports(), o.tail(), depth, max_blowups).map_err(Failure::data)?;
    Ok(match m {
        Membership::Yes(i) => Outcome::ok(
            json!({"status": "Yes", "index": i}),
            format!("Yes at index {i}"),
        ),
        Membership::No { point, value } => Outcome::ok(
            json!({"status": "No", "point": point_strings(&point), "value": value.to_string()}),
            format!("No: f{point} = {value}"),
        )
        .with_code(EXIT_NO),
        Membership::Unknown => {
            Outcome::ok(json!({"status": "Unknown"}), "Unknown").with_code(EXIT_UNKNOWN)
        }
    })
}

fn dominate(f: &Path, g: &Path, max_blowups: usize) -> Result<Outcome, Failure> {
    let (f, g) = (
        load_function(f, max_blowups)?,
        load_function(g, max_blowups)?,
    );
    match dominance_witness(&f, &g, max_blowups) {
        Ok(Bounded::Done(m)) => Ok(Outcome::ok(
            json!({"status": "Yes", "m": m.to_string()}),
            m.to_string(),
        )),
        Ok(Bounded::Unknown) => {
            Ok(Outcome::ok(json!({"status": "Unknown"}), "Unknown").with_code(EXIT_UNKNOWN))
        }
        Err(FuncError::PreconditionFailed { reason, point }) => Ok(Outcome::ok(
            json!({"status": "No", "reason": reason, "point": point_strings(&point)}),
            format!("No: {reason} at {point}"),
        )
        .with_code(EXIT_NO)),
        Err(e) => Err(Failure::data(e)),
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| Failure::usage(format!("bad number {x:?} in {s:?}")))
        })
        .collect()
}

fn family(
    name: &str,
    cf: Option<&str>,
    n: Option<u64>,
    weights: Option<&str>,
    steps: usize,
    out: &Path,
) -> Result<Outcome, Failure> {
    let seq = match name {
        "segment" => StellarSequence::constant(WeightedComplex::simplex(&["0", "1"], 1))
            .map_err(Failure::data)?,
        "lex-z2" => {
            let n = n.ok_or_else(|| Failure::usage("lex-z2 needs --n"))?;
            StellarSequence::family(Family::LexZ2 { n }).map_err(Failure::data)?
        }
        "effros-shen" => {
            let cf = cf.ok_or_else(|| Failure::usage("effros-shen needs --cf"))?;
            let digits = match Family::named_cf(cf) {
                Some(d) => d,
                None => parse_list(cf)?,
            };
            StellarSequence::family(Family::EffrosShen { cf: digits }).map_err(Failure::data)?
        }
        "simplicial" => {
            let w =
                parse_list(weights.ok_or_else(|| Failure::usage("simplicial needs --weights"))?)?;
            StellarSequence::family(Family::SimplicialWeights(w)).map_err(Failure::data)?
        }
        other => return Err(Failure::usage(format!("unknown family {other:?}"))),
    };
    let dto = SequenceDto::from_sequence(&seq, steps)?;
    let text = serde_json::to_string_pretty(&dto).expect("plain data");
    fs::write(out, text + "\n").map_err(|e| Failure {
        code: EXIT_NO_INPUT,
        message: format!("{}: {e}", out.display()),
    })?;
    Ok(Outcome::ok(
        json!({"written": out.display().to_string(), "steps": steps}),
        format!("wrote {}", out.display()),
    ))
}

fn export(path: &Path, format: ExportFormat) -> Result<Outcome, Failure> {
    let text = read(path)?;
    let value: Value = serial::parse(&text)?;
    let complex = match kind_of(&value) {
        "regular-complex" => serial::parse::<RegularComplexDto>(&text)?.to_complex()?,
        "realization" => {
            serial::parse::<RealizationDto>(&text)?
                .to_realization()?
                .geometric
        }
        "sequence" => {
            let seq = serial::parse::<SequenceDto>(&text)?.to_sequence()?;
            let r: Realization = seq.default_realization().map_err(Failure::data)?;
            r.geometric
        }
        _ => {
            return Err(Failure::data(
                "export needs a regular complex, realization or sequence",
            ))
        }
    };
    match format {
        ExportFormat::Json => {
            let j = complex_json(&complex);
            let t = serde_json::to_string_pretty(&j).expect("plain data");
            Ok(Outcome::ok(j, t))
        }
        ExportFormat::Mesh => {
            let mesh = complex.to_mesh().map_err(Failure::data)?;
            Ok(Outcome::ok(
                Value::String(mesh.clone()),
                mesh.trim_end().to_string(),
            ))
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let cap = cli.max_blowups;
    match &cli.command {
        Command::Validate { file } => validate(file, cap),
        Command::Realize { file, order } => realize(file, *order),
        Command::Orbit { file, depth } => orbit(file, depth.depth),
        Command::Classify { file, depth } => classify_cmd(file, depth.depth, cap),
        Command::Equiv { a, b, depth, pivot } => equiv(a, b, depth.depth, *pivot, cap),
        Command::Member { func, seq, depth } => member(func, seq, depth.depth, cap),
        Command::Dominate { f, g } => dominate(f, g, cap),
        Command::Family {
            name,
            cf,
            n,
            weights,
            steps,
            out,
        } => family(name, cf.as_deref(), *n, weights.as_deref(), *steps, out),
        Command::Export { file, format } => export(file, *format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = if cli.json { Format::Json } else { cli.output };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            let body = match (format, &cli.command) {
                (Format::Text, _) => out.text,
                (
                    Format::Json,
                    Command::Export {
                        format: ExportFormat::Mesh,
                        ..
                    },
                ) => out.text,
                (Format::Json, _) => serde_json::to_string_pretty(&out.json).expect("plain data"),
            };
            let _ = writeln!(stdout, "{body}");
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
