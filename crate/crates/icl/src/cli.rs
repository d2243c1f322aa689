//! The `icl` command line.
//!
//! Exit status: 0 on success, 1 when a computation reports a failure (a
//! scheme that does not pass, a user that cannot decode), 2 on usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use icl_core::caching::{
    cman_place, decode_all_users, deliver, dman_deliver, dman_place, r_c_opt, r_c_opt_envelope,
    r_cman, reduce_to_index_coding, reduced_load, synthesize_theorem4_scheme, DeliveryMode,
    DeliveryTranscript, DemandVector, FileLibrary, LoadQuery, SubfileMap,
};
use icl_core::composite::{DecodingChoice, SearchOptions, TimeSharedResult};
use icl_core::instance::{builtin_instance, IndexCodingInstance, SetDisplay};
use icl_core::outer::mais;
use icl_core::rational::{binomial, ExactRational};
use icl_core::scheme::{
    builtin_scheme, check_scheme, zero_error_decode_check, DecodeMode, LinearScheme,
};

use crate::formats::{parse_instance, parse_scheme, write_instance, write_scheme};
use crate::parallel;

#[derive(Parser, Debug)]
#[command(
    name = "icl",
    version,
    about = "Index coding bounds and coded caching simulation"
)]
pub struct Cli {
    /// Worker threads for the composite searches (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArg {
    /// Instance file, or a builtin name (example1, xor2, no-side-info(K)).
    #[arg(long)]
    pub instance: String,
    /// Overrides the instance's channel bits.
    #[arg(long)]
    pub channel_bits: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check an instance against the model's rules.
    Validate(InstanceArg),
    /// Composite coding symmetric rate.
    CompositeRate {
        #[command(flatten)]
        instance: InstanceArg,
        /// Only let each user decode up to this many undemanded messages.
        #[arg(long)]
        cap: Option<usize>,
        /// Maximize this weighted sum rate instead (comma-separated rationals).
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<String>>,
        /// Also report the best single decoding choice without time sharing.
        #[arg(long)]
        per_choice: bool,
    },
    /// Channel and MAC conditions of a linear scheme.
    LinearCheck {
        #[command(flatten)]
        instance: InstanceArg,
        /// Scheme file, or a builtin name (example2).
        #[arg(long)]
        scheme: String,
    },
    /// Zero-error decodability of a linear scheme.
    ZeroError {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long)]
        scheme: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Algebraic)]
        mode: ModeArg,
    },
    /// Maximum acyclic induced subgraph bound.
    Mais(InstanceArg),
    /// Coded caching.
    #[command(subcommand)]
    Cache(CacheCommand),
    /// Composite rate, linear scheme rate and acyclic bound side by side.
    Sandwich {
        #[command(flatten)]
        instance: InstanceArg,
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        cap: Option<usize>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Algebraic,
    Enumerate,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DeliveryArg {
    Full,
    Reduced,
}

#[derive(Args, Debug, Clone)]
pub struct Grid {
    #[arg(long = "K")]
    pub users: usize,
    #[arg(long = "N")]
    pub files: usize,
}

#[derive(Subcommand, Debug)]
pub enum CacheCommand {
    /// Place, deliver and decode; reports measured loads.
    Sim {
        #[command(flatten)]
        grid: Grid,
        /// Centralized placement parameter.
        #[arg(long)]
        t: Option<usize>,
        /// Demand vector such as 1,2,1,2; every vector when omitted.
        #[arg(long, value_delimiter = ',')]
        demands: Option<Vec<usize>>,
        /// File size in bits.
        #[arg(long = "B")]
        file_bits: usize,
        #[arg(long, value_enum, default_value_t = DeliveryArg::Reduced)]
        mode: DeliveryArg,
        #[arg(long)]
        decentralized: bool,
        /// Cache size in files, decentralized only.
        #[arg(long = "M")]
        memory: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Print each payload as `S=<set> bits=<hex>`.
        #[arg(long)]
        log: bool,
    },
    /// Closed-form loads.
    Formulas {
        #[command(flatten)]
        grid: Grid,
        /// Also evaluate the memory-sharing and decentralized loads at M.
        #[arg(long = "M")]
        memory: Option<String>,
    },
    /// Emit the index coding instance of a centralized delivery.
    Reduce {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        t: usize,
        #[arg(long, value_delimiter = ',')]
        demands: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        channel_bits: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the instance and linear scheme of reduced centralized delivery.
    Synthesize {
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        t: usize,
        #[arg(long, value_delimiter = ',')]
        demands: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        subfile_bits: usize,
        #[arg(long)]
        out_instance: Option<PathBuf>,
        #[arg(long)]
        out_scheme: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let mut out = String::new();
    match execute(&cli, &mut out) {
        Ok(()) => Outcome {
            code: 0,
            stdout: out,
            stderr: String::new(),
        },
        Err(e) => {
            let msg = match &e {
                CliError::Usage(m) => format!("error: {m}\n"),
                CliError::Failure(m) => format!("FAIL: {m}\n"),
            };
            Outcome {
                code: e.code(),
                stdout: out,
                stderr: msg,
            }
        }
    }
}

fn q(r: &ExactRational) -> String {
    r.display_exact()
}

/// A file path, else a builtin of that name or of the path's stem.
fn load_instance(arg: &InstanceArg) -> Result<IndexCodingInstance, CliError> {
    let path = Path::new(&arg.instance);
    let inst = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(usage)?;
        parse_instance(&text).map_err(|e| usage(format!("{}: {e}", arg.instance)))?
    } else {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        builtin_instance(&arg.instance)
            .or_else(|_| builtin_instance(stem))
            .map_err(|_| {
                usage(format!(
                    "no instance file or builtin named `{}`",
                    arg.instance
                ))
            })?
    };
    Ok(match arg.channel_bits {
        Some(c) => inst.with_channel_bits(c),
        None => inst,
    })
}

fn matching(inst: &IndexCodingInstance, scheme: &LinearScheme) -> Result<(), CliError> {
    if inst.channel_bits() != scheme.channel_bits() {
        return Err(usage(format!(
            "instance has {} channel bits but the scheme uses {}; pass --channel-bits",
            inst.channel_bits(),
            scheme.channel_bits()
        )));
    }
    Ok(())
}

fn load_scheme(name: &str) -> Result<LinearScheme, CliError> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(usage)?;
        return parse_scheme(&text).map_err(|e| usage(format!("{name}: {e}")));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    builtin_scheme(name)
        .or_else(|_| builtin_scheme(stem))
        .map_err(|_| usage(format!("no scheme file or builtin named `{name}`")))
}

fn csv_out(out: &mut String, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(failure)?;
    for r in rows {
        w.write_record(r).map_err(failure)?;
    }
    let bytes = w.into_inner().map_err(failure)?;
    out.push_str(&String::from_utf8(bytes).map_err(failure)?);
    Ok(())
}

fn rational_row(name: &str, r: &ExactRational) -> Vec<String> {
    vec![
        name.to_string(),
        r.numer().to_string(),
        r.denom().to_string(),
        r.to_decimal(6),
    ]
}

fn execute(cli: &Cli, out: &mut String) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate(arg) => validate(&load_instance(arg)?, out),
        Command::CompositeRate {
            instance,
            cap,
            weights,
            per_choice,
        } => composite_rate(
            cli,
            &load_instance(instance)?,
            *cap,
            weights.as_deref(),
            *per_choice,
            out,
        ),
        Command::LinearCheck { instance, scheme } => {
            linear_check(cli, &load_instance(instance)?, &load_scheme(scheme)?, out)
        }
        Command::ZeroError {
            instance,
            scheme,
            mode,
        } => zero_error(
            cli,
            &load_instance(instance)?,
            &load_scheme(scheme)?,
            *mode,
            out,
        ),
        Command::Mais(arg) => mais_cmd(cli, &load_instance(arg)?, out),
        Command::Cache(c) => cache(cli, c, out),
        Command::Sandwich {
            instance,
            scheme,
            cap,
        } => sandwich(
            cli,
            &load_instance(instance)?,
            &load_scheme(scheme)?,
            *cap,
            out,
        ),
    }
}

fn validate(inst: &IndexCodingInstance, out: &mut String) -> Result<(), CliError> {
    let report = inst.validate();
    if report.is_ok() {
        writeln!(
            out,
            "ok: {} messages, {} users, c = {}",
            inst.num_messages(),
            inst.num_users(),
            inst.channel_bits()
        )
        .unwrap();
        return Ok(());
    }
    for v in &report.violations {
        writeln!(out, "violation: {v}").unwrap();
    }
    Err(failure(format!("{} violation(s)", report.violations.len())))
}

fn search_options(cap: Option<usize>) -> SearchOptions {
    SearchOptions {
        per_user_cap: cap,
        ..SearchOptions::default()
    }
}

fn choice_text(choice: &DecodingChoice) -> String {
    choice
        .sets
        .iter()
        .map(|k| SetDisplay(k).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn time_shared(
    cli: &Cli,
    inst: &IndexCodingInstance,
    cap: Option<usize>,
) -> Result<TimeSharedResult, CliError> {
    parallel::time_shared_symmetric_rate(inst, &search_options(cap), cli.threads).map_err(failure)
}

fn composite_rate(
    cli: &Cli,
    inst: &IndexCodingInstance,
    cap: Option<usize>,
    weights: Option<&[String]>,
    per_choice: bool,
    out: &mut String,
) -> Result<(), CliError> {
    let opts = search_options(cap);
    let c = ExactRational::from(inst.channel_bits());
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    if let Some(ws) = weights {
        let w: Vec<ExactRational> = ws
            .iter()
            .map(|s| ExactRational::from_str(s.trim()).map_err(usage))
            .collect::<Result<_, _>>()?;
        let r = icl_core::composite::max_weighted_rate(inst, &w, &opts).map_err(failure)?;
        match &r.value {
            Some(v) => rows.push(rational_row("weighted", v)),
            None => notes.push("weighted sum is unbounded".into()),
        }
        notes.push(format!("best choice: {}", choice_text(&r.best_choice)));
        if r.under_approximation {
            notes.push("capped search: lower bound only".into());
        }
    } else {
        let r = time_shared(cli, inst, cap)?;
        rows.push(rational_row("symmetric", &r.symmetric_rate));
        rows.push(rational_row("normalized", &(&r.symmetric_rate / &c)));
        notes.push(format!(
            "time sharing over {} decoding choices, {} weighted searches",
            r.components.len(),
            r.rounds
        ));
        if r.under_approximation {
            notes.push("capped search: lower bound only".into());
        }
        if per_choice {
            let p = parallel::max_symmetric_rate(inst, &opts, cli.threads).map_err(failure)?;
            rows.push(rational_row("per-choice", &p.symmetric_rate));
            notes.push(format!(
                "best single choice: {}",
                choice_text(&p.best_choice)
            ));
        }
    }
    match cli.format {
        Format::Csv => csv_out(out, &["quantity", "num", "den", "decimal"], &rows)?,
        Format::Table => {
            for r in &rows {
                writeln!(out, "{:<11} {}/{} ({})", r[0], r[1], r[2], r[3]).unwrap();
            }
            for n in notes {
                writeln!(out, "# {n}").unwrap();
            }
        }
    }
    Ok(())
}

fn linear_check(
    cli: &Cli,
    inst: &IndexCodingInstance,
    scheme: &LinearScheme,
    out: &mut String,
) -> Result<(), CliError> {
    matching(inst, scheme)?;
    let choice = DecodingChoice::demands_only(inst);
    let v = check_scheme(inst, scheme, &choice).map_err(usage)?;
    let mut rows = Vec::new();
    for j in 0..v.channel_ok.len() {
        rows.push(vec![
            (j + 1).to_string(),
            v.channel_entropy[j].to_string(),
            scheme.channel_bits().to_string(),
            if v.channel_ok[j] { "ok" } else { "FAIL" }.to_string(),
            v.mac[j].len().to_string(),
            if v.mac_ok(j) { "ok" } else { "FAIL" }.to_string(),
        ]);
    }
    match cli.format {
        Format::Csv => csv_out(
            out,
            &[
                "user",
                "entropy",
                "channel_bits",
                "channel",
                "mac_sets",
                "mac",
            ],
            &rows,
        )?,
        Format::Table => {
            for r in &rows {
                writeln!(
                    out,
                    "user {}: H(X|A) = {} <= {} {}; MAC over {} sets {}",
                    r[0], r[1], r[2], r[3], r[4], r[5]
                )
                .unwrap();
            }
            for (j, checks) in v.mac.iter().enumerate() {
                for m in checks.iter().filter(|m| !m.ok) {
                    writeln!(
                        out,
                        "user {}: J = {} needs {} bits, kappa = {}",
                        j + 1,
                        SetDisplay(&m.set),
                        m.load,
                        m.kappa
                    )
                    .unwrap();
                }
            }
        }
    }
    let verdict = if v.pass() { "PASS" } else { "FAIL" };
    writeln!(out, "{verdict} symmetric rate {}", q(&v.symmetric_rate)).unwrap();
    if v.pass() {
        Ok(())
    } else {
        Err(failure(
            "scheme does not meet the channel and MAC conditions",
        ))
    }
}

fn zero_error(
    cli: &Cli,
    inst: &IndexCodingInstance,
    scheme: &LinearScheme,
    mode: ModeArg,
    out: &mut String,
) -> Result<(), CliError> {
    matching(inst, scheme)?;
    let mode = match mode {
        ModeArg::Algebraic => DecodeMode::Algebraic,
        ModeArg::Enumerate => DecodeMode::Enumerate,
    };
    let ok = zero_error_decode_check(inst, scheme, mode).map_err(usage)?;
    let rows: Vec<Vec<String>> = ok
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            vec![
                (j + 1).to_string(),
                if b { "decodes" } else { "fails" }.into(),
            ]
        })
        .collect();
    match cli.format {
        Format::Csv => csv_out(out, &["user", "result"], &rows)?,
        Format::Table => {
            for r in &rows {
                writeln!(out, "user {}: {}", r[0], r[1]).unwrap();
            }
        }
    }
    if ok.iter().all(|&b| b) {
        writeln!(out, "PASS").unwrap();
        Ok(())
    } else {
        writeln!(out, "FAIL").unwrap();
        Err(failure("some user cannot decode"))
    }
}

fn mais_cmd(cli: &Cli, inst: &IndexCodingInstance, out: &mut String) -> Result<(), CliError> {
    let graph = inst.side_info_graph().map_err(usage)?;
    let r = mais(&graph, inst.channel_bits()).map_err(usage)?;
    let witness = r
        .witness
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",");
    match cli.format {
        Format::Csv => {
            let mut row = rational_row("bound", &r.symmetric_upper);
            row.insert(1, r.mais_size.to_string());
            row.insert(2, witness);
            csv_out(
                out,
                &["quantity", "mais", "witness", "num", "den", "decimal"],
                &[row],
            )?;
        }
        Format::Table => {
            writeln!(out, "mais       {}", r.mais_size).unwrap();
            writeln!(out, "witness    {{{witness}}}").unwrap();
            writeln!(out, "bound      {}", q(&r.symmetric_upper)).unwrap();
        }
    }
    Ok(())
}

fn sandwich(
    cli: &Cli,
    inst: &IndexCodingInstance,
    scheme: &LinearScheme,
    cap: Option<usize>,
    out: &mut String,
) -> Result<(), CliError> {
    matching(inst, scheme)?;
    let c = ExactRational::from(inst.channel_bits());
    let composite = &time_shared(cli, inst, cap)?.symmetric_rate / &c;
    let v = check_scheme(inst, scheme, &DecodingChoice::demands_only(inst)).map_err(usage)?;
    let decodes = zero_error_decode_check(inst, scheme, DecodeMode::Algebraic).map_err(usage)?;
    let graph = inst.side_info_graph().map_err(usage)?;
    let outer = mais(&graph, 1).map_err(usage)?.symmetric_upper;
    let linear_ok = v.pass() && decodes.iter().all(|&b| b);
    let rows = vec![
        rational_row("composite", &composite),
        rational_row("linear", &v.symmetric_rate),
        rational_row("acyclic", &outer),
    ];
    let ordered = composite <= v.symmetric_rate && v.symmetric_rate <= outer;
    match cli.format {
        Format::Csv => csv_out(out, &["bound", "num", "den", "decimal"], &rows)?,
        Format::Table => {
            writeln!(out, "normalized by the channel bits:").unwrap();
            for r in &rows {
                writeln!(out, "{:<10} {}/{} ({})", r[0], r[1], r[2], r[3]).unwrap();
            }
            writeln!(
                out,
                "linear scheme {}",
                if linear_ok {
                    "certified"
                } else {
                    "NOT certified"
                }
            )
            .unwrap();
            writeln!(
                out,
                "composite <= linear <= acyclic {}",
                if ordered { "holds" } else { "VIOLATED" }
            )
            .unwrap();
        }
    }
    if !linear_ok {
        return Err(failure("linear scheme is not certified"));
    }
    if !ordered {
        return Err(failure("bounds are out of order"));
    }
    Ok(())
}

fn demand_vector(d: &[usize], files: usize) -> Result<DemandVector, CliError> {
    DemandVector::new(d.to_vec(), files).map_err(usage)
}

fn cache(cli: &Cli, cmd: &CacheCommand, out: &mut String) -> Result<(), CliError> {
    match cmd {
        CacheCommand::Sim {
            grid,
            t,
            demands,
            file_bits,
            mode,
            decentralized,
            memory,
            seed,
            trials,
            log,
        } => {
            if *decentralized {
                let m = memory
                    .as_deref()
                    .ok_or_else(|| usage("--decentralized needs --M"))?;
                let m = ExactRational::from_str(m).map_err(usage)?;
                sim_decentralized(
                    cli,
                    grid,
                    demands.as_deref(),
                    *file_bits,
                    &m,
                    *seed,
                    *trials,
                    *log,
                    out,
                )
            } else {
                let t = t.ok_or_else(|| usage("centralized simulation needs --t"))?;
                let mode = match mode {
                    DeliveryArg::Full => DeliveryMode::Full,
                    DeliveryArg::Reduced => DeliveryMode::Reduced,
                };
                sim_centralized(
                    cli,
                    grid,
                    t,
                    demands.as_deref(),
                    *file_bits,
                    mode,
                    *seed,
                    *log,
                    out,
                )
            }
        }
        CacheCommand::Formulas { grid, memory } => formulas(cli, grid, memory.as_deref(), out),
        CacheCommand::Reduce {
            grid,
            t,
            demands,
            channel_bits,
            out: path,
        } => {
            let d = demand_vector(demands, grid.files)?;
            let count = binomial(grid.users as u64, *t as u64) as usize;
            let map = SubfileMap::centralized(grid.users, grid.files, *t, count).map_err(usage)?;
            let r = reduce_to_index_coding(&map, &d, *channel_bits).map_err(failure)?;
            let mut text = String::new();
            for (k, (i, w)) in r.labels.iter().enumerate() {
                writeln!(text, "# message {} = F_{{{i},{w}}}", k + 1).unwrap();
            }
            for k in &r.dropped {
                writeln!(
                    text,
                    "# caching user {k} caches its whole file and is left out"
                )
                .unwrap();
            }
            text.push_str(&write_instance(&r.instance));
            emit(out, path.as_deref(), &text)
        }
        CacheCommand::Synthesize {
            grid,
            t,
            demands,
            subfile_bits,
            out_instance,
            out_scheme,
        } => {
            let d = demand_vector(demands, grid.files)?;
            let s = synthesize_theorem4_scheme(grid.users, grid.files, *t, &d, *subfile_bits)
                .map_err(usage)?;
            emit(
                out,
                out_instance.as_deref(),
                &write_instance(&s.reduction.instance),
            )?;
            emit(out, out_scheme.as_deref(), &write_scheme(&s.scheme))
        }
    }
}

fn emit(out: &mut String, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            writeln!(out, "wrote {}", p.display()).unwrap();
        }
        None => out.push_str(text),
    }
    Ok(())
}

const LOAD_HEADER: [&str; 7] = ["K", "N", "t", "d", "mode", "load_num", "load_den"];

fn load_row(
    grid: &Grid,
    t: &str,
    d: &DemandVector,
    mode: &str,
    load: &ExactRational,
) -> Vec<String> {
    vec![
        grid.users.to_string(),
        grid.files.to_string(),
        t.to_string(),
        d.to_string(),
        mode.to_string(),
        load.numer().to_string(),
        load.denom().to_string(),
    ]
}

/// Checks every user's decoded file against the library.
fn decoded_all(
    lib: &FileLibrary,
    map: &SubfileMap,
    cache: &icl_core::caching::CacheState,
    tx: &DeliveryTranscript,
    d: &DemandVector,
) -> Vec<usize> {
    decode_all_users(map, cache, tx, d)
        .into_iter()
        .enumerate()
        .filter(|(k, r)| r.as_ref().map_or(true, |f| f != lib.file(d.of(k + 1))))
        .map(|(k, _)| k + 1)
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn sim_centralized(
    cli: &Cli,
    grid: &Grid,
    t: usize,
    demands: Option<&[usize]>,
    file_bits: usize,
    mode: DeliveryMode,
    seed: u64,
    log: bool,
    out: &mut String,
) -> Result<(), CliError> {
    let lib = FileLibrary::random(grid.files, file_bits, seed).map_err(usage)?;
    let (cache, map) = cman_place(grid.users, t, &lib).map_err(usage)?;
    let vectors: Vec<DemandVector> = match demands {
        Some(d) => vec![demand_vector(d, grid.files)?],
        None => DemandVector::all(grid.users, grid.files).collect(),
    };
    let mode_name = match mode {
        DeliveryMode::Full => "full",
        DeliveryMode::Reduced => "reduced",
    };
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    let mut worst = ExactRational::zero();
    for d in &vectors {
        let tx = deliver(&lib, &map, d, mode).map_err(usage)?;
        let load = tx.load();
        let bad = decoded_all(&lib, &map, &cache, &tx, d);
        if !bad.is_empty() {
            failed.push(format!("d = ({d}): users {bad:?}"));
        }
        if log {
            out.push_str(&tx.log());
        }
        worst = worst.max(load.clone());
        rows.push(load_row(grid, &t.to_string(), d, mode_name, &load));
    }
    match cli.format {
        Format::Csv => csv_out(out, &LOAD_HEADER, &rows)?,
        Format::Table => {
            if let [only] = vectors.as_slice() {
                writeln!(out, "demand     {only}").unwrap();
                writeln!(out, "load       {}", q(&worst)).unwrap();
                let expected = match mode {
                    DeliveryMode::Full => r_cman(grid.users, t),
                    DeliveryMode::Reduced => reduced_load(grid.users, only.distinct().len(), t),
                }
                .map_err(usage)?;
                writeln!(out, "formula    {}", q(&expected)).unwrap();
            } else {
                writeln!(out, "demands    {} vectors", vectors.len()).unwrap();
                writeln!(out, "worst load {}", q(&worst)).unwrap();
            }
            if failed.is_empty() {
                writeln!(out, "all users decoded").unwrap();
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(failure(format!(
            "decoding failed for {}",
            failed.join("; ")
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn sim_decentralized(
    cli: &Cli,
    grid: &Grid,
    demands: Option<&[usize]>,
    file_bits: usize,
    memory: &ExactRational,
    seed: u64,
    trials: u64,
    log: bool,
    out: &mut String,
) -> Result<(), CliError> {
    let d = match demands {
        Some(d) => demand_vector(d, grid.files)?,
        None => demand_vector(
            &(0..grid.users)
                .map(|k| k % grid.files + 1)
                .collect::<Vec<_>>(),
            grid.files,
        )?,
    };
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    let mut sum = ExactRational::zero();
    for s in seed..seed + trials.max(1) {
        let lib = FileLibrary::random(grid.files, file_bits, s).map_err(usage)?;
        let (cache, map) = dman_place(grid.users, &lib, memory, s).map_err(usage)?;
        let tx = dman_deliver(&lib, &map, &d).map_err(usage)?;
        let load = tx.load();
        let bad = decoded_all(&lib, &map, &cache, &tx, &d);
        if !bad.is_empty() {
            failed.push(format!("seed {s}: users {bad:?}"));
        }
        if log {
            out.push_str(&tx.log());
        }
        sum += &load;
        rows.push(load_row(
            grid,
            "",
            &d,
            &format!("decentralized seed={s}"),
            &load,
        ));
    }
    let mean = sum / ExactRational::from(trials.max(1));
    let formula = icl_core::caching::formula_loads(&LoadQuery::RdOpt {
        users: grid.users,
        files: grid.files,
        memory: memory.clone(),
    })
    .map_err(usage)?;
    match cli.format {
        Format::Csv => csv_out(out, &LOAD_HEADER, &rows)?,
        Format::Table => {
            writeln!(out, "demand     {d}").unwrap();
            writeln!(out, "trials     {}", trials.max(1)).unwrap();
            writeln!(out, "mean load  {:.6}", mean.to_f64()).unwrap();
            writeln!(out, "formula    {}", q(&formula)).unwrap();
            if failed.is_empty() {
                writeln!(out, "all users decoded").unwrap();
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(failure(format!(
            "decoding failed for {}",
            failed.join("; ")
        )))
    }
}

fn formulas(
    cli: &Cli,
    grid: &Grid,
    memory: Option<&str>,
    out: &mut String,
) -> Result<(), CliError> {
    let (k, n) = (grid.users, grid.files);
    let mut rows = Vec::new();
    for t in 0..=k {
        let m = ExactRational::from(t * n) / ExactRational::from(k);
        let a = r_cman(k, t).map_err(usage)?;
        let b = r_c_opt(k, n, t).map_err(usage)?;
        rows.push(vec![
            t.to_string(),
            m.to_string(),
            a.to_string(),
            b.to_string(),
        ]);
    }
    let extra = match memory {
        Some(m) => {
            let m = ExactRational::from_str(m).map_err(usage)?;
            let env = r_c_opt_envelope(k, n, &m).map_err(usage)?;
            let dq = |query| icl_core::caching::formula_loads(&query).map_err(usage);
            let dman = dq(LoadQuery::RdMan {
                users: k,
                files: n,
                memory: m.clone(),
            })?;
            let dopt = dq(LoadQuery::RdOpt {
                users: k,
                files: n,
                memory: m.clone(),
            })?;
            Some((m, env, dman, dopt))
        }
        None => None,
    };
    match cli.format {
        Format::Csv => {
            csv_out(out, &["t", "M", "r_cman", "r_c_opt"], &rows)?;
            if let Some((m, env, dman, dopt)) = extra {
                csv_out(
                    out,
                    &["M", "r_c_opt_envelope", "r_dman", "r_d_opt"],
                    &[vec![
                        m.to_string(),
                        env.to_string(),
                        dman.to_string(),
                        dopt.to_string(),
                    ]],
                )?;
            }
        }
        Format::Table => {
            writeln!(
                out,
                "{:>3} {:>8} {:>12} {:>12}",
                "t", "M", "r_cman", "r_c_opt"
            )
            .unwrap();
            for r in &rows {
                writeln!(out, "{:>3} {:>8} {:>12} {:>12}", r[0], r[1], r[2], r[3]).unwrap();
            }
            if let Some((m, env, dman, dopt)) = extra {
                writeln!(out, "at M = {m}:").unwrap();
                writeln!(out, "  centralized envelope  {}", q(&env)).unwrap();
                writeln!(out, "  decentralized         {}", q(&dman)).unwrap();
                writeln!(out, "  decentralized optimal {}", q(&dopt)).unwrap();
            }
        }
    }
    Ok(())
}
