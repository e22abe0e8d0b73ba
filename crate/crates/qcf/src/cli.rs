//! The `qcf` command line.
//!
//! Every command builds a [`Report`] that can be rendered as text, JSON or
//! (for tabular commands) CSV. Exit codes: 0 success, 1 verification failure
//! or runtime error, 2 usage or input error.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcf_core::blocks::{verify_completeness, verify_family, BlockFamily, Variant};
use qcf_core::gaussmaps::ReturnStatus;
use qcf_core::sharpsets::{classify_with, e_sets, sample_f_phi, HeightChange, Region};
use qcf_core::{CaseId, GaussMap, HeightSq, OrderedInterval, ProjPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::descent::descent;
use crate::format::{decimal, elem_json, float, matrix_json, point_decimal, point_json};
use crate::sample::{parse_word, random_point, random_point_in, COORD_BOUND};
use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "qcf", version, about = "Exact slow continued-fraction maps, Weil heights and decreasing blocks")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// Step budget for orbit iteration.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_steps: usize,
    /// Decimal places for approximations.
    #[arg(long, global = true, default_value_t = crate::format::PLACES)]
    places: u32,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List the built-in cases.
    ListCases,
    /// Build a map and print its matrices, endpoints and invariant checks.
    Validate {
        #[arg(value_name = "CASE")]
        case_arg: Option<String>,
        #[arg(long)]
        case: Option<String>,
    },
    /// Build a map; with --validate also print the checks.
    Build {
        #[arg(long)]
        case: String,
        #[arg(long)]
        validate: bool,
    },
    /// Iterate the map from a point until a fixed point or the budget.
    Orbit(PointArgs),
    /// Iterate until the orbit returns to [0, e_(r-1)].
    FirstReturn(PointArgs),
    /// t, f and the sets E#, E=, E- of a word matrix.
    Esets {
        #[arg(long)]
        case: String,
        #[arg(long)]
        word: String,
        /// Random points to classify.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CSV of (x, f(phi(x)), t) on [0, 2].
    PlotF {
        #[arg(long)]
        case: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Block family certification.
    Blocks {
        #[command(subcommand)]
        cmd: BlocksCmd,
    },
    /// Exact height of a point, optionally also of its image under a word.
    Height {
        #[arg(long)]
        case: String,
        #[arg(long)]
        point: String,
        #[arg(long)]
        word: Option<String>,
    },
    /// The fixed point lam^2 - lam - 1 of the cubic map.
    FixedPointDemo {
        #[arg(long, default_value = "2_7_cubic")]
        case: String,
    },
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    case: String,
    #[arg(long)]
    point: String,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long)]
    case: String,
    /// literal, corrected or coarse.
    #[arg(long, default_value = "corrected")]
    variant: String,
    /// One pattern per line; overrides --variant.
    #[arg(long)]
    family_file: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
enum BlocksCmd {
    /// Check every pattern for all star counts.
    Verify(FamilyArgs),
    /// Check that the family covers every admissible sequence.
    Complete(FamilyArgs),
    /// Split orbits into blocks and check the heights drop.
    Split {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// The output of one command.
struct Report {
    command: &'static str,
    case: Option<CaseId>,
    ok: bool,
    text: String,
    json: Value,
    table: Option<Table>,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    /// Comment line after the rows.
    trailer: Option<String>,
}

impl Report {
    fn new(command: &'static str, case: Option<CaseId>) -> Report {
        Report { command, case, ok: true, text: String::new(), json: json!({}), table: None }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }
}

/// Parse `args` (including the program name), run the command and write its
/// output. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return if code == 0 { 0 } else { 2 };
        }
    };
    let emit = cli.emit;
    match dispatch(&cli).and_then(|r| render(&r, emit, out).map(|()| r.ok)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn render(r: &Report, emit: Emit, out: &mut dyn Write) -> Result<(), CliError> {
    match emit {
        Emit::Text => out.write_all(r.text.as_bytes())?,
        Emit::Json => {
            let v = json!({
                "command": r.command,
                "case": r.case.map(|c| c.name()),
                "status": if r.ok { "ok" } else { "fail" },
                "result": r.json,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"))?;
        }
        Emit::Csv => {
            let t = r
                .table
                .as_ref()
                .ok_or_else(|| CliError::Usage(format!("`{}` has no CSV form", r.command)))?;
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(&t.header)?;
            for row in &t.rows {
                w.write_record(row)?;
            }
            w.flush()?;
            drop(w);
            if let Some(tr) = &t.trailer {
                writeln!(out, "{tr}")?;
            }
        }
    }
    Ok(())
}

fn case_of(s: &str) -> Result<CaseId, CliError> {
    s.parse::<CaseId>().map_err(|_| {
        let names: Vec<&str> = CaseId::ALL.iter().map(|c| c.name()).collect();
        CliError::Usage(format!("unknown case `{s}` (expected one of {})", names.join(", ")))
    })
}

fn point_of(s: &str, map: &GaussMap) -> Result<ProjPoint, CliError> {
    let p = ProjPoint::parse(s, map.field())?;
    if !p.in_base_interval() {
        return Err(CliError::Usage(format!("{p} is outside [0, inf]")));
    }
    Ok(p)
}

/// Run-length form `a^n` of a word, readable by the word parser.
pub fn word_text(w: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let j = i + w[i..].iter().take_while(|&&a| a == w[i]).count();
        parts.push(if j - i == 1 { w[i].to_string() } else { format!("{}^{}", w[i], j - i) });
        i = j;
    }
    parts.join(",")
}

fn interval_json(iv: &OrderedInterval, places: u32) -> Value {
    json!({
        "lo": point_json(&iv.lo),
        "hi": point_json(&iv.hi),
        "lo_open": iv.lo_open,
        "hi_open": iv.hi_open,
        "text": iv.to_string(),
        "decimal": [point_decimal(&iv.lo, places), point_decimal(&iv.hi, places)],
    })
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let p = cli.places;
    match &cli.cmd {
        Cmd::ListCases => Ok(list_cases()),
        Cmd::Validate { case_arg, case } => {
            let name = case_arg
                .as_deref()
                .or(case.as_deref())
                .ok_or_else(|| CliError::Usage("validate needs a case".into()))?;
            validate(case_of(name)?, true, p)
        }
        Cmd::Build { case, validate: v } => validate(case_of(case)?, *v, p),
        Cmd::Orbit(a) => orbit(case_of(&a.case)?, &a.point, cli.max_steps, p),
        Cmd::FirstReturn(a) => first_return(case_of(&a.case)?, &a.point, cli.max_steps, p),
        Cmd::Esets { case, word, samples, seed } => esets(case_of(case)?, word, *samples, *seed, p),
        Cmd::PlotF { case, word, samples } => plot_f(case_of(case)?, word, *samples),
        Cmd::Blocks { cmd } => blocks(cmd, cli.max_steps),
        Cmd::Height { case, point, word } => height(case_of(case)?, point, word.as_deref(), p),
        Cmd::FixedPointDemo { case } => fixed_point_demo(case_of(case)?, p),
    }
}

fn list_cases() -> Report {
    let mut r = Report::new("list-cases", None);
    let mut rows = Vec::new();
    for c in CaseId::ALL {
        let (l, m) = c.signature();
        let sig = if m == 0 { format!("({l},inf,inf)") } else { format!("({l},{m},inf)") };
        r.line(format!("{:<10} {:<14} K = Q({}) r = {}", c.name(), sig, c.field(), c.r()));
        rows.push(vec![c.name().to_string(), sig, c.field().to_string(), c.r().to_string()]);
    }
    r.json = Value::Array(
        rows.iter().map(|x| json!({"case": x[0], "signature": x[1], "field": x[2], "r": x[3].parse::<usize>().unwrap()})).collect(),
    );
    r.table = Some(Table { header: vec!["case", "signature", "field", "r"], rows, trailer: None });
    r
}

fn validate(case: CaseId, checks: bool, p: u32) -> Result<Report, CliError> {
    let map = GaussMap::build(case)?;
    let mut r = Report::new(if checks { "validate" } else { "build" }, Some(case));
    r.line(format!("case {case}: K = Q({}), r = {}", case.field(), map.r()));
    for (a, m) in map.matrices().iter().enumerate() {
        r.line(format!("A{} = {m}  det {}", a + 1, m.det()));
    }
    let ends: Vec<String> = map.endpoints().iter().map(|e| format!("{e} ~ {}", point_decimal(e, p))).collect();
    r.line(format!("endpoints: {}", ends.join(" < ")));
    let results = if checks { map.validate() } else { Vec::new() };
    let mut rows = Vec::new();
    for c in &results {
        r.line(format!("[{}] {} {}", if c.ok { "ok" } else { "FAIL" }, c.condition, c.detail));
        rows.push(vec![c.condition.to_string(), c.ok.to_string(), c.detail.clone()]);
    }
    r.ok = results.iter().all(|c| c.ok);
    r.json = json!({
        "field": case.field().to_string(),
        "r": map.r(),
        "matrices": map.matrices().iter().map(matrix_json).collect::<Vec<_>>(),
        "endpoints": map.endpoints().iter().map(point_json).collect::<Vec<_>>(),
        "checks": results.iter().map(|c| json!({"condition": c.condition, "ok": c.ok, "detail": c.detail})).collect::<Vec<_>>(),
    });
    r.table = Some(Table { header: vec!["condition", "ok", "detail"], rows, trailer: None });
    Ok(r)
}

fn orbit(case: CaseId, point: &str, max_steps: usize, p: u32) -> Result<Report, CliError> {
    let map = GaussMap::build(case)?;
    let x = point_of(point, &map)?;
    let o = map.orbit(&x, max_steps)?;
    let mut r = Report::new("orbit", Some(case));
    let fin = HeightSq::of(&o.final_point);
    r.line(format!("start: {x} ~ {}", point_decimal(&x, p)));
    r.line(format!("status: {} after {} steps", o.status.label(), o.len()));
    r.line(format!("final: {} (log height {})", o.final_point, float(fin.log_height())));
    r.line(format!("digits: {}", word_text(&o.digits())));
    if !o.cycle.is_empty() {
        r.line(format!("cycle: {}", word_text(&o.cycle)));
    }
    let rows: Vec<Vec<String>> = o
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| vec![i.to_string(), s.digit.to_string(), s.point.to_string(), float(s.h2.log_height())])
        .collect();
    r.json = json!({
        "start": point_json(&x),
        "status": o.status.label(),
        "steps": o.len(),
        "final": point_json(&o.final_point),
        "final_log_height": float(fin.log_height()),
        "digits": o.digits(),
        "cycle": o.cycle,
    });
    let trailer = format!("# end: status={} steps={} final={}", o.status.label(), o.len(), o.final_point);
    r.table = Some(Table { header: vec!["step", "digit", "point", "log_height"], rows, trailer: Some(trailer) });
    Ok(r)
}

fn first_return(case: CaseId, point: &str, max_steps: usize, p: u32) -> Result<Report, CliError> {
    let map = GaussMap::build(case)?;
    let x = point_of(point, &map)?;
    let fr = map.first_return(&x, max_steps)?;
    let (h0, h1) = (HeightSq::of(&x), HeightSq::of(&fr.point));
    let status = match fr.status {
        ReturnStatus::Returned => "returned",
        ReturnStatus::Diverged => "diverged",
        ReturnStatus::BudgetExhausted => "step-budget-exhausted",
    };
    let change = match h1.cmp(&h0) {
        std::cmp::Ordering::Less => "decrease",
        std::cmp::Ordering::Equal => "equal",
        std::cmp::Ordering::Greater => "increase",
    };
    let mut r = Report::new("first-return", Some(case));
    r.line(format!("start: {x} ~ {} (log height {})", point_decimal(&x, p), float(h0.log_height())));
    r.line(format!("{status} after {} steps, word {}", fr.steps, word_text(&fr.word)));
    r.line(format!("return: {} ~ {} (log height {})", fr.point, point_decimal(&fr.point, p), float(h1.log_height())));
    r.line(format!("height: {change}"));
    r.json = json!({
        "start": point_json(&x),
        "return": point_json(&fr.point),
        "status": status,
        "steps": fr.steps,
        "word": fr.word,
        "log_height": [float(h0.log_height()), float(h1.log_height())],
        "h2": [elem_json(h0.value()), elem_json(h1.value())],
        "height_change": change,
    });
    let mut pts = vec![x.clone()];
    let mut y = x;
    for _ in &fr.word {
        y = map.step(&y)?.1;
        pts.push(y.clone());
    }
    let rows = fr
        .word
        .iter()
        .chain(std::iter::once(&0))
        .zip(&pts)
        .enumerate()
        .map(|(i, (d, q))| vec![i.to_string(), d.to_string(), q.to_string(), float(HeightSq::of(q).log_height())])
        .collect();
    let trailer = format!("# end: status={status} steps={} final={}", fr.steps, fr.point);
    r.table = Some(Table { header: vec!["step", "digit", "point", "log_height"], rows, trailer: Some(trailer) });
    Ok(r)
}

fn esets(case: CaseId, word: &str, samples: usize, seed: u64, p: u32) -> Result<Report, CliError> {
    let map = GaussMap::build(case)?;
    let w = parse_word(word, case)?;
    let m = map.word_matrix(&w)?;
    let e = e_sets(&m)?;
    let mut r = Report::new("esets", Some(case));
    r.line(format!("A = {m}"));
    r.line(format!("t = {} ~ {}", e.t, decimal(&e.t, p)));
    r.line(format!("f(0) = {} ~ {}", e.f0, decimal(&e.f0, p)));
    r.line(format!("f(1) = {} ~ {}", e.f1, decimal(&e.f1, p)));
    r.line(format!("f(inf) = {} ~ {}", e.finf, decimal(&e.finf, p)));
    let show = |v: &[OrderedInterval]| {
        if v.is_empty() {
            "empty".to_string()
        } else {
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" u ")
        }
    };
    let sharp: Vec<OrderedInterval> = e.esharp.iter().cloned().collect();
    r.line(format!("E#: {}", show(&sharp)));
    r.line(format!("E=: {}", show(&e.enatural)));
    r.line(format!("E-: {}", show(&e.eflat)));
    let mut rows = Vec::new();
    for (name, v) in [("sharp", &sharp), ("natural", &e.enatural), ("flat", &e.eflat)] {
        for iv in v {
            rows.push(vec![
                name.to_string(),
                iv.lo.to_string(),
                iv.hi.to_string(),
                iv.lo_open.to_string(),
                iv.hi_open.to_string(),
                point_decimal(&iv.lo, p),
                point_decimal(&iv.hi, p),
            ]);
        }
    }
    let mut inside = Vec::new();
    for b in 1..=map.r() {
        if e.closure_contains(&map.interval(b))? {
            inside.push(b);
        }
    }
    let listed: Vec<String> = inside.iter().map(ToString::to_string).collect();
    r.line(format!("I_b inside the closure of E#: b in {{{}}}", listed.join(", ")));
    let mut counts = std::collections::BTreeMap::new();
    let mut inconsistent = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_point(&mut rng, case.field(), COORD_BOUND);
        let c = classify_with(&e, &x)?;
        let region = match c.region {
            Region::Sharp => "sharp",
            Region::Natural => "natural",
            Region::Flat => "flat",
        };
        let change = match c.change {
            HeightChange::Increase => "increase",
            HeightChange::Equal => "equal",
            HeightChange::Decrease => "decrease",
        };
        *counts.entry(format!("{region}/{change}")).or_insert(0usize) += 1;
        if !c.consistent {
            inconsistent += 1;
        }
    }
    if samples > 0 {
        for (k, v) in &counts {
            r.line(format!("sampled {k}: {v}"));
        }
        r.line(format!("inconsistent with the E-sets: {inconsistent}"));
    }
    r.ok = inconsistent == 0;
    r.json = json!({
        "word": w,
        "matrix": matrix_json(&m),
        "t": elem_json(&e.t),
        "t_decimal": decimal(&e.t, p),
        "f0": decimal(&e.f0, p),
        "f1": decimal(&e.f1, p),
        "finf": decimal(&e.finf, p),
        "esharp": sharp.iter().map(|iv| interval_json(iv, p)).collect::<Vec<_>>(),
        "enatural": e.enatural.iter().map(|iv| interval_json(iv, p)).collect::<Vec<_>>(),
        "eflat": e.eflat.iter().map(|iv| interval_json(iv, p)).collect::<Vec<_>>(),
        "inside_sharp": inside,
        "samples": counts,
        "inconsistent": inconsistent,
    });
    r.table = Some(Table { header: vec!["set", "lo", "hi", "lo_open", "hi_open", "lo_decimal", "hi_decimal"], rows, trailer: None });
    Ok(r)
}

fn plot_f(case: CaseId, word: &str, samples: usize) -> Result<Report, CliError> {
    let map = GaussMap::build(case)?;
    let w = parse_word(word, case)?;
    let m = map.word_matrix(&w)?;
    let data = sample_f_phi(&m, samples)?;
    let mut r = Report::new("plot-f", Some(case));
    let rows: Vec<Vec<String>> = data.iter().map(|(x, f, t)| vec![float(*x), float(*f), float(*t)]).collect();
    for row in &rows {
        r.line(row.join(" "));
    }
    r.json = json!({ "word": w, "points": data.iter().map(|(x, f, t)| json!([x, f, t])).collect::<Vec<_>>() });
    r.table = Some(Table { header: vec!["x", "f_phi", "t"], rows, trailer: None });
    Ok(r)
}

fn family_of(a: &FamilyArgs) -> Result<(CaseId, BlockFamily, String), CliError> {
    let case = case_of(&a.case)?;
    match &a.family_file {
        Some(path) => {
            let src = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let lines: Vec<&str> = src.lines().collect();
            Ok((case, BlockFamily::parse(case, &lines)?, path.display().to_string()))
        }
        None => {
            let v: Variant = a.variant.parse().map_err(|_| CliError::Usage(format!("unknown variant `{}`", a.variant)))?;
            let fam = BlockFamily::variant(case, v).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok((case, fam, a.variant.clone()))
        }
    }
}

fn blocks(cmd: &BlocksCmd, max_steps: usize) -> Result<Report, CliError> {
    match cmd {
        BlocksCmd::Verify(a) => {
            let (case, fam, source) = family_of(a)?;
            let map = GaussMap::build(case)?;
            let cert = verify_family(&map, &fam)?;
            let mut r = Report::new("blocks verify", Some(case));
            r.line(format!("family: {source}, {} patterns", fam.patterns.len()));
            let mut rows = Vec::new();
            for pc in &cert.patterns {
                let ce = pc.counterexample.as_deref().map(word_text).unwrap_or_default();
                let status = if pc.ok { "ok".to_string() } else { format!("FAIL at {ce}") };
                r.line(format!("[{status}] {} ({} cases)", pc.pattern, pc.checked));
                rows.push(vec![pc.pattern.to_string(), pc.checked.to_string(), pc.ok.to_string(), ce]);
            }
            r.ok = cert.ok();
            r.line(if r.ok { "all patterns are decreasing blocks" } else { "some pattern is not decreasing" });
            r.json = json!({
                "family": source,
                "patterns": cert.patterns.iter().map(|pc| json!({
                    "pattern": pc.pattern.to_string(),
                    "checked": pc.checked,
                    "ok": pc.ok,
                    "counterexample": pc.counterexample,
                })).collect::<Vec<_>>(),
            });
            r.table = Some(Table { header: vec!["pattern", "checked", "ok", "counterexample"], rows, trailer: None });
            Ok(r)
        }
        BlocksCmd::Complete(a) => {
            let (case, fam, source) = family_of(a)?;
            let map = GaussMap::build(case)?;
            let cert = verify_completeness(&map, &fam)?;
            let mut r = Report::new("blocks complete", Some(case));
            r.ok = cert.complete;
            r.line(format!("family: {source}, {} patterns", fam.patterns.len()));
            r.line(format!("states before a block: {}, cycles: {}", cert.avoid_states, cert.sccs.len()));
            let mut rows = Vec::new();
            for s in &cert.sccs {
                let letters: Vec<String> = s.letters.iter().map(ToString::to_string).collect();
                let letters = letters.join(" ");
                if !s.allowed {
                    r.line(format!("[FAIL] cycle on {{{letters}}} ({} states)", s.states));
                }
                rows.push(vec![s.states.to_string(), letters, s.allowed.to_string()]);
            }
            let allowed = cert.sccs.iter().filter(|s| s.allowed).count();
            r.line(format!("[ok] {allowed} cycles on allowed letters"));
            match &cert.lasso {
                Some((pre, cyc)) => r.line(format!("uncovered: {} ({})^w", word_text(pre), word_text(cyc))),
                None => r.line("complete"),
            }
            r.json = json!({
                "family": source,
                "complete": cert.complete,
                "avoid_states": cert.avoid_states,
                "lasso": cert.lasso.as_ref().map(|(p, c)| json!({"prefix": p, "cycle": c})),
            });
            r.table = Some(Table { header: vec!["states", "letters", "allowed"], rows, trailer: None });
            Ok(r)
        }
        BlocksCmd::Split { family, point, samples, seed } => {
            let (case, fam, _) = family_of(family)?;
            let map = GaussMap::build(case)?;
            let mut r = Report::new("blocks split", Some(case));
            let points = match point {
                Some(s) => vec![point_of(s, &map)?],
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    let base = OrderedInterval::base(map.field());
                    (0..*samples)
                        .map(|_| random_point_in(&mut rng, &base, COORD_BOUND))
                        .collect::<Result<Vec<_>, _>>()?
                }
            };
            let mut rows = Vec::new();
            let mut runs = Vec::new();
            let mut failures = 0;
            for x in &points {
                let d = descent(&map, &fam, x, max_steps)?;
                let bs: Vec<usize> = d.boundaries().collect();
                r.line(format!(
                    "{x}: {} steps, {} blocks, {}",
                    d.word.len() - 1,
                    bs.len().saturating_sub(1),
                    if d.ok() { "heights drop" } else { "VIOLATION" }
                ));
                if points.len() == 1 {
                    for (i, &b) in bs.iter().enumerate() {
                        let q = &d.points[b];
                        let h = HeightSq::of(q);
                        let block = bs.get(i + 1).map(|&e| word_text(&d.word[b..=e])).unwrap_or_default();
                        r.line(format!("  t = {b}: {q} log height {} block {block}", float(h.log_height())));
                        rows.push(vec![i.to_string(), b.to_string(), block, q.to_string(), h.to_string(), float(h.log_height())]);
                    }
                }
                if !d.ok() {
                    failures += 1;
                }
                runs.push(json!({
                    "point": point_json(x),
                    "boundaries": bs,
                    "patterns": d.split.patterns,
                    "terminated": d.terminated,
                    "violations": d.violations,
                }));
            }
            r.ok = failures == 0;
            r.line(format!("{} orbits, {failures} violations", points.len()));
            r.json = json!({ "runs": runs, "violations": failures });
            r.table = Some(Table { header: vec!["block", "boundary", "letters", "point", "h2", "log_height"], rows, trailer: None });
            Ok(r)
        }
    }
}

fn height(case: CaseId, point: &str, word: Option<&str>, p: u32) -> Result<Report, CliError> {
    let map = GaussMap::build(case)?;
    let x = point_of(point, &map)?;
    let mut r = Report::new("height", Some(case));
    let d = case.field().degree();
    let mut entries = vec![(x.clone(), HeightSq::of(&x))];
    if let Some(w) = word {
        let m = map.word_matrix(&parse_word(w, case)?)?;
        let y = m.act(&x);
        entries.push((y.clone(), HeightSq::of(&y)));
    }
    let mut rows = Vec::new();
    let mut js = Vec::new();
    for (q, h) in &entries {
        r.line(format!("point {q} ~ {}", point_decimal(q, p)));
        r.line(format!("  H^{d} = {h} ~ {}", decimal(h.value(), p)));
        r.line(format!("  H ~ {}  log H ~ {}", float(h.height()), float(h.log_height())));
        rows.push(vec![q.to_string(), h.to_string(), float(h.height()), float(h.log_height())]);
        js.push(json!({
            "point": point_json(q),
            "h_power": d,
            "h": elem_json(h.value()),
            "h_text": h.to_string(),
            "height": float(h.height()),
            "log_height": float(h.log_height()),
        }));
    }
    if let [(_, a), (_, b)] = &entries[..] {
        let c = match b.cmp(a) {
            std::cmp::Ordering::Less => "decrease",
            std::cmp::Ordering::Equal => "equal",
            std::cmp::Ordering::Greater => "increase",
        };
        r.line(format!("height under the word: {c}"));
    }
    r.json = Value::Array(js);
    r.table = Some(Table { header: vec!["point", "h_power", "height", "log_height"], rows, trailer: None });
    Ok(r)
}

fn fixed_point_demo(case: CaseId, p: u32) -> Result<Report, CliError> {
    let map = GaussMap::build(case)?;
    let rep = map.fixed_point_check().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut r = Report::new("fixed-point-demo", Some(case));
    r.line(format!("xi = {} ~ {}", rep.xi, point_decimal(&rep.xi, p)));
    r.line(format!("in I_1: {}, digit {}", rep.in_i1, rep.digit));
    r.line(format!("fixed by the first branch: {}", rep.fixed));
    r.line(format!("trace(A1^2) = {} ~ {}", rep.trace_sq, decimal(&rep.trace_sq, p)));
    r.line(format!("A1^2 hyperbolic: {}", rep.hyperbolic));
    r.ok = rep.in_i1 && rep.fixed && rep.hyperbolic;
    r.json = json!({
        "xi": point_json(&rep.xi),
        "in_i1": rep.in_i1,
        "digit": rep.digit,
        "fixed": rep.fixed,
        "trace_sq": elem_json(&rep.trace_sq),
        "trace_sq_text": rep.trace_sq.to_string(),
        "hyperbolic": rep.hyperbolic,
    });
    Ok(r)
}
