//! `chl`: command-line front end for the chl-core library.
//!
//! Exit codes: 0 when every check passes, 1 when a computed value differs
//! from the catalog, 2 on usage or catalog errors.

use std::path::PathBuf;
use std::process::ExitCode;

use chl_core::arith::{self, TraceFieldStatus};
use chl_core::catalog::{kappa, kappa_symbolic, Catalog, Params};
use chl_core::cusp::{self, CuspProfile, CuspSetup};
use chl_core::cyclofield::numeric::format_approx;
use chl_core::cyclofield::CycElem;
use chl_core::error::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

/// Writes a line to stdout, ignoring a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser, Debug)]
#[command(name = "chl", version, about = "Exact verification of lattices from exceptional complex reflection groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Text, global = true)]
    output: Output,
    /// Bits of precision for the numeric "approx" renderings.
    #[arg(long, default_value_t = 128, global = true)]
    precision: u32,
    /// Load the catalog from this JSON file instead of the built-in one.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct Selector {
    /// Family identifier such as G29 or B4_34_DM.
    #[arg(long)]
    family: String,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    q: Option<u32>,
}

impl Selector {
    fn params(&self) -> Result<Params, Error> {
        match (self.p, self.q) {
            (None, None) => Ok(Params::None),
            (Some(p), None) => Ok(Params::P(p)),
            (Some(p), Some(q)) => Ok(Params::PQ(p, q)),
            (None, Some(_)) => Err(Error::Parse("--q requires --p".into())),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the generators, form and relations of one family instance.
    Instantiate {
        #[command(flatten)]
        sel: Selector,
    },
    /// Trace field, arithmeticity and cocompactness of one instance.
    Verdict {
        #[command(flatten)]
        sel: Selector,
        #[arg(long, default_value_t = 4)]
        word_len: usize,
    },
    /// Recompute every row of the verdict table and compare with the catalog.
    Table3 {
        #[arg(long, default_value_t = 4)]
        word_len: usize,
    },
    /// Check the documented presentation of one instance.
    Presentation {
        #[command(flatten)]
        sel: Selector,
    },
    /// kappa values of the strata and the cusp strata (kappa = 1).
    Strata {
        #[command(flatten)]
        sel: Selector,
    },
    /// Translation lattice of a cusp group.
    Cusp {
        #[command(flatten)]
        sel: Selector,
        #[arg(long, default_value_t = 6)]
        word_len: usize,
    },
    /// Compare two cusps by the ratio of vertical generator to horizontal norm.
    Incommensurable {
        /// Cusp id such as B4_34_DM or G29:3.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 6)]
        word_len: usize,
    },
}

/// Errors that end the run: usage or catalog problems (2), or mismatches (1).
enum Failure {
    Usage(String),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = Result<(), Failure>;

struct Ctx {
    cat: Catalog,
    output: Output,
    precision: u32,
}

impl Ctx {
    fn approx(&self, e: &CycElem) -> String {
        format!("{} (approx {})", e, format_approx(e, self.precision))
    }

    fn emit_json(&self, v: &Value) {
        out!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
    }

    fn require_not_csv(&self, cmd: &str) -> Run {
        if self.output == Output::Csv {
            return Err(Failure::Usage(format!("--output csv is only available for table3, not {cmd}")));
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Run {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot set up {j} worker threads: {e}")))?;
    }
    let cat = match &cli.catalog {
        Some(p) => Catalog::from_path(p)?,
        None => Catalog::builtin().clone(),
    };
    let ctx = Ctx { cat, output: cli.output, precision: cli.precision.max(32) };
    match &cli.command {
        Command::Instantiate { sel } => cmd_instantiate(&ctx, sel),
        Command::Verdict { sel, word_len } => cmd_verdict(&ctx, sel, *word_len),
        Command::Table3 { word_len } => cmd_table3(&ctx, *word_len),
        Command::Presentation { sel } => cmd_presentation(&ctx, sel),
        Command::Strata { sel } => cmd_strata(&ctx, sel),
        Command::Cusp { sel, word_len } => cmd_cusp(&ctx, sel, *word_len),
        Command::Incommensurable { a, b, word_len } => cmd_incommensurable(&ctx, a, b, *word_len),
    }
}

fn cmd_instantiate(ctx: &Ctx, sel: &Selector) -> Run {
    ctx.require_not_csv("instantiate")?;
    let params = sel.params()?;
    let selection = ctx.cat.instantiate_with_report(&sel.family, &params)?;
    let inst = &selection.chosen;
    if ctx.output == Output::Json {
        let mut v = inst.to_json();
        v["selection"] = json!(selection.reports);
        ctx.emit_json(&v);
        return Ok(());
    }
    out!("family:     {}", inst.family());
    out!("params:     {}", inst.params);
    out!("field:      Q(zeta_{}), embedding zeta -> exp(2 pi i k/n) with k = {}", inst.field.n(), inst.field.embedding_k());
    out!("branch:     {}", inst.branch);
    for (name, val) in &inst.branch_values {
        out!("  {name} = {}", ctx.approx(val));
    }
    out!("signature:  {}", inst.signature());
    if let Some(c) = inst.cocompact {
        out!("cocompact:  {c} (catalog)");
    }
    out!("candidates:");
    for r in &selection.reports {
        let mark = if r.passed { "selected" } else { "rejected" };
        out!("  {} {:?} {mark}: {}", r.branch, r.signature, r.reasons.join("; "));
    }
    out!("form H:");
    out!("{}", inst.form.mat());
    for (j, g) in inst.matrices().iter().enumerate() {
        out!("R{}:", j + 1);
        out!("{g}");
    }
    out!("relations:  {}", inst.relations.len());
    Ok(())
}

fn verdict_diffs(ctx: &Ctx, v: &arith::Verdict) -> Vec<String> {
    let mut diffs = Vec::new();
    let params = Params::from_list(&v.params).unwrap_or(Params::None);
    if let Some(row) = ctx.cat.table3_row(&v.family, &params) {
        if v.arithmetic != row.arithmetic {
            diffs.push(format!("arithmetic {} vs {}", v.arithmetic, row.arithmetic));
        }
        let st = v.trace_field.compare(&row.trace_field);
        if st != TraceFieldStatus::Matches {
            diffs.push(format!("trace field {} {} {}", v.trace_field.descriptor, st, row.trace_field));
        }
        if v.cocompact != row.cocompact {
            diffs.push(format!("cocompact {} vs {}", v.cocompact, row.cocompact));
        }
    }
    for w in v.witnesses.iter().filter(|w| !w.holds) {
        diffs.push(format!("witness {} fails", w.word));
    }
    diffs
}

fn cmd_verdict(ctx: &Ctx, sel: &Selector, word_len: usize) -> Run {
    ctx.require_not_csv("verdict")?;
    let inst = ctx.cat.instantiate(&sel.family, &sel.params()?)?;
    let v = arith::verdict(&ctx.cat, &inst, word_len)?;
    let diffs = verdict_diffs(ctx, &v);
    if ctx.output == Output::Json {
        let mut j = v.to_json();
        j["diff"] = json!(diffs);
        ctx.emit_json(&j);
    } else {
        out!("family:       {} {}", v.family, inst.params);
        out!("branch:       {}", v.branch);
        out!("signature:    {}", v.signature);
        out!("trace field:  {} (degree {})", v.trace_field.descriptor, v.trace_field.degree);
        out!("arithmetic:   {}", v.arithmetic);
        for (k, s) in &v.conjugate_signatures {
            out!("  sigma_{k}: {s}");
        }
        out!("cocompact:    {} ({})", v.cocompact, v.cocompact_source);
        for w in &v.witnesses {
            out!("witness {} {}: {} [{}]", w.kind, w.word, w.computed, if w.holds { "ok" } else { "FAIL" });
        }
        out!("diff:         {}", if diffs.is_empty() { "none".to_string() } else { diffs.join("; ") });
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

struct RowResult {
    family: String,
    params: Params,
    computed: Result<arith::Verdict, Error>,
    diffs: Vec<String>,
}

fn short(b: bool, yes: &str, no: &str) -> String {
    if b { yes } else { no }.to_string()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_table3(ctx: &Ctx, word_len: usize) -> Run {
    let rows: Vec<RowResult> = ctx
        .cat
        .table3
        .par_iter()
        .map(|row| {
            let params = Params::from_list(&row.params).unwrap_or(Params::None);
            let computed = ctx
                .cat
                .instantiate(&row.family, &params)
                .and_then(|inst| arith::verdict(&ctx.cat, &inst, word_len));
            let diffs = match &computed {
                Ok(v) => verdict_diffs(ctx, v),
                Err(e) => vec![e.to_string()],
            };
            RowResult { family: row.family.clone(), params, computed, diffs }
        })
        .collect();
    let all_ok = rows.iter().all(|r| r.diffs.is_empty());
    match ctx.output {
        Output::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .zip(&ctx.cat.table3)
                .map(|(r, row)| {
                    json!({
                        "family": r.family,
                        "params": row.params,
                        "expected": {
                            "cocompact": row.cocompact,
                            "arithmetic": row.arithmetic,
                            "trace_field": row.trace_field,
                        },
                        "computed": r.computed.as_ref().ok().map(|v| v.to_json()),
                        "match": r.diffs.is_empty(),
                        "diff": r.diffs,
                    })
                })
                .collect();
            ctx.emit_json(&json!({ "rows": arr, "all_match": all_ok }));
        }
        Output::Csv => {
            out!("family,params,cocompact,arithmetic,trace_field,match");
            for r in &rows {
                let (c, a, t) = match &r.computed {
                    Ok(v) => (short(v.cocompact, "C", "NC"), short(v.arithmetic, "A", "NA"), v.trace_field.descriptor.clone()),
                    Err(_) => ("?".into(), "?".into(), "?".into()),
                };
                let m = if r.diffs.is_empty() { "ok".to_string() } else { format!("DIFF: {}", r.diffs.join("; ")) };
                let fields = [r.family.clone(), r.params.to_string(), c, a, t, m];
                out!("{}", fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(","));
            }
        }
        Output::Text => {
            out!("{:<6} {:<8} {:<4} {:<4} {:<12} DIFF", "family", "params", "C?", "A?", "trace field");
            for r in &rows {
                let (c, a, t) = match &r.computed {
                    Ok(v) => (short(v.cocompact, "C", "NC"), short(v.arithmetic, "A", "NA"), v.trace_field.descriptor.clone()),
                    Err(_) => ("?".into(), "?".into(), "?".into()),
                };
                let d = if r.diffs.is_empty() { "-".to_string() } else { r.diffs.join("; ") };
                out!("{:<6} {:<8} {:<4} {:<4} {:<12} {d}", r.family, r.params.to_string(), c, a, t);
            }
            let bad = rows.iter().filter(|r| !r.diffs.is_empty()).count();
            out!("{} rows, {} mismatches", rows.len(), bad);
        }
    }
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn cmd_presentation(ctx: &Ctx, sel: &Selector) -> Run {
    ctx.require_not_csv("presentation")?;
    let inst = ctx.cat.instantiate(&sel.family, &sel.params()?)?;
    let report = inst.verify_presentation()?;
    if ctx.output == Output::Json {
        ctx.emit_json(&json!({
            "family": inst.family(),
            "params": inst.params.to_list(),
            "holds": report.all_hold(),
            "checks": report.checks,
        }));
    } else {
        out!("{} {}: {} relations", inst.family(), inst.params, report.checks.len());
        for c in &report.checks {
            out!("  [{}] {}", if c.holds { "ok" } else { "FAIL" }, c.relation);
        }
        match report.first_failure {
            None => out!("all relations hold"),
            Some(i) => out!("first failure: relation {}", i + 1),
        }
    }
    if report.all_hold() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn cmd_strata(ctx: &Ctx, sel: &Selector) -> Run {
    ctx.require_not_csv("strata")?;
    let table = ctx.cat.strata_table(&sel.family)?;
    let params = match sel.params()? {
        Params::None if sel.family.starts_with("B4") => Params::PQ(3, 4),
        p => p,
    };
    let orders = params.to_list();
    if orders.len() != table.orbit_params.len() {
        return Err(Failure::Usage(format!(
            "{} needs {} order parameter(s)",
            sel.family,
            table.orbit_params.len()
        )));
    }
    let cusps = ctx.cat.cusp_strata(&sel.family, &params)?;
    let rows: Vec<(String, String, String, bool)> = table
        .strata
        .iter()
        .map(|s| {
            let k = kappa(s, &orders);
            let sym = kappa_symbolic(s).render(&table.orbit_params);
            (s.name.clone(), sym, k.to_string(), cusps.contains(s))
        })
        .collect();
    if ctx.output == Output::Json {
        let arr: Vec<Value> = rows
            .iter()
            .map(|(n, sym, k, c)| json!({"stratum": n, "kappa_symbolic": sym, "kappa": k, "cusp": c}))
            .collect();
        ctx.emit_json(&json!({
            "family": table.family,
            "orders": orders,
            "strata": arr,
            "cusp_strata": cusps.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
        }));
    } else {
        out!("{} with orders {:?}", table.family, orders);
        for (n, sym, k, c) in &rows {
            out!("  {n:<8} kappa = {sym:<22} = {k}{}", if *c { "  (cusp)" } else { "" });
        }
    }
    Ok(())
}

fn cusp_id(sel: &Selector) -> Result<String, Error> {
    Ok(match sel.params()? {
        Params::None => sel.family.clone(),
        p => format!("{}:{}", sel.family, p.to_list().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
    })
}

/// Compares a profile with the values recorded in the catalog.
fn cusp_diffs(setup: &CuspSetup, prof: &CuspProfile) -> Result<Vec<String>, Error> {
    let mut diffs = Vec::new();
    if prof.linear_part_order != Some(setup.spec.linear_part_order) {
        diffs.push(format!(
            "linear part order {:?} vs {}",
            prof.linear_part_order, setup.spec.linear_part_order
        ));
    }
    if let Some(e) = &setup.spec.vertical_generator {
        let want = setup.eval(e)?;
        if prof.vertical_generator.as_ref() != Some(&want) {
            diffs.push(format!("vertical generator differs from {e}"));
        }
    }
    for (name, w, t) in setup.expected_translations()? {
        if prof.find_translation(&w, &t).is_none() {
            diffs.push(format!("translation {name} not found"));
        }
    }
    diffs.extend(prof.flags.iter().cloned());
    Ok(diffs)
}

fn cmd_cusp(ctx: &Ctx, sel: &Selector, word_len: usize) -> Run {
    ctx.require_not_csv("cusp")?;
    let id = cusp_id(sel)?;
    let setup = CuspSetup::from_catalog(&ctx.cat, &id)?;
    let prof = setup.profile(word_len)?;
    let diffs = cusp_diffs(&setup, &prof)?;
    if ctx.output == Output::Json {
        let mut v = prof.to_json();
        v["cusp"] = json!(id);
        v["stratum"] = json!(setup.spec.stratum);
        v["word_len"] = json!(word_len);
        v["elements_enumerated"] = json!(prof.elements_enumerated);
        v["diff"] = json!(diffs);
        ctx.emit_json(&v);
    } else {
        out!("cusp:                {id} (stratum {})", setup.spec.stratum);
        out!("elements enumerated: {} (word length <= {word_len})", prof.elements_enumerated);
        match prof.linear_part_order {
            Some(o) => out!("linear part order:   {o}"),
            None => out!("linear part order:   not finite within bound"),
        }
        match &prof.vertical_generator {
            Some(v) => out!("vertical generator:  {}", ctx.approx(v)),
            None => out!("vertical generator:  none found"),
        }
        out!("horizontal rank:     {}", prof.horizontal_rank);
        let norms: Vec<String> = prof.horizontal_norms.iter().map(|x| ctx.approx(x)).collect();
        out!("horizontal norms:    {}", norms.join(", "));
        out!("horizontal basis:");
        for w in &prof.horizontal_basis {
            out!("  ({})", w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
        }
        for (name, w, t) in setup.expected_translations()? {
            match prof.find_translation(&w, &t) {
                Some(r) => out!("{name}: found as {}", r.word),
                None => out!("{name}: NOT FOUND"),
            }
        }
        for f in &prof.flags {
            out!("flag: {f}");
        }
        out!("diff:                {}", if diffs.is_empty() { "none".to_string() } else { diffs.join("; ") });
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn cmd_incommensurable(ctx: &Ctx, a: &str, b: &str, word_len: usize) -> Run {
    ctx.require_not_csv("incommensurable")?;
    let (pa, pb) = rayon::join(
        || CuspSetup::from_catalog(&ctx.cat, a).and_then(|s| s.profile(word_len)),
        || CuspSetup::from_catalog(&ctx.cat, b).and_then(|s| s.profile(word_len)),
    );
    let (pa, pb) = (pa?, pb?);
    let ra = cusp::cusp_ratio(&pa)?;
    let rb = cusp::cusp_ratio(&pb)?;
    let verdict = cusp::incommensurable_cusps(&pa, &pb)?;
    let label = if verdict.is_incommensurable() { "INCOMMENSURABLE" } else { "NOT DISTINGUISHED" };
    if ctx.output == Output::Json {
        ctx.emit_json(&json!({
            "a": a,
            "b": b,
            "rho_a": ra.to_string(),
            "rho_b": rb.to_string(),
            "ratio": verdict.ratio().to_string(),
            "ratio_approx": format_approx(verdict.ratio(), ctx.precision),
            "verdict": label,
        }));
    } else {
        out!("rho({a}) = {}", ctx.approx(&ra));
        out!("rho({b}) = {}", ctx.approx(&rb));
        out!("{label}: witness ratio {}", ctx.approx(verdict.ratio()));
    }
    Ok(())
}
