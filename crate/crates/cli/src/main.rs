use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use bettilab::betti::{betti_poset_of, scarf_nodes};
use bettilab::lab::{self, reports_to_json_lines, CheckReport, LabError, Verdict};
use bettilab::monomial::IdealError;
use bettilab::stanley::{certificate_value, sdepth_with_cap, SearchBudget, Side, StanleyError};
use bettilab::{
    betti_table, hilbert_numerator, homological_summary, FieldSpec, LcmLattice, MonomialIdeal, NumeratorSource,
    RandomIdealParams,
};

#[derive(Parser)]
#[command(name = "bettilab", version, about = "Betti posets and Stanley depth of monomial ideals")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Coefficient field: `q` or `fp:<p>`.
    #[arg(long, global = true, default_value = "q")]
    field: FieldSpec,
    /// Node budget for the interval-partition and surjection searches.
    #[arg(long, global = true, default_value_t = 100_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

impl RunConfig {
    fn budget(&self) -> SearchBudget {
        SearchBudget { nodes: self.budget, ..SearchBudget::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Lcm-lattice with degrees and cover relations.
    Lcm { file: PathBuf },
    /// Multigraded Betti numbers of S/I.
    Betti { file: PathBuf },
    /// Betti poset with its canonical form.
    BettiPoset { file: PathBuf },
    /// Scarf multidegrees.
    Scarf { file: PathBuf },
    /// Numerator of the multigraded Hilbert series of S/I.
    Hilbert {
        file: PathBuf,
        #[arg(long, default_value = "betti")]
        source: String,
    },
    /// Stanley depth with an interval-partition certificate.
    Sdepth {
        file: PathBuf,
        #[arg(long, default_value = "quotient")]
        side: Side,
        /// Cap vector `g`, comma separated (defaults to the lcm exponents).
        #[arg(long, value_delimiter = ',')]
        cap: Option<Vec<u32>>,
    },
    /// Projective dimension and depth of S/I and I.
    Summary { file: PathBuf },
    /// Compare I with (I : v) for one or all variables.
    CheckOnestep {
        files: Vec<PathBuf>,
        #[arg(long)]
        var: Option<String>,
    },
    /// Spdim on Betti-isomorphism classes of a corpus.
    CheckConjecture { files: Vec<PathBuf> },
    /// sdepth against depth on each ideal.
    CheckBounds { files: Vec<PathBuf> },
    /// spdim against the lcm-lattice length on each ideal.
    CheckLength { files: Vec<PathBuf> },
    /// Removal of a meet-irreducible element of the lcm-lattice.
    CheckReduction {
        file: PathBuf,
        /// Lattice element as a monomial; all meet-irreducibles when omitted.
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        p: Option<usize>,
    },
    /// Equal spdim for a generic ideal and a Betti-equivalent image.
    CheckGeneric { file: PathBuf, other: PathBuf },
    /// Monotonicity along a join-preserving surjection of lcm-lattices.
    CheckSurjection { file: PathBuf, other: PathBuf },
    /// Betti poset along the chain from the lcm-lattice down to M(B).
    MbChain { files: Vec<PathBuf> },
    /// Write a seeded random corpus of .ideal files and a manifest.
    GenCorpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        gens: usize,
        #[arg(long, default_value_t = 1)]
        max_exp: u32,
        #[arg(long)]
        squarefree: bool,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

enum Output {
    Text(String),
    Reports(Vec<CheckReport>),
}

fn read_ideal(path: &Path) -> Result<MonomialIdeal> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    MonomialIdeal::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Files as given, with directories replaced by their `.ideal` files in
/// name order.
fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    if paths.is_empty() {
        bail!("no input files");
    }
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "ideal"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn read_all(paths: &[PathBuf]) -> Result<Vec<MonomialIdeal>> {
    expand(paths)?.iter().map(|p| read_ideal(p)).collect()
}

fn to_json(v: &Value) -> String {
    serde_json::to_string(v).expect("values serialize") + "\n"
}

fn lcm_output(ideal: &MonomialIdeal, cfg: &RunConfig) -> Result<String> {
    let lcm = LcmLattice::new(ideal)?;
    let l = lcm.lattice();
    let covers = l.poset().cover_relation();
    if cfg.json {
        let nodes: Vec<Value> = (0..lcm.len())
            .map(|x| json!({ "id": x, "deg": lcm.degree(x).0, "monomial": ideal.format_monomial(lcm.degree(x)) }))
            .collect();
        return Ok(to_json(&json!({ "nodes": nodes, "covers": covers, "length": l.length() })));
    }
    let mut s = format!("{} elements, length {}\n", lcm.len(), l.length());
    for x in 0..lcm.len() {
        let ups: Vec<String> = l.poset().upper_covers(x).iter().map(|y| y.to_string()).collect();
        s += &format!("{x:>4}  {:<24} < {}\n", ideal.format_monomial(lcm.degree(x)), ups.join(" "));
    }
    Ok(s)
}

fn betti_output(ideal: &MonomialIdeal, cfg: &RunConfig) -> Result<String> {
    let table = betti_table(ideal, cfg.field)?;
    if cfg.json {
        return Ok(table.to_json() + "\n");
    }
    let mut s = format!("field {}\n", cfg.field);
    for ((i, m), b) in &table.entries {
        s += &format!("beta_{i},{} = {b}\n", ideal.format_monomial(m));
    }
    for i in 1..=table.max_degree() {
        s += &format!("total beta_{i} = {}\n", table.total(i));
    }
    Ok(s)
}

fn poset_output(ideal: &MonomialIdeal, cfg: &RunConfig, scarf: bool) -> Result<String> {
    let lcm = LcmLattice::new(ideal)?;
    let bp = betti_poset_of(&lcm, cfg.field);
    let (nodes, poset) = if scarf {
        let nodes = scarf_nodes(lcm.lattice());
        let poset = lcm.lattice().poset().induced(&nodes);
        (nodes, poset)
    } else {
        (bp.nodes.clone(), bp.poset.clone())
    };
    let names: Vec<String> = nodes.iter().map(|&x| ideal.format_monomial(lcm.degree(x))).collect();
    let covers: Vec<(String, String)> =
        poset.cover_relation().into_iter().map(|(a, b)| (names[a].clone(), names[b].clone())).collect();
    let form = hex::encode(bettilab::canonical_form(&poset));
    if cfg.json {
        let degs: Vec<&Vec<u32>> = nodes.iter().map(|&x| &lcm.degree(x).0).collect();
        return Ok(to_json(&json!({
            "elements": names, "degrees": degs, "covers": covers, "canonical_form": form,
            "length": poset.length().unwrap_or(0),
        })));
    }
    let mut s = format!("{} elements\n", names.len());
    for n in &names {
        s += &format!("  {n}\n");
    }
    for (a, b) in &covers {
        s += &format!("  {a} < {b}\n");
    }
    s += &format!("canonical form {form}\n");
    Ok(s)
}

fn hilbert_output(ideal: &MonomialIdeal, source: &str, cfg: &RunConfig) -> Result<String> {
    let source = match source {
        "betti" => NumeratorSource::Betti,
        "taylor" => NumeratorSource::Taylor,
        other => bail!("unknown source `{other}` (expected betti or taylor)"),
    };
    let poly = hilbert_numerator(ideal, source, cfg.field)?;
    if cfg.json {
        let terms: Vec<Value> = poly.iter().map(|(m, c)| json!({ "deg": m.0, "coeff": c })).collect();
        return Ok(to_json(&json!({ "terms": terms })));
    }
    Ok(poly.iter().map(|(m, c)| format!("{c:+} {}\n", ideal.format_monomial(m))).collect())
}

fn sdepth_output(ideal: &MonomialIdeal, side: Side, cap: Option<&[u32]>, cfg: &RunConfig) -> Result<String> {
    let r = sdepth_with_cap(ideal, side, cap, &cfg.budget())?;
    if cfg.json {
        return Ok(to_json(&json!({
            "side": side, "nvars": r.poset.nvars(), "value": r.value, "spdim": r.spdim(),
            "points": r.poset.len(), "nodes": r.nodes,
            "certificate": certificate_value(&r.poset, &r.certificate),
        })));
    }
    let mut s = format!(
        "sdepth ({side}) = {}, spdim = {}, {} points, {} intervals\n",
        r.value,
        r.spdim(),
        r.poset.len(),
        r.certificate.intervals.len()
    );
    for (a, b) in &r.certificate.intervals {
        s += &format!("  [{a:?}, {b:?}]\n");
    }
    Ok(s)
}

fn summary_output(ideal: &MonomialIdeal, cfg: &RunConfig) -> Result<String> {
    let s = homological_summary(ideal, cfg.field)?;
    if cfg.json {
        return Ok(to_json(&serde_json::to_value(s)?));
    }
    Ok(format!(
        "pdim S/I = {}\npdim I = {}\ndepth S/I = {}\ndepth I = {}\n",
        s.pdim_quotient, s.pdim_ideal, s.depth_quotient, s.depth_ideal
    ))
}

fn onestep_reports(ideals: &[MonomialIdeal], var: Option<&str>, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut jobs = Vec::new();
    for (k, i) in ideals.iter().enumerate() {
        match var {
            Some(name) => jobs.push((k, i.variable_index(name)?)),
            None => jobs.extend((0..i.nvars()).map(|v| (k, v))),
        }
    }
    let budget = cfg.budget();
    jobs.par_iter()
        .map(|&(k, v)| lab::check_onestep(&ideals[k], v, cfg.field, &budget).map_err(Into::into))
        .collect()
}

fn per_ideal<F>(ideals: &[MonomialIdeal], f: F) -> Result<Vec<CheckReport>>
where
    F: Fn(&MonomialIdeal) -> Result<CheckReport, LabError> + Sync,
{
    ideals.par_iter().map(|i| f(i).map_err(Into::into)).collect()
}

fn reduction_reports(
    ideal: &MonomialIdeal,
    element: Option<&str>,
    p: Option<usize>,
    cfg: &RunConfig,
) -> Result<Vec<CheckReport>> {
    let lcm = LcmLattice::new(ideal)?;
    let nodes = match element {
        Some(text) => {
            let m = ideal.parse_monomial(text)?;
            vec![lcm.node_of(&m).ok_or_else(|| anyhow!("{text} is not an element of the lcm-lattice"))?]
        }
        None => lcm.lattice().meet_irreducibles(),
    };
    let budget = cfg.budget();
    nodes
        .par_iter()
        .map(|&a| lab::reduction_lemma_check(ideal, a, p, cfg.field, &budget).map_err(Into::into))
        .collect()
}

fn gen_corpus(out: &Path, params: RandomIdealParams, count: usize, seed: u64) -> Result<String> {
    let corpus = MonomialIdeal::random_corpus(&params, count, seed)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut files = Vec::new();
    for (k, ideal) in corpus.iter().enumerate() {
        let name = format!("ideal_{k:04}.ideal");
        fs::write(out.join(&name), ideal.to_text()).with_context(|| format!("writing {name}"))?;
        files.push(json!({ "file": name, "fingerprint": ideal.fingerprint() }));
    }
    let manifest = json!({ "params": params, "seed": seed, "count": count, "files": files });
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(format!("wrote {count} ideals to {}\n", out.display()))
}

fn render_reports(reports: &[CheckReport], json: bool) -> String {
    if json {
        return reports_to_json_lines(reports);
    }
    let mut sorted: Vec<&CheckReport> = reports.iter().collect();
    sorted.sort_by_key(|r| r.sort_key());
    sorted
        .iter()
        .map(|r| {
            let fp = r.inputs.first().map_or("", |i| i.fingerprint.as_str());
            let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let qs: Vec<String> = r.quantities.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!(
                "{:<24} {:<16} {:<15} {:<12} {}  [{}]\n",
                r.check,
                fp,
                r.verdict.to_string(),
                params.join(","),
                r.reason,
                qs.join(" ")
            )
        })
        .collect()
}

fn run(cli: &Cli) -> Result<Output> {
    let cfg = &cli.run;
    let budget = cfg.budget();
    Ok(match &cli.command {
        Command::Lcm { file } => Output::Text(lcm_output(&read_ideal(file)?, cfg)?),
        Command::Betti { file } => Output::Text(betti_output(&read_ideal(file)?, cfg)?),
        Command::BettiPoset { file } => Output::Text(poset_output(&read_ideal(file)?, cfg, false)?),
        Command::Scarf { file } => Output::Text(poset_output(&read_ideal(file)?, cfg, true)?),
        Command::Hilbert { file, source } => Output::Text(hilbert_output(&read_ideal(file)?, source, cfg)?),
        Command::Sdepth { file, side, cap } => {
            Output::Text(sdepth_output(&read_ideal(file)?, *side, cap.as_deref(), cfg)?)
        }
        Command::Summary { file } => Output::Text(summary_output(&read_ideal(file)?, cfg)?),
        Command::CheckOnestep { files, var } => Output::Reports(onestep_reports(&read_all(files)?, var.as_deref(), cfg)?),
        Command::CheckConjecture { files } => {
            Output::Reports(vec![lab::conjecture_scan(&read_all(files)?, cfg.field, &budget)])
        }
        Command::CheckBounds { files } => Output::Reports(per_ideal(&read_all(files)?, |i| {
            lab::stanley_bounds_check(i, cfg.field, &budget)
        })?),
        Command::CheckLength { files } => {
            Output::Reports(per_ideal(&read_all(files)?, |i| lab::length_bounds_check(i, &budget))?)
        }
        Command::CheckReduction { file, element, p } => {
            Output::Reports(reduction_reports(&read_ideal(file)?, element.as_deref(), *p, cfg)?)
        }
        Command::CheckGeneric { file, other } => Output::Reports(vec![lab::generic_weak_check(
            &read_ideal(file)?,
            &read_ideal(other)?,
            cfg.field,
            &budget,
        )?]),
        Command::CheckSurjection { file, other } => Output::Reports(vec![lab::surjection_monotonicity_check(
            &read_ideal(file)?,
            &read_ideal(other)?,
            cfg.field,
            &budget,
        )?]),
        Command::MbChain { files } => {
            Output::Reports(per_ideal(&read_all(files)?, |i| lab::mb_chain_check(i, cfg.field))?)
        }
        Command::GenCorpus { out, vars, gens, max_exp, squarefree, count } => {
            let params = RandomIdealParams { n_vars: *vars, n_gens: *gens, max_exp: *max_exp, squarefree: *squarefree };
            Output::Text(gen_corpus(out, params, *count, cfg.seed)?)
        }
    })
}

fn is_budget_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(c.downcast_ref::<LabError>(), Some(LabError::BudgetExceeded(_)))
            || matches!(
                c.downcast_ref::<StanleyError>(),
                Some(StanleyError::BudgetExceeded(_) | StanleyError::TooLarge(..))
            )
            || matches!(c.downcast_ref::<IdealError>(), Some(IdealError::TooLarge(_)))
    })
}

fn any_violated(reports: &[CheckReport]) -> bool {
    reports.iter().any(|r| r.verdict == Verdict::Violated)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (text, violated) = match run(&cli) {
        Ok(Output::Text(t)) => (t, false),
        Ok(Output::Reports(r)) => {
            (render_reports(&r, cli.run.json), any_violated(&r))
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if is_budget_error(&e) { 2 } else { 1 });
        }
    };
    if let Err(e) = emit(&cli.run, &text) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(if violated { 3 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(verdict: Verdict) -> CheckReport {
        let mut r = CheckReport::from_json_line(
            r#"{"schema":1,"check":"length-bounds","inputs":[],"field":"q","quantities":{},"verdict":"holds","reason":""}"#,
        )
        .unwrap();
        r.verdict = verdict;
        r
    }

    #[test]
    fn violated_iff_exit_three() {
        assert!(!any_violated(&[]));
        assert!(!any_violated(&[report(Verdict::Holds), report(Verdict::NotApplicable)]));
        assert!(any_violated(&[report(Verdict::Holds), report(Verdict::Violated)]));
    }

    #[test]
    fn rendering() {
        assert_eq!(render_reports(&[], true), "");
        assert_eq!(render_reports(&[report(Verdict::Holds)], true).lines().count(), 1);
        assert_eq!(render_reports(&[report(Verdict::Holds)], false).lines().count(), 1);
    }
}
