//! Batch command-line surface: fulfillment-table generation, code
//! construction, exact verification, and channel simulation campaigns.
//!
//! Every command is deterministic given its full flag set; output files
//! echo the resolved configuration in metadata (comment lines for CSV, a
//! dedicated field for JSON) without disturbing the data sections.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::json;

use crate::channel::{
    bdd_bound, run_experiment, shannon_limit, ChannelParams, RESULTS_CSV_HEADER,
};
use crate::construct::{
    apply_masks, approx_rate, rate_menu, theorem2_build, CodeDescriptor, CssCandidate, MaskVector,
};
use crate::error::{Error, Result};
use crate::gf2::{self, default_girth_cap, expand, SparseBinaryMatrix};
use crate::model::ModelMatrix;
use crate::numtheory::is_prime;
use crate::perfume::{
    enumerate_fulfillments, find_perfume, fulfillment_csv, tight_bound_perfume, Perfume,
};

const TOOL: &str = concat!("fourcycle v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Parser)]
#[command(name = "fourcycle", version, about = "quasi-cyclic CSS code workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Alist,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate fulfillments per (order, P) as CSV.
    Tables {
        #[arg(long = "P-max", default_value_t = 200)]
        p_max: u64,
        #[arg(long = "ord-min", default_value_t = 3)]
        ord_min: u64,
        #[arg(long = "ord-max", default_value_t = 20)]
        ord_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Build the model-matrix pair of a perfume, verify it, and write the
    /// JSON descriptor (optionally with alist exports of the expansion).
    Build {
        /// Circulant size P of the perfume.
        p: u64,
        /// Fulfillment sigma.
        sigma: u64,
        /// Companion unit tau.
        tau: u64,
        /// Rows kept in the first matrix (default: the full order).
        #[arg(long = "J")]
        j: Option<usize>,
        /// Rows kept in the second matrix (default: the full order).
        #[arg(long = "K")]
        k: Option<usize>,
        /// Row mask for the first matrix, e.g. 11101 or 1,1,1,0,1.
        #[arg(long = "mask-c")]
        mask_c: Option<String>,
        /// Row mask for the second matrix.
        #[arg(long = "mask-d")]
        mask_d: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// `json` writes the descriptor; `alist` additionally writes
        /// `<out>.hc.alist` and `<out>.hd.alist`.
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Check a descriptor (one JSON file) or one or two model-matrix text
    /// files: conditions, girths, ranks, and the exact quantum rate.
    Verify {
        /// Descriptor JSON, a single model file, or a pair of model files.
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Monte Carlo decoding campaign over a grid of crossover
    /// probabilities; refuses descriptors that fail verification.
    Simulate {
        /// Descriptor JSON produced by `build`.
        descriptor: PathBuf,
        /// Comma-separated crossover probabilities.
        #[arg(long = "p-list", default_value = "0.001,0.005,0.01,0.02")]
        p_list: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long = "max-iter", default_value_t = 128)]
        max_iter: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Deterministic perfume for a target column count L (or a target
    /// rate k/n), with suggested row counts and the closed-form rate.
    Find {
        /// Even column count L.
        #[arg(long = "L")]
        l: Option<u64>,
        /// Rate numerator-denominator target: k of k/n.
        #[arg(long)]
        k: Option<u64>,
        /// Rate target: n of k/n.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs a parsed command, writing file outputs and returning the text
/// that goes to standard output.
pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Tables { p_max, ord_min, ord_max, out, format } => {
            cmd_tables(p_max, ord_min, ord_max, out.as_deref(), format)
        }
        Command::Build { p, sigma, tau, j, k, mask_c, mask_d, out, format } => cmd_build(
            p,
            sigma,
            tau,
            j,
            k,
            mask_c.as_deref(),
            mask_d.as_deref(),
            out.as_deref(),
            format,
        ),
        Command::Verify { inputs, out, format } => cmd_verify(&inputs, out.as_deref(), format),
        Command::Simulate { descriptor, p_list, trials, max_iter, seed, out, format } => {
            cmd_simulate(&descriptor, &p_list, trials, max_iter, seed, out.as_deref(), format)
        }
        Command::Find { l, k, n, out } => cmd_find(l, k, n, out.as_deref()),
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<String> {
    match out {
        Some(path) => {
            fs::write(path, content).map_err(|e| {
                Error::Io(std::io::Error::new(
                    e.kind(),
                    format!("{}: {e}", path.display()),
                ))
            })?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(content.to_string()),
    }
}

pub fn cmd_tables(
    p_max: u64,
    ord_min: u64,
    ord_max: u64,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<String> {
    let rows = enumerate_fulfillments(p_max, ord_min, ord_max)?;
    let config = format!("tables --P-max {p_max} --ord-min {ord_min} --ord-max {ord_max}");
    let content = match format {
        OutputFormat::Csv => {
            format!("# {TOOL} {config}\n{}", fulfillment_csv(&rows))
        }
        OutputFormat::Json => {
            let body = json!({
                "meta": {"tool": TOOL, "config": config},
                "rows": rows.iter().map(|r| json!({
                    "order": r.order, "P": r.p, "sigma": r.sigmas,
                })).collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&body).expect("json"))
        }
        OutputFormat::Alist => {
            return Err(Error::InvalidInput("tables supports csv or json".into()))
        }
    };
    emit(out, &content)
}

/// Builds (and fully checks) a candidate from CLI-level arguments.
pub fn build_candidate(
    p: u64,
    sigma: u64,
    tau: u64,
    j: Option<usize>,
    k: Option<usize>,
    mask_c: Option<&str>,
    mask_d: Option<&str>,
) -> Result<CssCandidate> {
    let pf = Perfume::new(p, sigma, tau)?;
    let ord = pf.order() as usize;
    match (mask_c, mask_d) {
        (None, None) => theorem2_build(&pf, j.unwrap_or(ord), k.unwrap_or(ord)),
        (c, d) => {
            if j.is_some() || k.is_some() {
                return Err(Error::InvalidInput(
                    "give either row counts (--J/--K) or masks (--mask-c/--mask-d), not both"
                        .into(),
                ));
            }
            let mc = c.map(MaskVector::parse).transpose()?.unwrap_or_else(|| MaskVector::ones(ord));
            let md = d.map(MaskVector::parse).transpose()?.unwrap_or_else(|| MaskVector::ones(ord));
            apply_masks(&theorem2_build(&pf, ord, ord)?, &mc, &md)
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_build(
    p: u64,
    sigma: u64,
    tau: u64,
    j: Option<usize>,
    k: Option<usize>,
    mask_c: Option<&str>,
    mask_d: Option<&str>,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<String> {
    let cand = build_candidate(p, sigma, tau, j, k, mask_c, mask_d)?;
    let report = verify_pair(cand.mc(), cand.md(), false)?;
    let mut desc = CodeDescriptor::from_candidate(&cand);
    desc.meta = Some(json!({
        "tool": TOOL,
        "config": format!(
            "build {p} {sigma} {tau} J={} K={} mask_C={} mask_D={}",
            cand.mc().num_rows(), cand.md().num_rows(), cand.mask_c(), cand.mask_d()
        ),
    }));
    desc.checks = Some(report.to_json());
    let json_text = format!("{}\n", serde_json::to_string_pretty(&desc).expect("json"));
    let mut output = emit(out, &json_text)?;
    if format == OutputFormat::Alist {
        let base = out.ok_or_else(|| {
            Error::InvalidInput("--format alist requires --out for the file stem".into())
        })?;
        for (suffix, m) in [("hc", cand.mc()), ("hd", cand.md())] {
            let path = base.with_extension(format!("{suffix}.alist"));
            fs::write(&path, gf2::to_alist(&expand(m)))?;
            let _ = writeln!(output, "wrote {}", path.display());
        }
    }
    Ok(output)
}

/// Everything `verify` reports about a matrix pair.
pub struct PairReport {
    pub regular_c: Option<(usize, usize)>,
    pub regular_d: Option<(usize, usize)>,
    pub twisted: bool,
    pub twisted_violations: Vec<(usize, usize)>,
    pub girth6_c: bool,
    pub girth6_d: bool,
    pub expanded_product_zero: bool,
    pub girth_c: gf2::Girth,
    pub girth_d: gf2::Girth,
    pub rank_c: usize,
    pub rank_d: usize,
    pub n: usize,
    /// Exact rate; absent when the pair is not a CSS pair.
    pub rate: Option<num_rational::Ratio<i64>>,
}

impl PairReport {
    pub fn all_conditions_hold(&self) -> bool {
        self.twisted && self.girth6_c && self.girth6_d && self.expanded_product_zero
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "regular_C": self.regular_c,
            "regular_D": self.regular_d,
            "twisted": self.twisted,
            "twisted_violations": self.twisted_violations,
            "girth6_C": self.girth6_c,
            "girth6_D": self.girth6_d,
            "expanded_product_zero": self.expanded_product_zero,
            "girth_C": self.girth_c.to_string(),
            "girth_D": self.girth_d.to_string(),
            "rank_C": self.rank_c,
            "rank_D": self.rank_d,
            "n": self.n,
            "rate": self.rate.map(|r| format!("{}/{}", r.numer(), r.denom())),
            "rate_f64": self.rate.and_then(|r| r.to_f64()),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let reg = |r: Option<(usize, usize)>| match r {
            Some((j, l)) => format!("regular ({j}, {l})"),
            None => "irregular (contains inf)".into(),
        };
        let _ = writeln!(s, "matrix C: {}", reg(self.regular_c));
        let _ = writeln!(s, "matrix D: {}", reg(self.regular_d));
        if self.twisted {
            let _ = writeln!(s, "twisted condition (model): PASS");
        } else {
            let _ = writeln!(
                s,
                "twisted condition (model): FAIL at row pairs {:?}",
                self.twisted_violations
            );
        }
        let _ = writeln!(s, "girth condition C (model): {}", pass(self.girth6_c));
        let _ = writeln!(s, "girth condition D (model): {}", pass(self.girth6_d));
        let _ = writeln!(
            s,
            "expanded product zero: {}",
            pass(self.expanded_product_zero)
        );
        let _ = writeln!(s, "expanded girth C: {}", self.girth_c);
        let _ = writeln!(s, "expanded girth D: {}", self.girth_d);
        let _ = writeln!(s, "rank C: {}", self.rank_c);
        let _ = writeln!(s, "rank D: {}", self.rank_d);
        let _ = writeln!(s, "code length n: {}", self.n);
        match self.rate {
            Some(r) => {
                let _ = writeln!(
                    s,
                    "quantum rate: {}/{} = {}",
                    r.numer(),
                    r.denom(),
                    r.to_f64().unwrap_or(f64::NAN)
                );
            }
            None => {
                let _ = writeln!(s, "quantum rate: undefined (not a CSS pair)");
            }
        }
        s
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Runs every check on a pair. With `exact_girth` the girth search runs
/// to its natural cap; otherwise it is capped at 8, enough to decide the
/// girth condition.
pub fn verify_pair(mc: &ModelMatrix, md: &ModelMatrix, exact_girth: bool) -> Result<PairReport> {
    let twisted_violations = mc.twisted_violations(md)?;
    let hc = expand(mc);
    let hd = expand(md);
    let expanded_product_zero = gf2::product_is_zero(&hc, &hd)?;
    let cap_c = if exact_girth { default_girth_cap(&hc) } else { 8 };
    let cap_d = if exact_girth { default_girth_cap(&hd) } else { 8 };
    let rank_c = gf2::rank(&hc);
    let rank_d = gf2::rank(&hd);
    let rate = if expanded_product_zero {
        Some(gf2::quantum_rate(&hc, &hd)?)
    } else {
        None
    };
    Ok(PairReport {
        regular_c: mc.regularity(),
        regular_d: md.regularity(),
        twisted: twisted_violations.is_empty(),
        twisted_violations,
        girth6_c: mc.check_girth6(),
        girth6_d: md.check_girth6(),
        expanded_product_zero,
        girth_c: gf2::tanner_girth(&hc, cap_c),
        girth_d: gf2::tanner_girth(&hd, cap_d),
        rank_c,
        rank_d,
        n: hc.n_cols(),
        rate,
    })
}

fn sniff_descriptor(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e == "json")
        || text.trim_start().starts_with('{')
}

/// Loads verify/simulate inputs: either a descriptor or explicit model
/// matrices.
pub fn load_matrices(inputs: &[PathBuf]) -> Result<(ModelMatrix, Option<ModelMatrix>)> {
    match inputs {
        [single] => {
            let text = fs::read_to_string(single)?;
            if sniff_descriptor(single, &text) {
                let desc: CodeDescriptor = serde_json::from_str(&text)
                    .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
                let (mc, md) = desc.matrices()?;
                Ok((mc, Some(md)))
            } else {
                Ok((ModelMatrix::parse_text(&text)?, None))
            }
        }
        [first, second] => {
            let mc = ModelMatrix::parse_text(&fs::read_to_string(first)?)?;
            let md = ModelMatrix::parse_text(&fs::read_to_string(second)?)?;
            Ok((mc, Some(md)))
        }
        _ => Err(Error::InvalidInput(
            "verify takes one descriptor/model file or two model files".into(),
        )),
    }
}

pub fn cmd_verify(inputs: &[PathBuf], out: Option<&Path>, format: OutputFormat) -> Result<String> {
    let (mc, md) = load_matrices(inputs)?;
    let content = match md {
        Some(md) => {
            let report = verify_pair(&mc, &md, true)?;
            match format {
                OutputFormat::Json => {
                    let mut v = report.to_json();
                    v["meta"] = json!({"tool": TOOL});
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
                }
                _ => report.to_text(),
            }
        }
        None => {
            let h = expand(&mc);
            let girth = gf2::tanner_girth(&h, default_girth_cap(&h));
            let rank = gf2::rank(&h);
            match format {
                OutputFormat::Json => {
                    let v = json!({
                        "meta": {"tool": TOOL},
                        "regular": mc.regularity(),
                        "girth6": mc.check_girth6(),
                        "girth": girth.to_string(),
                        "rank": rank,
                        "n": h.n_cols(),
                    });
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
                }
                _ => {
                    let mut s = String::new();
                    let _ = writeln!(
                        s,
                        "matrix: {}",
                        match mc.regularity() {
                            Some((j, l)) => format!("regular ({j}, {l})"),
                            None => "irregular (contains inf)".into(),
                        }
                    );
                    let _ = writeln!(s, "girth condition (model): {}", pass(mc.check_girth6()));
                    let _ = writeln!(s, "girth: {girth}");
                    let _ = writeln!(s, "rank: {rank}");
                    let _ = writeln!(s, "n: {}", h.n_cols());
                    s
                }
            }
        }
    };
    emit(out, &content)
}

fn parse_p_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad probability {s:?}")))
        })
        .collect()
}

pub fn cmd_simulate(
    descriptor: &Path,
    p_list: &str,
    trials: u64,
    max_iter: u32,
    seed: u64,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<String> {
    let ps = parse_p_list(p_list)?;
    if ps.is_empty() {
        return Err(Error::InvalidInput("empty probability list".into()));
    }
    let (mc, md) = load_matrices(&[descriptor.to_path_buf()])?;
    let md = md.ok_or_else(|| {
        Error::InvalidInput("simulate needs a descriptor with both matrices".into())
    })?;
    let report = verify_pair(&mc, &md, false)?;
    if !report.all_conditions_hold() {
        return Err(Error::InvalidInput(format!(
            "refusing to simulate: verification failed (twisted={}, girth6_C={}, girth6_D={}, product_zero={})",
            report.twisted, report.girth6_c, report.girth6_d, report.expanded_product_zero
        )));
    }
    let rate = report.rate.and_then(|r| r.to_f64()).expect("rate exists for a verified pair");
    let hc = expand(&mc);
    let hd = expand(&md);

    let config = format!(
        "simulate {} --p-list {} --trials {trials} --max-iter {max_iter} --seed {seed}",
        descriptor.display(),
        ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    );
    let mut summaries = Vec::with_capacity(ps.len());
    for &p in &ps {
        let params = ChannelParams::new(p)?;
        summaries.push(run_experiment(&hc, &hd, params, trials, max_iter, seed)?);
    }

    let content = match format {
        OutputFormat::Json => {
            let rows: Vec<_> = summaries
                .iter()
                .map(|s| {
                    json!({
                        "p": s.p, "n": s.n, "rate": rate, "trials": s.trials,
                        "failures": s.failures, "failure_rate": s.failure_rate,
                        "ci_halfwidth": s.ci_halfwidth, "mean_iters": s.mean_iters,
                        "seed": s.seed,
                        "shannon_limit": shannon_limit(s.p), "bdd_bound": bdd_bound(s.p),
                    })
                })
                .collect();
            let v = json!({"meta": {"tool": TOOL, "config": config}, "results": rows});
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
        _ => {
            let mut csv = format!("# {TOOL} {config}\n");
            let _ = writeln!(csv, "{RESULTS_CSV_HEADER},shannon_limit,bdd_bound");
            for s in &summaries {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    crate::channel::results_csv_row(s, rate),
                    shannon_limit(s.p),
                    bdd_bound(s.p)
                );
            }
            csv
        }
    };
    emit(out, &content)
}

pub fn cmd_find(
    l: Option<u64>,
    k: Option<u64>,
    n: Option<u64>,
    out: Option<&Path>,
) -> Result<String> {
    let (l, j_sugg, k_sugg, origin) = match (l, n, k) {
        (Some(l), None, None) => {
            if l == 0 || l % 2 != 0 {
                return Err(Error::InvalidInput(format!("L = {l} must be even and positive")));
            }
            (l, l / 2, l / 2, format!("find --L {l}"))
        }
        (None, Some(n), Some(k)) => {
            let (m, l, j, kk) = rate_menu(n, k)?;
            let _ = m;
            (l, j, kk, format!("find --n {n} --k {k}"))
        }
        _ => {
            return Err(Error::InvalidInput(
                "give either --L or both --n and --k".into(),
            ))
        }
    };
    let pf = if is_prime(l + 1) {
        tight_bound_perfume(l)?
    } else {
        find_perfume(l / 2)?
    };
    let rate = approx_rate(j_sugg, k_sugg, l, pf.modulus());
    let mut text = String::new();
    let _ = writeln!(
        text,
        "perfume: (P, sigma, tau) = ({}, {}, {}), ord(sigma) = {}",
        pf.modulus(),
        pf.sigma(),
        pf.tau(),
        pf.order()
    );
    let _ = writeln!(text, "columns L = {l}, suggested J = {j_sugg}, K = {k_sugg}");
    let _ = writeln!(
        text,
        "closed-form rate 1 - (JP+KP-J-K+2)/(LP) = {}/{} = {}",
        rate.numer(),
        rate.denom(),
        rate.to_f64().unwrap_or(f64::NAN)
    );
    if let Some(path) = out {
        let v = json!({
            "meta": {"tool": TOOL, "config": origin},
            "P": pf.modulus(), "sigma": pf.sigma(), "tau": pf.tau(),
            "order": pf.order(), "L": l, "J": j_sugg, "K": k_sugg,
            "approx_rate": rate.to_f64(),
        });
        fs::write(path, format!("{}\n", serde_json::to_string_pretty(&v).expect("json")))?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    Ok(text)
}
