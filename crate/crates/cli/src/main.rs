//! sparsekit: norms, sparse domination, compactness indices, decay-rate
//! fits, and sequence-space checks for grid functions on the unit cube.
//!
//! Exit codes: 0 computed, 2 parameter refusal, 3 enumeration-budget
//! refusal, 1 malformed input / IO failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sparsekit_core::corpus::{corpus_generate, mixed_corpus, smooth_corpus, Generator};
use sparsekit_core::error::Error;
use sparsekit_core::grid::{build_table, read_spgf_file, write_spgf_file, GridFunction};
use sparsekit_core::harness::{
    extract_decay, interp_inequality_check, sparse_index, table1_experiment, FunctionFamily,
    Table1Space,
};
use sparsekit_core::maximal::sobolev_negative_norm;
use sparsekit_core::norms::{crmt_norm, lorentz_norms, lp_norm, morrey_norm, rmt_norm};
use sparsekit_core::numeric::CertInterval;
use sparsekit_core::seq::{
    example_9_1, example_9_2, extrapolation_norm, k_functional, tpsi_seq, vpsi_seq, Decay,
};
use sparsekit_core::sparse::{
    check_domination, sparse_dominate, sr_certified, sr_norm_bruteforce, sr_norm_family,
    sr_norm_maximal, SRParams, SparseFamily,
};
use sparsekit_core::spectral::lp_blocks;
use std::path::{Path, PathBuf};

const REPORT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "sparsekit", version, about = "sparse dyadic function-space toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a norm of a grid function
    Norm(NormArgs),
    /// Run the constructive sparse domination and export the family
    Dominate(DominateArgs),
    /// Certified sparse-index profile s_N
    Indices(IndicesArgs),
    /// Decay-rate experiment for a classical-space row
    Table1(Table1Args),
    /// Extract the index decay of a family of grid functions
    Decay(DecayArgs),
    /// Sequence-space examples and K-functional evaluations
    Seq(SeqArgs),
    /// Interpolation-inequality ratio table
    Interp(InterpArgs),
    /// Generate grid functions (SPGF) from the seeded corpus
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Lp,
    Morrey,
    Rmt,
    Crmt,
    Sr,
    Lorentz,
    Sobolev,
    Vpsi,
    Tpsi,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Maximal,
    Family,
    Bruteforce,
}

#[derive(Args)]
struct NormArgs {
    #[arg(long, value_enum)]
    space: SpaceArg,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    family: Option<PathBuf>,
    /// decay table CSV for the vpsi/tpsi spaces (defaults derived from alpha)
    #[arg(long)]
    psi: Option<PathBuf>,
    /// padding factor for whole-space approximations
    #[arg(long, default_value_t = 3)]
    pad: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DominateArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// verify sparseness and the pointwise domination inequality
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct IndicesArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table1SpaceArg {
    Lp,
    Morrey,
    Rmt,
}

#[derive(Args)]
struct Table1Args {
    #[arg(long, value_enum)]
    space: Table1SpaceArg,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    jmin: usize,
    #[arg(long)]
    jmax: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecayArgs {
    /// directory of .spgf files (sorted by name) forming the family
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SeqArgs {
    /// one of: 9.1, 9.2, kfunc, extrapolate
    #[arg(long)]
    example: String,
    /// decay exponent for the (1+t)^{-beta} table
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 64)]
    nmax: usize,
    /// window width for example 9.2
    #[arg(long, default_value_t = 1024)]
    width: usize,
    /// comma-separated scale data for kfunc/extrapolate
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    t: Option<f64>,
    /// weight exponent s of the second space
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InterpArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    psi: PathBuf,
    /// finest dyadic scale 2^{-M} on the r-grid (defaults to the grid depth)
    #[arg(long)]
    mmax: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Constant,
    Atom,
    Mixed,
    MollifiedFamily,
    Smooth,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    preset: PresetArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    j: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// member count for family presets
    #[arg(long, default_value_t = 8)]
    count: usize,
    /// output file (single presets) or directory (family presets)
    #[arg(long)]
    out: PathBuf,
}

/// Common report envelope; every JSON report carries these fields.
#[derive(Serialize)]
struct Report<T: Serialize> {
    version: u32,
    command: String,
    seed: Option<u64>,
    truncation: Option<String>,
    certified: Option<CertInterval>,
    #[serde(flatten)]
    payload: T,
}

fn write_report<T: Serialize>(path: &Path, report: &Report<T>) -> sparsekit_core::Result<()> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::input(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn run() -> sparsekit_core::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Norm(args) => cmd_norm(args),
        Command::Dominate(args) => cmd_dominate(args),
        Command::Indices(args) => cmd_indices(args),
        Command::Table1(args) => cmd_table1(args),
        Command::Decay(args) => cmd_decay(args),
        Command::Seq(args) => cmd_seq(args),
        Command::Interp(args) => cmd_interp(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parameter(_) => 2,
                Error::Budget(_) => 3,
                _ => 1,
            };
            std::process::exit(code);
        }
    }
}

#[derive(Serialize)]
struct NormPayload {
    space: String,
    p: Option<f64>,
    q: Option<f64>,
    alpha: f64,
    lambda: Option<f64>,
    value: Option<f64>,
    detail: serde_json::Value,
}

fn require(opt: Option<f64>, name: &str) -> sparsekit_core::Result<f64> {
    opt.ok_or_else(|| Error::parameter(format!("--{name} is required for this space")))
}

fn cmd_norm(args: NormArgs) -> sparsekit_core::Result<()> {
    let f = read_spgf_file(&args.input)?;
    let table = build_table(&f);
    let mut certified: Option<CertInterval> = None;
    let mut truncation: Option<String> = None;
    let payload = match args.space {
        SpaceArg::Lp => {
            let p = require(args.p, "p")?;
            let v = lp_norm(&f, p)?;
            NormPayload {
                space: "lp".into(),
                p: Some(p),
                q: None,
                alpha: args.alpha,
                lambda: None,
                value: Some(v),
                detail: serde_json::Value::Null,
            }
        }
        SpaceArg::Morrey => {
            let p = require(args.p, "p")?;
            let r = morrey_norm(&f, &table, p, args.alpha)?;
            NormPayload {
                space: "morrey".into(),
                p: Some(p),
                q: None,
                alpha: args.alpha,
                lambda: None,
                value: Some(r.value),
                detail: serde_json::to_value(&r).unwrap(),
            }
        }
        SpaceArg::Rmt => {
            let p = require(args.p, "p")?;
            let q = require(args.q, "q")?;
            let r = rmt_norm(&f, &table, p, q, args.alpha)?;
            NormPayload {
                space: "rmt".into(),
                p: Some(p),
                q: Some(q),
                alpha: args.alpha,
                lambda: None,
                value: Some(r.value),
                detail: serde_json::to_value(&r).unwrap(),
            }
        }
        SpaceArg::Crmt => {
            let p = require(args.p, "p")?;
            let q = require(args.q, "q")?;
            let r = crmt_norm(&f, &table, p, q, args.alpha)?;
            NormPayload {
                space: "crmt".into(),
                p: Some(p),
                q: Some(q),
                alpha: args.alpha,
                lambda: None,
                value: Some(r.value),
                detail: serde_json::to_value(&r).unwrap(),
            }
        }
        SpaceArg::Sr => {
            let p = require(args.p, "p")?;
            let q = require(args.q, "q")?;
            let params = SRParams::new(p, q, args.alpha)?;
            let (value, detail) = match args.method {
                None => {
                    let rep = sr_certified(&f, &table, &params)?;
                    certified = Some(rep.interval);
                    (rep.interval.midpoint(), serde_json::to_value(&rep).unwrap())
                }
                Some(MethodArg::Maximal) => {
                    let r = sr_norm_maximal(&f, &table, &params)?;
                    certified = Some(CertInterval::new(0.0, r.upper));
                    (r.value, serde_json::to_value(r).unwrap())
                }
                Some(MethodArg::Family) => {
                    let path = args
                        .family
                        .as_ref()
                        .ok_or_else(|| Error::parameter("--family is required with --method family"))?;
                    let text = std::fs::read_to_string(path)?;
                    let fam = SparseFamily::from_csv(&text, f.dim())?;
                    let v = sr_norm_family(&f, &table, &fam, &params)?;
                    certified = Some(CertInterval::new(v, f64::INFINITY));
                    (v, serde_json::json!({ "family_size": fam.len() }))
                }
                Some(MethodArg::Bruteforce) => {
                    let v = sr_norm_bruteforce(&f, &table, &params)?;
                    certified = Some(CertInterval::exact(v));
                    (v, serde_json::json!({ "exact": true }))
                }
            };
            NormPayload {
                space: "sr".into(),
                p: Some(p),
                q: Some(q),
                alpha: args.alpha,
                lambda: None,
                value: Some(value),
                detail,
            }
        }
        SpaceArg::Lorentz => {
            let r = lorentz_norms(&f);
            NormPayload {
                space: "lorentz".into(),
                p: None,
                q: None,
                alpha: args.alpha,
                lambda: None,
                value: Some(r.l12),
                detail: serde_json::to_value(r).unwrap(),
            }
        }
        SpaceArg::Sobolev => {
            let lambda = require(args.lambda, "lambda")?;
            let q = require(args.q, "q")?;
            let r = sobolev_negative_norm(&f, lambda, q, args.pad)?;
            truncation = Some(format!("padding factor {}", args.pad));
            NormPayload {
                space: "sobolev".into(),
                p: None,
                q: Some(q),
                alpha: args.alpha,
                lambda: Some(lambda),
                value: Some(r.value),
                detail: serde_json::to_value(&r).unwrap(),
            }
        }
        SpaceArg::Vpsi | SpaceArg::Tpsi => {
            let psi = match &args.psi {
                Some(path) => Decay::from_csv(&std::fs::read_to_string(path)?)?,
                None => {
                    // the special scale decays tied to alpha
                    let beta = match args.space {
                        SpaceArg::Vpsi => (args.alpha - 1.0) / 2.0,
                        _ => args.alpha - 0.5,
                    };
                    if beta <= 0.0 {
                        return Err(Error::parameter(
                            "derived decay needs alpha > 1 (vpsi) or alpha > 1/2 (tpsi); pass --psi otherwise",
                        ));
                    }
                    Decay::power(beta, 64)?
                }
            };
            let lp = lp_blocks(&f, 2)?;
            truncation = Some(format!("block sup truncated at j_max = {}", lp.j_max));
            if matches!(args.space, SpaceArg::Vpsi) {
                let v = lp.vpsi_norm(&psi);
                NormPayload {
                    space: "vpsi".into(),
                    p: None,
                    q: None,
                    alpha: args.alpha,
                    lambda: None,
                    value: Some(v),
                    detail: serde_json::json!({ "profile": lp.profile }),
                }
            } else {
                let r = lp.tpsi_norm(&psi);
                NormPayload {
                    space: "tpsi".into(),
                    p: None,
                    q: None,
                    alpha: args.alpha,
                    lambda: None,
                    value: Some(r.blockwise),
                    detail: serde_json::to_value(r).unwrap(),
                }
            }
        }
    };
    write_report(
        &args.out,
        &Report {
            version: REPORT_VERSION,
            command: "norm".into(),
            seed: None,
            truncation,
            certified,
            payload,
        },
    )
}

fn cmd_dominate(args: DominateArgs) -> sparsekit_core::Result<()> {
    let f = read_spgf_file(&args.input)?;
    let table = build_table(&f);
    let params = SRParams::monotone(args.p, args.q, args.alpha)?;
    let fam = sparse_dominate(&f, &table, &params);
    std::fs::write(&args.out, fam.to_csv(f.dim()))?;
    if args.check {
        let verify = sparsekit_core::sparse::verify_sparse(&fam, f.dim());
        let dom = check_domination(&f, &table, &fam, &params)?;
        let report = Report {
            version: REPORT_VERSION,
            command: "dominate".into(),
            seed: None,
            truncation: None,
            certified: None,
            payload: serde_json::json!({
                "family_size": fam.len(),
                "sparse_ok": verify.ok,
                "worst_ratio": verify.worst_ratio,
                "max_ratio": dom.max_ratio,
                "constant": dom.constant,
            }),
        };
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    }
    Ok(())
}

fn cmd_indices(args: IndicesArgs) -> sparsekit_core::Result<()> {
    let f = read_spgf_file(&args.input)?;
    let table = build_table(&f);
    let top = args.nmax.unwrap_or(f.depth() + 1);
    let mut csv = String::from("N,lower,upper\n");
    for n_index in 1..=top {
        let s = sparse_index(&f, &table, n_index)?;
        csv.push_str(&format!("{n_index},{},{}\n", s.interval.lower, s.interval.upper));
    }
    std::fs::write(&args.out, csv)?;
    Ok(())
}

fn cmd_table1(args: Table1Args) -> sparsekit_core::Result<()> {
    let space = match args.space {
        Table1SpaceArg::Lp => Table1Space::Lp,
        Table1SpaceArg::Morrey => Table1Space::Morrey,
        Table1SpaceArg::Rmt => Table1Space::Rmt,
    };
    if args.jmin > args.jmax {
        return Err(Error::parameter("--jmin must be <= --jmax"));
    }
    let fit = table1_experiment(space, args.p, args.alpha, args.n, args.jmin..=args.jmax, args.seed)?;
    write_report(
        &args.out,
        &Report {
            version: REPORT_VERSION,
            command: "table1".into(),
            seed: Some(args.seed),
            truncation: Some(format!("levels beyond J summed in closed form; fit on middle third of N")),
            certified: None,
            payload: fit,
        },
    )
}

fn cmd_decay(args: DecayArgs) -> sparsekit_core::Result<()> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.family)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "spgf").unwrap_or(false))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::input(format!("no .spgf files in {}", args.family.display())));
    }
    let first = read_spgf_file(&paths[0])?;
    let mut fam = FunctionFamily::new(first.dim(), first.depth(), "directory family");
    fam.push(paths[0].display().to_string(), first);
    for p in &paths[1..] {
        fam.push(p.display().to_string(), read_spgf_file(p)?);
    }
    let decay = extract_decay(&fam)?;
    std::fs::write(&args.out, decay.to_csv())?;
    Ok(())
}

fn parse_list(s: &str) -> sparsekit_core::Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::parameter(format!("bad number {t}"))))
        .collect()
}

fn cmd_seq(args: SeqArgs) -> sparsekit_core::Result<()> {
    let psi = Decay::shifted_power(args.beta, args.nmax)?;
    let payload = match args.example.as_str() {
        "9.1" => {
            let lambda = example_9_1(&psi);
            let t_norm = tpsi_seq(&lambda, &psi, 2);
            let ratio_at = |n: usize| -> f64 {
                let tail: f64 = (n..=lambda.j_max())
                    .map(|k| (-(2.0 * k as f64)).exp2() * lambda.scales[k][0])
                    .sum();
                tail / (psi.at(n) * psi.at(n))
            };
            serde_json::json!({
                "example": "9.1",
                "beta": args.beta,
                "tpsi": t_norm,
                "vpsi": vpsi_seq(&lambda, &psi),
                "vpsi_ratio_n4": ratio_at(4),
                "vpsi_ratio_n32": ratio_at(32),
            })
        }
        "9.2" => {
            let lambda = example_9_2(args.width);
            serde_json::json!({
                "example": "9.2",
                "width": args.width,
                "vpsi": vpsi_seq(&lambda, &psi),
                "tpsi": tpsi_seq(&lambda, &psi, 2),
            })
        }
        "kfunc" => {
            let a = parse_list(
                args.a.as_deref().ok_or_else(|| Error::parameter("--a is required for kfunc"))?,
            )?;
            let t = args.t.ok_or_else(|| Error::parameter("--t is required for kfunc"))?;
            let w0: Vec<f64> = (0..a.len()).map(|j| (-(2.0 * j as f64)).exp2()).collect();
            let w1: Vec<f64> = (0..a.len()).map(|j| (args.s * j as f64).exp2()).collect();
            serde_json::json!({
                "example": "kfunc",
                "t": t,
                "s": args.s,
                "value": k_functional(t, &a, &w0, &w1)?,
            })
        }
        "extrapolate" => {
            let a = parse_list(
                args.a
                    .as_deref()
                    .ok_or_else(|| Error::parameter("--a is required for extrapolate"))?,
            )?;
            let ext = extrapolation_norm(&a, &psi, args.s)?;
            let v = vpsi_seq(&BlockSequence_from_scalar(&a), &psi);
            serde_json::json!({
                "example": "extrapolate",
                "beta": args.beta,
                "s": args.s,
                "extrapolation": ext,
                "vpsi": v,
                "ratio": if v > 0.0 { ext / v } else { 0.0 },
            })
        }
        other => {
            return Err(Error::parameter(format!(
                "unknown example {other}; use 9.1, 9.2, kfunc, or extrapolate"
            )))
        }
    };
    write_report(
        &args.out,
        &Report {
            version: REPORT_VERSION,
            command: "seq".into(),
            seed: None,
            truncation: Some(format!("decay table truncated at N_max = {}", args.nmax)),
            certified: None,
            payload,
        },
    )
}

#[allow(non_snake_case)]
fn BlockSequence_from_scalar(a: &[f64]) -> sparsekit_core::seq::BlockSequence {
    sparsekit_core::seq::BlockSequence::scalar(a.to_vec())
}

fn cmd_interp(args: InterpArgs) -> sparsekit_core::Result<()> {
    let f = read_spgf_file(&args.input)?;
    let table = build_table(&f);
    let psi = Decay::from_csv(&std::fs::read_to_string(&args.psi)?)?;
    let m_max = args.mmax.unwrap_or(f.depth());
    let r = interp_inequality_check(&f, &table, &psi, m_max)?;
    let mut csv = String::from("m,r,lhs,rhs,ratio\n");
    for (m, rhs, ratio) in &r.per_r {
        csv.push_str(&format!("{m},{},{},{rhs},{ratio}\n", (-(*m as f64)).exp2(), r.lhs));
    }
    std::fs::write(&args.out, csv)?;
    Ok(())
}

fn cmd_gen(args: GenArgs) -> sparsekit_core::Result<()> {
    match args.preset {
        PresetArg::Constant => {
            write_spgf_file(&GridFunction::constant(args.n, args.j, 1.0), &args.out)
        }
        PresetArg::Atom => {
            let mut cell = [0u32; 3];
            for d in cell.iter_mut().take(args.n) {
                *d = (1u32 << args.j) / 2;
            }
            write_spgf_file(&GridFunction::unit_atom(args.n, args.j, cell), &args.out)
        }
        PresetArg::Random => {
            let fam = corpus_generate(args.n, args.j, args.seed, &[Generator::RandomUniform])?;
            write_spgf_file(&fam.members[0].1, &args.out)
        }
        PresetArg::Mixed | PresetArg::MollifiedFamily | PresetArg::Smooth => {
            std::fs::create_dir_all(&args.out)?;
            let fam = match args.preset {
                PresetArg::Mixed => mixed_corpus(args.n, args.j, args.seed, args.count),
                PresetArg::Smooth => smooth_corpus(args.n, args.j, args.seed, args.count),
                _ => {
                    let specs: Vec<Generator> = (1..=args.count)
                        .map(|m| Generator::MollifiedAtom { scale: m.min(args.j) })
                        .collect();
                    corpus_generate(args.n, args.j, args.seed, &specs)?
                }
            };
            for (i, (_, f)) in fam.members.iter().enumerate() {
                write_spgf_file(f, &args.out.join(format!("member_{i:03}.spgf")))?;
            }
            Ok(())
        }
    }
}
