//! Command-line interface.
//!
//! Exit status: 0 on success, 1 on a domain error (bad design, failed
//! verification, unreadable file, ...), 2 on a usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use crate::codes::{
    build_code_from, code_report, hamada_breakdown, hamada_rank, min_distance_bruteforce,
    rank_report, BinaryCode, CodeSource, DistanceMode,
};
use crate::decoders::{
    measure_decoding_radius, simulate, two_step_capability, Decoder, OneStepDecoder, TwoStepDecoder,
};
use crate::designs::{
    affine_version, derive_params_comb, derive_params_q, emit_cdesign, emit_qdesign,
    flats_construction, parse_design, projective_version, trivial_design, CombinatorialDesign,
    DesignFile, ObservedLambda, SubspaceDesign,
};
use crate::error::Error;
use crate::field::{FieldCtx, FieldElement};
use crate::geometry::enumerate_points;
use crate::io::parse_word;
use crate::matrix::{matrix_rank_p, parse_pmatrix};
use crate::table::{all_known_rows, cmd_table, TableRowSpec, TSV_HEADER};

#[derive(Debug, Parser)]
#[command(
    name = "qdesign-codes",
    version,
    about = "Codes from subspace designs and their majority-logic decoders"
)]
pub struct Cli {
    /// Report layout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Kv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Kv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Projective,
    Affine,
    Flats,
}

impl From<Mode> for DistanceMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Projective => DistanceMode::Projective,
            Mode::Affine => DistanceMode::Affine,
            Mode::Flats => DistanceMode::Flats,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecoderKind {
    OneStep,
    TwoStep,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the points of PG(v-1, q) in canonical order.
    Points {
        #[arg(long)]
        v: usize,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Create, check and transform designs.
    #[command(subcommand)]
    Design(DesignCmd),
    /// Build codes and compute their parameters.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Evaluate Hamada's p-rank formula.
    Hamada {
        #[arg(long)]
        v: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u32,
        /// Print every tuple of the sum.
        #[arg(long)]
        breakdown: bool,
    },
    /// Two-step decoding capability for the code of k-subspaces of F_q^v.
    Capability {
        #[arg(long)]
        v: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// λ of the step-2 design of (k-1)-subspaces.
        #[arg(long, default_value_t = 1)]
        lambda: u64,
    },
    /// Decode one received word.
    #[command(subcommand)]
    Decode(DecodeCmd),
    /// Measure the decoding radius around the zero codeword.
    Radius {
        /// Design file (for two-step: the step-2 subspace design).
        design: PathBuf,
        #[arg(long, value_enum, default_value_t = DecoderKind::OneStep)]
        decoder: DecoderKind,
        #[arg(long, value_enum, default_value_t = Mode::Projective)]
        mode: Mode,
        /// Patterns per weight before switching from exhaustive to sampled.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        max_weight: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run random weight-w errors through a decoder.
    Simulate {
        design: PathBuf,
        #[arg(long, value_enum, default_value_t = DecoderKind::OneStep)]
        decoder: DecoderKind,
        #[arg(long, value_enum, default_value_t = Mode::Projective)]
        mode: Mode,
        #[arg(long)]
        weight: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Send the zero codeword instead of random codewords.
        #[arg(long)]
        zero: bool,
    },
    /// Code parameters for a design row, or for every catalogued row.
    Table {
        #[arg(long, required_unless_present = "all")]
        t: Option<usize>,
        #[arg(long, required_unless_present = "all")]
        v: Option<usize>,
        #[arg(long, required_unless_present = "all")]
        k: Option<usize>,
        #[arg(long, required_unless_present = "all")]
        lambda: Option<u64>,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long, value_enum, default_value_t = Mode::Projective)]
        mode: Mode,
        /// Print all catalogued rows.
        #[arg(long, conflicts_with_all = ["t", "v", "k", "lambda"])]
        all: bool,
    },
    /// Experiments on ingested designs.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    /// Modulus polynomial as a base-p coefficient integer.
    #[arg(long)]
    pub poly: Option<u32>,
}

impl FieldArgs {
    fn ctx(&self) -> Result<FieldCtx, Error> {
        FieldCtx::with_order_and_modulus(self.q, self.poly)
    }
}

#[derive(Debug, Subcommand)]
pub enum DesignCmd {
    /// Write the trivial design of all k-subspaces.
    Trivial {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        v: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the design property of a design file.
    Verify { design: PathBuf },
    /// Derived parameters; combinatorial unless --q is given.
    Derive {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        v: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        lambda: u64,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Turn a subspace design into a combinatorial design.
    Construct {
        design: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Projective)]
        mode: Mode,
        /// Normal vector of the hyperplane for the affine version.
        #[arg(long)]
        normal: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CodeCmd {
    /// Write the parity-check matrix of a design's code.
    Build {
        design: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Projective)]
        mode: Mode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rank of a matrix file, or of a design's code with the rank formulas.
    Rank {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Projective)]
        mode: Mode,
        #[arg(long, default_value_t = 2)]
        p: u32,
    },
    /// n, rank, dim, ℓ and distance bounds of a design's code.
    Params {
        design: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Projective)]
        mode: Mode,
    },
    /// Exhaustive minimum distance.
    Mindist {
        design: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Projective)]
        mode: Mode,
        #[arg(long, default_value_t = crate::codes::DEFAULT_DISTANCE_CAP)]
        cap: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum DecodeCmd {
    /// One-step majority-logic decoding with the design's blocks as checks.
    OneStep {
        design: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Projective)]
        mode: Mode,
        /// Received word as a 0/1 string.
        #[arg(long)]
        word: String,
    },
    /// Two-step decoding of the code of (k+1)-subspaces using a design of
    /// k-subspaces.
    TwoStep {
        design: PathBuf,
        #[arg(long)]
        word: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCmd {
    /// Compare the 2-rank of a subspace design with that of the trivial design.
    Rank { design: PathBuf },
}

/// Runs the CLI on `args` and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(CliError::Domain(msg, partial)) => {
            print!("{partial}");
            eprintln!("error: {msg}");
            1
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Message and any report printed before failing.
    Domain(String, String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string(), String::new())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Domain(format!("{}: {e}", path.display()), String::new()))
}

fn write_or_return(text: String, output: &Option<PathBuf>) -> CliResult<String> {
    match output {
        Some(p) => {
            std::fs::write(p, &text)
                .map_err(|e| CliError::Domain(format!("{}: {e}", p.display()), String::new()))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Converts `key=value` lines to a header row and a value row.
fn kv_to_tsv(kv: &str) -> String {
    let (keys, vals): (Vec<&str>, Vec<&str>) = kv.lines().filter_map(|l| l.split_once('=')).unzip();
    format!("{}\n{}\n", keys.join("\t"), vals.join("\t"))
}

fn render(kv: String, format: Format) -> String {
    match format {
        Format::Kv => kv,
        Format::Tsv => kv_to_tsv(&kv),
    }
}

fn load_design(path: &Path) -> CliResult<DesignFile> {
    Ok(parse_design(&read(path)?)?)
}

fn load_subspace_design(path: &Path) -> CliResult<SubspaceDesign> {
    match load_design(path)? {
        DesignFile::Subspace(d) => Ok(d),
        DesignFile::Combinatorial(_) => {
            Err(Error::InvalidDesign("expected a qdesign file".into()).into())
        }
    }
}

/// Combinatorial design obtained from a subspace design by `mode`.
fn construct(
    d: &SubspaceDesign,
    mode: Mode,
    normal: Option<&[FieldElement]>,
) -> CliResult<(CombinatorialDesign, CodeSource)> {
    let (v, k, q) = (d.v, d.k, d.q());
    Ok(match mode {
        Mode::Projective => (projective_version(d)?, CodeSource::Projective { v, k, q }),
        Mode::Affine => (affine_version(d, normal)?, CodeSource::Affine { v, k, q }),
        Mode::Flats => (flats_construction(d)?, CodeSource::Flats { v, k }),
    })
}

/// Code of a design file; subspace designs go through `mode` first.
fn load_code(path: &Path, mode: Mode, p: u32) -> CliResult<BinaryCode> {
    let (comb, source) = match load_design(path)? {
        DesignFile::Subspace(d) => construct(&d, mode, None)?,
        DesignFile::Combinatorial(c) => (c, CodeSource::Combinatorial),
    };
    Ok(build_code_from(&comb, p, source)?)
}

fn pg_code_for_step2(d: &SubspaceDesign) -> CliResult<BinaryCode> {
    let k = d.k + 1;
    if k < 3 {
        return Err(Error::TwoStepNeedsK3(k).into());
    }
    let geo = trivial_design(2, d.v, k, &d.ctx)?;
    let comb = projective_version(&geo)?;
    Ok(build_code_from(
        &comb,
        2,
        CodeSource::Projective {
            v: d.v,
            k,
            q: d.q(),
        },
    )?)
}

fn make_decoder(
    path: &Path,
    kind: DecoderKind,
    mode: Mode,
) -> CliResult<(BinaryCode, Box<dyn Decoder>)> {
    match kind {
        DecoderKind::OneStep => {
            let code = load_code(path, mode, 2)?;
            let dec = OneStepDecoder::new(&code)?;
            Ok((code, Box::new(dec)))
        }
        DecoderKind::TwoStep => {
            let d = load_subspace_design(path)?;
            let code = pg_code_for_step2(&d)?;
            let dec = TwoStepDecoder::new(&code, &d)?;
            Ok((code, Box::new(dec)))
        }
    }
}

fn parse_normal(text: &str, ctx: &FieldCtx) -> CliResult<Vec<FieldElement>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|tok| {
            let x: u32 = tok.parse().map_err(|_| {
                CliError::Domain(format!("bad normal vector entry {tok:?}"), String::new())
            })?;
            Ok(ctx.element(x)?)
        })
        .collect()
}

pub fn run(cli: &Cli) -> CliResult<String> {
    let fmt = cli.format;
    match &cli.command {
        Command::Points { v, field } => {
            let ctx = field.ctx()?;
            let mut out = String::new();
            for (i, x) in enumerate_points(*v, &ctx).iter().enumerate() {
                let coords: Vec<String> = x.iter().map(|e| e.to_string()).collect();
                let _ = writeln!(out, "{i}\t{}", coords.join(" "));
            }
            Ok(out)
        }
        Command::Design(cmd) => run_design(cmd, fmt),
        Command::Code(cmd) => run_code(cmd, fmt),
        Command::Hamada { v, k, q, breakdown } => {
            let (p, m) = crate::field::prime_power(*q)
                .ok_or_else(|| Error::Field(format!("{q} is not a prime power")))?;
            let b = hamada_breakdown(*v, *k, p, m);
            let mut kv = format!("v={v}\nk={k}\nq={q}\nrank={}\n", b.total);
            if let Ok(n) = u64::try_from(crate::geometry::point_count(*v, *q)) {
                let _ = writeln!(kv, "dim={}", num_bigint::BigInt::from(n) - &b.total);
            }
            let mut out = render(kv, fmt);
            if *breakdown {
                let _ = writeln!(out, "{b}");
            }
            Ok(out)
        }
        Command::Capability { v, k, q, lambda } => Ok(render(
            two_step_capability(*v, *k, *q, *lambda)?.to_kv(),
            fmt,
        )),
        Command::Decode(DecodeCmd::OneStep { design, mode, word }) => {
            let (_, dec) = make_decoder(design, DecoderKind::OneStep, *mode)?;
            Ok(render(dec.decode(&parse_word(word)?)?.to_kv(), fmt))
        }
        Command::Decode(DecodeCmd::TwoStep { design, word }) => {
            let (_, dec) = make_decoder(design, DecoderKind::TwoStep, Mode::Projective)?;
            Ok(render(dec.decode(&parse_word(word)?)?.to_kv(), fmt))
        }
        Command::Radius {
            design,
            decoder,
            mode,
            budget,
            max_weight,
            seed,
        } => {
            let (code, dec) = make_decoder(design, *decoder, *mode)?;
            let rep =
                measure_decoding_radius(dec.as_ref(), *budget, max_weight.unwrap_or(code.n), *seed);
            Ok(render(format!("seed={seed}\n{}", rep.to_kv()), fmt))
        }
        Command::Simulate {
            design,
            decoder,
            mode,
            weight,
            trials,
            seed,
            zero,
        } => {
            let (code, dec) = make_decoder(design, *decoder, *mode)?;
            let rep = simulate(&code, dec.as_ref(), *weight, *trials, *seed, !zero)?;
            let per_bit = if *trials == 0 || code.n == 0 {
                0.0
            } else {
                rep.workload.check_evals as f64 / (*trials as f64 * code.n as f64)
            };
            Ok(render(
                format!("{}checks_per_bit={per_bit}\n", rep.to_kv()),
                fmt,
            ))
        }
        Command::Table {
            t,
            v,
            k,
            lambda,
            q,
            mode,
            all,
        } => {
            let specs = if *all {
                all_known_rows()
            } else {
                vec![TableRowSpec::new(
                    t.unwrap(),
                    v.unwrap(),
                    k.unwrap(),
                    lambda.unwrap(),
                    *q,
                    (*mode).into(),
                )]
            };
            let mut out = String::new();
            if fmt == Format::Tsv {
                out.push_str("mode\t");
                out.push_str(TSV_HEADER);
                out.push('\n');
            }
            for spec in specs {
                let rep = cmd_table(&spec)?;
                match fmt {
                    Format::Tsv => {
                        let _ = writeln!(out, "{}\t{}", spec.mode, rep.to_tsv());
                    }
                    Format::Kv => {
                        if !out.is_empty() {
                            out.push('\n');
                        }
                        out.push_str(&rep.to_kv());
                    }
                }
            }
            Ok(out)
        }
        Command::Experiment(ExperimentCmd::Rank { design }) => run_experiment_rank(design, fmt),
    }
}

fn run_design(cmd: &DesignCmd, fmt: Format) -> CliResult<String> {
    match cmd {
        DesignCmd::Trivial {
            t,
            v,
            k,
            field,
            output,
        } => {
            let d = trivial_design(*t, *v, *k, &field.ctx()?)?;
            write_or_return(emit_qdesign(&d), output)
        }
        DesignCmd::Verify { design } => {
            let (verified, observed, witness, label) = match load_design(design)? {
                DesignFile::Subspace(mut d) => {
                    let rep = d.verify();
                    let w = rep.witness.map(|(s, c)| {
                        let rows: Vec<String> = s
                            .rows()
                            .map(|r| {
                                r.iter()
                                    .map(|e| e.to_string())
                                    .collect::<Vec<_>>()
                                    .join(" ")
                            })
                            .collect();
                        format!(
                            "{} (in {c} blocks)",
                            if rows.is_empty() {
                                "0".into()
                            } else {
                                rows.join("; ")
                            }
                        )
                    });
                    (rep.verified, rep.observed, w, d.params().label())
                }
                DesignFile::Combinatorial(mut d) => {
                    let rep = d.verify();
                    let w = rep.witness.map(|(s, c)| {
                        let pts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                        format!("{} (in {c} blocks)", pts.join(" "))
                    });
                    (rep.verified, rep.observed, w, d.params().label())
                }
            };
            let observed = match observed {
                ObservedLambda::Constant(c) => c.to_string(),
                ObservedLambda::NonConstant => "non-constant".into(),
            };
            let kv = format!(
                "design={label}\nverified={verified}\nobserved_lambda={observed}\nwitness={}\n",
                witness.as_deref().unwrap_or("-")
            );
            let out = render(kv, fmt);
            if verified {
                Ok(out)
            } else {
                Err(CliError::Domain(format!("{label} is not a design"), out))
            }
        }
        DesignCmd::Derive { t, v, k, lambda, q } => {
            let p = match q {
                Some(q) => derive_params_q(*t, *v, *k, *lambda, *q)?,
                None => derive_params_comb(*t, *v, *k, *lambda)?,
            };
            let show = |x: &num_rational::BigRational| {
                if x.is_integer() {
                    x.to_integer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            };
            let mut kv = format!("design={}\n", p.label());
            for (s, l) in p.lambda_s.iter().enumerate() {
                let _ = writeln!(kv, "lambda_{s}={}", show(l));
            }
            let _ = writeln!(kv, "b={}\nr={}", show(p.b()), show(&p.r));
            let _ = writeln!(
                kv,
                "admissible={}\nlambda_min={}",
                p.admissible(),
                p.lambda_min()
            );
            Ok(render(kv, fmt))
        }
        DesignCmd::Construct {
            design,
            mode,
            normal,
            output,
        } => {
            let d = load_subspace_design(design)?;
            let normal = normal
                .as_deref()
                .map(|n| parse_normal(n, &d.ctx))
                .transpose()?;
            let (comb, _) = construct(&d, *mode, normal.as_deref())?;
            write_or_return(emit_cdesign(&comb), output)
        }
    }
}

fn run_code(cmd: &CodeCmd, fmt: Format) -> CliResult<String> {
    match cmd {
        CodeCmd::Build {
            design,
            mode,
            output,
        } => {
            let code = load_code(design, *mode, 2)?;
            write_or_return(crate::matrix::emit_pmatrix(&code.checks), output)
        }
        CodeCmd::Rank { file, mode, p } => {
            let text = read(file)?;
            let first = text
                .lines()
                .map(|l| l.split('#').next().unwrap().trim())
                .find(|l| !l.is_empty())
                .unwrap_or("");
            if first.starts_with("pmatrix") {
                let m = parse_pmatrix(&text)?;
                let rank = matrix_rank_p(&m, *p)?;
                return Ok(render(
                    format!("rows={}\ncols={}\nrank={rank}\n", m.rows(), m.cols()),
                    fmt,
                ));
            }
            let code = load_code(file, *mode, *p)?;
            let kv = format!(
                "n={}\ndim={}\n{}",
                code.n,
                code.dim(),
                rank_report(&code).to_kv()
            );
            Ok(render(kv, fmt))
        }
        CodeCmd::Params { design, mode } => {
            let code = load_code(design, *mode, 2)?;
            Ok(render(code_report(&code).to_kv(), fmt))
        }
        CodeCmd::Mindist { design, mode, cap } => {
            let code = load_code(design, *mode, 2)?;
            let d = min_distance_bruteforce(&code, *cap)?;
            Ok(render(
                format!("n={}\ndim={}\nd={d}\n", code.n, code.dim()),
                fmt,
            ))
        }
    }
}

fn run_experiment_rank(path: &Path, fmt: Format) -> CliResult<String> {
    let mut d = load_subspace_design(path)?;
    let rep = d.verify();
    if !rep.verified {
        let witness = rep
            .witness
            .map(|(s, c)| {
                format!(
                    "a {}-subspace with pivots {:?} lies in {c} blocks",
                    s.dim(),
                    s.pivots()
                )
            })
            .unwrap_or_default();
        return Err(Error::InvalidDesign(format!(
            "{} does not verify: {witness}",
            d.params().label()
        ))
        .into());
    }
    let (comb, source) = construct(&d, Mode::Projective, None)?;
    let p = d.ctx.p();
    let code = build_code_from(&comb, p, source)?;
    let geometric = hamada_rank(d.v, d.k, p, d.ctx.m());
    let equal = BigUint::from(code.rank) == geometric;
    let kv = format!(
        "design={}\nrank_design={}\nrank_geometric={geometric}\nverdict={}\n",
        d.params().label(),
        code.rank,
        if equal { "equal" } else { "unequal" }
    );
    Ok(render(kv, fmt))
}
