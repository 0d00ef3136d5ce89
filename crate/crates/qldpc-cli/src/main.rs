//! Command-line interface for the qldpc toolkit.
//!
//! Verbs: `code build|info`, `layers decompose|verify|product`,
//! `decode`, `simulate`, `latency`. Codes are addressed by name: `c2`
//! is built in, anything else (`b1` in particular) is ingested from a
//! pair of alist files given with `--hx`/`--hz` or, for `b1`, the
//! `QLDPC_B1_HX`/`QLDPC_B1_HZ` environment variables.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qldpc::alist;
use qldpc::css::{build_c2, load_css, CssCode};
use qldpc::decoder::{decode, Algorithm, DecoderConfig, Schedule};
use qldpc::latency::{latency_ns, Architecture, LatencyQuery};
use qldpc::layering::{
    c2_component_layers, greedy_decompose, hgp_layers, validate_cover, CoverReport, LayerCover,
};
use qldpc::sim::{format_csv, run_trials};
use qldpc::SparseBinaryMatrix;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "qldpc",
    version,
    about = "Layered message-passing decoding of quantum LDPC codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect CSS codes.
    Code {
        #[command(subcommand)]
        action: CodeAction,
    },
    /// Work with layer decompositions and t-covers.
    Layers {
        #[command(subcommand)]
        action: LayersAction,
    },
    /// Decode a single syndrome read from a file.
    Decode(DecodeArgs),
    /// Run a Monte Carlo Z-noise simulation.
    Simulate(SimulateArgs),
    /// Estimate decoder latency for an architecture.
    Latency(LatencyArgs),
}

#[derive(Subcommand)]
enum CodeAction {
    /// Build a named code and write its matrices as alist files.
    Build {
        #[command(flatten)]
        code: CodeArgs,
        /// Output path for H_X.
        #[arg(long)]
        hx_out: PathBuf,
        /// Output path for H_Z.
        #[arg(long)]
        hz_out: PathBuf,
    },
    /// Print the parameters of a code.
    Info {
        #[command(flatten)]
        code: CodeArgs,
    },
}

#[derive(Subcommand)]
enum LayersAction {
    /// Greedily decompose a matrix into layers.
    Decompose {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Output cover file.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Validate a cover file against a matrix.
    Verify {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Cover file to check.
        #[arg(long)]
        cover: PathBuf,
    },
    /// Combine component decompositions into a decomposition of the
    /// hypergraph product H_X.
    Product {
        /// Cover file with the decomposition of A.
        #[arg(long, required_unless_present = "c2")]
        a: Option<PathBuf>,
        /// Cover file with the decomposition of B transposed.
        #[arg(long, required_unless_present = "c2")]
        bt: Option<PathBuf>,
        /// Use the built-in C2 component decomposition for both sides.
        #[arg(long)]
        c2: bool,
        /// Layer permutation, e.g. "2 0 1 3 4" (default: identity).
        #[arg(long)]
        sigma: Option<String>,
        /// Output cover file.
        #[arg(short, long)]
        out: PathBuf,
    },
}

/// Code selection shared by several verbs.
#[derive(Args)]
struct CodeArgs {
    /// Code name: "c2" is built in; other names load --hx/--hz ("b1"
    /// also honors QLDPC_B1_HX/QLDPC_B1_HZ).
    #[arg(long)]
    code: Option<String>,
    /// H_X alist file.
    #[arg(long)]
    hx: Option<PathBuf>,
    /// H_Z alist file.
    #[arg(long)]
    hz: Option<PathBuf>,
}

impl CodeArgs {
    fn resolve(&self) -> Result<CssCode> {
        let name = self.code.as_deref().unwrap_or("custom");
        if name == "c2" && self.hx.is_none() {
            return Ok(build_c2());
        }
        let env_path = |key: &str| std::env::var_os(key).map(PathBuf::from);
        let (hx, hz) = match (&self.hx, &self.hz) {
            (Some(x), Some(z)) => (x.clone(), z.clone()),
            (None, None) if name == "b1" => {
                match (env_path("QLDPC_B1_HX"), env_path("QLDPC_B1_HZ")) {
                    (Some(x), Some(z)) => (x, z),
                    _ => bail!(
                        "code \"b1\" is ingested from files: pass --hx/--hz \
                         or set QLDPC_B1_HX and QLDPC_B1_HZ"
                    ),
                }
            }
            _ => bail!("code {name:?} needs both --hx and --hz alist paths"),
        };
        load_css(&hx, &hz, name)
            .with_context(|| format!("loading code {name:?} from {hx:?} / {hz:?}"))
    }
}

/// Matrix selection: a bare alist file, or one side of a named code.
#[derive(Args)]
struct MatrixArgs {
    /// Parity-check matrix as an alist file.
    #[arg(long, conflicts_with_all = ["code", "hx", "hz"])]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    code: CodeArgs,
    /// Which side of the code to use.
    #[arg(long, value_enum, default_value_t = SideArg::X)]
    side: SideArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    X,
    Z,
}

impl MatrixArgs {
    fn resolve(&self) -> Result<SparseBinaryMatrix> {
        if let Some(path) = &self.matrix {
            return alist::read_alist(path).with_context(|| format!("reading {path:?}"));
        }
        if self.code.code.is_none() && self.code.hx.is_none() {
            bail!("pass either --matrix or a code selection (--code/--hx/--hz)");
        }
        let code = self.code.resolve()?;
        Ok(match self.side {
            SideArg::X => code.h_x().clone(),
            SideArg::Z => code.h_z().clone(),
        })
    }
}

/// Decoder settings shared by `decode` and `simulate`.
#[derive(Args, Clone)]
struct DecoderArgs {
    /// Message update schedule.
    #[arg(long, value_enum, default_value_t = ScheduleArg::Layered)]
    schedule: ScheduleArg,
    /// Check-node update rule.
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Nms)]
    algo: AlgorithmArg,
    /// Redraw the layer (or check) order every sweep.
    #[arg(long)]
    random_order: bool,
    /// Reject orders where consecutive layers share a check.
    #[arg(long)]
    constrain_successive: bool,
    /// Iteration budget: full iterations for flooded, layer iterations
    /// for serial/layered (default: 128 flooded, floor(64 k/t) layered).
    #[arg(long)]
    budget: Option<usize>,
    /// Syndrome check period, in layer applications.
    #[arg(long, default_value_t = 1)]
    check_period: usize,
    /// Normalization factor for nms.
    #[arg(long, default_value_t = 0.875)]
    nms_factor: f64,
    /// Comma-separated factor set for pnms.
    #[arg(long, default_value = "0.875,0.9275")]
    perturbation: String,
    /// Message clipping bound (LLR units).
    #[arg(long, default_value_t = 30.0)]
    clip: f64,
    /// Cover file for the layered schedule.
    #[arg(long)]
    cover: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Flooded,
    Serial,
    Layered,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Sp,
    Nms,
    Pnms,
}

impl DecoderArgs {
    fn config(&self, seed: u32) -> Result<DecoderConfig> {
        let perturbation_set: Vec<f64> = self
            .perturbation
            .split(',')
            .map(|token| {
                token
                    .trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad perturbation factor {token:?}"))
            })
            .collect::<Result<_>>()?;
        let schedule = match self.schedule {
            ScheduleArg::Flooded => Schedule::Flooded,
            ScheduleArg::Serial => Schedule::Serial,
            ScheduleArg::Layered => Schedule::Layered,
        };
        let mut config = DecoderConfig {
            algorithm: match self.algo {
                AlgorithmArg::Sp => Algorithm::SumProduct,
                AlgorithmArg::Nms => Algorithm::NormalizedMinSum,
                AlgorithmArg::Pnms => Algorithm::PerturbedMinSum,
            },
            nms_factor: self.nms_factor,
            perturbation_set,
            schedule,
            random_order: self.random_order,
            constrain_successive: self.constrain_successive,
            syndrome_check_period: self.check_period,
            message_clip: self.clip,
            rng_seed: seed,
            ..DecoderConfig::default()
        };
        if let Some(budget) = self.budget {
            match schedule {
                Schedule::Flooded => config.max_iterations = budget,
                _ => config.max_layer_iterations = Some(budget),
            }
        }
        Ok(config)
    }

    fn load_cover(&self) -> Result<Option<LayerCover>> {
        match &self.cover {
            Some(path) => Ok(Some(
                LayerCover::read_from(path).with_context(|| format!("reading cover {path:?}"))?,
            )),
            None => Ok(None),
        }
    }
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// File holding the syndrome bits (0/1, whitespace optional).
    #[arg(long)]
    syndrome: PathBuf,
    /// Channel error probability for the prior LLR.
    #[arg(long)]
    p: f64,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Decoder seed.
    #[arg(long, default_value_t = 0)]
    seed: u32,
    /// Write the estimate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Physical Z-error probability.
    #[arg(long)]
    p: f64,
    /// Number of Monte Carlo trials.
    #[arg(long)]
    trials: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u32,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Write a CSV (header plus one row) to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct LatencyArgs {
    /// Decoder architecture.
    #[arg(long, value_enum)]
    arch: ArchArg,
    /// Clock period in nanoseconds.
    #[arg(long)]
    clock_ns: f64,
    /// Iteration count (see the latency table conventions).
    #[arg(long)]
    iterations: u32,
    /// Check count (serial architecture).
    #[arg(long)]
    m: Option<usize>,
    /// Fractional layer number k/t (layered architecture).
    #[arg(long)]
    layers: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArchArg {
    Parallel,
    Serial,
    Layered,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Code { action } => match action {
            CodeAction::Build { code, hx_out, hz_out } => code_build(&code, &hx_out, &hz_out),
            CodeAction::Info { code } => code_info(&code),
        },
        Command::Layers { action } => match action {
            LayersAction::Decompose { matrix, out } => layers_decompose(&matrix, &out),
            LayersAction::Verify { matrix, cover } => layers_verify(&matrix, &cover),
            LayersAction::Product { a, bt, c2, sigma, out } => {
                layers_product(a.as_deref(), bt.as_deref(), c2, sigma.as_deref(), &out)
            }
        },
        Command::Decode(args) => run_decode(&args),
        Command::Simulate(args) => run_simulate(&args),
        Command::Latency(args) => run_latency(&args),
    }
}

fn code_build(args: &CodeArgs, hx_out: &Path, hz_out: &Path) -> Result<()> {
    let code = args.resolve()?;
    alist::write_alist(hx_out, code.h_x()).with_context(|| format!("writing {hx_out:?}"))?;
    alist::write_alist(hz_out, code.h_z()).with_context(|| format!("writing {hz_out:?}"))?;
    println!(
        "wrote {} ({} variables, {} X-checks, {} Z-checks) to {} and {}",
        code.name(),
        code.n(),
        code.h_x().n_rows(),
        code.h_z().n_rows(),
        hx_out.display(),
        hz_out.display()
    );
    Ok(())
}

fn code_info(args: &CodeArgs) -> Result<()> {
    let code = args.resolve()?;
    let valid = code.validate();
    println!("name:       {}", code.name());
    println!("n:          {}", code.n());
    println!("m_x:        {}", code.h_x().n_rows());
    println!("m_z:        {}", code.h_z().n_rows());
    println!("css valid:  {valid}");
    if valid {
        println!("dimension:  {}", code.dimension());
    }
    println!(
        "bound k/t:  {} (H_X)",
        qldpc::layering::density_bound(code.h_x())
    );
    Ok(())
}

fn print_report(report: &CoverReport) {
    println!("t:           {}", report.t);
    println!("k:           {}", report.k);
    println!("fractional:  {}", report.fractional);
    println!("gamma:       {:.4}", report.gamma);
    println!(
        "layer sizes: {}..{}",
        report.min_layer_size, report.max_layer_size
    );
    println!("bound k/t:   {}", report.lower_bound);
    println!("valid:       {}", report.valid);
    for violation in &report.violations {
        println!("  violation: {violation}");
    }
}

fn layers_decompose(matrix: &MatrixArgs, out: &Path) -> Result<()> {
    let h = matrix.resolve()?;
    let decomp = greedy_decompose(&h);
    let report = validate_cover(&h, &decomp);
    decomp
        .write_to(out)
        .with_context(|| format!("writing {out:?}"))?;
    println!("wrote {} layers to {}", decomp.k(), out.display());
    print_report(&report);
    Ok(())
}

fn layers_verify(matrix: &MatrixArgs, cover_path: &Path) -> Result<()> {
    let h = matrix.resolve()?;
    let cover =
        LayerCover::read_from(cover_path).with_context(|| format!("reading {cover_path:?}"))?;
    let report = validate_cover(&h, &cover);
    print_report(&report);
    if !report.valid {
        bail!("cover is not valid for this matrix");
    }
    Ok(())
}

fn layers_product(
    a: Option<&Path>,
    bt: Option<&Path>,
    use_c2: bool,
    sigma: Option<&str>,
    out: &Path,
) -> Result<()> {
    let (decomp_a, decomp_bt) = if use_c2 {
        (c2_component_layers(), c2_component_layers())
    } else {
        let a = a.context("--a is required without --c2")?;
        let bt = bt.context("--bt is required without --c2")?;
        (
            LayerCover::read_from(a).with_context(|| format!("reading {a:?}"))?,
            LayerCover::read_from(bt).with_context(|| format!("reading {bt:?}"))?,
        )
    };
    let sigma: Option<Vec<usize>> = match sigma {
        Some(text) => Some(
            text.split([' ', ','])
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .with_context(|| format!("bad sigma entry {t:?}"))
                })
                .collect::<Result<_>>()?,
        ),
        None => None,
    };
    let product = hgp_layers(&decomp_a, &decomp_bt, sigma.as_deref())?;
    product
        .write_to(out)
        .with_context(|| format!("writing {out:?}"))?;
    let sizes: Vec<usize> = product.layers.iter().map(Vec::len).collect();
    println!(
        "wrote a {}-layer decomposition of {} checks to {} (sizes {sizes:?})",
        product.k(),
        product.m,
        out.display()
    );
    Ok(())
}

fn read_syndrome(path: &Path) -> Result<Vec<u8>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    let mut bits = Vec::new();
    for c in text.chars() {
        match c {
            '0' => bits.push(0),
            '1' => bits.push(1),
            c if c.is_whitespace() || c == ',' => {}
            c => bail!("unexpected character {c:?} in syndrome file"),
        }
    }
    Ok(bits)
}

fn run_decode(args: &DecodeArgs) -> Result<()> {
    let code = args.code.resolve()?;
    let syndrome = read_syndrome(&args.syndrome)?;
    let config = args.decoder.config(args.seed)?;
    let cover = args.decoder.load_cover()?;
    let result = decode(code.h_x(), &syndrome, cover.as_ref(), args.p, &config)?;
    println!("converged:        {}", result.converged);
    println!("layer iterations: {}", result.layer_iterations_used);
    println!("sweeps:           {}", result.iterations_used);
    if result.constraint_fallbacks > 0 {
        println!(
            "note: {} sweep orders fell back to unconstrained permutations",
            result.constraint_fallbacks
        );
    }
    let estimate: String = result
        .estimate
        .iter()
        .map(|b| char::from(b'0' + b))
        .collect();
    match &args.out {
        Some(path) => {
            std::fs::write(path, estimate + "\n").with_context(|| format!("writing {path:?}"))?;
            println!("estimate written to {}", path.display());
        }
        None => println!("estimate:         {estimate}"),
    }
    Ok(())
}

fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let code = args.code.resolve()?;
    let config = args.decoder.config(0)?;
    let cover = args.decoder.load_cover()?;
    let stats = run_trials(
        &code,
        cover.as_ref(),
        &config,
        args.p,
        args.trials,
        args.seed,
    )?;
    println!(
        "{} trials on {}: frame error rate {} (logical {}, non-convergence {}), \
         mean layer iterations {}",
        stats.trials,
        stats.code_name,
        stats.frame_error_rate,
        stats.logical_error_rate,
        stats.nonconvergence_rate,
        stats.mean_layer_iterations
    );
    let csv = format_csv(std::slice::from_ref(&stats));
    if let Some(path) = &args.csv {
        std::fs::write(path, &csv).with_context(|| format!("writing {path:?}"))?;
        println!("csv written to {}", path.display());
    } else {
        print!("{csv}");
    }
    Ok(())
}

fn run_latency(args: &LatencyArgs) -> Result<()> {
    let query = LatencyQuery {
        architecture: match args.arch {
            ArchArg::Parallel => Architecture::Parallel,
            ArchArg::Serial => Architecture::Serial,
            ArchArg::Layered => Architecture::Layered,
        },
        clock_period_ns: args.clock_ns,
        it_max: args.iterations,
        m: args.m,
        fractional_layers: args.layers,
    };
    let ns = latency_ns(&query)?;
    println!("latency: {ns} ns ({} us)", ns / 1000.0);
    Ok(())
}
