//! Command-line surface for lattice flows and 5-tile protein encoding.

mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;

use tilecode::encode::{
    encode_chain, fold_fragment, ChainSites, EncoderConfig, Fragment, TileCode,
};
use tilecode::flow::{derivative_code, trace, Derivative, PeakSet};
use tilecode::geom::export_obj;
use tilecode::lattice::{flat_class, Dim, FlatClass, Monomial, OrderedSimplex};
use tilecode::pdb::{parse_pdb, CaTrace};

/// Flows of triangles and tetrahedra over integer lattices, and 5-tile
/// codes for local protein backbone structure.
#[derive(Parser)]
#[command(name = "tilecode", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode the chains of a PDB file into 5-tile codes.
    Encode(EncodeArgs),
    /// Trace a lattice flow from a peak file and print its derivative code.
    Flow(FlowArgs),
    /// Export geometry: an SVG of a triangle-flow trajectory or an OBJ of
    /// folded tetrahedra.
    Export(ExportArgs),
    /// Print the full 5-tile letter table.
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct EncodeArgs {
    /// PDB file with Calpha coordinates.
    file: PathBuf,
    /// Only encode this chain.
    #[arg(long)]
    chain: Option<char>,
    /// Long-edge length in angstroms.
    #[arg(long, default_value_t = 3.8)]
    scale: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    /// Peak file: one lattice point per line as space-separated signed
    /// integer exponents; '#' starts a comment.
    peaks: PathBuf,
    /// Ambient dimension.
    #[arg(long, value_parser = parse_dim)]
    dim: Dim,
    /// Starting flat simplex as `exponents:axes`, with 1-based axes,
    /// e.g. `1,1,0,1:3,4,1`. Defaults to the first peak with axes 1,2(,3).
    #[arg(long)]
    start: Option<String>,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
    max_steps: u32,
    /// Initial derivative value.
    #[arg(long, default_value = "D", value_parser = parse_derivative)]
    initial: Derivative,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    FlowSvg,
    FoldObj,
}

#[derive(Args)]
struct ExportArgs {
    /// What to produce: `flow-svg` (dim-3 trajectory) or `fold-obj`
    /// (tetrahedra of a folded fragment or a dim-4 trajectory).
    #[arg(long, value_enum)]
    what: ExportKind,
    /// Peak file, for trajectory exports.
    #[arg(long)]
    peaks: Option<PathBuf>,
    #[arg(long, value_parser = parse_dim)]
    dim: Option<Dim>,
    #[arg(long)]
    start: Option<String>,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
    max_steps: u32,
    /// PDB file, for fragment exports.
    #[arg(long)]
    pdb: Option<PathBuf>,
    #[arg(long)]
    chain: Option<char>,
    /// Center residue index (0-based within the chain) of the fragment.
    #[arg(long)]
    center: Option<usize>,
    #[arg(long, default_value_t = 3.8)]
    scale: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_dim(s: &str) -> Result<Dim, String> {
    s.parse::<usize>()
        .ok()
        .and_then(Dim::from_n)
        .ok_or_else(|| "dimension must be 3 or 4".to_string())
}

fn parse_derivative(s: &str) -> Result<Derivative, String> {
    let mut chars = s.chars();
    match (chars.next().and_then(Derivative::from_char), chars.next()) {
        (Some(d), None) => Ok(d),
        _ => Err("initial derivative must be U or D".to_string()),
    }
}

/// Parse a start specifier `e1,e2,..:a1,a2(,a3)` with 1-based axes.
fn parse_start(spec: &str, dim: Dim) -> Result<FlatClass> {
    let (exp_part, axes_part) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("start must look like `exponents:axes`, e.g. `0,0,0:1,2`"))?;
    let exps: Vec<i64> = exp_part
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| anyhow!("bad exponent `{t}`")))
        .collect::<Result<_>>()?;
    if exps.len() != dim.n() {
        bail!("expected {} exponents, found {}", dim.n(), exps.len());
    }
    let axes: Vec<usize> = axes_part
        .split(',')
        .map(|t| {
            let v: usize = t.trim().parse().map_err(|_| anyhow!("bad axis `{t}`"))?;
            if v == 0 || v > dim.n() {
                bail!("axis {v} out of range 1..={}", dim.n());
            }
            Ok(v - 1)
        })
        .collect::<Result<_>>()?;
    let base = Monomial::new(dim, &exps);
    let simplex = OrderedSimplex::try_new(base, &axes)
        .ok_or_else(|| anyhow!("axes must be {} distinct indices", dim.k()))?;
    Ok(flat_class(&simplex))
}

fn default_start(peaks: &PeakSet) -> FlatClass {
    let axes: Vec<usize> = (0..peaks.dim().k()).collect();
    flat_class(&OrderedSimplex::new(peaks.peaks()[0], &axes))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn chain_sites(trace: &CaTrace) -> ChainSites {
    let residues =
        trace.residues.iter().map(|r| (r.aa, Vector3::new(r.pos[0], r.pos[1], r.pos[2]))).collect();
    ChainSites::new(residues, trace.gap_after.clone())
}

/// Rows of width-10 blocks separated by single spaces, mirroring the
/// listing layout of the encoder's reference output.
fn blocked(s: &str) -> String {
    s.as_bytes().chunks(10).map(|c| std::str::from_utf8(c).unwrap()).collect::<Vec<_>>().join(" ")
}

fn cmd_encode(args: &EncodeArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.file)
        .with_context(|| format!("reading {}", args.file.display()))?;
    let traces = parse_pdb(&text)?;
    let selected: Vec<&CaTrace> =
        traces.iter().filter(|t| args.chain.is_none_or(|c| t.chain_id == c)).collect();
    if selected.is_empty() {
        eprintln!("warning: no chain matched the selection");
        return Ok(ExitCode::from(2));
    }
    if args.scale <= 0.0 {
        bail!("--scale must be positive");
    }

    let cfg = EncoderConfig { scale: args.scale, ..EncoderConfig::default() };
    let mut out = String::new();
    let mut chains_json = Vec::new();
    for trace in selected {
        let sites = chain_sites(trace);
        let coded = encode_chain(&sites, &cfg);
        for w in &coded.warnings {
            eprintln!("warning: chain {}: {}", trace.chain_id, w);
        }
        match args.format {
            Format::Text => {
                let seq: String = trace.residues.iter().map(|r| r.aa).collect();
                out.push_str(&format!("chain {} ({} residues)\n", trace.chain_id, seq.len()));
                out.push_str(&blocked(&seq));
                out.push('\n');
                out.push_str(&blocked(&coded.code));
                out.push_str("\n\n");
            }
            Format::Json => {
                chains_json.push(serde_json::json!({
                    "chain_id": trace.chain_id.to_string(),
                    "code": coded.code,
                    "residues": coded.records,
                }));
            }
        }
    }
    if let Format::Json = args.format {
        out = serde_json::to_string_pretty(&serde_json::json!({ "chains": chains_json }))?;
        out.push('\n');
    }
    emit(&args.out, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_flow(args: &FlowArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.peaks)
        .with_context(|| format!("reading {}", args.peaks.display()))?;
    let peaks = PeakSet::parse(&text, args.dim)?;
    let start = match &args.start {
        Some(spec) => parse_start(spec, args.dim)?,
        None => default_start(&peaks),
    };
    let trajectory = trace(&peaks, &start, args.max_steps as usize)?;
    let code = derivative_code(&trajectory, args.initial);

    let mut out = String::new();
    match args.format {
        Format::Text => {
            for i in 0..trajectory.len() {
                out.push_str(&trajectory.step_line(i, &code));
                out.push('\n');
            }
            if trajectory.closed {
                out.push_str(&format!("closed, length {}\n", trajectory.len()));
            } else {
                out.push_str(&format!("truncated after {} steps\n", trajectory.len()));
            }
            out.push_str(&format!("code {}\n", code));
        }
        Format::Json => {
            out = serde_json::to_string_pretty(&serde_json::json!({
                "steps": trajectory.records(&code),
                "closed": trajectory.closed,
                "truncated": trajectory.truncated,
                "code": code.to_string(),
            }))?;
            out.push('\n');
        }
    }
    emit(&args.out, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(args: &ExportArgs) -> Result<ExitCode> {
    match args.what {
        ExportKind::FlowSvg => {
            let peaks_path =
                args.peaks.as_ref().ok_or_else(|| anyhow!("flow-svg needs --peaks"))?;
            let dim = args.dim.ok_or_else(|| anyhow!("flow-svg needs --dim 3"))?;
            if dim != Dim::Three {
                bail!("flow-svg renders dimension 3 only");
            }
            let text = fs::read_to_string(peaks_path)?;
            let peaks = PeakSet::parse(&text, dim)?;
            let start = match &args.start {
                Some(spec) => parse_start(spec, dim)?,
                None => default_start(&peaks),
            };
            let trajectory = trace(&peaks, &start, args.max_steps as usize)?;
            emit(&args.out, &render::trajectory_svg(&trajectory))?;
        }
        ExportKind::FoldObj => {
            if let Some(pdb_path) = &args.pdb {
                let center =
                    args.center.ok_or_else(|| anyhow!("fold-obj from a PDB needs --center"))?;
                let text = fs::read_to_string(pdb_path)?;
                let traces = parse_pdb(&text)?;
                let trace = traces
                    .iter()
                    .find(|t| args.chain.is_none_or(|c| t.chain_id == c))
                    .ok_or_else(|| anyhow!("no matching chain"))?;
                if center < 2 || center + 2 >= trace.residues.len() {
                    bail!("center {} has no full 5-residue window", center);
                }
                let window: [Vector3<f64>; 5] = std::array::from_fn(|j| {
                    let p = trace.residues[center - 2 + j].pos;
                    Vector3::new(p[0], p[1], p[2])
                });
                let cfg = EncoderConfig { scale: args.scale, ..EncoderConfig::default() };
                let tetras = fold_fragment(&Fragment::new(window)?, &cfg)?;
                emit(&args.out, &export_obj(&tetras))?;
            } else if let Some(peaks_path) = &args.peaks {
                let dim = args.dim.ok_or_else(|| anyhow!("fold-obj from peaks needs --dim 4"))?;
                if dim != Dim::Four {
                    bail!("trajectory OBJ export renders dimension 4 only");
                }
                let text = fs::read_to_string(peaks_path)?;
                let peaks = PeakSet::parse(&text, dim)?;
                let start = match &args.start {
                    Some(spec) => parse_start(spec, dim)?,
                    None => default_start(&peaks),
                };
                let trajectory = trace(&peaks, &start, args.max_steps as usize)?;
                emit(&args.out, &render::trajectory_obj(&trajectory, args.scale))?;
            } else {
                bail!("fold-obj needs either --pdb with --center, or --peaks with --dim 4");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table() -> Result<ExitCode> {
    let mut out = String::new();
    out.push_str("bits   Y  letter\n");
    for y in 0u8..32 {
        let bits: String = (0..5).map(|i| if y >> (4 - i) & 1 == 1 { 'U' } else { 'D' }).collect();
        let code = TileCode::from_bits_str(&bits).unwrap();
        out.push_str(&format!("{} {:>3}  {}\n", bits, y, code.letter()));
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Encode(args) => cmd_encode(args),
        Command::Flow(args) => cmd_flow(args),
        Command::Export(args) => cmd_export(args),
        Command::Table => cmd_table(),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
