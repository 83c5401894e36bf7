//! Command-line front end.
//!
//! State files are JSON:
//!
//! ```json
//! { "layout": "row-major", "index_base": 0, "dims": [2, 2],
//!   "amps": [[0.7071067811865476, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7071067811865476, 0.0]] }
//! ```
//!
//! Mixed states use `"rho"` (a square matrix of `[re, im]` entries) instead of
//! `"amps"`. Reports go to stdout as JSON, diagnostics to stderr. Exit code 0
//! means success, 2 an input error, 1 an internal failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::measures::{measure_e, measure_f, MeasureConfig};
use crate::roof::{roof_f, wootters_oracle, RoofConfig};
use crate::segre::{
    check_partition_commutativity, enumerate_perm_classes, enumerate_segre_generators,
    segre_generators, segre_residual, swap_projection, t_variety_residual, MATERIALIZE_LIMIT,
};
use crate::tensor::{
    make_state, named_state, random_state, segre_embed, BoxTensor, DensityMatrix, Dims, NamedState,
    RandomKind, SampledState,
};

pub const TOOL: &str = "segre";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Input errors exit with 2, internal failures with 1.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = TOOL, version, about = "Segre-variety separability tests and entanglement measures")]
struct Cli {
    /// Worker threads for the data-parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    E,
    F,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GeneratorFamily {
    Segre,
    Perm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RandomChoice {
    HaarPure,
    Product,
    Mixed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the pure-state measure E or F.
    Measure {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, ignore_case = true, default_value = "F")]
        which: Which,
        /// Override the normalization constant.
        #[arg(long)]
        norm: Option<f64>,
        #[arg(long)]
        breakdown: bool,
        /// Rescale the amplitudes to unit norm before evaluating.
        #[arg(long)]
        normalize: bool,
    },
    /// Test membership in the Segre variety (full separability) and in the
    /// variety cut out by every swap class.
    Separable {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = crate::segre::DEFAULT_MEMBERSHIP_TOL)]
        tol: f64,
        #[arg(long)]
        normalize: bool,
    },
    /// List the quadratic generators for given dims.
    Generators {
        #[arg(long)]
        dims: String,
        #[arg(long, value_enum, default_value = "segre")]
        family: GeneratorFamily,
        /// Only count, streaming instead of materializing the list.
        #[arg(long)]
        count_only: bool,
    },
    /// Convex-roof estimate of F for a mixed (or pure) state.
    Roof {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        /// Ensemble size K (default min(2r, r + 4) for rank r).
        #[arg(long)]
        ensemble: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        step_tol: f64,
        #[arg(long)]
        norm: Option<f64>,
    },
    /// Embed per-party vectors as a product state.
    Embed {
        /// JSON file with `"factors": [[[re, im], ...], ...]`.
        #[arg(long)]
        factors: PathBuf,
        /// Also compare against the two-stage embedding split after `split` parties.
        #[arg(long)]
        split: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a named or seeded random state file.
    GenState {
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        name: Option<String>,
        #[arg(long, value_enum)]
        random: Option<RandomChoice>,
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of projectors mixed for `--random mixed` (default: full rank).
        #[arg(long)]
        rank: Option<usize>,
        /// Mixing parameter for `--name werner`.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// On-disk state representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub layout: String,
    pub index_base: u32,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amps: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Pure(BoxTensor),
    Mixed(DensityMatrix),
}

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl StateFile {
    pub fn from_pure(state: &BoxTensor) -> Self {
        StateFile {
            layout: "row-major".into(),
            index_base: 0,
            dims: state.dims().as_slice().to_vec(),
            amps: Some(state.amps().iter().map(pair).collect()),
            rho: None,
        }
    }

    pub fn from_mixed(rho: &DensityMatrix) -> Self {
        let m = rho.entries();
        StateFile {
            layout: "row-major".into(),
            index_base: 0,
            dims: rho.dims().as_slice().to_vec(),
            amps: None,
            rho: Some(
                (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect())
                    .collect(),
            ),
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("malformed state file: {e}")))
    }

    /// Validates the header fields and sizes and builds the state.
    pub fn into_state(self, normalize: bool) -> CliResult<LoadedState> {
        if self.layout != "row-major" {
            return Err(CliError::Input(format!(
                "field `layout`: expected \"row-major\", got {:?}",
                self.layout
            )));
        }
        if self.index_base != 0 {
            return Err(CliError::Input(format!(
                "field `index_base`: expected 0, got {}",
                self.index_base
            )));
        }
        let dims = Dims::new(self.dims.clone())
            .map_err(|e| CliError::Input(format!("field `dims`: {e}")))?;
        let total = dims.total();
        match (self.amps, self.rho) {
            (Some(amps), None) => {
                if amps.len() != total {
                    return Err(CliError::Input(format!(
                        "field `amps`: dims {dims} need {total} amplitudes, got {}",
                        amps.len()
                    )));
                }
                let amps = amps
                    .iter()
                    .map(|[re, im]| Complex64::new(*re, *im))
                    .collect();
                Ok(LoadedState::Pure(make_state(dims, amps, normalize)?))
            }
            (None, Some(rows)) => {
                if rows.len() != total {
                    return Err(CliError::Input(format!(
                        "field `rho`: dims {dims} need {total} rows, got {}",
                        rows.len()
                    )));
                }
                if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != total) {
                    return Err(CliError::Input(format!(
                        "field `rho`: row {i} has {} entries, dims {dims} need {total}",
                        row.len()
                    )));
                }
                let entries = DMatrix::from_fn(total, total, |i, j| {
                    let [re, im] = rows[i][j];
                    Complex64::new(re, im)
                });
                Ok(LoadedState::Mixed(DensityMatrix::new(dims, entries)?))
            }
            (Some(_), Some(_)) => Err(CliError::Input(
                "state file has both `amps` and `rho`; give exactly one".into(),
            )),
            (None, None) => Err(CliError::Input(
                "state file has neither `amps` nor `rho`".into(),
            )),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorsFile {
    factors: Vec<Vec<[f64; 2]>>,
}

struct Input {
    state: LoadedState,
    digest: String,
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path, normalize: bool) -> CliResult<Input> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))?;
    let state = StateFile::parse(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .into_state(normalize)?;
    Ok(Input {
        state,
        digest: digest(&bytes),
    })
}

fn expect_pure(state: LoadedState, command: &str) -> CliResult<BoxTensor> {
    match state {
        LoadedState::Pure(s) => Ok(s),
        LoadedState::Mixed(_) => Err(CliError::Input(format!(
            "`{command}` needs a pure state (`amps`); use `roof` for density matrices"
        ))),
    }
}

fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Internal(format!("serialization failed: {e}")))
}

fn report(command: &str, digest: Option<String>, config: Value, result: Value) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "input_digest": digest,
        "config": config,
        "result": result,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn parse_dims(text: &str) -> CliResult<Dims> {
    text.parse::<Dims>()
        .map_err(|e| CliError::Input(format!("--dims: {e}")))
}

fn cmd_measure(
    input: &Path,
    which: Which,
    norm: Option<f64>,
    breakdown: bool,
    normalize: bool,
) -> CliResult<Value> {
    let Input { state, digest } = load(input, normalize)?;
    let state = expect_pure(state, "measure")?;
    let (label, base) = match which {
        Which::E => ("E", MeasureConfig::for_e()),
        Which::F => ("F", MeasureConfig::for_f()),
    };
    let config = base
        .with_normalization(norm.unwrap_or(base.normalization))
        .with_breakdown(breakdown);
    let r = match which {
        Which::E => measure_e(&state, &config)?,
        Which::F => measure_f(&state, &config)?,
    };
    Ok(report(
        "measure",
        Some(digest),
        json!({ "which": label, "normalization": config.normalization, "breakdown": breakdown, "normalize": normalize }),
        to_value(&r)?,
    ))
}

fn cmd_separable(input: &Path, tol: f64, normalize: bool) -> CliResult<Value> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Input(format!(
            "--tol must be a nonnegative real, got {tol}"
        )));
    }
    let Input { state, digest } = load(input, normalize)?;
    let state = expect_pure(state, "separable")?;
    let segre = segre_residual(&state, tol)?;
    let t = t_variety_residual(&state, tol)?;
    Ok(report(
        "separable",
        Some(digest),
        json!({ "tol": tol, "normalize": normalize }),
        json!({
            "member": segre.is_member,
            "residual": segre.residual,
            "segre": to_value(&segre)?,
            "t_variety": to_value(&t)?,
        }),
    ))
}

fn cmd_generators(dims: &str, family: GeneratorFamily, count_only: bool) -> CliResult<Value> {
    let dims = parse_dims(dims)?;
    let config = json!({ "dims": dims.as_slice(), "family": format!("{family:?}").to_lowercase(), "count_only": count_only });
    let result = match family {
        GeneratorFamily::Segre => {
            if count_only {
                json!({ "count": segre_generators(&dims).count() })
            } else {
                let specs = enumerate_segre_generators(&dims)?;
                json!({ "count": specs.len(), "generators": to_value(&specs)? })
            }
        }
        GeneratorFamily::Perm => {
            if dims.parties() < 2 {
                json!({ "count": 0, "classes": [] })
            } else {
                if !count_only && dims.total() > MATERIALIZE_LIMIT {
                    return Err(Error::TooLarge(dims.total()).into());
                }
                let mut total = 0usize;
                let mut classes = Vec::new();
                for class in enumerate_perm_classes(dims.parties())? {
                    let proj = swap_projection(&dims, class.mask());
                    let n = dims.total();
                    let count = (0..n)
                        .map(|k| {
                            (k + 1..n)
                                .filter(|&l| proj[k] != proj[l] && k - proj[k] != l - proj[l])
                                .count()
                        })
                        .sum::<usize>();
                    total += count;
                    classes
                        .push(json!({ "swap_set": class.swap_set(), "nontrivial_pairs": count }));
                }
                json!({ "count": total, "classes": classes })
            }
        }
    };
    Ok(report("generators", None, config, result))
}

#[allow(clippy::too_many_arguments)]
fn cmd_roof(
    input: &Path,
    restarts: usize,
    iters: usize,
    ensemble: Option<usize>,
    seed: u64,
    step_tol: f64,
    norm: Option<f64>,
) -> CliResult<Value> {
    let Input { state, digest } = load(input, false)?;
    let rho = match state {
        LoadedState::Mixed(rho) => rho,
        LoadedState::Pure(psi) => DensityMatrix::from_pure(&psi)?,
    };
    let config = RoofConfig {
        ensemble_size: ensemble,
        restarts,
        max_iters: iters,
        step_tol,
        seed,
        normalization: norm.unwrap_or(crate::measures::DEFAULT_NORM_F),
        ..RoofConfig::default()
    };
    let est = roof_f(&rho, &config)?;
    let dec = &est.decomposition;
    let mut result = json!({
        "value": est.value,
        "rank": est.rank,
        "ensemble_size": est.ensemble_size,
        "restart_bests": est.restart_bests,
        "trace_len": est.trace.len(),
        "reconstruction_error": dec.reconstruction_error(&rho),
        "decomposition": {
            "weights": dec.weights(),
            "states": dec.states().iter().map(|s| s.amps().iter().map(pair).collect::<Vec<_>>()).collect::<Vec<_>>(),
        },
        "note": "upper bound from an explicit decomposition; ensemble size is a heuristic cap",
    });
    if rho.dims().as_slice() == [2, 2] {
        result["two_qubit_concurrence"] = json!(wootters_oracle(&rho)?);
    }
    Ok(report(
        "roof",
        Some(digest),
        json!({
            "restarts": restarts,
            "iters": iters,
            "ensemble": est.ensemble_size,
            "seed": seed,
            "step_tol": step_tol,
            "normalization": config.normalization,
        }),
        result,
    ))
}

fn cmd_embed(factors: &Path, split: Option<usize>, out: Option<&Path>) -> CliResult<Value> {
    let bytes = read_file(factors)?;
    let file: FactorsFile = serde_json::from_slice(&bytes).map_err(|e| {
        CliError::Input(format!(
            "{}: malformed factors file: {e}",
            factors.display()
        ))
    })?;
    let factors: Vec<Vec<Complex64>> = file
        .factors
        .iter()
        .map(|f| f.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
        .collect();
    let state = segre_embed(&factors)?;
    let state_file = StateFile::from_pure(&state);
    let mut result = json!({ "state": to_value(&state_file)? });
    if let Some(l) = split {
        result["commutativity_deviation"] = json!(check_partition_commutativity(&factors, l)?);
    }
    if let Some(path) = out {
        write_json(path, &state_file)?;
        result["written"] = json!(path.display().to_string());
    }
    Ok(report(
        "embed",
        Some(digest(&bytes)),
        json!({ "split": split }),
        result,
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen_state(
    name: Option<&str>,
    random: Option<RandomChoice>,
    dims: Option<&str>,
    seed: u64,
    rank: Option<usize>,
    p: Option<f64>,
) -> CliResult<StateFile> {
    if let Some(name) = name {
        if name.eq_ignore_ascii_case("werner") {
            let p = p.ok_or_else(|| CliError::Input("--name werner needs --p".into()))?;
            return Ok(StateFile::from_mixed(&DensityMatrix::werner(p)?));
        }
        let named: NamedState = name.parse()?;
        let dims = parse_dims(dims.ok_or_else(|| CliError::Input("--dims is required".into()))?)?;
        return Ok(StateFile::from_pure(&named_state(named, &dims)?));
    }
    let dims = parse_dims(dims.ok_or_else(|| CliError::Input("--dims is required".into()))?)?;
    let kind = match random {
        Some(RandomChoice::HaarPure) => RandomKind::HaarPure,
        Some(RandomChoice::Product) => RandomKind::Product,
        Some(RandomChoice::Mixed) => RandomKind::Mixed {
            rank: rank.unwrap_or(dims.total()),
        },
        None => return Err(CliError::Input("give --name or --random".into())),
    };
    Ok(match random_state(kind, &dims, seed)? {
        SampledState::Pure(s) => StateFile::from_pure(&s),
        SampledState::Mixed(rho) => StateFile::from_mixed(&rho),
    })
}

fn dispatch(command: Command) -> CliResult<Value> {
    match command {
        Command::Measure {
            input,
            which,
            norm,
            breakdown,
            normalize,
        } => cmd_measure(&input, which, norm, breakdown, normalize),
        Command::Separable {
            input,
            tol,
            normalize,
        } => cmd_separable(&input, tol, normalize),
        Command::Generators {
            dims,
            family,
            count_only,
        } => cmd_generators(&dims, family, count_only),
        Command::Roof {
            input,
            restarts,
            iters,
            ensemble,
            seed,
            step_tol,
            norm,
        } => cmd_roof(&input, restarts, iters, ensemble, seed, step_tol, norm),
        Command::Embed {
            factors,
            split,
            out,
        } => cmd_embed(&factors, split, out.as_deref()),
        Command::GenState {
            name,
            random,
            dims,
            seed,
            rank,
            p,
            out,
        } => {
            let file = cmd_gen_state(name.as_deref(), random, dims.as_deref(), seed, rank, p)?;
            match out {
                Some(path) => {
                    write_json(&path, &file)?;
                    Ok(json!({ "written": path.display().to_string() }))
                }
                None => to_value(&file),
            }
        }
    }
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> CliResult<T> + Send,
) -> CliResult<T> {
    match threads {
        Some(0) => Err(CliError::Input("--threads must be >= 1".into())),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Internal(format!("cannot start thread pool: {e}")))?
            .install(f),
        _ => f(),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let outcome = with_threads(cli.threads, move || dispatch(cli.command)).and_then(|value| {
        serde_json::to_string_pretty(&value)
            .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))
    });
    match outcome {
        Ok(text) => match writeln!(out, "{text}") {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "internal error: cannot write report: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}
