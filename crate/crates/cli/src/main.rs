use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use spike_encoding::bench::{mean_rows, run_benchmark};
use spike_encoding::encoders::{sf, ConverterParams, Encoded, Method};
use spike_encoding::generators::{generate, SignalKind};
use spike_encoding::optimizer::{optimize, SearchSpace};
use spike_encoding::report::{self, RunConfig};

#[derive(Parser)]
#[command(name = "spike-encode", version, about = "Temporal spike encoding, decoding and benchmarking")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key=value config file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    repeats: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write signal_<kind>.csv for one or all benchmark waveforms.
    Generate(GenerateArgs),
    /// Encode a step,amplitude CSV into a step,spike CSV.
    Encode(EncodeArgs),
    /// Decode a step,spike CSV back into a step,amplitude CSV.
    Decode(DecodeArgs),
    /// Search converter parameters for one signal.
    Optimize(OptimizeArgs),
    /// Run the method x signal grid and write reconstruction and summary CSVs.
    Bench(BenchArgs),
    /// Print the summary tables of a finished bench run.
    Report,
}

#[derive(Args)]
struct GeneratorFlags {
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    periods: Option<u32>,
    #[arg(long)]
    noise_std: Option<f64>,
    #[arg(long)]
    trend_slope: Option<f64>,
}

#[derive(Args)]
struct GenerateArgs {
    /// vibration, trended, rectangular, sinusoidal; defaults to the configured signal list.
    #[arg(long)]
    kind: Option<SignalKind>,
    #[command(flatten)]
    generator: GeneratorFlags,
}

#[derive(Args)]
struct ParamsArgs {
    /// lif, sf, pwm or bsa; may be omitted when the params file names it.
    #[arg(long)]
    method: Option<Method>,
    /// key=value params file, as written by `optimize`.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Inline parameter, repeatable: --param threshold=0.15
    #[arg(long = "param", value_name = "KEY=VALUE")]
    inline: Vec<String>,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    params: ParamsArgs,
    #[arg(long)]
    input: PathBuf,
    /// Defaults to <out-dir>/spikes.csv. The normalization record goes next to it with a .norm extension.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    params: ParamsArgs,
    #[arg(long)]
    input: PathBuf,
    /// Normalization record for LIF, PWM and BSA; defaults to the input path with a .norm extension.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Starting level of the SF reconstruction.
    #[arg(long, default_value_t = 0.0)]
    initial_value: f64,
    /// Defaults to <out-dir>/reconstruction.csv.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    method: Method,
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated methods.
    #[arg(long)]
    methods: Option<String>,
    /// Comma-separated signal kinds.
    #[arg(long)]
    signals: Option<String>,
    #[arg(long)]
    bsa_trials: Option<usize>,
    #[command(flatten)]
    generator: GeneratorFlags,
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path).with_context(|| format!("reading config {}", path.display()))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(dir) = &common.out_dir {
        config.out_dir = dir.clone();
    }
    if let Some(trials) = common.trials {
        config.trials = trials;
    }
    if let Some(repeats) = common.repeats {
        config.repeats = repeats;
    }
    Ok(config)
}

fn apply_generator_flags(config: &mut RunConfig, flags: &GeneratorFlags) {
    if let Some(v) = flags.length {
        config.length = v;
    }
    if let Some(v) = flags.periods {
        config.periods = v;
    }
    if let Some(v) = flags.noise_std {
        config.noise_std = v;
    }
    if let Some(v) = flags.trend_slope {
        config.trend_slope = v;
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    report::write_atomic(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn record_path(spikes: &Path) -> PathBuf {
    spikes.with_extension("norm")
}

fn resolve_params(args: &ParamsArgs) -> Result<ConverterParams> {
    let mut text = match &args.params {
        Some(path) => read(path)?,
        None => String::new(),
    };
    for entry in &args.inline {
        if !entry.contains('=') {
            bail!("--param expects KEY=VALUE, got '{entry}'");
        }
        text.push('\n');
        text.push_str(entry);
    }
    // Inline values come last and override file values.
    Ok(report::params_from_text(&text, args.method)?)
}

fn cmd_generate(config: &mut RunConfig, args: &GenerateArgs) -> Result<()> {
    apply_generator_flags(config, &args.generator);
    let kinds = match args.kind {
        Some(kind) => vec![kind],
        None => config.signals.clone(),
    };
    for kind in kinds {
        let signal = generate(&config.generator_spec(kind))?;
        let path = config.out_dir.join(report::signal_file_name(kind));
        write(&path, &report::signal_csv(&signal))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_encode(config: &RunConfig, args: &EncodeArgs) -> Result<()> {
    let params = resolve_params(&args.params)?;
    let signal =
        report::parse_signal_csv(&read(&args.input)?).with_context(|| format!("parsing {}", args.input.display()))?;
    let encoded = params.encode(&signal)?;
    let output = args.output.clone().unwrap_or_else(|| config.out_dir.join("spikes.csv"));
    write(&output, &report::spikes_csv(&encoded.spikes))?;
    if let Some(record) = &encoded.record {
        write(&record_path(&output), &report::record_to_text(record))?;
    }
    println!("{}", output.display());
    Ok(())
}

fn cmd_decode(config: &RunConfig, args: &DecodeArgs) -> Result<()> {
    let params = resolve_params(&args.params)?;
    let spikes =
        report::parse_spikes_csv(&read(&args.input)?).with_context(|| format!("parsing {}", args.input.display()))?;
    let reconstruction = match params {
        ConverterParams::Sf(p) => sf::decode(&spikes, &p, args.initial_value)?,
        _ => {
            let path = args.record.clone().unwrap_or_else(|| record_path(&args.input));
            let record =
                report::record_from_text(&read(&path)?).with_context(|| format!("parsing {}", path.display()))?;
            params.decode(&Encoded { spikes, record: Some(record) })?
        }
    };
    let output = args.output.clone().unwrap_or_else(|| config.out_dir.join("reconstruction.csv"));
    write(&output, &report::signal_csv(&reconstruction))?;
    println!("{}", output.display());
    Ok(())
}

fn cmd_optimize(config: &RunConfig, args: &OptimizeArgs, explicit_trials: Option<usize>) -> Result<()> {
    let signal =
        report::parse_signal_csv(&read(&args.input)?).with_context(|| format!("parsing {}", args.input.display()))?;
    let bench = config.bench_config();
    let space: SearchSpace = bench.space_for(args.method, &signal)?;
    let trials = explicit_trials.unwrap_or_else(|| bench.trials_for(args.method));
    let result = optimize(&signal, &space, trials, config.seed)?;
    let params_path = config.out_dir.join("best_params.txt");
    let trials_path = config.out_dir.join("trials.csv");
    write(&params_path, &report::params_to_text(&result.best_params))?;
    write(&trials_path, &report::trials_csv(&result))?;
    println!("best {} mse={} (trial {})", result.best_params, result.best_mse, result.best_index + 1);
    println!("{}", params_path.display());
    println!("{}", trials_path.display());
    Ok(())
}

fn cmd_bench(config: &mut RunConfig, args: &BenchArgs) -> Result<ExitCode> {
    apply_generator_flags(config, &args.generator);
    if let Some(methods) = &args.methods {
        config.set("methods", methods).map_err(anyhow::Error::msg)?;
    }
    if let Some(signals) = &args.signals {
        config.set("signals", signals).map_err(anyhow::Error::msg)?;
    }
    if let Some(n) = args.bsa_trials {
        config.bsa_trials = n;
    }
    let report = run_benchmark(&config.bench_config())?;
    report::write_bench_outputs(&report, &config.out_dir)?;

    for mean in mean_rows(&report) {
        println!(
            "{:<4} mean mse {:.6}  mean sparsity {:6.2}%  mean encode {:.3} ms",
            mean.method.label(),
            mean.mse,
            mean.sparsity_pct,
            mean.encode_time.as_secs_f64() * 1e3
        );
    }
    if let Some(failed) = report.first_failure() {
        let reason = failed.outcome.as_ref().err().cloned().unwrap_or_default();
        eprintln!("cell {} / {} failed: {reason}", failed.method.label(), failed.signal);
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(config: &RunConfig) -> Result<()> {
    for (title, file) in [
        ("Reconstruction error (MSE)", "reconstruction_error.csv"),
        ("Spike sparsity (%)", "sparsity.csv"),
        ("Median encode time (ms)", "timing.csv"),
        ("Means", "means.csv"),
    ] {
        let text = read(&config.out_dir.join(file))?;
        println!("{title}");
        let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
        let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..columns)
            .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.len().min(12)).max().unwrap_or(0))
            .collect();
        for row in &rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, &w)| {
                    let shown = match cell.parse::<f64>() {
                        Ok(x) if cell.contains('.') => format!("{x:.6}"),
                        _ => cell.to_string(),
                    };
                    format!("{shown:>w$}")
                })
                .collect();
            println!("  {}", cells.join("  "));
        }
        println!();
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut config = load_config(&cli.common)?;
    match &cli.command {
        Command::Generate(args) => cmd_generate(&mut config, args)?,
        Command::Encode(args) => cmd_encode(&config, args)?,
        Command::Decode(args) => cmd_decode(&config, args)?,
        Command::Optimize(args) => cmd_optimize(&config, args, cli.common.trials)?,
        Command::Bench(args) => return cmd_bench(&mut config, args),
        Command::Report => cmd_report(&config)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
