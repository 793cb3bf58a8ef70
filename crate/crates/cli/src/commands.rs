//! Subcommand definitions and execution.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use inar_core::bench::{
    ingest_trace, replay, run_bandwidth_sweep, run_comparison, run_comparison_trace,
    run_quintile_analysis, report_to_csv, quintiles_to_csv, sweep_to_csv, write_records,
    write_trace,
};
use inar_core::calibration::{
    calibrate, uncalibrated_bundle, CalibrateOptions, CalibratedBundle, CalibrationRecord,
    CALREC_SCHEMA,
};
use inar_core::features::{extract, FeatureConfig, RequestDescriptor};
use inar_core::formats::{from_tagged, read_jsonl, to_pretty, DECISION_SCHEMA, DESCRIPTOR_SCHEMA};
use inar_core::pool::PoolConfig;
use inar_core::reference;
use inar_core::sim::workload::generate_workload;
use inar_core::sim::{
    generate_calibration_records, simulate, RecordProtocol, SimContext, SimOptions, TierCostModel,
    TruthConfig, WorkloadSpec,
};
use inar_core::strategies::{select, Strategy, StrategyKind};

use crate::error::CliError;
use crate::manifest::{default_manifest_path, RunManifest};
use crate::settings::{resolve, FlagOverride, Settings};

#[derive(Parser)]
#[command(
    name = "inar",
    version,
    about = "Input-aware edge-cloud routing engine: feature extraction, Pareto routing, calibration, and a deterministic simulation harness"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Settings file (TOML or JSON); overridden by INAR_* env vars and flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Pool config (pool/1); embedded reference pool when omitted.
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Frozen parameter bundle (bundle/1); uncalibrated defaults when omitted.
    #[arg(long)]
    bundle: Option<PathBuf>,
    /// Network bandwidth, Mbps.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Bandwidth guard below which everything stays on the edge, Mbps.
    #[arg(long)]
    guard: Option<f64>,
    /// Minimum predicted-quality gain that justifies offloading.
    #[arg(long)]
    delta_min: Option<f64>,
    /// Run seed (workload, outcomes, latency, energy streams derive from it).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone, Default)]
struct SimConfigArgs {
    /// Hidden outcome-generator config (truth/1); embedded reference when omitted.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Tier cost model (cost/1); embedded reference when omitted.
    #[arg(long)]
    cost: Option<PathBuf>,
    /// Workload spec (workload/1); embedded reference workload when omitted.
    #[arg(long)]
    workload: Option<PathBuf>,
    /// Override the workload's request count.
    #[arg(long)]
    n: Option<usize>,
    /// Accept an unfrozen parameter bundle for report-producing runs.
    #[arg(long)]
    allow_unfrozen: bool,
    /// Replace stochastic latency/energy draws with their means.
    #[arg(long)]
    no_noise: bool,
    /// Manifest output path (defaults to <first output>.manifest.json).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the 10-dimensional request descriptor from an image and question.
    Extract {
        /// PNG or JPEG image.
        image: PathBuf,
        /// UTF-8 question string.
        question: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Route one request and print the decision with its Pareto frontier.
    Route {
        /// PNG or JPEG image (with --question), or use --descriptor.
        #[arg(long, requires = "question", conflicts_with = "descriptor")]
        image: Option<PathBuf>,
        #[arg(long)]
        question: Option<String>,
        /// Previously extracted descriptor document (descriptor/1).
        #[arg(long)]
        descriptor: Option<PathBuf>,
        /// Routing strategy.
        #[arg(long, default_value = "inar")]
        strategy: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fit the open coefficients and freeze a parameter bundle.
    Calibrate {
        /// Labeled records (calrec/1 JSON Lines).
        #[arg(long, conflicts_with = "synthetic")]
        records: Option<PathBuf>,
        /// Generate this many labeled records from the hidden oracle instead.
        #[arg(long)]
        synthetic: Option<usize>,
        /// Seed of the synthetic record set.
        #[arg(long, default_value_t = reference::CAL_SEED)]
        cal_seed: u64,
        /// Record protocol: all models at r_cal, or edge resolution sweep.
        #[arg(long, default_value = "sweep", value_parser = ["sweep", "standard"])]
        protocol: String,
        /// Target edge fraction for the operating point.
        #[arg(long)]
        target: Option<f64>,
        /// Timestamp recorded in the bundle (wall clock when omitted).
        #[arg(long)]
        timestamp: Option<String>,
        /// Output path of the frozen bundle.
        #[arg(long, default_value = "bundle.json")]
        out: PathBuf,
        #[command(flatten)]
        sim: SimConfigArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Simulate a workload under one or all strategies and report.
    Simulate {
        /// Strategy flag or "all" for the full comparison.
        #[arg(long, default_value = "all")]
        strategy: String,
        /// Replicates behind the reported standard deviations.
        #[arg(long)]
        replicates: Option<usize>,
        /// Write the comparison report CSV here (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write per-quintile analysis CSV here.
        #[arg(long)]
        quintiles_out: Option<PathBuf>,
        /// Write per-request execution records here (single strategy only).
        #[arg(long)]
        records_out: Option<PathBuf>,
        /// Export the run as a replay trace (replay/1 JSON Lines).
        #[arg(long)]
        export_trace: Option<PathBuf>,
        #[command(flatten)]
        sim: SimConfigArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Re-score a correctness trace under one or all strategies.
    Replay {
        /// Replay trace (replay/1 JSON Lines).
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value = "all")]
        strategy: String,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        quintiles_out: Option<PathBuf>,
        #[command(flatten)]
        sim: SimConfigArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sweep bandwidth and report latency, edge fraction, and accuracy.
    Sweep {
        #[arg(long, default_value = "inar")]
        strategy: String,
        /// Comma-separated bandwidths in Mbps.
        #[arg(long, default_value = "10,15,20,50,100,300,1000", value_delimiter = ',')]
        bandwidths: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        sim: SimConfigArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract { image, question, common } => cmd_extract(&image, &question, &common),
        Command::Route { image, question, descriptor, strategy, common } => {
            cmd_route(image.as_deref(), question.as_deref(), descriptor.as_deref(), &strategy, &common)
        }
        Command::Calibrate {
            records,
            synthetic,
            cal_seed,
            protocol,
            target,
            timestamp,
            out,
            sim,
            common,
        } => cmd_calibrate(
            records.as_deref(),
            synthetic,
            cal_seed,
            &protocol,
            target,
            timestamp,
            &out,
            &sim,
            &common,
        ),
        Command::Simulate {
            strategy,
            replicates,
            report,
            quintiles_out,
            records_out,
            export_trace,
            sim,
            common,
        } => cmd_simulate(
            &strategy,
            replicates,
            report.as_deref(),
            quintiles_out.as_deref(),
            records_out.as_deref(),
            export_trace.as_deref(),
            &sim,
            &common,
        ),
        Command::Replay { trace, strategy, report, quintiles_out, sim, common } => {
            cmd_replay(&trace, &strategy, report.as_deref(), quintiles_out.as_deref(), &sim, &common)
        }
        Command::Sweep { strategy, bandwidths, out, sim, common } => {
            cmd_sweep(&strategy, &bandwidths, out.as_deref(), &sim, &common)
        }
    }
}

fn resolve_settings(common: &CommonArgs, replicates: Option<usize>) -> Result<Settings, CliError> {
    resolve(
        common.config.as_deref(),
        &FlagOverride {
            bandwidth_mbps: common.bandwidth,
            guard_mbps: common.guard,
            delta_min: common.delta_min,
            seed: common.seed,
            replicates,
            target_edge_fraction: None,
        },
    )
}

fn load_pool(path: Option<&Path>) -> Result<PoolConfig, CliError> {
    match path {
        Some(p) => Ok(PoolConfig::load(p)?),
        None => Ok(PoolConfig::reference()),
    }
}

fn load_bundle(path: Option<&Path>, pool: &PoolConfig) -> Result<CalibratedBundle, CliError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
            let bundle = CalibratedBundle::from_json(&text)?;
            if bundle.frozen && !bundle.hash_is_valid() {
                return Err(CliError::validation(format!(
                    "{}: content hash does not match the bundle payload",
                    p.display()
                )));
            }
            Ok(bundle)
        }
        None => Ok(uncalibrated_bundle(pool)),
    }
}

fn load_truth(path: Option<&Path>) -> Result<TruthConfig, CliError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
            Ok(TruthConfig::parse(&text)?)
        }
        None => Ok(TruthConfig::reference()),
    }
}

fn load_cost(path: Option<&Path>) -> Result<TierCostModel, CliError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
            Ok(TierCostModel::parse(&text)?)
        }
        None => Ok(TierCostModel::reference()),
    }
}

fn load_workload(path: Option<&Path>, n: Option<usize>) -> Result<WorkloadSpec, CliError> {
    let mut spec = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
            WorkloadSpec::parse(&text)?
        }
        None => reference::eval_workload(),
    };
    if let Some(n) = n {
        spec.n_requests = n;
    }
    Ok(spec)
}

fn parse_strategy(flag: &str) -> Result<Strategy, CliError> {
    StrategyKind::from_flag(flag)
        .map(Strategy::new)
        .ok_or_else(|| {
            CliError::validation(format!(
                "unknown strategy '{flag}' (expected edge, cloud, inar, text, image, static, oracle)"
            ))
        })
}

fn strategy_set(flag: &str) -> Result<Vec<Strategy>, CliError> {
    if flag == "all" {
        Ok(StrategyKind::ALL.map(Strategy::new).to_vec())
    } else {
        Ok(vec![parse_strategy(flag)?])
    }
}

fn require_frozen(bundle: &CalibratedBundle, allow_unfrozen: bool) -> Result<(), CliError> {
    if !bundle.frozen && !allow_unfrozen {
        return Err(CliError::validation(
            "parameter bundle is not frozen; calibrate first or pass --allow-unfrozen".into(),
        ));
    }
    Ok(())
}

/// Context assembly shared by simulate/replay/sweep.
struct Harness {
    ctx: SimContext,
    settings: Settings,
    manifest: RunManifest,
}

fn build_harness(
    command: &str,
    common: &CommonArgs,
    sim: &SimConfigArgs,
    replicates: Option<usize>,
    workload_seed: u64,
) -> Result<Harness, CliError> {
    let settings = resolve_settings(common, replicates)?;
    let pool = load_pool(common.pool.as_deref())?;
    let bundle = load_bundle(common.bundle.as_deref(), &pool)?;
    require_frozen(&bundle, sim.allow_unfrozen)?;
    let truth = load_truth(sim.truth.as_deref())?;
    let cost = load_cost(sim.cost.as_deref())?;

    let mut manifest = RunManifest::new(command, &settings, workload_seed);
    manifest.record_config("pool", common.pool.as_deref(), &pool)?;
    manifest.bundle_hash = if bundle.frozen {
        bundle.content_hash.clone()
    } else {
        bundle.compute_hash()
    };
    manifest.truth_hash = manifest.record_config("truth", sim.truth.as_deref(), &truth)?;
    manifest.record_config("cost", sim.cost.as_deref(), &cost)?;

    let mut ctx = SimContext::new(&pool, &bundle, truth, cost, settings.network());
    ctx.params.delta_min = settings.delta_min;
    Ok(Harness { ctx, settings, manifest })
}

fn write_or_print(path: Option<&Path>, content: &str) -> Result<Option<PathBuf>, CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, content).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
            Ok(Some(p.to_path_buf()))
        }
        None => {
            print!("{content}");
            Ok(None)
        }
    }
}

fn finish_manifest(
    manifest: &RunManifest,
    explicit: Option<&Path>,
    primary_output: Option<&Path>,
) -> Result<(), CliError> {
    match (explicit, primary_output) {
        (Some(p), _) => manifest.write(p),
        (None, Some(out)) => manifest.write(&default_manifest_path(out)),
        (None, None) => {
            eprintln!("note: pass --report/--out or --manifest to persist the run manifest");
            Ok(())
        }
    }
}

fn cmd_extract(image: &Path, question: &str, common: &CommonArgs) -> Result<(), CliError> {
    let settings = resolve_settings(common, None)?;
    let _ = settings;
    let pool = load_pool(common.pool.as_deref())?;
    let bundle = load_bundle(common.bundle.as_deref(), &pool)?;
    let mut cfg = FeatureConfig::default();
    cfg.text.beta = bundle.beta;
    let bytes =
        std::fs::read(image).map_err(|e| CliError::io(format!("{}: {e}", image.display())))?;
    let extraction = extract(&bytes, question, &cfg)?;
    println!("{}", to_pretty(DESCRIPTOR_SCHEMA, &extraction.descriptor));
    eprintln!("extracted in {:.2} ms", extraction.elapsed_ms);
    Ok(())
}

fn cmd_route(
    image: Option<&Path>,
    question: Option<&str>,
    descriptor: Option<&Path>,
    strategy: &str,
    common: &CommonArgs,
) -> Result<(), CliError> {
    let settings = resolve_settings(common, None)?;
    let pool = load_pool(common.pool.as_deref())?;
    let bundle = load_bundle(common.bundle.as_deref(), &pool)?;
    let strategy = parse_strategy(strategy)?;
    if strategy.kind == StrategyKind::Oracle {
        return Err(CliError::validation(
            "the oracle needs per-model outcomes; it cannot route live requests".into(),
        ));
    }

    let desc: RequestDescriptor = match (image, question, descriptor) {
        (Some(img), Some(q), None) => {
            let mut cfg = FeatureConfig::default();
            cfg.text.beta = bundle.beta;
            let bytes =
                std::fs::read(img).map_err(|e| CliError::io(format!("{}: {e}", img.display())))?;
            extract(&bytes, q, &cfg)?.descriptor
        }
        (None, None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            from_tagged(DESCRIPTOR_SCHEMA, &text)?
        }
        _ => {
            return Err(CliError::validation(
                "provide either --image with --question, or --descriptor".into(),
            ))
        }
    };

    let routed_pool = bundle.apply_to_pool(&pool);
    let mut params = bundle.router_params(&inar_core::router::RouterParams::default());
    params.delta_min = settings.delta_min;
    let features = inar_core::features::FeatureVector {
        image: [desc.image.s_blur, desc.image.s_exp, desc.image.s_art, desc.image.s_detail],
        text: desc.text.axes,
    };
    let decision = select(
        &strategy,
        &features,
        &routed_pool,
        &settings.network(),
        &params,
        bundle.beta,
        inar_core::features::FusionWeights::default(),
    )?;
    println!("{}", to_pretty(DECISION_SCHEMA, &decision));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_calibrate(
    records_path: Option<&Path>,
    synthetic: Option<usize>,
    cal_seed: u64,
    protocol: &str,
    target: Option<f64>,
    timestamp: Option<String>,
    out: &Path,
    sim: &SimConfigArgs,
    common: &CommonArgs,
) -> Result<(), CliError> {
    let settings = resolve_settings(common, None)?;
    let pool = load_pool(common.pool.as_deref())?;
    let truth = load_truth(sim.truth.as_deref())?;

    let records: Vec<CalibrationRecord> = match (records_path, synthetic) {
        (Some(path), None) => read_jsonl(path, CALREC_SCHEMA)?,
        (None, n) => {
            let count = n.unwrap_or(reference::CAL_N);
            let mut spec = reference::calibration_workload();
            spec.seed = cal_seed;
            spec.n_requests = count;
            let proto = if protocol == "sweep" {
                RecordProtocol::ResolutionSweep
            } else {
                RecordProtocol::Standard
            };
            generate_calibration_records(&spec, &pool, &truth, cal_seed, proto)?
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    let tau_spec = load_workload(sim.workload.as_deref(), sim.n)?;
    let tau_features: Vec<_> = generate_workload(&tau_spec)?
        .iter()
        .map(|r| r.features)
        .collect();

    let opts = CalibrateOptions {
        seed: cal_seed,
        timestamp,
        network: settings.network(),
        target_edge_fraction: target.unwrap_or(settings.target_edge_fraction),
        ..Default::default()
    };
    let bundle = calibrate(&records, &pool, &tau_features, &opts)?;
    std::fs::write(out, bundle.to_json())
        .map_err(|e| CliError::io(format!("{}: {e}", out.display())))?;
    eprintln!(
        "frozen bundle written to {} (records {}, tau_edge {:.4}, hash {})",
        out.display(),
        records.len(),
        bundle.tau_edge,
        bundle.content_hash
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    strategy: &str,
    replicates: Option<usize>,
    report_path: Option<&Path>,
    quintiles_path: Option<&Path>,
    records_path: Option<&Path>,
    trace_path: Option<&Path>,
    sim: &SimConfigArgs,
    common: &CommonArgs,
) -> Result<(), CliError> {
    let spec = load_workload(sim.workload.as_deref(), sim.n)?;
    let harness = build_harness("simulate", common, sim, replicates, spec.seed)?;
    let strategies = strategy_set(strategy)?;

    if strategies.len() == 1 {
        // Single-strategy run: one replicate, optional record/trace export.
        let requests = generate_workload(&spec)?;
        let opts = SimOptions {
            seed: harness.settings.seed,
            disable_noise: sim.no_noise,
        };
        let records = simulate(&requests, &strategies[0], &harness.ctx, &opts)?;
        if let Some(path) = records_path {
            write_records(path, &records)?;
        }
        if let Some(path) = trace_path {
            let trace = inar_core::bench::export_trace(&requests, &harness.ctx, opts.seed)?;
            write_trace(path, &trace)?;
        }
        let report = run_comparison_trace(
            &inar_core::bench::export_trace(&requests, &harness.ctx, opts.seed)?,
            &strategies,
            &harness.ctx,
            opts.seed,
        )?;
        let primary = write_or_print(report_path, &report_to_csv(&report))?;
        if let Some(path) = quintiles_path {
            std::fs::write(path, quintiles_to_csv(&run_quintile_analysis(&records)))
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        }
        let primary = primary.or_else(|| records_path.map(Path::to_path_buf));
        finish_manifest(&harness.manifest, sim.manifest.as_deref(), primary.as_deref())?;
        return Ok(());
    }

    if records_path.is_some() {
        return Err(CliError::validation(
            "--records-out needs a single --strategy (records of one run, not a comparison)".into(),
        ));
    }
    let report = run_comparison(
        &spec,
        &strategies,
        &harness.ctx,
        harness.settings.replicates,
        harness.settings.seed,
    )?;
    let primary = write_or_print(report_path, &report_to_csv(&report))?;
    if let Some(path) = quintiles_path {
        std::fs::write(path, quintiles_to_csv(&report.quintiles))
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = trace_path {
        let requests = generate_workload(&spec)?;
        let trace = inar_core::bench::export_trace(&requests, &harness.ctx, harness.settings.seed)?;
        write_trace(path, &trace)?;
    }
    finish_manifest(&harness.manifest, sim.manifest.as_deref(), primary.as_deref())?;
    Ok(())
}

fn cmd_replay(
    trace_path: &Path,
    strategy: &str,
    report_path: Option<&Path>,
    quintiles_path: Option<&Path>,
    sim: &SimConfigArgs,
    common: &CommonArgs,
) -> Result<(), CliError> {
    let harness = build_harness("replay", common, sim, None, 0)?;
    let trace = ingest_trace(trace_path, &harness.ctx.pool)?;
    eprintln!("ingested {} replay records from {}", trace.records.len(), trace_path.display());
    let strategies = strategy_set(strategy)?;
    let report = run_comparison_trace(&trace, &strategies, &harness.ctx, harness.settings.seed)?;
    let primary = write_or_print(report_path, &report_to_csv(&report))?;
    if let Some(path) = quintiles_path {
        if strategies.len() == 1 {
            let opts = SimOptions { seed: harness.settings.seed, disable_noise: sim.no_noise };
            let records = replay(&trace, &strategies[0], &harness.ctx, &opts)?;
            std::fs::write(path, quintiles_to_csv(&run_quintile_analysis(&records)))
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        } else {
            std::fs::write(path, quintiles_to_csv(&report.quintiles))
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        }
    }
    finish_manifest(&harness.manifest, sim.manifest.as_deref(), primary.as_deref())?;
    Ok(())
}

fn cmd_sweep(
    strategy: &str,
    bandwidths: &[f64],
    out: Option<&Path>,
    sim: &SimConfigArgs,
    common: &CommonArgs,
) -> Result<(), CliError> {
    if bandwidths.is_empty() || bandwidths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::validation("bandwidths must be a strictly ascending list".into()));
    }
    let spec = load_workload(sim.workload.as_deref(), sim.n)?;
    let harness = build_harness("sweep", common, sim, None, spec.seed)?;
    let strategy = parse_strategy(strategy)?;
    let opts = SimOptions { seed: harness.settings.seed, disable_noise: sim.no_noise };
    let rows = run_bandwidth_sweep(&spec, &strategy, bandwidths, &harness.ctx, &opts)?;
    let primary = write_or_print(out, &sweep_to_csv(&rows))?;
    finish_manifest(&harness.manifest, sim.manifest.as_deref(), primary.as_deref())?;
    Ok(())
}
