//! Experiment CLI: `run` sweeps the (variant, alpha, SNR) grid into a CSV,
//! `summarize` reports trends from a results CSV, `scene` renders and dumps
//! a scene's component WAVs for inspection.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mwf_ic::pipeline::{read_rows, run_experiment, summarize, ExperimentConfig};
use mwf_ic::scene::build_scene;
use mwf_ic::wav::{write_wav, WavFormat};

#[derive(Parser)]
#[command(name = "mwf-ic", about = "Binaural MWF / MWF-IC experiment pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid from a JSON config.
    Run {
        /// Experiment config JSON; defaults apply for missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overrides the config).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads for per-bin solves (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Summarize per-variant trends from a results CSV.
    Summarize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Render a scene and dump its component WAVs.
    Scene {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load_config(path: &Option<PathBuf>) -> mwf_ic::Result<ExperimentConfig> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> mwf_ic::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output, jobs } => {
            if let Some(jobs) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build_global()
                    .map_err(|e| mwf_ic::ToolkitError::Other(e.to_string()))?;
            }
            let mut cfg = load_config(&config)?;
            if let Some(output) = output {
                cfg.output_dir = output;
            }
            let outcome = run_experiment(&cfg)?;
            println!(
                "completed {} cells ({} skipped as already done, {} failed); results in {}",
                outcome.rows.len(),
                outcome.skipped,
                outcome.failures,
                cfg.output_dir.join("results.csv").display()
            );
            Ok(if outcome.failures > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
        }
        Command::Summarize { input } => {
            let rows = read_rows(&input)?;
            let report = summarize(&rows)?;
            for t in &report.trends {
                println!(
                    "{} @ {:+.0} dB: SNR non-increasing: {}; plateau at MWF: {}; \
                     dMSC(max alpha)/dMSC(0) = {:.4}; dITD non-increasing: {}; mean wall {:.0} ms",
                    t.variant,
                    t.input_snr_db,
                    t.snr_non_increasing,
                    t.snr_plateau_matches_mwf,
                    t.msc_ratio_max_alpha_over_alpha0,
                    t.itd_non_increasing,
                    t.mean_wall_ms
                );
            }
            if let Some(ratio) = report.wall_time_ratio_u_over_v {
                println!("wall-time ratio IC_U / IC_V = {ratio:.2}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Scene { config, output } => {
            let cfg = load_config(&config)?;
            let out_dir = output.unwrap_or_else(|| cfg.output_dir.clone());
            std::fs::create_dir_all(&out_dir)?;
            let speech = cfg.load_speech()?;
            let scene = build_scene(&cfg.scenario, &speech, &cfg.geometry, &cfg.stft)?;
            let fs_hz = cfg.stft.sample_rate;
            for (name, signal) in [
                ("direct_early", &scene.direct_early),
                ("late_reverb", &scene.late_reverb),
                ("noise", &scene.noise),
                ("mixture", &scene.mixture),
            ] {
                write_wav(&out_dir.join(format!("{name}.wav")), signal, fs_hz, WavFormat::Float32)?;
            }
            println!("scene components written to {}", out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
