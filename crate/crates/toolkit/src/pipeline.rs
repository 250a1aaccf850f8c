//! End-to-end experiment runner: scene construction, oracle estimation,
//! per-bin solves over the (variant, alpha, SNR) grid, shadow-filtered
//! metrics and a flat CSV that any plotting tool can consume.

use std::collections::HashSet;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mwf_ic_core::{
    solve_bin, BinProblem, CMat, FilterPair, SelectorPair, SolveConfig, Variant,
};

use crate::metrics::{
    cepstral_distance, delta_itd, delta_msc, output_snr, shadow_filter, Ear, ShadowOutputs,
};
use crate::scene::{
    build_scene, early_impulse_responses, ArrayGeometry, NoiseSource, ScenarioSpec,
    SceneComponents,
};
use crate::spectral::{
    active_bins, compute_rtf, diffuse_coherence, oracle_psd_all, speech_psd_and_phi_d,
    undesired_psd,
};
use crate::speech::synthetic_speech;
use crate::stft::{analyze, StftConfig};
use crate::wav::{read_mono_wav, write_wav, WavFormat};
use crate::{Result, ToolkitError};

/// Relative diagonal ridge added to the oracle undesired PSD (see
/// `prepare_scene`).
const SENSOR_NOISE_FLOOR: f64 = 1e-5;

pub const CSV_HEADER: &str = "variant,alpha,input_snr_db,snr_out_worse_db,snr_out_better_db,delta_msc,delta_itd_us,cd_worse,solver_iters,wall_ms,converged_bins,total_bins";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantSel {
    Mwf,
    IcU,
    IcV,
}

impl VariantSel {
    pub fn to_core(self) -> Variant {
        match self {
            VariantSel::Mwf => Variant::Mwf,
            VariantSel::IcU => Variant::IcU,
            VariantSel::IcV => Variant::IcV,
        }
    }
}

fn default_alpha_grid() -> Vec<f64> {
    // 0 plus a 17-point log grid from 1e-4 to 1e4
    let mut grid = vec![0.0];
    for i in 0..17 {
        grid.push(10f64.powf(-4.0 + i as f64 * 0.5));
    }
    grid
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    pub stft: StftConfig,
    pub geometry: ArrayGeometry,
    pub alpha_grid: Vec<f64>,
    pub variants: Vec<VariantSel>,
    pub snr_list_db: Vec<f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Mono speech WAV; when absent the bundled synthetic asset is used.
    pub speech_wav: Option<PathBuf>,
    pub speech_duration_s: f64,
    /// Alphas for which binaural output WAVs are written.
    pub wav_dump_alphas: Vec<f64>,
    pub solver_max_iters: usize,
    pub solver_grad_tol: f64,
    /// Try selector and zero inits in addition to the closed-form warm
    /// start and keep the lowest-cost local minimum. Slower but avoids
    /// basin-dependent artifacts in the high-alpha cells.
    pub solver_multi_start: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: ScenarioSpec::default(),
            stft: StftConfig::default(),
            geometry: ArrayGeometry::default(),
            alpha_grid: default_alpha_grid(),
            variants: vec![VariantSel::IcU, VariantSel::IcV],
            snr_list_db: vec![0.0, 5.0, 10.0, 20.0, 50.0],
            output_dir: PathBuf::from("results"),
            seed: 1,
            speech_wav: None,
            speech_duration_s: 2.7,
            wav_dump_alphas: vec![0.0, 100.0],
            solver_max_iters: 2000,
            solver_grad_tol: 1e-8,
            solver_multi_start: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.stft.validate()?;
        if self.alpha_grid.is_empty() || self.alpha_grid.iter().any(|&a| a < 0.0) {
            return Err(ToolkitError::InvalidConfig("alpha grid must be non-empty, >= 0".into()));
        }
        if self.variants.is_empty() || self.snr_list_db.is_empty() {
            return Err(ToolkitError::InvalidConfig("variants and SNR list must be non-empty".into()));
        }
        Ok(())
    }

    pub fn load_speech(&self) -> Result<Vec<f64>> {
        match &self.speech_wav {
            Some(path) => read_mono_wav(path, self.stft.sample_rate),
            None => Ok(synthetic_speech(self.speech_duration_s, self.stft.sample_rate, 42)),
        }
    }

    fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            max_iters: self.solver_max_iters,
            grad_tol: self.solver_grad_tol,
            multi_start: self.solver_multi_start,
            ..SolveConfig::default()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub variant: String,
    pub alpha: f64,
    pub input_snr_db: f64,
    pub snr_out_worse_db: f64,
    pub snr_out_better_db: f64,
    pub delta_msc: f64,
    pub delta_itd_us: f64,
    pub cd_worse: f64,
    pub solver_iters: u64,
    pub wall_ms: u64,
    pub converged_bins: usize,
    pub total_bins: usize,
}

impl ResultRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.8},{:.3},{:.6},{},{},{},{}",
            self.variant,
            self.alpha,
            self.input_snr_db,
            self.snr_out_worse_db,
            self.snr_out_better_db,
            self.delta_msc,
            self.delta_itd_us,
            self.cd_worse,
            self.solver_iters,
            self.wall_ms,
            self.converged_bins,
            self.total_bins
        )
    }

    pub fn parse_csv(line: &str) -> Option<ResultRow> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return None;
        }
        Some(ResultRow {
            variant: fields[0].to_string(),
            alpha: fields[1].parse().ok()?,
            input_snr_db: fields[2].parse().ok()?,
            snr_out_worse_db: fields[3].parse().ok()?,
            snr_out_better_db: fields[4].parse().ok()?,
            delta_msc: fields[5].parse().ok()?,
            delta_itd_us: fields[6].parse().ok()?,
            cd_worse: fields[7].parse().ok()?,
            solver_iters: fields[8].parse().ok()?,
            wall_ms: fields[9].parse().ok()?,
            converged_bins: fields[10].parse().ok()?,
            total_bins: fields[11].parse().ok()?,
        })
    }

    fn cell_key(variant: &str, alpha: f64, snr: f64) -> String {
        format!("{variant}|{alpha:.10e}|{snr:.6}")
    }
}

/// Everything computed once per scene: oracle PSDs, RTFs and the per-bin
/// problem ingredients shared by all (variant, alpha) cells.
pub struct SceneOracle {
    pub components: SceneComponents,
    pub phi_x: Vec<CMat>,
    pub phi_y: Vec<CMat>,
    pub phi_u: Vec<CMat>,
    pub phi_v: Vec<CMat>,
    pub rtf_left: Vec<Vec<num_complex::Complex64>>,
    pub rtf_right: Vec<Vec<num_complex::Complex64>>,
    pub phi_x_left: Vec<f64>,
    pub phi_x_right: Vec<f64>,
    pub active: Vec<bool>,
    pub worse_channel: usize,
    pub worse_ear: Ear,
}

/// Builds the scene and all oracle quantities for one SNR point.
pub fn prepare_scene(
    spec: &ScenarioSpec,
    speech: &[f64],
    geometry: &ArrayGeometry,
    config: &StftConfig,
) -> Result<SceneOracle> {
    let components = build_scene(spec, speech, geometry, config)?;
    let direct_tensor = analyze(&components.direct_early, config)?;
    let late_tensor = analyze(&components.late_reverb, config)?;
    let noise_tensor = analyze(&components.noise, config)?;

    let irs = early_impulse_responses(
        spec.speech_source.azimuth_deg,
        spec.speech_source.distance_m,
        geometry,
        config.sample_rate,
        0.050,
    )?;
    let (rtf_left, rtf_right, rtf_degenerate) = compute_rtf(&irs, geometry, config)?;

    let gammas = diffuse_coherence(geometry, config);
    let mut phi_v = oracle_psd_all(&noise_tensor)?;
    let (phi_x_left, _phi_x_right_measured, phi_d) =
        speech_psd_and_phi_d(&direct_tensor, &late_tensor, &gammas, geometry)?;
    // Right-ear speech PSD derived through the RTF rather than measured:
    // phi_X_R = phi_X_L |a_L[M]|^2 keeps the rank-one speech model exactly
    // consistent across ears, so the closed form is a true stationary point
    // of the quadratic cost even in ill-conditioned low bins.
    let ref_right = geometry.reference_index_right();
    let phi_x_right: Vec<f64> = phi_x_left
        .iter()
        .zip(rtf_left.iter())
        .map(|(&p, a)| p * a[ref_right].norm_sqr())
        .collect();

    let bins = config.num_bins();
    let mut phi_x = Vec::with_capacity(bins);
    let mut phi_y = Vec::with_capacity(bins);
    let mut phi_u = Vec::with_capacity(bins);
    let n = geometry.num_channels();
    for k in 0..bins {
        let x = CMat::scaled_outer(&rtf_left[k], phi_x_left[k]);
        let mut u = undesired_psd(phi_d[k], &gammas[k], &phi_v[k])?;
        // Sensor self-noise floor, -50 dB of the mean undesired power per
        // channel, modeled as part of the noise PSD (and therefore inherited
        // by the undesired PSD). At low frequencies the coherence model plus
        // a single point source leaves Phi_u with eigenvalues near the f64
        // noise floor; a rank-1 point noise does the same to Phi_v at every
        // frequency. Without this ridge the per-bin quadratic is a flat
        // valley, the coherence penalty is ill-conditioned, and the filters
        // are meaninglessly ill-determined.
        let ridge = SENSOR_NOISE_FLOOR * u.trace().re / n as f64;
        for i in 0..n {
            u[(i, i)] += num_complex::Complex64::new(ridge, 0.0);
            phi_v[k][(i, i)] += num_complex::Complex64::new(ridge, 0.0);
        }
        let mut y = x.add(&u);
        y.hermitian_symmetrize();
        phi_x.push(x);
        phi_y.push(y);
        phi_u.push(u);
    }

    let mut active = active_bins(&phi_x_left);
    for (a, d) in active.iter_mut().zip(rtf_degenerate.iter()) {
        if *d {
            *a = false;
        }
    }

    let worse_channel = spec.worse_ear_channel(geometry);
    let worse_ear = if worse_channel == geometry.reference_index_left() {
        Ear::Left
    } else {
        Ear::Right
    };

    Ok(SceneOracle {
        components,
        phi_x,
        phi_y,
        phi_u,
        phi_v,
        rtf_left,
        rtf_right,
        phi_x_left,
        phi_x_right,
        active,
        worse_channel,
        worse_ear,
    })
}

impl SceneOracle {
    /// Per-bin problems for one (variant, alpha) cell; None for inactive bins.
    pub fn bin_problems(&self, variant: Variant, alpha: f64) -> Result<Vec<Option<BinProblem>>> {
        (0..self.phi_x.len())
            .map(|k| {
                if !self.active[k] {
                    return Ok(None);
                }
                let p = BinProblem::new(
                    self.phi_x[k].clone(),
                    self.phi_y[k].clone(),
                    self.phi_u[k].clone(),
                    self.phi_v[k].clone(),
                    self.rtf_left[k].clone(),
                    self.rtf_right[k].clone(),
                    self.phi_x_left[k],
                    self.phi_x_right[k],
                    alpha,
                    variant,
                )?;
                Ok(Some(p))
            })
            .collect()
    }
}

pub struct CellOutcome {
    pub filters: Vec<FilterPair>,
    pub shadow: ShadowOutputs,
    pub row: ResultRow,
}

/// Solves one (variant, alpha) cell against a prepared scene and computes
/// its metric row. Bins are solved in parallel; results are identical to a
/// sequential run (no cross-bin coupling).
pub fn run_cell(
    oracle: &SceneOracle,
    variant: Variant,
    alpha: f64,
    input_snr_db: f64,
    geometry: &ArrayGeometry,
    config: &StftConfig,
    noise_band_hz: f64,
    diffuse_noise: bool,
    solve_config: &SolveConfig,
) -> Result<CellOutcome> {
    let started = Instant::now();
    let problems = oracle.bin_problems(variant, alpha)?;
    let passthrough = SelectorPair::new(geometry.num_channels()).filters();
    let solved: Vec<(FilterPair, u64, bool)> = problems
        .par_iter()
        .map(|p| match p {
            None => (passthrough.clone(), 0, true),
            Some(p) => {
                let report = solve_bin(p, solve_config);
                (report.filters, report.iterations as u64, report.converged)
            }
        })
        .collect();
    let filters: Vec<FilterPair> = solved.iter().map(|(f, _, _)| f.clone()).collect();
    let solver_iters: u64 = solved.iter().map(|(_, it, _)| it).sum();
    let total_bins = oracle.active.iter().filter(|a| **a).count();
    let converged_bins = solved
        .iter()
        .zip(oracle.active.iter())
        .filter(|((_, _, conv), active)| **active && *conv)
        .count();

    let shadow = shadow_filter(&oracle.components, &filters, config)?;

    let ref_l = geometry.reference_index_left();
    let ref_r = geometry.reference_index_right();
    let noise_in = [
        oracle.components.noise[ref_l].clone(),
        oracle.components.noise[ref_r].clone(),
    ];
    let noise_out = [shadow.noise[0].clone(), shadow.noise[1].clone()];

    let band = if diffuse_noise { (0.0, 8000.0_f64) } else { (0.0, noise_band_hz) };
    let band = (band.0, band.1.min(config.sample_rate as f64 / 2.0));
    let (dmsc, _skipped) = delta_msc(&noise_out, &noise_in, config, band)?;
    let ditd = delta_itd(&noise_out, &noise_in, config.sample_rate, 1500.0, 1.0)
        .unwrap_or(f64::NAN);

    // WOLA resynthesis is up to one hop shorter than the scene; compare
    // over the common prefix.
    let shadow_total = &shadow.total[oracle.worse_ear.channel()];
    let cd = cepstral_distance(
        &oracle.components.direct_early[oracle.worse_channel][..shadow_total.len()],
        shadow_total,
        config,
    )?;

    let (worse, better) = match oracle.worse_ear {
        Ear::Left => (Ear::Left, Ear::Right),
        Ear::Right => (Ear::Right, Ear::Left),
    };
    let row = ResultRow {
        variant: variant.label().to_string(),
        alpha,
        input_snr_db,
        snr_out_worse_db: output_snr(&shadow, worse),
        snr_out_better_db: output_snr(&shadow, better),
        delta_msc: dmsc,
        delta_itd_us: ditd,
        cd_worse: cd,
        solver_iters,
        wall_ms: started.elapsed().as_millis() as u64,
        converged_bins,
        total_bins,
    };
    Ok(CellOutcome { filters, shadow, row })
}

pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub failures: usize,
    pub skipped: usize,
}

/// Runs the full grid. Completed (variant, alpha, SNR) cells already in the
/// output CSV are skipped; per-cell failures are recorded and the run
/// continues.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let speech = config.load_speech()?;
    fs::create_dir_all(&config.output_dir)?;
    let csv_path = config.output_dir.join("results.csv");

    let mut completed: HashSet<String> = HashSet::new();
    let mut rows: Vec<ResultRow> = Vec::new();
    if csv_path.exists() {
        for line in fs::read_to_string(&csv_path)?.lines().skip(1) {
            if let Some(row) = ResultRow::parse_csv(line) {
                completed.insert(ResultRow::cell_key(&row.variant, row.alpha, row.input_snr_db));
                rows.push(row);
            }
        }
    } else {
        fs::write(&csv_path, format!("{CSV_HEADER}\n"))?;
    }
    let mut csv = fs::OpenOptions::new().append(true).open(&csv_path)?;

    let diffuse = matches!(config.scenario.noise_source, NoiseSource::Diffuse);
    let solve_config = config.solve_config();
    let mut failures = 0usize;
    let mut skipped = 0usize;

    for &snr in &config.snr_list_db {
        let mut spec = config.scenario.clone();
        spec.input_snr_db = snr;
        spec.seed = config.seed;
        let oracle = prepare_scene(&spec, &speech, &config.geometry, &config.stft)?;
        for &variant_sel in &config.variants {
            let variant = variant_sel.to_core();
            for &alpha in &config.alpha_grid {
                let key = ResultRow::cell_key(variant.label(), alpha, snr);
                if completed.contains(&key) {
                    skipped += 1;
                    continue;
                }
                match run_cell(
                    &oracle,
                    variant,
                    alpha,
                    snr,
                    &config.geometry,
                    &config.stft,
                    config.scenario.noise_bandwidth_hz,
                    diffuse,
                    &solve_config,
                ) {
                    Ok(outcome) => {
                        writeln!(csv, "{}", outcome.row.to_csv())?;
                        csv.flush()?;
                        if config.wav_dump_alphas.iter().any(|&a| a == alpha) {
                            let name = format!(
                                "out_{}_snr{:+.0}dB_alpha{}.wav",
                                variant.label(),
                                snr,
                                alpha
                            );
                            write_wav(
                                &config.output_dir.join(name),
                                &outcome.shadow.total,
                                config.stft.sample_rate,
                                WavFormat::Float32,
                            )?;
                        }
                        rows.push(outcome.row);
                        completed.insert(key);
                    }
                    Err(err) => {
                        eprintln!("cell {} alpha={alpha} snr={snr} failed: {err}", variant.label());
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(ExperimentOutcome { rows, failures, skipped })
}

/// Per-variant trend verdicts over an alpha sweep.
#[derive(Debug, Clone, Serialize)]
pub struct VariantTrend {
    pub variant: String,
    pub input_snr_db: f64,
    pub snr_non_increasing: bool,
    pub snr_plateau_matches_mwf: bool,
    pub msc_ratio_max_alpha_over_alpha0: f64,
    pub itd_non_increasing: bool,
    pub mean_wall_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub trends: Vec<VariantTrend>,
    /// IC_U over IC_V mean wall time, when both are present.
    pub wall_time_ratio_u_over_v: Option<f64>,
}

/// Monotonicity and plateau statistics per (variant, SNR) group.
pub fn summarize(rows: &[ResultRow]) -> Result<TrendReport> {
    let mut groups: Vec<(String, f64)> = rows
        .iter()
        .map(|r| (r.variant.clone(), r.input_snr_db))
        .collect();
    groups.sort_by(|a, b| a.partial_cmp(b).unwrap());
    groups.dedup();

    let mut trends = Vec::new();
    for (variant, snr) in groups {
        let mut sweep: Vec<&ResultRow> = rows
            .iter()
            .filter(|r| r.variant == variant && r.input_snr_db == snr)
            .collect();
        sweep.sort_by(|a, b| a.alpha.partial_cmp(&b.alpha).unwrap());
        if sweep.len() < 3 {
            return Err(ToolkitError::InvalidConfig(format!(
                "summarize needs >= 3 alpha values per sweep, {variant}@{snr} dB has {}",
                sweep.len()
            )));
        }
        let snr_non_increasing = sweep
            .windows(2)
            .all(|w| w[1].snr_out_worse_db <= w[0].snr_out_worse_db + 0.5);
        // plateau: smallest nonzero alpha within 0.1 dB of the alpha=0 cell
        let alpha0 = sweep.iter().find(|r| r.alpha == 0.0);
        let smallest_nonzero = sweep.iter().find(|r| r.alpha > 0.0);
        let snr_plateau_matches_mwf = match (alpha0, smallest_nonzero) {
            (Some(a), Some(b)) => (a.snr_out_worse_db - b.snr_out_worse_db).abs() <= 0.1,
            _ => true,
        };
        let msc_ratio = match (alpha0, sweep.last()) {
            (Some(a), Some(b)) if a.delta_msc > 0.0 => b.delta_msc / a.delta_msc,
            _ => f64::NAN,
        };
        let itd_non_increasing = sweep
            .windows(2)
            .all(|w| w[1].delta_itd_us <= w[0].delta_itd_us + 10.0);
        let mean_wall_ms =
            sweep.iter().map(|r| r.wall_ms as f64).sum::<f64>() / sweep.len() as f64;
        trends.push(VariantTrend {
            variant,
            input_snr_db: snr,
            snr_non_increasing,
            snr_plateau_matches_mwf,
            msc_ratio_max_alpha_over_alpha0: msc_ratio,
            itd_non_increasing,
            mean_wall_ms,
        });
    }

    let mean_for = |label: &str| -> Option<f64> {
        let xs: Vec<f64> = trends
            .iter()
            .filter(|t| t.variant == label)
            .map(|t| t.mean_wall_ms)
            .collect();
        if xs.is_empty() {
            None
        } else {
            Some(xs.iter().sum::<f64>() / xs.len() as f64)
        }
    };
    let wall_time_ratio_u_over_v = match (mean_for("IC_U"), mean_for("IC_V")) {
        (Some(u), Some(v)) if v > 0.0 => Some(u / v),
        _ => None,
    };
    Ok(TrendReport { trends, wall_time_ratio_u_over_v })
}

pub fn read_rows(path: &std::path::Path) -> Result<Vec<ResultRow>> {
    let text = fs::read_to_string(path)?;
    Ok(text.lines().skip(1).filter_map(ResultRow::parse_csv).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(variant: &str, alpha: f64, snr: f64) -> ResultRow {
        ResultRow {
            variant: variant.to_string(),
            alpha,
            input_snr_db: snr,
            snr_out_worse_db: 12.345678,
            snr_out_better_db: 14.0,
            delta_msc: 0.01234,
            delta_itd_us: 42.5,
            cd_worse: 3.21,
            solver_iters: 1234,
            wall_ms: 56,
            converged_bins: 500,
            total_bins: 513,
        }
    }

    #[test]
    fn csv_row_round_trips() {
        let r = row("IC_U", 100.0, 5.0);
        let parsed = ResultRow::parse_csv(&r.to_csv()).unwrap();
        assert_eq!(parsed.variant, "IC_U");
        assert_eq!(parsed.alpha, 100.0);
        assert_eq!(parsed.solver_iters, 1234);
        assert_eq!(parsed.total_bins, 513);
        assert!((parsed.snr_out_worse_db - 12.345678).abs() < 1e-6);
        assert!(ResultRow::parse_csv("not,a,row").is_none());
    }

    #[test]
    fn csv_header_matches_row_field_count() {
        let fields = CSV_HEADER.split(',').count();
        assert_eq!(row("MWF", 0.0, 0.0).to_csv().split(',').count(), fields);
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.alpha_grid.len(), 18);
        assert_eq!(cfg.alpha_grid[0], 0.0);
        assert!((cfg.alpha_grid[1] - 1e-4).abs() < 1e-16);
        assert!((cfg.alpha_grid[17] - 1e4).abs() < 1e-8);
        assert_eq!(cfg.snr_list_db, vec![0.0, 5.0, 10.0, 20.0, 50.0]);
    }

    #[test]
    fn validate_rejects_bad_grids() {
        let mut cfg = ExperimentConfig::default();
        cfg.alpha_grid = vec![-1.0];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.variants.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn summarize_flags_trends() {
        let mut rows = Vec::new();
        for (i, &alpha) in [0.0, 1.0, 100.0].iter().enumerate() {
            let mut r = row("IC_V", alpha, 0.0);
            r.snr_out_worse_db = 12.0 - i as f64 * 0.05; // gently decreasing
            r.delta_msc = 0.02 / (1.0 + alpha);
            r.delta_itd_us = 40.0 - 10.0 * i as f64;
            rows.push(r);
        }
        let report = summarize(&rows).unwrap();
        assert_eq!(report.trends.len(), 1);
        let t = &report.trends[0];
        assert!(t.snr_non_increasing);
        assert!(t.snr_plateau_matches_mwf);
        assert!(t.itd_non_increasing);
        assert!(t.msc_ratio_max_alpha_over_alpha0 < 0.05);
        assert!(report.wall_time_ratio_u_over_v.is_none());
        // too few alphas in a sweep is an error
        assert!(summarize(&rows[..2]).is_err());
    }
}
