//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hpcqed::cqed::noise::{gaussian_offsets, NOISE_ALGORITHM};
use hpcqed::cqed::{synthesize_decay, synthesize_g2};
use hpcqed::data::DataError;
use hpcqed::estimation::{
    fit_decay_with, fit_g2_purity_with, fit_resonance_with, fit_tuning_rate, FitReport, LsqOptions,
};
use hpcqed::io::{
    plan_to_toml, read_fleet, read_histogram, read_mode_field, read_spectrum, read_tuning_points,
    report_to_toml, write_atomic, write_histogram, write_spectrum, write_tuning_points,
    HistogramKind, HistogramMeta, IoError, RunConfig,
};
use hpcqed::materials::MaterialSet;
use hpcqed::planner::{plan_alignment, Objective};
use hpcqed::resonator::{
    effective_mode_volume, free_spectral_range, max_purcell, quality_factor, round_trip_amplitude,
    total_loss, transmission_spectrum, CouplingState,
};
use hpcqed::strain::TuningModel;
use hpcqed::units::{FWHM_PER_SIGMA, NM, UM};

use crate::manifest::{sha256, Manifest};
use crate::{Cli, Command, FitArgs, ObjectiveArg, SimArgs, DEFAULT_OUT_DIR};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hpcqed::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(_) => 2,
        }
    }
}

macro_rules! core_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}
core_from!(
    IoError,
    DataError,
    hpcqed::estimation::FitError,
    hpcqed::resonator::ResonatorError,
    hpcqed::cqed::CqedError,
    hpcqed::strain::StrainError,
    hpcqed::materials::MaterialsError,
    hpcqed::planner::PlanError
);

type Result<T> = std::result::Result<T, CliError>;

/// Collects outputs and the manifest for one run.
struct Run {
    dir: PathBuf,
    manifest: Manifest,
}

impl Run {
    fn new(subcommand: &str, dir: PathBuf) -> Self {
        Self {
            dir,
            manifest: Manifest::new(subcommand),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        write_atomic(&self.path(name), text.as_bytes())?;
        self.record(name)
    }

    /// Hashes an output that was written by a library routine.
    fn record(&mut self, name: &str) -> Result<()> {
        let path = self.path(name);
        let bytes = std::fs::read(&path).map_err(|e| IoError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.manifest
            .outputs
            .insert(name.to_string(), sha256(&bytes));
        Ok(())
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        if !path.exists() {
            return Err(IoError::MissingFile {
                path: path.display().to_string(),
            }
            .into());
        }
        let bytes = std::fs::read(path).map_err(|e| IoError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.manifest.input(path, &bytes);
        Ok(())
    }

    fn finish(self) -> Result<()> {
        write_atomic(
            &self.path("manifest.toml"),
            self.manifest.to_toml().as_bytes(),
        )?;
        println!("wrote {}", self.dir.display());
        Ok(())
    }
}

fn out_dir(flag: Option<PathBuf>, config: Option<&RunConfig>) -> PathBuf {
    flag.or_else(|| {
        std::env::var_os("HPCQED_OUT_DIR")
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
    .or_else(|| config.and_then(|c| c.output_dir.clone()))
    .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn load_config(sim: &SimArgs) -> Result<RunConfig> {
    let mut cfg = match &sim.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = sim.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Starts a simulation run: resolves the output directory and records the
/// effective configuration.
fn sim_run(name: &str, out: Option<PathBuf>, sim: &SimArgs) -> Result<(Run, RunConfig)> {
    let cfg = load_config(sim)?;
    let mut run = Run::new(name, out_dir(out, Some(&cfg)));
    if let Some(p) = &sim.config {
        run.input(p)?;
    }
    // Paths are machine-specific; the effective config keeps only physics.
    let mut effective = cfg.clone();
    effective.output_dir = None;
    let text = effective.to_toml();
    run.manifest.config_sha256 = Some(sha256(text.as_bytes()));
    run.manifest.seed = Some(cfg.seed);
    run.write("config.toml", &text)?;
    Ok((run, cfg))
}

fn lsq_options(fit: &FitArgs) -> LsqOptions {
    LsqOptions {
        starts: fit.starts as usize,
        ..LsqOptions::default()
    }
}

fn schema(path: &Path, message: String) -> CliError {
    IoError::Schema {
        path: path.display().to_string(),
        message,
    }
    .into()
}

fn print_report(title: &str, r: &FitReport) {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{title} ({}, converged: {}, iterations: {})",
        r.model_id, r.converged, r.iterations
    );
    let width = r.parameters.keys().map(String::len).max().unwrap_or(0);
    for (k, v) in &r.parameters {
        match r.sigma(k) {
            Some(e) => {
                let _ = writeln!(s, "  {k:<width$}  {v:>14.6e} ± {e:.2e}");
            }
            None => {
                let _ = writeln!(s, "  {k:<width$}  {v:>14.6e}");
            }
        }
    }
    print!("{s}");
}

pub fn run(cli: Cli) -> Result<()> {
    let out = cli.out_dir;
    match cli.command {
        Command::SimulateTransmission(sim) => {
            let (mut run, cfg) = sim_run("simulate-transmission", out, &sim)?;
            let device = cfg
                .device
                .to_device()
                .map_err(|m| schema(Path::new("config"), m))?;
            let alpha = total_loss(&device.geometry, &device.loss);
            let coupling = match cfg.transmission.self_coupling {
                Some(t) => CouplingState::new(t, round_trip_amplitude(&device.geometry, alpha))?,
                None => CouplingState::critical_for_loss(&device.geometry, alpha)?,
            };
            let grid = cfg.transmission.grid_nm().map_err(CliError::Usage)?;
            let s = transmission_spectrum(&coupling, &device.geometry, &grid)?;
            write_spectrum(run.path("transmission.csv"), &s)?;
            run.record("transmission.csv")?;
            let q = quality_factor(&device.geometry, alpha)?;
            println!("total loss     {alpha:.6} dB/cm");
            println!(
                "FSR            {:.6} nm",
                free_spectral_range(&device.geometry) / NM
            );
            println!("intrinsic Q    {q:.1}");
            println!("self-coupling  {:.9}", coupling.self_coupling);
            run.finish()
        }
        Command::SimulateTuning(sim) => {
            let (mut run, cfg) = sim_run("simulate-tuning", out, &sim)?;
            let device = cfg
                .device
                .to_device()
                .map_err(|m| schema(Path::new("config"), m))?;
            let materials = match &cfg.materials_db {
                Some(p) => {
                    run.input(p)?;
                    MaterialSet::load(p)?
                }
                None => MaterialSet::bundled()?,
            };
            let model = TuningModel::new(&device, &materials)?;
            let volts = cfg.tuning_sweep.voltages_v().map_err(CliError::Usage)?;
            let noise = gaussian_offsets(volts.len(), cfg.tuning_sweep.noise_pm * 1e-3, cfg.seed);
            let points = volts
                .iter()
                .zip(&noise)
                .map(|(&v, dn)| Ok((v, model.wavelength_at(v)? + dn)))
                .collect::<std::result::Result<Vec<_>, hpcqed::strain::StrainError>>()?;
            if cfg.tuning_sweep.noise_pm > 0.0 {
                run.manifest.noise_algorithm = Some("chacha8-stream-per-point/normal".into());
            }
            write_tuning_points(run.path("tuning.csv"), &points)?;
            run.record("tuning.csv")?;
            println!("tuning rate  {:.6} pm/V", model.rate_pm_per_v());
            println!("suspended    {}", device.tuning.suspended);
            run.finish()
        }
        Command::SimulateDecay { sim, noiseless } => {
            let (mut run, cfg) = sim_run("simulate-decay", out, &sim)?;
            let device = cfg
                .device
                .to_device()
                .map_err(|m| schema(Path::new("config"), m))?;
            let edges = cfg.decay.edges_ns().map_err(CliError::Usage)?;
            let shape = cfg.decay.synthesis();
            let seed = (!noiseless).then_some(cfg.seed);
            let h = synthesize_decay(&device.emitter, cfg.decay.detuning_nm, &edges, &shape, seed)?;
            let rate = hpcqed::cqed::decay_rate(&device.emitter, cfg.decay.detuning_nm);
            let mut meta = HistogramMeta::new(HistogramKind::Decay, &edges);
            meta.irf_sigma_ns = Some(shape.irf_sigma_ns);
            meta.seed = seed;
            meta.noise_algorithm = seed.map(|_| NOISE_ALGORITHM.to_string());
            meta.model.insert("rate_per_ns".into(), rate);
            meta.model
                .insert("amplitude_per_ns".into(), shape.amplitude_per_ns);
            meta.model.insert("onset_ns".into(), shape.onset_ns);
            meta.model
                .insert("detuning_nm".into(), cfg.decay.detuning_nm);
            write_histogram(run.path("decay.csv"), &edges, h.counts(), &meta)?;
            run.record("decay.csv")?;
            run.record("decay.meta.toml")?;
            run.manifest.noise_algorithm = meta.noise_algorithm.clone();
            run.manifest.option("noiseless", noiseless);
            println!("decay rate    {rate:.6} 1/ns");
            println!("IRF sigma     {:.6} ns", shape.irf_sigma_ns);
            println!("total counts  {}", h.total_counts());
            run.finish()
        }
        Command::SimulateG2 { sim, noiseless } => {
            let (mut run, cfg) = sim_run("simulate-g2", out, &sim)?;
            let params = cfg.g2.synthesis();
            let seed = (!noiseless).then_some(cfg.seed);
            let h = synthesize_g2(&params, seed)?;
            let mut meta = HistogramMeta::new(HistogramKind::Correlation, h.bin_edges_ns());
            meta.repetition_ns = Some(params.repetition_ns);
            meta.seed = seed;
            meta.noise_algorithm = seed.map(|_| NOISE_ALGORITHM.to_string());
            meta.model.insert("g2_zero".into(), params.g2_zero);
            meta.model.insert("lifetime_ns".into(), params.lifetime_ns);
            meta.model
                .insert("side_peak_counts".into(), params.side_peak_counts);
            write_histogram(run.path("g2.csv"), h.bin_edges_ns(), h.counts(), &meta)?;
            run.record("g2.csv")?;
            run.record("g2.meta.toml")?;
            run.manifest.noise_algorithm = meta.noise_algorithm.clone();
            run.manifest.option("noiseless", noiseless);
            println!("g2(0)       {}", params.g2_zero);
            println!("bins        {}", h.len());
            run.finish()
        }
        Command::FitResonance(fit) => {
            let mut run = Run::new("fit-resonance", out_dir(out, None));
            run.input(&fit.input)?;
            run.manifest.option("starts", fit.starts);
            let s = read_spectrum(&fit.input)?;
            let r = fit_resonance_with(&s, &lsq_options(&fit))?;
            let summary = r.summary();
            print_report("resonance", &summary);
            let keys = [
                "center_nm",
                "fwhm_nm",
                "depth",
                "baseline",
                "q_factor",
                "extinction",
            ];
            let mut csv = keys.join(",");
            csv.push('\n');
            for d in &r.dips {
                let row: Vec<String> = keys.iter().map(|k| d.value(k).to_string()).collect();
                csv.push_str(&row.join(","));
                csv.push('\n');
            }
            println!("{} dip(s)", r.dips.len());
            run.write("resonance.toml", &report_to_toml(&summary))?;
            run.write("resonance_dips.csv", &csv)?;
            run.finish()
        }
        Command::FitDecay { fit, irf_fwhm_ns } => {
            if let Some(w) = irf_fwhm_ns {
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(CliError::Usage(format!(
                        "--irf-fwhm-ns expects a finite value >= 0, got {w}"
                    )));
                }
            }
            let mut run = Run::new("fit-decay", out_dir(out, None));
            run.input(&fit.input)?;
            run.manifest.option("starts", fit.starts);
            if let Some(w) = irf_fwhm_ns {
                run.manifest.option("irf_fwhm_ns", w);
            }
            let file = read_histogram(&fit.input)?;
            if file.meta.is_some() {
                run.input(&hpcqed::io::sidecar_path(&fit.input))?;
            }
            let h = file.to_decay(irf_fwhm_ns.map(|w| w / FWHM_PER_SIGMA))?;
            let report = fit_decay_with(&h, &lsq_options(&fit))?;
            print_report("decay", &report);
            run.write("decay_fit.toml", &report_to_toml(&report))?;
            run.finish()
        }
        Command::FitRate { input } => {
            let mut run = Run::new("fit-rate", out_dir(out, None));
            run.input(&input)?;
            let pts = read_tuning_points(&input)?;
            let f = fit_tuning_rate(&pts)?;
            let summary = f.summary();
            print_report("tuning rate", &summary);
            println!("preferred model: {}", f.preferred.as_str());
            run.write("rate_fit.toml", &report_to_toml(&summary))?;
            run.finish()
        }
        Command::FitG2 { fit, repetition_ns } => {
            if let Some(t) = repetition_ns {
                if !(t > 0.0) || !t.is_finite() {
                    return Err(CliError::Usage(format!(
                        "--repetition-ns expects a positive value, got {t}"
                    )));
                }
            }
            let mut run = Run::new("fit-g2", out_dir(out, None));
            run.input(&fit.input)?;
            run.manifest.option("starts", fit.starts);
            let file = read_histogram(&fit.input)?;
            if file.meta.is_some() {
                run.input(&hpcqed::io::sidecar_path(&fit.input))?;
            }
            let h = file.to_correlation(repetition_ns)?;
            let g = fit_g2_purity_with(&h, &lsq_options(&fit))?;
            print_report("g2", &g.report);
            run.write("g2_fit.toml", &report_to_toml(&g.report))?;
            run.write("g2_shape_fit.toml", &report_to_toml(&g.shape))?;
            run.finish()
        }
        Command::Plan { fleet, objective } => {
            let mut run = Run::new("plan", out_dir(out, None));
            run.input(&fleet)?;
            let objective = match objective {
                ObjectiveArg::MinimizeMaxAbsVoltage => Objective::MinimizeMaxAbsVoltage,
                ObjectiveArg::MaximizeMargin => Objective::MaximizeMargin,
            };
            run.manifest.option("objective", objective.as_str());
            let devices = read_fleet(&fleet)?;
            let plan = plan_alignment(&devices, objective)?;
            if let Some(t) = plan.target_wavelength_nm {
                println!(
                    "target  {t:.6} nm   max |V| {:.3} V   margin {:.3} V",
                    plan.objective, plan.margin_v
                );
                for (d, a) in devices.iter().zip(&plan.assignments) {
                    println!(
                        "  {:<12} V_S {:>10.3} V   V_EO {:>10.3} V",
                        d.name, a.v_s, a.v_eo
                    );
                }
            } else {
                println!("infeasible: no common wavelength");
                for d in &plan.diagnostics {
                    let b = |x: Option<hpcqed::planner::Binding>| x.map_or("-", |b| b.as_str());
                    println!(
                        "  {:<12} reach [{:.6}, {:.6}] nm  lower: {}  upper: {}",
                        devices[d.device].name,
                        d.reach.lo_nm,
                        d.reach.hi_nm,
                        b(d.binds_lower),
                        b(d.binds_upper)
                    );
                }
            }
            run.write("plan.toml", &plan_to_toml(&plan, &devices))?;
            run.finish()
        }
        Command::ModeVolume {
            input,
            wavelength_nm,
            refractive_index,
            quality,
        } => {
            let mut run = Run::new("mode-volume", out_dir(out, None));
            run.input(&input)?;
            run.manifest.option("wavelength_nm", wavelength_nm);
            run.manifest.option("refractive_index", refractive_index);
            let field = read_mode_field(&input)?;
            let v = effective_mode_volume(&field, wavelength_nm * NM, refractive_index)?;
            let mut text = format!(
                "volume_um3 = {}\nvolume_norm = {}\nwavelength_nm = {}\nrefractive_index = {}\n",
                toml_float(v.volume_m3 / (UM * UM * UM)),
                toml_float(v.normalized),
                toml_float(wavelength_nm),
                toml_float(refractive_index)
            );
            println!(
                "V_eff  {:.6} um^3  ({:.4} (λ/n)^3)",
                v.volume_m3 / (UM * UM * UM),
                v.normalized
            );
            if let Some(q) = quality {
                run.manifest.option("quality", q);
                let fp = max_purcell(q, v.normalized)?;
                let _ = write!(
                    text,
                    "quality = {}\nmax_purcell = {}\n",
                    toml_float(q),
                    toml_float(fp)
                );
                println!("max Purcell factor  {fp:.4}");
            }
            run.write("mode_volume.toml", &text)?;
            run.finish()
        }
    }
}

/// Float literal valid in TOML (always carries a decimal point or exponent).
fn toml_float(x: f64) -> String {
    let s = x.to_string();
    if s.contains(['.', 'e', 'E']) || !x.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}
