//! End-to-end commands: simulate missions, train a model, evaluate methods.
//!
//! Every command takes a [`RunConfig`]. All outputs carry the config hash,
//! a digest of the effective configuration excluding the output directory,
//! so reruns of the same configuration are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::beamsnet::{BeamsNetTrainConfig, BeamsNetTrainer, EpochLog, WindowedSample};
use crate::checkpoint::{Checkpoint, ModelKind, TrainedModel};
use crate::dataset::canonical::{read_mission, save_mission};
use crate::dataset::{
    desk_missions, load_mission, make_windows, split_missions, synthesize_mission, ColumnSchema, ImuNoise,
    Mission, Split, VariantRequirements,
};
use crate::error::{Error, Result};
use crate::estimator::LsEstimator;
use crate::geometry::{build_transform, BeamGeometry, BodyVelocity, ErrorModelConfig, BEAM_COUNT};
use crate::metrics::{improvement_pct, Bandwidth, EvaluationReport, DEFAULT_KDE_POINTS};
use crate::nn::StepDecay;
use crate::snmnn::{SnmnnSequence, SnmnnTrainConfig, SnmnnTrainer, DEFAULT_UPDATE_INTERVAL};

/// File extension of canonical mission files.
pub const MISSION_EXT: &str = "mission";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub pitch_deg: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self { pitch_deg: 30.0 }
    }
}

/// One bias for every beam, or four.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BiasSpec {
    Uniform(f64),
    PerBeam([f64; BEAM_COUNT]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErrorSection {
    /// m/s.
    pub bias: BiasSpec,
    /// m/s.
    pub noise_std: f64,
}

impl Default for ErrorSection {
    fn default() -> Self {
        Self { bias: BiasSpec::Uniform(0.001), noise_std: 0.15 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    /// Generate missions in memory from `missions`, `duration_s`, `imu_noise`.
    Synthetic,
    /// Canonical mission files in `dir`, as written by `simulate`.
    Files,
    /// One subdirectory of delimited tables per mission in `dir`, read with
    /// the column schema in `schema`; the error model is applied on load.
    Recorded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub source: DataSource,
    pub missions: usize,
    pub duration_s: f64,
    pub imu_noise: ImuNoise,
    pub dir: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    /// Missions held out for evaluation.
    pub test_ids: Vec<u64>,
    /// Training missions; every non-test mission when absent.
    pub train_ids: Option<Vec<u64>>,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            source: DataSource::Synthetic,
            missions: 13,
            duration_s: 400.0,
            imu_noise: ImuNoise::default(),
            dir: None,
            schema: None,
            test_ids: vec![11, 12],
            train_ids: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamsNetSection {
    pub lr: f64,
    pub batch_size: usize,
    pub decay_factor: f64,
    pub epochs_v1: usize,
    pub decay_epoch_v1: usize,
    pub epochs_v2: usize,
    pub decay_epoch_v2: usize,
}

impl Default for BeamsNetSection {
    fn default() -> Self {
        Self {
            lr: 0.01,
            batch_size: 256,
            decay_factor: 0.1,
            epochs_v1: 250,
            decay_epoch_v1: 210,
            epochs_v2: 300,
            decay_epoch_v2: 255,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SnmnnSection {
    pub lr: f64,
    pub alpha_lr: f64,
    pub truncation: usize,
    pub update_interval: usize,
    pub gamma: f64,
    pub power_iterations: usize,
    pub epochs_v1: usize,
    pub epochs_v2: usize,
}

impl Default for SnmnnSection {
    fn default() -> Self {
        Self {
            lr: 0.006,
            alpha_lr: 0.092,
            truncation: 1,
            update_interval: DEFAULT_UPDATE_INTERVAL,
            gamma: 1.0,
            power_iterations: crate::nn::spectral::DEFAULT_POWER_ITERATIONS,
            epochs_v1: 50,
            epochs_v2: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub model: ModelKind,
    /// Overrides the variant's epoch count.
    pub epochs: Option<usize>,
    /// Save a checkpoint every this many epochs; 0 saves only at the end.
    pub checkpoint_every: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self { model: ModelKind::BeamsnetV1, epochs: None, checkpoint_every: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluateSection {
    pub kde_points: usize,
    pub bandwidth: Bandwidth,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        Self { kde_points: DEFAULT_KDE_POINTS, bandwidth: Bandwidth::Silverman }
    }
}

/// Settings for every command; defaults reproduce the published setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub geometry: GeometrySection,
    pub error: ErrorSection,
    pub data: DataSection,
    pub beamsnet: BeamsNetSection,
    pub snmnn: SnmnnSection,
    pub train: TrainSection,
    pub evaluate: EvaluateSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            out: PathBuf::from("out"),
            geometry: GeometrySection::default(),
            error: ErrorSection::default(),
            data: DataSection::default(),
            beamsnet: BeamsNetSection::default(),
            snmnn: SnmnnSection::default(),
            train: TrainSection::default(),
            evaluate: EvaluateSection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("run config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the configuration with the
    /// output directory blanked.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let json = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&json))[..16].to_string()
    }

    pub fn error_model(&self) -> Result<ErrorModelConfig<f64>> {
        let bias = match self.error.bias {
            BiasSpec::Uniform(b) => [b; BEAM_COUNT],
            BiasSpec::PerBeam(b) => b,
        };
        ErrorModelConfig::new(bias, self.error.noise_std, self.seed)
            .map_err(|e| Error::Config(format!("error model: {e}")))
    }

    pub fn geometry(&self) -> Result<BeamGeometry<f64>> {
        BeamGeometry::janus(self.geometry.pitch_deg).map_err(|e| Error::Config(format!("geometry: {e}")))
    }

    pub fn beamsnet_config(&self, kind: ModelKind) -> BeamsNetTrainConfig {
        let b = &self.beamsnet;
        let (epochs, at_epoch) = match kind {
            ModelKind::BeamsnetV1 => (b.epochs_v1, b.decay_epoch_v1),
            _ => (b.epochs_v2, b.decay_epoch_v2),
        };
        BeamsNetTrainConfig {
            epochs: self.train.epochs.unwrap_or(epochs),
            lr: b.lr,
            batch_size: b.batch_size,
            decay: Some(StepDecay { at_epoch, factor: b.decay_factor }),
            seed: self.seed,
        }
    }

    pub fn snmnn_config(&self, kind: ModelKind) -> SnmnnTrainConfig {
        let s = &self.snmnn;
        let epochs = if kind == ModelKind::SnmnnV1 { s.epochs_v1 } else { s.epochs_v2 };
        SnmnnTrainConfig {
            epochs: self.train.epochs.unwrap_or(epochs),
            lr: s.lr,
            alpha_lr: s.alpha_lr,
            truncation: s.truncation,
            update_interval: s.update_interval,
            gamma: s.gamma,
            power_iterations: s.power_iterations,
            seed: self.seed,
        }
    }
}

/// Synthetic missions described by the data section.
pub fn synthetic_missions(cfg: &RunConfig) -> Result<Vec<Mission<f64>>> {
    cfg.geometry()?;
    let specs = desk_missions(
        cfg.data.missions,
        cfg.data.duration_s,
        cfg.geometry.pitch_deg,
        cfg.error_model()?,
        cfg.data.imu_noise,
        cfg.seed,
    );
    specs.iter().map(synthesize_mission).collect::<Result<_>>().map_err(|e| Error::Config(e.to_string()))
}

fn data_dir(cfg: &RunConfig) -> Result<&Path> {
    cfg.data
        .dir
        .as_deref()
        .ok_or_else(|| Error::Config("data.dir is required for this data source".into()))
}

fn sorted_entries(dir: &Path, want_dirs: bool) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::Data(format!("{}: {e}", dir.display())))? {
        let path = entry?.path();
        let keep = if want_dirs {
            path.is_dir()
        } else {
            path.extension().is_some_and(|e| e == MISSION_EXT)
        };
        if keep {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Missions for the configured data source, checked against the geometry.
pub fn load_missions(cfg: &RunConfig) -> Result<Vec<Mission<f64>>> {
    let missions = match cfg.data.source {
        DataSource::Synthetic => synthetic_missions(cfg)?,
        DataSource::Files => {
            let files = sorted_entries(data_dir(cfg)?, false)?;
            files.iter().map(|p| read_mission(p)).collect::<Result<Vec<_>>>()?
        }
        DataSource::Recorded => {
            let schema_path = cfg
                .data
                .schema
                .as_deref()
                .ok_or_else(|| Error::Config("data.schema is required for recorded data".into()))?;
            let schema = ColumnSchema::from_file(schema_path)?;
            let error = cfg.error_model()?;
            let dirs = sorted_entries(data_dir(cfg)?, true)?;
            dirs.iter()
                .enumerate()
                .map(|(id, d)| {
                    let mut m = load_mission(d, id as u64, &schema)?;
                    m.apply_corruption(&error);
                    Ok(m)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    if missions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for m in &missions {
        if (m.pitch_deg - cfg.geometry.pitch_deg).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "mission {} was recorded with beam pitch {}°, config says {}°",
                m.id, m.pitch_deg, cfg.geometry.pitch_deg
            )));
        }
    }
    Ok(missions)
}

pub fn split(cfg: &RunConfig, missions: Vec<Mission<f64>>) -> Result<Split<f64>> {
    let s = split_missions(missions, cfg.data.train_ids.as_deref(), &cfg.data.test_ids)?;
    if let Some(w) = &s.warning {
        log::warn!("{w}");
    }
    Ok(s)
}

fn create_out(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out)?;
    Ok(&cfg.out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestFile {
    pub name: String,
    pub sha256: String,
}

/// Record of a `simulate` run. `created_unix_s` is the only field that
/// differs between reruns of the same configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub created_unix_s: u64,
    pub seed: u64,
    pub config: RunConfig,
    pub files: Vec<ManifestFile>,
}

/// Writes synthetic missions to `<out>/missions` plus `<out>/manifest.json`.
pub fn simulate(cfg: &RunConfig) -> Result<Manifest> {
    let missions = synthetic_missions(cfg)?;
    let dir = create_out(cfg)?.join("missions");
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    for m in &missions {
        let name = format!("mission_{:03}.{MISSION_EXT}", m.id);
        let path = dir.join(&name);
        save_mission(m, &path)?;
        files.push(ManifestFile { name, sha256: hex::encode(Sha256::digest(fs::read(&path)?)) });
        log::info!("wrote {}", path.display());
    }
    let created_unix_s = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let manifest = Manifest { config_hash: cfg.hash(), created_unix_s, seed: cfg.seed, config: cfg.clone(), files };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Data(e.to_string()))?;
    fs::write(cfg.out.join("manifest.json"), json + "\n")?;
    Ok(manifest)
}

fn windows_for(missions: &[Mission<f64>], req: VariantRequirements) -> Vec<WindowedSample<f64>> {
    let mut out = Vec::new();
    for m in missions {
        let w = make_windows(m, req);
        if let Some(msg) = &w.warning {
            log::warn!("{msg}");
        }
        out.extend(w.samples);
    }
    out
}

fn snmnn_sequences(missions: &[Mission<f64>], kind: ModelKind) -> Vec<SnmnnSequence<f64>> {
    let v = kind.snmnn().expect("snmnn kind");
    missions
        .iter()
        .map(|m| SnmnnSequence::from_windows(m.id, v, &make_windows(m, VariantRequirements::snmnn(v)).samples))
        .collect()
}

pub fn checkpoint_path(cfg: &RunConfig, kind: ModelKind) -> PathBuf {
    cfg.out.join(format!("{kind}.ckpt"))
}

pub fn loss_log_path(cfg: &RunConfig, kind: ModelKind) -> PathBuf {
    cfg.out.join(format!("{kind}_loss.csv"))
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub model: ModelKind,
    pub checkpoint: PathBuf,
    pub log: Vec<EpochLog>,
    /// Completed epochs including any resumed from.
    pub epochs: usize,
}

/// Restores a checkpoint and refuses one trained under another geometry.
pub fn load_model(cfg: &RunConfig, path: &Path) -> Result<TrainedModel<f64>> {
    let ck = Checkpoint::load(path)?;
    if (ck.meta.pitch_deg - cfg.geometry.pitch_deg).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "checkpoint {} was trained with beam pitch {}°, config says {}°",
            path.display(),
            ck.meta.pitch_deg,
            cfg.geometry.pitch_deg
        )));
    }
    TrainedModel::from_checkpoint(&ck)
}

/// Trains `cfg.train.model` on the training split, optionally continuing
/// from a checkpoint. Writes `<out>/<model>.ckpt` and appends to
/// `<out>/<model>_loss.csv`.
pub fn train(cfg: &RunConfig, resume: Option<&Path>) -> Result<TrainSummary> {
    let kind = cfg.train.model;
    let split = split(cfg, load_missions(cfg)?)?;
    if split.train.is_empty() {
        return Err(Error::Data("no training missions".into()));
    }
    let mut model = match resume {
        Some(path) => {
            let m = load_model(cfg, path)?;
            if m.kind() != kind {
                return Err(Error::Config(format!("checkpoint holds {}, config trains {kind}", m.kind())));
            }
            m
        }
        None => match kind.beamsnet() {
            Some(v) => TrainedModel::Beamsnet(BeamsNetTrainer::new(v, cfg.beamsnet_config(kind))?),
            None => TrainedModel::Snmnn(SnmnnTrainer::new(kind.snmnn().expect("kind"), cfg.snmnn_config(kind))?),
        },
    };
    match &mut model {
        TrainedModel::Beamsnet(t) => t.config.epochs = cfg.beamsnet_config(kind).epochs,
        TrainedModel::Snmnn(t) => t.config.epochs = cfg.snmnn_config(kind).epochs,
    }

    create_out(cfg)?;
    let hash = cfg.hash();
    let ckpt = checkpoint_path(cfg, kind);
    let log_path = loss_log_path(cfg, kind);
    let mut csv = if resume.is_some() && log_path.exists() {
        fs::read_to_string(&log_path)?
    } else {
        format!("# config_hash={hash}\nepoch,lr,loss,steps\n")
    };

    let samples = match &model {
        TrainedModel::Beamsnet(t) => windows_for(&split.train, VariantRequirements::beamsnet(t.net.variant())),
        TrainedModel::Snmnn(_) => Vec::new(),
    };
    let sequences = match &model {
        TrainedModel::Snmnn(_) => snmnn_sequences(&split.train, kind),
        TrainedModel::Beamsnet(_) => Vec::new(),
    };

    let mut log = Vec::new();
    loop {
        let entry = match &mut model {
            TrainedModel::Beamsnet(t) if t.epoch < t.config.epochs => t.run_epoch(&samples)?,
            TrainedModel::Snmnn(t) if t.epoch < t.config.epochs => t.run_epoch(&sequences, &mut |_| {})?,
            _ => break,
        };
        log::info!("{kind} epoch {} lr {:.6} loss {:.6}", entry.epoch, entry.lr, entry.loss);
        writeln!(csv, "{},{},{:.9},{}", entry.epoch, entry.lr, entry.loss, entry.steps).unwrap();
        log.push(entry);
        let every = cfg.train.checkpoint_every;
        if every > 0 && model.epoch() % every == 0 {
            model.to_checkpoint(cfg.geometry.pitch_deg, &hash).save(&ckpt)?;
            fs::write(&log_path, &csv)?;
        }
    }
    model.to_checkpoint(cfg.geometry.pitch_deg, &hash).save(&ckpt)?;
    fs::write(&log_path, &csv)?;
    Ok(TrainSummary { model: kind, checkpoint: ckpt, epochs: model.epoch(), log })
}

/// Estimates of one method on the common evaluation epochs.
struct MethodRun {
    name: String,
    estimates: Vec<BodyVelocity<f64>>,
}

/// Per-epoch velocities a trained model produces for one mission, on the
/// epochs of `eval` (a subset of the model's own windows).
fn model_estimates(
    model: &TrainedModel<f64>,
    mission: &Mission<f64>,
    eval: &[WindowedSample<f64>],
) -> Result<Vec<BodyVelocity<f64>>> {
    match model {
        TrainedModel::Beamsnet(t) => eval.iter().map(|s| t.net.predict(s)).collect(),
        TrainedModel::Snmnn(t) => {
            let v = t.net.variant();
            let windows = make_windows(mission, VariantRequirements::snmnn(v)).samples;
            let seq = SnmnnSequence::from_windows(mission.id, v, &windows);
            let pred = t.net.predict_sequence(&seq.inputs)?;
            let by_time: BTreeMap<u64, BodyVelocity<f64>> =
                windows.iter().zip(pred).map(|(w, p)| (w.t.to_bits(), p)).collect();
            eval.iter()
                .map(|s| {
                    by_time
                        .get(&s.t.to_bits())
                        .copied()
                        .ok_or_else(|| Error::Data(format!("mission {}: no SNMNN output at t = {}", mission.id, s.t)))
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub config_hash: String,
    pub reports: Vec<EvaluationReport>,
    /// Rendered comparison table, as written to `comparison.csv`.
    pub table: String,
}

fn unique_name(taken: &[MethodRun], base: &str) -> String {
    let mut name = base.to_string();
    let mut n = 2;
    while taken.iter().any(|r| r.name == name) {
        name = format!("{base}#{n}");
        n += 1;
    }
    name
}

/// Runs LS and every checkpoint on the test split. All methods are scored
/// on the same epochs: those with a full IMU window and three past DVL
/// epochs, so adding a model never changes another method's numbers.
pub fn evaluate(cfg: &RunConfig, checkpoints: &[PathBuf]) -> Result<Evaluation> {
    let models = checkpoints.iter().map(|p| load_model(cfg, p)).collect::<Result<Vec<_>>>()?;
    let split = split(cfg, load_missions(cfg)?)?;
    if split.test.is_empty() {
        return Err(Error::Data("no test missions".into()));
    }
    let ls = LsEstimator::new(build_transform(&cfg.geometry()?))
        .map_err(|e| Error::Config(format!("geometry: {e}")))?;

    let mut runs = vec![MethodRun { name: "ls".into(), estimates: Vec::new() }];
    for m in &models {
        let name = unique_name(&runs, m.kind().name());
        runs.push(MethodRun { name, estimates: Vec::new() });
    }
    let mut times = Vec::new();
    let mut mission_ids = Vec::new();
    let mut truth = Vec::new();
    for mission in &split.test {
        let eval = make_windows(mission, VariantRequirements::all()).samples;
        times.extend(eval.iter().map(|s| s.t));
        mission_ids.extend(eval.iter().map(|_| mission.id));
        truth.extend(eval.iter().map(|s| s.target));
        runs[0].estimates.extend(eval.iter().map(|s| ls.estimate_beams(&s.current_beams)));
        for (run, model) in runs[1..].iter_mut().zip(&models) {
            run.estimates.extend(model_estimates(model, mission, &eval)?);
        }
    }
    if truth.is_empty() {
        return Err(Error::Data("test missions too short to evaluate".into()));
    }

    let hash = cfg.hash();
    let out = create_out(cfg)?;
    let mut reports = Vec::new();
    for run in &runs {
        let report = EvaluationReport::compute(
            &run.name,
            &times,
            &truth,
            &run.estimates,
            cfg.evaluate.bandwidth,
            cfg.evaluate.kde_points,
        )?;
        let file = run.name.replace('#', "_");
        let doc = serde_json::json!({ "config_hash": hash, "report": report });
        let json = serde_json::to_string_pretty(&doc).map_err(|e| Error::Data(e.to_string()))?;
        fs::write(out.join(format!("report_{file}.json")), json + "\n")?;

        let mut series = format!("# config_hash={hash}\nmission,t,error_norm\n");
        for (id, (t, e)) in mission_ids.iter().zip(&report.error_norm_series) {
            writeln!(series, "{id},{t},{e:.9}").unwrap();
        }
        fs::write(out.join(format!("error_norm_{file}.csv")), series)?;

        let mut kde = format!("# config_hash={hash}\nerror_norm,density\n");
        if let Some(curve) = &report.kde_curve {
            for (x, d) in &curve.points {
                writeln!(kde, "{x:.9},{d:.9}").unwrap();
            }
        }
        fs::write(out.join(format!("kde_{file}.csv")), kde)?;
        reports.push(report);
    }

    let table = comparison_table(&hash, &reports);
    fs::write(out.join("comparison.csv"), &table)?;
    Ok(Evaluation { config_hash: hash, reports, table })
}

/// One row per method; improvements are relative to the first (LS) row.
pub fn comparison_table(hash: &str, reports: &[EvaluationReport]) -> String {
    let mut s = format!("# config_hash={hash}\nmethod,rmse,mae,r2,vaf,rmse_improvement_pct,mae_improvement_pct\n");
    let base = &reports[0];
    for r in reports {
        writeln!(
            s,
            "{},{:.6},{:.6},{:.6},{:.4},{:.2},{:.2}",
            r.method,
            r.rmse,
            r.mae,
            r.r2,
            r.vaf,
            improvement_pct(base.rmse, r.rmse),
            improvement_pct(base.mae, r.mae)
        )
        .unwrap();
    }
    s
}
