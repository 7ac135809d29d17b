//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperelastic_core::data::stiffness::{literature_stiffness, literature_stiffness_b_axis};
use hyperelastic_core::data::{
    build_dataset, default_paths, filter_series, synthesize_stress, GroundTruthModel, LoadingPath, NoiseModel, DEFAULT_WINDOW,
};
use hyperelastic_core::energy::{Activation, ConjugatePair, EnergySource, MultiplyKind, NetConfig};
use hyperelastic_core::tensor::{DeformationGradient, Tensor2};
use hyperelastic_core::train::{init_for_dataset, transfer_train, ConstraintKind, NadamConfig, TrainConfig, Trainer};
use hyperelastic_core::validate::{
    anisotropy_index, biaxial_compression, biaxial_sweep, convexity_check, growth_sequence, growth_test, sample_pairs,
    strong_ellipticity_test, sweep_levels, tangent_table, StateRange,
};

use crate::config::*;
use crate::error::{Error, Result};
use crate::exec::Rayon;
use crate::io::report::*;
use crate::io::*;

#[derive(Parser, Debug)]
#[command(name = "hyperelastic", version, about = "Sobolev-trained hyperelastic energy functionals")]
pub struct Cli {
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Synthesize stress series along loading paths.
    GenData(GenDataArgs),
    /// Spectrally filter stress series.
    Filter(FilterArgs),
    /// Assemble a train/validation dataset from series files.
    Dataset(DatasetArgs),
    /// Train an energy network.
    Train(TrainArgs),
    /// Continue training with a constraint penalty.
    Transfer(TransferArgs),
    /// Run the audit suite on a model.
    Validate(ValidateArgs),
    /// Elastic coefficient tables at hydrostatic pressures.
    Tangents(TangentsArgs),
    /// Re-run a stored run configuration.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TruthArg {
    Literature,
    LiteratureBAxis,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PairArg {
    Se,
    Pf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ActivationArg {
    Softplus,
    Rectifier,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MultiplyArg {
    Square,
    Product,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConstraintArg {
    FrameInvariance,
    Symmetry,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AuditArg {
    All,
    Ellipticity,
    Growth,
    Convexity,
    Anisotropy,
}

#[derive(Args, Debug)]
pub struct GenDataArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated path labels, or "all" for the default fifteen.
    #[arg(long, default_value = "all")]
    pub paths: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// GPa.
    #[arg(long, default_value_t = NoiseModel::DEFAULT_AMPLITUDE)]
    pub noise_amplitude: f64,
    /// Records.
    #[arg(long, default_value_t = NoiseModel::DEFAULT_CORRELATION)]
    pub noise_correlation: f64,
    #[arg(long, value_enum, default_value = "literature")]
    pub truth: TruthArg,
    /// Strain per ps.
    #[arg(long, default_value_t = LoadingPath::DEFAULT_RATE)]
    pub rate: f64,
    /// ps.
    #[arg(long, default_value_t = LoadingPath::DEFAULT_DURATION)]
    pub duration: f64,
    /// ps between records.
    #[arg(long, default_value_t = LoadingPath::DEFAULT_INTERVAL)]
    pub interval: f64,
}

#[derive(Args, Debug)]
pub struct FilterArgs {
    /// Series files or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
}

#[derive(Args, Debug)]
pub struct DatasetArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "se")]
    pub pair: PairArg,
    /// Training fraction.
    #[arg(long, default_value_t = 0.7)]
    pub split: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
}

#[derive(Args, Debug, Clone)]
pub struct OptimArgs {
    /// JSON file with training settings; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub w_s: Option<f64>,
    #[arg(long)]
    pub w_psi: Option<f64>,
    #[arg(long)]
    pub w_p: Option<f64>,
    #[arg(long)]
    pub w_c: Option<f64>,
    /// Rotations per epoch for the objectivity penalty.
    #[arg(long)]
    pub rotations: Option<usize>,
    /// Constraint anchors per batch.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub square_energy: bool,
    #[arg(long)]
    pub chunk_size: Option<usize>,
}

impl OptimArgs {
    fn resolve(&self) -> Result<TrainConfig> {
        let mut c = match &self.config {
            Some(p) => read_train_config(p)?,
            None => TrainConfig::default(),
        };
        if let Some(v) = self.epochs {
            c.epochs = v;
        }
        if let Some(v) = self.batch_size {
            c.batch_size = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.learning_rate {
            c.optimizer = NadamConfig { learning_rate: v, ..c.optimizer };
        }
        let w = &mut c.weights;
        for (dst, src) in [(&mut w.w_s, self.w_s), (&mut w.w_psi, self.w_psi), (&mut w.w_p, self.w_p), (&mut w.w_c, self.w_c)] {
            if let Some(v) = src {
                *dst = v;
            }
        }
        if let Some(v) = self.rotations {
            c.constraint.rotations = v;
        }
        if let Some(v) = self.samples {
            c.constraint.samples = v;
        }
        if self.square_energy {
            c.constraint.square_energy = true;
        }
        if let Some(v) = self.chunk_size {
            c.chunk_size = v;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Continue from an existing model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub init_seed: u64,
    #[arg(long, default_value_t = 100)]
    pub width: usize,
    #[arg(long, value_enum, default_value = "softplus")]
    pub activation: ActivationArg,
    #[arg(long, default_value_t = 10.0)]
    pub sharpness: f64,
    #[arg(long, value_enum, default_value = "square")]
    pub multiply: MultiplyArg,
    /// Write a checkpoint every N epochs.
    #[arg(long)]
    pub checkpoint_every: Option<usize>,
    /// Resume from a checkpoint file.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    #[command(flatten)]
    pub optim: OptimArgs,
}

#[derive(Args, Debug)]
pub struct TransferArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum)]
    pub constraint: ConstraintArg,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub optim: OptimArgs,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    pub which: AuditArg,
    /// Dataset whose minimum det F annotates the growth report.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub sphere_points: usize,
    /// Hill-climbing iterations per restart.
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,
    /// Monoclinic grid nodes per parameter; 0 checks the reference state only.
    #[arg(long, default_value_t = 5)]
    pub grid_per_axis: usize,
    #[arg(long, default_value_t = 0.15)]
    pub sweep_max: f64,
    #[arg(long, default_value_t = 30)]
    pub sweep_steps: usize,
    #[arg(long, default_value_t = 200)]
    pub convexity_pairs: usize,
    #[arg(long, default_value_t = 61)]
    pub growth_points: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub growth_min_j: f64,
}

#[derive(Args, Debug)]
pub struct TangentsArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated hydrostatic pressures, GPa.
    #[arg(long, value_delimiter = ',', default_value = "0.0001,5")]
    pub pressures: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    /// A run.json written by an earlier invocation.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; defaults to the directory holding the configuration.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn select_paths(spec: &str, rate: f64, duration: f64, interval: f64) -> Result<Vec<LoadingPath>> {
    let all = default_paths();
    let chosen: Vec<LoadingPath> = if spec == "all" {
        all
    } else {
        spec.split(',')
            .map(|label| {
                all.iter()
                    .find(|p| p.kind.label() == label.trim())
                    .copied()
                    .ok_or_else(|| Error::Config(format!("unknown path '{label}'")))
            })
            .collect::<Result<_>>()?
    };
    Ok(chosen.into_iter().map(|p| LoadingPath { rate, duration, interval, ..p }).collect())
}

/// Turns parsed flags into a resolved configuration and output directory.
pub fn resolve(cmd: &Command) -> Result<(RunConfig, PathBuf)> {
    Ok(match cmd {
        Command::GenData(a) => (
            RunConfig::GenData(GenDataConfig {
                paths: select_paths(&a.paths, a.rate, a.duration, a.interval)?,
                truth: match a.truth {
                    TruthArg::Literature => Truth::Literature,
                    TruthArg::LiteratureBAxis => Truth::LiteratureBAxis,
                },
                noise_amplitude: a.noise_amplitude,
                noise_correlation: a.noise_correlation,
                seed: a.seed,
            }),
            a.out.clone(),
        ),
        Command::Filter(a) => (RunConfig::Filter(FilterConfig { inputs: expand_inputs(&a.inputs)?, window: a.window }), a.out.clone()),
        Command::Dataset(a) => (
            RunConfig::Dataset(DatasetConfig {
                inputs: expand_inputs(&a.inputs)?,
                pair: match a.pair {
                    PairArg::Se => ConjugatePair::SE,
                    PairArg::Pf => ConjugatePair::PF,
                },
                split: a.split,
                seed: a.seed,
                stride: a.stride,
            }),
            a.out.clone(),
        ),
        Command::Train(a) => {
            let activation = match a.activation {
                ActivationArg::Softplus => Activation::Softplus { sharpness: a.sharpness },
                ActivationArg::Rectifier => Activation::Rectifier,
            };
            let multiply = match a.multiply {
                MultiplyArg::Square => MultiplyKind::Square,
                MultiplyArg::Product => MultiplyKind::Product,
            };
            (
                RunConfig::Train(TrainRunConfig {
                    dataset: a.dataset.clone(),
                    model: a.model.clone(),
                    init: InitConfig { seed: a.init_seed, net: NetConfig { width: a.width, activation, multiply } },
                    train: a.optim.resolve()?,
                    checkpoint_every: a.checkpoint_every,
                    resume: a.resume.clone(),
                }),
                a.out.clone(),
            )
        }
        Command::Transfer(a) => (
            RunConfig::Transfer(TransferRunConfig {
                model: a.model.clone(),
                dataset: a.dataset.clone(),
                constraint: match a.constraint {
                    ConstraintArg::FrameInvariance => ConstraintKind::FrameInvariance,
                    ConstraintArg::Symmetry => ConstraintKind::Symmetry,
                },
                train: a.optim.resolve()?,
            }),
            a.out.clone(),
        ),
        Command::Validate(a) => {
            let mut v = ValidateConfig::defaults(a.model.clone());
            v.which = match a.which {
                AuditArg::All => Audit::All,
                AuditArg::Ellipticity => Audit::Ellipticity,
                AuditArg::Growth => Audit::Growth,
                AuditArg::Convexity => Audit::Convexity,
                AuditArg::Anisotropy => Audit::Anisotropy,
            };
            v.dataset = a.dataset.clone();
            v.ellipticity.seed = a.seed;
            v.ellipticity.sphere_points = a.sphere_points;
            v.ellipticity.hill_climb.iterations = a.iterations;
            v.grid_per_axis = a.grid_per_axis;
            v.sweep_max = a.sweep_max;
            v.sweep_steps = a.sweep_steps;
            v.convexity_pairs = a.convexity_pairs;
            v.growth_points = a.growth_points;
            v.growth_min_j = a.growth_min_j;
            (RunConfig::Validate(v), a.out.clone())
        }
        Command::Tangents(a) => {
            (RunConfig::Tangents(TangentsConfig { model: a.model.clone(), pressures: a.pressures.clone() }), a.out.clone())
        }
        Command::Replay(a) => {
            let run = read_run(&a.config)?;
            let out = match &a.out {
                Some(o) => o.clone(),
                None => a.config.parent().map(Path::to_path_buf).unwrap_or_default(),
            };
            (run, out)
        }
    })
}

fn truth_model(t: Truth) -> Result<GroundTruthModel> {
    Ok(match t {
        Truth::Literature => GroundTruthModel::new("literature", literature_stiffness())?,
        Truth::LiteratureBAxis => GroundTruthModel::new("literature-b-axis", literature_stiffness_b_axis())?,
    })
}

fn file_name(p: &Path) -> Result<&std::ffi::OsStr> {
    p.file_name().ok_or_else(|| Error::Config(format!("{} has no file name", p.display())))
}

/// Executes a resolved configuration, writing outputs and `run.json` into `out`.
pub fn execute(run: &RunConfig, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    match run {
        RunConfig::GenData(c) => {
            let truth = truth_model(c.truth)?;
            for (k, p) in c.paths.iter().enumerate() {
                let noise = NoiseModel { amplitude: c.noise_amplitude, correlation: c.noise_correlation, seed: c.seed.wrapping_add(k as u64) };
                let s = synthesize_stress(p, &truth, &noise)?;
                write_series(&out.join(format!("{}.csv", p.kind.label())), &s)?;
            }
        }
        RunConfig::Filter(c) => {
            for p in &c.inputs {
                let s = read_series(p)?;
                let f = filter_series(&s, c.window)?;
                write_series(&out.join(file_name(p)?), &f)?;
            }
        }
        RunConfig::Dataset(c) => {
            let series = c.inputs.iter().map(|p| read_series(p)).collect::<Result<Vec<_>>>()?;
            let ds = build_dataset(&series, c.pair, c.split, c.seed)?;
            let ds = if c.stride > 1 { ds.thinned(c.stride) } else { ds };
            write_dataset(&out.join("dataset.json"), &ds)?;
        }
        RunConfig::Train(c) => run_train(c, out)?,
        RunConfig::Transfer(c) => {
            let model = read_model(&c.model)?;
            let ds = read_dataset(&c.dataset)?;
            let mut model = model;
            model.provenance.config_hash = config_hash(&(&model.provenance.config_hash, c.constraint, &c.train));
            let (m, trace) = transfer_train(model, &ds, &c.train, c.constraint, &Rayon)?;
            write_model(&out.join("model.json"), &m)?;
            write_atomic(&out.join("loss.csv"), &trace_to_csv(&trace)?)?;
        }
        RunConfig::Validate(c) => run_validate(c, out)?,
        RunConfig::Tangents(c) => {
            let model = read_model(&c.model)?;
            let tables = c.pressures.iter().map(|&p| tangent_table(&model, p)).collect::<hyperelastic_core::Result<Vec<_>>>()?;
            write_atomic(&out.join("tangents.json"), &to_json(&tables)?)?;
            let text: String = tables.iter().map(|t| tangent_table_text(t) + "\n").collect();
            write_atomic(&out.join("tangents.txt"), text.as_bytes())?;
            for (k, t) in tables.iter().enumerate() {
                write_atomic(&out.join(format!("tangents_{k}.csv")), &tangent_table_csv(t)?)?;
            }
        }
    }
    write_atomic(&out.join(RUN_FILE), &run_to_json(run)?)
}

fn run_train(c: &TrainRunConfig, out: &Path) -> Result<()> {
    let ds = read_dataset(&c.dataset)?;
    let hash = config_hash(&(&c.init, &c.model, &c.train));
    let mut trainer = match &c.resume {
        Some(ck) => Trainer::resume(read_checkpoint(ck)?, &ds, c.train)?,
        None => {
            let mut m = match &c.model {
                Some(p) => read_model(p)?,
                None => init_for_dataset(c.init.seed, &ds, c.init.net),
            };
            m.provenance.config_hash = hash;
            Trainer::new(m, &ds, c.train)?
        }
    };
    while !trainer.is_done() {
        trainer.step_epoch(&Rayon)?;
        if let Some(n) = c.checkpoint_every.filter(|n| *n > 0) {
            if trainer.epoch() % n == 0 {
                write_atomic(&out.join("checkpoint.json"), &checkpoint_to_json(&trainer.checkpoint())?)?;
            }
        }
    }
    let (m, trace) = trainer.into_parts();
    write_model(&out.join("model.json"), &m)?;
    write_atomic(&out.join("loss.csv"), &trace_to_csv(&trace)?)
}

fn run_validate(c: &ValidateConfig, out: &Path) -> Result<()> {
    let model = read_model(&c.model)?;
    let min_j = match &c.dataset {
        Some(p) => Some(read_dataset(p)?.min_jacobian),
        None => None,
    };
    let want = |a: Audit| c.which == Audit::All || c.which == a;
    let src: &dyn EnergySource = &model;
    if want(Audit::Ellipticity) {
        let states = if c.grid_per_axis == 0 {
            StateRange::Fixed(Tensor2::IDENTITY.to_array())
        } else {
            StateRange::Monoclinic { range: c.stretch_range, per_axis: c.grid_per_axis }
        };
        let r = strong_ellipticity_test(src, &states, &c.ellipticity);
        write_atomic(&out.join("ellipticity.json"), &to_json(&r)?)?;
        write_atomic(&out.join("ellipticity.txt"), ellipticity_text(&r).as_bytes())?;
        let sweep = biaxial_sweep(src, &sweep_levels(c.sweep_max, c.sweep_steps), c.ellipticity.sphere_points);
        write_atomic(&out.join("ellipticity_sweep.json"), &to_json(&sweep)?)?;
        write_atomic(&out.join("ellipticity_sweep.csv"), &sweep_csv(&sweep)?)?;
    }
    if want(Audit::Growth) {
        let r = growth_test(src, &growth_sequence(c.growth_points, c.growth_min_j), c.growth_threshold, min_j)?;
        write_atomic(&out.join("growth.json"), &to_json(&r)?)?;
        write_atomic(&out.join("growth.txt"), growth_text(&r).as_bytes())?;
        write_atomic(&out.join("growth.csv"), &growth_csv(&r)?)?;
    }
    if want(Audit::Convexity) {
        let pairs = sample_pairs(c.convexity_pairs, c.convexity_bound, c.ellipticity.seed);
        let r = convexity_check(src, &pairs, 1e-10);
        write_atomic(&out.join("convexity.json"), &to_json(&r)?)?;
    }
    if want(Audit::Anisotropy) {
        let levels = sweep_levels(c.sweep_max, c.sweep_steps);
        let entries: Vec<_> = levels
            .iter()
            .map(|&l| {
                let f = biaxial_compression(l).unwrap_or_else(DeformationGradient::identity);
                anisotropy_index(src, &f, c.ellipticity.sphere_points, &c.ellipticity.hill_climb, c.ellipticity.seed)
            })
            .collect();
        write_atomic(&out.join("anisotropy.json"), &to_json(&entries)?)?;
        write_atomic(&out.join("anisotropy.csv"), &anisotropy_csv(&levels, &entries)?)?;
    }
    Ok(())
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = resolve(&cli.command).and_then(|(run, out)| with_threads(cli.threads, || execute(&run, &out))?);
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
