use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hme_core::verify::{System, Tolerances};
use hme_core::CollisionModel;

#[derive(Debug, Parser)]
#[command(
    name = "hme",
    version,
    about = "Linear stability of hyperbolic moment systems for the Boltzmann equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frequencies Ω(k) over a wave-number sweep.
    DispersionTime {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        k: KSweep,
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Wave numbers k(ω) over a frequency sweep, one-dimensional only.
    DispersionSpace {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        omega: OmegaSweep,
        #[command(flatten)]
        tol: TolArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Every structural, dispersion and Yong check for one configuration, as JSON.
    Verify {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        k: KSweep,
        #[command(flatten)]
        omega: OmegaSweep,
        #[command(flatten)]
        tol: TolArgs,
        /// Write the JSON report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// JSON object of state entries keyed "a1,a2,..."; missing entries take equilibrium values.
        #[arg(long)]
        state_file: Option<PathBuf>,
        /// Random rest-frame states for the symmetrizer check.
        #[arg(long, default_value_t = 20)]
        rest_states: usize,
        #[arg(long, default_value_t = 200)]
        lemma_trials: usize,
        #[arg(long, default_value_t = 8)]
        lemma_size: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SystemName {
    Hme,
    Ohme,
    Grad1d,
}

impl From<SystemName> for System {
    fn from(s: SystemName) -> Self {
        match s {
            SystemName::Hme => System::Hme,
            SystemName::Ohme => System::Ohme,
            SystemName::Grad1d => System::Grad1d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    None,
    Bgk,
    Shakhov,
    EsBgk,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = SystemName::Hme)]
    pub system: SystemName,
    #[arg(long, value_enum, default_value_t = ModelName::Bgk)]
    pub model: ModelName,
    /// Dimensionless relaxation time τ√θ₀/L.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = CollisionModel::DEFAULT_PRANDTL)]
    pub pr: f64,
    /// Magnitude B₀ of the constant collision kernel.
    #[arg(long, default_value_t = 1.0)]
    pub kernel: f64,
    /// Gauss-Hermite points per velocity axis for the binary model.
    #[arg(long, default_value_t = 16)]
    pub nodes: usize,
    /// Angular points for the binary model.
    #[arg(long, default_value_t = 16)]
    pub angles: usize,
    #[arg(long, default_value_t = 1.0)]
    pub rho0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta0: f64,
}

impl SystemArgs {
    pub fn collision(&self) -> CollisionModel {
        match self.model {
            ModelName::None => CollisionModel::None,
            ModelName::Bgk => CollisionModel::Bgk { tau: self.tau },
            ModelName::Shakhov => CollisionModel::Shakhov {
                tau: self.tau,
                pr: self.pr,
            },
            ModelName::EsBgk => CollisionModel::EsBgk {
                tau: self.tau,
                pr: self.pr,
            },
            ModelName::Binary => CollisionModel::Binary {
                kernel: self.kernel,
                nodes: self.nodes,
                angles: self.angles,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct KSweep {
    #[arg(long, default_value_t = 1e-2)]
    pub kmin: f64,
    #[arg(long, default_value_t = 1e2)]
    pub kmax: f64,
    #[arg(long, default_value_t = 200)]
    pub ksteps: usize,
    /// Geometric spacing instead of linear.
    #[arg(long)]
    pub log: bool,
    /// Random wave vectors drawn in two and three dimensions.
    #[arg(long, default_value_t = 100)]
    pub wave_vectors: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OmegaSweep {
    #[arg(long, default_value_t = 1e-2)]
    pub omega_min: f64,
    #[arg(long, default_value_t = 1e2)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 100)]
    pub omega_steps: usize,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Lower bound −tol on Im Ω.
    #[arg(long)]
    pub time_tol: Option<f64>,
    /// Upper bound on k_r k_i / |k|².
    #[arg(long)]
    pub product_tol: Option<f64>,
    /// Symmetry and semi-definiteness tolerance for the collision Jacobian.
    #[arg(long)]
    pub source_tol: Option<f64>,
}

impl TolArgs {
    pub fn apply(&self, model: &CollisionModel) -> Tolerances {
        let mut t = Tolerances::for_model(model);
        if let Some(x) = self.time_tol {
            t.time = x;
        }
        if let Some(x) = self.product_tol {
            t.product = x;
        }
        if let Some(x) = self.source_tol {
            t.source_symmetry = x;
            t.nsd = x;
        }
        t
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}
