//! Flat `key = value` configuration with sections (TOML), mapped onto the
//! solver types.

use serde::{Deserialize, Serialize};

use css2d_core::{DataKind, Error, Grid2D, PicardConfig, Result, RhsMode, RunOptions, Scheme, StepperConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub grid: GridSection,
    pub physics: PhysicsSection,
    pub stepper: StepperSection,
    pub data: DataSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub picard: PicardSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub kappa: f64,
    pub s: f64,
    #[serde(default = "default_k1")]
    pub k1: f64,
}

fn default_k1() -> f64 {
    css2d_core::DEFAULT_K1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_mu: Option<u32>,
    #[serde(default = "default_true")]
    pub gauge_coupling: bool,
}

fn default_mode() -> String {
    "direct".into()
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub kind: String,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavevector: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_driver")]
    pub driver: String,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default = "default_outdir")]
    pub output_dir: String,
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
}

fn default_driver() -> String {
    "evolve".into()
}

fn default_stride() -> usize {
    1
}

fn default_outdir() -> String {
    "out".into()
}

fn default_blowup() -> f64 {
    1e3
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            driver: default_driver(),
            snapshot_stride: default_stride(),
            output_dir: default_outdir(),
            blowup_factor: default_blowup(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardSection {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_tol_outer")]
    pub tol_outer: f64,
    #[serde(default = "default_max_outer")]
    pub max_outer: usize,
    #[serde(default = "default_max_inner")]
    pub max_inner: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_delta() -> f64 {
    0.5
}

fn default_tol_outer() -> f64 {
    1e-12
}

fn default_max_outer() -> usize {
    8
}

fn default_max_inner() -> usize {
    24
}

fn default_steps() -> usize {
    48
}

impl Default for PicardSection {
    fn default() -> Self {
        Self {
            delta: default_delta(),
            tol_outer: default_tol_outer(),
            max_outer: default_max_outer(),
            max_inner: default_max_inner(),
            steps: default_steps(),
        }
    }
}

impl SimConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.stepper()?;
        self.data_kind()?;
        if self.physics.s < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "physics.s = {} must be >= 1",
                self.physics.s
            )));
        }
        if !self.physics.k1.is_finite() || self.physics.k1 <= 0.0 {
            return Err(Error::InvalidConfig("physics.k1 must be positive".into()));
        }
        if !self.stepper.t_end.is_finite() || self.stepper.t_end <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "stepper.t_end = {} must be positive",
                self.stepper.t_end
            )));
        }
        if self.run.snapshot_stride == 0 {
            return Err(Error::InvalidConfig("run.snapshot_stride must be >= 1".into()));
        }
        if !self.run.blowup_factor.is_finite() || self.run.blowup_factor <= 0.0 {
            return Err(Error::InvalidConfig("run.blowup_factor must be positive".into()));
        }
        match self.run.driver.as_str() {
            "evolve" | "picard" => {}
            other => {
                return Err(Error::InvalidConfig(format!(
                    "run.driver = {other:?} (expected \"evolve\" or \"picard\")"
                )))
            }
        }
        self.picard_config()?.validate()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.grid.n, self.grid.length)
    }

    pub fn stepper(&self) -> Result<StepperConfig> {
        let mode = match self.stepper.mode.as_str() {
            "direct" => RhsMode::Direct,
            "parasplit" => RhsMode::Parasplit,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "stepper.mode = {other:?} (expected \"direct\" or \"parasplit\")"
                )))
            }
        };
        let cfg = StepperConfig {
            dt: self.stepper.dt,
            scheme: Scheme::StrangRk4,
            cutoff_mu: self.stepper.cutoff_mu,
            kappa: self.physics.kappa,
            mode,
            gauge_coupling: self.stepper.gauge_coupling,
        };
        cfg.validate()?;
        if let Some(mu) = cfg.cutoff_mu {
            if !mu.is_power_of_two() {
                return Err(Error::InvalidConfig(format!(
                    "stepper.cutoff_mu = {mu} must be dyadic"
                )));
            }
        }
        Ok(cfg)
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            snapshot_stride: self.run.snapshot_stride,
            blowup_factor: self.run.blowup_factor,
            s: self.physics.s,
        }
    }

    pub fn data_kind(&self) -> Result<DataKind> {
        match self.data.kind.as_str() {
            "gaussian" => Ok(DataKind::Gaussian {
                amplitude: self.data.amplitude,
                width: self
                    .data
                    .width
                    .ok_or_else(|| Error::InvalidConfig("data.width required for gaussian".into()))?,
                center: self.data.center.map(|c| (c[0], c[1])),
            }),
            "plane_wave" => {
                let k = self.data.wavevector.ok_or_else(|| {
                    Error::InvalidConfig("data.wavevector required for plane_wave".into())
                })?;
                Ok(DataKind::PlaneWave {
                    amplitude: self.data.amplitude,
                    wavevector: (k[0], k[1]),
                })
            }
            "random_hs" => {
                // Seed is mandatory so runs stay reproducible.
                let seed = self.data.seed.ok_or_else(|| {
                    Error::InvalidConfig("data.seed required for random_hs".into())
                })?;
                Ok(DataKind::RandomHs {
                    norm: self.data.amplitude,
                    s: self.physics.s,
                    slope: self.data.slope,
                    seed,
                })
            }
            other => Err(Error::InvalidConfig(format!(
                "data.kind = {other:?} (expected gaussian | plane_wave | random_hs)"
            ))),
        }
    }

    pub fn picard_config(&self) -> Result<PicardConfig> {
        Ok(PicardConfig {
            s: self.physics.s,
            delta: self.picard.delta,
            kappa: self.physics.kappa,
            steps: self.picard.steps,
            tol_outer: self.picard.tol_outer,
            max_outer: self.picard.max_outer,
            max_inner: self.picard.max_inner,
        })
    }

    /// Output directory after the `CSS2D_OUTDIR` override.
    pub fn output_dir(&self) -> String {
        std::env::var("CSS2D_OUTDIR").unwrap_or_else(|_| self.run.output_dir.clone())
    }
}
