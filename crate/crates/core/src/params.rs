//! The user-tunable parameter set and its permissible ranges.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::lineart::LineartParams;
use crate::segment::BallSchedule;

/// The four per-image knobs a user is expected to tune.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tunable {
    BlurRadius,
    InitialBall,
    SaturationDelta,
    KColors,
}

impl Tunable {
    pub const ALL: [Tunable; 4] = [
        Tunable::BlurRadius,
        Tunable::InitialBall,
        Tunable::SaturationDelta,
        Tunable::KColors,
    ];

    /// Field name in JSON configs and the tuner API.
    pub fn field(self) -> &'static str {
        match self {
            Tunable::BlurRadius => "blur_radius",
            Tunable::InitialBall => "initial_ball",
            Tunable::SaturationDelta => "saturation_delta",
            Tunable::KColors => "k_colors",
        }
    }

    pub fn cli_flag(self) -> &'static str {
        match self {
            Tunable::BlurRadius => "--blur",
            Tunable::InitialBall => "--ball",
            Tunable::SaturationDelta => "--saturation",
            Tunable::KColors => "--colors",
        }
    }

    pub fn permissible(self) -> &'static str {
        match self {
            Tunable::BlurRadius => "> 0",
            Tunable::InitialBall => "> 1",
            Tunable::SaturationDelta => "< 255",
            Tunable::KColors => "> 0",
        }
    }

    /// Inclusive integer bounds equivalent to [`permissible`](Self::permissible).
    /// Saturation is also bounded below by 0 because it is an increment.
    pub fn bounds(self) -> (i64, Option<i64>) {
        match self {
            Tunable::BlurRadius => (1, None),
            Tunable::InitialBall => (2, None),
            Tunable::SaturationDelta => (0, Some(254)),
            Tunable::KColors => (1, None),
        }
    }

    /// Advisory only; never enforced.
    pub fn recommended(self) -> (i64, i64) {
        match self {
            Tunable::BlurRadius => (1, 2),
            Tunable::InitialBall => (2, 5),
            Tunable::SaturationDelta => (10, 25),
            Tunable::KColors => (5, 20),
        }
    }

    pub fn check(self, value: i64) -> Result<(), ParamError> {
        let (lo, hi) = self.bounds();
        let permissible = if self == Tunable::SaturationDelta {
            ">= 0 and < 255"
        } else {
            self.permissible()
        };
        if value < lo || hi.is_some_and(|hi| value > hi) {
            return Err(ParamError {
                field: self.field(),
                value,
                permissible,
            });
        }
        Ok(())
    }
}

/// Everything that controls a pipeline run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineParams {
    /// Gaussian pre-blur before screentone removal; the shading blur is
    /// two pixels wider.
    pub blur_radius: u32,
    /// Starting trapped-ball diameter.
    pub initial_ball: u32,
    /// Additive increment on HSV saturation (0..=255 scale).
    pub saturation_delta: u32,
    /// Number of k-means colors; `None` skips quantization.
    pub k_colors: Option<u32>,
    /// Only has an effect when the target carries screentones.
    pub enable_shading: bool,
    pub seed: u64,
    pub adaptive_window: u32,
    pub adaptive_offset: u8,
    pub min_speck_area: u32,
    /// Threshold used when the line art is binarized directly.
    pub binarize_threshold: u8,
}

impl Default for PipelineParams {
    fn default() -> Self {
        let lineart = LineartParams::default();
        Self {
            blur_radius: lineart.blur_radius as u32,
            initial_ball: 3,
            saturation_delta: 15,
            k_colors: None,
            enable_shading: true,
            seed: 0,
            adaptive_window: lineart.adaptive_window as u32,
            adaptive_offset: lineart.adaptive_offset,
            min_speck_area: lineart.min_speck_area as u32,
            binarize_threshold: 128,
        }
    }
}

impl PipelineParams {
    /// Checks every tunable against its permissible range. The blur
    /// radius is only constrained when screentone removal will run.
    pub fn validate(&self, screentone_removal: bool) -> Result<(), ParamError> {
        if screentone_removal {
            Tunable::BlurRadius.check(self.blur_radius as i64)?;
        }
        Tunable::InitialBall.check(self.initial_ball as i64)?;
        Tunable::SaturationDelta.check(self.saturation_delta as i64)?;
        if let Some(k) = self.k_colors {
            Tunable::KColors.check(k as i64)?;
        }
        self.lineart().validate()
    }

    pub fn lineart(&self) -> LineartParams {
        LineartParams {
            blur_radius: self.blur_radius as usize,
            adaptive_window: self.adaptive_window as usize,
            adaptive_offset: self.adaptive_offset,
            min_speck_area: self.min_speck_area as usize,
        }
    }

    pub fn ball(&self) -> BallSchedule {
        BallSchedule {
            initial_diameter: self.initial_ball as usize,
        }
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        serde_json::from_str(text).map_err(|source| crate::Error::Json {
            what: "pipeline config",
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params always serialize")
    }
}
