//! Pipeline parameter flags and their validation.

use std::path::PathBuf;

use clap::Args;
use mangahue::{ParamError, PipelineParams, Tunable};

use crate::CliError;

fn tunable_help(t: Tunable, what: &str, extra: &str) -> String {
    let (lo, hi) = t.recommended();
    format!(
        "{what} [permissible {}; recommended {lo}-{hi}{extra}]",
        t.permissible()
    )
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// JSON file of pipeline parameters; flags override its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, value_name = "PX", allow_negative_numbers = true,
          help = tunable_help(Tunable::BlurRadius, "Gaussian blur radius for screentone removal", ""))]
    pub blur: Option<i64>,

    #[arg(long, value_name = "PX", allow_negative_numbers = true,
          help = tunable_help(Tunable::InitialBall, "Starting trapped-ball diameter", ""))]
    pub ball: Option<i64>,

    #[arg(long, value_name = "N", allow_negative_numbers = true,
          help = tunable_help(
              Tunable::SaturationDelta,
              "Saturation increase on the 0-255 HSV scale",
              ", i.e. roughly 5-10% of full scale",
          ))]
    pub saturation: Option<i64>,

    #[arg(long, value_name = "K", allow_negative_numbers = true,
          help = tunable_help(
              Tunable::KColors,
              "Quantize to K colors; omit to skip quantization",
              ", optimum often 5-12",
          ))]
    pub colors: Option<i64>,

    /// Seed for k-means initialization and the segmentation preview colors
    #[arg(long)]
    pub seed: Option<u64>,

    /// Skip the screentone shading pass
    #[arg(long)]
    pub no_shading: bool,

    /// Adaptive threshold window (odd, >= 3)
    #[arg(long, value_name = "PX")]
    pub adaptive_window: Option<u32>,

    /// Adaptive threshold offset below the local mean
    #[arg(long, value_name = "LEVEL")]
    pub adaptive_offset: Option<u8>,

    /// Ink specks smaller than this are dropped
    #[arg(long, value_name = "PX")]
    pub min_speck_area: Option<u32>,

    /// Grey level below which clean line art counts as ink
    #[arg(long, value_name = "LEVEL")]
    pub threshold: Option<u8>,
}

impl ParamArgs {
    /// Builds the parameter set and checks it against the permissible
    /// ranges. `removes_screentones` says whether the blur radius binds.
    pub fn resolve(&self, removes_screentones: bool) -> Result<PipelineParams, CliError> {
        let mut params = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
                PipelineParams::from_json(&text)
                    .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?
            }
            None => PipelineParams::default(),
        };

        let tunable = |t: Tunable, v: i64| -> Result<u32, CliError> {
            // Zero blur stays legal until we know whether removal runs.
            if !(t == Tunable::BlurRadius && v == 0) {
                t.check(v).map_err(|e| flag_error(t.cli_flag(), e))?;
            }
            u32::try_from(v)
                .map_err(|_| CliError::Usage(format!("{} = {v} is too large", t.cli_flag())))
        };
        if let Some(v) = self.blur {
            params.blur_radius = tunable(Tunable::BlurRadius, v)?;
        }
        if let Some(v) = self.ball {
            params.initial_ball = tunable(Tunable::InitialBall, v)?;
        }
        if let Some(v) = self.saturation {
            params.saturation_delta = tunable(Tunable::SaturationDelta, v)?;
        }
        if let Some(v) = self.colors {
            params.k_colors = Some(tunable(Tunable::KColors, v)?);
        }
        if let Some(v) = self.seed {
            params.seed = v;
        }
        if self.no_shading {
            params.enable_shading = false;
        }
        if let Some(v) = self.adaptive_window {
            params.adaptive_window = v;
        }
        if let Some(v) = self.adaptive_offset {
            params.adaptive_offset = v;
        }
        if let Some(v) = self.min_speck_area {
            params.min_speck_area = v;
        }
        if let Some(v) = self.threshold {
            params.binarize_threshold = v;
        }

        params
            .validate(removes_screentones)
            .map_err(|e| match self.flag_for(e.field) {
                Some(flag) => flag_error(flag, e),
                None => CliError::Usage(format!("config: {e}")),
            })?;
        Ok(params)
    }

    /// The flag that set `field`, or `None` when the value came from the
    /// config file.
    fn flag_for(&self, field: &str) -> Option<&'static str> {
        let (set, flag) = match field {
            "blur_radius" => (self.blur.is_some(), "--blur"),
            "initial_ball" => (self.ball.is_some(), "--ball"),
            "saturation_delta" => (self.saturation.is_some(), "--saturation"),
            "k_colors" => (self.colors.is_some(), "--colors"),
            "adaptive_window" => (self.adaptive_window.is_some(), "--adaptive-window"),
            _ => (false, ""),
        };
        set.then_some(flag)
    }
}

fn flag_error(flag: &str, e: ParamError) -> CliError {
    CliError::Usage(format!(
        "{flag} = {} is out of range: permissible {}",
        e.value, e.permissible
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn usage(r: Result<PipelineParams, CliError>) -> String {
        match r {
            Err(CliError::Usage(m)) => m,
            other => panic!("expected a usage error, got {other:?}"),
        }
    }

    #[test]
    fn flags_override_defaults() {
        let args = ParamArgs {
            ball: Some(5),
            colors: Some(8),
            no_shading: true,
            ..Default::default()
        };
        let p = args.resolve(true).unwrap();
        assert_eq!(
            (p.initial_ball, p.k_colors, p.enable_shading),
            (5, Some(8), false)
        );
    }

    #[test]
    fn out_of_range_flags_name_the_flag() {
        let cases = [
            (
                ParamArgs {
                    ball: Some(1),
                    ..Default::default()
                },
                "--ball = 1",
                "> 1",
            ),
            (
                ParamArgs {
                    saturation: Some(255),
                    ..Default::default()
                },
                "--saturation = 255",
                "< 255",
            ),
            (
                ParamArgs {
                    colors: Some(0),
                    ..Default::default()
                },
                "--colors = 0",
                "> 0",
            ),
            (
                ParamArgs {
                    blur: Some(-1),
                    ..Default::default()
                },
                "--blur = -1",
                "> 0",
            ),
        ];
        for (args, prefix, range) in cases {
            let msg = usage(args.resolve(true));
            assert!(msg.starts_with(prefix), "{msg}");
            assert!(msg.contains(range), "{msg}");
        }
    }

    #[test]
    fn zero_blur_depends_on_removal() {
        let args = ParamArgs {
            blur: Some(0),
            ..Default::default()
        };
        assert!(args.resolve(false).is_ok());
        assert!(usage(args.resolve(true)).contains("--blur = 0"));
    }
}
