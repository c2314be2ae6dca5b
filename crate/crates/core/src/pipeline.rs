//! End-to-end colorization with recorded intermediates.
//!
//! Stages run in a fixed order, each depending only on the ones before it:
//!
//! | stage          | recomputed when                                     |
//! |----------------|-----------------------------------------------------|
//! | `lineart`      | target, supplied line art, tone flag, blur, advanced line-art knobs |
//! | `segmentation` | starting ball size, strokes                         |
//! | `selection`    | hint                                                |
//! | `saturation`   | saturation increment                                |
//! | `quantization` | color count, seed                                   |
//! | `shading`      | shading toggle                                      |
//! | `final`        | always last                                         |
//!
//! [`rerun_from`] recomputes from the earliest stage a change touches and
//! copies everything upstream, bumping only the recomputed stages'
//! version counters.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::colorops::{
    apply_shading, composite_lines, increase_saturation, quantize_colors, select_segment_colors,
    QuantizeParams, SegmentPalette, ShadeParams,
};
use crate::error::{Error, Result};
use crate::io;
use crate::lineart::{binarize, remove_screentone};
use crate::params::PipelineParams;
use crate::raster::{resize_bilinear, BinaryImage, ColorImage, GreyImage};
use crate::segment::sidecar::{visualize, LabelSidecar};
use crate::segment::{merge_strokes, trapped_ball_segment, SegmentMap, StrokeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Lineart,
    Segmentation,
    Selection,
    Saturation,
    Quantization,
    Shading,
    Final,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Lineart,
        Stage::Segmentation,
        Stage::Selection,
        Stage::Saturation,
        Stage::Quantization,
        Stage::Shading,
        Stage::Final,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Lineart => "lineart",
            Stage::Segmentation => "segmentation",
            Stage::Selection => "selection",
            Stage::Saturation => "saturation",
            Stage::Quantization => "quantization",
            Stage::Shading => "shading",
            Stage::Final => "final",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|stage| stage.name() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

/// Something that changed between two runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Change {
    Target,
    Lineart,
    Screentones,
    BlurRadius,
    LineartAdvanced,
    InitialBall,
    Strokes,
    Hint,
    SaturationDelta,
    KColors,
    Seed,
    EnableShading,
}

impl Change {
    pub fn first_stage(self) -> Stage {
        match self {
            Change::Target
            | Change::Lineart
            | Change::Screentones
            | Change::BlurRadius
            | Change::LineartAdvanced => Stage::Lineart,
            Change::InitialBall | Change::Strokes => Stage::Segmentation,
            Change::Hint => Stage::Selection,
            Change::SaturationDelta => Stage::Saturation,
            Change::KColors | Change::Seed => Stage::Quantization,
            Change::EnableShading => Stage::Shading,
        }
    }

    /// Parameter fields that differ between `old` and `new`.
    pub fn between(old: &PipelineParams, new: &PipelineParams) -> Vec<Change> {
        let mut changes = Vec::new();
        if old.blur_radius != new.blur_radius {
            changes.push(Change::BlurRadius);
        }
        if old.adaptive_window != new.adaptive_window
            || old.adaptive_offset != new.adaptive_offset
            || old.min_speck_area != new.min_speck_area
            || old.binarize_threshold != new.binarize_threshold
        {
            changes.push(Change::LineartAdvanced);
        }
        if old.initial_ball != new.initial_ball {
            changes.push(Change::InitialBall);
        }
        if old.saturation_delta != new.saturation_delta {
            changes.push(Change::SaturationDelta);
        }
        if old.k_colors != new.k_colors {
            changes.push(Change::KColors);
        }
        if old.seed != new.seed {
            changes.push(Change::Seed);
        }
        if old.enable_shading != new.enable_shading {
            changes.push(Change::EnableShading);
        }
        changes
    }
}

/// A clean line drawing supplied alongside the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetLineart {
    /// Already an ink mask.
    Mask(BinaryImage),
    /// Screentone-free greyscale drawing, binarized with the configured
    /// threshold.
    Grey(GreyImage),
}

impl TargetLineart {
    fn dimensions(&self) -> (usize, usize) {
        match self {
            TargetLineart::Mask(m) => m.dimensions(),
            TargetLineart::Grey(g) => g.dimensions(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineInput {
    /// The monochrome page; may carry screentones.
    pub target_mono: GreyImage,
    pub target_lineart: Option<TargetLineart>,
    /// Coarse colorization at any resolution.
    pub hint: ColorImage,
    pub strokes: StrokeSet,
    /// Declared by the user. Without screentones the target is treated as
    /// clean line art and shading is skipped.
    pub has_screentones: bool,
}

impl PipelineInput {
    pub fn new(target_mono: GreyImage, hint: ColorImage) -> Self {
        Self {
            target_mono,
            target_lineart: None,
            hint,
            strokes: StrokeSet::default(),
            has_screentones: true,
        }
    }

    pub fn with_lineart(mut self, lineart: TargetLineart) -> Self {
        self.target_lineart = Some(lineart);
        self
    }

    pub fn with_strokes(mut self, strokes: StrokeSet) -> Self {
        self.strokes = strokes;
        self
    }

    pub fn with_screentones(mut self, has_screentones: bool) -> Self {
        self.has_screentones = has_screentones;
        self
    }

    /// Whether the tone-removal filter is what produces the line art.
    pub fn removes_screentones(&self) -> bool {
        self.target_lineart.is_none() && self.has_screentones
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.target_mono.dimensions()
    }
}

/// Every intermediate of one run, with per-stage version counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageOutputs {
    lineart: BinaryImage,
    /// Line art with the user's strokes merged in.
    edges: BinaryImage,
    segmentation: SegmentMap,
    palette: SegmentPalette,
    selection: ColorImage,
    saturation: ColorImage,
    quantization: Option<ColorImage>,
    shading: Option<ColorImage>,
    final_image: ColorImage,
    versions: [u64; 7],
    visualization_seed: u64,
}

impl StageOutputs {
    pub fn lineart(&self) -> &BinaryImage {
        &self.lineart
    }

    pub fn edges(&self) -> &BinaryImage {
        &self.edges
    }

    pub fn segmentation(&self) -> &SegmentMap {
        &self.segmentation
    }

    pub fn palette(&self) -> &SegmentPalette {
        &self.palette
    }

    pub fn selection(&self) -> &ColorImage {
        &self.selection
    }

    pub fn saturation(&self) -> &ColorImage {
        &self.saturation
    }

    pub fn quantization(&self) -> Option<&ColorImage> {
        self.quantization.as_ref()
    }

    pub fn shading(&self) -> Option<&ColorImage> {
        self.shading.as_ref()
    }

    pub fn final_image(&self) -> &ColorImage {
        &self.final_image
    }

    pub fn version(&self, stage: Stage) -> u64 {
        self.versions[stage.index()]
    }

    pub fn versions(&self) -> impl Iterator<Item = (Stage, u64)> + '_ {
        Stage::ALL.into_iter().map(|s| (s, self.version(s)))
    }

    /// The stage rendered as a color image, or `None` for a skipped stage.
    /// Line art is black on white; the segmentation is false-colored.
    pub fn stage_image(&self, stage: Stage) -> Option<ColorImage> {
        match stage {
            Stage::Lineart => Some(self.lineart.map(|ink| if ink { [0; 3] } else { [255; 3] })),
            Stage::Segmentation => Some(visualize(&self.segmentation, self.visualization_seed)),
            Stage::Selection => Some(self.selection.clone()),
            Stage::Saturation => Some(self.saturation.clone()),
            Stage::Quantization => self.quantization.clone(),
            Stage::Shading => self.shading.clone(),
            Stage::Final => Some(self.final_image.clone()),
        }
    }

    pub fn stage_png(&self, stage: Stage) -> Option<Vec<u8>> {
        match stage {
            Stage::Lineart => Some(io::encode_mask_png(&self.lineart)),
            _ => self
                .stage_image(stage)
                .map(|img| io::encode_color_png(&img)),
        }
    }

    /// Writes `<stage>.png` for every computed stage plus the label sidecar
    /// (`segmentation.json`) and the palette (`palette.json`).
    pub fn dump(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| Error::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        for stage in Stage::ALL {
            if let Some(png) = self.stage_png(stage) {
                let path = dir.join(format!("{}.png", stage.name()));
                std::fs::write(&path, png).map_err(io_err(&path))?;
            }
        }
        let sidecar = dir.join("segmentation.json");
        std::fs::write(&sidecar, LabelSidecar::encode(&self.segmentation).to_json())
            .map_err(io_err(&sidecar))?;
        let palette = dir.join("palette.json");
        std::fs::write(&palette, self.palette.to_json()).map_err(io_err(&palette))?;
        Ok(())
    }
}

/// Runs every stage.
pub fn run(input: &PipelineInput, params: &PipelineParams) -> Result<StageOutputs> {
    compute(None, Stage::Lineart, input, params)
}

/// Recomputes the stages affected by `changed`, reusing the rest of
/// `outputs`, which must come from a run on the same input (apart from the
/// listed changes).
pub fn rerun_from(
    outputs: &StageOutputs,
    input: &PipelineInput,
    params: &PipelineParams,
    changed: &[Change],
) -> Result<StageOutputs> {
    match changed.iter().map(|c| c.first_stage()).min() {
        None => Ok(outputs.clone()),
        Some(start) => compute(Some(outputs), start, input, params),
    }
}

fn validate(input: &PipelineInput, params: &PipelineParams) -> Result<()> {
    params.validate(input.removes_screentones()).map_err(|e| {
        let stage = match e.field {
            "initial_ball" => Stage::Segmentation,
            "saturation_delta" => Stage::Saturation,
            "k_colors" => Stage::Quantization,
            _ => Stage::Lineart,
        };
        Error::param(stage.name(), e)
    })?;
    if let Some(lineart) = &input.target_lineart {
        if lineart.dimensions() != input.dimensions() {
            return Err(Error::DimensionMismatch {
                stage: "lineart",
                expected: input.dimensions(),
                actual: lineart.dimensions(),
            });
        }
    }
    let (w, h) = input.dimensions();
    input.strokes.check_bounds(w, h)?;
    Ok(())
}

fn compute(
    previous: Option<&StageOutputs>,
    start: Stage,
    input: &PipelineInput,
    params: &PipelineParams,
) -> Result<StageOutputs> {
    validate(input, params)?;
    let from = |stage: Stage| previous.is_none() || stage >= start;
    let reuse = previous.filter(|_| start > Stage::Lineart);

    let lineart = match reuse {
        Some(prev) if !from(Stage::Lineart) => prev.lineart.clone(),
        _ => extract_lineart(
            &input.target_mono,
            input.target_lineart.as_ref(),
            input.has_screentones,
            params,
        )?,
    };

    let (edges, segmentation) = match reuse {
        Some(prev) if !from(Stage::Segmentation) => (prev.edges.clone(), prev.segmentation.clone()),
        _ => {
            let edges = merge_strokes(&lineart, &input.strokes)?;
            let segmentation = trapped_ball_segment(&edges, params.ball())?;
            (edges, segmentation)
        }
    };

    let (selection, palette) = match reuse {
        Some(prev) if !from(Stage::Selection) => (prev.selection.clone(), prev.palette.clone()),
        _ => {
            let (w, h) = segmentation.dimensions();
            let hint = resize_bilinear(&input.hint, w, h);
            select_segment_colors(&segmentation, &hint)?
        }
    };

    let saturation = match reuse {
        Some(prev) if !from(Stage::Saturation) => prev.saturation.clone(),
        _ => increase_saturation(&selection, params.saturation_delta as u8, &edges)?,
    };

    let quantization = match reuse {
        Some(prev) if !from(Stage::Quantization) => prev.quantization.clone(),
        _ => match params.k_colors {
            Some(k) => Some(quantize_colors(
                &saturation,
                &QuantizeParams::new(k as usize, params.seed),
                &edges,
            )?),
            None => None,
        },
    };

    let shading = match reuse {
        Some(prev) if !from(Stage::Shading) => prev.shading.clone(),
        _ if input.has_screentones && params.enable_shading => Some(apply_shading(
            quantization.as_ref().unwrap_or(&saturation),
            &input.target_mono,
            &ShadeParams::for_blur_radius(params.blur_radius as usize),
        )?),
        _ => None,
    };

    let flat = shading
        .as_ref()
        .or(quantization.as_ref())
        .unwrap_or(&saturation);
    let final_image = composite_lines(flat, &edges)?;

    let mut versions = previous.map_or([0; 7], |p| p.versions);
    for stage in Stage::ALL {
        if from(stage) {
            versions[stage.index()] += 1;
        }
    }
    Ok(StageOutputs {
        lineart,
        edges,
        segmentation,
        palette,
        selection,
        saturation,
        quantization,
        shading,
        final_image,
        versions,
        visualization_seed: params.seed,
    })
}

/// The line-art stage on its own: the supplied drawing if any, otherwise
/// the target with screentones removed or simply binarized.
pub fn extract_lineart(
    target_mono: &GreyImage,
    target_lineart: Option<&TargetLineart>,
    has_screentones: bool,
    params: &PipelineParams,
) -> Result<BinaryImage> {
    let removes = target_lineart.is_none() && has_screentones;
    params
        .validate(removes)
        .map_err(|e| Error::param(Stage::Lineart.name(), e))?;
    match target_lineart {
        Some(TargetLineart::Mask(mask)) => {
            target_mono.ensure_same_dims(mask, "lineart")?;
            Ok(mask.clone())
        }
        Some(TargetLineart::Grey(grey)) => {
            target_mono.ensure_same_dims(grey, "lineart")?;
            Ok(binarize(grey, params.binarize_threshold))
        }
        None if has_screentones => remove_screentone(target_mono, &params.lineart()),
        None => Ok(binarize(target_mono, params.binarize_threshold)),
    }
}
