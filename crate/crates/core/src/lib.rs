//! Colorization of monochrome manga pages and line art from a coarse
//! color hint.
//!
//! The stages, in order:
//!
//! 1. line-art extraction ([`lineart`]): Gaussian pre-blur, adaptive
//!    threshold and despeckling to drop screentones, or binarization of a
//!    clean, user-supplied drawing;
//! 2. optional gap-closing strokes merged into the ink mask;
//! 3. trapped-ball segmentation ([`segment`]);
//! 4. per-segment mean color selection from the resized hint, saturation
//!    increase, optional k-means quantization and optional shading derived
//!    from the screentones ([`colorops`]);
//! 5. compositing the outlines back on top.
//!
//! [`pipeline`] strings the stages together, records every intermediate,
//! and can recompute only the stages affected by a parameter change.

pub mod colorops;
pub mod error;
pub mod io;
pub mod lineart;
pub mod params;
pub mod pipeline;
pub mod raster;
pub mod segment;

pub use colorops::{QuantizeParams, SegmentPalette, ShadeParams};
pub use error::{Error, ParamError, Result};
pub use lineart::LineartParams;
pub use params::{PipelineParams, Tunable};
pub use pipeline::{Change, PipelineInput, Stage, StageOutputs, TargetLineart};
pub use raster::{BinaryImage, ColorImage, GreyImage, HsvTriple, Raster, Rgb};
pub use segment::{BallSchedule, SegmentMap, SegmentRecord, Stroke, StrokeSet};
