//! Python bindings. Images cross the boundary as encoded PNG/JPEG bytes.

use std::collections::BTreeMap;

use mangahue::colorops::{quantize_colors, shading_subtrahend as subtrahend, QuantizeParams};
use mangahue::pipeline::{self, Change, PipelineInput, Stage, StageOutputs, TargetLineart};
use mangahue::raster::{hsv_to_rgb as to_rgb, rgb_to_hsv as to_hsv};
use mangahue::segment::sidecar::{visualize, LabelSidecar};
use mangahue::segment::{merge_strokes, trapped_ball_segment};
use mangahue::{io, BinaryImage, Error, HsvTriple, PipelineParams, SegmentMap, StrokeSet, Tunable};
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

create_exception!(
    mangahue,
    MangahueError,
    PyValueError,
    "Invalid input or parameters."
);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => MangahueError::new_err(e.to_string()),
    }
}

fn stage_from_name(name: &str) -> PyResult<Stage> {
    name.parse().map_err(|e: String| PyValueError::new_err(e))
}

/// Pipeline parameters. Ranges are checked when a pipeline runs or on
/// `validate()`, not on assignment.
#[pyclass(
    name = "Params",
    module = "mangahue",
    get_all,
    set_all,
    eq,
    from_py_object
)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PyParams {
    pub blur_radius: u32,
    pub initial_ball: u32,
    pub saturation_delta: u32,
    pub k_colors: Option<u32>,
    pub enable_shading: bool,
    pub seed: u64,
    pub adaptive_window: u32,
    pub adaptive_offset: u8,
    pub min_speck_area: u32,
    pub binarize_threshold: u8,
}

impl From<PipelineParams> for PyParams {
    fn from(p: PipelineParams) -> Self {
        Self {
            blur_radius: p.blur_radius,
            initial_ball: p.initial_ball,
            saturation_delta: p.saturation_delta,
            k_colors: p.k_colors,
            enable_shading: p.enable_shading,
            seed: p.seed,
            adaptive_window: p.adaptive_window,
            adaptive_offset: p.adaptive_offset,
            min_speck_area: p.min_speck_area,
            binarize_threshold: p.binarize_threshold,
        }
    }
}

impl From<&PyParams> for PipelineParams {
    fn from(p: &PyParams) -> Self {
        Self {
            blur_radius: p.blur_radius,
            initial_ball: p.initial_ball,
            saturation_delta: p.saturation_delta,
            k_colors: p.k_colors,
            enable_shading: p.enable_shading,
            seed: p.seed,
            adaptive_window: p.adaptive_window,
            adaptive_offset: p.adaptive_offset,
            min_speck_area: p.min_speck_area,
            binarize_threshold: p.binarize_threshold,
        }
    }
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (*, blur_radius=None, initial_ball=None, saturation_delta=None, k_colors=None,
                        enable_shading=None, seed=None))]
    fn new(
        blur_radius: Option<u32>,
        initial_ball: Option<u32>,
        saturation_delta: Option<u32>,
        k_colors: Option<u32>,
        enable_shading: Option<bool>,
        seed: Option<u64>,
    ) -> Self {
        let mut p = PyParams::from(PipelineParams::default());
        p.blur_radius = blur_radius.unwrap_or(p.blur_radius);
        p.initial_ball = initial_ball.unwrap_or(p.initial_ball);
        p.saturation_delta = saturation_delta.unwrap_or(p.saturation_delta);
        p.k_colors = k_colors.or(p.k_colors);
        p.enable_shading = enable_shading.unwrap_or(p.enable_shading);
        p.seed = seed.unwrap_or(p.seed);
        p
    }

    /// Raises `MangahueError` naming the first out-of-range field.
    #[pyo3(signature = (screentone_removal=true))]
    fn validate(&self, screentone_removal: bool) -> PyResult<()> {
        PipelineParams::from(self)
            .validate(screentone_removal)
            .map_err(|e| MangahueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        PipelineParams::from(self).to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        PipelineParams::from_json(text)
            .map(Self::from)
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("{self:?}").replacen("PyParams", "Params", 1)
    }
}

/// Permissible and recommended ranges of the four tunable parameters.
#[pyfunction]
fn tunables() -> BTreeMap<&'static str, (i64, Option<i64>, &'static str, (i64, i64))> {
    Tunable::ALL
        .into_iter()
        .map(|t| {
            let (lo, hi) = t.bounds();
            (t.field(), (lo, hi, t.permissible(), t.recommended()))
        })
        .collect()
}

/// Every intermediate of a pipeline run.
#[pyclass(name = "Outputs", module = "mangahue", frozen)]
pub struct PyOutputs {
    inner: StageOutputs,
}

#[pymethods]
impl PyOutputs {
    /// PNG bytes of a stage, or `None` for a skipped stage.
    fn stage_png<'py>(&self, py: Python<'py>, name: &str) -> PyResult<Option<Bound<'py, PyBytes>>> {
        let stage = stage_from_name(name)?;
        Ok(self
            .inner
            .stage_png(stage)
            .map(|png| PyBytes::new(py, &png)))
    }

    fn final_png<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &io::encode_color_png(self.inner.final_image()))
    }

    #[getter]
    fn versions(&self) -> BTreeMap<&'static str, u64> {
        self.inner.versions().map(|(s, v)| (s.name(), v)).collect()
    }

    #[getter]
    fn segment_count(&self) -> usize {
        self.inner.segmentation().segment_count()
    }

    #[getter]
    fn dimensions(&self) -> (usize, usize) {
        self.inner.final_image().dimensions()
    }

    fn palette_json(&self) -> String {
        self.inner.palette().to_json()
    }

    /// Run-length encoded segment labels.
    fn labels_json(&self) -> String {
        LabelSidecar::encode(self.inner.segmentation()).to_json()
    }

    /// Writes `<stage>.png`, `segmentation.json` and `palette.json`.
    fn dump(&self, dir: std::path::PathBuf) -> PyResult<()> {
        self.inner.dump(dir).map_err(py_err)
    }
}

fn build_input(
    target: &[u8],
    hint: &[u8],
    lineart: Option<&[u8]>,
    strokes: Option<&str>,
    has_screentones: bool,
) -> PyResult<PipelineInput> {
    let mut input = PipelineInput::new(
        io::decode_grey(target).map_err(py_err)?,
        io::decode_color(hint).map_err(py_err)?,
    )
    .with_screentones(has_screentones);
    if let Some(bytes) = lineart {
        input = input.with_lineart(TargetLineart::Grey(io::decode_grey(bytes).map_err(py_err)?));
    }
    if let Some(json) = strokes {
        input = input.with_strokes(StrokeSet::from_json(json).map_err(py_err)?);
    }
    Ok(input)
}

/// Runs the whole pipeline on encoded image bytes.
#[pyfunction]
#[pyo3(signature = (target, hint, params=None, *, lineart=None, strokes=None, has_screentones=true))]
fn colorize(
    py: Python<'_>,
    target: &[u8],
    hint: &[u8],
    params: Option<PyParams>,
    lineart: Option<&[u8]>,
    strokes: Option<&str>,
    has_screentones: bool,
) -> PyResult<PyOutputs> {
    let input = build_input(target, hint, lineart, strokes, has_screentones)?;
    let params = params
        .as_ref()
        .map(PipelineParams::from)
        .unwrap_or_default();
    let inner = py
        .detach(|| pipeline::run(&input, &params))
        .map_err(py_err)?;
    Ok(PyOutputs { inner })
}

/// Keeps a pipeline's outputs current while parameters, hint and strokes
/// change, recomputing only the affected stages.
#[pyclass(name = "Session", module = "mangahue")]
pub struct PySession {
    input: PipelineInput,
    params: PipelineParams,
    outputs: StageOutputs,
}

impl PySession {
    fn apply(
        &mut self,
        py: Python<'_>,
        input: PipelineInput,
        params: PipelineParams,
        changes: &[Change],
    ) -> PyResult<()> {
        let outputs = py
            .detach(|| pipeline::rerun_from(&self.outputs, &input, &params, changes))
            .map_err(py_err)?;
        self.input = input;
        self.params = params;
        self.outputs = outputs;
        Ok(())
    }
}

#[pymethods]
impl PySession {
    #[new]
    #[pyo3(signature = (target, hint, params=None, *, lineart=None, strokes=None, has_screentones=true))]
    fn new(
        py: Python<'_>,
        target: &[u8],
        hint: &[u8],
        params: Option<PyParams>,
        lineart: Option<&[u8]>,
        strokes: Option<&str>,
        has_screentones: bool,
    ) -> PyResult<Self> {
        let input = build_input(target, hint, lineart, strokes, has_screentones)?;
        let params = params
            .as_ref()
            .map(PipelineParams::from)
            .unwrap_or_default();
        let outputs = py
            .detach(|| pipeline::run(&input, &params))
            .map_err(py_err)?;
        Ok(Self {
            input,
            params,
            outputs,
        })
    }

    #[getter]
    fn params(&self) -> PyParams {
        self.params.clone().into()
    }

    #[getter]
    fn outputs(&self) -> PyOutputs {
        PyOutputs {
            inner: self.outputs.clone(),
        }
    }

    /// Replaces the parameters; on error the session is unchanged.
    fn set_params(&mut self, py: Python<'_>, params: PyParams) -> PyResult<()> {
        let params = PipelineParams::from(&params);
        let changes = Change::between(&self.params, &params);
        self.apply(py, self.input.clone(), params, &changes)
    }

    fn set_hint(&mut self, py: Python<'_>, hint: &[u8]) -> PyResult<()> {
        let mut input = self.input.clone();
        input.hint = io::decode_color(hint).map_err(py_err)?;
        self.apply(py, input, self.params.clone(), &[Change::Hint])
    }

    /// Appends strokes given as JSON `[{"width": w, "points": [[x, y], ...]}]`.
    fn add_strokes(&mut self, py: Python<'_>, strokes: &str) -> PyResult<()> {
        let mut input = self.input.clone();
        input
            .strokes
            .extend(StrokeSet::from_json(strokes).map_err(py_err)?);
        self.apply(py, input, self.params.clone(), &[Change::Strokes])
    }
}

/// Line art of a page as a black-on-white PNG.
#[pyfunction]
#[pyo3(signature = (target, params=None, has_screentones=true))]
fn extract_lineart<'py>(
    py: Python<'py>,
    target: &[u8],
    params: Option<PyParams>,
    has_screentones: bool,
) -> PyResult<Bound<'py, PyBytes>> {
    let mono = io::decode_grey(target).map_err(py_err)?;
    let params = params
        .as_ref()
        .map(PipelineParams::from)
        .unwrap_or_default();
    let lines = py
        .detach(|| pipeline::extract_lineart(&mono, None, has_screentones, &params))
        .map_err(py_err)?;
    Ok(PyBytes::new(py, &io::encode_mask_png(&lines)))
}

/// A trapped-ball segmentation.
#[pyclass(name = "Segmentation", module = "mangahue", frozen)]
pub struct PySegmentation {
    inner: SegmentMap,
}

#[pymethods]
impl PySegmentation {
    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn segment_count(&self) -> usize {
        self.inner.segment_count()
    }

    /// Row-major labels; 0 marks line pixels.
    fn labels(&self) -> Vec<u32> {
        self.inner.labels().pixels().to_vec()
    }

    fn label(&self, x: usize, y: usize) -> PyResult<u32> {
        if x >= self.inner.width() || y >= self.inner.height() {
            return Err(PyValueError::new_err(format!(
                "({x}, {y}) is outside the image"
            )));
        }
        Ok(self.inner.label(x, y))
    }

    fn to_json(&self) -> String {
        LabelSidecar::encode(&self.inner).to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = LabelSidecar::from_json(text)
            .and_then(|s| s.decode())
            .map_err(py_err)?;
        Ok(Self { inner })
    }

    /// False-color PNG preview.
    #[pyo3(signature = (seed=0))]
    fn preview_png<'py>(&self, py: Python<'py>, seed: u64) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &io::encode_color_png(&visualize(&self.inner, seed)))
    }
}

/// Segments a line drawing (dark pixels are lines) with the given
/// starting ball diameter.
#[pyfunction]
#[pyo3(signature = (lineart, initial_ball=3, strokes=None, threshold=128))]
fn segment(
    py: Python<'_>,
    lineart: &[u8],
    initial_ball: i64,
    strokes: Option<&str>,
    threshold: u8,
) -> PyResult<PySegmentation> {
    Tunable::InitialBall
        .check(initial_ball)
        .map_err(|e| MangahueError::new_err(e.to_string()))?;
    let grey = io::decode_grey(lineart).map_err(py_err)?;
    let lines = mangahue::lineart::binarize(&grey, threshold);
    let strokes = match strokes {
        Some(json) => StrokeSet::from_json(json).map_err(py_err)?,
        None => StrokeSet::default(),
    };
    let ball = mangahue::BallSchedule::new(initial_ball as usize)
        .map_err(|e| MangahueError::new_err(e.to_string()))?;
    let inner = py
        .detach(|| {
            merge_strokes(&lines, &strokes).and_then(|edges| trapped_ball_segment(&edges, ball))
        })
        .map_err(py_err)?;
    Ok(PySegmentation { inner })
}

/// Reduces an image to `k` colors with seeded k-means.
#[pyfunction]
#[pyo3(signature = (image, k, seed=0))]
fn quantize<'py>(
    py: Python<'py>,
    image: &[u8],
    k: i64,
    seed: u64,
) -> PyResult<Bound<'py, PyBytes>> {
    Tunable::KColors
        .check(k)
        .map_err(|e| MangahueError::new_err(e.to_string()))?;
    let img = io::decode_color(image).map_err(py_err)?;
    let (w, h) = img.dimensions();
    let none = BinaryImage::filled(w, h, false);
    let out = py
        .detach(|| quantize_colors(&img, &QuantizeParams::new(k as usize, seed), &none))
        .map_err(py_err)?;
    Ok(PyBytes::new(py, &io::encode_color_png(&out)))
}

/// `(h, s, v)` with hue in degrees and s, v in 0..=255.
#[pyfunction]
fn rgb_to_hsv(r: u8, g: u8, b: u8) -> (f64, u8, u8) {
    let hsv = to_hsv([r, g, b]);
    (hsv.h, hsv.s, hsv.v)
}

#[pyfunction]
fn hsv_to_rgb(h: f64, s: u8, v: u8) -> (u8, u8, u8) {
    let [r, g, b] = to_rgb(HsvTriple { h, s, v });
    (r, g, b)
}

/// Amount subtracted from each channel where the blurred page has grey
/// level `m`.
#[pyfunction]
fn shading_subtrahend(m: u8) -> u8 {
    subtrahend(m)
}

#[pymodule]
#[pyo3(name = "mangahue")]
fn mangahue_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MangahueError", m.py().get_type::<MangahueError>())?;
    m.add("STAGES", Stage::ALL.map(Stage::name).to_vec())?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyOutputs>()?;
    m.add_class::<PySession>()?;
    m.add_class::<PySegmentation>()?;
    m.add_function(wrap_pyfunction!(tunables, m)?)?;
    m.add_function(wrap_pyfunction!(colorize, m)?)?;
    m.add_function(wrap_pyfunction!(extract_lineart, m)?)?;
    m.add_function(wrap_pyfunction!(segment, m)?)?;
    m.add_function(wrap_pyfunction!(quantize, m)?)?;
    m.add_function(wrap_pyfunction!(rgb_to_hsv, m)?)?;
    m.add_function(wrap_pyfunction!(hsv_to_rgb, m)?)?;
    m.add_function(wrap_pyfunction!(shading_subtrahend, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_round_trip() {
        let mut p = PipelineParams::default();
        p.k_colors = Some(7);
        p.adaptive_offset = 3;
        assert_eq!(PipelineParams::from(&PyParams::from(p.clone())), p);
    }
}
