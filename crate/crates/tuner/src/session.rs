//! One tuning session: the uploaded images, the current parameters and the
//! stage outputs kept in step with them.

use std::time::{SystemTime, UNIX_EPOCH};

use mangahue::pipeline::{self, Change, PipelineInput, Stage, StageOutputs, TargetLineart};
use mangahue::{ColorImage, GreyImage, PipelineParams, StrokeSet, Tunable};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::ApiError;

/// Key accepted by the params endpoint alongside the pipeline fields.
pub const SCREENTONES_KEY: &str = "has_screentones";

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    target: Option<GreyImage>,
    lineart: Option<GreyImage>,
    hint: Option<ColorImage>,
    strokes: StrokeSet,
    has_screentones: bool,
    params: PipelineParams,
    outputs: Option<StageOutputs>,
    created: SystemTime,
    updated: SystemTime,
}

impl Session {
    pub fn new(id: String) -> Self {
        let now = SystemTime::now();
        Self {
            id,
            target: None,
            lineart: None,
            hint: None,
            strokes: StrokeSet::default(),
            has_screentones: true,
            params: PipelineParams::default(),
            outputs: None,
            created: now,
            updated: now,
        }
    }

    pub fn params(&self) -> &PipelineParams {
        &self.params
    }

    pub fn outputs(&self) -> Option<&StageOutputs> {
        self.outputs.as_ref()
    }

    fn dimensions(&self) -> Option<(usize, usize)> {
        self.target
            .as_ref()
            .map(|t| t.dimensions())
            .or(self.lineart.as_ref().map(|l| l.dimensions()))
    }

    pub fn set_target(&mut self, target: GreyImage) -> Result<(), ApiError> {
        if let Some(l) = &self.lineart {
            check_dims("target", l.dimensions(), target.dimensions())?;
        }
        let mut next = self.clone();
        next.target = Some(target);
        next.commit(&[Change::Target]).map(|next| *self = next)
    }

    pub fn set_lineart(&mut self, lineart: GreyImage) -> Result<(), ApiError> {
        if let Some(t) = &self.target {
            check_dims("lineart", t.dimensions(), lineart.dimensions())?;
        }
        let mut next = self.clone();
        next.lineart = Some(lineart);
        next.commit(&[Change::Lineart]).map(|next| *self = next)
    }

    /// The hint may have any resolution; it is resampled to the target.
    pub fn set_hint(&mut self, hint: ColorImage) -> Result<(), ApiError> {
        let mut next = self.clone();
        next.hint = Some(hint);
        next.commit(&[Change::Hint]).map(|next| *self = next)
    }

    pub fn add_strokes(&mut self, strokes: StrokeSet) -> Result<(), ApiError> {
        if let Some((w, h)) = self.dimensions() {
            strokes.check_bounds(w, h)?;
        }
        let mut next = self.clone();
        next.strokes.extend(strokes);
        next.commit(&[Change::Strokes]).map(|next| *self = next)
    }

    /// Merges a partial JSON object into the parameters. Tunable fields are
    /// range-checked before deserializing so the error names the field. A
    /// zero blur radius waits for the full check, since it is only out of
    /// range when tone removal runs.
    pub fn patch_params(&mut self, patch: &Map<String, Value>) -> Result<(), ApiError> {
        let mut merged = match serde_json::to_value(&self.params) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("params serialize to an object"),
        };
        let mut has_screentones = self.has_screentones;
        for (key, value) in patch {
            if key == SCREENTONES_KEY {
                has_screentones = value
                    .as_bool()
                    .ok_or_else(|| ApiError::unprocessable(format!("{key} must be a boolean")))?;
                continue;
            }
            if let Some(t) = Tunable::ALL.into_iter().find(|t| t.field() == key) {
                let deferred = t == Tunable::BlurRadius && value.as_i64() == Some(0);
                if !deferred {
                    check_tunable(t, value)?;
                }
            }
            merged.insert(key.clone(), value.clone());
        }
        let params: PipelineParams = serde_json::from_value(Value::Object(merged))
            .map_err(|e| ApiError::unprocessable(format!("invalid parameters: {e}")))?;
        let removes = self.lineart.is_none() && has_screentones;
        params.validate(removes)?;

        let mut changes = Change::between(&self.params, &params);
        if has_screentones != self.has_screentones {
            changes.push(Change::Screentones);
        }
        let mut next = self.clone();
        next.params = params;
        next.has_screentones = has_screentones;
        next.commit(&changes).map(|next| *self = next)
    }

    /// Brings the outputs up to date after `changes`, or leaves them empty
    /// until both target and hint are present.
    fn commit(mut self, changes: &[Change]) -> Result<Self, ApiError> {
        self.updated = SystemTime::now();
        let Some(input) = self.input() else {
            return Ok(self);
        };
        let outputs = match &self.outputs {
            Some(prev) => pipeline::rerun_from(prev, &input, &self.params, changes)?,
            None => pipeline::run(&input, &self.params)?,
        };
        self.outputs = Some(outputs);
        Ok(self)
    }

    fn input(&self) -> Option<PipelineInput> {
        let (target, hint) = (self.target.clone()?, self.hint.clone()?);
        let mut input = PipelineInput::new(target, hint)
            .with_strokes(self.strokes.clone())
            .with_screentones(self.has_screentones);
        if let Some(l) = &self.lineart {
            input = input.with_lineart(TargetLineart::Grey(l.clone()));
        }
        Some(input)
    }

    pub fn stage_png(&self, stage: Stage) -> Option<Vec<u8>> {
        self.outputs.as_ref()?.stage_png(stage)
    }

    pub fn state(&self) -> Value {
        let versions: Map<String, Value> = Stage::ALL
            .into_iter()
            .map(|s| {
                let v = self.outputs.as_ref().map_or(0, |o| o.version(s));
                (s.name().to_string(), json!(v))
            })
            .collect();
        let available: Vec<&str> = match &self.outputs {
            Some(o) => Stage::ALL
                .into_iter()
                .filter(|&s| o.stage_image(s).is_some())
                .map(Stage::name)
                .collect(),
            None => Vec::new(),
        };
        let tunables: Map<String, Value> = Tunable::ALL
            .into_iter()
            .map(|t| (t.field().to_string(), json!(TunableInfo::of(t))))
            .collect();
        json!({
            "id": self.id,
            "params": self.params,
            SCREENTONES_KEY: self.has_screentones,
            "dimensions": self.dimensions(),
            "uploaded": {
                "target": self.target.is_some(),
                "lineart": self.lineart.is_some(),
                "hint": self.hint.is_some(),
            },
            "stroke_count": self.strokes.strokes.len(),
            "segment_count": self.outputs.as_ref().map(|o| o.segmentation().segment_count()),
            "versions": versions,
            "stages": available,
            "tunables": tunables,
            "created": unix_seconds(self.created),
            "updated": unix_seconds(self.updated),
        })
    }
}

#[derive(Serialize)]
struct TunableInfo {
    min: i64,
    max: Option<i64>,
    permissible: &'static str,
    recommended: [i64; 2],
}

impl TunableInfo {
    fn of(t: Tunable) -> Self {
        let (min, max) = t.bounds();
        let (lo, hi) = t.recommended();
        Self {
            min,
            max,
            permissible: t.permissible(),
            recommended: [lo, hi],
        }
    }
}

fn check_tunable(t: Tunable, value: &Value) -> Result<(), ApiError> {
    if t == Tunable::KColors && value.is_null() {
        return Ok(());
    }
    match value.as_i64() {
        Some(v) => Ok(t.check(v)?),
        None => Err(ApiError::unprocessable(format!(
            "{} must be an integer ({})",
            t.field(),
            t.permissible()
        ))),
    }
}

fn check_dims(
    what: &str,
    expected: (usize, usize),
    actual: (usize, usize),
) -> Result<(), ApiError> {
    if expected == actual {
        return Ok(());
    }
    Err(ApiError::new(
        axum::http::StatusCode::CONFLICT,
        format!(
            "{what} is {}x{} but the session's images are {}x{}",
            actual.0, actual.1, expected.0, expected.1
        ),
    ))
}

fn unix_seconds(t: SystemTime) -> u64 {
    t.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}
