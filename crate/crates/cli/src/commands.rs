use std::fs;
use std::path::{Path, PathBuf};

use mangahue::colorops::{quantize_colors, QuantizeParams};
use mangahue::io;
use mangahue::lineart::binarize;
use mangahue::pipeline::{self, PipelineInput, TargetLineart};
use mangahue::segment::sidecar::{visualize, LabelSidecar};
use mangahue::segment::{merge_strokes, trapped_ball_segment};
use mangahue::{BinaryImage, PipelineParams, StrokeSet, Tunable};
use rayon::prelude::*;

use crate::params::ParamArgs;
use crate::CliError;

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "jpg", "jpeg"];

pub struct ColorizeArgs {
    pub target: PathBuf,
    pub hint: PathBuf,
    pub lineart: Option<PathBuf>,
    pub strokes: Option<PathBuf>,
    pub has_screentones: bool,
    pub dump_stages: Option<PathBuf>,
    pub params: ParamArgs,
    pub output: PathBuf,
}

pub fn colorize(args: ColorizeArgs) -> Result<(), CliError> {
    let removes = args.lineart.is_none() && args.has_screentones;
    let params = args.params.resolve(removes)?;
    if args.target.is_dir() {
        return colorize_batch(&args, &params);
    }
    let job = Job {
        target: args.target.clone(),
        hint: args.hint.clone(),
        lineart: args.lineart.clone(),
        strokes: args.strokes.clone(),
        output: args.output.clone(),
        dump: args.dump_stages.clone(),
    };
    job.run(args.has_screentones, &params)
}

/// One page's worth of paths.
#[derive(Debug)]
struct Job {
    target: PathBuf,
    hint: PathBuf,
    lineart: Option<PathBuf>,
    strokes: Option<PathBuf>,
    output: PathBuf,
    dump: Option<PathBuf>,
}

impl Job {
    fn run(&self, has_screentones: bool, params: &PipelineParams) -> Result<(), CliError> {
        let mut input = PipelineInput::new(
            io::read_grey(&self.target)?,
            io::hint_from_file(&self.hint)?,
        )
        .with_screentones(has_screentones)
        .with_strokes(read_strokes(self.strokes.as_deref())?);
        if let Some(path) = &self.lineart {
            input = input.with_lineart(TargetLineart::Grey(io::read_lineart(path)?));
        }
        let outputs = pipeline::run(&input, params)?;
        io::write_color_png(outputs.final_image(), &self.output)?;
        if let Some(dir) = &self.dump {
            outputs.dump(dir)?;
        }
        Ok(())
    }
}

fn colorize_batch(args: &ColorizeArgs, params: &PipelineParams) -> Result<(), CliError> {
    let require_dir = |flag: &str, path: &Path| {
        if path.is_dir() {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "{flag} must be a directory when --target is ({})",
                path.display()
            )))
        }
    };
    require_dir("--hint", &args.hint)?;
    if let Some(dir) = &args.lineart {
        require_dir("--lineart", dir)?;
    }
    if let Some(dir) = &args.strokes {
        require_dir("--strokes", dir)?;
    }
    fs::create_dir_all(&args.output).map_err(|e| io_failure(&args.output, e))?;

    let mut jobs = Vec::new();
    for target in list_images(&args.target)? {
        let stem = file_stem(&target);
        let hint = find_image(&args.hint, &stem).ok_or_else(|| {
            CliError::Failed(format!("no hint for {} in {}", stem, args.hint.display()))
        })?;
        jobs.push(Job {
            lineart: args.lineart.as_ref().and_then(|d| find_image(d, &stem)),
            strokes: args
                .strokes
                .as_ref()
                .map(|d| d.join(format!("{stem}.json")))
                .filter(|p| p.is_file()),
            output: args.output.join(format!("{stem}.png")),
            dump: args.dump_stages.as_ref().map(|d| d.join(&stem)),
            target,
            hint,
        });
    }

    let failures: Vec<String> = jobs
        .par_iter()
        .filter_map(|job| {
            job.run(args.has_screentones, params).err().map(|e| {
                let msg = match e {
                    CliError::Usage(m) | CliError::Failed(m) => m,
                };
                format!("{}: {msg}", job.target.display())
            })
        })
        .collect();
    for f in &failures {
        eprintln!("error: {f}");
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} of {} pages failed",
            failures.len(),
            jobs.len()
        )))
    }
}

fn list_images(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_failure(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && has_image_extension(p))
        .collect();
    files.sort();
    Ok(files)
}

fn has_image_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

fn find_image(dir: &Path, stem: &str) -> Option<PathBuf> {
    IMAGE_EXTENSIONS
        .iter()
        .map(|ext| dir.join(format!("{stem}.{ext}")))
        .find(|p| p.is_file())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn read_strokes(path: Option<&Path>) -> Result<StrokeSet, CliError> {
    let Some(path) = path else {
        return Ok(StrokeSet::default());
    };
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(StrokeSet::from_json(&text)?)
}

fn io_failure(path: &Path, e: std::io::Error) -> CliError {
    CliError::Failed(format!("{}: {e}", path.display()))
}

pub fn lineart(
    target: &Path,
    has_screentones: bool,
    params: &ParamArgs,
    output: &Path,
) -> Result<(), CliError> {
    let params = params.resolve(has_screentones)?;
    let mono = io::read_grey(target)?;
    let lines = pipeline::extract_lineart(&mono, None, has_screentones, &params)?;
    io::write_mask_png(&lines, output)?;
    Ok(())
}

pub struct SegmentArgs {
    pub target: PathBuf,
    pub lineart: Option<PathBuf>,
    pub strokes: Option<PathBuf>,
    pub has_screentones: bool,
    pub labels: Option<PathBuf>,
    pub params: ParamArgs,
    pub output: PathBuf,
}

pub fn segment(args: SegmentArgs) -> Result<(), CliError> {
    let removes = args.lineart.is_none() && args.has_screentones;
    let params = args.params.resolve(removes)?;
    let mono = io::read_grey(&args.target)?;
    let supplied = match &args.lineart {
        Some(path) => Some(TargetLineart::Grey(io::read_lineart(path)?)),
        None => None,
    };
    let lines = pipeline::extract_lineart(&mono, supplied.as_ref(), args.has_screentones, &params)?;
    let edges = merge_strokes(&lines, &read_strokes(args.strokes.as_deref())?)?;
    let map = trapped_ball_segment(&edges, params.ball())?;
    io::write_color_png(&visualize(&map, params.seed), &args.output)?;
    if let Some(path) = &args.labels {
        fs::write(path, LabelSidecar::encode(&map).to_json()).map_err(|e| io_failure(path, e))?;
    }
    Ok(())
}

pub fn quantize(
    input: &Path,
    colors: i64,
    seed: u64,
    edges: Option<&Path>,
    output: &Path,
) -> Result<(), CliError> {
    Tunable::KColors.check(colors).map_err(|e| {
        CliError::Usage(format!(
            "--colors = {colors} is out of range: permissible {}",
            e.permissible
        ))
    })?;
    let img = io::read_color(input)?;
    let (w, h) = img.dimensions();
    let mask = match edges {
        Some(path) => binarize(
            &io::read_lineart(path)?,
            PipelineParams::default().binarize_threshold,
        ),
        None => BinaryImage::filled(w, h, false),
    };
    let out = quantize_colors(&img, &QuantizeParams::new(colors as usize, seed), &mask)?;
    io::write_color_png(&out, output)?;
    Ok(())
}

pub fn serve(config: mangahue_tuner::Config) -> Result<(), CliError> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Failed(e.to_string()))?;
    eprintln!(
        "mangahue tuner listening on http://{} (at most {} sessions)",
        config.addr, config.max_sessions
    );
    runtime
        .block_on(mangahue_tuner::serve(config))
        .map_err(|e| CliError::Failed(e.to_string()))
}
