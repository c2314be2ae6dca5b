use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mangahue::io;
use mangahue::segment::sidecar::LabelSidecar;
use mangahue::{ColorImage, GreyImage};
use tempfile::TempDir;

fn mangahue(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mangahue"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A 3x2 grid of outlined cells; `shift` moves the dividers so batch pages
/// differ.
fn page(shift: usize) -> GreyImage {
    GreyImage::from_fn(90, 60, |x, y| {
        let ink = x < 2 || y < 2 || x >= 88 || y >= 58 || (x + shift) % 30 < 2 || y % 30 < 2;
        if ink {
            0
        } else {
            235
        }
    })
}

fn hint() -> ColorImage {
    ColorImage::from_fn(23, 15, |x, y| [(x * 11) as u8, (y * 17) as u8, 160])
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        io::write_grey_png(&page(0), f.path("t.png")).unwrap();
        io::write_color_png(&hint(), f.path("h.png")).unwrap();
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn colorize(&self, extra: &[&str]) -> Output {
        let (t, h, o) = (self.arg("t.png"), self.arg("h.png"), self.arg("out.png"));
        let mut args = vec!["colorize", "--target", &t, "--hint", &h, "-o", &o];
        args.extend_from_slice(extra);
        mangahue(&args)
    }
}

#[test]
fn colorize_writes_final_png() {
    let f = Fixture::new();
    let out = f.colorize(&["--ball", "4", "--saturation", "15"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let img = io::read_color(f.path("out.png")).unwrap();
    assert_eq!(img.dimensions(), (90, 60));
}

#[test]
fn out_of_range_flags_exit_2_with_range() {
    let f = Fixture::new();
    for (flag, value, range) in [
        ("--ball", "1", "> 1"),
        ("--ball", "0", "> 1"),
        ("--saturation", "255", "< 255"),
        ("--saturation", "-4", "< 255"),
        ("--colors", "0", "> 0"),
        ("--blur", "0", "> 0"),
    ] {
        let out = f.colorize(&[flag, value]);
        assert_eq!(out.status.code(), Some(2), "{flag} {value}");
        let msg = stderr(&out);
        assert!(msg.contains(flag) && msg.contains(range), "{msg}");
        assert!(!f.path("out.png").exists(), "no work before validation");
    }
}

#[test]
fn zero_blur_is_fine_on_clean_line_art() {
    let f = Fixture::new();
    let out = f.colorize(&["--blur", "0", "--no-screentones"]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn config_file_is_validated_too() {
    let f = Fixture::new();
    std::fs::write(f.path("bad.json"), r#"{"initial_ball": 1}"#).unwrap();
    let out = f.colorize(&["--config", &f.arg("bad.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("> 1"));

    std::fs::write(f.path("good.json"), r#"{"initial_ball": 1, "k_colors": 4}"#).unwrap();
    let out = f.colorize(&["--config", &f.arg("good.json"), "--ball", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn missing_input_exits_1() {
    let f = Fixture::new();
    let out = mangahue(&[
        "colorize",
        "--target",
        &f.arg("absent.png"),
        "--hint",
        &f.arg("h.png"),
        "-o",
        &f.arg("out.png"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("absent.png"));
}

#[test]
fn dump_stages_writes_intermediates() {
    let f = Fixture::new();
    let dump = f.arg("stages");
    let out = f.colorize(&["--dump-stages", &dump, "--colors", "6"]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in [
        "lineart.png",
        "segmentation.png",
        "selection.png",
        "saturation.png",
        "quantization.png",
        "shading.png",
        "final.png",
        "segmentation.json",
        "palette.json",
    ] {
        assert!(f.path("stages").join(name).is_file(), "{name}");
    }
    let final_dump = std::fs::read(f.path("stages/final.png")).unwrap();
    assert_eq!(final_dump, std::fs::read(f.path("out.png")).unwrap());
}

#[test]
fn segment_is_byte_reproducible() {
    let f = Fixture::new();
    let run = |out: &str, labels: &str| {
        mangahue(&[
            "segment",
            "--target",
            &f.arg("t.png"),
            "--ball",
            "4",
            "-o",
            out,
            "--labels",
            labels,
        ])
    };
    let a = run(&f.arg("a.png"), &f.arg("a.json"));
    let b = run(&f.arg("b.png"), &f.arg("b.json"));
    assert!(a.status.success() && b.status.success(), "{}", stderr(&a));
    assert_eq!(
        std::fs::read(f.path("a.png")).unwrap(),
        std::fs::read(f.path("b.png")).unwrap()
    );
    let sidecar =
        LabelSidecar::from_json(&std::fs::read_to_string(f.path("a.json")).unwrap()).unwrap();
    assert_eq!(sidecar.decode().unwrap().segment_count(), 6);
}

#[test]
fn strokes_file_splits_a_segment() {
    let f = Fixture::new();
    // One vertical stroke through the middle of the first cell.
    std::fs::write(
        f.path("s.json"),
        r#"[{"width": 2, "points": [[15, 0], [15, 59]]}]"#,
    )
    .unwrap();
    let out = mangahue(&[
        "segment",
        "--target",
        &f.arg("t.png"),
        "--strokes",
        &f.arg("s.json"),
        "-o",
        &f.arg("seg.png"),
        "--labels",
        &f.arg("seg.json"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let sidecar =
        LabelSidecar::from_json(&std::fs::read_to_string(f.path("seg.json")).unwrap()).unwrap();
    assert_eq!(sidecar.decode().unwrap().segment_count(), 8);

    std::fs::write(f.path("far.json"), r#"[{"points": [[0, 0], [500, 0]]}]"#).unwrap();
    let out = f.colorize(&["--strokes", &f.arg("far.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lineart_subcommand_writes_mask() {
    let f = Fixture::new();
    let out = mangahue(&[
        "lineart",
        "--target",
        &f.arg("t.png"),
        "-o",
        &f.arg("l.png"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let lines = io::read_grey(f.path("l.png")).unwrap();
    assert!(lines.pixels().iter().all(|&v| v == 0 || v == 255));
    assert_eq!(lines.get(0, 0), 0);
    assert_eq!(lines.get(10, 10), 255);
}

#[test]
fn quantize_subcommand() {
    let f = Fixture::new();
    let out = mangahue(&[
        "quantize",
        "--input",
        &f.arg("h.png"),
        "--colors",
        "0",
        "-o",
        &f.arg("q.png"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("> 0"));

    let out = mangahue(&[
        "quantize",
        "--input",
        &f.arg("h.png"),
        "--colors",
        "4",
        "-o",
        &f.arg("q.png"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let q = io::read_color(f.path("q.png")).unwrap();
    let mut distinct = q.pixels().to_vec();
    distinct.sort();
    distinct.dedup();
    assert!(distinct.len() <= 4);
}

#[test]
fn help_cites_recommended_ranges() {
    let out = mangahue(&["colorize", "--help"]);
    let help = String::from_utf8_lossy(&out.stdout);
    for needle in [
        "recommended 1-2",
        "recommended 2-5",
        "recommended 10-25",
        "5-10%",
        "recommended 5-20",
        "5-12",
    ] {
        assert!(help.contains(needle), "{needle}");
    }
}

fn write_batch(root: &Path) {
    for dir in ["targets", "hints"] {
        std::fs::create_dir_all(root.join(dir)).unwrap();
    }
    for i in 0..4 {
        io::write_grey_png(&page(i * 3), root.join(format!("targets/p{i}.png"))).unwrap();
        io::write_color_png(&hint(), root.join(format!("hints/p{i}.png"))).unwrap();
    }
}

#[test]
fn batch_matches_single_runs() {
    let f = Fixture::new();
    write_batch(f.dir.path());
    let out = mangahue(&[
        "colorize",
        "--target",
        &f.arg("targets"),
        "--hint",
        &f.arg("hints"),
        "--colors",
        "5",
        "-o",
        &f.arg("batch"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for i in 0..4 {
        let single = f.arg(&format!("single{i}.png"));
        let out = mangahue(&[
            "colorize",
            "--target",
            &f.arg(&format!("targets/p{i}.png")),
            "--hint",
            &f.arg(&format!("hints/p{i}.png")),
            "--colors",
            "5",
            "-o",
            &single,
        ]);
        assert!(out.status.success());
        assert_eq!(
            std::fs::read(&single).unwrap(),
            std::fs::read(f.path(&format!("batch/p{i}.png"))).unwrap()
        );
    }
}

#[test]
fn batch_reports_missing_hint() {
    let f = Fixture::new();
    write_batch(f.dir.path());
    std::fs::remove_file(f.path("hints/p2.png")).unwrap();
    let out = mangahue(&[
        "colorize",
        "--target",
        &f.arg("targets"),
        "--hint",
        &f.arg("hints"),
        "-o",
        &f.arg("batch"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("p2"));
}
