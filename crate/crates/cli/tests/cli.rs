//! End-to-end tests of the `dichotome` binary: exit codes, file outputs,
//! and run-to-run determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dichotome_core::image::io::{read_image, write_image};
use dichotome_core::synth;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dichotome"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn mean(img: &dichotome_core::PlanarImage) -> f64 {
    img.data().iter().sum::<f64>() / img.data().len() as f64
}

#[test]
fn enhance_brightens_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("enh.png");
    let record = dir.path().join("rec.json");
    let classmap = dir.path().join("classes.png");
    let status = bin()
        .args(["enhance", fixture("underexposed.png").to_str().unwrap()])
        .arg(&out)
        .args(["--gamma", "0.5"])
        .arg("--save-record")
        .arg(&record)
        .arg("--save-classmap")
        .arg(&classmap)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", stderr(&status));
    assert!(record.is_file() && classmap.is_file());

    let original = read_image(&fixture("underexposed.png")).unwrap();
    let enhanced = read_image(&out).unwrap();
    assert_eq!(enhanced.source_bit_depth, 16, "default output is 16-bit PNG");
    assert!(
        mean(&enhanced) > mean(&original),
        "dark fixture must come out brighter"
    );
}

#[test]
fn identity_gamma_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["enhance", fixture("underexposed.png").to_str().unwrap()])
        .arg(dir.path().join("x.png"))
        .args(["--gamma", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn missing_input_fails_with_path_in_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["enhance", "no-such-image.png"])
        .arg(dir.path().join("x.png"))
        .args(["--gamma", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no-such-image.png"));
}

#[test]
fn file_round_trip_is_exact_for_8bit_sources() {
    let dir = tempfile::tempdir().unwrap();
    let enh = dir.path().join("enh.png");
    let rec = dir.path().join("rec.json");
    let back = dir.path().join("back.png");

    let run = bin()
        .args(["enhance", fixture("mixed.png").to_str().unwrap()])
        .arg(&enh)
        .args(["--gamma", "1.8"])
        .arg("--save-record")
        .arg(&rec)
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", stderr(&run));

    let run = bin().arg("invert").arg(&enh).arg(&rec).arg(&back).output().unwrap();
    assert!(run.status.success(), "{}", stderr(&run));
    assert!(
        stdout(&run).contains("max per-sample error: 0 levels"),
        "got: {}",
        stdout(&run)
    );

    let original = read_image(&fixture("mixed.png")).unwrap();
    let restored = read_image(&back).unwrap();
    assert_eq!(original.data(), restored.data(), "round trip must be bit-identical");
}

#[test]
fn real_valued_inversion_reports_small_residual() {
    let dir = tempfile::tempdir().unwrap();
    let enh = dir.path().join("enh.png");
    let rec = dir.path().join("rec.json");
    let back = dir.path().join("back.png");
    bin()
        .args(["enhance", fixture("mixed.png").to_str().unwrap()])
        .arg(&enh)
        .args(["--gamma", "1.8"])
        .arg("--save-record")
        .arg(&rec)
        .status()
        .unwrap();

    // strip the lookup table to force the golden-section path
    let json = std::fs::read_to_string(&rec).unwrap();
    let mut record: serde_json::Value = serde_json::from_str(&json).unwrap();
    record["lut"] = serde_json::Value::Null;
    std::fs::write(&rec, serde_json::to_string(&record).unwrap()).unwrap();

    let run = bin().arg("invert").arg(&enh).arg(&rec).arg(&back).output().unwrap();
    assert!(run.status.success(), "{}", stderr(&run));
    let text = stdout(&run);
    let residual: f64 = text
        .split("max per-sample error: ")
        .nth(1)
        .and_then(|s| s.split(')').next())
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(residual < 1e-5, "residual {residual}");
}

#[test]
fn mismatched_record_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let enh = dir.path().join("enh.png");
    let rec = dir.path().join("rec.json");
    bin()
        .args(["enhance", fixture("mixed.png").to_str().unwrap()])
        .arg(&enh)
        .args(["--gamma", "1.8"])
        .arg("--save-record")
        .arg(&rec)
        .status()
        .unwrap();
    // a record taken from a different-geometry image
    let other = dir.path().join("other.png");
    write_image(&other, &synth::ramp(64, 32), 8).unwrap();
    let rec2 = dir.path().join("rec2.json");
    bin()
        .arg("enhance")
        .arg(&other)
        .arg(dir.path().join("other-enh.png"))
        .args(["--gamma", "1.8"])
        .arg("--save-record")
        .arg(&rec2)
        .status()
        .unwrap();

    let out = bin()
        .arg("invert")
        .arg(&enh)
        .arg(&rec2)
        .arg(dir.path().join("bad.png"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("record"), "{}", stderr(&out));
}

#[test]
fn dogspace_default_run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (out1, out2) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&out1, &out2] {
        let run = bin()
            .args(["dogspace", fixture("mixed.png").to_str().unwrap(), "--out"])
            .arg(out)
            .output()
            .unwrap();
        assert!(run.status.success(), "{}", stderr(&run));
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("manifest.json")).unwrap())
            .unwrap();
    // default experiment: 4 sigma levels x 8 gammas
    assert_eq!(manifest["cells"].as_array().unwrap().len(), 32);
    assert_eq!(manifest["aggregates"].as_array().unwrap().len(), 8);
    assert_eq!(manifest["overlays"].as_array().unwrap().len(), 4);
    assert_eq!(manifest["cells"][0]["t"], serde_json::json!(8.192));
    // every referenced file exists, along with its range sidecar
    for cell in manifest["cells"].as_array().unwrap() {
        assert!(out1.join(cell["response"].as_str().unwrap()).is_file());
        assert!(out1.join(cell["mask"].as_str().unwrap()).is_file());
        let sidecar = cell["response"].as_str().unwrap().replace(".png", ".json");
        assert!(out1.join(sidecar).is_file());
    }

    // byte-identical manifests across runs (hashes cover the images)
    let a = std::fs::read(out1.join("manifest.json")).unwrap();
    let b = std::fs::read(out2.join("manifest.json")).unwrap();
    assert_eq!(a, b, "repeated runs must hash identically");
}

#[test]
fn dogspace_rejects_identity_gamma_and_tiny_images() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["dogspace", fixture("mixed.png").to_str().unwrap(), "--out"])
        .arg(dir.path().join("x"))
        .args(["--gammas", "0.5,1.0,2.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let tiny = dir.path().join("tiny.png");
    write_image(&tiny, &synth::ramp(16, 16), 8).unwrap();
    let out = bin()
        .args(["dogspace", tiny.to_str().unwrap(), "--out"])
        .arg(dir.path().join("y"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn dogspace_single_cell_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(
        &cfg,
        "version = 1\nsigma2 = [1.0]\ngammas = [0.5]\nsubsample = [1]\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let run = bin()
        .args(["dogspace", fixture("mixed.png").to_str().unwrap(), "--out"])
        .arg(&out_dir)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", stderr(&run));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["cells"].as_array().unwrap().len(), 1);
}

#[test]
fn entropy_outputs_and_guards() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("ent");
    let run = bin()
        .args(["entropy", fixture("underexposed.png").to_str().unwrap(), "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", stderr(&run));
    let csv = std::fs::read_to_string(out_dir.join("entropy.csv")).unwrap();
    assert_eq!(csv.lines().count(), 30);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 30);
    assert!(out_dir.join("entropy_heatmap.png").is_file());
    assert!(out_dir.join("entropy_hist.csv").is_file());

    // constant image: all-zero grid
    let flat = dir.path().join("flat.png");
    write_image(&flat, &dichotome_core::PlanarImage::constant(64, 64, 1, 0.5).unwrap(), 8)
        .unwrap();
    let out_dir2 = dir.path().join("ent2");
    bin()
        .args(["entropy", flat.to_str().unwrap(), "--out"])
        .arg(&out_dir2)
        .args(["--mesh", "4x4"])
        .status()
        .unwrap();
    let csv = std::fs::read_to_string(out_dir2.join("entropy.csv")).unwrap();
    assert!(csv.lines().all(|l| l.split(',').all(|v| v.parse::<f64>().unwrap() == 0.0)));

    // mesh larger than the image
    let out = bin()
        .args(["entropy", flat.to_str().unwrap(), "--out"])
        .arg(dir.path().join("ent3"))
        .args(["--mesh", "100x100"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn bench_on_a_synthetic_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    std::fs::create_dir_all(data.join("low")).unwrap();
    std::fs::create_dir_all(data.join("high")).unwrap();
    // degraded/normal pairs with matching names
    let normal = synth::mixed_scene(96);
    let dark = synth::underexposed(96);
    for name in ["one.png", "two.png"] {
        write_image(&data.join("low").join(name), &dark, 8).unwrap();
        write_image(&data.join("high").join(name), &normal, 8).unwrap();
    }

    let out_dir = dir.path().join("bench");
    let run = bin()
        .arg("bench")
        .arg(&data)
        .arg("--out")
        .arg(&out_dir)
        .args(["--gammas", "0.5,0.9,1.1"])
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", stderr(&run));
    let text = stdout(&run);
    assert!(text.contains("PSNR max"), "{text}");
    assert!(text.contains("SSIM max"), "{text}");

    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4, "header plus one row per gamma");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("sweep.json")).unwrap())
            .unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
    assert_eq!(json[0]["scores"].as_array().unwrap().len(), 2);

    // empty dataset directory fails at runtime
    let empty = dir.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let out = bin()
        .arg("bench")
        .arg(&empty)
        .arg("--out")
        .arg(dir.path().join("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.png"), dir.path().join("b.png"));
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let run = bin()
            .args(["enhance", fixture("mixed.png").to_str().unwrap()])
            .arg(out)
            .args(["--gamma", "0.5", "--threads", threads])
            .output()
            .unwrap();
        assert!(run.status.success(), "{}", stderr(&run));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn threads_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.png");
    let run = bin()
        .env("DICHOTOME_THREADS", "2")
        .args(["enhance", fixture("mixed.png").to_str().unwrap()])
        .arg(&out)
        .args(["--gamma", "0.5"])
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", stderr(&run));
    assert!(out.is_file());
}
