//! Regenerates the committed PNG fixtures from their procedural definitions.
//!
//! Usage: cargo run -p dichotome-core --example gen_fixtures [out_dir]

use std::path::PathBuf;

use dichotome_core::image::io::write_image;
use dichotome_core::synth;

fn main() -> dichotome_core::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    std::fs::create_dir_all(&out)?;

    write_image(&out.join("underexposed.png"), &synth::underexposed(512), 8)?;
    write_image(&out.join("overexposed.png"), &synth::overexposed(512), 8)?;
    write_image(&out.join("mixed.png"), &synth::mixed_scene(512), 8)?;
    write_image(&out.join("ramp.png"), &synth::ramp(256, 64), 8)?;
    write_image(&out.join("checker.png"), &synth::checkerboard(64, 2), 8)?;

    println!("fixtures written to {}", out.display());
    Ok(())
}
