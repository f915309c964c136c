//! Shared inputs for the pipeline benchmarks.

use dichotome_core::synth;
use dichotome_core::PlanarImage;

pub fn bench_image() -> PlanarImage {
    synth::mixed_scene(512)
}

pub fn bench_gray() -> PlanarImage {
    bench_image().to_grayscale().expect("color fixture")
}
