//! Property tests for the crate-wide invariants.

use proptest::prelude::*;

use dichotome_core::dichotomy::{build_lut, dichotomy_eval, dichotomy_normalized, Branch};
use dichotome_core::image::Raster;
use dichotome_core::metrics::{entropy_histogram, patch_entropy, psnr, ssim};
use dichotome_core::transform::{classify_slopes, enhance};
use dichotome_core::{DichotomyParams, PlanarImage};

/// Gamma values away from the degenerate identity.
fn arb_gamma() -> impl Strategy<Value = f64> {
    prop_oneof![0.05f64..0.95, 1.05f64..6.0]
}

proptest! {
    #[test]
    fn eval_stays_in_range(x in 0.0f64..=1.0, gamma in 0.0f64..8.0) {
        let v = dichotomy_eval(x, gamma).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn normalized_peaks_at_one(x in 0.0f64..=1.0, gamma in arb_gamma()) {
        let params = DichotomyParams::from_gamma(gamma).unwrap();
        let v = dichotomy_normalized(x, &params).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(dichotomy_normalized(params.d_max, &params).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn area_bound_holds(gamma in arb_gamma()) {
        let p = DichotomyParams::from_gamma(gamma).unwrap();
        prop_assert!(p.r_plus + p.r_minus <= 0.5 + 1e-12);
        prop_assert!(p.r_plus >= 0.0 && p.r_minus >= 0.0);
    }

    #[test]
    fn lut_round_trip_all_levels(gamma in arb_gamma()) {
        let lut = build_lut(gamma, 255).unwrap();
        for l in 0..=255u32 {
            let branch = if l <= lut.boundary_index {
                Branch::Ascending
            } else {
                Branch::Descending
            };
            prop_assert_eq!(lut.invert(lut.forward(l), branch), l);
        }
    }

    #[test]
    fn enhance_preserves_geometry_and_range(
        seed in 0u64..1000,
        gamma in arb_gamma(),
        w in 2usize..12,
        h in 2usize..12,
    ) {
        let bytes = dichotome_core::synth::lcg_bytes(seed, w * h * 3);
        let img = PlanarImage::new(
            w, h, 3,
            bytes.iter().map(|&b| f64::from(b) / 255.0).collect(),
            8,
        ).unwrap();
        let (out, record) = enhance(&img, gamma).unwrap();
        prop_assert!(out.same_geometry(&img));
        prop_assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
        // branch tags partition samples exactly at d_max
        let below = img.data().iter().filter(|&&x| x <= record.params.d_max).count();
        prop_assert_eq!(record.class_map.count_ascending(), below);
    }

    #[test]
    fn enhance_commutes_with_pixel_shuffle(seed in 0u64..500, gamma in arb_gamma()) {
        // pointwise purity: shuffling samples before or after is the same
        let n = 48usize;
        let bytes = dichotome_core::synth::lcg_bytes(seed, n);
        let data: Vec<f64> = bytes.iter().map(|&b| f64::from(b) / 255.0).collect();
        let img = PlanarImage::new(n, 1, 1, data.clone(), 8).unwrap();
        let (out, _) = enhance(&img, gamma).unwrap();

        let perm: Vec<usize> = {
            // deterministic permutation from the seed stream
            let mut idx: Vec<usize> = (0..n).collect();
            let swaps = dichotome_core::synth::lcg_bytes(seed ^ 0xDEAD, n);
            for (i, s) in swaps.iter().enumerate() {
                idx.swap(i, *s as usize % n);
            }
            idx
        };
        let shuffled: Vec<f64> = perm.iter().map(|&i| data[i]).collect();
        let shuffled_img = PlanarImage::new(n, 1, 1, shuffled, 8).unwrap();
        let (out_shuffled, _) = enhance(&shuffled_img, gamma).unwrap();
        for (j, &i) in perm.iter().enumerate() {
            prop_assert_eq!(out_shuffled.data()[j], out.data()[i]);
        }
    }

    #[test]
    fn classify_counts_match_threshold(seed in 0u64..500, gamma in arb_gamma()) {
        let bytes = dichotome_core::synth::lcg_bytes(seed, 64);
        let img = PlanarImage::new(
            8, 8, 1,
            bytes.iter().map(|&b| f64::from(b) / 255.0).collect(),
            8,
        ).unwrap();
        let params = DichotomyParams::from_gamma(gamma).unwrap();
        let map = classify_slopes(&img, gamma).unwrap();
        let below = img.data().iter().filter(|&&x| x <= params.d_max).count();
        prop_assert_eq!(map.count_ascending(), below);
    }

    #[test]
    fn entropy_invariant_under_level_relabeling(seed in 0u64..500, shift in 1u16..255) {
        // any bijection of gray levels permutes the histogram only
        let data = dichotome_core::synth::lcg_bytes(seed, 144);
        let raster = Raster {
            width: 12,
            height: 12,
            channels: 1,
            bit_depth: 8,
            data: data.iter().map(|&v| u16::from(v)).collect(),
        };
        let relabeled = Raster {
            data: raster.data.iter().map(|v| (v + shift) % 256).collect(),
            ..raster.clone()
        };
        let a = patch_entropy(&raster, 3, 3).unwrap();
        let b = patch_entropy(&relabeled, 3, 3).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_histogram_conserves(seed in 0u64..500, bins in 1usize..32) {
        let data = dichotome_core::synth::lcg_bytes(seed, 900);
        let raster = Raster {
            width: 30,
            height: 30,
            channels: 1,
            bit_depth: 8,
            data: data.iter().map(|&v| u16::from(v)).collect(),
        };
        let grid = patch_entropy(&raster, 5, 6).unwrap();
        let counts = entropy_histogram(&grid, bins);
        prop_assert_eq!(counts.iter().sum::<usize>(), grid.values.len());
    }

    #[test]
    fn metric_symmetry(seed in 0u64..200) {
        let a_data = dichotome_core::synth::lcg_bytes(seed, 256);
        let b_data = dichotome_core::synth::lcg_bytes(seed ^ 0xBEEF, 256);
        let mk = |data: Vec<u8>| Raster {
            width: 16,
            height: 16,
            channels: 1,
            bit_depth: 8,
            data: data.into_iter().map(u16::from).collect(),
        };
        let (a, b) = (mk(a_data), mk(b_data));
        prop_assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
        let (s1, s2) = (ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
        prop_assert!((s1 - s2).abs() < 1e-12);
        prop_assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }
}
