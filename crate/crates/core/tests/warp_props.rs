use std::f64::consts::TAU;

use confwarp_core::analysis::{mean_abs_diff, Region};
use confwarp_core::confmap::{self, MapParams};
use confwarp_core::warp::{WarpKind, WarpMap};
use confwarp_core::{bilinear_sample, patterns, warp_image, Complex64, ImageGrid, MapCache};
use proptest::prelude::*;

fn image(max_size: usize, channels: usize) -> impl Strategy<Value = ImageGrid> {
    (2..=max_size).prop_flat_map(move |size| {
        prop::collection::vec(0.0..=1.0f64, size * size * channels)
            .prop_map(move |data| ImageGrid::from_vec(size, channels, data).unwrap())
    })
}

fn params() -> impl Strategy<Value = MapParams> {
    (0.0..0.9f64, 0.0..TAU, 0.0..TAU).prop_map(|(r, t, k)| MapParams::new(Complex64::from_polar(r, t), k).unwrap())
}

fn kind() -> impl Strategy<Value = WarpKind> {
    prop_oneof![
        Just(WarpKind::SquareToDisk),
        Just(WarpKind::DiskToSquare),
        params().prop_map(WarpKind::DiskMotion),
        params().prop_map(WarpKind::Augment),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sample_stays_between_neighbours(img in image(9, 2), x in -1.0..=1.0f64, y in -1.0..=1.0f64) {
        let w = Complex64::new(x, y);
        let values = bilinear_sample(&img, w).unwrap();
        let scale = (img.size() - 1) as f64 / 2.0;
        let (j, k) = (((x + 1.0) * scale).floor() as usize, ((y + 1.0) * scale).floor() as usize);
        let last = img.size() - 1;
        for (c, v) in values.iter().enumerate() {
            let corners = [(j, k), (j + 1, k), (j, k + 1), (j + 1, k + 1)]
                .map(|(a, b)| img.get(a.min(last), b.min(last), c));
            let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo <= *v && *v <= hi);
        }
    }

    #[test]
    fn constant_images_sample_to_the_constant(value in 0.0..=1.0f64, x in -1.0..=1.0f64, y in -1.0..=1.0f64) {
        let img = ImageGrid::from_fn(7, 1, |_, _, _| value).unwrap();
        prop_assert!((bilinear_sample(&img, Complex64::new(x, y)).unwrap()[0] - value).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn output_range_and_shape(img in image(24, 3), kind in kind()) {
        let out = warp_image(&img, kind).unwrap();
        prop_assert_eq!((out.size(), out.channels()), (img.size(), img.channels()));
        prop_assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn disk_stages_vanish_outside_the_disk(img in image(24, 1), p in params()) {
        for kind in [WarpKind::SquareToDisk, WarpKind::DiskMotion(p)] {
            let out = warp_image(&img, kind).unwrap();
            for j in 0..out.size() {
                for k in 0..out.size() {
                    if out.point(j, k).norm_sqr() >= 1.0 {
                        prop_assert_eq!(out.get(j, k, 0), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn parallel_map_matches_sequential(size in 2..40usize, kind in kind()) {
        let map = WarpMap::build(size, kind);
        let probe = ImageGrid::zeros(size, 1).unwrap();
        for j in 0..size {
            for k in 0..size {
                prop_assert_eq!(map.source(j, k), kind.source_point(probe.point(j, k)));
            }
        }
    }

    #[test]
    fn cache_is_bit_identical(img in image(20, 2), kind in kind()) {
        let cache = MapCache::new();
        prop_assert_eq!(cache.warp(&img, kind).unwrap(), warp_image(&img, kind).unwrap());
        prop_assert_eq!(cache.warp(&img, kind).unwrap(), warp_image(&img, kind).unwrap());
    }

    #[test]
    fn channels_warp_independently(img in image(16, 3), kind in kind()) {
        let out = warp_image(&img, kind).unwrap();
        for c in 0..3 {
            prop_assert_eq!(out.channel(c), warp_image(&img.channel(c), kind).unwrap());
        }
    }
}

fn disk_pullback_warp(img: &ImageGrid, p: &MapParams) -> ImageGrid {
    WarpMap::from_fn(img.size(), |z| (z.norm_sqr() < 1.0).then(|| confmap::disk_pullback(z, p).ok()).flatten())
        .apply(img)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// One Augment pass agrees with warping by f, then g⁻¹∘υ₋ₖ, then f⁻¹.
    #[test]
    fn single_pass_matches_three_passes(p in params(), smooth in any::<bool>()) {
        let img = if smooth { patterns::linear_gradient(128, 1) } else { patterns::parallel_lines(128, 4, 1) };
        let single = warp_image(&img, WarpKind::Augment(p)).unwrap();
        let on_disk = warp_image(&img, WarpKind::SquareToDisk).unwrap();
        let staged = warp_image(&disk_pullback_warp(&on_disk, &p), WarpKind::DiskToSquare).unwrap();
        prop_assert!(mean_abs_diff(&single, &staged, Region::InscribedDisk) < 4.0 / 255.0);
    }
}

#[test]
fn identity_augment_psnr_on_smooth_images() {
    for img in [patterns::linear_gradient(128, 1), patterns::parallel_lines(128, 3, 3)] {
        let out = warp_image(&img, WarpKind::Augment(MapParams::identity())).unwrap();
        let db = confwarp_core::analysis::psnr(&img, &out, Region::InscribedDisk);
        assert!(db >= 40.0, "{db}");
        assert!(mean_abs_diff(&img, &out, Region::InscribedDisk) < 2.0 / 255.0);
    }
}
