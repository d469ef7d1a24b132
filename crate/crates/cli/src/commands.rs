//! Subcommand bodies. Each returns `Ok(false)` when some file or check
//! failed but the run itself could proceed.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use confwarp_core::config::RunConfig;
use confwarp_core::dataset::{self, Split};
use confwarp_core::selftest::{self, Suite};
use confwarp_core::{io, patterns, ImageGrid, MapCache, MapConstants, MapParams, WarpKind};
use rayon::prelude::*;

/// `<stem>__a<re>_<im>__k<k>.<ext>`, four decimals each.
pub fn augmented_name(stem: &str, ext: &str, params: &MapParams) -> String {
    format!("{stem}__{}.{ext}", dataset::params_suffix(params))
}

fn stem_and_ext(path: &Path) -> (String, String) {
    let stem = path.file_stem().map_or_else(|| "image".into(), |s| s.to_string_lossy().into_owned());
    let ext = path.extension().map_or_else(|| "png".into(), |e| e.to_string_lossy().to_ascii_lowercase());
    (stem, ext)
}

fn augment_file(path: &Path, config: &RunConfig, cache: &MapCache) -> confwarp_core::Result<Vec<PathBuf>> {
    let img = io::read_image(path)?;
    let (stem, ext) = stem_and_ext(path);
    config
        .augmentations
        .iter()
        .map(|p| {
            let target = config.out.join(augmented_name(&stem, &ext, p));
            io::write_image(&target, &cache.warp(&img, WarpKind::Augment(*p))?)?;
            Ok(target)
        })
        .collect()
}

pub fn augment(config: &RunConfig) -> anyhow::Result<bool> {
    if config.inputs.is_empty() {
        bail!("no input images; pass them as arguments or set [augment] inputs");
    }
    if config.augmentations.is_empty() {
        eprintln!("warning: the augmentation list is empty, nothing written");
        return Ok(true);
    }
    fs::create_dir_all(&config.out).with_context(|| format!("cannot create {}", config.out.display()))?;
    let cache = MapCache::new();
    let results: Vec<_> = config.inputs.par_iter().map(|path| augment_file(path, config, &cache)).collect();
    let mut ok = true;
    for (path, result) in config.inputs.iter().zip(results) {
        match result {
            Ok(written) => println!("{}: wrote {} images", path.display(), written.len()),
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                ok = false;
            }
        }
    }
    Ok(ok)
}

pub fn generate(config: &RunConfig) -> anyhow::Result<bool> {
    let rows = dataset::build_dataset(&config.dataset, &config.out)
        .with_context(|| format!("generating the dataset in {}", config.out.display()))?;
    let count = |split: Split| rows.iter().filter(|r| r.split == split).count();
    println!(
        "{}: {} train, {} test, {} augmented ({}), manifest {}",
        config.out.display(),
        count(Split::Train),
        count(Split::Test),
        count(Split::TrainAugmented),
        config.dataset.augmentation.label(),
        dataset::MANIFEST_FILE
    );
    Ok(true)
}

/// The five pipeline stages for `params`: the input, `f`, `g∘f`, `υ∘g∘f`
/// and `f⁻¹∘υ∘g∘f`.
pub fn preview_stages(img: &ImageGrid, params: &MapParams) -> confwarp_core::Result<Vec<(&'static str, ImageGrid)>> {
    let mobius_only = MapParams::new(params.alpha(), 0.0)?;
    let kinds = [
        ("disk", WarpKind::SquareToDisk),
        ("mobius", WarpKind::DiskMotion(mobius_only)),
        ("rotated", WarpKind::DiskMotion(*params)),
        ("augmented", WarpKind::Augment(*params)),
    ];
    let mut stages = vec![("original", img.clone())];
    for (name, kind) in kinds {
        stages.push((name, confwarp_core::warp_image(img, kind)?));
    }
    Ok(stages)
}

pub fn preview(config: &RunConfig) -> anyhow::Result<bool> {
    let (img, stem, ext) = match config.inputs.as_slice() {
        [] => (patterns::parallel_lines(config.preview_size, 8, 1), "lines".to_string(), "png".to_string()),
        [path] => {
            let img = io::read_image(path).with_context(|| path.display().to_string())?;
            let (stem, ext) = stem_and_ext(path);
            (img, stem, ext)
        }
        _ => bail!("preview takes a single input image"),
    };
    fs::create_dir_all(&config.out).with_context(|| format!("cannot create {}", config.out.display()))?;
    let p = config.preview_params;
    let alpha = p.alpha();
    println!("α = {:.4}{:+.4}i, k = {:.4}", alpha.re, alpha.im, p.k());
    for (i, (name, stage)) in preview_stages(&img, &p)?.iter().enumerate() {
        let target = config.out.join(format!("{stem}_{}_{name}.{ext}", i + 1));
        io::write_image(&target, stage).with_context(|| target.display().to_string())?;
        println!("{}", target.display());
    }
    Ok(true)
}

pub fn selftest(suite: Option<Suite>, corrupt_l: Option<f64>) -> bool {
    let constants = match corrupt_l {
        Some(factor) => MapConstants::standard().with_scaled_l(factor),
        None => *MapConstants::standard(),
    };
    let suites = suite.map_or_else(|| Suite::ALL.to_vec(), |s| vec![s]);
    let report = selftest::run(&suites, &constants);
    print!("{report}");
    let failed: Vec<_> = report.failures().map(|c| format!("{} ({})", c.name, c.suite)).collect();
    if failed.is_empty() {
        println!("all {} checks passed", report.checks.len());
        true
    } else {
        eprintln!("selftest failed: {}", failed.join(", "));
        false
    }
}
