//! Run configuration: a TOML file merged with command-line overrides.
//!
//! ```toml
//! seed = 7
//! threads = 4            # or "auto"
//! out = "results"
//!
//! [augment]
//! inputs = ["photo.png"]
//! params = [
//!     { alpha_re = 0.1, alpha_im = 0.1, k = "pi:1/3" },
//!     { alpha_re = 0.3, alpha_im = 0.0, k = 2.0 },
//! ]
//!
//! [dataset]
//! augmentation = "rotation"   # none | conformal | rotation
//! rotation_range = [-15.0, 15.0]
//!
//! [preview]
//! params = { alpha_re = 0.3, alpha_im = 0.3, k = "pi:1/3" }
//! ```
//!
//! Relative paths in a file are resolved against the file's directory.

use std::fmt;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Deserialize;

use crate::confmap::MapParams;
use crate::dataset::{Augmentation, DatasetSpec};
use crate::error::{Error, Result};

/// Environment variable naming the config file used when none is given.
pub const CONFIG_ENV: &str = "CONFWARP_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Augment,
    Generate,
    Preview,
    Selftest,
}

impl Command {
    fn default_out(self) -> &'static str {
        match self {
            Command::Augment => "augmented",
            Command::Generate => "dataset",
            Command::Preview => "preview",
            Command::Selftest => ".",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(try_from = "RawThreads")]
pub enum Threads {
    #[default]
    Auto,
    Count(NonZeroUsize),
}

impl Threads {
    /// Thread count for a pool; `0` lets the pool decide.
    pub fn count(self) -> usize {
        match self {
            Threads::Auto => 0,
            Threads::Count(n) => n.get(),
        }
    }
}

impl FromStr for Threads {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Threads::Auto);
        }
        s.parse::<NonZeroUsize>()
            .map(Threads::Count)
            .map_err(|_| Error::Config(format!("thread count must be a positive integer or \"auto\", got {s:?}")))
    }
}

impl fmt::Display for Threads {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threads::Auto => f.write_str("auto"),
            Threads::Count(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawThreads {
    Count(u64),
    Text(String),
}

impl TryFrom<RawThreads> for Threads {
    type Error = Error;

    fn try_from(raw: RawThreads) -> Result<Self> {
        match raw {
            RawThreads::Count(n) => n.to_string().parse(),
            RawThreads::Text(s) => s.parse(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentationKind {
    None,
    Conformal,
    Rotation,
}

impl FromStr for AugmentationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(AugmentationKind::None),
            "conformal" => Ok(AugmentationKind::Conformal),
            "rotation" => Ok(AugmentationKind::Rotation),
            _ => Err(Error::Config(format!("unknown augmentation {s:?} (expected none, conformal or rotation)"))),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    pub inputs: Vec<PathBuf>,
    /// Absent means the default three parameter sets.
    pub params: Option<Vec<MapParams>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSection {
    pub render_size: usize,
    pub final_size: usize,
    pub train_count: usize,
    pub test_count: usize,
    pub augmentation: AugmentationKind,
    pub params: Option<Vec<MapParams>>,
    pub rotation_range: [f64; 2],
}

impl Default for DatasetSection {
    fn default() -> Self {
        let spec = DatasetSpec::default();
        DatasetSection {
            render_size: spec.render_size,
            final_size: spec.final_size,
            train_count: spec.train_count,
            test_count: spec.test_count,
            augmentation: AugmentationKind::Conformal,
            params: None,
            rotation_range: [-15.0, 15.0],
        }
    }
}

impl DatasetSection {
    pub fn to_spec(&self, kind: AugmentationKind, seed: u64) -> Result<DatasetSpec> {
        let augmentation = match kind {
            AugmentationKind::None => Augmentation::None,
            AugmentationKind::Conformal => {
                Augmentation::Conformal(self.params.clone().unwrap_or_else(MapParams::default_set))
            }
            AugmentationKind::Rotation => {
                Augmentation::Rotation { min_degrees: self.rotation_range[0], max_degrees: self.rotation_range[1] }
            }
        };
        let spec = DatasetSpec {
            render_size: self.render_size,
            final_size: self.final_size,
            train_count: self.train_count,
            test_count: self.test_count,
            seed,
            augmentation,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreviewSection {
    pub input: Option<PathBuf>,
    pub params: MapParams,
    /// Size of the built-in test image when no input is given.
    pub size: usize,
}

impl Default for PreviewSection {
    fn default() -> Self {
        PreviewSection { input: None, params: default_preview_params(), size: 256 }
    }
}

/// `α = 0.3 + 0.3i`, `k = π/3`.
pub fn default_preview_params() -> MapParams {
    MapParams::new(Complex64::new(0.3, 0.3), std::f64::consts::FRAC_PI_3).expect("valid constants")
}

/// Contents of a config file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub threads: Option<Threads>,
    pub out: Option<PathBuf>,
    pub augment: AugmentSection,
    pub dataset: DatasetSection,
    pub preview: PreviewSection,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads and parses `path`, resolving relative paths inside it against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut file = Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        file.augment.inputs.iter_mut().for_each(rebase);
        file.out.iter_mut().for_each(rebase);
        file.preview.input.iter_mut().for_each(rebase);
        Ok(file)
    }
}

/// Values given on the command line; they take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub inputs: Vec<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<Threads>,
    pub augmentation: Option<AugmentationKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub out: PathBuf,
    pub augmentations: Vec<MapParams>,
    pub preview_params: MapParams,
    pub preview_size: usize,
    pub dataset: DatasetSpec,
    pub threads: Threads,
    pub seed: u64,
}

impl RunConfig {
    /// Merges `file` and `overrides` and checks that input paths exist.
    pub fn resolve(command: Command, file: ConfigFile, overrides: Overrides) -> Result<Self> {
        let seed = overrides.seed.or(file.seed).unwrap_or(0);
        let inputs = match command {
            Command::Augment if overrides.inputs.is_empty() => file.augment.inputs,
            Command::Preview if overrides.inputs.is_empty() => file.preview.input.into_iter().collect(),
            _ => overrides.inputs,
        };
        if let Some(missing) = inputs.iter().find(|p| !p.exists()) {
            return Err(Error::Config(format!("input {} does not exist", missing.display())));
        }
        let kind = overrides.augmentation.unwrap_or(file.dataset.augmentation);
        Ok(RunConfig {
            command,
            inputs,
            out: overrides.out.or(file.out).unwrap_or_else(|| command.default_out().into()),
            augmentations: file.augment.params.unwrap_or_else(MapParams::default_set),
            preview_params: file.preview.params,
            preview_size: file.preview.size,
            dataset: file.dataset.to_spec(kind, seed)?,
            threads: overrides.threads.or(file.threads).unwrap_or_default(),
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_a_full_file() {
        let file = ConfigFile::parse(
            r#"
            seed = 7
            threads = 3
            [augment]
            params = [
                { alpha_re = 0.1, alpha_im = 0.3, k = "pi" },
                { alpha_re = 0.3, alpha_im = 0.3, k = "pi:3/2" },
                { alpha_re = -0.2, k = 0.5 },
            ]
            [dataset]
            augmentation = "rotation"
            rotation_range = [-10.0, 10.0]
            train_count = 4
            [preview]
            size = 64
            "#,
        )
        .unwrap();
        let run = RunConfig::resolve(Command::Generate, file, Overrides::default()).unwrap();
        assert_eq!(run.seed, 7);
        assert_eq!(run.threads.count(), 3);
        assert_eq!(run.augmentations.len(), 3);
        assert!((run.augmentations[1].k() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(run.augmentations[2].alpha(), Complex64::new(-0.2, 0.0));
        assert_eq!(run.dataset.train_count, 4);
        assert_eq!(run.dataset.seed, 7);
        assert_eq!(run.dataset.augmentation, Augmentation::Rotation { min_degrees: -10.0, max_degrees: 10.0 });
        assert_eq!(run.preview_size, 64);
        assert_eq!(run.out, PathBuf::from("dataset"));
    }

    #[test]
    fn defaults_and_overrides() {
        let run = RunConfig::resolve(Command::Augment, ConfigFile::default(), Overrides::default()).unwrap();
        assert_eq!(run.augmentations, MapParams::default_set());
        assert_eq!(run.threads, Threads::Auto);
        assert_eq!(run.preview_params, default_preview_params());

        let file = ConfigFile::parse("seed = 1\nthreads = \"auto\"\n[augment]\nparams = []").unwrap();
        let overrides = Overrides {
            seed: Some(9),
            threads: Some(Threads::Count(NonZeroUsize::new(2).unwrap())),
            augmentation: Some(AugmentationKind::None),
            ..Overrides::default()
        };
        let run = RunConfig::resolve(Command::Generate, file, overrides).unwrap();
        assert_eq!((run.seed, run.threads.count()), (9, 2));
        assert!(run.augmentations.is_empty());
        assert_eq!(run.dataset.augmentation, Augmentation::None);
    }

    #[test]
    fn rejects_invalid_values() {
        let bad_alpha = "[augment]\nparams = [{ alpha_re = 1.2, alpha_im = 0.0, k = 0.0 }]";
        assert!(ConfigFile::parse(bad_alpha).is_err());
        assert!(ConfigFile::parse("threads = 0").is_err());
        assert!(ConfigFile::parse("unknown = 1").is_err());
        assert!(ConfigFile::parse("[dataset]\naugmentation = \"flip\"").is_err());
        assert!(ConfigFile::parse("[augment]\nparams = [{ k = \"pi:x\" }]").is_err());

        let file = ConfigFile::parse("[dataset]\nfinal_size = 400").unwrap();
        assert!(RunConfig::resolve(Command::Generate, file, Overrides::default()).is_err());

        let overrides = Overrides { inputs: vec!["/no/such/image.png".into()], ..Overrides::default() };
        assert!(RunConfig::resolve(Command::Augment, ConfigFile::default(), overrides).is_err());
    }

    #[test]
    fn load_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("in.png"), b"").unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "out = \"results\"\n[augment]\ninputs = [\"in.png\"]\n").unwrap();
        let file = ConfigFile::load(&path).unwrap();
        assert_eq!(file.out, Some(dir.path().join("results")));
        let run = RunConfig::resolve(Command::Augment, file, Overrides::default()).unwrap();
        assert_eq!(run.inputs, vec![dir.path().join("in.png")]);
        assert!(ConfigFile::load(&dir.path().join("missing.toml")).is_err());
    }

    #[test]
    fn thread_flags() {
        assert_eq!("auto".parse::<Threads>().unwrap(), Threads::Auto);
        assert_eq!("4".parse::<Threads>().unwrap().count(), 4);
        assert!("0".parse::<Threads>().is_err());
        assert!("-1".parse::<Threads>().is_err());
    }
}
