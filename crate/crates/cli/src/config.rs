//! Run configuration.
//!
//! Configs are TOML with flat top-level keys and an optional array of
//! `[[subdomain]]` blocks. A config may name a `preset`; its own keys then
//! override the preset's. See `examples/configs/` for the shipped presets.

use std::path::{Path, PathBuf};

use mortar_fem::analysis::{Experiment, MeshLayout, Profile1d, TimeFactor, TimeStep};
use mortar_fem::geometry::Rect;
use mortar_fem::solvers::InitialData;
use mortar_fem::{ManufacturedSolution, MeshSpec, MortarRule, Partition};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const PRESETS: [(&str, &str); 5] = [
    ("table1", include_str!("../examples/configs/table1.toml")),
    ("smooth", include_str!("../examples/configs/smooth.toml")),
    ("superconvergence", include_str!("../examples/configs/superconvergence.toml")),
    ("time-order", include_str!("../examples/configs/time-order.toml")),
    ("patch", include_str!("../examples/configs/patch.toml")),
];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("unknown preset `{0}` (known: table1, smooth, superconvergence, time-order, patch)")]
    UnknownPreset(String),
    #[error("no preset and no config file given")]
    Empty,
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

/// `time_step = 0.01` or `time_step = "h^2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeStepValue {
    Fixed(f64),
    Rule(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubdomainBlock {
    /// `[x0, x1, y0, y1]`; either every block has one or none does.
    pub rect: Option<[f64; 4]>,
    pub nx: usize,
    pub ny: usize,
    pub degree: Option<usize>,
    pub alpha: Option<f64>,
}

/// Config file contents before defaults are applied. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub preset: Option<String>,
    pub partition: Option<String>,
    pub degree: Option<usize>,
    pub alpha: Option<Vec<f64>>,
    pub layout: Option<String>,
    /// `[[interface, mortar_subdomain], ...]`
    pub mortar: Option<Vec<[usize; 2]>>,
    pub consistency_flux: Option<bool>,
    pub final_time: Option<f64>,
    pub time_step: Option<TimeStepValue>,
    pub initial_data: Option<String>,
    pub solution_x: Option<String>,
    pub solution_y: Option<String>,
    pub solution_time: Option<String>,
    pub stationary: Option<bool>,
    /// Mesh parameters `n` for `h = 1/n`.
    pub resolutions: Option<Vec<usize>>,
    /// With `coarsest`: `n = coarsest * 2^i` for `i = 0..=refinements`.
    pub refinements: Option<usize>,
    pub coarsest: Option<usize>,
    pub resolution: Option<usize>,
    pub time_resolution: Option<usize>,
    pub time_steps: Option<Vec<f64>>,
    pub negative_order: Option<u32>,
    pub samples: Option<usize>,
    pub compare_conforming: Option<bool>,
    pub project_profile: Option<String>,
    pub out: Option<PathBuf>,
    pub subdomain: Option<Vec<SubdomainBlock>>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $(if $top.$f.is_some() { $base.$f = $top.$f.clone(); })*
    };
}

impl RawConfig {
    pub fn parse(text: &str, source_name: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let start = e.span().map_or(0, |s| s.start).min(text.len());
            let before = &text[..start];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            ConfigError::Parse {
                source_name: source_name.to_string(),
                line,
                column,
                message: e.message().trim().to_string(),
            }
        })
    }

    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        let (_, text) = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))?;
        Self::parse(text, name)
    }

    /// Keys set in `top` replace those in `self`.
    pub fn overlay(&mut self, top: &RawConfig) {
        overlay!(self, top; preset, partition, degree, alpha, layout, mortar, consistency_flux,
            final_time, time_step, initial_data, solution_x, solution_y, solution_time, stationary,
            resolutions, refinements, coarsest, resolution, time_resolution, time_steps,
            negative_order, samples, compare_conforming, project_profile, out, subdomain);
    }

    /// Generic defaults for keys neither the preset nor the file sets.
    fn defaults() -> Self {
        Self {
            degree: Some(1),
            layout: Some("nonmatching".into()),
            consistency_flux: Some(false),
            final_time: Some(1.0),
            time_step: Some(TimeStepValue::Rule("h^2".into())),
            initial_data: Some("interpolant".into()),
            solution_x: Some("cubic".into()),
            solution_y: Some("cubic".into()),
            solution_time: Some("exp".into()),
            stationary: Some(false),
            negative_order: Some(1),
            samples: Some(41),
            compare_conforming: Some(false),
            project_profile: Some("sine".into()),
            out: Some(PathBuf::from("out")),
            ..Self::default()
        }
    }
}

/// Loads a config from an optional file and an optional preset name. A
/// preset given here takes precedence over a `preset` key in the file.
pub fn load(path: Option<&Path>, preset: Option<&str>) -> Result<RunConfig, LoadError> {
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| LoadError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            Some(RawConfig::parse(&text, &p.display().to_string())?)
        }
        None => None,
    };
    let preset = preset.map(str::to_string).or_else(|| file.as_ref().and_then(|f| f.preset.clone()));
    if preset.is_none() && file.is_none() {
        return Err(ConfigError::Empty.into());
    }
    let mut raw = RawConfig::defaults();
    let mut provenance = Vec::new();
    if let Some(name) = &preset {
        raw.overlay(&RawConfig::preset(name)?);
        provenance.push(format!("preset:{name}"));
    }
    if let Some(f) = &file {
        raw.overlay(f);
        provenance.push(format!("file:{}", path.unwrap().display()));
    }
    raw.preset = preset;
    Ok(RunConfig::resolve(raw, provenance.join("+"))?)
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub provenance: String,
    pub experiment: Experiment,
    pub time_step: TimeStep,
    pub stationary: bool,
    pub resolutions: Vec<usize>,
    pub resolution: usize,
    pub time_resolution: usize,
    pub time_steps: Vec<f64>,
    pub negative_order: u32,
    pub samples: usize,
    pub compare_conforming: bool,
    pub project_profile: Profile1d,
    pub out: PathBuf,
}

fn profile(field: &str, name: &str) -> Result<Profile1d, ConfigError> {
    Profile1d::from_name(name)
        .ok_or_else(|| invalid(field, format!("unknown profile `{name}` (cubic, bubble, sine, sine-exp, linear, zero)")))
}

fn positive(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn resolve(raw: RawConfig, provenance: String) -> Result<Self, ConfigError> {
        let blocks = raw.subdomain.clone().unwrap_or_default();
        let with_rect = blocks.iter().filter(|b| b.rect.is_some()).count();
        let partition = if with_rect > 0 {
            if with_rect != blocks.len() {
                return Err(invalid("subdomain.rect", "either every subdomain block has a rect or none does"));
            }
            let rects = blocks
                .iter()
                .map(|b| {
                    let [x0, x1, y0, y1] = b.rect.unwrap();
                    Rect::new(x0, x1, y0, y1)
                })
                .collect();
            Partition::new(rects).map_err(|e| invalid("subdomain.rect", e.to_string()))?
        } else {
            let name = raw.partition.as_deref().ok_or_else(|| invalid("partition", "missing"))?;
            Partition::preset(name).map_err(|e| invalid("partition", e.to_string()))?
        };
        let count = partition.len();

        let degree = raw.degree.unwrap();
        if degree == 0 {
            return Err(invalid("degree", "must be at least 1"));
        }

        let alphas = if !blocks.is_empty() && blocks.iter().all(|b| b.alpha.is_some()) {
            blocks.iter().map(|b| b.alpha.unwrap()).collect()
        } else if blocks.iter().any(|b| b.alpha.is_some()) {
            return Err(invalid("subdomain.alpha", "either every subdomain block has an alpha or none does"));
        } else {
            raw.alpha.clone().unwrap_or_else(|| vec![1.0; count])
        };
        if alphas.len() != count {
            return Err(invalid(
                "alpha",
                format!("has {} entries but the partition has {count} subdomains", alphas.len()),
            ));
        }
        for a in &alphas {
            positive("alpha", *a)?;
        }

        let layout = if blocks.is_empty() {
            match raw.layout.as_deref().unwrap() {
                "nonmatching" => MeshLayout::Nonmatching,
                "matching" => MeshLayout::Matching,
                other => return Err(invalid("layout", format!("expected `nonmatching` or `matching`, got `{other}`"))),
            }
        } else {
            if blocks.len() != count {
                return Err(invalid(
                    "subdomain",
                    format!("{} blocks for {count} subdomains", blocks.len()),
                ));
            }
            let mut specs = Vec::with_capacity(count);
            for (i, b) in blocks.iter().enumerate() {
                if b.nx == 0 || b.ny == 0 {
                    return Err(invalid(format!("subdomain[{i}].nx/ny"), "cell counts must be at least 1"));
                }
                let d = b.degree.unwrap_or(degree);
                if d == 0 {
                    return Err(invalid(format!("subdomain[{i}].degree"), "must be at least 1"));
                }
                specs.push(MeshSpec { nx: b.nx, ny: b.ny, degree: d });
            }
            MeshLayout::Explicit(specs)
        };

        let mut rule = MortarRule::default();
        for &[gamma, sub] in raw.mortar.as_deref().unwrap_or(&[]) {
            let n_if = partition.interfaces().len();
            if gamma >= n_if {
                return Err(invalid("mortar", format!("interface {gamma} out of range ({n_if} interfaces)")));
            }
            let (a, b) = partition.interfaces()[gamma].subdomains;
            if sub != a && sub != b {
                return Err(invalid("mortar", format!("subdomain {sub} is not a side of interface {gamma}")));
            }
            rule = rule.with_override(gamma, sub);
        }

        let final_time = positive("final_time", raw.final_time.unwrap())?;
        let time_step = match raw.time_step.clone().unwrap() {
            TimeStepValue::Fixed(r) => TimeStep::Fixed(positive("time_step", r)?),
            TimeStepValue::Rule(s) if s == "h^2" => TimeStep::SquareOfH,
            TimeStepValue::Rule(s) => return Err(invalid("time_step", format!("expected a number or \"h^2\", got \"{s}\""))),
        };
        let initial_data = match raw.initial_data.as_deref().unwrap() {
            "interpolant" => InitialData::Interpolant,
            "elliptic-projection" => InitialData::EllipticProjection,
            other => {
                return Err(invalid(
                    "initial_data",
                    format!("expected `interpolant` or `elliptic-projection`, got `{other}`"),
                ))
            }
        };
        let time = raw.solution_time.as_deref().unwrap();
        let time = TimeFactor::from_name(time)
            .ok_or_else(|| invalid("solution_time", format!("unknown time factor `{time}` (exp, linear, constant)")))?;
        let solution = ManufacturedSolution::new(
            profile("solution_x", raw.solution_x.as_deref().unwrap())?,
            profile("solution_y", raw.solution_y.as_deref().unwrap())?,
            time,
            alphas,
        );

        let resolutions = match (raw.refinements, raw.coarsest) {
            (Some(m), Some(n0)) => {
                if n0 == 0 {
                    return Err(invalid("coarsest", "must be at least 1"));
                }
                (0..=m).map(|i| n0 << i).collect()
            }
            (Some(_), None) => return Err(invalid("coarsest", "required together with `refinements`")),
            (None, Some(_)) => return Err(invalid("refinements", "required together with `coarsest`")),
            (None, None) => raw.resolutions.clone().unwrap_or_default(),
        };
        if resolutions.contains(&0) {
            return Err(invalid("resolutions", "h = 1/n needs n >= 1"));
        }
        if resolutions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("resolutions", "must be strictly increasing so that h decreases"));
        }
        let resolution = raw.resolution.or(resolutions.first().copied()).unwrap_or(4);
        if resolution == 0 {
            return Err(invalid("resolution", "h = 1/n needs n >= 1"));
        }
        let time_resolution = raw.time_resolution.unwrap_or(resolution);
        if time_resolution == 0 {
            return Err(invalid("time_resolution", "h = 1/n needs n >= 1"));
        }
        let time_steps = raw.time_steps.clone().unwrap_or_default();
        for &r in &time_steps {
            positive("time_steps", r)?;
        }
        if time_steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("time_steps", "must be strictly decreasing"));
        }
        let negative_order = raw.negative_order.unwrap();
        if negative_order > 2 {
            return Err(invalid("negative_order", "only s = 0, 1, 2 are supported"));
        }
        let samples = raw.samples.unwrap();
        if samples < 2 {
            return Err(invalid("samples", "need at least 2 points per direction"));
        }
        let project_profile = profile("project_profile", raw.project_profile.as_deref().unwrap())?;

        let experiment = Experiment {
            partition,
            degree,
            solution,
            consistency_flux: raw.consistency_flux.unwrap(),
            final_time,
            initial_data,
            layout,
            mortar_rule: rule,
        };
        // time steps must land on T
        if let TimeStep::Fixed(r) = time_step {
            experiment.steps(r).map_err(|e| invalid("time_step", e.to_string()))?;
        }
        for &r in &time_steps {
            experiment.steps(r).map_err(|e| invalid("time_steps", e.to_string()))?;
        }

        Ok(Self {
            out: raw.out.clone().unwrap(),
            stationary: raw.stationary.unwrap(),
            compare_conforming: raw.compare_conforming.unwrap(),
            raw,
            provenance,
            experiment,
            time_step,
            resolutions,
            resolution,
            time_resolution,
            time_steps,
            negative_order,
            samples,
            project_profile,
        })
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.experiment.layout, MeshLayout::Explicit(_))
    }

    /// SHA-256 of the resolved config in canonical TOML, ignoring the output
    /// directory.
    pub fn hash(&self) -> String {
        let mut raw = self.raw.clone();
        raw.out = None;
        let text = toml::to_string(&raw).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Mesh parameters for a spatial study; at least two are required.
    pub fn study_resolutions(&self) -> Result<&[usize], ConfigError> {
        if self.is_explicit() {
            return Err(invalid("subdomain", "explicit meshes fix h; studies need `resolutions` with a layout"));
        }
        if self.resolutions.len() < 2 {
            return Err(invalid("resolutions", "need at least 2 resolutions"));
        }
        Ok(&self.resolutions)
    }

    pub fn study_time_steps(&self) -> Result<&[f64], ConfigError> {
        if self.time_steps.len() < 2 {
            return Err(invalid("time_steps", "need at least 2 time steps"));
        }
        Ok(&self.time_steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_text(text: &str) -> Result<RunConfig, ConfigError> {
        let mut raw = RawConfig::defaults();
        let file = RawConfig::parse(text, "test")?;
        if let Some(p) = &file.preset {
            raw.overlay(&RawConfig::preset(p)?);
        }
        raw.overlay(&file);
        RunConfig::resolve(raw, "test".into())
    }

    #[test]
    fn presets_agree_with_library_experiments() {
        for (name, _) in PRESETS {
            let c = from_text(&format!("preset = \"{name}\"")).unwrap();
            assert_eq!(c.experiment, Experiment::preset(name).unwrap(), "{name}");
        }
    }

    #[test]
    fn table1_preset_parameters() {
        let c = from_text("preset = \"table1\"").unwrap();
        assert_eq!(c.resolutions, [6, 8, 10, 12, 14]);
        assert_eq!(c.time_step, TimeStep::SquareOfH);
        assert_eq!(c.experiment.partition.len(), 3);
        assert_eq!(c.experiment.solution.alphas, [1.0, 10.0, 10.0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = from_text("degree = 2\nalpha = [1.0,\nfinal_time = \n").unwrap_err();
        let ConfigError::Parse { line, .. } = err else { panic!("{err:?}") };
        assert!(line >= 2, "{line}");
        let err = from_text("degree = 2\n\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn validation_names_the_field() {
        let err = from_text("preset = \"table1\"\nalpha = [1.0, 10.0]").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "alpha"), "{err}");
        let err = from_text("preset = \"table1\"\ntime_step = 0.3").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "time_step"), "{err}");
        let err = from_text("preset = \"table1\"\nresolutions = [8, 6]").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "resolutions"), "{err}");
        let err = from_text("partition = \"lshape\"\ndegree = 0").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "degree"), "{err}");
        assert_eq!(from_text("preset = \"nope\"").unwrap_err(), ConfigError::UnknownPreset("nope".into()));
    }

    #[test]
    fn subdomain_blocks_define_meshes_and_coefficients() {
        let c = from_text(
            "degree = 2\n\
             [[subdomain]]\nrect = [0.0, 1.0, 0.0, 1.0]\nnx = 3\nny = 2\nalpha = 2.0\n\
             [[subdomain]]\nrect = [1.0, 2.0, 0.0, 1.0]\nnx = 4\nny = 4\ndegree = 3\nalpha = 5.0\n",
        )
        .unwrap();
        assert_eq!(c.experiment.solution.alphas, [2.0, 5.0]);
        let MeshLayout::Explicit(specs) = &c.experiment.layout else { panic!() };
        assert_eq!(specs[1], MeshSpec { nx: 4, ny: 4, degree: 3 });
        assert!(c.study_resolutions().is_err());
    }

    #[test]
    fn refinement_count_expands_to_resolutions() {
        let c = from_text("preset = \"smooth\"\nrefinements = 3\ncoarsest = 2").unwrap();
        assert_eq!(c.resolutions, [2, 4, 8, 16]);
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = from_text("preset = \"table1\"\nout = \"a\"").unwrap();
        let b = from_text("preset = \"table1\"\nout = \"b\"").unwrap();
        let c = from_text("preset = \"table1\"\ndegree = 2").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
