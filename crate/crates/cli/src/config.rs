//! Campaign configuration files and their expansion into runnable cells.
//!
//! A campaign lists groups of cells. Each group is a Cartesian product over
//! decision dimensions, noise strengths, algorithms and (for MO-CMA)
//! re-evaluation schemes. Groups are checked while the JSON is parsed, so
//! every mistake is reported with a line and column.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use noisebench_core::cma_kernel::KernelOverrides;
use noisebench_core::landscapes::{Family, LandscapeSpec, NoiseModel};
use noisebench_core::optimizers::{Algorithm, Budget, OptimizerConfig, Scheme, SuccessRule, VariationParams};
use noisebench_core::ObjectiveVector;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Sphere,
    Grating,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Sphere => "sphere",
            Problem::Grating => "grating",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Grating geometry. Screen positions are given either as absolute
/// coordinates or as multiples of the interference period 2π/h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrating")]
pub struct GratingGeometry {
    pub b: f64,
    pub h: f64,
    pub positions: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrating {
    #[serde(default = "study_b")]
    b: f64,
    #[serde(default = "study_h")]
    h: f64,
    positions: Option<Vec<f64>>,
    positions_in_periods: Option<Vec<f64>>,
}

fn study_b() -> f64 {
    noisebench_core::landscapes::STUDY_B
}

fn study_h() -> f64 {
    noisebench_core::landscapes::STUDY_H
}

impl Default for GratingGeometry {
    fn default() -> Self {
        Self { b: study_b(), h: study_h(), positions: vec![0.0, std::f64::consts::FRAC_PI_4] }
    }
}

impl TryFrom<RawGrating> for GratingGeometry {
    type Error = String;

    fn try_from(raw: RawGrating) -> Result<Self, String> {
        if !(raw.b > 0.0 && raw.h > 0.0) {
            return Err(format!("grating needs b > 0 and h > 0 (got b = {}, h = {})", raw.b, raw.h));
        }
        let positions = match (raw.positions, raw.positions_in_periods) {
            (Some(p), None) => p,
            (None, Some(t)) => t.iter().map(|k| k * std::f64::consts::TAU / raw.h).collect(),
            (None, None) => vec![0.0, std::f64::consts::FRAC_PI_4],
            (Some(_), Some(_)) => return Err("give either `positions` or `positions_in_periods`, not both".into()),
        };
        if positions.len() < 2 || positions.iter().any(|q| !q.is_finite()) {
            return Err("a grating needs at least two finite screen positions".into());
        }
        Ok(Self { b: raw.b, h: raw.h, positions })
    }
}

/// A group of cells sharing everything but the swept parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGroup", into = "RawGroup")]
pub struct CellGroup {
    pub problem: Problem,
    pub n: Vec<usize>,
    pub eps2: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub schemes: Vec<Scheme>,
    pub budget: Budget,
    pub objectives: usize,
    pub grating: Option<GratingGeometry>,
    pub reeval_interval: Option<u64>,
    pub success_rule: Option<SuccessRule>,
    pub variation: Option<VariationParams>,
    pub kernel: Option<KernelOverrides>,
    pub sigma0: Option<f64>,
    pub reference_point: Option<Vec<f64>>,
    pub runs: Option<usize>,
    /// Skipped unless long-running cells are requested explicitly.
    pub long_running: bool,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    problem: Problem,
    n: OneOrMany<usize>,
    #[serde(default)]
    eps2: Option<OneOrMany<f64>>,
    algorithms: OneOrMany<Algorithm>,
    #[serde(default)]
    schemes: Option<OneOrMany<Scheme>>,
    budget: Budget,
    #[serde(default)]
    objectives: Option<usize>,
    #[serde(default)]
    grating: Option<GratingGeometry>,
    #[serde(default)]
    reeval_interval: Option<u64>,
    #[serde(default)]
    success_rule: Option<SuccessRule>,
    #[serde(default)]
    variation: Option<VariationParams>,
    #[serde(default)]
    kernel: Option<KernelOverrides>,
    #[serde(default)]
    sigma0: Option<f64>,
    #[serde(default)]
    reference_point: Option<Vec<f64>>,
    #[serde(default)]
    runs: Option<usize>,
    #[serde(default)]
    long_running: bool,
}

impl From<CellGroup> for RawGroup {
    fn from(g: CellGroup) -> Self {
        Self {
            problem: g.problem,
            n: OneOrMany::Many(g.n),
            eps2: Some(OneOrMany::Many(g.eps2)),
            algorithms: OneOrMany::Many(g.algorithms),
            schemes: Some(OneOrMany::Many(g.schemes)),
            budget: g.budget,
            objectives: (g.problem == Problem::Sphere).then_some(g.objectives),
            grating: g.grating,
            reeval_interval: g.reeval_interval,
            success_rule: g.success_rule,
            variation: g.variation,
            kernel: g.kernel,
            sigma0: g.sigma0,
            reference_point: g.reference_point,
            runs: g.runs,
            long_running: g.long_running,
        }
    }
}

impl TryFrom<RawGroup> for CellGroup {
    type Error = String;

    fn try_from(raw: RawGroup) -> Result<Self, String> {
        let n = raw.n.to_vec();
        let eps2 = raw.eps2.map(|e| e.to_vec()).unwrap_or_else(|| vec![0.0]);
        let algorithms = raw.algorithms.to_vec();
        let schemes = raw.schemes.map(|s| s.to_vec()).unwrap_or_else(|| vec![Scheme::D]);
        if n.is_empty() || eps2.is_empty() || algorithms.is_empty() || schemes.is_empty() {
            return Err("`n`, `eps2`, `algorithms` and `schemes` must not be empty".into());
        }
        if let Some(&bad) = n.iter().find(|&&v| v < 2) {
            return Err(format!("decision dimension n = {bad} must be at least 2"));
        }
        if let Some(bad) = eps2.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(format!("noise strength eps2 = {bad} must be finite and >= 0"));
        }
        match raw.budget {
            Budget::Evaluations(0) | Budget::Generations(0) => log::warn!("zero budget: runs stop after initialization"),
            _ => {}
        }
        let objectives = match (raw.problem, raw.objectives, &raw.grating) {
            (Problem::Grating, Some(_), _) => {
                return Err("grating objectives follow from `grating.positions`; drop `objectives`".into())
            }
            (Problem::Grating, None, Some(g)) => g.positions.len(),
            (Problem::Grating, None, None) => 2,
            (Problem::Sphere, _, Some(_)) => return Err("`grating` settings given for a sphere group".into()),
            (Problem::Sphere, m, None) => m.unwrap_or(2),
        };
        if raw.problem == Problem::Sphere {
            if let Some(&bad) = n.iter().find(|&&v| v < objectives) {
                return Err(format!("sphere with {objectives} objectives needs n >= {objectives}, got n = {bad}"));
            }
        }
        if let Some(r) = &raw.reference_point {
            if r.len() != objectives {
                return Err(format!("reference point has {} entries for {objectives} objectives", r.len()));
            }
        }
        if raw.runs == Some(0) {
            return Err("`runs` must be positive".into());
        }
        let grating = match raw.problem {
            Problem::Grating => Some(raw.grating.unwrap_or_default()),
            Problem::Sphere => None,
        };
        Ok(Self {
            problem: raw.problem,
            n,
            eps2,
            algorithms,
            schemes,
            budget: raw.budget,
            objectives,
            grating,
            reeval_interval: raw.reeval_interval,
            success_rule: raw.success_rule,
            variation: raw.variation,
            kernel: raw.kernel,
            sigma0: raw.sigma0,
            reference_point: raw.reference_point,
            runs: raw.runs,
            long_running: raw.long_running,
        })
    }
}

fn default_mu() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub name: String,
    pub base_seed: u64,
    /// Independent runs per cell unless a group overrides it.
    pub runs: usize,
    #[serde(default = "default_mu")]
    pub mu: usize,
    pub cells: Vec<CellGroup>,
    /// Free-form notes copied into the summary.
    #[serde(default)]
    pub notes: BTreeMap<String, String>,
}

/// One fully specified campaign cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub label: String,
    pub problem: Problem,
    pub eps2: f64,
    pub runs: usize,
    pub long_running: bool,
    /// Template configuration; seed and stream are filled per run.
    pub config: OptimizerConfig,
}

impl Cell {
    /// Key shared by cells that face the same test case.
    pub fn case_key(&self) -> String {
        case_key(self.problem, self.config.landscape.n, self.config.landscape.m, self.eps2)
    }

    pub fn variant(&self) -> String {
        variant_label(self.config.algorithm, self.config.scheme)
    }
}

pub fn case_key(problem: Problem, n: usize, m: usize, eps2: f64) -> String {
    format!("{}-n{n}-m{m}-eps{eps2}", problem.name())
}

/// "mo-cma-D"; the scheme is left out for algorithms without parental
/// re-evaluation.
pub fn variant_label(algorithm: Algorithm, scheme: Scheme) -> String {
    match algorithm {
        Algorithm::MoCma => format!("{}-{scheme:?}", algorithm.name()),
        _ => algorithm.name().to_string(),
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cell {} ({})", self.index, self.label)
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str, path: &Path) -> CliResult<Self> {
        let cfg: CampaignConfig = serde_json::from_str(text).map_err(|e| CliError::ConfigSyntax {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.check(path)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Self::from_json(&text, path)
    }

    fn check(&self, path: &Path) -> CliResult<()> {
        let fail = |message: String| Err(CliError::Config { path: path.to_path_buf(), message });
        if self.runs == 0 {
            return fail("`runs` must be positive".into());
        }
        if self.mu == 0 {
            return fail("`mu` must be positive".into());
        }
        if self.cells.is_empty() {
            return fail("the campaign has no cells".into());
        }
        for (i, cell) in self.expand(path)?.iter().enumerate() {
            cell.config.validate().map_err(|e| CliError::Config {
                path: path.to_path_buf(),
                message: format!("cell {i} ({}): {e}", cell.label),
            })?;
        }
        Ok(())
    }

    /// All cells in a stable order: group, n, eps2, algorithm, scheme.
    pub fn expand(&self, path: &Path) -> CliResult<Vec<Cell>> {
        let mut cells = Vec::new();
        for (g, group) in self.cells.iter().enumerate() {
            let config_error = |e: noisebench_core::Error| CliError::Config {
                path: path.to_path_buf(),
                message: format!("cells[{g}]: {e}"),
            };
            for &n in &group.n {
                let base = match group.problem {
                    Problem::Sphere => LandscapeSpec::multi_sphere(n, group.objectives),
                    Problem::Grating => {
                        let geo = group.grating.clone().unwrap_or_default();
                        LandscapeSpec::grating(n, geo.b, geo.h, geo.positions)
                    }
                }
                .map_err(config_error)?;
                for &eps2 in &group.eps2 {
                    let noise = if eps2 > 0.0 { NoiseModel::decision(eps2) } else { NoiseModel::none() };
                    let landscape = base.clone().with_noise(noise);
                    for &algorithm in &group.algorithms {
                        let schemes = match algorithm {
                            Algorithm::MoCma => group.schemes.clone(),
                            _ => vec![Scheme::D],
                        };
                        for scheme in schemes {
                            let mut config =
                                OptimizerConfig::new(algorithm, landscape.clone(), self.mu, group.budget, self.base_seed)
                                    .with_scheme(scheme);
                            if let Some(r) = group.reeval_interval {
                                config.reeval_interval = r;
                            }
                            if let Some(s) = group.success_rule {
                                config.success_rule = s;
                            }
                            if let Some(v) = group.variation {
                                config.variation = v;
                            }
                            if let Some(k) = group.kernel {
                                config.kernel = k;
                            }
                            config.sigma0 = group.sigma0;
                            if let Some(r) = &group.reference_point {
                                config.reference_point = ObjectiveVector::new(r.clone(), landscape.senses);
                            }
                            let index = cells.len();
                            let label = format!(
                                "{}-{}",
                                case_key(group.problem, n, landscape.m, eps2),
                                variant_label(algorithm, scheme)
                            );
                            cells.push(Cell {
                                index,
                                label,
                                problem: group.problem,
                                eps2,
                                runs: group.runs.unwrap_or(self.runs),
                                long_running: group.long_running,
                                config,
                            });
                        }
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// Whether a landscape family matches a problem tag.
pub fn problem_of(family: Family) -> Problem {
    match family {
        Family::MultiSphere => Problem::Sphere,
        Family::DiffractionGrating => Problem::Grating,
    }
}
