//! Analytic fronts and per-run quality figures.

use noisebench_core::indicators::{delta_d, delta_v, hypervolume};
use noisebench_core::landscapes::{Family, GratingFront, LandscapeSpec, SphereFront};
use noisebench_core::optimizers::RunRecord;
use noisebench_core::posthoc::reevaluate_ideal;
use noisebench_core::ObjectiveVector;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;

/// Points drawn along a curved analytic front for plotting.
const CURVE_POINTS: usize = 101;

#[derive(Debug, Clone, Copy)]
pub enum AnalyticFront {
    Sphere,
    Grating(GratingFront),
}

impl AnalyticFront {
    /// The known front of a landscape, when there is one.
    pub fn of(spec: &LandscapeSpec) -> Option<Self> {
        match spec.family {
            Family::MultiSphere if spec.m == 2 => Some(AnalyticFront::Sphere),
            Family::MultiSphere => None,
            Family::DiffractionGrating => GratingFront::for_landscape(spec).ok().map(AnalyticFront::Grating),
        }
    }

    /// Hypervolume of the continuous front, known for the default
    /// reference points only.
    pub fn hypervolume(&self, reference: &ObjectiveVector) -> Option<f64> {
        match self {
            AnalyticFront::Sphere if reference.values == [2.0, 2.0] => Some(SphereFront::HV_REF_2_2),
            AnalyticFront::Grating(g) if reference.values == [0.0, 0.0] => Some(g.hypervolume()),
            _ => None,
        }
    }

    /// `count` front points evenly spaced in the first objective, ascending.
    pub fn evenly_spaced(&self, count: usize) -> Vec<(f64, f64)> {
        match self {
            AnalyticFront::Sphere => SphereFront::evenly_spaced(count),
            AnalyticFront::Grating(g) => g.evenly_spaced(count),
        }
    }

    /// Polyline for plotting: the two end points of the linear grating
    /// front, a dense sample of the curved sphere front.
    pub fn plot_points(&self) -> Vec<(f64, f64)> {
        match self {
            AnalyticFront::Sphere => SphereFront::evenly_spaced(CURVE_POINTS),
            AnalyticFront::Grating(g) => g.endpoints().to_vec(),
        }
    }
}

/// Scalar outcome of one run, one row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub run_id: String,
    pub cell: usize,
    pub run: usize,
    pub case: String,
    pub variant: String,
    pub algorithm: String,
    pub scheme: String,
    pub problem: String,
    pub n: usize,
    pub m: usize,
    pub eps2: f64,
    pub mu: usize,
    pub seed: u64,
    pub stream: u64,
    pub evaluations: u64,
    pub generations: u64,
    pub initial_hv: f64,
    pub perceived_hv: f64,
    pub ideal_hv: f64,
    pub delta_v_perceived: Option<f64>,
    pub delta_v_ideal: Option<f64>,
    pub delta_d_perceived: Option<f64>,
    pub delta_d_ideal: Option<f64>,
}

/// Per-run figures plus the noise-free values of the final population.
pub struct Evaluated {
    pub metrics: RunMetrics,
    pub ideal: Vec<ObjectiveVector>,
}

pub fn evaluate_run(
    run_id: &str,
    cell: usize,
    run: usize,
    case: &str,
    variant: &str,
    record: &RunRecord,
) -> CliResult<Evaluated> {
    let cfg = &record.config;
    let spec = &cfg.landscape;
    let perceived = record.perceived_front();
    let ideal = reevaluate_ideal(&record.genotypes(), spec, run_id)?.all;
    let perceived_hv = hypervolume(&perceived, &cfg.reference_point)?;
    let ideal_hv = hypervolume(&ideal, &cfg.reference_point)?;
    let analytic = AnalyticFront::of(spec);
    let v_ref = analytic.and_then(|a| a.hypervolume(&cfg.reference_point));
    let dv = |v: f64| v_ref.map(|r| delta_v(r, v)).transpose();
    let reference: Option<Vec<ObjectiveVector>> = analytic.filter(|_| !perceived.is_empty()).map(|a| {
        a.evenly_spaced(perceived.len())
            .into_iter()
            .map(|(f1, f2)| ObjectiveVector::new(vec![f1, f2], spec.senses))
            .collect()
    });
    let dd = |front: &[ObjectiveVector]| -> CliResult<Option<f64>> {
        match &reference {
            Some(r) => Ok(Some(delta_d(front, r)?.value)),
            None => Ok(None),
        }
    };
    let metrics = RunMetrics {
        run_id: run_id.to_string(),
        cell,
        run,
        case: case.to_string(),
        variant: variant.to_string(),
        algorithm: cfg.algorithm.name().to_string(),
        scheme: format!("{:?}", cfg.scheme),
        problem: crate::config::problem_of(spec.family).name().to_string(),
        n: spec.n,
        m: spec.m,
        eps2: spec.noise.variance(),
        mu: cfg.mu,
        seed: cfg.seed,
        stream: cfg.stream,
        evaluations: record.evaluations,
        generations: record.generations,
        initial_hv: record.initial_hv,
        perceived_hv,
        ideal_hv,
        delta_v_perceived: dv(perceived_hv)?,
        delta_v_ideal: dv(ideal_hv)?,
        delta_d_perceived: dd(&perceived)?,
        delta_d_ideal: dd(&ideal)?,
    };
    Ok(Evaluated { metrics, ideal })
}
