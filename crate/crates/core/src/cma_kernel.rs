//! Elitist (1+1)-CMA kernel: Gaussian sampling around a single parent,
//! success-rule step-size control and rank-one covariance adaptation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::RandomStream;

/// Strategy constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub p_target: f64,
    pub c_p: f64,
    pub damping: f64,
    pub c_c: f64,
    pub c_cov: f64,
    pub p_thresh: f64,
}

impl KernelParams {
    pub fn defaults(n: usize) -> Self {
        let nf = n as f64;
        Self {
            p_target: 0.1818,
            c_p: 1.0 / 12.0,
            damping: 1.0 + nf / 2.0,
            c_c: 2.0 / (nf + 2.0),
            c_cov: 2.0 / (nf * nf + 6.0),
            p_thresh: 0.44,
        }
    }

    /// Largest possible |Δ ln σ| in one update.
    pub fn max_log_step(&self) -> f64 {
        1.0 / (self.damping * (1.0 - self.p_target))
    }
}

/// Optional replacements for the default constants.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelOverrides {
    pub p_target: Option<f64>,
    pub c_p: Option<f64>,
    pub damping: Option<f64>,
    pub c_c: Option<f64>,
    pub c_cov: Option<f64>,
    pub p_thresh: Option<f64>,
}

impl KernelOverrides {
    pub fn resolve(&self, n: usize) -> KernelParams {
        let d = KernelParams::defaults(n);
        KernelParams {
            p_target: self.p_target.unwrap_or(d.p_target),
            c_p: self.c_p.unwrap_or(d.c_p),
            damping: self.damping.unwrap_or(d.damping),
            c_c: self.c_c.unwrap_or(d.c_c),
            c_cov: self.c_cov.unwrap_or(d.c_cov),
            p_thresh: self.p_thresh.unwrap_or(d.p_thresh),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelState {
    pub x: Vec<f64>,
    pub sigma: f64,
    pub cov: DMatrix<f64>,
    /// Lower Cholesky factor of `cov`.
    pub chol: DMatrix<f64>,
    pub psucc: f64,
    pub pc: DVector<f64>,
}

/// The scalar part of a kernel, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSummary {
    pub sigma: f64,
    pub psucc: f64,
}

const SIGMA_FLOOR: f64 = 1e-300;

impl KernelState {
    pub fn new(x0: Vec<f64>, sigma0: f64, params: &KernelParams) -> Result<Self> {
        if !(sigma0 > 0.0 && sigma0.is_finite()) {
            return invalid(format!("initial step size {sigma0} must be positive"));
        }
        let n = x0.len();
        Ok(Self {
            x: x0,
            sigma: sigma0,
            cov: DMatrix::identity(n, n),
            chol: DMatrix::identity(n, n),
            psucc: params.p_target,
            pc: DVector::zeros(n),
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn summary(&self) -> KernelSummary {
        KernelSummary { sigma: self.sigma, psucc: self.psucc }
    }

    /// Draws y = L z with z ~ N(0, I); the offspring is x + σ y.
    pub fn sample_step(&self, rng: &mut RandomStream) -> Vec<f64> {
        let n = self.n();
        let mut z = vec![0.0; n];
        rng.fill_standard_normal(&mut z);
        let mut y = vec![0.0; n];
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, zj) in z.iter().enumerate().take(i + 1) {
                acc += self.chol[(i, j)] * zj;
            }
            *yi = acc;
        }
        y
    }

    /// Offspring ~ N(x, σ² C), returned with its normalized step.
    pub fn sample(&self, rng: &mut RandomStream) -> (Vec<f64>, Vec<f64>) {
        let step = self.sample_step(rng);
        let child = self.x.iter().zip(&step).map(|(xi, yi)| xi + self.sigma * yi).collect();
        (child, step)
    }

    /// Success-rule update of the smoothed success rate and the step size.
    pub fn update_step_size(&mut self, succeeded: bool, params: &KernelParams) {
        let indicator = if succeeded { 1.0 } else { 0.0 };
        self.psucc = (1.0 - params.c_p) * self.psucc + params.c_p * indicator;
        self.sigma *= ((self.psucc - params.p_target) / (params.damping * (1.0 - params.p_target))).exp();
        if self.sigma < SIGMA_FLOOR {
            self.sigma = SIGMA_FLOOR;
        }
    }

    /// Evolution-path and rank-one covariance update with the normalized
    /// step (offspring − parent)/σ.
    pub fn update_covariance(&mut self, step: &[f64], params: &KernelParams) {
        let previous = (self.cov.clone(), self.pc.clone());
        let c_cov = params.c_cov;
        if self.psucc < params.p_thresh {
            let w = (params.c_c * (2.0 - params.c_c)).sqrt();
            for (p, s) in self.pc.iter_mut().zip(step) {
                *p = (1.0 - params.c_c) * *p + w * s;
            }
            self.cov *= 1.0 - c_cov;
        } else {
            self.pc *= 1.0 - params.c_c;
            let keep = 1.0 - c_cov + c_cov * params.c_c * (2.0 - params.c_c);
            self.cov *= keep;
        }
        self.cov.ger(c_cov, &self.pc, &self.pc, 1.0);
        symmetrize(&mut self.cov);
        match self.cov.clone().cholesky() {
            Some(c) => self.chol = c.unpack(),
            None => {
                log::debug!("covariance update lost positive definiteness; reverted");
                self.cov = previous.0;
                self.pc = previous.1;
            }
        }
    }

    /// One (1+1)-CMA update. On success the parent moves to x + σ·step
    /// (σ taken before the step-size update) and the covariance adapts.
    pub fn update(&mut self, succeeded: bool, step: &[f64], params: &KernelParams) {
        let sigma_before = self.sigma;
        self.update_step_size(succeeded, params);
        if succeeded {
            for (x, s) in self.x.iter_mut().zip(step) {
                *x += sigma_before * s;
            }
            self.update_covariance(step, params);
        }
    }

    pub fn symmetry_error(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.cov[(i, j)] - self.cov[(j, i)]).abs());
            }
        }
        worst
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}
