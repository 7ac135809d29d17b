//! Adaptive-moment optimiser with Nesterov momentum and a momentum schedule.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NadamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub schedule_decay: f64,
}

impl Default for NadamConfig {
    fn default() -> Self {
        Self { learning_rate: 0.002, beta1: 0.9, beta2: 0.999, epsilon: 1e-7, schedule_decay: 0.004 }
    }
}

impl NadamConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0
            && self.schedule_decay >= 0.0;
        if !ok {
            return Err(Error::Config("invalid optimizer hyperparameters".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nadam {
    pub config: NadamConfig,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub m_schedule: f64,
    pub step: u64,
}

impl Nadam {
    pub fn new(config: NadamConfig, n: usize) -> Self {
        Self { config, m: vec![0.0; n], v: vec![0.0; n], m_schedule: 1.0, step: 0 }
    }

    fn momentum(&self, t: u64) -> f64 {
        let c = &self.config;
        c.beta1 * (1.0 - 0.5 * math::powf(0.96, t as f64 * c.schedule_decay))
    }

    pub fn update(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grad.len(), self.m.len());
        self.step += 1;
        let t = self.step;
        let c = self.config;
        let mu_t = self.momentum(t);
        let mu_next = self.momentum(t + 1);
        let sched_new = self.m_schedule * mu_t;
        let sched_next = sched_new * mu_next;
        self.m_schedule = sched_new;
        let bc2 = 1.0 - math::powf(c.beta2, t as f64);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = c.beta1 * self.m[i] + (1.0 - c.beta1) * g;
            self.v[i] = c.beta2 * self.v[i] + (1.0 - c.beta2) * g * g;
            let g_hat = g / (1.0 - sched_new);
            let m_hat = self.m[i] / (1.0 - sched_next);
            let v_hat = self.v[i] / bc2;
            let m_bar = (1.0 - mu_t) * g_hat + mu_next * m_hat;
            params[i] -= c.learning_rate * m_bar / (math::sqrt(v_hat) + c.epsilon);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_matches_closed_form() {
        let mut opt = Nadam::new(NadamConfig::default(), 1);
        let mut p = [1.0];
        opt.update(&mut p, &[0.5]);
        let mu1 = 0.9 * (1.0 - 0.5 * 0.96f64.powf(0.004));
        let mu2 = 0.9 * (1.0 - 0.5 * 0.96f64.powf(0.008));
        let g_hat = 0.5 / (1.0 - mu1);
        let m_hat = 0.05 / (1.0 - mu1 * mu2);
        let v_hat: f64 = 0.001 * 0.25 / 0.001;
        let want = 1.0 - 0.002 * ((1.0 - mu1) * g_hat + mu2 * m_hat) / (v_hat.sqrt() + 1e-7);
        assert!((p[0] - want).abs() < 1e-15);
    }

    #[test]
    fn minimises_a_quadratic() {
        let mut opt = Nadam::new(NadamConfig { learning_rate: 0.05, ..Default::default() }, 2);
        let mut p = [3.0, -2.0];
        for _ in 0..2000 {
            let g = [2.0 * p[0], 8.0 * p[1]];
            opt.update(&mut p, &g);
        }
        assert!(p[0].abs() < 1e-2 && p[1].abs() < 1e-2, "{p:?}");
    }
}
