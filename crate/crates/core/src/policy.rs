//! Fixed MLP policy: two tanh hidden layers of size 8, linear outputs.
//! Discrete heads pick the argmax (ties to the lowest index); the continuous
//! head squashes its single output through tanh into [-1, 1].

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Discrete(usize),
    ContinuousScalar,
}

/// The policy's action as consumed by an environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Discrete(usize),
    Continuous(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicySpec {
    pub obs_dim: usize,
    pub hidden: usize,
    pub action: ActionKind,
}

impl PolicySpec {
    pub fn new(obs_dim: usize, action: ActionKind) -> Self {
        PolicySpec { obs_dim, hidden: 8, action }
    }

    pub fn out_dim(&self) -> usize {
        match self.action {
            ActionKind::Discrete(k) => k,
            ActionKind::ContinuousScalar => 1,
        }
    }

    /// Total parameter count, biases included.
    pub fn param_count(&self) -> usize {
        let h = self.hidden;
        let o = self.out_dim();
        (self.obs_dim * h + h) + (h * h + h) + (h * o + o)
    }

    pub fn forward(&self, params: &[f64], obs: &[f64]) -> Result<Action> {
        if params.len() != self.param_count() {
            return Err(CoreError::DimensionMismatch {
                expected: self.param_count(),
                actual: params.len(),
            });
        }
        if obs.len() != self.obs_dim {
            return Err(CoreError::DimensionMismatch {
                expected: self.obs_dim,
                actual: obs.len(),
            });
        }
        let h = self.hidden;
        let o = self.out_dim();
        let mut offset = 0;

        let mut h1 = vec![0.0; h];
        for i in 0..h {
            let mut s = 0.0;
            for (j, x) in obs.iter().enumerate() {
                s += params[offset + i * self.obs_dim + j] * x;
            }
            h1[i] = s;
        }
        offset += self.obs_dim * h;
        for (i, v) in h1.iter_mut().enumerate() {
            *v = (*v + params[offset + i]).tanh();
        }
        offset += h;

        let mut h2 = vec![0.0; h];
        for i in 0..h {
            let mut s = 0.0;
            for (j, x) in h1.iter().enumerate() {
                s += params[offset + i * h + j] * x;
            }
            h2[i] = s;
        }
        offset += h * h;
        for (i, v) in h2.iter_mut().enumerate() {
            *v = (*v + params[offset + i]).tanh();
        }
        offset += h;

        let mut out = vec![0.0; o];
        for i in 0..o {
            let mut s = 0.0;
            for (j, x) in h2.iter().enumerate() {
                s += params[offset + i * h + j] * x;
            }
            out[i] = s;
        }
        offset += h * o;
        for (i, v) in out.iter_mut().enumerate() {
            *v += params[offset + i];
        }

        Ok(match self.action {
            ActionKind::Discrete(_) => {
                let mut best = 0;
                for (i, v) in out.iter().enumerate() {
                    if *v > out[best] {
                        best = i;
                    }
                }
                Action::Discrete(best)
            }
            ActionKind::ContinuousScalar => Action::Continuous(out[0].tanh()),
        })
    }
}
