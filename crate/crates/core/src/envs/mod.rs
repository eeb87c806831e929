//! Self-contained benchmark environments. A rollout is a pure function of
//! the environment constants, the policy parameters, and the episode rng,
//! so evaluations can run in parallel in any order.

mod acrobot;
mod cartpole;

pub use acrobot::{acrobot_step, energy as acrobot_energy, rk4_step as acrobot_rk4_step, AcrobotState};
pub use cartpole::{cartpole_step, CartPoleState};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::policy::{Action, ActionKind, PolicySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvId {
    #[serde(rename = "cartpole")]
    CartPole,
    #[serde(rename = "acrobot")]
    Acrobot,
    #[serde(rename = "continuous-cartpole")]
    ContinuousCartPole,
    #[serde(rename = "continuous-cartpole-hard")]
    /// Same dynamics as ContinuousCartPole but the per-step rewards are
    /// withheld and delivered as one terminal sum; returns are numerically
    /// identical for the same trajectory.
    ContinuousCartPoleHard,
}

impl std::fmt::Display for EnvId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EnvId::CartPole => "cartpole",
            EnvId::Acrobot => "acrobot",
            EnvId::ContinuousCartPole => "continuous-cartpole",
            EnvId::ContinuousCartPoleHard => "continuous-cartpole-hard",
        };
        f.write_str(s)
    }
}

/// Physics constants and termination thresholds for one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub id: EnvId,
    pub max_steps: usize,
    pub gravity: f64,
    pub timestep: f64,
    // cart-pole only
    pub cart_mass: f64,
    pub pole_mass: f64,
    pub pole_half_length: f64,
    pub force_magnitude: f64,
    pub angle_threshold: f64,
    pub position_threshold: f64,
}

impl EnvSpec {
    pub fn new(id: EnvId) -> Self {
        match id {
            EnvId::CartPole | EnvId::ContinuousCartPole | EnvId::ContinuousCartPoleHard => EnvSpec {
                id,
                max_steps: 200,
                gravity: 9.8,
                timestep: 0.02,
                cart_mass: 1.0,
                pole_mass: 0.1,
                pole_half_length: 0.5,
                force_magnitude: 10.0,
                angle_threshold: 15.0_f64.to_radians(),
                position_threshold: 2.4,
            },
            EnvId::Acrobot => EnvSpec {
                id,
                max_steps: 200,
                gravity: 9.8,
                timestep: 0.2,
                cart_mass: 0.0,
                pole_mass: 0.0,
                pole_half_length: 0.0,
                force_magnitude: 1.0,
                angle_threshold: 0.0,
                position_threshold: 0.0,
            },
        }
    }

    /// Switch the cart-pole failure angle to the 12-degree convention used
    /// by the common benchmark implementation.
    pub fn set_gym_compat_angle(&mut self) {
        self.angle_threshold = 12.0_f64.to_radians();
    }

    pub fn obs_dim(&self) -> usize {
        match self.id {
            EnvId::Acrobot => 6,
            _ => 4,
        }
    }

    pub fn policy_spec(&self) -> PolicySpec {
        let action = match self.id {
            EnvId::CartPole => ActionKind::Discrete(2),
            EnvId::Acrobot => ActionKind::Discrete(3),
            EnvId::ContinuousCartPole | EnvId::ContinuousCartPoleHard => {
                ActionKind::ContinuousScalar
            }
        };
        PolicySpec::new(self.obs_dim(), action)
    }

    pub fn param_count(&self) -> usize {
        self.policy_spec().param_count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Failure (cart-pole) or goal (acrobot) condition fired.
    Condition,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeResult {
    pub episode_return: f64,
    pub steps: usize,
    pub terminated_by: Termination,
}

/// Run the deterministic policy for one episode from a randomized initial
/// state and return the total reward.
pub fn rollout<R: Rng + ?Sized>(
    spec: &EnvSpec,
    params: &[f64],
    episode_rng: &mut R,
) -> Result<EpisodeResult> {
    let policy = spec.policy_spec();
    match spec.id {
        EnvId::CartPole | EnvId::ContinuousCartPole | EnvId::ContinuousCartPoleHard => {
            let mut state = CartPoleState {
                x: episode_rng.random_range(-0.05..0.05),
                x_dot: episode_rng.random_range(-0.05..0.05),
                theta: episode_rng.random_range(-0.05..0.05),
                theta_dot: episode_rng.random_range(-0.05..0.05),
            };
            let mut total = 0.0;
            let mut steps = 0;
            let mut terminated_by = Termination::Timeout;
            while steps < spec.max_steps {
                let command = match policy.forward(params, &state.observation())? {
                    Action::Discrete(0) => -1.0,
                    Action::Discrete(_) => 1.0,
                    Action::Continuous(a) => a.clamp(-1.0, 1.0),
                };
                let (next, reward, failed) = cartpole_step(state, command, spec);
                total += reward;
                steps += 1;
                state = next;
                if failed {
                    terminated_by = Termination::Condition;
                    break;
                }
            }
            Ok(EpisodeResult { episode_return: total, steps, terminated_by })
        }
        EnvId::Acrobot => {
            let mut state = AcrobotState {
                theta1: episode_rng.random_range(-0.1..0.1),
                theta2: episode_rng.random_range(-0.1..0.1),
                theta1_dot: episode_rng.random_range(-0.1..0.1),
                theta2_dot: episode_rng.random_range(-0.1..0.1),
            };
            let mut total = 0.0;
            let mut steps = 0;
            let mut terminated_by = Termination::Timeout;
            while steps < spec.max_steps {
                let torque = match policy.forward(params, &state.observation())? {
                    Action::Discrete(0) => -1.0,
                    Action::Discrete(1) => 0.0,
                    Action::Discrete(_) => 1.0,
                    Action::Continuous(a) => a.clamp(-1.0, 1.0),
                };
                let (next, reward, goal) = acrobot_step(state, torque, spec);
                total += reward;
                steps += 1;
                state = next;
                if goal {
                    terminated_by = Termination::Condition;
                    break;
                }
            }
            Ok(EpisodeResult { episode_return: total, steps, terminated_by })
        }
    }
}
