//! Classic cart-pole with explicit Euler integration. The discrete actions
//! are signs multiplying the force magnitude; the continuous variant scales
//! it by a value clamped to [-1, 1].

use super::EnvSpec;

/// (x, x_dot, theta, theta_dot)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

impl CartPoleState {
    pub fn observation(&self) -> Vec<f64> {
        vec![self.x, self.x_dot, self.theta, self.theta_dot]
    }
}

/// One Euler step under a signed force command in [-1, 1].
/// Returns (next state, reward, done-by-failure).
pub fn cartpole_step(
    state: CartPoleState,
    force_command: f64,
    spec: &EnvSpec,
) -> (CartPoleState, f64, bool) {
    let force = force_command * spec.force_magnitude;
    let cos_theta = state.theta.cos();
    let sin_theta = state.theta.sin();
    let total_mass = spec.cart_mass + spec.pole_mass;
    let polemass_length = spec.pole_mass * spec.pole_half_length;

    let temp =
        (force + polemass_length * state.theta_dot * state.theta_dot * sin_theta) / total_mass;
    let theta_acc = (spec.gravity * sin_theta - cos_theta * temp)
        / (spec.pole_half_length
            * (4.0 / 3.0 - spec.pole_mass * cos_theta * cos_theta / total_mass));
    let x_acc = temp - polemass_length * theta_acc * cos_theta / total_mass;

    let next = CartPoleState {
        x: state.x + spec.timestep * state.x_dot,
        x_dot: state.x_dot + spec.timestep * x_acc,
        theta: state.theta + spec.timestep * state.theta_dot,
        theta_dot: state.theta_dot + spec.timestep * theta_acc,
    };
    let failed = next.x.abs() > spec.position_threshold || next.theta.abs() > spec.angle_threshold;
    (next, 1.0, failed)
}
