//! Two-link underactuated acrobot, integrated with RK4. Angles are measured
//! from the downward vertical; the episode ends once the tip of the second
//! link rises higher than one link length above the center joint,
//! i.e. -cos(theta1) - cos(theta1 + theta2) > 1.

use std::f64::consts::PI;

use super::EnvSpec;

/// (theta1, theta2, theta1_dot, theta2_dot)
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcrobotState {
    pub theta1: f64,
    pub theta2: f64,
    pub theta1_dot: f64,
    pub theta2_dot: f64,
}

impl AcrobotState {
    pub fn observation(&self) -> Vec<f64> {
        vec![
            self.theta1.cos(),
            self.theta1.sin(),
            self.theta2.cos(),
            self.theta2.sin(),
            self.theta1_dot,
            self.theta2_dot,
        ]
    }

    pub fn goal_reached(&self) -> bool {
        -self.theta1.cos() - (self.theta1 + self.theta2).cos() > 1.0
    }
}

const M1: f64 = 1.0;
const M2: f64 = 1.0;
const L1: f64 = 1.0;
const LC1: f64 = 0.5;
const LC2: f64 = 0.5;
const I1: f64 = 1.0;
const I2: f64 = 1.0;
const MAX_VEL_1: f64 = 4.0 * PI;
const MAX_VEL_2: f64 = 9.0 * PI;

fn dynamics(s: [f64; 4], torque: f64, gravity: f64) -> [f64; 4] {
    let [theta1, theta2, dtheta1, dtheta2] = s;
    let d1 = M1 * LC1 * LC1
        + M2 * (L1 * L1 + LC2 * LC2 + 2.0 * L1 * LC2 * theta2.cos())
        + I1
        + I2;
    let d2 = M2 * (LC2 * LC2 + L1 * LC2 * theta2.cos()) + I2;
    let phi2 = M2 * LC2 * gravity * (theta1 + theta2 - PI / 2.0).cos();
    let phi1 = -M2 * L1 * LC2 * dtheta2 * dtheta2 * theta2.sin()
        - 2.0 * M2 * L1 * LC2 * dtheta2 * dtheta1 * theta2.sin()
        + (M1 * LC1 + M2 * L1) * gravity * (theta1 - PI / 2.0).cos()
        + phi2;
    let ddtheta2 = (torque + d2 / d1 * phi1 - M2 * L1 * LC2 * dtheta1 * dtheta1 * theta2.sin()
        - phi2)
        / (M2 * LC2 * LC2 + I2 - d2 * d2 / d1);
    let ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
    [dtheta1, dtheta2, ddtheta1, ddtheta2]
}

/// One classic RK4 step of the free dynamics, no wrapping or clipping.
pub fn rk4_step(s: [f64; 4], torque: f64, gravity: f64, dt: f64) -> [f64; 4] {
    let k1 = dynamics(s, torque, gravity);
    let add = |a: [f64; 4], b: [f64; 4], h: f64| {
        [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2], a[3] + h * b[3]]
    };
    let k2 = dynamics(add(s, k1, dt / 2.0), torque, gravity);
    let k3 = dynamics(add(s, k2, dt / 2.0), torque, gravity);
    let k4 = dynamics(add(s, k3, dt), torque, gravity);
    [
        s[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        s[2] + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        s[3] + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    ]
}

fn wrap(x: f64) -> f64 {
    let mut x = (x + PI) % (2.0 * PI);
    if x < 0.0 {
        x += 2.0 * PI;
    }
    x - PI
}

/// Total mechanical energy of the unactuated system; used by the
/// conservation checks.
pub fn energy(s: [f64; 4], gravity: f64) -> f64 {
    let [theta1, theta2, dtheta1, dtheta2] = s;
    let d1 = M1 * LC1 * LC1
        + M2 * (L1 * L1 + LC2 * LC2 + 2.0 * L1 * LC2 * theta2.cos())
        + I1
        + I2;
    let d2 = M2 * (LC2 * LC2 + L1 * LC2 * theta2.cos()) + I2;
    let d22 = M2 * LC2 * LC2 + I2;
    let kinetic =
        0.5 * (d1 * dtheta1 * dtheta1 + 2.0 * d2 * dtheta1 * dtheta2 + d22 * dtheta2 * dtheta2);
    let potential = -gravity
        * ((M1 * LC1 + M2 * L1) * theta1.cos() + M2 * LC2 * (theta1 + theta2).cos());
    kinetic + potential
}

/// One environment step under a torque in {-1, 0, +1}.
/// Returns (next state, reward, done-by-goal).
pub fn acrobot_step(
    state: AcrobotState,
    torque: f64,
    spec: &EnvSpec,
) -> (AcrobotState, f64, bool) {
    let s = [state.theta1, state.theta2, state.theta1_dot, state.theta2_dot];
    let ns = rk4_step(s, torque, spec.gravity, spec.timestep);
    let next = AcrobotState {
        theta1: wrap(ns[0]),
        theta2: wrap(ns[1]),
        theta1_dot: ns[2].clamp(-MAX_VEL_1, MAX_VEL_1),
        theta2_dot: ns[3].clamp(-MAX_VEL_2, MAX_VEL_2),
    };
    (next, -1.0, next.goal_reached())
}
