//! Planar point-mass chain with spring-damper links, force actuators along
//! actuated links, penalty ground contact and Coulomb friction. Integrated
//! with semi-implicit Euler.

use crate::error::{Error, Result};

use super::CrawlerParams;

pub type Vec2 = [f64; 2];

/// A spring-damper between two masses; actuated links also carry a force
/// actuator along their axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub rest_length: f64,
    pub actuated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Body {
    pub n_masses: usize,
    pub links: Vec<Link>,
}

impl Body {
    pub fn n_actuators(&self) -> usize {
        self.links.iter().filter(|l| l.actuated).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
    pub step: usize,
    pub contact: Vec<bool>,
}

impl SimState {
    pub fn at_rest(positions: Vec<Vec2>) -> Self {
        let n = positions.len();
        let contact = positions.iter().map(|p| p[1] < 0.0).collect();
        SimState {
            positions,
            velocities: vec![[0.0; 2]; n],
            step: 0,
            contact,
        }
    }

    pub fn center_of_mass(&self) -> Vec2 {
        let n = self.positions.len() as f64;
        let (sx, sy) = self
            .positions
            .iter()
            .fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
        [sx / n, sy / n]
    }
}

/// Per-mass force accumulators. `actuator` holds the actuator share of
/// `total`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forces {
    pub total: Vec<Vec2>,
    pub actuator: Vec<Vec2>,
}

fn link_axis(state: &SimState, link: &Link) -> Option<(Vec2, f64)> {
    let pa = state.positions[link.a];
    let pb = state.positions[link.b];
    let d = [pb[0] - pa[0], pb[1] - pa[1]];
    let len = d[0].hypot(d[1]);
    (len > 1e-12).then(|| ([d[0] / len, d[1] / len], len))
}

pub fn compute_forces(body: &Body, state: &SimState, actions: &[f64], alpha: f64, params: &CrawlerParams) -> Forces {
    let n = body.n_masses;
    let mut total = vec![[0.0, -params.mass * params.gravity]; n];
    let mut actuator = vec![[0.0; 2]; n];

    let mut actions = actions.iter();
    for link in &body.links {
        let command = if link.actuated { actions.next().copied() } else { None };
        let Some((u, len)) = link_axis(state, link) else {
            continue;
        };
        let va = state.velocities[link.a];
        let vb = state.velocities[link.b];
        let stretch_rate = (vb[0] - va[0]) * u[0] + (vb[1] - va[1]) * u[1];
        // Positive tension pulls the endpoints together.
        let tension = params.spring_k * (len - link.rest_length) + params.spring_c * stretch_rate;
        for i in 0..2 {
            total[link.a][i] += tension * u[i];
            total[link.b][i] -= tension * u[i];
        }
        if let Some(a) = command {
            // Positive command pushes the endpoints apart.
            let push = alpha * params.gear * a;
            for i in 0..2 {
                actuator[link.a][i] -= push * u[i];
                actuator[link.b][i] += push * u[i];
            }
        }
    }
    for (t, a) in total.iter_mut().zip(&actuator) {
        t[0] += a[0];
        t[1] += a[1];
    }

    for (i, f) in total.iter_mut().enumerate() {
        let [_, y] = state.positions[i];
        if y >= 0.0 {
            continue;
        }
        let [vx, vy] = state.velocities[i];
        let normal = (-params.ground_k * y - params.ground_c * vy).max(0.0);
        f[1] += normal;
        // Static friction cancels horizontal slip within one step when it
        // can; otherwise kinetic friction saturates at mu·N.
        let limit = params.friction * normal;
        let stop = -(params.mass * vx / params.dt + f[0]);
        f[0] += stop.clamp(-limit, limit);
    }
    Forces { total, actuator }
}

/// One semi-implicit Euler step: `v ← v + (F/m)·dt`, then `p ← p + v·dt`.
pub fn sim_step(body: &Body, state: &SimState, actions: &[f64], alpha: f64, params: &CrawlerParams) -> Result<(SimState, Forces)> {
    if actions.len() != body.n_actuators() {
        return Err(Error::DimensionMismatch {
            expected: body.n_actuators(),
            actual: actions.len(),
        });
    }
    if let Some(a) = actions.iter().find(|a| !(a.abs() <= 1.0)) {
        return Err(Error::invalid(format!("action {a} outside [-1, 1]")));
    }
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let forces = compute_forces(body, state, actions, alpha, params);
    let dt = params.dt;
    let mut next = state.clone();
    for i in 0..body.n_masses {
        for k in 0..2 {
            next.velocities[i][k] += forces.total[i][k] / params.mass * dt;
            next.positions[i][k] += next.velocities[i][k] * dt;
        }
        next.contact[i] = next.positions[i][1] < 0.0;
    }
    next.step += 1;
    let finite = next
        .positions
        .iter()
        .chain(&next.velocities)
        .all(|v| v[0].is_finite() && v[1].is_finite());
    if !finite {
        return Err(Error::SimulationDiverged {
            step: next.step,
            detail: "non-finite position or velocity".into(),
        });
    }
    Ok((next, forces))
}

/// Kinetic + gravitational + link-spring + contact-spring energy, using
/// the supplied velocities (which may differ from `state.velocities`, e.g.
/// time-centred velocities).
pub fn mechanical_energy(body: &Body, state: &SimState, velocities: &[Vec2], params: &CrawlerParams) -> f64 {
    let mut e = 0.0;
    for (p, v) in state.positions.iter().zip(velocities) {
        e += 0.5 * params.mass * (v[0] * v[0] + v[1] * v[1]);
        e += params.mass * params.gravity * p[1];
        if p[1] < 0.0 {
            e += 0.5 * params.ground_k * p[1] * p[1];
        }
    }
    for link in &body.links {
        if let Some((_, len)) = link_axis(state, link) {
            let s = len - link.rest_length;
            e += 0.5 * params.spring_k * s * s;
        }
    }
    e
}
