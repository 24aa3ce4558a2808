//! Desk-scale planar locomotion task.
//!
//! The body is a chain of point masses. Consecutive masses are joined by
//! actuated spring-damper links; optional passive braces join masses two
//! apart. The chain starts as an arch (end masses on the ground, interior
//! masses raised by `arch_height`) so that forces along the links have a
//! vertical component. A tanh MLP maps COM-relative positions,
//! velocities and contact flags to actuator commands.
//!
//! Fitness is mean forward COM velocity; the descriptor is the duty factor
//! of the first and the last mass.

mod mlp;
pub mod sim;

use std::io::Write;
use std::path::Path;

pub use mlp::MlpShape;
pub use sim::{compute_forces, mechanical_energy, sim_step, Body, Forces, Link, SimState, Vec2};

use crate::error::{Error, Result};
use crate::task::Task;

#[derive(Debug, Clone, PartialEq)]
pub struct CrawlerParams {
    pub n_masses: usize,
    /// kg per mass.
    pub mass: f64,
    /// m, rest length of each chain link.
    pub rest_length: f64,
    /// N/m
    pub spring_k: f64,
    /// N·s/m
    pub spring_c: f64,
    /// N per unit command, per link.
    pub gear: f64,
    pub gravity: f64,
    pub ground_k: f64,
    pub ground_c: f64,
    pub friction: f64,
    pub dt: f64,
    pub episode_steps: usize,
    pub hidden: Vec<usize>,
    /// m, initial height of the interior masses above the end masses.
    pub arch_height: f64,
    pub braces: bool,
}

impl Default for CrawlerParams {
    fn default() -> Self {
        CrawlerParams {
            n_masses: 4,
            mass: 1.0,
            rest_length: 0.5,
            spring_k: 200.0,
            spring_c: 2.0,
            gear: 30.0,
            gravity: 9.81,
            ground_k: 5000.0,
            ground_c: 50.0,
            friction: 0.8,
            dt: 0.01,
            episode_steps: 500,
            hidden: vec![16, 16],
            arch_height: 0.45,
            braces: true,
        }
    }
}

impl CrawlerParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_masses < 2 {
            return Err(Error::invalid("crawler needs at least 2 masses"));
        }
        let positive = [
            ("mass", self.mass),
            ("rest_length", self.rest_length),
            ("spring_k", self.spring_k),
            ("spring_c", self.spring_c),
            ("gear", self.gear),
            ("gravity", self.gravity),
            ("ground_k", self.ground_k),
            ("ground_c", self.ground_c),
            ("friction", self.friction),
            ("dt", self.dt),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("crawler {name} must be positive, got {v}")));
            }
        }
        if self.episode_steps == 0 {
            return Err(Error::invalid("crawler episode_steps must be positive"));
        }
        if self.dt * (self.ground_k / self.mass).sqrt() >= 2.0 {
            return Err(Error::invalid(format!(
                "dt·sqrt(ground_k/mass) = {} violates the integrator stability bound (< 2)",
                self.dt * (self.ground_k / self.mass).sqrt()
            )));
        }
        if !(0.0..self.rest_length).contains(&self.arch_height) {
            return Err(Error::invalid("arch_height must lie in [0, rest_length)"));
        }
        if self.hidden.contains(&0) {
            return Err(Error::invalid("hidden layer widths must be positive"));
        }
        Ok(())
    }

    pub fn observation_len(&self) -> usize {
        5 * self.n_masses
    }
}

/// Rollout result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RolloutOutcome {
    /// Mean forward COM velocity, m/s.
    pub fitness: f64,
    /// Fraction of steps the first and the last mass spent in contact.
    pub duty_factors: [f64; 2],
}

/// Per-step view handed to rollout observers.
pub struct StepTrace<'a> {
    pub state: &'a SimState,
    pub actions: &'a [f64],
    pub forces: &'a Forces,
}

#[derive(Debug, Clone)]
pub struct Crawler {
    params: CrawlerParams,
    body: Body,
    rest_positions: Vec<Vec2>,
    controller: MlpShape,
}

impl Crawler {
    pub fn new(params: CrawlerParams) -> Result<Self> {
        params.validate()?;
        let n = params.n_masses;
        let l0 = params.rest_length;
        let h = if n >= 3 { params.arch_height } else { 0.0 };
        let run = (l0 * l0 - h * h).sqrt();
        // Feet share the body weight.
        let feet = 2.0;
        let sink = -(n as f64 * params.mass * params.gravity / feet) / params.ground_k;
        let mut positions = Vec::with_capacity(n);
        let mut x = 0.0;
        for i in 0..n {
            if i > 0 {
                x += if i == 1 || i == n - 1 { run } else { l0 };
            }
            let y = if i == 0 || i == n - 1 { 0.0 } else { h };
            positions.push([x, y + sink]);
        }
        let mut links: Vec<Link> = (0..n - 1)
            .map(|i| Link {
                a: i,
                b: i + 1,
                rest_length: l0,
                actuated: true,
            })
            .collect();
        if params.braces {
            for i in 0..n.saturating_sub(2) {
                let (p, q) = (positions[i], positions[i + 2]);
                links.push(Link {
                    a: i,
                    b: i + 2,
                    rest_length: (q[0] - p[0]).hypot(q[1] - p[1]),
                    actuated: false,
                });
            }
        }
        let body = Body { n_masses: n, links };
        let mut layers = vec![params.observation_len()];
        layers.extend(&params.hidden);
        layers.push(body.n_actuators());
        let controller = MlpShape::new(layers)?;
        Ok(Crawler {
            params,
            body,
            rest_positions: positions,
            controller,
        })
    }

    pub fn params(&self) -> &CrawlerParams {
        &self.params
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn controller(&self) -> &MlpShape {
        &self.controller
    }

    pub fn initial_state(&self) -> SimState {
        SimState::at_rest(self.rest_positions.clone())
    }

    /// COM-relative positions, velocities, then contact flags (1 or 0).
    pub fn observe(&self, state: &SimState) -> Vec<f64> {
        let com = state.center_of_mass();
        let mut obs = Vec::with_capacity(self.params.observation_len());
        obs.extend(state.positions.iter().flat_map(|p| [p[0] - com[0], p[1] - com[1]]));
        obs.extend(state.velocities.iter().flatten());
        obs.extend(state.contact.iter().map(|&c| if c { 1.0 } else { 0.0 }));
        obs
    }

    pub fn step(&self, state: &SimState, actions: &[f64], alpha: f64) -> Result<(SimState, Forces)> {
        sim_step(&self.body, state, actions, alpha, &self.params)
    }

    pub fn rollout(&self, genome: &[f64], alpha: f64) -> Result<RolloutOutcome> {
        self.rollout_from(self.initial_state(), genome, alpha, |_| {})
    }

    /// Runs an episode from `start`, calling `observer` after every step.
    pub fn rollout_from(
        &self,
        start: SimState,
        genome: &[f64],
        alpha: f64,
        mut observer: impl FnMut(&StepTrace<'_>),
    ) -> Result<RolloutOutcome> {
        let steps = self.params.episode_steps;
        let last = self.params.n_masses - 1;
        let x0 = start.center_of_mass()[0];
        let mut state = start;
        let mut contact_steps = [0usize; 2];
        for _ in 0..steps {
            let actions = self.controller.forward(genome, &self.observe(&state))?;
            let (next, forces) = self.step(&state, &actions, alpha)?;
            state = next;
            contact_steps[0] += state.contact[0] as usize;
            contact_steps[1] += state.contact[last] as usize;
            observer(&StepTrace {
                state: &state,
                actions: &actions,
                forces: &forces,
            });
        }
        let duration = steps as f64 * self.params.dt;
        Ok(RolloutOutcome {
            fitness: (state.center_of_mass()[0] - x0) / duration,
            duty_factors: contact_steps.map(|c| c as f64 / steps as f64),
        })
    }

    /// Writes the initial state and then one row per step:
    /// `step, x_i, y_i, contact_i` for every mass.
    pub fn write_trajectory(&self, path: &Path, genome: &[f64], alpha: f64) -> Result<RolloutOutcome> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let mut header = vec!["step".to_string()];
        for i in 0..self.params.n_masses {
            header.extend([format!("x{i}"), format!("y{i}"), format!("contact{i}")]);
        }
        let mut lines = vec![header.join(",")];
        let start = self.initial_state();
        let row = |s: &SimState| {
            let mut r = vec![s.step.to_string()];
            for (p, c) in s.positions.iter().zip(&s.contact) {
                r.extend([p[0].to_string(), p[1].to_string(), (*c as u8).to_string()]);
            }
            r.join(",")
        };
        lines.push(row(&start));
        let outcome = self.rollout_from(start, genome, alpha, |t| lines.push(row(t.state)))?;
        for l in lines {
            writeln!(out, "{l}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))?;
        Ok(outcome)
    }
}

impl Task for Crawler {
    fn genome_len(&self) -> usize {
        self.controller.param_count()
    }

    fn descriptor_dim(&self) -> usize {
        2
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn evaluate(&self, genome: &[f64], alpha: f64) -> (f64, Vec<f64>) {
        match self.rollout(genome, alpha) {
            Ok(o) => (o.fitness, o.duty_factors.to_vec()),
            Err(_) => (f64::NEG_INFINITY, vec![0.0, 0.0]),
        }
    }
}
