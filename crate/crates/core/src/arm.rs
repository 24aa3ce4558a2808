//! Planar arm whose joint range scales with `alpha`. Descriptor is the
//! normalised end-effector position; fitness is the negative variance of
//! the joint angles.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::task::Task;

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledArmParams {
    pub n_joints: usize,
    /// Joint range at `alpha = 1`, radians.
    pub joint_limit: f64,
}

impl Default for ScaledArmParams {
    fn default() -> Self {
        ScaledArmParams {
            n_joints: 8,
            joint_limit: FRAC_PI_2,
        }
    }
}

impl ScaledArmParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_joints < 2 {
            return Err(Error::invalid(format!("arm needs at least 2 joints, got {}", self.n_joints)));
        }
        if !(self.joint_limit > 0.0 && self.joint_limit.is_finite()) {
            return Err(Error::invalid("joint_limit must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ScaledArm {
    params: ScaledArmParams,
}

impl ScaledArm {
    pub fn new(params: ScaledArmParams) -> Result<Self> {
        params.validate()?;
        Ok(ScaledArm { params })
    }

    /// `θ_i = alpha · (joint_limit · tanh(g_i))`.
    pub fn joint_angles(&self, genome: &[f64], alpha: f64) -> Vec<f64> {
        genome
            .iter()
            .map(|g| alpha * (self.params.joint_limit * g.tanh()))
            .collect()
    }

    /// End-effector position for unit total arm length.
    pub fn end_effector(angles: &[f64]) -> (f64, f64) {
        let link = 1.0 / angles.len() as f64;
        let mut phi = 0.0;
        let (mut x, mut y) = (0.0, 0.0);
        for theta in angles {
            phi += theta;
            x += link * phi.cos();
            y += link * phi.sin();
        }
        (x, y)
    }
}

/// Population variance as `Σ_{i<j} (x_i − x_j)² / n²`; exactly zero iff
/// all entries are equal.
fn population_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mut acc = 0.0;
    for (i, a) in v.iter().enumerate() {
        for b in &v[i + 1..] {
            acc += (a - b) * (a - b);
        }
    }
    acc / (n * n)
}

impl Task for ScaledArm {
    fn genome_len(&self) -> usize {
        self.params.n_joints
    }

    fn descriptor_dim(&self) -> usize {
        2
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn evaluate(&self, genome: &[f64], alpha: f64) -> (f64, Vec<f64>) {
        let angles = self.joint_angles(genome, alpha);
        let (x, y) = Self::end_effector(&angles);
        let descriptor = vec![((x + 1.0) / 2.0).clamp(0.0, 1.0), ((y + 1.0) / 2.0).clamp(0.0, 1.0)];
        (-population_variance(&angles), descriptor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn arm(n: usize) -> ScaledArm {
        ScaledArm::new(ScaledArmParams { n_joints: n, ..Default::default() }).unwrap()
    }

    /// Independent forward kinematics: accumulate link vectors by rotating
    /// a running frame with a 2x2 rotation matrix.
    fn fk_by_rotation(angles: &[f64]) -> (f64, f64) {
        let l = 1.0 / angles.len() as f64;
        let (mut c, mut s) = (1.0f64, 0.0f64);
        let (mut x, mut y) = (0.0, 0.0);
        for t in angles {
            let (ct, st) = (t.cos(), t.sin());
            (c, s) = (c * ct - s * st, s * ct + c * st);
            x += l * c;
            y += l * s;
        }
        (x, y)
    }

    #[test]
    fn zero_genome_is_stretched_along_x() {
        let (f, d) = arm(8).evaluate(&[0.0; 8], 1.3);
        assert_eq!(f, 0.0);
        assert!((d[0] - 1.0).abs() < 1e-15 && d[1] == 0.5);
    }

    #[test]
    fn two_joint_hand_computed_case() {
        let g1 = 0.5f64.atanh();
        let a = arm(2);
        let angles = a.joint_angles(&[g1, 0.0], 1.0);
        assert!((angles[0] - FRAC_PI_4).abs() < 1e-15);
        let (f, d) = a.evaluate(&[g1, 0.0], 1.0);
        let r = 2f64.sqrt() / 2.0;
        let expected = (r + 1.0) / 2.0;
        assert!((d[0] - expected).abs() < 1e-12 && (d[1] - expected).abs() < 1e-12);
        assert!((expected - 0.8536).abs() < 1e-4);
        assert!((f + FRAC_PI_4 * FRAC_PI_4 / 4.0).abs() < 1e-15);
        let (x, y) = fk_by_rotation(&angles);
        assert!((x - r).abs() < 1e-12 && (y - r).abs() < 1e-12);
    }

    #[test]
    fn alpha_scales_angles_exactly() {
        let a = arm(8);
        let g = [0.3, -1.2, 2.0, 0.0, 0.7, -0.1, 5.0, -3.0];
        let base = a.joint_angles(&g, 1.0);
        let strong = a.joint_angles(&g, 1.5);
        for (s, b) in strong.iter().zip(&base) {
            assert_eq!(*s, 1.5 * b);
        }
    }

    proptest! {
        #[test]
        fn arm_invariants(g in prop::collection::vec(-5.0f64..5.0, 8), alpha in 0.4f64..1.6) {
            let a = arm(8);
            let angles = a.joint_angles(&g, alpha);
            let (x, y) = ScaledArm::end_effector(&angles);
            prop_assert!(x * x + y * y <= 1.0 + 1e-12);
            let (ox, oy) = fk_by_rotation(&angles);
            prop_assert!((x - ox).abs() < 1e-9 && (y - oy).abs() < 1e-9);
            let (f, d) = a.evaluate(&g, alpha);
            prop_assert!(f <= 0.0);
            prop_assert!(d.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert_eq!(a.evaluate(&g, alpha), (f, d));
        }

        #[test]
        fn zero_fitness_iff_equal_angles(v in -3.0f64..3.0) {
            let (f, _) = arm(8).evaluate(&[v; 8], 1.0);
            prop_assert_eq!(f, 0.0);
        }
    }
}
