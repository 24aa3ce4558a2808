//! Dense feedforward controller with tanh on every layer.
//!
//! Genome layout, layer by layer: the `out × in` weight matrix in row-major
//! order followed by the `out` biases.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpShape {
    layers: Vec<usize>,
}

impl MlpShape {
    /// `layers` lists every layer width, input first and output last.
    pub fn new(layers: Vec<usize>) -> Result<Self> {
        if layers.len() < 2 || layers.contains(&0) {
            return Err(Error::invalid(format!(
                "controller needs at least an input and an output layer of positive width, got {layers:?}"
            )));
        }
        Ok(MlpShape { layers })
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn inputs(&self) -> usize {
        self.layers[0]
    }

    pub fn outputs(&self) -> usize {
        *self.layers.last().expect("validated non-empty")
    }

    pub fn param_count(&self) -> usize {
        self.layers.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn forward(&self, genome: &[f64], observation: &[f64]) -> Result<Vec<f64>> {
        if genome.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                actual: genome.len(),
            });
        }
        if observation.len() != self.inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs(),
                actual: observation.len(),
            });
        }
        let mut activ = observation.to_vec();
        let mut offset = 0;
        for w in self.layers.windows(2) {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &genome[offset..offset + n_in * n_out];
            let biases = &genome[offset + n_in * n_out..offset + n_in * n_out + n_out];
            offset += n_in * n_out + n_out;
            activ = weights
                .chunks_exact(n_in)
                .zip(biases)
                .map(|(row, b)| (row.iter().zip(&activ).map(|(w, x)| w * x).sum::<f64>() + b).tanh())
                .collect();
        }
        Ok(activ)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_count() {
        let s = MlpShape::new(vec![20, 16, 16, 3]).unwrap();
        assert_eq!(s.param_count(), 20 * 16 + 16 + 16 * 16 + 16 + 16 * 3 + 3);
        assert!(MlpShape::new(vec![4]).is_err());
        assert!(MlpShape::new(vec![4, 0, 2]).is_err());
    }

    #[test]
    fn zero_genome_gives_zero_action() {
        let s = MlpShape::new(vec![5, 16, 16, 3]).unwrap();
        let out = s.forward(&vec![0.0; s.param_count()], &[1.0, -2.0, 3.0, 0.5, 9.0]).unwrap();
        assert_eq!(out, vec![0.0; 3]);
    }

    #[test]
    fn single_unit_is_tanh_of_weighted_input() {
        let s = MlpShape::new(vec![1, 1]).unwrap();
        assert_eq!(s.forward(&[0.7, 0.0], &[2.0]).unwrap(), vec![(0.7f64 * 2.0).tanh()]);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let s = MlpShape::new(vec![2, 3, 1]).unwrap();
        assert!(s.forward(&[0.0; 3], &[0.0; 2]).is_err());
        assert!(s.forward(&vec![0.0; s.param_count()], &[0.0; 3]).is_err());
    }

    #[test]
    fn outputs_bounded_by_one() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let s = MlpShape::new(vec![6, 16, 16, 4]).unwrap();
        for _ in 0..100 {
            let g: Vec<f64> = (0..s.param_count()).map(|_| rng.random_range(-3.0..3.0)).collect();
            let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            // tanh rounds to exactly ±1 once saturated.
            assert!(s.forward(&g, &x).unwrap().iter().all(|a| a.abs() <= 1.0));
            let small: Vec<f64> = g.iter().map(|w| w * 0.05).collect();
            assert!(s.forward(&small, &x).unwrap().iter().all(|a| a.abs() < 1.0));
        }
    }
}
