//! Seedable sampling of test points.
//!
//! All randomness flows through [`Sampler`], a ChaCha8 stream seeded with
//! `ChaCha8Rng::seed_from_u64`. Entries are drawn uniformly from `[-1, 1)` for
//! the real and imaginary parts (real first), so the same seed reproduces the
//! same points on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg;
use crate::polarized::{BlockOperator, Dims, ExtendedPoint};
use crate::{CMatrix, C64};

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn seeded(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random_range(-1.0..1.0)
    }

    pub fn real(&mut self, scale: f64) -> f64 {
        scale * self.uniform()
    }

    pub fn complex(&mut self, scale: f64) -> C64 {
        let re = self.uniform();
        let im = self.uniform();
        C64::new(re, im) * scale
    }

    pub fn imaginary(&mut self, scale: f64) -> C64 {
        C64::new(0.0, scale * self.uniform())
    }

    pub fn cmatrix(&mut self, rows: usize, cols: usize, scale: f64) -> CMatrix {
        let mut m = CMatrix::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = self.complex(scale);
            }
        }
        m
    }

    pub fn block_operator(&mut self, dims: Dims, scale: f64) -> BlockOperator {
        let n = dims.total();
        BlockOperator::from_matrix(dims, self.cmatrix(n, n, scale)).expect("sampled matrix has the right shape")
    }

    pub fn hermitian(&mut self, n: usize, scale: f64) -> CMatrix {
        let a = self.cmatrix(n, n, scale);
        (&a + a.adjoint()) * C64::new(0.5, 0.0)
    }

    pub fn skew_hermitian(&mut self, dims: Dims, scale: f64) -> BlockOperator {
        let a = self.block_operator(dims, scale);
        (&a - &a.adjoint()).scale_re(0.5)
    }

    /// `exp(ε Z)` with `Z` uniform of unit scale.
    pub fn near_identity(&mut self, dims: Dims, eps: f64) -> BlockOperator {
        let z = self.cmatrix(dims.total(), dims.total(), eps);
        BlockOperator::from_matrix(dims, linalg::expm(&z).expect("finite exponential")).expect("shape")
    }

    pub fn near_identity_matrix(&mut self, n: usize, eps: f64) -> CMatrix {
        let z = self.cmatrix(n, n, eps);
        linalg::expm(&z).expect("finite exponential")
    }

    pub fn point(&mut self, dims: Dims, gamma_scale: f64, mu_scale: f64) -> ExtendedPoint {
        let gamma = self.complex(gamma_scale);
        ExtendedPoint::new(gamma, self.block_operator(dims, mu_scale))
    }

    /// A point of `iR ⊕ UL¹_res`.
    pub fn real_form_point(&mut self, dims: Dims, gamma_scale: f64, mu_scale: f64) -> ExtendedPoint {
        let gamma = self.imaginary(gamma_scale);
        ExtendedPoint::new(gamma, self.skew_hermitian(dims, mu_scale))
    }
}
