//! Seeded synthetic sparse-recovery instances.

use anyhow::{bail, Result};
use mmgmc::nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Shape and noise model of a generated instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    /// Number of nonzeros in the ground-truth vector.
    pub sparsity: usize,
    pub noise_sigma: f64,
    pub matrix_kind: MatrixKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    /// I.i.d. standard normal entries scaled by `1/sqrt(m)`.
    Gaussian,
    /// Rows forming a tight frame with `AᵀA = c I` (requires `m >= n`).
    TightFrame { c: f64 },
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            bail!("synthetic spec requires m >= 1 and n >= 1");
        }
        if self.sparsity > self.n {
            bail!(
                "synthetic spec: sparsity {} exceeds dimension {}",
                self.sparsity,
                self.n
            );
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            bail!("synthetic spec: noise_sigma must be nonnegative");
        }
        if let MatrixKind::TightFrame { c } = self.matrix_kind {
            if !(c > 0.0 && c.is_finite()) {
                bail!("synthetic spec: tight_frame constant must be positive");
            }
            if self.m < self.n {
                bail!(
                    "synthetic spec: tight_frame requires m >= n (got {} < {})",
                    self.m,
                    self.n
                );
            }
        }
        Ok(())
    }
}

/// Generated instance data: the design matrix, observations and ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub x_true: DVector<f64>,
}

/// Deterministically generates an instance from `(spec, seed)`.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<SyntheticInstance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (spec.m, spec.n);

    let matrix = match spec.matrix_kind {
        MatrixKind::Gaussian => {
            let scale = 1.0 / (m as f64).sqrt();
            DMatrix::from_fn(m, n, |_, _| {
                let g: f64 = StandardNormal.sample(&mut rng);
                g * scale
            })
        }
        MatrixKind::TightFrame { c } => {
            // QR of a generic Gaussian matrix yields orthonormal columns;
            // scaling by sqrt(c) gives AᵀA = c I.
            let g = DMatrix::from_fn(m, n, |_, _| StandardNormal.sample(&mut rng));
            let q = g.qr().q();
            q * c.sqrt()
        }
    };

    let mut x_true = DVector::zeros(n);
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    for &i in indices.iter().take(spec.sparsity) {
        let magnitude = rng.random_range(1.0..2.0);
        let sign = if rng.random_range(0..2) == 0 {
            1.0
        } else {
            -1.0
        };
        x_true[i] = sign * magnitude;
    }

    let noise = DVector::from_fn(m, |_, _| {
        let g: f64 = StandardNormal.sample(&mut rng);
        g * spec.noise_sigma
    });
    let rhs = &matrix * &x_true + noise;

    Ok(SyntheticInstance {
        matrix,
        rhs,
        x_true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mmgmc::linalg::gram_eigen_extremes;

    fn spec(kind: MatrixKind) -> SyntheticSpec {
        SyntheticSpec {
            m: 8,
            n: 5,
            sparsity: 2,
            noise_sigma: 0.01,
            matrix_kind: kind,
        }
    }

    #[test]
    fn tight_frame_has_flat_gram_spectrum() {
        for c in [1.0, 2.5] {
            let inst = generate_synthetic(&spec(MatrixKind::TightFrame { c }), 7).unwrap();
            let (lo, hi) = gram_eigen_extremes(&inst.matrix).unwrap();
            assert!((lo - c).abs() < 1e-10, "lo {lo}");
            assert!((hi - c).abs() < 1e-10, "hi {hi}");
        }
    }

    #[test]
    fn no_noise_no_support_gives_zero_rhs() {
        let mut s = spec(MatrixKind::Gaussian);
        s.sparsity = 0;
        s.noise_sigma = 0.0;
        let inst = generate_synthetic(&s, 3).unwrap();
        assert_eq!(inst.rhs.norm(), 0.0);
        assert_eq!(inst.x_true.norm(), 0.0);
    }

    #[test]
    fn same_seed_reproduces_the_instance() {
        let s = spec(MatrixKind::Gaussian);
        let a = generate_synthetic(&s, 42).unwrap();
        let b = generate_synthetic(&s, 42).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.rhs, b.rhs);
        assert_eq!(a.x_true, b.x_true);
        let c = generate_synthetic(&s, 43).unwrap();
        assert_ne!(a.rhs, c.rhs);
    }

    #[test]
    fn sparsity_count_matches() {
        let mut s = spec(MatrixKind::Gaussian);
        s.sparsity = 3;
        let inst = generate_synthetic(&s, 5).unwrap();
        let nonzeros = inst.x_true.iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzeros, 3);
        for &v in inst.x_true.iter() {
            if v != 0.0 {
                assert!((1.0..2.0).contains(&v.abs()));
            }
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut s = spec(MatrixKind::Gaussian);
        s.sparsity = 9;
        assert!(generate_synthetic(&s, 1).is_err());

        let mut s = spec(MatrixKind::TightFrame { c: 1.0 });
        s.m = 3; // fewer rows than columns
        assert!(generate_synthetic(&s, 1).is_err());

        let s = spec(MatrixKind::TightFrame { c: -1.0 });
        assert!(generate_synthetic(&s, 1).is_err());
    }
}
