//! Seeded random states, ensembles and channels for sweeps and tests.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::channel::KrausChannel;
use crate::cqstate::CqEnsemble;
use crate::error::{Error, Result};
use crate::qmat::{check_dim, DensityOperator, Matrix, C64};

/// Deterministic sampler over a ChaCha8 stream.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard complex Gaussian (Box-Muller).
    pub fn complex_gaussian(&mut self) -> C64 {
        let u = 1.0 - self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u));
        let t = 2.0 * PI * self.uniform();
        C64::new(r * libm::cos(t), r * libm::sin(t)) * core::f64::consts::FRAC_1_SQRT_2
    }

    fn ginibre(&mut self, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }

    /// Full-rank random state `G G† / Tr(G G†)` with square Ginibre `G`.
    pub fn state(&mut self, d: usize) -> Result<DensityOperator> {
        check_dim(d)?;
        let g = self.ginibre(d, d);
        let m = g.mul_adjoint(&g);
        let tr = m.trace().re;
        DensityOperator::from_matrix(m.scale(1.0 / tr))
    }

    /// Haar-random pure state.
    pub fn pure_state(&mut self, d: usize) -> Result<DensityOperator> {
        check_dim(d)?;
        let v: Vec<C64> = (0..d).map(|_| self.complex_gaussian()).collect();
        crate::qmat::pure_state(&v)
    }

    /// Random ensemble of `members` states with Dirichlet(1) weights. Each
    /// member is pure or mixed with equal odds.
    pub fn ensemble(&mut self, d: usize, members: usize) -> Result<CqEnsemble> {
        if members == 0 {
            return Err(Error::invalid("ensemble needs at least one member"));
        }
        let raw: Vec<f64> = (0..members).map(|_| -libm::log(1.0 - self.uniform())).collect();
        let total: f64 = raw.iter().sum();
        let mut entries = Vec::with_capacity(members);
        for w in raw {
            let rho = if self.uniform() < 0.5 {
                self.pure_state(d)?
            } else {
                self.state(d)?
            };
            entries.push((w / total, rho));
        }
        CqEnsemble::new(entries)
    }

    /// Random channel with `kraus_count` Kraus operators, read off a random
    /// isometry `in -> out ⊗ env` (Gram-Schmidt on Gaussian columns).
    pub fn channel(&mut self, in_dim: usize, out_dim: usize, kraus_count: usize) -> Result<KrausChannel> {
        let rows = out_dim * kraus_count;
        check_dim(rows)?;
        if in_dim == 0 || in_dim > rows {
            return Err(Error::invalid(alloc::format!(
                "no isometry from dimension {in_dim} into {out_dim} x {kraus_count}"
            )));
        }
        let g = self.ginibre(rows, in_dim);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(in_dim);
        for j in 0..in_dim {
            let mut v: Vec<C64> = (0..rows).map(|r| g[(r, j)]).collect();
            // Two passes keep the columns orthogonal to working precision.
            for _ in 0..2 {
                for u in &cols {
                    let overlap: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (x, y) in v.iter_mut().zip(u) {
                        *x -= overlap * y;
                    }
                }
            }
            let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
            if norm < 1e-8 {
                return Err(Error::invalid("degenerate random isometry"));
            }
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
        let v = Matrix::from_fn(rows, in_dim, |r, j| cols[j][r]);
        KrausChannel::from_isometry(&v, out_dim, kraus_count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channels_are_complete() {
        let mut s = Sampler::new(1);
        for (i, o, k) in [(2, 2, 2), (2, 3, 1), (3, 2, 4)] {
            let ch = s.channel(i, o, k).unwrap();
            assert!(ch.completeness_deviation() < 1e-12);
            assert_eq!(ch.env_dim(), k);
        }
        assert!(s.channel(3, 1, 2).is_err());
    }

    #[test]
    fn same_seed_same_ensemble() {
        let a = Sampler::new(9).ensemble(2, 3).unwrap();
        let b = Sampler::new(9).ensemble(2, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
    }
}
