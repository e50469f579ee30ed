//! Quantum channels in Kraus form and their Stinespring dilations.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_probability, Error, Result};
use crate::qmat::{check_dim, pauli_z, tensor, DensityOperator, Matrix, C64};

const COMPLETENESS_TOL: f64 = 1e-10;

/// A CPTP map `rho -> sum_k A_k rho A_k^dag` with `out_dim x in_dim` Kraus
/// operators satisfying `sum_k A_k^dag A_k = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<Matrix>,
}

impl KrausChannel {
    pub fn new(in_dim: usize, out_dim: usize, kraus: Vec<Matrix>) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::invalid("channel dimensions must be positive"));
        }
        if kraus.is_empty() {
            return Err(Error::invalid("channel needs at least one Kraus operator"));
        }
        check_dim(in_dim)?;
        check_dim(out_dim)?;
        for a in &kraus {
            if a.rows() != out_dim || a.cols() != in_dim {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator shape (rows x cols)",
                    expected: out_dim * in_dim,
                    found: a.rows() * a.cols(),
                });
            }
        }
        let ch = KrausChannel { in_dim, out_dim, kraus };
        let deviation = ch.completeness_deviation();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::NotComplete { deviation });
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Result<Self> {
        KrausChannel::new(d, d, vec![Matrix::identity(d)])
    }

    /// Reads Kraus operators off an isometry `V: in -> out ⊗ env`, using
    /// `A_k[b, i] = V[b * env + k, i]`.
    pub fn from_isometry(v: &Matrix, out_dim: usize, env_dim: usize) -> Result<Self> {
        if v.rows() != out_dim * env_dim {
            return Err(Error::DimensionMismatch {
                context: "isometry rows = out_dim * env_dim",
                expected: out_dim * env_dim,
                found: v.rows(),
            });
        }
        let in_dim = v.cols();
        let kraus = (0..env_dim)
            .map(|k| Matrix::from_fn(out_dim, in_dim, |b, i| v[(b * env_dim + k, i)]))
            .collect();
        KrausChannel::new(in_dim, out_dim, kraus)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// Dimension of the canonical environment (one level per Kraus operator).
    pub fn env_dim(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[Matrix] {
        &self.kraus
    }

    /// `max |sum_k A_k^dag A_k - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let mut sum = Matrix::zeros(self.in_dim, self.in_dim);
        for a in &self.kraus {
            sum = &sum + &(&a.adjoint() * a);
        }
        sum.max_abs_diff(&Matrix::identity(self.in_dim))
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_input(rho.dim())?;
        Ok(DensityOperator::new_unchecked(
            self.apply_matrix(rho.matrix()),
            vec![self.out_dim],
        ))
    }

    /// Applies the channel to any `in_dim x in_dim` operator.
    pub fn apply_matrix(&self, rho: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.out_dim, self.out_dim);
        for a in &self.kraus {
            out = &out + &a.conjugate(rho);
        }
        out
    }

    /// Output of the complementary channel, `[k, l] = Tr(A_k rho A_l^dag)`.
    pub fn complementary_matrix(&self, rho: &Matrix) -> Matrix {
        let n = self.kraus.len();
        let products: Vec<Matrix> = self.kraus.iter().map(|a| a * rho).collect();
        Matrix::from_fn(n, n, |k, l| {
            let (m, a) = (&products[k], &self.kraus[l]);
            m.data().iter().zip(a.data()).map(|(x, y)| x * y.conj()).sum()
        })
    }

    pub fn apply_complementary(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_input(rho.dim())?;
        Ok(DensityOperator::new_unchecked(
            self.complementary_matrix(rho.matrix()),
            vec![self.env_dim()],
        ))
    }

    /// The map from the input to the environment of the canonical dilation.
    pub fn complementary(&self) -> KrausChannel {
        let env = self.env_dim();
        let kraus = (0..self.out_dim)
            .map(|b| Matrix::from_fn(env, self.in_dim, |k, i| self.kraus[k][(b, i)]))
            .collect();
        KrausChannel {
            in_dim: self.in_dim,
            out_dim: env,
            kraus,
        }
    }

    /// `V = sum_k A_k ⊗ |k>_E`, with the environment as the second factor.
    pub fn isometric_extension(&self) -> IsometricExtension {
        let env = self.env_dim();
        let isometry = Matrix::from_fn(self.out_dim * env, self.in_dim, |r, i| {
            self.kraus[r % env][(r / env, i)]
        });
        IsometricExtension {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            env_dim: env,
            isometry,
        }
    }

    fn check_input(&self, dim: usize) -> Result<()> {
        if dim != self.in_dim {
            return Err(Error::DimensionMismatch {
                context: "channel input",
                expected: self.in_dim,
                found: dim,
            });
        }
        Ok(())
    }
}

/// An isometry `V: A' -> B ⊗ E` dilating a channel.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometricExtension {
    pub in_dim: usize,
    pub out_dim: usize,
    pub env_dim: usize,
    pub isometry: Matrix,
}

impl IsometricExtension {
    /// `max |V^dag V - I|`.
    pub fn isometry_deviation(&self) -> f64 {
        (&self.isometry.adjoint() * &self.isometry).max_abs_diff(&Matrix::identity(self.in_dim))
    }

    /// `V rho V^dag`, labelled `[B, E]`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.in_dim {
            return Err(Error::DimensionMismatch {
                context: "isometry input",
                expected: self.in_dim,
                found: rho.dim(),
            });
        }
        Ok(DensityOperator::new_unchecked(
            self.isometry.conjugate(rho.matrix()),
            vec![self.out_dim, self.env_dim],
        ))
    }
}

/// Identity channel on a qubit mixed with its fully dephased version:
/// `(1 - p) rho + p diag(rho)`.
///
/// Kraus pair `{sqrt(1 - p/2) I, sqrt(p/2) Z}`.
pub fn dephasing(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    KrausChannel::new(
        2,
        2,
        vec![
            Matrix::identity(2).scale(libm::sqrt(1.0 - p / 2.0)),
            pauli_z().scale(libm::sqrt(p / 2.0)),
        ],
    )
}

/// Index of the erasure flag `|e>` in the qutrit output.
pub const ERASURE_FLAG: usize = 2;

/// `(1 - eps) rho + eps |e><e|` with the flag as the third output level.
///
/// Kraus set `{sqrt(1-eps) (|0><0| + |1><1|), sqrt(eps) |e><0|, sqrt(eps) |e><1|}`.
pub fn erasure(eps: f64) -> Result<KrausChannel> {
    check_probability("eps", eps)?;
    let keep = libm::sqrt(1.0 - eps);
    let lose = libm::sqrt(eps);
    let pass = Matrix::from_fn(3, 2, |b, i| {
        if b == i {
            C64::new(keep, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let flag = |i: usize| {
        Matrix::from_fn(3, 2, move |b, j| {
            if b == ERASURE_FLAG && j == i {
                C64::new(lose, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    KrausChannel::new(2, 3, vec![pass, flag(0), flag(1)])
}

/// `a ⊗ b` with Kraus operators `{A_i ⊗ B_j}`.
pub fn tensor_channel(a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
    check_dim(a.in_dim * b.in_dim)?;
    check_dim(a.out_dim * b.out_dim)?;
    check_dim(a.env_dim() * b.env_dim())?;
    let mut kraus = Vec::with_capacity(a.env_dim() * b.env_dim());
    for ka in &a.kraus {
        for kb in &b.kraus {
            kraus.push(tensor(ka, kb)?);
        }
    }
    Ok(KrausChannel {
        in_dim: a.in_dim * b.in_dim,
        out_dim: a.out_dim * b.out_dim,
        kraus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{binary_entropy, vn_entropy};
    use crate::qmat::{bloch_state, diagonal_state, maximally_mixed};

    fn plus() -> DensityOperator {
        bloch_state(1.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn identity_channel_is_trivial() {
        let id = KrausChannel::identity(2).unwrap();
        let rho = bloch_state(0.3, -0.4, 0.2).unwrap();
        assert_eq!(id.apply(&rho).unwrap().matrix(), rho.matrix());
        let ext = id.isometric_extension();
        assert_eq!(ext.env_dim, 1);
        assert_eq!(ext.isometry, Matrix::identity(2));
        let env = id.apply_complementary(&rho).unwrap();
        assert!((env.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dephasing_action() {
        let full = dephasing(1.0).unwrap().apply(&plus()).unwrap();
        assert!(full.matrix().max_abs_diff(&Matrix::diag(&[0.5, 0.5])) < 1e-15);
        for p in [0.0, 0.2, 0.7] {
            let out = dephasing(p).unwrap().apply(&plus()).unwrap();
            assert!((out.matrix()[(0, 1)].re - (1.0 - p) / 2.0).abs() < 1e-12);
            let d = diagonal_state(&[0.3, 0.7]).unwrap();
            let out = dephasing(p).unwrap().apply(&d).unwrap();
            assert!(out.matrix().max_abs_diff(d.matrix()) < 1e-15);
        }
        assert_eq!(
            dephasing(0.0).unwrap().apply(&plus()).unwrap().matrix(),
            plus().matrix()
        );
        assert!(dephasing(1.5).is_err());
        assert!(dephasing(-0.1).is_err());
    }

    #[test]
    fn dephasing_environment_entropy_matches_gamma() {
        for (nu, p) in [(0.5, 0.2), (0.1, 0.2), (0.3, 0.9), (0.25, 1.0)] {
            let rho = diagonal_state(&[nu, 1.0 - nu]).unwrap();
            let env = dephasing(p).unwrap().apply_complementary(&rho).unwrap();
            let q = p / 2.0;
            let gamma = 0.5 + 0.5 * (1.0 - 16.0 * q * (1.0 - q) * nu * (1.0 - nu)).sqrt();
            let expect = binary_entropy(gamma).unwrap();
            assert!((vn_entropy(&env).unwrap() - expect).abs() < 1e-10, "nu={nu} p={p}");
        }
    }

    #[test]
    fn erasure_action() {
        let rho = bloch_state(0.2, 0.1, -0.3).unwrap();
        let out = erasure(0.0).unwrap().apply(&rho).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((out.matrix()[(i, j)] - rho.matrix()[(i, j)]).norm() < 1e-15);
            }
        }
        let out = erasure(1.0).unwrap().apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(&Matrix::diag(&[0.0, 0.0, 1.0])) < 1e-15);
        let out = erasure(0.25).unwrap().apply(&maximally_mixed(2).unwrap()).unwrap();
        assert!(out.matrix().max_abs_diff(&Matrix::diag(&[0.375, 0.375, 0.25])) < 1e-15);
        assert!(erasure(2.0).is_err());
    }

    #[test]
    fn erasure_complement_is_erasure_of_one_minus_eps() {
        let ch = erasure(0.25).unwrap();
        let env = ch.apply_complementary(&maximally_mixed(2).unwrap()).unwrap();
        // Environment level 0 carries the "delivered" flag, levels 1,2 the input.
        let relabeled = Matrix::from_fn(3, 3, |i, j| {
            let map = |k: usize| (k + 1) % 3;
            env.matrix()[(map(i), map(j))]
        });
        assert!(relabeled.max_abs_diff(&Matrix::diag(&[0.125, 0.125, 0.75])) < 1e-12);
    }

    #[test]
    fn isometry_and_complement_agree_with_dilation() {
        let rho = bloch_state(0.3, 0.5, -0.6).unwrap();
        for ch in [dephasing(0.35).unwrap(), erasure(0.4).unwrap()] {
            let ext = ch.isometric_extension();
            assert!(ext.isometry_deviation() < 1e-12);
            let be = ext.apply(&rho).unwrap();
            let b = be.partial_trace(&[0]).unwrap();
            let e = be.partial_trace(&[1]).unwrap();
            assert!(b.matrix().max_abs_diff(ch.apply(&rho).unwrap().matrix()) < 1e-12);
            assert!(e.matrix().max_abs_diff(ch.apply_complementary(&rho).unwrap().matrix()) < 1e-12);
            let comp = ch.complementary();
            assert!(comp.completeness_deviation() < 1e-12);
            assert!(comp.apply(&rho).unwrap().matrix().max_abs_diff(e.matrix()) < 1e-12);
        }
    }

    #[test]
    fn tensor_channel_factorizes() {
        let id2 = tensor_channel(&KrausChannel::identity(2).unwrap(), &KrausChannel::identity(2).unwrap()).unwrap();
        assert_eq!(id2.kraus(), &[Matrix::identity(4)]);
        let d = dephasing(0.3).unwrap();
        let dd = tensor_channel(&d, &d).unwrap();
        assert_eq!(dd.env_dim(), 4);
        let rho = bloch_state(0.3, 0.1, 0.2).unwrap();
        let sigma = bloch_state(-0.5, 0.4, 0.0).unwrap();
        let lhs = dd.apply(&rho.tensor(&sigma).unwrap()).unwrap();
        let rhs = d.apply(&rho).unwrap().tensor(&d.apply(&sigma).unwrap()).unwrap();
        assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let bad = KrausChannel::new(2, 2, vec![Matrix::identity(2).scale(0.9)]);
        assert!(matches!(bad, Err(Error::NotComplete { .. })));
        let shape = KrausChannel::new(2, 3, vec![Matrix::identity(2)]);
        assert!(matches!(shape, Err(Error::DimensionMismatch { .. })));
        let ch = dephasing(0.1).unwrap();
        assert!(ch.apply(&maximally_mixed(3).unwrap()).is_err());
    }
}
