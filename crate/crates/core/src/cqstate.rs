//! One-shot entropic quantities of a classical-quantum ensemble sent
//! through a channel.
//!
//! An ensemble `{p_x, rho_x}` stands for the state
//! `sigma^{XABE} = sum_x p_x |x><x| ⊗ (I_A ⊗ V)(phi_x)(I_A ⊗ V)^dag`, where
//! `phi_x` purifies `rho_x` on `A ⊗ A'` and `V` dilates the channel. Because
//! `ABE` is pure given `x`, every bound reduces to entropies of `rho_x`,
//! `N(rho_x)`, `N^c(rho_x)` and `N(rho_bar)`. The explicit state is also
//! built (for small instances) to cross-check that reduction.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::KrausChannel;
use crate::entropy::{marginal_entropy, matrix_entropy};
use crate::error::{Error, Result};
use crate::qmat::{check_dim, diagonal_state, purification_vector, DensityOperator, Matrix, C64};
use crate::region::RateTriple;
use crate::Bits;

const PROBABILITY_TOL: f64 = 1e-10;

/// A finite mixture `{p_x, rho_x}` of input states.
#[derive(Clone, Debug, PartialEq)]
pub struct CqEnsemble {
    entries: Vec<(f64, DensityOperator)>,
}

impl CqEnsemble {
    pub fn new(entries: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::invalid("ensemble needs at least one entry"))?;
        let dim = first.1.dim();
        let mut total = 0.0;
        for (p, rho) in &entries {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::OutOfRange {
                    name: "ensemble probability",
                    value: *p,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "ensemble member dimension",
                    expected: dim,
                    found: rho.dim(),
                });
            }
            total += p;
        }
        if libm::fabs(total - 1.0) > PROBABILITY_TOL {
            return Err(Error::invalid(alloc::format!(
                "ensemble probabilities sum to {total}, expected 1"
            )));
        }
        Ok(CqEnsemble { entries })
    }

    pub(crate) fn new_unchecked(entries: Vec<(f64, DensityOperator)>) -> Self {
        CqEnsemble { entries }
    }

    pub fn single(rho: DensityOperator) -> Self {
        CqEnsemble {
            entries: vec![(1.0, rho)],
        }
    }

    pub fn entries(&self) -> &[(f64, DensityOperator)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.entries[0].1.dim()
    }

    /// `rho_bar = sum_x p_x rho_x`.
    pub fn average(&self) -> Matrix {
        let d = self.input_dim();
        let mut m = Matrix::zeros(d, d);
        for (p, rho) in &self.entries {
            m.add_scaled(*p, rho.matrix());
        }
        m
    }

    /// Drops members whose probability is at most `tol` and renormalizes.
    pub fn pruned(&self, tol: f64) -> CqEnsemble {
        let kept: Vec<_> = self.entries.iter().filter(|(p, _)| *p > tol).cloned().collect();
        if kept.is_empty() {
            return self.clone();
        }
        let total: f64 = kept.iter().map(|(p, _)| p).sum();
        CqEnsemble {
            entries: kept.into_iter().map(|(p, r)| (p / total, r)).collect(),
        }
    }

    /// Product ensemble `{p_x q_y, rho_x ⊗ sigma_y}` for two channel uses.
    pub fn tensor(&self, other: &CqEnsemble) -> Result<CqEnsemble> {
        let mut entries = Vec::with_capacity(self.len() * other.len());
        for (p, rho) in &self.entries {
            for (q, sigma) in &other.entries {
                entries.push((p * q, rho.tensor(sigma)?));
            }
        }
        Ok(CqEnsemble { entries })
    }
}

/// The two-member family `{1/2: diag(nu, 1-nu), 1/2: diag(1-nu, nu)}` that
/// traces out the dephasing and erasure boundaries.
pub fn bit_flip_pair(nu: f64) -> Result<CqEnsemble> {
    crate::error::check_probability("nu", nu)?;
    Ok(CqEnsemble::new_unchecked(vec![
        (0.5, diagonal_state(&[nu, 1.0 - nu])?),
        (0.5, diagonal_state(&[1.0 - nu, nu])?),
    ]))
}

/// Right-hand sides of the three one-shot region inequalities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropicTriple {
    /// `I(AX;B)`, bounds `C + 2Q`.
    pub cq_bound: Bits,
    /// `I(A>BX)`, bounds `Q + E`.
    pub qe_bound: Bits,
    /// `I(X;B) + I(A>BX)`, bounds `C + Q + E`.
    pub cqe_bound: Bits,
}

impl EntropicTriple {
    /// `I(X;B)`.
    pub fn holevo(&self) -> Bits {
        self.cqe_bound - self.qe_bound
    }

    /// Corner of the region cut out by these bounds: the CEF rate triple.
    pub fn cef_corner(&self) -> RateTriple {
        let c = self.cqe_bound - self.qe_bound;
        let q = 0.5 * (self.cq_bound - c);
        RateTriple::new(c, q, self.qe_bound - q)
    }

    pub fn max_abs_diff(&self, other: &EntropicTriple) -> f64 {
        libm::fabs(self.cq_bound - other.cq_bound)
            .max(libm::fabs(self.qe_bound - other.qe_bound))
            .max(libm::fabs(self.cqe_bound - other.cqe_bound))
    }
}

/// The four averaged entropies the reduced formulas are built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleEntropies {
    /// `H(N(rho_bar))`
    pub average_output: Bits,
    /// `sum_x p_x H(rho_x)`
    pub input: Bits,
    /// `sum_x p_x H(N(rho_x))`
    pub output: Bits,
    /// `sum_x p_x H(N^c(rho_x))`
    pub environment: Bits,
}

impl EnsembleEntropies {
    /// Evaluates the entropies for raw member matrices. The matrices must be
    /// states of the channel's input dimension; they are not re-validated.
    pub fn from_members<'a>(members: impl IntoIterator<Item = (f64, &'a Matrix)>, ch: &KrausChannel) -> Result<Self> {
        let d = ch.in_dim();
        let mut avg = Matrix::zeros(d, d);
        let (mut input, mut output, mut environment) = (0.0, 0.0, 0.0);
        for (p, rho) in members {
            if rho.rows() != d || !rho.is_square() {
                return Err(Error::DimensionMismatch {
                    context: "ensemble member vs channel input",
                    expected: d,
                    found: rho.rows(),
                });
            }
            avg.add_scaled(p, rho);
            if p == 0.0 {
                continue;
            }
            input += p * matrix_entropy(rho)?;
            output += p * matrix_entropy(&ch.apply_matrix(rho))?;
            environment += p * matrix_entropy(&ch.complementary_matrix(rho))?;
        }
        Ok(EnsembleEntropies {
            average_output: matrix_entropy(&ch.apply_matrix(&avg))?,
            input,
            output,
            environment,
        })
    }

    pub fn of(ens: &CqEnsemble, ch: &KrausChannel) -> Result<Self> {
        EnsembleEntropies::from_members(ens.entries.iter().map(|(p, r)| (*p, r.matrix())), ch)
    }

    /// `I(X;B)`
    pub fn holevo(&self) -> Bits {
        self.average_output - self.output
    }

    /// `I(A;B|X)`
    pub fn conditional_ab(&self) -> Bits {
        self.input + self.output - self.environment
    }

    /// `I(A;E|X)`
    pub fn conditional_ae(&self) -> Bits {
        self.input + self.environment - self.output
    }

    pub fn triple(&self) -> EntropicTriple {
        let qe = self.output - self.environment;
        EntropicTriple {
            cq_bound: self.input + self.average_output - self.environment,
            qe_bound: qe,
            cqe_bound: self.holevo() + qe,
        }
    }

    pub fn cef(&self) -> RateTriple {
        RateTriple::new(self.holevo(), 0.5 * self.conditional_ab(), -0.5 * self.conditional_ae())
    }
}

fn check_input_dim(ens: &CqEnsemble, ch: &KrausChannel) -> Result<()> {
    if ens.input_dim() != ch.in_dim() {
        return Err(Error::DimensionMismatch {
            context: "ensemble vs channel input",
            expected: ch.in_dim(),
            found: ens.input_dim(),
        });
    }
    Ok(())
}

/// `(I(AX;B), I(A>BX), I(X;B) + I(A>BX))` through the reduced formulas.
pub fn entropic_triple(ens: &CqEnsemble, ch: &KrausChannel) -> Result<EntropicTriple> {
    check_input_dim(ens, ch)?;
    Ok(EnsembleEntropies::of(ens, ch)?.triple())
}

/// CEF rate triple `(I(X;B), I(A;B|X)/2, -I(A;E|X)/2)`.
pub fn cef_point(ens: &CqEnsemble, ch: &KrausChannel) -> Result<RateTriple> {
    check_input_dim(ens, ch)?;
    Ok(EnsembleEntropies::of(ens, ch)?.cef())
}

// ---------------------------------------------------------------------------
// Explicit sigma^{XABE}
// ---------------------------------------------------------------------------

const X: usize = 0;
const A: usize = 1;
const B: usize = 2;
const E: usize = 3;

/// Builds `sigma^{XABE}` with subsystems labelled `[X, A, B, E]`. The `A`
/// register is the purifying reference of each member, of dimension
/// `in_dim`.
pub fn explicit_state(ens: &CqEnsemble, ch: &KrausChannel) -> Result<DensityOperator> {
    check_input_dim(ens, ch)?;
    let d = ch.in_dim();
    let (out, env) = (ch.out_dim(), ch.env_dim());
    let nx = ens.len();
    let block = d * out * env;
    check_dim(nx * block)?;
    let v = ch.isometric_extension().isometry;

    let mut sigma = Matrix::zeros(nx * block, nx * block);
    for (x, (p, rho)) in ens.entries.iter().enumerate() {
        let psi = purification_vector(rho.matrix())?;
        let mut phi = vec![C64::new(0.0, 0.0); block];
        for a in 0..d {
            for be in 0..out * env {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..d {
                    acc += v[(be, i)] * psi[a * d + i];
                }
                phi[a * out * env + be] = acc;
            }
        }
        let base = x * block;
        for i in 0..block {
            for j in 0..block {
                sigma[(base + i, base + j)] = phi[i] * phi[j].conj() * *p;
            }
        }
    }
    Ok(DensityOperator::new_unchecked(sigma, vec![nx, d, out, env]))
}

/// Marginal entropies of the explicit state needed by the bounds.
struct ExplicitEntropies {
    x: Bits,
    b: Bits,
    xa: Bits,
    xb: Bits,
    xe: Bits,
    xab: Bits,
    xae: Bits,
}

impl ExplicitEntropies {
    fn of(sigma: &DensityOperator) -> Result<Self> {
        Ok(ExplicitEntropies {
            x: marginal_entropy(sigma, &[X])?,
            b: marginal_entropy(sigma, &[B])?,
            xa: marginal_entropy(sigma, &[X, A])?,
            xb: marginal_entropy(sigma, &[X, B])?,
            xe: marginal_entropy(sigma, &[X, E])?,
            xab: marginal_entropy(sigma, &[X, A, B])?,
            xae: marginal_entropy(sigma, &[X, A, E])?,
        })
    }

    fn cq(&self) -> Bits {
        self.xa + self.b - self.xab
    }

    fn qe(&self) -> Bits {
        self.xb - self.xab
    }

    fn holevo(&self) -> Bits {
        self.x + self.b - self.xb
    }

    fn cond_ab(&self) -> Bits {
        self.xa + self.xb - self.x - self.xab
    }

    fn cond_ae(&self) -> Bits {
        self.xa + self.xe - self.x - self.xae
    }
}

/// The bounds evaluated directly on the explicit `sigma^{XABE}`.
pub fn explicit_triple(ens: &CqEnsemble, ch: &KrausChannel) -> Result<EntropicTriple> {
    let h = ExplicitEntropies::of(&explicit_state(ens, ch)?)?;
    Ok(EntropicTriple {
        cq_bound: h.cq(),
        qe_bound: h.qe(),
        cqe_bound: h.holevo() + h.qe(),
    })
}

/// Residuals of the two decompositions used to translate the CEF corner into
/// the region inequalities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResiduals {
    /// `|I(AX;B) - I(X;B) - I(A;B|X)|`
    pub mutual_chain: f64,
    /// `|I(A>BX) - I(A;B|X)/2 + I(A;E|X)/2|`
    pub coherent_split: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.mutual_chain.max(self.coherent_split)
    }
}

pub fn verify_identities(ens: &CqEnsemble, ch: &KrausChannel) -> Result<IdentityResiduals> {
    let h = ExplicitEntropies::of(&explicit_state(ens, ch)?)?;
    Ok(IdentityResiduals {
        mutual_chain: libm::fabs(h.cq() - h.holevo() - h.cond_ab()),
        coherent_split: libm::fabs(h.qe() - 0.5 * h.cond_ab() + 0.5 * h.cond_ae()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dephasing, erasure};
    use crate::qmat::{bloch_state, maximally_mixed};

    fn h2(q: f64) -> f64 {
        let t = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
        t(q) + t(1.0 - q)
    }

    #[test]
    fn ensemble_validation() {
        let r = maximally_mixed(2).unwrap();
        assert!(CqEnsemble::new(vec![]).is_err());
        assert!(CqEnsemble::new(vec![(0.5, r.clone()), (0.4, r.clone())]).is_err());
        assert!(CqEnsemble::new(vec![(1.2, r.clone()), (-0.2, r.clone())]).is_err());
        assert!(CqEnsemble::new(vec![(0.5, r.clone()), (0.5, maximally_mixed(3).unwrap())]).is_err());
        assert!(CqEnsemble::new(vec![(0.5, r.clone()), (0.5, r)]).is_ok());
    }

    #[test]
    fn identity_channel_on_maximally_mixed() {
        let id = KrausChannel::identity(2).unwrap();
        let ens = CqEnsemble::single(maximally_mixed(2).unwrap());
        let t = entropic_triple(&ens, &id).unwrap();
        assert!((t.cq_bound - 2.0).abs() < 1e-12);
        assert!((t.qe_bound - 1.0).abs() < 1e-12);
        assert!((t.cqe_bound - 1.0).abs() < 1e-12);
        let cef = cef_point(&ens, &id).unwrap();
        assert!(cef.max_abs_diff(&RateTriple::new(0.0, 1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn dephasing_canonical_ensemble_at_half() {
        let ens = bit_flip_pair(0.5).unwrap();
        let t = entropic_triple(&ens, &dephasing(0.2).unwrap()).unwrap();
        let r = 1.0 - h2(0.9);
        assert!((t.cq_bound - (1.0 + r)).abs() < 1e-10);
        assert!((t.qe_bound - r).abs() < 1e-10);
        assert!((t.cqe_bound - r).abs() < 1e-10);
        let cef = cef_point(&ens, &dephasing(0.2).unwrap()).unwrap();
        assert!((cef.c + 2.0 * cef.q - t.cq_bound).abs() < 1e-10);
    }

    #[test]
    fn erasure_single_state_structure() {
        for eps in [0.1, 0.25, 0.6] {
            let rho = bloch_state(0.1, -0.3, 0.4).unwrap();
            let h = crate::entropy::vn_entropy(&rho).unwrap();
            let ens = CqEnsemble::single(rho);
            let t = entropic_triple(&ens, &erasure(eps).unwrap()).unwrap();
            assert!(t.holevo().abs() < 1e-12);
            assert!((t.qe_bound - (1.0 - 2.0 * eps) * h).abs() < 1e-10);
        }
    }

    #[test]
    fn single_pure_state_cef() {
        let ens = CqEnsemble::single(bloch_state(0.0, 0.6, 0.8).unwrap());
        let ch = dephasing(0.3).unwrap();
        let cef = cef_point(&ens, &ch).unwrap();
        assert!(cef.c.abs() < 1e-12);
        let sigma = explicit_state(&ens, &ch).unwrap();
        let ab = sigma.partial_trace(&[A, B]).unwrap();
        let ae = sigma.partial_trace(&[A, E]).unwrap();
        let iab = crate::entropy::mutual_information(&ab).unwrap();
        let iae = crate::entropy::mutual_information(&ae).unwrap();
        assert!((cef.q - 0.5 * iab).abs() < 1e-10);
        assert!((cef.e + 0.5 * iae).abs() < 1e-10);
    }

    #[test]
    fn reduced_and_explicit_paths_agree() {
        let ens = CqEnsemble::new(vec![
            (0.3, bloch_state(0.2, 0.5, -0.1).unwrap()),
            (0.7, bloch_state(-0.6, 0.0, 0.7).unwrap()),
        ])
        .unwrap();
        for ch in [dephasing(0.4).unwrap(), erasure(0.3).unwrap()] {
            let reduced = entropic_triple(&ens, &ch).unwrap();
            let explicit = explicit_triple(&ens, &ch).unwrap();
            assert!(reduced.max_abs_diff(&explicit) < 1e-8);
            assert!(verify_identities(&ens, &ch).unwrap().max() < 1e-8);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let ens = CqEnsemble::single(maximally_mixed(3).unwrap());
        assert!(entropic_triple(&ens, &dephasing(0.1).unwrap()).is_err());
    }
}
