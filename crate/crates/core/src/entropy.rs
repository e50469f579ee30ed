//! Entropic functionals, all in bits.

use crate::error::{check_probability, Error, Result};
use crate::qmat::{hermitian_eigenvalues, DensityOperator, Matrix, STATE_TOL};
use crate::Bits;

/// `-sum l log2 l` over a spectrum; `0 log 0 = 0`.
///
/// Eigenvalues in `[-1e-10, 0)` are rounding noise and count as zero. Anything
/// more negative means the operator was not a state.
pub fn spectrum_entropy(values: &[f64]) -> Result<Bits> {
    let mut h = 0.0;
    for &l in values {
        if l < -STATE_TOL {
            return Err(Error::NotPositive { eigenvalue: l });
        }
        if l > 0.0 {
            h -= l * libm::log2(l);
        }
    }
    Ok(h)
}

/// Entropy of a Hermitian positive matrix without re-validating it as a state.
pub fn matrix_entropy(m: &Matrix) -> Result<Bits> {
    spectrum_entropy(&hermitian_eigenvalues(m)?)
}

/// von Neumann entropy `H(rho)`.
pub fn vn_entropy(rho: &DensityOperator) -> Result<Bits> {
    matrix_entropy(rho.matrix())
}

/// `H_2(q)`.
pub fn binary_entropy(q: f64) -> Result<Bits> {
    check_probability("q", q)?;
    Ok(h2(q))
}

/// Binary entropy for an argument already known to lie in `[0, 1]`.
pub(crate) fn h2(q: f64) -> Bits {
    let term = |x: f64| if x > 0.0 { -x * libm::log2(x) } else { 0.0 };
    term(q) + term(1.0 - q)
}

/// Entropy of the marginal on the subsystems in `keep`.
pub fn marginal_entropy(rho: &DensityOperator, keep: &[usize]) -> Result<Bits> {
    vn_entropy(&rho.partial_trace(keep)?)
}

fn expect_parts(rho: &DensityOperator, n: usize) -> Result<()> {
    if rho.dims().len() != n {
        return Err(Error::DimensionMismatch {
            context: "number of labelled subsystems",
            expected: n,
            found: rho.dims().len(),
        });
    }
    Ok(())
}

/// `I(A;B) = H(A) + H(B) - H(AB)` for a bipartite state.
pub fn mutual_information(rho: &DensityOperator) -> Result<Bits> {
    expect_parts(rho, 2)?;
    Ok(marginal_entropy(rho, &[0])? + marginal_entropy(rho, &[1])? - vn_entropy(rho)?)
}

/// `I(A>B) = H(B) - H(AB)` for a bipartite state. May be negative.
pub fn coherent_information(rho: &DensityOperator) -> Result<Bits> {
    expect_parts(rho, 2)?;
    Ok(marginal_entropy(rho, &[1])? - vn_entropy(rho)?)
}

/// `I(A;B|C) = H(AC) + H(BC) - H(C) - H(ABC)` for a tripartite state.
///
/// Small negative values from rounding are returned as computed.
pub fn conditional_mutual_information(rho: &DensityOperator) -> Result<Bits> {
    expect_parts(rho, 3)?;
    Ok(marginal_entropy(rho, &[0, 2])? + marginal_entropy(rho, &[1, 2])?
        - marginal_entropy(rho, &[2])?
        - vn_entropy(rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{bloch_state, diagonal_state, max_correlated, max_entangled, maximally_mixed};

    // -0.9 log2 0.9 - 0.1 log2 0.1, evaluated with natural logs.
    fn h_09() -> f64 {
        -(0.9 * 0.9f64.ln() + 0.1 * 0.1f64.ln()) / 2f64.ln()
    }

    #[test]
    fn entropy_fixtures() {
        assert!((vn_entropy(&maximally_mixed(2).unwrap()).unwrap() - 1.0).abs() < 1e-14);
        let pure = bloch_state(0.6, 0.0, 0.8).unwrap();
        assert!(vn_entropy(&pure).unwrap().abs() < 1e-12);
        let d = diagonal_state(&[0.9, 0.1]).unwrap();
        assert!((vn_entropy(&d).unwrap() - h_09()).abs() < 1e-14);
        assert!((h_09() - 0.468996).abs() < 1e-6);
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.9).unwrap() - h_09()).abs() < 1e-15);
        assert!((binary_entropy(0.3).unwrap() - binary_entropy(0.7).unwrap()).abs() < 1e-15);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn mutual_and_coherent_information() {
        let phi = max_entangled(2).unwrap();
        assert!((mutual_information(&phi).unwrap() - 2.0).abs() < 1e-12);
        assert!((coherent_information(&phi).unwrap() - 1.0).abs() < 1e-12);

        let bar = max_correlated(2).unwrap();
        assert!((mutual_information(&bar).unwrap() - 1.0).abs() < 1e-12);
        assert!(coherent_information(&bar).unwrap().abs() < 1e-12);

        let prod = bloch_state(0.2, 0.1, 0.3)
            .unwrap()
            .tensor(&bloch_state(0.0, -0.5, 0.1).unwrap())
            .unwrap();
        assert!(mutual_information(&prod).unwrap().abs() < 1e-12);

        let zero_mixed = diagonal_state(&[1.0, 0.0])
            .unwrap()
            .tensor(&maximally_mixed(2).unwrap())
            .unwrap();
        assert!(coherent_information(&zero_mixed).unwrap().abs() < 1e-12);
    }

    #[test]
    fn subsystem_count_is_checked() {
        let single = maximally_mixed(4).unwrap();
        assert!(mutual_information(&single).is_err());
        assert!(coherent_information(&single).is_err());
        let phi = max_entangled(2).unwrap();
        assert!(conditional_mutual_information(&phi).is_err());
    }

    #[test]
    fn conditional_mutual_information_decouples() {
        let phi = max_entangled(2).unwrap();
        let c = bloch_state(0.1, 0.0, 0.4).unwrap();
        let abc = phi.tensor(&c).unwrap();
        let cmi = conditional_mutual_information(&abc).unwrap();
        assert!((cmi - mutual_information(&phi).unwrap()).abs() < 1e-12);

        let full = bloch_state(0.3, 0.0, 0.0)
            .unwrap()
            .tensor(&maximally_mixed(2).unwrap())
            .unwrap()
            .tensor(&c)
            .unwrap();
        assert!(conditional_mutual_information(&full).unwrap().abs() < 1e-12);
    }

    #[test]
    fn spectrum_rejects_negative_mass() {
        assert!(spectrum_entropy(&[1.0 + 5e-11, -5e-11]).is_ok());
        assert!(matches!(spectrum_entropy(&[1.1, -0.1]), Err(Error::NotPositive { .. })));
    }
}
