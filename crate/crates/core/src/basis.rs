//! Elementary operator matrices: truncated oscillator ladder combinations,
//! the symmetric position grid with its Sylvester (centered DFT) matrix,
//! worldline-fermion factors, and identity-padded tensor placement.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{kron, OperatorMatrix, ONE, ZERO};

fn require_size(what: &'static str, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSize { what, size: n });
    }
    Ok(())
}

/// Oscillator-basis coordinate: `Q[j, j+1] = Q[j+1, j] = sqrt((j+1)/2)`.
pub fn osc_q(n: usize) -> Result<OperatorMatrix> {
    require_size("oscillator truncation", n)?;
    Ok(OperatorMatrix::from_fn(n, |i, j| {
        if i + 1 == j || j + 1 == i {
            Complex64::new((i.max(j) as f64 / 2.0).sqrt(), 0.0)
        } else {
            ZERO
        }
    }))
}

/// Oscillator-basis momentum: `P[j, j+1] = -i sqrt((j+1)/2)`, `P[j+1, j] = +i sqrt((j+1)/2)`.
pub fn osc_p(n: usize) -> Result<OperatorMatrix> {
    require_size("oscillator truncation", n)?;
    Ok(OperatorMatrix::from_fn(n, |i, j| {
        let amp = (i.max(j) as f64 / 2.0).sqrt();
        if i + 1 == j {
            Complex64::new(0.0, -amp)
        } else if j + 1 == i {
            Complex64::new(0.0, amp)
        } else {
            ZERO
        }
    }))
}

/// Centered grid label `2(j+1) - (n+1)` for zero-based `j`; odd integers
/// symmetric about zero for even `n`.
fn grid_label(j: usize, n: usize) -> f64 {
    (2 * (j + 1)) as f64 - (n + 1) as f64
}

/// Grid spacing unit `sqrt(2π / 4n)`.
fn grid_unit(n: usize) -> f64 {
    (2.0 * PI / (4.0 * n as f64)).sqrt()
}

/// Position value of zero-based grid point `j`.
pub fn grid_point(j: usize, n: usize) -> f64 {
    grid_unit(n) * grid_label(j, n)
}

/// All grid positions in ascending order.
pub fn grid_points(n: usize) -> Vec<f64> {
    (0..n).map(|j| grid_point(j, n)).collect()
}

/// Position-basis coordinate: diagonal grid `sqrt(2π/4n)·(2(j+1) - (n+1))`.
pub fn pos_q(n: usize) -> Result<OperatorMatrix> {
    require_size("position grid", n)?;
    Ok(OperatorMatrix::from_real_diagonal(&grid_points(n)))
}

/// Sylvester matrix `F[j,k] = n^{-1/2} exp(i (2π/4n) g_j g_k)` with centered
/// labels `g`.
pub fn sylvester_f(n: usize) -> Result<OperatorMatrix> {
    require_size("position grid", n)?;
    let norm = 1.0 / (n as f64).sqrt();
    let unit = 2.0 * PI / (4.0 * n as f64);
    Ok(OperatorMatrix::from_fn(n, |j, k| Complex64::from_polar(norm, unit * grid_label(j, n) * grid_label(k, n))))
}

/// Position-basis momentum `F† Q_pos F`.
pub fn pos_p(n: usize) -> Result<OperatorMatrix> {
    let f = sylvester_f(n)?;
    let q = pos_q(n)?;
    Ok(&(&f.adjoint() * &q) * &f)
}

/// Worldline fermion factor `[[0, 1], [0, 0]]`.
pub fn fermion_factor() -> OperatorMatrix {
    OperatorMatrix::from_fn(2, |i, j| if i == 0 && j == 1 { ONE } else { ZERO })
}

/// `I_{d0} ⊗ … ⊗ op ⊗ … ⊗ I_{d_last}` with `op` at position `slot`.
pub fn place(op: &OperatorMatrix, slot: usize, dims: &[usize]) -> Result<OperatorMatrix> {
    let Some(&expected) = dims.get(slot) else {
        return Err(Error::IndexOutOfRange { index: slot, len: dims.len() });
    };
    if op.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: op.dim() });
    }
    let left: usize = dims[..slot].iter().product();
    let right: usize = dims[slot + 1..].iter().product();
    let mut out = op.clone();
    if left > 1 {
        out = kron(&OperatorMatrix::identity(left), &out);
    }
    if right > 1 {
        out = kron(&out, &OperatorMatrix::identity(right));
    }
    Ok(out)
}

/// Number of qubits an `n`-dimensional register occupies.
pub fn qubits_for(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{hermitian_eigenvalues, I};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn osc_q_two_levels() {
        let q = osc_q(2).unwrap();
        let expected = OperatorMatrix::pauli_x().scale(FRAC_1_SQRT_2);
        assert!(q.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn osc_q_four_levels_off_diagonals() {
        let q = osc_q(4).unwrap();
        for j in 0..3 {
            let v = ((j + 1) as f64).sqrt() * FRAC_1_SQRT_2;
            assert!((q.get(j, j + 1).re - v).abs() < 1e-15);
            assert!((q.get(j + 1, j).re - v).abs() < 1e-15);
        }
        assert_eq!(q.get(0, 2), ZERO);
        assert_eq!(q.get(3, 3), ZERO);
    }

    #[test]
    fn osc_q_sixteen_is_real_hermitian() {
        let q = osc_q(16).unwrap();
        assert_eq!(q.hermiticity_deviation(), 0.0);
        for i in 0..16 {
            for j in 0..16 {
                assert_eq!(q.get(i, j).im, 0.0);
            }
        }
    }

    #[test]
    fn osc_p_two_levels() {
        let p = osc_p(2).unwrap();
        // (i/√2)[[0,-1],[1,0]]
        let expected =
            OperatorMatrix::from_row_major(&[ZERO, -ONE, ONE, ZERO]).unwrap().scale_complex(I * FRAC_1_SQRT_2);
        assert!(p.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn canonical_commutator_has_single_corner_defect() {
        let n = 16;
        let comm = osc_q(n).unwrap().commutator(&osc_p(n).unwrap());
        for i in 0..n {
            for j in 0..n {
                let expected = if i != j {
                    ZERO
                } else if i == n - 1 {
                    I * (1.0 - n as f64)
                } else {
                    I
                };
                assert!((comm.get(i, j) - expected).norm() < 1e-13, "({i},{j})");
            }
        }
    }

    #[test]
    fn osc_p_and_osc_q_share_spectrum() {
        for n in [4, 16] {
            let eq = hermitian_eigenvalues(&osc_q(n).unwrap()).unwrap();
            let ep = hermitian_eigenvalues(&osc_p(n).unwrap()).unwrap();
            for (a, b) in eq.iter().zip(&ep) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sizes_below_two_are_rejected() {
        for f in [osc_q, osc_p, pos_q, sylvester_f, pos_p] {
            assert!(matches!(f(1), Err(Error::InvalidSize { .. })));
            assert!(matches!(f(0), Err(Error::InvalidSize { .. })));
        }
    }

    #[test]
    fn pos_q_values() {
        let q = pos_q(4).unwrap();
        // 1-based j = 1 → sqrt(π/8)·(−3)
        assert!((q.get(0, 0).re - (PI / 8.0).sqrt() * -3.0).abs() < 1e-15);
        assert!((q.get(0, 0).re + 1.879_971).abs() < 1e-6);
        let q2 = pos_q(2).unwrap();
        assert!((q2.get(0, 0).re + (PI / 4.0).sqrt()).abs() < 1e-15);
        assert!((q2.get(1, 1).re - (PI / 4.0).sqrt()).abs() < 1e-15);
        for n in [2, 3, 4, 7, 16] {
            assert!(pos_q(n).unwrap().trace().norm() < 1e-13);
        }
    }

    #[test]
    fn sylvester_is_unitary_with_flat_moduli() {
        for n in [2, 4, 8, 16] {
            let f = sylvester_f(n).unwrap();
            let ff = &f * &f.adjoint();
            assert!(ff.max_abs_diff(&OperatorMatrix::identity(n)) < 1e-10, "n = {n}");
            for i in 0..n {
                for j in 0..n {
                    assert!((f.get(i, j).norm() - 1.0 / (n as f64).sqrt()).abs() < 1e-15);
                }
            }
        }
        let f2 = sylvester_f(2).unwrap();
        let expected = Complex64::from_polar(FRAC_1_SQRT_2, PI / 4.0);
        assert!((f2.get(0, 0) - expected).norm() < 1e-15);
    }

    #[test]
    fn pos_p_is_hermitian_isospectral() {
        let p = pos_p(16).unwrap();
        assert!(p.hermiticity_deviation() < 1e-12);
        let ep = hermitian_eigenvalues(&p).unwrap();
        for (a, b) in ep.iter().zip(grid_points(16)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fermion_factor_algebra() {
        let psi = fermion_factor();
        assert_eq!(psi.matmul(&psi), OperatorMatrix::zeros(2));
        let anti = &(&psi.adjoint() * &psi) + &(&psi * &psi.adjoint());
        assert_eq!(anti, OperatorMatrix::identity(2));
        assert_ne!(psi, psi.adjoint());
    }

    #[test]
    fn place_examples() {
        let q = osc_q(16).unwrap();
        let x = place(&q, 0, &[16, 16]).unwrap();
        assert_eq!(x, kron(&q, &OperatorMatrix::identity(16)));

        let psi = fermion_factor();
        let psi3 = place(&psi, 3, &[64, 2, 2, 2]).unwrap();
        let expected = kron(
            &kron(&kron(&OperatorMatrix::identity(64), &OperatorMatrix::identity(2)), &OperatorMatrix::identity(2)),
            &psi,
        );
        assert_eq!(psi3, expected);

        for slot in 0..2 {
            assert_eq!(place(&OperatorMatrix::identity(2), slot, &[2, 2]).unwrap(), OperatorMatrix::identity(4));
        }
        assert!(matches!(place(&psi, 0, &[4, 2]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(place(&psi, 2, &[2, 2]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn placements_in_distinct_slots_commute_exactly() {
        let dims = [4, 2, 4];
        let a = place(&osc_q(4).unwrap(), 0, &dims).unwrap();
        let b = place(&fermion_factor(), 1, &dims).unwrap();
        let c = place(&osc_p(4).unwrap(), 2, &dims).unwrap();
        assert_eq!(a.dim(), 32);
        assert_eq!(a.commutator(&b), OperatorMatrix::zeros(32));
        assert_eq!(a.commutator(&c), OperatorMatrix::zeros(32));
        assert_eq!(b.commutator(&c), OperatorMatrix::zeros(32));
    }

    #[test]
    fn qubit_bookkeeping() {
        assert_eq!(qubits_for(256).unwrap(), 8);
        assert_eq!(qubits_for(16).unwrap(), 4);
        assert_eq!(qubits_for(512).unwrap(), 9);
        assert!(matches!(qubits_for(12), Err(Error::NotPowerOfTwo(12))));
    }
}
