//! Small dense-matrix helpers shared by the solver modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(c)
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Induced infinity norm (maximum absolute row sum).
pub fn norm_inf(m: &CMat) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn norm_inf_real(m: &RMat) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU inverse together with the infinity-norm condition estimate
/// `‖A‖·‖A⁻¹‖`. Returns `None` when the factorization is exactly singular.
pub fn inverse_with_condition(m: &CMat) -> Option<(CMat, f64)> {
    let inv = m.clone().lu().try_inverse()?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    let cond = norm_inf(m) * norm_inf(&inv);
    Some((inv, cond))
}

pub fn det(m: &CMat) -> Complex64 {
    m.clone().lu().determinant()
}

/// Assemble `[[a, b], [c, d]]` from four equally sized square blocks.
pub fn block2(a: &CMat, b: &CMat, cc: &CMat, d: &CMat) -> CMat {
    let n = a.nrows();
    let mut out = CMat::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((0, n), (n, n)).copy_from(b);
    out.view_mut((n, 0), (n, n)).copy_from(cc);
    out.view_mut((n, n), (n, n)).copy_from(d);
    out
}

/// Split a `2N×2N` matrix into its four `N×N` blocks.
pub fn split2(m: &CMat) -> (CMat, CMat, CMat, CMat) {
    let n = m.nrows() / 2;
    (
        m.view((0, 0), (n, n)).into_owned(),
        m.view((0, n), (n, n)).into_owned(),
        m.view((n, 0), (n, n)).into_owned(),
        m.view((n, n), (n, n)).into_owned(),
    )
}

/// Entrywise maximum of `|m_ij - m_ji|`, with its location.
pub fn max_asymmetry(m: &RMat) -> (f64, usize, usize) {
    let mut worst = (0.0, 0, 0);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)]).abs();
            if d > worst.0 || d.is_nan() {
                worst = (d, i, j);
            }
        }
    }
    worst
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_condition() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0), c(0.0), c(0.0), c(0.5)]);
        let (inv, cond) = inverse_with_condition(&m).unwrap();
        assert!((inv[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((inv[(1, 1)].re - 2.0).abs() < 1e-15);
        assert!((cond - 4.0).abs() < 1e-12);
        let z = CMat::zeros(2, 2);
        assert!(inverse_with_condition(&z).is_none());
    }

    #[test]
    fn blocks_round_trip() {
        let a = identity(2);
        let b = a.scale(2.0);
        let cc = a.scale(3.0);
        let d = a.scale(4.0);
        let m = block2(&a, &b, &cc, &d);
        let (a2, b2, c2, d2) = split2(&m);
        assert_eq!(a, a2);
        assert_eq!(b, b2);
        assert_eq!(cc, c2);
        assert_eq!(d, d2);
    }

    #[test]
    fn norms() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0), c(-2.0), I, c(0.5)]);
        assert_eq!(max_abs(&m), 2.0);
        assert_eq!(norm_inf(&m), 3.0);
    }
}
