//! The disc automorphism `psi_a(z) = (a - z) / (1 - conj(a) z)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn moebius(a: Complex64, z: Complex64) -> Result<Complex64> {
    if !(a.norm() < 1.0) {
        return Err(Error::domain("moebius needs |a| < 1"));
    }
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::domain("moebius needs |z| <= 1"));
    }
    Ok((a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_identities() {
        let z = Complex64::new(0.3, -0.4);
        assert_eq!(moebius(Complex64::new(0.0, 0.0), z).unwrap(), -z);
        let a = Complex64::new(0.5, 0.0);
        assert!(moebius(a, a).unwrap().norm() < 1e-15);
        let w = Complex64::new(0.0, 1.0 / 3.0);
        let back = moebius(a, moebius(a, w).unwrap()).unwrap();
        assert!((back - w).norm() < 1e-15);
        assert!(moebius(Complex64::new(1.0, 0.0), z).is_err());
        assert!(moebius(a, Complex64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn boundary_maps_to_boundary() {
        let a = Complex64::new(0.2, 0.7);
        let z = Complex64::from_polar(1.0, 0.9);
        assert!((moebius(a, z).unwrap().norm() - 1.0).abs() < 1e-12);
    }
}
