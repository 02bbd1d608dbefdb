//! Interface optics: Snell refraction, mirror reflection, unpolarized Fresnel
//! reflectance and the critical angle.

use crate::error::{Error, Result};

use super::vec3::Vec3;

const UNIT_TOL: f64 = 1e-9;

/// Critical angle arcsin(n2/n1) in radians for light going from `n1` into `n2`.
pub fn critical_angle(n1: f64, n2: f64) -> Result<f64> {
    if !(n2 > 0.0) || !(n1 > 0.0) {
        return Err(Error::domain("refractive indices must be positive"));
    }
    if n2 > n1 {
        return Err(Error::domain(format!("no critical angle from n1={n1} into the denser n2={n2}")));
    }
    Ok((n2 / n1).asin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Refraction {
    Transmitted(Vec3),
    TotalInternalReflection,
}

/// Snell refraction of unit `dir` at a surface with unit `normal` facing
/// against `dir` (`dir·normal ≤ 0`).
pub fn refract(dir: Vec3, normal: Vec3, n1: f64, n2: f64) -> Result<Refraction> {
    if !dir.is_unit(UNIT_TOL) || !normal.is_unit(UNIT_TOL) {
        return Err(Error::domain("refract needs unit direction and normal"));
    }
    if dir.dot(normal) > UNIT_TOL {
        return Err(Error::domain("refract needs the normal to face the incoming ray"));
    }
    Ok(refract_unchecked(dir, normal, n1, n2))
}

#[inline]
pub(crate) fn refract_unchecked(dir: Vec3, normal: Vec3, n1: f64, n2: f64) -> Refraction {
    let eta = n1 / n2;
    let cos_i = (-dir.dot(normal)).min(1.0);
    let sin2_t = eta * eta * (1.0 - cos_i * cos_i);
    if sin2_t > 1.0 {
        return Refraction::TotalInternalReflection;
    }
    let cos_t = (1.0 - sin2_t).sqrt();
    let t = dir * eta + normal * (eta * cos_i - cos_t);
    // renormalize to keep |t| = 1 at the 1e-15 level over long trajectories
    Refraction::Transmitted(t.normalized())
}

/// Mirror reflection `dir − 2(dir·n)n`.
#[inline]
pub fn reflect(dir: Vec3, normal: Vec3) -> Vec3 {
    dir - normal * (2.0 * dir.dot(normal))
}

/// Unpolarized Fresnel reflectance (R_s + R_p)/2 at incidence angle `theta1`.
/// Returns 1 at and beyond the critical angle.
pub fn fresnel_reflectance(theta1: f64, n1: f64, n2: f64) -> f64 {
    if n1 == n2 {
        return 0.0;
    }
    let cos_i = theta1.cos().clamp(0.0, 1.0);
    fresnel_from_cos(cos_i, n1, n2)
}

#[inline]
pub(crate) fn fresnel_from_cos(cos_i: f64, n1: f64, n2: f64) -> f64 {
    if n1 == n2 {
        return 0.0;
    }
    let sin_i2 = 1.0 - cos_i * cos_i;
    let sin_t2 = (n1 / n2) * (n1 / n2) * sin_i2;
    if sin_t2 >= 1.0 {
        return 1.0;
    }
    let cos_t = (1.0 - sin_t2).sqrt();
    let rs = (n1 * cos_i - n2 * cos_t) / (n1 * cos_i + n2 * cos_t);
    let rp = (n1 * cos_t - n2 * cos_i) / (n1 * cos_t + n2 * cos_i);
    0.5 * (rs * rs + rp * rp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn in_plane(theta: f64) -> Vec3 {
        // incoming ray in the x–z plane hitting a surface with normal +z
        Vec3::new(theta.sin(), 0.0, -theta.cos())
    }

    #[test]
    fn critical_angle_examples() {
        let a = critical_angle(1.50, 1.38).unwrap().to_degrees();
        assert!((a - 66.93).abs() < 5e-3, "{a}");
        assert!((critical_angle(1.4, 1.4).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let b = critical_angle(1.49, 1.00).unwrap().to_degrees();
        assert!((b - 42.16).abs() < 5e-3, "{b}");
        assert!(critical_angle(1.0, 1.49).is_err());
    }

    #[test]
    fn refract_examples() {
        let n = Vec3::Z;
        match refract(-Vec3::Z, n, 1.49, 1.0).unwrap() {
            Refraction::Transmitted(t) => assert!((t - (-Vec3::Z)).norm() < 1e-15),
            _ => panic!(),
        }
        let d = in_plane(30f64.to_radians());
        match refract(d, n, 1.49, 1.0).unwrap() {
            Refraction::Transmitted(t) => {
                let theta2 = t.x.atan2(-t.z).to_degrees();
                let expected = (1.49 * 0.5f64).asin().to_degrees();
                assert!((theta2 - expected).abs() < 1e-10);
                assert!((theta2 - 48.16).abs() < 5e-3, "{theta2}");
            }
            _ => panic!(),
        }
        let d = in_plane(50f64.to_radians());
        assert_eq!(refract(d, n, 1.49, 1.0).unwrap(), Refraction::TotalInternalReflection);
        assert!(refract(d * 2.0, n, 1.49, 1.0).is_err());
    }

    #[test]
    fn reflect_examples() {
        let n = Vec3::Z;
        assert_eq!(reflect(-Vec3::Z, n), Vec3::Z);
        assert_eq!(reflect(Vec3::X, n), Vec3::X);
        let d = Vec3::new(1.0, 0.0, -1.0).normalized();
        let r = reflect(d, n);
        assert!((d.dot(r)).abs() < 1e-15, "90° deviation");
    }

    #[test]
    fn fresnel_examples() {
        let theta_c = critical_angle(1.49, 1.0).unwrap();
        assert_eq!(fresnel_reflectance(theta_c + 1e-6, 1.49, 1.0), 1.0);
        assert_eq!(fresnel_reflectance(theta_c, 1.49, 1.0), 1.0);
        let r0 = fresnel_reflectance(0.0, 1.49, 1.0);
        assert!((r0 - (0.49f64 / 2.49).powi(2)).abs() < 1e-15);
        assert!((r0 - 0.0387).abs() < 1e-4);
        assert_eq!(fresnel_reflectance(0.7, 1.3, 1.3), 0.0);
    }

    #[test]
    fn fresnel_continuous_up_to_critical_angle() {
        let theta_c = critical_angle(1.49, 1.0).unwrap();
        let near = fresnel_reflectance(theta_c - 1e-10, 1.49, 1.0);
        assert!(near > 0.999, "{near}");
        let mut prev = 0.0;
        for i in 0..=100_000 {
            let r = fresnel_reflectance(theta_c * i as f64 / 100_000.0, 1.49, 1.0);
            assert!((0.0..=1.0).contains(&r));
            // the unpolarized average has a shallow dip near Brewster, never a jump
            assert!((r - prev).abs() < 0.1 || i == 0);
            prev = r;
        }
    }
}
