use std::f64::consts::PI;

use rand::Rng;

use super::vec3::Vec3;

/// Uniform direction on the spherical cap of `half_angle_deg` around +z.
pub fn sample_cone_direction<R: Rng + ?Sized>(rng: &mut R, half_angle_deg: f64) -> Vec3 {
    let cos_max = half_angle_deg.to_radians().cos();
    let cos_t = 1.0 - rng.random::<f64>() * (1.0 - cos_max);
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t)
}

/// Uniform direction on the unit sphere.
pub fn sample_isotropic<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let cos_t = 2.0 * rng.random::<f64>() - 1.0;
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tiny_cone_is_axial() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = sample_cone_direction(&mut rng, 1e-9);
        assert!((d - Vec3::Z).norm() < 1e-10);
    }

    #[test]
    fn cap_mean_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let alpha = 30f64.to_radians();
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..n {
            let d = sample_cone_direction(&mut rng, 30.0);
            assert!(d.z >= alpha.cos() - 1e-12);
            assert!(d.is_unit(1e-12));
            sum += d.z;
            sum2 += d.z * d.z;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        let expected = (1.0 + alpha.cos()) / 2.0;
        assert!((expected - 0.933).abs() < 1e-3);
        assert!((mean - expected).abs() < 3.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn isotropic_mean_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut s = Vec3::ZERO;
        for _ in 0..n {
            s += sample_isotropic(&mut rng);
        }
        let m = s * (1.0 / n as f64);
        // each component has variance 1/3
        let sigma = (1.0 / 3.0 / n as f64).sqrt();
        assert!(m.x.abs() < 4.0 * sigma && m.y.abs() < 4.0 * sigma && m.z.abs() < 4.0 * sigma);
    }
}
