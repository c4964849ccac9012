//! Square roots with the cut on one imaginary half axis.

use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

const ROT_M: C64 = C64 { re: FRAC_1_SQRT_2, im: -FRAC_1_SQRT_2 };
const ROT_P: C64 = C64 { re: FRAC_1_SQRT_2, im: FRAC_1_SQRT_2 };

/// Root with the cut on `i R+`, normalised so that `sqrt_minus(-1) = -i`.
///
/// Points on the cut take the value reached from `Re z > 0`.
pub fn sqrt_minus(z: C64) -> C64 {
    if z.im > 0.0 && z.re == 0.0 {
        return ROT_P * z.im.sqrt();
    }
    // rotate the cut onto the negative real axis, take the principal root, rotate back
    let w = C64::new(-z.im, z.re + 0.0);
    ROT_M * w.sqrt()
}

/// Root with the cut on `i R-`, normalised so that `sqrt_plus(-1) = i`.
pub fn sqrt_plus(z: C64) -> C64 {
    sqrt_minus(z.conj()).conj()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn reference_values() {
        assert!(close(sqrt_minus(C64::new(1.0, 0.0)), C64::new(1.0, 0.0), 1e-15));
        assert!(close(sqrt_minus(C64::new(-1.0, 0.0)), C64::new(0.0, -1.0), 1e-15));
        assert!(close(sqrt_minus(C64::new(0.0, -1.0)), C64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2), 1e-15));
        assert!(close(sqrt_plus(C64::new(1.0, 0.0)), C64::new(1.0, 0.0), 1e-15));
        assert!(close(sqrt_plus(C64::new(-1.0, 0.0)), C64::new(0.0, 1.0), 1e-15));
        assert!(close(sqrt_plus(C64::new(-4.0, 0.0)), C64::new(0.0, 2.0), 1e-15));
    }

    #[test]
    fn negative_zero_imaginary_part_is_harmless() {
        assert!(close(sqrt_minus(C64::new(-1.0, -0.0)), C64::new(0.0, -1.0), 1e-15));
        assert!(close(sqrt_plus(C64::new(-1.0, -0.0)), C64::new(0.0, 1.0), 1e-15));
    }

    #[test]
    fn on_cut_limit_from_right_half_plane() {
        let on = sqrt_minus(C64::new(0.0, 2.0));
        let near = sqrt_minus(C64::new(1e-12, 2.0));
        assert!(close(on, near, 1e-10));
        let on = sqrt_plus(C64::new(0.0, -2.0));
        let near = sqrt_plus(C64::new(1e-12, -2.0));
        assert!(close(on, near, 1e-10));
    }

    #[test]
    fn continuous_across_positive_reals_and_negative_reals() {
        for x in [0.3, 1.0, 7.0] {
            let a = sqrt_minus(C64::new(-x, 1e-13));
            let b = sqrt_minus(C64::new(-x, -1e-13));
            assert!(close(a, b, 1e-10), "{a} {b}");
        }
    }

    fn off_cut() -> impl Strategy<Value = C64> {
        (-1e3f64..1e3, -1e3f64..1e3)
            .prop_filter("off cut", |(re, _)| re.abs() > 1e-9)
            .prop_map(|(re, im)| C64::new(re, im))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn squares_back(z in off_cut()) {
            let a = sqrt_minus(z);
            let b = sqrt_plus(z);
            prop_assert!((a * a - z).norm() <= 1e-14 * z.norm().max(1e-300) * 4.0);
            prop_assert!((b * b - z).norm() <= 1e-14 * z.norm().max(1e-300) * 4.0);
        }

        #[test]
        fn stable_mode_decays(xi in -50.0f64..50.0, gamma in 1e-6f64..1e3, delta in -1e3f64..1e3) {
            let z = C64::new(xi * xi + delta, -gamma);
            prop_assert!(sqrt_minus(z).re > 0.0);
        }

        #[test]
        fn right_half_before_cut(re in 0.0f64..1e3, im in -1e3f64..=0.0) {
            prop_assert!(sqrt_minus(C64::new(re, im)).re >= 0.0);
        }
    }
}
