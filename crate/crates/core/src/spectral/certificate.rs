use num_complex::Complex64;

use super::{discriminant, eigenvalues_2x2, is_conjugate_pair, ComplexPair};
use crate::methods::{scalar_coefficients, MethodSpec, TwoStepCoefficients};

/// Spectrum of one companion block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateSpectrum {
    /// Eigenvalue of `W` this block belongs to.
    pub lambda_w: f64,
    pub coeffs: TwoStepCoefficients,
    pub eigenpair: ComplexPair,
    pub conjugate_pair: bool,
    /// `max |λᴹ|` for the block.
    pub rate: f64,
}

/// Per-coordinate spectral record for a method on a given spectrum, with
/// the overall verdict: the three-point function
/// `‖x_{k−1}−x*‖² − ⟨x_k−x*, x_{k−2}−x*⟩` is guaranteed to decrease
/// monotonically iff every block has a conjugate eigenvalue pair and the
/// spectral radius is below one.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCertificate {
    pub method: MethodSpec,
    pub tolerance: f64,
    pub per_coordinate: Vec<CoordinateSpectrum>,
    pub spectral_radius: f64,
    pub eligible: bool,
}

impl SpectralCertificate {
    pub fn conjugate_count(&self) -> usize {
        self.per_coordinate
            .iter()
            .filter(|c| c.conjugate_pair)
            .count()
    }

    /// Spread `max rate − min rate` across blocks.
    pub fn modulus_spread(&self) -> f64 {
        let (lo, hi) = self
            .per_coordinate
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                (lo.min(c.rate), hi.max(c.rate))
            });
        if lo.is_finite() {
            hi - lo
        } else {
            0.0
        }
    }

    /// All `2d` eigenvalues of the iteration matrix.
    pub fn spectrum(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.per_coordinate
            .iter()
            .flat_map(|c| [c.eigenpair.lambda1, c.eigenpair.lambda2])
    }

    /// Largest per-step factor `−b_i` of the per-coordinate terms; equals
    /// `spectral_radius²` when eligible.
    pub fn max_contraction(&self) -> f64 {
        self.per_coordinate
            .iter()
            .map(|c| -c.coeffs.b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Builds the certificate for `spec` over the eigenvalues `eigvals` of `W`.
///
/// Blocks whose discriminant is positive but within `tol` of zero are
/// treated as repeated roots `a/2`, so their reported modulus satisfies
/// `rate² = −b` up to the same tolerance.
pub fn analyze(spec: &MethodSpec, eigvals: &[f64], tol: f64) -> SpectralCertificate {
    let per_coordinate: Vec<CoordinateSpectrum> = eigvals
        .iter()
        .map(|&lambda_w| {
            let coeffs = scalar_coefficients(spec, lambda_w);
            let conjugate_pair = is_conjugate_pair(&coeffs, tol);
            let eigenpair = if conjugate_pair && discriminant(&coeffs) > 0.0 {
                let root = Complex64::new(0.5 * coeffs.a, 0.0);
                ComplexPair {
                    lambda1: root,
                    lambda2: root,
                }
            } else {
                eigenvalues_2x2(&coeffs)
            };
            CoordinateSpectrum {
                lambda_w,
                coeffs,
                eigenpair,
                conjugate_pair,
                rate: eigenpair.radius(),
            }
        })
        .collect();
    let spectral_radius = per_coordinate.iter().map(|c| c.rate).fold(0.0, f64::max);
    let eligible = per_coordinate.iter().all(|c| c.conjugate_pair) && spectral_radius < 1.0;
    SpectralCertificate {
        method: *spec,
        tolerance: tol,
        per_coordinate,
        spectral_radius,
        eligible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::{optimal_hyperparams, MethodKind};
    use crate::problems::equally_spaced_spectrum;
    use crate::rng;
    use crate::spectral::{companion_matrix, DEFAULT_CONJUGATE_TOL};
    use nalgebra::Vector2;
    use rand::Rng;

    const TOL: f64 = DEFAULT_CONJUGATE_TOL;

    #[test]
    fn heavy_ball_optimal_is_eligible() {
        let spec = optimal_hyperparams(MethodKind::HeavyBall, 1.0, 4.0).unwrap();
        let cert = analyze(&spec, &[1.0, 2.5, 4.0], TOL);
        assert!(cert.eligible);
        assert!((cert.spectral_radius - 1.0 / 3.0).abs() < 1e-12);
        for c in &cert.per_coordinate {
            assert!((c.rate - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triple_momentum_optimal_is_not() {
        let spec = optimal_hyperparams(MethodKind::TripleMomentum, 1.0, 4.0).unwrap();
        let cert = analyze(&spec, &[1.0, 2.5, 4.0], TOL);
        assert!(!cert.eligible);
        assert!(!cert.per_coordinate[2].conjugate_pair);
    }

    #[test]
    fn zero_eigenvalue_gives_unit_root() {
        let spec = crate::methods::MethodSpec::heavy_ball(0.1, 0.6).unwrap();
        let cert = analyze(&spec, &[0.0, 1.0, 2.0], TOL);
        let zero = &cert.per_coordinate[0];
        assert!(!zero.conjugate_pair);
        assert!((zero.eigenpair.lambda1.re - 1.0).abs() < 1e-15);
        assert!((zero.eigenpair.lambda2.re - 0.6).abs() < 1e-15);
        assert!((zero.rate - 1.0).abs() < 1e-15);
        assert!(!cert.eligible);
    }

    #[test]
    fn eligible_rates_square_to_minus_b() {
        let mut rng = rng::seeded(23, 0);
        for kind in [
            MethodKind::HeavyBall,
            MethodKind::Nesterov,
            MethodKind::NesterovGaussSeidel,
        ] {
            for _ in 0..20 {
                let mu = rng.random_range(0.01..10.0);
                let l = mu * rng.random_range(1.5..1e4);
                let spec = optimal_hyperparams(kind, mu, l).unwrap();
                let cert = analyze(&spec, equally_spaced_spectrum(100, mu, l).as_slice(), TOL);
                assert!(cert.eligible, "{spec}");
                for c in &cert.per_coordinate {
                    assert!(
                        (c.rate * c.rate + c.coeffs.b).abs() <= 1e-12,
                        "{spec} {c:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn optimal_radii_match_closed_forms() {
        let (mu, l): (f64, f64) = (0.7, 310.0);
        let grid = equally_spaced_spectrum(100, mu, l);
        let (sl, sm) = (l.sqrt(), mu.sqrt());
        let expected = [
            (MethodKind::HeavyBall, (sl - sm) / (sl + sm)),
            (MethodKind::Nesterov, 1.0 - (mu / l).sqrt()),
            (
                MethodKind::NesterovGaussSeidel,
                (l - mu) / (l + mu + 2.0 * (mu * l).sqrt()),
            ),
        ];
        for (kind, rho) in expected {
            let cert = analyze(
                &optimal_hyperparams(kind, mu, l).unwrap(),
                grid.as_slice(),
                TOL,
            );
            assert!(
                (cert.spectral_radius - rho).abs() <= 1e-10,
                "{kind}: {} vs {rho}",
                cert.spectral_radius
            );
        }
    }

    /// Growth rate of `‖Mᵏz₀‖^{1/k}` computed with per-step renormalization.
    fn power_rate(c: &TwoStepCoefficients, steps: usize, z0: Vector2<f64>) -> f64 {
        let m = companion_matrix(c);
        let mut z = z0 / z0.norm();
        let mut log_norm = 0.0;
        for _ in 0..steps {
            z = m * z;
            let n = z.norm();
            if n == 0.0 {
                return 0.0;
            }
            log_norm += n.ln();
            z /= n;
        }
        (log_norm / steps as f64).exp()
    }

    #[test]
    fn power_iteration_agrees_with_radius() {
        let mut rng = rng::seeded(29, 0);
        let mut checked = 0;
        while checked < 200 {
            let a: f64 = rng.random_range(-1.98..1.98);
            let b = -a * a / 4.0 - rng.random_range(0.0..1.0);
            let c = TwoStepCoefficients::new(a, b);
            let rho = eigenvalues_2x2(&c).radius();
            if rho >= 0.99 {
                continue;
            }
            let z0 = Vector2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let est = power_rate(&c, 2000, z0);
            assert!((est - rho).abs() <= 1e-2, "{c:?}: {est} vs {rho}");
            checked += 1;
        }
    }
}
