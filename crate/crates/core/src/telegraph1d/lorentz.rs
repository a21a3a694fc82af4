use crate::error::{Error, Result};
use crate::velocity::VelocityProfile;

/// `B = (lambda1 - lambda2) / (lambda1 + lambda2)`.
pub fn lorentz_coefficient(lambda1: f64, lambda2: f64) -> Result<f64> {
    let total = lambda1 + lambda2;
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Domain(format!(
            "lambda1 + lambda2 must be positive, got {total}"
        )));
    }
    Ok((lambda1 - lambda2) / total)
}

/// Maps `(x, t)` to `(Phi(x) + B t, B Phi(x) + t)`, which turns the
/// telegraph equation with drift into the classical one.
pub fn lorentz_transform(
    lambda1: f64,
    lambda2: f64,
    profile: &VelocityProfile,
    x: f64,
    t: f64,
) -> Result<(f64, f64)> {
    let b = lorentz_coefficient(lambda1, lambda2)?;
    let y = profile.phi(x)?;
    Ok((y + b * t, b * y + t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_values() {
        assert_eq!(lorentz_coefficient(3.0, 1.0).unwrap(), 0.5);
        assert_eq!(lorentz_coefficient(2.0, 2.0).unwrap(), 0.0);
        assert!(lorentz_coefficient(0.0, 0.0).is_err());
    }

    #[test]
    fn equal_rates_give_identity() {
        let p = VelocityProfile::power(0.5, 1.0).unwrap();
        let (xp, tp) = lorentz_transform(1.5, 1.5, &p, 0.3, 0.7).unwrap();
        assert_eq!(xp, p.phi(0.3).unwrap());
        assert_eq!(tp, 0.7);
    }

    #[test]
    fn preserves_interval() {
        // t'^2 - x'^2 = (1 - B^2)(t^2 - y^2)
        let p = VelocityProfile::unit();
        let b: f64 = lorentz_coefficient(3.0, 1.0).unwrap();
        let (x, t) = (0.4, 1.3);
        let (xp, tp) = lorentz_transform(3.0, 1.0, &p, x, t).unwrap();
        let lhs = tp * tp - xp * xp;
        assert!((lhs - (1.0 - b * b) * (t * t - x * x)).abs() < 1e-14);
    }
}
