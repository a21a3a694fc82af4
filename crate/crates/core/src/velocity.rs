//! Space-varying speed fields `c(x) > 0` and the transform
//! `Phi(x) = int_0^x dw / c(w)` that turns motion at speed `c(x)` into
//! motion at unit speed.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::config::parse_spec;
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadSettings};

type SpeedFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied speed field evaluated by quadrature.
#[derive(Clone)]
pub struct CustomProfile {
    name: String,
    speed: SpeedFn,
    even: bool,
    /// Known range of Phi, when available; (-inf, inf) otherwise.
    range: (f64, f64),
    quad: QuadSettings,
}

impl CustomProfile {
    /// Builds a custom profile after checking `c > 0` on `check_grid`.
    pub fn new<F>(name: &str, speed: F, even: bool, check_grid: &[f64]) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        for &x in check_grid {
            let c = speed(x);
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Domain(format!(
                    "custom profile `{name}` has c({x}) = {c}, expected a positive finite speed"
                )));
            }
        }
        Ok(Self {
            name: name.to_string(),
            speed: Arc::new(speed),
            even,
            range: (f64::NEG_INFINITY, f64::INFINITY),
            quad: QuadSettings::with_abs_tol(1e-10),
        })
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.range = (lo, hi);
        self
    }

    pub fn with_quadrature(mut self, quad: QuadSettings) -> Self {
        self.quad = quad;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("name", &self.name)
            .field("even", &self.even)
            .field("range", &self.range)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum ProfileKind {
    /// `c(x) = c`.
    Constant { c: f64 },
    /// `c(x) = |x|^gamma / scale`.
    Power { gamma_exp: f64, scale: f64 },
    Custom(CustomProfile),
}

/// Light cone `{x : -t < Phi(x) < t}` as an interval; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cone {
    pub lo: f64,
    pub hi: f64,
}

impl Cone {
    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }
}

#[derive(Debug, Clone)]
pub struct VelocityProfile {
    kind: ProfileKind,
}

const GRID_CHECK: [f64; 9] = [-100.0, -10.0, -1.0, -0.1, 0.0, 0.1, 1.0, 10.0, 100.0];

impl VelocityProfile {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("constant speed must be positive, got {c}")));
        }
        Ok(Self {
            kind: ProfileKind::Constant { c },
        })
    }

    /// Unit speed; the transform is the identity.
    pub fn unit() -> Self {
        Self {
            kind: ProfileKind::Constant { c: 1.0 },
        }
    }

    /// `c(x) = |x|^gamma / scale`. Exponents `gamma >= 1` are accepted but
    /// give an infinite cone: Phi diverges away from the origin.
    pub fn power(gamma_exp: f64, scale: f64) -> Result<Self> {
        if !gamma_exp.is_finite() {
            return Err(Error::Domain(format!("power exponent must be finite, got {gamma_exp}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!("power scale must be positive, got {scale}")));
        }
        Ok(Self {
            kind: ProfileKind::Power { gamma_exp, scale },
        })
    }

    pub fn custom(profile: CustomProfile) -> Self {
        Self {
            kind: ProfileKind::Custom(profile),
        }
    }

    /// Named built-in custom profiles:
    /// `one_plus_x2` (c = 1 + x^2), `sqrt_one_plus_x2` (c = sqrt(1 + x^2)),
    /// `cosh` (c = cosh x).
    pub fn builtin(name: &str) -> Result<Self> {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let p = match name {
            "one_plus_x2" => CustomProfile::new(name, |x| 1.0 + x * x, true, &GRID_CHECK)?
                .with_range(-half_pi, half_pi),
            "sqrt_one_plus_x2" => {
                CustomProfile::new(name, |x| (1.0 + x * x).sqrt(), true, &GRID_CHECK)?
            }
            "cosh" => CustomProfile::new(name, f64::cosh, true, &[-10.0, -1.0, 0.0, 1.0, 10.0])?
                .with_range(-half_pi, half_pi),
            other => return Err(Error::Parse(format!("unknown built-in profile `{other}`"))),
        };
        Ok(Self::custom(p))
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// Speed `c(x)`.
    pub fn speed(&self, x: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant { c } => *c,
            ProfileKind::Power { gamma_exp, scale } => x.abs().powf(*gamma_exp) / scale,
            ProfileKind::Custom(p) => (p.speed)(x),
        }
    }

    pub fn is_even(&self) -> bool {
        match &self.kind {
            ProfileKind::Custom(p) => p.even,
            _ => true,
        }
    }

    /// True when Phi is finite on the whole line.
    pub fn has_finite_transform(&self) -> bool {
        !matches!(self.kind, ProfileKind::Power { gamma_exp, .. } if gamma_exp >= 1.0)
    }

    /// Range of Phi over the real line.
    pub fn phi_range(&self) -> (f64, f64) {
        match &self.kind {
            ProfileKind::Custom(p) => p.range,
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `Phi(x) = int_0^x dw / c(w)`.
    pub fn phi(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("phi of non-finite {x}")));
        }
        match &self.kind {
            ProfileKind::Constant { c } => Ok(x / c),
            ProfileKind::Power { gamma_exp, scale } => {
                if x == 0.0 {
                    return Ok(0.0);
                }
                if *gamma_exp >= 1.0 {
                    return Err(Error::Divergence(format!(
                        "int_0^x |w|^-{gamma_exp} dw diverges at the origin"
                    )));
                }
                let e = 1.0 - gamma_exp;
                Ok((scale * x.abs().powf(e) / e).copysign(x))
            }
            ProfileKind::Custom(p) => {
                let speed = &p.speed;
                integrate(|w| 1.0 / speed(w), 0.0, x, p.quad)
                    .map_err(|e| Error::Divergence(format!("phi({x}) for `{}`: {e}", p.name)))
            }
        }
    }

    /// Inverse transform: the `x` with `Phi(x) = y`.
    pub fn phi_inverse(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.phi_range();
        if !(y > lo && y < hi) || !y.is_finite() {
            return Err(Error::Range { value: y, lo, hi });
        }
        match &self.kind {
            ProfileKind::Constant { c } => Ok(c * y),
            ProfileKind::Power { gamma_exp, scale } => {
                if y == 0.0 {
                    return Ok(0.0);
                }
                if *gamma_exp >= 1.0 {
                    return Err(Error::Range { value: y, lo: 0.0, hi: 0.0 });
                }
                let e = 1.0 - gamma_exp;
                Ok((e * y.abs() / scale).powf(1.0 / e).copysign(y))
            }
            ProfileKind::Custom(_) => self.invert_numerically(y),
        }
    }

    fn invert_numerically(&self, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Ok(0.0);
        }
        let s = y.signum();
        let target = y.abs();
        let g = |x: f64| -> Result<f64> { Ok(s * self.phi(s * x)? - target) };
        let mut a = 0.0;
        let mut ga = -target;
        let mut b = 1.0;
        let mut gb = g(b)?;
        while gb < 0.0 {
            a = b;
            ga = gb;
            b *= 2.0;
            if b > 1e15 {
                let (lo, hi) = self.phi_range();
                return Err(Error::Range { value: y, lo, hi });
            }
            gb = g(b)?;
        }
        // Illinois-modified regula falsi on a monotone bracket.
        let mut side = 0i8;
        for _ in 0..200 {
            if b - a <= 1e-12 * b.max(1.0) {
                break;
            }
            let mut c = (a * gb - b * ga) / (gb - ga);
            if !(c > a && c < b) {
                c = 0.5 * (a + b);
            }
            let gc = g(c)?;
            if gc == 0.0 {
                return Ok(s * c);
            }
            if gc < 0.0 {
                a = c;
                ga = gc;
                if side == -1 {
                    gb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                gb = gc;
                if side == 1 {
                    ga *= 0.5;
                }
                side = 1;
            }
        }
        Ok(s * 0.5 * (a + b))
    }

    /// `(Phi^{-1}(-t), Phi^{-1}(t))`; sides that leave the range of Phi are infinite.
    pub fn cone_endpoints(&self, t: f64) -> Result<Cone> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("time must be positive, got {t}")));
        }
        if !self.has_finite_transform() {
            return Ok(Cone {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            });
        }
        let (rlo, rhi) = self.phi_range();
        let lo = if -t > rlo {
            self.phi_inverse(-t)?
        } else {
            f64::NEG_INFINITY
        };
        let hi = if t < rhi {
            self.phi_inverse(t)?
        } else {
            f64::INFINITY
        };
        Ok(Cone { lo, hi })
    }
}

impl fmt::Display for VelocityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ProfileKind::Constant { c } => write!(f, "constant:c={c}"),
            ProfileKind::Power { gamma_exp, scale } => {
                write!(f, "power:gamma={gamma_exp},scale={scale}")
            }
            ProfileKind::Custom(p) => write!(f, "custom:name={}", p.name),
        }
    }
}

impl FromStr for VelocityProfile {
    type Err = Error;

    /// `constant:c=1.0`, `power:gamma=0.5,scale=1.0`, `custom:name=one_plus_x2`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = parse_spec(s)?;
        match kind.as_str() {
            "constant" => Self::constant(params.number("c")?),
            "power" => Self::power(params.number("gamma")?, params.number_or("scale", 1.0)?),
            "custom" => Self::builtin(params.text("name")?),
            other => Err(Error::Parse(format!("unknown profile kind `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_tanh_sinh;
    use proptest::prelude::*;

    #[test]
    fn phi_examples() {
        assert_eq!(VelocityProfile::unit().phi(0.7).unwrap(), 0.7);
        let p = VelocityProfile::power(0.5, 1.0).unwrap();
        assert!((p.phi(4.0).unwrap() - 4.0).abs() < 1e-15);
        let q = VelocityProfile::builtin("one_plus_x2").unwrap();
        assert!((q.phi(1.0).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn phi_inverse_examples() {
        let c2 = VelocityProfile::constant(2.0).unwrap();
        assert_eq!(c2.phi_inverse(3.0).unwrap(), 6.0);
        let p = VelocityProfile::power(0.5, 1.0).unwrap();
        assert!((p.phi_inverse(4.0).unwrap() - 4.0).abs() < 1e-14);
        let profiles = [
            VelocityProfile::constant(0.3).unwrap(),
            VelocityProfile::power(0.5, 1.0).unwrap(),
            VelocityProfile::power(-0.5, 2.0).unwrap(),
            VelocityProfile::power(2.0 / 3.0, 1.0 / 3.0).unwrap(),
            VelocityProfile::builtin("sqrt_one_plus_x2").unwrap(),
            VelocityProfile::builtin("one_plus_x2").unwrap(),
        ];
        for p in &profiles {
            for &x in &[-3.0, -0.1, 0.0, 0.1, 3.0] {
                let back = p.phi_inverse(p.phi(x).unwrap()).unwrap();
                assert!((back - x).abs() < 1e-9, "{p}: {x} -> {back}");
            }
        }
    }

    #[test]
    fn custom_quadrature_matches_closed_forms() {
        let p = VelocityProfile::builtin("sqrt_one_plus_x2").unwrap();
        let c = VelocityProfile::builtin("cosh").unwrap();
        for &x in &[-5.0, -0.3, 0.8, 7.0] {
            assert!((p.phi(x).unwrap() - f64::asinh(x)).abs() < 1e-10);
            let gd = 2.0 * (0.5 * x).tanh().atan();
            assert!((c.phi(x).unwrap() - gd).abs() < 1e-10);
        }
    }

    #[test]
    fn power_closed_form_matches_quadrature() {
        for &(g, s) in &[(0.5, 1.0), (-0.5, 0.7), (2.0 / 3.0, 1.0 / 3.0), (0.25, 3.0)] {
            let p = VelocityProfile::power(g, s).unwrap();
            for &x in &[0.05, 0.5, 2.0, 6.0] {
                let q = integrate_tanh_sinh(
                    |w, _| 1.0 / p.speed(w),
                    0.0,
                    x,
                    QuadSettings::with_abs_tol(1e-11),
                )
                .unwrap();
                assert!((q - p.phi(x).unwrap()).abs() < 1e-8, "gamma {g}, x {x}");
            }
        }
    }

    #[test]
    fn cone_endpoints_examples() {
        let p = VelocityProfile::power(0.5, 1.0).unwrap();
        let cone = p.cone_endpoints(2.0).unwrap();
        assert!((cone.hi - 1.0).abs() < 1e-15 && (cone.lo + 1.0).abs() < 1e-15);
        let inf = VelocityProfile::power(1.0, 1.0).unwrap().cone_endpoints(1.0).unwrap();
        assert!(!inf.is_bounded());
        let c = VelocityProfile::constant(1.5).unwrap().cone_endpoints(2.0).unwrap();
        assert_eq!((c.lo, c.hi), (-3.0, 3.0));
        // Phi bounded by pi/2: the particle escapes to infinity in finite time
        let esc = VelocityProfile::builtin("one_plus_x2").unwrap().cone_endpoints(2.0).unwrap();
        assert!(!esc.is_bounded());
    }

    #[test]
    fn errors() {
        assert!(VelocityProfile::constant(0.0).is_err());
        assert!(VelocityProfile::power(0.5, -1.0).is_err());
        let p = VelocityProfile::power(1.2, 1.0).unwrap();
        assert!(matches!(p.phi(1.0), Err(Error::Divergence(_))));
        let q = VelocityProfile::builtin("one_plus_x2").unwrap();
        assert!(matches!(q.phi_inverse(2.0), Err(Error::Range { .. })));
        assert!(CustomProfile::new("bad", |x| x, true, &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn parse_and_display() {
        let p: VelocityProfile = "power:gamma=0.5,scale=2".parse().unwrap();
        assert_eq!(p.to_string(), "power:gamma=0.5,scale=2");
        let c: VelocityProfile = "constant:c=1.0".parse().unwrap();
        assert_eq!(c.speed(3.0), 1.0);
        assert!("custom:name=nope".parse::<VelocityProfile>().is_err());
        assert!("banana:c=1".parse::<VelocityProfile>().is_err());
    }

    proptest! {
        #[test]
        fn phi_is_monotone_and_odd(g in -0.9f64..0.95, s in 0.1f64..5.0, a in -50.0f64..50.0, b in -50.0f64..50.0) {
            let p = VelocityProfile::power(g, s).unwrap();
            let (x1, x2) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(x2 - x1 > 1e-9);
            prop_assert!(p.phi(x1).unwrap() < p.phi(x2).unwrap());
            prop_assert!((p.phi(-a).unwrap() + p.phi(a).unwrap()).abs() <= 1e-10 * p.phi(a).unwrap().abs().max(1.0));
        }

        #[test]
        fn phi_after_inverse_is_identity(g in -0.9f64..0.9, s in 0.1f64..5.0, y in -20.0f64..20.0) {
            let p = VelocityProfile::power(g, s).unwrap();
            let back = p.phi(p.phi_inverse(y).unwrap()).unwrap();
            prop_assert!((back - y).abs() <= 1e-9 * y.abs().max(1.0));
        }
    }
}
