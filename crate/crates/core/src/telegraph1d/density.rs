use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_tanh_sinh, QuadSettings};
use crate::special::{beta, bessel_i0e, bessel_i1e_over_x};
use crate::velocity::VelocityProfile;

/// A point mass of a one-dimensional law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub x: f64,
    #[serde(rename = "w")]
    pub weight: f64,
}

type TransformedDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A law on the line: atoms plus an absolutely continuous part supported on
/// `{x : |Phi(x)| < reach}`.
///
/// The continuous part is stored in the transformed coordinate `y = Phi(x)`;
/// in `x` it reads `q(Phi(x)) / c(x)`.
#[derive(Clone)]
pub struct DensityModel1D {
    atoms: Vec<Atom>,
    support: (f64, f64),
    time: f64,
    profile: VelocityProfile,
    reach: f64,
    q: TransformedDensity,
    /// For even laws that diverge at the edge: `q` as a function of the
    /// distance `reach - |y|`, evaluated without cancellation.
    edge: Option<TransformedDensity>,
}

impl fmt::Debug for DensityModel1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityModel1D")
            .field("atoms", &self.atoms)
            .field("support", &self.support)
            .field("time", &self.time)
            .field("profile", &self.profile)
            .field("reach", &self.reach)
            .field("edge_singular", &self.edge.is_some())
            .finish()
    }
}

impl DensityModel1D {
    /// Builds a model from its density in transformed coordinates. `q` is only
    /// evaluated on `|y| < reach`; atoms are given in transformed coordinates
    /// and mapped back through `Phi^{-1}`.
    pub fn from_transformed<Q>(
        profile: &VelocityProfile,
        reach: f64,
        time: f64,
        atoms_y: &[(f64, f64)],
        q: Q,
    ) -> Result<Self>
    where
        Q: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(reach > 0.0 && reach.is_finite()) {
            return Err(Error::Domain(format!("support half-width must be positive, got {reach}")));
        }
        if !profile.has_finite_transform() {
            return Err(Error::Divergence(format!("{profile} has an infinite cone")));
        }
        let lo = profile.phi_inverse(-reach)?;
        let hi = profile.phi_inverse(reach)?;
        let atoms = atoms_y
            .iter()
            .map(|&(y, w)| Ok(Atom { x: profile.phi_inverse(y)?, weight: w }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            atoms,
            support: (lo, hi),
            time,
            profile: profile.clone(),
            reach,
            q: Arc::new(q),
            edge: None,
        })
    }

    /// Supplies the edge form of an even law whose density is singular at
    /// the cone edge; masses are then integrated in the distance to the edge.
    pub fn with_edge_form<E>(mut self, edge: E) -> Self
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.edge = Some(Arc::new(edge));
        self
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn profile(&self) -> &VelocityProfile {
        &self.profile
    }

    /// Half-width of the support in transformed coordinates.
    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// True when the continuous part diverges at the edge of the support.
    pub fn is_edge_singular(&self) -> bool {
        self.edge.is_some()
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Continuous part in transformed coordinates.
    pub fn transformed_density(&self, y: f64) -> f64 {
        if y.abs() < self.reach {
            (self.q)(y)
        } else {
            0.0
        }
    }

    /// Continuous part at `x`.
    pub fn ac_density(&self, x: f64) -> f64 {
        match self.profile.phi(x) {
            Ok(y) if y.abs() < self.reach => (self.q)(y) / self.profile.speed(x),
            _ => 0.0,
        }
    }

    /// Mass of `q` over distances `d0..d1` from one edge.
    fn edge_mass(edge: &TransformedDensity, d0: f64, d1: f64, quad: QuadSettings) -> Result<f64> {
        integrate_tanh_sinh(|d, _| edge(d), d0, d1, quad)
    }

    /// Mass of the continuous part on `(-reach, y)` in transformed coordinates.
    fn ac_mass_below(&self, y: f64, quad: QuadSettings) -> Result<f64> {
        let r = self.reach;
        if y <= -r {
            return Ok(0.0);
        }
        let y = y.min(r);
        match &self.edge {
            Some(edge) if y <= 0.0 => Self::edge_mass(edge, 0.0, r + y, quad),
            Some(edge) => {
                let half = Self::edge_mass(edge, 0.0, r, quad)?;
                Ok(2.0 * half - Self::edge_mass(edge, 0.0, r - y, quad)?)
            }
            None => integrate(|v| self.transformed_density(v), -r, y, quad),
        }
    }

    /// Mass of the continuous part between `u0 <= u1`, where `y = reach sin u`.
    fn ac_mass_arc(&self, u0: f64, u1: f64, quad: QuadSettings) -> Result<f64> {
        let r = self.reach;
        match &self.edge {
            Some(edge) => {
                if u0 < 0.0 && u1 > 0.0 {
                    return Ok(self.ac_mass_arc(u0, 0.0, quad)? + self.ac_mass_arc(0.0, u1, quad)?);
                }
                // distance to the nearer edge, 2 r sin^2((pi/2 - |u|) / 2)
                let dist = |u: f64| 2.0 * r * (0.5 * (FRAC_PI_2 - u.abs())).sin().powi(2);
                let (d0, d1) = (dist(u0), dist(u1));
                Self::edge_mass(edge, d0.min(d1), d0.max(d1), quad)
            }
            None => integrate(|u| self.transformed_density(r * u.sin()) * r * u.cos(), u0, u1, quad),
        }
    }

    /// Total mass of the continuous part.
    pub fn ac_mass(&self, quad: QuadSettings) -> Result<f64> {
        self.ac_mass_below(self.reach, quad)
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let y = self.profile.phi(x)?;
        let atoms: f64 = self.atoms.iter().filter(|a| a.x <= x).map(|a| a.weight).sum();
        Ok(atoms + self.ac_mass_below(y, QuadSettings::with_abs_tol(1e-11))?)
    }

    /// CDF tabulated on `cells` equal steps of `u = asin(y / reach)`, for
    /// evaluating many points.
    pub fn tabulate_cdf(&self, cells: usize) -> Result<TabulatedCdf> {
        let r = self.reach;
        let du = 2.0 * FRAC_PI_2 / cells as f64;
        let quad = QuadSettings::with_abs_tol(1e-13 / cells as f64);
        let mut cum = Vec::with_capacity(cells + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 0..cells {
            let a = -FRAC_PI_2 + i as f64 * du;
            let b = if i + 1 == cells { FRAC_PI_2 } else { a + du };
            acc += self.ac_mass_arc(a, b, quad)?;
            cum.push(acc);
        }
        Ok(TabulatedCdf {
            profile: self.profile.clone(),
            reach: r,
            cum,
            atoms: self.atoms.clone(),
        })
    }

    /// `n` evenly spaced `(x, pdf)` samples strictly inside the support.
    pub fn sample_grid(&self, n: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.support;
        (0..n)
            .map(|i| {
                let x = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
                (x, self.ac_density(x))
            })
            .collect()
    }
}

/// Piecewise-linear CDF in the arcsine-transformed coordinate.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    profile: VelocityProfile,
    reach: f64,
    cum: Vec<f64>,
    atoms: Vec<Atom>,
}

impl TabulatedCdf {
    fn ac_part(&self, x: f64) -> f64 {
        let y = match self.profile.phi(x) {
            Ok(y) => y,
            Err(_) => return if x > 0.0 { *self.cum.last().unwrap() } else { 0.0 },
        };
        let s = (y / self.reach).clamp(-1.0, 1.0);
        let cells = self.cum.len() - 1;
        let pos = (s.asin() + FRAC_PI_2) / (2.0 * FRAC_PI_2) * cells as f64;
        let i = (pos.floor() as usize).min(cells - 1);
        let frac = pos - i as f64;
        self.cum[i] + frac * (self.cum[i + 1] - self.cum[i])
    }

    /// Mass of the continuous part.
    pub fn ac_total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.x <= x).map(|a| a.weight).sum();
        atoms + self.ac_part(x)
    }

    pub fn cdf_left(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.x < x).map(|a| a.weight).sum();
        atoms + self.ac_part(x)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// CDF of the continuous part alone, renormalized to mass one.
    pub fn conditional_ac(&self) -> TabulatedCdf {
        let total = self.ac_total();
        TabulatedCdf {
            profile: self.profile.clone(),
            reach: self.reach,
            cum: self.cum.iter().map(|c| c / total).collect(),
            atoms: Vec::new(),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be positive, got {t}")))
    }
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

/// `sqrt(t^2 - y^2)`, clamped at 0 on the cone edge.
fn cone_depth(t: f64, y: f64) -> f64 {
    ((t - y) * (t + y)).max(0.0).sqrt()
}

/// Law of the symmetric telegraph process with constant switching rate.
pub fn density_symmetric(profile: &VelocityProfile, lambda: f64, t: f64) -> Result<DensityModel1D> {
    check_time(t)?;
    check_rate("lambda", lambda)?;
    let atom = 0.5 * (-lambda * t).exp();
    DensityModel1D::from_transformed(profile, t, t, &[(-t, atom), (t, atom)], move |y| {
        let z = cone_depth(t, y);
        // e^{-lambda t}/2 [lambda I0(lambda z) + d/dt I0(lambda z)] with
        // d/dt I0(lambda z) = lambda^2 t I1(lambda z) / (lambda z)
        let damp = (-lambda * (t - z)).exp();
        0.5 * damp * (lambda * bessel_i0e(lambda * z) + lambda * lambda * t * bessel_i1e_over_x(lambda * z))
    })
}

/// Law under the rate `lambda tanh(lambda t)`: atoms of weight
/// `1 / (2 cosh lambda t)` at the cone edge plus a continuous part.
pub fn density_tanh(profile: &VelocityProfile, lambda: f64, t: f64) -> Result<DensityModel1D> {
    check_time(t)?;
    check_rate("lambda", lambda)?;
    let atom = 0.5 / (lambda * t).cosh();
    let e2 = (-2.0 * lambda * t).exp();
    DensityModel1D::from_transformed(profile, t, t, &[(-t, atom), (t, atom)], move |y| {
        let z = cone_depth(t, y);
        // (1 / (2 cosh lambda t)) d/dt I0(lambda z), with 1/cosh = 2 e^{-lt} / (1 + e^{-2lt})
        let damp = (-lambda * (t - z)).exp();
        lambda * lambda * t * damp * bessel_i1e_over_x(lambda * z) / (1.0 + e2)
    })
}

/// Law under the rate `lambda coth(lambda t)`: purely continuous.
pub fn density_coth(profile: &VelocityProfile, lambda: f64, t: f64) -> Result<DensityModel1D> {
    check_time(t)?;
    check_rate("lambda", lambda)?;
    let e2 = (-2.0 * lambda * t).exp();
    DensityModel1D::from_transformed(profile, t, t, &[], move |y| {
        let z = cone_depth(t, y);
        let damp = (-lambda * (t - z)).exp();
        lambda * damp * bessel_i0e(lambda * z) / (1.0 - e2)
    })
}

/// Law under the rate `alpha / t`:
/// `(1 / (B(alpha, 1/2) c(x) t)) (1 - Phi(x)^2 / t^2)^(alpha - 1)`.
pub fn density_epd(profile: &VelocityProfile, alpha: f64, t: f64) -> Result<DensityModel1D> {
    check_time(t)?;
    check_rate("alpha", alpha)?;
    let norm = 1.0 / (beta(alpha, 0.5)? * t);
    let model = DensityModel1D::from_transformed(profile, t, t, &[], move |y| {
        let s = y / t;
        norm * ((1.0 - s) * (1.0 + s)).powf(alpha - 1.0)
    })?;
    if alpha >= 1.0 {
        return Ok(model);
    }
    // 1 - y^2/t^2 = d (2t - d) / t^2 with d = t - |y|
    Ok(model.with_edge_form(move |d| {
        let s = d / t;
        norm * (s * (2.0 - s)).powf(alpha - 1.0)
    }))
}
