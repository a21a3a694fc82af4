//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const MAX_SUBDIVISIONS: usize = 5000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_depth: 60,
        }
    }
}

impl QuadSettings {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut pairs = [(0.0, 0.0); 7];
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, pair) in pairs.iter_mut().enumerate() {
        let dx = h * XGK[j];
        *pair = (f(c - dx), f(c + dx));
        let s = pair.0 + pair.1;
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    // Error scaling as in QUADPACK's qk15.
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, &(l, r)) in pairs.iter().enumerate() {
        asc += WGK[j] * ((l - mean).abs() + (r - mean).abs());
    }
    let asc = asc * h.abs();
    let mut err = ((kron - gauss) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    (kron * h, err)
}

/// Integrate `f` over `[a, b]` to within `settings.abs_tol` (or the relative
/// tolerance, whichever is looser). Globally adaptive: the piece with the
/// largest error estimate is bisected until the summed estimate is small
/// enough. The integrand is never evaluated at the endpoints, so integrable
/// endpoint singularities are tolerated.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, settings: QuadSettings) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration limits must be finite: [{a}, {b}]")));
    }
    let (whole, err) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: whole, err, depth: 0 });
    let (mut total, mut total_err) = (whole, err);
    for _ in 0..MAX_SUBDIVISIONS {
        if !total.is_finite() || !total_err.is_finite() {
            break;
        }
        if total_err <= settings.abs_tol.max(settings.rel_tol * total.abs()) {
            // Re-sum to drop the rounding carried by the running total.
            return Ok(heap.iter().map(|p| p.value).sum());
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if worst.depth >= settings.max_depth || (m - worst.a) * (worst.b - m) <= 0.0 {
            break;
        }
        let (l, le) = gk15(&f, worst.a, m);
        let (r, re) = gk15(&f, m, worst.b);
        total += l + r - worst.value;
        total_err += le + re - worst.err;
        for (lo, hi, value, err) in [(worst.a, m, l, le), (m, worst.b, r, re)] {
            heap.push(Piece { a: lo, b: hi, value, err, depth: worst.depth + 1 });
        }
    }
    if !total.is_finite() {
        return Err(Error::NoConvergence(format!("non-finite integral on [{a}, {b}]")));
    }
    Err(Error::NoConvergence(format!(
        "tolerance {} not reached on [{a}, {b}] (error estimate {total_err:e})",
        settings.abs_tol
    )))
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Tanh-sinh (double exponential) quadrature on `[a, b]`. Suited to
/// integrands with integrable algebraic singularities at the endpoints: `f`
/// receives the distance to the nearer endpoint as its second argument,
/// computed without cancellation, so it can evaluate the singular factor
/// accurately.
pub fn integrate_tanh_sinh<F: Fn(f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    settings: QuadSettings,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration limits must be finite: [{a}, {b}]")));
    }
    const TAU_MAX: f64 = 4.5;
    let hw = 0.5 * (b - a);
    // Contribution of the pair of nodes at +-tau.
    let pair = |tau: f64| -> f64 {
        let u = FRAC_PI_2 * tau.sinh();
        let w = FRAC_PI_2 * tau.cosh() / (u.cosh() * u.cosh());
        let comp = 2.0 / ((2.0 * u).exp() + 1.0);
        let d = hw.abs() * comp;
        if d == 0.0 || w == 0.0 {
            return 0.0;
        }
        let mut s = w * (f(b - hw * comp, d) + f(a + hw * comp, d));
        if tau == 0.0 {
            s *= 0.5;
        }
        s
    };
    let mut h = 0.5;
    let mut sum = 0.0;
    let mut j = 0;
    while f64::from(j) * h <= TAU_MAX {
        sum += pair(f64::from(j) * h);
        j += 1;
    }
    let mut estimate = hw * h * sum;
    for _ in 0..10 {
        h *= 0.5;
        let mut j = 1;
        while f64::from(j) * h <= TAU_MAX {
            sum += pair(f64::from(j) * h);
            j += 2;
        }
        let next = hw * h * sum;
        if !next.is_finite() {
            return Err(Error::NoConvergence(format!("non-finite integral on [{a}, {b}]")));
        }
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= settings.abs_tol.max(settings.rel_tol * next.abs()) {
            return Ok(next);
        }
    }
    Err(Error::NoConvergence(format!(
        "tanh-sinh tolerance {} not reached on [{a}, {b}]",
        settings.abs_tol
    )))
}

/// Integrate over a sequence of breakpoints, summing the pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    settings: QuadSettings,
) -> Result<f64> {
    let pieces = points.len().saturating_sub(1).max(1) as f64;
    let per = QuadSettings {
        abs_tol: settings.abs_tol / pieces,
        ..settings
    };
    points
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], per))
        .sum()
}

/// Iterated 2-d integral over `[ax, bx] x [ay(x), by(x)]`.
pub fn integrate_2d<F, G, H>(
    f: F,
    ax: f64,
    bx: f64,
    lower: G,
    upper: H,
    settings: QuadSettings,
) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    let inner_settings = QuadSettings {
        abs_tol: settings.abs_tol / (bx - ax).abs().max(1.0) * 0.1,
        ..settings
    };
    let failure = std::cell::Cell::new(None);
    let outer = integrate(
        |x| match integrate(|y| f(x, y), lower(x), upper(x), inner_settings) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        ax,
        bx,
        settings,
    )?;
    match failure.take() {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}
