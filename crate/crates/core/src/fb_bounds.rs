//! BI-AWGN capacity, dispersion and the two-term normal approximation of the
//! maximal coding rate at finite blocklength.
//!
//! The channel is `y = √ρ·x + z` with `x ∈ {−1, +1}` and `z ~ N(0, 1)`.
//! Capacity and dispersion are Gaussian expectations of the information
//! density `i(z) = 1 − log2(1 + exp(−2ρ + 2z√ρ))`:
//!
//! ```text
//! C = E[i(Z)],   V = E[(i(Z) − C)²]
//! R(n, ρ, ε) = C − √(V/n) · Q⁻¹(ε) · log2(e)
//! ```
//!
//! The `O(log n / n)` term is not included. All curve geometry (inflection
//! point, shifts) is done on the SNR-in-dB axis.

use crate::error::{Error, Result};
use crate::quadrature::GaussianRule;
use crate::scalar::{from_db, to_db, Real};

/// Linear SNR, `ρ ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct SnrLinear<T>(T);

/// SNR in decibels.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct SnrDb<T>(pub T);

impl<T: Real> SnrLinear<T> {
    pub fn new(value: T) -> Result<Self> {
        if value.is_nan() || value < T::zero() {
            return Err(Error::domain(format!("linear SNR must be >= 0, got {value}")));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn to_db(self) -> SnrDb<T> {
        SnrDb(to_db(self.0))
    }
}

impl<T: Real> SnrDb<T> {
    pub fn value(self) -> T {
        self.0
    }

    pub fn to_linear(self) -> SnrLinear<T> {
        SnrLinear(from_db(self.0))
    }
}

impl<T: Real> From<SnrDb<T>> for SnrLinear<T> {
    fn from(db: SnrDb<T>) -> Self {
        db.to_linear()
    }
}

/// Blocklength, target codeword error probability and a rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlocklengthParams<T> {
    pub n: usize,
    pub eps: T,
    pub rate: T,
}

impl<T: Real> BlocklengthParams<T> {
    pub fn new(n: usize, eps: T, rate: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("blocklength must be >= 1"));
        }
        if !(eps > T::zero() && eps < T::lit(0.5)) {
            return Err(Error::domain(format!("eps must lie in (0, 0.5), got {eps}")));
        }
        if !(rate >= T::zero() && rate <= T::one()) {
            return Err(Error::domain(format!("rate must lie in [0, 1], got {rate}")));
        }
        Ok(Self { n, eps, rate })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelMoments<T> {
    /// Bits per channel use.
    pub capacity: T,
    /// Bits² per channel use.
    pub dispersion: T,
}

/// Gaussian-expectation rule used for `C` and `V`, with an order-doubling
/// acceptance check.
#[derive(Clone, Debug)]
pub struct QuadratureSpec<T> {
    coarse: GaussianRule<T>,
    fine: GaussianRule<T>,
    tolerance: T,
}

const MAX_DOUBLINGS: usize = 3;

impl<T: Real> QuadratureSpec<T> {
    pub const DEFAULT_ORDER: usize = 64;

    /// `order` is the number of Gauss nodes per unit panel (≥ 16).
    pub fn new(order: usize) -> Result<Self> {
        if order < 16 {
            return Err(Error::domain(format!("quadrature order must be >= 16, got {order}")));
        }
        // 1e-9 in double precision, a few hundred ulps otherwise
        let tolerance = T::lit(1e-9).max(T::epsilon() * T::lit(256.0));
        Ok(Self {
            coarse: GaussianRule::new(order),
            fine: GaussianRule::new(2 * order),
            tolerance,
        })
    }

    pub fn order(&self) -> usize {
        self.coarse.order()
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self::new(Self::DEFAULT_ORDER).expect("default order is valid")
    }
}

/// `Q(x) = P(Z > x)`.
pub fn q_func<T: Real>(x: T) -> T {
    T::lit(0.5) * (x / T::SQRT_2()).erfc()
}

/// Inverse of the Gaussian Q-function.
pub fn q_inv<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::domain(format!("Q⁻¹ needs 0 < p < 1, got {p}")));
    }
    let half = T::lit(0.5);
    if p == half {
        return Ok(T::zero());
    }
    if p > half {
        return q_inv(T::one() - p).map(|x| -x);
    }
    // Q is decreasing; Q(0) = 1/2 > p and Q(40) underflows to 0 in f64.
    let (mut lo, mut hi) = (T::zero(), T::lit(40.0));
    for _ in 0..200 {
        let mid = half * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q_func(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(half * (lo + hi))
}

fn information_density<T: Real>(rho: T, sqrt_rho: T, z: T) -> T {
    let two = T::lit(2.0);
    let u = two * z * sqrt_rho - two * rho;
    // log(1 + e^u) without overflow
    let softplus = u.max(T::zero()) + (-u.abs()).exp().ln_1p();
    T::one() - softplus * T::LOG2_E()
}

fn moments_with_rule<T: Real>(rho: T, rule: &GaussianRule<T>) -> ChannelMoments<T> {
    let sqrt_rho = rho.sqrt();
    let values: Vec<T> = rule
        .nodes
        .iter()
        .map(|&z| information_density(rho, sqrt_rho, z))
        .collect();
    let capacity: T = values.iter().zip(&rule.weights).map(|(&f, &w)| w * f).sum();
    let dispersion: T = values
        .iter()
        .zip(&rule.weights)
        .map(|(&f, &w)| {
            let d = f - capacity;
            w * d * d
        })
        .sum();
    ChannelMoments {
        capacity: capacity.max(T::zero()).min(T::one()),
        dispersion: dispersion.max(T::zero()),
    }
}

/// Capacity and dispersion of the BI-AWGN channel at SNR `rho`.
pub fn channel_moments<T: Real>(rho: SnrLinear<T>, quad: &QuadratureSpec<T>) -> ChannelMoments<T> {
    let rho = rho.value();
    let close = |a: &ChannelMoments<T>, b: &ChannelMoments<T>| {
        (a.capacity - b.capacity).abs() <= quad.tolerance
            && (a.dispersion - b.dispersion).abs() <= quad.tolerance
    };
    let coarse = moments_with_rule(rho, &quad.coarse);
    let mut fine = moments_with_rule(rho, &quad.fine);
    if close(&coarse, &fine) {
        return fine;
    }
    let mut order = quad.fine.order();
    for _ in 0..MAX_DOUBLINGS {
        order *= 2;
        let finer = moments_with_rule(rho, &GaussianRule::new(order));
        let done = close(&fine, &finer);
        fine = finer;
        if done {
            break;
        }
    }
    fine
}

/// Normal approximation for fixed `(n, ε)`.
#[derive(Clone, Debug)]
pub struct NormalApproximation<T> {
    n: usize,
    eps: T,
    /// `Q⁻¹(ε)·log2(e)/√n`
    back_off: T,
    quad: QuadratureSpec<T>,
}

/// Search window of [`NormalApproximation::inflection_snr`], dB.
pub const INFLECTION_WINDOW_DB: (f64, f64) = (-20.0, 20.0);
/// Finite-difference step on the dB axis.
pub const CURVATURE_STEP_DB: f64 = 0.01;
const INFLECTION_TOL_DB: f64 = 1e-4;
const SNR_SEARCH_DB: (f64, f64) = (-60.0, 80.0);

impl<T: Real> NormalApproximation<T> {
    /// `eps = 0.5` is accepted and yields `R = C`.
    pub fn new(n: usize, eps: T) -> Result<Self> {
        Self::with_quadrature(n, eps, QuadratureSpec::default())
    }

    pub fn with_quadrature(n: usize, eps: T, quad: QuadratureSpec<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("blocklength must be >= 1"));
        }
        if !(eps > T::zero() && eps <= T::lit(0.5)) {
            return Err(Error::domain(format!("eps must lie in (0, 0.5], got {eps}")));
        }
        let back_off = q_inv(eps)? * T::LOG2_E() / T::from_usize_lossy(n).sqrt();
        Ok(Self {
            n,
            eps,
            back_off,
            quad,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn quadrature(&self) -> &QuadratureSpec<T> {
        &self.quad
    }

    pub fn moments(&self, rho: SnrLinear<T>) -> ChannelMoments<T> {
        channel_moments(rho, &self.quad)
    }

    /// `R(n, ρ, ε)` clamped to `[0, 1]`.
    pub fn max_rate(&self, rho: SnrLinear<T>) -> T {
        let m = self.moments(rho);
        let r = m.capacity - m.dispersion.sqrt() * self.back_off;
        r.max(T::zero()).min(T::one())
    }

    /// `R` at an SNR given in dB; `-inf` dB gives 0.
    pub fn max_rate_db(&self, rho_db: T) -> T {
        if rho_db == T::neg_infinity() {
            return T::zero();
        }
        self.max_rate(SnrDb(rho_db).to_linear())
    }

    /// Smallest SNR (dB) with `R(n, ρ, ε) = rate`.
    pub fn required_snr_db(&self, rate: T) -> Result<T> {
        if !(rate > T::zero() && rate < T::one()) {
            return Err(Error::infeasible(format!(
                "reference rate must lie in (0, 1), got {rate}"
            )));
        }
        let (mut lo, mut hi) = (T::lit(SNR_SEARCH_DB.0), T::lit(SNR_SEARCH_DB.1));
        if self.max_rate_db(hi) < rate {
            return Err(Error::infeasible(format!(
                "rate {rate} not reached below {} dB",
                SNR_SEARCH_DB.1
            )));
        }
        let half = T::lit(0.5);
        for _ in 0..200 {
            let mid = half * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.max_rate_db(mid) < rate {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    pub fn required_snr(&self, rate: T) -> Result<SnrLinear<T>> {
        self.required_snr_db(rate).map(|db| SnrDb(db).to_linear())
    }

    /// Central second difference of `R` on the dB axis.
    pub fn curvature_db(&self, rho_db: T, step_db: T) -> T {
        self.max_rate_db(rho_db + step_db) - T::lit(2.0) * self.max_rate_db(rho_db)
            + self.max_rate_db(rho_db - step_db)
    }

    /// SNR (dB) where `R` turns from convex to concave.
    pub fn inflection_snr(&self) -> Result<SnrDb<T>> {
        let h = T::lit(CURVATURE_STEP_DB);
        let (start, stop) = (T::lit(INFLECTION_WINDOW_DB.0), T::lit(INFLECTION_WINDOW_DB.1));
        let points = ((stop - start) / h).round().to_usize().unwrap_or(0);
        let grid: Vec<T> = (0..=points)
            .map(|i| start + h * T::from_usize_lossy(i))
            .collect();
        let rates: Vec<T> = grid.iter().map(|&x| self.max_rate_db(x)).collect();
        let curv = |i: usize| rates[i + 1] - T::lit(2.0) * rates[i] + rates[i - 1];
        // skip the clamped R = 0 floor; its kink is not an inflection
        let bracket = (1..points.saturating_sub(1)).find(|&i| {
            rates[i - 1] > T::zero() && curv(i) > T::zero() && curv(i + 1) < T::zero()
        });
        let Some(i) = bracket else {
            return Err(Error::NotFound(format!(
                "no convex-to-concave change of R in [{}, {}] dB",
                INFLECTION_WINDOW_DB.0, INFLECTION_WINDOW_DB.1
            )));
        };
        let (mut lo, mut hi) = (grid[i], grid[i + 1]);
        let tol = T::lit(INFLECTION_TOL_DB);
        while hi - lo > tol {
            let mid = T::lit(0.5) * (lo + hi);
            if self.curvature_db(mid, h) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(SnrDb(T::lit(0.5) * (lo + hi)))
    }
}

/// `R(n, ρ, ε)` with the default quadrature.
pub fn max_rate<T: Real>(n: usize, rho: SnrLinear<T>, eps: T) -> Result<T> {
    Ok(NormalApproximation::new(n, eps)?.max_rate(rho))
}

/// `R⁻¹(n, rate, ε)` with the default quadrature.
pub fn required_snr<T: Real>(n: usize, rate: T, eps: T) -> Result<SnrLinear<T>> {
    NormalApproximation::new(n, eps)?.required_snr(rate)
}

pub fn inflection_snr<T: Real>(n: usize, eps: T) -> Result<SnrDb<T>> {
    NormalApproximation::new(n, eps)?.inflection_snr()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(v: f64) -> SnrLinear<f64> {
        SnrLinear::new(v).unwrap()
    }

    /// Tail probability by Simpson's rule on [x, x + 40].
    fn tail_oracle(x: f64) -> f64 {
        let steps = 200_000;
        let h = 40.0 / steps as f64;
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut acc = pdf(x) + pdf(x + 40.0);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * pdf(x + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn q_inv_half_is_zero() {
        assert_eq!(q_inv(0.5_f64).unwrap(), 0.0);
    }

    #[test]
    fn q_inv_matches_tail_integral_bisection() {
        let (mut lo, mut hi) = (0.0_f64, 10.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if tail_oracle(mid) > 1e-5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let x = q_inv(1e-5_f64).unwrap();
        assert!((x - oracle).abs() < 1e-8, "{x} vs {oracle}");
        assert!((x - 4.2649).abs() < 1e-4);
    }

    #[test]
    fn q_inv_round_trip() {
        for p in [1e-3_f64, 1e-5, 1e-9, 0.2, 0.7, 0.999] {
            let x = q_inv(p).unwrap();
            assert!((q_func(x) - p).abs() < 1e-10 * p.max(1e-3), "p={p}");
        }
    }

    #[test]
    fn q_inv_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(q_inv(p), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn capacity_limits() {
        let quad = QuadratureSpec::default();
        let zero = channel_moments(lin(0.0), &quad);
        assert!(zero.capacity.abs() < 1e-9);
        assert!(zero.dispersion.abs() < 1e-9);
        let high = channel_moments(lin(100.0), &quad);
        assert!((high.capacity - 1.0).abs() < 1e-6);
    }

    #[test]
    fn order_doubling_agrees() {
        let q64 = QuadratureSpec::<f64>::new(64).unwrap();
        let q16 = QuadratureSpec::<f64>::new(16).unwrap();
        for db in [-10.0, 0.0, 4.0, 8.0, 15.0, 25.0] {
            let rho = SnrDb(db).to_linear();
            let a = channel_moments(rho, &q64);
            let b = channel_moments(rho, &q16);
            assert!((a.capacity - b.capacity).abs() < 1e-12);
            assert!((a.dispersion - b.dispersion).abs() < 1e-12);
        }
        assert!(QuadratureSpec::<f64>::new(8).is_err());
    }

    #[test]
    fn moments_in_range_over_snr() {
        let quad = QuadratureSpec::default();
        let mut rho = 1e-4;
        while rho <= 1e4 {
            let m = channel_moments(lin(rho), &quad);
            assert!(m.capacity.is_finite() && m.dispersion.is_finite());
            assert!((0.0..=1.0).contains(&m.capacity));
            assert!(m.dispersion >= 0.0);
            rho *= 1.7;
        }
        let tiny = channel_moments(lin(1e-8), &quad).dispersion;
        let huge = channel_moments(lin(1e4), &quad).dispersion;
        assert!(tiny < 1e-6 && huge < 1e-12);
    }

    #[test]
    fn eps_half_gives_capacity() {
        let na = NormalApproximation::new(128, 0.5).unwrap();
        let rho = lin(1.3);
        assert_eq!(na.max_rate(rho), na.moments(rho).capacity);
    }

    #[test]
    fn huge_blocklength_approaches_capacity() {
        // the back-off is √(V/n)·Q⁻¹(ε)·log2 e with V ≤ 0.66
        let na = NormalApproximation::new(1_000_000_000, 1e-2_f64).unwrap();
        let tight = NormalApproximation::new(1_000_000_000, 1e-5_f64).unwrap();
        let tighter = NormalApproximation::new(100_000_000_000, 1e-5_f64).unwrap();
        for db in [-5.0, 0.0, 3.0, 8.0] {
            let rho = SnrDb(db).to_linear();
            let c = na.moments(rho).capacity;
            assert!((na.max_rate(rho) - c).abs() < 1e-4);
            let ratio = (c - tight.max_rate(rho)) / (c - tighter.max_rate(rho));
            assert!((ratio - 10.0).abs() < 1e-6, "{ratio}");
        }
    }

    #[test]
    fn max_rate_monotone_on_dense_grid() {
        let na = NormalApproximation::new(128, 1e-5).unwrap();
        let first_positive = SnrDb(-0.5);
        let mut prev = na.max_rate(first_positive.to_linear());
        let mut db = -0.5;
        while db < 14.0 {
            db += 0.01;
            let r = na.max_rate_db(db);
            assert!(r > prev, "not increasing at {db} dB");
            prev = r;
        }
    }

    #[test]
    fn required_snr_matches_grid_search() {
        let na = NormalApproximation::new(128, 1e-5_f64).unwrap();
        let db = na.required_snr_db(0.5).unwrap();
        assert!((na.max_rate_db(db) - 0.5).abs() < 1e-9);
        // coarse grid then refined grid, independent of the bisection
        let mut best = f64::NAN;
        let mut step = 0.1;
        let (mut a, mut b) = (-5.0, 15.0);
        for _ in 0..6 {
            let mut x = a;
            while x <= b {
                if na.max_rate_db(x) >= 0.5 {
                    best = x;
                    break;
                }
                x += step;
            }
            a = best - step;
            b = best;
            step /= 10.0;
        }
        assert!((db - best).abs() < 1e-5, "{db} vs {best}");
    }

    #[test]
    fn required_snr_errors() {
        let na = NormalApproximation::new(128, 1e-5).unwrap();
        assert!(matches!(na.required_snr(1.0), Err(Error::Infeasible(_))));
        assert!(matches!(na.required_snr(0.0), Err(Error::Infeasible(_))));
        assert!(na.required_snr(0.3).unwrap() < na.required_snr(0.6).unwrap());
    }

    #[test]
    fn inflection_is_convex_to_concave() {
        let na = NormalApproximation::new(128, 1e-5).unwrap();
        let ri = na.inflection_snr().unwrap().value();
        assert!(na.curvature_db(ri - 1.0, 0.01) > 0.0);
        assert!(na.curvature_db(ri + 1.0, 0.01) < 0.0);
    }

    #[test]
    fn inflection_matches_dense_curvature_scan() {
        let na = NormalApproximation::new(128, 1e-5).unwrap();
        let ri = na.inflection_snr().unwrap().value();
        // finest-grid scan with its own step
        let h = 0.002;
        let mut x = 0.0;
        let mut found = f64::NAN;
        let mut prev = na.curvature_db(x, 0.01);
        while x < 10.0 {
            x += h;
            let c = na.curvature_db(x, 0.01);
            if prev > 0.0 && c <= 0.0 {
                found = x - 0.5 * h;
                break;
            }
            prev = c;
        }
        assert!((ri - found).abs() < 2e-3, "{ri} vs {found}");
    }

    #[test]
    fn inflection_shifts_left_with_blocklength() {
        let a = inflection_snr(128, 1e-5_f64).unwrap().value();
        let b = inflection_snr(512, 1e-5_f64).unwrap().value();
        assert!(b < a, "{b} !< {a}");
    }

    #[test]
    fn single_precision_tracks_double() {
        let na64 = NormalApproximation::<f64>::new(128, 1e-5).unwrap();
        let na32 = NormalApproximation::<f32>::new(128, 1e-5).unwrap();
        for db in [0.0, 2.0, 4.5, 7.0] {
            let r64 = na64.max_rate_db(db);
            let r32 = na32.max_rate_db(db as f32) as f64;
            assert!((r64 - r32).abs() < 1e-4, "{db}: {r64} vs {r32}");
        }
    }

    #[test]
    fn db_round_trip() {
        for v in [1e-6_f64, 0.3, 1.0, 17.0, 1e5] {
            let back = SnrLinear::new(v).unwrap().to_db().to_linear().value();
            assert!(((back - v) / v).abs() < 1e-12);
        }
        assert!(SnrLinear::new(-1.0).is_err());
    }
}
