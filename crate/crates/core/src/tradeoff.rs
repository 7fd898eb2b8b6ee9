//! Latency-constrained decoding: complexity budget, power penalty and the
//! constrained maximal rate.
//!
//! The per-information-bit complexity of a decoder with power penalty `Δρ`
//! (in dB) is modelled as `log2 K = F(Δρ) = 1 / (a·√Δρ + b)`. A deadline
//! `L_m` leaves a budget `κ = [L_m − n·T_s]⁺ / (k·T_b)` operations per
//! information bit, which costs at least
//!
//! ```text
//! Δρ^min(κ) = ( [1 − b·log2 κ]⁺ / (a·log2 κ) )²    dB
//! ```
//!
//! and the achievable rate becomes the normal approximation shifted right by
//! that amount: `M(n, ρ, ε) = R(n, ρ − Δρ^min, ε)`, with `k = n·M`.

use crate::codec::CodeSpec;
use crate::error::{Error, Result};
use crate::fb_bounds::{NormalApproximation, SnrDb};
use crate::os_decoder::{complexity_per_info_bit, estimate_cep, CepRun, DecoderConfig};
use crate::scalar::{positive_part, Real};

/// Deadline, reliability, processor and budget constraints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintSet<T> {
    /// Latency deadline, seconds.
    pub l_m: T,
    /// Target codeword error probability.
    pub eps_m: T,
    /// Symbol duration, seconds.
    pub t_s: T,
    /// Time per binary operation, seconds.
    pub t_b: T,
    /// Minimum acceptable rate.
    pub r_m: T,
    /// Maximum SNR, dB; `+inf` for no budget.
    pub rho_m_db: T,
}

impl<T: Real> ConstraintSet<T> {
    /// `L_m = 1 ms`, `ε_m = 1e-5`, `T_s = 1 µs`, `T_b = 1 ns`, no rate floor, no SNR cap.
    pub fn reference() -> Self {
        Self {
            l_m: T::lit(1e-3),
            eps_m: T::lit(1e-5),
            t_s: T::lit(1e-6),
            t_b: T::lit(1e-9),
            r_m: T::zero(),
            rho_m_db: T::infinity(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T, name: &str| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be a positive time, got {v}")))
            }
        };
        positive(self.l_m, "L_m")?;
        positive(self.t_s, "T_s")?;
        positive(self.t_b, "T_b")?;
        if !(self.eps_m > T::zero() && self.eps_m < T::lit(0.5)) {
            return Err(Error::domain(format!("eps_m must lie in (0, 0.5), got {}", self.eps_m)));
        }
        if !(self.r_m >= T::zero() && self.r_m < T::one()) {
            return Err(Error::domain(format!("r_m must lie in [0, 1), got {}", self.r_m)));
        }
        if self.rho_m_db.is_nan() {
            return Err(Error::domain("rho_m_db is NaN"));
        }
        Ok(())
    }

    pub fn with_t_b(mut self, t_b: T) -> Self {
        self.t_b = t_b;
        self
    }
}

/// Constants of `F(Δρ) = 1 / (a·√Δρ + b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffModel<T> {
    pub a: T,
    pub b: T,
    /// Relative RMS error of the fit on `log2 K`, if fitted.
    pub fit_residual: Option<T>,
}

impl<T: Real> TradeoffModel<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a > T::zero() && b > T::zero() && a.is_finite() && b.is_finite()) {
            return Err(Error::domain(format!("model needs a > 0 and b > 0, got a={a}, b={b}")));
        }
        Ok(Self {
            a,
            b,
            fit_residual: None,
        })
    }

    /// `a = 0.029`, `b = 0.03`.
    pub fn preset() -> Self {
        Self::new(T::lit(0.029), T::lit(0.03)).expect("preset constants are positive")
    }

    /// Predicted `log2 K` at power penalty `Δρ` (dB).
    pub fn log2_complexity(&self, delta_rho_db: T) -> T {
        T::one() / (self.a * delta_rho_db.max(T::zero()).sqrt() + self.b)
    }
}

/// Power penalty and complexity of one decoder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapPoint<T> {
    pub delta_rho_db: T,
    pub log2_k: T,
}

/// `κ = [L_m − n·T_s]⁺ / (k·T_b)`; `k` may be fractional.
pub fn complexity_budget<T: Real>(constraints: &ConstraintSet<T>, n: usize, k: T) -> Result<T> {
    if !(k > T::zero()) {
        return Err(Error::domain(format!("k must be positive, got {k}")));
    }
    let slack = positive_part(constraints.l_m - T::from_usize_lossy(n) * constraints.t_s);
    Ok(slack / (k * constraints.t_b))
}

/// `Δρ^min(κ)` in dB; `+inf` when `κ ≤ 1`, where no decoder fits the deadline.
pub fn min_power_penalty<T: Real>(model: &TradeoffModel<T>, kappa: T) -> T {
    if !(kappa > T::one()) {
        return T::infinity();
    }
    let l = kappa.log2();
    let bl = model.b * l;
    // F(0) = 1/b: at the threshold bl is 1 up to rounding
    if T::one() - bl <= T::lit(8.0) * T::epsilon() * bl {
        return T::zero();
    }
    let x = (T::one() - bl) / (model.a * l);
    x * x
}

/// `T_b` at and below which `Δρ^min = 0`: `[L_m − n·T_s]⁺ / (k·2^{1/b})`.
pub fn zero_gap_processor_threshold<T: Real>(
    k: T,
    model: &TradeoffModel<T>,
    constraints: &ConstraintSet<T>,
    n: usize,
) -> T {
    let slack = positive_part(constraints.l_m - T::from_usize_lossy(n) * constraints.t_s);
    slack / (k * (T::one() / model.b).exp2())
}

const RATE_TOL: f64 = 1e-10;

/// Normal approximation plus decoder complexity constraints at fixed `(n, ε_m)`.
#[derive(Clone, Debug)]
pub struct ConstrainedChannel<T> {
    pub na: NormalApproximation<T>,
    pub model: TradeoffModel<T>,
    pub constraints: ConstraintSet<T>,
}

impl<T: Real> ConstrainedChannel<T> {
    pub fn new(n: usize, model: TradeoffModel<T>, constraints: ConstraintSet<T>) -> Result<Self> {
        constraints.validate()?;
        Ok(Self {
            na: NormalApproximation::new(n, constraints.eps_m)?,
            model,
            constraints,
        })
    }

    pub fn n(&self) -> usize {
        self.na.n()
    }

    /// `Δρ^min` for rate `r` (`k = n·r`).
    pub fn delta_rho_min(&self, rate: T) -> T {
        let k = T::from_usize_lossy(self.n()) * rate;
        match complexity_budget(&self.constraints, self.n(), k) {
            Ok(kappa) => min_power_penalty(&self.model, kappa),
            Err(_) => T::zero(),
        }
    }

    pub fn max_rate_db(&self, rho_db: T) -> T {
        self.na.max_rate_db(rho_db)
    }

    /// `M(n, ρ, ε)`: the fixed point `r = R(ρ − Δρ^min(n·r))`, or 0 if none is positive.
    pub fn constrained_max_rate(&self, rho_db: T) -> T {
        let gap = |r: T| self.na.max_rate_db(rho_db - self.delta_rho_min(r)) - r;
        let tiny = T::lit(1e-12);
        if !(gap(tiny) > T::zero()) {
            return T::zero();
        }
        let (mut lo, mut hi) = (tiny, T::one());
        if gap(hi) >= T::zero() {
            return hi;
        }
        let tol = T::lit(RATE_TOL).max(T::epsilon() * T::lit(16.0));
        while hi - lo > tol {
            let mid = T::lit(0.5) * (lo + hi);
            if gap(mid) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        T::lit(0.5) * (lo + hi)
    }

    /// `Δr^min = R − M ≥ 0`.
    pub fn min_rate_gap(&self, rho_db: T) -> T {
        positive_part(self.na.max_rate_db(rho_db) - self.constrained_max_rate(rho_db))
    }

    /// SNR (dB) where `M` reaches `rate`: `R⁻¹(rate) + Δρ^min(n·rate)`.
    pub fn snr_for_constrained_rate(&self, rate: T) -> Result<T> {
        let shift = self.delta_rho_min(rate);
        if !shift.is_finite() {
            return Err(Error::infeasible(format!(
                "rate {rate} leaves no decoding time within the deadline"
            )));
        }
        Ok(self.na.required_snr_db(rate)? + shift)
    }
}

/// `M(n, ρ, ε)` for one operating point.
pub fn constrained_max_rate<T: Real>(
    n: usize,
    rho_db: T,
    model: &TradeoffModel<T>,
    constraints: &ConstraintSet<T>,
) -> Result<T> {
    Ok(ConstrainedChannel::new(n, *model, *constraints)?.constrained_max_rate(rho_db))
}

pub fn min_rate_gap<T: Real>(
    n: usize,
    rho_db: T,
    model: &TradeoffModel<T>,
    constraints: &ConstraintSet<T>,
) -> Result<T> {
    Ok(ConstrainedChannel::new(n, *model, *constraints)?.min_rate_gap(rho_db))
}

/// Monte Carlo search for the smallest SNR at which a decoder meets a target CEP.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapSearch {
    pub eps_target: f64,
    /// SNR the decoder is compared with, dB.
    pub reference_snr_db: f64,
    pub lo_db: f64,
    pub hi_db: f64,
    pub trials: u64,
    pub seed: u64,
    /// Bracket width at which bisection stops, dB.
    pub tol_db: f64,
}

impl GapSearch {
    pub const DEFAULT_TOL_DB: f64 = 0.05;
}

/// Measures `ρ′ − ρ_ref` for one decoder. Every SNR probe reuses the same
/// seed, so probes see the same messages and noise shapes.
pub fn measure_power_gap(
    code: &CodeSpec,
    config: &DecoderConfig,
    search: &GapSearch,
) -> Result<GapPoint<f64>> {
    if !(search.eps_target > 0.0 && search.eps_target < 1.0) || search.trials == 0 {
        return Err(Error::domain("need 0 < eps_target < 1 and trials >= 1"));
    }
    if !(search.lo_db < search.hi_db) {
        return Err(Error::domain("empty SNR search window"));
    }
    // more errors than this means CEP is above target
    let allowed = (search.eps_target * search.trials as f64).floor() as u64;
    let meets = |db: f64| {
        let run = CepRun::new(search.trials, search.seed).stop_after(allowed + 1);
        estimate_cep(code, config, SnrDb(db).to_linear(), run).errors <= allowed
    };
    if !meets(search.hi_db) {
        return Err(Error::infeasible(format!(
            "CEP stays above {} up to {} dB",
            search.eps_target, search.hi_db
        )));
    }
    let (mut lo, mut hi) = (search.lo_db, search.hi_db);
    if meets(lo) {
        hi = lo;
    } else {
        while hi - lo > search.tol_db {
            let mid = 0.5 * (lo + hi);
            if meets(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let log2_k = complexity_per_info_bit(code.n(), code.k(), config.s, config.q)?.log2();
    Ok(GapPoint {
        delta_rho_db: (hi - search.reference_snr_db).max(0.0),
        log2_k,
    })
}

/// Least-squares fit of `1/log2 K ≈ a·√Δρ + b`, refitted with the offending
/// constant pinned when a sign comes out non-positive.
pub fn fit_model<T: Real>(points: &[GapPoint<T>]) -> Result<TradeoffModel<T>> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    if points
        .iter()
        .any(|p| !(p.delta_rho_db >= T::zero()) || !(p.log2_k > T::zero()))
    {
        return Err(Error::Fit("points need delta_rho_db >= 0 and log2_k > 0".into()));
    }
    let xs: Vec<T> = points.iter().map(|p| p.delta_rho_db.sqrt()).collect();
    let ys: Vec<T> = points.iter().map(|p| T::one() / p.log2_k).collect();
    let m = T::from_usize_lossy(points.len());
    let mx = xs.iter().copied().sum::<T>() / m;
    let my = ys.iter().copied().sum::<T>() / m;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let scale = xs.iter().map(|&x| x * x).sum::<T>().max(T::min_positive_value());
    if sxx <= T::lit(1e-12) * scale {
        return Err(Error::Fit("delta_rho values are not distinct".into()));
    }
    let mut a = sxy / sxx;
    let mut b = my - a * mx;
    let floor = T::lit(1e-9);
    if a <= T::zero() {
        a = floor;
        b = ys.iter().zip(&xs).map(|(&y, &x)| y - a * x).sum::<T>() / m;
    }
    if b <= T::zero() {
        b = floor;
        let sx2: T = xs.iter().map(|&x| x * x).sum();
        a = (xs.iter().zip(&ys).map(|(&x, &y)| x * (y - b)).sum::<T>() / sx2).max(floor);
    }
    let mut model = TradeoffModel::new(a, b)?;
    let sq: T = points
        .iter()
        .map(|p| {
            let e = (model.log2_complexity(p.delta_rho_db) - p.log2_k) / p.log2_k;
            e * e
        })
        .sum();
    model.fit_residual = Some((sq / m).sqrt());
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn reference_channel() -> ConstrainedChannel<f64> {
        ConstrainedChannel::new(128, TradeoffModel::preset(), ConstraintSet::reference()).unwrap()
    }

    #[test]
    fn budget_values() {
        let c = ConstraintSet::<f64>::reference();
        let kappa = complexity_budget(&c, 128, 64.0).unwrap();
        assert!((kappa - 13625.0).abs() < 1e-9);
        let slow = complexity_budget(&c.with_t_b(2e-9), 128, 64.0).unwrap();
        assert!((slow - kappa / 2.0).abs() < 1e-9);
        let late = ConstraintSet { l_m: 1e-4, ..c };
        assert_eq!(complexity_budget(&late, 128, 64.0).unwrap(), 0.0);
        assert!(complexity_budget(&c, 128, 0.0).is_err());
    }

    #[test]
    fn penalty_at_reference_budget() {
        let m = TradeoffModel::<f64>::preset();
        let d = min_power_penalty(&m, 13625.0);
        assert!((d - 2.180).abs() < 1e-3, "{d}");
        // independent root of F(Δρ) = log2 κ
        let target = 13625f64.log2();
        let (mut lo, mut hi) = (0.0, 50.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if m.log2_complexity(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((d - 0.5 * (lo + hi)).abs() < 1e-9);
    }

    #[test]
    fn penalty_edge_cases() {
        let m = TradeoffModel::preset();
        assert_eq!(min_power_penalty(&m, 1.0), f64::INFINITY);
        assert_eq!(min_power_penalty(&m, 0.0), f64::INFINITY);
        assert_eq!(min_power_penalty(&m, 2f64.powf(1.0 / 0.03) * 4.0), 0.0);
        let mut prev = f64::INFINITY;
        for e in 1..60 {
            let d = min_power_penalty(&m, 1.5f64.powi(e));
            assert!(d <= prev);
            prev = d;
        }
    }

    #[test]
    fn inverse_pair_identity() {
        let m = TradeoffModel::preset();
        for kappa in [10.0, 300.0, 13625.0, 1e6, 1e9] {
            let d = min_power_penalty(&m, kappa);
            assert!((m.log2_complexity(d) - f64::log2(kappa)).abs() < 1e-9);
        }
    }

    #[test]
    fn processor_threshold_is_the_sign_change() {
        let m = TradeoffModel::preset();
        let c = ConstraintSet::<f64>::reference();
        let tb = zero_gap_processor_threshold(64.0, &m, &c, 128);
        assert!((tb - 8.72e-4 / (64.0 * 2f64.powf(1.0 / 0.03))).abs() < 1e-30);
        let at = complexity_budget(&c.with_t_b(tb), 128, 64.0).unwrap();
        assert_eq!(min_power_penalty(&m, at), 0.0);
        let above = complexity_budget(&c.with_t_b(2.0 * tb), 128, 64.0).unwrap();
        assert!(min_power_penalty(&m, above) > 0.0);
    }

    #[test]
    fn unconstrained_limit_and_upper_bound() {
        let ch = reference_channel();
        let fast = ConstrainedChannel::new(
            128,
            TradeoffModel::preset(),
            ConstraintSet::reference().with_t_b(1e-22),
        )
        .unwrap();
        for db in [0.0, 2.5, 5.0, 8.0] {
            let r = ch.max_rate_db(db);
            assert!((fast.constrained_max_rate(db) - r).abs() < 1e-9);
            assert!(ch.constrained_max_rate(db) <= r);
            assert!(ch.min_rate_gap(db) >= 0.0);
            assert!(fast.min_rate_gap(db) < 1e-9);
        }
    }

    #[test]
    fn constrained_curve_is_a_right_shift() {
        let ch = reference_channel();
        // grid inversion: ρ(r) = R⁻¹(r) + Δρ^min(128·r), then M(ρ(r)) = r
        for i in 1..20 {
            let r = i as f64 * 0.045;
            let db = ch.na.required_snr_db(r).unwrap() + ch.delta_rho_min(r);
            assert!((ch.constrained_max_rate(db) - r).abs() < 1e-7, "r={r}");
        }
    }

    #[test]
    fn rate_gap_equals_curve_difference() {
        let ch = reference_channel();
        let rho_s = ch.na.required_snr_db(0.5).unwrap();
        let gap = ch.min_rate_gap(rho_s);
        // M from the inverse-curve side: largest r with ρ(r) ≤ ρ_s
        let (mut lo, mut hi) = (0.0, 0.5);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let need = ch.na.required_snr_db(mid).unwrap() + ch.delta_rho_min(mid);
            if need <= rho_s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((gap - (0.5 - lo)).abs() < 1e-7, "{gap} vs {}", 0.5 - lo);
        assert!(gap > 0.1);
    }

    #[test]
    fn monotone_in_snr_and_processor_speed() {
        let ch = reference_channel();
        let mut prev = 0.0;
        for i in 0..40 {
            let m = ch.constrained_max_rate(-2.0 + 0.3 * i as f64);
            assert!(m >= prev);
            prev = m;
        }
        let mut prev_gap = 0.0;
        for tb in [1e-12, 1e-11, 1e-10, 1e-9, 4e-9] {
            let c = ConstrainedChannel::new(128, TradeoffModel::preset(), ConstraintSet::reference().with_t_b(tb))
                .unwrap();
            let g = c.min_rate_gap(5.0);
            assert!(g >= prev_gap);
            prev_gap = g;
        }
    }

    #[test]
    fn tiny_processor_time_has_no_gap() {
        let m = TradeoffModel::preset();
        let c = ConstraintSet::reference();
        let tb = zero_gap_processor_threshold(128.0, &m, &c, 128);
        let ch = ConstrainedChannel::new(128, m, c.with_t_b(tb * 0.5)).unwrap();
        assert_eq!(ch.min_rate_gap(4.0), 0.0);
    }

    fn synthetic(a: f64, b: f64) -> Vec<GapPoint<f64>> {
        [0.3, 0.8, 1.5, 2.4, 3.7, 5.0]
            .iter()
            .map(|&d: &f64| GapPoint {
                delta_rho_db: d,
                log2_k: 1.0 / (a * d.sqrt() + b),
            })
            .collect()
    }

    #[test]
    fn exact_fit_round_trip() {
        let m = fit_model(&synthetic(0.029, 0.03)).unwrap();
        assert!((m.a - 0.029).abs() < 1e-9 && (m.b - 0.03).abs() < 1e-9);
        assert!(m.fit_residual.unwrap() < 1e-9);
    }

    #[test]
    fn noisy_fit_recovers_constants() {
        let mut rng = crate::rng::trial_rng(2024, 0);
        let pts: Vec<GapPoint<f64>> = synthetic(0.029, 0.03)
            .into_iter()
            .map(|p| GapPoint {
                log2_k: p.log2_k * (1.0 + rng.random_range(-0.02..0.02)),
                ..p
            })
            .collect();
        let m = fit_model(&pts).unwrap();
        assert!((m.a / 0.029 - 1.0).abs() < 0.1, "a={}", m.a);
        assert!((m.b / 0.03 - 1.0).abs() < 0.1, "b={}", m.b);
        assert!(m.fit_residual.unwrap() < 0.05);
    }

    #[test]
    fn degenerate_fits_fail() {
        let same = vec![
            GapPoint { delta_rho_db: 1.0, log2_k: 20.0 },
            GapPoint { delta_rho_db: 1.0, log2_k: 21.0 },
            GapPoint { delta_rho_db: 1.0, log2_k: 22.0 },
        ];
        assert!(matches!(fit_model(&same), Err(Error::Fit(_))));
        assert!(matches!(fit_model(&same[..2]), Err(Error::Fit(_))));
    }

    #[test]
    fn clamped_refit_stays_positive() {
        // rising complexity with penalty would need a < 0
        let pts: Vec<GapPoint<f64>> = [0.5, 1.0, 2.0, 3.0]
            .iter()
            .map(|&d| GapPoint { delta_rho_db: d, log2_k: 10.0 + d })
            .collect();
        let m = fit_model(&pts).unwrap();
        assert!(m.a > 0.0 && m.b > 0.0);
    }

    #[test]
    fn single_precision_penalty() {
        let m = TradeoffModel::<f32>::preset();
        let d = min_power_penalty(&m, 13625.0f32);
        assert!((d - 2.1794).abs() < 1e-3);
    }
}
