//! Rate/power multi-objective optimization.
//!
//! Starting from a reference pair `{r_s, ρ_s}` with `R(n, ρ_s, ε_m) = r_s`,
//! a link either gives up rate `Δr` or spends extra power `Δρ` (dB) to absorb
//! the latency-limited decoder. Feasible pairs satisfy
//! `[r_s − M(n, ρ_s + Δρ, ε_m)]⁺ ≤ Δr ≤ r_s − r_m` and `0 ≤ Δρ ≤ ρ_m − ρ_s`;
//! the Pareto boundary is the lower edge `Δr = r_s − M(n, ρ_s + Δρ, ε_m)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{positive_part, Real};
use crate::tradeoff::ConstrainedChannel;

/// Default boundary resolution in `Δρ`, dB.
pub const DEFAULT_STEP_DB: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferencePair<T> {
    pub r_s: T,
    pub rho_s_db: T,
}

impl<T: Real> ReferencePair<T> {
    /// Pairs `r_s` with the SNR at which the normal approximation reaches it.
    pub fn new(channel: &ConstrainedChannel<T>, r_s: T) -> Result<Self> {
        Ok(Self {
            r_s,
            rho_s_db: channel.na.required_snr_db(r_s)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParetoPoint<T> {
    pub delta_r: T,
    pub delta_rho_db: T,
    /// `r_s − Δr`.
    pub rate: T,
    /// `ρ_s + Δρ`, dB.
    pub snr_db: T,
}

impl<T: Real> ParetoPoint<T> {
    fn new(reference: &ReferencePair<T>, delta_r: T, delta_rho_db: T) -> Self {
        Self {
            delta_r,
            delta_rho_db,
            rate: reference.r_s - delta_r,
            snr_db: reference.rho_s_db + delta_rho_db,
        }
    }

    /// Weak dominance with at least one strict improvement.
    pub fn dominated_by(&self, delta_r: T, delta_rho_db: T) -> bool {
        delta_r <= self.delta_r
            && delta_rho_db <= self.delta_rho_db
            && (delta_r < self.delta_r || delta_rho_db < self.delta_rho_db)
    }
}

/// Upper end of the `Δr` range and `Δρ` range of the attainable set.
fn limits<T: Real>(channel: &ConstrainedChannel<T>, reference: &ReferencePair<T>) -> (T, T) {
    (
        reference.r_s - channel.constraints.r_m,
        channel.constraints.rho_m_db - reference.rho_s_db,
    )
}

/// Membership in the attainable objective set.
pub fn attainable_contains<T: Real>(
    channel: &ConstrainedChannel<T>,
    reference: &ReferencePair<T>,
    delta_r: T,
    delta_rho_db: T,
) -> bool {
    let (dr_max, drho_max) = limits(channel, reference);
    if !(delta_rho_db >= T::zero() && delta_rho_db <= drho_max && delta_r <= dr_max) {
        return false;
    }
    let floor = positive_part(
        reference.r_s - channel.constrained_max_rate(reference.rho_s_db + delta_rho_db),
    );
    floor <= delta_r
}

#[derive(Clone, Debug)]
pub struct ParetoBoundary<T> {
    pub reference: ReferencePair<T>,
    /// Ordered by increasing `Δρ`; `Δr` strictly decreases.
    pub points: Vec<ParetoPoint<T>>,
    /// Power penalty that restores `r_s`.
    pub delta_rho_s_min: T,
    /// Rate loss at `ρ_s`.
    pub delta_r_s_min: T,
    pub step_db: T,
}

impl<T: Real> ParetoBoundary<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> &ParetoPoint<T> {
        &self.points[0]
    }

    pub fn last(&self) -> &ParetoPoint<T> {
        &self.points[self.points.len() - 1]
    }
}

/// Samples the boundary from `Δρ^start` to `Δρ^end` every `step_db`; the end
/// point is always included.
///
/// `Δρ^start` is 0 when `r_s − Δr_s^min ≥ r_m`, otherwise the offset at which
/// `M` reaches `r_m`; `Δρ^end = min(Δρ_s^min, ρ_m − ρ_s)`.
pub fn pareto_boundary<T: Real>(
    channel: &ConstrainedChannel<T>,
    reference: &ReferencePair<T>,
    step_db: T,
) -> Result<ParetoBoundary<T>> {
    if !(step_db > T::zero()) {
        return Err(Error::domain(format!("grid step must be positive, got {step_db}")));
    }
    let r_s = reference.r_s;
    let r_m = channel.constraints.r_m;
    if !(r_s > r_m) {
        return Err(Error::infeasible(format!("r_s = {r_s} is not above r_m = {r_m}")));
    }
    let delta_rho_s_min = channel.delta_rho_min(r_s);
    let delta_r_s_min = positive_part(r_s - channel.constrained_max_rate(reference.rho_s_db));
    let start = if r_s - delta_r_s_min >= r_m {
        T::zero()
    } else {
        channel.snr_for_constrained_rate(r_m)? - reference.rho_s_db
    };
    let (_, drho_max) = limits(channel, reference);
    let end = delta_rho_s_min.min(drho_max);
    if !end.is_finite() {
        return Err(Error::infeasible(
            "rate r_s cannot be decoded within the deadline and no SNR cap bounds the boundary",
        ));
    }
    if start > end {
        return Err(Error::infeasible("no feasible pair can be found"));
    }
    let mut offsets = Vec::new();
    let mut j = 0usize;
    loop {
        let d = start + step_db * T::from_usize_lossy(j);
        // keep the last interior sample clear of the end point
        if d >= end - step_db * T::lit(1e-6) {
            break;
        }
        offsets.push(d);
        j += 1;
    }
    offsets.push(end);
    let points: Vec<ParetoPoint<T>> = offsets
        .par_iter()
        .map(|&d| {
            let dr = if d == delta_rho_s_min {
                T::zero()
            } else if d == T::zero() {
                delta_r_s_min
            } else {
                positive_part(r_s - channel.constrained_max_rate(reference.rho_s_db + d))
            };
            ParetoPoint::new(reference, dr, d)
        })
        .collect();
    Ok(ParetoBoundary {
        reference: *reference,
        points,
        delta_rho_s_min,
        delta_r_s_min,
        step_db,
    })
}

/// Norm of the weighted-ℓθ scalarization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Theta<T> {
    /// Weighted sum.
    One,
    /// Weighted Chebyshev (min-max).
    Inf,
    /// Power mean of order `θ ≥ 1`.
    Finite(T),
}

/// Transform applied to `Δρ` before weighting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PowerCost<T> {
    /// `log2(1 + Δρ_lin)` with `Δρ_lin = 10^{Δρ/10} − 1`, i.e. `Δρ·log2(10)/10`.
    ShannonLog,
    /// `log2(max(Δρ, floor) / floor)`: the log of the dB penalty, floored and
    /// shifted so the cost is zero at the floor.
    RawDbLog { floor_db: T },
}

impl<T: Real> PowerCost<T> {
    pub const DEFAULT_FLOOR_DB: f64 = 1e-3;

    pub fn raw_db_log() -> Self {
        PowerCost::RawDbLog {
            floor_db: T::lit(Self::DEFAULT_FLOOR_DB),
        }
    }

    pub fn cost(&self, delta_rho_db: T) -> T {
        match *self {
            PowerCost::ShannonLog => delta_rho_db * T::LOG2_10() / T::lit(10.0),
            PowerCost::RawDbLog { floor_db } => (delta_rho_db.max(floor_db) / floor_db).log2(),
        }
    }
}

/// Rescaling of the two objectives before weighting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Normalization {
    /// Use `A` and `B` as given.
    #[default]
    None,
    /// Divide each objective by its spread over the boundary, so `α` trades
    /// fractions of the achievable ranges.
    BoundaryRange,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarizationSpec<T> {
    pub theta: Theta<T>,
    /// Weight on the rate gap.
    pub alpha: T,
    pub a_weight: T,
    pub b_weight: T,
    pub power_cost: PowerCost<T>,
    pub normalization: Normalization,
}

impl<T: Real> ScalarizationSpec<T> {
    pub fn new(theta: Theta<T>, alpha: T) -> Result<Self> {
        let spec = Self {
            theta,
            alpha,
            a_weight: T::one(),
            b_weight: T::one(),
            power_cost: PowerCost::ShannonLog,
            normalization: Normalization::None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Shannon power cost with both objectives scaled to their boundary range.
    pub fn normalized(theta: Theta<T>, alpha: T) -> Result<Self> {
        Ok(Self {
            normalization: Normalization::BoundaryRange,
            ..Self::new(theta, alpha)?
        })
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_power_cost(mut self, power_cost: PowerCost<T>) -> Self {
        self.power_cost = power_cost;
        self
    }

    pub fn with_weights(mut self, a: T, b: T) -> Self {
        self.a_weight = a;
        self.b_weight = b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= T::zero() && self.alpha <= T::one()) {
            return Err(Error::domain(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.a_weight > T::zero() && self.b_weight > T::zero()) {
            return Err(Error::domain("weights A and B must be positive"));
        }
        if let Theta::Finite(t) = self.theta {
            if !(t >= T::one()) {
                return Err(Error::domain(format!("theta must be >= 1, got {t}")));
            }
        }
        if let PowerCost::RawDbLog { floor_db } = self.power_cost {
            if !(floor_db > T::zero()) {
                return Err(Error::domain("power-cost floor must be positive"));
            }
        }
        Ok(())
    }

    /// Folds the normalization into `A` and `B` for a given boundary.
    pub fn resolve(&self, boundary: &ParetoBoundary<T>) -> Self {
        if self.normalization == Normalization::None {
            return *self;
        }
        let spread = |f: &dyn Fn(&ParetoPoint<T>) -> T| {
            let (lo, hi) = boundary
                .points
                .iter()
                .map(f)
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if hi > lo {
                hi - lo
            } else {
                T::one()
            }
        };
        let dr = spread(&|p| p.delta_r);
        let dp = spread(&|p| self.power_cost.cost(p.delta_rho_db));
        Self {
            a_weight: self.a_weight / dr,
            b_weight: self.b_weight / dp,
            normalization: Normalization::None,
            ..*self
        }
    }
}

/// Weighted-ℓθ value of one point; normalization must already be resolved.
pub fn scalarize<T: Real>(point: &ParetoPoint<T>, spec: &ScalarizationSpec<T>) -> T {
    let u = spec.a_weight * spec.alpha * point.delta_r;
    let v = spec.b_weight * (T::one() - spec.alpha) * spec.power_cost.cost(point.delta_rho_db);
    match spec.theta {
        Theta::One => u + v,
        Theta::Inf => u.max(v),
        Theta::Finite(t) => (u.max(T::zero()).powf(t) + v.max(T::zero()).powf(t)).powf(T::one() / t),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmissionPair<T> {
    pub rate: T,
    pub snr_db: T,
    pub point: ParetoPoint<T>,
    /// Index on the boundary grid.
    pub index: usize,
}

/// Minimizer of the scalarization over the boundary; ties go to smaller `Δρ`.
pub fn optimize_on<T: Real>(boundary: &ParetoBoundary<T>, spec: &ScalarizationSpec<T>) -> TransmissionPair<T> {
    let resolved = spec.resolve(boundary);
    argmin_resolved(boundary, &resolved)
}

pub(crate) fn argmin_resolved<T: Real>(
    boundary: &ParetoBoundary<T>,
    resolved: &ScalarizationSpec<T>,
) -> TransmissionPair<T> {
    let mut best = 0;
    let mut best_val = T::infinity();
    for (i, p) in boundary.points.iter().enumerate() {
        let v = scalarize(p, resolved);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let point = boundary.points[best];
    TransmissionPair {
        rate: point.rate,
        snr_db: point.snr_db,
        point,
        index: best,
    }
}

/// Builds the boundary and returns the scalarization minimizer.
pub fn optimize<T: Real>(
    channel: &ConstrainedChannel<T>,
    reference: &ReferencePair<T>,
    spec: &ScalarizationSpec<T>,
    step_db: T,
) -> Result<TransmissionPair<T>> {
    spec.validate()?;
    Ok(optimize_on(&pareto_boundary(channel, reference, step_db)?, spec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeKind {
    /// `ρ_s ≤ ρ_i`: concave boundary.
    Low,
    Medium,
    /// `ρ_s > ρ_i + Δρ_i^min`: convex boundary.
    High,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regime<T> {
    pub kind: RegimeKind,
    /// Inflection SNR of the rate curve, dB.
    pub rho_i_db: T,
    /// `ρ_i + Δρ_i^min`, dB.
    pub upper_db: T,
}

/// Places `ρ_s` relative to the inflection point and its shifted copy.
pub fn classify_regime<T: Real>(
    channel: &ConstrainedChannel<T>,
    reference: &ReferencePair<T>,
) -> Result<Regime<T>> {
    let rho_i = channel.na.inflection_snr()?.value();
    let rate_i = channel.na.max_rate_db(rho_i);
    let upper = rho_i + channel.delta_rho_min(rate_i);
    let rho_s = reference.rho_s_db;
    let kind = if rho_s <= rho_i {
        RegimeKind::Low
    } else if rho_s > upper {
        RegimeKind::High
    } else {
        RegimeKind::Medium
    };
    Ok(Regime {
        kind,
        rho_i_db: rho_i,
        upper_db: upper,
    })
}

/// Distinct boundary indices selected as `α` sweeps `alphas`, ascending.
pub fn accessible_points<T: Real>(
    boundary: &ParetoBoundary<T>,
    spec: &ScalarizationSpec<T>,
    alphas: &[T],
) -> Vec<usize> {
    let resolved = spec.resolve(boundary);
    let mut hit: Vec<usize> = alphas
        .par_iter()
        .map(|&a| argmin_resolved(boundary, &resolved.with_alpha(a)).index)
        .collect();
    hit.sort_unstable();
    hit.dedup();
    hit
}

/// `start, start + step, …` up to and including `stop` (within 1e-9 of a step).
pub fn linear_grid<T: Real>(start: T, step: T, stop: T) -> Vec<T> {
    if !(step > T::zero()) || stop < start {
        return vec![start];
    }
    let count = ((stop - start) / step + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
    (0..=count)
        .map(|i| start + step * T::from_usize_lossy(i))
        .collect()
}
