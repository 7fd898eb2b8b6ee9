//! Battery-powered transmission with battery-dependent MOOP weights.
//!
//! Each codeword picks a Pareto-optimal `{r, ρ}` pair with weight
//! `α(t) = 1 − (1 + (t/(1+t))²)⁻¹`, where `t` is the remaining battery.
//! The selection depends on `t` only through `α`, so runs of codewords with the
//! same selection are accounted in one segment; [`StepMode::PerCodeword`]
//! walks the battery one codeword at a time instead.

use crate::error::{Error, Result};
use crate::moop::{argmin_resolved, pareto_boundary, ParetoBoundary, ReferencePair, ScalarizationSpec};
use crate::scalar::Real;
use crate::tradeoff::ConstrainedChannel;

const JOULES_PER_WATT_HOUR: f64 = 3600.0;

/// Sigmoid weight for remaining battery `t ∈ [0, 1]`.
pub fn alpha_from_battery<T: Real>(t: T) -> Result<T> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::domain(format!("battery level must lie in [0, 1], got {t}")));
    }
    Ok(sigmoid(t))
}

fn sigmoid<T: Real>(t: T) -> T {
    let u = t / (T::one() + t);
    T::one() - T::one() / (T::one() + u * u)
}

/// Unit of `t` fed to the sigmoid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BatteryScale {
    /// `t ∈ [0, 1]`.
    #[default]
    Fraction,
    /// `t ∈ [0, 100]`.
    Percent,
}

/// Maps the remaining battery fraction to a weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlphaSchedule {
    pub scale: BatteryScale,
    /// Divide by the full-battery weight so `α` spans `[0, 1]`.
    pub normalize: bool,
}

impl Default for AlphaSchedule {
    fn default() -> Self {
        Self {
            scale: BatteryScale::Fraction,
            normalize: true,
        }
    }
}

impl AlphaSchedule {
    pub fn raw() -> Self {
        Self {
            normalize: false,
            ..Self::default()
        }
    }

    /// Weight at remaining fraction `fraction ∈ [0, 1]`.
    pub fn alpha(&self, fraction: f64) -> f64 {
        let x = fraction.clamp(0.0, 1.0);
        let (t, full) = match self.scale {
            BatteryScale::Fraction => (x, 1.0),
            BatteryScale::Percent => (100.0 * x, 100.0),
        };
        let a = sigmoid(t);
        if self.normalize {
            a / sigmoid(full)
        } else {
            a
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget {
    /// Path loss at 1 m, dB.
    pub pathloss_ref_db: f64,
    pub pathloss_exponent: f64,
    pub noise_dbm: f64,
    pub distance_m: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            pathloss_ref_db: 30.0,
            pathloss_exponent: 2.0,
            noise_dbm: -110.0,
            distance_m: 100.0,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance_m >= 1.0) {
            return Err(Error::domain(format!("distance must be at least 1 m, got {}", self.distance_m)));
        }
        if !(self.pathloss_exponent > 0.0) {
            return Err(Error::domain("path-loss exponent must be positive"));
        }
        if !(self.pathloss_ref_db.is_finite() && self.noise_dbm.is_finite()) {
            return Err(Error::domain("link budget terms must be finite"));
        }
        Ok(())
    }

    /// Total loss between transmitter and receiver, dB.
    pub fn pathloss_db(&self) -> f64 {
        self.pathloss_ref_db + 10.0 * self.pathloss_exponent * self.distance_m.log10()
    }

    /// Transmit power, watts, that yields SNR `rho_db` at the receiver.
    pub fn tx_power_watts(&self, rho_db: f64) -> f64 {
        let dbm = rho_db + self.noise_dbm + self.pathloss_db();
        10f64.powf(dbm / 10.0) * 1e-3
    }
}

pub fn tx_power_watts(rho_db: f64, link: &LinkBudget) -> f64 {
    link.tx_power_watts(rho_db)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatteryState {
    pub capacity_joules: f64,
    pub remaining_joules: f64,
}

impl BatteryState {
    pub fn full(capacity_joules: f64) -> Result<Self> {
        if !(capacity_joules > 0.0 && capacity_joules.is_finite()) {
            return Err(Error::domain(format!("battery capacity must be positive, got {capacity_joules}")));
        }
        Ok(Self {
            capacity_joules,
            remaining_joules: capacity_joules,
        })
    }

    pub fn from_watt_hours(wh: f64) -> Result<Self> {
        Self::full(wh * JOULES_PER_WATT_HOUR)
    }

    /// Remaining fraction.
    pub fn t(&self) -> f64 {
        self.remaining_joules / self.capacity_joules
    }
}

/// How `α` is chosen at each codeword.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Policy {
    Adaptive(AlphaSchedule),
    Fixed(f64),
}

impl Policy {
    pub fn alpha(&self, fraction: f64) -> f64 {
        match *self {
            Policy::Adaptive(s) => s.alpha(fraction),
            Policy::Fixed(a) => a,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StepMode {
    /// Runs of identical selections found by exponential search and bisection.
    #[default]
    Batched,
    /// One codeword per iteration.
    PerCodeword,
}

/// Consecutive codewords sent with the same pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    /// Index of the first codeword of the run.
    pub first_step: u64,
    pub codewords: u64,
    /// Battery fraction and weight before the first codeword.
    pub t: f64,
    pub alpha: f64,
    pub rate: f64,
    pub snr_db: f64,
    pub delta_r: f64,
    pub delta_rho_db: f64,
    pub boundary_index: usize,
    pub energy_per_codeword_j: f64,
    /// `codewords · energy_per_codeword_j`.
    pub energy_j: f64,
}

#[derive(Clone, Debug)]
pub struct SimResult {
    pub n: usize,
    pub r_s: f64,
    pub total_transmissions: u64,
    /// `n Σ r`, not rounded to integers.
    pub total_info_bits: f64,
    pub segments: Vec<Segment>,
    pub battery: BatteryState,
    pub efficiency_bits_per_joule: f64,
}

impl SimResult {
    /// Number of rate changes between consecutive segments.
    pub fn rate_transitions(&self) -> usize {
        self.segments.windows(2).filter(|w| w[0].rate != w[1].rate).count()
    }

    pub fn distinct_rates(&self) -> usize {
        let mut rates: Vec<f64> = self.segments.iter().map(|s| s.rate).collect();
        rates.sort_by(f64::total_cmp);
        rates.dedup();
        rates.len()
    }

    pub fn energy_used_j(&self) -> f64 {
        self.segments.iter().map(|s| s.energy_j).sum()
    }
}

/// `n Σ r_step` over the battery capacity in joules.
pub fn energy_efficiency(result: &SimResult, battery: &BatteryState) -> f64 {
    if result.total_transmissions == 0 {
        return 0.0;
    }
    result.total_info_bits / battery.capacity_joules
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig<T> {
    pub spec: ScalarizationSpec<T>,
    pub policy: Policy,
    pub link: LinkBudget,
    pub capacity_joules: f64,
    pub step_db: T,
    pub mode: StepMode,
}

/// Battery loop over a fixed Pareto boundary.
pub struct Simulator<T> {
    boundary: ParetoBoundary<T>,
    resolved: ScalarizationSpec<T>,
    energy: Vec<f64>,
    n: usize,
    policy: Policy,
}

impl<T: Real> Simulator<T> {
    pub fn new(
        channel: &ConstrainedChannel<T>,
        reference: &ReferencePair<T>,
        config: &SimConfig<T>,
    ) -> Result<Self> {
        config.link.validate()?;
        config.spec.validate()?;
        if let Policy::Fixed(a) = config.policy {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::domain(format!("alpha must lie in [0, 1], got {a}")));
            }
        }
        let boundary = pareto_boundary(channel, reference, config.step_db)?;
        let resolved = config.spec.resolve(&boundary);
        let n = channel.n();
        let duration = n as f64 * channel.constraints.t_s.as_f64();
        let energy = boundary
            .points
            .iter()
            .map(|p| config.link.tx_power_watts(p.snr_db.as_f64()) * duration)
            .collect();
        Ok(Self {
            boundary,
            resolved,
            energy,
            n,
            policy: config.policy,
        })
    }

    pub fn boundary(&self) -> &ParetoBoundary<T> {
        &self.boundary
    }

    /// Boundary index selected at battery fraction `fraction`.
    pub fn choose(&self, fraction: f64) -> usize {
        let alpha = T::lit(self.policy.alpha(fraction));
        argmin_resolved(&self.boundary, &self.resolved.with_alpha(alpha)).index
    }

    /// Energy of one codeword at boundary index `i`, joules.
    pub fn codeword_energy(&self, i: usize) -> f64 {
        self.energy[i]
    }

    pub fn run(&self, battery: BatteryState, mode: StepMode) -> SimResult {
        let cap = battery.capacity_joules;
        let mut rem = battery.remaining_joules;
        let mut segments: Vec<Segment> = Vec::new();
        let mut step = 0u64;
        loop {
            let t = rem / cap;
            let i = self.choose(t);
            let e = self.energy[i];
            if !(e > 0.0) || e > rem {
                break;
            }
            let m = match mode {
                StepMode::Batched => self.run_length(i, rem, e, cap),
                StepMode::PerCodeword => 1,
            };
            let energy_j = m as f64 * e;
            match segments.last_mut() {
                Some(last) if mode == StepMode::PerCodeword && last.boundary_index == i => {
                    last.codewords += 1;
                    last.energy_j += e;
                }
                _ => {
                    let p = self.boundary.points[i];
                    segments.push(Segment {
                        first_step: step,
                        codewords: m,
                        t,
                        alpha: self.policy.alpha(t),
                        rate: p.rate.as_f64(),
                        snr_db: p.snr_db.as_f64(),
                        delta_r: p.delta_r.as_f64(),
                        delta_rho_db: p.delta_rho_db.as_f64(),
                        boundary_index: i,
                        energy_per_codeword_j: e,
                        energy_j,
                    });
                }
            }
            rem -= energy_j;
            step += m;
        }
        let total_info_bits = self.n as f64
            * segments.iter().map(|s| s.codewords as f64 * s.rate).sum::<f64>();
        let battery = BatteryState {
            capacity_joules: cap,
            remaining_joules: rem,
        };
        let mut result = SimResult {
            n: self.n,
            r_s: self.boundary.reference.r_s.as_f64(),
            total_transmissions: step,
            total_info_bits,
            segments,
            battery,
            efficiency_bits_per_joule: 0.0,
        };
        result.efficiency_bits_per_joule = energy_efficiency(&result, &battery);
        result
    }

    /// Codewords sent with selection `i` starting from `rem` joules.
    fn run_length(&self, i: usize, rem: f64, e: f64, cap: f64) -> u64 {
        let affordable = (rem / e).floor() as u64;
        if affordable <= 1 {
            return 1;
        }
        let last = affordable - 1;
        let same = |j: u64| self.choose((rem - j as f64 * e) / cap) == i;
        let (mut lo, mut step) = (0u64, 1u64);
        let mut hi = loop {
            let c = lo.saturating_add(step);
            if c > last {
                break last + 1;
            }
            if !same(c) {
                break c;
            }
            lo = c;
            step = step.saturating_mul(2);
        };
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if same(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi = lo + 1;
        hi
    }
}

/// Builds the boundary and drains a full battery.
pub fn run_simulation<T: Real>(
    channel: &ConstrainedChannel<T>,
    reference: &ReferencePair<T>,
    config: &SimConfig<T>,
) -> Result<SimResult> {
    let battery = BatteryState::full(config.capacity_joules)?;
    let sim = Simulator::new(channel, reference, config)?;
    let first = sim.choose(1.0);
    if sim.codeword_energy(first) > battery.capacity_joules {
        return Err(Error::infeasible("battery cannot fund a single codeword"));
    }
    Ok(sim.run(battery, config.mode))
}
