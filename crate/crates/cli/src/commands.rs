use std::fmt::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use urllc_core::battery_sim::{
    run_simulation, AlphaSchedule, BatteryScale, LinkBudget, Policy, SimConfig, StepMode,
};
use urllc_core::codec::{bch_code, extend_code, parse_code, write_code};
use urllc_core::fb_bounds::{NormalApproximation, QuadratureSpec, SnrDb};
use urllc_core::moop::{
    classify_regime, optimize_on, pareto_boundary, Normalization, PowerCost, ReferencePair,
    ScalarizationSpec, Theta,
};
use urllc_core::os_decoder::{complexity_per_info_bit, estimate_cep, CepRun, DecoderConfig, Metric};
use urllc_core::tradeoff::{self, ConstrainedChannel, ConstraintSet, GapPoint, TradeoffModel};
use urllc_core::Reprocessing;

use crate::config::{parse_grid, parse_kv, parse_usize_list, Settings};
use crate::{CliError, SystemArgs};

fn header(command: &str, s: &Settings) -> String {
    format!("# urllc {command} {}\n", s.echo())
}

fn path_text(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
}

pub fn bounds(
    s: &mut Settings,
    n: Option<usize>,
    eps: Option<f64>,
    snr_db: Option<String>,
    order: Option<usize>,
) -> Result<String, CliError> {
    let n = s.get("n", n, 128)?;
    let eps = s.get("eps", eps, 1e-5)?;
    let grid_text = s.get("snr_db", snr_db, "-2:0.1:8".to_string())?;
    let order = s.get("order", order, QuadratureSpec::<f64>::DEFAULT_ORDER)?;
    let grid = parse_grid(&grid_text)?;
    let na = NormalApproximation::with_quadrature(n, eps, QuadratureSpec::new(order)?)?;
    let rows: Vec<String> = grid
        .par_iter()
        .map(|&db| {
            let m = na.moments(SnrDb(db).to_linear());
            format!("{db},{},{},{}\n", m.capacity, m.dispersion, na.max_rate_db(db))
        })
        .collect();
    let mut out = header("bounds", s);
    out.push_str("snr_db,capacity,dispersion,rate\n");
    out.extend(rows);
    Ok(out)
}

pub fn codec_build(s: &mut Settings, m: Option<u32>, t: Option<usize>, extend: bool) -> Result<String, CliError> {
    let m = s.require("m", m)?;
    let t = s.require("t", t)?;
    let extend = s.get("extend", extend.then_some(true), false)?;
    let base = bch_code(m, t)?;
    let code = if extend { extend_code(&base) } else { base };
    Ok(format!("{}{}", header("codec build", s), write_code(&code)))
}

pub struct CepArgs {
    pub code: Option<PathBuf>,
    pub order: Option<String>,
    pub snr_db: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub target_errors: Option<u64>,
    pub metric: Option<String>,
    pub reprocessing: Option<String>,
    pub q: Option<u32>,
}

pub fn simulate_cep(s: &mut Settings, a: CepArgs) -> Result<String, CliError> {
    let code_path: String = s.require("code", a.code.map(|p| p.display().to_string()))?;
    let orders = parse_usize_list(&s.get("order", a.order, "0".to_string())?)?;
    let grid = parse_grid(&s.require::<String>("snr_db", a.snr_db)?)?;
    let trials = s.get("trials", a.trials, 10_000u64)?;
    let seed: u64 = s.require("seed", a.seed)?;
    let target = s.opt("target_errors", a.target_errors)?;
    let metric = match s.get("metric", a.metric, "soft".to_string())?.as_str() {
        "soft" => Metric::Soft,
        "hamming" => Metric::Hamming,
        other => return Err(CliError::Usage(format!("unknown metric `{other}`"))),
    };
    let reprocessing = match s.get("reprocessing", a.reprocessing, "exhaustive".to_string())?.as_str() {
        "exhaustive" => Reprocessing::Exhaustive,
        "fast" => Reprocessing::Fast,
        other => return Err(CliError::Usage(format!("unknown reprocessing `{other}`"))),
    };
    let q = s.get("q", a.q, DecoderConfig::DEFAULT_Q)?;
    if trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    let code = parse_code(&path_text(Path::new(&code_path))?)?;

    let mut out = header("simulate-cep", s);
    let _ = writeln!(out, "# code n={} k={}", code.n(), code.k());
    out.push_str("snr_db,order,trials,errors,cep,ci_low,ci_high,k_complexity\n");
    for &order in &orders {
        if order > code.k() {
            return Err(CliError::Usage(format!("order {order} exceeds k = {}", code.k())));
        }
        let mut cfg = DecoderConfig::new(order).with_metric(metric).with_q(q);
        cfg.reprocessing = reprocessing;
        let k_cost = complexity_per_info_bit(code.n(), code.k(), order, q)?;
        for &db in &grid {
            let mut run = CepRun::new(trials, seed);
            if let Some(t) = target {
                run = run.stop_after(t);
            }
            let e = estimate_cep(&code, &cfg, SnrDb(db).to_linear(), run);
            let _ = writeln!(
                out,
                "{db},{order},{},{},{},{},{},{k_cost}",
                e.trials, e.errors, e.cep, e.ci_low, e.ci_high
            );
        }
    }
    Ok(out)
}

/// Reads `delta_rho_db,log2_k` rows; columns are located by header name when present.
fn read_points(text: &str) -> Result<Vec<GapPoint<f64>>, CliError> {
    let mut cols = (0usize, 1usize);
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.iter().any(|f| f.parse::<f64>().is_err()) {
            if points.is_empty() {
                let find = |name: &str| fields.iter().position(|f| *f == name);
                if let (Some(a), Some(b)) = (find("delta_rho_db"), find("log2_k")) {
                    cols = (a, b);
                    continue;
                }
            }
            return Err(CliError::Input(format!("points line {}: expected numbers", i + 1)));
        }
        let get = |c: usize| {
            fields
                .get(c)
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| CliError::Input(format!("points line {}: missing column {}", i + 1, c + 1)))
        };
        points.push(GapPoint {
            delta_rho_db: get(cols.0)?,
            log2_k: get(cols.1)?,
        });
    }
    Ok(points)
}

pub fn fit_model(s: &mut Settings, points: Option<PathBuf>) -> Result<String, CliError> {
    let path: String = s.require("points", points.map(|p| p.display().to_string()))?;
    let pts = read_points(&path_text(Path::new(&path))?)?;
    let model = tradeoff::fit_model(&pts)?;
    let mut out = header("fit-model", s);
    let _ = writeln!(out, "# points={}", pts.len());
    let _ = writeln!(out, "a={}", model.a);
    let _ = writeln!(out, "b={}", model.b);
    let _ = writeln!(out, "residual={}", model.fit_residual.unwrap_or(f64::NAN));
    Ok(out)
}

fn load_model(spec: &str) -> Result<TradeoffModel<f64>, CliError> {
    if spec == "preset" {
        return Ok(TradeoffModel::preset());
    }
    let kv = parse_kv(&path_text(Path::new(spec))?).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{spec}: {m}")),
        other => other,
    })?;
    let num = |k: &str| -> Result<f64, CliError> {
        kv.get(k)
            .ok_or_else(|| CliError::Input(format!("{spec}: missing `{k}`")))?
            .parse()
            .map_err(|_| CliError::Input(format!("{spec}: `{k}` is not a number")))
    };
    let mut model = TradeoffModel::new(num("a")?, num("b")?)?;
    model.fit_residual = kv.get("residual").and_then(|r| r.parse().ok());
    Ok(model)
}

fn system(s: &mut Settings, a: &SystemArgs) -> Result<ConstrainedChannel<f64>, CliError> {
    let base = ConstraintSet::<f64>::reference();
    let n = s.get("n", a.n, 128usize)?;
    let constraints = ConstraintSet {
        l_m: s.get("l_m", a.l_m, base.l_m)?,
        eps_m: s.get("eps_m", a.eps_m, base.eps_m)?,
        t_s: s.get("t_s", a.t_s, base.t_s)?,
        t_b: s.get("t_b", a.t_b, base.t_b)?,
        r_m: s.get("r_m", a.r_m, base.r_m)?,
        rho_m_db: s.get("rho_m_db", a.rho_m_db, base.rho_m_db)?,
    };
    let model = load_model(&s.get("model", a.model.clone(), "preset".to_string())?)?;
    Ok(ConstrainedChannel::new(n, model, constraints)?)
}

pub fn constrained_rate(s: &mut Settings, a: &SystemArgs, snr_db: Option<String>) -> Result<String, CliError> {
    let ch = system(s, a)?;
    let grid = parse_grid(&s.get("snr_db", snr_db, "-2:0.1:12".to_string())?)?;
    let rows: Vec<String> = grid
        .par_iter()
        .map(|&db| {
            let m = ch.constrained_max_rate(db);
            format!("{db},{},{m},{}\n", ch.max_rate_db(db), ch.delta_rho_min(m))
        })
        .collect();
    let mut out = header("constrained-rate", s);
    out.push_str("snr_db,rate_unconstrained,rate_constrained,delta_rho_min_db\n");
    out.extend(rows);
    Ok(out)
}

fn reference(s: &mut Settings, ch: &ConstrainedChannel<f64>, rate: Option<f64>) -> Result<ReferencePair<f64>, CliError> {
    let r_s: f64 = s.require("rate", rate)?;
    if !(r_s > 0.0 && r_s < 1.0) {
        return Err(CliError::Usage(format!("rate must lie in (0, 1), got {r_s}")));
    }
    Ok(ReferencePair::new(ch, r_s)?)
}

pub fn pareto(s: &mut Settings, a: &SystemArgs, rate: Option<f64>, step_db: Option<f64>) -> Result<String, CliError> {
    let ch = system(s, a)?;
    let reference = reference(s, &ch, rate)?;
    let step = s.get("step_db", step_db, 0.01)?;
    let boundary = pareto_boundary(&ch, &reference, step)?;
    let regime = classify_regime(&ch, &reference)?;
    let mut out = header("pareto", s);
    let _ = writeln!(
        out,
        "# rho_s_db={} delta_r_s_min={} delta_rho_s_min_db={} regime={:?} rho_i_db={} upper_db={}",
        reference.rho_s_db,
        boundary.delta_r_s_min,
        boundary.delta_rho_s_min,
        regime.kind,
        regime.rho_i_db,
        regime.upper_db
    );
    out.push_str("delta_rho_db,delta_r,rate,snr_db\n");
    for p in &boundary.points {
        let _ = writeln!(out, "{},{},{},{}", p.delta_rho_db, p.delta_r, p.rate, p.snr_db);
    }
    Ok(out)
}

fn parse_theta(text: &str) -> Result<Theta<f64>, CliError> {
    match text {
        "1" => Ok(Theta::One),
        "inf" => Ok(Theta::Inf),
        other => match other.parse::<f64>() {
            Ok(t) if t == 1.0 => Ok(Theta::One),
            Ok(t) if t.is_infinite() && t > 0.0 => Ok(Theta::Inf),
            Ok(t) if t > 1.0 => Ok(Theta::Finite(t)),
            _ => Err(CliError::Usage(format!("theta must be 1, inf or a number >= 1, got `{other}`"))),
        },
    }
}

fn scalarization(s: &mut Settings, theta: Theta<f64>, power_cost: Option<String>, normalize: Option<String>) -> Result<ScalarizationSpec<f64>, CliError> {
    let cost = match s.get("power_cost", power_cost, "shannon".to_string())?.as_str() {
        "shannon" => PowerCost::ShannonLog,
        "raw" => PowerCost::raw_db_log(),
        other => return Err(CliError::Usage(format!("unknown power cost `{other}`"))),
    };
    let normalization = match s.get("normalize", normalize, "boundary".to_string())?.as_str() {
        "boundary" => Normalization::BoundaryRange,
        "none" => Normalization::None,
        other => return Err(CliError::Usage(format!("unknown normalization `{other}`"))),
    };
    let spec = ScalarizationSpec {
        normalization,
        ..ScalarizationSpec::new(theta, 1.0)?.with_power_cost(cost)
    };
    Ok(spec)
}

pub struct SweepArgs {
    pub rate: Option<f64>,
    pub theta: Option<String>,
    pub alphas: Option<String>,
    pub step_db: Option<f64>,
    pub power_cost: Option<String>,
    pub normalize: Option<String>,
}

pub fn scalarize_sweep(s: &mut Settings, a: &SystemArgs, w: SweepArgs) -> Result<String, CliError> {
    let ch = system(s, a)?;
    let reference = reference(s, &ch, w.rate)?;
    let theta = parse_theta(&s.get("theta", w.theta, "1".to_string())?)?;
    let alphas = parse_grid(&s.get("alphas", w.alphas, "0:0.005:1".to_string())?)?;
    if alphas.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(CliError::Usage("alphas must lie in [0, 1]".into()));
    }
    let step = s.get("step_db", w.step_db, 0.01)?;
    let spec = scalarization(s, theta, w.power_cost, w.normalize)?;
    let boundary = pareto_boundary(&ch, &reference, step)?;
    let picks: Vec<_> = alphas
        .par_iter()
        .map(|&alpha| optimize_on(&boundary, &spec.with_alpha(alpha)))
        .collect();
    let mut distinct: Vec<usize> = picks.iter().map(|p| p.index).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let mut out = header("scalarize-sweep", s);
    let _ = writeln!(out, "# boundary_points={} distinct_minimizers={}", boundary.len(), distinct.len());
    out.push_str("alpha,chosen_delta_r,chosen_delta_rho_db\n");
    for (alpha, p) in alphas.iter().zip(&picks) {
        let _ = writeln!(out, "{alpha},{},{}", p.point.delta_r, p.point.delta_rho_db);
    }
    Ok(out)
}

pub struct BatteryArgs {
    pub rate: Option<f64>,
    pub theta: Option<String>,
    pub capacity_wh: Option<f64>,
    pub distance_m: Option<f64>,
    pub pathloss_exponent: Option<f64>,
    pub pathloss_ref_db: Option<f64>,
    pub noise_dbm: Option<f64>,
    pub alpha_scale: Option<String>,
    pub normalize_alpha: Option<bool>,
    pub mode: Option<String>,
    pub step_db: Option<f64>,
}

pub fn battery(s: &mut Settings, a: &SystemArgs, b: BatteryArgs) -> Result<String, CliError> {
    let ch = system(s, a)?;
    let reference = reference(s, &ch, b.rate)?;
    let theta_text = s.get("theta", b.theta, "inf".to_string())?;
    let capacity_wh = s.get("capacity_wh", b.capacity_wh, 1.0)?;
    let d = LinkBudget::default();
    let link = LinkBudget {
        distance_m: s.get("distance_m", b.distance_m, d.distance_m)?,
        pathloss_exponent: s.get("pathloss_exponent", b.pathloss_exponent, d.pathloss_exponent)?,
        pathloss_ref_db: s.get("pathloss_ref_db", b.pathloss_ref_db, d.pathloss_ref_db)?,
        noise_dbm: s.get("noise_dbm", b.noise_dbm, d.noise_dbm)?,
    };
    let scale = match s.get("alpha_scale", b.alpha_scale, "fraction".to_string())?.as_str() {
        "fraction" => BatteryScale::Fraction,
        "percent" => BatteryScale::Percent,
        other => return Err(CliError::Usage(format!("unknown alpha scale `{other}`"))),
    };
    let normalize = s.get("normalize_alpha", b.normalize_alpha, true)?;
    let mode = match s.get("mode", b.mode, "batched".to_string())?.as_str() {
        "batched" => StepMode::Batched,
        "per-codeword" => StepMode::PerCodeword,
        other => return Err(CliError::Usage(format!("unknown mode `{other}`"))),
    };
    let step = s.get("step_db", b.step_db, 0.01)?;
    let schedule = AlphaSchedule { scale, normalize };
    let (theta, policy) = match theta_text.as_str() {
        "fixed0" => (Theta::Inf, Policy::Fixed(0.0)),
        "fixed1" => (Theta::Inf, Policy::Fixed(1.0)),
        other => (parse_theta(other)?, Policy::Adaptive(schedule)),
    };
    if !(capacity_wh > 0.0 && capacity_wh.is_finite()) {
        return Err(CliError::Usage("capacity_wh must be positive".into()));
    }
    let config = SimConfig {
        spec: ScalarizationSpec::normalized(theta, 1.0)?,
        policy,
        link,
        capacity_joules: capacity_wh * 3600.0,
        step_db: step,
        mode,
    };
    let result = run_simulation(&ch, &reference, &config)?;
    let mut out = header("battery", s);
    out.push_str("step,t,alpha,rate,snr_db,energy_j,codewords\n");
    for seg in &result.segments {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            seg.first_step, seg.t, seg.alpha, seg.rate, seg.snr_db, seg.energy_j, seg.codewords
        );
    }
    let _ = writeln!(
        out,
        "# summary transmissions={} bits={} bits_per_joule={}",
        result.total_transmissions, result.total_info_bits, result.efficiency_bits_per_joule
    );
    Ok(out)
}
