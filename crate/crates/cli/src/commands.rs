use std::f64::consts::LN_2;

use serde_json::{json, Value};

use eigenrate::mclab::{estimate_tail, spectrum_histogram, zero_eigen_rate, Method, Side};
use eigenrate::rate::{
    grid_covering, phase_transition_alpha_star, phase_transition_alpha_star_k, rate_k,
    rogers_covering, rate_two_sparse, RateOptions, Tilt,
};
use eigenrate::rng::stream_rng;
use eigenrate::sdpic::{ber_experiment, stage_trace, Stages, Transmission, STAGE_CAP};
use eigenrate::{EntryDistribution, SampleMatrix};

use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;
use crate::output::{num, opt_num, Table};

/// Stages traced for `sdpic --trace` in the `s = ∞` mode.
const INFINITE_TRACE_STAGES: usize = 100;

/// Executes a configuration and returns its result table.
pub fn run(config: &ExperimentConfig) -> Result<Table, CliError> {
    match config.command {
        Command::Rate => rate(config),
        Command::Phase => phase(config),
        Command::Mc => mc(config),
        Command::Zero => zero(config),
        Command::Sdpic => sdpic(config),
        Command::Covering => covering(config),
        Command::Hist => hist(config),
    }
}

fn tilt_value(t: Tilt) -> Value {
    match t {
        Tilt::Finite(v) => num(v),
        Tilt::PlusInfinity => "inf".into(),
        Tilt::MinusInfinity => "-inf".into(),
    }
}

fn rate_options(config: &ExperimentConfig) -> RateOptions {
    let mut opts = RateOptions {
        seed: config.seed,
        ..RateOptions::default()
    };
    if let Some(r) = config.restarts {
        opts.random_restarts = r;
    }
    opts
}

fn rate(config: &ExperimentConfig) -> Result<Table, CliError> {
    let dist = config.dist()?;
    let ks: &[usize] = if config.k.is_empty() { &[2] } else { &config.k };
    let alphas = config.alphas()?;
    let opts = rate_options(config);
    let mut table = Table::new(&[
        "dist",
        "k",
        "alpha",
        "rate",
        "t_star",
        "converged",
        "restarts_used",
        "x_star",
    ]);
    for &k in ks {
        for &alpha in alphas {
            let r = rate_k(dist, k, alpha, &opts)?;
            table.push(vec![
                dist.name().into(),
                k.into(),
                num(alpha),
                num(r.rate.as_f64()),
                tilt_value(r.t_star),
                r.converged.into(),
                r.restarts_used.into(),
                Value::Array(r.x_star.coords().iter().map(|&v| num(v)).collect()),
            ]);
        }
    }
    Ok(table)
}

fn phase(config: &ExperimentConfig) -> Result<Table, CliError> {
    let mut table = Table::new(&["k", "alpha_star", "coincident", "two_sparse_rate", "sphere_rate"]);
    if config.k.is_empty() {
        let a = phase_transition_alpha_star();
        table.push(vec![
            "inf".into(),
            num(a),
            false.into(),
            num(rate_two_sparse(a)?),
            Value::Null,
        ]);
        return Ok(table);
    }
    let opts = config.restarts.map(|_| rate_options(config));
    for &k in &config.k {
        let p = phase_transition_alpha_star_k(k, opts.as_ref())?;
        table.push(vec![
            k.into(),
            num(p.alpha_star),
            p.coincident.into(),
            num(p.two_sparse_rate),
            opt_num(p.sphere_rate),
        ]);
    }
    Ok(table)
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::MinBelow => "min",
        Side::MaxAbove => "max",
    }
}

fn mc(config: &ExperimentConfig) -> Result<Table, CliError> {
    let dist = config.dist()?;
    let side = config.side.unwrap_or(Side::MaxAbove);
    let trials = config.trials()?;
    let alphas = config.alphas()?;
    let ns = config.ns()?;
    let mut table = Table::new(&[
        "experiment",
        "dist",
        "k",
        "n",
        "alpha",
        "side",
        "trials",
        "hits",
        "p_hat",
        "ci",
        "empirical_rate",
        "seed",
    ]);
    for &k in config.ks()? {
        for &n in ns {
            for &alpha in alphas {
                let e = estimate_tail(dist, k, n, alpha, side, trials, config.seed)?;
                table.push(vec![
                    "mc".into(),
                    dist.name().into(),
                    k.into(),
                    n.into(),
                    num(alpha),
                    side_name(side).into(),
                    e.trials.into(),
                    e.hits.into(),
                    num(e.p_hat),
                    json!([num(e.ci_low), num(e.ci_high)]),
                    opt_num(e.empirical_rate),
                    e.seed.into(),
                ]);
            }
        }
    }
    Ok(table)
}

fn zero(config: &ExperimentConfig) -> Result<Table, CliError> {
    let l = config.l.unwrap_or(1);
    let trials = config.trials.unwrap_or(0);
    let mut table = Table::new(&[
        "experiment",
        "dist",
        "k",
        "l",
        "n",
        "method",
        "trials",
        "hits",
        "p",
        "ci",
        "empirical_rate",
        "limit_rate",
        "seed",
    ]);
    for &k in config.ks()? {
        let points = zero_eigen_rate(k, l, config.ns()?, trials, config.seed)?;
        for p in points {
            table.push(vec![
                "zero".into(),
                EntryDistribution::Rademacher.name().into(),
                k.into(),
                l.into(),
                p.n.into(),
                match p.method {
                    Method::Exact => "exact",
                    Method::MonteCarlo => "mc",
                }
                .into(),
                p.trials.into(),
                p.hits.into(),
                num(p.p),
                json!([num(p.ci_low), num(p.ci_high)]),
                opt_num(p.empirical_rate),
                num(l as f64 * LN_2),
                config.seed.into(),
            ]);
        }
    }
    Ok(table)
}

/// Asymptotic lower bound on the error exponent for the configuration.
fn reference_rate(k: usize, stages: Stages, weight: Option<f64>) -> f64 {
    match (stages, weight) {
        (Stages::Infinite, None) => 0.5 - 0.5 * LN_2,
        (Stages::Infinite, Some(_)) => LN_2,
        (Stages::Finite(s), _) => 0.25 * (k as f64).powf(-1.0 / s as f64),
    }
}

fn sdpic(config: &ExperimentConfig) -> Result<Table, CliError> {
    let stages = config.s.unwrap_or(Stages::Infinite);
    if config.trace {
        return sdpic_trace(config, stages);
    }
    let trials = config.trials()?;
    let mut table = Table::new(&[
        "experiment",
        "k",
        "n",
        "s",
        "weight",
        "trials",
        "any_user_errors",
        "per_user_errors",
        "p_hat",
        "ci",
        "empirical_rate",
        "reference_rate",
        "unconverged",
        "condition_true",
        "violations",
        "seed",
    ]);
    for &k in config.ks()? {
        for &n in config.ns()? {
            let b = ber_experiment(k, n, stages, config.weight, trials, config.seed)?;
            table.push(vec![
                "sdpic".into(),
                k.into(),
                n.into(),
                stages.to_string().into(),
                opt_num(config.weight),
                b.trials.into(),
                b.any_user_errors.into(),
                b.per_user_errors.into(),
                num(b.p_hat),
                json!([num(b.ci_low), num(b.ci_high)]),
                opt_num(b.empirical_rate),
                num(reference_rate(k, stages, config.weight)),
                b.unconverged.into(),
                b.condition_true.into(),
                b.violations.into(),
                b.seed.into(),
            ]);
        }
    }
    Ok(table)
}

fn sdpic_trace(config: &ExperimentConfig, stages: Stages) -> Result<Table, CliError> {
    let (&k, &n) = match (config.ks()?, config.ns()?) {
        ([k], [n]) => (k, n),
        _ => return Err(CliError::Usage("--trace needs a single k and a single n".into())),
    };
    let count = match stages {
        Stages::Finite(s) => s,
        Stages::Infinite => INFINITE_TRACE_STAGES.min(STAGE_CAP),
    };
    let mut rng = stream_rng(config.seed, 0);
    let c = SampleMatrix::sample_with(EntryDistribution::Rademacher, k, n, config.seed, &mut rng);
    let tx = Transmission::random(k, &mut rng);
    let w = c.covariance();
    let spec = w.spectrum()?;
    let rows = stage_trace(&c, &tx, count, config.weight.unwrap_or(1.0), config.seed)?;
    let mut table = Table::new(&["stage", "max_abs_error", "bit_errors"]);
    table.meta("lambda_min", num(spec.min()));
    table.meta("lambda_max", num(spec.max()));
    for r in rows {
        table.push(vec![r.stage.into(), num(r.max_abs_error), r.bit_errors.into()]);
    }
    Ok(table)
}

fn covering(config: &ExperimentConfig) -> Result<Table, CliError> {
    if config.grid.is_none() && config.radius.is_none() {
        return Err(CliError::Usage("covering needs --grid and/or --radius".into()));
    }
    let mut table = Table::new(&[
        "k",
        "grid",
        "grid_distance",
        "grid_log_count",
        "radius",
        "rogers_log_count",
    ]);
    for &k in config.ks()? {
        let (grid_distance, grid_log_count) = match config.grid {
            Some(l) => {
                let (d, count) = grid_covering(k, l)?;
                (num(d), num(count.ln()))
            }
            None => (Value::Null, Value::Null),
        };
        let rogers = match config.radius {
            Some(r) => num(rogers_covering(k, r)?),
            None => Value::Null,
        };
        table.push(vec![
            k.into(),
            config.grid.map_or(Value::Null, Value::from),
            grid_distance,
            grid_log_count,
            opt_num(config.radius),
            rogers,
        ]);
    }
    Ok(table)
}

fn hist(config: &ExperimentConfig) -> Result<Table, CliError> {
    let dist = config.dist()?;
    let (&k, &n) = match (config.ks()?, config.ns()?) {
        ([k], [n]) => (k, n),
        _ => return Err(CliError::Usage("hist needs a single k and a single n".into())),
    };
    let bins = config.bins.unwrap_or(50);
    let h = spectrum_histogram(dist, k, n, config.trials()?, bins, config.seed)?;
    let mut table = Table::new(&["bin_left", "bin_right", "mass"]);
    table.meta("mp_lower", num(h.mp_lower));
    table.meta("mp_upper", num(h.mp_upper));
    table.meta("outside_fraction", num(h.outside_fraction));
    for i in 0..h.mass.len() {
        table.push(vec![num(h.bin_left[i]), num(h.bin_right[i]), num(h.mass[i])]);
    }
    Ok(table)
}
