use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context};
use biharm::bessel::{bessel_j, bessel_j_prime, bessel_zero, Order};
use biharm::grid::RadialGrid;
use biharm::kernel::{derivative_identity_residual, f_profile, sign_changes};
use biharm::linear::{
    certify_positivity, linear_solution, profile_estimate, riesz_smoothing, scan_beta_threshold, BetaRange,
    RadialDensity,
};
use biharm::semilinear::{h_bound_report, DuhamelSolver, ProblemSpec};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::*;
use crate::table::{num, Table};

pub fn run(command: &Command) -> anyhow::Result<Table> {
    match command {
        Command::Bessel(a) => bessel(a),
        Command::Kernel(a) => kernel(a),
        Command::Profile(a) => profile(a),
        Command::Solution(a) => solution(a),
        Command::Scan(a) => scan(a),
        Command::Riesz(a) => riesz(a),
        Command::Semilinear(a) => semilinear(a),
        Command::Hbound(a) => hbound(a),
    }
}

fn range_json(r: &RangeSpec) -> Value {
    json!({
        "min": num(r.min),
        "max": num(r.max),
        "count": r.count,
        "spacing": match r.spacing { biharm::grid::Spacing::Linear => "linear", biharm::grid::Spacing::Log => "log" },
    })
}

/// Evaluates `f` over the points in parallel, keeping grid order.
fn par_map<T: Sync, R: Send>(points: &[T], f: impl Fn(&T) -> biharm::Result<R> + Sync + Send) -> biharm::Result<Vec<R>> {
    points.par_iter().map(f).collect()
}

fn pairs(x: &RangeSpec, t: &RangeSpec) -> biharm::Result<Vec<(f64, f64)>> {
    let (xg, tg) = (x.grid()?, t.grid()?);
    if tg.points()[0] <= 0.0 {
        return Err(biharm::Error::Domain("time samples must be positive".into()));
    }
    Ok(xg.points().iter().flat_map(|&x| tg.points().iter().map(move |&t| (x, t))).collect())
}

fn bessel(a: &BesselArgs) -> anyhow::Result<Table> {
    let order = Order::new(a.mu)?;
    let mut table;
    if let Some(k) = a.zeros {
        table = Table::new(vec!["k", "j_zero"]);
        let ks: Vec<usize> = (1..=k).collect();
        for (k, z) in ks.iter().zip(par_map(&ks, |&k| bessel_zero(order, k))?) {
            table.push(vec![(*k).into(), num(z)]);
        }
        table.meta("config", json!({ "mu": num(a.mu), "zeros": k }));
    } else {
        let range = a.eval.as_ref().expect("clap enforces one mode");
        table = Table::new(vec!["eta", "J_value", "J_prime"]);
        let g = range.grid()?;
        let vals = par_map(g.points(), |&e| Ok((bessel_j(order, e)?, bessel_j_prime(order, e)?)))?;
        for (e, (j, dj)) in g.points().iter().zip(vals) {
            table.push(vec![num(*e), num(j), num(dj)]);
        }
        table.meta("config", json!({ "mu": num(a.mu), "eval": range_json(range) }));
    }
    Ok(table)
}

fn kernel(a: &KernelArgs) -> anyhow::Result<Table> {
    let n = a.dim;
    let mut table;
    if let Some(range) = &a.eval {
        table = Table::new(vec!["eta", "f_value"]);
        let g = range.grid()?;
        let vals = par_map(g.points(), |&e| f_profile(n, e, a.tol))?;
        for (e, f) in g.points().iter().zip(vals) {
            table.push(vec![num(*e), num(f)]);
        }
        table.meta("config", json!({ "dim": n, "eval": range_json(range), "tol": num(a.tol) }));
    } else if let Some(eta_max) = a.sign_changes {
        table = Table::new(vec!["index", "eta_zero"]);
        for (i, z) in sign_changes(n, eta_max)?.into_iter().enumerate() {
            table.push(vec![(i + 1).into(), num(z)]);
        }
        table.meta("config", json!({ "dim": n, "sign_changes": num(eta_max) }));
    } else {
        table = Table::new(vec!["eta_min", "eta_max", "points", "max_residual"]);
        let g = RadialGrid::linear(0.05, 5.0, 100)?;
        let r = derivative_identity_residual(n, &g)?;
        table.push(vec![num(0.05), num(5.0), 100.into(), num(r)]);
        table.meta("config", json!({ "dim": n, "identity_check": true }));
    }
    Ok(table)
}

fn profile(a: &ProfileArgs) -> anyhow::Result<Table> {
    let g = a.eta.grid()?;
    if g.points()[0] <= 0.0 {
        bail!(biharm::Error::Domain("eta samples must be positive".into()));
    }
    let vals = par_map(g.points(), |&e| profile_estimate(a.dim, a.beta, e, BetaRange::IncludingN))?;
    let mut table = Table::new(vec!["eta", "F_value", "abs_err"]);
    let mut worst: f64 = 0.0;
    for (e, (f, err)) in g.points().iter().zip(vals) {
        worst = worst.max(err);
        table.push(vec![num(*e), num(f), num(err)]);
    }
    if worst > a.tol {
        bail!(biharm::Error::Accuracy {
            requested: a.tol,
            achieved: worst
        });
    }
    table.meta(
        "config",
        json!({ "dim": a.dim, "beta": num(a.beta), "eta": range_json(&a.eta), "tol": num(a.tol), "certify": a.certify }),
    );
    if a.certify {
        table.meta("certificate", serde_json::to_value(certify_positivity(a.dim, a.beta)?)?);
    }
    Ok(table)
}

fn solution(a: &SolutionArgs) -> anyhow::Result<Table> {
    let samples = pairs(&a.x, &a.t)?;
    let vals = par_map(&samples, |&(x, t)| linear_solution(a.dim, a.beta, x, t))?;
    let mut table = Table::new(vec!["x_norm", "t", "u_value"]);
    for ((x, t), u) in samples.iter().zip(vals) {
        table.push(vec![num(*x), num(*t), num(u)]);
    }
    table.meta(
        "config",
        json!({ "dim": a.dim, "beta": num(a.beta), "x": range_json(&a.x), "t": range_json(&a.t) }),
    );
    Ok(table)
}

fn scan(a: &ScanArgs) -> anyhow::Result<Table> {
    let s = scan_beta_threshold(a.dim, a.beta_lo, a.beta_hi, a.resolution)?;
    let mut probes = s.probes.clone();
    probes.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut table = Table::new(vec!["beta", "verdict"]);
    for (b, v) in probes {
        table.push(vec![num(b), serde_json::to_value(v)?]);
    }
    table.meta(
        "config",
        json!({ "dim": a.dim, "beta_lo": num(a.beta_lo), "beta_hi": num(a.beta_hi), "resolution": num(a.resolution) }),
    );
    table.meta("largest_positive", s.largest_positive.map_or(Value::Null, num));
    table.meta("smallest_negative", s.smallest_negative.map_or(Value::Null, num));
    Ok(table)
}

/// Two numeric columns (radius, value); a non-numeric first row is taken as a header.
fn read_density(path: &Path, q: f64) -> anyhow::Result<RadialDensity> {
    let file = File::open(path).with_context(|| format!("cannot open density file {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(file);
    let (mut r, mut v) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            bail!("{}: line {} has {} fields, expected 2", path.display(), i + 1, record.len());
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                r.push(a);
                v.push(b);
            }
            _ if i == 0 => continue,
            _ => bail!("{}: line {} is not numeric", path.display(), i + 1),
        }
    }
    Ok(RadialDensity::new(q, RadialGrid::new(r)?, v)?)
}

fn riesz(a: &RieszArgs) -> anyhow::Result<Table> {
    let density = read_density(&a.density, a.q)?;
    let samples = pairs(&a.x, &a.t)?;
    let vals = par_map(&samples, |&(x, t)| riesz_smoothing(a.dim, a.beta, &density, x, t))?;
    let mut table = Table::new(vec!["x_norm", "t", "u_value"]);
    for ((x, t), u) in samples.iter().zip(vals) {
        table.push(vec![num(*x), num(*t), num(u)]);
    }
    table.meta(
        "config",
        json!({
            "dim": a.dim, "beta": num(a.beta), "q": num(a.q),
            "density_points": density.grid().len(),
            "x": range_json(&a.x), "t": range_json(&a.t),
        }),
    );
    Ok(table)
}

fn semilinear(a: &SemilinearArgs) -> anyhow::Result<Table> {
    let spec = ProblemSpec::new(a.dim, a.p, a.epsilon)?
        .with_tol(a.tol)
        .with_max_iters(a.max_iters);
    let solver = DuhamelSolver::new(spec)?;
    let r = solver.picard_solve()?;
    let beta = spec.beta();
    let mut table = Table::new(vec!["eta", "W_value", "weighted_value"]);
    for (e, w) in r.u.eta.iter().zip(&r.u.values) {
        table.push(vec![num(*e), num(*w), num((1.0 + e.powf(beta)) * w.abs())]);
    }
    table.meta(
        "config",
        json!({
            "dim": a.dim, "p": num(a.p), "epsilon": num(a.epsilon),
            "max_iters": a.max_iters, "tol": num(a.tol), "envelopes": a.envelopes,
        }),
    );
    table.meta("beta", num(beta));
    table.meta("iterations", r.iterations);
    table.meta("contraction_log", r.contraction_log.iter().map(|&x| num(x)).collect::<Vec<_>>());
    table.meta("correction_norm", num(r.correction_norm));
    table.meta("in_ball", r.in_ball);
    table.meta("round_trip_error", num(solver.round_trip_error()));
    table.meta("k_upper", num(solver.k_upper));
    table.meta("epsilon_0", num(solver.epsilon_threshold()?));
    if a.envelopes {
        let e = solver.verify_envelopes(&r.u);
        table.meta(
            "envelopes",
            json!({
                "m_star": e.m_star.map_or(Value::Null, num),
                "m_star_upper": num(e.m_star_upper),
                "linear_lower": num(e.linear_lower),
                "linear_upper": num(e.linear_upper),
            }),
        );
    }
    Ok(table)
}

fn hbound(a: &HboundArgs) -> anyhow::Result<Table> {
    let samples = pairs(&a.x, &a.t)?;
    let r = h_bound_report(a.dim, a.p, &samples)?;
    let beta = 4.0 / (a.p - 1.0);
    let mut table = Table::new(vec!["x_norm", "t", "H_value", "weighted_value"]);
    for &(x, t, h) in &r.samples {
        table.push(vec![num(x), num(t), num(h), num((x.powf(beta) + t.powf(beta / 4.0)) * h)]);
    }
    table.meta(
        "config",
        json!({ "dim": a.dim, "p": num(a.p), "x": range_json(&a.x), "t": range_json(&a.t) }),
    );
    table.meta("weighted_sup", num(r.weighted_sup));
    table.meta("c2_used", num(r.c2_used));
    Ok(table)
}
