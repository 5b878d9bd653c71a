use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use e91_squash::bounds::{
    asymptotic_rate, chernoff_abort_bound, conventional_syndrome_budget, device_dependent_rate,
    finite_key_length, qber_threshold, ProtocolParams,
};
use e91_squash::chsh::build_chsh;
use e91_squash::operator::{generalized_x, pauli, Axis, Phase, StateDensity};
use e91_squash::protocol::{
    povm_noise_experiment, run_protocol_with, selection_abort_frequency, EveStrategy, SimOptions,
};
use e91_squash::squash::{
    build_squash, flip_amplitude, onepartite_squash_feasibility, verify_squash_conditions,
    FeasibilityStatus,
};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{pick, FileConfig};
use crate::output::{emit, json_doc, Cell, Csv, Format};
use crate::{config_err, Common, EveArgs, Failure, ParamArgs};

type Res = Result<(), Failure>;

struct Ctx {
    file: FileConfig,
    out: Option<PathBuf>,
    format_flag: Option<Format>,
    seed: u64,
    echo: Map<String, Value>,
}

impl Ctx {
    fn new(command: &str, common: &Common) -> Result<Self, Failure> {
        let file = FileConfig::load(common.config.as_deref()).map_err(Failure::Config)?;
        let out = common
            .out
            .clone()
            .or_else(|| file.out.as_ref().map(PathBuf::from));
        let seed = pick(common.seed, file.seed, 0);
        let mut echo = Map::new();
        echo.insert("command".into(), json!(command));
        echo.insert("seed".into(), json!(seed));
        Ok(Self {
            file,
            out,
            format_flag: common.format,
            seed,
            echo,
        })
    }

    fn format(&mut self, default: Format) -> Result<Format, Failure> {
        let f = match (self.format_flag, self.file.format.as_deref()) {
            (Some(f), _) => f,
            (None, Some("csv")) => Format::Csv,
            (None, Some("json")) => Format::Json,
            (None, Some(other)) => {
                return Err(Failure::Config(format!("unknown format {other:?}")))
            }
            (None, None) => default,
        };
        self.echo.insert("format".into(), json!(f));
        Ok(f)
    }

    fn set(&mut self, key: &str, v: Value) {
        self.echo.insert(key.into(), v);
    }

    fn write(&self, text: &str) -> Res {
        emit(self.out.as_deref(), text).map_err(config_err)
    }
}

/// Independent per-run seed from the master seed and a counter.
fn derive_seed(master: u64, k: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(k);
    rng.next_u64()
}

fn resolve_params(ctx: &mut Ctx, a: &ParamArgs) -> Result<(ProtocolParams, Option<f64>), Failure> {
    let f = &ctx.file;
    let n = pick(a.n, f.n, 44_100);
    let f_ec = pick(a.f_ec, f.f_ec, 1.2);
    let p_est = a.p_est.or(f.p_est);
    let l_syn = match a.l_syn.or(f.l_syn) {
        Some(l) => l,
        None => conventional_syndrome_budget(n, f_ec, p_est.unwrap_or(0.02)).map_err(config_err)?,
    };
    let params = ProtocolParams::new(
        n,
        pick(a.q, f.q, 0.3),
        pick(a.delta, f.delta, 0.1),
        pick(a.s0, f.s0, 0.6),
        pick(a.eps, f.eps, 1e-9),
        pick(a.eps_cor, f.eps_cor, 1e-9),
        f_ec,
        l_syn,
    )
    .map_err(config_err)?;
    if let Value::Object(m) = serde_json::to_value(params).expect("params") {
        ctx.echo.extend(m);
    }
    if let Some(p) = p_est {
        ctx.set("p_est", json!(p));
    }
    Ok((params, p_est))
}

fn resolve_eve(ctx: &mut Ctx, e: &EveArgs) -> Result<EveStrategy, Failure> {
    let f = &ctx.file;
    let kind = e
        .strategy
        .clone()
        .or(f.strategy.clone())
        .unwrap_or_else(|| "depolarizing".into());
    let p = pick(e.p, f.p, 0.0);
    let a = pick(e.alpha_angle, f.alpha_angle, 0.0);
    let b = pick(e.beta_angle, f.beta_angle, 0.0);
    let eve = match kind.as_str() {
        "depolarizing" => EveStrategy::IidDepolarizing { p },
        "misalignment" => {
            ctx.set("alpha_angle", json!(a));
            ctx.set("beta_angle", json!(b));
            EveStrategy::ConstantMisalignment {
                alpha: Phase::from_angle(a),
                beta: Phase::from_angle(b),
                p,
            }
        }
        other => return Err(Failure::Config(format!("unknown strategy {other:?}"))),
    };
    eve.iid_source().map_err(config_err)?;
    ctx.set("strategy", json!(kind));
    ctx.set("p", json!(p));
    Ok(eve)
}

fn angle(k: usize, grid: usize) -> f64 {
    2.0 * PI * k as f64 / grid as f64
}

pub fn rate_curve(
    p_min: Option<f64>,
    p_max: Option<f64>,
    steps: Option<usize>,
    f_ec: Option<f64>,
    common: &Common,
) -> Res {
    let mut ctx = Ctx::new("rate-curve", common)?;
    let p_min = pick(p_min, ctx.file.p_min, 0.0);
    let p_max = pick(p_max, ctx.file.p_max, 0.15);
    let steps = pick(steps, ctx.file.steps, 151);
    let f_ec = pick(f_ec, ctx.file.f_ec, 1.0);
    if !(0.0 <= p_min && p_min < p_max && p_max <= 0.15) {
        return Err(Failure::Config(format!(
            "need 0 <= p_min < p_max <= 0.15, got [{p_min}, {p_max}]"
        )));
    }
    if steps < 2 {
        return Err(Failure::Config("steps must be at least 2".into()));
    }
    for (k, v) in [
        ("p_min", json!(p_min)),
        ("p_max", json!(p_max)),
        ("steps", json!(steps)),
        ("f_ec", json!(f_ec)),
    ] {
        ctx.set(k, v);
    }
    let format = ctx.format(Format::Csv)?;
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let p = p_min + (p_max - p_min) * k as f64 / (steps - 1) as f64;
        let r = asymptotic_rate(p, f_ec).map_err(config_err)?;
        let dd = device_dependent_rate(p, f_ec).map_err(config_err)?;
        rows.push((p, r, dd));
    }
    let threshold = qber_threshold(f_ec).map_err(config_err)?;
    let text = match format {
        Format::Csv => {
            let mut csv = Csv::new(&ctx.echo, &["p", "R_ours", "R_device_dependent"]);
            for &(p, r, dd) in &rows {
                csv.row(vec![p.into(), r.into(), dd.into()]);
            }
            csv.comment(&format!("threshold = {}", crate::output::sig12(threshold)));
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|&(p, r, dd)| json!({"p": p, "R_ours": r, "R_device_dependent": dd}))
                .collect();
            json_doc(
                ctx.echo.clone(),
                json!({"threshold": threshold, "rows": rows}),
            )
        }
    };
    ctx.write(&text)
}

pub fn keylength(a: &ParamArgs, common: &Common) -> Res {
    let mut ctx = Ctx::new("keylength", common)?;
    let (params, _) = resolve_params(&mut ctx, a)?;
    let format = ctx.format(Format::Json)?;
    let report = finite_key_length(&params).map_err(config_err)?;
    let text = match format {
        Format::Json => json_doc(ctx.echo.clone(), json!({"report": report})),
        Format::Csv => {
            let mut csv = Csv::new(
                &ctx.echo,
                &[
                    "l",
                    "pulses",
                    "l_smp",
                    "mu_prime",
                    "delta_s",
                    "mu",
                    "phase_error_argument",
                    "hmin_bound",
                    "raw_length",
                    "reason",
                ],
            );
            csv.row(vec![
                report.l.into(),
                report.pulses.into(),
                report.l_smp.into(),
                report.mu_prime.into(),
                report.delta_s.into(),
                report.mu.into(),
                report.phase_error_argument.into(),
                report.hmin_bound.into(),
                report.raw_length.into(),
                Cell::S(report.reason.clone().unwrap_or_default().replace(',', ";")),
            ]);
            csv.finish()
        }
    };
    ctx.write(&text)
}

pub fn verify_squash(grid: Option<usize>, tol: Option<f64>, common: &Common) -> Res {
    let mut ctx = Ctx::new("verify-squash", common)?;
    let grid = pick(grid, ctx.file.grid, 64);
    let tol = pick(tol, ctx.file.tol, 1e-9);
    if grid < 2 || !(tol > 0.0) {
        return Err(Failure::Config("need grid >= 2 and tol > 0".into()));
    }
    ctx.set("grid", json!(grid));
    ctx.set("tol", json!(tol));
    let format = ctx.format(Format::Json)?;
    let cells: Vec<_> = (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / grid, idx % grid);
            let sq = build_squash(
                Phase::from_angle(angle(i, grid)),
                Phase::from_angle(angle(j, grid)),
            );
            let r = verify_squash_conditions(&sq, tol);
            (i, j, sq.phi, sq.flip_amplitude, r)
        })
        .collect();
    let failures = cells.iter().filter(|c| !c.4.pass).count();
    let worst_cond1 = cells.iter().map(|c| c.4.cond1_residual).fold(0.0, f64::max);
    let worst_cond2 = cells
        .iter()
        .map(|c| c.4.cond2_min_eig)
        .fold(f64::INFINITY, f64::min);
    let text = match format {
        Format::Json => {
            let rows: Vec<Value> = cells
                .iter()
                .map(|(i, j, phi, a, r)| {
                    let mut v = serde_json::to_value(r).expect("report");
                    let m = v.as_object_mut().expect("object");
                    m.insert("i".into(), json!(i));
                    m.insert("j".into(), json!(j));
                    m.insert("alpha_angle".into(), json!(angle(*i, grid)));
                    m.insert("beta_angle".into(), json!(angle(*j, grid)));
                    m.insert("phi".into(), json!(phi));
                    m.insert("flip_amplitude".into(), json!(a));
                    v
                })
                .collect();
            json_doc(
                ctx.echo.clone(),
                json!({
                    "all_pass": failures == 0,
                    "failures": failures,
                    "worst_cond1_residual": worst_cond1,
                    "worst_cond2_min_eig": worst_cond2,
                    "cells": rows,
                }),
            )
        }
        Format::Csv => {
            let mut csv = Csv::new(
                &ctx.echo,
                &[
                    "alpha_angle",
                    "beta_angle",
                    "phi",
                    "flip_amplitude",
                    "cond1_residual",
                    "cond2_min_eig",
                    "n_min_eig",
                    "mprime_gap_min_eig",
                    "xx_residual",
                    "choi_min_eig",
                    "pass",
                ],
            );
            for (i, j, phi, a, r) in &cells {
                csv.row(vec![
                    angle(*i, grid).into(),
                    angle(*j, grid).into(),
                    (*phi).into(),
                    (*a).into(),
                    r.cond1_residual.into(),
                    r.cond2_min_eig.into(),
                    r.n_min_eig.into(),
                    r.mprime_gap_min_eig.into(),
                    r.xx_residual.into(),
                    r.choi_min_eig.into(),
                    r.pass.into(),
                ]);
            }
            csv.comment(&format!("failures = {failures}"));
            csv.finish()
        }
    };
    ctx.write(&text)?;
    if failures > 0 {
        return Err(Failure::Verification(format!(
            "{failures} of {} cells failed",
            grid * grid
        )));
    }
    Ok(())
}

pub fn nogo(grid: Option<usize>, common: &Common) -> Res {
    let mut ctx = Ctx::new("nogo", common)?;
    let grid = pick(grid, ctx.file.grid, 16);
    if grid < 1 {
        return Err(Failure::Config("grid must be positive".into()));
    }
    ctx.set("grid", json!(grid));
    let format = ctx.format(Format::Json)?;
    let z = pauli(Axis::Z);
    let cells: Vec<_> = (0..grid)
        .into_par_iter()
        .map(|k| {
            let alpha = Phase::from_angle(angle(k, grid));
            let r = onepartite_squash_feasibility(&generalized_x(alpha), &z)
                .expect("qubit observables");
            let on_axis = (alpha.value().re).abs() < 1e-12;
            (k, alpha, on_axis, r)
        })
        .collect();
    let mismatched: Vec<usize> = cells
        .iter()
        .filter(|(_, _, on_axis, r)| match r.status {
            FeasibilityStatus::Feasible => !on_axis,
            FeasibilityStatus::Infeasible => *on_axis,
            FeasibilityStatus::Inconclusive => false,
        })
        .map(|c| c.0)
        .collect();
    let inconclusive: Vec<usize> = cells
        .iter()
        .filter(|c| c.3.status == FeasibilityStatus::Inconclusive)
        .map(|c| c.0)
        .collect();
    let text = match format {
        Format::Json => {
            let rows: Vec<Value> = cells
                .iter()
                .map(|(k, alpha, on_axis, r)| {
                    json!({
                        "k": k,
                        "alpha": alpha,
                        "alpha_angle": angle(*k, grid),
                        "expected_feasible": on_axis,
                        "report": r,
                    })
                })
                .collect();
            json_doc(
                ctx.echo.clone(),
                json!({"mismatched": mismatched, "inconclusive": inconclusive, "cells": rows}),
            )
        }
        Format::Csv => {
            let mut csv = Csv::new(
                &ctx.echo,
                &[
                    "alpha_angle",
                    "alpha_re",
                    "alpha_im",
                    "status",
                    "expected_feasible",
                    "residual",
                    "iterations",
                ],
            );
            for (k, alpha, on_axis, r) in &cells {
                let status = serde_json::to_value(r.status).expect("status");
                csv.row(vec![
                    angle(*k, grid).into(),
                    alpha.value().re.into(),
                    alpha.value().im.into(),
                    Cell::S(status.as_str().unwrap_or_default().to_string()),
                    (*on_axis).into(),
                    r.residual.into(),
                    r.iterations.into(),
                ]);
            }
            csv.comment(&format!("mismatched = {mismatched:?}"));
            csv.comment(&format!("inconclusive = {inconclusive:?}"));
            csv.finish()
        }
    };
    ctx.write(&text)?;
    if !mismatched.is_empty() {
        return Err(Failure::Verification(format!(
            "cells {mismatched:?} contradict the no-go pattern"
        )));
    }
    Ok(())
}

pub fn chsh_spectrum(grid: Option<usize>, common: &Common) -> Res {
    let mut ctx = Ctx::new("chsh-spectrum", common)?;
    let grid = pick(grid, ctx.file.grid, 64);
    if grid < 1 {
        return Err(Failure::Config("grid must be positive".into()));
    }
    ctx.set("grid", json!(grid));
    let format = ctx.format(Format::Csv)?;
    let rows: Vec<[f64; 7]> = (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (angle(idx / grid, grid), angle(idx % grid, grid));
            let m = build_chsh(Phase::from_angle(a), Phase::from_angle(b));
            let flip = flip_amplitude(m.phi).expect("phi in range");
            let top = m
                .bell_basis
                .iter()
                .map(|v| v.eigenvalue)
                .fold(f64::NEG_INFINITY, f64::max);
            [a, b, m.abs_mu, m.abs_nu, m.phi, flip, top]
        })
        .collect();
    let header = [
        "alpha_angle",
        "beta_angle",
        "abs_mu",
        "abs_nu",
        "phi",
        "flip_amplitude",
        "max_eigenvalue",
    ];
    let text = match format {
        Format::Csv => {
            let mut csv = Csv::new(&ctx.echo, &header);
            for r in &rows {
                csv.row(r.iter().map(|&x| x.into()).collect());
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    Value::Object(
                        header
                            .iter()
                            .zip(r)
                            .map(|(k, v)| (k.to_string(), json!(v)))
                            .collect(),
                    )
                })
                .collect();
            json_doc(ctx.echo.clone(), json!({"rows": rows}))
        }
    };
    ctx.write(&text)
}

fn mean_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (Some(m), None);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (Some(m), Some(var.sqrt()))
}

pub fn simulate(
    a: &ParamArgs,
    e: &EveArgs,
    runs: Option<usize>,
    key_length: Option<u64>,
    transcripts: Option<&Path>,
    common: &Common,
) -> Res {
    let mut ctx = Ctx::new("simulate", common)?;
    let (params, p_est) = resolve_params(&mut ctx, a)?;
    let eve = resolve_eve(&mut ctx, e)?;
    let runs = pick(runs, ctx.file.runs, 20);
    if runs == 0 {
        return Err(Failure::Config("runs must be positive".into()));
    }
    let key_length = key_length.or(ctx.file.key_length);
    ctx.set("runs", json!(runs));
    if let Some(l) = key_length {
        ctx.set("key_length", json!(l));
    }
    let format = ctx.format(Format::Csv)?;
    let opts = SimOptions {
        p_est,
        key_length,
        corrupt_corrected_key: false,
    };
    let master = ctx.seed;
    let results: Vec<_> = (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(master, r);
            run_protocol_with(&params, &eve, seed, &opts).map(|t| (r, seed, t))
        })
        .collect::<Result<_, _>>()
        .map_err(config_err)?;

    if let Some(dir) = transcripts {
        fs::create_dir_all(dir).map_err(config_err)?;
        for (r, _, t) in &results {
            let json = serde_json::to_string(t).expect("transcript");
            fs::write(dir.join(format!("run_{r:04}.json")), json).map_err(config_err)?;
        }
    }

    let abort_name = |t: &e91_squash::protocol::Transcript| {
        t.abort.map(|a| {
            serde_json::to_value(a)
                .expect("abort")
                .as_str()
                .unwrap_or_default()
                .to_string()
        })
    };
    let s: Vec<f64> = results.iter().filter_map(|x| x.2.s_est).collect();
    let qb: Vec<f64> = results
        .iter()
        .filter_map(|x| x.2.sifted_qber().and_then(|q| q.ok()))
        .collect();
    let (s_mean, s_std) = mean_std(&s);
    let (q_mean, q_std) = mean_std(&qb);
    let aborted = results.iter().filter(|x| x.2.aborted()).count();
    let keys: Vec<f64> = results
        .iter()
        .filter(|x| !x.2.aborted())
        .map(|x| x.2.key_length as f64)
        .collect();
    let (l_mean, _) = mean_std(&keys);
    let summary = json!({
        "runs": runs,
        "aborted": aborted,
        "abort_rate": aborted as f64 / runs as f64,
        "s_mean": s_mean,
        "s_std": s_std,
        "qber_mean": q_mean,
        "qber_std": q_std,
        "key_length_mean": l_mean,
    });

    let text = match format {
        Format::Csv => {
            let mut csv = Csv::new(
                &ctx.echo,
                &[
                    "run",
                    "seed",
                    "s_est",
                    "qber",
                    "abort",
                    "syndrome_bits",
                    "within_budget",
                    "key_length",
                ],
            );
            for (r, seed, t) in &results {
                csv.row(vec![
                    (*r).into(),
                    (*seed).into(),
                    t.s_est.into(),
                    t.sifted_qber().and_then(|q| q.ok()).into(),
                    Cell::S(abort_name(t).unwrap_or_default()),
                    t.syndrome_bits.into(),
                    t.syndrome_within_budget.into(),
                    t.key_length.into(),
                ]);
            }
            for (k, v) in summary.as_object().expect("object") {
                let v = match v.as_f64() {
                    Some(x) if !v.is_u64() => crate::output::sig12(x),
                    _ => v.to_string(),
                };
                csv.comment(&format!("{k} = {v}"));
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<Value> = results
                .iter()
                .map(|(r, seed, t)| {
                    json!({
                        "run": r,
                        "seed": seed,
                        "s_est": t.s_est,
                        "qber": t.sifted_qber().and_then(|q| q.ok()),
                        "abort": t.abort,
                        "syndrome_bits": t.syndrome_bits,
                        "within_budget": t.syndrome_within_budget,
                        "key_length": t.key_length,
                    })
                })
                .collect();
            json_doc(ctx.echo.clone(), json!({"summary": summary, "runs": rows}))
        }
    };
    ctx.write(&text)
}

pub fn bounds_check(
    a: &ParamArgs,
    e: &EveArgs,
    runs: Option<usize>,
    delta_s: Option<f64>,
    common: &Common,
) -> Res {
    let mut ctx = Ctx::new("bounds-check", common)?;
    let (params, _) = resolve_params(&mut ctx, a)?;
    let runs = pick(runs, ctx.file.runs, 1000);
    let ds = pick(delta_s, ctx.file.delta_s, 0.1);
    let p = pick(e.p, ctx.file.p, 0.0);
    let alpha = pick(e.alpha_angle, ctx.file.alpha_angle, -PI / 2.0);
    let beta = pick(e.beta_angle, ctx.file.beta_angle, -PI / 2.0);
    if runs == 0 || !(ds > 0.0) || !(0.0..=0.5).contains(&p) {
        return Err(Failure::Config(
            "need runs >= 1, delta_s > 0 and p in [0, 1/2]".into(),
        ));
    }
    for (k, v) in [
        ("runs", json!(runs)),
        ("delta_s", json!(ds)),
        ("p", json!(p)),
        ("alpha_angle", json!(alpha)),
        ("beta_angle", json!(beta)),
    ] {
        ctx.set(k, v);
    }
    let format = ctx.format(Format::Json)?;

    let chernoff = chernoff_abort_bound(&params);
    let freq =
        selection_abort_frequency(&params, runs, derive_seed(ctx.seed, 0)).map_err(config_err)?;

    let m = build_chsh(Phase::from_angle(alpha), Phase::from_angle(beta));
    let top = m
        .bell_basis
        .iter()
        .max_by(|x, y| x.eigenvalue.total_cmp(&y.eigenvalue))
        .expect("Bell basis");
    let rho = StateDensity::pure(&top.vector)
        .and_then(|r| r.mix(&StateDensity::maximally_mixed(4), 2.0 * p))
        .map_err(config_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(ctx.seed, 1));
    let azuma =
        povm_noise_experiment(&m, &rho, params.l_smp(), runs, ds, &mut rng).map_err(config_err)?;

    let chernoff_ok = freq <= chernoff.corrected_bound;
    let text = match format {
        Format::Json => json_doc(
            ctx.echo.clone(),
            json!({
                "chernoff": {
                    "bound": chernoff,
                    "empirical_abort_frequency": freq,
                    "within_bound": chernoff_ok,
                },
                "azuma": azuma,
            }),
        ),
        Format::Csv => {
            let mut csv = Csv::new(&ctx.echo, &["check", "empirical", "bound", "within_bound"]);
            csv.row(vec![
                "chernoff_abort".into(),
                freq.into(),
                chernoff.corrected_bound.into(),
                chernoff_ok.into(),
            ]);
            csv.row(vec![
                "azuma_tail".into(),
                azuma.empirical_tail.into(),
                azuma.azuma_bound.into(),
                azuma.within_bound.into(),
            ]);
            csv.comment(&format!(
                "size_free_abort_bound = {}",
                crate::output::sig12(chernoff.size_free_bound)
            ));
            csv.finish()
        }
    };
    ctx.write(&text)?;
    if !(chernoff_ok && azuma.within_bound) {
        return Err(Failure::Verification(
            "empirical tail exceeds its bound".into(),
        ));
    }
    Ok(())
}
