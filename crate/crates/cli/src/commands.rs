//! Subcommand implementations. Each writes its artifacts into the output
//! directory and returns a short human-readable report.

use std::fs;
use std::path::Path;

use mortar_fem::analysis::{eoc, time_eoc, Experiment, Run};
use mortar_fem::conforming::ConformingSystem;
use mortar_fem::linalg::{max_abs_diff, Cholesky};
use mortar_fem::mortar::{interface_quadrature, jump_moments, mortar_project, MultiplierSpace, TraceSpace};
use mortar_fem::solvers::{backward_euler_run, InitialData, TimeStepper};
use mortar_fem::{ConvergenceRecord, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ConfigError, RunConfig};
use crate::report::{loglog_svg, write_records, write_samples, Series};
use crate::CliError;

pub struct Context<'a> {
    pub command: &'static str,
    pub out: &'a Path,
    pub seed: u64,
}

fn numerical(context: &str) -> impl Fn(Error) -> CliError + '_ {
    move |source| CliError::from_core(context, source)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    write(path, s.as_bytes())
}

fn write_csv(path: &Path, rows: &[ConvergenceRecord]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_records(&mut buf, rows).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    write(path, &buf)?;
    Ok(String::from_utf8(buf).expect("utf-8"))
}

fn prepare(ctx: &Context) -> Result<(), CliError> {
    fs::create_dir_all(ctx.out).map_err(|source| CliError::Io {
        path: ctx.out.to_path_buf(),
        source,
    })
}

fn metadata(cfg: &RunConfig, ctx: &Context, extra: Value) -> Result<(), CliError> {
    let mut m = json!({
        "command": ctx.command,
        "version": env!("CARGO_PKG_VERSION"),
        "preset": cfg.raw.preset,
        "provenance": cfg.provenance,
        "config_sha256": cfg.hash(),
        "final_time": cfg.experiment.final_time,
        "degree": cfg.experiment.degree,
        "seed": ctx.seed,
        "notation": "k is the polynomial degree, r the time step, h = 1/n the mesh parameter",
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut m, extra) {
        m.extend(e);
    }
    write_json(&ctx.out.join("metadata.json"), &m)
}

fn run_at(cfg: &RunConfig, n: usize) -> Result<Run, Error> {
    let exp = &cfg.experiment;
    if cfg.stationary {
        return exp.solve_stationary(n);
    }
    let op = exp.operator(n)?;
    let h = if cfg.is_explicit() { op.space().h_max() } else { 1.0 / n as f64 };
    exp.solve_transient_with(op, n, cfg.time_step.at(h))
}

/// Final-time solution, field samples and error summary.
pub fn solve(cfg: &RunConfig, ctx: &Context) -> Result<String, CliError> {
    if cfg.compare_conforming && (cfg.experiment.consistency_flux || cfg.experiment.initial_data != InitialData::Interpolant) {
        return Err(ConfigError::Invalid {
            field: "compare_conforming".into(),
            message: "the conforming twin needs consistency_flux = false and interpolant initial data".into(),
        }
        .into());
    }
    prepare(ctx)?;
    let exp = &cfg.experiment;
    let run = run_at(cfg, cfg.resolution).map_err(numerical("solve"))?;
    let space = run.operator.space();
    let full = run.full();
    let norms = exp.norms(&run).map_err(numerical("error norms"))?;

    let bb = exp.partition.bounding_box();
    let m = cfg.samples;
    let mut samples = Vec::new();
    for j in 0..m {
        let y = bb.y0 + bb.height() * j as f64 / (m - 1) as f64;
        for i in 0..m {
            let x = bb.x0 + bb.width() * i as f64 / (m - 1) as f64;
            if let Some(v) = space.evaluate(&full, x, y) {
                samples.push((x, y, v));
            }
        }
    }
    let path = ctx.out.join("solution.csv");
    let mut buf = Vec::new();
    write_samples(&mut buf, &samples).map_err(|e| CliError::Io {
        path: path.clone(),
        source: e.into(),
    })?;
    write(&path, &buf)?;

    let max_abs = full.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let twin = if cfg.compare_conforming {
        Some(conforming_difference(cfg, &run).map_err(numerical("conforming twin"))?)
    } else {
        None
    };
    let meshes: Vec<Value> = space
        .meshes()
        .iter()
        .map(|m| json!({"nx": m.cells_x(), "ny": m.cells_y(), "degree": m.degree()}))
        .collect();
    let summary = json!({
        "n": run.n,
        "h": run.h,
        "r": run.r,
        "steps": run.steps,
        "time": run.time,
        "stationary": cfg.stationary,
        "dofs_full": space.dofs().n_full(),
        "dofs_reduced": space.dofs().n_reduced(),
        "meshes": meshes,
        "interfaces": space.interfaces().len(),
        "error_l2": norms.l2,
        "error_h1_semi": norms.h1_semi,
        "error_broken_h1": norms.broken_h1,
        "max_abs_solution": max_abs,
        "conforming_max_diff": twin,
    });
    write_json(&ctx.out.join("summary.json"), &summary)?;
    metadata(cfg, ctx, json!({"resolution": cfg.resolution}))?;

    let mut report = format!(
        "n = {}, h = {:.6}, dofs = {} reduced, {} broken, L2 error = {:.6e}, broken H1 error = {:.6e}",
        run.n,
        run.h,
        space.dofs().n_reduced(),
        space.dofs().n_full(),
        norms.l2,
        norms.broken_h1
    );
    if let Some(d) = twin {
        report.push_str(&format!(", conforming difference = {d:.3e}"));
    }
    Ok(report)
}

/// Same problem on the merged conforming space; requires matching grids.
fn conforming_difference(cfg: &RunConfig, run: &Run) -> Result<f64, Error> {
    let exp = &cfg.experiment;
    let space = run.operator.space();
    let meshes = space.meshes();
    let conf = ConformingSystem::new(&exp.partition, meshes, &exp.solution.diffusivities())?;
    let u = &exp.solution;
    let x = if cfg.stationary {
        let b = conf.load(meshes, &|s, x, y| u.elliptic_source(s, x, y, 0.0))?;
        Cholesky::factor(conf.stiffness())?.solve(&b)
    } else {
        let r = run.r.expect("transient run");
        let u0 = conf.from_broken(&space.nodal_values(&|_, x, y| u.u(x, y, 0.0)));
        let mut st = TimeStepper::new(conf.mass(), conf.stiffness(), r, u0)?;
        let traj = backward_euler_run(&mut st, run.steps, &mut |t| conf.load(meshes, &|s, x, y| u.source(s, x, y, t)))?;
        traj.into_iter().last().unwrap_or_default()
    };
    Ok(max_abs_diff(&conf.to_broken(&x), &run.full()))
}

/// Runs every `n` in parallel; rows come back ordered by `h` descending.
fn spatial_rows(cfg: &RunConfig, ns: &[usize], negative: Option<u32>) -> Result<Vec<ConvergenceRecord>, Error> {
    let exp: &Experiment = &cfg.experiment;
    let mut rows = ns
        .par_iter()
        .map(|&n| exp.record(&run_at(cfg, n)?, negative))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| b.h.total_cmp(&a.h));
    eoc(&rows)
}

fn table_report(csv: &str) -> String {
    csv.trim_end().to_string()
}

pub fn convergence(cfg: &RunConfig, ctx: &Context) -> Result<String, CliError> {
    let ns = cfg.study_resolutions()?;
    prepare(ctx)?;
    let rows = spatial_rows(cfg, ns, None).map_err(numerical("convergence study"))?;
    let csv = write_csv(&ctx.out.join("convergence.csv"), &rows)?;
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let svg = loglog_svg(
        "spatial convergence",
        "h",
        &[
            Series { label: "L2", x: h.clone(), y: rows.iter().map(|r| r.error_l2).collect() },
            Series { label: "broken H1", x: h, y: rows.iter().map(|r| r.error_x).collect() },
        ],
    );
    write(&ctx.out.join("convergence.svg"), svg.as_bytes())?;
    metadata(cfg, ctx, json!({"resolutions": ns, "stationary": cfg.stationary}))?;
    Ok(table_report(&csv))
}

/// Fixed mesh at `time_resolution`, one run per time step.
pub fn time_convergence(cfg: &RunConfig, ctx: &Context) -> Result<String, CliError> {
    let rs = cfg.study_time_steps()?;
    prepare(ctx)?;
    let exp = &cfg.experiment;
    let n = cfg.time_resolution;
    let rows = (|| {
        let op = exp.operator(n)?;
        let mut rows = rs
            .par_iter()
            .map(|&r| exp.record(&exp.solve_transient_with(op.clone(), n, r)?, None))
            .collect::<Result<Vec<_>, _>>()?;
        rows.sort_by(|a, b| b.r.unwrap_or(0.0).total_cmp(&a.r.unwrap_or(0.0)));
        time_eoc(&rows)
    })()
    .map_err(numerical("time convergence study"))?;
    let csv = write_csv(&ctx.out.join("time_convergence.csv"), &rows)?;
    let svg = loglog_svg(
        "temporal convergence",
        "r",
        &[Series {
            label: "L2",
            x: rows.iter().map(|r| r.r.unwrap_or(0.0)).collect(),
            y: rows.iter().map(|r| r.error_l2).collect(),
        }],
    );
    write(&ctx.out.join("time_convergence.svg"), svg.as_bytes())?;
    metadata(cfg, ctx, json!({"time_resolution": n, "time_steps": rs}))?;
    Ok(table_report(&csv))
}

pub fn negative_norm(cfg: &RunConfig, ctx: &Context) -> Result<String, CliError> {
    let ns = cfg.study_resolutions()?;
    if cfg.experiment.degree < 2 {
        return Err(CliError::from_core("negative-norm study", Error::RegularityRequirement));
    }
    prepare(ctx)?;
    let s = cfg.negative_order;
    let rows = spatial_rows(cfg, ns, Some(s)).map_err(numerical("negative-norm study"))?;
    let csv = write_csv(&ctx.out.join("negative_norm.csv"), &rows)?;
    let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let label = format!("discrete H^-{s}");
    let svg = loglog_svg(
        "negative-norm superconvergence",
        "h",
        &[
            Series { label: "L2", x: h.clone(), y: rows.iter().map(|r| r.error_l2).collect() },
            Series { label: &label, x: h, y: rows.iter().map(|r| r.error_neg.unwrap_or(0.0)).collect() },
        ],
    );
    write(&ctx.out.join("negative_norm.svg"), svg.as_bytes())?;
    metadata(cfg, ctx, json!({"resolutions": ns, "negative_order": s}))?;
    Ok(table_report(&csv))
}

/// Mortar projection of a profile onto the nonmortar trace of interface 0,
/// plus a seeded check that random constrained functions satisfy the
/// multiplier moment conditions on every interface.
pub fn project(cfg: &RunConfig, ctx: &Context) -> Result<String, CliError> {
    let space = cfg.experiment.space(cfg.resolution).map_err(numerical("building the mortar space"))?;
    let Some(seg) = space.interfaces().first() else {
        return Err(ConfigError::Invalid {
            field: "partition".into(),
            message: "the partition has no interface".into(),
        }
        .into());
    };
    prepare(ctx)?;
    let (a, b) = seg.extent;
    let profile = cfg.project_profile;
    let v = |s: f64| profile.eval((s - a) / (b - a)).0;
    let breaks = &seg.nonmortar.breakpoints;
    let k = seg.nonmortar.degree;
    let result = (|| {
        let interior = mortar_project(breaks, k, &v)?;
        let trace = TraceSpace::new(breaks.clone(), k)?;
        let mult = MultiplierSpace::new(breaks.clone(), k)?;
        let mut nodal = vec![0.0];
        nodal.extend(&interior);
        nodal.push(0.0);
        let pv = |s: f64| trace.evaluate(&nodal, s);
        let quad = interface_quadrature(breaks, breaks, 2 * k + 6)?;
        let mut residual = 0.0f64;
        for j in 0..mult.dim() {
            let mut e = vec![0.0; mult.dim()];
            e[j] = 1.0;
            let m = quad.integrate(|s| (pv(s) - v(s)) * mult.evaluate(&e, s));
            residual = residual.max(m.abs());
        }
        let twice = mortar_project(breaks, k, &pv)?;
        let idempotence = max_abs_diff(&interior, &twice);

        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let mut jump = 0.0f64;
        for _ in 0..100 {
            let x: Vec<f64> = (0..space.dofs().n_reduced()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let full = space.prolong(&x);
            for seg in space.interfaces() {
                let vals = |t: &mortar_fem::geometry::TraceMesh| -> Vec<f64> {
                    t.nodes.iter().map(|&n| full[space.dofs().global(t.subdomain, n)]).collect()
                };
                for m in jump_moments(seg, &vals(&seg.mortar), &vals(&seg.nonmortar))? {
                    jump = jump.max(m.abs());
                }
            }
        }
        let samples: Vec<(f64, f64, f64)> = (0..cfg.samples)
            .map(|i| {
                let s = a + (b - a) * i as f64 / (cfg.samples - 1) as f64;
                (s, v(s), pv(s))
            })
            .collect();
        Ok::<_, Error>((mult.dim(), residual, idempotence, jump, samples))
    })()
    .map_err(numerical("mortar projection"))?;
    let (dim, residual, idempotence, jump, samples) = result;

    let path = ctx.out.join("projection.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io { path: path.clone(), source: e.into() };
    w.write_record(["s", "value", "projected"]).map_err(io)?;
    for (s, x, p) in &samples {
        w.write_record([crate::report::num(*s), crate::report::num(*x), crate::report::num(*p)])
            .map_err(io)?;
    }
    let buf = w.into_inner().map_err(|e| CliError::Io { path: path.clone(), source: e.into_error().into() })?;
    write(&path, &buf)?;

    let summary = json!({
        "interface": seg.gamma_id,
        "mortar_subdomain": seg.mortar_side(),
        "nonmortar_subdomain": seg.nonmortar_side(),
        "mortar_subintervals": seg.mortar.subintervals(),
        "nonmortar_subintervals": seg.nonmortar.subintervals(),
        "degree": k,
        "multiplier_dim": dim,
        "profile": profile.name(),
        "moment_residual": residual,
        "idempotence_error": idempotence,
        "random_vectors": 100,
        "max_jump_moment": jump,
    });
    write_json(&ctx.out.join("summary.json"), &summary)?;
    metadata(cfg, ctx, json!({"resolution": cfg.resolution}))?;
    Ok(format!(
        "interface {}: multiplier dim {dim}, moment residual {residual:.3e}, idempotence {idempotence:.3e}, \
         max jump moment over 100 random constrained vectors {jump:.3e}",
        seg.gamma_id
    ))
}
