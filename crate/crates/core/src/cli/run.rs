//! Dispatch of one run file to the solvers and experiments.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value as Json};

use super::config::{Config, Section, Value};
use super::data::{read_data, Data, Role};
use crate::boundary_ops::{expr, kl_margin, BoundarySymbol, SampleSpec, TimeDirection};
use crate::error::{Error, Result};
use crate::estimator::{
    appendix_form_ratio, appendix_weight_build, kernel_nts_bound, laplace_opnorm, strichartz_report, BandWeight, LaplaceGrid, SampleGrid, Source, StrichartzOptions, TestFunction,
    Weight,
};
use crate::halfspace_solver::{solve_ibvp, solve_pure_bvp_with, BvpOptions, BvpParts, Extension, IbvpData};
use crate::hs_spaces::{bourgain_norm, hs_boundary_norm, hs_dual_norm, lp_lq, sobolev_volume_norm};
use crate::nls::{global_small_solve, h1_norm, picard_solve, scattering_profile, GlobalOptions, NLSProblem, TailExtension};
use crate::spectral_core::io::{write_volume, AnyField};
use crate::spectral_core::{Grid, SampledField, YExtent};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    SolveIbvp,
    SolveBvp,
    SolveNls,
    CheckKl,
    Norms,
    Strichartz,
    KernelBound,
    LaplaceNorm,
    Appendix,
    Scattering,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::SolveIbvp => "solve-ibvp",
            Subcommand::SolveBvp => "solve-bvp",
            Subcommand::SolveNls => "solve-nls",
            Subcommand::CheckKl => "check-kl",
            Subcommand::Norms => "norms",
            Subcommand::Strichartz => "strichartz",
            Subcommand::KernelBound => "kernel-bound",
            Subcommand::LaplaceNorm => "laplace-norm",
            Subcommand::Appendix => "appendix",
            Subcommand::Scattering => "scattering",
        }
    }

    pub fn from_name(s: &str) -> Option<Subcommand> {
        use clap::ValueEnum;
        Subcommand::value_variants().iter().copied().find(|v| v.name() == s)
    }
}

/// Exit status for an error: 1 for configuration problems, 2 for violated
/// preconditions, 3 for numerical-accuracy failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Precondition(_) | Error::Smallness { .. } | Error::SingularSymbol(_) | Error::UndefinedRatio(_) => 2,
        Error::Accuracy(_) | Error::NonContraction { .. } => 3,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        2 => "precondition",
        3 => "accuracy",
        _ => "config",
    }
}

/// Files written by a run, relative to the output directory.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub report: PathBuf,
    pub written: Vec<PathBuf>,
}

struct Ctx<'a> {
    cfg: &'a Config,
    seed: u64,
    base: PathBuf,
    out: PathBuf,
    written: Vec<PathBuf>,
    empty: Section,
}

impl Ctx<'_> {
    fn sec(&self, name: &str) -> &Section {
        self.cfg.section(name).unwrap_or(&self.empty)
    }

    fn output_name(&self, key: &str) -> Result<Option<PathBuf>> {
        Ok(self.sec("output").opt_str(key)?.map(|s| self.out.join(s)))
    }

    fn write_text(&mut self, key: &str, text: &str) -> Result<()> {
        if let Some(p) = self.output_name(key)? {
            fs::write(&p, text)?;
            self.written.push(p);
        }
        Ok(())
    }

    fn write_volume(&mut self, u: &SampledField) -> Result<()> {
        if let Some(p) = self.output_name("field")? {
            write_volume(&p, u)?;
            self.written.push(p);
        }
        Ok(())
    }

    fn data(&self, name: &str, grid: &Grid, role: Role) -> Result<(Data, Json)> {
        let sec = self.cfg.require(name)?;
        read_data(sec, grid, role, self.seed, &self.base)
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Json> {
    serde_json::to_value(v).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_grid(cfg: &Config) -> Result<Grid> {
    let s = cfg.require("grid")?;
    s.only(&["d", "lx", "nx", "ly", "ny", "lt", "nt", "t0"])?;
    let g = Grid::new(s.usize("d")?, s.f64("lx")?, s.usize("nx")?, s.f64("ly")?, s.usize("ny")?, s.f64("lt")?, s.usize("nt")?)
        .map_err(|e| s.error_at("d", e.to_string()))?;
    let g = g.with_t0(s.f64_or("t0", 0.0)?);
    g.validate().map_err(|e| s.error_at("t0", e.to_string()))?;
    Ok(g)
}

fn expr_src(sec: &Section, key: &str) -> Result<(String, usize, usize)> {
    let e = sec.entry(key).ok_or_else(|| sec.error_at(key, format!("custom symbol needs '{key}'")))?;
    match &e.value {
        // quoted expression: its text starts one column after the quote
        Value::Str(s) => Ok((s.clone(), e.line, e.col + 1)),
        Value::Num(v) => Ok((v.to_string(), e.line, e.col)),
        _ => Err(sec.error_at(key, "expected an expression string")),
    }
}

pub fn read_symbol(sec: &Section) -> Result<(BoundarySymbol, TimeDirection)> {
    let name = sec.str_or("name", "dirichlet")?;
    let symbol = if name == "custom" {
        let (b1, l1, c1) = expr_src(sec, "b1")?;
        let (b2, l2, c2) = expr_src(sec, "b2")?;
        expr::parse_at(&b1, l1, c1)?;
        expr::parse_at(&b2, l2, c2)?;
        BoundarySymbol::custom(sec.str_or("label", "custom")?, &b1, &b2)?
    } else {
        BoundarySymbol::builtin(name).map_err(|e| sec.error_at("name", e.to_string()))?
    };
    let dir = match sec.str_or("direction", "forward")? {
        "forward" => TimeDirection::Forward,
        "backward" => TimeDirection::Backward,
        _ => return Err(sec.error_at("direction", "direction is 'forward' or 'backward'")),
    };
    Ok((symbol, dir))
}

fn l2_table(u: &SampledField) -> (Vec<f64>, String) {
    let vals: Vec<f64> = (0..u.nt_len()).map(|n| u.l2_at(n)).collect();
    let mut csv = String::from("t,l2\n");
    for (t, v) in u.times.iter().zip(&vals) {
        let _ = writeln!(csv, "{t},{v:.12e}");
    }
    (vals, csv)
}

fn solve_ibvp_cmd(ctx: &mut Ctx) -> Result<Json> {
    let grid = read_grid(ctx.cfg)?;
    let (symbol, _) = read_symbol(ctx.sec("symbol"))?;
    let solve = ctx.sec("solve");
    solve.only(&["s", "extension"])?;
    let s = solve.f64_or("s", 0.0)?;
    let extension = match solve.opt_str("extension")? {
        None => None,
        Some("odd") => Some(Extension::Odd),
        Some("even") => Some(Extension::Even),
        Some("zero") => Some(Extension::Zero),
        Some(_) => return Err(solve.error_at("extension", "extension is 'odd', 'even' or 'zero'")),
    };
    let (d0, i0) = ctx.data("u0", &grid, Role::Snapshot)?;
    let mut data = IbvpData::new(d0.snapshot(&grid, YExtent::Half)?, symbol.clone());
    data.s = s;
    data.extension = extension;
    let mut info = json!({ "u0": i0 });
    if ctx.cfg.section("g").is_some() {
        let (dg, ig) = ctx.data("g", &grid, Role::Boundary)?;
        data.g = Some(dg.boundary(&grid)?);
        info["g"] = ig;
    }
    if ctx.cfg.section("f").is_some() {
        let (df, i_f) = ctx.data("f", &grid, Role::Spacetime)?;
        data.forcing = Some(df.spacetime(&grid, YExtent::Half)?);
        info["f"] = i_f;
    }
    let sol = solve_ibvp(&data)?;
    let (l2, csv) = l2_table(&sol.u);
    ctx.write_volume(&sol.u)?;
    ctx.write_text("csv", &csv)?;
    Ok(json!({
        "grid": to_json(&grid)?,
        "symbol": symbol.name,
        "s": s,
        "data": info,
        "compat": to_json(&sol.compat)?,
        "residual_l2": sol.residual.l2(),
        "causality_ratio": sol.correction.causality_ratio,
        "times": sol.u.times,
        "l2": l2,
        "warnings": sol.warnings,
    }))
}

fn solve_bvp_cmd(ctx: &mut Ctx) -> Result<Json> {
    let grid = read_grid(ctx.cfg)?;
    let (symbol, _) = read_symbol(ctx.sec("symbol"))?;
    let solve = ctx.sec("solve");
    solve.only(&["times", "parts", "causality_check", "eta_factor"])?;
    let times = match solve.opt_f64_list("times")? {
        Some(t) => t,
        None => grid.t_values().into_iter().filter(|t| *t >= 0.0).collect(),
    };
    let parts = match solve.str_or("parts", "both")? {
        "both" => BvpParts::Both,
        "hyperbolic" => BvpParts::Hyperbolic,
        "elliptic" => BvpParts::Elliptic,
        _ => return Err(solve.error_at("parts", "parts is 'both', 'hyperbolic' or 'elliptic'")),
    };
    let opts = BvpOptions {
        parts,
        causality_check: solve.bool_or("causality_check", true)?,
        eta_factor: solve.usize_or("eta_factor", BvpOptions::default().eta_factor)?,
        ..BvpOptions::default()
    };
    let (dg, ig) = ctx.data("g", &grid, Role::Boundary)?;
    let g = dg.boundary(&grid)?;
    let sol = solve_pure_bvp_with(&g, &symbol, &times, &opts)?;
    let (l2, csv) = l2_table(&sol.u);
    ctx.write_volume(&sol.u)?;
    ctx.write_text("csv", &csv)?;
    Ok(json!({
        "grid": to_json(&grid)?,
        "symbol": symbol.name,
        "g": ig,
        "parts": to_json(&parts)?,
        "causality_ratio": sol.causality_ratio,
        "causal": sol.is_causal(),
        "max_eta_nodes": sol.max_eta_nodes,
        "times": times,
        "l2": l2,
        "warnings": sol.warnings,
    }))
}

fn nls_problem(ctx: &Ctx, grid: &Grid) -> Result<(NLSProblem, Json)> {
    let sec = ctx.sec("nls");
    let (d0, i0) = ctx.data("u0", grid, Role::Snapshot)?;
    let (dg, ig) = ctx.data("g", grid, Role::Boundary)?;
    let mut p = NLSProblem::new(d0.snapshot(grid, YExtent::Half)?, dg.boundary(grid)?);
    p.a = sec.f64_or("a", p.a)?;
    p.epsilon = sec.f64_or("epsilon", p.epsilon)?;
    p.big_t = sec.f64_or("window", p.big_t)?;
    p.tol = sec.f64_or("tol", p.tol)?;
    p.max_iter = sec.usize_or("max_iter", p.max_iter)?;
    let info = json!({ "u0": i0, "g": ig, "a": p.a, "epsilon": p.epsilon, "window": p.big_t });
    Ok((p, info))
}

fn global_opts(sec: &Section) -> Result<GlobalOptions> {
    let d = GlobalOptions::default();
    Ok(GlobalOptions { smallness: sec.f64_or("smallness", d.smallness)?, bound_factor: sec.f64_or("bound_factor", d.bound_factor)? })
}

const NLS_KEYS: [&str; 8] = ["a", "epsilon", "window", "tol", "max_iter", "horizon", "smallness", "bound_factor"];

fn solve_nls_cmd(ctx: &mut Ctx) -> Result<Json> {
    let grid = read_grid(ctx.cfg)?;
    ctx.sec("nls").only(&NLS_KEYS)?;
    let (prob, info) = nls_problem(ctx, &grid)?;
    let sec = ctx.sec("nls");
    match sec.opt_f64("horizon")? {
        None => {
            let r = picard_solve(&prob)?;
            ctx.write_text("csv", &r.to_csv())?;
            ctx.write_volume(&r.u)?;
            Ok(json!({
                "grid": to_json(&grid)?,
                "problem": info,
                "iterations": r.log.len(),
                "max_contraction": r.max_contraction(),
                "log": to_json(&r.log)?,
            }))
        }
        Some(h) => {
            let run = global_small_solve(&prob, h, &global_opts(sec)?)?;
            let mut csv = String::from("t,monitor\n");
            for (t, m) in &run.monitor {
                let _ = writeln!(csv, "{t},{m:.12e}");
            }
            ctx.write_text("csv", &csv)?;
            ctx.write_volume(&run.u)?;
            let contraction = run.logs.iter().flatten().filter_map(|r| r.contraction).fold(0.0, f64::max);
            Ok(json!({
                "grid": to_json(&grid)?,
                "problem": info,
                "horizon": h,
                "data_size": run.data_size,
                "monitor": run.monitor,
                "max_contraction": contraction,
            }))
        }
    }
}

fn check_kl_cmd(ctx: &mut Ctx) -> Result<Json> {
    let (symbol, dir) = read_symbol(ctx.sec("symbol"))?;
    let s = ctx.sec("kl");
    s.only(&["n_xi", "xi_min", "xi_max", "n_ratio", "ratio_min", "ratio_max", "gammas", "include_xi_zero", "n_random"])?;
    let d = SampleSpec::default();
    let spec = SampleSpec {
        n_xi: s.usize_or("n_xi", d.n_xi)?,
        xi_min: s.f64_or("xi_min", d.xi_min)?,
        xi_max: s.f64_or("xi_max", d.xi_max)?,
        n_ratio: s.usize_or("n_ratio", d.n_ratio)?,
        ratio_min: s.f64_or("ratio_min", d.ratio_min)?,
        ratio_max: s.f64_or("ratio_max", d.ratio_max)?,
        gammas: s.opt_f64_list("gammas")?.unwrap_or(d.gammas),
        include_xi_zero: s.bool_or("include_xi_zero", d.include_xi_zero)?,
        n_random: s.usize_or("n_random", d.n_random)?,
        seed: ctx.seed,
    };
    let r = kl_margin(&symbol, &spec, dir);
    to_json(&r)
}

fn pair_list(sec: &Section, key: &str) -> Result<Vec<(f64, f64)>> {
    let Some(e) = sec.entry(key) else { return Ok(Vec::new()) };
    let bad = || sec.error_at(key, "expected a list of [p, q] pairs");
    let Value::List(items) = &e.value else { return Err(bad()) };
    items
        .iter()
        .map(|it| match it {
            Value::List(v) if v.len() == 2 => match (&v[0], &v[1]) {
                (Value::Num(p), Value::Num(q)) => Ok((*p, *q)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        })
        .collect()
}

fn norms_cmd(ctx: &mut Ctx) -> Result<Json> {
    let grid = read_grid(ctx.cfg)?;
    let sec = ctx.sec("norms");
    sec.only(&["field", "role", "hs", "dual", "bourgain", "sobolev", "lpq", "h1"])?;
    let name = sec.str_or("field", "g")?;
    let role = match sec.str_or("role", if name == "u0" { "snapshot" } else if name == "f" { "spacetime" } else { "boundary" })? {
        "snapshot" => Role::Snapshot,
        "boundary" => Role::Boundary,
        "spacetime" => Role::Spacetime,
        _ => return Err(sec.error_at("role", "role is 'snapshot', 'boundary' or 'spacetime'")),
    };
    let (data, info) = ctx.data(name, &grid, role)?;
    let list = |k: &str| -> Result<Vec<f64>> { Ok(sec.opt_f64_list(k)?.unwrap_or_default()) };
    let mut out = Map::new();
    let named = |v: Vec<(f64, f64)>| -> Json { Json::Array(v.into_iter().map(|(s, n)| json!({ "s": s, "value": n })).collect()) };
    let lpq_vals = |u: &dyn Fn(f64, f64) -> Result<f64>| -> Result<Json> {
        Ok(Json::Array(pair_list(sec, "lpq")?.into_iter().map(|(p, q)| u(p, q).map(|v| json!({ "p": p, "q": q, "value": v }))).collect::<Result<_>>()?))
    };
    // files carry their own kind
    let role = match &data {
        Data::File(AnyField::Boundary(_)) => Role::Boundary,
        Data::File(AnyField::Volume(v)) if v.nt_len() == 1 => Role::Snapshot,
        Data::File(AnyField::Volume(_)) => Role::Spacetime,
        _ => role,
    };
    match role {
        Role::Boundary => {
            let g = data.boundary(&grid)?;
            out.insert("l2".into(), json!(g.physical().l2()));
            out.insert("hs".into(), named(list("hs")?.into_iter().map(|s| (s, hs_boundary_norm(&g, s))).collect()));
            out.insert("dual".into(), named(list("dual")?.into_iter().map(|s| (s, hs_dual_norm(&g, s))).collect()));
            out.insert("bourgain".into(), named(list("bourgain")?.into_iter().map(|s| (s, bourgain_norm(&g, s))).collect()));
            out.insert("lpq".into(), lpq_vals(&|p, q| lp_lq(&g, p, q))?);
        }
        Role::Snapshot => {
            let u = data.snapshot(&grid, YExtent::Half)?;
            out.insert("l2".into(), json!(u.l2_at(0)));
            if sec.bool_or("h1", true)? {
                out.insert("h1".into(), json!(h1_norm(&u, 0)?));
            }
            let sob = list("sobolev")?.into_iter().map(|s| Ok((s, sobolev_volume_norm(&u, 0, s)?))).collect::<Result<Vec<_>>>()?;
            out.insert("sobolev".into(), named(sob));
        }
        Role::Spacetime => {
            let u = data.spacetime(&grid, YExtent::Full)?;
            out.insert("sup_l2".into(), json!((0..u.nt_len()).map(|n| u.l2_at(n)).fold(0.0, f64::max)));
            out.insert("lpq".into(), lpq_vals(&|p, q| lp_lq(&u, p, q))?);
        }
    }
    Ok(json!({ "grid": to_json(&grid)?, "field": name, "data": info, "norms": Json::Object(out) }))
}

fn strichartz_cmd(ctx: &mut Ctx) -> Result<Json> {
    let grid = read_grid(ctx.cfg)?;
    let sec = ctx.sec("strichartz");
    sec.only(&["source", "p", "q", "s", "levels", "lambdas"])?;
    let kind = sec.str_or("source", "pure-bvp")?;
    let source = match kind {
        "pure-bvp" => {
            let (symbol, _) = read_symbol(ctx.sec("symbol"))?;
            match ctx.data("g", &grid, Role::Boundary)?.0 {
                Data::Boundary(g) => Source::PureBvp { g, symbol },
                _ => return Err(sec.error_at("source", "pure-bvp needs a generated [g]")),
            }
        }
        "cauchy" | "cauchy-trace" => match ctx.data("u0", &grid, Role::Snapshot)?.0 {
            Data::Snapshot(u0) if kind == "cauchy" => Source::Cauchy { u0 },
            Data::Snapshot(u0) => Source::CauchyTrace { u0 },
            _ => return Err(sec.error_at("source", "needs a generated [u0]")),
        },
        "forcing" | "forcing-trace" => match ctx.data("f", &grid, Role::Spacetime)?.0 {
            Data::Spacetime(f) if kind == "forcing" => Source::Forcing { f },
            Data::Spacetime(f) => Source::ForcingTrace { f },
            _ => return Err(sec.error_at("source", "needs a generated [f]")),
        },
        _ => return Err(sec.error_at("source", "source is pure-bvp, cauchy, forcing, cauchy-trace or forcing-trace")),
    };
    let d = StrichartzOptions::default();
    let opts = StrichartzOptions { levels: sec.usize_or("levels", d.levels)?, lambdas: sec.opt_f64_list("lambdas")?.unwrap_or(d.lambdas) };
    let pair = (sec.f64_or("p", 4.0)?, sec.f64_or("q", 4.0)?);
    let r = strichartz_report(&source, &grid, pair, sec.f64_or("s", 0.0)?, &opts)?;
    ctx.write_text("csv", &r.tables_csv())?;
    let mut v = to_json(&r)?;
    v["refinement_variation"] = json!(r.refinement_variation());
    v["scaling_variation"] = json!(r.scaling_variation());
    Ok(v)
}

fn kernel_cmd(ctx: &mut Ctx) -> Result<Json> {
    let sec = ctx.sec("kernel");
    sec.only(&["d", "n_y", "y_max", "n_tau", "refine"])?;
    let d = sec.usize_or("d", 2)?;
    let grid = SampleGrid { n_y: sec.usize_or("n_y", 5)?, y_max: sec.f64_or("y_max", 4.0)?, n_tau: sec.usize_or("n_tau", 5)? };
    let b = kernel_nts_bound(d, &grid.samples())?;
    let mut v = json!({ "d": d, "sample_grid": to_json(&grid)?, "bound": to_json(&b)? });
    if sec.bool_or("refine", true)? {
        let r = kernel_nts_bound(d, &grid.refined().samples())?;
        let change = (r.sup - b.sup).abs() / b.sup;
        v["refined"] = to_json(&r)?;
        v["relative_change"] = json!(change);
        v["plateau"] = json!(change <= 0.05);
    }
    Ok(v)
}

fn laplace_cmd(ctx: &mut Ctx) -> Result<Json> {
    let sec = ctx.sec("laplace");
    sec.only(&["n", "scale"])?;
    let n = sec.usize_or("n", 2048)?;
    let spec = LaplaceGrid { scale: sec.f64_or("scale", LaplaceGrid::default().scale)? };
    let r = laplace_opnorm(n, &spec)?;
    Ok(json!({ "n": n, "grid": to_json(&spec)?, "value": r.value, "form_norm": r.form_norm }))
}

fn appendix_cmd(ctx: &mut Ctx) -> Result<Json> {
    let sec = ctx.sec("appendix");
    sec.only(&["j_max", "k_max", "weight", "phi", "lo", "hi", "xi"])?;
    let j_max = sec.usize_or("j_max", 8)? as u32;
    let k_max = sec.usize_or("k_max", 20)? as u32;
    let xi = sec.opt_f64_list("xi")?.unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let weight = match sec.str_or("weight", "bands")? {
        "bands" => Weight::Bands(BandWeight { j_max }),
        "one" => Weight::One,
        _ => return Err(sec.error_at("weight", "weight is 'bands' or 'one'")),
    };
    let phi = match sec.str_or("phi", "band-mass")? {
        "band-mass" => TestFunction::BandMass { j_max },
        "sup" => TestFunction::Sup,
        "indicator" => TestFunction::Indicator { lo: sec.f64_or("lo", 1.0)?, hi: sec.f64_or("hi", 2.0)? },
        _ => return Err(sec.error_at("phi", "phi is 'band-mass', 'sup' or 'indicator'")),
    };
    let r = appendix_form_ratio(&weight, &phi, &xi, k_max)?;
    // the weight on a grid in eta / |xi| holding every band edge
    let bw = BandWeight { j_max };
    let mut etas: Vec<f64> = (0..=40).map(|k| 2f64.powf(-4.0 + (j_max as f64 + 6.0) * k as f64 / 40.0)).collect();
    etas.extend(bw.edges());
    etas.sort_by(f64::total_cmp);
    let (_, table) = appendix_weight_build(j_max, &[1.0], &etas)?;
    let mut csv = String::from("eta_over_xi,r,J,p\n");
    for (i, e) in table.eta.iter().enumerate() {
        let _ = writeln!(csv, "{e},{},{},{:.12e}", table.r[0][i], table.j[0][i], table.p[0][i]);
    }
    ctx.write_text("csv", &csv)?;
    let mut v = to_json(&r)?;
    v["sup_j"] = json!(table.sup_j);
    v["xi"] = json!(xi);
    Ok(v)
}

fn scattering_cmd(ctx: &mut Ctx) -> Result<Json> {
    let grid = read_grid(ctx.cfg)?;
    let mut keys = NLS_KEYS.to_vec();
    keys.extend(["times", "extension", "length"]);
    let sec = ctx.sec("nls");
    sec.only(&keys)?;
    let (prob, info) = nls_problem(ctx, &grid)?;
    let horizon = sec.f64("horizon")?;
    let times = sec.f64_list("times")?;
    let ext = match sec.str_or("extension", "zero")? {
        "zero" => TailExtension::Zero,
        "reflect" => TailExtension::Reflect { length: sec.f64_or("length", 1.0)? },
        _ => return Err(sec.error_at("extension", "extension is 'zero' or 'reflect'")),
    };
    let run = global_small_solve(&prob, horizon, &global_opts(sec)?)?;
    let sp = scattering_profile(&run, &times, ext)?;
    let mut csv = String::from("t,consecutive,residual,extension_gap\n");
    for (i, t) in sp.report.times.iter().enumerate() {
        let c = sp.report.consecutive.get(i).map(|v| format!("{v:.12e}")).unwrap_or_default();
        let _ = writeln!(csv, "{t},{c},{:.12e},{:.12e}", sp.report.residuals[i], sp.report.extension_gap[i]);
    }
    ctx.write_text("csv", &csv)?;
    ctx.write_volume(&sp.profile)?;
    Ok(json!({
        "grid": to_json(&grid)?,
        "problem": info,
        "horizon": horizon,
        "data_size": run.data_size,
        "monitor": run.monitor,
        "scattering": to_json(&sp.report)?,
    }))
}

/// Where outputs go: `--output-dir`, then `HSLAB_OUTPUT_DIR`, then `[output] dir`
/// relative to the run file, then the run file's directory.
pub fn output_dir(cfg: &Config, base: &Path, flag: Option<&Path>) -> Result<PathBuf> {
    if let Some(p) = flag {
        return Ok(p.to_path_buf());
    }
    if let Ok(p) = std::env::var("HSLAB_OUTPUT_DIR") {
        if !p.is_empty() {
            return Ok(PathBuf::from(p));
        }
    }
    Ok(match cfg.section("output").map(|s| s.opt_str("dir")).transpose()?.flatten() {
        Some(d) => base.join(d),
        None => base.to_path_buf(),
    })
}

fn check_sections(cfg: &Config) -> Result<()> {
    const KNOWN: [&str; 16] = [
        "run", "grid", "symbol", "u0", "g", "f", "solve", "nls", "kl", "norms", "strichartz", "kernel", "laplace", "appendix", "output", "scattering",
    ];
    for s in cfg.sections.values() {
        if !KNOWN.contains(&s.name.as_str()) {
            return Err(Error::Parse { line: s.line, col: 2, msg: format!("unknown section [{}]", s.name) });
        }
    }
    if let Some(o) = cfg.section("output") {
        o.only(&["dir", "report", "field", "csv"])?;
    }
    if let Some(r) = cfg.section("run") {
        r.only(&["subcommand", "seed"])?;
    }
    Ok(())
}

/// The subcommand named in `[run]`, if any.
pub fn configured_subcommand(cfg: &Config) -> Result<Option<Subcommand>> {
    let Some(r) = cfg.section("run") else { return Ok(None) };
    match r.opt_str("subcommand")? {
        None => Ok(None),
        Some(s) => Subcommand::from_name(s).map(Some).ok_or_else(|| r.error_at("subcommand", format!("unknown subcommand '{s}'"))),
    }
}

/// The report body of one run. Pure apart from the optional artifact files.
fn dispatch(sub: Subcommand, ctx: &mut Ctx) -> Result<Json> {
    match sub {
        Subcommand::SolveIbvp => solve_ibvp_cmd(ctx),
        Subcommand::SolveBvp => solve_bvp_cmd(ctx),
        Subcommand::SolveNls => solve_nls_cmd(ctx),
        Subcommand::CheckKl => check_kl_cmd(ctx),
        Subcommand::Norms => norms_cmd(ctx),
        Subcommand::Strichartz => strichartz_cmd(ctx),
        Subcommand::KernelBound => kernel_cmd(ctx),
        Subcommand::LaplaceNorm => laplace_cmd(ctx),
        Subcommand::Appendix => appendix_cmd(ctx),
        Subcommand::Scattering => scattering_cmd(ctx),
    }
}

pub struct Outcome {
    pub code: i32,
    pub report: Json,
    pub artifacts: Artifacts,
    pub error: Option<Error>,
}

/// Run a parsed config. Configuration errors found before any output exists are
/// returned as `Err`; errors of the run itself are recorded in the report.
pub fn run(sub: Option<Subcommand>, cfg: &Config, base: &Path, out_flag: Option<&Path>) -> Result<Outcome> {
    check_sections(cfg)?;
    let configured = configured_subcommand(cfg)?;
    let sub = match (sub, configured) {
        (Some(a), Some(b)) if a != b => {
            return Err(cfg.require("run")?.error_at("subcommand", format!("run file is for '{}', invoked as '{}'", b.name(), a.name())));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(Error::Parse { line: 0, col: 0, msg: "no subcommand given on the command line or in [run]".into() }),
    };
    let seed = cfg.section("run").map(|r| r.usize_or("seed", 0)).transpose()?.unwrap_or(0) as u64;
    let out = output_dir(cfg, base, out_flag)?;
    fs::create_dir_all(&out)?;
    let report_name = cfg.section("output").map(|o| o.str_or("report", "report.json").map(str::to_string)).transpose()?.unwrap_or_else(|| "report.json".into());
    let mut ctx = Ctx { cfg, seed, base: base.to_path_buf(), out: out.clone(), written: Vec::new(), empty: Section::default() };
    let result = dispatch(sub, &mut ctx);
    let (code, body, error) = match result {
        Ok(v) => (0, json!({ "status": "ok", "result": v }), None),
        Err(e) if exit_code(&e) == 1 => return Err(e),
        Err(e) => {
            let body = json!({ "status": "error", "error": { "kind": error_kind(&e), "message": e.to_string() } });
            (exit_code(&e), body, Some(e))
        }
    };
    let mut report = json!({ "report_version": REPORT_VERSION, "subcommand": sub.name(), "seed": seed });
    for (k, v) in body.as_object().unwrap() {
        report[k] = v.clone();
    }
    let path = out.join(report_name);
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Format(e.to_string()))? + "\n";
    fs::write(&path, text)?;
    Ok(Outcome { code, report, artifacts: Artifacts { dir: out, report: path, written: ctx.written }, error })
}
