use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use sarod::construction::{generate_ordering, Recipe};
use sarod::graph::{triple_index_graph_components, TripleMode};
use sarod::io::{read_measurements, read_network, write_network, NetworkFile};
use sarod::quad::quad_global_rigidity;
use sarod::rigidity::{duality_check, infinitesimal_rigidity_test};
use sarod::snl::{
    build_network, build_network_with_measurements, localizability_check, localize as run_localize, problem_residuals,
    truth_ranks, MethodChoice, SensorNetwork, Verdict,
};
use sarod::Framework;

use crate::RunConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_LOCALIZABLE: u8 = 2;

/// Writes `text` to `out`, or to standard output.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn parse_anchor_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let id: usize = tok.parse().with_context(|| format!("anchor id '{tok}' is not an integer"))?;
        if id == 0 {
            bail!("anchor ids are 1-based");
        }
        out.push(id - 1);
    }
    Ok(out)
}

pub fn generate(recipe: &str, n: usize, seed: u64, anchors: &str, out: Option<&Path>) -> Result<u8> {
    let recipe: Recipe = recipe.parse()?;
    let anchors = parse_anchor_list(anchors)?;
    let g = generate_ordering(recipe, n, seed)?;
    if let Some(&a) = anchors.iter().find(|&&a| a >= n) {
        bail!("anchor {} exceeds n = {n}", a + 1);
    }
    let file = NetworkFile::from_framework(&g.framework, &anchors, Some(g.log));
    match out {
        Some(p) => write_network(p, &file)?,
        None => emit(None, &(serde_json::to_string_pretty(&file)? + "\n"))?,
    }
    Ok(EXIT_OK)
}

fn load(input: &Path) -> Result<(Framework, Vec<usize>)> {
    let file = read_network(input)?;
    file.to_framework().with_context(|| format!("{}", input.display()))
}

fn network_for(fw: &Framework, anchors: &[usize], measurements: Option<&Path>) -> Result<SensorNetwork> {
    Ok(match measurements {
        Some(p) => build_network_with_measurements(fw, anchors, &read_measurements(p)?.to_set()?)?,
        None => build_network(fw, anchors)?,
    })
}

pub fn analyze(input: &Path, cfg: &RunConfig, with_verdict: bool, out: Option<&Path>) -> Result<u8> {
    let (fw, anchors) = load(input)?;
    let mut report = serde_json::Map::new();
    report.insert("n".into(), json!(fw.n()));
    report.insert("m".into(), json!(fw.m()));
    if fw.n() >= 3 {
        let rr = infinitesimal_rigidity_test(&fw, cfg.rtol)?;
        report.insert("rigidity".into(), serde_json::to_value(&rr)?);
        report.insert("duality".into(), serde_json::to_value(duality_check(&fw, cfg.rtol)?)?);
    }
    let (sa, rod) = fw.triples(TripleMode::Full);
    report.insert(
        "components".into(),
        json!({
            "c_a": triple_index_graph_components(&sa, &fw.graph).count,
            "c_d": triple_index_graph_components(&rod, &fw.graph).count,
            "sa_triples": sa.len(),
            "rod_triples": rod.len(),
        }),
    );
    if fw.n() == 4 && fw.m() == 4 {
        if let Ok(q) = quad_global_rigidity(&fw) {
            report.insert("quad".into(), quad_json(&q));
        }
    }
    if anchors.len() >= 2 {
        let net = build_network(&fw, &anchors)?;
        let tr = truth_ranks(&net, cfg.rtol);
        let mut loc = json!({
            "anchors": net.anchors.iter().map(|a| a + 1).collect::<Vec<_>>(),
            "added_edges": net.added_edges,
            "m": tr.m,
            "rank_CD": tr.rank_cd,
            "rows_CD": tr.rows_cd,
            "rank_CB": tr.rank_cb,
            "rows_CB": tr.rows_cb,
            "null_CB": tr.null_cb,
            "warnings": net.warnings,
        });
        if with_verdict {
            let entry = match localizability_check(&net, &cfg.solver()) {
                Ok(meta) => json!({
                    "method": meta.method,
                    "verdict": meta.verdict,
                    "evidence": meta.evidence,
                    "starts": meta.starts,
                    "converged": meta.converged,
                    "clusters": meta.clusters,
                }),
                Err(e) => json!({ "error": e.to_string() }),
            };
            loc["localizability"] = entry;
        }
        report.insert("localization".into(), loc);
    }
    emit(out, &(serde_json::to_string_pretty(&Value::Object(report))? + "\n"))?;
    Ok(EXIT_OK)
}

fn quad_json(q: &sarod::quad::QuadVerdict) -> Value {
    json!({
        "case": q.case.number(),
        "case_name": q.case,
        "globally_rigid": q.globally_rigid,
        "margin": q.margin,
        "boundary": q.boundary,
        "canonical_order": q.canonical.iter().map(|v| v + 1).collect::<Vec<_>>(),
    })
}

pub fn check_quad(input: &Path, out: Option<&Path>) -> Result<u8> {
    let (fw, _) = load(input)?;
    let q = quad_global_rigidity(&fw)?;
    emit(out, &(serde_json::to_string_pretty(&quad_json(&q))? + "\n"))?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
pub fn localize(
    input: &Path,
    method: &str,
    measurements: Option<&Path>,
    cfg: &RunConfig,
    out: Option<&Path>,
    report: Option<&Path>,
    timings: bool,
) -> Result<u8> {
    let choice: MethodChoice = method.parse()?;
    let (fw, anchors) = load(input)?;
    let started = Instant::now();
    let net = network_for(&fw, &anchors, measurements)?;
    let loc = run_localize(&net, choice, &cfg.solver())?;
    let elapsed = started.elapsed().as_secs_f64();

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["vertex_id", "true_x", "true_y", "est_x", "est_y", "err"])?;
    for (v, (t, e)) in net.truth.points.iter().zip(&loc.recovered.positions.points).enumerate() {
        csv.write_record([
            (v + 1).to_string(),
            t.x.to_string(),
            t.y.to_string(),
            e.x.to_string(),
            e.y.to_string(),
            (t - e).norm().to_string(),
        ])?;
    }
    emit(out, &String::from_utf8(csv.into_inner()?)?)?;

    if let Some(path) = report {
        let meta = &loc.solution.meta;
        let residuals = problem_residuals(&net, &loc.recovered.positions)?;
        let mut warnings = net.warnings.clone();
        warnings.extend(loc.recovered.warnings.iter().cloned());
        if meta.infeasible {
            warnings.push("infeasible numerics: some solved distance is not positive".into());
        }
        let mut rep = json!({
            "n": net.n(),
            "m": net.m(),
            "anchors": net.anchors.iter().map(|a| a + 1).collect::<Vec<_>>(),
            "method": meta.method,
            "verdict": meta.verdict,
            "mse": loc.mse,
            "evidence": meta.evidence,
            "solver": {
                "iterations": meta.iterations,
                "starts": meta.starts,
                "converged": meta.converged,
                "clusters": meta.clusters,
                "cost": meta.cost,
                "seed": cfg.seed,
            },
            "residuals": {
                "cycle": loc.solution.cycle_residual,
                "unit_norm_max": loc.solution.unit_residual.iter().copied().fold(0.0, f64::max),
                "sa_max": residuals.sa,
                "rod_max": residuals.rod,
                "anchor": loc.recovered.anchor_residual,
            },
            "warnings": warnings,
        });
        if timings {
            rep["wall_clock_s"] = json!(elapsed);
        }
        std::fs::write(path, serde_json::to_string_pretty(&rep)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(exit_code(loc.verdict()))
}

pub fn exit_code(v: Verdict) -> u8 {
    if v.is_unique() {
        EXIT_OK
    } else {
        EXIT_NOT_LOCALIZABLE
    }
}
