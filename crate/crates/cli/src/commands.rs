use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use kcollapse::bounds::{aggregate, all_bounds, table1, BoundQuery};
use kcollapse::constructions::{
    fixture_x, fixture_y, greedy_unit_vectors, lift_almost_orthogonal, linf_cross, pk_polytope_norm,
    polynomial_vectors, AlmostOrthogonalSet, Metric,
};
use kcollapse::family::{bnb_max_subfamily, check_condition, Condition};
use kcollapse::graphtools::{bm_pipeline_check, equitable_coloring, is_equitable_coloring, max_degree};
use kcollapse::io::{family_json, matrix_json, parse_family, parse_matrix, scalar_json, vector_json, vectors_json};
use kcollapse::matrixform::{check_rows, family_from_matrix, gram_from_family, rank_certificate, row_normalize};
use kcollapse::simplexopt::{max_pow_general, oracle_grid, vertex_oracle};
use kcollapse::{DynFamily, FiniteFieldParams, NormSpace, Rational, Scalar, ScanOptions, SimpleGraph, VectorFamily};
use serde_json::{json, Value};

use crate::params::Params;
use crate::{Command, ConditionArg, Format, KindArg, OutArgs, ScanArgs};

/// Rendered output plus the exit status (0 holds, 1 fails).
struct Report {
    json: Value,
    csv: Option<String>,
    status: u8,
}

impl Report {
    fn ok(json: Value) -> Self {
        Report { json, csv: None, status: 0 }
    }

    fn with_csv(json: Value, csv: String) -> Self {
        Report { json, csv: Some(csv), status: 0 }
    }
}

pub fn run(cmd: Command) -> Result<u8> {
    let (report, out) = match cmd {
        Command::Verify { family, k, condition, scan, out } => (verify(&family, k, condition, &scan)?, out),
        Command::Bound { k, d, p, all, best: _, params, out } => (bound(k, d, p, all, params.as_deref())?, out),
        Command::Table1 { kmax, out } => (table(kmax)?, out),
        Command::Construct { kind, params, k, d, seed, out } => (construct(kind, params.as_deref(), k, d, seed)?, out),
        Command::Gram { family, matrix, d, k, out } => (gram(family.as_deref(), matrix.as_deref(), d, k)?, out),
        Command::Oracle { k, p, params, out } => (oracle(k, p, params.as_deref())?, out),
        Command::Pipeline { family, graph, k, scan, out } => {
            (pipeline(family.as_deref(), graph.as_deref(), k, &scan)?, out)
        }
        Command::Search { k, d, family, out } => (search(k, d, family.as_deref())?, out),
    };
    emit(&report, &out)?;
    Ok(report.status)
}

fn emit(report: &Report, out: &OutArgs) -> Result<()> {
    let text = match out.format {
        Format::Json => serde_json::to_string_pretty(&report.json)? + "\n",
        Format::Csv => match &report.csv {
            Some(c) => c.clone(),
            None => bail!("this command has no CSV output"),
        },
    };
    match &out.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_family(path: &Path) -> Result<DynFamily> {
    Ok(DynFamily::from_json(&read_json(path)?)?)
}

fn scan_options(scan: &ScanArgs) -> Result<ScanOptions> {
    if scan.threads == 0 {
        bail!("--threads must be at least 1");
    }
    Ok(ScanOptions { budget: scan.budget, seed: scan.seed, threads: scan.threads })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",") + "\n";
    for row in rows {
        out += &row.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",");
        out.push('\n');
    }
    out
}

fn plain(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

// ---------------------------------------------------------------------------

fn verify(path: &Path, k: Option<usize>, cond: ConditionArg, scan: &ScanArgs) -> Result<Report> {
    let cond = match (cond, k) {
        (ConditionArg::KCollapsing, Some(k)) => Condition::KCollapsing(k),
        (ConditionArg::KCollapsing, None) => bail!("--k is required for the k-collapsing condition"),
        (ConditionArg::Collapsing, _) => Condition::FullCollapsing,
        (ConditionArg::Strong, _) => Condition::StrongBalancing,
        (ConditionArg::Weak, _) => Condition::WeakBalancing,
    };
    let opts = scan_options(scan)?;
    let json = match read_family(path)? {
        DynFamily::Exact(f) => verify_in(&f, cond, &opts)?,
        DynFamily::Float(f) => verify_in(&f, cond, &opts)?,
    };
    let status = if json["holds"] == Value::Bool(true) { 0 } else { 1 };
    Ok(Report { json, csv: None, status })
}

fn verify_in<S: Scalar>(fam: &VectorFamily<S>, cond: Condition, opts: &ScanOptions) -> Result<Value> {
    let r = check_condition(fam, cond, opts)?;
    let witness_sum = match (&r.witness, cond) {
        (Some(w), Condition::KCollapsing(_) | Condition::FullCollapsing) => {
            let s = fam.sum(w);
            json!({"vector": vector_json(&s), "norm": scalar_json(&fam.space.gauge(&s)?)})
        }
        _ => Value::Null,
    };
    Ok(json!({
        "condition": cond.name(),
        "m": fam.len(),
        "dim": fam.space.dim,
        "norm": fam.space.kind_name(),
        "holds": r.holds,
        "witness": r.witness,
        "witness_sum": witness_sum,
        "margin": scalar_json(&r.margin),
        "sampled": r.sampled,
        "checked": r.checked.to_string(),
    }))
}

fn bound(k: usize, d: usize, p: Option<u32>, all: bool, params: Option<&str>) -> Result<Report> {
    let mut params = Params::parse(params)?;
    let mut q = BoundQuery::new(k, d);
    q.p = p;
    q.bm_distance_sq = params.rational("dsq")?;
    q.lambda_sq = params.rational("lambdasq")?;
    params.finish()?;
    let bounds = all_bounds(&q)?;
    if all {
        let list = serde_json::to_value(&bounds)?;
        let cols = ["name", "kind", "quantity", "value", "exact", "applicable", "per_space", "flag", "note"];
        let rows = list.as_array().expect("array").iter().map(|b| {
            cols.iter()
                .map(|c| match (c, &b[*c]) {
                    (&"quantity", Value::Array(qs)) => qs.iter().map(plain).collect::<Vec<_>>().join("+"),
                    (_, v) => plain(v),
                })
                .collect()
        });
        let text = csv(&cols, rows);
        return Ok(Report::with_csv(json!({"k": k, "d": d, "bounds": list}), text));
    }
    let best = aggregate(k, d, &bounds)?;
    let upper = best.best_upper.as_ref().map(ToString::to_string).unwrap_or_default();
    let exact = best.exact.as_ref().map(ToString::to_string).unwrap_or_default();
    let text = csv(
        &["k", "d", "best_lower", "lower_source", "best_upper", "upper_source", "exact", "greedy_flagged"],
        [vec![
            k.to_string(),
            d.to_string(),
            best.best_lower.to_string(),
            best.lower_source.to_string(),
            upper,
            best.upper_source.unwrap_or("").to_string(),
            exact,
            best.greedy.to_string(),
        ]],
    );
    Ok(Report::with_csv(serde_json::to_value(&best)?, text))
}

fn table(kmax: usize) -> Result<Report> {
    if kmax < 2 {
        bail!("--kmax must be at least 2");
    }
    let rows = table1(2..=kmax)?;
    let text = csv(
        &["k", "gamma", "rank_base", "bm_base", "greedy_base"],
        rows.iter().map(|r| std::iter::once(r.k.to_string()).chain(r.printed.iter().cloned()).collect()),
    );
    Ok(Report::with_csv(serde_json::to_value(&rows)?, text))
}

fn cross_in(space: NormSpace<Rational>) -> Result<VectorFamily<Rational>> {
    let d = space.dim;
    let vectors = (0..d)
        .flat_map(|i| {
            [1, -1].map(|s| (0..d).map(|j| Rational::from_i64(if i == j { s } else { 0 })).collect::<Vec<_>>())
        })
        .collect();
    Ok(VectorFamily::new(space, vectors)?)
}

fn metric_json(m: Metric) -> Value {
    match m {
        Metric::Identity => json!("identity"),
        Metric::RowBlocks(w) => json!({"row_blocks": w}),
    }
}

fn almost_orthogonal_json<S: Scalar>(u: &AlmostOrthogonalSet<S>) -> Value {
    json!({
        "dim": u.dim,
        "size": u.len(),
        "metric": metric_json(u.metric),
        "scale": scalar_json(&u.scale),
        "bound": scalar_json(&u.bound),
        "strict": u.strict,
        "coords": vectors_json(&u.coords),
    })
}

fn construct(
    kind: KindArg,
    params: Option<&str>,
    k: Option<usize>,
    d: Option<usize>,
    seed: Option<u64>,
) -> Result<Report> {
    let mut p = Params::parse(params)?;
    let json = match kind {
        KindArg::Cross => family_json(&linf_cross::<Rational>(p.usize_or("d", d)?)?),
        KindArg::Pk => {
            let (d, k) = (p.usize_or("d", d)?, p.usize_or("k", k)?);
            family_json(&cross_in(pk_polytope_norm(d, k)?)?)
        }
        KindArg::FixtureX => {
            let d = p.usize_or("d", d)?;
            let eps = p.rational("eps")?.context("missing parameter eps")?;
            family_json(&fixture_x(d, &eps)?)
        }
        KindArg::FixtureY => family_json(&fixture_y(p.usize_or("d", d)?)?),
        KindArg::Poly => {
            let ff = FiniteFieldParams::new(p.usize_or("q", None)?, p.usize_or("s", None)?)?;
            almost_orthogonal_json(&polynomial_vectors(&ff)?)
        }
        KindArg::Lift => {
            let ff = FiniteFieldParams::new(p.usize_or("q", None)?, p.usize_or("s", None)?)?;
            let k = p.usize_or("k", k)?;
            family_json(&lift_almost_orthogonal(&polynomial_vectors(&ff)?, k)?.family)
        }
        KindArg::Greedy => {
            let seed = p.u64("seed")?.or(seed).context("greedy is randomised and needs --seed")?;
            let dim = p.usize_or("dim", d.map(|d| d.saturating_sub(1)))?;
            let k = p.usize_or("k", k)?;
            let trials = p.u64("trials")?.unwrap_or(1000);
            let max = p.usize("max")?.unwrap_or(256);
            let delta = 1.0 / (2 * k + 1) as f64;
            let u = greedy_unit_vectors(dim, delta, seed, trials, max)?;
            family_json(&lift_almost_orthogonal(&u, k)?.family)
        }
    };
    p.finish()?;
    Ok(Report::ok(json))
}

fn certificate_json<S: Scalar>(a: &kcollapse::CollapseMatrix<S>) -> Value {
    let c = rank_certificate(a);
    json!({
        "trace": scalar_json(&c.trace),
        "frobenius_sq": scalar_json(&c.frobenius_sq),
        "rank_lower_bound": scalar_json(&c.rank_lower_bound),
        "rank": c.rank,
        "equality_case": c.equality_case,
        "bound_holds": c.bound_holds(),
    })
}

fn gram_of<S: Scalar>(fam: &VectorFamily<S>, k: Option<usize>) -> Result<Value> {
    let g = gram_from_family(fam)?;
    let mut v = json!({"gram": matrix_json(&g), "certificate": certificate_json(&g)});
    if let Some(k) = k {
        v["rows_k_collapsing"] = json!(check_rows(&g, k));
    }
    Ok(v)
}

fn gram(family: Option<&Path>, matrix: Option<&Path>, d: Option<usize>, k: Option<usize>) -> Result<Report> {
    if let Some(path) = family {
        let json = match read_family(path)? {
            DynFamily::Exact(f) => gram_of(&f, k)?,
            DynFamily::Float(f) => gram_of(&f, k)?,
        };
        return Ok(Report::ok(json));
    }
    let a = parse_matrix::<Rational>(&read_json(matrix.expect("clap requires one of the two"))?)?;
    let n = row_normalize(&a)?;
    let mut json = json!({"normalized": matrix_json(&n), "certificate": certificate_json(&n)});
    if let Some(k) = k {
        json["rows_k_collapsing"] = json!(check_rows(&n, k));
    }
    if let Some(d) = d {
        json["family"] = family_json(&family_from_matrix(&n, d)?);
    }
    Ok(Report::ok(json))
}

fn oracle(k: Option<usize>, p: Option<u32>, params: Option<&str>) -> Result<Report> {
    let mut params = Params::parse(params)?;
    if let Some(m) = params.usize("m")? {
        let balanced = params.flag("balanced")?;
        params.finish()?;
        let k = k.context("--k is required for a single instance")?;
        let p = p.unwrap_or(1);
        let r = vertex_oracle(m, k, p, balanced)?;
        let mut json = json!({
            "m": m,
            "k": k,
            "p": p,
            "balanced": balanced,
            "value": scalar_json(&r.value),
            "argmax": vector_json(&r.argmax),
            "vertices": r.vertices.len(),
        });
        if !balanced {
            let c = max_pow_general(m, k, p)?;
            json["closed_form"] = scalar_json(&c.value);
            json["exactness"] = serde_json::to_value(c.exactness)?;
        }
        let text = csv(
            &["m", "k", "p", "balanced", "value"],
            [vec![m.to_string(), k.to_string(), p.to_string(), balanced.to_string(), r.value.to_string()]],
        );
        return Ok(Report::with_csv(json, text));
    }
    let mmin = params.usize("mmin")?.unwrap_or(4);
    let mmax = params.usize("mmax")?.unwrap_or(12);
    params.finish()?;
    if k.is_some() {
        bail!("--k applies to a single instance; give m in --params");
    }
    let ps: Vec<u32> = p.map_or(vec![1, 2, 3], |p| vec![p]);
    let rows = oracle_grid(mmin..=mmax, &ps)?;
    let exactness = |r: &kcollapse::simplexopt::GridRow| plain(&serde_json::to_value(r.exactness).expect("enum"));
    let json = Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "m": r.m, "k": r.k, "p": r.p,
                    "closed_form": scalar_json(&r.closed_form),
                    "oracle": scalar_json(&r.oracle),
                    "exactness": exactness(r),
                })
            })
            .collect(),
    );
    let text = csv(
        &["m", "k", "p", "closed_form", "oracle", "exactness"],
        rows.iter().map(|r| {
            vec![
                r.m.to_string(),
                r.k.to_string(),
                r.p.to_string(),
                r.closed_form.to_string(),
                r.oracle.to_string(),
                exactness(r),
            ]
        }),
    );
    let status = if rows.iter().all(|r| r.consistent()) { 0 } else { 1 };
    Ok(Report { json, csv: Some(text), status })
}

fn parse_graph(v: &Value) -> Result<SimpleGraph> {
    let n = v.get("n").and_then(Value::as_u64).context("graph needs an integer \"n\"")? as usize;
    let edges = v
        .get("edges")
        .and_then(Value::as_array)
        .context("graph needs an \"edges\" array")?
        .iter()
        .map(|e| match e.as_array().map(|p| p.iter().map(Value::as_u64).collect::<Vec<_>>()).as_deref() {
            Some([Some(a), Some(b)]) => Ok((*a as usize, *b as usize)),
            _ => bail!("edges are pairs of vertex indices, got {e}"),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimpleGraph::from_edges(n, &edges)?)
}

fn pipeline(family: Option<&Path>, graph: Option<&Path>, k: usize, scan: &ScanArgs) -> Result<Report> {
    if let Some(path) = graph {
        let g = parse_graph(&read_json(path)?)?;
        let c = equitable_coloring(&g, k)?;
        if !is_equitable_coloring(&g, k, &c.assignment) {
            return Err(kcollapse::Error::InvariantBreach("colouring failed the independent check".into()).into());
        }
        let json = json!({
            "n": g.n,
            "k": k,
            "max_degree": max_degree(&g),
            "assignment": c.assignment,
            "class_sizes": c.class_sizes,
        });
        return Ok(Report::ok(json));
    }
    let opts = scan_options(scan)?;
    let report = match read_family(family.expect("clap requires one of the two"))? {
        DynFamily::Exact(f) => bm_pipeline_check(&f, k, &opts)?,
        DynFamily::Float(f) => bm_pipeline_check(&f, k, &opts)?,
    };
    let mut json = serde_json::to_value(&report)?;
    json["ok"] = json!(report.ok());
    json["first_failure"] = serde_json::to_value(report.first_failure())?;
    Ok(Report { json, csv: None, status: if report.ok() { 0 } else { 1 } })
}

fn sign_vectors(d: usize) -> Result<VectorFamily<Rational>> {
    if d == 0 || d > 8 {
        bail!("sign-vector search needs 1 <= d <= 8, got {d}");
    }
    let vectors = (0..3usize.pow(d as u32))
        .map(|mut n| {
            (0..d)
                .map(|_| {
                    let digit = (n % 3) as i64 - 1;
                    n /= 3;
                    Rational::from_i64(digit)
                })
                .collect()
        })
        .filter(|v: &Vec<Rational>| v.iter().any(|x| !x.approx_zero()))
        .collect();
    Ok(VectorFamily::new(NormSpace::linf(d), vectors)?)
}

fn search(k: usize, d: Option<usize>, family: Option<&Path>) -> Result<Report> {
    let candidates = match (family, d) {
        (Some(path), _) => parse_family::<Rational>(&read_json(path)?)?,
        (None, Some(d)) => sign_vectors(d)?,
        (None, None) => bail!("give --d or --family"),
    };
    let r = bnb_max_subfamily(&candidates, k)?;
    let chosen = candidates.subfamily(&r.indices);
    Ok(Report::ok(json!({
        "k": k,
        "candidates": candidates.len(),
        "size": r.size(),
        "indices": r.indices,
        "nodes": r.nodes,
        "family": family_json(&chosen),
    })))
}
