use std::fs;
use std::path::{Path, PathBuf};

use homology_lab::cohomology::{coboundary_matrix, random_cocycle, test_equivalent_cohomological, DEFAULT_TOL};
use homology_lab::complex::{
    chain_file_from_str, figure_eight, filled_square, generate, load_complex, load_filtration, save_complex,
    two_hollow_triangles, validate_filtration, vietoris_rips, FiltrationPair, GeneratorKind, SimplicialComplex,
};
use homology_lab::homology::{
    betti_via_tracking, detect_cycle_stochastic, is_cycle_exact, sample_cycles, test_equivalent, test_trivial,
    track_classes, Chain, Confidence, TestMode,
};
use homology_lab::linalg::sub_seed;
use homology_lab::operators::{
    boundary_matrix, dense_to_matrix_market, laplacian, normalized_laplacian, persistent_laplacian,
};
use homology_lab::spectra::{
    estimate_normalized_betti, estimate_normalized_persistent_betti, exact_betti, exact_persistent_betti,
    persistent_betti_routes, BettiEstimate,
};
use homology_lab::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::config::{show, show_opt, RunConfig};
use crate::{CliError, CliResult};

pub(crate) fn dispatch(cli: &Cli, seed: u64) -> CliResult<Value> {
    let cfg = |name: &str| RunConfig::new(name, seed, cli.no_oracle);
    match &cli.command {
        Command::Betti(a) => match &a.points {
            Some(points) => betti_sweep(a, points, cfg("betti")),
            None => betti(a, cfg("betti")),
        },
        Command::PersistentBetti(a) => persistent(a, cfg("persistent-betti")),
        Command::TestTrivial(a) => trivial(a, cfg("test-trivial")),
        Command::TestEquiv(a) => equiv(a, cfg("test-equiv")),
        Command::DetectCycle(a) => detect(a, cfg("detect-cycle")),
        Command::Track(a) => track(a, cfg("track")),
        Command::BettiTrack(a) => betti_track(a, cfg("betti-track")),
        Command::Gen(a) => gen(a, cfg("gen")),
        Command::DumpOperator(a) => dump(a, cfg("dump-operator")),
    }
}

fn finish(mut v: Value, cfg: &RunConfig) -> CliResult<Value> {
    v["config"] = serde_json::to_value(cfg).expect("config serializes");
    Ok(v)
}

fn to_json(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("result serializes")
}

fn load(p: &Path) -> CliResult<SimplicialComplex> {
    Ok(load_complex(p, false)?)
}

fn read(p: &Path) -> CliResult<String> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())).into())
}

fn write(p: &Path, text: &str) -> CliResult<()> {
    fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())).into())
}

/// Reads a chain file and checks it against `k`.
fn load_chain(p: &Path, k: &SimplicialComplex) -> CliResult<Chain> {
    let c = Chain::from_file(&chain_file_from_str(&read(p)?)?)?;
    c.check_bound(k)?;
    Ok(c)
}

fn load_pair(input: &FiltrationInput) -> CliResult<(FiltrationPair, Vec<String>)> {
    let ((k1, k2), inputs) = match (&input.filtration, &input.k1, &input.k2) {
        (Some(m), _, _) => (load_filtration(m, false)?, vec![show(m)]),
        (None, Some(a), Some(b)) => ((load(a)?, load(b)?), vec![show(a), show(b)]),
        _ => return Err(CliError::Usage("give --filtration or both --k1 and --k2".into())),
    };
    Ok((validate_filtration(&k1, &k2)?, inputs))
}

fn test_mode(cfg: &RunConfig) -> TestMode {
    match cfg.mode {
        Mode::Exact => TestMode::Exact,
        Mode::Stochastic => TestMode::Stochastic(cfg.params.clone()),
    }
}

fn stochastic_json(est: &BettiEstimate, n: usize, cfg: &RunConfig) -> Value {
    json!({
        "betti": (est.estimate * n as f64).round() as u64,
        "normalized": est.estimate,
        "estimate": est.estimate,
        "stderr": est.stderr,
        "method": "stochastic",
        "params": {
            "delta": est.delta,
            "degree": cfg.params.degree,
            "probes": cfg.params.probes,
            "probe_kind": cfg.params.probe_kind,
            "seed": cfg.params.seed,
            "rescale": est.rescale,
        },
        "diagnostics": {
            "raw": est.raw,
            "filter_at_zero": est.filter_at_zero,
            "n": est.n,
        },
    })
}

fn exact_json(b: usize, n: usize) -> Value {
    json!({ "betti": b, "normalized": b as f64 / n as f64, "method": "exact" })
}

fn betti(a: &BettiArgs, cfg: RunConfig) -> CliResult<Value> {
    let input = a.input.as_deref().expect("clap requires --input without --points");
    let k = load(input)?;
    let mut cfg = cfg.input(input).estimator(&a.est, k.total())?;
    cfg.r = Some(a.r);
    cfg.output = show_opt(&a.dump_operator);
    let n = k.require_layer(a.r)?;
    if let Some(p) = &a.dump_operator {
        write(p, &laplacian(&k, a.r)?.to_matrix_market())?;
    }
    let mut v = match cfg.mode {
        Mode::Exact => exact_json(exact_betti(&k, a.r)?, n),
        Mode::Stochastic => stochastic_json(&estimate_normalized_betti(&k, a.r, &cfg.params)?, n, &cfg),
    };
    if cfg.wants_oracle() {
        v["oracle"] = exact_json(exact_betti(&k, a.r)?, n);
    }
    finish(v, &cfg)
}

fn parse_thresholds(s: &str) -> CliResult<Vec<f64>> {
    let ts = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad threshold {t:?}")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    if ts
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(CliError::Usage("thresholds must be strictly increasing".into()));
    }
    Ok(ts)
}

fn betti_sweep(a: &BettiArgs, points: &Path, cfg: RunConfig) -> CliResult<Value> {
    let pts: Vec<Vec<f64>> = serde_json::from_str(&read(points)?).map_err(Error::from)?;
    let ts = parse_thresholds(a.thresholds.as_deref().unwrap_or(""))?;
    let complexes = ts
        .iter()
        .map(|&t| vietoris_rips(&pts, t, a.max_dim))
        .collect::<homology_lab::Result<Vec<_>>>()?;
    let largest = complexes.iter().map(SimplicialComplex::total).max().unwrap_or(0);
    let mut cfg = cfg
        .input(points)
        .estimator(&a.est, largest)?
        .option("thresholds", &ts)
        .option("max_dim", a.max_dim);
    cfg.r = Some(a.r);
    cfg.emit_plot_data = show_opt(&a.emit_plot_data);
    let method = match cfg.mode {
        Mode::Exact => "exact",
        Mode::Stochastic => "stochastic",
    };

    let mut csv = String::from("threshold,r,betti,method\n");
    let mut rows = Vec::with_capacity(ts.len());
    for (t, k) in ts.iter().zip(&complexes) {
        let n = k.count(a.r);
        let mut row = if n == 0 {
            json!({ "betti": 0, "normalized": null, "method": method })
        } else {
            match cfg.mode {
                Mode::Exact => exact_json(exact_betti(k, a.r)?, n),
                Mode::Stochastic => stochastic_json(&estimate_normalized_betti(k, a.r, &cfg.params)?, n, &cfg),
            }
        };
        if cfg.wants_oracle() && n > 0 {
            row["oracle"] = exact_json(exact_betti(k, a.r)?, n);
        }
        row["threshold"] = json!(t);
        row["simplices"] = json!(k.total());
        csv.push_str(&format!("{t},{},{},{method}\n", a.r, row["betti"]));
        rows.push(row);
    }
    if let Some(p) = &a.emit_plot_data {
        write(p, &csv)?;
    }
    finish(json!({ "profile": rows }), &cfg)
}

fn persistent(a: &PersistentArgs, cfg: RunConfig) -> CliResult<Value> {
    let (f, inputs) = load_pair(&a.input)?;
    let mut cfg = cfg.estimator(&a.est, f.k2.total())?;
    cfg.inputs = inputs;
    cfg.r = Some(a.r);
    cfg.output = show_opt(&a.dump_operator);
    let n = f.k1.require_layer(a.r)?;
    if let Some(p) = &a.dump_operator {
        write(p, &dense_to_matrix_market(&persistent_laplacian(&f, a.r)?.total))?;
    }
    let exact = |f: &FiltrationPair| -> CliResult<Value> {
        let b = exact_persistent_betti(f, a.r)?;
        let routes = persistent_betti_routes(f, a.r)?;
        let mut v = exact_json(b, n);
        v["route_a"] = json!(routes.route_a);
        v["route_b"] = json!(routes.route_b);
        v["betti_k1"] = json!(exact_betti(&f.k1, a.r)?);
        Ok(v)
    };
    let mut v = match cfg.mode {
        Mode::Exact => exact(&f)?,
        Mode::Stochastic => stochastic_json(&estimate_normalized_persistent_betti(&f, a.r, &cfg.params)?, n, &cfg),
    };
    if cfg.wants_oracle() {
        v["oracle"] = exact(&f)?;
    }
    finish(v, &cfg)
}

fn trivial(a: &TrivialArgs, cfg: RunConfig) -> CliResult<Value> {
    let k = load(&a.input)?;
    let c = load_chain(&a.chain, &k)?;
    let mut cfg = cfg.input(&a.input).input(&a.chain).estimator(&a.est, k.total())?;
    cfg.r = Some(c.r());
    let mut v = to_json(&test_trivial(&k, &c, &test_mode(&cfg))?);
    if cfg.wants_oracle() {
        v["oracle"] = to_json(&test_trivial(&k, &c, &TestMode::Exact)?);
    }
    finish(v, &cfg)
}

fn equiv(a: &EquivArgs, cfg: RunConfig) -> CliResult<Value> {
    let k = load(&a.input)?;
    let c1 = load_chain(&a.chain[0], &k)?;
    let c2 = load_chain(&a.chain[1], &k)?;
    let mut cfg = cfg
        .input(&a.input)
        .input(&a.chain[0])
        .input(&a.chain[1])
        .estimator(&a.est, k.total())?
        .option("method", a.method);
    cfg.r = Some(c1.r());
    cfg.output = show_opt(&a.dump_witness);
    let seed = cfg.params.seed;
    let mut v = match a.method {
        EquivMethod::Homology => to_json(&test_equivalent(&k, &c1, &c2, &test_mode(&cfg))?),
        EquivMethod::Cohomology => {
            cfg = cfg.option("witnesses", a.witnesses);
            let out = test_equivalent_cohomological(&k, &c1, &c2, a.witnesses, DEFAULT_TOL, seed)?;
            if let Some(p) = &a.dump_witness {
                // the separating cocycle if there is one, else the first draw
                let w = match &out.distinguishing {
                    Some(w) => Some(w.cochain.clone()),
                    None if out.witnesses > 0 => Some(random_cocycle(&k, c1.r(), sub_seed(seed, 0))?),
                    None => None,
                };
                write(p, &serde_json::to_string(&w).expect("cochain serializes"))?;
            }
            json!({
                "answer": out.equivalent,
                "method": "cohomology",
                "confidence": Confidence::High,
                "witnesses": out.witnesses,
                "distinguishing": out.distinguishing.as_ref().map(|w| json!({
                    "index": w.index,
                    "difference": w.difference,
                })),
            })
        }
    };
    let oracle = cfg.oracle && (a.method == EquivMethod::Cohomology || cfg.mode == Mode::Stochastic);
    if oracle {
        v["oracle"] = to_json(&test_equivalent(&k, &c1, &c2, &TestMode::Exact)?);
    }
    finish(v, &cfg)
}

fn detect(a: &DetectArgs, cfg: RunConfig) -> CliResult<Value> {
    let k = load(&a.input)?;
    let c = load_chain(&a.chain, &k)?;
    let mut cfg = cfg.input(&a.input).input(&a.chain).option("eta", a.eta);
    cfg.mode = Mode::Stochastic;
    cfg.oracle &= k.total() <= crate::ORACLE_SIZE_GATE;
    cfg.r = Some(c.r());
    let d = detect_cycle_stochastic(&k, &c, a.eta, cfg.params.seed)?;
    let mut v = json!({
        "answer": d.verdict,
        "method": "stochastic",
        "p": d.p,
        "trials": d.trials,
        "first_success": d.first_success,
    });
    if cfg.oracle {
        v["oracle"] = json!({ "is_cycle": is_cycle_exact(&k, &c)? });
    }
    finish(v, &cfg)
}

fn track(a: &TrackArgs, cfg: RunConfig) -> CliResult<Value> {
    let stages = a.stages.iter().map(|p| load(p)).collect::<CliResult<Vec<_>>>()?;
    let first = &stages[0];
    let chains = a
        .chain
        .iter()
        .map(|p| load_chain(p, first))
        .collect::<CliResult<Vec<_>>>()?;
    let size = stages.iter().map(SimplicialComplex::total).max().unwrap_or(0);
    let mut cfg = cfg.estimator(&a.est, size)?;
    cfg.inputs = a.stages.iter().chain(&a.chain).map(|p| show(p)).collect();
    cfg.r = chains.first().map(Chain::r);
    let mut v = to_json(&track_classes(&stages, &chains, &test_mode(&cfg))?);
    if cfg.wants_oracle() {
        v["oracle"] = to_json(&track_classes(&stages, &chains, &TestMode::Exact)?);
    }
    finish(v, &cfg)
}

fn betti_track(a: &BettiTrackArgs, cfg: RunConfig) -> CliResult<Value> {
    let k = load(&a.input)?;
    let mut cfg = cfg.input(&a.input).estimator(&a.est, k.total())?;
    cfg.r = Some(a.r);
    let cycles = if a.chain.is_empty() {
        cfg = cfg.option("samples", a.samples);
        sample_cycles(&k, a.r, a.samples, cfg.params.seed)?
    } else {
        for p in &a.chain {
            cfg = cfg.input(p);
        }
        a.chain.iter().map(|p| load_chain(p, &k)).collect::<CliResult<_>>()?
    };
    let mut v = to_json(&betti_via_tracking(&k, a.r, &cycles, &test_mode(&cfg))?);
    if cfg.wants_oracle() {
        v["oracle"] = json!({
            "tracking": betti_via_tracking(&k, a.r, &cycles, &TestMode::Exact)?.betti,
            "betti": exact_betti(&k, a.r)?,
        });
    }
    finish(v, &cfg)
}

fn gen(a: &GenArgs, cfg: RunConfig) -> CliResult<Value> {
    let need = |what: &str| CliError::Usage(format!("--kind {} needs --{what}", a.kind));
    let kind = a.kind.replace('-', "_");
    let mut cfg = cfg.option("kind", &kind);
    cfg.output = Some(show(&a.out));
    let k = match kind.as_str() {
        "figure_eight" => figure_eight(),
        "filled_square" => filled_square(),
        "two_hollow_triangles" => two_hollow_triangles(),
        other => {
            let g = match other {
                "point" => GeneratorKind::Point,
                "circle" => GeneratorKind::Circle {
                    m: a.m.ok_or_else(|| need("m"))?,
                },
                "hollow_triangle" => GeneratorKind::HollowTriangle,
                "filled_triangle" => GeneratorKind::FilledTriangle,
                "tetrahedron_boundary" => GeneratorKind::TetrahedronBoundary,
                "torus" => GeneratorKind::Torus,
                "sphere2" => GeneratorKind::Sphere2,
                "vietoris_rips" => {
                    let p: &PathBuf = a.points.as_ref().ok_or_else(|| need("points"))?;
                    cfg = cfg.input(p);
                    GeneratorKind::VietorisRips {
                        points: serde_json::from_str(&read(p)?).map_err(Error::from)?,
                        threshold: a.threshold.ok_or_else(|| need("threshold"))?,
                        max_dim: a.max_dim,
                    }
                }
                "random_vietoris_rips" => GeneratorKind::RandomVietorisRips {
                    n_points: a.n_points.ok_or_else(|| need("n-points"))?,
                    ambient_dim: a.ambient_dim,
                    threshold: a.threshold.ok_or_else(|| need("threshold"))?,
                    max_dim: a.max_dim,
                },
                _ => return Err(CliError::Usage(format!("unknown generator {:?}", a.kind))),
            };
            let mut g_json = to_json(&g);
            if let Some(obj) = g_json.as_object_mut() {
                obj.remove("points");
            }
            cfg = cfg.option("generator", g_json);
            generate(&g, Some(cfg.params.seed))?
        }
    };
    save_complex(&a.out, &k)?;
    let counts: Vec<usize> = (0..=k.max_dim().unwrap_or(0)).map(|r| k.count(r)).collect();
    finish(
        json!({ "written": show(&a.out), "counts": counts, "total": k.total() }),
        &cfg,
    )
}

fn dump(a: &DumpArgs, cfg: RunConfig) -> CliResult<Value> {
    let mut cfg = cfg.option("operator", a.operator);
    cfg.r = Some(a.r);
    cfg.output = Some(show(&a.out));
    let (text, rows, cols) = if a.operator == OperatorKind::PersistentLaplacian {
        let (f, inputs) = load_pair(&a.filtration)?;
        cfg.inputs = inputs;
        let m = persistent_laplacian(&f, a.r)?.total;
        (dense_to_matrix_market(&m), m.nrows(), m.ncols())
    } else {
        let p = a
            .input
            .as_deref()
            .ok_or_else(|| CliError::Usage("this operator needs --input".into()))?;
        let k = load(p)?;
        cfg = cfg.input(p);
        let m = match a.operator {
            OperatorKind::Boundary => boundary_matrix(&k, a.r)?.matrix,
            OperatorKind::Coboundary => {
                k.require_layer(a.r)?;
                coboundary_matrix(&k, a.r)
            }
            OperatorKind::Laplacian => laplacian(&k, a.r)?,
            _ => {
                let m = normalized_laplacian(&k, a.r)?;
                write(&a.out, &dense_to_matrix_market(&m))?;
                return finish(
                    json!({ "written": show(&a.out), "rows": m.nrows(), "cols": m.ncols() }),
                    &cfg,
                );
            }
        };
        (m.to_matrix_market(), m.rows(), m.cols())
    };
    write(&a.out, &text)?;
    finish(json!({ "written": show(&a.out), "rows": rows, "cols": cols }), &cfg)
}
