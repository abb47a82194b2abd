use std::path::PathBuf;

use log::info;
use richclub::baselines::{rr_randomize, RrConfig, RrVariant};
use richclub::communities::{modularity_value, DendrogramNode, SpectralOptions};
use richclub::consensus::{cooccurrence, invariant_cores, randomized_rank_runs};
use richclub::diagnostics::{
    cv_curve, detect_cutoff_from_ipr, ipr_curve, knn_data, knn_ensemble, uncorrelated_knn, CurveSource,
    DiagnosticsCurve, DEFAULT_CUTOFF_TOLERANCE,
};
use richclub::ensemble::{verify_soft_constraints, PairModel};
use richclub::export::{self, CoresDocument, DendrogramDocument, ModelSummary, Provenance, RunReport, SearchSummary};
use richclub::graph::{cutoff_degree, rank_nodes, Graph, TiePolicy};
use richclub::pipeline::{build_null, run_pipeline, NullKind, NullModel, Recipe, SearchSettings};
use richclub::search::Direction;
use serde::Serialize;

use crate::config::{config_hash, load_graph, Outputs};
use crate::{CommonArgs, CommunityArgs, ConsensusArgs, DirectionArg, EnsembleArgs, Failure, ModelArg};

type Written = Result<Vec<PathBuf>, Failure>;

fn null_kind(m: ModelArg) -> Result<NullKind, Failure> {
    match m {
        ModelArg::Me1 => Ok(NullKind::Me1),
        ModelArg::Me2 => Ok(NullKind::Me2),
        ModelArg::Me3 => Ok(NullKind::Me3),
        ModelArg::Ng => Ok(NullKind::Ng),
        ModelArg::Rr1 | ModelArg::Rr2 => {
            Err(Failure::usage("RR1/RR2 produce graphs, not pair expectations; use them with `ensemble`"))
        }
    }
}

fn settings(args: &CommonArgs) -> SearchSettings {
    SearchSettings {
        direction: match args.direction {
            DirectionArg::Maximize => Direction::Maximize,
            DirectionArg::Minimize => Direction::Minimize,
        },
        stall_limit: args.stall_limit,
        max_proposals: None,
    }
}

fn ties(args: &CommonArgs) -> TiePolicy {
    if args.shuffle_ties {
        TiePolicy::Seeded(args.seed)
    } else {
        TiePolicy::ById
    }
}

fn open<T: Serialize>(command: &str, args: &CommonArgs, settings: &T) -> Result<(Graph, Outputs), Failure> {
    let loaded = load_graph(args)?;
    let hash = config_hash(command, settings, &loaded.input_digest);
    let out = Outputs::new(&args.out, &args.format, Provenance::new(args.seed, hash))?;
    info!("{command}: {} nodes, {} links", loaded.graph.node_count(), loaded.graph.edge_count());
    Ok((loaded.graph, out))
}

fn max_row_residual<M: PairModel>(m: &M) -> f64 {
    let n = m.node_count();
    (0..n)
        .map(|i| ((0..n).map(|j| m.expected_links(i, j)).sum::<f64>() - m.target_degree(i) as f64).abs())
        .fold(0.0, f64::max)
}

#[derive(Serialize)]
struct RrSummary {
    #[serde(rename = "N")]
    nodes: usize,
    #[serde(rename = "L")]
    links: usize,
    model_tag: &'static str,
    swaps_attempted: usize,
    swaps_accepted: usize,
    repeated_links: usize,
}

pub fn ensemble(args: &EnsembleArgs) -> Written {
    let c = &args.common;
    let (g, mut out) = open("ensemble", c, args)?;
    let variant = match c.model {
        ModelArg::Rr1 => Some((RrVariant::Rr1, "RR1")),
        ModelArg::Rr2 => Some((RrVariant::Rr2, "RR2")),
        _ => None,
    };
    if let Some((variant, tag)) = variant {
        let res = rr_randomize(&g, &RrConfig::new(variant, c.seed))?;
        out.raw("randomized.txt", &export::edge_list(&out.provenance, &res.graph))?;
        out.json(
            "summary.json",
            &RrSummary {
                nodes: g.node_count(),
                links: g.edge_count(),
                model_tag: tag,
                swaps_attempted: res.attempted,
                swaps_accepted: res.accepted,
                repeated_links: res.graph.multi_edge_count(),
            },
        )?;
        return Ok(out.finish());
    }

    let ranking = rank_nodes(&g, ties(c));
    let null = build_null(&g, null_kind(c.model)?, &ranking, &settings(c), c.seed)?;
    let mut summary = ModelSummary {
        nodes: g.node_count(),
        links: g.edge_count(),
        model_tag: null.tag().to_string(),
        entropy: None,
        max_constraint_residual: None,
    };
    match &null {
        NullModel::Ensemble { ensemble, search } => {
            let model = ensemble.model();
            out.csv("ranking.csv", |p| export::ranking_csv(p, &g, ensemble.ranking(), model.kplus()))?;
            out.csv("kplus.csv", |p| export::kplus_csv(p, model.degrees(), model.kplus()))?;
            summary.entropy = Some(model.entropy());
            summary.max_constraint_residual = Some(verify_soft_constraints(model).max());
            if let Some(s) = search {
                out.csv("trace.csv", |p| export::trace_csv(p, &s.entropy_trace))?;
                out.json(
                    "search.json",
                    &SearchSummary {
                        mode: model.tag().to_string(),
                        direction: format!("{:?}", settings(c).direction).to_lowercase(),
                        entropy: s.entropy,
                        proposals_used: s.proposals_used,
                        accepted: s.accepted_count,
                    },
                )?;
            }
        }
        // NG rows are not held to k; report the gap
        NullModel::Ng(ng) => summary.max_constraint_residual = Some(max_row_residual(ng)),
    }
    if args.dump_probabilities {
        out.csv("probabilities.csv", |p| export::probabilities_csv(p, g.labels(), &null))?;
    }
    out.json("summary.json", &summary)?;
    Ok(out.finish())
}

#[derive(Serialize)]
struct CutoffEntry {
    model: String,
    detected_cutoff: Option<f64>,
    knn_deviation: f64,
}

#[derive(Serialize)]
struct CutoffDocument {
    structural_cutoff: f64,
    uncorrelated_knn: f64,
    data_knn_deviation: f64,
    tolerance: f64,
    models: Vec<CutoffEntry>,
}

pub fn diagnose(c: &CommonArgs) -> Written {
    let (g, mut out) = open("diagnose", c, c)?;
    let ranking = rank_nodes(&g, ties(c));
    let kinds: Vec<NullKind> = std::iter::once(c.model).chain(c.model2).map(null_kind).collect::<Result<_, _>>()?;
    let base = uncorrelated_knn(&g)?;
    let data = knn_data(&g)?;
    let flat = DiagnosticsCurve::new(data.points.iter().map(|&(k, _)| (k, base)).collect(), "knn_uncorrelated", CurveSource::Data)?;

    let mut knn = vec![data.clone(), flat];
    let (mut cv, mut ipr, mut entries) = (Vec::new(), Vec::new(), Vec::new());
    for (n, kind) in kinds.into_iter().enumerate() {
        let null = build_null(&g, kind, &ranking, &settings(c), c.seed.wrapping_add(n as u64))?;
        let k_curve = knn_ensemble(&null);
        let i_curve = ipr_curve(&null);
        entries.push(CutoffEntry {
            model: null.tag().to_string(),
            detected_cutoff: detect_cutoff_from_ipr(&i_curve, DEFAULT_CUTOFF_TOLERANCE),
            knn_deviation: k_curve.aggregate_deviation(base),
        });
        knn.push(k_curve);
        cv.push(cv_curve(&null));
        ipr.push(i_curve);
    }
    out.csv("knn.csv", |p| export::curves_csv(p, &knn))?;
    out.csv("cv.csv", |p| export::curves_csv(p, &cv))?;
    out.csv("ipr.csv", |p| export::curves_csv(p, &ipr))?;
    out.json(
        "cutoff.json",
        &CutoffDocument {
            structural_cutoff: cutoff_degree(&g)?,
            uncorrelated_knn: base,
            data_knn_deviation: data.aggregate_deviation(base),
            tolerance: DEFAULT_CUTOFF_TOLERANCE,
            models: entries,
        },
    )?;
    Ok(out.finish())
}

fn recipe(a: &CommunityArgs) -> Result<Recipe, Failure> {
    let c = &a.common;
    Ok(Recipe {
        null: null_kind(c.model)?,
        second: c.model2.map(null_kind).transpose()?,
        search: settings(c),
        spectral: SpectralOptions { strict: a.strict, ..SpectralOptions::default() },
    })
}

#[derive(Serialize)]
struct CommunitySummary {
    matrix: String,
    communities: usize,
    q: f64,
    clamped_pairs: usize,
}

pub fn communities(a: &CommunityArgs) -> Written {
    let c = &a.common;
    let recipe = recipe(a)?;
    let (g, mut out) = open("communities", c, a)?;
    let res = run_pipeline(&g, &recipe, ties(c), c.seed)?;
    out.csv("partition.csv", |p| export::partition_csv(p, g.labels(), &res.partition))?;
    let splits: Vec<Vec<String>> = res
        .dendrogram
        .nodes()
        .into_iter()
        .filter_map(|node| match node {
            DendrogramNode::Split { members, eigenvalue, q_contribution, positive, negative } => Some(vec![
                members.len().to_string(),
                positive.members().len().to_string(),
                negative.members().len().to_string(),
                eigenvalue.to_string(),
                q_contribution.to_string(),
            ]),
            DendrogramNode::Leaf { .. } => None,
        })
        .enumerate()
        .map(|(n, mut row)| {
            row.insert(0, (n + 1).to_string());
            row
        })
        .collect();
    out.csv("splits.csv", |p| {
        export::table_csv(p, &["split", "size", "positive", "negative", "eigenvalue", "q_contribution"], splits)
    })?;
    out.json("dendrogram.json", &DendrogramDocument::new(&res.dendrogram, g.labels()))?;
    out.json(
        "communities.json",
        &CommunitySummary {
            matrix: match recipe.second {
                None => format!("standard {}", recipe.null),
                Some(second) => format!("soft {} vs {second}", recipe.null),
            },
            communities: res.partition.community_count(),
            q: modularity_value(&res.matrix, &res.partition)?,
            clamped_pairs: res.matrix.clamped_pairs(),
        },
    )?;
    Ok(out.finish())
}

pub fn consensus(a: &ConsensusArgs) -> Written {
    let c = &a.community.common;
    let recipe = recipe(&a.community)?;
    let (g, mut out) = open("consensus", c, a)?;
    let runs = randomized_rank_runs(&g, &recipe, a.runs, c.seed)?;
    let report = RunReport::new(&runs);
    out.json("run_report.json", &report)?;
    let parts: Vec<_> = runs.iter().filter_map(|r| r.partition.clone()).collect();
    if parts.is_empty() {
        let first = runs.into_iter().find_map(|r| r.error).expect("every run failed with an error");
        return Err(first.into());
    }
    if !report.failures.is_empty() {
        log::warn!("{} of {} runs failed; see run_report.json", report.failures.len(), a.runs);
    }
    let cm = cooccurrence(&parts)?;
    let threshold = a.threshold.unwrap_or(cm.run_count());
    let cores = invariant_cores(&cm, &g, Some(threshold))?;
    out.csv("cooccurrence.csv", |p| export::cooccurrence_csv(p, g.labels(), &cm))?;
    out.csv("runs.csv", |p| export::run_partitions_csv(p, g.labels(), &runs))?;
    out.json("cores.json", &CoresDocument::new(&cores, g.labels(), cm.run_count(), threshold))?;
    Ok(out.finish())
}
