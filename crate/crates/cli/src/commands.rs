use std::path::{Path, PathBuf};

use actmap::analysis::analyze as analyze_graph;
use actmap::io::{
    load_manifest, load_matrix, load_metadata, read_graph, save_matrix, save_metadata, to_canonical_json,
    write_canonical_json, write_graph, MatrixFormat,
};
use actmap::lens::{compute_lens, lens_histogram};
use actmap::nerve::Params;
use actmap::pca::{pca_refine, NodeGroup};
use actmap::pipeline::parse_overlap;
use actmap::synth::{self, SynthKind, SynthSpec};
use actmap::{build_graph, Error, MapperConfig, PointCloud, Result};
use serde_json::{json, Value};

use crate::args::{AnalyzeArgs, BuildArgs, GenerateArgs, Kind, MapperArgs, StatsArgs};

fn path_value(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

fn load_cloud(path: &Path) -> Result<PointCloud> {
    if !path.exists() {
        return Err(Error::Param(format!("input file {} does not exist", path.display())));
    }
    load_matrix(path, MatrixFormat::from_path(path))
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_canonical_json(value, path),
        None => {
            println!("{}", to_canonical_json(value)?);
            Ok(())
        }
    }
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let kind = match a.kind {
        Kind::NoisyCircle => SynthKind::NoisyCircle,
        Kind::YBranch => SynthKind::YBranch,
        Kind::Blobs => SynthKind::Blobs { centers: a.centers },
    };
    let spec = SynthSpec {
        kind,
        n_points: a.points,
        dim: a.dim,
        noise_sigma: a.sigma,
        seed: a.seed,
    };
    let (cloud, meta) = synth::generate(&spec)?;
    let meta_path = a.metadata.unwrap_or_else(|| {
        let stem = a.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        a.out.with_file_name(format!("{stem}.meta.json"))
    });
    save_matrix(&cloud, &a.out, MatrixFormat::from_path(&a.out))?;
    save_metadata(&meta, &meta_path)?;
    log::info!("wrote {} points to {} and {}", cloud.n_points(), a.out.display(), meta_path.display());
    Ok(())
}

fn mapper_config(m: &MapperArgs) -> Result<MapperConfig> {
    let config = MapperConfig {
        lens: m.lens,
        n_intervals: m.intervals,
        overlap: parse_overlap(&m.overlap)?,
        min_pts: m.min_pts,
        epsilon: m.epsilon,
        metric: m.metric,
        min_jaccard: m.min_jaccard,
    };
    config.validate()?;
    Ok(config)
}

fn build_one(input: &Path, metadata: Option<&Path>, config: &MapperConfig, out: &Path) -> Result<()> {
    let cloud = load_cloud(input)?;
    let meta = metadata.map(|p| load_metadata(p, cloud.n_points())).transpose()?;
    let mut graph = build_graph(&cloud, meta.as_ref(), config)?;
    graph.params.insert("input".into(), path_value(input));
    graph
        .params
        .insert("metadata".into(), metadata.map_or(Value::Null, path_value));
    write_graph(&graph, out)?;
    log::info!(
        "{}: {} nodes, {} edges -> {}",
        input.display(),
        graph.nodes.len(),
        graph.edges.len(),
        out.display()
    );
    Ok(())
}

pub fn build(a: BuildArgs) -> Result<()> {
    let config = mapper_config(&a.mapper)?;
    if let Some(manifest_path) = &a.manifest {
        let manifest = load_manifest(manifest_path)?;
        for layer in &manifest.layers {
            let out = layer.graph_path.clone().expect("resolved by load_manifest");
            build_one(&layer.matrix_path, layer.metadata_path.as_deref(), &config, &out)?;
        }
        return Ok(());
    }
    let input = a.input.expect("clap requires --input without --manifest");
    let file_name = format!("{}.json", config.name());
    let out = match a.out {
        Some(p) if p.is_dir() => p.join(file_name),
        Some(p) => p,
        None => PathBuf::from(file_name),
    };
    build_one(&input, a.metadata.as_deref(), &config, &out)
}

/// Parses `name=1,2;other=3` into node groups.
fn parse_groups(spec: &str) -> Result<Vec<NodeGroup>> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|part| {
            let (label, ids) = part
                .split_once('=')
                .ok_or_else(|| Error::Param(format!("group {part:?} is not of the form name=ids")))?;
            let nodes = ids
                .split(',')
                .map(|id| {
                    id.trim()
                        .parse()
                        .map_err(|_| Error::Param(format!("bad node id {id:?} in group {label:?}")))
                })
                .collect::<Result<Vec<usize>>>()?;
            Ok(NodeGroup {
                label: label.trim().to_string(),
                nodes,
            })
        })
        .collect()
}

pub fn analyze(a: AnalyzeArgs) -> Result<()> {
    let graph = read_graph(&a.graph)?;
    let n_points = graph.params.get("n_points").and_then(Value::as_u64);
    let cloud = a.input.as_deref().map(load_cloud).transpose()?;
    let meta = match &a.metadata {
        Some(p) => {
            let n = cloud
                .as_ref()
                .map(|c| c.n_points())
                .or(n_points.map(|n| n as usize))
                .ok_or_else(|| Error::Param("--metadata needs --input or a graph with n_points".into()))?;
            Some(load_metadata(p, n)?)
        }
        None => None,
    };

    let groups = a.groups.as_deref().map(parse_groups).transpose()?;
    let mut selection = a.select.clone();
    if let Some(groups) = &groups {
        selection.extend(groups.iter().flat_map(|g| g.nodes.iter().copied()));
    }
    selection.sort_unstable();
    selection.dedup();
    for &id in &selection {
        graph.node(id)?;
    }

    let mut report = analyze_graph(&graph, a.min_degree, meta.as_ref());
    if !selection.is_empty() {
        let cloud = cloud
            .as_ref()
            .ok_or_else(|| Error::Param("projections need the matrix (--input)".into()))?;
        report
            .projections
            .push(pca_refine(cloud, &graph, &selection, groups.as_deref())?);
    }
    let extra: Params = [
        ("graph".to_string(), path_value(&a.graph)),
        ("min_degree".to_string(), a.min_degree.into()),
        ("select".to_string(), json!(selection)),
    ]
    .into_iter()
    .collect();
    report.params.insert("analysis".into(), Value::Object(extra));
    emit(&serde_json::to_value(&report)?, a.out.as_deref())
}

fn layer_stats(name: &str, path: &Path, a: &StatsArgs) -> Result<Value> {
    let cloud = load_cloud(path)?;
    let lens = compute_lens(&cloud, a.lens);
    let bins = lens_histogram(&lens, a.bins)?;
    Ok(json!({
        "layer": name,
        "input": path_value(path),
        "n_points": cloud.n_points(),
        "lens_range": lens.range().map(|(lo, hi)| [lo, hi]),
        "histogram": bins,
    }))
}

pub fn stats(a: StatsArgs) -> Result<()> {
    if a.bins == 0 {
        return Err(Error::Param("number of bins must be at least 1".into()));
    }
    let layers = match (&a.manifest, &a.input) {
        (Some(m), _) => load_manifest(m)?
            .layers
            .iter()
            .map(|l| layer_stats(&l.layer_name, &l.matrix_path, &a))
            .collect::<Result<Vec<_>>>()?,
        (None, Some(input)) => vec![layer_stats("input", input, &a)?],
        (None, None) => unreachable!("clap requires --input or --manifest"),
    };
    let report = json!({
        "params": { "lens": a.lens, "bins": a.bins },
        "layers": layers,
    });
    emit(&report, a.out.as_deref())
}
