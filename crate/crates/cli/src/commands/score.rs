use std::path::PathBuf;

use clap::{Args, ValueEnum};
use topoplan::scoring::{fetch_remote_scores, render_scores, synthetic_scores, NoiseSpec, DEFAULT_CAPTION_TEMPLATE};

use super::{load_graph, load_scores, load_world};
use crate::config::{self, endpoint, Service};
use crate::failure::{Classify, CliResult, Failure};
use crate::stamp::{check_output, write_output, Stamp};
use crate::Context;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScorerChoice {
    File,
    Synthetic,
    Remote,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[arg(long, value_enum)]
    scorer: Option<ScorerChoice>,
    /// Graph whose nodes are scored (synthetic and remote scorers).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Existing score file (file scorer).
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Landmarks separated by `;`; defaults to the world vocabulary or
    /// every row of the input file.
    #[arg(long)]
    landmarks: Option<String>,
    /// World with ground-truth placements (synthetic scorer).
    #[arg(long)]
    world: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = NoiseSpec::default().base_hit)]
    hit: f64,
    #[arg(long, default_value_t = NoiseSpec::default().base_miss)]
    miss: f64,
    #[arg(long, default_value_t = NoiseSpec::default().sigma)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    confusion: f64,
    #[arg(long, default_value_t = 0.0)]
    false_positive_rate: f64,
    /// Caption template for the remote scorer; `{}` is the landmark.
    #[arg(long, default_value = DEFAULT_CAPTION_TEMPLATE)]
    caption_template: String,
    #[arg(long)]
    out: PathBuf,
}

fn split(s: &str) -> Vec<String> {
    s.split(';').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

pub fn run(ctx: &Context, a: ScoreArgs) -> CliResult {
    check_output(&a.out)?;
    let scorer = match a.scorer {
        Some(s) => s,
        None => match ctx.config.scorer.as_deref() {
            Some(s) => ScorerChoice::from_str(s, true).map_err(Failure::input)?,
            None => ScorerChoice::File,
        },
    };
    let mut stamp = Stamp::new("score");
    stamp.setting("scorer", format!("{scorer:?}").to_lowercase());
    let matrix = match scorer {
        ScorerChoice::File => {
            let path = a.scores.as_ref().ok_or_else(|| Failure::input("the file scorer needs --scores"))?;
            let m = load_scores(&mut stamp, path)?;
            match &a.landmarks {
                None => m,
                Some(l) => {
                    let labels = split(l);
                    let mut rows = Vec::new();
                    for label in &labels {
                        let r =
                            m.row_index(label).ok_or_else(|| Failure::input(format!("no score row for landmark `{label}`")))?;
                        rows.push(m.row(r).to_vec());
                    }
                    topoplan::ScoreMatrix::from_rows(labels, m.node_ids().to_vec(), rows).internal()?
                }
            }
        }
        ScorerChoice::Synthetic => {
            let seed = config::seed(a.seed, &ctx.config, "the synthetic scorer")?;
            let path = a.world.as_ref().ok_or_else(|| Failure::input("the synthetic scorer needs --world"))?;
            let world = load_world(&mut stamp, path)?;
            let labels = a.landmarks.as_deref().map_or_else(|| world.vocabulary().cloned().collect(), split);
            let noise = NoiseSpec {
                base_hit: a.hit,
                base_miss: a.miss,
                sigma: a.sigma,
                confusion: a.confusion,
                false_positive_rate: a.false_positive_rate,
            };
            if !(noise.sigma >= 0.0 && (0.0..=1.0).contains(&noise.confusion) && (0.0..=1.0).contains(&noise.false_positive_rate))
            {
                return Err(Failure::input("sigma must be >= 0; confusion and false-positive rate in [0, 1]"));
            }
            stamp.setting("seed", seed);
            stamp.setting("noise", &noise);
            synthetic_scores(&world, &labels, &noise, seed).input()?
        }
        ScorerChoice::Remote => {
            let gpath = a.graph.as_ref().ok_or_else(|| Failure::input("the remote scorer needs --graph"))?;
            let graph = load_graph(&mut stamp, gpath)?;
            let labels = split(a.landmarks.as_deref().ok_or_else(|| Failure::input("the remote scorer needs --landmarks"))?);
            let ep = endpoint(&ctx.config, Service::Scorer)?;
            stamp.input("scorer_endpoint", ep.url.as_bytes());
            stamp.setting("caption_template", &a.caption_template);
            let nodes: Vec<_> = graph.nodes().map(|n| (n.id, n.image_ref.clone())).collect();
            fetch_remote_scores(&ep, &a.caption_template, &nodes, &labels).internal()?
        }
    };
    write_output(&a.out, &(stamp.comment() + &render_scores(&matrix)))?;
    println!("scores: {} landmarks x {} nodes", matrix.labels().len(), matrix.node_ids().len());
    Ok(())
}
