use serde::{Deserialize, Serialize};

use super::{ScoreError, ScoreMatrix};
use crate::graph::NodeId;
use crate::remote::{EndpointConfig, JsonClient, RemoteError};

/// Caption format sent with every landmark; `{}` is replaced by the label.
pub const DEFAULT_CAPTION_TEMPLATE: &str = "This is a photo of a {}";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub prompt_template: String,
    pub labels: Vec<String>,
    pub image_refs: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub logits: Vec<Vec<f64>>,
}

#[derive(Debug, thiserror::Error)]
pub enum RemoteScoreError {
    #[error("node {0} has no image_ref")]
    MissingImage(NodeId),
    #[error(transparent)]
    Remote(#[from] RemoteError),
    #[error("remote scorer returned a bad matrix: {0}")]
    Schema(#[from] ScoreError),
}

/// Asks a remote image-text scorer for one logit per (landmark, node) pair.
pub fn fetch_remote_scores(
    endpoint: &EndpointConfig,
    prompt_template: &str,
    nodes: &[(NodeId, Option<String>)],
    labels: &[String],
) -> Result<ScoreMatrix<f64>, RemoteScoreError> {
    let mut image_refs = Vec::with_capacity(nodes.len());
    for (id, r) in nodes {
        image_refs.push(r.clone().ok_or(RemoteScoreError::MissingImage(*id))?);
    }
    let request = ScoreRequest { prompt_template: prompt_template.to_string(), labels: labels.to_vec(), image_refs };
    let client = JsonClient::new(endpoint.clone());
    let resp: ScoreResponse = client.post(&request)?;
    let ids = nodes.iter().map(|(id, _)| *id).collect();
    Ok(ScoreMatrix::from_rows(labels.to_vec(), ids, resp.logits)?)
}
