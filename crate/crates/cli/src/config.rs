//! Key-value configuration merged under explicit flags.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;
use topoplan::remote::EndpointConfig;

use crate::failure::{Classify, CliResult, Failure};

pub const SCORER_URL_ENV: &str = "TOPOPLAN_SCORER_URL";
pub const PARSER_URL_ENV: &str = "TOPOPLAN_PARSER_URL";
pub const SCORER_TOKEN_ENV: &str = "TOPOPLAN_SCORER_TOKEN";
pub const PARSER_TOKEN_ENV: &str = "TOPOPLAN_PARSER_TOKEN";
pub const CACHE_DIR_ENV: &str = "TOPOPLAN_CACHE_DIR";

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub gamma: Option<f64>,
    pub planner: Option<String>,
    pub scorer: Option<String>,
    pub parser: Option<String>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub runs: Option<u64>,
    pub epsilon: Option<f64>,
    pub tau: Option<f64>,
    pub eta: Option<f64>,
    pub slack: Option<f64>,
    pub scorer_endpoint: Option<EndpointConfig>,
    pub parser_endpoint: Option<EndpointConfig>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display())).input()?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display())).input()
    }
}

/// First present value wins: flag, then config file, then default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

pub fn gamma(flag: Option<f64>, config: &FileConfig) -> CliResult<f64> {
    let g = pick(flag, config.gamma, 0.95);
    if !(g > 0.0 && g < 1.0) {
        return Err(Failure::input(format!("gamma must lie in (0, 1), got {g}")));
    }
    Ok(g)
}

pub fn seed(flag: Option<u64>, config: &FileConfig, component: &str) -> CliResult<u64> {
    flag.or(config.seed).ok_or_else(|| Failure::input(format!("--seed is required with {component}")))
}

pub enum Service {
    Scorer,
    Parser,
}

/// Endpoint from the config file, with URL and cache overrides from the
/// environment. The bearer token is always read from an environment
/// variable, never from the file itself.
pub fn endpoint(config: &FileConfig, service: Service) -> CliResult<EndpointConfig> {
    let (base, url_env, token_env) = match service {
        Service::Scorer => (&config.scorer_endpoint, SCORER_URL_ENV, SCORER_TOKEN_ENV),
        Service::Parser => (&config.parser_endpoint, PARSER_URL_ENV, PARSER_TOKEN_ENV),
    };
    let mut ep = base.clone().unwrap_or_default();
    if let Ok(url) = std::env::var(url_env) {
        ep.url = url;
    }
    if ep.url.is_empty() {
        return Err(Failure::input(format!("no endpoint URL; set {url_env} or the config endpoint `url`")));
    }
    if ep.auth_token_env.is_none() {
        ep.auth_token_env = Some(token_env.to_string());
    }
    if let Ok(dir) = std::env::var(CACHE_DIR_ENV) {
        ep.cache_dir = Some(PathBuf::from(dir));
    }
    Ok(ep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_config() {
        let c: FileConfig = toml::from_str("gamma = 0.8\nseed = 3").unwrap();
        assert_eq!(gamma(Some(0.9), &c).unwrap(), 0.9);
        assert_eq!(gamma(None, &c).unwrap(), 0.8);
        assert_eq!(gamma(None, &FileConfig::default()).unwrap(), 0.95);
        assert_eq!(seed(None, &c, "x").unwrap(), 3);
        assert!(seed(None, &FileConfig::default(), "x").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("gama = 0.8").is_err());
    }

    #[test]
    fn endpoint_table() {
        let c: FileConfig = toml::from_str("[scorer_endpoint]\nurl = \"http://x/score\"\nretries = 1").unwrap();
        let ep = c.scorer_endpoint.unwrap();
        assert_eq!((ep.url.as_str(), ep.retries, ep.timeout_ms), ("http://x/score", 1, 30_000));
    }
}
