//! Line-delimited JSON reward service.
//!
//! Each input line is a `{id, candidate, oracle}` request; each output line
//! is the matching score record, written and flushed in request order.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, ToSocketAddrs};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::metrics::{score_pair, Degradation, MetricConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardRequest {
    pub id: Value,
    pub candidate: String,
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardResponse {
    pub id: Value,
    pub bleu: f64,
    pub weighted_bleu: f64,
    pub sim_ast: f64,
    pub sim_dfg: f64,
    pub reward: f64,
    pub codebleu: f64,
    pub degraded: Vec<Degradation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub id: Value,
    pub error: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ServeStats {
    pub requests: usize,
    pub errors: usize,
}

/// Response line for one request line. Never fails: problems become an
/// error record.
pub fn handle_line(line: &str, cfg: &MetricConfig) -> Result<RewardResponse, ErrorResponse> {
    let req: RewardRequest = serde_json::from_str(line).map_err(|e| ErrorResponse {
        id: Value::Null,
        error: format!("malformed request: {e}"),
    })?;
    match score_pair(&req.candidate, &req.oracle, cfg) {
        Ok(r) => Ok(RewardResponse {
            id: req.id,
            bleu: r.bleu,
            weighted_bleu: r.weighted_bleu,
            sim_ast: r.sim_ast,
            sim_dfg: r.sim_dfg,
            reward: r.reward,
            codebleu: r.codebleu,
            degraded: r.degraded,
        }),
        Err(e) => Err(ErrorResponse {
            id: req.id,
            error: e.to_string(),
        }),
    }
}

/// Serves until end of input. Blank lines are ignored.
pub fn serve(input: impl BufRead, mut output: impl Write, cfg: &MetricConfig) -> io::Result<ServeStats> {
    let mut stats = ServeStats::default();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        stats.requests += 1;
        let encoded = match handle_line(&line, cfg) {
            Ok(resp) => serde_json::to_string(&resp),
            Err(err) => {
                stats.errors += 1;
                serde_json::to_string(&err)
            }
        }
        .map_err(io::Error::other)?;
        output.write_all(encoded.as_bytes())?;
        output.write_all(b"\n")?;
        output.flush()?;
    }
    Ok(stats)
}

/// Accepts TCP connections and serves each on its own thread with the
/// same protocol as [`serve`].
pub fn serve_tcp(addr: impl ToSocketAddrs, cfg: &MetricConfig) -> io::Result<()> {
    let listener = TcpListener::bind(addr)?;
    for stream in listener.incoming() {
        let stream = stream?;
        let cfg = cfg.clone();
        std::thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(s) => BufReader::new(s),
                Err(_) => return,
            };
            let _ = serve(reader, stream, &cfg);
        });
    }
    Ok(())
}
