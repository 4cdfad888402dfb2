//! Checkpoint files: a commented header carrying the profile, grid and clock,
//! followed by the graph rows.
//!
//! ```text
//! # anisoflow checkpoint
//! # profile n=1 k=1 alpha=1 beta=2 g.kind=zero
//! # grid n=1 N=512
//! # clock tau=... lambda=... step_count=... last_dt=...
//! 0.0000000000000000e0,2.6236426446749106e-1
//! ...
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use super::FlowState;
use crate::error::{Error, Result};
use crate::speed::SpeedProfile;
use crate::sphere::io::{fmt_f64, parse_grid_header, read_rows, write_rows};

const MAGIC: &str = "# anisoflow checkpoint";

pub fn write_checkpoint(state: &FlowState) -> String {
    let profile: Vec<String> = state
        .profile
        .to_keys()
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let mut out = format!(
        "{MAGIC}\n# profile {}\n# grid {}\n# clock tau={} lambda={} step_count={} last_dt={}\n",
        profile.join(" "),
        state.graph.grid().header(),
        fmt_f64(state.tau),
        fmt_f64(state.lambda),
        state.step_count,
        fmt_f64(state.last_dt),
    );
    write_rows(&state.graph, &mut out);
    out
}

fn header_line<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, tag: &str) -> Result<(usize, &'a str)> {
    let (no, line) = lines.next().ok_or(Error::Syntax {
        line: 0,
        msg: format!("missing '{tag}' header"),
    })?;
    let rest = line
        .trim()
        .strip_prefix('#')
        .and_then(|l| l.trim_start().strip_prefix(tag))
        .ok_or_else(|| Error::Syntax {
            line: no,
            msg: format!("expected '# {tag} ...'"),
        })?;
    Ok((no, rest.trim()))
}

fn pairs(text: &str, line: usize) -> Result<BTreeMap<String, String>> {
    text.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::Syntax {
                    line,
                    msg: format!("bad token '{tok}'"),
                })
        })
        .collect()
}

pub fn read_checkpoint(text: &str) -> Result<FlowState> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        _ => {
            return Err(Error::Syntax {
                line: 1,
                msg: "not a checkpoint file".into(),
            })
        }
    }
    let (no, prof) = header_line(&mut lines, "profile")?;
    let map = pairs(prof, no)?;
    let profile = SpeedProfile::from_keys(|k| map.get(k).map(String::as_str)).map_err(Error::Config)?;
    let (_, grid) = header_line(&mut lines, "grid")?;
    let grid = parse_grid_header(grid)?;
    let (no, clock) = header_line(&mut lines, "clock")?;
    let clock = pairs(clock, no)?;
    let field = |key: &str| -> Result<&String> {
        clock.get(key).ok_or(Error::Syntax {
            line: no,
            msg: format!("missing clock field '{key}'"),
        })
    };
    let bad = |key: &str| Error::Syntax {
        line: no,
        msg: format!("bad clock field '{key}'"),
    };
    let tau: f64 = field("tau")?.parse().map_err(|_| bad("tau"))?;
    let lambda: f64 = field("lambda")?.parse().map_err(|_| bad("lambda"))?;
    let step_count: u64 = field("step_count")?.parse().map_err(|_| bad("step_count"))?;
    let last_dt: f64 = field("last_dt")?.parse().map_err(|_| bad("last_dt"))?;
    let graph = read_rows(grid, lines)?;
    if graph.grid().dim() != profile.n() {
        return Err(Error::Config(vec![format!(
            "checkpoint grid dimension {} does not match profile n = {}",
            graph.grid().dim(),
            profile.n()
        )]));
    }
    Ok(FlowState {
        tau,
        graph,
        lambda,
        step_count,
        last_dt,
        profile,
    })
}

pub fn save_checkpoint(state: &FlowState, path: &Path) -> Result<()> {
    std::fs::write(path, write_checkpoint(state)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<FlowState> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(&text)
}
