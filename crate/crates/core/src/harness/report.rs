//! Report files written after a run.
//!
//! Everything except `run_timing.json` is a pure function of the results, so
//! two runs with the same config produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::run::{GroupFeatureScores, ResultsMatrix};
use crate::data::GroupId;
use crate::error::{Error, Result};
use crate::evaluation::{GroupStats, FAIL_MARKER};

pub const MATRIX_FILE: &str = "matrix.csv";
pub const GROUP_STATS_FILE: &str = "group_stats.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const FEATURE_SCORES_FILE: &str = "feature_scores.csv";
pub const TIMING_FILE: &str = "run_timing.json";

/// `group,description,mean,sd` at 3 decimals. Groups missing from `stats`
/// get the failure marker.
pub fn write_group_stats(stats: &[GroupStats], groups: &[String], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "description", "mean", "sd"])?;
    for g in groups {
        let description = g
            .parse::<GroupId>()
            .map(|id| id.description())
            .unwrap_or("");
        match stats.iter().find(|s| &s.group == g) {
            Some(s) => w.write_record([
                g.as_str(),
                description,
                &format!("{:.3}", s.mean),
                &format!("{:.3}", s.sd),
            ])?,
            None => w.write_record([g.as_str(), description, FAIL_MARKER, FAIL_MARKER])?,
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

fn write_feature_scores(scores: &[GroupFeatureScores], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "method", "feature", "score", "rank"])?;
    for g in scores {
        for s in &g.scores {
            // a second stage scores a subset; names come from the first stage's survivors
            let names: Vec<&String> = if s.scores.len() == g.features.len() {
                g.features.iter().collect()
            } else {
                let first = &g.scores[0];
                let mut kept: Vec<usize> = first.ranking[..s.scores.len()].to_vec();
                kept.sort_unstable();
                kept.iter().map(|&i| &g.features[i]).collect()
            };
            let method = serde_json::to_value(s.method)?;
            let method = method.as_str().unwrap_or_default().to_string();
            for (rank, &i) in s.ranking.iter().enumerate() {
                w.write_record([
                    g.group.as_str(),
                    &method,
                    names[i],
                    &format!("{}", s.scores[i]),
                    &(rank + 1).to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

/// Write the report set into `dir`, creating it if needed. Returns the
/// paths written.
pub fn emit_reports(m: &ResultsMatrix, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let path = dir.join(MATRIX_FILE);
    m.scores.write_csv(create(&path)?)?;
    written.push(path);

    let path = dir.join(GROUP_STATS_FILE);
    write_group_stats(&m.group_stats, &m.scores.cols, create(&path)?)?;
    written.push(path);

    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&m.manifest)? + "\n";
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let path = dir.join(FEATURE_SCORES_FILE);
    if m.feature_scores.is_empty() {
        // a stale table from an earlier run would be misleading
        if path.exists() {
            fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
        }
    } else {
        write_feature_scores(&m.feature_scores, create(&path)?)?;
        written.push(path);
    }

    let path = dir.join(TIMING_FILE);
    let timing = serde_json::json!({ "wall_time_secs": m.wall_time_secs });
    fs::write(&path, serde_json::to_string_pretty(&timing)? + "\n")
        .map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}
