//! Batch runs and table-style CSV output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::io::read_instance;
use crate::search::{solve, InstanceMeta, SolveConfig, SolveReport, SolveStatus, OPTIMAL_GAP};

/// Gap at or above which an instance lands in the last bucket, in percent.
pub const LARGE_GAP: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GapBucket {
    Optimal,
    Below5,
    AtLeast5,
    NoSolution,
}

impl GapBucket {
    pub fn of(objective: Option<f64>, gap: Option<f64>) -> Self {
        match (objective, gap) {
            (None, _) => GapBucket::NoSolution,
            (Some(_), Some(g)) if g < OPTIMAL_GAP => GapBucket::Optimal,
            (Some(_), Some(g)) if g < LARGE_GAP => GapBucket::Below5,
            (Some(_), _) => GapBucket::AtLeast5,
        }
    }
}

/// One instance of a batch; `error` is set when the solve failed outright.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub meta: InstanceMeta,
    pub report: Option<SolveReport>,
    pub error: Option<String>,
}

impl BenchRow {
    pub fn from_report(meta: InstanceMeta, report: SolveReport) -> Self {
        BenchRow { meta, report: Some(report), error: None }
    }

    pub fn failed(meta: InstanceMeta, error: String) -> Self {
        BenchRow { meta, report: None, error: Some(error) }
    }

    pub fn bucket(&self) -> GapBucket {
        match &self.report {
            Some(r) => GapBucket::of(r.objective, r.gap_f),
            None => GapBucket::NoSolution,
        }
    }
}

fn fmt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

#[derive(Serialize)]
struct InstanceLine<'a> {
    instance: &'a str,
    class: &'a str,
    combination: &'a str,
    #[serde(rename = "K2")]
    k2: usize,
    status: String,
    objective: String,
    #[serde(rename = "LB")]
    lb: String,
    #[serde(rename = "Gap0")]
    gap0: String,
    #[serde(rename = "Gap20")]
    gap20: String,
    #[serde(rename = "GapF")]
    gap_f: String,
    #[serde(rename = "Nodes")]
    nodes: String,
    #[serde(rename = "TimeRoot")]
    time_root: String,
    #[serde(rename = "Time")]
    time: String,
    error: &'a str,
}

fn status_name(s: SolveStatus) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

fn write_csv<T: Serialize>(lines: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for l in lines {
        w.serialize(l)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Per-instance rows.
pub fn instances_csv(rows: &[BenchRow]) -> Result<String> {
    write_csv(rows.iter().map(|r| {
        let rep = r.report.as_ref();
        InstanceLine {
            instance: &r.meta.name,
            class: &r.meta.class,
            combination: &r.meta.combination,
            k2: r.meta.k2,
            status: rep.map(|x| status_name(x.status)).unwrap_or_else(|| "error".into()),
            objective: fmt(rep.and_then(|x| x.objective)),
            lb: fmt(rep.and_then(|x| x.lb)),
            gap0: fmt(rep.and_then(|x| x.gap0)),
            gap20: fmt(rep.and_then(|x| x.gap20)),
            gap_f: fmt(rep.and_then(|x| x.gap_f)),
            nodes: rep.map(|x| x.nodes.to_string()).unwrap_or_default(),
            time_root: fmt(rep.map(|x| x.time_root_sec)),
            time: fmt(rep.map(|x| x.time_total_sec)),
            error: r.error.as_deref().unwrap_or(""),
        }
    }))
}

type GroupKey = (String, String, usize);

fn groups(rows: &[BenchRow]) -> BTreeMap<GroupKey, Vec<&BenchRow>> {
    let mut m: BTreeMap<GroupKey, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        m.entry((r.meta.class.clone(), r.meta.combination.clone(), r.meta.k2)).or_default().push(r);
    }
    m
}

#[derive(Serialize)]
struct GroupLine {
    class: String,
    combination: String,
    #[serde(rename = "K2")]
    k2: usize,
    instances: usize,
    #[serde(rename = "Gap0")]
    gap0: String,
    #[serde(rename = "Gap20")]
    gap20: String,
    #[serde(rename = "GapF")]
    gap_f: String,
    #[serde(rename = "Nodes")]
    nodes: String,
    #[serde(rename = "TimeRoot")]
    time_root: String,
    #[serde(rename = "Time")]
    time: String,
}

/// Averages per (class, combination, K²); gaps average over instances that have one.
pub fn groups_csv(rows: &[BenchRow]) -> Result<String> {
    write_csv(groups(rows).into_iter().map(|((class, combination, k2), rs)| {
        let reps: Vec<&SolveReport> = rs.iter().filter_map(|r| r.report.as_ref()).collect();
        GroupLine {
            class,
            combination,
            k2,
            instances: rs.len(),
            gap0: fmt(mean(reps.iter().map(|r| r.gap0))),
            gap20: fmt(mean(reps.iter().map(|r| r.gap20))),
            gap_f: fmt(mean(reps.iter().map(|r| r.gap_f))),
            nodes: fmt(mean(reps.iter().map(|r| Some(r.nodes as f64)))),
            time_root: fmt(mean(reps.iter().map(|r| Some(r.time_root_sec)))),
            time: fmt(mean(reps.iter().map(|r| Some(r.time_total_sec)))),
        }
    }))
}

#[derive(Serialize)]
struct BucketLine {
    class: String,
    combination: String,
    #[serde(rename = "K2")]
    k2: usize,
    #[serde(rename = "optimal(<0.05%)")]
    optimal: usize,
    #[serde(rename = "<5%")]
    below5: usize,
    #[serde(rename = ">=5%")]
    at_least5: usize,
    no_solution: usize,
}

/// Instance counts per gap range and group, plus a closing `all` row.
pub fn buckets_csv(rows: &[BenchRow]) -> Result<String> {
    let count = |rs: &[&BenchRow], b: GapBucket| rs.iter().filter(|r| r.bucket() == b).count();
    let line = |class: String, combination: String, k2: usize, rs: &[&BenchRow]| BucketLine {
        class,
        combination,
        k2,
        optimal: count(rs, GapBucket::Optimal),
        below5: count(rs, GapBucket::Below5),
        at_least5: count(rs, GapBucket::AtLeast5),
        no_solution: count(rs, GapBucket::NoSolution),
    };
    let mut lines: Vec<BucketLine> =
        groups(rows).into_iter().map(|((class, comb, k2), rs)| line(class, comb, k2, &rs)).collect();
    let all: Vec<&BenchRow> = rows.iter().collect();
    lines.push(line("all".into(), String::new(), 0, &all));
    write_csv(lines)
}

/// Instance files of `dir`, sorted by name.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    Ok(files)
}

/// Class is the file stem up to its first `_`; e.g. `L3_1s2_k2_n5_s0` → `L3`.
pub fn meta_for(path: &Path) -> InstanceMeta {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let class = name.split('_').next().unwrap_or_default().to_owned();
    InstanceMeta { name, class, ..InstanceMeta::default() }
}

/// Solves every file of `dir` in name order; failures become rows.
pub fn run_dir(dir: &Path, cfg: &SolveConfig) -> Result<Vec<BenchRow>> {
    Ok(instance_files(dir)?.iter().map(|p| run_file(p, cfg)).collect())
}

pub fn run_file(path: &Path, cfg: &SolveConfig) -> BenchRow {
    let mut meta = meta_for(path);
    let inst = match read_instance(path) {
        Ok(i) => i,
        Err(e) => return BenchRow::failed(meta, e.to_string()),
    };
    let m = InstanceMeta::of(&inst);
    meta.combination = m.combination;
    meta.k2 = m.k2;
    meta.customers = m.customers;
    meta.horizon = m.horizon;
    match solve(&inst, cfg) {
        Ok(mut r) => {
            r.instance = meta.clone();
            BenchRow::from_report(meta, r)
        }
        Err(e) => BenchRow::failed(meta, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buckets_follow_thresholds() {
        assert_eq!(GapBucket::of(Some(1.0), Some(0.0)), GapBucket::Optimal);
        assert_eq!(GapBucket::of(Some(1.0), Some(0.049)), GapBucket::Optimal);
        assert_eq!(GapBucket::of(Some(1.0), Some(0.05)), GapBucket::Below5);
        assert_eq!(GapBucket::of(Some(1.0), Some(2.8)), GapBucket::Below5);
        assert_eq!(GapBucket::of(Some(1.0), Some(5.0)), GapBucket::AtLeast5);
        assert_eq!(GapBucket::of(Some(1.0), None), GapBucket::AtLeast5);
        assert_eq!(GapBucket::of(None, Some(1.0)), GapBucket::NoSolution);
    }

    #[test]
    fn class_from_stem() {
        let m = meta_for(Path::new("/x/H3_2s3_k2_n5_s1.dat"));
        assert_eq!((m.name.as_str(), m.class.as_str()), ("H3_2s3_k2_n5_s1", "H3"));
    }
}
