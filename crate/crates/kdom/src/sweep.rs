//! Benchmark sweeps: run every (scheme, k, window-capacity) cell over the
//! same seeded streams and aggregate wall time and pruning effectiveness
//! into CSV rows and per-parameter plot files.

use std::time::Instant;

use crate::datagen::{generate_stream, Distribution};
use crate::distributed::Cluster;
use crate::engine::{Engine, EngineConfig, SchemeKind};
use crate::{Error, Result};

/// Parameter grid for one sweep. Every cell replays `reps` independent
/// streams; streams are shared across cells of the same rep so schemes are
/// compared on identical inputs.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub schemes: Vec<SchemeKind>,
    pub ks: Vec<usize>,
    pub windows: Vec<usize>,
    pub d: usize,
    pub items: usize,
    pub nodes: usize,
    pub dist: Distribution,
    pub seed: u64,
    pub reps: usize,
    pub tau: f64,
    pub u_min_pos: Option<usize>,
    pub prob_range: (f64, f64),
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() || self.ks.is_empty() || self.windows.is_empty() {
            return Err(Error::Config("sweep grid has an empty axis".into()));
        }
        if self.items == 0 {
            return Err(Error::Config("sweep needs at least one item".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("sweep needs at least one repetition".into()));
        }
        if self.nodes == 0 {
            return Err(Error::Config("sweep needs at least one node".into()));
        }
        for &k in &self.ks {
            if k < 1 || k > self.d {
                return Err(Error::Config(format!("k={k} outside 1..={}", self.d)));
            }
        }
        Ok(())
    }
}

/// Aggregated result of one sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: SchemeKind,
    pub k: usize,
    pub d: usize,
    pub window: usize,
    pub m: usize,
    pub distribution: Distribution,
    pub reps: usize,
    /// Mean wall-clock time of one full stream replay, milliseconds.
    pub mean_wall_ms: f64,
    /// Mean number of exact dominance checks per event.
    pub mean_compared: f64,
    /// Fraction of window entries skipped per event, averaged over events.
    pub prune_ratio: f64,
}

pub const SWEEP_CSV_HEADER: &str =
    "scheme,k,d,window,m,distribution,reps,mean_wall_ms,mean_compared,prune_ratio";

impl SweepRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.k,
            self.d,
            self.window,
            self.m,
            self.distribution,
            self.reps,
            self.mean_wall_ms,
            self.mean_compared,
            self.prune_ratio
        )
    }

    pub fn from_csv_row(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 10 {
            return Err(Error::Parse(format!("expected 10 fields, got {}", f.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad number {s:?}")))
        };
        let int = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
        };
        Ok(Self {
            scheme: f[0].parse()?,
            k: int(f[1])?,
            d: int(f[2])?,
            window: int(f[3])?,
            m: int(f[4])?,
            distribution: f[5].parse()?,
            reps: int(f[6])?,
            mean_wall_ms: num(f[7])?,
            mean_compared: num(f[8])?,
            prune_ratio: num(f[9])?,
        })
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_row());
        out.push('\n');
    }
    out
}

pub fn rows_from_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == SWEEP_CSV_HEADER => {}
        other => return Err(Error::Parse(format!("bad sweep header: {other:?}"))),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(SweepRow::from_csv_row)
        .collect()
}

fn cell_config(
    spec: &SweepSpec,
    scheme: SchemeKind,
    k: usize,
    window: usize,
) -> Result<EngineConfig> {
    let mut cfg = EngineConfig::new(spec.d, k, window, scheme)?;
    cfg.tau = spec.tau;
    if let Some(pos) = spec.u_min_pos {
        cfg.u_min_pos = pos;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Replays one stream through a fresh engine or cluster, returning
/// (wall ms, total compared, total window sizes over events).
fn run_cell_once(
    cfg: &EngineConfig,
    nodes: usize,
    stream: &[crate::core::item::UncertainItem],
) -> Result<(f64, u64, u64)> {
    let mut compared = 0u64;
    let mut window_total = 0u64;
    let start = Instant::now();
    if nodes == 1 {
        let mut engine = Engine::new(cfg.clone())?;
        for u in stream {
            let stats = engine.process_event(u.clone())?;
            compared += stats.compared;
            window_total += stats.window_size;
        }
    } else {
        let mut cluster = Cluster::new(cfg.clone(), nodes)?;
        for u in stream {
            let res = cluster.process_event(u.clone())?;
            compared += res.stats.compared;
            window_total += res.stats.window_size;
        }
    }
    Ok((start.elapsed().as_secs_f64() * 1e3, compared, window_total))
}

/// Runs the full grid. Rows come out in (scheme, k, window) lexicographic
/// order of the spec's axes.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    // One stream per repetition, shared by every cell.
    let streams: Vec<_> = (0..spec.reps)
        .map(|rep| {
            generate_stream(
                spec.items,
                spec.d,
                spec.dist,
                spec.prob_range,
                spec.seed.wrapping_add(rep as u64),
            )
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for &scheme in &spec.schemes {
        for &k in &spec.ks {
            for &window in &spec.windows {
                let cfg = cell_config(spec, scheme, k, window)?;
                let mut wall_ms = 0.0;
                let mut compared = 0u64;
                let mut window_total = 0u64;
                for stream in &streams {
                    let (ms, c, w) = run_cell_once(&cfg, spec.nodes, stream)?;
                    wall_ms += ms;
                    compared += c;
                    window_total += w;
                }
                let events = (spec.items * spec.reps) as f64;
                rows.push(SweepRow {
                    scheme,
                    k,
                    d: spec.d,
                    window,
                    m: spec.nodes,
                    distribution: spec.dist,
                    reps: spec.reps,
                    mean_wall_ms: wall_ms / spec.reps as f64,
                    mean_compared: compared as f64 / events,
                    prune_ratio: if window_total == 0 {
                        0.0
                    } else {
                        1.0 - compared as f64 / window_total as f64
                    },
                });
            }
        }
    }
    Ok(rows)
}

/// One plot file per (x-axis, metric) pair: first column is the parameter
/// value, then one column per scheme, rows sorted by parameter value.
/// Returns (file name, CSV text) pairs.
pub fn emit_plotdata(rows: &[SweepRow]) -> Vec<(String, String)> {
    let mut schemes: Vec<SchemeKind> = Vec::new();
    for row in rows {
        if !schemes.contains(&row.scheme) {
            schemes.push(row.scheme);
        }
    }
    type Axis = fn(&SweepRow) -> usize;
    type Metric = fn(&SweepRow) -> f64;
    let axes: [(&str, Axis); 2] = [("k", |r| r.k), ("window", |r| r.window)];
    let metrics: [(&str, Metric); 2] = [
        ("compared", |r| r.mean_compared),
        ("wall", |r| r.mean_wall_ms),
    ];

    let mut files = Vec::new();
    for (axis_name, axis) in axes {
        let mut xs: Vec<usize> = rows.iter().map(axis).collect();
        xs.sort_unstable();
        xs.dedup();
        for (metric_name, metric) in metrics {
            let mut text = String::from(axis_name);
            for s in &schemes {
                text.push(',');
                text.push_str(&s.to_string());
            }
            text.push('\n');
            for &x in &xs {
                text.push_str(&x.to_string());
                for &s in &schemes {
                    let vals: Vec<f64> = rows
                        .iter()
                        .filter(|r| r.scheme == s && axis(r) == x)
                        .map(metric)
                        .collect();
                    let mean = if vals.is_empty() {
                        f64::NAN
                    } else {
                        vals.iter().sum::<f64>() / vals.len() as f64
                    };
                    text.push(',');
                    text.push_str(&mean.to_string());
                }
                text.push('\n');
            }
            files.push((format!("plot_{axis_name}_{metric_name}.csv"), text));
        }
    }
    files
}
