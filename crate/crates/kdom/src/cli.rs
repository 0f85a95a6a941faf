//! Command-line harness. Three subcommands:
//!
//! - `generate` writes a synthetic stream in the item line format;
//! - `run` replays one stream through an engine (or cluster) and writes
//!   per-event stats CSV;
//! - `sweep` runs a parameter grid and writes the aggregate table plus
//!   per-axis plot files.
//!
//! Settings resolve in three layers: a `key=value` config file (lowest),
//! then command-line flags, then `KDOM_*` environment variables (highest).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::core::item::UncertainItem;
use crate::datagen::{generate_stream, Distribution};
use crate::engine::{Engine, EngineConfig, SchemeKind, STATS_CSV_HEADER};
use crate::sweep::{emit_plotdata, rows_to_csv, run_sweep, SweepSpec};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "kdom",
    about = "k-dominant skyline probabilities over sliding windows"
)]
pub struct Cli {
    /// Config file with key=value lines (keys match the long flag names).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic stream file.
    Generate(CommonOpts),
    /// Replay a stream through one engine or cluster; write per-event stats.
    Run(CommonOpts),
    /// Run a parameter grid; write the aggregate table and plot files.
    Sweep(CommonOpts),
}

#[derive(Args, Debug, Default, Clone)]
struct CommonOpts {
    /// Scheme name, or a comma-separated list for sweeps (naive,ci,mi,ai).
    #[arg(long)]
    scheme: Option<String>,
    /// Dominance parameter k, or a comma-separated list for sweeps.
    #[arg(long)]
    k: Option<String>,
    /// Number of dimensions d.
    #[arg(long)]
    dim: Option<usize>,
    /// Window capacity, or a comma-separated list for sweeps.
    #[arg(long)]
    window: Option<String>,
    /// Number of stream items.
    #[arg(long)]
    items: Option<usize>,
    /// Worker count; 1 runs the single-node engine.
    #[arg(long)]
    nodes: Option<usize>,
    /// Data distribution: uniform, correlated, or anticorrelated.
    #[arg(long)]
    dist: Option<String>,
    /// RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Repetitions per sweep cell.
    #[arg(long)]
    reps: Option<usize>,
    /// Probability threshold for the final skyline query.
    #[arg(long)]
    tau: Option<f64>,
    /// Lower threshold position (0-based) for the index schemes.
    #[arg(long = "mi-pos")]
    mi_pos: Option<usize>,
    /// Output path: a file for generate/run, a directory for sweep.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Input stream file for `run`; omitted means generate in memory.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Lower bound of the occurrence-probability range.
    #[arg(long = "prob-lo")]
    prob_lo: Option<f64>,
    /// Upper bound of the occurrence-probability range.
    #[arg(long = "prob-hi")]
    prob_hi: Option<f64>,
}

/// Layered settings store. Later layers shadow earlier ones.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

const KEYS: [&str; 15] = [
    "scheme", "k", "dim", "window", "items", "nodes", "dist", "seed", "reps", "tau", "mi-pos",
    "out", "input", "prob-lo", "prob-hi",
];

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Display) {
        self.values.insert(key.to_string(), value.to_string());
    }

    /// Loads `key=value` lines; `#` starts a comment. Unknown keys error.
    pub fn load_config_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!(
                    "{}:{}: unknown key {key:?}",
                    path.display(),
                    lineno + 1
                )));
            }
            self.set(key, value.trim());
        }
        Ok(())
    }

    fn apply_opts(&mut self, opts: &CommonOpts) {
        macro_rules! put {
            ($field:ident, $key:expr) => {
                if let Some(v) = &opts.$field {
                    self.set($key, v.to_string());
                }
            };
        }
        put!(scheme, "scheme");
        put!(k, "k");
        put!(dim, "dim");
        put!(window, "window");
        put!(items, "items");
        put!(nodes, "nodes");
        put!(dist, "dist");
        put!(seed, "seed");
        put!(reps, "reps");
        put!(tau, "tau");
        put!(mi_pos, "mi-pos");
        put!(prob_lo, "prob-lo");
        put!(prob_hi, "prob-hi");
        if let Some(v) = &opts.out {
            self.set("out", v.display());
        }
        if let Some(v) = &opts.input {
            self.set("input", v.display());
        }
    }

    /// Environment variables win over everything: `KDOM_MI_POS` maps to
    /// `mi-pos`, and so on for every key.
    pub fn apply_env(&mut self, env: impl Iterator<Item = (String, String)>) {
        let vars: BTreeMap<String, String> = env.collect();
        for key in KEYS {
            let var = format!("KDOM_{}", key.to_uppercase().replace('-', "_"));
            if let Some(v) = vars.get(&var) {
                self.set(key, v);
            }
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("bad value for {key}: {s:?}"))),
        }
    }

    fn parsed_list<T: FromStr>(&self, key: &str, default: Vec<T>) -> Result<Vec<T>> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad value for {key}: {tok:?}")))
                })
                .collect(),
        }
    }
}

fn resolve(config: Option<&Path>, opts: &CommonOpts) -> Result<Settings> {
    let mut settings = Settings::default();
    if let Some(path) = config {
        settings.load_config_file(path)?;
    }
    settings.apply_opts(opts);
    settings.apply_env(std::env::vars());
    Ok(settings)
}

struct Resolved {
    schemes: Vec<SchemeKind>,
    ks: Vec<usize>,
    windows: Vec<usize>,
    dim: usize,
    items: usize,
    nodes: usize,
    dist: Distribution,
    seed: u64,
    reps: usize,
    tau: f64,
    mi_pos: Option<usize>,
    out: Option<PathBuf>,
    input: Option<PathBuf>,
    prob_range: (f64, f64),
}

impl Resolved {
    fn from_settings(s: &Settings) -> Result<Self> {
        let dim = s.parsed("dim", 12usize)?;
        Ok(Self {
            schemes: s.parsed_list("scheme", vec![SchemeKind::Mi])?,
            ks: s.parsed_list("k", vec![dim.saturating_sub(1).max(1)])?,
            windows: s.parsed_list("window", vec![300usize])?,
            dim,
            items: s.parsed("items", 10_000usize)?,
            nodes: s.parsed("nodes", 1usize)?,
            dist: s.parsed("dist", Distribution::Uniform)?,
            seed: s.parsed("seed", 42u64)?,
            reps: s.parsed("reps", 10usize)?,
            tau: s.parsed("tau", 0.0f64)?,
            mi_pos: s
                .get("mi-pos")
                .map(|v| {
                    v.parse()
                        .map_err(|_| Error::Config(format!("bad value for mi-pos: {v:?}")))
                })
                .transpose()?,
            out: s.get("out").map(PathBuf::from),
            input: s.get("input").map(PathBuf::from),
            prob_range: (s.parsed("prob-lo", 0.01f64)?, s.parsed("prob-hi", 0.99f64)?),
        })
    }

    fn single<T: Copy + Display>(list: &[T], what: &str) -> Result<T> {
        match list {
            [one] => Ok(*one),
            _ => Err(Error::Config(format!(
                "{what} expects exactly one value here"
            ))),
        }
    }

    fn engine_config(&self) -> Result<EngineConfig> {
        let scheme = Self::single(&self.schemes, "--scheme")?;
        let k = Self::single(&self.ks, "--k")?;
        let window = Self::single(&self.windows, "--window")?;
        let mut cfg = EngineConfig::new(self.dim, k, window, scheme)?;
        cfg.tau = self.tau;
        if let Some(pos) = self.mi_pos {
            cfg.u_min_pos = pos;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_stream(r: &Resolved) -> Result<Vec<UncertainItem>> {
    match &r.input {
        Some(path) => fs::read_to_string(path)?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(UncertainItem::from_line)
            .collect(),
        None => generate_stream(r.items, r.dim, r.dist, r.prob_range, r.seed),
    }
}

fn cmd_generate(r: &Resolved) -> Result<()> {
    let stream = generate_stream(r.items, r.dim, r.dist, r.prob_range, r.seed)?;
    let mut text = String::new();
    for item in &stream {
        text.push_str(&item.to_line());
        text.push('\n');
    }
    match &r.out {
        Some(path) => {
            fs::write(path, text)?;
            println!("wrote {} items to {}", stream.len(), path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_run(r: &Resolved) -> Result<()> {
    let cfg = r.engine_config()?;
    let stream = load_stream(r)?;
    let mut csv = String::from(STATS_CSV_HEADER);
    csv.push('\n');
    let skyline;
    if r.nodes == 1 {
        let mut engine = Engine::new(cfg)?;
        for item in stream {
            let stats = engine.process_event(item)?;
            csv.push_str(&stats.csv_row());
            csv.push('\n');
        }
        skyline = engine.query_skyline(r.tau);
    } else {
        let mut cluster = crate::distributed::Cluster::new(cfg, r.nodes)?;
        let mut probs = BTreeMap::new();
        for item in stream {
            let res = cluster.process_event(item)?;
            csv.push_str(&res.stats.csv_row());
            csv.push('\n');
            probs = cluster.probabilities();
        }
        let mut sky: Vec<(u64, f64)> = probs.into_iter().filter(|&(_, p)| p >= r.tau).collect();
        sky.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        skyline = sky;
    }
    match &r.out {
        Some(path) => {
            fs::write(path, &csv)?;
            println!("wrote per-event stats to {}", path.display());
        }
        None => print!("{csv}"),
    }
    println!(
        "skyline members with probability >= {}: {}",
        r.tau,
        skyline.len()
    );
    for (id, p) in skyline.iter().take(20) {
        println!("  {id}: {p}");
    }
    Ok(())
}

fn cmd_sweep(r: &Resolved) -> Result<()> {
    let spec = SweepSpec {
        schemes: r.schemes.clone(),
        ks: r.ks.clone(),
        windows: r.windows.clone(),
        d: r.dim,
        items: r.items,
        nodes: r.nodes,
        dist: r.dist,
        seed: r.seed,
        reps: r.reps,
        tau: r.tau,
        u_min_pos: r.mi_pos,
        prob_range: r.prob_range,
    };
    let rows = run_sweep(&spec)?;
    let table = rows_to_csv(&rows);
    match &r.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let table_path = dir.join("sweep.csv");
            fs::write(&table_path, &table)?;
            println!("wrote {}", table_path.display());
            for (name, text) in emit_plotdata(&rows) {
                let path = dir.join(name);
                fs::write(&path, text)?;
                println!("wrote {}", path.display());
            }
        }
        None => print!("{table}"),
    }
    Ok(())
}

/// Entry point for the binary. Parses argv, resolves settings, dispatches.
pub fn main_entry() -> Result<()> {
    let cli = Cli::parse();
    let (opts, run): (&CommonOpts, fn(&Resolved) -> Result<()>) = match &cli.command {
        Command::Generate(o) => (o, cmd_generate),
        Command::Run(o) => (o, cmd_run),
        Command::Sweep(o) => (o, cmd_sweep),
    };
    let settings = resolve(cli.config.as_deref(), opts)?;
    let resolved = Resolved::from_settings(&settings)?;
    run(&resolved)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_file_and_env_overrides_flags() {
        let dir = std::env::temp_dir().join(format!("kdom-cli-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg_path = dir.join("settings.conf");
        fs::write(&cfg_path, "k=3\ndim=8 # trailing comment\nseed=1\n").unwrap();

        let mut s = Settings::default();
        s.load_config_file(&cfg_path).unwrap();
        let opts = CommonOpts {
            k: Some("5".into()),
            ..Default::default()
        };
        s.apply_opts(&opts);
        s.apply_env(vec![("KDOM_K".to_string(), "7".to_string())].into_iter());

        assert_eq!(s.get("k"), Some("7"));
        assert_eq!(s.get("dim"), Some("8"));
        assert_eq!(s.get("seed"), Some("1"));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let dir = std::env::temp_dir().join(format!("kdom-cli-badkey-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let cfg_path = dir.join("settings.conf");
        fs::write(&cfg_path, "bogus=1\n").unwrap();
        let mut s = Settings::default();
        assert!(s.load_config_file(&cfg_path).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn list_flags_parse_for_sweeps() {
        let mut s = Settings::default();
        s.set("scheme", "naive,mi,ai");
        s.set("k", "7,8,9");
        s.set("dim", "12");
        let r = Resolved::from_settings(&s).unwrap();
        assert_eq!(
            r.schemes,
            vec![SchemeKind::Naive, SchemeKind::Mi, SchemeKind::Ai]
        );
        assert_eq!(r.ks, vec![7, 8, 9]);
        assert!(r.engine_config().is_err(), "lists must be rejected for run");
    }

    #[test]
    fn defaults_resolve() {
        let s = Settings::default();
        let r = Resolved::from_settings(&s).unwrap();
        assert_eq!(r.dim, 12);
        assert_eq!(r.ks, vec![11]);
        assert_eq!(r.windows, vec![300]);
        assert_eq!(r.reps, 10);
        assert_eq!(r.prob_range, (0.01, 0.99));
        let cfg = Resolved {
            schemes: vec![SchemeKind::Ai],
            ..r
        }
        .engine_config()
        .unwrap();
        assert_eq!(cfg.k, 11);
        assert_eq!(cfg.capacity, 300);
    }

    #[test]
    fn bad_numeric_value_is_a_config_error() {
        let mut s = Settings::default();
        s.set("k", "eleven");
        assert!(matches!(Resolved::from_settings(&s), Err(Error::Config(_))));
    }
}
