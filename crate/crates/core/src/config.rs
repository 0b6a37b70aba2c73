//! Flat `key=value` experiment configuration with command-line overrides.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::access::{CountingMode, QueryModel};
use crate::baselines::{CalibrationMethod, WalkerKind};
use crate::error::{Error, Result};
use crate::generators::{
    complete, cycle, forest_fire, lower_bound_graph, path, random_regular, star, ForestFireParams,
    LowerBoundParams,
};
use crate::graph::{load_edge_list, Graph, NodeId};
use crate::layering::SecondHop;

/// Directory for CSV output when no explicit path is configured.
pub const OUT_DIR_ENV: &str = "SAMPLAYER_OUT_DIR";

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    SampLayer,
    SampLayerPlus,
    Walk(WalkerKind),
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SampLayer => "samplayer",
            Algorithm::SampLayerPlus => "samplayer+",
            Algorithm::Walk(k) => k.name(),
        }
    }

    /// Query model the algorithm needs.
    pub fn required_model(self) -> QueryModel {
        match self {
            Algorithm::SampLayerPlus | Algorithm::Walk(WalkerKind::MhPlus) => {
                QueryModel::DegreeRevealing
            }
            _ => QueryModel::Standard,
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "samplayer" => Ok(Algorithm::SampLayer),
            "samplayer+" | "samplayer-plus" => Ok(Algorithm::SampLayerPlus),
            other => other
                .parse()
                .map(Algorithm::Walk)
                .map_err(|_| Error::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the input graph comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    ForestFire { n: usize, p_forward: f64, p_backward: f64, seed: u64 },
    LowerBound { n: usize, t: usize, seed: u64 },
    RandomRegular { n: usize, degree: usize, seed: u64 },
    Star(usize),
    Path(usize),
    Cycle(usize),
    Complete(usize),
    EdgeList(PathBuf),
}

impl GraphSource {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSource::ForestFire { n, p_forward, p_backward, seed } => {
                forest_fire(&ForestFireParams::new(*n, *p_forward, *p_backward, *seed))
            }
            GraphSource::LowerBound { n, t, seed } => {
                Ok(lower_bound_graph(&LowerBoundParams::new(*n, *t, *seed))?.graph)
            }
            GraphSource::RandomRegular { n, degree, seed } => random_regular(*n, *degree, *seed),
            GraphSource::Star(k) => star(*k),
            GraphSource::Path(k) => path(*k),
            GraphSource::Cycle(k) => cycle(*k),
            GraphSource::Complete(k) => complete(*k),
            GraphSource::EdgeList(p) => load_edge_list(BufReader::new(File::open(p)?)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GraphSource::ForestFire { n, p_forward, p_backward, seed } => {
                format!("forest-fire(n={n},pf={p_forward},pb={p_backward},seed={seed})")
            }
            GraphSource::LowerBound { n, t, seed } => format!("lower-bound(n={n},t={t},seed={seed})"),
            GraphSource::RandomRegular { n, degree, seed } => {
                format!("regular(n={n},d={degree},seed={seed})")
            }
            GraphSource::Star(k) => format!("star({k})"),
            GraphSource::Path(k) => format!("path({k})"),
            GraphSource::Cycle(k) => format!("cycle({k})"),
            GraphSource::Complete(k) => format!("complete({k})"),
            GraphSource::EdgeList(p) => format!("file({})", p.display()),
        }
    }
}

/// Every tunable of an experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub algorithm: Algorithm,
    /// Explicit query model; derived from the algorithm when absent.
    pub model: Option<QueryModel>,
    pub counting: CountingMode,
    pub start: NodeId,
    pub l0: usize,
    pub s1: usize,
    pub s2: usize,
    pub epsilon: f64,
    pub second_hop: SecondHop,
    pub warmup: usize,
    pub samples: usize,
    /// Fixed walk interval; calibrated when absent.
    pub interval: Option<usize>,
    pub calibrate: Option<CalibrationMethod>,
    pub zeta: Option<f64>,
    pub walks: Option<usize>,
    pub seed: u64,
    pub repetitions: usize,
    pub bins: usize,
    pub l0_grid: Vec<usize>,
    pub s1_grid: Vec<usize>,
    pub s2_grid: Vec<usize>,
    pub t_grid: Vec<usize>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            graph: GraphSource::ForestFire {
                n: 10_000,
                p_forward: 0.37,
                p_backward: 0.3,
                seed: 1,
            },
            algorithm: Algorithm::SampLayer,
            model: None,
            counting: CountingMode::Cached,
            start: 0,
            l0: 300,
            s1: 3000,
            s2: 200,
            epsilon: 0.1,
            second_hop: SecondHop::L2Only,
            warmup: 0,
            samples: 100,
            interval: None,
            calibrate: None,
            zeta: None,
            walks: None,
            seed: 1,
            repetitions: 5,
            bins: 20,
            l0_grid: Vec::new(),
            s1_grid: Vec::new(),
            s2_grid: Vec::new(),
            t_grid: Vec::new(),
            output: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut graph_kind = None;
        let mut graph_keys = GraphKeys::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
            cfg.set(k.trim(), v.trim(), &mut graph_kind, &mut graph_keys)?;
        }
        cfg.finish_graph(graph_kind, graph_keys)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_kv_str(&std::fs::read_to_string(path)?)
    }

    /// Applies `key=value` overrides on top of a base text and re-parses, so
    /// overrides obey the same rules as the file.
    pub fn with_overrides(base: &str, overrides: &[String]) -> Result<Self> {
        let mut text = base.to_string();
        for o in overrides {
            if !o.contains('=') {
                return Err(Error::Config(format!("override '{o}' is not key=value")));
            }
            text.push('\n');
            text.push_str(o);
        }
        let cfg = Self::from_kv_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(
        &mut self,
        key: &str,
        value: &str,
        graph_kind: &mut Option<String>,
        g: &mut GraphKeys,
    ) -> Result<()> {
        match key {
            "graph" => *graph_kind = Some(value.to_string()),
            "n" => g.n = Some(parse(key, value)?),
            "p_forward" => g.p_forward = Some(parse(key, value)?),
            "p_backward" => g.p_backward = Some(parse(key, value)?),
            "t" => g.t = Some(parse(key, value)?),
            "degree" => g.degree = Some(parse(key, value)?),
            "graph_seed" => g.seed = Some(parse(key, value)?),
            "edge_list" => g.path = Some(PathBuf::from(value)),
            "algorithm" => self.algorithm = value.parse()?,
            "model" => {
                self.model = Some(match value {
                    "standard" => QueryModel::Standard,
                    "degree-revealing" => QueryModel::DegreeRevealing,
                    _ => return Err(Error::Config(format!("unknown model '{value}'"))),
                })
            }
            "counting" => {
                self.counting = match value {
                    "cached" => CountingMode::Cached,
                    "uncached" => CountingMode::Uncached,
                    _ => return Err(Error::Config(format!("unknown counting mode '{value}'"))),
                }
            }
            "start" => self.start = parse(key, value)?,
            "l0" => self.l0 = parse(key, value)?,
            "s1" => self.s1 = parse(key, value)?,
            "s2" => self.s2 = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "second_hop" => {
                self.second_hop = match value {
                    "l2" => SecondHop::L2Only,
                    "non-l0" => SecondHop::AnyNonL0,
                    _ => return Err(Error::Config(format!("unknown second_hop '{value}'"))),
                }
            }
            "warmup" => self.warmup = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "interval" => self.interval = Some(parse(key, value)?),
            "calibrate" => {
                self.calibrate = Some(value.parse().map_err(|_| {
                    Error::Config(format!("unknown calibration method '{value}'"))
                })?)
            }
            "zeta" => self.zeta = Some(parse(key, value)?),
            "walks" => self.walks = Some(parse(key, value)?),
            "seed" => self.seed = parse(key, value)?,
            "repetitions" => self.repetitions = parse(key, value)?,
            "bins" => self.bins = parse(key, value)?,
            "l0_grid" => self.l0_grid = parse_list(key, value)?,
            "s1_grid" => self.s1_grid = parse_list(key, value)?,
            "s2_grid" => self.s2_grid = parse_list(key, value)?,
            "t_grid" => self.t_grid = parse_list(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    fn finish_graph(&mut self, kind: Option<String>, g: GraphKeys) -> Result<()> {
        let Some(kind) = kind else {
            if g != GraphKeys::default() {
                // graph parameters without a kind refine the default generator
                return self.finish_graph(Some("forest-fire".into()), g);
            }
            return Ok(());
        };
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("graph '{kind}' needs '{name}'")))
        };
        let seed = g.seed.unwrap_or(1);
        self.graph = match kind.as_str() {
            "forest-fire" => GraphSource::ForestFire {
                n: need(g.n, "n")?,
                p_forward: g.p_forward.unwrap_or(0.37),
                p_backward: g.p_backward.unwrap_or(0.3),
                seed,
            },
            "lower-bound" => GraphSource::LowerBound {
                n: need(g.n, "n")?,
                t: need(g.t, "t")?,
                seed,
            },
            "regular" => GraphSource::RandomRegular {
                n: need(g.n, "n")?,
                degree: need(g.degree, "degree")?,
                seed,
            },
            "star" => GraphSource::Star(need(g.n, "n")?),
            "path" => GraphSource::Path(need(g.n, "n")?),
            "cycle" => GraphSource::Cycle(need(g.n, "n")?),
            "complete" => GraphSource::Complete(need(g.n, "n")?),
            "file" => GraphSource::EdgeList(
                g.path
                    .ok_or_else(|| Error::Config("graph 'file' needs 'edge_list'".into()))?,
            ),
            _ => return Err(Error::Config(format!("unknown graph kind '{kind}'"))),
        };
        Ok(())
    }

    /// Query model in effect.
    pub fn effective_model(&self) -> QueryModel {
        self.model.unwrap_or_else(|| self.algorithm.required_model())
    }

    /// Rejects incompatible combinations before any work is done.
    pub fn validate(&self) -> Result<()> {
        let need = self.algorithm.required_model();
        if need == QueryModel::DegreeRevealing && self.effective_model() != need {
            return Err(Error::Config(format!(
                "{} needs model=degree-revealing",
                self.algorithm
            )));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be >= 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        if self.l0 == 0 || self.s1 == 0 || self.s2 == 0 {
            return Err(Error::Config("l0, s1 and s2 must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config("epsilon must lie in (0, 1)".into()));
        }
        if self.interval == Some(0) {
            return Err(Error::Config("interval must be >= 1".into()));
        }
        if self.zeta.is_some_and(|z| !(z > 0.0)) {
            return Err(Error::Config("zeta must be > 0".into()));
        }
        Ok(())
    }

    /// Configured output path or `<default dir>/<name>`.
    pub fn output_path(&self, name: &str) -> PathBuf {
        self.output
            .clone()
            .unwrap_or_else(|| default_output_dir().join(name))
    }
}

#[derive(Debug, Default, Clone, PartialEq)]
struct GraphKeys {
    n: Option<usize>,
    p_forward: Option<f64>,
    p_backward: Option<f64>,
    t: Option<usize>,
    degree: Option<usize>,
    seed: Option<u64>,
    path: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_and_overrides() {
        let text = "# demo\ngraph=forest-fire\nn=500\nalgorithm=rej\nl0_grid=10, 20,30\ncounting=uncached\n";
        let cfg = ExperimentConfig::with_overrides(text, &["samples=7".into(), "n=600".into()]).unwrap();
        assert_eq!(cfg.samples, 7);
        assert_eq!(cfg.l0_grid, vec![10, 20, 30]);
        assert_eq!(cfg.counting, CountingMode::Uncached);
        assert_eq!(cfg.algorithm, Algorithm::Walk(WalkerKind::Rej));
        assert!(matches!(cfg.graph, GraphSource::ForestFire { n: 600, .. }));
        assert_eq!(cfg.effective_model(), QueryModel::Standard);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::from_kv_str("bogus=1").is_err());
        assert!(ExperimentConfig::from_kv_str("samples").is_err());
        assert!(ExperimentConfig::from_kv_str("samples=x").is_err());
        assert!(ExperimentConfig::from_kv_str("graph=lower-bound\nn=100").is_err());
        assert!(ExperimentConfig::with_overrides("", &["repetitions=0".into()]).is_err());
    }

    #[test]
    fn model_compatibility() {
        let bad = ExperimentConfig::with_overrides("algorithm=mh+\nmodel=standard", &[]);
        assert!(matches!(bad, Err(Error::Config(_))));
        let ok = ExperimentConfig::with_overrides("algorithm=samplayer+", &[]).unwrap();
        assert_eq!(ok.effective_model(), QueryModel::DegreeRevealing);
        // a richer model than needed is fine
        let ok = ExperimentConfig::with_overrides("algorithm=rej\nmodel=degree-revealing", &[]).unwrap();
        assert_eq!(ok.effective_model(), QueryModel::DegreeRevealing);
    }

    #[test]
    fn small_graph_sources() {
        let cfg = ExperimentConfig::from_kv_str("graph=star\nn=5").unwrap();
        assert_eq!(cfg.graph.build().unwrap().node_count(), 6);
        let cfg = ExperimentConfig::from_kv_str("graph=lower-bound\nn=200\nt=10").unwrap();
        assert_eq!(cfg.graph.build().unwrap().node_count(), 200);
    }
}
