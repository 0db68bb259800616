//! Parsing of graph, channel and list arguments, configuration files and output writing.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sibc::bounds::{BoundsError, ChannelParams};
use sibc::fme::FmeError;
use sibc::graphs::{recompose, GraphError, GroupMember, SideInfoGraph};
use sibc::regions::RegionError;
use sibc::simulator::SimError;

/// Process exit codes.
pub mod code {
    pub const FAILURE: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const SELECTOR: u8 = 3;
    pub const UNSUPPORTED: u8 = 4;
    pub const GUARD: u8 = 5;
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(code::PARSE, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::parse(e.to_string())
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        let code = match e {
            BoundsError::WrongGroup { .. } | BoundsError::WrongMember { .. } => code::SELECTOR,
            BoundsError::Graph(_) | BoundsError::Channel(_) | BoundsError::RateOutOfRange { .. } => code::PARSE,
            _ => code::FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<RegionError> for Failure {
    fn from(e: RegionError) -> Self {
        match e {
            RegionError::Bounds(b) => b.into(),
            RegionError::InvalidSelector { .. } => Failure::new(code::SELECTOR, e.to_string()),
            RegionError::ResourceGuard(_) => Failure::new(code::GUARD, e.to_string()),
            RegionError::InvalidSlice(_) | RegionError::DimensionMismatch { .. } | RegionError::NegativeRate(_) => {
                Failure::parse(e.to_string())
            }
            RegionError::EmptySlices => Failure::new(code::FAILURE, e.to_string()),
        }
    }
}

impl From<FmeError> for Failure {
    fn from(e: FmeError) -> Self {
        let code = match e {
            FmeError::SampleGuard(_) | FmeError::Overflow => code::GUARD,
            FmeError::VariableMismatch { .. } => code::FAILURE,
            _ => code::PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let code = match e {
            SimError::Unsupported(_) => code::UNSUPPORTED,
            SimError::CandidateGuard { .. } | SimError::CodebookGuard(_) => code::GUARD,
            SimError::Graph(_) | SimError::Config(_) | SimError::Scheme(_) => code::PARSE,
            SimError::ZeroPower(_) => code::FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

/// Values read from `--config`; command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub graph: Option<String>,
    pub channel: Option<String>,
    pub bound: Option<String>,
    pub grid: Option<usize>,
    pub search_grid: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub trials: Option<u64>,
    pub bit_cap: Option<u32>,
    pub assignments: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = read(path)?;
        toml::from_str(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
    }
}

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

/// Reads `arg` as a file when it names one, otherwise returns it verbatim.
fn file_or_inline(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if !arg.trim_start().starts_with('{') && path.is_file() {
        read(path)
    } else {
        Ok(arg.to_string())
    }
}

/// Graph from JSON `{"Q":3,"arcs":[[3,1]]}` (inline or file) or `group:member`.
pub fn graph(arg: &str) -> Result<SideInfoGraph, Failure> {
    if let Some((g, m)) = arg.split_once(':') {
        if let (Ok(g), Ok(m)) = (g.trim().parse::<u8>(), m.trim().parse::<u8>()) {
            return Ok(recompose(GroupMember::new(g, m)?)?);
        }
    }
    let text = file_or_inline(arg)?;
    serde_json::from_str(&text).map_err(|e| Failure::parse(format!("graph: {e}")))
}

/// Channel from JSON `{"P":10,"N":[1,2,4]}` (inline or file).
pub fn channel(arg: Option<&str>) -> Result<ChannelParams<f64>, Failure> {
    let Some(arg) = arg else {
        return Ok(ChannelParams::new(10.0, vec![1.0, 2.0, 4.0])?);
    };
    let text = file_or_inline(arg)?;
    serde_json::from_str(&text).map_err(|e| Failure::parse(format!("channel: {e}")))
}

/// Comma-separated numbers.
pub fn numbers(arg: &str) -> Result<Vec<f64>, Failure> {
    arg.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::parse(format!("invalid number `{s}`"))))
        .collect()
}

/// Zero-based axis of a rate name `R1`, `R2`, … .
pub fn axis(name: &str) -> Result<usize, Failure> {
    name.trim()
        .strip_prefix(['R', 'r'])
        .and_then(|k| k.parse::<usize>().ok())
        .filter(|&k| k >= 1)
        .map(|k| k - 1)
        .ok_or_else(|| Failure::parse(format!("invalid rate name `{name}`; expected R1, R2, …")))
}

/// `R1=0.3` into `(0, 0.3)`.
pub fn fixed(arg: &str) -> Result<(usize, f64), Failure> {
    let (name, value) = arg.split_once('=').ok_or_else(|| Failure::parse(format!("expected R<k>=<value>, got `{arg}`")))?;
    let value = value.trim().parse::<f64>().map_err(|_| Failure::parse(format!("invalid value in `{arg}`")))?;
    Ok((axis(name)?, value))
}

/// Output format implied by a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

pub fn format_of(path: Option<&Path>, default: Format) -> Result<Format, Failure> {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        None => Ok(default),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some("txt") | Some("fm") => Ok(Format::Text),
        Some(e) => Err(Failure::parse(format!("cannot infer an output format from `.{e}`"))),
    }
}

/// Writes `text` to `out` through a temporary file and rename, or to stdout.
pub fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    let Some(path) = out else {
        print!("{text}");
        return Ok(());
    };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| Failure::new(code::FAILURE, format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_names() {
        assert_eq!(axis("R3").unwrap(), 2);
        assert!(axis("R0").is_err());
        assert_eq!(fixed("R1=0.25").unwrap(), (0, 0.25));
        assert!(fixed("R1").is_err());
    }

    #[test]
    fn graph_forms() {
        let g = graph(r#"{"Q":3,"arcs":[[3,1]]}"#).unwrap();
        assert_eq!(graph("4:1").unwrap(), g);
        assert_eq!(graph("{oops").unwrap_err().code, code::PARSE);
    }
}
