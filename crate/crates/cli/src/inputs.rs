//! Resolution of command-line operands into loaded objects.

use std::cell::Cell;
use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::Path as FsPath;
use std::sync::Arc;

use tfg_core::almost_aut::PrefixExchange;
use tfg_core::completion::Pattern;
use tfg_core::multigraph::MultiGraph;
use tfg_core::shift::ClopenSet;
use tfg_core::Error;

/// A failure tied to the operand it came from.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core { source: String, error: Error },
}

impl CliError {
    pub fn core(source: &str, error: Error) -> Self {
        CliError::Core {
            source: source.to_string(),
            error,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { error, .. } if error.is_refusal() => 3,
            CliError::Core {
                error: Error::VerificationFailed(_),
                ..
            } => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core {
                source,
                error: Error::Parse { line, message },
            } => write!(f, "{source}:{line}: {message}"),
            CliError::Core { source, error } => write!(f, "{source}: {error}"),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Everything loaded for one command. Standard input can be consumed once.
#[derive(Default)]
pub struct Workspace {
    stdin_used: Cell<bool>,
    clopens: HashMap<String, ClopenSet>,
}

impl Workspace {
    pub fn read(&self, operand: &str) -> CliResult<String> {
        if operand == "-" {
            if self.stdin_used.replace(true) {
                return Err(CliError::Usage("standard input can only be read once".into()));
            }
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Usage(format!("<stdin>: {e}")))?;
            return Ok(s);
        }
        std::fs::read_to_string(operand).map_err(|e| CliError::Usage(format!("{operand}: {e}")))
    }

    fn label(operand: &str) -> &str {
        if operand == "-" {
            "<stdin>"
        } else {
            operand
        }
    }

    /// A graph file, `-`, or the name of a built-in graph (`r<n>`, `m<p>`,
    /// `matui_<d>_<k>`) when no such file exists.
    pub fn graph(&self, operand: &str) -> CliResult<Arc<MultiGraph>> {
        if operand != "-" && !FsPath::new(operand).exists() {
            if let Some(g) = builtin(operand) {
                return Ok(Arc::new(g));
            }
        }
        let text = self.read(operand)?;
        text.parse::<MultiGraph>()
            .map(Arc::new)
            .map_err(|e| CliError::core(Self::label(operand), e))
    }

    /// Loads every `clopen` line of a file so elements can refer to them by name.
    pub fn load_clopens(&mut self, g: &Arc<MultiGraph>, operand: &str) -> CliResult<()> {
        let text = self.read(operand)?;
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (name, y) = ClopenSet::parse_line(g, body).map_err(|e| {
                CliError::core(Self::label(operand), Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })
            })?;
            if self.clopens.insert(name.clone(), y).is_some() {
                return Err(CliError::core(
                    Self::label(operand),
                    Error::Parse {
                        line: i + 1,
                        message: format!("duplicate clopen {name}"),
                    },
                ));
            }
        }
        Ok(())
    }

    /// `X` for the whole space, a name loaded from a clopen file, a file
    /// (its first `clopen` line), or an inline path list such as `x.x, y`.
    pub fn clopen(&self, g: &Arc<MultiGraph>, operand: &str) -> CliResult<ClopenSet> {
        if operand == "X" {
            return Ok(ClopenSet::full(g));
        }
        if let Some(y) = self.clopens.get(operand) {
            return Ok(y.clone());
        }
        if operand == "-" || FsPath::new(operand).exists() {
            let text = self.read(operand)?;
            let (i, line) = text
                .lines()
                .enumerate()
                .map(|(i, l)| (i, l.split('#').next().unwrap_or("").trim()))
                .find(|(_, l)| !l.is_empty())
                .ok_or_else(|| CliError::Usage(format!("{}: no clopen line", Self::label(operand))))?;
            return ClopenSet::parse_line(g, line).map(|(_, y)| y).map_err(|e| {
                CliError::core(Self::label(operand), Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })
            });
        }
        ClopenSet::parse_paths(g, operand).map_err(|e| CliError::core(operand, e))
    }

    pub fn clopens(&self) -> &HashMap<String, ClopenSet> {
        &self.clopens
    }

    /// An element file. Its graph is `graph` when given, otherwise the
    /// built-in graph named in the element header.
    pub fn element(&self, operand: &str, graph: Option<&Arc<MultiGraph>>) -> CliResult<PrefixExchange> {
        let text = self.read(operand)?;
        let g = match graph {
            Some(g) => Arc::clone(g),
            None => {
                let name = header_graph_name(&text).ok_or_else(|| {
                    CliError::Usage(format!("{}: missing `element over <graph>` header", Self::label(operand)))
                })?;
                Arc::new(builtin(name).ok_or_else(|| {
                    CliError::Usage(format!(
                        "{}: graph {name:?} is not built in; pass --graph",
                        Self::label(operand)
                    ))
                })?)
            }
        };
        PrefixExchange::parse(&text, &g, &self.clopens).map_err(|e| CliError::core(Self::label(operand), e))
    }

    pub fn pattern(&self, g: &Arc<MultiGraph>, operand: &str) -> CliResult<Pattern> {
        let text = self.read(operand)?;
        Pattern::parse(&text, g).map_err(|e| CliError::core(Self::label(operand), e))
    }
}

fn header_graph_name(text: &str) -> Option<&str> {
    let line = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())?;
    let words: Vec<&str> = line.split_whitespace().collect();
    match words.as_slice() {
        ["element", "over", name, ..] => Some(name),
        _ => None,
    }
}

pub fn builtin(name: &str) -> Option<MultiGraph> {
    if let Some(rest) = name.strip_prefix("matui_") {
        let (d, k) = rest.split_once('_')?;
        return MultiGraph::matui(d.parse().ok()?, k.parse().ok()?).ok();
    }
    if let Some(n) = name.strip_prefix('r') {
        let n: usize = n.parse().ok()?;
        return (n >= 1).then(|| MultiGraph::bouquet(n).ok()).flatten();
    }
    if let Some(p) = name.strip_prefix('m') {
        return MultiGraph::loop_pair(p.parse().ok()?).ok();
    }
    None
}
