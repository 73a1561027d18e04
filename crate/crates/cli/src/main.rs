mod inputs;

use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use tfg_core::abelian::{AbElement, DEFAULT_GROUP_ORDER_CAP};
use tfg_core::almost_aut::PrefixExchange;
use tfg_core::certificate;
use tfg_core::completion::{build_completion, fix_quotient_index, format_primes, Limits};
use tfg_core::homology::{matsumoto_report, Homology, HomologyClass};
use tfg_core::multigraph::MultiGraph;
use tfg_core::par::Exec;
use tfg_core::perm::DEFAULT_CLOSURE_CAP;
use tfg_core::shift::{BoundaryPoint, Path};
use tfg_core::Error;

use inputs::{CliError, CliResult, Workspace};

#[derive(Parser)]
#[command(name = "tfg", version, about = "Topological full groups of shifts of finite type")]
struct Cli {
    /// Largest finite group enumerated by marked-isomorphism searches.
    #[arg(long, global = true, default_value_t = DEFAULT_GROUP_ORDER_CAP)]
    cap_group_order: u64,
    /// Largest permutation group enumerated by closure.
    #[arg(long, global = true, default_value_t = DEFAULT_CLOSURE_CAP)]
    cap_closure: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run batch loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Admissibility predicates and the adjacency matrix.
    CheckGraph { graph: String },
    Homology {
        graph: String,
        #[arg(long)]
        degree: Option<usize>,
    },
    Abelianization { graph: String },
    /// Homology class of the indicator function of a clopen set.
    ClassOf { graph: String, clopen: String },
    /// A nonempty clopen set with the given class, e.g. `(1;)`.
    RealizeClass { graph: String, element: String },
    Matsumoto {
        g1: String,
        y1: String,
        g2: String,
        y2: String,
    },
    BuildCompletion {
        graph: String,
        clopen: String,
        /// Comma-separated, ascending; empty for none.
        #[arg(long, default_value = "")]
        primes: String,
    },
    ValidateCertificate { file: String },
    #[command(subcommand)]
    Elem(ElemCommand),
    /// Matui's graph for the Higman-Thompson group V_{d,k}.
    Matui {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
    },
    ExportDot { graph: String },
    /// Local prime content of a pattern.
    Lpc { graph: String, pattern: String },
    /// Index of the fixator of an expansion of T at one of its leaves.
    FixIndex {
        graph: String,
        pattern: String,
        clopen: String,
        leaf: String,
    },
}

#[derive(Args)]
struct ElemContext {
    /// Graph file or built-in name; defaults to the graph named in the element header.
    #[arg(long)]
    graph: Option<String>,
    /// File of `clopen <name>: ...` lines for `restrict` clauses.
    #[arg(long)]
    clopens: Option<String>,
}

#[derive(Subcommand)]
enum ElemCommand {
    /// `a ∘ b` (apply `b` first).
    Compose {
        a: String,
        b: String,
        #[command(flatten)]
        ctx: ElemContext,
    },
    Invert {
        a: String,
        #[command(flatten)]
        ctx: ElemContext,
    },
    Eq {
        a: String,
        b: String,
        #[command(flatten)]
        ctx: ElemContext,
    },
    Canon {
        a: String,
        #[command(flatten)]
        ctx: ElemContext,
    },
    /// Image and cocycle at a point such as `point x (y)`.
    Apply {
        a: String,
        point: String,
        #[command(flatten)]
        ctx: ElemContext,
    },
    Random {
        graph: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Restriction clopen (see `class-of`); the whole space by default.
        #[arg(long, default_value = "X")]
        restrict: String,
    },
    /// The compact open bisection as `(domain, cocycle, range)` triples.
    Bisection {
        a: String,
        #[command(flatten)]
        ctx: ElemContext,
    },
    /// Local permutations when the element is a tree automorphism.
    Local {
        a: String,
        #[command(flatten)]
        ctx: ElemContext,
    },
}

struct Out {
    text: String,
    code: u8,
}

impl Out {
    fn ok(text: String) -> Self {
        Out { text, code: 0 }
    }

    fn truth(text: String, value: bool) -> Self {
        Out {
            text,
            code: u8::from(!value),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limits = Limits {
        group_order: cli.cap_group_order,
        closure: cli.cap_closure,
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
        ..Limits::default()
    };
    match run(&cli, &limits) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("tfg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn core<T>(what: &str, r: tfg_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::core(what, e))
}

fn parse_primes(s: &str) -> CliResult<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() || s == "none" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|w| {
            w.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("bad prime {w:?}")))
        })
        .collect()
}

fn run(cli: &Cli, limits: &Limits) -> CliResult<Out> {
    let mut ws = Workspace::default();
    match &cli.command {
        Command::CheckGraph { graph } => {
            let g = ws.graph(graph)?;
            let d = g.is_diconnected();
            let nc = g.is_non_circular();
            let text = format!(
                "graph {}: {} vertices, {} edges\ndiconnected: {d}\nnon-circular: {nc}\nadmissible: {}\n{}",
                g.name(),
                g.vertex_count(),
                g.edge_count(),
                d && nc,
                g.adjacency_matrix()
            );
            Ok(Out::truth(text, d && nc))
        }
        Command::Homology { graph, degree } => {
            let g = ws.graph(graph)?;
            let h = core(graph, Homology::new(&g))?;
            let text = match degree {
                Some(n) => format!("H{n} = {}\n", h.group(*n)),
                None => format!("H0 = {}\nH1 = {}\ndet = {}\n", h.h0(), h.h1(), h.determinant()),
            };
            Ok(Out::ok(text))
        }
        Command::Abelianization { graph } => {
            let g = ws.graph(graph)?;
            let h = core(graph, Homology::new(&g))?;
            Ok(Out::ok(format!("abelianization = {}\n", h.abelianization())))
        }
        Command::ClassOf { graph, clopen } => {
            let g = ws.graph(graph)?;
            let y = ws.clopen(&g, clopen)?;
            let h = core(graph, Homology::new(&g))?;
            let c = core(clopen, h.class_of(&y))?;
            Ok(Out::ok(format!("H0 = {}\nclass([Y]) = {c}\n", h.h0())))
        }
        Command::RealizeClass { graph, element } => {
            let g = ws.graph(graph)?;
            let h = core(graph, Homology::new(&g))?;
            let e: AbElement = core(element, element.parse())?;
            let y = core(element, h.realize(&HomologyClass::from(e)))?;
            Ok(Out::ok(format!("{}\n", y.to_line("Y"))))
        }
        Command::Matsumoto { g1, y1, g2, y2 } => {
            let graph1 = ws.graph(g1)?;
            let graph2 = ws.graph(g2)?;
            let c1 = ws.clopen(&graph1, y1)?;
            let c2 = ws.clopen(&graph2, y2)?;
            match matsumoto_report(&c1, &c2, limits.group_order) {
                Ok(r) => {
                    let verdict = if r.met() { "MET" } else { "NOT-MET" };
                    let text = format!(
                        "det1 = {}\ndet2 = {}\nH0_1 = {}\nH0_2 = {}\nclass1 = {}\nclass2 = {}\nmatsumoto: {verdict}\n",
                        r.det1, r.det2, r.h0_1, r.h0_2, r.class1, r.class2
                    );
                    Ok(Out::truth(text, r.met()))
                }
                Err(e) if e.is_refusal() => Ok(Out {
                    text: format!("matsumoto: UNSUPPORTED ({e})\n"),
                    code: 3,
                }),
                Err(e) => Err(CliError::core("matsumoto", e)),
            }
        }
        Command::BuildCompletion { graph, clopen, primes } => {
            let g = ws.graph(graph)?;
            let y = ws.clopen(&g, clopen)?;
            let primes = parse_primes(primes)?;
            match build_completion(&y, &primes, limits) {
                Ok(cert) => Ok(Out::ok(certificate::to_text(&cert))),
                Err(e @ (Error::Construction(_) | Error::Inadmissible(_))) => {
                    Err(CliError::core("build-completion", e))
                }
                Err(e) => {
                    eprintln!("build-completion: FAILED");
                    Err(CliError::core("build-completion", e))
                }
            }
        }
        Command::ValidateCertificate { file } => {
            let text = ws.read(file)?;
            let v = core(file, certificate::validate(&text, limits))?;
            let mut out = String::new();
            for c in &v.checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                out.push_str(&format!("check {}: {verdict}\n", c.name));
            }
            for p in &v.problems {
                out.push_str(&format!("problem: {p}\n"));
            }
            out.push_str(if v.ok() { "certificate: VALID\n" } else { "certificate: INVALID\n" });
            Ok(Out::truth(out, v.ok()))
        }
        Command::Elem(cmd) => elem(&mut ws, cmd, cli.seed),
        Command::Matui { d, k } => {
            let g = core("matui", MultiGraph::matui(*d, *k))?;
            Ok(Out::ok(g.to_text()))
        }
        Command::ExportDot { graph } => Ok(Out::ok(ws.graph(graph)?.to_dot())),
        Command::Lpc { graph, pattern } => {
            let g = ws.graph(graph)?;
            let pat = ws.pattern(&g, pattern)?;
            let mut text = String::new();
            for v in 0..g.vertex_count() {
                let order = core(pattern, pat.group_order(v, limits.closure))?;
                text.push_str(&format!("|F_{}| = {order}\n", g.vertex(v)));
            }
            let lpc = core(pattern, pat.local_prime_content(limits.closure, limits.exec))?;
            text.push_str(&format!("lpc = {}\n", format_primes(&lpc)));
            Ok(Out::ok(text))
        }
        Command::FixIndex {
            graph,
            pattern,
            clopen,
            leaf,
        } => {
            let g = ws.graph(graph)?;
            let pat = ws.pattern(&g, pattern)?;
            let t = ws.clopen(&g, clopen)?;
            let leaf = core(leaf, Path::parse(&g, leaf))?;
            let r = core("fix-index", fix_quotient_index(&pat, &t, &leaf, limits))?;
            let enumerated = r.enumerated.map_or("capped".to_string(), |x| x.to_string());
            Ok(Out::ok(format!("index = {}\nenumerated = {enumerated}\n", r.formula)))
        }
    }
}

fn elem_graph(ws: &mut Workspace, ctx: &ElemContext) -> CliResult<Option<Arc<MultiGraph>>> {
    let g = match &ctx.graph {
        Some(op) => Some(ws.graph(op)?),
        None => None,
    };
    if let Some(file) = &ctx.clopens {
        let g = g
            .as_ref()
            .ok_or_else(|| CliError::Usage("--clopens needs --graph".into()))?;
        ws.load_clopens(g, file)?;
    }
    Ok(g)
}

fn emit(e: &PrefixExchange, ws: &Workspace) -> String {
    let name = if e.restriction().is_full() {
        None
    } else {
        ws.clopens()
            .iter()
            .filter(|(_, y)| *y == e.restriction())
            .map(|(n, _)| n.as_str())
            .min()
    };
    e.to_text(name)
}

fn elem(ws: &mut Workspace, cmd: &ElemCommand, seed: u64) -> CliResult<Out> {
    match cmd {
        ElemCommand::Compose { a, b, ctx } => {
            let g = elem_graph(ws, ctx)?;
            let x = ws.element(a, g.as_ref())?;
            let y = ws.element(b, Some(g.as_ref().unwrap_or(x.graph())))?;
            let z = core("compose", x.compose(&y))?;
            Ok(Out::ok(emit(&z, ws)))
        }
        ElemCommand::Invert { a, ctx } => {
            let g = elem_graph(ws, ctx)?;
            let x = ws.element(a, g.as_ref())?;
            Ok(Out::ok(emit(&x.invert(), ws)))
        }
        ElemCommand::Eq { a, b, ctx } => {
            let g = elem_graph(ws, ctx)?;
            let x = ws.element(a, g.as_ref())?;
            let y = ws.element(b, Some(g.as_ref().unwrap_or(x.graph())))?;
            let eq = core("eq", x.equals(&y))?;
            Ok(Out::truth(format!("{eq}\n"), eq))
        }
        ElemCommand::Canon { a, ctx } => {
            let g = elem_graph(ws, ctx)?;
            let x = ws.element(a, g.as_ref())?;
            Ok(Out::ok(emit(&x, ws)))
        }
        ElemCommand::Apply { a, point, ctx } => {
            let g = elem_graph(ws, ctx)?;
            let x = ws.element(a, g.as_ref())?;
            let gr = Arc::clone(x.graph());
            let p = core(point, BoundaryPoint::parse(&gr, point))?;
            let image = core(point, x.apply(&p))?;
            let k = core(point, x.cocycle_at(&p))?;
            Ok(Out::ok(format!("{}\ncocycle = {k}\n", image.display(&gr))))
        }
        ElemCommand::Random { graph, depth, restrict } => {
            let g = ws.graph(graph)?;
            let y = ws.clopen(&g, restrict)?;
            if y.is_empty() {
                return Err(CliError::Usage("restriction is empty".into()));
            }
            let e = PrefixExchange::random(&y, *depth, seed);
            let name = (!y.is_full()).then_some("Y");
            let mut text = String::new();
            if let Some(n) = name {
                text.push_str(&format!("# {}\n", y.to_line(n)));
            }
            text.push_str(&e.to_text(name));
            Ok(Out::ok(text))
        }
        ElemCommand::Bisection { a, ctx } => {
            let g = elem_graph(ws, ctx)?;
            let x = ws.element(a, g.as_ref())?;
            let gr = x.graph();
            let mut text = String::new();
            for (d, k, r) in &x.to_bisection().triples {
                text.push_str(&format!("arrow {} {k} {}\n", d.display(gr), r.display(gr)));
            }
            Ok(Out::ok(text))
        }
        ElemCommand::Local { a, ctx } => {
            let g = elem_graph(ws, ctx)?;
            let x = ws.element(a, g.as_ref())?;
            match x.is_automorphism() {
                Some(map) => Ok(Out::ok(format!("{}", map.display(x.graph())))),
                None => Ok(Out::truth("not a tree automorphism\n".into(), false)),
            }
        }
    }
}
