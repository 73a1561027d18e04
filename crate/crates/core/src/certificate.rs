//! The certificate text document and its validator.
//!
//! ```text
//! certificate
//! INPUT
//! graph r2
//! vertex a
//! edge x a a
//! edge y a a
//! clopen Y: @a
//! primes 2
//! CONSTRUCTION
//! N 2
//! factors 1
//! det -1
//! matrix 3 3
//! ...
//! graph r2_tilde
//! ...
//! clopen Ytilde: ...
//! pattern v1: (e_1_1_1 e_1_1_2)
//! CHECKS
//! check det-equality: PASS det = -1
//! ...
//! ```

use std::sync::Arc;

use num_bigint::BigInt;

use crate::completion::{build_completion, Check, CompletionCertificate, Limits, Pattern};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::multigraph::MultiGraph;
use crate::shift::ClopenSet;

const HEADER: &str = "certificate";
const SECTIONS: [&str; 3] = ["INPUT", "CONSTRUCTION", "CHECKS"];

fn join_ints(xs: &[BigInt]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn to_text(cert: &CompletionCertificate) -> String {
    let mut s = String::new();
    s.push_str(HEADER);
    s.push('\n');
    s.push_str("INPUT\n");
    s.push_str(&cert.graph.to_text());
    s.push_str(&cert.y.to_line("Y"));
    s.push('\n');
    s.push_str(&format!("primes {}\n", crate::completion::format_primes(&cert.primes)));
    s.push_str("CONSTRUCTION\n");
    s.push_str(&format!("N {}\n", cert.n));
    s.push_str(&format!("factors {}\n", join_ints(&cert.padded_factors)));
    s.push_str(&format!("det {}\n", cert.det));
    s.push_str(&cert.a.to_string());
    s.push_str(&cert.tilde_graph.to_text());
    s.push_str(&cert.tilde_y.to_line("Ytilde"));
    s.push('\n');
    s.push_str(&cert.pattern.to_text());
    s.push_str("CHECKS\n");
    for c in &cert.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        if c.details.is_empty() {
            s.push_str(&format!("check {}: {verdict}\n", c.name));
        } else {
            s.push_str(&format!("check {}: {verdict} {}\n", c.name, c.details));
        }
    }
    s
}

struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let x = self.peek();
        self.pos += 1;
        x
    }

    fn last_line(&self) -> usize {
        self.items.last().map_or(1, |x| x.0)
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let line = self.last_line();
        self.next().ok_or_else(|| Error::parse(line, format!("missing {what}")))
    }

    fn keyword(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (n, l) = self.expect(key)?;
        match l.strip_prefix(key) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok((n, rest.trim())),
            _ => Err(Error::parse(n, format!("expected `{key}`, found {l:?}"))),
        }
    }

    fn section(&mut self, name: &str) -> Result<()> {
        let (n, l) = self.expect(name)?;
        if l != name {
            return Err(Error::parse(n, format!("expected section {name}, found {l:?}")));
        }
        Ok(())
    }

    /// Lines up to the next line whose first word is not in `words`.
    fn take_while_words(&mut self, words: &[&str]) -> Vec<(usize, &'a str)> {
        let mut out = Vec::new();
        while let Some((n, l)) = self.peek() {
            let first = l.split_whitespace().next().unwrap_or("");
            if !words.contains(&first) || SECTIONS.contains(&l) {
                break;
            }
            out.push((n, l));
            self.pos += 1;
        }
        out
    }
}

fn parse_graph(block: &[(usize, &str)], fallback: usize) -> Result<Arc<MultiGraph>> {
    let first = block.first().map_or(fallback, |x| x.0);
    if block.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return Err(Error::parse(first, "graph block must be contiguous"));
    }
    Ok(Arc::new(MultiGraph::parse_lines(block.iter().map(|x| x.1), first)?))
}

fn parse_clopen(g: &Arc<MultiGraph>, line: (usize, &str), name: &str) -> Result<ClopenSet> {
    let (n, l) = line;
    let (got, y) = ClopenSet::parse_line(g, l).map_err(|e| Error::parse(n, e.to_string()))?;
    if got != name {
        return Err(Error::parse(n, format!("expected clopen {name}, found {got}")));
    }
    Ok(y)
}

fn parse_int(n: usize, s: &str) -> Result<BigInt> {
    s.parse().map_err(|_| Error::parse(n, format!("bad integer {s:?}")))
}

pub fn parse(text: &str) -> Result<CompletionCertificate> {
    let mut lines = Lines {
        items: text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect(),
        pos: 0,
    };
    let (n, head) = lines.expect("certificate header")?;
    if head != HEADER {
        return Err(Error::parse(n, "expected `certificate`"));
    }
    lines.section("INPUT")?;
    let block = lines.take_while_words(&["graph", "vertex", "edge"]);
    let graph = parse_graph(&block, n)?;
    let y = parse_clopen(&graph, lines.expect("clopen Y")?, "Y")?;
    let (pn, p) = lines.keyword("primes")?;
    let primes = if p == "none" {
        Vec::new()
    } else {
        p.split(',')
            .map(|w| w.trim().parse::<u64>().map_err(|_| Error::parse(pn, format!("bad prime {w:?}"))))
            .collect::<Result<Vec<_>>>()?
    };

    lines.section("CONSTRUCTION")?;
    let (nn, nv) = lines.keyword("N")?;
    let n_value = parse_int(nn, nv)?;
    let (fn_, fv) = lines.keyword("factors")?;
    let padded_factors = fv.split(',').map(|w| parse_int(fn_, w.trim())).collect::<Result<Vec<_>>>()?;
    let (dn, dv) = lines.keyword("det")?;
    let det = parse_int(dn, dv)?;
    let (mn, mh) = lines.expect("matrix")?;
    let rows: usize = mh
        .split_whitespace()
        .nth(1)
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| Error::parse(mn, "expected `matrix <rows> <cols>`"))?;
    let mut mlines = vec![mh];
    for _ in 0..rows {
        mlines.push(lines.expect("matrix row")?.1);
    }
    let (a, _) = IntMatrix::parse_lines(mlines, mn)?;
    let block = lines.take_while_words(&["graph", "vertex", "edge"]);
    let tilde_graph = parse_graph(&block, mn)?;
    let tilde_y = parse_clopen(&tilde_graph, lines.expect("clopen Ytilde")?, "Ytilde")?;
    let mut pattern = Pattern::trivial(&tilde_graph);
    for (n, l) in lines.take_while_words(&["pattern"]) {
        pattern.parse_line(l).map_err(|e| Error::parse(n, e.to_string()))?;
    }

    lines.section("CHECKS")?;
    let mut checks = Vec::new();
    while let Some((n, l)) = lines.next() {
        let rest = l
            .strip_prefix("check ")
            .ok_or_else(|| Error::parse(n, format!("expected a check line, found {l:?}")))?;
        let (name, body) = rest
            .split_once(':')
            .ok_or_else(|| Error::parse(n, "missing ':' in check line"))?;
        let body = body.trim();
        let (verdict, details) = body.split_once(' ').unwrap_or((body, ""));
        let pass = match verdict {
            "PASS" => true,
            "FAIL" => false,
            _ => return Err(Error::parse(n, format!("expected PASS or FAIL, found {verdict:?}"))),
        };
        checks.push(Check {
            name: name.trim().to_string(),
            pass,
            details: details.to_string(),
        });
    }

    Ok(CompletionCertificate {
        graph,
        y,
        primes,
        n: n_value,
        padded_factors,
        det,
        a,
        tilde_graph,
        tilde_y,
        pattern,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validation {
    /// Checks recomputed from the document's raw fields.
    pub checks: Vec<Check>,
    pub problems: Vec<String>,
}

impl Validation {
    pub fn ok(&self) -> bool {
        self.problems.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

/// Re-runs every check from the document alone, confirms the recorded
/// verdicts and that a fresh build from the INPUT section reproduces the
/// document byte for byte.
pub fn validate(text: &str, limits: &Limits) -> Result<Validation> {
    let cert = parse(text)?;
    let mut problems = Vec::new();
    if to_text(&cert) != text {
        problems.push("document is not in canonical form".to_string());
    }
    let checks = cert.run_checks(limits)?;
    if checks != cert.checks {
        for c in &checks {
            match cert.checks.iter().find(|r| r.name == c.name) {
                None => problems.push(format!("check {} is missing", c.name)),
                Some(r) if r != c => problems.push(format!(
                    "check {} recorded as {} {:?}, recomputed as {} {:?}",
                    c.name,
                    verdict(r.pass),
                    r.details,
                    verdict(c.pass),
                    c.details
                )),
                Some(_) => {}
            }
        }
        for r in &cert.checks {
            if !checks.iter().any(|c| c.name == r.name) {
                problems.push(format!("unknown check {}", r.name));
            }
        }
    }
    match build_completion(&cert.y, &cert.primes, limits) {
        Ok(fresh) => {
            if to_text(&fresh) != to_text(&cert) {
                problems.push("rebuilding from INPUT gives a different document".to_string());
            }
        }
        Err(e) if e.is_refusal() => return Err(e),
        Err(e) => problems.push(format!("rebuilding from INPUT failed: {e}")),
    }
    Ok(Validation { checks, problems })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
