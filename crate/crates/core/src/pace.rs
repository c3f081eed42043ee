//! PACE-2017 text formats.
//!
//! Graphs (`.gr`): header `p tw <n> <m>`, then one `<u> <v>` line per edge,
//! 1-based vertex ids, comment lines starting with `c`. Decompositions
//! (`.td`): header `s td <#bags> <maxBagSize> <n>`, bag lines
//! `b <bagId> <v1> <v2> ...`, then one tree edge line `<i> <j>` per edge.
//! Writers emit LF line endings and single spaces; `write(parse(write(x)))`
//! is byte-identical to `write(x)`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::decomp::TreeDecomposition;
use crate::graph::{Graph, GraphError};

#[derive(Debug, Error)]
pub enum PaceError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("missing `{0}` header line")]
    MissingHeader(&'static str),
    #[error("expected {expected} {what}, found {found}")]
    CountMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

fn syntax(line: usize, msg: impl Into<String>) -> PaceError {
    PaceError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_num(tok: &str, line: usize) -> Result<usize, PaceError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected a number, found {tok:?}")))
}

/// 1-based id from the file to a 0-based internal vertex id.
fn to_internal(id: usize, n: usize, line: usize, what: &str) -> Result<usize, PaceError> {
    if id == 0 || id > n {
        Err(syntax(line, format!("{what} id {id} out of range 1..={n}")))
    } else {
        Ok(id - 1)
    }
}

pub fn parse_gr(input: &str) -> Result<Graph, PaceError> {
    let mut graph: Option<Graph> = None;
    let mut declared_edges = 0usize;
    let mut seen_edges = 0usize;
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "p" {
            if graph.is_some() {
                return Err(syntax(line_no, "duplicate `p` header"));
            }
            if toks.len() != 4 || toks[1] != "tw" {
                return Err(syntax(line_no, "expected `p tw <n> <m>`"));
            }
            let n = parse_num(toks[2], line_no)?;
            declared_edges = parse_num(toks[3], line_no)?;
            graph = Some(Graph::new(n));
            continue;
        }
        let g = graph
            .as_mut()
            .ok_or(PaceError::MissingHeader("p tw <n> <m>"))?;
        if toks.len() != 2 {
            return Err(syntax(line_no, "expected an edge line `<u> <v>`"));
        }
        let n = g.vertex_count();
        let u = to_internal(parse_num(toks[0], line_no)?, n, line_no, "vertex")?;
        let v = to_internal(parse_num(toks[1], line_no)?, n, line_no, "vertex")?;
        g.add_edge(u, v).map_err(|source| PaceError::Graph {
            line: line_no,
            source,
        })?;
        seen_edges += 1;
    }
    let g = graph.ok_or(PaceError::MissingHeader("p tw <n> <m>"))?;
    if seen_edges != declared_edges {
        return Err(PaceError::CountMismatch {
            what: "edges",
            expected: declared_edges,
            found: seen_edges,
        });
    }
    Ok(g)
}

pub fn write_gr(g: &Graph) -> String {
    let mut out = String::new();
    out.push_str(&format!("p tw {} {}\n", g.vertex_count(), g.edge_count()));
    for (u, v) in g.edges() {
        out.push_str(&format!("{} {}\n", u + 1, v + 1));
    }
    out
}

pub fn parse_td(input: &str) -> Result<TreeDecomposition, PaceError> {
    struct Header {
        bags: usize,
        n: usize,
    }
    let mut header: Option<Header> = None;
    let mut bags: Vec<Option<BTreeSet<usize>>> = Vec::new();
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "s" => {
                if header.is_some() {
                    return Err(syntax(line_no, "duplicate `s` header"));
                }
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(syntax(line_no, "expected `s td <#bags> <maxBagSize> <n>`"));
                }
                let bag_count = parse_num(toks[2], line_no)?;
                let n = parse_num(toks[4], line_no)?;
                header = Some(Header { bags: bag_count, n });
                bags = vec![None; bag_count];
            }
            "b" => {
                let h = header
                    .as_ref()
                    .ok_or(PaceError::MissingHeader("s td <#bags> <maxBagSize> <n>"))?;
                if toks.len() < 2 {
                    return Err(syntax(line_no, "expected `b <bagId> <v...>`"));
                }
                let id = to_internal(parse_num(toks[1], line_no)?, h.bags, line_no, "bag")?;
                if bags[id].is_some() {
                    return Err(syntax(line_no, format!("bag {} given twice", id + 1)));
                }
                let mut bag = BTreeSet::new();
                for tok in &toks[2..] {
                    bag.insert(to_internal(
                        parse_num(tok, line_no)?,
                        h.n,
                        line_no,
                        "vertex",
                    )?);
                }
                bags[id] = Some(bag);
            }
            _ => {
                let h = header
                    .as_ref()
                    .ok_or(PaceError::MissingHeader("s td <#bags> <maxBagSize> <n>"))?;
                if toks.len() != 2 {
                    return Err(syntax(line_no, "expected a tree edge line `<i> <j>`"));
                }
                let i = to_internal(parse_num(toks[0], line_no)?, h.bags, line_no, "bag")?;
                let j = to_internal(parse_num(toks[1], line_no)?, h.bags, line_no, "bag")?;
                tree_edges.push((i, j));
            }
        }
    }
    let h = header.ok_or(PaceError::MissingHeader("s td <#bags> <maxBagSize> <n>"))?;
    let missing = bags.iter().filter(|b| b.is_none()).count();
    if missing > 0 {
        return Err(PaceError::CountMismatch {
            what: "bag lines",
            expected: h.bags,
            found: h.bags - missing,
        });
    }
    let bags: Vec<BTreeSet<usize>> = bags.into_iter().map(Option::unwrap).collect();
    let mut tree = Graph::new(h.bags);
    for (line_no, &(i, j)) in tree_edges.iter().enumerate() {
        tree.add_edge(i, j).map_err(|source| PaceError::Graph {
            line: line_no, // approximate; duplicates are caught regardless
            source,
        })?;
    }
    Ok(TreeDecomposition::new(tree, bags, h.n))
}

pub fn write_td(td: &TreeDecomposition) -> String {
    let mut out = String::new();
    let max_bag = td.bags().iter().map(|b| b.len()).max().unwrap_or(0);
    out.push_str(&format!(
        "s td {} {} {}\n",
        td.tree().vertex_count(),
        max_bag,
        td.vertex_universe()
    ));
    for (i, bag) in td.bags().iter().enumerate() {
        out.push_str(&format!("b {}", i + 1));
        for &v in bag {
            out.push_str(&format!(" {}", v + 1));
        }
        out.push('\n');
    }
    for (i, j) in td.tree().edges() {
        out.push_str(&format!("{} {}\n", i + 1, j + 1));
    }
    out
}
