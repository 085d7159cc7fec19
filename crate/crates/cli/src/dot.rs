use std::fmt::Write;

use locfaults_core::cfg::{Cfg, NodeKind, Succ};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; condition nodes are diamonds labelled with their
/// location and condition, blocks list one assignment per line.
pub fn render(cfg: &Cfg) -> String {
    let mut out = format!("digraph \"{}\" {{\n  node [fontname=\"monospace\"];\n", escape(&cfg.name));
    for (id, node) in cfg.nodes.iter().enumerate() {
        let loc = node.loc.to_string();
        let (shape, label) = match &node.kind {
            NodeKind::Pre(None) => ("ellipse", "pre".to_string()),
            NodeKind::Pre(Some(c)) => ("ellipse", format!("pre: {c}")),
            NodeKind::Post(c) => ("ellipse", format!("post: {c}")),
            NodeKind::Cond(c) => ("diamond", format!("{loc}: {c}")),
            NodeKind::Bound(c) => ("octagon", format!("bound: {c}")),
            NodeKind::Block(assigns) => {
                let lines: Vec<String> = assigns
                    .iter()
                    .map(|a| match a.loc() {
                        Some(l) => format!("{l}: {a}\\l"),
                        None => format!("{a}\\l"),
                    })
                    .collect();
                ("box", lines.concat())
            }
        };
        let label = escape(&label).replace("\\\\l", "\\l");
        let _ = writeln!(out, "  n{id} [shape={shape}, label=\"{label}\"];");
    }
    for (id, node) in cfg.nodes.iter().enumerate() {
        match node.succ {
            Succ::None => {}
            Succ::Seq(t) => {
                let _ = writeln!(out, "  n{id} -> n{t};");
            }
            Succ::Branch { then_to, else_to } => {
                let _ = writeln!(out, "  n{id} -> n{then_to} [label=\"T\"];");
                let _ = writeln!(out, "  n{id} -> n{else_to} [label=\"F\", style=dashed];");
            }
        }
    }
    out.push_str("}\n");
    out
}
