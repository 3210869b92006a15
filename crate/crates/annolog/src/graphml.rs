//! GraphML input and output.
//!
//! Nodes and edges may carry `<data>` entries. The reserved string key
//! `type` supplies a node's type tag. Numeric keys with value `v` become the
//! attribute annotation `[v, 1]`; boolean keys map to `[1,1]` / `[0,0]`;
//! string values of the form `[l,u]` give both bounds. Values outside [0,1]
//! are rejected.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::lattice::Interval;
use crate::model::{KnowledgeGraph, ModelError};

/// Reserved node data key carrying the type tag.
pub const TYPE_KEY: &str = "type";

#[derive(Debug, Clone, Copy, PartialEq)]
enum KeyDomain {
    Node,
    Edge,
    All,
}

#[derive(Debug, Clone)]
struct KeyDecl {
    name: String,
    domain: KeyDomain,
    attr_type: String,
}

/// Parses a GraphML document into a knowledge graph.
pub fn load_graph(doc: &str) -> Result<KnowledgeGraph, ModelError> {
    let tree = roxmltree::Document::parse(doc).map_err(|e| ModelError::Parse(e.to_string()))?;
    let root = tree.root_element();
    if root.tag_name().name() != "graphml" {
        return Err(ModelError::Parse(format!(
            "expected <graphml> root, found <{}>",
            root.tag_name().name()
        )));
    }

    let mut keys: HashMap<String, KeyDecl> = HashMap::new();
    for key in root.children().filter(|n| n.has_tag_name("key")) {
        let id = key
            .attribute("id")
            .ok_or_else(|| ModelError::Parse("<key> without id".into()))?;
        let domain = match key.attribute("for") {
            Some("node") => KeyDomain::Node,
            Some("edge") => KeyDomain::Edge,
            _ => KeyDomain::All,
        };
        keys.insert(
            id.to_string(),
            KeyDecl {
                name: key.attribute("attr.name").unwrap_or(id).to_string(),
                domain,
                attr_type: key.attribute("attr.type").unwrap_or("string").to_string(),
            },
        );
    }

    let graph_el = root
        .children()
        .find(|n| n.has_tag_name("graph"))
        .ok_or_else(|| ModelError::Parse("missing <graph> element".into()))?;
    let undirected = graph_el.attribute("edgedefault") == Some("undirected");

    let mut graph = KnowledgeGraph::new();
    // first pass: nodes
    for node in graph_el.children().filter(|n| n.has_tag_name("node")) {
        let id = node
            .attribute("id")
            .ok_or_else(|| ModelError::Parse("<node> without id".into()))?;
        let mut node_type = None;
        let mut attrs = Vec::new();
        for (decl, value) in data_entries(&node, &keys, KeyDomain::Node)? {
            if decl.name == TYPE_KEY {
                node_type = Some(value.trim().to_string());
            } else if let Some(iv) = parse_annotation(&decl, value.trim(), id)? {
                attrs.push((decl.name.clone(), iv));
            }
        }
        let nid = graph.add_node(id, node_type.as_deref())?;
        for (name, iv) in attrs {
            graph.set_node_attr(nid, &name, iv);
        }
    }
    // second pass: edges
    for edge in graph_el.children().filter(|n| n.has_tag_name("edge")) {
        let src = edge
            .attribute("source")
            .ok_or_else(|| ModelError::Parse("<edge> without source".into()))?;
        let dst = edge
            .attribute("target")
            .ok_or_else(|| ModelError::Parse("<edge> without target".into()))?;
        graph.add_edge(src, dst)?;
        if undirected {
            graph.add_edge(dst, src)?;
        }
        let (a, b) = (
            graph.node_id(src).expect("edge endpoint added"),
            graph.node_id(dst).expect("edge endpoint added"),
        );
        for (decl, value) in data_entries(&edge, &keys, KeyDomain::Edge)? {
            if decl.name == TYPE_KEY {
                continue;
            }
            let label = format!("({src},{dst})");
            if let Some(iv) = parse_annotation(&decl, value.trim(), &label)? {
                graph.set_edge_attr((a, b), &decl.name, iv);
                if undirected {
                    graph.set_edge_attr((b, a), &decl.name, iv);
                }
            }
        }
    }
    Ok(graph)
}

fn data_entries<'a>(
    el: &roxmltree::Node<'a, '_>,
    keys: &'a HashMap<String, KeyDecl>,
    domain: KeyDomain,
) -> Result<Vec<(&'a KeyDecl, String)>, ModelError> {
    let mut out = Vec::new();
    for data in el.children().filter(|n| n.has_tag_name("data")) {
        let key_id = data
            .attribute("key")
            .ok_or_else(|| ModelError::Parse("<data> without key".into()))?;
        let Some(decl) = keys.get(key_id) else {
            return Err(ModelError::Parse(format!("<data> references unknown key {key_id}")));
        };
        if decl.domain != domain && decl.domain != KeyDomain::All {
            continue;
        }
        out.push((decl, data.text().unwrap_or("").to_string()));
    }
    Ok(out)
}

fn parse_annotation(
    decl: &KeyDecl,
    value: &str,
    element: &str,
) -> Result<Option<Interval>, ModelError> {
    let bad = || ModelError::BadAnnotation {
        element: element.to_string(),
        key: decl.name.clone(),
        value: value.to_string(),
    };
    match decl.attr_type.as_str() {
        "int" | "long" | "float" | "double" => {
            let v: f64 = value.parse().map_err(|_| bad())?;
            Ok(Some(Interval::new(v, 1.0).map_err(|_| bad())?))
        }
        "boolean" => match value {
            "true" | "1" => Ok(Some(Interval::truth())),
            "false" | "0" => Ok(Some(Interval::falsehood())),
            _ => Err(bad()),
        },
        _ => {
            // string-typed: accept "[l,u]" interval literals, skip the rest
            let trimmed = value.trim();
            if trimmed.starts_with('[') && trimmed.ends_with(']') {
                let inner = &trimmed[1..trimmed.len() - 1];
                let parts: Vec<&str> = inner.split(',').collect();
                if parts.len() != 2 {
                    return Err(bad());
                }
                let l: f64 = parts[0].trim().parse().map_err(|_| bad())?;
                let u: f64 = parts[1].trim().parse().map_err(|_| bad())?;
                return Ok(Some(Interval::new(l, u).map_err(|_| bad())?));
            }
            log::debug!("ignoring non-annotation string data {} on {}", decl.name, element);
            Ok(None)
        }
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Serializes a knowledge graph to GraphML. Output is deterministic: nodes
/// and edges appear in insertion order, keys in first-use order.
pub fn write_graphml(graph: &KnowledgeGraph) -> String {
    // collect keys in first-use order
    let mut node_keys: Vec<String> = Vec::new();
    let mut edge_keys: Vec<String> = Vec::new();
    if graph.nodes().any(|n| graph.node_type(n).is_some()) {
        node_keys.push(TYPE_KEY.to_string());
    }
    for (_, k, _) in graph.node_attrs() {
        if !node_keys.contains(k) {
            node_keys.push(k.clone());
        }
    }
    for (_, k, _) in graph.edge_attrs() {
        if !edge_keys.contains(k) {
            edge_keys.push(k.clone());
        }
    }

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (i, k) in node_keys.iter().enumerate() {
        let ty = if k == TYPE_KEY { "string" } else { "double" };
        let _ = writeln!(
            out,
            "  <key id=\"nk{i}\" for=\"node\" attr.name=\"{}\" attr.type=\"{ty}\"/>",
            xml_escape(k)
        );
    }
    for (i, k) in edge_keys.iter().enumerate() {
        let _ = writeln!(
            out,
            "  <key id=\"ek{i}\" for=\"edge\" attr.name=\"{}\" attr.type=\"double\"/>",
            xml_escape(k)
        );
    }
    out.push_str("  <graph edgedefault=\"directed\">\n");

    let mut node_attr_map: HashMap<(u32, &str), Interval> = HashMap::new();
    for (n, k, iv) in graph.node_attrs() {
        node_attr_map.insert((*n, k.as_str()), *iv);
    }
    for n in graph.nodes() {
        let name = xml_escape(graph.node_name(n));
        let mut data = String::new();
        if let Some(t) = graph.node_type(n) {
            let idx = node_keys.iter().position(|k| k == TYPE_KEY).unwrap();
            let _ = write!(data, "<data key=\"nk{idx}\">{}</data>", xml_escape(t));
        }
        for (i, k) in node_keys.iter().enumerate() {
            if k == TYPE_KEY {
                continue;
            }
            if let Some(iv) = node_attr_map.get(&(n, k.as_str())) {
                let _ = write!(data, "<data key=\"nk{i}\">{:?}</data>", iv.lower());
            }
        }
        if data.is_empty() {
            let _ = writeln!(out, "    <node id=\"{name}\"/>");
        } else {
            let _ = writeln!(out, "    <node id=\"{name}\">{data}</node>");
        }
    }

    let mut edge_attr_map: HashMap<((u32, u32), &str), Interval> = HashMap::new();
    for (e, k, iv) in graph.edge_attrs() {
        edge_attr_map.insert((*e, k.as_str()), *iv);
    }
    for (a, b) in graph.edges() {
        let (src, dst) = (xml_escape(graph.node_name(a)), xml_escape(graph.node_name(b)));
        let mut data = String::new();
        for (i, k) in edge_keys.iter().enumerate() {
            if let Some(iv) = edge_attr_map.get(&((a, b), k.as_str())) {
                let _ = write!(data, "<data key=\"ek{i}\">{:?}</data>", iv.lower());
            }
        }
        if data.is_empty() {
            let _ = writeln!(out, "    <edge source=\"{src}\" target=\"{dst}\"/>");
        } else {
            let _ = writeln!(out, "    <edge source=\"{src}\" target=\"{dst}\">{data}</edge>");
        }
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
