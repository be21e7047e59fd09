//! Labeled action graphs: nodes are basis vectors labeled by weight, edges
//! are nonzero generator actions labeled by generator name and sign.

use std::collections::BTreeMap;

use petgraph::algo::is_isomorphic_matching;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use super::basis::{BasisLabel, Head, YBasis};
use super::uqz::{CLabel, Caps, LzBasis};
use crate::lattice::LatticeVector;
use crate::scalarfield::QScalar;
use crate::voperator::FjKind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphNode {
    /// Weight written relative to λ_i, e.g. `λ1-α1`.
    pub weight: String,
    /// The basis vector this node stands for.
    pub name: String,
}

#[derive(Clone, Debug)]
pub struct ActionGraph {
    pub title: String,
    pub graph: DiGraph<GraphNode, String>,
}

/// Edge label for `g c = s c'`: generators ē, f act with unit scalars and
/// h̄ = k̄/(q - q^-1) with ±1 on fundamental modules.
fn edge_label(h: Head, s: &QScalar) -> String {
    let qq = &QScalar::q_int_pow(1) - &QScalar::q_int_pow(-1);
    let (name, s) = match h.kind {
        FjKind::XPlus => (format!("ebar{}", h.j), s.clone()),
        FjKind::XMinus => (format!("f{}", h.j), s.clone()),
        FjKind::Psi => (format!("hbar{}", h.j), s / &qq),
        FjKind::Phi => (format!("phi{}", h.j), s.clone()),
    };
    if s.is_one() {
        name
    } else if (-s.clone()).is_one() {
        format!("-{name}")
    } else {
        format!("({})*{name}", s.render())
    }
}

fn weight_label(i: usize, w: &LatticeVector) -> String {
    w.label_relative(&LatticeVector::lambda(w.rank(), i), &format!("λ{i}"))
}

impl ActionGraph {
    /// Graph of the capped basis C_i of L(λ_i)_z.
    pub fn module(lz: &LzBasis) -> ActionGraph {
        let mut graph = DiGraph::new();
        let mut index: BTreeMap<&CLabel, NodeIndex> = BTreeMap::new();
        for e in &lz.elements {
            let mut name: String = e.fpath.iter().rev().map(|j| format!("f{j} ")).collect();
            name.push('v');
            for x in e.label.canonical() {
                name.push_str(&format!(" e({},z{})", x.u, x.j));
            }
            let ix = graph.add_node(GraphNode { weight: weight_label(lz.i, &e.weight), name });
            index.insert(&e.label, ix);
        }
        for a in &lz.actions {
            if let (Some(&from), Some((to, s))) = (index.get(&a.from), &a.to) {
                if let Some(&to) = index.get(to) {
                    graph.add_edge(from, to, edge_label(a.head, s));
                }
            }
        }
        ActionGraph { title: format!("L(lambda_{})_z", lz.i), graph }
    }

    /// Graph of B_i restricted to the caps, with the bullet actions of
    /// x^+, x^-, ψ named after the matching module generators.
    pub fn bullet(yb: &YBasis, caps: Caps) -> ActionGraph {
        let mut graph = DiGraph::new();
        let mut index: BTreeMap<&BasisLabel, NodeIndex> = BTreeMap::new();
        for e in &yb.elements {
            let js: Vec<usize> = e.label.psi.iter().map(|p| p.j).collect();
            if !caps.admits(e.fpath.len(), &js) {
                continue;
            }
            let ix = graph.add_node(GraphNode { weight: weight_label(yb.i, &e.label.weight), name: e.render(yb.i) });
            index.insert(&e.label, ix);
        }
        for a in &yb.actions {
            if a.head.kind == FjKind::Phi {
                continue;
            }
            if let (Some(&from), Some((to, s))) = (index.get(&a.from), &a.to) {
                if let Some(&to) = index.get(to) {
                    graph.add_edge(from, to, edge_label(a.head, s));
                }
            }
        }
        ActionGraph { title: format!("<Y_{}(z)>", yb.i), graph }
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Isomorphism of labeled digraphs: node weights and edge labels must match.
    pub fn isomorphic(&self, other: &ActionGraph) -> bool {
        is_isomorphic_matching(&self.graph, &other.graph, |a, b| a.weight == b.weight, |a, b| a == b)
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("digraph \"{}\" {{\n", self.title);
        for ix in self.graph.node_indices() {
            let n = &self.graph[ix];
            s.push_str(&format!("  n{} [label=\"{}\", tooltip=\"{}\"];\n", ix.index(), n.weight, n.name));
        }
        for e in self.graph.edge_indices() {
            let (a, b) = self.graph.edge_endpoints(e).expect("edge endpoints");
            s.push_str(&format!("  n{} -> n{} [label=\"{}\"];\n", a.index(), b.index(), self.graph[e]));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            schema: "qvertex.graph.v1",
            title: self.title.clone(),
            nodes: self.graph.node_weights().cloned().collect(),
            edges: self
                .graph
                .edge_indices()
                .map(|e| {
                    let (a, b) = self.graph.edge_endpoints(e).expect("edge endpoints");
                    GraphEdgeJson { from: a.index(), to: b.index(), label: self.graph[e].clone() }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphEdgeJson {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphJson {
    pub schema: &'static str,
    pub title: String,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdgeJson>,
}

fn figure(title: &str, nodes: &[(&str, &str, &str)], edges: &[(&str, &str, &str)]) -> ActionGraph {
    let mut graph = DiGraph::new();
    let mut index = BTreeMap::new();
    for &(key, weight, name) in nodes {
        index.insert(key, graph.add_node(GraphNode { weight: weight.to_string(), name: name.to_string() }));
    }
    for &(a, b, label) in edges {
        graph.add_edge(index[a], index[b], label.to_string());
    }
    ActionGraph { title: title.to_string(), graph }
}

/// The drawn part of the U_q(sl_2)_z-module L(λ_1)_z: at most two factors
/// e(u, z_1) per node.
pub fn figure_sl2() -> ActionGraph {
    let (l, m) = ("λ1", "λ1-α1");
    figure(
        "figure sl2",
        &[
            ("a", l, "v"),
            ("b", m, "f1 v"),
            ("c", l, "v e"),
            ("d", m, "f1 v e"),
            ("x", l, "v e e"),
            ("y", m, "f1 v e e"),
        ],
        &[
            ("a", "b", "f1"),
            ("a", "c", "hbar1"),
            ("b", "c", "ebar1"),
            ("b", "d", "-hbar1"),
            ("c", "d", "f1"),
            ("c", "x", "hbar1"),
            ("d", "x", "ebar1"),
            ("d", "y", "-hbar1"),
            ("x", "y", "f1"),
        ],
    )
}

/// The drawn part of the U_q(sl_3)_z-module L(λ_1)_z: at most one factor
/// per variable z_1, z_2.
pub fn figure_sl3() -> ActionGraph {
    let (l, m, k) = ("λ1", "λ1-α1", "λ1-α1-α2");
    figure(
        "figure sl3",
        &[
            ("a", l, "v"),
            ("b", m, "f1 v"),
            ("c", l, "v e1"),
            ("d", m, "f1 v e1"),
            ("bb", m, "f1 v e2"),
            ("cc", l, "v e1 e2"),
            ("dd", m, "f1 v e1 e2"),
            ("bbb", k, "f2 f1 v"),
            ("ddd", k, "f2 f1 v e1"),
            ("bbbb", k, "f2 f1 v e2"),
            ("dddd", k, "f2 f1 v e1 e2"),
        ],
        &[
            ("a", "b", "f1"),
            ("a", "c", "hbar1"),
            ("b", "c", "ebar1"),
            ("b", "d", "-hbar1"),
            ("c", "d", "f1"),
            ("bb", "cc", "ebar1"),
            ("bb", "dd", "-hbar1"),
            ("cc", "dd", "f1"),
            ("b", "bb", "hbar2"),
            ("d", "dd", "hbar2"),
            ("b", "bbb", "f2"),
            ("d", "ddd", "f2"),
            ("bb", "bbbb", "f2"),
            ("dd", "dddd", "f2"),
            ("bbb", "bb", "ebar2"),
            ("ddd", "dd", "ebar2"),
            ("bbb", "bbbb", "-hbar2"),
            ("ddd", "dddd", "-hbar2"),
        ],
    )
}

/// Caps reproducing the drawn part of each figure.
pub fn figure_caps(n: usize) -> Caps {
    match n {
        1 => Caps { path_max: 6, factors: 2, per_variable: None },
        _ => Caps { path_max: 6, factors: 2, per_variable: Some(1) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmod::{build_lz_basis, build_uqz, enumerate_ybasis, fd_module};

    fn graphs(n: usize) -> (ActionGraph, ActionGraph) {
        let caps = figure_caps(n);
        let u = build_uqz(fd_module(n, 1).unwrap(), 3);
        let module = ActionGraph::module(&build_lz_basis(&u, caps));
        let bullet = ActionGraph::bullet(&enumerate_ybasis(n, 1, caps.factors).unwrap(), caps);
        (module, bullet)
    }

    #[test]
    fn figures_match_both_sides() {
        for (n, fig) in [(1, figure_sl2()), (2, figure_sl3())] {
            let (module, bullet) = graphs(n);
            assert_eq!(module.node_count(), fig.node_count(), "{}", module.to_dot());
            assert_eq!(module.edge_count(), fig.edge_count(), "{}", module.to_dot());
            assert!(module.isomorphic(&fig), "{}", module.to_dot());
            assert!(bullet.isomorphic(&fig), "{}", bullet.to_dot());
        }
    }

    #[test]
    fn perturbed_figure_is_rejected() {
        let (module, _) = graphs(1);
        let mut fig = figure_sl2();
        let e = fig.graph.edge_indices().next().unwrap();
        fig.graph[e] = "-f1".to_string();
        assert!(!module.isomorphic(&fig));
    }

    #[test]
    fn dot_export_lists_every_edge() {
        let dot = figure_sl3().to_dot();
        assert_eq!(dot.matches("->").count(), 18);
        assert!(dot.contains("label=\"λ1-α1-α2\""));
    }
}
