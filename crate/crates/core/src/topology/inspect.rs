//! Text views of a built network, in the style of the emulator's `dump` and
//! `links` commands, plus a Graphviz export.

use std::fmt::Write;

use super::model::{Endpoint, LinkSpec, NetworkModel, NodeId};

/// One line per node, hosts first then switches, each in index order.
pub fn dump(net: &NetworkModel) -> String {
    let mut out = String::new();
    for h in &net.hosts {
        writeln!(out, "<Host {}: ip={} mac={}>", h.id, h.ip, h.mac).unwrap();
    }
    for s in &net.switches {
        let ports: Vec<String> = s
            .ports
            .iter()
            .map(|p| {
                Endpoint {
                    node: NodeId::Switch(s.id),
                    port: p.no,
                }
                .to_string()
            })
            .collect();
        writeln!(out, "<Switch {}: ports=[{}]>", s.id, ports.join(",")).unwrap();
    }
    out
}

fn oriented(l: &LinkSpec) -> (Endpoint, Endpoint) {
    if l.a.node <= l.b.node {
        (l.a, l.b)
    } else {
        (l.b, l.a)
    }
}

/// One line per link: host links in host order, then switch links ordered by
/// their (lower, higher) switch names.
pub fn links(net: &NetworkModel) -> String {
    let mut ordered: Vec<(Endpoint, Endpoint, &LinkSpec)> = net
        .links
        .iter()
        .map(|l| {
            let (x, y) = oriented(l);
            (x, y, l)
        })
        .collect();
    // NodeId orders hosts before switches, then by index.
    ordered.sort_by_key(|(x, y, _)| (x.node, y.node, x.port, y.port));
    let mut out = String::new();
    for (x, y, l) in ordered {
        writeln!(
            out,
            "{x}<->{y} (bw={}Mbps,delay={}ms,loss={})",
            l.params.bandwidth_mbps, l.params.delay_ms, l.params.loss_rate
        )
        .unwrap();
    }
    out
}

/// Graphviz description; hosts are green circles, switches gray boxes.
pub fn export_dot(net: &NetworkModel) -> String {
    let mut out = String::new();
    writeln!(out, "graph \"{}\" {{", net.spec.label()).unwrap();
    for h in &net.hosts {
        writeln!(
            out,
            "  {} [shape=circle, style=filled, fillcolor=green, label=\"{}\\n{}\"];",
            h.id, h.id, h.ip
        )
        .unwrap();
    }
    for s in &net.switches {
        let hosts = s.host_ports().count();
        writeln!(
            out,
            "  {} [shape=box, style=filled, fillcolor=gray, xlabel=\"{}\"];",
            s.id, hosts
        )
        .unwrap();
    }
    for l in &net.links {
        let (x, y) = oriented(l);
        writeln!(out, "  {} -- {};", x.node, y.node).unwrap();
    }
    out.push_str("}\n");
    out
}
