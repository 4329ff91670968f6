//! Graphviz rendering. Hadamard edges are dashed.

use std::fmt::Write;

use crate::clifford::Sign;
use crate::diagram::Diagram;
use crate::phasepoly::{PhasePolyDiagram, Spider};

const GREEN: &str = "#99dd99";
const RED: &str = "#ee8888";

/// Every vertex is a green spider; boundary vertices are boxes.
pub fn diagram_to_dot(d: &Diagram) -> String {
    let g = d.graph();
    let mut out = String::from("graph diagram {\n  node [style=filled, fillcolor=\"");
    out.push_str(GREEN);
    out.push_str("\"];\n");
    for v in g.vertices() {
        let mut label = v.to_string();
        if let Some(e) = d.effect(v) {
            let sign = if e.sign == Sign::Plus { "+" } else { "-" };
            let _ = write!(label, "\\n{:?}{sign}", e.basis);
        }
        if let Some(c) = d.output_clifford(v) {
            let _ = write!(label, "\\nout {}", word(c));
        }
        if let Some(c) = d.input_clifford(v) {
            let _ = write!(label, "\\nin {}", word(c));
        }
        let shape = if g.is_input(v) || g.is_output(v) {
            "box"
        } else {
            "circle"
        };
        let _ = writeln!(out, "  {v} [label=\"{label}\", shape={shape}];");
    }
    for (a, b) in g.edges() {
        let _ = writeln!(out, "  {a} -- {b} [style=dashed, color=blue];");
    }
    out.push_str("}\n");
    out
}

fn word(c: crate::clifford::LocalClifford) -> String {
    if c.word().is_empty() {
        return "I".into();
    }
    c.word()
        .iter()
        .map(|g| g.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn phase_poly_to_dot(p: &PhasePolyDiagram) -> String {
    let mut out = String::from("graph phase_poly {\n  node [style=filled, shape=circle];\n");
    for (j, s) in p.spiders().iter().enumerate() {
        let (colour, phase) = match *s {
            Spider::Green { quarter_turns } => {
                (GREEN, ["0", "π/2", "π", "-π/2"][quarter_turns as usize])
            }
            Spider::Red { half_turns } => (RED, ["0", "π"][half_turns as usize]),
        };
        let _ = writeln!(
            out,
            "  {j} [label=\"{j}\\n{phase}\", fillcolor=\"{colour}\"];"
        );
    }
    for &(a, b) in p.edges() {
        let hadamard = !p.spiders()[a].is_red() && !p.spiders()[b].is_red();
        let style = if hadamard {
            " [style=dashed, color=blue]"
        } else {
            ""
        };
        let _ = writeln!(out, "  {a} -- {b}{style};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colours_and_edge_styles() {
        let p = PhasePolyDiagram::new(
            vec![
                Spider::Green { quarter_turns: 1 },
                Spider::Green { quarter_turns: 0 },
                Spider::Red { half_turns: 1 },
            ],
            [(0, 1), (0, 2)],
        )
        .unwrap();
        let dot = phase_poly_to_dot(&p);
        assert!(dot.contains("0 -- 1 [style=dashed"));
        assert!(dot.contains("0 -- 2;"));
        assert!(dot.contains(RED));
        assert!(diagram_to_dot(&p.to_diagram()).contains("0 -- 2 [style=dashed"));
    }
}
