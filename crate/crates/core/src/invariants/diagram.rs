use petgraph::algo::articulation_points::articulation_points;
use petgraph::graph::UnGraph;
use thiserror::Error;

use crate::braid::BraidWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("generator {0} does not occur: the diagram is disconnected")]
    Disconnected(usize),
}

/// The 4-valent projection graph of a closed braid diagram.
///
/// One vertex per crossing (letter index); one edge per arc running along a
/// strand position from one crossing to the next crossing on that position,
/// wrapping around through the closure. Loops and parallel edges occur.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl DiagramGraph {
    pub fn of_closure(b: &BraidWord) -> Result<Self, DiagramError> {
        if let Some(g) = b.generator_counts().iter().position(|&c| c == 0) {
            return Err(DiagramError::Disconnected(g + 1));
        }
        // crossings touching each strand position, in letter order
        let mut on_position: Vec<Vec<usize>> = vec![Vec::new(); b.strands()];
        for (k, &l) in b.letters().iter().enumerate() {
            on_position[l - 1].push(k);
            on_position[l].push(k);
        }
        let mut edges = Vec::with_capacity(2 * b.len());
        for crossings in &on_position {
            for (i, &from) in crossings.iter().enumerate() {
                let to = crossings[(i + 1) % crossings.len()];
                edges.push((from, to));
            }
        }
        Ok(Self {
            vertices: b.len(),
            edges,
        })
    }

    /// Crossings whose removal disconnects the projection curve.
    pub fn cut_points(&self) -> Vec<usize> {
        // Subdividing every edge twice makes the graph simple, and a crossing
        // is then a graph articulation point exactly when it is a cut point of
        // the curve (a loop becomes a triangle hanging off its crossing).
        let mut g: UnGraph<(), ()> = UnGraph::default();
        let crossings: Vec<_> = (0..self.vertices).map(|_| g.add_node(())).collect();
        for &(u, v) in &self.edges {
            let a = g.add_node(());
            let b = g.add_node(());
            g.add_edge(crossings[u], a, ());
            g.add_edge(a, b, ());
            g.add_edge(b, crossings[v], ());
        }
        let cut = articulation_points(&g);
        let mut out: Vec<usize> = crossings
            .iter()
            .enumerate()
            .filter(|(_, n)| cut.contains(*n))
            .map(|(k, _)| k)
            .collect();
        out.sort_unstable();
        out
    }
}

/// Whether the closed braid diagram has a cut point (a nugatory crossing).
pub fn is_reducible_diagram(b: &BraidWord) -> Result<bool, DiagramError> {
    Ok(!DiagramGraph::of_closure(b)?.cut_points().is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid;

    fn word(s: &str, n: usize) -> BraidWord {
        parse_braid(s, Some(n)).unwrap()
    }

    #[test]
    fn examples() {
        assert!(!is_reducible_diagram(&word("111", 2)).unwrap());
        assert!(is_reducible_diagram(&word("1", 2)).unwrap());
        let g = DiagramGraph::of_closure(&word("1112333", 4)).unwrap();
        assert_eq!(g.cut_points(), vec![3]);
    }

    #[test]
    fn graph_shape() {
        let b = word("1213231", 4);
        let g = DiagramGraph::of_closure(&b).unwrap();
        assert_eq!(g.vertices, 7);
        assert_eq!(g.edges.len(), 14);
        let mut degree = vec![0; g.vertices];
        for &(u, v) in &g.edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        assert!(degree.iter().all(|&d| d == 4));
    }

    #[test]
    fn trivial_and_disconnected() {
        assert!(!is_reducible_diagram(&BraidWord::unknot()).unwrap());
        assert_eq!(
            is_reducible_diagram(&word("11", 3)),
            Err(DiagramError::Disconnected(2))
        );
    }
}
