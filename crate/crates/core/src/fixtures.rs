//! Small named graphs used by tests, examples and the CLI.

use crate::graph::Graph;

/// Seven vertices, eleven edges; its four 4-cycles 1-2-4-3, 3-4-6-5, 0-1-3-5
/// and 0-2-4-6 chain every edge into one C4 class, and the triangle 0-1-2 can
/// be moved onto the triangle 0-5-6.
pub fn homotopy_demo_graph() -> Graph {
    Graph::from_edges(
        7,
        [
            (0, 1),
            (0, 2),
            (0, 5),
            (0, 6),
            (1, 2),
            (1, 3),
            (2, 4),
            (3, 4),
            (3, 5),
            (4, 6),
            (5, 6),
        ],
    )
    .unwrap()
}

/// Looks up a built-in graph by name: `k<n>`, `c<n>`, `p<n>`, `star<n>`,
/// `petersen` or `demo`.
pub fn named_graph(name: &str) -> Option<Graph> {
    let num = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
    match name {
        "petersen" => Some(Graph::petersen()),
        "demo" => Some(homotopy_demo_graph()),
        _ => {
            if let Some(n) = num("star") {
                Some(Graph::star(n))
            } else if let Some(n) = num("k") {
                Some(Graph::complete(n))
            } else if let Some(n) = num("c").filter(|&n| n >= 3) {
                Some(Graph::cycle(n))
            } else {
                num("p").map(Graph::path)
            }
        }
    }
}
