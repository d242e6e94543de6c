//! Seeded instance generators shared by the integration suites.

use pmvc::constraint::SymmetricConstraint;
use pmvc::graph::{parse_graph, Graph};
use pmvc::planar::PlanarEmbedding;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random bi-colored multigraph; parallel edges arise naturally from
/// repeated pair draws.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, d: u32, max_edges: usize) -> Graph {
    let mut edges = Vec::new();
    if n >= 2 {
        for _ in 0..rng.gen_range(0..=max_edges) {
            let u = rng.gen_range(1..=n);
            let mut v = rng.gen_range(1..=n);
            while v == u {
                v = rng.gen_range(1..=n);
            }
            edges.push(format!(
                "[{},{},{},{}]",
                u,
                v,
                rng.gen_range(1..=d),
                rng.gen_range(1..=d)
            ));
        }
    }
    parse_graph(
        format!(r#"{{"n":{},"d":{},"edges":[{}]}}"#, n, d, edges.join(",")).as_bytes(),
    )
    .expect("generated graph is valid")
}

fn random_atom(rng: &mut ChaCha8Rng, d: u32, n: u32) -> SymmetricConstraint {
    let color = rng.gen_range(1..=d);
    let k = rng.gen_range(0..=n);
    match rng.gen_range(0..3) {
        0 => SymmetricConstraint::CountEq { color, k },
        1 => SymmetricConstraint::CountGe { color, k },
        _ => SymmetricConstraint::CountLe { color, k },
    }
}

pub fn random_constraint(rng: &mut ChaCha8Rng, d: u32, n: u32) -> SymmetricConstraint {
    match rng.gen_range(0..6) {
        0..=2 => random_atom(rng, d, n),
        3 => SymmetricConstraint::And {
            args: vec![random_atom(rng, d, n), random_atom(rng, d, n)],
        },
        4 => SymmetricConstraint::Or {
            args: vec![random_atom(rng, d, n), random_atom(rng, d, n)],
        },
        _ => SymmetricConstraint::Not {
            args: vec![random_atom(rng, d, n)],
        },
    }
}

/// The shared corpus: even n up to 10, up to three colors, heuristic-sized
/// edge counts, mixed satisfiable and unsatisfiable constraints.
pub fn corpus(seed: u64, count: usize) -> Vec<(Graph, SymmetricConstraint)> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = 2 * rng.gen_range(1..=5);
            let d = rng.gen_range(1..=3);
            let g = random_graph(&mut rng, n, d, 2 * n);
            let c = random_constraint(&mut rng, d, n as u32);
            (g, c)
        })
        .collect()
}

/// Alternating red/blue 4-cycle with a square embedding.
pub fn c4_fixture() -> (Graph, PlanarEmbedding) {
    let g = parse_graph(
        br#"{"n":4,"d":2,"edges":[[1,2,1,1],[2,3,2,2],[3,4,1,1],[4,1,2,2]]}"#,
    )
    .unwrap();
    let emb = PlanarEmbedding {
        rotation: vec![vec![2, 4], vec![3, 1], vec![4, 2], vec![1, 3]],
    };
    (g, emb)
}

/// 2x3 grid (ladder) with a grid embedding: top row 1-2-3, bottom 4-5-6.
pub fn ladder_fixture() -> (Graph, PlanarEmbedding) {
    let g = parse_graph(
        br#"{"n":6,"d":2,"edges":[[1,2,1,1],[2,3,2,2],[4,5,1,1],[5,6,2,2],[1,4,1,1],[2,5,2,2],[3,6,1,1]]}"#,
    )
    .unwrap();
    let emb = PlanarEmbedding {
        rotation: vec![
            vec![2, 4],
            vec![3, 1, 5],
            vec![2, 6],
            vec![5, 1],
            vec![6, 2, 4],
            vec![3, 5],
        ],
    };
    (g, emb)
}
