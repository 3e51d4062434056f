//! Shared builders for the integration suites: the bundled example systems
//! and a randomized single-target corpus with known ground truth.

#![allow(dead_code)]

use rand::Rng;

use crn_core::model::{Edge, EmbeddedNetwork, MassActionSystem, Vertex, VertexId};

pub fn v(coords: &[f64]) -> Vertex {
    Vertex::new(coords.to_vec())
}

pub fn e(s: usize, t: usize) -> Edge {
    Edge { source: VertexId(s), target: VertexId(t) }
}

/// Complete graph on (0,2), (1,1), (2,0). Rate order:
/// k12, k21, k23, k32, k13, k31.
pub fn triangle_complete(rates: [f64; 6]) -> MassActionSystem {
    let net = EmbeddedNetwork::new(
        2,
        vec![v(&[0.0, 2.0]), v(&[1.0, 1.0]), v(&[2.0, 0.0])],
        vec![e(0, 1), e(1, 0), e(1, 2), e(2, 1), e(0, 2), e(2, 0)],
    )
    .unwrap();
    MassActionSystem::new(net, rates.to_vec()).unwrap()
}

/// The six two-species complexes e_i + e_j (i < j) of R^4 in pair order
/// (1,2), (1,3), (1,4), (2,3), (2,4), (3,4).
pub fn pair_vertices4() -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let mut c = vec![0.0; 4];
            c[i] = 1.0;
            c[j] = 1.0;
            out.push(c);
        }
    }
    out
}

/// Complete reversible graph on the six pair complexes of R^4. Edges to the
/// complementary pair get `ka[source]`, catalytic edges get `kb[source]`.
pub fn pairs4_system(ka: [f64; 6], kb: [f64; 6]) -> MassActionSystem {
    let verts = pair_vertices4();
    let pairs: Vec<(usize, usize)> =
        (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
    let mut edges = Vec::new();
    let mut rates = Vec::new();
    for (s, &(i, j)) in pairs.iter().enumerate() {
        for (t, &(p, q)) in pairs.iter().enumerate() {
            if s == t {
                continue;
            }
            let disjoint = i != p && i != q && j != p && j != q;
            edges.push(e(s, t));
            rates.push(if disjoint { ka[s] } else { kb[s] });
        }
    }
    let net = EmbeddedNetwork::new(4, verts.into_iter().map(Vertex::new).collect(), edges)
        .unwrap();
    MassActionSystem::new(net, rates).unwrap()
}

/// The ten pair complexes of R^5 with edges between disjoint pairs only;
/// rates depend on the source complex alone. Pair order lexicographic.
pub fn pairs5_system(k: [f64; 10]) -> MassActionSystem {
    let pairs: Vec<(usize, usize)> =
        (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
    let verts: Vec<Vertex> = pairs
        .iter()
        .map(|&(i, j)| {
            let mut c = vec![0.0; 5];
            c[i] = 1.0;
            c[j] = 1.0;
            Vertex::new(c)
        })
        .collect();
    let mut edges = Vec::new();
    let mut rates = Vec::new();
    for (s, &(i, j)) in pairs.iter().enumerate() {
        for (t, &(p, q)) in pairs.iter().enumerate() {
            if s != t && i != p && i != q && j != p && j != q {
                edges.push(e(s, t));
                rates.push(k[s]);
            }
        }
    }
    let net = EmbeddedNetwork::new(5, verts, edges).unwrap();
    MassActionSystem::new(net, rates).unwrap()
}

/// Four sources on the line (0, 2, 3, 5) feeding targets 1 and 4; rate i
/// belongs to the edge out of source i.
pub fn two_target_line(rates: [f64; 4]) -> MassActionSystem {
    let net = EmbeddedNetwork::new(
        1,
        vec![v(&[0.0]), v(&[2.0]), v(&[3.0]), v(&[5.0]), v(&[1.0]), v(&[4.0])],
        vec![e(0, 4), e(1, 4), e(2, 5), e(3, 5)],
    )
    .unwrap();
    MassActionSystem::new(net, rates.to_vec()).unwrap()
}

/// Rectangle sources (0,0), (3,0), (3,2), (0,2) feeding two targets at
/// height one, distance `d` apart around midpoint (1.5, 1). Rates k1..k4
/// belong to the sources in that order; sources 1 and 4 feed the left
/// target, 2 and 3 the right one.
pub fn two_target_family(d: f64, rates: [f64; 4]) -> MassActionSystem {
    let left = [(3.0 - d) / 2.0, 1.0];
    let right = [(3.0 + d) / 2.0, 1.0];
    let net = EmbeddedNetwork::new(
        2,
        vec![
            v(&[0.0, 0.0]),
            v(&[3.0, 0.0]),
            v(&[3.0, 2.0]),
            v(&[0.0, 2.0]),
            v(&left),
            v(&right),
        ],
        vec![e(0, 4), e(1, 5), e(2, 5), e(3, 4)],
    )
    .unwrap();
    MassActionSystem::new(net, rates.to_vec()).unwrap()
}

/// The rectangle family at target distance one.
pub fn two_target_rect(rates: [f64; 4]) -> MassActionSystem {
    two_target_family(1.0, rates)
}

/// Sources (0,0), (1,0), (0,1) pointing at (3,3): no steady-state flux.
pub fn outside_target_triangle(rates: [f64; 3]) -> MassActionSystem {
    let net = EmbeddedNetwork::new(
        2,
        vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[3.0, 3.0])],
        vec![e(0, 3), e(1, 3), e(2, 3)],
    )
    .unwrap();
    MassActionSystem::new(net, rates.to_vec()).unwrap()
}

/// Six power-law decay reactions to the origin; the exponent vectors carry
/// uniform barycentric weights, so the origin is interior.
pub fn decay_system(rates: [f64; 6]) -> MassActionSystem {
    let ys = [
        vec![-1.0, -2.0, 0.0],
        vec![0.0, -3.0, -1.0],
        vec![-2.0, 3.0, 2.0],
        vec![1.0, 2.0, 1.0],
        vec![4.0, -2.0, 1.5],
        vec![-2.0, 2.0, -3.5],
    ];
    let mut verts: Vec<Vertex> = ys.iter().cloned().map(Vertex::new).collect();
    verts.push(v(&[0.0, 0.0, 0.0]));
    let edges = (0..6).map(|i| e(i, 6)).collect();
    let net = EmbeddedNetwork::new(3, verts, edges).unwrap();
    MassActionSystem::new(net, rates.to_vec()).unwrap()
}

/// A random single-target system with known membership ground truth: the
/// target is either the barycenter of the sources (always interior) or
/// strictly beyond their componentwise maximum (always outside).
pub fn random_single_target(
    rng: &mut impl Rng,
    dim: usize,
    interior: bool,
) -> MassActionSystem {
    loop {
        let k = dim + 2;
        let mut sources: Vec<Vec<f64>> = Vec::new();
        while sources.len() < k {
            let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(0..5) as f64).collect();
            if !sources.contains(&c) {
                sources.push(c);
            }
        }
        let target: Vec<f64> = if interior {
            (0..dim)
                .map(|c| sources.iter().map(|s| s[c]).sum::<f64>() / k as f64)
                .collect()
        } else {
            (0..dim)
                .map(|c| {
                    let max = sources.iter().map(|s| s[c]).fold(f64::MIN, f64::max);
                    max + rng.gen_range(1..4) as f64
                })
                .collect()
        };
        if sources.contains(&target) {
            continue;
        }
        let mut verts: Vec<Vertex> = sources.into_iter().map(Vertex::new).collect();
        verts.push(Vertex::new(target));
        let edges: Vec<Edge> = (0..k).map(|i| e(i, k)).collect();
        let Ok(net) = EmbeddedNetwork::new(dim, verts, edges) else {
            continue;
        };
        let rates: Vec<f64> = (0..k).map(|_| rng.gen_range(0.5..2.0)).collect();
        return MassActionSystem::new(net, rates).unwrap();
    }
}
