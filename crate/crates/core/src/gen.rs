//! Random instances for property tests: D3 networks and general networks
//! with arbitrary classical protocols.

use crate::netgraph::{
    D3Network, D3Node, D3Role, Edge, GroupKind, Instance, Letter, LetterMap, MapClass, NetworkFile, Node, NodeKind,
    OutputOp, Requirement, Term,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use std::collections::BTreeMap;

pub fn random_group<R: Rng + ?Sized>(rng: &mut R) -> GroupKind {
    if rng.random_bool(0.5) {
        GroupKind::Z4
    } else {
        GroupKind::Z2xZ2
    }
}

fn random_letter<R: Rng + ?Sized>(rng: &mut R) -> Letter {
    Letter::new(rng.random_range(0..4))
}

/// A uniformly chosen map of the given class.
pub fn random_map<R: Rng + ?Sized>(rng: &mut R, class: MapClass) -> LetterMap {
    match class {
        MapClass::Constant => LetterMap::constant(random_letter(rng)),
        MapClass::OneToOne => {
            let mut t = Letter::ALL;
            t.shuffle(rng);
            LetterMap(t)
        }
        MapClass::TwoToOne => {
            let mut order = Letter::ALL;
            order.shuffle(rng);
            let mut image = Letter::ALL;
            image.shuffle(rng);
            let mut t = [Letter::ZERO; 4];
            for (k, x) in order.iter().enumerate() {
                t[x.index()] = image[k / 2];
            }
            LetterMap(t)
        }
    }
}

fn random_class<R: Rng + ?Sized>(rng: &mut R) -> MapClass {
    *[MapClass::Constant, MapClass::OneToOne, MapClass::TwoToOne]
        .choose(rng)
        .expect("nonempty")
}

/// Any legal map, excluding the identity.
pub fn random_transform<R: Rng + ?Sized>(rng: &mut R) -> LetterMap {
    loop {
        let class = random_class(rng);
        let m = random_map(rng, class);
        if !m.is_identity() {
            return m;
        }
    }
}

/// A random D3 network with at most `max_nodes` nodes and between one and
/// `max_sources` sources. Transforms never use the identity map; each sink
/// requires a random source.
pub fn random_d3<R: Rng + ?Sized>(rng: &mut R, max_nodes: usize, max_sources: usize) -> D3Network {
    assert!(max_nodes >= 2 && max_sources >= 1);
    let sources = rng.random_range(1..=max_sources.min(max_nodes / 2));
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for i in 0..sources {
        nodes.push(D3Node {
            id: format!("s{i}"),
            role: D3Role::Source,
        });
        open.push(i);
    }
    let mut k = 0;
    loop {
        // Every open end still needs its own sink.
        let room = max_nodes - nodes.len() - open.len();
        let mut choices = Vec::new();
        if room >= 2 {
            choices.push(D3Role::Fork);
        }
        if room >= 1 {
            choices.push(D3Role::Transform(random_transform(rng)));
            if open.len() >= 2 {
                choices.push(D3Role::Join);
            }
        }
        if choices.is_empty() || rng.random_bool(0.15) {
            break;
        }
        let role = *choices.choose(rng).expect("nonempty");
        let v = nodes.len();
        nodes.push(D3Node {
            id: format!("v{k}"),
            role,
        });
        k += 1;
        let (inputs, outputs) = role.degrees();
        for _ in 0..inputs {
            let pick = rng.random_range(0..open.len());
            edges.push((open.swap_remove(pick), v));
        }
        open.extend(std::iter::repeat_n(v, outputs));
    }
    let mut requirements = Vec::new();
    for (i, tail) in open.into_iter().enumerate() {
        let t = nodes.len();
        nodes.push(D3Node {
            id: format!("t{i}"),
            role: D3Role::Sink,
        });
        edges.push((tail, t));
        requirements.push((t, rng.random_range(0..sources)));
    }
    D3Network::new(random_group(rng), nodes, edges, &requirements).expect("generated network is D3")
}

/// A random valid network with a random classical protocol: up to
/// `max_sources` sources, `max_internal` internal nodes with up to three
/// inputs and outputs each, and sinks that may combine several inputs.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, max_sources: usize, max_internal: usize) -> Instance {
    let n_src = rng.random_range(1..=max_sources);
    let n_int = rng.random_range(1..=max_internal);
    let n_snk = rng.random_range(1..=3);
    let mut nodes = Vec::new();
    for i in 0..n_src {
        nodes.push(Node {
            id: format!("s{i}"),
            kind: NodeKind::Source,
        });
    }
    for i in 0..n_int {
        nodes.push(Node {
            id: format!("v{i}"),
            kind: NodeKind::Internal,
        });
    }
    for i in 0..n_snk {
        nodes.push(Node {
            id: format!("t{i}"),
            kind: NodeKind::Sink,
        });
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in n_src..n_src + n_int {
        let indeg = rng.random_range(1..=3);
        for _ in 0..indeg {
            edges.push((rng.random_range(0..v), v));
        }
    }
    let first_sink = n_src + n_int;
    for t in first_sink..first_sink + n_snk {
        let indeg = rng.random_range(1..=2);
        for _ in 0..indeg {
            edges.push((rng.random_range(0..first_sink), t));
        }
    }
    let mut outdeg = vec![0usize; nodes.len()];
    for &(a, _) in &edges {
        outdeg[a] += 1;
    }
    for (v, d) in outdeg.iter_mut().enumerate().take(first_sink).skip(n_src) {
        if *d == 0 {
            edges.push((v, rng.random_range(first_sink..first_sink + n_snk)));
            *d += 1;
        }
    }
    edges.shuffle(rng);

    let mut indeg = vec![0usize; nodes.len()];
    for &(_, b) in &edges {
        indeg[b] += 1;
    }
    let mut ops = BTreeMap::new();
    let random_op = |rng: &mut R, out: usize, inputs: usize| OutputOp {
        out,
        terms: (0..rng.random_range(1..=inputs.min(3)))
            .map(|_| {
                let input = rng.random_range(0..inputs);
                let class = random_class(rng);
                Term {
                    input,
                    map: random_map(rng, class),
                }
            })
            .collect(),
    };
    for v in n_src..first_sink {
        let list = (0..outdeg[v]).map(|j| random_op(rng, j, indeg[v])).collect();
        ops.insert(nodes[v].id.clone(), list);
    }
    for t in first_sink..first_sink + n_snk {
        if indeg[t] >= 2 || rng.random_bool(0.5) {
            ops.insert(nodes[t].id.clone(), vec![random_op(rng, 0, indeg[t])]);
        }
    }
    let requirements = (0..n_snk)
        .map(|i| Requirement {
            sink: format!("t{i}"),
            source: format!("s{}", rng.random_range(0..n_src)),
        })
        .collect();
    let file = NetworkFile {
        group: random_group(rng),
        edges: edges
            .iter()
            .map(|&(a, b)| Edge {
                from: nodes[a].id.clone(),
                to: nodes[b].id.clone(),
            })
            .collect(),
        nodes,
        requirements,
        ops,
    };
    Instance::from_file(file).expect("generated instance is valid")
}
