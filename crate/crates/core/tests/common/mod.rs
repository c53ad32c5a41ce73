#![allow(dead_code)]

use nalgebra::Matrix2;
use num_complex::Complex64;
use qnc_core::compile::{compile_with_source_alphas, QuantumProtocol};
use qnc_core::netgraph::{D3Network, D3Node, D3Role, GroupKind, Letter, LetterMap};
use qnc_core::Rational;

pub fn l(s: &str) -> Letter {
    s.parse().unwrap()
}

pub fn node(id: &str, role: D3Role) -> D3Node {
    D3Node { id: id.into(), role }
}

/// `s -> f -> (t1, t2)`.
pub fn fork_net() -> D3Network {
    D3Network::new(
        GroupKind::Z4,
        vec![
            node("s", D3Role::Source),
            node("f", D3Role::Fork),
            node("t1", D3Role::Sink),
            node("t2", D3Role::Sink),
        ],
        vec![(0, 1), (1, 2), (1, 3)],
        &[(2, 0), (3, 0)],
    )
    .unwrap()
}

/// `(a, b) -> j -> t`.
pub fn join_net(group: GroupKind) -> D3Network {
    D3Network::new(
        group,
        vec![
            node("a", D3Role::Source),
            node("b", D3Role::Source),
            node("j", D3Role::Join),
            node("t", D3Role::Sink),
        ],
        vec![(0, 2), (1, 2), (2, 3)],
        &[(3, 0)],
    )
    .unwrap()
}

/// `s -> v -> t` with `v` applying `map`.
pub fn transform_net(map: LetterMap) -> D3Network {
    D3Network::new(
        GroupKind::Z4,
        vec![
            node("s", D3Role::Source),
            node("v", D3Role::Transform(map)),
            node("t", D3Role::Sink),
        ],
        vec![(0, 1), (1, 2)],
        &[(2, 0)],
    )
    .unwrap()
}

pub fn compiled_with(d3: &D3Network, alphas: &[Rational]) -> QuantumProtocol {
    compile_with_source_alphas(d3, alphas).unwrap()
}

/// Tetra amplitudes written out independently of the library.
pub fn tetra_ket_independent(z: Letter) -> [Complex64; 2] {
    let cos2 = 0.5 + 3f64.sqrt() / 6.0;
    let (c, s) = (cos2.sqrt(), (1.0 - cos2).sqrt());
    let e = |phase: f64| Complex64::from_polar(1.0, phase * std::f64::consts::PI);
    match z.index() {
        0 => [Complex64::new(c, 0.), e(0.25) * s],
        1 => [Complex64::new(c, 0.), e(-0.75) * s],
        2 => [Complex64::new(s, 0.), e(-0.25) * c],
        _ => [Complex64::new(s, 0.), e(0.75) * c],
    }
}

pub fn projector(v: [Complex64; 2]) -> Matrix2<Complex64> {
    Matrix2::new(
        v[0] * v[0].conj(),
        v[0] * v[1].conj(),
        v[1] * v[0].conj(),
        v[1] * v[1].conj(),
    )
}

/// `a χ(z) + (1 - a) I/2` from the independent amplitudes.
pub fn shrunk_matrix(z: Letter, a: f64) -> Matrix2<Complex64> {
    projector(tetra_ket_independent(z)) * Complex64::new(a, 0.)
        + Matrix2::identity() * Complex64::new((1.0 - a) / 2.0, 0.)
}
