//! Cross-module examples: classical evaluation, normalization, compilation
//! and simulation on small named networks.

mod common;

use common::*;
use num_traits::One;
use qnc_core::bundled;
use qnc_core::compile::compile;
use qnc_core::eval::{check_requirement, eval, TruthTable};
use qnc_core::netgraph::{normalize_to_d3, validate_network, D3Network, GroupKind, Instance, LetterMap, NetworkFile};
use qnc_core::par::Execution;
use qnc_core::qmath::{fidelity, ket0, ket1, tetra_matrix, DensityMatrix2, ShrunkState};
use qnc_core::rational::{rat, to_f64};
use qnc_core::sim::{fidelity_report, simulate_analytic, simulate_oracle_densities, ReportOptions, SourceInput};
use serde_json::json;

fn instance(file: NetworkFile) -> Instance {
    Instance::from_file(file).unwrap()
}

fn maps(v: &[&str]) -> serde_json::Value {
    json!(v)
}

/// Three sources into one node computing two different sums of one-to-one
/// images, each sent to its own sink.
fn three_in_two_out() -> NetworkFile {
    let rot = maps(&["01", "10", "11", "00"]);
    let swap = maps(&["01", "00", "11", "10"]);
    let flip = maps(&["10", "11", "00", "01"]);
    serde_json::from_value(json!({
        "group": "Z4",
        "nodes": [
            {"id": "x", "kind": "source"}, {"id": "y", "kind": "source"}, {"id": "z", "kind": "source"},
            {"id": "v", "kind": "internal"},
            {"id": "f", "kind": "sink"}, {"id": "g", "kind": "sink"}
        ],
        "edges": [
            {"from": "x", "to": "v"}, {"from": "y", "to": "v"}, {"from": "z", "to": "v"},
            {"from": "v", "to": "f"}, {"from": "v", "to": "g"}
        ],
        "requirements": [{"sink": "f", "source": "x"}, {"sink": "g", "source": "y"}],
        "ops": {"v": [
            {"out": 0, "terms": [{"in": 0, "map": rot}, {"in": 1, "map": swap}, {"in": 2, "map": flip}]},
            {"out": 1, "terms": [{"in": 0, "map": swap}, {"in": 1, "map": flip}, {"in": 2, "map": rot}]}
        ]}
    }))
    .unwrap()
}

#[test]
fn butterfly_validates_and_decodes() {
    let (net, proto) = bundled::butterfly().split();
    assert!(validate_network(&net, &proto).is_ok());
    let inst = instance(bundled::butterfly());
    assert_eq!(eval(&inst, &[l("01"), l("10")]), vec![l("01"), l("10")]);
    let check = check_requirement(&inst, Execution::Sequential).unwrap();
    assert!(check.satisfied && check.counterexample.is_none());
}

#[test]
fn reduced_butterfly_has_a_counterexample() {
    let inst = instance(bundled::reduced_butterfly());
    let check = check_requirement(&inst, Execution::Sequential).unwrap();
    assert!(!check.satisfied);
    let (input, got) = check.counterexample.unwrap();
    let want: Vec<_> = inst.sigma.iter().map(|&s| input[s]).collect();
    assert_ne!(got, want);
}

#[test]
fn shared_node_splits_into_forks_transforms_and_joins() {
    let inst = instance(three_in_two_out());
    let (d3, corr) = normalize_to_d3(&inst).unwrap();
    let counts = d3.role_counts();
    assert_eq!(counts["fork"], 3);
    assert_eq!(counts["transform-one-to-one"], 6);
    assert_eq!(counts["join"], 4);
    assert_eq!(corr["v"].len(), 13);
    let before = TruthTable::build(&inst, Execution::Sequential).unwrap();
    let after = TruthTable::build(&d3, Execution::Sequential)
        .unwrap()
        .project(&before.sinks);
    assert_eq!(before, after);
}

#[test]
fn degree_three_input_is_a_fixpoint() {
    let d3 = fork_net();
    let (again, corr) = normalize_to_d3(&instance(d3.to_file())).unwrap();
    let map: Vec<usize> = d3
        .nodes
        .iter()
        .map(|n| again.index_of(&corr[&n.id][0]).unwrap())
        .collect();
    assert!(d3.isomorphic_under(&again, &map));
}

#[test]
fn normalized_butterfly_sinks_follow_the_classical_code() {
    let (d3, _) = normalize_to_d3(&instance(bundled::butterfly())).unwrap();
    let qp = compile(&d3);
    let inputs = [l("00"), l("01")];
    let states = simulate_analytic(&qp, &inputs).unwrap();
    let outputs = d3.eval(&inputs);
    for (j, &t) in d3.sinks.iter().enumerate() {
        let e = d3.in_edges(t)[0];
        assert_eq!(states[e].label, outputs[j]);
        assert_eq!(states[e].alpha, qp.sink_alphas[j]);
    }
    assert_eq!(outputs, inputs.to_vec());
}

#[test]
fn fork_copies_are_shrunk_by_nine() {
    let qp = compile(&fork_net());
    let rho = DensityMatrix2::new(tetra_matrix(l("00"))).unwrap();
    let res = simulate_oracle_densities(&qp, &[rho]).unwrap();
    let want = ShrunkState::new(l("00"), rat(1, 9)).unwrap().densify();
    // A density input is measured at the source, so each copy averages to
    // 1/27 and the two copies are correlated through the shared letter.
    let measured = ShrunkState::new(l("00"), rat(1, 27)).unwrap().densify();
    for e in [1, 2] {
        assert!(res.edge_state(e).max_abs_diff(&measured) < 1e-12);
    }
    assert!(res.fork_product_gap(0) > 1e-6);
    let exact = qnc_core::sim::simulate_oracle_labels(&qp, &[l("00")]).unwrap();
    assert!(exact.edge_state(1).max_abs_diff(&want) < 1e-12);
    assert!(exact.fork_is_exact_product(0));
}

#[test]
fn one_to_one_transform_shrinks_by_three() {
    let rot = LetterMap([l("01"), l("10"), l("11"), l("00")]);
    let qp = compile(&transform_net(rot));
    let res = qnc_core::sim::simulate_oracle_labels(&qp, &[l("10")]).unwrap();
    let want = ShrunkState::new(l("11"), rat(1, 3)).unwrap();
    assert_eq!(res.edge_marginals[1], want.coefficients());
}

#[test]
fn report_beats_one_half_for_basis_inputs() {
    let (d3, _) = normalize_to_d3(&instance(bundled::butterfly())).unwrap();
    let qp = compile(&d3);
    let inputs = [SourceInput::Pure(ket0()), SourceInput::Pure(ket1())];
    let rep = fidelity_report(&qp, &inputs, &ReportOptions::default()).unwrap();
    assert!(rep.all_pass());
    for s in &rep.sinks {
        assert_eq!(s.fidelity_arbitrary, rat(1, 2) + &s.alpha / rat(6, 1));
        assert_eq!(s.requirement_met, Some(true));
        let oracle = s.oracle_fidelity.unwrap();
        assert!((oracle - to_f64(&s.fidelity_arbitrary)).abs() < 1e-12);
    }
    // Tiny shrinks still clear one half, and only in the limit reach it.
    let deep = rat(1, 9).pow(40);
    assert!(rat(1, 2) + &deep / rat(6, 1) > rat(1, 2));
    assert!(!deep.is_one());
}

#[test]
fn identity_chain_and_single_edge_are_trivially_correct() {
    let file: NetworkFile = serde_json::from_value(json!({
        "group": "Z2xZ2",
        "nodes": [{"id": "s", "kind": "source"}, {"id": "a", "kind": "internal"},
                  {"id": "b", "kind": "internal"}, {"id": "t", "kind": "sink"}],
        "edges": [{"from": "s", "to": "a"}, {"from": "a", "to": "b"}, {"from": "b", "to": "t"}],
        "requirements": [{"sink": "t", "source": "s"}],
        "ops": {
            "a": [{"out": 0, "terms": [{"in": 0, "map": ["00", "01", "10", "11"]}]}],
            "b": [{"out": 0, "terms": [{"in": 0, "map": ["00", "01", "10", "11"]}]}]
        }
    }))
    .unwrap();
    let inst = instance(file);
    assert_eq!(eval(&inst, &[l("11")]), vec![l("11")]);
    assert!(check_requirement(&inst, Execution::Sequential).unwrap().satisfied);
    let single = instance(direct_net().to_file());
    assert!(check_requirement(&single, Execution::Sequential).unwrap().satisfied);
    assert_eq!(fidelity(&ket0(), &DensityMatrix2::from_pure(&ket0())).unwrap(), 1.0);
}

/// `s -> t` with no node in between.
fn direct_net() -> D3Network {
    D3Network::new(
        GroupKind::Z2xZ2,
        vec![
            node("s", qnc_core::netgraph::D3Role::Source),
            node("t", qnc_core::netgraph::D3Role::Sink),
        ],
        vec![(0, 1)],
        &[(1, 0)],
    )
    .unwrap()
}
