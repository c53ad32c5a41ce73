use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qnc_core::bundled;
use qnc_core::compile::compile;
use qnc_core::eval::{input_tuple, TruthTable};
use qnc_core::netgraph::{normalize_to_d3, Instance, Letter};
use qnc_core::par::Execution;
use qnc_core::sim::{simulate_montecarlo, simulate_oracle_labels, SourceInput};
use std::hint::black_box;

fn butterfly() -> Instance {
    Instance::from_file(bundled::butterfly()).unwrap()
}

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn montecarlo(c: &mut Criterion) {
    let (d3, _) = normalize_to_d3(&butterfly()).unwrap();
    let qp = compile(&d3);
    let inputs = [SourceInput::Label(Letter::new(1)), SourceInput::Label(Letter::new(2))];
    let mut group = c.benchmark_group("montecarlo_butterfly_100k");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| simulate_montecarlo(&qp, &inputs, black_box(100_000), 1, exec).unwrap())
        });
    }
    group.finish();
}

fn truth_table(c: &mut Criterion) {
    let inst = butterfly();
    let mut group = c.benchmark_group("truth_table_butterfly");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| TruthTable::build(black_box(&inst), exec).unwrap())
        });
    }
    group.finish();
}

fn oracle_sweep(c: &mut Criterion) {
    let (d3, _) = normalize_to_d3(&butterfly()).unwrap();
    let qp = compile(&d3);
    let mut group = c.benchmark_group("oracle_all_inputs_butterfly");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec.map_range(16, |i| simulate_oracle_labels(&qp, &input_tuple(2, i)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, montecarlo, truth_table, oracle_sweep);
criterion_main!(benches);
