use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use tetrahelix::decoder::MinWeightTable;
use tetrahelix::noise::sample_iid_faults;
use tetrahelix::{build_tetrahedral_colex, build_tetrahelix, iqp, BitVector, CssCode, NoiseModel, Pipeline};

fn codes(c: &mut Criterion) {
    c.bench_function("build_tetrahelix k=4 L=3", |b| b.iter(|| build_tetrahelix(black_box(4), 3).unwrap()));
    let block = CssCode::from_colex(&build_tetrahedral_colex(3).unwrap()).unwrap();
    c.bench_function("min-weight table L=3", |b| b.iter(|| MinWeightTable::build(black_box(&block.hx)).unwrap()));
}

fn split(c: &mut Criterion) {
    for k in [2, 4] {
        let t = build_tetrahelix(k, 3).unwrap();
        let o = BitVector::from_indices(t.n(), (0..t.n()).step_by(7));
        c.bench_function(&format!("split_frame k={k} L=3"), |b| b.iter(|| t.split_frame(black_box(&o)).unwrap()));
    }
}

fn pipeline(c: &mut Criterion) {
    for (k, l) in [(2, 3), (1, 5)] {
        let p = Pipeline::new(build_tetrahelix(k, l).unwrap()).unwrap();
        let model = NoiseModel::uniform(0.01).unwrap();
        let mut seed = 0u64;
        c.bench_function(&format!("pipeline trial k={k} L={l} eps=0.01"), |b| {
            b.iter_batched(
                || {
                    seed += 1;
                    sample_iid_faults(&model, &p.layout, seed)
                },
                |f| p.run(&f).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
}

fn sampling(c: &mut Criterion) {
    let circuit = iqp::sample_circuit(16, 2.0, 1).unwrap();
    c.bench_function("exact_distribution N=16", |b| b.iter(|| iqp::exact_distribution(black_box(&circuit)).unwrap()));
    c.bench_function("prob_zero N=16", |b| b.iter(|| iqp::prob_zero(black_box(&circuit)).unwrap()));
    let small = iqp::sample_circuit(4, 3.0, 2).unwrap();
    let layout = iqp::compile_parallel(&small).unwrap();
    c.bench_function("simulate_parallel_exact N=4", |b| b.iter(|| iqp::simulate_parallel_exact(black_box(&layout)).unwrap()));
}

criterion_group!(benches, codes, split, pipeline, sampling);
criterion_main!(benches);
