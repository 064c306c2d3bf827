use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

use tmobo::acquisition::score_candidates;
use tmobo::par::Execution;
use tmobo::pareto::{non_dominated, HvContext};
use tmobo::problems::{preset, Problem};
use tmobo::seeding::substream;
use tmobo::surrogate::{fit_models, BaseNormals, FitConfig, QueryPair, TemporalKind};

struct Fixture {
    inputs: Vec<QueryPair>,
    ys: Vec<Vec<f64>>,
    kinds: Vec<TemporalKind>,
    candidates: Vec<Vec<f64>>,
    front: Vec<Vec<f64>>,
    reference: Vec<f64>,
}

fn fixture(n: usize, q: usize) -> Fixture {
    let problem = Problem::new(preset("ZDT1(M-M)").expect("preset")).expect("valid preset");
    let mut rng = substream(1, "bench", 0);
    let (d, t_max) = (problem.d(), problem.t_max());
    let mut inputs = Vec::new();
    let mut values = Vec::new();
    for _ in 0..n {
        let x: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
        let t = rng.gen_range(1..=t_max);
        values.push(problem.evaluate(&x, t).expect("in domain"));
        inputs.push(QueryPair::new(x, t));
    }
    let ys = (0..2).map(|i| values.iter().map(|v| v[i]).collect()).collect();
    let reference = (0..2)
        .map(|i| values.iter().map(|v| v[i]).fold(f64::MIN, f64::max))
        .collect();
    let front = non_dominated(&values).into_iter().map(|i| values[i].clone()).collect();
    let candidates = (0..q).map(|_| (0..d).map(|_| rng.gen()).collect()).collect();
    Fixture {
        inputs,
        ys,
        kinds: vec![TemporalKind::Rbf; 2],
        candidates,
        front,
        reference,
    }
}

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn scoring(c: &mut Criterion) {
    let f = fixture(120, 500);
    let config = FitConfig::default();
    let models = fit_models(&f.inputs, &f.ys, 50, &f.kinds, None, &config, Execution::Sequential)
        .expect("fit");
    let mut rng = substream(2, "bench", 0);
    let normals = BaseNormals::draw(&mut rng, 128, 2, 50);
    let ctx = HvContext::new(&f.front, &f.reference);
    let mut group = c.benchmark_group("tehvi_500_candidates");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| score_candidates(black_box(&models), &f.candidates, &normals, &ctx, exec).unwrap())
        });
    }
    group.finish();
}

fn fitting(c: &mut Criterion) {
    let f = fixture(120, 0);
    let config = FitConfig::default();
    let mut group = c.benchmark_group("fit_two_objectives");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| fit_models(black_box(&f.inputs), &f.ys, 50, &f.kinds, None, &config, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, scoring, fitting);
criterion_main!(benches);
