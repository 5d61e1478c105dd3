use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pgw::bounds::gw_space_lb;
use pgw::experiments::drones::flights;
use pgw::experiments::job_rng;
use pgw::featsel::{pairwise_fit, LabeledDataset};
use pgw::generators::{karate_club, perturb_graph};
use pgw::gw::SolverOptions;
use pgw::network::{uniform, PmNet};
use pgw::par::Execution;
use pgw::pgw::empirical_pm_net;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn karate_samples(seed: u64, count: usize) -> PmNet {
    let base = karate_club();
    let mut rng = job_rng(seed, &[0]);
    let samples = (0..count).map(|_| perturb_graph(&base, 5, &mut rng).unwrap().adjacency()).collect();
    empirical_pm_net(samples, uniform(base.n())).unwrap()
}

fn bench_pairwise_fit(c: &mut Criterion) {
    let (nets, labels) = flights(0, 0, 4).unwrap();
    let data = LabeledDataset::new(nets, labels).unwrap();
    let nu = uniform(data.num_params());
    let opts = SolverOptions::default();
    let mut group = c.benchmark_group("pairwise_fit");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| pairwise_fit(&data, &nu, None, &opts, exec).unwrap()));
    }
    group.finish();
}

fn bench_gw_space(c: &mut Criterion) {
    let (x, y) = (karate_samples(1, 8), karate_samples(2, 8));
    let opts = SolverOptions::default();
    let mut group = c.benchmark_group("gw_space_lb");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| gw_space_lb(&x, &y, 2.0, &opts, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_pairwise_fit, bench_gw_space);
criterion_main!(benches);
