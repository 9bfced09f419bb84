use criterion::{black_box, criterion_group, criterion_main, Criterion};

use screenpath::mvnorm::mvn_rectangle;
use screenpath::recovery::{default_log_grid, phi_exact, SignRecoveryEvents};
use screenpath::solvers::{dantzig_path, lasso_path, DantzigOptions, LambdaGrid, LassoOptions};
use screenpath::SignedSupport;
use screenpath_bench::{response, ssd_14_24};

fn mvn_17(c: &mut Criterion) {
    let m = ssd_14_24();
    let s = SignedSupport::uniform(vec![0, 3, 7, 10, 14, 18, 22], 3.0).unwrap();
    let ev = SignRecoveryEvents::new(&m, &s, 1.0).unwrap().unwrap();
    let region = ev.regions(1.5).unwrap().i_region.unwrap();
    let mut g = c.benchmark_group("mvn_17dim");
    for acc in [2e-3, 5e-4] {
        g.bench_function(format!("accuracy_{acc}"), |b| b.iter(|| mvn_rectangle(black_box(&region), acc, 1).unwrap()));
    }
    g.finish();
}

fn paths(c: &mut Criterion) {
    let m = ssd_14_24();
    let y = response(&m, 4, 1);
    let top = m.xty(&y).amax();
    let lgrid = LambdaGrid::log_spaced(top / 14.0, 100, 1e-3).unwrap();
    let dgrid = LambdaGrid::fine_100(top).unwrap();
    c.bench_function("lasso_path_100", |b| b.iter(|| lasso_path(&m, black_box(&y), &lgrid, &LassoOptions::default()).unwrap()));
    c.bench_function("dantzig_path_100", |b| {
        b.iter(|| dantzig_path(&m, black_box(&y), &dgrid, &DantzigOptions::default()).unwrap())
    });
}

fn phi(c: &mut Criterion) {
    let m = ssd_14_24();
    let grid = default_log_grid();
    let s = SignedSupport::new(vec![1, 6, 12, 19], vec![1, -1, 1, 1], vec![3.0; 4]).unwrap();
    let mut g = c.benchmark_group("phi_exact_a4_50pts");
    g.sample_size(10);
    g.bench_function("accuracy_2e-3", |b| b.iter(|| phi_exact(&m, black_box(&s), 1.0, &grid, 2e-3, 1).unwrap()));
    g.finish();
}

criterion_group!(benches, mvn_17, paths, phi);
criterion_main!(benches);
