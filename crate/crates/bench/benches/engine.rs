use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use superradiance::dicke::{integrate_dicke_ode, DickeParams};
use superradiance::lindblad::{evolve, CollectiveDecay, EvolutionConfig};
use superradiance::operators::AtomRegister;
use superradiance::state::dicke_state;

fn generator(c: &mut Criterion) {
    let mut group = c.benchmark_group("lindblad_rhs");
    for n_atoms in [4, 6, 8] {
        let register = AtomRegister::new(n_atoms).unwrap();
        let rho = dicke_state(&register, n_atoms / 2).unwrap().into_rho();
        let decay = CollectiveDecay::new(register, 1.0).unwrap();
        group.bench_function(format!("general_n{n_atoms}"), |b| {
            b.iter(|| decay.rhs(black_box(&rho)))
        });
        group.bench_function(format!("hermitian_n{n_atoms}"), |b| {
            b.iter(|| decay.rhs_hermitian(black_box(&rho)))
        });
    }
    group.finish();
}

fn evolution(c: &mut Criterion) {
    let register = AtomRegister::new(6).unwrap();
    let initial = dicke_state(&register, 6).unwrap();
    let config = EvolutionConfig {
        gamma0: 1.0,
        dt: 1e-3,
        t_max: 0.1,
        record_stride: 10,
    };
    c.bench_function("evolve_n6_100_steps", |b| {
        b.iter(|| evolve(black_box(&initial), &config).unwrap())
    });
}

fn dicke_ode(c: &mut Criterion) {
    let params = DickeParams::new(1000, 1.0).unwrap();
    c.bench_function("dicke_ode_n1000", |b| {
        b.iter(|| integrate_dicke_ode(&params, 1000.0, 0.1, 1e-5).unwrap())
    });
}

criterion_group!(benches, generator, evolution, dicke_ode);
criterion_main!(benches);
