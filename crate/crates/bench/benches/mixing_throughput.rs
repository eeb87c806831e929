//! Throughput of one mixing pass at policy scale, with and without the
//! generation archive.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use esmix_core::gaussian::GaussianPdf;
use esmix_core::mixing::{mix, mix_extended, Archive, Generation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM: usize = 130;
const POP: usize = 50;

fn pdf_at(offset: f64, rng: &mut ChaCha8Rng) -> GaussianPdf {
    let mean: Vec<f64> = (0..DIM).map(|_| offset + rng.random_range(-0.05..0.05)).collect();
    GaussianPdf::isotropic(mean, 0.5).unwrap()
}

fn evaluated(pdf: &GaussianPdf, rng: &mut ChaCha8Rng) -> Generation {
    let mut g = Generation::sample_direct(pdf, rng, POP);
    for (i, f) in g.fitness.iter_mut().enumerate() {
        *f = Some(i as f64);
    }
    g
}

fn bench_mixing(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p_old = pdf_at(0.0, &mut rng);
    let p_new = pdf_at(0.02, &mut rng);
    let g_old = evaluated(&p_old, &mut rng);

    let mut group = c.benchmark_group("mix_d130_pop50");
    group.bench_function("single_generation", |b| {
        b.iter_batched(
            || rng.clone(),
            |mut r| mix(&p_new, &p_old, &g_old, &mut r, POP).unwrap(),
            BatchSize::SmallInput,
        )
    });

    for k in [1usize, 3, 5] {
        let mut archive = Archive::new(k);
        for i in 0..k {
            let pdf = pdf_at(0.02 * i as f64, &mut rng);
            let gen = evaluated(&pdf, &mut rng);
            archive.push(pdf, gen);
        }
        group.bench_function(format!("archive_k{k}"), |b| {
            b.iter_batched(
                || rng.clone(),
                |mut r| mix_extended(&p_new, &archive, &mut r, POP).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, bench_mixing);
criterion_main!(benches);
