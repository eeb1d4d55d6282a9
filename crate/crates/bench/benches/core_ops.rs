use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stc_core::constellation::{difference_alphabet, ConstellationKind};
use stc_core::linalg::{cx, det, kron, ComplexMatrix, SvdWorkspace};
use stc_core::{build_generators, certify_profiles, Code, DelayProfile, FieldSpec};

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn bench_kron(c: &mut Criterion) {
    let g4 = build_generators(FieldSpec::perfect(4).unwrap()).unwrap();
    c.bench_function("kron_4x4_tensor", |b| {
        b.iter(|| kron(black_box(&g4.m2), black_box(&g4.m1)))
    });
}

fn bench_det(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = random_matrix(&mut rng, 4, 4);
    c.bench_function("det_4x4_lu", |b| b.iter(|| det(black_box(&m)).unwrap()));
}

fn bench_svd(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let m = random_matrix(&mut rng, 4, 7);
    let mut ws = SvdWorkspace::new();
    c.bench_function("singular_values_4x7", |b| {
        b.iter(|| ws.compute(black_box(&m)).to_vec())
    });
}

fn bench_encode(c: &mut Criterion) {
    let code = Code::by_name("gamma4").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s: Vec<_> = (0..16)
        .map(|_| cx(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
        .collect();
    c.bench_function("encode_gamma4", |b| {
        b.iter(|| code.encode(black_box(&s)).unwrap())
    });
}

fn bench_certify_slice(c: &mut Criterion) {
    let code = Code::by_name("gamma4").unwrap();
    let diffs = difference_alphabet(ConstellationKind::Qam, 4).unwrap();
    let profiles: Vec<DelayProfile> = stc_core::enumerate_profiles(4, 3);
    c.bench_function("certify_gamma4_2k_vectors", |b| {
        b.iter(|| certify_profiles(black_box(&code), &diffs, &profiles, 2_000, 1))
    });
}

criterion_group!(
    benches,
    bench_kron,
    bench_det,
    bench_svd,
    bench_encode,
    bench_certify_slice
);
criterion_main!(benches);
