use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;

use k3cert::{
    compute_period_data, decide_and_certify, embed_vector, periods_isomorphic, verify,
    MukaiModel, PicardParams,
};

fn bench_certify(c: &mut Criterion) {
    let params = PicardParams::try_new(1, 1, 2, 17, 1).unwrap();
    let bound = BigInt::from(1_000_000u64);
    c.bench_function("decide_and_certify_worked", |b| {
        b.iter(|| decide_and_certify(&params, &bound).unwrap().unwrap())
    });
    let cert = decide_and_certify(&params, &bound).unwrap().unwrap();
    c.bench_function("verify_worked", |b| b.iter(|| verify(&cert)));
}

fn bench_periods(c: &mut Criterion) {
    let model = MukaiModel::new();
    let (a, b_, cc) = (BigInt::from(3), BigInt::from(2), BigInt::from(2));
    let one = BigInt::from(1);
    let d1 = BigInt::from(3);
    c.bench_function("period_pair_3_2_2", |bch| {
        bch.iter(|| {
            let v = embed_vector(&a, &b_, &cc, &one, &one).unwrap();
            let v1 = embed_vector(&a, &b_, &cc, &d1, &one).unwrap();
            let pd = compute_period_data(&model, &v, &a, &b_, &cc).unwrap();
            let pd1 = compute_period_data(&model, &v1, &a, &b_, &cc).unwrap();
            periods_isomorphic(&pd, &pd1).unwrap().unwrap()
        })
    });
}

criterion_group!(pipelines, bench_certify, bench_periods);
criterion_main!(pipelines);
