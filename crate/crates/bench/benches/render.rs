use chorimap_bench::europe_workspace;
use chorimap_core::{render_map, MapType, RenderOptions, RenderRequest, Viewport};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn render(c: &mut Criterion) {
    let ws = europe_workspace();
    let viewport = Viewport::fit(ws.features(), 1024, 768, 0.03).unwrap();
    let mut group = c.benchmark_group("render_map");
    for map_type in MapType::ALL {
        let req = RenderRequest {
            dataset: "life".into(),
            year: 2010,
            map_type,
            viewport: viewport.clone(),
            options: RenderOptions { legend: true, ..RenderOptions::default() },
        };
        group.bench_with_input(BenchmarkId::from_parameter(map_type.as_str()), &req, |b, req| {
            b.iter(|| render_map(&ws, black_box(req)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, render);
criterion_main!(benches);
