#include <benchmark/benchmark.h>

#include "prdeep/image_io.hpp"
#include "prdeep/solve.hpp"

using namespace prdeep;

namespace {

RealImage test_image(std::size_t n) { return synthetic_image(SyntheticKind::Shapes, {n, n}, 1); }

void BM_Fft2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ComplexField f = to_complex(test_image(n));
  for (auto _ : state) {
    fft2_inplace(f.values(), f.shape());
    benchmark::DoNotOptimize(f.values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_Fft2)->Arg(64)->Arg(128)->Arg(256);

void BM_CdpForwardAdjoint(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MeasurementOp op(CdpOperator({n, n}, 4, 1));
  const RealImage x = test_image(n);
  for (auto _ : state) {
    const auto z = op.forward(x);
    benchmark::DoNotOptimize(op.adjoint(z));
  }
}
BENCHMARK(BM_CdpForwardAdjoint)->Arg(64)->Arg(128);

void BM_FourierForwardAdjoint(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MeasurementOp op(FourierOsOperator::centered({n, n}));
  const RealImage x = test_image(n);
  for (auto _ : state) {
    const auto z = op.forward(x);
    benchmark::DoNotOptimize(op.adjoint(z));
  }
}
BENCHMARK(BM_FourierForwardAdjoint)->Arg(64)->Arg(128);

void BM_Denoiser(benchmark::State& state, std::shared_ptr<const Denoiser> d) {
  const RealImage x = test_image(64);
  for (auto _ : state) benchmark::DoNotOptimize((*d)(x, 20.0));
}
BENCHMARK_CAPTURE(BM_Denoiser, tv, std::make_shared<TvDenoiser>());
BENCHMARK_CAPTURE(BM_Denoiser, nlm, std::make_shared<NlmDenoiser>());
BENCHMARK_CAPTURE(BM_Denoiser, median, std::make_shared<MedianDenoiser>());
BENCHMARK_CAPTURE(BM_Denoiser, gaussian_blur, std::make_shared<GaussianBlurDenoiser>());

// Cost of a fixed number of FASTA iterations with the TV prior.
void BM_FastaTv(benchmark::State& state) {
  const Shape s{64, 64};
  const MeasurementOp op(CdpOperator(s, 4, 2));
  const RealImage truth = test_image(64);
  const PhaselessData data = sample_shot_noise(op.forward(truth), 27.0, 3);
  RedConfig red;
  red.lambda = default_lambda_coefficient(op.kind()) * data.sigma_w_bar();
  red.denoiser = std::make_shared<TvDenoiser>();
  red.sigma = 20.0;
  FastaOptions opts;
  opts.max_iters = static_cast<std::size_t>(state.range(0));
  opts.tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(fasta_solve(op, data, red, RealImage(s, 1.0), opts));
}
BENCHMARK(BM_FastaTv)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Hio(benchmark::State& state) {
  const MeasurementOp op(FourierOsOperator::centered({64, 64}));
  const RealImage truth = test_image(64);
  const PhaselessData data(op.amplitude(truth), 0.0);
  HioOptions opts;
  opts.iters = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hio_run(data, op, opts, RealImage({64, 64}, 100.0)));
}
BENCHMARK(BM_Hio)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
