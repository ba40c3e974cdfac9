#include "prdeep/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "prdeep/image_io.hpp"
#include "prdeep/metrics.hpp"

namespace prdeep {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

bool is_synthetic(const std::string& ref) { return ref.rfind("synthetic:", 0) == 0; }

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string alpha_tag(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

double lambda_for(const AlgorithmSpec& algo, const PhaselessData& data, const MeasurementOp& op) {
  if (algo.lambda) return *algo.lambda;
  if (data.alpha() <= 0.0) return 0.0;
  return algo.lambda_coefficient.value_or(default_lambda_coefficient(op.kind())) * data.sigma_w_bar();
}

Reconstruction run_from(const AlgorithmSpec& algo, const std::shared_ptr<const Denoiser>& denoiser,
                        const PhaselessData& data, const MeasurementOp& op, const RealImage& x0) {
  Reconstruction out;
  switch (algo.type) {
    case AlgorithmType::Hio: {
      HioOptions opts;
      opts.beta = algo.beta;
      opts.iters = algo.iters;
      opts.nonnegative = algo.nonnegative;
      out.x = hio_run(data, op, opts, x0);
      break;
    }
    case AlgorithmType::Waf:
      out.x = waf_run(data, op, x0, WafOptions{algo.iters, algo.step});
      break;
    case AlgorithmType::Fasta: {
      RedConfig red;
      red.lambda = lambda_for(algo, data, op);
      red.prox_inner_iters = algo.prox_inner_iters;
      red.denoiser = denoiser;
      red.sigma = algo.sigmas.front();
      FastaResult res = fasta_solve(op, data, red, x0, algo.fasta);
      out.x = std::move(res.x);
      out.traces.push_back(std::move(res.trace));
      break;
    }
    case AlgorithmType::PrDeep: {
      PrDeepOptions opts;
      opts.fasta = algo.fasta;
      opts.lambda_coefficient = algo.lambda_coefficient;
      opts.lambda = algo.lambda;
      opts.prox_inner_iters = algo.prox_inner_iters;
      opts.clamp_between_stages = algo.clamp_between_stages;
      PrDeepResult res = prdeep_run(data, op, DenoiserBank::with_schedule(denoiser, algo.sigmas), x0, opts);
      out.x = std::move(res.x);
      out.traces = std::move(res.traces);
      break;
    }
  }
  out.residual = amplitude_residual(op, data, out.x);
  return out;
}

}  // namespace

std::size_t select_lowest_residual(std::span<const double> residuals) {
  if (residuals.empty()) throw ParameterError("select_lowest_residual: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < residuals.size(); ++i) {
    if (residuals[i] < residuals[best]) best = i;
  }
  return best;
}

FourierInitResult fourier_init(const PhaselessData& data, const MeasurementOp& op, const FourierInitOptions& opts) {
  if (op.kind() != OperatorKind::FourierOs) throw ParameterError("fourier_init needs an oversampled Fourier operator");
  if (opts.screens == 0) throw ParameterError("fourier_init: screens must be positive");

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> pixel(0.0, 255.0);
  HioOptions hio;
  hio.beta = opts.beta;
  hio.nonnegative = opts.nonnegative;
  hio.iters = opts.screen_iters;

  FourierInitResult result;
  RealImage best;
  for (std::size_t s = 0; s < opts.screens; ++s) {
    RealImage start(op.image_shape());
    for (auto& v : start) v = pixel(rng);
    RealImage candidate = hio_run(data, op, hio, start);
    const double r = amplitude_residual(op, data, candidate);
    result.screen_residuals.push_back(r);
    if (s == 0 || r < result.screen_residuals[result.chosen]) {
      result.chosen = s;
      best = std::move(candidate);
    }
  }

  hio.iters = opts.final_iters;
  result.x = hio_run(data, op, hio, best);
  result.residual = amplitude_residual(op, data, result.x);
  return result;
}

std::string to_string(AlgorithmType type) {
  switch (type) {
    case AlgorithmType::Hio: return "hio";
    case AlgorithmType::Waf: return "waf";
    case AlgorithmType::Fasta: return "fasta";
    case AlgorithmType::PrDeep: return "prdeep";
  }
  return "unknown";
}

AlgorithmType algorithm_type_from_string(const std::string& name) {
  for (auto t : {AlgorithmType::Hio, AlgorithmType::Waf, AlgorithmType::Fasta, AlgorithmType::PrDeep}) {
    if (to_string(t) == name) return t;
  }
  throw ParameterError("unknown algorithm type '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (op.shape.size() == 0) throw ParameterError("operator shape must be non-empty");
  for (double a : alphas) {
    if (!(std::isfinite(a) && a >= 0.0)) throw ParameterError("alphas must be finite and nonnegative");
  }
  if (restarts == 0) throw ParameterError("restarts must be at least 1");
  if (workers == 0) throw ParameterError("workers must be at least 1");
  if (fourier_init.screens == 0) throw ParameterError("fourier_init.screens must be at least 1");

  std::set<std::string> names;
  for (const auto& a : algorithms) {
    if (a.name.empty()) throw ParameterError("algorithm name must be non-empty");
    if (!names.insert(a.name).second) throw ParameterError("duplicate algorithm name '" + a.name + "'");
    if (a.type == AlgorithmType::Fasta || a.type == AlgorithmType::PrDeep) {
      if (a.sigmas.empty()) throw ParameterError(a.name + ": sigma schedule is empty");
      a.fasta.validate();
    }
    if (a.type == AlgorithmType::Hio && !(a.beta > 0.0 && a.beta <= 1.0)) {
      throw ParameterError(a.name + ": beta must lie in (0, 1]");
    }
  }
  for (const auto& ref : images) {
    if (!is_synthetic(ref) && !std::filesystem::exists(ref)) throw ParameterError("image not found: " + ref);
  }
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;
  cfg.op.kind = OperatorKind::Cdp;
  cfg.op.shape = {64, 64};
  cfg.op.mask_count = 4;
  cfg.op.seed = 7;
  cfg.alphas = {9.0, 27.0, 81.0};
  cfg.images = {"synthetic:shapes:1", "synthetic:texture:2", "synthetic:cells:3", "synthetic:galaxy:4"};

  AlgorithmSpec hio;
  hio.name = "hio";
  hio.type = AlgorithmType::Hio;
  hio.iters = 1000;

  AlgorithmSpec prdeep;
  prdeep.name = "prdeep-tv";
  prdeep.type = AlgorithmType::PrDeep;
  prdeep.denoiser.kind = DenoiserKind::Tv;
  prdeep.denoiser.name = "tv";

  cfg.algorithms = {hio, prdeep};
  return cfg;
}

std::uint64_t cell_noise_seed(const ExperimentConfig& cfg, std::size_t image_index, std::size_t alpha_index) {
  return mix(mix(cfg.noise_seed, image_index), alpha_index);
}

std::uint64_t cell_init_seed(const ExperimentConfig& cfg, std::uint64_t noise_seed) {
  return mix(cfg.init_seed, noise_seed);
}

Reconstruction reconstruct(const AlgorithmSpec& algo, std::shared_ptr<const Denoiser> denoiser,
                           const PhaselessData& data, const MeasurementOp& op, const ExperimentConfig& cfg,
                           std::uint64_t init_seed) {
  if (op.kind() == OperatorKind::Cdp) return run_from(algo, denoiser, data, op, RealImage(op.image_shape(), 1.0));

  Reconstruction best;
  best.residual = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    FourierInitOptions init = cfg.fourier_init;
    init.seed = mix(init_seed, r);
    FourierInitResult start = fourier_init(data, op, init);
    // HIO on Fourier data is the initialisation protocol itself.
    Reconstruction run = algo.type == AlgorithmType::Hio ? Reconstruction{std::move(start.x), start.residual, {}}
                                                         : run_from(algo, denoiser, data, op, start.x);
    if (r == 0 || run.residual < best.residual) best = std::move(run);
  }
  return best;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "image,algorithm,alpha,psnr_db,runtime_s,residual,seed,status\n";
  for (const auto& row : rows) {
    out << csv_field(row.image) << ',' << csv_field(row.algorithm) << ',' << format_number(row.alpha) << ','
        << format_number(row.psnr) << ',' << format_number(row.runtime_seconds) << ','
        << format_number(row.residual) << ',' << row.seed << ',' << csv_field(row.status) << '\n';
  }
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const MeasurementOp op = MeasurementOp::from_spec(cfg.op);

  std::vector<std::shared_ptr<const Denoiser>> denoisers;
  for (const auto& a : cfg.algorithms) {
    const bool needs = a.type == AlgorithmType::Fasta || a.type == AlgorithmType::PrDeep;
    denoisers.push_back(needs ? make_denoiser(a.denoiser) : nullptr);
  }

  std::vector<RealImage> truths;
  for (const auto& ref : cfg.images) truths.push_back(resolve_image(ref, cfg.op.shape));

  const std::size_t n_alg = cfg.algorithms.size();
  const std::size_t n_alpha = cfg.alphas.size();
  const std::size_t cells = cfg.images.size() * n_alpha * n_alg;
  std::vector<MetricsRow> rows(cells);

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir / "recon");
    std::filesystem::create_directories(cfg.output_dir / "traces");
  }

  const std::optional<Shape> frame =
      op.as_fourier() ? std::optional<Shape>(op.as_fourier()->frame_shape()) : std::nullopt;
  const Ambiguity ambiguity = op.as_fourier() ? Ambiguity::Fourier : Ambiguity::None;

  auto run_cell = [&](std::size_t cell) {
    const std::size_t ai = cell % n_alg;
    const std::size_t pi = (cell / n_alg) % n_alpha;
    const std::size_t ii = cell / (n_alg * n_alpha);
    const AlgorithmSpec& algo = cfg.algorithms[ai];

    MetricsRow& row = rows[cell];
    row.image = image_id(cfg.images[ii]);
    row.algorithm = algo.name;
    row.alpha = cfg.alphas[pi];
    row.seed = cell_noise_seed(cfg, ii, pi);
    row.psnr = std::numeric_limits<double>::quiet_NaN();
    row.residual = std::numeric_limits<double>::quiet_NaN();

    const auto t0 = std::chrono::steady_clock::now();
    try {
      const PhaselessData data = sample_shot_noise(op.forward(truths[ii]), row.alpha, row.seed);
      Reconstruction rec = reconstruct(algo, denoisers[ai], data, op, cfg, cell_init_seed(cfg, row.seed));
      row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      row.residual = rec.residual;
      AlignedPsnr scored = align_and_psnr(rec.x, truths[ii], ambiguity, frame);
      row.psnr = scored.psnr;

      if (!cfg.output_dir.empty()) {
        const std::string stem = row.image + "__" + algo.name + "__a" + alpha_tag(row.alpha);
        save_pgm(cfg.output_dir / "recon" / (stem + ".pgm"), scored.aligned);
        for (std::size_t s = 0; s < rec.traces.size(); ++s) {
          std::ofstream trace(cfg.output_dir / "traces" / (stem + "__stage" + std::to_string(s) + ".csv"));
          write_trace_csv(trace, rec.traces[s]);
        }
      }
    } catch (const std::exception& e) {
      row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      row.status = std::string("error: ") + e.what();
    }
  };

  const std::size_t workers = std::min(cfg.workers, std::max<std::size_t>(cells, 1));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t cell = next++; cell < cells; cell = next++) run_cell(cell);
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  return rows;
}

}  // namespace prdeep
