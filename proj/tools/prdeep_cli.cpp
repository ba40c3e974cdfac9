// prdeep command line: simulate, recover, bench, denoise-test.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include <nlohmann/json.hpp>

#include "prdeep/denoise.hpp"
#include "prdeep/experiment.hpp"
#include "prdeep/external_denoiser.hpp"
#include "prdeep/image_io.hpp"
#include "prdeep/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace prdeep;

namespace {

std::string alpha_tag(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

void dump_config_defaults() { std::cout << json(default_experiment_config()).dump(2) << '\n'; }

void require(bool ok, const std::string& what) {
  if (!ok) throw CLI::ValidationError(what + " is required (or pass --dump-defaults)");
}

const AlgorithmSpec& find_algorithm(const ExperimentConfig& cfg, const std::string& name) {
  for (const auto& a : cfg.algorithms) {
    if (a.name == name) return a;
  }
  std::string known;
  for (const auto& a : cfg.algorithms) known += (known.empty() ? "" : ", ") + a.name;
  throw ParameterError("algorithm '" + name + "' is not in the config (have: " + known + ")");
}

int cmd_simulate(const fs::path& config_path, const fs::path& out) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  const MeasurementOp op = MeasurementOp::from_spec(cfg.op);
  fs::create_directories(out);

  json entries = json::array();
  for (std::size_t i = 0; i < cfg.images.size(); ++i) {
    const RealImage truth = resolve_image(cfg.images[i], cfg.op.shape);
    const std::string id = image_id(cfg.images[i]);
    save_pgm(out / (id + ".pgm"), truth);
    const MeasurementVector z = op.forward(truth);
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
      const std::uint64_t seed = cell_noise_seed(cfg, i, a);
      const PhaselessData data = sample_shot_noise(z, cfg.alphas[a], seed);
      const std::string file = id + "__a" + alpha_tag(cfg.alphas[a]) + ".pryd";
      write_phaseless(out / file, data);
      entries.push_back({{"image", id}, {"alpha", cfg.alphas[a]}, {"seed", seed}, {"data", file},
                         {"truth", id + ".pgm"}});
      std::cerr << "simulated " << file << " (sigma_w_bar " << data.sigma_w_bar() << ")\n";
    }
  }
  std::ofstream(out / "manifest.json") << json{{"operator", cfg.op}, {"entries", entries}}.dump(2) << '\n';
  return 0;
}

int cmd_recover(const fs::path& config_path, const std::string& algo_name, const fs::path& in, const fs::path& out) {
  const ExperimentConfig cfg = load_experiment_config(config_path);
  const AlgorithmSpec& algo = find_algorithm(cfg, algo_name);
  const MeasurementOp op = MeasurementOp::from_spec(cfg.op);

  std::ifstream manifest_in(in / "manifest.json");
  if (!manifest_in) throw FormatError("no manifest.json in " + in.string());
  const json manifest = json::parse(manifest_in);
  if (manifest.at("operator") != json(cfg.op)) {
    throw ParameterError("operator in config differs from the one used to simulate " + in.string());
  }

  const bool needs_denoiser = algo.type == AlgorithmType::Fasta || algo.type == AlgorithmType::PrDeep;
  const auto denoiser = needs_denoiser ? make_denoiser(algo.denoiser) : nullptr;
  const std::optional<Shape> frame =
      op.as_fourier() ? std::optional<Shape>(op.as_fourier()->frame_shape()) : std::nullopt;
  const Ambiguity ambiguity = op.as_fourier() ? Ambiguity::Fourier : Ambiguity::None;

  fs::create_directories(out);
  std::vector<MetricsRow> rows;
  for (const auto& entry : manifest.at("entries")) {
    MetricsRow row;
    row.image = entry.at("image").get<std::string>();
    row.algorithm = algo.name;
    row.alpha = entry.at("alpha").get<double>();
    row.seed = entry.at("seed").get<std::uint64_t>();
    row.psnr = row.residual = std::numeric_limits<double>::quiet_NaN();
    const std::string stem = row.image + "__" + algo.name + "__a" + alpha_tag(row.alpha);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const PhaselessData data = read_phaseless(in / entry.at("data").get<std::string>());
      Reconstruction rec = reconstruct(algo, denoiser, data, op, cfg, cell_init_seed(cfg, row.seed));
      row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      row.residual = rec.residual;
      const RealImage truth = load_image(in / entry.at("truth").get<std::string>());
      const AlignedPsnr scored = align_and_psnr(rec.x, truth, ambiguity, frame);
      row.psnr = scored.psnr;
      save_pgm(out / (stem + ".pgm"), scored.aligned);
      for (std::size_t s = 0; s < rec.traces.size(); ++s) {
        std::ofstream trace(out / (stem + "__stage" + std::to_string(s) + ".csv"));
        write_trace_csv(trace, rec.traces[s]);
      }
    } catch (const std::exception& e) {
      row.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      row.status = std::string("error: ") + e.what();
    }
    std::cerr << stem << ": psnr " << row.psnr << " dB, residual " << row.residual << ", " << row.runtime_seconds
              << " s" << (row.status == "ok" ? "" : " [" + row.status + "]") << '\n';
    rows.push_back(std::move(row));
  }
  std::ofstream csv(out / "metrics.csv");
  write_metrics_csv(csv, rows);
  return 0;
}

int cmd_bench(const fs::path& config_path, const fs::path& out, const std::string& artifacts,
              std::size_t workers) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  if (!artifacts.empty()) cfg.output_dir = artifacts;
  if (workers > 0) cfg.workers = workers;
  const auto rows = run_experiment(cfg);

  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream csv(out);
  if (!csv) throw FormatError("cannot write " + out.string());
  write_metrics_csv(csv, rows);

  std::size_t failures = 0;
  for (const auto& r : rows) {
    if (r.status != "ok") ++failures;
    std::cerr << r.image << " " << r.algorithm << " alpha=" << r.alpha << ": " << r.psnr << " dB ("
              << r.runtime_seconds << " s) " << r.status << '\n';
  }
  std::cerr << rows.size() << " cells, " << failures << " failed\n";
  return 0;
}

void dump_denoiser_defaults() {
  json out = json::object();
  for (auto kind : {DenoiserKind::Identity, DenoiserKind::Median, DenoiserKind::GaussianBlur, DenoiserKind::Tv,
                    DenoiserKind::Nlm}) {
    DenoiserSpec spec;
    spec.kind = kind;
    out[to_string(kind)] = spec;
  }
  std::cout << out.dump(2) << '\n';
}

int cmd_denoise_test(const std::string& name, double sigma, const fs::path& in, const fs::path& out,
                     const std::vector<std::string>& command, const std::string& reference) {
  std::shared_ptr<const Denoiser> denoiser;
  if (!command.empty()) {
    denoiser = std::make_shared<ExternalDenoiser>(command, std::chrono::milliseconds(30000), name);
  } else {
    const auto registry = DenoiserRegistry::builtin();
    if (!registry.contains(name)) {
      std::string known;
      for (const auto& n : registry.names()) known += (known.empty() ? "" : ", ") + n;
      throw ParameterError("unknown denoiser '" + name + "' (have: " + known + "; use --command for plugins)");
    }
    denoiser = registry.get(name);
  }

  const RealImage x = load_image(in);
  const auto t0 = std::chrono::steady_clock::now();
  const RealImage y = (*denoiser)(x, sigma);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save_pgm(out, y);
  std::cerr << denoiser->name() << " sigma=" << sigma << " " << x.shape().height << "x" << x.shape().width << " in "
            << seconds << " s\n";
  if (!reference.empty()) {
    const RealImage ref = load_image(reference);
    std::cout << "psnr_in " << psnr(x, ref) << " psnr_out " << psnr(y, ref) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prdeep: phase retrieval with regularization by denoising"};
  app.require_subcommand(1);

  std::string config, out, in, algo, artifacts, denoiser_name, reference;
  std::vector<std::string> command;
  double sigma = 25.0;
  std::size_t workers = 0;
  bool dump = false;

  auto* sim = app.add_subcommand("simulate", "Simulate noisy phaseless measurements for every image and alpha");
  sim->add_option("--config", config, "Experiment config (JSON)");
  sim->add_option("--out", out, "Output directory");
  sim->add_flag("--dump-defaults", dump, "Print the default config and exit");

  auto* rec = app.add_subcommand("recover", "Run one algorithm on simulated measurements");
  rec->add_option("--config", config, "Experiment config (JSON)");
  rec->add_option("--algo", algo, "Algorithm name from the config");
  rec->add_option("--in", in, "Directory written by simulate");
  rec->add_option("--out", out, "Output directory");
  rec->add_flag("--dump-defaults", dump, "Print the default config and exit");

  auto* bench = app.add_subcommand("bench", "Run the full image x alpha x algorithm grid");
  bench->add_option("--config", config, "Experiment config (JSON)");
  bench->add_option("--out", out, "Metrics CSV");
  bench->add_option("--artifacts", artifacts, "Directory for reconstructions and traces (overrides output_dir)");
  bench->add_option("--workers", workers, "Worker threads (overrides config)");
  bench->add_flag("--dump-defaults", dump, "Print the default config and exit");

  auto* dt = app.add_subcommand("denoise-test", "Apply one denoiser to an image");
  dt->add_option("--denoiser", denoiser_name, "Builtin denoiser name, or a label for --command");
  dt->add_option("--sigma", sigma, "Noise level on the [0, 255] scale")->check(CLI::NonNegativeNumber);
  dt->add_option("--in", in, "Input PGM or PNG");
  dt->add_option("--out", out, "Output PGM");
  dt->add_option("--command", command, "Run an external PRDN1 plugin instead of a builtin")->expected(1, -1);
  dt->add_option("--reference", reference, "Clean image; prints PSNR before and after");
  dt->add_flag("--dump-defaults", dump, "Print builtin denoiser settings and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      if (dump) return dump_config_defaults(), 0;
      require(!config.empty(), "--config");
      require(!out.empty(), "--out");
      return cmd_simulate(config, out);
    }
    if (rec->parsed()) {
      if (dump) return dump_config_defaults(), 0;
      require(!config.empty(), "--config");
      require(!algo.empty(), "--algo");
      require(!in.empty(), "--in");
      require(!out.empty(), "--out");
      return cmd_recover(config, algo, in, out);
    }
    if (bench->parsed()) {
      if (dump) return dump_config_defaults(), 0;
      require(!config.empty(), "--config");
      require(!out.empty(), "--out");
      return cmd_bench(config, out, artifacts, workers);
    }
    if (dump) return dump_denoiser_defaults(), 0;
    require(!denoiser_name.empty(), "--denoiser");
    require(!in.empty(), "--in");
    require(!out.empty(), "--out");
    return cmd_denoise_test(denoiser_name, sigma, in, out, command, reference);
  } catch (const CLI::ValidationError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
