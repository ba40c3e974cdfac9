#include <fstream>

#include "prdeep/experiment.hpp"

namespace prdeep {
namespace {

using nlohmann::json;

json shape_json(Shape s) { return json::array({s.height, s.width}); }

Shape shape_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParameterError("shape must be a [height, width] array");
  return Shape{j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end()) {
    if (it->is_null()) out.reset();
    else out = it->get<T>();
  }
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json fasta_json(const FastaOptions& o) {
  return json{{"max_iters", o.max_iters},
           {"step0", o.step0},
           {"shrink", o.shrink},
           {"window", o.window},
           {"tol", o.tol},
           {"adaptive_step", o.adaptive_step},
           {"max_backtracks", o.max_backtracks},
           {"sufficient_decrease", o.sufficient_decrease},
           {"data_term", o.data_term == DataTerm::Amplitude ? "amplitude" : "intensity"},
           {"line_search", o.line_search == LineSearch::Objective ? "objective" : "data_term"}};
}

void read_fasta(const json& j, FastaOptions& o) {
  o.max_iters = j.value("max_iters", o.max_iters);
  o.step0 = j.value("step0", o.step0);
  o.shrink = j.value("shrink", o.shrink);
  o.window = j.value("window", o.window);
  o.tol = j.value("tol", o.tol);
  o.adaptive_step = j.value("adaptive_step", o.adaptive_step);
  o.max_backtracks = j.value("max_backtracks", o.max_backtracks);
  o.sufficient_decrease = j.value("sufficient_decrease", o.sufficient_decrease);
  const std::string term = j.value("data_term", std::string("amplitude"));
  if (term == "amplitude") o.data_term = DataTerm::Amplitude;
  else if (term == "intensity") o.data_term = DataTerm::Intensity;
  else throw ParameterError("unknown data_term '" + term + "'");
  const std::string search = j.value("line_search", std::string("objective"));
  if (search == "objective") o.line_search = LineSearch::Objective;
  else if (search == "data_term") o.line_search = LineSearch::DataTerm;
  else throw ParameterError("unknown line_search '" + search + "'");
}

}  // namespace

void to_json(json& j, const OperatorSpec& spec) {
  j = json{{"type", to_string(spec.kind)}, {"shape", shape_json(spec.shape)}};
  if (spec.kind == OperatorKind::Cdp) {
    j["K"] = spec.mask_count;
    j["seed"] = spec.seed;
  } else {
    const Shape frame = spec.frame.size() == 0 ? Shape{2 * spec.shape.height, 2 * spec.shape.width} : spec.frame;
    j["frame"] = shape_json(frame);
    if (spec.has_offset) j["offset"] = json::array({spec.offset.row, spec.offset.col});
  }
}

void from_json(const json& j, OperatorSpec& spec) {
  spec.kind = operator_kind_from_string(j.at("type").get<std::string>());
  spec.shape = shape_from(j.at("shape"));
  spec.mask_count = j.value("K", spec.mask_count);
  spec.seed = j.value("seed", spec.seed);
  if (auto it = j.find("frame"); it != j.end()) spec.frame = shape_from(*it);
  if (auto it = j.find("offset"); it != j.end()) {
    if (!it->is_array() || it->size() != 2) throw ParameterError("offset must be a [row, col] array");
    spec.has_offset = true;
    spec.offset = Offset{it->at(0).get<std::size_t>(), it->at(1).get<std::size_t>()};
  }
}

void to_json(json& j, const DenoiserSpec& spec) {
  j = json{{"kind", to_string(spec.kind)}};
  if (!spec.name.empty()) j["name"] = spec.name;
  switch (spec.kind) {
    case DenoiserKind::Identity: break;
    case DenoiserKind::Median: j["radius"] = spec.median_radius; break;
    case DenoiserKind::GaussianBlur: j["width"] = spec.blur_width; break;
    case DenoiserKind::Tv:
      j["strength_per_sigma"] = spec.tv.strength_per_sigma;
      j["max_iters"] = spec.tv.max_iters;
      j["gap_tol"] = spec.tv.gap_tol;
      j["step"] = spec.tv.step;
      break;
    case DenoiserKind::Nlm:
      j["patch_radius"] = spec.nlm.patch_radius;
      j["search_radius"] = spec.nlm.search_radius;
      j["h_per_sigma"] = spec.nlm.h_per_sigma;
      break;
    case DenoiserKind::External:
      j["command"] = spec.command;
      j["timeout_ms"] = spec.timeout.count();
      break;
  }
}

void from_json(const json& j, DenoiserSpec& spec) {
  spec.kind = denoiser_kind_from_string(j.at("kind").get<std::string>());
  spec.name = j.value("name", std::string{});
  spec.median_radius = j.value("radius", spec.median_radius);
  spec.blur_width = j.value("width", spec.blur_width);
  spec.tv.strength_per_sigma = j.value("strength_per_sigma", spec.tv.strength_per_sigma);
  spec.tv.max_iters = j.value("max_iters", spec.tv.max_iters);
  spec.tv.gap_tol = j.value("gap_tol", spec.tv.gap_tol);
  spec.tv.step = j.value("step", spec.tv.step);
  spec.nlm.patch_radius = j.value("patch_radius", spec.nlm.patch_radius);
  spec.nlm.search_radius = j.value("search_radius", spec.nlm.search_radius);
  spec.nlm.h_per_sigma = j.value("h_per_sigma", spec.nlm.h_per_sigma);
  spec.command = j.value("command", spec.command);
  spec.timeout = std::chrono::milliseconds(j.value("timeout_ms", spec.timeout.count()));
  if (spec.kind == DenoiserKind::External && spec.command.empty()) {
    throw ParameterError("external denoiser needs a non-empty command");
  }
}

void to_json(json& j, const AlgorithmSpec& spec) {
  j = json{{"name", spec.name}, {"type", to_string(spec.type)}};
  switch (spec.type) {
    case AlgorithmType::Hio:
      j["iters"] = spec.iters;
      j["beta"] = spec.beta;
      j["nonnegative"] = spec.nonnegative;
      break;
    case AlgorithmType::Waf:
      j["iters"] = spec.iters;
      j["step"] = spec.step;
      break;
    case AlgorithmType::Fasta:
    case AlgorithmType::PrDeep:
      j["denoiser"] = spec.denoiser;
      if (spec.type == AlgorithmType::Fasta) j["sigma"] = spec.sigmas.empty() ? 0.0 : spec.sigmas.front();
      else j["sigmas"] = spec.sigmas;
      j["fasta"] = fasta_json(spec.fasta);
      j["lambda_coefficient"] = optional_json(spec.lambda_coefficient);
      j["lambda"] = optional_json(spec.lambda);
      j["prox_inner_iters"] = spec.prox_inner_iters;
      j["clamp_between_stages"] = spec.clamp_between_stages;
      break;
  }
}

void from_json(const json& j, AlgorithmSpec& spec) {
  spec.type = algorithm_type_from_string(j.at("type").get<std::string>());
  spec.name = j.value("name", to_string(spec.type));
  spec.iters = j.value("iters", spec.type == AlgorithmType::Waf ? std::size_t{2000} : spec.iters);
  spec.beta = j.value("beta", spec.beta);
  spec.nonnegative = j.value("nonnegative", spec.nonnegative);
  spec.step = j.value("step", spec.step);
  if (auto it = j.find("denoiser"); it != j.end()) spec.denoiser = it->get<DenoiserSpec>();
  if (auto it = j.find("fasta"); it != j.end()) read_fasta(*it, spec.fasta);
  if (auto it = j.find("sigmas"); it != j.end()) spec.sigmas = it->get<std::vector<double>>();
  if (auto it = j.find("sigma"); it != j.end()) spec.sigmas = {it->get<double>()};
  read_optional(j, "lambda_coefficient", spec.lambda_coefficient);
  read_optional(j, "lambda", spec.lambda);
  spec.prox_inner_iters = j.value("prox_inner_iters", spec.prox_inner_iters);
  spec.clamp_between_stages = j.value("clamp_between_stages", spec.clamp_between_stages);
}

void to_json(json& j, const ExperimentConfig& cfg) {
  j = json{{"operator", cfg.op},
           {"alphas", cfg.alphas},
           {"images", cfg.images},
           {"algorithms", cfg.algorithms},
           {"seeds", {{"noise", cfg.noise_seed}, {"init", cfg.init_seed}}},
           {"restarts", cfg.restarts},
           {"fourier_init",
            {{"screens", cfg.fourier_init.screens},
             {"screen_iters", cfg.fourier_init.screen_iters},
             {"final_iters", cfg.fourier_init.final_iters},
             {"beta", cfg.fourier_init.beta},
             {"nonnegative", cfg.fourier_init.nonnegative}}},
           {"output_dir", cfg.output_dir.string()},
           {"workers", cfg.workers}};
}

void from_json(const json& j, ExperimentConfig& cfg) {
  cfg.op = j.at("operator").get<OperatorSpec>();
  cfg.alphas = j.value("alphas", std::vector<double>{});
  cfg.images = j.value("images", std::vector<std::string>{});
  cfg.algorithms = j.value("algorithms", std::vector<AlgorithmSpec>{});
  const auto& seeds = j.at("seeds");
  cfg.noise_seed = seeds.at("noise").get<std::uint64_t>();
  cfg.init_seed = seeds.at("init").get<std::uint64_t>();
  cfg.restarts = j.value("restarts", cfg.restarts);
  if (auto it = j.find("fourier_init"); it != j.end()) {
    cfg.fourier_init.screens = it->value("screens", cfg.fourier_init.screens);
    cfg.fourier_init.screen_iters = it->value("screen_iters", cfg.fourier_init.screen_iters);
    cfg.fourier_init.final_iters = it->value("final_iters", cfg.fourier_init.final_iters);
    cfg.fourier_init.beta = it->value("beta", cfg.fourier_init.beta);
    cfg.fourier_init.nonnegative = it->value("nonnegative", cfg.fourier_init.nonnegative);
  }
  cfg.output_dir = j.value("output_dir", std::string{});
  cfg.workers = j.value("workers", cfg.workers);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg = j.get<ExperimentConfig>();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace prdeep
