#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prdeep/denoise.hpp"
#include "prdeep/measurement.hpp"
#include "prdeep/noise.hpp"
#include "prdeep/solve.hpp"

namespace prdeep {

// --- Fourier initialisation -------------------------------------------------

struct FourierInitOptions {
  std::size_t screens = 50;
  std::size_t screen_iters = 50;
  std::size_t final_iters = 1000;
  double beta = 0.9;
  bool nonnegative = true;
  std::uint64_t seed = 0;
};

struct FourierInitResult {
  RealImage x;
  double residual = 0.0;
  std::vector<double> screen_residuals;
  std::size_t chosen = 0;
};

/// Index of the smallest residual; ties go to the lowest index.
std::size_t select_lowest_residual(std::span<const double> residuals);

/// Screens `screens` random nonnegative starts with short HIO runs, keeps the
/// one with the lowest amplitude residual and refines it with a long HIO run.
FourierInitResult fourier_init(const PhaselessData& data, const MeasurementOp& op, const FourierInitOptions& opts);

// --- experiment grid ---------------------------------------------------------

enum class AlgorithmType { Hio, Waf, Fasta, PrDeep };

std::string to_string(AlgorithmType type);
AlgorithmType algorithm_type_from_string(const std::string& name);

struct AlgorithmSpec {
  /// Label used in outputs, e.g. "prdeep-tv".
  std::string name;
  AlgorithmType type = AlgorithmType::Hio;

  // hio
  double beta = 0.9;
  bool nonnegative = true;
  // hio / waf iteration count; fasta and prdeep use fasta.max_iters per stage
  std::size_t iters = 1000;
  double step = 0.0;

  // fasta / prdeep
  FastaOptions fasta{};
  DenoiserSpec denoiser{};
  std::vector<double> sigmas{kDefaultSigmaSchedule.begin(), kDefaultSigmaSchedule.end()};
  std::optional<double> lambda_coefficient;
  std::optional<double> lambda;
  std::size_t prox_inner_iters = 1;
  bool clamp_between_stages = false;
};

struct ExperimentConfig {
  OperatorSpec op{};
  std::vector<double> alphas;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::string> images;
  std::uint64_t noise_seed = 1;
  std::uint64_t init_seed = 2;
  /// Fourier pipeline restarts; the lowest-residual run is scored.
  std::size_t restarts = 3;
  FourierInitOptions fourier_init{};
  std::filesystem::path output_dir;
  std::size_t workers = 1;

  void validate() const;
};

/// Reference configuration with every field spelled out.
ExperimentConfig default_experiment_config();

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);
void to_json(nlohmann::json& j, const OperatorSpec& spec);
void from_json(const nlohmann::json& j, OperatorSpec& spec);
void to_json(nlohmann::json& j, const AlgorithmSpec& spec);
void from_json(const nlohmann::json& j, AlgorithmSpec& spec);
void to_json(nlohmann::json& j, const DenoiserSpec& spec);
void from_json(const nlohmann::json& j, DenoiserSpec& spec);

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct MetricsRow {
  std::string image;
  std::string algorithm;
  double alpha = 0.0;
  double psnr = 0.0;
  double runtime_seconds = 0.0;
  double residual = 0.0;
  std::uint64_t seed = 0;
  /// "ok" or "error: <message>".
  std::string status = "ok";
};

/// CSV with header image,algorithm,alpha,psnr_db,runtime_s,residual,seed,status.
/// Infinite PSNR is written as "inf".
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

/// Seed used to simulate the measurements of one (image, alpha) cell.
std::uint64_t cell_noise_seed(const ExperimentConfig& cfg, std::size_t image_index, std::size_t alpha_index);
/// Seed for the random initialisations of that cell.
std::uint64_t cell_init_seed(const ExperimentConfig& cfg, std::uint64_t noise_seed);

/// Result of one algorithm on one measurement set, before scoring.
struct Reconstruction {
  RealImage x;
  double residual = 0.0;
  std::vector<SolverTrace> traces;
};

/// Runs one algorithm the way the benchmark does: ones initialisation for
/// CDP; for Fourier, `restarts` x (fourier_init + algorithm) keeping the
/// lowest residual.
Reconstruction reconstruct(const AlgorithmSpec& algo, std::shared_ptr<const Denoiser> denoiser,
                           const PhaselessData& data, const MeasurementOp& op, const ExperimentConfig& cfg,
                           std::uint64_t init_seed);

/// Runs every (image, alpha, algorithm) cell. Failures are recorded in the
/// row status and do not stop the grid. Rows come back in grid order.
/// When cfg.output_dir is set, reconstructions (PGM) and traces (CSV) are written there.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg);

}  // namespace prdeep
