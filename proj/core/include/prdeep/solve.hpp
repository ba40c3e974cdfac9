#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "prdeep/denoise.hpp"
#include "prdeep/measurement.hpp"
#include "prdeep/noise.hpp"
#include "prdeep/red.hpp"

namespace prdeep {

// --- data-fidelity terms ----------------------------------------------------

/// 0.5 * sum (y_i - |z_i|)^2
double amp_loss(std::span<const double> y, std::span<const Complex> z);

/// z - y * z / |z|, with 0 wherever z_i = 0.
std::vector<Complex> amp_loss_subgrad(std::span<const Complex> z, std::span<const double> y);

/// 0.5 * sum (y_i^2 - |z_i|^2)^2
double intensity_loss(std::span<const double> y, std::span<const Complex> z);

/// 2 (|z|^2 - y^2) z
std::vector<Complex> intensity_loss_grad(std::span<const Complex> z, std::span<const double> y);

/// |y - |z||_2
double amplitude_residual(std::span<const double> y, std::span<const Complex> z);
double amplitude_residual(const MeasurementOp& op, const PhaselessData& data, const RealImage& x);

enum class DataTerm { Amplitude, Intensity };

/// What the backtracking test looks at.
///   Objective: F(x+) <= max_window F - c |dx|^2 / step, with F = f + R.
///   DataTerm:  f(x+) <= max_window f + <grad f, dx> + |dx|^2 / (2 step).
enum class LineSearch { Objective, DataTerm };

/// Gradient of the data term with respect to a real image: Re(A^H g(Ax)).
RealImage data_gradient(const MeasurementOp& op, const PhaselessData& data, const RealImage& x,
                        DataTerm term = DataTerm::Amplitude);

// --- forward-backward solver ------------------------------------------------

struct FastaOptions {
  std::size_t max_iters = 200;
  /// Initial step; 0 picks 1 / c where A^H A = c I.
  double step0 = 0.0;
  double shrink = 0.5;
  /// Non-monotone window M: a step is compared against the max of the last M objectives.
  std::size_t window = 10;
  /// Stop once |x_{t+1} - x_t| / |x_{t+1}| falls below this.
  double tol = 1e-6;
  bool adaptive_step = true;
  std::size_t max_backtracks = 20;
  /// c in F(x+) <= max_window F - c |dx|^2 / step.
  double sufficient_decrease = 1e-4;
  DataTerm data_term = DataTerm::Amplitude;
  LineSearch line_search = LineSearch::Objective;

  void validate() const;
};

struct TraceRecord {
  std::size_t iter = 0;
  double objective = 0.0;
  double residual = 0.0;
  double step = 0.0;
  bool accepted = true;
  std::size_t backtracks = 0;
};

struct SolverTrace {
  double initial_objective = 0.0;
  std::vector<TraceRecord> records;
};

/// CSV with header `iter,objective,residual,step,accepted`.
void write_trace_csv(std::ostream& out, const SolverTrace& trace);

enum class StopReason { MaxIters, Tolerance, Stalled };

struct FastaResult {
  /// Best iterate by objective (the initializer counts).
  RealImage x;
  double objective = 0.0;
  SolverTrace trace;
  StopReason reason = StopReason::MaxIters;
};

/// Raised when the objective stops being finite; carries the trace so far.
class SolverError : public NumericError {
 public:
  SolverError(const std::string& what, SolverTrace trace) : NumericError(what), trace_(std::move(trace)) {}
  const SolverTrace& trace() const { return trace_; }

 private:
  SolverTrace trace_;
};

/// Objective of the regularised problem: data term + red_value.
double prred_objective(const MeasurementOp& op, const PhaselessData& data, const RedConfig& red, const RealImage& x,
                       DataTerm term = DataTerm::Amplitude);

/// Forward-backward splitting for min_x f(x) + R(x):
///   x_{t+1} = prox_{step R}(x_t - step grad f(x_t))
/// where the RED prox is applied with weight step*lambda. Steps come from the
/// adaptive Barzilai-Borwein rule and are backtracked until the full objective
/// satisfies the non-monotone sufficient-decrease test.
FastaResult fasta_solve(const MeasurementOp& op, const PhaselessData& data, const RedConfig& red,
                        const RealImage& x0, const FastaOptions& opts = {});

// --- baselines --------------------------------------------------------------

/// 0/1 mask over the object domain (the oversampled frame for Fourier
/// operators, the image itself for CDP).
using SupportMask = Grid<unsigned char>;

struct HioOptions {
  double beta = 0.9;
  std::size_t iters = 1000;
  bool nonnegative = true;
  /// Unset: the known image window (Fourier) or every pixel (CDP).
  std::optional<SupportMask> support;

  void validate() const;
};

/// Default object-domain support for `op`.
SupportMask default_support(const MeasurementOp& op);

/// Fienup's hybrid input-output. Modulus substitution in the measurement
/// domain, then g <- g' where g' satisfies the object constraints and
/// g <- g - beta g' elsewhere. Returns the constraint projection of the last
/// modulus-projected estimate, cropped to the image.
RealImage hio_run(const PhaselessData& data, const MeasurementOp& op, const HioOptions& opts, const RealImage& x0);

struct WafOptions {
  std::size_t iters = 2000;
  /// 0 picks 1 / c where A^H A = c I.
  double step = 0.0;
};

/// Fixed-step gradient descent on the amplitude loss. Returns the last iterate.
RealImage waf_run(const PhaselessData& data, const MeasurementOp& op, const RealImage& x0, const WafOptions& opts = {});

// --- staged RED schedule ----------------------------------------------------

/// lambda = coefficient * sigma_w_bar. 1e-3 for both operator kinds.
double default_lambda_coefficient(OperatorKind kind);

struct PrDeepOptions {
  /// Per stage; max_iters defaults to 200.
  FastaOptions fasta{};
  /// Unset: default_lambda_coefficient(op.kind()).
  std::optional<double> lambda_coefficient;
  /// Absolute lambda, bypassing the sigma_w_bar rule.
  std::optional<double> lambda;
  std::size_t prox_inner_iters = 1;
  /// Clip to [0, 255] between stages.
  bool clamp_between_stages = false;
};

struct PrDeepResult {
  RealImage x;
  double lambda = 0.0;
  std::vector<SolverTrace> traces;
};

/// Runs fasta_solve once per bank stage, each warm-started from the previous one.
PrDeepResult prdeep_run(const PhaselessData& data, const MeasurementOp& op, const DenoiserBank& bank,
                        const RealImage& x0, const PrDeepOptions& opts = {});

}  // namespace prdeep
