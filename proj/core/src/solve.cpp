#include "prdeep/solve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

namespace prdeep {
namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ShapeError(std::string(what) + ": length mismatch");
}

double data_term_value(std::span<const double> y, std::span<const Complex> z, DataTerm term) {
  return term == DataTerm::Amplitude ? amp_loss(y, z) : intensity_loss(y, z);
}

std::vector<Complex> data_term_grad(std::span<const Complex> z, std::span<const double> y, DataTerm term) {
  return term == DataTerm::Amplitude ? amp_loss_subgrad(z, y) : intensity_loss_grad(z, y);
}

RealImage real_adjoint(const MeasurementOp& op, std::span<const Complex> g) { return real_part(op.adjoint(g)); }

double squared_distance(const RealImage& a, const RealImage& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc;
}

}  // namespace

double amp_loss(std::span<const double> y, std::span<const Complex> z) {
  check_lengths(y.size(), z.size(), "amp_loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - std::abs(z[i]);
    acc += r * r;
  }
  return 0.5 * acc;
}

std::vector<Complex> amp_loss_subgrad(std::span<const Complex> z, std::span<const double> y) {
  check_lengths(y.size(), z.size(), "amp_loss_subgrad");
  std::vector<Complex> g(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double mag = std::abs(z[i]);
    g[i] = mag > 0.0 ? z[i] - y[i] * (z[i] / mag) : Complex{};
  }
  return g;
}

double intensity_loss(std::span<const double> y, std::span<const Complex> z) {
  check_lengths(y.size(), z.size(), "intensity_loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] * y[i] - std::norm(z[i]);
    acc += r * r;
  }
  return 0.5 * acc;
}

std::vector<Complex> intensity_loss_grad(std::span<const Complex> z, std::span<const double> y) {
  check_lengths(y.size(), z.size(), "intensity_loss_grad");
  std::vector<Complex> g(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) g[i] = 2.0 * (std::norm(z[i]) - y[i] * y[i]) * z[i];
  return g;
}

double amplitude_residual(std::span<const double> y, std::span<const Complex> z) { return std::sqrt(2.0 * amp_loss(y, z)); }

double amplitude_residual(const MeasurementOp& op, const PhaselessData& data, const RealImage& x) {
  return amplitude_residual(data.y(), op.forward(x));
}

RealImage data_gradient(const MeasurementOp& op, const PhaselessData& data, const RealImage& x, DataTerm term) {
  const auto z = op.forward(x);
  return real_adjoint(op, data_term_grad(z, data.y(), term));
}

void FastaOptions::validate() const {
  if (max_iters < 1) throw ParameterError("FASTA needs max_iters >= 1");
  if (!(shrink > 0.0 && shrink < 1.0)) throw ParameterError("FASTA backtracking shrink must lie in (0, 1)");
  if (window < 1) throw ParameterError("FASTA non-monotone window must be >= 1");
  if (!(step0 >= 0.0)) throw ParameterError("FASTA initial step must be >= 0");
  if (!(sufficient_decrease >= 0.0)) throw ParameterError("FASTA sufficient-decrease constant must be >= 0");
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace) {
  out << "iter,objective,residual,step,accepted\n";
  out.precision(17);
  for (const auto& r : trace.records) {
    out << r.iter << ',' << r.objective << ',' << r.residual << ',' << r.step << ',' << (r.accepted ? 1 : 0) << '\n';
  }
}

double prred_objective(const MeasurementOp& op, const PhaselessData& data, const RedConfig& red, const RealImage& x,
                       DataTerm term) {
  return data_term_value(data.y(), op.forward(x), term) + red_value(x, red);
}

FastaResult fasta_solve(const MeasurementOp& op, const PhaselessData& data, const RedConfig& red,
                        const RealImage& x0, const FastaOptions& opts) {
  opts.validate();
  red.validate();
  if (x0.shape() != op.image_shape()) throw ShapeError("fasta_solve: initializer shape does not match operator");
  if (data.size() != op.measurement_size()) throw ShapeError("fasta_solve: data length does not match operator");
  if (!all_finite(x0.values())) throw NumericError("fasta_solve: initializer is not finite");

  const auto y = data.y();
  const bool smooth_only = opts.line_search == LineSearch::DataTerm;
  RealImage x = x0;
  auto z = op.forward(x);
  double data_value = data_term_value(y, z, opts.data_term);
  double objective = data_value + red_value(x, red);

  FastaResult result;
  result.trace.initial_objective = objective;
  if (!std::isfinite(objective)) throw SolverError("fasta_solve: initial objective is not finite", result.trace);

  RealImage grad = real_adjoint(op, data_term_grad(z, y, opts.data_term));
  double step = opts.step0 > 0.0 ? opts.step0 : 1.0 / op.gram_scale();

  // Values the non-monotone test compares against: f alone or f + R.
  std::deque<double> history{smooth_only ? data_value : objective};
  result.x = x;
  result.objective = objective;

  RedConfig scaled = red;
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    const double ref = *std::max_element(history.begin(), history.end());
    RealImage candidate;
    MeasurementVector z_next;
    double next_data = 0.0;
    double next_objective = 0.0;
    double dx2 = 0.0;
    std::size_t backtracks = 0;
    bool accepted = false;

    for (;;) {
      RealImage forward_point = x;
      for (std::size_t i = 0; i < x.size(); ++i) forward_point[i] -= step * grad[i];
      scaled.lambda = red.lambda * step;
      candidate = red_prox(forward_point, scaled);
      z_next = op.forward(candidate);
      next_data = data_term_value(y, z_next, opts.data_term);
      dx2 = squared_distance(candidate, x);
      bool ok = false;
      if (smooth_only) {
        // Descent-lemma test on f: f(x+) <= max f + <grad f, dx> + |dx|^2 / (2 step).
        double slope = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) slope += grad[i] * (candidate[i] - x[i]);
        if (!std::isfinite(next_data)) {
          throw SolverError("fasta_solve: objective became non-finite at iteration " + std::to_string(it), result.trace);
        }
        ok = next_data <= ref + slope + dx2 / (2.0 * step);
        if (ok) next_objective = next_data + red_value(candidate, red);
      } else {
        next_objective = next_data + red_value(candidate, red);
        if (!std::isfinite(next_objective)) {
          throw SolverError("fasta_solve: objective became non-finite at iteration " + std::to_string(it), result.trace);
        }
        ok = next_objective <= ref - opts.sufficient_decrease * dx2 / step;
      }
      if (ok) {
        accepted = true;
        break;
      }
      if (backtracks == opts.max_backtracks) break;
      step *= opts.shrink;
      ++backtracks;
    }
    if (accepted && !std::isfinite(next_objective)) {
      throw SolverError("fasta_solve: objective became non-finite at iteration " + std::to_string(it), result.trace);
    }

    if (!accepted) {
      result.trace.records.push_back({it, objective, amplitude_residual(y, z), step, false, backtracks});
      result.reason = StopReason::Stalled;
      return result;
    }

    const RealImage grad_next = real_adjoint(op, data_term_grad(z_next, y, opts.data_term));
    const double used_step = step;

    if (opts.adaptive_step) {
      double dx_dg = 0.0;
      double dg_dg = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double dg = grad_next[i] - grad[i];
        dx_dg += (candidate[i] - x[i]) * dg;
        dg_dg += dg * dg;
      }
      const double steepest = dx2 / dx_dg;
      const double minimum_residual = dx_dg / dg_dg;
      double proposal = 2.0 * minimum_residual > steepest ? minimum_residual : steepest - 0.5 * minimum_residual;
      if (!(proposal > 0.0) || !std::isfinite(proposal)) proposal = 1.5 * step;
      step = proposal;
    }

    const double x_norm = norm2(candidate.values());
    const double rel_change = std::sqrt(dx2) / std::max(x_norm, std::numeric_limits<double>::min());

    x = std::move(candidate);
    z = std::move(z_next);
    grad = grad_next;
    objective = next_objective;
    history.push_back(smooth_only ? next_data : objective);
    if (history.size() > opts.window) history.pop_front();

    result.trace.records.push_back({it, objective, amplitude_residual(y, z), used_step, true, backtracks});
    if (objective < result.objective) {
      result.objective = objective;
      result.x = x;
    }
    if (rel_change < opts.tol) {
      result.reason = StopReason::Tolerance;
      return result;
    }
  }
  result.reason = StopReason::MaxIters;
  return result;
}

RealImage waf_run(const PhaselessData& data, const MeasurementOp& op, const RealImage& x0, const WafOptions& opts) {
  if (x0.shape() != op.image_shape()) throw ShapeError("waf_run: initializer shape does not match operator");
  if (data.size() != op.measurement_size()) throw ShapeError("waf_run: data length does not match operator");
  const double step = opts.step > 0.0 ? opts.step : 1.0 / op.gram_scale();
  RealImage x = x0;
  for (std::size_t it = 0; it < opts.iters; ++it) {
    const RealImage grad = data_gradient(op, data, x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step * grad[i];
  }
  return x;
}

// Calibrated for the unitary operators used here (A^H A = K I or I); the
// same coefficient works for both measurement types.
double default_lambda_coefficient(OperatorKind) { return 1e-3; }

PrDeepResult prdeep_run(const PhaselessData& data, const MeasurementOp& op, const DenoiserBank& bank,
                        const RealImage& x0, const PrDeepOptions& opts) {
  PrDeepResult result;
  if (opts.lambda) {
    result.lambda = *opts.lambda;
  } else {
    const double coeff = opts.lambda_coefficient.value_or(default_lambda_coefficient(op.kind()));
    result.lambda = coeff * (data.alpha() > 0.0 ? noise_std_estimate(data) : 0.0);
  }

  RealImage x = x0;
  for (const auto& stage : bank.stages()) {
    RedConfig red;
    red.lambda = result.lambda;
    red.prox_inner_iters = opts.prox_inner_iters;
    red.denoiser = stage.denoiser;
    red.sigma = stage.sigma;
    FastaResult stage_result = fasta_solve(op, data, red, x, opts.fasta);
    x = std::move(stage_result.x);
    if (opts.clamp_between_stages) {
      for (auto& v : x) v = std::clamp(v, 0.0, 255.0);
    }
    result.traces.push_back(std::move(stage_result.trace));
  }
  result.x = std::move(x);
  return result;
}

}  // namespace prdeep
