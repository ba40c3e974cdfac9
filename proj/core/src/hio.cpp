#include <cmath>

#include "prdeep/solve.hpp"

namespace prdeep {
namespace {

// The object domain HIO iterates on: the full oversampled frame for Fourier
// operators (so out-of-support feedback survives), the image for CDP.
class ObjectDomain {
 public:
  explicit ObjectDomain(const MeasurementOp& op) : op_(op), fourier_(op.as_fourier()) {}

  Shape shape() const { return fourier_ ? fourier_->frame_shape() : op_.image_shape(); }

  RealImage lift(const RealImage& x) const {
    return fourier_ ? embed(x, fourier_->frame_shape(), fourier_->offset()) : x;
  }

  RealImage restrict(const RealImage& g) const {
    return fourier_ ? crop(g, fourier_->image_shape(), fourier_->offset()) : g;
  }

  // Least-squares image whose measurements take the magnitudes y and the
  // phases of T g. Where T g vanishes the entry is passed through unchanged.
  RealImage modulus_projection(const RealImage& g, std::span<const double> y) const {
    if (fourier_) {
      ComplexField field = to_complex(g);
      fft2_inplace(field.values(), field.shape());
      substitute(field.values(), y);
      ifft2_inplace(field.values(), field.shape());
      return real_part(field);
    }
    MeasurementVector z = op_.forward(g);
    substitute(z, y);
    RealImage out = real_part(op_.adjoint(z));
    const double inv = 1.0 / op_.gram_scale();
    for (auto& v : out) v *= inv;
    return out;
  }

 private:
  static void substitute(std::span<Complex> z, std::span<const double> y) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double mag = std::abs(z[i]);
      if (mag > 0.0) z[i] *= y[i] / mag;
    }
  }

  const MeasurementOp& op_;
  const FourierOsOperator* fourier_;
};

}  // namespace

void HioOptions::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw ParameterError("HIO beta must lie in (0, 1]");
}

SupportMask default_support(const MeasurementOp& op) {
  if (const auto* fourier = op.as_fourier()) {
    SupportMask inside(fourier->image_shape(), 1);
    return embed(inside, fourier->frame_shape(), fourier->offset());
  }
  return SupportMask(op.image_shape(), 1);
}

RealImage hio_run(const PhaselessData& data, const MeasurementOp& op, const HioOptions& opts, const RealImage& x0) {
  opts.validate();
  if (x0.shape() != op.image_shape()) throw ShapeError("hio_run: initializer shape does not match operator");
  if (data.size() != op.measurement_size()) throw ShapeError("hio_run: data length does not match operator");

  const ObjectDomain domain(op);
  const SupportMask support = opts.support ? *opts.support : default_support(op);
  if (support.shape() != domain.shape()) throw ShapeError("hio_run: support mask does not match the object domain");

  const auto y = data.y();
  auto admissible = [&](std::size_t i, double v) { return support[i] != 0 && (!opts.nonnegative || v >= 0.0); };

  RealImage g = domain.lift(x0);
  for (std::size_t it = 0; it < opts.iters; ++it) {
    const RealImage projected = domain.modulus_projection(g, y);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = admissible(i, projected[i]) ? projected[i] : g[i] - opts.beta * projected[i];
    }
  }

  RealImage estimate = domain.modulus_projection(g, y);
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    if (!admissible(i, estimate[i])) estimate[i] = 0.0;
  }
  return domain.restrict(estimate);
}

}  // namespace prdeep
