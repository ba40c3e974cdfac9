#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "prdeep/red.hpp"

using namespace prdeep;

namespace {

// D(x) = c x, a linear symmetric test denoiser.
class ScaleDenoiser final : public Denoiser {
 public:
  explicit ScaleDenoiser(double c) : c_(c) {}
  std::string name() const override { return "scale"; }

 protected:
  RealImage run(const RealImage& x, double) const override {
    RealImage out = x;
    for (auto& v : out) v *= c_;
    return out;
  }

 private:
  double c_;
};

RedConfig config(std::shared_ptr<const Denoiser> d, double lambda, std::size_t j = 1) {
  RedConfig cfg;
  cfg.denoiser = std::move(d);
  cfg.lambda = lambda;
  cfg.prox_inner_iters = j;
  cfg.sigma = 10.0;
  return cfg;
}

Eigen::VectorXd vec(const RealImage& x) {
  Eigen::VectorXd v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i];
  return v;
}

}  // namespace

TEST(RedValue, AnchorValues) {
  std::mt19937_64 rng(1);
  const RealImage x = oracle::random_image({5, 5}, rng);
  EXPECT_EQ(red_value(x, config(std::make_shared<IdentityDenoiser>(), 3.0)), 0.0);
  EXPECT_EQ(red_value(RealImage({5, 5}, 0.0), config(std::make_shared<GaussianBlurDenoiser>(), 3.0)), 0.0);
  EXPECT_DOUBLE_EQ(red_value(RealImage({2, 2}, 1.0), config(std::make_shared<ScaleDenoiser>(0.5), 2.0)), 2.0);
}

TEST(RedValue, NonNegativeForPassiveBlur) {
  std::mt19937_64 rng(2);
  const auto cfg = config(std::make_shared<GaussianBlurDenoiser>(1.2), 1.5);
  for (int t = 0; t < 20; ++t) EXPECT_GE(red_value(oracle::random_image({8, 8}, rng, -100.0, 100.0), cfg), 0.0);
}

TEST(RedGrad, TrivialCases) {
  std::mt19937_64 rng(3);
  const RealImage x = oracle::random_image({6, 6}, rng);
  for (double v : red_grad(x, config(std::make_shared<IdentityDenoiser>(), 2.0))) EXPECT_EQ(v, 0.0);
  for (double v : red_grad(x, config(std::make_shared<GaussianBlurDenoiser>(), 0.0))) EXPECT_EQ(v, 0.0);
}

TEST(RedGrad, MatchesFiniteDifferencesForBlur) {
  std::mt19937_64 rng(4);
  const auto cfg = config(std::make_shared<GaussianBlurDenoiser>(1.0), 0.8);
  const RealImage x = oracle::random_image({8, 8}, rng);
  const RealImage g = red_grad(x, cfg);
  const double h = 1e-4;
  std::vector<double> fd(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    RealImage xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    fd[i] = (red_value(xp, cfg) - red_value(xm, cfg)) / (2.0 * h);
  }
  EXPECT_LE(oracle::rel_diff(g.values(), fd), 1e-5);
}

TEST(RedProx, IdentityDenoiserIsFixedPoint) {
  std::mt19937_64 rng(5);
  const RealImage z = oracle::random_image({6, 6}, rng);
  const RealImage v = red_prox(z, config(std::make_shared<IdentityDenoiser>(), 4.0, 7));
  EXPECT_LE(oracle::max_abs_diff(v.values(), z.values()), 1e-12);
}

TEST(RedProx, ZeroDenoiserClosedForm) {
  std::mt19937_64 rng(6);
  const RealImage z = oracle::random_image({4, 4}, rng);
  const double lambda = 0.7;
  for (std::size_t j : {1, 2, 5}) {
    const RealImage v = red_prox(z, config(std::make_shared<ScaleDenoiser>(0.0), lambda, j));
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(v[i], z[i] / (1.0 + lambda), 1e-12);
  }
}

TEST(RedProx, LambdaZeroIsExactIdentity) {
  std::mt19937_64 rng(7);
  const RealImage z = oracle::random_image({5, 3}, rng);
  EXPECT_EQ(red_prox(z, config(nullptr, 0.0, 3)), z);
}

TEST(RedProx, ConvergesToDenseSolve) {
  std::mt19937_64 rng(8);
  const Shape s{8, 8};
  const auto blur = std::make_shared<GaussianBlurDenoiser>(1.0);
  const double lambda = 0.9;
  const RealImage z = oracle::random_image(s, rng);

  // v* solves (I + lambda (I - W)) v = z.
  const Eigen::MatrixXd w = oracle::dense_matrix(s, [&](const RealImage& e) { return gaussian_blur(e, 1.0); });
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(s.size(), s.size()) + lambda * (Eigen::MatrixXd::Identity(s.size(), s.size()) - w);
  const Eigen::VectorXd star = m.partialPivLu().solve(vec(z));

  const RealImage v = red_prox(z, config(blur, lambda, 200));
  EXPECT_LE((vec(v) - star).norm() / star.norm(), 1e-8);

  // The error shrinks monotonically along the recursion.
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j <= 30; ++j) {
    const double err = (vec(red_prox(z, config(blur, lambda, j))) - star).norm();
    EXPECT_LT(err, prev) << j;
    prev = err;
  }
}

TEST(RedConfig, Validation) {
  EXPECT_THROW(red_value(RealImage({2, 2}), config(nullptr, 1.0)), ParameterError);
  EXPECT_THROW(red_prox(RealImage({2, 2}), config(std::make_shared<IdentityDenoiser>(), -1.0)), ParameterError);
  EXPECT_THROW(red_prox(RealImage({2, 2}), config(std::make_shared<IdentityDenoiser>(), 1.0, 0)), ParameterError);
}
