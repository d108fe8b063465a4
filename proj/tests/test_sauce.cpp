#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sauce/running_variance.hpp"
#include "sauce/sauce.hpp"

using namespace sauce;
using sauce::test::row_stream;

namespace {

Eigen::ArrayXd values(std::initializer_list<double> v) {
  Eigen::ArrayXd out(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<Eigen::Index> kept(const SampleMask& mask) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (mask.keep(i)) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("distance is the weighted sum") {
  CHECK(distance(0.0, 0.0, SamplerParams{1, 1, 0}) == 0.0);
  CHECK(distance(1.0, 0.0, SamplerParams{2, 5, 0.5}) == doctest::Approx(2.5));
  const SamplerParams p{0.7, -1.3, 0};
  CHECK(distance(2 * 0.4, 2 * 0.9, p) == doctest::Approx(2 * distance(0.4, 0.9, p)));
}

TEST_CASE("probability") {
  CHECK(probability(0.0, 2.0) == 0.0);
  CHECK(probability(-1.0, 2.0) == 0.0);
  CHECK(probability(2.0, 2.0) == doctest::Approx(0.632120558).epsilon(1e-9));
  CHECK(probability(1e6, 1.0) == 1.0);
  CHECK_THROWS_AS(probability(1.0, 0.0), DomainError);
  CHECK(probability(1.0f, 1.0f) == doctest::Approx(0.6321206f));
}

TEST_CASE("probability gradient is zero where P is clamped") {
  CHECK(probability_gradient(1.0, 1.0, SamplerParams{-1, -1, 0}, 1.0).isZero());
  const Eigen::Vector3d g = probability_gradient(2.0, 3.0, SamplerParams{1, 1, 0}, 4.0);
  const double w = std::exp(-5.0 / 4.0) / 4.0;
  CHECK(g(0) == doctest::Approx(2 * w));
  CHECK(g(1) == doctest::Approx(3 * w));
  CHECK(g(2) == doctest::Approx(w));
}

TEST_CASE("heatmap on a constant stream") {
  const SampleStream stream = row_stream({0.4, 0.4, 0.4, 0.4, 0.4});
  SUBCASE("saturates near one when D is a positive constant") {
    const Heatmap h = heatmap(stream, SamplerParams{1, 1, 0});
    CHECK(h.sigma_sq == kVarianceFloor);
    CHECK(h.p(0) == 1.0);
    for (int i = 1; i < 5; ++i) CHECK(h.p(i) == doctest::Approx(1.0));
  }
  SUBCASE("is zero after the first sample when D is zero") {
    const Heatmap h = heatmap(stream, SamplerParams{0, 1, 0});
    CHECK(h.p(0) == 1.0);
    for (int i = 1; i < 5; ++i) CHECK(h.p(i) == 0.0);
  }
}

TEST_CASE("heatmap peaks at a step edge") {
  const SampleStream stream = row_stream({0.1, 0.1, 0.1, 0.1, 0.9, 0.9, 0.9, 0.9});
  const Heatmap h = heatmap(stream, SamplerParams{1, 1, 0});
  Eigen::Index best = 1;
  for (Eigen::Index i = 1; i < h.size(); ++i) {
    if (h.p(i) > h.p(best)) best = i;
  }
  CHECK(best == 4);
  // Oracle: D = 1 + 0.8 at the edge, 1 elsewhere; sigma^2 is the population variance over i >= 1.
  Eigen::ArrayXd d = Eigen::ArrayXd::Ones(7);
  d(3) = 1.8;
  const double var = (d - d.mean()).square().mean();
  CHECK(h.sigma_sq == doctest::Approx(var));
  CHECK(h.p(4) == doctest::Approx(1 - std::exp(-1.8 / var)));
  CHECK(h.p(2) == doctest::Approx(1 - std::exp(-1.0 / var)));
}

TEST_CASE("two-pass and streaming variance agree on long i.i.d. streams") {
  const SampleStream stream = sauce::test::identity_stream(sauce::test::random_image(200, 50, 5));
  const Heatmap two = heatmap(stream, SamplerParams{0, 1, 0}, VarianceMode::TwoPass);
  const Heatmap run = heatmap(stream, SamplerParams{0, 1, 0}, VarianceMode::Streaming);
  CHECK(std::abs(run.sigma_sq - two.sigma_sq) / two.sigma_sq < 0.05);
}

TEST_CASE("running variance matches the direct formula") {
  RunningVariance<double> rv;
  const Eigen::ArrayXd x = values({1, 4, 4, 7, 2.5, -3});
  for (double v : x) rv.push(v);
  CHECK(rv.count() == 6);
  CHECK(rv.mean() == doctest::Approx(x.mean()));
  CHECK(rv.population_variance() == doctest::Approx((x - x.mean()).square().mean()));
  CHECK(rv.sample_variance() == doctest::Approx((x - x.mean()).square().sum() / 5));
}

TEST_CASE("samplerate logit") {
  CHECK(samplerate_logit(50, 100) == 0.0);
  CHECK(samplerate_logit(25, 100) == doctest::Approx(-1.0986122887));
  CHECK_THROWS_AS(samplerate_logit(0, 100), DomainError);
  CHECK_THROWS_AS(samplerate_logit(100, 100), DomainError);
}

TEST_CASE("normalize") {
  Heatmap h;
  h.p = values({0.2, 0.6, 0.4, 1.0});
  h.grid_width = 4;
  h.grid_height = 1;
  const Heatmap half = normalize(h, 2, 4);
  CHECK((half.p - rescale01(h.p)).abs().maxCoeff() < 1e-15);
  CHECK(half.p.minCoeff() == 0.0);
  CHECK(half.p.maxCoeff() == 1.0);
  CHECK_THROWS_AS(normalize(h, 0, 4), DomainError);
  CHECK_THROWS_AS(normalize(h, 4, 4), DomainError);

  h.p.setConstant(0.3);
  CHECK((normalize(h, 1, 4).p == 0.5).all());
}

TEST_CASE("top-k keeps the highest scores with ties to the lower index") {
  const Eigen::ArrayXd p = values({0.9, 0.1, 0.5, 0.5});
  CHECK(kept(top_k(p, 2)) == std::vector<Eigen::Index>{0, 2});
  CHECK(top_k(p, 4).n == 4);
  CHECK(top_k(p, 0).n == 0);
  CHECK(kept(top_k(p, 3)) == std::vector<Eigen::Index>{0, 2, 3});
  CHECK_THROWS_AS(top_k(p, 5), DomainError);
  CHECK_THROWS_AS(top_k(p, -1), DomainError);
}

TEST_CASE("apply_mask") {
  const SampleStream stream = row_stream({0.9, 0.1, 0.5, 0.5});
  const SparseImage all = apply_mask(stream, SampleMask::all(4));
  CHECK(all.size() == 4);
  CHECK(apply_mask(stream, SampleMask::none(4)).empty());

  const SparseImage two = apply_mask(stream, top_k(stream.values.col(0), 2));
  REQUIRE(two.size() == 2);
  CHECK(two.positions[0].col == 0);
  CHECK(two.positions[1].col == 2);
  CHECK(two.values(0, 0) == 0.9);
  CHECK(two.values(1, 0) == 0.5);
  CHECK_THROWS_AS(apply_mask(stream, SampleMask::all(3)), InputError);
}

TEST_CASE("keep probability starts at the target rate and grows with P") {
  Heatmap h;
  h.p = values({0.0, 0.5, 1.0, 0.0});
  const Eigen::ArrayXd q = keep_probability(h, 1, 4);
  CHECK(q(0) == doctest::Approx(0.25));
  CHECK(q(1) > q(0));
  CHECK(q(2) > q(1));
  CHECK(q(2) == doctest::Approx(1.0 / (1.0 + 3.0 * std::exp(-1.0))));
}

TEST_CASE("bernoulli mask is seeded") {
  const Eigen::ArrayXd q = Eigen::ArrayXd::Constant(1000, 0.3);
  const SampleMask a = bernoulli_mask(q, 4);
  CHECK((a.keep == bernoulli_mask(q, 4).keep).all());
  CHECK(a.kept_fraction() == doctest::Approx(0.3).epsilon(0.2));
  CHECK(bernoulli_mask(Eigen::ArrayXd::Ones(10), 1).n == 10);
  CHECK(bernoulli_mask(Eigen::ArrayXd::Zero(10), 1).n == 0);
}

TEST_CASE("mask and params files") {
  sauce::test::TempDir dir("sauce_io");
  Eigen::Array<bool, Eigen::Dynamic, 1> flags(13);
  flags << true, false, false, true, true, false, true, false, false, false, false, true, true;
  const SampleMask mask = SampleMask::from_flags(flags);
  CHECK(mask.n == 6);
  write_mask(dir / "m.mask", mask);
  const SampleMask back = read_mask(dir / "m.mask");
  CHECK(back.n == 6);
  CHECK((back.keep == mask.keep).all());

  const SamplerParams params{-0.5, 2.25, 0.125};
  write_params(dir / "p.json", params);
  CHECK(read_params(dir / "p.json") == params);
  CHECK(params_from_json(R"({"alpha": 1, "beta": 2, "gamma": 3})") == SamplerParams{1, 2, 3});
  CHECK_THROWS_AS(params_from_json("{\"alpha\": 1}"), InputError);
  CHECK_THROWS_AS(params_from_json("not json"), InputError);

  Heatmap h;
  h.p = values({0.0, 0.5, 1.0, 0.25});
  h.grid_width = 2;
  h.grid_height = 2;
  write_heatmap_pgm(dir / "h.pgm", h);
  const ImageD image = read_image(dir / "h.pgm");
  CHECK(image.width() == 2);
  CHECK(image(0, 0) == 0.0);
  CHECK(image(1, 0) == 1.0);
}
