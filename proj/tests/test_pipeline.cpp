#include <doctest.h>

#include "helpers.hpp"
#include "sauce/pipeline.hpp"

using namespace sauce;

TEST_CASE("budget for rate") {
  CHECK(budget_for_rate(0.25, 100) == 25);
  CHECK(budget_for_rate(1.0, 100) == 100);
  CHECK(budget_for_rate(0.001, 100) == 1);
  CHECK(budget_for_rate(0.125, 4) == 1);
  CHECK_THROWS_AS(budget_for_rate(0.0, 100), DomainError);
  CHECK_THROWS_AS(budget_for_rate(1.01, 100), DomainError);
}

TEST_CASE("sampler names round trip") {
  for (const char* name : {"sauce", "uniform", "random", "lc", "mar", "mar:rho=0.25", "twostage:f=3"}) {
    CHECK(SamplerSpec::parse(name).name() == name);
  }
  CHECK(SamplerSpec::parse("twostage").name() == "twostage:f=2");
  CHECK(SamplerSpec::parse("mar").rho == 0.5);
  CHECK_THROWS_AS(SamplerSpec::parse("bogus"), InputError);
  CHECK_THROWS_AS(SamplerSpec::parse("uniform:f=2"), InputError);
  CHECK_THROWS_AS(SamplerSpec::parse("mar:f=2"), InputError);
}

TEST_CASE("every sampler hits the budget and is the identity at rate 1") {
  const ImageD image = sauce::test::random_image(12, 10, 4);
  const SamplingOptions options;
  for (const char* name : {"sauce", "uniform", "random", "lc", "mar", "twostage:f=2"}) {
    const SamplerSpec spec = SamplerSpec::parse(name);
    for (double rate : {0.05, 0.3, 0.5, 0.9}) {
      const SampledImage s = sample_image(image, spec, rate, options, 3);
      CHECK(s.budget == budget_for_rate(rate, 120));
      if (spec.kind == SamplerKind::TwoStage) {
        CHECK(s.mask.n == std::max<Eigen::Index>(0, s.budget - s.first_pass_samples));
      } else {
        CHECK(s.mask.n == s.budget);
        CHECK(s.achieved_rate == doctest::Approx(double(s.budget) / 120));
      }
    }
    const SampledImage full = sample_image(image, spec, 1.0, options, 3);
    CHECK(full.mask.n == 120);
    CHECK((full.image.pixels() == image.pixels()).all());
  }
}

TEST_CASE("two-stage rate is the effective rate") {
  const ImageD image = sauce::test::random_image(20, 20, 4);
  const SampledImage s = sample_image(image, SamplerSpec::parse("twostage:f=2"), 0.35, SamplingOptions{}, 1);
  CHECK(s.first_pass_samples == 100);
  CHECK(s.mask.n == 40);
  CHECK(s.achieved_rate == doctest::Approx(0.35));
  const SampledImage low = sample_image(image, SamplerSpec::parse("twostage:f=2"), 0.1, SamplingOptions{}, 1);
  CHECK(low.mask.n == 0);
  CHECK(low.achieved_rate == doctest::Approx(0.25));
}

TEST_CASE("selection modes") {
  const SampleStream stream = sauce::test::identity_stream(sauce::test::random_image(30, 30, 8));
  const Heatmap h = heatmap(stream, SamplerParams{});
  SamplingOptions options;
  CHECK(select_samples(h, 200, options, 1).n == 200);
  options.normalize = false;
  CHECK((select_samples(h, 200, options, 1).keep == top_k(h.p, 200).keep).all());
  options.selection = SelectionMode::Bernoulli;
  CHECK((select_samples(h, 200, options, 5).keep == bernoulli_mask(h.p, 5).keep).all());
  options.normalize = true;
  CHECK((select_samples(h, 200, options, 5).keep == bernoulli_mask(keep_probability(h, 200, 900), 5).keep).all());
  CHECK(select_samples(h, 0, options, 5).n == 0);
  CHECK(select_samples(h, 900, options, 5).n == 900);
}

TEST_CASE("seeded samplers are reproducible") {
  const ImageD image = sauce::test::random_image(16, 16, 2);
  for (const char* name : {"random", "mar"}) {
    const SamplerSpec spec = SamplerSpec::parse(name);
    CHECK((sample_image(image, spec, 0.3, {}, 9).mask.keep == sample_image(image, spec, 0.3, {}, 9).mask.keep).all());
  }
}

TEST_CASE("fill modes") {
  const ImageD image = sauce::test::random_image(8, 8, 6);
  SamplingOptions options;
  options.fill = FillMode::Zero;
  const SampledImage s = sample_image(image, SamplerSpec::parse("uniform"), 0.25, options, 1);
  CHECK((s.image.pixels() == 0.0).count() >= 48);
}
