#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <tuple>

#include "qlattice/compare.hpp"
#include "qlattice/ensemble.hpp"
#include "qlattice/quantum_force.hpp"

using namespace qlattice;

TEST_CASE("particle boson decay factors") {
  CHECK(decay_particle_boson(ParticleBoson{{}, 1.0, 0}).momentum == 0.5);
  CHECK(particle_decay_factor(2) == 0.375);
  Rational binom_half(1);  // |C(-1/2, k)|
  for (long k = 0; k <= 30; ++k) {
    if (k > 0) binom_half *= Rational(2 * k - 1, 2 * k);
    const Rational central = Rational(binomial_exact(2 * k, k)) / Rational(BigInt(1) << (2 * k));
    CHECK(central == binom_half);
    CHECK(std::abs(particle_decay_factor(k) - central.convert_to<double>()) <= 1e-12);
  }
  CHECK_THROWS_AS(particle_decay_factor(-1), DomainError);
}

TEST_CASE("geometric-lifetime mean of the boson momentum is sqrt(P12)") {
  for (double p12 : {0.01, 0.09, 0.25, 0.5, 1.0}) {
    CHECK(std::abs(boson_mean_series(p12) - std::sqrt(p12)) <= 1e-9);
  }
  CHECK_THROWS_AS(boson_mean_series(0.0), DomainError);
}

TEST_CASE("site boson decay") {
  const auto zero = decay_site_boson(SiteBoson{{}, 0.5, 1.0, 0});
  CHECK(zero.ell == 1);
  CHECK(zero.w == 0.0);

  const double q = 0.125, delta = 2;
  SiteBoson b{{}, q, delta * q, 0};
  for (long l = 0; l < 10000; ++l) b = decay_site_boson(b);
  CHECK(std::abs(b.w - std::sin(std::numbers::pi / 4) / (delta * std::numbers::pi)) <= 1e-3);
}

TEST_CASE("site boson products approach q sinc(delta q)") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> q_d(-1.0, 1.0);
  std::uniform_int_distribution<int> d_d(1, 5);
  for (int i = 0; i < 20; ++i) {
    const double q = q_d(gen);
    const double d = d_d(gen);
    SiteBoson b{{}, q, d * q, 0};
    for (long l = 0; l < 100000; ++l) b = decay_site_boson(b);
    CHECK(std::abs(b.w - std::sin(std::numbers::pi * d * q) / (d * std::numbers::pi)) <= 1e-4);
  }
}

TEST_CASE("lazy site decay replays short lifetimes bit for bit") {
  for (double x : {0.3, -1.7, 4.5}) {
    SiteBoson step{{}, 0.4, x, 0};
    SiteBoson lazy = step;
    for (long n = 1; n <= kSiteReplay; ++n) {
      step = decay_site_boson(step);
      if (n % 97 == 0 || n == kSiteReplay) {
        const auto jump = advance_site_boson(lazy, n);
        CHECK(jump.w == step.w);
        CHECK(jump.ell == step.ell);
      }
    }
    for (long n = kSiteReplay + 1; n <= 30000; ++n) step = decay_site_boson(step);
    const auto far = advance_site_boson(lazy, 30000);
    CHECK(far.ell == 30000);
    CHECK(std::abs(far.w - step.w) <= 1e-12);
    const auto two_hops = advance_site_boson(advance_site_boson(lazy, 5000), 25000);
    CHECK(std::abs(two_hops.w - step.w) <= 1e-12);
  }
  CHECK_THROWS_AS(advance_site_boson(SiteBoson{}, -1), DomainError);
}

TEST_CASE("effective momentum") {
  InterferingParticle particle;
  particle.p = 0.4;
  CHECK(effective_momentum(particle) == 0.4);
  particle.carried[{1, -1}] = ParticleBoson{{1, -1}, 0.2, 3};
  particle.carried[{-1, 1}] = ParticleBoson{{-1, 1}, -0.2, 5};
  CHECK(effective_momentum(particle) == doctest::Approx(0.4).epsilon(1e-15));
  InterferingParticle fast;
  fast.p = 0.99;
  fast.carried[{0, 2}] = ParticleBoson{{0, 2}, -0.1, 0};
  CHECK(effective_momentum(fast) == 1.0);
}

TEST_CASE("visit protocol") {
  InterferingParticle particle;
  SiteState site;
  CHECK(visit(particle, site) == VisitEvent::Skipped);
  CHECK_FALSE(site.register_value.has_value());

  particle.tau = 10;
  particle.position = 5;
  particle.lambda = 6;  // apparent source -1
  particle.carried[{7, 7}] = ParticleBoson{{7, 7}, 0.05, 2};
  CHECK(visit(particle, site) == VisitEvent::Initialized);
  CHECK(site.register_value == 6);
  CHECK(site.residents.empty());
  CHECK(particle.carried.size() == 1);

  CHECK(visit(particle, site) == VisitEvent::Match);
  CHECK(particle.lambda == 6);
  CHECK(site.residents.empty());

  site.register_value = 4;  // written by a walker from source +1
  CHECK(visit(particle, site) == VisitEvent::Exchange);
  const BosonKey key{-1, 1};
  CHECK(key.delta() == -2);
  CHECK(particle.lambda == 4);
  CHECK(site.register_value == 6);
  REQUIRE(site.residents.count(key) == 1);
  CHECK(site.residents.at(key).w == doctest::Approx(0.6));
  CHECK(site.residents.at(key).w0_scaled == doctest::Approx(-1.2));
  CHECK(site.residents.at(key).ell == 0);
  REQUIRE(particle.carried.count(key) == 1);
  CHECK(particle.carried.at(key).momentum == 0.0);
  CHECK(particle.carried.at(key).k == 0);

  // A second walker of the same type takes over the resident momentum.
  InterferingParticle other;
  other.tau = 10;
  other.position = 5;
  other.lambda = 6;
  site.register_value = 4;
  site.residents.at(key).w = 0.31;
  CHECK(visit(other, site) == VisitEvent::Exchange);
  CHECK(other.carried.at(key).momentum == 0.31);
  CHECK(site.residents.size() == 1);
  CHECK(site.residents.at(key).w == doctest::Approx(0.6));
}

TEST_CASE("single-source full run creates no bosons and matches the free ensemble") {
  FullRunSpec spec;
  spec.n_particles = 3000;
  spec.n_steps = 80;
  spec.seed = 21;
  const auto full = run_full(spec);
  CHECK(full.exchanges == 0);
  CHECK(full.site_bosons.empty());
  CHECK(full.histogram.total() == 3000);

  FreeEnsembleSpec free;
  free.n_particles = 3000;
  free.n_steps = 80;
  free.seed = 22;
  const auto ref = run_free_ensemble(free);
  CHECK(two_sample_chi_square(full.histogram, ref).p_value >= 0.01);
}

TEST_CASE("full two-slit run keeps one boson per key and site") {
  FullRunSpec spec;
  spec.sources = SourceSet::two_slit(2, 0.5);
  spec.n_particles = 60;
  spec.n_steps = 120;
  spec.seed = 4;
  const auto r = run_full(spec);
  CHECK(r.exchanges > 0);
  CHECK(r.histogram.total() == 60);
  std::set<std::tuple<long, long, BosonKey>> seen;
  for (const auto& b : r.site_bosons) {
    CHECK(seen.insert({b.xi, b.tau, b.boson.key}).second);
    CHECK(std::labs(b.boson.key.delta()) == 2);
    CHECK(b.tau >= 1);
    CHECK(b.tau <= 120);
  }
  CHECK_FALSE(seen.empty());
}

TEST_CASE("full runs are reproducible and honour the emission gap") {
  FullRunSpec spec;
  spec.sources = SourceSet::two_slit(2, 0.5);
  spec.n_particles = 30;
  spec.n_steps = 60;
  spec.seed = 9;
  const auto a = run_full(spec);
  const auto b = run_full(spec);
  CHECK(a.histogram.counts == b.histogram.counts);
  CHECK(a.site_bosons.size() == b.site_bosons.size());
  spec.emission_gap = 1000;
  const auto gapped = run_full(spec);
  for (const auto& rec : gapped.site_bosons) CHECK(rec.boson.ell >= 1000);
  spec.emission_gap = -1;
  CHECK_THROWS_AS(run_full(spec), DomainError);
}

TEST_CASE("trained runs do not depend on the thread count") {
  TrainedLatticeSpec spec;
  spec.n_particles = 4000;
  spec.n_steps = 150;
  spec.seed = 77;
  spec.threads = 1;
  const auto one = run_trained(spec);
  spec.threads = 3;
  const auto three = run_trained(spec);
  CHECK(one.counts == three.counts);
  CHECK(one.total() == 4000);
  CHECK(one.scenario == "two-slit-trained");
}

TEST_CASE("trained run with one source is the free walk") {
  TrainedLatticeSpec spec;
  spec.sources = SourceSet::single();
  spec.n_particles = 3000;
  spec.n_steps = 80;
  spec.seed = 5;
  FreeEnsembleSpec free;
  free.n_particles = 3000;
  free.n_steps = 80;
  free.seed = 6;
  CHECK(two_sample_chi_square(run_trained(spec), run_free_ensemble(free)).p_value >= 0.01);
}

TEST_CASE("ring at rest has zero mean momentum") {
  RingSpec spec;
  spec.p = 0.0;
  spec.n_steps = 2000;
  spec.n_particles = 200;
  const auto r = run_ring(spec);
  CHECK(std::abs(r.mean_q()) <= 0.01);
  CHECK(r.histogram.total() == 200);
  CHECK(r.histogram.lo == 0);
  CHECK(r.histogram.hi() == 49);
  spec.ell = 1;
  CHECK_THROWS_AS(run_ring(spec), DomainError);
}

TEST_CASE("full-mode ring registers differ by whole turns") {
  FullRunSpec spec;
  spec.ring_ell = 10;
  spec.momentum = MomentumLaw::fixed(0.3);
  spec.n_particles = 20;
  spec.n_steps = 200;
  spec.seed = 3;
  const auto r = run_full(spec);
  CHECK(r.exchanges > 0);
  for (const auto& b : r.site_bosons) {
    CHECK(b.xi >= 0);
    CHECK(b.xi < 10);
    CHECK(b.boson.key.particle_source % 10 == 0);
    CHECK(b.boson.key.register_source % 10 == 0);
    CHECK(b.boson.key.delta() != 0);
  }
}
