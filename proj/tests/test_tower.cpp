#include <doctest.h>

#include <future>
#include <random>

#include "selfcover/spec_io.hpp"
#include "selfcover/tower.hpp"

using namespace selfcover;

namespace {

TowerSpec bundled_tower(const std::string& name) {
  const BundledExample* ex = find_bundled_example(name);
  REQUIRE(ex != nullptr);
  return tower_from_document(parse_spec(ex->document));
}

}  // namespace

TEST_CASE("tower construction rejects degree one") {
  GroupSpec torus = make_abelian(2, {});
  CHECK_THROWS_AS((void)make_tower_spec(torus, {generator_element(torus, 0),
                                                generator_element(torus, 1)}),
                  std::invalid_argument);
}

TEST_CASE("degree worked examples") {
  CHECK(bundled_tower("torus-diag23").degree == 6);
  CHECK(bundled_tower("klein-b3").degree == 3);
  CHECK(bundled_tower("heisenberg-224").degree == 16);
}

TEST_CASE("strong regularity certificates") {
  TowerSpec torus = bundled_tower("torus-diag23");
  CHECK(certify_strong_regularity(torus, 6).verdict == RegularityVerdict::ExactlyRegular);

  TowerSpec klein = bundled_tower("klein-b3");
  CHECK(certify_strong_regularity(klein, 6).verdict == RegularityVerdict::ExactlyRegular);

  TowerSpec heis = bundled_tower("heisenberg-224");
  auto cert = certify_strong_regularity(heis, 6);
  REQUIRE(cert.verdict == RegularityVerdict::FailsAt);
  CHECK(cert.level == 1);
  REQUIRE(cert.witness.has_value());
  // the witness re-verifies: the element lies in the image, its conjugate does not
  auto h = image_subgroup(heis.group, heis.endo, cert.level);
  CHECK(member(heis.group, h, cert.witness->element));
  CHECK_FALSE(member(heis.group, h, cert.witness->conjugate_out));
  CHECK(conjugate(heis.group, cert.witness->conjugator, cert.witness->element) ==
        cert.witness->conjugate_out);
}

TEST_CASE("bounded verdict when no closed-form certificate applies") {
  // Z^2 presented as a semidirect product with trivial monodromy; the
  // endomorphism mixes fiber and translation so only per-level checks run.
  GroupSpec g = make_semidirect(1, IntMatrix{{Int(1)}});
  Element a = generator_element(g, 0), b = generator_element(g, 1);
  TowerSpec ts = make_tower_spec(g, {multiply(g, power(g, a, 2), b), b});
  auto cert = certify_strong_regularity(ts, 4);
  CHECK(cert.verdict == RegularityVerdict::RegularToDepth);
  CHECK(cert.level == 4);
}

TEST_CASE("deck groups on the Lambda side") {
  TowerSpec klein = bundled_tower("klein-b3");
  auto cert = certify_strong_regularity(klein, 6);
  LambdaData ld = lambda_data(klein);
  auto f2 = deck_group(klein, ld, cert, 2);
  CHECK(f2.group.invariant_factors == std::vector<Int>{Int(9)});

  TowerSpec shear = bundled_tower("torus-shear12");
  auto cert2 = certify_strong_regularity(shear, 6);
  LambdaData ld2 = lambda_data(shear);
  auto f3 = deck_group(shear, ld2, cert2, 3);
  CHECK(f3.group.invariant_factors == std::vector<Int>{Int(8)});

  TowerSpec diag = bundled_tower("torus-diag23");
  auto cert3 = certify_strong_regularity(diag, 6);
  LambdaData ld3 = lambda_data(diag);
  auto f1 = deck_group(diag, ld3, cert3, 1);
  CHECK(f1.group.invariant_factors == std::vector<Int>{Int(6)});
}

TEST_CASE("deck group order law d^n to depth 8") {
  for (const char* name :
       {"torus-diag23", "torus-shear12", "torus-2I", "klein-b3", "heisenberg-times-z"}) {
    TowerSpec ts = bundled_tower(name);
    auto cert = certify_strong_regularity(ts, 8);
    REQUIRE(cert.certified());
    LambdaData ld = lambda_data(ts);
    for (std::size_t n = 1; n <= 8; ++n) {
      auto deck = deck_group(ts, ld, cert, n);
      CHECK(deck.abelian);
      CHECK(deck.order == pow_int(ts.degree, n));
    }
  }
}

TEST_CASE("deck group demands normality and carries the witness") {
  TowerSpec heis = bundled_tower("heisenberg-224");
  auto cert = certify_strong_regularity(heis, 2);
  LambdaData ld = lambda_data(heis);
  CHECK_THROWS_AS((void)deck_group(heis, ld, cert, 1), RegularityError);
}

TEST_CASE("asymptotic deck group prufer ranks") {
  {
    TowerSpec ts = bundled_tower("torus-diag23");
    auto pr = asymptotic_deck_group(ts, lambda_data(ts), certify_strong_regularity(ts, 6));
    CHECK(pr == std::map<Int, std::size_t>{{Int(2), 1}, {Int(3), 1}});
  }
  {
    TowerSpec ts = bundled_tower("klein-b3");
    auto pr = asymptotic_deck_group(ts, lambda_data(ts), certify_strong_regularity(ts, 6));
    CHECK(pr == std::map<Int, std::size_t>{{Int(3), 1}});
  }
  {
    TowerSpec ts = bundled_tower("torus-2I");
    auto pr = asymptotic_deck_group(ts, lambda_data(ts), certify_strong_regularity(ts, 6));
    CHECK(pr == std::map<Int, std::size_t>{{Int(2), 2}});
  }
  {
    TowerSpec ts = bundled_tower("heisenberg-224");
    CHECK_THROWS_AS(
        (void)asymptotic_deck_group(ts, lambda_data(ts), certify_strong_regularity(ts, 2)),
        std::domain_error);
  }
}

TEST_CASE("stable image worked examples") {
  {
    TowerSpec ts = bundled_tower("torus-shear12");
    auto si = stable_image(ts, lambda_data(ts));
    CHECK(si.lambda_rank == 1);
    CHECK(si.induced == IntMatrix{{Int(2)}});
    CHECK(si.det_check);
    REQUIRE(si.stable_generators.size() == 1);
    CHECK(si.stable_generators[0].coords == std::vector<Int>{Int(1), Int(0)});
  }
  {
    TowerSpec ts = bundled_tower("klein-b3");
    auto si = stable_image(ts, lambda_data(ts));
    CHECK(si.lambda_rank == 1);
    CHECK(si.induced == IntMatrix{{Int(3)}});
    REQUIRE(si.stable_generators.size() == 1);
    CHECK(render_element(ts.group, si.stable_generators[0]) == "a");
    // b^k lies in phi^n(Gamma) iff 3^n | k: the fiber generator survives forever
    auto h3 = image_subgroup(ts.group, ts.endo, 3);
    CHECK(member(ts.group, h3, si.stable_generators[0]));
  }
  {
    TowerSpec ts = bundled_tower("torus-2I");
    auto si = stable_image(ts, lambda_data(ts));
    CHECK(si.lambda_rank == 2);
    CHECK(si.stable_generators.empty());
    CHECK(abs_int(det(si.induced)) == 4);
  }
  {
    // nonabelian stable image: the Heisenberg factor of Heisenberg x Z
    TowerSpec ts = bundled_tower("heisenberg-times-z");
    auto si = stable_image(ts, lambda_data(ts));
    CHECK(si.lambda_rank == 1);
    CHECK(si.induced == IntMatrix{{Int(2)}});
    SubgroupClosure k = closure(ts.group, si.stable_generators);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(member(ts.group, k, generator_element(ts.group, i)));
    CHECK_FALSE(member(ts.group, k, generator_element(ts.group, 3)));
  }
}

TEST_CASE("stable image of the induced matrix is trivial (idempotence)") {
  for (const char* name :
       {"torus-diag23", "torus-shear12", "torus-2I", "klein-b3", "heisenberg-times-z"}) {
    TowerSpec ts = bundled_tower(name);
    LambdaData ld = lambda_data(ts);
    CHECK(stable_sublattice(ld.abar).is_zero());
  }
}

TEST_CASE("q_matrix is surjective and intertwines phi with Abar") {
  for (const char* name :
       {"torus-diag23", "torus-shear12", "torus-2I", "klein-b3", "heisenberg-times-z"}) {
    TowerSpec ts = bundled_tower(name);
    LambdaData ld = lambda_data(ts);
    auto si = stable_image(ts, ld);  // throws on any verification failure
    CHECK(si.det_check);
    CHECK(abs_int(det(si.induced)) == ts.degree);
    for (const auto& d : snf(si.q_matrix).diagonal()) CHECK(d == 1);
  }
}

TEST_CASE("residual worked examples") {
  {
    TowerSpec ts = bundled_tower("torus-2I");
    auto res = residual(ts, stable_image(ts, lambda_data(ts)));
    CHECK(res.residual);
    REQUIRE(res.abelian_conclusion.has_value());
    CHECK(*res.abelian_conclusion);
  }
  {
    TowerSpec ts = bundled_tower("klein-b3");
    auto res = residual(ts, stable_image(ts, lambda_data(ts)));
    CHECK_FALSE(res.residual);
    REQUIRE(res.witness.has_value());
    CHECK(render_element(ts.group, *res.witness) == "a");
  }
  {
    TowerSpec ts = bundled_tower("torus-shear12");
    auto res = residual(ts, stable_image(ts, lambda_data(ts)));
    CHECK_FALSE(res.residual);
    REQUIRE(res.witness.has_value());
    CHECK(res.witness->coords == std::vector<Int>{Int(1), Int(0)});
  }
}

TEST_CASE("residual certified towers have square unimodular q") {
  for (const char* name : {"torus-diag23", "torus-2I"}) {
    TowerSpec ts = bundled_tower(name);
    LambdaData ld = lambda_data(ts);
    auto si = stable_image(ts, ld);
    auto res = residual(ts, si);
    REQUIRE(res.residual);
    CHECK(si.q_matrix.is_square());
    CHECK(abs_int(det(si.q_matrix)) == 1);
  }
}

TEST_CASE("expanding classifier worked examples") {
  auto e1 = expanding_linear(IntMatrix{{Int(2), Int(0)}, {Int(0), Int(2)}});
  CHECK(e1.expanding);
  CHECK_FALSE(e1.circle_roots);
  auto e2 = expanding_linear(IntMatrix{{Int(2), Int(1)}, {Int(1), Int(1)}});
  CHECK_FALSE(e2.expanding);
  CHECK_FALSE(e2.circle_roots);
  CHECK(e2.counts.inside == 1);
  auto e3 = expanding_linear(IntMatrix{{Int(0), Int(-1)}, {Int(1), Int(0)}});
  CHECK_FALSE(e3.expanding);
  CHECK(e3.circle_roots);
  CHECK_THROWS_AS((void)expanding_linear(IntMatrix(2, 2)), std::domain_error);
}

TEST_CASE("asymptotic element operations") {
  AsymptoticContext ctx(IntMatrix{{Int(3)}});
  auto e = ctx.make(1, {Int(1)});
  CHECK(e.level == 1);
  CHECK(e.value == std::vector<Int>{Int(1)});
  CHECK(ctx.is_identity(ctx.alpha(e)));
  auto em = ctx.embed(e, 1);
  CHECK(em.level == 2);
  CHECK(em.value == std::vector<Int>{Int(3)});
  CHECK(ctx.order(em) == 3);
  CHECK(ctx.order(e) == 3);
  CHECK(ctx.is_identity(ctx.add(e, ctx.negate(e))));
  CHECK(ctx.equal(ctx.canonicalize(em), e));
}

TEST_CASE("alpha is locally of finite order and surjective") {
  for (const IntMatrix& abar :
       {IntMatrix{{Int(3)}}, IntMatrix{{Int(2), Int(0)}, {Int(0), Int(3)}},
        IntMatrix{{Int(2), Int(1)}, {Int(0), Int(2)}}}) {
    AsymptoticContext ctx(abar);
    const std::size_t rank = ctx.rank();
    for (std::size_t n = 1; n <= 3; ++n) {
      std::vector<Int> diag = ctx.level(n).diag;
      IntMatrix u_inv = ctx.level(n).u_inv;
      for (std::size_t i = 0; i < rank; ++i) {
        if (diag[i] == 1) continue;
        std::vector<Int> y(rank, Int(0));
        y[i] = 1;
        AsymptoticElement e{n, y};
        // alpha^n kills every level-n element
        AsymptoticElement it = e;
        for (std::size_t k = 0; k < n; ++k) it = ctx.alpha(it);
        CHECK(ctx.is_identity(it));
        // every level-n element has an alpha-preimage one level up: the same
        // Lambda vector regarded one level later
        AsymptoticElement pre = ctx.make(n + 1, u_inv * y);
        CHECK(ctx.equal(ctx.alpha(pre), ctx.canonicalize(e)));
      }
    }
  }
}

TEST_CASE("deck groups embed injectively one level up") {
  for (const char* name : {"torus-diag23", "klein-b3", "torus-2I"}) {
    TowerSpec ts = bundled_tower(name);
    LambdaData ld = lambda_data(ts);
    AsymptoticContext ctx(ld.abar);
    for (std::size_t n = 1; n <= 4; ++n) {
      std::vector<Int> diag = ctx.level(n).diag;
      for (std::size_t i = 0; i < ctx.rank(); ++i) {
        if (diag[i] == 1) continue;
        std::vector<Int> y(ctx.rank(), Int(0));
        y[i] = 1;
        AsymptoticElement e{n, y};
        AsymptoticElement image = ctx.embed(e, 1);
        CHECK(ctx.order(image) == ctx.order(e));
        CHECK_FALSE(ctx.is_identity(ctx.canonicalize(image)));
      }
    }
  }
}

TEST_CASE("analyze aggregates: klein bottle end to end") {
  TowerSpec ts = bundled_tower("klein-b3");
  TowerReport r = analyze(ts, 6);
  CHECK(r.degree == 3);
  CHECK(r.certificate.verdict == RegularityVerdict::ExactlyRegular);
  REQUIRE(r.deck_groups.size() == 6);
  for (std::size_t n = 0; n < 6; ++n) {
    CHECK(r.deck_groups[n].group.invariant_factors ==
          std::vector<Int>{pow_int(3, n + 1)});
  }
  CHECK(*r.prufer == std::map<Int, std::size_t>{{Int(3), 1}});
  CHECK(r.stable->lambda_rank == 1);
  CHECK(r.stable->induced == IntMatrix{{Int(3)}});
  CHECK_FALSE(r.residual_report->residual);
  CHECK(r.expanding->expanding);
  CHECK(*r.b1_positive);
}

TEST_CASE("analyze aggregates: failure report leaves downstream unavailable") {
  TowerSpec ts = bundled_tower("heisenberg-224");
  TowerReport r = analyze(ts, 6);
  CHECK(r.degree == 16);
  CHECK(r.certificate.verdict == RegularityVerdict::FailsAt);
  CHECK(r.certificate.level == 1);
  CHECK(r.deck_groups.empty());
  CHECK_FALSE(r.prufer.has_value());
  CHECK_FALSE(r.stable.has_value());
  CHECK_FALSE(r.residual_report.has_value());
  CHECK_FALSE(r.expanding.has_value());
  CHECK_FALSE(r.b1_positive.has_value());
}

TEST_CASE("independent analyses can run concurrently") {
  TowerSpec a = bundled_tower("torus-diag23");
  TowerSpec b = bundled_tower("klein-b3");
  auto fa = std::async(std::launch::async, [&] { return analyze(a, 6); });
  auto fb = std::async(std::launch::async, [&] { return analyze(b, 6); });
  TowerReport ra = fa.get(), rb = fb.get();
  CHECK(ra.degree == 6);
  CHECK(rb.degree == 3);
}
