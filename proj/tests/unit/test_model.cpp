#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "mtcoal/ancestry.hpp"
#include "mtcoal/errors.hpp"
#include "mtcoal/json_io.hpp"
#include "mtcoal/model.hpp"

using namespace mtcoal;

TEST_CASE("model validation names the violated constraint") {
  CHECK_THROWS_WITH_AS(CanningsModel::wright_fisher({4, 6}, {{3, 2}, {2, 4}}),
                       "size1 column 1: 3+2 != 4", std::invalid_argument);
  CHECK_THROWS_WITH_AS(CanningsModel::wright_fisher({4, 6}, {{3, 3}, {1, 4}}),
                       "size1 column 2: 3+4 != 6", std::invalid_argument);
  // Column sums hold but a row does not: fine for WF, an error for mutation.
  CHECK_NOTHROW(CanningsModel::wright_fisher({4, 6}, {{3, 4}, {1, 2}}));
  CHECK_THROWS_WITH_AS(CanningsModel::mutation({4, 6}, {{3, 4}, {1, 2}}),
                       "mutation row 1: 3+4 != 4", std::invalid_argument);
  CHECK_NOTHROW(mutation_desk_model());
  CHECK_THROWS_AS(CanningsModel::wright_fisher({0, 6}, {{0, 2}, {0, 4}}),
                  std::invalid_argument);
}

TEST_CASE("Wright-Fisher joint factorial moments") {
  auto model = wf_desk_model();

  SUBCASE("pair moment (3)_2 / 4^2") {
    auto t = MergeTensor::diagonal(2, {{2}, {}});
    CHECK(joint_factorial_moment(model, t) == ratio(3, 8));
  }

  SUBCASE("single slot mean N_{k,l}/N_k") {
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 2; ++l) {
        std::vector<int> j(2, 0);
        j[k] = 1;
        auto t = MergeTensor(j).incremented(k, l, 0);
        CHECK(joint_factorial_moment(model, t) == ratio(model.count(k, l), model.size(k)));
      }
    }
  }

  SUBCASE("empty exponents give 1") {
    CHECK(joint_factorial_moment(model, MergeTensor::empty(2)) == 1);
    CHECK(joint_factorial_moment(model, MergeTensor({2, 1})) == 1);
  }

  SUBCASE("domain violation names the bound") {
    CHECK_THROWS_AS(joint_factorial_moment(model, MergeTensor({5, 0})), std::domain_error);
  }
}

TEST_CASE("mutation law joint factorial moments") {
  auto model = mutation_desk_model();

  SUBCASE("one child per parent kills multi-label slots") {
    std::vector<int> j = {1, 0, 0};
    auto t = MergeTensor(j).incremented(0, 0, 0).incremented(0, 1, 0);
    CHECK(joint_factorial_moment(model, t) == 0);
    auto t2 = MergeTensor(j).incremented(0, 0, 0).incremented(0, 0, 0);
    CHECK(joint_factorial_moment(model, t2) == 0);
  }

  SUBCASE("single labels multiply as a multivariate hypergeometric") {
    // Two type-1 parents, one born type-2, one born type-3:
    // N_{1,2} N_{1,3} / (N_1)_2.
    auto t = MergeTensor({2, 0, 0}).incremented(0, 1, 0).incremented(0, 2, 1);
    CHECK(joint_factorial_moment(model, t) ==
          ratio(model.count(0, 1) * model.count(0, 2),
                model.size(0) * (model.size(0) - 1)));
  }
}

TEST_CASE("moments are invariant under per-cell slot permutations") {
  auto model = wf_desk_model();
  MergeTensor a(2, {{{2, 1}, {0, 1}}, {{}, {}}});
  MergeTensor b(2, {{{1, 2}, {1, 0}}, {{}, {}}});
  CHECK(symmetric_equal(a, b));
  CHECK(joint_factorial_moment(model, a) == joint_factorial_moment(model, b));

  auto mut = mutation_desk_model();
  MergeTensor c(3, {{{1, 0}, {0, 1}, {0, 0}},
                    {{}, {}, {}},
                    {{}, {}, {}}});
  MergeTensor e(3, {{{0, 1}, {1, 0}, {0, 0}},
                    {{}, {}, {}},
                    {{}, {}, {}}});
  CHECK(joint_factorial_moment(mut, c) == joint_factorial_moment(mut, e));
}

TEST_CASE("backward mutation matrix") {
  SUBCASE("Wright-Fisher desk instance") {
    auto m = backward_mutation_matrix(wf_desk_model());
    CHECK(m[0][0] == ratio(3, 4));
    CHECK(m[0][1] == ratio(1, 4));
    CHECK(m[1][0] == ratio(1, 3));
    CHECK(m[1][1] == ratio(2, 3));
  }

  SUBCASE("rows sum to 1 exactly") {
    for (const auto& model : {wf_desk_model(), mutation_desk_model()}) {
      auto m = backward_mutation_matrix(model);
      for (int k = 0; k < model.d(); ++k) {
        Rational row = 0;
        for (int l = 0; l < model.d(); ++l) row += m[k][l];
        CHECK(row == 1);
      }
    }
  }

  SUBCASE("diagonal counts give the identity") {
    auto model = CanningsModel::wright_fisher({3, 5}, {{3, 0}, {0, 5}});
    auto m = backward_mutation_matrix(model);
    CHECK(m[0][0] == 1);
    CHECK(m[0][1] == 0);
    CHECK(m[1][0] == 0);
    CHECK(m[1][1] == 1);
  }
}

TEST_CASE("moment identities and coalescence bounds hold exactly") {
  for (const auto& model : {wf_desk_model(), mutation_desk_model(),
                            CanningsModel::wright_fisher({2}, {{2}})}) {
    auto report = moment_identities_check(model);
    CHECK(report.pass());
    CHECK(report.worst_residual == "0");
    CHECK(report.cases_checked > 0);
  }
}

TEST_CASE("generation sampling") {
  SUBCASE("Wright-Fisher totals match the counts") {
    auto model = wf_desk_model();
    SplitMix64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      auto sample = sample_generation(model, rng);
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) CHECK(sample.type_total(k, l) == model.count(k, l));
      }
    }
  }

  SUBCASE("mutation samples have one offspring per parent") {
    auto model = mutation_desk_model();
    SplitMix64 rng(100);
    for (int trial = 0; trial < 200; ++trial) {
      auto sample = sample_generation(model, rng);
      for (int k = 0; k < 3; ++k) {
        for (long i = 0; i < model.size(k); ++i) {
          int row = 0;
          for (int l = 0; l < 3; ++l) row += sample.nu[k][l][i];
          CHECK(row == 1);
        }
        for (int l = 0; l < 3; ++l) CHECK(sample.type_total(k, l) == model.count(k, l));
      }
    }
  }

  SUBCASE("empirical mean of nu_{1,1,1} is N_{1,1}/N_1") {
    auto model = wf_desk_model();
    SplitMix64 rng(4242);
    const int reps = 100000;
    double sum = 0;
    for (int r = 0; r < reps; ++r) sum += sample_generation(model, rng).nu[0][0][0];
    const double mean = sum / reps;
    // Var(nu) = 3 * (1/4)(3/4) exactly for a binomial(3, 1/4).
    const double se = std::sqrt(3 * 0.25 * 0.75 / reps);
    CHECK(std::abs(mean - 0.75) < 4 * se);
  }
}

TEST_CASE("closed-form moments match Monte-Carlo estimates") {
  // One shared pass of 10^6 generations per model; every canonical tensor
  // with total exponent <= 4 arising at sample size <= 4 is estimated from it
  // (per-cell slot symmetry makes the canonical representative sufficient).
  for (const auto& model : {wf_desk_model(), mutation_desk_model()}) {
    std::set<MergeTensor> tensor_set;
    const int n = model.d() == 2 ? 4 : 3;
    auto states = enumerate_partitions(n, model.d());
    for (const auto& from : states) {
      for (const auto& to : states) {
        auto t = merge_structure(from, to);
        if (t && t->total_parent_blocks() <= 4) tensor_set.insert(t->canonical());
      }
    }
    std::vector<MergeTensor> tensors(tensor_set.begin(), tensor_set.end());
    std::vector<double> sum(tensors.size(), 0.0), sum_sq(tensors.size(), 0.0);

    SplitMix64 rng(model.d() == 2 ? 777 : 778);
    const std::uint64_t reps = 1000000;
    for (std::uint64_t r = 0; r < reps; ++r) {
      auto sample = sample_generation(model, rng);
      for (size_t i = 0; i < tensors.size(); ++i) {
        double product = 1.0;
        const auto& tensor = tensors[i];
        for (int k = 0; k < model.d() && product != 0.0; ++k) {
          for (int l = 0; l < model.d() && product != 0.0; ++l) {
            for (int s = 0; s < tensor.child_blocks(k); ++s) {
              const int order = tensor.entry(k, l, s);
              for (int e = 0; e < order; ++e) product *= sample.nu[k][l][s] - e;
              if (product == 0.0) break;
            }
          }
        }
        sum[i] += product;
        sum_sq[i] += product * product;
      }
    }

    for (size_t i = 0; i < tensors.size(); ++i) {
      const double exact = joint_factorial_moment(model, tensors[i]).get_d();
      const double mean = sum[i] / static_cast<double>(reps);
      const double var =
          std::max(0.0, sum_sq[i] / static_cast<double>(reps) - mean * mean);
      const double se = std::sqrt(var / static_cast<double>(reps));
      if (se == 0) {
        CHECK(mean == exact);
      } else {
        CHECK(std::abs(mean - exact) < 4 * se);
      }
    }
    CHECK(tensors.size() > 20);
  }
}

TEST_CASE("custom law supports sampling and oracle moments") {
  auto base = wf_desk_model();
  CustomLaw law;
  law.sampler = [base](SplitMix64& rng) { return sample_generation(base, rng); };
  auto model = CanningsModel::custom({4, 6}, law);

  CHECK_THROWS_AS(joint_factorial_moment(model, MergeTensor::empty(2)), UnsupportedOperation);
  CHECK_THROWS_AS(backward_mutation_matrix(model), UnsupportedOperation);

  SplitMix64 rng(5);
  auto t = MergeTensor::diagonal(2, {{2}, {}});
  auto est = estimate_joint_factorial_moment(model, t, 50000, rng);
  CHECK(std::abs(est.value - 0.375) < 4 * est.std_error);

  law.moment_oracle = [base](const MergeTensor& tensor) {
    return joint_factorial_moment(base, tensor);
  };
  auto with_oracle = CanningsModel::custom({4, 6}, law);
  CHECK(joint_factorial_moment(with_oracle, t) == ratio(3, 8));
}

TEST_CASE("model JSON round trip") {
  for (const auto& model : {wf_desk_model(), mutation_desk_model()}) {
    auto j = model_to_json(model);
    auto back = model_from_json(j);
    CHECK(back.law() == model.law());
    CHECK(back.sizes() == model.sizes());
    CHECK(back.counts() == model.counts());
  }
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"law":"wright-fisher"})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      model_from_json(Json::parse(R"({"N":[4,6],"law":"nope","counts":[[3,2],[1,4]]})")),
      std::invalid_argument);
}
