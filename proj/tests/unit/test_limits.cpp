#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "mtcoal/errors.hpp"
#include "mtcoal/json_io.hpp"
#include "mtcoal/limits.hpp"

using namespace mtcoal;

namespace {

XiSpec example_spec() {
  XiSpec spec;
  spec.a = {0.0, 0.0};
  spec.atoms.push_back({1.0, {0.5, 0.25}, {0, 1}});
  return spec;
}

// Independent single-type rate oracle: a 1{j=1,i=2} + sum over atoms of
// mass/(x,x) sum over distinct indices of prod x^{i_s}, coded with explicit
// index loops rather than the library's recursive assignment walk.
double single_type_rate_oracle(double a, const std::vector<XiAtom>& atoms,
                               const std::vector<int>& exponents) {
  double rate = 0.0;
  if (exponents.size() == 1 && exponents[0] == 2) rate += a;
  for (const auto& atom : atoms) {
    double xx = 0.0;
    for (double x : atom.x) xx += x * x;
    const int support = static_cast<int>(atom.x.size());
    std::vector<int> m(exponents.size(), 0);
    double sum = 0.0;
    while (true) {
      bool distinct = true;
      for (size_t u = 0; u < m.size() && distinct; ++u) {
        for (size_t v = u + 1; v < m.size(); ++v) {
          if (m[u] == m[v]) {
            distinct = false;
            break;
          }
        }
      }
      if (distinct) {
        double product = 1.0;
        for (size_t u = 0; u < m.size(); ++u) {
          for (int e = 0; e < exponents[u]; ++e) product *= atom.x[m[u]];
        }
        sum += product;
      }
      size_t pos = 0;
      while (pos < m.size() && ++m[pos] == support) m[pos++] = 0;
      if (pos == m.size()) break;
    }
    rate += atom.mass / xx * sum;
  }
  return rate;
}

}  // namespace

TEST_CASE("standard scaling") {
  CHECK(standard_scaling(wf_desk_model()) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(standard_scaling(mutation_desk_model()) == 0.0);
  CHECK(standard_scaling(CanningsModel::wright_fisher({5}, {{5}})) ==
        doctest::Approx(0.2).epsilon(1e-15));
  auto tiny = CanningsModel::wright_fisher({1, 2}, {{1, 0}, {0, 2}});
  CHECK_THROWS_AS(standard_scaling(tiny), std::domain_error);
}

TEST_CASE("Kingman rate tables and the limit generator") {
  auto rates = kingman_rates({1.0, 0.5});
  CHECK(total_binary_merge_rate(rates) == doctest::Approx(1.5));

  auto generator = limit_generator(rates, 2);
  REQUIRE(generator.states.size() == 6);
  // Order pi_1..pi_6; only same-type pairs merge, without type change.
  CHECK(generator.q[2][0] == doctest::Approx(1.0));   // two type-1 -> type-1 pair
  CHECK(generator.q[2][1] == 0.0);                    // type change is rate 0
  CHECK(generator.q[5][1] == doctest::Approx(0.5));   // two type-2 -> type-2 pair
  CHECK(generator.q[3][0] == 0.0);                    // cross-type pair never merges
  CHECK(generator.q[2][2] == doctest::Approx(-1.0));
  CHECK(generator.q[0][0] == 0.0);                    // singleton block is absorbing

  SUBCASE("rows sum to zero") {
    for (const auto& row : generator.q) {
      CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0)) < 1e-14);
    }
  }

  SUBCASE("a zero table yields the zero generator") {
    auto zero = limit_generator(kingman_rates({0.0, 0.0}), 2);
    for (const auto& row : zero.q) {
      for (double v : row) CHECK(v == 0.0);
    }
  }

  SUBCASE("seed bank: no activity in the silent subpopulation") {
    auto bank = limit_generator(kingman_rates({1.0, 0.0}), 2);
    for (double v : bank.q[5]) CHECK(v == 0.0);  // two type-2 lineages frozen
  }

  SUBCASE("a table with insufficient depth is an error") {
    RateTable shallow(2, 1);
    CHECK_THROWS_AS(limit_generator(shallow, 2), IncompleteTableError);
  }
}

TEST_CASE("Xi rates on the example spec") {
  auto spec = example_spec();

  SUBCASE("single pair merge of type 1") {
    auto t = MergeTensor::diagonal(2, {{2}, {}});
    CHECK(xi_rate(spec, t) == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("simultaneous double pair") {
    auto t = MergeTensor::diagonal(2, {{2}, {2}});
    CHECK(xi_rate(spec, t) == doctest::Approx(0.05).epsilon(1e-12));
  }
  SUBCASE("pure Kingman part") {
    XiSpec kingman;
    kingman.a = {3.0, 0.0};
    auto t = MergeTensor::diagonal(2, {{2}, {}});
    CHECK(xi_rate(kingman, t) == doctest::Approx(3.0));
    auto t3 = MergeTensor::diagonal(2, {{3}, {}});
    CHECK(xi_rate(kingman, t3) == 0.0);
  }
  SUBCASE("domain checks") {
    auto off = MergeTensor::unit({1, 0}).incremented(0, 1, 0).incremented(0, 1, 0);
    CHECK_THROWS_AS(xi_rate(spec, off), std::invalid_argument);
    CHECK_THROWS_AS(xi_rate(spec, MergeTensor::unit({1, 0})), std::invalid_argument);
  }
}

TEST_CASE("completion by the reduced consistency recursion") {
  SUBCASE("Kingman-only completion matches the known coalescent structure") {
    XiSpec kingman;
    kingman.a = {2.0};
    auto partial = xi_rate_table(kingman, 4);
    auto table = complete_rates_by_consistency(partial, 4);
    const double a = 2.0;
    CHECK(table.rate(MergeTensor::diagonal(1, {{1, 1}})) == doctest::Approx(-a));
    CHECK(table.rate(MergeTensor::diagonal(1, {{2, 1}})) == doctest::Approx(a));
    CHECK(table.rate(MergeTensor::diagonal(1, {{1, 1, 1}})) == doctest::Approx(-3 * a));
    CHECK(table.rate(MergeTensor::diagonal(1, {{2, 1, 1}})) == doctest::Approx(a));
    CHECK(table.rate(MergeTensor::diagonal(1, {{3, 1}})) == 0.0);
  }

  SUBCASE("zero input gives zero output") {
    auto table = complete_rates_by_consistency(xi_rate_table(XiSpec{{0.0, 0.0}, {}}, 4), 4);
    for (const auto& [tensor, rate] : table.entries()) CHECK(rate == 0.0);
  }

  SUBCASE("completed table satisfies the reduced consistency at every node") {
    auto table = complete_rates_by_consistency(xi_rate_table(example_spec(), 5), 5);
    size_t nodes = 0;
    for (const auto& [tensor, rate] : table.entries()) {
      if (tensor.total_parent_blocks() >= 5) continue;
      for (int l = 0; l < 2; ++l) {
        double rhs = table.rate(tensor.coalescence_extension(l, l));
        for (int s = 0; s < tensor.child_blocks(l); ++s) {
          rhs += table.rate(tensor.incremented(l, l, s));
        }
        CHECK(std::abs(rate - rhs) < 1e-12);
        ++nodes;
      }
    }
    CHECK(nodes > 10);
  }

  SUBCASE("monotonicity of the completed nonnegative rates") {
    auto table = complete_rates_by_consistency(xi_rate_table(example_spec(), 4), 4);
    for (const auto& [a, ra] : table.entries()) {
      CHECK((a.is_unit() ? ra <= 1e-15 : ra >= -1e-15));
      for (const auto& [b, rb] : table.entries()) {
        if (a.is_unit() || b.is_unit()) continue;
        bool comparable = true;
        for (int k = 0; k < 2; ++k) {
          if (a.child_blocks(k) > b.child_blocks(k)) comparable = false;
        }
        if (comparable && tensor_leq(a, b)) CHECK(rb <= ra + 1e-12);
      }
    }
    // Deficits deepen with j.
    CHECK(table.rate(MergeTensor::unit({2, 0})) >=
          table.rate(MergeTensor::unit({2, 1})) - 1e-12);
  }

  SUBCASE("insufficient partial coverage") {
    auto partial = xi_rate_table(example_spec(), 3);
    CHECK_THROWS_AS(complete_rates_by_consistency(partial, 4), IncompleteTableError);
  }
}

TEST_CASE("single-type specialization against an independent oracle") {
  SplitMix64 rng(314159);
  for (int trial = 0; trial < 20; ++trial) {
    XiSpec spec;
    spec.a = {rng.next_double()};
    const int support = 1 + static_cast<int>(rng.next_below(3));
    XiAtom atom;
    atom.mass = 0.1 + rng.next_double();
    double remaining = 1.0;
    for (int i = 0; i < support; ++i) {
      const double x = remaining * (0.2 + 0.6 * rng.next_double()) /
                       static_cast<double>(support);
      atom.x.push_back(x);
      atom.y.push_back(0);
      remaining -= x;
    }
    std::sort(atom.x.begin(), atom.x.end(), std::greater<double>());
    spec.atoms.push_back(atom);

    for (const std::vector<int>& exponents :
         {std::vector<int>{2}, {3}, {2, 2}, {4}, {3, 2}, {2, 2, 2}}) {
      auto tensor = MergeTensor::diagonal(1, {exponents});
      const double expected = single_type_rate_oracle(spec.a[0], spec.atoms, exponents);
      CHECK(xi_rate(spec, tensor) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("moment measures Q_j") {
  SUBCASE("Kingman weights appear as Dirac mass at the origin") {
    XiSpec spec;
    spec.a = {0.7, 0.0};
    auto check = qj_moment_check(spec, MergeTensor::diagonal(2, {{2}, {}}));
    CHECK(check.integral == doctest::Approx(0.7));
    CHECK(check.rate == doctest::Approx(0.7));
    // Exponent above 2 kills the Dirac at 0.
    auto higher = qj_moment_check(spec, MergeTensor::diagonal(2, {{3}, {}}));
    CHECK(higher.integral == 0.0);
    CHECK(higher.rate == 0.0);
  }

  SUBCASE("zero measure integrates to zero") {
    FiniteMeasure zero;
    zero.j = {1};
    CHECK(zero.moment_integral(MergeTensor::diagonal(1, {{2}})) == 0.0);
  }

  SUBCASE("a hand-built Dirac point") {
    FiniteMeasure dirac;
    dirac.j = {1};
    dirac.points.push_back({2.0, {{0.3}}});
    CHECK(dirac.moment_integral(MergeTensor::diagonal(1, {{4}})) ==
          doctest::Approx(0.18).epsilon(1e-12));
  }

  SUBCASE("the induced measure reproduces xi_rate on the example spec") {
    auto spec = example_spec();
    for (const auto& diag :
         {std::vector<std::vector<int>>{{2}, {}}, {{3}, {}}, {{2}, {2}}, {{}, {2}},
          std::vector<std::vector<int>>{{2, 2}, {}}}) {
      auto tensor = MergeTensor::diagonal(2, diag);
      auto check = qj_moment_check(spec, tensor);
      CHECK(check.integral == doctest::Approx(check.rate).epsilon(1e-12));
    }
  }
}

TEST_CASE("strong mutation expansion") {
  auto expansion = strong_mutation_expansion(3, 2, 2);

  SUBCASE("A is the paper-style projection with d^{-|pi|} blocks") {
    for (size_t row = 0; row < 2; ++row) {
      for (size_t col = 0; col < 2; ++col) CHECK(expansion.a.p[row][col] == ratio(1, 2));
      for (size_t col = 2; col < 6; ++col) CHECK(expansion.a.p[row][col] == 0);
    }
    for (size_t row = 2; row < 6; ++row) {
      for (size_t col = 0; col < 2; ++col) CHECK(expansion.a.p[row][col] == 0);
      for (size_t col = 2; col < 6; ++col) CHECK(expansion.a.p[row][col] == ratio(1, 4));
    }
  }

  SUBCASE("A is stochastic and a projection") {
    const auto& a = expansion.a.p;
    for (size_t row = 0; row < 6; ++row) {
      Rational sum = 0;
      for (size_t col = 0; col < 6; ++col) sum += a[row][col];
      CHECK(sum == 1);
    }
    for (size_t row = 0; row < 6; ++row) {
      for (size_t col = 0; col < 6; ++col) {
        Rational entry = 0;
        for (size_t mid = 0; mid < 6; ++mid) entry += a[row][mid] * a[mid][col];
        CHECK(entry == a[row][col]);
      }
    }
  }

  SUBCASE("B matches the explicit correction matrix") {
    const auto& b = expansion.b.p;
    for (size_t col = 0; col < 6; ++col) {
      CHECK(b[0][col] == 0);
      CHECK(b[1][col] == 0);
    }
    const Rational q = ratio(1, 4);
    const Rational h = ratio(-1, 2);
    std::vector<std::vector<Rational>> expected = {
        {q, q, h, q, q, h},
        {q, q, -q, Rational(0), Rational(0), -q},
        {q, q, -q, Rational(0), Rational(0), -q},
        {q, q, h, q, q, h},
    };
    for (size_t row = 0; row < 4; ++row) {
      for (size_t col = 0; col < 6; ++col) CHECK(b[row + 2][col] == expected[row][col]);
    }
  }

  SUBCASE("P_N entries at M = 3") {
    CHECK(expansion.p_n.p[2][0] == ratio(1, 30));  // (M-1)/(4M(2M-1))
    CHECK(expansion.p_n.p[0][0] == ratio(1, 2));
    CHECK(expansion.p_n.p[3][3] == ratio(1, 4));
    CHECK(expansion.c_n == ratio(1, 6));
  }

  SUBCASE("the residual is o(c_N): halving c_N quarters it") {
    double previous = -1.0;
    for (long M : {10L, 20L, 40L, 80L}) {
      auto e = strong_mutation_expansion(M, 2, 2);
      const double res = e.residual.get_d();
      if (previous >= 0) CHECK(res <= 0.6 * previous);
      previous = res;
    }
  }
}

TEST_CASE("discrete-time limit matrices") {
  SUBCASE("uniform rho recovers the strong-mutation projection") {
    auto limit = discrete_limit_matrix({{0.5, 0.5}, {0.5, 0.5}}, 2);
    auto expansion = strong_mutation_expansion(5, 2, 2);
    for (size_t row = 0; row < 6; ++row) {
      for (size_t col = 0; col < 6; ++col) {
        CHECK(limit.p[row][col] ==
              doctest::Approx(expansion.a.p[row][col].get_d()).epsilon(1e-14));
      }
    }
  }

  SUBCASE("identity rho freezes the labels") {
    auto limit = discrete_limit_matrix({{1.0, 0.0}, {0.0, 1.0}}, 2);
    for (size_t row = 0; row < 6; ++row) {
      for (size_t col = 0; col < 6; ++col) {
        CHECK(limit.p[row][col] == (row == col ? 1.0 : 0.0));
      }
    }
  }

  SUBCASE("rows sum to one") {
    auto limit = discrete_limit_matrix({{0.25, 0.5}, {0.75, 0.5}}, 3);
    for (const auto& row : limit.p) {
      CHECK(std::accumulate(row.begin(), row.end(), 0.0) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("column sums are validated") {
    CHECK_THROWS_AS(discrete_limit_matrix({{0.5, 0.5}, {0.4, 0.5}}, 2),
                    std::invalid_argument);
  }

  SUBCASE("scaled mutation models approach their discrete limit") {
    const auto base = mutation_desk_model();
    std::vector<std::vector<double>> rho(3, std::vector<double>(3));
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 3; ++l) {
        rho[k][l] = static_cast<double>(base.count(k, l)) / base.size(l);
      }
    }
    auto limit = discrete_limit_matrix(rho, 2);
    double previous = 1e9;
    for (long c : {10L, 100L, 1000L}) {
      std::vector<long> sizes = {4 * c, 5 * c, 7 * c};
      std::vector<std::vector<long>> counts(3, std::vector<long>(3));
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) counts[k][l] = base.count(k, l) * c;
      }
      auto exact = transition_matrix(CanningsModel::mutation(sizes, counts), 2);
      double gap = 0.0;
      for (size_t row = 0; row < exact.states.size(); ++row) {
        for (size_t col = 0; col < exact.states.size(); ++col) {
          gap = std::max(gap, std::abs(exact.p[row][col].get_d() - limit.p[row][col]));
        }
      }
      CHECK(gap < previous);
      previous = gap;
    }
    CHECK(previous < 5.0 / 1000.0);
  }
}

TEST_CASE("weak-mutation calibration toward the multi-type Kingman coalescent") {
  // Family N = (m, 2m) with off-diagonal counts 2: a = (1, 1/2).
  const std::vector<double> a = {1.0, 0.5};
  std::vector<std::vector<double>> previous;
  for (long m : {100L, 1000L, 10000L}) {
    auto model =
        CanningsModel::wright_fisher({m, 2 * m}, {{m - 2, 2}, {2, 2 * m - 2}});
    std::vector<std::vector<double>> gaps(2, std::vector<double>(2));
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 2; ++l) {
        const double scaled =
            static_cast<double>(m) * coalescence_probability(model, k, l, l).get_d();
        gaps[k][l] = std::abs(scaled - (k == l ? a[k] : 0.0));
      }
    }
    if (!previous.empty()) {
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) CHECK(gaps[k][l] < previous[k][l]);
      }
    }
    previous = gaps;
  }
  CHECK(previous[0][0] < 1e-3);
  CHECK(previous[1][1] < 1e-3);
}

TEST_CASE("coalescent simulation") {
  SUBCASE("zero generator never leaves the initial state") {
    auto generator = limit_generator(kingman_rates({0.0, 0.0}), 2);
    SplitMix64 rng(8);
    auto initial = LabeledPartition::singletons(2, 2, {0, 1});
    auto trajectory = simulate_coalescent(generator, initial, 50.0, rng);
    REQUIRE(trajectory.path.size() == 1);
    CHECK(trajectory.path[0].first == 0.0);
    CHECK(trajectory.path[0].second == initial);
  }

  SUBCASE("absorbing states end the trajectory") {
    auto generator = limit_generator(kingman_rates({1.0, 1.0}), 2);
    SplitMix64 rng(9);
    auto initial = LabeledPartition::singletons(2, 2, {0, 0});
    auto trajectory = simulate_coalescent(generator, initial, 1e9, rng);
    REQUIRE(trajectory.path.size() == 2);
    CHECK(trajectory.path[1].second.block_count() == 1);
  }

  SUBCASE("merge times of a rate-1 pair average to 1") {
    auto generator = limit_generator(kingman_rates({1.0, 0.5}), 2);
    SplitMix64 rng(10);
    auto initial = LabeledPartition::singletons(2, 2, {0, 0});
    const int reps = 20000;
    double sum = 0.0;
    int merged = 0;
    for (int r = 0; r < reps; ++r) {
      auto trajectory = simulate_coalescent(generator, initial, 1e9, rng);
      if (trajectory.path.size() > 1) {
        sum += trajectory.path[1].first;
        ++merged;
      }
    }
    REQUIRE(merged == reps);
    const double se = 1.0 / std::sqrt(static_cast<double>(reps));
    CHECK(std::abs(sum / reps - 1.0) < 4 * se);
  }

  SUBCASE("unknown initial state") {
    auto generator = limit_generator(kingman_rates({1.0}), 2);
    SplitMix64 rng(11);
    CHECK_THROWS_AS(
        simulate_coalescent(generator, LabeledPartition::singletons(3, 1, {0, 0, 0}), 1.0, rng),
        std::invalid_argument);
  }
}

TEST_CASE("Xi spec JSON round trip and validation") {
  auto spec = example_spec();
  auto j = xi_spec_to_json(spec);
  CHECK(j["atoms"][0]["y"] == std::vector<int>{1, 2});  // labels 1-based on disk
  auto back = xi_spec_from_json(j);
  CHECK(back.a == spec.a);
  REQUIRE(back.atoms.size() == 1);
  CHECK(back.atoms[0].y == spec.atoms[0].y);

  XiSpec bad;
  bad.a = {0.0};
  bad.atoms.push_back({1.0, {0.25, 0.5}, {0, 0}});  // increasing frequencies
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  XiSpec negative;
  negative.a = {-1.0};
  CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
}
