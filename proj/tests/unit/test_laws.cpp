#include <stdexcept>

#include "doctest.h"
#include "mtcoal/errors.hpp"
#include "mtcoal/json_io.hpp"
#include "mtcoal/laws.hpp"

using namespace mtcoal;

TEST_CASE("consistency recursion holds exactly") {
  SUBCASE("Wright-Fisher desk instance") {
    auto report = check_consistency(wf_desk_model(), 3);
    CHECK(report.pass());
    CHECK(report.worst_residual == "0");
    CHECK(report.cases_checked > 100);
  }
  SUBCASE("mutation desk instance") {
    auto report = check_consistency(mutation_desk_model(), 3);
    CHECK(report.pass());
    CHECK(report.worst_residual == "0");
  }
  SUBCASE("single-type model reduces to the classical recursion") {
    auto report = check_consistency(CanningsModel::wright_fisher({6}, {{6}}), 4);
    CHECK(report.pass());
    CHECK(report.worst_residual == "0");
  }
  SUBCASE("a skewed custom oracle violates the recursion") {
    // Deliberately broken moments: every moment 1/2 except the empty product.
    CustomLaw law;
    auto base = wf_desk_model();
    law.sampler = [base](SplitMix64& rng) { return sample_generation(base, rng); };
    law.moment_oracle = [](const MergeTensor& t) {
      return t.total_parent_blocks() == 0 ? Rational(1) : ratio(1, 2);
    };
    auto model = CanningsModel::custom({4, 6}, law);
    auto report = check_consistency(model, 2);
    CHECK_FALSE(report.pass());
  }
}

TEST_CASE("monotonicity of Phi") {
  SUBCASE("Wright-Fisher desk instance") {
    auto report = check_monotonicity(wf_desk_model(), 3);
    CHECK(report.pass());
  }
  SUBCASE("mutation desk instance vanishes above entry 1 and stays monotone") {
    auto report = check_monotonicity(mutation_desk_model(), 3);
    CHECK(report.pass());
  }
  SUBCASE("unit versus doubled diagonal tensors directly") {
    auto model = wf_desk_model();
    for (const std::vector<int>& j :
         {std::vector<int>{1, 0}, {0, 1}, {1, 1}, {2, 0}}) {
      auto one = MergeTensor::unit(j);
      auto two = MergeTensor::filled_diagonal(j, 2);
      CHECK(phi(model, two) <= phi(model, one));
    }
  }
}

TEST_CASE("natural coupling (lumpability under restriction)") {
  auto model = wf_desk_model();

  SUBCASE("n=3 to m=2") {
    auto report = check_natural_coupling(model, 3, 2);
    CHECK(report.pass());
    CHECK(report.worst_residual == "0");
  }
  SUBCASE("identity at n=m") {
    auto report = check_natural_coupling(model, 2, 2);
    CHECK(report.pass());
  }
  SUBCASE("mutation instance restricted to the type chain") {
    auto report = check_natural_coupling(mutation_desk_model(), 3, 1);
    CHECK(report.pass());
  }
  SUBCASE("composition: passing (3,2), (2,1) and (3,1) on the same instance") {
    CHECK(check_natural_coupling(model, 3, 2).pass());
    CHECK(check_natural_coupling(model, 2, 1).pass());
    CHECK(check_natural_coupling(model, 3, 1).pass());
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(check_natural_coupling(model, 2, 3), std::invalid_argument);
    CHECK_THROWS_AS(check_natural_coupling(model, 2, 0), std::invalid_argument);
  }
}

TEST_CASE("permutation symmetry of the transition matrix") {
  SUBCASE("both desk instances at n = 2") {
    CHECK(check_permutation_symmetry(wf_desk_model(), 2).pass());
    CHECK(check_permutation_symmetry(mutation_desk_model(), 2).pass());
  }
  SUBCASE("Wright-Fisher at n = 3") {
    auto report = check_permutation_symmetry(wf_desk_model(), 3);
    CHECK(report.pass());
    CHECK(report.worst_residual == "0");
  }
  SUBCASE("swapping the sample relabels rows pi_4 and pi_5 consistently") {
    auto matrix = transition_matrix(wf_desk_model(), 2);
    // sigma = (1 2) maps pi_4 to pi_5; the rows must agree after permuting
    // the targets, and pi_4/pi_5 themselves swap.
    CHECK(matrix.p[3][0] == matrix.p[4][0]);
    CHECK(matrix.p[3][3] == matrix.p[4][4]);
    CHECK(matrix.p[3][4] == matrix.p[4][3]);
  }
}

namespace {

CanningsModel wf_weak_member(long m) {
  return CanningsModel::wright_fisher({m, 2 * m}, {{m - 2, 2}, {2, 2 * m - 2}});
}

CanningsModel wf_strong_member(long M) {
  return CanningsModel::wright_fisher({2 * M, 2 * M}, {{M, M}, {M, M}});
}

}  // namespace

TEST_CASE("identity limit criterion along model sequences") {
  SUBCASE("weak mutation family converges to the identity") {
    auto report = check_identity_limit({wf_weak_member(10), wf_weak_member(100),
                                        wf_weak_member(1000)});
    CHECK(report.pass());
    REQUIRE(report.notes.size() >= 2);
    CHECK(report.notes[0] == "moment criteria trend to 1: yes");
    CHECK(report.notes[1] == "matrix entries trend to identity: yes");
  }
  SUBCASE("strong mutation family does not, and the criterion agrees") {
    auto report = check_identity_limit({wf_strong_member(10), wf_strong_member(20),
                                        wf_strong_member(40)});
    CHECK(report.pass());  // the equivalence holds: neither side trends
    CHECK(report.notes[0] == "moment criteria trend to 1: no");
    CHECK(report.notes[1] == "matrix entries trend to identity: no");
  }
  SUBCASE("constant family trends nowhere") {
    auto report = check_identity_limit({wf_desk_model(), wf_desk_model(), wf_desk_model()});
    CHECK(report.pass());
    CHECK(report.notes[0] == "moment criteria trend to 1: no");
  }
  SUBCASE("too short") {
    CHECK_THROWS_AS(check_identity_limit({wf_desk_model()}), std::invalid_argument);
  }
}

TEST_CASE("M-EPPF axioms on finite tables") {
  auto model = wf_desk_model();
  auto table = PpfTable::from_model(model, 3);

  SUBCASE("the Phi table passes all three axioms") {
    auto report = check_meppf(table);
    CHECK(report.pass());
    CHECK(report.worst_residual == "0");
    CHECK(report.cases_checked > 100);
  }

  SUBCASE("broken normalization is named first") {
    auto bad = table;
    bad.set(MergeTensor::empty(2), ratio(9, 10));
    auto report = check_meppf(bad);
    CHECK_FALSE(report.pass());
    REQUIRE(!report.notes.empty());
    CHECK(report.notes.back() == "first failing axiom: normalization");
  }

  SUBCASE("a perturbed symmetric pair is caught and named") {
    auto bad = table;
    MergeTensor skewed(2, {{{2, 1}, {0, 0}}, {{}, {}}});
    auto value = bad.get(skewed);
    REQUIRE(value.has_value());
    bad.set(skewed, *value + ratio(1, 100));
    auto report = check_meppf(bad);
    CHECK_FALSE(report.pass());
    CHECK(report.notes.back() == "first failing axiom: symmetry");
    bool named = false;
    for (const auto& v : report.violations) {
      if (v.find("symmetry") != std::string::npos &&
          v.find("t[1,1]=(2,1)") != std::string::npos) {
        named = true;
      }
    }
    CHECK(named);
  }

  SUBCASE("an unclosed table is an incomplete-table error") {
    PpfTable sparse(2, 3);
    sparse.set(MergeTensor::empty(2), Rational(1));
    auto one = MergeTensor::unit({1, 0});
    sparse.set(one, phi(model, one));
    CHECK_THROWS_AS(check_meppf(sparse), IncompleteTableError);
  }

  SUBCASE("tables round trip through JSON") {
    auto j = ppf_table_to_json(table);
    auto back = ppf_table_from_json(j);
    CHECK(back.size() == table.size());
    CHECK(check_meppf(back).pass());
  }
}
