#include <gtest/gtest.h>

#include "contextum/catalog.hpp"
#include "contextum/kosp/assignments.hpp"
#include "contextum/kosp/interpret.hpp"
#include "contextum/kosp/nogo.hpp"
#include "contextum/kosp/vectors.hpp"
#include "helpers.hpp"

using namespace contextum;
using namespace contextum::kosp;
using testing_support::q;

namespace {

KSScenario const& pm() { return catalog::peres_mermin_scenario(); }

Rational tuple_product(SpectralObservable const* const* ms, JointOutcome const& t) {
  Rational p{1};
  for (std::size_t k = 0; k < t.size(); ++k) p *= ms[k]->eigenvalues[t[k]];
  return p;
}

KSScenario single_z() {
  return make_scenario({SpectralObservable::from_involution("Z", quantum::pauli::Z())}, {});
}

VectorScenario standard_basis(std::size_t d) {
  VectorScenario vs;
  vs.dimension = d;
  std::vector<std::size_t> basis;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<Rational> e(d);
    e[i] = Rational{1};
    vs.vectors.push_back(std::move(e));
    basis.push_back(i);
  }
  vs.bases.push_back(basis);
  return vs;
}

/// Exhaustive {0,1} colouring count straight from the definition.
std::size_t brute_colorings(VectorScenario const& vs) {
  auto const n = vs.vectors.size();
  std::size_t count = 0;
  for (unsigned long bits = 0; bits < (1UL << n); ++bits) {
    auto on = [&](std::size_t i) { return (bits >> i) & 1; };
    bool ok = true;
    for (auto const& b : vs.bases) {
      std::size_t ones = 0;
      for (auto i : b) ones += on(i);
      ok = ok && ones == 1;
      if (!ok) break;
    }
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if (on(i) && on(j) && inner(vs.vectors[i], vs.vectors[j]).is_zero()) ok = false;
    count += ok;
  }
  return count;
}

}  // namespace

TEST(JointSpectrum, PeresMerminRowsAndColumns) {
  for (std::size_t c = 0; c < 6; ++c) {
    auto const ms = pm().members(pm().contexts[c]);
    auto const spectrum = joint_spectrum(ms);
    ASSERT_EQ(spectrum.size(), 4u);
    // Columns are listed after rows; the third column (A13, A23, A33) has product -1.
    bool const third_column = pm().contexts[c] == Key{"A13", "A23", "A33"};
    for (auto const& t : spectrum) EXPECT_EQ(tuple_product(ms.data(), t), third_column ? q(-1) : q(1));
  }
  EXPECT_EQ(pm().tuple_label({"A11", "A12", "A13"}, {0, 1, 1}), "(+1,-1,-1)");
}

TEST(JointSpectrum, SingleObservableAndNonCommuting) {
  auto const z = SpectralObservable::from_involution("Z", quantum::pauli::Z());
  EXPECT_EQ(joint_spectrum(std::vector<SpectralObservable>{z}), (std::vector<JointOutcome>{{0}, {1}}));
  EXPECT_THROW((void)joint_spectrum(std::vector<SpectralObservable>{pm().at("A11"), pm().at("A22")}), InputError);
}

TEST(Scenario, ContextsCommuteAndCrossPairsDoNot) {
  EXPECT_TRUE(validate_scenario(pm()).holds);
  EXPECT_FALSE(quantum::commute(pm().at("A11"), pm().at("A22")));
  EXPECT_FALSE(quantum::commute(pm().at("A12"), pm().at("A21")));
  auto bad = pm();
  bad.contexts.push_back({"A11", "A22"});
  bad.admissible.push_back({});
  auto const v = validate_scenario(bad);
  EXPECT_FALSE(v.holds);
  EXPECT_EQ(v.witnesses.front().kind, "non-commuting-context");
}

TEST(ValueAssignments, PeresMerminHasNone) {
  EXPECT_EQ(candidate_count(pm()), 512u);
  EXPECT_TRUE(enumerate_value_assignments(pm()).empty());
  EXPECT_EQ(testing_support::pm_bruteforce_assignments(), 0u);
}

TEST(ValueAssignments, RowOneAloneHasFour) {
  auto const row = restrict_contexts(pm(), {0});
  EXPECT_EQ(row.observables.size(), 3u);
  auto const a = enumerate_value_assignments(row);
  ASSERT_EQ(a.size(), 4u);
  for (auto const& x : a) EXPECT_EQ(x.values.at("A11") * x.values.at("A12") * x.values.at("A13"), q(1));
  // Canonical order: lexicographic in eigenvalue indices, observable order.
  std::vector<std::vector<std::size_t>> idx;
  for (auto const& x : a) {
    std::vector<std::size_t> v;
    for (auto const& o : row.observables)
      v.push_back(static_cast<std::size_t>(std::find(o.eigenvalues.begin(), o.eigenvalues.end(), x.values.at(o.id)) - o.eigenvalues.begin()));
    idx.push_back(std::move(v));
  }
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  EXPECT_EQ(idx.front(), (std::vector<std::size_t>{0, 0, 0}));
}

TEST(ValueAssignments, SingleObservableHasTwo) { EXPECT_EQ(enumerate_value_assignments(single_z()).size(), 2u); }

TEST(ValueAssignments, CapacityError) {
  EXPECT_THROW((void)enumerate_value_assignments(pm(), 511), CapacityError);
  try {
    (void)enumerate_value_assignments(pm(), 100);
  } catch (CapacityError const& e) {
    EXPECT_EQ(e.required(), 512u);
    EXPECT_EQ(e.cap(), 100u);
  }
}

TEST(ValueAssignments, SubScenariosMatchBruteForce) {
  // Every subset of the six contexts: enumeration equals a direct scan of
  // all sign assignments against the products of the operators.
  for (unsigned mask = 1; mask < 64; ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t c = 0; c < 6; ++c)
      if (mask >> c & 1) idx.push_back(c);
    auto const sub = restrict_contexts(pm(), idx);
    auto const n = sub.observables.size();
    std::size_t expected = 0;
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      std::map<std::string, int> sign;
      for (std::size_t k = 0; k < n; ++k) sign[sub.observables[k].id] = (bits >> k & 1) ? -1 : 1;
      bool ok = true;
      for (auto const& ctx : sub.contexts) {
        int prod = 1;
        for (auto const& id : ctx) prod *= sign[id];
        int const want = ctx == Key{"A13", "A23", "A33"} ? -1 : 1;
        ok = ok && prod == want;
      }
      expected += ok;
    }
    EXPECT_EQ(enumerate_value_assignments(sub).size(), expected) << mask;
  }
}

TEST(Parity, PeresMerminObstruction) {
  auto const p = parity_argument(pm());
  EXPECT_TRUE(p.applicable);
  EXPECT_TRUE(p.obstruction);
  EXPECT_EQ(p.context_signs, (std::vector<int>{1, 1, 1, 1, 1, -1}));
  EXPECT_FALSE(parity_argument(restrict_contexts(pm(), {0})).applicable);
}

TEST(VectorColoring, SmallBases) {
  EXPECT_EQ(color_vectors(standard_basis(2)).size(), 2u);
  EXPECT_EQ(color_vectors(standard_basis(3)).size(), 3u);
  EXPECT_EQ(color_vectors(standard_basis(3)), (std::vector<std::vector<int>>{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}}));
}

TEST(VectorColoring, EighteenVectorsHaveNone) {
  auto const& vs = catalog::kochen_specker_18();
  EXPECT_TRUE(validate_vector_scenario(vs).holds);
  EXPECT_TRUE(color_vectors(vs).empty());
  EXPECT_EQ(brute_colorings(vs), 0u);
  // Each vector lies in exactly two bases.
  std::vector<int> uses(vs.vectors.size());
  for (auto const& b : vs.bases)
    for (auto i : b) ++uses[i];
  EXPECT_TRUE(std::all_of(uses.begin(), uses.end(), [](int u) { return u == 2; }));
}

TEST(VectorColoring, DroppingABasisAllowsColorings) {
  auto vs = catalog::kochen_specker_18();
  vs.bases.pop_back();
  auto const got = color_vectors(vs);
  EXPECT_EQ(got.size(), brute_colorings(vs));
  EXPECT_FALSE(got.empty());
}

TEST(VectorColoring, OrthogonalityBeyondBases) {
  // e1, e2 and (1,1,0) with basis {e1,e2,e3}: e3 is orthogonal to (1,1,0).
  auto vs = standard_basis(3);
  vs.vectors.push_back({q(1), q(1), q(0)});
  auto const got = color_vectors(vs);
  EXPECT_EQ(got.size(), brute_colorings(vs));
  for (auto const& c : got) EXPECT_FALSE(c[2] == 1 && c[3] == 1);
}

TEST(VectorScenario, ValidationWitnesses) {
  VectorScenario vs;
  vs.dimension = 2;
  vs.vectors = {{q(1), q(0)}, {q(1), q(1)}, {q(0), q(0)}, {q(1)}};
  vs.bases = {{0, 1}};
  auto v = validate_vector_scenario(vs);
  EXPECT_FALSE(v.holds);
  vs.vectors.resize(2);
  v = validate_vector_scenario(vs);
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.witnesses.front().kind, "not-orthogonal");
  vs.bases = {{0, 0}};
  EXPECT_EQ(validate_vector_scenario(vs).witnesses.front().kind, "basis-shape");
  EXPECT_THROW((void)color_vectors(vs), ValidationError);
  EXPECT_THROW((void)color_vectors(catalog::kochen_specker_18(), 1000), CapacityError);
}

TEST(InterpretOneToOne, PeresMermin) {
  auto const t = interpret_one_to_one(pm());
  EXPECT_EQ(t.skeleton.measurements.size(), 9u);
  EXPECT_EQ(t.skeleton.contexts.size(), 6u);
  EXPECT_EQ(t.skeleton.preparations, std::vector<std::string>{"mixed"});
  EXPECT_EQ(t, catalog::peres_mermin_theory());
}

TEST(InterpretOneToOne, EigenstateAndSingleObservable) {
  auto const t = interpret_one_to_one(pm(), {{"00", quantum::DensityOperator::basis_state(4, 0)}});
  EXPECT_EQ(t.table({"A13"}, "00").weights, (std::vector<Rational>{q(1), q(0)}));
  EXPECT_EQ(t.skeleton.preparations, (std::vector<std::string>{"00", "mixed"}));
  auto const single = interpret_one_to_one(single_z());
  EXPECT_EQ(single.skeleton.measurements.size(), 1u);
  EXPECT_EQ(single.table({"Z"}, "mixed"), uniform({2}));
}

TEST(InterpretFineGrained, PeresMerminStructure) {
  auto const& fg = catalog::peres_mermin_fine_grained();
  auto const& sk = fg.theory.skeleton;
  std::size_t four = 0, two = 0;
  for (auto const& m : sk.measurements) (m.outcomes.size() == 4 ? four : two) += 1;
  EXPECT_EQ(four, 6u);
  EXPECT_EQ(two, 18u);
  EXPECT_EQ(fg.claims.size(), 9u);
  EXPECT_FALSE(std::any_of(sk.contexts.begin(), sk.contexts.end(), [](auto const& c) { return c.size() > 2; }));
  EXPECT_TRUE(check_equivalence_premises(fg.theory, fg.claims).holds);
  bool a11 = std::any_of(fg.claims.begin(), fg.claims.end(), [](auto const& c) {
    return c.first.str() == "A11:A11.A12.A13" && c.second.str() == "A11:A11.A21.A31" && c.is_identity();
  });
  EXPECT_TRUE(a11);
  auto const& row = sk.at("A11.A12.A13");
  EXPECT_EQ(row.outcomes.front(), "(+1,+1,+1)");
}

TEST(InterpretFineGrained, ClaimsHoldAtSuppliedStates) {
  std::map<std::string, quantum::DensityOperator> states;
  for (std::size_t k = 0; k < 4; ++k) states.emplace("basis" + std::to_string(k), quantum::DensityOperator::basis_state(4, k));
  quantum::Vector plus{q(1), q(1), q(1), q(1)};
  states.emplace("plus", quantum::DensityOperator::from_certificate({{q(1, 4)}, {plus}}, 4));
  auto const fg = interpret_fine_grained(pm(), states);
  EXPECT_EQ(fg.theory.skeleton.preparations.size(), 6u);
  EXPECT_TRUE(check_equivalence_premises(fg.theory, fg.claims).holds);
  EXPECT_TRUE(check_nondisturbance(fg.theory).holds);
}

TEST(InterpretFineGrained, DisjointContextsGiveNoClaims) {
  auto const rows = restrict_contexts(pm(), {0, 1});
  EXPECT_TRUE(interpret_fine_grained(rows).claims.empty());
}

TEST(InterpretCustom, RowOneFineGrained) {
  Interpretation interp{Mode::custom, {}};
  for (auto const& c : pm().contexts) interp.grouping[c] = Treatment::one_to_one;
  interp.grouping[{"A11", "A12", "A13"}] = Treatment::fine_grained;
  auto const out = interpret_custom(pm(), interp);
  auto const& sk = out.theory.skeleton;
  std::size_t four = 0, derived = 0, plain = 0;
  for (auto const& m : sk.measurements) {
    if (m.outcomes.size() == 4) {
      ++four;
    } else if (m.id.find(':') != std::string::npos) {
      ++derived;
    } else {
      ++plain;
    }
  }
  EXPECT_EQ(four, 1u);
  EXPECT_EQ(plain, 6u);
  EXPECT_EQ(derived, 3u);
  // Row-1 observables sit in the one-to-one columns through their derived
  // measurements, so no second realisation needs a claim.
  EXPECT_TRUE(out.claims.empty());
  EXPECT_TRUE(sk.is_commeasurable({"A11:A11.A12.A13", "A21", "A31"}));
  EXPECT_TRUE(validate_theory(out.theory).holds);
  EXPECT_TRUE(check_nondisturbance(out.theory).holds);
}

TEST(InterpretCustom, DegenerateGroupingsReproducePureInterpretations) {
  auto const fine = interpret_custom(pm(), {Mode::fine_grained, {}});
  EXPECT_EQ(fine, interpret_fine_grained(pm()));
  Interpretation all_fine{Mode::custom, {}};
  Interpretation all_one{Mode::custom, {}};
  for (auto const& c : pm().contexts) {
    all_fine.grouping[c] = Treatment::fine_grained;
    all_one.grouping[c] = Treatment::one_to_one;
  }
  EXPECT_EQ(interpret_custom(pm(), all_fine), interpret_fine_grained(pm()));
  auto const one = interpret_custom(pm(), all_one);
  EXPECT_EQ(one.theory, interpret_one_to_one(pm()));
  EXPECT_TRUE(one.claims.empty());
}

TEST(InterpretCustom, IncompleteGroupingIsInputError) {
  Interpretation interp{Mode::custom, {{{"A11", "A12", "A13"}, Treatment::one_to_one}}};
  EXPECT_THROW((void)interpret_custom(pm(), interp), InputError);
  Interpretation unknown{Mode::custom, {{{"A11", "A22"}, Treatment::one_to_one}}};
  EXPECT_THROW((void)interpret_custom(pm(), unknown), InputError);
}

TEST(NoGo, PeresMermin) {
  auto const r = no_go_report(pm());
  EXPECT_EQ(r.candidates, 512u);
  EXPECT_EQ(r.assignment_count, 0u);
  EXPECT_TRUE(r.excludes_simultaneous_nc);
  EXPECT_TRUE(r.excludes_measurement_nc);
  EXPECT_TRUE(r.parity.obstruction);
  EXPECT_FALSE(r.reasoning.empty());
}

TEST(NoGo, RowOneAndSingleObservable) {
  auto const r = no_go_report(restrict_contexts(pm(), {0}));
  EXPECT_EQ(r.assignment_count, 4u);
  EXPECT_FALSE(r.excludes_simultaneous_nc);
  EXPECT_FALSE(r.excludes_measurement_nc);
  auto const s = no_go_report(single_z());
  EXPECT_EQ(s.assignment_count, 2u);
  EXPECT_FALSE(s.excludes_simultaneous_nc);
}

TEST(Bridge, PeresMerminBothReadings) {
  auto const one = bridge_one_to_one(pm());
  EXPECT_EQ(one.assemblies, 4096u);
  EXPECT_TRUE(one.bijective);
  EXPECT_TRUE(one.induced.empty());
  auto const fine = bridge_fine_grained(pm());
  EXPECT_TRUE(fine.bijective);
  EXPECT_TRUE(fine.induced.empty());
}

TEST(Bridge, RowAndColumnPair) {
  auto const sub = restrict_contexts(pm(), {0, 3});  // row 1 and column 1 share A11
  auto const one = bridge_one_to_one(sub);
  EXPECT_EQ(one.assemblies, 16u);
  EXPECT_TRUE(one.bijective);
  EXPECT_EQ(one.induced.size(), 8u);
  auto const fine = bridge_fine_grained(sub);
  EXPECT_TRUE(fine.bijective);
  EXPECT_EQ(fine.induced.size(), 8u);
}

TEST(AssemblyModel, SingletonRuleDoesNotChangeStatistics) {
  auto const first = one_to_one_assembly_model(pm(), catalog::peres_mermin_theory(), SingletonRule::first_context);
  auto const last = one_to_one_assembly_model(pm(), catalog::peres_mermin_theory(), SingletonRule::last_context);
  EXPECT_NE(first.responses, last.responses);
  EXPECT_EQ(reconstruct_theory(first).tables, reconstruct_theory(last).tables);
  EXPECT_TRUE(check_reproduction(last, catalog::peres_mermin_theory()).holds);
}
