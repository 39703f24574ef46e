// Acceptance run: one line per criterion, nonzero exit if any fails or
// exceeds its time budget.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "contextum/catalog.hpp"
#include "contextum/cli/commands.hpp"
#include "contextum/sheaf/section.hpp"
#include "helpers.hpp"

using namespace contextum;
using namespace testing_support;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

/// Collects failed expectations for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, std::string const& what) {
    if (!ok) failures.push_back(what);
  }
};

struct Criterion {
  int number;
  std::string title;
  double budget_seconds;
  std::function<void(Check&)> body;
};

// ---- criterion 1 ----

void pm_no_go(Check& c) {
  auto const& sc = catalog::peres_mermin_scenario();
  c.expect(kosp::candidate_count(sc) == 512, "512 candidates");
  c.expect(kosp::enumerate_value_assignments(sc).empty(), "no value assignment");
  auto const r = kosp::no_go_report(sc);
  c.expect(r.assignment_count == 0, "report count 0");
  c.expect(r.excludes_simultaneous_nc && r.excludes_measurement_nc, "both flags set");
  c.expect(r.parity.applicable && r.parity.obstruction, "parity argument obstructs");
  c.expect(pm_bruteforce_assignments() == 0, "brute-force oracle finds none");
  // Independent parity: the column-3 operator product is -I, the rest +I,
  // while each observable occurs in exactly two contexts.
  int sign = 1;
  auto const id4 = Matrix::identity(4);
  for (auto const& ctx : sc.contexts) {
    Matrix prod = id4;
    for (auto const& m : ctx) prod = prod * sc.at(m).matrix();
    if (prod == id4 * GaussianRational(Rational{-1})) sign = -sign;
    else c.expect(prod == id4, "context product is +-I");
  }
  c.expect(sign == -1, "product of context signs is -1");
}

// ---- criterion 2 ----

void pm_statistics(Check& c) {
  auto const& rep = catalog::peres_mermin_representation();
  auto const& sc = catalog::peres_mermin_scenario();
  auto const t = quantum::generate_theory(rep);
  auto const half = Rational(1, 2);
  for (auto const& o : rep.observables)
    c.expect(t.table({o.id}, "mixed").weights == std::vector<Rational>{half, half}, o.id + " singleton is 1/2-1/2");
  for (auto const& ctx : rep.contexts) {
    std::vector<Matrix> ops;
    for (auto const& id : ctx) ops.push_back(sc.at(id).matrix());
    auto const oracle = mixed_state_joint(ops);
    c.expect(oracle.size() == 4, key_label(ctx) + " has 4 joint eigenspaces");
    auto const d = t.table(ctx, "mixed");
    auto const ms = sc.members(ctx);
    std::size_t quarters = 0;
    for (std::size_t i = 0; i < d.weights.size(); ++i) {
      auto const digits = decode_joint(i, d.shape);
      std::vector<Rational> tuple;
      for (std::size_t k = 0; k < digits.size(); ++k) tuple.push_back(ms[k]->eigenvalues[digits[k]]);
      bool const admissible = oracle.contains(tuple);
      c.expect(d.weights[i] == (admissible ? Rational(1, 4) : Rational{0}), key_label(ctx) + " joint weight");
      quarters += admissible;
    }
    c.expect(quarters == 4, key_label(ctx) + " four admissible outcomes");
  }
  c.expect(check_nondisturbance(t).holds, "non-disturbance holds exactly");
}

// ---- criterion 3 ----

void fine_grained(Check& c) {
  auto const& sc = catalog::peres_mermin_scenario();
  std::map<std::string, quantum::DensityOperator> states;
  for (std::size_t k = 0; k < 4; ++k) states.emplace("basis" + std::to_string(k), quantum::DensityOperator::basis_state(4, k));
  Vector const plus{Rational{1}, Rational{1}, Rational{1}, Rational{1}};
  Vector const bell{Rational{1}, Rational{0}, Rational{0}, GaussianRational(Rational{0}, Rational{1})};
  states.emplace("plus", quantum::DensityOperator::from_certificate({{Rational(1, 4)}, {plus}}, 4));
  states.emplace("bell_i", quantum::DensityOperator::from_certificate({{Rational(1, 2)}, {bell}}, 4));
  auto const fg = kosp::interpret_fine_grained(sc, states);
  c.expect(fg.claims.size() == 9, "9 equivalence claims");
  for (auto const& claim : fg.claims)
    c.expect(check_equivalence_premises(fg.theory, {claim}).holds, claim.first.str() + " ~ " + claim.second.str() + " holds exactly");
  // Every deterministic ontic state breaks some claim, so no
  // outcome-deterministic model can be measurement-noncontextual.
  auto const fg_mixed = kosp::interpret_fine_grained(sc);
  auto const model = kosp::fine_grained_assembly_model(sc, fg_mixed);
  c.expect(model.ontic_states.size() == 4096, "4096 deterministic assemblies");
  auto const v = check_measurement_nc(model, fg_mixed.claims);
  std::set<std::string> bad;
  for (auto const& w : v.witnesses) bad.insert(w.subject);
  c.expect(bad.size() == model.ontic_states.size(), "every assembly violates a claim");
  auto const bridge = kosp::bridge_fine_grained(sc);
  c.expect(bridge.bijective && bridge.induced.empty(), "bridge to value assignments is bijective (both empty)");
}

// ---- criterion 4 ----

/// y.b < 0 and y.A >= 0, evaluated straight from the model's tables.
bool farkas_by_hand(sheaf::EmpiricalModel const& em, std::vector<Rational> const& y) {
  Rational yb = y.back();
  std::size_t row = 0;
  for (auto const& d : em.distributions)
    for (auto const& w : d.weights) yb += y[row++] * w;
  if (yb.sign() >= 0) return false;
  std::vector<std::size_t> shape;
  for (auto const& m : em.measurements) shape.push_back(m.outcomes.size());
  for (std::size_t g = 0; g < joint_size(shape); ++g) {
    auto const digits = decode_joint(g, shape);
    Rational col = y.back();
    std::size_t offset = 0;
    for (std::size_t k = 0; k < em.cover.size(); ++k) {
      std::vector<std::size_t> local, local_shape;
      for (auto const& id : em.cover[k]) {
        std::size_t pos = 0;
        while (em.measurements[pos].id != id) ++pos;
        local.push_back(digits[pos]);
        local_shape.push_back(shape[pos]);
      }
      col += y[offset + encode_joint(local, local_shape)];
      offset += em.distributions[k].weights.size();
    }
    if (col.sign() < 0) return false;
  }
  return true;
}

void sheaf_verdicts(Check& c) {
  auto const coins = catalog::classical_coins_empirical();
  auto const r = sheaf::find_global_section(coins);
  c.expect(std::holds_alternative<sheaf::GlobalSection>(r), "coins have a global section");
  if (auto const* s = std::get_if<sheaf::GlobalSection>(&r)) {
    for (std::size_t k = 0; k < coins.cover.size(); ++k)
      c.expect(sheaf::section_marginal(coins, *s, k) == coins.distributions[k], "exact coin marginals");
  }
  auto const& pm = catalog::peres_mermin_empirical();
  auto const p = sheaf::find_global_section(pm);
  c.expect(std::holds_alternative<sheaf::FarkasCertificate>(p), "PM at I/4 is infeasible");
  if (auto const* cert = std::get_if<sheaf::FarkasCertificate>(&p)) {
    c.expect(sheaf::verify_certificate(pm, *cert), "certificate verifies");
    c.expect(farkas_by_hand(pm, cert->multipliers), "certificate verifies by direct evaluation");
  }
  std::mt19937 rng(2024);
  int agree = 0, total = 0;
  for (; total < 500; ++total) {
    auto const em = random_consistent_empirical(rng);
    bool const lp = std::holds_alternative<sheaf::GlobalSection>(sheaf::find_global_section(em));
    bool const brute = sheaf::brute_force_section_exists(em);
    agree += lp == brute;
  }
  c.expect(agree == total, std::to_string(total - agree) + " of 500 random models disagree");
}

// ---- criterion 5 ----

void albert(Check& c) {
  auto const& a = catalog::albert_toy_model();
  c.expect(check_reproduction(a.model, a.theory).holds, "reproduction holds");
  auto const m = check_measurement_nc(a.model, {a.claim});
  c.expect(!m.holds, "measurement NC fails under the identity claim");
  c.expect(!m.witnesses.empty() && m.witnesses.front().subject == "above", "first witness at lambda = above");
  auto const s = check_simultaneous_nc(a.model);
  c.expect(s.holds && s.flags.contains(flags::kVacuous), "simultaneous NC holds vacuously");
}

// ---- criterion 6 ----

void pm_contextual(Check& c) {
  auto const& m = catalog::pm_contextual_model();
  c.expect(m.ontic_states.size() == 4096, "4096 ontic states");
  c.expect(is_outcome_deterministic(m).holds, "outcome-deterministic");
  c.expect(check_reproduction(m, catalog::peres_mermin_theory()).holds, "reproduces PM statistics exactly");
  auto const v = check_simultaneous_nc(m);
  c.expect(!v.holds && !v.witnesses.empty(), "simultaneous NC fails with witnesses");
}

// ---- criterion 7 ----

void implication(Check& c) {
  std::mt19937 rng(7);
  int premise = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto const rm = random_nondisturbing_model(rng);
    auto const t = reconstruct_theory(rm.model);
    c.expect(check_nondisturbance(t).holds, "generated theory is non-disturbing");
    auto const claims = find_component_equivalences(t, 9);
    if (!check_measurement_nc(rm.model, claims).holds) continue;
    ++premise;
    c.expect(check_simultaneous_nc(rm.model).holds, "counterexample at trial " + std::to_string(trial));
  }
  c.expect(premise > 0, "premise never held");
}

// ---- criteria 8 and 9 run through the command line ----

class Cli {
 public:
  Cli() : dir_(fs::temp_directory_path() / ("contextum_acceptance_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Cli() { fs::remove_all(dir_); }
  Cli(Cli const&) = delete;
  Cli& operator=(Cli const&) = delete;

  std::string path(std::string const& name) const { return (dir_ / name).string(); }

  std::pair<int, json> run(std::vector<std::string> args) {
    auto const report = path("report.json");
    fs::remove(report);
    args.insert(args.begin(), {"--json", report});
    std::ostringstream out, err;
    int const code = cli::run(args, out, err);
    json j;
    if (fs::exists(report)) j = json::parse(io::read_file(report));
    return {code, j};
  }

  std::string exported(std::string const& key) {
    auto const p = path(key + ".json");
    if (!fs::exists(p)) run({"catalog", "export", key, p});
    return p;
  }

 private:
  fs::path dir_;
};

void independence(Check& c) {
  Cli cli;
  auto const albert = cli.exported("albert");
  auto [snc_code, snc] = cli.run({"check", "snc", albert});
  c.expect(snc_code == 0, "albert: simultaneous NC exits 0");
  c.expect(snc["verdicts"][0]["flags"] == json{flags::kVacuous}, "albert: flagged vacuous");
  c.expect(cli.run({"check", "mnc", albert}).first == 1, "albert: measurement NC exits 1");

  auto const pmc = cli.exported("pm_contextual_model");
  c.expect(cli.run({"check", "snc", pmc}).first == 1, "pm_contextual_model: simultaneous NC exits 1");
  c.expect(cli.run({"check", "reproduce", pmc, "--theory", cli.exported("peres_mermin_theory")}).first == 0,
           "pm_contextual_model: reproduction exits 0");
  // At the single preparation I/4 every singleton is uniform, so the
  // discovered pairs are exactly the trivial ones; at generic states none
  // survive.
  auto const& pm = catalog::peres_mermin_theory();
  auto const found = find_operational_equivalences(pm, 4);
  bool trivial = !found.empty();
  for (auto const& e : found) {
    trivial = trivial && pm.table(e.first.key, "mixed") == uniform({2}) && pm.table(e.second.key, "mixed") == uniform({2});
  }
  c.expect(trivial && found.size() == 72, "72 trivial equivalences at I/4");
  std::map<std::string, quantum::DensityOperator> generic;
  generic.emplace("g0", quantum::DensityOperator::from_certificate(
                            {{Rational(1, 30)}, {Vector{Rational{1}, Rational{2}, GaussianRational(Rational{0}, Rational{3}), Rational{-4}}}}, 4));
  generic.emplace("g1", quantum::DensityOperator::from_certificate(
                            {{Rational(1, 15)}, {Vector{Rational{3}, GaussianRational(Rational{1}, Rational{1}), Rational{0}, Rational{2}}}}, 4));
  generic.emplace("g2", quantum::DensityOperator::from_certificate(
                            {{Rational(1, 8)}, {Vector{Rational{1}, GaussianRational(Rational{1}, Rational{1}), Rational{2}, Rational{1}}}}, 4));
  auto const at_generic = kosp::interpret_one_to_one(catalog::peres_mermin_scenario(), generic);
  auto const trimmed = find_operational_equivalences(at_generic, 4);
  c.expect(trimmed.empty(), std::to_string(trimmed.size()) + " equivalences survive at generic states");
}

void cli_contract(Check& c) {
  for (auto const& [key, e] : catalog::entries()) {
    auto const text = io::dump_document(e.payload);
    c.expect(io::dump_document(io::parse_document(text)) == text, key + " round-trips byte-identically");
  }
  Cli cli;
  // validate
  c.expect(cli.run({"validate", cli.exported("peres_mermin_theory")}).first == 0, "validate PM theory -> 0");
  io::write_file(cli.path("short.json"), R"({"kind":"theory","measurements":[{"id":"m","outcomes":["0","1"]}],
      "contexts":[],"preparations":["s"],"tables":[{"measurements":["m"],"preparation":"s","weights":["3/4","0"]}]})");
  c.expect(cli.run({"validate", cli.path("short.json")}).first == 1, "validate 3/4 table -> 1");
  io::write_file(cli.path("truncated.json"), R"({"kind":"theory",)");
  c.expect(cli.run({"validate", cli.path("truncated.json")}).first == 2, "validate truncated -> 2");
  // check
  auto [mnc_code, mnc] = cli.run({"check", "mnc", cli.exported("albert")});
  auto const& w = mnc["verdicts"][0]["witnesses"][0];
  c.expect(mnc_code == 1 && w["measurements"] == json{"m1", "m2"} && w["subject"] == "above" &&
               w["detail"].get<std::string>().find("identity") != std::string::npos,
           "check mnc albert -> 1 with (m1, m2, identity, above)");
  c.expect(cli.run({"check", "snc", cli.exported("pm_contextual_model")}).first == 1, "check snc pm_contextual_model -> 1");
  c.expect(cli.run({"check", "nondisturb", cli.exported("peres_mermin_theory")}).first == 0, "check nondisturb PM -> 0");
  c.expect(cli.run({"check", "snc", cli.exported("peres_mermin_theory")}).first == 2, "kind mismatch -> 2");
  // ks
  auto [ks_code, ks] = cli.run({"ks", "search", cli.exported("peres_mermin")});
  c.expect(ks_code == 0 && ks["counts"]["value assignments"] == 0, "ks search PM -> 0 with count 0");
  auto const fg = cli.path("fg.json");
  auto [fg_code, fg_report] = cli.run({"ks", "interpret", cli.exported("peres_mermin"), "--mode", "fine-grained", "--out", fg});
  c.expect(fg_code == 0 && fg_report["counts"]["measurements"] == 24 && fg_report["counts"]["claims"] == 9,
           "ks interpret fine-grained -> 24 measurements, 9 claims");
  auto [v_code, v] = cli.run({"ks", "search", std::string(CONTEXTUM_DATA_DIR) + "/kochen_specker_18.json"});
  c.expect(v_code == 0 && v["counts"]["colorings"] == 0, "ks search 18-vector demo -> 0 colorings");
  ::setenv("CONTEXTUM_CAP", "100", 1);
  c.expect(cli.run({"ks", "search", cli.exported("peres_mermin")}).first == 3, "capacity exceeded -> 3");
  ::unsetenv("CONTEXTUM_CAP");
  // sheaf
  auto [coins_code, coins] = cli.run({"sheaf", "section", cli.exported("classical_coins")});
  c.expect(coins_code == 0 && coins["section"].size() == 2, "sheaf section coins -> 0 with two atoms");
  auto [pm_code, pm] = cli.run({"sheaf", "section", cli.exported("peres_mermin_theory"), "--preparation", "mixed"});
  c.expect(pm_code == 1 && pm["certificate"]["verified"] == true, "sheaf section PM -> 1 with verified certificate");
  auto const conflict = std::string(CONTEXTUM_DATA_DIR) + "/conflicting_overlap.json";
  c.expect(cli.run({"sheaf", "check", conflict}).first == 1, "sheaf check conflicting overlap -> 1");
  c.expect(cli.run({"sheaf", "section", conflict}).first == 2, "sheaf section on inconsistent model -> 2");
  // catalog
  c.expect(cli.run({"catalog", "list"}).first == 0, "catalog list -> 0");
  c.expect(cli.run({"catalog", "export", "bogus", cli.path("bogus.json")}).first == 2, "catalog export bogus -> 2");
  c.expect(cli.run({"validate", cli.exported("peres_mermin")}).first == 0, "exported PM validates -> 0");
}

}  // namespace

int main() {
  std::vector<Criterion> const criteria{
      {1, "Peres-Mermin no-go under both readings", 1.0, pm_no_go},
      {2, "Peres-Mermin quantum statistics at I/4", 1.0, pm_statistics},
      {3, "fine-grained interpretation and its claims", 5.0, fine_grained},
      {4, "sheaf verdicts and solver/brute-force agreement", 60.0, sheaf_verdicts},
      {5, "Albert toy model", 1.0, albert},
      {6, "simultaneously contextual PM model", 10.0, pm_contextual},
      {7, "measurement NC implies simultaneous NC (1000 models)", 120.0, implication},
      {8, "logical independence of the two notions", 30.0, independence},
      {9, "CLI round-trips and exit-code contract", 60.0, cli_contract},
  };
  bool all = true;
  for (auto const& cr : criteria) {
    Check check;
    auto const start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (std::exception const& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > cr.budget_seconds) check.failures.push_back("runtime over budget");
    bool const ok = check.failures.empty();
    all = all && ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << cr.number << ": " << cr.title << " (" << std::fixed
              << std::setprecision(3) << secs << " s, limit " << std::setprecision(0) << cr.budget_seconds << " s)\n";
    for (auto const& f : check.failures) std::cout << "      - " << f << "\n";
  }
  return all ? 0 : 1;
}
