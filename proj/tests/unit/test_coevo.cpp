#include "doctest.h"
#include "support.hpp"

#include "mococo/coevo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

using namespace mococo;

namespace {

const std::vector<SubspeciesTag> kPaperTags{SubspeciesTag({2, 2}), SubspeciesTag({3, 3}), SubspeciesTag({4, 4}),
                                            SubspeciesTag({5, 5})};
const ObjectiveBounds kBounds{-200.0, -96.0, 2, 25};

int specified(const RbGenotype& g) {
  return static_cast<int>(std::count_if(g.alleles.begin(), g.alleles.end(), [](int a) { return a != 0; }));
}

template <class G>
Individual<G> withCredit(IndividualId id, G g, ObjectivePoint p) {
  return {id, std::move(g), p};
}

DbGenotype flatDb(const SubspeciesTag& t, double v = 0.5) { return {t, std::vector<double>(dbGenotypeLength(t), v)}; }

// Cheap deterministic stand-in for an environment: rewards rule bases that
// vote action 2 in many subspaces and whose first reference sits low.
Problem syntheticProblem() {
  Problem p;
  p.featureDomains = {{0.0, 1.0}, {0.0, 1.0}};
  p.numActions = 2;
  p.evaluate = [](const Frbs& f) {
    double votes = 0;
    for (const auto& r : f.rb().rules) votes += r.action == 2 ? double(decisionPoints(r)) : 0.0;
    const double firstCore = f.db().partitions[0].sets()[0].core;
    const double perf = -200.0 + 100.0 * votes / double(rbGenotypeLength(f.rb().tag)) - 4.0 * firstCore;
    return PerfResult{std::clamp(perf, -200.0, -96.0), false};
  };
  return p;
}

}  // namespace

TEST_CASE("subspecies distributions") {
  const auto [db, rb] = makeSubspeciesDists(kPaperTags, 1.125);
  const std::vector<double> expectRb{0.05326, 0.09598, 0.21890, 0.63186};
  const std::vector<double> expectDb{0.16964, 0.21470, 0.27174, 0.34392};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rb.masses()[i] == doctest::Approx(expectRb[i]).epsilon(1e-4));
    CHECK(db.masses()[i] == doctest::Approx(expectDb[i]).epsilon(1e-4));
  }
  double sum = 0;
  for (double m : rb.masses()) sum += m;
  CHECK(std::abs(sum - 1.0) < 1e-12);

  const auto [u1, u2] = makeSubspeciesDists(kPaperTags, 1.0);
  for (double m : u2.masses()) CHECK(m == doctest::Approx(0.25));
  const auto [s1, s2] = makeSubspeciesDists({SubspeciesTag({3, 3})}, 1.125);
  CHECK(s1.masses() == std::vector<double>{1.0});

  CHECK_THROWS_AS(makeSubspeciesDists(kPaperTags, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(makeSubspeciesDists({}, 1.1), std::invalid_argument);

  // Huge exponents do not overflow.
  const auto [b1, b2] = makeSubspeciesDists({SubspeciesTag({2, 2}), SubspeciesTag({32, 32})}, 2.0);
  CHECK(b2.masses()[1] == doctest::Approx(1.0));
  CHECK(b2.masses()[0] > 0.0);
  // ...but a mass that underflows is rejected.
  CHECK_THROWS_AS(makeSubspeciesDists({SubspeciesTag({2, 2}), SubspeciesTag({32, 32})}, 3.0), std::invalid_argument);
}

TEST_CASE("pmf sampling follows the masses") {
  const auto [db, rb] = makeSubspeciesDists(kPaperTags, 1.125);
  Rng rng(4);
  std::vector<int> counts(4, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++counts[rb.sample(rng)];
  for (std::size_t i = 0; i < 4; ++i) {
    const double p = rb.masses()[i];
    CHECK(std::abs(counts[i] / double(n) - p) < 5 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("population initialisation") {
  const auto [d1, d2] = makeSubspeciesDists(kPaperTags, 1.125);
  Rng rng(8);
  IdSource ids;
  const auto p1 = initDbPop(d1, 300, rng, ids);
  CHECK(p1.size() == 300);
  for (const auto& i : p1) {
    CHECK(std::set<std::size_t>{4, 6, 8, 10}.contains(i.genotype.alleles.size()));
    for (double a : i.genotype.alleles) CHECK((a >= 0.0 && a <= 1.0));
    CHECK_FALSE(i.credit.has_value());
  }
  const auto p2 = initRbPop(d2, 4000, 0.1, 2, rng, ids);
  std::map<int, int> law;
  int total = 0;
  for (const auto& i : p2) {
    CHECK(specified(i.genotype) >= 2);
    if (i.tag() != SubspeciesTag({5, 5})) continue;
    for (int a : i.genotype.alleles) ++law[a], ++total;
  }
  CHECK(law[0] / double(total) == doctest::Approx(0.1).epsilon(0.05));
  CHECK(law[1] / double(total) == doctest::Approx(0.45).epsilon(0.02));
  CHECK(law[2] / double(total) == doctest::Approx(0.45).epsilon(0.02));

  std::set<IndividualId> unique;
  for (const auto& i : p1) unique.insert(i.id);
  for (const auto& i : p2) unique.insert(i.id);
  CHECK(unique.size() == 4300);
  CHECK(ids.issued() == 4300);

  Rng a(3), b(3);
  IdSource ia, ib;
  const auto x = initRbPop(d2, 50, 0.1, 2, a, ia);
  const auto y = initRbPop(d2, 50, 0.1, 2, b, ib);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i].genotype == y[i].genotype);
}

TEST_CASE("repair raises rule bases to minimum complexity") {
  Rng rng(1);
  RbGenotype g(SubspeciesTag({2, 2}), 2, {0, 0, 0, 0});
  repairRb(g, rng);
  CHECK(specified(g) == 2);
  RbGenotype three(SubspeciesTag({3, 3}), 3, {0, 0, 0, 0, 2, 0, 0, 0, 0});
  repairRb(three, rng);
  CHECK(specified(three) == 3);
  CHECK(three.alleles[4] == 2);
  RbGenotype full(SubspeciesTag({2, 2}), 2, {1, 2, 0, 1});
  const auto before = full;
  repairRb(full, rng);
  CHECK(full == before);
}

TEST_CASE("db variation") {
  Rng rng(2);
  const SubspeciesTag t({3, 3});
  const DbGenotype a(t, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  const DbGenotype b(t, {0.9, 0.8, 0.7, 0.6, 0.5, 0.4});
  const auto [c, d] = dbCrossMutate(a, b, 0.0, 0.0, rng);
  CHECK(c == a);
  CHECK(d == b);

  for (int i = 0; i < 2000; ++i) {
    const auto [x, y] = dbCrossMutate(a, b, 1.0, 0.0, rng);
    // Mirrored children on the parents' line: x + y = a + b where unclamped.
    std::optional<double> t0;
    for (std::size_t g = 0; g < 6; ++g) {
      CHECK((x.alleles[g] >= 0.0 && x.alleles[g] <= 1.0));
      if (a.alleles[g] != b.alleles[g] && x.alleles[g] > 0 && x.alleles[g] < 1) {
        if (!t0) {
          t0 = (x.alleles[g] - b.alleles[g]) / (a.alleles[g] - b.alleles[g]);
          CHECK(*t0 >= -0.25 - 1e-12);
          CHECK(*t0 <= 1.25 + 1e-12);
        }
        const double tg = (x.alleles[g] - b.alleles[g]) / (a.alleles[g] - b.alleles[g]);
        CHECK(tg == doctest::Approx(*t0).epsilon(1e-9));
        CHECK(y.alleles[g] == doctest::Approx(a.alleles[g] + b.alleles[g] - x.alleles[g]));
      }
    }
  }
  for (int i = 0; i < 500; ++i) {
    const auto [x, y] = dbCrossMutate(DbGenotype(t, std::vector<double>(6, 1.0)), DbGenotype(t, std::vector<double>(6, 0.0)),
                                      0.5, 0.5, rng);
    for (double v : x.alleles) CHECK((v >= 0.0 && v <= 1.0));
    for (double v : y.alleles) CHECK((v >= 0.0 && v <= 1.0));
  }
  CHECK_THROWS_AS(dbCrossMutate(a, flatDb(SubspeciesTag({2, 2})), 0.5, 0.1, rng), std::invalid_argument);
}

TEST_CASE("rb variation") {
  Rng rng(9);
  const SubspeciesTag t({5, 5});
  const RbGenotype a(t, 2, std::vector<int>(25, 1));
  const RbGenotype b(t, 2, std::vector<int>(25, 2));
  const auto [c, d] = rbCrossMutateRepair(a, b, 0.0, 0.0, rng);
  CHECK(c == a);
  CHECK(d == b);

  // Uniform swap keeps the per-gene multiset.
  const auto [x, y] = rbCrossMutateRepair(a, b, 0.5, 0.0, rng);
  for (std::size_t g = 0; g < 25; ++g) CHECK(x.alleles[g] + y.alleles[g] == 3);

  // Mutation moves 1 to 0 or 2 with equal odds.
  int zeros = 0, twos = 0;
  for (int i = 0; i < 400; ++i) {
    const auto [m, n] = rbCrossMutateRepair(a, a, 0.0, 1.0, rng);
    for (int v : m.alleles) {
      CHECK(v != 1);
      zeros += v == 0;
      twos += v == 2;
    }
  }
  CHECK(zeros / double(zeros + twos) == doctest::Approx(0.5).epsilon(0.03));

  const RbGenotype empty(SubspeciesTag({2, 2}), 2, {0, 0, 0, 0});
  for (int i = 0; i < 100; ++i) {
    const auto [m, n] = rbCrossMutateRepair(empty, empty, 0.3, 0.0, rng);
    CHECK(specified(m) == 2);
    CHECK(specified(n) == 2);
  }
}

TEST_CASE("collaborator selection") {
  const SubspeciesTag t({2, 2});
  RbPopulation pop;
  for (int i = 0; i < 10; ++i) pop.push_back(withCredit<RbGenotype>(IndividualId(i + 1), RbGenotype(t, 2, {1, 2, 0, 0}), {-150.0 + i, 2 + i}));
  std::vector<std::size_t> all(10);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(5);

  for (int i = 0; i < 200; ++i) {
    const auto c = selectCollabrs(pop, all, 0, kBounds, rng);
    REQUIRE(c.size() == 2);
    CHECK(c[0] != c[1]);
  }
  CHECK(selectCollabrs(pop, std::span<const std::size_t>{}, 3, kBounds, rng).empty());
  const std::vector<std::size_t> one{4};
  CHECK(selectCollabrs(pop, one, 3, kBounds, rng) == std::vector<std::size_t>{4, 4});

  // A single rank-1 member with infinite crowding always leads.
  RbPopulation dominated;
  for (int i = 0; i < 6; ++i) dominated.push_back(withCredit<RbGenotype>(IndividualId(i + 1), RbGenotype(t, 2, {1, 2, 0, 0}), {-190.0 + i, 10}));
  dominated.push_back(withCredit<RbGenotype>(99, RbGenotype(t, 2, {1, 2, 0, 0}), {-120.0, 3}));
  std::vector<std::size_t> members(7);
  std::iota(members.begin(), members.end(), std::size_t{0});
  for (int i = 0; i < 50; ++i) {
    const auto c = selectCollabrs(dominated, members, 2, kBounds, rng);
    CHECK(c[0] == 6);
    CHECK(c[1] != 6);
  }

  // Two unbeaten extremes share the lead.
  std::map<std::size_t, int> firsts;
  for (int i = 0; i < 400; ++i) ++firsts[selectCollabrs(pop, all, 1, kBounds, rng)[0]];
  CHECK(firsts.size() == 2);
  CHECK(firsts[0] > 120);
  CHECK(firsts[9] > 120);
}

TEST_CASE("solution set, evaluation and credit") {
  const SubspeciesTag a({2, 2}), b({3, 3});
  const std::vector<SubspeciesTag> tags{a, b};
  const Problem problem = syntheticProblem();
  IdSource ids;
  DbPopulation o1;
  RbPopulation o2;
  for (int i = 0; i < 5; ++i) o1.push_back({ids.take(), flatDb(a, 0.1 * i), std::nullopt});
  for (int i = 0; i < 3; ++i) o2.push_back({ids.take(), RbGenotype(a, 2, {2, i % 2 + 1, 0, 1}), std::nullopt});
  o1.push_back({ids.take(), flatDb(b), std::nullopt});  // no 3x3 rule bases exist

  CollaboratorMap map;
  map.db = {{o1[0], o1[1]}, {}};
  map.rb = {{o2[0], o2[1]}, {}};
  auto s = buildSolnSet(o1, o2, tags, map, problem.featureDomains, kDefaultValidFraction);
  // 5 DB x 2 RB plus 3 RB x 2 DB, minus the 4 pairs reached both ways.
  CHECK(s.size() == 12);
  std::set<std::pair<IndividualId, IndividualId>> pairs;
  for (const auto& x : s) {
    CHECK(x.db.tag == x.rb.tag);
    pairs.emplace(x.dbId, x.rbId);
  }
  CHECK(pairs.size() == s.size());

  evalSolnSet(s, problem, kBounds, 2);
  for (const auto& x : s) CHECK(x.objectives.complexity == genotypicComplexity(x.rb));
  std::vector<ObjectivePoint> pts;
  for (const auto& x : s) pts.push_back(x.objectives);
  const auto ann = annotate(pts, kBounds);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].annotation.rank == ann[i].rank);
    CHECK(s[i].annotation.crowding == ann[i].crowding);
  }

  assignIndivsCredit(o1, s, kBounds);
  assignIndivsCredit(o2, s, kBounds);
  for (auto* pop : {&o1}) {
    for (const auto& idv : *pop) {
      REQUIRE(idv.credit);
      std::vector<std::size_t> mine;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].dbId == idv.id) mine.push_back(i);
      }
      if (mine.empty()) {
        CHECK(idv.credit->perf == -200.0);
        CHECK(idv.credit->complexity == 25);
        continue;
      }
      // Credit is a crowded-minimal pair among its own solutions.
      const auto best = *std::min_element(mine.begin(), mine.end(), [&](auto x, auto y) {
        return crowdedLess(s[x].annotation, s[y].annotation);
      });
      CHECK(idv.credit->perf == s[best].objectives.perf);
      CHECK(idv.credit->complexity == s[best].objectives.complexity);
    }
  }
  for (const auto& idv : o2) REQUIRE(idv.credit);
}

TEST_CASE("archive keeps size, uniqueness and subpopulation elites") {
  const auto [d1, d2] = makeSubspeciesDists(kPaperTags, 1.125);
  Rng rng(17);
  IdSource ids;
  auto r = initRbPop(d2, 400, 0.1, 2, rng, ids);
  gen::Engine e(4);
  for (auto& i : r) i.credit = ObjectivePoint{-200.0 + gen::uniformInt(e, 0, 100), gen::uniformInt(e, 2, 25)};
  const auto combined = r;
  const auto archived = archiveParentPop(r, d2, 200, kBounds, rng);
  CHECK(archived.size() == 200);
  std::set<IndividualId> seen;
  for (const auto& i : archived) CHECK(seen.insert(i.id).second);

  for (const auto& tag : kPaperTags) {
    const auto members = subpopulation(combined, tag);
    if (members.empty()) continue;
    bool sampled = false;
    for (const auto& i : archived) sampled = sampled || i.tag() == tag;
    if (!sampled) continue;
    const auto ann = annotateMembers(combined, members, kBounds);
    bool kept = false;
    for (auto best : crowdedBestTies(ann)) kept = kept || seen.contains(combined[members[best]].id);
    CHECK(kept);
  }

  // No discarded member dominates a kept member of its subspecies: each pick
  // is non-dominated among what remains.
  for (const auto& k : archived) {
    for (const auto& c : combined) {
      if (c.tag() != k.tag() || seen.contains(c.id)) continue;
      CHECK_FALSE(dominates(*c.credit, *k.credit));
    }
  }

  // Singleton tag set: the first pick is a front extreme and the rest follow
  // the same non-domination rule.
  const std::vector<SubspeciesTag> only{SubspeciesTag({2, 2})};
  const auto [o1, o2] = makeSubspeciesDists(only, 1.125);
  DbPopulation flat;
  for (int i = 0; i < 20; ++i) flat.push_back(withCredit<DbGenotype>(IndividualId(i + 1), flatDb(only[0]), {-200.0 + 5 * i, 2 + (i % 3)}));
  const auto top = archiveParentPop(flat, o1, 10, kBounds, rng);
  CHECK(top.size() == 10);
  std::vector<ObjectivePoint> pts;
  for (const auto& i : flat) pts.push_back(*i.credit);
  CHECK(fastNonDominatedSort(pts)[top.front().id - 1] == 1);
  for (const auto& k : top) {
    for (const auto& c : flat) {
      if (std::none_of(top.begin(), top.end(), [&](const auto& t) { return t.id == c.id; })) {
        CHECK_FALSE(dominates(*c.credit, *k.credit));
      }
    }
  }

  CHECK_THROWS_AS(archiveParentPop(flat, o1, 30, kBounds, rng), std::invalid_argument);
}

TEST_CASE("archive survives a tag with little mass and few members") {
  const std::vector<SubspeciesTag> tags{SubspeciesTag({2, 2}), SubspeciesTag({8, 8})};
  const SubspeciesPmf pmf(tags, {1e-9, 1.0 - 1e-9});
  DbPopulation r;
  for (int i = 0; i < 30; ++i) r.push_back(withCredit<DbGenotype>(IndividualId(i + 1), flatDb(tags[0]), {-150.0, 3}));
  for (int i = 0; i < 2; ++i) r.push_back(withCredit<DbGenotype>(IndividualId(i + 100), flatDb(tags[1]), {-150.0, 3}));
  Rng rng(6);
  const auto p = archiveParentPop(r, pmf, 20, kBounds, rng);
  CHECK(p.size() == 20);
}

TEST_CASE("breeding") {
  const auto [d1, d2] = makeSubspeciesDists(kPaperTags, 1.125);
  Rng rng(12);
  IdSource ids;
  Hyperparams hp;
  auto p1 = initDbPop(d1, 31, rng, ids);
  auto p2 = initRbPop(d2, 41, 0.1, 2, rng, ids);
  for (auto& i : p1) i.credit = ObjectivePoint{-150.0, 4};
  for (auto& i : p2) i.credit = ObjectivePoint{-150.0, specified(i.genotype)};
  const auto before = ids.issued();
  const auto q1 = breedDbChildren(p1, d1, hp, kBounds, rng, ids);
  const auto q2 = breedRbChildren(p2, d2, hp, kBounds, rng, ids);
  CHECK(q1.size() == p1.size());
  CHECK(q2.size() == p2.size());
  CHECK(ids.issued() == before + 31 + 41);  // the odd surplus child takes no id
  std::set<SubspeciesTag> present;
  for (const auto& i : p1) present.insert(i.tag());
  for (const auto& c : q1) {
    CHECK(present.contains(c.tag()));
    CHECK_FALSE(c.credit.has_value());
  }
  for (const auto& c : q2) CHECK(specified(c.genotype) >= 2);

  // A singleton subspecies breeds mutated clones.
  DbPopulation solo{withCredit<DbGenotype>(1, flatDb(SubspeciesTag({3, 3}), 0.5), {-150.0, 3})};
  const SubspeciesPmf only({SubspeciesTag({3, 3})}, {1.0});
  Hyperparams quiet = hp;
  quiet.dbMutSigma = 0.0;
  const auto clones = breedDbChildren(solo, only, quiet, kBounds, rng, ids);
  REQUIRE(clones.size() == 1);
  CHECK(clones[0].genotype == solo[0].genotype);
}

TEST_CASE("hyperparameter validation") {
  Hyperparams hp;
  CHECK_NOTHROW(hp.validate(2, 2));
  auto bad = [&](auto mutate) {
    Hyperparams h;
    mutate(h);
    CHECK_THROWS_AS(h.validate(2, 2), std::invalid_argument);
  };
  bad([](Hyperparams& h) { h.numGens = 0; });
  bad([](Hyperparams& h) { h.dbPopSize = 0; });
  bad([](Hyperparams& h) { h.rbPCross = 1.5; });
  bad([](Hyperparams& h) { h.beta = 0.5; });
  bad([](Hyperparams& h) { h.omega = 0.0; });
  bad([](Hyperparams& h) { h.eta = 0; });
  bad([](Hyperparams& h) { h.tags = {}; });
  bad([](Hyperparams& h) { h.tags = {SubspeciesTag({2, 2, 2})}; });
  bad([](Hyperparams& h) { h.tags = {SubspeciesTag({2, 2}), SubspeciesTag({2, 2})}; });
  bad([](Hyperparams& h) { h.dbMutSigma = -0.1; });
}

TEST_CASE("generational run: counters, sizes and determinism") {
  Hyperparams hp;
  hp.numGens = 6;
  hp.dbPopSize = 24;
  hp.rbPopSize = 40;
  hp.tags = {SubspeciesTag({2, 2}), SubspeciesTag({3, 3})};
  const Problem problem = syntheticProblem();
  std::vector<GenerationRecord> seenRecords;
  RunOptions options;
  options.threads = 3;
  options.onGeneration = [&](const GenerationRecord& g) { seenRecords.push_back(g); };
  const auto r = runFuzzyMococo(problem, hp, 77, options);

  CHECK(r.generations.size() == 6);
  CHECK(seenRecords.size() == 6);
  CHECK(r.r1.size() == 48);
  CHECK(r.r2.size() == 80);
  CHECK(r.individualsCreated == 24 + 40 + 5 * (24 + 40));
  CHECK(r.creditAssignments.size() == r.individualsCreated);
  for (const auto& [id, n] : r.creditAssignments) CHECK(n == 1);
  for (const auto& g : r.generations) {
    CHECK(std::accumulate(g.dbCounts.begin(), g.dbCounts.end(), 0) == 24);
    CHECK(std::accumulate(g.rbCounts.begin(), g.rbCounts.end(), 0) == 40);
    CHECK(g.front1Size >= 1);
  }
  REQUIRE_FALSE(r.front.empty());
  for (auto idx : r.front) CHECK(r.solutions[idx].annotation.rank == 1);
  for (const auto& s : r.solutions) CHECK(s.db.tag == s.rb.tag);

  RunOptions single;
  single.threads = 1;
  const auto again = runFuzzyMococo(problem, hp, 77, single);
  REQUIRE(again.solutions.size() == r.solutions.size());
  for (std::size_t i = 0; i < r.solutions.size(); ++i) {
    CHECK(again.solutions[i].dbId == r.solutions[i].dbId);
    CHECK(again.solutions[i].rbId == r.solutions[i].rbId);
    CHECK(again.solutions[i].objectives.perf == r.solutions[i].objectives.perf);
  }
  const auto other = runFuzzyMococo(problem, hp, 78, single);
  bool differs = other.solutions.size() != r.solutions.size();
  for (std::size_t i = 0; !differs && i < r.solutions.size(); ++i) {
    differs = other.solutions[i].rb != r.solutions[i].rb;
  }
  CHECK(differs);
}

TEST_CASE("generational run rejects a bad setup") {
  Problem p = syntheticProblem();
  Hyperparams hp;
  hp.tags = {SubspeciesTag({2, 2, 2})};
  CHECK_THROWS_AS(runFuzzyMococo(p, hp, 1, {}), std::invalid_argument);
  p.evaluate = nullptr;
  CHECK_THROWS_AS(runFuzzyMococo(p, Hyperparams{}, 1, {}), std::invalid_argument);
}
