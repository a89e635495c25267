#include "mococo/coevo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

namespace mococo {

namespace {

void parallelFor(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failureMutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::size_t uniformIndex(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Uniform index in [0, n) other than `excluded`.
std::size_t uniformIndexExcept(Rng& rng, std::size_t n, std::size_t excluded) {
  const std::size_t pick = uniformIndex(rng, n - 1);
  return pick >= excluded ? pick + 1 : pick;
}

std::size_t tagIndex(const std::vector<SubspeciesTag>& tags, const SubspeciesTag& tag) {
  const auto idx = indexOf(tags, tag);
  if (idx == tags.size()) throw std::invalid_argument("individual carries unknown subspecies tag " + tag.label());
  return idx;
}

template <class Genotype>
std::vector<std::vector<std::size_t>> subpopulationsByTag(const Population<Genotype>& pop,
                                                          const std::vector<SubspeciesTag>& tags) {
  std::vector<std::vector<std::size_t>> out(tags.size());
  for (std::size_t i = 0; i < pop.size(); ++i) out[tagIndex(tags, pop[i].tag())].push_back(i);
  return out;
}

// Samples tag indices from a PMF, skipping tags the caller reports as
// unavailable. After kMaxConsecutiveMisses misses in a row the PMF is
// renormalised over the currently available tags.
class AvailableTagSampler {
public:
  explicit AvailableTagSampler(const SubspeciesPmf& pmf) : pmf_(pmf) {}

  template <class IsAvailable>
  std::size_t draw(Rng& rng, IsAvailable isAvailable) {
    int misses = 0;
    while (true) {
      const std::size_t t = fallback_ ? fallbackIndex_[fallback_->sample(rng)] : pmf_.sample(rng);
      if (isAvailable(t)) return t;
      if (++misses >= kMaxConsecutiveMisses) {
        renormalise(isAvailable);
        misses = 0;
      }
    }
  }

private:
  template <class IsAvailable>
  void renormalise(IsAvailable isAvailable) {
    std::vector<SubspeciesTag> tags;
    std::vector<double> masses;
    fallbackIndex_.clear();
    for (std::size_t t = 0; t < pmf_.tags().size(); ++t) {
      if (!isAvailable(t)) continue;
      tags.push_back(pmf_.tags()[t]);
      masses.push_back(pmf_.masses()[t]);
      fallbackIndex_.push_back(t);
    }
    if (tags.empty()) throw std::logic_error("no subspecies left to sample from");
    fallback_.emplace(std::move(tags), std::move(masses));
  }

  const SubspeciesPmf& pmf_;
  std::optional<SubspeciesPmf> fallback_;
  std::vector<std::size_t> fallbackIndex_;
};

// Crowded-best position; equally good candidates are drawn uniformly so that
// neither end of a front is favoured by population order.
std::size_t drawCrowdedBest(std::span<const MoAnnotation> annotations, Rng& rng) {
  const auto ties = crowdedBestTies(annotations);
  return ties.size() == 1 ? ties.front() : ties[uniformIndex(rng, ties.size())];
}

template <class Genotype, class CrossMutate>
Population<Genotype> breedChildren(const Population<Genotype>& parents, const SubspeciesPmf& pmf,
                                   CrossMutate crossMutate, const ObjectiveBounds& bounds, Rng& rng,
                                   IdSource& ids) {
  if (parents.empty()) throw std::invalid_argument("cannot breed from an empty parent population");
  const auto subpops = subpopulationsByTag(parents, pmf.tags());
  std::vector<std::optional<std::vector<MoAnnotation>>> annotations(subpops.size());

  auto tournament = [&](std::size_t t) {
    const auto& members = subpops[t];
    const auto& ann = *annotations[t];
    const std::size_t a = uniformIndex(rng, members.size());
    const std::size_t b = uniformIndex(rng, members.size());
    return members[crowdedLess(ann[b], ann[a]) ? b : a];
  };

  AvailableTagSampler sampler(pmf);
  Population<Genotype> children;
  children.reserve(parents.size());
  while (children.size() < parents.size()) {
    const std::size_t t = sampler.draw(rng, [&](std::size_t i) { return !subpops[i].empty(); });
    if (!annotations[t]) annotations[t] = annotateMembers(parents, subpops[t], bounds);
    const std::size_t parentA = tournament(t);
    const std::size_t parentB = tournament(t);
    auto [childA, childB] = crossMutate(parents[parentA].genotype, parents[parentB].genotype, rng);
    children.push_back({ids.take(), std::move(childA), std::nullopt});
    if (children.size() < parents.size()) children.push_back({ids.take(), std::move(childB), std::nullopt});
  }
  return children;
}

template <class Genotype, class IdOf>
void creditFromSolutions(Population<Genotype>& pop, const std::vector<Solution>& solutions,
                         const ObjectiveBounds& bounds, IdOf idOf) {
  std::unordered_map<IndividualId, std::size_t> best;
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    const auto [it, inserted] = best.try_emplace(idOf(solutions[s]), s);
    if (!inserted && crowdedLess(solutions[s].annotation, solutions[it->second].annotation)) it->second = s;
  }
  for (auto& idv : pop) {
    const auto it = best.find(idv.id);
    idv.credit = it == best.end() ? ObjectivePoint{bounds.perfMin, bounds.complexityMax}
                                  : solutions[it->second].objectives;
  }
}

}  // namespace

// ---- subspecies distributions ----------------------------------------------

SubspeciesPmf::SubspeciesPmf(std::vector<SubspeciesTag> tags, std::vector<double> masses)
    : tags_(std::move(tags)), masses_(std::move(masses)) {
  if (tags_.empty() || tags_.size() != masses_.size()) throw std::invalid_argument("malformed subspecies PMF");
  double total = 0.0;
  for (double m : masses_) {
    if (!(m > 0.0)) throw std::invalid_argument("subspecies PMF masses must be positive");
    total += m;
  }
  for (auto& m : masses_) m /= total;
  cumulative_.resize(masses_.size());
  std::partial_sum(masses_.begin(), masses_.end(), cumulative_.begin());
}

double SubspeciesPmf::probability(const SubspeciesTag& tag) const {
  const auto idx = indexOf(tags_, tag);
  return idx == tags_.size() ? 0.0 : masses_[idx];
}

std::size_t SubspeciesPmf::sample(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), masses_.size() - 1);
}

std::pair<SubspeciesPmf, SubspeciesPmf> makeSubspeciesDists(const std::vector<SubspeciesTag>& tags, double beta) {
  if (!(beta >= 1.0)) throw std::invalid_argument("beta must be >= 1");
  auto masses = [&](auto length) {
    // Shift exponents by the longest genotype so large tags cannot overflow.
    std::size_t longest = 0;
    for (const auto& t : tags) longest = std::max(longest, length(t));
    std::vector<double> out;
    for (const auto& t : tags) {
      out.push_back(std::pow(beta, static_cast<double>(length(t)) - static_cast<double>(longest)));
      if (!(out.back() > 0.0)) {
        throw std::invalid_argument("beta is too large for tag " + t.label() + ": its subspecies mass underflows to 0");
      }
    }
    return out;
  };
  return {SubspeciesPmf(tags, masses(dbGenotypeLength)), SubspeciesPmf(tags, masses(rbGenotypeLength))};
}

// ---- configuration ---------------------------------------------------------

void Hyperparams::validate(std::size_t dims, int numActions) const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid hyperparameter: ") + what);
  };
  auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
  require(numGens >= 1, "numGens must be >= 1");
  require(dbPopSize >= 1, "dbPopSize must be >= 1");
  require(rbPopSize >= 1, "rbPopSize must be >= 1");
  require(probability(dbPCross), "dbPCross must be in [0,1]");
  require(dbMutSigma >= 0.0, "dbMutSigma must be >= 0");
  require(probability(rbPCross), "rbPCross must be in [0,1]");
  require(probability(rbPMut), "rbPMut must be in [0,1]");
  require(probability(rbPUnspec), "rbPUnspec must be in [0,1]");
  require(beta >= 1.0, "beta must be >= 1");
  require(eta >= 1, "eta must be >= 1");
  require(omega > 0.0 && omega <= 1.0, "omega must be in (0,1]");
  require(!tags.empty(), "at least one subspecies tag is required");
  for (std::size_t i = 0; i < tags.size(); ++i) {
    require(tags[i].dims() == dims, "subspecies tag dimension does not match the environment");
    require(rbGenotypeLength(tags[i]) >= static_cast<std::size_t>(numActions),
            "every subspecies needs at least k fuzzy subspaces");
    for (std::size_t j = 0; j < i; ++j) require(tags[i] != tags[j], "duplicate subspecies tag");
  }
}

Problem mountainCarProblem(const McConfig& config, InitialStateSet starts, double perfUpperBound) {
  Problem problem;
  problem.featureDomains = {config.positionBounds, config.velocityBounds};
  problem.numActions = McConfig::kNumActions;
  problem.perfMin = config.returnLowerBound();
  problem.perfMax = perfUpperBound;
  problem.evaluate = [config, starts = std::move(starts)](const Frbs& frbs) {
    return evalPerformance(frbsPolicy(frbs), starts, config);
  };
  return problem;
}

ObjectiveBounds objectiveBounds(const Problem& problem, const std::vector<SubspeciesTag>& tags) {
  const auto complexity = complexityBounds(tags, problem.numActions);
  return {problem.perfMin, problem.perfMax, complexity.min, complexity.max};
}

// ---- initialisation and variation ------------------------------------------

DbPopulation initDbPop(const SubspeciesPmf& pmf, int size, Rng& rng, IdSource& ids) {
  if (size < 1) throw std::invalid_argument("population size must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DbPopulation pop;
  pop.reserve(static_cast<std::size_t>(size));
  for (int n = 0; n < size; ++n) {
    const auto& tag = pmf.tags()[pmf.sample(rng)];
    std::vector<double> alleles(dbGenotypeLength(tag));
    for (auto& a : alleles) a = unit(rng);
    pop.push_back({ids.take(), DbGenotype(tag, std::move(alleles)), std::nullopt});
  }
  return pop;
}

RbPopulation initRbPop(const SubspeciesPmf& pmf, int size, double pUnspec, int numActions, Rng& rng, IdSource& ids) {
  if (size < 1) throw std::invalid_argument("population size must be positive");
  std::bernoulli_distribution unspecified(pUnspec);
  std::uniform_int_distribution<int> action(1, numActions);
  RbPopulation pop;
  pop.reserve(static_cast<std::size_t>(size));
  for (int n = 0; n < size; ++n) {
    const auto& tag = pmf.tags()[pmf.sample(rng)];
    std::vector<int> alleles(rbGenotypeLength(tag));
    for (auto& a : alleles) a = unspecified(rng) ? 0 : action(rng);
    RbGenotype genotype(tag, numActions, std::move(alleles));
    repairRb(genotype, rng);
    pop.push_back({ids.take(), std::move(genotype), std::nullopt});
  }
  return pop;
}

void repairRb(RbGenotype& genotype, Rng& rng) {
  const int k = genotype.numActions;
  if (genotype.alleles.size() < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("RB genotype too short to reach minimum complexity");
  }
  std::uniform_int_distribution<int> action(1, k);
  std::vector<std::size_t> unspecified;
  for (std::size_t i = 0; i < genotype.alleles.size(); ++i) {
    if (genotype.alleles[i] == 0) unspecified.push_back(i);
  }
  int specified = static_cast<int>(genotype.alleles.size() - unspecified.size());
  while (specified < k) {
    const std::size_t pick = uniformIndex(rng, unspecified.size());
    genotype.alleles[unspecified[pick]] = action(rng);
    unspecified.erase(unspecified.begin() + static_cast<std::ptrdiff_t>(pick));
    ++specified;
  }
}

std::pair<DbGenotype, DbGenotype> dbCrossMutate(const DbGenotype& a, const DbGenotype& b, double pCross,
                                                double mutSigma, Rng& rng) {
  if (a.tag != b.tag) throw std::invalid_argument("DB crossover across subspecies");
  std::vector<double> childA = a.alleles;
  std::vector<double> childB = b.alleles;
  if (std::bernoulli_distribution(pCross)(rng)) {
    const double t = std::uniform_real_distribution<double>(-0.25, 1.25)(rng);
    for (std::size_t i = 0; i < childA.size(); ++i) {
      childA[i] = t * a.alleles[i] + (1.0 - t) * b.alleles[i];
      childB[i] = (1.0 - t) * a.alleles[i] + t * b.alleles[i];
    }
  }
  auto mutate = [&](std::vector<double>& genes) {
    if (mutSigma > 0.0) {
      std::normal_distribution<double> noise(0.0, mutSigma);
      for (auto& g : genes) g += noise(rng);
    }
    for (auto& g : genes) g = std::clamp(g, 0.0, 1.0);
  };
  mutate(childA);
  mutate(childB);
  return {DbGenotype(a.tag, std::move(childA)), DbGenotype(a.tag, std::move(childB))};
}

std::pair<RbGenotype, RbGenotype> rbCrossMutateRepair(const RbGenotype& a, const RbGenotype& b, double pCross,
                                                      double pMut, Rng& rng) {
  if (a.tag != b.tag || a.numActions != b.numActions) throw std::invalid_argument("RB crossover across subspecies");
  const int k = a.numActions;
  RbGenotype childA = a;
  RbGenotype childB = b;
  std::bernoulli_distribution swap(pCross);
  for (std::size_t i = 0; i < childA.alleles.size(); ++i) {
    if (swap(rng)) std::swap(childA.alleles[i], childB.alleles[i]);
  }
  std::bernoulli_distribution mutates(pMut);
  std::uniform_int_distribution<int> other(0, k - 1);
  for (auto* child : {&childA, &childB}) {
    for (auto& allele : child->alleles) {
      if (!mutates(rng)) continue;
      const int pick = other(rng);
      allele = pick >= allele ? pick + 1 : pick;
    }
    repairRb(*child, rng);
  }
  return {std::move(childA), std::move(childB)};
}

// ---- cooperation and credit ------------------------------------------------

template <class Genotype>
std::vector<std::size_t> subpopulation(const Population<Genotype>& pop, const SubspeciesTag& tag) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pop[i].tag() == tag) out.push_back(i);
  }
  return out;
}

template <class Genotype>
std::vector<MoAnnotation> annotateMembers(const Population<Genotype>& pop, std::span<const std::size_t> members,
                                          const ObjectiveBounds& bounds) {
  std::vector<ObjectivePoint> points;
  points.reserve(members.size());
  for (auto i : members) {
    points.push_back(pop[i].credit.value_or(ObjectivePoint{bounds.perfMin, bounds.complexityMax}));
  }
  return annotate(points, bounds);
}

template <class Genotype>
std::vector<std::size_t> selectCollabrs(const Population<Genotype>& pop, std::span<const std::size_t> subpop,
                                        int gen, const ObjectiveBounds& bounds, Rng& rng) {
  if (subpop.empty()) return {};
  if (subpop.size() == 1) return {subpop[0], subpop[0]};
  std::size_t first = 0;
  if (gen == 0) {
    first = uniformIndex(rng, subpop.size());
  } else {
    first = drawCrowdedBest(annotateMembers(pop, subpop, bounds), rng);
  }
  const std::size_t second = uniformIndexExcept(rng, subpop.size(), first);
  return {subpop[first], subpop[second]};
}

CollaboratorMap buildCollabrMap(const DbPopulation& p1, const RbPopulation& p2, const std::vector<SubspeciesTag>& tags,
                                int gen, const ObjectiveBounds& bounds, Rng& rng) {
  CollaboratorMap map;
  map.db.resize(tags.size());
  map.rb.resize(tags.size());
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const auto members = subpopulation(p1, tags[t]);
    for (auto i : selectCollabrs(p1, members, gen, bounds, rng)) map.db[t].push_back(p1[i]);
  }
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const auto members = subpopulation(p2, tags[t]);
    for (auto i : selectCollabrs(p2, members, gen, bounds, rng)) map.rb[t].push_back(p2[i]);
  }
  return map;
}

std::vector<Solution> buildSolnSet(const DbPopulation& o1, const RbPopulation& o2,
                                   const std::vector<SubspeciesTag>& tags, const CollaboratorMap& collaborators,
                                   std::span<const Interval> domains, double omega) {
  std::vector<Solution> solutions;
  std::set<std::pair<IndividualId, IndividualId>> seen;
  auto add = [&](const DbIndividual& db, const RbIndividual& rb) {
    if (db.tag() != rb.tag()) throw std::logic_error("cooperation across subspecies");
    if (!seen.emplace(db.id, rb.id).second) return;
    Frbs frbs(decodeDb(db.genotype, domains, omega), decodeRb(rb.genotype));
    solutions.push_back({db.id, rb.id, db.genotype, rb.genotype, std::move(frbs), {}, false, {}});
  };
  for (std::size_t t = 0; t < tags.size(); ++t) {
    for (auto i : subpopulation(o1, tags[t])) {
      for (const auto& rb : collaborators.rb.at(t)) add(o1[i], rb);
    }
  }
  for (std::size_t t = 0; t < tags.size(); ++t) {
    for (auto i : subpopulation(o2, tags[t])) {
      for (const auto& db : collaborators.db.at(t)) add(db, o2[i]);
    }
  }
  return solutions;
}

void evalSolnSet(std::vector<Solution>& solutions, const Problem& problem, const ObjectiveBounds& bounds,
                 unsigned threads) {
  parallelFor(solutions.size(), threads, [&](std::size_t s) {
    auto& soln = solutions[s];
    const auto result = problem.evaluate(soln.frbs);
    soln.objectives = {result.perf, genotypicComplexity(soln.rb)};
    soln.failed = result.failed;
  });
  std::vector<ObjectivePoint> points;
  points.reserve(solutions.size());
  for (const auto& soln : solutions) points.push_back(soln.objectives);
  const auto annotations = annotate(points, bounds);
  for (std::size_t s = 0; s < solutions.size(); ++s) solutions[s].annotation = annotations[s];
}

void assignIndivsCredit(DbPopulation& pop, const std::vector<Solution>& solutions, const ObjectiveBounds& bounds) {
  creditFromSolutions(pop, solutions, bounds, [](const Solution& s) { return s.dbId; });
}

void assignIndivsCredit(RbPopulation& pop, const std::vector<Solution>& solutions, const ObjectiveBounds& bounds) {
  creditFromSolutions(pop, solutions, bounds, [](const Solution& s) { return s.rbId; });
}

// ---- reproduction ----------------------------------------------------------

template <class Genotype>
Population<Genotype> archiveParentPop(Population<Genotype> combined, const SubspeciesPmf& pmf,
                                      std::size_t numParents, const ObjectiveBounds& bounds, Rng& rng) {
  if (combined.size() < numParents) throw std::invalid_argument("not enough candidates to fill the archive");
  auto subpops = subpopulationsByTag(combined, pmf.tags());
  AvailableTagSampler sampler(pmf);
  Population<Genotype> parents;
  parents.reserve(numParents);
  while (parents.size() < numParents) {
    const std::size_t t = sampler.draw(rng, [&](std::size_t i) { return !subpops[i].empty(); });
    auto& members = subpops[t];
    const std::size_t best = drawCrowdedBest(annotateMembers(combined, members, bounds), rng);
    parents.push_back(std::move(combined[members[best]]));
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return parents;
}

DbPopulation breedDbChildren(const DbPopulation& parents, const SubspeciesPmf& pmf, const Hyperparams& hp,
                             const ObjectiveBounds& bounds, Rng& rng, IdSource& ids) {
  return breedChildren(
      parents, pmf,
      [&](const DbGenotype& a, const DbGenotype& b, Rng& r) { return dbCrossMutate(a, b, hp.dbPCross, hp.dbMutSigma, r); },
      bounds, rng, ids);
}

RbPopulation breedRbChildren(const RbPopulation& parents, const SubspeciesPmf& pmf, const Hyperparams& hp,
                             const ObjectiveBounds& bounds, Rng& rng, IdSource& ids) {
  return breedChildren(
      parents, pmf,
      [&](const RbGenotype& a, const RbGenotype& b, Rng& r) { return rbCrossMutateRepair(a, b, hp.rbPCross, hp.rbPMut, r); },
      bounds, rng, ids);
}

template std::vector<std::size_t> subpopulation(const DbPopulation&, const SubspeciesTag&);
template std::vector<std::size_t> subpopulation(const RbPopulation&, const SubspeciesTag&);
template std::vector<MoAnnotation> annotateMembers(const DbPopulation&, std::span<const std::size_t>,
                                                   const ObjectiveBounds&);
template std::vector<MoAnnotation> annotateMembers(const RbPopulation&, std::span<const std::size_t>,
                                                   const ObjectiveBounds&);
template std::vector<std::size_t> selectCollabrs(const DbPopulation&, std::span<const std::size_t>, int,
                                                 const ObjectiveBounds&, Rng&);
template std::vector<std::size_t> selectCollabrs(const RbPopulation&, std::span<const std::size_t>, int,
                                                 const ObjectiveBounds&, Rng&);
template DbPopulation archiveParentPop(DbPopulation, const SubspeciesPmf&, std::size_t, const ObjectiveBounds&, Rng&);
template RbPopulation archiveParentPop(RbPopulation, const SubspeciesPmf&, std::size_t, const ObjectiveBounds&, Rng&);

// ---- driver ----------------------------------------------------------------

RunResult runFuzzyMococo(const Problem& problem, const Hyperparams& hp, std::uint64_t seed,
                         const RunOptions& options) {
  if (!problem.evaluate) throw std::invalid_argument("problem has no evaluator");
  hp.validate(problem.featureDomains.size(), problem.numActions);

  const auto& tags = hp.tags;
  const auto [dbDist, rbDist] = makeSubspeciesDists(tags, hp.beta);
  const auto bounds = objectiveBounds(problem, tags);
  Rng initRng = makeRng(seed, RngStream::Initialisation);
  Rng collabRng = makeRng(seed, RngStream::Collaborators);
  Rng breedRng = makeRng(seed, RngStream::Breeding);
  IdSource ids;

  RunResult result;
  auto countCredit = [&](const auto& pop) {
    for (const auto& idv : pop) ++result.creditAssignments[idv.id];
  };
  auto countTags = [&](const auto& pop) {
    std::vector<int> counts(tags.size(), 0);
    for (const auto& idv : pop) ++counts[tagIndex(tags, idv.tag())];
    return counts;
  };

  DbPopulation p1 = initDbPop(dbDist, hp.dbPopSize, initRng, ids);
  RbPopulation p2 = initRbPop(rbDist, hp.rbPopSize, hp.rbPUnspec, problem.numActions, initRng, ids);
  DbPopulation q1;
  RbPopulation q2;

  for (int gen = 0; gen < hp.numGens; ++gen) {
    const auto collaborators = buildCollabrMap(p1, p2, tags, gen, bounds, collabRng);
    auto& o1 = gen == 0 ? p1 : q1;
    auto& o2 = gen == 0 ? p2 : q2;
    auto solutions = buildSolnSet(o1, o2, tags, collaborators, problem.featureDomains, hp.omega);
    evalSolnSet(solutions, problem, bounds, options.threads);
    assignIndivsCredit(o1, solutions, bounds);
    assignIndivsCredit(o2, solutions, bounds);
    countCredit(o1);
    countCredit(o2);

    DbPopulation r1 = std::move(p1);
    r1.insert(r1.end(), std::make_move_iterator(q1.begin()), std::make_move_iterator(q1.end()));
    RbPopulation r2 = std::move(p2);
    r2.insert(r2.end(), std::make_move_iterator(q2.begin()), std::make_move_iterator(q2.end()));
    const bool last = gen + 1 == hp.numGens;
    if (last) {
      result.r1 = r1;
      result.r2 = r2;
    }
    p1 = archiveParentPop(std::move(r1), dbDist, static_cast<std::size_t>(hp.dbPopSize), bounds, breedRng);
    p2 = archiveParentPop(std::move(r2), rbDist, static_cast<std::size_t>(hp.rbPopSize), bounds, breedRng);
    q1.clear();
    q2.clear();
    if (!last) {
      q1 = breedDbChildren(p1, dbDist, hp, bounds, breedRng, ids);
      q2 = breedRbChildren(p2, rbDist, hp, bounds, breedRng, ids);
    }

    GenerationRecord record;
    record.gen = gen;
    record.solutions = solutions.size();
    record.bestPerf = problem.perfMin;
    double sum = 0.0;
    for (const auto& s : solutions) {
      record.bestPerf = std::max(record.bestPerf, s.objectives.perf);
      sum += s.objectives.perf;
      if (s.annotation.rank == 1) ++record.front1Size;
    }
    record.meanPerf = solutions.empty() ? problem.perfMin : sum / static_cast<double>(solutions.size());
    record.dbCounts = countTags(p1);
    record.rbCounts = countTags(p2);
    if (options.onGeneration) options.onGeneration(record);
    result.generations.push_back(std::move(record));

    if (last) {
      result.solutions = std::move(solutions);
      for (std::size_t s = 0; s < result.solutions.size(); ++s) {
        if (result.solutions[s].annotation.rank == 1) result.front.push_back(s);
      }
    }
  }
  result.individualsCreated = ids.issued();
  return result;
}

}  // namespace mococo
