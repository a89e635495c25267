#pragma once

#include "mococo/fuzzy.hpp"
#include "mococo/genotype.hpp"
#include "mococo/mountain_car.hpp"
#include "mococo/nsga.hpp"
#include "mococo/rng.hpp"
#include "mococo/tag.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mococo {

using IndividualId = std::uint64_t;

/// Hands out run-unique individual ids, starting at 1.
class IdSource {
public:
  IndividualId take() noexcept { return next_++; }
  IndividualId issued() const noexcept { return next_ - 1; }

private:
  IndividualId next_ = 1;
};

template <class Genotype>
struct Individual {
  IndividualId id = 0;
  Genotype genotype;
  std::optional<ObjectivePoint> credit;

  const SubspeciesTag& tag() const noexcept { return genotype.tag; }
};

using DbIndividual = Individual<DbGenotype>;
using RbIndividual = Individual<RbGenotype>;
template <class Genotype>
using Population = std::vector<Individual<Genotype>>;
using DbPopulation = Population<DbGenotype>;
using RbPopulation = Population<RbGenotype>;

/// Probability mass over subspecies tags.
class SubspeciesPmf {
public:
  SubspeciesPmf(std::vector<SubspeciesTag> tags, std::vector<double> masses);

  const std::vector<SubspeciesTag>& tags() const noexcept { return tags_; }
  const std::vector<double>& masses() const noexcept { return masses_; }
  double probability(const SubspeciesTag& tag) const;

  /// Draw a tag index.
  std::size_t sample(Rng& rng) const;

private:
  std::vector<SubspeciesTag> tags_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

/// Mass proportional to beta^(genotype length) for the DB and RB species.
std::pair<SubspeciesPmf, SubspeciesPmf> makeSubspeciesDists(const std::vector<SubspeciesTag>& tags, double beta);

struct Hyperparams {
  int numGens = 50;
  int dbPopSize = 300;
  int rbPopSize = 600;
  double dbPCross = 0.75;
  double dbMutSigma = 0.02;
  double rbPCross = 0.25;
  double rbPMut = 0.05;
  double rbPUnspec = 0.1;
  double beta = 1.125;
  int eta = 30;
  double omega = kDefaultValidFraction;
  std::vector<SubspeciesTag> tags{SubspeciesTag({2, 2}), SubspeciesTag({3, 3}), SubspeciesTag({4, 4}),
                                  SubspeciesTag({5, 5})};

  /// Throws std::invalid_argument naming the first offending field.
  void validate(std::size_t dims, int numActions) const;
};

/// What the engine needs from an environment. `evaluate` is called from
/// several threads at once and must not touch shared mutable state.
struct Problem {
  std::vector<Interval> featureDomains;
  int numActions = 2;
  double perfMin = -200.0;
  double perfMax = -96.0;
  std::function<PerfResult(const Frbs&)> evaluate;
};

/// Mountain Car with a fixed start-state set. perfMax is the value-iteration
/// estimate of the best achievable performance.
Problem mountainCarProblem(const McConfig& config, InitialStateSet starts, double perfUpperBound = -96.0);

ObjectiveBounds objectiveBounds(const Problem& problem, const std::vector<SubspeciesTag>& tags);

// ---- initialisation and variation ------------------------------------------

DbPopulation initDbPop(const SubspeciesPmf& pmf, int size, Rng& rng, IdSource& ids);
RbPopulation initRbPop(const SubspeciesPmf& pmf, int size, double pUnspec, int numActions, Rng& rng, IdSource& ids);

/// Raise the specified-allele count to at least k by filling randomly chosen
/// unspecified genes with random actions.
void repairRb(RbGenotype& genotype, Rng& rng);

/// Line recombination with probability pCross (one t ~ U(-0.25, 1.25) per
/// pair, mirrored children), then Gaussian noise on every gene, clamped to
/// [0,1].
std::pair<DbGenotype, DbGenotype> dbCrossMutate(const DbGenotype& a, const DbGenotype& b, double pCross,
                                                double mutSigma, Rng& rng);

/// Uniform crossover (swap each gene with probability pCross), per-gene
/// mutation to one of the other k values with probability pMut, then repair.
std::pair<RbGenotype, RbGenotype> rbCrossMutateRepair(const RbGenotype& a, const RbGenotype& b, double pCross,
                                                      double pMut, Rng& rng);

// ---- cooperation and credit ------------------------------------------------

/// Positions of the members of `pop` carrying `tag`.
template <class Genotype>
std::vector<std::size_t> subpopulation(const Population<Genotype>& pop, const SubspeciesTag& tag);

/// Crowded-comparison annotations of `members` computed from their credits.
/// Individuals without credit count as the worst corner of `bounds`.
template <class Genotype>
std::vector<MoAnnotation> annotateMembers(const Population<Genotype>& pop, std::span<const std::size_t> members,
                                          const ObjectiveBounds& bounds);

/// Two collaborators (positions into `pop`) from one subpopulation. In the
/// first generation both are random distinct picks; later the crowded-best
/// member plus a random other member. A singleton is returned twice, an
/// empty subpopulation yields nothing.
template <class Genotype>
std::vector<std::size_t> selectCollabrs(const Population<Genotype>& pop, std::span<const std::size_t> subpop,
                                        int gen, const ObjectiveBounds& bounds, Rng& rng);

/// Collaborators per tag index, copied out of the parent populations.
struct CollaboratorMap {
  std::vector<std::vector<DbIndividual>> db;
  std::vector<std::vector<RbIndividual>> rb;
};

CollaboratorMap buildCollabrMap(const DbPopulation& p1, const RbPopulation& p2, const std::vector<SubspeciesTag>& tags,
                                int gen, const ObjectiveBounds& bounds, Rng& rng);

struct Solution {
  IndividualId dbId = 0;
  IndividualId rbId = 0;
  DbGenotype db;
  RbGenotype rb;
  Frbs frbs;
  ObjectivePoint objectives;
  bool failed = false;
  MoAnnotation annotation;

  const SubspeciesTag& tag() const noexcept { return db.tag; }
};

/// Pair every member of O1 and O2 with its opposite-species collaborators of
/// the same tag. Each (DB, RB) pair appears once, in first-seen order.
std::vector<Solution> buildSolnSet(const DbPopulation& o1, const RbPopulation& o2,
                                   const std::vector<SubspeciesTag>& tags, const CollaboratorMap& collaborators,
                                   std::span<const Interval> domains, double omega);

/// Score every solution (performance in parallel, complexity from the RB
/// genotype), then annotate the whole set with ranks and crowding.
void evalSolnSet(std::vector<Solution>& solutions, const Problem& problem, const ObjectiveBounds& bounds,
                 unsigned threads = 0);

/// Credit each individual with the objectives of the crowded-best solution it
/// took part in. Individuals in no solution get the worst corner.
void assignIndivsCredit(DbPopulation& pop, const std::vector<Solution>& solutions, const ObjectiveBounds& bounds);
void assignIndivsCredit(RbPopulation& pop, const std::vector<Solution>& solutions, const ObjectiveBounds& bounds);

// ---- reproduction ----------------------------------------------------------

/// Number of consecutive draws of exhausted tags tolerated before the PMF is
/// renormalised over the tags still available.
inline constexpr int kMaxConsecutiveMisses = 100;

template <class Genotype>
Population<Genotype> archiveParentPop(Population<Genotype> combined, const SubspeciesPmf& pmf,
                                      std::size_t numParents, const ObjectiveBounds& bounds, Rng& rng);

DbPopulation breedDbChildren(const DbPopulation& parents, const SubspeciesPmf& pmf, const Hyperparams& hp,
                             const ObjectiveBounds& bounds, Rng& rng, IdSource& ids);
RbPopulation breedRbChildren(const RbPopulation& parents, const SubspeciesPmf& pmf, const Hyperparams& hp,
                             const ObjectiveBounds& bounds, Rng& rng, IdSource& ids);

// ---- driver ----------------------------------------------------------------

struct GenerationRecord {
  int gen = 0;
  std::size_t solutions = 0;
  double bestPerf = 0.0;
  double meanPerf = 0.0;
  std::size_t front1Size = 0;
  std::vector<int> dbCounts;  // parents per tag after archiving
  std::vector<int> rbCounts;
};

struct RunOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  std::function<void(const GenerationRecord&)> onGeneration;
};

struct RunResult {
  DbPopulation r1;
  RbPopulation r2;
  std::vector<Solution> solutions;  // last evaluated set
  std::vector<std::size_t> front;   // rank-1 members of `solutions`
  std::vector<GenerationRecord> generations;
  IndividualId individualsCreated = 0;
  std::unordered_map<IndividualId, int> creditAssignments;
};

/// Runs the full generational loop. Children of the final generation would
/// never be evaluated, so the last breeding step is skipped.
RunResult runFuzzyMococo(const Problem& problem, const Hyperparams& hp, std::uint64_t seed,
                         const RunOptions& options = {});

}  // namespace mococo
