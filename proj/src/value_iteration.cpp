#include "mococo/value_iteration.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mococo {

namespace {

constexpr char kMagic[8] = {'M', 'C', 'V', 'I', 'P', 'O', 'L', '1'};
constexpr std::int64_t kGoal = -1;
constexpr int kMaxSweeps = 1'000'000;

void putU64(std::ostream& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t getU64(std::istream& in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw std::runtime_error("policy table is truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

int containingBin(double x, const Interval& bounds, int bins) noexcept {
  const double scaled = (x - bounds.lo) / bounds.width() * bins;
  const auto idx = static_cast<int>(std::floor(scaled));
  return std::clamp(idx, 0, bins - 1);
}

DiscretePolicy::DiscretePolicy(int bins, Interval positionBounds, Interval velocityBounds,
                               std::vector<std::uint8_t> actions)
    : bins_(bins), positionBounds_(positionBounds), velocityBounds_(velocityBounds), actions_(std::move(actions)) {
  if (bins_ < 2) throw std::invalid_argument("discrete policy needs at least 2 bins per feature");
  if (actions_.size() != static_cast<std::size_t>(bins_) * static_cast<std::size_t>(bins_)) {
    throw std::invalid_argument("discrete policy table has the wrong size");
  }
}

Action DiscretePolicy::operator()(const McState& s) const noexcept {
  const auto i = static_cast<std::size_t>(containingBin(s.position, positionBounds_, bins_));
  const auto j = static_cast<std::size_t>(containingBin(s.velocity, velocityBounds_, bins_));
  return actions_[i * static_cast<std::size_t>(bins_) + j];
}

void DiscretePolicy::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write policy table " + path.string());
  out.write(kMagic, sizeof kMagic);
  putU64(out, static_cast<std::uint32_t>(bins_), 4);
  for (double b : {positionBounds_.lo, positionBounds_.hi, velocityBounds_.lo, velocityBounds_.hi}) {
    putU64(out, std::bit_cast<std::uint64_t>(b), 8);
  }
  out.write(reinterpret_cast<const char*>(actions_.data()), static_cast<std::streamsize>(actions_.size()));
  if (!out) throw std::runtime_error("failed writing policy table " + path.string());
}

DiscretePolicy DiscretePolicy::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open policy table " + path.string());
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error(path.string() + " is not a policy table");
  }
  const auto bins = static_cast<int>(getU64(in, 4));
  std::array<double, 4> b{};
  for (auto& v : b) v = std::bit_cast<double>(getU64(in, 8));
  if (bins < 2 || bins > 100'000) throw std::runtime_error("policy table has implausible bin count");
  std::vector<std::uint8_t> actions(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins));
  in.read(reinterpret_cast<char*>(actions.data()), static_cast<std::streamsize>(actions.size()));
  if (!in) throw std::runtime_error("policy table is truncated");
  return DiscretePolicy(bins, {b[0], b[1]}, {b[2], b[3]}, std::move(actions));
}

ValueIterationResult valueIterationOracle(int bins, double convergenceTol, const InitialStateSet& starts,
                                          const McConfig& config) {
  if (bins < 2) throw std::invalid_argument("value iteration needs at least 2 bins per feature");
  if (!(convergenceTol > 0.0)) throw std::invalid_argument("convergence tolerance must be positive");

  const auto n = static_cast<std::size_t>(bins);
  const std::size_t states = n * n;
  constexpr int kActions = McConfig::kNumActions;
  const double dx = config.positionBounds.width() / bins;
  const double dv = config.velocityBounds.width() / bins;

  std::vector<std::int64_t> next(states * kActions);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = config.positionBounds.lo + (static_cast<double>(i) + 0.5) * dx;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = config.velocityBounds.lo + (static_cast<double>(j) + 0.5) * dv;
      for (int a = 0; a < kActions; ++a) {
        const auto step = mcStep({x, v}, a + 1, config);
        std::int64_t target = kGoal;
        if (!step.atGoal) {
          const auto ni = containingBin(step.state.position, config.positionBounds, bins);
          const auto nj = containingBin(step.state.velocity, config.velocityBounds, bins);
          target = static_cast<std::int64_t>(ni) * bins + nj;
        }
        next[(i * n + j) * kActions + static_cast<std::size_t>(a)] = target;
      }
    }
  }

  const double floor = config.returnLowerBound();
  const double reward = config.stepReward;
  auto backup = [&](const std::vector<double>& v, std::size_t s, int a) {
    const auto t = next[s * kActions + static_cast<std::size_t>(a)];
    return reward + (t == kGoal ? 0.0 : v[static_cast<std::size_t>(t)]);
  };

  std::vector<double> values(states, 0.0);
  std::vector<double> updated(states);
  std::vector<double> residuals;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double residual = 0.0;
    for (std::size_t s = 0; s < states; ++s) {
      double best = backup(values, s, 0);
      for (int a = 1; a < kActions; ++a) best = std::max(best, backup(values, s, a));
      best = std::max(best, floor);
      residual = std::max(residual, std::abs(best - values[s]));
      updated[s] = best;
    }
    values.swap(updated);
    residuals.push_back(residual);
    if (residual < convergenceTol) break;
  }

  std::vector<std::uint8_t> greedy(states);
  for (std::size_t s = 0; s < states; ++s) {
    int bestAction = 0;
    double bestValue = backup(values, s, 0);
    for (int a = 1; a < kActions; ++a) {
      const double q = backup(values, s, a);
      if (q > bestValue) {
        bestValue = q;
        bestAction = a;
      }
    }
    greedy[s] = static_cast<std::uint8_t>(bestAction + 1);
  }

  DiscretePolicy policy(bins, config.positionBounds, config.velocityBounds, std::move(greedy));
  const Policy asPolicy = [&policy](const McState& s) -> std::optional<Action> { return policy(s); };
  const auto perf = evalPerformance(asPolicy, starts, config);
  return {std::move(policy), std::move(values), std::move(residuals), perf};
}

}  // namespace mococo
