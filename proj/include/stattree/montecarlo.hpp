#pragma once

// Monte Carlo estimation of rejection rates (Type I error under a null
// scenario, power under an alternative).
//
// Random numbers: SplitMix64 (Steele, Lea & Flood 2014). Replication r draws
// from its own stream seeded with mix64(master_seed ^ mix64(r + 1)), so the
// report does not depend on how replications are spread over threads.
// Uniforms use the top 53 bits, shifted half an ulp to stay inside (0, 1);
// normal variates come from std_normal_quantile of a uniform.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "stattree/dataset.hpp"
#include "stattree/decision_engine.hpp"
#include "stattree/errors.hpp"
#include "stattree/homogeneity.hpp"
#include "stattree/location_tests.hpp"
#include "stattree/normality.hpp"
#include "stattree/special_functions.hpp"

namespace stattree {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

  // Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Independent stream for replication `index` of a run seeded by `master`.
  static constexpr SplitMix64 for_replication(std::uint64_t master, std::uint64_t index) {
    return SplitMix64(splitmix64_mix(master ^ splitmix64_mix(index + 1)));
  }

 private:
  std::uint64_t state_;
};

struct NormalDist {
  double mu = 0.0;
  double sigma = 1.0;
  bool operator==(const NormalDist&) const = default;
};
struct UniformDist {
  double a = 0.0;
  double b = 1.0;
  bool operator==(const UniformDist&) const = default;
};
struct ExponentialDist {
  double lambda = 1.0;
  bool operator==(const ExponentialDist&) const = default;
};

using Distribution = std::variant<NormalDist, UniformDist, ExponentialDist>;

inline double draw(const Distribution& d, SplitMix64& rng) {
  const double u = rng.uniform_open();
  return std::visit(
      [u](const auto& dist) -> double {
        using T = std::decay_t<decltype(dist)>;
        if constexpr (std::is_same_v<T, NormalDist>) {
          return dist.mu + dist.sigma * std_normal_quantile(u);
        } else if constexpr (std::is_same_v<T, UniformDist>) {
          return dist.a + (dist.b - dist.a) * u;
        } else {
          return -std::log(u) / dist.lambda;
        }
      },
      d);
}

struct GroupSpec {
  Distribution distribution;
  std::size_t n = 0;
  bool operator==(const GroupSpec&) const = default;
};

enum class Truth { null_hypothesis, alternative };

inline std::string_view to_string(Truth t) {
  return t == Truth::null_hypothesis ? "null" : "alternative";
}

struct Scenario {
  std::vector<GroupSpec> group_specs;
  Truth truth = Truth::null_hypothesis;
  std::uint64_t seed = 0;
  bool operator==(const Scenario&) const = default;
};

enum class SimulatedTest {
  t_test,
  welch_t,
  anova,
  mann_whitney,
  kruskal_wallis,
  levene,
  shapiro_wilk,
  pipeline,
};

inline std::string_view to_string(SimulatedTest t) {
  switch (t) {
    case SimulatedTest::t_test: return "t_test";
    case SimulatedTest::welch_t: return "welch_t";
    case SimulatedTest::anova: return "anova";
    case SimulatedTest::mann_whitney: return "mann_whitney";
    case SimulatedTest::kruskal_wallis: return "kruskal_wallis";
    case SimulatedTest::levene: return "levene";
    case SimulatedTest::shapiro_wilk: return "shapiro_wilk";
    case SimulatedTest::pipeline: return "pipeline";
  }
  return "unknown";
}

inline SimulatedTest parse_simulated_test(std::string_view s) {
  for (auto t : {SimulatedTest::t_test, SimulatedTest::welch_t, SimulatedTest::anova,
                 SimulatedTest::mann_whitney, SimulatedTest::kruskal_wallis,
                 SimulatedTest::levene, SimulatedTest::shapiro_wilk, SimulatedTest::pipeline}) {
    if (to_string(t) == s) return t;
  }
  throw DataError("unknown test '" + std::string(s) + "'");
}

struct ErrorRateReport {
  SimulatedTest test = SimulatedTest::t_test;
  Truth truth = Truth::null_hypothesis;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double target_alpha = 0.05;
  // 3 binomial standard deviations at the target rate.
  double ci_halfwidth = 0.0;

  bool operator==(const ErrorRateReport&) const = default;
};

inline void validate(const Scenario& s, SimulatedTest test) {
  if (s.group_specs.size() < 2) throw DataError("scenario needs at least 2 groups");
  for (const auto& g : s.group_specs) {
    if (g.n < 3) throw DataError("every simulated group needs n >= 3");
    std::visit(
        [](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, NormalDist>) {
            if (!(d.sigma > 0.0) || !std::isfinite(d.mu)) throw DataError("normal: sigma must be > 0");
          } else if constexpr (std::is_same_v<T, UniformDist>) {
            if (!(d.b > d.a)) throw DataError("uniform: requires a < b");
          } else {
            if (!(d.lambda > 0.0)) throw DataError("exponential: lambda must be > 0");
          }
        },
        g.distribution);
  }
  const bool two_sample = test == SimulatedTest::t_test || test == SimulatedTest::welch_t ||
                          test == SimulatedTest::mann_whitney;
  if (two_sample && s.group_specs.size() != 2) {
    throw DataError(std::string(to_string(test)) + " needs exactly 2 groups");
  }
}

inline GroupedSample simulate_groups(const Scenario& s, SplitMix64& rng) {
  std::vector<Sample> groups;
  groups.reserve(s.group_specs.size());
  for (std::size_t i = 0; i < s.group_specs.size(); ++i) {
    Sample smp{{}, "g" + std::to_string(i + 1)};
    smp.values.reserve(s.group_specs[i].n);
    for (std::size_t j = 0; j < s.group_specs[i].n; ++j) {
      smp.values.push_back(draw(s.group_specs[i].distribution, rng));
    }
    groups.push_back(std::move(smp));
  }
  return GroupedSample("y", "group", std::move(groups));
}

inline bool simulated_test_rejects(SimulatedTest test, const GroupedSample& g, double alpha) {
  const auto& a = g.groups()[0].values;
  switch (test) {
    case SimulatedTest::t_test:
      return two_sample_t(a, g.groups()[1].values, TVariant::pooled).rejects(alpha);
    case SimulatedTest::welch_t:
      return two_sample_t(a, g.groups()[1].values, TVariant::welch).rejects(alpha);
    case SimulatedTest::anova:
      return one_way_anova(g).p_value < alpha;
    case SimulatedTest::mann_whitney:
      return mann_whitney(a, g.groups()[1].values).rejects(alpha);
    case SimulatedTest::kruskal_wallis:
      return kruskal_wallis(g).rejects(alpha);
    case SimulatedTest::levene:
      return levene(g).rejects(alpha);
    case SimulatedTest::shapiro_wilk:
      // Normality is a one-sample property: the first group is tested.
      return shapiro_wilk(a).rejects(alpha);
    case SimulatedTest::pipeline: {
      EngineConfig cfg;
      cfg.alpha = alpha;
      return analyze(g, cfg).conclusion == Conclusion::reject_h0;
    }
  }
  return false;
}

// Empirical rejection rate of `test` over `replications` simulated data
// sets. `threads` = 0 uses the hardware concurrency.
inline ErrorRateReport simulate_error_rates(const Scenario& scenario, SimulatedTest test,
                                            std::size_t replications, double alpha,
                                            unsigned threads = 0) {
  if (replications < 1) throw DataError("replications must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("alpha must be in (0,1)");
  validate(scenario, test);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, replications));

  std::atomic<std::size_t> rejections{0};
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  constexpr std::size_t kChunk = 64;

  auto worker = [&] {
    try {
      std::size_t local = 0;
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= replications) break;
        const std::size_t end = std::min(replications, begin + kChunk);
        for (std::size_t r = begin; r < end; ++r) {
          SplitMix64 rng = SplitMix64::for_replication(scenario.seed, r);
          if (simulated_test_rejects(test, simulate_groups(scenario, rng), alpha)) ++local;
        }
      }
      rejections += local;
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = replications;
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ErrorRateReport rep;
  rep.test = test;
  rep.truth = scenario.truth;
  rep.seed = scenario.seed;
  rep.replications = replications;
  rep.rejections = rejections.load();
  rep.rate = static_cast<double>(rep.rejections) / static_cast<double>(replications);
  rep.target_alpha = alpha;
  rep.ci_halfwidth = 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(replications));
  return rep;
}

}  // namespace stattree
