#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "blindqe/rng.hpp"

namespace blindqe {

/// Thrown when a procedure is forced down a branch of probability zero.
/// Only the branch enumerator triggers it; it never escapes enumerate_branches.
class ZeroProbabilityBranch : public std::runtime_error {
 public:
  ZeroProbabilityBranch() : std::runtime_error("zero-probability branch") {}
};

template <class Result>
struct Branch {
  double probability;
  Result result;
};

namespace detail {

/// Replays a fixed prefix of decisions, taking choice 0 beyond it, and logs
/// every decision so the caller can advance to the next branch.
class ReplaySource final : public RandomSource {
 public:
  explicit ReplaySource(std::vector<std::uint64_t> prefix) : prefix_(std::move(prefix)) {}

  bool bernoulli(double p_one) override {
    const std::uint64_t c = take(2);
    const double w = c == 1 ? p_one : 1.0 - p_one;
    if (w <= 1e-14) throw ZeroProbabilityBranch{};
    weight_ *= w;
    return c == 1;
  }

  std::uint64_t uniform_below(std::uint64_t n) override {
    if (n == 0) throw std::invalid_argument("uniform_below: empty range");
    const std::uint64_t c = take(n);
    weight_ /= static_cast<double>(n);
    return c;
  }

  double uniform01() override {
    throw std::logic_error("branch enumeration cannot draw continuous values");
  }

  double weight() const { return weight_; }
  const std::vector<std::uint64_t>& choices() const { return choices_; }
  const std::vector<std::uint64_t>& arities() const { return arities_; }

 private:
  std::uint64_t take(std::uint64_t arity) {
    const std::size_t d = choices_.size();
    const std::uint64_t c = d < prefix_.size() ? prefix_[d] : 0;
    choices_.push_back(c);
    arities_.push_back(arity);
    return c;
  }

  std::vector<std::uint64_t> prefix_;
  std::vector<std::uint64_t> choices_;
  std::vector<std::uint64_t> arities_;
  double weight_ = 1.0;
};

}  // namespace detail

/// Runs `fn(RandomSource&)` once per distinct sequence of random decisions
/// and returns every branch with non-zero probability. The procedure must be
/// deterministic given its decisions and must not draw continuous values.
template <class Fn>
auto enumerate_branches(Fn&& fn) {
  using Result = std::invoke_result_t<Fn&, RandomSource&>;
  std::vector<Branch<Result>> out;
  std::vector<std::uint64_t> prefix;
  while (true) {
    detail::ReplaySource src{prefix};
    try {
      Result r = fn(static_cast<RandomSource&>(src));
      out.push_back(Branch<Result>{src.weight(), std::move(r)});
    } catch (const ZeroProbabilityBranch&) {
    }
    // Odometer step over the decisions this run actually made.
    auto choices = src.choices();
    const auto& arities = src.arities();
    std::size_t j = choices.size();
    while (j > 0 && choices[j - 1] + 1 >= arities[j - 1]) --j;
    if (j == 0) break;
    choices.resize(j);
    ++choices[j - 1];
    prefix = std::move(choices);
  }
  return out;
}

}  // namespace blindqe
