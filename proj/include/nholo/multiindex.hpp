// Dense multi-index bookkeeping for truncated jets.
//
// For a fixed number of variables d, enumerates every exponent tuple
// kappa with |kappa| <= kMaxJetOrder in graded order (total degree first,
// lexicographic within a degree). Because the order is graded, the indices
// with |kappa| <= K always form a prefix, so one table per d serves every
// truncation order. The table also precomputes, for every target kappa, the
// list of splittings kappa = lambda + mu together with the product of
// binomial coefficients binom(kappa, lambda); that is exactly the Leibniz
// rule weight when jets store raw partial derivatives.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace nholo {

// Hard cap on the truncation order the tables support. The public expression
// API exposes orders 0..4; the Lagrange pipeline internally uses up to 6.
inline constexpr int kMaxJetOrder = 6;

class MultiIndexTable {
 public:
  struct ProductTerm {
    std::uint32_t left;   // index of lambda
    std::uint32_t right;  // index of kappa - lambda
    double weight;        // prod_c binom(kappa_c, lambda_c)
  };

  // Shared per-dimension instance; tables are immutable after construction.
  static const MultiIndexTable& get(int nvars) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const MultiIndexTable>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(nvars);
    if (it == cache.end()) {
      it = cache
               .emplace(nvars, std::unique_ptr<const MultiIndexTable>(
                                   new MultiIndexTable(nvars)))
               .first;
    }
    return *it->second;
  }

  int nvars() const { return nvars_; }

  // Number of multi-indices with |kappa| <= order.
  int size_at(int order) const { return prefix_size_[order]; }

  int order_of(int idx) const { return order_of_[idx]; }

  int exponent(int idx, int var) const {
    return exps_[static_cast<std::size_t>(idx) * nvars_ + var];
  }

  // Index of kappa + e_axis, or -1 when that would exceed kMaxJetOrder.
  int shifted(int idx, int axis) const {
    return shift_[static_cast<std::size_t>(axis) * count_ + idx];
  }

  // Index of an exponent tuple, or -1 when |kappa| > kMaxJetOrder.
  int index_of(const std::vector<int>& exps) const {
    std::uint64_t key = 0;
    int total = 0;
    for (int v = 0; v < nvars_; ++v) {
      if (exps[v] < 0) return -1;
      total += exps[v];
      if (total > kMaxJetOrder) return -1;
      key |= static_cast<std::uint64_t>(exps[v]) << (4 * v);
    }
    auto it = lookup_.find(key);
    return it == lookup_.end() ? -1 : it->second;
  }

  const std::vector<ProductTerm>& product_terms(int idx) const {
    return product_terms_[idx];
  }

 private:
  explicit MultiIndexTable(int nvars) : nvars_(nvars) {
    if (nvars < 1 || nvars > 16)
      throw std::invalid_argument(
          "MultiIndexTable: variable count must be in [1, 16]");

    prefix_size_.assign(kMaxJetOrder + 1, 0);
    std::vector<int> exps(nvars_, 0);
    for (int grade = 0; grade <= kMaxJetOrder; ++grade) {
      emit_grade(exps, 0, grade);
      prefix_size_[grade] = static_cast<int>(order_of_.size());
    }
    count_ = static_cast<int>(order_of_.size());

    lookup_.reserve(count_ * 2);
    for (int idx = 0; idx < count_; ++idx) lookup_.emplace(key_of(idx), idx);

    shift_.assign(static_cast<std::size_t>(nvars_) * count_, -1);
    for (int idx = 0; idx < count_; ++idx) {
      for (int axis = 0; axis < nvars_; ++axis) {
        std::vector<int> e(nvars_);
        for (int v = 0; v < nvars_; ++v) e[v] = exponent(idx, v);
        e[axis] += 1;
        shift_[static_cast<std::size_t>(axis) * count_ + idx] = index_of(e);
      }
    }

    product_terms_.resize(count_);
    std::vector<int> lambda(nvars_, 0);
    for (int idx = 0; idx < count_; ++idx) collect_splittings(idx, lambda, 0);
  }

  void emit_grade(std::vector<int>& exps, int var, int remaining) {
    if (var == nvars_ - 1) {
      exps[var] = remaining;
      push_index(exps);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      exps[var] = e;
      emit_grade(exps, var + 1, remaining - e);
    }
    exps[var] = 0;
  }

  void push_index(const std::vector<int>& exps) {
    int total = 0;
    for (int v = 0; v < nvars_; ++v) {
      exps_.push_back(static_cast<std::uint8_t>(exps[v]));
      total += exps[v];
    }
    order_of_.push_back(total);
  }

  std::uint64_t key_of(int idx) const {
    std::uint64_t key = 0;
    for (int v = 0; v < nvars_; ++v)
      key |= static_cast<std::uint64_t>(exponent(idx, v)) << (4 * v);
    return key;
  }

  void collect_splittings(int target, std::vector<int>& lambda, int var) {
    if (var == nvars_) {
      std::vector<int> mu(nvars_);
      double weight = 1.0;
      for (int v = 0; v < nvars_; ++v) {
        mu[v] = exponent(target, v) - lambda[v];
        weight *= binom(exponent(target, v), lambda[v]);
      }
      product_terms_[target].push_back(
          {static_cast<std::uint32_t>(index_of(lambda)),
           static_cast<std::uint32_t>(index_of(mu)), weight});
      return;
    }
    for (int e = 0; e <= exponent(target, var); ++e) {
      lambda[var] = e;
      collect_splittings(target, lambda, var + 1);
    }
    lambda[var] = 0;
  }

  static double binom(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
  }

  int nvars_;
  int count_ = 0;
  std::vector<std::uint8_t> exps_;
  std::vector<int> order_of_;
  std::vector<int> prefix_size_;
  std::vector<int> shift_;
  std::unordered_map<std::uint64_t, int> lookup_;
  std::vector<std::vector<ProductTerm>> product_terms_;
};

}  // namespace nholo
