#pragma once

#include <algorithm>
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stlmon/oracle.hpp"
#include "stlmon/system.hpp"
#include "stlmon/tree.hpp"
#include "stlmon/vectors.hpp"

namespace stlmon {

struct FeasibleStats {
  std::size_t computed = 0;
  std::size_t hits = 0;
};

/// Memoized map (k, basic set) -> feasible cell set, filled by backward
/// recursion over successor basic sets:
///
///   X_{T+1} = all cells;  root Sat => all cells;
///   X_k(I)  = union over successors Is of consistent_region(Is, k)
///             intersected with the one-step feasible set of X_{k+1}(Is).
///
/// Queries are lazy: only basic sets reachable from the queried one are
/// computed. precompute_all() seeds the query the online monitor starts
/// from, which covers everything a monitoring run can ask for.
class FeasibleTable {
 public:
  explicit FeasibleTable(int T, std::size_t max_entries = 5'000'000)
      : T_(T), max_entries_(max_entries) {
    if (T_ < 0) throw ConfigError("operation horizon must be nonnegative");
  }

  FeasibleTable(FeasibleTable&& o) noexcept
      : T_(o.T_), max_entries_(o.max_entries_), memo_(std::move(o.memo_)), stats_(o.stats_) {}

  int horizon() const { return T_; }

  StateSet feasible_set(const SyntaxTree& tree, const SystemModel& model, int k,
                        const BasicSet& I) {
    if (k > T_ + 1) throw HorizonError("feasible set queried past the operation horizon");
    if (k != I.k) throw Error("basic set is valid for instant " + std::to_string(I.k) +
                              ", queried at " + std::to_string(k));
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(I.encode());
    if (it != memo_.end()) {
      ++stats_.hits;
      return it->second;
    }
    ensure_locked(tree, model, I);
    return memo_.at(I.encode());
  }

  /// Fill the table for every basic set reachable from the initial one.
  void precompute_all(const SyntaxTree& tree, const SystemModel& model) {
    if (T_ < tree.formula_horizon())
      throw HorizonError("operation horizon " + std::to_string(T_) +
                         " is below the formula horizon " +
                         std::to_string(tree.formula_horizon()));
    std::lock_guard<std::mutex> lock(mu_);
    ensure_locked(tree, model, init_basic(tree));
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return memo_.size();
  }
  FeasibleStats stats() const {
    std::lock_guard<std::mutex> lock(mu_);
    return stats_;
  }

  /// Serialized table, keyed by the canonical basic-set encoding, sorted for
  /// byte-identical output. The header pins formula, model, and horizon.
  std::string save(const SyntaxTree& tree, const SystemModel& model) const {
    std::lock_guard<std::mutex> lock(mu_);
    nlohmann::json doc;
    doc["version"] = 1;
    doc["formula_hash"] = hash_hex(tree.hash());
    doc["model_hash"] = hash_hex(model.hash());
    doc["grid"] = model.grid().describe();
    doc["T"] = T_;
    doc["cells"] = model.grid().cell_count();
    std::vector<std::pair<std::string, std::string>> entries;
    entries.reserve(memo_.size());
    for (const auto& [key, set] : memo_) entries.emplace_back(key, set.to_hex());
    std::sort(entries.begin(), entries.end());
    nlohmann::json arr = nlohmann::json::array();
    for (auto& [key, hex] : entries) arr.push_back({key, hex});
    doc["entries"] = std::move(arr);
    return doc.dump();
  }

  static FeasibleTable load(const std::string& text, const SyntaxTree& tree,
                            const SystemModel& model) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("feasible-set artifact is not valid JSON: ") + e.what());
    }
    if (!doc.contains("T") || !doc.contains("entries"))
      throw ConfigError("feasible-set artifact is missing required fields");
    if (doc.value("formula_hash", "") != hash_hex(tree.hash()))
      throw ConfigError("feasible-set artifact was built for a different formula");
    if (doc.value("model_hash", "") != hash_hex(model.hash()))
      throw ConfigError("feasible-set artifact was built for a different model");
    if (doc.value("cells", -1) != model.grid().cell_count())
      throw ConfigError("feasible-set artifact cell count mismatch");
    if (doc.contains("grid") && doc["grid"].get<std::string>() != model.grid().describe())
      throw ConfigError("feasible-set artifact was built for a different grid");
    FeasibleTable tbl(doc["T"].get<int>());
    for (const auto& entry : doc["entries"]) {
      tbl.memo_.emplace(entry.at(0).get<std::string>(),
                        StateSet::from_hex(model.grid().cell_count(),
                                           entry.at(1).get<std::string>()));
    }
    return tbl;
  }

 private:
  // Two passes under the table lock. Forward: walk successor chains from the
  // seed, level by level, skipping successors whose consistent region is
  // empty (their term contributes nothing) and stopping at already-memoized
  // or root-satisfied sets. Backward: fill the memo bottom-up so every
  // successor lookup hits.
  void ensure_locked(const SyntaxTree& tree, const SystemModel& model, const BasicSet& seed) {
    const std::string seed_key = seed.encode();
    if (memo_.count(seed_key)) return;

    if (root_status(tree, seed) == Status::Vio) {
      // Not a member of the feasible basic sets; nothing can complete it.
      memo_.emplace(seed_key, StateSet(model.grid().cell_count()));
      ++stats_.computed;
      return;
    }

    std::vector<std::vector<BasicSet>> levels;
    levels.push_back({seed});
    std::size_t enumerated = 1;
    for (int k = seed.k; k <= T_; ++k) {
      std::vector<BasicSet> next;
      std::unordered_set<std::string> seen;
      for (const BasicSet& I : levels.back()) {
        if (memo_.count(I.encode())) continue;
        if (root_status(tree, I) == Status::Sat) continue;
        for (BasicSet& Is : successors(tree, I)) {
          if (consistent_region(tree, Is, k).none()) continue;
          if (!seen.insert(Is.encode()).second) continue;
          next.push_back(std::move(Is));
        }
      }
      enumerated += next.size();
      if (enumerated > max_entries_)
        throw ResourceLimit("feasible-set computation exceeded the basic-set cap of " +
                            std::to_string(max_entries_));
      levels.push_back(std::move(next));
      if (levels.back().empty()) break;
    }

    for (std::size_t idx = levels.size(); idx-- > 0;) {
      const int k = seed.k + static_cast<int>(idx);
      for (const BasicSet& I : levels[idx]) {
        std::string key = I.encode();
        if (memo_.count(key)) continue;
        StateSet X(model.grid().cell_count());
        if (k == T_ + 1 || root_status(tree, I) == Status::Sat) {
          X = StateSet::full(model.grid().cell_count());
        } else {
          for (const BasicSet& Is : successors(tree, I)) {
            StateSet region = consistent_region(tree, Is, k);
            if (region.none()) continue;
            region &= one_step_feasible(model, memo_.at(Is.encode()));
            X |= region;
          }
        }
        memo_.emplace(std::move(key), std::move(X));
        ++stats_.computed;
      }
    }
  }

  int T_;
  std::size_t max_entries_;
  std::unordered_map<std::string, StateSet> memo_;
  FeasibleStats stats_;
  mutable std::mutex mu_;
};

}  // namespace stlmon
