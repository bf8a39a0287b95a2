#pragma once

#include <span>
#include <string>
#include <vector>

#include "stlmon/feasible.hpp"
#include "stlmon/system.hpp"
#include "stlmon/tree.hpp"
#include "stlmon/util.hpp"
#include "stlmon/vectors.hpp"

namespace stlmon {

enum class Verdict { Feas, Vio, SatConcluded };
enum class MonitorStatus { Running, ConcludedVio, ConcludedSat };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Feas: return "feas";
    case Verdict::Vio: return "vio";
    case Verdict::SatConcluded: return "sat";
  }
  return "?";
}

struct VerdictRecord {
  int k = 0;
  std::vector<double> state;
  int cell = 0;
  Verdict verdict = Verdict::Feas;
  Status root = Status::Unknown;  // after the update, when one happened
  std::string basic;              // basic-set encoding after the step

  std::string line() const {
    std::string out = "k=" + std::to_string(k) + " x=(";
    for (size_t i = 0; i < state.size(); ++i) {
      if (i) out += ",";
      out += fmt_double(state[i]);
    }
    out += ") cell=" + std::to_string(cell) + " verdict=" + to_string(verdict);
    out += " root=";
    out += to_char(root);
    out += " I=" + basic;
    return out;
  }
};

/// Online monitor: per observation, check membership in the current feasible
/// set (with the pre-update basic set), then advance the basic set. A vio
/// verdict or a satisfied root concludes the run; further observations are
/// rejected.
class Monitor {
 public:
  Monitor(const SyntaxTree& tree, const SystemModel& model, FeasibleTable& table)
      : tree_(&tree), model_(&model), table_(&table), current_(init_basic(tree)) {
    if (table.horizon() < tree.formula_horizon())
      throw HorizonError("operation horizon " + std::to_string(table.horizon()) +
                         " is below the formula horizon " +
                         std::to_string(tree.formula_horizon()));
  }

  MonitorStatus status() const { return status_; }
  int step() const { return current_.k; }
  const BasicSet& basic() const { return current_; }
  const std::vector<VerdictRecord>& log() const { return log_; }

  Verdict observe(std::span<const double> x) {
    if (status_ != MonitorStatus::Running)
      throw AlreadyConcluded("monitor already issued a terminal verdict");
    auto cell = model_->grid().cell_of(x);
    if (!cell) throw OutOfDomain("observed state outside the state bounds");
    return observe_at(*cell, std::vector<double>(x.begin(), x.end()));
  }

  Verdict observe_cell(int cell) {
    if (status_ != MonitorStatus::Running)
      throw AlreadyConcluded("monitor already issued a terminal verdict");
    return observe_at(cell, model_->grid().center(cell));
  }

  std::string log_text() const {
    std::string out;
    for (const auto& rec : log_) out += rec.line() + "\n";
    return out;
  }

 private:
  Verdict observe_at(int cell, std::vector<double> raw) {
    const int k = current_.k;
    VerdictRecord rec;
    rec.k = k;
    rec.state = std::move(raw);
    rec.cell = cell;

    // Membership is checked against the feasible set of the pre-update
    // basic set; the update happens only on the feas path.
    StateSet X = table_->feasible_set(*tree_, *model_, k, current_);
    if (!X.test(cell)) {
      status_ = MonitorStatus::ConcludedVio;
      rec.verdict = Verdict::Vio;
      rec.root = root_status(*tree_, current_);
      rec.basic = current_.encode();
      log_.push_back(std::move(rec));
      return Verdict::Vio;
    }

    current_ = update_cell(*tree_, current_, cell);
    Status root = root_status(*tree_, current_);
    rec.root = root;
    rec.basic = current_.encode();
    if (root == Status::Sat) {
      status_ = MonitorStatus::ConcludedSat;
      rec.verdict = Verdict::SatConcluded;
      log_.push_back(std::move(rec));
      return Verdict::SatConcluded;
    }
    rec.verdict = Verdict::Feas;
    log_.push_back(std::move(rec));
    return Verdict::Feas;
  }

  const SyntaxTree* tree_;
  const SystemModel* model_;
  FeasibleTable* table_;
  BasicSet current_;
  MonitorStatus status_ = MonitorStatus::Running;
  std::vector<VerdictRecord> log_;
};

}  // namespace stlmon
