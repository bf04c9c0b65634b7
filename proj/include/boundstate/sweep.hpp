#pragma once

// Classification atlas over a grid of initial amplitudes.

#include <algorithm>
#include <cstddef>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "boundstate/classifier.hpp"
#include "boundstate/errors.hpp"
#include "boundstate/integrator.hpp"
#include "boundstate/phase_portrait.hpp"

namespace boundstate {

struct SweepRow {
  double alpha = 0.0;
  SolutionClass cls;
  std::vector<double> zeros;  // zeros of u counted by cls.node_count
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int indeterminate = 0;
  // Adjacent determinate rows whose node count decreases.
  std::vector<std::size_t> monotonicity_breaks;

  [[nodiscard]] bool monotone() const { return monotonicity_breaks.empty(); }
};

inline std::vector<double> alpha_grid(double lo, double hi, int count) {
  if (count < 1) {
    throw ParameterError("sweep needs at least one point");
  }
  if (!(lo > 0.0) || hi < lo) {
    throw ParameterError("alpha range must satisfy 0 < lo <= hi");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  }
  return out;
}

inline SweepRow sweep_point(const FieldParams& field, double alpha, const IntegratorControls& controls,
                            const ClassifierOptions& opt) {
  SweepRow row;
  row.alpha = alpha;
  row.cls = classify({field, alpha, controls}, opt);
  if (row.cls.tag == ClassTag::Oscillatory || row.cls.tag == ClassTag::BoundStateCandidate) {
    IntegratorControls c = controls;
    c.r_max = std::max(c.r_max, row.cls.witness.r_stop);
    const Trajectory t = integrate({field, alpha, c}, StopPolicy::classification());
    for (const auto& e : locate_events(t, EventTarget::ZeroU, t.r_begin(), t.r_end())) {
      if (static_cast<int>(row.zeros.size()) == row.cls.node_count) break;
      row.zeros.push_back(e.root);
    }
  }
  return row;
}

// Points run in parallel blocks; rows come back in grid order.
inline SweepResult run_sweep(const FieldParams& field, const std::vector<double>& alphas,
                             const IntegratorControls& controls, const ClassifierOptions& opt = {},
                             std::size_t workers = 8) {
  field.validate();
  SweepResult res;
  res.rows.resize(alphas.size());
  for (std::size_t start = 0; start < alphas.size(); start += workers) {
    const std::size_t end = std::min(alphas.size(), start + workers);
    std::vector<std::future<SweepRow>> jobs;
    for (std::size_t i = start; i < end; ++i) {
      jobs.push_back(std::async(std::launch::async,
                                [&, i] { return sweep_point(field, alphas[i], controls, opt); }));
    }
    for (std::size_t i = start; i < end; ++i) {
      res.rows[i] = jobs[i - start].get();
    }
  }
  std::optional<int> last;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& c = res.rows[i].cls;
    if (c.tag == ClassTag::Indeterminate) {
      ++res.indeterminate;
      continue;
    }
    if (c.tag == ClassTag::Constant) continue;
    if (last && c.node_count < *last) res.monotonicity_breaks.push_back(i);
    last = c.node_count;
  }
  return res;
}

}  // namespace boundstate
