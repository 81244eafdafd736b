#include <algorithm>
#include <cmath>

#include "crackcell/calibrate.hpp"
#include "crackcell/error.hpp"
#include "crackcell/log.hpp"

namespace crackcell {

double failure_load_error(std::span<const ForceStrainRecord> records,
                          std::span<const ForceStrainRecord> reference) {
  const FailureLoad cand = failure_load(records);
  const FailureLoad ref = failure_load(reference);
  if (ref.force == 0.0)
    throw Error("sweep: reference curve peaks at zero force");
  return std::abs(std::abs(cand.force) - std::abs(ref.force)) /
         std::abs(ref.force);
}

double curve_rmse(std::span<const ForceStrainRecord> records,
                  std::span<const ForceStrainRecord> reference) {
  if (records.size() < 2)
    return std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& ref : reference) {
    const double a = ref.applied;
    // records have monotone applied displacement; find the bracketing pair
    if (a < records.front().applied || a > records.back().applied) continue;
    std::size_t hi = 1;
    while (hi < records.size() - 1 && records[hi].applied < a) ++hi;
    const auto& r0 = records[hi - 1];
    const auto& r1 = records[hi];
    const double span = r1.applied - r0.applied;
    const double t = span > 0.0 ? (a - r0.applied) / span : 0.0;
    const double f = r0.force + t * (r1.force - r0.force);
    sum += (f - ref.force) * (f - ref.force);
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::infinity();
  return std::sqrt(sum / static_cast<double>(n));
}

SweepResult run_sweep(const SweepSpec& spec, const CandidateRunner& runner) {
  if (spec.values.empty()) throw Error("sweep: candidate list is empty");
  if (spec.reference.size() < 2)
    throw Error("sweep: reference curve needs at least 2 records");
  if (spec.metric != "failure_load" && spec.metric != "curve_rmse")
    throw Error("sweep: unknown metric '" + spec.metric + "'");

  SweepResult result;
  result.reference_failure_load = failure_load(spec.reference).force;

  std::vector<SweepEntry> entries;
  for (double value : spec.values) {
    SweepEntry e;
    e.value = value;
    try {
      RunResult run = runner(spec.parameter, value);
      if (!run.ok) {
        e.error = run.termination;
      } else if (run.records.empty()) {
        e.error = "run produced no records";
      } else {
        const FailureLoad peak = failure_load(run.records);
        e.ok = true;
        e.failure_load = peak.force;
        e.peak_step = peak.step;
        e.metric_value =
            spec.metric == "failure_load"
                ? failure_load_error(run.records, spec.reference)
                : curve_rmse(run.records, spec.reference);
        e.records = std::move(run.records);
      }
    } catch (const Error& err) {
      e.error = err.what();
    }
    if (!e.ok)
      log_warn("sweep: ", spec.parameter, " = ", value, " failed: ", e.error);
    else
      log_info("sweep: ", spec.parameter, " = ", value, " -> failure load ",
               e.failure_load, " N, metric ", e.metric_value);
    entries.push_back(std::move(e));
  }

  // rank ascending by metric; the pre-sort by value makes ties land on the
  // smaller candidate, and failed runs (metric = inf) sink to the end
  std::sort(entries.begin(), entries.end(),
            [](const SweepEntry& a, const SweepEntry& b) {
              return a.value < b.value;
            });
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SweepEntry& a, const SweepEntry& b) {
                     return a.metric_value < b.metric_value;
                   });
  result.ranked = std::move(entries);
  return result;
}

}  // namespace crackcell
