#include "slevel/report.hpp"

#include <fstream>
#include <ostream>

#include "slevel/dataset.hpp"
#include "slevel/errors.hpp"

namespace slevel {

void write_metrics_csv(const LevelTrace& trace, std::ostream& out) {
  if (trace.entries.empty()) throw InvalidArgument("cannot write an empty trace");
  out << kMetricsCsvHeader << '\n';
  for (const TraceEntry& e : trace.entries) {
    out << e.outer << ',' << e.grad_iters << ',' << format_double(e.data_passes) << ','
        << format_double(e.r) << ',' << format_double(e.u_hat) << ','
        << format_double(e.metrics.objective) << ',' << format_double(e.metrics.max_violation)
        << ',';
    if (e.metrics.relative_gap) out << format_double(*e.metrics.relative_gap);
    out << ',' << format_double(e.wall_ms) << '\n';
  }
}

void write_metrics_csv(const LevelTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_metrics_csv(trace, out);
  out.flush();
  if (!out) throw Error("failed while writing " + path);
}

}  // namespace slevel
