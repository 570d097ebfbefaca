#pragma once

#include <iosfwd>
#include <string>

#include "slevel/levelset.hpp"

namespace slevel {

inline constexpr const char* kMetricsCsvHeader =
    "outer_iter,grad_iters,data_passes,r,u_hat,objective,max_violation,relative_gap,wall_ms";

// One row per outer iteration; numbers in shortest round-trip form and an
// empty relative_gap cell when no reference f* was supplied.
void write_metrics_csv(const LevelTrace& trace, std::ostream& out);
void write_metrics_csv(const LevelTrace& trace, const std::string& path);

}  // namespace slevel
