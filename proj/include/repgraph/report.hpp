#pragma once

#include <iosfwd>

#include "json.hpp"
#include "repgraph/inference.hpp"

namespace repgraph {

nlohmann::json to_json(const TestReport& report);
nlohmann::json to_json(const ConditionDiagnostics& d);

// Breakdown block (value / mean / value-mean / SD per summary), then the
// statistic / p-value block with both summaries side by side.
void write_text_report(std::ostream& out, const TestReport& report);

// statistic,summary,kappa,value,p_analytic,p_permutation
void write_csv_report(std::ostream& out, const TestReport& report);

}  // namespace repgraph
