#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "mtcoal/ancestry.hpp"
#include "mtcoal/laws.hpp"
#include "mtcoal/limits.hpp"
#include "mtcoal/model.hpp"
#include "mtcoal/report.hpp"

// JSON and CSV renderings of every file format the tool reads or writes.
// Types and labels are 1-based on disk (k, l keys of tensor cells, y labels
// of Xi atoms, labels inside partition encodings); counts[k][l] stay 0-based
// row/column indexed as documented in the model format.

namespace mtcoal {

using Json = nlohmann::ordered_json;

Json model_to_json(const CanningsModel& model);
CanningsModel model_from_json(const Json& j);

Json tensor_to_json(const MergeTensor& tensor);
MergeTensor tensor_from_json(const Json& j);

Json xi_spec_to_json(const XiSpec& spec);
XiSpec xi_spec_from_json(const Json& j);

Json report_to_json(const LawReport& report);

Json exact_matrix_to_json(const ExactMatrix& matrix);
std::string exact_matrix_to_csv(const ExactMatrix& matrix);

Json mc_matrix_to_json(const McMatrix& matrix);
std::string mc_matrix_to_csv(const McMatrix& matrix);

Json real_matrix_to_json(const RealMatrix& matrix);
std::string real_matrix_to_csv(const RealMatrix& matrix);

Json generator_to_json(const GeneratorMatrix& generator);
std::string generator_to_csv(const GeneratorMatrix& generator);

Json block_counting_to_json(const BlockCountingMatrix& matrix);
std::string block_counting_to_csv(const BlockCountingMatrix& matrix);

Json rate_table_to_json(const RateTable& table);

Json ppf_table_to_json(const PpfTable& table);
PpfTable ppf_table_from_json(const Json& j);

Json trajectory_to_json(const AncestryTrajectory& trajectory);
Json timed_trajectory_to_json(const TimedTrajectory& trajectory);

}  // namespace mtcoal
