#include "mtcoal/json_io.hpp"

#include <sstream>
#include <stdexcept>

namespace mtcoal {

namespace {

const Json& require_field(const Json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw std::invalid_argument(std::string("missing field '") + field + "'");
  }
  return *it;
}

std::string csv_quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

Json model_to_json(const CanningsModel& model) {
  Json j;
  j["d"] = model.d();
  j["N"] = model.sizes();
  j["law"] = law_name(model.law());
  if (model.deterministic_counts()) j["counts"] = model.counts();
  return j;
}

CanningsModel model_from_json(const Json& j) {
  const auto sizes = require_field(j, "N").get<std::vector<long>>();
  const auto law = require_field(j, "law").get<std::string>();
  if (j.contains("d") && j["d"].get<int>() != static_cast<int>(sizes.size())) {
    throw std::invalid_argument("field 'd' disagrees with the length of 'N'");
  }
  if (law == "custom") {
    throw std::invalid_argument("custom laws cannot be loaded from JSON (field 'law')");
  }
  const auto counts = require_field(j, "counts").get<std::vector<std::vector<long>>>();
  if (law == "wright-fisher") return CanningsModel::wright_fisher(sizes, counts);
  if (law == "mutation") return CanningsModel::mutation(sizes, counts);
  throw std::invalid_argument("unknown law '" + law + "' (field 'law')");
}

Json tensor_to_json(const MergeTensor& tensor) {
  Json j;
  j["j"] = tensor.child_block_counts();
  Json entries = Json::object();
  for (int k = 0; k < tensor.d(); ++k) {
    if (tensor.child_blocks(k) == 0) continue;
    for (int l = 0; l < tensor.d(); ++l) {
      entries[std::to_string(k + 1) + "," + std::to_string(l + 1)] = tensor.cell(k, l);
    }
  }
  j["entries"] = std::move(entries);
  return j;
}

MergeTensor tensor_from_json(const Json& j) {
  const auto counts = require_field(j, "j").get<std::vector<int>>();
  const int d = static_cast<int>(counts.size());
  std::vector<std::vector<std::vector<int>>> cells(d, std::vector<std::vector<int>>(d));
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) cells[k][l].assign(counts[k], 0);
  }
  if (j.contains("entries")) {
    for (const auto& [key, value] : j["entries"].items()) {
      const auto comma = key.find(',');
      if (comma == std::string::npos) {
        throw std::invalid_argument("tensor entry key '" + key + "' is not 'k,l'");
      }
      const int k = std::stoi(key.substr(0, comma)) - 1;
      const int l = std::stoi(key.substr(comma + 1)) - 1;
      if (k < 0 || k >= d || l < 0 || l >= d) {
        throw std::invalid_argument("tensor entry key '" + key + "' outside the type space");
      }
      auto entry = value.get<std::vector<int>>();
      if (static_cast<int>(entry.size()) != counts[k]) {
        throw std::invalid_argument("tensor entry '" + key + "' must have length j_k");
      }
      cells[k][l] = std::move(entry);
    }
  }
  return MergeTensor(d, std::move(cells));
}

Json xi_spec_to_json(const XiSpec& spec) {
  Json j;
  j["a"] = spec.a;
  Json atoms = Json::array();
  for (const auto& atom : spec.atoms) {
    Json a;
    a["mass"] = atom.mass;
    a["x"] = atom.x;
    std::vector<int> y;
    for (int label : atom.y) y.push_back(label + 1);
    a["y"] = y;
    atoms.push_back(std::move(a));
  }
  j["atoms"] = std::move(atoms);
  return j;
}

XiSpec xi_spec_from_json(const Json& j) {
  XiSpec spec;
  spec.a = require_field(j, "a").get<std::vector<double>>();
  if (j.contains("atoms")) {
    for (const auto& a : j["atoms"]) {
      XiAtom atom;
      atom.mass = require_field(a, "mass").get<double>();
      atom.x = require_field(a, "x").get<std::vector<double>>();
      for (int label : require_field(a, "y").get<std::vector<int>>()) {
        atom.y.push_back(label - 1);
      }
      spec.atoms.push_back(std::move(atom));
    }
  }
  spec.validate();
  return spec;
}

Json report_to_json(const LawReport& report) {
  Json j;
  j["law"] = report.law;
  j["instance"] = report.instance;
  j["cases_checked"] = report.cases_checked;
  j["worst_residual"] = report.worst_residual;
  j["pass"] = report.pass();
  j["violations"] = report.violations;
  j["notes"] = report.notes;
  return j;
}

namespace {

std::vector<std::string> state_names(const std::vector<LabeledPartition>& states) {
  std::vector<std::string> names;
  names.reserve(states.size());
  for (const auto& s : states) names.push_back(s.encode());
  return names;
}

template <typename Entry, typename Render>
Json matrix_json(const std::vector<LabeledPartition>& states,
                 const std::vector<std::vector<Entry>>& grid, const std::string& provenance,
                 Render render) {
  Json j;
  j["provenance"] = provenance;
  j["states"] = state_names(states);
  Json rows = Json::array();
  for (const auto& row : grid) {
    Json r = Json::array();
    for (const auto& entry : row) r.push_back(render(entry));
    rows.push_back(std::move(r));
  }
  j["entries"] = std::move(rows);
  return j;
}

template <typename Entry, typename Render>
std::string matrix_csv(const std::vector<std::string>& names,
                       const std::vector<std::vector<Entry>>& grid, Render render) {
  std::ostringstream out;
  out << "state";
  for (const auto& name : names) out << ',' << csv_quote(name);
  out << '\n';
  for (size_t row = 0; row < grid.size(); ++row) {
    out << csv_quote(names[row]);
    for (const auto& entry : grid[row]) out << ',' << render(entry);
    out << '\n';
  }
  return out.str();
}

std::string render_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

Json exact_matrix_to_json(const ExactMatrix& matrix) {
  return matrix_json(matrix.states, matrix.p, matrix.provenance, to_fraction_string);
}

std::string exact_matrix_to_csv(const ExactMatrix& matrix) {
  return matrix_csv(state_names(matrix.states), matrix.p, to_fraction_string);
}

Json mc_matrix_to_json(const McMatrix& matrix) {
  Json j = matrix_json(matrix.states, matrix.freq, matrix.provenance,
                       [](double v) { return v; });
  Json se = Json::array();
  for (const auto& row : matrix.std_error) se.push_back(row);
  j["std_error"] = std::move(se);
  j["reps"] = matrix.reps;
  j["seed"] = matrix.seed;
  return j;
}

std::string mc_matrix_to_csv(const McMatrix& matrix) {
  return matrix_csv(state_names(matrix.states), matrix.freq, render_double);
}

Json real_matrix_to_json(const RealMatrix& matrix) {
  return matrix_json(matrix.states, matrix.p, matrix.provenance, [](double v) { return v; });
}

std::string real_matrix_to_csv(const RealMatrix& matrix) {
  return matrix_csv(state_names(matrix.states), matrix.p, render_double);
}

Json generator_to_json(const GeneratorMatrix& generator) {
  return matrix_json(generator.states, generator.q, "limit", [](double v) { return v; });
}

std::string generator_to_csv(const GeneratorMatrix& generator) {
  return matrix_csv(state_names(generator.states), generator.q, render_double);
}

namespace {

std::vector<std::string> count_names(const std::vector<std::vector<int>>& states) {
  std::vector<std::string> names;
  for (const auto& s : states) {
    std::ostringstream out;
    for (size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s[i];
    names.push_back(out.str());
  }
  return names;
}

}  // namespace

Json block_counting_to_json(const BlockCountingMatrix& matrix) {
  Json j;
  j["provenance"] = "exact";
  j["states"] = matrix.states;
  Json rows = Json::array();
  for (const auto& row : matrix.p) {
    Json r = Json::array();
    for (const auto& entry : row) r.push_back(to_fraction_string(entry));
    rows.push_back(std::move(r));
  }
  j["entries"] = std::move(rows);
  return j;
}

std::string block_counting_to_csv(const BlockCountingMatrix& matrix) {
  return matrix_csv(count_names(matrix.states), matrix.p, to_fraction_string);
}

Json rate_table_to_json(const RateTable& table) {
  Json j;
  j["d"] = table.d();
  j["covered_depth"] = table.covered_depth();
  Json rates = Json::array();
  for (const auto& [tensor, rate] : table.entries()) {
    Json entry;
    entry["tensor"] = tensor_to_json(tensor);
    entry["rate"] = rate;
    rates.push_back(std::move(entry));
  }
  j["rates"] = std::move(rates);
  return j;
}

Json ppf_table_to_json(const PpfTable& table) {
  Json j;
  j["d"] = table.d();
  j["depth"] = table.depth();
  Json entries = Json::array();
  for (const auto& [tensor, value] : table.entries()) {
    Json entry;
    entry["tensor"] = tensor_to_json(tensor);
    entry["value"] = to_fraction_string(value);
    entries.push_back(std::move(entry));
  }
  j["entries"] = std::move(entries);
  return j;
}

PpfTable ppf_table_from_json(const Json& j) {
  PpfTable table(require_field(j, "d").get<int>(), require_field(j, "depth").get<int>());
  for (const auto& entry : require_field(j, "entries")) {
    table.set(tensor_from_json(require_field(entry, "tensor")),
              rational_from_string(require_field(entry, "value").get<std::string>()));
  }
  return table;
}

Json trajectory_to_json(const AncestryTrajectory& trajectory) {
  Json j;
  j["seed"] = trajectory.seed;
  std::vector<std::string> states;
  for (const auto& s : trajectory.states) states.push_back(s.encode());
  j["states"] = states;
  return j;
}

Json timed_trajectory_to_json(const TimedTrajectory& trajectory) {
  Json j;
  j["seed"] = trajectory.seed;
  Json path = Json::array();
  for (const auto& [t, state] : trajectory.path) {
    Json step;
    step["t"] = t;
    step["state"] = state.encode();
    path.push_back(std::move(step));
  }
  j["path"] = std::move(path);
  return j;
}

}  // namespace mtcoal
