#include "dregsim/results_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dregsim/errors.hpp"

namespace dregsim {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::optional<double> read_opt(const std::string& cell, std::size_t line) {
  if (cell.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || (errno == ERANGE && std::isinf(v)))
    throw ParseError(line, "results.csv: bad number '" + cell + "'");
  return v;
}

std::size_t read_size(const std::string& cell, std::size_t line) {
  if (cell.empty() || cell.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError(line, "results.csv: bad integer '" + cell + "'");
  return static_cast<std::size_t>(std::strtoull(cell.c_str(), nullptr, 10));
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed while writing '" + path.string() + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

const std::string& csv_header() {
  static const std::string header =
      "experiment_id,n,d,M,beta,gamma,lambda,alpha,estimator,averaging,replicates,risk_mean,"
      "risk_stderr,bias_mc,var_mc,upper_bound,lower_bound,k_star,diverged_count";
  return header;
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) {
    out += r.experiment_id + "," + std::to_string(r.n) + "," + std::to_string(r.d) + "," +
           std::to_string(r.M) + "," + opt(r.beta) + "," + opt(r.gamma) + "," + opt(r.lambda) +
           "," + opt(r.alpha) + "," + r.estimator + "," + r.averaging + "," +
           std::to_string(r.replicates) + "," + opt(r.risk_mean) + "," + opt(r.risk_stderr) +
           "," + opt(r.bias_mc) + "," + opt(r.var_mc) + "," + opt(r.upper_bound) + "," +
           opt(r.lower_bound) + "," + (r.k_star ? std::to_string(*r.k_star) : std::string()) +
           "," + std::to_string(r.diverged_count) + "\n";
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw ParseError(1, "results.csv: unexpected header");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 19) throw ParseError(line_no, "results.csv: expected 19 fields");
    ResultRow r;
    r.experiment_id = cells[0];
    r.n = read_size(cells[1], line_no);
    r.d = read_size(cells[2], line_no);
    r.M = read_size(cells[3], line_no);
    r.beta = read_opt(cells[4], line_no);
    r.gamma = read_opt(cells[5], line_no);
    r.lambda = read_opt(cells[6], line_no);
    r.alpha = read_opt(cells[7], line_no);
    r.estimator = cells[8];
    r.averaging = cells[9];
    r.replicates = read_size(cells[10], line_no);
    r.risk_mean = read_opt(cells[11], line_no);
    r.risk_stderr = read_opt(cells[12], line_no);
    r.bias_mc = read_opt(cells[13], line_no);
    r.var_mc = read_opt(cells[14], line_no);
    r.upper_bound = read_opt(cells[15], line_no);
    r.lower_bound = read_opt(cells[16], line_no);
    if (!cells[17].empty()) r.k_star = read_size(cells[17], line_no);
    r.diverged_count = read_size(cells[18], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::filesystem::path> emit_outputs(const std::vector<ResultRow>& rows,
                                                const RunArtifacts& artifacts,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir) {
  if (rows.empty()) throw InvalidArgument("emit_outputs: no rows to write");

  // Render everything first so a failure leaves no partial output behind.
  const std::string csv = format_csv(rows);
  std::vector<std::pair<std::string, std::string>> svgs;
  if (config.plots)
    for (const auto& p : artifacts.plots) svgs.emplace_back(p.file_stem + ".svg", render_svg(p));

  nlohmann::ordered_json manifest;
  manifest["experiment_id"] = config.experiment_id;
  manifest["kind"] = to_string(config.kind);
  manifest["config_hash"] = "fnv1a64:" + hex64(config.source_hash);
  manifest["master_seed"] = config.seed;
  manifest["rows"] = rows.size();
  const auto& c = config.constants;
  manifest["constants"] = {{"tau", c.tau},     {"theta", c.theta}, {"b", c.b},
                           {"c", c.c},         {"c_prime", c.c_prime},
                           {"c_b", c.c_b},     {"c_v", c.c_v}};
  if (c.sigma2)
    manifest["constants"]["sigma2"] = *c.sigma2;
  else
    manifest["constants"]["sigma2"] = "noise_std^2";
  nlohmann::ordered_json files = nlohmann::ordered_json::array({"results.csv"});
  for (const auto& [name, _] : svgs) files.push_back(name);
  manifest["files"] = files;
  if (!artifacts.summary.empty()) {
    manifest["summary"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : artifacts.summary) manifest["summary"][k] = v;
  }
  if (!artifacts.notes.empty()) manifest["notes"] = artifacts.notes;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  write_file(out_dir / "results.csv", csv);
  written.push_back(out_dir / "results.csv");
  for (const auto& [name, body] : svgs) {
    write_file(out_dir / name, body);
    written.push_back(out_dir / name);
  }
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  written.push_back(out_dir / "manifest.json");
  return written;
}

}  // namespace dregsim
