#include "monoracle/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace monoracle {

std::string format_double(double value)
{
  char buffer[40];
  auto res = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, res.ptr);
}

nlohmann::json kernel_to_json(const SpectralKernel& kernel)
{
  nlohmann::json object;
  object["W"] = kernel.grid.band_limit;
  object["t"] = kernel.grid.resolution;
  object["v"] = kernel.v;
  return object;
}

SpectralKernel kernel_from_json(const nlohmann::json& object, bool enforce_invariants)
{
  if (!object.is_object() || !object.contains("W") || !object.contains("t") ||
      !object.contains("v"))
    throw std::invalid_argument("kernel JSON must be an object with keys W, t, v");
  const double band_limit = object.at("W").get<double>();
  const int resolution = object.at("t").get<int>();
  auto values = object.at("v").get<std::vector<double>>();
  const FrequencyGrid grid = build_grid(band_limit, resolution);
  if (values.size() != grid.bins)
    throw std::invalid_argument("kernel JSON: v length does not equal W * 2^t");
  SpectralKernel kernel{ grid, std::move(values) };
  if (enforce_invariants)
    validate_kernel(kernel);
  return kernel;
}

nlohmann::json risk_report_to_json(const RiskReport& report)
{
  nlohmann::json object;
  if (report.cv)
    object["cv"] = *report.cv;
  if (report.ise)
    object["ise"] = *report.ise;
  if (report.mise)
    object["mise"] = *report.mise;
  object["n"] = report.n;
  object["tail_correction"] = report.tail_correction;
  object["W"] = report.grid.band_limit;
  object["t"] = report.grid.resolution;
  return object;
}

std::string trace_to_csv(const std::vector<RefinementStep>& trace,
                         const std::vector<std::string>& config_lines)
{
  std::ostringstream out;
  for (const auto& line : config_lines)
    out << "# " << line << "\n";
  out << "t,m,cv,guaranteed_gap\n";
  for (const auto& step : trace)
    out << step.resolution << "," << step.bins << "," << format_double(step.cv) << ","
        << format_double(step.guaranteed_gap) << "\n";
  return out.str();
}

std::vector<double> read_value_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open file: " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
      continue;
    const auto end = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(begin, end - begin + 1);
    double value = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": cannot parse '" << token << "' as a real number";
      throw std::runtime_error(msg.str());
    }
    values.push_back(value);
  }
  return values;
}

void write_text_file(const std::string& path, const std::string& contents)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open file for writing: " + path);
  out << contents;
  if (!out)
    throw std::runtime_error("write failed: " + path);
}

} // namespace monoracle
