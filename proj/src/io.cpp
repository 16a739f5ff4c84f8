#include "shiftlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace shiftlab {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Operator operator_from_json(const json& j, const std::string& origin) {
  if (!j.is_object()) throw SchemaError(origin + ": expected a JSON object");
  for (const char* key : {"n", "re", "im"})
    if (!j.contains(key)) throw SchemaError(origin + ": missing field \"" + key + "\"");
  if (!j["n"].is_number_integer() || j["n"].get<long long>() <= 0)
    throw SchemaError(origin + ": \"n\" must be a positive integer");
  const Eigen::Index n = j["n"].get<Eigen::Index>();
  auto parse_part = [&](const char* key) {
    const json& rows = j[key];
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
      throw SchemaError(origin + ": \"" + key + "\" must be an array of " + std::to_string(n) +
                        " rows");
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const json& row = rows[static_cast<size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
        throw SchemaError(origin + ": \"" + key + "\" row " + std::to_string(r) +
                          " is ragged (expected " + std::to_string(n) + " entries)");
      for (Eigen::Index c = 0; c < n; ++c) {
        const json& cell = row[static_cast<size_t>(c)];
        if (!cell.is_number())
          throw SchemaError(origin + ": \"" + key + "\" row " + std::to_string(r) +
                            " has a non-numeric entry");
        m(r, c) = cell.get<double>();
      }
    }
    return m;
  };
  Eigen::MatrixXd re = parse_part("re");
  Eigen::MatrixXd im = parse_part("im");
  Operator op;
  op.mat = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
  op.label = j.value("label", std::string{});
  return op;
}

Operator read_operator(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw SchemaError(path.string() + ": invalid JSON: " + e.what());
  }
  return operator_from_json(j, path.string());
}

json operator_to_json(const Operator& op) {
  const Eigen::Index n = op.dim();
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < n; ++r) {
    json re_row = json::array(), im_row = json::array();
    for (Eigen::Index c = 0; c < n; ++c) {
      re_row.push_back(op.mat(r, c).real());
      im_row.push_back(op.mat(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return json{{"n", n}, {"re", std::move(re)}, {"im", std::move(im)}, {"label", op.label}};
}

void write_operator(const Operator& op, const std::filesystem::path& path) {
  atomic_write(path, operator_to_json(op).dump(2) + "\n");
}

json dilation_to_json(const PeriodicDilation& d, const std::string& base_label) {
  Operator op(d.dense(), base_label + "-dilation");
  json j = operator_to_json(op);
  j["period"] = d.period;
  j["base_label"] = base_label;
  return j;
}

std::string step_circle_csv(const StepFunctionCircle& f) {
  std::ostringstream out;
  out << "theta,value\n";
  for (size_t i = 0; i < f.breakpoints.size(); ++i)
    out << format_double(f.breakpoints[i]) << "," << format_double(f.values[i]) << "\n";
  return out.str();
}

json step_circle_sidecar(const StepFunctionCircle& f) {
  json jumps = json::array();
  for (size_t i = 0; i < f.breakpoints.size(); ++i)
    jumps.push_back(json{{"theta", f.breakpoints[i]}, {"jump", f.jump_at(i)}});
  return json{{"normalization", to_string(f.normalization)},
              {"constant", f.breakpoints.empty() ? f.constant : 0.0},
              {"wrap_value", f.wrap_value()},
              {"jumps", std::move(jumps)}};
}

StepFunctionCircle read_step_circle_csv(const std::filesystem::path& csv,
                                        const std::optional<std::filesystem::path>& sidecar) {
  std::ifstream in(csv);
  if (!in) throw SchemaError("cannot open " + csv.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("theta,value", 0) != 0)
    throw SchemaError(csv.string() + ": expected header \"theta,value\"");
  StepFunctionCircle f;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw SchemaError(csv.string() + ": line " + std::to_string(lineno) + " has no comma");
    try {
      f.breakpoints.push_back(std::stod(line.substr(0, comma)));
      f.values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw SchemaError(csv.string() + ": line " + std::to_string(lineno) + " is not numeric");
    }
  }
  if (sidecar) {
    std::ifstream sin(*sidecar);
    if (!sin) throw SchemaError("cannot open " + sidecar->string());
    json j;
    sin >> j;
    f.normalization = normalization_from_string(j.value("normalization", std::string("raw")));
    if (f.breakpoints.empty()) f.constant = j.value("constant", 0.0);
  }
  return f;
}

std::string step_line_csv(const StepFunctionLine& f) {
  std::ostringstream out;
  out << "t,value\n";
  for (size_t i = 0; i < f.breakpoints.size(); ++i)
    out << format_double(f.breakpoints[i]) << "," << format_double(f.values[i + 1]) << "\n";
  return out.str();
}

json step_line_sidecar(const StepFunctionLine& f) {
  return json{{"tail_left", f.tail_left()}, {"tail_right", f.tail_right()}};
}

std::string residual_table_csv(const std::vector<TraceFormulaReport>& rows) {
  std::ostringstream out;
  out << "function,lhs_re,lhs_im,rhs_re,rhs_im,abs_residual,tolerance,pass,diagnostic_only\n";
  for (const auto& r : rows) {
    out << r.function_label << "," << format_double(r.lhs.real()) << ","
        << format_double(r.lhs.imag()) << "," << format_double(r.rhs.real()) << ","
        << format_double(r.rhs.imag()) << "," << format_double(r.abs_residual) << ","
        << format_double(r.tolerance) << "," << (r.pass ? 1 : 0) << ","
        << (r.diagnostic_only ? 1 : 0) << "\n";
  }
  return out.str();
}

namespace {

struct SvgFrame {
  double x0, x1, y0, y1;  // data ranges
  static constexpr int kW = 640, kH = 360, kPad = 40;

  double px(double x) const { return kPad + (x - x0) / (x1 - x0) * (kW - 2 * kPad); }
  double py(double y) const { return kH - kPad - (y - y0) / (y1 - y0) * (kH - 2 * kPad); }
};

std::string svg_header() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"360\" "
         "viewBox=\"0 0 640 360\">\n<rect width=\"640\" height=\"360\" fill=\"white\"/>\n";
}

void svg_axes(std::ostringstream& out, const SvgFrame& fr) {
  out << "<line x1=\"" << fr.px(fr.x0) << "\" y1=\"" << fr.py(0.0) << "\" x2=\"" << fr.px(fr.x1)
      << "\" y2=\"" << fr.py(0.0) << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << fr.px(fr.x0) << "\" y1=\"" << fr.py(fr.y0) << "\" x2=\"" << fr.px(fr.x0)
      << "\" y2=\"" << fr.py(fr.y1) << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
}

void svg_steps(std::ostringstream& out, const SvgFrame& fr,
               const std::vector<std::pair<double, double>>& corners) {
  out << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  for (const auto& [x, y] : corners) out << fr.px(x) << "," << fr.py(y) << " ";
  out << "\"/>\n";
}

}  // namespace

std::string step_circle_svg(const StepFunctionCircle& f) {
  std::ostringstream out;
  out << svg_header();
  double lo = -1.0, hi = 1.0;
  if (!f.breakpoints.empty()) {
    lo = *std::min_element(f.values.begin(), f.values.end());
    hi = *std::max_element(f.values.begin(), f.values.end());
  } else {
    lo = std::min(0.0, f.constant);
    hi = std::max(0.0, f.constant);
  }
  if (hi - lo < 1e-12) { hi += 1.0; lo -= 1.0; }
  SvgFrame fr{0.0, kTwoPi, lo - 0.1 * (hi - lo), hi + 0.1 * (hi - lo)};
  svg_axes(out, fr);
  std::vector<std::pair<double, double>> corners;
  if (f.breakpoints.empty()) {
    corners = {{0.0, f.constant}, {kTwoPi, f.constant}};
  } else {
    corners.emplace_back(0.0, f.wrap_value());
    for (size_t i = 0; i < f.breakpoints.size(); ++i) {
      corners.emplace_back(f.breakpoints[i], i == 0 ? f.wrap_value() : f.values[i - 1]);
      corners.emplace_back(f.breakpoints[i], f.values[i]);
    }
    corners.emplace_back(kTwoPi, f.values.back());
  }
  svg_steps(out, fr, corners);
  for (double bp : f.breakpoints)
    out << "<circle cx=\"" << fr.px(bp) << "\" cy=\"" << fr.py(0.0)
        << "\" r=\"1.5\" fill=\"#c23\"/>\n";
  out << "</svg>\n";
  return out.str();
}

std::string step_line_svg(const StepFunctionLine& f, double radius) {
  std::ostringstream out;
  out << svg_header();
  double lo = *std::min_element(f.values.begin(), f.values.end());
  double hi = *std::max_element(f.values.begin(), f.values.end());
  if (hi - lo < 1e-12) { hi += 1.0; lo -= 1.0; }
  SvgFrame fr{-radius, radius, lo - 0.1 * (hi - lo), hi + 0.1 * (hi - lo)};
  svg_axes(out, fr);
  std::vector<std::pair<double, double>> corners;
  corners.emplace_back(-radius, f.values.front());
  for (size_t i = 0; i < f.breakpoints.size(); ++i) {
    const double t = std::clamp(f.breakpoints[i], -radius, radius);
    corners.emplace_back(t, f.values[i]);
    corners.emplace_back(t, f.values[i + 1]);
  }
  corners.emplace_back(radius, f.values.back());
  svg_steps(out, fr, corners);
  out << "</svg>\n";
  return out.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("EVP_MD_CTX_new failed");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("SHA-256 computation failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out.good()) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

json hypothesis_to_json(const HypothesisReport& r) {
  return json{{"sigma_min_defect", r.sigma_min_defect},
              {"sigma_min_defect_star", r.sigma_min_defect_star},
              {"alpha", r.alpha},
              {"norm_a", std::isfinite(r.norm_a) ? json(r.norm_a) : json("inf")},
              {"norm_b", std::isfinite(r.norm_b) ? json(r.norm_b) : json("inf")},
              {"kernel_ok", r.kernel_ok},
              {"verdict", r.verdict},
              {"caveat", kFiniteDimCaveat}};
}

json residuals_to_json(const std::vector<TraceFormulaReport>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back(json{{"function", r.function_label},
                       {"lhs_re", r.lhs.real()},
                       {"lhs_im", r.lhs.imag()},
                       {"rhs_re", r.rhs.real()},
                       {"rhs_im", r.rhs.imag()},
                       {"abs_residual", r.abs_residual},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass},
                       {"diagnostic_only", r.diagnostic_only}});
  return arr;
}

json weighted_report_to_json(const WeightedNormReport& r) {
  json trunc = json::object();
  for (const auto& [radius, value] : r.truncated_l1) trunc[format_double(radius)] = value;
  return json{{"weighted_norm", r.weighted_norm},
              {"truncated_l1", std::move(trunc)},
              {"tail_constant_estimate", r.tail_constant_estimate}};
}

json condition31_to_json(const Condition31Report& r) {
  return json{{"sigma_min_im0", r.sigma_min_im0},
              {"norm_31", std::isfinite(r.norm_31) ? json(r.norm_31) : json("inf")},
              {"verdict", r.verdict},
              {"caveat", kFiniteDimCaveat}};
}

json tail_probe_to_json(const TailProbeReport& r) {
  return json{{"im_trace_v", r.im_trace_v},
              {"tail_constant_estimate", r.tail_constant_estimate},
              {"growth_intercept", r.growth_intercept},
              {"growth_slope", r.growth_slope},
              {"verdict", r.verdict_text}};
}

}  // namespace shiftlab
