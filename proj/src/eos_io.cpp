#include "nsf/eos_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nsf/errors.hpp"

namespace nsf {

namespace {

bool read_number(const Json& j, const std::string& key, const std::string& path, double& out,
                 std::vector<std::string>& issues) {
  if (!j.contains(key)) return false;
  const Json& v = j.at(key);
  if (!v.is_number()) {
    issues.push_back(fmt::format("{}.{}: expected a number", path, key));
    return false;
  }
  out = v.get<double>();
  return true;
}

std::vector<double> read_array(const Json& j, const std::string& key, const std::string& path,
                               std::vector<std::string>& issues) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  const Json& v = j.at(key);
  if (!v.is_array()) {
    issues.push_back(fmt::format("{}.{}: expected an array of numbers", path, key));
    return out;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      issues.push_back(fmt::format("{}.{}[{}]: expected a number", path, key, i));
      return {};
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

}  // namespace

EosSpec eos_from_json(const Json& j, const std::string& path, std::vector<std::string>& issues) {
  if (!j.is_object()) {
    issues.push_back(fmt::format("{}: expected an object", path));
    return {};
  }
  std::string shape = "iconic";
  if (j.contains("shape")) {
    if (j["shape"].is_string()) shape = j["shape"].get<std::string>();
    else issues.push_back(fmt::format("{}.shape: expected \"iconic\" or \"table\"", path));
  }
  double a = 1.0, p_inf = 1.0, c = 0.0;
  read_number(j, "a", path, a, issues);
  read_number(j, "p_inf", path, p_inf, issues);
  read_number(j, "entropy_const", path, c, issues);
  bool third_law = false;
  if (j.contains("third_law")) {
    if (j["third_law"].is_boolean()) third_law = j["third_law"].get<bool>();
    else issues.push_back(fmt::format("{}.third_law: expected a boolean", path));
  }
  if (!(a >= 0.0)) issues.push_back(fmt::format("{}.a: radiation constant must be nonnegative, got {}", path, a));
  if (!(p_inf > 0.0)) issues.push_back(fmt::format("{}.p_inf: must be positive, got {} [ws6]", path, p_inf));

  if (shape == "iconic") {
    if (third_law)
      issues.push_back(fmt::format("{}.third_law: the iconic shape has no finite entropy limit [ws7]", path));
    return make_iconic(a, p_inf, c);
  }
  if (shape != "table") {
    issues.push_back(fmt::format("{}.shape: unknown shape '{}'", path, shape));
    return {};
  }
  if (!j.contains("table") || !j["table"].is_object()) {
    issues.push_back(fmt::format("{}.table: required for shape \"table\"", path));
    return {};
  }
  const std::string tp = path + ".table";
  const std::size_t before = issues.size();
  auto z = read_array(j["table"], "z", tp, issues);
  auto p = read_array(j["table"], "p", tp, issues);
  auto dp = read_array(j["table"], "dp", tp, issues);
  if (issues.size() != before || !(p_inf > 0.0)) return {};
  try {
    return make_tabulated(a, p_inf, std::move(z), std::move(p), std::move(dp), third_law, c);
  } catch (const Error& e) {
    issues.push_back(fmt::format("{}.{}", path, e.what()));
  }
  return {};
}

TransportSpec transport_from_json(const Json& j, const std::string& path, std::vector<std::string>& issues) {
  TransportSpec ts;
  if (j.is_null()) return ts;
  if (!j.is_object()) {
    issues.push_back(fmt::format("{}: expected an object", path));
    return ts;
  }
  read_number(j, "lambda_exp", path, ts.lambda_exp, issues);
  read_number(j, "mu0", path, ts.mu0, issues);
  read_number(j, "eta0", path, ts.eta0, issues);
  read_number(j, "kappa0", path, ts.kappa0, issues);
  read_number(j, "mu_under", path, ts.mu_under, issues);
  read_number(j, "mu_over", path, ts.mu_over, issues);
  read_number(j, "eta_over", path, ts.eta_over, issues);
  read_number(j, "kappa_under", path, ts.kappa_under, issues);
  read_number(j, "kappa_over", path, ts.kappa_over, issues);
  return ts;
}

Json eos_to_json(const EosSpec& eos, const TransportSpec& ts) {
  Json j;
  j["shape"] = eos.shape == ShapeKind::Iconic ? "iconic" : "table";
  j["a"] = eos.a;
  j["p_inf"] = eos.p_inf;
  j["entropy_const"] = eos.entropy_const;
  j["third_law"] = eos.third_law;
  j["lambda_exp"] = ts.lambda_exp;
  if (eos.shape == ShapeKind::Table && eos.table) {
    j["table"]["z"] = eos.table->z;
    j["table"]["p"] = eos.table->p;
    j["table"]["dp"] = eos.table->dp;
  }
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, fmt::format("{}: cannot open for reading", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::Io, fmt::format("{}: read failed", path));
  return ss.str();
}

EosDocument parse_eos_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::Validation, fmt::format("eos: malformed JSON: {}", e.what()));
  }
  std::vector<std::string> issues;
  EosDocument d;
  d.eos = eos_from_json(j, "eos", issues);
  if (j.is_object()) {
    // lambda_exp sits beside the EOS keys; a nested transport block overrides it
    d.transport = transport_from_json(j.contains("transport") ? j["transport"] : Json(), "eos.transport", issues);
    if (!j.contains("transport")) read_number(j, "lambda_exp", "eos", d.transport.lambda_exp, issues);
  }
  if (!issues.empty()) {
    std::string msg;
    for (const auto& s : issues) msg += (msg.empty() ? "" : "\n") + s;
    throw Error(Errc::Validation, msg);
  }
  return d;
}

EosDocument load_eos_document(const std::string& path) { return parse_eos_document(read_text_file(path)); }

}  // namespace nsf
